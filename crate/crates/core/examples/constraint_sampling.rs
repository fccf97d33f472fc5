//! Seeded per-user streams and uniform constraint draws.

use randproj::sampler::{derive_seed, sample_constraint, ConstraintPartition, RngStream, StreamPurpose};

fn main() -> randproj::Result<()> {
    // users own 4, 2 and 3 components
    let partition = ConstraintPartition::contiguous(&[4, 2, 3])?;
    let seed = derive_seed(7, 1);

    for user in 0..partition.users() {
        let mut stream = RngStream::new(seed, user as u32, StreamPurpose::ConstraintDraw);
        let draws: Vec<usize> = (0..12)
            .map(|_| sample_constraint(&partition, user, &mut stream).map(|j| j + 1))
            .collect::<randproj::Result<_>>()?;
        println!("user {} owns {:?}: {draws:?}", user + 1, partition.members(user).iter().map(|j| j + 1).collect::<Vec<_>>());
    }

    let mut stream = RngStream::new(seed, 0, StreamPurpose::ConstraintDraw);
    let mut counts = [0u32; 4];
    for _ in 0..100_000 {
        counts[sample_constraint(&partition, 0, &mut stream)?] += 1;
    }
    println!("user 1 frequencies over 1e5 draws: {counts:?}");
    Ok(())
}
