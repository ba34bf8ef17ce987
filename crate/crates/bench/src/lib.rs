//! Fixed-seed inputs shared by the benchmarks.

use qstate_core::random;
use qstate_core::{DensityOperator, HilbertStructure, StateVector, SubsystemEvent};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Fixture {
    pub pure: StateVector,
    pub mixed: DensityOperator,
    pub event: SubsystemEvent,
}

/// Random pure and mixed states over `dims` with a rank-1 event on the
/// second subsystem.
pub fn fixture(dims: &[usize], seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let structure = HilbertStructure::new(dims.to_vec()).expect("valid dims");
    let pure = random::haar_state(&structure, &mut rng);
    let mixed = random::random_mixed(&structure, &mut rng);
    let event = SubsystemEvent::new(1, random::random_projector_of_rank(dims[1], 1, &mut rng))
        .expect("square projector");
    Fixture { pure, mixed, event }
}
