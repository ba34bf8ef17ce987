//! Random states, unitaries and projectors for the property oracles.
//!
//! Pure states are Haar-uniform (normalized complex Gaussian vectors).
//! Mixed states are convex mixtures of 2 to 4 Haar states with
//! uniform-simplex weights. Projectors span Haar-random orthonormal vectors.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::tensor::{CMatrix, CVector, DensityOperator, HilbertStructure, RawVector, StateVector};

/// Complex normal sample with unit variance `E|z|² = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Un-normalized complex Gaussian vector.
pub fn gaussian_vector<R: Rng + ?Sized>(structure: &HilbertStructure, rng: &mut R) -> RawVector {
    let amps = CVector::from_fn(structure.total_dim(), |_, _| complex_normal(rng));
    RawVector::new(structure.clone(), amps).expect("length matches structure")
}

pub fn haar_state<R: Rng + ?Sized>(structure: &HilbertStructure, rng: &mut R) -> StateVector {
    loop {
        if let Ok(state) = gaussian_vector(structure, rng).normalize() {
            return state;
        }
    }
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal absorbed into Q.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let ginibre = CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    let qr = ginibre.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Projector of the given rank onto Haar-random orthonormal vectors.
pub fn random_projector_of_rank<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> CMatrix {
    let u = haar_unitary(dim, rng);
    let v = u.columns(0, rank);
    v * v.adjoint()
}

/// Projector with rank drawn uniformly from `1..dim`.
pub fn random_projector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let rank = rng.random_range(1..dim);
    random_projector_of_rank(dim, rank, rng)
}

/// Uniform point on the probability simplex with `n` vertices.
pub fn simplex_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

pub fn random_mixed<R: Rng + ?Sized>(structure: &HilbertStructure, rng: &mut R) -> DensityOperator {
    let count = rng.random_range(2..=4);
    let weights = simplex_weights(count, rng);
    let n = structure.total_dim();
    let mut matrix = CMatrix::zeros(n, n);
    for w in weights {
        let psi = haar_state(structure, rng);
        matrix += psi.to_density().matrix() * Complex64::new(w, 0.0);
    }
    DensityOperator::new(structure.clone(), matrix).expect("shape matches structure")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{hermiticity_deviation, max_abs_deviation, unitarity_deviation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 2..6 {
            assert!(unitarity_deviation(&haar_unitary(d, &mut rng)) < 1e-12);
        }
    }

    #[test]
    fn random_projector_is_projector_of_requested_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in 2..6 {
            for r in 1..d {
                let p = random_projector_of_rank(d, r, &mut rng);
                assert!(hermiticity_deviation(&p) < 1e-12);
                assert!(max_abs_deviation(&(&p * &p), &p) < 1e-12);
                assert!((p.trace().re - r as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_mixed_is_a_density_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = HilbertStructure::new(vec![2, 3, 2]).unwrap();
        for _ in 0..20 {
            let rho = random_mixed(&s, &mut rng);
            rho.validate().unwrap();
            assert!(rho.purity() < 1.0);
        }
    }

    #[test]
    fn same_seed_same_draw() {
        let s = HilbertStructure::new(vec![3, 2]).unwrap();
        let a = haar_state(&s, &mut ChaCha8Rng::seed_from_u64(9));
        let b = haar_state(&s, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }
}
