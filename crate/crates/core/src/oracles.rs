//! Randomized oracles that verify the operator identities linking the
//! collapse and the relative-state descriptions.
//!
//! Every check is deterministic in `(trials, dims_pool, seed)`. Trial `i`
//! draws from its own generator seeded with `seed + i`, so trials run in
//! parallel and a failing trial is reproduced by re-running with
//! `trials = 1` and `seed = failing_seed`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::collapse::{collapse_pure, collapsed_object_state, event_probability, StateRef};
use crate::error::{Error, Result};
use crate::random;
use crate::relative::{relative_state_direct, relative_state_via_pair, SubjectEntity};
use crate::tensor::{
    embed, max_abs_deviation, partial_scalar_product, partial_trace, partial_trace_matrix, CMatrix,
    DensityOperator, HilbertStructure, RawVector, StateVector, SubsystemEvent,
};
use crate::tolerance::{EPS_CMP, EPS_PROB};

/// Resample cap for subject events that turn out to have zero probability.
pub const MAX_RESAMPLES: usize = 100;

pub const DEFAULT_DIMS_POOL: &[&[usize]] = &[&[2, 2], &[2, 3], &[3, 3], &[2, 2, 2], &[2, 3, 2]];

pub fn default_dims_pool() -> Vec<HilbertStructure> {
    DEFAULT_DIMS_POOL
        .iter()
        .map(|dims| HilbertStructure::new(dims.to_vec()).expect("valid default structure"))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub trials: usize,
    pub dims_pool: Vec<HilbertStructure>,
    pub seed: u64,
    pub tolerance: f64,
}

impl CheckConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            dims_pool: default_dims_pool(),
            seed,
            tolerance: EPS_CMP,
        }
    }

    pub fn with_pool(mut self, dims_pool: Vec<HilbertStructure>) -> Self {
        self.dims_pool = dims_pool;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub trials: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Seed of the first trial whose deviation exceeded the tolerance.
    pub failing_seed: Option<u64>,
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add(trial as u64)
}

fn run_trials<F>(
    name: &'static str,
    config: &CheckConfig,
    pool: &[HilbertStructure],
    kernel: F,
) -> Result<CheckReport>
where
    F: Fn(&HilbertStructure, u64, &mut ChaCha8Rng) -> Result<f64> + Sync,
{
    if config.trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    if config.tolerance.is_nan() || config.tolerance <= 0.0 {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    if pool.is_empty() {
        return Err(Error::Precondition(format!(
            "{name}: no usable structure in the dims pool"
        )));
    }
    let deviations: Vec<(u64, f64)> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(config.seed, trial);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let structure = &pool[rng.random_range(0..pool.len())];
            let deviation = match kernel(structure, seed, &mut rng) {
                Ok(d) if d.is_finite() => d,
                _ => f64::INFINITY,
            };
            (seed, deviation)
        })
        .collect();
    let max_deviation = deviations.iter().map(|&(_, d)| d).fold(0.0, f64::max);
    let pass = max_deviation <= config.tolerance;
    let failing_seed = if pass {
        None
    } else {
        deviations
            .iter()
            .find(|&&(_, d)| d > config.tolerance)
            .map(|&(s, _)| s)
    };
    Ok(CheckReport {
        name,
        trials: config.trials,
        max_deviation,
        tolerance: config.tolerance,
        pass,
        failing_seed,
    })
}

fn bipartite(pool: &[HilbertStructure]) -> Vec<HilbertStructure> {
    pool.iter().filter(|s| s.len() == 2).cloned().collect()
}

/// Draws an event on `subsystem` with probability above `EPS_PROB`.
fn sample_event<R: Rng>(
    state: StateRef<'_>,
    subsystem: usize,
    rng: &mut R,
    draw: impl Fn(usize, &mut R) -> CMatrix,
) -> Result<SubsystemEvent> {
    let dim = state.structure().dim(subsystem);
    for _ in 0..MAX_RESAMPLES {
        let event = SubsystemEvent::new(subsystem, draw(dim, rng))?;
        if event_probability(state, &event)? > EPS_PROB {
            return Ok(event);
        }
    }
    Err(Error::ZeroProbabilityEvent { probability: 0.0 })
}

fn unit_vector<R: Rng>(dim: usize, rng: &mut R) -> StateVector {
    random::haar_state(&HilbertStructure::new(vec![dim]).expect("dim >= 2"), rng)
}

/// Max deviation between the relative state (both evaluation paths) and the
/// collapsed object state.
pub fn rs_collapse_deviation(
    state: StateRef<'_>,
    event: &SubsystemEvent,
    object: usize,
) -> Result<f64> {
    let subject = SubjectEntity::new(event.clone());
    let collapsed = collapsed_object_state(state, event, object)?;
    let direct = relative_state_direct(state, &subject, object)?;
    let pair = relative_state_via_pair(state, &subject, object)?;
    Ok(max_abs_deviation(direct.matrix(), collapsed.matrix())
        .max(max_abs_deviation(pair.matrix(), collapsed.matrix())))
}

/// Relative state equals collapsed object state for random pure (even trial
/// seeds) and mixed (odd trial seeds) composite states.
pub fn check_rs_equals_collapse(config: &CheckConfig) -> Result<CheckReport> {
    run_trials(
        "rs_equals_collapse",
        config,
        &config.dims_pool,
        |structure, seed, rng| {
            let n = structure.len();
            let subject = rng.random_range(0..n);
            let object = (subject + rng.random_range(1..n)) % n;
            if seed % 2 == 0 {
                let psi = random::haar_state(structure, rng);
                let event =
                    sample_event(StateRef::Pure(&psi), subject, rng, random::random_projector)?;
                rs_collapse_deviation(StateRef::Pure(&psi), &event, object)
            } else {
                let rho = random::random_mixed(structure, rng);
                let event = sample_event(
                    StateRef::Mixed(&rho),
                    subject,
                    rng,
                    random::random_projector,
                )?;
                rs_collapse_deviation(StateRef::Mixed(&rho), &event, object)
            }
        },
    )
}

/// Nominator operator and denominator of the relative state with respect
/// to `|φ⟩` on the second subsystem, evaluated by two routes.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteComparison {
    pub nominator_psp: CMatrix,
    pub denominator_psp: f64,
    pub nominator_ptrace: CMatrix,
    pub denominator_ptrace: f64,
}

impl RouteComparison {
    pub fn deviation(&self) -> f64 {
        max_abs_deviation(&self.nominator_psp, &self.nominator_ptrace)
            .max((self.denominator_psp - self.denominator_ptrace).abs())
    }
}

/// Partial-scalar-product route: `(⟨φ|Ψ⟩)(⟨Ψ|φ⟩)` over
/// `⟨Ψ|(I ⊗ |φ⟩⟨φ|)|Ψ⟩`. Partial-trace route: `tr₂(|φ⟩⟨φ| |Ψ⟩⟨Ψ|)` over
/// `tr(|φ⟩⟨φ| |Ψ⟩⟨Ψ|)`.
pub fn psp_ptrace_routes(psi: &StateVector, phi: &StateVector) -> Result<RouteComparison> {
    if psi.structure().len() != 2 {
        return Err(Error::StructureMismatch(
            "route comparison needs a bipartite state".into(),
        ));
    }
    let event = SubsystemEvent::ray(1, phi)?;
    let q = embed(&event, psi.structure())?;

    let contracted = partial_scalar_product(&phi.to_raw(), &psi.to_raw(), 1)?;
    let nominator_psp = contracted.amplitudes() * contracted.amplitudes().adjoint();
    let denominator_psp = psi.amplitudes().dotc(&(&q * psi.amplitudes())).re;

    let rho = psi.to_density();
    let weighted = &q * rho.matrix();
    let (_, nominator_ptrace) = partial_trace_matrix(&weighted, psi.structure(), &[0])?;
    let denominator_ptrace = weighted.trace().re;

    Ok(RouteComparison {
        nominator_psp,
        denominator_psp,
        nominator_ptrace,
        denominator_ptrace,
    })
}

pub fn check_psp_vs_ptrace(config: &CheckConfig) -> Result<CheckReport> {
    let pool = bipartite(&config.dims_pool);
    run_trials("psp_vs_ptrace", config, &pool, |structure, _, rng| {
        let psi = random::haar_state(structure, rng);
        let phi = unit_vector(structure.dim(1), rng);
        Ok(psp_ptrace_routes(&psi, &phi)?.deviation())
    })
}

/// Coefficients `c_p = Σ_q ⟨φ|q⟩ ⟨p|⟨q|Ψ⟩` of the partial scalar product
/// `⟨φ|₂Ψ` in the first-factor basis `{|p⟩}`, computed with the second
/// factor expanded in `{|q⟩}`. Basis vectors are the columns of `basis1`
/// and `basis2`.
pub fn psp_coefficients_in_bases(
    phi: &RawVector,
    psi: &RawVector,
    basis1: &CMatrix,
    basis2: &CMatrix,
) -> Result<Vec<Complex64>> {
    let dims = psi.structure().dims();
    if dims.len() != 2
        || phi.amplitudes().len() != dims[1]
        || basis1.shape() != (dims[0], dims[0])
        || basis2.shape() != (dims[1], dims[1])
    {
        return Err(Error::StructureMismatch(
            "bases do not match the bipartite structure".into(),
        ));
    }
    let (d1, d2) = (dims[0], dims[1]);
    let amp = |k: usize, l: usize| psi.amplitudes()[k * d2 + l];
    let coefficients = (0..d1)
        .map(|p| {
            (0..d2)
                .map(|q| {
                    let phi_q: Complex64 = (0..d2)
                        .map(|l| phi.amplitudes()[l].conj() * basis2[(l, q)])
                        .sum();
                    let mut psi_pq = Complex64::new(0.0, 0.0);
                    for k in 0..d1 {
                        for l in 0..d2 {
                            psi_pq += basis1[(k, p)].conj() * basis2[(l, q)].conj() * amp(k, l);
                        }
                    }
                    phi_q * psi_pq
                })
                .sum()
        })
        .collect();
    Ok(coefficients)
}

/// Max deviation between the partial scalar product evaluated in the
/// computational bases and in the bases given by the columns of `u1`, `u2`
/// (rotated back to the computational basis for comparison).
pub fn basis_independence_deviation(
    phi: &RawVector,
    psi: &RawVector,
    u1: &CMatrix,
    u2: &CMatrix,
) -> Result<f64> {
    let d1 = psi.structure().dim(0);
    let reference = psp_coefficients_in_bases(
        phi,
        psi,
        &CMatrix::identity(d1, d1),
        &CMatrix::identity(phi.amplitudes().len(), phi.amplitudes().len()),
    )?;
    let rotated = psp_coefficients_in_bases(phi, psi, u1, u2)?;
    let back: Vec<Complex64> = (0..d1)
        .map(|k| (0..d1).map(|p| u1[(k, p)] * rotated[p]).sum())
        .collect();
    let library = partial_scalar_product(phi, psi, 1)?;
    Ok(reference
        .iter()
        .zip(&back)
        .zip(library.amplitudes().iter())
        .map(|((a, b), c)| (a - b).norm().max((a - c).norm()))
        .fold(0.0, f64::max))
}

pub fn check_basis_independence(config: &CheckConfig) -> Result<CheckReport> {
    let pool = bipartite(&config.dims_pool);
    run_trials("basis_independence", config, &pool, |structure, _, rng| {
        let psi = random::gaussian_vector(structure, rng);
        let phi = random::gaussian_vector(&structure.select(&[1])?, rng);
        let u1 = random::haar_unitary(structure.dim(0), rng);
        let u2 = random::haar_unitary(structure.dim(1), rng);
        basis_independence_deviation(&phi, &psi, &u1, &u2)
    })
}

/// Coincidence probability `tr(ρ P₁ P₂)` and succession probability
/// `tr(ρ P₂) · tr(P₁ ρ'₁)` with `ρ'₁` the Lüders-changed state of subsystem 0.
pub fn succession_and_coincidence(
    rho: &DensityOperator,
    first: &SubsystemEvent,
    second: &SubsystemEvent,
) -> Result<(f64, f64)> {
    if first.subsystem() != 0 || second.subsystem() != 1 {
        return Err(Error::Precondition(
            "events must act on subsystems 1 and 2".into(),
        ));
    }
    let p1 = embed(first, rho.structure())?;
    let p2 = embed(second, rho.structure())?;
    let coincidence = (rho.matrix() * &p1 * &p2).trace().re;
    let changed = collapsed_object_state(rho, second, 0)?;
    let succession =
        event_probability(rho, second)? * (first.projector() * changed.matrix()).trace().re;
    Ok((coincidence, succession))
}

pub fn check_succession_vs_coincidence(config: &CheckConfig) -> Result<CheckReport> {
    run_trials(
        "succession_vs_coincidence",
        config,
        &config.dims_pool,
        |structure, _, rng| {
            let rho = random::random_mixed(structure, rng);
            let first = SubsystemEvent::new(0, random::random_projector(structure.dim(0), rng))?;
            let second = sample_event(StateRef::Mixed(&rho), 1, rng, random::random_projector)?;
            let (coincidence, succession) = succession_and_coincidence(&rho, &first, &second)?;
            Ok((coincidence - succession).abs())
        },
    )
}

/// Subject-subsystem description after the elementary event `|φ⟩⟨φ|` on
/// subsystem 2, without collapse (relative-state view) and with it.
#[derive(Debug, Clone, PartialEq)]
pub struct DistinguishabilityReport {
    pub rsqm_subject_state: DensityOperator,
    pub cqm_subject_state: DensityOperator,
    pub rsqm_purity: f64,
    pub cqm_purity: f64,
    pub correlation_norm_rsqm: f64,
    pub correlation_norm_cqm: f64,
}

/// Max element magnitude of `ρ₁₂ − ρ₁ ⊗ ρ₂`.
fn correlation_norm(rho: &DensityOperator) -> Result<f64> {
    let r1 = partial_trace(rho, &[0])?;
    let r2 = partial_trace(rho, &[1])?;
    Ok(max_abs_deviation(
        rho.matrix(),
        &r1.matrix().kronecker(r2.matrix()),
    ))
}

pub fn distinguishability_report(
    psi: &StateVector,
    phi: &StateVector,
) -> Result<DistinguishabilityReport> {
    if psi.structure().len() != 2 {
        return Err(Error::StructureMismatch(
            "distinguishability needs a bipartite state".into(),
        ));
    }
    let event = SubsystemEvent::ray(1, phi)?;
    let uncollapsed = psi.to_density();
    let collapsed = collapse_pure(psi, &event)?.post_state.to_density();
    let rsqm_subject_state = partial_trace(&uncollapsed, &[1])?;
    let cqm_subject_state = partial_trace(&collapsed, &[1])?;
    Ok(DistinguishabilityReport {
        rsqm_purity: rsqm_subject_state.purity(),
        cqm_purity: cqm_subject_state.purity(),
        correlation_norm_rsqm: correlation_norm(&uncollapsed)?,
        correlation_norm_cqm: correlation_norm(&collapsed)?,
        rsqm_subject_state,
        cqm_subject_state,
    })
}

/// After an elementary event the collapsed subject state is `|φ⟩⟨φ|`, pure
/// and uncorrelated; the uncollapsed one has purity at most 1.
pub fn check_distinguishability(config: &CheckConfig) -> Result<CheckReport> {
    let pool = bipartite(&config.dims_pool);
    run_trials("distinguishability", config, &pool, |structure, _, rng| {
        let psi = random::haar_state(structure, rng);
        let dim = structure.dim(1);
        let mut phi = unit_vector(dim, rng);
        let mut attempts = 1;
        while event_probability(&psi, &SubsystemEvent::ray(1, &phi)?)? <= EPS_PROB {
            if attempts == MAX_RESAMPLES {
                return Err(Error::ZeroProbabilityEvent { probability: 0.0 });
            }
            phi = unit_vector(dim, rng);
            attempts += 1;
        }
        let report = distinguishability_report(&psi, &phi)?;
        let expected = phi.to_density();
        Ok((report.cqm_purity - 1.0)
            .abs()
            .max(report.correlation_norm_cqm)
            .max(max_abs_deviation(
                report.cqm_subject_state.matrix(),
                expected.matrix(),
            ))
            .max(report.rsqm_purity - 1.0))
    })
}

/// All five checks in a fixed order.
pub fn run_all(config: &CheckConfig) -> Result<Vec<CheckReport>> {
    Ok(vec![
        check_rs_equals_collapse(config)?,
        check_psp_vs_ptrace(config)?,
        check_basis_independence(config)?,
        check_succession_vs_coincidence(config)?,
        check_distinguishability(config)?,
    ])
}
