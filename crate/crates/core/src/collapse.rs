//! Event probabilities and the Lüders selective change of state.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{
    embed, partial_trace, DensityOperator, HilbertStructure, StateVector, SubsystemEvent,
};
use crate::tolerance::EPS_PROB;

/// Borrowed view of a composite state, pure or mixed.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityOperator),
}

impl<'a> From<&'a StateVector> for StateRef<'a> {
    fn from(state: &'a StateVector) -> Self {
        StateRef::Pure(state)
    }
}

impl<'a> From<&'a DensityOperator> for StateRef<'a> {
    fn from(state: &'a DensityOperator) -> Self {
        StateRef::Mixed(state)
    }
}

impl StateRef<'_> {
    pub fn structure(&self) -> &HilbertStructure {
        match self {
            StateRef::Pure(psi) => psi.structure(),
            StateRef::Mixed(rho) => rho.structure(),
        }
    }

    pub fn to_density(&self) -> DensityOperator {
        match self {
            StateRef::Pure(psi) => psi.to_density(),
            StateRef::Mixed(rho) => (*rho).clone(),
        }
    }
}

/// Probability of an event together with the state it leaves behind.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseOutcome<S> {
    pub probability: f64,
    pub post_state: S,
}

/// `⟨Ψ|Q|Ψ⟩` or `tr(ρQ)`, with `Q` the event embedded in the full space.
pub fn event_probability<'a>(
    state: impl Into<StateRef<'a>>,
    event: &SubsystemEvent,
) -> Result<f64> {
    let state = state.into();
    let q = embed(event, state.structure())?;
    let p = match state {
        StateRef::Pure(psi) => psi.amplitudes().dotc(&(&q * psi.amplitudes())).re,
        StateRef::Mixed(rho) => (rho.matrix() * &q).trace().re,
    };
    Ok(clamp_probability(p))
}

fn clamp_probability(p: f64) -> f64 {
    if (-EPS_PROB..0.0).contains(&p) {
        0.0
    } else if p > 1.0 && p <= 1.0 + EPS_PROB {
        1.0
    } else {
        p
    }
}

/// `Ψ → QΨ / ⟨Ψ|Q|Ψ⟩^{1/2}`.
pub fn collapse_pure(
    psi: &StateVector,
    event: &SubsystemEvent,
) -> Result<CollapseOutcome<StateVector>> {
    let q = embed(event, psi.structure())?;
    let projected = &q * psi.amplitudes();
    let probability = clamp_probability(psi.amplitudes().dotc(&projected).re);
    if probability <= EPS_PROB {
        return Err(Error::ZeroProbabilityEvent { probability });
    }
    let post_state = StateVector::new(
        psi.structure().clone(),
        projected.unscale(probability.sqrt()),
    )?;
    Ok(CollapseOutcome {
        probability,
        post_state,
    })
}

/// `ρ → QρQ / tr(QρQ)`.
///
/// The sandwich `QρQ` is formed explicitly; the cheaper `tr(ρQ)` shortcut is
/// left to the relative-state side so that the two stay independent.
pub fn collapse_mixed(
    rho: &DensityOperator,
    event: &SubsystemEvent,
) -> Result<CollapseOutcome<DensityOperator>> {
    let q = embed(event, rho.structure())?;
    let probability = clamp_probability((rho.matrix() * &q).trace().re);
    if probability <= EPS_PROB {
        return Err(Error::ZeroProbabilityEvent { probability });
    }
    let sandwich = &q * rho.matrix() * &q;
    let norm = sandwich.trace().re;
    let post_state = DensityOperator::new(
        rho.structure().clone(),
        sandwich / Complex64::new(norm, 0.0),
    )?;
    Ok(CollapseOutcome {
        probability,
        post_state,
    })
}

/// State of `object` after the event has collapsed the composite state.
pub fn collapsed_object_state<'a>(
    state: impl Into<StateRef<'a>>,
    event: &SubsystemEvent,
    object: usize,
) -> Result<DensityOperator> {
    let state = state.into();
    state.structure().check_subsystem(object)?;
    if object == event.subsystem() {
        return Err(Error::SubjectObjectOverlap(object));
    }
    let collapsed = match state {
        StateRef::Pure(psi) => collapse_pure(psi, event)?.post_state.to_density(),
        StateRef::Mixed(rho) => collapse_mixed(rho, event)?.post_state,
    };
    partial_trace(&collapsed, &[object])
}
