//! Relative states: the object-subsystem state conditioned on a subject
//! event, computed without collapsing the composite state.
//!
//! For a composite state `ρ` and subject event `Q` the relative state of the
//! object is `tr_rest(ρQ) / tr(ρQ)`. For more than two subsystems it can be
//! evaluated by tracing everything but the object at once
//! ([`relative_state_direct`]) or by first reducing to the object-subject
//! pair ([`relative_state_via_pair`]). Both paths are kept separate so their
//! agreement stays checkable.

use num_complex::Complex64;

use crate::collapse::{collapse_pure, event_probability, StateRef};
use crate::error::{Error, Result};
use crate::tensor::{
    embed, max_abs_deviation, partial_scalar_product, partial_trace, partial_trace_matrix, CMatrix,
    DensityOperator, HilbertStructure, StateVector, SubsystemEvent,
};
use crate::tolerance::{EPS_CMP, EPS_PROB};

/// The subject subsystem together with the subject event on it.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectEntity(SubsystemEvent);

impl SubjectEntity {
    pub fn new(event: SubsystemEvent) -> Self {
        SubjectEntity(event)
    }

    pub fn event(&self) -> &SubsystemEvent {
        &self.0
    }

    pub fn subsystem(&self) -> usize {
        self.0.subsystem()
    }
}

impl From<SubsystemEvent> for SubjectEntity {
    fn from(event: SubsystemEvent) -> Self {
        SubjectEntity(event)
    }
}

fn check_roles(structure: &HilbertStructure, subject: &SubjectEntity, object: usize) -> Result<()> {
    structure.check_subsystem(object)?;
    subject.event().check_against(structure)?;
    if object == subject.subsystem() {
        return Err(Error::SubjectObjectOverlap(object));
    }
    Ok(())
}

/// `tr_keep(ρQ) / tr(ρQ)` for an operator `ρ` on `structure`.
fn conditioned_reduction(
    rho: &CMatrix,
    structure: &HilbertStructure,
    event: &SubsystemEvent,
    object: usize,
) -> Result<DensityOperator> {
    let q = embed(event, structure)?;
    let weighted = rho * &q;
    let probability = weighted.trace().re;
    if probability <= EPS_PROB {
        return Err(Error::ZeroProbabilityEvent {
            probability: probability.max(0.0),
        });
    }
    let (reduced_structure, reduced) = partial_trace_matrix(&weighted, structure, &[object])?;
    DensityOperator::new(
        reduced_structure,
        reduced / Complex64::new(probability, 0.0),
    )
}

/// Relative state of `object` with respect to the subject entity.
pub fn relative_state<'a>(
    state: impl Into<StateRef<'a>>,
    subject: &SubjectEntity,
    object: usize,
) -> Result<DensityOperator> {
    relative_state_direct(state, subject, object)
}

/// Traces out every subsystem except the object in one step.
pub fn relative_state_direct<'a>(
    state: impl Into<StateRef<'a>>,
    subject: &SubjectEntity,
    object: usize,
) -> Result<DensityOperator> {
    let state = state.into();
    let structure = state.structure();
    check_roles(structure, subject, object)?;
    let rho = state.to_density();
    conditioned_reduction(rho.matrix(), structure, subject.event(), object)
}

/// Reduces to the `{object, subject}` pair first, then conditions on the
/// subject event within the pair.
pub fn relative_state_via_pair<'a>(
    state: impl Into<StateRef<'a>>,
    subject: &SubjectEntity,
    object: usize,
) -> Result<DensityOperator> {
    let state = state.into();
    let structure = state.structure();
    check_roles(structure, subject, object)?;
    let rho = state.to_density();
    let pair = if structure.len() == 2 {
        rho
    } else {
        partial_trace(&rho, &[object, subject.subsystem()])?
    };
    // the pair keeps the original relative order
    let (object_pos, subject_pos) = if object < subject.subsystem() {
        (0, 1)
    } else {
        (1, 0)
    };
    conditioned_reduction(
        pair.matrix(),
        pair.structure(),
        &subject.event().relabel(subject_pos),
        object_pos,
    )
}

/// Everett's relative ket: `⟨φ|Ψ⟩` normalized, where the bra acts on the
/// subject subsystem. The result lives on the remaining subsystems.
pub fn everett_relative_ket(
    psi: &StateVector,
    phi: &StateVector,
    subject: usize,
) -> Result<StateVector> {
    let contracted = partial_scalar_product(&phi.to_raw(), &psi.to_raw(), subject)?;
    let weight = contracted.amplitudes().norm_squared();
    if weight <= EPS_PROB {
        return Err(Error::ZeroProbabilityEvent {
            probability: weight,
        });
    }
    contracted.normalize()
}

/// One term of a relevant decomposition.
#[derive(Debug, Clone, PartialEq)]
pub enum Branch {
    /// An event with positive probability.
    Occurring {
        weight: f64,
        /// Normalized `QΨ`.
        component: StateVector,
        /// Relative state of the object with respect to the event.
        object_state: DensityOperator,
    },
    /// An event whose probability is at most `EPS_PROB`; it cannot occur.
    Degenerate { probability: f64 },
}

impl Branch {
    pub fn weight(&self) -> f64 {
        match self {
            Branch::Occurring { weight, .. } => *weight,
            Branch::Degenerate { .. } => 0.0,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, Branch::Degenerate { .. })
    }
}

/// Decomposition of a composite state along a partition of identity on one
/// subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevantDecomposition {
    pub events: Vec<SubsystemEvent>,
    pub branches: Vec<Branch>,
    pub object: usize,
}

impl RelevantDecomposition {
    pub fn weights(&self) -> Vec<f64> {
        self.branches.iter().map(Branch::weight).collect()
    }

    /// `Σ_k w_k ρ_k` over the occurring branches.
    pub fn reconstruct_object_state(&self) -> Option<CMatrix> {
        let mut sum: Option<CMatrix> = None;
        for branch in &self.branches {
            if let Branch::Occurring {
                weight,
                object_state,
                ..
            } = branch
            {
                let term = object_state.matrix() * Complex64::new(*weight, 0.0);
                sum = Some(match sum {
                    Some(acc) => acc + term,
                    None => term,
                });
            }
        }
        sum
    }
}

/// Checks that `events` are projectors on one subsystem that are mutually
/// orthogonal and sum to the identity.
pub fn validate_partition(
    events: &[SubsystemEvent],
    structure: &HilbertStructure,
) -> Result<usize> {
    let first = events
        .first()
        .ok_or_else(|| Error::NotAPartition("no events given".into()))?;
    let subsystem = first.subsystem();
    if events.iter().any(|e| e.subsystem() != subsystem) {
        return Err(Error::NotAPartition(
            "events act on different subsystems".into(),
        ));
    }
    for event in events {
        event.check_against(structure)?;
        event
            .validate()
            .map_err(|e| Error::NotAPartition(format!("member is not a projector: {e}")))?;
    }
    let d = first.dim();
    let sum = events
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, e| acc + e.projector());
    let deviation = max_abs_deviation(&sum, &CMatrix::identity(d, d));
    if deviation > EPS_CMP {
        return Err(Error::NotAPartition(format!(
            "projectors sum to identity only within {deviation:e}"
        )));
    }
    for (i, a) in events.iter().enumerate() {
        for b in &events[i + 1..] {
            let overlap = (a.projector() * b.projector()).camax();
            if overlap > EPS_CMP {
                return Err(Error::NotAPartition(format!(
                    "members overlap (max |Q_i Q_j| = {overlap:e})"
                )));
            }
        }
    }
    Ok(subsystem)
}

/// Splits `Ψ = Σ_k Q_k Ψ` along a partition of identity and reports each
/// branch's weight, normalized component and object relative state.
pub fn relevant_decomposition(
    psi: &StateVector,
    events: &[SubsystemEvent],
    object: usize,
) -> Result<RelevantDecomposition> {
    let subsystem = validate_partition(events, psi.structure())?;
    psi.structure().check_subsystem(object)?;
    if object == subsystem {
        return Err(Error::SubjectObjectOverlap(object));
    }
    let branches = events
        .iter()
        .map(|event| {
            let probability = event_probability(psi, event)?;
            if probability <= EPS_PROB {
                return Ok(Branch::Degenerate { probability });
            }
            let outcome = collapse_pure(psi, event)?;
            let object_state = relative_state(psi, &SubjectEntity::new(event.clone()), object)?;
            Ok(Branch::Occurring {
                weight: outcome.probability,
                component: outcome.post_state,
                object_state,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RelevantDecomposition {
        events: events.to_vec(),
        branches,
        object,
    })
}
