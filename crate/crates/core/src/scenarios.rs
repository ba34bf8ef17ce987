//! One-slit preparation and the Mach-Zehnder interferometer, each reported
//! in the collapse and the relative-state description side by side.
//!
//! Time instants are bookkeeping labels on [`TimelineEntry`] values;
//! evolution between them is the identity except at optical elements.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::collapse::{collapsed_object_state, event_probability};
use crate::error::{Error, Result};
use crate::relative::{relevant_decomposition, Branch};
use crate::tensor::{
    apply_subsystem_unitary, max_abs_deviation, partial_trace, CMatrix, CVector, DensityOperator,
    HilbertStructure, StateVector, SubsystemEvent,
};
use crate::tolerance::{EPS_CMP, EPS_NORM, EPS_PROB};

/// An object state assigned at some instant under some narrative.
#[derive(Debug, Clone, PartialEq)]
pub struct TimelineEntry {
    pub instant: &'static str,
    pub narrative: &'static str,
    pub state: DensityOperator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: &'static str,
    pub composite_state: StateVector,
    pub branch_labels: Vec<String>,
    pub branch_weights: Vec<f64>,
    /// `None` for branches whose event cannot occur.
    pub cqm_object_states: Vec<Option<DensityOperator>>,
    pub rsqm_object_states: Vec<Option<DensityOperator>>,
    pub detector_distribution: Vec<(String, f64)>,
    /// Unconditioned reduced state of the object.
    pub object_state: DensityOperator,
    /// Max deviation of `Σ w_k ρ_k` from the unconditioned object state.
    pub reconstruction_deviation: f64,
    /// Max deviation between collapse and relative-state object states.
    pub max_deviation: f64,
    pub tolerance: f64,
    pub equivalence_verdict: bool,
    pub timeline: Vec<TimelineEntry>,
}

impl ScenarioReport {
    /// Re-judges the verdict against another comparison tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.equivalence_verdict = self.max_deviation <= tolerance;
        self
    }

    pub fn probability_of(&self, detector: &str) -> Option<f64> {
        self.detector_distribution
            .iter()
            .find(|(label, _)| label == detector)
            .map(|&(_, p)| p)
    }
}

/// Decomposes `composite` along `events` (a partition on one subsystem) and
/// compares both descriptions of `object` branch by branch.
fn analyse(
    scenario: &'static str,
    composite: StateVector,
    events: &[SubsystemEvent],
    labels: &[&str],
    object: usize,
    timeline: Vec<TimelineEntry>,
) -> Result<ScenarioReport> {
    let decomposition = relevant_decomposition(&composite, events, object)?;
    let object_state = partial_trace(&composite.to_density(), &[object])?;

    let mut cqm_object_states = Vec::with_capacity(events.len());
    let mut rsqm_object_states = Vec::with_capacity(events.len());
    let mut max_deviation: f64 = 0.0;
    for (event, branch) in events.iter().zip(&decomposition.branches) {
        match branch {
            Branch::Occurring { object_state, .. } => {
                let collapsed = collapsed_object_state(&composite, event, object)?;
                max_deviation =
                    max_deviation.max(max_abs_deviation(collapsed.matrix(), object_state.matrix()));
                cqm_object_states.push(Some(collapsed));
                rsqm_object_states.push(Some(object_state.clone()));
            }
            Branch::Degenerate { .. } => {
                cqm_object_states.push(None);
                rsqm_object_states.push(None);
            }
        }
    }
    let detector_distribution = labels
        .iter()
        .zip(events)
        .map(|(label, event)| Ok((label.to_string(), event_probability(&composite, event)?)))
        .collect::<Result<Vec<_>>>()?;
    let reconstruction_deviation = decomposition
        .reconstruct_object_state()
        .map(|m| max_abs_deviation(&m, object_state.matrix()))
        .unwrap_or(f64::INFINITY);

    Ok(ScenarioReport {
        scenario,
        composite_state: composite,
        branch_labels: labels.iter().map(ToString::to_string).collect(),
        branch_weights: decomposition.weights(),
        cqm_object_states,
        rsqm_object_states,
        detector_distribution,
        object_state,
        reconstruction_deviation,
        max_deviation,
        tolerance: EPS_CMP,
        equivalence_verdict: max_deviation <= EPS_CMP,
        timeline,
    })
}

/// Quanton transverse position on `n_cells` cells meeting a screen with a
/// slit. The screen is a two-level occurrence register: `|0⟩` passed the
/// slit, `|1⟩` hit the rest of the screen.
#[derive(Debug, Clone, PartialEq)]
pub struct OneSlitModel {
    amplitudes: Vec<Complex64>,
    slit_cells: BTreeSet<usize>,
}

impl OneSlitModel {
    pub fn new(
        amplitudes: Vec<Complex64>,
        slit_cells: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let n = amplitudes.len();
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 cells, got {n}"
            )));
        }
        let slit_cells: BTreeSet<usize> = slit_cells.into_iter().collect();
        if let Some(&bad) = slit_cells.iter().find(|&&x| x >= n) {
            return Err(Error::InvalidParameter(format!(
                "slit cell {bad} outside 0..{n}"
            )));
        }
        if slit_cells.is_empty() {
            return Err(Error::DegenerateSlit("the slit covers no cell".into()));
        }
        if slit_cells.len() == n {
            return Err(Error::DegenerateSlit(
                "the slit covers every cell, so the rest of the screen cannot be hit".into(),
            ));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > EPS_NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amplitudes,
            slit_cells,
        })
    }

    /// Equal amplitudes `1/√n` on every cell.
    pub fn uniform(n_cells: usize, slit_cells: impl IntoIterator<Item = usize>) -> Result<Self> {
        let a = Complex64::new(1.0 / (n_cells.max(1) as f64).sqrt(), 0.0);
        Self::new(vec![a; n_cells], slit_cells)
    }

    pub fn n_cells(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn slit_cells(&self) -> &BTreeSet<usize> {
        &self.slit_cells
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `Σ_{x∈slit} c_x|x⟩|0⟩ + Σ_{x∉slit} c_x|x⟩|1⟩` over (n_cells, 2).
    pub fn composite_state(&self) -> Result<StateVector> {
        let n = self.n_cells();
        let structure = HilbertStructure::new(vec![n, 2])?;
        let mut amps = CVector::zeros(2 * n);
        for (x, &c) in self.amplitudes.iter().enumerate() {
            let screen = if self.slit_cells.contains(&x) { 0 } else { 1 };
            amps[structure.flatten(&[x, screen])] = c;
        }
        StateVector::new(structure, amps)
    }
}

pub fn run_one_slit(model: &OneSlitModel) -> Result<ScenarioReport> {
    let composite = model.composite_state()?;
    let passed = SubsystemEvent::basis(1, 2, 0)?;
    let hit = passed.complement();
    for (event, what) in [
        (&passed, "passing the slit"),
        (&hit, "hitting the rest of the screen"),
    ] {
        let p = event_probability(&composite, event)?;
        if p <= EPS_PROB {
            return Err(Error::DegenerateSlit(format!(
                "{what} has zero probability"
            )));
        }
    }
    let initial = partial_trace(&composite.to_density(), &[0])?;
    let mut report = analyse(
        "one-slit",
        composite,
        &[passed, hit],
        &["slit", "screen"],
        0,
        Vec::new(),
    )?;
    let passed_state = report.rsqm_object_states[0]
        .clone()
        .expect("both branches occur");
    report.timeline = vec![
        TimelineEntry {
            instant: "t_i",
            narrative: "quanton state at the end of the interaction with the screen",
            state: initial.clone(),
        },
        TimelineEntry {
            instant: "(t_i,t_f)",
            narrative:
                "collapse at t_i: the triggering event occurred, only the passed component survives",
            state: passed_state.clone(),
        },
        TimelineEntry {
            instant: "(t_i,t_f)",
            narrative: "collapse at detection: the whole quanton state evolves until t_f",
            state: initial,
        },
        TimelineEntry {
            instant: "(t_i,t_f)",
            narrative: "no collapse: state relative to the triggering event",
            state: passed_state,
        },
    ];
    Ok(report)
}

/// Whether the second beam splitter is in place at detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Device {
    WhichWay,
    Interference,
}

impl Device {
    pub fn name(self) -> &'static str {
        match self {
            Device::WhichWay => "which-way",
            Device::Interference => "interference",
        }
    }
}

/// Beam-splitter conventions:
/// first splitter `|in⟩ → cos θ|u⟩ + sin θ|l⟩`;
/// second splitter `|u⟩ → (|D_H⟩+|D_V⟩)/√2`, `|l⟩ → (|D_H⟩−|D_V⟩)/√2`,
/// so that θ = 45° sends every photon to D_H.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MachZehnderModel {
    /// First beam-splitter angle in degrees, `0 ≤ θ ≤ 180`.
    pub theta_deg: f64,
    /// Device configured before the photon is prepared.
    pub device: Device,
    /// Device chosen after preparation and before detection, if the choice
    /// is delayed.
    pub delayed_choice: Option<Device>,
}

impl MachZehnderModel {
    pub fn new(theta_deg: f64, device: Device) -> Result<Self> {
        let model = Self {
            theta_deg,
            device,
            delayed_choice: None,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_delayed_choice(mut self, device: Device) -> Self {
        self.delayed_choice = Some(device);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=180.0).contains(&self.theta_deg) {
            return Err(Error::InvalidParameter(format!(
                "beam splitter angle {} outside [0, 180] degrees",
                self.theta_deg
            )));
        }
        Ok(())
    }

    pub fn final_device(&self) -> Device {
        self.delayed_choice.unwrap_or(self.device)
    }
}

fn first_beam_splitter(theta_deg: f64) -> CMatrix {
    let (s, c) = theta_deg.to_radians().sin_cos();
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(c, 0.0),
        ],
    )
}

fn second_beam_splitter() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
        ],
    )
}

/// Photon mode `m` (headed to detector `m`) triggers pointer `|D_m⟩`:
/// `Σ c_m |m⟩ → Σ c_m |m⟩|D_m⟩`.
fn detector_interaction(photon: &StateVector) -> Result<StateVector> {
    let structure = HilbertStructure::new(vec![2, 2])?;
    let mut amps = CVector::zeros(4);
    for m in 0..2 {
        amps[structure.flatten(&[m, m])] = photon.amplitudes()[m];
    }
    StateVector::new(structure, amps)
}

pub fn run_mach_zehnder(model: &MachZehnderModel) -> Result<ScenarioReport> {
    model.validate()?;
    let photon_space = HilbertStructure::new(vec![2])?;
    let incoming = StateVector::basis(photon_space, &[0])?;
    let prepared = apply_subsystem_unitary(&incoming, &first_beam_splitter(model.theta_deg), 0)?;

    let mut timeline = vec![TimelineEntry {
        instant: "t_i",
        narrative: "photon leaves the first beam splitter",
        state: prepared.to_density(),
    }];
    if model.delayed_choice.is_some() {
        timeline.push(TimelineEntry {
            instant: "t_bar",
            narrative: "device reconfigured; the photon state is untouched",
            state: prepared.to_density(),
        });
    }

    let at_detectors = match model.final_device() {
        Device::WhichWay => prepared,
        Device::Interference => apply_subsystem_unitary(&prepared, &second_beam_splitter(), 0)?,
    };
    let composite = detector_interaction(&at_detectors)?;
    timeline.push(TimelineEntry {
        instant: "t",
        narrative: "photon reaches the detectors (not yet absorbed)",
        state: partial_trace(&composite.to_density(), &[0])?,
    });

    let d_h = SubsystemEvent::basis(1, 2, 0)?;
    let d_v = SubsystemEvent::basis(1, 2, 1)?;
    analyse(
        "mach-zehnder",
        composite,
        &[d_h, d_v],
        &["D_H", "D_V"],
        0,
        timeline,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn projector(i: usize) -> CMatrix {
        let mut m = CMatrix::zeros(2, 2);
        m[(i, i)] = Complex64::new(1.0, 0.0);
        m
    }

    #[test]
    fn uniform_four_cells_half_slit() {
        let report = run_one_slit(&OneSlitModel::uniform(4, [0, 1]).unwrap()).unwrap();
        assert!((report.branch_weights[0] - 0.5).abs() < 1e-12);
        assert!((report.branch_weights[1] - 0.5).abs() < 1e-12);
        // passed component: (|0⟩ + |1⟩)/√2 on the quanton
        let passed = report.rsqm_object_states[0].as_ref().unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                expected[(i, j)] = Complex64::new(0.5, 0.0);
            }
        }
        assert!(max_abs_deviation(passed.matrix(), &expected) < 1e-15);
        assert!((passed.purity() - 1.0).abs() < 1e-14);
        assert!(report.equivalence_verdict);
        assert!(report.reconstruction_deviation < 1e-15);
        assert_eq!(report.timeline.len(), 4);
    }

    #[test]
    fn slit_covering_everything_is_degenerate() {
        assert!(matches!(
            OneSlitModel::uniform(4, [0, 1, 2, 3]),
            Err(Error::DegenerateSlit(_))
        ));
        assert!(matches!(
            OneSlitModel::uniform(4, []),
            Err(Error::DegenerateSlit(_))
        ));
        assert!(matches!(
            OneSlitModel::uniform(4, [7]),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            OneSlitModel::uniform(1, [0]),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn slit_with_no_amplitude_is_degenerate() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let model = OneSlitModel::new(vec![c(0.0), c(0.6), c(0.8)], [0]).unwrap();
        assert!(matches!(
            run_one_slit(&model),
            Err(Error::DegenerateSlit(_))
        ));
    }

    #[test]
    fn interference_at_45_degrees_goes_to_d_h() {
        let report =
            run_mach_zehnder(&MachZehnderModel::new(45.0, Device::Interference).unwrap()).unwrap();
        assert!((report.probability_of("D_H").unwrap() - 1.0).abs() < 1e-15);
        assert!(report.cqm_object_states[1].is_none());
        assert!(report.equivalence_verdict);
    }

    #[test]
    fn which_way_at_45_degrees_splits_evenly() {
        let report =
            run_mach_zehnder(&MachZehnderModel::new(45.0, Device::WhichWay).unwrap()).unwrap();
        assert!((report.probability_of("D_H").unwrap() - 0.5).abs() < 1e-15);
        assert!((report.probability_of("D_V").unwrap() - 0.5).abs() < 1e-15);
        let upper = report.rsqm_object_states[0].as_ref().unwrap();
        let lower = report.rsqm_object_states[1].as_ref().unwrap();
        assert!(max_abs_deviation(upper.matrix(), &projector(0)) < 1e-15);
        assert!(max_abs_deviation(lower.matrix(), &projector(1)) < 1e-15);
        // the unconditioned photon state is the equal mixture of both arms
        assert!(
            max_abs_deviation(
                report.object_state.matrix(),
                &(CMatrix::identity(2, 2) * Complex64::new(0.5, 0.0))
            ) < 1e-15
        );
    }

    #[test]
    fn zero_angle_by_hand() {
        let ww = run_mach_zehnder(&MachZehnderModel::new(0.0, Device::WhichWay).unwrap()).unwrap();
        assert_eq!(ww.probability_of("D_H"), Some(1.0));
        assert_eq!(ww.probability_of("D_V"), Some(0.0));
        let int =
            run_mach_zehnder(&MachZehnderModel::new(0.0, Device::Interference).unwrap()).unwrap();
        assert!((int.probability_of("D_H").unwrap() - 0.5).abs() < 1e-15);
        assert!((int.probability_of("D_V").unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn angle_out_of_range() {
        assert!(matches!(
            MachZehnderModel::new(181.0, Device::WhichWay),
            Err(Error::InvalidParameter(_))
        ));
        assert!(MachZehnderModel::new(f64::NAN, Device::WhichWay).is_err());
    }

    #[test]
    fn delayed_choice_uses_final_device() {
        let delayed = MachZehnderModel::new(30.0, Device::WhichWay)
            .unwrap()
            .with_delayed_choice(Device::Interference);
        let direct = MachZehnderModel::new(30.0, Device::Interference).unwrap();
        let a = run_mach_zehnder(&delayed).unwrap();
        let b = run_mach_zehnder(&direct).unwrap();
        assert_eq!(a.detector_distribution, b.detector_distribution);
        assert_eq!(a.timeline.len(), 3);
    }
}
