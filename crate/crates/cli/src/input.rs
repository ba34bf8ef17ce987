use std::fs;
use std::path::Path;

use qstate_core::io::{parse_state_file, StateRecord};
use qstate_core::{
    Complex64, DensityOperator, Error, HilbertStructure, StateVector, SubsystemEvent,
};

use crate::Failure;

/// A composite state loaded from a state file.
pub enum LoadedState {
    Pure(StateVector),
    Mixed(DensityOperator),
}

impl LoadedState {
    pub fn structure(&self) -> &HilbertStructure {
        match self {
            LoadedState::Pure(psi) => psi.structure(),
            LoadedState::Mixed(rho) => rho.structure(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn in_file(path: &Path, error: Error) -> Failure {
    Failure::Usage(format!("{}: {error}", path.display()))
}

pub fn load_state(path: &Path) -> Result<LoadedState, Failure> {
    let record = parse_state_file(&read(path)?).map_err(|e| in_file(path, e))?;
    match record {
        StateRecord::Amplitudes(raw) => {
            StateVector::new(raw.structure().clone(), raw.amplitudes().clone())
                .map(LoadedState::Pure)
                .map_err(|e| in_file(path, e))
        }
        StateRecord::Operator { structure, matrix } => {
            let rho = DensityOperator::new(structure, matrix).map_err(|e| in_file(path, e))?;
            rho.validate().map_err(|e| in_file(path, e))?;
            Ok(LoadedState::Mixed(rho))
        }
    }
}

/// Loads a projector written with `rho` records on a single subsystem.
pub fn load_projector(path: &Path, subsystem: usize) -> Result<SubsystemEvent, Failure> {
    let record = parse_state_file(&read(path)?).map_err(|e| in_file(path, e))?;
    let StateRecord::Operator { structure, matrix } = record else {
        return Err(Failure::Usage(format!(
            "{}: a projector needs 'rho' records",
            path.display()
        )));
    };
    if structure.len() != 1 {
        return Err(Failure::Usage(format!(
            "{}: a projector acts on one subsystem, got dims {structure}",
            path.display()
        )));
    }
    let event = SubsystemEvent::new(subsystem, matrix).map_err(|e| in_file(path, e))?;
    event.validate().map_err(|e| in_file(path, e))?;
    Ok(event)
}

/// Loads one-slit amplitudes from a single-subsystem state file.
pub fn load_amplitudes(path: &Path) -> Result<Vec<Complex64>, Failure> {
    let record = parse_state_file(&read(path)?).map_err(|e| in_file(path, e))?;
    let StateRecord::Amplitudes(raw) = record else {
        return Err(Failure::Usage(format!(
            "{}: expected 'amp' records",
            path.display()
        )));
    };
    if raw.structure().len() != 1 {
        return Err(Failure::Usage(format!(
            "{}: amplitudes must live on a single subsystem, got dims {}",
            path.display(),
            raw.structure()
        )));
    }
    Ok(raw.amplitudes().iter().copied().collect())
}
