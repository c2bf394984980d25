//! Subcommand implementations. Each command has a `*_data` function
//! returning structured results (reused by the acceptance suite) and an
//! `execute` wrapper that writes the CSV and its manifest.

pub mod bench;
pub mod compare;
pub mod evolve;
pub mod metts;
pub mod traj;

use lindblad_core::{
    basis_product_state, ensemble_density, neel_pattern, thermal_state, DensityMatrix,
    LindbladModel, PureState, Spin,
};

use crate::config::{InitialStateConfig, SystemConfig};
use crate::CliError;

/// Initial pure state for trajectory-style commands; `Thermal` has no
/// single pure state and is handled by the sampler instead.
pub(crate) fn initial_pure_state(
    system: &SystemConfig,
    initial: &InitialStateConfig,
) -> Result<PureState, CliError> {
    match (system, initial) {
        (SystemConfig::TwoLevel { .. }, InitialStateConfig::Excited) => {
            Ok(PureState::basis_state(2, 1))
        }
        (SystemConfig::Heisenberg { length, .. }, InitialStateConfig::Neel) => {
            Ok(basis_product_state(&neel_pattern(*length)))
        }
        (_, InitialStateConfig::Pattern(pattern)) => {
            let expected = system.sites().unwrap_or(1);
            if pattern.len() != expected {
                return Err(CliError::Config(format!(
                    "pattern length {} does not match the system ({expected} sites)",
                    pattern.len()
                )));
            }
            let spins: Vec<Spin> = pattern.iter().map(|&s| s.into()).collect();
            Ok(basis_product_state(&spins))
        }
        (SystemConfig::Heisenberg { .. }, InitialStateConfig::Excited) => Err(CliError::Config(
            "initial_state \"excited\" is only defined for the two-level system".into(),
        )),
        (SystemConfig::TwoLevel { .. }, InitialStateConfig::Neel) => Err(CliError::Config(
            "initial_state \"neel\" is only defined for the spin chain".into(),
        )),
        (_, InitialStateConfig::Thermal { .. }) => Err(CliError::Config(
            "thermal initial states are sampled, not a single pure state".into(),
        )),
    }
}

/// Initial density matrix for deterministic evolutions.
pub(crate) fn initial_density(
    system: &SystemConfig,
    initial: &InitialStateConfig,
    model: &LindbladModel,
) -> Result<DensityMatrix, CliError> {
    match initial {
        InitialStateConfig::Thermal { beta } => {
            thermal_state(model.hamiltonian(), *beta).map_err(CliError::from)
        }
        _ => {
            let psi = initial_pure_state(system, initial)?;
            ensemble_density(std::slice::from_ref(&psi)).map_err(CliError::from)
        }
    }
}

/// Default CSV element subset: the full diagonal.
pub(crate) fn resolve_elements(
    elements: &Option<Vec<(usize, usize)>>,
    dim: usize,
) -> Result<Vec<(usize, usize)>, CliError> {
    match elements {
        None => Ok((0..dim).map(|i| (i, i)).collect()),
        Some(list) => {
            for &(i, j) in list {
                if i >= dim || j >= dim {
                    return Err(CliError::Config(format!(
                        "element ({i}, {j}) out of range for dimension {dim}"
                    )));
                }
            }
            Ok(list.clone())
        }
    }
}
