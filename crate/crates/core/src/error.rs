use crate::bessel::BesselError;
use crate::distrib::DistribError;
use crate::quad::QuadError;
use crate::roots::RootError;

/// Errors surfaced by the physics-level operations in [`crate::well1d`] and
/// [`crate::well2d`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
    #[error(transparent)]
    Bessel(#[from] BesselError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Distrib(#[from] DistribError),
    #[error("Green's function evaluated at its pole b = m*alpha/hbar^2 = {pole}")]
    AtPole { pole: f64 },
    #[error("test function family disagrees: b* spread {spread:e} exceeds tolerance {tol:e}")]
    FamilyDisagreement { spread: f64, tol: f64, b_values: Vec<f64> },
    #[error("C-spectrum bracket family disagrees: derived-jump spread {derived_spread:e}, paper-jump spread {paper_spread:e}, tolerance {tol:e}")]
    BracketFamilyDisagreement {
        tol: f64,
        derived_spread: f64,
        derived_b: Vec<f64>,
        paper_spread: f64,
        paper_b: Vec<f64>,
    },
    #[error("no admissible solution: {0}")]
    NoSolution(String),
    #[error("test function family is empty or does not sample {0}")]
    InadequateFamily(&'static str),
}
