use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::ParamError;
use crate::quadrature::QuadError;

/// Pipeline stage a failure belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Params,
    FirstOrder,
    IntensityCorrection,
    CrossTerm,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Params => "parameters",
            Stage::FirstOrder => "first-order term",
            Stage::IntensityCorrection => "mean-intensity correction",
            Stage::CrossTerm => "cross term",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScintError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("{stage}: {source}")]
    Quadrature {
        stage: Stage,
        #[source]
        source: QuadError,
    },
    #[error("{stage}: consistency check failed: {detail}")]
    Consistency { stage: Stage, detail: String },
    #[error("{stage}: {detail}")]
    InvalidInput { stage: Stage, detail: String },
}

impl ScintError {
    pub fn stage(&self) -> Stage {
        match self {
            ScintError::Params(_) => Stage::Params,
            ScintError::Quadrature { stage, .. }
            | ScintError::Consistency { stage, .. }
            | ScintError::InvalidInput { stage, .. } => *stage,
        }
    }

    pub(crate) fn quad(stage: Stage) -> impl Fn(QuadError) -> ScintError {
        move |source| ScintError::Quadrature { stage, source }
    }
}
