//! JSON description of a manifold: either a generating matrix or explicit
//! curves, plus the state domain.

use serde::{Deserialize, Serialize};

use super::{LinearRationalManifold, StateDomain, DEFAULT_X_MAX};
use crate::curvespace::Curve;
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<SquareMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Curve>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<Curve>>,
    pub domain: StateDomain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
}

impl ManifoldSpec {
    pub fn build(&self) -> Result<LinearRationalManifold> {
        let x_max = self.x_max.unwrap_or(DEFAULT_X_MAX);
        match (&self.matrix, &self.c, &self.u) {
            (Some(m), None, None) => {
                LinearRationalManifold::from_matrix_with_x_max(m.clone(), self.domain.clone(), x_max)
            }
            (None, c, Some(u)) => LinearRationalManifold::from_curves_with_x_max(
                c.clone().unwrap_or_else(Curve::zero),
                u.clone(),
                self.domain.clone(),
                x_max,
            ),
            (Some(_), _, _) => Err(Error::invalid("give either \"matrix\" or \"c\"/\"u\", not both")),
            (None, _, None) => Err(Error::invalid("manifold needs \"matrix\" or \"u\"")),
        }
    }

    pub(crate) fn from_manifold(m: &LinearRationalManifold) -> Self {
        let x_max = (m.x_max() != DEFAULT_X_MAX).then_some(m.x_max());
        match m.matrix() {
            Some(mat) => ManifoldSpec {
                matrix: Some(mat.clone()),
                c: None,
                u: None,
                domain: m.domain().clone(),
                x_max,
            },
            None => ManifoldSpec {
                matrix: None,
                c: Some(m.c().clone()),
                u: Some(m.u().to_vec()),
                domain: m.domain().clone(),
                x_max,
            },
        }
    }
}

impl std::str::FromStr for ManifoldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::invalid(format!("manifold JSON: {e}")))
    }
}
