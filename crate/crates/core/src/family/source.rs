//! Source (usual) parameterizations and their JSON encoding.
//!
//! ```json
//! {"family": "categorical", "params": {"probs": [0.5, 0.3, 0.2]}}
//! {"family": "bernoulli",   "params": {"p": 0.25}}
//! {"family": "gaussian",    "params": {"mean": [0.0], "cov": [[1.0]]}}
//! {"family": "laplace",     "params": {"scale": 2.0}}
//! {"family": "wishart",     "params": {"dof": 3.0, "scale": [[1.0]]}}
//! ```
//!
//! A distribution may also be given directly by natural coordinates:
//! `{"family": "bernoulli", "natural": [0.5]}`.

use super::{Family, NaturalParameter};
use crate::error::{Error, Result};
use crate::linalg::{is_symmetric, pack_lower, packed_len, unpack_lower, Matrix, SpdFactor, Vector};
use serde::{Deserialize, Serialize};

/// Tolerance on Σp = 1 for categorical inputs.
pub const SIMPLEX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "lowercase")]
pub enum SourceParameter {
    Categorical {
        probs: Vec<f64>,
    },
    Bernoulli {
        p: f64,
    },
    Gaussian {
        mean: Vec<f64>,
        #[serde(with = "rows")]
        cov: Matrix,
    },
    Laplace {
        scale: f64,
    },
    Wishart {
        dof: f64,
        #[serde(with = "rows")]
        scale: Matrix,
    },
}

impl SourceParameter {
    pub fn family(&self) -> Family {
        match self {
            SourceParameter::Categorical { probs } => Family::Categorical {
                m: probs.len().saturating_sub(1),
            },
            SourceParameter::Bernoulli { .. } => Family::Bernoulli,
            SourceParameter::Gaussian { mean, .. } => Family::Gaussian { d: mean.len() },
            SourceParameter::Laplace { .. } => Family::Laplace,
            SourceParameter::Wishart { scale, .. } => Family::Wishart { d: scale.nrows() },
        }
    }

    /// Shorthand for a univariate normal N(μ, σ²).
    pub fn normal(mean: f64, variance: f64) -> Self {
        SourceParameter::Gaussian {
            mean: vec![mean],
            cov: Matrix::from_element(1, 1, variance),
        }
    }

    pub fn to_natural(&self) -> Result<NaturalParameter> {
        let fam = self.family();
        let invalid = |detail: String| Error::InvalidSource {
            family: fam.name(),
            detail,
        };
        let coords = match self {
            SourceParameter::Categorical { probs } => {
                if probs.len() < 2 {
                    return Err(invalid("need at least two outcomes".into()));
                }
                check_simplex(probs).map_err(invalid)?;
                probs[1..].iter().map(|p| (p / probs[0]).ln()).collect()
            }
            SourceParameter::Bernoulli { p } => {
                if !(*p > 0.0 && *p < 1.0) {
                    return Err(invalid(format!("p = {p} must lie in (0, 1)")));
                }
                vec![(p / (1.0 - p)).ln()]
            }
            SourceParameter::Gaussian { mean, cov } => {
                let d = mean.len();
                if d == 0 || cov.nrows() != d || cov.ncols() != d {
                    return Err(invalid(format!(
                        "mean of length {d} and covariance {}×{} disagree",
                        cov.nrows(),
                        cov.ncols()
                    )));
                }
                if !is_symmetric(cov, 1e-12) {
                    return Err(invalid("covariance is not symmetric".into()));
                }
                let f = SpdFactor::new(cov).map_err(|e| invalid(format!("covariance is {e}")))?;
                let precision = f.inverse();
                let v = &precision * Vector::from_column_slice(mean);
                let mut c: Vec<f64> = v.iter().copied().collect();
                c.extend(pack_lower(&(precision * -0.5)));
                c
            }
            SourceParameter::Laplace { scale } => {
                if !(*scale > 0.0) || !scale.is_finite() {
                    return Err(invalid(format!("scale σ = {scale} must be positive")));
                }
                vec![-1.0 / scale]
            }
            SourceParameter::Wishart { dof, scale } => {
                let d = scale.nrows();
                if d == 0 || scale.ncols() != d {
                    return Err(invalid("scale matrix must be square".into()));
                }
                if !(*dof > d as f64 - 1.0) {
                    return Err(invalid(format!("degrees of freedom n = {dof} must exceed d − 1 = {}", d - 1)));
                }
                if !is_symmetric(scale, 1e-12) {
                    return Err(invalid("scale matrix is not symmetric".into()));
                }
                let f = SpdFactor::new(scale).map_err(|e| invalid(format!("scale matrix is {e}")))?;
                let mut c = pack_lower(&(f.inverse() * -0.5));
                c.push((dof - d as f64 - 1.0) / 2.0);
                c
            }
        };
        fam.parameter(coords)
    }

    pub fn from_natural(theta: &NaturalParameter) -> Result<Self> {
        let c = theta.coords();
        Ok(match theta.family() {
            Family::Categorical { .. } => {
                let f = theta.log_normalizer()?;
                let mut probs = vec![(-f).exp()];
                probs.extend(c.iter().map(|t| (t - f).exp()));
                SourceParameter::Categorical { probs }
            }
            Family::Bernoulli => SourceParameter::Bernoulli {
                p: 1.0 / (1.0 + (-c[0]).exp()),
            },
            Family::Laplace => SourceParameter::Laplace { scale: -1.0 / c[0] },
            Family::Gaussian { d } => {
                let precision = unpack_lower(&c[d..], d) * -2.0;
                let f = SpdFactor::new(&precision).map_err(|e| Error::OutOfDomain {
                    family: "gaussian",
                    detail: e,
                })?;
                let mean = f.solve(&Vector::from_column_slice(&c[..d]));
                SourceParameter::Gaussian {
                    mean: mean.iter().copied().collect(),
                    cov: f.inverse(),
                }
            }
            Family::Wishart { d } => {
                let k = packed_len(d);
                let neg = unpack_lower(&c[..k], d) * -2.0;
                let f = SpdFactor::new(&neg).map_err(|e| Error::OutOfDomain {
                    family: "wishart",
                    detail: e,
                })?;
                SourceParameter::Wishart {
                    dof: 2.0 * c[k] + d as f64 + 1.0,
                    scale: f.inverse(),
                }
            }
        })
    }
}

fn check_simplex(p: &[f64]) -> std::result::Result<(), String> {
    if let Some(i) = p.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(format!(
            "probability p[{i}] = {} must be strictly positive (boundary of the simplex)",
            p[i]
        ));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > SIMPLEX_TOL {
        return Err(format!("probabilities sum to {s}, not 1"));
    }
    Ok(())
}

/// A distribution as read from JSON: source parameters or raw natural coordinates.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DistributionJson {
    Natural { family: String, natural: Vec<f64> },
    Source(SourceParameter),
}

impl DistributionJson {
    pub fn to_natural(&self) -> Result<NaturalParameter> {
        match self {
            DistributionJson::Source(s) => s.to_natural(),
            DistributionJson::Natural { family, natural } => {
                Family::from_name_and_dim(family, natural.len())?.parameter(natural.clone())
            }
        }
    }
}

/// Serializes a matrix as a list of rows.
mod rows {
    use crate::linalg::Matrix;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(D::Error::custom("matrix must be square"));
        }
        Ok(Matrix::from_row_iterator(n, n, rows.into_iter().flatten()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn categorical_reference() {
        let s = SourceParameter::Categorical {
            probs: vec![0.5, 1.0 / 3.0, 1.0 / 6.0],
        };
        let t = s.to_natural().unwrap();
        assert!((t.coords()[0] - (2.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!((t.coords()[1] - (1.0f64 / 3.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn simple_conversions() {
        let g = SourceParameter::normal(0.0, 1.0).to_natural().unwrap();
        assert_eq!(g.coords(), &[0.0, -0.5]);
        let l = SourceParameter::Laplace { scale: 2.0 }.to_natural().unwrap();
        assert_eq!(l.coords(), &[-0.5]);
        let w = SourceParameter::Wishart {
            dof: 3.0,
            scale: Matrix::from_element(1, 1, 1.0),
        }
        .to_natural()
        .unwrap();
        assert_eq!(w.coords(), &[-0.5, 0.5]);
    }

    #[test]
    fn boundary_sources_rejected() {
        let zero = SourceParameter::Categorical {
            probs: vec![0.0, 0.5, 0.5],
        };
        let e = zero.to_natural().unwrap_err();
        assert!(e.to_string().contains("strictly positive"));
        let unnormalized = SourceParameter::Categorical {
            probs: vec![0.5, 0.5, 0.5],
        };
        assert!(unnormalized.to_natural().is_err());
        let singular = SourceParameter::Gaussian {
            mean: vec![0.0, 0.0],
            cov: Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]),
        };
        assert!(singular.to_natural().is_err());
        assert!(SourceParameter::Bernoulli { p: 1.0 }.to_natural().is_err());
        assert!(SourceParameter::Wishart {
            dof: 0.5,
            scale: Matrix::identity(2, 2)
        }
        .to_natural()
        .is_err());
    }

    #[test]
    fn json_forms() {
        let g: DistributionJson =
            serde_json::from_str(r#"{"family":"gaussian","params":{"mean":[1.0],"cov":[[4.0]]}}"#)
                .unwrap();
        let t = g.to_natural().unwrap();
        assert_eq!(t.coords(), &[0.25, -0.125]);
        let n: DistributionJson =
            serde_json::from_str(r#"{"family":"bernoulli","natural":[0.5]}"#).unwrap();
        assert_eq!(n.to_natural().unwrap().coords(), &[0.5]);
        let s = serde_json::to_string(&SourceParameter::Wishart {
            dof: 4.0,
            scale: Matrix::identity(2, 2),
        })
        .unwrap();
        assert_eq!(
            s,
            r#"{"family":"wishart","params":{"dof":4.0,"scale":[[1.0,0.0],[0.0,1.0]]}}"#
        );
    }
}
