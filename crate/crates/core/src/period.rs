//! Period matrices in the Siegel upper half-space of degree 3, and the JSON
//! file form `{"tau": [[[re, im] x3] x3]}`.

use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest entry mismatch the loader will silently symmetrize.
pub const SYMMETRIZE_TOLERANCE: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PeriodError {
    #[error("entry ({0},{1}) is not finite")]
    NonFinite(usize, usize),
    #[error("tau is not symmetric at ({i},{j}): difference {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },
    #[error("imaginary part is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("malformed tau file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMatrix {
    tau: [[Complex64; 3]; 3],
    min_imag_eigenvalue: f64,
}

impl PeriodMatrix {
    /// Requires exact symmetry and a positive definite imaginary part.
    pub fn new(tau: [[Complex64; 3]; 3]) -> Result<Self, PeriodError> {
        for i in 0..3 {
            for j in 0..3 {
                if !(tau[i][j].re.is_finite() && tau[i][j].im.is_finite()) {
                    return Err(PeriodError::NonFinite(i, j));
                }
            }
        }
        for i in 0..3 {
            for j in i + 1..3 {
                if tau[i][j] != tau[j][i] {
                    return Err(PeriodError::NotSymmetric {
                        i,
                        j,
                        diff: (tau[i][j] - tau[j][i]).norm(),
                    });
                }
            }
        }
        let lambda = min_eigenvalue(&imag_part(&tau));
        if !(lambda > 0.0) {
            return Err(PeriodError::NotPositiveDefinite(lambda));
        }
        Ok(PeriodMatrix {
            tau,
            min_imag_eigenvalue: lambda,
        })
    }

    /// `i * I_3`.
    pub fn identity_imaginary() -> Self {
        let mut tau = [[Complex64::new(0.0, 0.0); 3]; 3];
        for (k, row) in tau.iter_mut().enumerate() {
            row[k] = Complex64::new(0.0, 1.0);
        }
        PeriodMatrix::new(tau).unwrap()
    }

    pub fn tau(&self) -> &[[Complex64; 3]; 3] {
        &self.tau
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.tau[i][j]
    }

    /// Smallest eigenvalue of `Im tau`.
    pub fn min_imag_eigenvalue(&self) -> f64 {
        self.min_imag_eigenvalue
    }

    pub fn imag_part(&self) -> Matrix3<f64> {
        imag_part(&self.tau)
    }

    /// `-conj(tau)`, which is again a period matrix.
    pub fn negated_conjugate(&self) -> PeriodMatrix {
        let mut tau = self.tau;
        for row in tau.iter_mut() {
            for v in row.iter_mut() {
                *v = -v.conj();
            }
        }
        PeriodMatrix::new(tau).unwrap()
    }

    /// Returns a copy with `Im tau` multiplied by `factor > 0`.
    pub fn with_scaled_imaginary(&self, factor: f64) -> Result<PeriodMatrix, PeriodError> {
        let mut tau = self.tau;
        for row in tau.iter_mut() {
            for v in row.iter_mut() {
                v.im *= factor;
            }
        }
        PeriodMatrix::new(tau)
    }

    /// Parses the JSON file form. Entries that differ from their transpose by
    /// at most [`SYMMETRIZE_TOLERANCE`] are averaged; larger mismatches are
    /// rejected.
    pub fn from_json(text: &str) -> Result<Self, PeriodError> {
        let file: TauFile =
            serde_json::from_str(text).map_err(|e| PeriodError::Format(e.to_string()))?;
        if file.tau.len() != 3 || file.tau.iter().any(|r| r.len() != 3) {
            return Err(PeriodError::Format("tau must be a 3x3 array".into()));
        }
        let mut tau = [[Complex64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let [re, im] = file.tau[i][j];
                tau[i][j] = Complex64::new(re, im);
            }
        }
        for i in 0..3 {
            for j in i + 1..3 {
                let diff = (tau[i][j] - tau[j][i]).norm();
                if diff == 0.0 {
                    continue;
                }
                if diff <= SYMMETRIZE_TOLERANCE {
                    let avg = (tau[i][j] + tau[j][i]) * 0.5;
                    tau[i][j] = avg;
                    tau[j][i] = avg;
                } else if diff.is_finite() {
                    return Err(PeriodError::NotSymmetric { i, j, diff });
                }
            }
        }
        PeriodMatrix::new(tau)
    }

    pub fn to_json(&self) -> String {
        let file = TauFile {
            tau: self
                .tau
                .iter()
                .map(|r| r.iter().map(|v| [v.re, v.im]).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("tau serializes")
    }

    /// `tau` as nested `[re, im]` pairs, the layout used in reports.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        self.tau
            .iter()
            .map(|r| r.iter().map(|v| [v.re, v.im]).collect())
            .collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TauFile {
    tau: Vec<Vec<[f64; 2]>>,
}

fn imag_part(tau: &[[Complex64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| 0.5 * (tau[i][j].im + tau[j][i].im))
}

fn min_eigenvalue(m: &Matrix3<f64>) -> f64 {
    SymmetricEigen::new(*m).eigenvalues.min()
}
