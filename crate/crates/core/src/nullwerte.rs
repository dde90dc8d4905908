//! Jacobian nullwerte `D(n1, n2, n3)` and the theta-constant identities the
//! construction leans on: Jacobi's derivative formula and Riemann's quartic
//! relations.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::characteristic::{is_azygetic, Characteristic};
use crate::theta::{ThetaError, ThetaTable};

pub fn det3(rows: [[Complex64; 3]; 3]) -> Complex64 {
    let [a, b, c] = rows;
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Determinant of the three gradients `grad theta_n(tau, 0)`, rows in order.
pub fn jacobian_d(
    table: &ThetaTable,
    n1: Characteristic,
    n2: Characteristic,
    n3: Characteristic,
) -> Result<Complex64, ThetaError> {
    Ok(det3([
        table.gradient(n1)?,
        table.gradient(n2)?,
        table.gradient(n3)?,
    ]))
}

/// The five even characteristics that complete an azygetic odd triple to a
/// fundamental system. Sorted ascending.
pub fn complete_fundamental(
    n1: Characteristic,
    n2: Characteristic,
    n3: Characteristic,
) -> Result<[Characteristic; 5], ThetaError> {
    if !is_azygetic(n1, n2, n3) || n1 == n2 || n2 == n3 || n1 == n3 {
        return Err(ThetaError::SyzygeticTriple(n1, n2, n3));
    }
    let evens: Vec<Characteristic> = Characteristic::evens().collect();
    let mut chosen = vec![n1, n2, n3];
    let mut found = Vec::new();
    grow(&evens, 0, &mut chosen, &mut found);
    match found.as_slice() {
        [only] => Ok(*only),
        // an azygetic odd triple always has exactly one completion
        _ => unreachable!("{} completions for ({n1}, {n2}, {n3})", found.len()),
    }
}

fn grow(
    evens: &[Characteristic],
    start: usize,
    chosen: &mut Vec<Characteristic>,
    found: &mut Vec<[Characteristic; 5]>,
) {
    if chosen.len() == 8 {
        found.push(chosen[3..].try_into().unwrap());
        return;
    }
    for idx in start..evens.len() {
        let cand = evens[idx];
        let ok = (0..chosen.len())
            .all(|i| (i + 1..chosen.len()).all(|j| is_azygetic(chosen[i], chosen[j], cand)));
        if ok {
            chosen.push(cand);
            grow(evens, idx + 1, chosen, found);
            chosen.pop();
        }
    }
}

/// `pi^3 * prod |theta_m|` over the completing even characteristics.
pub fn jacobi_modulus(
    table: &ThetaTable,
    n1: Characteristic,
    n2: Characteristic,
    n3: Characteristic,
) -> Result<f64, ThetaError> {
    let evens = complete_fundamental(n1, n2, n3)?;
    let mut prod = PI.powi(3);
    for m in evens {
        prod *= table.constant(m)?.norm();
    }
    Ok(prod)
}

/// Relative error of `|D(n1,n2,n3)| = pi^3 * prod |theta_m|`.
pub fn jacobi_residual(
    table: &ThetaTable,
    n1: Characteristic,
    n2: Characteristic,
    n3: Characteristic,
) -> Result<f64, ThetaError> {
    let expected = jacobi_modulus(table, n1, n2, n3)?;
    let d = jacobian_d(table, n1, n2, n3)?.norm();
    Ok((d - expected).abs() / expected)
}

/// Three quadruples of even characteristics, `r1 = r2 + r3` up to signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RiemannRelation {
    pub quads: [[Characteristic; 4]; 3],
}

impl RiemannRelation {
    pub fn from_labels(labels: [[u8; 4]; 3]) -> Self {
        RiemannRelation {
            quads: labels.map(|q| q.map(Characteristic::lab)),
        }
    }

    /// The two relations used to reconcile the two expressions for the
    /// `(4,5)` coefficient.
    pub fn reference() -> [RiemannRelation; 2] {
        [
            RiemannRelation::from_labels([[52, 75, 41, 66], [3, 10, 24, 37], [14, 7, 33, 20]]),
            RiemannRelation::from_labels([[40, 67, 41, 66], [3, 2, 24, 25], [6, 21, 7, 20]]),
        ]
    }

    pub fn label(&self) -> String {
        let q: Vec<String> = self
            .quads
            .iter()
            .map(|q| {
                q.iter()
                    .map(|m| format!("t{}", m.label_string()))
                    .collect::<Vec<_>>()
                    .join("*")
            })
            .collect();
        format!("{} = {} + {}", q[0], q[1], q[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannCheck {
    /// `(s2, s3)` minimizing `|r1 + s2 r2 + s3 r3|`.
    pub signs: (i8, i8),
    pub residual: f64,
    /// `residual / |r1|`.
    pub relative: f64,
}

pub fn riemann_relation_check(
    table: &ThetaTable,
    relation: &RiemannRelation,
) -> Result<RiemannCheck, ThetaError> {
    let mut r = [Complex64::new(1.0, 0.0); 3];
    for (ri, quad) in r.iter_mut().zip(&relation.quads) {
        for &m in quad {
            *ri *= table.constant(m)?;
        }
    }
    let mut best: Option<RiemannCheck> = None;
    for s2 in [1i8, -1] {
        for s3 in [1i8, -1] {
            let residual = (r[0] + r[1] * s2 as f64 + r[2] * s3 as f64).norm();
            if best.is_none_or(|b| residual < b.residual) {
                best = Some(RiemannCheck {
                    signs: (s2, s3),
                    residual,
                    relative: residual / r[0].norm(),
                });
            }
        }
    }
    Ok(best.unwrap())
}

/// `min |theta_m| / max |theta_m|` over even `m`; zero on the locus where an
/// even theta constant vanishes.
pub fn degeneracy_indicator(table: &ThetaTable) -> f64 {
    let (lo, hi) = table
        .constants()
        .values()
        .map(|v| v.norm())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi == 0.0 {
        0.0
    } else {
        lo / hi
    }
}
