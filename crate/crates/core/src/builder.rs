//! The scaled bitangent matrix.
//!
//! Starting from the raw gradient forms `b_n(z) = Σ ∂_k θ_n(τ,0) z_k` placed
//! according to a [`CharMatrix`], each row is rescaled so that the four
//! columns of a 5×5 principal block become linearly dependent. Symmetrizing
//! and normalizing the blocks and gluing them along their common 4×4 corner
//! gives an 8×8 symmetric matrix of rank four whose entries are proportional
//! to the 28 bitangents.

use nalgebra::SMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::aronhold::{AronholdSet, CharMatrix};
use crate::characteristic::Characteristic;
use crate::nullwerte::{det3, jacobian_d};
use crate::theta::{ThetaError, ThetaTable};

/// Relative size below which a determinant is treated as zero, measured
/// against the product of the norms of its rows.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub type Matrix8 = SMatrix<Complex64, 8, 8>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("singular 3x3 system in row {row} (relative determinant {ratio:e})")]
    SingularSystem { row: usize, ratio: f64 },
    #[error("degenerate denominator {0}")]
    DegenerateDenominator(String),
    #[error("row {row} is not part of the chosen principal block")]
    RowOutsideBlock { row: usize },
    #[error(transparent)]
    Theta(#[from] ThetaError),
}

/// `c1 z1 + c2 z2 + c3 z3`, tagged with the characteristic it belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearForm {
    pub coeffs: [Complex64; 3],
    pub characteristic: Characteristic,
}

impl LinearForm {
    pub fn eval(&self, z: [Complex64; 3]) -> Complex64 {
        self.coeffs.iter().zip(z).map(|(c, x)| c * x).sum()
    }

    pub fn scaled(&self, s: Complex64) -> LinearForm {
        LinearForm {
            coeffs: self.coeffs.map(|c| c * s),
            characteristic: self.characteristic,
        }
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [ZERO; 3]
    }
}

/// Symmetric 8×8 matrix of linear forms with zero diagonal. Slot `(i, j)`
/// holds `scalar(i, j) * b_n` where `n = layout.entry(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BitangentMatrix {
    layout: CharMatrix,
    scalars: [[Complex64; 8]; 8],
    entries: [[LinearForm; 8]; 8],
}

impl BitangentMatrix {
    /// Builds the matrix from upper-triangle scalars; the lower triangle and
    /// the diagonal of `scalars` are ignored.
    pub fn from_scalars(
        table: &ThetaTable,
        layout: &CharMatrix,
        scalars: [[Complex64; 8]; 8],
    ) -> Result<Self, BuildError> {
        let zero_form = LinearForm {
            coeffs: [ZERO; 3],
            characteristic: layout.base(),
        };
        let mut entries = [[zero_form; 8]; 8];
        let mut sym = [[ZERO; 8]; 8];
        for i in 0..8 {
            entries[i][i].characteristic = layout.entry(i, i);
            for j in i + 1..8 {
                let n = layout.entry(i, j);
                let form = LinearForm {
                    coeffs: table.gradient(n)?,
                    characteristic: n,
                }
                .scaled(scalars[i][j]);
                entries[i][j] = form;
                entries[j][i] = form;
                sym[i][j] = scalars[i][j];
                sym[j][i] = scalars[i][j];
            }
        }
        Ok(BitangentMatrix {
            layout: layout.clone(),
            scalars: sym,
            entries,
        })
    }

    pub fn layout(&self) -> &CharMatrix {
        &self.layout
    }

    pub fn entry(&self, i: usize, j: usize) -> &LinearForm {
        &self.entries[i][j]
    }

    pub fn scalar(&self, i: usize, j: usize) -> Complex64 {
        self.scalars[i][j]
    }

    pub fn scalars(&self) -> &[[Complex64; 8]; 8] {
        &self.scalars
    }

    pub fn evaluate(&self, z: [Complex64; 3]) -> Matrix8 {
        Matrix8::from_fn(|i, j| self.entries[i][j].eval(z))
    }

    /// `diag(d) · M · diag(d)`.
    pub fn congruence(&self, d: &[Complex64; 8]) -> BitangentMatrix {
        let mut out = self.clone();
        for i in 0..8 {
            for j in 0..8 {
                let f = d[i] * d[j];
                out.scalars[i][j] *= f;
                out.entries[i][j] = out.entries[i][j].scaled(f);
            }
        }
        out
    }

    /// Coefficient vectors of the submatrix on `rows × cols`.
    pub fn submatrix_coeffs(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<[Complex64; 3]>> {
        rows.iter()
            .map(|&i| cols.iter().map(|&j| self.entries[i][j].coeffs).collect())
            .collect()
    }
}

/// Raw gradients in the fixed layout, all scalars one.
pub fn base_matrix(table: &ThetaTable) -> Result<BitangentMatrix, BuildError> {
    let layout = reference_layout();
    BitangentMatrix::from_scalars(table, &layout, [[ONE; 8]; 8])
}

/// Layout for `m0 = [000,000]` and the Aronhold set `{77,64,51,46,23,15,32}`.
pub fn reference_layout() -> CharMatrix {
    CharMatrix::new(&AronholdSet::reference())
}

fn relative_det(rows: [[Complex64; 3]; 3]) -> (Complex64, f64) {
    let d = det3(rows);
    let scale: f64 = rows
        .iter()
        .map(|r| r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        .product();
    (d, if scale > 0.0 { d.norm() / scale } else { 0.0 })
}

/// Weights `λ` on the principal block `minor` such that, restricted to
/// row `row`, the weighted gradients satisfy one linear relation: the first
/// three nonzero columns add up to the fourth when `row` is not the last
/// index of the block, and all four add up to zero when it is. Entries are
/// aligned with `minor`; the slot of `row` itself is zero.
pub fn cramer_lambdas(
    table: &ThetaTable,
    layout: &CharMatrix,
    row: usize,
    minor: [usize; 5],
) -> Result<[Complex64; 5], BuildError> {
    let pos = minor
        .iter()
        .position(|&r| r == row)
        .ok_or(BuildError::RowOutsideBlock { row })?;
    let cols: Vec<usize> = (0..5).filter(|&c| c != pos).collect();
    let g: Vec<[Complex64; 3]> = cols
        .iter()
        .map(|&c| table.gradient(layout.entry(row, minor[c])))
        .collect::<Result<_, _>>()?;
    let (d123, ratio) = relative_det([g[0], g[1], g[2]]);
    if ratio < SINGULAR_TOLERANCE {
        return Err(BuildError::SingularSystem { row, ratio });
    }
    let fourth = if pos == 4 { -d123 } else { d123 };
    let mut out = [ZERO; 5];
    out[cols[0]] = det3([g[3], g[1], g[2]]);
    out[cols[1]] = det3([g[0], g[3], g[2]]);
    out[cols[2]] = det3([g[0], g[1], g[3]]);
    out[cols[3]] = fourth;
    Ok(out)
}

/// One symmetrized, normalized 5×5 principal block on rows
/// `{0, 1, 2, 3, fifth}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalBlock {
    pub indices: [usize; 5],
    /// Row weights before symmetrization.
    pub raw: [[Complex64; 5]; 5],
    /// Left multiplier making `raw` symmetric, first entry one.
    pub symmetrizer: [Complex64; 5],
    /// Largest `|s_ij - s_ji| / max(|s_ij|, |s_ji|)` after symmetrization.
    pub asymmetry: f64,
    /// Scalars after the normalizing congruence.
    pub scalars: [[Complex64; 5]; 5],
}

impl PrincipalBlock {
    /// Congruence by a diagonal matrix.
    pub fn congruence(&self, d: &[Complex64; 5]) -> [[Complex64; 5]; 5] {
        let mut s = self.scalars;
        for i in 0..5 {
            for j in 0..5 {
                s[i][j] *= d[i] * d[j];
            }
        }
        s
    }
}

/// Jacobian nullwerte of cells of the layout, addressed by block positions.
struct BlockDets<'a> {
    table: &'a ThetaTable,
    layout: &'a CharMatrix,
    idx: [usize; 5],
}

impl BlockDets<'_> {
    fn ch(&self, i: usize, j: usize) -> Characteristic {
        self.layout.entry(self.idx[i], self.idx[j])
    }

    fn d(&self, a: (usize, usize), b: (usize, usize), c: (usize, usize)) -> Result<Complex64, BuildError> {
        Ok(jacobian_d(self.table, self.ch(a.0, a.1), self.ch(b.0, b.1), self.ch(c.0, c.1))?)
    }
}

/// Builds the block on rows `{0, 1, 2, 3, fifth}` for `fifth` in `4..8`.
pub fn build_s(table: &ThetaTable, layout: &CharMatrix, fifth: usize) -> Result<PrincipalBlock, BuildError> {
    assert!((4..8).contains(&fifth), "fifth index must be in 4..8");
    let idx = [0, 1, 2, 3, fifth];
    let mut raw = [[ZERO; 5]; 5];
    for (r, row) in raw.iter_mut().enumerate() {
        *row = cramer_lambdas(table, layout, idx[r], idx)?;
    }
    let mut d = [ONE; 5];
    for j in 1..5 {
        if raw[j][0] == ZERO {
            return Err(BuildError::DegenerateDenominator(format!("symmetrizer entry {j}")));
        }
        d[j] = raw[0][j] / raw[j][0];
    }
    let mut sp = raw;
    for i in 0..5 {
        for v in sp[i].iter_mut() {
            *v *= d[i];
        }
    }
    let mut asymmetry: f64 = 0.0;
    for i in 0..5 {
        for j in i + 1..5 {
            let den = sp[i][j].norm().max(sp[j][i].norm());
            if den > 0.0 {
                asymmetry = asymmetry.max((sp[i][j] - sp[j][i]).norm() / den);
            }
        }
    }
    let bd = BlockDets { table, layout, idx };
    let t1 = bd.d((1, 4), (1, 2), (1, 3))? / (bd.d((0, 4), (0, 2), (0, 3))? * bd.d((0, 1), (1, 4), (1, 3))?);
    let t2 = bd.d((2, 4), (1, 2), (2, 3))? / bd.d((0, 1), (0, 4), (0, 3))?;
    let t = [ONE, t1, t2, ONE, ONE];
    let mut scalars = sp;
    for i in 0..5 {
        for j in 0..5 {
            scalars[i][j] *= t[i] * t[j];
        }
    }
    Ok(PrincipalBlock {
        indices: idx,
        raw,
        symmetrizer: d,
        asymmetry,
        scalars,
    })
}

/// Ratio of the common-corner weights of block `fifth` to those of block 4.
pub fn merge_factor(table: &ThetaTable, layout: &CharMatrix, fifth: usize) -> Result<Complex64, BuildError> {
    let k = BlockDets { table, layout, idx: [0, 1, 2, 3, fifth] };
    let f = BlockDets { table, layout, idx: [0, 1, 2, 3, 4] };
    Ok(f.d((0, 1), (0, 4), (0, 3))? * f.d((1, 4), (1, 2), (1, 3))? * k.d((0, 1), (1, 4), (1, 3))?
        / (f.d((0, 1), (1, 4), (1, 3))? * k.d((0, 1), (0, 4), (0, 3))? * k.d((1, 4), (1, 2), (1, 3))?))
}

/// Diagonal congruence that makes block `fifth` agree with block 4 on the
/// common 4×4 corner. Uses the principal square root of the merge factor.
pub fn overlap_congruence(
    table: &ThetaTable,
    layout: &CharMatrix,
    fifth: usize,
) -> Result<[Complex64; 5], BuildError> {
    let a = merge_factor(table, layout, fifth)?.sqrt();
    let k = BlockDets { table, layout, idx: [0, 1, 2, 3, fifth] };
    let f = BlockDets { table, layout, idx: [0, 1, 2, 3, 4] };
    Ok([
        a,
        a * k.d((0, 1), (0, 4), (0, 3))? / f.d((0, 1), (0, 4), (0, 3))?,
        f.d((2, 4), (1, 2), (2, 3))? / (k.d((2, 4), (1, 2), (2, 3))? * a),
        f.d((0, 1), (0, 2), (0, 4))? / (k.d((0, 1), (0, 2), (0, 4))? * a),
        ONE / a,
    ])
}

/// Label-addressed Jacobian nullwerte with a degeneracy guard.
pub(crate) struct Dets<'a> {
    table: &'a ThetaTable,
    scale: f64,
}

impl<'a> Dets<'a> {
    pub(crate) fn new(table: &'a ThetaTable) -> Self {
        let g = table
            .gradients()
            .values()
            .map(|v| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        Dets { table, scale: g.powi(3) }
    }

    /// `D(a, b, c)` for two-digit labels. The labels are odd constants, so
    /// the lookup cannot fail on a complete table.
    pub(crate) fn d(&self, a: u8, b: u8, c: u8) -> Complex64 {
        jacobian_d(
            self.table,
            Characteristic::lab(a),
            Characteristic::lab(b),
            Characteristic::lab(c),
        )
        .expect("odd label")
    }

    /// `D(a, b, c)` for use as a denominator.
    pub(crate) fn den(&self, a: u8, b: u8, c: u8) -> Result<Complex64, BuildError> {
        let v = self.d(a, b, c);
        if !(v.norm() > SINGULAR_TOLERANCE * self.scale) {
            return Err(BuildError::DegenerateDenominator(format!("D({a},{b},{c})")));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MergeConstants {
    #[serde(rename = "A")]
    pub a: Complex64,
    #[serde(rename = "B")]
    pub b: Complex64,
    #[serde(rename = "C")]
    pub c: Complex64,
}

pub fn merge_constants(table: &ThetaTable) -> Result<MergeConstants, BuildError> {
    let ds = Dets::new(table);
    let d = |a, b, c| ds.d(a, b, c);
    let common = d(77, 46, 51) * d(31, 13, 26);
    let a = common * d(77, 54, 26)
        / (ds.den(77, 31, 26)? * ds.den(77, 23, 51)? * ds.den(54, 13, 26)?);
    let b = common * d(77, 62, 26)
        / (ds.den(62, 13, 26)? * ds.den(77, 15, 51)? * ds.den(77, 31, 26)?);
    let c = common * d(77, 45, 26)
        / (ds.den(45, 13, 26)? * ds.den(77, 32, 51)? * ds.den(77, 31, 26)?);
    for (v, name) in [(a, "A"), (b, "B"), (c, "C")] {
        if !(v.norm() > 0.0 && v.norm().is_finite()) {
            return Err(BuildError::DegenerateDenominator(format!("merge constant {name}")));
        }
    }
    Ok(MergeConstants { a, b, c })
}

/// The six coefficients of the lower-right 4×4 corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XCoefficients {
    /// `X65` obtained from the fifth row.
    pub x65: Complex64,
    /// `X65` obtained independently from the sixth row.
    pub x65_alt: Complex64,
    pub x53: Complex64,
    pub x74: Complex64,
    pub x36: Complex64,
    pub x11: Complex64,
    pub x27: Complex64,
}

impl XCoefficients {
    /// `|X65 - X65'| / |X65|`.
    pub fn x65_discrepancy(&self) -> f64 {
        (self.x65 - self.x65_alt).norm() / self.x65.norm()
    }
}

pub fn compute_x(table: &ThetaTable, mc: &MergeConstants) -> Result<XCoefficients, BuildError> {
    let ds = Dets::new(table);
    let d = |a, b, c| ds.d(a, b, c);
    let (a, b, c) = (mc.a, mc.b, mc.c);
    let x65 = (a * d(77, 23, 51) - d(77, 46, 51)) / a * d(22, 31, 17) * d(64, 13, 35)
        / (ds.den(65, 31, 17)? * ds.den(22, 13, 35)?);
    let x65_alt = (ONE / a - d(77, 64, 23) / ds.den(77, 64, 46)?) * d(77, 64, 46) * d(51, 26, 35)
        * d(72, 54, 47)
        / (ds.den(72, 26, 35)? * ds.den(65, 54, 47)?);
    let x53 = (b * d(77, 15, 51) - d(77, 46, 51)) / b * d(22, 31, 17) * d(64, 13, 35)
        / (ds.den(53, 31, 17)? * ds.den(22, 13, 35)?);
    let x74 = (ONE - c * d(77, 64, 32) / ds.den(77, 64, 46)?) / c * d(77, 64, 51) * d(46, 31, 22)
        / ds.den(74, 31, 22)?;
    let ratio = d(54, 13, 26) * d(77, 23, 51) * d(15, 64, 51) * d(77, 62, 26)
        / (ds.den(23, 64, 51)? * ds.den(77, 54, 26)? * ds.den(77, 15, 51)? * ds.den(62, 13, 26)?);
    let x36 = (ONE - ratio) / b * d(77, 64, 51) * d(23, 47, 72) / ds.den(36, 47, 72)?;
    let x11 = (ONE / c - d(77, 64, 32) / (a * ds.den(77, 64, 23)?)) * d(23, 54, 47) * d(77, 64, 51)
        / ds.den(11, 54, 47)?;
    let x27 = (ONE / c - d(77, 64, 32) / (b * ds.den(77, 64, 15)?)) * d(15, 62, 71) * d(77, 64, 51)
        / ds.den(27, 62, 71)?;
    Ok(XCoefficients {
        x65,
        x65_alt,
        x53,
        x74,
        x36,
        x11,
        x27,
    })
}

/// `|X65|` predicted from theta constants alone.
pub fn x65_theta_modulus(table: &ThetaTable) -> Result<f64, BuildError> {
    let t = |l: u8| -> Result<f64, BuildError> { Ok(table.constant(Characteristic::lab(l))?.norm()) };
    let num = t(14)? * t(33)? * t(0)? * t(42)? * t(57)? * t(61)? * t(70)? * t(6)? * t(21)? * t(7)? * t(20)?;
    let den = t(52)? * t(75)? * t(41)? * t(40)? * t(66)? * t(67)?;
    Ok(std::f64::consts::PI.powi(3) * num / den)
}

/// Everything produced by the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Assembly {
    /// Blocks glued along the common corner.
    pub merged: BitangentMatrix,
    /// `merged` after the congruence by `diag(1, D(77,31,26), 1, …, 1)`.
    pub normalized: BitangentMatrix,
    pub constants: MergeConstants,
    pub x: XCoefficients,
}

pub fn assemble_full(table: &ThetaTable) -> Result<Assembly, BuildError> {
    let layout = reference_layout();
    let constants = merge_constants(table)?;
    let x = compute_x(table, &constants)?;
    let ds = Dets::new(table);
    let d = |a, b, c| ds.d(a, b, c);
    let (ia, ib, ic) = (ONE / constants.a, ONE / constants.b, ONE / constants.c);
    let d773126 = ds.den(77, 31, 26)?;

    let mut s = [[ZERO; 8]; 8];
    s[0][1] = d(31, 13, 26) / d773126;
    s[0][2] = d(22, 13, 35);
    s[0][3] = d(77, 64, 46);
    for k in 4..8 {
        s[0][k] = d(77, 64, 51);
    }

    s[1][2] = d(22, 13, 35) / ds.den(77, 46, 51)?;
    s[1][3] = d(77, 13, 31) / d773126;
    s[1][4] = d(77, 13, 26) / d773126;
    let r1 = d(31, 13, 26) * d(77, 13, 26) / d773126;
    s[1][5] = ia * r1 / ds.den(54, 13, 26)?;
    s[1][6] = ib * r1 / ds.den(62, 13, 26)?;
    s[1][7] = ic * r1 / ds.den(45, 13, 26)?;

    s[2][3] = d(64, 13, 22);
    s[2][4] = d(64, 13, 35);
    let r2 = d(22, 13, 35) * d(64, 13, 35);
    s[2][5] = ia * r2 / ds.den(47, 13, 35)?;
    s[2][6] = ib * r2 / ds.den(71, 13, 35)?;
    s[2][7] = ic * r2 / ds.den(56, 13, 35)?;

    let r3 = d(77, 64, 46) * d(51, 26, 35);
    s[3][4] = r3 / ds.den(17, 26, 35)?;
    s[3][5] = ia * r3 / ds.den(72, 26, 35)?;
    s[3][6] = ib * r3 / ds.den(44, 26, 35)?;
    s[3][7] = ic * r3 / ds.den(63, 26, 35)?;

    s[4][5] = x.x65;
    s[4][6] = x.x53;
    s[4][7] = x.x74;
    s[5][6] = x.x36;
    s[5][7] = x.x11;
    s[6][7] = x.x27;

    let merged = BitangentMatrix::from_scalars(table, &layout, s)?;
    let mut diag = [ONE; 8];
    diag[1] = d773126;
    let normalized = merged.congruence(&diag);
    Ok(Assembly {
        merged,
        normalized,
        constants,
        x,
    })
}

/// Singular values of `M(z)` in descending order.
pub fn singular_values(m: &Matrix8) -> Vec<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// `σ5 / σ4` of `M(z)` per sample; `None` where `σ4` vanishes (e.g. `z = 0`).
pub fn rank_profile(m: &BitangentMatrix, z_samples: &[[Complex64; 3]]) -> Vec<Option<f64>> {
    z_samples
        .iter()
        .map(|&z| {
            let sv = singular_values(&m.evaluate(z));
            (sv[3] > 0.0).then(|| sv[4] / sv[3])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characteristic::is_azygetic;
    use crate::period::PeriodMatrix;
    use crate::theta::TruncationConfig;
    use nalgebra::{DMatrix, DVector};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tau() -> PeriodMatrix {
        PeriodMatrix::new([
            [c(0.05, 1.02), c(-0.03, 0.04), c(0.07, -0.02)],
            [c(-0.03, 0.04), c(0.01, 0.93), c(0.02, 0.06)],
            [c(0.07, -0.02), c(0.02, 0.06), c(-0.08, 1.07)],
        ])
        .unwrap()
    }

    fn table() -> ThetaTable {
        ThetaTable::build(&tau(), &TruncationConfig::default()).unwrap()
    }

    fn dl(t: &ThetaTable, a: u8, b: u8, cc: u8) -> Complex64 {
        Dets::new(t).d(a, b, cc)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    fn zs() -> Vec<[Complex64; 3]> {
        vec![
            [c(0.3, -1.1), c(0.8, 0.2), c(-0.5, 0.7)],
            [c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.5)],
            [c(-0.2, 0.4), c(1.3, -0.9), c(0.1, 0.0)],
            [c(0.0, 0.6), c(-0.7, -0.3), c(1.2, 0.2)],
            [c(0.9, 0.9), c(0.4, -0.1), c(-1.0, 0.3)],
        ]
    }

    #[test]
    fn base_matrix_layout() {
        let m = base_matrix(&table()).unwrap();
        assert_eq!(m.entry(0, 1).characteristic, Characteristic::lab(77));
        assert_eq!(m.entry(4, 7).characteristic, Characteristic::lab(74));
        let mut seen: Vec<_> = (0..8)
            .flat_map(|i| (i + 1..8).map(move |j| (i, j)))
            .map(|(i, j)| m.entry(i, j).characteristic)
            .collect();
        seen.sort();
        let odds: Vec<_> = Characteristic::odds().collect();
        assert_eq!(seen, odds);
        for i in 0..8 {
            assert!(m.entry(i, i).is_zero());
            for j in 0..8 {
                assert_eq!(m.entry(i, j), m.entry(j, i));
            }
        }
    }

    #[test]
    fn cramer_weights_first_row() {
        let t = table();
        let layout = reference_layout();
        let l = cramer_lambdas(&t, &layout, 0, [0, 1, 2, 3, 4]).unwrap();
        assert_eq!(l[0], ZERO);
        assert!(rel(l[4], dl(&t, 77, 64, 51)) < 1e-14);
        assert!(rel(l[1], dl(&t, 46, 64, 51)) < 1e-14);
        // the linear system holds
        let g = |n: u8| t.gradient(Characteristic::lab(n)).unwrap();
        for k in 0..3 {
            let lhs = l[1] * g(77)[k] + l[2] * g(64)[k] + l[3] * g(51)[k];
            let rhs = l[4] * g(46)[k];
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(lhs.norm()));
        }
        assert!(matches!(
            cramer_lambdas(&t, &layout, 6, [0, 1, 2, 3, 4]),
            Err(BuildError::RowOutsideBlock { row: 6 })
        ));
    }

    #[test]
    fn cramer_weights_span_the_kernel() {
        let t = table();
        let g = |n: u8| t.gradient(Characteristic::lab(n)).unwrap();
        let cols = [g(77), g(64), g(51), g(46).map(|v| -v)];
        let m = DMatrix::from_fn(3, 4, |i, j| cols[j][i]);
        let sv = m.clone().svd(false, false).singular_values;
        let mut sv: Vec<f64> = sv.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        // rank 3: the kernel of the 3x4 system is one-dimensional
        assert!(sv[2] / sv[0] > 1e-8, "{sv:?}");
        let l = cramer_lambdas(&t, &reference_layout(), 0, [0, 1, 2, 3, 4]).unwrap();
        let v = DVector::from_vec(l[1..].to_vec());
        let r = &m * &v;
        assert!(r.norm() < 1e-10 * v.norm() * sv[0]);
    }

    #[test]
    fn last_row_sums_to_zero() {
        let t = table();
        let layout = reference_layout();
        let l = cramer_lambdas(&t, &layout, 4, [0, 1, 2, 3, 4]).unwrap();
        for k in 0..3 {
            let s: Complex64 = (0..4)
                .map(|c| l[c] * t.gradient(layout.entry(4, c)).unwrap()[k])
                .sum();
            assert!(s.norm() < 1e-10 * l[0].norm() * 10.0);
        }
    }

    #[test]
    fn blocks_are_symmetric() {
        let t = table();
        let layout = reference_layout();
        for k in 4..8 {
            let b = build_s(&t, &layout, k).unwrap();
            assert!(b.asymmetry < 1e-8, "block {k}: {:e}", b.asymmetry);
        }
    }

    #[test]
    fn first_block_matches_printed_symmetrizer_and_entries() {
        let t = table();
        let b = build_s(&t, &reference_layout(), 4).unwrap();
        let printed = [
            ONE,
            dl(&t, 46, 64, 51) / dl(&t, 31, 13, 26),
            dl(&t, 77, 46, 51) / dl(&t, 22, 13, 35),
            dl(&t, 77, 64, 46) / dl(&t, 17, 26, 35),
            dl(&t, 77, 64, 51) / dl(&t, 17, 31, 22),
        ];
        for (a, p) in b.symmetrizer.iter().zip(printed) {
            assert!(rel(*a, p) < 1e-10);
        }
        let s = b.scalars;
        assert!(rel(s[0][1], dl(&t, 31, 13, 26) / dl(&t, 77, 31, 26)) < 1e-10);
        assert!(rel(s[1][2], dl(&t, 22, 13, 35) / dl(&t, 77, 46, 51)) < 1e-10);
        assert!(rel(s[2][3], dl(&t, 64, 13, 22)) < 1e-10);
        assert!(rel(s[0][4], dl(&t, 77, 64, 51)) < 1e-10);
    }

    #[test]
    fn overlap_of_normalized_blocks() {
        let t = table();
        let layout = reference_layout();
        let s1 = build_s(&t, &layout, 4).unwrap();
        let asm = assemble_full(&t).unwrap();
        for k in 5..8 {
            let n = overlap_congruence(&t, &layout, k).unwrap();
            let nsn = build_s(&t, &layout, k).unwrap().congruence(&n);
            let scale = (0..4)
                .flat_map(|i| (0..4).map(move |j| (i, j)))
                .map(|(i, j)| s1.scalars[i][j].norm())
                .fold(0.0, f64::max);
            for i in 0..4 {
                for j in 0..4 {
                    assert!((nsn[i][j] - s1.scalars[i][j]).norm() < 1e-8 * scale);
                }
                // the glued column agrees with the closed form
                assert!(rel(nsn[i][4], asm.merged.scalar(i, k)) < 1e-8, "({i},{k})");
            }
        }
    }

    #[test]
    fn merge_constants_definition_and_generic_form() {
        let t = table();
        let mc = merge_constants(&t).unwrap();
        let lhs = mc.a * dl(&t, 77, 31, 26) * dl(&t, 77, 23, 51) * dl(&t, 54, 13, 26);
        let rhs = dl(&t, 77, 46, 51) * dl(&t, 31, 13, 26) * dl(&t, 77, 54, 26);
        assert!(rel(lhs, rhs) < 1e-10);
        let layout = reference_layout();
        for (k, v) in [(5, mc.a), (6, mc.b), (7, mc.c)] {
            assert!(rel(merge_factor(&t, &layout, k).unwrap(), v) < 1e-10);
        }
        assert!(rel(merge_factor(&t, &layout, 4).unwrap(), ONE) < 1e-14);
    }

    #[test]
    fn constants_are_homogeneous_of_degree_zero() {
        let t = table();
        let s = c(0.7, -2.3);
        let ts = t.with_scaled_gradients(s);
        let (m1, m2) = (merge_constants(&t).unwrap(), merge_constants(&ts).unwrap());
        assert!(rel(m2.a, m1.a) < 1e-12 && rel(m2.b, m1.b) < 1e-12 && rel(m2.c, m1.c) < 1e-12);
        let (x1, x2) = (compute_x(&t, &m1).unwrap(), compute_x(&ts, &m2).unwrap());
        for (a, b) in [
            (x1.x65, x2.x65),
            (x1.x53, x2.x53),
            (x1.x74, x2.x74),
            (x1.x36, x2.x36),
            (x1.x11, x2.x11),
            (x1.x27, x2.x27),
        ] {
            // D-count balance leaves a factor s^3 in every X
            assert!(rel(b, a * s.powu(3)) < 1e-12);
        }
    }

    #[test]
    fn x65_two_ways_and_theta_modulus() {
        let t = table();
        let x = compute_x(&t, &merge_constants(&t).unwrap()).unwrap();
        assert!(x.x65_discrepancy() < 1e-8, "{:e}", x.x65_discrepancy());
        let m = x65_theta_modulus(&t).unwrap();
        assert!((x.x65.norm() - m).abs() / m < 1e-6);
    }

    #[test]
    fn assembled_matrix_has_rank_four() {
        let t = table();
        let asm = assemble_full(&t).unwrap();
        for r in rank_profile(&asm.merged, &zs()) {
            assert!(r.unwrap() < 1e-8, "{r:?}");
        }
        for r in rank_profile(&asm.normalized, &zs()) {
            assert!(r.unwrap() < 1e-8, "{r:?}");
        }
        let base = base_matrix(&t).unwrap();
        for r in rank_profile(&base, &zs()) {
            assert!(r.unwrap() > 1e-2, "{r:?}");
        }
        assert_eq!(rank_profile(&base, &[[ZERO; 3]]), vec![None]);
    }

    #[test]
    fn printed_first_row_and_final_congruence() {
        let t = table();
        let asm = assemble_full(&t).unwrap();
        assert!(rel(asm.merged.scalar(0, 5), dl(&t, 77, 64, 51)) < 1e-14);
        assert_eq!(asm.merged.entry(0, 5).characteristic, Characteristic::lab(23));
        let n = &asm.normalized;
        assert!(rel(n.scalar(0, 1), dl(&t, 31, 13, 26)) < 1e-12);
        assert!(rel(n.scalar(1, 3), dl(&t, 77, 13, 31)) < 1e-12);
        assert!(rel(n.scalar(2, 3), dl(&t, 64, 13, 22)) < 1e-14);
    }

    #[test]
    fn columns_lie_in_span_of_first_four() {
        let asm = assemble_full(&table()).unwrap();
        for z in zs() {
            let m = asm.merged.evaluate(z);
            let a = DMatrix::from_fn(8, 4, |i, j| m[(i, j)]);
            let svd = a.clone().svd(true, true);
            for k in 4..8 {
                let b = DVector::from_fn(8, |i, _| m[(i, k)]);
                let x = svd.solve(&b, 1e-14).unwrap();
                let r = (&a * x - &b).norm();
                assert!(r < 1e-8 * b.norm(), "column {k}: {:e}", r / b.norm());
            }
        }
    }

    #[test]
    fn diagonal_congruence_keeps_rank() {
        let asm = assemble_full(&table()).unwrap();
        let d = [
            c(1.3, 0.2),
            c(-0.4, 0.9),
            c(2.1, -1.0),
            c(0.5, 0.5),
            c(-1.7, 0.1),
            c(0.8, -0.6),
            c(0.3, 1.4),
            c(1.1, 0.0),
        ];
        for r in rank_profile(&asm.merged.congruence(&d), &zs()) {
            assert!(r.unwrap() < 1e-6);
        }
    }

    #[test]
    fn rows_are_aronhold_and_triangles_azygetic() {
        let m = base_matrix(&table()).unwrap();
        let layout = m.layout();
        for i in 0..8 {
            let members = layout.row_members(i);
            assert!(AronholdSet::new(members).is_ok(), "row {i}");
        }
        for i in 0..8 {
            for j in i + 1..8 {
                for k in j + 1..8 {
                    assert!(is_azygetic(layout.entry(i, j), layout.entry(j, k), layout.entry(i, k)));
                }
            }
        }
    }
}
