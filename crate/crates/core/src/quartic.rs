//! The plane quartic as a 4×4 minor of the bitangent matrix, its
//! restriction to lines, and the double-contact test.

use nalgebra::{Matrix4, Schur};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::builder::{reference_layout, BitangentMatrix, BuildError, Dets, LinearForm};
use crate::forms::{determinant_of_linear_forms, monomials, BinaryForm, TernaryForm};
use crate::theta::ThetaTable;

/// Relative size below which an expanded minor counts as identically zero.
pub const ZERO_MINOR_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuarticError {
    #[error("4x4 minor on rows {rows:?}, columns {cols:?} vanishes identically")]
    ZeroMinor { rows: [usize; 4], cols: [usize; 4] },
    #[error("line has a zero coefficient vector")]
    ZeroForm,
    #[error("form of degree {0} where a quartic was expected")]
    WrongDegree(usize),
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// Which coefficient was divided out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalization {
    /// Position of the largest-modulus coefficient, which becomes one.
    pub index: usize,
    /// Its value before normalization.
    pub divisor: Complex64,
}

/// A ternary quartic normalized so that its largest-modulus coefficient is one.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousQuartic {
    form: TernaryForm,
    normalization: Normalization,
}

impl HomogeneousQuartic {
    /// Returns `None` for the zero form.
    pub fn normalize(form: &TernaryForm) -> Result<Option<Self>, QuarticError> {
        if form.degree() != 4 {
            return Err(QuarticError::WrongDegree(form.degree()));
        }
        let (index, divisor) = form
            .coeffs()
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("15 coefficients");
        if divisor == ZERO {
            return Ok(None);
        }
        Ok(Some(HomogeneousQuartic {
            form: form.scale(ONE / divisor),
            normalization: Normalization { index, divisor },
        }))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        self.form.coeffs()
    }

    pub fn form(&self) -> &TernaryForm {
        &self.form
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Monomial exponent labels in coefficient order, e.g. `"310"`.
    pub fn monomial_labels() -> Vec<String> {
        monomials(4)
            .iter()
            .map(|e| format!("{}{}{}", e[0], e[1], e[2]))
            .collect()
    }

    pub fn eval(&self, z: [Complex64; 3]) -> Complex64 {
        self.form.eval(z)
    }
}

/// Expands the determinant of the 4×4 submatrix on `rows × cols`.
pub fn minor_quartic(
    m: &BitangentMatrix,
    rows: [usize; 4],
    cols: [usize; 4],
) -> Result<HomogeneousQuartic, QuarticError> {
    let sub = m.submatrix_coeffs(&rows, &cols);
    let det = determinant_of_linear_forms(&sub);
    // Largest possible size of a product along a permutation.
    let scale: f64 = sub
        .iter()
        .map(|r| {
            r.iter()
                .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
                .fold(0.0, f64::max)
        })
        .product();
    if !(det.max_abs() > ZERO_MINOR_TOLERANCE * scale) {
        return Err(QuarticError::ZeroMinor { rows, cols });
    }
    HomogeneousQuartic::normalize(&det)?.ok_or(QuarticError::ZeroMinor { rows, cols })
}

/// `min_s ‖q1 - s q2‖ / ‖q1‖`.
pub fn proportionality(q1: &[Complex64], q2: &[Complex64]) -> f64 {
    assert_eq!(q1.len(), q2.len(), "length mismatch");
    let n1: f64 = q1.iter().map(|c| c.norm_sqr()).sum();
    let n2: f64 = q2.iter().map(|c| c.norm_sqr()).sum();
    if n1 == 0.0 {
        return if n2 == 0.0 { 0.0 } else { 1.0 };
    }
    if n2 == 0.0 {
        return 1.0;
    }
    let inner: Complex64 = q2.iter().zip(q1).map(|(b, a)| b.conj() * a).sum();
    let s = inner / n2;
    let r: f64 = q1.iter().zip(q2).map(|(a, b)| (a - s * b).norm_sqr()).sum();
    (r.max(0.0) / n1).sqrt()
}

/// The 4×4 symmetric matrix of modular-function multiples of bitangent
/// forms whose determinant is the quartic.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    scalars: [[Complex64; 4]; 4],
    entries: [[LinearForm; 4]; 4],
}

impl QMatrix {
    pub fn scalar(&self, i: usize, j: usize) -> Complex64 {
        self.scalars[i][j]
    }

    pub fn entry(&self, i: usize, j: usize) -> &LinearForm {
        &self.entries[i][j]
    }

    pub fn quartic(&self) -> Result<HomogeneousQuartic, QuarticError> {
        let rows: Vec<Vec<[Complex64; 3]>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|f| f.coeffs).collect())
            .collect();
        let det = determinant_of_linear_forms(&rows);
        HomogeneousQuartic::normalize(&det)?.ok_or(QuarticError::ZeroMinor {
            rows: [0, 1, 2, 3],
            cols: [0, 1, 2, 3],
        })
    }
}

pub fn extract_q(table: &ThetaTable) -> Result<QMatrix, QuarticError> {
    let ds = Dets::new(table);
    let d = |a, b, c| ds.d(a, b, c);
    let base = ds.den(77, 31, 26)?;
    let mut s = [[ZERO; 4]; 4];
    s[0][1] = d(31, 13, 26) / base;
    s[0][2] = d(22, 13, 35) / base;
    s[0][3] = d(77, 64, 46) / base;
    s[1][2] = d(22, 13, 35) / ds.den(77, 46, 51)?;
    s[1][3] = d(77, 13, 31) / base;
    s[2][3] = d(64, 13, 22) / base;
    let layout = reference_layout();
    let zero = LinearForm {
        coeffs: [ZERO; 3],
        characteristic: layout.base(),
    };
    let mut entries = [[zero; 4]; 4];
    for i in 0..4 {
        for j in i + 1..4 {
            s[j][i] = s[i][j];
            let n = layout.entry(i, j);
            let form = LinearForm {
                coeffs: table.gradient(n).map_err(BuildError::from)?,
                characteristic: n,
            }
            .scaled(s[i][j]);
            entries[i][j] = form;
            entries[j][i] = form;
        }
    }
    Ok(QMatrix { scalars: s, entries })
}

/// `g(s, t) = Σ a_i s^(4-i) t^i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinaryQuartic {
    pub coeffs: [Complex64; 5],
}

impl BinaryQuartic {
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn eval(&self, s: Complex64, t: Complex64) -> Complex64 {
        BinaryForm::new(self.coeffs.to_vec()).eval(s, t)
    }
}

/// `f` restricted to the kernel of a line, with the basis used.
#[derive(Debug, Clone, PartialEq)]
pub struct LineRestriction {
    pub binary: BinaryQuartic,
    pub u: [Complex64; 3],
    pub v: [Complex64; 3],
}

impl LineRestriction {
    pub fn point(&self, s: Complex64, t: Complex64) -> [Complex64; 3] {
        [0, 1, 2].map(|k| s * self.u[k] + t * self.v[k])
    }
}

/// Orthonormal basis `{u, v}` of `{z : c·z = 0}`.
pub fn line_kernel_basis(c: [Complex64; 3]) -> Option<([Complex64; 3], [Complex64; 3])> {
    let nc = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if !(nc > 0.0) {
        return None;
    }
    let n = c.map(|x| x.conj() / nc);
    let j = (0..3)
        .min_by(|&a, &b| c[a].norm().total_cmp(&c[b].norm()))
        .unwrap();
    let mut u = [ZERO; 3];
    u[j] = ONE;
    let proj: Complex64 = n.iter().zip(&u).map(|(a, b)| a.conj() * b).sum();
    for k in 0..3 {
        u[k] -= proj * n[k];
    }
    let nu = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let u = u.map(|x| x / nu);
    let cross = [
        n[1] * u[2] - n[2] * u[1],
        n[2] * u[0] - n[0] * u[2],
        n[0] * u[1] - n[1] * u[0],
    ];
    Some((u, cross.map(|x| x.conj())))
}

pub fn restrict_to_line(f: &HomogeneousQuartic, line: &LinearForm) -> Result<LineRestriction, QuarticError> {
    let (u, v) = line_kernel_basis(line.coeffs).ok_or(QuarticError::ZeroForm)?;
    let g = f.form().restrict(u, v);
    let coeffs: [Complex64; 5] = g.coeffs().try_into().expect("degree 4");
    Ok(LineRestriction {
        binary: BinaryQuartic { coeffs },
        u,
        v,
    })
}

/// Outcome of the double-contact test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoubleContact {
    pub is_double: bool,
    /// `min_k ‖g - k q²‖ / ‖g‖` with `q` built from the paired roots.
    pub residual: f64,
    /// Largest chordal distance between the two roots of a pair.
    pub pair_gap: f64,
    /// The two double roots as projective points `(s, t)` of unit norm.
    pub points: [[Complex64; 2]; 2],
}

fn chordal(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
}

/// Rotation angle count tried when moving roots away from infinity.
const ROTATIONS: usize = 12;

/// Roots of `h(s, 1)` for a binary quartic `h` with nonzero leading
/// coefficient, from the eigenvalues of the companion matrix.
fn chart_roots(h: &[Complex64; 5]) -> Option<[Complex64; 4]> {
    let lead = h[0];
    let c: Vec<Complex64> = h[1..].iter().map(|x| x / lead).collect();
    let mut m = Matrix4::<Complex64>::zeros();
    for k in 0..4 {
        m[(0, k)] = -c[k];
    }
    for k in 1..4 {
        m[(k, k - 1)] = ONE;
    }
    let ev = Schur::new(m).eigenvalues()?;
    let mut roots = [ZERO; 4];
    roots.copy_from_slice(ev.as_slice());
    Some(roots)
}

/// A few Newton steps on `p` (given by its coefficients, leading first),
/// keeping only those that decrease `|p|`.
fn polish(h: &[Complex64], mut x: Complex64) -> Complex64 {
    let eval = |x: Complex64| {
        let (mut p, mut dp) = (ZERO, ZERO);
        for &a in h {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };
    for _ in 0..4 {
        let (p, dp) = eval(x);
        if dp == ZERO {
            break;
        }
        let y = x - p / dp;
        if eval(y).0.norm() < p.norm() {
            x = y;
        } else {
            break;
        }
    }
    x
}

pub fn is_double_contact(g: &BinaryQuartic, tol: f64) -> DoubleContact {
    let gn = g.norm();
    let fail = DoubleContact {
        is_double: false,
        residual: 1.0,
        pair_gap: 1.0,
        points: [[ONE, ZERO], [ONE, ZERO]],
    };
    if !(gn > 0.0) || !gn.is_finite() {
        return fail;
    }
    let form = BinaryForm::new(g.coeffs.to_vec());
    let (cs, sn) = (0..ROTATIONS)
        .map(|k| {
            let th = std::f64::consts::PI * k as f64 / ROTATIONS as f64;
            (th.cos(), th.sin())
        })
        .max_by(|a, b| {
            let fa = form.eval(Complex64::new(a.0, 0.0), Complex64::new(a.1, 0.0)).norm();
            let fb = form.eval(Complex64::new(b.0, 0.0), Complex64::new(b.1, 0.0)).norm();
            fa.total_cmp(&fb)
        })
        .unwrap();
    let h: [Complex64; 5] = form.rotated(cs, sn).coeffs().try_into().unwrap();
    let Some(roots) = chart_roots(&h) else {
        return fail;
    };
    let matchings = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];
    let best = matchings
        .iter()
        .min_by(|a, b| {
            let cost = |m: &[(usize, usize); 2]| {
                m.iter().map(|&(i, j)| chordal(roots[i], roots[j]).powi(2)).sum::<f64>()
            };
            cost(a).total_cmp(&cost(b))
        })
        .unwrap();
    let pair_gap = best
        .iter()
        .map(|&(i, j)| chordal(roots[i], roots[j]))
        .fold(0.0, f64::max);
    // A double root of h is a simple root of h', where Newton converges fast.
    let dh: Vec<Complex64> = (0..4).map(|i| h[i] * (4 - i) as f64).collect();
    let mu = best.map(|(i, j)| polish(&dh, 0.5 * (roots[i] + roots[j])));
    // q(s) = (s - mu0)(s - mu1), q² as a quartic in the chart.
    let q = BinaryForm::new(vec![ONE, -(mu[0] + mu[1]), mu[0] * mu[1]]);
    let q2 = &q * &q;
    let hn: f64 = h.iter().map(|c| c.norm_sqr()).sum();
    let qn: f64 = q2.coeffs().iter().map(|c| c.norm_sqr()).sum();
    let k: Complex64 = q2.coeffs().iter().zip(&h).map(|(a, b)| a.conj() * b).sum::<Complex64>() / qn;
    let r: f64 = h
        .iter()
        .zip(q2.coeffs())
        .map(|(a, b)| (a - k * b).norm_sqr())
        .sum();
    let residual = (r / hn).sqrt();
    let points = mu.map(|m| {
        let (s, t) = (m * cs - sn, m * sn + cs);
        let n = (s.norm_sqr() + t.norm_sqr()).sqrt();
        [s / n, t / n]
    });
    DoubleContact {
        is_double: residual < tol,
        residual,
        pair_gap,
        points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::assemble_full;
    use crate::characteristic::Characteristic;
    use crate::period::PeriodMatrix;
    use crate::theta::TruncationConfig;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn table() -> ThetaTable {
        let tau = PeriodMatrix::new([
            [c(0.05, 1.02), c(-0.03, 0.04), c(0.07, -0.02)],
            [c(-0.03, 0.04), c(0.01, 0.93), c(0.02, 0.06)],
            [c(0.07, -0.02), c(0.02, 0.06), c(-0.08, 1.07)],
        ])
        .unwrap();
        ThetaTable::build(&tau, &TruncationConfig::default()).unwrap()
    }

    fn bq(v: [f64; 5]) -> BinaryQuartic {
        BinaryQuartic {
            coeffs: v.map(|x| c(x, 0.0)),
        }
    }

    #[test]
    fn proportionality_basics() {
        let q: Vec<Complex64> = (0..15).map(|k| c(k as f64 * 0.3 - 1.0, (k % 4) as f64)).collect();
        assert_eq!(proportionality(&q, &q), 0.0);
        let s: Vec<Complex64> = q.iter().map(|x| x * c(0.0, 7.3)).collect();
        assert!(proportionality(&q, &s) < 1e-15);
        let mut p = q.clone();
        p[3] += c(1.0, 0.0);
        assert!(proportionality(&q, &p) > 1e-3);
    }

    #[test]
    fn normalization_sets_largest_coefficient_to_one() {
        let l = TernaryForm::linear([c(1.0, 2.0), c(-3.0, 0.0), c(0.0, 1.0)]);
        let f = &(&l * &l) * &(&l * &l);
        let q = HomogeneousQuartic::normalize(&f).unwrap().unwrap();
        assert!(q.coeffs().iter().all(|x| x.norm() <= 1.0 + 1e-15));
        assert_eq!(q.coeffs()[q.normalization().index], ONE);
        assert_eq!(q.coeffs().len(), 15);
        assert!(HomogeneousQuartic::normalize(&TernaryForm::zero(4)).unwrap().is_none());
        assert!(HomogeneousQuartic::normalize(&l).is_err());
    }

    #[test]
    fn double_contact_examples() {
        let sq = is_double_contact(&bq([0.0, 0.0, 1.0, 0.0, 0.0]), 1e-6);
        assert!(sq.is_double && sq.residual < 1e-14, "{sq:?}");
        let cube = is_double_contact(&bq([0.0, 1.0, 0.0, 0.0, 0.0]), 1e-6);
        assert!(!cube.is_double, "{cube:?}");
        let generic = is_double_contact(&bq([1.0, -0.3, 2.0, 0.7, -1.1]), 1e-6);
        assert!(!generic.is_double);
        // (s^2 + 2st - 3t^2)^2 with complex scale
        let q = BinaryForm::new(vec![ONE, c(2.0, 0.0), c(-3.0, 0.0)]);
        let g = (&q * &q).coeffs().iter().map(|x| x * c(0.3, -1.2)).collect::<Vec<_>>();
        let dc = is_double_contact(&BinaryQuartic { coeffs: g.try_into().unwrap() }, 1e-6);
        assert!(dc.is_double && dc.residual < 1e-12, "{dc:?}");
        for p in dc.points {
            assert!(q.eval(p[0], p[1]).norm() < 1e-10);
        }
        assert!(!is_double_contact(&bq([0.0; 5]), 1e-6).is_double);
    }

    #[test]
    fn kernel_basis_is_orthonormal() {
        let l = [c(0.3, -1.0), c(2.0, 0.5), c(-0.1, 0.0)];
        let (u, v) = line_kernel_basis(l).unwrap();
        let dot = |a: [Complex64; 3], b: [Complex64; 3]| -> Complex64 {
            a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum()
        };
        assert!((dot(u, u) - ONE).norm() < 1e-14);
        assert!((dot(v, v) - ONE).norm() < 1e-14);
        assert!(dot(u, v).norm() < 1e-14);
        for w in [u, v] {
            let e: Complex64 = l.iter().zip(&w).map(|(a, b)| a * b).sum();
            assert!(e.norm() < 1e-14);
        }
        assert!(line_kernel_basis([ZERO; 3]).is_none());
    }

    #[test]
    fn restriction_of_power_of_line_vanishes() {
        let coeffs = [c(0.3, -1.0), c(2.0, 0.5), c(-0.1, 0.0)];
        let l = TernaryForm::linear(coeffs);
        let f = HomogeneousQuartic::normalize(&(&(&l * &l) * &(&l * &l))).unwrap().unwrap();
        let line = LinearForm {
            coeffs,
            characteristic: Characteristic::lab(77),
        };
        let r = restrict_to_line(&f, &line).unwrap();
        assert!(r.binary.norm() < 1e-13);
        let zero = LinearForm {
            coeffs: [ZERO; 3],
            characteristic: Characteristic::lab(77),
        };
        assert_eq!(restrict_to_line(&f, &zero), Err(QuarticError::ZeroForm));
    }

    #[test]
    fn minors_define_one_quartic() {
        let asm = assemble_full(&table()).unwrap();
        let p = minor_quartic(&asm.merged, [0, 1, 2, 3], [0, 1, 2, 3]).unwrap();
        let off = minor_quartic(&asm.merged, [0, 1, 2, 3], [4, 5, 6, 7]).unwrap();
        assert!(proportionality(p.coeffs(), off.coeffs()) < 1e-6);
        let other = minor_quartic(&asm.merged, [2, 4, 5, 7], [2, 4, 5, 7]).unwrap();
        assert!(proportionality(p.coeffs(), other.coeffs()) < 1e-6);
        let q = extract_q(&table()).unwrap().quartic().unwrap();
        assert!(proportionality(p.coeffs(), q.coeffs()) < 1e-8);
    }

    #[test]
    fn q_matrix_shape() {
        let t = table();
        let q = extract_q(&t).unwrap();
        let ds = Dets::new(&t);
        let expect = ds.d(31, 13, 26) / ds.d(77, 31, 26);
        assert!((q.scalar(0, 1) - expect).norm() < 1e-14 * expect.norm());
        for i in 0..4 {
            assert_eq!(q.scalar(i, i), ZERO);
            for j in 0..4 {
                assert_eq!(q.entry(i, j), q.entry(j, i));
            }
        }
    }

    #[test]
    fn zero_minor_detected() {
        let t = table();
        let base = crate::builder::base_matrix(&t).unwrap();
        // the scaling of a singular diagonal makes every minor vanish
        let mut d = [ONE; 8];
        d[0] = ZERO;
        let z = base.congruence(&d);
        assert!(matches!(
            minor_quartic(&z, [0, 1, 2, 3], [0, 1, 2, 3]),
            Err(QuarticError::ZeroMinor { .. })
        ));
    }

    #[test]
    fn every_entry_line_is_bitangent() {
        let t = table();
        let asm = assemble_full(&t).unwrap();
        let f = extract_q(&t).unwrap().quartic().unwrap();
        for (i, j, n) in asm.merged.layout().off_diagonal() {
            let r = restrict_to_line(&f, asm.merged.entry(i, j)).unwrap();
            let dc = is_double_contact(&r.binary, 1e-6);
            assert!(dc.is_double, "{n}: {dc:?}");
            for p in dc.points {
                let z = r.point(p[0], p[1]);
                assert!(f.eval(z).norm() < 1e-8);
                assert!(asm.merged.entry(i, j).eval(z).norm() < 1e-12 * asm.merged.entry(i, j).norm());
            }
        }
    }
}
