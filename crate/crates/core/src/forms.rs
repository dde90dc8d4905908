//! Dense homogeneous polynomials over ℂ in three variables (ternary forms)
//! and in two variables (binary forms).
//!
//! Ternary monomials `z1^a z2^b z3^c` of degree `d` are stored in graded
//! lexicographic order: `a` descending, then `b` descending. For `d = 4`
//! this is `400, 310, 301, 220, 211, 202, 130, …, 004`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Number of monomials of degree `d` in three variables.
pub const fn monomial_count(d: usize) -> usize {
    (d + 1) * (d + 2) / 2
}

/// Position of `z1^a z2^b z3^c` in the graded lexicographic order. The
/// position does not depend on `a` once `b` and `c` are known.
pub fn monomial_index(_a: usize, b: usize, c: usize) -> usize {
    let s = b + c;
    s * (s + 1) / 2 + (s - b)
}

/// Exponents in storage order for degree `d`.
pub fn monomials(d: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(monomial_count(d));
    for a in (0..=d).rev() {
        for b in (0..=d - a).rev() {
            out.push([a, b, d - a - b]);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TernaryForm {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl TernaryForm {
    pub fn zero(degree: usize) -> Self {
        TernaryForm {
            degree,
            coeffs: vec![ZERO; monomial_count(degree)],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        TernaryForm {
            degree: 0,
            coeffs: vec![c],
        }
    }

    pub fn linear(c: [Complex64; 3]) -> Self {
        TernaryForm {
            degree: 1,
            coeffs: c.to_vec(),
        }
    }

    /// Panics if the length does not match the degree.
    pub fn from_coeffs(degree: usize, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), monomial_count(degree), "coefficient count");
        TernaryForm { degree, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, a: usize, b: usize, c: usize) -> Complex64 {
        debug_assert_eq!(a + b + c, self.degree);
        self.coeffs[monomial_index(a, b, c)]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        TernaryForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn eval(&self, z: [Complex64; 3]) -> Complex64 {
        let d = self.degree;
        let pw = |x: Complex64| {
            let mut v = vec![Complex64::new(1.0, 0.0); d + 1];
            for k in 1..=d {
                v[k] = v[k - 1] * x;
            }
            v
        };
        let (p1, p2, p3) = (pw(z[0]), pw(z[1]), pw(z[2]));
        monomials(d)
            .iter()
            .zip(&self.coeffs)
            .map(|([a, b, c], &k)| k * p1[*a] * p2[*b] * p3[*c])
            .sum()
    }

    /// Partial derivative in variable `var` (0-based).
    pub fn derivative(&self, var: usize) -> TernaryForm {
        if self.degree == 0 {
            return TernaryForm::constant(ZERO);
        }
        let mut out = TernaryForm::zero(self.degree - 1);
        for (e, &k) in monomials(self.degree).iter().zip(&self.coeffs) {
            if e[var] == 0 {
                continue;
            }
            let mut f = *e;
            f[var] -= 1;
            out.coeffs[monomial_index(f[0], f[1], f[2])] += k * e[var] as f64;
        }
        out
    }

    pub fn gradient_at(&self, z: [Complex64; 3]) -> [Complex64; 3] {
        [0, 1, 2].map(|v| self.derivative(v).eval(z))
    }

    /// Substitutes `z = s*u + t*v` and returns the binary form in `(s, t)`.
    pub fn restrict(&self, u: [Complex64; 3], v: [Complex64; 3]) -> BinaryForm {
        let vars: [BinaryForm; 3] =
            [0, 1, 2].map(|k| BinaryForm::new(vec![u[k], v[k]]));
        let mut out = BinaryForm::zero(self.degree);
        for (e, &k) in monomials(self.degree).iter().zip(&self.coeffs) {
            if k == ZERO {
                continue;
            }
            let mut term = BinaryForm::new(vec![k]);
            for (var, &p) in vars.iter().zip(e) {
                for _ in 0..p {
                    term = &term * var;
                }
            }
            out = &out + &term;
        }
        out
    }
}

impl Add for &TernaryForm {
    type Output = TernaryForm;

    fn add(self, rhs: &TernaryForm) -> TernaryForm {
        assert_eq!(self.degree, rhs.degree, "degree mismatch");
        TernaryForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &TernaryForm {
    type Output = TernaryForm;

    fn sub(self, rhs: &TernaryForm) -> TernaryForm {
        assert_eq!(self.degree, rhs.degree, "degree mismatch");
        TernaryForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &TernaryForm {
    type Output = TernaryForm;

    fn mul(self, rhs: &TernaryForm) -> TernaryForm {
        let mut out = TernaryForm::zero(self.degree + rhs.degree);
        let (ma, mb) = (monomials(self.degree), monomials(rhs.degree));
        for (ea, &ka) in ma.iter().zip(&self.coeffs) {
            if ka == ZERO {
                continue;
            }
            for (eb, &kb) in mb.iter().zip(&rhs.coeffs) {
                out.coeffs[monomial_index(ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2])] += ka * kb;
            }
        }
        out
    }
}

/// Determinant of a square matrix of linear forms by the Leibniz expansion.
pub fn determinant_of_linear_forms(rows: &[Vec<[Complex64; 3]>]) -> TernaryForm {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "square matrix required");
    let mut out = TernaryForm::zero(n);
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, 1.0, &mut |p, sign| {
        if p.iter().enumerate().any(|(i, &j)| rows[i][j] == [ZERO; 3]) {
            return;
        }
        let mut term = TernaryForm::constant(Complex64::new(sign, 0.0));
        for (i, &j) in p.iter().enumerate() {
            term = &term * &TernaryForm::linear(rows[i][j]);
        }
        out = &out + &term;
    });
    out
}

fn permute(p: &mut Vec<usize>, k: usize, sign: f64, f: &mut impl FnMut(&[usize], f64)) {
    if k == p.len() {
        f(p, sign);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, if i == k { sign } else { -sign }, f);
        p.swap(k, i);
    }
}

/// `Σ a_i s^(d-i) t^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryForm {
    coeffs: Vec<Complex64>,
}

impl BinaryForm {
    /// Panics on an empty coefficient list.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "binary form needs a coefficient");
        BinaryForm { coeffs }
    }

    pub fn zero(degree: usize) -> Self {
        BinaryForm {
            coeffs: vec![ZERO; degree + 1],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn eval(&self, s: Complex64, t: Complex64) -> Complex64 {
        let d = self.degree();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| a * s.powu((d - i) as u32) * t.powu(i as u32))
            .sum()
    }

    /// `g(c*s - n*t, n*s + c*t)` for the rotation by `(c, n)` with
    /// `|c|^2 + |n|^2 = 1`.
    pub fn rotated(&self, c: f64, n: f64) -> BinaryForm {
        let s_img = BinaryForm::new(vec![Complex64::new(c, 0.0), Complex64::new(-n, 0.0)]);
        let t_img = BinaryForm::new(vec![Complex64::new(n, 0.0), Complex64::new(c, 0.0)]);
        let d = self.degree();
        let mut out = BinaryForm::zero(d);
        for (i, &a) in self.coeffs.iter().enumerate() {
            let mut term = BinaryForm::new(vec![a]);
            for _ in 0..d - i {
                term = &term * &s_img;
            }
            for _ in 0..i {
                term = &term * &t_img;
            }
            out = &out + &term;
        }
        out
    }
}

impl Add for &BinaryForm {
    type Output = BinaryForm;

    fn add(self, rhs: &BinaryForm) -> BinaryForm {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "degree mismatch");
        BinaryForm {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Mul for &BinaryForm {
    type Output = BinaryForm;

    fn mul(self, rhs: &BinaryForm) -> BinaryForm {
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        BinaryForm { coeffs: out }
    }
}
