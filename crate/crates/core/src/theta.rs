//! Genus-3 theta constants and gradients of odd theta functions at `z = 0`,
//! evaluated as truncated lattice sums with an explicit tail bound.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::characteristic::Characteristic;
use crate::period::PeriodMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThetaError {
    #[error("characteristic {0} is odd; odd theta constants vanish identically")]
    OddCharacteristic(Characteristic),
    #[error("characteristic {0} is even; only odd theta functions have a gradient table")]
    EvenCharacteristic(Characteristic),
    #[error("required truncation radius exceeds max_radius {max_radius} (tail bound {bound:e} at the cap)")]
    RadiusOverflow { max_radius: u32, bound: f64 },
    #[error("smallest eigenvalue of Im tau must be positive, got {0:e}")]
    NonPositiveImaginary(f64),
    #[error("invalid truncation config: {0}")]
    InvalidConfig(&'static str),
    #[error("triple ({0}, {1}, {2}) is syzygetic")]
    SyzygeticTriple(Characteristic, Characteristic, Characteristic),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationConfig {
    /// Requested absolute tail tolerance.
    pub tol: f64,
    /// The tail bound must satisfy `safety * bound <= tol`.
    pub safety: f64,
    pub max_radius: u32,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig {
            tol: 1e-12,
            safety: 10.0,
            max_radius: 60,
        }
    }
}

impl TruncationConfig {
    pub fn with_tol(tol: f64) -> Self {
        TruncationConfig {
            tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), ThetaError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(ThetaError::InvalidConfig("tol must be positive"));
        }
        if !(self.safety >= 1.0 && self.safety.is_finite()) {
            return Err(ThetaError::InvalidConfig("safety must be at least 1"));
        }
        if self.max_radius < 3 {
            return Err(ThetaError::InvalidConfig("max_radius must be at least 3"));
        }
        Ok(())
    }
}

/// Sums of `g(x) = exp(-pi*lambda*x^2)` over `x` in `Z + c`, for `c` in
/// `{0, 1/2}`: `(sum g, sum |x| g)` over all `x` and over `|x| > radius`.
struct GaussianSums {
    all0: f64,
    all1: f64,
    tail0: f64,
    tail1: f64,
}

fn gaussian_sums(lambda: f64, offset: f64, radius: f64) -> GaussianSums {
    let g = |x: f64| (-PI * lambda * x * x).exp();
    // Past `stop` every term underflows and g, x*g are decreasing, so the
    // remainder is bounded by the integrals from `stop`.
    let stop = (750.0 / (PI * lambda)).sqrt().max(1.0 / (2.0 * PI * lambda).sqrt()) + 1.0;
    let mut sums = GaussianSums {
        all0: 0.0,
        all1: 0.0,
        tail0: 0.0,
        tail1: 0.0,
    };
    let mut n = 0i64;
    loop {
        let x = n as f64 + offset;
        if x > stop {
            break;
        }
        // x and its mirror -x (distinct unless x = 0)
        let mult = if x == 0.0 { 1.0 } else { 2.0 };
        let v = g(x);
        sums.all0 += mult * v;
        sums.all1 += mult * x * v;
        if x > radius {
            sums.tail0 += mult * v;
            sums.tail1 += mult * x * v;
        }
        n += 1;
    }
    let rem0 = 2.0 * g(stop) / (2.0 * PI * lambda * stop);
    let rem1 = 2.0 * g(stop) / (2.0 * PI * lambda);
    sums.all0 += rem0;
    sums.all1 += rem1;
    sums.tail0 += rem0;
    sums.tail1 += rem1;
    sums
}

/// Upper bound on `sum (1 + 2*pi*|q|_1) exp(-pi*lambda*|q|^2)` over the
/// points `q` of any half-integral shift `Z^3 + m'/2` with `|q|_inf > radius`.
///
/// Each term of the theta series, and each component of its gradient, is
/// bounded in modulus by the corresponding summand.
pub fn tail_bound(lambda: f64, radius: u32) -> f64 {
    let r = radius as f64;
    let s = [gaussian_sums(lambda, 0.0, r), gaussian_sums(lambda, 0.5, r)];
    let all0 = s[0].all0.max(s[1].all0);
    let all1 = s[0].all1.max(s[1].all1);
    let tail0 = s[0].tail0.max(s[1].tail0);
    let tail1 = s[0].tail1.max(s[1].tail1);
    // union bound over which coordinate leaves the box
    3.0 * (tail0 * all0 * all0 + 2.0 * PI * (tail1 * all0 * all0 + 2.0 * tail0 * all1 * all0))
}

/// Smallest radius whose tail bound, times `cfg.safety`, is within `cfg.tol`.
pub fn radius_for_eigenvalue(lambda: f64, cfg: &TruncationConfig) -> Result<u32, ThetaError> {
    cfg.validate()?;
    if !(lambda > 0.0) {
        return Err(ThetaError::NonPositiveImaginary(lambda));
    }
    for radius in 1..=cfg.max_radius {
        if cfg.safety * tail_bound(lambda, radius) <= cfg.tol {
            return Ok(radius);
        }
    }
    Err(ThetaError::RadiusOverflow {
        max_radius: cfg.max_radius,
        bound: tail_bound(lambda, cfg.max_radius),
    })
}

pub fn truncation_radius(tau: &PeriodMatrix, cfg: &TruncationConfig) -> Result<u32, ThetaError> {
    radius_for_eigenvalue(tau.min_imag_eigenvalue(), cfg)
}

/// Lattice sum for `theta_m(tau, z)` and its gradient in `z`, over
/// `q = p + m'/2` with `|q|_inf <= radius`.
fn lattice_sum(
    tau: &PeriodMatrix,
    m: Characteristic,
    z: [Complex64; 3],
    radius: u32,
) -> (Complex64, [Complex64; 3]) {
    let t = tau.tau();
    let a = m.top_bits().map(|b| b as f64 * 0.5);
    let b = m.bottom_bits().map(|b| b as f64 * 0.5);
    let shift = [z[0] + b[0], z[1] + b[1], z[2] + b[2]];
    let r = radius as i64;
    let range = |ak: f64| {
        let hi = if ak == 0.0 { r } else { r - 1 };
        -r..=hi
    };
    let ipi = Complex64::new(0.0, PI);
    let mut value = Complex64::new(0.0, 0.0);
    let mut grad = [Complex64::new(0.0, 0.0); 3];
    for p0 in range(a[0]) {
        let q0 = p0 as f64 + a[0];
        for p1 in range(a[1]) {
            let q1 = p1 as f64 + a[1];
            for p2 in range(a[2]) {
                let q2 = p2 as f64 + a[2];
                let q = [q0, q1, q2];
                let mut quad = Complex64::new(0.0, 0.0);
                for i in 0..3 {
                    for j in 0..3 {
                        quad += t[i][j] * (q[i] * q[j]);
                    }
                }
                let lin = shift[0] * q0 + shift[1] * q1 + shift[2] * q2;
                let term = (ipi * (quad + lin * 2.0)).exp();
                value += term;
                for k in 0..3 {
                    grad[k] += term * (2.0 * q[k]) * ipi;
                }
            }
        }
    }
    (value, grad)
}

/// Series value of `theta_m(tau, z)` for any characteristic; used to check
/// the analytic evaluators.
#[cfg(test)]
pub(crate) fn theta_at(tau: &PeriodMatrix, m: Characteristic, z: [Complex64; 3], radius: u32) -> Complex64 {
    lattice_sum(tau, m, z, radius).0
}

const ORIGIN: [Complex64; 3] = [Complex64 { re: 0.0, im: 0.0 }; 3];

pub fn theta_constant(
    tau: &PeriodMatrix,
    m: Characteristic,
    cfg: &TruncationConfig,
) -> Result<Complex64, ThetaError> {
    if m.is_odd() {
        return Err(ThetaError::OddCharacteristic(m));
    }
    let radius = truncation_radius(tau, cfg)?;
    Ok(lattice_sum(tau, m, ORIGIN, radius).0)
}

pub fn theta_gradient(
    tau: &PeriodMatrix,
    n: Characteristic,
    cfg: &TruncationConfig,
) -> Result<[Complex64; 3], ThetaError> {
    if n.is_even() {
        return Err(ThetaError::EvenCharacteristic(n));
    }
    let radius = truncation_radius(tau, cfg)?;
    Ok(lattice_sum(tau, n, ORIGIN, radius).1)
}

/// The 36 theta constants and 28 odd gradients of one period matrix,
/// evaluated with a single shared radius.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaTable {
    tau: PeriodMatrix,
    constants: BTreeMap<Characteristic, Complex64>,
    gradients: BTreeMap<Characteristic, [Complex64; 3]>,
    radius: u32,
    tail_bound: f64,
    tol: f64,
}

impl ThetaTable {
    pub fn build(tau: &PeriodMatrix, cfg: &TruncationConfig) -> Result<Self, ThetaError> {
        let radius = truncation_radius(tau, cfg)?;
        let constants = Characteristic::evens()
            .map(|m| (m, lattice_sum(tau, m, ORIGIN, radius).0))
            .collect();
        let gradients = Characteristic::odds()
            .map(|n| (n, lattice_sum(tau, n, ORIGIN, radius).1))
            .collect();
        Ok(ThetaTable {
            tau: tau.clone(),
            constants,
            gradients,
            radius,
            tail_bound: tail_bound(tau.min_imag_eigenvalue(), radius),
            tol: cfg.tol,
        })
    }

    pub fn tau(&self) -> &PeriodMatrix {
        &self.tau
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Bound on the truncation error of every stored value.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn constant(&self, m: Characteristic) -> Result<Complex64, ThetaError> {
        self.constants
            .get(&m)
            .copied()
            .ok_or(ThetaError::OddCharacteristic(m))
    }

    pub fn gradient(&self, n: Characteristic) -> Result<[Complex64; 3], ThetaError> {
        self.gradients
            .get(&n)
            .copied()
            .ok_or(ThetaError::EvenCharacteristic(n))
    }

    pub fn constants(&self) -> &BTreeMap<Characteristic, Complex64> {
        &self.constants
    }

    pub fn gradients(&self) -> &BTreeMap<Characteristic, [Complex64; 3]> {
        &self.gradients
    }

    /// A copy with every gradient multiplied by `s`.
    pub fn with_scaled_gradients(&self, s: Complex64) -> ThetaTable {
        let mut out = self.clone();
        for g in out.gradients.values_mut() {
            for v in g.iter_mut() {
                *v *= s;
            }
        }
        out
    }
}
