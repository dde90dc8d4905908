//! Numerical checks of the whole construction, collected into one report.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::builder::{base_matrix, rank_profile, Assembly};
use crate::nullwerte::{degeneracy_indicator, jacobi_residual, riemann_relation_check, RiemannRelation};
use crate::quartic::{extract_q, is_double_contact, minor_quartic, proportionality, restrict_to_line, HomogeneousQuartic};
use crate::theta::ThetaTable;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    /// Jacobi, Riemann and the two-way `X65` agreement.
    pub identity_tol: f64,
    pub x65_theta_tol: f64,
    /// Upper bound on `σ5/σ4` for the assembled matrix.
    pub rank_tol: f64,
    /// Lower bound on `σ5/σ4` for the unscaled matrix.
    pub base_rank_min: f64,
    pub minor_tol: f64,
    pub q_tol: f64,
    pub contact_tol: f64,
    /// Lower bound on `‖∇f‖` at the contact points.
    pub gradient_floor: f64,
    pub degeneracy_threshold: f64,
    pub rank_samples: usize,
    pub nonprincipal_minors: usize,
    /// Seed for the evaluation points and sampled minors.
    pub sample_seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            identity_tol: 1e-8,
            x65_theta_tol: 1e-6,
            rank_tol: 1e-8,
            base_rank_min: 1e-2,
            minor_tol: 1e-6,
            q_tol: 1e-8,
            contact_tol: 1e-6,
            gradient_floor: 1e-6,
            degeneracy_threshold: 1e-6,
            rank_samples: 5,
            nonprincipal_minors: 30,
            sample_seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Below,
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Worst value over the check's cases.
    pub value: f64,
    pub threshold: f64,
    /// `Below`: passes when `value < threshold`; `Above`: when `value > threshold`.
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, value: f64, threshold: f64, bound: Bound) -> Self {
        let passed = match bound {
            Bound::Below => value < threshold,
            Bound::Above => value > threshold,
        };
        Check {
            name: name.to_string(),
            value,
            threshold,
            bound,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiemannEntry {
    pub relation: String,
    pub signs: (i8, i8),
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContactEntry {
    pub residual: f64,
    pub pair_gap: f64,
    /// Unit-norm contact points in the plane.
    pub points: [[Complex64; 3]; 2],
    pub min_gradient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
    pub degeneracy_indicator: f64,
    pub jacobi: BTreeMap<String, f64>,
    pub riemann: Vec<RiemannEntry>,
    pub x65_discrepancy: f64,
    pub x65_theta_residual: f64,
    pub rank_ratios: Vec<Option<f64>>,
    pub base_rank_ratios: Vec<Option<f64>>,
    /// Largest pairwise residual among the 70 principal minors.
    pub principal_minor_max: f64,
    /// Residual of each principal minor against the leading one, keyed by rows.
    pub principal_minors: BTreeMap<String, f64>,
    pub nonprincipal_minor_max: f64,
    pub q_residual: f64,
    pub bitangency: BTreeMap<String, ContactEntry>,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Deterministic evaluation points with entries uniform in the unit square.
pub fn sample_points(seed: u64, count: usize) -> Vec<[Complex64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            [0; 3].map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        })
        .collect()
}

fn worst(vals: impl IntoIterator<Item = f64>) -> f64 {
    // NaN propagates as a failure
    vals.into_iter()
        .fold(0.0, |a: f64, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn worst_ratio(r: &[Option<f64>], above: bool) -> f64 {
    let vals = r.iter().map(|v| v.unwrap_or(f64::NAN));
    if above {
        vals.fold(f64::INFINITY, |a, b| if b.is_nan() { f64::NAN } else { a.min(b) })
    } else {
        worst(vals)
    }
}

fn subsets4(n: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// Runs every check. Failures are recorded in the report, never raised.
pub fn verify_all(table: &ThetaTable, asm: &Assembly, cfg: &VerifyConfig) -> VerificationReport {
    let mut checks = Vec::new();
    let layout = asm.merged.layout().clone();

    let degeneracy = degeneracy_indicator(table);
    checks.push(Check::new("degeneracy", degeneracy, cfg.degeneracy_threshold, Bound::Above));

    let mut jacobi = BTreeMap::new();
    for i in 0..8 {
        for j in i + 1..8 {
            for k in j + 1..8 {
                let (a, b, c) = (layout.entry(i, j), layout.entry(j, k), layout.entry(i, k));
                let r = jacobi_residual(table, a, b, c).unwrap_or(f64::NAN);
                jacobi.insert(format!("{}-{}-{}", a.label_string(), b.label_string(), c.label_string()), r);
            }
        }
    }
    checks.push(Check::new("jacobi", worst(jacobi.values().copied()), cfg.identity_tol, Bound::Below));

    let riemann: Vec<RiemannEntry> = RiemannRelation::reference()
        .iter()
        .map(|rel| match riemann_relation_check(table, rel) {
            Ok(chk) => RiemannEntry {
                relation: rel.label(),
                signs: chk.signs,
                relative: chk.relative,
            },
            Err(_) => RiemannEntry {
                relation: rel.label(),
                signs: (0, 0),
                relative: f64::NAN,
            },
        })
        .collect();
    checks.push(Check::new(
        "riemann",
        worst(riemann.iter().map(|r| r.relative)),
        cfg.identity_tol,
        Bound::Below,
    ));

    let x65_discrepancy = asm.x.x65_discrepancy();
    checks.push(Check::new("x65_two_ways", x65_discrepancy, cfg.identity_tol, Bound::Below));
    let x65_theta_residual = match crate::builder::x65_theta_modulus(table) {
        Ok(m) => (asm.x.x65.norm() - m).abs() / m,
        Err(_) => f64::NAN,
    };
    checks.push(Check::new("x65_theta", x65_theta_residual, cfg.x65_theta_tol, Bound::Below));

    let zs = sample_points(cfg.sample_seed, cfg.rank_samples);
    let rank_ratios = rank_profile(&asm.merged, &zs);
    checks.push(Check::new("rank_assembled", worst_ratio(&rank_ratios, false), cfg.rank_tol, Bound::Below));
    let base_rank_ratios = match base_matrix(table) {
        Ok(b) => rank_profile(&b, &zs),
        Err(_) => vec![None; zs.len()],
    };
    checks.push(Check::new(
        "rank_base",
        worst_ratio(&base_rank_ratios, true),
        cfg.base_rank_min,
        Bound::Above,
    ));

    let subsets = subsets4(8);
    let principal: Vec<Option<HomogeneousQuartic>> = subsets
        .iter()
        .map(|&s| minor_quartic(&asm.merged, s, s).ok())
        .collect();
    let mut principal_minor_max: f64 = 0.0;
    let mut principal_minors = BTreeMap::new();
    for (a, qa) in principal.iter().enumerate() {
        for qb in principal.iter().skip(a + 1) {
            let r = match (qa, qb) {
                (Some(x), Some(y)) => proportionality(x.coeffs(), y.coeffs()),
                _ => f64::NAN,
            };
            principal_minor_max = worst([principal_minor_max, r]);
        }
    }
    let lead = principal[0].clone();
    for (s, q) in subsets.iter().zip(&principal) {
        let r = match (&lead, q) {
            (Some(x), Some(y)) => proportionality(y.coeffs(), x.coeffs()),
            _ => f64::NAN,
        };
        principal_minors.insert(s.iter().map(|i| i.to_string()).collect::<String>(), r);
    }
    checks.push(Check::new("principal_minors", principal_minor_max, cfg.minor_tol, Bound::Below));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sample_seed ^ 0x4d1);
    let mut nonprincipal_minor_max: f64 = 0.0;
    let mut taken = 0;
    while taken < cfg.nonprincipal_minors {
        let rows = subsets[rng.random_range(0..subsets.len())];
        let cols = subsets[rng.random_range(0..subsets.len())];
        if rows == cols {
            continue;
        }
        taken += 1;
        let r = match (&lead, minor_quartic(&asm.merged, rows, cols)) {
            (Some(x), Ok(y)) => proportionality(y.coeffs(), x.coeffs()),
            // a vanishing minor is allowed only if it is structurally zero, which
            // never happens for a rank-4 matrix with nonzero off-diagonal forms
            _ => f64::NAN,
        };
        nonprincipal_minor_max = worst([nonprincipal_minor_max, r]);
    }
    checks.push(Check::new("nonprincipal_minors", nonprincipal_minor_max, cfg.minor_tol, Bound::Below));

    let quartic = extract_q(table).and_then(|q| q.quartic());
    let q_residual = match (&quartic, &lead) {
        (Ok(q), Some(x)) => worst(principal.iter().map(|p| match p {
            Some(p) => proportionality(q.coeffs(), p.coeffs()),
            None => f64::NAN,
        }))
        .max(proportionality(q.coeffs(), x.coeffs())),
        _ => f64::NAN,
    };
    checks.push(Check::new("det_q", q_residual, cfg.q_tol, Bound::Below));

    let mut bitangency = BTreeMap::new();
    if let Ok(f) = &quartic {
        for (i, j, n) in layout.off_diagonal() {
            let line = asm.merged.entry(i, j);
            let entry = match restrict_to_line(f, line) {
                Ok(r) => {
                    let dc = is_double_contact(&r.binary, cfg.contact_tol);
                    let points = dc.points.map(|p| r.point(p[0], p[1]));
                    let min_gradient = points
                        .iter()
                        .map(|&z| {
                            f.form()
                                .gradient_at(z)
                                .iter()
                                .map(|g| g.norm_sqr())
                                .sum::<f64>()
                                .sqrt()
                        })
                        .fold(f64::INFINITY, f64::min);
                    ContactEntry {
                        residual: dc.residual,
                        pair_gap: dc.pair_gap,
                        points,
                        min_gradient,
                    }
                }
                Err(_) => ContactEntry {
                    residual: f64::NAN,
                    pair_gap: f64::NAN,
                    points: [[Complex64::new(0.0, 0.0); 3]; 2],
                    min_gradient: f64::NAN,
                },
            };
            bitangency.insert(n.label_string(), entry);
        }
    }
    let contact_worst = if bitangency.len() == 28 {
        worst(bitangency.values().map(|e| e.residual))
    } else {
        f64::NAN
    };
    checks.push(Check::new("bitangency", contact_worst, cfg.contact_tol, Bound::Below));
    let min_gradient = if bitangency.len() == 28 {
        bitangency
            .values()
            .map(|e| e.min_gradient)
            .fold(f64::INFINITY, |a, b| if b.is_nan() { f64::NAN } else { a.min(b) })
    } else {
        f64::NAN
    };
    checks.push(Check::new("nonsingular", min_gradient, cfg.gradient_floor, Bound::Above));

    let passed = checks.iter().all(|c| c.passed);
    VerificationReport {
        passed,
        checks,
        degeneracy_indicator: degeneracy,
        jacobi,
        riemann,
        x65_discrepancy,
        x65_theta_residual,
        rank_ratios,
        base_rank_ratios,
        principal_minor_max,
        principal_minors,
        nonprincipal_minor_max,
        q_residual,
        bitangency,
    }
}
