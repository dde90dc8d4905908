//! Seeded period matrices, the end-to-end run and its JSON report, and the
//! exact combinatorial self-test.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::aronhold::{enumerate_aronhold_sets, AronholdSet, CharMatrix};
use crate::builder::{assemble_full, BuildError, MergeConstants, XCoefficients};
use crate::characteristic::{triple_sign, Characteristic};
use crate::nullwerte::degeneracy_indicator;
use crate::period::PeriodMatrix;
use crate::quartic::{extract_q, HomogeneousQuartic, Normalization, QuarticError};
use crate::theta::{ThetaError, ThetaTable, TruncationConfig};
use crate::verify::{verify_all, VerificationReport, VerifyConfig};

pub const DEFAULT_DEGENERACY_THRESHOLD: f64 = 1e-6;
pub const MAX_DRAWS: u32 = 100;
pub const MAX_SCALE: f64 = 0.5;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("scale {0} outside [0, {MAX_SCALE}]")]
    InvalidScale(f64),
    #[error("no acceptable period matrix after {attempts} draws")]
    RetriesExhausted { attempts: u32 },
    #[error(transparent)]
    Theta(#[from] ThetaError),
}

impl SampleError {
    pub fn exit_code(&self) -> i32 {
        match self {
            SampleError::InvalidScale(_) => EXIT_INPUT,
            SampleError::RetriesExhausted { .. } => EXIT_DEGENERATE,
            SampleError::Theta(ThetaError::InvalidConfig(_)) => EXIT_INPUT,
            SampleError::Theta(_) => EXIT_NUMERICAL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomTau {
    pub tau: PeriodMatrix,
    /// Draws used, including the accepted one.
    pub attempts: u32,
    pub degeneracy_indicator: f64,
}

/// `τ = i·I + scale·(S_re + i·S_im)` with symmetric `S_re`, `S_im` whose
/// upper-triangle entries are uniform in `[-1, 1]`, redrawn until `Im τ` is
/// positive definite and the degeneracy indicator exceeds `threshold`.
pub fn random_tau(
    seed: u64,
    scale: f64,
    threshold: f64,
    truncation: &TruncationConfig,
) -> Result<RandomTau, SampleError> {
    if !(0.0..=MAX_SCALE).contains(&scale) {
        return Err(SampleError::InvalidScale(scale));
    }
    truncation.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=MAX_DRAWS {
        let mut draw = || {
            let mut s = [[0.0f64; 3]; 3];
            for i in 0..3 {
                for j in i..3 {
                    s[i][j] = rng.random_range(-1.0..=1.0);
                    s[j][i] = s[i][j];
                }
            }
            s
        };
        let (re, im) = (draw(), draw());
        let mut tau = [[Complex64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let diag = if i == j { 1.0 } else { 0.0 };
                tau[i][j] = Complex64::new(scale * re[i][j], diag + scale * im[i][j]);
            }
        }
        let Ok(tau) = PeriodMatrix::new(tau) else {
            continue;
        };
        let table = match ThetaTable::build(&tau, truncation) {
            Ok(t) => t,
            Err(ThetaError::RadiusOverflow { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        let ind = degeneracy_indicator(&table);
        if ind > threshold {
            return Ok(RandomTau {
                tau,
                attempts: attempt,
                degeneracy_indicator: ind,
            });
        }
    }
    Err(SampleError::RetriesExhausted { attempts: MAX_DRAWS })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub truncation: TruncationConfig,
    pub degeneracy_threshold: f64,
    pub checks: bool,
    #[serde(skip)]
    pub verify: VerifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            truncation: TruncationConfig::default(),
            degeneracy_threshold: DEFAULT_DEGENERACY_THRESHOLD,
            checks: true,
            verify: VerifyConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn with_tol(tol: f64) -> Self {
        RunConfig {
            truncation: TruncationConfig::with_tol(tol),
            ..RunConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("degenerate period matrix: indicator {indicator:e} <= threshold {threshold:e}")]
    Degenerate { indicator: f64, threshold: f64 },
    #[error("degenerate construction: {0}")]
    DegenerateConstruction(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Input(_) => EXIT_INPUT,
            PipelineError::Degenerate { .. } | PipelineError::DegenerateConstruction(_) => EXIT_DEGENERATE,
            PipelineError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<ThetaError> for PipelineError {
    fn from(e: ThetaError) -> Self {
        match e {
            ThetaError::InvalidConfig(_) => PipelineError::Input(e.to_string()),
            _ => PipelineError::Numerical(e.to_string()),
        }
    }
}

impl From<BuildError> for PipelineError {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::SingularSystem { .. } | BuildError::DegenerateDenominator(_) => {
                PipelineError::DegenerateConstruction(e.to_string())
            }
            BuildError::Theta(t) => t.into(),
            BuildError::RowOutsideBlock { .. } => PipelineError::Numerical(e.to_string()),
        }
    }
}

impl From<QuarticError> for PipelineError {
    fn from(e: QuarticError) -> Self {
        match e {
            QuarticError::ZeroMinor { .. } => PipelineError::DegenerateConstruction(e.to_string()),
            QuarticError::Build(b) => b.into(),
            _ => PipelineError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSection {
    /// Where τ came from, e.g. a file path or `seed 7, scale 0.1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub tau: Vec<Vec<[f64; 2]>>,
    #[serde(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaSection {
    pub radius: u32,
    pub tail_bound: f64,
    pub min_imag_eigenvalue: f64,
    pub degeneracy_indicator: f64,
    /// Even theta constants keyed by label.
    pub constants: BTreeMap<String, Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixSection {
    pub layout: Vec<Vec<String>>,
    pub merged_scalars: [[Complex64; 8]; 8],
    pub normalized_scalars: [[Complex64; 8]; 8],
    pub merge_constants: MergeConstants,
    pub x: XCoefficients,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuarticSection {
    pub monomials: Vec<String>,
    pub coefficients: Vec<Complex64>,
    pub normalization: Normalization,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: ConfigSection,
    pub theta: ThetaSection,
    /// Gradient coefficients of the 28 odd theta functions keyed by label.
    pub bitangents: BTreeMap<String, [Complex64; 3]>,
    pub matrix: MatrixSection,
    pub quartic: QuarticSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `EXIT_PASS`, or `EXIT_VERIFICATION` when a check failed.
    pub fn exit_code(&self) -> i32 {
        match &self.verification {
            Some(v) if !v.passed => EXIT_VERIFICATION,
            _ => EXIT_PASS,
        }
    }
}

/// Runs the whole construction on `tau`.
pub fn run(tau: &PeriodMatrix, cfg: &RunConfig, source: Option<String>) -> Result<Report, PipelineError> {
    if !(cfg.degeneracy_threshold >= 0.0) {
        return Err(PipelineError::Input("degeneracy threshold must be nonnegative".into()));
    }
    let table = ThetaTable::build(tau, &cfg.truncation)?;
    let indicator = degeneracy_indicator(&table);
    if !(indicator > cfg.degeneracy_threshold) {
        return Err(PipelineError::Degenerate {
            indicator,
            threshold: cfg.degeneracy_threshold,
        });
    }
    let asm = assemble_full(&table)?;
    let quartic: HomogeneousQuartic = extract_q(&table)?.quartic()?;
    let mut verify_cfg = cfg.verify.clone();
    verify_cfg.degeneracy_threshold = cfg.degeneracy_threshold;
    let verification = cfg.checks.then(|| verify_all(&table, &asm, &verify_cfg));

    let layout = asm.merged.layout();
    Ok(Report {
        config: ConfigSection {
            source,
            tau: tau.to_pairs(),
            run: cfg.clone(),
        },
        theta: ThetaSection {
            radius: table.radius(),
            tail_bound: table.tail_bound(),
            min_imag_eigenvalue: tau.min_imag_eigenvalue(),
            degeneracy_indicator: indicator,
            constants: table
                .constants()
                .iter()
                .map(|(m, v)| (m.label_string(), *v))
                .collect(),
        },
        bitangents: table
            .gradients()
            .iter()
            .map(|(n, g)| (n.label_string(), *g))
            .collect(),
        matrix: MatrixSection {
            layout: (0..8)
                .map(|i| (0..8).map(|j| layout.entry(i, j).label_string()).collect())
                .collect(),
            merged_scalars: *asm.merged.scalars(),
            normalized_scalars: *asm.normalized.scalars(),
            merge_constants: asm.constants,
            x: asm.x,
        },
        quartic: QuarticSection {
            monomials: HomogeneousQuartic::monomial_labels(),
            coefficients: quartic.coeffs().to_vec(),
            normalization: quartic.normalization(),
        },
        verification,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelftestLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Exhaustive combinatorial checks plus a comparison of the generated
/// characteristic table against `golden`.
pub fn selftest(golden: &str) -> Vec<SelftestLine> {
    let mut out = Vec::new();
    let mut push = |name, passed, detail: String| out.push(SelftestLine { name, passed, detail });

    let (evens, odds) = (Characteristic::evens().count(), Characteristic::odds().count());
    push("parity_counts", (evens, odds) == (36, 28), format!("{evens} even, {odds} odd"));

    let all_odds: Vec<Characteristic> = Characteristic::odds().collect();
    let (mut azy, mut syz) = (0, 0);
    for i in 0..all_odds.len() {
        for j in i + 1..all_odds.len() {
            for k in j + 1..all_odds.len() {
                if triple_sign(all_odds[i], all_odds[j], all_odds[k]) == -1 {
                    azy += 1;
                } else {
                    syz += 1;
                }
            }
        }
    }
    push("triple_counts", (azy, syz) == (2016, 1260), format!("{azy} azygetic, {syz} syzygetic"));

    let sets = enumerate_aronhold_sets();
    push("aronhold_sets", sets.len() == 288, format!("{} sets", sets.len()));
    let mut per_base: BTreeMap<Characteristic, usize> = BTreeMap::new();
    for s in &sets {
        *per_base.entry(s.base()).or_default() += 1;
    }
    let uniform = per_base.len() == 36 && per_base.values().all(|&n| n == 8);
    let counts: Vec<usize> = per_base.values().copied().collect();
    push(
        "sets_per_base",
        uniform,
        format!("{} bases, counts {:?}", per_base.len(), counts.iter().min().zip(counts.iter().max())),
    );

    let generated = CharMatrix::new(&AronholdSet::reference());
    match CharMatrix::parse_table(golden) {
        Err(e) => push("golden_table", false, format!("unreadable: {e}")),
        Ok(g) => {
            let mismatch = (0..8)
                .flat_map(|i| (0..8).map(move |k| (i, k)))
                .find(|&(i, k)| g.entry(i, k) != generated.entry(i, k));
            match mismatch {
                None => push("golden_table", true, "64 entries match".into()),
                Some((i, k)) => push(
                    "golden_table",
                    false,
                    format!(
                        "entry ({i},{k}): golden {} vs generated {}",
                        g.entry(i, k),
                        generated.entry(i, k)
                    ),
                ),
            }
        }
    }
    out
}
