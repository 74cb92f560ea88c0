//! Property-suite runner: every identity of the library checked at a named
//! tolerance, with pass/fail/skipped records and deterministic reports.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use clifft_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Roots,
    Split,
    Cft,
    Theorems,
    Convolution,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Core,
        Suite::Roots,
        Suite::Split,
        Suite::Cft,
        Suite::Theorems,
        Suite::Convolution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Roots => "roots",
            Suite::Split => "split",
            Suite::Cft => "cft",
            Suite::Theorems => "theorems",
            Suite::Convolution => "convolution",
        }
    }

    /// Independent random stream per suite.
    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

/// A signature together with a cyclic grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCase {
    pub p: usize,
    pub q: usize,
    pub dims: Vec<usize>,
}

impl GridCase {
    pub fn new(p: usize, q: usize, dims: &[usize]) -> Self {
        Self {
            p,
            q,
            dims: dims.to_vec(),
        }
    }

    fn signature(&self) -> Result<AlgebraSignature> {
        AlgebraSignature::new(self.p, self.q)
    }

    fn label(&self) -> String {
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        format!("Cl({},{}) {}", self.p, self.q, dims.join("x"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub seed: u64,
    pub suites: BTreeSet<Suite>,
    /// Replaces every check's tolerance when set.
    pub tolerance: Option<f64>,
    /// Signatures with `p + q` up to this bound run the algebra, sampling and
    /// split checks.
    pub max_dim: usize,
    /// Bound on `p + q` for the ring classification table.
    pub classify_max_dim: usize,
    pub algebra_samples: usize,
    pub roots_per_signature: usize,
    /// Samples per axis of the two-dimensional root family grids.
    pub family_grid: usize,
    pub split_samples: usize,
    pub transform_cases: Vec<GridCase>,
    pub transform_pairs: usize,
    pub theorem_pairs: usize,
    pub offsets: usize,
    /// Quadrature points per axis for the dilation checks.
    pub dilation_points: usize,
    /// Quadrature points per axis for the derivative and moment checks.
    pub moment_points: usize,
    pub convolution_cases: Vec<GridCase>,
    pub convolution_pairs: usize,
    /// Run the wall-time comparison of the FFT and direct paths. Its outcome
    /// depends on the machine, so it is the one check that is not
    /// reproducible from the seed.
    pub timing: bool,
    pub timing_case: GridCase,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 2012,
            suites: Suite::ALL.into_iter().collect(),
            tolerance: None,
            max_dim: 4,
            classify_max_dim: 6,
            algebra_samples: 1000,
            roots_per_signature: 100,
            family_grid: 21,
            split_samples: 200,
            transform_cases: vec![
                GridCase::new(0, 2, &[16, 16]),
                GridCase::new(3, 0, &[8, 8, 8]),
            ],
            transform_pairs: 10,
            theorem_pairs: 3,
            offsets: 5,
            dilation_points: 256,
            moment_points: 128,
            convolution_cases: vec![
                GridCase::new(0, 2, &[16, 16]),
                GridCase::new(3, 0, &[8, 8, 8]),
            ],
            convolution_pairs: 20,
            timing: true,
            timing_case: GridCase::new(3, 0, &[16, 16, 16]),
        }
    }
}

impl SuiteConfig {
    /// A reduced matrix for quick runs.
    pub fn smoke() -> Self {
        Self {
            max_dim: 3,
            classify_max_dim: 6,
            algebra_samples: 50,
            roots_per_signature: 5,
            family_grid: 5,
            split_samples: 10,
            transform_cases: vec![
                GridCase::new(0, 2, &[4, 4]),
                GridCase::new(3, 0, &[2, 3, 2]),
            ],
            transform_pairs: 2,
            theorem_pairs: 1,
            offsets: 2,
            dilation_points: 64,
            moment_points: 48,
            convolution_cases: vec![GridCase::new(0, 2, &[4, 3])],
            convolution_pairs: 2,
            timing: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if self.suites.is_empty() {
            return bad("no suites selected");
        }
        if let Some(t) = self.tolerance {
            if !(t >= 0.0) {
                return bad("tolerance must be a non-negative number");
            }
        }
        if self.max_dim == 0 || self.max_dim > 6 || self.classify_max_dim == 0 {
            return bad("max_dim must lie in 1..=6");
        }
        if self.classify_max_dim > clifft_core::algebra::MAX_DIM {
            return bad("classify_max_dim exceeds the supported dimension");
        }
        if self.dilation_points < 16 || self.moment_points < 16 {
            return bad("quadrature checks need at least 16 points per axis");
        }
        for case in self
            .transform_cases
            .iter()
            .chain(&self.convolution_cases)
            .chain(std::iter::once(&self.timing_case))
        {
            let sig = case.signature()?;
            if case.dims.len() != sig.dim() || case.dims.contains(&0) {
                return bad(&format!(
                    "grid {:?} does not fit Cl({},{})",
                    case.dims, case.p, case.q
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// The identity or property under test.
    pub reference: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub max_error: Option<f64>,
    pub tolerance: f64,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    /// Checks whose name starts with `prefix`.
    pub fn group<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a CheckRecord> + 'a {
        self.checks
            .iter()
            .filter(move |c| c.name.starts_with(prefix))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with every `runtime_ms` zeroed, for reproducibility comparisons.
    pub fn to_json_without_runtime(&self) -> String {
        let mut copy = self.clone();
        copy.checks.iter_mut().for_each(|c| c.runtime_ms = 0.0);
        copy.to_json()
    }

    pub fn table(&self) -> String {
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(4)
            .max(4);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:<7}  {:>10}  {:>9}  {:>9}",
            "name", "status", "max_error", "tolerance", "ms"
        );
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skipped",
            };
            let err = c.max_error.map_or("-".to_string(), |e| format!("{e:.3e}"));
            let _ = write!(
                out,
                "{:<width$}  {:<7}  {:>10}  {:>9.1e}  {:>9.1}",
                c.name, status, err, c.tolerance, c.runtime_ms
            );
            if let Some(reason) = &c.reason {
                let _ = write!(out, "  ({reason})");
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{} passed, {} failed, {} skipped",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped)
        );
        out
    }
}

enum Outcome {
    Measured(f64),
    Skipped(String),
}

struct Runner<'a> {
    config: &'a SuiteConfig,
    records: Vec<CheckRecord>,
}

impl Runner<'_> {
    fn check(
        &mut self,
        name: String,
        reference: &str,
        tolerance: f64,
        body: impl FnOnce() -> Result<Outcome>,
    ) {
        let tolerance = self.config.tolerance.unwrap_or(tolerance);
        let start = Instant::now();
        let outcome = body();
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        let (status, reason, max_error) = match outcome {
            Ok(Outcome::Measured(e)) if e <= tolerance => (Status::Pass, None, Some(e)),
            Ok(Outcome::Measured(e)) => (Status::Fail, None, Some(e)),
            Ok(Outcome::Skipped(why)) => (Status::Skipped, Some(why), None),
            Err(e) => (Status::Fail, Some(format!("error: {e}")), None),
        };
        self.records.push(CheckRecord {
            name,
            reference: reference.to_string(),
            status,
            reason,
            max_error: max_error.map(|e| if e.is_nan() { f64::INFINITY } else { e }),
            tolerance,
            runtime_ms,
        });
    }

    fn rng(&self, suite: Suite) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(suite.stream());
        rng
    }
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let mut runner = Runner {
        config,
        records: Vec::new(),
    };
    for suite in &config.suites {
        match suite {
            Suite::Core => core_checks(&mut runner),
            Suite::Roots => root_checks(&mut runner),
            Suite::Split => split_checks(&mut runner),
            Suite::Cft => transform_checks(&mut runner),
            Suite::Theorems => theorem_checks(&mut runner),
            Suite::Convolution => convolution_checks(&mut runner),
        }
    }
    let mut checks = runner.records;
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(SuiteReport {
        seed: config.seed,
        checks,
    })
}

fn signatures(max_dim: usize) -> Vec<AlgebraSignature> {
    (1..=max_dim)
        .flat_map(|n| (0..=n).rev().map(move |p| (p, n - p)))
        .map(|(p, q)| AlgebraSignature::new(p, q).expect("small signature"))
        .collect()
}

fn rel(a: &Multivector, b: &Multivector) -> f64 {
    a.distance(b) / a.norm().max(b.norm()).max(1.0)
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |m, v| if v > m || v.is_nan() { v } else { m })
}

fn core_checks(run: &mut Runner) {
    let samples = run.config.algebra_samples;
    let mut rng = run.rng(Suite::Core);
    for sig in signatures(run.config.max_dim) {
        let seed: u64 = rng.random();
        let draw = move || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .map(|_| {
                    (
                        Multivector::random(sig, &mut rng),
                        Multivector::random(sig, &mut rng),
                        Multivector::random(sig, &mut rng),
                    )
                })
                .collect::<Vec<_>>()
        };
        let triples = draw();
        run.check(
            format!("core/associativity {sig}"),
            "associativity of the geometric product",
            1e-12,
            || {
                Ok(Outcome::Measured(max_of(triples.iter().map(
                    |(a, b, c)| {
                        let left = &(a * b) * c;
                        let right = a * &(b * c);
                        left.distance(&right) / (a.norm() * b.norm() * c.norm()).max(1e-300)
                    },
                ))))
            },
        );
        run.check(
            format!("core/anticommutation {sig}"),
            "basis vectors anticommute and square to their signature",
            1e-12,
            || {
                let mut worst: f64 = 0.0;
                for i in 1..=sig.dim() {
                    for j in 1..=sig.dim() {
                        let (ei, ej) = (
                            Multivector::basis_vector(sig, i)?,
                            Multivector::basis_vector(sig, j)?,
                        );
                        let sum = &(&ei * &ej) + &(&ej * &ei);
                        let expected = if i == j { 2.0 * sig.square(i) } else { 0.0 };
                        worst = worst.max(sum.distance(&Multivector::scalar(sig, expected)));
                    }
                }
                Ok(Outcome::Measured(worst))
            },
        );
        run.check(
            format!("core/involutions {sig}"),
            "reverse, bar and principal reverse are involutive anti-automorphisms",
            1e-12,
            || {
                Ok(Outcome::Measured(max_of(triples.iter().map(
                    |(a, b, _)| {
                        let ab = a * b;
                        let scale = (a.norm() * b.norm()).max(1e-300);
                        [
                            rel(&a.reverse().reverse(), a),
                            rel(&a.bar().bar(), a),
                            rel(&a.principal_reverse().principal_reverse(), a),
                            ab.reverse().distance(&(&b.reverse() * &a.reverse())) / scale,
                            ab.principal_reverse()
                                .distance(&(&b.principal_reverse() * &a.principal_reverse()))
                                / scale,
                        ]
                        .into_iter()
                        .fold(0.0, f64::max)
                    },
                ))))
            },
        );
        run.check(
            format!("core/scalar-symmetry {sig}"),
            "Sc(xy) = Sc(yx)",
            1e-12,
            || {
                Ok(Outcome::Measured(max_of(triples.iter().map(
                    |(a, b, _)| {
                        ((a * b).scalar_part() - (b * a).scalar_part()).abs()
                            / (a.norm() * b.norm()).max(1e-300)
                    },
                ))))
            },
        );
    }
}

/// Matrix algebra of Cl(p,q) for `p + q <= 6`, written out row by row.
const RING_TABLE: [&[&str]; 7] = [
    // q = 0..=6 for p = 0
    &[
        "-", "M(1,C)", "M(1,H)", "M(1,H2)", "M(2,H)", "M(4,C)", "M(8,R)",
    ],
    &["M(1,R2)", "M(2,R)", "M(2,C)", "M(2,H)", "M(2,H2)", "M(4,H)"],
    &["M(2,R)", "M(2,R2)", "M(4,R)", "M(4,C)", "M(4,H)"],
    &["M(2,C)", "M(4,R)", "M(4,R2)", "M(8,R)"],
    &["M(2,H)", "M(4,C)", "M(8,R)"],
    &["M(2,H2)", "M(4,H)"],
    &["M(4,H)"],
];

fn ring_name(class: &RingClass) -> String {
    let ring = match class.ring {
        Ring::R => "R",
        Ring::R2 => "R2",
        Ring::C => "C",
        Ring::H => "H",
        Ring::H2 => "H2",
    };
    format!("M({},{ring})", class.matrix_size())
}

/// Blades squaring to -1.
fn blade_roots(sig: AlgebraSignature) -> Vec<RootOfMinusOne> {
    (1..sig.blade_count())
        .filter_map(|mask| {
            let b = Multivector::blade(sig, BladeIndex(mask), 1.0).ok()?;
            verify_root(&b, 1e-14).ok()
        })
        .collect()
}

fn root_checks(run: &mut Runner) {
    let max = run.config.classify_max_dim.min(RING_TABLE.len() - 1);
    run.check(
        format!("roots/classification p+q<={max}"),
        "ring classification by (p - q) mod 8",
        0.0,
        || {
            let mut mismatches = 0usize;
            for (p, row) in RING_TABLE.iter().enumerate() {
                for (q, expected) in row.iter().enumerate() {
                    if p + q == 0 || p + q > max {
                        continue;
                    }
                    let class = classify_algebra(AlgebraSignature::new(p, q)?);
                    if ring_name(&class) != *expected {
                        mismatches += 1;
                    }
                }
            }
            Ok(Outcome::Measured(mismatches as f64))
        },
    );
    run.check(
        "roots/exceptional e123 Cl(3,0)".into(),
        "exceptional roots have Spec(f) = k/d",
        0.0,
        || {
            let sig = AlgebraSignature::new(3, 0)?;
            let root = verify_root(&Multivector::pseudoscalar(sig), 1e-12)?;
            let ok = root.kind() == RootKind::Exceptional { k: 1 } && root.spec() == 1.0;
            Ok(Outcome::Measured(if ok { 0.0 } else { 1.0 }))
        },
    );

    let count = run.config.roots_per_signature;
    let mut rng = run.rng(Suite::Roots);
    for sig in signatures(run.config.max_dim) {
        let base: u64 = rng.random();
        run.check(
            format!("roots/sampled {sig}"),
            "conjugates a f a^-1 of a root are roots with Sc(f) = 0",
            1e-10,
            || {
                if let Err(Error::NoCanonicalRoot { .. }) = canonical_root(sig) {
                    return Ok(Outcome::Skipped(format!("{sig} has no square root of -1")));
                }
                let mut worst: f64 = 0.0;
                for i in 0..count {
                    let root = sample_root(sig, base.wrapping_add(i as u64), None)?;
                    let residual = root_residual(root.value());
                    worst = worst.max(residual).max(root.value().scalar_part().abs());
                }
                Ok(Outcome::Measured(worst))
            },
        );
    }

    let n = run.config.family_grid.max(2);
    for (p, q, extent) in [(2, 0, 2.0), (1, 1, 3.0), (0, 2, 1.0)] {
        let sig = AlgebraSignature::new(p, q).expect("n = 2");
        run.check(
            format!("roots/family {sig}"),
            "n = 2 root family b1 e1 + b2 e2 + beta e12",
            1e-10,
            || {
                let mut worst: f64 = 0.0;
                let mut admissible = 0usize;
                for i in 0..n {
                    for j in 0..n {
                        let b1 = -extent + 2.0 * extent * i as f64 / (n - 1) as f64;
                        let b2 = -extent + 2.0 * extent * j as f64 / (n - 1) as f64;
                        if family_n2_beta_squared(sig, b1, b2) < 0.0 {
                            continue;
                        }
                        admissible += 1;
                        for branch in [Branch::Positive, Branch::Negative] {
                            let root = root_family_n2(sig, b1, b2, branch)?;
                            let certified = verify_root(root.value(), 1e-10)?;
                            worst = worst.max(certified.residual());
                        }
                    }
                }
                if admissible == 0 {
                    return Ok(Outcome::Skipped("no admissible grid point".into()));
                }
                Ok(Outcome::Measured(worst))
            },
        );
    }
}

fn split_checks(run: &mut Runner) {
    let samples = run.config.split_samples;
    let mut rng = run.rng(Suite::Split);
    for sig in signatures(run.config.max_dim) {
        let seed: u64 = rng.random();
        if canonical_root(sig).is_err() {
            run.check(
                format!("split/identities {sig}"),
                "x = x+ + x-, f x± g = ±x±",
                1e-10,
                || Ok(Outcome::Skipped(format!("{sig} has no square root of -1"))),
            );
            continue;
        }
        let prepared = (|| -> Result<_> {
            let f = sample_root(sig, seed, None)?;
            let g = sample_root(sig, seed ^ 0x9e37_79b9, None)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xs: Vec<Multivector> = (0..samples)
                .map(|_| Multivector::random(sig, &mut rng))
                .collect();
            Ok((f, g, xs))
        })();
        let (f, g, xs) = match prepared {
            Ok(v) => v,
            Err(e) => {
                run.check(
                    format!("split/identities {sig}"),
                    "x = x+ + x-",
                    1e-10,
                    || Err(e),
                );
                continue;
            }
        };
        let pairs: Vec<SplitPair> = xs
            .iter()
            .map(|x| split_pm(x, &f, &g).expect("same signature"))
            .collect();

        // rounding in f x g and its relatives is relative to |x| |f| |g|,
        // which sampled roots can make far larger than |x±|
        let root_scale = 1.0 + f.value().norm().max(g.value().norm());
        let magnitude = |x: &Multivector| x.norm().max(1e-300) * root_scale * root_scale;

        run.check(
            format!("split/reconstruction {sig}"),
            "x = x+ + x- up to rounding of the two halves",
            4.0 * f64::EPSILON,
            || {
                Ok(Outcome::Measured(max_of(xs.iter().zip(&pairs).map(
                    |(x, pair)| {
                        let scale = pair.plus.norm().max(pair.minus.norm()).max(1.0);
                        pair.sum().distance(x) / scale
                    },
                ))))
            },
        );
        run.check(
            format!("split/eigen-sign {sig}"),
            "f x± g = ±x±",
            1e-10,
            || {
                Ok(Outcome::Measured(max_of(xs.iter().zip(&pairs).map(
                    |(x, pair)| {
                        let plus = &(f.value() * &pair.plus) * g.value();
                        let minus = &(f.value() * &pair.minus) * g.value();
                        let mag = magnitude(x);
                        plus.distance(&pair.plus).max(minus.distance(&-&pair.minus)) / mag
                    },
                ))))
            },
        );
        run.check(
            format!("split/idempotent-form {sig}"),
            "x± = x+f (1 ± fg)/2 + x-f (1 ∓ fg)/2",
            1e-10,
            || {
                let fg = f.value() * g.value();
                let one = Multivector::one(sig);
                let up = (&one + &fg) * 0.5;
                let down = (&one - &fg) * 0.5;
                let mut worst: f64 = 0.0;
                for (x, pair) in xs.iter().zip(&pairs) {
                    let (xp, xm) = split_commuting(x, &f)?;
                    let mag = magnitude(x);
                    worst = worst
                        .max((&(&xp * &up) + &(&xm * &down)).distance(&pair.plus) / mag)
                        .max((&(&xp * &down) + &(&xm * &up)).distance(&pair.minus) / mag);
                }
                Ok(Outcome::Measured(worst))
            },
        );
        run.check(
            format!("split/exponential-steering {sig}"),
            "exp(fα) x± exp(gβ) = x± exp(g(β ∓ α)) = exp(f(α ∓ β)) x±",
            1e-10,
            || {
                let mut worst: f64 = 0.0;
                for (x, pair) in xs.iter().zip(&pairs).take(20) {
                    let mag = magnitude(x);
                    for i in 0..5 {
                        for j in 0..5 {
                            let (a, b) = (2.0 * PI * i as f64 / 5.0, 2.0 * PI * j as f64 / 5.0);
                            for (part, sign) in [(&pair.plus, 1.0), (&pair.minus, -1.0)] {
                                let lhs = &(&f.exp(a) * part) * &g.exp(b);
                                worst = worst
                                    .max(lhs.distance(&(part * &g.exp(b - sign * a))) / mag)
                                    .max(lhs.distance(&(&f.exp(a - sign * b) * part)) / mag);
                            }
                        }
                    }
                }
                Ok(Outcome::Measured(worst))
            },
        );
        run.check(
            format!("split/commutator-exponentials {sig}"),
            "exp(fα) exp(gβ) = exp(gβ) exp(fα) + [f,g] sin α sin β",
            1e-10,
            || {
                let bracket = commutator(f.value(), g.value())?;
                let mag = (1.0 + f.value().norm()) * (1.0 + g.value().norm());
                let mut worst: f64 = 0.0;
                for i in 0..5 {
                    for j in 0..5 {
                        let (a, b) = (2.0 * PI * i as f64 / 5.0, 2.0 * PI * j as f64 / 5.0);
                        let lhs = &f.exp(a) * &g.exp(b);
                        let rhs = &(&g.exp(b) * &f.exp(a)) + &(&bracket * (a.sin() * b.sin()));
                        worst = worst.max(lhs.distance(&rhs) / mag);
                    }
                }
                Ok(Outcome::Measured(worst))
            },
        );
        run.check(
            format!("split/orthogonality sampled {sig}"),
            "Sc(x+ ~y-) = Sc(x- ~y+) = 0",
            1e-10,
            || {
                if !(f.is_reverse_antisymmetric(1e-10) && g.is_reverse_antisymmetric(1e-10)) {
                    return Ok(Outcome::Skipped(
                        "sampled roots do not satisfy ~f = -f, ~g = -g".into(),
                    ));
                }
                Ok(Outcome::Measured(orthogonality(&pairs)))
            },
        );
        run.check(
            format!("split/orthogonality blades {sig}"),
            "Sc(x+ ~y-) = Sc(x- ~y+) = 0",
            1e-10,
            || {
                let roots = blade_roots(sig);
                let mut worst: f64 = 0.0;
                for bf in &roots {
                    for bg in &roots {
                        let pairs: Vec<SplitPair> = xs
                            .iter()
                            .take(20)
                            .map(|x| split_pm(x, bf, bg))
                            .collect::<Result<_>>()?;
                        worst = worst.max(orthogonality(&pairs));
                    }
                }
                Ok(Outcome::Measured(worst))
            },
        );
    }
}

/// Largest `|Sc(x+ ~y-)|`, `|Sc(x- ~y+)|` over consecutive pairs.
fn orthogonality(pairs: &[SplitPair]) -> f64 {
    max_of(pairs.windows(2).map(|w| {
        let (x, y) = (&w[0], &w[1]);
        let a = (&x.plus * &y.minus.principal_reverse()).scalar_part();
        let b = (&x.minus * &y.plus.principal_reverse()).scalar_part();
        let scale = (x.plus.norm() + x.minus.norm()) * (y.plus.norm() + y.minus.norm());
        a.abs().max(b.abs()) / scale.max(1.0)
    }))
}

/// Root pair, phase partition and random field for one transform test.
struct TransformSetup {
    f: RootOfMinusOne,
    g: RootOfMinusOne,
    plan: CftPlan,
    h: MultivectorField,
}

fn setup(case: &GridCase, seed: u64, index: usize, mode: EvalMode) -> Result<TransformSetup> {
    let sig = case.signature()?;
    let f = sample_root(sig, seed, None)?;
    let g = sample_root(sig, seed.rotate_left(17) ^ 0xa5a5, None)?;
    let n = sig.dim();
    // cycle through every left/right partition of the axes
    let mask = index % (1 << n);
    let left: Vec<usize> = (1..=n).filter(|a| mask & (1 << (a - 1)) != 0).collect();
    let plan = CftPlan::new(
        f.clone(),
        g.clone(),
        PhaseFunctions::new(n, &left)?,
        GridGeometry::cyclic(case.dims.clone())?,
        mode,
    )?;
    let h = generate(
        &SignalKind::Random {
            seed: seed ^ 0x5eed,
        },
        sig,
        plan.grid(),
    )?;
    Ok(TransformSetup { f, g, plan, h })
}

fn transform_checks(run: &mut Runner) {
    let pairs = run.config.transform_pairs;
    let mut rng = run.rng(Suite::Cft);
    for case in run.config.transform_cases.clone() {
        let seeds: Vec<u64> = (0..pairs).map(|_| rng.random()).collect();
        let label = case.label();
        run.check(
            format!("cft/fft-vs-direct {label}"),
            "FFT evaluation through the ± split equals the defining sum",
            1e-10,
            || {
                let mut worst: f64 = 0.0;
                for (i, &seed) in seeds.iter().enumerate() {
                    let s = setup(&case, seed, i, EvalMode::Fft)?;
                    let fast = cft_forward_fft(&s.h, &s.plan)?;
                    let direct = cft_forward_direct(&s.h, &s.plan)?;
                    worst = worst.max(fast.relative_error(&direct)?);
                }
                Ok(Outcome::Measured(worst))
            },
        );
        run.check(
            format!("cft/split-linearity {label}"),
            "F{h} = F{h+} + F{h-}",
            1e-12,
            || {
                let mut worst: f64 = 0.0;
                for (i, &seed) in seeds.iter().enumerate() {
                    let s = setup(&case, seed, i, EvalMode::Fft)?;
                    let (hp, hm) = split_field(&s.h, &s.f, &s.g)?;
                    let sum = cft_forward(&hp, &s.plan)?.add(&cft_forward(&hm, &s.plan)?)?;
                    worst = worst.max(sum.relative_error(&cft_forward(&s.h, &s.plan)?)?);
                }
                Ok(Outcome::Measured(worst))
            },
        );
        for mode in [EvalMode::Fft, EvalMode::Direct] {
            let mode_name = match mode {
                EvalMode::Fft => "fft",
                EvalMode::Direct => "direct",
            };
            run.check(
                format!("cft/inversion {mode_name} {label}"),
                "inverse transform",
                1e-10,
                || {
                    let mut worst: f64 = 0.0;
                    for (i, &seed) in seeds.iter().enumerate() {
                        let s = setup(&case, seed, i, mode)?;
                        let back = cft_inverse(&cft_forward(&s.h, &s.plan)?, &s.plan)?;
                        worst = worst.max(back.relative_error(&s.h)?);
                    }
                    Ok(Outcome::Measured(worst))
                },
            );
        }
        run.check(
            format!("cft/exp-sine-fft-vs-direct {label}"),
            "mixed exponential-sine transforms",
            1e-10,
            || {
                let mut worst: f64 = 0.0;
                for (i, &seed) in seeds.iter().take(2).enumerate() {
                    let s = setup(&case, seed, i + 1, EvalMode::Fft)?;
                    let direct = s.plan.clone().with_mode(EvalMode::Direct)?;
                    // sine kernels vanish identically on 2-point axes, so
                    // measure against the exponential spectrum
                    let scale = cft_forward(&s.h, &s.plan)?.coefficient_norm();
                    for sign in [1.0, -1.0] {
                        let a = cft_exp_sine(&s.h, &s.plan, sign)?;
                        let b = cft_exp_sine(&s.h, &direct, sign)?;
                        worst = worst.max(a.sub(&b)?.coefficient_norm() / scale);
                        let a = cft_sine_exp(&s.h, &s.plan, sign)?;
                        let b = cft_sine_exp(&s.h, &direct, sign)?;
                        worst = worst.max(a.sub(&b)?.coefficient_norm() / scale);
                    }
                }
                Ok(Outcome::Measured(worst))
            },
        );
    }

    if run.config.timing {
        let case = run.config.timing_case.clone();
        let seed: u64 = rng.random();
        run.check(
            format!("cft/fft-speedup {}", case.label()),
            "FFT path at least ten times faster than the direct sum",
            0.1,
            || {
                let s = setup(&case, seed, 1, EvalMode::Fft)?;
                let (fft_time, _) = best_time(3, || cft_forward_fft(&s.h, &s.plan))?;
                let (direct_time, _) = best_time(1, || cft_forward_direct(&s.h, &s.plan))?;
                // reported as the time ratio fft / direct
                Ok(Outcome::Measured(fft_time / direct_time))
            },
        );
    }
}

fn best_time<T>(reps: usize, mut work: impl FnMut() -> Result<T>) -> Result<(f64, T)> {
    let mut best = f64::INFINITY;
    let mut last = None;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let out = work()?;
        best = best.min(start.elapsed().as_secs_f64());
        last = Some(out);
    }
    Ok((best, last.expect("at least one repetition")))
}

/// `h(x - offset)` on a cyclic grid.
fn roll(h: &MultivectorField, offset: &[usize]) -> Result<MultivectorField> {
    let grid = h.grid().clone();
    let dims = grid.dims().to_vec();
    h.map_points(|x, _| {
        let mut idx = vec![0; dims.len()];
        grid.unravel(x, &mut idx);
        for l in 0..dims.len() {
            idx[l] = (idx[l] + dims[l] - offset[l] % dims[l]) % dims[l];
        }
        h.point_at(&idx)
    })
}

/// Left and right phase angles of `x·ω` for grid indices on a cyclic plan.
fn cyclic_angles(plan: &CftPlan, x: &[usize], m: &[usize]) -> (f64, f64) {
    let dims = plan.grid().dims();
    let (mut u, mut v) = (0.0, 0.0);
    for l in 0..dims.len() {
        let theta = 2.0 * PI * ((x[l] * m[l]) % dims[l]) as f64 / dims[l] as f64;
        if plan.phase().is_left(l + 1) {
            u += theta;
        } else {
            v += theta;
        }
    }
    (u, v)
}

fn unravel(grid: &GridGeometry, flat: usize) -> Vec<usize> {
    let mut idx = vec![0; grid.ndim()];
    grid.unravel(flat, &mut idx);
    idx
}

fn theorem_checks(run: &mut Runner) {
    let pairs = run.config.theorem_pairs;
    let offsets = run.config.offsets;
    let mut rng = run.rng(Suite::Theorems);
    for case in run.config.transform_cases.clone() {
        let seeds: Vec<u64> = (0..pairs).map(|_| rng.random()).collect();
        let offset_seed: u64 = rng.random();
        let label = case.label();

        run.check(
            format!("theorems/shift {label}"),
            "x-shifted function",
            1e-10,
            || {
                let mut worst: f64 = 0.0;
                let mut draw = ChaCha8Rng::seed_from_u64(offset_seed);
                for (i, &seed) in seeds.iter().enumerate() {
                    let s = setup(&case, seed, i, EvalMode::Fft)?;
                    let spectrum = cft_forward(&s.h, &s.plan)?;
                    let freq = s.plan.frequency_grid().clone();
                    for _ in 0..offsets {
                        let offset: Vec<usize> =
                            case.dims.iter().map(|&d| draw.random_range(0..d)).collect();
                        let lhs = cft_forward(&roll(&s.h, &offset)?, &s.plan)?;
                        let rhs = spectrum.map_points(|w, value| {
                            let (u, v) = cyclic_angles(&s.plan, &offset, &unravel(&freq, w));
                            &(&s.f.exp(-u) * value) * &s.g.exp(-v)
                        })?;
                        worst = worst.max(lhs.relative_error(&rhs)?);
                    }
                }
                Ok(Outcome::Measured(worst))
            },
        );
        run.check(
            format!("theorems/modulation {label}"),
            "the modulation formula",
            1e-10,
            || {
                let mut worst: f64 = 0.0;
                let mut draw = ChaCha8Rng::seed_from_u64(offset_seed ^ 1);
                for (i, &seed) in seeds.iter().enumerate() {
                    let s = setup(&case, seed, i, EvalMode::Fft)?;
                    let spectrum = cft_forward(&s.h, &s.plan)?;
                    let grid = s.plan.grid().clone();
                    for _ in 0..offsets {
                        let shift: Vec<usize> =
                            case.dims.iter().map(|&d| draw.random_range(0..d)).collect();
                        let modulated = s.h.map_points(|x, value| {
                            let (u, v) = cyclic_angles(&s.plan, &unravel(&grid, x), &shift);
                            &(&s.f.exp(-u) * value) * &s.g.exp(-v)
                        })?;
                        let lhs = cft_forward(&modulated, &s.plan)?;
                        // F{h}(ω + ω₀): roll the spectrum back by the offset
                        let back: Vec<usize> = case
                            .dims
                            .iter()
                            .zip(&shift)
                            .map(|(d, o)| (d - o) % d)
                            .collect();
                        worst = worst.max(lhs.relative_error(&roll(&spectrum, &back)?)?);
                    }
                }
                Ok(Outcome::Measured(worst))
            },
        );
        run.check(
            format!("theorems/left-linearity {label}"),
            "left linearity with multivector constants",
            1e-10,
            || {
                let mut worst: f64 = 0.0;
                for (i, &seed) in seeds.iter().enumerate() {
                    let s = setup(&case, seed, i, EvalMode::Fft)?;
                    let sig = s.plan.signature();
                    let one = Multivector::one(sig);
                    let alpha = Multivector::random(sig, &mut ChaCha8Rng::seed_from_u64(seed));
                    let (ap, am) = split_commuting(&alpha, &s.f)?;
                    let flipped = s.plan.with_roots(s.f.negated(), s.g.clone())?;
                    let spectrum = cft_forward(&s.h, &s.plan)?;
                    let lhs = cft_forward(&s.h.sandwich(&alpha, &one)?, &s.plan)?;
                    let rhs = spectrum
                        .sandwich(&ap, &one)?
                        .add(&cft_forward(&s.h, &flipped)?.sandwich(&am, &one)?)?;
                    // the commuting parts of α can be far larger than α itself
                    let scale = spectrum.coefficient_norm() * (ap.norm() + am.norm());
                    worst = worst.max(lhs.sub(&rhs)?.coefficient_norm() / scale);
                }
                Ok(Outcome::Measured(worst))
            },
        );
        run.check(
            format!("theorems/right-linearity {label}"),
            "right linearity with multivector constants",
            1e-10,
            || {
                let mut worst: f64 = 0.0;
                for (i, &seed) in seeds.iter().enumerate() {
                    let s = setup(&case, seed, i, EvalMode::Fft)?;
                    let sig = s.plan.signature();
                    let one = Multivector::one(sig);
                    let beta = Multivector::random(sig, &mut ChaCha8Rng::seed_from_u64(!seed));
                    let (bp, bm) = split_commuting(&beta, &s.g)?;
                    let flipped = s.plan.with_roots(s.f.clone(), s.g.negated())?;
                    let spectrum = cft_forward(&s.h, &s.plan)?;
                    let lhs = cft_forward(&s.h.sandwich(&one, &beta)?, &s.plan)?;
                    let rhs = spectrum
                        .sandwich(&one, &bp)?
                        .add(&cft_forward(&s.h, &flipped)?.sandwich(&one, &bm)?)?;
                    let scale = spectrum.coefficient_norm() * (bp.norm() + bm.norm());
                    worst = worst.max(lhs.sub(&rhs)?.coefficient_norm() / scale);
                }
                Ok(Outcome::Measured(worst))
            },
        );
        run.check(
            format!("theorems/power-factors {label}"),
            "F{f^m h g^k} = f^m F{h} g^k",
            1e-10,
            || {
                let mut worst: f64 = 0.0;
                let mut draw = ChaCha8Rng::seed_from_u64(offset_seed ^ 2);
                for (i, &seed) in seeds.iter().enumerate() {
                    let s = setup(&case, seed, i, EvalMode::Fft)?;
                    let spectrum = cft_forward(&s.h, &s.plan)?;
                    let fp = s.f.value().powi(draw.random_range(-3..=3))?;
                    let gq = s.g.value().powi(draw.random_range(-3..=3))?;
                    let lhs = cft_forward(&s.h.sandwich(&fp, &gq)?, &s.plan)?;
                    let rhs = spectrum.sandwich(&fp, &gq)?;
                    // powers of a large root cancel; measure against the factor norms
                    let scale = spectrum.coefficient_norm() * fp.norm() * gq.norm();
                    worst = worst.max(lhs.sub(&rhs)?.coefficient_norm() / scale);
                }
                Ok(Outcome::Measured(worst))
            },
        );
        run.check(
            format!("theorems/plancherel blades {label}"),
            "Plancherel identity",
            1e-10,
            || {
                let sig = case.signature()?;
                let roots = blade_roots(sig);
                if roots.is_empty() {
                    return Ok(Outcome::Skipped(format!("{sig} has no blade roots")));
                }
                let mut worst: f64 = 0.0;
                for (i, f) in roots.iter().enumerate() {
                    for (j, g) in roots.iter().enumerate() {
                        let n = sig.dim();
                        let left: Vec<usize> = (1..=n).filter(|a| (i + j + a) % 2 == 0).collect();
                        let plan = CftPlan::new(
                            f.clone(),
                            g.clone(),
                            PhaseFunctions::new(n, &left)?,
                            GridGeometry::cyclic(case.dims.clone())?,
                            EvalMode::Fft,
                        )?;
                        worst =
                            worst.max(plancherel_error(&plan, offset_seed ^ (i * 31 + j) as u64)?);
                    }
                }
                Ok(Outcome::Measured(worst))
            },
        );
        run.check(
            format!("theorems/plancherel sampled {label}"),
            "Plancherel identity",
            1e-10,
            || {
                let mut worst: f64 = 0.0;
                let mut guarded = 0;
                for (i, &seed) in seeds.iter().enumerate() {
                    let s = setup(&case, seed, i, EvalMode::Fft)?;
                    if !(s.f.is_reverse_antisymmetric(1e-10) && s.g.is_reverse_antisymmetric(1e-10))
                    {
                        continue;
                    }
                    guarded += 1;
                    worst = worst.max(plancherel_error(&s.plan, seed)?);
                }
                if guarded == 0 {
                    return Ok(Outcome::Skipped(
                        "sampled roots do not satisfy ~f = -f, ~g = -g".into(),
                    ));
                }
                Ok(Outcome::Measured(worst))
            },
        );
        run.check(
            format!("theorems/parseval {label}"),
            "Parseval identity",
            1e-10,
            || {
                let sig = case.signature()?;
                let roots = blade_roots(sig);
                let (Some(f), Some(g)) = (roots.first(), roots.last()) else {
                    return Ok(Outcome::Skipped(format!("{sig} has no blade roots")));
                };
                let plan = CftPlan::new(
                    f.clone(),
                    g.clone(),
                    PhaseFunctions::split_at(sig.dim(), 1)?,
                    GridGeometry::cyclic(case.dims.clone())?,
                    EvalMode::Fft,
                )?;
                let h = generate(&SignalKind::Random { seed: offset_seed }, sig, plan.grid())?;
                let m = plan.grid().len() as f64;
                let spectral = field_norm(&cft_forward(&h, &plan)?) / m.sqrt();
                Ok(Outcome::Measured(
                    (field_norm(&h) - spectral).abs() / field_norm(&h),
                ))
            },
        );
    }

    // Ring R: sampled roots generally violate ~f = -f.
    let seed: u64 = rng.random();
    run.check(
        "theorems/plancherel sampled Cl(2,0) 8x8".into(),
        "Plancherel identity",
        1e-10,
        || {
            let case = GridCase::new(2, 0, &[8, 8]);
            let s = setup(&case, seed, 1, EvalMode::Fft)?;
            if !(s.f.is_reverse_antisymmetric(1e-10) && s.g.is_reverse_antisymmetric(1e-10)) {
                return Ok(Outcome::Skipped(
                    "sampled roots do not satisfy ~f = -f, ~g = -g".into(),
                ));
            }
            Ok(Outcome::Measured(plancherel_error(&s.plan, seed)?))
        },
    );

    let dilation_points = run.config.dilation_points;
    let moment_points = run.config.moment_points;
    for (p, q) in [(0, 1), (0, 2)] {
        let seed: u64 = rng.random();
        let sig = AlgebraSignature::new(p, q).expect("small signature");
        run.check(
            format!("theorems/dilation per-axis {sig}"),
            "dilation along single axes",
            1e-6,
            || dilation_error(sig, seed, dilation_points, false).map(Outcome::Measured),
        );
        run.check(
            format!("theorems/dilation isotropic {sig}"),
            "isotropic dilation",
            1e-6,
            || dilation_error(sig, seed, dilation_points, true).map(Outcome::Measured),
        );
        // one pass yields both errors; the moment record reuses it
        let mut moment = None;
        run.check(
            format!("theorems/derivative {sig}"),
            "derivative theorem",
            1e-4,
            || {
                let (d, m) = moment_errors(sig, seed, moment_points)?;
                moment = Some(m);
                Ok(Outcome::Measured(d))
            },
        );
        run.check(
            format!("theorems/moment {sig}"),
            "moment theorem",
            1e-4,
            || match moment {
                Some(m) => Ok(Outcome::Measured(m)),
                None => moment_errors(sig, seed, moment_points).map(|(_, m)| Outcome::Measured(m)),
            },
        );
    }
}

/// `|<h1,h2> - <F h1, F h2>/M| / (|h1| |h2|)` for random fields.
fn plancherel_error(plan: &CftPlan, seed: u64) -> Result<f64> {
    let sig = plan.signature();
    let h1 = generate(&SignalKind::Random { seed }, sig, plan.grid())?;
    let h2 = generate(&SignalKind::Random { seed: !seed }, sig, plan.grid())?;
    let m = plan.grid().len() as f64;
    let lhs = field_scalar_inner(&h1, &h2)?;
    let rhs = field_scalar_inner(&cft_forward(&h1, plan)?, &cft_forward(&h2, plan)?)? / m;
    Ok((lhs - rhs).abs() / (field_norm(&h1) * field_norm(&h2)))
}

fn quadrature_setup(
    sig: AlgebraSignature,
    seed: u64,
    points: usize,
) -> Result<(
    RootOfMinusOne,
    RootOfMinusOne,
    PhaseFunctions,
    GridGeometry,
    Multivector,
)> {
    let n = sig.dim();
    let f = sample_root(sig, seed, None)?;
    let g = sample_root(sig, seed ^ 0x77, None)?;
    let phase = PhaseFunctions::split_at(n, n / 2)?;
    let grid = GridGeometry::quadrature(vec![points; n], vec![(-10.0, 10.0); n])?;
    let amplitude = Multivector::random(sig, &mut ChaCha8Rng::seed_from_u64(seed));
    Ok((f, g, phase, grid, amplitude))
}

fn gaussian(
    sig: AlgebraSignature,
    grid: &GridGeometry,
    amplitude: &Multivector,
    sigma: Vec<f64>,
    center: Vec<f64>,
) -> Result<MultivectorField> {
    generate(
        &SignalKind::Gaussian {
            amplitude: amplitude.clone(),
            sigma,
            center,
        },
        sig,
        grid,
    )
}

/// Largest relative error of `F{h(a x)}(ω) = |a|^-n F{h}(ω/a)` over a set of
/// scale vectors, for a shifted gaussian `h`.
fn dilation_error(sig: AlgebraSignature, seed: u64, points: usize, isotropic: bool) -> Result<f64> {
    let n = sig.dim();
    let (f, g, phase, grid, amplitude) = quadrature_setup(sig, seed, points)?;
    let center: Vec<f64> = (0..n).map(|l| 0.5 - 0.75 * l as f64).collect();
    let freq_dims = vec![17; n];
    let target = GridGeometry::quadrature(freq_dims.clone(), vec![(-3.0, 3.0); n])?;
    let plan = CftPlan::new(f, g, phase, grid.clone(), EvalMode::Direct)?
        .with_frequency_grid(target.clone())?;
    let scales: Vec<Vec<f64>> = if isotropic {
        vec![vec![2.0; n], vec![-1.5; n]]
    } else {
        (0..n)
            .flat_map(|l| {
                [2.0, -1.5].map(|a| {
                    let mut s = vec![1.0; n];
                    s[l] = a;
                    s
                })
            })
            .collect()
    };
    let h = gaussian(sig, &grid, &amplitude, vec![1.0; n], center.clone())?;
    let mut worst: f64 = 0.0;
    for scale in scales {
        // h(a x) is a gaussian centred at c/a with width 1/|a|
        let dilated = gaussian(
            sig,
            &grid,
            &amplitude,
            scale.iter().map(|a| 1.0 / a.abs()).collect(),
            center.iter().zip(&scale).map(|(c, a)| c / a).collect(),
        )?;
        let lhs = cft_forward(&dilated, &plan)?;

        // F{h} on the ascending grid of ω/a, reversed along axes with a < 0
        let domain = (0..n)
            .map(|l| {
                let step = target.spacing(l) / scale[l].abs();
                let first = if scale[l] > 0.0 {
                    target.coordinate(l, 0) / scale[l]
                } else {
                    target.coordinate(l, freq_dims[l] - 1) / scale[l]
                };
                (first, first + step * freq_dims[l] as f64)
            })
            .collect();
        let scaled = plan
            .clone()
            .with_frequency_grid(GridGeometry::quadrature(freq_dims.clone(), domain)?)?;
        let raw = cft_forward(&h, &scaled)?;
        let jacobian = 1.0 / scale.iter().product::<f64>().abs();
        let raw_grid = raw.grid().clone();
        let rhs = raw
            .map_points(|w, _| {
                let mut idx = unravel(&raw_grid, w);
                for l in 0..n {
                    if scale[l] < 0.0 {
                        idx[l] = freq_dims[l] - 1 - idx[l];
                    }
                }
                raw.point_at(&idx) * jacobian
            })?
            .with_grid(target.clone())?;
        worst = worst.max(lhs.relative_error(&rhs)?);
    }
    Ok(worst)
}

/// Relative errors of the derivative and moment multipliers against finite
/// difference and `x h(x)` oracles, worst over axes.
fn moment_errors(sig: AlgebraSignature, seed: u64, points: usize) -> Result<(f64, f64)> {
    let n = sig.dim();
    let (f, g, phase, grid, amplitude) = quadrature_setup(sig, seed, points)?;
    let center: Vec<f64> = (0..n).map(|l| 0.3 - 0.7 * l as f64).collect();
    let delta = 1e-5;
    let (mut derivative, mut moment): (f64, f64) = (0.0, 0.0);
    for axis in 1..=n {
        // fine along the differentiated axis, coarse across it
        let dims: Vec<usize> = (1..=n).map(|l| if l == axis { 201 } else { 5 }).collect();
        let freq = GridGeometry::quadrature(dims, vec![(-1.0, 1.0); n])?;
        let plan = CftPlan::new(f.clone(), g.clone(), phase, grid.clone(), EvalMode::Direct)?
            .with_frequency_grid(freq)?;
        let sigma = vec![1.0; n];
        let h = gaussian(sig, &grid, &amplitude, sigma.clone(), center.clone())?;

        let mut ahead = center.clone();
        ahead[axis - 1] -= delta;
        let mut behind = center.clone();
        behind[axis - 1] += delta;
        let dh = gaussian(sig, &grid, &amplitude, sigma.clone(), ahead)?
            .sub(&gaussian(sig, &grid, &amplitude, sigma, behind)?)?
            .scale(0.5 / delta);
        let oracle = cft_forward(&dh, &plan)?;
        derivative = derivative.max(spectral_derivative(&h, axis, &plan)?.relative_error(&oracle)?);

        let xh = h.map_points(|x, v| v * grid.coordinate(axis - 1, unravel(&grid, x)[axis - 1]))?;
        let oracle = cft_forward(&xh, &plan)?;
        moment = moment.max(spectral_moment(&h, axis, &plan)?.relative_error(&oracle)?);
    }
    Ok((derivative, moment))
}

fn convolution_checks(run: &mut Runner) {
    let pairs = run.config.convolution_pairs;
    let mut rng = run.rng(Suite::Convolution);
    for case in run.config.convolution_cases.clone() {
        let seeds: Vec<u64> = (0..pairs).map(|_| rng.random()).collect();
        let label = case.label();
        run.check(
            format!("convolution/theorem {label}"),
            "transform of the convolution, eight-term form",
            1e-9,
            || {
                let mut worst: f64 = 0.0;
                for (i, &seed) in seeds.iter().enumerate() {
                    let s = setup(&case, seed, i, EvalMode::Fft)?;
                    let b = generate(
                        &SignalKind::Random { seed: !seed },
                        s.h.signature(),
                        s.plan.grid(),
                    )?;
                    let check = verify_convolution_theorem(&s.h, &b, &s.plan)?;
                    worst = worst.max(check.relative_error());
                }
                Ok(Outcome::Measured(worst))
            },
        );
        run.check(
            format!("convolution/commuting-roots {label}"),
            "[f,g] = 0 removes the four sine terms",
            0.0,
            || {
                let s = setup(&case, seeds[0], 1, EvalMode::Fft)?;
                let plan = s.plan.with_roots(s.f.clone(), s.f.clone())?;
                let b = generate(
                    &SignalKind::Random { seed: 3 },
                    s.h.signature(),
                    plan.grid(),
                )?;
                let terms = convolution_terms(&s.h, &b, &plan)?;
                Ok(Outcome::Measured(max_of(
                    terms[4..].iter().map(|t| t.coefficient_norm()),
                )))
            },
        );
        run.check(
            format!("convolution/opposite-roots {label}"),
            "g = -f reduces the theorem to four terms",
            1e-9,
            || {
                let s = setup(&case, seeds[0], 2, EvalMode::Fft)?;
                let plan = s.plan.with_roots(s.f.clone(), s.f.negated())?;
                let b = generate(
                    &SignalKind::Random { seed: 4 },
                    s.h.signature(),
                    plan.grid(),
                )?;
                let check = verify_convolution_theorem(&s.h, &b, &plan)?;
                let leftover = max_of(check.terms[4..].iter().map(|t| t.coefficient_norm()));
                Ok(Outcome::Measured(check.relative_error().max(leftover)))
            },
        );
    }
}
