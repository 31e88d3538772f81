//! Self-check suites behind the `normcheck` and `gradcheck` subcommands.
//!
//! `normcheck` compares every scaler against a separately coded direct
//! evaluation of its formula (different algebraic arrangement, different
//! special functions) and exercises the inverse round trip. `gradcheck`
//! compares backpropagation-through-time gradients against the
//! central-finite-difference estimate on randomized small models. Both
//! suites are deterministic per seed.

use std::fmt;

use normbench_core::rng::SplitMix64;
use normbench_core::rnn::{gradients_agree, NetSpec, OutputMode, RnnModel};
use normbench_core::scale::{self, Method, ScalerParams};

/// Agreement bound between a transform and its direct-evaluation oracle.
pub const ORACLE_REL_TOL: f64 = 1e-12;
/// Agreement bound for inverse(transform(x)) against x.
pub const ROUNDTRIP_REL_TOL: f64 = 1e-9;
/// Relative bound for BPTT vs central differences.
pub const GRAD_REL_TOL: f64 = 1e-4;
/// Entries smaller than this are compared absolutely.
pub const GRAD_ABS_FLOOR: f64 = 1e-8;
/// Central-difference step.
pub const GRAD_EPSILON: f64 = 1e-5;

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}

/// Direct evaluation of each method's formula, coded independently of
/// `scale::transform`: different operation order, and the two squashing
/// functions are computed from exponentials rather than `tanh`/the logistic
/// reciprocal form.
fn oracle_transform(params: &ScalerParams, x: f64) -> f64 {
    match *params {
        ScalerParams::MinMax { data_min, data_max, range_low, range_high } => {
            ((range_high - range_low) * (x - data_min)) / (data_max - data_min) + range_low
        }
        ScalerParams::DecimalScaling { exponent } => x * libm::pow(10.0, -f64::from(exponent)),
        ScalerParams::ZScore { mean, std_dev } => (x - mean) * (1.0 / std_dev),
        ScalerParams::Median { median } => x * (1.0 / median),
        ScalerParams::Sigmoid => {
            let ex = libm::exp(x);
            ex / (1.0 + ex)
        }
        ScalerParams::TanhEstimator { mean, std_dev } => {
            let w = (0.01 * (x - mean)) / std_dev;
            // tanh(w) = expm1(2w) / (expm1(2w) + 2), stable for small w
            let e = libm::expm1(2.0 * w);
            (e / (e + 2.0) + 1.0) / 2.0
        }
    }
}

/// One method's oracle-agreement and round-trip statistics.
#[derive(Debug, Clone)]
pub struct MethodCheck {
    pub method: Method,
    pub oracle_failures: usize,
    pub oracle_max_rel: f64,
    pub roundtrip_failures: usize,
    pub roundtrip_max_rel: f64,
}

#[derive(Debug, Clone)]
pub struct NormCheckReport {
    pub cases_per_method: usize,
    pub methods: Vec<MethodCheck>,
}

impl NormCheckReport {
    pub fn oracle_passed(&self) -> bool {
        self.methods.iter().all(|m| m.oracle_failures == 0)
    }

    pub fn roundtrip_passed(&self) -> bool {
        self.methods.iter().all(|m| m.roundtrip_failures == 0)
    }

    pub fn passed(&self) -> bool {
        self.oracle_passed() && self.roundtrip_passed()
    }
}

impl fmt::Display for NormCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.methods {
            writeln!(
                f,
                "{:<15} oracle {} (max rel {:.2e})  round-trip {} (max rel {:.2e})",
                m.method.name(),
                if m.oracle_failures == 0 { "ok" } else { "FAIL" },
                m.oracle_max_rel,
                if m.roundtrip_failures == 0 { "ok" } else { "FAIL" },
                m.roundtrip_max_rel,
            )?;
        }
        write!(
            f,
            "normcheck: {} ({} cases per method)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.cases_per_method
        )
    }
}

/// A fresh small price-like column for fitting.
fn random_column(rng: &mut SplitMix64) -> Vec<f64> {
    let len = 4 + rng.next_index(12);
    let base = rng.next_range(10.0, 5000.0);
    let spread = rng.next_range(1.0, base);
    (0..len).map(|_| base + spread * (rng.next_f64() - 0.5)).collect()
}

/// Draws an input where the method's transform is numerically meaningful.
/// The squashing methods saturate to exactly 0.0/1.0 in f64 far from their
/// center, so they are probed where f64 can still resolve the output.
fn probe_input(rng: &mut SplitMix64, params: &ScalerParams, column: &[f64]) -> f64 {
    match *params {
        ScalerParams::MinMax { data_min, data_max, .. } => {
            data_min + rng.next_range(-0.5, 1.5) * (data_max - data_min)
        }
        ScalerParams::DecimalScaling { .. } | ScalerParams::Median { .. } => {
            let pick = column[rng.next_index(column.len())];
            pick * rng.next_range(-2.0, 2.0)
        }
        ScalerParams::ZScore { mean, std_dev } => mean + rng.next_range(-6.0, 6.0) * std_dev,
        ScalerParams::Sigmoid => rng.next_range(-15.0, 15.0),
        ScalerParams::TanhEstimator { mean, std_dev } => {
            mean + rng.next_range(-50.0, 50.0) * std_dev
        }
    }
}

/// Runs the oracle-equivalence and round-trip suites.
pub fn run_norm_checks(cases_per_method: usize, seed: u64) -> NormCheckReport {
    let mut rng = SplitMix64::new(seed);
    let mut methods = Vec::with_capacity(Method::ALL.len());
    for method in Method::ALL {
        let mut check = MethodCheck {
            method,
            oracle_failures: 0,
            oracle_max_rel: 0.0,
            roundtrip_failures: 0,
            roundtrip_max_rel: 0.0,
        };
        for _ in 0..cases_per_method {
            let column = random_column(&mut rng);
            let params = scale::fit(method, &column).expect("random column is non-degenerate");
            let x = probe_input(&mut rng, &params, &column);

            let implemented = scale::transform(&params, x);
            let direct = oracle_transform(&params, x);
            let oracle_rel = rel_diff(implemented, direct);
            check.oracle_max_rel = check.oracle_max_rel.max(oracle_rel);
            if oracle_rel > ORACLE_REL_TOL {
                check.oracle_failures += 1;
            }

            let back = scale::inverse(&params, implemented)
                .expect("probe inputs stay inside the invertible domain");
            let rt_rel = (back - x).abs() / x.abs().max(1.0);
            check.roundtrip_max_rel = check.roundtrip_max_rel.max(rt_rel);
            if rt_rel > ROUNDTRIP_REL_TOL {
                check.roundtrip_failures += 1;
            }
        }
        methods.push(check);
    }
    NormCheckReport { cases_per_method, methods }
}

/// One randomized model's BPTT-vs-finite-difference comparison.
#[derive(Debug, Clone)]
pub struct GradTrial {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub window: usize,
    pub params: usize,
    pub failures: usize,
    pub max_rel: f64,
}

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub trials: Vec<GradTrial>,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.trials.iter().all(|t| t.failures == 0)
    }
}

impl fmt::Display for GradCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.trials.iter().enumerate() {
            writeln!(
                f,
                "trial {:>2}: dims {}x{:?}x1 window {} ({} params) {} (max rel {:.2e})",
                i + 1,
                t.input_dim,
                t.hidden_dims,
                t.window,
                t.params,
                if t.failures == 0 { "ok" } else { "FAIL" },
                t.max_rel,
            )?;
        }
        write!(f, "gradcheck: {} ({} trials)", if self.passed() { "PASS" } else { "FAIL" }, self.trials.len())
    }
}

/// Compares BPTT gradients with central finite differences on randomized
/// models (input dim up to 3, one or two hidden layers of up to 8 units,
/// windows up to 8 steps).
pub fn run_grad_checks(trials: usize, seed: u64) -> GradCheckReport {
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let input_dim = 1 + rng.next_index(3);
        let depth = 1 + rng.next_index(2);
        let hidden_dims: Vec<usize> = (0..depth).map(|_| 1 + rng.next_index(8)).collect();
        let window = 1 + rng.next_index(8);

        let spec = NetSpec::new(input_dim, hidden_dims.clone(), 1, OutputMode::Linear)
            .expect("valid random spec");
        let model = RnnModel::init(spec, rng.next_u64()).expect("valid random spec");
        let sequence: Vec<Vec<f64>> = (0..window)
            .map(|_| (0..input_dim).map(|_| rng.next_normal()).collect())
            .collect();
        let target = rng.next_normal();

        let (analytic, _) = model.bptt_gradients(&sequence, target).expect("valid inputs");
        let numeric =
            model.finite_diff_gradients(&sequence, target, GRAD_EPSILON).expect("valid inputs");

        let a = analytic.flatten();
        let n = numeric.flatten();
        let mut failures = 0;
        let mut max_rel = 0.0f64;
        for (&ga, &gn) in a.iter().zip(&n) {
            if !gradients_agree(ga, gn, GRAD_REL_TOL, GRAD_ABS_FLOOR) {
                failures += 1;
            }
            if ga.abs().max(gn.abs()) > GRAD_ABS_FLOOR {
                max_rel = max_rel.max((ga - gn).abs() / ga.abs().max(gn.abs()));
            }
        }
        out.push(GradTrial {
            input_dim,
            hidden_dims,
            window,
            params: a.len(),
            failures,
            max_rel,
        });
    }
    GradCheckReport { trials: out }
}
