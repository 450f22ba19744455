//! Simulation scenarios and a reproducible Monte-Carlo runner.
//!
//! Each replication draws from its own ChaCha stream: the scenario seed
//! picks the key and the replication index picks the stream. Results are
//! therefore identical for any number of worker threads.

use std::io::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal, StudentT, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{mise, run_estimator, Estimator};
use crate::signal::{ChangePointSet, PiecewiseSignal, Series};

/// Error distribution added to the mean signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoiseKind {
    Gaussian { sigma: f64 },
    /// Student t with 5 degrees of freedom rescaled to standard deviation `sigma`.
    StudentT5 { sigma: f64 },
    /// `sigma * (E - 1)` with `E` standard exponential.
    CenteredExp { sigma: f64 },
    /// Gaussian with one standard deviation per true segment, drawn from
    /// `U[low, high]` in every replication.
    HeteroSegments { low: f64, high: f64 },
    /// Gaussian with one standard deviation per block of `block` design
    /// points, drawn from `U[low, high]` in every replication. A final
    /// partial block gets its own draw.
    HeteroBlocks { block: usize, low: f64, high: f64 },
    /// Gaussian noise plus a Poisson(`intensity`) draw added at `count`
    /// distinct design points sampled uniformly.
    GaussianPlusPoissonOutliers { sigma: f64, intensity: f64, count: usize },
}

impl NoiseKind {
    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::BadParams(msg.into()));
        match *self {
            NoiseKind::Gaussian { sigma }
            | NoiseKind::StudentT5 { sigma }
            | NoiseKind::CenteredExp { sigma } => {
                if !(sigma >= 0.0 && sigma.is_finite()) {
                    return bad("noise level must be finite and non-negative");
                }
            }
            NoiseKind::HeteroSegments { low, high } | NoiseKind::HeteroBlocks { low, high, .. } => {
                if !(0.0 <= low && low <= high && high.is_finite()) {
                    return bad("heteroscedastic range must satisfy 0 <= low <= high");
                }
                if let NoiseKind::HeteroBlocks { block: 0, .. } = self {
                    return bad("block length must be positive");
                }
            }
            NoiseKind::GaussianPlusPoissonOutliers { sigma, intensity, .. } => {
                if !(sigma >= 0.0 && sigma.is_finite() && intensity > 0.0 && intensity.is_finite()) {
                    return bad("outlier model needs sigma >= 0 and a positive intensity");
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub signal: PiecewiseSignal,
    pub noise: NoiseModel,
}

impl Scenario {
    pub fn new(name: impl Into<String>, signal: PiecewiseSignal, kind: NoiseKind) -> Result<Self> {
        kind.validate()?;
        if let NoiseKind::GaussianPlusPoissonOutliers { count, .. } = kind {
            if count > signal.n() {
                return Err(Error::BadParams(format!(
                    "{count} outliers requested for {} observations",
                    signal.n()
                )));
            }
        }
        Ok(Self { name: name.into(), signal, noise: NoiseModel { kind, seed: 0 } })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.noise.seed = seed;
        self
    }

    pub fn true_k(&self) -> usize {
        self.signal.num_changes()
    }
}

/// Largest number of change-points considered by default: four beyond the
/// truth, and never below 10.
pub fn suggested_k_max(scenario: &Scenario) -> usize {
    (scenario.true_k() + 4).max(10)
}

/// Two changes `n/2 - lambda` and `n/2` with levels `(delta1, 0, d * delta1)`.
/// With `n/2` odd the large second jump sits at an odd position of the
/// half-series, where the squared-error split criterion underestimates.
pub fn scenario_underestimation(n: usize, delta1: f64, sigma: f64, lambda: usize, d: f64) -> Result<Scenario> {
    if d.is_nan() || d <= 0.0 || delta1 == 0.0 || !n.is_multiple_of(2) || lambda == 0 || lambda >= n / 2 {
        return Err(Error::BadParams(format!(
            "underestimation scenario needs even n, 0 < lambda < n/2, delta1 != 0, D > 0 (n={n}, lambda={lambda}, D={d})"
        )));
    }
    let cps = ChangePointSet::new(n, vec![n / 2 - lambda, n / 2])?;
    let signal = PiecewiseSignal::univariate(cps, &[delta1, 0.0, d * delta1])?;
    Scenario::new(format!("underestimation-D{d}"), signal, NoiseKind::Gaussian { sigma })
}

/// One change of size `delta1` at `n/2`, or at `n/2 + 1` with `shift_even`.
pub fn scenario_overestimation(n: usize, delta1: f64, sigma: f64, shift_even: bool) -> Result<Scenario> {
    if delta1 == 0.0 || n < 4 {
        return Err(Error::BadParams("overestimation scenario needs delta1 != 0 and n >= 4".into()));
    }
    let tau = n / 2 + usize::from(shift_even);
    let signal = PiecewiseSignal::univariate(ChangePointSet::new(n, vec![tau])?, &[0.0, delta1])?;
    let name = if shift_even {
        format!("overestimation-even-sigma{sigma}")
    } else {
        format!("overestimation-sigma{sigma}")
    };
    Scenario::new(name, signal, NoiseKind::Gaussian { sigma })
}

/// A single bump of length `lambda` and height `delta` in the middle.
pub fn scenario_bump(n: usize, lambda: usize, delta: f64, sigma: f64) -> Result<Scenario> {
    if lambda == 0 || lambda >= n || !(n - lambda).is_multiple_of(2) || delta == 0.0 {
        return Err(Error::BadParams(format!(
            "bump needs 0 < lambda < n with n - lambda even and delta != 0 (n={n}, lambda={lambda})"
        )));
    }
    let cps = ChangePointSet::new(n, vec![(n - lambda) / 2, (n + lambda) / 2])?;
    let signal = PiecewiseSignal::univariate(cps, &[0.0, delta, 0.0])?;
    Scenario::new(format!("bump-lambda{lambda}-delta{delta}"), signal, NoiseKind::Gaussian { sigma })
}

const LARGER_TAUS: [usize; 11] = [204, 470, 778, 878, 883, 894, 984, 1414, 1638, 1680, 1740];
const LARGER_LEVELS: [f64; 12] =
    [-2.32, 15.98, 5.0, 20.0, 0.0, 70.0, 0.0, -15.0, -7.32, 8.42, -2.93, 4.76];
const BLOCKS_TAUS: [usize; 11] = [205, 267, 308, 472, 512, 820, 902, 1332, 1557, 1598, 1659];
const BLOCKS_LEVELS: [f64; 12] =
    [0.0, 14.64, -3.66, 7.32, -7.32, 10.98, -4.39, 3.29, 19.03, 7.68, 15.37, 0.0];

/// The n = 2048 signal with eleven changes and a jump of 70 between 883 and
/// 894. `shift_even` moves the change at 883 to 884.
pub fn larger_signal(shift_even: bool) -> PiecewiseSignal {
    let mut taus = LARGER_TAUS.to_vec();
    if shift_even {
        taus[4] = 884;
    }
    let cps = ChangePointSet::new(2048, taus).expect("valid change-points");
    PiecewiseSignal::univariate(cps, &LARGER_LEVELS).expect("valid levels")
}

/// The blocks signal on n = 2048 points.
pub fn blocks_signal() -> PiecewiseSignal {
    let cps = ChangePointSet::new(2048, BLOCKS_TAUS.to_vec()).expect("valid change-points");
    PiecewiseSignal::univariate(cps, &BLOCKS_LEVELS).expect("valid levels")
}

/// Every named scenario with its exact parameters.
pub fn scenario_catalog() -> Vec<Scenario> {
    let mut out = Vec::new();
    for d in [2.0, 3.0, 5.0] {
        out.push(scenario_underestimation(202, 10.0, 1.0, 5, d).expect("valid"));
    }
    for sigma in [1.0, 0.1, 0.01, 0.001, 0.0001] {
        out.push(scenario_overestimation(202, 1.0, sigma, false).expect("valid"));
    }
    out.push(scenario_overestimation(202, 1.0, 0.0001, true).expect("valid"));
    let gaussian7 = NoiseKind::Gaussian { sigma: 7.0 };
    out.push(Scenario::new("larger-odd", larger_signal(false), gaussian7).expect("valid"));
    out.push(Scenario::new("larger-even", larger_signal(true), gaussian7).expect("valid"));
    let blocks = [
        ("blocks", gaussian7),
        ("blocks-t5", NoiseKind::StudentT5 { sigma: 7.0 }),
        ("blocks-exp", NoiseKind::CenteredExp { sigma: 7.0 }),
        ("blocks-hetero-segments", NoiseKind::HeteroSegments { low: 3.0, high: 11.0 }),
        ("blocks-hetero-blocks32", NoiseKind::HeteroBlocks { block: 32, low: 3.0, high: 11.0 }),
        (
            "blocks-outliers-20",
            NoiseKind::GaussianPlusPoissonOutliers { sigma: 7.0, intensity: 20.0, count: 10 },
        ),
        (
            "blocks-outliers-30",
            NoiseKind::GaussianPlusPoissonOutliers { sigma: 7.0, intensity: 30.0, count: 10 },
        ),
    ];
    for (name, kind) in blocks {
        out.push(Scenario::new(name, blocks_signal(), kind).expect("valid"));
    }
    for (lambda, delta) in [(6, 2.0), (6, 3.0), (6, 4.0), (8, 2.0), (12, 2.0), (20, 2.0)] {
        out.push(scenario_bump(200, lambda, delta, 1.0).expect("valid"));
    }
    out
}

pub fn find_scenario(name: &str) -> Option<Scenario> {
    scenario_catalog().into_iter().find(|s| s.name.eq_ignore_ascii_case(name))
}

fn replication_rng(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

/// One noisy realisation `Y = mu + eps`, determined by the scenario seed and
/// the replication index.
pub fn generate(scenario: &Scenario, replication: u64) -> Series {
    let mut rng = replication_rng(scenario.noise.seed, replication);
    let signal = &scenario.signal;
    let (n, d) = (signal.n(), signal.dim());
    let mean = signal.to_series();
    let mut data = mean.as_flat().to_vec();

    let add_gaussian = |data: &mut [f64], rng: &mut ChaCha8Rng, sd_of_row: &dyn Fn(usize) -> f64| {
        for (i, row) in data.chunks_exact_mut(d).enumerate() {
            let sd = sd_of_row(i);
            for y in row {
                let z: f64 = rng.sample(StandardNormal);
                *y += sd * z;
            }
        }
    };

    match scenario.noise.kind {
        NoiseKind::Gaussian { sigma } => add_gaussian(&mut data, &mut rng, &|_| sigma),
        NoiseKind::StudentT5 { sigma } => {
            let t5 = StudentT::new(5.0).expect("valid degrees of freedom");
            let scale = sigma / (5.0f64 / 3.0).sqrt();
            for y in &mut data {
                *y += scale * t5.sample(&mut rng);
            }
        }
        NoiseKind::CenteredExp { sigma } => {
            for y in &mut data {
                let e: f64 = rng.sample(Exp1);
                *y += sigma * (e - 1.0);
            }
        }
        NoiseKind::HeteroSegments { low, high } => {
            let sds = draw_sds(&mut rng, signal.num_changes() + 1, low, high);
            let cps = signal.cps().clone();
            add_gaussian(&mut data, &mut rng, &|i| sds[cps.segment_of(i + 1)]);
        }
        NoiseKind::HeteroBlocks { block, low, high } => {
            let sds = draw_sds(&mut rng, n.div_ceil(block), low, high);
            add_gaussian(&mut data, &mut rng, &|i| sds[i / block]);
        }
        NoiseKind::GaussianPlusPoissonOutliers { sigma, intensity, count } => {
            add_gaussian(&mut data, &mut rng, &|_| sigma);
            let poisson = Poisson::new(intensity).expect("positive intensity");
            let mut positions = sample(&mut rng, n, count).into_vec();
            positions.sort_unstable();
            for i in positions {
                let bump: f64 = poisson.sample(&mut rng);
                for y in &mut data[i * d..(i + 1) * d] {
                    *y += bump;
                }
            }
        }
    }
    Series::from_flat(data, d).expect("finite simulated data")
}

fn draw_sds(rng: &mut ChaCha8Rng, count: usize, low: f64, high: f64) -> Vec<f64> {
    if low == high {
        return vec![low; count];
    }
    let unif = Uniform::new_inclusive(low, high).expect("valid range");
    (0..count).map(|_| unif.sample(rng)).collect()
}

/// Outcome of one replication for one method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationOutcome {
    pub replication: u64,
    pub k_hat: usize,
    pub mise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub method: String,
    pub estimator: Estimator,
    pub scenario: String,
    pub seed: u64,
    pub m: usize,
    pub true_k: usize,
    pub under: usize,
    pub correct: usize,
    pub over: usize,
    pub mise_mean: f64,
    /// Per-replication outcomes in replication order; replication `r` used
    /// stream `r` of the generator keyed by `seed`.
    pub replications: Vec<ReplicationOutcome>,
}

impl SimulationReport {
    fn from_outcomes(
        scenario: &Scenario,
        estimator: Estimator,
        replications: Vec<ReplicationOutcome>,
    ) -> Self {
        let true_k = scenario.true_k();
        let (mut under, mut correct, mut over) = (0, 0, 0);
        let mut mise_sum = 0.0;
        for r in &replications {
            match r.k_hat.cmp(&true_k) {
                std::cmp::Ordering::Less => under += 1,
                std::cmp::Ordering::Equal => correct += 1,
                std::cmp::Ordering::Greater => over += 1,
            }
            mise_sum += r.mise;
        }
        let m = replications.len();
        Self {
            method: estimator.label(),
            estimator,
            scenario: scenario.name.clone(),
            seed: scenario.noise.seed,
            m,
            true_k,
            under,
            correct,
            over,
            mise_mean: mise_sum / m as f64,
            replications,
        }
    }

    pub fn frac_under(&self) -> f64 {
        self.under as f64 / self.m as f64
    }

    pub fn frac_correct(&self) -> f64 {
        self.correct as f64 / self.m as f64
    }

    pub fn frac_over(&self) -> f64 {
        self.over as f64 / self.m as f64
    }
}

/// Runs `m` replications of `scenario`, applying every method to the same
/// simulated series. `workers = 0` uses all available cores.
pub fn run_simulation(
    scenario: &Scenario,
    methods: &[Estimator],
    m: usize,
    k_max: usize,
    workers: usize,
) -> Result<Vec<SimulationReport>> {
    if m == 0 {
        return Err(Error::BadParams("number of replications must be positive".into()));
    }
    if methods.is_empty() {
        return Err(Error::BadParams("no methods given".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::BadParams(format!("cannot start worker pool: {e}")))?;
    let per_rep: Vec<Vec<ReplicationOutcome>> = pool.install(|| {
        (0..m as u64)
            .into_par_iter()
            .map(|r| {
                let series = generate(scenario, r);
                methods
                    .iter()
                    .map(|&method| {
                        let fit = run_estimator(&series, method, k_max)?;
                        let mise = mise(&fit.f_hat, &scenario.signal)?;
                        Ok(ReplicationOutcome { replication: r, k_hat: fit.k_hat, mise })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(methods
        .iter()
        .enumerate()
        .map(|(j, &method)| {
            let outcomes = per_rep.iter().map(|rep| rep[j]).collect();
            SimulationReport::from_outcomes(scenario, method, outcomes)
        })
        .collect())
}

/// Four significant figures, switching to exponent notation for very small
/// or large magnitudes.
pub fn format_sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-4..=5).contains(&exponent) {
        let decimals = (3 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // 9.9996 rounds up to 10.000 and gains a digit.
        if s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len() > 4 && decimals > 0 {
            let decimals = decimals - 1;
            return format!("{x:.decimals$}");
        }
        s
    } else {
        format!("{x:.3e}")
    }
}

/// Writes `method,M,pct_under,pct_correct,pct_over,mise` rows.
pub fn write_report_csv<W: Write>(reports: &[SimulationReport], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["method", "M", "pct_under", "pct_correct", "pct_over", "mise"])?;
    for r in reports {
        wtr.write_record([
            r.method.clone(),
            r.m.to_string(),
            format!("{:.2}", 100.0 * r.frac_under()),
            format!("{:.2}", 100.0 * r.frac_correct()),
            format!("{:.2}", 100.0 * r.frac_over()),
            format_sig4(r.mise_mean),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
