//! Reference implementations used only by the tests. Everything here is
//! written from the defining formulas with plain loops: no prefix sums, no
//! shared code with the production criteria.

#![allow(dead_code)]

use cpcv::{ChangePointSet, Series};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[allow(unused_imports)]
pub use cpcv::brute_force_partition;

/// Largest series the direct evaluators accept.
pub const DIRECT_LIMIT: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    Cv2,
    Cv1,
    CvMod,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    TooLarge { n: usize },
    BadGeometry(String),
}

/// Row `i` (1-based) as a vector.
fn y(series: &Series, i: usize) -> Vec<f64> {
    series.row(i - 1).to_vec()
}

fn mean_of(series: &Series, from: usize, to: usize) -> Vec<f64> {
    let d = series.dim();
    let mut acc = vec![0.0; d];
    for i in from..=to {
        for (a, v) in acc.iter_mut().zip(y(series, i)) {
            *a += v;
        }
    }
    let count = (to - from + 1) as f64;
    acc.iter().map(|a| a / count).collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Residual sum of squares of observations `from..=to` (1-based).
pub fn rss(series: &Series, from: usize, to: usize) -> f64 {
    let m = mean_of(series, from, to);
    (from..=to).map(|i| sq_dist(&y(series, i), &m)).sum()
}

/// Least-squares segmentation with `l` change-points by a forward dynamic
/// program over prefixes, every segment cost recomputed from scratch.
pub fn naive_partition(series: &Series, l: usize) -> (Vec<usize>, f64) {
    let n = series.len();
    assert!(l < n);
    let inf = f64::INFINITY;
    // best[k][j]: k + 1 segments covering 1..=j; arg[k][j] last change-point
    let mut best = vec![vec![inf; n + 1]; l + 1];
    let mut arg = vec![vec![0usize; n + 1]; l + 1];
    for j in 1..=n {
        best[0][j] = rss(series, 1, j);
    }
    for k in 1..=l {
        for j in (k + 1)..=n {
            for t in k..j {
                let c = best[k - 1][t] + rss(series, t + 1, j);
                if c < best[k][j] {
                    best[k][j] = c;
                    arg[k][j] = t;
                }
            }
        }
    }
    let mut taus = Vec::with_capacity(l);
    let mut j = n;
    for k in (1..=l).rev() {
        j = arg[k][j];
        taus.push(j);
    }
    taus.reverse();
    (taus, best[l][n])
}

fn halves(series: &Series) -> (Series, Series) {
    let n = series.len();
    let odd: Vec<usize> = (1..=n).step_by(2).collect();
    let even: Vec<usize> = (2..=n).step_by(2).collect();
    (series.select(&odd), series.select(&even))
}

/// Two-fold criterion evaluated term by term from its defining sums.
pub fn criterion_direct(series: &Series, l: usize, method: OracleMethod) -> Result<f64, OracleError> {
    let n = series.len();
    if n > DIRECT_LIMIT {
        return Err(OracleError::TooLarge { n });
    }
    assert!(n.is_multiple_of(2) && l < n / 2);
    let m = n / 2;
    let (yo, ye) = halves(series);
    let (to, _) = naive_partition(&yo, l);
    let (te, _) = naive_partition(&ye, l);
    let bounds = |t: &[usize]| {
        let mut b = vec![0];
        b.extend_from_slice(t);
        b.push(m);
        b
    };
    let (bo, be) = (bounds(&to), bounds(&te));
    let mut total = 0.0;
    for s in 0..=l {
        let (lo, hi) = (bo[s], bo[s + 1]);
        let mean = mean_of(&yo, lo + 1, hi);
        match method {
            OracleMethod::Cv2 => {
                for i in lo + 1..=hi {
                    total += sq_dist(&y(&ye, i), &mean);
                }
            }
            OracleMethod::Cv1 => {
                for i in lo + 1..=hi {
                    total += sq_dist(&y(&ye, i), &mean).sqrt();
                }
            }
            OracleMethod::CvMod => {
                let len = hi - lo;
                if len < 2 {
                    return Ok(f64::INFINITY);
                }
                let mut part = 0.0;
                for i in lo + 1..=hi - 1 {
                    part += sq_dist(&y(&ye, i), &mean);
                }
                total += len as f64 / (len as f64 - 1.0) * part;
            }
        }
    }
    for s in 0..=l {
        let (lo, hi) = (be[s], be[s + 1]);
        let mean = mean_of(&ye, lo + 1, hi);
        match method {
            OracleMethod::Cv2 => {
                for i in lo + 1..=hi {
                    total += sq_dist(&y(&yo, i), &mean);
                }
            }
            OracleMethod::Cv1 => {
                for i in lo + 1..=hi {
                    total += sq_dist(&y(&yo, i), &mean).sqrt();
                }
            }
            OracleMethod::CvMod => {
                let len = hi - lo;
                if len < 2 {
                    return Ok(f64::INFINITY);
                }
                let mut part = 0.0;
                for i in lo + 2..=hi {
                    part += sq_dist(&y(&yo, i), &mean);
                }
                total += len as f64 / (len as f64 - 1.0) * part;
            }
        }
    }
    Ok(total)
}

/// Approximate `CV2(2) - CV2(1)` on the noiseless two-change instance with
/// levels `(delta1, 0, delta2)` and change-points `n/2 - lambda`, `n/2`.
pub fn noiseless_cv2_gap(n: usize, lambda: usize, delta1: f64, delta2: f64) -> Result<f64, OracleError> {
    if !n.is_multiple_of(2) || (n / 2).is_multiple_of(2) {
        return Err(OracleError::BadGeometry(format!("n = {n} needs n even and n/2 odd")));
    }
    if lambda.is_multiple_of(2) || 4 * lambda >= n {
        return Err(OracleError::BadGeometry(format!("lambda = {lambda} needs to be odd and below n/4")));
    }
    let (n, lambda) = (n as f64, lambda as f64);
    Ok(delta1 * delta1 * (2.0 * delta2 / delta1 - lambda) * (1.0 - 2.0 * lambda / n))
}

/// The noiseless two-change instance behind [`noiseless_cv2_gap`].
pub fn example_one(n: usize, lambda: usize, delta1: f64, delta2: f64) -> Series {
    let (t1, t2) = (n / 2 - lambda, n / 2);
    let values = (1..=n)
        .map(|i| if i <= t1 { delta1 } else if i <= t2 { 0.0 } else { delta2 })
        .collect();
    Series::univariate(values).unwrap()
}

/// V-fold criterion written out literally: fold `v` holds `v, v + V, ...`,
/// training on the rest with [`naive_partition`], change-points mapped back
/// through the sorted training positions.
pub fn vfold_direct(series: &Series, v_folds: usize, l: usize, modified: bool) -> f64 {
    let n = series.len();
    let mut total = 0.0;
    for v in 1..=v_folds {
        let held: Vec<usize> = (1..=n).filter(|i| i % v_folds == v % v_folds).collect();
        let train_pos: Vec<usize> = (1..=n).filter(|i| i % v_folds != v % v_folds).collect();
        let train = series.select(&train_pos);
        let (taus, _) = naive_partition(&train, l);
        let mut bounds_train = vec![0];
        bounds_train.extend_from_slice(&taus);
        bounds_train.push(train_pos.len());
        let mut bounds_full = vec![0];
        bounds_full.extend(taus.iter().map(|&t| train_pos[t - 1]));
        bounds_full.push(n);
        if modified && bounds_full.windows(2).any(|w| w[1] - w[0] < 2 * (v_folds - 1)) {
            return f64::INFINITY;
        }
        for &i in &held {
            let k = (0..=l).find(|&k| bounds_full[k] < i && i <= bounds_full[k + 1]).unwrap();
            let level = mean_of(&train, bounds_train[k] + 1, bounds_train[k + 1]);
            let e = sq_dist(&y(series, i), &level);
            if modified {
                let (lo, hi) = (bounds_full[k], bounds_full[k + 1]);
                if i > lo + 1 {
                    let len = (hi - lo) as f64;
                    total += len / (len - 1.0) * e;
                }
            } else {
                total += e.sqrt();
            }
        }
    }
    total
}

/// Seeded Gaussian step series: `k` random change-points, levels drawn
/// uniformly in `[-5, 5]`, unit noise.
pub fn random_step_series(seed: u64, n: usize, d: usize, k: usize) -> Series {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cps: Vec<usize> = rand::seq::index::sample(&mut rng, n - 1, k.min(n - 1))
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cps.sort_unstable();
    let cps = ChangePointSet::new(n, cps).unwrap();
    let levels: Vec<Vec<f64>> = (0..=cps.len())
        .map(|_| (0..d).map(|_| rand::Rng::random_range(&mut rng, -5.0..5.0)).collect())
        .collect();
    let mut data = Vec::with_capacity(n * d);
    for i in 1..=n {
        let k = cps.segment_of(i);
        for level in &levels[k] {
            let z: f64 = StandardNormal.sample(&mut rng);
            data.push(level + z);
        }
    }
    Series::from_flat(data, d).unwrap()
}

/// Relative closeness with an absolute floor for values near zero.
pub fn close(a: f64, b: f64, rel: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
