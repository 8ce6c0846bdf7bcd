//! Representative periods from hourly series.
//!
//! The demand-free summer stretch is cut first; the remaining hours are
//! grouped into blocks (days by default), clustered by k-medoids on min-max
//! normalized features, and a zero-weight peak period is appended that takes
//! the worst case of every attribute.

use crate::error::{Error, Result};
use crate::periods::{PeriodEnvironment, PeriodSet};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Hours in a year.
pub const HOURS_PER_YEAR: f64 = 8760.0;
/// Network demand below this fraction of the annual peak counts as no demand.
pub const SUMMER_THRESHOLD: f64 = 1e-3;

/// Hourly drivers of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub consumer_ids: Vec<String>,
    /// Outdoor air temperature per hour (°C).
    pub t_inf: Vec<f64>,
    /// Irradiance per hour (W m^-2).
    pub g_irr: Vec<f64>,
    /// Demand per hour and consumer (W).
    pub demand: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.t_inf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_inf.is_empty()
    }

    fn total_demand(&self, h: usize) -> f64 {
        self.demand[h].iter().sum()
    }

    fn select(&self, keep: impl Fn(usize) -> bool) -> Self {
        let idx: Vec<usize> = (0..self.len()).filter(|&h| keep(h)).collect();
        Self {
            consumer_ids: self.consumer_ids.clone(),
            t_inf: idx.iter().map(|&h| self.t_inf[h]).collect(),
            g_irr: idx.iter().map(|&h| self.g_irr[h]).collect(),
            demand: idx.iter().map(|&h| self.demand[h].clone()).collect(),
        }
    }

    /// Checks that all columns have one entry per hour.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if self.g_irr.len() != n || self.demand.len() != n {
            return Err(Error::ShapeMismatch("time series columns differ in length".into()));
        }
        if self.demand.iter().any(|row| row.len() != self.consumer_ids.len()) {
            return Err(Error::ShapeMismatch("demand row length differs from the consumer count".into()));
        }
        Ok(())
    }
}

/// Active hours per year for an excluded fraction.
pub fn active_hours(excluded_fraction: f64) -> f64 {
    (HOURS_PER_YEAR * (1.0 - excluded_fraction)).round()
}

/// Removes the longest consecutive stretch without network demand.
///
/// Returns the trimmed series and the excluded fraction of the hours.
pub fn exclude_summer(series: &TimeSeries) -> Result<(TimeSeries, f64)> {
    series.validate()?;
    if series.is_empty() {
        return Err(Error::DegenerateSeries("empty series".into()));
    }
    let peak = (0..series.len()).map(|h| series.total_demand(h)).fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::DegenerateSeries("no heat demand in any hour".into()));
    }
    let floor = SUMMER_THRESHOLD * peak;
    let (mut best, mut run_start) = ((0, 0), None);
    for h in 0..=series.len() {
        let quiet = h < series.len() && series.total_demand(h) < floor;
        match (quiet, run_start) {
            (true, None) => run_start = Some(h),
            (false, Some(s)) => {
                if h - s > best.1 - best.0 {
                    best = (s, h);
                }
                run_start = None;
            }
            _ => {}
        }
    }
    let trimmed = series.select(|h| h < best.0 || h >= best.1);
    Ok((trimmed, (best.1 - best.0) as f64 / series.len() as f64))
}

/// Min-max normalized feature vector of each block of `block_len` hours.
fn block_features(series: &TimeSeries, block_len: usize) -> Vec<Vec<f64>> {
    let n_cols = series.consumer_ids.len() + 2;
    let column = |h: usize, j: usize| match j {
        0 => series.t_inf[h],
        1 => series.g_irr[h],
        _ => series.demand[h][j - 2],
    };
    let ranges: Vec<(f64, f64)> = (0..n_cols)
        .map(|j| {
            (0..series.len()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), h| {
                let v = column(h, j);
                (lo.min(v), hi.max(v))
            })
        })
        .collect();
    let n_blocks = series.len() / block_len;
    (0..n_blocks)
        .map(|b| {
            let mut f = Vec::with_capacity(block_len * n_cols);
            for h in b * block_len..(b + 1) * block_len {
                for (j, &(lo, hi)) in ranges.iter().enumerate() {
                    f.push(if hi > lo { (column(h, j) - lo) / (hi - lo) } else { 0.0 });
                }
            }
            f
        })
        .collect()
}

fn sq_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-medoids (k-medoids++ seeding, then PAM swaps) on a distance matrix.
/// Returns the medoid indices and the cluster label of every sample.
pub fn k_medoids(dist: &[Vec<f64>], k: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let n = dist.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut medoids = vec![rng.gen_range(0..n)];
    while medoids.len() < k {
        let weights: Vec<f64> =
            (0..n).map(|i| medoids.iter().map(|&m| dist[i][m]).fold(f64::INFINITY, f64::min)).collect();
        let total: f64 = weights.iter().sum();
        let next = if total > 0.0 {
            let mut r = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, w) in weights.iter().enumerate() {
                if r < *w {
                    pick = i;
                    break;
                }
                r -= w;
            }
            pick
        } else {
            (0..n).find(|i| !medoids.contains(i)).unwrap()
        };
        if medoids.contains(&next) {
            // Only possible through round-off; take the farthest sample.
            let far = (0..n).filter(|i| !medoids.contains(i)).max_by(|&a, &b| weights[a].total_cmp(&weights[b])).unwrap();
            medoids.push(far);
        } else {
            medoids.push(next);
        }
    }
    let cost = |m: &[usize]| -> f64 { (0..n).map(|i| m.iter().map(|&j| dist[i][j]).fold(f64::INFINITY, f64::min)).sum() };
    let mut current = cost(&medoids);
    loop {
        let mut best = (current, None);
        for mi in 0..k {
            for cand in 0..n {
                if medoids.contains(&cand) {
                    continue;
                }
                let mut trial = medoids.clone();
                trial[mi] = cand;
                let c = cost(&trial);
                if c < best.0 - 1e-12 * current.abs().max(1e-300) {
                    best = (c, Some((mi, cand)));
                }
            }
        }
        match best.1 {
            Some((mi, cand)) => {
                medoids[mi] = cand;
                current = best.0;
            }
            None => break,
        }
    }
    medoids.sort_unstable();
    let labels = (0..n)
        .map(|i| (0..k).min_by(|&a, &b| dist[i][medoids[a]].total_cmp(&dist[i][medoids[b]])).unwrap())
        .collect();
    (medoids, labels)
}

/// Mean environment over hours `start..start + len`.
fn block_environment(series: &TimeSeries, start: usize, len: usize, weight: f64) -> PeriodEnvironment {
    let mean = |f: &dyn Fn(usize) -> f64| (start..start + len).map(f).sum::<f64>() / len as f64;
    PeriodEnvironment {
        t_inf: mean(&|h| series.t_inf[h]),
        g_irr: mean(&|h| series.g_irr[h]),
        demand: (0..series.consumer_ids.len()).map(|c| mean(&|h| series.demand[h][c])).collect(),
        weight,
    }
}

/// Clusters blocks of `block_len` hours into `n_clusters` representative
/// periods, weighted by cluster size. A trailing partial block is dropped.
pub fn cluster_periods(series: &TimeSeries, n_clusters: usize, block_len: usize, seed: u64) -> Result<Vec<PeriodEnvironment>> {
    series.validate()?;
    if block_len == 0 || n_clusters == 0 {
        return Err(Error::ShapeMismatch("block length and cluster count must be positive".into()));
    }
    let features = block_features(series, block_len);
    if n_clusters > features.len() {
        return Err(Error::TooManyClusters { requested: n_clusters, available: features.len() });
    }
    let dist: Vec<Vec<f64>> = features.iter().map(|a| features.iter().map(|b| sq_distance(a, b)).collect()).collect();
    let (medoids, labels) = k_medoids(&dist, n_clusters, seed);
    let n = features.len() as f64;
    let mut periods: Vec<PeriodEnvironment> = medoids
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let size = labels.iter().filter(|&&l| l == j).count();
            block_environment(series, m * block_len, block_len, size as f64 / n)
        })
        .collect();
    // Heaviest first; ties keep chronological order.
    periods.sort_by(|a, b| b.weight.total_cmp(&a.weight));
    Ok(periods)
}

/// Worst case of every attribute: each consumer's own maximum demand and the
/// lowest temperature and irradiance, with zero weight.
pub fn synthesize_peak(series: &TimeSeries) -> Result<PeriodEnvironment> {
    series.validate()?;
    if series.is_empty() {
        return Err(Error::DegenerateSeries("empty series".into()));
    }
    Ok(PeriodEnvironment {
        t_inf: series.t_inf.iter().cloned().fold(f64::INFINITY, f64::min),
        g_irr: series.g_irr.iter().cloned().fold(f64::INFINITY, f64::min),
        demand: (0..series.consumer_ids.len())
            .map(|c| series.demand.iter().map(|row| row[c]).fold(0.0, f64::max))
            .collect(),
        weight: 0.0,
    })
}

/// Full aggregation: summer exclusion, clustering and the peak period.
pub fn build_period_set(series: &TimeSeries, n_clusters: usize, block_len: usize, seed: u64) -> Result<PeriodSet> {
    let (trimmed, excluded) = exclude_summer(series)?;
    let mut periods = cluster_periods(&trimmed, n_clusters, block_len, seed)?;
    periods.push(synthesize_peak(series)?);
    let set = PeriodSet {
        peak: Some(periods.len() - 1),
        periods,
        active_hours: active_hours(excluded),
        excluded_fraction: excluded,
    };
    set.validate(series.consumer_ids.len())?;
    Ok(set)
}
