//! SNR sweeps. Trials run in fixed-size parallel batches; the early-stop rule
//! is evaluated only between batches, so the counts are independent of the
//! thread count.

use rayon::prelude::*;

use crate::error::Result;
use crate::gaussian::GaussianReceiver;

use super::config::{FadingPlan, GaussianPlan, ScenarioKind};
use super::stats::WilsonInterval;
use super::trials::{run_fading_trial, run_gaussian_trial, TrialRecord};

pub const THREADS_ENV: &str = "CF_LATTICE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub snr_db: f64,
    pub trials: u64,
    pub errors: u64,
    pub pe: f64,
    pub ci95_half: f64,
}

impl RatePoint {
    pub fn new(snr_db: f64, trials: u64, errors: u64) -> Self {
        let pe = if trials == 0 { 0.0 } else { errors as f64 / trials as f64 };
        RatePoint { snr_db, trials, errors, pe, ci95_half: WilsonInterval::ci95(errors, trials).half_width() }
    }

    pub fn interval(&self) -> WilsonInterval {
        WilsonInterval::ci95(self.errors, self.trials)
    }
}

/// Error-rate curve of one decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRateCurve {
    pub scenario: &'static str,
    pub decoder: &'static str,
    pub points: Vec<RatePoint>,
}

impl ErrorRateCurve {
    /// SNR (dB) at which the curve crosses `pe`, interpolating `log₁₀ P_e`
    /// linearly between grid points. Points without errors are skipped.
    pub fn snr_at(&self, pe: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|p| p.errors > 0)
            .map(|p| (p.snr_db, p.pe.log10()))
            .collect();
        let target = pe.log10();
        pts.windows(2).find_map(|w| {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if (y0 - target) * (y1 - target) <= 0.0 && y0 != y1 {
                Some(x0 + (target - y0) * (x1 - x0) / (y1 - y0))
            } else {
                None
            }
        })
    }

    /// Least-squares slope of `log₁₀ P_e` against SNR (dB) over points with
    /// `snr_db ≥ from_db` that recorded errors.
    pub fn log_slope(&self, from_db: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|p| p.snr_db >= from_db && p.errors > 0)
            .map(|p| (p.snr_db, p.pe.log10()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }

    /// Diversity implied by [`log_slope`](Self::log_slope): `P_e ∝ ρ^(−d)`
    /// gives a slope of `−d/10` per dB.
    pub fn diversity(&self, from_db: f64) -> Option<f64> {
        self.log_slope(from_db).map(|s| -10.0 * s)
    }
}

/// Rayon pool honouring `CF_LATTICE_THREADS`.
pub fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

/// Runs trials of one SNR point until `max_trials`, or until every decoder has
/// `target_errors` errors.
fn run_point<F>(decoders: usize, max_trials: u64, target_errors: u64, batch: u64, trial: F) -> (u64, Vec<u64>)
where
    F: Fn(u64) -> TrialRecord + Sync,
{
    let mut done = 0u64;
    let mut errors = vec![0u64; decoders];
    while done < max_trials {
        let end = (done + batch).min(max_trials);
        let counts = (done..end)
            .into_par_iter()
            .map(|i| {
                let r = trial(i);
                r.errors().map(u64::from).collect::<Vec<_>>()
            })
            .reduce(
                || vec![0u64; decoders],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        errors.iter_mut().zip(counts).for_each(|(x, y)| *x += y);
        done = end;
        if target_errors > 0 && errors.iter().all(|&e| e >= target_errors) {
            break;
        }
    }
    (done, errors)
}

fn assemble(scenario: &'static str, names: &[&'static str], snr: &[f64], per_point: Vec<(u64, Vec<u64>)>) -> Vec<ErrorRateCurve> {
    names
        .iter()
        .enumerate()
        .map(|(d, &decoder)| ErrorRateCurve {
            scenario,
            decoder,
            points: snr
                .iter()
                .zip(&per_point)
                .map(|(&s, (trials, errs))| RatePoint::new(s, *trials, errs[d]))
                .collect(),
        })
        .collect()
}

pub fn sweep_fading(plan: &FadingPlan) -> Vec<ErrorRateCurve> {
    let pool = thread_pool();
    let per_point = pool.install(|| {
        (0..plan.snr_db.len())
            .map(|p| {
                run_point(plan.decoders.len(), plan.max_trials, plan.target_errors, plan.batch, |i| {
                    run_fading_trial(plan, p as u32, i)
                })
            })
            .collect::<Vec<_>>()
    });
    let names: Vec<&'static str> = plan.decoders.iter().map(|d| d.name()).collect();
    assemble(ScenarioKind::Fading1d.name(), &names, &plan.snr_db, per_point)
}

pub fn sweep_gaussian(plan: &GaussianPlan) -> Result<Vec<ErrorRateCurve>> {
    let pool = thread_pool();
    let per_point = pool.install(|| {
        plan.snr_db
            .iter()
            .enumerate()
            .map(|(p, &snr)| {
                let rx = GaussianReceiver::new(&plan.code, &plan.sum, plan.noise_var(snr))?;
                Ok(run_point(plan.decoders.len(), plan.max_trials, plan.target_errors, plan.batch, |i| {
                    run_gaussian_trial(plan, &rx, p as u32, i)
                }))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let names: Vec<&'static str> = plan.decoders.iter().map(|d| d.name()).collect();
    Ok(assemble(ScenarioKind::GaussianMap.name(), &names, &plan.snr_db, per_point))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(points: &[(f64, u64, u64)]) -> ErrorRateCurve {
        ErrorRateCurve {
            scenario: "test",
            decoder: "d",
            points: points.iter().map(|&(s, n, e)| RatePoint::new(s, n, e)).collect(),
        }
    }

    #[test]
    fn crossing_interpolates_in_log_domain() {
        let c = curve(&[(0.0, 1000, 500), (10.0, 1000, 5)]);
        let x = c.snr_at(0.05).unwrap();
        assert!((x - 5.0).abs() < 1e-9);
        assert!(c.snr_at(1e-4).is_none());
    }

    #[test]
    fn slope_of_unit_diversity() {
        // P_e = 1/ρ ⇒ slope −0.1 per dB
        let pts: Vec<(f64, u64, u64)> = (0..5).map(|i| (10.0 * i as f64, 10u64.pow(i + 2), 100)).collect();
        let c = curve(&pts);
        assert!((c.diversity(0.0).unwrap() - 1.0).abs() < 1e-9);
    }
}
