//! Empirical cumulants and correlation coefficients from walk ensembles.
//!
//! One-point cumulants use unbiased k-statistics; joint cumulants across
//! several times use plug-in moment combinations over the M realizations
//! (bias O(1/M), far below the bootstrap standard errors at the ensemble
//! sizes used here). All standard errors come from a nonparametric
//! bootstrap that resamples whole realizations — resampling time points
//! would tear up the walk structure. Bootstrap replicate r draws its
//! indices from ChaCha12 stream r keyed by the bootstrap seed, so error
//! bars are reproducible and parallelism-independent.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cumulants::CumulantSet;
use crate::error::{Error, Result};
use crate::sampler::{stream_rng, WalkEnsemble};
use crate::walk_theory::{self, CorrelationQuery};

/// Bootstrap resampling parameters. The seed is independent of the
/// ensemble seed; derive it from the experiment seed by a fixed offset if
/// a single master seed must drive everything.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            resamples: 200,
            seed: 0xB007_5EED,
        }
    }
}

/// A point estimate with its bootstrap standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Unbiased k-statistics k₁..k_max of a sample (max_order ≤ 4).
///
/// k₄ needs at least 10 observations; a constant sample is rejected since
/// every standardized quantity downstream divides by k₂.
pub fn k_statistics(sample: &[f64], max_order: usize) -> Result<Vec<f64>> {
    if !(1..=4).contains(&max_order) {
        return Err(Error::Domain("k-statistics support orders 1..=4".to_string()));
    }
    let required = match max_order {
        1 => 1,
        2 => 2,
        3 => 3,
        _ => 10,
    };
    if sample.len() < required {
        return Err(Error::Domain(format!(
            "need at least {required} observations for k_{max_order}, got {}",
            sample.len()
        )));
    }
    let stats = k_statistics_unchecked(sample, max_order);
    if max_order >= 2 && stats[1] <= 0.0 {
        return Err(Error::Domain(
            "sample has zero variance; standardized cumulants are undefined".to_string(),
        ));
    }
    Ok(stats)
}

/// Core k-statistic computation without argument checking (bootstrap
/// replicates go through here).
fn k_statistics_unchecked(sample: &[f64], max_order: usize) -> Vec<f64> {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0f64, 0.0f64, 0.0f64);
    for &x in sample {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    let mut out = vec![mean];
    if max_order >= 2 {
        out.push(if n > 1.0 { n / (n - 1.0) * m2 } else { 0.0 });
    }
    if max_order >= 3 {
        out.push(if n > 2.0 {
            n * n / ((n - 1.0) * (n - 2.0)) * m3
        } else {
            0.0
        });
    }
    if max_order >= 4 {
        out.push(if n > 3.0 {
            n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2)
                / ((n - 1.0) * (n - 2.0) * (n - 3.0))
        } else {
            0.0
        });
    }
    out
}

fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Bootstrap standard deviation of `stat` over resampled index vectors
/// drawn from `0..m` with replacement.
fn bootstrap_std<F>(m: usize, cfg: &BootstrapConfig, stat: F) -> f64
where
    F: Fn(&[u32]) -> f64 + Sync,
{
    let reps: Vec<f64> = (0..cfg.resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(cfg.seed, r as u64);
            let idx: Vec<u32> = (0..m).map(|_| rng.random_range(0..m as u32)).collect();
            stat(&idx)
        })
        .collect();
    std_dev(&reps)
}

/// k₁..k_max with bootstrap standard errors.
pub fn sample_cumulants(
    sample: &[f64],
    max_order: usize,
    cfg: &BootstrapConfig,
) -> Result<Vec<Estimate>> {
    let point = k_statistics(sample, max_order)?;
    let reps: Vec<Vec<f64>> = (0..cfg.resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(cfg.seed, r as u64);
            let resample: Vec<f64> = (0..sample.len())
                .map(|_| sample[rng.random_range(0..sample.len())])
                .collect();
            k_statistics_unchecked(&resample, max_order)
        })
        .collect();
    Ok(point
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let col: Vec<f64> = reps.iter().map(|rep| rep[i]).collect();
            Estimate {
                value,
                std_error: std_dev(&col),
            }
        })
        .collect())
}

/// Plug-in joint cumulant of the given position columns, optionally over a
/// bootstrap index vector. Orders 2..4; all moments are central.
fn plugin_joint_cumulant(cols: &[&[f64]], idx: Option<&[u32]>) -> f64 {
    let j = cols.len();
    let m = idx.map_or(cols[0].len(), <[u32]>::len);
    let mf = m as f64;
    let get = |col: &[f64], i: usize| -> f64 {
        match idx {
            Some(ids) => col[ids[i] as usize],
            None => col[i],
        }
    };
    let mut means = vec![0.0f64; j];
    for i in 0..m {
        for (c, mean) in means.iter_mut().enumerate() {
            *mean += get(cols[c], i);
        }
    }
    for mean in &mut means {
        *mean /= mf;
    }
    match j {
        2 => {
            let mut s = 0.0;
            for i in 0..m {
                s += (get(cols[0], i) - means[0]) * (get(cols[1], i) - means[1]);
            }
            s / mf
        }
        3 => {
            let mut s = 0.0;
            for i in 0..m {
                s += (get(cols[0], i) - means[0])
                    * (get(cols[1], i) - means[1])
                    * (get(cols[2], i) - means[2]);
            }
            s / mf
        }
        4 => {
            let (mut s1234, mut s12, mut s34, mut s13, mut s24, mut s14, mut s23) =
                (0.0f64, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            for i in 0..m {
                let a = get(cols[0], i) - means[0];
                let b = get(cols[1], i) - means[1];
                let c = get(cols[2], i) - means[2];
                let d = get(cols[3], i) - means[3];
                s1234 += a * b * c * d;
                s12 += a * b;
                s34 += c * d;
                s13 += a * c;
                s24 += b * d;
                s14 += a * d;
                s23 += b * c;
            }
            s1234 / mf - (s12 * s34 + s13 * s24 + s14 * s23) / (mf * mf)
        }
        _ => unreachable!("orders are validated to 2..=4"),
    }
}

fn ensemble_columns(ens: &WalkEnsemble, times: &[u64]) -> Result<Vec<Vec<f64>>> {
    if !(2..=4).contains(&times.len()) {
        return Err(Error::Domain(format!(
            "joint estimators support orders 2..=4, got {}",
            times.len()
        )));
    }
    if ens.walks() < 100 {
        return Err(Error::Domain(format!(
            "need at least 100 realizations for joint estimates, got {}",
            ens.walks()
        )));
    }
    let usizes: Vec<usize> = times.iter().map(|&t| t as usize).collect();
    ens.positions_at(&usizes)
}

/// Ensemble estimate of the joint cumulant K_j(n₁..n_j) with bootstrap
/// standard error.
pub fn joint_cumulant(ens: &WalkEnsemble, times: &[u64], cfg: &BootstrapConfig) -> Result<Estimate> {
    let cols = ensemble_columns(ens, times)?;
    let views: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    let value = plugin_joint_cumulant(&views, None);
    let std_error = bootstrap_std(ens.walks(), cfg, |idx| plugin_joint_cumulant(&views, Some(idx)));
    Ok(Estimate { value, std_error })
}

/// Theory-vs-simulation record for one correlation query.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    #[serde(flatten)]
    pub query: CorrelationQuery,
    pub theory: f64,
    pub empirical: f64,
    pub std_error: f64,
    pub z_score: f64,
    pub m_used: usize,
}

fn correlation_from_columns(views: &[&[f64]], idx: Option<&[u32]>) -> f64 {
    let k = plugin_joint_cumulant(views, idx);
    let mut denom = 1.0;
    for col in views {
        denom *= plugin_joint_cumulant(&[col, col], idx).sqrt();
    }
    k / denom
}

/// Empirical correlation coefficient with bootstrap standard error and no
/// theory attached (for family-vs-family ratio studies).
pub fn empirical_correlation(
    ens: &WalkEnsemble,
    times: &[u64],
    cfg: &BootstrapConfig,
) -> Result<Estimate> {
    let cols = ensemble_columns(ens, times)?;
    let views: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    let value = correlation_from_columns(&views, None);
    let std_error = bootstrap_std(ens.walks(), cfg, |idx| correlation_from_columns(&views, Some(idx)));
    Ok(Estimate { value, std_error })
}

/// Empirical correlation coefficient R_j = K̂_j / Πσ̂(nᵢ), with the
/// theoretical value from the supplied cumulant set attached.
pub fn correlation_coefficient(
    ens: &WalkEnsemble,
    times: &[u64],
    theory: &CumulantSet,
    cfg: &BootstrapConfig,
) -> Result<CorrelationReport> {
    let cols = ensemble_columns(ens, times)?;
    let views: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    let empirical = correlation_from_columns(&views, None);
    let std_error = bootstrap_std(ens.walks(), cfg, |idx| correlation_from_columns(&views, Some(idx)));
    let theory_value = walk_theory::general_coefficient(theory, times)?;
    Ok(CorrelationReport {
        query: CorrelationQuery::from_times(times.to_vec())?,
        theory: theory_value,
        empirical,
        std_error,
        z_score: (empirical - theory_value) / std_error,
        m_used: ens.walks(),
    })
}

/// One row of the Gaussian-convergence scan.
#[derive(Debug, Clone, Serialize)]
pub struct CltRow {
    pub n: u64,
    pub lambda3: Estimate,
    pub lambda4: Estimate,
}

/// Least-squares slope with its standard error and ~95% interval.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Standardized-cumulant decay scan: Λ̂₃(n), Λ̂₄(n) at log-spaced n with
/// fitted log-log slopes (theory: −1/2 and −1).
#[derive(Debug, Clone, Serialize)]
pub struct CltScan {
    pub rows: Vec<CltRow>,
    pub slope3: SlopeFit,
    pub slope4: SlopeFit,
    pub warnings: Vec<String>,
}

fn ols_log_slope(points: &[(f64, f64)]) -> SlopeFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let dof = (points.len().max(3) - 2) as f64;
    let std_error = (ss_res / dof / sxx).sqrt();
    SlopeFit {
        slope,
        std_error,
        ci_low: slope - 1.96 * std_error,
        ci_high: slope + 1.96 * std_error,
    }
}

/// Scans Λ̂₃ and Λ̂₄ over n ∈ {1, 2, 4, …} ≤ N and fits their log-log
/// decay slopes. Needs N ≥ 32 to have enough scale range.
pub fn clt_convergence_scan(ens: &WalkEnsemble, cfg: &BootstrapConfig) -> Result<CltScan> {
    if ens.steps() < 32 {
        return Err(Error::Domain(format!(
            "scan needs N >= 32 steps, got {}",
            ens.steps()
        )));
    }
    let mut ns = Vec::new();
    let mut n = 1usize;
    while n <= ens.steps() {
        ns.push(n);
        n *= 2;
    }
    let cols = ens.positions_at(&ns)?;
    let mut warnings = Vec::new();

    let standardized = |sample: &[f64], idx: Option<&[u32]>| -> (f64, f64) {
        let ks = match idx {
            None => k_statistics_unchecked(sample, 4),
            Some(ids) => {
                let chosen: Vec<f64> = ids.iter().map(|&i| sample[i as usize]).collect();
                k_statistics_unchecked(&chosen, 4)
            }
        };
        let sigma = ks[1].sqrt();
        (ks[2] / sigma.powi(3), ks[3] / sigma.powi(4))
    };

    let mut rows = Vec::with_capacity(ns.len());
    for (i, &n) in ns.iter().enumerate() {
        let col = &cols[i];
        let (l3, l4) = standardized(col, None);
        let boot: Vec<(f64, f64)> = (0..cfg.resamples)
            .into_par_iter()
            .map(|r| {
                let mut rng = stream_rng(cfg.seed, (i * cfg.resamples + r) as u64);
                let idx: Vec<u32> = (0..col.len())
                    .map(|_| rng.random_range(0..col.len() as u32))
                    .collect();
                standardized(col, Some(&idx))
            })
            .collect();
        let se3 = std_dev(&boot.iter().map(|b| b.0).collect::<Vec<_>>());
        let se4 = std_dev(&boot.iter().map(|b| b.1).collect::<Vec<_>>());
        rows.push(CltRow {
            n: n as u64,
            lambda3: Estimate {
                value: l3,
                std_error: se3,
            },
            lambda4: Estimate {
                value: l4,
                std_error: se4,
            },
        });
    }

    let mut fit = |pick: &dyn Fn(&CltRow) -> Estimate, label: &str| -> SlopeFit {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|row| {
                let e = pick(row);
                e.value != 0.0 && e.value.abs() > e.std_error
            })
            .map(|row| ((row.n as f64).ln(), pick(row).value.abs().ln()))
            .collect();
        if pts.len() < 3 {
            warnings.push(format!(
                "{label}: fewer than 3 points above noise; slope is unreliable (increase M)"
            ));
            return SlopeFit {
                slope: f64::NAN,
                std_error: f64::NAN,
                ci_low: f64::NAN,
                ci_high: f64::NAN,
            };
        }
        let fit = ols_log_slope(&pts);
        if fit.ci_high - fit.ci_low > 0.5 {
            warnings.push(format!(
                "{label}: slope interval wider than 0.5; increase M for a tighter fit"
            ));
        }
        fit
    };

    let slope3 = fit(&|r| r.lambda3, "lambda3 scan");
    let slope4 = fit(&|r| r.lambda4, "lambda4 scan");
    Ok(CltScan {
        rows,
        slope3,
        slope4,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulants::{oracle_cumulants, StableParams};
    use crate::deformation::DeformationSpec;
    use rand::Rng;

    fn cfg() -> BootstrapConfig {
        BootstrapConfig {
            resamples: 200,
            seed: 4242,
        }
    }

    /// Synthetic Gaussian-increment ensemble with unit increment variance.
    fn gaussian_ensemble(walks: usize, steps: usize, seed: u64) -> WalkEnsemble {
        let spec = DeformationSpec::mantegna_stanley(1.0, 100.0).unwrap();
        let stable = StableParams::new(1.0, 1.0).unwrap();
        let mut rng = stream_rng(seed, 0);
        let increments: Vec<f64> = (0..walks * steps)
            .map(|_| {
                // Box–Muller
                let u1: f64 = rng.random::<f64>().max(1e-300);
                let u2: f64 = rng.random();
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        WalkEnsemble::from_increments(&spec, stable, walks, steps, seed, increments, 1.0).unwrap()
    }

    #[test]
    fn k_statistics_reject_degenerate_input() {
        assert!(matches!(
            k_statistics(&[2.0; 50], 4),
            Err(Error::Domain(msg)) if msg.contains("zero variance")
        ));
        assert!(k_statistics(&[1.0, 2.0, 3.0], 4).is_err()); // too short for k4
        assert!(k_statistics(&[1.0, 2.0, 3.0], 3).is_ok());
    }

    #[test]
    fn k_statistics_match_hand_computation() {
        let sample = [1.0, 2.0, 3.0, 4.0, 10.0, 0.0, -3.0, 7.0, 2.0, 2.0, 5.0, 3.0];
        let k = k_statistics(&sample, 4).unwrap();
        let n = 12.0f64;
        let mean = sample.iter().sum::<f64>() / n;
        let m2 = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m3 = sample.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
        let m4 = sample.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        assert!((k[0] - mean).abs() < 1e-14);
        assert!((k[1] - n / (n - 1.0) * m2).abs() < 1e-12);
        assert!((k[2] - n * n / ((n - 1.0) * (n - 2.0)) * m3).abs() < 1e-12);
        let k4 = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2)
            / ((n - 1.0) * (n - 2.0) * (n - 3.0));
        assert!((k[3] - k4).abs() < 1e-10);
    }

    #[test]
    fn gaussian_sample_has_vanishing_high_cumulants() {
        let mut rng = stream_rng(77, 0);
        let sample: Vec<f64> = (0..500_000)
            .map(|_| {
                let u1: f64 = rng.random::<f64>().max(1e-300);
                let u2: f64 = rng.random();
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let est = sample_cumulants(&sample, 4, &cfg()).unwrap();
        assert!(est[2].value.abs() < 3.0 * est[2].std_error, "k3 {:?}", est[2]);
        assert!(est[3].value.abs() < 3.0 * est[3].std_error, "k4 {:?}", est[3]);
        assert!((est[1].value - 1.0).abs() < 3.0 * est[1].std_error);
    }

    #[test]
    fn truncated_increment_kurtosis_matches_engine() {
        // pooled increments of a hard-cut Cauchy ensemble: k₄/k₂² within
        // 3 SE of the engine's λ₄ = π(l/γ)/6
        let spec = DeformationSpec::mantegna_stanley(1.0, 100.0).unwrap();
        let stable = StableParams::new(1.0, 1.0).unwrap();
        let ens = WalkEnsemble::generate(&spec, stable, 10_000, 100, 2024).unwrap();
        let est = sample_cumulants(ens.increments(), 4, &cfg()).unwrap();
        let lambda4_hat = est[3].value / (est[1].value * est[1].value);
        let se = est[3].std_error / (est[1].value * est[1].value);
        let want = std::f64::consts::PI * 100.0 / 6.0;
        assert!(
            (lambda4_hat - want).abs() < 3.0 * se,
            "{lambda4_hat} vs {want} ± {se}"
        );
    }

    #[test]
    fn joint_cumulant_degenerate_is_plugin_variance() {
        let ens = gaussian_ensemble(500, 8, 5);
        let est = joint_cumulant(&ens, &[5, 5], &cfg()).unwrap();
        let col = &ens.positions_at(&[5]).unwrap()[0];
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / col.len() as f64;
        assert!((est.value - var).abs() < 1e-12 * var);
    }

    #[test]
    fn joint_cumulant_is_permutation_invariant() {
        let ens = gaussian_ensemble(500, 16, 6);
        let a = joint_cumulant(&ens, &[3, 9, 14], &cfg()).unwrap();
        let b = joint_cumulant(&ens, &[14, 3, 9], &cfg()).unwrap();
        // identical up to summation-order rounding
        assert!((a.value - b.value).abs() < 1e-12 * a.value.abs().max(1.0));
    }

    #[test]
    fn gaussian_joint_cumulants_follow_min_law() {
        let ens = gaussian_ensemble(50_000, 16, 7);
        // K₂(n₁, n₂) = min (unit increment variance)
        for times in [[4u64, 9], [8, 16], [2, 2]] {
            let est = joint_cumulant(&ens, &times, &cfg()).unwrap();
            let want = *times.iter().min().unwrap() as f64;
            assert!(
                (est.value - want).abs() < 3.0 * est.std_error,
                "{times:?}: {} vs {want} ± {}",
                est.value,
                est.std_error
            );
        }
        // zero skewness: K₃ ≈ 0
        let est = joint_cumulant(&ens, &[4, 8, 12], &cfg()).unwrap();
        assert!(est.value.abs() < 3.0 * est.std_error);
    }

    #[test]
    fn asymmetric_threefold_cumulant_matches_oracle() {
        let spec = DeformationSpec::exponential(1.2, 100.0).unwrap();
        let stable = StableParams::new(1.0, 1.0).unwrap();
        let ens = WalkEnsemble::generate(&spec, stable, 60_000, 20, 321).unwrap();
        let kappa3 = oracle_cumulants(&spec, stable, 4).unwrap().kappa(3);
        let est = joint_cumulant(&ens, &[5, 10, 20], &cfg()).unwrap();
        let want = kappa3 * 5.0;
        assert!(
            (est.value - want).abs() < 3.0 * est.std_error,
            "{} vs {want} ± {}",
            est.value,
            est.std_error
        );
    }

    #[test]
    fn self_correlation_is_exactly_one() {
        let ens = gaussian_ensemble(500, 8, 8);
        let theory = oracle_cumulants(
            &DeformationSpec::mantegna_stanley(1.0, 100.0).unwrap(),
            StableParams::new(1.0, 1.0).unwrap(),
            4,
        )
        .unwrap();
        let rep = correlation_coefficient(&ens, &[6, 6], &theory, &cfg()).unwrap();
        assert!((rep.empirical - 1.0).abs() < 1e-12);
        assert_eq!(rep.theory, 1.0);
    }

    #[test]
    fn autocorrelation_estimate_is_distribution_free() {
        let ens = gaussian_ensemble(50_000, 16, 9);
        let theory = oracle_cumulants(
            &DeformationSpec::mantegna_stanley(1.0, 100.0).unwrap(),
            StableParams::new(1.0, 1.0).unwrap(),
            4,
        )
        .unwrap();
        let rep = correlation_coefficient(&ens, &[4, 9], &theory, &cfg()).unwrap();
        assert!((rep.theory - 2.0 / 3.0).abs() < 1e-15);
        assert!(
            rep.z_score.abs() < 3.0,
            "z = {} (emp {}, se {})",
            rep.z_score,
            rep.empirical,
            rep.std_error
        );
    }

    #[test]
    fn estimator_consistency_meta_test() {
        // 100 independent reduced-M experiments: |empirical − theory| must
        // stay within 3 bootstrap SEs in at least 99 of them.
        let small = BootstrapConfig {
            resamples: 100,
            seed: 31,
        };
        let failures: usize = (0..100)
            .map(|seed| {
                let ens = gaussian_ensemble(2000, 8, 1000 + seed);
                let est = joint_cumulant(&ens, &[4, 8], &small).unwrap();
                let z = (est.value - 4.0) / est.std_error;
                usize::from(z.abs() >= 3.0)
            })
            .sum();
        assert!(failures <= 1, "{failures} of 100 outside 3 SE");
    }

    #[test]
    fn clt_scan_gaussian_is_pure_noise() {
        let ens = gaussian_ensemble(20_000, 32, 10);
        let scan = clt_convergence_scan(&ens, &cfg()).unwrap();
        for row in &scan.rows {
            assert!(row.lambda3.value.abs() < 4.0 * row.lambda3.std_error);
            assert!(row.lambda4.value.abs() < 4.0 * row.lambda4.std_error);
        }
        // no decay signal → the scan must say so rather than report slopes
        assert!(!scan.warnings.is_empty());
    }

    #[test]
    fn clt_scan_truncated_levy_slopes() {
        let spec = DeformationSpec::mantegna_stanley(1.2, 100.0).unwrap();
        let stable = StableParams::new(1.0, 1.0).unwrap();
        let ens = WalkEnsemble::generate(&spec, stable, 30_000, 64, 77).unwrap();
        let scan = clt_convergence_scan(&ens, &cfg()).unwrap();
        assert!(
            scan.slope4.ci_low < -1.0 && -1.0 < scan.slope4.ci_high,
            "lambda4 slope {:?}",
            scan.slope4
        );
        assert!(
            scan.slope3.ci_low < -0.5 && -0.5 < scan.slope3.ci_high,
            "lambda3 slope {:?}",
            scan.slope3
        );
    }

    #[test]
    fn scan_requires_enough_steps() {
        let ens = gaussian_ensemble(200, 16, 11);
        assert!(clt_convergence_scan(&ens, &cfg()).is_err());
    }
}
