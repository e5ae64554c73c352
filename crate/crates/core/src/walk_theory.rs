//! Closed-form statistics of i.i.d. random walks.
//!
//! For a walk X(n) = Σ xᵢ with increment cumulants κ_j, every joint
//! cumulant function collapses to
//!
//! ```text
//!   K_j(n₁, …, n_j) = κ_j · min{n₁, …, n_j},
//! ```
//!
//! so correlation coefficients of any order are ratios of min to the
//! geometric mean of the times. This module evaluates those forms, the
//! anchored past/future autocorrelation and its correlation times, the
//! piecewise threefold-correlation surface with its half-maximum isoline,
//! and the Gaussian/Lévy regime classification.

use serde::Serialize;

use crate::cumulants::{CumulantSet, StableParams};
use crate::deformation::DeformationSpec;
use crate::error::{Error, Result};

/// Region of the (τ₂, τ₃) plane for the anchored threefold coefficient:
/// `A` is the absolute-future quadrant, `B` covers the second quadrant and
/// the upper half of the third, `C` the fourth quadrant and the lower half
/// of the third. The two formulas agree on the shared diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    A,
    B,
    C,
}

/// Scale classification of walk fluctuations at step n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Gaussian,
    Levy,
    Crossover,
}

/// "Much greater" in the Gaussian-regime condition n ≫ (l/γ)^α is read as
/// this factor; below (l/γ)^α itself is the Lévy regime, between is labeled
/// crossover.
pub const GAUSSIAN_REGIME_FACTOR: f64 = 100.0;

/// A j-tuple of walk times for correlation queries, j ∈ {2, 3, 4}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrelationQuery {
    times: Vec<u64>,
}

impl CorrelationQuery {
    /// Absolute times n₁..n_j, each ≥ 1 (X(0) is deterministic and carries
    /// no correlation).
    pub fn from_times(times: Vec<u64>) -> Result<Self> {
        if !(2..=4).contains(&times.len()) {
            return Err(Error::Domain(format!(
                "correlation order must be 2..=4, got {}",
                times.len()
            )));
        }
        if times.contains(&0) {
            return Err(Error::Domain(
                "all times must be >= 1; n = 0 is the deterministic origin".to_string(),
            ));
        }
        Ok(CorrelationQuery { times })
    }

    /// Anchored form: first time m, remaining times m + τᵢ.
    pub fn anchored(m: u64, taus: &[i64]) -> Result<Self> {
        let mut times = vec![m];
        for &tau in taus {
            let t = m as i64 + tau;
            if t < 1 {
                return Err(Error::Domain(format!(
                    "anchored time m + tau = {t} must be >= 1 (m = {m}, tau = {tau})"
                )));
            }
            times.push(t as u64);
        }
        Self::from_times(times)
    }

    pub fn order(&self) -> usize {
        self.times.len()
    }

    pub fn times(&self) -> &[u64] {
        &self.times
    }
}

/// K_j(n₁..n_j) = κ_j · min(times); j = 1 gives the drift κ₁·n.
pub fn cumulant_function(cumulants: &CumulantSet, times: &[u64]) -> Result<f64> {
    let j = times.len();
    if j == 0 || j > cumulants.max_order() {
        return Err(Error::Domain(format!(
            "order {j} outside available cumulants 1..={}",
            cumulants.max_order()
        )));
    }
    if times.contains(&0) {
        return Err(Error::Domain("all times must be >= 1".to_string()));
    }
    let min = *times.iter().min().unwrap() as f64;
    Ok(cumulants.kappa(j) * min)
}

/// Standardized one-point cumulant Λ_j(n) = λ_j / n^{j/2−1}; the rate at
/// which the walk's one-point law turns Gaussian.
pub fn one_point_standardized(cumulants: &CumulantSet, n: u64, order: usize) -> Result<f64> {
    if order < 3 || order > cumulants.max_order() {
        return Err(Error::Domain(format!(
            "standardized order must be 3..={}",
            cumulants.max_order()
        )));
    }
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".to_string()));
    }
    Ok(cumulants.lambda(order) * (n as f64).powf(1.0 - order as f64 / 2.0))
}

/// Walk autocorrelation coefficient R₂(n₁, n₂) = min / √(n₁ n₂).
pub fn autocorrelation(n1: u64, n2: u64) -> f64 {
    assert!(n1 >= 1 && n2 >= 1, "times must be >= 1");
    n1.min(n2) as f64 / ((n1 as f64) * (n2 as f64)).sqrt()
}

/// Anchored autocorrelation against the interval τ = n₂ − m:
/// √(1 + τ/m) looking into the past (τ < 0), 1/√(1 + τ/m) into the future.
pub fn anchored_autocorrelation(m: u64, tau: f64) -> f64 {
    assert!(m >= 1, "anchor must be >= 1");
    assert!(tau > -(m as f64), "absolute time m + tau must stay positive");
    let ratio = 1.0 + tau / m as f64;
    if tau < 0.0 {
        ratio.sqrt()
    } else {
        1.0 / ratio.sqrt()
    }
}

/// Half-level correlation times (past, future) of the anchored
/// autocorrelation: R₂ falls to a half at τ = −3m/4 and τ = +3m.
pub fn correlation_times(m: u64) -> (f64, f64) {
    assert!(m >= 1);
    (0.75 * m as f64, 3.0 * m as f64)
}

/// R_j for one scalar coefficient λ_j: λ_j · min / √(Π nᵢ).
pub fn coefficient_from_lambda(lambda_j: f64, times: &[u64]) -> f64 {
    assert!(!times.is_empty() && times.iter().all(|&t| t >= 1));
    let min = *times.iter().min().unwrap() as f64;
    let prod: f64 = times.iter().map(|&t| t as f64).product();
    lambda_j * min / prod.sqrt()
}

/// General correlation coefficient R_j(n₁..n_j) = λ_j min / √(Π nᵢ), with
/// λ₂ ≡ 1 so j = 2 reduces to the plain autocorrelation.
pub fn general_coefficient(cumulants: &CumulantSet, times: &[u64]) -> Result<f64> {
    let j = times.len();
    if j < 2 || j > cumulants.max_order() {
        return Err(Error::Domain(format!(
            "coefficient order must be 2..={}",
            cumulants.max_order()
        )));
    }
    if times.contains(&0) {
        return Err(Error::Domain("all times must be >= 1".to_string()));
    }
    let lambda = if j == 2 { 1.0 } else { cumulants.lambda(j) };
    Ok(coefficient_from_lambda(lambda, times))
}

/// Anchored threefold coefficient R₃(m, τ₂, τ₃) and its region label.
///
/// Region A: Λ₃(m)/√((1+τ₂/m)(1+τ₃/m)); region B: Λ₃(m)√((1+τ₂/m)/(1+τ₃/m));
/// region C mirrors B with τ₂ ↔ τ₃. The piecewise forms are algebraically
/// the min/√product law, so they agree across every boundary.
pub fn threefold_coefficient(
    lambda3: f64,
    m: u64,
    tau2: f64,
    tau3: f64,
) -> Result<(f64, Region)> {
    if m < 1 {
        return Err(Error::Domain("anchor m must be >= 1".to_string()));
    }
    let mf = m as f64;
    let (r2, r3) = (1.0 + tau2 / mf, 1.0 + tau3 / mf);
    if r2 <= 0.0 || r3 <= 0.0 {
        return Err(Error::Domain(format!(
            "times m+tau must stay positive (got {}, {})",
            mf * r2,
            mf * r3
        )));
    }
    let big_lambda = lambda3 / mf.sqrt();
    let (value, region) = if tau2 >= 0.0 && tau3 >= 0.0 {
        (big_lambda / (r2 * r3).sqrt(), Region::A)
    } else if tau2 <= tau3 {
        (big_lambda * (r2 / r3).sqrt(), Region::B)
    } else {
        (big_lambda * (r3 / r2).sqrt(), Region::C)
    };
    Ok((value, region))
}

/// One piece of the half-maximum isoline, parametrized by τ₂.
#[derive(Debug, Clone, Serialize)]
pub enum IsolinePiece {
    /// τ₃ = slope·τ₂ + intercept on [tau2_min, tau2_max].
    Line {
        slope: f64,
        intercept: f64,
        tau2_min: f64,
        tau2_max: f64,
    },
    /// τ₃ = 4m²/(m + τ₂) − m on [tau2_min, tau2_max].
    Hyperbola {
        m: f64,
        tau2_min: f64,
        tau2_max: f64,
    },
}

impl IsolinePiece {
    pub fn tau3_at(&self, tau2: f64) -> f64 {
        match *self {
            IsolinePiece::Line { slope, intercept, .. } => slope * tau2 + intercept,
            IsolinePiece::Hyperbola { m, .. } => 4.0 * m * m / (m + tau2) - m,
        }
    }

    pub fn tau2_range(&self) -> (f64, f64) {
        match *self {
            IsolinePiece::Line { tau2_min, tau2_max, .. } => (tau2_min, tau2_max),
            IsolinePiece::Hyperbola { tau2_min, tau2_max, .. } => (tau2_min, tau2_max),
        }
    }

    /// `count` interior points (midpoint-offset, avoiding the corner
    /// singularities of the parametrization).
    pub fn sample(&self, count: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = self.tau2_range();
        (0..count)
            .map(|i| {
                let t2 = lo + (hi - lo) * (i as f64 + 0.5) / count as f64;
                (t2, self.tau3_at(t2))
            })
            .collect()
    }
}

/// The locus R₃(m, τ₂, τ₃) = Λ₃(m)/2: two line segments and one hyperbolic
/// arc joining the corners (3m, 0), (0, 3m), (−m, −m).
#[derive(Debug, Clone, Serialize)]
pub struct IsolineDescription {
    pub m: u64,
    pub vertices: [(f64, f64); 3],
    pub pieces: [IsolinePiece; 3],
    /// The isoline's correlation value Λ₃(m)/2 for the supplied λ₃.
    pub level: f64,
}

/// Half-maximum isoline of the threefold coefficient anchored at m.
pub fn threefold_isoline(lambda3: f64, m: u64) -> IsolineDescription {
    assert!(m >= 1);
    let mf = m as f64;
    IsolineDescription {
        m,
        vertices: [(3.0 * mf, 0.0), (0.0, 3.0 * mf), (-mf, -mf)],
        pieces: [
            // region B edge, (−m, −m) → (0, 3m)
            IsolinePiece::Line {
                slope: 4.0,
                intercept: 3.0 * mf,
                tau2_min: -mf,
                tau2_max: 0.0,
            },
            // region A arc, (0, 3m) → (3m, 0)
            IsolinePiece::Hyperbola {
                m: mf,
                tau2_min: 0.0,
                tau2_max: 3.0 * mf,
            },
            // region C edge, (3m, 0) → (−m, −m)
            IsolinePiece::Line {
                slope: 0.25,
                intercept: -0.75 * mf,
                tau2_min: -mf,
                tau2_max: 3.0 * mf,
            },
        ],
        level: lambda3 / (2.0 * mf.sqrt()),
    }
}

/// Lévy / Gaussian / crossover classification of step n against the
/// characteristic scale (l/γ)^α.
pub fn classify_regime(stable: StableParams, spec: &DeformationSpec, n: u64) -> Regime {
    assert!(n >= 1);
    let scale = (spec.l() / stable.gamma()).powf(stable.alpha());
    let nf = n as f64;
    if nf <= scale {
        Regime::Levy
    } else if nf >= GAUSSIAN_REGIME_FACTOR * scale {
        Regime::Gaussian
    } else {
        Regime::Crossover
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulants::{cumulants, StableParams};
    use crate::deformation::DeformationSpec;

    fn test_set() -> CumulantSet {
        let spec = DeformationSpec::mantegna_stanley(1.5, 100.0).unwrap();
        cumulants(&spec, StableParams::new(1.0, 1.0).unwrap(), 6).unwrap()
    }

    #[test]
    fn cumulant_function_is_kappa_times_min() {
        let set = test_set();
        let d = cumulant_function(&set, &[7, 7]).unwrap();
        assert!((d - set.kappa(2) * 7.0).abs() < 1e-12);
        // a 1 in the tuple pins the minimum
        let v = cumulant_function(&set, &[1, 100]).unwrap();
        assert!((v - set.kappa(2)).abs() < 1e-12);
        // permutation invariance
        let a = cumulant_function(&set, &[3, 9, 5]).unwrap();
        let b = cumulant_function(&set, &[9, 5, 3]).unwrap();
        assert_eq!(a, b);
        // drift at order 1
        let drift = cumulant_function(&set, &[12]).unwrap();
        assert!((drift - set.kappa(1) * 12.0).abs() < 1e-12);
        assert!(cumulant_function(&set, &[0, 3]).is_err());
        assert!(cumulant_function(&set, &[1; 7]).is_err());
    }

    #[test]
    fn standardized_one_point_decay() {
        let set = test_set();
        let l3 = set.lambda(3);
        let l4 = set.lambda(4);
        assert!((one_point_standardized(&set, 4, 3).unwrap() - l3 / 2.0).abs() < 1e-12);
        assert!((one_point_standardized(&set, 10, 4).unwrap() - l4 / 10.0).abs() < 1e-12);
        assert!(one_point_standardized(&set, 1_000_000, 4).unwrap().abs() < 1e-3 * l4.abs());
    }

    #[test]
    fn autocorrelation_values() {
        assert!((autocorrelation(4, 9) - 4.0 / 6.0).abs() < 1e-15);
        assert_eq!(autocorrelation(5, 5), 1.0);
        // bounds and symmetry
        for (a, b) in [(1u64, 2u64), (3, 17), (8, 8), (100, 1)] {
            let r = autocorrelation(a, b);
            assert!(r > 0.0 && r <= 1.0);
            assert_eq!(r, autocorrelation(b, a));
            assert_eq!(r == 1.0, a == b);
        }
    }

    #[test]
    fn correlation_time_asymmetry() {
        for m in [1u64, 4, 8, 25] {
            let (past, future) = correlation_times(m);
            assert_eq!(past, 0.75 * m as f64);
            assert_eq!(future, 3.0 * m as f64);
            // the half level is hit exactly there
            assert_eq!(anchored_autocorrelation(m, future), 0.5);
            assert_eq!(anchored_autocorrelation(m, -past), 0.5);
        }
    }

    #[test]
    fn threefold_degenerate_peak_and_symmetry() {
        let l3 = -1.3;
        let (peak, region) = threefold_coefficient(l3, 9, 0.0, 0.0).unwrap();
        assert_eq!(region, Region::A);
        assert!((peak - l3 / 3.0).abs() < 1e-15); // Λ₃(9) = λ₃/√9

        // region A at τ₂ = τ₃ = 3m → Λ₃(m)/4
        let (v, r) = threefold_coefficient(l3, 9, 27.0, 27.0).unwrap();
        assert_eq!(r, Region::A);
        assert!((v - l3 / 3.0 / 4.0).abs() < 1e-15);

        // symmetric under τ₂ ↔ τ₃ swap inside region A
        let (a, _) = threefold_coefficient(l3, 9, 5.0, 11.0).unwrap();
        let (b, _) = threefold_coefficient(l3, 9, 11.0, 5.0).unwrap();
        assert!((a - b).abs() < 1e-15);

        assert!(threefold_coefficient(l3, 9, -9.0, 1.0).is_err());
    }

    #[test]
    fn threefold_matches_min_product_law() {
        // the anchored piecewise forms are the general law in disguise
        let set = test_set();
        let l3 = set.lambda(3);
        let m = 6u64;
        for (t2, t3) in [(3i64, 8i64), (-2, 5), (4, -3), (-4, -2), (-2, -4), (0, 7)] {
            let times = [m, (m as i64 + t2) as u64, (m as i64 + t3) as u64];
            let direct = general_coefficient(&set, &times).unwrap();
            let (anchored, _) = threefold_coefficient(l3, m, t2 as f64, t3 as f64).unwrap();
            assert!(
                (direct - anchored).abs() < 1e-14,
                "({t2}, {t3}): {direct} vs {anchored}"
            );
        }
    }

    #[test]
    fn threefold_continuous_across_region_boundaries() {
        let l3 = 0.8;
        let m = 5u64;
        // rays: positive τ₃ axis (A|B), positive τ₂ axis (A|C), diagonal (B|C)
        for t in [0.5f64, 2.0, 7.5, 14.0] {
            let (a1, _) = threefold_coefficient(l3, m, 0.0, t).unwrap();
            let (a2, _) = threefold_coefficient(l3, m, -1e-12, t).unwrap();
            assert!((a1 - a2).abs() < 1e-10);
            let (b1, _) = threefold_coefficient(l3, m, t, 0.0).unwrap();
            let (b2, _) = threefold_coefficient(l3, m, t, -1e-12).unwrap();
            assert!((b1 - b2).abs() < 1e-10);
        }
        for t in [-0.5f64, -2.0, -4.0] {
            let (d1, r1) = threefold_coefficient(l3, m, t, t).unwrap();
            let (d2, _) = threefold_coefficient(l3, m, t, t + 1e-12).unwrap();
            assert_eq!(r1, Region::B); // diagonal ties resolve to B
            assert!((d1 - d2).abs() < 1e-10);
        }
    }

    #[test]
    fn general_coefficient_reductions() {
        let set = test_set();
        // j = 2 reduces to the autocorrelation
        let r = general_coefficient(&set, &[4, 9]).unwrap();
        assert!((r - autocorrelation(4, 9)).abs() < 1e-15);
        // degenerate times reproduce the one-point coefficients
        for j in [3usize, 4] {
            for n in [1u64, 4, 16] {
                let times = vec![n; j];
                let a = general_coefficient(&set, &times).unwrap();
                let b = one_point_standardized(&set, n, j).unwrap();
                assert!((a - b).abs() < 1e-12, "j={j} n={n}");
            }
        }
        // a unit time pins min = 1
        let v = general_coefficient(&set, &[1, 4, 25]).unwrap();
        assert!((v - set.lambda(3) / 10.0).abs() < 1e-14);
    }

    #[test]
    fn isoline_geometry() {
        for m in [4u64, 7] {
            let mf = m as f64;
            let iso = threefold_isoline(1.0, m);
            assert_eq!(iso.vertices[0], (3.0 * mf, 0.0));
            assert_eq!(iso.vertices[1], (0.0, 3.0 * mf));
            assert_eq!(iso.vertices[2], (-mf, -mf));

            // pieces meet at the corners
            assert!((iso.pieces[0].tau3_at(-mf) + mf).abs() < 1e-12);
            assert!((iso.pieces[0].tau3_at(0.0) - 3.0 * mf).abs() < 1e-12);
            assert!((iso.pieces[1].tau3_at(0.0) - 3.0 * mf).abs() < 1e-12);
            assert!((iso.pieces[1].tau3_at(3.0 * mf)).abs() < 1e-12);
            assert!((iso.pieces[2].tau3_at(3.0 * mf)).abs() < 1e-12);
            assert!((iso.pieces[2].tau3_at(-mf) + mf).abs() < 1e-12);

            // every sampled point sits on the half level
            let level = iso.level;
            for piece in &iso.pieces {
                for (t2, t3) in piece.sample(200) {
                    let (v, _) = threefold_coefficient(1.0, m, t2, t3).unwrap();
                    assert!(
                        (v - level).abs() < 1e-9,
                        "m={m} ({t2}, {t3}): {v} vs {level}"
                    );
                }
            }
        }
    }

    #[test]
    fn regime_classification() {
        let spec = DeformationSpec::mantegna_stanley(1.0, 100.0).unwrap();
        let stable = StableParams::new(1.0, 1.0).unwrap();
        assert_eq!(classify_regime(stable, &spec, 10), Regime::Levy);
        assert_eq!(classify_regime(stable, &spec, 100), Regime::Levy);
        assert_eq!(classify_regime(stable, &spec, 1_000), Regime::Crossover);
        assert_eq!(classify_regime(stable, &spec, 1_000_000), Regime::Gaussian);
        assert_eq!(classify_regime(stable, &spec, 10_000), Regime::Gaussian);
    }

    #[test]
    fn query_construction() {
        let q = CorrelationQuery::anchored(8, &[-6, 24]).unwrap();
        assert_eq!(q.times(), &[8, 2, 32]);
        assert_eq!(q.order(), 3);
        assert!(CorrelationQuery::anchored(8, &[-8]).is_err());
        assert!(CorrelationQuery::from_times(vec![3]).is_err());
        assert!(CorrelationQuery::from_times(vec![1, 0]).is_err());
        assert!(CorrelationQuery::from_times(vec![2, 2, 2, 2, 2]).is_err());
    }
}
