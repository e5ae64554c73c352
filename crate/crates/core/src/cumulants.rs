//! Analytic cumulants of truncated stable increment laws.
//!
//! To first order in the scale ratio ε = (γ/l)^α, the j-th cumulant of a
//! truncated stable law factorizes as
//!
//! ```text
//!   κ_j = l^{j−α} γ^α A(α) μ_j(α),
//! ```
//!
//! where A(α) = (2/π) Γ(α+1) sin(πα/2) and μ_j(α) is the Mellin transform
//! of the even (j even) or odd (j odd) part of the truncation shape,
//!
//! ```text
//!   μ_j(α) = ∫₀^∞ ξ^{j−1−α} g_part(ξ) dξ.
//! ```
//!
//! Built-in shapes get closed forms; tabulated shapes are integrated by
//! adaptive quadrature with the origin singularity removed by a power
//! substitution. [`oracle_cumulants`] provides the independent ground
//! truth: raw moments of the exact product density by quadrature with no
//! small-ε approximation, converted through the moment–cumulant recursion.

use std::f64::consts::PI;

use serde::Serialize;

use crate::deformation::{DeformationKind, DeformationSpec, SUPPORT_THRESHOLD};
use crate::error::{Error, Result};
use crate::numeric::quad::{self, QuadOptions};
use crate::numeric::special::gamma;
use crate::numeric::DEFAULT_REL_TOL;

/// Highest cumulant order the engine will compute. The moment–cumulant
/// recursion grows factorially and nothing here needs more.
pub const MAX_ORDER_LIMIT: usize = 8;
/// Default order for [`cumulants`] and [`oracle_cumulants`].
pub const DEFAULT_MAX_ORDER: usize = 6;
/// ε at or above this triggers an expansion-validity warning.
pub const EPSILON_WARN: f64 = 0.1;

/// Index α and scale γ of the undisturbed symmetric stable law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableParams {
    alpha: f64,
    gamma: f64,
}

impl StableParams {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::Domain(format!(
                "alpha must lie in (0, 2), got {alpha}"
            )));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
        }
        Ok(StableParams { alpha, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Expansion parameter ε = (γ/l)^α for truncation scale `l`.
    pub fn epsilon(&self, l: f64) -> f64 {
        (self.gamma / l).powf(self.alpha)
    }
}

/// Increment cumulants κ₁..κ_J with derived standardized coefficients.
#[derive(Debug, Clone)]
pub struct CumulantSet {
    kappa: Vec<f64>,
    sigma0: f64,
    epsilon: f64,
    warnings: Vec<String>,
}

impl CumulantSet {
    /// Wraps κ₁..κ_J (κ₂ must be positive) and records ε for reporting.
    pub fn from_kappas(kappa: Vec<f64>, epsilon: f64) -> Result<Self> {
        if kappa.len() < 2 {
            return Err(Error::Domain("need at least orders 1..2".to_string()));
        }
        if kappa[1].is_nan() || kappa[1] <= 0.0 {
            return Err(Error::Domain(format!(
                "kappa_2 must be positive, got {}",
                kappa[1]
            )));
        }
        let mut warnings = Vec::new();
        if epsilon >= EPSILON_WARN {
            warnings.push(format!(
                "epsilon = {epsilon:.3} >= {EPSILON_WARN}: order-epsilon expansion may be unreliable"
            ));
        }
        Ok(CumulantSet {
            sigma0: kappa[1].sqrt(),
            kappa,
            epsilon,
            warnings,
        })
    }

    pub fn max_order(&self) -> usize {
        self.kappa.len()
    }

    /// κ_j for j in 1..=max_order.
    pub fn kappa(&self, order: usize) -> f64 {
        assert!(
            (1..=self.kappa.len()).contains(&order),
            "order {order} out of range 1..={}",
            self.kappa.len()
        );
        self.kappa[order - 1]
    }

    /// Standardized coefficient λ_j = κ_j / σ₀^j (λ₂ = 1 identically).
    pub fn lambda(&self, order: usize) -> f64 {
        self.kappa(order) / self.sigma0.powi(order as i32)
    }

    /// Increment standard deviation σ₀ = √κ₂.
    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappa
    }
}

/// A(α) = (2/π) Γ(α+1) sin(πα/2), the stable-amplitude prefactor shared by
/// every cumulant.
pub fn amplitude(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Domain(format!(
            "amplitude requires alpha in (0, 2), got {alpha}"
        )));
    }
    Ok(2.0 / PI * gamma(alpha + 1.0) * (PI * alpha / 2.0).sin())
}

/// (1 − β^w)/w, continued through w = 0 where it equals −ln β.
///
/// This is the asymmetry factor of every odd-order influence value; the
/// expm1 form keeps full precision where the plain expression would cancel
/// (notably j = 1, α → 1).
fn asymmetry_factor(w: f64, beta: f64) -> f64 {
    let lb = beta.ln();
    if w == 0.0 {
        -lb
    } else {
        -f64::exp_m1(w * lb) / w
    }
}

/// Influence value μ_j(α): the Mellin transform of g's even (j even) or odd
/// (j odd) part. Closed forms for the built-in shapes; adaptive quadrature
/// for tables. Negative values are legitimate for odd j.
pub fn influence(spec: &DeformationSpec, order: usize, alpha: f64) -> Result<f64> {
    influence_with_tolerance(spec, order, alpha, DEFAULT_REL_TOL)
}

/// [`influence`] with an explicit quadrature tolerance (meaningful for
/// tabulated shapes; built-ins use closed forms regardless).
pub fn influence_with_tolerance(
    spec: &DeformationSpec,
    order: usize,
    alpha: f64,
    rel_tol: f64,
) -> Result<f64> {
    check_influence_args(order, alpha)?;
    let w = order as f64 - alpha;
    let beta = spec.beta();
    match spec.kind() {
        DeformationKind::MantegnaStanley => Ok(if order.is_multiple_of(2) {
            (1.0 + beta.powf(w)) / (2.0 * w)
        } else {
            0.5 * asymmetry_factor(w, beta)
        }),
        DeformationKind::Exponential => Ok(if order.is_multiple_of(2) {
            gamma(w) * (1.0 + beta.powf(w)) / 2.0
        } else {
            // Γ(w)(1−β^w)/2 written as Γ(1+w)·[(1−β^w)/w]/2, finite at w = 0
            gamma(1.0 + w) * 0.5 * asymmetry_factor(w, beta)
        }),
        DeformationKind::Tabulated => influence_quadrature(spec, order, alpha, rel_tol),
    }
}

/// μ_j(α) by direct adaptive quadrature of the defining integral, treating
/// g as a black box. This is the generic route used for tabulated shapes
/// and as the independent cross-check of the closed forms.
pub fn influence_quadrature(
    spec: &DeformationSpec,
    order: usize,
    alpha: f64,
    rel_tol: f64,
) -> Result<f64> {
    check_influence_args(order, alpha)?;
    let (lo, hi) = spec.support(SUPPORT_THRESHOLD);
    let upper = lo.abs().max(hi.abs());
    if upper <= 0.0 {
        return Ok(0.0);
    }

    // Breakpoints of g and of its mirror image, folded onto ξ > 0.
    let mut pts: Vec<f64> = spec
        .breakpoints()
        .iter()
        .map(|b| b.abs())
        .filter(|&b| b > 0.0 && b < upper)
        .collect();
    pts.push(upper);
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let even = order.is_multiple_of(2);
    // For j = 1 the integrand ξ^{-α} g_odd(ξ) is recast as ξ^{1-α} φ(ξ)
    // with φ = g_odd/ξ bounded at the origin (g_odd(0) = 0 and tables
    // vanish at least linearly there).
    let exponent = if order == 1 {
        1.0 - alpha
    } else {
        order as f64 - 1.0 - alpha
    };
    let part = move |xi: f64| -> f64 {
        if even {
            spec.even_part(xi)
        } else if order == 1 {
            spec.odd_part(xi) / xi
        } else {
            spec.odd_part(xi)
        }
    };

    let opts = QuadOptions {
        rel_tol,
        abs_tol: 1e-14,
        max_intervals: 20_000,
    };

    // Effective power p of ξ^p at the origin, after the j = 1 recast.
    let w_eff = exponent + 1.0;
    let result = if w_eff < 1.0 {
        // Power substitution ξ = t^{1/w_eff} removes the origin
        // singularity: ∫ ξ^{w_eff−1} h(ξ) dξ = (1/w_eff) ∫ h(t^{1/w_eff}) dt.
        let w_inv = 1.0 / w_eff;
        let mut tpts: Vec<f64> = std::iter::once(0.0)
            .chain(pts.iter().map(|&p| p.powf(w_eff)))
            .collect();
        tpts.sort_by(f64::total_cmp);
        tpts.dedup();
        quad::integrate_segments(|t: f64| w_inv * part(t.powf(w_inv)), &tpts, &opts)
    } else {
        let mut xpts = Vec::with_capacity(pts.len() + 1);
        xpts.push(0.0);
        xpts.extend_from_slice(&pts);
        quad::integrate_segments(|xi: f64| xi.powf(exponent) * part(xi), &xpts, &opts)
    };

    result
        .map(|r| r.value)
        .map_err(|e| e.named(&format!("influence mu_{order}")))
}

fn check_influence_args(order: usize, alpha: f64) -> Result<()> {
    if order == 0 {
        return Err(Error::Domain("influence order must be >= 1".to_string()));
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Domain(format!(
            "influence requires alpha in (0, 2), got {alpha}"
        )));
    }
    Ok(())
}

/// Analytic cumulants κ₁..κ_J of the truncated law, first order in ε.
pub fn cumulants(spec: &DeformationSpec, stable: StableParams, max_order: usize) -> Result<CumulantSet> {
    cumulants_with_tolerance(spec, stable, max_order, DEFAULT_REL_TOL)
}

/// [`cumulants`] with an explicit quadrature tolerance for tabulated shapes.
pub fn cumulants_with_tolerance(
    spec: &DeformationSpec,
    stable: StableParams,
    max_order: usize,
    rel_tol: f64,
) -> Result<CumulantSet> {
    check_order(max_order)?;
    let a = amplitude(stable.alpha())?;
    let (alpha, g, l) = (stable.alpha(), stable.gamma(), spec.l());
    let mut kappa = Vec::with_capacity(max_order);
    for j in 1..=max_order {
        let mu = influence_with_tolerance(spec, j, alpha, rel_tol)?;
        kappa.push(l.powf(j as f64 - alpha) * g.powf(alpha) * a * mu);
    }
    CumulantSet::from_kappas(kappa, stable.epsilon(l))
}

/// Order-δ cumulants (orders 1..4) for a built-in family with small
/// asymmetry β = 1 + δ: even orders keep their symmetric values, odd orders
/// are linear in δ.
pub fn small_asymmetry_cumulants(
    kind: DeformationKind,
    delta: f64,
    stable: StableParams,
    l: f64,
) -> Result<CumulantSet> {
    if delta <= -1.0 || !delta.is_finite() {
        return Err(Error::Domain(format!(
            "delta must exceed -1 (beta = 1 + delta > 0), got {delta}"
        )));
    }
    let alpha = stable.alpha();
    let a = amplitude(alpha)?;
    let mu = |j: usize| -> Result<f64> {
        let w = j as f64 - alpha;
        match kind {
            DeformationKind::MantegnaStanley => Ok(if j.is_multiple_of(2) { 1.0 / w } else { -delta / 2.0 }),
            DeformationKind::Exponential => Ok(if j.is_multiple_of(2) {
                gamma(w)
            } else {
                -gamma(w + 1.0) * delta / 2.0
            }),
            DeformationKind::Tabulated => Err(Error::Domain(
                "small-asymmetry closed forms exist only for built-in families".to_string(),
            )),
        }
    };
    let g = stable.gamma();
    let mut kappa = Vec::with_capacity(4);
    for j in 1..=4 {
        kappa.push(l.powf(j as f64 - alpha) * g.powf(alpha) * a * mu(j)?);
    }
    let mut set = CumulantSet::from_kappas(kappa, stable.epsilon(l))?;
    if delta.abs() > 0.3 {
        set.warnings.push(format!(
            "|delta| = {} > 0.3: order-delta approximation is stretched",
            delta.abs()
        ));
    }
    Ok(set)
}

fn check_order(max_order: usize) -> Result<()> {
    if max_order < 2 {
        return Err(Error::Domain("max_order must be >= 2".to_string()));
    }
    if max_order > MAX_ORDER_LIMIT {
        return Err(Error::Domain(format!(
            "orders above {MAX_ORDER_LIMIT} are refused (max_order = {max_order})"
        )));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Raw moments m₁..m_J from cumulants κ₁..κ_J via the exact recursion
/// m_n = Σ_{k=1}^{n} C(n−1, k−1) κ_k m_{n−k}, with m₀ = 1.
pub fn cumulants_to_moments(kappa: &[f64]) -> Vec<f64> {
    let n = kappa.len();
    let mut m = vec![0.0; n + 1];
    m[0] = 1.0;
    for order in 1..=n {
        let mut acc = 0.0;
        for k in 1..=order {
            acc += binomial(order - 1, k - 1) * kappa[k - 1] * m[order - k];
        }
        m[order] = acc;
    }
    m.remove(0);
    m
}

/// Cumulants κ₁..κ_J from raw moments m₁..m_J; exact inverse of
/// [`cumulants_to_moments`].
pub fn moments_to_cumulants(moments: &[f64]) -> Vec<f64> {
    let n = moments.len();
    let mut kappa = vec![0.0; n];
    let mut m = vec![1.0];
    m.extend_from_slice(moments);
    for order in 1..=n {
        let mut acc = m[order];
        for k in 1..order {
            acc -= binomial(order - 1, k - 1) * kappa[k - 1] * m[order - k];
        }
        kappa[order - 1] = acc;
    }
    kappa
}

/// Ground-truth cumulants with no small-ε approximation: raw moments of the
/// exact product density P_L(x)·g(x/l) by adaptive quadrature, then the
/// moment–cumulant recursion. Used to validate the expansion path.
pub fn oracle_cumulants(
    spec: &DeformationSpec,
    stable: StableParams,
    max_order: usize,
) -> Result<CumulantSet> {
    oracle_cumulants_with_tolerance(spec, stable, max_order, DEFAULT_REL_TOL)
}

/// [`oracle_cumulants`] with an explicit quadrature tolerance.
pub fn oracle_cumulants_with_tolerance(
    spec: &DeformationSpec,
    stable: StableParams,
    max_order: usize,
    rel_tol: f64,
) -> Result<CumulantSet> {
    check_order(max_order)?;
    let l = spec.l();
    let g = stable.gamma();
    let (lo, hi) = spec.support(SUPPORT_THRESHOLD);
    let (xlo, xhi) = (lo * l, hi * l);

    // Segment boundaries: shape kinks plus a geometric ladder resolving the
    // stable peak at scale γ inside the much wider truncation window.
    let mut pts: Vec<f64> = vec![xlo, xhi, 0.0];
    for b in spec.breakpoints() {
        let x = b * l;
        if x > xlo && x < xhi {
            pts.push(x);
        }
    }
    let mut s = g.min(l) * 1e-3;
    while s < xhi.abs().max(xlo.abs()) {
        if s < xhi {
            pts.push(s);
        }
        if -s > xlo {
            pts.push(-s);
        }
        s *= 10.0;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let dims = max_order + 1;
    let scale = l.max(g);
    let abs_tol: Vec<f64> = (0..dims).map(|j| 1e-13 * scale.powi(j as i32)).collect();
    let integrand = |x: f64, out: &mut [f64]| {
        let p = crate::distribution::stable_pdf(stable, x) * spec.eval(x / l);
        let mut xj = 1.0;
        for slot in out.iter_mut() {
            *slot = p * xj;
            xj *= x;
        }
    };
    let (vals, _errs) = quad::integrate_vec(integrand, dims, &pts, rel_tol, &abs_tol, 60_000)
        .map_err(|e| e.named("oracle moments"))?;

    let norm = vals[0];
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::Quadrature {
            quantity: "oracle normalization".to_string(),
            estimate: norm,
            error_bound: f64::NAN,
        });
    }
    let moments: Vec<f64> = vals[1..].iter().map(|v| v / norm).collect();
    CumulantSet::from_kappas(moments_to_cumulants(&moments), stable.epsilon(l))
}

/// JSON-ready view of a cumulant computation.
#[derive(Debug, Clone, Serialize)]
pub struct CumulantReport {
    pub alpha: f64,
    pub gamma: f64,
    pub l: f64,
    pub beta: f64,
    pub epsilon: f64,
    /// κ₁..κ_J.
    pub kappa: Vec<f64>,
    /// λ₃..λ_J.
    pub lambda: Vec<f64>,
    /// "expansion" or "oracle".
    pub method: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl CumulantReport {
    pub fn new(
        spec: &DeformationSpec,
        stable: StableParams,
        set: &CumulantSet,
        method: &str,
    ) -> Self {
        CumulantReport {
            alpha: stable.alpha(),
            gamma: stable.gamma(),
            l: spec.l(),
            beta: spec.beta(),
            epsilon: set.epsilon(),
            kappa: set.kappas().to_vec(),
            lambda: (3..=set.max_order()).map(|j| set.lambda(j)).collect(),
            method: method.to_string(),
            warnings: set.warnings().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn ms(beta: f64, l: f64) -> DeformationSpec {
        DeformationSpec::mantegna_stanley(beta, l).unwrap()
    }

    fn expo(beta: f64, l: f64) -> DeformationSpec {
        DeformationSpec::exponential(beta, l).unwrap()
    }

    #[test]
    fn amplitude_known_values() {
        assert!((amplitude(1.0).unwrap() - 2.0 / PI).abs() < 1e-14);
        // (2/π) Γ(1.5) sin(π/4) = 1/√(2π)
        assert!((amplitude(0.5).unwrap() - 0.398_942_280_401_432_7).abs() < 1e-13);
        assert!(amplitude(1e-9).unwrap() < 1e-8);
        assert!(amplitude(0.0).is_err());
        assert!(amplitude(2.0).is_err());
    }

    #[test]
    fn influence_closed_forms() {
        // hard cut, symmetric: 1/(j−α)
        assert!((influence(&ms(1.0, 10.0), 2, 1.0).unwrap() - 1.0).abs() < 1e-14);
        // symmetric shapes have no odd influence
        for j in [1, 3, 5] {
            assert_eq!(influence(&ms(1.0, 10.0), j, 1.0).unwrap(), 0.0);
            assert_eq!(influence(&expo(1.0, 10.0), j, 0.7).unwrap(), 0.0);
        }
        // exponential, symmetric: Γ(j−α)
        assert!((influence(&expo(1.0, 10.0), 2, 0.5).unwrap() - gamma(1.5)).abs() < 1e-13);
        // hard cut odd branch: (1 − β^{j−α}) / (2(j−α))
        let got = influence(&ms(1.5, 10.0), 3, 1.0).unwrap();
        assert!((got - (-0.3125)).abs() < 1e-14, "got {got}");
        assert!(influence(&ms(1.0, 10.0), 0, 1.0).is_err());
    }

    #[test]
    fn influence_alpha_one_removable_singularity() {
        // j = 1, α → 1: both families tend to −ln β / 2 (times Γ(1+w) → 1)
        let beta = 1.7f64;
        let limit = -beta.ln() / 2.0;
        for family in [ms, expo] {
            let spec = family(beta, 10.0);
            assert!((influence(&spec, 1, 1.0).unwrap() - limit).abs() < 1e-12);
            // approach from both sides stays smooth
            let below = influence(&spec, 1, 1.0 - 1e-9).unwrap();
            let above = influence(&spec, 1, 1.0 + 1e-9).unwrap();
            assert!((below - limit).abs() < 1e-7);
            assert!((above - limit).abs() < 1e-7);
        }
    }

    #[test]
    fn influence_closed_vs_quadrature() {
        for spec in [ms(1.0, 10.0), ms(1.5, 10.0), expo(1.0, 10.0), expo(1.5, 10.0)] {
            for alpha in [0.3, 0.7, 1.0, 1.3, 1.7] {
                for j in 1..=6 {
                    let closed = influence(&spec, j, alpha).unwrap();
                    let quad = influence_quadrature(&spec, j, alpha, 1e-10).unwrap();
                    let scale = closed.abs().max(1e-12);
                    assert!(
                        (closed - quad).abs() / scale < 1e-7,
                        "{:?} beta={} j={} alpha={}: closed {} vs quad {}",
                        spec.kind(),
                        spec.beta(),
                        j,
                        alpha,
                        closed,
                        quad
                    );
                }
            }
        }
    }

    #[test]
    fn truncated_cauchy_variance() {
        let stable = StableParams::new(1.0, 1.0).unwrap();
        for spec in [ms(1.0, 100.0), expo(1.0, 100.0)] {
            let set = cumulants(&spec, stable, 4).unwrap();
            // 2lγ/π for both built-ins
            assert!(
                (set.kappa(2) - 200.0 / PI).abs() < 1e-10,
                "{:?}: {}",
                spec.kind(),
                set.kappa(2)
            );
            assert_eq!(set.kappa(1), 0.0);
            assert_eq!(set.kappa(3), 0.0);
        }
    }

    #[test]
    fn truncated_cauchy_kurtosis_coefficients() {
        let stable = StableParams::new(1.0, 1.0).unwrap();
        let set_ms = cumulants(&ms(1.0, 100.0), stable, 4).unwrap();
        let set_ex = cumulants(&expo(1.0, 100.0), stable, 4).unwrap();
        assert!((set_ms.lambda(4) - PI * 100.0 / 6.0).abs() < 1e-9);
        assert!((set_ex.lambda(4) - PI * 100.0).abs() < 1e-9);
        let ratio = set_ex.lambda(4) / set_ms.lambda(4);
        assert!((ratio - 6.0).abs() < 1e-12, "ratio {ratio}");
    }

    #[test]
    fn kappa_scale_law() {
        // κ_j(2l)/κ_j(l) = 2^{j−α} exactly in the expansion path
        let stable = StableParams::new(1.3, 0.8).unwrap();
        let a = cumulants(&expo(1.4, 50.0), stable, 6).unwrap();
        let b = cumulants(&expo(1.4, 100.0), stable, 6).unwrap();
        for j in 1..=6 {
            if a.kappa(j) == 0.0 {
                continue;
            }
            let got = b.kappa(j) / a.kappa(j);
            let want = 2f64.powf(j as f64 - 1.3);
            assert!((got / want - 1.0).abs() < 1e-12, "j={j}: {got} vs {want}");
        }
    }

    #[test]
    fn lambda_epsilon_scaling() {
        // λ₄ ∝ (l/γ)^α and λ₆ ∝ (l/γ)^{2α}: fitted log-log slopes 1 and 2
        let stable = StableParams::new(1.3, 1.0).unwrap();
        let ratios = [100.0f64, 1000.0, 10000.0];
        let mut pts4 = Vec::new();
        let mut pts6 = Vec::new();
        for &r in &ratios {
            let set = cumulants(&ms(1.0, r), stable, 6).unwrap();
            let x = r.powf(stable.alpha()).ln();
            pts4.push((x, set.lambda(4).ln()));
            pts6.push((x, set.lambda(6).ln()));
        }
        let slope = |pts: &[(f64, f64)]| {
            let n = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            num / den
        };
        assert!((slope(&pts4) - 1.0).abs() < 0.01);
        assert!((slope(&pts6) - 2.0).abs() < 0.01);
    }

    #[test]
    fn small_asymmetry_limits() {
        let stable = StableParams::new(1.0, 1.0).unwrap();
        // δ = 0 is symmetric
        let sym = small_asymmetry_cumulants(DeformationKind::Exponential, 0.0, stable, 100.0).unwrap();
        assert_eq!(sym.kappa(1), 0.0);
        assert_eq!(sym.kappa(3), 0.0);

        // even orders keep the symmetric value
        let asym = small_asymmetry_cumulants(DeformationKind::MantegnaStanley, 0.2, stable, 100.0).unwrap();
        assert!((asym.lambda(4) - PI * 100.0 / 6.0).abs() < 1e-9);

        // threefold ratio exponential/hard-cut = 2 at α = 1
        let ex = small_asymmetry_cumulants(DeformationKind::Exponential, 0.2, stable, 100.0).unwrap();
        let ratio = ex.lambda(3) / asym.lambda(3);
        assert!((ratio - 2.0).abs() < 1e-12, "ratio {ratio}");
        assert!(ex.lambda(3) < 0.0, "positive delta skews negative");

        // drift: κ₁ = −γ A(1) δ/2 = −γδ/π at α = 1 for the hard cut
        assert!((asym.kappa(1) - (-0.2 / PI)).abs() < 1e-12);

        let wide = small_asymmetry_cumulants(DeformationKind::Exponential, 0.5, stable, 100.0).unwrap();
        assert!(!wide.warnings().is_empty());
        assert!(small_asymmetry_cumulants(DeformationKind::Exponential, -1.5, stable, 100.0).is_err());
    }

    #[test]
    fn moment_cumulant_conversions() {
        // standard normal: m = (0, 1, 0, 3) → κ = (0, 1, 0, 0)
        let kappa = moments_to_cumulants(&[0.0, 1.0, 0.0, 3.0]);
        assert!(kappa
            .iter()
            .zip([0.0, 1.0, 0.0, 0.0])
            .all(|(a, b)| (a - b).abs() < 1e-14));

        // κ₂ = m₂ − m₁²
        let kappa = moments_to_cumulants(&[0.7, 1.3]);
        assert!((kappa[1] - (1.3 - 0.49)).abs() < 1e-14);

        // round trip on random lists up to J = 8
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(901);
        for len in 1..=8 {
            for _ in 0..20 {
                let m: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
                let k = moments_to_cumulants(&m);
                let back = cumulants_to_moments(&k);
                for (a, b) in m.iter().zip(&back) {
                    assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "{m:?} -> {back:?}");
                }
            }
        }
    }

    #[test]
    fn order_limits_enforced() {
        let stable = StableParams::new(1.0, 1.0).unwrap();
        assert!(cumulants(&ms(1.0, 100.0), stable, 9).is_err());
        assert!(cumulants(&ms(1.0, 100.0), stable, 1).is_err());
        assert!(cumulants(&ms(1.0, 100.0), stable, 8).is_ok());
    }

    #[test]
    fn oracle_matches_exact_cauchy_integrals() {
        // Cauchy + hard cut has closed-form truncated moments:
        // κ₂ = γ(l − γ arctan(l/γ)) / arctan(l/γ)
        let stable = StableParams::new(1.0, 1.0).unwrap();
        let set = oracle_cumulants(&ms(1.0, 100.0), stable, 4).unwrap();
        let atan = 100.0f64.atan();
        let exact = (100.0 - atan) / atan;
        assert!(
            (set.kappa(2) / exact - 1.0).abs() < 1e-8,
            "oracle {} vs exact {}",
            set.kappa(2),
            exact
        );
        assert!(set.kappa(1).abs() < 1e-9);
        assert!(set.kappa(3).abs() < 1e-6);

        // within 2% of the expansion value 2lγ/π at ε = 0.01
        assert!((set.kappa(2) / (200.0 / PI) - 1.0).abs() < 0.02);
    }

    #[test]
    fn oracle_asymmetric_drift_matches_log_formula() {
        // Cauchy + hard cut, β ≠ 1: m₁ = −γ ln β / π + O(ε²) exactly from
        // ∫ x P_L g dx; the expansion path gives the same through the
        // α → 1 limit of its asymmetry factor.
        let stable = StableParams::new(1.0, 1.0).unwrap();
        let spec = ms(1.2, 100.0);
        let oracle = oracle_cumulants(&spec, stable, 4).unwrap();
        let engine = cumulants(&spec, stable, 4).unwrap();
        let want = -(1.2f64.ln()) / PI;
        assert!((engine.kappa(1) / want - 1.0).abs() < 1e-12);
        assert!((oracle.kappa(1) / want - 1.0).abs() < 0.02);
    }

    #[test]
    fn oracle_tracks_engine_across_indices() {
        // The expansion error is O(ε) plus an O(γ/l) normalization piece
        // (the latter dominates for α > 1); 3× their sum bounds the
        // deviation comfortably at l/γ = 100.
        for alpha in [0.7, 1.3, 1.7] {
            let stable = StableParams::new(alpha, 1.0).unwrap();
            let spec = expo(1.5, 100.0);
            let oracle = oracle_cumulants(&spec, stable, 4).unwrap();
            let engine = cumulants(&spec, stable, 4).unwrap();
            let budget = 3.0 * (stable.epsilon(100.0) + 0.01);
            for j in [1usize, 2, 3, 4] {
                let dev = (oracle.kappa(j) / engine.kappa(j) - 1.0).abs();
                assert!(
                    dev < budget,
                    "alpha={alpha} j={j}: oracle {} vs engine {} (dev {dev:.4})",
                    oracle.kappa(j),
                    engine.kappa(j)
                );
            }
        }
    }

    #[test]
    fn oracle_error_shrinks_with_epsilon() {
        let stable = StableParams::new(1.0, 1.0).unwrap();
        let err_at = |l: f64| {
            let spec = ms(1.0, l);
            let oracle = oracle_cumulants(&spec, stable, 2).unwrap();
            let engine = cumulants(&spec, stable, 2).unwrap();
            (oracle.kappa(2) / engine.kappa(2) - 1.0).abs()
        };
        let e100 = err_at(100.0);
        let e1000 = err_at(1000.0);
        assert!(e1000 < e100, "{e1000} !< {e100}");
    }

    #[test]
    fn epsilon_warning_threshold() {
        let stable = StableParams::new(1.0, 1.0).unwrap();
        let ok = cumulants(&ms(1.0, 100.0), stable, 4).unwrap();
        assert!(ok.warnings().is_empty());
        let shaky = cumulants(&ms(1.0, 5.0), stable, 4).unwrap();
        assert!(!shaky.warnings().is_empty());
    }

    #[test]
    fn report_shape() {
        let stable = StableParams::new(1.0, 1.0).unwrap();
        let spec = ms(1.0, 100.0);
        let set = cumulants(&spec, stable, 6).unwrap();
        let report = CumulantReport::new(&spec, stable, &set, "expansion");
        assert_eq!(report.kappa.len(), 6);
        assert_eq!(report.lambda.len(), 4); // λ₃..λ₆
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["method"], "expansion");
        assert!((json["epsilon"].as_f64().unwrap() - 0.01).abs() < 1e-12);
    }
}
