//! Pointwise densities: symmetric stable, truncated, and their tail forms.
//!
//! The symmetric stable density is evaluated by direct quadrature of its
//! Fourier cosine representation
//!
//! ```text
//!   P_L(x) = (1/πγ) ∫₀^∞ cos(u·x/γ) exp(−u^α) du,
//! ```
//!
//! with the integration range split at the cosine zeros so the adaptive
//! rule never straddles an oscillation, and a power-tail series taking over
//! for |x|/γ beyond [`TAIL_SWITCH`] (or whenever the oscillatory integral
//! is not worth the cost). α = 1 short-circuits to the exact Cauchy form.

use std::f64::consts::PI;
use std::io::Write;

use crate::cumulants::StableParams;
use crate::deformation::{DeformationSpec, SUPPORT_THRESHOLD};
use crate::error::{Error, Result};
use crate::numeric::quad::{self, QuadOptions};
use crate::numeric::special::gamma;
use crate::numeric::DEFAULT_REL_TOL;

/// |x|/γ beyond which the tail series replaces quadrature.
pub const TAIL_SWITCH: f64 = 35.0;

/// exp(−u^α) is cut once u^α exceeds this (integrand below ~1e−18).
const EXP_CUT: f64 = 41.45;

/// Oscillation-segment budget for the cosine integral; exceeding it falls
/// back to the tail series (only reachable for small α where the series
/// converges).
const MAX_OSC_SEGMENTS: usize = 300_000;

/// Symmetric stable density P_L(x) for index α and scale γ.
pub fn stable_pdf(stable: StableParams, x: f64) -> f64 {
    stable_pdf_tol(stable, x, DEFAULT_REL_TOL)
}

/// [`stable_pdf`] with an explicit quadrature tolerance.
pub fn stable_pdf_tol(stable: StableParams, x: f64, rel_tol: f64) -> f64 {
    let (alpha, gamma_s) = (stable.alpha(), stable.gamma());
    if (alpha - 1.0).abs() < 1e-12 {
        return gamma_s / (PI * (x * x + gamma_s * gamma_s));
    }
    let z = (x / gamma_s).abs();
    if z >= TAIL_SWITCH {
        return tail_density_series(stable, x);
    }
    match cosine_integral(alpha, z, rel_tol) {
        Ok(v) => (v / (PI * gamma_s)).max(0.0),
        Err(_) => tail_density_series(stable, x),
    }
}

/// ∫₀^∞ cos(uz) exp(−u^α) du by adaptive quadrature, segmented at the
/// cosine zeros and, for α < 1, at a geometric ladder resolving the
/// derivative cusp of exp(−u^α) at the origin.
fn cosine_integral(alpha: f64, z: f64, rel_tol: f64) -> Result<f64> {
    let upper = EXP_CUT.powf(1.0 / alpha);
    let n_osc = (z * upper / PI) as usize;
    if n_osc > MAX_OSC_SEGMENTS {
        return Err(Error::Quadrature {
            quantity: "stable cosine integral".to_string(),
            estimate: f64::NAN,
            error_bound: f64::INFINITY,
        });
    }
    let mut pts = Vec::with_capacity(n_osc + 48);
    pts.push(0.0);
    if alpha < 1.0 {
        let mut u = upper * 2f64.powi(-40);
        while u < upper.min(if n_osc > 0 { PI / z } else { upper }) {
            pts.push(u);
            u *= 4.0;
        }
    }
    for k in 1..=n_osc {
        pts.push(k as f64 * PI / z);
    }
    pts.push(upper);
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let opts = QuadOptions {
        rel_tol,
        abs_tol: 1e-18,
        max_intervals: pts.len() + 4000,
    };
    quad::integrate_segments(|u: f64| (u * z).cos() * (-u.powf(alpha)).exp(), &pts, &opts)
        .map(|r| r.value)
}

/// Leading power-law tail term: (1/π) Γ(1+α) sin(πα/2) γ^α |x|^{−α−1}.
pub fn tail_density_first_order(stable: StableParams, x: f64) -> f64 {
    let alpha = stable.alpha();
    let z = (x / stable.gamma()).abs();
    gamma(1.0 + alpha) * (PI * alpha / 2.0).sin() / (PI * stable.gamma()) * z.powf(-alpha - 1.0)
}

/// Power-tail expansion of the stable density, summed to machine precision
/// or to its smallest (asymptotic) term. Convergent for every α < 1;
/// effectively exact for |x|/γ ≳ 10 at any α used here.
pub fn tail_density_series(stable: StableParams, x: f64) -> f64 {
    let alpha = stable.alpha();
    let z = (x / stable.gamma()).abs();
    let mut sum = 0.0f64;
    let mut factorial = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..=150 {
        factorial *= k as f64;
        let ka = k as f64 * alpha;
        if ka + 1.0 > 170.0 {
            break;
        }
        let term = if k % 2 == 1 { 1.0 } else { -1.0 } * gamma(ka + 1.0) / factorial
            * (PI * ka / 2.0).sin()
            * z.powf(-ka - 1.0);
        let mag = term.abs();
        if mag > prev {
            break; // asymptotic regime: stop at the smallest term
        }
        sum += term;
        if mag <= 1e-17 * sum.abs() {
            break;
        }
        prev = mag;
    }
    (sum / (PI * stable.gamma())).max(0.0)
}

/// ∫ P_L(x) g(x/l) dx, the total probability surviving truncation.
fn surviving_mass(spec: &DeformationSpec, stable: StableParams, rel_tol: f64) -> Result<f64> {
    let pts = truncation_segments(spec, stable);
    let opts = QuadOptions {
        rel_tol,
        abs_tol: 1e-14,
        max_intervals: 40_000,
    };
    let l = spec.l();
    quad::integrate_segments(
        |x: f64| stable_pdf_tol(stable, x, rel_tol) * spec.eval(x / l),
        &pts,
        &opts,
    )
    .map(|r| r.value)
    .map_err(|e| e.named("truncated-density normalization"))
}

/// Segment boundaries for integrals of P_L·g: shape kinks scaled by l plus
/// a geometric ladder around the stable peak of width γ.
pub(crate) fn truncation_segments(spec: &DeformationSpec, stable: StableParams) -> Vec<f64> {
    let l = spec.l();
    let g = stable.gamma();
    let (lo, hi) = spec.support(SUPPORT_THRESHOLD);
    let (xlo, xhi) = (lo * l, hi * l);
    let mut pts = vec![xlo, 0.0, xhi];
    for b in spec.breakpoints() {
        let x = b * l;
        if x > xlo && x < xhi {
            pts.push(x);
        }
    }
    let mut s = g.min(l) * 1e-3;
    while s < xhi.max(-xlo) {
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
    pts
}

/// Normalization constant C = 1 / ∫ P_L(x) g(x/l) dx of the truncated law.
pub fn normalization_constant(spec: &DeformationSpec, stable: StableParams) -> Result<f64> {
    Ok(1.0 / surviving_mass(spec, stable, DEFAULT_REL_TOL)?)
}

/// Probability mass removed by the truncation, b = 1 − 1/C.
///
/// To leading order in ε this is the tail-series density integrated against
/// 1 − g, and the rejection sampler's expected rejection rate equals it
/// exactly. Values above 0.5 mean the small-ε picture has broken down.
pub fn tail_mass(spec: &DeformationSpec, stable: StableParams) -> Result<f64> {
    Ok(1.0 - surviving_mass(spec, stable, DEFAULT_REL_TOL)?)
}

/// Truncated density C·P_L(x)·g(x/l). Computes the normalization on every
/// call; use [`TruncatedDistribution`] for repeated evaluation.
pub fn truncated_pdf(spec: &DeformationSpec, stable: StableParams, x: f64) -> Result<f64> {
    Ok(TruncatedDistribution::new(spec, stable)?.pdf(x))
}

/// A truncated law with its normalization computed once.
#[derive(Debug, Clone)]
pub struct TruncatedDistribution<'a> {
    spec: &'a DeformationSpec,
    stable: StableParams,
    normalization: f64,
}

impl<'a> TruncatedDistribution<'a> {
    pub fn new(spec: &'a DeformationSpec, stable: StableParams) -> Result<Self> {
        Self::with_tolerance(spec, stable, DEFAULT_REL_TOL)
    }

    pub fn with_tolerance(
        spec: &'a DeformationSpec,
        stable: StableParams,
        rel_tol: f64,
    ) -> Result<Self> {
        let mass = surviving_mass(spec, stable, rel_tol)?;
        Ok(TruncatedDistribution {
            spec,
            stable,
            normalization: 1.0 / mass,
        })
    }

    /// C·P_L(x)·g(x/l).
    pub fn pdf(&self, x: f64) -> f64 {
        self.normalization * stable_pdf(self.stable, x) * self.spec.eval(x / self.spec.l())
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// b = 1 − 1/C.
    pub fn tail_mass(&self) -> f64 {
        1.0 - 1.0 / self.normalization
    }
}

/// Approximate one-point density of the walk at step n in the Lévy regime:
/// the n-step stable density modulated by the (static) truncation shape,
/// n^{−1/α} P_L(x n^{−1/α}) g(x/l). Not exactly normalized; valid while
/// n ≲ (l/γ)^α.
pub fn levy_regime_pdf(spec: &DeformationSpec, stable: StableParams, n: u64, x: f64) -> f64 {
    assert!(n >= 1, "step count must be >= 1");
    let gamma_n = stable.gamma() * (n as f64).powf(1.0 / stable.alpha());
    if !gamma_n.is_finite() {
        return 0.0; // n^{1/α} overflowed: the density is flat zero at this scale
    }
    let scaled = StableParams::new(stable.alpha(), gamma_n).expect("scaled params stay in domain");
    stable_pdf(scaled, x) * spec.eval(x / spec.l())
}

/// Walk return probability W₁(0, n) = Γ(1/α) / (π α γ n^{1/α}).
pub fn return_probability(stable: StableParams, n: u64) -> f64 {
    assert!(n >= 1, "step count must be >= 1");
    let alpha = stable.alpha();
    if (alpha - 1.0).abs() < 1e-12 {
        // Same arithmetic as the Cauchy density at the origin with scale
        // γn, so the self-similarity identity holds bit-exactly.
        let g = stable.gamma() * n as f64;
        return g / (PI * (g * g));
    }
    gamma(1.0 / alpha) / (PI * alpha * stable.gamma() * (n as f64).powf(1.0 / alpha))
}

/// A sampled truncated density, ready for CSV export.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub normalization: f64,
}

impl DensityGrid {
    /// Samples the truncated density on an arctangent-spaced grid (dense at
    /// the stable peak, sparse in the tails) covering the truncation
    /// support. The trapezoid integral of the result is 1 to ~1e−5.
    pub fn truncated(spec: &DeformationSpec, stable: StableParams, points: usize) -> Result<Self> {
        assert!(points >= 16, "grid needs at least 16 points");
        let dist = TruncatedDistribution::new(spec, stable)?;
        let l = spec.l();
        let g = stable.gamma();
        let (lo, hi) = spec.support(1e-12);
        let (theta_lo, theta_hi) = ((lo * l / g).atan(), (hi * l / g).atan());
        let mut x = Vec::with_capacity(points);
        let mut p = Vec::with_capacity(points);
        for i in 0..points {
            let t = theta_lo + (theta_hi - theta_lo) * i as f64 / (points - 1) as f64;
            let xi = g * t.tan();
            x.push(xi);
            p.push(dist.pdf(xi));
        }
        Ok(DensityGrid {
            x,
            p,
            normalization: dist.normalization(),
        })
    }

    /// Trapezoid integral over the grid.
    pub fn trapezoid(&self) -> f64 {
        self.x
            .windows(2)
            .zip(self.p.windows(2))
            .map(|(xs, ps)| 0.5 * (ps[0] + ps[1]) * (xs[1] - xs[0]))
            .sum()
    }

    /// Two-column CSV (x, p) with the normalization in a comment header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# normalization={:.17e}", self.normalization)?;
        writeln!(w, "x,p")?;
        for (x, p) in self.x.iter().zip(&self.p) {
            writeln!(w, "{x:.17e},{p:.17e}")?;
        }
        Ok(())
    }
}
