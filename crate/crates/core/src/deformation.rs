//! Truncation (deformation) shapes.
//!
//! A deformation function g multiplies the stable density and suppresses its
//! tails. It is evaluated in the dimensionless coordinate ξ = x/l, where l
//! is the characteristic truncation scale carried by the [`DeformationSpec`];
//! callers apply the scale. Admissibility: g(0) = 1, 0 ≤ g ≤ 1 everywhere, and g → 0 at
//! large |ξ|. The upper bound by one is what lets the sampler use g directly
//! as a rejection acceptance probability.

use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};

/// Which family of truncation shape a [`DeformationSpec`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeformationKind {
    /// Hard cut: g = 1 on [−β, 1] and 0 outside.
    MantegnaStanley,
    /// One-sided exponentials: exp(−ξ) for ξ ≥ 0, exp(ξ/β) for ξ < 0.
    Exponential,
    /// Piecewise-linear interpolation of a (ξ, g) table, zero outside it.
    Tabulated,
}

impl DeformationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DeformationKind::MantegnaStanley => "mantegna_stanley",
            DeformationKind::Exponential => "exponential",
            DeformationKind::Tabulated => "tabulated",
        }
    }
}

/// A validated truncation shape: family, asymmetry β, spatial scale l.
///
/// Immutable after construction; all evaluation methods take `&self`, so a
/// spec can be shared freely across worker threads.
#[derive(Debug, Clone)]
pub struct DeformationSpec {
    kind: DeformationKind,
    beta: f64,
    l: f64,
    table: Option<Vec<(f64, f64)>>,
}

/// Below this value g is treated as vanished when choosing integration and
/// sampling cutoffs.
pub const SUPPORT_THRESHOLD: f64 = 1e-14;

impl DeformationSpec {
    /// Hard-cut truncation with asymmetry `beta` and scale `l`.
    pub fn mantegna_stanley(beta: f64, l: f64) -> Result<Self> {
        let spec = DeformationSpec {
            kind: DeformationKind::MantegnaStanley,
            beta,
            l,
            table: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Exponential truncation with asymmetry `beta` and scale `l`.
    pub fn exponential(beta: f64, l: f64) -> Result<Self> {
        let spec = DeformationSpec {
            kind: DeformationKind::Exponential,
            beta,
            l,
            table: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Tabulated truncation from strictly increasing (ξ, g) pairs.
    ///
    /// The table must bracket ξ = 0 with interpolated g(0) = 1, stay inside
    /// [0, 1], and reach 0 at both of its ends (the decay condition for a
    /// compactly supported shape). β is not meaningful for tables and is
    /// stored as 1.
    pub fn tabulated(points: Vec<(f64, f64)>, l: f64) -> Result<Self> {
        let spec = DeformationSpec {
            kind: DeformationKind::Tabulated,
            beta: 1.0,
            l,
            table: Some(points),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Load a tabulated shape from two-column CSV (ξ, g). A non-numeric
    /// first line is treated as a header. Comma or whitespace separated.
    pub fn from_csv<R: BufRead>(reader: R, l: f64) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if fields.len() != 2 {
                return Err(Error::Parse(format!(
                    "line {}: expected two columns, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
                (Ok(xi), Ok(g)) => points.push((xi, g)),
                _ if points.is_empty() && lineno == 0 => continue, // header
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: non-numeric entry '{}'",
                        lineno + 1,
                        trimmed
                    )))
                }
            }
        }
        Self::tabulated(points, l)
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P, l: f64) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv(std::io::BufReader::new(file), l)
    }

    /// Checks every admissibility condition, reporting all violations.
    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            issues.push(format!("beta must be positive, got {}", self.beta));
        }
        if !(self.l > 0.0 && self.l.is_finite()) {
            issues.push(format!("l must be positive, got {}", self.l));
        }
        if let Some(table) = &self.table {
            if table.len() < 3 {
                issues.push(format!("table needs at least 3 points, got {}", table.len()));
            }
            if table.windows(2).any(|w| w[1].0 <= w[0].0) {
                issues.push("table abscissae must be strictly increasing".to_string());
            }
            if table
                .iter()
                .any(|&(xi, g)| !xi.is_finite() || !(0.0..=1.0).contains(&g))
            {
                issues.push("table values must be finite with g in [0, 1]".to_string());
            }
            match (table.first(), table.last()) {
                (Some(&(lo, glo)), Some(&(hi, ghi))) => {
                    if !(lo < 0.0 && hi > 0.0) {
                        issues.push("table must bracket xi = 0".to_string());
                    }
                    if glo != 0.0 || ghi != 0.0 {
                        issues.push("table must decay to 0 at both endpoints".to_string());
                    }
                    if lo < 0.0 && hi > 0.0 {
                        let g0 = interp(table, 0.0);
                        if (g0 - 1.0).abs() > 1e-9 {
                            issues.push(format!("g(0) != 1 (interpolated g(0) = {g0})"));
                        }
                    }
                }
                _ => issues.push("table is empty".to_string()),
            }
        } else if self.kind == DeformationKind::Tabulated {
            issues.push("tabulated spec without a table".to_string());
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(issues))
        }
    }

    pub fn kind(&self) -> DeformationKind {
        self.kind
    }

    /// Asymmetry coefficient β (1 for tabulated shapes).
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Characteristic spatial scale l, in the units of x.
    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn table(&self) -> Option<&[(f64, f64)]> {
        self.table.as_deref()
    }

    /// g(ξ) ∈ [0, 1].
    pub fn eval(&self, xi: f64) -> f64 {
        match self.kind {
            DeformationKind::MantegnaStanley => {
                if (-self.beta..=1.0).contains(&xi) {
                    1.0
                } else {
                    0.0
                }
            }
            DeformationKind::Exponential => {
                if xi >= 0.0 {
                    (-xi).exp()
                } else {
                    (xi / self.beta).exp()
                }
            }
            DeformationKind::Tabulated => interp(self.table.as_ref().unwrap(), xi),
        }
    }

    /// Even part (g(ξ) + g(−ξ))/2.
    pub fn even_part(&self, xi: f64) -> f64 {
        0.5 * (self.eval(xi) + self.eval(-xi))
    }

    /// Odd part (g(ξ) − g(−ξ))/2; identically zero for symmetric shapes.
    pub fn odd_part(&self, xi: f64) -> f64 {
        match self.kind {
            // e^{−a} − e^{−a/β} = −e^{−a}·expm1(a(1 − 1/β)): the expm1 form
            // keeps precision near the origin where the plain difference
            // cancels to rounding noise.
            DeformationKind::Exponential => {
                let a = xi.abs();
                let diff = -0.5 * (-a).exp() * f64::exp_m1(a * (1.0 - 1.0 / self.beta));
                if xi >= 0.0 {
                    diff
                } else {
                    -diff
                }
            }
            _ => 0.5 * (self.eval(xi) - self.eval(-xi)),
        }
    }

    /// (lo, hi) in ξ outside of which g < `threshold`. Exact support edges
    /// for the hard cut and tables; solved from the exponentials otherwise.
    pub fn support(&self, threshold: f64) -> (f64, f64) {
        match self.kind {
            DeformationKind::MantegnaStanley => (-self.beta, 1.0),
            DeformationKind::Exponential => {
                let reach = -threshold.ln(); // e^{-reach} = threshold
                (-self.beta * reach, reach)
            }
            DeformationKind::Tabulated => {
                let t = self.table.as_ref().unwrap();
                (t.first().unwrap().0, t.last().unwrap().0)
            }
        }
    }

    /// ξ values where g or its derivative jumps; quadrature routines place
    /// these on subinterval boundaries.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            DeformationKind::MantegnaStanley => vec![-self.beta, 1.0],
            DeformationKind::Exponential => vec![0.0],
            DeformationKind::Tabulated => {
                self.table.as_ref().unwrap().iter().map(|&(xi, _)| xi).collect()
            }
        }
    }
}

fn interp(table: &[(f64, f64)], xi: f64) -> f64 {
    let n = table.len();
    if n == 0 || xi < table[0].0 || xi > table[n - 1].0 {
        return 0.0;
    }
    // binary search for the bracketing segment
    let idx = table.partition_point(|&(x, _)| x <= xi);
    if idx == 0 {
        return table[0].1;
    }
    if idx == n {
        return table[n - 1].1;
    }
    let (x0, y0) = table[idx - 1];
    let (x1, y1) = table[idx];
    if x1 == x0 {
        return y0;
    }
    let t = (xi - x0) / (x1 - x0);
    y0 + t * (y1 - y0)
}
