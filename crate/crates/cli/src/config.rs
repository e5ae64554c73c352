//! Experiment configuration: a plain-text key-value file with sections.
//!
//! Grammar (see the repository README for the full key reference):
//!
//! ```text
//! # comment
//! [section]
//! key = value
//! ```
//!
//! Sections: `[stable]`, `[deformation]`, `[run]`, `[analysis]`,
//! `[output]`. Unknown keys are rejected so typos cannot silently fall
//! back to defaults. The configuration hash is computed over the parsed,
//! canonicalized key-value pairs, so reordering keys or reformatting the
//! file does not change it, while every semantic change does.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use tlf_core::cumulants::StableParams;
use tlf_core::deformation::DeformationSpec;
use tlf_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Binary,
}

impl Format {
    fn parse(s: &str) -> Result<Format> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "binary" => Ok(Format::Binary),
            other => Err(Error::Parse(format!(
                "unknown format '{other}' (expected csv, json or binary)"
            ))),
        }
    }

    fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Binary => "binary",
        }
    }
}

/// Fully resolved experiment parameters.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub stable: StableParams,
    pub deformation: DeformationSpec,
    /// Table path for tabulated shapes (kept for the config hash).
    pub table_path: Option<PathBuf>,

    pub walks: usize,
    pub steps: usize,
    pub seed: u64,
    /// Reuse a previously simulated ensemble instead of regenerating.
    pub ensemble_path: Option<PathBuf>,
    pub budget_mb: u64,

    pub max_order: usize,
    pub bootstrap_resamples: usize,
    pub tolerance: f64,
    pub queries: Vec<Vec<u64>>,
    pub anchor_m: u64,
    pub surface_grid: usize,
    pub regime_max_n: u64,
    pub tail_points: usize,

    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
}

impl ExperimentConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// FNV-1a hash of the canonical "section.key=value" lines.
    pub fn hash(&self) -> u64 {
        let mut canon = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(canon, "{k}={v}");
        };
        put("stable.alpha", format!("{:?}", self.stable.alpha()));
        put("stable.gamma", format!("{:?}", self.stable.gamma()));
        put(
            "deformation.kind",
            self.deformation.kind().as_str().to_string(),
        );
        put("deformation.beta", format!("{:?}", self.deformation.beta()));
        put("deformation.l", format!("{:?}", self.deformation.l()));
        if let Some(p) = &self.table_path {
            put("deformation.table", p.display().to_string());
        }
        put("run.walks", self.walks.to_string());
        put("run.steps", self.steps.to_string());
        put("run.seed", self.seed.to_string());
        if let Some(p) = &self.ensemble_path {
            put("run.ensemble", p.display().to_string());
        }
        put("run.budget_mb", self.budget_mb.to_string());
        put("analysis.max_order", self.max_order.to_string());
        put("analysis.bootstrap", self.bootstrap_resamples.to_string());
        put("analysis.tolerance", format!("{:?}", self.tolerance));
        let queries: Vec<String> = self
            .queries
            .iter()
            .map(|q| {
                q.iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        put("analysis.queries", queries.join(";"));
        put("analysis.anchor_m", self.anchor_m.to_string());
        put("analysis.surface_grid", self.surface_grid.to_string());
        put("analysis.regime_max_n", self.regime_max_n.to_string());
        put("analysis.tail_points", self.tail_points.to_string());
        let mut formats: Vec<&str> = self.formats.iter().map(Format::as_str).collect();
        formats.sort_unstable();
        put("output.formats", formats.join(","));

        let mut hash = 0xcbf2_9ce4_8422_2325u64;
        for byte in canon.bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        hash
    }

    /// Bootstrap seed derived from the experiment seed by a fixed offset,
    /// so one master seed drives simulation and resampling without the two
    /// streams colliding.
    pub fn bootstrap_seed(&self) -> u64 {
        self.seed ^ 0xB007_5EED_0000_0000
    }
}

fn parse_sections(text: &str) -> Result<BTreeMap<String, BTreeMap<String, String>>> {
    let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut current = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(idx) => &raw[..idx],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::Parse(format!("line {}: unterminated section", lineno + 1)))?;
            current = name.trim().to_string();
            sections.entry(current.clone()).or_default();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("line {}: expected 'key = value', got '{line}'", lineno + 1))
        })?;
        if current.is_empty() {
            return Err(Error::Parse(format!(
                "line {}: key outside of any [section]",
                lineno + 1
            )));
        }
        let prev = sections
            .get_mut(&current)
            .unwrap()
            .insert(key.trim().to_string(), value.trim().to_string());
        if prev.is_some() {
            return Err(Error::Parse(format!(
                "line {}: duplicate key '{}' in [{current}]",
                lineno + 1,
                key.trim()
            )));
        }
    }
    Ok(sections)
}

struct Section<'a> {
    name: &'a str,
    entries: BTreeMap<String, String>,
}

impl<'a> Section<'a> {
    fn get(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|_| {
                Error::Parse(format!("[{}] {key} = '{v}' cannot be parsed", self.name))
            }),
        }
    }

    fn require<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        self.parsed(key)?
            .ok_or_else(|| Error::Parse(format!("[{}] missing required key '{key}'", self.name)))
    }

    fn finish(self) -> Result<()> {
        if let Some(key) = self.entries.into_keys().next() {
            return Err(Error::Parse(format!("[{}] unknown key '{key}'", self.name)));
        }
        Ok(())
    }
}

fn parse_queries(text: &str) -> Result<Vec<Vec<u64>>> {
    let mut queries = Vec::new();
    for chunk in text.split(';') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let times: Vec<u64> = chunk
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad time '{s}' in query '{chunk}'")))
            })
            .collect::<Result<_>>()?;
        if !(2..=4).contains(&times.len()) {
            return Err(Error::Parse(format!(
                "query '{chunk}' must list 2 to 4 times"
            )));
        }
        if times.contains(&0) {
            return Err(Error::Parse(format!("query '{chunk}' contains time 0")));
        }
        queries.push(times);
    }
    if queries.is_empty() {
        return Err(Error::Parse("queries list is empty".to_string()));
    }
    Ok(queries)
}

/// Loads and validates a config file; `config_dir`-relative paths resolve
/// against the file's own directory.
pub fn load(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    from_str(&text, base)
}

pub fn from_str(text: &str, base: &Path) -> Result<ExperimentConfig> {
    let mut sections = parse_sections(text)?;
    let mut section = |name: &'static str| -> Section<'static> {
        Section {
            name,
            entries: sections.remove(name).unwrap_or_default(),
        }
    };

    let mut stable_s = section("stable");
    let alpha: f64 = stable_s.require("alpha")?;
    let gamma: f64 = stable_s.require("gamma")?;
    stable_s.finish()?;
    let stable = StableParams::new(alpha, gamma)?;

    let mut def_s = section("deformation");
    let kind_str: String = def_s.require("kind")?;
    let l: f64 = def_s.require("l")?;
    let beta_opt: Option<f64> = def_s.parsed("beta")?;
    let delta_opt: Option<f64> = def_s.parsed("delta")?;
    let table_rel: Option<String> = def_s.get("table");
    def_s.finish()?;

    let beta = match (beta_opt, delta_opt) {
        (Some(_), Some(_)) => {
            return Err(Error::Parse(
                "beta and delta are mutually exclusive (beta = 1 + delta)".to_string(),
            ))
        }
        (Some(b), None) => b,
        (None, Some(d)) => 1.0 + d,
        (None, None) => 1.0,
    };

    let has_table_key = table_rel.is_some();
    let mut table_path = None;
    let deformation = match kind_str.as_str() {
        "mantegna_stanley" => DeformationSpec::mantegna_stanley(beta, l)?,
        "exponential" => DeformationSpec::exponential(beta, l)?,
        "tabulated" => {
            let rel = table_rel.ok_or_else(|| {
                Error::Parse("[deformation] kind = tabulated requires 'table = <csv path>'".to_string())
            })?;
            let resolved = base.join(&rel);
            if !resolved.exists() {
                return Err(Error::Validation(vec![format!(
                    "table file '{}' does not exist",
                    resolved.display()
                )]));
            }
            let spec = DeformationSpec::from_csv_path(&resolved, l)?;
            table_path = Some(resolved);
            spec
        }
        other => {
            return Err(Error::Parse(format!(
                "unknown deformation kind '{other}' \
                 (expected mantegna_stanley, exponential or tabulated)"
            )))
        }
    };
    if kind_str != "tabulated" && has_table_key {
        return Err(Error::Parse(
            "[deformation] 'table' is only valid for kind = tabulated".to_string(),
        ));
    }

    let mut run_s = section("run");
    let walks: usize = match run_s.parsed("walks")? {
        Some(v) => v,
        None => run_s.require("m")?,
    };
    let steps: usize = match run_s.parsed("steps")? {
        Some(v) => v,
        None => run_s.require("n")?,
    };
    // aliases may not be doubled up
    if run_s.get("m").is_some() || run_s.get("n").is_some() {
        return Err(Error::Parse(
            "[run] use either walks/steps or m/n, not both".to_string(),
        ));
    }
    let seed: u64 = run_s.require("seed")?;
    let ensemble_path = run_s.get("ensemble").map(|p| base.join(p));
    let budget_mb: u64 = run_s.parsed("budget_mb")?.unwrap_or(2048);
    run_s.finish()?;
    if walks == 0 || steps == 0 {
        return Err(Error::Validation(vec![
            "walks and steps must be >= 1".to_string()
        ]));
    }
    if let Some(p) = &ensemble_path {
        if !p.exists() {
            return Err(Error::Validation(vec![format!(
                "ensemble file '{}' does not exist",
                p.display()
            )]));
        }
    }

    let mut ana = section("analysis");
    let max_order: usize = ana.parsed("max_order")?.unwrap_or(6);
    let bootstrap_resamples: usize = ana.parsed("bootstrap")?.unwrap_or(200);
    let tolerance: f64 = ana.parsed("tolerance")?.unwrap_or(1e-9);
    let anchor_m: u64 = ana.parsed("anchor_m")?.unwrap_or(8);
    let queries = match ana.get("queries") {
        Some(text) => parse_queries(&text)?,
        None => vec![
            vec![anchor_m, 4 * anchor_m],
            vec![anchor_m, 2 * anchor_m, 4 * anchor_m],
            vec![anchor_m; 4],
        ],
    };
    let surface_grid: usize = ana.parsed("surface_grid")?.unwrap_or(41);
    let regime_max_n: u64 = ana.parsed("regime_max_n")?.unwrap_or(10_000_000);
    let tail_points: usize = ana.parsed("tail_points")?.unwrap_or(8);
    ana.finish()?;
    if !(2..=8).contains(&max_order) {
        return Err(Error::Validation(vec![format!(
            "max_order must be 2..=8, got {max_order}"
        )]));
    }
    if anchor_m == 0 || surface_grid < 2 || tail_points == 0 || bootstrap_resamples == 0 {
        return Err(Error::Validation(vec![
            "anchor_m, surface_grid, tail_points and bootstrap must be positive".to_string(),
        ]));
    }

    let mut out_s = section("output");
    let out_dir = PathBuf::from(out_s.get("dir").unwrap_or_else(|| "out".to_string()));
    let formats = match out_s.get("formats") {
        None => vec![Format::Csv, Format::Json, Format::Binary],
        Some(text) => {
            let mut fs: Vec<Format> = text
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(Format::parse)
                .collect::<Result<_>>()?;
            fs.sort_unstable();
            fs.dedup();
            if fs.is_empty() {
                return Err(Error::Parse("output.formats is empty".to_string()));
            }
            fs
        }
    };
    out_s.finish()?;

    if let Some(name) = sections.into_keys().next() {
        return Err(Error::Parse(format!("unknown section [{name}]")));
    }

    Ok(ExperimentConfig {
        stable,
        deformation,
        table_path,
        walks,
        steps,
        seed,
        ensemble_path,
        budget_mb,
        max_order,
        bootstrap_resamples,
        tolerance,
        queries,
        anchor_m,
        surface_grid,
        regime_max_n,
        tail_points,
        out_dir: base.join(out_dir),
        formats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "\
[stable]
alpha = 1.0
gamma = 1.0

[deformation]
kind = mantegna_stanley
beta = 1.0
l = 100.0

[run]
walks = 100
steps = 16
seed = 42

[output]
dir = out
";

    #[test]
    fn parses_with_defaults() {
        let cfg = from_str(BASE, Path::new(".")).unwrap();
        assert_eq!(cfg.walks, 100);
        assert_eq!(cfg.max_order, 6);
        assert_eq!(cfg.bootstrap_resamples, 200);
        assert_eq!(cfg.queries.len(), 3);
        assert!(cfg.wants(Format::Json));
    }

    #[test]
    fn hash_ignores_formatting_but_not_values() {
        let permuted = "\
[output]
dir = out

[run]
seed = 42       # with a comment
steps = 16
walks = 100

[deformation]
l = 100.0
beta = 1.0
kind = mantegna_stanley

[stable]
gamma = 1.0
alpha = 1.0
";
        let a = from_str(BASE, Path::new(".")).unwrap();
        let b = from_str(permuted, Path::new(".")).unwrap();
        assert_eq!(a.hash(), b.hash());

        let changed = BASE.replace("seed = 42", "seed = 43");
        let c = from_str(&changed, Path::new(".")).unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn delta_and_beta_are_exclusive() {
        let text = BASE.replace("beta = 1.0", "beta = 1.0\ndelta = 0.2");
        assert!(from_str(&text, Path::new(".")).is_err());

        let text = BASE.replace("beta = 1.0", "delta = 0.2");
        let cfg = from_str(&text, Path::new(".")).unwrap();
        assert!((cfg.deformation.beta() - 1.2).abs() < 1e-15);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_queries() {
        let text = BASE.replace("seed = 42", "seed = 42\nbogus = 1");
        assert!(from_str(&text, Path::new(".")).is_err());

        let text = format!("{BASE}\n[analysis]\nqueries = 4,9; 5\n");
        assert!(from_str(&text, Path::new(".")).is_err());

        let text = format!("{BASE}\n[analysis]\nqueries = 4,9; 2,4,8,16\n");
        let cfg = from_str(&text, Path::new(".")).unwrap();
        assert_eq!(cfg.queries, vec![vec![4, 9], vec![2, 4, 8, 16]]);
    }

    #[test]
    fn rejects_invalid_parameters() {
        let text = BASE.replace("alpha = 1.0", "alpha = 2.5");
        assert!(from_str(&text, Path::new(".")).is_err());
        let text = BASE.replace("l = 100.0", "l = -1.0");
        assert!(from_str(&text, Path::new(".")).is_err());
    }
}
