//! Flat key-value experiment configuration.
//!
//! The format is one `key = value` per line, `#` comments, no nesting;
//! multi-valued entries are whitespace-separated. Unknown keys are
//! rejected with their line number. Dotted prefixes group related keys
//! (`domain.*`, `rate.*`, `cut.*`, `family.*`, ...).

use std::collections::BTreeMap;

use cheeger_core::estimators::FamilyParams;
use cheeger_core::geometry::{CandidateSet, Domain};

use crate::{CliError, Result};

/// Experiment kinds understood by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Pointwise,
    Estimate,
    Measure,
    Hoeffding,
    GraphOracle,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "pointwise" => Some(Self::Pointwise),
            "estimate" => Some(Self::Estimate),
            "measure" => Some(Self::Measure),
            "hoeffding" => Some(Self::Hoeffding),
            "graph-oracle" => Some(Self::GraphOracle),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Pointwise => "pointwise",
            Self::Estimate => "estimate",
            Self::Measure => "measure",
            Self::Hoeffding => "hoeffding",
            Self::GraphOracle => "graph-oracle",
        }
    }
}

/// Connectivity-radius schedule.
#[derive(Debug, Clone, PartialEq)]
pub enum RateRule {
    /// `r_n = ((log n)^2 / n)^{1/(d+1)}`; satisfies the pointwise-theorem
    /// condition `n r^{d+1} / log n -> inf`.
    Theorem1,
    /// `r_n = n^{-1/(2d+2)}`; satisfies the estimation-theorem condition
    /// `n r^{2d+1} -> inf`.
    Theorem2,
    Fixed(f64),
}

/// Reach-floor schedule for the penalized estimator.
#[derive(Debug, Clone, PartialEq)]
pub enum RhoRule {
    /// `rho_n = 1 / log n`: slower than any power of `r_n` at desk scales.
    InverseLog,
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct RateSchedule {
    pub rule: RateRule,
    pub overrides: BTreeMap<usize, f64>,
}

impl RateSchedule {
    pub fn r_at(&self, n: usize, d: usize) -> f64 {
        if let Some(&v) = self.overrides.get(&n) {
            return v;
        }
        let nf = n as f64;
        match self.rule {
            RateRule::Theorem1 => (nf.ln().powi(2) / nf).powf(1.0 / (d as f64 + 1.0)),
            RateRule::Theorem2 => nf.powf(-1.0 / (2.0 * d as f64 + 2.0)),
            RateRule::Fixed(v) => v,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RhoSchedule {
    pub rule: RhoRule,
    pub overrides: BTreeMap<usize, f64>,
}

impl RhoSchedule {
    pub fn rho_at(&self, n: usize) -> f64 {
        if let Some(&v) = self.overrides.get(&n) {
            return v;
        }
        match self.rule {
            RhoRule::InverseLog => 1.0 / (n as f64).ln(),
            RhoRule::Fixed(v) => v,
        }
    }
}

/// Candidate cut described in a config; turned into a [`CandidateSet`]
/// against a concrete domain.
#[derive(Debug, Clone, PartialEq)]
pub enum CutSpec {
    HalfSpace { angle: f64, offset: f64, complement: bool },
    Ball { center: [f64; 2], radius: f64, complement: bool },
}

impl CutSpec {
    pub fn build(&self, domain: &Domain) -> Result<CandidateSet> {
        let anchor = [domain.center[0], domain.center[1]];
        match *self {
            CutSpec::HalfSpace { angle, offset, complement } => {
                let c = CandidateSet::half_plane(angle, offset, anchor);
                Ok(if complement { c.complemented() } else { c })
            }
            CutSpec::Ball { center, radius, complement } => {
                let c = CandidateSet::ball(center.to_vec(), radius)
                    .map_err(CliError::Core)?;
                Ok(if complement { c.complemented() } else { c })
            }
        }
    }
}

/// Hoeffding-experiment kernel choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoeffdingKernel {
    Volume,
    Perimeter,
}

/// Check-mode thresholds; defaults pin the acceptance tolerances.
#[derive(Debug, Clone)]
pub struct CheckConfig {
    /// Median relative error of the main metric at the largest n.
    pub rel_err: f64,
    /// L1 recovery score budget as a fraction of Vol(M).
    pub l1_frac: f64,
    /// Largest-n cap on the measure experiment's suite discrepancy.
    pub measure_final: f64,
    /// Allowed trend inversions along the n schedule.
    pub trend_allowed_inversions: usize,
    /// Binomial-SE multiplier in the Hoeffding check.
    pub se_mult: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            rel_err: 0.10,
            l1_frac: 0.10,
            measure_final: 0.05,
            trend_allowed_inversions: 1,
            se_mult: 3.0,
        }
    }
}

/// Fully parsed experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub domain: Domain,
    pub n_schedule: Vec<usize>,
    pub replicates: usize,
    pub master_seed: u64,
    pub rate: RateSchedule,
    pub rho: RhoSchedule,
    pub cut: CutSpec,
    pub family: FamilyParams,
    pub kernel: HoeffdingKernel,
    pub t_max: f64,
    pub t_points: usize,
    /// Gaussian bump test function: center offset from the domain center
    /// and width, both absolute.
    pub bump_center: [f64; 2],
    pub bump_sigma: f64,
    pub threads: usize,
    pub output: Option<String>,
    pub format: OutputFormat,
    pub check: CheckConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

/// Raw parsed file: key -> (value, line), duplicate keys rejected.
pub struct RawConfig {
    path: String,
    entries: BTreeMap<String, (String, usize)>,
    consumed: std::cell::RefCell<std::collections::BTreeSet<String>>,
}

impl RawConfig {
    pub fn parse(path: &str, text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some(eq) = line.find('=') else {
                return Err(CliError::Config {
                    path: path.to_string(),
                    line: line_no,
                    msg: format!("expected `key = value`, got {line:?}"),
                });
            };
            let key = line[..eq].trim().to_string();
            let value = line[eq + 1..].trim().to_string();
            if key.is_empty() {
                return Err(CliError::Config {
                    path: path.to_string(),
                    line: line_no,
                    msg: "empty key".to_string(),
                });
            }
            if let Some((_, prev)) = entries.insert(key.clone(), (value, line_no)) {
                return Err(CliError::Config {
                    path: path.to_string(),
                    line: line_no,
                    msg: format!("duplicate key {key:?} (first set on line {prev})"),
                });
            }
        }
        Ok(RawConfig { path: path.to_string(), entries, consumed: Default::default() })
    }

    fn err(&self, line: usize, msg: String) -> CliError {
        CliError::Config { path: self.path.clone(), line, msg }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.consumed.borrow_mut().insert(key.to_string());
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map(|&(_, l)| l).unwrap_or(0)
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| self.err(self.line_of(key), format!("{key}: bad number {v:?}"))),
        }
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| self.err(self.line_of(key), format!("{key}: bad integer {v:?}"))),
        }
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<u64>()
                .map(Some)
                .map_err(|_| self.err(self.line_of(key), format!("{key}: bad integer {v:?}"))),
        }
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        match self.get(key) {
            None => Ok(None),
            Some("true") => Ok(Some(true)),
            Some("false") => Ok(Some(false)),
            Some(v) => {
                Err(self.err(self.line_of(key), format!("{key}: expected true/false, got {v:?}")))
            }
        }
    }

    pub fn get_f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .split_whitespace()
                .map(|tok| tok.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|_| self.err(self.line_of(key), format!("{key}: bad number list {v:?}"))),
        }
    }

    pub fn get_usize_list(&self, key: &str) -> Result<Option<Vec<usize>>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .split_whitespace()
                .map(|tok| tok.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|_| self.err(self.line_of(key), format!("{key}: bad integer list {v:?}"))),
        }
    }

    /// Error out on any key never touched by the typed extraction.
    pub fn reject_unknown(&self) -> Result<()> {
        let consumed = self.consumed.borrow();
        for (key, &(_, line)) in &self.entries {
            // Per-n overrides are consumed lazily by prefix.
            if key.starts_with("rate.r.") || key.starts_with("rate.rho.") {
                continue;
            }
            if !consumed.contains(key) {
                return Err(self.err(line, format!("unknown key {key:?}")));
            }
        }
        Ok(())
    }

    fn rate_overrides(&self, prefix: &str) -> Result<BTreeMap<usize, f64>> {
        let mut map = BTreeMap::new();
        for (key, (value, line)) in &self.entries {
            if let Some(suffix) = key.strip_prefix(prefix) {
                let n: usize = suffix.parse().map_err(|_| {
                    self.err(*line, format!("{key}: bad n suffix {suffix:?}"))
                })?;
                let v: f64 = value.parse().map_err(|_| {
                    self.err(*line, format!("{key}: bad number {value:?}"))
                })?;
                if !(v > 0.0) {
                    return Err(self.err(*line, format!("{key}: rate must be positive")));
                }
                map.insert(n, v);
            }
        }
        Ok(map)
    }
}

/// Parse and validate a full experiment config. `kind_override` comes
/// from the CLI subcommand and must agree with the file when both are given.
pub fn load_experiment_config(
    path: &str,
    text: &str,
    kind_override: Option<ExperimentKind>,
) -> Result<ExperimentConfig> {
    let raw = RawConfig::parse(path, text)?;
    let cfg = build_config(&raw, kind_override)?;
    raw.reject_unknown()?;
    Ok(cfg)
}

fn build_config(raw: &RawConfig, kind_override: Option<ExperimentKind>) -> Result<ExperimentConfig> {
    let file_kind = match raw.get("experiment") {
        Some(v) => Some(ExperimentKind::parse(v).ok_or_else(|| {
            raw.err(raw.line_of("experiment"), format!("unknown experiment kind {v:?}"))
        })?),
        None => None,
    };
    let kind = match (kind_override, file_kind) {
        (Some(a), Some(b)) if a != b => {
            return Err(raw.err(
                raw.line_of("experiment"),
                format!("experiment kind {} conflicts with requested {}", b.name(), a.name()),
            ));
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => {
            return Err(raw.err(0, "missing experiment kind (set `experiment = ...`)".into()))
        }
    };

    let domain = {
        let get = |key: &str| raw.get(&format!("domain.{key}")).map(str::to_string);
        Domain::from_kv(&get).map_err(|e| {
            raw.err(raw.line_of("domain.kind"), format!("invalid domain: {e}"))
        })?
    };

    let n_schedule = raw
        .get_usize_list("n")?
        .ok_or_else(|| raw.err(0, "missing n schedule (`n = ...`)".into()))?;
    if n_schedule.is_empty() {
        return Err(raw.err(raw.line_of("n"), "empty n schedule".into()));
    }
    if !n_schedule.windows(2).all(|w| w[0] < w[1]) {
        return Err(raw.err(raw.line_of("n"), "n schedule must be strictly increasing".into()));
    }
    let replicates = raw.get_usize("replicates")?.unwrap_or(20);
    if replicates == 0 {
        return Err(raw.err(raw.line_of("replicates"), "replicate count must be >= 1".into()));
    }
    let master_seed = raw.get_u64("seed")?.unwrap_or(1);

    let rate_rule = match raw.get("rate.r") {
        None => match kind {
            ExperimentKind::Estimate | ExperimentKind::Measure => RateRule::Theorem2,
            _ => RateRule::Theorem1,
        },
        Some("t1") => RateRule::Theorem1,
        Some("t2") => RateRule::Theorem2,
        Some(v) => RateRule::Fixed(v.parse::<f64>().map_err(|_| {
            raw.err(raw.line_of("rate.r"), format!("rate.r: expected t1, t2 or a number, got {v:?}"))
        })?),
    };
    let rho_rule = match raw.get("rate.rho") {
        None | Some("log") => RhoRule::InverseLog,
        Some(v) => RhoRule::Fixed(v.parse::<f64>().map_err(|_| {
            raw.err(raw.line_of("rate.rho"), format!("rate.rho: expected log or a number, got {v:?}"))
        })?),
    };
    let rate = RateSchedule { rule: rate_rule, overrides: raw.rate_overrides("rate.r.")? };
    let rho = RhoSchedule { rule: rho_rule, overrides: raw.rate_overrides("rate.rho.")? };

    // All rates must be positive at every scheduled n.
    let d = domain.dim();
    for &n in &n_schedule {
        if n >= 2 {
            let r = rate.r_at(n, d);
            if !(r > 0.0) || !r.is_finite() {
                return Err(raw.err(raw.line_of("rate.r"), format!("rate.r at n = {n} is {r}")));
            }
            let p = rho.rho_at(n);
            if !(p > 0.0) || !p.is_finite() {
                return Err(raw.err(raw.line_of("rate.rho"), format!("rate.rho at n = {n} is {p}")));
            }
        }
    }

    let cut = {
        let complement = raw.get_bool("cut.complement")?.unwrap_or(false);
        match raw.get("cut.kind").unwrap_or("half-space") {
            "half-space" => CutSpec::HalfSpace {
                angle: raw.get_f64("cut.angle")?.unwrap_or(0.0),
                offset: raw.get_f64("cut.offset")?.unwrap_or(0.0),
                complement,
            },
            "ball" => {
                let center = raw
                    .get_f64_list("cut.center")?
                    .ok_or_else(|| raw.err(raw.line_of("cut.kind"), "ball cut needs cut.center".into()))?;
                if center.len() != 2 {
                    return Err(raw.err(raw.line_of("cut.center"), "cut.center must be 2-d".into()));
                }
                CutSpec::Ball {
                    center: [center[0], center[1]],
                    radius: raw.get_f64("cut.radius")?.ok_or_else(|| {
                        raw.err(raw.line_of("cut.kind"), "ball cut needs cut.radius".into())
                    })?,
                    complement,
                }
            }
            other => {
                return Err(raw.err(
                    raw.line_of("cut.kind"),
                    format!("unknown cut kind {other:?} (half-space | ball)"),
                ))
            }
        }
    };

    let family = FamilyParams {
        angles: raw.get_usize("family.angles")?.unwrap_or(36),
        offsets: raw.get_usize("family.offsets")?.unwrap_or(41),
        ball_grid: raw.get_usize("family.ball_grid")?.unwrap_or(0),
        ball_radii: raw.get_f64_list("family.ball_radii")?.unwrap_or_default(),
    };
    if family.angles == 0 || family.offsets == 0 {
        return Err(raw.err(
            raw.line_of("family.angles").max(raw.line_of("family.offsets")),
            "family needs at least one angle and one offset".into(),
        ));
    }

    let kernel = match raw.get("hoeffding.kernel").unwrap_or("volume") {
        "volume" => HoeffdingKernel::Volume,
        "perimeter" => HoeffdingKernel::Perimeter,
        other => {
            return Err(raw.err(
                raw.line_of("hoeffding.kernel"),
                format!("unknown kernel {other:?} (volume | perimeter)"),
            ))
        }
    };
    let t_max = raw.get_f64("hoeffding.t_max")?.unwrap_or(0.5);
    let t_points = raw.get_usize("hoeffding.t_points")?.unwrap_or(10);
    if !(t_max > 0.0) || t_points == 0 {
        return Err(raw.err(raw.line_of("hoeffding.t_max"), "hoeffding grid must be positive".into()));
    }

    let circ = domain.circumradius();
    let bump_rel = raw.get_f64_list("measure.bump_center")?.unwrap_or(vec![0.3 * circ, 0.2 * circ]);
    if bump_rel.len() != 2 {
        return Err(raw.err(raw.line_of("measure.bump_center"), "measure.bump_center must be 2-d".into()));
    }
    let bump_center = [domain.center[0] + bump_rel[0], domain.center[1] + bump_rel[1]];
    let bump_sigma = raw.get_f64("measure.bump_sigma")?.unwrap_or(0.3 * circ);

    let threads = raw.get_usize("threads")?.unwrap_or(0);
    let output = raw.get("output").map(str::to_string);
    let format = match raw.get("format").unwrap_or("csv") {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        "both" => OutputFormat::Both,
        other => {
            return Err(raw.err(
                raw.line_of("format"),
                format!("unknown format {other:?} (csv | json | both)"),
            ))
        }
    };

    let defaults = CheckConfig::default();
    let check = CheckConfig {
        rel_err: raw.get_f64("check.rel_err")?.unwrap_or(match kind {
            ExperimentKind::Estimate | ExperimentKind::Measure => 0.15,
            _ => defaults.rel_err,
        }),
        l1_frac: raw.get_f64("check.l1_frac")?.unwrap_or(defaults.l1_frac),
        measure_final: raw.get_f64("check.measure_final")?.unwrap_or(defaults.measure_final),
        trend_allowed_inversions: raw
            .get_usize("check.trend_allowed_inversions")?
            .unwrap_or(defaults.trend_allowed_inversions),
        se_mult: raw.get_f64("check.se_mult")?.unwrap_or(defaults.se_mult),
    };

    Ok(ExperimentConfig {
        kind,
        domain,
        n_schedule,
        replicates,
        master_seed,
        rate,
        rho,
        cut,
        family,
        kernel,
        t_max,
        t_points,
        bump_center,
        bump_sigma,
        threads,
        output,
        format,
        check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
# pointwise on the unit disk
experiment = pointwise
domain.kind = disk
domain.center = 0 0
domain.radius = 1
domain.margin = 1
n = 500 2000
replicates = 3
seed = 7
rate.r = t1
cut.kind = half-space
cut.angle = 0
cut.offset = 0
";

    #[test]
    fn parses_a_valid_config() {
        let cfg = load_experiment_config("test.conf", GOOD, None).unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Pointwise);
        assert_eq!(cfg.n_schedule, vec![500, 2000]);
        assert_eq!(cfg.replicates, 3);
        assert_eq!(cfg.master_seed, 7);
        assert_eq!(cfg.domain.kind_name(), "disk");
        let r = cfg.rate.r_at(500, 2);
        let expect = ((500.0_f64).ln().powi(2) / 500.0).powf(1.0 / 3.0);
        assert!((r - expect).abs() < 1e-15);
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = format!("{GOOD}\nbogus.key = 1\n");
        match load_experiment_config("test.conf", &text, None) {
            Err(CliError::Config { line, msg, .. }) => {
                assert_eq!(line, 15);
                assert!(msg.contains("bogus.key"), "{msg}");
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_key_rejected() {
        let text = format!("{GOOD}seed = 9\n");
        match load_experiment_config("t", &text, None) {
            Err(CliError::Config { line, msg, .. }) => {
                assert_eq!(line, 14);
                assert!(msg.contains("duplicate"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schedule_must_increase() {
        let text = GOOD.replace("n = 500 2000", "n = 2000 500");
        assert!(matches!(
            load_experiment_config("t", &text, None),
            Err(CliError::Config { .. })
        ));
    }

    #[test]
    fn kind_override_conflicts() {
        let err = load_experiment_config("t", GOOD, Some(ExperimentKind::Estimate));
        assert!(matches!(err, Err(CliError::Config { .. })));
        let ok = load_experiment_config("t", GOOD, Some(ExperimentKind::Pointwise));
        assert!(ok.is_ok());
    }

    #[test]
    fn per_n_overrides() {
        let text = format!("{GOOD}rate.r.500 = 0.25\n");
        let cfg = load_experiment_config("t", &text, None).unwrap();
        assert_eq!(cfg.rate.r_at(500, 2), 0.25);
        assert_ne!(cfg.rate.r_at(2000, 2), 0.25);
    }

    #[test]
    fn rho_schedule_default_is_inverse_log() {
        let cfg = load_experiment_config("t", GOOD, None).unwrap();
        assert!((cfg.rho.rho_at(20000) - 1.0 / (20000.0_f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "  # full-line comment\n\nexperiment = hoeffding # trailing\ndomain.kind = disk\ndomain.center = 0 0\ndomain.radius = 1\nn = 50 200\n";
        let cfg = load_experiment_config("t", text, None).unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Hoeffding);
        assert_eq!(cfg.kernel, HoeffdingKernel::Volume);
    }

    #[test]
    fn ball_cut_requires_geometry() {
        let text = GOOD.replace("cut.kind = half-space", "cut.kind = ball");
        assert!(load_experiment_config("t", &text, None).is_err());
    }
}
