//! `key = value` experiment files with `[section]` headers.
//!
//! ```text
//! [scenario]
//! mode = mimo
//! topology = monostatic
//! num_tx = 1025
//! range_m = 10
//! theta_deg = 30
//!
//! [sweep]
//! axis = M
//! values = 9, 17, 33, 65
//!
//! [methods]
//! list = closed_form, numerical_fim
//! ```
//!
//! Every key can be overridden with `section.key=value`.

use crate::closedform::Regime;
use crate::error::{Error, Result};
use crate::fim::Method;
use crate::scenario::{Mode, Topology};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const DEFAULT_FREQUENCY_HZ: f64 = 2.37e9;
pub const DEFAULT_SPACING_M: f64 = 0.0628;

/// Swept quantity. Angles are in degrees at this boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    NumTx,
    ThetaDeg,
    RangeM,
    SnrDb,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::NumTx => "M",
            SweepAxis::ThetaDeg => "theta_deg",
            SweepAxis::RangeM => "r_m",
            SweepAxis::SnrDb => "snr_db",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "M" | "num_tx" => Some(SweepAxis::NumTx),
            "theta_deg" | "theta" => Some(SweepAxis::ThetaDeg),
            "r_m" | "r" | "range_m" => Some(SweepAxis::RangeM),
            "snr_db" => Some(SweepAxis::SnrDb),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepValues {
    /// `start, start + step, …` up to `stop` inclusive.
    Linear { start: f64, stop: f64, step: f64 },
    /// `start, start·factor, …` up to `stop` inclusive.
    Geometric { start: f64, stop: f64, factor: f64 },
    List(Vec<f64>),
}

impl SweepValues {
    pub fn points(&self) -> Vec<f64> {
        const SLACK: f64 = 1e-9;
        match self {
            SweepValues::List(v) => v.clone(),
            SweepValues::Linear { start, stop, step } => {
                if stop < start {
                    return Vec::new();
                }
                let n = ((stop - start) / step + SLACK).floor() as usize + 1;
                (0..n).map(|i| start + i as f64 * step).collect()
            }
            SweepValues::Geometric { start, stop, factor } => {
                let mut out = Vec::new();
                let mut i = 0;
                loop {
                    let v = start * factor.powi(i);
                    if v > stop * (1.0 + SLACK) {
                        break out;
                    }
                    out.push(v);
                    i += 1;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: SweepValues,
}

/// Transmit power and noise, either normalised (`γ`, `L`) or raw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerSpec {
    Normalized { snr_db: f64, time_bandwidth: f64 },
    Raw { total_power_w: f64, kappa_re: f64, kappa_im: f64, noise_psd: f64, bandwidth_hz: f64, cpi_s: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    MatchedFieldMl,
    Capon,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::MatchedFieldMl => "matched_field_ml",
            EstimatorKind::Capon => "capon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// `±width_sd·√CRB` around the truth, `points × points`.
    BoundScaled,
    /// `±theta_halfwidth_deg`, `±range_halfwidth_frac·r`.
    Window,
}

impl GridKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GridKind::BoundScaled => "bound_scaled",
            GridKind::Window => "window",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloConfig {
    pub estimator: EstimatorKind,
    pub trials: usize,
    pub seed: u64,
    pub grid: GridKind,
    pub width_sd: f64,
    pub points: usize,
    pub theta_halfwidth_deg: f64,
    pub theta_points: usize,
    pub range_halfwidth_frac: f64,
    pub range_points: usize,
    pub refine_levels: usize,
    pub capon_snapshots: usize,
    pub capon_loading: f64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            estimator: EstimatorKind::MatchedFieldMl,
            trials: 500,
            seed: 1,
            grid: GridKind::BoundScaled,
            width_sd: 6.0,
            points: 31,
            theta_halfwidth_deg: 5.0,
            theta_points: 181,
            range_halfwidth_frac: 0.2,
            range_points: 121,
            refine_levels: 3,
            capon_snapshots: 64,
            capon_loading: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Evaluated in order; rows are emitted per mode.
    pub modes: Vec<Mode>,
    pub topology: Topology,
    pub num_tx: usize,
    pub tx_spacing_m: f64,
    /// Bistatic only.
    pub num_rx: Option<usize>,
    pub rx_spacing_m: Option<f64>,
    pub separation_m: Option<f64>,
    pub range_m: f64,
    pub theta_deg: f64,
    pub frequency_hz: f64,
    pub power: PowerSpec,
    pub sweep: Sweep,
    pub methods: Vec<Method>,
    pub asymptotic_regime: Regime,
    pub monte_carlo: Option<MonteCarloConfig>,
    /// Free-text lines copied into the CSV header.
    pub notes: Vec<String>,
}

// key -> (value, origin) where origin is "line N" or "--set"
type RawMap = BTreeMap<String, (String, String)>;

/// Parsed key/value pairs before validation; overrides apply on top.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: RawMap,
    notes: Vec<String>,
}

const KNOWN_KEYS: &[&str] = &[
    "scenario.mode",
    "scenario.topology",
    "scenario.num_tx",
    "scenario.d_tx_m",
    "scenario.num_rx",
    "scenario.d_rx_m",
    "scenario.separation_m",
    "scenario.range_m",
    "scenario.theta_deg",
    "scenario.frequency_hz",
    "power.snr_db",
    "power.time_bandwidth",
    "power.total_power_w",
    "power.kappa_re",
    "power.kappa_im",
    "power.noise_psd",
    "power.bandwidth_hz",
    "power.cpi_s",
    "sweep.axis",
    "sweep.start",
    "sweep.stop",
    "sweep.step",
    "sweep.factor",
    "sweep.values",
    "methods.list",
    "methods.asymptotic_regime",
    "monte_carlo.estimator",
    "monte_carlo.trials",
    "monte_carlo.seed",
    "monte_carlo.grid",
    "monte_carlo.width_sd",
    "monte_carlo.points",
    "monte_carlo.theta_halfwidth_deg",
    "monte_carlo.theta_points",
    "monte_carlo.range_halfwidth_frac",
    "monte_carlo.range_points",
    "monte_carlo.refine_levels",
    "monte_carlo.capon_snapshots",
    "monte_carlo.capon_loading",
];

impl RawConfig {
    /// Reads the file format. `note = …` lines in `[meta]` become header notes.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        let mut section = String::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config(format!("line {lineno}: unterminated section header")))?;
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {lineno}: expected key = value")))?;
            let (k, v) = (k.trim(), v.trim());
            if section == "meta" && k == "note" {
                raw.notes.push(v.to_string());
                continue;
            }
            if section.is_empty() {
                return Err(Error::Config(format!("line {lineno}: key '{k}' outside any section")));
            }
            raw.insert(&format!("{section}.{k}"), v, format!("line {lineno}"))?;
        }
        Ok(raw)
    }

    fn insert(&mut self, key: &str, value: &str, origin: String) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Config(format!("{origin}: unknown key '{key}'")));
        }
        self.entries.insert(key.to_string(), (value.to_string(), origin));
        Ok(())
    }

    /// Applies a `section.key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set {assignment}: expected section.key=value")))?;
        self.insert(k.trim(), v.trim(), format!("--set {}", k.trim()))
    }

    pub fn build(&self) -> Result<ExperimentConfig> {
        Builder { raw: &self.entries }.build(self.notes.clone())
    }
}

struct Builder<'a> {
    raw: &'a RawMap,
}

impl Builder<'_> {
    fn get(&self, key: &str) -> Option<(&str, &str)> {
        self.raw.get(key).map(|(v, o)| (v.as_str(), o.as_str()))
    }

    fn has(&self, key: &str) -> bool {
        self.raw.contains_key(key)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some((v, origin)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("{origin}: field {key}: cannot parse '{v}'"))),
        }
    }

    fn float(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.parsed::<f64>(key)?.unwrap_or(default);
        if !v.is_finite() {
            return Err(self.bad(key, "must be finite"));
        }
        Ok(v)
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.float(key, default)?;
        if v <= 0.0 {
            return Err(self.bad(key, "must be positive"));
        }
        Ok(v)
    }

    fn count(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.parsed::<usize>(key)?.unwrap_or(default))
    }

    fn bad(&self, key: &str, why: &str) -> Error {
        let origin = self.get(key).map(|(_, o)| o).unwrap_or("config");
        Error::Config(format!("{origin}: field {key}: {why}"))
    }

    fn choice<T>(&self, key: &str, default: T, parse: impl Fn(&str) -> Option<T>) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some((v, _)) => parse(v).ok_or_else(|| self.bad(key, &format!("unknown value '{v}'"))),
        }
    }

    fn build(&self, notes: Vec<String>) -> Result<ExperimentConfig> {
        let modes = match self.get("scenario.mode") {
            None => vec![Mode::Mimo],
            Some((v, _)) => {
                let mut out = Vec::new();
                for tok in v.split(',').map(str::trim) {
                    let m = match tok {
                        "mimo" => Mode::Mimo,
                        "phased" => Mode::Phased,
                        _ => return Err(self.bad("scenario.mode", &format!("unknown mode '{tok}'"))),
                    };
                    if out.contains(&m) {
                        return Err(self.bad("scenario.mode", &format!("duplicate mode '{tok}'")));
                    }
                    out.push(m);
                }
                out
            }
        };
        let topology = self.choice("scenario.topology", Topology::Monostatic, |s| match s {
            "monostatic" => Some(Topology::Monostatic),
            "bistatic" => Some(Topology::BistaticNearFarTx),
            _ => None,
        })?;
        let num_tx = self.count("scenario.num_tx", 1025)?;
        if num_tx == 0 {
            return Err(self.bad("scenario.num_tx", "must be at least 1"));
        }
        let tx_spacing_m = self.positive("scenario.d_tx_m", DEFAULT_SPACING_M)?;
        let (num_rx, rx_spacing_m, separation_m) = match topology {
            Topology::Monostatic => {
                for k in ["scenario.num_rx", "scenario.d_rx_m", "scenario.separation_m"] {
                    if self.has(k) {
                        return Err(self.bad(k, "not used by the monostatic topology"));
                    }
                }
                (None, None, None)
            }
            Topology::BistaticNearFarTx => {
                let n = self.count("scenario.num_rx", 8)?;
                if n == 0 {
                    return Err(self.bad("scenario.num_rx", "must be at least 1"));
                }
                (
                    Some(n),
                    Some(self.positive("scenario.d_rx_m", DEFAULT_SPACING_M)?),
                    Some(self.positive("scenario.separation_m", 35.0)?),
                )
            }
        };
        let range_m = self.positive("scenario.range_m", 10.0)?;
        let theta_deg = self.float("scenario.theta_deg", 30.0)?;
        if theta_deg.abs() >= 90.0 {
            return Err(self.bad("scenario.theta_deg", "must lie in (-90, 90)"));
        }
        let frequency_hz = self.positive("scenario.frequency_hz", DEFAULT_FREQUENCY_HZ)?;

        let raw_keys = [
            "power.total_power_w",
            "power.kappa_re",
            "power.kappa_im",
            "power.noise_psd",
            "power.bandwidth_hz",
            "power.cpi_s",
        ];
        let power = if raw_keys.iter().any(|k| self.has(k)) {
            for k in ["power.snr_db", "power.time_bandwidth"] {
                if self.has(k) {
                    return Err(self.bad(k, "cannot be combined with raw power keys"));
                }
            }
            let p = PowerSpec::Raw {
                total_power_w: self.positive("power.total_power_w", 1.0)?,
                kappa_re: self.float("power.kappa_re", 1.0)?,
                kappa_im: self.float("power.kappa_im", 0.0)?,
                noise_psd: self.positive("power.noise_psd", 1.0)?,
                bandwidth_hz: self.positive("power.bandwidth_hz", 1.0)?,
                cpi_s: self.positive("power.cpi_s", 1.0)?,
            };
            if let PowerSpec::Raw { kappa_re, kappa_im, bandwidth_hz, cpi_s, .. } = p {
                if kappa_re == 0.0 && kappa_im == 0.0 {
                    return Err(self.bad("power.kappa_re", "reflection coefficient must be non-zero"));
                }
                if bandwidth_hz * cpi_s < 1.0 {
                    return Err(self.bad("power.cpi_s", "time-bandwidth product must be >= 1"));
                }
            }
            p
        } else {
            let time_bandwidth = self.float("power.time_bandwidth", 1.0)?;
            if time_bandwidth < 1.0 {
                return Err(self.bad("power.time_bandwidth", "must be >= 1"));
            }
            PowerSpec::Normalized { snr_db: self.float("power.snr_db", 0.0)?, time_bandwidth }
        };

        let sweep = self.sweep()?;
        if sweep.axis == SweepAxis::SnrDb && matches!(power, PowerSpec::Raw { .. }) {
            return Err(self.bad("sweep.axis", "an snr_db sweep needs normalised power (snr_db, time_bandwidth)"));
        }

        let methods = match self.get("methods.list") {
            None => vec![Method::ClosedForm],
            Some((v, _)) => {
                let mut out = Vec::new();
                for tok in v.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                    let m = Method::parse(tok).ok_or_else(|| self.bad("methods.list", &format!("unknown method '{tok}'")))?;
                    if out.contains(&m) {
                        return Err(self.bad("methods.list", &format!("duplicate method '{tok}'")));
                    }
                    out.push(m);
                }
                out
            }
        };
        let asymptotic_regime = self.choice("methods.asymptotic_regime", Regime::InfiniteAperture, Regime::parse)?;

        let mc_present = self.raw.keys().any(|k| k.starts_with("monte_carlo."));
        let monte_carlo = if mc_present { Some(self.monte_carlo()?) } else { None };

        let cfg = ExperimentConfig {
            modes,
            topology,
            num_tx,
            tx_spacing_m,
            num_rx,
            rx_spacing_m,
            separation_m,
            range_m,
            theta_deg,
            frequency_hz,
            power,
            sweep,
            methods,
            asymptotic_regime,
            monte_carlo,
            notes,
        };
        cfg.check_methods()?;
        Ok(cfg)
    }

    fn sweep(&self) -> Result<Sweep> {
        let axis = self.choice("sweep.axis", None, |s| SweepAxis::parse(s).map(Some))?;
        let Some(axis) = axis else {
            return Err(Error::Config("field sweep.axis: exactly one sweep axis is required".into()));
        };
        let has = |k: &str| self.has(k);
        let values = if has("sweep.values") {
            for k in ["sweep.start", "sweep.stop", "sweep.step", "sweep.factor"] {
                if has(k) {
                    return Err(self.bad(k, "cannot be combined with sweep.values"));
                }
            }
            let (v, _) = self.get("sweep.values").unwrap();
            let mut out = Vec::new();
            for tok in v.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let x: f64 = tok
                    .parse()
                    .map_err(|_| self.bad("sweep.values", &format!("cannot parse '{tok}'")))?;
                if !x.is_finite() {
                    return Err(self.bad("sweep.values", "values must be finite"));
                }
                out.push(x);
            }
            SweepValues::List(out)
        } else {
            if !has("sweep.start") || !has("sweep.stop") {
                return Err(Error::Config(
                    "field sweep: give either sweep.values or sweep.start/sweep.stop with step or factor".into(),
                ));
            }
            let start = self.float("sweep.start", 0.0)?;
            let stop = self.float("sweep.stop", 0.0)?;
            match (has("sweep.step"), has("sweep.factor")) {
                (true, false) => SweepValues::Linear { start, stop, step: self.positive("sweep.step", 1.0)? },
                (false, true) => {
                    let factor = self.float("sweep.factor", 2.0)?;
                    if factor <= 1.0 {
                        return Err(self.bad("sweep.factor", "must exceed 1"));
                    }
                    if start <= 0.0 {
                        return Err(self.bad("sweep.start", "a geometric sweep needs a positive start"));
                    }
                    SweepValues::Geometric { start, stop, factor }
                }
                _ => return Err(Error::Config("field sweep: give exactly one of sweep.step and sweep.factor".into())),
            }
        };
        Ok(Sweep { axis, values })
    }

    fn monte_carlo(&self) -> Result<MonteCarloConfig> {
        let d = MonteCarloConfig::default();
        let mc = MonteCarloConfig {
            estimator: self.choice("monte_carlo.estimator", d.estimator, |s| match s {
                "matched_field_ml" => Some(EstimatorKind::MatchedFieldMl),
                "capon" => Some(EstimatorKind::Capon),
                _ => None,
            })?,
            trials: self.count("monte_carlo.trials", d.trials)?,
            seed: self.parsed("monte_carlo.seed")?.unwrap_or(d.seed),
            grid: self.choice("monte_carlo.grid", d.grid, |s| match s {
                "bound_scaled" => Some(GridKind::BoundScaled),
                "window" => Some(GridKind::Window),
                _ => None,
            })?,
            width_sd: self.positive("monte_carlo.width_sd", d.width_sd)?,
            points: self.count("monte_carlo.points", d.points)?,
            theta_halfwidth_deg: self.positive("monte_carlo.theta_halfwidth_deg", d.theta_halfwidth_deg)?,
            theta_points: self.count("monte_carlo.theta_points", d.theta_points)?,
            range_halfwidth_frac: self.positive("monte_carlo.range_halfwidth_frac", d.range_halfwidth_frac)?,
            range_points: self.count("monte_carlo.range_points", d.range_points)?,
            refine_levels: self.count("monte_carlo.refine_levels", d.refine_levels)?,
            capon_snapshots: self.count("monte_carlo.capon_snapshots", d.capon_snapshots)?,
            capon_loading: self.float("monte_carlo.capon_loading", d.capon_loading)?,
        };
        if mc.trials == 0 {
            return Err(self.bad("monte_carlo.trials", "must be at least 1"));
        }
        for (k, v) in [
            ("monte_carlo.points", mc.points),
            ("monte_carlo.theta_points", mc.theta_points),
            ("monte_carlo.range_points", mc.range_points),
        ] {
            if v < 2 {
                return Err(self.bad(k, "must be at least 2"));
            }
        }
        if mc.range_halfwidth_frac >= 1.0 {
            return Err(self.bad("monte_carlo.range_halfwidth_frac", "must be below 1"));
        }
        if mc.estimator == EstimatorKind::Capon && mc.capon_snapshots < 2 {
            return Err(self.bad("monte_carlo.capon_snapshots", "Capon needs at least 2 snapshots"));
        }
        if mc.capon_loading < 0.0 {
            return Err(self.bad("monte_carlo.capon_loading", "must be non-negative"));
        }
        Ok(mc)
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        RawConfig::parse(text)?.build()
    }

    fn check_methods(&self) -> Result<()> {
        let bad = |why: String| Err(Error::Config(format!("field methods.list: {why}")));
        let bistatic = self.topology == Topology::BistaticNearFarTx;
        for (m, mode) in self.methods.iter().flat_map(|m| self.modes.iter().map(move |o| (m, *o))) {
            match m {
                Method::Taylor if bistatic => return bad("taylor is defined for the monostatic topology only".into()),
                Method::FarFieldUpw if bistatic && mode == Mode::Phased => {
                    return bad("far_field_upw has no bistatic phased form".into())
                }
                Method::Asymptotic if bistatic && mode == Mode::Mimo => {
                    if self.asymptotic_regime == Regime::LargeAperture {
                        return bad("the bistatic asymptotic forms cover infinite_aperture and small_aperture".into());
                    }
                    let thetas = match self.sweep.axis {
                        SweepAxis::ThetaDeg => self.sweep.values.points(),
                        _ => vec![self.theta_deg],
                    };
                    if thetas.iter().any(|t| *t != 0.0) {
                        return bad("bistatic asymptotic forms need theta_deg = 0".into());
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Text form that [`ExperimentConfig::parse`] maps back to `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if !self.notes.is_empty() {
            s.push_str("[meta]\n");
            for n in &self.notes {
                let _ = writeln!(s, "note = {n}");
            }
            s.push('\n');
        }
        s.push_str("[scenario]\n");
        let modes: Vec<&str> = self.modes.iter().map(|m| m.as_str()).collect();
        let _ = writeln!(s, "mode = {}", modes.join(", "));
        let _ = writeln!(s, "topology = {}", self.topology.as_str());
        let _ = writeln!(s, "num_tx = {}", self.num_tx);
        let _ = writeln!(s, "d_tx_m = {}", self.tx_spacing_m);
        if let Some(n) = self.num_rx {
            let _ = writeln!(s, "num_rx = {n}");
        }
        if let Some(d) = self.rx_spacing_m {
            let _ = writeln!(s, "d_rx_m = {d}");
        }
        if let Some(r) = self.separation_m {
            let _ = writeln!(s, "separation_m = {r}");
        }
        let _ = writeln!(s, "range_m = {}", self.range_m);
        let _ = writeln!(s, "theta_deg = {}", self.theta_deg);
        let _ = writeln!(s, "frequency_hz = {}", self.frequency_hz);

        s.push_str("\n[power]\n");
        match self.power {
            PowerSpec::Normalized { snr_db, time_bandwidth } => {
                let _ = writeln!(s, "snr_db = {snr_db}");
                let _ = writeln!(s, "time_bandwidth = {time_bandwidth}");
            }
            PowerSpec::Raw { total_power_w, kappa_re, kappa_im, noise_psd, bandwidth_hz, cpi_s } => {
                let _ = writeln!(s, "total_power_w = {total_power_w}");
                let _ = writeln!(s, "kappa_re = {kappa_re}");
                let _ = writeln!(s, "kappa_im = {kappa_im}");
                let _ = writeln!(s, "noise_psd = {noise_psd}");
                let _ = writeln!(s, "bandwidth_hz = {bandwidth_hz}");
                let _ = writeln!(s, "cpi_s = {cpi_s}");
            }
        }

        s.push_str("\n[sweep]\n");
        let _ = writeln!(s, "axis = {}", self.sweep.axis.as_str());
        match &self.sweep.values {
            SweepValues::Linear { start, stop, step } => {
                let _ = writeln!(s, "start = {start}\nstop = {stop}\nstep = {step}");
            }
            SweepValues::Geometric { start, stop, factor } => {
                let _ = writeln!(s, "start = {start}\nstop = {stop}\nfactor = {factor}");
            }
            SweepValues::List(v) => {
                let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(s, "values = {}", list.join(", "));
            }
        }

        s.push_str("\n[methods]\n");
        let list: Vec<&str> = self.methods.iter().map(|m| m.as_str()).collect();
        let _ = writeln!(s, "list = {}", list.join(", "));
        let _ = writeln!(s, "asymptotic_regime = {}", self.asymptotic_regime.as_str());

        if let Some(mc) = &self.monte_carlo {
            s.push_str("\n[monte_carlo]\n");
            let _ = writeln!(s, "estimator = {}", mc.estimator.as_str());
            let _ = writeln!(s, "trials = {}", mc.trials);
            let _ = writeln!(s, "seed = {}", mc.seed);
            let _ = writeln!(s, "grid = {}", mc.grid.as_str());
            let _ = writeln!(s, "width_sd = {}", mc.width_sd);
            let _ = writeln!(s, "points = {}", mc.points);
            let _ = writeln!(s, "theta_halfwidth_deg = {}", mc.theta_halfwidth_deg);
            let _ = writeln!(s, "theta_points = {}", mc.theta_points);
            let _ = writeln!(s, "range_halfwidth_frac = {}", mc.range_halfwidth_frac);
            let _ = writeln!(s, "range_points = {}", mc.range_points);
            let _ = writeln!(s, "refine_levels = {}", mc.refine_levels);
            let _ = writeln!(s, "capon_snapshots = {}", mc.capon_snapshots);
            let _ = writeln!(s, "capon_loading = {}", mc.capon_loading);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[scenario]\nnum_tx = 65\n[sweep]\naxis = r_m\nvalues = 5, 10\n";

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.modes, vec![Mode::Mimo]);
        assert_eq!(c.topology, Topology::Monostatic);
        assert_eq!(c.frequency_hz, 2.37e9);
        assert_eq!(c.tx_spacing_m, 0.0628);
        assert_eq!(c.power, PowerSpec::Normalized { snr_db: 0.0, time_bandwidth: 1.0 });
        assert_eq!(c.methods, vec![Method::ClosedForm]);
        assert!(c.monte_carlo.is_none());
    }

    #[test]
    fn errors_name_line_and_field() {
        let e = ExperimentConfig::parse("[scenario]\nnum_tx = abc\n[sweep]\naxis = M\nvalues = 3\n").unwrap_err();
        assert!(e.to_string().contains("line 2") && e.to_string().contains("scenario.num_tx"), "{e}");
        let e = ExperimentConfig::parse("[scenario]\nbogus = 1\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = ExperimentConfig::parse("[scenario]\nnum_tx = 5\n").unwrap_err();
        assert!(e.to_string().contains("sweep.axis"), "{e}");
        let e = ExperimentConfig::parse("num_tx = 5\n").unwrap_err();
        assert!(e.to_string().contains("outside any section"), "{e}");
    }

    #[test]
    fn overrides_apply_last() {
        let mut raw = RawConfig::parse(MINIMAL).unwrap();
        raw.set("scenario.num_tx=129").unwrap();
        raw.set("power.snr_db = 10").unwrap();
        let c = raw.build().unwrap();
        assert_eq!(c.num_tx, 129);
        assert_eq!(c.power, PowerSpec::Normalized { snr_db: 10.0, time_bandwidth: 1.0 });
        assert!(raw.set("nope.x=1").is_err());
        assert!(raw.set("scenario.num_tx").is_err());
    }

    #[test]
    fn invalid_combinations_rejected() {
        let with = |extra: &str| ExperimentConfig::parse(&format!("{MINIMAL}{extra}"));
        assert!(with("[methods]\nlist = closed_form, taylor\n").is_ok());
        assert!(with("[scenario]\nnum_rx = 4\n").is_err());
        assert!(with("[sweep]\nstep = 1\n").is_err());
        assert!(with("[power]\nnoise_psd = 2\nsnr_db = 3\n").is_err());
        assert!(with("[methods]\nlist = closed_form, closed_form\n").is_err());
        let bi = "[scenario]\ntopology = bistatic\ntheta_deg = 10\n[sweep]\naxis = M\nvalues = 9\n";
        assert!(ExperimentConfig::parse(&format!("{bi}[methods]\nlist = taylor\n")).is_err());
        assert!(ExperimentConfig::parse(&format!("{bi}[methods]\nlist = asymptotic\n")).is_err());
        assert!(ExperimentConfig::parse(&format!("{bi}[scenario]\nmode = phased\n[methods]\nlist = far_field_upw\n")).is_err());
    }

    #[test]
    fn sweep_points() {
        let lin = SweepValues::Linear { start: -75.0, stop: 75.0, step: 5.0 };
        let p = lin.points();
        assert_eq!(p.len(), 31);
        assert_eq!((p[0], p[15], p[30]), (-75.0, 0.0, 75.0));
        let geo = SweepValues::Geometric { start: 8.0, stop: 1024.0, factor: 2.0 };
        assert_eq!(geo.points(), vec![8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0]);
        assert!(SweepValues::Linear { start: 2.0, stop: 1.0, step: 1.0 }.points().is_empty());
    }

    #[test]
    fn text_round_trip() {
        let text = "[meta]\nnote = hello\n[scenario]\ntopology = bistatic\nmode = phased, mimo\nnum_rx = 8\ntheta_deg = 0.1\n\
                    [power]\ntotal_power_w = 3\nkappa_im = 0.5\n[sweep]\naxis = M\nstart = 9\nstop = 1025\nfactor = 2\n\
                    [monte_carlo]\ntrials = 7\ngrid = window\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }
}
