//! Scenario file schema and strict validation.
//!
//! Scenario files are TOML. Every table rejects unknown keys.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::jsa::Arm;
use crate::optics::ProfileShape;
use crate::phasematch::{preset_names, PmfShape};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub outputs: Vec<OutputKind>,
    pub pump: Option<PumpConfig>,
    pub crystal: Option<CrystalConfig>,
    pub pair: Option<PairConfig>,
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub filters: Vec<FilterConfig>,
    pub statistics: Option<StatisticsConfig>,
    pub hom: Option<HomConfig>,
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    PuritySweep,
    DfgG2Curve,
    HomDip,
    JsaDump,
    ArmStatistics,
}

impl fmt::Display for OutputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputKind::PuritySweep => "purity_sweep",
            OutputKind::DfgG2Curve => "dfg_g2_curve",
            OutputKind::HomDip => "hom_dip",
            OutputKind::JsaDump => "jsa_dump",
            OutputKind::ArmStatistics => "arm_statistics",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    pub center_wavelength_nm: f64,
    #[serde(default = "default_pump_fwhm")]
    pub intensity_fwhm_ghz: f64,
    #[serde(default = "default_shape")]
    pub shape: ProfileShape,
    /// Recorded only.
    #[serde(default = "default_pulse_ps")]
    pub pulse_duration_ps: f64,
    /// Recorded only.
    #[serde(default = "default_rep_mhz")]
    pub repetition_rate_mhz: f64,
}

fn default_pump_fwhm() -> f64 {
    80.0
}
fn default_shape() -> ProfileShape {
    ProfileShape::Gaussian
}
fn default_pulse_ps() -> f64 {
    2.0
}
fn default_rep_mhz() -> f64 {
    76.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolingConfig {
    Period(f64),
    Keyword(String),
}

impl Default for PolingConfig {
    fn default() -> Self {
        PolingConfig::Keyword("solve".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalConfig {
    pub preset: Option<String>,
    pub taylor: Option<TaylorConfig>,
    /// Overrides the preset length; required with `taylor`.
    pub length_mm: Option<f64>,
    /// Grating period in micrometres, or `"solve"`.
    #[serde(default)]
    pub poling_period_um: PolingConfig,
    #[serde(default)]
    pub pmf: PmfShape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaylorConfig {
    pub pump: TaylorBranchConfig,
    pub signal: TaylorBranchConfig,
    pub idler: TaylorBranchConfig,
    /// Half-width of each branch's validity window as a fraction of its
    /// reference frequency.
    #[serde(default = "default_window_fraction")]
    pub window_fraction: f64,
}

fn default_window_fraction() -> f64 {
    0.15
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaylorBranchConfig {
    pub ref_wavelength_nm: f64,
    pub phase_index: f64,
    pub group_index: f64,
    #[serde(default)]
    pub gvd_fs2_per_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub idler_wavelength_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_points")]
    pub points: usize,
    /// Half-span of each axis in units of its marginal FWHM.
    #[serde(default = "default_span")]
    pub span_fwhm: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            points: default_points(),
            span_fwhm: default_span(),
        }
    }
}

fn default_points() -> usize {
    512
}
fn default_span() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CenterConfig {
    Wavelength(f64),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub arm: Arm,
    #[serde(default = "default_filter_shape")]
    pub shape: ProfileShape,
    /// Centre wavelength in nm, or `"auto"` for the arm's centre.
    pub center_nm: Option<CenterConfig>,
    pub width_nm: Option<f64>,
    pub width_ghz: Option<f64>,
}

fn default_filter_shape() -> ProfileShape {
    ProfileShape::Rect
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatisticsConfig {
    pub coherent_mean_photons: Option<f64>,
    pub coherent_n_max: Option<usize>,
    pub pair_probability: Option<f64>,
    pub transmission: Option<f64>,
    pub indistinguishability: Option<f64>,
    pub n_seed: Option<f64>,
    pub schmidt_k: Option<f64>,
    pub n_spontaneous: Option<f64>,
    /// Also export the thermal-pair comparison model.
    #[serde(default)]
    pub thermal_diagnostic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomConfig {
    pub seed_wavelength_nm: f64,
    /// Intensity FWHM of both interfering photons; defaults to the pump's.
    pub bandwidth_ghz: Option<f64>,
    pub delay_min_ps: f64,
    pub delay_max_ps: f64,
    pub delay_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    FilterWidthNm,
    FilterWidthGhz,
    NSeed,
    PairProbability,
    CoherentMeanPhotons,
    Transmission,
    Indistinguishability,
}

impl SweepVariable {
    pub fn key(self) -> &'static str {
        match self {
            SweepVariable::FilterWidthNm => "filter_width_nm",
            SweepVariable::FilterWidthGhz => "filter_width_ghz",
            SweepVariable::NSeed => "n_seed",
            SweepVariable::PairProbability => "pair_probability",
            SweepVariable::CoherentMeanPhotons => "coherent_mean_photons",
            SweepVariable::Transmission => "transmission",
            SweepVariable::Indistinguishability => "indistinguishability",
        }
    }

    pub fn is_filter_width(self) -> bool {
        matches!(
            self,
            SweepVariable::FilterWidthNm | SweepVariable::FilterWidthGhz
        )
    }

    pub fn is_hom_statistic(self) -> bool {
        matches!(
            self,
            SweepVariable::PairProbability
                | SweepVariable::CoherentMeanPhotons
                | SweepVariable::Transmission
                | SweepVariable::Indistinguishability
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

/// One validation finding, tied to a configuration key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub key: String,
    pub message: String,
}

impl Diagnostic {
    fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.key, self.message)
        }
    }
}

/// Parses scenario text. Syntax errors, type errors and unknown keys come back
/// as a single diagnostic carrying the TOML location.
pub fn parse(text: &str) -> Result<Scenario, Diagnostic> {
    toml::from_str(text).map_err(|e| {
        let location = e
            .span()
            .map(|span| {
                let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
                format!("line {line}: ")
            })
            .unwrap_or_default();
        Diagnostic::new("", format!("{location}{}", e.message()))
    })
}

struct Checker {
    out: Vec<Diagnostic>,
}

impl Checker {
    fn push(&mut self, key: &str, message: impl Into<String>) {
        self.out.push(Diagnostic::new(key, message));
    }

    fn positive(&mut self, key: &str, v: f64) {
        if !(v.is_finite() && v > 0.0) {
            self.push(key, format!("must be positive, got {v}"));
        }
    }

    fn non_negative(&mut self, key: &str, v: f64) {
        if !(v.is_finite() && v >= 0.0) {
            self.push(key, format!("must be non-negative, got {v}"));
        }
    }

    fn within(&mut self, key: &str, v: f64, lo: f64, hi: f64, range: &str) {
        if !(v.is_finite() && v >= lo && v <= hi) {
            self.push(key, format!("must lie in {range}, got {v}"));
        }
    }

    fn require<T>(&mut self, value: &Option<T>, key: &str, needed_by: OutputKind) {
        if value.is_none() {
            self.push(key, format!("required by output '{needed_by}'"));
        }
    }
}

/// Full semantic validation. An empty list means the scenario is runnable.
pub fn check(s: &Scenario) -> Vec<Diagnostic> {
    let mut c = Checker { out: Vec::new() };

    if s.name.trim().is_empty() {
        c.push("name", "must not be empty");
    } else if !s
        .name
        .chars()
        .all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-' || ch == '.')
    {
        c.push(
            "name",
            "may only contain ASCII letters, digits, '_', '-' and '.'",
        );
    }
    if s.outputs.is_empty() {
        c.push("outputs", "at least one output is required");
    }
    for (i, o) in s.outputs.iter().enumerate() {
        if s.outputs[..i].contains(o) {
            c.push("outputs", format!("'{o}' listed twice"));
        }
    }

    if let Some(p) = &s.pump {
        c.positive("pump.center_wavelength_nm", p.center_wavelength_nm);
        c.positive("pump.intensity_fwhm_ghz", p.intensity_fwhm_ghz);
        c.positive("pump.pulse_duration_ps", p.pulse_duration_ps);
        c.positive("pump.repetition_rate_mhz", p.repetition_rate_mhz);
    }

    if let Some(cr) = &s.crystal {
        match (&cr.preset, &cr.taylor) {
            (Some(_), Some(_)) => c.push("crystal", "give either 'preset' or 'taylor', not both"),
            (None, None) => c.push("crystal", "one of 'preset' or 'taylor' is required"),
            (Some(name), None) => {
                if !preset_names().contains(&name.as_str()) {
                    c.push(
                        "crystal.preset",
                        format!(
                            "unknown preset '{name}', available presets: {}",
                            preset_names().join(", ")
                        ),
                    );
                }
            }
            (None, Some(t)) => {
                if cr.length_mm.is_none() {
                    c.push("crystal.length_mm", "required with an inline taylor model");
                }
                for (branch, b) in [
                    ("pump", &t.pump),
                    ("signal", &t.signal),
                    ("idler", &t.idler),
                ] {
                    c.positive(
                        &format!("crystal.taylor.{branch}.ref_wavelength_nm"),
                        b.ref_wavelength_nm,
                    );
                    c.positive(
                        &format!("crystal.taylor.{branch}.phase_index"),
                        b.phase_index,
                    );
                    c.positive(
                        &format!("crystal.taylor.{branch}.group_index"),
                        b.group_index,
                    );
                    if !b.gvd_fs2_per_mm.is_finite() {
                        c.push(
                            &format!("crystal.taylor.{branch}.gvd_fs2_per_mm"),
                            "must be finite",
                        );
                    }
                }
                c.within(
                    "crystal.taylor.window_fraction",
                    t.window_fraction,
                    1e-6,
                    0.99,
                    "(0, 1)",
                );
            }
        }
        if let Some(l) = cr.length_mm {
            c.positive("crystal.length_mm", l);
        }
        match &cr.poling_period_um {
            PolingConfig::Period(p) => c.positive("crystal.poling_period_um", *p),
            PolingConfig::Keyword(k) if k == "solve" => {}
            PolingConfig::Keyword(k) => c.push(
                "crystal.poling_period_um",
                format!("expected a period in um or \"solve\", got \"{k}\""),
            ),
        }
    }

    if let Some(p) = &s.pair {
        c.positive("pair.idler_wavelength_nm", p.idler_wavelength_nm);
        if let Some(pump) = &s.pump {
            if p.idler_wavelength_nm <= pump.center_wavelength_nm {
                c.push(
                    "pair.idler_wavelength_nm",
                    "must be longer than the pump wavelength",
                );
            }
        }
    }

    if let Some(g) = &s.grid {
        if g.points < 3 {
            c.push(
                "grid.points",
                format!("must be at least 3, got {}", g.points),
            );
        }
        c.positive("grid.span_fwhm", g.span_fwhm);
    }

    for (i, f) in s.filters.iter().enumerate() {
        let key = |k: &str| format!("filters[{i}].{k}");
        match (f.width_nm, f.width_ghz) {
            (Some(w), None) => c.positive(&key("width_nm"), w),
            (None, Some(w)) => c.positive(&key("width_ghz"), w),
            _ => c.push(
                &key("width_nm"),
                "exactly one of width_nm or width_ghz is required",
            ),
        }
        match &f.center_nm {
            None => {}
            Some(CenterConfig::Wavelength(w)) => c.positive(&key("center_nm"), *w),
            Some(CenterConfig::Keyword(k)) if k == "auto" => {}
            Some(CenterConfig::Keyword(k)) => c.push(
                &key("center_nm"),
                format!("expected a wavelength in nm or \"auto\", got \"{k}\""),
            ),
        }
    }

    if let Some(st) = &s.statistics {
        if let Some(v) = st.coherent_mean_photons {
            c.non_negative("statistics.coherent_mean_photons", v);
        }
        if let Some(n) = st.coherent_n_max {
            if n < 2 {
                c.push(
                    "statistics.coherent_n_max",
                    format!("must be at least 2, got {n}"),
                );
            }
        }
        if let Some(v) = st.pair_probability {
            if !(v.is_finite() && (0.0..1.0).contains(&v)) {
                c.push(
                    "statistics.pair_probability",
                    format!("must lie in [0, 1), got {v}"),
                );
            }
        }
        if let Some(v) = st.transmission {
            if !(v.is_finite() && v > 0.0 && v <= 1.0) {
                c.push(
                    "statistics.transmission",
                    format!("must lie in (0, 1], got {v}"),
                );
            }
        }
        if let Some(v) = st.indistinguishability {
            c.within("statistics.indistinguishability", v, 0.0, 1.0, "[0, 1]");
        }
        if let Some(v) = st.n_seed {
            c.non_negative("statistics.n_seed", v);
        }
        if let Some(v) = st.schmidt_k {
            if !(v.is_finite() && v >= 1.0) {
                c.push(
                    "statistics.schmidt_k",
                    format!("must be at least 1, got {v}"),
                );
            }
        }
        if let Some(v) = st.n_spontaneous {
            c.positive("statistics.n_spontaneous", v);
        }
    }

    if let Some(h) = &s.hom {
        c.positive("hom.seed_wavelength_nm", h.seed_wavelength_nm);
        if let Some(b) = h.bandwidth_ghz {
            c.positive("hom.bandwidth_ghz", b);
        }
        if !(h.delay_min_ps.is_finite()
            && h.delay_max_ps.is_finite()
            && h.delay_min_ps < h.delay_max_ps)
        {
            c.push(
                "hom.delay_max_ps",
                "delay range must be finite with delay_min_ps < delay_max_ps",
            );
        }
        if h.delay_points < 2 {
            c.push(
                "hom.delay_points",
                format!("must be at least 2, got {}", h.delay_points),
            );
        }
        if let Some(p) = &s.pump {
            if h.seed_wavelength_nm <= p.center_wavelength_nm {
                c.push(
                    "hom.seed_wavelength_nm",
                    "must be longer than the pump wavelength",
                );
            }
        }
    }

    let stats = s.statistics.clone().unwrap_or_default();
    if let Some(sw) = &s.sweep {
        if sw.values.is_empty() {
            c.push("sweep.values", "must not be empty");
        }
        if sw.values.iter().any(|v| !v.is_finite()) {
            c.push("sweep.values", "must be finite numbers");
        }
        let declared = match sw.variable {
            SweepVariable::FilterWidthNm | SweepVariable::FilterWidthGhz => s.filters.len() == 1,
            SweepVariable::NSeed => stats.n_seed.is_some(),
            SweepVariable::PairProbability => stats.pair_probability.is_some(),
            SweepVariable::CoherentMeanPhotons => stats.coherent_mean_photons.is_some(),
            SweepVariable::Transmission => stats.transmission.is_some(),
            SweepVariable::Indistinguishability => stats.indistinguishability.is_some(),
        };
        if !declared {
            let what = if sw.variable.is_filter_width() {
                "exactly one [[filters]] entry".to_string()
            } else {
                format!("statistics.{} to be declared", sw.variable.key())
            };
            c.push(
                "sweep.variable",
                format!("'{}' requires {what}", sw.variable.key()),
            );
        }
        if sw.variable.is_filter_width() {
            if sw.values.iter().any(|v| *v <= 0.0) {
                c.push("sweep.values", "filter widths must be positive");
            }
            if sw.values.windows(2).any(|w| w[1] < w[0]) {
                c.push("sweep.values", "filter widths must be ascending");
            }
        }
        if sw.variable == SweepVariable::NSeed && sw.values.iter().any(|v| *v < 0.0) {
            c.push("sweep.values", "seed photon numbers must be non-negative");
        }
        let used = s.outputs.iter().any(|o| match o {
            OutputKind::PuritySweep => sw.variable.is_filter_width(),
            OutputKind::DfgG2Curve => sw.variable == SweepVariable::NSeed,
            OutputKind::HomDip => sw.variable.is_hom_statistic(),
            _ => false,
        });
        if !used {
            c.push(
                "sweep.variable",
                format!(
                    "'{}' is not consumed by any listed output",
                    sw.variable.key()
                ),
            );
        }
    }

    for &o in &s.outputs {
        match o {
            OutputKind::PuritySweep => {
                c.require(&s.pump, "pump", o);
                c.require(&s.crystal, "crystal", o);
                c.require(&s.pair, "pair", o);
                match &s.sweep {
                    Some(sw) if sw.variable.is_filter_width() => {}
                    _ => c.push(
                        "sweep.variable",
                        "purity_sweep needs a filter_width_nm or filter_width_ghz sweep",
                    ),
                }
            }
            OutputKind::JsaDump => {
                c.require(&s.pump, "pump", o);
                c.require(&s.crystal, "crystal", o);
                c.require(&s.pair, "pair", o);
            }
            OutputKind::DfgG2Curve => {
                c.require(&stats.schmidt_k, "statistics.schmidt_k", o);
                match &s.sweep {
                    Some(sw) if sw.variable == SweepVariable::NSeed => {}
                    _ => c.push("sweep.variable", "dfg_g2_curve needs an n_seed sweep"),
                }
            }
            OutputKind::HomDip => {
                c.require(&s.pump, "pump", o);
                c.require(&s.hom, "hom", o);
                c.require(
                    &stats.coherent_mean_photons,
                    "statistics.coherent_mean_photons",
                    o,
                );
                c.require(&stats.pair_probability, "statistics.pair_probability", o);
                c.require(&stats.transmission, "statistics.transmission", o);
                c.require(
                    &stats.indistinguishability,
                    "statistics.indistinguishability",
                    o,
                );
            }
            OutputKind::ArmStatistics => {
                c.require(
                    &stats.coherent_mean_photons,
                    "statistics.coherent_mean_photons",
                    o,
                );
                c.require(&stats.pair_probability, "statistics.pair_probability", o);
                c.require(&stats.transmission, "statistics.transmission", o);
            }
        }
    }
    c.out
}
