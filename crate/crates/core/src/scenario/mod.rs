//! Scenario files and the batch pipelines behind the `hspsim` CLI.
//!
//! A run evaluates every requested output in memory, writes the files, and
//! writes `manifest.json` last with a SHA-256 for each file. Outputs depend
//! only on the scenario and the grid override, never on the thread count.

mod config;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::hom::{dip_profile, HomScenario};
use crate::jsa::{
    apply_filter, auto_axes, build_jsa, coherent_state_profile, dfg_partner_wavelength, FilterSpec,
    FilterWidth, JsaGrid, PairDesign, PumpSpec,
};
use crate::optics::{wavelength_to_omega, ProfileShape, SpectralAxis};
use crate::phasematch::{preset, BranchDispersion, DispersionModel, PolingOrder, QpmCrystal};
use crate::photstat::{
    coherent_stats, dfg_g2_curve, hsp_stats, thermal_herald_diagnostic, write_g2_csv,
    write_stats_csv, ArmStatistics, DfgSeedModel, COHERENT_N_MAX, HSP_ASSUMPTION,
};
use crate::schmidt::{purity_vs_filter_sweep, write_sweep_csv};
use crate::{Error, Result};

pub use config::{
    check, parse, CenterConfig, CrystalConfig, Diagnostic, FilterConfig, GridConfig, HomConfig,
    OutputKind, PairConfig, PolingConfig, PumpConfig, Scenario, StatisticsConfig, SweepConfig,
    SweepVariable, TaylorBranchConfig, TaylorConfig,
};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Spontaneous photons per mode when `statistics.n_spontaneous` is omitted.
/// `g2` of the seeded DFG does not depend on it.
const DEFAULT_N_SPONTANEOUS: f64 = 1.0;

/// Frequency samples used for HOM mode overlaps.
const HOM_SPECTRAL_POINTS: usize = 2049;
/// Half-span of the HOM spectral axis in units of the photon bandwidth.
const HOM_SPECTRAL_HALF_SPAN: f64 = 12.0;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Replaces `grid.points`.
    pub grid_points: Option<usize>,
    /// Free-form text echoed into the manifest.
    pub seed_metadata: Option<String>,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub scenario_name: String,
    pub outputs: Vec<ManifestEntry>,
    pub parameters_echo: ParametersEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParametersEcho {
    pub scenario: Scenario,
    pub grid_points_override: Option<usize>,
    pub seed_metadata: Option<String>,
    pub version: &'static str,
}

/// A file produced by a run, held in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub path: String,
    pub bytes: Vec<u8>,
}

/// Parses and checks scenario text; all findings are returned together.
pub fn validate_str(text: &str) -> Vec<Diagnostic> {
    match parse(text) {
        Ok(s) => check(&s),
        Err(d) => vec![d],
    }
}

pub fn validate_file(path: &Path) -> Result<Vec<Diagnostic>> {
    Ok(validate_str(&fs::read_to_string(path)?))
}

/// Parses and checks, turning findings into an [`Error::Scenario`].
pub fn load_str(text: &str) -> Result<Scenario> {
    let scenario = parse(text).map_err(|d| Error::Scenario(d.to_string()))?;
    let diags = check(&scenario);
    if diags.is_empty() {
        Ok(scenario)
    } else {
        Err(Error::Scenario(
            diags
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; "),
        ))
    }
}

pub fn load_file(path: &Path) -> Result<Scenario> {
    load_str(&fs::read_to_string(path)?)
}

pub fn run_file(path: &Path, options: &RunOptions) -> Result<Manifest> {
    run(&load_file(path)?, options)
}

/// Evaluates the scenario and writes its outputs plus the manifest.
pub fn run(scenario: &Scenario, options: &RunOptions) -> Result<Manifest> {
    let artifacts = match options.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            pool.install(|| evaluate(scenario, options.grid_points))?
        }
        None => evaluate(scenario, options.grid_points)?,
    };
    fs::create_dir_all(&options.out_dir)?;
    let mut entries = Vec::with_capacity(artifacts.len());
    for a in &artifacts {
        fs::write(options.out_dir.join(&a.path), &a.bytes)?;
        entries.push(ManifestEntry {
            path: a.path.clone(),
            sha256: sha256_hex(&a.bytes),
        });
    }
    let manifest = Manifest {
        scenario_name: scenario.name.clone(),
        outputs: entries,
        parameters_echo: ParametersEcho {
            scenario: scenario.clone(),
            grid_points_override: options.grid_points,
            seed_metadata: options.seed_metadata.clone(),
            version: env!("CARGO_PKG_VERSION"),
        },
    };
    let mut json = serde_json::to_vec_pretty(&manifest).map_err(std::io::Error::other)?;
    json.push(b'\n');
    fs::write(options.out_dir.join(MANIFEST_FILE), json)?;
    Ok(manifest)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Computes every output in declared order without touching the filesystem.
pub fn evaluate(scenario: &Scenario, grid_points: Option<usize>) -> Result<Vec<Artifact>> {
    let diags = check(scenario);
    if !diags.is_empty() {
        return Err(Error::Scenario(
            diags
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    if let Some(n) = grid_points {
        if n < 3 {
            return Err(Error::Scenario(format!(
                "grid points override must be at least 3, got {n}"
            )));
        }
    }
    let mut ctx = Context {
        scenario,
        grid_points,
        jsa: None,
    };
    let mut out = Vec::new();
    for &kind in &scenario.outputs {
        match kind {
            OutputKind::PuritySweep => out.push(ctx.purity_sweep()?),
            OutputKind::DfgG2Curve => out.push(ctx.dfg_g2()?),
            OutputKind::HomDip => out.extend(ctx.hom_dip()?),
            OutputKind::JsaDump => out.extend(ctx.jsa_dump()?),
            OutputKind::ArmStatistics => out.push(ctx.arm_statistics()?),
        }
    }
    Ok(out)
}

struct Context<'a> {
    scenario: &'a Scenario,
    grid_points: Option<usize>,
    jsa: Option<JsaGrid>,
}

fn write_to_vec(f: impl FnOnce(Vec<u8>) -> std::io::Result<Vec<u8>>) -> Result<Vec<u8>> {
    Ok(f(Vec::new())?)
}

// `check` has already guaranteed that required sections exist.
fn required<'a, T>(v: &'a Option<T>, key: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::Scenario(format!("{key}: missing")))
}

pub fn pump_spec(p: &PumpConfig) -> Result<PumpSpec> {
    let mut spec = PumpSpec::new(
        p.center_wavelength_nm * 1e-9,
        p.intensity_fwhm_ghz * 1e9,
        p.shape,
    )?;
    spec.pulse_duration = p.pulse_duration_ps * 1e-12;
    spec.repetition_rate = p.repetition_rate_mhz * 1e6;
    Ok(spec)
}

pub fn build_crystal(cfg: &CrystalConfig, design: PairDesign) -> Result<QpmCrystal> {
    let (dispersion, preset_length) = match (&cfg.preset, &cfg.taylor) {
        (Some(name), _) => {
            let p = preset(name)?;
            (p.dispersion, Some(p.length))
        }
        (None, Some(t)) => (taylor_model(t)?, None),
        (None, None) => return Err(Error::Scenario("crystal: preset or taylor required".into())),
    };
    let length = cfg
        .length_mm
        .map(|l| l * 1e-3)
        .or(preset_length)
        .ok_or_else(|| Error::Scenario("crystal.length_mm: missing".into()))?;
    match &cfg.poling_period_um {
        PolingConfig::Period(um) => {
            let mismatch =
                dispersion.material_mismatch(design.signal.value(), design.idler.value())?;
            let order = if mismatch < 0.0 {
                PolingOrder::Negative
            } else {
                PolingOrder::Positive
            };
            QpmCrystal::with_order(dispersion, um * 1e-6, order, length, cfg.pmf)
        }
        PolingConfig::Keyword(_) => {
            QpmCrystal::phase_matched(dispersion, design.signal, design.idler, length, cfg.pmf)
        }
    }
}

fn taylor_model(t: &TaylorConfig) -> Result<DispersionModel> {
    let branch = |b: &TaylorBranchConfig| -> Result<BranchDispersion> {
        let w = wavelength_to_omega(b.ref_wavelength_nm * 1e-9)?;
        let window = (
            (1.0 - t.window_fraction) * w.value(),
            (1.0 + t.window_fraction) * w.value(),
        );
        // fs^2/mm -> s^2/m
        Ok(BranchDispersion::taylor(
            w,
            b.phase_index,
            b.group_index,
            b.gvd_fs2_per_mm * 1e-27,
            window,
        ))
    };
    Ok(DispersionModel {
        name: "taylor".into(),
        pump: branch(&t.pump)?,
        signal: branch(&t.signal)?,
        idler: branch(&t.idler)?,
    })
}

pub fn filter_spec(f: &FilterConfig) -> Result<FilterSpec> {
    let center = match &f.center_nm {
        Some(CenterConfig::Wavelength(nm)) => Some(nm * 1e-9),
        _ => None,
    };
    let width = match (f.width_nm, f.width_ghz) {
        (Some(nm), _) => FilterWidth::Wavelength(nm * 1e-9),
        (None, Some(ghz)) => FilterWidth::Hz(ghz * 1e9),
        (None, None) => return Err(Error::Scenario("filter width missing".into())),
    };
    FilterSpec::new(f.arm, f.shape, center, width)
}

fn format_value(v: f64) -> String {
    format!("{v}")
}

impl Context<'_> {
    fn stats(&self) -> StatisticsConfig {
        self.scenario.statistics.clone().unwrap_or_default()
    }

    fn jsa(&mut self) -> Result<&JsaGrid> {
        if self.jsa.is_none() {
            let s = self.scenario;
            let pump = pump_spec(required(&s.pump, "pump")?)?;
            let pair = required(&s.pair, "pair")?;
            let design = PairDesign::from_idler(&pump, pair.idler_wavelength_nm * 1e-9)?;
            let crystal = build_crystal(required(&s.crystal, "crystal")?, design)?;
            let grid = s.grid.clone().unwrap_or_default();
            let n = self.grid_points.unwrap_or(grid.points);
            let (sa, ia) = auto_axes(&pump, &crystal, design, n, grid.span_fwhm)?;
            log::info!("building {n}x{n} JSA");
            self.jsa = Some(build_jsa(&pump, &crystal, sa, ia)?);
        }
        Ok(self.jsa.as_ref().expect("built above"))
    }

    fn purity_sweep(&mut self) -> Result<Artifact> {
        let sweep = required(&self.scenario.sweep, "sweep")?.clone();
        let template = filter_spec(&self.scenario.filters[0])?;
        let widths: Vec<FilterWidth> = sweep
            .values
            .iter()
            .map(|&v| match sweep.variable {
                SweepVariable::FilterWidthGhz => FilterWidth::Hz(v * 1e9),
                _ => FilterWidth::Wavelength(v * 1e-9),
            })
            .collect();
        let rows = purity_vs_filter_sweep(self.jsa()?, &widths, &template)?;
        Ok(Artifact {
            path: "purity_sweep.csv".into(),
            bytes: write_to_vec(|w| write_sweep_csv(&rows, w))?,
        })
    }

    fn jsa_dump(&mut self) -> Result<Vec<Artifact>> {
        let filters: Vec<FilterSpec> = self
            .scenario
            .filters
            .iter()
            .map(filter_spec)
            .collect::<Result<_>>()?;
        let mut jsa = self.jsa()?.clone();
        for f in &filters {
            jsa = apply_filter(&jsa, f)?;
        }
        Ok(vec![
            Artifact {
                path: "jsa.csv".into(),
                bytes: write_to_vec(|w| jsa.write_csv(w))?,
            },
            Artifact {
                path: "jsa.bin".into(),
                bytes: write_to_vec(|w| jsa.write_binary(w))?,
            },
        ])
    }

    fn dfg_g2(&self) -> Result<Artifact> {
        let st = self.stats();
        let sweep = required(&self.scenario.sweep, "sweep")?;
        let template = DfgSeedModel::new(
            st.n_seed.unwrap_or(0.0),
            *required(&st.schmidt_k, "statistics.schmidt_k")?,
            st.n_spontaneous.unwrap_or(DEFAULT_N_SPONTANEOUS),
        )?;
        let curve = dfg_g2_curve(&template, &sweep.values)?;
        Ok(Artifact {
            path: "dfg_g2.csv".into(),
            bytes: write_to_vec(|w| write_g2_csv(&curve, w))?,
        })
    }

    fn arms(st: &StatisticsConfig) -> Result<(ArmStatistics, ArmStatistics)> {
        let coherent = coherent_stats(
            *required(
                &st.coherent_mean_photons,
                "statistics.coherent_mean_photons",
            )?,
            st.coherent_n_max.unwrap_or(COHERENT_N_MAX),
        )?;
        let hsp = hsp_stats(
            *required(&st.pair_probability, "statistics.pair_probability")?,
            *required(&st.transmission, "statistics.transmission")?,
        )?;
        Ok((coherent, hsp))
    }

    fn arm_statistics(&self) -> Result<Artifact> {
        let st = self.stats();
        let (coherent, hsp) = Self::arms(&st)?;
        let mut arms = vec![coherent, hsp];
        if st.thermal_diagnostic {
            arms.push(thermal_herald_diagnostic(
                *required(&st.pair_probability, "statistics.pair_probability")?,
                *required(&st.transmission, "statistics.transmission")?,
                st.coherent_n_max.unwrap_or(COHERENT_N_MAX),
            )?);
        }
        let refs: Vec<&ArmStatistics> = arms.iter().collect();
        Ok(Artifact {
            path: "arm_statistics.csv".into(),
            bytes: write_to_vec(|w| write_stats_csv(&refs, w))?,
        })
    }

    fn hom_dip(&self) -> Result<Vec<Artifact>> {
        let s = self.scenario;
        let hom = required(&s.hom, "hom")?;
        let base = self.stats();
        let cases: Vec<(Option<f64>, StatisticsConfig)> = match &s.sweep {
            Some(sw) if sw.variable.is_hom_statistic() => sw
                .values
                .iter()
                .map(|&v| {
                    let mut st = base.clone();
                    match sw.variable {
                        SweepVariable::PairProbability => st.pair_probability = Some(v),
                        SweepVariable::CoherentMeanPhotons => st.coherent_mean_photons = Some(v),
                        SweepVariable::Transmission => st.transmission = Some(v),
                        SweepVariable::Indistinguishability => st.indistinguishability = Some(v),
                        _ => unreachable!("filtered by is_hom_statistic"),
                    }
                    (Some(v), st)
                })
                .collect(),
            _ => vec![(None, base)],
        };

        let mut pump = pump_spec(required(&s.pump, "pump")?)?;
        if let Some(bw) = hom.bandwidth_ghz {
            pump.intensity_fwhm = bw * 1e9;
        }
        let seed = hom.seed_wavelength_nm * 1e-9;
        let center = wavelength_to_omega(dfg_partner_wavelength(pump.center_wavelength, seed)?)?;
        let axis = SpectralAxis::new(
            center,
            2.0 * HOM_SPECTRAL_HALF_SPAN * pump.fwhm_omega(),
            HOM_SPECTRAL_POINTS,
        )?;
        let spectral_coherent = coherent_state_profile(&pump, seed, axis)?;
        let spectral_hsp = ProfileShape::Gaussian.profile(axis, center, pump.fwhm_omega())?;
        let delays: Vec<f64> = (0..hom.delay_points)
            .map(|k| {
                let f = k as f64 / (hom.delay_points - 1) as f64;
                (hom.delay_min_ps + f * (hom.delay_max_ps - hom.delay_min_ps)) * 1e-12
            })
            .collect();

        let mut artifacts = Vec::new();
        let mut summary = Vec::new();
        for (value, st) in cases {
            let (coherent, hsp) = Self::arms(&st)?;
            let r = *required(&st.indistinguishability, "statistics.indistinguishability")?;
            let scenario = HomScenario::new(
                coherent,
                hsp,
                r,
                spectral_coherent.clone(),
                spectral_hsp.clone(),
            )?;
            let result = dip_profile(&scenario, &delays)?;
            let oracle = scenario.fock_oracle()?;
            let path = match (value, &s.sweep) {
                (Some(v), Some(sw)) => {
                    format!("hom_dip_{}_{}.csv", sw.variable.key(), format_value(v))
                }
                _ => "hom_dip.csv".to_string(),
            };
            summary.push(HomSummary {
                file: path.clone(),
                sweep_value: value,
                coherent_mean_photons: scenario.arm_a.mean_photon_number(),
                pair_probability: st.pair_probability.unwrap_or_default(),
                transmission: st.transmission.unwrap_or_default(),
                indistinguishability: r,
                v_max_eq7: result.v_max,
                suppressed_fraction: result.suppressed_fraction,
                oracle_visibility: oracle.visibility,
                min_coincidence: result.min_coincidence(),
            });
            artifacts.push(Artifact {
                path,
                bytes: write_to_vec(|w| crate::hom::write_dip_csv(&result, w))?,
            });
        }
        let doc = HomSummaryDoc {
            model_assumptions: vec![
                format!("heralded single-photon arm: {HSP_ASSUMPTION}"),
                "coherent arm: Poissonian photon-number distribution".into(),
                "dip: 1 - R * |overlap(delay)| * suppressed fraction at R = 1".into(),
                "Fock-space oracle: both arms truncated to at most two photons".into(),
            ],
            bandwidth_ghz: pump.intensity_fwhm * 1e-9,
            seed_wavelength_nm: hom.seed_wavelength_nm,
            cases: summary,
        };
        let mut json = serde_json::to_vec_pretty(&doc).map_err(std::io::Error::other)?;
        json.push(b'\n');
        artifacts.push(Artifact {
            path: "hom_summary.json".into(),
            bytes: json,
        });
        Ok(artifacts)
    }
}

#[derive(Serialize)]
struct HomSummaryDoc {
    model_assumptions: Vec<String>,
    bandwidth_ghz: f64,
    seed_wavelength_nm: f64,
    cases: Vec<HomSummary>,
}

#[derive(Serialize)]
struct HomSummary {
    file: String,
    sweep_value: Option<f64>,
    coherent_mean_photons: f64,
    pair_probability: f64,
    transmission: f64,
    indistinguishability: f64,
    v_max_eq7: f64,
    suppressed_fraction: f64,
    oracle_visibility: f64,
    min_coincidence: f64,
}
