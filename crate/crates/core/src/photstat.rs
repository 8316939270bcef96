//! Photon-number statistics of the interferometer inputs and the `g2(0)` of a
//! seeded difference-frequency process.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Module, Result};
use crate::export::{fmt_f64, CsvWriter};

/// Default photon-number cutoff for coherent arms.
pub const COHERENT_N_MAX: usize = 10;

/// Model assumption under which the heralded-photon probabilities hold.
pub const HSP_ASSUMPTION: &str = "low detection efficiency for the heralding photons";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmLabel {
    Coherent,
    Hsp,
    Custom,
    /// Textbook thermal-pair model; not the heralded-photon law used for the
    /// visibility.
    ThermalDiagnostic,
}

impl ArmLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ArmLabel::Coherent => "coherent",
            ArmLabel::Hsp => "hsp",
            ArmLabel::Custom => "custom",
            ArmLabel::ThermalDiagnostic => "thermal_diagnostic",
        }
    }
}

/// Photon-number distribution `(P_0, P_1, ...)` of one input arm, possibly
/// truncated.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmStatistics {
    probabilities: Vec<f64>,
    label: ArmLabel,
}

impl ArmStatistics {
    pub fn new(probabilities: Vec<f64>, label: ArmLabel) -> Result<Self> {
        if probabilities.len() < 3 {
            return Err(Error::domain(
                Module::PhotStat,
                "arm statistics need at least P0, P1 and P2",
            ));
        }
        if let Some((n, p)) = probabilities
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p >= 0.0))
        {
            return Err(Error::domain(
                Module::PhotStat,
                format!("P{n} = {p} is not a probability"),
            ));
        }
        let total: f64 = probabilities.iter().sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::domain(
                Module::PhotStat,
                format!("probabilities sum to {total} > 1"),
            ));
        }
        Ok(Self {
            probabilities,
            label,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn label(&self) -> ArmLabel {
        self.label
    }

    /// `P_n`, zero beyond the cutoff.
    pub fn p(&self, n: usize) -> f64 {
        self.probabilities.get(n).copied().unwrap_or(0.0)
    }

    /// Largest photon number with non-zero probability.
    pub fn support_max(&self) -> usize {
        self.probabilities
            .iter()
            .rposition(|&p| p > 0.0)
            .unwrap_or(0)
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// Copy keeping only `P_0..=P_n_max`.
    pub fn truncated(&self, n_max: usize) -> Result<Self> {
        let keep = (n_max + 1).min(self.probabilities.len());
        Self::new(self.probabilities[..keep].to_vec(), self.label)
    }
}

/// Poisson law `P_n = exp(-m) m^n / n!` up to `n_max`.
pub fn coherent_stats(mean_photons: f64, n_max: usize) -> Result<ArmStatistics> {
    if !(mean_photons.is_finite() && mean_photons >= 0.0) {
        return Err(Error::domain(
            Module::PhotStat,
            format!("mean photon number must be non-negative, got {mean_photons}"),
        ));
    }
    let n_max = n_max.max(2);
    let mut probabilities = Vec::with_capacity(n_max + 1);
    let mut term = (-mean_photons).exp();
    for n in 0..=n_max {
        if n > 0 {
            term *= mean_photons / n as f64;
        }
        probabilities.push(term);
    }
    ArmStatistics::new(probabilities, ArmLabel::Coherent)
}

/// Heralded single-photon probabilities:
/// `P1 = t + 4 (t - 1) t p`, `P2 = 2 t^2 p`, `P0 = 1 - P1 - P2`, with `p` the
/// pair emission probability and `t` the transmission. Valid for low heralding
/// detection efficiency.
pub fn hsp_stats(pair_probability: f64, transmission: f64) -> Result<ArmStatistics> {
    if !(pair_probability.is_finite() && (0.0..1.0).contains(&pair_probability)) {
        return Err(Error::domain(
            Module::PhotStat,
            format!("pair probability must lie in [0, 1), got {pair_probability}"),
        ));
    }
    if !(transmission.is_finite() && transmission > 0.0 && transmission <= 1.0) {
        return Err(Error::domain(
            Module::PhotStat,
            format!("transmission must lie in (0, 1], got {transmission}"),
        ));
    }
    let t = transmission;
    let p1 = t + 4.0 * (t - 1.0) * t * pair_probability;
    let p2 = 2.0 * t * t * pair_probability;
    let p0 = 1.0 - (p1 + p2);
    for (name, value) in [("P1,HSP", p1), ("P2,HSP", p2), ("P0,HSP", p0)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::domain(
                Module::PhotStat,
                format!(
                    "{name} = {value} outside [0, 1] for pair probability {pair_probability}, transmission {transmission}"
                ),
            ));
        }
    }
    ArmStatistics::new(vec![p0, p1, p2], ArmLabel::Hsp)
}

/// Textbook comparison model: single-mode thermal pairs with mean `mean_pairs`,
/// heralded by a low-efficiency detector (conditional weight proportional to
/// `n`), then binomial loss with transmission `t`.
pub fn thermal_herald_diagnostic(
    mean_pairs: f64,
    transmission: f64,
    n_max: usize,
) -> Result<ArmStatistics> {
    if !(mean_pairs.is_finite() && mean_pairs > 0.0) {
        return Err(Error::domain(
            Module::PhotStat,
            format!("mean pair number must be positive, got {mean_pairs}"),
        ));
    }
    if !(transmission > 0.0 && transmission <= 1.0) {
        return Err(Error::domain(
            Module::PhotStat,
            format!("transmission must lie in (0, 1], got {transmission}"),
        ));
    }
    const PAIR_CUTOFF: usize = 80;
    let ratio = mean_pairs / (1.0 + mean_pairs);
    // n p(n) / mean, p(n) = ratio^n / (1 + mean)
    let herald: Vec<f64> = (0..=PAIR_CUTOFF)
        .map(|n| n as f64 * ratio.powi(n as i32) / ((1.0 + mean_pairs) * mean_pairs))
        .collect();
    let probabilities = (0..=n_max.max(2))
        .map(|m| {
            (m..=PAIR_CUTOFF)
                .map(|n| {
                    herald[n]
                        * binomial(n, m)
                        * transmission.powi(m as i32)
                        * (1.0 - transmission).powi((n - m) as i32)
                })
                .sum()
        })
        .collect();
    ArmStatistics::new(probabilities, ArmLabel::ThermalDiagnostic)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn write_stats_csv<W: Write>(arms: &[&ArmStatistics], out: W) -> io::Result<W> {
    let mut csv = CsvWriter::new(out, &["n", "probability", "arm_label"])?;
    for arm in arms {
        for (n, p) in arm.probabilities().iter().enumerate() {
            csv.row(&[n.to_string(), fmt_f64(*p), arm.label().as_str().to_string()])?;
        }
    }
    csv.finish()
}

/// Seeded DFG: `n_seed` photons per mode in the seed, `schmidt_k` modes, and
/// `n_spontaneous` spontaneous photons per mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DfgSeedModel {
    pub n_seed: f64,
    pub schmidt_k: f64,
    pub n_spontaneous: f64,
}

impl DfgSeedModel {
    pub fn new(n_seed: f64, schmidt_k: f64, n_spontaneous: f64) -> Result<Self> {
        if !(n_seed.is_finite() && n_seed >= 0.0) {
            return Err(Error::domain(
                Module::PhotStat,
                format!("seed photon number must be non-negative, got {n_seed}"),
            ));
        }
        if !(schmidt_k.is_finite() && schmidt_k >= 1.0) {
            return Err(Error::domain(
                Module::PhotStat,
                format!("Schmidt number must be at least 1, got {schmidt_k}"),
            ));
        }
        if !(n_spontaneous.is_finite() && n_spontaneous > 0.0) {
            return Err(Error::domain(
                Module::PhotStat,
                format!("spontaneous photon number must be positive, got {n_spontaneous}"),
            ));
        }
        Ok(Self {
            n_seed,
            schmidt_k,
            n_spontaneous,
        })
    }

    /// Stimulated photons per mode when a single mode is seeded.
    pub fn n_stimulated(&self) -> f64 {
        self.n_seed * self.n_spontaneous
    }

    pub fn with_seed(&self, n_seed: f64) -> Result<Self> {
        Self::new(n_seed, self.schmidt_k, self.n_spontaneous)
    }
}

/// `g2(0) = 1 + 1 / (N_seed + K)`.
pub fn dfg_g2(model: &DfgSeedModel) -> f64 {
    1.0 + 1.0 / (model.n_seed + model.schmidt_k)
}

/// `g2(0) = 1 + N_sp / (K N_sp + N_st)` from spontaneous and stimulated photon
/// numbers directly.
pub fn dfg_g2_from_emission(n_spontaneous: f64, n_stimulated: f64, schmidt_k: f64) -> Result<f64> {
    if !(n_spontaneous > 0.0 && n_stimulated >= 0.0 && schmidt_k >= 1.0) {
        return Err(Error::domain(
            Module::PhotStat,
            format!(
                "need N_sp > 0, N_st >= 0, K >= 1; got {n_spontaneous}, {n_stimulated}, {schmidt_k}"
            ),
        ));
    }
    Ok(1.0 + n_spontaneous / (schmidt_k * n_spontaneous + n_stimulated))
}

/// `(n_seed, g2)` for each seed value, in input order.
pub fn dfg_g2_curve(template: &DfgSeedModel, n_seed_values: &[f64]) -> Result<Vec<(f64, f64)>> {
    n_seed_values
        .iter()
        .map(|&n| Ok((n, dfg_g2(&template.with_seed(n)?))))
        .collect()
}

pub fn write_g2_csv<W: Write>(curve: &[(f64, f64)], out: W) -> io::Result<W> {
    let mut csv = CsvWriter::new(out, &["n_seed", "g2"])?;
    for &(n, g) in curve {
        csv.numeric_row(&[n, g])?;
    }
    csv.finish()
}
