//! Joint spectral amplitude of SPDC pairs.
//!
//! `S(w_s, w_i) = alpha(w_s + w_i) * PMF(w_s, w_i)`: the pump envelope evaluated
//! at the pair's total energy times the phase-matching function. Grids are
//! stored row-major with the signal index as the row.

use std::io::{self, Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Module, Result};
use crate::export::CsvWriter;
use crate::optics::{
    hz_width_to_wavelength, omega_to_wavelength, wavelength_to_omega, wavelength_width_to_hz,
    AngularFrequency, ProfileShape, SpectralAxis, SpectralProfile,
};
use crate::phasematch::{phasematching_function, QpmCrystal};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    Signal,
    Idler,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec {
    /// Centre wavelength, m.
    pub center_wavelength: f64,
    /// Intensity FWHM, Hz.
    pub intensity_fwhm: f64,
    pub shape: ProfileShape,
    /// Informational only; the envelope is set by `intensity_fwhm`.
    pub pulse_duration: f64,
    /// Informational only.
    pub repetition_rate: f64,
}

impl PumpSpec {
    pub fn new(center_wavelength: f64, intensity_fwhm: f64, shape: ProfileShape) -> Result<Self> {
        if !(center_wavelength.is_finite() && center_wavelength > 0.0) {
            return Err(Error::domain(
                Module::Jsa,
                format!("pump wavelength must be positive, got {center_wavelength} m"),
            ));
        }
        if !(intensity_fwhm.is_finite() && intensity_fwhm > 0.0) {
            return Err(Error::domain(
                Module::Jsa,
                format!("pump bandwidth must be positive, got {intensity_fwhm} Hz"),
            ));
        }
        Ok(Self {
            center_wavelength,
            intensity_fwhm,
            shape,
            pulse_duration: 2e-12,
            repetition_rate: 76e6,
        })
    }

    /// 780 nm, 80 GHz Gaussian.
    pub fn paper_default() -> Self {
        Self::new(780e-9, 80e9, ProfileShape::Gaussian).expect("valid default pump")
    }

    pub fn center_omega(&self) -> AngularFrequency {
        wavelength_to_omega(self.center_wavelength).expect("validated pump wavelength")
    }

    /// Intensity FWHM in rad/s.
    pub fn fwhm_omega(&self) -> f64 {
        TWO_PI * self.intensity_fwhm
    }

    #[inline]
    pub fn envelope(&self, omega: f64) -> f64 {
        self.shape
            .amplitude_at(omega - self.center_omega().value(), self.fwhm_omega())
    }
}

/// Centre frequencies of the signal and idler photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDesign {
    pub signal: AngularFrequency,
    pub idler: AngularFrequency,
}

impl PairDesign {
    /// Design pair whose idler sits at `idler_wavelength`; the signal takes the
    /// remaining pump energy.
    pub fn from_idler(pump: &PumpSpec, idler_wavelength: f64) -> Result<Self> {
        let signal_wavelength = dfg_partner_wavelength(pump.center_wavelength, idler_wavelength)?;
        Ok(Self {
            signal: wavelength_to_omega(signal_wavelength)?,
            idler: wavelength_to_omega(idler_wavelength)?,
        })
    }
}

/// Sampled JSA.
#[derive(Debug, Clone, PartialEq)]
pub struct JsaGrid {
    signal_axis: SpectralAxis,
    idler_axis: SpectralAxis,
    amplitude: Vec<Complex64>,
    heralding_efficiency: f64,
}

impl JsaGrid {
    pub fn from_amplitude(
        signal_axis: SpectralAxis,
        idler_axis: SpectralAxis,
        amplitude: Vec<Complex64>,
    ) -> Result<Self> {
        if amplitude.len() != signal_axis.len() * idler_axis.len() {
            return Err(Error::domain(
                Module::Jsa,
                format!(
                    "amplitude has {} entries, expected {} x {}",
                    amplitude.len(),
                    signal_axis.len(),
                    idler_axis.len()
                ),
            ));
        }
        if amplitude
            .iter()
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::domain(
                Module::Jsa,
                "JSA contains non-finite entries",
            ));
        }
        Ok(Self {
            signal_axis,
            idler_axis,
            amplitude,
            heralding_efficiency: 1.0,
        })
    }

    /// Separable grid `f(w_s) g(w_i)`.
    pub fn separable(signal: &SpectralProfile, idler: &SpectralProfile) -> Result<Self> {
        let amplitude = signal
            .amplitude()
            .iter()
            .flat_map(|&f| idler.amplitude().iter().map(move |&g| f * g))
            .collect();
        Self::from_amplitude(*signal.axis(), *idler.axis(), amplitude)
    }

    pub fn signal_axis(&self) -> &SpectralAxis {
        &self.signal_axis
    }

    pub fn idler_axis(&self) -> &SpectralAxis {
        &self.idler_axis
    }

    pub fn axis(&self, arm: Arm) -> &SpectralAxis {
        match arm {
            Arm::Signal => &self.signal_axis,
            Arm::Idler => &self.idler_axis,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.signal_axis.len(), self.idler_axis.len())
    }

    /// Row-major amplitudes, signal index major.
    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.amplitude[j * self.idler_axis.len() + k]
    }

    /// Product of the power transmissions of every filter applied so far.
    pub fn heralding_efficiency(&self) -> f64 {
        self.heralding_efficiency
    }

    /// Grid cell area `dw_s dw_i`.
    pub fn cell_area(&self) -> f64 {
        self.signal_axis.step() * self.idler_axis.step()
    }

    pub fn power(&self) -> f64 {
        self.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.cell_area()
    }

    pub fn normalize(&self) -> Result<Self> {
        let power = self.power();
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::domain(
                Module::Jsa,
                "cannot normalize a JSA with zero power",
            ));
        }
        let scale = power.sqrt().recip();
        Ok(Self {
            amplitude: self.amplitude.iter().map(|a| a * scale).collect(),
            ..self.clone()
        })
    }

    /// Largest boundary intensity relative to the grid maximum.
    pub fn edge_ratio(&self) -> f64 {
        let (ns, ni) = self.shape();
        let max = self
            .amplitude
            .iter()
            .map(|a| a.norm_sqr())
            .fold(0.0, f64::max);
        if max == 0.0 {
            return 0.0;
        }
        let mut edge: f64 = 0.0;
        for k in 0..ni {
            edge = edge
                .max(self.get(0, k).norm_sqr())
                .max(self.get(ns - 1, k).norm_sqr());
        }
        for j in 0..ns {
            edge = edge
                .max(self.get(j, 0).norm_sqr())
                .max(self.get(j, ni - 1).norm_sqr());
        }
        edge / max
    }

    /// CSV with columns `omega_s,omega_i,re,im` (rad/s), signal index major.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<W> {
        let mut csv = CsvWriter::new(out, &["omega_s", "omega_i", "re", "im"])?;
        for (j, ws) in self.signal_axis.points().enumerate() {
            for (k, wi) in self.idler_axis.points().enumerate() {
                let a = self.get(j, k);
                csv.numeric_row(&[ws, wi, a.re, a.im])?;
            }
        }
        csv.finish()
    }

    /// Little-endian binary layout: signal axis header, idler axis header, then
    /// `n_s * n_i` pairs `(re, im)` as f64, row-major with the signal index as
    /// the row. Each axis header is `center (f64, rad/s)`, `span (f64, rad/s)`,
    /// `n_points (u64)`.
    pub fn write_binary<W: Write>(&self, mut out: W) -> io::Result<W> {
        for axis in [&self.signal_axis, &self.idler_axis] {
            out.write_all(&axis.center().value().to_le_bytes())?;
            out.write_all(&axis.span().to_le_bytes())?;
            out.write_all(&(axis.len() as u64).to_le_bytes())?;
        }
        for a in &self.amplitude {
            out.write_all(&a.re.to_le_bytes())?;
            out.write_all(&a.im.to_le_bytes())?;
        }
        out.flush()?;
        Ok(out)
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        fn f64_from<R: Read>(r: &mut R) -> io::Result<f64> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            Ok(f64::from_le_bytes(b))
        }
        let mut axes = Vec::with_capacity(2);
        for _ in 0..2 {
            let center = f64_from(&mut input)?;
            let span = f64_from(&mut input)?;
            let mut b = [0u8; 8];
            input.read_exact(&mut b)?;
            let n = u64::from_le_bytes(b) as usize;
            axes.push(SpectralAxis::new(AngularFrequency::new(center)?, span, n)?);
        }
        let len = axes[0].len() * axes[1].len();
        let mut amplitude = Vec::with_capacity(len);
        for _ in 0..len {
            let re = f64_from(&mut input)?;
            let im = f64_from(&mut input)?;
            amplitude.push(Complex64::new(re, im));
        }
        Self::from_amplitude(axes[0], axes[1], amplitude)
    }
}

/// Samples `alpha(w_s + w_i) PMF(w_s, w_i)` on the grid and normalizes it.
/// Rows are filled in parallel; the result does not depend on the worker count.
pub fn build_jsa(
    pump: &PumpSpec,
    crystal: &QpmCrystal,
    signal_axis: SpectralAxis,
    idler_axis: SpectralAxis,
) -> Result<JsaGrid> {
    let ni = idler_axis.len();
    let mut amplitude = vec![Complex64::new(0.0, 0.0); signal_axis.len() * ni];
    let rows: Vec<Result<()>> = amplitude
        .par_chunks_mut(ni)
        .enumerate()
        .map(|(j, row)| {
            let ws = signal_axis.point(j);
            for (k, cell) in row.iter_mut().enumerate() {
                let wi = idler_axis.point(k);
                let alpha = pump.envelope(ws + wi);
                *cell = if alpha == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    phasematching_function(crystal, ws, wi)? * alpha
                };
            }
            Ok(())
        })
        .collect();
    rows.into_iter().collect::<Result<()>>()?;
    let jsa = JsaGrid::from_amplitude(signal_axis, idler_axis, amplitude)?;
    let edge = jsa.edge_ratio();
    if edge > 1e-4 {
        log::warn!(
            "JSA intensity at the grid boundary is {edge:.2e} of its maximum; widen the axes"
        );
    }
    jsa.normalize()
}

/// Axes centred on the design pair, each spanning `+- span_fwhm` intensity
/// FWHM of the corresponding marginal. The marginal widths are found by
/// rebuilding a coarse grid until they settle.
pub fn auto_axes(
    pump: &PumpSpec,
    crystal: &QpmCrystal,
    design: PairDesign,
    n_points: usize,
    span_fwhm: f64,
) -> Result<(SpectralAxis, SpectralAxis)> {
    const COARSE: usize = 257;
    const MAX_ITER: usize = 40;
    if !(span_fwhm.is_finite() && span_fwhm > 0.0) {
        return Err(Error::domain(
            Module::Jsa,
            format!("axis span must be a positive number of FWHMs, got {span_fwhm}"),
        ));
    }
    let axes = |half_s: f64, half_i: f64, n: usize| -> Result<(SpectralAxis, SpectralAxis)> {
        Ok((
            SpectralAxis::new(design.signal, 2.0 * half_s, n)?,
            SpectralAxis::new(design.idler, 2.0 * half_i, n)?,
        ))
    };
    let mut half_s = span_fwhm * pump.fwhm_omega();
    let mut half_i = half_s;
    for _ in 0..MAX_ITER {
        let (sa, ia) = axes(half_s, half_i, COARSE)?;
        let jsa = quiet_build(pump, crystal, sa, ia)?;
        let fs = marginal(&jsa, Arm::Signal).fwhm();
        let fi = marginal(&jsa, Arm::Idler).fwhm();
        let (Some(fs), Some(fi)) = (fs, fi) else {
            half_s *= 2.0;
            half_i *= 2.0;
            continue;
        };
        let (next_s, next_i) = (span_fwhm * fs, span_fwhm * fi);
        let settled =
            (next_s - half_s).abs() <= 0.01 * half_s && (next_i - half_i).abs() <= 0.01 * half_i;
        half_s = next_s;
        half_i = next_i;
        if settled {
            return axes(half_s, half_i, n_points);
        }
    }
    Err(Error::domain(
        Module::Jsa,
        "JSA marginal widths did not settle; supply explicit axes",
    ))
}

fn quiet_build(
    pump: &PumpSpec,
    crystal: &QpmCrystal,
    sa: SpectralAxis,
    ia: SpectralAxis,
) -> Result<JsaGrid> {
    let ni = ia.len();
    let mut amplitude = Vec::with_capacity(sa.len() * ni);
    for ws in sa.points() {
        for wi in ia.points() {
            let alpha = pump.envelope(ws + wi);
            amplitude.push(if alpha == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                phasematching_function(crystal, ws, wi)? * alpha
            });
        }
    }
    JsaGrid::from_amplitude(sa, ia, amplitude)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FilterWidth {
    /// Intensity FWHM (Gaussian) or full width (rect) in Hz.
    Hz(f64),
    /// Same, as a wavelength interval in metres, converted at the filter centre.
    Wavelength(f64),
}

impl FilterWidth {
    fn value(self) -> f64 {
        match self {
            FilterWidth::Hz(v) | FilterWidth::Wavelength(v) => v,
        }
    }

    pub fn hz(self, center_wavelength: f64) -> Result<f64> {
        match self {
            FilterWidth::Hz(v) => Ok(v),
            FilterWidth::Wavelength(w) => wavelength_width_to_hz(center_wavelength, w),
        }
    }

    pub fn wavelength(self, center_wavelength: f64) -> Result<f64> {
        match self {
            FilterWidth::Hz(v) => hz_width_to_wavelength(center_wavelength, v),
            FilterWidth::Wavelength(w) => Ok(w),
        }
    }
}

/// Band-pass filter acting on the field amplitude of one arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub arm: Arm,
    pub shape: ProfileShape,
    /// Centre wavelength in metres; `None` uses the arm's axis centre.
    pub center: Option<f64>,
    pub width: FilterWidth,
}

impl FilterSpec {
    pub fn new(
        arm: Arm,
        shape: ProfileShape,
        center: Option<f64>,
        width: FilterWidth,
    ) -> Result<Self> {
        let w = width.value();
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::domain(
                Module::Jsa,
                format!("filter width must be positive, got {w}"),
            ));
        }
        if let Some(c) = center {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::domain(
                    Module::Jsa,
                    format!("filter centre must be a positive wavelength, got {c} m"),
                ));
            }
        }
        Ok(Self {
            arm,
            shape,
            center,
            width,
        })
    }

    pub fn with_width(&self, width: FilterWidth) -> Result<Self> {
        Self::new(self.arm, self.shape, self.center, width)
    }

    pub fn center_wavelength(&self, axis: &SpectralAxis) -> f64 {
        self.center
            .unwrap_or_else(|| omega_to_wavelength(axis.center()))
    }

    /// Transmission amplitude sampled on `axis`.
    pub fn profile(&self, axis: SpectralAxis) -> Result<SpectralProfile> {
        let lambda = self.center_wavelength(&axis);
        let center = wavelength_to_omega(lambda)?;
        let width = TWO_PI * self.width.hz(lambda)?;
        self.shape.profile(axis, center, width)
    }
}

/// Multiplies the filtered arm by the filter amplitude and renormalizes. The
/// transmitted power fraction accumulates into the heralding efficiency.
pub fn apply_filter(jsa: &JsaGrid, filter: &FilterSpec) -> Result<JsaGrid> {
    let transmission = filter.profile(*jsa.axis(filter.arm))?;
    let t = transmission.amplitude();
    let ni = jsa.idler_axis.len();
    let amplitude: Vec<Complex64> = jsa
        .amplitude
        .iter()
        .enumerate()
        .map(|(idx, a)| {
            let f = match filter.arm {
                Arm::Signal => t[idx / ni],
                Arm::Idler => t[idx % ni],
            };
            a * f
        })
        .collect();
    let before = jsa.power();
    let filtered = JsaGrid {
        amplitude,
        ..jsa.clone()
    };
    let after = filtered.power();
    if after == 0.0 {
        let step_hz = jsa.axis(filter.arm).step() / TWO_PI;
        return Err(Error::domain(
            Module::Jsa,
            format!(
                "filter removes all amplitude (grid step on the {:?} axis is {:.4e} Hz); widen the filter or refine the grid",
                filter.arm, step_hz
            ),
        ));
    }
    let mut out = filtered.normalize()?;
    out.heralding_efficiency = jsa.heralding_efficiency * after / before;
    Ok(out)
}

/// Intensity marginal `I(w) = sum_other |S|^2 dw_other`, returned as a profile
/// with amplitude `sqrt(I)` so that its intensity is the marginal itself.
pub fn marginal(jsa: &JsaGrid, arm: Arm) -> SpectralProfile {
    let (ns, ni) = jsa.shape();
    let intensity: Vec<f64> = match arm {
        Arm::Signal => (0..ns)
            .map(|j| (0..ni).map(|k| jsa.get(j, k).norm_sqr()).sum::<f64>() * jsa.idler_axis.step())
            .collect(),
        Arm::Idler => (0..ni)
            .map(|k| {
                (0..ns).map(|j| jsa.get(j, k).norm_sqr()).sum::<f64>() * jsa.signal_axis.step()
            })
            .collect(),
    };
    let amplitude = intensity
        .iter()
        .map(|i| Complex64::new(i.sqrt(), 0.0))
        .collect();
    SpectralProfile::new(*jsa.axis(arm), amplitude).expect("marginal of a valid grid")
}

/// Difference-frequency partner: `1/lambda_i = 1/lambda_p - 1/lambda_seed`.
pub fn dfg_partner_wavelength(pump_lambda: f64, seed_lambda: f64) -> Result<f64> {
    if !(pump_lambda > 0.0
        && seed_lambda > 0.0
        && pump_lambda.is_finite()
        && seed_lambda.is_finite())
    {
        return Err(Error::domain(
            Module::Jsa,
            format!("wavelengths must be positive, got pump {pump_lambda} m, seed {seed_lambda} m"),
        ));
    }
    let inv = 1.0 / pump_lambda - 1.0 / seed_lambda;
    if inv <= 0.0 {
        return Err(Error::domain(
            Module::Jsa,
            format!(
                "seed at {seed_lambda} m is not below the pump frequency ({pump_lambda} m); no difference frequency"
            ),
        ));
    }
    Ok(1.0 / inv)
}

/// Spectral amplitude of the DFG coherent state: the pump envelope translated
/// to `w_p - w_seed` (monochromatic seed), normalized.
pub fn coherent_state_profile(
    pump: &PumpSpec,
    seed_wavelength: f64,
    axis: SpectralAxis,
) -> Result<SpectralProfile> {
    let center = wavelength_to_omega(dfg_partner_wavelength(
        pump.center_wavelength,
        seed_wavelength,
    )?)?;
    pump.shape
        .profile(axis, center, pump.fwhm_omega())?
        .normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::gaussian_profile;
    use crate::phasematch::{preset, DispersionModel, PmfShape, PAPER_LIKE};
    use approx::assert_relative_eq;

    fn small_axes(n: usize) -> (SpectralAxis, SpectralAxis) {
        let pump = PumpSpec::paper_default();
        let d = PairDesign::from_idler(&pump, 1563.5e-9).unwrap();
        (
            SpectralAxis::new(d.signal, TWO_PI * 1.5e12, n).unwrap(),
            SpectralAxis::new(d.idler, TWO_PI * 1.5e12, n).unwrap(),
        )
    }

    fn paper_like_crystal(pump: &PumpSpec) -> QpmCrystal {
        let p = preset(PAPER_LIKE).unwrap();
        let d = PairDesign::from_idler(pump, 1563.5e-9).unwrap();
        QpmCrystal::phase_matched(p.dispersion, d.signal, d.idler, p.length, PmfShape::Sinc)
            .unwrap()
    }

    /// Dispersionless, vanishingly short crystal: PMF is 1 everywhere.
    fn flat_crystal() -> QpmCrystal {
        QpmCrystal::new(
            DispersionModel::constant_index("flat", 2.25, 2.20, 2.15),
            10e-6,
            1e-30,
            PmfShape::Sinc,
        )
        .unwrap()
    }

    #[test]
    fn dfg_partner_of_design_wavelengths() {
        let li = dfg_partner_wavelength(780e-9, 1563.5e-9).unwrap();
        // 1 / (1/780 - 1/1563.5) nm = 1556.5156 nm
        assert_relative_eq!(li, 1.556515634971283e-6, max_relative = 1e-12);
        assert!((li - 1556.5e-9).abs() < 0.05e-9);
    }

    #[test]
    fn dfg_degenerate_point_and_involution() {
        assert_relative_eq!(
            dfg_partner_wavelength(780e-9, 1560e-9).unwrap(),
            1560e-9,
            max_relative = 1e-12
        );
        let back =
            dfg_partner_wavelength(780e-9, dfg_partner_wavelength(780e-9, 1563.5e-9).unwrap())
                .unwrap();
        assert_relative_eq!(back, 1563.5e-9, max_relative = 1e-12);
    }

    #[test]
    fn dfg_rejects_seed_above_pump_frequency() {
        assert!(dfg_partner_wavelength(780e-9, 700e-9).is_err());
        assert!(dfg_partner_wavelength(780e-9, 780e-9).is_err());
    }

    #[test]
    fn flat_pmf_gives_antidiagonal_ridge() {
        let pump = PumpSpec::paper_default();
        let (sa, ia) = small_axes(65);
        let jsa = build_jsa(&pump, &flat_crystal(), sa, ia).unwrap();
        // equal steps: cells (j, k) and (j+1, k-1) share w_s + w_i
        let n = 65;
        for j in 0..n - 1 {
            for k in 1..n {
                let a = jsa.get(j, k).norm_sqr();
                let b = jsa.get(j + 1, k - 1).norm_sqr();
                assert!((a - b).abs() <= 1e-9 * a.max(1e-300) + 1e-300, "({j},{k})");
            }
        }
    }

    #[test]
    fn built_jsa_is_normalized_and_finite() {
        let pump = PumpSpec::paper_default();
        let (sa, ia) = small_axes(129);
        let jsa = build_jsa(&pump, &paper_like_crystal(&pump), sa, ia).unwrap();
        assert_relative_eq!(jsa.power(), 1.0, max_relative = 1e-9);
        assert!(jsa
            .amplitude()
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite()));
    }

    #[test]
    fn build_is_independent_of_worker_count() {
        let pump = PumpSpec::paper_default();
        let crystal = paper_like_crystal(&pump);
        let (sa, ia) = small_axes(97);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = one.install(|| build_jsa(&pump, &crystal, sa, ia)).unwrap();
        let b = many.install(|| build_jsa(&pump, &crystal, sa, ia)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn marginals_integrate_to_one() {
        let pump = PumpSpec::paper_default();
        let (sa, ia) = small_axes(129);
        let jsa = build_jsa(&pump, &paper_like_crystal(&pump), sa, ia).unwrap();
        for arm in [Arm::Signal, Arm::Idler] {
            assert_relative_eq!(marginal(&jsa, arm).power(), 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn separable_marginal_is_factor_intensity() {
        let (sa, ia) = small_axes(101);
        let f = gaussian_profile(sa, sa.center(), 3e11)
            .unwrap()
            .normalize()
            .unwrap();
        let g = gaussian_profile(ia, ia.center(), 5e11)
            .unwrap()
            .normalize()
            .unwrap();
        let jsa = JsaGrid::separable(&f, &g).unwrap();
        let m = marginal(&jsa, Arm::Signal);
        for (x, y) in m.intensity().iter().zip(f.intensity()) {
            assert!((x - y).abs() < 1e-12 * f.intensity()[50]);
        }
    }

    #[test]
    fn all_pass_filter_is_identity() {
        let pump = PumpSpec::paper_default();
        let (sa, ia) = small_axes(65);
        let jsa = build_jsa(&pump, &paper_like_crystal(&pump), sa, ia).unwrap();
        let f =
            FilterSpec::new(Arm::Idler, ProfileShape::Rect, None, FilterWidth::Hz(1e15)).unwrap();
        let out = apply_filter(&jsa, &f).unwrap();
        for (a, b) in jsa.amplitude().iter().zip(out.amplitude()) {
            assert!((a - b).norm() <= 1e-14 * a.norm().max(1e-300));
        }
        assert_relative_eq!(out.heralding_efficiency(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn filter_records_efficiency_and_renormalizes() {
        let pump = PumpSpec::paper_default();
        let (sa, ia) = small_axes(129);
        let jsa = build_jsa(&pump, &paper_like_crystal(&pump), sa, ia).unwrap();
        let f = FilterSpec::new(
            Arm::Idler,
            ProfileShape::Rect,
            None,
            FilterWidth::Wavelength(0.2e-9),
        )
        .unwrap();
        let out = apply_filter(&jsa, &f).unwrap();
        assert_relative_eq!(out.power(), 1.0, max_relative = 1e-9);
        assert!(out.heralding_efficiency() > 0.0 && out.heralding_efficiency() < 0.5);
        let g = FilterSpec::new(
            Arm::Signal,
            ProfileShape::Gaussian,
            None,
            FilterWidth::Hz(200e9),
        )
        .unwrap();
        let twice = apply_filter(&out, &g).unwrap();
        assert!(twice.heralding_efficiency() < out.heralding_efficiency());
    }

    #[test]
    fn disjoint_filter_is_an_error() {
        let pump = PumpSpec::paper_default();
        let (sa, ia) = small_axes(65);
        let jsa = build_jsa(&pump, &paper_like_crystal(&pump), sa, ia).unwrap();
        let f = FilterSpec::new(
            Arm::Idler,
            ProfileShape::Rect,
            Some(1500e-9),
            FilterWidth::Hz(10e9),
        )
        .unwrap();
        let err = apply_filter(&jsa, &f).unwrap_err();
        assert!(err.to_string().contains("removes all amplitude"));
    }

    #[test]
    fn filter_spec_validation() {
        assert!(
            FilterSpec::new(Arm::Idler, ProfileShape::Rect, None, FilterWidth::Hz(-1.0)).is_err()
        );
        assert!(FilterSpec::new(
            Arm::Idler,
            ProfileShape::Rect,
            Some(0.0),
            FilterWidth::Hz(1.0)
        )
        .is_err());
    }

    #[test]
    fn degenerate_axes_rejected() {
        let pump = PumpSpec::paper_default();
        let d = PairDesign::from_idler(&pump, 1563.5e-9).unwrap();
        assert!(SpectralAxis::new(d.signal, 1e12, 2).is_err());
    }

    #[test]
    fn binary_round_trip() {
        let pump = PumpSpec::paper_default();
        let (sa, ia) = small_axes(33);
        let jsa = build_jsa(&pump, &paper_like_crystal(&pump), sa, ia).unwrap();
        let bytes = jsa.write_binary(Vec::new()).unwrap();
        assert_eq!(bytes.len(), 2 * 24 + 33 * 33 * 16);
        let back = JsaGrid::read_binary(bytes.as_slice()).unwrap();
        assert_eq!(back.amplitude(), jsa.amplitude());
        assert_eq!(back.signal_axis(), jsa.signal_axis());
    }

    #[test]
    fn csv_layout() {
        let pump = PumpSpec::paper_default();
        let (sa, ia) = small_axes(5);
        let jsa = build_jsa(&pump, &paper_like_crystal(&pump), sa, ia).unwrap();
        let text = String::from_utf8(jsa.write_csv(Vec::new()).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "omega_s,omega_i,re,im");
        assert_eq!(lines.len(), 26);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn coherent_state_inherits_pump_bandwidth() {
        let pump = PumpSpec::paper_default();
        let center = wavelength_to_omega(1556.5e-9).unwrap();
        let axis = SpectralAxis::new(center, TWO_PI * 1.2e12, 1201).unwrap();
        let p = coherent_state_profile(&pump, 1563.5e-9, axis).unwrap();
        assert_relative_eq!(p.fwhm().unwrap(), pump.fwhm_omega(), max_relative = 1e-3);
        let expected =
            wavelength_to_omega(dfg_partner_wavelength(780e-9, 1563.5e-9).unwrap()).unwrap();
        assert_relative_eq!(p.centroid().unwrap(), expected.value(), max_relative = 1e-9);
        assert_relative_eq!(p.power(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn auto_axes_cover_the_marginals() {
        let pump = PumpSpec::paper_default();
        let d = PairDesign::from_idler(&pump, 1563.5e-9).unwrap();
        let (sa, ia) = auto_axes(&pump, &paper_like_crystal(&pump), d, 129, 5.0).unwrap();
        let jsa = build_jsa(&pump, &paper_like_crystal(&pump), sa, ia).unwrap();
        let fs = marginal(&jsa, Arm::Signal).fwhm().unwrap();
        let fi = marginal(&jsa, Arm::Idler).fwhm().unwrap();
        assert!((sa.span() / fs - 10.0).abs() < 0.5, "{}", sa.span() / fs);
        assert!((ia.span() / fi - 10.0).abs() < 0.5, "{}", ia.span() / fi);
        // anti-correlated JSA broadens the idler marginal beyond the pump
        assert!(fi > pump.fwhm_omega());
    }

    #[test]
    fn auto_axes_fail_for_flat_pmf() {
        let pump = PumpSpec::paper_default();
        let d = PairDesign::from_idler(&pump, 1563.5e-9).unwrap();
        assert!(auto_axes(&pump, &flat_crystal(), d, 65, 5.0).is_err());
    }
}
