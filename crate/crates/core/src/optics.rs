//! Units, uniform spectral grids and amplitude profiles.
//!
//! Every bandwidth accepted by the public API is an *intensity* FWHM. Profiles
//! store field amplitudes; their intensity is `|a|^2`.

use num_complex::Complex64;

use crate::error::{Error, Module, Result};

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Ratio between an intensity FWHM and the standard deviation of a Gaussian
/// intensity profile, `2 sqrt(2 ln 2)`.
pub fn fwhm_to_sigma_ratio() -> f64 {
    2.0 * (2.0 * std::f64::consts::LN_2).sqrt()
}

/// Angular frequency in rad/s. Always finite and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AngularFrequency(f64);

impl AngularFrequency {
    pub fn new(rad_per_s: f64) -> Result<Self> {
        if rad_per_s.is_finite() && rad_per_s > 0.0 {
            Ok(Self(rad_per_s))
        } else {
            Err(Error::domain(
                Module::Optics,
                format!("angular frequency must be positive and finite, got {rad_per_s}"),
            ))
        }
    }

    pub fn from_wavelength(lambda: f64) -> Result<Self> {
        wavelength_to_omega(lambda)
    }

    pub fn from_hz(hz: f64) -> Result<Self> {
        Self::new(TWO_PI * hz)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn hz(self) -> f64 {
        self.0 / TWO_PI
    }

    pub fn wavelength(self) -> f64 {
        omega_to_wavelength(self)
    }
}

/// `2 pi c / lambda`.
pub fn wavelength_to_omega(lambda: f64) -> Result<AngularFrequency> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(
            Module::Optics,
            format!("wavelength must be positive and finite, got {lambda} m"),
        ));
    }
    AngularFrequency::new(TWO_PI * SPEED_OF_LIGHT / lambda)
}

pub fn omega_to_wavelength(omega: AngularFrequency) -> f64 {
    TWO_PI * SPEED_OF_LIGHT / omega.0
}

/// Frequency width (Hz) equivalent to a wavelength width at `center`, to first
/// order: `c dlambda / lambda^2`.
pub fn wavelength_width_to_hz(center: f64, width: f64) -> Result<f64> {
    if !(center > 0.0 && width > 0.0 && center.is_finite() && width.is_finite()) {
        return Err(Error::domain(
            Module::Optics,
            format!("wavelength width conversion needs positive values, got center {center} m, width {width} m"),
        ));
    }
    Ok(SPEED_OF_LIGHT * width / (center * center))
}

/// Inverse of [`wavelength_width_to_hz`].
pub fn hz_width_to_wavelength(center: f64, width_hz: f64) -> Result<f64> {
    if !(center > 0.0 && width_hz > 0.0 && center.is_finite() && width_hz.is_finite()) {
        return Err(Error::domain(
            Module::Optics,
            format!("frequency width conversion needs positive values, got center {center} m, width {width_hz} Hz"),
        ));
    }
    Ok(width_hz * center * center / SPEED_OF_LIGHT)
}

/// Uniform angular-frequency grid centred on `center`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralAxis {
    center: AngularFrequency,
    span: f64,
    n_points: usize,
}

impl SpectralAxis {
    pub fn new(center: AngularFrequency, span: f64, n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::domain(
                Module::Optics,
                format!("spectral axis needs at least 3 points, got {n_points}"),
            ));
        }
        if !(span.is_finite() && span > 0.0) {
            return Err(Error::domain(
                Module::Optics,
                format!("spectral axis span must be positive, got {span} rad/s"),
            ));
        }
        if center.value() - 0.5 * span <= 0.0 {
            return Err(Error::domain(
                Module::Optics,
                "spectral axis extends to non-positive frequencies",
            ));
        }
        Ok(Self {
            center,
            span,
            n_points,
        })
    }

    pub fn center(&self) -> AngularFrequency {
        self.center
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing in rad/s.
    pub fn step(&self) -> f64 {
        self.span / (self.n_points - 1) as f64
    }

    pub fn start(&self) -> f64 {
        self.center.value() - 0.5 * self.span
    }

    pub fn end(&self) -> f64 {
        self.center.value() + 0.5 * self.span
    }

    /// Offset of grid point `k` from the axis centre.
    #[inline]
    pub fn offset(&self, k: usize) -> f64 {
        -0.5 * self.span + k as f64 * self.step()
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        self.center.value() + self.offset(k)
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |k| self.point(k))
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.start() && omega <= self.end()
    }
}

/// Complex amplitude sampled on a [`SpectralAxis`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile {
    axis: SpectralAxis,
    amplitude: Vec<Complex64>,
}

impl SpectralProfile {
    pub fn new(axis: SpectralAxis, amplitude: Vec<Complex64>) -> Result<Self> {
        if amplitude.len() != axis.len() {
            return Err(Error::domain(
                Module::Optics,
                format!(
                    "profile has {} samples but its axis has {} points",
                    amplitude.len(),
                    axis.len()
                ),
            ));
        }
        if amplitude
            .iter()
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::domain(
                Module::Optics,
                "profile contains non-finite amplitude",
            ));
        }
        Ok(Self { axis, amplitude })
    }

    pub fn from_fn(axis: SpectralAxis, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let amplitude = axis.points().map(f).collect();
        Self::new(axis, amplitude)
    }

    pub fn axis(&self) -> &SpectralAxis {
        &self.axis
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.amplitude.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `sum |a_k|^2 dw`.
    pub fn power(&self) -> f64 {
        self.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.axis.step()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude.iter().all(|a| a.norm_sqr() == 0.0)
    }

    /// Rescaled copy with unit power.
    pub fn normalize(&self) -> Result<Self> {
        let power = self.power();
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::domain(
                Module::Optics,
                "cannot normalize a zero profile",
            ));
        }
        let scale = power.sqrt().recip();
        Ok(Self {
            axis: self.axis,
            amplitude: self.amplitude.iter().map(|a| a * scale).collect(),
        })
    }

    /// Intensity FWHM in rad/s, linearly interpolated between grid points.
    /// `None` when the half-maximum crossing is not bracketed by the grid.
    pub fn fwhm(&self) -> Option<f64> {
        fwhm_of_samples(&self.axis, &self.intensity())
    }

    /// Intensity-weighted mean frequency.
    pub fn centroid(&self) -> Option<f64> {
        let mut weight = 0.0;
        let mut moment = 0.0;
        for (w, i) in self.axis.points().zip(self.intensity()) {
            weight += i;
            moment += i * w;
        }
        (weight > 0.0).then(|| moment / weight)
    }
}

pub(crate) fn fwhm_of_samples(axis: &SpectralAxis, y: &[f64]) -> Option<f64> {
    let (peak_idx, &peak) = y.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if peak <= 0.0 {
        return None;
    }
    let half = 0.5 * peak;
    let first = y.iter().position(|&v| v >= half)?;
    let last = y.iter().rposition(|&v| v >= half)?;
    if first == 0 || last == y.len() - 1 || first > peak_idx || last < peak_idx {
        return None;
    }
    let cross = |lo: usize, hi: usize| {
        let (ylo, yhi) = (y[lo], y[hi]);
        let t = (half - ylo) / (yhi - ylo);
        axis.point(lo) + t * (axis.point(hi) - axis.point(lo))
    };
    Some(cross(last + 1, last) - cross(first - 1, first))
}

/// Shape of a pump envelope or filter transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileShape {
    Gaussian,
    Rect,
}

impl ProfileShape {
    /// Amplitude at detuning `offset` for a profile whose intensity FWHM (or
    /// full width, for rect) is `width`.
    #[inline]
    pub fn amplitude_at(self, offset: f64, width: f64) -> f64 {
        match self {
            ProfileShape::Gaussian => {
                let sigma = width / fwhm_to_sigma_ratio();
                (-offset * offset / (4.0 * sigma * sigma)).exp()
            }
            ProfileShape::Rect => {
                if offset.abs() <= 0.5 * width {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn profile(
        self,
        axis: SpectralAxis,
        center: AngularFrequency,
        width: f64,
    ) -> Result<SpectralProfile> {
        match self {
            ProfileShape::Gaussian => gaussian_profile(axis, center, width),
            ProfileShape::Rect => rect_profile(axis, center, width),
        }
    }
}

fn check_width(width: f64, what: &str) -> Result<()> {
    if width.is_finite() && width > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            Module::Optics,
            format!("{what} must be positive, got {width} rad/s"),
        ))
    }
}

/// Gaussian amplitude `exp(-(w - w0)^2 / (4 sigma^2))` whose intensity has FWHM
/// `fwhm` (rad/s). Not normalized.
pub fn gaussian_profile(
    axis: SpectralAxis,
    center: AngularFrequency,
    fwhm: f64,
) -> Result<SpectralProfile> {
    check_width(fwhm, "Gaussian FWHM")?;
    let w0 = center.value();
    let profile = SpectralProfile::from_fn(axis, |w| {
        Complex64::new(ProfileShape::Gaussian.amplitude_at(w - w0, fwhm), 0.0)
    })?;
    let sigma = fwhm / fwhm_to_sigma_ratio();
    let total = sigma * (2.0 * std::f64::consts::PI).sqrt();
    let clipped = 1.0 - profile.power() / total;
    if clipped > 1e-6 {
        log::warn!(
            "Gaussian profile clipped by the spectral axis: {:.3e} of its power lies outside",
            clipped
        );
    }
    Ok(profile)
}

/// Unit amplitude on `[center - w/2, center + w/2]`, zero elsewhere. Grid points
/// on the boundary are inside.
pub fn rect_profile(
    axis: SpectralAxis,
    center: AngularFrequency,
    full_width: f64,
) -> Result<SpectralProfile> {
    check_width(full_width, "rect width")?;
    let w0 = center.value();
    let half = 0.5 * full_width + 1e-9 * axis.step();
    SpectralProfile::from_fn(axis, |w| {
        Complex64::new(if (w - w0).abs() <= half { 1.0 } else { 0.0 }, 0.0)
    })
}
