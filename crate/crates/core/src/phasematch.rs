//! Dispersion models and quasi-phase matching.
//!
//! The wavevector mismatch of a periodically poled crystal is
//! `k_s(w_s) + k_i(w_i) - k_p(w_s + w_i) - 2 pi / period`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Module, Result};
use crate::optics::{wavelength_to_omega, AngularFrequency, SPEED_OF_LIGHT};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Width parameter of the Gaussian stand-in for `sinc`: `exp(-0.193 x^2)` has
/// the same amplitude FWHM as `sinc(x)`.
pub const GAUSSIAN_PMF_GAMMA: f64 = 0.193;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Pump,
    Signal,
    Idler,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Pump => "pump",
            Branch::Signal => "signal",
            Branch::Idler => "idler",
        })
    }
}

/// Wavevector law of one polarization branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DispersionLaw {
    /// `k = n w / c`.
    ConstantIndex { index: f64 },
    /// `k = k0 + k1 (w - w_ref) + k2 (w - w_ref)^2 / 2`.
    Taylor {
        omega_ref: f64,
        k0: f64,
        k1: f64,
        k2: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchDispersion {
    pub law: DispersionLaw,
    /// Validity window `(w_min, w_max)` in rad/s.
    pub window: (f64, f64),
}

impl BranchDispersion {
    pub fn constant_index(index: f64, window: (f64, f64)) -> Self {
        Self {
            law: DispersionLaw::ConstantIndex { index },
            window,
        }
    }

    /// Taylor branch from a phase index, group index and GVD (s^2/m) at `omega_ref`.
    pub fn taylor(
        omega_ref: AngularFrequency,
        phase_index: f64,
        group_index: f64,
        gvd: f64,
        window: (f64, f64),
    ) -> Self {
        let w = omega_ref.value();
        Self {
            law: DispersionLaw::Taylor {
                omega_ref: w,
                k0: phase_index * w / SPEED_OF_LIGHT,
                k1: group_index / SPEED_OF_LIGHT,
                k2: gvd,
            },
            window,
        }
    }

    fn eval(&self, branch: Branch, omega: f64) -> Result<f64> {
        let (lo, hi) = self.window;
        if !(omega >= lo && omega <= hi) {
            return Err(Error::domain(
                Module::PhaseMatch,
                format!(
                    "{branch} branch evaluated at {omega:.6e} rad/s, outside its validity window [{lo:.6e}, {hi:.6e}]"
                ),
            ));
        }
        let k = match self.law {
            DispersionLaw::ConstantIndex { index } => index * omega / SPEED_OF_LIGHT,
            DispersionLaw::Taylor {
                omega_ref,
                k0,
                k1,
                k2,
            } => {
                let d = omega - omega_ref;
                k0 + k1 * d + 0.5 * k2 * d * d
            }
        };
        if k <= 0.0 {
            return Err(Error::domain(
                Module::PhaseMatch,
                format!("{branch} branch gives non-positive wavevector {k} at {omega:.6e} rad/s"),
            ));
        }
        Ok(k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionModel {
    pub name: String,
    pub pump: BranchDispersion,
    pub signal: BranchDispersion,
    pub idler: BranchDispersion,
}

impl DispersionModel {
    /// Constant-index model valid between 300 nm and 5 um.
    pub fn constant_index(
        name: impl Into<String>,
        n_pump: f64,
        n_signal: f64,
        n_idler: f64,
    ) -> Self {
        let window = (
            TWO_PI * SPEED_OF_LIGHT / 5e-6,
            TWO_PI * SPEED_OF_LIGHT / 300e-9,
        );
        Self {
            name: name.into(),
            pump: BranchDispersion::constant_index(n_pump, window),
            signal: BranchDispersion::constant_index(n_signal, window),
            idler: BranchDispersion::constant_index(n_idler, window),
        }
    }

    pub fn branch(&self, branch: Branch) -> &BranchDispersion {
        match branch {
            Branch::Pump => &self.pump,
            Branch::Signal => &self.signal,
            Branch::Idler => &self.idler,
        }
    }

    pub fn k(&self, branch: Branch, omega: f64) -> Result<f64> {
        self.branch(branch).eval(branch, omega)
    }

    /// `k_s(w_s) + k_i(w_i) - k_p(w_s + w_i)`, without the grating term.
    pub fn material_mismatch(&self, omega_s: f64, omega_i: f64) -> Result<f64> {
        Ok(
            self.k(Branch::Signal, omega_s)? + self.k(Branch::Idler, omega_i)?
                - self.k(Branch::Pump, omega_s + omega_i)?,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PmfShape {
    #[default]
    Sinc,
    Gaussian,
}

/// Sign of the material mismatch compensated by the grating. The period itself
/// is always reported positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolingOrder {
    Positive,
    Negative,
}

impl PolingOrder {
    fn sign(self) -> f64 {
        match self {
            PolingOrder::Positive => 1.0,
            PolingOrder::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolingSolution {
    /// Poling period in metres, always positive.
    pub period: f64,
    pub order: PolingOrder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpmCrystal {
    pub dispersion: DispersionModel,
    /// Grating period in metres.
    pub poling_period: f64,
    pub order: PolingOrder,
    /// Crystal length in metres.
    pub length: f64,
    pub pmf: PmfShape,
}

impl QpmCrystal {
    pub fn new(
        dispersion: DispersionModel,
        poling_period: f64,
        length: f64,
        pmf: PmfShape,
    ) -> Result<Self> {
        Self::with_order(
            dispersion,
            poling_period,
            PolingOrder::Positive,
            length,
            pmf,
        )
    }

    pub fn with_order(
        dispersion: DispersionModel,
        poling_period: f64,
        order: PolingOrder,
        length: f64,
        pmf: PmfShape,
    ) -> Result<Self> {
        if !(poling_period.is_finite() && poling_period > 0.0) {
            return Err(Error::domain(
                Module::PhaseMatch,
                format!("poling period must be positive, got {poling_period} m"),
            ));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::domain(
                Module::PhaseMatch,
                format!("crystal length must be positive, got {length} m"),
            ));
        }
        Ok(Self {
            dispersion,
            poling_period,
            order,
            length,
            pmf,
        })
    }

    /// Crystal whose grating phase-matches the design pair exactly.
    pub fn phase_matched(
        dispersion: DispersionModel,
        omega_s0: AngularFrequency,
        omega_i0: AngularFrequency,
        length: f64,
        pmf: PmfShape,
    ) -> Result<Self> {
        let sol = solve_poling_period(&dispersion, omega_s0, omega_i0)?;
        Self::with_order(dispersion, sol.period, sol.order, length, pmf)
    }

    fn grating_k(&self) -> f64 {
        self.order.sign() * TWO_PI / self.poling_period
    }
}

/// Signed wavevector mismatch in rad/m.
pub fn delta_k(crystal: &QpmCrystal, omega_s: f64, omega_i: f64) -> Result<f64> {
    Ok(crystal.dispersion.material_mismatch(omega_s, omega_i)? - crystal.grating_k())
}

/// Grating period cancelling the material mismatch at the design frequencies.
pub fn solve_poling_period(
    dispersion: &DispersionModel,
    omega_s0: AngularFrequency,
    omega_i0: AngularFrequency,
) -> Result<PolingSolution> {
    let mismatch = dispersion.material_mismatch(omega_s0.value(), omega_i0.value())?;
    if mismatch == 0.0 {
        return Err(Error::domain(
            Module::PhaseMatch,
            "already phase-matched, no finite poling period",
        ));
    }
    let order = if mismatch > 0.0 {
        PolingOrder::Positive
    } else {
        PolingOrder::Negative
    };
    Ok(PolingSolution {
        period: TWO_PI / mismatch.abs(),
        order,
    })
}

#[inline]
pub(crate) fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Phase-matching amplitude `sinc(dk L / 2)` (or its Gaussian stand-in).
pub fn phasematching_function(
    crystal: &QpmCrystal,
    omega_s: f64,
    omega_i: f64,
) -> Result<Complex64> {
    let x = 0.5 * delta_k(crystal, omega_s, omega_i)? * crystal.length;
    let value = match crystal.pmf {
        PmfShape::Sinc => sinc(x),
        PmfShape::Gaussian => (-GAUSSIAN_PMF_GAMMA * x * x).exp(),
    };
    Ok(Complex64::new(value, 0.0))
}

/// A named dispersion model plus the crystal length it is meant to be used with.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalPreset {
    pub name: &'static str,
    pub description: &'static str,
    pub dispersion: DispersionModel,
    pub length: f64,
}

pub const CONSTANT_INDEX_TOY: &str = "constant-index-toy";
pub const PAPER_LIKE: &str = "paper-like";

pub fn preset_names() -> &'static [&'static str] {
    &[CONSTANT_INDEX_TOY, PAPER_LIKE]
}

/// Idler group-delay mismatch per unit length in the paper-like preset, s/m.
/// Chosen so an 80 GHz Gaussian pump gives about five Schmidt modes.
pub const PAPER_LIKE_IDLER_GVM: f64 = 2.44e-10;

pub fn preset(name: &str) -> Result<CrystalPreset> {
    match name {
        CONSTANT_INDEX_TOY => Ok(CrystalPreset {
            name: CONSTANT_INDEX_TOY,
            description: "dispersionless toy: n_p = 2.25, n_s = 2.20, n_i = 2.15, L = 10 mm",
            dispersion: DispersionModel::constant_index(CONSTANT_INDEX_TOY, 2.25, 2.20, 2.15),
            length: 10e-3,
        }),
        PAPER_LIKE => Ok(paper_like()),
        other => Err(Error::domain(
            Module::PhaseMatch,
            format!(
                "unknown crystal preset '{other}', available presets: {}",
                preset_names().join(", ")
            ),
        )),
    }
}

fn paper_like() -> CrystalPreset {
    let omega = |lambda: f64| wavelength_to_omega(lambda).expect("preset wavelength");
    let wp = omega(780e-9);
    let wi = omega(1563.5e-9);
    let ws = AngularFrequency::new(wp.value() - wi.value()).expect("preset signal");
    let window = |w: AngularFrequency| (0.85 * w.value(), 1.15 * w.value());
    let ng_pump = 2.28;
    let ng_idler = ng_pump + PAPER_LIKE_IDLER_GVM * SPEED_OF_LIGHT;
    CrystalPreset {
        name: PAPER_LIKE,
        description: "type-II PPLN-like Taylor model near 780 -> 1556.5 + 1563.5 nm; signal group-velocity matched to the pump, idler mismatched by 2.44e-10 s/m, L = 10 mm (K ~ 5 at 80 GHz pump)",
        dispersion: DispersionModel {
            name: PAPER_LIKE.to_string(),
            pump: BranchDispersion::taylor(wp, 2.18, ng_pump, 0.0, window(wp)),
            signal: BranchDispersion::taylor(ws, 2.14, ng_pump, 0.0, window(ws)),
            idler: BranchDispersion::taylor(wi, 2.21, ng_idler, 0.0, window(wi)),
        },
        length: 10e-3,
    }
}
