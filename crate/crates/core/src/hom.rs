//! Hong-Ou-Mandel interference between two input arms on a balanced splitter.
//!
//! The multiphoton visibility bound weighs the interfering `(1, 1)` events
//! against the `(0, 2)` and `(2, 0)` events that always give coincidences:
//!
//! ```text
//! V = [(1 - R) P1a P1b + P0a P2b + P2a P0b] / [P1a P1b + P0a P2b + P2a P0b]
//! ```
//!
//! `V` is 1 at `R = 0`, so the dip depth is reported separately as the
//! suppressed fraction `1 - V = R P1a P1b / denominator`.

use std::collections::BTreeMap;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Module, Result};
use crate::export::CsvWriter;
use crate::optics::{fwhm_to_sigma_ratio, SpectralProfile};
use crate::photstat::ArmStatistics;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eq7Visibility {
    /// The bound itself; 1 when the photons are fully distinguishable.
    pub v_max: f64,
    /// `1 - v_max`: fraction of coincidences removed at zero delay.
    pub suppressed_fraction: f64,
}

fn check_r(r: f64) -> Result<()> {
    if r.is_finite() && (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::domain(
            Module::Hom,
            format!("indistinguishability must lie in [0, 1], got {r}"),
        ))
    }
}

pub fn visibility_eq7(
    arm_a: &ArmStatistics,
    arm_b: &ArmStatistics,
    r: f64,
) -> Result<Eq7Visibility> {
    check_r(r)?;
    let (p0a, p1a, p2a) = (arm_a.p(0), arm_a.p(1), arm_a.p(2));
    let (p0b, p1b, p2b) = (arm_b.p(0), arm_b.p(1), arm_b.p(2));
    let pairs = p1a * p1b;
    let bunched = p0a * p2b + p2a * p0b;
    let denominator = pairs + bunched;
    if denominator <= 0.0 {
        return Err(Error::domain(
            Module::Hom,
            "no two-photon events: visibility denominator is zero",
        ));
    }
    Ok(Eq7Visibility {
        v_max: ((1.0 - r) * pairs + bunched) / denominator,
        suppressed_fraction: r * pairs / denominator,
    })
}

/// Which input events the Fock-space oracle keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FockTruncation {
    /// Events with at most two photons in total, the regime the visibility
    /// bound assumes.
    #[default]
    TwoPhoton,
    /// Every event with up to two photons per arm (four in total).
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FockOracle {
    pub coincidence_at_zero: f64,
    pub coincidence_at_infinity: f64,
    pub visibility: f64,
}

/// Probability that both splitter outputs see at least one photon when `n_a`
/// and `n_b` photons enter the two ports. Indistinguishable photons share one
/// temporal mode; distinguishable ones occupy orthogonal modes. Computed by
/// expanding the creation operators through the splitter.
pub fn fock_coincidence(n_a: usize, n_b: usize, indistinguishable: bool) -> f64 {
    // Output modes: [c_A, d_A, c_B, d_B].
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let b_family = if indistinguishable { 0 } else { 2 };
    let mut state: BTreeMap<[u32; 4], f64> = BTreeMap::new();
    state.insert([0; 4], 1.0);
    let ops = std::iter::repeat_n([(0usize, h), (1usize, h)], n_a).chain(std::iter::repeat_n(
        [(b_family, h), (b_family + 1, -h)],
        n_b,
    ));
    for op in ops {
        let mut next: BTreeMap<[u32; 4], f64> = BTreeMap::new();
        for (occ, amp) in &state {
            for &(mode, coef) in &op {
                let mut o = *occ;
                o[mode] += 1;
                *next.entry(o).or_insert(0.0) += amp * coef * f64::from(o[mode]).sqrt();
            }
        }
        state = next;
    }
    let norm = (factorial(n_a) * factorial(n_b)).sqrt();
    let mut total = 0.0;
    let mut coincidence = 0.0;
    for (occ, amp) in &state {
        let p = (amp / norm).powi(2);
        total += p;
        if occ[0] + occ[2] > 0 && occ[1] + occ[3] > 0 {
            coincidence += p;
        }
    }
    debug_assert!((total - 1.0).abs() < 1e-12);
    coincidence
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Brute-force coincidence probabilities for a mixture of perfectly
/// interfering (weight `r`) and non-interfering events, aggregated over the
/// arms' photon-number distributions.
pub fn fock_oracle(
    arm_a: &ArmStatistics,
    arm_b: &ArmStatistics,
    r: f64,
    truncation: FockTruncation,
) -> Result<FockOracle> {
    check_r(r)?;
    for (name, arm) in [("a", arm_a), ("b", arm_b)] {
        if arm.support_max() > 2 {
            return Err(Error::domain(
                Module::Hom,
                format!(
                    "arm {name} has photon-number support up to {}; truncate it to n <= 2 first",
                    arm.support_max()
                ),
            ));
        }
    }
    let max_total = match truncation {
        FockTruncation::TwoPhoton => 2,
        FockTruncation::Full => 4,
    };
    let mut at_zero = 0.0;
    let mut at_infinity = 0.0;
    for n_a in 0..=2 {
        for n_b in 0..=2 {
            if n_a + n_b > max_total {
                continue;
            }
            let w = arm_a.p(n_a) * arm_b.p(n_b);
            if w == 0.0 {
                continue;
            }
            let dist = fock_coincidence(n_a, n_b, false);
            let ind = fock_coincidence(n_a, n_b, true);
            at_zero += w * (r * ind + (1.0 - r) * dist);
            at_infinity += w * dist;
        }
    }
    if at_infinity <= 0.0 {
        return Err(Error::domain(
            Module::Hom,
            "no coincidences at large delay; visibility undefined",
        ));
    }
    Ok(FockOracle {
        coincidence_at_zero: at_zero,
        coincidence_at_infinity: at_infinity,
        visibility: 1.0 - at_zero / at_infinity,
    })
}

/// `|int a*(w) b(w) exp(i w tau) dw|^2 / (|a|^2 |b|^2)`. Profiles on different
/// axes are compared after linear resampling of `b` onto `a`'s axis.
pub fn mode_overlap(a: &SpectralProfile, b: &SpectralProfile, delay: f64) -> Result<f64> {
    if !delay.is_finite() {
        return Err(Error::domain(
            Module::Hom,
            format!("delay must be finite, got {delay}"),
        ));
    }
    let axis = *a.axis();
    let resampled;
    let b_amp: &[Complex64] = if b.axis() == a.axis() {
        b.amplitude()
    } else {
        resampled = axis.points().map(|w| interpolate(b, w)).collect::<Vec<_>>();
        &resampled
    };
    let step = axis.step();
    let norm_a: f64 = a.amplitude().iter().map(|x| x.norm_sqr()).sum::<f64>() * step;
    let norm_b: f64 = b_amp.iter().map(|x| x.norm_sqr()).sum::<f64>() * step;
    if norm_a == 0.0 || norm_b == 0.0 {
        return Ok(0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, (x, y)) in a.amplitude().iter().zip(b_amp).enumerate() {
        let phase = axis.offset(k) * delay;
        acc += x.conj() * y * Complex64::new(phase.cos(), phase.sin());
    }
    let overlap = (acc * step).norm_sqr() / (norm_a * norm_b);
    Ok(overlap.min(1.0))
}

fn interpolate(p: &SpectralProfile, omega: f64) -> Complex64 {
    let axis = p.axis();
    if !axis.contains(omega) {
        return Complex64::new(0.0, 0.0);
    }
    let x = (omega - axis.start()) / axis.step();
    let lo = (x.floor() as usize).min(axis.len() - 2);
    let t = x - lo as f64;
    p.amplitude()[lo] * (1.0 - t) + p.amplitude()[lo + 1] * t
}

/// Delay at which the overlap of two identical Gaussians with intensity FWHM
/// `fwhm` (rad/s) falls to `1/e`: `1 / sigma`.
pub fn gaussian_coherence_time(fwhm: f64) -> f64 {
    fwhm_to_sigma_ratio() / fwhm
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomScenario {
    pub arm_a: ArmStatistics,
    pub arm_b: ArmStatistics,
    pub indistinguishability: f64,
    pub spectral_a: SpectralProfile,
    pub spectral_b: SpectralProfile,
}

impl HomScenario {
    pub fn new(
        arm_a: ArmStatistics,
        arm_b: ArmStatistics,
        indistinguishability: f64,
        spectral_a: SpectralProfile,
        spectral_b: SpectralProfile,
    ) -> Result<Self> {
        check_r(indistinguishability)?;
        Ok(Self {
            arm_a,
            arm_b,
            indistinguishability,
            spectral_a: spectral_a.normalize()?,
            spectral_b: spectral_b.normalize()?,
        })
    }

    pub fn visibility_eq7(&self) -> Result<Eq7Visibility> {
        visibility_eq7(&self.arm_a, &self.arm_b, self.indistinguishability)
    }

    pub fn fock_oracle(&self) -> Result<FockOracle> {
        fock_oracle(
            &self.arm_a.truncated(2)?,
            &self.arm_b.truncated(2)?,
            self.indistinguishability,
            FockTruncation::TwoPhoton,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipPoint {
    /// Seconds.
    pub delay: f64,
    pub coincidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomResult {
    pub v_max: f64,
    pub suppressed_fraction: f64,
    pub dip: Vec<DipPoint>,
    pub baseline: f64,
}

impl HomResult {
    pub fn min_coincidence(&self) -> f64 {
        self.dip
            .iter()
            .map(|p| p.coincidence)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Normalized coincidences versus delay:
/// `1 - suppressed_fraction(R * overlap(tau))`.
pub fn dip_profile(scenario: &HomScenario, delays: &[f64]) -> Result<HomResult> {
    let eq7 = scenario.visibility_eq7()?;
    let full = visibility_eq7(&scenario.arm_a, &scenario.arm_b, 1.0)?.suppressed_fraction;
    let dip = delays
        .iter()
        .map(|&delay| {
            let overlap = mode_overlap(&scenario.spectral_a, &scenario.spectral_b, delay)?;
            Ok(DipPoint {
                delay,
                coincidence: 1.0 - scenario.indistinguishability * overlap * full,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HomResult {
        v_max: eq7.v_max,
        suppressed_fraction: eq7.suppressed_fraction,
        dip,
        baseline: 1.0,
    })
}

pub fn write_dip_csv<W: Write>(result: &HomResult, out: W) -> io::Result<W> {
    let mut csv = CsvWriter::new(out, &["delay_ps", "coincidence_normalized"])?;
    for p in &result.dip {
        csv.numeric_row(&[p.delay * 1e12, p.coincidence])?;
    }
    csv.finish()
}
