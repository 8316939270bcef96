//! Schmidt decomposition of a JSA, Schmidt number, purity and `g2(0)`.

use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Module, Result};
use crate::export::CsvWriter;
use crate::jsa::{apply_filter, FilterSpec, FilterWidth, JsaGrid};

/// Cumulative weight kept when truncating a spectrum.
const KEPT_WEIGHT: f64 = 1.0 - 1e-9;

/// Schmidt coefficients `c_n`, descending, with `sum c_n^2 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    coefficients: Vec<f64>,
    truncation_residual: f64,
}

impl SchmidtSpectrum {
    /// Builds a spectrum from unnormalized singular values. Values are sorted,
    /// normalized, and the tail beyond cumulative weight `1 - 1e-9` dropped.
    pub fn from_singular_values(values: &[f64]) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::domain(
                Module::Schmidt,
                "singular values must be finite and non-negative",
            ));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = sorted.iter().map(|v| v * v).sum();
        if total <= 0.0 {
            return Err(Error::domain(Module::Schmidt, "JSA has zero norm"));
        }
        let mut kept = 0.0;
        let mut n_kept = 0;
        for v in &sorted {
            kept += v * v / total;
            n_kept += 1;
            if kept >= KEPT_WEIGHT {
                break;
            }
        }
        sorted.truncate(n_kept);
        let kept_total: f64 = sorted.iter().map(|v| v * v).sum();
        let scale = kept_total.sqrt().recip();
        Ok(Self {
            coefficients: sorted.into_iter().map(|v| v * scale).collect(),
            truncation_residual: (1.0 - kept_total / total).max(0.0),
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Mode weights `c_n^2`.
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }

    pub fn truncation_residual(&self) -> f64 {
        self.truncation_residual
    }
}

/// Weighted amplitude matrix `S sqrt(dw_s dw_i)` with all-zero rows and columns
/// removed; singular values are unaffected by the removal.
fn weighted_support(jsa: &JsaGrid) -> (usize, usize, Vec<Complex64>) {
    let (ns, ni) = jsa.shape();
    let w = jsa.cell_area().sqrt();
    let zero = Complex64::new(0.0, 0.0);
    let rows: Vec<usize> = (0..ns)
        .filter(|&j| (0..ni).any(|k| jsa.get(j, k) != zero))
        .collect();
    let cols: Vec<usize> = (0..ni)
        .filter(|&k| (0..ns).any(|j| jsa.get(j, k) != zero))
        .collect();
    let data = rows
        .iter()
        .flat_map(|&j| cols.iter().map(move |&k| jsa.get(j, k) * w))
        .collect();
    (rows.len(), cols.len(), data)
}

/// Singular values of the JSA, scaled by the grid measure, as a Schmidt
/// spectrum. Uses a real SVD when the grid has no imaginary part.
pub fn schmidt_decompose(jsa: &JsaGrid) -> Result<SchmidtSpectrum> {
    if jsa
        .amplitude()
        .iter()
        .any(|a| !(a.re.is_finite() && a.im.is_finite()))
    {
        return Err(Error::domain(
            Module::Schmidt,
            "JSA contains non-finite entries",
        ));
    }
    let (rows, cols, data) = weighted_support(jsa);
    if rows == 0 {
        return Err(Error::domain(Module::Schmidt, "JSA has zero norm"));
    }
    let singular: Vec<f64> = if data.iter().all(|a| a.im == 0.0) {
        let real: Vec<f64> = data.iter().map(|a| a.re).collect();
        DMatrix::from_row_slice(rows, cols, &real)
            .singular_values()
            .iter()
            .copied()
            .collect()
    } else {
        DMatrix::from_row_slice(rows, cols, &data)
            .singular_values()
            .iter()
            .copied()
            .collect()
    };
    SchmidtSpectrum::from_singular_values(&singular)
}

/// `K = 1 / sum c_n^4`.
pub fn schmidt_number(spec: &SchmidtSpectrum) -> f64 {
    1.0 / purity_from_schmidt(spec)
}

/// `P = sum c_n^4 = 1 / K`.
pub fn purity_from_schmidt(spec: &SchmidtSpectrum) -> f64 {
    spec.coefficients.iter().map(|c| (c * c) * (c * c)).sum()
}

/// `Tr(rho^2)` of the reduced state, computed from the Gram matrix of the grid
/// without any decomposition.
pub fn trace_purity(jsa: &JsaGrid) -> f64 {
    let (rows, cols, data) = weighted_support(jsa);
    // Gram matrix over the shorter side; both reduced states share Tr(rho^2).
    let (n, m, data) = if rows <= cols {
        (rows, cols, data)
    } else {
        let transposed = (0..cols)
            .flat_map(|k| (0..rows).map(move |j| (j, k)))
            .map(|(j, k)| data[j * cols + k])
            .collect();
        (cols, rows, transposed)
    };
    let at = |a: usize, b: usize| data[a * m + b];
    let norm: f64 = (0..n)
        .map(|a| (0..m).map(|b| at(a, b).norm_sqr()).sum::<f64>())
        .sum();
    let sum: f64 = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut acc = 0.0;
            for c in a..n {
                let mut g = Complex64::new(0.0, 0.0);
                for b in 0..m {
                    g += at(a, b) * at(c, b).conj();
                }
                acc += if c == a {
                    g.norm_sqr()
                } else {
                    2.0 * g.norm_sqr()
                };
            }
            acc
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .sum();
    sum / (norm * norm)
}

/// `g2(0) = 1 + P`.
pub fn g2_from_purity(purity: f64) -> Result<f64> {
    if !(purity > 0.0 && purity <= 1.0) {
        return Err(Error::domain(
            Module::Schmidt,
            format!("purity must lie in (0, 1], got {purity}"),
        ));
    }
    Ok(1.0 + purity)
}

/// `P = g2(0) - 1`.
pub fn purity_from_g2(g2: f64) -> Result<f64> {
    if !(g2 > 1.0 && g2 <= 2.0) {
        return Err(Error::domain(
            Module::Schmidt,
            format!("g2(0) must lie in (1, 2], got {g2}"),
        ));
    }
    Ok(g2 - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub width_nm: f64,
    pub width_ghz: f64,
    pub purity: f64,
    pub schmidt_k: f64,
    pub heralding_efficiency: f64,
}

/// Heralded purity as a function of filter width. `template` fixes the arm,
/// shape and centre; each entry of `widths` replaces its width. Rows come back
/// in input order.
pub fn purity_vs_filter_sweep(
    jsa: &JsaGrid,
    widths: &[FilterWidth],
    template: &FilterSpec,
) -> Result<Vec<SweepRow>> {
    let center = template.center_wavelength(jsa.axis(template.arm));
    let hz: Vec<f64> = widths.iter().map(|w| w.hz(center)).collect::<Result<_>>()?;
    if hz.windows(2).any(|p| p[1] < p[0]) {
        return Err(Error::domain(
            Module::Schmidt,
            "sweep filter widths must be ascending",
        ));
    }
    widths
        .par_iter()
        .map(|&width| {
            let filter = template.with_width(width)?;
            let filtered = apply_filter(jsa, &filter)?;
            let spec = schmidt_decompose(&filtered)?;
            Ok(SweepRow {
                width_nm: width.wavelength(center)? * 1e9,
                width_ghz: width.hz(center)? * 1e-9,
                purity: purity_from_schmidt(&spec),
                schmidt_k: schmidt_number(&spec),
                heralding_efficiency: filtered.heralding_efficiency(),
            })
        })
        .collect::<Vec<Result<SweepRow>>>()
        .into_iter()
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> io::Result<W> {
    let mut csv = CsvWriter::new(
        out,
        &[
            "width_nm",
            "width_ghz",
            "purity",
            "schmidt_K",
            "heralding_efficiency",
        ],
    )?;
    for r in rows {
        csv.numeric_row(&[
            r.width_nm,
            r.width_ghz,
            r.purity,
            r.schmidt_k,
            r.heralding_efficiency,
        ])?;
    }
    csv.finish()
}
