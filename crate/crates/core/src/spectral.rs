//! Discrete Fourier analysis of measured signals: the DFT as the plain
//! sum S̃(η_l) = (1/M) Σ_j S(t_j) e^{iη_l t_j} over t_j = jΔt, peak
//! extraction, and the propagated per-bin error E_S/√M.
//!
//! Frequency bins are reported centered on (-π/Δt, π/Δt], so negative
//! eigenvalues appear at their physical position rather than aliased onto
//! the one-sided grid. The bin spacing 2π/(MΔt) doubles as the quoted
//! frequency resolution of every extracted peak.

use num_complex::Complex64;
use thiserror::Error;

use crate::sim::ExperimentResult;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("series is empty")]
    Empty,
    #[error("grid is not uniform with t_j = j·dt (point {index} is {got}, expected {expected})")]
    NonUniformGrid {
        index: usize,
        got: f64,
        expected: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumBin {
    /// Angular frequency η_l (rad/s).
    pub eta: f64,
    pub value: Complex64,
    /// Propagated standard deviation (same for every bin).
    pub std: f64,
}

/// DFT of a sampled signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub bins: Vec<SpectrumBin>,
    pub m: usize,
    pub dt: f64,
}

impl Spectrum {
    pub const CSV_HEADER: &'static str = "eta,re,im,std";

    /// Bin spacing 2π/(MΔt): the frequency resolution.
    pub fn resolution(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.m as f64 * self.dt)
    }

    /// The Nyquist-type validity bound: eigenvalues are representable only
    /// when |λ| < π/Δt.
    pub fn nyquist_limit(&self) -> f64 {
        std::f64::consts::PI / self.dt
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for b in &self.bins {
            out.push_str(&format!(
                "{:.9e},{:.9e},{:.9e},{:.9e}\n",
                b.eta, b.value.re, b.value.im, b.std
            ));
        }
        out
    }
}

/// Per-bin standard deviation propagated from a constant per-point error:
/// E_S/√M.
pub fn propagate_errors(e_s: f64, m: usize) -> f64 {
    e_s / (m as f64).sqrt()
}

/// Exact DFT of the series. Requires the sampling grid t_j = j·Δt
/// starting at t₁ = Δt. Per-bin errors use the largest per-point standard
/// deviation, following the constant-error assumption.
pub fn dft(series: &ExperimentResult) -> Result<Spectrum, SpectralError> {
    let m = series.points.len();
    if m == 0 {
        return Err(SpectralError::Empty);
    }
    let dt = series.points[0].t;
    for (j, p) in series.points.iter().enumerate() {
        let expected = (j + 1) as f64 * dt;
        if (p.t - expected).abs() > 1e-9 * dt.abs().max(1.0) {
            return Err(SpectralError::NonUniformGrid {
                index: j,
                got: p.t,
                expected,
            });
        }
    }
    let e_s = series
        .points
        .iter()
        .map(|p| p.std_re.max(p.std_im))
        .fold(0.0, f64::max);
    let std = propagate_errors(e_s, m);

    // centered bin index range: exactly M bins spanning (-π/Δt, π/Δt]
    let l_lo = -((m as i64 - 1) / 2);
    let l_hi = m as i64 / 2;
    let mut bins = Vec::with_capacity(m);
    for l in l_lo..=l_hi {
        let eta = 2.0 * std::f64::consts::PI * l as f64 / (m as f64 * dt);
        let mut acc = Complex64::default();
        for p in &series.points {
            acc += p.value * Complex64::from_polar(1.0, eta * p.t);
        }
        bins.push(SpectrumBin {
            eta,
            value: acc / m as f64,
            std,
        });
    }
    Ok(Spectrum { bins, m, dt })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub frequency: f64,
    /// Real-part amplitude of the peak bin.
    pub weight: f64,
    /// Frequency uncertainty: the bin spacing 2π/(MΔt).
    pub resolution: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport {
    /// Strongest peaks first.
    pub peaks: Vec<Peak>,
    /// True when fewer local maxima exist than were requested.
    pub truncated: bool,
}

/// Top-`count` local maxima of the real part of the spectrum (the
/// imaginary part vanishes for on-grid frequencies of a Hermitian
/// generator). No sub-bin refinement: frequencies are raw bin centers.
pub fn find_peaks(spectrum: &Spectrum, count: usize) -> PeakReport {
    let re: Vec<f64> = spectrum.bins.iter().map(|b| b.value.re).collect();
    let mut maxima: Vec<Peak> = Vec::new();
    for i in 0..re.len() {
        let left = if i > 0 { re[i - 1] } else { f64::NEG_INFINITY };
        let right = if i + 1 < re.len() {
            re[i + 1]
        } else {
            f64::NEG_INFINITY
        };
        if re[i] > left && re[i] > right {
            maxima.push(Peak {
                frequency: spectrum.bins[i].eta,
                weight: re[i],
                resolution: spectrum.resolution(),
            });
        }
    }
    maxima.sort_by(|a, b| b.weight.total_cmp(&a.weight));
    let truncated = maxima.len() < count;
    maxima.truncate(count);
    PeakReport {
        peaks: maxima,
        truncated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::ExperimentPoint;
    use crate::tol::TOL_ALGEBRAIC;

    fn series_from(values: Vec<Complex64>, dt: f64, std: f64) -> ExperimentResult {
        ExperimentResult {
            points: values
                .into_iter()
                .enumerate()
                .map(|(j, value)| ExperimentPoint {
                    t: (j + 1) as f64 * dt,
                    value,
                    std_re: std,
                    std_im: std,
                })
                .collect(),
            mode: "ideal".into(),
        }
    }

    fn tone(m: usize, dt: f64, freq: f64, weight: f64) -> Vec<Complex64> {
        (1..=m)
            .map(|j| Complex64::from_polar(weight, -freq * j as f64 * dt))
            .collect()
    }

    #[test]
    fn constant_signal_peaks_at_zero() {
        let series = series_from(vec![Complex64::new(1.0, 0.0); 32], 0.1, 0.0);
        let spec = dft(&series).unwrap();
        for b in &spec.bins {
            let expect = if b.eta.abs() < 1e-12 { 1.0 } else { 0.0 };
            assert!((b.value.re - expect).abs() < TOL_ALGEBRAIC, "eta={}", b.eta);
            assert!(b.value.im.abs() < TOL_ALGEBRAIC);
        }
        let report = find_peaks(&spec, 1);
        assert!(!report.truncated);
        assert!(report.peaks[0].frequency.abs() < 1e-12);
    }

    #[test]
    fn on_grid_tone_recovers_exactly() {
        // geometric-sum identity: a tone on the bin grid lands in one bin
        let (m, dt) = (64, 0.1);
        let eta_m = 2.0 * std::f64::consts::PI * (-11.0) / (m as f64 * dt);
        let series = series_from(tone(m, dt, -eta_m, 1.0), dt, 0.0);
        // note: S(t) = e^{-i λ t} has its DFT peak at η = λ
        let spec = dft(&series).unwrap();
        for b in &spec.bins {
            let expect = if (b.eta - -eta_m).abs() < 1e-9 { 1.0 } else { 0.0 };
            assert!(
                (b.value - Complex64::new(expect, 0.0)).norm() < TOL_ALGEBRAIC,
                "eta={} value={}",
                b.eta,
                b.value
            );
        }
    }

    #[test]
    fn two_tone_signal_recovers_frequencies_and_weights() {
        let (m, dt) = (128, 0.1);
        let grid = |l: f64| 2.0 * std::f64::consts::PI * l / (m as f64 * dt);
        let (f1, w1) = (grid(-20.0), 0.3);
        let (f2, w2) = (grid(9.0), 0.7);
        let values: Vec<Complex64> = tone(m, dt, f1, w1)
            .into_iter()
            .zip(tone(m, dt, f2, w2))
            .map(|(a, b)| a + b)
            .collect();
        let spec = dft(&series_from(values, dt, 0.0)).unwrap();
        let report = find_peaks(&spec, 2);
        assert_eq!(report.peaks.len(), 2);
        assert!((report.peaks[0].frequency - f2).abs() < 1e-9);
        assert!((report.peaks[0].weight - w2).abs() < TOL_ALGEBRAIC);
        assert!((report.peaks[1].frequency - f1).abs() < 1e-9);
        assert!((report.peaks[1].weight - w1).abs() < TOL_ALGEBRAIC);
        assert!((report.peaks[0].resolution - grid(1.0)).abs() < 1e-12);
    }

    #[test]
    fn dft_is_linear() {
        let (m, dt) = (32, 0.25);
        let s1 = tone(m, dt, 3.1, 1.0);
        let s2 = tone(m, dt, -5.7, 1.0);
        let (a, b) = (Complex64::new(0.3, 0.1), Complex64::new(-1.2, 0.4));
        let combined: Vec<Complex64> = s1
            .iter()
            .zip(&s2)
            .map(|(x, y)| a * x + b * y)
            .collect();
        let d1 = dft(&series_from(s1, dt, 0.0)).unwrap();
        let d2 = dft(&series_from(s2, dt, 0.0)).unwrap();
        let dc = dft(&series_from(combined, dt, 0.0)).unwrap();
        for ((b1, b2), bc) in d1.bins.iter().zip(&d2.bins).zip(&dc.bins) {
            assert!((a * b1.value + b * b2.value - bc.value).norm() < TOL_ALGEBRAIC);
        }
    }

    #[test]
    fn parseval_under_this_normalization() {
        // (1/M) Σ_j |S(t_j)|² = Σ_l |S̃(η_l)|²
        let (m, dt) = (64, 0.1);
        let values: Vec<Complex64> = (1..=m)
            .map(|j| {
                Complex64::from_polar(1.0, -0.83 * j as f64 * dt)
                    + Complex64::from_polar(0.4, 2.17 * j as f64 * dt)
            })
            .collect();
        let time_side: f64 = values.iter().map(|v| v.norm_sqr()).sum::<f64>() / m as f64;
        let spec = dft(&series_from(values, dt, 0.0)).unwrap();
        let freq_side: f64 = spec.bins.iter().map(|b| b.value.norm_sqr()).sum();
        assert!((time_side - freq_side).abs() < 1e-10);
    }

    #[test]
    fn non_uniform_grid_rejected() {
        let mut series = series_from(vec![Complex64::new(1.0, 0.0); 8], 0.1, 0.0);
        series.points[4].t += 0.05;
        assert!(matches!(
            dft(&series),
            Err(SpectralError::NonUniformGrid { index: 4, .. })
        ));
        // grid starting at 0 violates t_j = j·dt
        let mut series0 = series_from(vec![Complex64::new(1.0, 0.0); 8], 0.1, 0.0);
        for (j, p) in series0.points.iter_mut().enumerate() {
            p.t = j as f64 * 0.1;
        }
        assert!(dft(&series0).is_err());
    }

    #[test]
    fn error_propagation_values() {
        assert!((propagate_errors(0.04, 128) - 0.0035355339059327377).abs() < 1e-15);
        assert!((propagate_errors(0.04, 32) - 0.007071067811865475).abs() < 1e-15);
        assert_eq!(propagate_errors(0.0, 128), 0.0);
        // two significant figures of the propagated value
        let rounded = (propagate_errors(0.04, 128) * 1e4).round() / 1e4;
        assert_eq!(rounded, 0.0035);
    }

    #[test]
    fn per_bin_std_comes_from_largest_point_error() {
        let mut series = series_from(vec![Complex64::new(1.0, 0.0); 16], 0.1, 0.02);
        series.points[3].std_im = 0.05;
        let spec = dft(&series).unwrap();
        for b in &spec.bins {
            assert!((b.std - propagate_errors(0.05, 16)).abs() < 1e-15);
        }
    }

    #[test]
    fn propagated_error_independent_of_sample_order() {
        // depends only on (E_S, M): permuting samples changes nothing
        let series = series_from(tone(16, 0.1, 1.0, 1.0), 0.1, 0.04);
        let mut shuffled = series.clone();
        shuffled.points.swap(2, 9);
        // the shuffled grid is rejected by dft, but the propagated std is a
        // pure function of (E_S, M)
        let spec = dft(&series).unwrap();
        assert!((spec.bins[0].std - propagate_errors(0.04, 16)).abs() < 1e-15);
    }

    #[test]
    fn peak_request_beyond_maxima_flags_truncation() {
        let series = series_from(vec![Complex64::new(1.0, 0.0); 16], 0.1, 0.0);
        let spec = dft(&series).unwrap();
        let report = find_peaks(&spec, spec.bins.len());
        assert!(report.truncated);
        assert!(report.peaks.len() < spec.bins.len());
        assert!(report.peaks[0].frequency.abs() < 1e-12);
    }

    #[test]
    fn csv_has_schema_header() {
        let series = series_from(vec![Complex64::new(1.0, 0.0); 4], 0.1, 0.0);
        let spec = dft(&series).unwrap();
        let csv = spec.to_csv();
        assert!(csv.starts_with("eta,re,im,std\n"));
        assert_eq!(csv.lines().count(), 5);
    }
}
