//! Welch spectral estimation of the force-referred readout, with
//! per-bin confidence intervals and an octave-averaged comparator against
//! the analytic models.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::SimError;
use crate::filter::Band;
use crate::noise::NoiseModel;
use crate::response::{cavity_response, delay_interference_factor, mechanical_response};

use super::sim::{TimeTrace, Topology};

#[derive(Debug, Clone, Copy)]
pub struct WelchConfig {
    /// Samples per segment (power of two).
    pub segment_len: usize,
    /// Minimum number of (50%-overlapped, Hann-windowed) segments.
    pub min_segments: usize,
}

impl Default for WelchConfig {
    fn default() -> Self {
        Self {
            segment_len: 1 << 15,
            min_segments: 32,
        }
    }
}

/// Averaged force-noise PSD estimate with a 95% confidence band.
#[derive(Debug, Clone)]
pub struct SpectralEstimate {
    /// Bin frequencies (rad/s), strictly increasing, DC excluded.
    pub frequencies: Vec<f64>,
    /// Two-sided PSD estimate per (rad/s).
    pub psd: Vec<f64>,
    /// Half-width of the 95% confidence interval per bin.
    pub ci95: Vec<f64>,
    pub n_segments: usize,
    /// Bin indices excluded because the readout transfer was negligible.
    pub excluded: Vec<usize>,
}

/// Force transfer of the readout quadrature for the trace's topology:
/// Y_out = T(nu) * F_in + noise.
pub(super) fn force_transfer_of(trace: &TimeTrace, nu: f64) -> Complex64 {
    let p = trace.effective_params();
    let chi_c = cavity_response(nu, p.kappa);
    let chi_m = match mechanical_response(nu, &p) {
        Ok(m) => m,
        Err(_) => return Complex64::new(0.0, 0.0),
    };
    match trace.meta.topology {
        Topology::SingleSided => Complex64::from(p.coupling) * chi_c * chi_m,
        Topology::DoubleRing => {
            let interference = Complex64::new(1.0, 0.0) + delay_interference_factor(nu, &p);
            Complex64::from(p.coupling * (1.0 - p.delay_loss).sqrt()) * chi_c * chi_m * interference
        }
    }
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let s = (std::f64::consts::PI * k as f64 / n as f64).sin();
            s * s
        })
        .collect()
}

struct Segments<'a> {
    samples: &'a [f64],
    len: usize,
    hop: usize,
}

impl<'a> Segments<'a> {
    fn count(&self) -> usize {
        if self.samples.len() < self.len {
            0
        } else {
            (self.samples.len() - self.len) / self.hop + 1
        }
    }

    fn get(&self, i: usize) -> &'a [f64] {
        &self.samples[i * self.hop..i * self.hop + self.len]
    }
}

/// Welch average of per-segment periodograms of `samples`, with each bin of
/// each segment divided by `transfer` before squaring (pass ones for a raw
/// PSD). Returns (frequencies, mean, ci95, n_segments, excluded).
fn welch_core(
    samples: &[f64],
    dt: f64,
    cfg: &WelchConfig,
    transfer: impl Fn(f64) -> Complex64,
) -> Result<SpectralEstimate, SimError> {
    let n = cfg.segment_len;
    let segs = Segments {
        samples,
        len: n,
        hop: n / 2,
    };
    let count = segs.count();
    if count < cfg.min_segments {
        return Err(SimError::TooShort {
            available: count,
            required: cfg.min_segments,
        });
    }
    let window = hann(n);
    let win_power: f64 = window.iter().map(|w| w * w).sum();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);

    let n_bins = n / 2; // skip DC; keep bins 1..=n/2
    let mut freqs = Vec::with_capacity(n_bins);
    let mut gains = Vec::with_capacity(n_bins);
    for b in 1..=n_bins {
        let nu = std::f64::consts::TAU * b as f64 / (n as f64 * dt);
        freqs.push(nu);
        gains.push(transfer(nu));
    }
    let t_scale = gains.iter().map(|t| t.norm()).fold(0.0f64, f64::max);
    let excluded: Vec<usize> = gains
        .iter()
        .enumerate()
        .filter(|(_, t)| t.norm() <= 1e-14 * t_scale.max(1e-300))
        .map(|(i, _)| i)
        .collect();

    let mut mean = vec![0.0f64; n_bins];
    let mut m2 = vec![0.0f64; n_bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for s in 0..count {
        let seg = segs.get(s);
        for (k, v) in buf.iter_mut().enumerate() {
            *v = Complex64::new(seg[k] * window[k], 0.0);
        }
        fft.process(&mut buf);
        for b in 0..n_bins {
            let t = gains[b];
            let value = if t.norm() <= 1e-14 * t_scale.max(1e-300) {
                0.0
            } else {
                (buf[b + 1] / t).norm_sqr() * dt / win_power
            };
            // Welford running mean/variance across segments.
            let delta = value - mean[b];
            mean[b] += delta / (s as f64 + 1.0);
            m2[b] += delta * (value - mean[b]);
        }
    }
    // Hann segments at 50% overlap are correlated; halve the effective count.
    let n_eff = (count as f64 / 2.0).max(1.0);
    let ci95: Vec<f64> = m2
        .iter()
        .map(|&m| 1.96 * (m / count as f64).sqrt() / n_eff.sqrt())
        .collect();
    Ok(SpectralEstimate {
        frequencies: freqs,
        psd: mean,
        ci95,
        n_segments: count,
        excluded,
    })
}

/// Force-referred Welch PSD of a trace: each bin of the readout spectrum is
/// divided by the (snapped-delay) analytic transfer before averaging.
pub fn estimate_force_psd(trace: &TimeTrace, cfg: &WelchConfig) -> Result<SpectralEstimate, SimError> {
    welch_core(&trace.y_out, trace.dt, cfg, |nu| force_transfer_of(trace, nu))
}

/// Raw (untransferred) Welch PSD of an arbitrary sample series.
pub fn estimate_raw_psd(
    samples: &[f64],
    dt: f64,
    cfg: &WelchConfig,
) -> Result<SpectralEstimate, SimError> {
    welch_core(samples, dt, cfg, |_| Complex64::new(1.0, 0.0))
}

/// Octave-band comparison of a Welch estimate against an analytic model.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    /// (band center, mean estimate / mean model) per octave.
    pub octave_ratios: Vec<(f64, f64)>,
    /// Fraction of individual bins whose CI covers the model.
    pub ci_coverage: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl std::fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (c, r) in &self.octave_ratios {
            writeln!(f, "  octave @ {c:9.3e} rad/s: welch/analytic = {r:7.4}")?;
        }
        write!(
            f,
            "  ci coverage {:.2}, tolerance {:.0}% -> {}",
            self.ci_coverage,
            self.tolerance * 100.0,
            if self.pass { "ok" } else { "MISMATCH" }
        )
    }
}

/// Minimum bins per averaging band; octaves with fewer are merged with the
/// next so single-bin scatter cannot dominate the comparison.
const MIN_BINS_PER_BAND: usize = 24;

/// Compare band-averaged Welch levels against the analytic model over
/// `band`. Averaging bands are octaves, widened as needed to hold at least
/// [`MIN_BINS_PER_BAND`] bins. Passes when every band ratio is within
/// `tolerance` of one and the per-bin CI covers the model at a sane rate.
pub fn compare_psd_to_analytic(
    est: &SpectralEstimate,
    model: &dyn NoiseModel,
    band: &Band,
    tolerance: f64,
) -> ComparisonReport {
    let mut octave_ratios = Vec::new();
    let mut covered = 0usize;
    let mut considered = 0usize;
    let usable = |i: usize, nu: f64| -> Option<f64> {
        if est.excluded.contains(&i) {
            return None;
        }
        match model.total(nu) {
            Ok(v) if v.is_finite() => Some(v),
            _ => None,
        }
    };
    let mut lo = band.lo;
    while lo < band.hi * 0.999 {
        // Widen the octave until it holds enough bins.
        let mut hi = (2.0 * lo).min(band.hi);
        loop {
            let count = est
                .frequencies
                .iter()
                .enumerate()
                .filter(|&(i, &nu)| nu >= lo && nu < hi && usable(i, nu).is_some())
                .count();
            if count >= MIN_BINS_PER_BAND || hi >= band.hi * 0.999 {
                break;
            }
            hi = (2.0 * hi).min(band.hi);
        }
        let mut est_sum = 0.0;
        let mut model_sum = 0.0;
        let mut n = 0usize;
        for (i, &nu) in est.frequencies.iter().enumerate() {
            if nu < lo || nu >= hi {
                continue;
            }
            let Some(m) = usable(i, nu) else { continue };
            est_sum += est.psd[i];
            model_sum += m;
            n += 1;
            considered += 1;
            if (est.psd[i] - m).abs() <= est.ci95[i] {
                covered += 1;
            }
        }
        if n > 0 && model_sum > 0.0 {
            octave_ratios.push((0.5 * (lo + hi), est_sum / model_sum));
        }
        lo = hi;
    }
    let ci_coverage = if considered > 0 {
        covered as f64 / considered as f64
    } else {
        0.0
    };
    let pass = !octave_ratios.is_empty()
        && octave_ratios
            .iter()
            .all(|(_, r)| (*r - 1.0).abs() <= tolerance)
        && ci_coverage >= 0.5;
    ComparisonReport {
        octave_ratios,
        ci_coverage,
        tolerance,
        pass,
    }
}
