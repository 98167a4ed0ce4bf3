//! Detuned cavities: quadrature mixing in a single-sided cavity, and the
//! detuned double-ring model with its phase-matching back-action-evasion
//! condition.
//!
//! Detuning couples the amplitude and phase quadratures, so the force signal
//! leaks into both outputs. The readout mixes them with coefficients frozen
//! at a chosen signal frequency `omega_sig` (a homodyne can only measure one
//! fixed quadrature); the force referral then divides by the full
//! frequency-dependent transfer of that frozen mix, which keeps the estimator
//! unbiased at every frequency and lets the zero-detuning limit collapse onto
//! the resonant formulas exactly.
//!
//! The frequency-domain system is solved by blockwise elimination: each
//! cavity is an analytic 2x2, and the optomechanical loop closes through one
//! scalar denominator. Fields are carried as coefficient vectors over the
//! vacuum inputs plus the external force, split into a direct optical part
//! and a mechanics-mediated part; the latter is what back-action means here.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::noise::{thermal_force_psd, NoiseModel, PsdBreakdown};
use crate::response::{mechanical_response, DetectorParams};
use crate::units::HBAR;

/// Detuning configuration on top of [`DetectorParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningParams {
    /// First-cavity detuning (rad/s).
    pub delta: f64,
    /// Second-cavity detuning (rad/s); double ring only.
    pub delta_prime: f64,
    /// Second-cavity loss rate (rad/s); double ring only.
    pub kappa_prime: f64,
    /// Bare-coupling ratio g0'/g0 (sign-carrying); enters the matching
    /// condition only.
    pub g_ratio: f64,
    /// Frequency at which the measured quadrature is frozen (rad/s).
    pub omega_sig: f64,
}

impl DetuningParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, v) in [
            ("delta", self.delta),
            ("delta_prime", self.delta_prime),
            ("kappa_prime", self.kappa_prime),
            ("g_ratio", self.g_ratio),
            ("omega_sig", self.omega_sig),
        ] {
            if !v.is_finite() {
                return Err(ModelError::NonFinite(name.into()));
            }
        }
        if self.kappa_prime <= 0.0 {
            return Err(ModelError::InvalidParams("kappa_prime must be > 0".into()));
        }
        if self.omega_sig <= 0.0 {
            return Err(ModelError::InvalidParams("omega_sig must be > 0".into()));
        }
        Ok(())
    }

    pub fn with_frequencies_in_hz(mut self) -> Self {
        let f = crate::units::HZ_TO_ANGULAR;
        self.delta *= f;
        self.delta_prime *= f;
        self.kappa_prime *= f;
        self.omega_sig *= f;
        self
    }
}

/// Frozen readout-quadrature mixing coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureCoefficients {
    pub a: Complex64,
    pub b: Complex64,
}

/// Second-cavity driven coupling implied by the first:
/// G' = G sqrt(1-L) sqrt(kappa'/kappa) sqrt((Delta^2 + kappa^2/4)/(Delta'^2 + kappa'^2/4)).
pub fn second_cavity_coupling(p: &DetectorParams, d: &DetuningParams) -> f64 {
    p.coupling
        * (1.0 - p.delay_loss).sqrt()
        * (d.kappa_prime / p.kappa).sqrt()
        * ((d.delta * d.delta + p.kappa * p.kappa / 4.0)
            / (d.delta_prime * d.delta_prime + d.kappa_prime * d.kappa_prime / 4.0))
            .sqrt()
}

/// Unit-modulus coupling phase between the two cavities:
/// e^{i theta} = (-i Delta - kappa/2)/(-i Delta' + kappa'/2)
///               * sqrt((Delta'^2 + kappa'^2/4)/(Delta^2 + kappa^2/4)).
pub fn mixing_phase(p: &DetectorParams, d: &DetuningParams) -> Complex64 {
    let num = Complex64::new(-p.kappa / 2.0, -d.delta);
    let den = Complex64::new(d.kappa_prime / 2.0, -d.delta_prime);
    let scale = ((d.delta_prime * d.delta_prime + d.kappa_prime * d.kappa_prime / 4.0)
        / (d.delta * d.delta + p.kappa * p.kappa / 4.0))
        .sqrt();
    num / den * scale
}

/// Residual of the phase-matching condition
/// (Delta'^2 + kappa'^2/4)/(Delta^2 + kappa^2/4) + (g0'/g0)(kappa'/kappa).
/// Zero (achievable only for g0'/g0 < 0) means the total optical phase
/// carries no position information at zero frequency.
pub fn matching_condition_residual(p: &DetectorParams, d: &DetuningParams) -> f64 {
    (d.delta_prime * d.delta_prime + d.kappa_prime * d.kappa_prime / 4.0)
        / (d.delta * d.delta + p.kappa * p.kappa / 4.0)
        + d.g_ratio * d.kappa_prime / p.kappa
}

fn reflection_phase(delta_eff: f64, kappa: f64) -> f64 {
    // arg[(-i d - k/2) / (-i d + k/2)]
    let z = Complex64::new(-kappa / 2.0, -delta_eff) / Complex64::new(kappa / 2.0, -delta_eff);
    z.arg()
}

/// Finite-difference |d(phi1 + phi2)/dx| at x = 0, relative to the
/// single-cavity |d phi1/dx|. The bare coupling scale g0/x0 is arbitrary and
/// cancels in the ratio; `g0_over_x0` only sets the probe displacement.
pub fn phase_derivative_ratio(p: &DetectorParams, d: &DetuningParams, g0_over_x0: f64) -> f64 {
    let g0p = d.g_ratio * g0_over_x0;
    let total = |x: f64| {
        reflection_phase(d.delta - g0_over_x0 * x, p.kappa)
            + reflection_phase(d.delta_prime - g0p * x, d.kappa_prime)
    };
    // Step small enough that the effective detuning moves by ~1e-4 linewidths.
    let h = 1e-4 * (d.delta * d.delta + p.kappa * p.kappa / 4.0) / (p.kappa * g0_over_x0.abs());
    let tot = (total(h) - total(-h)) / (2.0 * h);
    let single = g0_over_x0.abs() * p.kappa / (d.delta * d.delta + p.kappa * p.kappa / 4.0);
    tot.abs() / single
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Field as a linear form over the inputs plus an x-coupling coefficient.
#[derive(Clone, Copy)]
struct LinearField<const N: usize> {
    inputs: [Complex64; N],
    x: Complex64,
}

impl<const N: usize> LinearField<N> {
    fn zero() -> Self {
        Self {
            inputs: [ZERO; N],
            x: ZERO,
        }
    }

    fn unit(k: usize) -> Self {
        let mut f = Self::zero();
        f.inputs[k] = Complex64::new(1.0, 0.0);
        f
    }

    fn scaled(&self, c: Complex64) -> Self {
        let mut out = *self;
        for v in &mut out.inputs {
            *v *= c;
        }
        out.x *= c;
        out
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for (v, o) in out.inputs.iter_mut().zip(other.inputs) {
            *v += o;
        }
        out.x += other.x;
        out
    }
}

struct CavityOutputs<const N: usize> {
    x_out: LinearField<N>,
    y_out: LinearField<N>,
    /// Intracavity quadratures weighted for the radiation-pressure force.
    force: LinearField<N>,
}

/// Solve one detuned cavity driven by (sqrt(k) x_in + drive_x * x,
/// sqrt(k) y_in + drive_y * x).
fn solve_cavity<const N: usize>(
    nu: f64,
    kappa: f64,
    delta: f64,
    x_in: &LinearField<N>,
    y_in: &LinearField<N>,
    drive_x: Complex64,
    drive_y: Complex64,
    force_weight: (Complex64, Complex64),
) -> Result<CavityOutputs<N>, ModelError> {
    let beta = Complex64::new(kappa / 2.0, -nu);
    let det = beta * beta + delta * delta;
    if det.norm() <= 1e-300 * (kappa * kappa + delta * delta + nu * nu) {
        return Err(ModelError::SingularSystem { nu });
    }
    let sk = Complex64::from(kappa.sqrt());
    let rhs_x = {
        let mut f = x_in.scaled(sk);
        f.x += drive_x;
        f
    };
    let rhs_y = {
        let mut f = y_in.scaled(sk);
        f.x += drive_y;
        f
    };
    // [X; Y] = inv([[beta, delta], [-delta, beta]]) [rhs_x; rhs_y]
    let dl = Complex64::from(delta);
    let xq = rhs_x.scaled(beta / det).add(&rhs_y.scaled(-dl / det));
    let yq = rhs_x.scaled(dl / det).add(&rhs_y.scaled(beta / det));
    let x_out = x_in.add(&xq.scaled(-sk));
    let y_out = y_in.add(&yq.scaled(-sk));
    let force = xq.scaled(force_weight.0).add(&yq.scaled(force_weight.1));
    Ok(CavityOutputs { x_out, y_out, force })
}

/// Watched-cavity outputs, split into direct optical and mechanics-mediated
/// coefficient vectors over the inputs. full = direct + mediated.
struct SolvedSystem<const N: usize> {
    x_direct: [Complex64; N],
    x_mediated: [Complex64; N],
    y_direct: [Complex64; N],
    y_mediated: [Complex64; N],
}

impl<const N: usize> SolvedSystem<N> {
    fn x_full(&self, k: usize) -> Complex64 {
        self.x_direct[k] + self.x_mediated[k]
    }

    fn y_full(&self, k: usize) -> Complex64 {
        self.y_direct[k] + self.y_mediated[k]
    }
}

/// Resolve the mechanical loop and return the watched cavity's outputs.
fn close_system<const N: usize>(
    nu: f64,
    p: &DetectorParams,
    force: &LinearField<N>,
    x_out: &LinearField<N>,
    y_out: &LinearField<N>,
) -> Result<SolvedSystem<N>, ModelError> {
    let chi_m = mechanical_response(nu, p)?;
    let loop_denom = Complex64::new(1.0, 0.0) - chi_m * force.x;
    if loop_denom.norm() <= 1e-12 {
        return Err(ModelError::SingularSystem { nu });
    }
    let mut x_solution = force.inputs;
    for v in &mut x_solution {
        *v *= chi_m / loop_denom;
    }
    let mut out = SolvedSystem {
        x_direct: x_out.inputs,
        x_mediated: [ZERO; N],
        y_direct: y_out.inputs,
        y_mediated: [ZERO; N],
    };
    for k in 0..N {
        out.x_mediated[k] = x_out.x * x_solution[k];
        out.y_mediated[k] = y_out.x * x_solution[k];
    }
    Ok(out)
}

/// Input index of the external force in the coefficient vectors.
const FORCE_SINGLE: usize = 2;
const FORCE_DOUBLE: usize = 4;

fn solve_detuned_single(
    nu: f64,
    p: &DetectorParams,
    d: &DetuningParams,
) -> Result<SolvedSystem<3>, ModelError> {
    let g = Complex64::from(p.coupling);
    let cav = solve_cavity(
        nu,
        p.kappa,
        d.delta,
        &LinearField::<3>::unit(0),
        &LinearField::<3>::unit(1),
        ZERO,
        -g, // phase quadrature driven by -G x
        (-HBAR * g, ZERO), // radiation pressure -hbar G X
    )?;
    let force = cav.force.add(&LinearField::<3>::unit(FORCE_SINGLE));
    close_system(nu, p, &force, &cav.x_out, &cav.y_out)
}

fn solve_detuned_double(
    nu: f64,
    p: &DetectorParams,
    d: &DetuningParams,
) -> Result<SolvedSystem<5>, ModelError> {
    let g = Complex64::from(p.coupling);
    let gp = Complex64::from(second_cavity_coupling(p, d));
    let eith = mixing_phase(p, d);
    let (c_t, s_t) = (Complex64::from(eith.re), Complex64::from(eith.im));

    let cav1 = solve_cavity(
        nu,
        p.kappa,
        d.delta,
        &LinearField::<5>::unit(0),
        &LinearField::<5>::unit(1),
        ZERO,
        -g,
        (-HBAR * g, ZERO),
    )?;

    // Lossy delay line into the second cavity.
    let q = Complex64::from_polar((1.0 - p.delay_loss).sqrt(), nu * p.delay_time);
    let sl = Complex64::from(p.delay_loss.sqrt());
    let x2_in = cav1.x_out.scaled(q).add(&LinearField::<5>::unit(2).scaled(sl));
    let y2_in = cav1.y_out.scaled(q).add(&LinearField::<5>::unit(3).scaled(sl));

    let cav2 = solve_cavity(
        nu,
        d.kappa_prime,
        d.delta_prime,
        &x2_in,
        &y2_in,
        -gp * s_t,
        gp * c_t,
        (HBAR * gp * c_t, HBAR * gp * s_t), // +hbar G' (X' cos + Y' sin)
    )?;

    let force = cav1
        .force
        .add(&cav2.force)
        .add(&LinearField::<5>::unit(FORCE_DOUBLE));
    close_system(nu, p, &force, &cav2.x_out, &cav2.y_out)
}

fn psd_from_outputs<const N: usize>(
    at_sig: &SolvedSystem<N>,
    at_nu: &SolvedSystem<N>,
    p: &DetectorParams,
    force_idx: usize,
) -> PsdBreakdown {
    let a = at_sig.x_full(force_idx);
    let b = at_sig.y_full(force_idx);
    // Measured quadrature Q = a X_out + b Y_out with the frozen mix; the
    // force referral divides by the full transfer of Q at this frequency.
    let transfer = a * at_nu.x_full(force_idx) + b * at_nu.y_full(force_idx);
    let thermal = thermal_force_psd(p);
    if transfer.norm_sqr() <= 1e-28 * (a.norm_sqr() + b.norm_sqr()).max(1e-300) {
        // Estimator blind here: tagged-infinite measurement noise.
        return PsdBreakdown {
            shot: f64::INFINITY,
            thermal,
            backaction: 0.0,
        };
    }
    let t2 = transfer.norm_sqr();
    let mut mediated = 0.0;
    let mut full = 0.0;
    for k in 0..N {
        if k == force_idx {
            continue;
        }
        let qm = a * at_nu.x_mediated[k] + b * at_nu.y_mediated[k];
        let qf = a * at_nu.x_full(k) + b * at_nu.y_full(k);
        mediated += qm.norm_sqr();
        full += qf.norm_sqr();
    }
    // Back-action is the mechanics-mediated vacuum power; shot keeps the
    // direct transmission plus the direct-mediated interference, which
    // vanishes on resonance.
    PsdBreakdown {
        shot: (full - mediated) / t2,
        thermal,
        backaction: mediated / t2,
    }
}

/// Force-noise PSD of the detuned single-sided cavity with the optimal
/// frozen-quadrature readout. Reduces to the resonant position meter at
/// delta = 0.
pub fn detuned_single_psd(
    nu: f64,
    p: &DetectorParams,
    d: &DetuningParams,
) -> Result<PsdBreakdown, ModelError> {
    d.validate()?;
    let at_sig = solve_detuned_single(d.omega_sig, p, d)?;
    let at_nu = solve_detuned_single(nu, p, d)?;
    Ok(psd_from_outputs(&at_sig, &at_nu, p, FORCE_SINGLE))
}

/// Frozen quadrature-mixing coefficients a(omega_sig), b(omega_sig) for the
/// detuned single cavity.
pub fn single_quadrature_coefficients(
    p: &DetectorParams,
    d: &DetuningParams,
) -> Result<QuadratureCoefficients, ModelError> {
    let at_sig = solve_detuned_single(d.omega_sig, p, d)?;
    Ok(QuadratureCoefficients {
        a: at_sig.x_full(FORCE_SINGLE),
        b: at_sig.y_full(FORCE_SINGLE),
    })
}

/// Signal transfer of the frozen Q and P quadratures at `nu`, for the
/// detuned single cavity. Q carries the full signal a^2 + b^2 at omega_sig;
/// P carries none there.
pub fn single_quadrature_transfers(
    nu: f64,
    p: &DetectorParams,
    d: &DetuningParams,
) -> Result<(Complex64, Complex64), ModelError> {
    let at_sig = solve_detuned_single(d.omega_sig, p, d)?;
    let at_nu = solve_detuned_single(nu, p, d)?;
    let a = at_sig.x_full(FORCE_SINGLE);
    let b = at_sig.y_full(FORCE_SINGLE);
    let tq = a * at_nu.x_full(FORCE_SINGLE) + b * at_nu.y_full(FORCE_SINGLE);
    let tp = b * at_nu.x_full(FORCE_SINGLE) - a * at_nu.y_full(FORCE_SINGLE);
    Ok((tq, tp))
}

/// Force-noise PSD of the detuned double ring with the optimal
/// frozen-quadrature readout of the second cavity's output. Reduces to the
/// resonant velocity meter at delta = delta' = 0, kappa' = kappa.
pub fn detuned_double_psd(
    nu: f64,
    p: &DetectorParams,
    d: &DetuningParams,
) -> Result<PsdBreakdown, ModelError> {
    d.validate()?;
    let at_sig = solve_detuned_double(d.omega_sig, p, d)?;
    let at_nu = solve_detuned_double(nu, p, d)?;
    Ok(psd_from_outputs(&at_sig, &at_nu, p, FORCE_DOUBLE))
}

/// Detuned-double-ring noise model.
#[derive(Debug, Clone, Copy)]
pub struct DetunedDoubleRing {
    pub params: DetectorParams,
    pub detuning: DetuningParams,
}

impl NoiseModel for DetunedDoubleRing {
    fn breakdown(&self, nu: f64) -> Result<PsdBreakdown, ModelError> {
        detuned_double_psd(nu, &self.params, &self.detuning)
    }
}

/// Coupling giving the same intracavity photon-number proxy
/// |G|^2/(Delta^2 + kappa^2/4) as `reference` has on resonance.
pub fn equal_power_coupling(p: &DetectorParams, d: &DetuningParams, reference: f64) -> f64 {
    reference * ((d.delta * d.delta + p.kappa * p.kappa / 4.0) / (p.kappa * p.kappa / 4.0)).sqrt()
}

/// Numerically minimize the measurement-added PSD at omega_sig over the
/// coupling (no closed form exists off resonance). Golden-section on log G.
pub fn optimize_coupling_detuned_single(
    p: &DetectorParams,
    d: &DetuningParams,
    bracket_decades: f64,
) -> Result<f64, ModelError> {
    let center = crate::noise::optimal_coupling_position(p, 1.0 / d.omega_sig)?;
    let objective = |log_g: f64| -> Result<f64, ModelError> {
        let mut q = *p;
        q.coupling = 10f64.powf(log_g);
        let psd = detuned_single_psd(d.omega_sig, &q, d)?;
        Ok(psd.shot + psd.backaction)
    };
    let mut lo = center.log10() - bracket_decades;
    let mut hi = center.log10() + bracket_decades;
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    for _ in 0..200 {
        if hi - lo < 1e-7 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = objective(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = objective(x2)?;
        }
    }
    Ok(10f64.powf(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{
        optimal_coupling_position, optimal_coupling_velocity, position_force_psd,
        velocity_force_psd,
    };
    use crate::response::test_params;
    use approx::assert_relative_eq;

    fn zero_detuning(p: &DetectorParams, omega_sig: f64) -> DetuningParams {
        DetuningParams {
            delta: 0.0,
            delta_prime: 0.0,
            kappa_prime: p.kappa,
            g_ratio: -1.0,
            omega_sig,
        }
    }

    #[test]
    fn single_reduces_to_position_meter() {
        let mut p = test_params();
        p.coupling = optimal_coupling_position(&p, 1e-6).unwrap();
        let d = zero_detuning(&p, 1e6);
        for i in 0..=40 {
            let nu = 10f64.powf(1.0 + 7.0 * i as f64 / 40.0);
            let det = detuned_single_psd(nu, &p, &d).unwrap();
            let pos = position_force_psd(nu, &p).unwrap();
            assert_relative_eq!(det.total(), pos.total(), max_relative = 1e-10);
            assert_relative_eq!(det.shot, pos.shot, max_relative = 1e-10);
            assert_relative_eq!(det.backaction, pos.backaction, max_relative = 1e-10);
        }
    }

    #[test]
    fn double_reduces_to_velocity_meter() {
        let mut p = test_params();
        p.coupling = optimal_coupling_velocity(&p);
        let d = zero_detuning(&p, 1e5);
        for i in 0..=40 {
            let nu = 10f64.powf(1.0 + 6.5 * i as f64 / 40.0);
            let det = detuned_double_psd(nu, &p, &d).unwrap();
            let vel = velocity_force_psd(nu, &p).unwrap();
            if !vel.total().is_finite() {
                assert!(!det.total().is_finite());
                continue;
            }
            assert_relative_eq!(det.total(), vel.total(), max_relative = 1e-8);
            assert_relative_eq!(det.backaction, vel.backaction, max_relative = 1e-8);
        }
    }

    #[test]
    fn mixing_phase_is_unit_modulus() {
        let p = test_params();
        for (delta, dp, kp) in [
            (1e7, -1e7, 1e7),
            (-1e7, 1e7, 1e7),
            (3e6, -5e6, 2e7),
            (0.0, 0.0, 1e7),
        ] {
            let d = DetuningParams {
                delta,
                delta_prime: dp,
                kappa_prime: kp,
                g_ratio: -1.0,
                omega_sig: 1e5,
            };
            assert!((mixing_phase(&p, &d).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matching_condition_symmetric_case() {
        let p = test_params();
        let d = DetuningParams {
            delta: -p.kappa,
            delta_prime: p.kappa,
            kappa_prime: p.kappa,
            g_ratio: -1.0,
            omega_sig: 1e5,
        };
        assert_relative_eq!(matching_condition_residual(&p, &d), 0.0, epsilon = 1e-14);
        // Matched detunings kill the total phase derivative.
        let ratio = phase_derivative_ratio(&p, &d, 1.0);
        assert!(ratio < 1e-6, "ratio = {ratio:.2e}");
    }

    #[test]
    fn positive_coupling_ratio_never_matches() {
        let p = test_params();
        for dp in [0.0, 1e6, 1e7, 5e7] {
            let d = DetuningParams {
                delta: p.kappa,
                delta_prime: dp,
                kappa_prime: p.kappa,
                g_ratio: 1.0,
                omega_sig: 1e5,
            };
            assert!(matching_condition_residual(&p, &d) > 0.0);
        }
    }

    #[test]
    fn unmatched_detuning_leaves_phase_derivative() {
        let p = test_params();
        let d = DetuningParams {
            delta: -p.kappa,
            delta_prime: 0.6 * p.kappa,
            kappa_prime: p.kappa,
            g_ratio: -1.0,
            omega_sig: 1e5,
        };
        assert!(matching_condition_residual(&p, &d).abs() > 0.1);
        assert!(phase_derivative_ratio(&p, &d, 1.0) > 0.1);
    }

    #[test]
    fn p_quadrature_is_signal_free() {
        let mut p = test_params();
        p.coupling = optimal_coupling_position(&p, 1e-6).unwrap();
        let d = DetuningParams {
            delta: p.kappa,
            delta_prime: 0.0,
            kappa_prime: p.kappa,
            g_ratio: -1.0,
            omega_sig: 1e6,
        };
        let (tq, tp) = single_quadrature_transfers(d.omega_sig, &p, &d).unwrap();
        let qc = single_quadrature_coefficients(&p, &d).unwrap();
        let a2b2 = qc.a * qc.a + qc.b * qc.b;
        // Q carries a^2 + b^2 at omega_sig, P carries nothing.
        assert!((tq - a2b2).norm() <= 1e-10 * a2b2.norm());
        assert!(tp.norm() <= 1e-10 * a2b2.norm());
    }

    #[test]
    fn reoptimized_detuned_single_beats_resonant_somewhere() {
        let mut p = test_params();
        let tau = 1e-6;
        p.coupling = optimal_coupling_position(&p, tau).unwrap();
        let d = DetuningParams {
            delta: p.kappa,
            delta_prime: 0.0,
            kappa_prime: p.kappa,
            g_ratio: -1.0,
            omega_sig: 1.0 / tau,
        };
        let g_re = optimize_coupling_detuned_single(&p, &d, 3.0).unwrap();
        let mut q = p;
        q.coupling = g_re;
        let mut min_ratio = f64::INFINITY;
        for i in 0..=60 {
            let nu = 10f64.powf(3.5 + 3.0 * i as f64 / 60.0);
            let det = detuned_single_psd(nu, &q, &d).unwrap();
            let res = position_force_psd(nu, &p).unwrap();
            min_ratio = min_ratio.min(det.total() / res.total());
        }
        assert!(min_ratio < 1.0, "min ratio = {min_ratio}");
    }

    #[test]
    fn equal_power_coupling_scale() {
        let p = test_params();
        let d = DetuningParams {
            delta: -p.kappa,
            delta_prime: p.kappa,
            kappa_prime: p.kappa,
            g_ratio: -1.0,
            omega_sig: 1e5,
        };
        let g = equal_power_coupling(&p, &d, 2.0);
        assert_relative_eq!(g, 2.0 * 5f64.sqrt(), max_relative = 1e-12);
    }
}
