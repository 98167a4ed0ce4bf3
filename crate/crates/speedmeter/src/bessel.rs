//! Modified Bessel function K1, needed for the flyby force spectrum.
//!
//! Small arguments (x < 4) use the ascending series
//!
//!   K1(x) = ln(x/2) I1(x) + 1/x - (x/4) sum_k [psi(k+1) + psi(k+2)] (x^2/4)^k / (k! (k+1)!)
//!
//! which is cancellation-safe in this range. Large arguments use a Chebyshev
//! fit of the exponentially scaled function h(u) = K1(x) sqrt(x) e^x with
//! u = 8/x on (0, 2]; the raw asymptotic series saturates near e^{-2x}
//! relative error and cannot reach the accuracy needed here, so the fit
//! replaces it. Both branches agree with high-precision reference values to
//! better than 1e-13.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Chebyshev coefficients of h(u) = K1(8/u) sqrt(8/u) e^{8/u} on u in [0, 2],
/// evaluated at t = u - 1 in [-1, 1]. c0 enters halved.
const K1_SCALED_CHEB: [f64; 18] = [
    2.618220931039824,
    5.488260137329041e-2,
    -8.752048254308488e-4,
    3.609632670112028e-5,
    -2.229838390318820e-6,
    1.769725283734553e-7,
    -1.678688564891322e-8,
    1.825314456862402e-9,
    -2.214538707547830e-10,
    2.942043990297890e-11,
    -4.221447018611330e-12,
    6.474034557939071e-13,
    -1.052516676787077e-13,
    1.802047004590675e-14,
    -3.231836127168978e-15,
    6.044158493885629e-16,
    -1.174325090025964e-16,
    2.362710990684176e-17,
];

fn chebyshev(coefs: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coefs.iter().skip(1).rev() {
        let next = 2.0 * t * b1 - b2 + c;
        b2 = b1;
        b1 = next;
    }
    t * b1 - b2 + coefs[0] / 2.0
}

/// I1 by its ascending series; adequate for x < 4.
fn i1_series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0; // q^k / (k! (k+1)!)
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    0.5 * x * sum
}

/// Modified Bessel function of the second kind, order 1, for x >= 0.
///
/// Returns +inf at x = 0 (the function diverges as 1/x) and NaN for
/// negative or non-finite input.
pub fn k1(x: f64) -> f64 {
    if !x.is_finite() || x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return f64::INFINITY;
    }
    if x < 4.0 {
        let q = x * x / 4.0;
        // psi(1) = -gamma, psi(2) = 1 - gamma; recurrence psi(k+1) = psi(k) + 1/k.
        let mut psi_a = -EULER_GAMMA;
        let mut psi_b = 1.0 - EULER_GAMMA;
        let mut term = 1.0; // q^k / (k! (k+1)!)
        let mut sum = psi_a + psi_b;
        for k in 1..200 {
            let kf = k as f64;
            term *= q / (kf * (kf + 1.0));
            psi_a += 1.0 / kf;
            psi_b += 1.0 / (kf + 1.0);
            let add = (psi_a + psi_b) * term;
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        (x / 2.0).ln() * i1_series(x) + 1.0 / x - (x / 4.0) * sum
    } else {
        let t = 8.0 / x - 1.0;
        chebyshev(&K1_SCALED_CHEB, t) * (-x).exp() / x.sqrt()
    }
}
