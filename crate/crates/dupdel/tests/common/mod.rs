//! Independent numeric oracles for the integration tests: a tanh-sinh
//! (double-exponential) quadrature that shares nothing with the library's
//! Gauss–Jacobi machinery, and a series evaluation of the exponential
//! integral for the critical-case closed form.

use std::f64::consts::{E, FRAC_PI_2, FRAC_PI_4};

/// `∫₀¹ f(t, 1-t) dt` by tanh-sinh quadrature with successive step halving.
/// The integrand receives `1 - t` separately so endpoint singularities keep
/// full relative precision near `t = 1`.
pub fn tanh_sinh(f: impl Fn(f64, f64) -> f64, tol: f64) -> f64 {
    let eval = |u: f64| {
        let x = FRAC_PI_2 * u.sinh();
        let t = 1.0 / (1.0 + (-2.0 * x).exp());
        let one_minus_t = 1.0 / (1.0 + (2.0 * x).exp());
        let sech = 1.0 / x.cosh();
        let w = FRAC_PI_4 * u.cosh() * sech * sech;
        if w == 0.0 {
            0.0
        } else {
            w * f(t, one_minus_t)
        }
    };
    let u_max = 4.0_f64;
    let mut h = 1.0_f64;
    let mut prev = f64::NAN;
    for _ in 0..14 {
        let n = (u_max / h).ceil() as i64;
        let mut sum = 0.0;
        for i in -n..=n {
            sum += eval(i as f64 * h);
        }
        let cur = sum * h;
        if (cur - prev).abs() <= tol * cur.abs().max(f64::MIN_POSITIVE) {
            return cur;
        }
        prev = cur;
        h *= 0.5;
    }
    panic!("tanh-sinh oracle did not converge to tol {tol}");
}

/// Oracle for `d_k` in each regime, straight off the closed integral forms.
pub fn oracle_d_k(p: f64, k: usize) -> f64 {
    let kf = k as f64;
    if p > 0.5 {
        let beta = p / (2.0 * p - 1.0);
        let gamma = (1.0 - p) / p;
        gamma
            * tanh_sinh(
                |t, omt| t.powf(kf) * omt.powf(beta - 1.0) * (1.0 - gamma * t).powf(-(beta + 1.0)),
                1e-13,
            )
    } else if p < 0.5 {
        let beta = p / (2.0 * p - 1.0);
        let gamma = (1.0 - p) / p;
        gamma.powf(-kf)
            * tanh_sinh(
                |t, omt| t.powf(kf) * omt.powf(-1.0 - beta) * (1.0 - t / gamma).powf(-(1.0 - beta)),
                1e-13,
            )
    } else {
        kf * tanh_sinh(
            |s, oms| {
                let r = s / oms;
                if r > 700.0 {
                    0.0
                } else {
                    s.powf(kf - 1.0) * (-r).exp()
                }
            },
            1e-13,
        )
    }
}

/// `E₁(1)` by the alternating series
/// `E₁(x) = -γ - ln x + Σ_{n≥1} (-1)^{n+1} x^n / (n·n!)`, giving the exact
/// critical identity `d_1 = 1 - e·E₁(1)`.
pub fn critical_d1_via_e1() -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let mut sum = 0.0_f64;
    let mut term = 1.0_f64; // x^n / n! at n, for x = 1
    for n in 1..=30 {
        term /= n as f64;
        let add = term / n as f64;
        sum += if n % 2 == 1 { add } else { -add };
    }
    let e1 = -EULER_GAMMA + sum;
    1.0 - E * e1
}
