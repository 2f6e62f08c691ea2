//! Jacobi theta functions on the torus, as truncated series with adaptive
//! cutoff: the sum stops once the tail is below 1e-16 of the partial sum.
//!
//! Conventions (nome q = e^{i pi tau}, Im tau > 0):
//!   theta1(u) = (1/i) sum_n (-1)^n q^{(n+1/2)^2} e^{i(2n+1)u}
//!   theta2(u) =       sum_n        q^{(n+1/2)^2} e^{i(2n+1)u}
//!   theta3(u) =       sum_n        q^{n^2}       e^{2inu}
//!   theta4(u) =       sum_n (-1)^n q^{n^2}       e^{2inu}

use crate::error::CoreError;
use crate::numerics::C64;

/// A purely imaginary modular parameter tau = i t, t > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularParameter {
    tau: C64,
}

impl ModularParameter {
    pub fn new(tau: C64) -> Result<Self, CoreError> {
        if !(tau.im > 0.0) || !tau.im.is_finite() {
            return Err(CoreError::Domain(format!(
                "modular parameter needs Im(tau) > 0, got {tau}"
            )));
        }
        Ok(Self { tau })
    }

    /// tau = i K'/K from a real period ratio.
    pub fn from_periods(k_prime: f64, k: f64) -> Result<Self, CoreError> {
        Self::new(C64::new(0.0, k_prime / k))
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    pub fn im(&self) -> f64 {
        self.tau.im
    }
}

const MAX_INDEX: i64 = 512;
const REL_CUT: f64 = 1e-17;

fn series_half(u: C64, tau: C64, signs: bool, deriv: usize) -> Vec<C64> {
    // sum over n in Z of s_n q^{(n+1/2)^2} e^{i(2n+1)u} and u-derivatives
    let iptau = C64::new(0.0, 1.0) * std::f64::consts::PI * tau;
    let mut acc = vec![C64::new(0.0, 0.0); deriv + 1];
    let mut below = 0;
    for m in 0..MAX_INDEX {
        let mut largest = 0.0f64;
        for &n in &[m, -m - 1] {
            let half = n as f64 + 0.5;
            let sign = if signs && n.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
            let term =
                sign * (iptau * half * half + C64::new(0.0, 2.0 * half) * u).exp();
            let fac = C64::new(0.0, 2.0 * half);
            let mut d = term;
            for k in 0..=deriv {
                acc[k] += d;
                largest = largest.max(d.norm());
                d *= fac;
            }
        }
        let scale = acc[0].norm().max(1e-290);
        if largest < REL_CUT * scale {
            below += 1;
            if below >= 3 {
                break;
            }
        } else {
            below = 0;
        }
    }
    acc
}

fn series_whole(u: C64, tau: C64, signs: bool, deriv: usize) -> Vec<C64> {
    let iptau = C64::new(0.0, 1.0) * std::f64::consts::PI * tau;
    let mut acc = vec![C64::new(0.0, 0.0); deriv + 1];
    // n = 0 term
    acc[0] += C64::new(1.0, 0.0);
    let mut below = 0;
    for m in 1..MAX_INDEX {
        let mut largest = 0.0f64;
        for &n in &[m, -m] {
            let nf = n as f64;
            let sign = if signs && n.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
            let term = sign * (iptau * nf * nf + C64::new(0.0, 2.0 * nf) * u).exp();
            let fac = C64::new(0.0, 2.0 * nf);
            let mut d = term;
            for k in 0..=deriv {
                acc[k] += d;
                largest = largest.max(d.norm());
                d *= fac;
            }
        }
        let scale = acc[0].norm().max(1e-290);
        if largest < REL_CUT * scale {
            below += 1;
            if below >= 3 {
                break;
            }
        } else {
            below = 0;
        }
    }
    acc
}

/// theta_j(u|tau), j in 1..=4. (theta4 is internal; the public API per the
/// library contract exposes 1..=3.)
pub fn theta_any(j: u8, u: C64, tau: &ModularParameter) -> C64 {
    theta_derivs_any(j, u, tau, 0)[0]
}

/// theta_j and u-derivatives up to the requested order.
pub fn theta_derivs_any(j: u8, u: C64, tau: &ModularParameter, deriv: usize) -> Vec<C64> {
    let t = tau.tau();
    match j {
        1 => {
            let mut v = series_half(u, t, true, deriv);
            let inv_i = C64::new(0.0, -1.0);
            for x in v.iter_mut() {
                *x *= inv_i;
            }
            v
        }
        2 => series_half(u, t, false, deriv),
        3 => series_whole(u, t, false, deriv),
        4 => series_whole(u, t, true, deriv),
        _ => panic!("theta index must be 1..=4"),
    }
}

/// Public entry with the contract's index range {1,2,3}.
pub fn theta(j: u8, u: C64, tau: &ModularParameter) -> Result<C64, CoreError> {
    if !(1..=3).contains(&j) {
        return Err(CoreError::Domain(format!("theta index {j} not in 1..=3")));
    }
    Ok(theta_any(j, u, tau))
}

/// theta1'(0|tau).
pub fn theta1_prime0(tau: &ModularParameter) -> C64 {
    theta_derivs_any(1, C64::new(0.0, 0.0), tau, 1)[1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn theta1_vanishes_at_origin() {
        let tau = ModularParameter::new(c(0.0, 1.0)).unwrap();
        assert!(theta(1, c(0.0, 0.0), &tau).unwrap().norm() < 1e-16);
    }

    #[test]
    fn theta3_at_origin_tau_i() {
        // independent oracle: direct high-truncation summation 1 + 2 e^{-pi} + 2 e^{-4pi} + ...
        let tau = ModularParameter::new(c(0.0, 1.0)).unwrap();
        let v = theta(3, c(0.0, 0.0), &tau).unwrap();
        assert_abs_diff_eq!(v.re, 1.0864348112133080146, epsilon = 1e-15);
        assert!(v.im.abs() < 1e-16);
    }

    #[test]
    fn theta1_reference_point() {
        // frozen high-precision reference at u = 0.3 + 0.1i, tau = 1.2i
        let tau = ModularParameter::new(c(0.0, 1.2)).unwrap();
        let v = theta(1, c(0.3, 0.1), &tau).unwrap();
        assert_abs_diff_eq!(v.re, 0.23111879995249839267, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.07449724270739977827, epsilon = 1e-15);
    }

    #[test]
    fn theta1_antiperiodicity_in_pi() {
        let tau = ModularParameter::new(c(0.0, 1.2)).unwrap();
        let u = c(0.3, 0.1);
        let lhs = theta(1, u + std::f64::consts::PI, &tau).unwrap();
        let rhs = -theta(1, u, &tau).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn theta1_quasi_periodicity_lattice() {
        // theta1(u + pi(m + n tau)) = (-1)^{m+n} e^{-i pi tau n^2} e^{-2inu} theta1(u)
        let pi = std::f64::consts::PI;
        for &(tau_im, ure, uim) in &[(1.2, 0.3, 0.1), (0.7, -0.2, 0.25), (2.1, 0.9, -0.3)] {
            let tau = ModularParameter::new(c(0.0, tau_im)).unwrap();
            let u = c(ure, uim);
            let base = theta(1, u, &tau).unwrap();
            for m in -2i32..=2 {
                for n in -2i32..=2 {
                    let shift = pi * (C64::new(m as f64, 0.0) + tau.tau() * n as f64);
                    let lhs = theta(1, u + shift, &tau).unwrap();
                    let phase = if (m + n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    let expo = (-C64::new(0.0, 1.0) * pi * tau.tau() * (n * n) as f64
                        - C64::new(0.0, 2.0 * n as f64) * u)
                        .exp();
                    let rhs = phase * expo * base;
                    assert!(
                        (lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0),
                        "m={m} n={n}: {lhs} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn theta1_oddness_and_modular_transform() {
        let tau = ModularParameter::new(c(0.0, 1.2)).unwrap();
        let u = c(0.37, 0.11);
        let odd = theta(1, -u, &tau).unwrap() + theta(1, u, &tau).unwrap();
        assert!(odd.norm() < 1e-13);

        // theta1(u/tau | -1/tau) = -sqrt(i tau) e^{i u^2/(pi tau)} theta1(u|tau)
        let t = tau.tau();
        let tau_inv = ModularParameter::new(-C64::new(1.0, 0.0) / t).unwrap();
        let lhs = theta(1, u / t, &tau_inv).unwrap();
        let pref = -(C64::new(0.0, 1.0) * t).sqrt()
            * (C64::new(0.0, 1.0) * u * u / (std::f64::consts::PI * t)).exp();
        let rhs = pref * theta(1, u, &tau).unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn invalid_tau_rejected() {
        assert!(ModularParameter::new(c(0.0, -1.0)).is_err());
        assert!(ModularParameter::new(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn derivative_consistency_with_finite_differences() {
        let tau = ModularParameter::new(c(0.0, 1.3)).unwrap();
        let u = c(0.4, 0.2);
        let h = 1e-5;
        let d = theta_derivs_any(1, u, &tau, 2);
        let fd1 = (theta_any(1, u + h, &tau) - theta_any(1, u - h, &tau)) / (2.0 * h);
        let fd2 = (theta_any(1, u + h, &tau) - 2.0 * theta_any(1, u, &tau)
            + theta_any(1, u - h, &tau))
            / (h * h);
        assert!((d[1] - fd1).norm() < 1e-8);
        assert!((d[2] - fd2).norm() < 1e-5);
    }
}
