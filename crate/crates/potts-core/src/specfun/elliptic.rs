//! Complete elliptic integrals by AGM iteration and the Jacobi sn function
//! evaluated through theta quotients.

use super::theta::{theta_any, ModularParameter};
use crate::error::CoreError;
use crate::numerics::C64;
use std::f64::consts::PI;

/// K(k) = int_0^1 dt ((1-t^2)(1-k^2 t^2))^{-1/2} for modulus ratio k in [0,1).
pub fn elliptic_k(ratio: f64) -> Result<f64, CoreError> {
    if !(0.0..1.0).contains(&ratio) {
        return Err(CoreError::Domain(format!(
            "elliptic modulus ratio {ratio} not in [0,1)"
        )));
    }
    Ok(agm_k(ratio))
}

/// K'(k) = int_0^inf dt ((1+t^2)(1+k^2 t^2))^{-1/2} = K(sqrt(1-k^2)).
pub fn elliptic_kprime(ratio: f64) -> Result<f64, CoreError> {
    if !(0.0..1.0).contains(&ratio) {
        return Err(CoreError::Domain(format!(
            "elliptic modulus ratio {ratio} not in [0,1)"
        )));
    }
    if ratio == 0.0 {
        return Ok(f64::INFINITY);
    }
    // K'(k) = pi/(2 AGM(1,k)); avoids the 1-k'^2 cancellation at small k
    Ok(agm_pair(1.0, ratio))
}

fn agm_k(k: f64) -> f64 {
    agm_pair(1.0, (1.0 - k * k).sqrt())
}

fn agm_pair(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() < 1e-17 * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    PI / (2.0 * a)
}

/// Jacobi sn(u|k) for complex u and real modulus k in [0,1), via
/// sn = (theta3(0)/theta2(0)) * theta1(v)/theta4(v), v = pi u/(2K).
pub fn jacobi_sn(u: C64, modulus: f64) -> Result<C64, CoreError> {
    if !(0.0..1.0).contains(&modulus) {
        return Err(CoreError::Domain(format!(
            "sn modulus {modulus} not in [0,1)"
        )));
    }
    if modulus < 1e-12 {
        return Ok(u.sin());
    }
    let k_big = elliptic_k(modulus)?;
    let kp = elliptic_kprime(modulus)?;
    let tau = ModularParameter::from_periods(kp, k_big)?;
    let v = u * PI / (2.0 * k_big);
    let zero = C64::new(0.0, 0.0);
    let t30 = theta_any(3, zero, &tau);
    let t20 = theta_any(2, zero, &tau);
    let t1 = theta_any(1, v, &tau);
    let t4 = theta_any(4, v, &tau);
    Ok(t30 / t20 * t1 / t4)
}
