//! Chebyshev functions of fractional order on the cut plane,
//! T_nu(x) = cos(pi nu phi) and U_nu(x) = sin(pi(nu+1)phi)/sin(pi phi)
//! with x = cos(pi phi) and phi continued from [0,1] via the principal
//! arccos. The resulting branch cut sits on x in (-inf,-1].

use crate::numerics::C64;
use std::f64::consts::PI;

/// Which side of a cut a boundary value is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Limit from the upper half-plane.
    Plus,
    /// Limit from the lower half-plane.
    Minus,
}

/// A point of the cut plane, with a branch tag that matters only when the
/// point lies on the function's cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutPlanePoint {
    pub x: C64,
    pub branch: Branch,
}

impl CutPlanePoint {
    pub fn new(x: C64, branch: Branch) -> Self {
        Self { x, branch }
    }

    pub fn off_cut(x: C64) -> Self {
        Self { x, branch: Branch::Plus }
    }

    pub fn real(x: f64, branch: Branch) -> Self {
        Self { x: C64::new(x, 0.0), branch }
    }
}

/// phi(x) = arccos(x)/pi on the principal branch; for x on (-inf,-1] the
/// two boundary values are 1 -/+ i arccosh(-x)/pi for the plus/minus side.
fn phi(p: CutPlanePoint) -> C64 {
    let x = p.x;
    if x.im == 0.0 && x.re <= -1.0 {
        let a = (-x.re + (x.re * x.re - 1.0).sqrt()).ln();
        let sign = match p.branch {
            Branch::Plus => -1.0,
            Branch::Minus => 1.0,
        };
        return C64::new(1.0, sign * a / PI);
    }
    acos_principal(x) / PI
}

/// Principal arccos for complex arguments: acos(z) = -i ln(z + i sqrt(1-z^2)).
fn acos_principal(z: C64) -> C64 {
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let s = (one - z * z).sqrt();
    -i * (z + i * s).ln()
}

/// Chebyshev function of the first kind, fractional order.
pub fn cheb_t(nu: f64, p: CutPlanePoint) -> C64 {
    let f = phi(p);
    (PI * nu * f).cos()
}

/// Chebyshev function of the second kind, fractional order. The removable
/// singularities of sin(pi phi) at phi in Z are handled by the limit value.
pub fn cheb_u(nu: f64, p: CutPlanePoint) -> C64 {
    let f = phi(p);
    let den = (PI * f).sin();
    if den.norm() < 1e-11 {
        // L'Hopital limit: (nu+1) cos(pi(nu+1)phi)/cos(pi phi)
        return (nu + 1.0) * (PI * (nu + 1.0) * f).cos() / (PI * f).cos();
    }
    (PI * (nu + 1.0) * f).sin() / den
}

/// Classical Chebyshev polynomial T_n evaluated by the recurrence (complex x).
pub fn cheb_t_poly(n: u32, x: C64) -> C64 {
    let mut t0 = C64::new(1.0, 0.0);
    if n == 0 {
        return t0;
    }
    let mut t1 = x;
    for _ in 1..n {
        let t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

/// Classical Chebyshev polynomial U_n by the recurrence.
pub fn cheb_u_poly(n: u32, x: C64) -> C64 {
    let mut u0 = C64::new(1.0, 0.0);
    if n == 0 {
        return u0;
    }
    let mut u1 = 2.0 * x;
    for _ in 1..n {
        let u2 = 2.0 * x * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    u1
}
