//! Free-probability engine: Stieltjes and R-transforms, free additive
//! convolution, and the correlated generalization built on the fiducial
//! spectrum: G_Y^(p)(z) = (p/q)(z - W_Y(z)_-) + ((q-p)/q) W_Y(z)_+ and the
//! densities rho_(p) recovered from its functional inverse.

use crate::error::CoreError;
use crate::numerics::{gauss_legendre, C64};
use crate::specfun::chebyshev::{Branch, CutPlanePoint};
use crate::wy::{solve_frame, Couplings, DensityEstimate, EllipticFrame};
use std::sync::Arc;

/// A Stieltjes transform W(z) = Int rho(x)/(z-x) dx of a unit-mass measure,
/// carried as an evaluator plus support data.
#[derive(Clone)]
pub struct StieltjesFunction {
    eval: Arc<dyn Fn(C64) -> C64 + Send + Sync>,
    pub support: (f64, f64),
}

impl StieltjesFunction {
    pub fn new(
        eval: impl Fn(C64) -> C64 + Send + Sync + 'static,
        support: (f64, f64),
    ) -> Self {
        Self { eval: Arc::new(eval), support }
    }

    pub fn eval(&self, z: C64) -> C64 {
        (self.eval)(z)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.support.0.abs().max(self.support.1.abs()).max(1e-6)
    }

    /// Semicircle of the given variance: W(z) = (z - sqrt(z^2 - 4v))/(2v)
    /// with the square-root branch that decays at infinity.
    pub fn semicircle(variance: f64) -> Self {
        let v = variance;
        let r = 2.0 * v.sqrt();
        Self::new(
            move |z: C64| {
                let s = sqrt_tail(z * z - 4.0 * v, z);
                (z - s) / (2.0 * v)
            },
            (-r, r),
        )
    }

    /// Point mass at a: W(z) = 1/(z-a).
    pub fn point_mass(a: f64) -> Self {
        Self::new(move |z: C64| 1.0 / (z - a), (a, a))
    }

    /// Symmetric Bernoulli on {-1, +1}: W(z) = z/(z^2-1).
    pub fn bernoulli() -> Self {
        Self::new(|z: C64| z / (z * z - 1.0), (-1.0, 1.0))
    }

    /// Stieltjes transform of a tabulated density (trapezoid over its grid).
    pub fn from_density(d: &DensityEstimate) -> Self {
        let grid = d.grid.clone();
        let values = d.values.clone();
        let a = *grid.first().unwrap();
        let b = *grid.last().unwrap();
        Self::new(
            move |z: C64| {
                let mut acc = C64::new(0.0, 0.0);
                for i in 1..grid.len() {
                    let dx = grid[i] - grid[i - 1];
                    let f0 = values[i - 1] / (z - grid[i - 1]);
                    let f1 = values[i] / (z - grid[i]);
                    acc += 0.5 * (f0 + f1) * dx;
                }
                acc
            },
            (a, b),
        )
    }

    /// Functional inverse W^{-1}(zeta) by damped Newton seeded from the
    /// 1/z tail, valid for zeta in the image of a neighbourhood of infinity.
    pub fn inverse(&self, zeta: C64) -> Result<C64, CoreError> {
        if zeta.norm() < 1e-14 {
            return Err(CoreError::Domain("W^{-1} needs zeta != 0".into()));
        }
        let mut s = 1.0 / zeta;
        for _ in 0..200 {
            let h = 1e-7 * s.norm().max(1.0);
            let f = self.eval(s) - zeta;
            if f.norm() < 1e-13 * zeta.norm().max(1.0) {
                return Ok(s);
            }
            let d = (self.eval(s + h) - self.eval(s - h)) / (2.0 * h);
            if d.norm() < 1e-280 {
                return Err(CoreError::Solver("flat Stieltjes inverse".into()));
            }
            let mut step = f / d;
            let cap = 0.5 * s.norm().max(1.0);
            if step.norm() > cap {
                step *= cap / step.norm();
            }
            s -= step;
            if step.norm() < 1e-15 * s.norm().max(1.0) {
                return Ok(s);
            }
        }
        Err(CoreError::Solver("Stieltjes inversion did not converge".into()))
    }
}

fn sqrt_tail(v: C64, z: C64) -> C64 {
    // branch of sqrt(z^2 - ..) ~ +z at large |z|
    let s = v.sqrt();
    if (s - z).norm() <= (s + z).norm() {
        s
    } else {
        -s
    }
}

/// Boundary density rho(x) = -(1/pi) lim Im W(x + i eta), computed by
/// polynomial (Neville) extrapolation from moderate heights where the
/// underlying inversions are far from subordination branch points.
pub fn boundary_density(w: &StieltjesFunction, x: f64) -> f64 {
    let r = w.spectral_radius();
    let etas = [0.08 * r, 0.06 * r, 0.04 * r, 0.02 * r, 0.01 * r];
    let mut vals: Vec<f64> = etas
        .iter()
        .map(|&e| -w.eval(C64::new(x, e)).im / std::f64::consts::PI)
        .collect();
    // Neville tableau toward eta = 0
    let n = etas.len();
    for m in 1..n {
        for i in 0..n - m {
            let (e0, e1) = (etas[i], etas[i + m]);
            vals[i] = (e0 * vals[i + 1] - e1 * vals[i]) / (e0 - e1);
        }
    }
    vals[0]
}

/// R-transform R(z) = W^{-1}(z) - 1/z.
pub fn r_transform(w: &StieltjesFunction, z: C64) -> Result<C64, CoreError> {
    Ok(w.inverse(z)? - 1.0 / z)
}

/// Free additive convolution via R-addition:
/// W^{-1}(zeta) = Wx^{-1}(zeta) + Wy^{-1}(zeta) - 1/zeta, inverted by Newton
/// with downward continuation in Im z for boundary evaluation.
pub fn free_convolve(wx: &StieltjesFunction, wy: &StieltjesFunction) -> StieltjesFunction {
    let wx = wx.clone();
    let wy = wy.clone();
    let support = (wx.support.0 + wy.support.0, wx.support.1 + wy.support.1);
    let rad = support.0.abs().max(support.1.abs()).max(1.0);
    let eval = move |z: C64| -> C64 {
        let h_inv = |zeta: C64| -> Option<C64> {
            let a = wx.inverse(zeta).ok()?;
            let b = wy.inverse(zeta).ok()?;
            Some(a + b - 1.0 / zeta)
        };
        let mut path = Vec::new();
        let clearance = 1.5 * rad;
        if z.im.abs() < clearance {
            let z_hi = C64::new(z.re, clearance + z.im.abs());
            let steps = 24;
            for i in 0..=steps {
                let f = i as f64 / steps as f64;
                path.push(z_hi + (z - z_hi) * f);
            }
        } else {
            path.push(z);
        }
        let mut zeta = 1.0 / path[0];
        for &target in &path {
            for _ in 0..120 {
                let hv = match h_inv(zeta) {
                    Some(v) => v,
                    None => return C64::new(f64::NAN, f64::NAN),
                };
                let hstep = 1e-7 * zeta.norm().max(1e-3);
                let hp = match h_inv(zeta + hstep) {
                    Some(v) => v,
                    None => return C64::new(f64::NAN, f64::NAN),
                };
                let d = (hp - hv) / hstep;
                if d.norm() < 1e-280 {
                    break;
                }
                let mut step = (hv - target) / d;
                let cap = 0.4 * zeta.norm().max(1e-3);
                if step.norm() > cap {
                    step *= cap / step.norm();
                }
                zeta -= step;
                if step.norm() < 1e-14 * zeta.norm().max(1e-6) {
                    break;
                }
            }
        }
        zeta
    };
    StieltjesFunction::new(eval, support)
}

/// The correlated transform G_Y^(p)(z) on the physical sheet; on the cut of
/// rho_Y the branch tag selects the boundary side.
pub fn g_transform(
    frame: &EllipticFrame,
    p: u32,
    q: f64,
    z: CutPlanePoint,
) -> Result<C64, CoreError> {
    if (frame.q - q).abs() > 1e-12 {
        return Err(CoreError::Domain(format!(
            "frame was solved at q = {}, asked for q = {q}",
            frame.q
        )));
    }
    if p as f64 > q {
        return Err(CoreError::Domain(format!("need p <= q, got p = {p}, q = {q}")));
    }
    let pf = p as f64;
    let on_cut = z.x.im == 0.0 && z.x.re >= frame.z_minus && z.x.re <= frame.z_plus;
    let (w_plus, w_minus) = if on_cut {
        let wp = frame.eval_wy(CutPlanePoint::new(z.x, z.branch))?;
        let other = match z.branch {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        };
        let wm = frame.eval_wy(CutPlanePoint::new(z.x, other))?;
        (wp, wm)
    } else {
        frame.wy_pair(z.x)?
    };
    Ok(pf / q * (z.x - w_minus) + (q - pf) / q * w_plus)
}

/// Functional inversion of G_Y^(p): returns s with G_Y^(p)(s) = zeta on the
/// branch continued from the physical tail, tracking the W-branch pair along
/// the Newton path. The state is reused across calls for grid continuation.
pub struct GpInverter<'a> {
    frame: &'a EllipticFrame,
    p: f64,
    state: crate::wy::BranchState,
    pub zeta: C64,
    pub s: C64,
}

impl<'a> GpInverter<'a> {
    /// Start at a large real zeta where s ~ zeta + O(1).
    pub fn new(frame: &'a EllipticFrame, p: u32) -> Result<Self, CoreError> {
        let rad = frame.z_minus.abs().max(frame.z_plus.abs());
        let s0 = C64::new(4.0 * rad, 0.5);
        let mut st = frame.anchor()?;
        let hi = 1.2 * (frame.z_plus - frame.z_minus);
        let re0 = st.z.re;
        frame.branch_goto(&mut st, C64::new(re0, hi))?;
        frame.branch_goto(&mut st, C64::new(s0.re, hi))?;
        frame.branch_goto(&mut st, s0)?;
        let (wi, wii) = frame.branch_values(&st);
        let pf = p as f64;
        let zeta = pf / frame.q * (s0 - wii) + (frame.q - pf) / frame.q * wi;
        Ok(Self { frame, p: pf, state: st, zeta, s: s0 })
    }

    fn g_at(&mut self, s: C64) -> Result<C64, CoreError> {
        self.frame.branch_goto(&mut self.state, s)?;
        let (wi, wii) = self.frame.branch_values(&self.state);
        Ok(self.p / self.frame.q * (s - wii)
            + (self.frame.q - self.p) / self.frame.q * wi)
    }

    /// Move the inverter to a new target zeta (continuation step).
    pub fn goto(&mut self, zeta_new: C64) -> Result<(), CoreError> {
        let steps = ((zeta_new - self.zeta).norm() / (0.1 * self.frame.z_plus.abs().max(1.0)))
            .ceil()
            .max(1.0) as usize;
        let z0 = self.zeta;
        for i in 1..=steps {
            let target = z0 + (zeta_new - z0) * (i as f64 / steps as f64);
            let mut s = self.s;
            let mut done = false;
            for _ in 0..80 {
                let g = self.g_at(s)?;
                let h = 1e-6 * s.norm().max(1e-2);
                let gp = self.g_at(s + h)?;
                let d = (gp - g) / h;
                if d.norm() < 1e-280 {
                    break;
                }
                let mut step = (g - target) / d;
                let cap = 0.3 * self.frame.z_plus.abs().max(1.0);
                if step.norm() > cap {
                    step *= cap / step.norm();
                }
                s -= step;
                if step.norm() < 1e-13 * s.norm().max(1e-6) {
                    done = true;
                    break;
                }
            }
            if !done {
                return Err(CoreError::Tracking(format!(
                    "G_(p) inversion stalled at zeta = {target}"
                )));
            }
            let _ = self.g_at(s)?;
            self.s = s;
            self.zeta = target;
        }
        Ok(())
    }
}

/// Density of X_1 + ... + X_p by functional inversion of G_Y^(p):
/// rho_(p)(x) = -(1/pi) Im G^Y_(p)(x + i0), by continuation from the
/// physical tail down to the axis with Richardson extrapolation in the
/// offset.
pub fn rho_p(
    frame: &EllipticFrame,
    p: u32,
    q: f64,
    grid: &[f64],
) -> Result<DensityEstimate, CoreError> {
    if (frame.q - q).abs() > 1e-12 {
        return Err(CoreError::Domain("frame solved at a different q".into()));
    }
    if frame.t3 < 0.0 {
        return Err(CoreError::Domain(
            "rho_(p) evaluation expects the positive-t3 representative".into(),
        ));
    }
    let mut inv = GpInverter::new(frame, p)?;
    let eps = 1e-7 * frame.z_plus.abs().max(1.0);
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&i, &j| grid[j].partial_cmp(&grid[i]).unwrap());
    let hover = 0.35 * (frame.z_plus - frame.z_minus);
    inv.goto(C64::new(inv.zeta.re, hover))?;
    let mut values = vec![0.0; grid.len()];
    for &idx in &order {
        let x = grid[idx];
        inv.goto(C64::new(x, hover))?;
        inv.goto(C64::new(x, 2.0 * eps))?;
        let s2 = inv.s;
        inv.goto(C64::new(x, eps))?;
        let s1 = inv.s;
        // the tracked inverse branch carries Im s = +pi rho at the boundary
        let im = 2.0 * s1.im - s2.im;
        values[idx] = (im / std::f64::consts::PI).max(0.0);
        inv.goto(C64::new(x, hover))?;
    }
    let thresh = 1e-8;
    let lo = grid
        .iter()
        .zip(&values)
        .find(|(_, &v)| v > thresh)
        .map(|(&x, _)| x)
        .unwrap_or(grid[0]);
    let hi = grid
        .iter()
        .zip(&values)
        .rev()
        .find(|(_, &v)| v > thresh)
        .map(|(&x, _)| x)
        .unwrap_or(*grid.last().unwrap());
    Ok(DensityEstimate { support: vec![(lo, hi)], grid: grid.to_vec(), values })
}

/// Moments of rho_(p) by the parametric contour integral
/// m_k = (1/2 pi i) oint zeta^k W_(p)(zeta) d zeta with zeta = G_Y^(p)(s)
/// on the image of a large s-circle; the polynomial sheet content drops out.
pub fn rho_p_moments(
    frame: &EllipticFrame,
    p: u32,
    kmax: usize,
) -> Result<Vec<f64>, CoreError> {
    let rad = frame.z_minus.abs().max(frame.z_plus.abs());
    let r = 3.0 * rad;
    let m = 256usize;
    let mut st = frame.anchor()?;
    let hi = 1.2 * (frame.z_plus - frame.z_minus);
    let re0 = st.z.re;
    frame.branch_goto(&mut st, C64::new(re0, hi))?;
    frame.branch_goto(&mut st, C64::new(0.0, r))?;
    let pf = p as f64;
    let q = frame.q;
    let mut zetas = Vec::with_capacity(m + 1);
    let mut svals = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let th = 0.5 * std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let sv = C64::from_polar(r, th);
        frame.branch_goto(&mut st, sv)?;
        let (wi, wii) = frame.branch_values(&st);
        let zeta = pf / q * (sv - wii) + (q - pf) / q * wi;
        zetas.push(zeta);
        svals.push(sv);
    }
    // spectral derivative d zeta/d theta via FFT-free trapezoid of the
    // analytic integrand: m_k = (1/2 pi i) sum zeta^k (s - zeta) zeta'(th) dth
    let mut moments = vec![0.0; kmax + 1];
    for k in 0..=kmax {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..m {
            // centered derivative in theta (periodic)
            let jp = (j + 1) % m;
            let jm = (j + m - 1) % m;
            let dz = (zetas[jp] - zetas[jm]) / (2.0 * (2.0 * std::f64::consts::PI / m as f64));
            let integrand = zetas[j].powu(k as u32) * (svals[j] - zetas[j]) * dz;
            acc += integrand;
        }
        acc *= 2.0 * std::f64::consts::PI / m as f64;
        moments[k] = (acc / (C64::new(0.0, 2.0 * std::f64::consts::PI))).re;
    }
    // fix orientation by normalizing the mass to +1
    if moments[0] < 0.0 {
        for v in moments.iter_mut() {
            *v = -*v;
        }
    }
    Ok(moments)
}

/// Stieltjes transform of rho_(p) built from a density table on its support.
pub fn w_p_from_density(
    frame: &EllipticFrame,
    p: u32,
    npts: usize,
) -> Result<StieltjesFunction, CoreError> {
    let q = frame.q;
    // generous bracket: the sum of p colours lives within p * (Y-range) + slack
    let lo = frame.z_minus * (p as f64).max(1.0) - 1.0;
    let hi = frame.z_plus * (p as f64).max(1.0) + 1.0;
    let grid: Vec<f64> = (0..=npts)
        .map(|i| lo + (hi - lo) * i as f64 / npts as f64)
        .collect();
    let d = rho_p(frame, p, q, &grid)?;
    Ok(StieltjesFunction::from_density(&d))
}

/// One row of the Voiculescu-limit report.
#[derive(Debug, Clone)]
pub struct VoiculescuRow {
    pub lambda: f64,
    pub z: f64,
    /// | W_(q)^{-1}(zeta) - sum_i W_{X_i}^{-1}(zeta) + (q-1)/zeta |
    pub additivity_defect: f64,
    /// value of W_{lambda Y} at the probe point
    pub w_lambda_y: f64,
}

/// Tabulate how free-probability additivity emerges as lambda -> 0. The
/// lambda-deformed measure maps onto the unit-coupling one by t2 -> t2/lambda,
/// t3 -> t3/lambda^{3/2} with X = X~/sqrt(lambda); the fiducial matrix is
/// unrescaled, so W_{lambda Y}(z) = (1/lambda) W_Y~(z/lambda).
pub fn voiculescu_limit_check(
    c: &Couplings,
    lambdas: &[f64],
    probe_z: f64,
) -> Result<Vec<VoiculescuRow>, CoreError> {
    c.validate()?;
    if c.k != 1 {
        return Err(CoreError::Domain("lambda sweep needs cubic couplings".into()));
    }
    let q = c.q;
    let qi = q.round() as u32;
    let mut out = Vec::new();
    for &lam in lambdas {
        if !(0.0 < lam && lam <= 1.0) {
            return Err(CoreError::Domain(format!("lambda = {lam} outside (0,1]")));
        }
        let scaled = Couplings::cubic(q, c.p, c.t2() / lam, c.t3() / lam.powf(1.5));
        let frame = solve_frame(&scaled)?;
        let sq = lam.sqrt();
        let wq = w_p_from_density(&frame, qi, 320)?;
        let w1 = w_p_from_density(&frame, 1, 320)?;
        let radius = wq.spectral_radius() / sq;
        let zeta = C64::new(-0.3 / radius, 0.0);
        let zt = zeta / sq;
        // W^(lam)_(p)^{-1}(zeta) = W~^{-1}(zeta/sqrt(lam))/sqrt(lam)
        let wq_inv = wq.inverse(zt)? / sq;
        let w1_inv = w1.inverse(zt)? / sq;
        let defect = (wq_inv - q * w1_inv + (q - 1.0) / zeta).norm();
        let wy = frame
            .eval_wy(CutPlanePoint::off_cut(C64::new(probe_z / lam, 0.0)))?
            / lam;
        out.push(VoiculescuRow {
            lambda: lam,
            z: probe_z,
            additivity_defect: defect,
            w_lambda_y: wy.re,
        });
    }
    Ok(out)
}

/// Quadrature of a density evaluator over [a,b] with the edge-resolving
/// sin^2 substitution.
pub fn density_mass_quadrature(
    f: impl Fn(f64) -> Result<f64, CoreError>,
    a: f64,
    b: f64,
    n: usize,
) -> Result<f64, CoreError> {
    let (xs, ws) = gauss_legendre(n);
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        let th = 0.25 * std::f64::consts::PI * (x + 1.0);
        let z = a + (b - a) * th.sin().powi(2);
        let jac = (b - a) * 2.0 * th.sin() * th.cos() * 0.25 * std::f64::consts::PI;
        acc += w * jac * f(z)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn r_transform_of_semicircle_is_linear() {
        let w = StieltjesFunction::semicircle(1.7);
        let z = C64::new(0.1, 0.0);
        let r = r_transform(&w, z).unwrap();
        assert!((r - 1.7 * z).norm() < 1e-10, "{r}");
    }

    #[test]
    fn r_transform_of_point_mass_is_constant() {
        let w = StieltjesFunction::point_mass(0.83);
        for &z in &[0.05, 0.2, -0.15] {
            let r = r_transform(&w, C64::new(z, 0.0)).unwrap();
            assert!((r - C64::new(0.83, 0.0)).norm() < 1e-11);
        }
    }

    #[test]
    fn r_transform_of_bernoulli() {
        let w = StieltjesFunction::bernoulli();
        let z = C64::new(0.2, 0.0);
        let r = r_transform(&w, z).unwrap();
        let expect = ((1.0 + 4.0 * z * z).sqrt() - 1.0) / (2.0 * z);
        assert!((r - expect).norm() < 1e-11, "{r} vs {expect}");
    }

    #[test]
    fn semicircle_free_convolution_adds_variance() {
        let w1 = StieltjesFunction::semicircle(1.0);
        let w2 = free_convolve(&w1, &w1);
        let target = StieltjesFunction::semicircle(2.0);
        for &x in &[0.0, 0.7, -1.3, 2.1] {
            for &y in &[0.8, 0.3] {
                let z = C64::new(x, y);
                let a = w2.eval(z);
                let b = target.eval(z);
                assert!((a - b).norm() < 1e-9, "z={z}: {a} vs {b}");
            }
        }
        for &x in &[0.0, 1.0, -2.0] {
            let a = w2.eval(C64::new(x, 1e-7));
            let b = target.eval(C64::new(x, 1e-7));
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn point_mass_convolution_shifts() {
        let w1 = StieltjesFunction::semicircle(1.0);
        let sh = StieltjesFunction::point_mass(0.6);
        let w2 = free_convolve(&w1, &sh);
        for &x in &[0.4, 1.5] {
            let z = C64::new(x, 0.5);
            let a = w2.eval(z);
            let b = w1.eval(z - 0.6);
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn bernoulli_convolution_is_arcsine() {
        let b = StieltjesFunction::bernoulli();
        let w = free_convolve(&b, &b);
        let dens = boundary_density(&w, 0.0);
        assert_abs_diff_eq!(dens, 1.0 / (2.0 * std::f64::consts::PI), epsilon = 1e-7);
        let dens = boundary_density(&w, 1.0);
        assert_abs_diff_eq!(
            dens,
            1.0 / (std::f64::consts::PI * 3.0f64.sqrt()),
            epsilon = 1e-6
        );
    }

    #[test]
    fn herglotz_preserved_by_convolution() {
        let b = StieltjesFunction::bernoulli();
        let s = StieltjesFunction::semicircle(0.5);
        let w = free_convolve(&b, &s);
        let mut rng = 0x9e3779b97f4a7c15u64;
        for _ in 0..200 {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((rng >> 11) as f64 / (1u64 << 53) as f64) * 8.0 - 4.0;
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let byi = ((rng >> 11) as f64 / (1u64 << 53) as f64) * 3.0 + 1e-3;
            let v = w.eval(C64::new(a, byi));
            assert!(v.im < 0.0, "Herglotz violated at {a}+{byi}i: {v}");
        }
    }

    fn q3_frame() -> EllipticFrame {
        solve_frame(&Couplings::cubic(3.0, 1, 7.0, 2.0)).unwrap()
    }

    #[test]
    fn g_transform_limiting_cases() {
        let fr = q3_frame();
        let z = CutPlanePoint::off_cut(C64::new(4.0, 0.0));
        let (wp, wm) = fr.wy_pair(z.x).unwrap();
        let g0 = g_transform(&fr, 0, 3.0, z).unwrap();
        assert!((g0 - wp).norm() < 1e-12);
        let gq = g_transform(&fr, 3, 3.0, z).unwrap();
        assert!((gq - (z.x - wm)).norm() < 1e-12);
        let x = 0.25 * fr.z_minus + 0.75 * fr.z_plus;
        let gp = g_transform(&fr, 1, 3.0, CutPlanePoint::real(x, Branch::Plus)).unwrap();
        let gqp = g_transform(&fr, 2, 3.0, CutPlanePoint::real(x, Branch::Minus)).unwrap();
        assert!((gp + gqp - C64::new(x, 0.0)).norm() < 1e-9, "{gp} + {gqp}");
    }

    #[test]
    fn g_inversion_roundtrip() {
        let fr = q3_frame();
        let mut inv = GpInverter::new(&fr, 1).unwrap();
        let hover = 0.35 * (fr.z_plus - fr.z_minus);
        inv.goto(C64::new(inv.zeta.re, hover)).unwrap();
        for &(x, y) in &[(3.0, 0.8), (1.5, 0.4), (0.2, 0.6)] {
            inv.goto(C64::new(x, y)).unwrap();
            let s = inv.s;
            let mut chk = GpInverter::new(&fr, 1).unwrap();
            chk.goto(C64::new(chk.zeta.re, hover)).unwrap();
            chk.goto(C64::new(x, y)).unwrap();
            assert!((chk.s - s).norm() < 1e-9);
            assert!((chk.zeta - C64::new(x, y)).norm() < 1e-11);
        }
    }

    #[test]
    fn rho_1_mass_is_one() {
        let fr = q3_frame();
        let n = 160;
        let grid: Vec<f64> = (0..=n).map(|i| -2.5 + 5.0 * i as f64 / n as f64).collect();
        let d = rho_p(&fr, 1, 3.0, &grid).unwrap();
        assert!(d.values.iter().all(|&v| v >= 0.0));
        let mass = d.mass();
        assert!((mass - 1.0).abs() < 5e-3, "mass {mass}");
    }

    #[test]
    fn self_duality_even_q() {
        let fr = solve_frame(&Couplings::cubic(2.0, 1, 7.0, 2.0)).unwrap();
        let x = 0.5 * (fr.z_minus + fr.z_plus);
        let gp = g_transform(&fr, 1, 2.0, CutPlanePoint::real(x, Branch::Plus)).unwrap();
        let gm = g_transform(&fr, 1, 2.0, CutPlanePoint::real(x, Branch::Minus)).unwrap();
        assert!((gp + gm - C64::new(x, 0.0)).norm() < 1e-9);
    }
}
