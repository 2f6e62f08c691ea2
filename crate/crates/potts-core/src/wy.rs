//! The elliptic frame for the fiducial-matrix spectrum: solve for the
//! support endpoints (z-, z+), the auxiliary branch point delta_U and the
//! basis coefficients so that W_Y has unit 1/z tail, unit mass and the
//! correct auxiliary-resolvent structure, then evaluate W_Y and rho_Y.
//!
//! The boundary-value problem is Re f_s(w) = cos(pi nu) f_s(-w) on
//! [w-, w+] with nu = arccos((q-2)/2)/pi and w = sqrt(z - delta_U);
//! W_Y(z) = (q t2/t3 + 2z)/(4-q) - f_s(w) - f_s(-w).

use crate::auxbvp::TwoCutFrame;
use crate::error::CoreError;
use crate::numerics::{newton_fd, solve_complex, C64};
use crate::specfun::chebyshev::{Branch, CutPlanePoint};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// External field parameter of the fiducial-matrix representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FieldH {
    Finite(f64),
    Infinite,
}

/// Model parameters: the input record for every solver.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Couplings {
    /// Number of states (continued to real values).
    pub q: f64,
    /// Colours allowed on the boundary.
    pub p: usize,
    /// Potential degree minus two (k = 1 is cubic).
    pub k: usize,
    /// Couplings t_2 .. t_{k+2}.
    pub t: Vec<f64>,
    /// Interaction scale in [0, 1].
    pub lambda: f64,
    /// Field of the two-sided representation.
    pub h: FieldH,
}

impl Couplings {
    pub fn cubic(q: f64, p: usize, t2: f64, t3: f64) -> Self {
        Self { q, p, k: 1, t: vec![t2, t3], lambda: 1.0, h: FieldH::Infinite }
    }

    pub fn quartic(q: f64, p: usize, t2: f64, t3: f64, t4: f64) -> Self {
        Self { q, p, k: 2, t: vec![t2, t3, t4], lambda: 1.0, h: FieldH::Infinite }
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if self.t.len() != self.k + 1 {
            return Err(CoreError::Domain(format!(
                "expected t_2..t_{} ({} couplings), got {}",
                self.k + 2,
                self.k + 1,
                self.t.len()
            )));
        }
        if self.t[self.k].abs() < 1e-14 {
            return Err(CoreError::Domain("leading coupling t_{k+2} must be nonzero".into()));
        }
        if !(self.q > 0.0) {
            return Err(CoreError::Domain(format!("q = {} must be positive", self.q)));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(CoreError::Domain(format!("lambda = {} outside [0,1]", self.lambda)));
        }
        Ok(())
    }

    pub fn t2(&self) -> f64 {
        self.t[0]
    }

    pub fn t3(&self) -> f64 {
        self.t[1]
    }
}

/// nu = arccos((q-2)/2)/pi on (0,1); the q = 0 and q = 4 ends are rejected.
pub fn nu_of_q(q: f64) -> Result<f64, CoreError> {
    if !(0.0 < q && q < 4.0) {
        return Err(CoreError::Domain(format!("q = {q} outside (0,4)")));
    }
    Ok(((q - 2.0) / 2.0).acos() / PI)
}

/// Spectral density data on a grid: support, abscissae, nonnegative values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub support: Vec<(f64, f64)>,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl DensityEstimate {
    /// Trapezoidal mass of the tabulated density.
    pub fn mass(&self) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.grid.len() {
            acc += 0.5 * (self.values[i] + self.values[i - 1]) * (self.grid[i] - self.grid[i - 1]);
        }
        acc
    }

    /// n-th moment by the trapezoid rule.
    pub fn moment(&self, n: u32) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.grid.len() {
            let f0 = self.values[i - 1] * self.grid[i - 1].powi(n as i32);
            let f1 = self.values[i] * self.grid[i].powi(n as i32);
            acc += 0.5 * (f0 + f1) * (self.grid[i] - self.grid[i - 1]);
        }
        acc
    }
}

/// Solved state: endpoints, branch point, torus frame and coefficients.
#[derive(Debug, Clone)]
pub struct EllipticFrame {
    pub q: f64,
    pub t2: f64,
    pub t3: f64,
    pub nu: f64,
    pub z_minus: f64,
    pub z_plus: f64,
    pub delta_u: f64,
    pub frame: TwoCutFrame,
    /// Basis coefficients f_n (n = 0,1,2) of the homogeneous solution.
    pub coeffs: Vec<C64>,
    /// Final max-norm residual of the solve conditions.
    pub residual: f64,
}

const CONTOUR_POINTS: usize = 96;
const CONTOUR_FACTOR: f64 = 2.5;

/// Laurent data of the basis elements B_n on |w| = R: coefficients of
/// w^3..w^-2 for each of B_0, B_1, B_2.
struct BasisLaurent {
    rows: [[C64; 6]; 3],
}

fn basis_laurent(frame: &TwoCutFrame, nu: f64) -> Result<BasisLaurent, CoreError> {
    let r = CONTOUR_FACTOR * frame.beta;
    let m = CONTOUR_POINTS;
    let mut rows = [[C64::new(0.0, 0.0); 6]; 3];
    let mut seed: Option<C64> = None;
    for j in 0..m {
        let th = 2.0 * PI * j as f64 / m as f64;
        let w = C64::from_polar(r, th);
        let sig = frame.sigma_of_w_inner(w, seed)?;
        seed = Some(sig);
        let b = frame.basis(sig, nu, 2);
        for (n, bn) in b.iter().enumerate() {
            for (ki, &k) in [3i32, 2, 1, 0, -1, -2].iter().enumerate() {
                let phase = C64::from_polar(r.powi(-k), -k as f64 * th);
                rows[n][ki] += bn * phase;
            }
        }
    }
    for row in rows.iter_mut() {
        for v in row.iter_mut() {
            *v /= m as f64;
        }
    }
    Ok(BasisLaurent { rows })
}

struct FrameEval {
    frame: TwoCutFrame,
    coeffs: Vec<C64>,
    fs_laurent: [C64; 6],
}

fn eval_candidate(
    q: f64,
    t3: f64,
    nu: f64,
    zm: f64,
    zp: f64,
    du: f64,
) -> Result<FrameEval, CoreError> {
    let alpha = (zm - du).sqrt();
    let beta = (zp - du).sqrt();
    let frame = TwoCutFrame::new(alpha, beta)?;
    let bl = basis_laurent(&frame, nu)?;
    // coefficients from the w^3, w^2, w^1 Laurent orders of f_s:
    //   [w^3] = 0, [w^2] = 1/(4-q), [w^1] = -1/sqrt(t3)
    let a_mat: Vec<Vec<C64>> = (0..3)
        .map(|ki| (0..3).map(|n| bl.rows[n][ki]).collect())
        .collect();
    let rhs = vec![
        C64::new(0.0, 0.0),
        C64::new(1.0 / (4.0 - q), 0.0),
        C64::new(-1.0 / t3.sqrt(), 0.0),
    ];
    let coeffs = solve_complex(a_mat, rhs)
        .ok_or_else(|| CoreError::Solver("singular basis system".into()))?;
    let mut fs = [C64::new(0.0, 0.0); 6];
    for ki in 0..6 {
        for n in 0..3 {
            fs[ki] += coeffs[n] * bl.rows[n][ki];
        }
    }
    Ok(FrameEval { frame, coeffs, fs_laurent: fs })
}

fn residuals(q: f64, t2: f64, t3: f64, nu: f64, x: &[f64]) -> Option<Vec<f64>> {
    let (zm, zp, du) = (x[0], x[1], x[2]);
    let ev = eval_candidate(q, t3, nu, zm, zp, du).ok()?;
    let fs = &ev.fs_laurent;
    // [w^0] f_s matches the particular solution's constant
    let r4 = fs[3].re - q * t2 / (2.0 * t3 * (4.0 - q)) - du / (4.0 - q);
    // unit mass: [w^-2] f_s = -1/2
    let r5 = fs[5].re + 0.5;
    // branch-point condition of the auxiliary resolvent:
    //   t2^2/(4 t3) + delta_U = sqrt(t3) Int rho_Y(z)/sqrt(z - delta_U) dz,
    // the integral being -2 [w^-1] f_s
    let r6 = t2 * t2 / (4.0 * t3) + du + 2.0 * t3.sqrt() * fs[4].re;
    Some(vec![r4, r5, r6])
}

/// Solve the elliptic frame for cubic couplings in the one-cut phase.
/// Continuation in t3 from a near-Gaussian anchor; Newton on
/// (z-, z+, delta_U) with the basis coefficients from an inner linear solve.
pub fn solve_frame(c: &Couplings) -> Result<EllipticFrame, CoreError> {
    c.validate()?;
    if c.k != 1 {
        return Err(CoreError::Domain(
            "the elliptic frame is solved for cubic potentials (k = 1) only".into(),
        ));
    }
    let q = c.q;
    let nu = nu_of_q(q)?;
    let (t2, t3_target) = (c.t2(), c.t3());
    let t3_abs = t3_target.abs();
    if t2 <= q {
        return Err(CoreError::Solver(format!(
            "t2 = {t2} <= q = {q}: Gaussian sector unstable, outside the one-cut phase"
        )));
    }
    // t3 -> -t3 reflects the spectrum; solve on the positive representative
    let anchor = (0.05 * t2).min(t3_abs);
    let var = t2 / (t2 - q);
    let mut x = vec![
        -2.0 * var.sqrt(),
        2.0 * var.sqrt(),
        -t2 * t2 / (4.0 * anchor) + 2.0 * anchor / t2,
    ];
    let mut t3 = anchor;
    let mut step = ((t3_abs - anchor).max(0.0) / 4.0).max(1e-3);
    let guard = |v: &[f64]| v[1] - v[0] > 1e-10 && v[0] - v[2] > 1e-10;
    loop {
        let f = |v: &[f64]| residuals(q, t2, t3, nu, v);
        match newton_fd(f, guard, &x, 1e-12, 60) {
            Ok((sol, _)) => {
                x = sol;
                if (t3 - t3_abs).abs() < 1e-14 {
                    break;
                }
                t3 = (t3 + step).min(t3_abs);
            }
            Err(e) => {
                step *= 0.5;
                t3 = (t3 - step).max(anchor);
                if step < 1e-5 * t3_abs.max(1.0) {
                    return Err(CoreError::Solver(format!(
                        "one-cut continuation failed near t3 = {t3}: {e} (phase-boundary breach?)"
                    )));
                }
            }
        }
    }
    let f = |v: &[f64]| residuals(q, t2, t3_abs, nu, v);
    let (sol, res) = newton_fd(f, guard, &x, 1e-12, 60)
        .map_err(|e| CoreError::Solver(format!("final polish failed: {e}")))?;
    let ev = eval_candidate(q, t3_abs, nu, sol[0], sol[1], sol[2])?;
    let out = EllipticFrame {
        q,
        t2,
        t3: t3_target,
        nu,
        z_minus: sol[0],
        z_plus: sol[1],
        delta_u: sol[2],
        frame: ev.frame,
        coeffs: ev.coeffs,
        residual: res,
    };
    // reject negative density beyond tolerance: phase validity check
    let grid: Vec<f64> = (1..40)
        .map(|i| out.z_minus + (out.z_plus - out.z_minus) * i as f64 / 40.0)
        .collect();
    let dens = rho_y_positive_t3(&out, &grid)?;
    if dens.values.iter().any(|&v| v < -1e-9) {
        return Err(CoreError::Solver(
            "negative density: outside the one-cut phase".into(),
        ));
    }
    Ok(out)
}

impl EllipticFrame {
    /// Scaling parameter z- - delta_U (vanishes at criticality).
    pub fn epsilon(&self) -> f64 {
        self.z_minus - self.delta_u
    }

    /// The homogeneous solution F_s lifted to the torus coordinate.
    pub fn fs_sigma(&self, sigma: C64) -> C64 {
        let b = self.frame.basis(self.frame.reduce_tau(sigma), self.nu, 2);
        self.coeffs.iter().zip(&b).map(|(a, v)| a * v).sum()
    }

    /// Polynomial part (q t2/t3 + 2z)/(4-q) of W_Y.
    pub fn poly_part(&self, z: C64) -> C64 {
        (self.q * self.t2 / self.t3.abs() + 2.0 * z) / (4.0 - self.q)
    }

    /// Particular solution f_r(w) of the inhomogeneous boundary equation.
    pub fn f_r(&self, w: C64) -> C64 {
        let t3 = self.t3.abs();
        self.q * self.t2 / (2.0 * t3 * (4.0 - self.q)) - w / t3.sqrt()
            + (self.delta_u + w * w) / (4.0 - self.q)
    }

    /// Physical and second-sheet values of W_Y near the real axis (the
    /// second sheet is the continuation through the cut [z-, z+]).
    pub fn wy_pair(&self, z: C64) -> Result<(C64, C64), CoreError> {
        let w = (z - self.delta_u).sqrt();
        let s1 = self.frame.sigma_of_w_inner(w, None)?;
        let s2 = self.frame.sigma_of_w_inner(-w, None)?;
        let s1r = self.frame.reduce_tau(-s1);
        let p = self.poly_part(z);
        let wi = p - self.fs_sigma(s1) - self.fs_sigma(s2);
        let wii = p - self.fs_sigma(s1r) - self.fs_sigma(s2);
        Ok((wi, wii))
    }

    /// W_Y on the physical sheet; on the cut the branch tag selects the side.
    pub fn eval_wy(&self, z: CutPlanePoint) -> Result<C64, CoreError> {
        if (z.x - self.delta_u).norm() < 1e-12 {
            return Err(CoreError::Domain(
                "z = delta_U is the auxiliary branch point".into(),
            ));
        }
        let zc = z.x;
        let on_cut = zc.im == 0.0 && zc.re >= self.z_minus && zc.re <= self.z_plus;
        if !on_cut {
            let w = (zc - self.delta_u).sqrt();
            let s1 = self.frame.sigma_of_w_inner(w, None)?;
            let s2 = self.frame.sigma_of_w_inner(-w, None)?;
            return Ok(self.poly_part(zc) - self.fs_sigma(s1) - self.fs_sigma(s2));
        }
        let w = (zc.re - self.delta_u).sqrt();
        let s1 = self.frame.sigma_of_w(CutPlanePoint::real(w, z.branch))?;
        // f_s is continuous across the mirror cut; evaluate from one side
        let s2 = self.frame.sigma_of_w(CutPlanePoint::real(-w, Branch::Plus))?;
        Ok(self.poly_part(zc) - self.fs_sigma(s1) - self.fs_sigma(s2))
    }

    /// Density of Y on a grid inside the support.
    pub fn rho_y(&self, grid: &[f64]) -> Result<DensityEstimate, CoreError> {
        if self.t3 >= 0.0 {
            return rho_y_positive_t3(self, grid);
        }
        // cubic reflection: rho_{-t3}(z) = rho_{t3}(-z)
        let mirrored: Vec<f64> = grid.iter().map(|&z| -z).collect();
        let inner = rho_y_positive_t3(self, &mirrored)?;
        Ok(DensityEstimate {
            support: vec![(-self.z_plus, -self.z_minus)],
            grid: grid.to_vec(),
            values: inner.values,
        })
    }

    /// Support of rho_Y in external coordinates (reflected for t3 < 0).
    pub fn support(&self) -> (f64, f64) {
        if self.t3 < 0.0 {
            (-self.z_plus, -self.z_minus)
        } else {
            (self.z_minus, self.z_plus)
        }
    }
}

fn rho_y_positive_t3(fr: &EllipticFrame, grid: &[f64]) -> Result<DensityEstimate, CoreError> {
    let mut values = Vec::with_capacity(grid.len());
    for &z in grid {
        if z <= fr.z_minus || z >= fr.z_plus {
            values.push(0.0);
            continue;
        }
        let w = (z - fr.delta_u).sqrt();
        let sp = fr.frame.sigma_of_w(CutPlanePoint::real(w, Branch::Plus))?;
        let sm = fr.frame.sigma_of_w(CutPlanePoint::real(w, Branch::Minus))?;
        let jump = (fr.fs_sigma(sp) - fr.fs_sigma(sm)) / C64::new(0.0, 2.0 * PI);
        values.push(jump.re);
    }
    Ok(DensityEstimate {
        support: vec![(fr.z_minus, fr.z_plus)],
        grid: grid.to_vec(),
        values,
    })
}

/// Branch-tracking state for global continuation of (W_I, W_II) along
/// z-paths: three sigma-lifts of the same z-path.
#[derive(Debug, Clone)]
pub struct BranchState {
    pub z: C64,
    w: C64,
    sig1: C64,
    sig1r: C64,
    sig2: C64,
}

impl EllipticFrame {
    /// Anchor the branch pair just above the middle of the physical cut.
    pub fn anchor(&self) -> Result<BranchState, CoreError> {
        let z0 = C64::new(
            0.5 * (self.z_minus + self.z_plus),
            1e-3 * (self.z_plus - self.z_minus),
        );
        let w0 = (z0 - self.delta_u).sqrt();
        let s1 = self.frame.sigma_of_w_inner(w0, None)?;
        let s2 = self.frame.sigma_of_w_inner(-w0, None)?;
        let s1r = self.frame.reduce_tau(-s1);
        Ok(BranchState { z: z0, w: w0, sig1: s1, sig1r: s1r, sig2: s2 })
    }

    /// Current sigma-lifts, for callers layering further continuation.
    pub fn branch_sigmas(&self, st: &BranchState) -> (C64, C64, C64) {
        (st.sig1, st.sig1r, st.sig2)
    }

    /// Continue the branch state to a new z along the straight segment.
    pub fn branch_goto(&self, st: &mut BranchState, z_new: C64) -> Result<(), CoreError> {
        let hop_scale = 0.2 * self.frame.beta;
        let w_end_raw = (z_new - self.delta_u).sqrt();
        let w_end = if (w_end_raw - st.w).norm() <= (-w_end_raw - st.w).norm() {
            w_end_raw
        } else {
            -w_end_raw
        };
        let nsub = ((w_end - st.w).norm() / hop_scale).ceil().max(1.0) as usize;
        let (z_prev, mut w_prev) = (st.z, st.w);
        for i in 1..=nsub {
            let f = i as f64 / nsub as f64;
            let z_i = z_prev + (z_new - z_prev) * f;
            let w_raw = (z_i - self.delta_u).sqrt();
            let w_i = if (w_raw - w_prev).norm() <= (-w_raw - w_prev).norm() {
                w_raw
            } else {
                -w_raw
            };
            st.sig1 = self.frame.lift_w_step(st.sig1, w_prev, w_i)?;
            st.sig1r = self.frame.lift_w_step(st.sig1r, w_prev, w_i)?;
            st.sig2 = self.frame.lift_w_step(st.sig2, -w_prev, -w_i)?;
            w_prev = w_i;
        }
        st.w = w_prev;
        st.z = z_new;
        Ok(())
    }

    /// (W_I, W_II) at the tracker's current point.
    pub fn branch_values(&self, st: &BranchState) -> (C64, C64) {
        let p = self.poly_part(st.z);
        let f1 = self.fs_sigma(st.sig1);
        let f1r = self.fs_sigma(st.sig1r);
        let f2 = self.fs_sigma(st.sig2);
        (p - f1 - f2, p - f1r - f2)
    }
}
