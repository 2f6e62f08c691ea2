//! Torus coordinate for the two-cut plane, the g building block, and the
//! general solution of the linear boundary-value problem
//! Re f(w) = cos(pi nu) f(-w) on w in [alpha, beta], plus its Chebyshev
//! scaling form for alpha/beta -> 0.
//!
//! The cut plane C \ [+-alpha, +-beta] maps bijectively onto the rectangle
//! sigma in (0,1) x [0, tau) via w(sigma) = sqrt(alpha beta)
//! theta2(pi sigma)/theta3(pi sigma); the solution space of the boundary
//! problem is spanned by derivative ladders of
//! g(sigma; nu) = pi (theta1'(0)/theta1(pi nu tau/2))
//!               theta1(pi sigma + pi nu tau/2)/theta1(pi sigma) e^{i pi nu sigma},
//! normalized to a simple pole of unit residue at sigma = 0.

use crate::error::CoreError;
use crate::numerics::C64;
use crate::specfun::chebyshev::{cheb_t, cheb_u, Branch, CutPlanePoint};
use crate::specfun::elliptic::{elliptic_k, elliptic_kprime};
use crate::specfun::theta::{theta_derivs_any, ModularParameter};
use std::f64::consts::PI;

/// Elliptic frame for a symmetric two-cut geometry 0 < alpha < beta.
#[derive(Debug, Clone)]
pub struct TwoCutFrame {
    pub alpha: f64,
    pub beta: f64,
    pub big_k: f64,
    pub big_k_prime: f64,
    pub tau: ModularParameter,
    sab: f64,
}

impl TwoCutFrame {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, CoreError> {
        if !(alpha > 0.0 && beta > alpha) {
            return Err(CoreError::Domain(format!(
                "need 0 < alpha < beta, got ({alpha}, {beta})"
            )));
        }
        let k = alpha / beta;
        let big_k = elliptic_k(k)?;
        let big_k_prime = elliptic_kprime(k)?;
        let tau = ModularParameter::from_periods(big_k_prime, big_k)?;
        Ok(Self {
            alpha,
            beta,
            big_k,
            big_k_prime,
            tau,
            sab: (alpha * beta).sqrt(),
        })
    }

    /// Height of the fundamental rectangle, Im tau.
    pub fn t_im(&self) -> f64 {
        self.tau.im()
    }

    /// The image of w = infinity, sigma0 = (tau + 1)/2.
    pub fn sigma0(&self) -> C64 {
        (self.tau.tau() + 1.0) / 2.0
    }

    /// w(sigma) = sqrt(alpha beta) theta2(pi sigma)/theta3(pi sigma).
    pub fn w_of_sigma(&self, sigma: C64) -> C64 {
        let u = PI * sigma;
        let t2 = theta_derivs_any(2, u, &self.tau, 0)[0];
        let t3 = theta_derivs_any(3, u, &self.tau, 0)[0];
        self.sab * t2 / t3
    }

    /// w(sigma) together with dw/dsigma.
    pub fn w_of_sigma_d(&self, sigma: C64) -> (C64, C64) {
        let u = PI * sigma;
        let t2 = theta_derivs_any(2, u, &self.tau, 1);
        let t3 = theta_derivs_any(3, u, &self.tau, 1);
        let w = self.sab * t2[0] / t3[0];
        let dw = self.sab * PI * (t2[1] * t3[0] - t2[0] * t3[1]) / (t3[0] * t3[0]);
        (w, dw)
    }

    /// Reduce Im(sigma) into [0, T) by tau-shifts. Both w(sigma) and the
    /// assembled solutions are tau-periodic, so this is value-preserving.
    pub fn reduce_tau(&self, sigma: C64) -> C64 {
        let t = self.t_im();
        let n = (sigma.im / t).floor();
        sigma - self.tau.tau() * n
    }

    /// Inverse of w_of_sigma on the fundamental domain (0,1) x [0,tau).
    /// Points on a cut must carry a branch tag; bare cut points are rejected.
    pub fn sigma_of_w(&self, w: CutPlanePoint) -> Result<C64, CoreError> {
        let on_cut = w.x.im == 0.0 && w.x.re.abs() >= self.alpha && w.x.re.abs() <= self.beta;
        let target = if on_cut {
            let eps = 1e-9 * self.beta;
            match w.branch {
                Branch::Plus => w.x + C64::new(0.0, eps),
                Branch::Minus => w.x - C64::new(0.0, eps),
            }
        } else {
            w.x
        };
        let mut sig = self.sigma_of_w_inner(target, None)?;
        if on_cut {
            // project onto the edge: the cut [alpha,beta] is the left edge
            // Re sigma = 0 (lower/upper half per side), the mirror cut sits
            // at Re sigma = 1
            if w.x.re > 0.0 {
                sig = C64::new(0.0, sig.im);
            } else {
                sig = C64::new(1.0, sig.im);
            }
            // re-polish on the edge
            for _ in 0..30 {
                let (wv, _) = self.w_of_sigma_d(sig);
                let dy = self.edge_newton_step(sig, w.x.re, wv);
                sig += C64::new(0.0, dy);
                if dy.abs() < 1e-15 {
                    break;
                }
            }
        }
        Ok(sig)
    }

    fn edge_newton_step(&self, sig: C64, target: f64, wv: C64) -> f64 {
        let h = 1e-7;
        let wp = self.w_of_sigma(sig + C64::new(0.0, h));
        let d = (wp.re - wv.re) / h;
        if d.abs() < 1e-300 {
            0.0
        } else {
            (target - wv.re) / d
        }
    }

    /// Newton inversion with an optional seed; result is reduced into the
    /// fundamental domain and matched against w (the reflection ambiguity is
    /// resolved by the value of w itself).
    pub fn sigma_of_w_inner(&self, w: C64, seed: Option<C64>) -> Result<C64, CoreError> {
        let t = self.t_im();
        let mut s = match seed {
            Some(s0) => s0,
            None => {
                let mut best = C64::new(0.5, 0.5 * t);
                let mut err = f64::INFINITY;
                let n = 28;
                for i in 1..n {
                    for j in 0..n {
                        let cand =
                            C64::new(i as f64 / n as f64, (j as f64 + 0.5) / n as f64 * t);
                        let e = (self.w_of_sigma(cand) - w).norm();
                        if e < err {
                            err = e;
                            best = cand;
                        }
                    }
                }
                best
            }
        };
        for _ in 0..80 {
            let (wv, dw) = self.w_of_sigma_d(s);
            if dw.norm() < 1e-280 {
                break;
            }
            let mut ds = (w - wv) / dw;
            if ds.norm() > 0.25 {
                ds *= 0.25 / ds.norm();
            }
            s += ds;
            if ds.norm() < 1e-15 {
                break;
            }
        }
        // canonical reduction into [0,1) x [0,T) with w-matching
        let mut best: Option<(f64, C64)> = None;
        for sign in [1.0, -1.0] {
            let base = s * sign;
            let mre = base.re.floor();
            let mim = (base.im / t).floor();
            for dm in 0..2 {
                for dn in 0..2 {
                    let cand = base
                        - C64::new(mre + dm as f64, 0.0)
                        - self.tau.tau() * (mim + dn as f64);
                    if (-1e-10..1.0 + 1e-10).contains(&cand.re)
                        && (-1e-10..t * (1.0 + 1e-10)).contains(&cand.im)
                    {
                        let e = (self.w_of_sigma(cand) - w).norm();
                        match best {
                            Some((eb, _)) if eb <= e => {}
                            _ => best = Some((e, cand)),
                        }
                    }
                }
            }
        }
        let (err, mut sig) = best.ok_or_else(|| {
            CoreError::Tracking("sigma reduction produced no candidate".into())
        })?;
        if err > 1e-6 * self.beta.max(w.norm()) {
            return Err(CoreError::Tracking(format!(
                "sigma_of_w did not converge: |w(sigma)-w| = {err:.3e}"
            )));
        }
        // final polish at the reduced representative
        for _ in 0..8 {
            let (wv, dw) = self.w_of_sigma_d(sig);
            if dw.norm() < 1e-280 {
                break;
            }
            sig += (w - wv) / dw;
        }
        Ok(sig)
    }

    /// Continue a sigma-lift of a w-path from w_prev to w_new with adaptive
    /// bisection (predictor-corrector; no modular re-basing so that branches
    /// are followed honestly).
    pub fn lift_w_step(&self, sigma_prev: C64, w_prev: C64, w_new: C64) -> Result<C64, CoreError> {
        let max_ds = 0.04;
        let mut stack = vec![(w_prev, w_new)];
        let mut s = sigma_prev;
        let mut guard = 0usize;
        while let Some((wa, wb)) = stack.pop() {
            guard += 1;
            if guard > 20000 {
                return Err(CoreError::Tracking("lift_w_step: too many subdivisions".into()));
            }
            let (_, dw) = self.w_of_sigma_d(self.reduce_tau(s));
            if dw.norm() < 1e-12 {
                return Err(CoreError::Tracking("lift_w_step: at a branch point".into()));
            }
            let pred = (wb - wa) / dw;
            let tiny = (wb - wa).norm() < 1e-14 * wb.norm().max(1.0);
            if pred.norm() > max_ds && !tiny {
                let mid = 0.5 * (wa + wb);
                stack.push((mid, wb));
                stack.push((wa, mid));
                continue;
            }
            let mut st = s + pred;
            let mut ok = false;
            for _ in 0..40 {
                let sr = self.reduce_tau(st);
                let (wv, dwv) = self.w_of_sigma_d(sr);
                if dwv.norm() < 1e-280 {
                    break;
                }
                let ds = (wb - wv) / dwv;
                st += ds;
                if ds.norm() < 1e-14 * st.norm().max(1.0) {
                    ok = true;
                    break;
                }
            }
            if !ok || (st - s).norm() > 3.0 * max_ds + 1e-9 {
                if tiny {
                    return Err(CoreError::Tracking("lift_w_step: stuck".into()));
                }
                let mid = 0.5 * (wa + wb);
                stack.push((mid, wb));
                stack.push((wa, mid));
                continue;
            }
            s = st;
        }
        Ok(self.reduce_tau(s))
    }

    /// Derivatives of g(x; nu) with respect to x, orders 0..=order, from the
    /// analytically differentiated theta series.
    pub fn g_derivs(&self, x: C64, nu: f64, order: usize) -> Vec<C64> {
        let tau = &self.tau;
        let c = PI * nu * tau.tau() / 2.0;
        let pref = PI * theta_derivs_any(1, C64::new(0.0, 0.0), tau, 1)[1]
            / theta_derivs_any(1, c, tau, 0)[0];
        let un = PI * x + c;
        let ud = PI * x;
        let nd = theta_derivs_any(1, un, tau, order);
        let dd = theta_derivs_any(1, ud, tau, order);
        // chain: d/dx = pi d/du
        let mut nv: Vec<C64> = nd
            .iter()
            .enumerate()
            .map(|(m, v)| v * PI.powi(m as i32))
            .collect();
        let dv: Vec<C64> = dd
            .iter()
            .enumerate()
            .map(|(m, v)| v * PI.powi(m as i32))
            .collect();
        // ratio derivatives r = N/D via the quotient recurrence
        let mut r = vec![C64::new(0.0, 0.0); order + 1];
        r[0] = nv[0] / dv[0];
        for m in 1..=order {
            let mut acc = nv[m];
            for k in 0..m {
                acc -= binom(m, k) as f64 * r[k] * dv[m - k];
            }
            r[m] = acc / dv[0];
        }
        // multiply by e^{i pi nu x} (Leibniz with constant log-derivative)
        let lam = C64::new(0.0, PI * nu);
        let e = (lam * x).exp();
        let mut out = vec![C64::new(0.0, 0.0); order + 1];
        for m in 0..=order {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..=m {
                acc += binom(m, k) as f64 * r[k] * lam.powu((m - k) as u32);
            }
            out[m] = pref * e * acc;
        }
        nv.clear();
        out
    }

    /// g(sigma; nu) itself; the pole at sigma = 0 mod the lattice is signalled.
    pub fn g_function(&self, sigma: C64, nu: f64) -> Result<C64, CoreError> {
        let red = self.reduce_tau(sigma);
        let frac = red.re - red.re.round();
        if frac.abs() < 1e-12 && (red.im < 1e-12 || red.im > self.t_im() - 1e-12) {
            return Err(CoreError::Domain(
                "g has a pole at sigma = 0 mod the lattice".into(),
            ));
        }
        Ok(self.g_derivs(sigma, nu, 0)[0])
    }

    /// Basis element values B_0..B_nmax at sigma:
    /// B_n = ((-1)^n/n!) [e^{-i pi nu/2} g^{(n)}(x;nu) + (-1)^{n+1} e^{i pi nu/2} g^{(n)}(x;-nu)],
    /// x = sigma - sigma0. The phase pair alternates with n so that every
    /// element satisfies the reflection identity f(w(1+s)) = f(w(1-s)).
    pub fn basis(&self, sigma: C64, nu: f64, nmax: usize) -> Vec<C64> {
        let x = sigma - self.sigma0();
        let gp = self.g_derivs(x, nu, nmax);
        let gm = self.g_derivs(x, -nu, nmax);
        let ep = (C64::new(0.0, -PI * nu / 2.0)).exp();
        let em = (C64::new(0.0, PI * nu / 2.0)).exp();
        let mut out = Vec::with_capacity(nmax + 1);
        let mut fact = 1.0f64;
        for n in 0..=nmax {
            if n > 0 {
                fact *= n as f64;
            }
            let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
            let pair = if n % 2 == 0 { -1.0 } else { 1.0 };
            out.push(sgn / fact * (ep * gp[n] + pair * em * gm[n]));
        }
        out
    }
}

fn binom(n: usize, k: usize) -> u64 {
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// A solved boundary-value problem: frame, exponent and basis coefficients.
#[derive(Debug, Clone)]
pub struct BvpSolution {
    pub frame: TwoCutFrame,
    pub nu: f64,
    /// Coefficients a_n of the basis elements B_n.
    pub coeffs: Vec<C64>,
}

impl BvpSolution {
    pub fn new(frame: TwoCutFrame, nu: f64, coeffs: Vec<C64>) -> Result<Self, CoreError> {
        if !(0.0 < nu && nu < 1.0) {
            return Err(CoreError::Domain(format!(
                "nu = {nu} outside (0,1); the q = 0 and q = 4 ends are degenerate"
            )));
        }
        Ok(Self { frame, nu, coeffs })
    }

    /// Evaluate the lifted solution F(sigma) = sum a_n B_n(sigma).
    pub fn eval_sigma(&self, sigma: C64) -> C64 {
        let b = self
            .frame
            .basis(self.frame.reduce_tau(sigma), self.nu, self.coeffs.len() - 1);
        self.coeffs.iter().zip(&b).map(|(a, v)| a * v).sum()
    }

    /// Evaluate f(w) from the cut-plane side, honoring branch tags on the cut.
    pub fn eval_w(&self, w: CutPlanePoint) -> Result<C64, CoreError> {
        let sigma = self.frame.sigma_of_w(w)?;
        Ok(self.eval_sigma(sigma))
    }
}

/// Assemble f(w) = sum_n a_n B_n(sigma(w)) for the given solution.
pub fn assemble_solution(sol: &BvpSolution, w: CutPlanePoint) -> Result<C64, CoreError> {
    sol.eval_w(w)
}

/// One term of the alpha -> 0 scaling expansion.
#[derive(Debug, Clone, Copy)]
pub struct ScalingTerm {
    pub n: u32,
    /// Sign choice in the exponent 2n +- nu.
    pub plus: bool,
    /// Coefficient of T_{2n +- nu}.
    pub t: f64,
    /// Coefficient of U_{2n +- nu}.
    pub u: f64,
}

/// Evaluate sum_n alpha^{2n +- nu} (t T_{2n +- nu}(-w/alpha) + u U_{2n +- nu}(-w/alpha)).
pub fn scaling_expand(nu: f64, alpha: f64, terms: &[ScalingTerm], w_over_alpha: CutPlanePoint) -> C64 {
    let neg = CutPlanePoint {
        x: -w_over_alpha.x,
        // reflection swaps the side of the cut
        branch: match w_over_alpha.branch {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        },
    };
    let mut acc = C64::new(0.0, 0.0);
    for term in terms {
        let order = 2.0 * term.n as f64 + if term.plus { nu } else { -nu };
        let weight = alpha.powf(order);
        acc += weight * (term.t * cheb_t(order, neg) + term.u * cheb_u(order, neg));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn frame() -> TwoCutFrame {
        TwoCutFrame::new(0.8, 2.0).unwrap()
    }

    #[test]
    fn special_points_of_the_rectangle() {
        let fr = frame();
        // Fig-4 anchors: sigma = 1/2 -> 0, tau/2 -> beta, 0+ -> alpha
        assert!(fr.w_of_sigma(C64::new(0.5, 0.0)).norm() < 1e-12);
        let wb = fr.w_of_sigma(fr.tau.tau() / 2.0);
        assert_abs_diff_eq!(wb.re, fr.beta, epsilon = 1e-12);
        let wa = fr.w_of_sigma(C64::new(1e-9, 0.0));
        assert_abs_diff_eq!(wa.re, fr.alpha, epsilon = 1e-6);
    }

    #[test]
    fn w_lattice_symmetries() {
        let fr = frame();
        let s = C64::new(0.3, 0.2 * fr.t_im());
        let w = fr.w_of_sigma(s);
        assert!((fr.w_of_sigma(s + 1.0) + w).norm() < 1e-12);
        assert!((fr.w_of_sigma(s + fr.tau.tau()) - w).norm() < 1e-12);
    }

    #[test]
    fn sigma_inversion_roundtrip() {
        let fr = frame();
        let s = C64::new(0.31, 0.27 * fr.t_im());
        let w = fr.w_of_sigma(s);
        let s2 = fr.sigma_of_w(CutPlanePoint::off_cut(w)).unwrap();
        assert!((s2 - s).norm() < 1e-11, "{s2} vs {s}");
    }

    #[test]
    fn scaling_limit_of_w() {
        // lim alpha/beta -> 0 of w(sigma)/alpha = cos(pi sigma)
        let s = C64::new(0.25, 0.0);
        for &(a, tol) in &[(1e-3, 1e-5), (1e-5, 5e-10)] {
            let fr = TwoCutFrame::new(a, 1.0).unwrap();
            let v = fr.w_of_sigma(s) / a;
            assert!(
                (v - (PI * s).cos()).norm() < tol,
                "alpha={a}: {v}"
            );
        }
    }

    #[test]
    fn g_kernel_residue_zero_and_limit() {
        let fr = frame();
        let nu = 1.0 / 3.0;
        let s = C64::new(0.23, 0.31);
        // kernel property
        let ratio = fr.g_function(s + 1.0, nu).unwrap() / fr.g_function(s, nu).unwrap();
        assert!((ratio - C64::new(0.0, PI * nu).exp()).norm() < 1e-12);
        // unit residue at sigma = 0
        for &eps in &[1e-5, 1e-6] {
            let v = fr.g_function(C64::new(eps, 0.0), nu).unwrap() * eps;
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-4);
        }
        // simple zero at -nu tau/2
        let z = fr.g_function(-nu * fr.tau.tau() / 2.0 + 1e-30, nu);
        assert!(z.unwrap().norm() < 1e-12);
        // pole detection
        assert!(fr.g_function(C64::new(0.0, 0.0), nu).is_err());
        // tau -> i inf limit: pi e^{i pi (nu-1) sigma}/sin(pi sigma)
        let s0 = C64::new(0.2, 0.0);
        let fr_deep = TwoCutFrame::new(1e-9, 1.0).unwrap();
        let g = fr_deep.g_function(s0, nu).unwrap();
        let lim = PI * (C64::new(0.0, PI * (nu - 1.0)) * s0).exp() / (PI * s0).sin();
        assert!((g - lim).norm() < 1e-5, "{g} vs {lim}");
    }

    #[test]
    fn derivative_normalization_at_the_pole() {
        // lim (sigma-sigma0)^{n+1} (1/n!) d^n/d sigma0^n g(sigma-sigma0) = 1
        let fr = frame();
        let nu = 0.4;
        for n in 0..3usize {
            let x = C64::new(0.004, 0.003);
            let g = fr.g_derivs(x, nu, n);
            // (1/n!) d^n/d sigma0^n g(sigma - sigma0) = ((-1)^n/n!) g^{(n)}(x)
            let mut fact = 1.0;
            for i in 1..=n {
                fact *= i as f64;
            }
            let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
            let v = sgn / fact * g[n] * x.powu(n as u32 + 1);
            assert!(
                (v - C64::new(1.0, 0.0)).norm() < 2e-2,
                "n={n}: {v}"
            );
        }
    }

    #[test]
    fn assembled_solution_boundary_identities() {
        let fr = frame();
        let nu = 1.0 / 3.0;
        let sol = BvpSolution::new(
            fr,
            nu,
            vec![C64::new(0.7, 0.0), C64::new(-0.3, 0.0), C64::new(0.2, 0.0)],
        )
        .unwrap();
        let s = C64::new(0.37, 0.11);
        let tau = sol.frame.tau.tau();
        // (period), (refl), (spe-ell)
        let f = |sig: C64| sol.eval_sigma(sig);
        assert!((f(tau + s) - f(s)).norm() < 1e-11);
        assert!((f(1.0 + s) - f(1.0 - s)).norm() < 1e-11);
        let lhs = 2.0 * (PI * nu).cos() * f(1.0 + s);
        assert!((lhs - f(s) - f(2.0 + s)).norm() < 1e-11);
        // kernel identities: (e^{-d} - e^{i pi nu})(e^{-d} - e^{-i pi nu}) F = 0
        let comb = f(s - 2.0) - 2.0 * (PI * nu).cos() * f(s - 1.0) + f(s);
        assert!(comb.norm() < 1e-11);
    }

    #[test]
    fn linear_equation_on_the_cut() {
        // PV form: (f(w+i0)+f(w-i0))/2 = cos(pi nu) f(-w) for w in (alpha,beta)
        let fr = frame();
        let nu = 0.5;
        let sol = BvpSolution::new(fr, nu, vec![C64::new(1.0, 0.0)]).unwrap();
        for &wt in &[0.85, 1.0, 1.3, 1.7, 1.95] {
            let fp = sol
                .eval_w(CutPlanePoint::real(wt, Branch::Plus))
                .unwrap();
            let fm = sol
                .eval_w(CutPlanePoint::real(wt, Branch::Minus))
                .unwrap();
            let fneg = sol.eval_w(CutPlanePoint::real(-wt, Branch::Plus)).unwrap();
            let res = (0.5 * (fp + fm) - (PI * nu).cos() * fneg).norm();
            assert!(res < 1e-10, "w={wt}: residual {res}");
        }
    }

    #[test]
    fn zero_coefficients_give_zero() {
        let fr = frame();
        let sol = BvpSolution::new(fr, 0.25, vec![C64::new(0.0, 0.0); 3]).unwrap();
        let v = sol
            .eval_w(CutPlanePoint::off_cut(C64::new(3.0, 1.0)))
            .unwrap();
        assert_eq!(v, C64::new(0.0, 0.0));
    }

    #[test]
    fn scaling_expansion_single_term_and_discontinuity() {
        let nu = 1.0 / 3.0;
        let alpha = 0.7;
        let terms = [ScalingTerm { n: 0, plus: true, t: 1.0, u: 0.0 }];
        // single t0+ term reduces to alpha^nu T_nu(-w/alpha)
        let p = CutPlanePoint::off_cut(C64::new(-0.4, 0.3));
        let v = scaling_expand(nu, alpha, &terms, p);
        let expect = alpha.powf(nu)
            * cheb_t(nu, CutPlanePoint::off_cut(C64::new(0.4, -0.3)));
        assert!((v - expect).norm() < 1e-13);

        // discontinuity across w/alpha in [1, inf) matches the Chebyshev jump
        // term by term; the plus side of w maps to the minus side of -w/alpha
        let terms2 = [
            ScalingTerm { n: 0, plus: true, t: 0.8, u: 0.3 },
            ScalingTerm { n: 1, plus: false, t: -0.4, u: 0.6 },
        ];
        let x = 1.9; // w/alpha on the scaled cut
        let vp = scaling_expand(nu, alpha, &terms2, CutPlanePoint::real(x, Branch::Plus));
        let vm = scaling_expand(nu, alpha, &terms2, CutPlanePoint::real(x, Branch::Minus));
        let mut expect = C64::new(0.0, 0.0);
        let a = (x + (x * x - 1.0).sqrt()).ln(); // arccosh(x)
        for term in &terms2 {
            let order = 2.0 * term.n as f64 + if term.plus { nu } else { -nu };
            let w = alpha.powf(order);
            // closed-form boundary jumps at argument -x:
            //   T(-x)_+ - T(-x)_- = 2i sin(pi mu) sinh(mu a)
            //   U(-x)_+ - U(-x)_- = 2i sin(pi mu) cosh((mu+1) a)/sinh(a)
            // and the w-plus side sees the minus side of -w/alpha
            let jt = -2.0 * C64::new(0.0, 1.0) * (PI * order).sin() * (order * a).sinh();
            let ju = -2.0 * C64::new(0.0, 1.0) * (PI * order).sin()
                * ((order + 1.0) * a).cosh()
                / a.sinh();
            expect += w * (term.t * jt + term.u * ju);
        }
        assert!(((vp - vm) - expect).norm() < 1e-10, "{:?}", vp - vm - expect);
    }

    #[test]
    fn scaling_exponent_ladder_in_log_slope() {
        // f(w) ~ (-w)^kappa with kappa restricted to 2n +- nu: a numeric
        // log-log slope fit of a single term recovers its exponent.
        let nu = 0.37;
        let alpha = 1.0;
        for (term, kappa) in [
            (ScalingTerm { n: 0, plus: true, t: 1.0, u: 0.0 }, nu),
            (ScalingTerm { n: 1, plus: false, t: 1.0, u: 0.0 }, 2.0 - nu),
            (ScalingTerm { n: 1, plus: true, t: 0.0, u: 1.0 }, 2.0 + nu),
        ] {
            let terms = [term];
            let mut pts = Vec::new();
            for &wv in &[-1e3, -1e4, -1e5] {
                let v = scaling_expand(nu, alpha, &terms, CutPlanePoint::real(wv, Branch::Plus));
                pts.push(((-wv) as f64, v.norm()));
            }
            let slope = ((pts[2].1 / pts[0].1).ln()) / ((pts[2].0 / pts[0].0).ln());
            assert!((slope - kappa).abs() < 1e-3, "slope {slope} vs {kappa}");
        }
    }
}
