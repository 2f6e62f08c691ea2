//! Small numerical kernels shared across the crate: complex linear solves,
//! polynomial root finding, damped Newton iteration and quadrature.

use num_complex::Complex64;

pub type C64 = Complex64;

/// Solve A x = b for complex A (n x n, row-major) by Gaussian elimination
/// with partial pivoting. A and b are consumed.
pub fn solve_complex(mut a: Vec<Vec<C64>>, mut b: Vec<C64>) -> Option<Vec<C64>> {
    let n = b.len();
    for k in 0..n {
        let (piv, &max) = a
            .iter()
            .enumerate()
            .skip(k)
            .map(|(i, row)| (i, &row[k]))
            .max_by(|x, y| x.1.norm().partial_cmp(&y.1.norm()).unwrap())?;
        if max.norm() < 1e-300 {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                let akj = a[k][j];
                a[i][j] -= f * akj;
            }
            let bk = b[k];
            b[i] -= f * bk;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

/// Solve the real system A x = b (dense, small) by partial-pivot elimination.
pub fn solve_real(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let ac: Vec<Vec<C64>> = a
        .iter()
        .map(|r| r.iter().map(|&v| C64::new(v, 0.0)).collect())
        .collect();
    let bc: Vec<C64> = b.iter().map(|&v| C64::new(v, 0.0)).collect();
    solve_complex(ac, bc).map(|x| x.into_iter().map(|v| v.re).collect())
}

/// Least-squares solution of an overdetermined complex system via normal
/// equations with row scaling (adequate for the well-conditioned fits here).
pub fn lstsq_complex(a: &[Vec<C64>], b: &[C64]) -> Option<Vec<C64>> {
    let m = a.len();
    let n = a[0].len();
    let mut ata = vec![vec![C64::new(0.0, 0.0); n]; n];
    let mut atb = vec![C64::new(0.0, 0.0); n];
    for r in 0..m {
        let scale = a[r]
            .iter()
            .map(|v| v.norm())
            .fold(b[r].norm(), f64::max)
            .max(1e-30);
        let w = 1.0 / (scale * scale);
        for i in 0..n {
            let ari = a[r][i].conj();
            for j in 0..n {
                ata[i][j] += w * ari * a[r][j];
            }
            atb[i] += w * ari * b[r];
        }
    }
    solve_complex(ata, atb)
}

/// All roots of a complex polynomial sum_k c[k] z^k (c[n] != 0) by the
/// Durand-Kerner iteration with a Newton polish.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let mut c: Vec<C64> = coeffs.to_vec();
    while let Some(last) = c.last() {
        if last.norm() < 1e-300 && c.len() > 1 {
            c.pop();
        } else {
            break;
        }
    }
    let n = c.len() - 1;
    if n == 0 {
        return vec![];
    }
    let lead = c[n];
    let monic: Vec<C64> = c.iter().map(|v| v / lead).collect();
    let eval = |z: C64, p: &[C64]| {
        let mut acc = C64::new(0.0, 0.0);
        for &ck in p.iter().rev() {
            acc = acc * z + ck;
        }
        acc
    };
    // radius bound and staggered start
    let r = 1.0
        + monic[..n]
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
    let mut roots: Vec<C64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64;
            C64::from_polar(0.7 * r, th) + C64::new(0.1, 0.05)
        })
        .collect();
    for _ in 0..400 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let zi = roots[i];
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= zi - roots[j];
                }
            }
            if denom.norm() < 1e-280 {
                continue;
            }
            let step = eval(zi, &monic) / denom;
            roots[i] = zi - step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 * r.max(1.0) {
            break;
        }
    }
    // Newton polish
    let dcoef: Vec<C64> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| v * k as f64)
        .collect();
    for root in roots.iter_mut() {
        for _ in 0..8 {
            let f = eval(*root, &monic);
            let d = eval(*root, &dcoef);
            if d.norm() < 1e-280 {
                break;
            }
            let s = f / d;
            *root -= s;
            if s.norm() < 1e-15 * (root.norm() + 1.0) {
                break;
            }
        }
    }
    roots
}

/// Adaptive Simpson quadrature of a real integrand.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, b, fa, fm, fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Gauss-Legendre nodes/weights on [-1,1] by Newton on Legendre polynomials.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j as f64 + 1.0) * z * p2 - j as f64 * p3) / (j as f64 + 1.0);
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Damped Newton on a dense real system with a finite-difference Jacobian.
/// `guard` rejects steps that leave the admissible region.
pub fn newton_fd<F, G>(
    f: F,
    guard: G,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, f64), String>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
    G: Fn(&[f64]) -> bool,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = f(&x).ok_or("residual evaluation failed at start")?;
    for _ in 0..max_iter {
        let nr = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if nr < tol {
            return Ok((x, nr));
        }
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let h = 1e-7 * scale;
        let mut jac = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut xp = x.clone();
            xp[j] += h;
            let rp = f(&xp).ok_or("residual evaluation failed in Jacobian")?;
            for i in 0..n {
                jac[i][j] = (rp[i] - r[i]) / h;
            }
        }
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let dx = solve_real(&jac, &rhs).ok_or("singular Jacobian")?;
        let mut lam = 1.0;
        let mut accepted = false;
        while lam > 1e-6 {
            let xn: Vec<f64> = x.iter().zip(&dx).map(|(xi, di)| xi + lam * di).collect();
            if guard(&xn) {
                if let Some(rn) = f(&xn) {
                    let nrn = rn.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    if nrn < nr || lam < 0.05 {
                        x = xn;
                        r = rn;
                        accepted = true;
                        break;
                    }
                }
            }
            lam *= 0.5;
        }
        if !accepted {
            let nr = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            return Err(format!("newton stalled at residual {nr:.3e}"));
        }
    }
    let nr = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if nr < tol {
        Ok((x, nr))
    } else {
        Err(format!("newton did not converge, residual {nr:.3e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_simple_quartic() {
        // z^4 - 1
        let c = vec![
            C64::new(-1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ];
        let mut r = poly_roots(&c);
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        for root in &r {
            assert!((root.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn simpson_integrates_gaussian() {
        let v = adaptive_simpson(&|x: f64| (-x * x).exp(), -8.0, 8.0, 1e-12);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre(12);
        let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-13);
    }
}
