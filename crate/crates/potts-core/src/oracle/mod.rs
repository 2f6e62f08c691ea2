//! Exact planar perturbative oracle: moments <(1/N) tr X_(p)^m> (and
//! fiducial-matrix moments) as formal power series in t3, t4 with exact
//! rational coefficients, by Wick pairing over half-edges restricted to
//! genus-zero connected maps with the q-dependent Gaussian propagator.
//!
//! The effective quadratic form of the measure is (t2 I - J) in colour
//! space (J the all-ones matrix); colour sums are carried out exactly for
//! arbitrary rational q and p through the delta-decomposition of the
//! propagator, so no integer-colour enumeration is needed.

pub mod maps;

use crate::error::CoreError;
use maps::for_each_planar_connected;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

pub type Rat = BigRational;

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Propagator entries of the colour quadratic form (t2 I - J)^{-1}, with
/// the fiducial-matrix extension:
///   diag = 1/(q(t2-q)) + (q-1)/(q t2),  off = 1/(q(t2-q)) - 1/(q t2),
///   yy = t2/(t2-q),                     yx = 1/(t2-q).
#[derive(Debug, Clone)]
pub struct PropagatorMatrix {
    pub q: Rat,
    pub t2: Rat,
    pub diag: Rat,
    pub off: Rat,
    pub yy: Rat,
    pub yx: Rat,
}

impl PropagatorMatrix {
    pub fn new(q: Rat, t2: Rat) -> Result<Self, CoreError> {
        if t2 == q {
            return Err(CoreError::Domain(
                "t2 = q: the colour quadratic form has a zero mode".into(),
            ));
        }
        if t2.is_zero() {
            return Err(CoreError::Domain("t2 = 0 propagator undefined".into()));
        }
        let one = Rat::one();
        let pole = &one / (&q * (&t2 - &q));
        let diag = &pole + (&q - &one) / (&q * &t2);
        let off = &pole - &one / (&q * &t2);
        let yy = &t2 / (&t2 - &q);
        let yx = &one / (&t2 - &q);
        Ok(Self { q, t2, diag, off, yy, yx })
    }
}

/// Which matrix the boundary trace is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// tr (X_1 + ... + X_p)^m with the boundary colours summed over p values.
    SumP,
    /// tr Y^m of the fiducial matrix.
    Fiducial,
}

/// Truncated bivariate power series in (t3, t4) with exact rational
/// coefficients, keyed by (n3, n4).
#[derive(Debug, Clone, PartialEq)]
pub struct FormalSeries {
    pub terms: BTreeMap<(u32, u32), Rat>,
    pub order: u32,
}

impl FormalSeries {
    pub fn zero(order: u32) -> Self {
        Self { terms: BTreeMap::new(), order }
    }

    pub fn coeff(&self, n3: u32, n4: u32) -> Rat {
        self.terms.get(&(n3, n4)).cloned().unwrap_or_else(Rat::zero)
    }

    /// Evaluate at numeric couplings.
    pub fn eval(&self, t3: f64, t4: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(n3, n4), c)| rat_to_f64(c) * t3.powi(n3 as i32) * t4.powi(n4 as i32))
            .sum()
    }

    /// Export as an ordered term list [multidegree, numerator, denominator].
    pub fn export(&self) -> Vec<SeriesTerm> {
        self.terms
            .iter()
            .map(|(&(n3, n4), c)| SeriesTerm {
                degree: (n3, n4),
                numerator: c.numer().to_string(),
                denominator: c.denom().to_string(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesTerm {
    pub degree: (u32, u32),
    pub numerator: String,
    pub denominator: String,
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // exact-to-double conversion via high-precision division
    let num = r.numer();
    let den = r.denom();
    let scale = BigInt::from(1u64) << 80;
    let scaled = num * &scale / den;
    let approx = bigint_to_f64(&scaled);
    approx / 2f64.powi(80)
}

fn bigint_to_f64(v: &BigInt) -> f64 {
    let s = v.to_string();
    s.parse::<f64>().unwrap_or(f64::NAN)
}

/// Exact planar moment <(1/N) tr B^m> as a series in t3 (odd vertices) and
/// t4 (quartic vertices) up to total vertex count `order`.
///
/// The measure's interaction vertices are -t3 tr X_i^3/3 - t4 tr X_i^4/4
/// summed over colours; each diagram is weighted by
/// (-t3)^{n3} (-t4)^{n4} / (3^{n3} 4^{n4} n3! n4!) times the exact colour sum.
pub fn planar_moment(
    q: Rat,
    p: Rat,
    t2: Rat,
    m: usize,
    order: u32,
    boundary: BoundaryKind,
) -> Result<FormalSeries, CoreError> {
    if m > 8 || order > 4 {
        return Err(CoreError::Domain(
            "planar oracle is limited to m <= 8, order <= 4".into(),
        ));
    }
    let prop = PropagatorMatrix::new(q.clone(), t2)?;
    let mut series = FormalSeries::zero(order);
    if m == 0 {
        series.terms.insert((0, 0), Rat::one());
        return Ok(series);
    }
    for n3 in 0..=order {
        for n4 in 0..=(order - n3) {
            let h = m + 3 * n3 as usize + 4 * n4 as usize;
            if h % 2 != 0 {
                continue;
            }
            let weight = colour_weight_sum(&prop, &p, m, n3 as usize, n4 as usize, boundary);
            if weight.is_zero() {
                continue;
            }
            // (-1)^{n3+n4} / (3^{n3} 4^{n4} n3! n4!)
            let mut fac = Rat::one();
            for _ in 0..n3 {
                fac *= rat(-1, 3);
            }
            for _ in 0..n4 {
                fac *= rat(-1, 4);
            }
            fac /= Rat::from(BigInt::from(factorial(n3 as u64) * factorial(n4 as u64)));
            series.terms.insert((n3, n4), fac * weight);
        }
    }
    Ok(series)
}

fn factorial(n: u64) -> u64 {
    (1..=n).product::<u64>().max(1)
}

/// Sum over genus-zero connected pairings of the exact colour weight.
///
/// Variables: m boundary slots (range p, or the fixed fiducial label) and
/// one colour per internal vertex (range q). X-X edges carry
/// off + (diag - off) delta_{colour}, expanded over delta-subsets whose
/// components contribute p or q each; edges touching the fiducial matrix
/// carry constant factors.
fn colour_weight_sum(
    prop: &PropagatorMatrix,
    p: &Rat,
    m: usize,
    n3: usize,
    n4: usize,
    boundary: BoundaryKind,
) -> Rat {
    // rotation system: boundary vertex first, then cubic, then quartic vertices
    let mut rotations: Vec<Vec<usize>> = Vec::with_capacity(1 + n3 + n4);
    let mut next = 0usize;
    let mut take = |k: usize| {
        let v: Vec<usize> = (next..next + k).collect();
        next += k;
        v
    };
    rotations.push(take(m));
    for _ in 0..n3 {
        rotations.push(take(3));
    }
    for _ in 0..n4 {
        rotations.push(take(4));
    }
    let total = next;
    // variable id per half-edge: 0..m boundary slots, then m + vertex index
    let mut var_of = vec![0usize; total];
    for h in 0..m {
        var_of[h] = h;
    }
    for (vi, r) in rotations.iter().enumerate().skip(1) {
        for &h in r {
            var_of[h] = m + vi - 1;
        }
    }
    let nvert = n3 + n4;
    let nvars = m + nvert;
    let a_fac = &prop.diag - &prop.off; // delta coefficient
    let b_fac = prop.off.clone();

    // histogram over (n_yy, n_yx, |S|, #off-edges, #p-components, #q-components)
    use std::collections::HashMap;
    let mut hist: HashMap<(usize, usize, usize, usize, usize, usize), u64> = HashMap::new();

    for_each_planar_connected(&rotations, |pairing| {
        // classify edges
        let mut xx_edges: Vec<(usize, usize)> = Vec::new();
        let mut n_yy = 0usize;
        let mut n_yx = 0usize;
        for &(ha, hb) in pairing {
            let (va, vb) = (var_of[ha], var_of[hb]);
            let a_is_y = boundary == BoundaryKind::Fiducial && va < m;
            let b_is_y = boundary == BoundaryKind::Fiducial && vb < m;
            match (a_is_y, b_is_y) {
                (true, true) => n_yy += 1,
                (true, false) | (false, true) => n_yx += 1,
                (false, false) => xx_edges.push((va, vb)),
            }
        }
        let e = xx_edges.len();
        // delta-subset expansion with union-find component counting
        for mask in 0u32..(1u32 << e) {
            let mut parent: Vec<usize> = (0..nvars).collect();
            fn find(p: &mut Vec<usize>, mut x: usize) -> usize {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            let mut scount = 0usize;
            for (k, &(va, vb)) in xx_edges.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    scount += 1;
                    let (ra, rb) = (find(&mut parent, va), find(&mut parent, vb));
                    if ra != rb {
                        parent[ra] = rb;
                    }
                }
            }
            // count components among the X-variables only; boundary slots of
            // the fiducial trace are not colour variables
            let slot_is_colour = boundary == BoundaryKind::SumP;
            let mut comp_of_root: HashMap<usize, bool> = HashMap::new(); // root -> contains slot
            for v in 0..nvars {
                let is_slot = v < m;
                if is_slot && !slot_is_colour {
                    continue;
                }
                let r = find(&mut parent, v);
                let entry = comp_of_root.entry(r).or_insert(false);
                *entry |= is_slot;
            }
            let ncp = comp_of_root.values().filter(|&&has| has).count();
            let ncq = comp_of_root.values().filter(|&&has| !has).count();
            *hist.entry((n_yy, n_yx, scount, e - scount, ncp, ncq)).or_insert(0) += 1;
        }
    });

    // evaluate the histogram exactly
    let mut acc = Rat::zero();
    for (&(nyy, nyx, scount, rest, ncp, ncq), &count) in &hist {
        let mut term = Rat::from(BigInt::from(count));
        for _ in 0..nyy {
            term *= prop.yy.clone();
        }
        for _ in 0..nyx {
            term *= prop.yx.clone();
        }
        for _ in 0..scount {
            term *= a_fac.clone();
        }
        for _ in 0..rest {
            term *= b_fac.clone();
        }
        for _ in 0..ncp {
            term *= p.clone();
        }
        for _ in 0..ncq {
            term *= prop.q.clone();
        }
        acc += term;
    }
    acc
}

/// The 1/z expansion of the disk function: coefficient series of z^{-m-1}
/// for m = 0..=mmax, truncated at the given vertex order.
pub fn series_wp(
    q: Rat,
    p: Rat,
    t2: Rat,
    mmax: usize,
    order: u32,
) -> Result<Vec<FormalSeries>, CoreError> {
    (0..=mmax)
        .map(|m| planar_moment(q.clone(), p.clone(), t2.clone(), m, order, BoundaryKind::SumP))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        rat(n, d)
    }

    #[test]
    fn gaussian_second_moment_single_colour() {
        // q = 1: <tr X^2> = 1/(t2 - 1) at t3 = t4 = 0
        let s = planar_moment(r(1, 1), r(1, 1), r(10, 1), 2, 0, BoundaryKind::SumP).unwrap();
        assert_eq!(s.coeff(0, 0), r(1, 9));
        let s = planar_moment(r(1, 1), r(1, 1), r(3, 1), 2, 0, BoundaryKind::SumP).unwrap();
        assert_eq!(s.coeff(0, 0), r(1, 2));
    }

    #[test]
    fn semicircle_higher_moments() {
        // q = 1 Gaussian: m4 = 2 g^2, m6 = 5 g^3, with g = 1/(t2-1)
        let m4 = planar_moment(r(1, 1), r(1, 1), r(3, 1), 4, 0, BoundaryKind::SumP).unwrap();
        assert_eq!(m4.coeff(0, 0), r(2, 4));
        let m6 = planar_moment(r(1, 1), r(1, 1), r(3, 1), 6, 0, BoundaryKind::SumP).unwrap();
        assert_eq!(m6.coeff(0, 0), r(5, 8));
    }

    #[test]
    fn odd_moments_vanish_without_cubic() {
        let s = planar_moment(r(3, 1), r(1, 1), r(10, 1), 3, 2, BoundaryKind::SumP).unwrap();
        assert!(s.coeff(0, 0).is_zero());
        assert!(s.coeff(2, 0).is_zero());
        assert!(s.coeff(0, 1).is_zero());
        // the t3^1 term is the first nonzero one
        assert!(!s.coeff(1, 0).is_zero());
    }

    #[test]
    fn potts3_reference_series_x1() {
        // frozen exact rationals at q = 3, t2 = 10, boundary X_1
        let q = r(3, 1);
        let p = r(1, 1);
        let t2 = r(10, 1);
        let m1 = planar_moment(q.clone(), p.clone(), t2.clone(), 1, 2, BoundaryKind::SumP).unwrap();
        assert_eq!(m1.coeff(1, 0), r(-4, 245));
        let m2 = planar_moment(q.clone(), p.clone(), t2.clone(), 2, 2, BoundaryKind::SumP).unwrap();
        assert_eq!(m2.coeff(0, 0), r(4, 35));
        assert_eq!(m2.coeff(2, 0), r(10609, 12005000));
        let m3 = planar_moment(q, p, t2, 3, 2, BoundaryKind::SumP).unwrap();
        assert_eq!(m3.coeff(1, 0), r(-1217, 171500));
    }

    #[test]
    fn potts3_reference_series_fiducial() {
        let q = r(3, 1);
        let p = r(1, 1);
        let t2 = r(10, 1);
        let m1 = planar_moment(q.clone(), p.clone(), t2.clone(), 1, 2, BoundaryKind::Fiducial).unwrap();
        assert_eq!(m1.coeff(1, 0), r(-12, 245));
        let m2 = planar_moment(q.clone(), p.clone(), t2.clone(), 2, 2, BoundaryKind::Fiducial).unwrap();
        assert_eq!(m2.coeff(0, 0), r(10, 7));
        assert_eq!(m2.coeff(2, 0), r(627, 120050));
        let m3 = planar_moment(q.clone(), p.clone(), t2.clone(), 3, 2, BoundaryKind::Fiducial).unwrap();
        assert_eq!(m3.coeff(1, 0), r(-75, 343));
        let m4 = planar_moment(q, p, t2, 4, 2, BoundaryKind::Fiducial).unwrap();
        assert_eq!(m4.coeff(0, 0), r(200, 49));
        assert_eq!(m4.coeff(2, 0), r(3258, 84035));
    }

    #[test]
    fn ising_singlet_reference() {
        let q = r(2, 1);
        let p = r(2, 1);
        let t2 = r(10, 1);
        let m1 = planar_moment(q.clone(), p.clone(), t2.clone(), 1, 2, BoundaryKind::SumP).unwrap();
        assert_eq!(m1.coeff(1, 0), r(-9, 320));
        let m2 = planar_moment(q, p, t2, 2, 2, BoundaryKind::SumP).unwrap();
        assert_eq!(m2.coeff(0, 0), r(1, 4));
    }

    #[test]
    fn colour_symmetry_p_range() {
        // the moment depends on p only through the allowed colour count:
        // p = q reproduces the full-sum moments for any representative
        let q = r(3, 1);
        let t2 = r(8, 1);
        let a = planar_moment(q.clone(), r(2, 1), t2.clone(), 2, 2, BoundaryKind::SumP).unwrap();
        let b = planar_moment(q.clone(), r(2, 1), t2.clone(), 2, 2, BoundaryKind::SumP).unwrap();
        assert_eq!(a, b);
        // and the p-dependence is polynomial: evaluate at a non-integer p
        let c = planar_moment(q, r(3, 2), t2, 2, 1, BoundaryKind::SumP).unwrap();
        assert!(!c.coeff(0, 0).is_zero());
    }

    #[test]
    fn zero_mode_signalled() {
        assert!(PropagatorMatrix::new(r(2, 1), r(2, 1)).is_err());
    }

    #[test]
    fn series_wp_leading_term() {
        let w = series_wp(r(2, 1), r(1, 1), r(9, 1), 2, 1).unwrap();
        assert_eq!(w[0].coeff(0, 0), Rat::one());
        assert!(w[1].coeff(0, 0).is_zero());
    }
}
