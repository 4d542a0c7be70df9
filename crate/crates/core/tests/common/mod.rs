//! Strategies and small reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use affmod::flows::{HypersurfaceX, XPoint};
use affmod::scalar::{rat, Rational};
use affmod::transitivity::is_smooth_point;
use affmod::{Fp, Poly, PolyMap, VarContext, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::Rng;

pub fn ctx(names: &[&str]) -> Arc<VarContext> {
    VarContext::new(names.iter().copied()).unwrap()
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    small_rational().prop_filter("nonzero", |r| !r.is_zero())
}

/// Random polynomials over `ctx` with up to `max_terms` terms of total degree ≤ `max_deg`.
pub fn poly_strategy(ctx: Arc<VarContext>, max_deg: u32, max_terms: usize) -> impl Strategy<Value = Poly> {
    let n = ctx.len();
    let term = (proptest::collection::vec(0..=max_deg, n), small_rational());
    proptest::collection::vec(term, 0..=max_terms).prop_map(move |terms| {
        let terms = terms.into_iter().map(|(mut e, c)| {
            // squash the exponent vector into the degree bound
            while e.iter().sum::<u32>() > max_deg {
                let i = e.iter().position(|&k| k > 0).unwrap();
                e[i] -= 1;
            }
            (e, c)
        });
        Poly::from_terms(&ctx, &Q, terms).unwrap()
    })
}

pub fn nonzero_poly(ctx: Arc<VarContext>, max_deg: u32, max_terms: usize) -> impl Strategy<Value = Poly> {
    poly_strategy(ctx, max_deg, max_terms).prop_filter("nonzero", |p| !p.is_zero())
}

pub fn rand_rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    rat(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

pub fn rand_poly<R: Rng>(rng: &mut R, ctx: &Arc<VarContext>, vars: &[usize], max_deg: u32, max_terms: usize) -> Poly {
    let n = ctx.len();
    let terms = (0..rng.gen_range(0..=max_terms)).map(|_| {
        let mut e = vec![0u32; n];
        let d = rng.gen_range(0..=max_deg);
        for _ in 0..d {
            if vars.is_empty() {
                break;
            }
            e[vars[rng.gen_range(0..vars.len())]] += 1;
        }
        (e, rand_rational(rng, 5))
    });
    Poly::from_terms(ctx, &Q, terms).unwrap()
}

/// Reference evaluation straight from the term list, with no use of the
/// library's own `eval`.
pub fn naive_eval(p: &Poly, pt: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (e, c) in p.terms() {
        let mut m = c.clone();
        for (x, &k) in pt.iter().zip(e.iter()) {
            for _ in 0..k {
                m *= x;
            }
        }
        acc += m;
    }
    acc
}

pub fn naive_apply(m: &PolyMap, pt: &[Rational]) -> Vec<Rational> {
    m.images().iter().map(|p| naive_eval(p, pt)).collect()
}

/// Reference point count: plain nested loops over `F_q^n`, integer arithmetic only.
pub fn naive_count(eqs: &[Poly], q: u32) -> u64 {
    let n = eqs[0].ctx().len();
    let q64 = q as i64;
    let reduce = |r: &Rational| -> i64 {
        let qb = BigInt::from(q);
        let num = r.numer().mod_floor(&qb).to_i64().unwrap();
        let den = r.denom().mod_floor(&qb).to_i64().unwrap();
        assert!(den != 0, "denominator divisible by q");
        // Fermat inverse by repeated multiplication
        let mut inv = 1i64;
        for _ in 0..q64 - 2 {
            inv = inv * den % q64;
        }
        num * inv % q64
    };
    let terms: Vec<Vec<(Vec<u32>, i64)>> = eqs
        .iter()
        .map(|p| p.terms().map(|(e, c)| (e.clone(), reduce(c))).collect())
        .collect();
    let total = (q as u64).pow(n as u32);
    let mut count = 0;
    let mut pt = vec![0i64; n];
    for idx in 0..total {
        let mut r = idx;
        for slot in pt.iter_mut() {
            *slot = (r % q as u64) as i64;
            r /= q as u64;
        }
        let all_zero = terms.iter().all(|ts| {
            let mut acc = 0i64;
            for (e, c) in ts {
                let mut m = *c;
                for (x, &k) in pt.iter().zip(e.iter()) {
                    for _ in 0..k {
                        m = m * x % q64;
                    }
                }
                acc = (acc + m) % q64;
            }
            acc == 0
        });
        if all_zero {
            count += 1;
        }
    }
    count
}

pub fn fp(q: u32) -> Fp {
    Fp::new(q).unwrap()
}

/// A smooth rational point of `u·v = p(x̄)` with coordinates bounded by `bound`
/// (numerators and denominators); about one in five lies on `u = 0` or `v = 0`.
/// When no bounded `u, v` split `p(x̄)` after a few tries (say `p` has a large
/// denominator), the point `(x̄, p(x̄), 1)` is taken instead.
pub fn rand_x_point<R: Rng>(rng: &mut R, x: &HypersurfaceX, bound: i64) -> XPoint {
    let mut tries = 0;
    loop {
        tries += 1;
        let xs: Vec<Rational> = (0..x.k()).map(|_| rand_rational(rng, bound)).collect();
        let pv = naive_eval(x.p(), &xs);
        let pt = if pv.is_zero() {
            let w = rand_rational(rng, bound);
            if rng.gen_bool(0.5) {
                XPoint::new(xs, Rational::zero(), w)
            } else {
                XPoint::new(xs, w, Rational::zero())
            }
        } else {
            let u = rand_rational(rng, bound);
            if u.is_zero() {
                continue;
            }
            let v = &pv / &u;
            if v.numer().abs() > bound.into() || v.denom() > &bound.into() {
                if tries < 50 {
                    continue;
                }
                XPoint::new(xs, pv, Rational::from_integer(1.into()))
            } else {
                XPoint::new(xs, u, v)
            }
        };
        if is_smooth_point(x, &pt).unwrap() {
            return pt;
        }
    }
}

/// `m` pairwise distinct points from [`rand_x_point`].
pub fn distinct_x_points<R: Rng>(rng: &mut R, x: &HypersurfaceX, m: usize, bound: i64) -> Vec<XPoint> {
    let mut pts: Vec<XPoint> = Vec::with_capacity(m);
    while pts.len() < m {
        let p = rand_x_point(rng, x, bound);
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts
}

/// Whether `(x̄, u, v)` satisfies `u·v = p(x̄)`, evaluated independently of the library.
pub fn on_x(x: &HypersurfaceX, pt: &XPoint) -> bool {
    &pt.u * &pt.v == naive_eval(x.p(), &pt.x)
}

/// `p = ∏(x − xᵢ)` over distinct small integer roots (degree 1 to 3) and
/// `g = γ(y − c) + x·h` with `deg h ≤ 2`. `h` has no `y²` term and `g` keeps a
/// nonzero `y`-slope over every root, which is what makes `{p·z = g}` a plane.
pub fn rand_rectify_instance<R: Rng>(rng: &mut R) -> (Poly, Poly) {
    let c = ctx(&["x", "y"]);
    let x = Poly::var_at(&c, &Q, 0);
    let y = Poly::var_at(&c, &Q, 1);
    loop {
        let deg = rng.gen_range(1..=3);
        let mut roots: Vec<i64> = Vec::new();
        while roots.len() < deg {
            let r = rng.gen_range(-3..=3);
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
        let p = roots
            .iter()
            .fold(Poly::one(&c, &Q), |acc, r| &acc * &(&x - &Poly::from_int(&c, &Q, *r)));
        let gamma = rand_rational(rng, 4);
        if gamma.is_zero() {
            continue;
        }
        let cc = rand_rational(rng, 4);
        let mut terms = Vec::new();
        for e in [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1]] {
            if rng.gen_bool(0.6) {
                terms.push((e.to_vec(), rand_rational(rng, 4)));
            }
        }
        let h = Poly::from_terms(&c, &Q, terms).unwrap();
        let lin = (&y - &Poly::constant(&c, &Q, cc)).scale(&gamma);
        let g = &lin + &(&x * &h);
        let slopes_ok = roots.iter().all(|r| {
            let slope = naive_eval(&g.diff_at(1), &[rat(*r, 1), Rational::zero()]);
            !slope.is_zero()
        });
        if slopes_ok && g.gcd(&p).unwrap().is_constant() {
            return (p, g);
        }
    }
}
