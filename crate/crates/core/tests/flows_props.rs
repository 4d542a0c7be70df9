mod common;

use std::sync::Arc;

use affmod::flows::{
    check_lnd, exp_flow, invert_by_degree_bound, invert_word, lift_auto_g, lift_derivation, lift_intertwines,
    q_context, sigma_xz, AutoWord, Derivation, Generator, HypersurfaceX, XPoint,
};
use affmod::modification::{modify, AffineTriple, Certification};
use affmod::scalar::Rational;
use affmod::{compose_all, parse, Poly, PolyMap, VarContext, Q};
use common::*;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A triangular derivation `∂x = h1(y, z), ∂y = h2(z), ∂z = c` on three variables.
fn triangular_lnd(r: &mut ChaCha8Rng, c: &Arc<VarContext>) -> Derivation {
    let n = c.len();
    let imgs = (0..3)
        .map(|i| {
            let later: Vec<usize> = (i + 1..3).collect();
            if later.is_empty() {
                Poly::constant(c, &Q, rand_rational(r, 4))
            } else {
                rand_poly(r, c, &later, 2, 3)
            }
        })
        .chain((3..n).map(|_| Poly::zero(c, &Q)))
        .collect();
    Derivation::new(c, imgs).unwrap()
}

fn random_q(r: &mut ChaCha8Rng) -> Poly {
    let qc = q_context();
    let z = rand_poly(r, &qc, &[0], 2, 2);
    // q(z) = z·(random), so q(0) = 0, and never the zero polynomial
    let z1 = &Poly::var_at(&qc, &Q, 0) * &(&z + &Poly::one(&qc, &Q));
    if z1.is_zero() {
        Poly::var_at(&qc, &Q, 0)
    } else {
        z1
    }
}

fn random_hypersurface(r: &mut ChaCha8Rng) -> HypersurfaceX {
    let base = ctx(&["x", "y"]);
    loop {
        let p = rand_poly(r, &base, &[0, 1], 3, 3);
        if !p.is_constant() {
            return HypersurfaceX::new(&p).unwrap();
        }
    }
}

fn random_generator(r: &mut ChaCha8Rng, base: &Arc<VarContext>) -> Generator {
    let d = r.gen_range(0..base.len());
    let others: Vec<usize> = (0..base.len()).filter(|&i| i != d).collect();
    let h = rand_poly(r, base, &others, 2, 2);
    let t = rand_rational(r, 5);
    match r.gen_range(0..3) {
        0 => Generator::lift1(d, h, random_q(r), t).unwrap(),
        1 => Generator::lift2(d, h, random_q(r), t).unwrap(),
        _ => Generator::Eps,
    }
}

fn random_point(r: &mut ChaCha8Rng, x: &HypersurfaceX) -> XPoint {
    let xs: Vec<Rational> = (0..x.k()).map(|_| rand_rational(r, 6)).collect();
    let pv = x.p().eval(&xs).unwrap();
    if r.gen_bool(0.2) {
        // a point of the axis u = 0 when it exists
        if pv.is_zero() {
            return XPoint::new(xs, Rational::zero(), rand_rational(r, 6));
        }
    }
    let u = loop {
        let u = rand_rational(r, 6);
        if !u.is_zero() {
            break u;
        }
    };
    let v = &pv / &u;
    XPoint::new(xs, u, v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn flows_are_additive_in_time(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = ctx(&["x", "y", "z", "s", "t"]);
        let d = triangular_lnd(&mut r, &c);
        let cert = check_lnd(&d, 32).unwrap();
        prop_assert!(cert.recheck(&d).unwrap());
        let s = Poly::var_at(&c, &Q, 3);
        let t = Poly::var_at(&c, &Q, 4);
        let es = exp_flow(&d, &cert, &s).unwrap();
        let et = exp_flow(&d, &cert, &t).unwrap();
        let est = exp_flow(&d, &cert, &(&s + &t)).unwrap();
        prop_assert_eq!(et.compose(&es).unwrap(), est);
        let zero = exp_flow(&d, &cert, &Poly::zero(&c, &Q)).unwrap();
        prop_assert!(zero.is_identity());
    }

    #[test]
    fn every_lifted_generator_preserves_the_hypersurface(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_hypersurface(&mut r);
        let g = random_generator(&mut r, x.base());
        prop_assert!(x.generator_preserves(&g).unwrap(), "{:?}", g);
    }

    #[test]
    fn inverse_words_undo_words(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_hypersurface(&mut r);
        let len = r.gen_range(0..6);
        let w = AutoWord::from_gens(x.base(), (0..len).map(|_| random_generator(&mut r, x.base())).collect()).unwrap();
        let inv = invert_word(&w);
        for _ in 0..10 {
            let pt = random_point(&mut r, &x);
            let img = x.apply_word(&w, &pt).unwrap();
            prop_assert!(x.contains(&img).unwrap());
            prop_assert_eq!(x.apply_word(&inv, &img).unwrap(), pt);
        }
    }

    #[test]
    fn word_text_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_hypersurface(&mut r);
        let len = r.gen_range(0..8);
        let w = AutoWord::from_gens(x.base(), (0..len).map(|_| random_generator(&mut r, x.base())).collect()).unwrap();
        let text = w.to_string();
        let back = AutoWord::parse_text(x.base(), &Q, &text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        prop_assert_eq!(back, w);
    }

    #[test]
    fn degree_bound_inverse_is_two_sided(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = ctx(&["x", "y", "z"]);
        let (m, bound) = random_triangular_composite(&mut r, &c);
        let inv = invert_by_degree_bound(&m, bound).unwrap();
        prop_assert!(inv.compose(&m).unwrap().is_identity());
        prop_assert!(m.compose(&inv).unwrap().is_identity());
    }

    #[test]
    fn lifted_derivations_intertwine_the_blowdown(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = ctx(&["x", "y"]);
        let (triple, d) = random_certified_triple(&mut r, &c);
        let pres = modify(&triple, Certification::Auto).unwrap();
        prop_assert!(pres.fractions_annihilate().unwrap());
        let lifted = lift_derivation(&pres, &d).unwrap();
        let sample = vec![rand_poly(&mut r, &c, &[0, 1], 3, 3)];
        prop_assert!(lift_intertwines(&pres, &d, &lifted, &sample).unwrap());
    }

    #[test]
    fn lifted_automorphisms_commute_with_the_blowdown(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = ctx(&["x", "y", "z"]);
        let mu = random_g_shaped(&mut r, &c);
        let lifted = lift_auto_g(&mu).unwrap();
        let sigma = sigma_xz(&c, &Q).unwrap();
        prop_assert_eq!(mu.compose(&sigma).unwrap(), sigma.compose(&lifted).unwrap());
    }
}

/// A composite of up to three triangular maps in random coordinate order,
/// with the product of the factor degrees, which bounds the inverse's degree.
pub fn random_triangular_composite(r: &mut ChaCha8Rng, c: &Arc<VarContext>) -> (PolyMap, u32) {
    let maps: Vec<PolyMap> = (0..r.gen_range(1..=3))
        .map(|_| {
            let d = r.gen_range(0..3);
            let others: Vec<usize> = (0..3).filter(|&i| i != d).collect();
            let mut imgs: Vec<Poly> = (0..3).map(|i| Poly::var_at(c, &Q, i)).collect();
            imgs[d] = &imgs[d] + &rand_poly(r, c, &others, 2, 2);
            PolyMap::endo(c, imgs).unwrap()
        })
        .collect();
    let bound = maps.iter().map(|m| m.max_degree().max(1)).product();
    (compose_all(&maps).unwrap(), bound)
}

/// `f(x)` with `gcd(f, b) = 1`, and `∂ = (0, f·h(x))`, which kills `f` and sends `b` into `(f)`.
pub fn random_certified_triple(r: &mut ChaCha8Rng, c: &Arc<VarContext>) -> (AffineTriple, Derivation) {
    loop {
        let f = rand_poly(r, c, &[0], 2, 3);
        let b = rand_poly(r, c, &[0, 1], 3, 3);
        if f.is_constant() || b.is_zero() || !f.gcd(&b).unwrap().is_constant() {
            continue;
        }
        let h = rand_poly(r, c, &[0], 1, 2);
        let d = Derivation::new(c, vec![Poly::zero(c, &Q), &f * &h]).unwrap();
        return (AffineTriple::new(c, None, f, vec![b]).unwrap(), d);
    }
}

/// `μ = (x, γ₁y + x·g₁, γ₂z + x·g₂)` with nonzero `γᵢ`.
pub fn random_g_shaped(r: &mut ChaCha8Rng, c: &Arc<VarContext>) -> PolyMap {
    let x = Poly::var_at(c, &Q, 0);
    let mut gamma = || loop {
        let g = rand_rational(r, 4);
        if !g.is_zero() {
            break g;
        }
    };
    let (g1c, g2c) = (gamma(), gamma());
    let g1 = rand_poly(r, c, &[0, 1, 2], 2, 3);
    let g2 = rand_poly(r, c, &[0, 1, 2], 2, 3);
    PolyMap::endo(
        c,
        vec![
            x.clone(),
            &Poly::var_at(c, &Q, 1).scale(&g1c) + &(&x * &g1),
            &Poly::var_at(c, &Q, 2).scale(&g2c) + &(&x * &g2),
        ],
    )
    .unwrap()
}

#[test]
fn hand_checked_lifts() {
    let c = ctx(&["x", "y"]);
    let triple = AffineTriple::new(&c, None, parse(&c, "x").unwrap(), vec![parse(&c, "y^2").unwrap()]).unwrap();
    let pres = modify(&triple, Certification::Auto).unwrap();
    let d = Derivation::new(&c, vec![Poly::zero(&c, &Q), parse(&c, "x").unwrap()]).unwrap();
    let lifted = lift_derivation(&pres, &d).unwrap();
    let want: Vec<String> = vec!["0".into(), "x".into(), "2*y".into()];
    assert_eq!(lifted.images().iter().map(|p| p.to_string()).collect::<Vec<_>>(), want);

    let c3 = ctx(&["x", "y", "z"]);
    let mu = PolyMap::endo(&c3, vec![parse(&c3, "x").unwrap(), parse(&c3, "y + x").unwrap(), parse(&c3, "z").unwrap()]).unwrap();
    let lifted = lift_auto_g(&mu).unwrap();
    assert_eq!(lifted.to_string(), mu.to_string());

    // LIFT1 along ∂/∂x with q(v) = v, t = 1 on (0, 0, 5) over u·v = x
    let x = HypersurfaceX::new(&parse(&ctx(&["x"]), "x").unwrap()).unwrap();
    let g = Generator::lift1(0, Poly::one(x.base(), &Q), Poly::var_at(&q_context(), &Q, 0), Rational::from_integer(1.into())).unwrap();
    let img = x.apply_word(&AutoWord::from_gens(x.base(), vec![g]).unwrap(), &XPoint::new(vec![Rational::zero()], Rational::zero(), Rational::from_integer(5.into()))).unwrap();
    assert_eq!(img.coords(), vec![Rational::from_integer(5.into()), Rational::from_integer(1.into()), Rational::from_integer(5.into())]);
}
