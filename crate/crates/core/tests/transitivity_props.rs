mod common;

use affmod::flows::{HypersurfaceX, XPoint};
use affmod::linalg::{det, mat_vec};
use affmod::scalar::{rat, Rational};
use affmod::transitivity::{fiber_points, g0_transitive, gather_into_u1, separating_shear_setup, solve, verify_plan};
use affmod::{parse, Error, Q};
use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn distinct_vectors(r: &mut ChaCha8Rng, k: usize, m: usize, bound: i64) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    while out.len() < m {
        let v: Vec<Rational> = (0..k).map(|_| rand_rational(r, bound)).collect();
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn hypersurface(p: &str) -> HypersurfaceX {
    HypersurfaceX::new(&parse(&ctx(&["x", "y"]), p).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn shear_words_map_sources_to_targets(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let k = r.gen_range(2..=3);
        let m = r.gen_range(1..=5);
        let base = if k == 2 { ctx(&["x", "y"]) } else { ctx(&["x", "y", "z"]) };
        let s = distinct_vectors(&mut r, k, m, 20);
        let t = distinct_vectors(&mut r, k, m, 20);
        let w = g0_transitive(&base, &s, &t).unwrap();
        let map = w.affine_polymap(&Q).unwrap();
        for (a, b) in s.iter().zip(&t) {
            prop_assert_eq!(&w.apply_affine(a).unwrap(), b);
            prop_assert_eq!(&naive_apply(&map, a), b);
        }
        prop_assert!(g0_transitive(&base, &s, &s).unwrap().is_empty());
    }

    #[test]
    fn separation_gives_distinct_coordinates(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let k = r.gen_range(2..=3);
        let base = if k == 2 { ctx(&["x", "y"]) } else { ctx(&["x", "y", "z"]) };
        // coarse coordinates make collisions common
        let (ma, mb) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let a = distinct_vectors(&mut r, k, ma, 2);
        let b = distinct_vectors(&mut r, k, mb, 2);
        let (w, report) = separating_shear_setup(&base, &[&a, &b]).unwrap();
        prop_assert!(det(&Q, &report.matrix).is_one());
        for set in [&a, &b] {
            let moved: Vec<Vec<Rational>> = set.iter().map(|p| w.apply_affine(p).unwrap()).collect();
            for (p, m) in set.iter().zip(&moved) {
                prop_assert_eq!(&mat_vec(&Q, &report.matrix, p), m);
            }
            for i in 0..k {
                for (j, p) in moved.iter().enumerate() {
                    prop_assert!(moved[..j].iter().all(|q| q[i] != p[i]));
                }
            }
        }
    }

    #[test]
    fn fiber_points_lie_on_the_fiber(c in small_rational(), m in 1usize..6, which in 0usize..3) {
        let p = parse(&ctx(&["x", "y"]), ["x", "x + x^2*y", "x*y + x^3"][which]).unwrap();
        let pts = fiber_points(&p, &c, m, &[]).unwrap();
        prop_assert_eq!(pts.len(), m);
        for (i, pt) in pts.iter().enumerate() {
            prop_assert_eq!(naive_eval(&p, pt), c.clone());
            prop_assert!(!pts[..i].contains(pt));
        }
    }

    #[test]
    fn gathering_reaches_u_one_and_fixes_other_levels(seed in any::<u64>(), which in 0usize..3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = hypersurface(["x", "x + x^2*y", "x*y + x^3"][which]);
        let m = r.gen_range(1..=4);
        let pts = distinct_x_points(&mut r, &x, m, 10);
        let g = match gather_into_u1(&x, &pts) {
            Err(Error::FiberPointsNotFound { .. }) => return Ok(()),
            other => other.unwrap(),
        };
        prop_assert!(g.points.iter().all(|p| p.u.is_one() && on_x(&x, p)));
        for (i, p) in g.points.iter().enumerate() {
            prop_assert!(!g.points[..i].contains(p));
        }
        for (a, b) in pts.iter().zip(&g.points) {
            prop_assert_eq!(&x.apply_word(&g.word, a).unwrap(), b);
        }
        // each group move fixes its other levels and v = 0 pointwise
        let zeros = fiber_points(x.p(), &Rational::zero(), 10, &[]).unwrap();
        for gm in &g.groups {
            for level in &gm.fixed_levels {
                for _ in 0..10 {
                    let xs = vec![rand_rational(&mut r, 10), rand_rational(&mut r, 10)];
                    let pt = XPoint::new(xs.clone(), &naive_eval(x.p(), &xs) / level, level.clone());
                    prop_assert_eq!(&x.apply_word(&gm.word, &pt).unwrap(), &pt);
                }
            }
            for z in &zeros {
                let pt = XPoint::new(z.clone(), rand_rational(&mut r, 10), Rational::zero());
                prop_assert_eq!(&x.apply_word(&gm.word, &pt).unwrap(), &pt);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn plans_verify_and_stay_on_the_hypersurface(seed in any::<u64>(), which in 0usize..3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = hypersurface(["x", "x + x^2*y", "x*y + x^3"][which]);
        let m = r.gen_range(1..=3);
        let s = distinct_x_points(&mut r, &x, m, 10);
        let t = distinct_x_points(&mut r, &x, m, 10);
        let plan = match solve(&x, &s, &t) {
            Err(Error::FiberPointsNotFound { .. }) => return Ok(()),
            other => other.unwrap(),
        };
        prop_assert!(verify_plan(&x, &plan, &s, &t));
        for stage in &plan.trace {
            prop_assert!(stage.points.iter().all(|p| on_x(&x, p)));
        }
        let mut pts = s.clone();
        for g in plan.word.gens() {
            pts = pts.iter().map(|p| x.apply_generator(g, p).unwrap()).collect();
            prop_assert!(pts.iter().all(|p| on_x(&x, p)));
        }
        prop_assert_eq!(pts, t);
    }
}

#[test]
fn hand_checked_fiber_and_shears() {
    let c = ctx(&["x", "y"]);
    let p = parse(&c, "x + x^2*y").unwrap();
    let pts = fiber_points(&p, &rat(5, 1), 2, &[]).unwrap();
    assert_eq!(pts, vec![vec![rat(1, 1), rat(4, 1)], vec![rat(2, 1), rat(3, 4)]]);
    let w = g0_transitive(&c, &[vec![rat(0, 1), rat(0, 1)]], &[vec![rat(2, 1), rat(3, 1)]]).unwrap();
    assert_eq!(w.to_string(), "SHEAR d=x h=2 t=1\nSHEAR d=y h=3 t=1\n");
}
