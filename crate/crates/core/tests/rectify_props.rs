mod common;

use affmod::rectify::{rectify_n1, rectify_pair, russell_transform_rectifier, verify_rectified, BinomialSurface, RectifyWord};
use affmod::{parse, Error, Poly, PolyMap, Q};
use common::*;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn rectified_surfaces_become_planes(seed in any::<u64>(), samples in proptest::collection::vec((small_rational(), small_rational()), 20)) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (p, g) = rand_rectify_instance(&mut r);
        let w = rectify_n1(&p, &g).unwrap();
        let s = BinomialSurface::from_equation(&p, &g).unwrap();
        prop_assert!(verify_rectified(&s, &w));
        let f = s.defining_poly().unwrap();
        let inv = w.inverse().unwrap();
        let pulled = f.substitute(&inv).unwrap();
        let kappa = pulled.coefficient(&[0, 1, 0]);
        prop_assert!(!kappa.is_zero());
        let plane = (&Poly::var_at(&w.ctx, &Q, 1) - &Poly::constant(&w.ctx, &Q, w.c.clone())).scale(&kappa);
        prop_assert_eq!(&pulled, &plane);
        // points of the plane y = c land on the surface
        for (a, b) in samples {
            let pt = vec![a, w.c.clone(), b];
            prop_assert!(naive_eval(&f, &naive_apply(&inv, &pt)).is_zero());
        }
        // the serialized word reads back to the same automorphism
        let back = RectifyWord::parse_text(&w.ctx, &w.to_string()).unwrap();
        prop_assert_eq!(back.forward().unwrap(), w.forward().unwrap());
        prop_assert!(verify_rectified(&s, &back));
    }

    #[test]
    fn pair_rectification_is_literal(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let c = ctx(&["x", "y"]);
        // (f, g) = (P(x'), y') for a random triangular change of coordinates
        let shear = rand_poly(&mut r, &c, &[1], 2, 3);
        let xp = &Poly::var_at(&c, &Q, 0) + &shear;
        let yp = Poly::var_at(&c, &Q, 1);
        let pp = rand_poly(&mut r, &ctx(&["t"]), &[0], 3, 3);
        if pp.is_constant() {
            return Ok(());
        }
        let f = pp.substitute(&PolyMap::new(pp.ctx(), &c, vec![xp.clone()]).unwrap()).unwrap();
        let as_x = |p: &Poly| p.substitute(&PolyMap::new(p.ctx(), &c, vec![Poly::var_at(&c, &Q, 0)]).unwrap()).unwrap();
        let (alpha, p) = rectify_pair(&f, &yp, Some(&xp)).unwrap();
        prop_assert_eq!(f.substitute(&alpha).unwrap(), as_x(&p));
        prop_assert_eq!(yp.substitute(&alpha).unwrap(), yp.clone());
        // without the hint only the built-in candidates are tried
        match rectify_pair(&f, &yp, None) {
            Ok((alpha, p)) => {
                prop_assert_eq!(f.substitute(&alpha).unwrap(), as_x(&p));
                prop_assert_eq!(yp.substitute(&alpha).unwrap(), yp);
            }
            Err(e) => prop_assert!(matches!(e, Error::NoInverseWithinDegree(_))),
        }
    }
}

#[test]
fn surface_with_a_nonlinear_fiber_is_rejected() {
    let c = ctx(&["x", "y"]);
    let p = parse(&c, "x^2").unwrap();
    let g = parse(&c, "x + y^2").unwrap();
    assert!(matches!(rectify_n1(&p, &g), Err(Error::TransversalityViolated(_))));
}

#[test]
fn strict_transform_rectifier_is_triangular_and_exact() {
    let (phi, phi_inv) = russell_transform_rectifier().unwrap();
    assert!(phi.compose(&phi_inv).unwrap().is_identity());
    let st = parse(phi.source(), "-x^2*t^3 + x^2*y + x*z^2 - 3*x*t^2 + 2*z - 3*t - 1").unwrap();
    assert_eq!(phi.image(3), &st);
    let pulled = st.substitute(&phi_inv).unwrap();
    assert_eq!(pulled.to_string(), "t");
}
