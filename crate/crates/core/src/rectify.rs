//! Surfaces `f(x,y)·zⁿ + g(x,y) = 0` in three-space: a smoothness test,
//! the normal form `p(x)z = γ(y − c) + x·h`, and an explicit automorphism
//! straightening `p(x)z = g` onto a plane `{y = c}`.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ffcount;
use crate::flows::{default_inverse_degree, invert_by_degree_bound};
use crate::linalg;
use crate::parse::parse;
use crate::poly::{compose_all, Poly, PolyMap, VarContext};
use crate::scalar::{format_rational, parse_rational, rational_roots, Rational, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct BinomialSurface {
    ctx: Arc<VarContext>,
    ctx3: Arc<VarContext>,
    f: Poly,
    g: Poly,
    n: u32,
}

impl BinomialSurface {
    /// `f·zⁿ + g = 0` with `f, g` in two variables.
    pub fn new(f: &Poly, g: &Poly, n: u32) -> Result<Self> {
        if f.ctx() != g.ctx() {
            return Err(Error::ContextMismatch {
                left: f.ctx().joined(),
                right: g.ctx().joined(),
            });
        }
        let ctx = f.ctx().clone();
        if ctx.len() != 2 {
            return Err(Error::InvalidInput("binomial surfaces live over two variables".into()));
        }
        if n == 0 {
            return Err(Error::InvalidInput("the exponent n must be positive".into()));
        }
        if f.is_constant() || g.is_constant() {
            return Err(Error::InvalidInput("f and g must be non-constant".into()));
        }
        if !f.gcd(g)?.is_constant() {
            return Err(Error::InvalidInput(format!("f = {f} and g = {g} have a common factor")));
        }
        let zname = ctx.fresh_name(&["z", "w", "s"], "z");
        let ctx3 = ctx.extend([zname])?;
        Ok(BinomialSurface {
            ctx,
            ctx3,
            f: f.clone(),
            g: g.clone(),
            n,
        })
    }

    /// The surface `p(x)·z = g(x,y)`.
    pub fn from_equation(p: &Poly, g: &Poly) -> Result<Self> {
        Self::new(p, &g.neg(), 1)
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn g(&self) -> &Poly {
        &self.g
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn plane_ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx3
    }

    pub fn defining_poly(&self) -> Result<Poly> {
        let f = self.f.embed(&self.ctx3)?;
        let g = self.g.embed(&self.ctx3)?;
        Ok(&(&f * &Poly::var_at(&self.ctx3, &Q, 2).pow(self.n)) + &g)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Smoothness {
    Smooth,
    /// A singular point; `z` is `None` when `zⁿ = z_pow` has no rational solution.
    SingularWitness {
        x: Rational,
        y: Rational,
        z: Option<Rational>,
        z_pow: Rational,
    },
    Undecided(String),
}

enum ZeroSet {
    Points(Vec<(Rational, Rational)>),
    /// All the polynomials vanish along this curve.
    Curve(Poly),
    Unknown(String),
}

/// Roots with multiplicity; `None` if some root is not rational.
fn split_roots(coeffs: &[Rational]) -> Option<Vec<Rational>> {
    let mut c: Vec<Rational> = coeffs.to_vec();
    while c.last().is_some_and(|a| a.is_zero()) {
        c.pop();
    }
    let mut out = Vec::new();
    for r in rational_roots(&c) {
        loop {
            // synthetic division by (x - r)
            let n = c.len();
            if n < 2 {
                break;
            }
            let mut q = vec![Rational::zero(); n - 1];
            let mut acc = Rational::zero();
            for i in (1..n).rev() {
                acc = &acc * &r + &c[i];
                q[i - 1] = acc.clone();
            }
            if !(&acc * &r + &c[0]).is_zero() {
                break;
            }
            c = q;
            out.push(r.clone());
        }
    }
    if c.len() > 1 {
        return None;
    }
    out.sort();
    Some(out)
}

fn eval2(p: &Poly, x: &Rational, y: &Rational) -> Result<Rational> {
    p.eval(&[x.clone(), y.clone()])
}

/// Common zeros of bivariate polynomials over `Q`.
fn common_zeros(polys: &[Poly]) -> Result<ZeroSet> {
    let polys: Vec<Poly> = polys.iter().filter(|p| !p.is_zero()).cloned().collect();
    let Some(first) = polys.first() else {
        return Ok(ZeroSet::Unknown("all polynomials vanish".into()));
    };
    let mut g = first.clone();
    for p in &polys[1..] {
        g = g.gcd(p)?;
    }
    if !g.is_constant() {
        return Ok(ZeroSet::Curve(g));
    }
    let Some(partner) = polys[1..].iter().find(|p| first.gcd(p).is_ok_and(|d| d.is_constant())) else {
        return Ok(ZeroSet::Unknown("no coprime pair among the equations".into()));
    };
    let res = first.resultant(partner, 1)?;
    let xs = if res.is_constant() {
        Vec::new()
    } else {
        match split_roots(&res.univariate_coeffs(0)?) {
            Some(r) => r,
            None => return Ok(ZeroSet::Unknown("intersection has irrational x-coordinates".into())),
        }
    };
    let mut xs_distinct = xs;
    xs_distinct.dedup();
    let mut out = Vec::new();
    let yctx = VarContext::new(["y"])?;
    for x0 in xs_distinct {
        let restrict = |p: &Poly| -> Result<Poly> {
            let m = PolyMap::new(
                p.ctx(),
                &yctx,
                vec![Poly::constant(&yctx, &Q, x0.clone()), Poly::var_at(&yctx, &Q, 0)],
            )?;
            p.substitute(&m)
        };
        let mut gy = Poly::zero(&yctx, &Q);
        for p in &polys {
            gy = gy.gcd(&restrict(p)?)?;
        }
        if gy.is_zero() {
            return Ok(ZeroSet::Unknown("a whole vertical line is common".into()));
        }
        if gy.is_constant() {
            continue;
        }
        match split_roots(&gy.univariate_coeffs(0)?) {
            Some(mut ys) => {
                ys.dedup();
                out.extend(ys.into_iter().map(|y| (x0.clone(), y)));
            }
            None => return Ok(ZeroSet::Unknown("intersection has irrational y-coordinates".into())),
        }
    }
    Ok(ZeroSet::Points(out))
}

/// A rational point on a curve that is linear in one of its variables.
fn point_on_curve(c: &Poly) -> Result<Option<(Rational, Rational)>> {
    for var in 0..2 {
        if c.degree_in(var) != 1 {
            continue;
        }
        let cf = c.coeffs_in(var);
        for t in 0i64..50 {
            for s in [t, -t] {
                let other = Rational::from_integer(s.into());
                let pt = |v: Rational| if var == 0 { (v, other.clone()) } else { (other.clone(), v) };
                let (a, b) = pt(Rational::zero());
                let lead = eval2(&cf[1], &a, &b)?;
                if lead.is_zero() {
                    continue;
                }
                let v = -eval2(&cf[0], &a, &b)? / lead;
                return Ok(Some(pt(v)));
            }
        }
    }
    Ok(None)
}

fn rational_nth_root(a: &Rational, n: u32) -> Option<Rational> {
    if n == 1 {
        return Some(a.clone());
    }
    let mut coeffs = vec![Rational::zero(); n as usize + 1];
    coeffs[0] = -a.clone();
    coeffs[n as usize] = Rational::one();
    rational_roots(&coeffs).into_iter().next()
}

fn undecided_with_screening(s: &BinomialSurface, reason: String) -> Result<Smoothness> {
    let f = s.defining_poly()?;
    for q in [5u32, 7, 11, 13] {
        if let Ok(Some(pt)) = ffcount::singular_witness(std::slice::from_ref(&f), q, 200_000) {
            return Ok(Smoothness::Undecided(format!(
                "{reason}; singular point mod {q} at ({})",
                pt.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
            )));
        }
    }
    Ok(Smoothness::Undecided(format!("{reason}; no singular point found mod 5, 7, 11, 13")))
}

/// Singular points of `F = f·zⁿ + g` sit over `{f = g = 0}` where
/// `zⁿ·∇f + ∇g = 0`, and for `n ≥ 2` also over the singular points of `{g = 0}`.
pub fn smoothness_check(s: &BinomialSurface) -> Result<Smoothness> {
    let (f, g) = (&s.f, &s.g);
    let zero = Rational::zero();
    match common_zeros(&[f.clone(), g.clone()])? {
        ZeroSet::Unknown(r) => return undecided_with_screening(s, r),
        ZeroSet::Curve(_) => unreachable!("f and g are coprime"),
        ZeroSet::Points(pts) => {
            for (x0, y0) in pts {
                let gf = [eval2(&f.diff_at(0), &x0, &y0)?, eval2(&f.diff_at(1), &x0, &y0)?];
                let gg = [eval2(&g.diff_at(0), &x0, &y0)?, eval2(&g.diff_at(1), &x0, &y0)?];
                // ∇g = -λ ∇f with λ = zⁿ
                let lambda = if gf[0].is_zero() && gf[1].is_zero() {
                    if gg[0].is_zero() && gg[1].is_zero() {
                        Some(zero.clone())
                    } else {
                        None
                    }
                } else {
                    let i = if gf[0].is_zero() { 1 } else { 0 };
                    let l = -&gg[i] / &gf[i];
                    let j = 1 - i;
                    if (&gg[j] + &l * &gf[j]).is_zero() {
                        Some(l)
                    } else {
                        None
                    }
                };
                if let Some(l) = lambda {
                    return Ok(Smoothness::SingularWitness {
                        x: x0,
                        y: y0,
                        z: rational_nth_root(&l, s.n),
                        z_pow: l,
                    });
                }
            }
        }
    }
    if s.n >= 2 {
        match common_zeros(&[g.clone(), g.diff_at(0), g.diff_at(1)])? {
            ZeroSet::Unknown(r) => return undecided_with_screening(s, r),
            ZeroSet::Curve(c) => {
                return match point_on_curve(&c)? {
                    Some((x, y)) => Ok(Smoothness::SingularWitness {
                        x,
                        y,
                        z: Some(zero.clone()),
                        z_pow: zero,
                    }),
                    None => undecided_with_screening(s, format!("{{g = 0}} is singular along {c}")),
                };
            }
            ZeroSet::Points(pts) => {
                if let Some((x, y)) = pts.into_iter().next() {
                    return Ok(Smoothness::SingularWitness {
                        x,
                        y,
                        z: Some(zero.clone()),
                        z_pow: zero,
                    });
                }
            }
        }
    }
    Ok(Smoothness::Smooth)
}

/// `g = γ·(y − c) + (x − root)·h` at a root of `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm {
    pub root: Rational,
    pub h: Poly,
    pub c: Rational,
    pub gamma: Rational,
}

fn x_minus(ctx: &Arc<VarContext>, r: &Rational) -> Poly {
    &Poly::var_at(ctx, &Q, 0) - &Poly::constant(ctx, &Q, r.clone())
}

/// `g(r, y) = γ·(y − c)` with `γ ≠ 0`, or `TransversalityViolated`.
fn linear_fiber(g: &Poly, r: &Rational) -> Result<(Rational, Rational)> {
    let ctx = g.ctx();
    let mut images: Vec<Poly> = (0..ctx.len()).map(|i| Poly::var_at(ctx, &Q, i)).collect();
    images[0] = Poly::constant(ctx, &Q, r.clone());
    let at = PolyMap::endo(ctx, images)?;
    let fiber = g.substitute(&at)?;
    let cf = fiber.univariate_coeffs(1)?;
    if cf.len() != 2 {
        return Err(Error::TransversalityViolated(format!(
            "g restricted to x = {} is {fiber}, not of degree one in y",
            format_rational(r)
        )));
    }
    let gamma = cf[1].clone();
    Ok((-&cf[0] / &gamma, gamma))
}

fn roots_of(p: &Poly) -> Result<(Rational, Vec<Rational>)> {
    let coeffs = p
        .univariate_coeffs(0)
        .map_err(|_| Error::InvalidInput(format!("p = {p} must depend on x only")))?;
    if coeffs.len() < 2 {
        return Err(Error::InvalidInput("p must have degree at least one".into()));
    }
    let lead = coeffs.last().expect("nonempty").clone();
    let roots = split_roots(&coeffs).ok_or_else(|| Error::Unsupported(format!("p = {p} does not split over the rationals")))?;
    Ok((lead, roots))
}

/// Normal form at the smallest root of `p`, after checking that `g` is
/// linear in `y` over every root.
pub fn normal_form(p: &Poly, g: &Poly) -> Result<NormalForm> {
    if p.ctx() != g.ctx() || p.ctx().len() != 2 {
        return Err(Error::InvalidInput("p and g must share a two-variable context".into()));
    }
    let (_, roots) = roots_of(p)?;
    for r in &roots {
        linear_fiber(g, r)?;
    }
    normal_form_at(g, &roots[0])
}

fn normal_form_at(g: &Poly, r: &Rational) -> Result<NormalForm> {
    let ctx = g.ctx();
    let (c, gamma) = linear_fiber(g, r)?;
    let lin = (&Poly::var_at(ctx, &Q, 1) - &Poly::constant(ctx, &Q, c.clone())).scale(&gamma);
    let h = (g - &lin).exact_divide(&x_minus(ctx, r))?;
    Ok(NormalForm {
        root: r.clone(),
        h,
        c,
        gamma,
    })
}

/// One factor of a rectifying automorphism, with its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct RectStep {
    pub forward: PolyMap,
    pub inverse: PolyMap,
}

/// An automorphism of three-space, as factors applied in order, that sends
/// the surface onto the plane `{y = c}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RectifyWord {
    pub ctx: Arc<VarContext>,
    pub steps: Vec<RectStep>,
    pub c: Rational,
}

impl RectifyWord {
    pub fn forward(&self) -> Result<PolyMap> {
        if self.steps.is_empty() {
            return Ok(PolyMap::identity(&self.ctx, &Q));
        }
        let rev: Vec<PolyMap> = self.steps.iter().rev().map(|s| s.forward.clone()).collect();
        compose_all(&rev)
    }

    pub fn inverse(&self) -> Result<PolyMap> {
        if self.steps.is_empty() {
            return Ok(PolyMap::identity(&self.ctx, &Q));
        }
        let inv: Vec<PolyMap> = self.steps.iter().map(|s| s.inverse.clone()).collect();
        compose_all(&inv)
    }

    pub fn parse_text(ctx: &Arc<VarContext>, text: &str) -> Result<Self> {
        let mut steps = Vec::new();
        let mut c = None;
        let images = |s: &str| -> Result<Vec<Poly>> { s.split(';').map(|t| parse(ctx, t.trim())).collect() };
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("PLANE c=") {
                c = Some(parse_rational(rest.trim())?);
            } else if let Some(rest) = line.strip_prefix("STEP ") {
                let (fw, inv) = rest
                    .split_once(" INV ")
                    .ok_or_else(|| Error::InvalidInput(format!("line {}: STEP needs an INV part", no + 1)))?;
                steps.push(RectStep {
                    forward: PolyMap::endo(ctx, images(fw)?)?,
                    inverse: PolyMap::endo(ctx, images(inv)?)?,
                });
            } else {
                return Err(Error::InvalidInput(format!("line {}: unrecognized `{line}`", no + 1)));
            }
        }
        let c = c.ok_or_else(|| Error::InvalidInput("missing PLANE line".into()))?;
        Ok(RectifyWord { ctx: ctx.clone(), steps, c })
    }
}

impl fmt::Display for RectifyWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |m: &PolyMap| m.images().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ; ");
        for s in &self.steps {
            writeln!(f, "STEP {} INV {}", join(&s.forward), join(&s.inverse))?;
        }
        writeln!(f, "PLANE c={}", format_rational(&self.c))
    }
}

/// Pull back along `(x, y, z) ↦ (r, ·, 0)` with `y ↦ y_image`.
fn on_line(p: &Poly, r: &Rational, y_image: Poly) -> Result<Poly> {
    let ctx = p.ctx();
    let m = PolyMap::endo(ctx, vec![Poly::constant(ctx, &Q, r.clone()), y_image, Poly::zero(ctx, &Q)])?;
    p.substitute(&m)
}

fn rect(ctx3: &Arc<VarContext>, lead: &Rational, roots: &[Rational], g: &Poly, need: Option<&Rational>) -> Result<(Vec<RectStep>, Rational)> {
    let x = Poly::var_at(ctx3, &Q, 0);
    let y = Poly::var_at(ctx3, &Q, 1);
    let z = Poly::var_at(ctx3, &Q, 2);
    let r = &roots[0];
    let xr = x_minus(ctx3, r);
    let mut steps;
    let c;
    if roots.len() == 1 {
        // lead·(x−r)·z − g = (x−r)(lead·z − h) − γ(y − c)
        let nf = normal_form_at(g, r)?;
        c = nf.c;
        let h = &nf.h;
        let s1 = RectStep {
            forward: PolyMap::endo(ctx3, vec![x.clone(), y.clone(), &z.scale(lead) - h])?,
            inverse: PolyMap::endo(ctx3, vec![x.clone(), y.clone(), (&z + h).scale(&lead.recip())])?,
        };
        let shear = (&xr * &z).scale(&nf.gamma.recip());
        let s2 = RectStep {
            forward: PolyMap::endo(ctx3, vec![x.clone(), &y - &shear, z.clone()])?,
            inverse: PolyMap::endo(ctx3, vec![x.clone(), &y + &shear, z.clone()])?,
        };
        steps = vec![s1, s2];
    } else {
        let (sub, c_sub) = rect(ctx3, lead, &roots[1..], g, Some(r))?;
        c = c_sub;
        let sub_word = RectifyWord {
            ctx: ctx3.clone(),
            steps: sub,
            c: c.clone(),
        };
        // conjugate by σ(x, y, z) = (x, y, (x − r)z)
        let sigma = PolyMap::endo(ctx3, vec![x.clone(), y.clone(), &xr * &z])?;
        let lift = |m: &PolyMap| -> Result<PolyMap> {
            let yy = m.image(1).substitute(&sigma)?;
            let zz = m
                .image(2)
                .substitute(&sigma)?
                .exact_divide(&xr)
                .map_err(|_| Error::TransversalityViolated("lifted map is not polynomial".into()))?;
            PolyMap::endo(ctx3, vec![x.clone(), yy, zz])
        };
        steps = vec![RectStep {
            forward: lift(&sub_word.forward()?)?,
            inverse: lift(&sub_word.inverse()?)?,
        }];
    }
    if let Some(r_out) = need {
        // make the word preserve the line {x = r_out, z = 0}
        let fw = RectifyWord {
            ctx: ctx3.clone(),
            steps: steps.clone(),
            c: c.clone(),
        }
        .forward()?;
        let yl = on_line(fw.image(1), r_out, y.clone())?.univariate_coeffs(1)?;
        if yl.len() != 2 {
            return Err(Error::TransversalityViolated(format!(
                "the line x = {}, z = 0 is not mapped to a line",
                format_rational(r_out)
            )));
        }
        let (b, g1) = (&yl[0], &yl[1]);
        let pre = (&y - &Poly::constant(ctx3, &Q, b.clone())).scale(&g1.recip());
        let phi = on_line(fw.image(2), r_out, pre)?;
        if !phi.is_zero() {
            steps.push(RectStep {
                forward: PolyMap::endo(ctx3, vec![x.clone(), y.clone(), &z - &phi])?,
                inverse: PolyMap::endo(ctx3, vec![x, y, &z + &phi])?,
            });
        }
    }
    Ok((steps, c))
}

/// An automorphism sending `p(x)·z = g(x,y)` onto a plane `{y = c}`.
pub fn rectify_n1(p: &Poly, g: &Poly) -> Result<RectifyWord> {
    let surface = BinomialSurface::from_equation(p, g)?;
    let nf = normal_form(p, g)?;
    let (lead, roots) = roots_of(p)?;
    let ctx3 = surface.ctx().clone();
    let g3 = g.embed(&ctx3)?;
    let (steps, c) = rect(&ctx3, &lead, &roots, &g3, None)?;
    debug_assert!(nf.root == roots[0]);
    let word = RectifyWord { ctx: ctx3, steps, c };
    if !verify_rectified(&surface, &word) {
        return Err(Error::CertificationFailed("rectifying map does not straighten the surface".into()));
    }
    Ok(word)
}

/// `F∘W⁻¹ = κ·(y − c)` with `κ ≠ 0`, and the stored inverse really is one.
pub fn verify_rectified(s: &BinomialSurface, w: &RectifyWord) -> bool {
    let run = || -> Result<bool> {
        if s.n != 1 || &w.ctx != s.ctx() {
            return Ok(false);
        }
        for st in &w.steps {
            if !st.forward.compose(&st.inverse)?.is_identity() || !st.inverse.compose(&st.forward)?.is_identity() {
                return Ok(false);
            }
        }
        let pulled = s.defining_poly()?.substitute(&w.inverse()?)?;
        let ctx = s.ctx();
        let plane = &Poly::var_at(ctx, &Q, 1) - &Poly::constant(ctx, &Q, w.c.clone());
        let kappa = pulled.coefficient(&[0, 1, 0]);
        Ok(!kappa.is_zero() && pulled == plane.scale(&kappa))
    };
    run().unwrap_or(false)
}

/// `α` with `f∘α = P(x)` and `g∘α = y`, found by writing `f = P(f₁)` for a
/// candidate `f₁` and inverting `(f₁, g)`.
pub fn rectify_pair(f: &Poly, g: &Poly, f1_hint: Option<&Poly>) -> Result<(PolyMap, Poly)> {
    if f.ctx() != g.ctx() || f.ctx().len() != 2 {
        return Err(Error::InvalidInput("f and g must share a two-variable context".into()));
    }
    let ctx = f.ctx().clone();
    let mut candidates = vec![Poly::var_at(&ctx, &Q, 0), Poly::var_at(&ctx, &Q, 1)];
    if let Some(h) = f1_hint {
        candidates.push(h.embed(&ctx)?);
    }
    candidates.push(f.clone());
    let mut last_err = Error::NoInverseWithinDegree(0);
    for f1 in candidates {
        let Some(pcoeffs) = as_composite(f, &f1)? else {
            continue;
        };
        let beta = PolyMap::endo(&ctx, vec![f1.clone(), g.clone()])?;
        match invert_by_degree_bound(&beta, default_inverse_degree(&beta)) {
            Ok(alpha) => {
                let px = Poly::from_univariate(&ctx, &Q, 0, &pcoeffs);
                if f.substitute(&alpha)? != px || g.substitute(&alpha)? != Poly::var_at(&ctx, &Q, 1) {
                    return Err(Error::CertificationFailed("pair rectification does not verify".into()));
                }
                let tctx = VarContext::new(["t"])?;
                return Ok((alpha, Poly::from_univariate(&tctx, &Q, 0, &pcoeffs)));
            }
            Err(e @ Error::NoInverseWithinDegree(_)) => last_err = e,
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

/// Coefficients of `P` with `f = P(f₁)`, if any.
fn as_composite(f: &Poly, f1: &Poly) -> Result<Option<Vec<Rational>>> {
    let (Some(df), Some(d1)) = (f.total_degree(), f1.total_degree()) else {
        return Ok(None);
    };
    if d1 == 0 || df % d1 != 0 {
        return Ok(None);
    }
    let n = (df / d1) as usize;
    let mut powers = vec![Poly::one(f.ctx(), &Q)];
    for i in 1..=n {
        powers.push(&powers[i - 1] * f1);
    }
    let mut monos: Vec<Vec<u32>> = Vec::new();
    for p in powers.iter().chain(std::iter::once(f)) {
        for (e, _) in p.terms() {
            if !monos.contains(e) {
                monos.push(e.clone());
            }
        }
    }
    let a: Vec<Vec<Rational>> = monos.iter().map(|e| powers.iter().map(|p| p.coefficient(e)).collect()).collect();
    let b: Vec<Rational> = monos.iter().map(|e| f.coefficient(e)).collect();
    let Some(sol) = linalg::solve_linear(&Q, &a, &b) else {
        return Ok(None);
    };
    let check = sol.iter().zip(&powers).fold(Poly::zero(f.ctx(), &Q), |acc, (c, p)| &acc + &p.scale(c));
    Ok((&check == f).then_some(sol))
}

/// The triangular maps `α, β, γ` straightening the strict transform
/// `x²y + xz² + 2z − x²t³ − 3xt² − 3t − 1 = 0` of the Russell cubic:
/// returns `Φ = γ∘β∘α` and its inverse over `(x, y, z, t)`.
pub fn russell_transform_rectifier() -> Result<(PolyMap, PolyMap)> {
    let ctx = VarContext::new(["x", "y", "z", "t"])?;
    let p = |s: &str| parse(&ctx, s);
    let (x, y, z, t) = (p("x")?, p("y")?, p("z")?, p("t")?);
    let f_xt = p("-1/2*x*t^2*(x*t + 3)")?;
    let g_xut = p("z*t^2*(x*t + 3) + 1/4*x*t^4*(x*t + 3)^2")?;
    let h_xuv = p("x^2*y + x*z^2 + 2*z - 1")?;
    let alpha = PolyMap::endo(&ctx, vec![x.clone(), y.clone(), &z + &f_xt, t.clone()])?;
    let alpha_inv = PolyMap::endo(&ctx, vec![x.clone(), y.clone(), &z - &f_xt, t.clone()])?;
    let beta = PolyMap::endo(&ctx, vec![x.clone(), &y + &g_xut, z.clone(), t.clone()])?;
    let beta_inv = PolyMap::endo(&ctx, vec![x.clone(), &y - &g_xut, z.clone(), t.clone()])?;
    let gamma = PolyMap::endo(&ctx, vec![x.clone(), y.clone(), z.clone(), &t.scale(&Rational::from_integer((-3).into())) + &h_xuv])?;
    let gamma_inv = PolyMap::endo(&ctx, vec![x, y, z, (&h_xuv - &t).scale(&Rational::new(1.into(), 3.into()))])?;
    Ok((compose_all(&[gamma, beta, alpha])?, compose_all(&[alpha_inv, beta_inv, gamma_inv])?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn xy() -> Arc<VarContext> {
        VarContext::new(["x", "y"]).unwrap()
    }

    fn pp(s: &str) -> Poly {
        parse(&xy(), s).unwrap()
    }

    #[test]
    fn smoothness_examples() {
        let s = BinomialSurface::new(&pp("x*(x-1)"), &pp("y - x"), 1).unwrap();
        assert_eq!(smoothness_check(&s).unwrap(), Smoothness::Smooth);
        let s = BinomialSurface::new(&pp("x^2"), &pp("y^2"), 1).unwrap();
        assert!(matches!(smoothness_check(&s).unwrap(), Smoothness::SingularWitness { x, y, .. } if x.is_zero() && y.is_zero()));
        let s = BinomialSurface::new(&pp("x"), &pp("y"), 3).unwrap();
        assert_eq!(smoothness_check(&s).unwrap(), Smoothness::Smooth);
        // {g = 0} singular at the origin matters once n ≥ 2
        let s = BinomialSurface::new(&pp("x - 1"), &pp("y^2 - x^3"), 2).unwrap();
        assert!(matches!(smoothness_check(&s).unwrap(), Smoothness::SingularWitness { .. }));
        assert!(BinomialSurface::new(&pp("x"), &pp("x*y"), 1).is_err());
    }

    #[test]
    fn normal_form_examples() {
        let nf = normal_form(&pp("x"), &pp("y")).unwrap();
        assert!(nf.h.is_zero() && nf.c.is_zero() && nf.gamma == int(1));
        let nf = normal_form(&pp("x*(x-1)"), &pp("y - x")).unwrap();
        assert_eq!((nf.h.to_string(), nf.c.clone()), ("-1".to_string(), int(0)));
        let nf = normal_form(&pp("x"), &pp("y + x*(x+y)")).unwrap();
        assert_eq!(nf.h.to_string(), "x + y");
        assert!(matches!(normal_form(&pp("x^2"), &pp("x + y^2")), Err(Error::TransversalityViolated(_))));
        assert!(matches!(normal_form(&pp("x^2 - 2"), &pp("y")), Err(Error::Unsupported(_))));
    }

    #[test]
    fn rectify_examples() {
        let w = rectify_n1(&pp("x"), &pp("y + x*(x+y)")).unwrap();
        let fw = w.forward().unwrap();
        for yv in [-2, -1, 0, 3, 7] {
            let yv = int(yv);
            let img = fw.apply(&[int(1), yv.clone(), &yv * int(2) + int(1)]).unwrap();
            assert_eq!(img, vec![int(1), int(0), yv]);
        }
        let s = BinomialSurface::from_equation(&pp("x"), &pp("y")).unwrap();
        let w = rectify_n1(&pp("x"), &pp("y")).unwrap();
        let pulled = s.defining_poly().unwrap().substitute(&w.inverse().unwrap()).unwrap();
        assert_eq!(pulled.to_string(), "-y");

        let p = pp("x*(x-1)");
        let g = pp("y - x");
        let s = BinomialSurface::from_equation(&p, &g).unwrap();
        let w = rectify_n1(&p, &g).unwrap();
        assert!(verify_rectified(&s, &w));
        let mut dropped = w.clone();
        dropped.steps.remove(0);
        assert!(!verify_rectified(&s, &dropped));
        let id = RectifyWord { ctx: s.ctx().clone(), steps: vec![], c: int(0) };
        assert!(!verify_rectified(&s, &id));
        let back = RectifyWord::parse_text(s.ctx(), &w.to_string()).unwrap();
        assert_eq!(back, w);

        let p = pp("(x-1)*(x+2)*(x-3)");
        let g = pp("2*y - 3 + x*(x*y + 1 - y)");
        let s = BinomialSurface::from_equation(&p, &g).unwrap();
        let w = rectify_n1(&p, &g).unwrap();
        assert!(verify_rectified(&s, &w));
        // plane points pull back onto the surface
        let f = s.defining_poly().unwrap();
        let inv = w.inverse().unwrap();
        for (a, b) in [(0, 0), (1, 5), (-3, 2), (4, -1)] {
            let pt = inv.apply(&[int(a), w.c.clone(), int(b)]).unwrap();
            assert!(f.eval(&pt).unwrap().is_zero());
        }
    }

    #[test]
    fn example_4_1_fails() {
        assert!(matches!(rectify_n1(&pp("x^2"), &pp("x + y^2")), Err(Error::TransversalityViolated(_))));
    }

    #[test]
    fn pair_examples() {
        let (alpha, p) = rectify_pair(&pp("x^2"), &pp("y"), None).unwrap();
        assert!(alpha.is_identity());
        assert_eq!(p.to_string(), "t^2");
        let hint = pp("x + y^2");
        let (alpha, p) = rectify_pair(&pp("(x + y^2)^3"), &pp("y"), Some(&hint)).unwrap();
        assert_eq!(p.to_string(), "t^3");
        assert_eq!(pp("(x + y^2)^3").substitute(&alpha).unwrap().to_string(), "x^3");
        assert!(matches!(rectify_pair(&pp("x"), &pp("x*y + 1"), None), Err(Error::NoInverseWithinDegree(_))));
        let (_, p) = rectify_pair(&pp("x^2 - 1"), &pp("y + x^2"), None).unwrap();
        assert_eq!(p.to_string(), "t^2 - 1");
    }

    #[test]
    fn russell_strict_transform_rectified() {
        let (phi, phi_inv) = russell_transform_rectifier().unwrap();
        assert!(phi.compose(&phi_inv).unwrap().is_identity());
        assert!(phi_inv.compose(&phi).unwrap().is_identity());
        let ctx = phi.source().clone();
        let f = parse(&ctx, "x^2*y - x^2*t^3 + x*z^2 - 3*x*t^2 + 2*z - 3*t - 1").unwrap();
        let pulled = f.substitute(&phi_inv).unwrap();
        assert_eq!(pulled.total_degree(), Some(1));
        assert_eq!(pulled.to_string(), "t");
    }
}
