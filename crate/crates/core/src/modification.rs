//! Affine modifications `A[I/f]` of polynomial rings and hypersurfaces,
//! strict transforms under blowdown maps, and a gallery of classical
//! examples built through these constructions.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::parse::parse;
use crate::poly::{compose_all, Poly, PolyMap, VarContext};
use crate::scalar::{Field, Rational, Q};

/// The data `(A, I, f)`: `A` is the coordinate ring of affine space or of a
/// hypersurface in it, `I = (f, b_1, ..., b_s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineTriple {
    pub ambient: Arc<VarContext>,
    pub relation: Option<Poly>,
    pub f: Poly,
    pub center_gens: Vec<Poly>,
}

impl AffineTriple {
    pub fn new(ambient: &Arc<VarContext>, relation: Option<Poly>, f: Poly, center_gens: Vec<Poly>) -> Result<Self> {
        let t = AffineTriple {
            ambient: ambient.clone(),
            relation,
            f,
            center_gens,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let zero = Poly::zero(&self.ambient, &Q);
        for p in self.center_gens.iter().chain(self.relation.iter()).chain([&self.f]) {
            zero.checked_add(p)?;
        }
        if self.f.is_zero() {
            return Err(Error::InvalidInput("f must be nonzero".into()));
        }
        if let Some(rel) = &self.relation {
            if rel.is_constant() {
                return Err(Error::InvalidInput("relation must be non-constant".into()));
            }
            // on an irreducible hypersurface, f is a zero divisor iff the relation divides it
            if self.f.exact_divide(rel).is_ok() {
                return Err(Error::InvalidInput(format!("f = {} vanishes on the hypersurface", self.f)));
            }
        }
        Ok(())
    }

    /// Parse a triple from grammar strings over `vars`.
    pub fn parse(vars: &[&str], relation: Option<&str>, f: &str, center: &[&str]) -> Result<Self> {
        let ctx = VarContext::new(vars.iter().copied())?;
        let relation = relation.map(|r| parse(&ctx, r)).transpose()?;
        let f = parse(&ctx, f)?;
        let gens = center.iter().map(|b| parse(&ctx, b)).collect::<Result<_>>()?;
        Self::new(&ctx, relation, f, gens)
    }
}

/// How primality of the presentation ideal is justified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certification {
    /// One extra generator, no relation, `gcd(f, b_1) = 1`.
    Gcd,
    /// The center is a coordinate point and `f` one of its coordinate hyperplanes.
    PointCenter,
    /// Try [`Certification::Gcd`], then [`Certification::PointCenter`].
    Auto,
    /// The caller vouches for primality.
    Asserted,
}

/// `A' = A[y_1..y_s] / (f y_i - b_i)` together with the blowdown projection.
#[derive(Clone, Debug, PartialEq)]
pub struct ModPresentation {
    pub ctx: Arc<VarContext>,
    pub new_vars: Vec<String>,
    /// The relation of `X`, re-expressed in the extended context.
    pub relation: Option<Poly>,
    /// `f*y_i - b_i`, one per center generator.
    pub equations: Vec<Poly>,
    /// Projection from the extended space to the ambient one.
    pub blowdown: PolyMap,
    /// `b_0 = f, b_1, ..., b_s`; together with the equations they cut out the
    /// exceptional divisor.
    pub exceptional_eqs: Vec<Poly>,
    pub certified_by: Certification,
}

impl ModPresentation {
    /// Every `f*y_i - b_i` vanishes under `y_i := b_i/f`.
    pub fn fractions_annihilate(&self) -> Result<bool> {
        let f = &self.exceptional_eqs[0];
        let n = self.ctx.len();
        let w_name = self.ctx.fresh_name(&["w"], "w");
        let wctx = self.ctx.extend([w_name])?;
        let w = Poly::var_at(&wctx, &Q, n);
        let fw = f.embed(&wctx)?;
        for (i, eq) in self.equations.iter().enumerate() {
            let b = self.exceptional_eqs[i + 1].embed(&wctx)?;
            let mut images: Vec<Poly> = (0..n).map(|j| Poly::var_at(&wctx, &Q, j)).collect();
            images[self.ctx.len() - self.new_vars.len() + i] = &b * &w;
            let sub = eq.substitute(&PolyMap::new(&self.ctx, &wctx, images)?)?;
            // clear denominators: Σ c_k w^k  ↦  Σ c_k f^(d-k)
            let coeffs = sub.coeffs_in(n);
            let d = coeffs.len().saturating_sub(1) as u32;
            let mut acc = Poly::zero(&wctx, &Q);
            for (k, c) in coeffs.iter().enumerate() {
                acc = &acc + &(c * &fw.pow(d - k as u32));
            }
            if !acc.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn is_coordinate_hyperplane(p: &Poly) -> Option<usize> {
    if p.total_degree() != Some(1) {
        return None;
    }
    let vars = p.support_vars();
    (vars.len() == 1).then(|| vars[0])
}

fn certify(t: &AffineTriple, mode: Certification) -> Result<Certification> {
    if t.center_gens.is_empty() || mode == Certification::Asserted {
        return Ok(mode);
    }
    let gcd_ok = || -> Result<bool> {
        Ok(t.relation.is_none()
            && t.center_gens.len() == 1
            && t.f.gcd(&t.center_gens[0])?.is_constant())
    };
    let point_ok = || {
        if t.relation.is_some() {
            return false;
        }
        let mut seen = Vec::new();
        for p in std::iter::once(&t.f).chain(&t.center_gens) {
            match is_coordinate_hyperplane(p) {
                Some(v) if !seen.contains(&v) => seen.push(v),
                _ => return false,
            }
        }
        true
    };
    match mode {
        Certification::Gcd if gcd_ok()? => Ok(mode),
        Certification::Gcd => Err(Error::CertificationFailed(format!(
            "gcd certification needs a single generator coprime to f = {}",
            t.f
        ))),
        Certification::PointCenter if point_ok() => Ok(mode),
        Certification::PointCenter => Err(Error::CertificationFailed(
            "center is not a coordinate point with f a coordinate hyperplane".into(),
        )),
        Certification::Auto if gcd_ok()? => Ok(Certification::Gcd),
        Certification::Auto if point_ok() => Ok(Certification::PointCenter),
        Certification::Auto => Err(Error::CertificationFailed(
            "neither the gcd nor the point-center certificate applies".into(),
        )),
        Certification::Asserted => unreachable!(),
    }
}

fn new_var_names(ambient: &VarContext, s: usize) -> Vec<String> {
    if s == 1 {
        return vec![ambient.fresh_name(&["y", "z", "w", "s", "t"], "y")];
    }
    let mut names = Vec::new();
    let mut i = 1;
    while names.len() < s {
        let n = format!("y{i}");
        if ambient.index_of(&n).is_none() {
            names.push(n);
        }
        i += 1;
    }
    names
}

/// Presentation of the affine modification along `f` with center `I`.
pub fn modify(t: &AffineTriple, mode: Certification) -> Result<ModPresentation> {
    t.validate()?;
    let certified_by = certify(t, mode)?;
    let r = t.ambient.len();
    let new_vars = new_var_names(&t.ambient, t.center_gens.len());
    let ctx = t.ambient.extend(new_vars.iter().cloned())?;
    let f = t.f.embed(&ctx)?;
    let mut equations = Vec::new();
    let mut exceptional = vec![f.clone()];
    for (i, b) in t.center_gens.iter().enumerate() {
        let b = b.embed(&ctx)?;
        equations.push(&(&f * &Poly::var_at(&ctx, &Q, r + i)) - &b);
        exceptional.push(b);
    }
    let blowdown = PolyMap::new(&t.ambient, &ctx, (0..r).map(|i| Poly::var_at(&ctx, &Q, i)).collect())?;
    Ok(ModPresentation {
        relation: t.relation.as_ref().map(|p| p.embed(&ctx)).transpose()?,
        ctx,
        new_vars,
        equations,
        blowdown,
        exceptional_eqs: exceptional,
        certified_by,
    })
}

/// Pull `g` back along `blowdown` and divide out the largest power of the
/// exceptional variable: `g∘σ = e^μ · g₁`.
pub fn strict_transform(g: &Poly, blowdown: &PolyMap, exc_var: usize) -> Result<(u32, Poly)> {
    if g.is_zero() {
        return Err(Error::ZeroInput("strict_transform"));
    }
    let pulled = g.substitute(blowdown)?;
    if pulled.is_zero() {
        return Err(Error::InvalidInput(format!("{g} vanishes on the image of the blowdown")));
    }
    pulled.divide_out_power(exc_var)
}

/// `(p(y x_1, ..., y x_k) - y) / y` for `p(0) = 0`, over the ambient
/// context of `p` extended by one fresh variable.
pub fn modify_at_point(p: &Poly) -> Result<Poly> {
    if p.is_constant() {
        return Err(Error::InvalidInput("p must be non-constant".into()));
    }
    if !Q.is_zero(&p.constant_term()) {
        return Err(Error::InvalidInput(format!("p(0) = {} is not zero", p.constant_term())));
    }
    let k = p.ctx().len();
    let name = p.ctx().fresh_name(&["y", "z", "w", "s", "t"], "y");
    let ctx = p.ctx().extend([name])?;
    let y = Poly::var_at(&ctx, &Q, k);
    let images = (0..k).map(|i| &y * &Poly::var_at(&ctx, &Q, i)).collect();
    let pulled = p.substitute(&PolyMap::new(p.ctx(), &ctx, images)?)?;
    (&pulled - &y).exact_divide(&y)
}

/// Result of [`decompose_ci`].
#[derive(Clone, Debug)]
pub struct CiDecomposition {
    pub stage1: ModPresentation,
    pub stage2: PolyMap,
    pub check: bool,
}

/// Realize the `(f₁f₂, g)`-modification of the plane as the `(f₁, g)`
/// modification followed by `z ↦ f₂ z`.
pub fn decompose_ci(f1: &Poly, f2: &Poly, g: &Poly) -> Result<CiDecomposition> {
    let ambient = f1.ctx().clone();
    if ambient.len() != 2 {
        return Err(Error::InvalidInput("decomposition works over the plane (x, y)".into()));
    }
    let f = f1.checked_mul(f2)?;
    if !f.gcd(g)?.is_constant() {
        return Err(Error::CertificationFailed(format!("f = {f} and g = {g} share a factor")));
    }
    let stage1 = modify(
        &AffineTriple::new(&ambient, None, f1.clone(), vec![g.clone()])?,
        Certification::Gcd,
    )?;
    let ctx = stage1.ctx.clone();
    let z = Poly::var_at(&ctx, &Q, 2);
    let stage2 = PolyMap::endo(
        &ctx,
        vec![Poly::var_at(&ctx, &Q, 0), Poly::var_at(&ctx, &Q, 1), &f2.embed(&ctx)? * &z],
    )?;
    let composite_eq = stage1.equations[0].substitute(&stage2)?;
    let expected = &(&f.embed(&ctx)? * &z) - &g.embed(&ctx)?;
    let projection = stage1.blowdown.compose(&stage2)?;
    let check = composite_eq == expected && projection == stage1.blowdown;
    Ok(CiDecomposition { stage1, stage2, check })
}

/// The triple presenting `C[x̄][a₁/f₁, ..., a_k/f_k]` as an affine modification.
pub fn present_birational(ambient: &Arc<VarContext>, fractions: &[(Poly, Poly)]) -> Result<AffineTriple> {
    if fractions.is_empty() {
        return Err(Error::InvalidInput("no fractions given".into()));
    }
    let mut f = Poly::one(ambient, &Q);
    for (_, fi) in fractions {
        if fi.is_zero() {
            return Err(Error::ZeroInput("present_birational"));
        }
        f = f.checked_mul(fi)?;
    }
    let gens = fractions
        .iter()
        .map(|(a, fi)| f.checked_mul(a)?.exact_divide(fi))
        .collect::<Result<Vec<_>>>()?;
    AffineTriple::new(ambient, None, f, gens)
}

// ---------------------------------------------------------------------------
// Gallery

pub const GALLERY_NAMES: &[&str] = &["russell", "tdp", "tdp_general", "russell_strict_transform", "uv_system", "uv_power_system"];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GalleryParams {
    pub ints: BTreeMap<String, i64>,
    /// Polynomials `p_i` in the base variables (systems only).
    pub polys: Vec<String>,
}

impl GalleryParams {
    pub fn with(pairs: &[(&str, i64)]) -> Self {
        GalleryParams {
            ints: pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            polys: Vec::new(),
        }
    }

    fn int(&self, key: &str, default: Option<i64>) -> Result<i64> {
        self.ints
            .get(key)
            .copied()
            .or(default)
            .ok_or_else(|| Error::InvalidInput(format!("missing parameter `{key}`")))
    }

    fn positive(&self, key: &str, default: Option<i64>) -> Result<u32> {
        let v = self.int(key, default)?;
        if !(1..=64).contains(&v) {
            return Err(Error::InvalidInput(format!("parameter `{key}` = {v} must lie in 1..=64")));
        }
        Ok(v as u32)
    }
}

/// A closed-form comparison: `equation * denominator = unit * numerator`.
#[derive(Clone, Debug, PartialEq)]
pub struct Golden {
    pub numerator: String,
    pub denominator: String,
    pub unit: Rational,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GalleryEntry {
    pub name: String,
    pub ctx: Arc<VarContext>,
    pub equations: Vec<Poly>,
    pub golden: Option<Golden>,
}

fn golden(ctx: &Arc<VarContext>, built: &Poly, numerator: &str, denominator: &str) -> Result<Golden> {
    let num = parse(ctx, numerator)?;
    let den = parse(ctx, denominator)?;
    let lhs = built.checked_mul(&den)?;
    // lhs = unit * num for a nonzero constant unit
    let unit = match (lhs.leading_term(), num.leading_term()) {
        (Some((_, a)), Some((_, b))) => Q.div(a, b).expect("nonzero"),
        _ => Q.one(),
    };
    let matches = !lhs.is_zero() && lhs == num.scale(&unit);
    Ok(Golden {
        numerator: numerator.to_string(),
        denominator: denominator.to_string(),
        unit,
        matches,
    })
}

fn base_names(k: usize) -> Vec<String> {
    match k {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        _ => (1..=k).map(|i| format!("x{i}")).collect(),
    }
}

/// Build a named example through the modification pipeline and compare it
/// with its closed form where one is known.
pub fn gallery(name: &str, params: &GalleryParams) -> Result<GalleryEntry> {
    match name {
        "russell" => {
            let t = AffineTriple::parse(&["x", "z", "t"], None, "-x^2", &["x + z^2 + t^3"])?;
            let pres = modify(&t, Certification::Gcd)?;
            let ctx = VarContext::new(["x", "y", "z", "t"])?;
            let eq = pres.equations[0].embed(&ctx)?;
            let g = golden(&ctx, &eq, "x + x^2*y + z^2 + t^3", "1")?;
            Ok(GalleryEntry {
                name: name.into(),
                ctx,
                equations: vec![eq],
                golden: Some(g),
            })
        }
        "tdp" => {
            let k = params.positive("k", Some(2))?;
            let l = params.positive("l", Some(3))?;
            let plane = VarContext::new(["x", "y"])?;
            let p = parse(&plane, &format!("(x + 1)^{k} - (y + 1)^{l}"))?;
            let eq = modify_at_point(&p)?;
            let ctx = eq.ctx().clone();
            let g = golden(&ctx, &eq, &format!("(x*z + 1)^{k} - (y*z + 1)^{l} - z"), "z")?;
            Ok(GalleryEntry {
                name: name.into(),
                ctx,
                equations: vec![eq],
                golden: Some(g),
            })
        }
        "tdp_general" => {
            let k = params.positive("k", Some(2))?;
            let l = params.positive("l", Some(3))?;
            let s = params.positive("s", Some(5))?;
            let m = params.positive("m", Some(5))?;
            if m > s {
                return Err(Error::InvalidInput(format!("need m <= s, got m = {m}, s = {s}")));
            }
            let ctx = VarContext::new(["x", "y", "z"])?;
            let g = parse(&ctx, &format!("(x + 1)^{k} - (y + 1)^{l} - z^{s}"))?;
            // m successive modifications along z = 0 with center at the origin
            let step = PolyMap::endo(
                &ctx,
                vec![parse(&ctx, "x*z")?, parse(&ctx, "y*z")?, parse(&ctx, "z")?],
            )?;
            let blowdown = compose_all(&vec![step; m as usize])?;
            let (mu, eq) = strict_transform(&g, &blowdown, 2)?;
            if mu != m {
                return Err(Error::CertificationFailed(format!("expected multiplicity {m}, found {mu}")));
            }
            let gold = golden(
                &ctx,
                &eq,
                &format!("(x*z^{m} + 1)^{k} - (y*z^{m} + 1)^{l} - z^{s}"),
                &format!("z^{m}"),
            )?;
            Ok(GalleryEntry {
                name: name.into(),
                ctx,
                equations: vec![eq],
                golden: Some(gold),
            })
        }
        "russell_strict_transform" => {
            let ctx = VarContext::new(["x", "y", "z", "t"])?;
            let g = parse(&ctx, "-x + x^2*y + (z + 1)^2 - (t + 1)^3")?;
            let blowdown = PolyMap::endo(
                &ctx,
                vec![parse(&ctx, "x")?, parse(&ctx, "x*y")?, parse(&ctx, "x*z")?, parse(&ctx, "x*t")?],
            )?;
            let (mu, eq) = strict_transform(&g, &blowdown, 0)?;
            if mu != 1 {
                return Err(Error::CertificationFailed(format!("expected multiplicity 1, found {mu}")));
            }
            let gold = golden(&ctx, &eq, "-x + x^3*y + (x*z + 1)^2 - (x*t + 1)^3", "x")?;
            Ok(GalleryEntry {
                name: name.into(),
                ctx,
                equations: vec![eq],
                golden: Some(gold),
            })
        }
        "uv_system" | "uv_power_system" => {
            let k = params.positive("k", Some(2))? as usize;
            if params.polys.is_empty() {
                return Err(Error::InvalidInput("a system needs at least one polynomial".into()));
            }
            let base = base_names(k);
            let n = params.polys.len();
            let vnames: Vec<String> = if n == 1 {
                vec!["v".into()]
            } else {
                (1..=n).map(|i| format!("v{i}")).collect()
            };
            let mut ambient_names = base.clone();
            ambient_names.push("u".into());
            let ambient = VarContext::new(ambient_names)?;
            let ps = params
                .polys
                .iter()
                .map(|s| parse(&ambient, s))
                .collect::<Result<Vec<_>>>()?;
            if ps.iter().any(|p| p.depends_on(k)) {
                return Err(Error::InvalidInput("the p_i must not involve u".into()));
            }
            let u = Poly::var_at(&ambient, &Q, k);
            let triple = AffineTriple::new(&ambient, None, u, ps.clone())?;
            let pres = modify(&triple, Certification::Asserted)?;
            let mut names = base;
            names.push("u".into());
            names.extend(vnames);
            let ctx = VarContext::new(names)?;
            let mut equations: Vec<Poly> = pres
                .equations
                .iter()
                .map(|e| {
                    // rename the fresh modification variables to v_i
                    let images = (0..pres.ctx.len()).map(|j| Poly::var_at(&ctx, &Q, j)).collect();
                    e.substitute(&PolyMap::new(&pres.ctx, &ctx, images)?)
                })
                .collect::<Result<_>>()?;
            if name == "uv_power_system" {
                let s0 = params.positive("s0", Some(1))?;
                let u = Poly::var_at(&ctx, &Q, k);
                equations = (0..n)
                    .map(|i| {
                        let si = params.positive(&format!("s{}", i + 1), Some(1))?;
                        let v = Poly::var_at(&ctx, &Q, k + 1 + i);
                        Ok(&(&u.pow(s0) * &v.pow(si)) - &ps[i].embed(&ctx)?)
                    })
                    .collect::<Result<_>>()?;
            }
            Ok(GalleryEntry {
                name: name.into(),
                ctx,
                equations,
                golden: None,
            })
        }
        other => Err(Error::UnknownGallery(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn ctx(names: &[&str]) -> Arc<VarContext> {
        VarContext::new(names.iter().copied()).unwrap()
    }

    #[test]
    fn modify_examples() {
        let t = AffineTriple::parse(&["x", "y"], None, "x", &["y^2"]).unwrap();
        let pres = modify(&t, Certification::Auto).unwrap();
        assert_eq!(pres.new_vars, vec!["z".to_string()]);
        assert_eq!(pres.equations[0], parse(&pres.ctx, "x*z - y^2").unwrap());
        assert_eq!(pres.certified_by, Certification::Gcd);
        assert!(pres.fractions_annihilate().unwrap());

        let t = AffineTriple::parse(&["x", "y"], None, "x", &[]).unwrap();
        let pres = modify(&t, Certification::Gcd).unwrap();
        assert!(pres.equations.is_empty() && pres.new_vars.is_empty());

        let t = AffineTriple::parse(&["x", "y", "z"], None, "x", &["y", "z"]).unwrap();
        let pres = modify(&t, Certification::Auto).unwrap();
        assert_eq!(pres.certified_by, Certification::PointCenter);
        assert_eq!(pres.new_vars, vec!["y1".to_string(), "y2".to_string()]);
        assert!(pres.fractions_annihilate().unwrap());

        let t = AffineTriple::parse(&["x", "y"], None, "x^2", &["x*y"]).unwrap();
        assert!(matches!(modify(&t, Certification::Gcd), Err(Error::CertificationFailed(_))));
    }

    #[test]
    fn relation_must_not_swallow_f() {
        assert!(AffineTriple::parse(&["x", "y"], Some("x*y"), "x^2*y", &["y"]).is_err());
        assert!(AffineTriple::parse(&["x", "y"], Some("x*y - 1"), "x", &["y"]).is_ok());
    }

    #[test]
    fn strict_transform_examples() {
        let c = ctx(&["x", "y"]);
        let g = parse(&c, "y").unwrap();
        let (mu, g1) = strict_transform(&g, &PolyMap::identity(&c, &Q), 0).unwrap();
        assert_eq!((mu, g1), (0, g));
    }

    #[test]
    fn modify_at_point_examples() {
        let c = ctx(&["x"]);
        assert_eq!(modify_at_point(&parse(&c, "x").unwrap()).unwrap().to_string(), "x - 1");
        assert_eq!(modify_at_point(&parse(&c, "x^2").unwrap()).unwrap().to_string(), "x^2*y - 1");
        assert!(modify_at_point(&parse(&c, "x + 1").unwrap()).is_err());
    }

    #[test]
    fn decompose_examples() {
        let c = ctx(&["x", "y"]);
        let p = |s| parse(&c, s).unwrap();
        let d = decompose_ci(&p("x"), &p("x"), &p("y")).unwrap();
        assert!(d.check);
        assert_eq!(
            d.stage1.equations[0].substitute(&d.stage2).unwrap(),
            parse(&d.stage1.ctx, "x^2*z - y").unwrap()
        );
        let d = decompose_ci(&p("x"), &p("1"), &p("y")).unwrap();
        assert!(d.check && d.stage2.is_identity());
        assert!(decompose_ci(&p("x"), &p("y - 1"), &p("x + y")).unwrap().check);
        assert!(decompose_ci(&p("x"), &p("y"), &p("x*y + y")).is_err());
    }

    #[test]
    fn birational_examples() {
        let c = ctx(&["x", "y", "z"]);
        let p = |s| parse(&c, s).unwrap();
        let t = present_birational(&c, &[(p("y"), p("x"))]).unwrap();
        assert_eq!((t.f.clone(), t.center_gens.clone()), (p("x"), vec![p("y")]));
        let t = present_birational(&c, &[(p("y"), p("x")), (p("z"), p("x"))]).unwrap();
        assert_eq!((t.f.clone(), t.center_gens.clone()), (p("x^2"), vec![p("x*y"), p("x*z")]));
        let t = present_birational(&c, &[(p("1"), p("x"))]).unwrap();
        assert_eq!(t.center_gens, vec![p("1")]);
    }

    #[test]
    fn gallery_goldens() {
        let r = gallery("russell", &GalleryParams::default()).unwrap();
        let g = r.golden.unwrap();
        assert!(g.matches);
        assert_eq!(g.unit, int(-1));
        for (k, l) in [(2, 3), (2, 5), (3, 4)] {
            let e = gallery("tdp", &GalleryParams::with(&[("k", k), ("l", l)])).unwrap();
            assert!(e.golden.unwrap().matches, "tdp {k} {l}");
        }
        let e = gallery("tdp_general", &GalleryParams::with(&[("k", 2), ("l", 3), ("s", 5), ("m", 5)])).unwrap();
        assert!(e.golden.unwrap().matches);
        let e = gallery("russell_strict_transform", &GalleryParams::default()).unwrap();
        assert!(e.golden.as_ref().unwrap().matches);
        assert_eq!(
            e.equations[0],
            parse(&e.ctx, "x^2*y - x^2*t^3 + x*z^2 - 3*x*t^2 + 2*z - 3*t - 1").unwrap()
        );
        assert!(matches!(gallery("nope", &GalleryParams::default()), Err(Error::UnknownGallery(_))));
    }

    #[test]
    fn gallery_systems() {
        let mut params = GalleryParams::with(&[("k", 2)]);
        params.polys = vec!["x".into(), "y^2 - 1".into()];
        let e = gallery("uv_system", &params).unwrap();
        assert_eq!(e.ctx.joined(), "x,y,u,v1,v2");
        assert_eq!(e.equations[1], parse(&e.ctx, "u*v2 - y^2 + 1").unwrap());
        params.ints.insert("s0".into(), 2);
        params.ints.insert("s2".into(), 3);
        let e = gallery("uv_power_system", &params).unwrap();
        assert_eq!(e.equations[1], parse(&e.ctx, "u^2*v2^3 - y^2 + 1").unwrap());
    }
}
