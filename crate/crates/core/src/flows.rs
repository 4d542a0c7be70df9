//! Derivations, their exponential flows, automorphism words and the lifted
//! generators acting on the hypersurfaces `u*v = p(x̄)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::modification::ModPresentation;
use crate::parse::parse_in;
use crate::poly::{compose_all, Poly, PolyMap, VarContext};
use crate::scalar::{Field, Q};

// ---------------------------------------------------------------------------
// Derivations

/// A derivation of `F[x_1, ..., x_r]`, determined by the images of the variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivation<F: Field = Q> {
    ctx: Arc<VarContext>,
    images: Vec<Poly<F>>,
}

impl<F: Field> Derivation<F> {
    pub fn new(ctx: &Arc<VarContext>, images: Vec<Poly<F>>) -> Result<Self> {
        if images.len() != ctx.len() {
            return Err(Error::InvalidInput(format!(
                "{} images for {} variables",
                images.len(),
                ctx.len()
            )));
        }
        for p in &images {
            if p.ctx() != ctx {
                return Err(Error::ContextMismatch {
                    left: ctx.joined(),
                    right: p.ctx().joined(),
                });
            }
        }
        Ok(Derivation {
            ctx: ctx.clone(),
            images,
        })
    }

    pub fn zero(ctx: &Arc<VarContext>, field: &F) -> Self {
        Derivation {
            ctx: ctx.clone(),
            images: vec![Poly::zero(ctx, field); ctx.len()],
        }
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn images(&self) -> &[Poly<F>] {
        &self.images
    }

    /// Leibniz extension: `∂f = Σ ∂f/∂x_i · ∂(x_i)`.
    pub fn apply(&self, f: &Poly<F>) -> Result<Poly<F>> {
        let mut acc = Poly::zero(&self.ctx, f.field());
        for (i, img) in self.images.iter().enumerate() {
            if img.is_zero() || !f.depends_on(i) {
                continue;
            }
            acc = acc.checked_add(&f.diff_at(i).checked_mul(img)?)?;
        }
        if f.ctx() != &self.ctx {
            return Err(Error::ContextMismatch {
                left: self.ctx.joined(),
                right: f.ctx().joined(),
            });
        }
        Ok(acc)
    }
}

pub fn apply_derivation<F: Field>(d: &Derivation<F>, f: &Poly<F>) -> Result<Poly<F>> {
    d.apply(f)
}

/// Per-variable nilpotency orders: `∂^{orders[i]}(x_i) = 0`, with `bound` their maximum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotencyCertificate {
    pub orders: Vec<usize>,
    pub bound: usize,
}

impl NilpotencyCertificate {
    pub fn recheck<F: Field>(&self, d: &Derivation<F>) -> Result<bool> {
        Ok(check_lnd(d, self.bound.max(1))? == *self)
    }
}

pub fn check_lnd<F: Field>(d: &Derivation<F>, max_iter: usize) -> Result<NilpotencyCertificate> {
    if max_iter == 0 {
        return Err(Error::InvalidInput("max_iter must be at least 1".into()));
    }
    let field = d.images.first().map(|p| p.field().clone());
    let mut orders = Vec::with_capacity(d.ctx.len());
    for i in 0..d.ctx.len() {
        let mut a = Poly::var_at(&d.ctx, field.as_ref().expect("nonempty context"), i);
        let mut n = 0;
        while !a.is_zero() {
            if n == max_iter {
                return Err(Error::NotNilpotentWithin(max_iter));
            }
            a = d.apply(&a)?;
            n += 1;
        }
        orders.push(n);
    }
    let bound = orders.iter().copied().max().unwrap_or(0);
    Ok(NilpotencyCertificate { orders, bound })
}

/// `exp(t∂)`, with `t` a polynomial over a context containing the variables
/// of `∂` (by name): a constant for a concrete time, a fresh variable for a
/// symbolic one. The map has source `∂`'s context and target `t`'s.
pub fn exp_flow<F: Field>(d: &Derivation<F>, cert: &NilpotencyCertificate, t: &Poly<F>) -> Result<PolyMap<F>> {
    let target = t.ctx().clone();
    let field = t.field().clone();
    let mut images = Vec::with_capacity(d.ctx.len());
    for i in 0..d.ctx.len() {
        let mut a = Poly::var_at(&d.ctx, &field, i);
        let mut acc = Poly::zero(&target, &field);
        let mut tn = Poly::one(&target, &field);
        let mut fact = field.one();
        for n in 0..cert.orders[i] {
            if n > 0 {
                fact = field.mul(&fact, &field.from_int(n as i64));
                tn = tn.checked_mul(t)?;
            }
            let inv = field
                .inv(&fact)
                .ok_or_else(|| Error::UnsupportedField { op: "exp_flow", field: field.describe() })?;
            acc = acc.checked_add(&a.embed(&target)?.checked_mul(&tn)?.scale(&inv))?;
            a = d.apply(&a)?;
        }
        if !a.is_zero() {
            return Err(Error::CertificationFailed("nilpotency certificate does not match".into()));
        }
        images.push(acc);
    }
    PolyMap::new(&d.ctx, &target, images)
}

/// Context `ctx` extended by a fresh time variable, and that variable.
pub fn with_time_var<F: Field>(ctx: &Arc<VarContext>, field: &F) -> Result<(Arc<VarContext>, Poly<F>)> {
    let name = ctx.fresh_name(&["t", "tau", "s"], "t");
    let ext = ctx.extend([name])?;
    let t = Poly::var_at(&ext, field, ctx.len());
    Ok((ext, t))
}

// ---------------------------------------------------------------------------
// Elementary shears and words

/// `h·∂/∂x_d` with `h` free of `x_d`; its flow is `x_d ↦ x_d + t·h`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElemShear<F: Field = Q> {
    pub d: usize,
    pub h: Poly<F>,
}

impl<F: Field> ElemShear<F> {
    pub fn new(d: usize, h: Poly<F>) -> Result<Self> {
        if d >= h.ctx().len() {
            return Err(Error::InvalidInput(format!("direction {d} out of range")));
        }
        if h.depends_on(d) {
            return Err(Error::InvalidInput(format!(
                "shear coefficient {h} involves its own direction {}",
                h.ctx().names()[d]
            )));
        }
        Ok(ElemShear { d, h })
    }

    pub fn derivation(&self) -> Derivation<F> {
        let ctx = self.h.ctx().clone();
        let mut images = vec![Poly::zero(&ctx, self.h.field()); ctx.len()];
        images[self.d] = self.h.clone();
        Derivation { ctx, images }
    }
}

/// One letter of an automorphism word.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator<F: Field = Q> {
    /// `x_d ↦ x_d + t·h(x̄)` on affine space.
    Shear { shear: ElemShear<F>, t: F::Elem },
    /// Lifted flow fixing `v` (see [`HypersurfaceX`]).
    Lift1 { shear: ElemShear<F>, q: Poly<F>, t: F::Elem },
    /// Lifted flow fixing `u`: the conjugate of `Lift1` by `Eps`.
    Lift2 { shear: ElemShear<F>, q: Poly<F>, t: F::Elem },
    /// `(x̄, u, v) ↦ (x̄, v, u)`.
    Eps,
}

/// Context of the univariate polynomials `q`.
pub fn q_context() -> Arc<VarContext> {
    VarContext::new(["z"]).expect("valid context")
}

fn check_q<F: Field>(q: &Poly<F>, need_root_zero: bool) -> Result<()> {
    if q.ctx().names() != ["z"] {
        return Err(Error::InvalidInput(format!("q = {q} must be a polynomial in z")));
    }
    if need_root_zero && !q.field().is_zero(&q.constant_term()) {
        return Err(Error::InvalidInput(format!("q = {q} must vanish at 0")));
    }
    Ok(())
}

impl<F: Field> Generator<F> {
    pub fn shear(d: usize, h: Poly<F>, t: F::Elem) -> Result<Self> {
        Ok(Generator::Shear {
            shear: ElemShear::new(d, h)?,
            t,
        })
    }

    pub fn lift1(d: usize, h: Poly<F>, q: Poly<F>, t: F::Elem) -> Result<Self> {
        check_q(&q, true)?;
        Ok(Generator::Lift1 {
            shear: ElemShear::new(d, h)?,
            q,
            t,
        })
    }

    pub fn lift2(d: usize, h: Poly<F>, q: Poly<F>, t: F::Elem) -> Result<Self> {
        check_q(&q, true)?;
        Ok(Generator::Lift2 {
            shear: ElemShear::new(d, h)?,
            q,
            t,
        })
    }

    /// A `Lift1` without the `q(0) = 0` check; such a generator does not
    /// preserve `X` unless `q(0) = 0` or the shear direction is inert.
    pub fn lift1_unchecked(d: usize, h: Poly<F>, q: Poly<F>, t: F::Elem) -> Result<Self> {
        check_q(&q, false)?;
        Ok(Generator::Lift1 {
            shear: ElemShear::new(d, h)?,
            q,
            t,
        })
    }

    pub fn time(&self) -> Option<&F::Elem> {
        match self {
            Generator::Shear { t, .. } | Generator::Lift1 { t, .. } | Generator::Lift2 { t, .. } => Some(t),
            Generator::Eps => None,
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            Generator::Shear { shear, t } => Generator::Shear {
                shear: shear.clone(),
                t: shear.h.field().neg(t),
            },
            Generator::Lift1 { shear, q, t } => Generator::Lift1 {
                shear: shear.clone(),
                q: q.clone(),
                t: shear.h.field().neg(t),
            },
            Generator::Lift2 { shear, q, t } => Generator::Lift2 {
                shear: shear.clone(),
                q: q.clone(),
                t: shear.h.field().neg(t),
            },
            Generator::Eps => Generator::Eps,
        }
    }

    fn is_affine(&self) -> bool {
        matches!(self, Generator::Shear { .. })
    }
}

/// A word of generators, applied left to right: the first generator acts first.
#[derive(Clone, Debug, PartialEq)]
pub struct AutoWord<F: Field = Q> {
    base: Arc<VarContext>,
    gens: Vec<Generator<F>>,
}

impl<F: Field> AutoWord<F> {
    /// An empty word over the base variables `x̄`.
    pub fn new(base: &Arc<VarContext>) -> Self {
        AutoWord {
            base: base.clone(),
            gens: Vec::new(),
        }
    }

    pub fn from_gens(base: &Arc<VarContext>, gens: Vec<Generator<F>>) -> Result<Self> {
        let mut w = Self::new(base);
        for g in gens {
            w.push(g)?;
        }
        Ok(w)
    }

    pub fn base(&self) -> &Arc<VarContext> {
        &self.base
    }

    pub fn gens(&self) -> &[Generator<F>] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn push(&mut self, g: Generator<F>) -> Result<()> {
        match &g {
            Generator::Shear { shear, .. } | Generator::Lift1 { shear, .. } | Generator::Lift2 { shear, .. } => {
                if shear.h.ctx() != &self.base {
                    return Err(Error::ContextMismatch {
                        left: self.base.joined(),
                        right: shear.h.ctx().joined(),
                    });
                }
            }
            Generator::Eps => {}
        }
        self.gens.push(g);
        Ok(())
    }

    /// `self` followed by `other`.
    pub fn then(mut self, other: &Self) -> Result<Self> {
        if other.base != self.base {
            return Err(Error::ContextMismatch {
                left: self.base.joined(),
                right: other.base.joined(),
            });
        }
        self.gens.extend(other.gens.iter().cloned());
        Ok(self)
    }

    pub fn remove(&mut self, index: usize) -> Generator<F> {
        self.gens.remove(index)
    }

    pub fn is_affine(&self) -> bool {
        self.gens.iter().all(Generator::is_affine)
    }

    /// Point action on affine space (shear-only words).
    pub fn apply_affine(&self, point: &[F::Elem]) -> Result<Vec<F::Elem>> {
        let mut p = point.to_vec();
        for g in &self.gens {
            match g {
                Generator::Shear { shear, t } => {
                    let f = shear.h.field();
                    let s = f.mul(t, &shear.h.eval(&p)?);
                    p[shear.d] = f.add(&p[shear.d], &s);
                }
                _ => return Err(Error::InvalidInput("word acts on X, not on affine space".into())),
            }
        }
        Ok(p)
    }

    /// The word as a polynomial endomorphism of affine space.
    pub fn affine_polymap(&self, field: &F) -> Result<PolyMap<F>> {
        let mut maps = Vec::with_capacity(self.gens.len());
        for g in self.gens.iter().rev() {
            match g {
                Generator::Shear { shear, t } => {
                    let mut images: Vec<Poly<F>> = (0..self.base.len()).map(|i| Poly::var_at(&self.base, field, i)).collect();
                    images[shear.d] = images[shear.d].checked_add(&shear.h.scale(t))?;
                    maps.push(PolyMap::endo(&self.base, images)?);
                }
                _ => return Err(Error::InvalidInput("word acts on X, not on affine space".into())),
            }
        }
        if maps.is_empty() {
            return Ok(PolyMap::identity(&self.base, field));
        }
        compose_all(&maps)
    }
}

/// Reverse the word and negate every time.
pub fn invert_word<F: Field>(w: &AutoWord<F>) -> AutoWord<F> {
    AutoWord {
        base: w.base.clone(),
        gens: w.gens.iter().rev().map(Generator::inverse).collect(),
    }
}

// ---------------------------------------------------------------------------
// Text format

fn const_text<F: Field>(field: &F, c: &F::Elem) -> String {
    Poly::constant(&q_context(), field, c.clone()).to_string()
}

impl<F: Field> fmt::Display for AutoWord<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gens {
            match g {
                Generator::Shear { shear, t } => writeln!(
                    f,
                    "SHEAR d={} h={} t={}",
                    self.base.names()[shear.d],
                    shear.h,
                    const_text(shear.h.field(), t)
                )?,
                Generator::Lift1 { shear, q, t } | Generator::Lift2 { shear, q, t } => writeln!(
                    f,
                    "{} d={} h={} q={} t={}",
                    if matches!(g, Generator::Lift1 { .. }) { "LIFT1" } else { "LIFT2" },
                    self.base.names()[shear.d],
                    shear.h,
                    q,
                    const_text(shear.h.field(), t)
                )?,
                Generator::Eps => writeln!(f, "EPS")?,
            }
        }
        Ok(())
    }
}

/// Split `KEY a=.. b=..` into the keyword and its fields; values may contain spaces.
fn split_fields(line: &str) -> (String, Vec<(String, String)>) {
    let mut tokens = line.split_whitespace();
    let keyword = tokens.next().unwrap_or_default().to_string();
    let mut fields: Vec<(String, String)> = Vec::new();
    for tok in tokens {
        match tok.split_once('=') {
            Some((k, v)) if !k.is_empty() && k.chars().all(|c| c.is_ascii_alphabetic()) => {
                fields.push((k.to_string(), v.to_string()));
            }
            _ => match fields.last_mut() {
                Some((_, v)) => {
                    v.push(' ');
                    v.push_str(tok);
                }
                None => fields.push((String::new(), tok.to_string())),
            },
        }
    }
    (keyword, fields)
}

fn field_value<'a>(fields: &'a [(String, String)], key: &str, line_no: usize) -> Result<&'a str> {
    fields
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::Syntax {
            pos: line_no,
            msg: format!("line {line_no}: missing `{key}=`"),
        })
}

/// Parse one generator line; `None` for lines that are not generators.
pub fn parse_generator<F: Field>(base: &Arc<VarContext>, field: &F, line: &str, line_no: usize) -> Result<Option<Generator<F>>> {
    let (kw, fields) = split_fields(line);
    let line_err = |msg: String| Error::Syntax {
        pos: line_no,
        msg: format!("line {line_no}: {msg}"),
    };
    let known = ["d", "h", "q", "t"];
    if let Some((k, _)) = fields.iter().find(|(k, _)| !known.contains(&k.as_str())) {
        if matches!(kw.as_str(), "SHEAR" | "LIFT1" | "LIFT2" | "EPS") {
            return Err(line_err(format!("unexpected field `{k}`")));
        }
    }
    let time = |fields: &[(String, String)]| -> Result<F::Elem> {
        let t = parse_in(&q_context(), field, field_value(fields, "t", line_no)?)?;
        if !t.is_constant() {
            return Err(line_err("time must be a constant".into()));
        }
        Ok(t.constant_term())
    };
    let dir = |fields: &[(String, String)]| -> Result<usize> {
        base.var_index(field_value(fields, "d", line_no)?)
    };
    let h = |fields: &[(String, String)]| parse_in(base, field, field_value(fields, "h", line_no)?);
    let q = |fields: &[(String, String)]| parse_in(&q_context(), field, field_value(fields, "q", line_no)?);
    let g = match kw.as_str() {
        "EPS" => {
            if !fields.is_empty() {
                return Err(line_err("EPS takes no fields".into()));
            }
            Generator::Eps
        }
        "SHEAR" => Generator::shear(dir(&fields)?, h(&fields)?, time(&fields)?)?,
        // q(0) is not re-checked so that stored words are reproduced verbatim
        "LIFT1" | "LIFT2" => {
            let (d, h, q, t) = (dir(&fields)?, h(&fields)?, q(&fields)?, time(&fields)?);
            check_q(&q, false)?;
            let shear = ElemShear::new(d, h)?;
            if kw == "LIFT1" {
                Generator::Lift1 { shear, q, t }
            } else {
                Generator::Lift2 { shear, q, t }
            }
        }
        _ => return Ok(None),
    };
    Ok(Some(g))
}

impl<F: Field> AutoWord<F> {
    /// Parse the line format produced by `Display`. Blank lines and lines
    /// starting with `#` are skipped; other unknown lines are errors.
    pub fn parse_text(base: &Arc<VarContext>, field: &F, text: &str) -> Result<Self> {
        let mut w = Self::new(base);
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match parse_generator(base, field, line, i + 1)? {
                Some(g) => w.push(g)?,
                None => {
                    return Err(Error::Syntax {
                        pos: i + 1,
                        msg: format!("line {}: unknown generator `{line}`", i + 1),
                    })
                }
            }
        }
        Ok(w)
    }
}

// ---------------------------------------------------------------------------
// Inversion by undetermined coefficients

fn monomials_up_to(r: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; r];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, d, &mut cur, &mut out);
    out
}

/// The classical degree bound `deg^(r-1)` for the inverse of an automorphism.
pub fn default_inverse_degree<F: Field>(m: &PolyMap<F>) -> u32 {
    let d = m.max_degree().max(1);
    d.saturating_pow(m.source().len().saturating_sub(1) as u32)
}

/// The inverse of a square polynomial map among maps of degree at most `bound`.
pub fn invert_by_degree_bound<F: Field>(m: &PolyMap<F>, bound: u32) -> Result<PolyMap<F>> {
    let ctx = m.source().clone();
    if m.target() != &ctx {
        return Err(Error::InvalidInput("inversion needs a square map".into()));
    }
    let field = m
        .field()
        .ok_or_else(|| Error::InvalidInput("empty map".into()))?
        .clone();
    let r = ctx.len();
    let monos = monomials_up_to(r, bound);
    // m^α for every candidate monomial α, built from smaller ones
    let mut cache: std::collections::HashMap<Vec<u32>, Poly<F>> = std::collections::HashMap::new();
    cache.insert(vec![0; r], Poly::one(&ctx, &field));
    let mut sorted = monos.clone();
    sorted.sort_by_key(|e| e.iter().sum::<u32>());
    for e in &sorted {
        if cache.contains_key(e) {
            continue;
        }
        let i = e.iter().position(|&k| k > 0).expect("nonzero exponent");
        let mut prev = e.clone();
        prev[i] -= 1;
        let p = cache[&prev].checked_mul(m.image(i))?;
        cache.insert(e.clone(), p);
    }
    // one row per monomial appearing in any m^α (or in the right-hand sides)
    let mut row_index: std::collections::BTreeMap<Vec<u32>, usize> = std::collections::BTreeMap::new();
    let mut rows: Vec<Vec<(usize, F::Elem)>> = Vec::new();
    for (j, e) in monos.iter().enumerate() {
        for (mono, c) in cache[e].terms() {
            let n = row_index.len();
            let idx = *row_index.entry(mono.clone()).or_insert(n);
            if idx == rows.len() {
                rows.push(Vec::new());
            }
            rows[idx].push((j, c.clone()));
        }
    }
    for i in 0..r {
        let mut e = vec![0; r];
        e[i] = 1;
        let n = row_index.len();
        if *row_index.entry(e).or_insert(n) == rows.len() {
            rows.push(Vec::new());
        }
    }
    let rhs_row = |i: usize| {
        let mut e = vec![0; r];
        e[i] = 1;
        row_index[&e]
    };
    // A square subsystem of full rank has the only candidate solution; the
    // two-sided composition check below decides whether it solves everything.
    let selected = match linalg::independent_rows_mod(&field, &rows, monos.len(), linalg::LARGE_PRIME) {
        Some(sel) if sel.len() == monos.len() => sel,
        _ => (0..rows.len()).collect(),
    };
    let mut a: Matrix<F::Elem> = vec![vec![field.zero(); monos.len()]; selected.len()];
    for (k, &ri) in selected.iter().enumerate() {
        for (j, c) in &rows[ri] {
            a[k][*j] = c.clone();
        }
    }
    let bs: Vec<Vec<F::Elem>> = (0..r)
        .map(|i| {
            let target = rhs_row(i);
            selected
                .iter()
                .map(|&ri| if ri == target { field.one() } else { field.zero() })
                .collect()
        })
        .collect();
    let sols = linalg::solve_linear_multi(&field, &a, &bs).ok_or(Error::NoInverseWithinDegree(bound))?;
    let mut images = Vec::with_capacity(r);
    for sol in sols {
        let terms = monos.iter().cloned().zip(sol);
        images.push(Poly::from_terms(&ctx, &field, terms)?);
    }
    let inv = PolyMap::endo(&ctx, images)?;
    if inv.compose(m)?.is_identity() && m.compose(&inv)?.is_identity() {
        Ok(inv)
    } else {
        Err(Error::NoInverseWithinDegree(bound))
    }
}

// ---------------------------------------------------------------------------
// Lifting to modifications

/// Lift `∂` with `∂(f) = 0` and `∂(b_i) ∈ (f)` to the modification:
/// `∂'(x_j) = ∂(x_j)`, `∂'(y_i) = ∂(b_i)/f`.
pub fn lift_derivation(pres: &ModPresentation, d: &Derivation) -> Result<Derivation> {
    let ambient = pres.blowdown.source();
    if d.ctx() != ambient {
        return Err(Error::ContextMismatch {
            left: ambient.joined(),
            right: d.ctx().joined(),
        });
    }
    let f = pres.exceptional_eqs[0].clone();
    let back = |p: &Poly| -> Result<Poly> {
        // restrict a polynomial of the extended context free of the new variables
        let images = (0..ambient.len())
            .map(|i| Poly::var_at(ambient, &Q, i))
            .chain((0..pres.new_vars.len()).map(|_| Poly::zero(ambient, &Q)))
            .collect();
        p.substitute(&PolyMap::new(&pres.ctx, ambient, images)?)
    };
    let f_amb = back(&f)?;
    if !d.apply(&f_amb)?.is_zero() {
        return Err(Error::InvalidInput(format!("the derivation does not kill f = {f_amb}")));
    }
    let mut images: Vec<Poly> = d
        .images()
        .iter()
        .map(|p| p.embed(&pres.ctx))
        .collect::<Result<_>>()?;
    for b in &pres.exceptional_eqs[1..] {
        let db = d.apply(&back(b)?)?;
        let quotient = db.exact_divide(&f_amb)?;
        images.push(quotient.embed(&pres.ctx)?);
    }
    Derivation::new(&pres.ctx, images)
}

/// `σ*∘∂ = ∂'∘σ*` on the ambient variables and on `sample`, and `∂'` kills
/// every equation of the presentation.
pub fn lift_intertwines(pres: &ModPresentation, d: &Derivation, lifted: &Derivation, sample: &[Poly]) -> Result<bool> {
    let ambient = pres.blowdown.source();
    let vars = (0..ambient.len()).map(|i| Poly::var_at(ambient, &Q, i));
    for a in vars.chain(sample.iter().cloned()) {
        let lhs = d.apply(&a)?.substitute(&pres.blowdown)?;
        let rhs = lifted.apply(&a.substitute(&pres.blowdown)?)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    for eq in &pres.equations {
        if !lifted.apply(eq)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The blowdown `σ(x, y, z) = (x, y, xz)` of the modification along `x` with center `(x, z)`.
pub fn sigma_xz<F: Field>(ctx: &Arc<VarContext>, field: &F) -> Result<PolyMap<F>> {
    if ctx.len() != 3 {
        return Err(Error::ShapeMismatch("expected three variables".into()));
    }
    let v = |i| Poly::var_at(ctx, field, i);
    PolyMap::endo(ctx, vec![v(0), v(1), v(0).checked_mul(&v(2))?])
}

/// Lift `μ = (x, γ₁y + x·g₁, γ₂z + x·g₂)` through `σ(x, y, z) = (x, y, xz)`
/// to `μ' = (x, γ₁y + x·g₁∘σ, γ₂z + g₂∘σ)`, so that `μ∘σ = σ∘μ'`.
pub fn lift_auto_g<F: Field>(mu: &PolyMap<F>) -> Result<PolyMap<F>> {
    let ctx = mu.source().clone();
    if mu.target() != &ctx || ctx.len() != 3 {
        return Err(Error::ShapeMismatch("expected an endomorphism of three variables".into()));
    }
    let field = mu.field().expect("three images").clone();
    let v = |i| Poly::var_at(&ctx, &field, i);
    if mu.image(0) != &v(0) {
        return Err(Error::ShapeMismatch(format!("first component {} is not x", mu.image(0))));
    }
    let at_x0 = PolyMap::endo(&ctx, vec![Poly::zero(&ctx, &field), v(1), v(2)])?;
    let split = |i: usize| -> Result<(F::Elem, Poly<F>)> {
        let img = mu.image(i);
        let rest = img.substitute(&at_x0)?;
        let mut e = vec![0; 3];
        e[i] = 1;
        let gamma = rest.coefficient(&e);
        if field.is_zero(&gamma) || rest != v(i).scale(&gamma) {
            return Err(Error::ShapeMismatch(format!(
                "component {img} is not of the form γ·{} + x·g",
                ctx.names()[i]
            )));
        }
        let g = img.checked_sub(&v(i).scale(&gamma))?.exact_divide(&v(0))?;
        Ok((gamma, g))
    };
    let (g1c, g1) = split(1)?;
    let (g2c, g2) = split(2)?;
    let sigma = sigma_xz(&ctx, &field)?;
    let lifted = PolyMap::endo(
        &ctx,
        vec![
            v(0),
            v(1).scale(&g1c).checked_add(&v(0).checked_mul(&g1.substitute(&sigma)?)?)?,
            v(2).scale(&g2c).checked_add(&g2.substitute(&sigma)?)?,
        ],
    )?;
    if mu.compose(&sigma)? != sigma.compose(&lifted)? {
        return Err(Error::CertificationFailed("lifted map does not intertwine the blowdown".into()));
    }
    Ok(lifted)
}

// ---------------------------------------------------------------------------
// The hypersurfaces u*v = p(x̄)

#[derive(Clone, Debug, PartialEq)]
pub struct HypersurfaceX<F: Field = Q> {
    base: Arc<VarContext>,
    full: Arc<VarContext>,
    p: Poly<F>,
    p_full: Poly<F>,
}

/// A point `(x̄, u, v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct XPoint<F: Field = Q> {
    pub x: Vec<F::Elem>,
    pub u: F::Elem,
    pub v: F::Elem,
}

impl<F: Field> XPoint<F> {
    pub fn new(x: Vec<F::Elem>, u: F::Elem, v: F::Elem) -> Self {
        XPoint { x, u, v }
    }

    pub fn coords(&self) -> Vec<F::Elem> {
        let mut c = self.x.clone();
        c.push(self.u.clone());
        c.push(self.v.clone());
        c
    }

    pub fn from_coords(c: &[F::Elem]) -> Self {
        let k = c.len() - 2;
        XPoint {
            x: c[..k].to_vec(),
            u: c[k].clone(),
            v: c[k + 1].clone(),
        }
    }

    fn swapped(&self) -> Self {
        XPoint {
            x: self.x.clone(),
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }
}

impl<F: Field> HypersurfaceX<F> {
    /// `X(p)` in the coordinates `(x̄, u, v)`; `p` is a non-constant
    /// polynomial over the base variables, which must not be named `u` or `v`.
    pub fn new(p: &Poly<F>) -> Result<Self> {
        if p.is_constant() {
            return Err(Error::InvalidInput("p must be non-constant".into()));
        }
        let base = p.ctx().clone();
        let full = base.extend(["u", "v"])?;
        let p_full = p.embed(&full)?;
        Ok(HypersurfaceX {
            base,
            full,
            p: p.clone(),
            p_full,
        })
    }

    pub fn k(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &Arc<VarContext> {
        &self.base
    }

    pub fn full(&self) -> &Arc<VarContext> {
        &self.full
    }

    pub fn p(&self) -> &Poly<F> {
        &self.p
    }

    pub fn field(&self) -> &F {
        self.p.field()
    }

    pub fn u_index(&self) -> usize {
        self.k()
    }

    pub fn v_index(&self) -> usize {
        self.k() + 1
    }

    /// `u*v - p` over the full context.
    pub fn defining_poly(&self) -> Poly<F> {
        let u = Poly::var_at(&self.full, self.field(), self.u_index());
        let v = Poly::var_at(&self.full, self.field(), self.v_index());
        &(&u * &v) - &self.p_full
    }

    pub fn contains(&self, pt: &XPoint<F>) -> Result<bool> {
        if pt.x.len() != self.k() {
            return Err(Error::InvalidInput(format!(
                "point has {} base coordinates, expected {}",
                pt.x.len(),
                self.k()
            )));
        }
        let f = self.field();
        Ok(f.equal(&f.mul(&pt.u, &pt.v), &self.p.eval(&pt.x)?))
    }

    pub fn check_point(&self, pt: &XPoint<F>) -> Result<()> {
        if self.contains(pt)? {
            Ok(())
        } else {
            Err(Error::PointOffVariety(self.describe_point(pt)))
        }
    }

    pub fn describe_point(&self, pt: &XPoint<F>) -> String {
        let f = self.field();
        let c: Vec<String> = pt.coords().iter().map(|e| const_text(f, e)).collect();
        format!("({})", c.join(", "))
    }

    /// Images of the generator over `target`, a context containing the full
    /// variables by name; `t` is the time, a polynomial over `target`.
    pub fn generator_images(&self, g: &Generator<F>, target: &Arc<VarContext>, t: &Poly<F>) -> Result<Vec<Poly<F>>> {
        let field = self.field();
        let var = |i: usize| -> Result<Poly<F>> { Poly::var(target, field, &self.full.names()[i]) };
        let mut images: Vec<Poly<F>> = (0..self.full.len()).map(var).collect::<Result<_>>()?;
        let (shear, q, swap) = match g {
            Generator::Eps => {
                images.swap(self.u_index(), self.v_index());
                return Ok(images);
            }
            Generator::Shear { .. } => {
                return Err(Error::InvalidInput("a bare shear does not act on X".into()));
            }
            Generator::Lift1 { shear, q, .. } => (shear, q, false),
            Generator::Lift2 { shear, q, .. } => (shear, q, true),
        };
        // `fixed` plays the role of v for Lift1 and of u for Lift2
        let (moving, fixed) = if swap {
            (self.v_index(), self.u_index())
        } else {
            (self.u_index(), self.v_index())
        };
        let fixed_p = images[fixed].clone();
        let zmap = PolyMap::new(&q_context(), target, vec![fixed_p])?;
        let qv = q.substitute(&zmap)?;
        let q0 = q.constant_term();
        let z = Poly::var_at(&q_context(), field, 0);
        let q_tilde = q
            .checked_sub(&Poly::constant(&q_context(), field, q0))?
            .exact_divide(&z)?
            .substitute(&zmap)?;
        let h = shear.h.embed(target)?;
        let s = t.checked_mul(&qv)?.checked_mul(&h)?;
        // Δ_d(x̄, s) = Σ_{n≥1} s^(n-1) ∂_d^n p / n!
        let d = shear.d;
        let mut delta = Poly::zero(target, field);
        let mut deriv = self.p.diff_at(d);
        let mut spow = Poly::one(target, field);
        let mut fact = field.one();
        let mut n = 1i64;
        while !deriv.is_zero() {
            fact = field.mul(&fact, &field.from_int(n));
            let inv = field
                .inv(&fact)
                .ok_or_else(|| Error::UnsupportedField { op: "lift", field: field.describe() })?;
            delta = delta.checked_add(&deriv.embed(target)?.checked_mul(&spow)?.scale(&inv))?;
            spow = spow.checked_mul(&s)?;
            deriv = deriv.diff_at(d);
            n += 1;
        }
        images[d] = images[d].checked_add(&s)?;
        let du = t.checked_mul(&h)?.checked_mul(&q_tilde)?.checked_mul(&delta)?;
        images[moving] = images[moving].checked_add(&du)?;
        Ok(images)
    }

    /// The generator as an endomorphism of the full coordinate space.
    pub fn generator_polymap(&self, g: &Generator<F>) -> Result<PolyMap<F>> {
        let t = match g.time() {
            Some(t) => Poly::constant(&self.full, self.field(), t.clone()),
            None => Poly::zero(&self.full, self.field()),
        };
        PolyMap::endo(&self.full, self.generator_images(g, &self.full, &t)?)
    }

    /// Apply one generator to a point by evaluating the closed formulas.
    pub fn apply_generator(&self, g: &Generator<F>, pt: &XPoint<F>) -> Result<XPoint<F>> {
        let f = self.field();
        let (shear, q, t, swap) = match g {
            Generator::Eps => return Ok(pt.swapped()),
            Generator::Shear { .. } => return Err(Error::InvalidInput("a bare shear does not act on X".into())),
            Generator::Lift1 { shear, q, t } => (shear, q, t, false),
            Generator::Lift2 { shear, q, t } => (shear, q, t, true),
        };
        let work = if swap { pt.swapped() } else { pt.clone() };
        let qc = q.univariate_coeffs(0)?;
        let qv = q.eval(std::slice::from_ref(&work.v))?;
        // q̃(v) = (q(v) - q(0)) / v, evaluated from the coefficients
        let mut qt = f.zero();
        for c in qc.iter().skip(1).rev() {
            qt = f.add(&f.mul(&qt, &work.v), c);
        }
        let hx = shear.h.eval(&work.x)?;
        let s = f.mul(&f.mul(t, &qv), &hx);
        let mut nx = work.x.clone();
        nx[shear.d] = f.add(&nx[shear.d], &s);
        let delta = if f.is_zero(&s) {
            self.p.diff_at(shear.d).eval(&work.x)?
        } else {
            f.div(&f.sub(&self.p.eval(&nx)?, &self.p.eval(&work.x)?), &s)
                .expect("nonzero step")
        };
        let nu = f.add(&work.u, &f.mul(&f.mul(&f.mul(t, &hx), &qt), &delta));
        let out = XPoint {
            x: nx,
            u: nu,
            v: work.v.clone(),
        };
        Ok(if swap { out.swapped() } else { out })
    }

    pub fn apply_word(&self, w: &AutoWord<F>, pt: &XPoint<F>) -> Result<XPoint<F>> {
        w.gens.iter().try_fold(pt.clone(), |p, g| self.apply_generator(g, &p))
    }

    /// The word as an endomorphism of the full coordinate space.
    pub fn word_polymap(&self, w: &AutoWord<F>) -> Result<PolyMap<F>> {
        let maps = w
            .gens
            .iter()
            .rev()
            .map(|g| self.generator_polymap(g))
            .collect::<Result<Vec<_>>>()?;
        if maps.is_empty() {
            return Ok(PolyMap::identity(&self.full, self.field()));
        }
        compose_all(&maps)
    }

    /// Whether `g`, with its time replaced by a free variable, maps `X` into
    /// `X`: `(u*v - p)∘g` reduces to zero modulo `u*v - p`.
    pub fn generator_preserves(&self, g: &Generator<F>) -> Result<bool> {
        let (tctx, t) = with_time_var(&self.full, self.field())?;
        let images = self.generator_images(g, &tctx, &t)?;
        let pulled = self.defining_poly().substitute(&PolyMap::new(&self.full, &tctx, images)?)?;
        let p = self.p.embed(&tctx)?;
        Ok(pulled.reduce_mod_uv(self.u_index(), self.v_index(), &p)?.is_zero())
    }

    /// Every generator of the word preserves `X` identically in its time.
    pub fn verify_preserves(&self, w: &AutoWord<F>) -> Result<bool> {
        for g in &w.gens {
            if matches!(g, Generator::Shear { .. }) || !self.generator_preserves(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn apply_xgen<F: Field>(x: &HypersurfaceX<F>, g: &Generator<F>, pt: &XPoint<F>) -> Result<XPoint<F>> {
    x.check_point(pt)?;
    x.apply_generator(g, pt)
}

pub fn xgen_polymap<F: Field>(x: &HypersurfaceX<F>, g: &Generator<F>) -> Result<PolyMap<F>> {
    x.generator_polymap(g)
}

pub fn verify_preserves_x<F: Field>(x: &HypersurfaceX<F>, w: &AutoWord<F>) -> Result<bool> {
    x.verify_preserves(w)
}

// ---------------------------------------------------------------------------
// SL_k as a product of shears

/// A word of coordinate transvections `x_i ↦ x_i + c·x_j` realizing the
/// linear map `x̄ ↦ M x̄`.
pub fn sl_decompose<F: Field>(base: &Arc<VarContext>, field: &F, m: &Matrix<F::Elem>) -> Result<AutoWord<F>> {
    if m.len() != base.len() {
        return Err(Error::InvalidInput(format!(
            "{}x{} matrix for {} variables",
            m.len(),
            m.len(),
            base.len()
        )));
    }
    let factors = linalg::sl_factor(field, m)?;
    let mut w = AutoWord::new(base);
    for tv in &factors {
        let h = Poly::var_at(base, field, tv.source).scale(&tv.coeff);
        w.push(Generator::shear(tv.target, h, field.one())?)?;
    }
    let check = (0..base.len()).all(|j| {
        let mut e = vec![field.zero(); base.len()];
        e[j] = field.one();
        let image = w.apply_affine(&e).expect("affine word");
        (0..base.len()).all(|i| field.equal(&image[i], &m[i][j]))
    });
    if !check {
        return Err(Error::CertificationFailed("transvection word does not reproduce the matrix".into()));
    }
    Ok(w)
}
