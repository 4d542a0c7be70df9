//! Sparse multivariate polynomials over a [`Field`].
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors whose length equals
//! the arity of the polynomial's [`VarContext`]. Zero coefficients are never
//! stored. Canonical printing orders monomials by graded lex, descending, over
//! the declared variable order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{Field, Q};

pub type Exps = Vec<u32>;

/// Ordered, duplicate-free list of variable names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarContext {
    names: Vec<String>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VarContext {
    pub fn new<I, S>(names: I) -> Result<Arc<VarContext>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidContext("no variables".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(Error::InvalidContext(format!("`{n}` is not an identifier")));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidContext(format!("duplicate variable `{n}`")));
            }
        }
        Ok(Arc::new(VarContext { names }))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// A new context with `extra` appended.
    pub fn extend<I, S>(&self, extra: I) -> Result<Arc<VarContext>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        VarContext::new(
            self.names
                .iter()
                .cloned()
                .chain(extra.into_iter().map(Into::into)),
        )
    }

    /// First name from `candidates`, then `prefix1`, `prefix2`, ... not already used.
    pub fn fresh_name(&self, candidates: &[&str], prefix: &str) -> String {
        for c in candidates {
            if self.index_of(c).is_none() {
                return (*c).to_string();
            }
        }
        (1..)
            .map(|i| format!("{prefix}{i}"))
            .find(|n| self.index_of(n).is_none())
            .expect("infinite supply of names")
    }

    pub fn joined(&self) -> String {
        self.names.join(",")
    }
}

fn same_ctx(a: &Arc<VarContext>, b: &Arc<VarContext>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

pub(crate) fn check_ctx(a: &Arc<VarContext>, b: &Arc<VarContext>) -> Result<()> {
    if same_ctx(a, b) {
        Ok(())
    } else {
        Err(Error::ContextMismatch {
            left: a.joined(),
            right: b.joined(),
        })
    }
}

/// Graded lex: total degree first, then the first differing exponent.
pub fn grlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

#[derive(Clone)]
pub struct Poly<F: Field = Q> {
    ctx: Arc<VarContext>,
    field: F,
    terms: BTreeMap<Exps, F::Elem>,
}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.ctx.joined(), self)
    }
}

impl<F: Field> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        same_ctx(&self.ctx, &other.ctx)
            && self.field == other.field
            && self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(other.terms.iter())
                .all(|((ea, ca), (eb, cb))| ea == eb && self.field.equal(ca, cb))
    }
}

impl<F: Field> Poly<F> {
    pub fn zero(ctx: &Arc<VarContext>, field: &F) -> Self {
        Poly {
            ctx: ctx.clone(),
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Arc<VarContext>, field: &F, c: F::Elem) -> Self {
        let mut p = Self::zero(ctx, field);
        if !field.is_zero(&c) {
            p.terms.insert(vec![0; ctx.len()], c);
        }
        p
    }

    pub fn one(ctx: &Arc<VarContext>, field: &F) -> Self {
        Self::constant(ctx, field, field.one())
    }

    pub fn from_int(ctx: &Arc<VarContext>, field: &F, n: i64) -> Self {
        Self::constant(ctx, field, field.from_int(n))
    }

    pub fn var(ctx: &Arc<VarContext>, field: &F, name: &str) -> Result<Self> {
        let i = ctx.var_index(name)?;
        Ok(Self::var_at(ctx, field, i))
    }

    pub fn var_at(ctx: &Arc<VarContext>, field: &F, i: usize) -> Self {
        let mut e = vec![0; ctx.len()];
        e[i] = 1;
        Self::monomial(ctx, field, e, field.one())
    }

    pub fn monomial(ctx: &Arc<VarContext>, field: &F, exps: Exps, c: F::Elem) -> Self {
        assert_eq!(exps.len(), ctx.len(), "exponent vector arity");
        let mut p = Self::zero(ctx, field);
        if !field.is_zero(&c) {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn from_terms<I>(ctx: &Arc<VarContext>, field: &F, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exps, F::Elem)>,
    {
        let mut p = Self::zero(ctx, field);
        for (e, c) in terms {
            if e.len() != ctx.len() {
                return Err(Error::InvalidInput(format!(
                    "exponent vector of length {} in a context of arity {}",
                    e.len(),
                    ctx.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exps, c: F::Elem) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                if !self.field.is_zero(&c) {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let s = self.field.add(o.get(), &c);
                if self.field.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &F::Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// Coefficient of the zero monomial.
    pub fn constant_term(&self) -> F::Elem {
        self.terms
            .get(&vec![0; self.ctx.len()])
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn coefficient(&self, exps: &[u32]) -> F::Elem {
        self.terms
            .get(exps)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    /// Indices of the variables that occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.ctx.len()).filter(|&i| self.depends_on(i)).collect()
    }

    /// Leading term under graded lex.
    pub fn leading_term(&self) -> Option<(&Exps, &F::Elem)> {
        self.terms.iter().max_by(|a, b| grlex_cmp(a.0, b.0))
    }

    pub(crate) fn compatible(&self, other: &Self) -> Result<()> {
        check_ctx(&self.ctx, &other.ctx)?;
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.describe(),
                right: other.field.describe(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), self.field.neg(c));
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        if let Some(p) = self.mul_over_integers(other) {
            return Ok(p);
        }
        let mut out = Self::zero(&self.ctx, &self.field);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exps = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, self.field.mul(ca, cb));
            }
        }
        Ok(out)
    }

    /// Product computed on integer-scaled coefficients, normalizing each
    /// result coefficient once; `None` for fields without that view.
    fn mul_over_integers(&self, other: &Self) -> Option<Self> {
        let (na, da) = self.field.as_scaled_integers(&self.terms.values().collect::<Vec<_>>())?;
        let (nb, db) = self.field.as_scaled_integers(&other.terms.values().collect::<Vec<_>>())?;
        let mut acc: std::collections::HashMap<Exps, BigInt> = std::collections::HashMap::new();
        for (ea, ca) in self.terms.keys().zip(&na) {
            for (eb, cb) in other.terms.keys().zip(&nb) {
                let e: Exps = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_default() += ca * cb;
            }
        }
        let den = da * db;
        let mut terms = BTreeMap::new();
        for (e, n) in acc {
            if !n.is_zero() {
                terms.insert(e, self.field.from_scaled_integer(n, &den)?);
            }
        }
        Some(Poly {
            ctx: self.ctx.clone(),
            field: self.field.clone(),
            terms,
        })
    }

    /// Power with a signed exponent so that negative exponents are reported, not wrapped.
    pub fn checked_pow(&self, exp: i64) -> Result<Self> {
        if exp < 0 {
            return Err(Error::InvalidInput(format!("negative exponent {exp}")));
        }
        let exp = u32::try_from(exp)
            .map_err(|_| Error::InvalidInput(format!("exponent {exp} too large")))?;
        Ok(self.pow(exp))
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut acc = Self::one(&self.ctx, &self.field);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let mut out = Self::zero(&self.ctx, &self.field);
        if self.field.is_zero(c) {
            return out;
        }
        for (e, a) in &self.terms {
            let v = self.field.mul(a, c);
            if !self.field.is_zero(&v) {
                out.terms.insert(e.clone(), v);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&self.field.neg(&self.field.one()))
    }

    /// Multiply by the monomial `x^exps`.
    pub fn shift(&self, exps: &[u32]) -> Self {
        let mut out = Self::zero(&self.ctx, &self.field);
        for (e, c) in &self.terms {
            let ne: Exps = e.iter().zip(exps).map(|(a, b)| a + b).collect();
            out.terms.insert(ne, c.clone());
        }
        out
    }

    pub fn eval(&self, point: &[F::Elem]) -> Result<F::Elem> {
        if point.len() != self.ctx.len() {
            return Err(Error::InvalidInput(format!(
                "point of length {} for context of arity {}",
                point.len(),
                self.ctx.len()
            )));
        }
        let f = &self.field;
        let mut acc = f.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = f.mul(&t, &f.pow(x, k));
                }
            }
            acc = f.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Replace each source variable by its image under `m`.
    pub fn substitute(&self, m: &PolyMap<F>) -> Result<Self> {
        check_ctx(&self.ctx, &m.source)?;
        let mut out = Poly::zero(&m.target, &self.field);
        // cached powers of each image
        let mut powers: Vec<Vec<Poly<F>>> = m
            .images
            .iter()
            .map(|img| vec![Poly::one(&m.target, &self.field), img.clone()])
            .collect();
        for (e, c) in &self.terms {
            let mut t = Poly::constant(&m.target, &self.field, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = &powers[i][powers[i].len() - 1] * &m.images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][k];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to variable index `var`.
    pub fn diff_at(&self, var: usize) -> Self {
        let mut out = Self::zero(&self.ctx, &self.field);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[var] -= 1;
            out.add_term(ne, self.field.mul(c, &self.field.from_int(e[var] as i64)));
        }
        out
    }

    pub fn diff(&self, var: &str) -> Result<Self> {
        Ok(self.diff_at(self.ctx.var_index(var)?))
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.ctx.len()).map(|i| self.diff_at(i)).collect()
    }

    /// Quotient `q` with `self = b * q`, or `NotDivisible`.
    pub fn exact_divide(&self, b: &Self) -> Result<Self> {
        self.compatible(b)?;
        let (lb_e, lb_c) = match b.leading_term() {
            Some((e, c)) => (e.clone(), c.clone()),
            None => return Err(Error::ZeroInput("exact_divide")),
        };
        let lb_inv = self
            .field
            .inv(&lb_c)
            .ok_or_else(|| Error::NotDivisible("leading coefficient is not invertible".into()))?;
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.ctx, &self.field);
        let not_div = || Error::NotDivisible(format!("({self}) / ({b})"));
        while let Some((re, rc)) = rem.leading_term().map(|(e, c)| (e.clone(), c.clone())) {
            if re.iter().zip(&lb_e).any(|(a, b)| a < b) {
                return Err(not_div());
            }
            let qe: Exps = re.iter().zip(&lb_e).map(|(a, b)| a - b).collect();
            let qc = self.field.mul(&rc, &lb_inv);
            let step = b.shift(&qe).scale(&qc);
            rem = &rem - &step;
            // inexact fields can leave a residue in the cancelled term
            rem.terms.remove(&re);
            quot.add_term(qe, qc);
        }
        if !self.field.is_exact() {
            let back = &(b * &quot) - self;
            if !back.terms.values().all(|c| self.field.is_zero(c)) {
                return Err(not_div());
            }
        }
        Ok(quot)
    }

    /// Largest `mu` with `var^mu | self`, and the cofactor.
    pub fn divide_out_power(&self, var: usize) -> Result<(u32, Self)> {
        if self.is_zero() {
            return Err(Error::ZeroInput("divide_out_power"));
        }
        let mu = self.terms.keys().map(|e| e[var]).min().unwrap_or(0);
        let mut out = Self::zero(&self.ctx, &self.field);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[var] -= mu;
            out.terms.insert(ne, c.clone());
        }
        Ok((mu, out))
    }

    /// Coefficients of `self` viewed as a polynomial in `var`; entry `i`
    /// multiplies `var^i` and is free of `var`.
    pub fn coeffs_in(&self, var: usize) -> Vec<Self> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Self::zero(&self.ctx, &self.field); deg + 1];
        if self.is_zero() {
            return vec![];
        }
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne[var] as usize;
            ne[var] = 0;
            out[k].terms.insert(ne, c.clone());
        }
        out
    }

    /// Ascending coefficient list when `self` involves no variable other than `var`.
    pub fn univariate_coeffs(&self, var: usize) -> Result<Vec<F::Elem>> {
        if self.support_vars().iter().any(|&v| v != var) {
            return Err(Error::InvalidInput(format!(
                "{self} is not univariate in {}",
                self.ctx.names[var]
            )));
        }
        let deg = self.degree_in(var) as usize;
        let mut out = vec![self.field.zero(); if self.is_zero() { 0 } else { deg + 1 }];
        for (e, c) in &self.terms {
            out[e[var] as usize] = c.clone();
        }
        Ok(out)
    }

    pub fn from_univariate(ctx: &Arc<VarContext>, field: &F, var: usize, coeffs: &[F::Elem]) -> Self {
        let mut p = Self::zero(ctx, field);
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; ctx.len()];
            e[var] = k as u32;
            p.add_term(e, c.clone());
        }
        p
    }

    /// Scale so the leading (graded lex) coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = self.field.inv(c).expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    /// Re-express over `target`, matching variables by name.
    pub fn embed(&self, target: &Arc<VarContext>) -> Result<Self> {
        let map: Vec<usize> = self
            .ctx
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                if self.depends_on(i) {
                    target.var_index(n)
                } else {
                    Ok(usize::MAX)
                }
            })
            .collect::<Result<_>>()?;
        let mut out = Self::zero(target, &self.field);
        for (e, c) in &self.terms {
            let mut ne = vec![0; target.len()];
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    ne[map[i]] = k;
                }
            }
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    /// Normal form modulo `u*v - p`: every monomial `u^a v^b` with `a, b ≥ 1`
    /// is rewritten as `u^(a-m) v^(b-m) p^m`, `m = min(a, b)`. `p` must not
    /// involve `u` or `v`, so one pass reaches the fixpoint.
    pub fn reduce_mod_uv(&self, u: usize, v: usize, p: &Self) -> Result<Self> {
        self.compatible(p)?;
        if p.depends_on(u) || p.depends_on(v) {
            return Err(Error::InvalidInput("p must not involve u or v".into()));
        }
        let mut out = Self::zero(&self.ctx, &self.field);
        let mut ppow: Vec<Self> = vec![Self::one(&self.ctx, &self.field)];
        for (e, c) in &self.terms {
            let m = e[u].min(e[v]);
            if m == 0 {
                out.add_term(e.clone(), c.clone());
                continue;
            }
            while ppow.len() <= m as usize {
                let next = &ppow[ppow.len() - 1] * p;
                ppow.push(next);
            }
            let mut ne = e.clone();
            ne[u] -= m;
            ne[v] -= m;
            let t = ppow[m as usize].shift(&ne).scale(c);
            out = &out + &t;
        }
        Ok(out)
    }

    /// Greatest common divisor, normalized monic; exact fields only.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        if !self.field.is_exact() {
            return Err(Error::UnsupportedField {
                op: "gcd",
                field: self.field.describe(),
            });
        }
        Ok(gcd_rec(self, other).monic())
    }

    /// Resultant with respect to `var` via a fraction-free Sylvester determinant.
    pub fn resultant(&self, other: &Self, var: usize) -> Result<Self> {
        self.compatible(other)?;
        if !self.field.is_exact() {
            return Err(Error::UnsupportedField {
                op: "resultant",
                field: self.field.describe(),
            });
        }
        let a = self.coeffs_in(var);
        let b = other.coeffs_in(var);
        if a.is_empty() || b.is_empty() {
            return Ok(Self::zero(&self.ctx, &self.field));
        }
        let m = a.len() - 1;
        let n = b.len() - 1;
        if m == 0 && n == 0 {
            return Ok(Self::one(&self.ctx, &self.field));
        }
        if m == 0 {
            return Ok(a[0].pow(n as u32));
        }
        if n == 0 {
            return Ok(b[0].pow(m as u32));
        }
        let size = m + n;
        let zero = Self::zero(&self.ctx, &self.field);
        let mut mat = vec![vec![zero.clone(); size]; size];
        for r in 0..n {
            for (j, c) in a.iter().rev().enumerate() {
                mat[r][r + j] = c.clone();
            }
        }
        for r in 0..m {
            for (j, c) in b.iter().rev().enumerate() {
                mat[n + r][r + j] = c.clone();
            }
        }
        bareiss_det(mat)
    }
}

fn bareiss_det<F: Field>(mut mat: Vec<Vec<Poly<F>>>) -> Result<Poly<F>> {
    let n = mat.len();
    let ctx = mat[0][0].ctx.clone();
    let field = mat[0][0].field.clone();
    let mut sign = false;
    let mut prev = Poly::one(&ctx, &field);
    for k in 0..n {
        if mat[k][k].is_zero() {
            match (k + 1..n).find(|&r| !mat[r][k].is_zero()) {
                Some(r) => {
                    mat.swap(k, r);
                    sign = !sign;
                }
                None => return Ok(Poly::zero(&ctx, &field)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&mat[k][k] * &mat[i][j]) - &(&mat[i][k] * &mat[k][j]);
                mat[i][j] = num.exact_divide(&prev)?;
            }
        }
        prev = mat[k][k].clone();
    }
    let det = mat[n - 1][n - 1].clone();
    Ok(if sign { det.neg() } else { det })
}

fn content_in<F: Field>(p: &Poly<F>, var: usize) -> Poly<F> {
    let mut g = Poly::zero(&p.ctx, &p.field);
    for c in p.coeffs_in(var) {
        if c.is_zero() {
            continue;
        }
        g = gcd_rec(&g, &c);
        if g.is_constant() {
            return Poly::one(&p.ctx, &p.field);
        }
    }
    g
}

/// Pseudo-remainder of `a` by `b` in `var`.
fn prem<F: Field>(a: &Poly<F>, b: &Poly<F>, var: usize) -> Poly<F> {
    let db = b.degree_in(var);
    let lb = b.coeffs_in(var).pop().expect("b nonzero");
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(var) >= db {
        let dr = r.degree_in(var);
        let lr = r.coeffs_in(var).pop().expect("r nonzero");
        let mut sh = vec![0; a.ctx.len()];
        sh[var] = dr - db;
        r = &(&r * &lb) - &(&(b * &lr).shift(&sh));
    }
    r
}

fn gcd_rec<F: Field>(a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(&a.ctx, &a.field);
    }
    let var = (0..a.ctx.len())
        .find(|&i| a.depends_on(i) || b.depends_on(i))
        .expect("non-constant");
    let ca = content_in(a, var);
    let cb = content_in(b, var);
    let cont = gcd_rec(&ca, &cb);
    let mut x = a.exact_divide(&ca).expect("content divides");
    let mut y = b.exact_divide(&cb).expect("content divides");
    if x.degree_in(var) < y.degree_in(var) {
        std::mem::swap(&mut x, &mut y);
    }
    // primitive PRS
    while y.depends_on(var) {
        let r = prem(&x, &y, var);
        x = y;
        if r.is_zero() {
            y = Poly::zero(&a.ctx, &a.field);
            break;
        }
        let cr = content_in(&r, var);
        y = r.exact_divide(&cr).expect("content divides");
    }
    let g = if y.is_zero() {
        x
    } else {
        // y is free of var and nonzero: the primitive parts are coprime in var
        Poly::one(&a.ctx, &a.field)
    };
    let g = if g.depends_on(var) {
        let cg = content_in(&g, var);
        g.exact_divide(&cg).expect("content divides")
    } else {
        Poly::one(&a.ctx, &a.field)
    };
    (&g * &cont).monic()
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a, F: Field> std::ops::$tr<&'a Poly<F>> for &'a Poly<F> {
            type Output = Poly<F>;
            /// Panics when contexts or fields differ; use the `checked_*` form to recover.
            fn $m(self, rhs: &'a Poly<F>) -> Poly<F> {
                self.$checked(rhs).expect("incompatible polynomials")
            }
        }
        impl<F: Field> std::ops::$tr<Poly<F>> for Poly<F> {
            type Output = Poly<F>;
            fn $m(self, rhs: Poly<F>) -> Poly<F> {
                self.$checked(&rhs).expect("incompatible polynomials")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl<F: Field> std::ops::Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly::neg(self)
    }
}

impl<F: Field> std::ops::Neg for Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly::neg(&self)
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut terms: Vec<(&Exps, &F::Elem)> = self.terms.iter().collect();
        terms.sort_by(|a, b| grlex_cmp(b.0, a.0));
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let neg = self.field.is_negative(c);
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let coef = self.field.format(c);
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        self.ctx.names[i].clone()
                    } else {
                        format!("{}^{}", self.ctx.names[i], k)
                    }
                })
                .collect();
            if mono.is_empty() {
                f.write_str(&coef)?;
            } else {
                if coef != "1" {
                    write!(f, "{coef}*")?;
                }
                f.write_str(&mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// A polynomial map given by one image polynomial (over `target`) per
/// variable of `source`. Substitution pulls polynomials on `source` back to
/// `target`; on points the map sends `target`-space to `source`-space.
#[derive(Clone, PartialEq)]
pub struct PolyMap<F: Field = Q> {
    source: Arc<VarContext>,
    target: Arc<VarContext>,
    images: Vec<Poly<F>>,
}

impl<F: Field> fmt::Debug for PolyMap<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyMap({self})")
    }
}

impl<F: Field> fmt::Display for PolyMap<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .source
            .names
            .iter()
            .zip(&self.images)
            .map(|(n, p)| format!("{n} -> {p}"))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl<F: Field> PolyMap<F> {
    pub fn new(source: &Arc<VarContext>, target: &Arc<VarContext>, images: Vec<Poly<F>>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::InvalidInput(format!(
                "{} images for {} source variables",
                images.len(),
                source.len()
            )));
        }
        if let Some(first) = images.first() {
            for p in &images {
                check_ctx(p.ctx(), target)?;
                first.compatible(p)?;
            }
        }
        Ok(PolyMap {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    /// Endomorphism of `ctx` given by its images.
    pub fn endo(ctx: &Arc<VarContext>, images: Vec<Poly<F>>) -> Result<Self> {
        Self::new(ctx, ctx, images)
    }

    pub fn identity(ctx: &Arc<VarContext>, field: &F) -> Self {
        PolyMap {
            source: ctx.clone(),
            target: ctx.clone(),
            images: (0..ctx.len()).map(|i| Poly::var_at(ctx, field, i)).collect(),
        }
    }

    pub fn source(&self) -> &Arc<VarContext> {
        &self.source
    }

    pub fn target(&self) -> &Arc<VarContext> {
        &self.target
    }

    pub fn images(&self) -> &[Poly<F>] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Poly<F> {
        &self.images[i]
    }

    pub fn field(&self) -> Option<&F> {
        self.images.first().map(|p| p.field())
    }

    pub fn is_identity(&self) -> bool {
        same_ctx(&self.source, &self.target)
            && self.images.iter().enumerate().all(|(i, p)| {
                let mut e = vec![0; self.target.len()];
                e[i] = 1;
                p.num_terms() == 1 && p.field().is_one(&p.coefficient(&e))
            })
    }

    pub fn max_degree(&self) -> u32 {
        self.images
            .iter()
            .filter_map(|p| p.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// Point action: a point of `target`-space goes to its `source`-space image.
    pub fn apply(&self, point: &[F::Elem]) -> Result<Vec<F::Elem>> {
        self.images.iter().map(|p| p.eval(point)).collect()
    }

    /// `self ∘ inner` in the point-action sense: `P ↦ self(inner(P))`.
    /// Pulling back by the result equals pulling back by `self`, then by `inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        check_ctx(&self.target, &inner.source)?;
        let images = self
            .images
            .iter()
            .map(|p| p.substitute(inner))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMap {
            source: self.source.clone(),
            target: inner.target.clone(),
            images,
        })
    }
}

/// Point-action composition of a chain: `compose_all([a, b, c]) = a ∘ b ∘ c`.
pub fn compose_all<F: Field>(maps: &[PolyMap<F>]) -> Result<PolyMap<F>> {
    let (first, rest) = maps
        .split_first()
        .ok_or_else(|| Error::InvalidInput("empty composition".into()))?;
    rest.iter().try_fold(first.clone(), |acc, m| acc.compose(m))
}
