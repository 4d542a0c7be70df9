//! Constructive m-transitivity on the smooth part of `X(p) = {u*v = p(x̄)}`.
//!
//! The solver moves both point lists into the level set `U₁ = {u = 1}`
//! with words that fix the other `v`-levels pointwise, then connects the two
//! configurations inside `U₁` by lifting a triangular word on `x̄`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::flows::{invert_word, q_context, AutoWord, Generator, HypersurfaceX, XPoint};
use crate::linalg::{self, Matrix};
use crate::poly::{Poly, VarContext};
use crate::scalar::{bit_size, format_rational, rat, Field, Rational, Q};

/// `u = v = 0` and `grad p(x̄) = 0` is the singular locus.
pub fn is_smooth_point(x: &HypersurfaceX, pt: &XPoint) -> Result<bool> {
    x.check_point(pt)?;
    if !pt.u.is_zero() || !pt.v.is_zero() {
        return Ok(true);
    }
    for d in 0..x.k() {
        if !x.p().diff_at(d).eval(&pt.x)?.is_zero() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The Lagrange interpolant as a polynomial in `t`.
pub fn interpolate(nodes: &[Rational], values: &[Rational]) -> Result<Poly> {
    let ctx = VarContext::new(["t"])?;
    let coeffs = linalg::lagrange(&Q, nodes, values)?;
    Ok(Poly::from_univariate(&ctx, &Q, 0, &coeffs))
}

/// `0, 1, -1, 2, -2, ...`
fn integer_sequence() -> impl Iterator<Item = i64> {
    (0i64..).map(|n| if n % 2 == 1 { (n + 1) / 2 } else { -(n / 2) })
}

/// `1, -1, 1/2, -1/2, 1/3, ...`
fn time_sequence() -> impl Iterator<Item = Rational> {
    (1i64..).flat_map(|n| [rat(1, n), rat(-1, n)])
}

fn pairwise_distinct<T: PartialEq>(items: &[T]) -> bool {
    items.iter().enumerate().all(|(i, a)| items[..i].iter().all(|b| a != b))
}

/// Which shear parameters were chosen, and the resulting linear map.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationReport {
    /// For coordinate `i`, `c_i`: the row operation `x_i += Σ_j c_i^(rank j) x_j`.
    pub params: Vec<i64>,
    pub matrix: Matrix<Rational>,
}

/// A determinant-one linear change of coordinates, as a transvection word,
/// after which every coordinate separates the points within each given set.
pub fn separating_shear_setup(base: &Arc<VarContext>, sets: &[&[Vec<Rational>]]) -> Result<(AutoWord, SeparationReport)> {
    let k = base.len();
    for set in sets {
        if set.iter().any(|p| p.len() != k) {
            return Err(Error::InvalidInput(format!("points must have {k} coordinates")));
        }
        if !pairwise_distinct(set) {
            return Err(Error::DuplicatePoint);
        }
    }
    let mut matrix = linalg::identity(&Q, k);
    let mut current: Vec<Vec<Vec<Rational>>> = sets.iter().map(|s| s.to_vec()).collect();
    let mut params = Vec::with_capacity(k);
    for i in 0..k {
        let chosen = integer_sequence()
            .take(10_000)
            .find(|&c| {
                let coord = |p: &Vec<Rational>| -> Rational {
                    let mut acc = p[i].clone();
                    let mut pw = Rational::one();
                    for (j, pj) in p.iter().enumerate() {
                        if j != i {
                            pw *= Rational::from_integer(c.into());
                            acc += &pw * pj;
                        }
                    }
                    acc
                };
                current.iter().all(|s| pairwise_distinct(&s.iter().map(coord).collect::<Vec<_>>()))
            })
            .ok_or_else(|| Error::CertificationFailed("no separating shear found".into()))?;
        params.push(chosen);
        let c = Rational::from_integer(chosen.into());
        let mut pw = Rational::one();
        let mut row_op = vec![Rational::zero(); k];
        for (j, slot) in row_op.iter_mut().enumerate() {
            if j != i {
                pw *= &c;
                *slot = pw.clone();
            }
        }
        for set in current.iter_mut() {
            for p in set.iter_mut() {
                let delta: Rational = row_op.iter().zip(p.iter()).map(|(a, b)| a * b).sum();
                p[i] += delta;
            }
        }
        // row_i(M) += Σ_j a_j row_j(M)
        let old = matrix.clone();
        for col in 0..k {
            let delta: Rational = (0..k).map(|j| &row_op[j] * &old[j][col]).sum();
            matrix[i][col] += delta;
        }
    }
    let word = crate::flows::sl_decompose(base, &Q, &matrix)?;
    Ok((word, SeparationReport { params, matrix }))
}

fn shear_from_interpolant(base: &Arc<VarContext>, d: usize, var: usize, nodes: &[Rational], values: &[Rational]) -> Result<Option<Generator>> {
    let coeffs = linalg::lagrange(&Q, nodes, values)?;
    if coeffs.is_empty() {
        return Ok(None);
    }
    let h = Poly::from_univariate(base, &Q, var, &coeffs);
    Ok(Some(Generator::shear(d, h, Rational::one())?))
}

fn push_and_apply(word: &mut AutoWord, g: Generator, pts: &mut [Vec<Rational>]) -> Result<()> {
    let single = AutoWord::from_gens(word.base(), vec![g.clone()])?;
    for p in pts.iter_mut() {
        *p = single.apply_affine(p)?;
    }
    word.push(g)
}

/// Triangular part on the first `active` coordinates; all coordinates
/// must separate `src` and `dst`.
fn triangular_core(base: &Arc<VarContext>, active: usize, src: &mut [Vec<Rational>], dst: &[Vec<Rational>], word: &mut AutoWord) -> Result<()> {
    if active == 2 {
        // x1 += q(x2) matches first coordinates, then x2 += r(x1) matches second ones
        let nodes: Vec<Rational> = src.iter().map(|p| p[1].clone()).collect();
        let values: Vec<Rational> = src.iter().zip(dst).map(|(s, t)| &t[0] - &s[0]).collect();
        if let Some(g) = shear_from_interpolant(base, 0, 1, &nodes, &values)? {
            push_and_apply(word, g, src)?;
        }
    } else {
        triangular_core(base, active - 1, src, dst, word)?;
    }
    let last = active - 1;
    let nodes: Vec<Rational> = dst.iter().map(|t| t[0].clone()).collect();
    let values: Vec<Rational> = src.iter().zip(dst).map(|(s, t)| &t[last] - &s[last]).collect();
    if let Some(g) = shear_from_interpolant(base, last, 0, &nodes, &values)? {
        push_and_apply(word, g, src)?;
    }
    Ok(())
}

/// A shear word on affine space sending `sources[i]` to `targets[i]`.
pub fn g0_transitive(base: &Arc<VarContext>, sources: &[Vec<Rational>], targets: &[Vec<Rational>]) -> Result<AutoWord> {
    let k = base.len();
    if k < 2 {
        return Err(Error::Unsupported("shear transitivity needs at least two coordinates".into()));
    }
    if sources.len() != targets.len() || sources.is_empty() {
        return Err(Error::InvalidInput("need equally many (at least one) sources and targets".into()));
    }
    if sources.iter().chain(targets).any(|p| p.len() != k) {
        return Err(Error::InvalidInput(format!("points must have {k} coordinates")));
    }
    if !pairwise_distinct(sources) || !pairwise_distinct(targets) {
        return Err(Error::DuplicatePoint);
    }
    if sources == targets {
        return Ok(AutoWord::new(base));
    }
    let (conj, _) = separating_shear_setup(base, &[sources, targets])?;
    let mut src: Vec<Vec<Rational>> = sources.iter().map(|p| conj.apply_affine(p)).collect::<Result<_>>()?;
    let dst: Vec<Vec<Rational>> = targets.iter().map(|p| conj.apply_affine(p)).collect::<Result<_>>()?;
    let mut core = AutoWord::new(base);
    triangular_core(base, k, &mut src, &dst, &mut core)?;
    let word = conj.clone().then(&core)?.then(&invert_word(&conj))?;
    for (s, t) in sources.iter().zip(targets) {
        if &word.apply_affine(s)? != t {
            return Err(Error::CertificationFailed("shear word misses a target".into()));
        }
    }
    Ok(word)
}

/// Assignments for `n` variables, in order of increasing size.
fn assignments(n: usize, limit: usize) -> Vec<Vec<i64>> {
    // values 0, 1, 2, -1, 3, -2, ...
    let value = |i: usize| -> i64 {
        if i <= 2 {
            i as i64
        } else if i % 2 == 1 {
            -((i as i64 - 1) / 2)
        } else {
            i as i64 / 2 + 1
        }
    };
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for level in 0..64 {
        // tuples over value(0..=level) that use value(level) at least once
        let mut idx = vec![0usize; n];
        loop {
            if idx.contains(&level) {
                out.push(idx.iter().map(|&i| value(i)).collect());
                if out.len() >= limit {
                    return out;
                }
            }
            let mut pos = n;
            while pos > 0 && idx[pos - 1] == level {
                idx[pos - 1] = 0;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
        }
    }
    out
}

/// `m` distinct points on the fiber `p = c`, none of them in `avoid`.
pub fn fiber_points<F: Field>(p: &Poly<F>, c: &F::Elem, m: usize, avoid: &[Vec<F::Elem>]) -> Result<Vec<Vec<F::Elem>>> {
    if p.is_constant() {
        return Err(Error::InvalidInput("p must be non-constant".into()));
    }
    let field = p.field().clone();
    let k = p.ctx().len();
    let mut found: Vec<Vec<F::Elem>> = Vec::new();
    let same = |a: &[F::Elem], b: &[F::Elem]| a.iter().zip(b).all(|(x, y)| field.equal(x, y));
    let accept = |pt: Vec<F::Elem>, found: &mut Vec<Vec<F::Elem>>| {
        if !avoid.iter().chain(found.iter()).any(|q| same(q, &pt)) {
            found.push(pt);
        }
    };
    let pc = p.checked_sub(&Poly::constant(p.ctx(), &field, c.clone()))?;
    let mut order: Vec<usize> = (0..k).filter(|&j| p.degree_in(j) == 1).collect();
    order.extend((0..k).filter(|&j| p.degree_in(j) > 1));
    let tuples = assignments(k - 1, 400);
    // linear variables first, then univariate root finding
    for pass in 0..2 {
        for &j in &order {
            if pass == 0 && p.degree_in(j) != 1 {
                continue;
            }
            for tup in &tuples {
                if found.len() >= m {
                    return Ok(found);
                }
                let mut point: Vec<F::Elem> = Vec::with_capacity(k);
                let mut it = tup.iter();
                for i in 0..k {
                    point.push(if i == j { field.zero() } else { field.from_int(*it.next().expect("tuple")) });
                }
                let coeffs: Vec<F::Elem> = pc
                    .coeffs_in(j)
                    .iter()
                    .map(|cf| cf.eval(&point))
                    .collect::<Result<_>>()?;
                let roots = if pass == 0 {
                    if coeffs.len() == 2 && !field.is_zero(&coeffs[1]) {
                        vec![field.div(&field.neg(&coeffs[0]), &coeffs[1]).expect("nonzero")]
                    } else {
                        vec![]
                    }
                } else if coeffs.len() >= 2 {
                    field.univariate_roots(&coeffs)
                } else {
                    vec![]
                };
                for r in roots {
                    let mut pt = point.clone();
                    pt[j] = r;
                    if found.len() < m {
                        accept(pt, &mut found);
                    }
                }
            }
        }
    }
    if found.len() >= m {
        return Ok(found);
    }
    Err(Error::FiberPointsNotFound {
        wanted: m,
        value: Poly::constant(&q_context(), &field, c.clone()).to_string(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Make `u ≠ 0` everywhere.
    U0,
    /// Make `v ≠ 0` everywhere.
    V0,
}

fn swap_uv(pt: &XPoint) -> XPoint {
    XPoint::new(pt.x.clone(), pt.v.clone(), pt.u.clone())
}

fn z_poly() -> Poly {
    Poly::var_at(&q_context(), &Q, 0)
}

/// A direction along which the point can leave `U₀` under a `q = z` lift.
fn escape_direction(x: &HypersurfaceX, pt: &XPoint) -> Result<Option<usize>> {
    for d in 0..x.k() {
        let mut deriv = x.p().diff_at(d);
        let mut order = 1;
        while !deriv.is_zero() {
            if !deriv.eval(&pt.x)?.is_zero() {
                return Ok(Some(d));
            }
            // with v = 0 only the first derivative matters
            if pt.v.is_zero() || order > 64 {
                break;
            }
            deriv = deriv.diff_at(d);
            order += 1;
        }
    }
    Ok(None)
}

/// Try the times in order; accept the first one for which `ok` holds on the images.
fn first_good_time(
    x: &HypersurfaceX,
    pts: &[XPoint],
    make: impl Fn(Rational) -> Result<Generator>,
    ok: impl Fn(&[XPoint]) -> bool,
) -> Result<Option<(Generator, Vec<XPoint>)>> {
    for t in time_sequence().take(64) {
        let g = make(t)?;
        let moved: Vec<XPoint> = pts.iter().map(|p| x.apply_generator(&g, p)).collect::<Result<_>>()?;
        if ok(&moved) {
            return Ok(Some((g, moved)));
        }
    }
    Ok(None)
}

fn move_off_u0(x: &HypersurfaceX, points: &[XPoint]) -> Result<(AutoWord, Vec<XPoint>)> {
    let base = x.base().clone();
    let one = Poly::one(&base, &Q);
    let mut word = AutoWord::new(&base);
    let mut pts = points.to_vec();
    for i in 0..pts.len() {
        let mut wanders = 0;
        while pts[i].u.is_zero() {
            let protected_ok = |moved: &[XPoint]| moved[..i].iter().all(|p| !p.u.is_zero());
            if let Some(d) = escape_direction(x, &pts[i])? {
                let found = first_good_time(
                    x,
                    &pts,
                    |t| Generator::lift1(d, one.clone(), z_poly(), t),
                    |moved| protected_ok(moved) && !moved[i].u.is_zero(),
                )?;
                let (g, moved) = found.ok_or_else(|| Error::CertificationFailed("no admissible flow time".into()))?;
                word.push(g)?;
                pts = moved;
                continue;
            }
            if pts[i].v.is_zero() {
                return Err(Error::SingularPoint(x.describe_point(&pts[i])));
            }
            // p vanishes on every coordinate line through x̄: wander inside U₀
            if wanders > 4 * x.k() {
                return Err(Error::CertificationFailed("could not leave the hypersurface u = 0".into()));
            }
            let d = wanders % x.k();
            wanders += 1;
            let mut best = None;
            for t in time_sequence().take(32) {
                let g = Generator::lift1(d, one.clone(), z_poly(), t)?;
                let moved: Vec<XPoint> = pts.iter().map(|p| x.apply_generator(&g, p)).collect::<Result<_>>()?;
                if !protected_ok(&moved) {
                    continue;
                }
                let unstuck = escape_direction(x, &moved[i])?.is_some();
                if best.is_none() || unstuck {
                    best = Some((g, moved));
                }
                if unstuck {
                    break;
                }
            }
            let (g, moved) = best.ok_or_else(|| Error::CertificationFailed("no admissible wandering move".into()))?;
            word.push(g)?;
            pts = moved;
        }
    }
    Ok((word, pts))
}

/// A word after which no point lies on `U₀` (resp. `V₀`).
pub fn move_off_hypersurface(x: &HypersurfaceX, points: &[XPoint], side: Side) -> Result<(AutoWord, Vec<XPoint>)> {
    for p in points {
        if !is_smooth_point(x, p)? {
            return Err(Error::SingularPoint(x.describe_point(p)));
        }
    }
    if !pairwise_distinct(points) {
        return Err(Error::DuplicatePoint);
    }
    match side {
        Side::U0 => move_off_u0(x, points),
        Side::V0 => {
            let swapped: Vec<XPoint> = points.iter().map(swap_uv).collect();
            let (w, moved) = move_off_u0(x, &swapped)?;
            let gens = w
                .gens()
                .iter()
                .map(|g| match g {
                    Generator::Lift1 { shear, q, t } => Generator::Lift2 {
                        shear: shear.clone(),
                        q: q.clone(),
                        t: t.clone(),
                    },
                    other => other.clone(),
                })
                .collect();
            Ok((AutoWord::from_gens(x.base(), gens)?, moved.iter().map(swap_uv).collect()))
        }
    }
}

/// One group move of the gathering stage.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupMove {
    pub level: Rational,
    /// The other `v`-levels, all fixed pointwise by `word`.
    pub fixed_levels: Vec<Rational>,
    pub q: Poly,
    pub word: AutoWord,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gathering {
    pub word: AutoWord,
    pub points: Vec<XPoint>,
    pub off_v0: AutoWord,
    pub groups: Vec<GroupMove>,
}

/// `z² ∏ (z - c_j)`, scaled to take the value 1 at `c0`.
pub fn stabilizing_q(c0: &Rational, fixed: &[Rational]) -> Result<Poly> {
    let zc = q_context();
    let z = z_poly();
    let mut q = z.pow(2);
    for c in fixed {
        q = &q * &(&z - &Poly::constant(&zc, &Q, c.clone()));
    }
    let at = q.eval(std::slice::from_ref(c0))?;
    let inv = Q
        .inv(&at)
        .ok_or_else(|| Error::InvalidInput("the gathering level must differ from the fixed levels and 0".into()))?;
    Ok(q.scale(&inv))
}

/// Move all points into `U₁ = {u = 1}`.
pub fn gather_into_u1(x: &HypersurfaceX, points: &[XPoint]) -> Result<Gathering> {
    let (off_v0, mut pts) = move_off_hypersurface(x, points, Side::V0)?;
    let mut word = off_v0.clone();
    let mut groups_by_level: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
    for (i, p) in pts.iter().enumerate() {
        groups_by_level.entry(p.v.clone()).or_default().push(i);
    }
    let levels: Vec<Rational> = groups_by_level.keys().cloned().collect();
    let mut groups = Vec::new();
    for (level, idxs) in &groups_by_level {
        if idxs.iter().all(|&i| pts[i].u.is_one()) {
            continue;
        }
        let fixed: Vec<Rational> = levels.iter().filter(|c| *c != level).cloned().collect();
        let q = stabilizing_q(level, &fixed)?;
        let targets = fiber_points(x.p(), level, idxs.len(), &[])?;
        let sources: Vec<Vec<Rational>> = idxs.iter().map(|&i| pts[i].x.clone()).collect();
        let flat = g0_transitive(x.base(), &sources, &targets)?;
        let mut lifted = AutoWord::new(x.base());
        for g in flat.gens() {
            if let Generator::Shear { shear, t } = g {
                lifted.push(Generator::lift1(shear.d, shear.h.clone(), q.clone(), t.clone())?)?;
            }
        }
        pts = pts.iter().map(|p| x.apply_word(&lifted, p)).collect::<Result<_>>()?;
        word = word.then(&lifted)?;
        groups.push(GroupMove {
            level: level.clone(),
            fixed_levels: fixed,
            q,
            word: lifted,
        });
    }
    if pts.iter().any(|p| !p.u.is_one()) {
        return Err(Error::CertificationFailed("gathering did not reach u = 1".into()));
    }
    Ok(Gathering {
        word,
        points: pts,
        off_v0,
        groups,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceStage {
    pub name: String,
    /// Number of generators of the plan applied to reach this stage.
    pub word_end: usize,
    pub points: Vec<XPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanStats {
    pub word_length: usize,
    pub max_coeff_bits: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitivityPlan {
    pub word: AutoWord,
    pub trace: Vec<TraceStage>,
    pub stats: PlanStats,
}

pub fn word_max_bits(w: &AutoWord) -> u64 {
    let poly_bits = |p: &Poly| p.terms().map(|(_, c)| bit_size(c)).max().unwrap_or(0);
    w.gens()
        .iter()
        .map(|g| match g {
            Generator::Shear { shear, t } => poly_bits(&shear.h).max(bit_size(t)),
            Generator::Lift1 { shear, q, t } | Generator::Lift2 { shear, q, t } => {
                poly_bits(&shear.h).max(poly_bits(q)).max(bit_size(t))
            }
            Generator::Eps => 0,
        })
        .max()
        .unwrap_or(0)
}

fn check_inputs(x: &HypersurfaceX, pts: &[XPoint]) -> Result<()> {
    for p in pts {
        if !is_smooth_point(x, p)? {
            return Err(Error::SingularPoint(x.describe_point(p)));
        }
    }
    if !pairwise_distinct(pts) {
        return Err(Error::DuplicatePoint);
    }
    Ok(())
}

/// A word of lifted flows sending `sources[i]` to `targets[i]` on `X`.
pub fn solve(x: &HypersurfaceX, sources: &[XPoint], targets: &[XPoint]) -> Result<TransitivityPlan> {
    if x.k() < 2 {
        return Err(Error::Unsupported(
            "for k = 1 the group is transitive but not 2-transitive".into(),
        ));
    }
    if sources.len() != targets.len() || sources.is_empty() {
        return Err(Error::InvalidInput("need equally many (at least one) sources and targets".into()));
    }
    check_inputs(x, sources)?;
    check_inputs(x, targets)?;
    let stage = |name: &str, end: usize, pts: &[XPoint]| TraceStage {
        name: name.into(),
        word_end: end,
        points: pts.to_vec(),
    };
    if sources == targets {
        let word = AutoWord::new(x.base());
        return Ok(TransitivityPlan {
            word,
            trace: vec![stage("sources", 0, sources)],
            stats: PlanStats {
                word_length: 0,
                max_coeff_bits: 0,
            },
        });
    }
    let gp = gather_into_u1(x, sources)?;
    let gq = gather_into_u1(x, targets)?;
    // inside U₁, lifts fixing u act on x̄ exactly as the underlying shears
    let a: Vec<Vec<Rational>> = gp.points.iter().map(|p| p.x.clone()).collect();
    let b: Vec<Vec<Rational>> = gq.points.iter().map(|p| p.x.clone()).collect();
    let flat = g0_transitive(x.base(), &a, &b)?;
    let mut mid = AutoWord::new(x.base());
    for g in flat.gens() {
        if let Generator::Shear { shear, t } = g {
            mid.push(Generator::lift2(shear.d, shear.h.clone(), z_poly(), t.clone())?)?;
        }
    }
    let mid_pts: Vec<XPoint> = gp.points.iter().map(|p| x.apply_word(&mid, p)).collect::<Result<_>>()?;
    let n1 = gp.word.len();
    let n2 = n1 + mid.len();
    let word = gp.word.then(&mid)?.then(&invert_word(&gq.word))?;
    let trace = vec![
        stage("sources", 0, sources),
        stage("gather-sources", n1, &gp.points),
        stage("midgame", n2, &mid_pts),
        stage("ungather-targets", word.len(), targets),
    ];
    let stats = PlanStats {
        word_length: word.len(),
        max_coeff_bits: word_max_bits(&word),
    };
    let plan = TransitivityPlan { word, trace, stats };
    if !verify_plan(x, &plan, sources, targets) {
        return Err(Error::CertificationFailed("assembled plan does not verify".into()));
    }
    Ok(plan)
}

/// Replay the plan: every intermediate point lies on `X`, each trace stage is
/// reproduced, and the sources land on the targets.
pub fn verify_plan(x: &HypersurfaceX, plan: &TransitivityPlan, sources: &[XPoint], targets: &[XPoint]) -> bool {
    let run = || -> Result<bool> {
        if sources.len() != targets.len() {
            return Ok(false);
        }
        let mut pts = sources.to_vec();
        for p in &pts {
            if !x.contains(p)? {
                return Ok(false);
            }
        }
        let mut stages = plan.trace.iter().peekable();
        let check_stage = |applied: usize, pts: &[XPoint], stages: &mut std::iter::Peekable<std::slice::Iter<TraceStage>>| {
            while let Some(s) = stages.peek() {
                if s.word_end != applied {
                    break;
                }
                if s.points != pts {
                    return false;
                }
                stages.next();
            }
            true
        };
        if !check_stage(0, &pts, &mut stages) {
            return Ok(false);
        }
        for (i, g) in plan.word.gens().iter().enumerate() {
            for p in pts.iter_mut() {
                *p = x.apply_generator(g, p)?;
                if !x.contains(p)? {
                    return Ok(false);
                }
            }
            if !check_stage(i + 1, &pts, &mut stages) {
                return Ok(false);
            }
        }
        Ok(stages.next().is_none() && pts == targets)
    };
    run().unwrap_or(false)
}

pub fn format_point(pt: &XPoint) -> Vec<String> {
    pt.coords().iter().map(format_rational).collect()
}
