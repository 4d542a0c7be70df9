//! Brute-force point counts over small prime fields.
//!
//! For `X = {u·v = p(x̄)} ⊂ F_q^(k+2)` the fibre over `x̄` has `q − 1` points
//! when `p(x̄) ≠ 0` and `2q − 1` when `p(x̄) = 0`, so
//! `#X = q^k·(q − 1) + #{p = 0}·q`. [`uv_identity`] checks this by counting
//! both sides independently.

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::is_prime;

pub const MAX_COUNT_PRIME: u32 = 251;
pub const DEFAULT_MAX_CELLS: u128 = 100_000_000;

/// Enumeration budget in grid cells, from `AFFMOD_MAX_CELLS` if set.
pub fn max_cells() -> u128 {
    std::env::var("AFFMOD_MAX_CELLS")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_CELLS)
}

fn check_prime(q: u32) -> Result<()> {
    if q > MAX_COUNT_PRIME || !is_prime(q) {
        return Err(Error::InvalidInput(format!("q = {q} must be a prime at most {MAX_COUNT_PRIME}")));
    }
    Ok(())
}

fn check_budget(q: u32, vars: usize) -> Result<u128> {
    let needed = (q as u128).checked_pow(vars as u32).unwrap_or(u128::MAX);
    let budget = max_cells();
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(needed)
}

/// A polynomial reduced mod `q` for fast evaluation.
#[derive(Clone, Debug)]
struct ModPoly {
    q: u64,
    terms: Vec<(u64, Vec<u32>)>,
}

impl ModPoly {
    fn new(p: &Poly, q: u32) -> Result<Self> {
        let qb = num_bigint::BigInt::from(q);
        let mut terms = Vec::new();
        for (e, c) in p.terms() {
            let den = c.denom().mod_floor(&qb);
            if den.is_zero() {
                return Err(Error::InvalidInput(format!("coefficient {c} has a denominator divisible by {q}")));
            }
            let num = c.numer().mod_floor(&qb).to_u64().expect("reduced");
            let den = den.to_u64().expect("reduced");
            let c = num * pow_mod(den, q as u64 - 2, q as u64) % q as u64;
            if c != 0 {
                terms.push((c, e.clone()));
            }
        }
        Ok(ModPoly { q: q as u64, terms })
    }

    fn eval(&self, powers: &[Vec<u64>]) -> u64 {
        let mut acc = 0u64;
        for (c, e) in &self.terms {
            let mut t = *c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t * powers[i][k as usize] % self.q;
                }
            }
            acc += t;
        }
        acc % self.q
    }

    fn max_exp(&self) -> usize {
        self.terms.iter().flat_map(|(_, e)| e.iter()).copied().max().unwrap_or(0) as usize
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Power tables `powers[i][k] = x_i^k` for a point.
struct Powers {
    q: u64,
    depth: usize,
    table: Vec<Vec<u64>>,
}

impl Powers {
    fn new(q: u64, vars: usize, depth: usize) -> Self {
        Powers {
            q,
            depth,
            table: vec![vec![0; depth + 1]; vars],
        }
    }

    fn set(&mut self, i: usize, value: u64) {
        let row = &mut self.table[i];
        row[0] = 1;
        for k in 1..=self.depth {
            row[k] = row[k - 1] * value % self.q;
        }
    }
}

/// Visit every point of `F_q^vars` with the first coordinate fixed to `first`.
fn for_each_with_first(q: u64, vars: usize, depth: usize, first: u64, mut visit: impl FnMut(&[u64], &Powers)) {
    let mut pt = vec![0u64; vars];
    let mut pw = Powers::new(q, vars, depth);
    pt[0] = first;
    for i in 0..vars {
        pw.set(i, pt[i]);
    }
    loop {
        visit(&pt, &pw);
        let mut i = vars;
        loop {
            if i <= 1 {
                return;
            }
            i -= 1;
            pt[i] += 1;
            if pt[i] < q {
                pw.set(i, pt[i]);
                break;
            }
            pt[i] = 0;
            pw.set(i, 0);
        }
    }
}

fn common_context(eqs: &[Poly]) -> Result<usize> {
    let Some(first) = eqs.first() else {
        return Ok(0);
    };
    for e in &eqs[1..] {
        if e.ctx() != first.ctx() {
            return Err(Error::ContextMismatch {
                left: first.ctx().joined(),
                right: e.ctx().joined(),
            });
        }
    }
    Ok(first.ctx().len())
}

/// Number of common zeros of `eqs` in `F_q^n`, `n` the number of variables.
pub fn count_points(eqs: &[Poly], q: u32) -> Result<u64> {
    check_prime(q)?;
    let vars = common_context(eqs)?;
    check_budget(q, vars)?;
    if vars == 0 {
        let all_zero = eqs.iter().all(|e| e.is_zero());
        return Ok(all_zero as u64);
    }
    let mods: Vec<ModPoly> = eqs.iter().map(|e| ModPoly::new(e, q)).collect::<Result<_>>()?;
    let depth = mods.iter().map(ModPoly::max_exp).max().unwrap_or(0);
    let qq = q as u64;
    Ok((0..qq)
        .into_par_iter()
        .map(|first| {
            let mut n = 0u64;
            for_each_with_first(qq, vars, depth, first, |_, pw| {
                if mods.iter().all(|m| m.eval(&pw.table) == 0) {
                    n += 1;
                }
            });
            n
        })
        .sum())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountReport {
    pub q: u32,
    pub k: usize,
    pub n_x: u64,
    pub n_0: u64,
    pub predicted: u64,
    pub matches: bool,
}

/// Count `{u·v = p}` and `{p = 0}` and compare with `q^k(q − 1) + N₀·q`.
pub fn uv_identity(p: &Poly, q: u32) -> Result<CountReport> {
    check_prime(q)?;
    let k = p.ctx().len();
    check_budget(q, k + 2)?;
    let m = ModPoly::new(p, q)?;
    let qq = q as u64;
    let depth = m.max_exp();
    // values of p over the base, enumerated once
    let values: Vec<u64> = if k == 0 {
        vec![m.eval(&[])]
    } else {
        (0..qq)
            .into_par_iter()
            .flat_map_iter(|first| {
                let mut out = Vec::with_capacity(qq.pow(k as u32 - 1) as usize);
                for_each_with_first(qq, k, depth, first, |_, pw| out.push(m.eval(&pw.table)));
                out
            })
            .collect()
    };
    let n_0 = values.iter().filter(|&&v| v == 0).count() as u64;
    let mut n_x = 0u64;
    for &val in &values {
        for u in 0..qq {
            for v in 0..qq {
                if u * v % qq == val {
                    n_x += 1;
                }
            }
        }
    }
    let predicted = qq.pow(k as u32) * (qq - 1) + n_0 * qq;
    Ok(CountReport {
        q,
        k,
        n_x,
        n_0,
        predicted,
        matches: n_x == predicted,
    })
}

/// A point of `F_q^n` where every equation and every partial derivative
/// vanishes, searched in lexicographic order among the first `budget` points.
/// `None` is not a proof of smoothness.
pub fn singular_witness(eqs: &[Poly], q: u32, budget: u64) -> Result<Option<Vec<u64>>> {
    check_prime(q)?;
    let vars = common_context(eqs)?;
    if eqs.is_empty() || vars == 0 {
        return Ok(None);
    }
    let mut all = Vec::new();
    for e in eqs {
        all.push(ModPoly::new(e, q)?);
        for d in e.gradient() {
            all.push(ModPoly::new(&d, q)?);
        }
    }
    let depth = all.iter().map(ModPoly::max_exp).max().unwrap_or(0);
    let qq = q as u64;
    let mut seen = 0u64;
    for first in 0..qq {
        let mut found = None;
        let mut stop = false;
        for_each_with_first(qq, vars, depth, first, |pt, pw| {
            if stop {
                return;
            }
            seen += 1;
            if seen > budget {
                stop = true;
                return;
            }
            if all.iter().all(|m| m.eval(&pw.table) == 0) {
                found = Some(pt.to_vec());
                stop = true;
            }
        });
        if found.is_some() || seen > budget {
            return Ok(found);
        }
    }
    Ok(None)
}
