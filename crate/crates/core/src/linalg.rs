//! Dense linear algebra over a [`Field`]: elimination, determinants,
//! transvection factorization of SL matrices and Lagrange interpolation.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Field;

pub type Matrix<E> = Vec<Vec<E>>;

pub fn identity<F: Field>(field: &F, n: usize) -> Matrix<F::Elem> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { field.one() } else { field.zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul<F: Field>(field: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    a[i].iter()
                        .zip(b.iter())
                        .fold(field.zero(), |acc, (x, row)| field.add(&acc, &field.mul(x, &row[j])))
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<F: Field>(field: &F, a: &Matrix<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(field.zero(), |acc, (x, y)| field.add(&acc, &field.mul(x, y)))
        })
        .collect()
}

pub fn det<F: Field>(field: &F, a: &Matrix<F::Elem>) -> F::Elem {
    let n = a.len();
    let mut m = a.clone();
    let mut d = field.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !field.is_zero(&m[r][col])) else {
            return field.zero();
        };
        if piv != col {
            m.swap(piv, col);
            d = field.neg(&d);
        }
        d = field.mul(&d, &m[col][col]);
        let inv = field.inv(&m[col][col]).expect("nonzero pivot");
        for r in col + 1..n {
            let factor = field.mul(&m[r][col], &inv);
            if field.is_zero(&factor) {
                continue;
            }
            for c in col..n {
                let v = field.sub(&m[r][c], &field.mul(&factor, &m[col][c]));
                m[r][c] = v;
            }
        }
    }
    d
}

/// A solution of `a x = b` (free unknowns set to zero), or `None` if inconsistent.
pub fn solve_linear<F: Field>(field: &F, a: &Matrix<F::Elem>, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let cols: Vec<Vec<F::Elem>> = vec![b.to_vec()];
    solve_linear_multi(field, a, &cols).map(|mut xs| xs.remove(0))
}

/// Solve `a x = b` for several right-hand sides with one elimination.
pub fn solve_linear_multi<F: Field>(field: &F, a: &Matrix<F::Elem>, bs: &[Vec<F::Elem>]) -> Option<Vec<Vec<F::Elem>>> {
    if let Some(sols) = solve_square_fraction_free(field, a, bs) {
        return Some(sols);
    }
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let width = cols + bs.len();
    let mut m: Matrix<F::Elem> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(bs.iter().map(|b| b[i].clone()));
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !field.is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(piv, r);
        let inv = field.inv(&m[r][c]).expect("nonzero pivot");
        for v in m[r].iter_mut() {
            *v = field.mul(v, &inv);
        }
        for i in 0..rows {
            if i == r || field.is_zero(&m[i][c]) {
                continue;
            }
            let factor = m[i][c].clone();
            for j in c..width {
                if field.is_zero(&m[r][j]) {
                    continue;
                }
                let v = field.sub(&m[i][j], &field.mul(&factor, &m[r][j]));
                m[i][j] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| row[cols..].iter().any(|v| !field.is_zero(v))) {
        return None;
    }
    let sols = (0..bs.len())
        .map(|k| {
            let mut x = vec![field.zero(); cols];
            for (i, &c) in pivots.iter().enumerate() {
                x[c] = m[i][cols + k].clone();
            }
            x
        })
        .collect();
    Some(sols)
}

/// Bareiss elimination on the integer-scaled rows of a square nonsingular
/// system; `None` for other shapes, singular systems, or fields without an
/// integer view.
fn solve_square_fraction_free<F: Field>(field: &F, a: &Matrix<F::Elem>, bs: &[Vec<F::Elem>]) -> Option<Vec<Vec<F::Elem>>> {
    let n = a.len();
    if n == 0 || a.iter().any(|r| r.len() != n) {
        return None;
    }
    let width = n + bs.len();
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for (i, row) in a.iter().enumerate() {
        let entries: Vec<&F::Elem> = row.iter().chain(bs.iter().map(|b| &b[i])).collect();
        // scaling a row by its common denominator keeps the solution set
        m.push(field.as_scaled_integers(&entries)?.0);
    }
    let mut prev = BigInt::one();
    for k in 0..n {
        let piv = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(piv, k);
        let (top, rest) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            let lead = std::mem::take(&mut row[k]);
            for j in k + 1..width {
                let v = &row[j] * &pivot_row[k] - &lead * &pivot_row[j];
                row[j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let one = BigInt::one();
    let elem = |v: &BigInt| field.from_scaled_integer(v.clone(), &one);
    let mut sols = Vec::with_capacity(bs.len());
    for c in 0..bs.len() {
        let mut x = vec![field.zero(); n];
        for k in (0..n).rev() {
            let mut acc = elem(&m[k][n + c])?;
            for j in k + 1..n {
                if !m[k][j].is_zero() {
                    acc = field.sub(&acc, &field.mul(&elem(&m[k][j])?, &x[j]));
                }
            }
            x[k] = field.div(&acc, &elem(&m[k][k])?)?;
        }
        sols.push(x);
    }
    Some(sols)
}

/// The Mersenne prime `2^61 - 1`.
pub const LARGE_PRIME: u64 = (1 << 61) - 1;

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        return None;
    }
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    Some(acc)
}

/// Greedily pick rows (given sparsely as `(column, value)` lists over `cols`
/// columns) that stay independent modulo `p`, stopping at full column rank.
/// Rows independent modulo `p` are independent over the field itself.
/// `None` when some entry has no residue modulo `p`.
pub fn independent_rows_mod<F: Field>(
    field: &F,
    rows: &[Vec<(usize, F::Elem)>],
    cols: usize,
    p: u64,
) -> Option<Vec<usize>> {
    // reduced basis rows, each with its pivot column
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut chosen = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if basis.len() == cols {
            break;
        }
        let mut v = vec![0u64; cols];
        for (c, e) in row {
            v[*c] = field.residue(e, p)?;
        }
        for (pc, b) in &basis {
            let f = v[*pc];
            if f == 0 {
                continue;
            }
            for (vj, bj) in v.iter_mut().zip(b) {
                if *bj != 0 {
                    *vj = (*vj + p - mul_mod(f, *bj, p)) % p;
                }
            }
        }
        if let Some(pc) = v.iter().position(|&x| x != 0) {
            let inv = inv_mod(v[pc], p)?;
            for x in v.iter_mut() {
                *x = mul_mod(*x, inv, p);
            }
            basis.push((pc, v));
            chosen.push(i);
        }
    }
    Some(chosen)
}

/// Row operation `row[target] += coeff * row[source]`, i.e. left
/// multiplication by `I + coeff * e_{target,source}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Transvection<E> {
    pub target: usize,
    pub source: usize,
    pub coeff: E,
}

pub fn transvection_matrix<F: Field>(field: &F, n: usize, t: &Transvection<F::Elem>) -> Matrix<F::Elem> {
    let mut m = identity(field, n);
    m[t.target][t.source] = field.add(&m[t.target][t.source], &t.coeff);
    m
}

/// Factor a determinant-one matrix into transvections.
///
/// Returns `[t_1, ..., t_r]` with `M = T_r ⋯ T_1`: applying the list in
/// order to a column vector reproduces `M v`.
pub fn sl_factor<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Result<Vec<Transvection<F::Elem>>> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("matrix is not square".into()));
    }
    if !field.is_exact() {
        return Err(Error::UnsupportedField {
            op: "sl_decompose",
            field: field.describe(),
        });
    }
    if !field.is_one(&det(field, m)) {
        return Err(Error::DeterminantNotOne);
    }
    let mut a = m.clone();
    let mut ops: Vec<Transvection<F::Elem>> = Vec::new();
    let mut row_op = |a: &mut Matrix<F::Elem>, target: usize, source: usize, coeff: F::Elem| {
        for j in 0..n {
            let v = field.add(&a[target][j], &field.mul(&coeff, &a[source][j]));
            a[target][j] = v;
        }
        ops.push(Transvection { target, source, coeff });
    };
    for j in 0..n {
        if !field.is_one(&a[j][j]) {
            let below = (j + 1..n).find(|&i| !field.is_zero(&a[i][j]));
            let helper = match below {
                Some(i) => i,
                None if j + 1 < n => {
                    row_op(&mut a, j + 1, j, field.one());
                    j + 1
                }
                // det = 1 forces the last pivot to be 1 here
                None => unreachable!("last pivot differs from one despite det = 1"),
            };
            let c = field
                .div(&field.sub(&field.one(), &a[j][j]), &a[helper][j])
                .expect("nonzero helper entry");
            row_op(&mut a, j, helper, c);
        }
        for i in 0..n {
            if i != j && !field.is_zero(&a[i][j]) {
                let c = field.neg(&a[i][j]);
                row_op(&mut a, i, j, c);
            }
        }
    }
    // E_r ⋯ E_1 M = I  ⇒  M = E_1⁻¹ ⋯ E_r⁻¹; the rightmost factor acts first.
    Ok(ops
        .into_iter()
        .rev()
        .map(|t| Transvection {
            target: t.target,
            source: t.source,
            coeff: field.neg(&t.coeff),
        })
        .collect())
}

/// Coefficients (ascending) of the Lagrange interpolant through `(nodes[i], values[i])`.
pub fn lagrange<F: Field>(field: &F, nodes: &[F::Elem], values: &[F::Elem]) -> Result<Vec<F::Elem>> {
    if nodes.len() != values.len() {
        return Err(Error::InvalidInput("nodes and values differ in length".into()));
    }
    for i in 0..nodes.len() {
        for j in 0..i {
            if field.equal(&nodes[i], &nodes[j]) {
                return Err(Error::DuplicatePoint);
            }
        }
    }
    let n = nodes.len();
    let mut out = vec![field.zero(); n];
    for i in 0..n {
        if field.is_zero(&values[i]) {
            continue;
        }
        // basis numerator ∏_{j≠i} (t - x_j)
        let mut basis = vec![field.one()];
        let mut denom = field.one();
        for j in 0..n {
            if j == i {
                continue;
            }
            let mut next = vec![field.zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] = field.add(&next[k + 1], c);
                next[k] = field.sub(&next[k], &field.mul(c, &nodes[j]));
            }
            basis = next;
            denom = field.mul(&denom, &field.sub(&nodes[i], &nodes[j]));
        }
        let scale = field.div(&values[i], &denom).expect("distinct nodes");
        for (k, c) in basis.iter().enumerate() {
            out[k] = field.add(&out[k], &field.mul(c, &scale));
        }
    }
    while out.last().is_some_and(|c| field.is_zero(c)) {
        out.pop();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, Rational, Q};

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    fn product(n: usize, word: &[Transvection<Rational>]) -> Matrix<Rational> {
        word.iter().fold(identity(&Q, n), |acc, t| mat_mul(&Q, &transvection_matrix(&Q, n, t), &acc))
    }

    #[test]
    fn sl_factor_examples() {
        assert!(sl_factor(&Q, &m(&[&[1, 0], &[0, 1]])).unwrap().is_empty());
        let w = sl_factor(&Q, &m(&[&[1, 1], &[0, 1]])).unwrap();
        assert_eq!(w, vec![Transvection { target: 0, source: 1, coeff: int(1) }]);
        let rot = m(&[&[0, 1], &[-1, 0]]);
        let w = sl_factor(&Q, &rot).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(product(2, &w), rot);
        assert_eq!(sl_factor(&Q, &m(&[&[2, 0], &[0, 1]])), Err(Error::DeterminantNotOne));
        let big = m(&[&[2, 3, 1], &[1, 2, 0], &[0, 0, 1]]);
        assert_eq!(product(3, &sl_factor(&Q, &big).unwrap()), big);
        let diag = vec![
            vec![Rational::new(3.into(), 1.into()), int(0), int(0)],
            vec![int(0), Rational::new(1.into(), 3.into()), int(0)],
            vec![int(0), int(0), int(1)],
        ];
        assert_eq!(product(3, &sl_factor(&Q, &diag).unwrap()), diag);
    }

    #[test]
    fn interpolation_examples() {
        assert_eq!(lagrange(&Q, &[int(0), int(1)], &[int(1), int(-1)]).unwrap(), vec![int(1), int(-2)]);
        assert!(lagrange(&Q, &[int(0), int(1)], &[int(0), int(0)]).unwrap().is_empty());
        assert_eq!(
            lagrange(&Q, &[int(0), int(1), int(2)], &[int(0), int(1), int(4)]).unwrap(),
            vec![int(0), int(0), int(1)]
        );
        assert_eq!(lagrange(&Q, &[int(1), int(1)], &[int(0), int(2)]), Err(Error::DuplicatePoint));
    }

    #[test]
    fn solve_and_det() {
        let a = m(&[&[2, 1], &[1, 3]]);
        assert_eq!(det(&Q, &a), int(5));
        let x = solve_linear(&Q, &a, &[int(3), int(4)]).unwrap();
        assert_eq!(x, vec![int(1), int(1)]);
        let sing = m(&[&[1, 1], &[1, 1]]);
        assert!(solve_linear(&Q, &sing, &[int(1), int(2)]).is_none());
    }
}
