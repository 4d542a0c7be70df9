//! Coefficient fields.
//!
//! A [`Field`] value describes one concrete field instance (the rationals,
//! a particular prime field, or approximate complex numbers). Elements do not
//! carry their field, so every polynomial stores the field it was built over
//! and binary operations refuse to combine polynomials whose fields differ.

use std::fmt::{self, Debug};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Equality tolerance of the approximate complex backend.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Largest prime modulus supported by [`Fp`].
pub const MAX_PRIME: u32 = 1 << 16;

pub trait Field: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Send + Sync + 'static;

    fn describe(&self) -> String;
    fn is_exact(&self) -> bool;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn from_rational(&self, r: &BigRational) -> Result<Self::Elem>;

    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// Whether the element should be printed with a leading minus sign.
    fn is_negative(&self, _a: &Self::Elem) -> bool {
        false
    }

    /// Printed form of the element; callers strip the sign via [`Field::is_negative`].
    fn format(&self, a: &Self::Elem) -> String;

    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.is_zero(&self.sub(a, b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        self.equal(a, &self.one())
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }

    fn pow(&self, a: &Self::Elem, mut e: u32) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Roots of a univariate polynomial (coefficients by ascending degree)
    /// that this field can produce exactly, or approximately for inexact fields.
    fn univariate_roots(&self, coeffs: &[Self::Elem]) -> Vec<Self::Elem>;

    /// Image of `a` in `Z/pZ` for a large prime `p`, when the element has
    /// one (used to pick independent rows cheaply before exact elimination).
    fn residue(&self, _a: &Self::Elem, _p: u64) -> Option<u64> {
        None
    }

    /// `(n_i, d)` with `a_i = n_i / d` for integers, when the field is the
    /// rationals; lets bulk arithmetic run over the integers.
    fn as_scaled_integers(&self, _a: &[&Self::Elem]) -> Option<(Vec<BigInt>, BigInt)> {
        None
    }

    /// Inverse of [`Field::as_scaled_integers`] for one entry.
    fn from_scaled_integer(&self, _n: BigInt, _d: &BigInt) -> Option<Self::Elem> {
        None
    }
}

/// The rational numbers with arbitrary-precision numerators and denominators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Q;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Canonical text for a rational: `n` or `n/d`, sign in front.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {text:?}"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Number of bits of the larger of numerator and denominator.
pub fn bit_size(r: &Rational) -> u64 {
    r.numer().bits().max(r.denom().bits())
}

impl Field for Q {
    type Elem = Rational;

    fn describe(&self) -> String {
        "Q".into()
    }
    fn is_exact(&self) -> bool {
        true
    }
    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn from_int(&self, n: i64) -> Rational {
        int(n)
    }
    fn from_rational(&self, r: &BigRational) -> Result<Rational> {
        Ok(r.clone())
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Option<Rational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_negative(&self, a: &Rational) -> bool {
        a.is_negative()
    }
    fn format(&self, a: &Rational) -> String {
        format_rational(&a.abs())
    }
    fn equal(&self, a: &Rational, b: &Rational) -> bool {
        a == b
    }
    fn as_scaled_integers(&self, a: &[&Rational]) -> Option<(Vec<BigInt>, BigInt)> {
        let d = a.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let ns = a.iter().map(|r| r.numer() * (&d / r.denom())).collect();
        Some((ns, d))
    }

    fn from_scaled_integer(&self, n: BigInt, d: &BigInt) -> Option<Rational> {
        Some(Rational::new(n, d.clone()))
    }

    fn residue(&self, a: &Rational, p: u64) -> Option<u64> {
        let pb = BigInt::from(p);
        let num = a.numer().mod_floor(&pb).to_u64()?;
        let den = a.denom().mod_floor(&pb).to_u64()?;
        let inv = crate::linalg::inv_mod(den, p)?;
        Some(crate::linalg::mul_mod(num, inv, p))
    }

    fn univariate_roots(&self, coeffs: &[Rational]) -> Vec<Rational> {
        rational_roots(coeffs)
    }
}

/// Distinct rational roots of a univariate polynomial, ascending.
pub fn rational_roots(coeffs: &[Rational]) -> Vec<Rational> {
    let mut c: Vec<Rational> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    // factor out x^k
    let lead_zeros = c.iter().take_while(|x| x.is_zero()).count();
    if lead_zeros > 0 {
        roots.push(Rational::zero());
        c.drain(..lead_zeros);
    }
    if c.len() > 1 {
        let lcm = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = c.iter().map(|x| (x * &lcm).to_integer()).collect();
        let a0 = ints[0].abs();
        let an = ints[ints.len() - 1].abs();
        let ps = small_divisors(&a0);
        let qs = small_divisors(&an);
        for p in &ps {
            for q in &qs {
                if !p.gcd(q).is_one() {
                    continue;
                }
                for sign in [1i32, -1] {
                    let cand = BigRational::new(p * BigInt::from(sign), q.clone());
                    if !roots.contains(&cand) && horner(&c, &cand).is_zero() {
                        roots.push(cand);
                    }
                }
            }
        }
    }
    roots.sort();
    roots
}

fn horner(c: &[Rational], x: &Rational) -> Rational {
    c.iter().rev().fold(Rational::zero(), |acc, a| acc * x + a)
}

/// Positive divisors of `n` found by trial division; integers that do not
/// fit in 64 bits only contribute 1 and themselves.
fn small_divisors(n: &BigInt) -> Vec<BigInt> {
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    match n.to_u64() {
        Some(v) if v <= 1u64 << 40 => {
            let mut out = Vec::new();
            let mut d = 1u64;
            while d * d <= v {
                if v % d == 0 {
                    out.push(BigInt::from(d));
                    if d * d != v {
                        out.push(BigInt::from(v / d));
                    }
                }
                d += 1;
            }
            out.sort();
            out
        }
        _ => vec![BigInt::one(), n.clone()],
    }
}

/// The prime field `F_q` for a prime `q ≤ 2^16`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    q: u32,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Fp {
    pub fn new(q: u32) -> Result<Self> {
        if !is_prime(q) || q > MAX_PRIME {
            return Err(Error::InvalidInput(format!("{q} is not a prime at most 2^16")));
        }
        Ok(Fp { q })
    }

    pub fn modulus(&self) -> u32 {
        self.q
    }

    pub fn reduce_int(&self, n: &BigInt) -> u32 {
        let m = BigInt::from(self.q);
        let r = ((n % &m) + &m) % &m;
        r.to_u32().expect("residue fits in u32")
    }
}

impl Field for Fp {
    type Elem = u32;

    fn describe(&self) -> String {
        format!("F{}", self.q)
    }
    fn is_exact(&self) -> bool {
        true
    }
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1 % self.q
    }
    fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.q as i64) as u32
    }
    fn from_rational(&self, r: &BigRational) -> Result<u32> {
        let d = self.reduce_int(r.denom());
        let inv = self.inv(&d).ok_or_else(|| {
            Error::InvalidInput(format!("denominator of {r} vanishes modulo {}", self.q))
        })?;
        Ok(self.mul(&self.reduce_int(r.numer()), &inv))
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + *b as u64) % self.q as u64) as u32
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + self.q as u64 - *b as u64) % self.q as u64) as u32
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.q as u64) as u32
    }
    fn neg(&self, a: &u32) -> u32 {
        (self.q - a % self.q) % self.q
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        Some(self.pow(a, self.q - 2))
    }
    fn format(&self, a: &u32) -> String {
        a.to_string()
    }
    fn equal(&self, a: &u32, b: &u32) -> bool {
        a == b
    }
    fn univariate_roots(&self, coeffs: &[u32]) -> Vec<u32> {
        (0..self.q)
            .filter(|x| {
                let v = coeffs
                    .iter()
                    .rev()
                    .fold(0u32, |acc, c| self.add(&self.mul(&acc, x), c));
                v == 0
            })
            .collect()
    }
}

/// Approximate complex numbers; equality is up to `eps` in the max norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Capprox {
    pub eps: f64,
}

impl Default for Capprox {
    fn default() -> Self {
        Capprox { eps: DEFAULT_EPS }
    }
}

fn fmt_f64(x: f64) -> String {
    let s = format!("{x}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

impl Field for Capprox {
    type Elem = Complex64;

    fn describe(&self) -> String {
        format!("Capprox(eps={})", self.eps)
    }
    fn is_exact(&self) -> bool {
        false
    }
    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn one(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
    fn from_int(&self, n: i64) -> Complex64 {
        Complex64::new(n as f64, 0.0)
    }
    fn from_rational(&self, r: &BigRational) -> Result<Complex64> {
        let v = r
            .to_f64()
            .ok_or_else(|| Error::InvalidInput(format!("{r} is out of floating range")))?;
        Ok(Complex64::new(v, 0.0))
    }
    fn is_zero(&self, a: &Complex64) -> bool {
        a.re.abs() <= self.eps && a.im.abs() <= self.eps
    }
    fn add(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a + b
    }
    fn sub(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a - b
    }
    fn mul(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a * b
    }
    fn neg(&self, a: &Complex64) -> Complex64 {
        -a
    }
    fn inv(&self, a: &Complex64) -> Option<Complex64> {
        (!self.is_zero(a)).then(|| a.inv())
    }
    fn is_negative(&self, a: &Complex64) -> bool {
        a.im.abs() <= self.eps && a.re < 0.0
    }
    fn format(&self, a: &Complex64) -> String {
        if a.im.abs() <= self.eps {
            fmt_f64(a.re.abs())
        } else {
            format!("({} + {}*I)", fmt_f64(a.re), fmt_f64(a.im))
        }
    }
    fn univariate_roots(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        durand_kerner(coeffs, self.eps)
    }
}

/// All complex roots (with multiplicity) by Durand–Kerner iteration
/// followed by Newton polishing.
pub fn durand_kerner(coeffs: &[Complex64], eps: f64) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() <= eps) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32)).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-12, 0.0);
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < eps * 1e-3 {
            break;
        }
    }
    let deriv: Vec<Complex64> = (1..=n).map(|i| monic[i] * i as f64).collect();
    for r in roots.iter_mut() {
        for _ in 0..5 {
            let d = deriv.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * *r + a);
            if d.norm() == 0.0 {
                break;
            }
            *r -= eval(*r) / d;
        }
    }
    roots
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Q")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_stay_reduced() {
        let a = rat(6, -4);
        assert_eq!(a.numer(), &BigInt::from(-3));
        assert_eq!(a.denom(), &BigInt::from(2));
        assert_eq!(format_rational(&a), "-3/2");
        assert_eq!(parse_rational("-6/4").unwrap(), a);
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Fp::new(7).unwrap();
        assert_eq!(f.mul(&3, &5), 1);
        assert_eq!(f.inv(&3), Some(5));
        assert_eq!(f.neg(&0), 0);
        assert_eq!(f.from_rational(&rat(1, 2)).unwrap(), 4);
        assert!(f.from_rational(&rat(1, 7)).is_err());
        assert!(Fp::new(8).is_err());
        assert!(Fp::new(65537).is_err());
        assert_eq!(f.univariate_roots(&[6, 0, 1]), vec![1, 6]);
    }

    #[test]
    fn rational_root_search() {
        // (x - 1/2)(x + 3) x = x^3 + 5/2 x^2 - 3/2 x
        let c = vec![int(0), rat(-3, 2), rat(5, 2), int(1)];
        assert_eq!(rational_roots(&c), vec![int(-3), int(0), rat(1, 2)]);
        assert!(rational_roots(&[int(1), int(0), int(1)]).is_empty());
    }

    #[test]
    fn complex_roots_of_x2_plus_1() {
        let c = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let mut r = durand_kerner(&c, 1e-12);
        r.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-9);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-9);
    }
}
