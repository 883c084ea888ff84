//! Exact arithmetic in cyclotomic fields Q(ζ_N).
//!
//! Elements are stored in the power basis 1, ζ, …, ζ^{φ(N)-1} with integer
//! numerators over one positive common denominator. The representation is
//! canonical, so equality of elements with the same conductor is equality of
//! the stored vectors.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::hp;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("galois exponent {t} is not coprime to the conductor {n}")]
    NotCoprime { t: i64, n: u64 },
}

/// Per-conductor data: the cyclotomic polynomial and a table of roots.
pub(crate) struct Ctx {
    pub n: usize,
    pub phi: usize,
    /// Φ_N(x) = x^φ + Σ c_j x^j; only the nonzero lower terms are kept.
    pub lower: Vec<(usize, i64)>,
    pub roots: Vec<Complex64>,
}

fn ctx_cache() -> &'static Mutex<HashMap<usize, Arc<Ctx>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Ctx>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn ctx(n: usize) -> Arc<Ctx> {
    if let Some(c) = ctx_cache().lock().unwrap().get(&n) {
        return c.clone();
    }
    let poly = cyclotomic_poly(n);
    let phi = poly.len() - 1;
    let lower = poly[..phi].iter().enumerate().filter(|(_, &c)| c != 0).map(|(j, &c)| (j, c)).collect();
    let roots = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64);
            Complex64::new(t.cos(), t.sin())
        })
        .collect();
    let c = Arc::new(Ctx { n, phi, lower, roots });
    ctx_cache().lock().unwrap().insert(n, c.clone());
    c
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Dense coefficients of Φ_n, lowest degree first.
fn cyclotomic_poly(n: usize) -> Vec<i64> {
    let primes: Vec<u64> = factorize(n as u64).iter().map(|&(p, _)| p).collect();
    let mut up = Vec::new();
    let mut down = Vec::new();
    for mask in 0u32..(1 << primes.len()) {
        let sq: u64 = (0..primes.len()).filter(|i| mask & (1 << i) != 0).map(|i| primes[i]).product();
        let d = n / sq as usize;
        if mask.count_ones() % 2 == 0 {
            up.push(d);
        } else {
            down.push(d);
        }
    }
    let mut a: Vec<i64> = vec![1];
    for d in up {
        let mut b = vec![0i64; a.len() + d];
        for (i, &c) in a.iter().enumerate() {
            b[i + d] += c;
            b[i] -= c;
        }
        a = b;
    }
    for d in down {
        let deg = a.len() - 1;
        let mut q = vec![0i64; deg - d + 1];
        for j in (d..=deg).rev() {
            let above = if j <= deg - d { q[j] } else { 0 };
            q[j - d] = a[j] + above;
        }
        a = q;
    }
    a
}

/// An element of Q(ζ_N).
#[derive(Clone)]
pub struct CycNum {
    n: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

fn reduce_big(a: &mut Vec<BigInt>, c: &Ctx) {
    if a.len() > c.n {
        for i in c.n..a.len() {
            let v = std::mem::take(&mut a[i]);
            a[i % c.n] += v;
        }
        a.truncate(c.n);
    }
    for d in (c.phi..a.len()).rev() {
        if a[d].is_zero() {
            continue;
        }
        let lead = std::mem::take(&mut a[d]);
        let base = d - c.phi;
        for &(j, cj) in &c.lower {
            a[base + j] -= &lead * cj;
        }
    }
    a.truncate(c.phi);
    a.resize(c.phi, BigInt::zero());
}

fn reduce_small(a: &mut Vec<i128>, c: &Ctx) -> bool {
    if a.len() > c.n {
        for i in c.n..a.len() {
            let v = a[i];
            match a[i % c.n].checked_add(v) {
                Some(s) => a[i % c.n] = s,
                None => return false,
            }
        }
        a.truncate(c.n);
    }
    for d in (c.phi..a.len()).rev() {
        let lead = a[d];
        if lead == 0 {
            continue;
        }
        a[d] = 0;
        let base = d - c.phi;
        for &(j, cj) in &c.lower {
            let Some(t) = lead.checked_mul(cj as i128) else {
                return false;
            };
            match a[base + j].checked_sub(t) {
                Some(s) => a[base + j] = s,
                None => return false,
            }
        }
    }
    a.truncate(c.phi);
    a.resize(c.phi, 0);
    true
}

fn max_bits(v: &[BigInt]) -> u64 {
    v.iter().map(|x| x.bits()).max().unwrap_or(0)
}

/// Accumulates Σ a_k·b_k as unreduced polynomials. All inputs share one
/// conductor and have unit denominators.
fn convolve_sum(pairs: &[(&[BigInt], &[BigInt])], c: &Ctx) -> Vec<BigInt> {
    let len = 2 * c.phi;
    let budget = pairs.iter().map(|(a, b)| max_bits(a) + max_bits(b)).max().unwrap_or(0) + 64
        - (c.phi as u64).leading_zeros() as u64
        + 4;
    if budget < 110 {
        let mut acc = vec![0i128; len];
        for (a, b) in pairs {
            let bs: Vec<(usize, i128)> =
                b.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(j, x)| (j, x.to_i128().unwrap())).collect();
            for (i, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let x = x.to_i128().unwrap();
                for &(j, y) in &bs {
                    acc[i + j] += x * y;
                }
            }
        }
        if reduce_small(&mut acc, c) {
            return acc.into_iter().map(BigInt::from).collect();
        }
    }
    let mut acc = vec![BigInt::zero(); len];
    for (a, b) in pairs {
        let bs: Vec<(usize, &BigInt)> = b.iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for &(j, y) in &bs {
                acc[i + j] += x * y;
            }
        }
    }
    reduce_big(&mut acc, c);
    acc
}

impl CycNum {
    fn from_parts(n: u32, mut num: Vec<BigInt>, mut den: BigInt) -> CycNum {
        if den.is_negative() {
            den = -den;
            for x in num.iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        if !den.is_one() {
            let mut g = den.clone();
            for x in &num {
                if g.is_one() {
                    break;
                }
                g = g.gcd(x);
            }
            if !g.is_one() {
                for x in num.iter_mut() {
                    *x = &*x / &g;
                }
                den = den / &g;
            }
        }
        CycNum { n, num, den }
    }

    /// Builds Σ c_k ζ_N^k for arbitrary integer exponents, divided by `den`.
    pub fn from_terms(n: u64, terms: &[(i64, BigInt)], den: BigInt) -> CycNum {
        assert!(n >= 1, "conductor must be positive");
        let c = ctx(n as usize);
        let mut a = vec![BigInt::zero(); c.n.max(c.phi)];
        for (k, v) in terms {
            let e = k.rem_euclid(n as i64) as usize;
            a[e] += v;
        }
        reduce_big(&mut a, &c);
        CycNum::from_parts(n as u32, a, den)
    }

    pub fn zero() -> CycNum {
        CycNum { n: 1, num: vec![BigInt::zero()], den: BigInt::one() }
    }

    pub fn one() -> CycNum {
        CycNum::from_int(1)
    }

    pub fn from_int(v: i64) -> CycNum {
        CycNum { n: 1, num: vec![BigInt::from(v)], den: BigInt::one() }
    }

    pub fn from_rational(q: &BigRational) -> CycNum {
        CycNum::from_parts(1, vec![q.numer().clone()], q.denom().clone())
    }

    /// ζ_N^k.
    pub fn root_of_unity(n: u64, k: i64) -> CycNum {
        CycNum::from_terms(n, &[(k, BigInt::one())], BigInt::one())
    }

    /// ζ_N^k + ζ_N^{-k}, i.e. 2 cos(2πk/N).
    pub fn two_cos(n: u64, k: i64) -> CycNum {
        CycNum::from_terms(n, &[(k, BigInt::one()), (-k, BigInt::one())], BigInt::one())
    }

    /// i·(ζ_N^{-k} − ζ_N^{k}), i.e. 2 sin(2πk/N).
    pub fn two_sin(n: u64, k: i64) -> CycNum {
        let m = lcm(n, 4);
        let s = (m / n) as i64;
        let q = (m / 4) as i64;
        CycNum::from_terms(m, &[(q - s * k, BigInt::one()), (q + s * k, -BigInt::one())], BigInt::one())
    }

    pub fn conductor(&self) -> u64 {
        self.n as u64
    }

    /// Numerators in the power basis, over [`CycNum::denominator`].
    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num.iter().map(|x| BigRational::new(x.clone(), self.den.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|x| x.is_zero())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(|x| x.is_zero()) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    /// Largest numerator bit length; a rough size measure.
    pub fn height_bits(&self) -> u64 {
        max_bits(&self.num).max(self.den.bits())
    }

    /// The same element seen in Q(ζ_M) for a multiple M of the conductor.
    pub fn lift(&self, m: u64) -> CycNum {
        let n = self.n as u64;
        assert!(m % n == 0, "lift target {m} is not a multiple of {n}");
        if m == n {
            return self.clone();
        }
        let c = ctx(m as usize);
        let r = (m / n) as usize;
        let mut a = vec![BigInt::zero(); c.n.max(c.phi)];
        for (i, x) in self.num.iter().enumerate() {
            if !x.is_zero() {
                a[(i * r) % c.n] += x;
            }
        }
        reduce_big(&mut a, &c);
        CycNum { n: m as u32, num: a, den: self.den.clone() }
    }

    fn unify<'a>(a: &'a CycNum, b: &'a CycNum) -> (std::borrow::Cow<'a, CycNum>, u64) {
        let m = lcm(a.n as u64, b.n as u64);
        if m == a.n as u64 {
            (std::borrow::Cow::Borrowed(a), m)
        } else {
            (std::borrow::Cow::Owned(a.lift(m)), m)
        }
    }

    fn lifted_pair<'a>(a: &'a CycNum, b: &'a CycNum) -> (std::borrow::Cow<'a, CycNum>, std::borrow::Cow<'a, CycNum>) {
        if a.n == b.n {
            return (std::borrow::Cow::Borrowed(a), std::borrow::Cow::Borrowed(b));
        }
        let (x, m) = CycNum::unify(a, b);
        let y = if m == b.n as u64 { std::borrow::Cow::Borrowed(b) } else { std::borrow::Cow::Owned(b.lift(m)) };
        (x, y)
    }

    fn add_impl(&self, other: &CycNum, sign: i32) -> CycNum {
        let (a, b) = CycNum::lifted_pair(self, other);
        if a.den == b.den {
            let num = a.num.iter().zip(&b.num).map(|(x, y)| if sign > 0 { x + y } else { x - y }).collect();
            return CycNum::from_parts(a.n, num, a.den.clone());
        }
        let num = a
            .num
            .iter()
            .zip(&b.num)
            .map(|(x, y)| {
                let l = x * &b.den;
                let r = y * &a.den;
                if sign > 0 {
                    l + r
                } else {
                    l - r
                }
            })
            .collect();
        CycNum::from_parts(a.n, num, &a.den * &b.den)
    }

    pub fn mul_ref(&self, other: &CycNum) -> CycNum {
        let (a, b) = CycNum::lifted_pair(self, other);
        let c = ctx(a.n as usize);
        let num = convolve_sum(&[(&a.num, &b.num)], &c);
        CycNum::from_parts(a.n, num, &a.den * &b.den)
    }

    /// Σ a_k·b_k with a single reduction when the operands allow it.
    pub fn sum_of_products(pairs: &[(&CycNum, &CycNum)]) -> CycNum {
        if pairs.is_empty() {
            return CycNum::zero();
        }
        let n = pairs.iter().fold(1u64, |m, (a, b)| lcm(lcm(m, a.n as u64), b.n as u64));
        let fast = pairs.iter().all(|(a, b)| a.n as u64 == n && b.n as u64 == n && a.den.is_one() && b.den.is_one());
        if !fast {
            return pairs.iter().fold(CycNum::zero(), |acc, (a, b)| &acc + &a.mul_ref(b));
        }
        let c = ctx(n as usize);
        let refs: Vec<(&[BigInt], &[BigInt])> = pairs.iter().map(|(a, b)| (&a.num[..], &b.num[..])).collect();
        let num = convolve_sum(&refs, &c);
        CycNum { n: n as u32, num, den: BigInt::one() }
    }

    pub fn scale_int(&self, k: i64) -> CycNum {
        let num = self.num.iter().map(|x| x * k).collect();
        CycNum::from_parts(self.n, num, self.den.clone())
    }

    pub fn scale_rational(&self, q: &BigRational) -> CycNum {
        let num = self.num.iter().map(|x| x * q.numer()).collect();
        CycNum::from_parts(self.n, num, &self.den * q.denom())
    }

    pub fn pow(&self, k: u32) -> CycNum {
        let mut result = CycNum::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        result
    }

    /// The field automorphism ζ_N ↦ ζ_N^t.
    pub fn galois_apply(&self, t: i64) -> Result<CycNum, FieldError> {
        let n = self.n as i64;
        if t.gcd(&n) != 1 {
            return Err(FieldError::NotCoprime { t, n: n as u64 });
        }
        let c = ctx(n as usize);
        let mut a = vec![BigInt::zero(); c.n.max(c.phi)];
        for (i, x) in self.num.iter().enumerate() {
            if !x.is_zero() {
                a[((i as i64 * t).rem_euclid(n)) as usize] += x;
            }
        }
        reduce_big(&mut a, &c);
        Ok(CycNum { n: self.n, num: a, den: self.den.clone() })
    }

    pub fn conj(&self) -> CycNum {
        self.galois_apply(-1).expect("-1 is a unit mod every N")
    }

    /// Real part as an exact element, (a + ā)/2.
    pub fn re(&self) -> CycNum {
        (self + &self.conj()).scale_rational(&BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    /// |a|² = a·ā.
    pub fn norm_sq(&self) -> CycNum {
        self.mul_ref(&self.conj())
    }

    /// Multiplicative inverse by linear algebra over Q. Exact but cubic in φ(N);
    /// intended for small fields.
    pub fn inv(&self) -> Result<CycNum, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let c = ctx(self.n as usize);
        let phi = c.phi;
        let nz: Vec<usize> = (0..phi).filter(|&i| !self.num[i].is_zero()).collect();
        if nz.len() == 1 {
            let k = nz[0] as i64;
            let coef = BigRational::new(self.den.clone(), self.num[nz[0]].clone());
            return Ok(CycNum::root_of_unity(self.n as u64, -k).scale_rational(&coef));
        }
        // Column j holds the coordinates of self·ζ^j.
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(phi);
        let mut cur = self.clone();
        let zeta = CycNum::root_of_unity(self.n as u64, 1);
        for _ in 0..phi {
            cols.push(cur.coeffs());
            cur = cur.mul_ref(&zeta);
        }
        let mut m: Vec<Vec<BigRational>> = (0..phi)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..phi).map(|j| cols[j][i].clone()).collect();
                row.push(if i == 0 { BigRational::one() } else { BigRational::zero() });
                row
            })
            .collect();
        for col in 0..phi {
            let piv = (col..phi).find(|&r| !m[r][col].is_zero()).ok_or(FieldError::DivisionByZero)?;
            m.swap(col, piv);
            let inv = m[col][col].recip();
            for x in m[col].iter_mut() {
                *x = &*x * &inv;
            }
            for r in 0..phi {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for k in col..=phi {
                        let v = &m[col][k] * &f;
                        m[r][k] -= v;
                    }
                }
            }
        }
        let coeffs: Vec<BigRational> = (0..phi).map(|i| m[i][phi].clone()).collect();
        Ok(CycNum::from_rationals(self.n as u64, &coeffs))
    }

    pub fn from_rationals(n: u64, coeffs: &[BigRational]) -> CycNum {
        let den = coeffs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let terms: Vec<(i64, BigInt)> =
            coeffs.iter().enumerate().map(|(i, q)| (i as i64, q.numer() * (&den / q.denom()))).collect();
        CycNum::from_terms(n, &terms, den)
    }

    pub fn checked_div(&self, other: &CycNum) -> Result<CycNum, FieldError> {
        Ok(self.mul_ref(&other.inv()?))
    }

    /// Descends to the smallest conductor whose field contains the element.
    pub fn minimize(&self) -> CycNum {
        let n = self.n as u64;
        let mut divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
        divisors.sort_unstable();
        for m in divisors {
            if m == n {
                break;
            }
            let fixed = (1..n as i64)
                .filter(|t| t.gcd(&(n as i64)) == 1 && (*t as u64) % m == 1 % m)
                .all(|t| self.galois_apply(t).map(|x| &x == self).unwrap_or(false));
            if fixed {
                if let Some(x) = self.express_in(m) {
                    return x;
                }
            }
        }
        self.clone()
    }

    fn express_in(&self, m: u64) -> Option<CycNum> {
        let pm = euler_phi(m) as usize;
        let basis: Vec<Vec<BigRational>> =
            (0..pm).map(|j| CycNum::root_of_unity(m, j as i64).lift(self.n as u64).coeffs()).collect();
        let target = self.coeffs();
        let rows = target.len();
        let mut a: Vec<Vec<BigRational>> = (0..rows)
            .map(|i| {
                let mut r: Vec<BigRational> = (0..pm).map(|j| basis[j][i].clone()).collect();
                r.push(target[i].clone());
                r
            })
            .collect();
        let mut prow = 0;
        let mut pivots = Vec::new();
        for col in 0..pm {
            let Some(piv) = (prow..rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(prow, piv);
            let inv = a[prow][col].recip();
            for x in a[prow].iter_mut() {
                *x = &*x * &inv;
            }
            for r in 0..rows {
                if r != prow && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for k in col..=pm {
                        let v = &a[prow][k] * &f;
                        a[r][k] -= v;
                    }
                }
            }
            pivots.push(col);
            prow += 1;
        }
        if (prow..rows).any(|r| !a[r][pm].is_zero()) {
            return None;
        }
        let mut coeffs = vec![BigRational::zero(); pm];
        for (r, &col) in pivots.iter().enumerate() {
            coeffs[col] = a[r][pm].clone();
        }
        Some(CycNum::from_rationals(m, &coeffs))
    }

    /// Double-precision embedding with ζ_N ↦ e^{2πi/N}.
    pub fn to_c64(&self) -> Complex64 {
        let c = ctx(self.n as usize);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, x) in self.num.iter().enumerate() {
            if !x.is_zero() {
                acc += c.roots[i] * x.to_f64().unwrap_or(f64::NAN);
            }
        }
        acc / self.den.to_f64().unwrap_or(f64::NAN)
    }

    /// A bound on the absolute error of [`CycNum::to_c64`].
    fn c64_error_bound(&self) -> f64 {
        let s: f64 = self.num.iter().map(|x| x.abs().to_f64().unwrap_or(f64::MAX)).sum();
        let phi = self.num.len() as f64;
        s / self.den.to_f64().unwrap_or(1.0) * (phi + 8.0) * 1e-15
    }

    /// Embedding at `bits` of working precision, as decimal-ready floats.
    pub fn embed_float(&self, bits: usize) -> hp::HpComplex {
        hp::embed(self, bits)
    }

    /// Sign of a real element, decided exactly: zero is detected symbolically,
    /// otherwise the embedding is refined until the error bound separates it
    /// from zero.
    pub fn real_sign(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let v = self.to_c64().re;
        let bound = self.c64_error_bound();
        if v.is_finite() && v.abs() > bound {
            return v.partial_cmp(&0.0).unwrap();
        }
        let mut bits = 128;
        loop {
            if let Some(s) = hp::real_sign_at(self, bits) {
                return s;
            }
            bits *= 2;
            assert!(bits <= 1 << 16, "sign of a nonzero element could not be resolved");
        }
    }
}

impl PartialEq for CycNum {
    fn eq(&self, other: &CycNum) -> bool {
        if self.n == other.n {
            return self.den == other.den && self.num == other.num;
        }
        let (a, b) = CycNum::lifted_pair(self, other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for CycNum {}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .num
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| match i {
                0 => x.to_string(),
                1 => format!("{x}*z"),
                _ => format!("{x}*z^{i}"),
            })
            .collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        if self.den.is_one() {
            write!(f, "[{body}]_{}", self.n)
        } else {
            write!(f, "[({body})/{}]_{}", self.den, self.n)
        }
    }
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CycNum", 3)?;
        st.serialize_field("conductor", &self.n)?;
        let num: Vec<String> = self.num.iter().map(|x| x.to_string()).collect();
        st.serialize_field("numerators", &num)?;
        st.serialize_field("denominator", &self.den.to_string())?;
        st.end()
    }
}

impl Add for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        self.add_impl(rhs, 1)
    }
}

impl Sub for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self.add_impl(rhs, -1)
    }
}

impl Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        self.mul_ref(rhs)
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum { n: self.n, num: self.num.iter().map(|x| -x).collect(), den: self.den.clone() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for CycNum {
            type Output = CycNum;
            fn $m(self, rhs: CycNum) -> CycNum { (&self).$m(&rhs) }
        }
        impl $tr<&CycNum> for CycNum {
            type Output = CycNum;
            fn $m(self, rhs: &CycNum) -> CycNum { (&self).$m(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma4() -> CycNum {
        let z = |k| CycNum::root_of_unity(7, k);
        &(&z(1) + &z(2)) + &z(4)
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        let p105 = cyclotomic_poly(105);
        assert_eq!(p105.len(), 49);
        assert_eq!(p105[7], -2);
    }

    #[test]
    fn roots_of_unity() {
        assert!(CycNum::root_of_unity(1, 0).is_one());
        let z6 = CycNum::root_of_unity(6, 1).to_c64();
        assert!((z6.re - 0.5).abs() < 1e-15 && (z6.im - 0.8660254037844386).abs() < 1e-15);
        assert_eq!(CycNum::root_of_unity(4, 2), CycNum::from_int(-1));
        assert_eq!(CycNum::root_of_unity(5, 7), CycNum::root_of_unity(5, 2));
    }

    #[test]
    fn sigma4_embedding_and_conjugate() {
        let s = sigma4();
        let v = s.to_c64();
        assert!((v.re + 0.5).abs() < 1e-14);
        assert!((v.im - 7f64.sqrt() / 2.0).abs() < 1e-14);
        let c = s.conj().to_c64();
        assert!((c.im + 7f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn galois_on_sigma4() {
        let s = sigma4();
        assert_eq!(s.galois_apply(2).unwrap(), s);
        assert_eq!(s.galois_apply(3).unwrap(), s.conj());
        assert_eq!(s.galois_apply(1).unwrap(), s);
        assert_eq!(s.galois_apply(7), Err(FieldError::NotCoprime { t: 7, n: 7 }));
    }

    #[test]
    fn two_cos_squared() {
        let c = CycNum::two_cos(8, 1);
        assert_eq!(c.pow(2), CycNum::from_int(2));
    }

    #[test]
    fn two_sin_values() {
        let s = CycNum::two_sin(10, 1).to_c64();
        assert!((s.re - 2.0 * (std::f64::consts::PI / 5.0).sin()).abs() < 1e-14);
        assert!(s.im.abs() < 1e-14);
    }

    #[test]
    fn mixed_conductor_arithmetic() {
        let a = CycNum::root_of_unity(3, 1);
        let b = CycNum::root_of_unity(4, 1);
        let p = &a * &b;
        assert_eq!(p.conductor(), 12);
        assert_eq!(p, CycNum::root_of_unity(12, 7));
    }

    #[test]
    fn inverse_small_field() {
        let a = &CycNum::root_of_unity(5, 1) + &CycNum::from_int(3);
        let b = a.inv().unwrap();
        assert!((&a * &b).is_one());
        assert_eq!(CycNum::zero().inv(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn minimize_descends() {
        let x = CycNum::root_of_unity(3, 1).lift(36);
        let m = x.minimize();
        assert_eq!(m.conductor(), 3);
        assert_eq!(m, x);
    }

    #[test]
    fn sign_of_tiny_value() {
        // (ζ8+ζ8⁻¹)² − 2 is exactly zero; √2·10^15 minus its integer part is not.
        let z = &CycNum::two_cos(8, 1).pow(2) - &CycNum::from_int(2);
        assert_eq!(z.real_sign(), Ordering::Equal);
        let big = CycNum::two_cos(8, 1).scale_int(1_000_000_000_000_000);
        let approx = CycNum::from_int(1_414_213_562_373_095);
        assert_eq!((&big - &approx).real_sign(), Ordering::Greater);
    }
}
