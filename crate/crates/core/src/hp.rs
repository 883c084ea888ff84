//! Multiprecision embeddings of cyclotomic numbers, backed by astro-float.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::cyclofield::CycNum;

const RM: RoundingMode = RoundingMode::ToEven;

/// A complex number held as two multiprecision floats.
#[derive(Debug, Clone)]
pub struct HpComplex {
    pub re: BigFloat,
    pub im: BigFloat,
    pub bits: usize,
}

type RootTable = Arc<Vec<(BigFloat, BigFloat)>>;

fn table_cache() -> &'static Mutex<HashMap<(usize, usize), RootTable>> {
    static C: OnceLock<Mutex<HashMap<(usize, usize), RootTable>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn consts() -> Consts {
    Consts::new().expect("astro-float constants cache")
}

pub fn from_bigint(x: &BigInt, bits: usize, cc: &mut Consts) -> BigFloat {
    if let Some(v) = x.to_i128() {
        return BigFloat::from_i128(v, bits);
    }
    BigFloat::parse(&x.to_string(), Radix::Dec, bits, RM, cc)
}

pub fn to_f64(x: &BigFloat) -> f64 {
    let mut cc = consts();
    match x.format(Radix::Dec, RM, &mut cc) {
        Ok(s) => s.parse::<f64>().unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    }
}

/// Decimal rendering with `digits` significant digits.
pub fn to_decimal(x: &BigFloat, digits: usize) -> String {
    let v = to_f64(x);
    format_sig(v, digits)
}

pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    format!("{:.*e}", digits.saturating_sub(1), v)
}

fn roots(n: usize, phi: usize, bits: usize) -> RootTable {
    if let Some(t) = table_cache().lock().unwrap().get(&(n, bits)) {
        return t.clone();
    }
    let wp = bits + 64;
    let mut cc = consts();
    let two_pi = cc.pi(wp, RM).mul(&BigFloat::from_i64(2, wp), wp, RM);
    let nn = BigFloat::from_i64(n as i64, wp);
    let t: Vec<(BigFloat, BigFloat)> = (0..phi)
        .map(|k| {
            let a = two_pi.mul(&BigFloat::from_i64(k as i64, wp), wp, RM).div(&nn, wp, RM);
            (a.cos(wp, RM, &mut cc), a.sin(wp, RM, &mut cc))
        })
        .collect();
    let t = Arc::new(t);
    table_cache().lock().unwrap().insert((n, bits), t.clone());
    t
}

/// Evaluates Σ cᵢ ζ^i with `bits` of working precision.
pub fn embed(a: &CycNum, bits: usize) -> HpComplex {
    let n = a.conductor() as usize;
    let num = a.numerators();
    let table = roots(n, num.len(), bits);
    let wp = bits + 64;
    let mut cc = consts();
    let mut re = BigFloat::from_i64(0, wp);
    let mut im = BigFloat::from_i64(0, wp);
    for (i, x) in num.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let c = from_bigint(x, wp, &mut cc);
        re = re.add(&c.mul(&table[i].0, wp, RM), wp, RM);
        im = im.add(&c.mul(&table[i].1, wp, RM), wp, RM);
    }
    let d = from_bigint(a.denominator(), wp, &mut cc);
    HpComplex { re: re.div(&d, wp, RM), im: im.div(&d, wp, RM), bits }
}

impl HpComplex {
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }

    pub fn abs(&self) -> BigFloat {
        let wp = self.bits + 64;
        let s = self.re.mul(&self.re, wp, RM).add(&self.im.mul(&self.im, wp, RM), wp, RM);
        s.sqrt(wp, RM)
    }
}

/// Sign of the real part if the embedding error bound separates it from zero.
pub(crate) fn real_sign_at(a: &CycNum, bits: usize) -> Option<Ordering> {
    let e = embed(a, bits);
    let s: f64 = a.numerators().iter().map(|x| x.abs().to_f64().unwrap_or(f64::MAX)).sum::<f64>()
        / a.denominator().to_f64().unwrap_or(1.0);
    let phi = a.numerators().len() as f64;
    // Relative rounding error of each term is below 2^{-bits}; the bound is
    // loose on purpose.
    let bound = s * (phi + 8.0) * 2f64.powi(-(bits as i32) + 8);
    let mut cc = consts();
    let bf = BigFloat::parse(&format!("{bound:e}"), Radix::Dec, bits + 64, RM, &mut cc);
    let absre = e.re.abs();
    match absre.cmp(&bf) {
        Some(c) if c > 0 => Some(if e.re.is_negative() { Ordering::Less } else { Ordering::Greater }),
        _ => None,
    }
}

/// Multiprecision sqrt of a nonnegative float value, as f64-compatible output.
pub fn sqrt(x: &BigFloat, bits: usize) -> BigFloat {
    x.sqrt(bits + 64, RM)
}

pub fn mul(a: &BigFloat, b: &BigFloat, bits: usize) -> BigFloat {
    a.mul(b, bits + 64, RM)
}

pub fn div(a: &BigFloat, b: &BigFloat, bits: usize) -> BigFloat {
    a.div(b, bits + 64, RM)
}

pub fn sub(a: &BigFloat, b: &BigFloat, bits: usize) -> BigFloat {
    a.sub(b, bits + 64, RM)
}

/// sin(π·num/den) and cos(π·num/den) at the requested precision.
pub fn sin_cos_pi_frac(num: i64, den: i64, bits: usize) -> (BigFloat, BigFloat) {
    let wp = bits + 64;
    let mut cc = consts();
    let a = cc.pi(wp, RM).mul(&BigFloat::from_i64(num, wp), wp, RM).div(&BigFloat::from_i64(den, wp), wp, RM);
    (a.sin(wp, RM, &mut cc), a.cos(wp, RM, &mut cc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_matches_double() {
        let a = &CycNum::root_of_unity(7, 1) + &CycNum::root_of_unity(7, 3);
        let h = embed(&a, 256).to_c64();
        let d = a.to_c64();
        assert!((h - d).norm() < 1e-14);
    }

    #[test]
    fn high_precision_sqrt2() {
        let a = CycNum::two_cos(8, 1);
        let h = embed(&a, 256);
        let s = to_decimal(&h.re, 15);
        assert_eq!(s, "1.41421356237310e0");
    }
}
