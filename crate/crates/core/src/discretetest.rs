//! Non-discreteness certificates for sporadic groups: Jørgensen, Knapp and
//! Shimizu tests on powers of R1R2 and R1R2R3R2⁻¹, and a census driver.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use astro_float::BigFloat;
use num_complex::Complex64;
use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{classify_unchecked, minimal_power_angle, Angle, IsometryKind, ParabolicKind};
use crate::cyclofield::{lcm, CycNum};
use crate::hermlinalg::{line_position, signature_exact, Mat3, Signature, Vec3};
use crate::hp;
use crate::spgroups::{hermitian_form, mat_pow, sporadic, SporadicId, TriangleGroup, XMat, XVec};

/// Strict inequalities must hold by at least this much in double precision.
pub const MARGIN: f64 = 1e-6;
/// Working precision for confirming verdicts.
pub const CONFIRM_BITS: usize = 256;

static BITS: AtomicUsize = AtomicUsize::new(CONFIRM_BITS);

/// Working precision of the multiprecision confirmations.
pub fn confirm_bits() -> usize {
    BITS.load(AtomicOrdering::Relaxed)
}

/// Sets the confirmation precision for the whole process (at least 64 bits).
pub fn set_confirm_bits(bits: usize) {
    BITS.store(bits.max(64), AtomicOrdering::Relaxed);
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TestError {
    #[error("polar vector is null; the power is parabolic")]
    PolarNull,
    #[error("mirrors intersect (cosh² = {0})")]
    MirrorsIntersect(f64),
    #[error("2cos(2π/p) + 2cos(rπ/s) vanishes")]
    ZeroDenominator,
    #[error("no r′/s′ data for this value")]
    NoRprime,
    #[error("the power is not a complex reflection or point reflection")]
    NotReflectionPower,
    #[error("the reflection power has zero angle")]
    ZeroAngle,
    #[error("angle α is not of the form π/q")]
    AngleNotSubmultiple,
    #[error("value {0} is outside [0, 1)")]
    ValueOutOfRange(f64),
    #[error("(R1R2)² is not a vertical translation")]
    NotVerticalParabolic,
    #[error("eigenvector identity failed")]
    EigenvectorMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    #[serde(rename = "R1R2")]
    PowR1R2,
    #[serde(rename = "R1R2R3R2inv")]
    PowR1R2R3R2inv,
}

impl Family {
    pub fn base_word(&self) -> &'static str {
        match self {
            Family::PowR1R2 => "12",
            Family::PowR1R2R3R2inv => "1232'",
        }
    }
}

/// Everything the two-reflection tests need.
#[derive(Debug, Clone, Serialize)]
pub struct TestTarget {
    pub family: Family,
    pub p: u32,
    pub s: i64,
    #[serde(skip)]
    pub polar: XVec,
    #[serde(skip)]
    pub polar_image: XVec,
    /// Sign of ⟨v,v⟩: positive for a mirror, negative for a fixed point.
    pub polar_positive: bool,
    pub base_angle: Angle,
    #[serde(serialize_with = "ser_ratio")]
    pub alpha: Rational64,
    pub power_witness: i64,
    /// |⟨v,Jv⟩|² and ⟨v,v⟩⟨Jv,Jv⟩, whose ratio is cosh²δ.
    #[serde(skip)]
    pub cosh_sq_parts: (CycNum, CycNum),
    pub coshdelta: f64,
}

fn ser_ratio<S: serde::Serializer>(q: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", q.numer(), q.denom()))
}

impl TestTarget {
    /// coshδ · sin α in double precision.
    pub fn value(&self) -> f64 {
        let a = std::f64::consts::PI * (*self.alpha.numer() as f64) / (*self.alpha.denom() as f64);
        self.coshdelta * a.sin()
    }

    /// coshδ · sin α at `bits` of precision.
    pub fn value_hp(&self, bits: usize) -> BigFloat {
        let num = hp::embed(&self.cosh_sq_parts.0, bits).re;
        let den = hp::embed(&self.cosh_sq_parts.1, bits).re;
        let c = hp::sqrt(&hp::div(&num, &den, bits), bits);
        let (s, _) = hp::sin_cos_pi_frac(*self.alpha.numer(), *self.alpha.denom(), bits);
        hp::mul(&c, &s, bits)
    }

    /// Rational multiple of π with α = π/q.
    pub fn alpha_q(&self) -> Option<i64> {
        (*self.alpha.numer() == 1).then_some(*self.alpha.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Reason {
    Jorgensen,
    KnappAngleGap,
    Shimizu,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Outcome {
    NonDiscrete(Reason),
    /// Non-discreteness established elsewhere in the literature, not by this engine.
    Cited,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub quantity: String,
    #[serde(serialize_with = "ser_sig")]
    pub value: f64,
    /// Human-readable threshold or interval violated.
    pub violates: String,
}

fn ser_sig<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&hp::format_sig(*v, 15))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestVerdict {
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    pub family: Option<Family>,
}

impl TestVerdict {
    pub fn inconclusive() -> TestVerdict {
        TestVerdict { outcome: Outcome::Inconclusive, witness: None, family: None }
    }

    pub fn is_nondiscrete(&self) -> bool {
        matches!(self.outcome, Outcome::NonDiscrete(_))
    }
}

fn zeta3p(p: u32, k: i64, n: u64) -> CycNum {
    CycNum::root_of_unity(3 * p as u64, k).lift_or_keep(n)
}

/// τ̄² + e^{−2iπ/p}τ − τ.
pub fn shimizu_expression(p: u32, tau: &CycNum) -> CycNum {
    let tb = tau.conj();
    let w = CycNum::root_of_unity(p as u64, -1);
    &(&(&tb * &tb) + &(&w * tau)) - tau
}

/// The closed form of p12 as an e^{−4iπ/3p}-eigenvector of R1R2.
pub fn p12(g: &TriangleGroup, rs: (i64, i64)) -> XVec {
    let n = g.field;
    let z = |k| zeta3p(g.p, k, n);
    let t = &g.tau;
    let tb = t.conj();
    let a = &(&(&z(-1) * &(t * t)) + &(&z(2) * &tb)) - &(&z(-1) * &tb);
    let b = &(&(&z(1) * &(&tb * &tb)) + &(&z(-2) * t)) - &(&z(1) * t);
    let zp = CycNum::root_of_unity(g.p as u64, 1);
    let c = &(&zp + &zp.conj()) + &CycNum::two_cos(2 * rs.1 as u64, rs.0);
    Vec3::new(a, b, c)
}

/// 2cos(2π/p) + 2cos(rπ/s).
pub fn cos_denominator(p: u32, rs: (i64, i64)) -> CycNum {
    &CycNum::two_cos(p as u64, 1) + &CycNum::two_cos(2 * rs.1 as u64, rs.0)
}

fn base_matrix(g: &TriangleGroup, f: Family) -> XMat {
    match f {
        Family::PowR1R2 => g.r[0].mul(&g.r[1]),
        Family::PowR1R2R3R2inv => g.r[0].mul(&g.r[1]).mul(&g.r[2]).mul(&g.r_inv[1]),
    }
}

fn build_target(g: &TriangleGroup, family: Family, rs: (i64, i64), polar: XVec) -> Result<TestTarget, TestError> {
    let n = g.field;
    let b = base_matrix(g, family);
    let lam = zeta3p(g.p, -2, n);
    if b.mul_vec(&polar) != polar.scale(&lam) || polar.is_zero() {
        return Err(TestError::EigenvectorMismatch);
    }
    if cos_denominator(g.p, rs).is_zero() {
        return Err(TestError::ZeroDenominator);
    }
    let s = rs.1;
    let bs = mat_pow(&b, s as u64, &g.identity());
    let lam_s = zeta3p(g.p, -2 * s, n);
    // Reflection-type powers have a double eigenvalue μ with rank(Bˢ − μ) = 1.
    let mu = {
        let t = &bs.trace() - &lam_s;
        let half = CycNum::from_rational(&num_rational::BigRational::new(1.into(), 2.into()));
        &t * &half
    };
    if bs.sub(&Mat3::scalar(&mu)).rank() != 1 {
        return Err(TestError::NotReflectionPower);
    }
    let vv = g.form.inner(&polar, &polar).re();
    let sign = vv.real_sign();
    if sign == Ordering::Equal {
        return Err(TestError::PolarNull);
    }
    let base_angle = crate::classify::ratio_angle(&lam_s, &mu);
    let ratio = base_angle.pi_ratio.ok_or(TestError::NotReflectionPower)?;
    let (alpha, k) = minimal_power_angle(ratio).map_err(|_| TestError::ZeroAngle)?;
    let image = g.j.mul_vec(&polar);
    let cross = g.form.inner(&polar, &image);
    let num = cross.norm_sq();
    let den = &vv * &g.form.inner(&image, &image).re();
    let c = num.to_c64().re / den.to_c64().re;
    if sign == Ordering::Greater && (&num - &den).real_sign() != Ordering::Greater {
        return Err(TestError::MirrorsIntersect(c));
    }
    Ok(TestTarget {
        family,
        p: g.p,
        s,
        polar,
        polar_image: image,
        polar_positive: sign == Ordering::Greater,
        base_angle,
        alpha,
        power_witness: k,
        cosh_sq_parts: (num, den),
        coshdelta: c.sqrt(),
    })
}

/// Target from powers of R1R2, with the closed-form eigenvector p12.
pub fn build_target_r1r2(g: &TriangleGroup, rs: (i64, i64)) -> Result<TestTarget, TestError> {
    build_target(g, Family::PowR1R2, rs, p12(g, rs))
}

/// Target from powers of R1R2R3R2⁻¹; the eigenvector is the kernel of the
/// shifted matrix.
pub fn build_target_r1232(g: &TriangleGroup, rps: Option<(i64, i64)>) -> Result<TestTarget, TestError> {
    let rps = rps.ok_or(TestError::NoRprime)?;
    let b = base_matrix(g, Family::PowR1R2R3R2inv);
    let lam = zeta3p(g.p, -2, g.field);
    let v = b.sub(&Mat3::scalar(&lam)).kernel_vector().ok_or(TestError::EigenvectorMismatch)?;
    build_target(g, Family::PowR1R2R3R2inv, rps, v)
}

/// |(1−w)τ + |τ|²(τ̄² − 2τ) + w̄τ̄²| / |2cos(2π/p) + 2cos(r′π/s′)| with w = e^{2iπ/p}.
pub fn coshdelta_prime_closed_form(p: u32, tau: Complex64, rps: (i64, i64)) -> f64 {
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / p as f64);
    let tb = tau.conj();
    let n = tau.norm_sqr();
    let num = (Complex64::new(1.0, 0.0) - w) * tau + n * (tb * tb - 2.0 * tau) + w.conj() * tb * tb;
    let den = 2.0 * (2.0 * std::f64::consts::PI / p as f64).cos()
        + 2.0 * (std::f64::consts::PI * rps.0 as f64 / rps.1 as f64).cos();
    num.norm() / den.abs()
}

/// cosh δ from the printed distance formula for the R1R2 family.
pub fn coshdelta_closed_form(p: u32, tau: Complex64, rs: (i64, i64)) -> f64 {
    let w = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI / p as f64);
    let tb = tau.conj();
    let num = (tb * tb + w * tau - tau).norm();
    let den = 2.0 * (2.0 * std::f64::consts::PI / p as f64).cos()
        + 2.0 * (std::f64::consts::PI * rs.0 as f64 / rs.1 as f64).cos();
    num / den.abs()
}

/// Same quantity from the polar vectors via the line-position invariant.
pub fn coshdelta_from_polars(t: &TestTarget, g: &TriangleGroup) -> f64 {
    let h = g.form.to_c64();
    match line_position(&t.polar.to_c64(), &t.polar_image.to_c64(), &h) {
        Ok(lp) => lp.c().sqrt(),
        Err(_) => f64::NAN,
    }
}

fn hp_f64(x: &BigFloat) -> f64 {
    hp::to_f64(x)
}

/// Sign of `v − a`, decided in double precision when the gap exceeds the
/// margin and otherwise escalated; `None` means equal at high precision.
fn certified_cmp(v: f64, a: f64, v_hp: &dyn Fn() -> BigFloat, a_hp: &dyn Fn() -> BigFloat) -> Option<(Ordering, bool)> {
    let d = v - a;
    let hpd = hp_f64(&hp::sub(&v_hp(), &a_hp(), confirm_bits()));
    if d.abs() > MARGIN {
        // confirm at high precision
        if hpd.signum() == d.signum() && hpd.abs() > MARGIN {
            return Some((if d > 0.0 { Ordering::Greater } else { Ordering::Less }, true));
        }
    }
    if hpd.abs() < 1e-60 {
        return None;
    }
    Some((if hpd > 0.0 { Ordering::Greater } else { Ordering::Less }, false))
}

fn bf_const(x: f64) -> BigFloat {
    BigFloat::from_f64(x, confirm_bits() + 64)
}

/// Jørgensen: non-discrete when coshδ·sin α < 1/2.
pub fn jorgensen_test(t: &TestTarget) -> Result<TestVerdict, TestError> {
    t.alpha_q().ok_or(TestError::AngleNotSubmultiple)?;
    let v = t.value();
    let cmp = certified_cmp(v, 0.5, &|| t.value_hp(confirm_bits()), &|| bf_const(0.5));
    let witness = Some(Witness { quantity: "coshδ·sinα".into(), value: v, violates: "< 1/2".into() });
    Ok(match cmp {
        Some((Ordering::Less, true)) => {
            TestVerdict { outcome: Outcome::NonDiscrete(Reason::Jorgensen), witness, family: Some(t.family) }
        }
        _ => TestVerdict { outcome: Outcome::Inconclusive, witness, family: Some(t.family) },
    })
}

/// The admissible values of Knapp's theorem below `upper`, as (label, f64, π-fraction of the cosine argument).
fn knapp_admissible(alpha: Rational64, upper: f64) -> Vec<(String, f64, (i64, i64))> {
    let mut out = Vec::new();
    let mut q = 1i64;
    loop {
        let c = (std::f64::consts::PI / q as f64).cos();
        out.push((format!("cos(π/{q})"), c, (1, q)));
        if c > upper {
            break;
        }
        q += 1;
    }
    let two = alpha * 2;
    let c2 = (std::f64::consts::PI * (*two.numer() as f64) / (*two.denom() as f64)).cos();
    out.push((format!("cos({}π/{})", two.numer(), two.denom()), c2, (*two.numer(), *two.denom())));
    out
}

fn hp_cos_pi(num: i64, den: i64) -> BigFloat {
    hp::sin_cos_pi_frac(num, den, confirm_bits()).1
}

/// Knapp: non-discrete when coshδ·sin α avoids every admissible value.
pub fn knapp_test(t: &TestTarget) -> Result<TestVerdict, TestError> {
    t.alpha_q().ok_or(TestError::AngleNotSubmultiple)?;
    let v = t.value();
    if !(0.0..1.0).contains(&v) {
        return Err(TestError::ValueOutOfRange(v));
    }
    let adm = knapp_admissible(t.alpha, v + MARGIN);
    gap_verdict(v, &|| t.value_hp(confirm_bits()), &adm, Reason::KnappAngleGap, "coshδ·sinα", Some(t.family))
}

fn gap_verdict(
    v: f64,
    v_hp: &dyn Fn() -> BigFloat,
    adm: &[(String, f64, (i64, i64))],
    reason: Reason,
    quantity: &str,
    family: Option<Family>,
) -> Result<TestVerdict, TestError> {
    let mut below: Option<&(String, f64, (i64, i64))> = None;
    let mut above: Option<&(String, f64, (i64, i64))> = None;
    let mut certified = true;
    for a in adm {
        let d = v - a.1;
        if d.abs() <= MARGIN {
            // escalate: equality or near-equality leaves the test undecided
            let c = certified_cmp(v, a.1, v_hp, &|| {
                let (n, dd) = a.2;
                let c = hp_cos_pi(n, dd);
                if reason == Reason::Shimizu {
                    hp::mul(&c, &bf_const(2.0), confirm_bits())
                } else {
                    c
                }
            });
            if c.is_none() || !c.unwrap().1 {
                certified = false;
            }
        }
        if a.1 < v && below.map_or(true, |b| a.1 > b.1) {
            below = Some(a);
        }
        if a.1 > v && above.map_or(true, |b| a.1 < b.1) {
            above = Some(a);
        }
    }
    let violates = format!(
        "strictly inside ({}, {})",
        below.map(|b| b.0.as_str()).unwrap_or("-∞"),
        above.map(|b| b.0.as_str()).unwrap_or("+∞")
    );
    let witness = Some(Witness { quantity: quantity.into(), value: v, violates });
    if certified {
        // confirm the value itself at high precision
        let hv = hp_f64(&v_hp());
        if (hv - v).abs() < 1e-12 {
            return Ok(TestVerdict { outcome: Outcome::NonDiscrete(reason), witness, family });
        }
    }
    Ok(TestVerdict { outcome: Outcome::Inconclusive, witness, family })
}

/// Shimizu's lemma applied to the parabolic (R1R2)² and its J-conjugate.
pub fn shimizu_test(g: &TriangleGroup) -> Result<TestVerdict, TestError> {
    let m = mat_pow(&g.r[0].mul(&g.r[1]), 2, &g.identity());
    match classify_unchecked(&m, &g.form).map(|c| c.kind) {
        Ok(IsometryKind::Parabolic(ParabolicKind::VerticalTranslation)) => {}
        _ => return Err(TestError::NotVerticalParabolic),
    }
    let e = shimizu_expression(g.p, &g.tau);
    let m2 = e.norm_sq();
    let v = m2.to_c64().re.sqrt();
    let v_hp = || hp::sqrt(&hp::embed(&m2, confirm_bits()).re, confirm_bits());
    let four = CycNum::from_int(4);
    if (&m2 - &four).real_sign() != Ordering::Less {
        let witness = Some(Witness { quantity: "m".into(), value: v, violates: "< 2".into() });
        return Ok(TestVerdict { outcome: Outcome::Inconclusive, witness, family: None });
    }
    // admissible values 2cos(π/r), r ≥ 3, plus the endpoint 2
    let mut adm = Vec::new();
    let mut r = 3i64;
    loop {
        let c = 2.0 * (std::f64::consts::PI / r as f64).cos();
        adm.push((format!("2cos(π/{r})"), c, (1, r)));
        if c > v + MARGIN {
            break;
        }
        r += 1;
    }
    gap_verdict(v, &v_hp, &adm, Reason::Shimizu, "m", None)
}

/// One row of the census.
#[derive(Debug, Clone, Serialize)]
pub struct CensusRow {
    pub p: u32,
    pub tau: SporadicId,
    pub signature: Signature,
    pub verdict: TestVerdict,
    pub notes: Vec<String>,
}

/// Numerical check beyond the exact range.
#[derive(Debug, Clone, Serialize)]
pub struct TailBracket {
    pub tau: SporadicId,
    pub from_p: u32,
    pub to_p: u32,
    pub method: &'static str,
    /// p in the window without a double-precision non-discreteness verdict.
    pub exceptions: Vec<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub rows: Vec<CensusRow>,
    pub tails: Vec<TailBracket>,
}

#[derive(Debug, Clone)]
pub struct CensusConfig {
    pub p_min: u32,
    pub p_max: u32,
    pub taus: Vec<SporadicId>,
    /// Try the R1R2R3R2⁻¹ family for every value that has r′/s′.
    pub all_families: bool,
    /// Fall back on literature verdicts where the engine is inconclusive.
    pub cited: bool,
    /// Scan p up to `tail_factor`·p_max in double precision.
    pub tail_factor: u32,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig { p_min: 2, p_max: 50, taus: SporadicId::all(), all_families: false, cited: true, tail_factor: 4 }
    }
}

/// Values whose non-discreteness for the whole hyperbolic range (σ6, σ̄6 except p = 5)
/// comes from earlier work.
pub fn cited_nondiscrete(id: SporadicId, p: u32) -> bool {
    match id.index {
        3 | 8 | 9 => p >= 3,
        6 => p >= 3 && p != 5,
        _ => false,
    }
}

fn uses_second_family(id: SporadicId, all: bool) -> bool {
    if all {
        id.index <= 6
    } else {
        id.index <= 2
    }
}

/// Runs every applicable test on one hyperbolic group.
pub fn test_group(g: &TriangleGroup, id: SporadicId, all_families: bool) -> (TestVerdict, Vec<String>) {
    let sv = sporadic(id);
    let mut notes = Vec::new();
    let mut last = TestVerdict::inconclusive();
    let mut targets = vec![(Family::PowR1R2, build_target_r1r2(g, sv.rs))];
    if uses_second_family(id, all_families) {
        targets.push((Family::PowR1R2R3R2inv, build_target_r1232(g, sv.rps)));
    }
    for (fam, t) in targets {
        match t {
            Ok(t) => {
                if !t.polar_positive {
                    notes.push(format!("{}: polar negative (rotation about a point)", fam.base_word()));
                }
                if let Ok(v) = jorgensen_test(&t) {
                    if v.is_nondiscrete() {
                        return (v, notes);
                    }
                    last = v;
                }
                match knapp_test(&t) {
                    Ok(v) if v.is_nondiscrete() => return (v, notes),
                    Ok(v) => last = v,
                    Err(e) => notes.push(format!("{}: knapp {e}", fam.base_word())),
                }
            }
            Err(e) => notes.push(format!("{}: {e}", fam.base_word())),
        }
    }
    match shimizu_test(g) {
        Ok(v) if v.is_nondiscrete() => return (v, notes),
        Ok(v) => last = v,
        Err(_) => {}
    }
    last.outcome = Outcome::Inconclusive;
    (last, notes)
}

/// Census over p and τ; rows sorted by τ then p.
pub fn census_nondiscrete(cfg: &CensusConfig) -> CensusReport {
    let pairs: Vec<(SporadicId, u32)> =
        cfg.taus.iter().flat_map(|&id| (cfg.p_min.max(2)..=cfg.p_max).map(move |p| (id, p))).collect();
    let mut rows: Vec<CensusRow> = pairs
        .par_iter()
        .filter_map(|&(id, p)| {
            let tau = sporadic(id).value;
            let sig = signature_exact(&hermitian_form(p, &tau));
            if !sig.is_hyperbolic() {
                return None;
            }
            let g = TriangleGroup::new(p, &tau, &id.name()).ok()?;
            let (mut verdict, mut notes) = test_group(&g, id, cfg.all_families);
            if !verdict.is_nondiscrete() && cfg.cited && cited_nondiscrete(id, p) {
                verdict = TestVerdict { outcome: Outcome::Cited, witness: None, family: None };
                notes.push("non-discrete by earlier work".into());
            }
            Some(CensusRow { p, tau: id, signature: sig, verdict, notes })
        })
        .collect();
    rows.sort_by_key(|r| (r.tau, r.p));
    let tails = if cfg.tail_factor > 1 {
        cfg.taus
            .par_iter()
            .filter_map(|&id| tail_bracket(id, cfg.p_max, cfg.tail_factor * cfg.p_max, cfg.all_families))
            .collect()
    } else {
        Vec::new()
    };
    CensusReport { rows, tails }
}

/// Double-precision scan of (from, to] for values whose hyperbolic range is unbounded.
pub fn tail_bracket(id: SporadicId, from: u32, to: u32, all_families: bool) -> Option<TailBracket> {
    let tau = sporadic(id).value.to_c64();
    let hyperbolic_at = |p: u32| {
        crate::hermlinalg::signature_float(&float_form(p, tau), 1e-12).map(|s| s.is_hyperbolic()).unwrap_or(false)
    };
    if !hyperbolic_at(to) {
        return None;
    }
    let sv = sporadic(id);
    let exceptions = ((from + 1)..=to)
        .filter(|&p| hyperbolic_at(p))
        .filter(|&p| {
            let mut ok = float_value(p, tau, Family::PowR1R2, sv.rs).map_or(false, float_nondiscrete);
            if !ok && uses_second_family(id, all_families) {
                if let Some(rps) = sv.rps {
                    ok = float_value(p, tau, Family::PowR1R2R3R2inv, rps).map_or(false, float_nondiscrete);
                }
            }
            !ok && !cited_nondiscrete(id, p)
        })
        .collect();
    Some(TailBracket { tau: id, from_p: from + 1, to_p: to, method: "double-precision scan", exceptions })
}

fn float_form(p: u32, tau: Complex64) -> crate::hermlinalg::HermForm<Complex64> {
    let pi = std::f64::consts::PI;
    let s = Complex64::new(2.0 * (pi / p as f64).sin(), 0.0);
    let i = Complex64::i();
    let e = Complex64::from_polar(1.0, pi / (3.0 * p as f64));
    let tb = tau.conj();
    let a = -i * e.conj() * tau;
    let b = i * e * tb;
    crate::hermlinalg::HermForm::new(Mat3::from_rows([[s, a, b], [b, s, a], [a, b, s]]))
}

fn float_nondiscrete((v, alpha): (f64, Rational64)) -> bool {
    if *alpha.numer() != 1 {
        return false;
    }
    if v < 0.5 - MARGIN {
        return true;
    }
    if !(0.0..1.0).contains(&v) {
        return false;
    }
    knapp_admissible(alpha, v + MARGIN).iter().all(|a| (v - a.1).abs() > MARGIN)
}

/// (coshδ·sin α, α/π) in double precision; `None` when the family does not apply.
pub fn float_value(p: u32, tau: Complex64, family: Family, rs: (i64, i64)) -> Option<(f64, Rational64)> {
    let pi = std::f64::consts::PI;
    let h = float_form(p, tau);
    let z = |k: f64| Complex64::from_polar(1.0, 2.0 * pi * k / (3.0 * p as f64));
    let tb = tau.conj();
    let r1 = Mat3::from_rows([
        [z(2.0), tau, -z(1.0) * tb],
        [Complex64::new(0.0, 0.0), z(-1.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), z(-1.0)],
    ]);
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let j = Mat3::from_rows([[o, o, l], [l, o, o], [o, l, o]]);
    let ji = j.transpose();
    let r2 = j.mul(&r1).mul(&ji);
    let r3 = j.mul(&r2).mul(&ji);
    let b = match family {
        Family::PowR1R2 => r1.mul(&r2),
        Family::PowR1R2R3R2inv => r1.mul(&r2).mul(&r3).mul(&r2.inverse()),
    };
    let lam = z(-2.0);
    let shifted = b.sub(&Mat3::scalar(&lam));
    let v = (0..3)
        .flat_map(|i| ((i + 1)..3).map(move |k| (i, k)))
        .map(|(i, k)| shifted.row(i).cross(&shifted.row(k)))
        .max_by(|a, c| a.norm_inf().total_cmp(&c.norm_inf()))?;
    let v = v.normalized();
    let s = rs.1;
    let bs = mat_pow(&b, s as u64, &Mat3::identity());
    let lam_s = z(-2.0 * s as f64);
    let mu = (bs.trace() - lam_s) / 2.0;
    let ang = (lam_s / mu).arg().rem_euclid(2.0 * pi) / pi;
    let den = 2 * 3 * p as i64 * 2 * 9 * 7 * 5;
    let ratio = Rational64::new((ang * den as f64).round() as i64, den);
    let (alpha, _) = minimal_power_angle(ratio).ok()?;
    let vv = h.inner(&v, &v).re;
    if vv.abs() < 1e-12 {
        return None;
    }
    let jv = j.mul_vec(&v);
    let c = h.inner(&v, &jv).norm_sqr() / (vv * h.inner(&jv, &jv).re);
    if vv > 0.0 && c <= 1.0 {
        return None;
    }
    let a = pi * (*alpha.numer() as f64) / (*alpha.denom() as f64);
    Some((c.sqrt() * a.sin(), alpha))
}

/// Which quantity a published table row reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableQuantity {
    Family(Family),
    ShimizuM,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub p: u32,
    pub tau: SporadicId,
    pub quantity: TableQuantity,
    /// The value as printed, with its number of digits.
    pub printed: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableSpec {
    pub id: &'static str,
    pub rows: Vec<TableRow>,
}

/// Numeric tables from the literature, keyed by proposition label.
pub fn table_specs() -> Vec<TableSpec> {
    use Family::*;
    let id = |s: &str| s.parse::<SporadicId>().unwrap();
    let fam = |name: &'static str, tau: &str, f: Family, rows: &[(u32, &'static str)]| TableSpec {
        id: name,
        rows: rows
            .iter()
            .map(|&(p, printed)| TableRow { p, tau: id(tau), quantity: TableQuantity::Family(f), printed })
            .collect(),
    };
    let mut sig4 = fam("prop:sig4", "sigma4", PowR1R2, &[(5, "0.445"), (6, "0.550")]);
    sig4.rows.insert(0, TableRow { p: 4, tau: id("sigma4"), quantity: TableQuantity::ShimizuM, printed: "0.595" });
    sig4.rows.push(TableRow { p: 4, tau: id("sigma5bar"), quantity: TableQuantity::ShimizuM, printed: "0.289" });
    sig4.rows.push(TableRow { p: 5, tau: id("sigma6"), quantity: TableQuantity::Family(PowR1R2), printed: "0.937" });
    sig4.rows.push(TableRow { p: 5, tau: id("sigma6bar"), quantity: TableQuantity::Family(PowR1R2), printed: "0.750" });
    vec![
        fam(
            "prop:sig1",
            "sigma1",
            PowR1R2,
            &[(7, "0.6510"), (8, "0.4969"), (12, "0.8134"), (15, "0.6510"), (18, "0.5416"), (21, "0.4631")],
        ),
        fam(
            "prop:sig4c",
            "sigma4bar",
            PowR1R2,
            &[
                (7, "0.4257"),
                (9, "0.2650"),
                (10, "0.4423"),
                (14, "0.2774"),
                (20, "0.6748"),
                (28, "0.4754"),
                (16, "0.4601"),
                (24, "0.2889"),
            ],
        ),
        fam(
            "prop:sig5",
            "sigma5",
            PowR1R2,
            &[
                (7, "0.4977"),
                (9, "0.3011"),
                (10, "0.4974"),
                (14, "0.3032"),
                (20, "0.7202"),
                (28, "0.4988"),
                (16, "0.4980"),
                (24, "0.3053"),
            ],
        ),
        fam(
            "prop:sig2",
            "sigma2",
            PowR1R2,
            &[
                (6, "0.631"),
                (7, "0.516"),
                (8, "0.438"),
                (15, "0.908"),
                (20, "0.729"),
                (25, "0.601"),
                (30, "0.508"),
                (35, "0.440"),
            ],
        ),
        fam("prop:sig2c", "sigma2bar", PowR1R2, &[(6, "0.5660"), (7, "0.4713"), (15, "0.8718")]),
        fam(
            "prop:sig7",
            "sigma7",
            PowR1R2,
            &[
                (5, "0.929"),
                (6, "0.702"),
                (8, "0.476"),
                (21, "0.921"),
                (28, "0.739"),
                (35, "0.608"),
                (42, "0.514"),
                (49, "0.444"),
            ],
        ),
        fam("prop:sig1'", "sigma1", PowR1R2R3R2inv, &[(9, "0.686")]),
        fam("prop:sig1c'", "sigma1bar", PowR1R2R3R2inv, &[(3, "0.982"), (7, "0.269"), (6, "0.859")]),
        fam("prop:sig2'", "sigma2", PowR1R2R3R2inv, &[(10, "0.6181")]),
        fam("prop:sig2c'", "sigma2bar", PowR1R2R3R2inv, &[(10, "0.3871")]),
        sig4,
    ]
}

/// Computed value for one table row, with α when it applies.
#[derive(Debug, Clone, Serialize)]
pub struct TableResult {
    pub p: u32,
    pub tau: SporadicId,
    pub printed: &'static str,
    #[serde(serialize_with = "ser_sig")]
    pub computed: f64,
    pub alpha: Option<String>,
    pub test: String,
    /// |computed − printed| ≤ one unit in the last printed digit.
    pub matches: bool,
}

pub fn evaluate_row(row: &TableRow) -> Result<TableResult, TestError> {
    let g =
        TriangleGroup::new(row.p, &sporadic(row.tau).value, &row.tau.name()).map_err(|_| TestError::ZeroDenominator)?;
    let sv = sporadic(row.tau);
    let (computed, alpha, test) = match row.quantity {
        TableQuantity::ShimizuM => {
            let v = shimizu_test(&g)?;
            (v.witness.map(|w| w.value).unwrap_or(f64::NAN), None, format!("{:?}", v.outcome))
        }
        TableQuantity::Family(f) => {
            let t = match f {
                Family::PowR1R2 => build_target_r1r2(&g, sv.rs)?,
                Family::PowR1R2R3R2inv => build_target_r1232(&g, sv.rps)?,
            };
            let j = jorgensen_test(&t)?;
            let verdict = if j.is_nondiscrete() { j } else { knapp_test(&t).unwrap_or(j) };
            (t.value(), Some(format!("π/{}", t.alpha.denom())), format!("{:?}", verdict.outcome))
        }
    };
    Ok(TableResult {
        p: row.p,
        tau: row.tau,
        printed: row.printed,
        computed,
        alpha,
        test,
        matches: matches_printed(computed, row.printed),
    })
}

/// Within one unit of the last printed digit.
pub fn matches_printed(x: f64, printed: &str) -> bool {
    let digits = printed.split('.').nth(1).map_or(0, |d| d.len());
    let v: f64 = printed.parse().unwrap_or(f64::NAN);
    (x - v).abs() <= 10f64.powi(-(digits as i32)) * (1.0 + 1e-9)
}

/// tr(R1R2R3R2⁻¹) in closed form: e^{2iπ/3p}(2 − |τ² − τ̄|²) + e^{−4iπ/3p}.
pub fn trace_r1232_closed_form(p: u32, tau: &CycNum) -> CycNum {
    let d = &(tau * tau) - &tau.conj();
    let two = CycNum::from_int(2);
    &(&CycNum::root_of_unity(3 * p as u64, 1) * &(&two - &d.norm_sq())) + &CycNum::root_of_unity(3 * p as u64, -2)
}

/// Checks tr((R1R2)²(R2R3)²) = ω^k(3 − |τ̄² + e^{−2iπ/p}τ − τ|²) for some k.
pub fn shimizu_trace_identity(g: &TriangleGroup) -> bool {
    let a = mat_pow(&g.r[0].mul(&g.r[1]), 2, &g.identity());
    let b = mat_pow(&g.r[1].mul(&g.r[2]), 2, &g.identity());
    let lhs = a.mul(&b).trace();
    let rhs = &CycNum::from_int(3) - &shimizu_expression(g.p, &g.tau).norm_sq();
    let n = lcm(lhs.conductor(), lcm(rhs.conductor(), 3));
    (0..3).any(|k| lhs == &CycNum::root_of_unity(3, k).lift_or_keep(n) * &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(p: u32, id: &str) -> (TriangleGroup, SporadicId) {
        let id: SporadicId = id.parse().unwrap();
        (TriangleGroup::sporadic(p, id).unwrap(), id)
    }

    #[test]
    fn sigma4bar_p7_value() {
        let (g, id) = grp(7, "sigma4bar");
        let t = build_target_r1r2(&g, sporadic(id).rs).unwrap();
        assert_eq!(t.alpha, Rational64::new(1, 14));
        assert!((t.value() - 0.425_740_326_552_784_5).abs() < 1e-12);
        assert!(jorgensen_test(&t).unwrap().is_nondiscrete());
    }

    #[test]
    fn closed_forms_agree_with_polars() {
        for (p, name) in [(7, "sigma4bar"), (12, "sigma1"), (16, "sigma5")] {
            let (g, id) = grp(p, name);
            let sv = sporadic(id);
            let t = build_target_r1r2(&g, sv.rs).unwrap();
            let closed = coshdelta_closed_form(p, sv.value.to_c64(), sv.rs);
            assert!((t.coshdelta - closed).abs() < 1e-12, "{name} {p}");
            assert!((coshdelta_from_polars(&t, &g) - t.coshdelta).abs() < 1e-10);
        }
        let (g, id) = grp(9, "sigma1");
        let sv = sporadic(id);
        let t = build_target_r1232(&g, sv.rps).unwrap();
        let closed = coshdelta_prime_closed_form(9, sv.value.to_c64(), sv.rps.unwrap());
        assert!((t.coshdelta - closed).abs() < 1e-12);
    }

    #[test]
    fn knapp_gap_at_sigma1_p12() {
        let (g, id) = grp(12, "sigma1");
        let t = build_target_r1r2(&g, sporadic(id).rs).unwrap();
        assert_eq!(t.alpha, Rational64::new(1, 4));
        assert!(!jorgensen_test(&t).unwrap().is_nondiscrete());
        assert_eq!(knapp_test(&t).unwrap().outcome, Outcome::NonDiscrete(Reason::KnappAngleGap));
    }

    #[test]
    fn shimizu_examples() {
        let (g, _) = grp(4, "sigma4");
        let v = shimizu_test(&g).unwrap();
        assert_eq!(v.outcome, Outcome::NonDiscrete(Reason::Shimizu));
        assert!((v.witness.unwrap().value - (3.0 - 7f64.sqrt()).sqrt()).abs() < 1e-12);
        let (g, _) = grp(5, "sigma4");
        assert_eq!(shimizu_test(&g), Err(TestError::NotVerticalParabolic));
    }

    #[test]
    fn admissible_value_is_inconclusive() {
        let adm = knapp_admissible(Rational64::new(1, 5), 0.95);
        let c7 = (std::f64::consts::PI / 7.0).cos();
        let v =
            gap_verdict(c7, &|| hp::sin_cos_pi_frac(1, 7, confirm_bits()).1, &adm, Reason::KnappAngleGap, "v", None)
                .unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
    }

    #[test]
    fn printed_tolerance() {
        assert!(matches_printed(0.42574, "0.4257"));
        assert!(matches_printed(0.4258, "0.4257"));
        assert!(!matches_printed(0.4259, "0.4257"));
        assert!(matches_printed(0.595188, "0.595"));
    }
}
