//! Sporadic values, the triangle groups Γ(2π/p, τ), words and relations.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

use crate::cyclofield::{lcm, CycNum};
use crate::hermlinalg::{signature_exact, HermForm, Mat3, Scalar, Signature, Vec3};

pub type XMat = Mat3<CycNum>;
pub type XVec = Vec3<CycNum>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GroupError {
    #[error("form has signature {0}, not (2,1)")]
    NotHyperbolic(Signature),
    #[error("p must be at least 2")]
    BadOrder,
    #[error("no negative center candidate")]
    NoNegativeCandidate,
    #[error("word parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown sporadic value `{0}`")]
    UnknownTau(String),
}

/// One of σ1…σ9 or a conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SporadicId {
    pub index: u8,
    pub bar: bool,
}

impl SporadicId {
    pub fn all() -> Vec<SporadicId> {
        (1..=9).flat_map(|i| [SporadicId { index: i, bar: false }, SporadicId { index: i, bar: true }]).collect()
    }

    pub fn name(&self) -> String {
        format!("sigma{}{}", self.index, if self.bar { "bar" } else { "" })
    }

    pub fn conjugate(&self) -> SporadicId {
        SporadicId { index: self.index, bar: !self.bar }
    }
}

impl fmt::Display for SporadicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for SporadicId {
    type Err = GroupError;
    fn from_str(s: &str) -> Result<Self, GroupError> {
        let t = s.trim().to_ascii_lowercase();
        let rest = t
            .strip_prefix("sigma")
            .or_else(|| t.strip_prefix('s'))
            .ok_or_else(|| GroupError::UnknownTau(s.to_string()))?;
        let (digits, bar) = if let Some(d) = rest.strip_suffix("bar") {
            (d, true)
        } else if let Some(d) = rest.strip_suffix('b') {
            (d, true)
        } else {
            (rest, false)
        };
        let index: u8 = digits.parse().map_err(|_| GroupError::UnknownTau(s.to_string()))?;
        if !(1..=9).contains(&index) {
            return Err(GroupError::UnknownTau(s.to_string()));
        }
        Ok(SporadicId { index, bar })
    }
}

/// A sporadic value with its rational data.
#[derive(Debug, Clone, Serialize)]
pub struct SporadicValue {
    pub id: SporadicId,
    pub value: CycNum,
    /// |τ|² = 2 + 2cos(rπ/s).
    pub rs: (i64, i64),
    /// |τ² − τ̄|² = 2 + 2cos(r′π/s′); absent for σ7…σ9.
    pub rps: Option<(i64, i64)>,
}

/// e^{iaπ/b}·e^{icπ/d}·2cos(eπ/f) style building blocks.
fn zeta_pi(num: i64, den: i64) -> CycNum {
    // e^{iπ num/den} = ζ_{2den}^{num}
    CycNum::root_of_unity(2 * den as u64, num)
}

fn two_cos_pi(num: i64, den: i64) -> CycNum {
    CycNum::two_cos(2 * den as u64, num)
}

pub fn sporadic(id: SporadicId) -> SporadicValue {
    let v = match id.index {
        1 => &zeta_pi(1, 3) + &(&zeta_pi(-1, 6) * &two_cos_pi(1, 4)),
        2 => &zeta_pi(1, 3) + &(&zeta_pi(-1, 6) * &two_cos_pi(1, 5)),
        3 => &zeta_pi(1, 3) + &(&zeta_pi(-1, 6) * &two_cos_pi(2, 5)),
        4 => {
            let z = |k| CycNum::root_of_unity(7, k);
            &(&z(1) + &z(2)) + &z(4)
        }
        5 => &zeta_pi(2, 9) + &(&zeta_pi(-1, 9) * &two_cos_pi(2, 5)),
        6 => &zeta_pi(2, 9) + &(&zeta_pi(-1, 9) * &two_cos_pi(4, 5)),
        7 => &zeta_pi(2, 9) + &(&zeta_pi(-1, 9) * &two_cos_pi(2, 7)),
        8 => &zeta_pi(2, 9) + &(&zeta_pi(-1, 9) * &two_cos_pi(4, 7)),
        9 => &zeta_pi(2, 9) + &(&zeta_pi(-1, 9) * &two_cos_pi(6, 7)),
        _ => unreachable!("sporadic index out of range"),
    };
    let value = if id.bar { v.conj() } else { v };
    let rs = [(1, 3), (1, 5), (3, 5), (1, 2), (1, 2), (1, 2), (1, 7), (5, 7), (3, 7)][id.index as usize - 1];
    let rps = [(1, 2), (1, 3), (1, 3), (2, 3), (2, 5), (4, 5)].get(id.index as usize - 1).copied();
    SporadicValue { id, value, rs, rps }
}

/// Generators of the word alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Gen {
    R1,
    R2,
    R3,
    J,
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Letter {
    pub gen: Gen,
    pub inv: bool,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        Letter { gen: self.gen, inv: !self.inv }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = match self.gen {
            Gen::R1 => "1",
            Gen::R2 => "2",
            Gen::R3 => "3",
            Gen::J => "J",
        };
        write!(f, "{g}{}", if self.inv { "'" } else { "" })
    }
}

/// A freely reduced word in 1, 2, 3, J and their inverses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Word {
    pub fn identity() -> Word {
        Word::default()
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn gen(g: Gen) -> Word {
        Word { letters: vec![Letter { gen: g, inv: false }] }
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    pub fn concat(&self, o: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(o.letters.iter()).copied())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn parse(s: &str) -> Result<Word, GroupError> {
        Ok(parse_expr(s)?.flatten())
    }

    /// Equivalent word of the form (word in R1, R2, R3)·J^m, using
    /// J R_i J⁻¹ = R_{i+1}, J³ = 1 and R_i^p = 1. Runs of one reflection
    /// are written with the shorter of the two exponent signs.
    pub fn normal_form(&self, p: u32) -> Word {
        let shift = |g: Gen, k: i64| -> Gen {
            let i = match g {
                Gen::R1 => 0,
                Gen::R2 => 1,
                Gen::R3 => 2,
                Gen::J => return Gen::J,
            };
            [Gen::R1, Gen::R2, Gen::R3][(i + k).rem_euclid(3) as usize]
        };
        // prefix = (runs)·J^m; J^m R_i = R_{i+m} J^m
        let mut m: i64 = 0;
        let mut runs: Vec<(Gen, i64)> = Vec::new();
        for l in &self.letters {
            let e = if l.inv { -1 } else { 1 };
            if l.gen == Gen::J {
                m += e;
                continue;
            }
            let g = shift(l.gen, m);
            match runs.last_mut() {
                Some((h, k)) if *h == g => *k += e,
                _ => runs.push((g, e)),
            }
            while runs.last().is_some_and(|&(_, k)| k % p as i64 == 0) {
                runs.pop();
                let n = runs.len();
                if n >= 2 && runs[n - 1].0 == runs[n - 2].0 {
                    let (_, k2) = runs.pop().expect("checked length");
                    runs.last_mut().expect("checked length").1 += k2;
                }
            }
        }
        let mut letters = Vec::new();
        for &(g, k) in &runs {
            let mut k = k.rem_euclid(p as i64);
            if 2 * k > p as i64 {
                k -= p as i64;
            }
            let l = Letter { gen: g, inv: k < 0 };
            letters.extend(std::iter::repeat(l).take(k.unsigned_abs() as usize));
        }
        match m.rem_euclid(3) {
            1 => letters.push(Letter { gen: Gen::J, inv: false }),
            2 => letters.push(Letter { gen: Gen::J, inv: true }),
            _ => {}
        }
        Word::from_letters(letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("Id");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Parsed word expression; powers are kept symbolic so long relators can be
/// evaluated by repeated squaring.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Letter(Letter),
    Seq(Vec<Expr>),
    Pow(Box<Expr>, i64),
}

impl Expr {
    pub fn flatten(&self) -> Word {
        match self {
            Expr::Letter(l) => Word::from_letters([*l]),
            Expr::Seq(v) => v.iter().fold(Word::identity(), |acc, e| acc.concat(&e.flatten())),
            Expr::Pow(e, k) => e.flatten().pow(*k),
        }
    }
}

/// Parses the word grammar: digits 1–3, `J`, suffix `'` for inverse,
/// parentheses, and `^k` powers with optional sign. `Id` and the empty
/// string denote the identity.
pub fn parse_expr(s: &str) -> Result<Expr, GroupError> {
    let chars: Vec<(usize, char)> = s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut pos = 0;
    let e = parse_seq(&chars, &mut pos)?;
    if pos < chars.len() {
        return Err(GroupError::Parse { pos: chars[pos].0, msg: "unexpected character".into() });
    }
    Ok(e)
}

fn parse_seq(c: &[(usize, char)], pos: &mut usize) -> Result<Expr, GroupError> {
    let mut items = Vec::new();
    while *pos < c.len() && c[*pos].1 != ')' {
        let mut atom = match c[*pos].1 {
            '1' | '2' | '3' | 'J' | 'j' => {
                let gen = match c[*pos].1 {
                    '1' => Gen::R1,
                    '2' => Gen::R2,
                    '3' => Gen::R3,
                    _ => Gen::J,
                };
                *pos += 1;
                Expr::Letter(Letter { gen, inv: false })
            }
            'I' => {
                // "Id" or "I" for the identity
                *pos += 1;
                if *pos < c.len() && c[*pos].1 == 'd' {
                    *pos += 1;
                }
                Expr::Seq(vec![])
            }
            '(' | '[' => {
                *pos += 1;
                let inner = parse_seq(c, pos)?;
                if *pos >= c.len() || !matches!(c[*pos].1, ')' | ']') {
                    return Err(GroupError::Parse {
                        pos: c.get(*pos).map(|x| x.0).unwrap_or(usize::MAX),
                        msg: "unclosed parenthesis".into(),
                    });
                }
                *pos += 1;
                inner
            }
            other => {
                return Err(GroupError::Parse { pos: c[*pos].0, msg: format!("unexpected `{other}`") });
            }
        };
        loop {
            if *pos < c.len() && c[*pos].1 == '\'' {
                *pos += 1;
                atom = Expr::Pow(Box::new(atom), -1);
            } else if *pos < c.len() && c[*pos].1 == '^' {
                *pos += 1;
                let start = *pos;
                if *pos < c.len() && c[*pos].1 == '-' {
                    *pos += 1;
                }
                while *pos < c.len() && c[*pos].1.is_ascii_digit() {
                    *pos += 1;
                }
                let txt: String = c[start..*pos].iter().map(|x| x.1).collect();
                let k: i64 = txt.parse().map_err(|_| GroupError::Parse {
                    pos: c.get(start).map(|x| x.0).unwrap_or(usize::MAX),
                    msg: "bad exponent".into(),
                })?;
                atom = Expr::Pow(Box::new(atom), k);
            } else {
                break;
            }
        }
        items.push(atom);
    }
    Ok(Expr::Seq(items))
}

/// Outcome of a projective relation check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RelationCheck {
    /// lhs = ω^k · rhs with ω = e^{2πi/3}.
    HoldsExactly { omega_power: u8 },
    /// Smallest entrywise residual over the three scalars.
    Fails { residual: f64 },
}

impl RelationCheck {
    pub fn holds(&self) -> bool {
        matches!(self, RelationCheck::HoldsExactly { .. })
    }
}

/// Γ(2π/p, τ) with exact generators.
pub struct TriangleGroup {
    pub p: u32,
    pub tau: CycNum,
    pub label: String,
    /// Conductor of the field holding the generators.
    pub field: u64,
    pub j: XMat,
    pub j_inv: XMat,
    pub r: [XMat; 3],
    pub r_inv: [XMat; 3],
    pub form: HermForm<CycNum>,
    pub signature: Signature,
    pub center: XVec,
    cache: Mutex<HashMap<Word, XMat>>,
}

impl fmt::Debug for TriangleGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Γ(2π/{}, {})", self.p, self.label)
    }
}

pub fn tau_conductor(tau: &CycNum) -> u64 {
    tau.conductor()
}

fn lift_mat(m: [[CycNum; 3]; 3], n: u64) -> XMat {
    Mat3 { m: m.map(|r| r.map(|x| x.lift_or_keep(n))) }
}

impl CycNum {
    /// Lifts to conductor `n` when the current conductor divides it.
    pub fn lift_or_keep(&self, n: u64) -> CycNum {
        if n % self.conductor() == 0 {
            self.lift(n)
        } else {
            self.clone()
        }
    }
}

/// The Hermitian form preserved by J and R1, over Q(ζ_lcm(12p, cond τ)).
pub fn hermitian_form(p: u32, tau: &CycNum) -> HermForm<CycNum> {
    let p64 = p as u64;
    let n = lcm(12 * p64, tau.conductor());
    let s = CycNum::two_sin(2 * p64, 1);
    let i = CycNum::root_of_unity(4, 1);
    let e = CycNum::root_of_unity(6 * p64, 1);
    let e_inv = CycNum::root_of_unity(6 * p64, -1);
    let tb = tau.conj();
    let a = -&(&(&i * &e_inv) * tau); // −i e^{−iψ/6} τ
    let b = &(&i * &e) * &tb; // i e^{iψ/6} τ̄
    let m = [[s.clone(), a.clone(), b.clone()], [b.clone(), s.clone(), a.clone()], [a, b, s]];
    HermForm::new(lift_mat(m, n))
}

impl TriangleGroup {
    /// Builds the group, failing when H_τ is not of signature (2,1).
    pub fn new(p: u32, tau: &CycNum, label: &str) -> Result<TriangleGroup, GroupError> {
        let g = TriangleGroup::new_unchecked(p, tau, label)?;
        if !g.signature.is_hyperbolic() {
            return Err(GroupError::NotHyperbolic(g.signature));
        }
        Ok(g)
    }

    pub fn sporadic(p: u32, id: SporadicId) -> Result<TriangleGroup, GroupError> {
        TriangleGroup::new(p, &sporadic(id).value, &id.name())
    }

    /// Builds the generators whatever the signature; the center is left at
    /// (1,1,1) when no candidate is negative.
    pub fn new_unchecked(p: u32, tau: &CycNum, label: &str) -> Result<TriangleGroup, GroupError> {
        if p < 2 {
            return Err(GroupError::BadOrder);
        }
        let p64 = p as u64;
        let n = lcm(3 * p64, tau.conductor());
        let z = |k: i64| CycNum::root_of_unity(3 * p64, k);
        let zero = CycNum::zero;
        let one = CycNum::one;
        let tb = tau.conj();
        let r1 = lift_mat([[z(2), tau.clone(), -&(&z(1) * &tb)], [zero(), z(-1), zero()], [zero(), zero(), z(-1)]], n);
        let j = lift_mat([[zero(), zero(), one()], [one(), zero(), zero()], [zero(), one(), zero()]], n);
        let j_inv = j.transpose();
        let r2 = j.mul(&r1).mul(&j_inv);
        let r3 = j.mul(&r2).mul(&j_inv);
        let r_inv = [r1.adjugate(), r2.adjugate(), r3.adjugate()];
        let form = hermitian_form(p, tau);
        let signature = signature_exact(&form);
        let mut g = TriangleGroup {
            p,
            tau: tau.lift_or_keep(n),
            label: label.to_string(),
            field: n,
            j,
            j_inv,
            r: [r1, r2, r3],
            r_inv,
            form,
            signature,
            center: Vec3::new(one(), one(), one()),
            cache: Mutex::new(HashMap::new()),
        };
        if let Ok(c) = g.choose_center() {
            g.center = c;
        }
        Ok(g)
    }

    /// The J-fixed candidate among (1,1,1), (1,ω,ω̄), (1,ω̄,ω) that is negative.
    pub fn choose_center(&self) -> Result<XVec, GroupError> {
        let n = self.field;
        let w = CycNum::root_of_unity(3, 1).lift_or_keep(n);
        let wb = CycNum::root_of_unity(3, 2).lift_or_keep(n);
        let one = CycNum::one().lift_or_keep(n);
        let cands = [
            Vec3::new(one.clone(), one.clone(), one.clone()),
            Vec3::new(one.clone(), w.clone(), wb.clone()),
            Vec3::new(one, wb, w),
        ];
        for v in cands {
            if self.norm_sign(&v) == std::cmp::Ordering::Less {
                return Ok(v);
            }
        }
        Err(GroupError::NoNegativeCandidate)
    }

    /// Exact sign of ⟨v,v⟩.
    pub fn norm_sign(&self, v: &XVec) -> std::cmp::Ordering {
        self.form.inner(v, v).re().real_sign()
    }

    pub fn generator(&self, l: Letter) -> &XMat {
        match (l.gen, l.inv) {
            (Gen::R1, false) => &self.r[0],
            (Gen::R2, false) => &self.r[1],
            (Gen::R3, false) => &self.r[2],
            (Gen::R1, true) => &self.r_inv[0],
            (Gen::R2, true) => &self.r_inv[1],
            (Gen::R3, true) => &self.r_inv[2],
            (Gen::J, false) => &self.j,
            (Gen::J, true) => &self.j_inv,
        }
    }

    pub fn identity(&self) -> XMat {
        Mat3 { m: Mat3::<CycNum>::identity().m.map(|r| r.map(|x| x.lift(self.field))) }
    }

    /// Exact product of the letters, cached per word.
    pub fn word_matrix(&self, w: &Word) -> XMat {
        if let Some(m) = self.cache.lock().unwrap().get(w) {
            return m.clone();
        }
        let mut m = self.identity();
        for l in &w.letters {
            m = m.mul(self.generator(*l));
        }
        let mut cache = self.cache.lock().unwrap();
        if cache.len() < 4096 {
            cache.insert(w.clone(), m.clone());
        }
        m
    }

    /// Evaluates a parsed expression with repeated squaring for powers.
    pub fn eval(&self, e: &Expr) -> XMat {
        match e {
            Expr::Letter(l) => self.generator(*l).clone(),
            Expr::Seq(v) => v.iter().fold(self.identity(), |acc, x| acc.mul(&self.eval(x))),
            Expr::Pow(x, k) => {
                let base = self.eval(x);
                let base = if *k < 0 { base.adjugate() } else { base };
                mat_pow(&base, k.unsigned_abs(), &self.identity())
            }
        }
    }

    pub fn eval_str(&self, s: &str) -> Result<XMat, GroupError> {
        Ok(self.eval(&parse_expr(s)?))
    }

    /// Checks lhs = ω^k·rhs for some cube root of unity ω^k.
    pub fn verify_relation(&self, lhs: &str, rhs: &str) -> Result<RelationCheck, GroupError> {
        let a = self.eval_str(lhs)?;
        let b = self.eval_str(rhs)?;
        Ok(projective_compare(&a, &b, self.field))
    }

    /// Checks a relation written "lhs=rhs" or a bare relator.
    pub fn verify_relation_str(&self, rel: &str) -> Result<RelationCheck, GroupError> {
        match rel.split_once('=') {
            Some((l, r)) => self.verify_relation(l, r),
            None => self.verify_relation(rel, ""),
        }
    }

    /// Floating-point copies of the generators.
    pub fn float_generators(&self) -> FloatGroup {
        FloatGroup {
            r: [self.r[0].to_c64(), self.r[1].to_c64(), self.r[2].to_c64()],
            r_inv: [self.r_inv[0].to_c64(), self.r_inv[1].to_c64(), self.r_inv[2].to_c64()],
            j: self.j.to_c64(),
            j_inv: self.j_inv.to_c64(),
            form: self.form.to_c64(),
            center: self.center.to_c64(),
        }
    }
}

/// Double-precision view of a group.
#[derive(Debug, Clone)]
pub struct FloatGroup {
    pub r: [Mat3<Complex64>; 3],
    pub r_inv: [Mat3<Complex64>; 3],
    pub j: Mat3<Complex64>,
    pub j_inv: Mat3<Complex64>,
    pub form: HermForm<Complex64>,
    pub center: Vec3<Complex64>,
}

pub fn mat_pow<T: Scalar>(m: &Mat3<T>, k: u64, id: &Mat3<T>) -> Mat3<T> {
    let mut result = id.clone();
    let mut base = m.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = result.mul(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base);
        }
    }
    result
}

/// Compares two exact matrices up to cube roots of unity.
pub fn projective_compare(a: &XMat, b: &XMat, field: u64) -> RelationCheck {
    let n = lcm(field, 3);
    for k in 0..3u8 {
        let w = CycNum::root_of_unity(3, k as i64).lift_or_keep(n);
        if *a == b.scale(&w) {
            return RelationCheck::HoldsExactly { omega_power: k };
        }
    }
    let fa = a.to_c64();
    let fb = b.to_c64();
    let residual = (0..3)
        .map(|k| {
            let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0);
            fa.max_abs_diff(&fb.scale(&w))
        })
        .fold(f64::INFINITY, f64::min);
    RelationCheck::Fails { residual }
}

/// One row of the table of conjectural presentations.
#[derive(Debug, Clone, Serialize)]
pub struct Presentation {
    pub p: u32,
    pub tau: SporadicId,
    pub relations: Vec<String>,
}

/// Relations listed for the eleven conjectured lattices; a bare word is a
/// relator equal to the identity.
pub fn presentation_table() -> Vec<Presentation> {
    let s1 = SporadicId { index: 1, bar: false };
    let s4b = SporadicId { index: 4, bar: true };
    let s5 = SporadicId { index: 5, bar: false };
    let braid = "1(2323'2')1=(2323'2')1(2323'2')";
    let sigma1 = |p: u32, extra: &[&str]| {
        let mut r: Vec<String> = ["J=12312312", "J=23123123", "J=31231231"].iter().map(|s| s.to_string()).collect();
        r.push(format!("1^{p}"));
        r.push("(123)^8".into());
        r.extend(extra.iter().map(|s| s.to_string()));
        r.push("(12)^3=(21)^3".into());
        r.push("(1(232'))^2=((232')1)^2".into());
        r.push(braid.into());
        Presentation { p, tau: s1, relations: r }
    };
    let sigma4b = |p: u32, extra: &[&str]| {
        let mut r: Vec<String> = ["J'=1231231", "J'=2312312", "J'=3123123"].iter().map(|s| s.to_string()).collect();
        r.push(format!("1^{p}"));
        r.push("(123)^7".into());
        r.extend(extra.iter().map(|s| s.to_string()));
        r.push("(12)^2=(21)^2".into());
        Presentation { p, tau: s4b, relations: r }
    };
    let sigma5 = |p: u32, extra: &[&str]| {
        let mut r: Vec<String> = ["J^3", "J1J'=2", "J2J'=3", "J3J'=1"].iter().map(|s| s.to_string()).collect();
        r.push(format!("1^{p}"));
        r.push("(123)^10".into());
        r.extend(extra.iter().map(|s| s.to_string()));
        r.push("(12)^2=(21)^2".into());
        r.push("1(232')1(232')1=(232')1(232')1(232')".into());
        Presentation { p, tau: s5, relations: r }
    };
    vec![
        sigma1(3, &[]),
        sigma1(4, &["(12)^12"]),
        sigma1(6, &["(12)^6", "(1(232'))^12"]),
        sigma4b(3, &[]),
        sigma4b(4, &[]),
        sigma4b(5, &["(12)^20"]),
        sigma4b(6, &["(12)^12"]),
        sigma4b(8, &["(12)^8", "(1(232'))^24"]),
        sigma4b(12, &["(12)^6", "(1(232'))^12"]),
        sigma5(3, &[]),
        sigma5(4, &["(13'231'232')^12"]),
    ]
}

/// Integer helper used by callers that need exact small constants.
pub fn int(v: i64, n: u64) -> CycNum {
    CycNum::from_terms(n, &[(0, BigInt::from(v))], BigInt::from(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermlinalg::preserves_form_exact;

    #[test]
    fn parse_words() {
        assert_eq!(Word::parse("232'").unwrap().to_string(), "232'");
        assert_eq!(Word::parse("(12)^2").unwrap().to_string(), "1212");
        assert_eq!(Word::parse("(1J)^-1").unwrap().to_string(), "J'1'");
        assert_eq!(Word::parse("11'2").unwrap().to_string(), "2");
        assert!(Word::parse("").unwrap().is_empty());
        assert!(Word::parse("Id").unwrap().is_empty());
        assert!(Word::parse("(12").is_err());
        assert!(Word::parse("4").is_err());
    }

    #[test]
    fn tau_norms() {
        for id in SporadicId::all() {
            let s = sporadic(id);
            let n2 = s.value.to_c64().norm_sqr();
            let (r, q) = s.rs;
            let expect = 2.0 + 2.0 * (std::f64::consts::PI * r as f64 / q as f64).cos();
            assert!((n2 - expect).abs() < 1e-12, "{id}");
        }
    }

    #[test]
    fn id_parsing() {
        assert_eq!("sigma4bar".parse::<SporadicId>().unwrap(), SporadicId { index: 4, bar: true });
        assert_eq!("s7".parse::<SporadicId>().unwrap(), SporadicId { index: 7, bar: false });
        assert!("sigma10".parse::<SporadicId>().is_err());
    }

    #[test]
    fn generators_preserve_form() {
        let g = TriangleGroup::sporadic(3, "sigma4bar".parse().unwrap()).unwrap();
        for m in g.r.iter().chain([&g.j]) {
            assert!(preserves_form_exact(m, &g.form));
            assert!(m.det().is_one());
        }
        assert_eq!(g.r[0].mul(&g.j).trace(), g.tau);
    }

    fn hyperbolic_ps(id: &str, ps: std::ops::Range<u32>) -> Vec<u32> {
        let tau = sporadic(id.parse().unwrap()).value;
        ps.filter(|&p| signature_exact(&hermitian_form(p, &tau)).is_hyperbolic()).collect()
    }

    #[test]
    fn hyperbolic_ranges() {
        assert_eq!(hyperbolic_ps("sigma1bar", 2..12), vec![3, 4, 5, 6, 7]);
        assert_eq!(hyperbolic_ps("sigma4", 2..12), vec![4, 5, 6]);
        assert_eq!(hyperbolic_ps("sigma5bar", 2..12), vec![2, 4]);
        assert_eq!(hyperbolic_ps("sigma7bar", 2..12), vec![2]);
        assert_eq!(hyperbolic_ps("sigma9bar", 2..12), vec![4, 5, 6, 7, 8]);
        assert_eq!(hyperbolic_ps("sigma6bar", 28..32), vec![28, 29]);
    }

    #[test]
    fn normal_form_is_equivalent() {
        let g = TriangleGroup::sporadic(3, "sigma4bar".parse().unwrap()).unwrap();
        for w in ["J'J'1JJ", "1'J'1J", "J1J1J1", "111", "1J'2'J", "J'J'J'J'1JJJJ1J'1'JJJJJ", "2JJ3'J'1"] {
            let w = Word::parse(w).unwrap();
            let n = w.normal_form(3);
            assert!(projective_compare(&g.word_matrix(&w), &g.word_matrix(&n), g.field).holds(), "{w} vs {n}");
            assert!(n.letters.iter().rev().skip(1).all(|l| l.gen != Gen::J));
        }
        assert_eq!(Word::parse("J'J'1JJ").unwrap().normal_form(3).to_string(), "2");
        assert_eq!(Word::parse("111").unwrap().normal_form(3).to_string(), "Id");
        assert_eq!(Word::parse("11").unwrap().normal_form(3).to_string(), "1'");
    }

    #[test]
    fn presentation_rows_hold() {
        for pres in presentation_table().iter().filter(|r| r.p <= 4) {
            let g = TriangleGroup::sporadic(pres.p, pres.tau).unwrap();
            for rel in &pres.relations {
                assert!(g.verify_relation_str(rel).unwrap().holds(), "{} p={} {rel}", pres.tau, pres.p);
            }
        }
    }

    #[test]
    fn non_relation_fails() {
        let g = TriangleGroup::sporadic(3, "sigma1".parse().unwrap()).unwrap();
        assert!(!g.verify_relation_str("(12)^2=(21)^2").unwrap().holds());
    }
}
