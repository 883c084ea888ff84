//! Partial Dirichlet domains F_W, Giraud-disk sampling and the G-procedure.
//!
//! W is stored by orbit point: two words with the same image of the center
//! define the same bisector, so only one representative is kept. Words
//! fixing the center go to a separate stabiliser list, and W is kept closed
//! under inverses and under conjugation by the stabiliser.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use crate::classify::{classify_unchecked, minimal_power_angle, reflection_angle, Angle, IsometryKind};
use crate::cyclofield::CycNum;
use crate::hermlinalg::{CMat, CVec, HermForm, Mat3, Vec3};
use crate::spgroups::{projective_compare, Gen, Letter, RelationCheck, SporadicId, TriangleGroup, Word, XMat, XVec};

type C = Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DirichletError {
    #[error("vector is not negative")]
    NotNegativeVector,
    #[error("two of the three orbit points coincide")]
    DegenerateTriple,
    #[error("outcome is not Behaviour A")]
    NotBehaviourA,
    #[error("cycle angle is not a rational multiple of π")]
    IrrationalAngle,
    #[error("center override must have three comma-separated complex entries: {0}")]
    BadCenter(String),
}

/// Resource limits and sampling resolution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Limits {
    pub max_steps: usize,
    pub max_words: usize,
    pub grid: usize,
    /// Relative slack in the distance comparison.
    pub tol: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_steps: 12, max_words: 20000, grid: 200, tol: 1e-9 }
    }
}

/// A group element kept in W.
#[derive(Debug, Clone)]
pub struct Element {
    pub word: Word,
    pub exact: XMat,
    pub mat: CMat,
    pub exact_point: XVec,
    /// γp0 in double precision.
    pub point: CVec,
    /// cosh² d(p0, γp0).
    pub cosh2: f64,
}

/// F_W for a finite W ⊂ Γ around a center p0.
pub struct PartialDomain<'g> {
    pub group: &'g TriangleGroup,
    pub center: XVec,
    pub center_f: CVec,
    pub form: HermForm<C>,
    pub elements: Vec<Element>,
    pub stabiliser: Vec<(Word, XMat)>,
    index: BTreeMap<i64, Vec<usize>>,
    center_norm: f64,
}

fn ip(h: &HermForm<C>, v: &CVec, w: &CVec) -> C {
    h.inner(v, w)
}

fn cosh2(h: &HermForm<C>, x: &CVec, y: &CVec) -> f64 {
    ip(h, x, y).norm_sqr() / (ip(h, x, x).re * ip(h, y, y).re)
}

/// Parses "a,b,c" with complex decimal entries such as `1`, `0.5-0.25i`, `i`.
pub fn parse_center(s: &str) -> Result<XVec, DirichletError> {
    let parts: Vec<&str> = s.split(',').map(|x| x.trim()).collect();
    if parts.len() != 3 {
        return Err(DirichletError::BadCenter(s.into()));
    }
    let mut out = Vec::new();
    for p in parts {
        out.push(parse_complex_decimal(p).ok_or_else(|| DirichletError::BadCenter(s.into()))?);
    }
    Ok(Vec3::new(out[0].clone(), out[1].clone(), out[2].clone()))
}

fn parse_decimal(s: &str) -> Option<num_rational::BigRational> {
    use num_bigint::BigInt;
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) || (ip.is_empty() && fp.is_empty()) {
        return None;
    }
    let digits: String = format!("{ip}{fp}");
    let n: BigInt = digits.parse().ok()?;
    let d = BigInt::from(10u32).pow(fp.len() as u32);
    let q = num_rational::BigRational::new(n, d);
    Some(if neg { -q } else { q })
}

fn parse_complex_decimal(s: &str) -> Option<CycNum> {
    let s = s.replace(' ', "");
    let (re, im) = if let Some(body) = s.strip_suffix('i') {
        // split at the last sign that is not the leading one
        let pos = body.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').map(|(i, _)| i).last();
        match pos {
            Some(k) => (parse_decimal(&body[..k])?, imag_coeff(&body[k..])?),
            None => (num_rational::BigRational::from_integer(0.into()), imag_coeff(body)?),
        }
    } else {
        (parse_decimal(&s)?, num_rational::BigRational::from_integer(0.into()))
    };
    Some(CycNum::from_rationals(4, &[re, im]))
}

fn imag_coeff(s: &str) -> Option<num_rational::BigRational> {
    match s {
        "" | "+" => Some(num_rational::BigRational::from_integer(1.into())),
        "-" => Some(num_rational::BigRational::from_integer((-1).into())),
        _ => parse_decimal(s),
    }
}

fn dist_key(c2: f64) -> i64 {
    (c2.max(1.0).ln() * 1e7).round() as i64
}

/// What happened to a candidate word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inserted {
    New(usize),
    Duplicate(usize),
    Stabiliser,
}

impl<'g> PartialDomain<'g> {
    pub fn new(group: &'g TriangleGroup, center: Option<XVec>) -> Result<Self, DirichletError> {
        let center = center.unwrap_or_else(|| group.center.clone());
        if group.norm_sign(&center) != std::cmp::Ordering::Less {
            return Err(DirichletError::NotNegativeVector);
        }
        let form = group.form.to_c64();
        let center_f = center.to_c64();
        let center_norm = ip(&form, &center_f, &center_f).re;
        let mut d = PartialDomain {
            group,
            center,
            center_f,
            form,
            elements: Vec::new(),
            stabiliser: Vec::new(),
            index: BTreeMap::new(),
            center_norm,
        };
        // J fixes the default centers; record it if so.
        for w in ["J", "J'"] {
            let w = Word::parse(w).expect("literal word");
            let m = group.word_matrix(&w);
            if d.fixes_center(&m) {
                d.add_stabiliser(w, m);
            }
        }
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn words(&self) -> Vec<Word> {
        self.elements.iter().map(|e| e.word.clone()).collect()
    }

    fn fixes_center(&self, m: &XMat) -> bool {
        m.mul_vec(&self.center).cross(&self.center).is_zero()
    }

    fn add_stabiliser(&mut self, w: Word, m: XMat) -> bool {
        let field = self.group.field;
        if self.stabiliser.iter().any(|(_, s)| projective_compare(s, &m, field).holds()) {
            return false;
        }
        self.stabiliser.push((w, m));
        true
    }

    /// Inserts one element, without closure.
    pub fn insert(&mut self, word: Word, exact: XMat) -> Inserted {
        let word = word.normal_form(self.group.p);
        let q = exact.mul_vec(&self.center);
        if q.cross(&self.center).is_zero() {
            self.add_stabiliser(word, exact);
            return Inserted::Stabiliser;
        }
        let point = q.to_c64();
        let c2 = cosh2(&self.form, &point, &self.center_f);
        let key = dist_key(c2);
        for k in key - 2..=key + 2 {
            if let Some(list) = self.index.get(&k) {
                for &i in list {
                    let e = &self.elements[i];
                    // cheap float screen before the exact test
                    let cr = e.point.cross(&point);
                    let scale = e.point.norm_inf() * point.norm_inf();
                    if cr.norm_inf() > 1e-6 * scale {
                        continue;
                    }
                    if e.exact_point.cross(&q).is_zero() {
                        return Inserted::Duplicate(i);
                    }
                }
            }
        }
        let mat = exact.to_c64();
        self.elements.push(Element { word, exact, mat, exact_point: q, point, cosh2: c2 });
        let i = self.elements.len() - 1;
        self.index.entry(key).or_default().push(i);
        Inserted::New(i)
    }

    /// Inserts a word with its inverse and stabiliser conjugates; returns
    /// the number of new orbit points.
    pub fn insert_closed(&mut self, word: Word, exact: XMat, max_words: usize) -> usize {
        let mut added = 0;
        let mut queue = vec![(word, exact)];
        while let Some((w, m)) = queue.pop() {
            if self.elements.len() >= max_words {
                break;
            }
            match self.insert(w.clone(), m.clone()) {
                Inserted::New(_) => {
                    added += 1;
                    queue.push((w.inverse(), m.adjugate()));
                    for (sw, sm) in &self.stabiliser {
                        let conj = sm.mul(&m).mul(&sm.adjugate());
                        queue.push((sw.concat(&w).concat(&sw.inverse()), conj));
                    }
                }
                Inserted::Stabiliser => {
                    // close the existing set under the new stabiliser element
                    let n = self.elements.len();
                    if let Some((sw, sm)) = self.stabiliser.last().cloned() {
                        for i in 0..n {
                            let e = &self.elements[i];
                            let conj = sm.mul(&e.exact).mul(&sm.adjugate());
                            queue.push((sw.concat(&e.word).concat(&sw.inverse()), conj));
                        }
                    }
                }
                Inserted::Duplicate(_) => {}
            }
        }
        added
    }

    /// Membership in F_W of a negative vector.
    pub fn in_partial_domain(&self, x: &CVec) -> Result<bool, DirichletError> {
        let xx = ip(&self.form, x, x).re;
        if xx >= 0.0 {
            return Err(DirichletError::NotNegativeVector);
        }
        let a = ip(&self.form, x, &self.center_f).norm_sqr() / self.center_norm.abs();
        Ok(self.elements.iter().all(|e| {
            let qn = ip(&self.form, &e.point, &e.point).re.abs();
            ip(&self.form, x, &e.point).norm_sqr() / qn >= a * (1.0 - 1e-9)
        }))
    }

    /// Row vectors r_γ with ⟨x, γp0⟩ = r_γ·x, scaled so that ⟨γp0,γp0⟩ = ⟨p0,p0⟩.
    fn row_functionals(&self) -> Vec<[C; 3]> {
        self.elements
            .iter()
            .map(|e| {
                let qn = ip(&self.form, &e.point, &e.point).re;
                let s = (self.center_norm / qn).sqrt();
                let hq = self.form.matrix.mul_vec(&e.point);
                [hq.v[0].conj() * s, hq.v[1].conj() * s, hq.v[2].conj() * s]
            })
            .collect()
    }

    fn center_functional(&self) -> [C; 3] {
        let hp = self.form.matrix.mul_vec(&self.center_f);
        [hp.v[0].conj(), hp.v[1].conj(), hp.v[2].conj()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FaceVerdict {
    NonEmptyGeneric,
    Empty,
    InComplexGeodesic,
}

/// Chart data sufficient to regenerate sample points.
#[derive(Debug, Clone, Serialize)]
pub enum Chart {
    /// (θ1, θ2) = arguments of ⟨x,αp0⟩ and ⟨x,βp0⟩ relative to ⟨x,p0⟩, over a box.
    Giraud {
        theta1: (f64, f64),
        theta2: (f64, f64),
    },
    /// x = c + t·n with t in a square of half-width `radius`.
    ComplexDisk {
        radius: f64,
    },
    None,
}

/// A complex ridge: its circumcenter and polar vector.
#[derive(Debug, Clone)]
pub struct ComplexRidge {
    pub center: CVec,
    pub normal: CVec,
    /// Positive vector orthogonal to the ridge's complex line.
    pub polar: CVec,
}

#[derive(Debug, Clone, Serialize)]
pub struct FaceSample {
    pub alpha: Word,
    pub beta: Word,
    #[serde(skip)]
    pub pair: (usize, usize),
    pub grid: usize,
    pub hits: Vec<(u32, u32)>,
    pub verdict: FaceVerdict,
    pub chart: Chart,
    #[serde(skip)]
    pub points: Vec<CVec>,
    #[serde(skip)]
    pub ridge: Option<ComplexRidge>,
}

impl FaceSample {
    fn empty(d: &PartialDomain, i: usize, j: usize, grid: usize) -> FaceSample {
        FaceSample {
            alpha: d.elements[i].word.clone(),
            beta: d.elements[j].word.clone(),
            pair: (i, j),
            grid,
            hits: Vec::new(),
            verdict: FaceVerdict::Empty,
            chart: Chart::None,
            points: Vec::new(),
            ridge: None,
        }
    }

    pub fn is_nonempty(&self) -> bool {
        self.verdict != FaceVerdict::Empty
    }
}

/// More than one hit in some row and in some column.
pub fn row_column_rule(hits: &[(u32, u32)]) -> bool {
    let mut rows: HashMap<u32, u32> = HashMap::new();
    let mut cols: HashMap<u32, u32> = HashMap::new();
    for &(r, c) in hits {
        *rows.entry(r).or_default() += 1;
        *cols.entry(c).or_default() += 1;
    }
    rows.values().any(|&n| n > 1) && cols.values().any(|&n| n > 1)
}

#[inline]
fn dot(a: &[C; 3], y: &[C; 3]) -> C {
    a[0] * y[0] + a[1] * y[1] + a[2] * y[2]
}

/// Membership filter: every functional must have modulus at least `bound`.
/// The functional that rejected the previous sample is tried first.
struct Filter<'a> {
    funcs: Vec<&'a [C; 3]>,
    last: usize,
    bound2: f64,
}

impl<'a> Filter<'a> {
    fn new(funcs: Vec<&'a [C; 3]>, tol: f64) -> Self {
        Filter { funcs, last: 0, bound2: (1.0 - tol) * (1.0 - tol) }
    }

    /// `y` is normalized so that ⟨y,p0⟩ has modulus one.
    fn accepts(&mut self, y: &[C; 3]) -> bool {
        if self.funcs.is_empty() {
            return true;
        }
        if dot(self.funcs[self.last], y).norm_sqr() < self.bound2 {
            return false;
        }
        for (k, f) in self.funcs.iter().enumerate() {
            if dot(f, y).norm_sqr() < self.bound2 {
                self.last = k;
                return false;
            }
        }
        true
    }
}

fn largest_gap_interval(mut vals: Vec<f64>, pad: f64) -> (f64, f64) {
    vals.sort_by(|a, b| a.total_cmp(b));
    vals.dedup();
    if vals.len() < 2 {
        let v = vals.first().copied().unwrap_or(0.0);
        return (v - pad, v + pad);
    }
    let mut best = (vals[0] + 2.0 * PI - vals[vals.len() - 1], vals.len() - 1);
    for k in 0..vals.len() - 1 {
        let g = vals[k + 1] - vals[k];
        if g > best.0 {
            best = (g, k);
        }
    }
    if best.0 <= 2.0 * pad {
        return (0.0, 2.0 * PI);
    }
    // interval runs from the value after the gap to the value before it
    let start = vals[(best.1 + 1) % vals.len()];
    let mut end = vals[best.1];
    if end < start {
        end += 2.0 * PI;
    }
    (start - pad, end + pad)
}

/// Exact test: p0, αp0, βp0 linearly dependent.
fn dependent_triple(d: &PartialDomain, i: usize, j: usize) -> bool {
    let (a, b, c) = (&d.center_f, &d.elements[i].point, &d.elements[j].point);
    let fm = Mat3::from_rows([a.v, b.v, c.v]);
    let scale = a.norm_inf() * b.norm_inf() * c.norm_inf();
    if fm.det().norm() > 1e-8 * scale {
        return false;
    }
    let m =
        Mat3::from_rows([d.center.v.clone(), d.elements[i].exact_point.v.clone(), d.elements[j].exact_point.v.clone()]);
    m.det().is_zero()
}

/// Functionals of one sampling pass, nearest orbit points first.
struct PassContext {
    funcs: Vec<[C; 3]>,
    order: Vec<usize>,
}

impl PassContext {
    /// `reach` bounds cosh² d(p0, γp0) for elements that can meet F_W.
    fn new(d: &PartialDomain, reach: Option<f64>) -> Self {
        let funcs = d.row_functionals();
        let mut order: Vec<usize> =
            (0..d.len()).filter(|&k| reach.map_or(true, |r| d.elements[k].cosh2 <= r)).collect();
        order.sort_by(|&a, &b| d.elements[a].cosh2.total_cmp(&d.elements[b].cosh2));
        PassContext { funcs, order }
    }

    fn others(&self, i: usize, j: usize) -> Vec<&[C; 3]> {
        self.order.iter().filter(|&&k| k != i && k != j).map(|&k| &self.funcs[k]).collect()
    }
}

/// Samples the face of F_W on the Giraud disk of (α, β) = (W[i], W[j]).
pub fn giraud_sample(d: &PartialDomain, i: usize, j: usize, limits: &Limits) -> Result<FaceSample, DirichletError> {
    giraud_sample_with(d, &PassContext::new(d, None), i, j, limits)
}

fn giraud_sample_with(
    d: &PartialDomain,
    ctx: &PassContext,
    i: usize,
    j: usize,
    limits: &Limits,
) -> Result<FaceSample, DirichletError> {
    if i == j {
        return Err(DirichletError::DegenerateTriple);
    }
    if dependent_triple(d, i, j) {
        return complex_sample(d, ctx, i, j, limits);
    }
    let n = limits.grid;
    let f0 = d.center_functional();
    let q = Mat3::from_rows([f0, ctx.funcs[i], ctx.funcs[j]]);
    let qi = q.inverse();
    // ⟨x,x⟩ = y* G y with x = Q⁻¹y
    let g = qi.conj_transpose().mul(&d.form.matrix).mul(&qi);
    let neg = |t1: f64, t2: f64| {
        let y = [C::new(1.0, 0.0), C::from_polar(1.0, t1), C::from_polar(1.0, t2)];
        let mut s = C::new(0.0, 0.0);
        for a in 0..3 {
            for b in 0..3 {
                s += y[a].conj() * g.m[a][b] * y[b];
            }
        }
        s.re < 0.0
    };
    let coarse = 96;
    let step = 2.0 * PI / coarse as f64;
    let mut t1s = Vec::new();
    let mut t2s = Vec::new();
    for a in 0..coarse {
        for b in 0..coarse {
            let (t1, t2) = (a as f64 * step, b as f64 * step);
            if neg(t1, t2) {
                t1s.push(t1);
                t2s.push(t2);
            }
        }
    }
    let mut out = FaceSample::empty(d, i, j, n);
    if t1s.is_empty() {
        return Ok(out);
    }
    let b1 = largest_gap_interval(t1s, step);
    let b2 = largest_gap_interval(t2s, step);
    out.chart = Chart::Giraud { theta1: b1, theta2: b2 };
    let others = ctx.others(i, j);
    let mut filter = Filter::new(others, limits.tol);
    for r in 0..n {
        let t1 = b1.0 + (r as f64 + 0.5) * (b1.1 - b1.0) / n as f64;
        for c in 0..n {
            let t2 = b2.0 + (c as f64 + 0.5) * (b2.1 - b2.0) / n as f64;
            if !neg(t1, t2) {
                continue;
            }
            let y = [C::new(1.0, 0.0), C::from_polar(1.0, t1), C::from_polar(1.0, t2)];
            let x = qi.mul_vec(&Vec3 { v: y });
            if filter.accepts(&x.v) {
                out.hits.push((r as u32, c as u32));
                out.points.push(x);
            }
        }
    }
    out.verdict = if row_column_rule(&out.hits) { FaceVerdict::NonEmptyGeneric } else { FaceVerdict::Empty };
    Ok(out)
}

/// Face on the complex geodesic through the circumcenter of three
/// orbit points lying in one complex line.
fn complex_sample(
    d: &PartialDomain,
    ctx: &PassContext,
    i: usize,
    j: usize,
    limits: &Limits,
) -> Result<FaceSample, DirichletError> {
    let h = &d.form;
    let n = limits.grid;
    let mut out = FaceSample::empty(d, i, j, n);
    let q0 = d.center_f.clone();
    let scale = |e: &Element| {
        let qn = ip(h, &e.point, &e.point).re;
        e.point.scale(&C::new((d.center_norm / qn).sqrt(), 0.0))
    };
    let q1 = scale(&d.elements[i]);
    let q2 = scale(&d.elements[j]);
    if q1.cross(&q2).norm_inf() < 1e-12 * q1.norm_inf() * q2.norm_inf() {
        return Err(DirichletError::DegenerateTriple);
    }
    // q2 = λ0 q0 + λ1 q1, solved from the Gram matrix
    let g00 = ip(h, &q0, &q0);
    let g01 = ip(h, &q1, &q0);
    let g10 = ip(h, &q0, &q1);
    let g11 = ip(h, &q1, &q1);
    let r0 = ip(h, &q2, &q0);
    let r1 = ip(h, &q2, &q1);
    // ⟨q2, q_k⟩ = λ0⟨q0,q_k⟩ + λ1⟨q1,q_k⟩
    let det = g00 * g11 - g10 * g01;
    let l0 = (r0 * g11 - r1 * g01) / det;
    let l1 = (g00 * r1 - g10 * r0) / det;
    // |λ̄0 + λ̄1 e^{iθ}| = 1
    let (a, b) = (l0.conj(), l1.conj());
    let k = (1.0 - a.norm_sqr() - b.norm_sqr()) / 2.0;
    let ab = a.conj() * b;
    let rho = ab.norm();
    if rho == 0.0 || (k / rho).abs() > 1.0 {
        return Ok(out);
    }
    let psi = ab.arg();
    let base = (k / rho).acos();
    let mut center = None;
    for theta in [base - psi, -base - psi] {
        // c = x q0 + y q1 with ⟨c,q0⟩ = 1, ⟨c,q1⟩ = e^{iθ}
        let e = C::from_polar(1.0, theta);
        let m00 = g00;
        let m01 = g01;
        let m10 = g10;
        let m11 = g11;
        let dd = m00 * m11 - m01 * m10;
        let x = (m11 - m01 * e) / dd;
        let y = (m00 * e - m10) / dd;
        let c = q0.scale(&x).add(&q1.scale(&y));
        if ip(h, &c, &c).re < 0.0 {
            center = Some(c);
            break;
        }
    }
    let Some(c) = center else { return Ok(out) };
    // polar of span(q0, q1)
    let w = q0.conj().cross(&q1.conj());
    let normal = d.form.matrix.inverse().mul_vec(&w);
    let nn = ip(h, &normal, &normal).re;
    let cc = ip(h, &c, &c).re;
    if nn <= 0.0 {
        return Ok(out);
    }
    let radius = (-cc / nn).sqrt();
    // vector in span(q0,q1) orthogonal to c
    let e_vec = {
        let t = q1.sub(&c.scale(&(ip(h, &q1, &c) / cc)));
        t.normalized()
    };
    out.chart = Chart::ComplexDisk { radius };
    out.ridge = Some(ComplexRidge { center: c.clone(), normal: normal.clone(), polar: e_vec });
    let f0 = d.center_functional();
    let others = ctx.others(i, j);
    let mut filter = Filter::new(others, limits.tol);
    for r in 0..n {
        let u = -1.0 + (r as f64 + 0.5) * 2.0 / n as f64;
        for col in 0..n {
            let v = -1.0 + (col as f64 + 0.5) * 2.0 / n as f64;
            if u * u + v * v >= 1.0 {
                continue;
            }
            let t = C::new(u, v) * radius;
            let x = c.add(&normal.scale(&t));
            let s = dot(&f0, &x.v);
            let y = [x.v[0] / s, x.v[1] / s, x.v[2] / s];
            if filter.accepts(&y) {
                out.hits.push((r as u32, col as u32));
                out.points.push(x);
            }
        }
    }
    out.verdict = if row_column_rule(&out.hits) { FaceVerdict::InComplexGeodesic } else { FaceVerdict::Empty };
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Behaviour {
    A,
    B,
    C,
}

/// Cached face data; empty faces stay empty as W grows.
#[derive(Default)]
struct FaceCache {
    empty: HashSet<(usize, usize)>,
    nonempty: HashMap<(usize, usize), (FaceSample, usize)>,
}

pub struct ProcedureOutcome<'g> {
    pub behaviour: Behaviour,
    pub steps: usize,
    pub domain: PartialDomain<'g>,
    /// Non-empty faces from the last sampling pass.
    pub faces: Vec<FaceSample>,
    pub cap: Option<String>,
    pub words_per_step: Vec<usize>,
    /// Bound on d(p0, x) over F_W from the last sampling pass.
    pub radius: Option<f64>,
}

impl<'g> ProcedureOutcome<'g> {
    pub fn generic_faces(&self) -> impl Iterator<Item = &FaceSample> {
        self.faces.iter().filter(|f| f.verdict == FaceVerdict::NonEmptyGeneric)
    }

    pub fn complex_faces(&self) -> impl Iterator<Item = &FaceSample> {
        self.faces.iter().filter(|f| f.verdict == FaceVerdict::InComplexGeodesic)
    }

    /// Indices of elements bounding a non-empty 2-face.
    pub fn facet_indices(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.faces.iter().flat_map(|f| [f.pair.0, f.pair.1]).collect();
        s.sort();
        s.dedup();
        s
    }

    pub fn facets(&self) -> Vec<Word> {
        self.facet_indices().into_iter().map(|i| self.domain.elements[i].word.clone()).collect()
    }
}

/// Canonical representative of a pair under stabiliser conjugation.
fn stab_permutations(d: &PartialDomain) -> Vec<Vec<Option<usize>>> {
    let mut perms = Vec::new();
    for (_, s) in &d.stabiliser {
        let sf = s.to_c64();
        let perm = d
            .elements
            .iter()
            .map(|e| {
                let p = sf.mul_vec(&e.point);
                find_point(d, &p)
            })
            .collect();
        perms.push(perm);
    }
    perms
}

fn find_point(d: &PartialDomain, p: &CVec) -> Option<usize> {
    let c2 = cosh2(&d.form, p, &d.center_f);
    let key = dist_key(c2);
    for k in key - 2..=key + 2 {
        if let Some(list) = d.index.get(&k) {
            for &i in list {
                let e = &d.elements[i];
                let cr = e.point.cross(p);
                if cr.norm_inf() <= 1e-7 * e.point.norm_inf() * p.norm_inf() {
                    return Some(i);
                }
            }
        }
    }
    None
}

/// Samples all pairs of W, reusing cached results. With `radius` (an upper
/// bound for d(p0, x) over F_W), pairs that cannot meet inside that ball are
/// skipped.
fn sample_all(d: &PartialDomain, cache: &mut FaceCache, limits: &Limits, radius: Option<f64>) -> Vec<FaceSample> {
    let n = d.len();
    let reach = radius.map(|r| (2.0 * r).cosh().powi(2));
    let ctx = PassContext::new(d, reach);
    let perms = stab_permutations(d);
    let canonical = |i: usize, j: usize| -> (usize, usize) {
        let mut best = (i.min(j), i.max(j));
        for p in &perms {
            if let (Some(x), Some(y)) = (p[i], p[j]) {
                best = best.min((x.min(y), x.max(y)));
            }
        }
        best
    };
    let h = &d.form;
    let norms: Vec<f64> = d.elements.iter().map(|e| ip(h, &e.point, &e.point).re).collect();
    let candidates: Vec<usize> = {
        let mut c = ctx.order.clone();
        c.sort();
        c
    };
    let mut results: HashMap<(usize, usize), FaceSample> = HashMap::new();
    let mut out = Vec::new();
    for (a, &i) in candidates.iter().enumerate() {
        for &j in &candidates[a + 1..] {
            if let Some(r) = reach {
                let (p, q) = (&d.elements[i].point, &d.elements[j].point);
                if ip(h, p, q).norm_sqr() / (norms[i] * norms[j]) > r {
                    continue;
                }
            }
            let key = canonical(i, j);
            if cache.empty.contains(&key) {
                continue;
            }
            if key != (i, j) {
                continue;
            }
            let sample = if let Some((old, checked)) = cache.nonempty.get(&key) {
                refilter(d, &ctx, old, *checked, limits)
            } else {
                match giraud_sample_with(d, &ctx, i, j, limits) {
                    Ok(s) => s,
                    Err(_) => continue,
                }
            };
            if sample.is_nonempty() {
                cache.nonempty.insert(key, (sample.clone(), n));
                results.insert(key, sample);
            } else {
                cache.nonempty.remove(&key);
                cache.empty.insert(key);
            }
        }
    }
    // images of canonical faces under the stabiliser
    let stab_f: Vec<CMat> = d.stabiliser.iter().map(|(_, s)| s.to_c64()).collect();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut keys: Vec<&(usize, usize)> = results.keys().collect();
    keys.sort();
    for key in keys {
        let f = &results[key];
        let mut stack = vec![(key.0, key.1, f.clone())];
        while let Some((a, b, s)) = stack.pop() {
            if !seen.insert((a, b)) {
                continue;
            }
            for (k, p) in perms.iter().enumerate() {
                if let (Some(x), Some(y)) = (p[a], p[b]) {
                    let mut img = s.clone();
                    img.pair = (x, y);
                    img.alpha = d.elements[x].word.clone();
                    img.beta = d.elements[y].word.clone();
                    img.points = s.points.iter().map(|v| stab_f[k].mul_vec(v)).collect();
                    if let Some(r) = &s.ridge {
                        img.ridge = Some(ComplexRidge {
                            center: stab_f[k].mul_vec(&r.center),
                            normal: stab_f[k].mul_vec(&r.normal),
                            polar: stab_f[k].mul_vec(&r.polar),
                        });
                    }
                    stack.push((x, y, img));
                }
            }
            out.push(s);
        }
    }
    out.sort_by_key(|f| (f.pair.0.min(f.pair.1), f.pair.0.max(f.pair.1)));
    out
}

/// Re-tests cached hits against elements added since the last pass.
fn refilter(d: &PartialDomain, ctx: &PassContext, old: &FaceSample, checked: usize, limits: &Limits) -> FaceSample {
    let f0 = d.center_functional();
    let (i, j) = old.pair;
    let fresh: Vec<&[C; 3]> =
        ctx.order.iter().filter(|&&k| k >= checked && k != i && k != j).map(|&k| &ctx.funcs[k]).collect();
    let mut filter = Filter::new(fresh, limits.tol);
    let mut out = old.clone();
    out.hits.clear();
    out.points.clear();
    for (h, x) in old.hits.iter().zip(old.points.iter()) {
        let s = dot(&f0, &x.v);
        let y = [x.v[0] / s, x.v[1] / s, x.v[2] / s];
        if filter.accepts(&y) {
            out.hits.push(*h);
            out.points.push(x.clone());
        }
    }
    let keep = row_column_rule(&out.hits);
    if !keep {
        out.verdict = FaceVerdict::Empty;
    }
    out
}

/// W₀ = {R1±, R2±, R3±}.
pub fn initial_words() -> Vec<Word> {
    [Gen::R1, Gen::R2, Gen::R3]
        .iter()
        .flat_map(|&g| [Letter { gen: g, inv: false }, Letter { gen: g, inv: true }])
        .map(|l| Word::from_letters([l]))
        .collect()
}

/// One application of G: adds α⁻¹β for every pair with a generic face.
pub fn g_step(d: &mut PartialDomain, faces: &[FaceSample], max_words: usize) -> usize {
    let mut added = 0;
    for f in faces.iter().filter(|f| f.verdict == FaceVerdict::NonEmptyGeneric) {
        let (i, j) = f.pair;
        let (a, b) = (&d.elements[i], &d.elements[j]);
        let w = a.word.inverse().concat(&b.word);
        let m = a.exact.adjugate().mul(&b.exact);
        added += d.insert_closed(w, m, max_words);
        if d.len() >= max_words {
            break;
        }
    }
    added
}

/// Iterates G until W is closed or a limit is hit.
pub fn g_procedure<'g>(
    group: &'g TriangleGroup,
    limits: &Limits,
    initial: Option<Vec<Word>>,
    center: Option<XVec>,
) -> Result<ProcedureOutcome<'g>, DirichletError> {
    g_procedure_bounded(group, limits, initial, center, None)
}

/// As [`g_procedure`], with a known bound on d(p0, x) over F_W for the
/// starting set (any bound for a subset of W is valid, since F_W shrinks as
/// W grows).
pub fn g_procedure_bounded<'g>(
    group: &'g TriangleGroup,
    limits: &Limits,
    initial: Option<Vec<Word>>,
    center: Option<XVec>,
    radius: Option<f64>,
) -> Result<ProcedureOutcome<'g>, DirichletError> {
    let mut d = PartialDomain::new(group, center)?;
    for w in initial.unwrap_or_else(initial_words) {
        let m = group.word_matrix(&w);
        d.insert_closed(w, m, limits.max_words);
    }
    let mut cache = FaceCache::default();
    let mut steps = 0;
    let mut words_per_step = vec![d.len()];
    let mut radius = radius;
    let outcome = |behaviour, steps, domain, faces, cap, words_per_step, radius| ProcedureOutcome {
        behaviour,
        steps,
        domain,
        faces,
        cap,
        words_per_step,
        radius,
    };
    loop {
        if d.len() >= limits.max_words {
            let cap = Some(format!("max_words = {}", limits.max_words));
            return Ok(outcome(Behaviour::C, steps, d, Vec::new(), cap, words_per_step, radius));
        }
        let faces = sample_all(&d, &mut cache, limits, radius);
        if let Some(r) = face_radius(&d, &faces) {
            radius = Some(radius.map_or(r, |old| old.min(r)));
        }
        log::debug!("G-step {steps}: {} words, {} faces, radius {:?}", d.len(), faces.len(), radius);
        let added = g_step(&mut d, &faces, limits.max_words);
        steps += 1;
        words_per_step.push(d.len());
        if added == 0 {
            let behaviour = if faces.is_empty() { Behaviour::B } else { Behaviour::A };
            return Ok(outcome(behaviour, steps, d, faces, None, words_per_step, radius));
        }
        if d.len() >= limits.max_words || steps >= limits.max_steps {
            let cap = if d.len() >= limits.max_words {
                format!("max_words = {}", limits.max_words)
            } else {
                format!("max_steps = {}", limits.max_steps)
            };
            return Ok(outcome(Behaviour::C, steps, d, faces, Some(cap), words_per_step, radius));
        }
    }
}

/// Largest distance from p0 among sampled face points, padded by a margin
/// covering the grid spacing. None when some sample lies far out, which is
/// what an unbounded F_W looks like on a finite grid.
fn face_radius(d: &PartialDomain, faces: &[FaceSample]) -> Option<f64> {
    const FAR_COSH2: f64 = 1e3;
    let mut max_c2: f64 = 1.0;
    for x in faces.iter().flat_map(|f| f.points.iter()) {
        let c2 = cosh2(&d.form, x, &d.center_f);
        if !(c2 < FAR_COSH2) {
            return None;
        }
        max_c2 = max_c2.max(c2);
    }
    if faces.is_empty() {
        return None;
    }
    Some(max_c2.sqrt().acosh() * 1.05 + 0.1)
}

/// Pairing status of one 3-face.
#[derive(Debug, Clone, Serialize)]
pub struct PairingEntry {
    pub face: Word,
    /// The map that sends the face into F_W: "γ⁻¹", "Jγ⁻¹" or "J⁻¹γ⁻¹".
    pub map: Option<String>,
    pub matched: bool,
    pub target_is_facet: bool,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairingReport {
    pub entries: Vec<PairingEntry>,
    pub unmatched: Vec<Word>,
}

/// For every facet γ, checks that γ⁻¹ (possibly followed by J^{±1}) maps the
/// sampled ridge points of the face back into F_W.
pub fn side_pairing_check(o: &ProcedureOutcome) -> Result<PairingReport, DirichletError> {
    if o.behaviour != Behaviour::A {
        return Err(DirichletError::NotBehaviourA);
    }
    side_pairing_on(o, &o.faces)
}

/// Same check restricted to a given face list.
pub fn side_pairing_on(o: &ProcedureOutcome, faces: &[FaceSample]) -> Result<PairingReport, DirichletError> {
    let d = &o.domain;
    let facets: HashSet<usize> = faces.iter().flat_map(|f| [f.pair.0, f.pair.1]).collect();
    let mut facet_list: Vec<usize> = facets.iter().copied().collect();
    facet_list.sort();
    let j = d.group.j.to_c64();
    let ji = d.group.j_inv.to_c64();
    let mut entries = Vec::new();
    let mut unmatched = Vec::new();
    for &g in &facet_list {
        let e = &d.elements[g];
        let pts: Vec<&CVec> = faces
            .iter()
            .filter(|f| f.pair.0 == g || f.pair.1 == g)
            .flat_map(|f| f.points.iter().step_by((f.points.len() / 40).max(1)))
            .collect();
        let inv = e.exact.adjugate().to_c64();
        let options = [("γ⁻¹", inv.clone()), ("Jγ⁻¹", j.mul(&inv)), ("J⁻¹γ⁻¹", ji.mul(&inv))];
        let mut found = None;
        for (name, m) in options.iter() {
            let ok = pts.iter().all(|x| {
                let y = m.mul_vec(x);
                in_domain_tol(d, &y, 1e-7)
            });
            if ok && !pts.is_empty() {
                found = Some(*name);
                break;
            }
        }
        let target = find_point(d, &inv.mul_vec(&d.center_f)).map_or(false, |k| facets.contains(&k));
        let matched = found.is_some() && target;
        if !matched {
            unmatched.push(e.word.clone());
        }
        entries.push(PairingEntry {
            face: e.word.clone(),
            map: found.map(|s| s.to_string()),
            matched,
            target_is_facet: target,
            samples: pts.len(),
        });
    }
    Ok(PairingReport { entries, unmatched })
}

fn in_domain_tol(d: &PartialDomain, x: &CVec, tol: f64) -> bool {
    let a = ip(&d.form, x, &d.center_f).norm_sqr() / d.center_norm.abs();
    d.elements.iter().all(|e| {
        let qn = ip(&d.form, &e.point, &e.point).re.abs();
        ip(&d.form, x, &e.point).norm_sqr() / qn >= a * (1.0 - tol)
    })
}

/// One cycle of complex ridges.
#[derive(Debug, Clone, Serialize)]
pub struct CycleData {
    pub ridge: (Word, Word),
    pub cycle_word: Word,
    pub length: usize,
    /// The walk returned to its starting ridge.
    pub closed: bool,
    /// min(θ, 2π − θ) of the cycle transformation.
    pub rotation_angle: Option<Angle>,
    pub total_interior_angle: f64,
    pub integral: bool,
}

fn same_point(a: &CVec, b: &CVec) -> bool {
    a.cross(b).norm_inf() <= 1e-7 * a.norm_inf() * b.norm_inf()
}

/// A complex ridge of F_W, possibly detected through several face pairs.
#[derive(Debug, Clone)]
pub struct GeoRidge {
    pub center: CVec,
    pub normal: CVec,
    /// Elements whose bisectors contain the ridge.
    pub incident: Vec<usize>,
    /// The two facets adjacent to the ridge on either side of p0.
    pub bounding: (usize, usize),
    /// Angle of F at the ridge, measured in the orthogonal complex line.
    pub interior: f64,
}

/// Direction of u seen from c inside the complex line through c and e.
fn ridge_direction(h: &HermForm<C>, c: &CVec, e: &CVec, u: &CVec) -> f64 {
    (ip(h, u, e) / ip(h, u, c)).arg()
}

/// Groups complex faces by their geometric ridge.
pub fn complex_ridges(o: &ProcedureOutcome) -> Vec<GeoRidge> {
    let d = &o.domain;
    let h = &d.form;
    let mut groups: Vec<(ComplexRidge, Vec<usize>)> = Vec::new();
    for f in o.complex_faces() {
        let Some(r) = &f.ridge else { continue };
        match groups.iter_mut().find(|(g, _)| same_point(&g.center, &r.center) && same_point(&g.normal, &r.normal)) {
            Some((_, inc)) => inc.extend([f.pair.0, f.pair.1]),
            None => groups.push((r.clone(), vec![f.pair.0, f.pair.1])),
        }
    }
    groups
        .into_iter()
        .map(|(r, mut inc)| {
            inc.sort();
            inc.dedup();
            let base = ridge_direction(h, &r.center, &r.polar, &d.center_f);
            let offs: Vec<(f64, usize)> = inc
                .iter()
                .map(|&k| {
                    ((ridge_direction(h, &r.center, &r.polar, &d.elements[k].point) - base).rem_euclid(2.0 * PI), k)
                })
                .collect();
            let left = offs.iter().copied().min_by(|a, b| a.0.total_cmp(&b.0)).expect("two incident elements");
            let right = offs.iter().copied().max_by(|a, b| a.0.total_cmp(&b.0)).expect("two incident elements");
            let interior = (left.0 + (2.0 * PI - right.0)) / 2.0;
            GeoRidge { center: r.center, normal: r.normal, incident: inc, bounding: (left.1, right.1), interior }
        })
        .collect()
}

/// Cycle transformations at complex ridges and their rotation angles.
///
/// Ridges are matched geometrically, since a ridge in a mirror lies on the
/// bisectors of every power of the reflection.
pub fn cycle_angles(o: &ProcedureOutcome) -> Result<Vec<CycleData>, DirichletError> {
    if o.behaviour != Behaviour::A {
        return Err(DirichletError::NotBehaviourA);
    }
    let d = &o.domain;
    let g = d.group;
    let ridges = complex_ridges(o);
    let find = |c: &CVec, n: &CVec| ridges.iter().position(|r| same_point(&r.center, c) && same_point(&r.normal, n));
    let mut done = vec![false; ridges.len()];
    let mut out = Vec::new();
    for start in 0..ridges.len() {
        if done[start] {
            continue;
        }
        let start_face = ridges[start].bounding.0;
        let (mut k, mut a_idx) = (start, start_face);
        let mut t_word = Word::identity();
        let mut t_mat = g.identity();
        let mut total = 0.0;
        let mut len = 0;
        let mut closed = false;
        while len <= 60 {
            let r = &ridges[k];
            done[k] = true;
            total += r.interior;
            let e = &d.elements[a_idx];
            let ainv = e.exact.adjugate();
            let af = ainv.to_c64();
            t_mat = ainv.mul(&t_mat);
            t_word = e.word.inverse().concat(&t_word);
            len += 1;
            let Some(k2) = find(&af.mul_vec(&r.center), &af.mul_vec(&r.normal)) else { break };
            let entered = af.mul_vec(&d.center_f);
            let (x, y) = ridges[k2].bounding;
            let next = if same_point(&d.elements[x].point, &entered) {
                y
            } else if same_point(&d.elements[y].point, &entered) {
                x
            } else {
                break;
            };
            if k2 == start && next == start_face {
                closed = true;
                break;
            }
            k = k2;
            a_idx = next;
        }
        let t_word = t_word.normal_form(g.p);
        let angle = if !closed {
            None
        } else {
            match classify_unchecked(&t_mat, &g.form).map(|c| c.kind) {
                Ok(IsometryKind::Identity) => None,
                _ => reflection_angle(&t_mat, &g.form).ok(),
            }
        };
        let angle = angle.map(|a| match a.pi_ratio {
            Some(q) if q > Rational64::from_integer(1) => Angle::from_pi_ratio(Rational64::from_integer(2) - q),
            Some(_) => a,
            None => Angle { radians: a.radians.min(2.0 * PI - a.radians), pi_ratio: None },
        });
        let integral = closed && angle.map_or(true, |a| a.divides_two_pi());
        let (x, y) = ridges[start].bounding;
        out.push(CycleData {
            ridge: (d.elements[x].word.clone(), d.elements[y].word.clone()),
            cycle_word: t_word,
            length: len,
            closed,
            rotation_angle: angle,
            total_interior_angle: total,
            integral,
        });
    }
    Ok(out)
}

/// New start set W ∪ hWh⁻¹ with h = g^k.
pub fn refine(d: &PartialDomain, g: &Word, k: i64) -> Vec<Word> {
    let h = g.pow(k);
    let hi = h.inverse();
    let mut out = d.words();
    if h.is_empty() {
        return out;
    }
    let extra: Vec<Word> = out.iter().map(|w| h.concat(w).concat(&hi)).collect();
    out.extend(extra);
    out
}

/// Power k with g^k rotating by 2π/n, from the exact cycle angle.
pub fn refinement_power(angle: &Angle) -> Result<i64, DirichletError> {
    let q = angle.pi_ratio.ok_or(DirichletError::IrrationalAngle)?;
    minimal_power_angle(q).map(|(_, k)| k).map_err(|_| DirichletError::IrrationalAngle)
}

/// Equivalence classes of facets up to inverses and conjugation by J.
pub fn facet_classes(o: &ProcedureOutcome) -> Vec<Vec<Word>> {
    let d = &o.domain;
    let j = d.group.j.to_c64();
    let ji = d.group.j_inv.to_c64();
    let idx = o.facet_indices();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &i in &idx {
        let p = &d.elements[i].point;
        let related = |k: usize| {
            let e = &d.elements[k];
            let inv_pt = e.exact.adjugate().to_c64().mul_vec(&d.center_f);
            [
                e.point.clone(),
                j.mul_vec(&e.point),
                ji.mul_vec(&e.point),
                inv_pt.clone(),
                j.mul_vec(&inv_pt),
                ji.mul_vec(&inv_pt),
            ]
            .iter()
            .any(|x| same_point(x, p))
        };
        match classes.iter_mut().find(|c| related(c[0])) {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    classes.into_iter().map(|c| c.into_iter().map(|i| d.elements[i].word.clone()).collect()).collect()
}

/// Facet classes merged when their orbit points are equally far from the
/// center. Sorted by that distance; each entry is (cosh² d(p0, γp0), classes).
pub fn isometry_classes(o: &ProcedureOutcome) -> Vec<(f64, Vec<Vec<Word>>)> {
    let d = &o.domain;
    let dist = |w: &Word| {
        let p = d.group.word_matrix(w).to_c64().mul_vec(&d.center_f);
        cosh2(&d.form, &p, &d.center_f)
    };
    let mut out: Vec<(f64, Vec<Vec<Word>>)> = Vec::new();
    for class in facet_classes(o) {
        let c2 = dist(&class[0]);
        match out.iter_mut().find(|(x, _)| (x - c2).abs() <= 1e-9 * c2) {
            Some((_, v)) => v.push(class),
            None => out.push((c2, vec![class])),
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Whether a word's orbit point falls in the class of any facet, up to
/// inverses and conjugation by J.
pub fn word_matches_class(o: &ProcedureOutcome, class: &[Word], w: &Word) -> bool {
    let d = &o.domain;
    let g = d.group;
    let m = g.word_matrix(w);
    let j = g.j.to_c64();
    let ji = g.j_inv.to_c64();
    let p = m.to_c64().mul_vec(&d.center_f);
    let pi = m.adjugate().to_c64().mul_vec(&d.center_f);
    let cands = [p.clone(), j.mul_vec(&p), ji.mul_vec(&p), pi.clone(), j.mul_vec(&pi), ji.mul_vec(&pi)];
    class.iter().any(|cw| {
        let q = g.word_matrix(cw).to_c64().mul_vec(&d.center_f);
        cands.iter().any(|x| same_point(x, &q))
    })
}

/// SVG picture of the hit cells of one face.
pub fn face_svg(f: &FaceSample) -> String {
    let n = f.grid;
    let mut s = String::new();
    let _ =
        writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {n} {n}\" width=\"400\" height=\"400\">");
    let _ = writeln!(s, "<title>{} / {}</title>", f.alpha, f.beta);
    let _ = writeln!(s, "<rect width=\"{n}\" height=\"{n}\" fill=\"white\" stroke=\"black\"/>");
    for (r, c) in &f.hits {
        let _ = writeln!(s, "<rect x=\"{c}\" y=\"{}\" width=\"1\" height=\"1\" fill=\"black\"/>", n as u32 - 1 - r);
    }
    s.push_str("</svg>\n");
    s
}

/// Hit cells as CSV rows `row,col`.
pub fn face_csv(f: &FaceSample) -> String {
    let mut s = String::from("row,col\n");
    for (r, c) in &f.hits {
        let _ = writeln!(s, "{r},{c}");
    }
    s
}

/// All 2-faces on the bisector of element `idx`, one panel per face.
pub fn facet_svg(o: &ProcedureOutcome, idx: usize) -> String {
    let faces: Vec<&FaceSample> = o.faces.iter().filter(|f| f.pair.0 == idx || f.pair.1 == idx).collect();
    let n = faces.first().map_or(1, |f| f.grid);
    let cols = (faces.len() as f64).sqrt().ceil().max(1.0) as usize;
    let rows = faces.len().div_ceil(cols).max(1);
    let pad = n / 10;
    let (w, h) = (cols * (n + pad), rows * (n + pad));
    let mut s = String::new();
    let _ = writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\">");
    let _ = writeln!(s, "<title>{}</title>", o.domain.elements[idx].word);
    for (k, f) in faces.iter().enumerate() {
        let (x, y) = ((k % cols) * (n + pad), (k / cols) * (n + pad));
        let _ = writeln!(s, "<g transform=\"translate({x},{y})\">");
        let _ = writeln!(s, "<rect width=\"{n}\" height=\"{n}\" fill=\"white\" stroke=\"black\"/>");
        let other = if f.pair.0 == idx { &f.beta } else { &f.alpha };
        let _ = writeln!(s, "<text x=\"2\" y=\"{}\" font-size=\"{}\">{other}</text>", pad / 2 + 2, pad.max(4));
        for (r, c) in &f.hits {
            let _ = writeln!(s, "<rect x=\"{c}\" y=\"{}\" width=\"1\" height=\"1\"/>", n as u32 - 1 - r);
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

/// Hit cells of every 2-face on the bisector of element `idx`.
pub fn facet_csv(o: &ProcedureOutcome, idx: usize) -> String {
    let mut s = String::from("alpha,beta,row,col\n");
    for f in o.faces.iter().filter(|f| f.pair.0 == idx || f.pair.1 == idx) {
        for (r, c) in &f.hits {
            let _ = writeln!(s, "{},{},{r},{c}", f.alpha, f.beta);
        }
    }
    s
}

/// One conjectural cusp stabiliser.
#[derive(Debug, Clone, Serialize)]
pub struct CuspCandidate {
    pub p: u32,
    pub tau: SporadicId,
    pub generators: Vec<String>,
    pub relations: Vec<String>,
    pub designated: String,
}

/// The conjectural cusp list for the non-cocompact examples.
pub fn cusp_table() -> Vec<CuspCandidate> {
    let s1: SporadicId = "sigma1".parse().expect("literal");
    let s4b: SporadicId = "sigma4bar".parse().expect("literal");
    let s5: SporadicId = "sigma5".parse().expect("literal");
    let row = |p, tau, g: &[&str], r: &[&str], d: &str| CuspCandidate {
        p,
        tau,
        generators: g.iter().map(|s| s.to_string()).collect(),
        relations: r.iter().map(|s| s.to_string()).collect(),
        designated: d.to_string(),
    };
    vec![
        row(3, s1, &["1", "2"], &["1^3", "2^3", "(12)^3=(21)^3"], "(12)^3"),
        row(4, s1, &["1", "232'"], &["1^4", "(232')^4", "(1(232'))^2=((232')1)^2"], "(1(232'))^2"),
        row(6, s1, &["1", "2323'2'"], &["1^6", "(2323'2')^6", "1(2323'2')1=(2323'2')1(2323'2')"], "(1(2323'2'))^3"),
        row(6, s1, &["1", "3'2'323"], &["1^6", "(3'2'323)^6", "1(3'2'323)1=(3'2'323)1(3'2'323)"], "(1(3'2'323))^3"),
        row(4, s4b, &["1", "2"], &["1^4", "2^4", "(12)^2=(21)^2"], "(12)^2"),
        row(6, s4b, &["1", "232'"], &["1^6", "(232')^6", "1(232')1=(232')1(232')"], "(1(232'))^3"),
        row(
            3,
            s5,
            &["232'", "(1J)^5"],
            &["(232')^3", "(1J)^30", "((232')(1J)^-5)^2=((1J)^-5(232'))^2"],
            "((232')(1J)^-5)^2",
        ),
        row(4, s5, &["1", "2"], &["1^4", "2^4", "(12)^2=(21)^2"], "(12)^2"),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct CuspReport {
    pub candidate: CuspCandidate,
    pub relations_hold: Vec<(String, bool)>,
    pub designated_parabolic: bool,
    pub common_fixed_point: bool,
    pub failures: Vec<String>,
}

/// Null vector fixed by a parabolic element.
pub fn parabolic_fixed_vector(m: &XMat, h: &HermForm<CycNum>) -> Option<XVec> {
    let cls = classify_unchecked(m, h).ok()?;
    if !cls.is_parabolic() {
        return None;
    }
    let (lam, _) = crate::classify::repeated_root(m);
    let n = m.sub(&Mat3::scalar(&lam));
    let image = match n.rank() {
        1 => n,
        2 => {
            let nn = n.mul(&n);
            if nn.is_zero() {
                return None;
            }
            if nn.rank() == 1 {
                nn
            } else {
                // screw parabolic: kill the simple eigenvalue's direction
                let mu = &m.trace() - &lam.scale_int(2);
                n.mul(&m.sub(&Mat3::scalar(&mu)))
            }
        }
        _ => return None,
    };
    (0..3).map(|k| image.col(k)).find(|c| !c.is_zero())
}

/// Checks relations, parabolicity and a common fixed boundary point.
pub fn cusp_report(g: &TriangleGroup, candidates: &[CuspCandidate]) -> Vec<CuspReport> {
    candidates
        .iter()
        .map(|c| {
            let mut failures = Vec::new();
            let relations_hold: Vec<(String, bool)> = c
                .relations
                .iter()
                .map(|r| {
                    let ok = g.verify_relation_str(r).map(|x| x.holds()).unwrap_or(false);
                    if !ok {
                        failures.push(format!("relation {r}"));
                    }
                    (r.clone(), ok)
                })
                .collect();
            let (designated_parabolic, common_fixed_point) = match g.eval_str(&c.designated) {
                Ok(m) => match parabolic_fixed_vector(&m, &g.form) {
                    Some(v) => {
                        let all = c
                            .generators
                            .iter()
                            .all(|w| g.eval_str(w).map(|gm| gm.mul_vec(&v).cross(&v).is_zero()).unwrap_or(false));
                        (true, all)
                    }
                    None => (false, false),
                },
                Err(_) => (false, false),
            };
            if !designated_parabolic {
                failures.push(format!("{} not parabolic", c.designated));
            } else if !common_fixed_point {
                failures.push("generators do not share the fixed point".into());
            }
            CuspReport { candidate: c.clone(), relations_hold, designated_parabolic, common_fixed_point, failures }
        })
        .collect()
}

/// Relation check helper used by reports.
pub fn relation_holds(g: &TriangleGroup, rel: &str) -> bool {
    matches!(g.verify_relation_str(rel), Ok(RelationCheck::HoldsExactly { .. }))
}
