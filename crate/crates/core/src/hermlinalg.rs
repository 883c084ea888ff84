//! 3×3 matrices, vectors and Hermitian forms over exact or floating scalars.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_complex::Complex64;
use serde::Serialize;

use crate::cyclofield::CycNum;

/// Default tolerance for floating equality tests.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("an eigenvalue lies within tolerance of zero; rerun exactly")]
    DegenerateAtTolerance,
    #[error("vector is not negative for the form")]
    NotNegativeVector,
    #[error("vector is not positive for the form")]
    NotPositiveVector,
    #[error("repeated eigenvalue without a full eigenbasis")]
    RepeatedEigenvalueNoBasis,
}

/// Field operations shared by the exact and floating backends.
pub trait Scalar: Clone + Send + Sync + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> Complex64;
    fn is_zero(&self) -> bool;
    fn dot3(a: [&Self; 3], b: [&Self; 3]) -> Self {
        a[0].mul(b[0]).add(&a[1].mul(b[1])).add(&a[2].mul(b[2]))
    }
}

impl Scalar for CycNum {
    fn zero() -> Self {
        CycNum::zero()
    }
    fn one() -> Self {
        CycNum::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self.mul_ref(o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        CycNum::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        CycNum::to_c64(self)
    }
    fn is_zero(&self) -> bool {
        CycNum::is_zero(self)
    }
    fn dot3(a: [&Self; 3], b: [&Self; 3]) -> Self {
        CycNum::sum_of_products(&[(a[0], b[0]), (a[1], b[1]), (a[2], b[2])])
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn is_zero(&self) -> bool {
        self.norm() == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Vec3<T> {
    pub v: [T; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mat3<T> {
    pub m: [[T; 3]; 3],
}

pub type CMat = Mat3<Complex64>;
pub type CVec = Vec3<Complex64>;

impl<T: Scalar> Vec3<T> {
    pub fn new(a: T, b: T, c: T) -> Self {
        Vec3 { v: [a, b, c] }
    }

    pub fn scale(&self, s: &T) -> Self {
        Vec3 { v: [self.v[0].mul(s), self.v[1].mul(s), self.v[2].mul(s)] }
    }

    pub fn add(&self, o: &Self) -> Self {
        Vec3 { v: [self.v[0].add(&o.v[0]), self.v[1].add(&o.v[1]), self.v[2].add(&o.v[2])] }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Vec3 { v: [self.v[0].sub(&o.v[0]), self.v[1].sub(&o.v[1]), self.v[2].sub(&o.v[2])] }
    }

    /// Bilinear cross product; the result is annihilated by both inputs
    /// viewed as rows.
    pub fn cross(&self, o: &Self) -> Self {
        let a = &self.v;
        let b = &o.v;
        Vec3 {
            v: [
                a[1].mul(&b[2]).sub(&a[2].mul(&b[1])),
                a[2].mul(&b[0]).sub(&a[0].mul(&b[2])),
                a[0].mul(&b[1]).sub(&a[1].mul(&b[0])),
            ],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|x| x.is_zero())
    }

    pub fn to_c64(&self) -> CVec {
        Vec3 { v: [self.v[0].to_c64(), self.v[1].to_c64(), self.v[2].to_c64()] }
    }

    pub fn conj(&self) -> Self {
        Vec3 { v: [self.v[0].conj(), self.v[1].conj(), self.v[2].conj()] }
    }
}

impl<T: Scalar> Mat3<T> {
    pub fn from_rows(m: [[T; 3]; 3]) -> Self {
        Mat3 { m }
    }

    pub fn identity() -> Self {
        let z = T::zero;
        let o = T::one;
        Mat3 { m: [[o(), z(), z()], [z(), o(), z()], [z(), z(), o()]] }
    }

    pub fn scalar(s: &T) -> Self {
        let z = T::zero;
        Mat3 { m: [[s.clone(), z(), z()], [z(), s.clone(), z()], [z(), z(), s.clone()]] }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let m = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                T::dot3([&self.m[i][0], &self.m[i][1], &self.m[i][2]], [&o.m[0][j], &o.m[1][j], &o.m[2][j]])
            })
        });
        Mat3 { m }
    }

    pub fn mul_vec(&self, v: &Vec3<T>) -> Vec3<T> {
        Vec3 {
            v: std::array::from_fn(|i| {
                T::dot3([&self.m[i][0], &self.m[i][1], &self.m[i][2]], [&v.v[0], &v.v[1], &v.v[2]])
            }),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Mat3 { m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j].add(&o.m[i][j]))) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Mat3 { m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j].sub(&o.m[i][j]))) }
    }

    pub fn scale(&self, s: &T) -> Self {
        Mat3 { m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j].mul(s))) }
    }

    pub fn conj_transpose(&self) -> Self {
        Mat3 { m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[j][i].conj())) }
    }

    pub fn transpose(&self) -> Self {
        Mat3 { m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[j][i].clone())) }
    }

    pub fn conj(&self) -> Self {
        Mat3 { m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j].conj())) }
    }

    pub fn trace(&self) -> T {
        self.m[0][0].add(&self.m[1][1]).add(&self.m[2][2])
    }

    pub fn row(&self, i: usize) -> Vec3<T> {
        Vec3 { v: self.m[i].clone() }
    }

    pub fn col(&self, j: usize) -> Vec3<T> {
        Vec3 { v: [self.m[0][j].clone(), self.m[1][j].clone(), self.m[2][j].clone()] }
    }

    fn minor(&self, r: [usize; 2], c: [usize; 2]) -> T {
        self.m[r[0]][c[0]].mul(&self.m[r[1]][c[1]]).sub(&self.m[r[0]][c[1]].mul(&self.m[r[1]][c[0]]))
    }

    pub fn det(&self) -> T {
        let c0 = self.minor([1, 2], [1, 2]);
        let c1 = self.minor([1, 2], [0, 2]);
        let c2 = self.minor([1, 2], [0, 1]);
        self.m[0][0].mul(&c0).sub(&self.m[0][1].mul(&c1)).add(&self.m[0][2].mul(&c2))
    }

    /// Sum of the principal 2×2 minors (the middle coefficient of the
    /// characteristic polynomial up to sign).
    pub fn principal_minor_sum(&self) -> T {
        self.minor([0, 1], [0, 1]).add(&self.minor([0, 2], [0, 2])).add(&self.minor([1, 2], [1, 2]))
    }

    /// All nine 2×2 minors.
    pub fn minors2(&self) -> Vec<T> {
        let pairs = [[0, 1], [0, 2], [1, 2]];
        let mut out = Vec::with_capacity(9);
        for r in pairs {
            for c in pairs {
                out.push(self.minor(r, c));
            }
        }
        out
    }

    /// Transposed cofactor matrix; equals the inverse when det = 1.
    pub fn adjugate(&self) -> Self {
        let cof = |i: usize, j: usize| {
            let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
            let c: Vec<usize> = (0..3).filter(|&x| x != j).collect();
            let mi = self.minor([r[0], r[1]], [c[0], c[1]]);
            if (i + j) % 2 == 0 {
                mi
            } else {
                mi.neg()
            }
        };
        Mat3 { m: std::array::from_fn(|i| std::array::from_fn(|j| cof(j, i))) }
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }

    pub fn to_c64(&self) -> CMat {
        Mat3 { m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j].to_c64())) }
    }

    /// Rank computed with the backend's own zero test.
    pub fn rank(&self) -> usize {
        if self.is_zero() {
            0
        } else if self.minors2().iter().all(|x| x.is_zero()) {
            1
        } else if self.det().is_zero() {
            2
        } else {
            3
        }
    }

    /// A nonzero vector in the kernel of a rank-2 matrix (cross product of two
    /// independent rows).
    pub fn kernel_vector(&self) -> Option<Vec3<T>> {
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let v = self.row(a).cross(&self.row(b));
            if !v.is_zero() {
                return Some(v);
            }
        }
        None
    }
}

impl CMat {
    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, o: &CMat) -> f64 {
        self.sub(o).max_abs()
    }

    /// Inverse by the adjugate, valid for any invertible matrix.
    pub fn inverse(&self) -> CMat {
        let d = self.det();
        self.adjugate().scale(&(Complex64::new(1.0, 0.0) / d))
    }
}

impl CVec {
    pub fn norm_inf(&self) -> f64 {
        self.v.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Scales so the largest coordinate has modulus one and is real positive.
    pub fn normalized(&self) -> CVec {
        let k = (0..3).max_by(|&a, &b| self.v[a].norm().partial_cmp(&self.v[b].norm()).unwrap()).unwrap();
        let s = Complex64::new(1.0, 0.0) / self.v[k];
        self.scale(&s)
    }
}

/// A Hermitian form ⟨v, w⟩ = w* H v.
#[derive(Debug, Clone, Serialize)]
pub struct HermForm<T> {
    pub matrix: Mat3<T>,
}

impl<T: Scalar> HermForm<T> {
    pub fn new(matrix: Mat3<T>) -> Self {
        HermForm { matrix }
    }

    pub fn inner(&self, v: &Vec3<T>, w: &Vec3<T>) -> T {
        let hv = self.matrix.mul_vec(v);
        let wc = w.conj();
        T::dot3([&wc.v[0], &wc.v[1], &wc.v[2]], [&hv.v[0], &hv.v[1], &hv.v[2]])
    }

    pub fn to_c64(&self) -> HermForm<Complex64> {
        HermForm { matrix: self.matrix.to_c64() }
    }
}

pub fn inner<T: Scalar>(v: &Vec3<T>, w: &Vec3<T>, h: &HermForm<T>) -> T {
    h.inner(v, w)
}

/// Counts of positive, zero and negative eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub pos: usize,
    pub zero: usize,
    pub neg: usize,
}

impl Signature {
    pub fn hyperbolic() -> Signature {
        Signature { pos: 2, zero: 0, neg: 1 }
    }
    pub fn is_hyperbolic(&self) -> bool {
        *self == Signature::hyperbolic()
    }
    pub fn is_definite(&self) -> bool {
        self.zero == 0 && (self.pos == 0 || self.neg == 0)
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.pos, self.zero, self.neg)
    }
}

/// Exact signature via Descartes' rule of signs on the characteristic
/// polynomial, which is exact because a Hermitian matrix has real eigenvalues.
pub fn signature_exact(h: &HermForm<CycNum>) -> Signature {
    let m = &h.matrix;
    let c2 = (-&m.trace()).re();
    let c1 = m.principal_minor_sum().re();
    let c0 = (-&m.det()).re();
    let signs = [Ordering::Greater, c2.real_sign(), c1.real_sign(), c0.real_sign()];
    signature_from_charpoly_signs(&signs)
}

/// Signature from the signs of x³ + c2x² + c1x + c0, leading sign first.
pub fn signature_from_charpoly_signs(signs: &[Ordering; 4]) -> Signature {
    let mut zero = 0;
    let mut end = 4;
    while end > 1 && signs[end - 1] == Ordering::Equal {
        zero += 1;
        end -= 1;
    }
    let s = &signs[..end];
    let changes = |seq: &mut dyn Iterator<Item = Ordering>| {
        let nz: Vec<Ordering> = seq.filter(|&o| o != Ordering::Equal).collect();
        nz.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let pos = changes(&mut s.iter().copied());
    // Substituting x → −x flips the sign of odd-degree coefficients.
    let deg = end - 1;
    let neg = changes(&mut s.iter().enumerate().map(|(i, &o)| if (deg - i) % 2 == 1 { o.reverse() } else { o }));
    Signature { pos, zero, neg }
}

/// Real eigenvalues of a Hermitian 3×3 matrix, ascending.
pub fn hermitian_eigenvalues(h: &CMat) -> [f64; 3] {
    let a = -h.trace().re;
    let b = h.principal_minor_sum().re;
    let c = -h.det().re;
    // Trigonometric solution of x³ + ax² + bx + c with three real roots.
    let q = (a * a - 3.0 * b) / 9.0;
    let r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
    let mut roots = if q <= 0.0 {
        let x = -a / 3.0;
        [x, x, x]
    } else {
        let t = (r / q.powf(1.5)).clamp(-1.0, 1.0).acos();
        let s = -2.0 * q.sqrt();
        let tp = 2.0 * std::f64::consts::PI;
        [s * (t / 3.0).cos() - a / 3.0, s * ((t + tp) / 3.0).cos() - a / 3.0, s * ((t - tp) / 3.0).cos() - a / 3.0]
    };
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

/// Floating signature; fails when an eigenvalue is within `tol` of zero.
pub fn signature_float(h: &HermForm<Complex64>, tol: f64) -> Result<Signature, LinalgError> {
    let ev = hermitian_eigenvalues(&h.matrix);
    let scale = ev.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut s = Signature { pos: 0, zero: 0, neg: 0 };
    for x in ev {
        if x.abs() <= tol * scale {
            return Err(LinalgError::DegenerateAtTolerance);
        }
        if x > 0.0 {
            s.pos += 1;
        } else {
            s.neg += 1;
        }
    }
    Ok(s)
}

/// M*HM = H, exactly.
pub fn preserves_form_exact(m: &Mat3<CycNum>, h: &HermForm<CycNum>) -> bool {
    m.conj_transpose().mul(&h.matrix).mul(m) == h.matrix
}

/// M*HM = H within 1e-10 entrywise.
pub fn preserves_form_float(m: &CMat, h: &HermForm<Complex64>) -> bool {
    m.conj_transpose().mul(&h.matrix).mul(m).max_abs_diff(&h.matrix) < 1e-10
}

fn real_inner(v: &CVec, h: &HermForm<Complex64>) -> f64 {
    h.inner(v, v).re
}

/// Complex hyperbolic distance, with cosh²(ρ/2) = |⟨x,y⟩|²/(⟨x,x⟩⟨y,y⟩).
pub fn dist(x: &CVec, y: &CVec, h: &HermForm<Complex64>) -> Result<f64, LinalgError> {
    let xx = real_inner(x, h);
    let yy = real_inner(y, h);
    if xx >= 0.0 || yy >= 0.0 {
        return Err(LinalgError::NotNegativeVector);
    }
    let c = h.inner(x, y).norm_sqr() / (xx * yy);
    Ok(2.0 * c.max(1.0).sqrt().acosh())
}

/// Relative position of the complex lines polar to two positive vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LinePosition {
    /// The lines meet at angle `theta`; `c` = cos²θ.
    Intersecting { theta: f64, c: f64 },
    /// C = 1; `same_line` when the polar vectors are proportional.
    Asymptotic { c: f64, same_line: bool },
    /// C > 1, with cosh(d/2) = √C for the distance d between the lines.
    Ultraparallel { c: f64 },
}

impl LinePosition {
    pub fn c(&self) -> f64 {
        match *self {
            LinePosition::Intersecting { c, .. }
            | LinePosition::Asymptotic { c, .. }
            | LinePosition::Ultraparallel { c } => c,
        }
    }
}

pub fn line_position(v1: &CVec, v2: &CVec, h: &HermForm<Complex64>) -> Result<LinePosition, LinalgError> {
    let a = real_inner(v1, h);
    let b = real_inner(v2, h);
    if a <= 0.0 || b <= 0.0 {
        return Err(LinalgError::NotPositiveVector);
    }
    let c = h.inner(v1, v2).norm_sqr() / (a * b);
    let same = v1.cross(v2).norm_inf() <= EPS * v1.norm_inf() * v2.norm_inf();
    if same || (c - 1.0).abs() <= EPS {
        Ok(LinePosition::Asymptotic { c, same_line: same })
    } else if c < 1.0 {
        Ok(LinePosition::Intersecting { theta: c.sqrt().acos(), c })
    } else {
        Ok(LinePosition::Ultraparallel { c })
    }
}

/// Roots of a monic complex cubic x³ + a x² + b x + c (Durand–Kerner with a
/// Newton polish).
pub fn cubic_roots(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 3] {
    let f = |z: Complex64| ((z + a) * z + b) * z + c;
    let df = |z: Complex64| (3.0 * z + 2.0 * a) * z + b;
    let radius = 1.0 + a.norm().max(b.norm()).max(c.norm());
    let seed = Complex64::new(0.4, 0.9);
    let mut r = [seed * radius, seed.powu(2) * radius, seed.powu(3) * radius];
    for _ in 0..500 {
        let mut delta: f64 = 0.0;
        for i in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= r[i] - r[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(1e-300, 0.0);
            }
            let step = f(r[i]) / den;
            r[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-17 * radius {
            break;
        }
    }
    for z in r.iter_mut() {
        for _ in 0..3 {
            let d = df(*z);
            if d.norm() > 1e-12 {
                let step = f(*z) / d;
                if step.norm() < 1e-6 {
                    *z -= step;
                }
            }
        }
    }
    r
}

/// Characteristic polynomial coefficients (a, b, c) of x³ + ax² + bx + c.
pub fn charpoly_c64(m: &CMat) -> (Complex64, Complex64, Complex64) {
    (-m.trace(), m.principal_minor_sum(), -m.det())
}

/// An eigenvalue with an eigenvector and its norm sign for the form.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub value: Complex64,
    pub vector: CVec,
    pub norm: f64,
}

/// Eigenvalues and eigenvectors of an isometry; the negative-type eigenvector
/// (if any) has `norm < 0`.
pub fn eigen_unitary(m: &CMat, h: &HermForm<Complex64>) -> Result<Vec<Eigen>, LinalgError> {
    let (a, b, c) = charpoly_c64(m);
    let roots = cubic_roots(a, b, c);
    let tol = 1e-7;
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    for z in roots {
        if let Some(g) = groups.iter_mut().find(|g| (g.0 - z).norm() < tol) {
            g.1 += 1;
        } else {
            groups.push((z, 1));
        }
    }
    let mut out = Vec::new();
    for (lam, mult) in groups {
        let a = m.sub(&Mat3::scalar(&lam));
        let scale = a.max_abs().max(1.0);
        let mut best: Option<CVec> = None;
        let mut best_norm = 0.0;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let v = a.row(i).cross(&a.row(j));
            let nv = v.norm_inf();
            if nv > best_norm {
                best_norm = nv;
                best = Some(v);
            }
        }
        let rank2 = best_norm > 1e-6 * scale * scale;
        if mult == 1 || (rank2 && mult > 1) {
            if mult > 1 {
                return Err(LinalgError::RepeatedEigenvalueNoBasis);
            }
            let v = best.ok_or(LinalgError::RepeatedEigenvalueNoBasis)?.normalized();
            out.push(Eigen { value: lam, norm: real_inner(&v, h), vector: v });
            continue;
        }
        // Rank at most one: the kernel is the orthogonal complement of the
        // largest row under the bilinear pairing.
        let k = (0..3).max_by(|&x, &y| a.row(x).norm_inf().partial_cmp(&a.row(y).norm_inf()).unwrap()).unwrap();
        let r = a.row(k);
        let basis: Vec<CVec> = if r.norm_inf() <= 1e-6 * scale {
            (0..3)
                .map(|i| {
                    let mut v = [Complex64::new(0.0, 0.0); 3];
                    v[i] = Complex64::new(1.0, 0.0);
                    Vec3 { v }
                })
                .collect()
        } else {
            let e: Vec<CVec> = (0..3)
                .map(|i| {
                    let mut v = [Complex64::new(0.0, 0.0); 3];
                    v[i] = Complex64::new(1.0, 0.0);
                    Vec3 { v }
                })
                .collect();
            let mut cands: Vec<CVec> = e.iter().map(|ei| r.cross(ei)).collect();
            cands.sort_by(|x, y| y.norm_inf().partial_cmp(&x.norm_inf()).unwrap());
            let first = cands[0].clone();
            let second = cands[1..]
                .iter()
                .max_by(|x, y| first.cross(x).norm_inf().partial_cmp(&first.cross(y).norm_inf()).unwrap())
                .unwrap()
                .clone();
            vec![first, second]
        };
        for v in basis.into_iter().take(mult) {
            let v = v.normalized();
            out.push(Eigen { value: lam, norm: real_inner(&v, h), vector: v });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn descartes_signature() {
        use Ordering::*;
        // (x−1)(x−2)(x+3) = x³ − 7x + 6
        let s = signature_from_charpoly_signs(&[Greater, Equal, Less, Greater]);
        assert_eq!(s, Signature { pos: 2, zero: 0, neg: 1 });
        // x²(x−1)
        let s = signature_from_charpoly_signs(&[Greater, Less, Equal, Equal]);
        assert_eq!(s, Signature { pos: 1, zero: 2, neg: 0 });
        let id = HermForm::new(Mat3::<CycNum>::identity());
        assert_eq!(signature_exact(&id), Signature { pos: 3, zero: 0, neg: 0 });
    }

    #[test]
    fn adjugate_inverts() {
        let m = Mat3::from_rows([
            [c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0)],
            [c(0.5, 0.0), c(3.0, 1.0), c(1.0, 0.0)],
            [c(0.0, 0.0), c(1.0, -2.0), c(2.0, 0.0)],
        ]);
        let p = m.mul(&m.inverse());
        assert!(p.max_abs_diff(&Mat3::identity()) < 1e-12);
    }

    #[test]
    fn cubic_roots_recovered() {
        let r = [c(1.0, 0.0), c(0.0, 1.0), c(-2.0, 0.5)];
        let a = -(r[0] + r[1] + r[2]);
        let b = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
        let cc = -(r[0] * r[1] * r[2]);
        let got = cubic_roots(a, b, cc);
        for z in r {
            assert!(got.iter().any(|g| (g - z).norm() < 1e-10));
        }
    }

    #[test]
    fn orthogonal_lines_meet_at_right_angle() {
        let h = HermForm::new(Mat3::from_rows([
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        ]));
        let e1 = Vec3::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let e2 = Vec3::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        match line_position(&e1, &e2, &h).unwrap() {
            LinePosition::Intersecting { theta, c } => {
                assert!((theta - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
                assert_eq!(c, 0.0);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(line_position(&e1, &e1, &h).unwrap(), LinePosition::Asymptotic { same_line: true, .. }));
        let e3 = Vec3::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(line_position(&e1, &e3, &h), Err(LinalgError::NotPositiveVector));
    }
}
