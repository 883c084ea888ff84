//! Conjugacy-type classification of isometries of the complex hyperbolic plane.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;

use crate::cyclofield::{lcm, CycNum};
use crate::hermlinalg::{
    charpoly_c64, cubic_roots, preserves_form_exact, preserves_form_float, CMat, HermForm, Mat3, Vec3,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("matrix does not preserve the form or has determinant other than 1")]
    NotUnitary,
    #[error("trace discriminant could not be separated from zero at tolerance")]
    UnresolvedAtTolerance,
    #[error("isometry is not a complex reflection")]
    NotAReflection,
    #[error("angle is zero modulo 2π")]
    ZeroAngle,
}

/// An angle in (0, 2π), with its rational multiple of π when known exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Angle {
    pub radians: f64,
    #[serde(serialize_with = "ser_ratio")]
    pub pi_ratio: Option<Rational64>,
}

fn ser_ratio<S: serde::Serializer>(r: &Option<Rational64>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(q) => s.serialize_some(&format!("{}/{}", q.numer(), q.denom())),
        None => s.serialize_none(),
    }
}

impl Angle {
    pub fn from_pi_ratio(q: Rational64) -> Angle {
        Angle { radians: PI * (*q.numer() as f64) / (*q.denom() as f64), pi_ratio: Some(q) }
    }

    /// True when 2π/angle is a positive integer.
    pub fn divides_two_pi(&self) -> bool {
        match self.pi_ratio {
            Some(q) => (Rational64::from_integer(2) / q).is_integer(),
            None => {
                let k = 2.0 * PI / self.radians;
                (k - k.round()).abs() < 1e-9
            }
        }
    }
}

impl std::fmt::Display for Angle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.pi_ratio {
            Some(q) if *q.numer() == 0 => f.write_str("0"),
            Some(q) => {
                let n = match *q.numer() {
                    1 => String::new(),
                    -1 => "-".into(),
                    k => k.to_string(),
                };
                match *q.denom() {
                    1 => write!(f, "{n}π"),
                    d => write!(f, "{n}π/{d}"),
                }
            }
            None => write!(f, "{:.12} rad", self.radians),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParabolicKind {
    VerticalTranslation,
    NonVerticalTranslation,
    ScrewParabolic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum IsometryKind {
    Identity,
    RegularElliptic,
    SpecialElliptic,
    /// Rotation angle and a positive polar vector of the mirror.
    ComplexReflection {
        angle: Angle,
        polar: [Complex64; 3],
    },
    Parabolic(ParabolicKind),
    Loxodromic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Certainty {
    Exact,
    FloatAtTolerance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryClass {
    pub kind: IsometryKind,
    pub certainty: Certainty,
}

impl IsometryClass {
    pub fn is_parabolic(&self) -> bool {
        matches!(self.kind, IsometryKind::Parabolic(_))
    }
}

/// |t|⁴ − 8 Re(t³) + 18|t|² − 27.
pub fn trace_discriminant(t: &CycNum) -> CycNum {
    let tb = t.conj();
    let n = t * &tb;
    let t3 = &(t * t) * t;
    let re3 = &t3 + &t3.conj();
    let a = &n * &n;
    let b = re3.scale_int(4);
    let c = n.scale_int(18);
    &(&(&a - &b) + &c) - &CycNum::from_int(27)
}

pub fn trace_discriminant_f64(t: Complex64) -> f64 {
    let n = t.norm_sqr();
    n * n - 8.0 * (t * t * t).re + 18.0 * n - 27.0
}

/// Finds a root of unity ζ_L^k equal to `target` by rounding its argument
/// and confirming exactly.
fn recover_root_of_unity(target: &CycNum, l: u64) -> Option<i64> {
    let z = target.to_c64();
    if (z.norm() - 1.0).abs() > 1e-6 {
        return None;
    }
    let k = (z.arg() / (2.0 * PI) * l as f64).round() as i64;
    let k = k.rem_euclid(l as i64);
    (CycNum::root_of_unity(l, k) == *target).then_some(k)
}

/// The repeated root of x³ + a x² + b x + c when the discriminant vanishes.
pub(crate) fn repeated_root(m: &Mat3<CycNum>) -> (CycNum, bool) {
    let tr = m.trace();
    let a = -&tr;
    let b = m.principal_minor_sum();
    let c = -&m.det();
    // a² = 3b means a triple root −a/3.
    let disc2 = &(&a * &a) - &b.scale_int(3);
    if disc2.is_zero() {
        let third = CycNum::from_rational(&num_rational::BigRational::new(1.into(), 3.into()));
        return (&tr * &third, true);
    }
    let charpoly = |x: &CycNum| &(&(&(&(x * x) * x) + &(&a * &(x * x))) + &(&b * x)) + &c;
    let deriv = |x: &CycNum| &(&(x * x).scale_int(3) + &(&a * x).scale_int(2)) + &b;
    let fm = m.to_c64();
    let (fa, fb, fc) = charpoly_c64(&fm);
    let roots = cubic_roots(fa, fb, fc);
    // closest pair of roots
    let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
    for i in 0..3 {
        for j in i + 1..3 {
            let d = (roots[i] - roots[j]).norm();
            if d < best.0 {
                best = (d, (roots[i] + roots[j]) / 2.0);
            }
        }
    }
    let l = lcm(2, lcm(m.m[0][0].conductor(), tr.conductor()));
    let l = lcm(l, 3);
    let z = best.1;
    if (z.norm() - 1.0).abs() < 1e-6 {
        let k = ((z.arg() / (2.0 * PI) * l as f64).round() as i64).rem_euclid(l as i64);
        let cand = CycNum::root_of_unity(l, k);
        if charpoly(&cand).is_zero() && deriv(&cand).is_zero() {
            return (cand, false);
        }
    }
    // General double root: (9c − ab) / (2(a² − 3b)).
    let num = &c.scale_int(9) - &(&a * &b);
    let den = disc2.scale_int(2);
    let lam = num.checked_div(&den).expect("nonzero denominator");
    (lam, false)
}

/// Classifies an exact element of SU(H).
pub fn classify(m: &Mat3<CycNum>, h: &HermForm<CycNum>) -> Result<IsometryClass, ClassifyError> {
    if !m.det().is_one() || !preserves_form_exact(m, h) {
        return Err(ClassifyError::NotUnitary);
    }
    classify_unchecked(m, h)
}

/// Same as [`classify`] without the membership check.
pub fn classify_unchecked(m: &Mat3<CycNum>, h: &HermForm<CycNum>) -> Result<IsometryClass, ClassifyError> {
    let exact = |kind| Ok(IsometryClass { kind, certainty: Certainty::Exact });
    let f = trace_discriminant(&m.trace());
    match f.real_sign() {
        Ordering::Less => return exact(IsometryKind::RegularElliptic),
        Ordering::Greater => return exact(IsometryKind::Loxodromic),
        Ordering::Equal => {}
    }
    let (lam, triple) = repeated_root(m);
    let n = m.m[0][0].conductor();
    let lam_i = Mat3::scalar(&lam.lift_or_keep(lcm(n, lam.conductor())));
    let shifted = m.sub(&lam_i);
    let rank = shifted.rank();
    if triple {
        return exact(match rank {
            0 => IsometryKind::Identity,
            1 => IsometryKind::Parabolic(ParabolicKind::VerticalTranslation),
            _ => IsometryKind::Parabolic(ParabolicKind::NonVerticalTranslation),
        });
    }
    if rank >= 2 {
        return exact(IsometryKind::Parabolic(ParabolicKind::ScrewParabolic));
    }
    let mu = &m.trace() - &lam.scale_int(2);
    let v = m.sub(&Mat3::scalar(&mu)).kernel_vector().ok_or(ClassifyError::UnresolvedAtTolerance)?;
    let norm = h.inner(&v, &v).re();
    match norm.real_sign() {
        Ordering::Greater => {
            let angle = ratio_angle(&mu, &lam);
            let p = v.to_c64();
            exact(IsometryKind::ComplexReflection { angle, polar: p.v })
        }
        Ordering::Less => exact(IsometryKind::SpecialElliptic),
        Ordering::Equal => Err(ClassifyError::UnresolvedAtTolerance),
    }
}

/// arg(μ/λ) for unit-modulus μ, λ, as an exact multiple of π when it is a
/// root of unity.
pub(crate) fn ratio_angle(mu: &CycNum, lam: &CycNum) -> Angle {
    let q = mu * &lam.conj();
    let l = lcm(2, q.conductor());
    if let Some(k) = recover_root_of_unity(&q, l) {
        if k != 0 {
            return Angle::from_pi_ratio(Rational64::new(2 * k, l as i64));
        }
    }
    let a = q.to_c64().arg().rem_euclid(2.0 * PI);
    Angle { radians: a, pi_ratio: None }
}

/// Rotation angle of an exact complex reflection.
pub fn reflection_angle(m: &Mat3<CycNum>, h: &HermForm<CycNum>) -> Result<Angle, ClassifyError> {
    match classify(m, h)?.kind {
        IsometryKind::ComplexReflection { angle, .. } => Ok(angle),
        _ => Err(ClassifyError::NotAReflection),
    }
}

/// Floating-point classification with tolerance `tol` on the discriminant.
pub fn classify_float(m: &CMat, h: &HermForm<Complex64>, tol: f64) -> Result<IsometryClass, ClassifyError> {
    if !preserves_form_float(m, h) || (m.det() - 1.0).norm() > 1e-8 {
        return Err(ClassifyError::NotUnitary);
    }
    let f = trace_discriminant_f64(m.trace());
    let float = |kind| Ok(IsometryClass { kind, certainty: Certainty::FloatAtTolerance });
    if f < -tol {
        return float(IsometryKind::RegularElliptic);
    }
    if f > tol {
        return float(IsometryKind::Loxodromic);
    }
    let (a, b, c) = charpoly_c64(m);
    let r = cubic_roots(a, b, c);
    let spread = (r[0] - r[1]).norm().max((r[1] - r[2]).norm()).max((r[0] - r[2]).norm());
    if spread < 1e-5 {
        let lam = (r[0] + r[1] + r[2]) / 3.0;
        let d = m.sub(&Mat3::scalar(&lam)).max_abs();
        return float(if d < 1e-7 {
            IsometryKind::Identity
        } else {
            IsometryKind::Parabolic(ParabolicKind::VerticalTranslation)
        });
    }
    Err(ClassifyError::UnresolvedAtTolerance)
}

/// Smallest positive angle 2α among multiples of the base angle (aπ/b),
/// returned as (α/π, k) with k·base ≡ 2α mod 2π.
pub fn minimal_power_angle(base_pi_ratio: Rational64) -> Result<(Rational64, i64), ClassifyError> {
    let b = *base_pi_ratio.denom();
    let a = base_pi_ratio.numer().rem_euclid(2 * b);
    if a == 0 {
        return Err(ClassifyError::ZeroAngle);
    }
    let g = a.gcd(&(2 * b));
    let modulus = 2 * b / g;
    let k = if modulus == 1 { 1 } else { mod_inverse(a / g, modulus) };
    Ok((Rational64::new(g, 2 * b), k))
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    let e = num_integer::Integer::extended_gcd(&a.rem_euclid(m), &m);
    e.x.rem_euclid(m)
}

/// Embeds a float 3-vector into the exact type's float view; used by callers
/// comparing polar vectors.
pub fn polar_vec(v: &[Complex64; 3]) -> Vec3<Complex64> {
    Vec3 { v: *v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spgroups::{SporadicId, TriangleGroup};
    use proptest::prelude::*;

    fn group(p: u32, id: &str) -> TriangleGroup {
        TriangleGroup::sporadic(p, id.parse::<SporadicId>().unwrap()).unwrap()
    }

    #[test]
    fn generators() {
        let g = group(5, "sigma1");
        assert_eq!(classify(&g.j, &g.form).unwrap().kind, IsometryKind::RegularElliptic);
        assert_eq!(classify(&g.identity(), &g.form).unwrap().kind, IsometryKind::Identity);
        let a = reflection_angle(&g.r[0], &g.form).unwrap();
        assert_eq!(a.pi_ratio, Some(Rational64::new(2, 5)));
    }

    #[test]
    fn sigma4_square_is_parabolic_at_p4() {
        let g = group(4, "sigma4");
        let m = g.eval_str("(12)^2").unwrap();
        assert_eq!(classify(&m, &g.form).unwrap().kind, IsometryKind::Parabolic(ParabolicKind::VerticalTranslation));
    }

    #[test]
    fn square_angle_for_norm_two() {
        // |τ|² = 2 gives (p−4)π/p for (R1R2)².
        for p in [5u32, 7, 9] {
            let g = group(p, "sigma4bar");
            let a = reflection_angle(&g.eval_str("(12)^2").unwrap(), &g.form).unwrap();
            assert_eq!(a.pi_ratio, Some(Rational64::new(p as i64 - 4, p as i64)), "p={p}");
        }
    }

    #[test]
    fn cube_angle_for_sigma1() {
        let g = group(7, "sigma1");
        // 6π/7 up to orientation; the multiplier convention that makes R1
        // rotate by 2π/p gives the opposite orientation here.
        let a = reflection_angle(&g.eval_str("(12)^3").unwrap(), &g.form).unwrap();
        assert_eq!(a.pi_ratio, Some(Rational64::new(8, 7)));
        let (alpha, _) = minimal_power_angle(a.pi_ratio.unwrap()).unwrap();
        assert_eq!(alpha, minimal_power_angle(Rational64::new(6, 7)).unwrap().0);
    }

    #[test]
    fn reflection_polar_is_eigenvector() {
        let g = group(3, "sigma4bar");
        let m = g.r[1].clone();
        if let IsometryKind::ComplexReflection { polar, .. } = classify(&m, &g.form).unwrap().kind {
            let fm = m.to_c64();
            let v = polar_vec(&polar);
            let w = fm.mul_vec(&v);
            let k = (0..3).max_by(|&i, &j| v.v[i].norm().total_cmp(&v.v[j].norm())).unwrap();
            let s = w.v[k] / v.v[k];
            assert!(w.sub(&v.scale(&s)).norm_inf() < 1e-10);
        } else {
            panic!("R2 should be a complex reflection");
        }
    }

    #[test]
    fn minimal_power_examples() {
        let alpha = |a, b| minimal_power_angle(Rational64::new(a, b)).unwrap().0;
        assert_eq!(alpha(3, 7), Rational64::new(1, 14));
        assert_eq!(alpha(16, 20), Rational64::new(1, 5));
        assert_eq!(alpha(6, 12), Rational64::new(1, 4));
        assert_eq!(minimal_power_angle(Rational64::new(4, 2)), Err(ClassifyError::ZeroAngle));
    }

    #[test]
    fn conjugation_invariance() {
        let g = group(4, "sigma5");
        let c = g.eval_str("12J3").unwrap();
        let ci = c.adjugate();
        for w in ["(12)^2", "12", "J", "1", "123"] {
            let m = g.eval_str(w).unwrap();
            let k1 = classify(&m, &g.form).unwrap();
            let k2 = classify(&c.mul(&m).mul(&ci), &g.form).unwrap();
            match (&k1.kind, &k2.kind) {
                (
                    IsometryKind::ComplexReflection { angle: a, .. },
                    IsometryKind::ComplexReflection { angle: b, .. },
                ) => assert_eq!(a.pi_ratio, b.pi_ratio),
                (a, b) => assert_eq!(a, b, "{w}"),
            }
        }
    }

    proptest! {
        #[test]
        fn minimal_power_matches_brute_force(a in -400i64..400, b in 1i64..200) {
            let q = Rational64::new(a, b);
            let (qa, qb) = (*q.numer(), *q.denom());
            let res = minimal_power_angle(q);
            // brute force over k in 1..=2b
            let best = (1..=2 * qb).map(|k| (k * qa).rem_euclid(2 * qb)).filter(|&r| r > 0).min();
            match best {
                None => prop_assert_eq!(res, Err(ClassifyError::ZeroAngle)),
                Some(r) => {
                    let (alpha, k) = res.unwrap();
                    prop_assert_eq!(alpha * 2, Rational64::new(r, qb));
                    prop_assert_eq!((k * qa).rem_euclid(2 * qb), r);
                }
            }
        }
    }
}
