//! Galois conjugates of the invariant form and the arithmeticity criterion.
//!
//! An automorphism of Q(ζ_N) is treated as trivial on the real field F when
//! it fixes every adjoint trace |tr w|² in a fixed list of short words, plus
//! |τ|² and 2cos(2π/p). Those automorphisms are grouped with the identity;
//! every other representative must give a definite form.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclofield::{lcm, CycNum};
use crate::hermlinalg::{signature_from_charpoly_signs, Signature};
use crate::spgroups::TriangleGroup;

/// Words whose adjoint traces generate the real field in practice.
pub const INVARIANT_WORDS: [&str; 12] =
    ["1", "J", "1J", "12", "123", "1J2", "12J", "112J", "1J1J2", "12J3", "1J1J", "121J"];

#[derive(Debug, Clone, Serialize)]
pub struct ConjugateForm {
    pub t: u64,
    pub signature: Signature,
    /// Acts trivially on the real field.
    pub identity_class: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaloisOrbit {
    pub conductor: u64,
    /// One residue per pair {t, N − t}.
    pub conjugates: Vec<ConjugateForm>,
    /// Decimal values of the invariants used to detect the real field.
    pub fixed_field_generators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ArithmeticityFlag {
    SatisfiesCriterion,
    FailsCriterion { witness_t: u64, signature: Signature },
}

impl ArithmeticityFlag {
    pub fn satisfied(&self) -> bool {
        matches!(self, ArithmeticityFlag::SatisfiesCriterion)
    }
}

fn real_invariants(g: &TriangleGroup) -> Vec<CycNum> {
    let mut inv: Vec<CycNum> =
        INVARIANT_WORDS.iter().map(|w| g.eval_str(w).expect("fixed word list parses").trace().norm_sq()).collect();
    inv.push(g.tau.norm_sq());
    inv.push(CycNum::two_cos(g.p as u64, 1));
    inv
}

/// Conjugate forms over representatives t ≤ N/2 coprime to N.
pub fn galois_orbit_forms(g: &TriangleGroup) -> GaloisOrbit {
    let m = &g.form.matrix;
    let coeffs = [(-&m.trace()).re(), m.principal_minor_sum().re(), (-&m.det()).re()];
    let invariants = real_invariants(g);
    let n = coeffs.iter().chain(invariants.iter()).fold(m.m[0][1].conductor(), |acc, x| lcm(acc, x.conductor()));
    let conjugates = (1..=n / 2)
        .into_par_iter()
        .filter(|t| t.gcd(&n) == 1)
        .map(|t| {
            let apply = |x: &CycNum| x.lift_or_keep(n).galois_apply(t as i64).expect("t is a unit");
            let identity_class = invariants.iter().all(|x| apply(x) == *x);
            let signs = [
                std::cmp::Ordering::Greater,
                apply(&coeffs[0]).real_sign(),
                apply(&coeffs[1]).real_sign(),
                apply(&coeffs[2]).real_sign(),
            ];
            ConjugateForm { t, signature: signature_from_charpoly_signs(&signs), identity_class }
        })
        .collect();
    GaloisOrbit {
        conductor: n,
        conjugates,
        fixed_field_generators: invariants.iter().map(|x| crate::hp::format_sig(x.to_c64().re, 15)).collect(),
    }
}

/// Every representative outside the identity class must be definite.
pub fn arithmeticity_flag(orbit: &GaloisOrbit) -> ArithmeticityFlag {
    orbit.conjugates.iter().find(|c| !c.identity_class && !c.signature.is_definite()).map_or(
        ArithmeticityFlag::SatisfiesCriterion,
        |c| ArithmeticityFlag::FailsCriterion { witness_t: c.t, signature: c.signature },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spgroups::SporadicId;

    fn flag(p: u32, id: &str) -> (GaloisOrbit, ArithmeticityFlag) {
        let g = TriangleGroup::sporadic(p, id.parse::<SporadicId>().unwrap()).unwrap();
        let o = galois_orbit_forms(&g);
        let f = arithmeticity_flag(&o);
        (o, f)
    }

    #[test]
    fn identity_reproduces_form() {
        let (o, f) = flag(3, "sigma4bar");
        let first = &o.conjugates[0];
        assert_eq!(first.t, 1);
        assert!(first.identity_class);
        assert!(first.signature.is_hyperbolic());
        assert!(f.satisfied());
        // 18 of the 36 representatives act trivially on the real field
        assert_eq!(o.conductor, 252);
        assert_eq!(o.conjugates.iter().filter(|c| c.identity_class).count(), 18);
    }

    #[test]
    fn non_arithmetic_examples() {
        assert!(!flag(5, "sigma4bar").1.satisfied());
        assert!(!flag(4, "sigma1").1.satisfied());
    }

    #[test]
    fn empty_orbit_is_vacuous() {
        let o = GaloisOrbit { conductor: 1, conjugates: vec![], fixed_field_generators: vec![] };
        assert!(arithmeticity_flag(&o).satisfied());
    }
}
