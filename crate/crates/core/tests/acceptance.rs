//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs as a plain binary (`harness = false`).

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_rational::Rational64;
use rayon::prelude::*;
use sporadic::arith::{arithmeticity_flag, galois_orbit_forms};
use sporadic::classify::{classify_unchecked, minimal_power_angle};
use sporadic::dirichlet::{
    cusp_report, cusp_table, cycle_angles, g_procedure, g_procedure_bounded, isometry_classes, refine,
    refinement_power, side_pairing_check, word_matches_class, Behaviour, Limits,
};
use sporadic::discretetest::{
    build_target_r1232, census_nondiscrete, evaluate_row, p12, shimizu_trace_identity, table_specs,
    trace_r1232_closed_form, CensusConfig, Outcome,
};
use sporadic::hermlinalg::signature_exact;
use sporadic::spgroups::{hermitian_form, mat_pow, presentation_table, sporadic, RelationCheck};
use sporadic::{CycNum, SporadicId, TriangleGroup, Word};

type Check = Result<String, String>;

fn id(s: &str) -> SporadicId {
    s.parse().expect("known sporadic value")
}

/// Inclusive ranges, with `None` as an open end, clipped to [2, max].
fn set(ranges: &[(u32, Option<u32>)], max: u32) -> BTreeSet<u32> {
    ranges.iter().flat_map(|&(a, b)| a..=b.unwrap_or(max).min(max)).collect()
}

fn hyperbolic_table(max: u32) -> Vec<(&'static str, BTreeSet<u32>)> {
    let inf = None;
    vec![
        ("sigma1", set(&[(3, inf)], max)),
        ("sigma1bar", set(&[(3, Some(7))], max)),
        ("sigma2", set(&[(3, inf)], max)),
        ("sigma2bar", set(&[(3, Some(19))], max)),
        ("sigma3", set(&[(3, inf)], max)),
        ("sigma3bar", set(&[(3, Some(6))], max)),
        ("sigma4", set(&[(4, Some(6))], max)),
        ("sigma4bar", set(&[(3, inf)], max)),
        ("sigma5", set(&[(2, inf)], max)),
        ("sigma5bar", set(&[(2, Some(2)), (4, Some(4))], max)),
        ("sigma6", set(&[(3, inf)], max)),
        ("sigma6bar", set(&[(3, Some(29))], max)),
        ("sigma7", set(&[(2, inf)], max)),
        ("sigma7bar", set(&[(2, Some(2))], max)),
        ("sigma8", set(&[(4, Some(41))], max)),
        ("sigma8bar", set(&[(4, inf)], max)),
        ("sigma9", set(&[(3, inf)], max)),
        ("sigma9bar", set(&[(4, Some(8))], max)),
    ]
}

/// Union of every line of the non-discreteness column.
fn nondiscrete_table(max: u32) -> Vec<(&'static str, BTreeSet<u32>)> {
    let inf = None;
    let one = |p| (p, Some(p));
    vec![
        ("sigma1", set(&[one(7), one(8), (10, inf), one(9)], max)),
        ("sigma1bar", set(&[one(5), one(7), one(3), one(6)], max)),
        ("sigma2", set(&[(6, Some(9)), (11, inf), one(10)], max)),
        ("sigma2bar", set(&[(6, Some(9)), (11, Some(19)), one(10)], max)),
        ("sigma3", set(&[(3, inf)], max)),
        ("sigma3bar", set(&[(3, Some(6))], max)),
        ("sigma4", set(&[(4, Some(6))], max)),
        ("sigma4bar", set(&[one(7), (9, Some(11)), (13, inf)], max)),
        ("sigma5", set(&[one(7), (9, Some(11)), (13, inf)], max)),
        ("sigma5bar", set(&[one(4)], max)),
        ("sigma6", set(&[one(3), one(4), (6, inf), one(5)], max)),
        ("sigma6bar", set(&[one(3), one(4), (6, inf), one(5)], max)),
        ("sigma7", set(&[one(5), one(6), (8, Some(13)), (15, inf)], max)),
        ("sigma7bar", BTreeSet::new()),
        ("sigma8", set(&[(4, Some(41))], max)),
        ("sigma8bar", set(&[(4, inf)], max)),
        ("sigma9", set(&[(3, inf)], max)),
        ("sigma9bar", set(&[(4, Some(8))], max)),
    ]
}

fn exact_hyperbolic(tau: &str, max: u32) -> BTreeSet<u32> {
    let t = sporadic(id(tau)).value;
    (2..=max).filter(|&p| signature_exact(&hermitian_form(p, &t)).is_hyperbolic()).collect()
}

fn fmt_set(s: &BTreeSet<u32>) -> String {
    format!("{:?}", s.iter().collect::<Vec<_>>())
}

fn criterion_1() -> Check {
    let mut bad = Vec::new();
    let mut n = 0;
    for spec in table_specs() {
        for row in &spec.rows {
            n += 1;
            match evaluate_row(row) {
                Ok(r) if r.matches => {}
                Ok(r) => bad.push(format!("{} p={}: {:.4} vs printed {}", spec.id, row.p, r.computed, row.printed)),
                Err(e) => bad.push(format!("{} p={}: {e}", spec.id, row.p)),
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{n} entries within one unit of the last printed digit"))
    } else {
        Err(format!("{}/{n} entries differ: {}", bad.len(), bad.join("; ")))
    }
}

fn criterion_2() -> Check {
    let report = census_nondiscrete(&CensusConfig { p_max: 50, tail_factor: 1, ..CensusConfig::default() });
    let mut bad = Vec::new();
    for (tau, expected) in nondiscrete_table(50) {
        let hyp = exact_hyperbolic(tau, 50);
        let expected: BTreeSet<u32> = expected.intersection(&hyp).copied().collect();
        let got: BTreeSet<u32> = report
            .rows
            .iter()
            .filter(|r| r.tau == id(tau) && !matches!(r.verdict.outcome, Outcome::Inconclusive))
            .map(|r| r.p)
            .collect();
        if got != expected {
            let extra: BTreeSet<_> = got.difference(&expected).copied().collect();
            let missing: BTreeSet<_> = expected.difference(&got).copied().collect();
            bad.push(format!("{tau}: extra {} missing {}", fmt_set(&extra), fmt_set(&missing)));
        }
    }
    if bad.is_empty() {
        Ok(format!("{} hyperbolic rows agree for p ≤ 50", report.rows.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_3() -> Check {
    let shimizu_cases = std::sync::Mutex::new(Vec::new());
    let groups: Vec<(u32, SporadicId)> =
        SporadicId::all().into_iter().flat_map(|i| (2..=24).map(move |p| (p, i))).collect();
    let failures: Vec<String> = groups
        .par_iter()
        .filter_map(|&(p, i)| {
            let sv = sporadic(i);
            if !signature_exact(&hermitian_form(p, &sv.value)).is_hyperbolic() {
                return None;
            }
            let g = TriangleGroup::new(p, &sv.value, &i.name()).ok()?;
            let mut f = Vec::new();
            let lam = CycNum::root_of_unity(3 * p as u64, -2);
            let b12 = g.r[0].mul(&g.r[1]);
            let v = p12(&g, sv.rs);
            if v.is_zero() || b12.mul_vec(&v) != v.scale(&lam) {
                f.push("p12 eigenvector");
            }
            if let Some(rps) = sv.rps {
                match build_target_r1232(&g, Some(rps)) {
                    Ok(t) => {
                        let b = g.r[0].mul(&g.r[1]).mul(&g.r[2]).mul(&g.r_inv[1]);
                        if b.mul_vec(&t.polar) != t.polar.scale(&lam) {
                            f.push("p1232 eigenvector");
                        }
                    }
                    Err(sporadic::discretetest::TestError::EigenvectorMismatch) => f.push("p1232 eigenvector"),
                    Err(_) => {}
                }
            }
            let a = mat_pow(&b12, sv.rs.1 as u64, &g.identity());
            if a.mul(&g.r[0]) != g.r[0].mul(&a) || a.mul(&g.r[1]) != g.r[1].mul(&a) {
                f.push("(R1R2)^s commutation");
            }
            // The trace identity is stated for |τ|² = 2 when (R1R2)² is parabolic.
            let sq = mat_pow(&b12, 2, &g.identity());
            let parabolic = sv.rs == (1, 2) && classify_unchecked(&sq, &g.form).is_ok_and(|c| c.is_parabolic());
            if parabolic && !shimizu_trace_identity(&g) {
                f.push("Shimizu trace identity");
            }
            if parabolic {
                shimizu_cases.lock().expect("lock").push(format!("({p}, {i})"));
            }
            let t = g.r[0].mul(&g.r[1]).mul(&g.r[2]).mul(&g.r_inv[1]).trace();
            if t != trace_r1232_closed_form(p, &g.tau) {
                f.push("tr(R1R2R3R2⁻¹)");
            }
            (!f.is_empty()).then(|| format!("({p}, {i}): {}", f.join(", ")))
        })
        .collect();
    if failures.is_empty() {
        let mut cases = shimizu_cases.into_inner().expect("lock");
        cases.sort();
        Ok(format!(
            "all identities exact for hyperbolic p ≤ 24; trace identity at parabolic (R1R2)²: {}",
            cases.join(" ")
        ))
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_4() -> Check {
    let mut bad = Vec::new();
    let pres = presentation_table();
    for row in &pres {
        let g = TriangleGroup::sporadic(row.p, row.tau).map_err(|e| e.to_string())?;
        for r in &row.relations {
            match g.verify_relation_str(r) {
                Ok(RelationCheck::HoldsExactly { .. }) => {}
                other => bad.push(format!("({}, {}) {r}: {other:?}", row.p, row.tau)),
            }
        }
    }
    let cusps = cusp_table();
    for c in &cusps {
        let g = TriangleGroup::sporadic(c.p, c.tau).map_err(|e| e.to_string())?;
        for r in cusp_report(&g, std::slice::from_ref(c)) {
            if !r.failures.is_empty() {
                bad.push(format!("cusp ({}, {}): {}", c.p, c.tau, r.failures.join(", ")));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{} presentations and {} cusp rows hold exactly", pres.len(), cusps.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn brute_force(base: Rational64) -> Option<Rational64> {
    let two = Rational64::from_integer(2);
    let reduce = |x: Rational64| x - two * (x / two).floor();
    let period = 2 * *base.denom();
    (1..=period).map(|k| reduce(base * k)).filter(|x| *x != Rational64::from_integer(0)).min().map(|m| m / 2)
}

fn criterion_5() -> Check {
    let mut bad = Vec::new();
    let mut classes = [0usize; 4];
    for p in 3..=200i64 {
        let bases = [p - 4, 6, 10, 14];
        for (fam, &a) in bases.iter().enumerate() {
            let base = Rational64::new(a, p);
            let got = minimal_power_angle(base).ok();
            let want = brute_force(base);
            match (got, want) {
                (Some((alpha, k)), Some(w)) => {
                    let two = Rational64::from_integer(2);
                    let hit = base * k - two * alpha;
                    if alpha != w || !(hit / two).is_integer() {
                        bad.push(format!("p={p} base {a}π/p: got {alpha} (k={k}), brute force {w}"));
                    }
                }
                (None, None) => {}
                (g, w) => bad.push(format!("p={p} base {a}π/p: {g:?} vs {w:?}")),
            }
            if fam == 0 && p != 4 {
                let expected = match (p % 2, p % 4, p % 8) {
                    (1, _, _) => Rational64::new(1, 2 * p),
                    (_, 2, _) => Rational64::new(1, p),
                    (_, _, 4) => Rational64::new(4, p),
                    _ => Rational64::new(2, p),
                };
                let closed = Rational64::new((p - 4).gcd(&(2 * p)), 2 * p);
                if closed != expected || got.map(|x| x.0) != Some(expected) {
                    bad.push(format!("p={p}: congruence class value {expected} vs {got:?}"));
                }
                classes[if p % 2 == 1 {
                    0
                } else if p % 4 == 2 {
                    1
                } else if p % 8 == 4 {
                    2
                } else {
                    3
                }] += 1;
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("p ≤ 200, four families; congruence classes exercised {classes:?}"))
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_6() -> Check {
    let mut bad = Vec::new();
    for (tau, expected) in hyperbolic_table(50) {
        let got = exact_hyperbolic(tau, 50);
        if got != expected {
            let extra: BTreeSet<_> = got.difference(&expected).copied().collect();
            let missing: BTreeSet<_> = expected.difference(&got).copied().collect();
            let detail: Vec<String> = missing
                .iter()
                .map(|&p| format!("p={p} sig {}", signature_exact(&hermitian_form(p, &sporadic(id(tau)).value))))
                .collect();
            bad.push(format!("{tau}: extra {} missing {} [{}]", fmt_set(&extra), fmt_set(&missing), detail.join(", ")));
        }
    }
    if bad.is_empty() {
        Ok("18 ranges agree for p ≤ 50".into())
    } else {
        Err(bad.join("; "))
    }
}

fn criterion_7() -> Check {
    let groups: Vec<(u32, SporadicId)> =
        SporadicId::all().into_iter().flat_map(|i| (3..=24).map(move |p| (p, i))).collect();
    let satisfied: Vec<(u32, SporadicId)> = groups
        .par_iter()
        .filter(|&&(p, i)| {
            let tau = sporadic(i).value;
            signature_exact(&hermitian_form(p, &tau)).is_hyperbolic()
                && TriangleGroup::new(p, &tau, &i.name())
                    .map(|g| arithmeticity_flag(&galois_orbit_forms(&g)).satisfied())
                    .unwrap_or(false)
        })
        .copied()
        .collect();
    let p2: Vec<String> = SporadicId::all()
        .into_iter()
        .filter(|&i| {
            let tau = sporadic(i).value;
            signature_exact(&hermitian_form(2, &tau)).is_hyperbolic()
                && TriangleGroup::new(2, &tau, &i.name())
                    .map(|g| arithmeticity_flag(&galois_orbit_forms(&g)).satisfied())
                    .unwrap_or(false)
        })
        .map(|i| i.name())
        .collect();
    if satisfied == vec![(3, id("sigma4bar"))] {
        Ok(format!("only (3, sigma4bar) for 3 ≤ p ≤ 24; p = 2 satisfiers (outside the sweep): {p2:?}"))
    } else {
        Err(format!("satisfied at {satisfied:?}"))
    }
}

/// Figure labels of the facets of Γ(2π/3, σ̄4).
const FIGURE_LABELS: [&str; 7] = ["1", "12", "121", "121'", "123", "1212", "121'31"];

fn criterion_8() -> Check {
    let limits = Limits { grid: 200, ..Limits::default() };
    let mut notes = Vec::new();
    let mut bad = Vec::new();

    // (3, σ̄4): A, seven isometry classes matching the labels, pairings and integral cycles.
    let g = TriangleGroup::sporadic(3, id("sigma4bar")).map_err(|e| e.to_string())?;
    let o = g_procedure(&g, &limits, None, None).map_err(|e| e.to_string())?;
    if o.behaviour != Behaviour::A {
        bad.push(format!("(3, sigma4bar) behaviour {:?}", o.behaviour));
    } else {
        let iso = isometry_classes(&o);
        let labels: Vec<Word> = FIGURE_LABELS.iter().map(|s| Word::parse(s).expect("label")).collect();
        let matched: Vec<usize> = iso
            .iter()
            .map(|(_, cls)| labels.iter().filter(|w| cls.iter().any(|c| word_matches_class(&o, c, w))).count())
            .collect();
        if iso.len() != 7 || matched.iter().any(|&m| m != 1) {
            bad.push(format!("(3, sigma4bar) {} isometry classes, label matches {matched:?}", iso.len()));
        }
        let pr = side_pairing_check(&o).map_err(|e| e.to_string())?;
        if !pr.unmatched.is_empty() {
            bad.push(format!(
                "(3, sigma4bar) unmatched facets {:?}",
                pr.unmatched.iter().map(|w| w.to_string()).collect::<Vec<_>>()
            ));
        }
        let cyc = cycle_angles(&o).map_err(|e| e.to_string())?;
        if cyc.is_empty() || cyc.iter().any(|c| !c.closed || !c.integral) {
            bad.push("(3, sigma4bar) cycle angles not all integral".into());
        }
        notes.push(format!(
            "(3, sigma4bar) A, {} facet classes in 7 isometry classes, {} cycles",
            iso.iter().map(|c| c.1.len()).sum::<usize>(),
            cyc.len()
        ));
    }

    // (5, σ1): a 4π/5 cycle, then refinement gives B.
    let g = TriangleGroup::sporadic(5, id("sigma1")).map_err(|e| e.to_string())?;
    let o = g_procedure(&g, &limits, None, None).map_err(|e| e.to_string())?;
    if o.behaviour != Behaviour::A {
        bad.push(format!("(5, sigma1) behaviour {:?}", o.behaviour));
    } else {
        let cyc = cycle_angles(&o).map_err(|e| e.to_string())?;
        let four_fifths = Some(Rational64::new(4, 5));
        match cyc.iter().find(|c| c.rotation_angle.and_then(|a| a.pi_ratio) == four_fifths) {
            None => bad.push("(5, sigma1) no 4π/5 cycle".into()),
            Some(c) => {
                let k = refinement_power(&c.rotation_angle.expect("angle")).map_err(|e| e.to_string())?;
                let w0 = refine(&o.domain, &c.cycle_word, k);
                let t = Instant::now();
                let o2 = g_procedure_bounded(&g, &limits, Some(w0), None, o.radius).map_err(|e| e.to_string())?;
                notes.push(format!(
                    "(5, sigma1) cycle {} at 4π/5, refined with k = {k}: {:?} after {} steps, {} words, {} faces ({:.0?})",
                    c.cycle_word,
                    o2.behaviour,
                    o2.steps,
                    o2.domain.len(),
                    o2.faces.len(),
                    t.elapsed()
                ));
                if o2.behaviour != Behaviour::B {
                    bad.push(format!("(5, sigma1) refined behaviour {:?}", o2.behaviour));
                }
            }
        }
    }

    // Classification of (3, σ1) and an optional extra group.
    let mut extra = vec![(3u32, id("sigma1"), true)];
    if let Ok(s) = std::env::var("SPORADIC_EXTRA_GROUP") {
        if let Some((p, t)) = s.split_once(',') {
            if let (Ok(p), Ok(t)) = (p.trim().parse(), t.trim().parse::<SporadicId>()) {
                let lattice = presentation_table().iter().any(|r| r.p == p && r.tau == t);
                extra.push((p, t, lattice));
            }
        }
    }
    for (p, t, lattice) in extra {
        let g = TriangleGroup::sporadic(p, t).map_err(|e| e.to_string())?;
        let o = g_procedure(&g, &limits, None, None).map_err(|e| e.to_string())?;
        let integral = o.behaviour == Behaviour::A
            && cycle_angles(&o).map(|c| c.iter().all(|x| x.closed && x.integral)).unwrap_or(false);
        notes.push(format!("({p}, {t}) {:?}, integral cycles {integral}", o.behaviour));
        if lattice && !integral {
            bad.push(format!("({p}, {t}) expected A with integral cycles"));
        }
    }
    if bad.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!("{} | {}", bad.join("; "), notes.join("; ")))
    }
}

fn main() {
    let only: Option<Vec<usize>> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .map(|a| a.trim_start_matches("criterion_").parse().ok())
        .collect();
    let criteria: [(usize, &str, fn() -> Check, Option<Duration>); 8] = [
        (1, "table values", criterion_1, Some(Duration::from_secs(10))),
        (2, "census verdicts", criterion_2, Some(Duration::from_secs(60))),
        (3, "exact identities", criterion_3, Some(Duration::from_secs(120))),
        (4, "presentations and cusps", criterion_4, Some(Duration::from_secs(300))),
        (5, "gcd lemma oracle", criterion_5, Some(Duration::from_secs(5))),
        (6, "hyperbolicity ranges", criterion_6, Some(Duration::from_secs(30))),
        (7, "arithmeticity sweep", criterion_7, Some(Duration::from_secs(120))),
        (8, "G-procedure", criterion_8, None),
    ];
    let mut failed = 0;
    for (n, name, f, budget) in criteria {
        if only.as_ref().is_some_and(|o| !o.is_empty() && !o.contains(&n)) {
            continue;
        }
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let dt = t.elapsed();
        let over = budget.is_some_and(|b| dt > b);
        let (status, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over the {:?} budget; {d}", budget.expect("budget"))),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {n} ({name}): {status} [{:.1}s] {detail}", dt.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
