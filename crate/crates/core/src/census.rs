//! Per-group pipeline behind the command-line census.
//!
//! A record is assembled in a fixed order from the signature, the
//! non-discreteness tests, the G-procedure with its Poincaré checks, the
//! presentation and cusp tables and the arithmeticity criterion. Every
//! field is either a value or `{"skipped": reason}`. Wall-clock timings are
//! returned separately so that the canonical report is reproducible.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{arithmeticity_flag, galois_orbit_forms, ArithmeticityFlag};
use crate::cyclofield::CycNum;
use crate::dirichlet::{
    cusp_report, cusp_table, cycle_angles, facet_csv, facet_svg, g_procedure, isometry_classes, parse_center,
    side_pairing_check, Behaviour, DirichletError, Limits, ProcedureOutcome,
};
use crate::discretetest::{cited_nondiscrete, test_group, Outcome};
use crate::hermlinalg::signature_exact;
use crate::hp::format_sig;
use crate::spgroups::{hermitian_form, presentation_table, sporadic, SporadicId, TriangleGroup};

pub const SCHEMA_VERSION: u32 = 1;

/// A value, or the reason it was not computed.
#[derive(Debug, Clone)]
pub enum Entry<T> {
    Done(T),
    Skipped(String),
}

impl<T> Entry<T> {
    pub fn skipped(reason: impl Into<String>) -> Self {
        Entry::Skipped(reason.into())
    }

    pub fn done(&self) -> Option<&T> {
        match self {
            Entry::Done(t) => Some(t),
            Entry::Skipped(_) => None,
        }
    }
}

impl<T: Serialize> Serialize for Entry<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            Entry::Done(t) => t.serialize(s),
            Entry::Skipped(r) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("skipped", r)?;
                m.end()
            }
        }
    }
}

/// When the G-procedure runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DirichletMode {
    /// Only for hyperbolic groups without a non-discreteness verdict.
    Auto,
    All,
    Off,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub p_min: u32,
    pub p_max: u32,
    pub taus: Vec<SporadicId>,
    pub limits: Limits,
    pub precision_bits: usize,
    pub center_override: Option<String>,
    pub dirichlet: DirichletMode,
    pub all_families: bool,
    /// Use literature verdicts where the engine's tests are inconclusive.
    pub cited: bool,
    /// Keep SVG and CSV pictures of one facet per isometry class.
    pub collect_faces: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p_min: 2,
            p_max: 24,
            taus: SporadicId::all(),
            limits: Limits::default(),
            precision_bits: crate::discretetest::CONFIRM_BITS,
            center_override: None,
            dirichlet: DirichletMode::Auto,
            all_families: false,
            cited: true,
            collect_faces: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessSummary {
    pub quantity: String,
    pub value: String,
    pub violates: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct NondiscreteSummary {
    pub verdict: String,
    pub family: Option<String>,
    pub witness: Option<WitnessSummary>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsometryClassSummary {
    pub cosh2_distance: String,
    pub classes: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirichletSummary {
    pub center: String,
    pub steps: usize,
    pub words_per_step: Vec<usize>,
    pub cap: Option<String>,
    pub generic_faces: usize,
    pub complex_faces: usize,
    /// Words γ whose bisectors carry a non-empty 2-face.
    pub face_words: Vec<String>,
    pub isometry_classes: Vec<IsometryClassSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairingSummary {
    pub all_matched: bool,
    pub facets: usize,
    pub unmatched: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CycleSummary {
    pub ridge: [String; 2],
    pub cycle_word: String,
    pub closed: bool,
    pub angle: Option<String>,
    /// The angle as a multiple of π, "a/b".
    pub angle_pi_ratio: Option<String>,
    pub integral: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationSummary {
    pub checked: usize,
    pub holding: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CuspSummary {
    pub designated: String,
    pub relations_hold: bool,
    pub parabolic: bool,
    pub common_fixed_point: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArithSummary {
    pub satisfied: bool,
    pub conductor: u64,
    pub witness_t: Option<u64>,
    pub witness_signature: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusRecord {
    pub p: u32,
    pub tau: String,
    pub tau_exact: CycNum,
    pub tau_value: [String; 2],
    pub signature: String,
    pub nondiscreteness: Entry<NondiscreteSummary>,
    /// "A", "B", "C" or "skipped".
    pub behaviour: String,
    pub dirichlet: Entry<DirichletSummary>,
    pub side_pairing: Entry<PairingSummary>,
    pub cycles: Entry<Vec<CycleSummary>>,
    pub relations: Entry<RelationSummary>,
    pub cusps: Entry<Vec<CuspSummary>>,
    pub arithmeticity: Entry<ArithSummary>,
    /// Pipeline errors; a non-empty list is an internal error.
    pub errors: Vec<String>,
    #[serde(skip)]
    pub face_files: Vec<FaceFile>,
}

/// Picture of one facet: every 2-face on its bisector.
#[derive(Debug, Clone)]
pub struct FaceFile {
    pub stem: String,
    pub svg: String,
    pub csv: String,
}

impl CensusRecord {
    /// Behaviour A with every cycle closed and integral.
    pub fn is_lattice_candidate(&self) -> bool {
        self.behaviour == "A"
            && self.side_pairing.done().is_some_and(|s| s.all_matched)
            && self.cycles.done().is_some_and(|c| c.iter().all(|x| x.closed && x.integral))
    }
}

/// Seconds spent per stage of one record.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub p: u32,
    pub tau: String,
    pub nondiscreteness: f64,
    pub dirichlet: f64,
    pub tables: f64,
    pub arithmeticity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusReportFile {
    pub schema: u32,
    pub config: RunConfig,
    pub records: Vec<CensusRecord>,
}

fn summarize_dirichlet(o: &ProcedureOutcome, center: &str) -> DirichletSummary {
    DirichletSummary {
        center: center.into(),
        steps: o.steps,
        words_per_step: o.words_per_step.clone(),
        cap: o.cap.clone(),
        generic_faces: o.generic_faces().count(),
        complex_faces: o.complex_faces().count(),
        face_words: o.facets().iter().map(|w| w.to_string()).collect(),
        isometry_classes: isometry_classes(o)
            .into_iter()
            .map(|(c2, cls)| IsometryClassSummary {
                cosh2_distance: format_sig(c2, 15),
                classes: cls.iter().map(|c| c.iter().map(|w| w.to_string()).collect()).collect(),
            })
            .collect(),
    }
}

fn behaviour_name(b: Behaviour) -> &'static str {
    match b {
        Behaviour::A => "A",
        Behaviour::B => "B",
        Behaviour::C => "C",
    }
}

/// Output of the G-procedure stage.
pub struct DirichletStage {
    pub behaviour: String,
    pub summary: DirichletSummary,
    pub pairing: Entry<PairingSummary>,
    pub cycles: Entry<Vec<CycleSummary>>,
    pub faces: Vec<FaceFile>,
}

fn face_files(o: &ProcedureOutcome, g: &TriangleGroup) -> Vec<FaceFile> {
    isometry_classes(o)
        .iter()
        .filter_map(|(_, cls)| {
            let w = &cls[0][0];
            let idx = o.domain.elements.iter().position(|e| &e.word == w)?;
            Some(FaceFile {
                stem: format!("p{}_{}_{}", g.p, g.label, w.to_string().replace('\'', "i")),
                svg: facet_svg(o, idx),
                csv: facet_csv(o, idx),
            })
        })
        .collect()
}

/// Runs the G-procedure and its checks on one group.
pub fn dirichlet_stage(
    g: &TriangleGroup,
    limits: &Limits,
    center_override: Option<&str>,
    collect_faces: bool,
) -> Result<DirichletStage, DirichletError> {
    let center = center_override.map(parse_center).transpose()?;
    let o = g_procedure(g, limits, None, center)?;
    let label = center_override.unwrap_or("default");
    let summary = summarize_dirichlet(&o, label);
    if o.behaviour != Behaviour::A {
        let why = format!("behaviour {}", behaviour_name(o.behaviour));
        return Ok(DirichletStage {
            behaviour: behaviour_name(o.behaviour).into(),
            summary,
            pairing: Entry::skipped(why.clone()),
            cycles: Entry::skipped(why),
            faces: Vec::new(),
        });
    }
    let pr = side_pairing_check(&o)?;
    let pairing = PairingSummary {
        all_matched: pr.unmatched.is_empty(),
        facets: pr.entries.len(),
        unmatched: pr.unmatched.iter().map(|w| w.to_string()).collect(),
    };
    let cycles = cycle_angles(&o)?
        .into_iter()
        .map(|c| CycleSummary {
            ridge: [c.ridge.0.to_string(), c.ridge.1.to_string()],
            cycle_word: c.cycle_word.to_string(),
            closed: c.closed,
            angle: c.rotation_angle.map(|a| a.to_string()),
            angle_pi_ratio: c.rotation_angle.and_then(|a| a.pi_ratio).map(|q| q.to_string()),
            integral: c.integral,
        })
        .collect();
    let faces = if collect_faces { face_files(&o, g) } else { Vec::new() };
    Ok(DirichletStage {
        behaviour: "A".into(),
        summary,
        pairing: Entry::Done(pairing),
        cycles: Entry::Done(cycles),
        faces,
    })
}

fn relations_for(g: &TriangleGroup, id: SporadicId) -> Entry<RelationSummary> {
    let Some(pres) = presentation_table().into_iter().find(|r| r.p == g.p && r.tau == id) else {
        return Entry::skipped("no conjectured presentation");
    };
    let failures: Vec<String> =
        pres.relations.iter().filter(|r| !crate::dirichlet::relation_holds(g, r)).cloned().collect();
    Entry::Done(RelationSummary {
        checked: pres.relations.len(),
        holding: pres.relations.len() - failures.len(),
        failures,
    })
}

fn cusps_for(g: &TriangleGroup, id: SporadicId) -> Entry<Vec<CuspSummary>> {
    let rows: Vec<_> = cusp_table().into_iter().filter(|c| c.p == g.p && c.tau == id).collect();
    if rows.is_empty() {
        return Entry::skipped("no conjectured cusps");
    }
    Entry::Done(
        cusp_report(g, &rows)
            .into_iter()
            .map(|r| CuspSummary {
                designated: r.candidate.designated.clone(),
                relations_hold: r.relations_hold.iter().all(|x| x.1),
                parabolic: r.designated_parabolic,
                common_fixed_point: r.common_fixed_point,
            })
            .collect(),
    )
}

/// Builds the record for one (p, τ).
pub fn census_record(p: u32, id: SporadicId, cfg: &RunConfig) -> (CensusRecord, Timings) {
    let tau = sporadic(id).value;
    let tv = tau.to_c64();
    let sig = signature_exact(&hermitian_form(p, &tau));
    let mut timings = Timings { p, tau: id.name(), ..Timings::default() };
    let mut rec = CensusRecord {
        p,
        tau: id.name(),
        tau_exact: tau.clone(),
        tau_value: [format_sig(tv.re, 15), format_sig(tv.im, 15)],
        signature: sig.to_string(),
        nondiscreteness: Entry::skipped("not hyperbolic"),
        behaviour: "skipped".into(),
        dirichlet: Entry::skipped("not hyperbolic"),
        side_pairing: Entry::skipped("not hyperbolic"),
        cycles: Entry::skipped("not hyperbolic"),
        relations: Entry::skipped("not hyperbolic"),
        cusps: Entry::skipped("not hyperbolic"),
        arithmeticity: Entry::skipped("not hyperbolic"),
        errors: Vec::new(),
        face_files: Vec::new(),
    };
    if !sig.is_hyperbolic() {
        return (rec, timings);
    }
    let g = match TriangleGroup::new(p, &tau, &id.name()) {
        Ok(g) => g,
        Err(e) => {
            rec.errors.push(format!("group: {e}"));
            return (rec, timings);
        }
    };

    let t = Instant::now();
    let (verdict, notes) = test_group(&g, id, cfg.all_families);
    let mut nd = NondiscreteSummary {
        verdict: match &verdict.outcome {
            Outcome::NonDiscrete(r) => format!("non-discrete ({r:?})"),
            Outcome::Cited => "cited".into(),
            Outcome::Inconclusive => "inconclusive".into(),
        },
        family: verdict.family.map(|f| f.base_word().to_string()),
        witness: verdict.witness.as_ref().map(|w| WitnessSummary {
            quantity: w.quantity.clone(),
            value: format_sig(w.value, 15),
            violates: w.violates.clone(),
        }),
        notes,
    };
    let mut nondiscrete = verdict.is_nondiscrete();
    if !nondiscrete && cfg.cited && cited_nondiscrete(id, p) {
        nd.verdict = "cited".into();
        nd.notes.push("non-discrete by earlier work".into());
        nondiscrete = true;
    }
    rec.nondiscreteness = Entry::Done(nd);
    timings.nondiscreteness = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let run = match cfg.dirichlet {
        DirichletMode::Off => Err("disabled"),
        DirichletMode::Auto if nondiscrete => Err("non-discrete"),
        _ => Ok(()),
    };
    match run {
        Err(why) => {
            rec.dirichlet = Entry::skipped(why);
            rec.side_pairing = Entry::skipped(why);
            rec.cycles = Entry::skipped(why);
        }
        Ok(()) => match dirichlet_stage(&g, &cfg.limits, cfg.center_override.as_deref(), cfg.collect_faces) {
            Ok(st) => {
                rec.behaviour = st.behaviour;
                rec.dirichlet = Entry::Done(st.summary);
                rec.side_pairing = st.pairing;
                rec.cycles = st.cycles;
                rec.face_files = st.faces;
            }
            Err(e) => {
                let why = format!("G-procedure: {e}");
                rec.errors.push(why.clone());
                rec.dirichlet = Entry::skipped(why.clone());
                rec.side_pairing = Entry::skipped(why.clone());
                rec.cycles = Entry::skipped(why);
            }
        },
    }
    timings.dirichlet = t.elapsed().as_secs_f64();

    let t = Instant::now();
    rec.relations = relations_for(&g, id);
    rec.cusps = cusps_for(&g, id);
    timings.tables = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let orbit = galois_orbit_forms(&g);
    let flag = arithmeticity_flag(&orbit);
    rec.arithmeticity = Entry::Done(match flag {
        ArithmeticityFlag::SatisfiesCriterion => {
            ArithSummary { satisfied: true, conductor: orbit.conductor, witness_t: None, witness_signature: None }
        }
        ArithmeticityFlag::FailsCriterion { witness_t, signature } => ArithSummary {
            satisfied: false,
            conductor: orbit.conductor,
            witness_t: Some(witness_t),
            witness_signature: Some(signature.to_string()),
        },
    });
    timings.arithmeticity = t.elapsed().as_secs_f64();
    (rec, timings)
}

/// Runs the census over the configured pairs, sorted by τ then p.
pub fn run_census(cfg: &RunConfig, only: Option<&[(u32, SporadicId)]>) -> (CensusReportFile, Vec<Timings>) {
    crate::discretetest::set_confirm_bits(cfg.precision_bits);
    let pairs: Vec<(u32, SporadicId)> = match only {
        Some(list) => list.to_vec(),
        None => cfg.taus.iter().flat_map(|&id| (cfg.p_min..=cfg.p_max).map(move |p| (p, id))).collect(),
    };
    let mut out: Vec<(CensusRecord, Timings)> = pairs.par_iter().map(|&(p, id)| census_record(p, id, cfg)).collect();
    out.sort_by(|a, b| (&a.0.tau, a.0.p).cmp(&(&b.0.tau, b.0.p)));
    let (records, timings) = out.into_iter().unzip();
    (CensusReportFile { schema: SCHEMA_VERSION, config: cfg.clone(), records }, timings)
}
