//! build -> classify -> classes -> group -> correspondence -> germ checks.

use rayon::prelude::*;
use realpv_core::diffring::{monomial_text, Realness};
use realpv_core::galois::{
    compute_galois_group, real_points_subgroup, verify_correspondence, CorrespondenceReport,
    RealPointsReport,
};
use realpv_core::pv::{build_pv_candidates_with, tensor_isomorphic, IsoVerdict, PVExtension, PvError, PvFlags};
use realpv_core::seqmodel::{
    default_initial, embed_ring, real_base_point, realize_real, MorphismReport, SeqEmbedding,
    SeqError,
};
use realpv_core::{GaussianAlgebraic, RealAlgebraic};
use serde::Serialize;

use crate::config::Config;
use crate::spec::SystemSpec;

pub const SCHEMA_VERSION: &str = "1.0";

type Pv = PVExtension<RealAlgebraic>;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("pv: {0}")]
    Pv(#[from] PvError),
}

/// Which stages to run after building the candidates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stages {
    pub classes: bool,
    pub galois: bool,
    pub correspondence: bool,
    pub germs: bool,
}

impl Stages {
    pub const ALL: Stages = Stages {
        classes: true,
        galois: true,
        correspondence: true,
        germs: true,
    };
    pub const NONE: Stages = Stages {
        classes: false,
        galois: false,
        correspondence: false,
        germs: false,
    };
}

#[derive(Clone, Debug, Serialize)]
pub struct SystemSummary {
    pub phi: String,
    pub a: Vec<String>,
    pub spec: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RealnessSummary {
    /// `real`, `not_real` or `unknown`.
    pub verdict: String,
    /// Cuts for real rings, elements whose squares sum to zero otherwise.
    pub detail: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub index: usize,
    pub relations: Vec<String>,
    pub twists: Vec<String>,
    pub flags: PvFlags,
    pub realness: RealnessSummary,
    pub conditional: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub first: usize,
    pub second: usize,
    /// `isomorphic`, `not_isomorphic` or `unknown`.
    pub verdict: String,
    /// `w^2 = -1` in the tensor product.
    pub certificate: Option<String>,
    /// `w` in normal form.
    pub witness: Option<String>,
    /// `T^(1)_j -> u_j T^(2)_j`.
    pub scaling: Option<Vec<String>>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classes {
    /// Candidate indices of each class of real candidates.
    pub classes: Vec<Vec<usize>>,
    pub comparisons: Vec<Comparison>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaloisSummary {
    pub candidate: usize,
    pub name: String,
    pub n: usize,
    pub invariant_factors: Vec<i64>,
    pub torus_rank: usize,
    pub order: Option<i64>,
    pub equations: Vec<String>,
    pub defined_over_c: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GermCheck {
    pub candidate: usize,
    pub x0: String,
    pub window: usize,
    /// First regular index; initial values sit there.
    pub start: usize,
    pub initial: Vec<String>,
    /// Initial values are real, found among the `±1, ±i` scalings of the
    /// relation roots at one of the first clean base points.
    pub real_initial: bool,
    pub recurrence: bool,
    pub all_real: bool,
    /// A real fundamental matrix `U B` exists on the window.
    pub realized: bool,
    pub morphism: MorphismReport,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub command: String,
    pub system: SystemSummary,
    pub config: Config,
    pub candidates: Vec<Candidate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<Classes>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub galois: Option<GaloisSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correspondence: Option<CorrespondenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub real_points: Option<RealPointsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub germ_checks: Option<Vec<GermCheck>>,
    /// Every undecided verdict met on the way.
    pub unknowns: Vec<String>,
}

fn realness_summary(r: &Option<Realness<RealAlgebraic>>) -> RealnessSummary {
    let (verdict, detail) = match r {
        Some(Realness::Real(cuts)) => ("real", cuts.iter().map(|c| c.to_string()).collect()),
        Some(Realness::NotReal(sq)) => ("not_real", sq.iter().map(|e| e.fmt_text()).collect()),
        Some(Realness::Unknown(msg)) => ("unknown", vec![msg.clone()]),
        None => ("unknown", vec!["not classified".to_string()]),
    };
    RealnessSummary {
        verdict: verdict.into(),
        detail,
    }
}

fn candidate_summary(index: usize, pv: &Pv) -> Candidate {
    Candidate {
        index,
        relations: pv.ring.relations_text(),
        twists: pv
            .twists
            .iter()
            .map(|t| format!("{:?}: {}", t.vector, t.factor))
            .collect(),
        flags: pv.flags.clone(),
        realness: realness_summary(&pv.realness),
        conditional: pv.conditional.clone(),
    }
}

fn compare(pvs: &[Pv], i: usize, j: usize) -> Result<Comparison, PvError> {
    let mut c = Comparison {
        first: i,
        second: j,
        verdict: String::new(),
        certificate: None,
        witness: None,
        scaling: None,
        reason: None,
    };
    match tensor_isomorphic(&pvs[i], &pvs[j])? {
        IsoVerdict::Isomorphic { scaling } => {
            c.verdict = "isomorphic".into();
            c.scaling = scaling.map(|u| u.iter().map(|x| x.to_string()).collect());
        }
        IsoVerdict::NotIsomorphic { witness, monomial } => {
            c.verdict = "not_isomorphic".into();
            let w = match &monomial {
                Some(m) => monomial_text(m),
                None => witness.fmt_text(),
            };
            c.certificate = Some(format!("({w})^2 = -1"));
            c.witness = Some(witness.fmt_text());
        }
        IsoVerdict::Unknown(msg) => {
            c.verdict = "unknown".into();
            c.reason = Some(msg);
        }
    }
    Ok(c)
}

fn classes(pvs: &[Pv]) -> Result<Classes, PvError> {
    let real: Vec<usize> = (0..pvs.len())
        .filter(|&i| pvs[i].flags.real == Some(true))
        .collect();
    let pairs: Vec<(usize, usize)> = real
        .iter()
        .enumerate()
        .flat_map(|(k, &i)| real[k + 1..].iter().map(move |&j| (i, j)))
        .collect();
    let comparisons: Vec<Comparison> = pairs
        .par_iter()
        .map(|&(i, j)| compare(pvs, i, j))
        .collect::<Result<_, _>>()?;
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &i in &real {
        let joined = classes.iter_mut().find(|cl| {
            comparisons
                .iter()
                .any(|c| c.first == cl[0] && c.second == i && c.verdict == "isomorphic")
        });
        match joined {
            Some(cl) => cl.push(i),
            None => classes.push(vec![i]),
        }
    }
    Ok(Classes {
        classes,
        comparisons,
    })
}

fn galois_summary(pvs: &[Pv], index: usize) -> GaloisSummary {
    let g = compute_galois_group(&pvs[index]);
    GaloisSummary {
        candidate: index,
        name: g.to_string(),
        n: g.n,
        invariant_factors: g.group.invariant_factors.clone(),
        torus_rank: g.group.torus_rank,
        order: g.group.order(),
        equations: g.group.equations_text(),
        defined_over_c: g.group.defined_over_c(),
    }
}

/// Base points tried when looking for real initial values.
pub const BASE_POINT_ATTEMPTS: usize = 8;

/// An orbit avoiding all poles and zeros of the candidate's data, with real
/// initial values when some clean base point admits them.
fn embedding_for(
    pv: &Pv,
    config: &Config,
) -> Result<(SeqEmbedding<RealAlgebraic>, Vec<GaussianAlgebraic>, bool), SeqError> {
    if let Some((emb, c)) = real_base_point(&pv.ring, config.window, BASE_POINT_ATTEMPTS)? {
        return Ok((emb, c, true));
    }
    let mut data = pv.system.a.clone();
    data.extend(pv.ring.cocycle().iter().cloned());
    let emb = SeqEmbedding::avoiding(pv.system.phi.clone(), &data, config.window);
    let c = default_initial(&pv.ring, &emb)?;
    Ok((emb, c, false))
}

/// Embeds candidate `index` into germs and cross-checks the recurrence,
/// realness and the morphism property on the window.
pub fn germ_check(pv: &Pv, index: usize, config: &Config) -> Result<GermCheck, SeqError> {
    let (emb, initial, real_init) = embedding_for(pv, config)?;
    let sol = embed_ring(&pv.ring, &emb, &initial)?;
    let recurrence = sol.embedding().verify_recurrence();
    let matrices = sol.matrices();
    let all_real = matrices.iter().flatten().flatten().all(|z| z.is_real());
    let realized = realize_real(&matrices).is_ok();
    let morphism = sol.check_morphism(config.morphism_radius);
    let must_be_real = pv.flags.real == Some(true);
    let passed = recurrence
        && realized
        && morphism.passed()
        && (!must_be_real || (real_init && all_real));
    Ok(GermCheck {
        candidate: index,
        x0: emb.x0.to_string(),
        window: config.window,
        start: sol.embedding().start,
        initial: initial.iter().map(|c| c.to_string()).collect(),
        real_initial: real_init,
        recurrence,
        all_real,
        realized,
        morphism,
        passed,
    })
}

/// CSV of the window of `T1..Tn` for one candidate, as embedded by
/// [`germ_check`].
pub fn germ_csv(pv: &Pv, config: &Config) -> Result<String, SeqError> {
    let (emb, initial, _) = embedding_for(pv, config)?;
    let sol = embed_ring(&pv.ring, &emb, &initial)?;
    let n = pv.ring.n();
    let mut out = String::from("n,x");
    for j in 1..=n {
        out.push_str(&format!(",T{j}"));
    }
    out.push('\n');
    let start = sol.embedding().start;
    for k in start..start + config.window {
        out.push_str(&format!("{k},\"{}\"", emb.point(k)));
        for u in sol.embedding().u(k) {
            out.push_str(&format!(",\"{u}\""));
        }
        out.push('\n');
    }
    Ok(out)
}

fn collect_unknowns(report: &Report) -> Vec<String> {
    let mut out = Vec::new();
    for c in &report.candidates {
        let flags = [
            ("simple", c.flags.simple),
            ("real", c.flags.real),
            ("weak", c.flags.weak),
        ];
        for (name, v) in flags {
            if v.is_none() {
                out.push(format!("candidate {}: {name} flag undecided", c.index));
            }
        }
        if c.realness.verdict == "unknown" {
            out.push(format!("candidate {}: realness: {}", c.index, c.realness.detail.join("; ")));
        }
        if let Some(msg) = &c.conditional {
            out.push(format!("candidate {}: conditional: {msg}", c.index));
        }
    }
    if let Some(cl) = &report.classes {
        for c in cl.comparisons.iter().filter(|c| c.verdict == "unknown") {
            out.push(format!(
                "candidates {} and {}: isomorphism undecided: {}",
                c.first,
                c.second,
                c.reason.as_deref().unwrap_or("")
            ));
        }
    }
    out
}

pub fn run_pipeline(spec: &SystemSpec, config: &Config) -> Result<Report, PipelineError> {
    run_stages(spec, config, Stages::ALL, "report")
}

pub fn run_stages(
    spec: &SystemSpec,
    config: &Config,
    stages: Stages,
    command: &str,
) -> Result<Report, PipelineError> {
    let system = spec.system();
    let pvs = build_pv_candidates_with(&system, config.harness())?;
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        system: SystemSummary {
            phi: system.phi.to_string(),
            a: system.a.iter().map(|f| f.to_string()).collect(),
            spec: spec.to_string(),
        },
        config: config.clone(),
        candidates: pvs.iter().enumerate().map(|(i, p)| candidate_summary(i, p)).collect(),
        classes: None,
        galois: None,
        correspondence: None,
        real_points: None,
        germ_checks: None,
        unknowns: Vec::new(),
    };
    let focus = pvs
        .iter()
        .position(|p| p.flags.real == Some(true))
        .unwrap_or(0);
    if stages.classes {
        report.classes = Some(classes(&pvs)?);
    }
    if stages.galois {
        report.galois = Some(galois_summary(&pvs, focus));
    }
    if stages.correspondence {
        report.correspondence = Some(verify_correspondence(&pvs[focus], config.index_bound));
        report.real_points = Some(real_points_subgroup(&pvs[focus], config.index_bound));
    }
    let mut unknowns = collect_unknowns(&report);
    if stages.germs {
        let results: Vec<Result<GermCheck, SeqError>> = pvs
            .par_iter()
            .enumerate()
            .map(|(i, p)| germ_check(p, i, config))
            .collect();
        let mut checks = Vec::new();
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok(c) => checks.push(c),
                Err(e) => unknowns.push(format!("candidate {i}: germ check skipped: {e}")),
            }
        }
        report.germ_checks = Some(checks);
    }
    report.unknowns = unknowns;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_spec;

    fn run(text: &str) -> Report {
        let spec = parse_spec(text).unwrap();
        let mut config = Config::default();
        config.window = 8;
        run_pipeline(&spec, &config).unwrap()
    }

    #[test]
    fn ex1_report() {
        let r = run("phi = dilation(2); A = diag(algebraic([-2,0,1],1,2));");
        assert_eq!(r.candidates.len(), 2);
        assert_eq!(r.classes.as_ref().unwrap().classes, vec![vec![0], vec![1]]);
        let cmp = &r.classes.as_ref().unwrap().comparisons[0];
        assert_eq!(cmp.certificate.as_deref(), Some("(T1*T2^-1)^2 = -1"));
        assert_eq!(r.galois.as_ref().unwrap().name, "mu_2");
        assert_eq!(r.correspondence.as_ref().unwrap().violations, 0);
        assert!(r.germ_checks.as_ref().unwrap().iter().all(|g| g.passed));
        assert!(r.unknowns.is_empty());
    }

    #[test]
    fn trivial_report() {
        let r = run("phi = shift(1); A = diag(1);");
        assert_eq!(r.classes.as_ref().unwrap().classes.len(), 1);
        assert_eq!(r.galois.as_ref().unwrap().name, "1");
    }

    #[test]
    fn shift_two_report() {
        let r = run("phi = shift(1); A = diag(2);");
        assert_eq!(r.classes.as_ref().unwrap().classes.len(), 1);
        assert_eq!(r.galois.as_ref().unwrap().name, "Gm");
        let c = r.correspondence.as_ref().unwrap();
        assert_eq!(c.violations, 0);
        assert_eq!(c.rows.len(), 7);
        assert!(r.real_points.as_ref().unwrap().correspondence_fails);
    }
}
