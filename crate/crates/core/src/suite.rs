//! Named verification suites and the versioned JSON report.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::operalg::presets::{annihilation_relations, approx_relations, operator_relations, skew_relations, Relation};
use crate::superalg::checks::{superidentity_check, table_sweep, DEFAULT_GENERATORS, DEFAULT_SEED, DEFAULT_WINDOW};
use crate::superalg::SuperAlgSpec;
use crate::tideal::variety::{lie_nilpotency_identity, metabelian_identity, right_alternative_identity};
use crate::tideal::{Engine, EngineConfig, VarietySpec};
use crate::varieties::{
    allotted_check, lie_nilpotency_envelope_check, lie_nilpotency_falsifier, regular_span_check, witness_not_allotted,
};
use crate::{AlgebraError, FieldSpec, Result};

pub const REPORT_VERSION: u32 = 1;

/// Field used when none is configured: exact rationals up to degree 5.
pub fn default_field(degree: usize) -> FieldSpec {
    if degree <= 5 {
        FieldSpec::Rationals
    } else {
        FieldSpec::Prime(101)
    }
}

/// Largest degree at which rational elimination is attempted.
pub const RATIONAL_DEGREE_LIMIT: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    OperatorRelations,
    ApproxRelations,
    Superalgebra,
    Envelope,
    Witnesses,
    RegularWords,
    All,
}

impl Suite {
    pub const GROUPS: [Suite; 6] = [
        Suite::OperatorRelations,
        Suite::ApproxRelations,
        Suite::Superalgebra,
        Suite::Envelope,
        Suite::Witnesses,
        Suite::RegularWords,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::OperatorRelations => "operator_relations",
            Suite::ApproxRelations => "approx_relations",
            Suite::Superalgebra => "superalgebra",
            Suite::Envelope => "envelope",
            Suite::Witnesses => "witnesses",
            Suite::RegularWords => "regular_words",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('-', "_");
        std::iter::once(Suite::All)
            .chain(Suite::GROUPS)
            .find(|g| g.name() == s)
            .ok_or_else(|| AlgebraError::Config(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub max_degree: usize,
    /// `None` picks [`default_field`] per check.
    pub field: Option<FieldSpec>,
    pub k: usize,
    pub window: (u32, u32),
    pub jmax: u32,
    pub seed: u64,
    pub generators: u32,
    pub trials: usize,
    /// Restricts the superalgebra, envelope and witness suites to one `n`.
    pub n: Option<u32>,
    pub jobs: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: Suite::All,
            max_degree: 6,
            field: None,
            k: 1,
            window: DEFAULT_WINDOW,
            jmax: 8,
            seed: DEFAULT_SEED,
            generators: DEFAULT_GENERATORS,
            trials: 100,
            n: None,
            jobs: 1,
        }
    }
}

impl SuiteConfig {
    fn n_range(&self) -> Vec<u32> {
        match self.n {
            Some(n) => vec![n],
            None => (2..=6).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.jobs == 0 {
            return Err(AlgebraError::Config("--jobs must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(AlgebraError::Config("k must be at least 1".into()));
        }
        if let Some(n) = self.n {
            if !(2..=12).contains(&n) {
                return Err(AlgebraError::Config(format!("n = {n} outside 2..=12")));
            }
        }
        if self.generators < 2 || self.generators > crate::superalg::grassmann::MAX_GENERATORS {
            return Err(AlgebraError::Config(format!(
                "{} Grassmann generators unsupported",
                self.generators
            )));
        }
        if let Some(FieldSpec::Prime(p)) = self.field {
            FieldSpec::Prime(p).check_degree(self.max_degree, false)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub suite: Suite,
    pub status: Status,
    pub mandatory: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub field: Option<FieldSpec>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub dims: BTreeMap<String, usize>,
    pub duration_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CheckResult {
    fn new(id: impl Into<String>, suite: Suite, status: Status) -> Self {
        CheckResult {
            id: id.into(),
            suite,
            status,
            mandatory: true,
            degree: None,
            field: None,
            dims: BTreeMap::new(),
            duration_ms: 0.0,
            witness: None,
            note: None,
        }
    }

    fn pass_if(id: impl Into<String>, suite: Suite, ok: bool) -> Self {
        CheckResult::new(id, suite, if ok { Status::Pass } else { Status::Fail })
    }

    fn failed(id: impl Into<String>, suite: Suite, err: &AlgebraError) -> Self {
        let mut r = CheckResult::new(id, suite, Status::Fail);
        r.note = Some(err.to_string());
        r
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.note = Some(s.into());
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub unverified: usize,
    pub mandatory_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub report_version: u32,
    pub tool_version: String,
    pub config: SuiteConfig,
    pub results: Vec<CheckResult>,
    pub summary: Summary,
}

impl ReportDocument {
    pub fn success(&self) -> bool {
        self.summary.mandatory_failures == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| AlgebraError::Config(format!("malformed report: {e}")))
    }

    /// The report with every duration zeroed.
    pub fn without_durations(&self) -> ReportDocument {
        let mut out = self.clone();
        for r in &mut out.results {
            r.duration_ms = 0.0;
        }
        out
    }
}

type JobFn = Box<dyn Fn(&Engine, &SuiteConfig) -> CheckResult + Send + Sync>;

struct Job {
    id: String,
    suite: Suite,
    run: JobFn,
}

impl Job {
    fn new(
        id: impl Into<String>,
        suite: Suite,
        run: impl Fn(&Engine, &SuiteConfig) -> CheckResult + Send + Sync + 'static,
    ) -> Self {
        Job {
            id: id.into(),
            suite,
            run: Box::new(run),
        }
    }
}

/// Resolves the field for a membership test of degree `d`, or explains why
/// the check is capped.
fn field_for(config: &SuiteConfig, d: usize) -> std::result::Result<FieldSpec, String> {
    if d > config.max_degree {
        return Err(format!("degree {d} exceeds --max-degree {}", config.max_degree));
    }
    let field = config.field.unwrap_or_else(|| default_field(d));
    if field == FieldSpec::Rationals && d > RATIONAL_DEGREE_LIMIT {
        return Err(format!("rational elimination capped at degree {RATIONAL_DEGREE_LIMIT}"));
    }
    Ok(field)
}

fn unverified(id: &str, suite: Suite, degree: usize, why: String) -> CheckResult {
    let mut r = CheckResult::new(id, suite, Status::Unverified).note(why);
    r.degree = Some(degree);
    r
}

/// Relations past the first-tier degrees: failing to reach them is never a
/// failure of the suite.
const EXTENDED_TIER: [&str; 2] = ["eq11", "eq12_t1"];

fn relation_job(rel: Relation, suite: Suite) -> Job {
    let id = rel.id.clone();
    Job::new(id.clone(), suite, move |engine, config| {
        let d = rel.test_degree();
        let field = match field_for(config, d) {
            Ok(f) => f,
            Err(why) => return unverified(&id, suite, d, why),
        };
        let mut r = match rel.holds(engine, field) {
            Ok(holds) => {
                let mut r = CheckResult::pass_if(&id, suite, holds == rel.expect);
                if !rel.expect {
                    r.note = Some(format!(
                        "negative control: {}",
                        if holds { "vanished" } else { "does not vanish" }
                    ));
                }
                if holds != rel.expect {
                    r.witness = Some(rel.poly.to_string());
                }
                r
            }
            Err(AlgebraError::DegreeCapExceeded { degree, cap }) => {
                return unverified(&id, suite, degree, format!("degree {degree} exceeds the cap {cap}"))
            }
            Err(e) => CheckResult::failed(&id, suite, &e),
        };
        r.mandatory = !EXTENDED_TIER.contains(&id.as_str());
        if !r.mandatory && r.status == Status::Fail {
            r.note.get_or_insert_with(|| "extended tier".into());
        }
        r.degree = Some(d);
        r.field = Some(field);
        if let Ok(b) = engine.component_basis(&rel.variety, d, field) {
            r.dims.insert("quotient".into(), b.quotient_dim());
        }
        r
    })
}

fn operator_jobs() -> Vec<Job> {
    operator_relations()
        .into_iter()
        .map(|r| relation_job(r, Suite::OperatorRelations))
        .collect()
}

fn approx_jobs(config: &SuiteConfig) -> Vec<Job> {
    let suite = Suite::ApproxRelations;
    let mut jobs: Vec<Job> = approx_relations()
        .into_iter()
        .chain(skew_relations())
        .chain(annihilation_relations())
        .map(|r| relation_job(r, suite))
        .collect();
    let k = config.k;
    for (n, variety, expect) in [
        (2usize, VarietySpec::ral(2), true),
        (3, VarietySpec::ral(3), true),
        (2, VarietySpec::ra2(), false),
    ] {
        let id = format!("allotted_n{n}_{}", variety.name());
        jobs.push(Job::new(id.clone(), suite, move |engine, config| {
            let d = n + 1 + 2 * k;
            let field = match field_for(config, d) {
                Ok(f) => f,
                Err(why) => return unverified(&id, suite, d, why),
            };
            let mut r = match allotted_check(engine, n, &variety, k, field) {
                Ok(holds) => CheckResult::pass_if(&id, suite, holds == expect),
                Err(AlgebraError::DegreeCapExceeded { degree, cap }) => {
                    return unverified(&id, suite, degree, format!("degree {degree} exceeds the cap {cap}"))
                }
                Err(e) => CheckResult::failed(&id, suite, &e),
            };
            if !expect {
                r.note = Some("negative control".into());
            }
            r.degree = Some(d);
            r.field = Some(field);
            r
        }));
    }
    jobs
}

fn superalgebra_jobs(config: &SuiteConfig) -> Vec<Job> {
    let suite = Suite::Superalgebra;
    let mut jobs = vec![Job::new("table_relations", suite, move |_, config| {
        let rep = table_sweep(config.window);
        let mut r = CheckResult::pass_if("table_relations", suite, rep.passed());
        r.dims.insert("cases".into(), rep.cases);
        if let Some(first) = rep.failures.first() {
            r.witness = Some(first.clone());
        }
        r
    })];
    for eps in 0..=1u8 {
        let id = format!("superized_right_alternative_A({eps})");
        jobs.push(Job::new(id.clone(), suite, move |_, config| match superidentity_check(
            &right_alternative_identity(),
            &SuperAlgSpec::full(eps),
            config.window,
            false,
        ) {
            Ok(c) => {
                let mut r = CheckResult::pass_if(&id, suite, c.holds);
                r.dims.insert("substitutions".into(), c.substitutions);
                r.witness = c.witness.map(|w| format!("{w:?}"));
                r
            }
            Err(e) => CheckResult::failed(&id, suite, &e),
        }));
    }
    for n in config.n_range() {
        let id = format!("superidentities_A<{n}>");
        jobs.push(Job::new(id.clone(), suite, move |_, config| {
            let spec = SuperAlgSpec::quotient(n);
            let ids = [
                ("right_alternative", right_alternative_identity()),
                ("metabelian", metabelian_identity()),
                ("lie_nilpotency", lie_nilpotency_identity(n as usize)),
            ];
            let mut r = CheckResult::pass_if(&id, suite, true);
            for (name, f) in ids {
                match superidentity_check(&f, &spec, config.window, false) {
                    Ok(c) => {
                        r.dims.insert(format!("{name}_substitutions"), c.substitutions);
                        if !c.holds {
                            r.status = Status::Fail;
                            r.witness.get_or_insert_with(|| format!("{name}: {:?}", c.witness));
                        }
                    }
                    Err(e) => return CheckResult::failed(&id, suite, &e),
                }
            }
            r
        }));
    }
    jobs
}

fn envelope_jobs(config: &SuiteConfig) -> Vec<Job> {
    let suite = Suite::Envelope;
    let mut jobs = Vec::new();
    for n in config.n_range() {
        let id = format!("envelope_A<{n}>");
        jobs.push(Job::new(
            id.clone(),
            suite,
            move |_, config| match lie_nilpotency_envelope_check(n, config.generators, config.trials, config.seed) {
                Ok(checks) => {
                    let mut r = CheckResult::pass_if(&id, suite, checks.iter().all(|(_, c)| c.holds));
                    for (name, c) in &checks {
                        r.dims.insert(format!("{name}_nonzero"), c.nonzero_evaluations);
                        if let Some((subst, value)) = &c.witness {
                            let s: Vec<String> = subst.iter().map(|(v, e)| format!("x{v} = {e}")).collect();
                            r.witness
                                .get_or_insert_with(|| format!("{name}: {} gives {value}", s.join("; ")));
                        }
                    }
                    r
                }
                Err(e) => CheckResult::failed(&id, suite, &e),
            },
        ));
        let id = format!("lie_nilpotency_step{}_fails_A<{n}>", n - 1);
        jobs.push(Job::new(
            id.clone(),
            suite,
            move |_, config| match lie_nilpotency_falsifier(n, config.generators) {
                Ok((subst, value)) => {
                    let s: Vec<String> = subst.iter().map(|(v, e)| format!("x{v} = {e}")).collect();
                    let mut r = CheckResult::pass_if(&id, suite, true);
                    r.witness = Some(format!("{} gives {value}", s.join("; ")));
                    r
                }
                Err(e) => CheckResult::failed(&id, suite, &e),
            },
        ));
    }
    jobs
}

fn witness_jobs(config: &SuiteConfig) -> Vec<Job> {
    let suite = Suite::Witnesses;
    config
        .n_range()
        .into_iter()
        .map(|n| {
            let id = format!("not_allotted_A<{n}>");
            Job::new(id.clone(), suite, move |_, config| {
                match witness_not_allotted(n, config.jmax) {
                    Ok(w) => {
                        let mut r = CheckResult::pass_if(&id, suite, true);
                        r.dims.insert("chain_length".into(), w.chain.len());
                        let vals: Vec<String> = w.values.iter().map(|(j, v, _)| format!("j={j}: {v}")).collect();
                        r.witness = Some(vals.join("; "));
                        r
                    }
                    Err(e) => CheckResult::failed(&id, suite, &e),
                }
            })
        })
        .collect()
}

/// Span verdict per degree for `n`, with dimensions over two fields where
/// both are available.
fn regular_words_job(n: usize) -> Job {
    let suite = Suite::RegularWords;
    let id = format!("regular_words_n{n}");
    Job::new(id.clone(), suite, move |engine, config| {
        let variety = VarietySpec::ral(n);
        let mut r = CheckResult::new(&id, suite, Status::Pass);
        let mut verdicts = Vec::new();
        let mut mismatch = None;
        for d in 3..=config.max_degree {
            let fields: Vec<FieldSpec> = match config.field {
                Some(f) => vec![f],
                None if d <= 5 => vec![FieldSpec::Rationals, FieldSpec::Prime(101)],
                None => vec![FieldSpec::Prime(101), FieldSpec::Prime(103)],
            };
            let mut first = None;
            for field in fields {
                let rep = match regular_span_check(engine, d, n, &variety, field) {
                    Ok(rep) => rep,
                    Err(e) => return CheckResult::failed(&id, suite, &e),
                };
                match first {
                    None => {
                        r.dims.insert(format!("d{d}_dim"), rep.dim);
                        r.dims.insert(format!("d{d}_words_rank"), rep.words_rank);
                        verdicts.push((d, rep.spanned(), rep.dim));
                        first = Some((rep.dim, rep.words_rank));
                    }
                    Some(prev) => {
                        if prev != (rep.dim, rep.words_rank) && mismatch.is_none() {
                            mismatch = Some(format!("d={d}: {prev:?} differs over {field}"));
                        }
                    }
                }
            }
        }
        // smallest d0 from which every tested degree is spanned
        let d0 = verdicts
            .iter()
            .rev()
            .take_while(|(_, ok, _)| *ok)
            .last()
            .map(|(d, _, _)| *d);
        let bound_ok = match d0 {
            Some(d0) => verdicts
                .iter()
                .filter(|(d, _, _)| *d >= d0)
                .all(|(d, _, dim)| *dim <= crate::varieties::regular_word_count(*d, n)),
            None => false,
        };
        if let Some(d0) = d0 {
            r.dims.insert("d0".into(), d0);
        }
        let spanned_after: Vec<usize> = verdicts.iter().filter(|v| v.1).map(|v| v.0).collect();
        let first_spanned = spanned_after.first().copied();
        if first_spanned.is_some() && first_spanned != d0 {
            r.note = Some(format!("spanning is not monotone: spanned at {spanned_after:?}"));
        }
        r.status = if d0.is_some() && bound_ok && mismatch.is_none() {
            Status::Pass
        } else {
            Status::Fail
        };
        if let Some(m) = mismatch {
            r.witness = Some(m);
        }
        r.degree = Some(config.max_degree);
        r.field = config.field;
        r
    })
}

fn jobs_for(config: &SuiteConfig) -> Vec<Job> {
    let groups: Vec<Suite> = match config.suite {
        Suite::All => Suite::GROUPS.to_vec(),
        s => vec![s],
    };
    let mut jobs = Vec::new();
    for g in groups {
        match g {
            Suite::OperatorRelations => jobs.extend(operator_jobs()),
            Suite::ApproxRelations => jobs.extend(approx_jobs(config)),
            Suite::Superalgebra => jobs.extend(superalgebra_jobs(config)),
            Suite::Envelope => jobs.extend(envelope_jobs(config)),
            Suite::Witnesses => jobs.extend(witness_jobs(config)),
            Suite::RegularWords => jobs.extend([2, 3].map(regular_words_job)),
            Suite::All => unreachable!(),
        }
    }
    jobs
}

/// Runs the configured suite on a pool of `config.jobs` workers; results
/// keep their declaration order.
pub fn run_suite_with(engine: &Engine, config: &SuiteConfig) -> Result<ReportDocument> {
    config.validate()?;
    let jobs = jobs_for(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| AlgebraError::Config(format!("worker pool: {e}")))?;
    let results: Vec<CheckResult> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let start = Instant::now();
                let mut r = (job.run)(engine, config);
                debug_assert_eq!(r.id, job.id);
                r.suite = job.suite;
                r.duration_ms = (start.elapsed().as_secs_f64() * 1e3 * 1e3).round() / 1e3;
                r
            })
            .collect()
    });
    let mut summary = Summary {
        total: results.len(),
        ..Summary::default()
    };
    for r in &results {
        match r.status {
            Status::Pass => summary.passed += 1,
            Status::Fail => {
                summary.failed += 1;
                if r.mandatory {
                    summary.mandatory_failures += 1;
                }
            }
            Status::Unverified => summary.unverified += 1,
        }
    }
    Ok(ReportDocument {
        report_version: REPORT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        results,
        summary,
    })
}

/// [`run_suite_with`] on a fresh engine whose degree cap is the configured
/// maximum degree.
pub fn run_suite(config: &SuiteConfig) -> Result<ReportDocument> {
    let engine = Engine::new(EngineConfig {
        degree_cap: config.max_degree,
        ..EngineConfig::default()
    });
    run_suite_with(&engine, config)
}
