use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use metabel::freealg::MultiPoly;
use metabel::operalg::presets::{annihilation_relations, approx_relations, operator_relations, skew_relations};
use metabel::parse::{parse_envelope_substitution, parse_poly};
use metabel::suite::{default_field, run_suite_with, ReportDocument, Status, Suite, SuiteConfig};
use metabel::superalg::checks::{envelope_identity_check, superidentity_check, DEFAULT_GENERATORS, DEFAULT_SEED};
use metabel::superalg::envelope::evaluate;
use metabel::superalg::{superize, superize_sign_rule, SuperAlgSpec};
use metabel::tideal::{Engine, EngineConfig, LinBasis, VarietySpec};
use metabel::varieties::{
    allotted_check, lie_nilpotency_falsifier, regular_span_check, regular_words, witness_not_allotted,
};
use metabel::FieldSpec;

// stdout writes that report a closed pipe as an error instead of panicking
macro_rules! out {
    ($($arg:tt)*) => { write!(std::io::stdout(), $($arg)*)? };
}
macro_rules! outln {
    ($($arg:tt)*) => { writeln!(std::io::stdout(), $($arg)*)? };
}

#[derive(Parser)]
#[command(
    name = "metabel",
    version,
    about = "Exact identity checks for right alternative metabelian algebras"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Largest degree any membership test may reach.
    #[arg(long, global = true, default_value_t = 6)]
    max_degree: usize,
    /// `q` or `fp:<p>`; by default `q` up to degree 5 and `fp:101` beyond.
    #[arg(long, global = true)]
    field: Option<FieldSpec>,
    /// Directory for persisted component bases.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

/// Polynomial input: inline text or a file (`-` for stdin), one
/// `<scalar> <term>` per line.
#[derive(Args)]
struct PolyInput {
    #[arg(long, conflicts_with = "input")]
    expr: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
}

impl PolyInput {
    fn read(&self) -> Result<MultiPoly> {
        let text = match (&self.expr, &self.input) {
            (Some(e), _) => e.replace(';', "\n"),
            (None, Some(p)) => read_text(p)?,
            (None, None) => bail!("give a polynomial with --expr or --input"),
        };
        Ok(parse_poly(&text)?)
    }
}

fn read_text(p: &Path) -> Result<String> {
    if p == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
    }
}

fn parse_window(s: &str) -> std::result::Result<(u32, u32), String> {
    let (i, j) = s.split_once(',').ok_or("expected I,J")?;
    Ok((
        i.trim().parse().map_err(|e| format!("{e}"))?,
        j.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

/// `A^(e)` with `--epsilon`, or the quotient `A<n>` with `--n`.
#[derive(Args)]
struct SuperTarget {
    #[arg(long, conflicts_with = "epsilon")]
    n: Option<u32>,
    #[arg(long)]
    epsilon: Option<u8>,
}

impl SuperTarget {
    fn spec(&self) -> Result<SuperAlgSpec> {
        match (self.n, self.epsilon) {
            (Some(n), _) if n >= 1 => Ok(SuperAlgSpec::quotient(n)),
            (None, Some(e)) if e <= 1 => Ok(SuperAlgSpec::full(e)),
            (None, None) => Ok(SuperAlgSpec::full(1)),
            _ => bail!("--n must be positive and --epsilon 0 or 1"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// T-ideal membership of a polynomial.
    Member {
        #[arg(long, default_value = "ra2")]
        variety: VarietySpec,
        #[command(flatten)]
        poly: PolyInput,
    },
    /// Normal form modulo the T-ideal.
    Nf {
        #[arg(long, default_value = "ra2")]
        variety: VarietySpec,
        #[command(flatten)]
        poly: PolyInput,
    },
    /// `f ≈ 0` with `2k` appended right multiplications.
    Approx {
        #[arg(long, default_value = "ra2")]
        variety: VarietySpec,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        poly: PolyInput,
    },
    /// Dimension of the multilinear component of the relatively free algebra.
    Dim {
        #[arg(long, default_value = "ra2")]
        variety: VarietySpec,
        #[arg(long)]
        degree: usize,
    },
    /// Named operator and ≈ relations; all of them without `--id`.
    Opcheck {
        #[arg(long)]
        id: Option<String>,
    },
    /// Superidentity check of a multilinear polynomial on a window of basis symbols.
    Supercheck {
        #[command(flatten)]
        target: SuperTarget,
        #[arg(long, value_parser = parse_window, default_value = "6,8")]
        window: (u32, u32),
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        poly: PolyInput,
    },
    /// Evaluates a polynomial in the Grassmann envelope, on a substitution file
    /// or on seeded random elements.
    EnvelopeEval {
        #[command(flatten)]
        target: SuperTarget,
        #[arg(long, default_value_t = DEFAULT_GENERATORS)]
        generators: u32,
        /// Lines `x<i> = <envelope element>`.
        #[arg(long)]
        subst: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        poly: PolyInput,
    },
    /// Superization for a parity pattern such as `011`.
    Superize {
        #[arg(long)]
        parities: String,
        #[command(flatten)]
        poly: PolyInput,
    },
    /// Rank of the regular words against the dimension of `P_{d,n}` in RA-L(n).
    RegularSpan {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        list: bool,
    },
    /// Supercommutator chains showing `A<n>` is not `(n-1)`-allotted.
    Witness {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 8)]
        jmax: u32,
        #[arg(long, default_value_t = DEFAULT_GENERATORS)]
        generators: u32,
    },
    /// `φ ≈ 0` for the allotted relation of `n`.
    Allotted {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Defaults to `ral:<n>`.
        #[arg(long)]
        variety: Option<VarietySpec>,
    },
    /// Runs a named suite and writes the JSON report.
    #[command(alias = "suite")]
    Run {
        #[arg(default_value = "all")]
        suite: Suite,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_parser = parse_window, default_value = "6,8")]
        window: (u32, u32),
        #[arg(long, default_value_t = 8)]
        jmax: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_GENERATORS)]
        generators: u32,
        #[arg(long)]
        n: Option<u32>,
    },
    /// Cache management.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Builds and stores one component basis.
    Build {
        #[arg(long, default_value = "ra2")]
        variety: VarietySpec,
        #[arg(long)]
        degree: usize,
    },
    /// Lists cached bases.
    List,
    /// Removes every cached basis.
    Clear,
}

impl Common {
    fn engine(&self) -> Engine {
        Engine::new(EngineConfig {
            degree_cap: self.max_degree,
            cache_dir: self.cache_dir.clone(),
            ..EngineConfig::default()
        })
    }

    fn field_for(&self, degree: usize) -> FieldSpec {
        self.field.unwrap_or_else(|| default_field(degree))
    }

    fn cache_dir(&self) -> Result<&Path> {
        self.cache_dir.as_deref().context("--cache-dir is required")
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "true"
    } else {
        "false"
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let common = &cli.common;
    match cli.command {
        Command::Member { variety, poly } => {
            let f = poly.read()?;
            let field = common.field_for(f.degree());
            outln!("{}", verdict(common.engine().member(&f, &variety, field)?));
        }
        Command::Nf { variety, poly } => {
            let f = poly.read()?;
            let field = common.field_for(f.degree());
            let nf = common.engine().normal_form(&f, &variety, field)?;
            for (t, c) in nf.terms() {
                outln!("{} {t}", metabel::scalar::format_rational(c));
            }
            if nf.is_zero() {
                outln!("0");
            }
        }
        Command::Approx { variety, k, poly } => {
            let f = poly.read()?;
            let field = common.field_for(f.degree() + 2 * k);
            outln!("{}", verdict(common.engine().approx_zero(&f, &variety, k, field)?));
        }
        Command::Dim { variety, degree } => {
            let field = common.field_for(degree);
            let b = common.engine().component_basis(&variety, degree, field)?;
            outln!("variety {variety} degree {degree} field {field}");
            outln!("monomials {}", b.total_monomials());
            outln!("ideal {}", b.ideal_dim());
            outln!("quotient {}", b.quotient_dim());
        }
        Command::Opcheck { id } => {
            let engine = common.engine();
            let all: Vec<_> = operator_relations()
                .into_iter()
                .chain(approx_relations())
                .chain(skew_relations())
                .chain(annihilation_relations())
                .filter(|r| id.as_deref().is_none_or(|i| r.id == i))
                .collect();
            if all.is_empty() {
                bail!("no relation named {}", id.unwrap_or_default());
            }
            let mut failed = false;
            for r in all {
                let d = r.test_degree();
                if d > common.max_degree {
                    outln!("{:<24} unverified (degree {d})", r.id);
                    continue;
                }
                let ok = r.check(&engine, common.field_for(d))?;
                failed |= !ok;
                outln!("{:<24} {} {}", r.id, if ok { "pass" } else { "fail" }, r.statement);
            }
            if failed {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Supercheck {
            target,
            window,
            exhaustive,
            poly,
        } => {
            let f = poly.read()?;
            let c = superidentity_check(&f, &target.spec()?, window, exhaustive)?;
            outln!("{} ({} substitutions)", verdict(c.holds), c.substitutions);
            if let Some((assignment, value)) = c.witness {
                let a: Vec<String> = assignment.iter().map(|(v, s)| format!("x{v}={s}")).collect();
                outln!("witness {} -> {value}", a.join(" "));
            }
        }
        Command::EnvelopeEval {
            target,
            generators,
            subst,
            trials,
            seed,
            poly,
        } => {
            let f = poly.read()?;
            let spec = target.spec()?;
            match subst {
                Some(p) => {
                    let values = parse_envelope_substitution(&read_text(&p)?, generators)?;
                    outln!("{}", evaluate(&f, &values, generators, &spec)?);
                }
                None => {
                    let c = envelope_identity_check(&f, &spec, generators, trials, seed)?;
                    outln!(
                        "{} ({} of {} trials nonzero)",
                        verdict(c.holds),
                        c.nonzero_evaluations,
                        c.trials
                    );
                    if let Some((values, value)) = c.witness {
                        for (v, e) in values {
                            outln!("x{v} = {e}");
                        }
                        outln!("value {value}");
                    }
                }
            }
        }
        Command::Superize { parities, poly } => {
            let f = poly.read()?;
            let p: Vec<u8> = parities
                .chars()
                .map(|c| c.to_digit(2).map(|d| d as u8).context("parities are 0/1 digits"))
                .collect::<Result<_>>()?;
            let s = superize(&f, &p)?;
            if s != superize_sign_rule(&f, &p)? {
                bail!("envelope and sign-rule superizations disagree");
            }
            for (t, c) in s.poly.terms() {
                outln!("{} {t}", metabel::scalar::format_rational(c));
            }
        }
        Command::RegularSpan { n, degree, list } => {
            if list {
                for w in regular_words(degree, n) {
                    outln!("type {} {w}", w.type_number());
                }
            }
            let field = common.field_for(degree);
            let r = regular_span_check(&common.engine(), degree, n, &VarietySpec::ral(n), field)?;
            outln!(
                "n {n} degree {degree} field {field}: {} words, rank {}, dim {}, spanned {}",
                r.words,
                r.words_rank,
                r.dim,
                verdict(r.spanned())
            );
        }
        Command::Witness { n, jmax, generators } => {
            let w = witness_not_allotted(n, jmax)?;
            for link in &w.chain {
                outln!("step {}: {}", link.step, link.value);
            }
            for (j, v, _) in &w.values {
                outln!("R_X^{j}: {v}");
            }
            let (values, value) = lie_nilpotency_falsifier(n, generators)?;
            outln!("step-{} Lie nilpotency fails on G(A<{n}>):", n - 1);
            for (v, e) in values {
                outln!("  x{v} = {e}");
            }
            outln!("  value {value}");
        }
        Command::Allotted { n, k, variety } => {
            let variety = variety.unwrap_or_else(|| VarietySpec::ral(n));
            let field = common.field_for(n + 1 + 2 * k);
            outln!("{}", verdict(allotted_check(&common.engine(), n, &variety, k, field)?));
        }
        Command::Run {
            suite,
            report,
            k,
            window,
            jmax,
            seed,
            trials,
            generators,
            n,
        } => {
            let config = SuiteConfig {
                suite,
                max_degree: common.max_degree,
                field: common.field,
                k,
                window,
                jmax,
                seed,
                generators,
                trials,
                n,
                jobs: common.jobs,
            };
            let doc = run_suite_with(&common.engine(), &config)?;
            print_report(&doc)?;
            if let Some(path) = report {
                fs::write(&path, doc.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
            }
            if !doc.success() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Cache { action } => {
            let dir = common.cache_dir()?;
            match action {
                CacheAction::Build { variety, degree } => {
                    let field = common.field_for(degree);
                    let (basis, stats) = LinBasis::build(&variety, degree, field)?;
                    fs::create_dir_all(dir)?;
                    let path = Engine::cache_path(dir, &variety, degree, field);
                    basis.write_cache(&path)?;
                    outln!(
                        "{} ({} rows, {:.2}s)",
                        path.display(),
                        basis.projected_rank(),
                        stats.seconds
                    );
                }
                CacheAction::List => {
                    for p in cached_files(dir)? {
                        outln!("{} {} bytes", p.display(), fs::metadata(&p)?.len());
                    }
                }
                CacheAction::Clear => {
                    let files = cached_files(dir)?;
                    for p in &files {
                        fs::remove_file(p)?;
                    }
                    outln!("removed {} files", files.len());
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cached_files(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut out: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "basis"))
        .collect();
    out.sort();
    Ok(out)
}

fn print_report(doc: &ReportDocument) -> Result<()> {
    for r in &doc.results {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Unverified => "unverified",
        };
        let field = r.field.map(|f| f.to_string()).unwrap_or_default();
        out!("{:<18} {:<36} {:<10} {:>5}", r.suite.name(), r.id, status, field);
        if let Some(note) = &r.note {
            out!("  {note}");
        }
        outln!();
        if r.status == Status::Fail {
            if let Some(w) = &r.witness {
                outln!("    witness: {w}");
            }
        }
    }
    let s = &doc.summary;
    outln!(
        "{} checks: {} passed, {} failed, {} unverified",
        s.total,
        s.passed,
        s.failed,
        s.unverified
    );
    Ok(())
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<std::io::Error>())
        .any(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
