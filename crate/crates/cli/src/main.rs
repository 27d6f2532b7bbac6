use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use symdet_core::expr::{parse_substitution, render, substitute_param, Expr, Format};
use symdet_core::oracle::claims::{verify_claim, verify_suite, Report};
use symdet_core::resolvent::{OperatorKind, OperatorSpec, Recursion};
use symdet_core::yukawa::{effective_action, substitute_potential, z_eff_first_term, POTENTIAL};
use symdet_core::zeta::{check_det_dimensions, ds_at_zero, integrate_by_parts_normalize, zeta_density_with, DetDensity, DiracPath, ZetaDensity};
use symdet_core::Error;

mod config;

use config::{OutputFormat, PathChoice, RecursionChoice, RunConfig};

const SCHEMA_VERSION: u32 = 1;

const GRAMMAR: &str = "Substitution NAME=EXPR. EXPR uses integers, decimals, identifiers, \
+ - * / ^ and parentheses; exponents are numbers or (p/q). V and phi are fields, pi and e \
constants, any other identifier a parameter. Example: \"V=lc*phi^2/2\".";

#[derive(Parser, Debug)]
#[command(name = "symdet", version, about = "Zeta-regularized determinants by Weyl symbol calculus")]
struct Cli {
    /// File of `key = value` lines supplying defaults for the flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Highest ħ order kept in the derivative expansion (0..=2)
    #[arg(long)]
    order: Option<usize>,
    /// Spacetime dimension; only 4 is supported
    #[arg(long)]
    dimension: Option<u32>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// ln det(−∂² + V)
    Boson {
        #[command(flatten)]
        common: Common,
        #[arg(long, help = GRAMMAR)]
        substitute: Option<String>,
    },
    /// ln det(γ·∂ + φ)
    Dirac {
        #[command(flatten)]
        common: Common,
        /// How mixed resolvent products are integrated over λ
        #[arg(long, value_enum)]
        path: Option<PathChoice>,
        /// Which bracket terms enter the resolvent recursion
        #[arg(long, value_enum)]
        recursion: Option<RecursionChoice>,
    },
    /// Large-N Yukawa effective action
    Yukawa {
        #[command(flatten)]
        common: Common,
        /// Name of the rescaled Yukawa coupling
        #[arg(long, required = true)]
        coupling: Option<String>,
        #[arg(long, value_enum)]
        recursion: Option<RecursionChoice>,
        /// Print the first field-dependent term of the kinetic coefficient instead
        #[arg(long)]
        zeff: bool,
        /// Potential used with --zeff (default V=m^2+lc*phi^2/2)
        #[arg(long, help = GRAMMAR, requires = "zeff")]
        substitute: Option<String>,
    },
    /// Numeric verification of the symbolic rules
    Verify {
        /// Run every registered claim
        #[arg(long, value_enum, required_unless_present = "claim", conflicts_with = "claim")]
        suite: Option<Suite>,
        /// Run a single claim
        #[arg(long)]
        claim: Option<String>,
        #[arg(long, env = "SYMDET_SEED")]
        seed: Option<u64>,
        /// Number of samples for --claim
        #[arg(long, requires = "claim")]
        samples: Option<usize>,
        /// Tolerance for --claim
        #[arg(long, requires = "claim")]
        tol: Option<f64>,
        /// text: summary table; json: one line per case
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    All,
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::UnknownClaim(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, Failure> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let src = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            src.parse().map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
        }
    }
}

fn apply_common(cfg: &mut RunConfig, c: &Common) -> Result<(), Failure> {
    if let Some(o) = c.order {
        cfg.order = o;
    }
    if let Some(d) = c.dimension {
        cfg.dimension = d;
    }
    if let Some(f) = c.format {
        cfg.format = f;
    }
    if cfg.dimension != 4 {
        return Err(Failure::Usage(format!("dimension {} is not supported; only 4 is", cfg.dimension)));
    }
    Ok(())
}

fn recursion_name(r: RecursionChoice) -> String {
    r.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

struct Labels {
    latex: &'static str,
    text: &'static str,
}

const BOSON: Labels = Labels { latex: r"\ln\det\left[-\partial^2+V\right]", text: "ln det[-d^2 + V]" };
const DIRAC: Labels = Labels { latex: r"\ln\det\left(\gamma\cdot\partial+\phi\right)", text: "ln det(gamma.d + phi)" };

fn det_line(labels: &Labels, det: &DetDensity, fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Latex => format!("{} = \\int d^4x\\,\\left[{}\\right]", labels.latex, det.render(Format::Latex)),
        _ => format!("{} = int d^4x [{}]", labels.text, det.render(Format::Text)),
    }
}

fn det_json(det: &DetDensity) -> Value {
    json!({
        "terms": det.to_json(),
        "text": det.render(Format::Text),
        "latex": det.render(Format::Latex),
    })
}

/// `ln det` with Laplacians integrated by parts.
fn determinant(z: &ZetaDensity) -> Result<DetDensity, Failure> {
    let det = ds_at_zero(z)?;
    check_det_dimensions(&det)?;
    Ok(integrate_by_parts_normalize(&det)?.0)
}

fn zeta(kind: OperatorKind, cfg: &RunConfig, path: DiracPath) -> Result<ZetaDensity, Failure> {
    Ok(zeta_density_with(&OperatorSpec::new(kind), cfg.order, path, Recursion::from(cfg.recursion))?)
}

fn apply_substitution(det: &DetDensity, spec: &str) -> Result<DetDensity, Failure> {
    let (name, repl) = parse_substitution(spec)?;
    if name == POTENTIAL {
        return Ok(substitute_potential(det, &repl)?);
    }
    if name == "phi" {
        return Err(Failure::Usage("only V and parameters can be substituted".into()));
    }
    Ok(DetDensity::from_expr(&substitute_param(&det.to_expr(), &name, &repl)?)?)
}

fn cmd_boson(mut cfg: RunConfig, common: &Common, substitute: Option<String>) -> Outcome {
    apply_common(&mut cfg, common)?;
    cfg.operator = Some(OperatorKind::Boson);
    if substitute.is_some() {
        cfg.substitute = substitute;
    }
    let mut det = determinant(&zeta(OperatorKind::Boson, &cfg, DiracPath::default())?)?;
    if let Some(s) = &cfg.substitute {
        det = apply_substitution(&det, s)?;
    }
    Ok(match cfg.format {
        OutputFormat::Json => json!({
            "schema_version": SCHEMA_VERSION,
            "command": "boson",
            "order": cfg.order,
            "dimension": cfg.dimension,
            "substitution": cfg.substitute,
            "density": det_json(&det),
        })
        .to_string(),
        f => det_line(&BOSON, &det, f),
    })
}

fn cmd_dirac(mut cfg: RunConfig, common: &Common, path: Option<PathChoice>, rec: Option<RecursionChoice>) -> Outcome {
    apply_common(&mut cfg, common)?;
    cfg.operator = Some(OperatorKind::Dirac);
    if let Some(p) = path {
        cfg.path = p;
    }
    if let Some(r) = rec {
        cfg.recursion = r;
    }
    let paths: Vec<(&str, DiracPath)> = match cfg.path {
        PathChoice::FeynmanFp => vec![("feynman-fp", DiracPath::FeynmanFp)],
        PathChoice::OperatorIdentity => vec![("operator-identity", DiracPath::OperatorIdentity)],
        PathChoice::Both => vec![("feynman-fp", DiracPath::FeynmanFp), ("operator-identity", DiracPath::OperatorIdentity)],
    };
    let mut results = Vec::new();
    for (name, p) in &paths {
        let z = zeta(OperatorKind::Dirac, &cfg, *p)?;
        let det = determinant(&z)?;
        results.push((*name, z, det));
    }
    let identical = results.windows(2).all(|w| w[0].1 == w[1].1 && w[0].2 == w[1].2);
    let out = match cfg.format {
        OutputFormat::Json => {
            let mut by_path = serde_json::Map::new();
            for (name, _, det) in &results {
                by_path.insert(name.to_string(), det_json(det));
            }
            let mut v = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "dirac",
                "order": cfg.order,
                "dimension": cfg.dimension,
                "recursion": recursion_name(cfg.recursion),
                "paths": by_path,
            });
            if results.len() > 1 {
                v["identical"] = json!(identical);
            }
            v.to_string()
        }
        f => {
            let mut lines = Vec::new();
            for (name, _, det) in &results {
                let line = det_line(&DIRAC, det, f);
                lines.push(if results.len() > 1 { format!("[{name}] {line}") } else { line });
            }
            if results.len() > 1 && identical {
                let zeros = results[0].1.by_order.len();
                lines.push(format!(
                    "attestation: feynman-fp and operator-identity give identical zeta densities at all {zeros} orders and identical determinants"
                ));
            }
            lines.join("\n")
        }
    };
    if !identical {
        eprintln!("{out}");
        return Err(Failure::Compute("the two λ-integration paths disagree".into()));
    }
    Ok(out)
}

fn cmd_yukawa(
    mut cfg: RunConfig,
    common: &Common,
    coupling: String,
    rec: Option<RecursionChoice>,
    zeff: bool,
    substitute: Option<String>,
) -> Outcome {
    apply_common(&mut cfg, common)?;
    cfg.coupling = Some(coupling.clone());
    if let Some(r) = rec {
        cfg.recursion = r;
    }
    if zeff {
        let spec = substitute.or(cfg.substitute.clone()).unwrap_or_else(|| "V=m^2+lc*phi^2/2".to_string());
        let det = ds_at_zero(&zeta(OperatorKind::Boson, &cfg, DiracPath::default())?)?;
        let z = z_eff_first_term(&apply_substitution(&det, &spec)?)?;
        return Ok(match cfg.format {
            OutputFormat::Json => json!({
                "schema_version": SCHEMA_VERSION,
                "command": "yukawa",
                "z_eff_first_term": {"substitution": spec, "text": render(&z, Format::Text), "latex": render(&z, Format::Latex)},
            })
            .to_string(),
            OutputFormat::Latex => format!(r"Z_{{\rm eff}}(\phi) = 1 + {} + \dots", render(&z, Format::Latex)),
            OutputFormat::Text => format!("Z_eff(phi) = 1 + {} + ...", render(&z, Format::Text)),
        });
    }
    let det = ds_at_zero(&zeta(OperatorKind::Dirac, &cfg, DiracPath::default())?)?;
    let g = Expr::param(&coupling);
    let potential = Expr::func(POTENTIAL, Expr::field("phi").powi(2) / g.clone().powi(2));
    let action = effective_action(&det, &g, &potential)?;
    Ok(match cfg.format {
        OutputFormat::Json => {
            let mut v = action.to_json();
            v["schema_version"] = json!(SCHEMA_VERSION);
            v["command"] = json!("yukawa");
            v["coupling"] = json!(coupling);
            v["recursion"] = json!(recursion_name(cfg.recursion));
            v.to_string()
        }
        OutputFormat::Latex => format!(r"\Gamma_0/N = \int d^4x\,\left\{{{}\right\}}", action.render(Format::Latex)),
        OutputFormat::Text => format!("Gamma_0/N = int d^4x {{{}}}", action.render(Format::Text)),
    })
}

fn report_output(r: &Report, fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Json => r.json_lines(),
        _ => {
            let failed = r.cases.iter().filter(|c| !c.passed).count();
            format!("{}seed {}: {} cases, {} failed", r.summary_table(), r.seed, r.cases.len(), failed)
        }
    }
}

fn cmd_verify(
    mut cfg: RunConfig,
    claim: Option<String>,
    seed: Option<u64>,
    samples: Option<usize>,
    tol: Option<f64>,
    format: Option<OutputFormat>,
) -> Outcome {
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if tol.is_some() {
        cfg.tol = tol;
    }
    let fmt = match format {
        Some(OutputFormat::Latex) => return Err(Failure::Usage("verify reports are text or json".into())),
        Some(f) => f,
        None => OutputFormat::Text,
    };
    let report = match claim {
        Some(id) => Report { seed: cfg.seed, cases: verify_claim(&id, cfg.seed, samples, cfg.tol)? },
        None => verify_suite(cfg.seed),
    };
    let out = report_output(&report, fmt);
    if report.passed() {
        Ok(out)
    } else {
        println!("{out}");
        let worst = report.cases.iter().filter(|c| !c.passed).max_by(|a, b| a.rel_error.total_cmp(&b.rel_error));
        Err(Failure::Compute(match worst {
            Some(c) => format!(
                "verification failed; worst sample: {} #{} rel_error {:e}{}",
                c.claim,
                c.sample,
                c.rel_error,
                c.error.as_ref().map(|e| format!(" ({e})")).unwrap_or_default()
            ),
            None => "no cases were run".into(),
        }))
    }
}

fn run(cli: Cli) -> Outcome {
    let cfg = load_config(&cli.config)?;
    match cli.cmd {
        Cmd::Boson { common, substitute } => cmd_boson(cfg, &common, substitute),
        Cmd::Dirac { common, path, recursion } => cmd_dirac(cfg, &common, path, recursion),
        Cmd::Yukawa { common, coupling, recursion, zeff, substitute } => {
            let coupling = coupling.or(cfg.coupling.clone()).ok_or_else(|| Failure::Usage("--coupling is required".into()))?;
            cmd_yukawa(cfg, &common, coupling, recursion, zeff, substitute)
        }
        Cmd::Verify { suite: _, claim, seed, samples, tol, format } => cmd_verify(cfg, claim, seed, samples, tol, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
