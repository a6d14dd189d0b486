//! Command-line front end. Exit codes: 0 success, 1 usage or engineering
//! failure, 2 a certificate inequality failed re-verification.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::base::NeighborhoodBase;
use crate::error::{LabError, Result};
use crate::model::{Measure, PlFunction};
use crate::nested::{self, ExponentSchedule};
use crate::norm::{DNormContext, DualOptions, SupNorm};
use crate::operator::{self, Rank1Projection};
use crate::report::{canonical_json, emit, Report, RunConfig};
use crate::rotundity;
use crate::slice::{self, SetSpec, SliceSpec};

#[derive(Parser, Debug)]
#[command(name = "dnorm-lab", version, about = "Numerical laboratory for the D-norm on C[0,1]")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Base spec: leveled:i=1,levels=8 | dyadic:levels=6 | custom:@file.json.
    /// Defaults to leveled:i=1,levels=8 (combo-diam: the leveled base for its i).
    #[arg(long, global = true)]
    base: Option<String>,
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 10_000)]
    budget: usize,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value_t = 1024)]
    grid: usize,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Record wall-clock time in the report (breaks byte-reproducibility).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum NormKind {
    D,
    Sup,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum SetKind {
    Ball,
    Slice,
    Shell,
    Combo,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum NestedOp {
    Norm,
    Product,
    Wur,
    Slice,
}

/// A functional: `--measure file.json` or one or more `--dirac t`.
#[derive(Args, Debug, Clone)]
struct FunctionalArg {
    #[arg(long)]
    measure: Option<PathBuf>,
    #[arg(long)]
    dirac: Vec<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// D-norm enclosure of a function.
    Norm {
        #[arg(long = "fn")]
        function: PathBuf,
    },
    /// Evaluated seminorms ‖f‖_n.
    Seminorms {
        #[arg(long = "fn")]
        function: PathBuf,
    },
    /// Bracket for the dual norm of a measure.
    DualNorm {
        #[command(flatten)]
        functional: FunctionalArg,
    },
    /// Tent-flip companion inside a slice, with re-verified certificate.
    SliceWitness {
        #[arg(long = "fn")]
        function: PathBuf,
        #[command(flatten)]
        functional: FunctionalArg,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Sampled diameter lower bound.
    Diam {
        #[arg(long, value_enum, default_value_t = SetKind::Slice)]
        set: SetKind,
        #[command(flatten)]
        functional: FunctionalArg,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.1)]
        tau: f64,
    },
    /// Convex combination of slices with small diameter.
    ComboDiam {
        #[arg(long)]
        i: usize,
        #[arg(long)]
        eta: f64,
    },
    /// Subslice of a slice around a member x.
    Subslice {
        #[arg(long = "fn")]
        function: PathBuf,
        #[command(flatten)]
        functional: FunctionalArg,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
    /// MLUR certificate plus an adversarial search of `--budget` samples.
    MlurCert {
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    MlurModulus {
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = NormKind::D)]
        norm: NormKind,
    },
    OctaLocal {
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = NormKind::D)]
        norm: NormKind,
    },
    OctaGap {
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        v: PathBuf,
    },
    Rigidity {
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Allowed seminorm mismatch in the premise.
        #[arg(long, default_value_t = 0.0)]
        premise_tol: f64,
    },
    /// ‖I − P‖ against 1 + ‖P‖ for a rank-1 projection.
    OpCheck {
        /// JSON `{"u": file, "m": file}`; paths relative to the JSON file.
        #[arg(long)]
        proj: Option<PathBuf>,
        /// Norm-one projection built at an isolated point instead.
        #[arg(long)]
        at: Option<f64>,
    },
    C0Control {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    Nested {
        #[arg(long = "p", default_value = "geometric:base=2,start=4")]
        schedule: String,
        #[arg(long, value_enum)]
        op: NestedOp,
        /// JSON array for `--op norm`.
        #[arg(long)]
        vector: Option<String>,
        /// JSON arrays of vectors for `--op wur`.
        #[arg(long)]
        xs: Option<PathBuf>,
        #[arg(long)]
        ys: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Norm { .. } => "norm",
            Command::Seminorms { .. } => "seminorms",
            Command::DualNorm { .. } => "dual-norm",
            Command::SliceWitness { .. } => "slice-witness",
            Command::Diam { .. } => "diam",
            Command::ComboDiam { .. } => "combo-diam",
            Command::Subslice { .. } => "subslice",
            Command::MlurCert { .. } => "mlur-cert",
            Command::MlurModulus { .. } => "mlur-modulus",
            Command::OctaLocal { .. } => "octa-local",
            Command::OctaGap { .. } => "octa-gap",
            Command::Rigidity { .. } => "rigidity",
            Command::OpCheck { .. } => "op-check",
            Command::C0Control { .. } => "c0-control",
            Command::Nested { .. } => "nested",
        }
    }

    fn stochastic(&self) -> bool {
        match self {
            Command::Norm { .. } | Command::Seminorms { .. } | Command::Rigidity { .. } | Command::C0Control { .. } => false,
            Command::Nested { op, .. } => *op == NestedOp::Slice,
            Command::OctaLocal { norm, .. } => *norm == NormKind::D,
            _ => true,
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn usage(msg: impl Into<String>) -> LabError {
    LabError::Parse(msg.into())
}

struct Env {
    g: Global,
    base: String,
    seed: u64,
}

impl Env {
    fn ctx(&self) -> Result<DNormContext<f64>> {
        DNormContext::new(NeighborhoodBase::from_spec(&self.base)?, self.g.tol)
    }

    fn dual_opts(&self) -> DualOptions {
        DualOptions { budget: self.g.budget, seed: self.seed, grid: self.g.grid, ..DualOptions::default() }
    }

    fn measure(&self, f: &FunctionalArg) -> Result<Measure<f64>> {
        match (&f.measure, f.dirac.as_slice()) {
            (Some(p), []) => read_json(p),
            (None, [t]) => Measure::dirac(*t),
            (None, []) => Err(usage("give --measure FILE or --dirac T")),
            _ => Err(usage("give either --measure or a single --dirac")),
        }
    }

    fn slice(&self, ctx: &DNormContext<f64>, f: &FunctionalArg, eps: f64) -> Result<SliceSpec> {
        if f.measure.is_none() && f.dirac.len() == 1 {
            return SliceSpec::dirac(ctx, f.dirac[0], eps);
        }
        SliceSpec::from_measure(ctx, self.measure(f)?, eps, self.dual_opts())
    }
}

fn to<S: serde::Serialize>(v: &S) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Runs one command and returns its results and optional CSV rendering.
fn run(cmd: &Command, env: &Env) -> Result<(Value, Option<String>)> {
    let out = match cmd {
        Command::Norm { function } => {
            let ctx = env.ctx()?;
            let f: PlFunction<f64> = read_json(function)?;
            let e = ctx.d_norm(&f);
            json!({ "norm": e, "terms": ctx.terms(), "meets_tolerance": ctx.meets_tolerance(&e), "sup_norm": f.sup_norm() })
        }
        Command::Seminorms { function } => {
            let ctx = env.ctx()?;
            let f: PlFunction<f64> = read_json(function)?;
            let s = ctx.seminorms(&f);
            let csv = std::iter::once("n,seminorm".to_string())
                .chain(s.iter().enumerate().map(|(k, v)| format!("{},{}", k + 1, crate::report::format_float(*v))))
                .collect::<Vec<_>>()
                .join("\n")
                + "\n";
            return Ok((json!({ "seminorms": s }), Some(csv)));
        }
        Command::DualNorm { functional } => {
            let ctx = env.ctx()?;
            let m = env.measure(functional)?;
            let b = ctx.dual_norm_with(&m, env.dual_opts())?;
            let dirac = match functional.dirac.as_slice() {
                [t] => ctx.dirac_dual_norm(*t).ok(),
                _ => None,
            };
            json!({ "bracket": to(&b), "dirac_closed_form": dirac })
        }
        Command::SliceWitness { function, functional, eps, delta, eta } => {
            let ctx = env.ctx()?;
            let x: PlFunction<f64> = read_json(function)?;
            if !(*delta > 0.0 && delta < eps) {
                return Err(LabError::Domain(format!("need 0 < delta < eps, got delta={delta}, eps={eps}")));
            }
            let s = env.slice(&ctx, functional, *eps)?;
            let cert = slice::tent_flip_witness(&ctx, &s, &x, *delta, *eta)?;
            cert.verify(&ctx, &s, &x)?;
            json!({ "slice": to(&s), "certificate": to(&cert), "verified": true })
        }
        Command::Diam { set, functional, eps, tau } => {
            let ctx = env.ctx()?;
            let spec = match set {
                SetKind::Ball => SetSpec::Ball,
                SetKind::Slice => SetSpec::Slice(env.slice(&ctx, functional, *eps)?),
                SetKind::Shell => SetSpec::Shell { slice: env.slice(&ctx, functional, *eps)?, tau: *tau },
                SetKind::Combo => {
                    if functional.dirac.is_empty() {
                        return Err(usage("--set combo needs one --dirac per slice"));
                    }
                    SetSpec::Combination(
                        functional.dirac.iter().map(|&t| SliceSpec::dirac(&ctx, t, *eps)).collect::<Result<_>>()?,
                    )
                }
            };
            let r = slice::diameter_lower_bound(&ctx, &spec, env.g.budget, env.seed)?;
            let csv = std::iter::once("first,second,distance_lo".to_string())
                .chain(r.rows.iter().map(|p| format!("{},{},{}", p.first, p.second, crate::report::format_float(p.distance_lo))))
                .collect::<Vec<_>>()
                .join("\n")
                + "\n";
            return Ok((json!({ "diameter": to(&r) }), Some(csv)));
        }
        Command::ComboDiam { i, eta } => {
            let ctx = env.ctx()?;
            let r = slice::small_diameter_combo(&ctx, *i, *eta, env.g.budget, env.seed)?;
            json!({ "combo": to(&r) })
        }
        Command::Subslice { function, functional, eps, delta } => {
            let ctx = env.ctx()?;
            let x: PlFunction<f64> = read_json(function)?;
            let s = env.slice(&ctx, functional, *eps)?;
            let r = slice::subslice(&ctx, &s, &x, *delta, env.seed)?;
            if r.violations > 0 {
                return Err(LabError::Certificate {
                    certificate: "subslice inclusion".into(),
                    inequality: format!("{} of {} sampled subslice members fall outside the slice", r.violations, r.samples_checked),
                });
            }
            json!({ "subslice": to(&r) })
        }
        Command::MlurCert { function, eps } => {
            let ctx = env.ctx()?;
            let x: PlFunction<f64> = read_json(function)?;
            let cert = rotundity::mlur_certificate(&ctx, &x, *eps)?;
            let adv = rotundity::adversarial_search(&cert, env.g.budget, env.seed);
            if adv.counterexamples > 0 {
                return Err(LabError::Certificate {
                    certificate: "MLUR implication".into(),
                    inequality: format!("premise held but ||y||_inf <= 2 eps failed in {} samples", adv.counterexamples),
                });
            }
            json!({ "certificate": to(&cert), "adversarial": to(&adv) })
        }
        Command::MlurModulus { function, eps, norm } => {
            let x: PlFunction<f64> = read_json(function)?;
            let r = match norm {
                NormKind::D => rotundity::mlur_modulus(&env.ctx()?, &x, *eps, env.g.budget, env.seed)?,
                NormKind::Sup => rotundity::mlur_modulus(&SupNorm, &x, *eps, env.g.budget, env.seed)?,
            };
            json!({ "modulus": to(&r) })
        }
        Command::OctaLocal { function, eps, norm } => {
            let x: PlFunction<f64> = read_json(function)?;
            let r = match norm {
                NormKind::D => rotundity::local_octahedral_witness(&env.ctx()?, &x, *eps, env.g.budget, env.seed)?,
                NormKind::Sup => rotundity::sup_octahedral_witness(&x, *eps)?,
            };
            json!({ "witness": to(&r), "threshold": 2.0 - eps })
        }
        Command::OctaGap { u, v } => {
            let ctx = env.ctx()?;
            let (u, v): (PlFunction<f64>, PlFunction<f64>) = (read_json(u)?, read_json(v)?);
            let r = rotundity::non_octahedral_gap(&ctx, &u, &v, env.g.budget, env.seed)?;
            json!({ "gap": to(&r) })
        }
        Command::Rigidity { u, v, eps, premise_tol } => {
            let ctx = env.ctx()?;
            let (u, v): (PlFunction<f64>, PlFunction<f64>) = (read_json(u)?, read_json(v)?);
            let r = rotundity::seminorm_rigidity_check(&ctx, &u, &v, *premise_tol, *eps)?;
            if !r.holds {
                return Err(LabError::Certificate {
                    certificate: "seminorm rigidity".into(),
                    inequality: format!("max ||u|-|v|| = {} <= 4 eps + tol = {}", r.max_abs_diff, r.bound),
                });
            }
            json!({ "rigidity": to(&r) })
        }
        Command::OpCheck { proj, at } => {
            let ctx = env.ctx()?;
            let p = match (proj, at) {
                (Some(path), None) => {
                    #[derive(serde::Deserialize)]
                    struct ProjFiles {
                        u: PathBuf,
                        m: PathBuf,
                    }
                    let files: ProjFiles = read_json(path)?;
                    let dir = path.parent().unwrap_or(Path::new("."));
                    Rank1Projection::new(read_json(&dir.join(files.u))?, read_json(&dir.join(files.m))?)?
                }
                (None, Some(t)) => Rank1Projection::norm_one_at(&ctx, *t, env.g.budget.min(10_000), env.seed)?,
                _ => return Err(usage("give exactly one of --proj FILE or --at T")),
            };
            let r = operator::ld2p_plus_projection_check(&ctx, &p, env.g.budget, env.seed)?;
            if r.lower > r.upper * (1.0 + 1e-9) {
                return Err(LabError::Certificate {
                    certificate: "triangle bound for I - P".into(),
                    inequality: format!("lower {} <= 1 + ||P||.hi = {}", r.lower, r.upper),
                });
            }
            json!({ "projection": to(&p), "check": to(&r) })
        }
        Command::C0Control { dim, eps } => {
            let r = operator::c0_model_control(*dim, *eps)?;
            json!({ "control": to(&r) })
        }
        Command::Nested { schedule, op, vector, xs, ys, depth, m, eps } => {
            let s = ExponentSchedule::from_str(schedule)?;
            match op {
                NestedOp::Norm => {
                    let v: Vec<f64> = serde_json::from_str(vector.as_deref().ok_or_else(|| usage("--op norm needs --vector"))?)?;
                    json!({ "norm": nested::nested_norm(&s, &v)? })
                }
                NestedOp::Product => {
                    let (product, holds) = nested::product_condition(&s);
                    json!({ "product": product, "holds": holds })
                }
                NestedOp::Wur => {
                    let (Some(xs), Some(ys)) = (xs, ys) else { return Err(usage("--op wur needs --xs and --ys")) };
                    let r = nested::wur_difference_extraction(&s, &read_json::<Vec<Vec<f64>>>(xs)?, &read_json::<Vec<Vec<f64>>>(ys)?, env.g.tol)?;
                    json!({ "wur": to(&r) })
                }
                NestedOp::Slice => {
                    let r = nested::large_slice_check(&s, *depth, *m, *eps, env.g.budget, env.seed)?;
                    json!({ "large_slice": to(&r) })
                }
            }
        }
    };
    Ok((out, None))
}

fn exit_code(e: &LabError) -> i32 {
    match e {
        LabError::Certificate { .. } => 2,
        _ => 1,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    if g.budget == 0 {
        return Err(usage("--budget must be at least 1"));
    }
    if !(g.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    if cli.command.stochastic() && g.seed.is_none() {
        return Err(usage(format!("{} is stochastic and needs --seed", cli.command.name())));
    }
    let base = g.base.clone().unwrap_or_else(|| match cli.command {
        Command::ComboDiam { i, .. } => format!("leveled:i={i},levels=8"),
        _ => "leveled:i=1,levels=8".into(),
    });
    let env = Env { g: g.clone(), base, seed: g.seed.unwrap_or(0) };
    let start = Instant::now();
    let (results, csv) = run(&cli.command, &env)?;
    let text = match g.format {
        Format::Csv => csv.ok_or_else(|| usage(format!("csv output is not available for {}", cli.command.name())))?,
        Format::Json => {
            let config = RunConfig { base: env.base.clone(), tol: g.tol, budget: g.budget, seed: g.seed, grid: g.grid };
            let mut report = Report::new(cli.command.name(), config, results);
            if g.timing {
                report.wall_time_s = Some(start.elapsed().as_secs_f64());
            }
            canonical_json(&report)?
        }
    };
    emit(&text, g.out.as_deref())
}
