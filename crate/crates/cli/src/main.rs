//! Command-line front end: generating functions, kernels, stack classes.

mod cache;
mod selftest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use irrmot_core::genfun::{self, compare_kernels, Family, GenFunParams, Status};
use irrmot_core::moduli::{self, Budget, DivisorSpec, StackQuery};
use irrmot_core::series::Trunc;
use irrmot_core::specialize::{rational_text, Target};
use irrmot_core::Error;
use serde_json::{json, Value};

use cache::KernelCache;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_VIOLATED: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "irrmot", version, about = "Exact generating functions and motivic classes of irregular parabolic connections")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Kernel cache directory (overrides IRRMOT_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Truncated generating function.
    Omega {
        #[arg(long, value_enum, default_value_t = FamilyArg::Univ)]
        family: FamilyArg,
        #[command(flatten)]
        k: KernelArgs,
    },
    /// Both DT kernels with their vanishing-tail certificates.
    Kernels(KernelArgs),
    /// Compares the two kernels at z = 1.
    CheckMellit(KernelArgs),
    /// Motivic class of a stack of connections.
    ConnClass(QueryArgs),
    /// z-graded class at a fixed twist, or at the stable twist.
    GradedClass {
        #[command(flatten)]
        q: QueryArgs,
        /// Twist N; omitted means search from the stabilization bound.
        #[arg(long)]
        twist: Option<i64>,
    },
    /// E-polynomial of a stack of connections.
    Epoly(QueryArgs),
    /// Virtual Poincaré polynomial of a stack of connections.
    Poincare(QueryArgs),
    /// Poincaré polynomials of the (r, 1^r) moduli with one pole.
    Ddp {
        /// Cases as `r,n,g`.
        #[arg(long = "case", value_parser = parse_case)]
        cases: Vec<(u32, u32, u32)>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        zmax: u32,
        #[arg(long, default_value_t = 5)]
        window: u32,
    },
    /// Runs the invariant suite.
    Selftest {
        #[arg(long, default_value_t = 2)]
        rmax: u32,
        #[arg(long, default_value_t = 40)]
        zmax: u32,
        #[arg(long, default_value_t = 5)]
        window: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Univ,
    Hlv,
    Sch,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, default_value_t = 1)]
    genus: u32,
    /// Irregularity; derived from --divisor when that is given.
    #[arg(long)]
    delta: Option<u32>,
    /// Point ids of the support.
    #[arg(long, value_delimiter = ',')]
    points: Vec<u32>,
    /// Divisor entries `x:n[:n']`; sets the support and irregularity.
    #[arg(long)]
    divisor: Vec<String>,
    #[arg(long, default_value_t = 2)]
    rmax: u32,
    #[arg(long, default_value_t = 40)]
    zmax: u32,
    #[arg(long, default_value_t = 5)]
    window: u32,
}

#[derive(Args)]
struct QueryArgs {
    /// Query as inline JSON or `@path`.
    #[arg(long)]
    query: String,
    #[arg(long, default_value_t = 40)]
    zmax: u32,
    #[arg(long, default_value_t = 5)]
    window: u32,
}

fn parse_case(s: &str) -> Result<(u32, u32, u32), String> {
    let v: Vec<u32> = s.split(',').map(|x| x.trim().parse::<u32>().map_err(|_| format!("bad case `{s}`, expected r,n,g"))).collect::<Result<_, _>>()?;
    match v[..] {
        [r, n, g] if r >= 1 && n >= 1 => Ok((r, n, g)),
        _ => Err(format!("bad case `{s}`, expected r,n,g with r,n ≥ 1")),
    }
}

/// A failure with its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Certificate(_) | Error::Genericity(_) => EXIT_INCONCLUSIVE,
            _ => EXIT_USAGE,
        };
        Fail(code, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail(EXIT_USAGE, msg.into())
}

/// Output payload plus the exit code it implies.
struct Outcome {
    body: String,
    code: u8,
}

impl Outcome {
    fn json(v: Value, code: u8) -> Self {
        Outcome { body: serde_json::to_string_pretty(&v).expect("json") + "\n", code }
    }
}

fn budget(zmax: u32, window: u32) -> Result<Budget, Fail> {
    if zmax == 0 || window == 0 || window > zmax {
        return Err(usage("need z_max ≥ window ≥ 1"));
    }
    Ok(Budget { z_max: zmax, window })
}

fn params(k: &KernelArgs) -> Result<GenFunParams, Fail> {
    if k.rmax == 0 {
        return Err(usage("r_max must be positive"));
    }
    budget(k.zmax, k.window)?;
    let (points, delta) = if k.divisor.is_empty() {
        (k.points.clone(), k.delta.unwrap_or(0))
    } else {
        if !k.points.is_empty() || k.delta.is_some() {
            return Err(usage("--divisor cannot be combined with --points or --delta"));
        }
        let entries: Vec<&str> = k.divisor.iter().map(String::as_str).collect();
        let d = DivisorSpec::parse(&entries)?;
        (d.fixed_support(), d.delta())
    };
    Ok(GenFunParams::new(k.genus, points, delta, Trunc { r_max: k.rmax, z_max: k.zmax })?)
}

fn read_query(a: &QueryArgs) -> Result<StackQuery, Fail> {
    let text = match a.query.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))?,
        None => a.query.clone(),
    };
    let q: StackQuery = serde_json::from_str(&text).map_err(|e| usage(format!("bad query: {e}")))?;
    q.validate()?;
    Ok(q)
}

fn preload(cache: &KernelCache, q: &StackQuery, b: Budget) -> Result<(), Fail> {
    if let Some(p) = moduli::query_kernel_params(q, b)? {
        cache.load(&p)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Outcome, Fail> {
    let cache = KernelCache::new(cli.cache_dir.clone());
    if cli.format == Format::Csv && !matches!(cli.cmd, Cmd::Ddp { .. }) {
        return Err(usage("csv output is only available for ddp"));
    }
    match &cli.cmd {
        Cmd::Omega { family, k } => {
            let p = params(k)?;
            let fam = match family {
                FamilyArg::Univ => Family::Univ,
                FamilyArg::Hlv => Family::Hlv,
                FamilyArg::Sch => Family::Sch,
            };
            let s = genfun::omega(fam, &p)?;
            Ok(Outcome::json(json!({ "params": p, "family": format!("{fam:?}").to_lowercase(), "series": s.to_json() }), EXIT_OK))
        }
        Cmd::Kernels(k) => {
            let p = params(k)?;
            let (kern, _) = cache.load(&p)?;
            let cert = |s: &irrmot_core::series::GradedSeries| s.eval_z_one(k.window).is_ok();
            let (cu, cs) = (cert(&kern.h_univ), cert(&kern.h_sch));
            let code = if cu && cs { EXIT_OK } else { EXIT_INCONCLUSIVE };
            Ok(Outcome::json(
                json!({
                    "params": p,
                    "window": k.window,
                    "certified": { "h_univ": cu, "h_sch": cs },
                    "h_univ": kern.h_univ.to_json(),
                    "h_sch": kern.h_sch.to_json(),
                }),
                code,
            ))
        }
        Cmd::CheckMellit(k) => {
            let p = params(k)?;
            let (kern, _) = cache.load(&p)?;
            let rep = compare_kernels(&p, &kern, k.window);
            let code = if rep.any_unequal() {
                EXIT_VIOLATED
            } else if rep.entries.iter().any(|e| e.status == Status::Inconclusive) {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            };
            Ok(Outcome::json(json!({ "report": rep, "all_equal": rep.all_equal() }), code))
        }
        Cmd::ConnClass(a) => {
            let q = read_query(a)?;
            let b = budget(a.zmax, a.window)?;
            preload(&cache, &q, b)?;
            let v = moduli::conn_class(&q, b)?;
            Ok(Outcome::json(json!({ "query": q, "budget": b, "value": v.to_string() }), EXIT_OK))
        }
        Cmd::GradedClass { q: a, twist } => {
            let q = read_query(a)?;
            let b = budget(a.zmax, a.window)?;
            preload(&cache, &q, b)?;
            let body = match twist {
                Some(n) => json!({ "query": q, "budget": b, "twist": n, "value": moduli::graded_class(&q, *n, b)?.to_string() }),
                None => match moduli::graded_class_stable(&q, b) {
                    Ok(s) => json!({ "query": q, "budget": b, "witness": s.witness, "bound": s.bound, "value": s.value.to_string() }),
                    Err(Error::OutOfTruncation(m)) => return Err(Fail(EXIT_INCONCLUSIVE, m)),
                    Err(e) => return Err(e.into()),
                },
            };
            Ok(Outcome::json(body, EXIT_OK))
        }
        Cmd::Epoly(a) | Cmd::Poincare(a) => {
            let target = if matches!(cli.cmd, Cmd::Epoly(_)) { Target::E } else { Target::P };
            let q = read_query(a)?;
            let b = budget(a.zmax, a.window)?;
            preload(&cache, &q, b)?;
            let via_class = moduli::e_p_conn(&q, target, b)?;
            let direct = moduli::e_p_conn_direct(&q, target, b)?;
            let agree = via_class == direct;
            Ok(Outcome::json(
                json!({ "query": q, "budget": b, "target": target, "value": rational_text(&via_class)?, "routes_agree": agree }),
                if agree { EXIT_OK } else { EXIT_VIOLATED },
            ))
        }
        Cmd::Ddp { cases, seed, zmax, window } => {
            let b = budget(*zmax, *window)?;
            let cases = if cases.is_empty() { vec![(1, 2, 1), (2, 2, 1), (2, 3, 1)] } else { cases.clone() };
            let mut rows = Vec::new();
            for &(r, n, g) in &cases {
                cache.load(&GenFunParams::new(g, vec![0], n - 1, Trunc { r_max: r, z_max: b.z_max })?)?;
                rows.push(moduli::ddp_poincare(g, n, r, b, *seed)?);
            }
            let code = if rows.iter().all(|r| r.palindromic) { EXIT_OK } else { EXIT_VIOLATED };
            if cli.format == Format::Csv {
                let mut out = String::from("r,n,g,d_val,sigma,h,palindromic\n");
                for row in &rows {
                    let sigma: Vec<String> = row.sigma.iter().map(|s| s.to_string()).collect();
                    out += &format!("{},{},{},{},\"{}\",\"{}\",{}\n", row.r, row.n, row.g, row.d_val, sigma.join(" "), row.h_text, row.palindromic);
                }
                return Ok(Outcome { body: out, code });
            }
            Ok(Outcome::json(json!({ "seed": seed, "rows": rows }), code))
        }
        Cmd::Selftest { rmax, zmax, window } => {
            if *rmax == 0 {
                return Err(usage("r_max must be positive"));
            }
            let b = budget(*zmax, *window)?;
            let report = selftest::run(&cache, *rmax, b)?;
            let code = if report.all_pass { EXIT_OK } else { EXIT_VIOLATED };
            Ok(Outcome::json(serde_json::to_value(&report).expect("json"), code))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(o) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, o.body.as_bytes()),
                None => std::io::stdout().write_all(o.body.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            ExitCode::from(o.code)
        }
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
