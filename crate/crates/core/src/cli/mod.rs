//! Command-line front end. Every command prints JSON on stdout; the exit
//! code is 0 on success, 2 when the computation is inconclusive and 3 when a
//! stage fails (bad input included).

pub mod certify;
pub mod config;
pub mod search;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::counter::{count_points, traces_from_counts, CountOptions, CountSeries, TraceSeries};
use crate::genus1::{conductor, membership_in_u};
use crate::quartic::{build_family_member, QuarticForm};
use crate::zeta::{KnownClass, KnownClasses};
pub use certify::{certify, verify, RankCertificate, Stage, StageError};
pub use config::Config;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "picard-one",
    version,
    about = "Certify geometric Picard number one for quartic K3 surfaces"
)]
pub struct Cli {
    /// Pipeline configuration (JSON); defaults apply to missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for the on-disk count cache.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct SurfaceArgs {
    /// File holding a quartic expression or a JSON list of 35 coefficients.
    #[arg(long)]
    surface: Option<PathBuf>,
    /// Quartic expression in x, y, z, w (f1, f2, g1, g2 may be used).
    #[arg(long)]
    form: Option<String>,
    /// Family member `w f1 + 2 z f2 - 3 g1 g2 - 6 h` for the quartic `h`.
    #[arg(long)]
    h: Option<String>,
}

#[derive(Args, Debug)]
struct TraceArgs {
    #[arg(long)]
    p: u64,
    /// JSON file with a trace series or a count series.
    #[arg(long)]
    traces: PathBuf,
    /// Comma-separated `label[:orbit[:sign]]`, e.g. `H,L`.
    #[arg(long, default_value = "")]
    known_classes: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of points over GF(p^n).
    Count {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Cap on p^(2n).
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Characteristic polynomial of Frobenius from traces.
    Zeta(TraceArgs),
    /// Upper bound for the geometric Picard number from traces.
    Bound(TraceArgs),
    /// Full pipeline; prints the certificate.
    Certify {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Also write the certificate here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random reductions with bound 2, paired by CRT.
    Search {
        #[arg(long, default_value_t = 2)]
        p1: u64,
        #[arg(long, default_value_t = 3)]
        p2: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Elliptic curve of the section w = 0 and the order of T.
    Curve {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        conductor: bool,
    },
    /// Re-derive a certificate.
    Verify { certificate: PathBuf },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    stage: Option<Stage>,
    message: String,
}

impl Failure {
    fn input(e: impl ToString) -> Failure {
        Failure {
            code: EXIT_FAILURE,
            stage: None,
            message: e.to_string(),
        }
    }
}

impl From<StageError> for Failure {
    fn from(e: StageError) -> Failure {
        Failure {
            code: certify::stage_exit_code(&e),
            stage: Some(e.stage),
            message: e.to_string(),
        }
    }
}

fn emit(out: &mut dyn Write, v: &impl Serialize) {
    let s = serde_json::to_string_pretty(v).expect("serializable");
    let _ = writeln!(out, "{s}");
}

fn read_surface(a: &SurfaceArgs) -> Result<QuarticForm, Failure> {
    if let Some(h) = &a.h {
        return Ok(build_family_member(&QuarticForm::parse(h).map_err(Failure::input)?));
    }
    let text = match (&a.form, &a.surface) {
        (Some(f), _) => f.clone(),
        (_, Some(path)) => {
            std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
        }
        _ => return Err(Failure::input("no surface given")),
    };
    if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(Failure::input)
    } else {
        QuarticForm::parse(text.trim()).map_err(Failure::input)
    }
}

/// `H,L` or `C:2:-1`; `H` and other bare labels are fixed classes.
pub fn parse_known_classes(spec: &str) -> Result<KnownClasses, String> {
    let mut v = vec![];
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let orbit = match parts.get(1) {
            Some(o) => o.parse().map_err(|_| format!("bad orbit in `{item}`"))?,
            None => 1,
        };
        let sign = match parts.get(2) {
            Some(s) => s.parse().map_err(|_| format!("bad sign in `{item}`"))?,
            None => 1,
        };
        if parts.len() > 3 {
            return Err(format!("bad class `{item}`"));
        }
        v.push(KnownClass {
            label: parts[0].to_string(),
            orbit,
            sign,
        });
    }
    let w = KnownClasses::new(v);
    w.validate().map_err(|e| e.to_string())?;
    Ok(w)
}

fn read_traces(a: &TraceArgs) -> Result<(TraceSeries, KnownClasses), Failure> {
    let text =
        std::fs::read_to_string(&a.traces).map_err(|e| Failure::input(format!("{}: {e}", a.traces.display())))?;
    let t = match serde_json::from_str::<TraceSeries>(&text) {
        Ok(t) => t,
        Err(_) => {
            let c: CountSeries = serde_json::from_str(&text).map_err(Failure::input)?;
            traces_from_counts(&c).map_err(Failure::input)?
        }
    };
    if t.p != a.p {
        return Err(Failure::input(format!("traces are for p = {}, not {}", t.p, a.p)));
    }
    let known = parse_known_classes(&a.known_classes).map_err(Failure::input)?;
    Ok((t, known))
}

fn load_config(cli: &Cli) -> Result<Config, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path).map_err(Failure::input)?,
        None => Config::default(),
    };
    if cli.cache_dir.is_some() {
        cfg.cache_dir.clone_from(&cli.cache_dir);
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    Ok(cfg)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Count { p, n, surface, budget } => {
            let f = read_surface(surface)?;
            let s = f.reduce(*p).map_err(Failure::input)?;
            let opts = CountOptions {
                threads: cfg.threads,
                budget: budget.unwrap_or(cfg.count_budget) as u128,
            };
            let t = Instant::now();
            let cache = match &cfg.cache_dir {
                Some(d) => Some(crate::counter::CountCache::new(d).map_err(Failure::input)?),
                None => None,
            };
            let fp = crate::counter::fingerprint(&s);
            let cached = match &cache {
                Some(c) => c.get(&fp, *n).map_err(Failure::input)?,
                None => None,
            };
            let count = match cached {
                Some(c) => c,
                None => {
                    let c = count_points(&s, *n, &opts).map_err(|e| Failure {
                        code: EXIT_FAILURE,
                        stage: Some(Stage::Count),
                        message: e.to_string(),
                    })?;
                    if let Some(cache) = &cache {
                        cache.put(&fp, *p, *n, c).map_err(Failure::input)?;
                    }
                    c
                }
            };
            emit(
                out,
                &json!({"p": p, "n": n, "count": count, "wall_time": t.elapsed().as_secs_f64(), "fingerprint": fp}),
            );
            Ok(EXIT_OK)
        }
        Command::Zeta(a) => {
            let (t, known) = read_traces(a)?;
            let r = certify::analyze_traces(&t, &known)?;
            emit(out, &r);
            Ok(EXIT_OK)
        }
        Command::Bound(a) => {
            let (t, known) = read_traces(a)?;
            let r = certify::analyze_traces(&t, &known)?;
            emit(
                out,
                &json!({"p": t.p, "bound": r.bound, "saturation": r.saturation, "unity": r.unity}),
            );
            Ok(EXIT_OK)
        }
        Command::Certify { surface, out: path } => {
            let f = read_surface(surface)?;
            let cert = certify(&f, &cfg)?;
            if let Some(path) = path {
                write_json(path, &cert)?;
            }
            emit(out, &cert);
            Ok(cert.exit_code())
        }
        Command::Search { p1, p2, seed, budget } => {
            let r = search::search(
                *p1,
                *p2,
                seed.unwrap_or(cfg.seed),
                budget.unwrap_or(cfg.search_budget),
                &cfg,
            )
            .map_err(Failure::input)?;
            emit(out, &r);
            Ok(EXIT_OK)
        }
        Command::Curve {
            surface,
            conductor: want,
        } => {
            let f = read_surface(surface)?;
            let ev = membership_in_u(&f).map_err(|e| Failure {
                code: EXIT_FAILURE,
                stage: Some(Stage::Points),
                message: e.to_string(),
            })?;
            let cond = match (&ev.curve, want) {
                (Some(c), true) => Some(conductor(&c.model.curve).map_err(|e| Failure {
                    code: EXIT_FAILURE,
                    stage: Some(Stage::Points),
                    message: e.to_string(),
                })?),
                _ => None,
            };
            let code = if ev.member { EXIT_OK } else { EXIT_INCONCLUSIVE };
            emit(
                out,
                &json!({
                    "model": ev.curve.as_ref().map(|c| &c.model),
                    "t": ev.curve.as_ref().map(|c| &c.t),
                    "order": &ev.order,
                    "membership": &ev,
                    "conductor": cond,
                }),
            );
            Ok(code)
        }
        Command::Verify { certificate } => {
            let text = std::fs::read_to_string(certificate)
                .map_err(|e| Failure::input(format!("{}: {e}", certificate.display())))?;
            let cert: RankCertificate = serde_json::from_str(&text).map_err(|e| Failure {
                code: EXIT_FAILURE,
                stage: Some(Stage::Verify),
                message: e.to_string(),
            })?;
            verify(&cert)?;
            emit(out, &json!({"verified": true, "rank_one": cert.body.rank_one}));
            Ok(EXIT_OK)
        }
    }
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).expect("serializable");
    std::fs::write(path, s).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Parses `args` (program name first), runs the command, returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            emit(
                out,
                &json!({"error": {"stage": f.stage, "message": f.message, "exit_code": f.code}}),
            );
            f.code
        }
    }
}
