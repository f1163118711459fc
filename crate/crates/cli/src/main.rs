use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use drillfill_cli::report::Format;
use drillfill_cli::{
    constants_table, format_bound, format_constants, run_bound, verify_drill, verify_fill,
    BoundRequest, CliError, Command, RunConfig, Torus, DEFAULT_FACTORS, DEFAULT_SAMPLES,
    DEFAULT_SEED, DEFAULT_TOL,
};

/// Verify the drilling and filling interpolation profiles and evaluate volume-change bounds.
#[derive(Debug, Parser)]
#[command(name = "drillfill", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Check the tube-to-cusp profiles over a radius grid.
    VerifyDrill(VerifyArgs),
    /// Check the cusp-to-tube profiles, the decay law and the solid torus bound chain.
    VerifyFill(VerifyArgs),
    /// Print the geometry constants and the derived curvature constants.
    Constants {
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Evaluate a volume-change bound.
    Bound {
        #[command(subcommand)]
        kind: BoundKind,
        /// Curvature constant; derived on the default grids when omitted.
        #[arg(long = "c-hat", global = true)]
        c_hat: Option<f64>,
        #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Print JSON instead of text.
        #[arg(long, global = true, value_enum)]
        format: Option<Format>,
        /// Also write the report as JSON to this path.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Comma-separated tube radii in (0, 1]; default 0.05, 0.10, ..., 1.0.
    #[arg(long = "R-grid", value_delimiter = ',')]
    r_grid: Option<Vec<f64>>,
    /// Comma-separated slope lengths above 2π; default 8π, 16π, 32π, 64π.
    #[arg(long = "ell-grid", value_delimiter = ',')]
    ell_grid: Option<Vec<f64>>,
    /// Samples per radius or length (at least 1000).
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Quadrature tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Report path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed of the conformal factor corpus.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Conformal factors per region (0 disables the conformal checks).
    #[arg(long, default_value_t = DEFAULT_FACTORS)]
    factors: usize,
    /// Geodesic length of the drill shell metrics.
    #[arg(long = "shell-ell", default_value_t = 1.0)]
    shell_ell: f64,
    /// Flat torus AREA:LENGTH for the solid torus checks; repeatable.
    #[arg(long = "torus")]
    tori: Vec<Torus>,
}

#[derive(Debug, Subcommand)]
enum BoundKind {
    /// Drilling a geodesic of length ell with an embedded tube of radius R.
    Drill {
        #[arg(long)]
        vol: f64,
        #[arg(long)]
        ell: f64,
        #[arg(long = "R")]
        radius: f64,
    },
    /// Filling along a slope of length ell on a cusp torus of area A.
    Fill {
        #[arg(long)]
        vol: f64,
        #[arg(long = "A")]
        area: f64,
        #[arg(long)]
        ell: f64,
    },
    /// The simplified filling bound with an explicit constant c.
    FillTheorem {
        #[arg(long)]
        vol: f64,
        #[arg(long = "A")]
        area: f64,
        #[arg(long)]
        ell: f64,
        #[arg(long)]
        c: f64,
    },
    /// Drilling the shortest geodesic, given the injectivity radius.
    Shortest {
        #[arg(long)]
        vol: f64,
        #[arg(long)]
        inj: f64,
        #[arg(long = "R-floor")]
        radius_floor: f64,
    },
}

fn config(command: Command, a: VerifyArgs) -> RunConfig {
    let mut cfg = RunConfig::new(command);
    if let Some(g) = a.r_grid {
        cfg.r_grid = g;
    }
    if let Some(g) = a.ell_grid {
        cfg.ell_grid = g;
    }
    if !a.tori.is_empty() {
        cfg.tori = a.tori;
    }
    cfg.samples = a.samples;
    cfg.tol = a.tol;
    cfg.format = a.format;
    cfg.out = a.out;
    cfg.seed = a.seed;
    cfg.factors = a.factors;
    cfg.shell_ell = a.shell_ell;
    cfg
}

fn output(path: Option<&PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Cmd::VerifyDrill(a) => {
            let cfg = config(Command::VerifyDrill, a);
            let rep = verify_drill(&cfg)?;
            rep.write(cfg.format, output(cfg.out.as_ref())?)?;
            report_failures(&rep.summary.failures);
            Ok(rep.passed())
        }
        Cmd::VerifyFill(a) => {
            let cfg = config(Command::VerifyFill, a);
            let rep = verify_fill(&cfg)?;
            rep.write(cfg.format, output(cfg.out.as_ref())?)?;
            report_failures(&rep.summary.failures);
            Ok(rep.passed())
        }
        Cmd::Constants { samples, format } => {
            let rows = constants_table(samples)?;
            match format {
                Some(Format::Json) => println!("{}", serde_json::to_string_pretty(&rows)?),
                Some(Format::Csv) => {
                    let mut w = csv::Writer::from_writer(io::stdout().lock());
                    for r in &rows {
                        w.serialize(r)?;
                    }
                    w.flush()?;
                }
                None => print!("{}", format_constants(&rows)),
            }
            Ok(true)
        }
        Cmd::Bound {
            kind,
            c_hat,
            samples,
            format,
            out,
        } => {
            let req = match kind {
                BoundKind::Drill { vol, ell, radius } => BoundRequest::Drill { vol, ell, radius },
                BoundKind::Fill { vol, area, ell } => BoundRequest::Fill { vol, area, ell },
                BoundKind::FillTheorem { vol, area, ell, c } => {
                    BoundRequest::FillTheorem { vol, area, ell, c }
                }
                BoundKind::Shortest {
                    vol,
                    inj,
                    radius_floor,
                } => BoundRequest::Shortest {
                    vol,
                    inj,
                    radius_floor,
                },
            };
            let rep = run_bound(&req, c_hat, samples)?;
            match format {
                Some(Format::Json) => println!("{}", serde_json::to_string_pretty(&rep)?),
                _ => print!("{}", format_bound(&rep)),
            }
            if let Some(p) = out {
                let mut w = output(Some(&p))?;
                serde_json::to_writer_pretty(&mut w, &rep)?;
                writeln!(w)?;
            }
            for w in &rep.warnings {
                eprintln!("warning: {w}");
            }
            Ok(rep.all_flags_hold())
        }
    }
}

fn report_failures(failures: &[String]) {
    for f in failures {
        eprintln!("FAILED {f}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
