use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use xfrac::config::{parse_config_file, BenchmarkSpec, Problem, RawOptions};

/// Fracture-mechanics benchmark runner.
#[derive(Parser)]
#[command(name = "xfrac", version)]
struct Cli {
    /// Benchmark: griffith | edge | inclined | multicrack | bimaterial | dcb
    problem: String,
    /// Mesh sizes, comma-separated and strictly increasing (e.g. 10,20,40,80)
    #[arg(long)]
    mesh: Option<String>,
    /// Cut-element quadrature scheme: sccm | subcell
    #[arg(long)]
    scheme: Option<String>,
    /// Disk rule for the sccm scheme: midpoint | chebyshev
    #[arg(long)]
    rule: Option<String>,
    /// Tip-element integration point budget; a comma list runs the
    /// integration-point sweep mode (griffith)
    #[arg(long = "tip-points")]
    tip_points: Option<String>,
    /// Mesh irregularity factor in [0, 0.5)
    #[arg(long = "alpha-ir")]
    alpha_ir: Option<f64>,
    /// RNG seed for mesh perturbation
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for CSV/SVG files
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the full-scale meshes (100x100 inclined, 72x144 multicrack)
    #[arg(long = "full-scale")]
    full_scale: bool,
    /// key = value config file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_list(s: &str) -> Result<Vec<usize>, xfrac_core::Error> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| xfrac_core::Error::Domain(format!("bad integer '{t}'")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, xfrac_core::Error> {
    let problem = Problem::parse(&cli.problem)?;
    let flags = RawOptions {
        mesh: cli.mesh.as_deref().map(parse_list).transpose()?,
        scheme: cli.scheme,
        rule: cli.rule,
        tip_points: cli.tip_points.as_deref().map(parse_list).transpose()?,
        alpha_ir: cli.alpha_ir,
        seed: cli.seed,
        out: cli.out,
        full_scale: if cli.full_scale { Some(true) } else { None },
    };
    let raw = match &cli.config {
        Some(path) => flags.or(parse_config_file(&std::fs::read_to_string(path)?)?),
        None => flags,
    };
    let spec = BenchmarkSpec::resolve(problem, raw)?;
    xfrac::problems::run(&spec)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
