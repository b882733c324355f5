use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use levelset_spectral::datagen::{simulate_mixture, write_points, MixtureSpec};
use levelset_spectral::pipeline::{
    read_summary, run_baseline, run_pipeline, stage_seed, BandwidthSpec, InputSpec, LevelSpec,
    PipelineConfig, PipelineRun, SIMULATION_STAGE,
};
use levelset_spectral::Error;

#[derive(Parser)]
#[command(name = "levelset-spectral", version, about = "Spectral clustering on a density level set")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a sample from the four-component planar mixture and write it as CSV.
    Simulate {
        #[arg(long, default_value_t = 1900)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the level-set spectral clustering pipeline.
    Cluster(RunArgs),
    /// Run plain spectral clustering on the whole sample (level forced to 0).
    Baseline(RunArgs),
    /// Print the summary of a finished run directory.
    Report {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON pipeline config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV point file; the mixture is simulated when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Sample size of the simulated mixture.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, conflicts_with = "level")]
    retain_fraction: Option<f64>,
    #[arg(long)]
    level: Option<f64>,
    /// Fixed KDE bandwidth.
    #[arg(long, conflicts_with = "bandwidth_grid")]
    bandwidth: Option<f64>,
    /// Comma-separated candidate bandwidths for cross-validation.
    #[arg(long, value_delimiter = ',')]
    bandwidth_grid: Option<Vec<f64>>,
    /// Similarity graph radius h.
    #[arg(long)]
    scale_h: Option<f64>,
    #[arg(long)]
    zero_tol: Option<f64>,
    /// Embedding dimension; defaults to the zero-eigenvalue count.
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Output directory for the CSV reports and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the similarity matrix as a Matrix Market triplet file.
    #[arg(long)]
    dump_graph: Option<PathBuf>,
    /// Print the component count and d_min of the h-ball graph.
    #[arg(long)]
    report_components: bool,
}

impl RunArgs {
    fn into_config(self) -> Result<PipelineConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::from_json_file(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(path) = self.input {
            cfg.input = InputSpec::Csv(path);
            if self.config.is_none() {
                cfg.truth_noise_label = None;
            }
        }
        if let Some(n) = self.n {
            match &mut cfg.input {
                InputSpec::Simulate { n: size, .. } => *size = n,
                InputSpec::Csv(_) => {
                    return Err(Error::Validation("--n only applies to simulated input".into()))
                }
            }
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(p) = self.retain_fraction {
            cfg.level = LevelSpec::RetainFraction(p);
        }
        if let Some(t) = self.level {
            cfg.level = LevelSpec::Fixed(t);
        }
        if let Some(b) = self.bandwidth {
            cfg.bandwidth = BandwidthSpec::Fixed(b);
        }
        if let Some(grid) = self.bandwidth_grid {
            cfg.bandwidth = BandwidthSpec::Grid(grid);
        }
        if let Some(h) = self.scale_h {
            cfg.scale_h = h;
        }
        if let Some(tol) = self.zero_tol {
            cfg.zero_tol = tol;
        }
        if self.ell.is_some() {
            cfg.ell = self.ell;
        }
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        if self.out.is_some() {
            cfg.output_dir = self.out;
        }
        if self.dump_graph.is_some() {
            cfg.dump_graph = self.dump_graph;
        }
        Ok(cfg)
    }
}

fn print_run(run: &PipelineRun, report_components: bool) {
    let s = &run.summary;
    println!("n = {}, j(n) = {}, t = {:.6}, bandwidth = {:.6}", s.n, s.jn, s.t, s.bandwidth);
    println!("zero eigenvalues (tol {:e}): {}", s.zero_tol, s.ell_hat);
    println!("clusters: {:?}, noise: {}, inertia: {:e}", s.cluster_sizes, s.noise_count, s.inertia);
    if let Some(ari) = s.ari {
        println!("ARI vs ground truth: {ari:.6}");
    }
    if report_components {
        match s.d_min {
            Some(d) => println!("components: {}, d_min = {d:.6}", s.component_count),
            None => println!("components: {}, d_min undefined", s.component_count),
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate { n, seed, out } => {
            let spec = MixtureSpec::default().with_seed(stage_seed(seed, SIMULATION_STAGE));
            let points = simulate_mixture(&spec, n)?;
            write_points(&points, &out)?;
            println!("wrote {} points to {}", points.len(), out.display());
        }
        Command::Cluster(args) => {
            let report = args.report_components;
            let run = run_pipeline(&args.into_config()?)?;
            print_run(&run, report);
        }
        Command::Baseline(args) => {
            let report = args.report_components;
            let run = run_baseline(&args.into_config()?)?;
            print_run(&run, report);
        }
        Command::Report { out } => {
            let s = read_summary(&out)?;
            println!("{}", serde_json::to_string_pretty(&s)?);
            println!("scree (first {} eigenvalues of I - S):", s.eigenvalues_head.len());
            for (k, mu) in s.eigenvalues_head.iter().enumerate() {
                println!("{k:>4} {mu:.3e}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::EmptyLevelSet { .. } => 2,
                Error::Eigensolver { .. } => 3,
                _ => 1,
            })
        }
    }
}
