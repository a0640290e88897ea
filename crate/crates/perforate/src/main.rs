use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use perforate::cloud::{read_cloud, write_cloud};
use perforate::config::{ScenarioConfig, StudyKind};
use perforate::core::conductivity::{
    channel_bound_check, effective_matrix, CellMask, DomainRule, VariationalProblem,
};
use perforate::core::percolation::{build_field, LatticeParams};
use perforate::core::process::{admissibility_report, default_equidistance_tolerance, sample_poisson};
use perforate::core::thinning::thin;
use perforate::core::{GeometryParams, ProcessParams, ThinningLevel, Window};
use perforate::formats::field_to_pbm;
use perforate::render::compose;
use perforate::scenario::{channel_analysis, percolation_panel, render_artifact, run_scenario};
use perforate::{reports, write_file, Error, Result, OUTPUT_ROOT_ENV};

#[derive(Parser)]
#[command(name = "perforate", version, about = "Random perforations: sampling, thinning, percolation, conductivity and homogenization studies")]
struct Cli {
    /// Root directory for every output path.
    #[arg(long, global = true, env = OUTPUT_ROOT_ENV, default_value = ".")]
    output_root: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a Poisson point cloud.
    Sample {
        #[arg(long = "lambda")]
        intensity: f64,
        /// Disk radius, used for the admissibility summary on stdout.
        #[arg(long)]
        r: f64,
        /// `x0,y0,x1,y1` (or six values in 3D).
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        window: Vec<f64>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply the thinning map at level `n`.
    Thin {
        #[arg(long)]
        cloud: PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Count disjoint channels and the minimal crossing of a cloud's field.
    Percolate {
        #[arg(long)]
        cloud: PathBuf,
        #[arg(long)]
        r: f64,
        #[command(flatten)]
        scale: Scale,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        pbm: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Effective conductivity of a cloud in the box `[0, n/k]^d`.
    Conductivity {
        #[arg(long)]
        cloud: PathBuf,
        #[arg(long)]
        r: f64,
        #[command(flatten)]
        scale: Scale,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        s: usize,
        #[arg(long, value_enum, default_value_t = Rule::Center)]
        rule: Rule,
        /// Exclude filled islands as well (center rule).
        #[arg(long)]
        filled: bool,
        /// Thin the cloud at this level first.
        #[arg(long)]
        thin: Option<usize>,
        /// Also check the channel lower bound.
        #[arg(long)]
        channel_bound: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run only the pde study of a scenario config.
    Pde { config: PathBuf },
    /// Scenario studies.
    Study {
        #[command(subcommand)]
        action: StudyAction,
    },
    /// Render artifacts of a manifest (by path, kind or study) as SVG.
    Render { manifest: PathBuf, selector: String },
}

#[derive(Subcommand)]
enum StudyAction {
    /// Run every study listed in a config and write a manifest.
    Run { config: PathBuf },
}

#[derive(clap::Args)]
#[group(required = true, multiple = false)]
struct Scale {
    #[arg(long)]
    k_scale: Option<usize>,
    /// Assumed critical radius; gives the default `k_scale`.
    #[arg(long)]
    r_c: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Strict,
    Center,
    Cover,
}

impl From<Rule> for DomainRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Strict => DomainRule::Strict,
            Rule::Center => DomainRule::Center,
            Rule::Cover => DomainRule::Cover,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn k_scale(scale: &Scale, dim: usize, r: f64) -> Result<usize> {
    match (scale.k_scale, scale.r_c) {
        (Some(k), _) => Ok(k),
        (None, Some(r_c)) => Ok(LatticeParams::default_k_scale(dim, r, r_c)?),
        (None, None) => Err(Error::Config("give --k-scale or --r-c".into())),
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON value serializes"));
}

fn read_config(path: &Path) -> Result<ScenarioConfig> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })?;
    ScenarioConfig::from_json(&bytes)
}

fn run(cli: Cli) -> Result<()> {
    let root = cli.output_root;
    let out_path = |p: &Path| root.join(p);
    match cli.command {
        Command::Sample {
            intensity,
            r,
            window,
            seed,
            out,
        } => {
            let dim = window.len() / 2;
            if window.len() % 2 != 0 || !(dim == 2 || dim == 3) {
                return Err(Error::Config("--window takes 4 (2D) or 6 (3D) values".into()));
            }
            let w = Window::new(dim, &window[..dim], &window[dim..])?;
            let g = GeometryParams::new(r)?;
            let cloud = sample_poisson(&w, &ProcessParams::new(intensity, seed, dim)?)?;
            write_cloud(&out_path(&out), &cloud)?;
            print_json(&reports::admissibility(&admissibility_report(
                &cloud,
                &g,
                default_equidistance_tolerance(&g),
            )));
        }
        Command::Thin { cloud, r, n, out } => {
            let c = read_cloud(&cloud)?;
            let t = thin(&c, &GeometryParams::new(r)?, ThinningLevel::new(n)?)?;
            write_cloud(&out_path(&out), &t)?;
            print_json(&serde_json::json!({"points": c.len(), "kept": t.len()}));
        }
        Command::Percolate {
            cloud,
            r,
            scale,
            n,
            out,
            pbm,
            svg,
        } => {
            let c = read_cloud(&cloud)?;
            let g = GeometryParams::new(r)?;
            let lattice = LatticeParams::new(k_scale(&scale, c.dim(), r)?, n)?;
            let (field, flow, crossing, agree) = channel_analysis(&c, &g, &lattice)?;
            let report = reports::channels(&field, &flow, crossing.as_ref(), agree);
            write_file(&out_path(&out), &reports::to_pretty(&report))?;
            if let Some(p) = pbm {
                write_file(&out_path(&p), &field_to_pbm(&field)?)?;
            }
            if let Some(p) = svg {
                let panel = percolation_panel(&c, &g, &lattice, &field, &flow, crossing.as_ref());
                write_file(&out_path(&p), compose(&[panel], 480.0).as_bytes())?;
            }
            print_json(&serde_json::json!({"N": flow.count, "L": crossing.map(|c| c.open_count)}));
        }
        Command::Conductivity {
            cloud,
            r,
            scale,
            n,
            s,
            rule,
            filled,
            thin: level,
            channel_bound,
            out,
        } => {
            let mut c = read_cloud(&cloud)?;
            let g = GeometryParams::new(r)?;
            if let Some(l) = level {
                c = thin(&c, &g, ThinningLevel::new(l)?)?;
            }
            let rule: DomainRule = rule.into();
            if filled && rule != DomainRule::Center {
                return Err(Error::Config("--filled needs --rule center".into()));
            }
            let problem = VariationalProblem::new(c.dim(), k_scale(&scale, c.dim(), r)?, n, s, rule)?;
            let mask = if filled {
                CellMask::filled_center(&problem, &c, &g)?
            } else {
                CellMask::for_rule(&problem, &c, &g)?
            };
            let mut report = reports::conductivity(&effective_matrix(&mask, &problem)?);
            if channel_bound {
                let field = build_field(&c, &g, &problem.lattice())?;
                let record = channel_bound_check(&field, &c, &g, &problem.with_rule(DomainRule::Cover))?;
                report["channel_bound"] = reports::bound(&record);
            }
            write_file(&out_path(&out), &reports::to_pretty(&report))?;
            print_json(&serde_json::json!({"a_hat": report["a_hat"], "alpha": report["alpha"]}));
        }
        Command::Pde { config } => {
            let mut cfg = read_config(&config)?;
            cfg.studies = vec![StudyKind::Pde];
            let art = run_scenario(&cfg, &root)?;
            println!("{}", art.manifest_path.display());
        }
        Command::Study {
            action: StudyAction::Run { config },
        } => {
            let art = run_scenario(&read_config(&config)?, &root)?;
            println!("{}", art.manifest_path.display());
        }
        Command::Render { manifest, selector } => {
            println!("{}", render_artifact(&manifest, &selector)?.display());
        }
    }
    Ok(())
}
