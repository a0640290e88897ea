//! Runs the studies selected by a [`ScenarioConfig`] and records every
//! emitted file in a manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use perforate_core::conductivity::{
    channel_bound_check, compare_filled, effective_matrix, CellMask, DomainRule, VariationalProblem,
};
use perforate_core::geometry::{clusters, fill, FilledRaster};
use perforate_core::pde::{
    build_perforated_grid, convergence_study, solve_eps, solve_homogenized, ConvergenceTable, EpsScenario,
    HomogenizedCoefficients, InitialScaling, SolverConfig,
};
use perforate_core::percolation::{
    build_field, count_channels_with, min_open_crossing, ChannelFlow, Crossing, FlowStrategy, LatticeField,
    LatticeParams,
};
use perforate_core::process::{admissibility_report, default_equidistance_tolerance, sample_poisson_replica};
use perforate_core::stats::poisson_vacancy_2d;
use perforate_core::thinning::{conditions_hold, thin};
use perforate_core::{GeometryParams, PointCloud, ThinningLevel, Window};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::cloud::cloud_to_json;
use crate::config::{level, window_from, ScenarioConfig, StudyKind};
use crate::formats::{field_to_pbm, raster_to_pgm, snapshots_to_bytes, to_csv};
use crate::manifest::{sha256_hex, ArtifactWriter, Manifest};
use crate::render::{compose, Panel};
use crate::{parallel, reports, Error, Result};

const FIGURE_HEIGHT: f64 = 480.0;

/// A file produced by a study, relative to the scenario directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Emitted {
    pub path: String,
    pub kind: &'static str,
    pub bytes: Vec<u8>,
}

impl Emitted {
    fn new(path: impl Into<String>, kind: &'static str, bytes: Vec<u8>) -> Self {
        Emitted {
            path: path.into(),
            kind,
            bytes,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StudyArtifact {
    pub dir: PathBuf,
    pub manifest_path: PathBuf,
    pub manifest: Manifest,
}

/// Executes the selected studies (concurrently; each is deterministic in the
/// config) and writes their files plus `manifest.json` below
/// `root/output_dir`.
pub fn run_scenario(cfg: &ScenarioConfig, root: &Path) -> Result<StudyArtifact> {
    cfg.validate()?;
    let mut studies = cfg.studies.clone();
    studies.sort();
    studies.dedup();
    let results: Vec<(StudyKind, f64, Result<Vec<Emitted>>)> = studies
        .par_iter()
        .map(|&kind| {
            let t = Instant::now();
            let out = run_study(cfg, kind);
            (kind, t.elapsed().as_secs_f64(), out)
        })
        .collect();

    let dir = root.join(&cfg.output_dir);
    let mut manifest = Manifest::new(sha256_hex(&cfg.canonical_json()), cfg.seed);
    let mut files = Vec::new();
    for (kind, secs, out) in results {
        manifest.timings.insert(kind.name().into(), secs);
        files.push((kind, out?));
    }
    let mut writer = ArtifactWriter::new(&dir, manifest)?;
    writer.write("config.json", "config", "scenario", &cfg.canonical_json())?;
    for (kind, emitted) in files {
        for e in emitted {
            writer.write(&e.path, e.kind, kind.name(), &e.bytes)?;
        }
    }
    let (manifest_path, manifest) = writer.finish()?;
    Ok(StudyArtifact {
        dir,
        manifest_path,
        manifest,
    })
}

pub fn run_study(cfg: &ScenarioConfig, kind: StudyKind) -> Result<Vec<Emitted>> {
    let name = kind.name();
    let wrap = Error::in_study;
    match kind {
        StudyKind::Sample => sample_study(cfg).map_err(|e| rewrap(e, name)),
        StudyKind::Thin => thin_study(cfg).map_err(|e| rewrap(e, name)),
        StudyKind::Percolate => percolate_study(cfg).map_err(|e| rewrap(e, name)),
        StudyKind::Conductivity => conductivity_study(cfg).map_err(|e| rewrap(e, name)),
        StudyKind::Stats => stats_study(cfg).map_err(|e| rewrap(e, name)),
        StudyKind::Pde => pde_study(cfg).map_err(|e| rewrap(e, name)),
    }
    .map_err(|e| match e {
        Error::Core(c) => wrap(name)(c),
        other => other,
    })
}

fn rewrap(e: Error, study: &'static str) -> Error {
    match e {
        Error::Core(source) => Error::Study { study, source },
        other => other,
    }
}

fn sampled_cloud(cfg: &ScenarioConfig) -> Result<PointCloud> {
    Ok(sample_poisson_replica(&cfg.sampling_window()?, &cfg.process_params()?, 0)?)
}

/// Filled raster at the default resolution, planar clouds only.
fn planar_raster(cloud: &PointCloud, g: &GeometryParams) -> Result<Option<FilledRaster>> {
    if cloud.dim() != 2 {
        return Ok(None);
    }
    Ok(Some(fill(cloud, g, g.default_resolution())?))
}

pub fn cloud_panel(title: &str, cloud: &PointCloud, g: &GeometryParams, raster: Option<&FilledRaster>) -> Panel {
    let mut p = Panel::new(title, cloud.window());
    if let Some(r) = raster {
        p.islands(r);
    }
    p.disks(cloud, g.r);
    p
}

fn sample_study(cfg: &ScenarioConfig) -> Result<Vec<Emitted>> {
    let g = cfg.geometry_params()?;
    let cloud = sampled_cloud(cfg)?;
    let adm = admissibility_report(&cloud, &g, default_equidistance_tolerance(&g));
    let mut out = vec![
        Emitted::new("sample/cloud.json", "cloud", cloud_to_json(&cloud)),
        Emitted::new("sample/admissibility.json", "report", reports::to_pretty(&reports::admissibility(&adm))),
    ];
    if let Some(raster) = planar_raster(&cloud, &g)? {
        out.push(Emitted::new("sample/filled.pgm", "raster", raster_to_pgm(&raster)?));
        let svg = compose(&[cloud_panel("x", &cloud, &g, Some(&raster))], FIGURE_HEIGHT);
        out.push(Emitted::new("sample/cloud.svg", "svg", svg.into_bytes()));
    }
    Ok(out)
}

#[derive(Serialize)]
struct ThinRow {
    level: usize,
    points: usize,
    kept: usize,
    clusters: usize,
    max_cluster_size: usize,
    max_cluster_diameter: f64,
    conditions_hold: bool,
}

fn thin_study(cfg: &ScenarioConfig) -> Result<Vec<Emitted>> {
    let g = cfg.geometry_params()?;
    let cloud = sampled_cloud(cfg)?;
    if cloud.dim() != 2 {
        return Err(Error::Config("the thin study is planar".into()));
    }
    let mut out = vec![Emitted::new("thin/cloud.json", "cloud", cloud_to_json(&cloud))];
    let mut rows = Vec::new();
    let mut panels = vec![cloud_panel("x", &cloud, &g, planar_raster(&cloud, &g)?.as_ref())];
    for &n in &cfg.thinning.levels {
        let lvl = level(n)?;
        let t = thin(&cloud, &g, lvl)?;
        let cs = clusters(&t, &g);
        rows.push(ThinRow {
            level: n,
            points: cloud.len(),
            kept: t.len(),
            clusters: cs.len(),
            max_cluster_size: cs.max_size(),
            max_cluster_diameter: cs.max_diameter(&t),
            conditions_hold: conditions_hold(&t, &g, lvl)?,
        });
        out.push(Emitted::new(format!("thin/cloud_n{n}.json"), "thinned", cloud_to_json(&t)));
        panels.push(cloud_panel(&format!("x^({n})"), &t, &g, planar_raster(&t, &g)?.as_ref()));
    }
    out.push(Emitted::new("thin/summary.csv", "table", to_csv(&rows)?));
    out.push(Emitted::new("thin/ladder.svg", "svg", compose(&panels, FIGURE_HEIGHT).into_bytes()));
    Ok(out)
}

/// Field, channels by both augmentation strategies and (2D) the minimal
/// crossing of a cloud on a lattice.
pub fn channel_analysis(
    cloud: &PointCloud,
    g: &GeometryParams,
    lattice: &LatticeParams,
) -> Result<(LatticeField, ChannelFlow, Option<Crossing>, bool)> {
    let field = build_field(cloud, g, lattice)?;
    let flow = count_channels_with(&field, FlowStrategy::ShortestAugmenting);
    let other = count_channels_with(&field, FlowStrategy::DepthFirst);
    let crossing = if field.dim() == 2 { Some(min_open_crossing(&field)?) } else { None };
    let agree = flow.count == other.count;
    Ok((field, flow, crossing, agree))
}

pub fn percolation_panel(
    cloud: &PointCloud,
    g: &GeometryParams,
    lattice: &LatticeParams,
    field: &LatticeField,
    flow: &ChannelFlow,
    crossing: Option<&Crossing>,
) -> Panel {
    let side = lattice.box_side();
    let mut p = Panel::new(format!("N = {}", flow.count), &Window::square(0.0, side));
    p.lattice(field, 1.0 / lattice.k_scale as f64);
    let inside: Vec<[f64; 2]> = cloud
        .points()
        .iter()
        .filter(|q| q[0] > -g.r && q[0] < side + g.r && q[1] > -g.r && q[1] < side + g.r)
        .map(|q| [q[0], q[1]])
        .collect();
    let near = PointCloud::planar(cloud.window().to_owned(), &inside).expect("subset of a valid cloud");
    p.disks(&near, g.r);
    p.witnesses(field, 1.0 / lattice.k_scale as f64, Some(flow), crossing);
    p
}

fn percolate_study(cfg: &ScenarioConfig) -> Result<Vec<Emitted>> {
    let g = cfg.geometry_params()?;
    let p = cfg.process_params()?;
    let k = cfg.k_scale()?;
    let lattice = LatticeParams::new(k, cfg.lattice.n)?;
    let window = lattice.sampling_window(p.dim, &g);
    let cloud = sample_poisson_replica(&window, &p, 0)?;
    let (field, flow, crossing, agree) = channel_analysis(&cloud, &g, &lattice)?;
    let mut out = vec![
        Emitted::new("percolate/cloud.json", "cloud", cloud_to_json(&cloud)),
        Emitted::new(
            "percolate/channels.json",
            "channels",
            reports::to_pretty(&reports::channels(&field, &flow, crossing.as_ref(), agree)),
        ),
    ];
    if field.dim() == 2 {
        out.push(Emitted::new("percolate/field.pbm", "field", field_to_pbm(&field)?));
        let panel = percolation_panel(&cloud, &g, &lattice, &field, &flow, crossing.as_ref());
        out.push(Emitted::new("percolate/channels.svg", "svg", compose(&[panel], FIGURE_HEIGHT).into_bytes()));
    }
    if let Some(c) = &cfg.lattice.crossing {
        let rows = parallel::crossing_probability(&p, &g, k, &c.ns, c.c1, c.replicas)?;
        #[derive(Serialize)]
        struct Row {
            n: usize,
            hits: usize,
            replicas: usize,
            p: f64,
            ci_lo: f64,
            ci_hi: f64,
        }
        let rows: Vec<Row> = rows
            .iter()
            .map(|r| Row {
                n: r.n,
                hits: r.hits,
                replicas: r.replicas,
                p: r.p,
                ci_lo: r.ci_lo,
                ci_hi: r.ci_hi,
            })
            .collect();
        out.push(Emitted::new("percolate/crossing.csv", "table", to_csv(&rows)?));
    }
    if let Some(d) = &cfg.lattice.decay {
        let lat = LatticeParams::new(k, d.n)?;
        let table = parallel::blocked_diameter_stats(&p, &g, &lat, d.replicas, d.m_max)?;
        out.push(Emitted::new("percolate/decay.csv", "table", to_csv(&reports::decay_rows(&table))?));
        out.push(Emitted::new("percolate/decay_fit.json", "report", reports::to_pretty(&reports::decay_fit(&table))));
    }
    Ok(out)
}

/// Sampling window for a variational box: the box `[0, L]^d` grown by `r`
/// plus the cluster diameter bound `2nr` when thinned, or `pad` otherwise.
pub fn conductivity_window(problem: &VariationalProblem, g: &GeometryParams, lvl: Option<ThinningLevel>, pad: f64) -> Window {
    let extra = match lvl {
        Some(l) => 2.0 * l.get() as f64 * g.r,
        None => pad,
    };
    let side = problem.side();
    let w = if problem.dim == 3 {
        Window::cube(0.0, side)
    } else {
        Window::square(0.0, side)
    };
    w.grow(g.r + extra)
}

fn conductivity_study(cfg: &ScenarioConfig) -> Result<Vec<Emitted>> {
    let c = &cfg.conductivity;
    let g = cfg.geometry_params()?;
    let p = cfg.process_params()?;
    let rule: DomainRule = c.rule.into();
    if c.filled && rule != DomainRule::Center {
        return Err(Error::Config("conductivity.filled needs the center rule".into()));
    }
    let problem = VariationalProblem::new(p.dim, cfg.k_scale()?, c.n, c.s, rule)?;
    let lvl = c.level.map(level).transpose()?;
    let raw = sample_poisson_replica(&conductivity_window(&problem, &g, lvl, c.pad), &p, 0)?;
    let cloud = match lvl {
        Some(l) => thin(&raw, &g, l)?,
        None => raw,
    };
    let mask = if c.filled {
        CellMask::filled_center(&problem, &cloud, &g)?
    } else {
        CellMask::for_rule(&problem, &cloud, &g)?
    };
    let report = effective_matrix(&mask, &problem)?;
    let mut out = vec![
        Emitted::new("conductivity/cloud.json", "cloud", cloud_to_json(&cloud)),
        Emitted::new("conductivity/report.json", "conductivity", reports::to_pretty(&reports::conductivity(&report))),
    ];
    if c.compare_filled {
        let cmp = compare_filled(&cloud, &g, &problem)?;
        out.push(Emitted::new(
            "conductivity/filled_comparison.json",
            "conductivity",
            reports::to_pretty(&reports::filled_comparison(&cmp)),
        ));
    }
    if c.channel_bound {
        let cover = problem.with_rule(DomainRule::Cover);
        let field = build_field(&cloud, &g, &problem.lattice())?;
        let record = channel_bound_check(&field, &cloud, &g, &cover)?;
        out.push(Emitted::new("conductivity/channel_bound.json", "report", reports::to_pretty(&reports::bound(&record))));
    }
    Ok(out)
}

#[derive(Serialize)]
struct VacancyRow {
    level: Option<usize>,
    filled: bool,
    estimate: f64,
    se: f64,
    replicas: usize,
    margin: f64,
}

fn stats_study(cfg: &ScenarioConfig) -> Result<Vec<Emitted>> {
    let s = &cfg.stats;
    let g = cfg.geometry_params()?;
    let p = cfg.process_params()?;
    let w = window_from(&s.window, p.dim, "stats.window")?;
    let levels: Vec<Option<usize>> = std::iter::once(None).chain(s.levels.iter().copied().map(Some)).collect();
    let lvl = |n: Option<usize>| n.map(level).transpose();
    let mut out = Vec::new();
    let mut summary = serde_json::Map::new();
    if s.intensity {
        let mut rows = Vec::new();
        for &n in &levels {
            let r = parallel::point_intensity(&w, &p, &g, lvl(n)?, s.replicas)?;
            rows.push(reports::LadderRow::from_report(n, &r));
        }
        out.push(Emitted::new("stats/intensity.csv", "table", to_csv(&rows)?));
    }
    if s.vacancy {
        let mut rows = Vec::new();
        for (n, filled) in [(None, false), (None, true)]
            .into_iter()
            .chain(s.levels.iter().map(|&n| (Some(n), true)))
        {
            let r = parallel::vacancy(&w, &p, &g, lvl(n)?, filled, s.replicas)?;
            rows.push(VacancyRow {
                level: n,
                filled,
                estimate: r.estimate,
                se: r.se,
                replicas: r.replicas,
                margin: r.margin,
            });
        }
        out.push(Emitted::new("stats/vacancy.csv", "table", to_csv(&rows)?));
        if p.dim == 2 {
            summary.insert("poisson_vacancy".into(), json!(poisson_vacancy_2d(p.intensity, g.r)));
        }
    }
    if s.surface && p.dim == 2 {
        let mut rows = Vec::new();
        for &n in &levels {
            let r = parallel::surface_intensity(&w, &p, &g, lvl(n)?, s.replicas)?;
            rows.push(reports::LadderRow::from_surface(n, &r));
        }
        out.push(Emitted::new("stats/surface.csv", "table", to_csv(&rows)?));
    }
    summary.insert("replicas".into(), json!(s.replicas));
    out.push(Emitted::new("stats/summary.json", "report", reports::to_pretty(&summary.into())));
    Ok(out)
}

/// Coefficients for the homogenized problem, estimated where the config
/// leaves them open.
pub fn homogenized_coefficients(cfg: &ScenarioConfig) -> Result<HomogenizedCoefficients> {
    let c = &cfg.pde.coefficients;
    let g = cfg.geometry_params()?;
    let p = cfg.process_params()?;
    let lvl = level(cfg.pde.level)?;
    let w = Window::square(0.0, c.window_side);
    let c1 = match c.c1 {
        Some(v) => v,
        None => parallel::vacancy(&w, &p, &g, Some(lvl), true, c.replicas)?.estimate,
    };
    let c2 = match c.c2 {
        Some(v) => v,
        None => parallel::surface_intensity(&w, &p, &g, Some(lvl), c.replicas)?.estimate,
    };
    let a_matrix = match c.a_matrix {
        Some(a) => a,
        None => {
            let problem = VariationalProblem::new(2, c.k_scale, c.n, c.s, DomainRule::Center)?;
            let raw = sample_poisson_replica(&conductivity_window(&problem, &g, Some(lvl), 0.0), &p, 0)?;
            let cloud = thin(&raw, &g, lvl)?;
            let a = effective_matrix(&CellMask::filled_center(&problem, &cloud, &g)?, &problem)?.a_hat;
            [[a[0][0], a[0][1]], [a[1][0], a[1][1]]]
        }
    };
    let coeffs = HomogenizedCoefficients { c1, c2, a_matrix };
    coeffs.validate()?;
    Ok(coeffs)
}

/// One cloud shared by the whole ladder, covering every `Q/ε` grown by
/// `2r + 2nr`.
pub fn ladder_scenarios(cfg: &ScenarioConfig) -> Result<Vec<EpsScenario>> {
    let pc = &cfg.pde;
    let g = cfg.geometry_params()?;
    let lvl = level(pc.level)?;
    let q = pc.q_window()?;
    let margin = 2.0 * g.r + 2.0 * lvl.get() as f64 * g.r;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for &eps in &pc.eps {
        for k in 0..2 {
            lo[k] = lo[k].min(q.lo[k] / eps - margin);
            hi[k] = hi[k].max(q.hi[k] / eps + margin);
        }
    }
    let window = Window::new(2, &lo, &hi)?;
    let cloud = sample_poisson_replica(&window, &cfg.process_params()?, 0)?;
    Ok(pc
        .eps
        .iter()
        .map(|&eps| EpsScenario {
            eps,
            cloud: cloud.clone(),
            geometry: g,
            level: lvl,
            cells_per_unit: pc.cells_per_unit,
            dt: pc.dt,
        })
        .collect())
}

fn scaling_name(s: InitialScaling) -> &'static str {
    match s {
        InitialScaling::Paper => "paper",
        InitialScaling::Plain => "plain",
    }
}

#[derive(Serialize)]
struct ConvergenceCsvRow {
    eps: f64,
    error: f64,
    hole_cells: usize,
    kept_clusters: usize,
    sup_l2_sq: f64,
    grad_l2l2_sq: f64,
}

fn convergence_csv(t: &ConvergenceTable) -> Result<Vec<u8>> {
    let rows: Vec<ConvergenceCsvRow> = t
        .rows
        .iter()
        .map(|r| ConvergenceCsvRow {
            eps: r.eps,
            error: r.error,
            hole_cells: r.hole_cells,
            kept_clusters: r.kept_clusters,
            sup_l2_sq: r.sup_l2_sq,
            grad_l2l2_sq: r.grad_l2l2_sq,
        })
        .collect();
    to_csv(&rows)
}

fn pde_study(cfg: &ScenarioConfig) -> Result<Vec<Emitted>> {
    let pc = &cfg.pde;
    let params = pc.params()?;
    let coeffs = homogenized_coefficients(cfg)?;
    let ladder = ladder_scenarios(cfg)?;
    let solver = SolverConfig {
        picard_sweeps: pc.picard_sweeps,
        ..SolverConfig::default()
    };
    let params_hash = sha256_hex(&serde_json::to_vec(pc).expect("pde config serializes"));
    let mut out = vec![Emitted::new(
        "pde/coefficients.json",
        "report",
        reports::to_pretty(&json!({"c1": coeffs.c1, "c2": coeffs.c2, "a_matrix": coeffs.a_matrix})),
    )];
    let mut monotone = serde_json::Map::new();
    let tables: Vec<(InitialScaling, Result<ConvergenceTable>)> = pc
        .initial_scaling
        .modes()
        .into_par_iter()
        .map(|s| (s, convergence_study(&ladder, &coeffs, &params, s, &solver).map_err(Error::from)))
        .collect();
    for (s, table) in tables {
        let table = table?;
        monotone.insert(scaling_name(s).into(), json!(table.monotone));
        out.push(Emitted::new(
            format!("pde/convergence_{}.csv", scaling_name(s)),
            "table",
            convergence_csv(&table)?,
        ));
    }
    out.push(Emitted::new("pde/monotone.json", "report", reports::to_pretty(&monotone.into())));
    if pc.snapshots {
        let finest = ladder
            .iter()
            .min_by(|a, b| a.eps.total_cmp(&b.eps))
            .expect("validated nonempty ladder");
        let grid = build_perforated_grid(finest, &params.q)?;
        let sol = solve_eps(&grid, &params, finest, &solver)?;
        let (bin, side) = snapshots_to_bytes(&sol, &params_hash);
        out.push(Emitted::new("pde/u_eps.bin", "snapshots", bin));
        out.push(Emitted::new("pde/u_eps.json", "sidecar", side));
        for s in pc.initial_scaling.modes() {
            let hom = solve_homogenized(&coeffs, &params, pc.cells_per_unit, pc.dt, s, &solver)?;
            let (bin, side) = snapshots_to_bytes(&hom, &params_hash);
            out.push(Emitted::new(format!("pde/u_hom_{}.bin", scaling_name(s)), "snapshots", bin));
            out.push(Emitted::new(format!("pde/u_hom_{}.json", scaling_name(s)), "sidecar", side));
        }
    }
    Ok(out)
}

/// Renders the artifacts selected by path, kind or study name into an SVG
/// next to the manifest and records it there.
pub fn render_artifact(manifest_path: &Path, selector: &str) -> Result<PathBuf> {
    let mut manifest = Manifest::load(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let config_entry = manifest
        .select("config")
        .first()
        .copied()
        .cloned()
        .ok_or_else(|| Error::MissingArtifact("config.json".into()))?;
    let cfg = ScenarioConfig::from_json(&manifest.read_entry(&dir, &config_entry)?)?;
    let g = cfg.geometry_params()?;
    let selected: Vec<_> = manifest.select(selector).into_iter().cloned().collect();
    if selected.is_empty() {
        return Err(Error::MissingArtifact(selector.into()));
    }
    let panels = if let Some(ch) = selected.iter().find(|e| e.kind == "channels") {
        let find = |kind: &str| {
            manifest
                .files
                .iter()
                .find(|e| e.study == ch.study && e.kind == kind)
                .cloned()
                .ok_or_else(|| Error::MissingArtifact(format!("{} of study {}", kind, ch.study)))
        };
        let cloud = crate::cloud::cloud_from_json(&manifest.read_entry(&dir, &find("cloud")?)?)?;
        let field = crate::formats::field_from_pbm(&manifest.read_entry(&dir, &find("field")?)?)?;
        let report: serde_json::Value =
            serde_json::from_slice(&manifest.read_entry(&dir, ch)?).map_err(|e| Error::json(&ch.path, e))?;
        let (flow, crossing) = witnesses_from_json(&report, &field)?;
        let lattice = LatticeParams::new(cfg.k_scale()?, field.n())?;
        vec![percolation_panel(&cloud, &g, &lattice, &field, &flow, crossing.as_ref())]
    } else {
        let mut panels = Vec::new();
        for e in selected.iter().filter(|e| e.kind == "cloud" || e.kind == "thinned") {
            let cloud = crate::cloud::cloud_from_json(&manifest.read_entry(&dir, e)?)?;
            let title = Path::new(&e.path)
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("")
                .replace("cloud_n", "x^(")
                .replace("cloud", "x");
            let title = if title.starts_with("x^(") { format!("{title})") } else { title };
            panels.push(cloud_panel(&title, &cloud, &g, planar_raster(&cloud, &g)?.as_ref()));
        }
        panels
    };
    if panels.is_empty() {
        return Err(Error::Format(format!("nothing renderable matches `{selector}`")));
    }
    let name: String = selector
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect();
    let rel = format!("render/{name}.svg");
    let svg = compose(&panels, FIGURE_HEIGHT);
    let mut writer = ArtifactWriter::new(&dir, manifest.clone())?;
    writer.write(&rel, "svg", "render", svg.as_bytes())?;
    manifest = writer.finish()?.1;
    debug_assert!(manifest.files.iter().any(|f| f.path == rel));
    Ok(dir.join(rel))
}

fn witnesses_from_json(report: &serde_json::Value, field: &LatticeField) -> Result<(ChannelFlow, Option<Crossing>)> {
    let bad = || Error::Format("malformed channel report".into());
    let vertex = |z: &serde_json::Value| -> Result<usize> {
        let z = z.as_array().ok_or_else(bad)?;
        let mut c = [0usize; 3];
        for (k, v) in z.iter().enumerate().take(3) {
            c[k] = v.as_u64().ok_or_else(bad)? as usize;
            if c[k] >= field.n() {
                return Err(bad());
            }
        }
        Ok(field.index(c))
    };
    let path = |p: &serde_json::Value| -> Result<Vec<usize>> { p.as_array().ok_or_else(bad)?.iter().map(vertex).collect() };
    let channels: Vec<Vec<usize>> = report["channels"].as_array().ok_or_else(bad)?.iter().map(path).collect::<Result<_>>()?;
    let crossing = match (&report["crossing"], report["L"].as_u64()) {
        (serde_json::Value::Null, _) => None,
        (p, Some(l)) => Some(Crossing {
            open_count: l as usize,
            path: path(p)?,
        }),
        _ => return Err(bad()),
    };
    Ok((
        ChannelFlow {
            count: channels.len(),
            channels,
        },
        crossing,
    ))
}
