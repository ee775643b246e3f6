//! The run life cycle: parse the configuration, read materials, load and
//! validate the mesh, then for every sequence step build the problem, solve
//! it and write the requested outputs.
//!
//! A failing step stops the run; later steps are reported as skipped. A
//! harmonic sweep with some failed frequencies marks its step as partial and
//! the run continues.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::analysis::{
    run_harmonic, run_transient_newmark, solve_eigenfrequency, solve_static, AnalysisSpec, InitialConditions,
    InitialValue, Problem,
};
use crate::config::{
    read_material_file, read_simulation_file, Geometry, Material, MeshSource, SequenceStep, SimulationConfig,
};
use crate::mesh::{generate_grid_mesh, generate_interval_mesh, read_mesh, validate_mesh, GridSides, Mesh};
use crate::results::{write_eigenfrequency_csv, write_probe_csv, write_vtk_unstructured, ProbeHistory, ResultsError};

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// Defaults to the directory of the configuration file.
    pub output_dir: Option<PathBuf>,
    /// Worker threads for assembly and frequency sweeps; 0 means 1.
    pub threads: usize,
    /// Validate configuration, materials and mesh, then stop.
    pub dry_run: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Config,
    Material,
    Mesh,
    Assembly,
    Solve,
    Output,
}

impl Phase {
    /// Module that does the work of this phase.
    pub fn module(self) -> &'static str {
        match self {
            Phase::Config => "sim_config",
            Phase::Material => "sim_config",
            Phase::Mesh => "mesh",
            Phase::Assembly => "integrators",
            Phase::Solve => "analysis",
            Phase::Output => "results_io",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Config => "config",
            Phase::Material => "material",
            Phase::Mesh => "mesh",
            Phase::Assembly => "assembly",
            Phase::Solve => "solve",
            Phase::Output => "output",
        })
    }
}

struct StepTag(Option<usize>);

impl fmt::Display for StepTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(i) => write!(f, "[step {i}]"),
            None => f.write_str("[setup]"),
        }
    }
}

/// Error with the step (if any), phase and module it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct RunError {
    pub step: Option<usize>,
    pub phase: Phase,
    pub message: String,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}] {}: {}",
            StepTag(self.step),
            self.phase,
            self.phase.module(),
            self.message
        )
    }
}

impl std::error::Error for RunError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Success,
    /// At least one harmonic frequency failed; everything else succeeded.
    Partial,
    Failed,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Success => 0,
            RunStatus::Failed => 1,
            RunStatus::Partial => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Completed,
    /// Frequencies (Hz) whose solve failed.
    Partial {
        failed: Vec<f64>,
    },
    Failed,
    Skipped,
    /// Dry run: nothing assembled.
    Validated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub index: usize,
    pub analysis: &'static str,
    pub n_nodes: usize,
    pub n_free: usize,
    pub n_dirichlet: usize,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    pub output_seconds: f64,
    /// CG or subspace iterations, time steps for transient runs.
    pub iterations: Option<usize>,
    /// Eigenfrequencies in Hz, for eigenfrequency steps.
    pub eigenfrequencies: Vec<f64>,
    pub outputs: Vec<PathBuf>,
    pub outcome: StepOutcome,
}

impl StepReport {
    fn new(step: &SequenceStep, n_nodes: usize) -> Self {
        StepReport {
            index: step.index,
            analysis: step.analysis.kind_name(),
            n_nodes,
            n_free: 0,
            n_dirichlet: 0,
            assembly_seconds: 0.0,
            solve_seconds: 0.0,
            output_seconds: 0.0,
            iterations: None,
            eigenfrequencies: Vec::new(),
            outputs: Vec::new(),
            outcome: StepOutcome::Skipped,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// Configuration, material and mesh loading.
    pub parse_seconds: f64,
    pub steps: Vec<StepReport>,
    pub status: RunStatus,
    pub error: Option<RunError>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StepStatus {
    Done,
    Partial,
}

/// Runs every sequence step of the configuration at `config_path`.
pub fn run_simulation(config_path: impl AsRef<Path>, overrides: &Overrides) -> RunReport {
    let threads = overrides.threads.max(1);
    let config_path = config_path.as_ref();
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| run_inner(config_path, overrides)),
        Err(e) => RunReport {
            parse_seconds: 0.0,
            steps: Vec::new(),
            status: RunStatus::Failed,
            error: Some(RunError {
                step: None,
                phase: Phase::Config,
                message: format!("cannot start {threads} worker threads: {e}"),
            }),
        },
    }
}

fn run_inner(config_path: &Path, overrides: &Overrides) -> RunReport {
    let start = Instant::now();
    let mut report = RunReport {
        parse_seconds: 0.0,
        steps: Vec::new(),
        status: RunStatus::Success,
        error: None,
    };
    let fail = |mut report: RunReport, error: RunError| {
        log::error!("{error}");
        report.status = RunStatus::Failed;
        report.error = Some(error);
        report
    };
    let setup_error = |phase: Phase, message: String| RunError {
        step: None,
        phase,
        message,
    };

    let base = config_path.parent().map(Path::to_path_buf).unwrap_or_default();
    log::info!("[setup][config] reading {}", config_path.display());
    let cfg = match read_simulation_file(config_path) {
        Ok(c) => c,
        Err(e) => return fail(report, setup_error(Phase::Config, e.to_string())),
    };
    let materials = match load_materials(&cfg, &base) {
        Ok(m) => m,
        Err(message) => return fail(report, setup_error(Phase::Material, message)),
    };
    let mesh = match load_mesh(&cfg, &base) {
        Ok(m) => m,
        Err(message) => return fail(report, setup_error(Phase::Mesh, message)),
    };
    report.parse_seconds = start.elapsed().as_secs_f64();
    log::info!(
        "[setup][mesh] {} nodes, {} elements, dimension {}",
        mesh.node_count(),
        mesh.elements.len(),
        mesh.dim
    );

    report.steps = cfg
        .steps
        .iter()
        .map(|s| StepReport::new(s, mesh.node_count()))
        .collect();
    if overrides.dry_run {
        for s in &mut report.steps {
            s.outcome = StepOutcome::Validated;
        }
        log::info!("[setup][config] dry run: configuration and mesh are valid");
        return report;
    }

    let out_dir = overrides.output_dir.clone().unwrap_or(base);
    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        return fail(
            report,
            setup_error(Phase::Output, format!("cannot create `{}`: {e}", out_dir.display())),
        );
    }

    let mut states: HashMap<usize, Vec<Vec<f64>>> = HashMap::new();
    for (k, step) in cfg.steps.iter().enumerate() {
        let ctx = StepContext {
            cfg: &cfg,
            mesh: &mesh,
            materials: &materials,
            out_dir: &out_dir,
            states: &states,
        };
        match run_step(&ctx, step, &mut report.steps[k]) {
            Ok((status, state)) => {
                if let Some(state) = state {
                    states.insert(step.index, state);
                }
                if status == StepStatus::Partial {
                    report.status = RunStatus::Partial;
                }
            }
            Err(error) => {
                report.steps[k].outcome = StepOutcome::Failed;
                return fail(report, error);
            }
        }
    }
    report
}

fn load_materials(cfg: &SimulationConfig, base: &Path) -> Result<BTreeMap<String, Material>, String> {
    let path = base.join(&cfg.material_file);
    log::info!("[setup][material] reading {}", path.display());
    let materials = read_material_file(&path).map_err(|e| e.to_string())?;
    for r in &cfg.regions {
        if !materials.contains_key(&r.material) {
            return Err(format!(
                "region `{}` refers to material `{}`, which `{}` does not define",
                r.region,
                r.material,
                path.display()
            ));
        }
    }
    Ok(materials)
}

fn load_mesh(cfg: &SimulationConfig, base: &Path) -> Result<Mesh, String> {
    let mesh = match &cfg.mesh {
        MeshSource::Gmsh { file } => {
            let path = base.join(file);
            log::info!("[setup][mesh] reading {}", path.display());
            read_mesh(&path)
        }
        MeshSource::Interval {
            length,
            elements,
            region,
            left,
            right,
        } => generate_interval_mesh(*length, *elements, region, left, right),
        MeshSource::Grid {
            lx,
            ly,
            nx,
            ny,
            region,
            left,
            right,
            bottom,
            top,
        } => generate_grid_mesh(*lx, *ly, *nx, *ny, region, &GridSides::new(left, right, bottom, top)),
    }
    .map_err(|e| e.to_string())?;

    let diagnostics = validate_mesh(&mesh);
    if let Some(first) = diagnostics.first() {
        return Err(format!("{} problem(s); first: {first}", diagnostics.len()));
    }
    if cfg.geometry == Geometry::Plane && mesh.dim > 2 {
        return Err(format!(
            "geometryType `plane` needs a mesh of dimension ≤ 2, found {}",
            mesh.dim
        ));
    }
    let known = mesh.region_names();
    let mut referenced: Vec<&str> = cfg.regions.iter().map(|r| r.region.as_str()).collect();
    for step in &cfg.steps {
        let bcs = &step.pde.bcs;
        referenced.extend(
            bcs.dirichlet
                .iter()
                .chain(&bcs.neumann)
                .chain(&bcs.sources)
                .map(|b| b.region.as_str()),
        );
    }
    if let Some(missing) = referenced.iter().find(|r| !known.iter().any(|k| k == *r)) {
        return Err(format!(
            "region `{missing}` does not exist in the mesh (available: {})",
            known.join(", ")
        ));
    }
    Ok(mesh)
}

struct StepContext<'a> {
    cfg: &'a SimulationConfig,
    mesh: &'a Mesh,
    materials: &'a BTreeMap<String, Material>,
    out_dir: &'a Path,
    /// Nodal results of earlier static (one field) and eigenfrequency (one
    /// field per mode) steps.
    states: &'a HashMap<usize, Vec<Vec<f64>>>,
}

type StepResult = Result<(StepStatus, Option<Vec<Vec<f64>>>), RunError>;

fn run_step(ctx: &StepContext, step: &SequenceStep, report: &mut StepReport) -> StepResult {
    let i = step.index;
    let err = |phase: Phase| {
        move |e: &dyn fmt::Display| RunError {
            step: Some(i),
            phase,
            message: e.to_string(),
        }
    };
    log::info!(
        "[step {i}][assembly] {} analysis on {}",
        step.analysis.kind_name(),
        step.pde.regions.join(", ")
    );

    let t = Instant::now();
    let speeds: BTreeMap<String, f64> = step
        .pde
        .regions
        .iter()
        .map(|r| {
            let material = ctx.cfg.material_of(r).expect("regions are checked at parse time");
            (r.clone(), ctx.materials[material].c)
        })
        .collect();
    let problem = Problem::new(ctx.mesh, &step.pde.regions, &speeds, step.pde.bcs.clone())
        .map_err(|e| err(Phase::Assembly)(&e))?;
    report.n_free = problem.dofmap.n_free();
    report.n_dirichlet = problem.dofmap.n_dirichlet();
    report.assembly_seconds = t.elapsed().as_secs_f64();
    log::info!(
        "[step {i}][assembly] {} free, {} Dirichlet unknowns ({:.3} s)",
        report.n_free,
        report.n_dirichlet,
        report.assembly_seconds
    );

    let writer = Writer {
        ctx,
        index: i,
        vtk: ctx.cfg.output.vtk && step.pde.store.is_some(),
    };
    let probes: Vec<ProbeHistory> = ctx
        .cfg
        .output
        .probes
        .iter()
        .map(|&p| ProbeHistory::new(ctx.mesh, p))
        .collect::<Result<_, _>>()
        .map_err(|e| err(Phase::Output)(&e))?;
    let mut status = StepStatus::Done;
    let mut state = None;

    match &step.analysis {
        AnalysisSpec::Static => {
            let t = Instant::now();
            let (field, iterations) = solve_static(&problem).map_err(|e| err(Phase::Solve)(&e))?;
            report.solve_seconds = t.elapsed().as_secs_f64();
            report.iterations = Some(iterations);
            log::info!("[step {i}][solve] CG converged in {iterations} iterations");

            let t = Instant::now();
            if writer.vtk {
                report.outputs.push(writer.vtk_file(&field, "static".into())?);
            }
            if !probes.is_empty() {
                let histories = sample(probes, [(0.0, &field.values)]);
                report.outputs.push(writer.probes(&histories)?);
            }
            report.output_seconds = t.elapsed().as_secs_f64();
            state = Some(vec![field.values]);
        }
        AnalysisSpec::Transient(spec) => {
            let ics = initial_conditions(ctx, step).map_err(|m| err(Phase::Solve)(&m))?;
            let nodes: Vec<usize> = probes.iter().map(|p| p.node).collect();
            let save_every = if writer.vtk {
                step.pde.store.as_ref().map_or(0, |s| s.save_every)
            } else {
                0
            };
            let t = Instant::now();
            let out =
                run_transient_newmark(&problem, spec, &ics, save_every, &nodes).map_err(|e| err(Phase::Solve)(&e))?;
            report.solve_seconds = t.elapsed().as_secs_f64();
            report.iterations = Some(spec.n_steps);
            let drift = out.energy.iter().map(|e| (e - out.energy[0]).abs()).fold(0.0, f64::max);
            log::info!(
                "[step {i}][solve] {} time steps, max energy drift {drift:.3e}",
                spec.n_steps
            );

            let t = Instant::now();
            for (n, field) in &out.snapshots {
                report
                    .outputs
                    .push(writer.vtk_file(field, format!("transient_{n:05}"))?);
            }
            if !probes.is_empty() {
                let mut histories = probes;
                for (h, values) in histories.iter_mut().zip(&out.probes) {
                    h.series = out.times.iter().copied().zip(values.iter().copied()).collect();
                }
                report.outputs.push(writer.probes(&histories)?);
            }
            report.output_seconds = t.elapsed().as_secs_f64();
        }
        AnalysisSpec::Harmonic { frequencies } => {
            let t = Instant::now();
            let results = run_harmonic(&problem, frequencies);
            report.solve_seconds = t.elapsed().as_secs_f64();
            let mut failed = Vec::new();
            let mut solved = Vec::new();
            for (k, (f, r)) in frequencies.iter().zip(results).enumerate() {
                match r {
                    Ok(field) => solved.push((k, field)),
                    Err(e) => {
                        log::warn!("[step {i}][solve] f = {f} Hz failed: {e}");
                        failed.push(*f);
                    }
                }
            }
            log::info!(
                "[step {i}][solve] {} of {} frequencies solved",
                solved.len(),
                frequencies.len()
            );

            let t = Instant::now();
            if writer.vtk {
                for (k, field) in &solved {
                    report.outputs.push(writer.vtk_file(field, format!("harmonic_{k:03}"))?);
                }
            }
            if !probes.is_empty() {
                let histories = sample(probes, solved.iter().map(|(_, f)| (f.time_or_freq, &f.values)));
                report.outputs.push(writer.probes(&histories)?);
            }
            report.output_seconds = t.elapsed().as_secs_f64();
            if !failed.is_empty() {
                status = StepStatus::Partial;
                report.outcome = StepOutcome::Partial { failed };
            }
        }
        AnalysisSpec::Eigenfrequency { modes, shift } => {
            let t = Instant::now();
            let (found, iterations) =
                solve_eigenfrequency(&problem, *modes, *shift).map_err(|e| err(Phase::Solve)(&e))?;
            report.solve_seconds = t.elapsed().as_secs_f64();
            report.iterations = Some(iterations);
            report.eigenfrequencies = found.iter().map(|m| m.frequency).collect();
            for (k, m) in found.iter().enumerate() {
                log::info!("[step {i}][solve] mode {}: f = {:.9e} Hz", k + 1, m.frequency);
            }

            let t = Instant::now();
            if writer.vtk {
                for (k, m) in found.iter().enumerate() {
                    report
                        .outputs
                        .push(writer.vtk_file(&m.field, format!("mode_{:02}", k + 1))?);
                }
            }
            let table: Vec<(f64, f64)> = found.iter().map(|m| (m.lambda, m.frequency)).collect();
            let path = writer.path("eigenfrequencies.csv");
            write_eigenfrequency_csv(&table, &path).map_err(|e| err(Phase::Output)(&e))?;
            report.outputs.push(path);
            report.output_seconds = t.elapsed().as_secs_f64();
            state = Some(found.into_iter().map(|m| m.field.values).collect());
        }
    }
    if status == StepStatus::Done {
        report.outcome = StepOutcome::Completed;
    }
    for path in &report.outputs {
        log::debug!("[step {i}][output] wrote {}", path.display());
    }
    Ok((status, state))
}

fn initial_conditions(ctx: &StepContext, step: &SequenceStep) -> Result<InitialConditions, String> {
    let Some(spec) = &step.pde.initial else {
        return Ok(InitialConditions::default());
    };
    let p0 = match (spec.from_step, &spec.p0) {
        (Some(from), _) => {
            let fields = ctx
                .states
                .get(&from)
                .ok_or_else(|| format!("step {from} left no state to start from"))?;
            let mode = spec.mode.unwrap_or(1);
            let field = fields
                .get(mode - 1)
                .ok_or_else(|| format!("step {from} computed {} mode(s), mode {mode} requested", fields.len()))?;
            InitialValue::Nodal(field.clone())
        }
        (None, Some(e)) => InitialValue::Expression(e.clone()),
        (None, None) => InitialValue::default(),
    };
    let dp0 = spec.dp0.clone().map(InitialValue::Expression).unwrap_or_default();
    Ok(InitialConditions { p0, dp0 })
}

fn sample<'v>(mut probes: Vec<ProbeHistory>, rows: impl IntoIterator<Item = (f64, &'v Vec<f64>)>) -> Vec<ProbeHistory> {
    for (x, values) in rows {
        for p in &mut probes {
            p.series.push((x, values[p.node]));
        }
    }
    probes
}

struct Writer<'a> {
    ctx: &'a StepContext<'a>,
    index: usize,
    vtk: bool,
}

impl Writer<'_> {
    fn path(&self, suffix: &str) -> PathBuf {
        self.ctx.out_dir.join(format!("step{}_{suffix}", self.index))
    }

    fn error(&self, e: ResultsError) -> RunError {
        RunError {
            step: Some(self.index),
            phase: Phase::Output,
            message: e.to_string(),
        }
    }

    fn vtk_file(&self, field: &crate::analysis::ResultField, stem: String) -> Result<PathBuf, RunError> {
        let path = self.path(&format!("{stem}.vtk"));
        write_vtk_unstructured(self.ctx.mesh, field, &path).map_err(|e| self.error(e))?;
        Ok(path)
    }

    fn probes(&self, histories: &[ProbeHistory]) -> Result<PathBuf, RunError> {
        let path = self.path("probes.csv");
        write_probe_csv(histories, &path).map_err(|e| self.error(e))?;
        Ok(path)
    }
}
