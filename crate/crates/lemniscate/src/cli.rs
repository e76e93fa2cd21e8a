//! Command-line interface.
//!
//! Five subcommands, long flags only:
//!
//! * `analyze --points cfg.json [--out DIR]` — locate, classify, and certify
//!   every critical point; writes `report.json`, `report.csv`, `morse.json`,
//!   and `manifest.json`, or prints the report to stdout without `--out`;
//! * `construct <family> [--out DIR]` — build a reference family
//!   (`hypercube`, `simplex`, `tetrahedron`, `cube`, `octa-six`, `prism`,
//!   `preassigned`) and write its configuration with closed-form data;
//! * `levelset --points cfg.json --c <value|auto> [--resolution N]` — mesh
//!   the level set `f = c` (R³ → OBJ + topology JSON, R² → contour loops);
//!   a `c` within 1e−3·(value spread) of a critical value is meshed at
//!   `c ± δ` instead, reporting both sides;
//! * `sweep prism --a start:stop:step` — track inventories across the
//!   parameter range and refine every bifurcation;
//! * `verify --suite all|core|topology|construction [--junit FILE]` — run
//!   the self-verification suites, one `[PASS]`/`[FAIL]` line per check.
//!
//! Exit codes: 0 success, 1 usage or I/O failure, 2 violated mathematical
//! invariant. All files and stdout reports are byte-stable: identical
//! inputs produce identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::PointConfiguration;
use crate::error::{Error, Result};
use crate::families::FamilyDescriptor;
use crate::report::{self, RunManifest};
use crate::solver::{self, SolverOptions, SweepRange};
use crate::topology;
use crate::verify::{self, Suite};

#[derive(Parser)]
#[command(
    name = "lemniscate",
    version,
    about = "Critical points and level-set topology of logarithmic potentials",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Locate, classify, and certify all critical points of a configuration
    Analyze(AnalyzeArgs),
    /// Build a reference family and write its configuration and data
    Construct(ConstructArgs),
    /// Mesh a level set f = c and report its topology
    Levelset(LevelsetArgs),
    /// Sweep a family parameter and locate bifurcations
    Sweep(SweepArgs),
    /// Run the self-verification suites
    Verify(VerifyArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Configuration file: {"dimension": N, "points": [[...], ...]}
    #[arg(long)]
    points: PathBuf,
    /// Output directory (report is printed to stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed for the solver's random multistart seeds
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the solver's per-axis grid seeding density
    #[arg(long)]
    grid_density: Option<usize>,
    /// Override the solver's random seed count
    #[arg(long)]
    random_seeds: Option<usize>,
    /// Also write a contour plot script (2-dimensional configurations only)
    #[arg(long)]
    plot_script: bool,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(subcommand)]
    family: FamilyCommand,
    /// Output directory (configuration is printed to stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FamilyCommand {
    /// 2n poles at hypercube edge midpoints scaled by n (needs n >= 3)
    Hypercube {
        #[arg(long)]
        n: usize,
    },
    /// n standard basis vectors in R^n (needs n >= 4)
    Simplex {
        #[arg(long)]
        n: usize,
    },
    /// e1, e2, e3, (1,1,1): inventory (4, 1, 4) with closed-form saddles
    Tetrahedron,
    /// The 8 vertices of the unit cube: inventory (8, 1, 8)
    Cube,
    /// 6 poles with inventory (6, 1, 6)
    OctaSix,
    /// Equilateral triangles at heights ±a on the unit circle
    Prism {
        #[arg(long)]
        a: f64,
    },
    /// 3h poles whose potential has local minima exactly at (0,0,r_j)
    Preassigned {
        /// Comma-separated minima positions r_1 < ... < r_h on the axis
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        minima: Vec<f64>,
        /// Comma-separated saddle positions s_j interleaving the minima
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        saddles: Vec<f64>,
    },
}

#[derive(Args)]
struct LevelsetArgs {
    /// Configuration file: {"dimension": N, "points": [[...], ...]}
    #[arg(long)]
    points: PathBuf,
    /// Level value, or "auto" for a level above every critical value
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    c: String,
    /// Grid cells per axis
    #[arg(long, default_value_t = 96)]
    resolution: usize,
    /// Output directory (topology JSON is printed to stdout when omitted;
    /// OBJ meshes are only written with --out)
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed for the critical-point solve
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write a contour plot script (2-dimensional configurations only)
    #[arg(long)]
    plot_script: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(subcommand)]
    family: SweepFamily,
    /// Output directory (a bifurcation summary is printed without it)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG seed for the per-sample solves
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum SweepFamily {
    /// Sweep the prism height parameter
    Prism {
        /// Parameter range as start:stop:step
        #[arg(long, allow_hyphen_values = true)]
        a: String,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run: all, core, topology, or construction
    #[arg(long, default_value = "all")]
    suite: String,
    /// Write a JUnit-style XML summary to this file
    #[arg(long)]
    junit: Option<PathBuf>,
    /// Check one configuration file instead of the built-in families
    #[arg(long)]
    input: Option<PathBuf>,
    /// RNG seed for the solver
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Parse `args` (including the program name) and run the selected command.
/// Returns the process exit code; stdout/stderr are written here.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    match execute(cli, &argv.join(" ")) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Run a parsed command; returns the stdout text. Split from
/// [`main_with_args`] so tests can inspect output and errors directly.
pub fn execute(cli: Cli, command_line: &str) -> Result<String> {
    match cli.command {
        Command::Analyze(args) => run_analyze(args, command_line),
        Command::Construct(args) => run_construct(args, command_line),
        Command::Levelset(args) => run_levelset(args, command_line),
        Command::Sweep(args) => run_sweep(args, command_line),
        Command::Verify(args) => run_verify(args),
    }
}

/// Parse a command line (without the program name) — test convenience.
pub fn parse_from<I, T>(args: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let mut argv: Vec<String> = vec!["lemniscate".into()];
    argv.extend(args.into_iter().map(Into::into));
    Cli::try_parse_from(argv)
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn load_configuration(path: &Path) -> Result<PointConfiguration> {
    let text = fs::read_to_string(path)?;
    PointConfiguration::from_json_str(&text)
}

/// Write `files` into `dir` plus a `manifest.json` recording them.
fn write_output_dir(
    dir: &Path,
    command_line: &str,
    input: &str,
    options: serde_json::Value,
    rng_seed: u64,
    files: &[(String, String)],
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut manifest =
        RunManifest::new(command_line.to_string(), input.to_string(), options, rng_seed);
    for (name, content) in files {
        fs::write(dir.join(name), content)?;
        manifest.outputs.push(name.clone());
    }
    manifest.outputs.push("manifest.json".into());
    fs::write(dir.join("manifest.json"), report::to_json_string(&manifest.to_json()))?;
    Ok(())
}

fn solver_options(seed: u64) -> SolverOptions {
    SolverOptions { rng_seed: seed, ..SolverOptions::default() }
}

/// Distinct finite critical values, ascending.
fn distinct_values(set: &solver::CriticalSet) -> Vec<f64> {
    let mut values: Vec<f64> = set.points.iter().filter_map(|p| p.value).collect();
    values.sort_by(|a, b| a.total_cmp(b));
    values.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * (b.abs().max(1.0)));
    values
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn run_analyze(args: AnalyzeArgs, command_line: &str) -> Result<String> {
    let cfg = load_configuration(&args.points)?;
    let mut opts = solver_options(args.seed);
    if let Some(d) = args.grid_density {
        opts.grid_density = d;
    }
    if let Some(n) = args.random_seeds {
        opts.random_seed_count = n;
    }
    if args.plot_script && cfg.dimension() != 2 {
        return Err(Error::Usage(format!(
            "--plot-script draws planar contours and needs a 2-dimensional configuration, \
             got dimension {}",
            cfg.dimension()
        )));
    }

    let set = solver::find_critical_points(&cfg, &opts)?;
    let report_json = report::to_json_string(&report::critical_set_json(&set));
    let (minima, saddles, degenerate) = report::kind_counts(&set);

    let mut files: Vec<(String, String)> = vec![
        ("report.json".into(), report_json.clone()),
        ("report.csv".into(), report::critical_set_csv(&set)),
    ];
    let mut summary = format!(
        "analyzed {} poles in dimension {} (span {}): {} minima, {} saddles, {} degenerate\n",
        set.r,
        cfg.dimension(),
        set.span_dim,
        minima,
        saddles,
        degenerate
    );
    if set.local_morse {
        // Errs with the full inventory when the saddle-count identity fails —
        // that is a structural violation and exits with code 2.
        let morse = solver::morse_report(&set)?;
        summary.push_str(&format!("counting identity verified: {}\n", morse.relation));
        files.push((
            "morse.json".into(),
            report::to_json_string(&report::morse_summary_json(&morse)),
        ));
    } else {
        summary.push_str("degenerate critical points present; counting identity not applicable\n");
    }

    if args.plot_script {
        let script = contour_script_for(&cfg, &set)?;
        files.push(("plot_contours.py".into(), script));
    }

    match &args.out {
        Some(dir) => {
            write_output_dir(
                dir,
                command_line,
                &args.points.display().to_string(),
                report::solver_options_json(&opts),
                args.seed,
                &files,
            )?;
            summary.push_str(&format!(
                "wrote {} file(s) to {}\n",
                files.len() + 1,
                dir.display()
            ));
            Ok(summary)
        }
        None => Ok(report_json),
    }
}

/// Contour plot script at representative regular levels of a planar
/// configuration: one per gap between distinct critical values, plus one
/// above the maximum.
fn contour_script_for(
    cfg: &PointConfiguration,
    set: &solver::CriticalSet,
) -> Result<String> {
    let values = distinct_values(set);
    let mut levels = Vec::new();
    if let (Some(first), Some(last)) = (values.first(), values.last()) {
        let spread = (last - first).max(0.5);
        for w in values.windows(2) {
            levels.push(0.5 * (w[0] + w[1]));
        }
        levels.push(last + 0.25 * spread);
        levels.push(last + 0.75 * spread);
    }
    let mut contours = Vec::new();
    for c in levels {
        contours.push(topology::extract_contours(cfg, c, 160)?);
    }
    Ok(report::contour_plot_script(&contours))
}

// ---------------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------------

fn run_construct(args: ConstructArgs, command_line: &str) -> Result<String> {
    let descriptor = match &args.family {
        FamilyCommand::Hypercube { n } => FamilyDescriptor::HypercubeMidpoints { n: *n },
        FamilyCommand::Simplex { n } => FamilyDescriptor::Simplex { n: *n },
        FamilyCommand::Tetrahedron => FamilyDescriptor::Tetrahedron,
        FamilyCommand::Cube => FamilyDescriptor::Cube,
        FamilyCommand::OctaSix => FamilyDescriptor::OctaSix,
        FamilyCommand::Prism { a } => FamilyDescriptor::Prism { a: *a },
        FamilyCommand::Preassigned { minima, saddles } => FamilyDescriptor::Preassigned {
            minima: minima.clone(),
            saddles: saddles.clone(),
        },
    };
    let fam = descriptor.build()?;
    let config_json = report::to_json_string(&fam.to_json());
    match &args.out {
        Some(dir) => {
            write_output_dir(
                dir,
                command_line,
                fam.name.as_str(),
                json!({ "family": descriptor.name() }),
                0,
                &[("config.json".into(), config_json)],
            )?;
            Ok(format!(
                "constructed {} ({} poles in dimension {}); wrote config.json to {}\n",
                fam.name,
                fam.config.len(),
                fam.config.dimension(),
                dir.display()
            ))
        }
        None => Ok(config_json),
    }
}

// ---------------------------------------------------------------------------
// levelset
// ---------------------------------------------------------------------------

fn run_levelset(args: LevelsetArgs, command_line: &str) -> Result<String> {
    let cfg = load_configuration(&args.points)?;
    let dim = cfg.dimension();
    if dim != 2 && dim != 3 {
        return Err(Error::MeshDimension(dim));
    }
    if args.plot_script && dim != 2 {
        return Err(Error::Usage(format!(
            "--plot-script draws planar contours and needs a 2-dimensional configuration, \
             got dimension {dim}"
        )));
    }
    let opts = solver_options(args.seed);
    let set = solver::find_critical_points(&cfg, &opts)?;
    let values = distinct_values(&set);
    let (v_min, v_max) = match (values.first(), values.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(Error::SolverFailure("no finite critical values found".into())),
    };
    let spread = v_max - v_min;

    // Resolve the level: "auto" sits safely above every critical value.
    let c = if args.c == "auto" {
        v_max + 0.5 * spread.max(0.5)
    } else {
        args.c.parse::<f64>().map_err(|_| {
            Error::Usage(format!("--c expects a number or \"auto\", got {:?}", args.c))
        })?
    };
    if !c.is_finite() {
        return Err(Error::Usage(format!("--c must be finite, got {c}")));
    }

    // A singular level cannot be meshed; offset to both sides and report the
    // topology change across the critical value instead.
    let delta = 1e-3 * spread.max(1e-6);
    let nearest = values
        .iter()
        .copied()
        .min_by(|a, b| (a - c).abs().total_cmp(&(b - c).abs()))
        .unwrap();
    let level_plan: Vec<(String, f64)> = if (nearest - c).abs() <= delta {
        vec![
            ("minus".to_string(), nearest - delta),
            ("plus".to_string(), nearest + delta),
        ]
    } else {
        vec![(String::new(), c)]
    };
    let singular = level_plan.len() == 2;

    let mut files: Vec<(String, String)> = Vec::new();
    let mut summary = if singular {
        format!(
            "c = {} is within {} of the critical value {}; meshing both sides\n",
            report::format_float(c),
            report::format_float(delta),
            report::format_float(nearest)
        )
    } else {
        String::new()
    };
    let mut stdout_reports: Vec<String> = Vec::new();

    for (tag, level) in &level_plan {
        let suffix = if tag.is_empty() { String::new() } else { format!("_{tag}") };
        if dim == 3 {
            let mesh = topology::extract_level_set(&cfg, *level, args.resolution)?;
            let chi = topology::euler_characteristic(&mesh)?;
            let topo =
                report::to_json_string(&report::level_topology_json(&mesh, &chi));
            summary.push_str(&format!(
                "f = {}: {} component(s), chi = {:?}, {} triangles\n",
                report::format_float(*level),
                mesh.component_count(),
                chi,
                mesh.triangles.len()
            ));
            files.push((format!("level{suffix}.obj"), report::mesh_obj(&mesh)));
            files.push((format!("topology{suffix}.json"), topo.clone()));
            stdout_reports.push(topo);
        } else {
            let contours = topology::extract_contours(&cfg, *level, args.resolution)?;
            let loops: Vec<serde_json::Value> = contours
                .loops
                .iter()
                .map(|l| {
                    serde_json::Value::Array(
                        l.iter().map(|p| json!([p[0], p[1]])).collect(),
                    )
                })
                .collect();
            let topo = report::to_json_string(&json!({
                "level": contours.level,
                "loops": contours.loops.len(),
                "coordinates": loops,
            }));
            summary.push_str(&format!(
                "f = {}: {} contour loop(s)\n",
                report::format_float(*level),
                contours.loops.len()
            ));
            files.push((format!("contours{suffix}.json"), topo.clone()));
            stdout_reports.push(topo);
            if args.plot_script {
                files.push((
                    format!("plot_contours{suffix}.py"),
                    report::contour_plot_script(std::slice::from_ref(&contours)),
                ));
            }
        }
    }

    match &args.out {
        Some(dir) => {
            write_output_dir(
                dir,
                command_line,
                &args.points.display().to_string(),
                json!({
                    "c": c,
                    "resolution": args.resolution,
                    "solver": report::solver_options_json(&opts),
                }),
                args.seed,
                &files,
            )?;
            summary.push_str(&format!(
                "wrote {} file(s) to {}\n",
                files.len() + 1,
                dir.display()
            ));
            Ok(summary)
        }
        None => Ok(format!("{summary}{}", stdout_reports.join(""))),
    }
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn parse_range(text: &str) -> Result<SweepRange> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Usage(format!(
            "range must be start:stop:step, got {text:?}"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Error::Usage(format!("range component {p:?} is not a number")))
        })
        .collect::<Result<_>>()?;
    SweepRange::new(nums[0], nums[1], nums[2])
}

fn run_sweep(args: SweepArgs, command_line: &str) -> Result<String> {
    let SweepFamily::Prism { a } = &args.family;
    let range = parse_range(a)?;
    let opts = solver_options(args.seed);
    let result = solver::bifurcation_sweep(
        |a| Ok(crate::families::triangular_prism(a)?.config),
        range,
        &opts,
    )?;

    let mut summary = format!(
        "swept {} sample(s): {} bifurcation(s)\n",
        result.rows.len(),
        result.bifurcations.len()
    );
    for b in &result.bifurcations {
        summary.push_str(&format!("bifurcation at a = {}\n", report::format_float(b.parameter)));
    }
    for loss in &result.tracking_losses {
        summary.push_str(&format!("tracking loss: {loss}\n"));
    }

    match &args.out {
        Some(dir) => {
            write_output_dir(
                dir,
                command_line,
                &format!("prism --a {a}"),
                json!({
                    "range": {"start": range.start, "stop": range.stop, "step": range.step},
                    "solver": report::solver_options_json(&opts),
                }),
                args.seed,
                &[
                    ("sweep_samples.csv".into(), report::sweep_samples_csv(&result)),
                    (
                        "bifurcations.csv".into(),
                        report::sweep_bifurcations_csv(&result.bifurcations),
                    ),
                ],
            )?;
            summary.push_str(&format!("wrote 3 file(s) to {}\n", dir.display()));
        }
        None => {
            summary.push_str(&report::sweep_samples_csv(&result));
        }
    }
    Ok(summary)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn run_verify(args: VerifyArgs) -> Result<String> {
    let suite = Suite::parse(&args.suite)?;
    let opts = solver_options(args.seed);
    let report = match &args.input {
        Some(path) => {
            let cfg = load_configuration(path)?;
            verify::run_on_configuration(&cfg, &opts)
        }
        None => verify::run_suite(suite, &opts),
    };
    if let Some(path) = &args.junit {
        fs::write(path, verify::junit_xml(&report.results))?;
    }
    let lines = report.format_lines();
    if report.all_passed() {
        Ok(lines)
    } else {
        // Print the per-check lines even on failure, then exit with the
        // invariant-violation code.
        print!("{lines}");
        Err(Error::TheoremViolation(format!(
            "{} verification check(s) failed",
            report.failed_count()
        )))
    }
}
