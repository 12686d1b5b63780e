//! The `armwing` command line.
//!
//! Exit codes: 0 on success, 1 on a domain error (one `error kind=...` line
//! on stderr), 2 on a usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{
    mooney_rivlin_uniaxial, scale_range, sensitivity_rank, sensitivity_sweep, strain_budget_check, AnalysisError,
    MaterialDb, SensitivityResult,
};
use crate::fitting::{optimize_armwing, FitOptions, StageOrder};
use crate::io::{self, IoError, PlotSpec, SeriesStyle, TrajectoryRow};
use crate::linkage::{validate_mechanism, MechanismGraph, SweepMode};
use crate::target::sample_targets;
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "armwing", version, about = "Planar linkage kinematics, gait fitting and sensitivity analysis")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Continuation,
    Independent,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Order {
    HumerusFirst,
    RadiusFirst,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PlotSeries {
    /// Shoulder and elbow angles against phase.
    Angles,
    /// Elbow and wingtip paths in the plane.
    Path,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a mechanism file and print a summary.
    Validate { file: PathBuf },
    /// Solve one configuration; prints JSON.
    Solve {
        #[arg(long)]
        mech: PathBuf,
        /// Crank phase in degrees.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phase: f64,
    },
    /// Sweep one cycle and write the trajectory CSV.
    Sweep {
        #[arg(long)]
        mech: PathBuf,
        #[arg(long, default_value_t = 360)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Mode::Continuation)]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the target gait as a trajectory CSV.
    Target {
        #[arg(long, default_value_t = 360)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the humerus then the radius stage to the targets; prints a JSON report.
    Optimize {
        #[arg(long)]
        mech: PathBuf,
        /// Target CSV; defaults to the built-in target gait.
        #[arg(long)]
        targets: Option<PathBuf>,
        #[arg(long, default_value_t = 360)]
        samples: usize,
        #[arg(long, default_value_t = 10)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_iterations: Option<usize>,
        #[arg(long, value_enum, default_value_t = Order::HumerusFirst)]
        order: Order,
        /// Write the fitted mechanism here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Parameter sensitivity of the wingtip path.
    #[command(group(ArgGroup::new("what").required(true).args(["param", "rank"])))]
    Sensitivity {
        #[arg(long)]
        mech: PathBuf,
        #[arg(long, requires = "range")]
        param: Option<String>,
        /// Scale factors as start:stop:step.
        #[arg(long)]
        range: Option<String>,
        #[arg(long, conflicts_with_all = ["param", "range"])]
        rank: bool,
        #[arg(long, default_value_t = 0.025)]
        delta: f64,
        #[arg(long, default_value_t = 360)]
        samples: usize,
        /// Also draw the path family (with --param).
        #[arg(long, requires = "param")]
        svg: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hinge material checks.
    #[command(group(ArgGroup::new("op").required(true).args(["check", "stretch", "list"])))]
    Material {
        /// Strain budget check of --strain against the elongation at break.
        #[arg(long, requires = "strain")]
        check: bool,
        /// Strain in percent.
        #[arg(long)]
        strain: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        safety_factor: f64,
        /// Uniaxial Mooney-Rivlin stress at this stretch ratio.
        #[arg(long)]
        stretch: Option<f64>,
        #[arg(long, required_unless_present = "list")]
        material: Option<String>,
        #[arg(long)]
        list: bool,
        /// Material database; defaults to $ARMWING_MATERIALS, then the bundled table.
        #[arg(long)]
        db: Option<PathBuf>,
    },
    /// Render trajectory CSV files as SVG.
    Plot {
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = PlotSeries::Angles)]
        series: PlotSeries,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Runs the command line (`argv[0]` is the program name) and returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            1
        }
    }
}

/// `error kind=<Kind> [phase_deg=<deg>] message="<text>"`
pub fn error_line(e: &Error) -> String {
    let phase = e.phase_deg().map(|p| format!(" phase_deg={p:.6}")).unwrap_or_default();
    format!("error kind={}{phase} message={:?}", e.kind(), e.to_string())
}

fn load(path: &Path) -> Result<MechanismGraph, Error> {
    Ok(validate_mechanism(io::parse_mechanism_file(path)?)?)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| IoError::io(p, e))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    Ok(())
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn run(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Validate { file } => {
            let mech = load(&file)?;
            let spec = mech.spec();
            println!(
                "ok {}: {} links, {} joints, {} loops, {} parameters",
                mech.name(),
                spec.links.len(),
                spec.joints.len(),
                mech.loops().len(),
                mech.parameter_names().count()
            );
            Ok(())
        }
        Command::Solve { mech, phase } => {
            let mech = load(&mech)?;
            let conf = mech.solve(phase.to_radians(), None)?;
            let deg = |m: &std::collections::BTreeMap<String, f64>| -> Value {
                m.iter().map(|(k, v)| (k.clone(), json!(v.to_degrees()))).collect()
            };
            let poses: Value = conf
                .link_poses
                .iter()
                .map(|(k, p)| (k.clone(), json!({"x": p.x, "y": p.y, "angle_deg": p.angle.to_degrees()})))
                .collect();
            let points: Value = conf.points.iter().map(|(k, p)| (k.clone(), json!(p))).collect();
            let doc = json!({
                "phase_deg": phase,
                "outputs_deg": deg(&conf.angles),
                "joint_angles_deg": deg(&conf.joint_angles),
                "link_poses": poses,
                "points": points,
                "residual_norm": conf.residual_norm,
            });
            emit(&pretty(&doc), None)
        }
        Command::Sweep { mech, samples, mode, out } => {
            let mech = load(&mech)?;
            let mode = match mode {
                Mode::Continuation => SweepMode::Continuation,
                Mode::Independent => SweepMode::Independent,
            };
            let traj = mech.sweep(samples, mode)?;
            emit(&io::trajectory_csv_string(&traj)?, out.as_deref())
        }
        Command::Target { samples, out } => emit(&io::targets_csv_string(&sample_targets(samples)?)?, out.as_deref()),
        Command::Optimize { mech, targets, samples, starts, seed, max_iterations, order, out, report } => {
            let mech = load(&mech)?;
            let targets = match targets {
                Some(p) => io::targets_from_rows(&io::read_trajectory_csv(&p)?)?,
                None => sample_targets(samples)?,
            };
            let mut options = FitOptions { multistarts: starts, seed, ..FitOptions::default() };
            if let Some(m) = max_iterations {
                options.optimizer.max_iterations = m;
            }
            options.order = match order {
                Order::HumerusFirst => StageOrder::HumerusFirst,
                Order::RadiusFirst => StageOrder::RadiusFirst,
            };
            let fit = optimize_armwing(&mech, &targets, &options)?;
            if let Some(p) = out {
                io::write_mechanism_file(&fit.apply(&mech)?.into_spec(), p)?;
            }
            emit(&pretty(&fit), report.as_deref())
        }
        Command::Sensitivity { mech, param, range, rank, delta, samples, svg, out } => {
            let mech = load(&mech)?;
            if rank {
                let ranking = sensitivity_rank(&mech, delta, samples)?;
                return emit(&pretty(&ranking), out.as_deref());
            }
            let (param, range) = (param.expect("clap group"), range.expect("clap requires"));
            let scales = parse_range(&range)?;
            let result = sensitivity_sweep(&mech, &param, &scales, samples)?;
            if let Some(p) = svg {
                io::write_svg(&io::svg::sensitivity_plot(&result), p)?;
            }
            emit(&pretty(&sensitivity_json(&result)), out.as_deref())
        }
        Command::Material { check, strain, safety_factor, stretch, material, list, db } => {
            let db = match db {
                Some(p) => MaterialDb::from_path(p)?,
                None => MaterialDb::load_default()?,
            };
            if list {
                for name in db.names() {
                    println!("{name}");
                }
                return Ok(());
            }
            let mat = db.get(material.as_deref().expect("clap requires"))?;
            let mut doc = json!({"material": mat.name});
            if check {
                let r = strain_budget_check(strain.expect("clap requires"), mat, safety_factor)?;
                doc["strain_budget"] = json!(r);
            }
            if let Some(l) = stretch {
                doc["stretch"] = json!(l);
                doc["stress_mpa"] = json!(mooney_rivlin_uniaxial(l, mat)?);
            }
            emit(&pretty(&doc), None)
        }
        Command::Plot { trajectory, target, series, out } => {
            let rows = io::read_trajectory_csv(&trajectory)?;
            let target = target.map(|p| io::read_trajectory_csv(&p)).transpose()?;
            io::write_svg(&trajectory_plot(&rows, target.as_deref(), series), out)?;
            Ok(())
        }
    }
}

fn parse_range(text: &str) -> Result<Vec<f64>, Error> {
    let bad = || AnalysisError::InvalidScales(format!("expected start:stop:step, got `{text}`"));
    let parts: Vec<f64> = text.split(':').map(|s| s.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let [start, stop, step] = parts[..] else { return Err(bad().into()) };
    Ok(scale_range(start, stop, step)?)
}

fn sensitivity_json(r: &SensitivityResult) -> Value {
    let outcomes: Vec<Value> = r
        .outcomes
        .iter()
        .map(|o| {
            json!({
                "scale": o.scale,
                "value": o.value,
                "max_deviation_mm": o.max_deviation_mm,
                "failure": o.trajectory.as_ref().err(),
            })
        })
        .collect();
    json!({
        "parameter": r.parameter,
        "nominal_value": r.nominal_value,
        "tracked_point": r.tracked_point,
        "score_mm_per_percent": r.score,
        "outcomes": outcomes,
    })
}

fn trajectory_plot(rows: &[TrajectoryRow], target: Option<&[TrajectoryRow]>, series: PlotSeries) -> PlotSpec {
    let column = |rows: &[TrajectoryRow], x: usize, y: usize| rows.iter().map(|r| [r[x], r[y]]).collect::<Vec<_>>();
    match series {
        PlotSeries::Angles => {
            let mut plot = PlotSpec::new("joint angles", "phase (deg)", "angle (deg)")
                .with_series("shoulder", column(rows, 0, 1), SeriesStyle::Nominal)
                .with_series("elbow", column(rows, 0, 2), SeriesStyle::Nominal);
            if let Some(t) = target {
                plot = plot
                    .with_series("shoulder target", column(t, 0, 1), SeriesStyle::Target)
                    .with_series("elbow target", column(t, 0, 2), SeriesStyle::Target);
            }
            plot
        }
        PlotSeries::Path => {
            let mut plot = PlotSpec::new("elbow and wingtip paths", "x (mm)", "y (mm)")
                .with_series("elbow", column(rows, 3, 4), SeriesStyle::Nominal)
                .with_series("wingtip", column(rows, 5, 6), SeriesStyle::Nominal);
            if let Some(t) = target {
                plot = plot.with_series("wingtip target", column(t, 5, 6), SeriesStyle::Target);
            }
            plot
        }
    }
}
