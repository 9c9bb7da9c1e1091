//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage or parameter errors, 2 for data
//! errors (unreadable, malformed or mismatched inputs).

use std::ffi::OsString;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::index::{format_decimal, EvalReport};
use crate::io::{load_label_map_file, write_report, FormatTag, ReportFormat, RunMeta};
use crate::label_map::{GroundTruthSet, LabelMap};
use crate::oracle::exhaustive_eval;
use crate::sampler::{window_geometry, AwpsParams, AwpsSampler, WindowGeometry};
use crate::stats::{granularity_of, region_count, Granularity};
use crate::sweep::{run_awps, sweep_alpha, sweep_beta, AwpsRun, Workers};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

const DEFAULT_ALPHAS: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
const DEFAULT_BETAS: [f64; 5] = [0.0275, 0.055, 0.11, 0.165, 0.22];

#[derive(Parser, Debug)]
#[command(
    name = "segeval",
    version,
    about = "Compare a segmentation against ground truths with the PR and EPR indices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample pixel-pairs and report PR, EPR and its decomposition.
    Eval {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate over a range of alpha with beta = beta_ratio * alpha.
    SweepAlpha {
        #[command(flatten)]
        inputs: Inputs,
        /// Comma-separated alpha values.
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.1)]
        beta_ratio: f64,
        #[command(flatten)]
        means: Means,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate over a range of beta at fixed alpha.
    SweepBeta {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = AwpsParams::DEFAULT_ALPHA)]
        alpha: f64,
        /// Comma-separated beta values.
        #[arg(long, value_delimiter = ',')]
        betas: Option<Vec<f64>>,
        #[command(flatten)]
        means: Means,
        #[command(flatten)]
        output: Output,
    },
    /// Region counts and pooled bounding-box means of the ground truths.
    Stats {
        #[arg(long = "gt", value_name = "PATH", required = true)]
        gts: Vec<PathBuf>,
        #[arg(long, default_value = "auto", value_parser = parse_format)]
        format: FormatTag,
        #[command(flatten)]
        output: Output,
    },
    /// Dump the sampled pixel-pairs, one `p_row p_col q_row q_col` line each.
    Pairs {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Exhaustive evaluation over every pixel-pair.
    #[command(hide = true)]
    OracleEval {
        #[command(flatten)]
        inputs: Inputs,
        /// Lift the image-size guard.
        #[arg(long)]
        allow_large: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Debug)]
struct Inputs {
    #[arg(long, value_name = "PATH")]
    test: PathBuf,
    /// Ground-truth segmentation; repeat for several.
    #[arg(long = "gt", value_name = "PATH")]
    gts: Vec<PathBuf>,
    #[arg(long, default_value = "auto", value_parser = parse_format)]
    format: FormatTag,
}

#[derive(Args, Debug)]
struct Means {
    /// Pin the mean region width instead of measuring it.
    #[arg(long, requires = "vm")]
    hm: Option<f64>,
    /// Pin the mean region height instead of measuring it.
    #[arg(long, requires = "hm")]
    vm: Option<f64>,
}

#[derive(Args, Debug)]
struct Sampling {
    #[arg(long, default_value_t = AwpsParams::DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = AwpsParams::DEFAULT_BETA)]
    beta: f64,
    #[command(flatten)]
    means: Means,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Write CSV instead of JSON.
    #[arg(long)]
    csv: bool,
}

impl Output {
    fn format(&self) -> ReportFormat {
        if self.csv {
            ReportFormat::Csv
        } else {
            ReportFormat::Json
        }
    }
}

fn parse_format(s: &str) -> std::result::Result<FormatTag, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Means {
    fn pinned(&self) -> Result<Option<Granularity>> {
        match (self.hm, self.vm) {
            (Some(h), Some(v)) => Granularity::pinned(h, v).map(Some),
            _ => Ok(None),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_DATA
            }
        }
    }
}

fn load_inputs(inputs: &Inputs) -> Result<(LabelMap, GroundTruthSet)> {
    if inputs.gts.is_empty() {
        return Err(Error::Parameter("at least one --gt is required".into()));
    }
    let test = load_label_map_file(&inputs.test, inputs.format)?;
    let mut members = Vec::with_capacity(inputs.gts.len());
    for path in &inputs.gts {
        let gt = load_label_map_file(path, inputs.format)?;
        if !gt.same_shape(&test) {
            return Err(Error::Dimension(format!(
                "ground truth is {}x{}, test map is {}x{}",
                gt.width(),
                gt.height(),
                test.width(),
                test.height()
            ))
            .in_file(path));
        }
        members.push(gt);
    }
    Ok((test, GroundTruthSet::new(members)?))
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Error::from(e).in_file(path)),
        None => Ok(stdout.write_all(bytes)?),
    }
}

fn warn_if_collapsed(geometry: WindowGeometry, stderr: &mut dyn Write) {
    if geometry.is_collapsed() {
        let _ = writeln!(
            stderr,
            "warning: grid spacing equals the window size (w = {}x{}, d = {}x{}); \
             the window only samples its anchor row and column",
            geometry.w_h, geometry.w_v, geometry.d_h, geometry.d_v
        );
    }
}

fn meta_of(run: &AwpsRun) -> RunMeta {
    RunMeta {
        alpha: Some(run.params.alpha()),
        beta: Some(run.params.beta()),
        geometry: Some(run.geometry),
    }
}

fn d6(r: crate::index::Rational) -> String {
    format_decimal(r, 6)
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>, trailer: &[String]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row).map_err(err)?;
    }
    let mut bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    for line in trailer {
        bytes.extend_from_slice(line.as_bytes());
        bytes.push(b'\n');
    }
    Ok(bytes)
}

fn index_cells(r: &EvalReport) -> [String; 5] {
    [d6(r.pr()), d6(r.epr()), d6(r.rpp()), d6(r.rmm()), d6(r.rpm())]
}

fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match command {
        Command::Eval {
            inputs,
            sampling,
            output,
        } => {
            let params = AwpsParams::new(sampling.alpha, sampling.beta)?;
            let pinned = sampling.means.pinned()?;
            let (test, gts) = load_inputs(&inputs)?;
            let workers = Workers::from_env()?;
            let run = run_awps(&test, &gts, params, pinned, &workers)?;
            warn_if_collapsed(run.geometry, stderr);
            let bytes = write_report(&run.report, &meta_of(&run), output.format())?;
            emit(output.out.as_deref(), stdout, &bytes)
        }
        Command::SweepAlpha {
            inputs,
            alphas,
            beta_ratio,
            means,
            output,
        } => {
            let alphas = alphas.unwrap_or_else(|| DEFAULT_ALPHAS.to_vec());
            let pinned = means.pinned()?;
            for &alpha in &alphas {
                AwpsParams::new(alpha, alpha * beta_ratio)?;
            }
            let (test, gts) = load_inputs(&inputs)?;
            let workers = Workers::from_env()?;
            let sweep = sweep_alpha(&test, &gts, &alphas, beta_ratio, pinned, &workers)?;
            for run in &sweep.runs {
                warn_if_collapsed(run.geometry, stderr);
            }
            let rows = sweep
                .runs
                .iter()
                .map(|run| {
                    let mut row = vec![run.params.alpha().to_string()];
                    row.extend(index_cells(&run.report));
                    row.push(run.report.t.to_string());
                    row
                })
                .collect();
            let trailer = [
                format!("# alpha_m={}", sweep.alpha_m),
                format!("# alpha_max_abs_rpm={}", sweep.alpha_max_abs_rpm),
            ];
            let bytes = csv_bytes(
                &["alpha", "pr", "epr", "rpp", "rmm", "rpm", "t"],
                rows,
                &trailer,
            )?;
            emit(output.out.as_deref(), stdout, &bytes)
        }
        Command::SweepBeta {
            inputs,
            alpha,
            betas,
            means,
            output,
        } => {
            let betas = betas.unwrap_or_else(|| DEFAULT_BETAS.to_vec());
            let pinned = means.pinned()?;
            for &beta in &betas {
                AwpsParams::new(alpha, beta)?;
            }
            let (test, gts) = load_inputs(&inputs)?;
            let workers = Workers::from_env()?;
            let runs = sweep_beta(&test, &gts, alpha, &betas, pinned, &workers)?;
            for run in &runs {
                warn_if_collapsed(run.geometry, stderr);
            }
            let rows = runs
                .iter()
                .map(|run| {
                    let mut row = vec![run.params.beta().to_string(), run.report.t.to_string()];
                    row.extend(index_cells(&run.report));
                    row
                })
                .collect();
            let bytes = csv_bytes(
                &["beta", "t", "pr", "epr", "rpp", "rmm", "rpm"],
                rows,
                &[],
            )?;
            emit(output.out.as_deref(), stdout, &bytes)
        }
        Command::Stats {
            gts,
            format,
            output,
        } => {
            let maps = gts
                .iter()
                .map(|p| load_label_map_file(p, format))
                .collect::<Result<Vec<_>>>()?;
            let bytes = stats_report(&gts, &maps, output.format())?;
            emit(output.out.as_deref(), stdout, &bytes)
        }
        Command::Pairs {
            inputs,
            sampling,
            out,
        } => {
            let params = AwpsParams::new(sampling.alpha, sampling.beta)?;
            let pinned = sampling.means.pinned()?;
            let test = load_label_map_file(&inputs.test, inputs.format)?;
            let g = match pinned {
                Some(g) => g,
                None => {
                    if inputs.gts.is_empty() {
                        return Err(Error::Parameter(
                            "pairs needs --gt files or both --hm and --vm".into(),
                        ));
                    }
                    let (_, gts) = load_inputs(&inputs)?;
                    crate::stats::granularity(&gts)?
                }
            };
            let geometry = window_geometry(params, &g);
            warn_if_collapsed(geometry, stderr);
            let sampler = AwpsSampler::new(geometry, test.width(), test.height())?;
            match out {
                Some(path) => {
                    let file = std::fs::File::create(&path)
                        .map_err(|e| Error::from(e).in_file(&path))?;
                    dump_pairs(&sampler, &mut BufWriter::new(file))
                        .map_err(|e| e.in_file(&path))
                }
                None => dump_pairs(&sampler, &mut BufWriter::new(stdout)),
            }
        }
        Command::OracleEval {
            inputs,
            allow_large,
            output,
        } => {
            let (test, gts) = load_inputs(&inputs)?;
            let report = exhaustive_eval(&test, &gts, allow_large)?;
            let bytes = write_report(&report, &RunMeta::default(), output.format())?;
            emit(output.out.as_deref(), stdout, &bytes)
        }
    }
}

fn dump_pairs(sampler: &AwpsSampler, w: &mut dyn Write) -> Result<()> {
    for p in sampler.pairs() {
        writeln!(w, "{} {} {} {}", p.p_row, p.p_col, p.q_row, p.q_col)?;
    }
    w.flush()?;
    Ok(())
}

fn stats_report(paths: &[PathBuf], maps: &[LabelMap], fmt: ReportFormat) -> Result<Vec<u8>> {
    let pooled = granularity_of(maps)?;
    let mut members = Vec::with_capacity(maps.len());
    for (path, map) in paths.iter().zip(maps) {
        let own = granularity_of(std::slice::from_ref(map))?;
        members.push((path, map, region_count(map), own));
    }
    match fmt {
        ReportFormat::Json => {
            let list: Vec<Value> = members
                .iter()
                .map(|(path, map, regions, own)| {
                    json!({
                        "path": path.display().to_string(),
                        "width": map.width(),
                        "height": map.height(),
                        "regions": regions,
                        "h_m": own.h_m,
                        "v_m": own.v_m,
                    })
                })
                .collect();
            let mean_regions = pooled.region_total as f64 / maps.len() as f64;
            let v = json!({
                "members": list,
                "k": maps.len(),
                "region_total": pooled.region_total,
                "mean_regions": mean_regions,
                "h_m": pooled.h_m,
                "v_m": pooled.v_m,
            });
            let mut out = serde_json::to_vec_pretty(&v).map_err(|e| Error::Format(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Csv => {
            let mut rows: Vec<Vec<String>> = members
                .iter()
                .map(|(path, _, regions, own)| {
                    vec![
                        path.display().to_string(),
                        regions.to_string(),
                        own.h_m.to_string(),
                        own.v_m.to_string(),
                    ]
                })
                .collect();
            rows.push(vec![
                "pooled".into(),
                pooled.region_total.to_string(),
                pooled.h_m.to_string(),
                pooled.v_m.to_string(),
            ]);
            csv_bytes(&["source", "regions", "h_m", "v_m"], rows, &[])
        }
    }
}
