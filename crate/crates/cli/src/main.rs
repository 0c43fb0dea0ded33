mod args;
mod demo;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use log::info;
use orthocub::io::{
    read_json, rule_to_csv, to_json, write_atomic, BallDomainFile, BoxFile, CubatureRuleFile,
    MomentsFile, PointWeightsFile, RuleFile, SplineDomainFile,
};
use orthocub::{
    bounding_box, diff_weights, discrete_moments, map_rule, orthocub_weights, qmc_union_balls,
    spline_cheb_moments, startup, BallUnion, SplineBoundary, StartupBundle,
};

use args::{Cli, Command, Format, MomentsCommand};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(2)
        }
    }
}

/// Joins the error chain, skipping causes already quoted by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !msg.contains(&text) {
            if !msg.is_empty() {
                msg.push_str(": ");
            }
            msg.push_str(&text);
        }
    }
    msg
}

/// Writes to `out` atomically, or to stdout.
pub(crate) fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            write_atomic(path, text).with_context(|| format!("writing {}", path.display()))?;
            info!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn load_bundle(path: &Path) -> Result<StartupBundle> {
    read_json::<RuleFile>(path)
        .and_then(RuleFile::into_bundle)
        .with_context(|| format!("loading bundle {}", path.display()))
}

pub(crate) fn load_spline(path: Option<&PathBuf>) -> Result<SplineBoundary> {
    match path {
        Some(p) => read_json::<SplineDomainFile>(p)
            .and_then(|f| f.build())
            .with_context(|| format!("loading spline domain {}", p.display())),
        None => Ok(orthocub::domains::default_spline_element()?),
    }
}

pub(crate) fn load_balls(path: Option<&PathBuf>) -> Result<BallUnion> {
    match path {
        Some(p) => read_json::<BallDomainFile>(p)
            .and_then(|f| f.build())
            .with_context(|| format!("loading ball domain {}", p.display())),
        None => Ok(orthocub::domains::default_ball_union()?),
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Startup {
            dim,
            ade,
            rule,
            out,
        } => {
            let bundle = startup(dim, ade, rule)?;
            info!(
                "{rule} rule, d = {dim}, n = {ade}: {} nodes, {} basis elements, defect {:.1e}",
                bundle.rule.len(),
                bundle.basis.len(),
                bundle.orthonormality_defect()
            );
            emit(out.as_deref(), &to_json(&RuleFile::from(&bundle))?)
        }
        Command::Rule {
            bundle,
            bbox,
            moments,
            format,
            out,
        } => {
            let bundle = load_bundle(&bundle)?;
            let m = read_json::<MomentsFile>(&moments)
                .and_then(MomentsFile::into_moments)
                .with_context(|| format!("loading moments {}", moments.display()))?;
            let bbox = bbox.unwrap_or_else(|| m.bbox.clone());
            let rule = orthocub_weights(&bundle, &bbox, &m)?;
            let text = match format {
                Format::Json => to_json(&CubatureRuleFile::from(&rule))?,
                Format::Csv => rule_to_csv(&rule),
            };
            emit(out.as_deref(), &text)
        }
        Command::Moments(MomentsCommand::Spline {
            domain,
            ade,
            inflate,
            out,
        }) => {
            let boundary = load_spline(Some(&domain))?;
            let bbox = bounding_box(&boundary, inflate)?;
            let basis = orthocub::grlex_indices(2, ade)?;
            let m = spline_cheb_moments(&boundary, &bbox, &basis)?;
            emit(out.as_deref(), &to_json(&MomentsFile::from(&m))?)
        }
        Command::Moments(MomentsCommand::Qmc {
            domain,
            halton_count,
            ade,
            out,
        }) => {
            let balls = load_balls(Some(&domain))?;
            if balls.dim() != 3 {
                bail!("QMC ball unions must be 3-dimensional");
            }
            let (measure, bbox) = qmc_union_balls(&balls, halton_count)?;
            info!("retained {} of {halton_count} Halton points", measure.len());
            let basis = orthocub::grlex_indices(3, ade)?;
            let m = discrete_moments(&measure, &bbox, &basis)?;
            emit(out.as_deref(), &to_json(&MomentsFile::from(&m))?)
        }
        Command::DiffWeights {
            bundle,
            bbox,
            point,
            alpha,
            out,
        } => {
            let bundle = load_bundle(&bundle)?;
            let w = diff_weights(&bundle, &bbox, &point, &alpha)?;
            if w.outside_box {
                log::warn!("point {point:?} lies outside the box; weights extrapolate");
            }
            let (nodes, _) = map_rule(&bundle, &bbox)?;
            let file = PointWeightsFile {
                point,
                alpha: alpha.components().to_vec(),
                bbox: BoxFile::from(&bbox),
                nodes: nodes.to_rows(),
                weights: w.weights,
                outside_box: w.outside_box,
            };
            emit(out.as_deref(), &to_json(&file)?)
        }
        Command::Demo(cmd) => demo::run(cmd),
    }
}
