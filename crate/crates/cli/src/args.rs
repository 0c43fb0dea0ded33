use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orthocub::{BoundingBox, DerivativeOrder, RuleKind};

#[derive(Debug, Parser)]
#[command(
    name = "orthocub",
    version,
    about = "Cubature and differentiation weights by orthogonal moments"
)]
pub struct Cli {
    /// Increase log verbosity (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the reference rule and matrices for one dimension and degree.
    Startup {
        #[arg(long, value_parser = parse_dim)]
        dim: usize,
        /// Polynomial degree n of the target space.
        #[arg(long)]
        ade: usize,
        #[arg(long, default_value = "mpx", value_parser = parse_rule_kind)]
        rule: RuleKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize cubature weights from a bundle and a moment vector.
    Rule {
        #[arg(long)]
        bundle: PathBuf,
        /// Box as a1,b1,a2,b2[,a3,b3]; defaults to the box stored with the moments.
        #[arg(long = "box", value_parser = parse_box, allow_hyphen_values = true)]
        bbox: Option<BoundingBox>,
        #[arg(long)]
        moments: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute moment vectors for a domain.
    #[command(subcommand)]
    Moments(MomentsCommand),
    /// Differential cubature weights at one point.
    DiffWeights {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long = "box", value_parser = parse_box, allow_hyphen_values = true)]
        bbox: BoundingBox,
        /// Evaluation point, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        point: Vec<f64>,
        /// Derivative order, e.g. 1,0 or 0,1,1.
        #[arg(long, value_parser = parse_alpha)]
        alpha: DerivativeOrder,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the numerical experiments.
    #[command(subcommand)]
    Demo(DemoCommand),
}

#[derive(Debug, Subcommand)]
pub enum MomentsCommand {
    /// Area moments of a spline-bounded planar element.
    Spline {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        ade: usize,
        /// Relative inflation of the tight bounding box.
        #[arg(long, default_value_t = 0.0)]
        inflate: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Moments of the QMC sum over a union of balls.
    Qmc {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = orthocub::domains::DEMO_HALTON_COUNT)]
        halton_count: usize,
        #[arg(long)]
        ade: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Spline,
    Qmc,
}

#[derive(Debug, Args)]
pub struct TrialArgs {
    #[arg(long, default_value = "2:2:16", value_parser = parse_degrees)]
    pub degrees: Degrees,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Optional per-degree geometric means.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DomainArgs {
    /// Domain file; the built-in demo geometry when omitted.
    #[arg(long)]
    pub domain: Option<PathBuf>,
    #[arg(long, default_value_t = orthocub::domains::DEMO_HALTON_COUNT)]
    pub halton_count: usize,
}

#[derive(Debug, Subcommand)]
pub enum DemoCommand {
    /// Integration errors over the spline element.
    AdeSpline {
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        trial: TrialArgs,
    },
    /// Compression errors for the QMC sum over the ball union.
    AdeQmc {
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        trial: TrialArgs,
    },
    /// Differentiation errors on the reference square and cube.
    AdeDerivative {
        #[arg(long, default_value = "2,3", value_delimiter = ',', value_parser = parse_dim)]
        dims: Vec<usize>,
        /// Derivative orders (repeatable); all first, second and mixed when omitted.
        #[arg(long, value_parser = parse_alpha)]
        alpha: Vec<DerivativeOrder>,
        #[arg(long, default_value_t = 100)]
        probes: usize,
        #[command(flatten)]
        trial: TrialArgs,
    },
    /// Sorted weights of one synthesized rule.
    WeightsDistribution {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 10)]
        ade: usize,
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stability ratios per degree.
    Sumweights {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value = "2:2:16", value_parser = parse_degrees)]
        degrees: Degrees,
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lebesgue constants of hyperinterpolation and differential cubature.
    Lebesgue {
        #[arg(long, value_parser = parse_dim)]
        dim: usize,
        /// Derivative orders (repeatable); identity, first, second and mixed when omitted.
        #[arg(long, value_parser = parse_alpha)]
        alpha: Vec<DerivativeOrder>,
        #[arg(long, default_value_t = 10_000)]
        probes: usize,
        #[arg(long, default_value = "2:2:16", value_parser = parse_degrees)]
        degrees: Degrees,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Degrees(pub Vec<usize>);

fn parse_dim(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(d @ (2 | 3)) => Ok(d),
        _ => Err(format!("dimension must be 2 or 3, got `{s}`")),
    }
}

fn parse_rule_kind(s: &str) -> Result<RuleKind, String> {
    s.parse().map_err(|e: orthocub::Error| e.to_string())
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number `{p}` in `{s}`"))
        })
        .collect()
}

pub fn parse_box(s: &str) -> Result<BoundingBox, String> {
    let v = parse_floats(s)?;
    if v.len() != 4 && v.len() != 6 {
        return Err(format!(
            "box needs 4 or 6 numbers (a1,b1,a2,b2[,a3,b3]), got {}",
            v.len()
        ));
    }
    let lo = v.iter().step_by(2).copied().collect();
    let hi = v.iter().skip(1).step_by(2).copied().collect();
    BoundingBox::new(lo, hi).map_err(|e| e.to_string())
}

fn parse_alpha(s: &str) -> Result<DerivativeOrder, String> {
    s.parse().map_err(|e: orthocub::Error| e.to_string())
}

/// `start:step:stop`, a comma list, or a single degree.
pub fn parse_degrees(s: &str) -> Result<Degrees, String> {
    let bad = || format!("bad degree list `{s}`: use start:step:stop or a comma list");
    let nums = |sep: char| -> Result<Vec<usize>, String> {
        s.split(sep)
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect()
    };
    let v = if s.contains(':') {
        let parts = nums(':')?;
        match parts[..] {
            [start, step, stop] if step > 0 && start <= stop => {
                (start..=stop).step_by(step).collect()
            }
            [start, stop] if start <= stop => (start..=stop).collect(),
            _ => return Err(bad()),
        }
    } else {
        nums(',')?
    };
    if v.is_empty() {
        return Err(bad());
    }
    Ok(Degrees(v))
}
