use std::fmt::Write as _;
use std::time::Instant;

use anyhow::Result;
use log::info;
use orthocub::geometry::halton_in_box;
use orthocub::io::fmt_f64;
use orthocub::{
    bounding_box, discrete_moments, growth_fit, lebesgue_constant_estimate, orthocub_weights,
    power_law_exponent, qmc_union_balls, random_poly_trial, spline_cheb_moments, stability_ratio,
    startup, BoundingBox, CubatureRule, DerivativeOrder, RuleKind, TrialKind, TrialStats,
};

use crate::args::{DemoCommand, DomainArgs, Kind, TrialArgs};
use crate::{emit, load_balls, load_spline};

const ERROR_HEADER: &str = "dim,functional,degree,trial,relative_error\n";
const SUMMARY_HEADER: &str = "dim,functional,degree,geometric_mean\n";

struct ErrorTable {
    rows: String,
    summary: String,
}

impl ErrorTable {
    fn new() -> Self {
        Self {
            rows: ERROR_HEADER.into(),
            summary: SUMMARY_HEADER.into(),
        }
    }

    fn push(&mut self, dim: usize, label: &str, stats: &TrialStats) {
        for (t, e) in stats.errors.iter().enumerate() {
            let _ = writeln!(
                self.rows,
                "{dim},{label},{},{t},{}",
                stats.degree,
                fmt_f64(*e)
            );
        }
        let _ = writeln!(
            self.summary,
            "{dim},{label},{},{}",
            stats.degree,
            fmt_f64(stats.geometric_mean)
        );
        info!(
            "d = {dim} {label} n = {}: geometric mean {:.3e}",
            stats.degree, stats.geometric_mean
        );
    }

    fn write(&self, trial: &TrialArgs) -> Result<()> {
        if let Some(path) = &trial.summary {
            emit(Some(path), &self.summary)?;
        }
        emit(trial.out.as_deref(), &self.rows)
    }
}

fn spline_rule(domain: &DomainArgs, n: usize) -> Result<CubatureRule> {
    let boundary = load_spline(domain.domain.as_ref())?;
    let bbox = bounding_box(&boundary, 0.0)?;
    let bundle = startup(2, n, RuleKind::NearMinimal)?;
    let t = Instant::now();
    let m = spline_cheb_moments(&boundary, &bbox, &bundle.basis)?;
    let rule = orthocub_weights(&bundle, &bbox, &m)?;
    info!(
        "spline n = {n}: moments and weights in {:.2e} s",
        t.elapsed().as_secs_f64()
    );
    Ok(rule)
}

fn qmc_rules(domain: &DomainArgs, degrees: &[usize]) -> Result<Vec<CubatureRule>> {
    let balls = load_balls(domain.domain.as_ref())?;
    let (measure, bbox) = qmc_union_balls(&balls, domain.halton_count)?;
    info!(
        "retained K = {} of L = {} Halton points",
        measure.len(),
        domain.halton_count
    );
    degrees
        .iter()
        .map(|&n| {
            let bundle = startup(3, n, RuleKind::NearMinimal)?;
            let t = Instant::now();
            let m = discrete_moments(&measure, &bbox, &bundle.basis)?;
            let rule = orthocub_weights(&bundle, &bbox, &m)?;
            info!(
                "qmc n = {n}: moments and weights in {:.2e} s",
                t.elapsed().as_secs_f64()
            );
            Ok(rule)
        })
        .collect()
}

fn all_orders(d: usize, with_identity: bool) -> Vec<DerivativeOrder> {
    let mut v = Vec::new();
    if with_identity {
        v.push(DerivativeOrder::zero(d).expect("supported dimension"));
    }
    v.extend(DerivativeOrder::all_first(d));
    v.extend(DerivativeOrder::all_pure_second(d));
    v.extend(DerivativeOrder::all_mixed(d));
    v
}

pub fn run(cmd: DemoCommand) -> Result<()> {
    match cmd {
        DemoCommand::AdeSpline { domain, trial } => {
            let boundary = load_spline(domain.domain.as_ref())?;
            let mut table = ErrorTable::new();
            for &n in &trial.degrees.0 {
                let kind = TrialKind::IntegrateSpline {
                    boundary: &boundary,
                };
                table.push(
                    2,
                    "spline",
                    &random_poly_trial(kind, n, trial.trials, trial.seed)?,
                );
            }
            table.write(&trial)
        }
        DemoCommand::AdeQmc { domain, trial } => {
            let balls = load_balls(domain.domain.as_ref())?;
            let (measure, bbox) = qmc_union_balls(&balls, domain.halton_count)?;
            info!(
                "retained K = {} of L = {} Halton points",
                measure.len(),
                domain.halton_count
            );
            let mut table = ErrorTable::new();
            for &n in &trial.degrees.0 {
                let kind = TrialKind::IntegrateQmc {
                    measure: &measure,
                    bbox: &bbox,
                };
                table.push(
                    3,
                    "qmc",
                    &random_poly_trial(kind, n, trial.trials, trial.seed)?,
                );
            }
            table.write(&trial)
        }
        DemoCommand::AdeDerivative {
            dims,
            alpha,
            probes,
            trial,
        } => {
            let mut table = ErrorTable::new();
            for d in dims {
                let orders = if alpha.is_empty() {
                    all_orders(d, false)
                } else {
                    alpha.iter().filter(|a| a.dim() == d).copied().collect()
                };
                for a in orders {
                    for &n in &trial.degrees.0 {
                        let kind = TrialKind::Differentiate {
                            alpha: a,
                            probe_count: probes,
                        };
                        table.push(
                            d,
                            &a.label(),
                            &random_poly_trial(kind, n, trial.trials, trial.seed)?,
                        );
                    }
                }
            }
            table.write(&trial)
        }
        DemoCommand::WeightsDistribution {
            kind,
            ade,
            domain,
            out,
        } => {
            let rule = match kind {
                Kind::Spline => spline_rule(&domain, ade)?,
                Kind::Qmc => qmc_rules(&domain, &[ade])?.remove(0),
            };
            let mut w = rule.weights.clone();
            w.sort_by(f64::total_cmp);
            let mut csv = String::from("rank,weight\n");
            for (i, x) in w.iter().enumerate() {
                let _ = writeln!(csv, "{i},{}", fmt_f64(*x));
            }
            emit(out.as_deref(), &csv)
        }
        DemoCommand::Sumweights {
            kind,
            degrees,
            domain,
            out,
        } => {
            let rules = match kind {
                Kind::Spline => degrees
                    .0
                    .iter()
                    .map(|&n| spline_rule(&domain, n))
                    .collect::<Result<Vec<_>>>()?,
                Kind::Qmc => qmc_rules(&domain, &degrees.0)?,
            };
            let mut csv = String::from("degree,nodes,sum_weights,l1_norm,stability_ratio\n");
            for rule in &rules {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    rule.degree,
                    rule.len(),
                    fmt_f64(rule.weights.iter().sum()),
                    fmt_f64(rule.l1_norm()),
                    fmt_f64(stability_ratio(rule)?)
                );
            }
            emit(out.as_deref(), &csv)
        }
        DemoCommand::Lebesgue {
            dim,
            alpha,
            probes,
            degrees,
            out,
        } => {
            let bbox = BoundingBox::reference(dim);
            let points = halton_in_box(&bbox, probes, 1)?;
            let orders = if alpha.is_empty() {
                all_orders(dim, true)
            } else {
                alpha
            };
            let bundles = degrees
                .0
                .iter()
                .map(|&n| startup(dim, n, RuleKind::NearMinimal))
                .collect::<orthocub::Result<Vec<_>>>()?;
            let nf: Vec<f64> = degrees.0.iter().map(|&n| n as f64).collect();
            let mut csv = String::from("alpha,degree,value,fit\n");
            for a in orders {
                if a.dim() != dim {
                    anyhow::bail!("derivative order {} does not match --dim {dim}", a.label());
                }
                let values = bundles
                    .iter()
                    .map(|b| lebesgue_constant_estimate(b, &bbox, &a, &points))
                    .collect::<orthocub::Result<Vec<_>>>()?;
                let power = (2 * a.order()).max(1);
                let fit = growth_fit(&nf, &values, power).ok();
                if let Some(f) = &fit {
                    info!(
                        "{}: degree-{power} fit residual {:.2e}, log-log exponent {:.3}",
                        a.label(),
                        f.relative_residual,
                        power_law_exponent(&nf, &values)?
                    );
                }
                for (n, v) in nf.iter().zip(&values) {
                    let fitted = fit
                        .as_ref()
                        .map(|f| fmt_f64(f.eval(*n)))
                        .unwrap_or_default();
                    let _ = writeln!(csv, "{},{},{},{fitted}", a.label(), n, fmt_f64(*v));
                }
            }
            emit(out.as_deref(), &csv)
        }
    }
}
