//! JSON and CSV interchange.
//!
//! Every float is written with 17 significant digits so files round-trip
//! bit for bit. Files are written to a temporary sibling and renamed into
//! place.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::basis::{grlex_indices, IndexBasis};
use crate::error::{Error, Result};
use crate::functional::{BoundingBox, CubatureRule, MomentVector};
use crate::geometry::{spline_boundary_build, BallUnion, EndCondition, SplineBoundary};
use crate::points::PointSet;
use crate::rules::{ReferenceRule, RuleKind, StartupBundle, MEASURE_TAG};

/// `{:.16e}`: 17 significant digits, always parseable as a JSON number.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

/// Writes `contents` to a temporary file next to `path` and renames it over
/// `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, &to_json(value)?)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    from_json(&fs::read_to_string(path)?)
}

fn rows_to_points(dim: usize, rows: &[Vec<f64>]) -> Result<PointSet> {
    PointSet::from_rows(dim, rows)
}

fn indices_rows(basis: &IndexBasis) -> Vec<Vec<usize>> {
    basis.indices().map(|i| i.to_vec()).collect()
}

fn check_indices(basis: &IndexBasis, rows: &[Vec<usize>]) -> Result<()> {
    if rows.len() != basis.len() || rows.iter().zip(basis.indices()).any(|(r, i)| r != i) {
        return Err(Error::BasisMismatch(format!(
            "basis indices do not match the graded ordering for d = {}, n = {}",
            basis.dim(),
            basis.degree()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxFile {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl From<&BoundingBox> for BoxFile {
    fn from(b: &BoundingBox) -> Self {
        Self {
            lo: b.lo().to_vec(),
            hi: b.hi().to_vec(),
        }
    }
}

impl BoxFile {
    pub fn into_box(self) -> Result<BoundingBox> {
        BoundingBox::new(self.lo, self.hi)
    }
}

/// Reference rule or startup bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleFile {
    pub dim: usize,
    pub ade: usize,
    pub degree: usize,
    pub rule_kind: String,
    pub measure: String,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_indices: Option<Vec<Vec<usize>>>,
}

impl From<&ReferenceRule> for RuleFile {
    fn from(r: &ReferenceRule) -> Self {
        Self {
            dim: r.dim,
            ade: r.ade(),
            degree: r.degree,
            rule_kind: r.kind.to_string(),
            measure: MEASURE_TAG.to_string(),
            nodes: r.nodes.to_rows(),
            weights: r.weights.clone(),
            basis_indices: None,
        }
    }
}

impl From<&StartupBundle> for RuleFile {
    fn from(b: &StartupBundle) -> Self {
        Self {
            basis_indices: Some(indices_rows(&b.basis)),
            ..Self::from(&b.rule)
        }
    }
}

impl RuleFile {
    pub fn into_rule(self) -> Result<ReferenceRule> {
        if self.ade != 2 * self.degree {
            return Err(Error::InvalidArgument(format!(
                "ade {} is not twice the degree {}",
                self.ade, self.degree
            )));
        }
        if self.measure != MEASURE_TAG {
            return Err(Error::InvalidArgument(format!(
                "unsupported reference measure `{}`",
                self.measure
            )));
        }
        Ok(ReferenceRule {
            dim: self.dim,
            degree: self.degree,
            kind: self.rule_kind.parse::<RuleKind>()?,
            nodes: rows_to_points(self.dim, &self.nodes)?,
            weights: self.weights,
        })
    }

    /// Rebuilds the bundle matrices from the stored rule.
    pub fn into_bundle(self) -> Result<StartupBundle> {
        let indices = self.basis_indices.clone();
        let bundle = StartupBundle::from_rule(self.into_rule()?)?;
        if let Some(rows) = indices {
            check_indices(&bundle.basis, &rows)?;
        }
        Ok(bundle)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubatureRuleFile {
    pub dim: usize,
    pub ade: usize,
    pub degree: usize,
    pub functional_tag: String,
    #[serde(rename = "box")]
    pub bbox: BoxFile,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl From<&CubatureRule> for CubatureRuleFile {
    fn from(r: &CubatureRule) -> Self {
        Self {
            dim: r.nodes.dim(),
            ade: r.degree,
            degree: r.degree,
            functional_tag: r.functional_tag.clone(),
            bbox: BoxFile::from(&r.bbox),
            nodes: r.nodes.to_rows(),
            weights: r.weights.clone(),
        }
    }
}

impl CubatureRuleFile {
    pub fn into_rule(self) -> Result<CubatureRule> {
        let nodes = rows_to_points(self.dim, &self.nodes)?;
        if nodes.len() != self.weights.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                found: self.weights.len(),
            });
        }
        Ok(CubatureRule {
            nodes,
            weights: self.weights,
            degree: self.degree,
            bbox: self.bbox.into_box()?,
            functional_tag: self.functional_tag,
        })
    }
}

pub fn rule_to_csv(rule: &CubatureRule) -> String {
    let axes = ["x", "y", "z"];
    let mut out = String::new();
    for a in axes.iter().take(rule.nodes.dim()) {
        out.push_str(a);
        out.push(',');
    }
    out.push_str("weight\n");
    for (p, w) in rule.nodes.iter().zip(&rule.weights) {
        for x in p {
            let _ = write!(out, "{},", fmt_f64(*x));
        }
        let _ = writeln!(out, "{}", fmt_f64(*w));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsFile {
    pub dim: usize,
    pub degree: usize,
    pub basis_indices: Vec<Vec<usize>>,
    #[serde(rename = "box")]
    pub bbox: BoxFile,
    pub functional_tag: String,
    pub values: Vec<f64>,
}

impl From<&MomentVector> for MomentsFile {
    fn from(m: &MomentVector) -> Self {
        Self {
            dim: m.basis.dim(),
            degree: m.basis.degree(),
            basis_indices: indices_rows(&m.basis),
            bbox: BoxFile::from(&m.bbox),
            functional_tag: m.functional_tag.clone(),
            values: m.values.clone(),
        }
    }
}

impl MomentsFile {
    pub fn into_moments(self) -> Result<MomentVector> {
        let basis = grlex_indices(self.dim, self.degree)?;
        check_indices(&basis, &self.basis_indices)?;
        MomentVector::new(
            self.values,
            basis,
            self.bbox.into_box()?,
            self.functional_tag,
        )
    }
}

fn default_order() -> usize {
    4
}

fn default_end() -> String {
    EndCondition::default().to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineDomainFile {
    pub vertices: Vec<[f64; 2]>,
    #[serde(default = "default_order")]
    pub spline_order: usize,
    #[serde(default = "default_end")]
    pub end_condition: String,
}

impl From<&SplineBoundary> for SplineDomainFile {
    fn from(s: &SplineBoundary) -> Self {
        Self {
            vertices: s
                .vertices_x
                .iter()
                .zip(&s.vertices_y)
                .map(|(&x, &y)| [x, y])
                .collect(),
            spline_order: s.order,
            end_condition: s.end_condition.to_string(),
        }
    }
}

impl SplineDomainFile {
    pub fn build(&self) -> Result<SplineBoundary> {
        let xv: Vec<f64> = self.vertices.iter().map(|v| v[0]).collect();
        let yv: Vec<f64> = self.vertices.iter().map(|v| v[1]).collect();
        spline_boundary_build(&xv, &yv, self.spline_order, self.end_condition.parse()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallDomainFile {
    pub centers: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
}

impl From<&BallUnion> for BallDomainFile {
    fn from(b: &BallUnion) -> Self {
        Self {
            centers: b.centers.to_rows(),
            radii: b.radii.clone(),
        }
    }
}

impl BallDomainFile {
    pub fn build(&self) -> Result<BallUnion> {
        let dim = self.centers.first().map_or(3, |c| c.len());
        BallUnion::new(rows_to_points(dim, &self.centers)?, self.radii.clone())
    }
}

/// Weights of a pointwise functional at one evaluation point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointWeightsFile {
    pub point: Vec<f64>,
    pub alpha: Vec<usize>,
    #[serde(rename = "box")]
    pub bbox: BoxFile,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub outside_box: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{chebyshev_measure_moments, orthocub_weights};
    use crate::rules::startup;

    #[test]
    fn floats_round_trip_exactly() {
        let vals = vec![0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, std::f64::consts::PI];
        let text = to_json(&vals).unwrap();
        assert!(text.contains("1.0000000000000001e-1"));
        let back: Vec<f64> = from_json(&text).unwrap();
        assert_eq!(back, vals);
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn bundle_round_trip() {
        let b = startup(2, 4, RuleKind::NearMinimal).unwrap();
        let text = to_json(&RuleFile::from(&b)).unwrap();
        let back = from_json::<RuleFile>(&text).unwrap().into_bundle().unwrap();
        assert_eq!(back.rule, b.rule);
        assert_eq!(back.basis, b.basis);
        assert_eq!(back.weighted_vandermonde, b.weighted_vandermonde);
    }

    #[test]
    fn bundle_with_bad_indices_is_rejected() {
        let b = startup(2, 2, RuleKind::NearMinimal).unwrap();
        let mut f = RuleFile::from(&b);
        f.basis_indices.as_mut().unwrap().swap(1, 2);
        assert!(f.clone().into_bundle().is_err());
        f.basis_indices = None;
        f.ade = 3;
        assert!(f.into_bundle().is_err());
    }

    #[test]
    fn moments_and_rule_round_trip() {
        let b = startup(3, 3, RuleKind::NearMinimal).unwrap();
        let bbox = BoundingBox::new(vec![0.0, -1.0, 2.0], vec![1.0, 0.5, 2.25]).unwrap();
        let m = chebyshev_measure_moments(&b.basis, &bbox);
        let mf = from_json::<MomentsFile>(&to_json(&MomentsFile::from(&m)).unwrap()).unwrap();
        assert_eq!(mf.into_moments().unwrap(), m);
        let rule = orthocub_weights(&b, &bbox, &m).unwrap();
        let rf = from_json::<CubatureRuleFile>(&to_json(&CubatureRuleFile::from(&rule)).unwrap())
            .unwrap();
        assert_eq!(rf.into_rule().unwrap(), rule);
        let csv = rule_to_csv(&rule);
        assert!(csv.starts_with("x,y,z,weight\n"));
        assert_eq!(csv.lines().count(), rule.len() + 1);
    }

    #[test]
    fn domain_files() {
        let text = r#"{"vertices": [[0,0],[1,0],[1,1],[0,1]], "spline_order": 2, "end_condition": "periodic"}"#;
        let s = from_json::<SplineDomainFile>(text)
            .unwrap()
            .build()
            .unwrap();
        assert!((s.signed_area() - 1.0).abs() < 1e-15);
        let defaults =
            from_json::<SplineDomainFile>(r#"{"vertices": [[0,0],[1,0],[0,1]]}"#).unwrap();
        assert_eq!(defaults.spline_order, 4);
        assert_eq!(defaults.end_condition, "periodic");
        let bad = r#"{"vertices": [[0,0],[1,0],[0,1]], "end_condition": "clamped"}"#;
        assert!(from_json::<SplineDomainFile>(bad).unwrap().build().is_err());
        let balls = from_json::<BallDomainFile>(r#"{"centers": [[0,0,0]], "radii": [0.5]}"#)
            .unwrap()
            .build()
            .unwrap();
        assert!(balls.contains(&[0.5, 0.0, 0.0]));
        assert!(from_json::<BallDomainFile>(r#"{"centers": [[0,0,0]]"#).is_err());
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_json(&path, &vec![1.0, 2.0]).unwrap();
        write_json(&path, &vec![3.0]).unwrap();
        let back: Vec<f64> = read_json(&path).unwrap();
        assert_eq!(back, vec![3.0]);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
