//! Per-node feature matrices, correlation analysis, the active-weeks CDF and
//! feature-subset variants.
//!
//! Column order is fixed: network features alphabetically, then exogenous
//! attributes alphabetically. Boolean measures enter as 0/1.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{all_metrics_with, MinCutOptions, MinCutSummary};
use crate::ingest::{AttributeTable, LeaveLabeling, Snapshot};

pub const NETWORK_FEATURES: [&str; 7] = [
    "avg_min_cut",
    "betweenness",
    "closeness",
    "coreness",
    "degree",
    "eccentricity",
    "is_articulation",
];

pub const EXOGENOUS_FEATURES: [&str; 4] = ["downvotes", "reputation", "upvotes", "views"];

pub fn is_network_feature(name: &str) -> bool {
    NETWORK_FEATURES.contains(&name)
}

/// Feature values of one node plus its leave label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub node_id: String,
    pub network: BTreeMap<String, f64>,
    pub exogenous: BTreeMap<String, f64>,
    pub leave_label: bool,
}

impl FeatureRow {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.network.get(name).or_else(|| self.exogenous.get(name)).copied()
    }

    /// Values in matrix column order.
    pub fn values(&self) -> Vec<f64> {
        self.network.values().chain(self.exogenous.values()).copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub rows: Vec<FeatureRow>,
    /// Tags of the snapshots the matrix was built from.
    pub provenance: Vec<String>,
}

impl FeatureMatrix {
    /// Builds a matrix, checking every row carries the same feature names.
    pub fn new(rows: Vec<FeatureRow>, provenance: Vec<String>) -> Result<Self> {
        let m = FeatureMatrix { rows, provenance };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let Some(first) = self.rows.first() else {
            return Err(Error::invalid("feature matrix needs at least one row"));
        };
        for row in &self.rows {
            if !row.network.keys().eq(first.network.keys())
                || !row.exogenous.keys().eq(first.exogenous.keys())
            {
                return Err(Error::ColumnMismatch(format!(
                    "row `{}` has a different feature set than row `{}`",
                    row.node_id, first.node_id
                )));
            }
            if let Some((name, _)) =
                row.network.iter().chain(&row.exogenous).find(|(_, v)| !v.is_finite())
            {
                return Err(Error::invalid(format!("non-finite {name} for `{}`", row.node_id)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn network_columns(&self) -> Vec<String> {
        self.rows.first().map(|r| r.network.keys().cloned().collect()).unwrap_or_default()
    }

    pub fn exogenous_columns(&self) -> Vec<String> {
        self.rows.first().map(|r| r.exogenous.keys().cloned().collect()).unwrap_or_default()
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols = self.network_columns();
        cols.extend(self.exogenous_columns());
        cols
    }

    /// Row-major values in column order.
    pub fn values(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(FeatureRow::values).collect()
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.get(name).ok_or_else(|| Error::ColumnMismatch(format!("no column `{name}`"))))
            .collect()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.rows.iter().map(|r| r.leave_label).collect()
    }

    pub fn node_ids(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.node_id.as_str()).collect()
    }

    /// Same rows with labels replaced by `departed(node_id)`.
    pub fn relabeled(&self, departed: impl Fn(&str) -> bool) -> Self {
        let mut m = self.clone();
        for row in &mut m.rows {
            row.leave_label = departed(&row.node_id);
        }
        m
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        FeatureMatrix {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["node_id".to_owned()];
        header.extend(self.columns());
        header.push("leave_label".to_owned());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.node_id.clone()];
            rec.extend(row.values().iter().map(f64::to_string));
            rec.push(row.leave_label.to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<features>", e))?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    /// Reads a matrix CSV. Columns named after network measures go to the
    /// network map; all others are exogenous.
    pub fn load(path: &Path) -> Result<Self> {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::Reader::from_reader(file);
        let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        let bad = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), line, message };
        if header.len() < 2 || header[0] != "node_id" || header[header.len() - 1] != "leave_label" {
            return Err(bad(1, "header must be node_id,<features...>,leave_label".into()));
        }
        let features = &header[1..header.len() - 1];
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            let mut row = FeatureRow {
                node_id: record[0].to_owned(),
                network: BTreeMap::new(),
                exogenous: BTreeMap::new(),
                leave_label: match &record[record.len() - 1] {
                    "true" => true,
                    "false" => false,
                    other => return Err(bad(line, format!("bad leave_label {other:?}"))),
                },
            };
            for (i, name) in features.iter().enumerate() {
                let v: f64 = record[i + 1]
                    .parse()
                    .map_err(|_| bad(line, format!("bad value for {name}: {:?}", &record[i + 1])))?;
                if is_network_feature(name) {
                    row.network.insert(name.clone(), v);
                } else {
                    row.exogenous.insert(name.clone(), v);
                }
            }
            rows.push(row);
        }
        FeatureMatrix::new(rows, vec![path.display().to_string()])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssemblyReport {
    /// Initial nodes with no row in the attribute table.
    pub missing_attributes: usize,
    pub min_cut: MinCutSummary,
}

/// Builds the training matrix: one row per initial node of `snap_t` with its
/// network measures, exogenous attributes (zeros when absent from `attrs`)
/// and leave label.
pub fn assemble(
    snap_t: &Snapshot,
    labeling: &LeaveLabeling,
    attrs: &AttributeTable,
    min_cut: &MinCutOptions,
) -> Result<(FeatureMatrix, AssemblyReport)> {
    let nodes = snap_t.graph.nodes();
    if !nodes.iter().eq(labeling.initial_nodes.iter()) {
        return Err(Error::invalid("labeling initial nodes differ from the snapshot's nodes"));
    }
    let (metrics, summary) = all_metrics_with(&snap_t.graph, min_cut);
    let mut missing = 0;
    let mut rows = Vec::with_capacity(nodes.len());
    for id in nodes {
        let m = metrics
            .get(id)
            .ok_or_else(|| Error::invalid(format!("internal: no metrics for node `{id}`")))?;
        let network = BTreeMap::from([
            ("avg_min_cut".to_owned(), m.avg_min_cut),
            ("betweenness".to_owned(), m.betweenness),
            ("closeness".to_owned(), m.closeness),
            ("coreness".to_owned(), m.coreness as f64),
            ("degree".to_owned(), m.degree as f64),
            ("eccentricity".to_owned(), m.eccentricity as f64),
            ("is_articulation".to_owned(), if m.is_articulation { 1.0 } else { 0.0 }),
        ]);
        let exo = match attrs.get(id) {
            Some(a) => [a.downvotes as f64, a.reputation as f64, a.upvotes as f64, a.views as f64],
            None => {
                missing += 1;
                [0.0; 4]
            }
        };
        let exogenous =
            EXOGENOUS_FEATURES.iter().map(|s| s.to_string()).zip(exo).collect::<BTreeMap<_, _>>();
        rows.push(FeatureRow {
            node_id: id.clone(),
            network,
            exogenous,
            leave_label: labeling.is_departed(id),
        });
    }
    if missing > 0 {
        log::warn!("{missing} initial nodes have no attribute row; exogenous features set to 0");
    }
    if rows.is_empty() {
        return Err(Error::invalid(format!("snapshot `{}` has no nodes", snap_t.label)));
    }
    let provenance = vec![snap_t.label.clone(), labeling.horizon_tag.clone()];
    Ok((
        FeatureMatrix { rows, provenance },
        AssemblyReport { missing_attributes: missing, min_cut: summary },
    ))
}

/// Pearson correlations between every pair of feature columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub values: Vec<Vec<f64>>,
    /// Zero-variance columns; their correlations are reported as 0.
    pub constant: Vec<String>,
}

pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn pearson_matrix(m: &FeatureMatrix) -> Result<CorrelationMatrix> {
    if m.len() < 2 {
        return Err(Error::invalid("correlation needs at least two rows"));
    }
    let names = m.columns();
    let cols: Vec<Vec<f64>> = names.iter().map(|n| m.column(n)).collect::<Result<_>>()?;
    let k = names.len();
    let constant: Vec<String> = names
        .iter()
        .zip(&cols)
        .filter(|(_, c)| c.iter().all(|&v| v == c[0]))
        .map(|(n, _)| n.clone())
        .collect();
    if !constant.is_empty() {
        log::warn!("zero-variance features, correlations set to 0: {}", constant.join(", "));
    }
    let mut values = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let r = if i == j {
                if constant.contains(&names[i]) { 0.0 } else { 1.0 }
            } else {
                pearson(&cols[i], &cols[j]).unwrap_or(0.0)
            };
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix { names, values, constant })
}

impl CorrelationMatrix {
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["feature".to_owned()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for (name, row) in self.names.iter().zip(&self.values) {
            let mut rec = vec![name.clone()];
            rec.extend(row.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<correlation>", e))?;
        Ok(())
    }
}

/// Empirical CDF of whole weeks between registration and last login.
pub fn active_weeks_cdf(attrs: &AttributeTable) -> Result<Vec<(i64, f64)>> {
    if attrs.is_empty() {
        return Err(Error::invalid("no members to build an active-weeks distribution from"));
    }
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for a in attrs.values() {
        let span = a.last_login_date - a.registration_date;
        if span < chrono::Duration::zero() {
            return Err(Error::invalid(format!(
                "member `{}` last logged in before registering",
                a.member_id
            )));
        }
        *counts.entry(span.num_seconds() / (7 * 86_400)).or_default() += 1;
    }
    let n = attrs.len();
    let mut seen = 0;
    Ok(counts
        .into_iter()
        .map(|(weeks, c)| {
            seen += c;
            (weeks, seen as f64 / n as f64)
        })
        .collect())
}

pub fn write_cdf_csv<W: std::io::Write>(cdf: &[(i64, f64)], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["weeks", "cdf"])?;
    for (weeks, f) in cdf {
        w.write_record([weeks.to_string(), f.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<cdf>", e))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantKind {
    All,
    Best4,
    Best1,
    Best2,
}

impl VariantKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VariantKind::All => "all",
            VariantKind::Best4 => "best4",
            VariantKind::Best1 => "best1",
            VariantKind::Best2 => "best2",
        }
    }

    pub fn needs_ranking(self) -> bool {
        self != VariantKind::All
    }
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VariantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(VariantKind::All),
            "best4" => Ok(VariantKind::Best4),
            "best1" => Ok(VariantKind::Best1),
            "best2" => Ok(VariantKind::Best2),
            _ => Err(Error::invalid(format!("unknown variant `{s}` (all, best4, best1, best2)"))),
        }
    }
}

/// A variant kind together with the importance ranking it selects from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSpec {
    pub kind: VariantKind,
    /// Feature names, most important first.
    pub ranking: Vec<String>,
}

impl VariantSpec {
    pub fn all() -> Self {
        VariantSpec { kind: VariantKind::All, ranking: Vec::new() }
    }

    /// Feature names kept by this variant, in matrix column order.
    pub fn selected_columns(&self, columns: &[String]) -> Result<Vec<String>> {
        if self.kind == VariantKind::All {
            return Ok(columns.to_vec());
        }
        if let Some(c) = columns.iter().find(|c| !self.ranking.contains(c)) {
            return Err(Error::invalid(format!("ranking does not cover column `{c}`")));
        }
        let ranked = self.ranking.iter().filter(|r| columns.contains(r));
        let (net, exo): (Vec<&String>, Vec<&String>) =
            ranked.clone().partition(|r| is_network_feature(r));
        let keep: Vec<&String> = match self.kind {
            VariantKind::All => unreachable!(),
            VariantKind::Best4 => ranked.take(4).collect(),
            VariantKind::Best1 => net.iter().take(1).chain(exo.iter().take(1)).copied().collect(),
            VariantKind::Best2 => net.iter().take(2).chain(exo.iter().take(2)).copied().collect(),
        };
        Ok(columns.iter().filter(|c| keep.contains(c)).cloned().collect())
    }
}

/// Keeps only the columns chosen by `spec`; labels and row order unchanged.
pub fn select_variant(m: &FeatureMatrix, spec: &VariantSpec) -> Result<FeatureMatrix> {
    let keep = spec.selected_columns(&m.columns())?;
    project(m, &keep)
}

/// Restricts `m` to exactly `columns`.
pub fn project(m: &FeatureMatrix, columns: &[String]) -> Result<FeatureMatrix> {
    let available = m.columns();
    let unknown: Vec<&String> = columns.iter().filter(|c| !available.contains(c)).collect();
    if !unknown.is_empty() {
        return Err(Error::ColumnMismatch(format!(
            "missing columns: {}",
            unknown.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
        )));
    }
    let rows = m
        .rows
        .iter()
        .map(|r| FeatureRow {
            node_id: r.node_id.clone(),
            network: r.network.iter().filter(|(k, _)| columns.contains(k)).map(|(k, v)| (k.clone(), *v)).collect(),
            exogenous: r.exogenous.iter().filter(|(k, _)| columns.contains(k)).map(|(k, v)| (k.clone(), *v)).collect(),
            leave_label: r.leave_label,
        })
        .collect();
    Ok(FeatureMatrix { rows, provenance: m.provenance.clone() })
}

#[cfg(test)]
pub(crate) mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::graph::Graph;
    use crate::ingest::{parse_timestamp, MemberAttributes};

    pub fn row(id: &str, net: &[(&str, f64)], exo: &[(&str, f64)], label: bool) -> FeatureRow {
        FeatureRow {
            node_id: id.into(),
            network: net.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            exogenous: exo.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            leave_label: label,
        }
    }

    fn attrs(id: &str, reg: &str, last: &str) -> MemberAttributes {
        MemberAttributes {
            member_id: id.into(),
            registration_date: parse_timestamp(reg).unwrap(),
            last_login_date: parse_timestamp(last).unwrap(),
            upvotes: 5,
            downvotes: 1,
            views: 30,
            reputation: 12,
        }
    }

    fn snapshot() -> Snapshot {
        Snapshot {
            graph: Graph::from_edges([("a", "b"), ("b", "c")]),
            window_start: parse_timestamp("2020-01-01").unwrap(),
            window_days: 45,
            label: "g_t".into(),
        }
    }

    fn labeling(departed: &[&str]) -> LeaveLabeling {
        LeaveLabeling {
            initial_nodes: ["a", "b", "c"].iter().map(|s| s.to_string()).collect(),
            departed: departed.iter().map(|s| s.to_string()).collect(),
            ignored: BTreeSet::new(),
            horizon_tag: "g_t1".into(),
        }
    }

    #[test]
    fn assemble_rows_and_labels() {
        let table: AttributeTable =
            [("a", attrs("a", "2019-01-01", "2020-01-01")), ("b", attrs("b", "2019-01-01", "2020-01-01"))]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect();
        let (m, report) = assemble(&snapshot(), &labeling(&["c"]), &table, &MinCutOptions::default()).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.labels().iter().filter(|&&l| l).count(), 1);
        assert_eq!(report.missing_attributes, 1);
        let c = &m.rows[2];
        assert_eq!(c.node_id, "c");
        assert!(c.exogenous.values().all(|&v| v == 0.0));
        assert_eq!(m.rows[1].get("is_articulation"), Some(1.0));
        assert_eq!(m.rows[1].get("views"), Some(30.0));
        assert_eq!(
            m.columns(),
            [NETWORK_FEATURES.as_slice(), EXOGENOUS_FEATURES.as_slice()].concat()
        );

        let (m, _) = assemble(&snapshot(), &labeling(&[]), &table, &MinCutOptions::default()).unwrap();
        assert!(m.labels().iter().all(|&l| !l));
    }

    #[test]
    fn pearson_examples() {
        let m = FeatureMatrix::new(
            vec![
                row("1", &[("degree", 1.0)], &[("views", 5.0), ("upvotes", 1.0)], false),
                row("2", &[("degree", 2.0)], &[("views", 7.0), ("upvotes", 3.0)], true),
                row("3", &[("degree", 3.0)], &[("views", 9.0), ("upvotes", 2.0)], false),
            ],
            vec![],
        )
        .unwrap();
        let c = pearson_matrix(&m).unwrap();
        assert_eq!(c.names, ["degree", "upvotes", "views"]);
        assert!((c.values[0][2] - 1.0).abs() < 1e-12);
        assert!((c.values[0][1] - 0.5).abs() < 1e-12);
        assert_eq!(c.values[1][0], c.values[0][1]);
        assert!((pearson(&[1.0, 2.0, 3.0], &[-1.0, -2.0, -3.0]).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_constant_feature_is_zero_and_flagged() {
        let m = FeatureMatrix::new(
            vec![
                row("1", &[("degree", 1.0)], &[("views", 5.0)], false),
                row("2", &[("degree", 2.0)], &[("views", 5.0)], true),
            ],
            vec![],
        )
        .unwrap();
        let c = pearson_matrix(&m).unwrap();
        assert_eq!(c.constant, ["views"]);
        assert_eq!(c.values[1], [0.0, 0.0]);
        assert!(pearson_matrix(&m.subset(&[0])).is_err());
    }

    #[test]
    fn cdf_examples() {
        let table: AttributeTable = [
            attrs("a", "2020-01-01", "2020-01-01"),
            attrs("b", "2020-01-01", "2020-01-08"),
            attrs("c", "2020-01-01", "2020-01-15"),
        ]
        .into_iter()
        .map(|a| (a.member_id.clone(), a))
        .collect();
        assert_eq!(active_weeks_cdf(&table).unwrap(), vec![(0, 1.0 / 3.0), (1, 2.0 / 3.0), (2, 1.0)]);

        let ten: AttributeTable = [attrs("a", "2020-01-01", "2020-03-11"), attrs("b", "2020-02-01", "2020-04-11")]
            .into_iter()
            .map(|a| (a.member_id.clone(), a))
            .collect();
        assert_eq!(active_weeks_cdf(&ten).unwrap(), vec![(10, 1.0)]);
        assert!(active_weeks_cdf(&AttributeTable::new()).is_err());
        let neg: AttributeTable =
            [attrs("a", "2020-02-01", "2020-01-01")].into_iter().map(|a| (a.member_id.clone(), a)).collect();
        assert!(active_weeks_cdf(&neg).is_err());
    }

    fn full_matrix() -> FeatureMatrix {
        let net: Vec<(&str, f64)> = NETWORK_FEATURES.iter().map(|n| (*n, 1.0)).collect();
        let exo: Vec<(&str, f64)> = EXOGENOUS_FEATURES.iter().map(|n| (*n, 2.0)).collect();
        FeatureMatrix::new(vec![row("a", &net, &exo, true), row("b", &net, &exo, false)], vec![]).unwrap()
    }

    fn published_ranking() -> Vec<String> {
        [
            "coreness", "views", "closeness", "reputation", "degree", "avg_min_cut", "upvotes",
            "betweenness", "downvotes", "eccentricity", "is_articulation",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect()
    }

    #[test]
    fn variants() {
        let m = full_matrix();
        assert_eq!(select_variant(&m, &VariantSpec::all()).unwrap(), m);
        let best2 = VariantSpec { kind: VariantKind::Best2, ranking: published_ranking() };
        assert_eq!(select_variant(&m, &best2).unwrap().columns(), ["closeness", "coreness", "reputation", "views"]);
        let best1 = VariantSpec { kind: VariantKind::Best1, ranking: published_ranking() };
        assert_eq!(select_variant(&m, &best1).unwrap().columns(), ["coreness", "views"]);
        let best4 = VariantSpec { kind: VariantKind::Best4, ranking: published_ranking() };
        assert_eq!(select_variant(&m, &best4).unwrap().columns(), ["closeness", "coreness", "reputation", "views"]);
        let short = VariantSpec { kind: VariantKind::Best4, ranking: vec!["degree".into()] };
        assert!(select_variant(&m, &short).is_err());
        assert_eq!(select_variant(&m, &best1).unwrap().labels(), m.labels());
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let mut m = full_matrix();
        m.rows[0].network.insert("closeness".into(), 0.1 + 0.2);
        m.rows[1].exogenous.insert("views".into(), 1.0 / 3.0);
        m.save(&path).unwrap();
        let back = FeatureMatrix::load(&path).unwrap();
        assert_eq!(back.rows, m.rows);
        assert_eq!(back.columns(), m.columns());
    }

    #[test]
    fn mismatched_rows_rejected() {
        let rows = vec![row("a", &[("degree", 1.0)], &[], true), row("b", &[("coreness", 1.0)], &[], false)];
        assert!(matches!(FeatureMatrix::new(rows, vec![]), Err(Error::ColumnMismatch(_))));
        assert!(FeatureMatrix::new(vec![], vec![]).is_err());
    }
}
