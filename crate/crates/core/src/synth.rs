//! Seeded synthetic communities with a planted departure rule.
//!
//! During the first window members interact along a random graph. Each
//! member of that graph whose planted attribute is below the rule threshold
//! leaves (label flipped with probability `noise`) some time before the
//! second window. Every remaining member then interacts exactly once per
//! week at a fixed per-member offset, so any window of at least seven days
//! sees every active member. Newcomers join over time and behave like
//! stayers.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use chrono::{Duration, Months};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{Corpus, ExperimentPlan, Method};
use crate::graph::Graph;
use crate::ingest::{
    format_timestamp, parse_timestamp, write_attributes, write_events, AttributeTable, EventKind, InteractionEvent,
    MemberAttributes, Timestamp,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlantedAttribute {
    /// Degree in the first-window interaction graph.
    Degree,
    /// The exogenous reputation score.
    Reputation,
}

impl fmt::Display for PlantedAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlantedAttribute::Degree => "degree",
            PlantedAttribute::Reputation => "reputation",
        })
    }
}

impl FromStr for PlantedAttribute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "degree" => Ok(PlantedAttribute::Degree),
            "reputation" => Ok(PlantedAttribute::Reputation),
            _ => Err(Error::invalid(format!("unknown planted attribute `{s}` (degree, reputation)"))),
        }
    }
}

/// Members whose planted value is below `threshold` leave; each label is
/// flipped with probability `noise`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepartureRule {
    pub attribute: PlantedAttribute,
    pub threshold: f64,
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub nodes: usize,
    /// Probability that a given pair interacts during the first window.
    pub edge_density: f64,
    pub rule: DepartureRule,
    /// Months of activity generated after `start`.
    pub months: u32,
    pub seed: u64,
    pub start: Timestamp,
    pub window_days: u32,
    /// Months between the first and the second training window.
    pub train_gap_months: u32,
    pub newcomers_per_month: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            nodes: 300,
            edge_density: 0.011,
            rule: DepartureRule { attribute: PlantedAttribute::Degree, threshold: 3.0, noise: 0.0 },
            months: 28,
            seed: 42,
            start: parse_timestamp("2020-01-01").expect("valid literal"),
            window_days: 45,
            train_gap_months: 2,
            newcomers_per_month: 3,
        }
    }
}

/// What the generator decided for one member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub member_id: String,
    /// Member of the first-window graph.
    pub initial: bool,
    pub planted_value: f64,
    pub rule_leave: bool,
    pub flipped: bool,
    pub departure: Option<Timestamp>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCommunity {
    pub spec: SyntheticSpec,
    pub corpus: Corpus,
    pub truth: Vec<GroundTruth>,
}

const WEEK_SECS: i64 = 7 * 86_400;

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 4 {
            return Err(Error::invalid("synthetic community needs at least 4 members"));
        }
        if !(self.edge_density > 0.0 && self.edge_density <= 1.0) {
            return Err(Error::invalid("edge_density must be in (0, 1]"));
        }
        if !(0.0..0.5).contains(&self.rule.noise) {
            return Err(Error::invalid("noise rate must be in [0, 0.5)"));
        }
        if !self.rule.threshold.is_finite() {
            return Err(Error::invalid("rule threshold must be finite"));
        }
        if self.window_days < 7 {
            return Err(Error::invalid("window_days must be at least 7 for weekly activity to be visible"));
        }
        if self.train_end() < self.first_window_end() {
            return Err(Error::invalid("train_gap_months must span at least one window"));
        }
        if self.months <= self.train_gap_months {
            return Err(Error::invalid("months must exceed train_gap_months"));
        }
        Ok(())
    }

    fn first_window_end(&self) -> Timestamp {
        self.start + Duration::days(self.window_days as i64)
    }

    pub fn train_end(&self) -> Timestamp {
        self.start + Months::new(self.train_gap_months)
    }

    pub fn end(&self) -> Timestamp {
        self.start + Months::new(self.months)
    }

    /// Plan matching this community's windows with `horizons` filtered to
    /// those whose window ends before the generated activity does.
    pub fn plan(&self, method: Method, horizons: &[u32]) -> ExperimentPlan {
        let train_end = self.train_end();
        let window = Duration::days(self.window_days as i64);
        let fits: Vec<u32> = horizons
            .iter()
            .copied()
            .filter(|&h| train_end + Months::new(h) + window <= self.end())
            .collect();
        let mut plan = ExperimentPlan::new(self.start, train_end, fits, method);
        plan.window_days = self.window_days;
        plan.seed = self.seed;
        plan
    }

    pub fn generate(&self) -> Result<SyntheticCommunity> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let width = self.nodes.to_string().len().max(4);
        let ids: Vec<String> = (0..self.nodes).map(|i| format!("m{i:0width$}")).collect();
        let window_secs = self.window_days as i64 * 86_400;
        let kinds = [EventKind::Comment, EventKind::Answer];

        let mut events = Vec::new();
        let mut pairs = Vec::new();
        for i in 0..self.nodes {
            for j in i + 1..self.nodes {
                if rng.gen_bool(self.edge_density) {
                    let (a, b) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
                    let repeats = rng.gen_range(1..=3);
                    for _ in 0..repeats {
                        events.push(InteractionEvent {
                            timestamp: self.start + Duration::seconds(rng.gen_range(0..window_secs)),
                            actor: ids[a].clone(),
                            target: ids[b].clone(),
                            kind: *kinds.choose(&mut rng).expect("non-empty"),
                        });
                    }
                    pairs.push((ids[i].as_str(), ids[j].as_str()));
                }
            }
        }
        let first = Graph::from_edges(pairs.iter().copied());

        let mut attributes = AttributeTable::new();
        for id in &ids {
            let registered = self.start - Duration::seconds(rng.gen_range(86_400..730 * 86_400));
            attributes.insert(
                id.clone(),
                MemberAttributes {
                    member_id: id.clone(),
                    registration_date: registered,
                    last_login_date: self.end(),
                    upvotes: rng.gen_range(0..200),
                    downvotes: rng.gen_range(0..40),
                    views: rng.gen_range(0..2000),
                    reputation: rng.gen_range(1..5000),
                },
            );
        }

        let gap_secs = (self.train_end() - self.first_window_end()).num_seconds().max(1);
        let mut truth = Vec::with_capacity(self.nodes);
        let mut stayers = Vec::new();
        for id in &ids {
            let initial = first.contains(id);
            let planted = match self.rule.attribute {
                PlantedAttribute::Degree => first.degree(id).unwrap_or(0) as f64,
                PlantedAttribute::Reputation => attributes[id].reputation as f64,
            };
            let rule_leave = initial && planted < self.rule.threshold;
            let flipped = initial && self.rule.noise > 0.0 && rng.gen_bool(self.rule.noise);
            let leaves = rule_leave != flipped;
            let departure = leaves.then(|| self.first_window_end() + Duration::seconds(rng.gen_range(0..gap_secs)));
            if let Some(at) = departure {
                attributes.get_mut(id).expect("inserted").last_login_date = at;
            } else {
                stayers.push(id.clone());
            }
            truth.push(GroundTruth { member_id: id.clone(), initial, planted_value: planted, rule_leave, flipped, departure });
        }
        if stayers.len() < 2 {
            return Err(Error::invalid("rule removes nearly every member; lower the threshold"));
        }

        // (member, first active instant)
        let mut active: Vec<(String, Timestamp)> =
            stayers.iter().map(|id| (id.clone(), self.first_window_end())).collect();
        let nwidth = width;
        let mut newcomer = 0usize;
        for month in self.train_gap_months..self.months {
            let month_start = self.start + Months::new(month);
            for _ in 0..self.newcomers_per_month {
                let id = format!("n{newcomer:0nwidth$}");
                newcomer += 1;
                let joined = month_start + Duration::seconds(rng.gen_range(0..28 * 86_400));
                attributes.insert(
                    id.clone(),
                    MemberAttributes {
                        member_id: id.clone(),
                        registration_date: joined,
                        last_login_date: self.end(),
                        upvotes: rng.gen_range(0..50),
                        downvotes: rng.gen_range(0..10),
                        views: rng.gen_range(0..300),
                        reputation: rng.gen_range(1..500),
                    },
                );
                truth.push(GroundTruth {
                    member_id: id.clone(),
                    initial: false,
                    planted_value: 0.0,
                    rule_leave: false,
                    flipped: false,
                    departure: None,
                });
                active.push((id, joined));
            }
        }

        let end = self.end();
        for (id, from) in &active {
            let offset = Duration::seconds(rng.gen_range(0..WEEK_SECS));
            let mut at = *from + offset;
            while at < end {
                let partner = loop {
                    let p = stayers.choose(&mut rng).expect("at least two stayers");
                    if p != id {
                        break p;
                    }
                };
                let (actor, target) = if rng.gen_bool(0.5) { (id, partner) } else { (partner, id) };
                events.push(InteractionEvent {
                    timestamp: at,
                    actor: actor.clone(),
                    target: target.clone(),
                    kind: *kinds.choose(&mut rng).expect("non-empty"),
                });
                at += Duration::seconds(WEEK_SECS);
            }
        }
        events.sort_by(|a, b| {
            (a.timestamp, &a.actor, &a.target).cmp(&(b.timestamp, &b.actor, &b.target))
        });
        truth.sort_by(|a, b| a.member_id.cmp(&b.member_id));

        Ok(SyntheticCommunity { spec: self.clone(), corpus: Corpus { events, attributes }, truth })
    }
}

pub const TRUTH_HEADER: [&str; 6] = ["member_id", "initial", "planted_value", "rule_leave", "flipped", "departure_time"];

impl SyntheticCommunity {
    /// Members the rule (after noise) sends away, keyed by id.
    pub fn departures(&self) -> BTreeMap<&str, Timestamp> {
        self.truth.iter().filter_map(|t| t.departure.map(|d| (t.member_id.as_str(), d))).collect()
    }

    /// Writes `events.csv`, `attributes.csv`, `ground_truth.csv` and
    /// `synth.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, bytes: Vec<u8>| {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|e| Error::io(&path, e))
        };
        let mut buf = Vec::new();
        write_events(&self.corpus.events, &mut buf)?;
        write("events.csv", buf)?;
        let mut buf = Vec::new();
        write_attributes(&self.corpus.attributes, &mut buf)?;
        write("attributes.csv", buf)?;

        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(TRUTH_HEADER)?;
        for t in &self.truth {
            w.write_record([
                t.member_id.clone(),
                t.initial.to_string(),
                t.planted_value.to_string(),
                t.rule_leave.to_string(),
                t.flipped.to_string(),
                t.departure.map(|d| format_timestamp(&d)).unwrap_or_default(),
            ])?;
        }
        write("ground_truth.csv", w.into_inner().map_err(|e| Error::invalid(e.to_string()))?)?;
        write("synth.json", (serde_json::to_string_pretty(&self.spec)? + "\n").into_bytes())
    }
}
