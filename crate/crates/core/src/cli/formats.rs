//! JSON files for markets, matchings and roadmaps.
//!
//! ```text
//! market:   {"kind": "tu",
//!            "firms":   {"f1": [{"set": ["w1","w2"], "value": "6"}]},
//!            "workers": {"w1": {"f1": "0", "f2": "1/2"}}}
//!           {"kind": "discrete",
//!            "firms":   {"f1": [["w1","w2"], ["w1"]]},
//!            "workers": {"w1": ["f1","f2"]}}
//! matching: {"assignment": {"w1": "f1"}, "prices": {"w1": "2"}}
//! roadmap:  {"technologies": {"v1": ["w1"]}, "edges": [["v1","v3"]]}
//! ```
//!
//! Values are integer or `"p/q"` strings (bare JSON integers are accepted
//! too). Object keys keep file order, and repeated keys are kept so that
//! validation reports them instead of silently keeping the last one.

use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::{
    format_rational, parse_rational, DiscreteMatching, FirmId, Market, RawDiscreteMarket, RawMarket,
    RawTuMarket, Rational, Roster, TuMatching, WorkerSet,
};
use crate::roadmap::RawRoadmap;

/// A JSON object read as an ordered list of entries, duplicates included.
#[derive(Debug, Clone, PartialEq)]
pub struct Entries<T>(pub Vec<(String, T)>);

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Entries<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V<T>(PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for V<T> {
            type Value = Entries<T>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a JSON object")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Entries<T>, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry()? {
                    out.push((k, v));
                }
                Ok(Entries(out))
            }
        }
        d.deserialize_map(V(PhantomData))
    }
}

/// A rational written as a string or a JSON integer.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalText(pub Rational);

impl<'de> Deserialize<'de> for RationalText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Int(i64),
        }
        match Repr::deserialize(d).map_err(|_| de::Error::custom("expected a value like \"6\" or \"3/2\""))? {
            Repr::Str(s) => parse_rational(&s).map(RationalText).map_err(de::Error::custom),
            Repr::Int(i) => Ok(RationalText(Rational::from_integer(i.into()))),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SetValue {
    set: Vec<String>,
    value: RationalText,
}

#[derive(Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum MarketFile {
    #[serde(rename = "tu")]
    Tu {
        firms: Entries<Vec<SetValue>>,
        workers: Entries<Entries<RationalText>>,
    },
    #[serde(rename = "discrete")]
    Discrete {
        firms: Entries<Vec<Vec<String>>>,
        workers: Entries<Vec<String>>,
    },
}

fn dedup(mut names: Vec<String>) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    names.retain(|n| seen.insert(n.clone()));
    names
}

/// Parses a market file without validating it.
pub fn parse_raw_market(text: &str) -> Result<RawMarket> {
    let file: MarketFile = serde_json::from_str(text)?;
    Ok(match file {
        MarketFile::Tu { firms, workers } => RawMarket::Tu(RawTuMarket {
            firms: firms
                .0
                .into_iter()
                .map(|(f, sets)| (f, sets.into_iter().map(|s| (dedup(s.set), s.value.0)).collect()))
                .collect(),
            workers: workers
                .0
                .into_iter()
                .map(|(w, vals)| (w, vals.0.into_iter().map(|(f, v)| (f, v.0)).collect()))
                .collect(),
        }),
        MarketFile::Discrete { firms, workers } => RawMarket::Discrete(RawDiscreteMarket {
            firms: firms
                .0
                .into_iter()
                .map(|(f, sets)| (f, sets.into_iter().map(dedup).collect()))
                .collect(),
            workers: workers.0,
        }),
    })
}

/// Parses and validates a market file.
pub fn parse_market(text: &str) -> Result<Market> {
    parse_raw_market(text)?.into_market()
}

pub fn raw_market_to_json(m: &RawMarket) -> Value {
    match m {
        RawMarket::Tu(m) => {
            let firms: Map<String, Value> = m
                .firms
                .iter()
                .map(|(f, sets)| {
                    let sets: Vec<Value> = sets
                        .iter()
                        .map(|(s, v)| json!({"set": s, "value": format_rational(v)}))
                        .collect();
                    (f.clone(), Value::Array(sets))
                })
                .collect();
            let workers: Map<String, Value> = m
                .workers
                .iter()
                .map(|(w, vals)| {
                    let vals: Map<String, Value> = vals
                        .iter()
                        .map(|(f, v)| (f.clone(), Value::String(format_rational(v))))
                        .collect();
                    (w.clone(), Value::Object(vals))
                })
                .collect();
            json!({"kind": "tu", "firms": firms, "workers": workers})
        }
        RawMarket::Discrete(m) => {
            let firms: Map<String, Value> = m.firms.iter().map(|(f, s)| (f.clone(), json!(s))).collect();
            let workers: Map<String, Value> = m.workers.iter().map(|(w, p)| (w.clone(), json!(p))).collect();
            json!({"kind": "discrete", "firms": firms, "workers": workers})
        }
    }
}

pub fn market_to_raw(m: &Market) -> RawMarket {
    match m {
        Market::Tu(m) => RawMarket::Tu(m.to_raw()),
        Market::Discrete(m) => RawMarket::Discrete(m.to_raw()),
    }
}

pub fn market_to_json(m: &Market) -> Value {
    raw_market_to_json(&market_to_raw(m))
}

/// Pretty JSON followed by a newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatchingFile {
    assignment: Entries<Option<String>>,
    #[serde(default)]
    prices: Option<Entries<RationalText>>,
}

/// Parsed matching file: assignment plus optional prices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingData {
    pub assignment: Vec<Option<FirmId>>,
    pub prices: Option<Vec<Rational>>,
}

pub fn parse_matching(text: &str, roster: &Roster) -> Result<MatchingData> {
    let file: MatchingFile = serde_json::from_str(text)?;
    let mut assignment = vec![None; roster.worker_count()];
    let mut seen = WorkerSet::EMPTY;
    for (w, f) in file.assignment.0 {
        let w = roster.worker(&w)?;
        if seen.contains(w) {
            return Err(Error::Parse(format!("worker {} assigned twice", roster.worker_name(w))));
        }
        seen.insert(w);
        assignment[w.0] = match f {
            Some(f) => Some(roster.firm(&f)?),
            None => None,
        };
    }
    let prices = match file.prices {
        None => None,
        Some(ps) => {
            let mut out = vec![Rational::from_integer(0.into()); roster.worker_count()];
            let mut seen = WorkerSet::EMPTY;
            for (w, v) in ps.0 {
                let w = roster.worker(&w)?;
                if seen.contains(w) {
                    return Err(Error::Parse(format!("price for {} given twice", roster.worker_name(w))));
                }
                seen.insert(w);
                out[w.0] = v.0;
            }
            Some(out)
        }
    };
    Ok(MatchingData { assignment, prices })
}

pub fn parse_discrete_matching(text: &str, roster: &Roster) -> Result<DiscreteMatching> {
    let data = parse_matching(text, roster)?;
    if data.prices.is_some() {
        return Err(Error::Parse("discrete matchings carry no prices".into()));
    }
    DiscreteMatching::new(roster, data.assignment)
}

pub fn parse_tu_matching(text: &str, roster: &Roster) -> Result<TuMatching> {
    let data = parse_matching(text, roster)?;
    let prices = data
        .prices
        .unwrap_or_else(|| vec![Rational::from_integer(0.into()); roster.worker_count()]);
    TuMatching::new(roster, data.assignment, prices)
}

fn assignment_json(roster: &Roster, assignment: &[Option<FirmId>]) -> Value {
    let map: Map<String, Value> = roster
        .workers()
        .filter_map(|w| {
            assignment[w.0].map(|f| (roster.worker_name(w).to_string(), Value::String(roster.firm_name(f).into())))
        })
        .collect();
    Value::Object(map)
}

pub fn discrete_matching_to_json(roster: &Roster, m: &DiscreteMatching) -> Value {
    json!({"assignment": assignment_json(roster, m.assignment())})
}

/// Prices are listed for matched workers only.
pub fn tu_matching_to_json(roster: &Roster, m: &TuMatching) -> Value {
    let prices: Map<String, Value> = roster
        .workers()
        .filter(|w| m.firm_of(*w).is_some())
        .map(|w| (roster.worker_name(w).to_string(), Value::String(format_rational(m.price(w)))))
        .collect();
    json!({"assignment": assignment_json(roster, m.assignment()), "prices": prices})
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RoadmapFile {
    technologies: Entries<Vec<String>>,
    edges: Vec<(String, String)>,
}

/// Parses a roadmap file; shape checks happen in `validate_roadmap`.
pub fn parse_roadmap(text: &str) -> Result<RawRoadmap> {
    let file: RoadmapFile = serde_json::from_str(text)?;
    Ok(RawRoadmap {
        technologies: file.technologies.0.into_iter().map(|(v, ws)| (v, dedup(ws))).collect(),
        edges: file.edges,
    })
}

pub fn roadmap_to_json(r: &RawRoadmap) -> Value {
    let techs: Map<String, Value> = r.technologies.iter().map(|(v, ws)| (v.clone(), json!(ws))).collect();
    let edges: Vec<Value> = r.edges.iter().map(|(a, b)| json!([a, b])).collect();
    json!({"technologies": techs, "edges": edges})
}
