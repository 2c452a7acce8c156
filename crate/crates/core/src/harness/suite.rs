//! The full check: property suites per module plus the equivalence matrix,
//! collected into one report.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::check::{check_equivalence, CheckReport, MATRIX};
use super::instance::InstanceSpec;
use super::props::{
    barrec_properties, selection_properties, seqcore_properties, spector_properties, PropertyReport,
};
use super::random::{random_instance, RandomParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Seqcore,
    Selection,
    Barrec,
    Interdef,
    Spector,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "all" => Suite::All,
            "seqcore" => Suite::Seqcore,
            "selection" => Suite::Selection,
            "barrec" => Suite::Barrec,
            "interdef" => Suite::Interdef,
            "spector" => Suite::Spector,
            _ => {
                return Err(format!(
                    "unknown suite {s:?}; expected all, seqcore, selection, barrec, interdef or spector"
                ))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = format!("{self:?}").to_lowercase();
        f.write_str(&s)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub seeds: u64,
    pub depth: usize,
    pub fuel: u64,
    pub params: RandomParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seeds: u64,
    pub depth: usize,
    pub fuel: u64,
    pub pass: bool,
    pub properties: Vec<PropertyReport>,
    pub pairs: Vec<CheckReport>,
    /// Wall-clock milliseconds per entry. The only part that varies between runs.
    pub timing: BTreeMap<String, u64>,
}

impl SuiteReport {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("suite reports always serialize")
    }

    pub fn failures(&self) -> usize {
        let props = self.properties.iter().filter(|p| !p.pass).count();
        let pairs = self.pairs.iter().filter(|p| !p.pass).count();
        props + pairs
    }
}

/// Removes the `[timing]` table from a serialized report.
pub fn strip_timing(report: &str) -> Result<toml::Table, toml::de::Error> {
    let mut table: toml::Table = toml::from_str(report)?;
    table.remove("timing");
    Ok(table)
}

pub fn suite_instances(seeds: u64, params: &RandomParams) -> Vec<(u64, InstanceSpec)> {
    (0..seeds).map(|s| (s, random_instance(s, params))).collect()
}

fn timed<T>(timing: &mut BTreeMap<String, u64>, name: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timing.insert(name.to_string(), start.elapsed().as_millis() as u64);
    out
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let instances = suite_instances(cfg.seeds, &cfg.params);
    let mut timing = BTreeMap::new();
    let mut properties = Vec::new();
    let mut pairs = Vec::new();

    if cfg.suite.includes(Suite::Seqcore) {
        properties.extend(timed(&mut timing, "seqcore", seqcore_properties));
    }
    if cfg.suite.includes(Suite::Selection) {
        properties.extend(timed(&mut timing, "selection", selection_properties));
    }
    if cfg.suite.includes(Suite::Barrec) {
        properties.extend(timed(&mut timing, "barrec", || {
            barrec_properties(&instances, cfg.depth, cfg.fuel)
        }));
    }
    if cfg.suite.includes(Suite::Spector) {
        properties.extend(timed(&mut timing, "spector", || {
            spector_properties(&instances, cfg.fuel)
        }));
    }
    if cfg.suite.includes(Suite::Interdef) {
        for pair in MATRIX {
            pairs.push(timed(&mut timing, pair.derived, || {
                check_equivalence(pair, &instances, cfg.depth, cfg.fuel)
            }));
        }
    }

    let pass = properties.iter().all(|p| p.pass) && pairs.iter().all(|p| p.pass);
    SuiteReport {
        suite: cfg.suite,
        seeds: cfg.seeds,
        depth: cfg.depth,
        fuel: cfg.fuel,
        pass,
        properties,
        pairs,
        timing,
    }
}
