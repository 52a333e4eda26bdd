//! Classical community detection algorithms working on the graph alone.

mod girvan_newman;
mod greedy;
mod kernighan_lin;
mod louvain;
mod lpa;

use std::fmt;
use std::str::FromStr;

pub use girvan_newman::{girvan_newman, Selection};
pub use greedy::greedy_modularity;
pub use kernighan_lin::kernighan_lin;
pub use louvain::{louvain, louvain_traced, LouvainResult};
pub use lpa::label_propagation;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    Louvain,
    GirvanNewman,
    Greedy,
    LabelPropagation,
    KernighanLin,
}

impl Baseline {
    pub fn name(self) -> &'static str {
        match self {
            Baseline::Louvain => "louvain",
            Baseline::GirvanNewman => "gn",
            Baseline::Greedy => "greedy",
            Baseline::LabelPropagation => "lpa",
            Baseline::KernighanLin => "kl",
        }
    }

    pub fn is_seeded(self) -> bool {
        matches!(
            self,
            Baseline::Louvain | Baseline::LabelPropagation | Baseline::KernighanLin
        )
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "louvain" => Baseline::Louvain,
            "gn" | "girvan_newman" => Baseline::GirvanNewman,
            "greedy" => Baseline::Greedy,
            "lpa" => Baseline::LabelPropagation,
            "kl" | "kernighan_lin" => Baseline::KernighanLin,
            other => return Err(Error::InvalidConfig(format!("unknown baseline `{other}`"))),
        })
    }
}

impl FromStr for Selection {
    type Err = Error;

    /// `modularity` or `k=<int>`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "modularity" {
            return Ok(Selection::MaxModularity);
        }
        s.strip_prefix("k=")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k >= 1)
            .map(Selection::TargetK)
            .ok_or_else(|| Error::InvalidConfig(format!("invalid selection `{s}`")))
    }
}
