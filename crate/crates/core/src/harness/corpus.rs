use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::group::Group;

/// The corpus shipped with the crate.
pub const DEFAULT_CORPUS: &str = include_str!("../../corpus/default.toml");

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub name: String,
    pub degree: usize,
    /// 1-based image arrays.
    pub generators: Vec<Vec<usize>>,
    /// Defaults to every prime dividing the group order.
    #[serde(default)]
    pub primes: Option<Vec<u64>>,
    /// Only analysed when large groups are requested.
    #[serde(default)]
    pub large: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct NormalSubgroup {
    pub name: String,
    pub parent: String,
    pub generators: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LemmaKind {
    /// `tau(b) = tau(b_hat)` for the block of the stabiliser of `c`.
    Stabilizer,
    /// Quotient by a central p-subgroup.
    CentralQuotient,
    /// Degree-square sum over `IBr(G | phi)` when `G/N` is a p'-group.
    DegreeSum,
    /// `tau(b) = tau(c)` when `G/N` is a p'-group.
    PPrimeIndex,
    /// Ratio inequality when `G = PN`.
    PExtension,
}

impl LemmaKind {
    pub const ALL: [LemmaKind; 5] = [
        LemmaKind::Stabilizer,
        LemmaKind::CentralQuotient,
        LemmaKind::DegreeSum,
        LemmaKind::PPrimeIndex,
        LemmaKind::PExtension,
    ];

    pub fn id(self) -> &'static str {
        match self {
            LemmaKind::Stabilizer => "stabilizer",
            LemmaKind::CentralQuotient => "central-quotient",
            LemmaKind::DegreeSum => "degree-sum",
            LemmaKind::PPrimeIndex => "pprime-index",
            LemmaKind::PExtension => "p-extension",
        }
    }
}

impl fmt::Display for LemmaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for LemmaKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LemmaKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| format!("unknown lemma {s:?}"))
    }
}

impl Serialize for LemmaKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

impl<'de> Deserialize<'de> for LemmaKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Picks a character of the subgroup: `"trivial"` or an index.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum Selector {
    Index(usize),
    Named(String),
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct LemmaBinding {
    pub lemma: LemmaKind,
    pub group: String,
    pub subgroup: String,
    pub prime: u64,
    #[serde(default)]
    pub character: Option<Selector>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Corpus {
    #[serde(default)]
    pub groups: Vec<CorpusEntry>,
    #[serde(default)]
    pub normal_subgroups: Vec<NormalSubgroup>,
    #[serde(default)]
    pub lemma_bindings: Vec<LemmaBinding>,
}

impl Corpus {
    pub fn default_corpus() -> Corpus {
        Corpus::parse(DEFAULT_CORPUS).expect("embedded corpus is valid")
    }

    /// Parses and validates a corpus document.
    pub fn parse(text: &str) -> Result<Corpus, HarnessError> {
        let c: Corpus = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &std::path::Path) -> Result<Corpus, HarnessError> {
        Corpus::parse(&std::fs::read_to_string(path)?)
    }

    pub fn entry(&self, name: &str) -> Option<&CorpusEntry> {
        self.groups.iter().find(|g| g.name == name)
    }

    pub fn normal_subgroup(&self, name: &str) -> Option<&NormalSubgroup> {
        self.normal_subgroups.iter().find(|n| n.name == name)
    }

    /// Checks names, generators, normality and binding references.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let err = |m: String| Err(HarnessError::Corpus(m));
        let mut groups: HashMap<&str, Group> = HashMap::new();
        for e in &self.groups {
            if groups.contains_key(e.name.as_str()) {
                return err(format!("duplicate group {}", e.name));
            }
            let g = e.group()?;
            if let Some(ps) = &e.primes {
                if let Some(&p) = ps.iter().find(|&&p| !is_prime(p)) {
                    return err(format!("{}: {p} is not prime", e.name));
                }
            }
            groups.insert(&e.name, g);
        }
        let mut subs: HashMap<&str, &str> = HashMap::new();
        for n in &self.normal_subgroups {
            let Some(parent) = groups.get(n.parent.as_str()) else {
                return err(format!("{}: unknown parent {}", n.name, n.parent));
            };
            if groups.contains_key(n.name.as_str()) || subs.insert(&n.name, &n.parent).is_some() {
                return err(format!("duplicate name {}", n.name));
            }
            let sub = n.group(parent.degree())?;
            if !sub.is_subgroup_of(parent) {
                return err(format!("{} is not a subgroup of {}", n.name, n.parent));
            }
            if !parent.normalizes(&sub) {
                return err(format!("{} is not normal in {}", n.name, n.parent));
            }
        }
        for b in &self.lemma_bindings {
            match subs.get(b.subgroup.as_str()) {
                Some(&parent) if parent == b.group => {}
                Some(_) => return err(format!("{} is not a subgroup of {}", b.subgroup, b.group)),
                None => return err(format!("{}: unknown normal subgroup {}", b.lemma, b.subgroup)),
            }
            if !is_prime(b.prime) {
                return err(format!("{}: {} is not prime", b.lemma, b.prime));
            }
            if let Some(Selector::Named(s)) = &b.character {
                if s != "trivial" {
                    return err(format!("{}: unknown character selector {s:?}", b.lemma));
                }
            }
        }
        Ok(())
    }
}

impl CorpusEntry {
    pub fn group(&self) -> Result<Group, HarnessError> {
        build(&self.name, self.degree, &self.generators)
    }

    /// Configured primes, or all prime divisors of the order.
    pub fn primes_for(&self, order: u128) -> Vec<u64> {
        self.primes.clone().unwrap_or_else(|| prime_divisors(order))
    }
}

impl NormalSubgroup {
    pub fn group(&self, degree: usize) -> Result<Group, HarnessError> {
        build(&self.name, degree, &self.generators)
    }
}

fn build(name: &str, degree: usize, gens: &[Vec<usize>]) -> Result<Group, HarnessError> {
    if degree == 0 || degree > u16::MAX as usize {
        return Err(HarnessError::Corpus(format!("{name}: bad degree {degree}")));
    }
    Group::from_images(degree, gens).map_err(|e| HarnessError::Corpus(format!("{name}: {e}")))
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub(crate) fn prime_divisors(mut n: u128) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d as u64);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n as u64);
    }
    out
}
