//! JSON configuration: group specs, admissible tuples and sublattice data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finabel::FinAbGroup;
use crate::heisenberg::BilinearPairing;
use crate::lattice::gaussian::parse_rational;
use crate::lattice::{GaussianRational, IsotropicSublatticeData};
use crate::theta::AdmissibleTuple;

/// Which path of the pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Theta groups; the target is a torus power times projective space.
    Birational,
    /// Lattice data, cocycles, Waring and Chern certificates.
    Diff,
    Both,
}

impl Mode {
    pub fn birational(self) -> bool {
        matches!(self, Mode::Birational | Mode::Both)
    }

    pub fn diff(self) -> bool {
        matches!(self, Mode::Diff | Mode::Both)
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "birational" => Ok(Mode::Birational),
            "diff" => Ok(Mode::Diff),
            "both" => Ok(Mode::Both),
            _ => Err(Error::InvalidInput(format!(
                "mode {s:?} is not one of birational, diff, both"
            ))),
        }
    }
}

/// A pairing entry: an integer for cyclic `C`, or `C`-coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairingEntry {
    Scalar(i64),
    Coords(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeisenbergSpec {
    #[serde(rename = "A")]
    pub a: Vec<u64>,
    #[serde(rename = "B")]
    pub b: Vec<u64>,
    #[serde(rename = "C")]
    pub c: Vec<u64>,
    pub matrix: Vec<Vec<PairingEntry>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtraspecialSpec {
    pub p: u64,
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default = "exponent_p")]
    pub exponent: String,
}

fn one() -> usize {
    1
}

fn exponent_p() -> String {
    "p".into()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupSpec {
    Heisenberg(HeisenbergSpec),
    Extraspecial(ExtraspecialSpec),
    /// Invariant factors `d1, d2, …` with `d_{i+1} | d_i`.
    Abelian(Vec<u64>),
    Product(Vec<GroupSpec>),
}

fn group(factors: &[u64]) -> Result<FinAbGroup> {
    if factors.is_empty() {
        Ok(FinAbGroup::trivial())
    } else {
        FinAbGroup::new(factors.to_vec())
    }
}

impl HeisenbergSpec {
    pub fn pairing(&self) -> Result<BilinearPairing> {
        let (a, b, c) = (group(&self.a)?, group(&self.b)?, group(&self.c)?);
        let matrix: Vec<Vec<Vec<i64>>> = self
            .matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| match e {
                        PairingEntry::Scalar(v) if c.rank() == 1 => Ok(vec![*v]),
                        PairingEntry::Scalar(_) => Err(Error::InvalidInput(
                            "scalar pairing entries need a cyclic C".into(),
                        )),
                        PairingEntry::Coords(v) => Ok(v.clone()),
                    })
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        BilinearPairing::new(a, b, c, &matrix)
    }
}

impl GroupSpec {
    /// Heisenberg factors whose product is the described group. An abelian
    /// group contributes one centre-only factor `H(0 × 0 → Z/d)` per
    /// invariant factor.
    pub fn factors(&self) -> Result<Vec<BilinearPairing>> {
        match self {
            GroupSpec::Heisenberg(h) => Ok(vec![h.pairing()?]),
            GroupSpec::Extraspecial(e) => {
                if e.exponent != "p" {
                    return Err(Error::InvalidInput(format!(
                        "extraspecial exponent {:?} is not supported; only \"p\"",
                        e.exponent
                    )));
                }
                if e.n == 0 {
                    return Err(Error::InvalidInput("extraspecial n must be at least 1".into()));
                }
                Ok(vec![BilinearPairing::extraspecial(e.p, e.n)?])
            }
            GroupSpec::Abelian(ds) => {
                group(ds)?;
                Ok(ds
                    .iter()
                    .map(|&d| {
                        BilinearPairing::zero(FinAbGroup::trivial(), FinAbGroup::trivial(), FinAbGroup::cyclic(d))
                    })
                    .collect())
            }
            GroupSpec::Product(parts) => {
                let mut out = vec![];
                for p in parts {
                    out.extend(p.factors()?);
                }
                if out.is_empty() {
                    return Err(Error::InvalidInput("empty product".into()));
                }
                Ok(out)
            }
        }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match self {
            GroupSpec::Heisenberg(h) => format!("H(A={:?}, B={:?}, C={:?})", h.a, h.b, h.c),
            GroupSpec::Extraspecial(e) => {
                format!("extraspecial {}^(1+{})", e.p, 2 * e.n)
            }
            GroupSpec::Abelian(ds) => format!("abelian {ds:?}"),
            GroupSpec::Product(parts) => {
                let inner: Vec<String> = parts.iter().map(GroupSpec::describe).collect();
                inner.join(" × ")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmissibleSpec {
    pub entries: Vec<u64>,
    #[serde(default)]
    pub char_exclusion: Option<u64>,
}

impl AdmissibleSpec {
    pub fn tuple(&self) -> Result<AdmissibleTuple> {
        AdmissibleTuple::new(self.entries.clone(), self.char_exclusion)
    }
}

/// A rational written as a JSON integer or an `"n/d"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalSpec {
    Int(i64),
    Text(String),
}

impl RationalSpec {
    fn value(&self) -> Result<num_rational::BigRational> {
        match self {
            RationalSpec::Int(v) => Ok(num_rational::BigRational::from_integer((*v).into())),
            RationalSpec::Text(s) => parse_rational(s),
        }
    }
}

/// `H` entries are `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SublatticeSpec {
    pub n: usize,
    pub c: u64,
    #[serde(rename = "H")]
    pub h: Vec<Vec<[RationalSpec; 2]>>,
    pub lambda: Vec<Vec<i64>>,
    pub gamma_denominator: u64,
}

impl SublatticeSpec {
    pub fn data(&self) -> Result<IsotropicSublatticeData> {
        let h = self
            .h
            .iter()
            .map(|row| {
                row.iter()
                    .map(|[re, im]| Ok(GaussianRational::new(re.value()?, im.value()?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        IsotropicSublatticeData::new(self.n, h, self.c, self.lambda.clone(), self.gamma_denominator)
    }
}

/// Top-level configuration file. Each command reads the fields it needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub admissible: Option<AdmissibleSpec>,
    #[serde(default)]
    pub sublattice: Option<SublatticeSpec>,
    /// Characteristic to stay coprime to.
    #[serde(default)]
    pub char_exclusion: Option<u64>,
    /// Declared rank bound `r` of the input group.
    #[serde(default)]
    pub rank_bound: Option<usize>,
    /// Divisor for the Chern integrality step.
    #[serde(default = "default_d")]
    pub d: u64,
    #[serde(default)]
    pub mode: Option<Mode>,
}

fn default_d() -> u64 {
    1
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        if cfg.d == 0 {
            return Err(Error::InvalidInput("d must be positive".into()));
        }
        Ok(cfg)
    }

    /// A config holding only a group.
    pub fn for_group(group: GroupSpec) -> Self {
        Config {
            group: Some(group),
            admissible: None,
            sublattice: None,
            char_exclusion: None,
            rank_bound: None,
            d: 1,
            mode: None,
        }
    }

    pub fn group(&self) -> Result<&GroupSpec> {
        self.group
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("config has no \"group\"".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_group_fragments() {
        let c = Config::from_json(r#"{"group": {"extraspecial": {"p": 3, "n": 1, "exponent": "p"}}}"#).unwrap();
        let f = c.group().unwrap().factors().unwrap();
        assert_eq!(f, vec![BilinearPairing::extraspecial(3, 1).unwrap()]);

        let c = Config::from_json(
            r#"{"group": {"heisenberg": {"A": [4, 2], "B": [4, 2], "C": [4], "matrix": [[1, 0], [0, 2]]}}}"#,
        )
        .unwrap();
        assert_eq!(c.group().unwrap().factors().unwrap().len(), 1);

        let c = Config::from_json(r#"{"group": {"abelian": [4, 2]}, "d": 3}"#).unwrap();
        let f = c.group().unwrap().factors().unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].c.factors(), &[4]);
        assert_eq!(c.d, 3);

        let c = Config::from_json(
            r#"{"group": {"product": [{"extraspecial": {"p": 2}}, {"abelian": [3]}]}, "mode": "diff"}"#,
        )
        .unwrap();
        assert_eq!(c.group().unwrap().factors().unwrap().len(), 2);
        assert_eq!(c.mode, Some(Mode::Diff));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(Config::from_json(r#"{"group": {"abelian": [2, 4]}}"#).unwrap().group().unwrap().factors().is_err());
        assert!(Config::from_json(r#"{"grup": {}}"#).is_err());
        assert!(Config::from_json(r#"{"group": {"extraspecial": {"p": 3, "exponent": "p2"}}}"#)
            .unwrap()
            .group()
            .unwrap()
            .factors()
            .is_err());
        assert!(Config::from_json(r#"{"d": 0}"#).is_err());
    }

    #[test]
    fn parses_sublattice_and_admissible() {
        let c = Config::from_json(
            r#"{"sublattice": {"n": 1, "c": 2, "H": [[[1, 0]]], "lambda": [[2]], "gamma_denominator": 2},
                "admissible": {"entries": [4, 2], "char_exclusion": 3}}"#,
        )
        .unwrap();
        let d = c.sublattice.unwrap().data().unwrap();
        assert_eq!(d.h_matrix[0][0], GaussianRational::int(1, 0));
        assert_eq!(c.admissible.unwrap().tuple().unwrap().entries, vec![4, 2]);

        let s: SublatticeSpec =
            serde_json::from_str(r#"{"n": 1, "c": 3, "H": [[["1/3", 0]]], "lambda": [[3]], "gamma_denominator": 3}"#)
                .unwrap();
        assert_eq!(s.data().unwrap().h_matrix[0][0].re, crate::lattice::gaussian::frac(1, 3));
    }
}
