//! JSON model configuration and its translation into model objects.
//!
//! ```json
//! {
//!   "p": 3, "precision": 32, "k": 2, "depth": 2,
//!   "lambda": {"mode": "homogeneous",
//!              "table": {"++": {"log_of": "4"}, "+-": {"log_of": "10"}, "-+": "0", "--": {"log_of": "4"}}},
//!   "field": {"mode": "translation-invariant"},
//!   "normalization": "row"
//! }
//! ```
//!
//! Rationals are `"num/den"` strings. `{"log_of": "q"}` stands for `log_p(q)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{Coupling, ExternalField, IsingSpec};
use crate::model::{LambdaSpec, LambdaTable, Normalization};
use crate::padic::{parse_rational, Padic, DEFAULT_PRECISION};
use crate::tree::TreeAddress;

pub const MIN_PRECISION: u32 = 4;
pub const MAX_PRECISION: u32 = 256;

/// A p-adic input: a rational string or a logarithm of one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Rational(String),
    LogOf { log_of: String },
}

impl Scalar {
    pub fn to_padic(&self, prime: u32, precision: u32) -> Result<Padic> {
        match self {
            Scalar::Rational(text) => rational(text, prime, precision),
            Scalar::LogOf { log_of } => Ok(rational(log_of, prime, precision)?.log()?),
        }
    }
}

pub fn rational(text: &str, prime: u32, precision: u32) -> Result<Padic> {
    let (num, den) = parse_rational(text).map_err(Error::Config)?;
    Ok(Padic::from_rational(num, den, prime as u64, precision)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableConfig {
    #[serde(rename = "++")]
    pub pp: Scalar,
    #[serde(rename = "+-")]
    pub pm: Scalar,
    #[serde(rename = "-+")]
    pub mp: Scalar,
    #[serde(rename = "--")]
    pub mm: Scalar,
}

impl TableConfig {
    fn build(&self, prime: u32, precision: u32) -> Result<LambdaTable> {
        Ok(LambdaTable::new(
            self.pp.to_padic(prime, precision)?,
            self.pm.to_padic(prime, precision)?,
            self.mp.to_padic(prime, precision)?,
            self.mm.to_padic(prime, precision)?,
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LambdaConfig {
    Homogeneous { table: TableConfig },
    /// Tables keyed by the child endpoint of each edge, oriented parent to child.
    PerEdge { tables: BTreeMap<TreeAddress, TableConfig> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrMap {
    Scalar(Scalar),
    Map(BTreeMap<TreeAddress, Scalar>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsingConfig {
    #[serde(rename = "J")]
    pub j: ScalarOrMap,
    #[serde(default = "zero_eta")]
    pub eta: ScalarOrMap,
}

fn zero_eta() -> ScalarOrMap {
    ScalarOrMap::Scalar(Scalar::Rational("0".into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldConfig {
    Zero,
    /// Propagate inward from boundary values on `W_depth`; missing ones are 0.
    Solve {
        #[serde(default)]
        seed: BTreeMap<TreeAddress, Scalar>,
    },
    Explicit { values: BTreeMap<TreeAddress, Scalar> },
    TranslationInvariant,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig::Solve { seed: BTreeMap::new() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub p: Option<u64>,
    pub precision: Option<u32>,
    pub k: Option<u32>,
    pub depth: Option<usize>,
    pub lambda: Option<LambdaConfig>,
    pub ising: Option<IsingConfig>,
    pub field: Option<FieldConfig>,
    pub normalization: Option<Normalization>,
    /// Largest half-length of the path windows for marginal sweeps.
    pub windows: Option<usize>,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<ModelConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed config: {e}")))
    }

    pub fn prime(&self) -> Result<u32> {
        let p = self.p.ok_or_else(|| Error::Config("the prime p is required".into()))?;
        if !crate::padic::is_prime(p) || p > u32::MAX as u64 {
            return Err(crate::error::PadicError::NotPrime(p).into());
        }
        Ok(p as u32)
    }

    pub fn precision(&self) -> Result<u32> {
        let n = self.precision.unwrap_or(DEFAULT_PRECISION);
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&n) {
            return Err(Error::Config(format!(
                "precision {n} is outside [{MIN_PRECISION}, {MAX_PRECISION}]"
            )));
        }
        Ok(n)
    }

    pub fn order(&self) -> Result<u32> {
        self.k.ok_or_else(|| Error::Config("the tree order k is required".into()))
    }

    pub fn depth(&self) -> Result<usize> {
        self.depth.ok_or_else(|| Error::Config("the depth is required".into()))
    }

    pub fn field(&self) -> FieldConfig {
        self.field.clone().unwrap_or_default()
    }

    pub fn ising_spec(&self) -> Result<Option<IsingSpec>> {
        let Some(ising) = &self.ising else { return Ok(None) };
        let (p, n) = (self.prime()?, self.precision()?);
        let coupling = match &ising.j {
            ScalarOrMap::Scalar(s) => Coupling::Homogeneous(s.to_padic(p, n)?),
            ScalarOrMap::Map(m) => Coupling::PerEdge(
                m.iter().map(|(a, s)| Ok((a.clone(), s.to_padic(p, n)?))).collect::<Result<_>>()?,
            ),
        };
        let field = match &ising.eta {
            ScalarOrMap::Scalar(s) => ExternalField::Homogeneous(s.to_padic(p, n)?),
            ScalarOrMap::Map(m) => ExternalField::PerVertex(
                m.iter().map(|(a, s)| Ok((a.clone(), s.to_padic(p, n)?))).collect::<Result<_>>()?,
            ),
        };
        Ok(Some(IsingSpec::new(coupling, field)?))
    }

    /// The interaction given directly by `lambda`, if any.
    pub fn lambda_spec(&self) -> Result<Option<LambdaSpec>> {
        let Some(lambda) = &self.lambda else { return Ok(None) };
        let (p, n) = (self.prime()?, self.precision()?);
        let spec = match lambda {
            LambdaConfig::Homogeneous { table } => LambdaSpec::homogeneous(table.build(p, n)?)?,
            LambdaConfig::PerEdge { tables } => LambdaSpec::per_edge(
                tables.iter().map(|(a, t)| Ok((a.clone(), t.build(p, n)?))).collect::<Result<_>>()?,
            )?,
        };
        Ok(Some(spec))
    }

    pub fn scalar_map(&self, values: &BTreeMap<TreeAddress, Scalar>) -> Result<BTreeMap<TreeAddress, Padic>> {
        let (p, n) = (self.prime()?, self.precision()?);
        values.iter().map(|(a, s)| Ok((a.clone(), s.to_padic(p, n)?))).collect()
    }
}
