use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, PadicError, Result};
use crate::padic::Padic;
use crate::tree::TreeAddress;

/// A spin value in `{-1, +1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Spin {
    #[serde(rename = "+")]
    Up,
    #[serde(rename = "-")]
    Down,
}

impl Spin {
    pub const ALL: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn sign(self) -> i64 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }

    /// Row/column index: `+1 -> 0`, `-1 -> 1`.
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// The interaction `lambda(u, v)` of one edge, stored in the order `++, +-, -+, --`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaTable {
    #[serde(rename = "++")]
    pp: Padic,
    #[serde(rename = "+-")]
    pm: Padic,
    #[serde(rename = "-+")]
    mp: Padic,
    #[serde(rename = "--")]
    mm: Padic,
}

impl LambdaTable {
    pub fn new(pp: Padic, pm: Padic, mp: Padic, mm: Padic) -> LambdaTable {
        LambdaTable { pp, pm, mp, mm }
    }

    /// `lambda(u, v)`, with `u` the spin at the edge's first endpoint.
    pub fn get(&self, u: Spin, v: Spin) -> &Padic {
        match (u, v) {
            (Spin::Up, Spin::Up) => &self.pp,
            (Spin::Up, Spin::Down) => &self.pm,
            (Spin::Down, Spin::Up) => &self.mp,
            (Spin::Down, Spin::Down) => &self.mm,
        }
    }

    pub fn entries(&self) -> [&Padic; 4] {
        [&self.pp, &self.pm, &self.mp, &self.mm]
    }

    /// The table of the same edge read in the opposite direction.
    pub fn transposed(&self) -> LambdaTable {
        LambdaTable::new(self.pp.clone(), self.mp.clone(), self.pm.clone(), self.mm.clone())
    }

    pub fn prime(&self) -> u32 {
        self.pp.prime()
    }

    /// `lambda(1,1) + lambda(-1,-1) - lambda(1,-1) - lambda(-1,1)`.
    pub fn cross_combination(&self) -> Padic {
        &(&(&self.pp + &self.mm) - &self.pm) - &self.mp
    }

    fn validate(&self, prime: u32, edge: Option<&TreeAddress>) -> Result<()> {
        for (name, entry) in ["++", "+-", "-+", "--"].iter().zip(self.entries()) {
            if entry.prime() != prime {
                return Err(PadicError::PrimeMismatch(prime, entry.prime()).into());
            }
            if !entry.in_exp_domain() {
                let at = edge.map(|e| format!(" on edge {e}")).unwrap_or_default();
                return Err(Error::Config(format!(
                    "lambda({name}){at} has order {} and is outside the exp_p domain",
                    entry.order()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Interaction {
    Homogeneous(LambdaTable),
    /// Keyed by the child endpoint of each edge.
    PerEdge(BTreeMap<TreeAddress, LambdaTable>),
}

/// Interaction data for the whole tree, validated against the `exp_p` domain.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaSpec {
    prime: u32,
    precision: u32,
    interaction: Interaction,
}

impl LambdaSpec {
    pub fn homogeneous(table: LambdaTable) -> Result<LambdaSpec> {
        let prime = table.prime();
        table.validate(prime, None)?;
        let precision = table.entries().iter().map(|e| e.precision()).min().unwrap_or(1);
        Ok(LambdaSpec { prime, precision, interaction: Interaction::Homogeneous(table) })
    }

    pub fn per_edge(tables: BTreeMap<TreeAddress, LambdaTable>) -> Result<LambdaSpec> {
        let first = tables
            .values()
            .next()
            .ok_or_else(|| Error::Config("per-edge interaction needs at least one edge".into()))?;
        let prime = first.prime();
        for (edge, table) in &tables {
            if edge.is_root() {
                return Err(Error::Config("edges are keyed by their child vertex; '/' is not one".into()));
            }
            table.validate(prime, Some(edge))?;
        }
        let precision = tables
            .values()
            .flat_map(|t| t.entries().map(|e| e.precision()))
            .min()
            .unwrap_or(1);
        Ok(LambdaSpec { prime, precision, interaction: Interaction::PerEdge(tables) })
    }

    /// Skips the domain validation; only for exercising the runtime domain check.
    pub fn new_unchecked(interaction: Interaction, precision: u32) -> LambdaSpec {
        let prime = match &interaction {
            Interaction::Homogeneous(t) => t.prime(),
            Interaction::PerEdge(m) => m.values().next().map_or(2, |t| t.prime()),
        };
        LambdaSpec { prime, precision, interaction }
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn interaction(&self) -> &Interaction {
        &self.interaction
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.interaction, Interaction::Homogeneous(_))
    }

    /// The table of the edge ending at `child`, oriented parent to child.
    pub fn table_for(&self, child: &TreeAddress) -> Result<&LambdaTable> {
        match &self.interaction {
            Interaction::Homogeneous(t) => Ok(t),
            Interaction::PerEdge(m) => m
                .get(child)
                .ok_or_else(|| Error::Config(format!("no lambda table for the edge ending at {child}"))),
        }
    }

    /// Every table with the edge it belongs to (`None` for the homogeneous table).
    pub fn tables(&self) -> Vec<(Option<&TreeAddress>, &LambdaTable)> {
        match &self.interaction {
            Interaction::Homogeneous(t) => vec![(None, t)],
            Interaction::PerEdge(m) => m.iter().map(|(a, t)| (Some(a), t)).collect(),
        }
    }
}

/// `a = exp(lambda(1,1))`, `b = exp(lambda(1,-1))`, `c = exp(lambda(-1,1))`,
/// `d = exp(lambda(-1,-1))` for one edge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeWeights {
    pub a: Padic,
    pub b: Padic,
    pub c: Padic,
    pub d: Padic,
}

impl EdgeWeights {
    pub fn from_table(table: &LambdaTable) -> Result<EdgeWeights, PadicError> {
        Ok(EdgeWeights {
            a: table.get(Spin::Up, Spin::Up).exp()?,
            b: table.get(Spin::Up, Spin::Down).exp()?,
            c: table.get(Spin::Down, Spin::Up).exp()?,
            d: table.get(Spin::Down, Spin::Down).exp()?,
        })
    }

    pub fn weight(&self, u: Spin, v: Spin) -> &Padic {
        match (u, v) {
            (Spin::Up, Spin::Up) => &self.a,
            (Spin::Up, Spin::Down) => &self.b,
            (Spin::Down, Spin::Up) => &self.c,
            (Spin::Down, Spin::Down) => &self.d,
        }
    }

    /// `ad - bc`, which controls the contraction of the edge map.
    pub fn determinant(&self) -> Padic {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }
}
