//! Finite slices of the Cayley tree of order k.
//!
//! Vertices are named by child-index paths from the root: the root is `/`, its
//! children are `/1` .. `/(k+1)`, and every deeper vertex has children `1..=k`.
//! Within a slice, vertices also get a dense index in breadth-first order, so
//! `V_m` is always the index prefix `0..|V_m|`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default refusal threshold for `|V_n|`.
pub const DEFAULT_VERTEX_CAP: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TreeAddress(Vec<u32>);

impl TreeAddress {
    pub fn root() -> TreeAddress {
        TreeAddress(Vec::new())
    }

    pub fn from_path(path: Vec<u32>) -> TreeAddress {
        TreeAddress(path)
    }

    pub fn path(&self) -> &[u32] {
        &self.0
    }

    /// Distance to the root.
    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, index: u32) -> TreeAddress {
        let mut path = self.0.clone();
        path.push(index);
        TreeAddress(path)
    }

    pub fn parent(&self) -> Option<TreeAddress> {
        let (_, rest) = self.0.split_last()?;
        Some(TreeAddress(rest.to_vec()))
    }

    /// Whether the address names a vertex of the order-`k` tree.
    pub fn is_valid_for(&self, order: u32) -> bool {
        self.0.iter().enumerate().all(|(i, &c)| {
            let max = if i == 0 { order + 1 } else { order };
            (1..=max).contains(&c)
        })
    }

    pub fn is_adjacent(&self, other: &TreeAddress) -> bool {
        self.parent().as_ref() == Some(other) || other.parent().as_ref() == Some(self)
    }
}

impl fmt::Display for TreeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "/");
        }
        for c in &self.0 {
            write!(f, "/{c}")?;
        }
        Ok(())
    }
}

impl FromStr for TreeAddress {
    type Err = Error;

    fn from_str(s: &str) -> Result<TreeAddress> {
        let s = s.trim();
        if s == "/" {
            return Ok(TreeAddress::root());
        }
        let rest = s
            .strip_prefix('/')
            .ok_or_else(|| Error::Geometry(format!("address {s:?} must start with '/'")))?;
        let path = rest
            .split('/')
            .map(|part| {
                part.parse::<u32>()
                    .ok()
                    .filter(|&c| c >= 1)
                    .ok_or_else(|| Error::Geometry(format!("bad child index {part:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TreeAddress(path))
    }
}

impl Serialize for TreeAddress {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TreeAddress {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A parent-to-child edge, by dense vertex index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub parent: usize,
    pub child: usize,
}

/// All vertices and edges of the ball `V_n` around the root.
#[derive(Clone, Debug)]
pub struct TreeSlice {
    order: u32,
    depth: usize,
    vertices: Vec<TreeAddress>,
    /// `level_start[m]..level_start[m + 1]` is `W_m`.
    level_start: Vec<usize>,
    index: HashMap<TreeAddress, usize>,
    /// Edge `i` ends at vertex `i + 1`; every non-root vertex has one parent.
    edges: Vec<Edge>,
}

/// Closed form `|V_n| = 1 + (k+1)(k^n - 1)/(k - 1)`, saturating.
pub fn ball_size(order: u32, depth: usize) -> u128 {
    let mut total: u128 = 1;
    let mut level: u128 = 1;
    for m in 1..=depth {
        level = level.saturating_mul(if m == 1 { order as u128 + 1 } else { order as u128 });
        total = total.saturating_add(level);
    }
    total
}

impl TreeSlice {
    pub fn build(order: u32, depth: usize) -> Result<TreeSlice> {
        Self::build_with_cap(order, depth, DEFAULT_VERTEX_CAP)
    }

    pub fn build_with_cap(order: u32, depth: usize, cap: usize) -> Result<TreeSlice> {
        if order == 0 {
            return Err(Error::Geometry("tree order k must be at least 1".into()));
        }
        let size = ball_size(order, depth);
        if size > cap as u128 {
            return Err(Error::Resource { what: "tree slice vertices", requested: size, limit: cap as u128 });
        }
        let mut vertices = vec![TreeAddress::root()];
        let mut level_start = vec![0, 1];
        let mut edges = Vec::with_capacity(size as usize - 1);
        for m in 1..=depth {
            let (from, to) = (level_start[m - 1], level_start[m]);
            let arity = if m == 1 { order + 1 } else { order };
            for parent in from..to {
                for c in 1..=arity {
                    let child = vertices[parent].child(c);
                    edges.push(Edge { parent, child: vertices.len() });
                    vertices.push(child);
                }
            }
            level_start.push(vertices.len());
        }
        let index = vertices.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        Ok(TreeSlice { order, depth, vertices, level_start, index, edges })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// `|V_m|` for `m <= depth`.
    pub fn ball_count(&self, m: usize) -> usize {
        self.level_start[m.min(self.depth) + 1]
    }

    pub fn vertices(&self) -> &[TreeAddress] {
        &self.vertices
    }

    /// The sphere `W_m`.
    pub fn level(&self, m: usize) -> &[TreeAddress] {
        if m > self.depth {
            return &[];
        }
        &self.vertices[self.level_start[m]..self.level_start[m + 1]]
    }

    pub fn level_range(&self, m: usize) -> std::ops::Range<usize> {
        self.level_start[m]..self.level_start[m + 1]
    }

    pub fn index_of(&self, address: &TreeAddress) -> Option<usize> {
        self.index.get(address).copied()
    }

    pub fn address(&self, index: usize) -> &TreeAddress {
        &self.vertices[index]
    }

    pub fn contains(&self, address: &TreeAddress) -> bool {
        self.index.contains_key(address)
    }

    /// All of `L_n`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `L_m`: edges with both ends in `V_m`.
    pub fn edges_within(&self, m: usize) -> &[Edge] {
        &self.edges[..self.ball_count(m) - 1]
    }

    /// `S(x)`. Boundary vertices have no successors inside the slice.
    pub fn direct_successors(&self, x: &TreeAddress) -> Result<Vec<TreeAddress>> {
        if !self.contains(x) {
            return Err(Error::Geometry(format!("{x} is not a vertex of this slice")));
        }
        if x.depth() == self.depth {
            return Ok(Vec::new());
        }
        let arity = if x.is_root() { self.order + 1 } else { self.order };
        Ok((1..=arity).map(|c| x.child(c)).collect())
    }

    /// Dense indices of `S(x)` for a vertex index.
    pub(crate) fn successor_indices(&self, x: usize) -> std::ops::Range<usize> {
        let depth = self.vertices[x].depth();
        if depth == self.depth {
            return 0..0;
        }
        if x == 0 {
            return 1..self.level_start[2];
        }
        let k = self.order as usize;
        let offset = x - self.level_start[depth];
        let start = self.level_start[depth + 1] + offset * k;
        start..start + k
    }
}

/// Tree metric: `d(x, y) = |x| + |y| - 2 * lcp(x, y)`.
pub fn distance(x: &TreeAddress, y: &TreeAddress) -> usize {
    let common = x.0.iter().zip(&y.0).take_while(|(a, b)| a == b).count();
    x.depth() + y.depth() - 2 * common
}
