//! Star-mesh hybrid networks with a K-partite core.
//!
//! A network of order `(n, m, k, L)` has `n` sets of `k` extended stars. Each
//! star is a central node bridged to `L` paths of length `m`, and the central
//! nodes of different sets are all joined, giving a complete `n`-partite core
//! with parts of size `k`.
//!
//! Nodes are addressed by `(i, j, p, q)`: set `i ∈ [1,n]`, star `j ∈ [1,k]`,
//! branch `p ∈ [0,L]` and depth `q ∈ [0,m]`, with `(p, q) = (0, 0)` the centre.
//! The linear layout places each star in a contiguous block of `mL + 1`
//! indices, centre first, then branch after branch.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Validated network order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SmhkParams {
    n: usize,
    k: usize,
    m: usize,
    l: usize,
}

impl SmhkParams {
    /// Checks the bounds `n, k >= 2` and `m, L >= 1`.
    pub fn new(n: usize, k: usize, m: usize, l: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewSets(n));
        }
        if k < 2 {
            return Err(Error::TooFewStars(k));
        }
        if m < 1 {
            return Err(Error::PathTooShort(m));
        }
        if l < 1 {
            return Err(Error::TooFewBranches(l));
        }
        Ok(Self { n, k, m, l })
    }

    /// Number of sets.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Stars per set.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Length of every path branch.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Branches per star.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Nodes in one extended star, `mL + 1`.
    pub fn star_size(&self) -> usize {
        self.m * self.l + 1
    }

    /// `|V| = nk(mL + 1)`.
    pub fn node_count(&self) -> usize {
        self.n * self.k * self.star_size()
    }

    /// `|E| = knLm + k²n(n−1)/2`.
    pub fn edge_count(&self) -> usize {
        self.core_edge_count() + self.n * self.k * self.l * self.m
    }

    pub fn core_edge_count(&self) -> usize {
        self.k * self.k * self.n * (self.n - 1) / 2
    }

    /// Number of edge orbits, one per weight `w_0..w_m`.
    pub fn orbit_count(&self) -> usize {
        self.m + 1
    }
}

impl std::fmt::Display for SmhkParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n={} k={} m={} L={}", self.n, self.k, self.m, self.l)
    }
}

/// Raw-integer front door used by the CLI.
pub fn validate_params(n: usize, k: usize, m: usize, l: usize) -> Result<SmhkParams> {
    SmhkParams::new(n, k, m, l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub i: usize,
    pub j: usize,
    pub p: usize,
    pub q: usize,
}

impl NodeId {
    pub fn new(i: usize, j: usize, p: usize, q: usize) -> Self {
        Self { i, j, p, q }
    }

    pub fn center(i: usize, j: usize) -> Self {
        Self { i, j, p: 0, q: 0 }
    }

    pub fn is_center(&self) -> bool {
        self.q == 0
    }

    fn check(&self, params: &SmhkParams) -> Result<()> {
        let in_star = (1..=params.n).contains(&self.i) && (1..=params.k).contains(&self.j);
        let shape_ok = if self.q == 0 {
            self.p == 0
        } else {
            (1..=params.l).contains(&self.p) && self.q <= params.m
        };
        if in_star && shape_ok {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                i: self.i,
                j: self.j,
                p: self.p,
                q: self.q,
            })
        }
    }
}

/// An edge tagged with its orbit: 0 for core edges, `q` for the branch edge
/// between depths `q - 1` and `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitEdge {
    pub u: NodeId,
    pub v: NodeId,
    pub orbit: usize,
}

pub fn node_index(params: &SmhkParams, id: NodeId) -> Result<usize> {
    id.check(params)?;
    let base = ((id.i - 1) * params.k + (id.j - 1)) * params.star_size();
    Ok(if id.is_center() {
        base
    } else {
        base + 1 + (id.p - 1) * params.m + (id.q - 1)
    })
}

pub fn node_id(params: &SmhkParams, index: usize) -> Result<NodeId> {
    let size = params.node_count();
    if index >= size {
        return Err(Error::IndexOutOfRange { index, size });
    }
    let star = index / params.star_size();
    let offset = index % params.star_size();
    let i = star / params.k + 1;
    let j = star % params.k + 1;
    if offset == 0 {
        return Ok(NodeId::center(i, j));
    }
    let p = (offset - 1) / params.m + 1;
    let q = (offset - 1) % params.m + 1;
    Ok(NodeId { i, j, p, q })
}

/// All edges, core edges first ordered by `(i, j, i', j')`, then branch edges
/// ordered by `(i, j, p, q)`.
pub fn build_edges(params: &SmhkParams) -> Vec<OrbitEdge> {
    let (n, k, m, l) = (params.n, params.k, params.m, params.l);
    let mut edges = Vec::with_capacity(params.edge_count());
    for i in 1..=n {
        for j in 1..=k {
            for i2 in (i + 1)..=n {
                for j2 in 1..=k {
                    edges.push(OrbitEdge {
                        u: NodeId::center(i, j),
                        v: NodeId::center(i2, j2),
                        orbit: 0,
                    });
                }
            }
        }
    }
    for i in 1..=n {
        for j in 1..=k {
            for p in 1..=l {
                for q in 1..=m {
                    let parent = if q == 1 {
                        NodeId::center(i, j)
                    } else {
                        NodeId::new(i, j, p, q - 1)
                    };
                    edges.push(OrbitEdge {
                        u: parent,
                        v: NodeId::new(i, j, p, q),
                        orbit: q,
                    });
                }
            }
        }
    }
    edges
}

/// Edges as pairs of linear indices.
pub fn indexed_edges(params: &SmhkParams) -> Vec<(usize, usize, usize)> {
    build_edges(params)
        .into_iter()
        .map(|e| {
            // build_edges only emits valid nodes
            let u = node_index(params, e.u).expect("valid node");
            let v = node_index(params, e.v).expect("valid node");
            (u, v, e.orbit)
        })
        .collect()
}

/// Dense 0/1 adjacency, row-major.
pub fn adjacency(params: &SmhkParams) -> Vec<Vec<bool>> {
    let size = params.node_count();
    let mut adj = vec![vec![false; size]; size];
    for (u, v, _) in indexed_edges(params) {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    adj
}

pub fn is_connected(params: &SmhkParams) -> bool {
    let size = params.node_count();
    let mut neighbours = vec![Vec::new(); size];
    for (u, v, _) in indexed_edges(params) {
        neighbours[u].push(v);
        neighbours[v].push(u);
    }
    let mut seen = vec![false; size];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &neighbours[u] {
            if !seen[v] {
                seen[v] = true;
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    reached == size
}
