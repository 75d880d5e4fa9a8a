//! Arithmetic-progression hypergraphs over the integers `[1..n]` and over the first `n` primes.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::primes::{first_primes, sieve};

/// Largest vertex count accepted by the exhaustive independence/transversal searches.
pub const BRUTEFORCE_VERTEX_LIMIT: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypergraphError {
    #[error(
        "hypergraph has {0} vertices, exhaustive search supports at most {BRUTEFORCE_VERTEX_LIMIT}"
    )]
    TooLarge(usize),
    #[error("unknown family `{0}` (expected `vdw` or `gt`)")]
    UnknownFamily(String),
}

/// Which vertex sequence the progressions live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// van der Waerden: vertices `1..=n`.
    Vdw,
    /// Green-Tao: vertices are the first `n` primes.
    Gt,
}

impl Family {
    pub fn vertices(self, n: usize) -> Vec<u64> {
        match self {
            Family::Vdw => (1..=n as u64).collect(),
            Family::Gt => first_primes(n),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Vdw => "vdw",
            Family::Gt => "gt",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = HypergraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vdw" => Ok(Family::Vdw),
            "gt" => Ok(Family::Gt),
            other => Err(HypergraphError::UnknownFamily(other.to_string())),
        }
    }
}

/// A finite hypergraph with an ordered vertex list. Edges are sorted vertex lists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Hypergraph {
    pub vertices: Vec<u64>,
    pub edges: Vec<Vec<u64>>,
}

impl Hypergraph {
    pub fn new(vertices: Vec<u64>, edges: Vec<Vec<u64>>) -> Self {
        Self { vertices, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// `arithp(k, n)`: vertices `1..=n`, edges all progressions of size `k` in it.
///
/// Edges are ordered by first element, then by common difference.
pub fn vdw_hypergraph(k: usize, n: usize) -> Hypergraph {
    let vertices: Vec<u64> = (1..=n as u64).collect();
    let mut edges = Vec::new();
    if k == 1 {
        edges.extend(vertices.iter().map(|&v| vec![v]));
    } else if k >= 2 {
        let n = n as u64;
        let span = (k - 1) as u64;
        for a in 1..=n {
            let mut d = 1;
            while a + span * d <= n {
                edges.push((0..k as u64).map(|i| a + i * d).collect());
                d += 1;
            }
        }
    }
    Hypergraph { vertices, edges }
}

/// `arithpp(k, n)`: vertices are the first `n` primes, edges the size-`k`
/// progressions among them. Same edge order as [`vdw_hypergraph`].
pub fn gt_hypergraph(k: usize, n: usize) -> Hypergraph {
    let vertices = first_primes(n);
    let mut edges = Vec::new();
    if k == 1 {
        edges.extend(vertices.iter().map(|&v| vec![v]));
    } else if k >= 2 && !vertices.is_empty() {
        let max = *vertices.last().unwrap();
        let is_prime = sieve(max);
        for (i, &a) in vertices.iter().enumerate() {
            for &b in &vertices[i + 1..] {
                let d = b - a;
                if a + (k as u64 - 1) * d > max {
                    break;
                }
                if (2..k as u64).all(|t| is_prime[(a + t * d) as usize]) {
                    edges.push((0..k as u64).map(|t| a + t * d).collect());
                }
            }
        }
    }
    Hypergraph { vertices, edges }
}

pub fn ap_hypergraph(family: Family, k: usize, n: usize) -> Hypergraph {
    match family {
        Family::Vdw => vdw_hypergraph(k, n),
        Family::Gt => gt_hypergraph(k, n),
    }
}

/// Smallest `n <= cap` such that the first `n` vertices of the family contain a
/// progression of size `k`; `None` if there is none up to `cap`.
pub fn first_progression_rank(family: Family, k: usize, cap: usize) -> Option<usize> {
    if k <= 1 {
        return (cap >= 1).then_some(1);
    }
    match family {
        Family::Vdw => (k <= cap).then_some(k),
        Family::Gt => {
            let primes = first_primes(cap);
            let &max = primes.last()?;
            let is_prime = sieve(max);
            let span = k as u64 - 1;
            for (idx, &p) in primes.iter().enumerate() {
                // does some progression of size k end in p?
                for &q in primes[..idx].iter().rev() {
                    let d = p - q;
                    if span * d >= p {
                        break;
                    }
                    if (2..=span).all(|t| is_prime[(p - t * d) as usize]) {
                        return Some(idx + 1);
                    }
                }
            }
            None
        }
    }
}

struct BitGraph {
    n: usize,
    // edges containing vertex i, as bitmasks
    incident: Vec<Vec<u64>>,
    edges: Vec<u64>,
}

impl BitGraph {
    fn new(h: &Hypergraph) -> Result<Self, HypergraphError> {
        let n = h.vertices.len();
        if n > BRUTEFORCE_VERTEX_LIMIT {
            return Err(HypergraphError::TooLarge(n));
        }
        let index = |v: u64| {
            h.vertices
                .iter()
                .position(|&w| w == v)
                .expect("edge vertex")
        };
        let edges: Vec<u64> = h
            .edges
            .iter()
            .map(|e| e.iter().fold(0u64, |m, &v| m | 1 << index(v)))
            .collect();
        let mut incident = vec![Vec::new(); n];
        for &e in &edges {
            for (i, inc) in incident.iter_mut().enumerate() {
                if e >> i & 1 == 1 {
                    inc.push(e);
                }
            }
        }
        Ok(Self { n, incident, edges })
    }
}

/// Maximum size of a vertex set containing no edge, by branch and bound.
pub fn independence_number_bruteforce(h: &Hypergraph) -> Result<usize, HypergraphError> {
    let g = BitGraph::new(h)?;
    if g.edges.contains(&0) {
        // an empty edge is contained in every set; only meaningful for degenerate input
        return Ok(0);
    }
    let mut order: Vec<usize> = (0..g.n).collect();
    // low-degree vertices first: they are the likely members of a large independent set
    order.sort_by_key(|&i| g.incident[i].len());

    fn search(
        g: &BitGraph,
        order: &[usize],
        pos: usize,
        chosen: u64,
        size: usize,
        best: &mut usize,
    ) {
        if size + (order.len() - pos) <= *best {
            return;
        }
        if pos == order.len() {
            *best = size;
            return;
        }
        let v = order[pos];
        let with = chosen | 1 << v;
        if g.incident[v].iter().all(|&e| e & with != e) {
            search(g, order, pos + 1, with, size + 1, best);
        }
        search(g, order, pos + 1, chosen, size, best);
    }

    let mut best = 0;
    search(&g, &order, 0, 0, 0, &mut best);
    Ok(best)
}

/// Minimum size of a vertex set meeting every edge, by branching over the
/// vertices of an unhit edge. Independent of [`independence_number_bruteforce`].
pub fn transversal_number_bruteforce(h: &Hypergraph) -> Result<usize, HypergraphError> {
    let g = BitGraph::new(h)?;
    if g.edges.contains(&0) {
        // an empty edge cannot be hit; report the full vertex set as the degenerate answer
        return Ok(g.n);
    }

    // lower bound: greedily packed pairwise-disjoint unhit edges
    fn packing_bound(edges: &[u64], hit: u64) -> usize {
        let mut used = 0u64;
        let mut count = 0;
        for &e in edges {
            if e & hit == 0 && e & used == 0 {
                used |= e;
                count += 1;
            }
        }
        count
    }

    fn search(edges: &[u64], hit: u64, size: usize, best: &mut usize) {
        if size + packing_bound(edges, hit) >= *best {
            return;
        }
        match edges.iter().find(|&&e| e & hit == 0) {
            None => *best = size,
            Some(&e) => {
                let mut rest = e;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    rest &= rest - 1;
                    search(edges, hit | bit, size + 1, best);
                }
            }
        }
    }

    let mut best = g.n + 1;
    search(&g.edges, 0, 0, &mut best);
    Ok(best.min(g.n))
}
