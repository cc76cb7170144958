use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{build_graph_space, FiniteMetricSpace};

/// Largest SL(2, Z/p) order accepted by default.
pub const DEFAULT_ORDER_CAP: usize = 10_000;
const MAX_PAIRING_ATTEMPTS: usize = 100_000;

/// Undirected multigraph without loops. Adjacency lists are sorted by
/// neighbor and carry merged multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    adj: Vec<Vec<(usize, u32)>>,
}

impl Multigraph {
    /// Repeated edges add their multiplicities; zero-multiplicity edges are dropped.
    pub fn new(n: usize, edges: &[(usize, usize, u32)]) -> Result<Self> {
        let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
        for &(u, v, m) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!("edge ({u},{v}) outside {n} vertices")));
            }
            if m == 0 {
                continue;
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at {u}")));
            }
            adj[u].push((v, m));
            adj[v].push((u, m));
        }
        for list in &mut adj {
            list.sort_unstable();
            let mut merged: Vec<(usize, u32)> = Vec::with_capacity(list.len());
            for &(y, m) in list.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == y => last.1 += m,
                    _ => merged.push((y, m)),
                }
            }
            *list = merged;
        }
        Ok(Self { adj })
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("cycle needs at least 3 vertices, got {n}")));
        }
        Self::new(n, &(0..n).map(|i| (i, (i + 1) % n, 1)).collect::<Vec<_>>())
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, &(1..n).map(|i| (i - 1, i, 1)).collect::<Vec<_>>())
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1))).collect();
        Self::new(n, &edges)
    }

    /// `C_a × C_b`, vertex `(i, j)` at index `i·b + j`.
    pub fn torus(a: usize, b: usize) -> Result<Self> {
        if a < 3 || b < 3 {
            return Err(Error::InvalidParameter(format!("torus sides must be at least 3, got {a}×{b}")));
        }
        let mut edges = Vec::with_capacity(2 * a * b);
        for i in 0..a {
            for j in 0..b {
                edges.push((i * b + j, ((i + 1) % a) * b + j, 1));
                edges.push((i * b + j, i * b + (j + 1) % b, 1));
            }
        }
        Self::new(a * b, &edges)
    }

    /// Uniform simple connected `d`-regular graph from the pairing model,
    /// resampling until the pairing has no loops, no repeated edges and one
    /// component.
    pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Self> {
        if d == 0 || d >= n || (n * d) % 2 == 1 {
            return Err(Error::InvalidParameter(format!("no simple connected {d}-regular graph on {n} vertices")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut stubs: Vec<usize> = (0..n).flat_map(|x| std::iter::repeat_n(x, d)).collect();
        for _ in 0..MAX_PAIRING_ATTEMPTS {
            stubs.shuffle(&mut rng);
            let edges: Vec<(usize, usize, u32)> = stubs.chunks(2).map(|p| (p[0], p[1], 1)).collect();
            if edges.iter().any(|e| e.0 == e.1) {
                continue;
            }
            let g = Self::new(n, &edges)?;
            if g.adj.iter().all(|l| l.len() == d) && g.is_connected() {
                return Ok(g);
            }
        }
        Err(Error::InvalidParameter(format!("pairing model did not produce a simple {d}-regular graph")))
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, u32)] {
        &self.adj[x]
    }

    pub fn multiplicity(&self, x: usize, y: usize) -> u32 {
        self.adj[x].binary_search_by_key(&y, |e| e.0).map_or(0, |i| self.adj[x][i].1)
    }

    pub fn degree(&self, x: usize) -> u64 {
        self.adj[x].iter().map(|e| u64::from(e.1)).sum()
    }

    pub fn max_degree(&self) -> u64 {
        (0..self.len()).map(|x| self.degree(x)).max().unwrap_or(0)
    }

    /// Edges `(u, v, δ)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|e| e.0 > u).map(|&(v, m)| (u, v, m)));
        }
        out
    }

    pub fn components(&self) -> usize {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &(y, _) in &self.adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.components() <= 1
    }

    /// Shortest-path metric; fails on disconnected graphs.
    pub fn metric_space<S: Scalar>(&self) -> Result<FiniteMetricSpace<S>> {
        build_graph_space(self.len(), &self.edges())
    }
}

type Mat2 = [u64; 4];

fn mul_mod(a: &Mat2, b: &Mat2, p: u64) -> Mat2 {
    [
        (a[0] * b[0] + a[1] * b[2]) % p,
        (a[0] * b[1] + a[1] * b[3]) % p,
        (a[2] * b[0] + a[3] * b[2]) % p,
        (a[2] * b[1] + a[3] * b[3]) % p,
    ]
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Cayley graph of SL(2, Z/p) for the generators `A = [[1,1],[0,1]]`,
/// `B = [[1,0],[1,1]]` and their inverses, under right multiplication.
/// Vertices are the matrices `[a, b; c, d]` in lexicographic order of
/// `(a, b, c, d)`.
pub fn cayley_sl2(p: u64, cap: usize) -> Result<Multigraph> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p < 3 {
        return Err(Error::InvalidParameter("SL(2, Z/p) family needs p ≥ 3".into()));
    }
    let order = p * (p * p - 1);
    if order > cap as u64 {
        return Err(Error::TooLarge { what: "SL(2, Z/p) order", size: order as usize, cap });
    }
    let pu = p as usize;
    let key = |m: &Mat2| ((m[0] as usize * pu + m[1] as usize) * pu + m[2] as usize) * pu + m[3] as usize;
    let mut index = vec![usize::MAX; pu.pow(4)];
    let mut elements = Vec::with_capacity(order as usize);
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    if (a * d + p * p - (b * c) % p) % p == 1 {
                        let m = [a, b, c, d];
                        index[key(&m)] = elements.len();
                        elements.push(m);
                    }
                }
            }
        }
    }
    let gens: [Mat2; 2] = [[1, 1, 0, 1], [1, 0, 1, 1]];
    let mut edges = Vec::with_capacity(2 * elements.len());
    for (i, g) in elements.iter().enumerate() {
        for s in &gens {
            edges.push((i, index[key(&mul_mod(g, s, p))], 1));
        }
    }
    Multigraph::new(elements.len(), &edges)
}

/// A named graph family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    Cycles { sizes: Vec<usize> },
    Paths { sizes: Vec<usize> },
    Complete { sizes: Vec<usize> },
    Torus { sides: Vec<(usize, usize)> },
    /// Member `i` is sampled with seed `seed + i`.
    RandomRegular { degree: usize, sizes: Vec<usize>, seed: u64 },
    Sl2 { primes: Vec<u64> },
}

impl FamilySpec {
    /// Seed used for member `i`, for randomized families.
    pub fn member_seed(&self, i: usize) -> Option<u64> {
        match self {
            FamilySpec::RandomRegular { seed, .. } => Some(seed.wrapping_add(i as u64)),
            _ => None,
        }
    }
}

pub fn family(spec: &FamilySpec) -> Result<Vec<Multigraph>> {
    match spec {
        FamilySpec::Cycles { sizes } => sizes.iter().map(|&n| Multigraph::cycle(n)).collect(),
        FamilySpec::Paths { sizes } => sizes.iter().map(|&n| Multigraph::path(n)).collect(),
        FamilySpec::Complete { sizes } => sizes.iter().map(|&n| Multigraph::complete(n)).collect(),
        FamilySpec::Torus { sides } => sides.iter().map(|&(a, b)| Multigraph::torus(a, b)).collect(),
        FamilySpec::RandomRegular { degree, sizes, .. } => sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| Multigraph::random_regular(n, *degree, spec.member_seed(i).expect("randomized family")))
            .collect(),
        FamilySpec::Sl2 { primes } => primes.iter().map(|&p| cayley_sl2(p, DEFAULT_ORDER_CAP)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicities_merge() {
        let g = Multigraph::new(2, &[(0, 1, 1), (1, 0, 1)]).unwrap();
        assert_eq!(g.multiplicity(0, 1), 2);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.edges(), vec![(0, 1, 2)]);
        assert!(Multigraph::new(2, &[(1, 1, 1)]).is_err());
    }

    #[test]
    fn sl2_orders() {
        for (p, order) in [(3, 24), (5, 120), (7, 336), (11, 1320)] {
            let g = cayley_sl2(p, DEFAULT_ORDER_CAP).unwrap();
            assert_eq!(g.len(), order);
            assert!((0..g.len()).all(|x| g.degree(x) == 4 && g.neighbors(x).len() == 4));
            assert!(g.is_connected());
        }
        assert_eq!(cayley_sl2(4, DEFAULT_ORDER_CAP).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(cayley_sl2(23, DEFAULT_ORDER_CAP), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn random_regular_is_simple_and_seeded() {
        let g = Multigraph::random_regular(12, 3, 5).unwrap();
        assert!((0..12).all(|x| g.degree(x) == 3));
        assert!(g.is_connected());
        assert_eq!(g, Multigraph::random_regular(12, 3, 5).unwrap());
        assert!(Multigraph::random_regular(7, 3, 0).is_err());
    }

    #[test]
    fn families() {
        let sl2 = family(&FamilySpec::Sl2 { primes: vec![3, 5] }).unwrap();
        assert_eq!(sl2.iter().map(Multigraph::len).collect::<Vec<_>>(), vec![24, 120]);
        let t = Multigraph::torus(3, 4).unwrap();
        assert!((0..12).all(|x| t.degree(x) == 4));
        let spec = FamilySpec::RandomRegular { degree: 3, sizes: vec![9], seed: 1 };
        assert!(family(&spec).is_err());
    }
}
