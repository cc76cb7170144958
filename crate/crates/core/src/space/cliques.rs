use serde::Serialize;

use super::{FiniteMetricSpace, Subset};
use crate::scalar::Scalar;

pub const DEFAULT_CLIQUE_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportMode {
    /// Inclusion-maximal subsets of diameter ≤ R.
    Cliques,
    /// Closed balls of radius R (diameter ≤ 2R).
    Balls,
}

#[derive(Debug, Clone)]
pub struct BoundedSubsets {
    pub sets: Vec<Subset>,
    pub mode: SupportMode,
}

/// Inclusion-maximal subsets of diameter at most `radius`.
///
/// These are the maximal cliques of the threshold graph `x ~ y ⇔ d(x,y) ≤ R`,
/// enumerated by Bron–Kerbosch with Tomita pivoting. If more than `cap`
/// cliques exist, the ball family `{B(x, R)}` is returned instead.
/// Sets are sorted lexicographically.
pub fn maximal_bounded_subsets<S: Scalar>(space: &FiniteMetricSpace<S>, radius: &S, cap: usize) -> BoundedSubsets {
    let n = space.len();
    let words = n.div_ceil(64);
    let mut adj = vec![Bits::new(words); n];
    for x in 0..n {
        for y in x + 1..n {
            if space.dist(x, y) <= *radius {
                adj[x].set(y);
                adj[y].set(x);
            }
        }
    }
    let mut search = Search { adj: &adj, cap, out: Vec::new(), overflow: false };
    let mut all = Bits::new(words);
    for x in 0..n {
        all.set(x);
    }
    search.expand(&mut Vec::new(), all, Bits::new(words));
    if search.overflow {
        return ball_family(space, radius);
    }
    let mut sets: Vec<Subset> = search
        .out
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            Subset::from_sorted(n, c)
        })
        .collect();
    sets.sort();
    BoundedSubsets { sets, mode: SupportMode::Cliques }
}

/// Distinct closed balls `B(x, R)`, sorted lexicographically.
pub fn ball_family<S: Scalar>(space: &FiniteMetricSpace<S>, radius: &S) -> BoundedSubsets {
    let mut sets: Vec<Subset> = (0..space.len()).map(|x| space.ball(x, radius)).collect();
    sets.sort();
    sets.dedup();
    BoundedSubsets { sets, mode: SupportMode::Balls }
}

#[derive(Clone, Debug)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(words: usize) -> Self {
        Bits(vec![0; words])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn and_count(&self, other: &Bits) -> u32 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones()).sum()
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + t)
            })
        })
    }
}

struct Search<'a> {
    adj: &'a [Bits],
    cap: usize,
    out: Vec<Vec<usize>>,
    overflow: bool,
}

impl Search<'_> {
    fn expand(&mut self, r: &mut Vec<usize>, mut p: Bits, mut x: Bits) {
        if self.overflow {
            return;
        }
        if p.is_empty() {
            if x.is_empty() {
                if self.out.len() >= self.cap {
                    self.overflow = true;
                    return;
                }
                self.out.push(r.clone());
            }
            return;
        }
        // pivot: vertex of P ∪ X with most neighbours in P
        let pivot = p
            .ones()
            .chain(x.ones())
            .max_by_key(|&u| (p.and_count(&self.adj[u]), std::cmp::Reverse(u)))
            .unwrap();
        let candidates: Vec<usize> = p.ones().filter(|&v| !self.adj[pivot].get(v)).collect();
        for v in candidates {
            r.push(v);
            self.expand(r, p.and(&self.adj[v]), x.and(&self.adj[v]));
            r.pop();
            p.clear(v);
            x.set(v);
            if self.overflow {
                return;
            }
        }
    }
}
