//! Fixed-radius neighborhood graphs and discrete cut quantities.
//!
//! Adjacency is built by uniform-grid bucketing with cell side `r` and a
//! 3^d neighbor-cell scan; the output is identical to the all-pairs
//! definition. Ties `||x_i - x_j|| = r` count as edges, matching the
//! boundary-inclusive indicator, with the comparison done on squared
//! distances.

use crate::error::Error;
use crate::sampling::Sample;
use crate::Result;

/// A vertex subset stored as a bit set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    words: Vec<u64>,
    n: usize,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { words: vec![0; n.div_ceil(64)], n }
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Self {
        let mut s = Self::empty(n);
        for &i in indices {
            s.insert(i);
        }
        s
    }

    pub fn from_members<F: FnMut(usize) -> bool>(n: usize, mut f: F) -> Self {
        let mut s = Self::empty(n);
        for i in 0..n {
            if f(i) {
                s.insert(i);
            }
        }
        s
    }

    /// Low-order mask constructor for small graphs (vertex i in S iff bit i).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n <= 64);
        VertexSet { words: vec![mask], n }
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn complement(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        let trailing = self.n % 64;
        if trailing != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << trailing) - 1;
            }
        }
        VertexSet { words, n: self.n }
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.contains(i)).collect()
    }
}

/// Discrete volume and perimeter of a subset together with its
/// normalized cut `h(S; G) = sigma(S) / min(delta(S), delta(S^c))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutEvaluation {
    pub delta_s: u64,
    pub delta_sc: u64,
    pub sigma_s: u64,
    pub h: f64,
    /// Set when `S` or `S^c` is empty; `h` is `inf` either way whenever
    /// the smaller volume vanishes (the `0/0 = inf` convention).
    pub degenerate: bool,
}

/// Unit-weight neighborhood graph `G_{n,r}` on sample points.
#[derive(Debug, Clone)]
pub struct NeighborhoodGraph {
    /// CSR offsets, length n + 1.
    offsets: Vec<usize>,
    /// Sorted neighbor lists, each edge stored in both directions.
    neighbors: Vec<u32>,
    pub r: f64,
    pub edge_count: u64,
}

impl NeighborhoodGraph {
    /// Build from a sample at connectivity radius `r > 0`.
    pub fn build(sample: &Sample, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidDomain(format!("graph radius must be positive, got {r}")));
        }
        let n = sample.len();
        if n as u64 > u32::MAX as u64 {
            return Err(Error::Unsupported("graphs beyond u32 vertex ids".into()));
        }
        let dim = sample.dim();
        let r2 = r * r;

        // Grid bucketing with cell side r.
        let mut lo = vec![f64::INFINITY; dim];
        for p in sample.iter() {
            for j in 0..dim {
                lo[j] = lo[j].min(p[j]);
            }
        }
        let cell_of = |p: &[f64]| -> Vec<i64> {
            (0..dim).map(|j| ((p[j] - lo[j]) / r).floor() as i64).collect()
        };
        let mut buckets: std::collections::HashMap<Vec<i64>, Vec<u32>> =
            std::collections::HashMap::new();
        for (i, p) in sample.iter().enumerate() {
            buckets.entry(cell_of(p)).or_default().push(i as u32);
        }

        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut shifts = vec![0i64; dim];
        for (i, p) in sample.iter().enumerate() {
            let home = cell_of(p);
            // Scan the 3^d neighborhood of the home cell.
            shifts.iter_mut().for_each(|s| *s = -1);
            loop {
                let key: Vec<i64> = home.iter().zip(&shifts).map(|(c, s)| c + s).collect();
                if let Some(bucket) = buckets.get(&key) {
                    for &j in bucket {
                        if (j as usize) <= i {
                            continue;
                        }
                        let q = sample.point(j as usize);
                        let d2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                        if d2 <= r2 {
                            adjacency[i].push(j);
                            adjacency[j as usize].push(i as u32);
                        }
                    }
                }
                // Advance the shift vector over {-1, 0, 1}^d.
                let mut exhausted = true;
                for s in shifts.iter_mut() {
                    if *s < 1 {
                        *s += 1;
                        exhausted = false;
                        break;
                    }
                    *s = -1;
                }
                if exhausted {
                    break;
                }
            }
        }

        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0usize);
        let mut neighbors = Vec::new();
        for adj in adjacency.iter_mut() {
            adj.sort_unstable();
            neighbors.extend_from_slice(adj);
            offsets.push(neighbors.len());
        }
        let edge_count = (neighbors.len() / 2) as u64;
        Ok(NeighborhoodGraph { offsets, neighbors, r, edge_count })
    }

    /// Brute-force all-pairs construction; the oracle the bucketed build
    /// is tested against.
    pub fn build_brute_force(sample: &Sample, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidDomain(format!("graph radius must be positive, got {r}")));
        }
        let n = sample.len();
        let r2 = r * r;
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d2: f64 = sample
                    .point(i)
                    .iter()
                    .zip(sample.point(j))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if d2 <= r2 {
                    adjacency[i].push(j as u32);
                    adjacency[j].push(i as u32);
                }
            }
        }
        let mut offsets = vec![0usize];
        let mut neighbors = Vec::new();
        for adj in &adjacency {
            neighbors.extend_from_slice(adj);
            offsets.push(neighbors.len());
        }
        let edge_count = (neighbors.len() / 2) as u64;
        Ok(NeighborhoodGraph { offsets, neighbors, r, edge_count })
    }

    /// Build directly from explicit adjacency (used by the edge-list loader
    /// and synthetic test graphs). Edges are (i, j) pairs, i != j, each
    /// counted once.
    pub fn from_edges(n: usize, edges: &[(u32, u32)], r: f64) -> Result<Self> {
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(i, j) in edges {
            if i == j || i as usize >= n || j as usize >= n {
                return Err(Error::InvalidDomain(format!("bad edge ({i}, {j}) for n = {n}")));
            }
            adjacency[i as usize].push(j);
            adjacency[j as usize].push(i);
        }
        let mut offsets = vec![0usize];
        let mut neighbors = Vec::new();
        for adj in adjacency.iter_mut() {
            adj.sort_unstable();
            adj.dedup();
            neighbors.extend_from_slice(adj);
            offsets.push(neighbors.len());
        }
        let edge_count = (neighbors.len() / 2) as u64;
        Ok(NeighborhoodGraph { offsets, neighbors, r, edge_count })
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn total_degree(&self) -> u64 {
        2 * self.edge_count
    }

    /// Discrete volume `delta(S)`, complement volume and perimeter `sigma(S)`.
    pub fn evaluate_cut(&self, s: &VertexSet) -> CutEvaluation {
        let n = self.vertex_count();
        debug_assert_eq!(s.len(), n);
        let mut delta_s = 0u64;
        let mut sigma = 0u64;
        for i in 0..n {
            if !s.contains(i) {
                continue;
            }
            delta_s += self.degree(i) as u64;
            for &j in self.neighbors(i) {
                if !s.contains(j as usize) {
                    sigma += 1;
                }
            }
        }
        let delta_sc = self.total_degree() - delta_s;
        let count = s.count();
        let degenerate = count == 0 || count == n;
        let min_vol = delta_s.min(delta_sc);
        let h = if min_vol == 0 { f64::INFINITY } else { sigma as f64 / min_vol as f64 };
        CutEvaluation { delta_s, delta_sc, sigma_s: sigma, h, degenerate }
    }

    /// Exact conductance by enumeration over complement pairs, for
    /// graphs of at most [`ENUM_MAX`] vertices. Ties break toward the
    /// smallest representative bitmask (the representative excludes the
    /// last vertex). Returns `(H, argmin)`.
    pub fn conductance_exact(&self) -> Result<(f64, VertexSet)> {
        let n = self.vertex_count();
        if n > ENUM_MAX {
            return Err(Error::EnumerationBudget { n, max: ENUM_MAX });
        }
        if n < 2 {
            return Ok((f64::INFINITY, VertexSet::empty(n)));
        }
        let adj_masks: Vec<u64> = (0..n)
            .map(|i| self.neighbors(i).iter().fold(0u64, |m, &j| m | 1 << j))
            .collect();
        let degrees: Vec<u64> = (0..n).map(|i| self.degree(i) as u64).collect();
        let total = self.total_degree();

        // Gray-code walk over subsets of {0, .., n-2}: each complement
        // pair is visited exactly once (the representative excludes
        // vertex n-1). Incremental updates via the adjacency masks.
        let m = n - 1;
        let mut cur_mask = 0u64;
        let mut delta = 0u64;
        let mut sigma = 0i64;
        // best = (sigma, min_delta, mask); comparisons are exact in u128.
        let mut best: Option<(u64, u64, u64)> = None;
        for k in 1u64..(1u64 << m) {
            let v = k.trailing_zeros() as usize;
            let bit = 1u64 << v;
            // Neighbors of v currently in S (v never appears in its own mask).
            let cnt = (adj_masks[v] & cur_mask).count_ones() as i64;
            let change = degrees[v] as i64 - 2 * cnt;
            if cur_mask & bit == 0 {
                cur_mask |= bit;
                delta += degrees[v];
                sigma += change;
            } else {
                cur_mask &= !bit;
                delta -= degrees[v];
                sigma -= change;
            }
            debug_assert!(sigma >= 0);
            let min_delta = delta.min(total - delta);
            if min_delta == 0 {
                continue; // h = inf, never optimal unless everything is
            }
            let sig = sigma as u64;
            let better = match best {
                None => true,
                Some((bs, bm, bmask)) => {
                    let lhs = sig as u128 * bm as u128;
                    let rhs = bs as u128 * min_delta as u128;
                    lhs < rhs || (lhs == rhs && cur_mask < bmask)
                }
            };
            if better {
                best = Some((sig, min_delta, cur_mask));
            }
        }
        match best {
            Some((s, md, mask)) => Ok((s as f64 / md as f64, VertexSet::from_mask(n, mask))),
            // Every split has a zero side (e.g. an edgeless graph).
            None => Ok((f64::INFINITY, VertexSet::from_mask(n, 1))),
        }
    }

    /// Edge-list dump: header `n m r`, then `i j` per line (0-based, i < j).
    pub fn to_edge_list(&self) -> String {
        let n = self.vertex_count();
        let mut out = format!("{} {} {}\n", n, self.edge_count, self.r);
        for i in 0..n {
            for &j in self.neighbors(i) {
                if (j as usize) > i {
                    out.push_str(&format!("{i} {j}\n"));
                }
            }
        }
        out
    }

    /// Parse the dump format back; used for regression fixtures.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidDomain("empty edge list".into()))?;
        let mut it = header.split_whitespace();
        let bad = |what: &str| Error::InvalidDomain(format!("edge list header missing {what}"));
        let n: usize = it.next().ok_or_else(|| bad("n"))?.parse().map_err(|_| bad("n"))?;
        let m: u64 = it.next().ok_or_else(|| bad("m"))?.parse().map_err(|_| bad("m"))?;
        let r: f64 = it.next().ok_or_else(|| bad("r"))?.parse().map_err(|_| bad("r"))?;
        let mut edges = Vec::with_capacity(m as usize);
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<u32> {
                tok.ok_or_else(|| Error::InvalidDomain(format!("bad edge line {line:?}")))?
                    .parse()
                    .map_err(|_| Error::InvalidDomain(format!("bad edge line {line:?}")))
            };
            let i = parse(it.next())?;
            let j = parse(it.next())?;
            edges.push((i, j));
        }
        if edges.len() as u64 != m {
            return Err(Error::InvalidDomain(format!(
                "edge list declares {m} edges but contains {}",
                edges.len()
            )));
        }
        Self::from_edges(n, &edges, r)
    }

    /// Connected components as vertex labels.
    pub fn components(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &w in self.neighbors(v) {
                    if label[w as usize] == usize::MAX {
                        label[w as usize] = next;
                        stack.push(w as usize);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

/// Enumeration budget: `2^(n-1)` subsets is affordable up to here.
pub const ENUM_MAX: usize = 24;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use crate::sampling::{derive_seed, sample_uniform};

    fn path4() -> NeighborhoodGraph {
        NeighborhoodGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)], 1.0).unwrap()
    }

    fn k4() -> NeighborhoodGraph {
        NeighborhoodGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], 1.0)
            .unwrap()
    }

    #[test]
    fn collinear_points_adjacency() {
        let m = Domain::rectangle(vec![1.0, 0.5], vec![2.0, 1.0], 0.0, 0.1).unwrap();
        // Points (0,0), (0.6,0), (1.2,0) scaled into the box via direct edges:
        // distances 0.6, 0.6, 1.2 with r = 0.7 connect only neighbors.
        let pts: [[f64; 2]; 3] = [[0.1, 0.5], [0.7, 0.5], [1.3, 0.5]];
        let mut edges = Vec::new();
        for i in 0..3 {
            for j in (i + 1)..3 {
                let d2: f64 = (pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2);
                if d2 <= 0.49 {
                    edges.push((i as u32, j as u32));
                }
            }
        }
        let g = NeighborhoodGraph::from_edges(3, &edges, 0.7).unwrap();
        assert_eq!(g.edge_count, 2);
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        let _ = m;
    }

    #[test]
    fn bucketed_equals_brute_force() {
        let m = Domain::disk([0.5, 0.5], 0.4, 0.1).unwrap();
        for rep in 0..5u64 {
            let s = sample_uniform(&m, 500, derive_seed(31, rep));
            let r = 0.06 + 0.02 * rep as f64;
            let fast = NeighborhoodGraph::build(&s, r).unwrap();
            let slow = NeighborhoodGraph::build_brute_force(&s, r).unwrap();
            assert_eq!(fast.edge_count, slow.edge_count);
            for i in 0..500 {
                assert_eq!(fast.neighbors(i), slow.neighbors(i), "vertex {i} rep {rep}");
            }
        }
    }

    #[test]
    fn tiny_radius_gives_edgeless_graph() {
        let m = Domain::disk([0.5, 0.5], 0.4, 0.1).unwrap();
        let s = sample_uniform(&m, 64, 7);
        let g = NeighborhoodGraph::build(&s, 1e-9).unwrap();
        assert_eq!(g.edge_count, 0);
    }

    #[test]
    fn degree_sum_is_twice_edges() {
        let m = Domain::annulus([0.5, 0.5], 0.15, 0.4, 0.1).unwrap();
        let s = sample_uniform(&m, 300, 11);
        let g = NeighborhoodGraph::build(&s, 0.12).unwrap();
        let total: usize = (0..300).map(|i| g.degree(i)).sum();
        assert_eq!(total as u64, 2 * g.edge_count);
    }

    #[test]
    fn path_cut_evaluation() {
        let g = path4();
        let s = VertexSet::from_indices(4, &[0, 1]);
        let e = g.evaluate_cut(&s);
        assert_eq!((e.delta_s, e.delta_sc, e.sigma_s), (3, 3, 1));
        assert!((e.h - 1.0 / 3.0).abs() < 1e-15);
        assert!(!e.degenerate);
    }

    #[test]
    fn empty_subset_is_degenerate() {
        let g = path4();
        let e = g.evaluate_cut(&VertexSet::empty(4));
        assert_eq!(e.sigma_s, 0);
        assert!(e.degenerate);
        assert!(e.h.is_infinite());
    }

    #[test]
    fn cut_symmetry_under_complement() {
        let m = Domain::disk([0.5, 0.5], 0.4, 0.1).unwrap();
        let s = sample_uniform(&m, 120, 3);
        let g = NeighborhoodGraph::build(&s, 0.15).unwrap();
        let mut rng = crate::sampling::SplitMix64::new(17);
        for _ in 0..50 {
            let sub = VertexSet::from_members(120, |_| rng.next_f64() < 0.4);
            let a = g.evaluate_cut(&sub);
            let b = g.evaluate_cut(&sub.complement());
            assert_eq!(a.sigma_s, b.sigma_s);
            assert_eq!(a.delta_s, b.delta_sc);
            assert_eq!(a.h, b.h);
            assert_eq!(a.delta_s + a.delta_sc, 2 * g.edge_count);
        }
    }

    #[test]
    fn exact_conductance_path_and_clique() {
        let (h, s) = path4().conductance_exact().unwrap();
        assert!((h - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.indices(), vec![0, 1]);

        let (h, s) = k4().conductance_exact().unwrap();
        assert!((h - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.count(), 2);
        assert_eq!(s.indices(), vec![0, 1]); // smallest mask among ties
    }

    #[test]
    fn disconnected_graph_has_zero_conductance() {
        let g = NeighborhoodGraph::from_edges(4, &[(0, 1), (2, 3)], 1.0).unwrap();
        let (h, s) = g.conductance_exact().unwrap();
        assert_eq!(h, 0.0);
        let e = g.evaluate_cut(&s);
        assert_eq!(e.sigma_s, 0);
        assert!(e.delta_s > 0 && e.delta_sc > 0);
    }

    #[test]
    fn exact_conductance_matches_naive_enumeration() {
        let m = Domain::disk([0.5, 0.5], 0.4, 0.1).unwrap();
        for rep in 0..20u64 {
            let s = sample_uniform(&m, 10, derive_seed(5, rep));
            let g = NeighborhoodGraph::build(&s, 0.25).unwrap();
            let (h, _) = g.conductance_exact().unwrap();
            // Naive loop over all nonempty proper subsets.
            let mut naive = f64::INFINITY;
            for mask in 1u64..(1 << 10) - 1 {
                let sub = VertexSet::from_mask(10, mask);
                let e = g.evaluate_cut(&sub);
                if e.h < naive {
                    naive = e.h;
                }
            }
            assert_eq!(h, naive, "rep {rep}");
        }
    }

    #[test]
    fn relabeling_invariance() {
        let m = Domain::disk([0.5, 0.5], 0.4, 0.1).unwrap();
        let s = sample_uniform(&m, 12, 77);
        let g = NeighborhoodGraph::build(&s, 0.2).unwrap();
        let (h, _) = g.conductance_exact().unwrap();
        // Permute vertices with a seeded shuffle and rebuild.
        let mut perm: Vec<u32> = (0..12).collect();
        let mut rng = crate::sampling::SplitMix64::new(1234);
        for i in (1..12usize).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            perm.swap(i, j);
        }
        let mut edges = Vec::new();
        for i in 0..12usize {
            for &j in g.neighbors(i) {
                if (j as usize) > i {
                    edges.push((perm[i], perm[j as usize]));
                }
            }
        }
        let gp = NeighborhoodGraph::from_edges(12, &edges, g.r).unwrap();
        let (hp, _) = gp.conductance_exact().unwrap();
        assert_eq!(h, hp);
    }

    #[test]
    fn budget_error_beyond_enum_max() {
        let g = NeighborhoodGraph::from_edges(25, &[(0, 1)], 1.0).unwrap();
        match g.conductance_exact() {
            Err(Error::EnumerationBudget { n, max }) => {
                assert_eq!((n, max), (25, ENUM_MAX));
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let m = Domain::disk([0.5, 0.5], 0.4, 0.1).unwrap();
        let s = sample_uniform(&m, 80, 9);
        let g = NeighborhoodGraph::build(&s, 0.18).unwrap();
        let dump = g.to_edge_list();
        let back = NeighborhoodGraph::from_edge_list(&dump).unwrap();
        assert_eq!(back.edge_count, g.edge_count);
        for i in 0..80 {
            assert_eq!(back.neighbors(i), g.neighbors(i));
        }
        assert_eq!(back.to_edge_list(), dump);
    }
}
