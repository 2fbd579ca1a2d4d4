//! Color-as-label schemes and an exact oracle for their conditional color
//! distributions.
//!
//! Every scheme here runs the same process: walk the vertices in a fixed
//! order and give each one a color uniform over the palette minus the colors
//! of its already-colored neighbors. Two labels decode as adjacent iff the
//! colors differ.

use std::collections::BTreeMap;
use std::ops::{AddAssign, Div, Mul};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::{bfs_order, Graph, Vertex};
use crate::plane::bits_for;
use crate::rng::Coins;
use crate::scheme::{ColoringProcess, ErrorSide, Label, SchemeError, SketchScheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Walk {
    /// Along each path from its smallest-id endpoint.
    Path,
    /// BFS from the smallest id of each component.
    Bfs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Limit {
    PathForest,
    MaxDegree(usize),
    /// Every vertex has fewer than `palette` earlier neighbors.
    EarlierNeighbors,
}

#[derive(Clone, Debug)]
pub struct ColorScheme {
    name: String,
    palette: usize,
    walk: Walk,
    limit: Limit,
}

/// Six colors along paths.
pub fn path_scheme() -> ColorScheme {
    path_color_scheme(6).expect("6 colors")
}

/// `k` colors along paths; `k = 3` on a matching is the 3-color matching scheme.
pub fn path_color_scheme(k: usize) -> Result<ColorScheme, SchemeError> {
    if k < 2 {
        return Err(SchemeError::Parameter("path coloring needs at least 2 colors".into()));
    }
    Ok(ColorScheme {
        name: if k == 6 { "path6".into() } else { format!("pathcolor({k})") },
        palette: k,
        walk: Walk::Path,
        limit: Limit::PathForest,
    })
}

/// `3d` colors in BFS order for graphs of maximum degree `d`.
pub fn sequential_scheme(d: usize) -> Result<ColorScheme, SchemeError> {
    if d == 0 {
        return Err(SchemeError::Parameter("seq3d needs d >= 1".into()));
    }
    Ok(ColorScheme {
        name: format!("seq3d({d})"),
        palette: 3 * d,
        walk: Walk::Bfs,
        limit: Limit::MaxDegree(d),
    })
}

/// `q` colors in BFS order, for any graph where the process never runs out.
pub fn seq_color_scheme(q: usize) -> Result<ColorScheme, SchemeError> {
    if q < 2 {
        return Err(SchemeError::Parameter("seqcolor needs q >= 2".into()));
    }
    Ok(ColorScheme {
        name: format!("seqcolor({q})"),
        palette: q,
        walk: Walk::Bfs,
        limit: Limit::EarlierNeighbors,
    })
}

impl ColorScheme {
    pub fn palette(&self) -> usize {
        self.palette
    }

    pub fn color_of(&self, l: &Label) -> u64 {
        l.get(0, self.label_bits())
    }

    fn order(&self, g: &Graph) -> Vec<Vertex> {
        match self.walk {
            Walk::Bfs => bfs_order(g, 0).unwrap_or_default(),
            Walk::Path => {
                let mut order = Vec::with_capacity(g.vertex_count());
                for comp in g.components() {
                    let start = *comp.iter().find(|&&v| g.degree(v) <= 1).unwrap_or(&comp[0]);
                    let (mut prev, mut cur) = (usize::MAX, start);
                    loop {
                        order.push(cur);
                        match g.neighbors(cur).iter().find(|&&w| w != prev) {
                            Some(&next) if next != start => {
                                prev = cur;
                                cur = next;
                            }
                            _ => break,
                        }
                    }
                }
                order
            }
        }
    }
}

/// True when every vertex has fewer than `limit` neighbors before it in `order`.
fn earlier_neighbors_below(g: &Graph, order: &[Vertex], limit: usize) -> bool {
    let mut pos = vec![0; g.vertex_count()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    order
        .iter()
        .enumerate()
        .all(|(i, &v)| g.neighbors(v).iter().filter(|&&w| pos[w] < i).count() < limit)
}

impl SketchScheme for ColorScheme {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn label_bits(&self) -> u32 {
        bits_for(self.palette as u64)
    }

    fn error_side(&self) -> ErrorSide {
        ErrorSide::OneSidedNonEdges
    }

    fn check_domain(&self, g: &Graph) -> Result<(), SchemeError> {
        let ok = match self.limit {
            Limit::PathForest => g.is_path_forest(),
            Limit::MaxDegree(d) => g.max_degree() <= d,
            Limit::EarlierNeighbors => {
                earlier_neighbors_below(g, &self.order(g), self.palette)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SchemeError::Domain(format!("{} cannot color this graph", self.name)))
        }
    }

    fn encode_component(&self, g: &Graph, coins: &mut dyn Coins) -> Result<Vec<Label>, SchemeError> {
        self.check_domain(g)?;
        let mut color: Vec<Option<usize>> = vec![None; g.vertex_count()];
        let mut avail = Vec::with_capacity(self.palette);
        for v in self.order(g) {
            avail.clear();
            avail.extend(
                (0..self.palette).filter(|&c| g.neighbors(v).iter().all(|&w| color[w] != Some(c))),
            );
            if avail.is_empty() {
                return Err(SchemeError::Encode("palette exhausted".into()));
            }
            color[v] = Some(avail[coins.below(avail.len() as u64) as usize]);
        }
        let bits = self.label_bits();
        Ok(color
            .into_iter()
            .map(|c| Label::from_uint(c.unwrap() as u64, bits))
            .collect())
    }

    fn decode(&self, a: &Label, b: &Label) -> bool {
        a != b
    }

    fn label_count(&self) -> Option<u128> {
        Some(self.palette as u128)
    }

    fn coloring_process(&self, g: &Graph) -> Option<ColoringProcess> {
        Some(ColoringProcess {
            order: self.order(g),
            palette: self.palette,
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration exceeded {0} nodes")]
    Budget(u64),
    #[error("scheme does not label by a sequential coloring")]
    NotColoring,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(Vertex),
    #[error("vertex {0} is both hidden and conditioned")]
    Overlap(Vertex),
    #[error("color {0} outside the palette")]
    ColorOutOfRange(usize),
}

/// Largest number of search nodes one oracle call may visit.
pub const ORACLE_BUDGET: u64 = 100_000_000;

/// Exact distribution of the hidden vertices' colors given a partial coloring.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalDistribution {
    pub hidden: Vec<Vertex>,
    /// Colors of `hidden`, in that order, to their conditional probability.
    /// Empty when the conditioning is impossible.
    pub probs: BTreeMap<Vec<usize>, BigRational>,
    /// Probability that the process produces the conditioned colors.
    pub evidence: BigRational,
}

impl ConditionalDistribution {
    /// Marginal of the `i`-th hidden vertex.
    pub fn marginal(&self, i: usize) -> BTreeMap<usize, BigRational> {
        let mut m: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (k, p) in &self.probs {
            *m.entry(k[i]).or_insert_with(BigRational::zero) += p;
        }
        m
    }

    /// Probability that the first two hidden vertices share a color.
    pub fn same_color(&self) -> BigRational {
        self.probs
            .iter()
            .filter(|(k, _)| k[0] == k[1])
            .map(|(_, p)| p.clone())
            .fold(BigRational::zero(), |a, b| a + b)
    }
}

trait Weight: Clone + Zero + One + AddAssign + Div<Output = Self> + Mul<Output = Self> + From<u64> {
    fn into_bigint(self) -> BigInt;
}

impl Weight for u128 {
    fn into_bigint(self) -> BigInt {
        BigInt::from(self)
    }
}

impl Weight for BigUint {
    fn into_bigint(self) -> BigInt {
        BigInt::from(self)
    }
}

struct Search<'a, W> {
    g: &'a Graph,
    order: &'a [Vertex],
    pos: Vec<usize>,
    palette: usize,
    fixed: Vec<Option<usize>>,
    hidden: &'a [Vertex],
    color: Vec<usize>,
    acc: BTreeMap<Vec<usize>, W>,
    nodes: u64,
}

impl<W: Weight> Search<'_, W> {
    fn run(&mut self, i: usize, w: W) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > ORACLE_BUDGET {
            return Err(OracleError::Budget(ORACLE_BUDGET));
        }
        if i == self.order.len() {
            let key: Vec<usize> = self.hidden.iter().map(|&h| self.color[h]).collect();
            *self.acc.entry(key).or_insert_with(W::zero) += w;
            return Ok(());
        }
        let v = self.order[i];
        let mut used = 0u64;
        for &u in self.g.neighbors(v) {
            if self.pos[u] < i {
                used |= 1 << self.color[u];
            }
        }
        let size = self.palette as u64 - u64::from(used.count_ones());
        if size == 0 {
            return Ok(());
        }
        let child = w / W::from(size);
        match self.fixed[v] {
            Some(c) => {
                if used >> c & 1 == 0 {
                    self.color[v] = c;
                    self.run(i + 1, child)?;
                }
            }
            None => {
                for c in 0..self.palette {
                    if used >> c & 1 == 0 {
                        self.color[v] = c;
                        self.run(i + 1, child.clone())?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn lcm_upto(n: usize) -> u64 {
    (1..=n as u64).fold(1, |l, k| l / num_integer::gcd(l, k) * k)
}

fn oracle_with<W: Weight>(
    process: &ColoringProcess,
    g: &Graph,
    hidden: &[Vertex],
    fixed: Vec<Option<usize>>,
    total: W,
) -> Result<ConditionalDistribution, OracleError> {
    let n = g.vertex_count();
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in process.order.iter().enumerate() {
        pos[v] = i;
    }
    let mut s = Search {
        g,
        order: &process.order,
        pos,
        palette: process.palette,
        fixed,
        hidden,
        color: vec![0; n],
        acc: BTreeMap::new(),
        nodes: 0,
    };
    s.run(0, total.clone())?;
    let total = total.into_bigint();
    let mass: BigInt = s
        .acc
        .values()
        .cloned()
        .map(W::into_bigint)
        .fold(BigInt::zero(), |a, b| a + b);
    let evidence = BigRational::new(mass.clone(), total);
    let probs = if mass.is_zero() {
        BTreeMap::new()
    } else {
        s.acc
            .into_iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(k, w)| (k, BigRational::new(w.into_bigint(), mass.clone())))
            .collect()
    };
    Ok(ConditionalDistribution {
        hidden: hidden.to_vec(),
        probs,
        evidence,
    })
}

/// Exact conditional distribution of the hidden vertices' colors given the
/// colors in `condition`, by walking every run of the coloring process.
/// Vertices in neither list are summed out.
pub fn coloring_oracle(
    process: &ColoringProcess,
    g: &Graph,
    hidden: &[Vertex],
    condition: &[(Vertex, usize)],
) -> Result<ConditionalDistribution, OracleError> {
    let n = g.vertex_count();
    assert!(process.palette <= 64, "palette too large for the oracle");
    let mut fixed = vec![None; n];
    for &(v, c) in condition {
        if v >= n {
            return Err(OracleError::VertexOutOfRange(v));
        }
        if c >= process.palette {
            return Err(OracleError::ColorOutOfRange(c));
        }
        fixed[v] = Some(c);
    }
    for &h in hidden {
        if h >= n {
            return Err(OracleError::VertexOutOfRange(h));
        }
        if fixed[h].is_some() {
            return Err(OracleError::Overlap(h));
        }
    }
    // Each run has probability 1 / prod(palette sizes); scaling by L^n with
    // L = lcm(1..=palette) keeps every weight an integer.
    let l = lcm_upto(process.palette);
    match (l as u128).checked_pow(n as u32) {
        Some(q) => oracle_with(process, g, hidden, fixed, q),
        None => oracle_with(process, g, hidden, fixed, BigUint::from(l).pow(n as u32)),
    }
}

/// [`coloring_oracle`] for a scheme that labels by a sequential coloring.
pub fn exact_conditional_oracle(
    scheme: &dyn SketchScheme,
    g: &Graph,
    hidden: &[Vertex],
    condition: &[(Vertex, usize)],
) -> Result<ConditionalDistribution, OracleError> {
    let process = scheme.coloring_process(g).ok_or(OracleError::NotColoring)?;
    coloring_oracle(&process, g, hidden, condition)
}

/// Colorings of `vertices` (in that order) that are proper on the edges among
/// them. With `canonical`, only first-occurrence representatives: the first
/// vertex gets color 0 and each later vertex uses at most one color beyond
/// those already used. Since the process treats all colors alike, every
/// coloring is a relabeling of exactly one representative.
pub fn proper_colorings(g: &Graph, vertices: &[Vertex], palette: usize, canonical: bool) -> Vec<Vec<usize>> {
    fn go(
        g: &Graph,
        vs: &[Vertex],
        palette: usize,
        canonical: bool,
        cur: &mut Vec<usize>,
        used: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = cur.len();
        if i == vs.len() {
            out.push(cur.clone());
            return;
        }
        let top = if canonical { (used + 1).min(palette) } else { palette };
        for c in 0..top {
            let clash = (0..i).any(|j| cur[j] == c && g.has_edge(vs[i], vs[j]));
            if !clash {
                cur.push(c);
                go(g, vs, palette, canonical, cur, used.max(c + 1), out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(g, vertices, palette, canonical, &mut Vec::new(), 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_graph, Family};
    use crate::rng::Stream;
    use crate::scheme::encode;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn widths_and_names() {
        assert_eq!(path_scheme().label_bits(), 3);
        assert_eq!(path_scheme().name(), "path6");
        assert_eq!(sequential_scheme(3).unwrap().label_bits(), 4);
        assert_eq!(path_color_scheme(3).unwrap().label_bits(), 2);
        assert!(sequential_scheme(0).is_err());
    }

    #[test]
    fn edges_always_differ() {
        let p = path_scheme();
        let g = gen_graph(&Family::Path { n: 30 }).unwrap();
        let s = sequential_scheme(4).unwrap();
        let h = gen_graph(&Family::RandomBounded { n: 40, d: 4, seed: 3 }).unwrap();
        let c4 = seq_color_scheme(4).unwrap();
        let t = gen_graph(&Family::CompleteDaryTree { d: 3, depth: 3 }).unwrap();
        for seed in 0..50 {
            for (sch, gr) in [(&p, &g), (&s, &h), (&c4, &t)] {
                let m = encode(sch, gr, seed).unwrap();
                for (u, v) in gr.edges() {
                    assert!(sch.decode(&m.labels[u], &m.labels[v]));
                }
            }
        }
    }

    #[test]
    fn domains() {
        let cycle = gen_graph(&Family::Cycle { n: 5 }).unwrap();
        assert!(path_scheme().check_domain(&cycle).is_err());
        let k5 = gen_graph(&Family::Complete { n: 5 }).unwrap();
        assert!(sequential_scheme(3).unwrap().check_domain(&k5).is_err());
        assert!(seq_color_scheme(4).unwrap().check_domain(&k5).is_err());
        assert!(seq_color_scheme(5).unwrap().check_domain(&k5).is_ok());
    }

    #[test]
    fn path_walk_starts_at_smallest_endpoint() {
        let g = Graph::from_edges(5, &[(3, 1), (1, 4), (4, 0)]).unwrap();
        let order = path_scheme().coloring_process(&g).unwrap().order;
        assert_eq!(order, vec![0, 4, 1, 3, 2]);
    }

    #[test]
    fn single_edge_pairs_are_one_in_thirty() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let d = exact_conditional_oracle(&path_scheme(), &g, &[0, 1], &[]).unwrap();
        assert_eq!(d.probs.len(), 30);
        assert!(d.probs.values().all(|p| *p == q(1, 30)));
        assert_eq!(d.evidence, q(1, 1));
    }

    #[test]
    fn empty_hidden_is_a_consistency_indicator() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let s = path_scheme();
        let ok = exact_conditional_oracle(&s, &g, &[], &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(ok.probs.get(&vec![]), Some(&q(1, 1)));
        let bad = exact_conditional_oracle(&s, &g, &[], &[(0, 1), (1, 1)]).unwrap();
        assert!(bad.probs.is_empty());
        assert!(bad.evidence.is_zero());
    }

    #[test]
    fn locality_holds_on_p4() {
        // hidden pair (0, 2): only vertex 1 is a neighbor of 0, vertex 3 is not
        let g = gen_graph(&Family::Path { n: 4 }).unwrap();
        let s = sequential_scheme(2).unwrap();
        for pair in [(0usize, 2usize), (0, 3), (1, 3)] {
            let rest: Vec<Vertex> = (0..4).filter(|&v| v != pair.0 && v != pair.1).collect();
            let mut by_nbrs: BTreeMap<Vec<usize>, BTreeMap<usize, BigRational>> = BTreeMap::new();
            for cond in proper_colorings(&g, &rest, 6, false) {
                let c: Vec<(Vertex, usize)> = rest.iter().copied().zip(cond.iter().copied()).collect();
                let d = exact_conditional_oracle(&s, &g, &[pair.0, pair.1], &c).unwrap();
                if d.probs.is_empty() {
                    continue;
                }
                let key: Vec<usize> = c.iter().filter(|(v, _)| g.has_edge(*v, pair.0)).map(|x| x.1).collect();
                let m = d.marginal(0);
                if let Some(prev) = by_nbrs.get(&key) {
                    assert_eq!(prev, &m);
                } else {
                    by_nbrs.insert(key, m);
                }
            }
        }
    }

    #[test]
    fn neighbor_only_conditioning_is_uniform() {
        // the right-hand side of the locality identity, by full enumeration
        let shapes = [
            gen_graph(&Family::Path { n: 4 }).unwrap(),
            gen_graph(&Family::Cycle { n: 5 }).unwrap(),
            Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)]).unwrap(),
        ];
        for g in &shapes {
            let s = sequential_scheme(g.max_degree()).unwrap();
            for x in 0..g.vertex_count() {
                let nb = g.neighbors(x).to_vec();
                for cond in proper_colorings(g, &nb, s.palette(), false) {
                    let c: Vec<(Vertex, usize)> = nb.iter().copied().zip(cond.iter().copied()).collect();
                    let d = exact_conditional_oracle(&s, g, &[x], &c).unwrap();
                    let m = d.marginal(0);
                    let first = m.values().next().unwrap().clone();
                    assert!(m.values().all(|p| *p == first));
                    assert!(m.keys().all(|k| !cond.contains(k)));
                }
            }
        }
    }

    #[test]
    fn locality_breaks_on_a_cycle_with_a_pendant() {
        // 0-1-2-3-0 plus 0-4; vertex 3 comes after 0 and has two earlier
        // neighbors, so the color of 2 shifts the posterior of 0
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)]).unwrap();
        let s = sequential_scheme(3).unwrap();
        let hidden = [1usize, 4];
        let rest = [0usize, 2, 3];
        let mut seen: BTreeMap<Vec<usize>, BTreeMap<usize, BigRational>> = BTreeMap::new();
        let mut differs = false;
        for cond in proper_colorings(&g, &rest, 9, false) {
            let c: Vec<(Vertex, usize)> = rest.iter().copied().zip(cond.iter().copied()).collect();
            let d = exact_conditional_oracle(&s, &g, &hidden, &c).unwrap();
            if d.probs.is_empty() {
                continue;
            }
            let key = vec![cond[0], cond[1]];
            let m = d.marginal(0);
            match seen.get(&key) {
                Some(prev) => differs |= prev != &m,
                None => {
                    seen.insert(key, m);
                }
            }
        }
        assert!(differs);
    }

    #[test]
    fn ratio_bound_on_p4() {
        let g = gen_graph(&Family::Path { n: 4 }).unwrap();
        let s = sequential_scheme(2).unwrap();
        let sqrt_e = 1f64.exp().sqrt();
        for (x, y) in [(0usize, 2usize), (0, 3), (1, 3)] {
            let rest: Vec<Vertex> = (0..4).filter(|&v| v != x && v != y).collect();
            for cond in proper_colorings(&g, &rest, 6, false) {
                let c: Vec<(Vertex, usize)> = rest.iter().copied().zip(cond).collect();
                let d = exact_conditional_oracle(&s, &g, &[x, y], &c).unwrap();
                for i in 0..2 {
                    let m = d.marginal(i);
                    if m.is_empty() {
                        continue;
                    }
                    let max = m.values().max().unwrap();
                    let min = m.values().min().unwrap();
                    let r = (max / min).to_f64_lossy();
                    assert!(r <= sqrt_e, "ratio {r}");
                }
            }
        }
    }

    trait Lossy {
        fn to_f64_lossy(&self) -> f64;
    }
    impl Lossy for BigRational {
        fn to_f64_lossy(&self) -> f64 {
            use num_traits::ToPrimitive;
            self.numer().to_f64().unwrap() / self.denom().to_f64().unwrap()
        }
    }

    #[test]
    fn five_cycle_same_color_floor() {
        let g = gen_graph(&Family::Cycle { n: 5 }).unwrap();
        let s = sequential_scheme(2).unwrap();
        let floor = 1.0 / (9.0 * 1f64.exp() * 2.0);
        for x in 0..5 {
            for y in x + 1..5 {
                if g.has_edge(x, y) {
                    continue;
                }
                let rest: Vec<Vertex> = (0..5).filter(|&v| v != x && v != y).collect();
                for cond in proper_colorings(&g, &rest, 6, true) {
                    let c: Vec<(Vertex, usize)> = rest.iter().copied().zip(cond).collect();
                    let d = exact_conditional_oracle(&s, &g, &[x, y], &c).unwrap();
                    if d.probs.is_empty() {
                        continue;
                    }
                    assert!(d.same_color().to_f64_lossy() >= floor);
                }
            }
        }
    }

    #[test]
    fn canonical_representatives_cover_all_colorings() {
        // relabeling symmetry: the same-color probability is constant on each
        // class of colorings equal up to a permutation of the palette
        let g = gen_graph(&Family::Path { n: 5 }).unwrap();
        let s = sequential_scheme(2).unwrap();
        let rest = [1usize, 2, 4];
        let canon = proper_colorings(&g, &rest, 6, true);
        let all = proper_colorings(&g, &rest, 6, false);
        let relabel = |c: &[usize]| {
            let mut map = BTreeMap::new();
            c.iter()
                .map(|&x| {
                    let next = map.len();
                    *map.entry(x).or_insert(next)
                })
                .collect::<Vec<_>>()
        };
        let mut reps = BTreeMap::new();
        for c in &canon {
            let cond: Vec<(Vertex, usize)> = rest.iter().copied().zip(c.iter().copied()).collect();
            let d = exact_conditional_oracle(&s, &g, &[0, 3], &cond).unwrap();
            reps.insert(c.clone(), d.same_color());
        }
        for c in &all {
            let cond: Vec<(Vertex, usize)> = rest.iter().copied().zip(c.iter().copied()).collect();
            let d = exact_conditional_oracle(&s, &g, &[0, 3], &cond).unwrap();
            assert_eq!(reps[&relabel(c)], d.same_color());
        }
    }

    #[test]
    fn oracle_agrees_with_sampler() {
        let g = gen_graph(&Family::Cycle { n: 5 }).unwrap();
        let s = sequential_scheme(2).unwrap();
        let d = exact_conditional_oracle(&s, &g, &[2], &[]).unwrap();
        let m = d.marginal(0);
        let n = 100_000;
        let mut counts = [0u32; 6];
        let root = Stream::new(11);
        for t in 0..n {
            let l = s.encode_with(&g, &mut root.child(t)).unwrap();
            counts[s.color_of(&l[2]) as usize] += 1;
        }
        for c in 0..6 {
            let p = m.get(&c).map(|r| r.to_f64_lossy()).unwrap_or(0.0);
            let se = (p * (1.0 - p) / n as f64).sqrt().max(1e-9);
            assert!((counts[c] as f64 / n as f64 - p).abs() <= 4.0 * se, "color {c}");
        }
    }

    #[test]
    fn budget_is_enforced_lazily() {
        let g = gen_graph(&Family::Path { n: 3 }).unwrap();
        let d = exact_conditional_oracle(&path_scheme(), &g, &[0, 1, 2], &[]).unwrap();
        let total: BigRational = d.probs.values().cloned().fold(BigRational::zero(), |a, b| a + b);
        assert_eq!(total, q(1, 1));
        assert_eq!(d.probs.len(), 6 * 5 * 5);
    }
}
