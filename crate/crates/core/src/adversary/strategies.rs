//! Strategies that need no posterior machinery.

use std::collections::HashMap;
use std::sync::Arc;

use super::{Adversary, AdversaryError, Decision, GameOracle, Model, Player};
use crate::graph::Graph;
use crate::rng::{Coins, Stream};
use crate::scheme::{Label, SchemeRef, SketchScheme};

/// Edges of an induced matching, chosen greedily in edge order.
pub fn greedy_induced_matching(g: &Graph) -> Vec<(usize, usize)> {
    let mut blocked = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    for (u, v) in g.edges() {
        if blocked[u] || blocked[v] {
            continue;
        }
        out.push((u, v));
        for x in [u, v] {
            blocked[x] = true;
            for &w in g.neighbors(x) {
                blocked[w] = true;
            }
        }
    }
    out
}

fn random_nonadjacent(g: &Graph, rng: &mut Stream) -> Option<(usize, usize)> {
    let n = g.vertex_count() as u64;
    if n < 2 {
        return None;
    }
    for _ in 0..1000 {
        let (u, v) = (rng.below(n) as usize, rng.below(n) as usize);
        if u != v && !g.has_edge(u, v) {
            return Some((u, v));
        }
    }
    let non_edges: Vec<(usize, usize)> = (0..g.vertex_count())
        .flat_map(|u| (u + 1..g.vertex_count()).map(move |v| (u, v)))
        .filter(|&(u, v)| !g.has_edge(u, v))
        .collect();
    if non_edges.is_empty() {
        None
    } else {
        Some(non_edges[rng.below(non_edges.len() as u64) as usize])
    }
}

/// Names two uniform non-adjacent vertices without asking anything.
#[derive(Clone, Copy, Debug)]
pub struct RandomPairAdversary {
    pub model: Model,
}

impl Default for RandomPairAdversary {
    fn default() -> Self {
        RandomPairAdversary { model: Model::Standard }
    }
}

struct RandomPair;

impl Player for RandomPair {
    fn play(&self, oracle: &mut dyn GameOracle, rng: &mut Stream) -> Decision {
        match random_nonadjacent(oracle.graph(), rng) {
            Some((u, v)) => Decision::Candidates(u, v),
            None => Decision::Forfeit("the graph has no non-adjacent pair".into()),
        }
    }
}

impl Adversary for RandomPairAdversary {
    fn name(&self) -> String {
        "random-pair".into()
    }
    fn model(&self) -> Model {
        self.model
    }
    fn prepare(&self, _scheme: &SchemeRef, _g: &Graph) -> Result<Arc<dyn Player>, AdversaryError> {
        Ok(Arc::new(RandomPair))
    }
}

/// Offline statistics of the labels one matching edge receives: the label
/// marginal `q`, the decoder graph `U` on labels, and the partner law.
#[derive(Clone, Debug)]
pub struct PugStats {
    labels: Vec<Label>,
    index: HashMap<Label, usize>,
    q: Vec<f64>,
    adj: Vec<Vec<usize>>,
    partner: Vec<Vec<(usize, f64)>>,
}

/// Largest simulated label support for which the decoder graph is built.
const MAX_LABEL_GRAPH: usize = 4096;

impl PugStats {
    fn assemble(scheme: &dyn SketchScheme, labels: Vec<Label>, q: Vec<f64>, partner: Vec<Vec<(usize, f64)>>) -> Self {
        let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        let adj = labels
            .iter()
            .map(|a| (0..labels.len()).filter(|&j| scheme.decode(a, &labels[j])).collect())
            .collect();
        PugStats {
            labels,
            index,
            q,
            adj,
            partner,
        }
    }

    /// Exact statistics for a scheme whose edge labels are a uniform
    /// incident pair of a projective plane.
    pub fn from_plane(scheme: &dyn SketchScheme) -> Option<PugStats> {
        let plane = scheme.matching_plane()?;
        let size = plane.size();
        let bits = scheme.label_bits();
        let labels: Vec<Label> = (0..size).map(|i| Label::from_uint(i, bits)).collect();
        let q = vec![1.0 / size as f64; size as usize];
        let share = 1.0 / (plane.order() + 1) as f64;
        let partner = (0..size)
            .map(|u| {
                let mut inc = plane.incident_elements(u);
                inc.sort_unstable();
                inc.into_iter().map(|v| (v as usize, share)).collect()
            })
            .collect();
        Some(Self::assemble(scheme, labels, q, partner))
    }

    /// Statistics estimated from `samples` simulated encodes of one edge.
    /// Returns `None` when the label support is too large to tabulate.
    pub fn simulated(scheme: &dyn SketchScheme, samples: usize, seed: u64) -> Result<Option<PugStats>, AdversaryError> {
        let edge = Graph::from_edges(2, &[(0, 1)]).expect("one edge");
        let mut rng = Stream::new(seed);
        let mut count: HashMap<Label, u64> = HashMap::new();
        let mut joint: HashMap<(Label, Label), u64> = HashMap::new();
        for _ in 0..samples {
            let l = scheme.encode_component(&edge, &mut rng)?;
            *count.entry(l[0].clone()).or_insert(0) += 1;
            *count.entry(l[1].clone()).or_insert(0) += 1;
            *joint.entry((l[0].clone(), l[1].clone())).or_insert(0) += 1;
            *joint.entry((l[1].clone(), l[0].clone())).or_insert(0) += 1;
            if count.len() > MAX_LABEL_GRAPH {
                return Ok(None);
            }
        }
        let mut labels: Vec<Label> = count.keys().cloned().collect();
        labels.sort_unstable();
        let idx: HashMap<&Label, usize> = labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let total = 2.0 * samples as f64;
        let q = labels.iter().map(|l| count[l] as f64 / total).collect();
        let mut partner = vec![Vec::new(); labels.len()];
        for ((a, b), c) in &joint {
            partner[idx[a]].push((idx[b], *c as f64 / count[a] as f64));
        }
        for p in &mut partner {
            p.sort_unstable_by_key(|&(v, _)| v);
        }
        Ok(Some(Self::assemble(scheme, labels, q, partner)))
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    /// Labels with marginal at least `alpha / m`.
    pub fn heavy(&self, alpha: f64) -> Vec<bool> {
        let floor = alpha / self.labels.len() as f64;
        self.q.iter().map(|&q| q >= floor * (1.0 - 1e-9)).collect()
    }

    pub fn degree_in(&self, u: usize, heavy: &[bool]) -> usize {
        self.adj[u].iter().filter(|&&w| heavy[w]).count()
    }

    /// Average degree in the heavy part, weighted by the marginal.
    pub fn delta(&self, alpha: f64) -> f64 {
        let heavy = self.heavy(alpha);
        (0..self.labels.len()).map(|u| self.q[u] * self.degree_in(u, &heavy) as f64).sum()
    }

    /// Most likely partner of `u` among its heavy decoder neighbours; ties
    /// go to the smallest label.
    fn likeliest_partner(&self, u: usize, heavy: &[bool]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for &w in &self.adj[u] {
            if !heavy[w] {
                continue;
            }
            let p = self.partner[u]
                .binary_search_by_key(&w, |&(v, _)| v)
                .map(|i| self.partner[u][i].1)
                .unwrap_or(0.0);
            if best.is_none_or(|(_, bp)| p > bp) {
                best = Some((w, p));
            }
        }
        best.map(|(w, _)| w)
    }
}

/// Labeling-statistics attack on matchings.
#[derive(Clone, Copy, Debug)]
pub struct PugAdversary {
    pub alpha: f64,
    /// Force strategy 1 or 2 instead of choosing by the degree threshold.
    pub strategy: Option<u8>,
    pub samples: usize,
}

impl Default for PugAdversary {
    fn default() -> Self {
        PugAdversary {
            alpha: 1.0 / 3.0,
            strategy: None,
            samples: 1_000_000,
        }
    }
}

struct PugPlayer {
    stats: Option<PugStats>,
    heavy: Vec<bool>,
    delta: f64,
    strategy: u8,
}

impl PugPlayer {
    fn hunt(&self, stats: &PugStats, oracle: &mut dyn GameOracle, rng: &mut Stream) -> Decision {
        let mut edges = oracle.graph().edges();
        for i in (1..edges.len()).rev() {
            edges.swap(i, rng.below(i as u64 + 1) as usize);
        }
        let mut rest = edges.into_iter();
        let limit = 2.0 * self.delta;
        let (x, u) = loop {
            let Some((a, b)) = rest.next() else {
                return Decision::Forfeit("no edge produced a low-degree label".into());
            };
            if oracle.budget_left() == Some(0) {
                return Decision::Forfeit("query budget exhausted".into());
            }
            let Ok(l) = oracle.query(a) else {
                return Decision::Forfeit("query refused".into());
            };
            if let Some(&u) = stats.index.get(&l) {
                if stats.degree_in(u, &self.heavy) as f64 <= limit {
                    break (b, u);
                }
            }
        };
        let Some(v) = stats.likeliest_partner(u, &self.heavy) else {
            return Decision::Forfeit("label has no heavy decoder neighbour".into());
        };
        let target = &stats.labels[v];
        for (a, b) in rest {
            if oracle.budget_left() == Some(0) {
                break;
            }
            match oracle.query(a) {
                Ok(l) if &l == target => return Decision::Candidates(x, b),
                Ok(_) => {}
                Err(_) => break,
            }
        }
        Decision::Forfeit("no vertex carried the hunted label".into())
    }
}

impl Player for PugPlayer {
    fn play(&self, oracle: &mut dyn GameOracle, rng: &mut Stream) -> Decision {
        match (&self.stats, self.strategy) {
            (Some(stats), 1) => self.hunt(stats, oracle, rng),
            _ => RandomPair.play(oracle, rng),
        }
    }
}

impl Adversary for PugAdversary {
    fn name(&self) -> String {
        match self.strategy {
            Some(s) => format!("pug(alpha={},strategy={s})", self.alpha),
            None => format!("pug(alpha={})", self.alpha),
        }
    }

    fn model(&self) -> Model {
        Model::Standard
    }

    fn prepare(&self, scheme: &SchemeRef, g: &Graph) -> Result<Arc<dyn Player>, AdversaryError> {
        if !g.is_matching() {
            return Err(AdversaryError::Instance("the statistics attack needs a matching".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(AdversaryError::Parameter(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        let stats = match PugStats::from_plane(&**scheme) {
            Some(s) => Some(s),
            None => PugStats::simulated(&**scheme, self.samples, 0x9a9)?,
        };
        let (heavy, delta) = match &stats {
            Some(s) => (s.heavy(self.alpha), s.delta(self.alpha)),
            None => (Vec::new(), f64::INFINITY),
        };
        let m = stats.as_ref().map_or(f64::INFINITY, |s| s.label_count() as f64);
        let strategy = self.strategy.unwrap_or(if delta <= m.sqrt() { 1 } else { 2 });
        if strategy == 1 && stats.is_none() {
            return Err(AdversaryError::Instance("label support too large to tabulate".into()));
        }
        Ok(Arc::new(PugPlayer {
            stats,
            heavy,
            delta,
            strategy,
        }))
    }
}

/// Pigeonhole attack: two equal labels on an induced matching.
#[derive(Clone, Copy, Debug, Default)]
pub struct PigeonholeAdversary {
    /// Play in the standard model, naming the two unqueried partners.
    pub disabled: bool,
}

struct Pigeonhole {
    edges: Vec<(usize, usize)>,
    disabled: bool,
}

impl Player for Pigeonhole {
    fn play(&self, oracle: &mut dyn GameOracle, _rng: &mut Stream) -> Decision {
        let mut seen: HashMap<Label, usize> = HashMap::new();
        for (j, &(x, y)) in self.edges.iter().enumerate() {
            let Ok(l) = oracle.query(x) else {
                return Decision::Forfeit("query refused".into());
            };
            if let Some(&i) = seen.get(&l) {
                let (xi, yi) = self.edges[i];
                return if self.disabled {
                    Decision::Candidates(yi, y)
                } else {
                    Decision::Candidates(xi, y)
                };
            }
            seen.insert(l, j);
        }
        Decision::Forfeit("no two queried vertices share a label".into())
    }
}

impl Adversary for PigeonholeAdversary {
    fn name(&self) -> String {
        if self.disabled { "pigeonhole-disabled" } else { "pigeonhole" }.into()
    }

    fn model(&self) -> Model {
        if self.disabled {
            Model::Standard
        } else {
            Model::SingleVertex
        }
    }

    fn prepare(&self, scheme: &SchemeRef, g: &Graph) -> Result<Arc<dyn Player>, AdversaryError> {
        let count = scheme
            .label_count()
            .ok_or_else(|| AdversaryError::Instance("the scheme does not declare its label count".into()))?;
        let m = count + 1;
        let matching = greedy_induced_matching(g);
        if (matching.len() as u128) < m {
            return Err(AdversaryError::Instance(format!(
                "needs an induced matching of {m} edges, found {}",
                matching.len()
            )));
        }
        Ok(Arc::new(Pigeonhole {
            edges: matching[..m as usize].to_vec(),
            disabled: self.disabled,
        }))
    }
}

/// Equivalence-class attack in the black-box model.
#[derive(Clone, Copy, Debug)]
pub struct BlackBoxAdversary {
    pub eps: f64,
}

struct BlackBox {
    edges: Vec<(usize, usize)>,
}

impl Player for BlackBox {
    fn play(&self, oracle: &mut dyn GameOracle, rng: &mut Stream) -> Decision {
        let k = rng.below(self.edges.len() as u64) as usize;
        let (xk, yk) = self.edges[k];
        let others: Vec<usize> = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .flat_map(|(_, &(x, y))| [x, y])
            .collect();
        let s = others.len();
        let mut bits = vec![false; s * s];
        for i in 0..s {
            for j in i + 1..s {
                let Ok(b) = oracle.query_pair(others[i], others[j]) else {
                    return Decision::Forfeit("pair query refused".into());
                };
                bits[i * s + j] = b;
                bits[j * s + i] = b;
            }
        }
        let mut probe = Vec::with_capacity(s);
        for &z in &others {
            let Ok(b) = oracle.query_pair(xk, z) else {
                return Decision::Forfeit("pair query refused".into());
            };
            probe.push(b);
        }
        let alike: Vec<usize> = (0..s)
            .filter(|&i| (0..s).all(|j| j == i || bits[i * s + j] == probe[j]))
            .collect();
        if alike.is_empty() {
            return Decision::Forfeit("no vertex behaves like the chosen endpoint".into());
        }
        let w = others[alike[rng.below(alike.len() as u64) as usize]];
        Decision::Candidates(yk, w)
    }
}

impl Adversary for BlackBoxAdversary {
    fn name(&self) -> String {
        format!("blackbox(eps={})", self.eps)
    }

    fn model(&self) -> Model {
        Model::BlackBox
    }

    fn prepare(&self, scheme: &SchemeRef, g: &Graph) -> Result<Arc<dyn Player>, AdversaryError> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(AdversaryError::Parameter(format!("eps must lie in (0, 1), got {}", self.eps)));
        }
        let m = scheme
            .label_count()
            .ok_or_else(|| AdversaryError::Instance("the scheme does not declare its label count".into()))?;
        let need = (4.0 * (m as f64) * (m as f64) / self.eps).ceil();
        let edges = (need / 2.0).ceil().max(2.0);
        let matching = greedy_induced_matching(g);
        if (matching.len() as f64) < edges {
            return Err(AdversaryError::Instance(format!(
                "needs an induced matching on {need} vertices, found {}",
                2 * matching.len()
            )));
        }
        Ok(Arc::new(BlackBox {
            edges: matching[..edges as usize].to_vec(),
        }))
    }
}
