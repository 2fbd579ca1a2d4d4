//! The learning adversary: query around centers until the hidden center label
//! no longer matters for what the next neighbour looks like, then pair a
//! center with another center's next neighbour.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::distributions::{Distribution, WeightedIndex};
use serde::Serialize;

use super::posterior::{entropy, PosteriorEngine, PosteriorMode};
use super::{Abstain, Adversary, AdversaryError, Decision, GameOracle, Instance, Model, Player};
use crate::graph::Graph;
use crate::rng::Stream;
use crate::scheme::{Label, SchemeRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AcdMode {
    /// Pair centers whose recorded distributions are within `eps`.
    L1,
    /// Pair centers whose sampled multisets agree as decoder tests.
    Multiset,
}

#[derive(Clone, Debug)]
pub struct AcdConfig {
    pub eps: f64,
    pub delta: f64,
    pub mode: AcdMode,
    /// Multiset size; defaults to [`default_multiset_size`].
    pub t: Option<usize>,
    /// Skip the one-sided filter that drops pairs which cannot be accepted.
    pub two_sided: bool,
    pub max_centers: usize,
    /// Degree threshold for centers; defaults to the maximum degree.
    pub degree: Option<usize>,
    /// Simulated runs per unit when exact enumeration is out of reach.
    pub samples: usize,
    /// Encoder runs an exact table may take before falling back to simulation.
    pub exact_budget: u128,
}

impl Default for AcdConfig {
    fn default() -> Self {
        AcdConfig {
            eps: 0.1,
            delta: 0.1,
            mode: AcdMode::L1,
            t: None,
            two_sided: false,
            max_centers: 64,
            degree: None,
            samples: 4000,
            exact_budget: 1_000_000,
        }
    }
}

/// `t = 2 * (4 / eps^2) * ln(2^(s+2) / delta)` samples per multiset.
pub fn default_multiset_size(eps: f64, delta: f64, label_bits: u32) -> usize {
    let ln = (label_bits as f64 + 2.0) * std::f64::consts::LN_2 - delta.ln();
    (8.0 / (eps * eps) * ln).ceil() as usize
}

/// Distribution of a stable center's next neighbour label.
#[derive(Clone, Debug, Serialize)]
pub struct RecordedDistribution {
    pub center: usize,
    pub position: usize,
    pub dist: Vec<(String, f64)>,
}

#[derive(Debug)]
struct Stable {
    /// Posterior of the center label, sorted by label.
    center: Vec<(Label, f64)>,
    /// Recorded next-neighbour distribution, sorted by label.
    next: Vec<(Label, f64)>,
}

#[derive(Debug)]
struct Evaluation {
    stable: Option<Stable>,
    entropy: f64,
    exact: bool,
}

type MemoKey = (usize, Vec<(usize, Label)>, usize, usize);

const MEMO_CAP: usize = 200_000;

fn rec(r: &Arc<Result<Evaluation, Abstain>>) -> &Stable {
    r.as_ref().as_ref().ok().and_then(|e| e.stable.as_ref()).expect("stable")
}

/// Statistical distance between two label distributions sorted by label.
fn tv(a: &[(Label, f64)], b: &[(Label, f64)]) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x.0 == y.0 => {
                acc += (x.1 - y.1).abs();
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x.0 < y.0 => {
                acc += x.1;
                i += 1;
            }
            (Some(x), None) => {
                acc += x.1;
                i += 1;
            }
            (_, Some(y)) => {
                acc += y.1;
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    acc / 2.0
}

#[derive(Clone, Debug, Default)]
pub struct AcdAdversary {
    pub config: AcdConfig,
}

struct AcdPlayer {
    cfg: AcdConfig,
    scheme: SchemeRef,
    engine: PosteriorEngine,
    centers: Vec<usize>,
    gammas: Vec<Vec<usize>>,
    t: usize,
    memo: Mutex<HashMap<MemoKey, Arc<Result<Evaluation, Abstain>>>>,
}

impl AcdPlayer {
    /// Stability of center `x` with `next` as its next neighbour.
    fn evaluate(&self, obs: &[(usize, Label)], x: usize, next: usize) -> Arc<Result<Evaluation, Abstain>> {
        let inst = self.engine.instance();
        let unit = inst.unit_of(x);
        let mut local: Vec<(usize, Label)> = self
            .engine
            .local_obs(unit, obs)
            .into_iter()
            .map(|(i, l)| (i, l.clone()))
            .collect();
        local.sort_unstable();
        let key = (self.engine.shape_id(unit), local, inst.local_index(x), inst.local_index(next));
        if let Some(hit) = self.memo.lock().expect("memo").get(&key) {
            return hit.clone();
        }
        let result = Arc::new(self.compute(unit, &key.1, key.2, key.3));
        let mut memo = self.memo.lock().expect("memo");
        if memo.len() >= MEMO_CAP {
            memo.clear();
        }
        memo.insert(key, result.clone());
        result
    }

    fn compute(&self, unit: usize, local: &[(usize, Label)], xl: usize, nl: usize) -> Result<Evaluation, Abstain> {
        let table = self.engine.table_of(unit);
        let refs: Vec<(usize, &Label)> = local.iter().map(|(i, l)| (*i, l)).collect();
        let mut groups: HashMap<&Label, (u128, HashMap<&Label, u128>)> = HashMap::new();
        for i in self.engine.alive(unit, &refs) {
            let row = &table.atoms[i as usize];
            let m = table.mass[i as usize];
            let g = groups.entry(&row[xl]).or_default();
            g.0 += m;
            *g.1.entry(&row[nl]).or_insert(0) += m;
        }
        let total: u128 = groups.values().map(|g| g.0).sum();
        self.engine.check_support(unit, total)?;
        let mut order: Vec<(&Label, u128, Vec<(Label, f64)>)> = groups
            .into_iter()
            .map(|(u, (m, next))| {
                let mut d: Vec<(Label, f64)> = next.into_iter().map(|(l, c)| (l.clone(), c as f64 / m as f64)).collect();
                d.sort_unstable_by(|a, b| a.0.cmp(&b.0));
                (u, m, d)
            })
            .collect();
        order.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let h = entropy(order.iter().map(|o| o.1), total);
        let mut members = 1;
        while members < order.len() && (0..members).all(|k| tv(&order[members].2, &order[k].2) <= self.cfg.eps) {
            members += 1;
        }
        let covered: u128 = order[..members].iter().map(|o| o.1).sum();
        let stable = (covered as f64 >= (1.0 - self.cfg.delta) * total as f64).then(|| {
            let mut center: Vec<(Label, f64)> = order.iter().map(|o| (o.0.clone(), o.1 as f64 / total as f64)).collect();
            center.sort_unstable_by(|a, b| a.0.cmp(&b.0));
            Stable {
                center,
                next: order.swap_remove(0).2,
            }
        });
        Ok(Evaluation {
            stable,
            entropy: h,
            exact: table.exact,
        })
    }

    /// Whether some label pair in the two supports decodes to 1.
    fn can_accept(&self, center: &[(Label, f64)], next: &[(Label, f64)]) -> bool {
        center.iter().any(|(u, _)| next.iter().any(|(w, _)| self.scheme.decode(u, w)))
    }

    fn sample_multiset(&self, dist: &[(Label, f64)], rng: &mut Stream) -> Vec<(Label, f64)> {
        let index = WeightedIndex::new(dist.iter().map(|(_, p)| *p)).expect("positive weights");
        let mut counts = vec![0u64; dist.len()];
        for _ in 0..self.t {
            counts[index.sample(rng.rng())] += 1;
        }
        dist.iter()
            .zip(counts)
            .filter(|(_, c)| *c > 0)
            .map(|((l, _), c)| (l.clone(), c as f64 / self.t as f64))
            .collect()
    }

    /// Mean decoder output of `v` against a multiset given as frequencies.
    fn value(&self, multiset: &[(Label, f64)], v: &Label) -> f64 {
        multiset.iter().filter(|(u, _)| self.scheme.decode(u, v)).map(|(_, f)| f).sum()
    }

    fn decide(&self, stable: &[(usize, Arc<Result<Evaluation, Abstain>>)], pos: &[usize], rng: &mut Stream) -> Decision {
        if stable.len() < 2 {
            return Decision::Forfeit(format!("{} stable centers, need two", stable.len()));
        }
        let multisets: Vec<Vec<(Label, f64)>> = match self.cfg.mode {
            AcdMode::L1 => Vec::new(),
            AcdMode::Multiset => stable.iter().map(|(_, r)| self.sample_multiset(&rec(r).next, rng)).collect(),
        };
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..stable.len() {
            for b in 0..stable.len() {
                if a == b {
                    continue;
                }
                let (sa, sb) = (rec(&stable[a].1), rec(&stable[b].1));
                let gap = match self.cfg.mode {
                    AcdMode::L1 => tv(&sa.next, &sb.next),
                    AcdMode::Multiset => sa
                        .center
                        .iter()
                        .chain(&sb.center)
                        .map(|(v, _)| (self.value(&multisets[a], v) - self.value(&multisets[b], v)).abs())
                        .fold(0.0, f64::max),
                };
                if gap > self.cfg.eps || best.is_some_and(|(g, _, _)| g <= gap) {
                    continue;
                }
                if !self.cfg.two_sided && !self.can_accept(&sa.center, &sb.next) {
                    continue;
                }
                best = Some((gap, a, b));
            }
        }
        match best {
            Some((_, a, b)) => {
                let (ca, cb) = (stable[a].0, stable[b].0);
                Decision::Candidates(self.centers[ca], self.gammas[cb][pos[cb]])
            }
            None => Decision::Forfeit("no pair of stable centers is close enough".into()),
        }
    }
}

impl Player for AcdPlayer {
    fn play(&self, oracle: &mut dyn GameOracle, rng: &mut Stream) -> Decision {
        let inst = self.engine.instance();
        let c = self.centers.len();
        let d = self.gammas[0].len();
        let mut obs: Vec<(usize, Label)> = Vec::new();
        let mut pos = vec![0usize; c];
        let mut retired = vec![false; c];
        let mut state: Vec<Option<Arc<Result<Evaluation, Abstain>>>> = vec![None; c];
        let mut version = vec![0u64; inst.unit_count()];
        let mut seen = vec![u64::MAX; c];
        let mut exhausted = false;
        while !exhausted {
            let mut progressed = false;
            for k in 0..c {
                if retired[k] {
                    continue;
                }
                let x = self.centers[k];
                let unit = inst.unit_of(x);
                if seen[k] != version[unit] {
                    let ev = self.evaluate(&obs, x, self.gammas[k][pos[k]]);
                    match ev.as_ref() {
                        Err(a) => {
                            oracle.note(format!("abstained at center {x}: {a}"));
                            return Decision::Forfeit(format!("posterior abstained: {a}"));
                        }
                        Ok(e) if e.exact => {
                            oracle.note(format!("center {x} after {} queries: entropy {:.4} bits", pos[k], e.entropy))
                        }
                        Ok(_) => {}
                    }
                    seen[k] = version[unit];
                    state[k] = Some(ev);
                }
                let stable = matches!(state[k].as_deref(), Some(Ok(Evaluation { stable: Some(_), .. })));
                if stable {
                    continue;
                }
                if oracle.budget_left() == Some(0) {
                    exhausted = true;
                    break;
                }
                let v = self.gammas[k][pos[k]];
                match oracle.query(v) {
                    Ok(l) => obs.push((v, l)),
                    Err(_) => return Decision::Forfeit("query refused".into()),
                }
                pos[k] += 1;
                version[unit] += 1;
                progressed = true;
                if pos[k] == d {
                    retired[k] = true;
                }
            }
            if !progressed {
                break;
            }
        }
        let stable: Vec<(usize, Arc<Result<Evaluation, Abstain>>)> = (0..c)
            .filter(|&k| !retired[k] && seen[k] == version[inst.unit_of(self.centers[k])])
            .filter_map(|k| match state[k].as_deref() {
                Some(Ok(Evaluation { stable: Some(_), .. })) => state[k].clone().map(|s| (k, s)),
                _ => None,
            })
            .collect();
        for (k, _) in &stable {
            oracle.note(format!("center {} stable at position {}", self.centers[*k], pos[*k]));
        }
        self.decide(&stable, &pos, rng)
    }
}

/// Centers of degree at least `d`, pairwise at distance at least 3, chosen
/// greedily by id.
fn pick_centers(g: &Graph, d: usize, max: usize) -> Vec<usize> {
    let mut blocked = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    for v in 0..g.vertex_count() {
        if out.len() == max {
            break;
        }
        if blocked[v] || g.degree(v) < d {
            continue;
        }
        out.push(v);
        blocked[v] = true;
        for &w in g.neighbors(v) {
            blocked[w] = true;
            for &z in g.neighbors(w) {
                blocked[z] = true;
            }
        }
    }
    out
}

impl AcdAdversary {
    pub fn new(config: AcdConfig) -> Self {
        AcdAdversary { config }
    }

    /// Recorded distribution of `center` after the given observations, if
    /// the center is stable there.
    pub fn record(
        &self,
        scheme: &SchemeRef,
        g: &Graph,
        obs: &[(usize, Label)],
        center: usize,
        next: usize,
    ) -> Result<Option<RecordedDistribution>, AdversaryError> {
        let player = self.build(scheme, g, Some(center))?;
        let ev = player.evaluate(obs, center, next);
        let ev = ev.as_ref().as_ref().map_err(|a| AdversaryError::Instance(a.to_string()))?;
        let position = obs.iter().filter(|(v, _)| g.has_edge(*v, center)).count();
        Ok(ev.stable.as_ref().map(|s| RecordedDistribution {
            center,
            position,
            dist: s.next.iter().map(|(l, p)| (l.to_hex(), *p)).collect(),
        }))
    }

    fn build(&self, scheme: &SchemeRef, g: &Graph, only: Option<usize>) -> Result<AcdPlayer, AdversaryError> {
        let cfg = self.config.clone();
        if !(cfg.eps > 0.0 && cfg.eps < 1.0 && cfg.delta > 0.0 && cfg.delta < 1.0) {
            return Err(AdversaryError::Parameter("eps and delta must lie in (0, 1)".into()));
        }
        let d = cfg.degree.unwrap_or_else(|| g.max_degree());
        if d == 0 {
            return Err(AdversaryError::Instance("the graph has no edges".into()));
        }
        let centers = match only {
            Some(c) => vec![c],
            None => pick_centers(g, d, cfg.max_centers),
        };
        if only.is_none() && centers.len() < 2 {
            return Err(AdversaryError::Instance(format!(
                "needs two centers of degree {d} at distance at least 3, found {}",
                centers.len()
            )));
        }
        let gammas = centers.iter().map(|&x| g.neighbors(x).iter().copied().take(d).collect()).collect();
        let inst = Arc::new(Instance::new(&**scheme, g)?);
        let engine = PosteriorEngine::for_instance(
            scheme.clone(),
            inst,
            PosteriorMode::Auto { samples: cfg.samples },
            cfg.exact_budget,
        )?;
        let t = cfg
            .t
            .unwrap_or_else(|| default_multiset_size(cfg.eps, cfg.delta, scheme.label_bits()));
        Ok(AcdPlayer {
            cfg,
            scheme: scheme.clone(),
            engine,
            centers,
            gammas,
            t,
            memo: Mutex::new(HashMap::new()),
        })
    }
}

impl Adversary for AcdAdversary {
    fn name(&self) -> String {
        let c = &self.config;
        let mode = match c.mode {
            AcdMode::L1 => "l1",
            AcdMode::Multiset => "multiset",
        };
        let sides = if c.two_sided { ",two-sided" } else { "" };
        format!("acd(eps={},delta={},mode={mode}{sides})", c.eps, c.delta)
    }

    fn model(&self) -> Model {
        Model::Standard
    }

    fn prepare(&self, scheme: &SchemeRef, g: &Graph) -> Result<Arc<dyn Player>, AdversaryError> {
        Ok(Arc::new(self.build(scheme, g, None)?))
    }
}
