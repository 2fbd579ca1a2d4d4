//! The forgery game, its model variants, and the strategies that play it.
//!
//! A game hands the adversary nothing but the graph and an oracle. Labels are
//! drawn from a stream the adversary never sees; it receives only the labels
//! it queries (or, in the black-box model, decoder bits on pairs).

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph::Graph;
use crate::rng::Stream;
use crate::scheme::{Label, SchemeError, SchemeRef, SketchScheme};

mod acd;
mod posterior;
mod strategies;

pub use acd::{default_multiset_size, AcdAdversary, AcdConfig, AcdMode, RecordedDistribution};
pub use posterior::{Abstain, Posterior, PosteriorEngine, PosteriorMode, EXACT_ATOM_BUDGET, MIN_CONSISTENT};
pub use strategies::{
    greedy_induced_matching, BlackBoxAdversary, PigeonholeAdversary, PugAdversary, PugStats, RandomPairAdversary,
};

/// Which game is played.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Query up to n-2 vertices, then name two unqueried ones.
    Standard,
    /// Query up to n-1 vertices; one candidate may be a queried vertex.
    SingleVertex,
    /// Only decoder bits on pairs are revealed; candidates are any pair not asked.
    BlackBox,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Standard => "standard",
            Model::SingleVertex => "single_vertex",
            Model::BlackBox => "black_box",
        }
    }

    /// Distinct vertices that may be queried on an `n`-vertex graph.
    pub fn vertex_budget(self, n: usize) -> usize {
        match self {
            Model::Standard => n.saturating_sub(2),
            Model::SingleVertex => n.saturating_sub(1),
            Model::BlackBox => 0,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("adversary cannot play on this instance: {0}")]
    Instance(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// A breach of the game rules. The game is scored as a loss.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("query budget of {0} vertices exhausted")]
    OverBudget(usize),
    #[error("{0}")]
    NotAllowed(String),
    #[error("bad candidates: {0}")]
    BadCandidates(String),
    #[error("labeling failed")]
    Encoding,
}

/// Everything a strategy may touch during a game.
pub trait GameOracle {
    fn graph(&self) -> &Graph;
    fn model(&self) -> Model;
    /// Label of `v`. Repeating a query is free.
    fn query(&mut self, v: usize) -> Result<Label, Violation>;
    /// Decoder output on the labels of `u` and `v` (black-box model only).
    fn query_pair(&mut self, u: usize, v: usize) -> Result<bool, Violation>;
    /// Fresh vertices that may still be queried; `None` when unlimited.
    fn budget_left(&self) -> Option<usize>;
    /// Free-form remark copied into the transcript.
    fn note(&mut self, msg: String);
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Candidates(usize, usize),
    Forfeit(String),
}

/// A strategy bound to one (scheme, graph) instance. Per-game state lives in
/// `play`; anything precomputed offline lives in the player.
pub trait Player: Send + Sync {
    fn play(&self, oracle: &mut dyn GameOracle, rng: &mut Stream) -> Decision;
}

pub trait Adversary: Send + Sync {
    fn name(&self) -> String;
    fn model(&self) -> Model;
    /// Offline preparation: the adversary may simulate the scheme freely but
    /// sees no live labels here.
    fn prepare(&self, scheme: &SchemeRef, g: &Graph) -> Result<Arc<dyn Player>, AdversaryError>;
}

pub type AdversaryRef = Arc<dyn Adversary>;

/// A graph split into labeling units: components for component-local
/// schemes, the whole graph otherwise.
#[derive(Clone, Debug)]
pub struct Instance {
    graph: Graph,
    units: Vec<Vec<usize>>,
    unit_of: Vec<usize>,
    local: Vec<usize>,
    shapes: Vec<Graph>,
    whole: bool,
}

impl Instance {
    pub fn new(scheme: &dyn SketchScheme, g: &Graph) -> Result<Instance, SchemeError> {
        scheme.check_domain(g)?;
        let n = g.vertex_count();
        let whole = !scheme.component_local();
        let units = if whole { vec![(0..n).collect()] } else { g.components() };
        let mut unit_of = vec![0; n];
        let mut local = vec![0; n];
        for (u, vs) in units.iter().enumerate() {
            for (i, &v) in vs.iter().enumerate() {
                unit_of[v] = u;
                local[v] = i;
            }
        }
        let shapes = if whole { vec![g.clone()] } else { units.iter().map(|c| g.induced(c)).collect() };
        Ok(Instance {
            graph: g.clone(),
            units,
            unit_of,
            local,
            shapes,
            whole,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    pub fn unit(&self, u: usize) -> &[usize] {
        &self.units[u]
    }

    pub fn unit_of(&self, v: usize) -> usize {
        self.unit_of[v]
    }

    pub fn local_index(&self, v: usize) -> usize {
        self.local[v]
    }

    pub fn shape(&self, u: usize) -> &Graph {
        &self.shapes[u]
    }

    /// Labels of one unit, identical to what a full encode with `root` gives
    /// those vertices.
    pub fn encode_unit(&self, scheme: &dyn SketchScheme, u: usize, root: &Stream) -> Result<Vec<Label>, SchemeError> {
        if self.whole {
            scheme.encode_component(&self.graph, &mut root.clone())
        } else {
            scheme.encode_component(&self.shapes[u], &mut root.child(self.units[u][0] as u64))
        }
    }
}

fn hex<S: Serializer>(l: &Label, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&l.to_hex())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QueryRecord {
    pub vertex: usize,
    #[serde(serialize_with = "hex")]
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairQuery {
    pub u: usize,
    pub v: usize,
    pub bit: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GameTranscript {
    pub graph: String,
    pub model: Model,
    pub trial: u64,
    pub queries: Vec<QueryRecord>,
    /// Recorded only when transcripts are kept; see `pair_query_count`.
    pub pair_queries: Vec<PairQuery>,
    pub pair_query_count: usize,
    pub candidates: Option<(usize, usize)>,
    pub verdict: Option<bool>,
    pub adjacent: Option<bool>,
    pub win: bool,
    pub forfeit: Option<String>,
    pub violation: Option<String>,
    pub notes: Vec<String>,
}

impl GameTranscript {
    pub fn query_count(&self) -> usize {
        self.queries.len() + self.pair_query_count
    }

    /// Checks the rules of the game against the recorded play.
    pub fn check(&self, g: &Graph) -> Result<(), String> {
        let n = g.vertex_count();
        let queried: HashSet<usize> = self.queries.iter().map(|q| q.vertex).collect();
        if queried.len() > self.model.vertex_budget(n) {
            return Err(format!("{} distinct queries exceed the budget", queried.len()));
        }
        if self.win != (self.adjacent == Some(false) && self.verdict == Some(true)) {
            return Err("win flag disagrees with adjacency and verdict".into());
        }
        if self.win && (self.violation.is_some() || self.forfeit.is_some()) {
            return Err("a forfeited or violating game cannot be won".into());
        }
        if self.violation.is_some() {
            return Ok(());
        }
        if let Some((a, b)) = self.candidates {
            if a == b || a >= n || b >= n {
                return Err("candidates must be two distinct vertices".into());
            }
            let hits = queried.contains(&a) as usize + queried.contains(&b) as usize;
            match self.model {
                Model::Standard if hits > 0 => return Err("a candidate was queried".into()),
                Model::SingleVertex if hits > 1 => return Err("both candidates were queried".into()),
                _ => {}
            }
            let asked = self
                .pair_queries
                .iter()
                .any(|p| (p.u, p.v) == (a.min(b), a.max(b)) || (p.v, p.u) == (a.min(b), a.max(b)));
            if self.model == Model::BlackBox && asked {
                return Err("candidate pair was queried".into());
            }
        }
        Ok(())
    }
}

struct Game<'a> {
    scheme: &'a dyn SketchScheme,
    inst: &'a Instance,
    model: Model,
    root: Stream,
    labels: Vec<Option<Label>>,
    queried: Vec<bool>,
    distinct: usize,
    queries: Vec<QueryRecord>,
    asked: HashSet<(usize, usize)>,
    pair_log: Vec<PairQuery>,
    pair_count: usize,
    keep_pairs: bool,
    violation: Option<Violation>,
    failure: Option<SchemeError>,
    notes: Vec<String>,
}

impl<'a> Game<'a> {
    fn new(scheme: &'a dyn SketchScheme, inst: &'a Instance, model: Model, root: Stream, keep_pairs: bool) -> Self {
        let n = inst.graph.vertex_count();
        Game {
            scheme,
            inst,
            model,
            root,
            labels: vec![None; n],
            queried: vec![false; n],
            distinct: 0,
            queries: Vec::new(),
            asked: HashSet::new(),
            pair_log: Vec::new(),
            pair_count: 0,
            keep_pairs,
            violation: None,
            failure: None,
            notes: Vec::new(),
        }
    }

    fn label(&mut self, v: usize) -> Result<Label, Violation> {
        if let Some(l) = &self.labels[v] {
            return Ok(l.clone());
        }
        let u = self.inst.unit_of[v];
        match self.inst.encode_unit(self.scheme, u, &self.root) {
            Ok(part) => {
                for (i, l) in part.into_iter().enumerate() {
                    self.labels[self.inst.units[u][i]] = Some(l);
                }
                Ok(self.labels[v].clone().expect("unit covers its vertices"))
            }
            Err(e) => {
                self.failure = Some(e);
                Err(self.breach(Violation::Encoding))
            }
        }
    }

    fn breach(&mut self, v: Violation) -> Violation {
        self.violation.get_or_insert(v).clone()
    }

    fn check_vertex(&mut self, v: usize) -> Result<(), Violation> {
        if let Some(x) = &self.violation {
            return Err(x.clone());
        }
        if v >= self.queried.len() {
            return Err(self.breach(Violation::VertexOutOfRange(v)));
        }
        Ok(())
    }

    fn candidates_ok(&self, a: usize, b: usize) -> Result<(), String> {
        let n = self.queried.len();
        if a >= n || b >= n {
            return Err(format!("vertex out of range in ({a}, {b})"));
        }
        if a == b {
            return Err(format!("candidates coincide at {a}"));
        }
        let hits = self.queried[a] as usize + self.queried[b] as usize;
        match self.model {
            Model::Standard if hits > 0 => Err(format!("({a}, {b}) includes a queried vertex")),
            Model::SingleVertex if hits > 1 => Err(format!("({a}, {b}) were both queried")),
            Model::BlackBox if self.asked.contains(&(a.min(b), a.max(b))) => {
                Err(format!("pair ({a}, {b}) was already asked"))
            }
            _ => Ok(()),
        }
    }
}

impl GameOracle for Game<'_> {
    fn graph(&self) -> &Graph {
        &self.inst.graph
    }

    fn model(&self) -> Model {
        self.model
    }

    fn query(&mut self, v: usize) -> Result<Label, Violation> {
        self.check_vertex(v)?;
        if self.model == Model::BlackBox {
            return Err(self.breach(Violation::NotAllowed("vertex queries are unavailable in the black-box model".into())));
        }
        if !self.queried[v] {
            let budget = self.model.vertex_budget(self.queried.len());
            if self.distinct >= budget {
                return Err(self.breach(Violation::OverBudget(budget)));
            }
            self.queried[v] = true;
            self.distinct += 1;
        }
        let label = self.label(v)?;
        self.queries.push(QueryRecord {
            vertex: v,
            label: label.clone(),
        });
        Ok(label)
    }

    fn query_pair(&mut self, u: usize, v: usize) -> Result<bool, Violation> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if self.model != Model::BlackBox {
            return Err(self.breach(Violation::NotAllowed("pair queries exist only in the black-box model".into())));
        }
        if u == v {
            return Err(self.breach(Violation::NotAllowed(format!("pair query on a single vertex {u}"))));
        }
        let (a, b) = (self.label(u)?, self.label(v)?);
        let bit = self.scheme.decode(&a, &b);
        self.asked.insert((u.min(v), u.max(v)));
        self.pair_count += 1;
        if self.keep_pairs {
            self.pair_log.push(PairQuery { u, v, bit });
        }
        Ok(bit)
    }

    fn budget_left(&self) -> Option<usize> {
        match self.model {
            Model::BlackBox => None,
            m => Some(m.vertex_budget(self.queried.len()).saturating_sub(self.distinct)),
        }
    }

    fn note(&mut self, msg: String) {
        self.notes.push(msg);
    }
}

/// Plays one game. `labels` seeds the labeling; `rng` is the adversary's own
/// randomness.
#[allow(clippy::too_many_arguments)]
pub fn play_game(
    scheme: &dyn SketchScheme,
    inst: &Instance,
    player: &dyn Player,
    model: Model,
    labels: Stream,
    rng: &mut Stream,
    graph_id: &str,
    trial: u64,
    keep_pairs: bool,
) -> Result<GameTranscript, AdversaryError> {
    let mut game = Game::new(scheme, inst, model, labels, keep_pairs);
    let decision = player.play(&mut game, rng);
    if let Some(e) = game.failure.take() {
        return Err(e.into());
    }
    let mut forfeit = None;
    let mut candidates = None;
    let (mut verdict, mut adjacent) = (None, None);
    if game.violation.is_none() {
        match decision {
            Decision::Forfeit(why) => forfeit = Some(why),
            Decision::Candidates(a, b) => match game.candidates_ok(a, b) {
                Err(why) => {
                    game.breach(Violation::BadCandidates(why));
                    candidates = Some((a, b));
                }
                Ok(()) => {
                    candidates = Some((a, b));
                    let la = game.label(a);
                    let lb = game.label(b);
                    if let Some(e) = game.failure.take() {
                        return Err(e.into());
                    }
                    let (la, lb) = (la.expect("labeled"), lb.expect("labeled"));
                    verdict = Some(scheme.decode(&la, &lb));
                    adjacent = Some(inst.graph.has_edge(a, b));
                }
            },
        }
    }
    let win = adjacent == Some(false) && verdict == Some(true);
    Ok(GameTranscript {
        graph: graph_id.to_string(),
        model,
        trial,
        queries: game.queries,
        pair_queries: game.pair_log,
        pair_query_count: game.pair_count,
        candidates,
        verdict,
        adjacent,
        win,
        forfeit,
        violation: game.violation.map(|v| v.to_string()),
        notes: game.notes,
    })
}

/// One game on `g` with labels and adversary coins derived from `seed`.
pub fn run_game(scheme: &SchemeRef, g: &Graph, adv: &dyn Adversary, seed: u64) -> Result<GameTranscript, AdversaryError> {
    let inst = Instance::new(&**scheme, g)?;
    let player = adv.prepare(scheme, g)?;
    let root = Stream::new(seed);
    play_game(&**scheme, &inst, &*player, adv.model(), root.child(0), &mut root.child(1), "", 0, true)
}

/// Wilson score interval for `wins` successes in `n` trials.
pub fn wilson(wins: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = wins as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if wins == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if wins == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Aggregate outcome of many games.
#[derive(Clone, Debug, Serialize)]
pub struct ForgeryEstimate {
    pub scheme: String,
    pub graph_family: String,
    pub strategy: String,
    pub mode: Model,
    pub trials: u64,
    pub wins: u64,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub mean_queries: f64,
    pub master_seed: u64,
    #[serde(skip)]
    pub forfeits: u64,
    #[serde(skip)]
    pub violations: u64,
}

impl ForgeryEstimate {
    /// Half-width of the Wilson interval.
    pub fn half_width(&self) -> f64 {
        (self.wilson_hi - self.wilson_lo) / 2.0
    }

    pub fn csv_header() -> &'static str {
        "scheme,graph_family,strategy,mode,trials,wins,rate,wilson_lo,wilson_hi,mean_queries,master_seed"
    }

    fn from_outcomes<'t>(
        scheme: &SchemeRef,
        graph_id: &str,
        adv: &dyn Adversary,
        seed: u64,
        outcomes: impl Iterator<Item = &'t GameSummary>,
    ) -> ForgeryEstimate {
        let (mut trials, mut wins, mut forfeits, mut violations, mut queries) = (0u64, 0u64, 0u64, 0u64, 0u64);
        for o in outcomes {
            trials += 1;
            wins += o.win as u64;
            forfeits += o.forfeit as u64;
            violations += o.violation as u64;
            queries += o.queries as u64;
        }
        let (lo, hi) = wilson(wins, trials, 1.96);
        ForgeryEstimate {
            scheme: scheme.name(),
            graph_family: graph_id.to_string(),
            strategy: adv.name(),
            mode: adv.model(),
            trials,
            wins,
            rate: wins as f64 / trials as f64,
            wilson_lo: lo,
            wilson_hi: hi,
            mean_queries: queries as f64 / trials as f64,
            master_seed: seed,
            forfeits,
            violations,
        }
    }
}

struct GameSummary {
    win: bool,
    forfeit: bool,
    violation: bool,
    queries: usize,
}

impl From<&GameTranscript> for GameSummary {
    fn from(t: &GameTranscript) -> Self {
        GameSummary {
            win: t.win,
            forfeit: t.forfeit.is_some(),
            violation: t.violation.is_some(),
            queries: t.query_count(),
        }
    }
}

fn trial_streams(seed: u64, t: u64) -> (Stream, Stream) {
    let root = Stream::new(seed);
    (root.child(2 * t), root.child(2 * t + 1))
}

fn check_trials(trials: u64) -> Result<(), AdversaryError> {
    if trials == 0 {
        Err(AdversaryError::Parameter("trials must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Plays `trials` independent games in parallel; trial `t` labels with
/// `child(2t)` of the master stream and gives the adversary `child(2t+1)`.
pub fn estimate_forgery(
    scheme: &SchemeRef,
    g: &Graph,
    graph_id: &str,
    adv: &dyn Adversary,
    trials: u64,
    seed: u64,
) -> Result<ForgeryEstimate, AdversaryError> {
    check_trials(trials)?;
    let inst = Instance::new(&**scheme, g)?;
    let player = adv.prepare(scheme, g)?;
    let summaries = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (labels, mut rng) = trial_streams(seed, t);
            let tr = play_game(&**scheme, &inst, &*player, adv.model(), labels, &mut rng, graph_id, t, false)?;
            Ok(GameSummary::from(&tr))
        })
        .collect::<Result<Vec<_>, AdversaryError>>()?;
    Ok(ForgeryEstimate::from_outcomes(scheme, graph_id, adv, seed, summaries.iter()))
}

/// Like [`estimate_forgery`] but keeps every transcript, in trial order.
pub fn run_trials(
    scheme: &SchemeRef,
    g: &Graph,
    graph_id: &str,
    adv: &dyn Adversary,
    trials: u64,
    seed: u64,
) -> Result<(ForgeryEstimate, Vec<GameTranscript>), AdversaryError> {
    check_trials(trials)?;
    let inst = Instance::new(&**scheme, g)?;
    let player = adv.prepare(scheme, g)?;
    let transcripts = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (labels, mut rng) = trial_streams(seed, t);
            play_game(&**scheme, &inst, &*player, adv.model(), labels, &mut rng, graph_id, t, true)
        })
        .collect::<Result<Vec<_>, AdversaryError>>()?;
    let summaries: Vec<GameSummary> = transcripts.iter().map(GameSummary::from).collect();
    let est = ForgeryEstimate::from_outcomes(scheme, graph_id, adv, seed, summaries.iter());
    Ok((est, transcripts))
}
