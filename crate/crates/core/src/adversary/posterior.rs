//! Conditional label distributions computed by re-running the encoder offline.
//!
//! Each labeling unit gets a table of label tuples with their masses: exact
//! masses from enumerating the encoder's coins when that is finite and small
//! enough, otherwise counts from independent simulated runs. Conditioning is
//! filtering the table to tuples that agree with the observations.

use std::collections::HashMap;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;
use thiserror::Error;

use super::{AdversaryError, Instance};
use crate::graph::Graph;
use crate::rng::{derive_seed, Enumerator, Stream};
use crate::scheme::{Label, SchemeRef, SketchScheme};

/// Most encoder runs an exact table may enumerate.
pub const EXACT_ATOM_BUDGET: u128 = 100_000_000;
/// Fewer consistent simulated runs than this and the engine abstains.
pub const MIN_CONSISTENT: u128 = 100;

const SIMULATION_SEED: u64 = 0x51_3a_7e_d0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PosteriorMode {
    Exact,
    MonteCarlo { samples: usize },
    /// Exact where feasible, simulation elsewhere.
    Auto { samples: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Abstain {
    #[error("no encoder run agrees with the observations")]
    Inconsistent,
    #[error("only {consistent} simulated runs agree with the observations")]
    TooFewSamples { consistent: u128 },
}

#[derive(Debug)]
pub(crate) struct Table {
    pub atoms: Vec<Vec<Label>>,
    pub mass: Vec<u128>,
    pub exact: bool,
}

fn add_inverse(acc: (u128, u128), w: u128) -> Option<(u128, u128)> {
    let (n, d) = acc;
    let num = n.checked_mul(w)?.checked_add(d)?;
    let den = d.checked_mul(w)?;
    let g = num.gcd(&den);
    Some((num / g, den / g))
}

fn exact_table(scheme: &dyn SketchScheme, shape: &Graph, budget: u128) -> Option<Table> {
    let mut acc: HashMap<Vec<Label>, (u128, u128)> = HashMap::new();
    let mut e = Enumerator::new();
    let mut runs = 0u128;
    loop {
        e.start();
        let labels = scheme.encode_component(shape, &mut e).ok()?;
        if e.unbounded() {
            return None;
        }
        let w = e.weight()?;
        let slot = acc.entry(labels).or_insert((0, 1));
        *slot = add_inverse(*slot, w)?;
        runs += 1;
        if runs > budget {
            return None;
        }
        if !e.advance() {
            break;
        }
    }
    let mut common = 1u128;
    for &(_, d) in acc.values() {
        common = common.checked_mul(d / common.gcd(&d))?;
    }
    let mut atoms = Vec::with_capacity(acc.len());
    let mut mass = Vec::with_capacity(acc.len());
    let mut entries: Vec<_> = acc.into_iter().collect();
    entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    for (labels, (n, d)) in entries {
        atoms.push(labels);
        mass.push(n.checked_mul(common / d)?);
    }
    Some(Table { atoms, mass, exact: true })
}

fn simulated_table(scheme: &dyn SketchScheme, shape: &Graph, samples: usize, key: u64) -> Table {
    let base = Stream::new(derive_seed(SIMULATION_SEED, key));
    let mut acc: HashMap<Vec<Label>, u128> = HashMap::new();
    for i in 0..samples {
        if let Ok(labels) = scheme.encode_component(shape, &mut base.child(i as u64)) {
            *acc.entry(labels).or_insert(0) += 1;
        }
    }
    let mut entries: Vec<_> = acc.into_iter().collect();
    entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let (atoms, mass) = entries.into_iter().unzip();
    Table { atoms, mass, exact: false }
}

/// A conditional distribution over one vertex's label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Posterior {
    /// Labels with positive mass, sorted by label.
    pub dist: Vec<(Label, u128)>,
    pub total: u128,
    pub exact: bool,
    /// Consistent mass; for simulated tables, the number of agreeing runs.
    pub consistent: u128,
}

impl Posterior {
    fn from_masses(masses: HashMap<Label, u128>, exact: bool) -> Posterior {
        let mut dist: Vec<_> = masses.into_iter().filter(|(_, m)| *m > 0).collect();
        dist.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let total = dist.iter().map(|(_, m)| m).sum();
        Posterior {
            dist,
            total,
            exact,
            consistent: total,
        }
    }

    pub fn prob(&self, l: &Label) -> f64 {
        match self.dist.binary_search_by(|(x, _)| x.cmp(l)) {
            Ok(i) => self.dist[i].1 as f64 / self.total as f64,
            Err(_) => 0.0,
        }
    }

    /// Exact probabilities, when the table was enumerated.
    pub fn exact_probs(&self) -> Option<Vec<(Label, Ratio<u128>)>> {
        self.exact
            .then(|| self.dist.iter().map(|(l, m)| (l.clone(), Ratio::new(*m, self.total))).collect())
    }

    pub fn probs(&self) -> Vec<(Label, f64)> {
        self.dist.iter().map(|(l, m)| (l.clone(), *m as f64 / self.total as f64)).collect()
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy(self.dist.iter().map(|(_, m)| *m), self.total)
    }

    pub fn support(&self) -> impl Iterator<Item = &Label> {
        self.dist.iter().map(|(l, _)| l)
    }
}

pub(crate) fn entropy(masses: impl Iterator<Item = u128>, total: u128) -> f64 {
    let t = total as f64;
    masses
        .filter(|&m| m > 0)
        .map(|m| {
            let p = m as f64 / t;
            -p * p.log2()
        })
        .sum()
}

/// Offline posterior computations for one (scheme, graph) instance.
pub struct PosteriorEngine {
    scheme: SchemeRef,
    inst: Arc<Instance>,
    tables: Vec<Arc<Table>>,
    shape_ids: Vec<usize>,
}

impl PosteriorEngine {
    pub fn new(scheme: SchemeRef, g: &Graph, mode: PosteriorMode) -> Result<PosteriorEngine, AdversaryError> {
        let inst = Arc::new(Instance::new(&*scheme, g)?);
        Self::for_instance(scheme, inst, mode, EXACT_ATOM_BUDGET)
    }

    pub(crate) fn for_instance(
        scheme: SchemeRef,
        inst: Arc<Instance>,
        mode: PosteriorMode,
        budget: u128,
    ) -> Result<PosteriorEngine, AdversaryError> {
        let mut by_shape: HashMap<&Graph, usize> = HashMap::new();
        let mut tables: Vec<Arc<Table>> = Vec::new();
        let mut shape_ids = Vec::with_capacity(inst.unit_count());
        for u in 0..inst.unit_count() {
            let shape = inst.shape(u);
            if let Some(&id) = by_shape.get(shape) {
                shape_ids.push(id);
                continue;
            }
            let id = tables.len();
            let table = match mode {
                PosteriorMode::Exact => exact_table(&*scheme, shape, budget).ok_or_else(|| {
                    AdversaryError::Instance(format!("encoder randomness on a {}-vertex unit is not enumerable", shape.vertex_count()))
                })?,
                PosteriorMode::MonteCarlo { samples } => simulated_table(&*scheme, shape, samples, id as u64),
                PosteriorMode::Auto { samples } => exact_table(&*scheme, shape, budget)
                    .unwrap_or_else(|| simulated_table(&*scheme, shape, samples, id as u64)),
            };
            tables.push(Arc::new(table));
            by_shape.insert(shape, id);
            shape_ids.push(id);
        }
        Ok(PosteriorEngine {
            scheme,
            inst,
            tables,
            shape_ids,
        })
    }

    pub fn scheme(&self) -> &SchemeRef {
        &self.scheme
    }

    pub fn instance(&self) -> &Instance {
        &self.inst
    }

    /// Whether the unit holding `v` has an enumerated table.
    pub fn is_exact(&self, v: usize) -> bool {
        self.table_of(self.inst.unit_of(v)).exact
    }

    pub(crate) fn table_of(&self, unit: usize) -> &Table {
        &self.tables[self.shape_ids[unit]]
    }

    pub(crate) fn shape_id(&self, unit: usize) -> usize {
        self.shape_ids[unit]
    }

    /// Observations inside `unit`, as (local index, label).
    pub(crate) fn local_obs<'a>(&self, unit: usize, obs: &'a [(usize, Label)]) -> Vec<(usize, &'a Label)> {
        obs.iter()
            .filter(|(v, _)| self.inst.unit_of(*v) == unit)
            .map(|(v, l)| (self.inst.local_index(*v), l))
            .collect()
    }

    /// Table rows of `unit` that agree with every observation.
    pub(crate) fn alive(&self, unit: usize, local: &[(usize, &Label)]) -> Vec<u32> {
        let t = self.table_of(unit);
        (0..t.atoms.len() as u32)
            .filter(|&i| local.iter().all(|(j, l)| &t.atoms[i as usize][*j] == *l))
            .collect()
    }

    pub(crate) fn check_support(&self, unit: usize, consistent: u128) -> Result<(), Abstain> {
        let t = self.table_of(unit);
        if consistent == 0 {
            Err(Abstain::Inconsistent)
        } else if !t.exact && consistent < MIN_CONSISTENT {
            Err(Abstain::TooFewSamples { consistent })
        } else {
            Ok(())
        }
    }

    /// Distribution of `target`'s label given the observed labels.
    pub fn posterior(&self, obs: &[(usize, Label)], target: usize) -> Result<Posterior, Abstain> {
        let unit = self.inst.unit_of(target);
        let local = self.local_obs(unit, obs);
        let t = self.table_of(unit);
        let j = self.inst.local_index(target);
        let mut masses: HashMap<Label, u128> = HashMap::new();
        for i in self.alive(unit, &local) {
            *masses.entry(t.atoms[i as usize][j].clone()).or_insert(0) += t.mass[i as usize];
        }
        let post = Posterior::from_masses(masses, t.exact);
        self.check_support(unit, post.total)?;
        Ok(post)
    }

    /// Expected drop in the entropy of `target`'s label from learning the
    /// label of `probe`, given `obs`. This is a mutual information, so never
    /// negative; it is zero when the two sit in different units.
    pub fn information_gain(&self, obs: &[(usize, Label)], target: usize, probe: usize) -> Result<f64, Abstain> {
        let unit = self.inst.unit_of(target);
        let before = self.posterior(obs, target)?;
        if self.inst.unit_of(probe) != unit {
            return Ok(0.0);
        }
        let t = self.table_of(unit);
        let (jt, jp) = (self.inst.local_index(target), self.inst.local_index(probe));
        let mut joint: HashMap<&Label, HashMap<&Label, u128>> = HashMap::new();
        let local = self.local_obs(unit, obs);
        for i in self.alive(unit, &local) {
            let row = &t.atoms[i as usize];
            *joint.entry(&row[jp]).or_default().entry(&row[jt]).or_insert(0) += t.mass[i as usize];
        }
        let total = before.total as f64;
        let after: f64 = joint
            .values()
            .map(|inner| {
                let m: u128 = inner.values().sum();
                m as f64 / total * entropy(inner.values().copied(), m)
            })
            .sum();
        Ok(before.entropy() - after)
    }
}
