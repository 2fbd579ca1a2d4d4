//! Text specs for schemes, graphs and adversaries, as used on the command line.
//!
//! A spec is `name` or `name:key=value,key=value`. Numbers may be written as
//! fractions (`eps=1/4`). The combinators take their base after a slash:
//! `and:k=2/pathcolor:k=3`.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::adversary::{
    AcdAdversary, AcdConfig, AcdMode, AdversaryRef, BlackBoxAdversary, Model, PigeonholeAdversary, PugAdversary,
    RandomPairAdversary,
};
use crate::bounded::{CoverScheme, D2RetScheme, PasswordScheme, TreeScheme};
use crate::color::{path_color_scheme, path_scheme, seq_color_scheme, sequential_scheme};
use crate::equality::ForestEqualityScheme;
use crate::graph::{gen_graph, Family, Graph};
use crate::matching::MatchingScheme;
use crate::scheme::{amplify_and, amplify_majority, CoinScheme, ConstantScheme, SchemeError, SchemeRef};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("malformed spec {0:?}")]
    Syntax(String),
    #[error("unknown {kind} {name:?}")]
    Unknown { kind: &'static str, name: String },
    #[error("bad value for {key}: {value:?}")]
    Value { key: String, value: String },
    #[error("missing parameter {0}")]
    Missing(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("{0}")]
    Graph(String),
}

struct Params {
    name: String,
    kv: BTreeMap<String, String>,
}

impl Params {
    fn parse(spec: &str) -> Result<Params, SpecError> {
        let spec = spec.trim();
        let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
        if name.is_empty() {
            return Err(SpecError::Syntax(spec.into()));
        }
        let mut kv = BTreeMap::new();
        for part in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| SpecError::Syntax(spec.into()))?;
            if kv.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(SpecError::Syntax(spec.into()));
            }
        }
        Ok(Params {
            name: name.to_string(),
            kv,
        })
    }

    fn allow(&self, keys: &[&str]) -> Result<(), SpecError> {
        match self.kv.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(SpecError::Unknown {
                kind: "parameter",
                name: k.clone(),
            }),
            None => Ok(()),
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.kv.get(key).map(String::as_str)
    }

    fn bad(&self, key: &str) -> SpecError {
        SpecError::Value {
            key: key.into(),
            value: self.kv.get(key).cloned().unwrap_or_default(),
        }
    }

    fn real_opt(&self, key: &str) -> Result<Option<f64>, SpecError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let x = match v.split_once('/') {
            Some((a, b)) => {
                let (a, b): (f64, f64) = (a.parse().map_err(|_| self.bad(key))?, b.parse().map_err(|_| self.bad(key))?);
                a / b
            }
            None => v.parse().map_err(|_| self.bad(key))?,
        };
        if x.is_finite() {
            Ok(Some(x))
        } else {
            Err(self.bad(key))
        }
    }

    fn real(&self, key: &str) -> Result<f64, SpecError> {
        self.real_opt(key)?.ok_or_else(|| SpecError::Missing(key.into()))
    }

    fn int_opt<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, SpecError> {
        self.raw(key).map(|v| v.parse().map_err(|_| self.bad(key))).transpose()
    }

    fn int<T: std::str::FromStr>(&self, key: &str) -> Result<T, SpecError> {
        self.int_opt(key)?.ok_or_else(|| SpecError::Missing(key.into()))
    }

    fn flag(&self, key: &str) -> Result<bool, SpecError> {
        match self.raw(key) {
            None => Ok(false),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(_) => Err(self.bad(key)),
        }
    }
}

/// Builds a scheme from a spec such as `pp-matching:eps=1/4` or `d2ret:d=3,eps=0.125`.
pub fn parse_scheme(spec: &str) -> Result<SchemeRef, SpecError> {
    let spec = spec.trim();
    for (prefix, and) in [("and:", true), ("maj:", false)] {
        if let Some(rest) = spec.strip_prefix(prefix) {
            let (head, base) = rest.split_once('/').ok_or_else(|| SpecError::Syntax(spec.into()))?;
            let p = Params::parse(&format!("x:{head}"))?;
            p.allow(&["k"])?;
            let k: usize = p.int("k")?;
            let base = parse_scheme(base)?;
            return Ok(if and {
                Arc::new(amplify_and(base, k)?)
            } else {
                Arc::new(amplify_majority(base, k)?)
            });
        }
    }
    let p = Params::parse(spec)?;
    let s: SchemeRef = match p.name.as_str() {
        "pp-matching" => {
            p.allow(&["eps", "p"])?;
            match p.int_opt::<u64>("p")? {
                Some(order) => Arc::new(MatchingScheme::with_order(order)?),
                None => Arc::new(MatchingScheme::new(p.real("eps")?)?),
            }
        }
        "path6" => {
            p.allow(&[])?;
            Arc::new(path_scheme())
        }
        "pathcolor" => {
            p.allow(&["k"])?;
            Arc::new(path_color_scheme(p.int("k")?)?)
        }
        "seq3d" => {
            p.allow(&["d"])?;
            Arc::new(sequential_scheme(p.int("d")?)?)
        }
        "seqcolor" => {
            p.allow(&["q"])?;
            Arc::new(seq_color_scheme(p.int("q")?)?)
        }
        "cover" | "tree" | "d2ret" | "pwd" => {
            p.allow(&["d", "eps"])?;
            let (d, eps) = (p.int("d")?, p.real("eps")?);
            match p.name.as_str() {
                "cover" => Arc::new(CoverScheme::new(d, eps)?),
                "tree" => Arc::new(TreeScheme::new(d, eps)?),
                "d2ret" => Arc::new(D2RetScheme::new(d, eps)?),
                _ => Arc::new(PasswordScheme::new(d, eps)?),
            }
        }
        "smmpc-forest" => {
            p.allow(&["n", "t", "w"])?;
            let (n, t) = (p.int("n")?, p.int("t")?);
            match p.int_opt("w")? {
                Some(w) => Arc::new(ForestEqualityScheme::with_width(n, t, w)?),
                None => Arc::new(ForestEqualityScheme::new(n, t)?),
            }
        }
        "coin2" => {
            p.allow(&[])?;
            Arc::new(CoinScheme)
        }
        "const1" | "one-label" => {
            p.allow(&[])?;
            Arc::new(ConstantScheme)
        }
        other => {
            return Err(SpecError::Unknown {
                kind: "scheme",
                name: other.into(),
            })
        }
    };
    Ok(s)
}

/// Builds a graph from a spec such as `matching:m=2000` or `file:g.txt`.
/// Returns the graph and a canonical family id for reports.
pub fn parse_graph(spec: &str) -> Result<(Graph, String), SpecError> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).map_err(|e| SpecError::Graph(format!("{path}: {e}")))?;
        let g = Graph::from_text(&text).map_err(|e| SpecError::Graph(format!("{path}: {e}")))?;
        return Ok((g, spec.to_string()));
    }
    let p = Params::parse(spec)?;
    let family = match p.name.as_str() {
        "matching" => {
            p.allow(&["m"])?;
            Family::Matching { m: p.int("m")? }
        }
        "path" | "cycle" | "complete" => {
            p.allow(&["n"])?;
            let n = p.int("n")?;
            match p.name.as_str() {
                "path" => Family::Path { n },
                "cycle" => Family::Cycle { n },
                _ => Family::Complete { n },
            }
        }
        "tree" => {
            p.allow(&["d", "depth"])?;
            Family::CompleteDaryTree {
                d: p.int("d")?,
                depth: p.int("depth")?,
            }
        }
        "hypercube" => {
            p.allow(&["d"])?;
            Family::Hypercube { d: p.int("d")? }
        }
        "stars" => {
            p.allow(&["n", "d"])?;
            Family::StarCenters {
                n: p.int("n")?,
                d: p.int("d")?,
            }
        }
        "random" => {
            p.allow(&["n", "d", "seed"])?;
            Family::RandomBounded {
                n: p.int("n")?,
                d: p.int("d")?,
                seed: p.int_opt("seed")?.unwrap_or(0),
            }
        }
        other => {
            return Err(SpecError::Unknown {
                kind: "graph family",
                name: other.into(),
            })
        }
    };
    let g = gen_graph(&family).map_err(|e| SpecError::Graph(e.to_string()))?;
    Ok((g, spec.to_string()))
}

/// Builds an adversary from a spec such as `acd:eps=0.1,mode=multiset`.
pub fn parse_adversary(spec: &str) -> Result<AdversaryRef, SpecError> {
    let p = Params::parse(spec)?;
    let adv: AdversaryRef = match p.name.as_str() {
        "random-pair" => {
            p.allow(&["model"])?;
            let model = match p.raw("model") {
                None | Some("standard") => Model::Standard,
                Some("single_vertex") => Model::SingleVertex,
                Some("black_box") => Model::BlackBox,
                Some(_) => return Err(p.bad("model")),
            };
            Arc::new(RandomPairAdversary { model })
        }
        "pug" => {
            p.allow(&["alpha", "strategy", "samples"])?;
            let d = PugAdversary::default();
            let strategy = p.int_opt::<u8>("strategy")?;
            if strategy.is_some_and(|s| s != 1 && s != 2) {
                return Err(p.bad("strategy"));
            }
            Arc::new(PugAdversary {
                alpha: p.real_opt("alpha")?.unwrap_or(d.alpha),
                strategy,
                samples: p.int_opt("samples")?.unwrap_or(d.samples),
            })
        }
        "pigeonhole" | "pigeonhole-disabled" => {
            p.allow(&[])?;
            Arc::new(PigeonholeAdversary {
                disabled: p.name == "pigeonhole-disabled",
            })
        }
        "blackbox" => {
            p.allow(&["eps"])?;
            Arc::new(BlackBoxAdversary { eps: p.real("eps")? })
        }
        "acd" => {
            p.allow(&["eps", "delta", "mode", "t", "two-sided", "max-centers", "d", "samples"])?;
            let d = AcdConfig::default();
            let mode = match p.raw("mode") {
                None | Some("l1") => AcdMode::L1,
                Some("multiset") => AcdMode::Multiset,
                Some(_) => return Err(p.bad("mode")),
            };
            Arc::new(AcdAdversary::new(AcdConfig {
                eps: p.real_opt("eps")?.unwrap_or(d.eps),
                delta: p.real_opt("delta")?.unwrap_or(d.delta),
                mode,
                t: p.int_opt("t")?,
                two_sided: p.flag("two-sided")?,
                max_centers: p.int_opt("max-centers")?.unwrap_or(d.max_centers),
                degree: p.int_opt("d")?,
                samples: p.int_opt("samples")?.unwrap_or(d.samples),
                exact_budget: d.exact_budget,
            }))
        }
        other => {
            return Err(SpecError::Unknown {
                kind: "adversary",
                name: other.into(),
            })
        }
    };
    Ok(adv)
}
