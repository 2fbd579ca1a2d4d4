//! Labeling matchings with incident element pairs of a projective plane.

use crate::graph::Graph;
use crate::plane::{is_prime, Plane, MAX_ORDER};
use crate::rng::Coins;
use crate::scheme::{ErrorSide, Label, SchemeError, SketchScheme};

fn check_eps(eps: f64) -> Result<(), SchemeError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(SchemeError::Parameter(format!("eps must lie in (0, 1), got {eps}")))
    }
}

/// Smallest prime `p` with `p + 1 >= 2 / eps`.
///
/// A relative slack of 1e-12 absorbs rounding in `2 / eps`, so `eps = 1/4`
/// lands on 7 even when the quotient comes out as 7.999999999999999.
pub fn choose_order(eps: f64) -> Result<u64, SchemeError> {
    check_eps(eps)?;
    let target = 2.0 / eps * (1.0 - 1e-12);
    if target - 1.0 > MAX_ORDER as f64 {
        return Err(SchemeError::Parameter(format!("eps {eps} needs a plane beyond order {MAX_ORDER}")));
    }
    let mut p = ((target - 1.0).ceil() as u64).max(2);
    while !is_prime(p) {
        p += 1;
    }
    if p > MAX_ORDER {
        return Err(SchemeError::Parameter(format!("eps {eps} needs a plane beyond order {MAX_ORDER}")));
    }
    Ok(p)
}

/// Labels for the two endpoints of one matching edge: a uniform incident pair,
/// handed out in random order.
pub fn sample_edge_elements(plane: &Plane, coins: &mut dyn Coins) -> (u64, u64) {
    let (u, v) = plane.sample_incident_pair(coins);
    if coins.bit() {
        (v, u)
    } else {
        (u, v)
    }
}

/// The projective-plane matching scheme.
#[derive(Clone, Debug)]
pub struct MatchingScheme {
    eps: f64,
    plane: Plane,
}

impl MatchingScheme {
    pub fn new(eps: f64) -> Result<MatchingScheme, SchemeError> {
        let p = choose_order(eps)?;
        Ok(MatchingScheme {
            eps,
            plane: Plane::new(p).expect("choose_order yields a prime"),
        })
    }

    /// Scheme over a plane of given prime order.
    pub fn with_order(p: u64) -> Result<MatchingScheme, SchemeError> {
        let plane = Plane::new(p).map_err(|e| SchemeError::Parameter(e.to_string()))?;
        Ok(MatchingScheme {
            eps: 2.0 / (p as f64 + 1.0),
            plane,
        })
    }

    pub fn plane(&self) -> Plane {
        self.plane
    }

    pub fn element_of(&self, l: &Label) -> u64 {
        l.get(0, self.plane.index_bits())
    }
}

impl SketchScheme for MatchingScheme {
    fn name(&self) -> String {
        format!("pp-matching({})", self.eps)
    }

    fn label_bits(&self) -> u32 {
        self.plane.index_bits()
    }

    fn error_side(&self) -> ErrorSide {
        ErrorSide::OneSidedNonEdges
    }

    fn check_domain(&self, g: &Graph) -> Result<(), SchemeError> {
        if g.is_matching() {
            Ok(())
        } else {
            Err(SchemeError::Domain(format!(
                "pp-matching needs max degree 1, graph has {}",
                g.max_degree()
            )))
        }
    }

    fn encode_component(&self, g: &Graph, coins: &mut dyn Coins) -> Result<Vec<Label>, SchemeError> {
        self.check_domain(g)?;
        let bits = self.label_bits();
        let mut out = vec![None; g.vertex_count()];
        for v in 0..g.vertex_count() {
            if out[v].is_some() {
                continue;
            }
            match g.neighbors(v).first() {
                Some(&w) => {
                    let (a, b) = sample_edge_elements(&self.plane, coins);
                    out[v] = Some(Label::from_uint(a, bits));
                    out[w] = Some(Label::from_uint(b, bits));
                }
                None => out[v] = Some(Label::from_uint(coins.below(self.plane.size()), bits)),
            }
        }
        Ok(out.into_iter().map(Option::unwrap).collect())
    }

    fn decode(&self, a: &Label, b: &Label) -> bool {
        let (x, y) = (self.element_of(a), self.element_of(b));
        let size = self.plane.size();
        x < size && y < size && self.plane.incident_idx(x, y)
    }

    fn label_count(&self) -> Option<u128> {
        Some(self.plane.size() as u128)
    }

    fn matching_plane(&self) -> Option<Plane> {
        Some(self.plane)
    }
}
