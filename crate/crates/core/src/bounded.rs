//! Schemes for graphs of maximum degree `d`: a cover by matchings, its tree
//! variant, distance-2 coloring with retrieval stores, and a password scheme
//! that is only safe against non-adaptive choices.

use crate::graph::{bfs_parents, distance2_coloring, edge_color_cover, orient_halved, Graph, Vertex};
use crate::matching::{choose_order, sample_edge_elements};
use crate::plane::{bits_for, Plane};
use crate::retrieval::{RetrievalError, RetrievalStructure};
use crate::rng::{derive_seed, Coins};
use crate::scheme::{ErrorSide, Label, LabelReader, LabelWriter, SchemeError, SketchScheme};

fn check_d_eps(d: usize, eps: f64) -> Result<(), SchemeError> {
    if d == 0 {
        return Err(SchemeError::Parameter("d must be at least 1".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(SchemeError::Parameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

fn degree_check(g: &Graph, d: usize, name: &str) -> Result<(), SchemeError> {
    if g.max_degree() > d {
        Err(SchemeError::Domain(format!(
            "{name} needs max degree <= {d}, graph has {}",
            g.max_degree()
        )))
    } else {
        Ok(())
    }
}

fn retrieval_err(e: RetrievalError) -> SchemeError {
    SchemeError::Encode(e.to_string())
}

/// Per-class sub-labels: `slots[class][v]`.
fn label_classes(
    plane: &Plane,
    classes: &[Vec<(Vertex, Vertex)>],
    n: usize,
    coins: &mut dyn Coins,
) -> Vec<Vec<Option<u64>>> {
    classes
        .iter()
        .enumerate()
        .map(|(i, edges)| {
            let mut sub = coins.split(i as u64);
            let mut slot = vec![None; n];
            for &(u, v) in edges {
                let (a, b) = sample_edge_elements(plane, &mut *sub);
                slot[u] = Some(a);
                slot[v] = Some(b);
            }
            slot
        })
        .collect()
}

fn put_slot(w: &mut LabelWriter, width: u32, slot: Option<u64>) {
    match slot {
        Some(e) => w.put(1, 1).put(width, e),
        None => w.put(1, 0).put(width, 0),
    };
}

fn read_slots(l: &Label, classes: usize, width: u32) -> (Vec<Option<u64>>, u32) {
    let mut r = LabelReader::new(l);
    let slots = (0..classes)
        .map(|_| {
            let present = r.take(1) == 1;
            let e = r.take(width);
            present.then_some(e)
        })
        .collect();
    (slots, r.position())
}

fn incident_slots(plane: &Plane, a: Option<u64>, b: Option<u64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x < plane.size() && y < plane.size() && plane.incident_idx(x, y),
        _ => false,
    }
}

/// `d + 1` matching classes, each labeled by its own plane instance.
#[derive(Clone, Debug)]
pub struct CoverScheme {
    d: usize,
    eps: f64,
    plane: Plane,
}

impl CoverScheme {
    /// Each class runs at `eps / d`, so a union over the at most `d` classes
    /// two non-adjacent vertices can share stays below `eps`.
    pub fn new(d: usize, eps: f64) -> Result<CoverScheme, SchemeError> {
        check_d_eps(d, eps)?;
        let p = choose_order(eps / d as f64)?;
        Ok(CoverScheme {
            d,
            eps,
            plane: Plane::new(p).expect("prime"),
        })
    }

    pub fn plane(&self) -> Plane {
        self.plane
    }

    pub fn classes(&self) -> usize {
        self.d + 1
    }

    pub fn slots(&self, l: &Label) -> Vec<Option<u64>> {
        read_slots(l, self.classes(), self.plane.index_bits()).0
    }
}

impl SketchScheme for CoverScheme {
    fn name(&self) -> String {
        format!("cover({},{})", self.d, self.eps)
    }
    fn label_bits(&self) -> u32 {
        self.classes() as u32 * (1 + self.plane.index_bits())
    }
    fn error_side(&self) -> ErrorSide {
        ErrorSide::OneSidedNonEdges
    }
    fn check_domain(&self, g: &Graph) -> Result<(), SchemeError> {
        degree_check(g, self.d, "cover")
    }
    fn encode_component(&self, g: &Graph, coins: &mut dyn Coins) -> Result<Vec<Label>, SchemeError> {
        self.check_domain(g)?;
        let cover = edge_color_cover(g);
        if cover.count() > self.classes() {
            return Err(SchemeError::Encode(format!("cover used {} classes", cover.count())));
        }
        let slots = label_classes(&self.plane, &cover.matchings, g.vertex_count(), coins);
        let width = self.plane.index_bits();
        Ok((0..g.vertex_count())
            .map(|v| {
                let mut w = LabelWriter::new(self.label_bits());
                for i in 0..self.classes() {
                    put_slot(&mut w, width, slots.get(i).and_then(|s| s[v]));
                }
                w.finish()
            })
            .collect())
    }
    fn decode(&self, a: &Label, b: &Label) -> bool {
        let (sa, sb) = (self.slots(a), self.slots(b));
        sa.into_iter()
            .zip(sb)
            .any(|(x, y)| incident_slots(&self.plane, x, y))
    }
}

/// `d` classes on forests; each vertex also names the class of its parent
/// edge, and only the two named classes are checked.
#[derive(Clone, Debug)]
pub struct TreeScheme {
    d: usize,
    eps: f64,
    plane: Plane,
}

impl TreeScheme {
    /// Two classes are checked per pair, each at `eps / 2`.
    pub fn new(d: usize, eps: f64) -> Result<TreeScheme, SchemeError> {
        check_d_eps(d, eps)?;
        let p = choose_order(eps / 2.0)?;
        Ok(TreeScheme {
            d,
            eps,
            plane: Plane::new(p).expect("prime"),
        })
    }

    pub fn plane(&self) -> Plane {
        self.plane
    }

    fn id_bits(&self) -> u32 {
        bits_for(self.d as u64 + 1)
    }

    /// Slots and parent class; class `d` means none.
    pub fn parse(&self, l: &Label) -> (Vec<Option<u64>>, usize) {
        let (slots, at) = read_slots(l, self.d, self.plane.index_bits());
        (slots, l.get(at, self.id_bits()) as usize)
    }
}

impl SketchScheme for TreeScheme {
    fn name(&self) -> String {
        format!("tree({},{})", self.d, self.eps)
    }
    fn label_bits(&self) -> u32 {
        self.d as u32 * (1 + self.plane.index_bits()) + self.id_bits()
    }
    fn error_side(&self) -> ErrorSide {
        ErrorSide::OneSidedNonEdges
    }
    fn check_domain(&self, g: &Graph) -> Result<(), SchemeError> {
        degree_check(g, self.d, "tree")?;
        if !g.is_forest() {
            return Err(SchemeError::Domain("tree scheme needs a forest".into()));
        }
        Ok(())
    }
    fn encode_component(&self, g: &Graph, coins: &mut dyn Coins) -> Result<Vec<Label>, SchemeError> {
        self.check_domain(g)?;
        let n = g.vertex_count();
        let cover = edge_color_cover(g);
        if cover.count() > self.d {
            return Err(SchemeError::Encode(format!("forest cover used {} classes", cover.count())));
        }
        let partner = cover.partner_table(n);
        let slots = label_classes(&self.plane, &cover.matchings, n, coins);
        let parents = bfs_parents(g);
        let width = self.plane.index_bits();
        Ok((0..n)
            .map(|v| {
                let class = match parents[v] {
                    Some(p) => (0..cover.count()).find(|&i| partner[i][v] == Some(p)).unwrap(),
                    // a root points at a class it does not take part in
                    None => (0..self.d)
                        .find(|&i| partner.get(i).is_none_or(|t| t[v].is_none()))
                        .unwrap_or(self.d),
                };
                let mut w = LabelWriter::new(self.label_bits());
                for i in 0..self.d {
                    put_slot(&mut w, width, slots.get(i).and_then(|s| s[v]));
                }
                w.put(self.id_bits(), class as u64);
                w.finish()
            })
            .collect())
    }
    fn decode(&self, a: &Label, b: &Label) -> bool {
        let (sa, ia) = self.parse(a);
        let (sb, ib) = self.parse(b);
        [ia, ib]
            .into_iter()
            .filter(|&i| i < self.d)
            .any(|i| incident_slots(&self.plane, sa[i], sb[i]))
    }
}

/// Colors of the distance-2 coloring the schemes below key their stores by.
fn color_count(d: usize) -> u64 {
    (d * d + 1) as u64
}

const STORE_KEY: u64 = 1 << 40;
const COLOR_KEY: u64 = 1 << 41;

/// Distance-2 coloring plus one retrieval store per vertex mapping each
/// neighbor's color to the vertex's sub-label in that color pair's matching.
#[derive(Clone, Debug)]
pub struct D2RetScheme {
    d: usize,
    eps: f64,
    plane: Plane,
}

/// Parsed label of [`D2RetScheme`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D2Label {
    pub color: u64,
    pub store: RetrievalStructure,
}

impl D2RetScheme {
    pub fn new(d: usize, eps: f64) -> Result<D2RetScheme, SchemeError> {
        check_d_eps(d, eps)?;
        let p = choose_order(eps)?;
        Ok(D2RetScheme {
            d,
            eps,
            plane: Plane::new(p).expect("prime"),
        })
    }

    pub fn plane(&self) -> Plane {
        self.plane
    }

    fn color_bits(&self) -> u32 {
        bits_for(color_count(self.d))
    }

    fn count_bits(&self) -> u32 {
        bits_for(self.d as u64 + 1)
    }

    /// Bits beyond the `d` stored sub-labels and the color: the store's seed
    /// and key count.
    pub fn store_overhead_bits(&self) -> u32 {
        64 + self.count_bits()
    }

    pub fn parse(&self, l: &Label) -> Option<D2Label> {
        let r = self.plane.index_bits();
        let mut rd = LabelReader::new(l);
        let color = rd.take(self.color_bits());
        let n = rd.take(self.count_bits()) as usize;
        let seed = rd.take(64);
        if n > self.d || color >= color_count(self.d) {
            return None;
        }
        let cells: Vec<u64> = (0..self.d).map(|_| rd.take(r)).collect();
        let table = cells[..n.max(1)].to_vec();
        let store = RetrievalStructure::from_parts(n, r, color_count(self.d), seed, table).ok()?;
        Some(D2Label { color, store })
    }

    fn write(&self, color: u64, store: &RetrievalStructure) -> Label {
        let r = self.plane.index_bits();
        let mut w = LabelWriter::new(self.label_bits());
        w.put(self.color_bits(), color)
            .put(self.count_bits(), store.len() as u64)
            .put(64, store.seed());
        for i in 0..self.d {
            w.put(r, store.table().get(i).copied().unwrap_or(0));
        }
        w.finish()
    }
}

impl SketchScheme for D2RetScheme {
    fn name(&self) -> String {
        format!("d2ret({},{})", self.d, self.eps)
    }
    fn label_bits(&self) -> u32 {
        self.color_bits() + self.count_bits() + 64 + self.d as u32 * self.plane.index_bits()
    }
    fn error_side(&self) -> ErrorSide {
        ErrorSide::OneSidedNonEdges
    }
    fn check_domain(&self, g: &Graph) -> Result<(), SchemeError> {
        degree_check(g, self.d, "d2ret")
    }
    fn encode_component(&self, g: &Graph, coins: &mut dyn Coins) -> Result<Vec<Label>, SchemeError> {
        self.check_domain(g)?;
        let n = g.vertex_count();
        let palette = color_count(self.d);
        let mut sigma: Vec<u64> = distance2_coloring(g).colors.into_iter().map(|c| c as u64).collect();
        for v in 0..n {
            if g.degree(v) == 0 {
                sigma[v] = coins.split(COLOR_KEY | v as u64).below(palette);
            }
        }
        if sigma.iter().any(|&c| c >= palette) {
            return Err(SchemeError::Encode("distance-2 coloring overflowed d^2 + 1 colors".into()));
        }
        // sub[v] holds (neighbor color, own sub-label) pairs
        let mut sub: Vec<Vec<(u64, u64)>> = vec![Vec::new(); n];
        let mut pairs: std::collections::BTreeMap<(u64, u64), Vec<(Vertex, Vertex)>> = Default::default();
        for (u, v) in g.edges() {
            let (a, b) = if sigma[u] < sigma[v] { (u, v) } else { (v, u) };
            pairs.entry((sigma[a], sigma[b])).or_default().push((a, b));
        }
        for (&(c1, c2), edges) in &pairs {
            let mut touched = std::collections::HashSet::new();
            for &(a, b) in edges {
                if !touched.insert(a) || !touched.insert(b) {
                    return Err(SchemeError::Encode(format!(
                        "colors {c1} and {c2} do not induce a matching"
                    )));
                }
            }
            let mut stream = coins.split(c1 * palette + c2);
            for &(a, b) in edges {
                let (x, y) = sample_edge_elements(&self.plane, &mut *stream);
                sub[a].push((c2, x));
                sub[b].push((c1, y));
            }
        }
        let r = self.plane.index_bits();
        let mut out = Vec::with_capacity(n);
        for v in 0..n {
            let mut s = coins.split(STORE_KEY | v as u64);
            let store = RetrievalStructure::build(&sub[v], palette, r, &mut *s).map_err(retrieval_err)?;
            out.push(self.write(sigma[v], &store));
        }
        Ok(out)
    }
    fn decode(&self, a: &Label, b: &Label) -> bool {
        let (Some(x), Some(y)) = (self.parse(a), self.parse(b)) else {
            return false;
        };
        if x.color == y.color {
            return false;
        }
        let fx = x.store.query_unchecked(y.color);
        let fy = y.store.query_unchecked(x.color);
        fx < self.plane.size() && fy < self.plane.size() && self.plane.incident_idx(fx, fy)
    }
}

/// Random passwords; each vertex stores the passwords of its out-neighbors
/// under an orientation with out-degree at most `ceil(d / 2)`.
///
/// Retrieval seeds and the empty-store value are derived from the stored key
/// set, so the passwords are the only randomness.
#[derive(Clone, Debug)]
pub struct PasswordScheme {
    d: usize,
    eps: f64,
    w: u32,
}

/// Parsed label of [`PasswordScheme`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PasswordLabel {
    pub color: u64,
    pub password: u64,
    pub store: RetrievalStructure,
}

fn public_seed(keys: &[u64], attempt: u64) -> u64 {
    let mut sorted = keys.to_vec();
    sorted.sort_unstable();
    let h = sorted
        .iter()
        .fold(0x7057_6400u64, |acc, &k| derive_seed(acc, k));
    derive_seed(h, attempt)
}

impl PasswordScheme {
    pub fn new(d: usize, eps: f64) -> Result<PasswordScheme, SchemeError> {
        check_d_eps(d, eps)?;
        let w = (1.0 / eps).log2().ceil().max(1.0) as u32;
        if w > 64 {
            return Err(SchemeError::Parameter("password longer than 64 bits".into()));
        }
        Ok(PasswordScheme { d, eps, w })
    }

    pub fn password_bits(&self) -> u32 {
        self.w
    }

    fn slots(&self) -> usize {
        self.d.div_ceil(2)
    }

    fn color_bits(&self) -> u32 {
        bits_for(color_count(self.d))
    }

    fn count_bits(&self) -> u32 {
        bits_for(self.slots() as u64 + 1)
    }

    pub fn parse(&self, l: &Label) -> Option<PasswordLabel> {
        let mut rd = LabelReader::new(l);
        let color = rd.take(self.color_bits());
        let password = rd.take(self.w);
        let n = rd.take(self.count_bits()) as usize;
        let seed = rd.take(64);
        if n > self.slots() || color >= color_count(self.d) {
            return None;
        }
        let cells: Vec<u64> = (0..self.slots().max(1)).map(|_| rd.take(self.w)).collect();
        let store =
            RetrievalStructure::from_parts(n, self.w, color_count(self.d), seed, cells[..n.max(1)].to_vec()).ok()?;
        Some(PasswordLabel { color, password, store })
    }

    fn build_store(&self, pairs: &[(u64, u64)]) -> Result<RetrievalStructure, SchemeError> {
        let keys: Vec<u64> = pairs.iter().map(|p| p.0).collect();
        let universe = color_count(self.d);
        if pairs.is_empty() {
            let s = public_seed(&keys, 0);
            return Ok(RetrievalStructure::empty(universe, self.w, s, derive_seed(s, 1)));
        }
        for attempt in 0..crate::retrieval::MAX_RETRIES as u64 {
            if let Some(s) =
                RetrievalStructure::build_seeded(pairs, universe, self.w, public_seed(&keys, attempt)).map_err(retrieval_err)?
            {
                return Ok(s);
            }
        }
        Err(retrieval_err(RetrievalError::RetriesExhausted(crate::retrieval::MAX_RETRIES)))
    }
}

impl SketchScheme for PasswordScheme {
    fn name(&self) -> String {
        format!("pwd({},{})", self.d, self.eps)
    }
    fn label_bits(&self) -> u32 {
        self.color_bits() + self.w + self.count_bits() + 64 + self.slots().max(1) as u32 * self.w
    }
    fn error_side(&self) -> ErrorSide {
        ErrorSide::OneSidedNonEdges
    }
    fn check_domain(&self, g: &Graph) -> Result<(), SchemeError> {
        degree_check(g, self.d, "pwd")
    }
    fn encode_component(&self, g: &Graph, coins: &mut dyn Coins) -> Result<Vec<Label>, SchemeError> {
        self.check_domain(g)?;
        let n = g.vertex_count();
        let sigma = distance2_coloring(g).colors;
        let orient = orient_halved(g);
        let pw: Vec<u64> = (0..n)
            .map(|_| if self.w == 64 { coins.word() } else { coins.below(1 << self.w) })
            .collect();
        let mut out = Vec::with_capacity(n);
        for v in 0..n {
            let pairs: Vec<(u64, u64)> = orient.out[v].iter().map(|&u| (sigma[u] as u64, pw[u])).collect();
            let store = self.build_store(&pairs)?;
            let mut w = LabelWriter::new(self.label_bits());
            w.put(self.color_bits(), sigma[v] as u64)
                .put(self.w, pw[v])
                .put(self.count_bits(), store.len() as u64)
                .put(64, store.seed());
            for i in 0..self.slots().max(1) {
                w.put(self.w, store.table().get(i).copied().unwrap_or(0));
            }
            out.push(w.finish());
        }
        Ok(out)
    }
    fn decode(&self, a: &Label, b: &Label) -> bool {
        let (Some(x), Some(y)) = (self.parse(a), self.parse(b)) else {
            return false;
        };
        if x.color == y.color {
            return false;
        }
        x.store.query_unchecked(y.color) == y.password || y.store.query_unchecked(x.color) == x.password
    }
    fn label_count(&self) -> Option<u128> {
        None
    }
}
