//! Undirected simple graphs, the generator families, and the combinatorial
//! subroutines the schemes consume: BFS orders, distance-2 colorings, edge
//! colorings by matchings, and half-degree orientations.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(usize, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Immutable undirected simple graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    edge_count: usize,
    max_degree: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Graph {
        Graph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
            max_degree: 0,
        }
    }

    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Graph, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(GraphError::VertexOutOfRange(u));
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let v = w[0];
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
        }
        let max_degree = adj.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Graph {
            adj,
            edge_count: edges.len(),
            max_degree,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    /// All edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Component index of every vertex, numbered as in [`Graph::components`].
    pub fn component_ids(&self) -> Vec<usize> {
        let mut ids = vec![0; self.vertex_count()];
        for (i, comp) in self.components().iter().enumerate() {
            for &v in comp {
                ids[v] = i;
            }
        }
        ids
    }

    /// Subgraph induced by `vertices`; vertex `vertices[i]` becomes `i`.
    pub fn induced(&self, vertices: &[Vertex]) -> Graph {
        let mut index = std::collections::HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            index.insert(v, i);
        }
        let mut adj = vec![Vec::new(); vertices.len()];
        let mut edge_count = 0;
        for (i, &v) in vertices.iter().enumerate() {
            for w in &self.adj[v] {
                if let Some(&j) = index.get(w) {
                    adj[i].push(j);
                    if i < j {
                        edge_count += 1;
                    }
                }
            }
            adj[i].sort_unstable();
        }
        let max_degree = adj.iter().map(Vec::len).max().unwrap_or(0);
        Graph {
            adj,
            edge_count,
            max_degree,
        }
    }

    pub fn is_forest(&self) -> bool {
        self.edge_count + self.components().len() == self.vertex_count()
    }

    pub fn is_matching(&self) -> bool {
        self.max_degree <= 1
    }

    /// Disjoint union of paths: degree at most 2 and acyclic.
    pub fn is_path_forest(&self) -> bool {
        self.max_degree <= 2 && self.is_forest()
    }

    /// BFS distances from `s`; `None` for unreachable vertices.
    pub fn distances_from(&self, s: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Writes the `p adj` text format.
    pub fn to_text(&self) -> String {
        let mut s = format!("p adj {} {}\n", self.vertex_count(), self.edge_count);
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    /// Parses the `p adj` text format.
    pub fn from_text(text: &str) -> Result<Graph, GraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| GraphError::Parse {
                line: line_no,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match header {
                None => {
                    if fields.len() != 4 || fields[0] != "p" || fields[1] != "adj" {
                        return Err(err("expected header `p adj <n> <m>`"));
                    }
                    let n = fields[2].parse().map_err(|_| err("bad vertex count"))?;
                    let m = fields[3].parse().map_err(|_| err("bad edge count"))?;
                    header = Some((n, m));
                }
                Some((n, _)) => {
                    if fields.len() != 2 {
                        return Err(err("expected `u v`"));
                    }
                    let u: usize = fields[0].parse().map_err(|_| err("bad vertex id"))?;
                    let v: usize = fields[1].parse().map_err(|_| err("bad vertex id"))?;
                    if u >= n || v >= n {
                        return Err(err("vertex id out of range"));
                    }
                    if u == v {
                        return Err(err("self-loop"));
                    }
                    if !seen.insert((u.min(v), u.max(v))) {
                        return Err(err("duplicate edge"));
                    }
                    edges.push((u, v));
                }
            }
        }
        let (n, m) = header.ok_or(GraphError::Parse {
            line: 0,
            msg: "missing header".into(),
        })?;
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: 0,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Graph::from_edges(n, &edges)
    }
}

/// Graph families used throughout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Matching { m: usize },
    Path { n: usize },
    Cycle { n: usize },
    Complete { n: usize },
    /// Root with `d` children, every other internal vertex with `d - 1`
    /// children, so the maximum degree is `d`.
    CompleteDaryTree { d: usize, depth: usize },
    Hypercube { d: usize },
    StarCenters { n: usize, d: usize },
    RandomBounded { n: usize, d: usize, seed: u64 },
}

const MAX_VERTICES: usize = 1 << 26;

fn invalid(msg: impl Into<String>) -> GraphError {
    GraphError::InvalidParameter(msg.into())
}

pub fn gen_graph(family: &Family) -> Result<Graph, GraphError> {
    match *family {
        Family::Matching { m } => {
            if m == 0 || m > MAX_VERTICES / 2 {
                return Err(invalid(format!("matching size {m}")));
            }
            let edges: Vec<_> = (0..m).map(|i| (2 * i, 2 * i + 1)).collect();
            Graph::from_edges(2 * m, &edges)
        }
        Family::Path { n } => {
            if n == 0 || n > MAX_VERTICES {
                return Err(invalid(format!("path length {n}")));
            }
            let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            Graph::from_edges(n, &edges)
        }
        Family::Cycle { n } => {
            if !(3..=MAX_VERTICES).contains(&n) {
                return Err(invalid(format!("cycle length {n}")));
            }
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            Graph::from_edges(n, &edges)
        }
        Family::Complete { n } => {
            if n == 0 || n > 4096 {
                return Err(invalid(format!("clique size {n}")));
            }
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    edges.push((u, v));
                }
            }
            Graph::from_edges(n, &edges)
        }
        Family::CompleteDaryTree { d, depth } => {
            if d == 0 {
                return Err(invalid("tree arity must be positive"));
            }
            let mut edges = Vec::new();
            let mut level = vec![0usize];
            let mut next_id = 1usize;
            for lvl in 0..depth {
                let children = if lvl == 0 { d } else { d - 1 };
                let mut next = Vec::with_capacity(level.len() * children);
                for &v in &level {
                    for _ in 0..children {
                        if next_id >= MAX_VERTICES {
                            return Err(invalid("tree too large"));
                        }
                        edges.push((v, next_id));
                        next.push(next_id);
                        next_id += 1;
                    }
                }
                if next.is_empty() {
                    break;
                }
                level = next;
            }
            Graph::from_edges(next_id, &edges)
        }
        Family::Hypercube { d } => {
            if d == 0 || d > 30 {
                return Err(invalid(format!("hypercube dimension {d}")));
            }
            let n = 1usize << d;
            let mut edges = Vec::with_capacity(d * n / 2);
            for u in 0..n {
                for b in 0..d {
                    let v = u ^ (1 << b);
                    if u < v {
                        edges.push((u, v));
                    }
                }
            }
            Graph::from_edges(n, &edges)
        }
        Family::StarCenters { n, d } => {
            if n == 0 || d == 0 || n.saturating_mul(d + 1) > MAX_VERTICES {
                return Err(invalid(format!("star_centers({n}, {d})")));
            }
            let mut edges = Vec::with_capacity(n * d);
            for s in 0..n {
                let c = s * (d + 1);
                for j in 1..=d {
                    edges.push((c, c + j));
                }
            }
            Graph::from_edges(n * (d + 1), &edges)
        }
        Family::RandomBounded { n, d, seed } => {
            if n == 0 || d == 0 || n > MAX_VERTICES {
                return Err(invalid(format!("random_bounded({n}, {d})")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); n];
            let mut edges = Vec::new();
            if n >= 2 {
                for _ in 0..n * d {
                    let u = rng.gen_range(0..n);
                    let v = rng.gen_range(0..n);
                    if u == v || adj[u].len() >= d || adj[v].len() >= d || adj[u].contains(&v) {
                        continue;
                    }
                    adj[u].push(v);
                    adj[v].push(u);
                    edges.push((u, v));
                }
            }
            Graph::from_edges(n, &edges)
        }
    }
}

/// Centers of `star_centers(n, d)` as laid out by [`gen_graph`].
pub fn star_center_ids(n: usize, d: usize) -> Vec<Vertex> {
    (0..n).map(|s| s * (d + 1)).collect()
}

/// BFS order starting at `root`, continuing from the smallest unvisited vertex
/// whenever a component is exhausted. Neighbors are visited in id order.
pub fn bfs_order(g: &Graph, root: Vertex) -> Result<Vec<Vertex>, GraphError> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    if root >= n {
        return Err(GraphError::VertexOutOfRange(root));
    }
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut next_start = 0;
    let mut start = Some(root);
    while let Some(s) = start {
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        while next_start < n && seen[next_start] {
            next_start += 1;
        }
        start = (next_start < n).then_some(next_start);
    }
    Ok(order)
}

/// BFS parent of every vertex, with each component rooted at its smallest id.
pub fn bfs_parents(g: &Graph) -> Vec<Option<Vertex>> {
    let n = g.vertex_count();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
    }
    parent
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexColoring {
    pub colors: Vec<usize>,
    pub palette_size: usize,
}

/// Greedy proper coloring of the square graph in vertex-id order.
pub fn distance2_coloring(g: &Graph) -> VertexColoring {
    let n = g.vertex_count();
    let mut colors: Vec<Option<usize>> = vec![None; n];
    let mut used = Vec::new();
    let mut palette_size = 0;
    for v in 0..n {
        used.clear();
        for &w in g.neighbors(v) {
            if let Some(c) = colors[w] {
                used.push(c);
            }
            for &z in g.neighbors(w) {
                if z != v {
                    if let Some(c) = colors[z] {
                        used.push(c);
                    }
                }
            }
        }
        used.sort_unstable();
        used.dedup();
        let mut c = 0;
        for &u in &used {
            if u == c {
                c += 1;
            } else if u > c {
                break;
            }
        }
        colors[v] = Some(c);
        palette_size = palette_size.max(c + 1);
    }
    VertexColoring {
        colors: colors.into_iter().map(Option::unwrap).collect(),
        palette_size,
    }
}

/// Edge partition into matchings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColorCover {
    pub matchings: Vec<Vec<(Vertex, Vertex)>>,
}

impl EdgeColorCover {
    pub fn count(&self) -> usize {
        self.matchings.len()
    }

    /// Per class, the partner of every vertex in that class.
    pub fn partner_table(&self, n: usize) -> Vec<Vec<Option<Vertex>>> {
        self.matchings
            .iter()
            .map(|m| {
                let mut t = vec![None; n];
                for &(u, v) in m {
                    t[u] = Some(v);
                    t[v] = Some(u);
                }
                t
            })
            .collect()
    }
}

/// Covers the edges by matchings: root-down greedy on tree components,
/// Misra–Gries on the rest. At most `d + 1` classes, and at most `d` when the
/// whole graph is a forest.
pub fn edge_color_cover(g: &Graph) -> EdgeColorCover {
    let mut color_of: std::collections::BTreeMap<(Vertex, Vertex), usize> = Default::default();
    let mut st: Option<MgState> = None;
    for comp in g.components() {
        let edges_in: usize = comp.iter().map(|&v| g.degree(v)).sum::<usize>() / 2;
        if edges_in + 1 == comp.len() {
            tree_greedy(g, comp[0], &mut color_of);
        } else {
            let st = st.get_or_insert_with(|| MgState {
                at: vec![vec![None; g.max_degree() + 1]; g.vertex_count()],
            });
            misra_gries(g, &comp, st, &mut color_of);
        }
    }
    let classes = color_of.values().copied().max().map_or(0, |c| c + 1);
    let mut matchings = vec![Vec::new(); classes];
    for (&(u, v), &c) in &color_of {
        matchings[c].push((u, v));
    }
    matchings.retain(|m| !m.is_empty());
    EdgeColorCover { matchings }
}

fn tree_greedy(
    g: &Graph,
    root: Vertex,
    color_of: &mut std::collections::BTreeMap<(Vertex, Vertex), usize>,
) {
    let mut queue = VecDeque::from([(root, None::<Vertex>, None::<usize>)]);
    while let Some((v, parent, parent_color)) = queue.pop_front() {
        let mut c = 0;
        for &w in g.neighbors(v) {
            if Some(w) == parent {
                continue;
            }
            if Some(c) == parent_color {
                c += 1;
            }
            color_of.insert((v.min(w), v.max(w)), c);
            queue.push_back((w, Some(v), Some(c)));
            c += 1;
        }
    }
}

struct MgState {
    // at[v][c] = neighbor joined to v by an edge of color c
    at: Vec<Vec<Option<Vertex>>>,
}

impl MgState {
    fn color(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.at[u].iter().position(|&x| x == Some(v))
    }
    fn is_free(&self, v: Vertex, c: usize) -> bool {
        self.at[v][c].is_none()
    }
    fn free_color(&self, v: Vertex) -> usize {
        self.at[v].iter().position(Option::is_none).expect("d+1 colors leave one free")
    }
    fn set(&mut self, u: Vertex, v: Vertex, c: usize) {
        self.at[u][c] = Some(v);
        self.at[v][c] = Some(u);
    }
    fn unset(&mut self, u: Vertex, v: Vertex) {
        if let Some(c) = self.color(u, v) {
            self.at[u][c] = None;
            self.at[v][c] = None;
        }
    }
}

fn misra_gries(
    g: &Graph,
    comp: &[Vertex],
    st: &mut MgState,
    color_of: &mut std::collections::BTreeMap<(Vertex, Vertex), usize>,
) {
    for &u in comp {
        for &v in g.neighbors(u) {
            if u > v {
                continue;
            }
            // maximal fan of u starting at v
            let mut fan = vec![v];
            loop {
                let last = *fan.last().unwrap();
                let next = g.neighbors(u).iter().copied().find(|&w| {
                    !fan.contains(&w)
                        && st.color(u, w).is_some_and(|c| st.is_free(last, c))
                });
                match next {
                    Some(w) => fan.push(w),
                    None => break,
                }
            }
            let c = st.free_color(u);
            let d = st.free_color(*fan.last().unwrap());
            // invert the cd-path starting at u
            if c != d {
                let mut path = Vec::new();
                let mut cur = u;
                let mut want = d;
                while let Some(next) = st.at[cur][want] {
                    path.push((cur, next, want));
                    cur = next;
                    want = if want == d { c } else { d };
                }
                for &(a, b, _) in &path {
                    st.unset(a, b);
                }
                for &(a, b, col) in &path {
                    st.set(a, b, if col == d { c } else { d });
                }
            }
            // first w in the fan with d free whose prefix is still a fan
            let mut end = None;
            for i in 0..fan.len() {
                if i > 0 {
                    let ok = st
                        .color(u, fan[i])
                        .is_some_and(|col| st.is_free(fan[i - 1], col));
                    if !ok {
                        break;
                    }
                }
                if st.is_free(fan[i], d) {
                    end = Some(i);
                    break;
                }
            }
            let end = end.expect("Misra-Gries invariant: a fan prefix accepts d");
            // rotate the prefix
            for i in 0..end {
                let col = st.color(u, fan[i + 1]).unwrap();
                st.unset(u, fan[i + 1]);
                st.set(u, fan[i], col);
            }
            st.set(u, fan[end], d);
        }
    }
    for &u in comp {
        for &v in g.neighbors(u) {
            if u < v {
                color_of.insert((u, v), st.color(u, v).expect("every edge colored"));
            }
        }
    }
}

/// Orientation with out-neighbor lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    pub out: Vec<Vec<Vertex>>,
}

impl Orientation {
    pub fn is_out(&self, u: Vertex, v: Vertex) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    pub fn max_out_degree(&self) -> usize {
        self.out.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Orients every edge so each out-degree is at most `ceil(deg / 2)`.
///
/// Per component, odd-degree vertices are joined to one virtual vertex, an
/// Euler circuit orients each edge along its traversal, and the virtual edges
/// are dropped.
pub fn orient_halved(g: &Graph) -> Orientation {
    let n = g.vertex_count();
    let mut out = vec![Vec::new(); n];
    for comp in g.components() {
        if comp.len() < 2 {
            continue;
        }
        let k = comp.len();
        let local: std::collections::HashMap<Vertex, usize> =
            comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        // local ids 0..k, virtual vertex k
        let mut ends: Vec<(usize, usize)> = Vec::new();
        let mut inc: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
        for (i, &v) in comp.iter().enumerate() {
            for &w in g.neighbors(v) {
                let j = local[&w];
                if i < j {
                    inc[i].push(ends.len());
                    inc[j].push(ends.len());
                    ends.push((i, j));
                }
            }
            if g.degree(v) % 2 == 1 {
                inc[i].push(ends.len());
                inc[k].push(ends.len());
                ends.push((i, k));
            }
        }
        let mut used = vec![false; ends.len()];
        let mut ptr = vec![0usize; k + 1];
        for s in 0..=k {
            let mut stack = vec![s];
            while let Some(&v) = stack.last() {
                let mut advanced = false;
                while ptr[v] < inc[v].len() {
                    let e = inc[v][ptr[v]];
                    ptr[v] += 1;
                    if used[e] {
                        continue;
                    }
                    used[e] = true;
                    let (a, b) = ends[e];
                    let w = if a == v { b } else { a };
                    if v < k && w < k {
                        out[comp[v]].push(comp[w]);
                    }
                    stack.push(w);
                    advanced = true;
                    break;
                }
                if !advanced {
                    stack.pop();
                }
            }
        }
    }
    for list in &mut out {
        list.sort_unstable();
    }
    Orientation { out }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_invariants(g: &Graph) {
        let mut maxd = 0;
        for v in 0..g.vertex_count() {
            let nb = g.neighbors(v);
            maxd = maxd.max(nb.len());
            assert!(nb.windows(2).all(|w| w[0] < w[1]));
            for &w in nb {
                assert_ne!(w, v);
                assert!(g.neighbors(w).contains(&v));
            }
        }
        assert_eq!(maxd, g.max_degree());
    }

    #[test]
    fn family_examples() {
        let g = gen_graph(&Family::Matching { m: 3 }).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count(), g.max_degree()), (6, 3, 1));
        let h = gen_graph(&Family::Hypercube { d: 3 }).unwrap();
        assert_eq!((h.vertex_count(), h.edge_count()), (8, 12));
        assert!((0..8).all(|v| h.degree(v) == 3));
        let s = gen_graph(&Family::StarCenters { n: 4, d: 5 }).unwrap();
        assert_eq!(s.vertex_count(), 24);
        let centers = star_center_ids(4, 5);
        for &a in &centers {
            let dist = s.distances_from(a);
            for &b in &centers {
                if a != b {
                    assert!(dist[b].is_none_or(|x| x >= 3));
                }
            }
            assert_eq!(s.degree(a), 5);
        }
        for g in [g, h, s] {
            check_invariants(&g);
        }
        assert!(matches!(
            gen_graph(&Family::Hypercube { d: 31 }),
            Err(GraphError::InvalidParameter(_))
        ));
    }

    #[test]
    fn dary_tree_shape() {
        let t = gen_graph(&Family::CompleteDaryTree { d: 3, depth: 4 }).unwrap();
        assert_eq!(t.vertex_count(), 1 + 3 + 6 + 12 + 24);
        assert_eq!(t.max_degree(), 3);
        assert!(t.is_forest());
        check_invariants(&t);
    }

    #[test]
    fn bfs_examples() {
        let p = gen_graph(&Family::Path { n: 3 }).unwrap();
        assert_eq!(bfs_order(&p, 0).unwrap(), vec![0, 1, 2]);
        let m = gen_graph(&Family::Matching { m: 2 }).unwrap();
        assert_eq!(bfs_order(&m, 0).unwrap(), vec![0, 1, 2, 3]);
        let t = gen_graph(&Family::CompleteDaryTree { d: 2, depth: 2 }).unwrap();
        let order = bfs_order(&t, 0).unwrap();
        assert_eq!(order[0], 0);
        assert_eq!(order.len(), t.vertex_count());
        assert!(bfs_order(&t, 99).is_err());
    }

    #[test]
    fn distance2_examples() {
        let m = gen_graph(&Family::Matching { m: 2 }).unwrap();
        assert_eq!(distance2_coloring(&m).palette_size, 2);
        let p = gen_graph(&Family::Path { n: 5 }).unwrap();
        assert!(distance2_coloring(&p).palette_size <= 3);
        let s = gen_graph(&Family::StarCenters { n: 1, d: 6 }).unwrap();
        let c = distance2_coloring(&s);
        let mut cs = c.colors.clone();
        cs.sort_unstable();
        cs.dedup();
        assert_eq!(cs.len(), 7);
    }

    #[test]
    fn cover_examples() {
        let m = gen_graph(&Family::Matching { m: 5 }).unwrap();
        assert_eq!(edge_color_cover(&m).count(), 1);
        let p = gen_graph(&Family::Path { n: 4 }).unwrap();
        assert_eq!(edge_color_cover(&p).count(), 2);
        let t = gen_graph(&Family::CompleteDaryTree { d: 3, depth: 2 }).unwrap();
        assert_eq!(edge_color_cover(&t).count(), 3);
        let k4 = gen_graph(&Family::Complete { n: 4 }).unwrap();
        assert!(edge_color_cover(&k4).count() <= 4);
    }

    #[test]
    fn orientation_examples() {
        let c4 = gen_graph(&Family::Cycle { n: 4 }).unwrap();
        let o = orient_halved(&c4);
        assert!(o.out.iter().all(|l| l.len() == 1));
        let h = gen_graph(&Family::Hypercube { d: 4 }).unwrap();
        assert!(orient_halved(&h).max_out_degree() <= 2);
        let m = gen_graph(&Family::Matching { m: 3 }).unwrap();
        assert!(orient_halved(&m).max_out_degree() <= 1);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let g = gen_graph(&Family::CompleteDaryTree { d: 3, depth: 2 }).unwrap();
        assert_eq!(Graph::from_text(&g.to_text()).unwrap(), g);
        assert!(Graph::from_text("p adj 3 2\n0 1\n1 0\n").is_err());
        assert!(Graph::from_text("p adj 3 1\n1 1\n").is_err());
        let c = Graph::from_text("# hello\np adj 2 1\n# edge\n0 1\n").unwrap();
        assert_eq!(c.edge_count(), 1);
    }
}
