//! Equality sketches from a Reed-Solomon grid and the forest scheme built on
//! them.
//!
//! A name is written as a low-degree polynomial over GF(2^w) and evaluated on
//! a square grid. A vertex keeps a few random columns of its own grid and a
//! few random rows of its parent's grid; a row and a column always meet in a
//! cell, and two grids of distinct names agree on few cells.

use thiserror::Error;

use crate::graph::{bfs_parents, Graph};
use crate::plane::bits_for;
use crate::rng::Coins;
use crate::scheme::{ErrorSide, Label, LabelReader, LabelWriter, SchemeError, SketchScheme};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("unsupported field width {0}; use 4, 8 or 16")]
    Width(u32),
    #[error("name of {0} bits too long")]
    NameTooLong(u32),
    #[error("{cells} cells do not fit a field of {field} elements")]
    GridTooLarge { cells: u64, field: u64 },
    #[error("grid needs side >= 1 and at least as many cells as coefficients")]
    Shape,
}

/// GF(2^w) for `w` in {4, 8, 16}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Field {
    w: u32,
    poly: u32,
}

impl Field {
    pub fn new(w: u32) -> Result<Field, CodeError> {
        let poly = match w {
            4 => 0x13,
            8 => 0x11d,
            16 => 0x1100b,
            _ => return Err(CodeError::Width(w)),
        };
        Ok(Field { w, poly })
    }

    pub fn width(&self) -> u32 {
        self.w
    }

    pub fn size(&self) -> u64 {
        1 << self.w
    }

    pub fn mul(&self, mut a: u32, mut b: u32) -> u32 {
        let mut r = 0;
        while b != 0 {
            if b & 1 == 1 {
                r ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> self.w & 1 == 1 {
                a ^= self.poly;
            }
        }
        r
    }
}

/// Reed-Solomon code with `k` coefficients evaluated at `0, 1, ..., side^2 - 1`
/// laid out row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridCode {
    field: Field,
    k: u32,
    side: u32,
}

/// A codeword as a `side x side` grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridCodeword {
    pub side: u32,
    pub cells: Vec<u32>,
    pub name: u64,
}

impl GridCodeword {
    pub fn cell(&self, row: u32, col: u32) -> u32 {
        self.cells[(row * self.side + col) as usize]
    }
    pub fn row(&self, i: u32) -> Vec<u32> {
        (0..self.side).map(|j| self.cell(i, j)).collect()
    }
    pub fn column(&self, j: u32) -> Vec<u32> {
        (0..self.side).map(|i| self.cell(i, j)).collect()
    }
}

impl GridCode {
    pub fn new(w: u32, k: u32, side: u32) -> Result<GridCode, CodeError> {
        let field = Field::new(w)?;
        if side == 0 || k == 0 || (side * side) < k {
            return Err(CodeError::Shape);
        }
        let cells = side as u64 * side as u64;
        if cells > field.size() {
            return Err(CodeError::GridTooLarge {
                cells,
                field: field.size(),
            });
        }
        Ok(GridCode { field, k, side })
    }

    /// Smallest grid with at least `2k` cells for `m`-bit names, so distinct
    /// names agree on at most half the cells.
    pub fn for_names(m: u32, w: u32) -> Result<GridCode, CodeError> {
        if m > 1 << 20 {
            return Err(CodeError::NameTooLong(m));
        }
        let k = m.div_ceil(w).max(1);
        let side = (2.0 * k as f64).sqrt().ceil() as u32;
        GridCode::new(w, k, side)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn side(&self) -> u32 {
        self.side
    }

    pub fn cells(&self) -> u32 {
        self.side * self.side
    }

    pub fn coefficients(&self) -> u32 {
        self.k
    }

    /// Largest number of cells two distinct codewords agree on.
    pub fn max_agreement(&self) -> u32 {
        self.k - 1
    }

    /// Relative distance `1 - (k - 1) / side^2`.
    pub fn relative_distance(&self) -> f64 {
        1.0 - self.max_agreement() as f64 / self.cells() as f64
    }

    pub fn name_bits(&self) -> u32 {
        self.k * self.field.w
    }

    pub fn encode(&self, name: u64) -> Result<GridCodeword, CodeError> {
        let bits = 64 - name.leading_zeros();
        if bits > self.name_bits() {
            return Err(CodeError::NameTooLong(bits));
        }
        let w = self.field.w;
        let mask = (1u64 << w) - 1;
        let coef: Vec<u32> = (0..self.k)
            .map(|i| if i * w >= 64 { 0 } else { ((name >> (i * w)) & mask) as u32 })
            .collect();
        let cells = (0..self.cells())
            .map(|alpha| coef.iter().rev().fold(0, |acc, &c| self.field.mul(acc, alpha) ^ c))
            .collect();
        Ok(GridCodeword {
            side: self.side,
            cells,
            name,
        })
    }
}

/// Encodes `name` with the default grid for `m`-bit names over GF(2^8).
pub fn grid_encode(name: u64, m: u32) -> Result<GridCodeword, CodeError> {
    GridCode::for_names(m, 8)?.encode(name)
}

const INDEX_BITS: u32 = 16;

/// Forest adjacency from equality sketches of each vertex's own name and its
/// parent's name.
#[derive(Clone, Debug)]
pub struct ForestEqualityScheme {
    n: u64,
    t: u32,
    code: GridCode,
}

/// Parsed label: sampled own columns and parent rows, with their indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqLabel {
    pub is_root: bool,
    pub columns: Vec<(u32, Vec<u32>)>,
    pub parent_rows: Vec<(u32, Vec<u32>)>,
}

impl ForestEqualityScheme {
    pub fn new(n: u64, t: u32) -> Result<ForestEqualityScheme, SchemeError> {
        Self::with_width(n, t, 8)
    }

    pub fn with_width(n: u64, t: u32, w: u32) -> Result<ForestEqualityScheme, SchemeError> {
        if n == 0 || t == 0 {
            return Err(SchemeError::Parameter("smmpc-forest needs n >= 1 and t >= 1".into()));
        }
        // names 0..n, with n itself reserved for the parent of a root
        let m = bits_for(n + 1).max(1);
        let code = GridCode::for_names(m, w).map_err(|e| SchemeError::Parameter(e.to_string()))?;
        Ok(ForestEqualityScheme { n, t, code })
    }

    pub fn code(&self) -> GridCode {
        self.code
    }

    fn part_bits(&self) -> u32 {
        self.t * (INDEX_BITS + self.code.side() * self.code.field().width())
    }

    pub fn parse(&self, l: &Label) -> EqLabel {
        let mut r = LabelReader::new(l);
        let is_root = r.take(1) == 1;
        let side = self.code.side();
        let w = self.code.field().width();
        let part = |r: &mut LabelReader| {
            (0..self.t)
                .map(|_| {
                    let idx = r.take(INDEX_BITS) as u32;
                    (idx, (0..side).map(|_| r.take(w) as u32).collect())
                })
                .collect::<Vec<_>>()
        };
        let columns = part(&mut r);
        let parent_rows = part(&mut r);
        EqLabel {
            is_root,
            columns,
            parent_rows,
        }
    }

    /// Does `rows` (of one grid) agree with `cols` (of another) at every
    /// intersection?
    fn consistent(&self, rows: &[(u32, Vec<u32>)], cols: &[(u32, Vec<u32>)]) -> bool {
        let side = self.code.side();
        rows.iter().all(|(i, row)| {
            cols.iter().all(|(j, col)| {
                *i < side && *j < side && row[*j as usize] == col[*i as usize]
            })
        })
    }
}

impl SketchScheme for ForestEqualityScheme {
    fn name(&self) -> String {
        format!("smmpc-forest({},{})", self.n, self.t)
    }
    fn label_bits(&self) -> u32 {
        1 + 2 * self.part_bits()
    }
    fn error_side(&self) -> ErrorSide {
        ErrorSide::OneSidedNonEdges
    }
    fn check_domain(&self, g: &Graph) -> Result<(), SchemeError> {
        if g.vertex_count() as u64 > self.n {
            return Err(SchemeError::Domain(format!(
                "smmpc-forest({}) takes at most {} vertices",
                self.n, self.n
            )));
        }
        if !g.is_forest() {
            return Err(SchemeError::Domain("smmpc-forest needs a forest".into()));
        }
        Ok(())
    }
    fn component_local(&self) -> bool {
        false
    }
    fn encode_component(&self, g: &Graph, coins: &mut dyn Coins) -> Result<Vec<Label>, SchemeError> {
        self.check_domain(g)?;
        let parents = bfs_parents(g);
        let side = self.code.side() as u64;
        let w = self.code.field().width();
        let grid = |name: u64| self.code.encode(name).expect("names fit the code");
        let mut out = Vec::with_capacity(g.vertex_count());
        for v in 0..g.vertex_count() {
            let own = grid(v as u64);
            let parent = grid(parents[v].map_or(self.n, |p| p as u64));
            // each vertex's indices come from its own substream
            let mut c = coins.split(v as u64);
            let cols: Vec<u32> = (0..self.t).map(|_| c.below(side) as u32).collect();
            let rows: Vec<u32> = (0..self.t).map(|_| c.below(side) as u32).collect();
            let mut lw = LabelWriter::new(self.label_bits());
            lw.put(1, parents[v].is_none() as u64);
            for &j in &cols {
                lw.put(INDEX_BITS, j as u64);
                for x in own.column(j) {
                    lw.put(w, x as u64);
                }
            }
            for &i in &rows {
                lw.put(INDEX_BITS, i as u64);
                for x in parent.row(i) {
                    lw.put(w, x as u64);
                }
            }
            out.push(lw.finish());
        }
        Ok(out)
    }
    fn decode(&self, a: &Label, b: &Label) -> bool {
        let (x, y) = (self.parse(a), self.parse(b));
        (!x.is_root && self.consistent(&x.parent_rows, &y.columns))
            || (!y.is_root && self.consistent(&y.parent_rows, &x.columns))
    }
}

/// Bits of a deterministic parent-pointer label for `n` vertices.
pub fn parent_pointer_bits(n: u64) -> u32 {
    bits_for(n + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_graph, Family};
    use crate::rng::Stream;
    use crate::scheme::encode;

    #[test]
    fn field_basics() {
        let f = Field::new(8).unwrap();
        assert_eq!(f.mul(2, 0x80), 0x1d);
        assert_eq!(f.mul(0x53, 0xca), f.mul(0xca, 0x53));
        for a in 1..256u32 {
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.mul(a, 0), 0);
            // every nonzero element is invertible
            assert!((1..256u32).any(|b| f.mul(a, b) == 1));
        }
        assert!(Field::new(5).is_err());
    }

    #[test]
    fn equal_and_zero_names() {
        let code = GridCode::new(8, 4, 8).unwrap();
        assert_eq!(code.encode(12345).unwrap(), code.encode(12345).unwrap());
        assert!(code.encode(0).unwrap().cells.iter().all(|&c| c == 0));
    }

    #[test]
    fn distinct_names_agree_on_at_most_degree_cells() {
        let code = GridCode::new(8, 4, 8).unwrap();
        let mut s = Stream::new(7);
        for _ in 0..300 {
            let a = s.below(1 << 32);
            let b = s.below(1 << 32);
            if a == b {
                continue;
            }
            let (ga, gb) = (code.encode(a).unwrap(), code.encode(b).unwrap());
            let agree = ga.cells.iter().zip(&gb.cells).filter(|(x, y)| x == y).count();
            assert!(agree as u32 <= code.max_agreement());
        }
        assert!(code.relative_distance() >= 0.5);
        assert!(code.encode(1 << 32).is_err());
    }

    #[test]
    fn default_grids_have_distance_one_half() {
        for m in [1, 8, 9, 13, 17, 40, 64] {
            let c = GridCode::for_names(m, 8).unwrap();
            assert!(c.relative_distance() >= 0.5, "m = {m}");
        }
    }

    #[test]
    fn forest_edges_accept() {
        let s = ForestEqualityScheme::new(1 << 10, 2).unwrap();
        let g = gen_graph(&Family::CompleteDaryTree { d: 3, depth: 4 }).unwrap();
        for seed in 0..20 {
            let m = encode(&s, &g, seed).unwrap();
            for (u, v) in g.edges() {
                assert!(s.decode(&m.labels[u], &m.labels[v]));
            }
        }
        assert!(s.check_domain(&gen_graph(&Family::Cycle { n: 4 }).unwrap()).is_err());
        let small = ForestEqualityScheme::new(4, 1).unwrap();
        assert!(small.check_domain(&gen_graph(&Family::Path { n: 5 }).unwrap()).is_err());
    }

    #[test]
    fn label_size_at_sixteen_bits() {
        let s = ForestEqualityScheme::new(1 << 16, 3).unwrap();
        // 17-bit names: 3 coefficients on a 3 x 3 grid
        assert_eq!(s.code().side(), 3);
        assert_eq!(s.label_bits(), 1 + 2 * 3 * (16 + 3 * 8));
        assert_eq!(parent_pointer_bits(1 << 16), 17);
    }

    #[test]
    fn indices_are_uniform_given_other_labels() {
        // vertex 2's sampled column index is independent of the others'
        let s = ForestEqualityScheme::new(8, 1).unwrap();
        let g = gen_graph(&Family::Path { n: 4 }).unwrap();
        let side = s.code().side();
        let mut counts = vec![vec![0u32; side as usize]; side as usize];
        let root = Stream::new(3);
        let trials = 10_000;
        for t in 0..trials {
            let l = s.encode_with(&g, &mut root.child(t)).unwrap();
            let other = s.parse(&l[1]).columns[0].0;
            let mine = s.parse(&l[2]).columns[0].0;
            counts[other as usize][mine as usize] += 1;
        }
        // chi-square over the joint table against the product of uniforms
        let cells = (side * side) as f64;
        let expect = trials as f64 / cells;
        let chi: f64 = counts
            .iter()
            .flatten()
            .map(|&c| (c as f64 - expect).powi(2) / expect)
            .sum();
        // 99.9% point of chi-square with 3 degrees of freedom is 16.27
        assert!(chi < 16.27, "chi-square {chi}");
    }
}
