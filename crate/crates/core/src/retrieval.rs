//! Static XOR retrieval: `n` keys with `r`-bit values stored in `n` cells so
//! that a key's value is the XOR of `k` hashed cells.
//!
//! The cells are the unique solution of an `n x n` system over GF(2). A key
//! outside the set therefore reads the XOR of a nonempty subset of the stored
//! values, which keeps out-of-set answers as unpredictable as the values.

use thiserror::Error;

use crate::rng::{derive_seed, splitmix, Coins};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RetrievalError {
    #[error("key {0} outside the universe")]
    KeyOutOfUniverse(u64),
    #[error("duplicate key {0}")]
    DuplicateKey(u64),
    #[error("value {value:#x} wider than {r} bits")]
    ValueTooWide { value: u64, r: u32 },
    #[error("value width must be 1..=64 bits, got {0}")]
    BadWidth(u32),
    #[error("universe of {universe} keys cannot hold {n} distinct keys")]
    UniverseTooSmall { universe: u64, n: usize },
    #[error("no invertible system after {0} seeds")]
    RetriesExhausted(usize),
    #[error("key {0} is stored")]
    KeyStored(u64),
    #[error("key set not kept by this structure")]
    NoKeys,
    #[error("malformed serialized structure: {0}")]
    Malformed(&'static str),
}

/// Seeds tried before giving up.
pub const MAX_RETRIES: usize = 256;

const MAGIC: &[u8; 5] = b"XRTV1";

/// Header bits of the serialized form: magic plus four 32-bit fields.
pub const HEADER_BITS: u64 = 40 + 4 * 32;

/// Number of hashed cells per key for `n` keys.
///
/// Rows of even weight all lie in the even-weight subspace and rows of full
/// weight coincide, so either makes the system singular; `k` is taken odd and
/// below `n` once `n >= 2`.
pub fn hash_count(n: usize) -> usize {
    let base = 3.max(64 - (n as u64).leading_zeros() as usize);
    let cap = if n >= 2 { n - 1 } else { 1 };
    let k = base.min(cap);
    if k % 2 == 0 {
        k - 1
    } else {
        k
    }
}

/// Distinct cell indices of `key`, by rejection over a keyed hash.
fn cell_indices(seed: u64, key: u64, cells: usize, k: usize) -> Vec<usize> {
    let base = derive_seed(seed, key);
    let mut out = Vec::with_capacity(k);
    let mut ctr = 0u64;
    while out.len() < k {
        let h = splitmix(base.wrapping_add(ctr));
        ctr += 1;
        let i = ((h as u128 * cells as u128) >> 64) as usize;
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

fn mask(r: u32) -> u64 {
    if r == 64 {
        u64::MAX
    } else {
        (1u64 << r) - 1
    }
}

/// Dense GF(2) row with an attached right-hand side.
#[derive(Clone)]
struct Row {
    bits: Vec<u64>,
    rhs: u64,
}

impl Row {
    fn get(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }
    fn xor(&mut self, other: &Row) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
        self.rhs ^= other.rhs;
    }
}

/// Solves `rows * x = rhs` for square invertible systems, `None` if singular.
fn solve(mut rows: Vec<Row>, n: usize) -> Option<Vec<u64>> {
    for col in 0..n {
        let piv = (col..n).find(|&r| rows[r].get(col))?;
        rows.swap(col, piv);
        let p = rows[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != col && row.get(col) {
                row.xor(&p);
            }
        }
    }
    Some(rows.into_iter().map(|r| r.rhs).collect())
}

fn indicator(n: usize, ones: &[usize]) -> Vec<u64> {
    let mut bits = vec![0u64; n.div_ceil(64)];
    for &i in ones {
        bits[i / 64] |= 1 << (i % 64);
    }
    bits
}

/// Rank over GF(2) of the given rows.
pub fn gf2_rank(rows: &[Vec<usize>], n: usize) -> usize {
    let mut m: Vec<Row> = rows
        .iter()
        .map(|r| Row {
            bits: indicator(n, r),
            rhs: 0,
        })
        .collect();
    let mut rank = 0;
    for col in 0..n {
        if let Some(p) = (rank..m.len()).find(|&r| m[r].get(col)) {
            m.swap(rank, p);
            let pr = m[rank].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor(&pr);
                }
            }
            rank += 1;
        }
    }
    rank
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetrievalStructure {
    n: usize,
    r: u32,
    k: usize,
    universe: u64,
    seed: u64,
    table: Vec<u64>,
    /// Stored keys in build order; not part of the wire form.
    keys: Option<Vec<u64>>,
}

impl RetrievalStructure {
    /// Builds with fresh seeds from `coins` until the system is invertible.
    pub fn build(
        pairs: &[(u64, u64)],
        universe: u64,
        r: u32,
        coins: &mut dyn Coins,
    ) -> Result<RetrievalStructure, RetrievalError> {
        validate(pairs, universe, r)?;
        if pairs.is_empty() {
            let seed = coins.word();
            let empty = if r == 64 { coins.word() } else { coins.below(1 << r) };
            return Ok(Self::empty(universe, r, seed, empty));
        }
        for _ in 0..MAX_RETRIES {
            let seed = coins.word();
            if let Some(s) = Self::build_seeded(pairs, universe, r, seed)? {
                return Ok(s);
            }
        }
        Err(RetrievalError::RetriesExhausted(MAX_RETRIES))
    }

    /// One build attempt with a fixed seed; `Ok(None)` when that seed gives a
    /// singular system.
    pub fn build_seeded(
        pairs: &[(u64, u64)],
        universe: u64,
        r: u32,
        seed: u64,
    ) -> Result<Option<RetrievalStructure>, RetrievalError> {
        validate(pairs, universe, r)?;
        let n = pairs.len();
        if n == 0 {
            return Ok(Some(Self::empty(universe, r, seed, 0)));
        }
        let k = hash_count(n);
        let rows = pairs
            .iter()
            .map(|&(key, value)| Row {
                bits: indicator(n, &cell_indices(seed, key, n, k)),
                rhs: value,
            })
            .collect();
        Ok(solve(rows, n).map(|table| RetrievalStructure {
            n,
            r,
            k,
            universe,
            seed,
            table,
            keys: Some(pairs.iter().map(|p| p.0).collect()),
        }))
    }

    /// The structure with no keys: one cell holding `empty`, returned for
    /// every query.
    pub fn empty(universe: u64, r: u32, seed: u64, empty: u64) -> RetrievalStructure {
        RetrievalStructure {
            n: 0,
            r,
            k: 1,
            universe,
            seed,
            table: vec![empty & mask(r)],
            keys: Some(Vec::new()),
        }
    }

    /// Reassembles a structure from its stored state. `table` must hold
    /// `max(n, 1)` cells.
    pub fn from_parts(
        n: usize,
        r: u32,
        universe: u64,
        seed: u64,
        table: Vec<u64>,
    ) -> Result<RetrievalStructure, RetrievalError> {
        if r == 0 || r > 64 {
            return Err(RetrievalError::BadWidth(r));
        }
        if table.len() != n.max(1) {
            return Err(RetrievalError::Malformed("table length"));
        }
        if table.iter().any(|&c| c & !mask(r) != 0) {
            return Err(RetrievalError::Malformed("cell wider than r"));
        }
        Ok(RetrievalStructure {
            n,
            r,
            k: if n == 0 { 1 } else { hash_count(n) },
            universe,
            seed,
            table,
            keys: None,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn value_bits(&self) -> u32 {
        self.r
    }

    pub fn hash_count(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn keys(&self) -> Option<&[u64]> {
        self.keys.as_deref()
    }

    /// Cells read by `key`.
    pub fn cells_of(&self, key: u64) -> Vec<usize> {
        if self.n == 0 {
            vec![0]
        } else {
            cell_indices(self.seed, key, self.n, self.k)
        }
    }

    pub fn query(&self, key: u64) -> Result<u64, RetrievalError> {
        if key >= self.universe {
            return Err(RetrievalError::KeyOutOfUniverse(key));
        }
        Ok(self.query_unchecked(key))
    }

    /// [`query`](Self::query) without the universe check.
    pub fn query_unchecked(&self, key: u64) -> u64 {
        self.cells_of(key).into_iter().fold(0, |acc, i| acc ^ self.table[i])
    }

    /// Stored keys whose values XOR to the answer for the out-of-set `key`.
    ///
    /// Writing `A` for the key-by-cell incidence matrix, the answer is
    /// `h(key) . table` with `table = A^-1 f`, so the subset is the support of
    /// the `c` solving `A^T c = h(key)`.
    pub fn out_of_set_subset(&self, key: u64) -> Result<Vec<u64>, RetrievalError> {
        let keys = self.keys.as_ref().ok_or(RetrievalError::NoKeys)?;
        if key >= self.universe {
            return Err(RetrievalError::KeyOutOfUniverse(key));
        }
        if keys.contains(&key) {
            return Err(RetrievalError::KeyStored(key));
        }
        let n = self.n;
        if n == 0 {
            return Ok(Vec::new());
        }
        let rows_of: Vec<Vec<usize>> = keys.iter().map(|&x| self.cells_of(x)).collect();
        let target = self.cells_of(key);
        // transpose: equation per cell j, unknown per key i
        let eqs: Vec<Row> = (0..n)
            .map(|j| Row {
                bits: indicator(
                    n,
                    &(0..n).filter(|&i| rows_of[i].contains(&j)).collect::<Vec<_>>(),
                ),
                rhs: target.contains(&j) as u64,
            })
            .collect();
        let sol = solve(eqs, n).ok_or(RetrievalError::Malformed("singular system"))?;
        Ok(keys
            .iter()
            .zip(sol)
            .filter(|(_, c)| *c == 1)
            .map(|(&x, _)| x)
            .collect())
    }

    /// Unpadded length of the wire form in bits.
    pub fn serialized_bits(&self) -> u64 {
        HEADER_BITS + 64 + self.table.len() as u64 * self.r as u64
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = BitSink::default();
        for &b in MAGIC {
            w.put(8, b as u64);
        }
        for v in [self.n as u64, self.r as u64, self.k as u64, self.universe] {
            w.put(32, v);
        }
        w.put(64, self.seed);
        for &c in &self.table {
            w.put(self.r, c);
        }
        w.bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<RetrievalStructure, RetrievalError> {
        let mut rd = BitSource { bytes, pos: 0 };
        for &b in MAGIC {
            if rd.take(8)? != b as u64 {
                return Err(RetrievalError::Malformed("bad magic"));
            }
        }
        let n = rd.take(32)? as usize;
        let r = rd.take(32)? as u32;
        let k = rd.take(32)? as usize;
        let universe = rd.take(32)?;
        let seed = rd.take(64)?;
        if r == 0 || r > 64 {
            return Err(RetrievalError::BadWidth(r));
        }
        let expect_k = if n == 0 { 1 } else { hash_count(n) };
        if k != expect_k {
            return Err(RetrievalError::Malformed("hash count"));
        }
        let table = (0..n.max(1)).map(|_| rd.take(r)).collect::<Result<Vec<_>, _>>()?;
        if (bytes.len() as u64) * 8 - rd.pos >= 8 {
            return Err(RetrievalError::Malformed("trailing bytes"));
        }
        Self::from_parts(n, r, universe, seed, table)
    }
}

fn validate(pairs: &[(u64, u64)], universe: u64, r: u32) -> Result<(), RetrievalError> {
    if r == 0 || r > 64 {
        return Err(RetrievalError::BadWidth(r));
    }
    if (pairs.len() as u64) > universe {
        return Err(RetrievalError::UniverseTooSmall {
            universe,
            n: pairs.len(),
        });
    }
    let mut seen = std::collections::HashSet::with_capacity(pairs.len());
    for &(key, value) in pairs {
        if key >= universe {
            return Err(RetrievalError::KeyOutOfUniverse(key));
        }
        if !seen.insert(key) {
            return Err(RetrievalError::DuplicateKey(key));
        }
        if value & !mask(r) != 0 {
            return Err(RetrievalError::ValueTooWide { value, r });
        }
    }
    Ok(())
}

#[derive(Default)]
struct BitSink {
    bytes: Vec<u8>,
    bits: u64,
}

impl BitSink {
    fn put(&mut self, width: u32, value: u64) {
        for j in (0..width).rev() {
            if self.bits.is_multiple_of(8) {
                self.bytes.push(0);
            }
            if value >> j & 1 == 1 {
                *self.bytes.last_mut().unwrap() |= 0x80 >> (self.bits % 8);
            }
            self.bits += 1;
        }
    }
}

struct BitSource<'a> {
    bytes: &'a [u8],
    pos: u64,
}

impl BitSource<'_> {
    fn take(&mut self, width: u32) -> Result<u64, RetrievalError> {
        let mut v = 0u64;
        for _ in 0..width {
            let byte = *self
                .bytes
                .get((self.pos / 8) as usize)
                .ok_or(RetrievalError::Malformed("truncated"))?;
            v = v << 1 | (byte >> (7 - self.pos % 8) & 1) as u64;
            self.pos += 1;
        }
        Ok(v)
    }
}
