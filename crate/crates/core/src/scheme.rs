//! The common scheme abstraction, fixed-width labels, label files, and the two
//! amplification combinators.

use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::rng::{derive_seed, Coins, Stream};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error("graph outside scheme domain: {0}")]
    Domain(String),
    #[error("invalid scheme parameter: {0}")]
    Parameter(String),
    #[error("encoding failed: {0}")]
    Encode(String),
}

/// A fixed-width bit string, most significant bit first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    bits: u32,
    words: SmallVec<[u64; 2]>,
}

impl Label {
    pub fn zeros(bits: u32) -> Label {
        Label {
            bits,
            words: SmallVec::from_elem(0, (bits as usize).div_ceil(64)),
        }
    }

    pub fn from_uint(value: u64, bits: u32) -> Label {
        let mut l = Label::zeros(bits);
        l.set(0, bits, value);
        l
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Reads `width <= 64` bits at `offset`.
    pub fn get(&self, offset: u32, width: u32) -> u64 {
        assert!(width <= 64 && offset + width <= self.bits, "label read out of range");
        let mut v = 0u64;
        for i in offset..offset + width {
            let bit = (self.words[(i / 64) as usize] >> (63 - i % 64)) & 1;
            v = (v << 1) | bit;
        }
        v
    }

    /// Writes the low `width <= 64` bits of `value` at `offset`.
    pub fn set(&mut self, offset: u32, width: u32, value: u64) {
        assert!(width <= 64 && offset + width <= self.bits, "label write out of range");
        for j in 0..width {
            let i = offset + j;
            let bit = (value >> (width - 1 - j)) & 1;
            let w = &mut self.words[(i / 64) as usize];
            let mask = 1u64 << (63 - i % 64);
            if bit == 1 {
                *w |= mask;
            } else {
                *w &= !mask;
            }
        }
    }

    /// The `width`-bit slice starting at `offset`, as a new label.
    pub fn slice(&self, offset: u32, width: u32) -> Label {
        let mut out = Label::zeros(width);
        let mut done = 0;
        while done < width {
            let w = (width - done).min(64);
            out.set(done, w, self.get(offset + done, w));
            done += w;
        }
        out
    }

    pub fn concat(parts: &[Label]) -> Label {
        let total = parts.iter().map(Label::bits).sum();
        let mut out = Label::zeros(total);
        let mut at = 0;
        for p in parts {
            let mut done = 0;
            while done < p.bits {
                let w = (p.bits - done).min(64);
                out.set(at + done, w, p.get(done, w));
                done += w;
            }
            at += p.bits;
        }
        out
    }

    /// Hex of the bits packed MSB-first into `ceil(bits / 8)` bytes.
    pub fn to_hex(&self) -> String {
        let nbytes = (self.bits as usize).div_ceil(8);
        let mut bytes = Vec::with_capacity(nbytes);
        for w in &self.words {
            bytes.extend_from_slice(&w.to_be_bytes());
        }
        bytes.truncate(nbytes);
        hex::encode(bytes)
    }

    pub fn from_hex(s: &str, bits: u32) -> Option<Label> {
        let bytes = hex::decode(s).ok()?;
        if bytes.len() != (bits as usize).div_ceil(8) {
            return None;
        }
        let mut l = Label::zeros(bits);
        for (i, chunk) in bytes.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            l.words[i] = u64::from_be_bytes(buf);
        }
        // padding bits must be zero
        let mut canon = Label::zeros(bits);
        let mut done = 0;
        while done < bits {
            let w = (bits - done).min(64);
            canon.set(done, w, l.get(done, w));
            done += w;
        }
        (canon == l).then_some(l)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Label({}:{})", self.bits, self.to_hex())
    }
}

/// Sequential field writer over a label.
pub struct LabelWriter {
    label: Label,
    pos: u32,
}

impl LabelWriter {
    pub fn new(bits: u32) -> Self {
        LabelWriter {
            label: Label::zeros(bits),
            pos: 0,
        }
    }

    pub fn put(&mut self, width: u32, value: u64) -> &mut Self {
        debug_assert!(width == 64 || value >> width == 0, "value wider than field");
        self.label.set(self.pos, width, value);
        self.pos += width;
        self
    }

    pub fn skip(&mut self, width: u32) -> &mut Self {
        self.pos += width;
        self
    }

    pub fn finish(self) -> Label {
        self.label
    }
}

/// Sequential field reader over a label.
pub struct LabelReader<'a> {
    label: &'a Label,
    pos: u32,
}

impl<'a> LabelReader<'a> {
    pub fn new(label: &'a Label) -> Self {
        LabelReader { label, pos: 0 }
    }

    pub fn take(&mut self, width: u32) -> u64 {
        let v = self.label.get(self.pos, width);
        self.pos += width;
        v
    }

    pub fn skip(&mut self, width: u32) {
        self.pos += width;
    }

    pub fn position(&self) -> u32 {
        self.pos
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ErrorSide {
    OneSidedNonEdges,
    TwoSided,
}

/// Order and palette of a greedy sequential coloring: each vertex in `order`
/// takes a color uniform over the palette minus the colors of its neighbors
/// that come earlier in `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringProcess {
    pub order: Vec<Vertex>,
    pub palette: usize,
}

/// Randomized encoder, deterministic decoder, declared label width.
pub trait SketchScheme: Send + Sync {
    fn name(&self) -> String;

    fn label_bits(&self) -> u32;

    fn error_side(&self) -> ErrorSide;

    /// Rejects graphs outside the scheme's domain.
    fn check_domain(&self, g: &Graph) -> Result<(), SchemeError>;

    /// Encodes one connected component (or the whole graph when the scheme is
    /// not component-local), vertex `i` of `g` receiving label `i`.
    fn encode_component(&self, g: &Graph, coins: &mut dyn Coins) -> Result<Vec<Label>, SchemeError>;

    fn decode(&self, a: &Label, b: &Label) -> bool;

    /// True when the labels of a component depend only on that component's
    /// shape and on coins keyed by its smallest vertex, so components can be
    /// encoded independently and lazily.
    fn component_local(&self) -> bool {
        true
    }

    /// Number of distinct labels the encoder can emit, when known.
    fn label_count(&self) -> Option<u128> {
        None
    }

    /// The sequential coloring the encoder runs, for color-as-label schemes.
    fn coloring_process(&self, _g: &Graph) -> Option<ColoringProcess> {
        None
    }

    /// The plane behind a projective-plane matching scheme.
    fn matching_plane(&self) -> Option<crate::plane::Plane> {
        None
    }

    /// Encodes the whole graph.
    fn encode_with(&self, g: &Graph, coins: &mut dyn Coins) -> Result<Vec<Label>, SchemeError> {
        self.check_domain(g)?;
        if !self.component_local() {
            return self.encode_component(g, coins);
        }
        let mut labels = vec![Label::zeros(self.label_bits()); g.vertex_count()];
        for comp in g.components() {
            let sub = g.induced(&comp);
            let mut child = coins.split(comp[0] as u64);
            let part = self.encode_component(&sub, &mut *child)?;
            for (i, l) in part.into_iter().enumerate() {
                labels[comp[i]] = l;
            }
        }
        Ok(labels)
    }
}

pub type SchemeRef = Arc<dyn SketchScheme>;

const FINGERPRINT_KEY: u64 = 0xf1_9e_70;

/// Labels for every vertex plus provenance of the run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    pub scheme: String,
    pub label_bits: u32,
    pub labels: Vec<Label>,
    pub seed_fingerprint: Option<u64>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelMapError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl LabelMap {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "skotch-labels v1 {} {} {}\n",
            self.scheme,
            self.label_bits,
            self.labels.len()
        );
        for l in &self.labels {
            s.push_str(&l.to_hex());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<LabelMap, LabelMapError> {
        let err = |line: usize, msg: &str| LabelMapError::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| err(1, "empty file"))?;
        let f: Vec<&str> = header.split_whitespace().collect();
        if f.len() != 5 || f[0] != "skotch-labels" || f[1] != "v1" {
            return Err(err(1, "expected `skotch-labels v1 <scheme> <bits> <n>`"));
        }
        let bits: u32 = f[3].parse().map_err(|_| err(1, "bad label width"))?;
        let n: usize = f[4].parse().map_err(|_| err(1, "bad label count"))?;
        let mut labels = Vec::with_capacity(n);
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let l = Label::from_hex(line, bits).ok_or_else(|| err(i + 2, "bad label"))?;
            labels.push(l);
        }
        if labels.len() != n {
            return Err(err(0, "label count does not match header"));
        }
        Ok(LabelMap {
            scheme: f[2].to_string(),
            label_bits: bits,
            labels,
            seed_fingerprint: None,
        })
    }
}

/// Encodes `g` with a stream seeded by `seed`.
pub fn encode(scheme: &dyn SketchScheme, g: &Graph, seed: u64) -> Result<LabelMap, SchemeError> {
    let mut coins = Stream::new(seed);
    let labels = scheme.encode_with(g, &mut coins)?;
    Ok(LabelMap {
        scheme: scheme.name(),
        label_bits: scheme.label_bits(),
        labels,
        seed_fingerprint: Some(derive_seed(seed, FINGERPRINT_KEY)),
    })
}

/// Mean decoder output of `v` against the members of `t`.
pub fn multiset_value(t: &[Label], v: &Label, scheme: &dyn SketchScheme) -> num_rational::Ratio<u64> {
    assert!(!t.is_empty(), "multiset must be nonempty");
    let hits = t.iter().filter(|u| scheme.decode(u, v)).count() as u64;
    num_rational::Ratio::new(hits, t.len() as u64)
}

/// `k` independent copies, accepted only if every copy accepts.
pub struct AmplifyAnd {
    base: SchemeRef,
    k: usize,
}

pub fn amplify_and(base: SchemeRef, k: usize) -> Result<AmplifyAnd, SchemeError> {
    if k == 0 {
        return Err(SchemeError::Parameter("amplification needs k >= 1".into()));
    }
    if base.error_side() != ErrorSide::OneSidedNonEdges {
        return Err(SchemeError::Parameter(
            "AND amplification needs a scheme that errs only on non-edges".into(),
        ));
    }
    Ok(AmplifyAnd { base, k })
}

fn encode_copies(
    base: &dyn SketchScheme,
    k: usize,
    g: &Graph,
    coins: &mut dyn Coins,
) -> Result<Vec<Label>, SchemeError> {
    let mut copies = Vec::with_capacity(k);
    for i in 0..k {
        let mut child = coins.split(i as u64);
        copies.push(base.encode_component(g, &mut *child)?);
    }
    Ok((0..g.vertex_count())
        .map(|v| Label::concat(&copies.iter().map(|c| c[v].clone()).collect::<Vec<_>>()))
        .collect())
}

fn copy_votes<'a>(
    base: &'a dyn SketchScheme,
    k: usize,
    a: &'a Label,
    b: &'a Label,
) -> impl Iterator<Item = bool> + 'a {
    let w = base.label_bits();
    (0..k as u32).map(move |i| base.decode(&a.slice(i * w, w), &b.slice(i * w, w)))
}

impl SketchScheme for AmplifyAnd {
    fn name(&self) -> String {
        format!("and({})/{}", self.k, self.base.name())
    }
    fn label_bits(&self) -> u32 {
        self.k as u32 * self.base.label_bits()
    }
    fn error_side(&self) -> ErrorSide {
        ErrorSide::OneSidedNonEdges
    }
    fn check_domain(&self, g: &Graph) -> Result<(), SchemeError> {
        self.base.check_domain(g)
    }
    fn encode_component(&self, g: &Graph, coins: &mut dyn Coins) -> Result<Vec<Label>, SchemeError> {
        encode_copies(&*self.base, self.k, g, coins)
    }
    fn decode(&self, a: &Label, b: &Label) -> bool {
        copy_votes(&*self.base, self.k, a, b).all(|x| x)
    }
    fn component_local(&self) -> bool {
        self.base.component_local()
    }
    fn label_count(&self) -> Option<u128> {
        self.base.label_count()?.checked_pow(self.k as u32)
    }
}

/// `k` independent copies (k odd), accepted when a majority accepts.
pub struct AmplifyMajority {
    base: SchemeRef,
    k: usize,
}

pub fn amplify_majority(base: SchemeRef, k: usize) -> Result<AmplifyMajority, SchemeError> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(SchemeError::Parameter("majority amplification needs odd k".into()));
    }
    Ok(AmplifyMajority { base, k })
}

impl SketchScheme for AmplifyMajority {
    fn name(&self) -> String {
        format!("maj({})/{}", self.k, self.base.name())
    }
    fn label_bits(&self) -> u32 {
        self.k as u32 * self.base.label_bits()
    }
    fn error_side(&self) -> ErrorSide {
        if self.k == 1 {
            self.base.error_side()
        } else {
            ErrorSide::TwoSided
        }
    }
    fn check_domain(&self, g: &Graph) -> Result<(), SchemeError> {
        self.base.check_domain(g)
    }
    fn encode_component(&self, g: &Graph, coins: &mut dyn Coins) -> Result<Vec<Label>, SchemeError> {
        encode_copies(&*self.base, self.k, g, coins)
    }
    fn decode(&self, a: &Label, b: &Label) -> bool {
        copy_votes(&*self.base, self.k, a, b).filter(|&x| x).count() > self.k / 2
    }
    fn component_local(&self) -> bool {
        self.base.component_local()
    }
    fn label_count(&self) -> Option<u128> {
        self.base.label_count()?.checked_pow(self.k as u32)
    }
}

/// Every vertex gets a fresh fair coin; different coins decode as adjacent.
/// Errs on each pair with probability exactly 1/2.
pub struct CoinScheme;

impl SketchScheme for CoinScheme {
    fn name(&self) -> String {
        "coin2".into()
    }
    fn label_bits(&self) -> u32 {
        1
    }
    fn error_side(&self) -> ErrorSide {
        ErrorSide::TwoSided
    }
    fn check_domain(&self, _g: &Graph) -> Result<(), SchemeError> {
        Ok(())
    }
    fn encode_component(&self, g: &Graph, coins: &mut dyn Coins) -> Result<Vec<Label>, SchemeError> {
        Ok((0..g.vertex_count())
            .map(|_| Label::from_uint(coins.below(2), 1))
            .collect())
    }
    fn decode(&self, a: &Label, b: &Label) -> bool {
        a != b
    }
    fn label_count(&self) -> Option<u128> {
        Some(2)
    }
}

/// One label for every vertex, always decoded as adjacent.
pub struct ConstantScheme;

impl SketchScheme for ConstantScheme {
    fn name(&self) -> String {
        "const1".into()
    }
    fn label_bits(&self) -> u32 {
        1
    }
    fn error_side(&self) -> ErrorSide {
        ErrorSide::OneSidedNonEdges
    }
    fn check_domain(&self, _g: &Graph) -> Result<(), SchemeError> {
        Ok(())
    }
    fn encode_component(&self, g: &Graph, _coins: &mut dyn Coins) -> Result<Vec<Label>, SchemeError> {
        Ok(vec![Label::zeros(1); g.vertex_count()])
    }
    fn decode(&self, _a: &Label, _b: &Label) -> bool {
        true
    }
    fn label_count(&self) -> Option<u128> {
        Some(1)
    }
}
