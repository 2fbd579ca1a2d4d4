//! Random sources for encoders.
//!
//! Every randomized encoder draws its choices through [`Coins`]. A live
//! [`Stream`] produces them from a seeded ChaCha generator; an
//! [`Enumerator`] walks every choice sequence in turn, which is how the exact
//! posterior and oracle code reproduces an encoder's full output distribution.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A source of uniform choices.
pub trait Coins {
    /// Uniform integer in `0..n`. `n` must be positive.
    fn below(&mut self, n: u64) -> u64;

    /// 64 uniform bits.
    fn word(&mut self) -> u64;

    /// An independent child source identified by `key`.
    ///
    /// For a live stream the child depends only on the parent seed and the key,
    /// never on how many values the parent has produced so far.
    fn split(&mut self, key: u64) -> Box<dyn Coins + '_>;

    fn bit(&mut self) -> bool {
        self.below(2) == 1
    }
}

pub(crate) fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the child stream `key` of a stream seeded with `seed`.
pub fn derive_seed(seed: u64, key: u64) -> u64 {
    splitmix(seed ^ splitmix(key ^ 0x5bd1_e995_2f3b_7c61))
}

/// Seeded ChaCha stream with keyed splitting.
#[derive(Clone, Debug)]
pub struct Stream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn child(&self, key: u64) -> Stream {
        Stream::new(derive_seed(self.seed, key))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

impl Coins for Stream {
    fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        self.rng.gen_range(0..n)
    }

    fn word(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn split(&mut self, key: u64) -> Box<dyn Coins + '_> {
        Box::new(self.child(key))
    }
}

/// Walks all choice sequences of a deterministic consumer in odometer order.
///
/// Usage: call [`Enumerator::start`], run the consumer against the enumerator,
/// read [`Enumerator::weight`], then [`Enumerator::advance`] until it returns
/// false. A call to `word` marks the run as unbounded; the caller should treat
/// that as an exceeded budget.
#[derive(Debug, Default)]
pub struct Enumerator {
    script: Vec<(u64, u64)>,
    pos: usize,
    unbounded: bool,
}

impl Enumerator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn start(&mut self) {
        self.pos = 0;
    }

    /// Product of the arities consumed in the last run; the run's probability
    /// is the reciprocal. `None` if it overflowed or the run drew a full word.
    pub fn weight(&self) -> Option<u128> {
        if self.unbounded {
            return None;
        }
        let mut w: u128 = 1;
        for &(_, arity) in &self.script[..self.pos] {
            w = w.checked_mul(arity as u128)?;
        }
        Some(w)
    }

    pub fn unbounded(&self) -> bool {
        self.unbounded
    }

    /// The choices made in the last run.
    pub fn choices(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.script[..self.pos].iter().copied()
    }

    /// Moves to the next choice sequence. Returns false when all are done.
    pub fn advance(&mut self) -> bool {
        self.script.truncate(self.pos);
        while let Some(last) = self.script.last_mut() {
            if last.0 + 1 < last.1 {
                last.0 += 1;
                return true;
            }
            self.script.pop();
        }
        false
    }
}

impl Coins for Enumerator {
    fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let v = if self.pos < self.script.len() {
            let (v, arity) = self.script[self.pos];
            assert_eq!(arity, n, "consumer is not deterministic given its choices");
            v
        } else {
            self.script.push((0, n));
            0
        };
        self.pos += 1;
        v
    }

    fn word(&mut self) -> u64 {
        self.unbounded = true;
        0
    }

    fn split(&mut self, _key: u64) -> Box<dyn Coins + '_> {
        Box::new(Delegate(self))
    }
}

struct Delegate<'a>(&'a mut Enumerator);

impl Coins for Delegate<'_> {
    fn below(&mut self, n: u64) -> u64 {
        self.0.below(n)
    }
    fn word(&mut self) -> u64 {
        self.0.word()
    }
    fn split(&mut self, _key: u64) -> Box<dyn Coins + '_> {
        Box::new(Delegate(&mut *self.0))
    }
}

/// Coins that replay a fixed list of `below` answers; used by tests that need
/// to steer an encoder down a particular path.
#[derive(Debug, Clone)]
pub struct Scripted {
    values: Vec<u64>,
    pos: usize,
}

impl Scripted {
    pub fn new(values: Vec<u64>) -> Self {
        Scripted { values, pos: 0 }
    }
}

impl Coins for Scripted {
    fn below(&mut self, n: u64) -> u64 {
        let v = self.values.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        assert!(v < n, "scripted value {v} out of range {n}");
        v
    }
    fn word(&mut self) -> u64 {
        let v = self.values.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        v
    }
    fn split(&mut self, _key: u64) -> Box<dyn Coins + '_> {
        Box::new(ScriptedView(self))
    }
}

struct ScriptedView<'a>(&'a mut Scripted);

impl Coins for ScriptedView<'_> {
    fn below(&mut self, n: u64) -> u64 {
        self.0.below(n)
    }
    fn word(&mut self) -> u64 {
        self.0.word()
    }
    fn split(&mut self, _key: u64) -> Box<dyn Coins + '_> {
        Box::new(ScriptedView(&mut *self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_ignores_parent_position() {
        let mut a = Stream::new(9);
        let mut b = Stream::new(9);
        a.word();
        a.word();
        let x = a.split(3).word();
        let y = b.split(3).word();
        assert_eq!(x, y);
        assert_ne!(b.split(4).word(), y);
    }

    #[test]
    fn enumerator_visits_every_sequence_once() {
        // consumer: one choice of 3, then a choice of 2 only when the first was 0
        let mut e = Enumerator::new();
        let mut seen = Vec::new();
        let mut total = 0.0;
        loop {
            e.start();
            let a = e.below(3);
            let b = if a == 0 { Some(e.below(2)) } else { None };
            seen.push((a, b));
            total += 1.0 / e.weight().unwrap() as f64;
            if !e.advance() {
                break;
            }
        }
        assert_eq!(seen, vec![(0, Some(0)), (0, Some(1)), (1, None), (2, None)]);
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn word_marks_unbounded() {
        let mut e = Enumerator::new();
        e.start();
        e.word();
        assert!(e.unbounded());
        assert_eq!(e.weight(), None);
    }
}
