//! Projective planes over prime fields.
//!
//! Elements are normalized triples `(a, b, c)` over GF(p) whose first nonzero
//! coordinate is 1. Incidence is the identity bilinear form, so one element
//! serves as both point and line and the relation is symmetric.

use thiserror::Error;

use crate::rng::Coins;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlaneError {
    #[error("plane order {0} is not prime")]
    NotPrime(u64),
    #[error("plane order {0} too large")]
    TooLarge(u64),
    #[error("element index {index} out of range for order {p}")]
    IndexOutOfRange { index: u64, p: u64 },
    #[error("element coordinates are not normalized over GF({0})")]
    NotNormalized(u64),
    #[error("mismatched plane orders {0} and {1}")]
    OrderMismatch(u64, u64),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// Largest order accepted; keeps `p^2 + p + 1` and products well inside `u64`.
pub const MAX_ORDER: u64 = 1 << 30;

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// A projective plane of prime order `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Plane {
    p: u64,
}

/// A normalized homogeneous triple tagged with its plane order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PlaneElement {
    pub coords: [u64; 3],
    pub order: u64,
}

impl PlaneElement {
    pub fn incident(&self, other: &PlaneElement) -> Result<bool, PlaneError> {
        if self.order != other.order {
            return Err(PlaneError::OrderMismatch(self.order, other.order));
        }
        let p = self.order;
        let dot = (0..3).fold(0u64, |acc, i| (acc + self.coords[i] * other.coords[i] % p) % p);
        Ok(dot == 0)
    }
}

impl Plane {
    pub fn new(p: u64) -> Result<Plane, PlaneError> {
        if p > MAX_ORDER {
            return Err(PlaneError::TooLarge(p));
        }
        if !is_prime(p) {
            return Err(PlaneError::NotPrime(p));
        }
        Ok(Plane { p })
    }

    pub fn order(&self) -> u64 {
        self.p
    }

    /// Number of elements, `p^2 + p + 1`.
    pub fn size(&self) -> u64 {
        self.p * self.p + self.p + 1
    }

    /// Width of the wire form.
    pub fn index_bits(&self) -> u32 {
        bits_for(self.size())
    }

    pub fn coords(&self, index: u64) -> [u64; 3] {
        let p = self.p;
        if index < p * p {
            [1, index / p, index % p]
        } else if index < p * p + p {
            [0, 1, index - p * p]
        } else {
            [0, 0, 1]
        }
    }

    pub fn element(&self, index: u64) -> Result<PlaneElement, PlaneError> {
        if index >= self.size() {
            return Err(PlaneError::IndexOutOfRange { index, p: self.p });
        }
        Ok(PlaneElement {
            coords: self.coords(index),
            order: self.p,
        })
    }

    pub fn index_of(&self, e: &PlaneElement) -> Result<u64, PlaneError> {
        if e.order != self.p {
            return Err(PlaneError::OrderMismatch(e.order, self.p));
        }
        let [a, b, c] = e.coords;
        let p = self.p;
        if b >= p || c >= p {
            return Err(PlaneError::NotNormalized(p));
        }
        match a {
            1 => Ok(b * p + c),
            0 if b == 1 => Ok(p * p + c),
            0 if b == 0 && c == 1 => Ok(p * p + p),
            _ => Err(PlaneError::NotNormalized(p)),
        }
    }

    fn index_of_coords(&self, v: [u64; 3]) -> u64 {
        let p = self.p;
        let lead = v.iter().position(|&x| x != 0).expect("nonzero vector");
        let inv = pow_mod(v[lead], p - 2, p);
        let n = [v[0] * inv % p, v[1] * inv % p, v[2] * inv % p];
        match lead {
            0 => n[1] * p + n[2],
            1 => p * p + n[2],
            _ => p * p + p,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = PlaneElement> + '_ {
        (0..self.size()).map(move |i| PlaneElement {
            coords: self.coords(i),
            order: self.p,
        })
    }

    /// Incidence of two elements given by index.
    pub fn incident_idx(&self, a: u64, b: u64) -> bool {
        let p = self.p;
        let x = self.coords(a);
        let y = self.coords(b);
        (x[0] * y[0] % p + x[1] * y[1] % p + x[2] * y[2] % p).is_multiple_of(p)
    }

    /// The `j`-th of the `p + 1` elements incident to `u`, `0 <= j <= p`.
    pub fn incident_nth(&self, u: u64, j: u64) -> u64 {
        let p = self.p;
        let neg = |x: u64| (p - x % p) % p;
        let [a, b, c] = self.coords(u);
        // two independent vectors orthogonal to u
        let (e1, e2) = if a == 1 {
            ([neg(b), 1, 0], [neg(c), 0, 1])
        } else if b == 1 {
            ([1, 0, 0], [0, neg(c), 1])
        } else {
            ([1, 0, 0], [0, 1, 0])
        };
        let v = if j < p {
            [
                (e1[0] + j * e2[0]) % p,
                (e1[1] + j * e2[1]) % p,
                (e1[2] + j * e2[2]) % p,
            ]
        } else {
            e2
        };
        self.index_of_coords(v)
    }

    pub fn incident_elements(&self, u: u64) -> Vec<u64> {
        (0..=self.p).map(|j| self.incident_nth(u, j)).collect()
    }

    /// `u` uniform over the plane, `v` uniform over the elements incident to `u`.
    pub fn sample_incident_pair(&self, coins: &mut dyn Coins) -> (u64, u64) {
        let u = coins.below(self.size());
        let v = self.incident_nth(u, coins.below(self.p + 1));
        (u, v)
    }
}

/// Bits needed to write any value in `0..count`.
pub fn bits_for(count: u64) -> u32 {
    if count <= 1 {
        0
    } else {
        64 - (count - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    #[test]
    fn sizes_and_primality() {
        assert_eq!(Plane::new(2).unwrap().size(), 7);
        assert_eq!(Plane::new(3).unwrap().size(), 13);
        assert_eq!(Plane::new(4), Err(PlaneError::NotPrime(4)));
        assert_eq!(Plane::new(1), Err(PlaneError::NotPrime(1)));
        assert_eq!(Plane::new(7).unwrap().index_bits(), 6);
    }

    #[test]
    fn index_bijection() {
        for p in [2, 3, 5, 7] {
            let plane = Plane::new(p).unwrap();
            for (i, e) in plane.elements().enumerate() {
                assert_eq!(plane.index_of(&e).unwrap(), i as u64);
                let lead = e.coords.iter().position(|&x| x != 0).unwrap();
                assert_eq!(e.coords[lead], 1);
            }
        }
    }

    #[test]
    fn fano_examples() {
        let plane = Plane::new(2).unwrap();
        let e = |c: [u64; 3]| PlaneElement { coords: c, order: 2 };
        assert!(e([1, 0, 0]).incident(&e([0, 1, 0])).unwrap());
        assert!(!e([1, 0, 0]).incident(&e([1, 0, 0])).unwrap());
        let u = plane.index_of(&e([1, 0, 0])).unwrap();
        let count = (0..7).filter(|&w| plane.incident_idx(u, w)).count();
        assert_eq!(count, 3);
        let other = PlaneElement { coords: [1, 0, 0], order: 3 };
        assert!(e([1, 0, 0]).incident(&other).is_err());
    }

    #[test]
    fn incident_nth_lists_the_row() {
        for p in [2, 3, 5, 7, 11] {
            let plane = Plane::new(p).unwrap();
            for u in 0..plane.size() {
                let mut listed = plane.incident_elements(u);
                listed.sort_unstable();
                let brute: Vec<u64> = (0..plane.size()).filter(|&w| plane.incident_idx(u, w)).collect();
                assert_eq!(listed, brute);
            }
        }
    }

    #[test]
    fn samples_are_incident() {
        let plane = Plane::new(5).unwrap();
        let mut s = Stream::new(1);
        for _ in 0..1000 {
            let (u, v) = plane.sample_incident_pair(&mut s);
            assert!(plane.incident_idx(u, v));
        }
    }

    #[test]
    fn bits_for_values() {
        assert_eq!(bits_for(1), 0);
        assert_eq!(bits_for(2), 1);
        assert_eq!(bits_for(7), 3);
        assert_eq!(bits_for(8), 3);
        assert_eq!(bits_for(9), 4);
        assert_eq!(bits_for(57), 6);
    }
}
