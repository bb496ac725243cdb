//! The quaternion group Q8 and quaternion-valued periodic correlation.
//!
//! All values are exact: units are a sign plus a basis tag, and correlation
//! sums are integer 4-tuples in the basis (1, i, j, k).

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    One,
    I,
    J,
    K,
}

impl Basis {
    pub const ALL: [Basis; 4] = [Basis::One, Basis::I, Basis::J, Basis::K];

    fn index(self) -> usize {
        self as usize
    }
}

/// One of the eight units `±1, ±i, ±j, ±k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuatUnit {
    negative: bool,
    basis: Basis,
}

impl QuatUnit {
    pub const ONE: QuatUnit = QuatUnit::new(false, Basis::One);
    pub const I: QuatUnit = QuatUnit::new(false, Basis::I);
    pub const J: QuatUnit = QuatUnit::new(false, Basis::J);
    pub const K: QuatUnit = QuatUnit::new(false, Basis::K);

    /// All eight units in the canonical enumeration order
    /// `1, -1, i, -i, j, -j, k, -k`.
    pub const ALL: [QuatUnit; 8] = [
        QuatUnit::new(false, Basis::One),
        QuatUnit::new(true, Basis::One),
        QuatUnit::new(false, Basis::I),
        QuatUnit::new(true, Basis::I),
        QuatUnit::new(false, Basis::J),
        QuatUnit::new(true, Basis::J),
        QuatUnit::new(false, Basis::K),
        QuatUnit::new(true, Basis::K),
    ];

    pub const fn new(negative: bool, basis: Basis) -> Self {
        Self { negative, basis }
    }

    pub fn is_negative(self) -> bool {
        self.negative
    }

    pub fn basis(self) -> Basis {
        self.basis
    }

    /// Position in [`QuatUnit::ALL`].
    pub fn code(self) -> u8 {
        (self.basis.index() as u8) * 2 + self.negative as u8
    }

    pub fn from_code(code: u8) -> Self {
        Self::ALL[code as usize & 7]
    }

    pub fn conj(self) -> Self {
        match self.basis {
            Basis::One => self,
            _ => -self,
        }
    }

    pub fn symbol(self) -> &'static str {
        ["1", "-1", "i", "-i", "j", "-j", "k", "-k"][self.code() as usize]
    }
}

impl Neg for QuatUnit {
    type Output = QuatUnit;

    fn neg(self) -> QuatUnit {
        QuatUnit::new(!self.negative, self.basis)
    }
}

impl Mul for QuatUnit {
    type Output = QuatUnit;

    fn mul(self, rhs: QuatUnit) -> QuatUnit {
        use Basis::*;
        let (sign, basis) = match (self.basis, rhs.basis) {
            (One, b) | (b, One) => (false, b),
            (I, I) | (J, J) | (K, K) => (true, One),
            (I, J) => (false, K),
            (J, I) => (true, K),
            (J, K) => (false, I),
            (K, J) => (true, I),
            (K, I) => (false, J),
            (I, K) => (true, J),
        };
        QuatUnit::new(sign ^ self.negative ^ rhs.negative, basis)
    }
}

impl fmt::Display for QuatUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for QuatUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        QuatUnit::ALL
            .into_iter()
            .find(|u| u.symbol() == t || (t.starts_with('+') && u.symbol() == &t[1..]))
            .ok_or_else(|| Error::Format(format!("unknown quaternion unit {s:?}")))
    }
}

impl Serialize for QuatUnit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for QuatUnit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Integer quaternion `a + b i + c j + d k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Quaternion(pub [i64; 4]);

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion([0; 4]);

    pub fn scalar(k: i64) -> Self {
        Quaternion([k, 0, 0, 0])
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; 4]
    }
}

impl From<QuatUnit> for Quaternion {
    fn from(u: QuatUnit) -> Self {
        let mut q = [0; 4];
        q[u.basis.index()] = if u.negative { -1 } else { 1 };
        Quaternion(q)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    fn add(mut self, rhs: Quaternion) -> Quaternion {
        self += rhs;
        self
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, rhs: Quaternion) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl AddAssign<QuatUnit> for Quaternion {
    fn add_assign(&mut self, u: QuatUnit) {
        self.0[u.basis.index()] += if u.negative { -1 } else { 1 };
    }
}

/// Which side carries the conjugate in a correlation term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `s_i · conj(s_{i+τ})`
    Right,
    /// `conj(s_i) · s_{i+τ}`
    Left,
}

impl Convention {
    pub const BOTH: [Convention; 2] = [Convention::Right, Convention::Left];

    #[inline]
    pub fn term(self, a: QuatUnit, b: QuatUnit) -> QuatUnit {
        match self {
            Convention::Right => a * b.conj(),
            Convention::Left => a.conj() * b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuaternionSequence {
    units: Vec<QuatUnit>,
}

impl QuaternionSequence {
    pub fn new(units: Vec<QuatUnit>) -> Result<Self> {
        if units.is_empty() {
            return Err(Error::Dimension(
                "quaternion sequence must be non-empty".into(),
            ));
        }
        Ok(Self { units })
    }

    pub fn parse_symbols<S: AsRef<str>>(symbols: &[S]) -> Result<Self> {
        Self::new(
            symbols
                .iter()
                .map(|s| s.as_ref().parse())
                .collect::<Result<_>>()?,
        )
    }

    pub fn units(&self) -> &[QuatUnit] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> Vec<&'static str> {
        self.units.iter().map(|u| u.symbol()).collect()
    }
}

/// Periodic autocorrelation under the given convention; cyclic indexing.
pub fn quat_autocorrelate_with(s: &QuaternionSequence, conv: Convention) -> Vec<Quaternion> {
    let u = s.units();
    let len = u.len();
    (0..len)
        .map(|tau| {
            let mut acc = Quaternion::ZERO;
            for i in 0..len {
                acc += conv.term(u[i], u[(i + tau) % len]);
            }
            acc
        })
        .collect()
}

/// Right-conjugate autocorrelation `θ(τ) = Σ_i s_i · conj(s_{i+τ})`.
pub fn quat_autocorrelate(s: &QuaternionSequence) -> Vec<Quaternion> {
    quat_autocorrelate_with(s, Convention::Right)
}

/// First off-peak shift with a nonzero correlation, if any.
pub fn first_off_peak_with(units: &[QuatUnit], conv: Convention) -> Option<usize> {
    let len = units.len();
    (1..len).find(|&tau| {
        let mut acc = Quaternion::ZERO;
        for i in 0..len {
            acc += conv.term(units[i], units[(i + tau) % len]);
        }
        !acc.is_zero()
    })
}

pub fn quat_is_perfect_with(s: &QuaternionSequence, conv: Convention) -> bool {
    first_off_peak_with(s.units(), conv).is_none()
}

pub fn quat_is_perfect(s: &QuaternionSequence) -> bool {
    quat_is_perfect_with(s, Convention::Right)
}

/// Verifies the Q8 multiplication table against its defining relations:
/// `i² = j² = k² = ijk = -1`, `ij = k = -ji`, associativity over all
/// triples, and `conj(ab) = conj(b) conj(a)` over all pairs.
pub fn quat_anticommute_check() -> bool {
    let (one, i, j, k) = (QuatUnit::ONE, QuatUnit::I, QuatUnit::J, QuatUnit::K);
    let relations = i * i == -one
        && j * j == -one
        && k * k == -one
        && i * j * k == -one
        && i * j == k
        && j * i == -k
        && j * k == i
        && k * j == -i
        && k * i == j
        && i * k == -j;
    let all = QuatUnit::ALL;
    let associative = all.iter().all(|&a| {
        all.iter()
            .all(|&b| all.iter().all(|&c| (a * b) * c == a * (b * c)))
    });
    let anti_automorphism = all
        .iter()
        .all(|&a| all.iter().all(|&b| (a * b).conj() == b.conj() * a.conj()));
    let inverses = all
        .iter()
        .all(|&a| a * a.conj() == one && one * a == a && a * one == a);
    relations && associative && anti_automorphism && inverses
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Hamilton product on integer 4-tuples; independent of the unit table.
    fn hamilton(a: [i64; 4], b: [i64; 4]) -> [i64; 4] {
        [
            a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
        ]
    }

    fn conj4(a: [i64; 4]) -> [i64; 4] {
        [a[0], -a[1], -a[2], -a[3]]
    }

    fn oracle(s: &[&str]) -> Vec<[i64; 4]> {
        let q: Vec<[i64; 4]> = s
            .iter()
            .map(|x| Quaternion::from(x.parse::<QuatUnit>().unwrap()).0)
            .collect();
        let l = q.len();
        (0..l)
            .map(|tau| {
                let mut acc = [0; 4];
                for i in 0..l {
                    let t = hamilton(q[i], conj4(q[(i + tau) % l]));
                    for c in 0..4 {
                        acc[c] += t[c];
                    }
                }
                acc
            })
            .collect()
    }

    fn seq(s: &[&str]) -> QuaternionSequence {
        QuaternionSequence::parse_symbols(s).unwrap()
    }

    #[test]
    fn table_matches_hamilton_product() {
        for a in QuatUnit::ALL {
            for b in QuatUnit::ALL {
                assert_eq!(
                    Quaternion::from(a * b).0,
                    hamilton(Quaternion::from(a).0, Quaternion::from(b).0)
                );
            }
        }
    }

    #[test]
    fn anticommutation() {
        assert_eq!(QuatUnit::I * QuatUnit::J, QuatUnit::K);
        assert_eq!(QuatUnit::J * QuatUnit::I, -QuatUnit::K);
        assert_eq!(QuatUnit::K * QuatUnit::K, -QuatUnit::ONE);
        assert!(quat_anticommute_check());
    }

    #[test]
    fn autocorrelation_examples() {
        for s in [vec!["1", "1", "1", "-1"], vec!["i", "j", "i", "-j"]] {
            let got: Vec<[i64; 4]> = quat_autocorrelate(&seq(&s)).iter().map(|q| q.0).collect();
            let want = oracle(&s);
            assert_eq!(got, want);
            assert_eq!(got[0], [4, 0, 0, 0]);
            assert!(got[1..].iter().all(|q| *q == [0; 4]));
            assert!(quat_is_perfect(&seq(&s)));
        }
        let c = seq(&["1", "1"]);
        assert_eq!(quat_autocorrelate(&c)[1], Quaternion::scalar(2));
        assert!(!quat_is_perfect(&c));
    }

    #[test]
    fn peak_is_length_under_both_conventions() {
        let s = seq(&["i", "-k", "j", "1", "-1", "k", "j"]);
        for conv in Convention::BOTH {
            assert_eq!(quat_autocorrelate_with(&s, conv)[0], Quaternion::scalar(7));
        }
    }

    #[test]
    fn symbols_round_trip() {
        for u in QuatUnit::ALL {
            assert_eq!(u.symbol().parse::<QuatUnit>().unwrap(), u);
            assert_eq!(QuatUnit::from_code(u.code()), u);
        }
        assert!("q".parse::<QuatUnit>().is_err());
        assert!(QuaternionSequence::new(vec![]).is_err());
        let s = seq(&["i", "-j"]);
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"["i","-j"]"#);
    }
}
