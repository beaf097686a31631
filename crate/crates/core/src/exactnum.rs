//! Positive integers kept in factored form.
//!
//! Every bound in the crate is a product of small prime powers, so values are
//! stored as exponent maps and only expanded to big integers for comparison
//! and printing.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Trial-division range used when factoring parsed decimals.
const FACTOR_CAP: u64 = 1 << 16;

/// A rational prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(value: u64) -> Result<Self> {
        if is_prime(value) {
            Ok(Prime(value))
        } else {
            Err(Error::NotPrime(value))
        }
    }

    /// Caller guarantees primality.
    pub(crate) const fn unchecked(value: u64) -> Self {
        Prime(value)
    }

    pub const fn get(self) -> u64 {
        self.0
    }

    pub const fn is_two(self) -> bool {
        self.0 == 2
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut k = 3u64;
    while k.saturating_mul(k) <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

/// Primes `p <= n` in increasing order.
pub fn primes_up_to(n: u64) -> Vec<Prime> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(k, _)| Prime(k as u64))
        .collect()
}

/// Full trial-division factorization of a machine integer.
pub fn factor_u64(mut n: u64) -> Vec<(Prime, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((Prime(p), e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((Prime(n), 1));
    }
    out
}

/// p-adic valuation of a machine integer; `n` must be nonzero.
pub fn valuation_u64(p: Prime, mut n: u64) -> u32 {
    debug_assert!(n != 0);
    let mut e = 0;
    while n.is_multiple_of(p.0) {
        n /= p.0;
        e += 1;
    }
    e
}

/// Legendre's formula for the exponent of `p` in `k!`.
pub fn factorial_valuation(p: Prime, k: u64) -> u64 {
    let mut total = 0;
    let mut q = k;
    while q >= p.0 {
        q /= p.0;
        total += q;
    }
    total
}

/// A positive integer as a map from primes to positive exponents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    factors: BTreeMap<Prime, u32>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn prime_power(p: Prime, e: u32) -> Self {
        let mut factors = BTreeMap::new();
        if e > 0 {
            factors.insert(p, e);
        }
        Self { factors }
    }

    /// Fails on zero.
    pub fn from_u64(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("zero has no factorization".into()));
        }
        Ok(Self {
            factors: factor_u64(n).into_iter().collect(),
        })
    }

    /// Builds from `(prime, exponent)` pairs, checking primality and merging repeats.
    pub fn from_pairs<I: IntoIterator<Item = (u64, u32)>>(pairs: I) -> Result<Self> {
        let mut out = Self::one();
        for (p, e) in pairs {
            let p = Prime::new(p)?;
            if e > 0 {
                *out.factors.entry(p).or_insert(0) += e;
            }
        }
        Ok(out)
    }

    pub fn from_biguint(n: &BigUint) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::Domain("zero has no factorization".into()));
        }
        if let Some(small) = n.to_u64() {
            if small < FACTOR_CAP * FACTOR_CAP {
                return Self::from_u64(small);
            }
        }
        let mut rest = n.clone();
        let mut factors = BTreeMap::new();
        for p in primes_up_to(FACTOR_CAP) {
            let bp = BigUint::from(p.0);
            let mut e = 0;
            loop {
                let (q, r) = rest.div_rem(&bp);
                if !r.is_zero() {
                    break;
                }
                rest = q;
                e += 1;
            }
            if e > 0 {
                factors.insert(p, e);
            }
            if rest.is_one() {
                break;
            }
        }
        if !rest.is_one() {
            match rest.to_u64() {
                Some(r) if r < FACTOR_CAP * FACTOR_CAP => {
                    factors.insert(Prime(r), 1);
                }
                _ => return Err(Error::FactorLimit(n.to_string())),
            }
        }
        Ok(Self { factors })
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Prime, u32)> + '_ {
        self.factors.iter().map(|(&p, &e)| (p, e))
    }

    pub fn valuation(&self, p: Prime) -> u32 {
        self.factors.get(&p).copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            *factors.entry(p).or_insert(0) += e;
        }
        Self { factors }
    }

    pub fn div_exact(&self, other: &Self) -> Result<Self> {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            let have = factors.get(&p).copied().unwrap_or(0);
            if have < e {
                return Err(Error::NonDivisible);
            }
            if have == e {
                factors.remove(&p);
            } else {
                factors.insert(p, have - e);
            }
        }
        Ok(Self { factors })
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.iter().all(|(p, e)| other.valuation(p) >= e)
    }

    pub fn pow(&self, k: u32) -> Self {
        if k == 0 {
            return Self::one();
        }
        Self {
            factors: self.factors.iter().map(|(&p, &e)| (p, e * k)).collect(),
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, (p, &e)| {
            acc * BigUint::from(p.0).pow(e)
        })
    }

    pub fn to_u128(&self) -> Option<u128> {
        self.to_biguint().to_u128()
    }

    /// Decimal expansion, optionally grouped in threes with thin spaces.
    pub fn to_decimal(&self, grouped: bool) -> String {
        let plain = self.to_biguint().to_string();
        if grouped {
            group_digits(&plain, '\u{2009}')
        } else {
            plain
        }
    }

    /// Exponent map keyed by decimal prime strings, as used in JSON output.
    pub fn to_string_map(&self) -> BTreeMap<String, u32> {
        self.iter().map(|(p, e)| (p.to_string(), e)).collect()
    }

    pub fn from_string_map(map: &BTreeMap<String, u32>) -> Result<Self> {
        let mut pairs = Vec::with_capacity(map.len());
        for (k, &e) in map {
            let p: u64 = k
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime key {k:?}")))?;
            pairs.push((p, e));
        }
        Self::from_pairs(pairs)
    }
}

/// Inserts `sep` between groups of three digits, counting from the right.
pub fn group_digits(digits: &str, sep: char) -> String {
    let n = digits.len();
    let mut out = String::with_capacity(n + n / 3 * sep.len_utf8());
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (n - i).is_multiple_of(3) {
            out.push(sep);
        }
        out.push(c);
    }
    out
}

impl Ord for FactoredInteger {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Strip the common part, then compare the two residuals exactly.
        let mut left = BigUint::one();
        let mut right = BigUint::one();
        let primes: std::collections::BTreeSet<Prime> = self
            .factors
            .keys()
            .chain(other.factors.keys())
            .copied()
            .collect();
        for p in primes {
            let a = self.valuation(p);
            let b = other.valuation(p);
            let base = BigUint::from(p.0);
            if a > b {
                left *= base.pow(a - b);
            } else if b > a {
                right *= base.pow(b - a);
            }
        }
        left.cmp(&right)
    }
}

impl PartialOrd for FactoredInteger {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (p, e) in self.iter() {
            if !first {
                write!(f, "·")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for FactoredInteger {
    type Err = Error;

    /// Accepts a decimal, optionally grouped with spaces, thin spaces or underscores.
    fn from_str(s: &str) -> Result<Self> {
        let digits: String = s
            .chars()
            .filter(|c| !matches!(c, ' ' | '\u{2009}' | '_' | ','))
            .collect();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("not a decimal integer: {s:?}")));
        }
        let n = BigUint::parse_bytes(digits.as_bytes(), 10)
            .ok_or_else(|| Error::Parse(format!("not a decimal integer: {s:?}")))?;
        Self::from_biguint(&n)
    }
}

impl Serialize for FactoredInteger {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.factors.len()))?;
        for (p, e) in self.iter() {
            map.serialize_entry(&p.to_string(), &e)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for FactoredInteger {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, u32>::deserialize(deserializer)?;
        Self::from_string_map(&map).map_err(serde::de::Error::custom)
    }
}
