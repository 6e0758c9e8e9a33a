//! Exact integers and rationals, prime factorization, valuations, sets of
//! inverted primes and the generator families that realize them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision integer.
pub type Integer = BigInt;

/// Arbitrary-precision rational, always stored reduced with a positive
/// denominator.
pub type Rational = BigRational;

/// Trial division stops here; any cofactor that still has an undetermined
/// factorization past this bound is reported as too large.
const TRIAL_DIVISION_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("cannot factor zero")]
    FactorZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("zero is never a unit")]
    ZeroUnit,
    #[error("a generator family needs at least one generator")]
    EmptyFamily,
    #[error("generator 0 is not allowed in a family")]
    ZeroGenerator,
    #[error("index {index} out of range for a family of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("{0} has a prime factor beyond the trial division bound")]
    TooLarge(BigUint),
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Factors `n ≥ 1` into primes by trial division.
pub fn prime_factorization(n: &BigUint) -> Result<BTreeMap<u64, u32>, ArithError> {
    if n.is_zero() {
        return Err(ArithError::FactorZero);
    }
    if let Some(small) = n.to_u64() {
        return factor_small(small);
    }
    let mut rest = n.clone();
    let mut out = BTreeMap::new();
    let mut d = 2u64;
    while rest > BigUint::one() {
        let dd = BigUint::from(d);
        if &dd * &dd > rest {
            // remaining cofactor is prime
            let p = rest.to_u64().ok_or_else(|| ArithError::TooLarge(n.clone()))?;
            *out.entry(p).or_insert(0) += 1;
            break;
        }
        if d > TRIAL_DIVISION_LIMIT {
            return Err(ArithError::TooLarge(n.clone()));
        }
        while (&rest % &dd).is_zero() {
            rest /= &dd;
            *out.entry(d).or_insert(0) += 1;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    Ok(out)
}

fn factor_small(mut n: u64) -> Result<BTreeMap<u64, u32>, ArithError> {
    let mut out = BTreeMap::new();
    let mut d = 2u64;
    while n > 1 {
        if d.checked_mul(d).is_none_or(|dd| dd > n) {
            *out.entry(n).or_insert(0) += 1;
            break;
        }
        if d > TRIAL_DIVISION_LIMIT {
            return Err(ArithError::TooLarge(n.into()));
        }
        while n % d == 0 {
            n /= d;
            *out.entry(d).or_insert(0) += 1;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    Ok(out)
}

pub fn factor_u64(n: u64) -> Result<BTreeMap<u64, u32>, ArithError> {
    if n == 0 {
        return Err(ArithError::FactorZero);
    }
    factor_small(n)
}

/// Factors the absolute value of a nonzero integer.
pub fn factor_integer(n: &Integer) -> Result<BTreeMap<u64, u32>, ArithError> {
    prime_factorization(n.magnitude())
}

fn int_valuation(p: u64, n: &BigUint) -> u32 {
    let p = BigUint::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while !n.is_zero() && (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

/// The exponent of `p` in the nonzero rational `q`.
pub fn valuation(p: u64, q: &Rational) -> Result<i64, ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    if q.is_zero() {
        return Err(ArithError::ZeroValuation);
    }
    let num = int_valuation(p, q.numer().magnitude()) as i64;
    let den = int_valuation(p, q.denom().magnitude()) as i64;
    Ok(num - den)
}

pub fn integer_valuation(p: u64, n: &Integer) -> u32 {
    int_valuation(p, n.magnitude())
}

/// Removes every factor of `p` from `n`.
fn strip(n: &BigUint, p: u64) -> BigUint {
    let p = BigUint::from(p);
    let mut n = n.clone();
    while !n.is_zero() && (&n % &p).is_zero() {
        n /= &p;
    }
    n
}

pub fn rational_from_int(n: impl Into<Integer>) -> Rational {
    Rational::from_integer(n.into())
}

/// Parses `"a"` or `"a/b"` into a reduced rational.
pub fn parse_rational(text: &str) -> Result<Rational, ArithError> {
    let err = || ArithError::Parse {
        what: "rational",
        input: text.to_string(),
    };
    let t = text.trim();
    match t.split_once('/') {
        None => Ok(Rational::from_integer(t.parse::<Integer>().map_err(|_| err())?)),
        Some((n, d)) => {
            let n = n.trim().parse::<Integer>().map_err(|_| err())?;
            let d = d.trim().parse::<Integer>().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// Canonical text of a rational: `"n"` for integers, `"n/d"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Reduces a rational modulo `m > 0`, provided its denominator is invertible
/// modulo `m`. Returns a residue in `[0, m)`.
pub fn residue(q: &Rational, m: &Integer) -> Option<Integer> {
    if q.is_integer() {
        return Some(q.numer().mod_floor(m));
    }
    let den = q.denom().mod_floor(m);
    let inv = mod_inverse(&den, m)?;
    Some((q.numer() * inv).mod_floor(m))
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &Integer, m: &Integer) -> Option<Integer> {
    if m.is_one() {
        return Some(Integer::zero());
    }
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// A set of inverted primes: either finitely many, or all but finitely many.
///
/// `Finite([])` inverts nothing (the ring is Z); `Cofinite([])` inverts every
/// prime (the ring is Q); `Cofinite([p])` is the ring Z_(p) of localization
/// at `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimeSet {
    Finite(Vec<u64>),
    Cofinite(Vec<u64>),
}

fn normalize_primes(ps: impl IntoIterator<Item = u64>) -> Result<Vec<u64>, ArithError> {
    let mut v: Vec<u64> = ps.into_iter().collect();
    if let Some(&bad) = v.iter().find(|&&p| !is_prime(p)) {
        return Err(ArithError::NotPrime(bad));
    }
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

impl PrimeSet {
    pub fn finite(ps: impl IntoIterator<Item = u64>) -> Result<Self, ArithError> {
        Ok(PrimeSet::Finite(normalize_primes(ps)?))
    }

    pub fn cofinite(excluded: impl IntoIterator<Item = u64>) -> Result<Self, ArithError> {
        Ok(PrimeSet::Cofinite(normalize_primes(excluded)?))
    }

    /// Nothing inverted.
    pub fn none() -> Self {
        PrimeSet::Finite(Vec::new())
    }

    /// Every prime inverted.
    pub fn all() -> Self {
        PrimeSet::Cofinite(Vec::new())
    }

    /// Every prime except `p` inverted.
    pub fn at(p: u64) -> Result<Self, ArithError> {
        Self::cofinite([p])
    }

    pub fn contains(&self, p: u64) -> bool {
        match self {
            PrimeSet::Finite(ps) => ps.binary_search(&p).is_ok(),
            PrimeSet::Cofinite(ex) => is_prime(p) && ex.binary_search(&p).is_err(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, PrimeSet::Finite(ps) if ps.is_empty())
    }

    pub fn is_subset(&self, other: &PrimeSet) -> bool {
        use PrimeSet::*;
        match (self, other) {
            (Finite(a), _) => a.iter().all(|&p| other.contains(p)),
            (Cofinite(_), Finite(_)) => false,
            (Cofinite(ea), Cofinite(eb)) => eb.iter().all(|p| ea.binary_search(p).is_ok()),
        }
    }

    pub fn union(&self, other: &PrimeSet) -> PrimeSet {
        use PrimeSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => {
                let mut v: Vec<u64> = a.iter().chain(b).copied().collect();
                v.sort_unstable();
                v.dedup();
                Finite(v)
            }
            (Finite(a), Cofinite(e)) | (Cofinite(e), Finite(a)) => {
                Cofinite(e.iter().copied().filter(|p| a.binary_search(p).is_err()).collect())
            }
            (Cofinite(ea), Cofinite(eb)) => {
                Cofinite(ea.iter().copied().filter(|p| eb.binary_search(p).is_ok()).collect())
            }
        }
    }

    /// Deletes every prime of this set from `n`, leaving the part of `n`
    /// that is not a unit in Z_T.
    pub fn non_unit_part(&self, n: &BigUint) -> Result<BigUint, ArithError> {
        match self {
            PrimeSet::Finite(ps) => Ok(ps.iter().fold(n.clone(), |acc, &p| strip(&acc, p))),
            PrimeSet::Cofinite(ex) => {
                if n.is_zero() {
                    return Ok(n.clone());
                }
                let mut out = BigUint::one();
                for &p in ex {
                    let v = int_valuation(p, n);
                    out *= BigUint::from(p).pow(v);
                }
                Ok(out)
            }
        }
    }

    /// True iff the nonzero rational `q` is a unit of Z_T.
    pub fn is_unit(&self, q: &Rational) -> Result<bool, ArithError> {
        if q.is_zero() {
            return Err(ArithError::ZeroUnit);
        }
        Ok(self.non_unit_part(q.numer().magnitude())?.is_one()
            && self.non_unit_part(q.denom().magnitude())?.is_one())
    }

    /// True iff `q` lies in Z_T, i.e. its denominator is a unit.
    pub fn admits(&self, q: &Rational) -> bool {
        self.non_unit_part(q.denom().magnitude())
            .map(|d| d.is_one())
            .unwrap_or(false)
    }
}

pub fn is_unit(q: &Rational, ring: &PrimeSet) -> Result<bool, ArithError> {
    ring.is_unit(q)
}

fn join(ps: &[u64]) -> String {
    ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for PrimeSet {
    /// The text grammar: `none`, `away:2,3`, `at:5`; `all` for every prime.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeSet::Finite(ps) if ps.is_empty() => write!(f, "none"),
            PrimeSet::Finite(ps) => write!(f, "away:{}", join(ps)),
            PrimeSet::Cofinite(ex) if ex.is_empty() => write!(f, "all"),
            PrimeSet::Cofinite(ex) => write!(f, "at:{}", join(ex)),
        }
    }
}

fn parse_list(text: &str, what: &'static str) -> Result<Vec<u64>, ArithError> {
    text.split(',')
        .map(|s| {
            s.trim().parse::<u64>().map_err(|_| ArithError::Parse {
                what,
                input: text.to_string(),
            })
        })
        .collect()
}

impl FromStr for PrimeSet {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "none" {
            return Ok(PrimeSet::none());
        }
        if s == "all" {
            return Ok(PrimeSet::all());
        }
        if let Some(rest) = s.strip_prefix("away:") {
            return PrimeSet::finite(parse_list(rest, "prime set")?);
        }
        if let Some(rest) = s.strip_prefix("at:") {
            return PrimeSet::cofinite(parse_list(rest, "prime set")?);
        }
        Err(ArithError::Parse {
            what: "prime set",
            input: s.to_string(),
        })
    }
}

/// A finite family of positive integers whose power maps get inverted.
///
/// The family is read as a sequence `S(0), S(1), …` that continues with 1
/// after the listed generators, so the running products
/// `s(n) = S(0)·…·S(n)` stay constant once the list is exhausted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SFamily {
    generators: Vec<u64>,
}

impl SFamily {
    pub fn new(generators: Vec<u64>) -> Result<Self, ArithError> {
        if generators.is_empty() {
            return Err(ArithError::EmptyFamily);
        }
        if generators.contains(&0) {
            return Err(ArithError::ZeroGenerator);
        }
        Ok(SFamily { generators })
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `s(n)`, the product of the first `n + 1` generators.
    pub fn s_product(&self, n: usize) -> Result<BigUint, ArithError> {
        if n >= self.generators.len() {
            return Err(ArithError::IndexOutOfRange {
                index: n,
                len: self.generators.len(),
            });
        }
        Ok(self.generators[..=n].iter().map(|&k| BigUint::from(k)).product())
    }

    /// `s(n)` for any `n`, with the sequence padded by ones.
    pub fn running_product(&self, n: usize) -> BigUint {
        let end = n.min(self.generators.len() - 1);
        self.generators[..=end].iter().map(|&k| BigUint::from(k)).product()
    }

    /// The family whose running products are `s(1), s(2), …`, i.e. the
    /// telescope with its first stage dropped.
    pub fn shifted(&self) -> SFamily {
        let g = &self.generators;
        let generators = if g.len() == 1 {
            g.clone()
        } else {
            std::iter::once(g[0] * g[1]).chain(g[2..].iter().copied()).collect()
        };
        SFamily { generators }
    }

    /// Primes dividing at least one generator.
    pub fn inverted_primes(&self) -> PrimeSet {
        let mut ps = Vec::new();
        for &k in &self.generators {
            // generators are u64 so trial division always finishes
            if let Ok(f) = factor_u64(k) {
                ps.extend(f.keys().copied());
            }
        }
        ps.sort_unstable();
        ps.dedup();
        PrimeSet::Finite(ps)
    }
}

pub fn s_product(family: &SFamily, n: usize) -> Result<BigUint, ArithError> {
    family.s_product(n)
}

pub fn inverted_primes(family: &SFamily) -> PrimeSet {
    family.inverted_primes()
}

impl fmt::Display for SFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", join(&self.generators))
    }
}

impl FromStr for SFamily {
    type Err = ArithError;

    /// Accepts `S=2,3,2` or the bare list `2,3,2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let body = s.strip_prefix("S=").unwrap_or(s);
        SFamily::new(parse_list(body, "family")?)
    }
}

/// What gets inverted by a localization: an explicit family of power maps or
/// a set of primes (needed for localization at a prime, which inverts
/// infinitely many).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Localizer {
    Family(SFamily),
    Primes(PrimeSet),
}

impl Localizer {
    pub fn family(generators: impl Into<Vec<u64>>) -> Result<Self, ArithError> {
        Ok(Localizer::Family(SFamily::new(generators.into())?))
    }

    pub fn at(p: u64) -> Result<Self, ArithError> {
        Ok(Localizer::Primes(PrimeSet::at(p)?))
    }

    pub fn primes(&self) -> PrimeSet {
        match self {
            Localizer::Family(s) => s.inverted_primes(),
            Localizer::Primes(t) => t.clone(),
        }
    }

    /// True iff `n` is annihilated after localization, i.e. every prime
    /// factor of `n` is inverted.
    pub fn inverts(&self, n: &BigUint) -> bool {
        !n.is_zero()
            && self
                .primes()
                .non_unit_part(n)
                .map(|r| r.is_one())
                .unwrap_or(false)
    }
}

impl From<SFamily> for Localizer {
    fn from(s: SFamily) -> Self {
        Localizer::Family(s)
    }
}

impl From<PrimeSet> for Localizer {
    fn from(t: PrimeSet) -> Self {
        Localizer::Primes(t)
    }
}

impl fmt::Display for Localizer {
    /// Short label used in reports: `away 2,3` or `at 5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Localizer::Family(s) => write!(f, "away {s}"),
            Localizer::Primes(PrimeSet::Finite(ps)) if ps.is_empty() => write!(f, "away none"),
            Localizer::Primes(PrimeSet::Finite(ps)) => write!(f, "away {}", join(ps)),
            Localizer::Primes(PrimeSet::Cofinite(ex)) if ex.is_empty() => write!(f, "away all"),
            Localizer::Primes(PrimeSet::Cofinite(ex)) => write!(f, "at {}", join(ex)),
        }
    }
}

/// Absolute value as an unsigned integer.
pub fn magnitude(n: &Integer) -> BigUint {
    n.abs().to_biguint().unwrap_or_default()
}
