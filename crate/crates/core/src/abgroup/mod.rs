//! Finitely generated abelian groups over a localized ring Z_T, stored in
//! primary-decomposition form, and the homomorphisms between them.
//!
//! Generators of an [`AbGroup`] are ordered free generators first, then one
//! generator per prime-power cyclic summand in the order of
//! [`AbGroup::torsion`]. Elements are coordinate vectors in that basis.

mod enumerate;
mod hom;
mod presentation;
pub mod snf;

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{self, is_prime, ArithError, Integer, PrimeSet, Rational};

pub use enumerate::{catalog, count_homs, enumerate_homs, enumerate_homs_with};
pub use hom::{
    cokernel, compose, image, is_isomorphism, kernel, kernel_generators, multiplication_map, power_map, quotient,
    GroupHom, Quotient, Subgroup,
};
pub use presentation::group_from_presentation;
pub use snf::{integer_kernel, smith_normal_form, IntMatrix, SmithForm};

pub type Element = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("torsion prime {0} is inverted in the ring {1}")]
    TorsionPrimeInverted(u64, PrimeSet),
    #[error("torsion exponent must be positive")]
    ZeroExponent,
    #[error("ring {domain} of the domain is not contained in ring {codomain} of the codomain")]
    RingNotContained { domain: PrimeSet, codomain: PrimeSet },
    #[error("matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    Shape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("entry ({row}, {col}) is not an element of the codomain ring")]
    EntryNotInRing { row: usize, col: usize },
    #[error("entry ({row}, {col}) does not respect the order of generator {col}")]
    NotWellDefined { row: usize, col: usize },
    #[error("codomain of the inner map differs from the domain of the outer map")]
    NotComposable,
    #[error("element has {got} coordinates, the group has {expected} generators")]
    ElementLength { got: usize, expected: usize },
    #[error("coordinate {0} is not in the ring or not reducible modulo its order")]
    BadCoordinate(usize),
    #[error("hom enumeration needs a finite codomain")]
    InfiniteGroup,
    #[error("the hom set is too large to enumerate")]
    TooManyHoms,
    #[error("relation matrix has {got} columns, expected {expected}")]
    RelationWidth { got: usize, expected: usize },
}

/// A cyclic summand Z/q^a with q prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimePower {
    pub prime: u64,
    pub exponent: u32,
}

impl PrimePower {
    pub fn order(&self) -> Integer {
        Integer::from(self.prime).pow(self.exponent)
    }
}

/// `Z_T^rank ⊕ ⊕ Z/q^a`, canonical per isomorphism class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbGroup {
    ring: PrimeSet,
    rank: usize,
    torsion: Vec<PrimePower>,
}

impl AbGroup {
    pub fn new(
        ring: PrimeSet,
        rank: usize,
        torsion: impl IntoIterator<Item = (u64, u32)>,
    ) -> Result<Self, GroupError> {
        let mut parts = Vec::new();
        for (q, a) in torsion {
            if !is_prime(q) {
                return Err(ArithError::NotPrime(q).into());
            }
            if a == 0 {
                return Err(GroupError::ZeroExponent);
            }
            if ring.contains(q) {
                return Err(GroupError::TorsionPrimeInverted(q, ring));
            }
            parts.push(PrimePower { prime: q, exponent: a });
        }
        parts.sort();
        Ok(AbGroup {
            ring,
            rank,
            torsion: parts,
        })
    }

    pub fn trivial(ring: PrimeSet) -> Self {
        AbGroup {
            ring,
            rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize, ring: PrimeSet) -> Self {
        AbGroup {
            ring,
            rank,
            torsion: Vec::new(),
        }
    }

    /// Z/n over Z, with Z/0 = Z.
    pub fn cyclic(n: u64) -> Result<Self, GroupError> {
        Self::from_invariants(0, &[n], PrimeSet::none())
    }

    /// `Z_T^rank ⊕ Z/n_1 ⊕ …`, dropping cyclic factors whose primes are units.
    /// A factor `n = 0` adds a free summand.
    pub fn from_invariants(rank: usize, cyclic: &[u64], ring: PrimeSet) -> Result<Self, GroupError> {
        let mut rank = rank;
        let mut torsion = Vec::new();
        for &n in cyclic {
            if n == 0 {
                rank += 1;
                continue;
            }
            for (q, a) in arith::factor_u64(n)? {
                if !ring.contains(q) {
                    torsion.push((q, a));
                }
            }
        }
        Self::new(ring, rank, torsion)
    }

    pub fn ring(&self) -> &PrimeSet {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[PrimePower] {
        &self.torsion
    }

    pub fn num_generators(&self) -> usize {
        self.rank + self.torsion.len()
    }

    /// Order of generator `j`; zero for free generators.
    pub fn generator_order(&self, j: usize) -> Integer {
        if j < self.rank {
            Integer::zero()
        } else {
            self.torsion[j - self.rank].order()
        }
    }

    pub fn generator_orders(&self) -> Vec<Integer> {
        (0..self.num_generators()).map(|j| self.generator_order(j)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn order(&self) -> Option<BigUint> {
        self.is_finite().then(|| {
            self.torsion
                .iter()
                .map(|t| BigUint::from(t.prime).pow(t.exponent))
                .product()
        })
    }

    /// Distinct primes carrying torsion, increasing.
    pub fn torsion_primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.torsion.iter().map(|t| t.prime).collect();
        ps.dedup();
        ps
    }

    /// Same group data over a different ring label; fails if a torsion prime
    /// would become a unit.
    pub fn with_ring(&self, ring: PrimeSet) -> Result<Self, GroupError> {
        Self::new(
            ring,
            self.rank,
            self.torsion.iter().map(|t| (t.prime, t.exponent)),
        )
    }

    /// `self ⊗ Z_R` for a larger ring `R`: enlarges the ring and drops the
    /// torsion summands whose prime becomes a unit. Also returns, for each
    /// old generator, its index in the new group (None if dropped).
    pub fn base_change(&self, ring: &PrimeSet) -> Result<(AbGroup, Vec<Option<usize>>), GroupError> {
        if !self.ring.is_subset(ring) {
            return Err(GroupError::RingNotContained {
                domain: self.ring.clone(),
                codomain: ring.clone(),
            });
        }
        let mut index = (0..self.rank).map(Some).collect::<Vec<_>>();
        let mut kept = Vec::new();
        for t in &self.torsion {
            if ring.contains(t.prime) {
                index.push(None);
            } else {
                index.push(Some(self.rank + kept.len()));
                kept.push(*t);
            }
        }
        let g = AbGroup {
            ring: ring.clone(),
            rank: self.rank,
            torsion: kept,
        };
        Ok((g, index))
    }

    pub fn zero_element(&self) -> Element {
        vec![Rational::zero(); self.num_generators()]
    }

    /// The `j`-th canonical generator as an element.
    pub fn basis_element(&self, j: usize) -> Element {
        let mut e = self.zero_element();
        e[j] = Rational::one();
        e
    }

    /// Canonical representative: free coordinates checked to lie in Z_T,
    /// torsion coordinates reduced into `[0, order)`.
    pub fn reduce_element(&self, x: &[Rational]) -> Result<Element, GroupError> {
        if x.len() != self.num_generators() {
            return Err(GroupError::ElementLength {
                got: x.len(),
                expected: self.num_generators(),
            });
        }
        x.iter()
            .enumerate()
            .map(|(j, c)| {
                if j < self.rank {
                    if self.ring.admits(c) {
                        Ok(c.clone())
                    } else {
                        Err(GroupError::BadCoordinate(j))
                    }
                } else {
                    arith::residue(c, &self.generator_order(j))
                        .map(Rational::from_integer)
                        .ok_or(GroupError::BadCoordinate(j))
                }
            })
            .collect()
    }

    pub fn add(&self, x: &[Rational], y: &[Rational]) -> Result<Element, GroupError> {
        let s: Vec<Rational> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        if x.len() != y.len() {
            return Err(GroupError::ElementLength {
                got: y.len(),
                expected: x.len(),
            });
        }
        self.reduce_element(&s)
    }

    pub fn scale(&self, k: &Rational, x: &[Rational]) -> Result<Element, GroupError> {
        let s: Vec<Rational> = x.iter().map(|a| a * k).collect();
        self.reduce_element(&s)
    }

    /// Every element of a finite group, in lexicographic coordinate order.
    pub fn elements(&self) -> Option<Vec<Element>> {
        if !self.is_finite() {
            return None;
        }
        let mut out: Vec<Element> = vec![Vec::new()];
        for t in &self.torsion {
            let d = t.order();
            let mut next = Vec::new();
            for prefix in &out {
                let mut c = Integer::zero();
                while c < d {
                    let mut e = prefix.clone();
                    e.push(Rational::from_integer(c.clone()));
                    next.push(e);
                    c += 1;
                }
            }
            out = next;
        }
        Some(out)
    }

    /// Parseable ASCII form, e.g. `Z[1/2] + Z/4 + Z/3` or `Z/3 over away:2`.
    pub fn expr(&self) -> String {
        let mut parts = Vec::new();
        if self.rank > 0 {
            let base = free_symbol(&self.ring);
            parts.push(if self.rank == 1 {
                base
            } else {
                format!("{base}^{}", self.rank)
            });
        }
        for t in &self.torsion {
            parts.push(format!("Z/{}", t.order()));
        }
        let body = if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        };
        if self.rank == 0 && !self.ring.is_empty() {
            format!("{body} over {}", self.ring)
        } else {
            body
        }
    }

    /// Invariant factors of the torsion part, `n_1 | n_2 | …`.
    pub fn invariant_factors(&self) -> Vec<Integer> {
        let mut by_prime: std::collections::BTreeMap<u64, Vec<u32>> = Default::default();
        for t in &self.torsion {
            by_prime.entry(t.prime).or_default().push(t.exponent);
        }
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![Integer::one(); len];
        for (q, mut exps) in by_prime {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            for (i, a) in exps.into_iter().enumerate() {
                factors[len - 1 - i] *= Integer::from(q).pow(a);
            }
        }
        factors
    }
}

/// Symbol for the ring Z_T as a free summand.
pub fn free_symbol(ring: &PrimeSet) -> String {
    match ring {
        PrimeSet::Finite(ps) if ps.is_empty() => "Z".to_string(),
        PrimeSet::Finite(ps) => {
            let prod: BigUint = ps.iter().map(|&p| BigUint::from(p)).product();
            format!("Z[1/{prod}]")
        }
        PrimeSet::Cofinite(ex) if ex.is_empty() => "Q".to_string(),
        PrimeSet::Cofinite(ex) => format!(
            "Z_({})",
            ex.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        ),
    }
}

impl fmt::Display for AbGroup {
    /// Invariant-factor form with `⊕`, e.g. `Z[1/2] ⊕ Z/12`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.rank > 0 {
            let base = free_symbol(&self.ring);
            parts.push(if self.rank == 1 {
                base
            } else {
                format!("{base}^{}", self.rank)
            });
        }
        for n in self.invariant_factors() {
            parts.push(format!("Z/{n}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}
