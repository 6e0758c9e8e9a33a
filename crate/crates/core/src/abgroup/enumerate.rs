//! Exhaustive hom sets between small groups, and a catalog of all finite
//! abelian groups up to a given order.

use num_integer::Integer as _;
use num_traits::{ToPrimitive, Zero};

use super::{AbGroup, GroupError, GroupHom};
use crate::arith::{self, Integer, PrimeSet, Rational};
use crate::par::Execution;

/// Hard cap on the size of an enumerated hom set.
const MAX_HOMS: usize = 1 << 24;

/// For each matrix slot, the spacing and count of admissible entries.
fn slot_ranges(g: &AbGroup, h: &AbGroup) -> Result<Vec<(Integer, usize)>, GroupError> {
    if !h.is_finite() {
        return Err(GroupError::InfiniteGroup);
    }
    if !g.ring().is_subset(h.ring()) {
        return Err(GroupError::RingNotContained {
            domain: g.ring().clone(),
            codomain: h.ring().clone(),
        });
    }
    let mut slots = Vec::new();
    for i in 0..h.num_generators() {
        let di = h.generator_order(i);
        for j in 0..g.num_generators() {
            let dj = g.generator_order(j);
            // d_j·m ≡ 0 (mod d_i) iff m is a multiple of d_i / gcd(d_i, d_j)
            let count = if dj.is_zero() { di.clone() } else { di.gcd(&dj) };
            let step = &di / &count;
            let count = count.to_usize().ok_or(GroupError::TooManyHoms)?;
            slots.push((step, count));
        }
    }
    Ok(slots)
}

/// `|Hom(g, h)|` for a finite `h`.
pub fn count_homs(g: &AbGroup, h: &AbGroup) -> Result<Integer, GroupError> {
    Ok(slot_ranges(g, h)?.iter().map(|(_, c)| Integer::from(*c)).product())
}

/// Every homomorphism `g → h`, without duplicates. `h` must be finite;
/// `g` may have free summands.
pub fn enumerate_homs(g: &AbGroup, h: &AbGroup) -> Result<Vec<GroupHom>, GroupError> {
    enumerate_homs_with(g, h, Execution::default())
}

pub fn enumerate_homs_with(g: &AbGroup, h: &AbGroup, exec: Execution) -> Result<Vec<GroupHom>, GroupError> {
    let slots = slot_ranges(g, h)?;
    let total = slots
        .iter()
        .try_fold(1usize, |acc, (_, c)| acc.checked_mul(*c))
        .filter(|&t| t <= MAX_HOMS)
        .ok_or(GroupError::TooManyHoms)?;
    let (rows, cols) = (h.num_generators(), g.num_generators());
    let homs = exec.map_range(total, |mut index| {
        let mut m = vec![vec![Rational::zero(); cols]; rows];
        for (s, (step, count)) in slots.iter().enumerate() {
            let digit = index % count;
            index /= count;
            m[s / cols.max(1)][s % cols.max(1)] = Rational::from_integer(step * Integer::from(digit));
        }
        GroupHom::new(g.clone(), h.clone(), m)
    });
    homs.into_iter().collect()
}

/// All exponent partitions of `n`, largest part first.
fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every abelian group of order at most `max_order` whose order is prime to
/// the inverted primes of `ring`, one per isomorphism class, labelled with
/// `ring`. Includes the trivial group.
pub fn catalog(max_order: u64, ring: &PrimeSet) -> Vec<AbGroup> {
    let mut out = Vec::new();
    for n in 1..=max_order {
        let Ok(f) = arith::factor_u64(n) else { continue };
        if f.keys().any(|&p| ring.contains(p)) {
            continue;
        }
        let mut choices: Vec<Vec<(u64, u32)>> = vec![vec![]];
        for (&p, &e) in &f {
            let mut next = Vec::new();
            for prefix in &choices {
                for part in partitions(e, e) {
                    let mut c = prefix.clone();
                    c.extend(part.into_iter().map(|a| (p, a)));
                    next.push(c);
                }
            }
            choices = next;
        }
        for c in choices {
            out.push(AbGroup::new(ring.clone(), 0, c).expect("primes were filtered"));
        }
    }
    out
}
