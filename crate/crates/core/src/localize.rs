//! Localization of abelian groups away from a family of power maps.
//!
//! [`localize_group`] is the direct formula: enlarge the ring and delete
//! the torsion summands whose prime becomes invertible. [`telescope_colimit`]
//! computes the same group from the sequential colimit
//! `G → G → G → …` along multiplication by the running products `s(n)`,
//! using explicit kernels and cokernels, and serves as its independent check.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::abgroup::{
    self, cokernel, is_isomorphism, kernel, kernel_generators, multiplication_map, quotient, AbGroup, Element,
    GroupError, GroupHom, PrimePower,
};
use crate::arith::{self, integer_valuation, ArithError, Integer, Localizer, PrimeSet, Rational, SFamily};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalizeError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("a telescope needs finitely many inverted primes, got {0}")]
    CofiniteTelescope(PrimeSet),
    #[error("the telescope did not stabilize at the predicted stage {0}")]
    Unstable(usize),
    #[error("{group} is not uniquely {k}-divisible")]
    NotUniquelyDivisible { group: String, k: u64 },
    #[error("element has no {n}-th root")]
    NoRoot { n: u64 },
    #[error("{n}-th roots are not unique: the group has {prime}-torsion")]
    RootNotUnique { n: u64, prime: u64 },
}

/// Which torsion summands a localization deleted and how the ring changed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizationWitness {
    pub deleted_torsion: Vec<PrimePower>,
    pub ring_before: PrimeSet,
    pub ring_after: PrimeSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizationResult {
    pub localized: AbGroup,
    /// The unit `G → G_S`.
    pub unit: GroupHom,
    pub witness: LocalizationWitness,
}

pub fn localize_group(g: &AbGroup, s: &Localizer) -> Result<LocalizationResult, LocalizeError> {
    let ring = g.ring().union(&s.primes());
    let (localized, index) = g.base_change(&ring)?;
    let mut m = vec![vec![Rational::zero(); g.num_generators()]; localized.num_generators()];
    let mut deleted = Vec::new();
    for (j, target) in index.iter().enumerate() {
        match target {
            Some(i) => m[*i][j] = Rational::one(),
            None => deleted.push(g.torsion()[j - g.rank()]),
        }
    }
    let unit = GroupHom::new(g.clone(), localized.clone(), m)?;
    Ok(LocalizationResult {
        localized,
        unit,
        witness: LocalizationWitness {
            deleted_torsion: deleted,
            ring_before: g.ring().clone(),
            ring_after: ring,
        },
    })
}

/// One stage of a reduced telescope: the group reached so far, the running
/// product applied next, and the map to the following stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TelescopeStage {
    pub group: AbGroup,
    pub factor: BigUint,
    /// Surjection onto `group / ker(factor)`, which is `factor · group`.
    pub transition: GroupHom,
}

/// Trace of the colimit of `G →s(0) G →s(1) …`.
///
/// Stage `n` holds the image of `G` in the `n`-th copy, so every transition
/// is surjective and its kernel is the torsion killed at that step. From
/// `stabilization_index` on the transitions are isomorphisms; the free part
/// becomes free over the enlarged ring in the colimit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TelescopeTrace {
    pub stages: Vec<TelescopeStage>,
    pub stabilization_index: usize,
    pub colimit: AbGroup,
}

fn telescope_family(s: &Localizer) -> Result<SFamily, LocalizeError> {
    match s {
        Localizer::Family(f) => Ok(f.clone()),
        Localizer::Primes(PrimeSet::Finite(ps)) if ps.is_empty() => Ok(SFamily::new(vec![1])?),
        Localizer::Primes(PrimeSet::Finite(ps)) => Ok(SFamily::new(ps.clone())?),
        Localizer::Primes(t) => Err(LocalizeError::CofiniteTelescope(t.clone())),
    }
}

/// Number of telescope steps after which every torsion summand at an
/// inverted prime has died: the least `n` with `v_q(s(0)⋯s(n-1)) ≥ a` for
/// each summand `Z/q^a`.
pub fn stabilization_index(g: &AbGroup, family: &SFamily) -> usize {
    let inverted = family.inverted_primes();
    g.torsion()
        .iter()
        .filter(|t| inverted.contains(t.prime))
        .map(|t| {
            let mut reached = 0u64;
            let mut n = 0usize;
            while reached < u64::from(t.exponent) {
                let s = Integer::from(family.running_product(n));
                reached += u64::from(integer_valuation(t.prime, &s));
                n += 1;
            }
            n
        })
        .max()
        .unwrap_or(0)
}

pub fn telescope_colimit(g: &AbGroup, s: &Localizer) -> Result<TelescopeTrace, LocalizeError> {
    let family = telescope_family(s)?;
    let inverted = family.inverted_primes();
    let n_stable = stabilization_index(g, &family);

    let mut stages = Vec::with_capacity(n_stable + 1);
    let mut current = g.clone();
    for n in 0..=n_stable {
        let factor = family.running_product(n);
        let mult = multiplication_map(&current, &Integer::from(factor.clone()));
        let next = quotient(&current, &kernel_generators(&mult))?;
        stages.push(TelescopeStage {
            group: current,
            factor,
            transition: next.projection,
        });
        current = next.group;
    }

    let last = stages.last().expect("at least one stage");
    if !is_isomorphism(&last.transition)? || last.group.torsion_primes().iter().any(|&q| inverted.contains(q)) {
        return Err(LocalizeError::Unstable(n_stable));
    }
    let (colimit, _) = last.group.base_change(&g.ring().union(&inverted))?;
    Ok(TelescopeTrace {
        stages,
        stabilization_index: n_stable,
        colimit,
    })
}

/// Multiplication by `k` is a bijection on `g`.
pub fn is_uniquely_divisible(g: &AbGroup, k: u64) -> bool {
    if k == 0 {
        return g.is_trivial();
    }
    let Ok(primes) = arith::factor_u64(k) else {
        return false;
    };
    let torsion = g.torsion_primes();
    primes
        .keys()
        .all(|&p| (g.is_finite() || g.ring().contains(p)) && !torsion.contains(&p))
}

/// Every inverted prime acts bijectively on `g`: the free part must already
/// be a module over the enlarged ring and no torsion may sit at an inverted
/// prime. For a family this is the conjunction over its generators.
pub fn is_uniquely_s_divisible(g: &AbGroup, s: &Localizer) -> bool {
    let inverted = s.primes();
    (g.is_finite() || inverted.is_subset(g.ring())) && g.torsion_primes().iter().all(|&q| !inverted.contains(q))
}

/// The clause of the localization criterion that failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FailedClause {
    /// The codomain is not uniquely S-divisible.
    CodomainNotLocal,
    /// Some kernel element is not annihilated by a product of generators.
    KernelNotTorsion,
    /// Some cokernel element is not annihilated by a product of generators.
    CokernelNotTorsion,
}

impl FailedClause {
    pub fn label(&self) -> &'static str {
        match self {
            FailedClause::CodomainNotLocal => "a: codomain not uniquely S-divisible",
            FailedClause::KernelNotTorsion => "b: kernel not S-torsion",
            FailedClause::CokernelNotTorsion => "c: cokernel not S-torsion",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizationCertificate {
    /// Every failing clause, in order.
    pub failures: Vec<FailedClause>,
    pub codomain_local: bool,
    pub kernel: AbGroup,
    pub kernel_torsion: bool,
    /// Cokernel after inverting S, when the rings allow it to be computed;
    /// `None` means the codomain's free part is over a ring too large to be
    /// reached.
    pub localized_cokernel: Option<AbGroup>,
    pub cokernel_torsion: bool,
}

impl LocalizationCertificate {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first_failure(&self) -> Option<FailedClause> {
        self.failures.first().copied()
    }
}

/// Decides whether `h : G → H` is a localization of `G` away from `s`:
/// `H` is uniquely S-divisible and both kernel and cokernel are S-torsion.
pub fn is_localization(h: &GroupHom, s: &Localizer) -> Result<LocalizationCertificate, LocalizeError> {
    let inverted = s.primes();
    let codomain_local = is_uniquely_s_divisible(h.codomain(), s);

    let kernel = kernel(h)?.group;
    let kernel_torsion = kernel.is_finite() && kernel.torsion_primes().iter().all(|&q| inverted.contains(q));

    // coker(h) is S-torsion iff h with S inverted is onto
    let source_ring = h.domain().ring().union(&inverted);
    let target_ring = h.codomain().ring().union(&inverted);
    let localized_cokernel = if h.codomain().is_finite() || target_ring.is_subset(&source_ring) {
        Some(cokernel(&h.base_change(&target_ring)?)?.group)
    } else {
        None
    };
    let cokernel_torsion = localized_cokernel.as_ref().is_some_and(AbGroup::is_trivial);

    let failures = [
        (codomain_local, FailedClause::CodomainNotLocal),
        (kernel_torsion, FailedClause::KernelNotTorsion),
        (cokernel_torsion, FailedClause::CokernelNotTorsion),
    ]
    .into_iter()
    .filter_map(|(ok, clause)| (!ok).then_some(clause))
    .collect();
    Ok(LocalizationCertificate {
        failures,
        codomain_local,
        kernel,
        kernel_torsion,
        localized_cokernel,
        cokernel_torsion,
    })
}

fn not_divisible(g: &AbGroup, k: u64) -> LocalizeError {
    LocalizeError::NotUniquelyDivisible {
        group: g.to_string(),
        k,
    }
}

/// The unique `f̂` with `f̂ ∘ k = f`, namely `φ ∘ f` where `φ` inverts
/// multiplication by `k` on the codomain.
pub fn lift_along_power(f: &GroupHom, k: u64) -> Result<GroupHom, LocalizeError> {
    let h = f.codomain();
    if !is_uniquely_divisible(h, k) {
        return Err(not_divisible(h, k));
    }
    let k_int = Integer::from(k);
    let m = f
        .matrix()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let d = h.generator_order(i);
            let inv = if d.is_zero() {
                Rational::new(Integer::one(), k_int.clone())
            } else {
                Rational::from_integer(arith::mod_inverse(&k_int, &d).expect("k is prime to the order"))
            };
            row.iter().map(|x| x * &inv).collect()
        })
        .collect();
    Ok(GroupHom::new(f.domain().clone(), h.clone(), m)?)
}

/// The unique `n`-th root of `x` in `h`.
pub fn unique_root(h: &AbGroup, x: &[Rational], n: u64) -> Result<Element, LocalizeError> {
    let x = h.reduce_element(x)?;
    if n == 0 {
        return Err(LocalizeError::NoRoot { n });
    }
    let primes = arith::factor_u64(n)?;
    if let Some(&q) = h.torsion_primes().iter().find(|q| primes.contains_key(q)) {
        return Err(LocalizeError::RootNotUnique { n, prime: q });
    }
    let n_int = Integer::from(n);
    let mut root = Vec::with_capacity(x.len());
    for (j, c) in x.iter().enumerate() {
        let d = h.generator_order(j);
        if d.is_zero() {
            let r = c / Rational::from_integer(n_int.clone());
            if !h.ring().admits(&r) {
                return Err(LocalizeError::NoRoot { n });
            }
            root.push(r);
        } else {
            let inv = arith::mod_inverse(&n_int, &d).expect("n is prime to the order");
            root.push(Rational::from_integer(inv) * c);
        }
    }
    Ok(h.reduce_element(&root)?)
}

/// Unique roots of two elements and the checks that they behave as roots and
/// commute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootsCertificate {
    pub x_root: Element,
    pub y_root: Element,
    pub x_root_verified: bool,
    pub y_root_verified: bool,
    pub commute: bool,
}

impl RootsCertificate {
    pub fn holds(&self) -> bool {
        self.x_root_verified && self.y_root_verified && self.commute
    }
}

/// Computes `x̂` with `n·x̂ = x` and `ŷ` with `m·ŷ = y`, both unique, and
/// checks `x̂ + ŷ = ŷ + x̂`.
pub fn commuting_roots_check(
    h: &AbGroup,
    x: &[Rational],
    y: &[Rational],
    n: u64,
    m: u64,
) -> Result<RootsCertificate, LocalizeError> {
    let x_root = unique_root(h, x, n)?;
    let y_root = unique_root(h, y, m)?;
    let x_root_verified = h.scale(&Rational::from_integer(n.into()), &x_root)? == h.reduce_element(x)?;
    let y_root_verified = h.scale(&Rational::from_integer(m.into()), &y_root)? == h.reduce_element(y)?;
    let commute = h.add(&x_root, &y_root)? == h.add(&y_root, &x_root)?;
    Ok(RootsCertificate {
        x_root,
        y_root,
        x_root_verified,
        y_root_verified,
        commute,
    })
}

/// Localizes many groups at once.
pub fn localize_all(
    groups: &[AbGroup],
    s: &Localizer,
    exec: crate::par::Execution,
) -> Vec<Result<LocalizationResult, LocalizeError>> {
    exec.map_slice(groups, |g| localize_group(g, s))
}

pub use abgroup::power_map;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgroup::{compose, enumerate_homs};

    fn z() -> PrimeSet {
        PrimeSet::none()
    }

    fn grp(rank: usize, cyclic: &[u64]) -> AbGroup {
        AbGroup::from_invariants(rank, cyclic, z()).unwrap()
    }

    fn fam(g: &[u64]) -> Localizer {
        Localizer::family(g.to_vec()).unwrap()
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn localize_examples() {
        let res = localize_group(&grp(1, &[12]), &fam(&[2])).unwrap();
        assert_eq!(res.localized.expr(), "Z[1/2] + Z/3");
        assert_eq!(res.witness.deleted_torsion, vec![PrimePower { prime: 2, exponent: 2 }]);
        assert_eq!(res.unit.matrix(), &[vec![r(1), r(0), r(0)], vec![r(0), r(0), r(1)]]);

        let g = grp(2, &[6, 5]);
        let res = localize_group(&g, &fam(&[1])).unwrap();
        assert_eq!(res.localized, g);
        assert_eq!(res.unit, GroupHom::identity(&g));

        let res = localize_group(&grp(0, &[50]), &Localizer::at(5).unwrap()).unwrap();
        assert_eq!(res.localized.expr(), "Z/25 over at:5");
        // telescope with generator 2 gives the same torsion
        let tel = telescope_colimit(&grp(0, &[50]), &fam(&[2])).unwrap();
        assert_eq!(tel.colimit.torsion(), res.localized.torsion());
    }

    #[test]
    fn telescope_examples() {
        let t = telescope_colimit(&grp(0, &[8]), &fam(&[2])).unwrap();
        assert_eq!(t.stabilization_index, 3);
        assert!(t.colimit.is_trivial());
        // stage groups Z/8, Z/4, Z/2, 0
        let orders: Vec<u32> = t.stages.iter().map(|s| s.group.order().unwrap().try_into().unwrap()).collect();
        assert_eq!(orders, vec![8, 4, 2, 1]);

        let t = telescope_colimit(&grp(0, &[3]), &fam(&[2])).unwrap();
        assert_eq!(t.stabilization_index, 0);
        assert_eq!(t.colimit, grp(0, &[3]).with_ring(PrimeSet::finite([2]).unwrap()).unwrap());

        let t = telescope_colimit(&grp(1, &[]), &fam(&[2])).unwrap();
        assert_eq!(t.colimit, AbGroup::free(1, PrimeSet::finite([2]).unwrap()));

        assert!(matches!(
            telescope_colimit(&grp(1, &[]), &Localizer::at(5).unwrap()),
            Err(LocalizeError::CofiniteTelescope(_))
        ));
    }

    #[test]
    fn stabilization_uses_running_products() {
        // s = 3, 6, 6, … so v_2 grows 0, 1, 1, …
        let fam36 = SFamily::new(vec![3, 2]).unwrap();
        assert_eq!(stabilization_index(&grp(0, &[8]), &fam36), 4);
        assert_eq!(stabilization_index(&grp(0, &[9]), &fam36), 2);
        assert_eq!(stabilization_index(&grp(0, &[27]), &fam36), 3);
    }

    #[test]
    fn divisibility_examples() {
        assert!(is_uniquely_divisible(&grp(0, &[3]), 2));
        assert!(!is_uniquely_divisible(&grp(1, &[]), 2));
        assert!(is_uniquely_divisible(&AbGroup::free(1, PrimeSet::finite([2]).unwrap()), 2));
        assert!(is_uniquely_s_divisible(&grp(0, &[3]), &Localizer::Primes(PrimeSet::finite([2]).unwrap())));
        assert!(!is_uniquely_s_divisible(&grp(1, &[3]), &Localizer::Primes(PrimeSet::finite([2]).unwrap())));
        assert!(!is_uniquely_s_divisible(&grp(0, &[12]), &Localizer::at(5).unwrap()));
        // confirmed by the power map for k = 2
        assert!(!is_isomorphism(&power_map(&grp(0, &[12]), 2)).unwrap());
    }

    #[test]
    fn localization_decision_examples() {
        let z12 = grp(0, &[12]);
        let unit = localize_group(&z12, &fam(&[2])).unwrap().unit;
        assert!(is_localization(&unit, &fam(&[2])).unwrap().holds());

        let z3 = grp(0, &[3]);
        assert!(is_localization(&GroupHom::identity(&z3), &fam(&[2])).unwrap().holds());

        let cert = is_localization(&GroupHom::identity(&z12), &fam(&[2])).unwrap();
        assert_eq!(cert.failures, vec![FailedClause::CodomainNotLocal]);

        // Z → Z[1/6] is not a localization away from 2: 1/3 is never hit
        let zz = grp(1, &[]);
        let z6 = AbGroup::free(1, PrimeSet::finite([2, 3]).unwrap());
        let incl = GroupHom::new(zz.clone(), z6, vec![vec![r(1)]]).unwrap();
        let cert = is_localization(&incl, &fam(&[2])).unwrap();
        assert_eq!(cert.failures, vec![FailedClause::CokernelNotTorsion]);
        assert_eq!(cert.localized_cokernel, None);

        // mult by 3 on Z[1/2]: cokernel Z/3 is not 2-torsion
        let half = AbGroup::free(1, PrimeSet::finite([2]).unwrap());
        let three = GroupHom::new(zz.clone(), half.clone(), vec![vec![r(3)]]).unwrap();
        assert_eq!(is_localization(&three, &fam(&[2])).unwrap().failures, vec![FailedClause::CokernelNotTorsion]);
        let zero_from_z3 = GroupHom::zero(&z3, &z3).unwrap();
        assert_eq!(
            is_localization(&zero_from_z3, &fam(&[2])).unwrap().failures,
            vec![FailedClause::KernelNotTorsion, FailedClause::CokernelNotTorsion]
        );
    }

    #[test]
    fn lift_examples() {
        let z5 = grp(0, &[5]);
        let lifted = lift_along_power(&GroupHom::identity(&z5), 2).unwrap();
        assert_eq!(lifted, power_map(&z5, 3));
        // the enumeration oracle: exactly one endomorphism g with g∘2 = id
        let solutions: Vec<_> = enumerate_homs(&z5, &z5)
            .unwrap()
            .into_iter()
            .filter(|g| compose(g, &power_map(&z5, 2)).unwrap() == GroupHom::identity(&z5))
            .collect();
        assert_eq!(solutions, vec![lifted]);

        let zero = GroupHom::zero(&grp(0, &[4]), &grp(0, &[9])).unwrap();
        assert!(lift_along_power(&zero, 4).unwrap().is_zero());

        let zz = grp(1, &[]);
        let half = AbGroup::free(1, PrimeSet::finite([2]).unwrap());
        let incl = GroupHom::new(zz, half, vec![vec![r(1)]]).unwrap();
        let lifted = lift_along_power(&incl, 2).unwrap();
        assert_eq!(lifted.matrix()[0][0], Rational::new(1.into(), 2.into()));

        assert!(matches!(
            lift_along_power(&GroupHom::identity(&grp(0, &[4])), 2),
            Err(LocalizeError::NotUniquelyDivisible { .. })
        ));
    }

    /// Exhaustive root search in a finite cyclic group.
    fn roots_by_search(order: i64, x: i64, n: i64) -> Vec<i64> {
        (0..order).filter(|c| (c * n - x).rem_euclid(order) == 0).collect()
    }

    #[test]
    fn commuting_roots_examples() {
        assert_eq!(roots_by_search(5, 1, 2), vec![3]);
        assert_eq!(roots_by_search(5, 2, 3), vec![4]);
        let z5 = grp(0, &[5]);
        let cert = commuting_roots_check(&z5, &[r(1)], &[r(2)], 2, 3).unwrap();
        assert!(cert.holds());
        assert_eq!((cert.x_root, cert.y_root), (vec![r(3)], vec![r(4)]));

        let z3 = grp(0, &[3]);
        let cert = commuting_roots_check(&z3, &[r(0)], &[r(0)], 2, 2).unwrap();
        assert_eq!(cert.x_root, vec![r(0)]);
        assert!(cert.holds());

        // Z/15 = Z/3 ⊕ Z/5; the element 1 has coordinates (1, 1)
        assert_eq!(roots_by_search(15, 1, 2), vec![8]);
        assert_eq!(roots_by_search(15, 1, 4), vec![4]);
        let z15 = grp(0, &[15]);
        let cert = commuting_roots_check(&z15, &[r(1), r(1)], &[r(1), r(1)], 2, 4).unwrap();
        assert!(cert.holds());
        // 8 mod 3 = 2, 8 mod 5 = 3
        assert_eq!(cert.x_root, vec![r(2), r(3)]);
        assert_eq!(cert.y_root, vec![r(1), r(4)]);

        assert!(matches!(
            commuting_roots_check(&grp(0, &[4]), &[r(2)], &[r(0)], 2, 1),
            Err(LocalizeError::RootNotUnique { .. })
        ));
        assert!(matches!(
            commuting_roots_check(&grp(1, &[]), &[r(1)], &[r(0)], 2, 1),
            Err(LocalizeError::NoRoot { .. })
        ));
    }
}
