//! Simply connected truncated homotopy types, recorded by their homotopy
//! groups `π_2, …, π_n`, and Eilenberg–Mac Lane spaces `K(G, n)`.

use std::fmt;

use thiserror::Error;

use crate::abgroup::{AbGroup, GroupError, GroupHom};
use crate::arith::Localizer;
use crate::localize::{
    is_localization, is_uniquely_s_divisible, localize_group, FailedClause, LocalizationCertificate, LocalizeError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomotopyError {
    #[error("truncation level must be at least 1")]
    ZeroTruncation,
    #[error("an {truncation}-type lists {expected} homotopy groups, got {got}")]
    GroupCount { truncation: usize, expected: usize, got: usize },
    #[error("truncation mismatch: {domain} vs {codomain}")]
    TruncationMismatch { domain: usize, codomain: usize },
    #[error("level π_{degree} does not match the descriptor groups")]
    LevelMismatch { degree: usize },
    #[error("Eilenberg–Mac Lane degree must be at least 1")]
    ZeroDegree,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Localize(#[from] LocalizeError),
}

/// A pointed simply connected `n`-type, seen through `π_2 … π_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimplyConnectedDesc {
    truncation: usize,
    groups: Vec<AbGroup>,
}

impl SimplyConnectedDesc {
    pub fn new(truncation: usize, groups: Vec<AbGroup>) -> Result<Self, HomotopyError> {
        if truncation == 0 {
            return Err(HomotopyError::ZeroTruncation);
        }
        if groups.len() != truncation - 1 {
            return Err(HomotopyError::GroupCount {
                truncation,
                expected: truncation - 1,
                got: groups.len(),
            });
        }
        Ok(SimplyConnectedDesc { truncation, groups })
    }

    /// Truncation inferred from the list: `π_2 … π_{k+1}` gives a `(k+1)`-type.
    pub fn from_groups(groups: Vec<AbGroup>) -> Self {
        SimplyConnectedDesc {
            truncation: groups.len() + 1,
            groups,
        }
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn groups(&self) -> &[AbGroup] {
        &self.groups
    }

    /// `π_m` for `2 ≤ m ≤ n`.
    pub fn pi(&self, m: usize) -> Option<&AbGroup> {
        m.checked_sub(2).and_then(|i| self.groups.get(i))
    }
}

impl fmt::Display for SimplyConnectedDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type n={}", self.truncation)?;
        for (i, g) in self.groups.iter().enumerate() {
            write!(f, " pi{}=({})", i + 2, g.expr())?;
        }
        Ok(())
    }
}

/// The maps `π_m(f)` of a pointed map between descriptors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescMap {
    domain: SimplyConnectedDesc,
    codomain: SimplyConnectedDesc,
    levels: Vec<GroupHom>,
}

impl DescMap {
    pub fn new(
        domain: SimplyConnectedDesc,
        codomain: SimplyConnectedDesc,
        levels: Vec<GroupHom>,
    ) -> Result<Self, HomotopyError> {
        if domain.truncation != codomain.truncation {
            return Err(HomotopyError::TruncationMismatch {
                domain: domain.truncation,
                codomain: codomain.truncation,
            });
        }
        if levels.len() != domain.groups.len() {
            return Err(HomotopyError::GroupCount {
                truncation: domain.truncation,
                expected: domain.groups.len(),
                got: levels.len(),
            });
        }
        for (i, h) in levels.iter().enumerate() {
            if h.domain() != &domain.groups[i] || h.codomain() != &codomain.groups[i] {
                return Err(HomotopyError::LevelMismatch { degree: i + 2 });
            }
        }
        Ok(DescMap {
            domain,
            codomain,
            levels,
        })
    }

    pub fn identity(desc: &SimplyConnectedDesc) -> Self {
        DescMap {
            domain: desc.clone(),
            codomain: desc.clone(),
            levels: desc.groups.iter().map(GroupHom::identity).collect(),
        }
    }

    pub fn domain(&self) -> &SimplyConnectedDesc {
        &self.domain
    }

    pub fn codomain(&self) -> &SimplyConnectedDesc {
        &self.codomain
    }

    pub fn levels(&self) -> &[GroupHom] {
        &self.levels
    }
}

/// `K(G, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EMDescriptor {
    group: AbGroup,
    degree: usize,
}

impl EMDescriptor {
    pub fn new(group: AbGroup, degree: usize) -> Result<Self, HomotopyError> {
        if degree == 0 {
            return Err(HomotopyError::ZeroDegree);
        }
        Ok(EMDescriptor { group, degree })
    }

    pub fn group(&self) -> &AbGroup {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

impl fmt::Display for EMDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K({}, {})", self.group, self.degree)
    }
}

pub fn is_local_desc(desc: &SimplyConnectedDesc, s: &Localizer) -> bool {
    desc.groups.iter().all(|g| is_uniquely_s_divisible(g, s))
}

pub fn localize_desc(desc: &SimplyConnectedDesc, s: &Localizer) -> Result<(SimplyConnectedDesc, DescMap), HomotopyError> {
    let results = desc
        .groups
        .iter()
        .map(|g| localize_group(g, s))
        .collect::<Result<Vec<_>, _>>()?;
    let localized = SimplyConnectedDesc {
        truncation: desc.truncation,
        groups: results.iter().map(|r| r.localized.clone()).collect(),
    };
    let map = DescMap {
        domain: desc.clone(),
        codomain: localized.clone(),
        levels: results.into_iter().map(|r| r.unit).collect(),
    };
    Ok((localized, map))
}

pub fn em_localize(k: &EMDescriptor, s: &Localizer) -> Result<(EMDescriptor, GroupHom), HomotopyError> {
    let res = localize_group(&k.group, s)?;
    Ok((
        EMDescriptor {
            group: res.localized,
            degree: k.degree,
        },
        res.unit,
    ))
}

/// Per-level outcome of [`is_localization_map`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescMapCertificate {
    pub levels: Vec<LocalizationCertificate>,
}

impl DescMapCertificate {
    pub fn holds(&self) -> bool {
        self.levels.iter().all(LocalizationCertificate::holds)
    }

    /// Degree and clauses of the first failing level.
    pub fn first_failure(&self) -> Option<(usize, &[FailedClause])> {
        self.levels
            .iter()
            .enumerate()
            .find(|(_, c)| !c.holds())
            .map(|(i, c)| (i + 2, c.failures.as_slice()))
    }
}

pub fn is_localization_map(map: &DescMap, s: &Localizer) -> Result<DescMapCertificate, HomotopyError> {
    if map.domain.truncation != map.codomain.truncation {
        return Err(HomotopyError::TruncationMismatch {
            domain: map.domain.truncation,
            codomain: map.codomain.truncation,
        });
    }
    let levels = map
        .levels
        .iter()
        .map(|h| is_localization(h, s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DescMapCertificate { levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgroup::is_isomorphism;
    use crate::arith::{PrimeSet, Rational};
    use num_traits::Zero;

    fn grp(rank: usize, cyclic: &[u64]) -> AbGroup {
        AbGroup::from_invariants(rank, cyclic, PrimeSet::none()).unwrap()
    }

    fn half() -> AbGroup {
        AbGroup::free(1, PrimeSet::finite([2]).unwrap())
    }

    fn fam(g: &[u64]) -> Localizer {
        Localizer::family(g.to_vec()).unwrap()
    }

    #[test]
    fn locality_examples() {
        assert!(is_local_desc(&SimplyConnectedDesc::from_groups(vec![grp(0, &[3])]), &fam(&[2])));
        assert!(!is_local_desc(&SimplyConnectedDesc::from_groups(vec![grp(1, &[])]), &fam(&[2])));
        let ok = SimplyConnectedDesc::new(3, vec![half(), grp(0, &[3]).with_ring(PrimeSet::none()).unwrap()]).unwrap();
        assert!(is_local_desc(&ok, &fam(&[2])));
        assert!(is_local_desc(&SimplyConnectedDesc::new(1, vec![]).unwrap(), &fam(&[2])));
    }

    #[test]
    fn descriptor_shape_is_checked() {
        assert_eq!(SimplyConnectedDesc::new(0, vec![]), Err(HomotopyError::ZeroTruncation));
        assert!(matches!(
            SimplyConnectedDesc::new(3, vec![grp(1, &[])]),
            Err(HomotopyError::GroupCount { .. })
        ));
        assert_eq!(EMDescriptor::new(grp(1, &[]), 0), Err(HomotopyError::ZeroDegree));
    }

    #[test]
    fn localize_desc_examples() {
        let tau = SimplyConnectedDesc::from_groups(vec![grp(1, &[]), grp(0, &[12])]);
        let (loc, map) = localize_desc(&tau, &fam(&[2])).unwrap();
        let three = AbGroup::from_invariants(0, &[3], PrimeSet::finite([2]).unwrap()).unwrap();
        assert_eq!(loc.groups(), &[half(), three]);
        assert!(is_local_desc(&loc, &fam(&[2])));
        let cert = is_localization_map(&map, &fam(&[2])).unwrap();
        assert!(cert.holds());

        let (same, id) = localize_desc(&tau, &fam(&[1])).unwrap();
        assert_eq!(same, tau);
        assert_eq!(id, DescMap::identity(&tau));

        let seven = SimplyConnectedDesc::from_groups(vec![grp(0, &[7])]);
        let (loc, map) = localize_desc(&seven, &fam(&[2, 3])).unwrap();
        assert_eq!(loc.groups()[0].torsion(), seven.groups()[0].torsion());
        assert!(is_isomorphism(&map.levels()[0]).unwrap());
    }

    #[test]
    fn localize_desc_is_idempotent() {
        let tau = SimplyConnectedDesc::from_groups(vec![grp(2, &[12, 5]), grp(0, &[8, 3])]);
        let (once, _) = localize_desc(&tau, &fam(&[6])).unwrap();
        let (twice, map) = localize_desc(&once, &fam(&[6])).unwrap();
        assert_eq!(once, twice);
        assert!(map.levels().iter().all(|h| is_isomorphism(h).unwrap()));
    }

    #[test]
    fn em_examples() {
        let (k, _) = em_localize(&EMDescriptor::new(grp(0, &[12]), 2).unwrap(), &fam(&[2])).unwrap();
        assert_eq!(k.degree(), 2);
        assert_eq!(k.group().expr(), "Z/3 over away:2");

        let k0 = EMDescriptor::new(grp(1, &[6]), 3).unwrap();
        let (k1, unit) = em_localize(&k0, &fam(&[1])).unwrap();
        assert_eq!(k1, k0);
        assert_eq!(unit, GroupHom::identity(k0.group()));

        let (k, _) = em_localize(&EMDescriptor::new(grp(1, &[]), 1).unwrap(), &Localizer::at(5).unwrap()).unwrap();
        assert_eq!(k.group(), &AbGroup::free(1, PrimeSet::cofinite([5]).unwrap()));
    }

    #[test]
    fn localization_map_examples() {
        let local = SimplyConnectedDesc::from_groups(vec![half()]);
        assert!(is_localization_map(&DescMap::identity(&local), &fam(&[2])).unwrap().holds());

        let z = SimplyConnectedDesc::from_groups(vec![grp(1, &[])]);
        let zero = GroupHom::new(grp(1, &[]), half(), vec![vec![Rational::zero()]]).unwrap();
        let map = DescMap::new(z, local, vec![zero]).unwrap();
        let cert = is_localization_map(&map, &fam(&[2])).unwrap();
        assert!(!cert.holds());
        // the kernel Z is not 2-torsion either
        let (degree, clauses) = cert.first_failure().unwrap();
        assert_eq!(degree, 2);
        assert!(clauses.contains(&FailedClause::CokernelNotTorsion));
        assert_eq!(cert.levels[0].localized_cokernel.as_ref(), Some(&half()));

        let a = SimplyConnectedDesc::from_groups(vec![grp(1, &[])]);
        let b = SimplyConnectedDesc::from_groups(vec![grp(1, &[]), grp(1, &[])]);
        assert!(matches!(
            DescMap::new(a, b, vec![]),
            Err(HomotopyError::TruncationMismatch { .. })
        ));
    }
}
