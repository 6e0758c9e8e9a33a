use num_integer::Integer as _;
use num_traits::{One, Zero};

use super::presentation::present;
use super::snf::{integer_kernel, IntMatrix};
use super::{AbGroup, Element, GroupError};
use crate::arith::{self, Integer, Rational};

/// A homomorphism `domain → codomain`, one matrix column per domain
/// generator and one row per codomain generator.
///
/// The domain ring must be contained in the codomain ring. Entries in free
/// rows are elements of the codomain ring; entries in torsion rows are
/// residues in `[0, order)`, which makes equality a direct comparison.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupHom {
    domain: AbGroup,
    codomain: AbGroup,
    matrix: Vec<Vec<Rational>>,
}

impl GroupHom {
    pub fn new(domain: AbGroup, codomain: AbGroup, matrix: Vec<Vec<Rational>>) -> Result<Self, GroupError> {
        if !domain.ring().is_subset(codomain.ring()) {
            return Err(GroupError::RingNotContained {
                domain: domain.ring().clone(),
                codomain: codomain.ring().clone(),
            });
        }
        let (m, n) = (codomain.num_generators(), domain.num_generators());
        if matrix.len() != m || matrix.iter().any(|r| r.len() != n) {
            return Err(GroupError::Shape {
                rows: matrix.len(),
                cols: matrix.first().map_or(n, Vec::len),
                expected_rows: m,
                expected_cols: n,
            });
        }
        let domain_orders = domain.generator_orders();
        let mut reduced = Vec::with_capacity(m);
        for (i, row) in matrix.into_iter().enumerate() {
            let di = codomain.generator_order(i);
            let mut out = Vec::with_capacity(n);
            for (j, x) in row.into_iter().enumerate() {
                let dj = &domain_orders[j];
                let entry = if x.is_zero() {
                    x
                } else if di.is_zero() {
                    if !codomain.ring().admits(&x) {
                        return Err(GroupError::EntryNotInRing { row: i, col: j });
                    }
                    if !dj.is_zero() && !x.is_zero() {
                        return Err(GroupError::NotWellDefined { row: i, col: j });
                    }
                    x
                } else {
                    let r = arith::residue(&x, &di).ok_or(GroupError::EntryNotInRing { row: i, col: j })?;
                    if !dj.is_zero() && !(dj * &r).is_multiple_of(&di) {
                        return Err(GroupError::NotWellDefined { row: i, col: j });
                    }
                    Rational::from_integer(r)
                };
                out.push(entry);
            }
            reduced.push(out);
        }
        Ok(GroupHom {
            domain,
            codomain,
            matrix: reduced,
        })
    }

    pub fn from_int_matrix(domain: AbGroup, codomain: AbGroup, m: &IntMatrix) -> Result<Self, GroupError> {
        let rows = m
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(Rational::from_integer).collect())
            .collect();
        Self::new(domain, codomain, rows)
    }

    pub fn identity(g: &AbGroup) -> Self {
        power_map(g, 1)
    }

    pub fn zero(domain: &AbGroup, codomain: &AbGroup) -> Result<Self, GroupError> {
        let m = vec![vec![Rational::zero(); domain.num_generators()]; codomain.num_generators()];
        Self::new(domain.clone(), codomain.clone(), m)
    }

    pub fn domain(&self) -> &AbGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &AbGroup {
        &self.codomain
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(Zero::is_zero)
    }

    /// Image of an element given in domain coordinates.
    pub fn apply(&self, x: &[Rational]) -> Result<Element, GroupError> {
        let x = self.domain.reduce_element(x)?;
        let y: Vec<Rational> = self
            .matrix
            .iter()
            .map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum())
            .collect();
        self.codomain.reduce_element(&y)
    }

    /// `self ⊗ Z_R`: both groups base-changed to the ring `R`, which must
    /// contain the codomain ring.
    pub fn base_change(&self, ring: &crate::arith::PrimeSet) -> Result<GroupHom, GroupError> {
        let (dom, dom_idx) = self.domain.base_change(ring)?;
        let (cod, cod_idx) = self.codomain.base_change(ring)?;
        let mut m = vec![vec![Rational::zero(); dom.num_generators()]; cod.num_generators()];
        for (i, ni) in cod_idx.iter().enumerate() {
            let Some(ni) = ni else { continue };
            for (j, nj) in dom_idx.iter().enumerate() {
                if let Some(nj) = nj {
                    m[*ni][*nj] = self.matrix[i][j].clone();
                }
            }
        }
        GroupHom::new(dom, cod, m)
    }

    /// Entries scaled by a common unit of the codomain ring so that they are
    /// all integers; the column span over the codomain ring is unchanged.
    fn integer_matrix(&self) -> IntMatrix {
        let den = self
            .matrix
            .iter()
            .flatten()
            .filter(|x| !x.is_integer())
            .fold(Integer::one(), |acc, x| acc.lcm(x.denom()));
        let rows = self.codomain.num_generators();
        let cols = self.domain.num_generators();
        let mut out = IntMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let x = &self.matrix[i][j];
                if x.is_zero() {
                    continue;
                }
                out[(i, j)] = if den.is_one() {
                    x.numer().clone()
                } else {
                    x.numer() * (&den / x.denom())
                };
            }
        }
        out
    }
}

/// `g ∘ f`.
pub fn compose(g: &GroupHom, f: &GroupHom) -> Result<GroupHom, GroupError> {
    if f.codomain != g.domain {
        return Err(GroupError::NotComposable);
    }
    let rows = g.codomain.num_generators();
    let cols = f.domain.num_generators();
    let inner = f.codomain.num_generators();
    let m = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &g.matrix[i][k] * &f.matrix[k][j]).sum())
                .collect()
        })
        .collect();
    GroupHom::new(f.domain.clone(), g.codomain.clone(), m)
}

/// Multiplication by `k` on `g`.
pub fn power_map(g: &AbGroup, k: u64) -> GroupHom {
    multiplication_map(g, &Integer::from(k))
}

/// Multiplication by an arbitrary integer `k` on `g`.
pub fn multiplication_map(g: &AbGroup, k: &Integer) -> GroupHom {
    let n = g.num_generators();
    let m = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::from_integer(k.clone())
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    GroupHom::new(g.clone(), g.clone(), m).expect("multiplication by k is always well defined")
}

/// Orders of the torsion generators placed as relation columns.
fn torsion_relations(g: &AbGroup) -> IntMatrix {
    let n = g.num_generators();
    let t = g.torsion().len();
    let mut m = IntMatrix::zeros(n, t);
    for c in 0..t {
        m[(g.rank() + c, c)] = g.generator_order(g.rank() + c);
    }
    m
}

/// A subgroup together with its inclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub group: AbGroup,
    pub inclusion: GroupHom,
}

/// A quotient together with its projection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    pub group: AbGroup,
    pub projection: GroupHom,
}

/// The subgroup of `g` generated by the columns of `gens` (integer
/// coordinates), presented over the ring of `g`.
fn generated_subgroup(g: &AbGroup, gens: &IntMatrix) -> Result<Subgroup, GroupError> {
    let t = gens.cols();
    // c ∈ Z^t is a relation iff gens·c lies in the span of the torsion orders
    let relations = integer_kernel(&gens.hcat(&torsion_relations(g))).top_rows(t);
    let p = present(t, &relations, g.ring())?;
    let inclusion = GroupHom::from_int_matrix(p.group.clone(), g.clone(), &gens.mul(&p.from_canonical))?;
    Ok(Subgroup {
        group: p.group,
        inclusion,
    })
}

/// Integer coordinates (as columns) of a generating set of `ker f`.
pub fn kernel_generators(f: &GroupHom) -> IntMatrix {
    let n = f.domain.num_generators();
    // x is in the kernel iff M'x lies in the span of the codomain torsion orders
    let system = f.integer_matrix().hcat(&torsion_relations(&f.codomain));
    integer_kernel(&system).top_rows(n)
}

/// Kernel of `f` as a module over the domain ring.
pub fn kernel(f: &GroupHom) -> Result<Subgroup, GroupError> {
    generated_subgroup(&f.domain, &kernel_generators(f))
}

/// `g` modulo the submodule generated by the columns of `gens`.
pub fn quotient(g: &AbGroup, gens: &IntMatrix) -> Result<Quotient, GroupError> {
    let m = g.num_generators();
    if gens.rows() != m {
        return Err(GroupError::RelationWidth {
            got: gens.rows(),
            expected: m,
        });
    }
    let p = present(m, &gens.hcat(&torsion_relations(g)), g.ring())?;
    let projection = GroupHom::from_int_matrix(g.clone(), p.group.clone(), &p.to_canonical)?;
    Ok(Quotient {
        group: p.group,
        projection,
    })
}

/// Cokernel of `f` as a module over the codomain ring, i.e. the codomain
/// modulo the submodule generated by the image.
pub fn cokernel(f: &GroupHom) -> Result<Quotient, GroupError> {
    quotient(&f.codomain, &f.integer_matrix())
}

/// Submodule of the codomain generated by the image of `f`.
pub fn image(f: &GroupHom) -> Result<Subgroup, GroupError> {
    let gens = f.integer_matrix();
    generated_subgroup(&f.codomain, &gens)
}

/// True iff `f` is bijective as a map of abelian groups.
///
/// Kernel and cokernel must vanish; in addition, when the rings differ, a
/// free codomain summand over the larger ring is never hit by a module over
/// the smaller ring.
pub fn is_isomorphism(f: &GroupHom) -> Result<bool, GroupError> {
    let rings_ok = f.codomain.is_finite() || f.codomain.ring().is_subset(f.domain.ring());
    if !rings_ok {
        return Ok(false);
    }
    // injective iff every kernel generator is already zero in the domain
    let gens = kernel_generators(f);
    let orders = f.domain.generator_orders();
    let injective = (0..gens.cols()).all(|c| {
        orders.iter().enumerate().all(|(i, d)| {
            let x = &gens[(i, c)];
            if d.is_zero() {
                x.is_zero()
            } else {
                x.is_multiple_of(d)
            }
        })
    });
    Ok(injective && cokernel(f)?.group.is_trivial())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrimeSet;

    fn z() -> PrimeSet {
        PrimeSet::none()
    }

    fn cyc(n: u64) -> AbGroup {
        AbGroup::cyclic(n).unwrap()
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    /// Z/12 = Z/4 ⊕ Z/3 → Z/4, identity on the 2-primary summand.
    fn twelve_to_four() -> GroupHom {
        GroupHom::new(cyc(12), cyc(4), vec![vec![r(1), r(0)]]).unwrap()
    }

    #[test]
    fn well_definedness_is_enforced() {
        let z4 = cyc(4);
        let z2 = cyc(2);
        assert!(GroupHom::new(z4.clone(), z2.clone(), vec![vec![r(1)]]).is_ok());
        assert_eq!(
            GroupHom::new(z2.clone(), z4.clone(), vec![vec![r(1)]]),
            Err(GroupError::NotWellDefined { row: 0, col: 0 })
        );
        assert!(GroupHom::new(z2, z4, vec![vec![r(2)]]).is_ok());
        let zz = AbGroup::free(1, z());
        assert_eq!(
            GroupHom::new(zz.clone(), zz.clone(), vec![vec![Rational::new(1.into(), 2.into())]]),
            Err(GroupError::EntryNotInRing { row: 0, col: 0 })
        );
        let z_half = AbGroup::free(1, PrimeSet::finite([2]).unwrap());
        assert!(matches!(
            GroupHom::new(z_half.clone(), zz, vec![vec![r(1)]]),
            Err(GroupError::RingNotContained { .. })
        ));
        assert!(GroupHom::new(AbGroup::free(1, z()), z_half, vec![vec![Rational::new(1.into(), 2.into())]]).is_ok());
    }

    #[test]
    fn entries_are_reduced() {
        let z5 = cyc(5);
        let f = GroupHom::new(z5.clone(), z5, vec![vec![r(-4)]]).unwrap();
        assert_eq!(f.matrix()[0][0], r(1));
    }

    #[test]
    fn compose_examples() {
        let z5 = cyc(5);
        let two = power_map(&z5, 2);
        let three = power_map(&z5, 3);
        assert_eq!(compose(&two, &three).unwrap(), GroupHom::identity(&z5));
        let f = twelve_to_four();
        assert_eq!(compose(&GroupHom::identity(f.codomain()), &f).unwrap(), f);
        let zero = GroupHom::zero(f.codomain(), &cyc(2)).unwrap();
        assert!(compose(&zero, &f).unwrap().is_zero());
        assert_eq!(compose(&f, &two), Err(GroupError::NotComposable));
    }

    #[test]
    fn kernel_examples() {
        let z4 = cyc(4);
        assert_eq!(kernel(&power_map(&z4, 2)).unwrap().group, cyc(2));
        let zz = AbGroup::free(1, z());
        assert!(kernel(&power_map(&zz, 2)).unwrap().group.is_trivial());
        // projection Z/12 → Z/3: Z/12 = Z/4 ⊕ Z/3, kill the Z/4 summand
        let z12 = cyc(12);
        let z3 = cyc(3);
        let proj = GroupHom::new(z12.clone(), z3, vec![vec![r(0), r(1)]]).unwrap();
        let k = kernel(&proj).unwrap();
        assert_eq!(k.group, cyc(4));
        assert!(compose(&proj, &k.inclusion).unwrap().is_zero());
    }

    #[test]
    fn cokernel_examples() {
        let zz = AbGroup::free(1, z());
        assert_eq!(cokernel(&power_map(&zz, 2)).unwrap().group, cyc(2));
        assert!(cokernel(&GroupHom::identity(&cyc(12))).unwrap().group.is_trivial());
        let c = cokernel(&power_map(&cyc(4), 6)).unwrap();
        assert_eq!(c.group, cyc(2));
        assert!(compose(&c.projection, &power_map(&cyc(4), 6)).unwrap().is_zero());
    }

    #[test]
    fn mixed_ring_unit_map() {
        // Z → Z[1/2], the ring inclusion
        let zz = AbGroup::free(1, z());
        let half = AbGroup::free(1, PrimeSet::finite([2]).unwrap());
        let incl = GroupHom::new(zz.clone(), half.clone(), vec![vec![r(1)]]).unwrap();
        assert!(kernel(&incl).unwrap().group.is_trivial());
        assert!(cokernel(&incl).unwrap().group.is_trivial());
        assert!(!is_isomorphism(&incl).unwrap());
        // Z/12 → Z/3 over Z[1/2]
        let z3_half = cyc(3).with_ring(PrimeSet::finite([2]).unwrap()).unwrap();
        let unit = GroupHom::new(cyc(12), z3_half, vec![vec![r(0), r(1)]]).unwrap();
        assert_eq!(kernel(&unit).unwrap().group, cyc(4));
    }

    #[test]
    fn isomorphism_examples() {
        assert!(is_isomorphism(&GroupHom::identity(&cyc(12))).unwrap());
        assert!(is_isomorphism(&power_map(&cyc(3), 2)).unwrap());
        assert!(!is_isomorphism(&power_map(&AbGroup::free(1, z()), 2)).unwrap());
    }

    #[test]
    fn image_of_multiplication() {
        let g = AbGroup::from_invariants(1, &[8, 3], z()).unwrap();
        let im = image(&power_map(&g, 2)).unwrap();
        assert_eq!(im.group, AbGroup::from_invariants(1, &[4, 3], z()).unwrap());
    }

    #[test]
    fn apply_and_base_change() {
        let g = AbGroup::from_invariants(1, &[12], z()).unwrap();
        let f = power_map(&g, 2);
        let y = f.apply(&[r(1), r(3), r(2)]).unwrap();
        assert_eq!(y, vec![r(2), r(2), r(1)]);
        let fb = f.base_change(&PrimeSet::finite([2]).unwrap()).unwrap();
        assert_eq!(fb.domain().expr(), "Z[1/2] + Z/3");
        assert!(is_isomorphism(&fb).unwrap());
    }
}
