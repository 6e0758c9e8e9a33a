use num_integer::Integer as _;
use num_traits::{One, Zero};

use super::snf::{smith_normal_form, IntMatrix};
use super::{AbGroup, GroupError, PrimePower};
use crate::arith::{self, mod_inverse, Integer, PrimeSet};

/// `Z_T^n / (column span of relations)` in canonical form, with coordinate
/// changes in both directions.
pub(crate) struct Presented {
    pub group: AbGroup,
    /// canonical generators × old generators: image of each old generator
    pub to_canonical: IntMatrix,
    /// old generators × canonical generators: a lift of each canonical generator
    pub from_canonical: IntMatrix,
}

struct Component {
    kind: Option<PrimePower>,
    to_row: Vec<Integer>,
    from_col: Vec<Integer>,
}

/// `relations` is `n × ℓ`, one relation per column.
pub(crate) fn present(n: usize, relations: &IntMatrix, ring: &PrimeSet) -> Result<Presented, GroupError> {
    debug_assert_eq!(relations.rows(), n);
    let snf = smith_normal_form(relations);
    let factors = snf.invariant_factors();
    let mut comps = Vec::new();

    for i in 0..n {
        let d = factors.get(i).cloned().unwrap_or_else(Integer::zero);
        let to_row = snf.left.row(i).to_vec();
        let from_col = snf.left_inverse.column(i);
        if d.is_zero() {
            comps.push(Component {
                kind: None,
                to_row,
                from_col,
            });
            continue;
        }
        let d = ring.non_unit_part(&arith::magnitude(&d))?;
        if d.is_one() {
            continue;
        }
        let d = Integer::from(d);
        for (q, a) in arith::factor_integer(&d)? {
            let pp = PrimePower { prime: q, exponent: a };
            let qa = pp.order();
            let cofactor = &d / &qa;
            // idempotent: 1 mod q^a, 0 mod the other prime powers of d
            let e = &cofactor * mod_inverse(&cofactor, &qa).expect("coprime cofactor");
            comps.push(Component {
                kind: Some(pp),
                to_row: to_row.iter().map(|x| x.mod_floor(&qa)).collect(),
                from_col: from_col.iter().map(|x| x * &e).collect(),
            });
        }
    }

    // free summands first, then torsion by (prime, exponent); stable
    comps.sort_by(|a, b| match (&a.kind, &b.kind) {
        (None, None) => std::cmp::Ordering::Equal,
        (None, Some(_)) => std::cmp::Ordering::Less,
        (Some(_), None) => std::cmp::Ordering::Greater,
        (Some(x), Some(y)) => x.cmp(y),
    });

    let rank = comps.iter().filter(|c| c.kind.is_none()).count();
    let torsion: Vec<(u64, u32)> = comps
        .iter()
        .filter_map(|c| c.kind.map(|k| (k.prime, k.exponent)))
        .collect();
    let group = AbGroup::new(ring.clone(), rank, torsion)?;

    let k = comps.len();
    let mut to_canonical = IntMatrix::zeros(k, n);
    let mut from_canonical = IntMatrix::zeros(n, k);
    for (c, comp) in comps.iter().enumerate() {
        for j in 0..n {
            to_canonical[(c, j)] = comp.to_row[j].clone();
            from_canonical[(j, c)] = comp.from_col[j].clone();
        }
    }
    Ok(Presented {
        group,
        to_canonical,
        from_canonical,
    })
}

/// The group `Z_T^n / ⟨rows of relations⟩` in canonical form.
pub fn group_from_presentation(
    n_generators: usize,
    relations: &IntMatrix,
    ring: &PrimeSet,
) -> Result<AbGroup, GroupError> {
    if relations.cols() != n_generators {
        return Err(GroupError::RelationWidth {
            got: relations.cols(),
            expected: n_generators,
        });
    }
    Ok(present(n_generators, &relations.transpose(), ring)?.group)
}
