use std::collections::HashSet;
use std::time::{Duration, Instant};

use abloc::abgroup::{catalog, cokernel, compose, enumerate_homs, image, is_isomorphism, kernel, multiplication_map};
use abloc::arith::{Integer, Localizer, PrimeSet, SFamily};
use abloc::localize::{is_localization, is_uniquely_s_divisible, localize_group, telescope_colimit};
use abloc::AbGroup;
use num_traits::Zero;
use proptest::prelude::*;

fn group() -> impl Strategy<Value = AbGroup> {
    (
        0usize..=2,
        prop::collection::vec((prop::sample::select(vec![2u64, 3, 5, 7]), 1u32..=4), 0..=3),
    )
        .prop_map(|(rank, torsion)| AbGroup::new(PrimeSet::none(), rank, torsion).unwrap())
}

fn family() -> impl Strategy<Value = SFamily> {
    prop::collection::vec(1u64..=10, 1..=3).prop_map(|g| SFamily::new(g).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn telescope_agrees_with_direct_formula(g in group(), s in family()) {
        let s = Localizer::Family(s);
        let direct = localize_group(&g, &s).unwrap().localized;
        let trace = telescope_colimit(&g, &s).unwrap();
        prop_assert_eq!(trace.colimit, direct);
        for stage in &trace.stages[trace.stabilization_index..] {
            prop_assert!(is_isomorphism(&stage.transition).unwrap());
        }
    }

    #[test]
    fn localization_is_idempotent(g in group(), s in family()) {
        let s = Localizer::Family(s);
        let once = localize_group(&g, &s).unwrap();
        let twice = localize_group(&once.localized, &s).unwrap();
        prop_assert_eq!(&twice.localized, &once.localized);
        prop_assert!(is_isomorphism(&twice.unit).unwrap());
    }

    #[test]
    fn unit_is_a_localization(g in group(), s in family()) {
        let s = Localizer::Family(s);
        let res = localize_group(&g, &s).unwrap();
        prop_assert!(is_localization(&res.unit, &s).unwrap().holds());
        prop_assert!(is_uniquely_s_divisible(&res.localized, &s));
        prop_assert_eq!(res.localized.ring(), &g.ring().union(&s.primes()));
    }

    #[test]
    fn telescope_is_shift_invariant(g in group(), s in family()) {
        let first = multiplication_map(&g, &Integer::from(s.running_product(0)));
        let next = cokernel(&kernel(&first).unwrap().inclusion).unwrap().group;
        let a = telescope_colimit(&g, &Localizer::Family(s.clone())).unwrap().colimit;
        let b = telescope_colimit(&next, &Localizer::Family(s.shifted())).unwrap().colimit;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn at_prime_matches_away_from_torsion_primes(g in group(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        // inverting every prime but p only matters at the torsion primes
        let others: Vec<u64> = g.torsion_primes().into_iter().filter(|&q| q != p).collect();
        let at = localize_group(&g, &Localizer::at(p).unwrap()).unwrap().localized;
        let away = localize_group(&g, &Localizer::Primes(PrimeSet::finite(others).unwrap())).unwrap().localized;
        prop_assert_eq!(at.torsion(), away.torsion());
        prop_assert_eq!(at.rank(), away.rank());
    }
}

fn finite_groups(max_order: u64) -> Vec<AbGroup> {
    catalog(max_order, &PrimeSet::none())
}

#[test]
fn first_isomorphism_theorem_by_element_count() {
    let groups = finite_groups(24);
    let mut checked = 0;
    for g in groups.iter().filter(|g| g.order().unwrap() <= 200u32.into()) {
        let elements = g.elements().unwrap();
        for h in groups.iter().filter(|h| h.order().unwrap() <= 12u32.into()) {
            for f in enumerate_homs(g, h).unwrap().into_iter().take(6) {
                let images: Vec<_> = elements.iter().map(|x| f.apply(x).unwrap()).collect();
                let zero = h.zero_element();
                let ker_count = images.iter().filter(|y| **y == zero).count();
                let img_count = images.iter().collect::<HashSet<_>>().len();
                let ker = kernel(&f).unwrap().group.order().unwrap();
                let img = image(&f).unwrap().group.order().unwrap();
                assert_eq!(ker, ker_count.into());
                assert_eq!(img, img_count.into());
                assert_eq!(g.order().unwrap(), ker * img);
                let coker = cokernel(&f).unwrap().group.order().unwrap();
                assert_eq!(h.order().unwrap(), coker * img_count);
                checked += 1;
            }
        }
    }
    assert!(checked > 1000, "only {checked} homs checked");
}

#[test]
fn composition_is_associative_up_to_order_twelve() {
    let groups = finite_groups(12);
    let budget = Duration::from_secs(20);
    let start = Instant::now();
    let homs = |a: &AbGroup, b: &AbGroup| enumerate_homs(a, b).unwrap();
    let mut triples = 0usize;
    'outer: for a in &groups {
        for b in &groups {
            let fs = homs(a, b);
            for c in &groups {
                let gs = homs(b, c);
                for d in &groups {
                    if start.elapsed() > budget {
                        break 'outer;
                    }
                    let hs = homs(c, d);
                    // a spread of each hom set, always including both ends
                    let pick = |v: &Vec<_>| -> Vec<usize> {
                        let n = v.len();
                        let mut i: Vec<usize> = vec![0, n / 2, n - 1];
                        i.dedup();
                        i
                    };
                    for &i in &pick(&fs) {
                        for &j in &pick(&gs) {
                            for &k in &pick(&hs) {
                                let (f, g, h) = (&fs[i], &gs[j], &hs[k]);
                                let left = compose(h, &compose(g, f).unwrap()).unwrap();
                                let right = compose(&compose(h, g).unwrap(), f).unwrap();
                                assert_eq!(left, right);
                                triples += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    assert!(triples > 0);
}

#[test]
fn hom_counts_match_gcd_product() {
    // for finite G and H, |Hom(G, H)| is the product of gcds of component orders
    let groups = finite_groups(16);
    for g in &groups {
        for h in &groups {
            let expected: Integer = g
                .generator_orders()
                .iter()
                .flat_map(|dj| h.generator_orders().into_iter().map(move |di| num_integer::gcd(di, dj.clone())))
                .product();
            let expected = if expected.is_zero() { Integer::from(1) } else { expected };
            assert_eq!(Integer::from(enumerate_homs(g, h).unwrap().len()), expected);
        }
    }
}

#[test]
fn unit_of_localization_satisfies_the_criterion() {
    let s = Localizer::family(vec![2]).unwrap();
    let unit = localize_group(&AbGroup::from_invariants(0, &[12], PrimeSet::none()).unwrap(), &s).unwrap().unit;
    assert!(is_localization(&unit, &s).unwrap().holds());
}
