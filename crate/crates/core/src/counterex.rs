//! Two groups on which power maps misbehave.
//!
//! `Q/Z` is `k`-divisible but not uniquely so. `P = B ⋊ Q`, with `B` the
//! rational functions on `Q` of finite support and `Q` acting by
//! translation `(r·f)(x) = f(x + r)`, is built from two uniquely divisible
//! groups yet `(δ_0, 2)` has no square root. [`nth_root`] decides root
//! existence exactly by Laurent-polynomial division on each coset of the
//! root's translation.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{format_rational, Integer, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CounterexError {
    #[error("exponent must be positive")]
    ZeroExponent,
}

fn int(n: i64) -> Rational {
    Rational::from_integer(Integer::from(n))
}

/// An element of `Q/Z`, represented in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QmodZElem(Rational);

impl QmodZElem {
    pub fn new(q: Rational) -> Self {
        let floor = q.floor();
        QmodZElem(q - floor)
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn add(&self, other: &QmodZElem) -> QmodZElem {
        QmodZElem::new(&self.0 + &other.0)
    }

    pub fn times(&self, k: u64) -> QmodZElem {
        QmodZElem::new(&self.0 * int(k as i64))
    }
}

impl fmt::Display for QmodZElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

/// Every `x` with `k·x = y` in `Q/Z`, in increasing order.
pub fn divisibility_solutions(y: &QmodZElem, k: u64) -> Result<Vec<QmodZElem>, CounterexError> {
    if k == 0 {
        return Err(CounterexError::ZeroExponent);
    }
    let k_q = int(k as i64);
    Ok((0..k)
        .map(|j| QmodZElem::new((&y.0 + int(j as i64)) / &k_q))
        .collect())
}

/// A function `Q → Q` with finite support.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundedFn(BTreeMap<Rational, Rational>);

impl BoundedFn {
    pub fn zero() -> Self {
        BoundedFn::default()
    }

    /// `δ_x`.
    pub fn delta(x: Rational) -> Self {
        BoundedFn::from_points([(x, Rational::one())])
    }

    /// Sums repeated points and drops zero values.
    pub fn from_points(points: impl IntoIterator<Item = (Rational, Rational)>) -> Self {
        let mut f = BoundedFn::zero();
        for (x, v) in points {
            f.add_at(x, v);
        }
        f
    }

    fn add_at(&mut self, x: Rational, v: Rational) {
        use std::collections::btree_map::Entry;
        match self.0.entry(x) {
            Entry::Vacant(e) => {
                if !v.is_zero() {
                    e.insert(v);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += v;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.get(x).cloned().unwrap_or_else(Rational::zero)
    }

    /// `(point, value)` pairs in increasing point order.
    pub fn support(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &BoundedFn) -> BoundedFn {
        let mut out = self.clone();
        for (x, v) in &other.0 {
            out.add_at(x.clone(), v.clone());
        }
        out
    }

    pub fn neg(&self) -> BoundedFn {
        BoundedFn(self.0.iter().map(|(x, v)| (x.clone(), -v)).collect())
    }

    pub fn scale(&self, c: &Rational) -> BoundedFn {
        if c.is_zero() {
            return BoundedFn::zero();
        }
        BoundedFn(self.0.iter().map(|(x, v)| (x.clone(), v * c)).collect())
    }

    /// `x ↦ f(x + r)`.
    pub fn translate(&self, r: &Rational) -> BoundedFn {
        BoundedFn(self.0.iter().map(|(x, v)| (x - r, v.clone())).collect())
    }
}

impl fmt::Display for BoundedFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (x, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if !v.is_one() {
                write!(f, "{}·", format_rational(v))?;
            }
            write!(f, "δ_{}", format_rational(x))?;
        }
        Ok(())
    }
}

/// An element `(f, r)` of `B ⋊ Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PElem {
    pub f: BoundedFn,
    pub r: Rational,
}

impl PElem {
    pub fn new(f: BoundedFn, r: Rational) -> Self {
        PElem { f, r }
    }

    pub fn identity() -> Self {
        PElem::new(BoundedFn::zero(), Rational::zero())
    }
}

impl fmt::Display for PElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.f, format_rational(&self.r))
    }
}

/// `(f, r)·(g, s) = (f + r·g, r + s)`.
pub fn p_mul(a: &PElem, b: &PElem) -> PElem {
    PElem::new(a.f.add(&b.f.translate(&a.r)), &a.r + &b.r)
}

pub fn p_inv(a: &PElem) -> PElem {
    let r = -&a.r;
    PElem::new(a.f.translate(&r).neg(), r)
}

/// `a^n = (Σ_{i<n} (i·r)·f, n·r)`.
pub fn p_pow(a: &PElem, n: u64) -> Result<PElem, CounterexError> {
    if n == 0 {
        return Err(CounterexError::ZeroExponent);
    }
    let mut f = BoundedFn::zero();
    for i in 0..n {
        f = f.add(&a.f.translate(&(&a.r * int(i as i64))));
    }
    Ok(PElem::new(f, &a.r * int(n as i64)))
}

/// The unique `g` with `k·g = f` in `B`.
pub fn b_uniquely_divisible_witness(f: &BoundedFn, k: u64) -> Result<BoundedFn, CounterexError> {
    if k == 0 {
        return Err(CounterexError::ZeroExponent);
    }
    Ok(f.scale(&Rational::new(Integer::one(), Integer::from(k))))
}

/// A Laurent polynomial `Σ c_i z^{low + i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent {
    pub low: i64,
    pub coeffs: Vec<Rational>,
}

impl Laurent {
    fn from_map(terms: &BTreeMap<i64, Rational>) -> Laurent {
        let Some((&low, _)) = terms.first_key_value() else {
            return Laurent {
                low: 0,
                coeffs: vec![],
            };
        };
        let high = *terms.last_key_value().expect("nonempty").0;
        let coeffs = (low..=high)
            .map(|e| terms.get(&e).cloned().unwrap_or_else(Rational::zero))
            .collect();
        Laurent { low, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{}·z^{}", format_rational(c), self.low + i as i64)?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Why a coset admits no root: `T(z)` is not a multiple of
/// `1 + z + … + z^{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetObstruction {
    /// Coset `representative + step·Z`; the point `representative - j·step`
    /// carries exponent `j`.
    pub representative: Rational,
    pub step: Rational,
    pub target: Laurent,
    pub divisor_degree: u64,
    /// Remainder of `T` divided by the divisor, exponents shifted as in `target`.
    pub remainder: Laurent,
}

impl fmt::Display for CosetObstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let divisor: Vec<String> = (0..=self.divisor_degree)
            .map(|e| if e == 0 { "1".to_string() } else { format!("z^{e}") })
            .collect();
        write!(
            f,
            "coset {} + {}Z: {} does not divide {} (remainder {})",
            format_rational(&self.representative),
            format_rational(&self.step),
            divisor.join(" + "),
            self.target,
            self.remainder
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootOutcome {
    Root(PElem),
    NoSolution(CosetObstruction),
}

/// Quotient and remainder of `num` by `1 + z + … + z^d`, as plain polynomials.
fn divide_by_geometric(num: &[Rational], d: usize) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = num.to_vec();
    if rem.len() <= d {
        return (vec![], rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - d];
    for top in (d..rem.len()).rev() {
        let c = rem[top].clone();
        if c.is_zero() {
            continue;
        }
        quot[top - d] = c.clone();
        for k in 0..=d {
            rem[top - k] -= &c;
        }
    }
    rem.truncate(d);
    (quot, rem)
}

/// Decides whether `target` has an `n`-th root in `P` and returns one.
///
/// A root must have translation `s = target.r / n`. For `s = 0` the root is
/// `(target.f / n, 0)`. Otherwise the equation `Σ_{i<n} g(x + i·s) = T(x)`
/// splits over the cosets `x_0 + sZ`; indexing the point `x_0 - j·s` by `z^j`
/// turns it into `G(z)·(1 + z + … + z^{n-1}) = T(z)`, which is solvable in
/// Laurent polynomials iff the division is exact. The root is then unique.
pub fn nth_root(target: &PElem, n: u64) -> Result<RootOutcome, CounterexError> {
    if n == 0 {
        return Err(CounterexError::ZeroExponent);
    }
    let s = &target.r / int(n as i64);
    if s.is_zero() {
        let f = b_uniquely_divisible_witness(&target.f, n)?;
        return Ok(RootOutcome::Root(PElem::new(f, s)));
    }

    let mut cosets: BTreeMap<Rational, BTreeMap<i64, Rational>> = BTreeMap::new();
    for (x, v) in target.f.support() {
        let k = (x / &s).floor();
        let rep = x - &k * &s;
        let j: i64 = (-k.to_integer()).try_into().expect("support index fits in i64");
        cosets.entry(rep).or_default().insert(j, v.clone());
    }

    let d = (n - 1) as usize;
    let mut root = BoundedFn::zero();
    for (rep, terms) in &cosets {
        let t = Laurent::from_map(terms);
        let (quot, rem) = divide_by_geometric(&t.coeffs, d);
        if rem.iter().any(|c| !c.is_zero()) {
            return Ok(RootOutcome::NoSolution(CosetObstruction {
                representative: rep.clone(),
                step: s.clone(),
                divisor_degree: n - 1,
                remainder: Laurent {
                    low: t.low,
                    coeffs: rem,
                },
                target: t,
            }));
        }
        for (i, c) in quot.into_iter().enumerate() {
            let j = t.low + i as i64;
            root.add_at(rep - &s * int(j), c);
        }
    }
    Ok(RootOutcome::Root(PElem::new(root, s)))
}

/// Checks `p_pow(root, n) = target` for a returned root.
pub fn verify_root(root: &PElem, target: &PElem, n: u64) -> bool {
    p_pow(root, n).is_ok_and(|p| &p == target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn delta(x: i64) -> BoundedFn {
        BoundedFn::delta(int(x))
    }

    #[test]
    fn divisibility_examples() {
        let sols = |y: Rational, k| -> Vec<Rational> {
            divisibility_solutions(&QmodZElem::new(y), k)
                .unwrap()
                .into_iter()
                .map(|x| x.value().clone())
                .collect()
        };
        assert_eq!(sols(q(0, 1), 2), vec![q(0, 1), q(1, 2)]);
        assert_eq!(sols(q(1, 3), 2), vec![q(1, 6), q(2, 3)]);
        assert_eq!(sols(q(1, 2), 3), vec![q(1, 6), q(1, 2), q(5, 6)]);
        assert_eq!(QmodZElem::new(q(-1, 3)).value(), &q(2, 3));
        assert_eq!(QmodZElem::new(q(7, 3)).value(), &q(1, 3));
    }

    #[test]
    fn divisibility_matches_search_over_sixths() {
        // k·x = y with x = a/6
        for (y, k) in [(q(1, 3), 2u64), (q(1, 2), 3)] {
            let found: Vec<Rational> = (0..6)
                .map(|a| q(a, 6))
                .filter(|x| QmodZElem::new(x.clone()).times(k) == QmodZElem::new(y.clone()))
                .collect();
            let sols: Vec<Rational> = divisibility_solutions(&QmodZElem::new(y), k)
                .unwrap()
                .into_iter()
                .map(|x| x.value().clone())
                .collect();
            assert_eq!(found, sols);
        }
    }

    #[test]
    fn multiplication_examples() {
        let a = PElem::new(delta(0), int(1));
        assert_eq!(p_mul(&PElem::identity(), &a), a);
        assert_eq!(p_mul(&a, &a), PElem::new(delta(0).add(&delta(-1)), int(2)));
        assert_eq!(p_mul(&a, &p_inv(&a)), PElem::identity());
        assert_eq!(p_pow(&a, 1).unwrap(), a);
        assert_eq!(p_pow(&a, 2).unwrap(), p_mul(&a, &a));
        assert_eq!(p_pow(&PElem::new(BoundedFn::zero(), q(3, 2)), 4).unwrap(), PElem::new(BoundedFn::zero(), int(6)));
        assert_eq!(p_pow(&a, 0), Err(CounterexError::ZeroExponent));
    }

    #[test]
    fn delta_two_has_no_square_root() {
        let out = nth_root(&PElem::new(delta(0), int(2)), 2).unwrap();
        let RootOutcome::NoSolution(cert) = out else {
            panic!("expected an obstruction");
        };
        assert_eq!(cert.representative, int(0));
        assert_eq!(cert.step, int(1));
        assert_eq!(cert.divisor_degree, 1);
        assert_eq!(cert.target, Laurent { low: 0, coeffs: vec![int(1)] });
        assert_eq!(cert.remainder, Laurent { low: 0, coeffs: vec![int(1)] });
        assert_eq!(cert.to_string(), "coset 0 + 1Z: 1 + z^1 does not divide 1·z^0 (remainder 1·z^0)");
    }

    #[test]
    fn delta_has_no_kth_root_for_small_k() {
        for k in 2..=6 {
            let out = nth_root(&PElem::new(delta(0), int(k as i64)), k).unwrap();
            assert!(matches!(out, RootOutcome::NoSolution(_)), "k = {k}");
        }
    }

    #[test]
    fn root_examples() {
        let target = PElem::new(delta(0).add(&delta(-1)), int(2));
        assert_eq!(nth_root(&target, 2).unwrap(), RootOutcome::Root(PElem::new(delta(0), int(1))));
        assert_eq!(
            nth_root(&PElem::new(BoundedFn::zero(), int(2)), 2).unwrap(),
            RootOutcome::Root(PElem::new(BoundedFn::zero(), int(1)))
        );
        let flat = PElem::new(delta(3), int(0));
        assert_eq!(
            nth_root(&flat, 4).unwrap(),
            RootOutcome::Root(PElem::new(BoundedFn::from_points([(int(3), q(1, 4))]), int(0)))
        );
    }

    #[test]
    fn b_division_examples() {
        assert_eq!(
            b_uniquely_divisible_witness(&delta(0), 2).unwrap(),
            BoundedFn::from_points([(int(0), q(1, 2))])
        );
        assert!(b_uniquely_divisible_witness(&BoundedFn::zero(), 5).unwrap().is_zero());
        assert_eq!(b_uniquely_divisible_witness(&delta(7), 1).unwrap(), delta(7));
    }

    #[test]
    fn from_points_cancels() {
        let f = BoundedFn::from_points([(int(1), int(2)), (int(1), int(-2)), (int(0), int(1))]);
        assert_eq!(f, delta(0));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-10i64..=10, 1i64..=10).prop_map(|(n, d)| q(n, d))
    }

    fn bounded_fn() -> impl Strategy<Value = BoundedFn> {
        prop::collection::vec((small_rational(), small_rational()), 0..=4).prop_map(BoundedFn::from_points)
    }

    fn pelem() -> impl Strategy<Value = PElem> {
        (bounded_fn(), small_rational()).prop_map(|(f, r)| PElem::new(f, r))
    }

    proptest! {
        #[test]
        fn group_laws(a in pelem(), b in pelem(), c in pelem()) {
            prop_assert_eq!(p_mul(&p_mul(&a, &b), &c), p_mul(&a, &p_mul(&b, &c)));
            prop_assert_eq!(p_mul(&PElem::identity(), &a), a.clone());
            prop_assert_eq!(p_mul(&a, &PElem::identity()), a.clone());
            prop_assert_eq!(p_mul(&a, &p_inv(&a)), PElem::identity());
            prop_assert_eq!(p_mul(&p_inv(&a), &a), PElem::identity());
        }

        #[test]
        fn powers_add(a in pelem(), n in 1u64..5, m in 1u64..5) {
            let lhs = p_pow(&a, n + m).unwrap();
            let rhs = p_mul(&p_pow(&a, n).unwrap(), &p_pow(&a, m).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn roots_of_powers_are_found(g in pelem(), n in 1u64..5) {
            let target = p_pow(&g, n).unwrap();
            match nth_root(&target, n).unwrap() {
                RootOutcome::Root(root) => {
                    prop_assert!(verify_root(&root, &target, n));
                    // the root with a given translation is unique
                    prop_assert_eq!(root, g);
                }
                RootOutcome::NoSolution(cert) => prop_assert!(false, "missed root: {}", cert),
            }
        }

        #[test]
        fn returned_roots_are_sound(t in pelem(), n in 1u64..5) {
            if let RootOutcome::Root(root) = nth_root(&t, n).unwrap() {
                prop_assert!(verify_root(&root, &t, n));
            }
        }

        #[test]
        fn qz_solutions_are_exact(num in 0i64..24, den in 1i64..=12, k in 1u64..=6) {
            let y = QmodZElem::new(q(num, den));
            let sols = divisibility_solutions(&y, k).unwrap();
            prop_assert_eq!(sols.len() as u64, k);
            for x in &sols {
                prop_assert_eq!(x.times(k), y.clone());
            }
            let mut distinct = sols.clone();
            distinct.dedup();
            prop_assert_eq!(distinct.len(), sols.len());
        }
    }
}
