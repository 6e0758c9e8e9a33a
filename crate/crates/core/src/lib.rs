//! Exact localization of finitely generated abelian groups away from sets of
//! primes, with the homotopy-group level consequences for simply connected
//! truncated types and Eilenberg–Mac Lane spaces.
//!
//! * [`arith`]: rationals, factorization, prime sets and generator families.
//! * [`abgroup`]: groups over Z_T in primary form, homs, Smith normal form,
//!   kernels and cokernels, exhaustive hom enumeration.
//! * [`localize`]: the localization functor, its telescope description,
//!   divisibility and is-a-localization decisions, lifting along power maps.
//! * [`homotopy`]: homotopy-group descriptors of simply connected types.
//! * [`counterex`]: divisibility in Q/Z and roots in the translation
//!   semidirect product `B ⋊ Q`.
//! * [`par`]: sequential/parallel execution of the data-parallel loops.

pub mod abgroup;
pub mod arith;
pub mod counterex;
pub mod homotopy;
pub mod localize;
pub mod par;

pub use abgroup::{AbGroup, GroupError, GroupHom, IntMatrix};
pub use arith::{Integer, Localizer, PrimeSet, Rational, SFamily};
