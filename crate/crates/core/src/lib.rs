//! Exact factorization of linear operators with polynomial coefficients.
//!
//! The library works in three operator algebras over the rationals:
//!
//! * the Weyl algebra generated by `x1..xn` and `d1..dn` with `di*xi = xi*di + 1`,
//! * the q-Weyl algebra with `di*xi = qi*xi*di + 1`, and
//! * the shift algebra generated by `x1..xn` and `s1..sn` with `si*xi = (xi+1)*si`.
//!
//! Elements are kept in the normal form `sum c * x^a * d^b`.  Factorization
//! proceeds by splitting an operator into its graded parts with respect to the
//! `Z^n`-grading `deg(x^a d^b) = b - a`, rewriting graded parts through the
//! Euler operators `ti = xi*di`, and reducing the general problem to
//! commutative polynomial factorization plus the solution of polynomial
//! systems in the unknown coefficients of a candidate factor pair.
//!
//! Module map:
//!
//! * [`arith`] — exact rationals and commutative multivariate polynomials,
//! * [`ore`] — operator normal forms, products, and the shift-algebra embedding,
//! * [`grading`] — graded decomposition and the Euler-operator rewriting,
//! * [`commfact`] — commutative polynomial factorization over the rationals,
//! * [`groebner`] — lexicographic Groebner bases and rational system solving,
//! * [`gradedfact`] — factorization of graded operators,
//! * [`ansatz`] — factorization of general operators via coefficient systems,
//! * [`expr`] — the text syntax: parsing and canonical printing,
//! * [`util`] — deterministic randomness.

pub mod arith;
pub mod util;
pub mod ore;
pub mod grading;
pub mod commfact;
pub mod groebner;
pub mod gradedfact;
pub mod ansatz;
pub mod expr;
