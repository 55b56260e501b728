//! The `Z^n`-grading of the operator algebras and Euler-operator forms.
//!
//! A term `x^a d^b` has degree vector `b - a`; an operator is *graded*
//! (homogeneous) when all terms share one degree vector.  The degree-zero part
//! is the commutative polynomial ring in the Euler operators `ti = xi * di`,
//! and every graded operator `p` of degree `z` factors uniquely as
//!
//! ```text
//! p = ptilde(t1..tn) * x^(e(z)) * d^(w(z)),
//!     e(z)_i = max(-z_i, 0),  w(z)_i = max(z_i, 0)
//! ```
//!
//! ([`to_theta_form`] / [`from_theta_form`]).  Moving Euler polynomials past
//! monomials is an affine substitution on the `t`-variables
//! ([`theta_shift`]), and the product of two graded operators acquires a
//! bridging polynomial [`gamma`]:
//!
//! ```text
//! (p, deg a) * (q, deg b) =
//!     ptilde(t) * theta_shift(qtilde, a) * gamma(a, b) * x^(e(a+b)) d^(w(a+b)).
//! ```
//!
//! Finally, the only monic irreducibles of `K[t1..tn]` that factor further as
//! operators are `ti` and `ti + 1/qi` ([`theta_rewrite_reducibles`]); this is
//! what makes graded factorization effective.

use crate::arith::{theta_vars, CommPoly, Rational};
use crate::ore::{AlgebraKind, AlgebraSpec, OrePoly};
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Degree vector in `Z^n`.
pub type DegreeVector = Vec<i64>;

/// Error for operations requiring graded input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotGraded;

impl fmt::Display for NotGraded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "operator is not homogeneous with respect to the Z^n-grading")
    }
}

impl std::error::Error for NotGraded {}

/// Degree vector `b - a` of one packed exponent vector.
pub fn term_degree(n: usize, mono: &[u32]) -> DegreeVector {
    let (a, b) = mono.split_at(n);
    a.iter().zip(b).map(|(&ai, &bi)| bi as i64 - ai as i64).collect()
}

/// Common degree vector of all terms, if the operator is nonzero and graded.
pub fn degree_of(p: &OrePoly) -> Option<DegreeVector> {
    let n = p.n();
    let mut deg: Option<DegreeVector> = None;
    for (m, _) in p.terms() {
        let d = term_degree(n, m);
        match &deg {
            None => deg = Some(d),
            Some(z) if *z == d => {}
            Some(_) => return None,
        }
    }
    deg
}

/// True if nonzero and homogeneous.
pub fn is_graded(p: &OrePoly) -> bool {
    degree_of(p).is_some()
}

/// Splits an operator into its graded parts, sorted descending under
/// [`compare_degrees`].
pub fn graded_decomposition(p: &OrePoly) -> Vec<(DegreeVector, OrePoly)> {
    let n = p.n();
    let mut parts: Vec<(DegreeVector, OrePoly)> = Vec::new();
    for (m, c) in p.terms() {
        let d = term_degree(n, m);
        match parts.iter_mut().find(|(z, _)| *z == d) {
            Some((_, q)) => q.add_term(m.clone(), c.clone()),
            None => {
                let mut q = OrePoly::zero(p.algebra());
                q.add_term(m.clone(), c.clone());
                parts.push((d, q));
            }
        }
    }
    parts.sort_by(|(za, _), (zb, _)| compare_degrees(zb, za));
    parts
}

/// Total order on degree vectors: by coordinate sum, ties lexicographically.
pub fn compare_degrees(a: &DegreeVector, b: &DegreeVector) -> Ordering {
    let sa: i64 = a.iter().sum();
    let sb: i64 = b.iter().sum();
    sa.cmp(&sb).then_with(|| a.cmp(b))
}

/// Pure lexicographic order on degree vectors (first coordinate dominant);
/// the refinement used by the coefficient-system machinery to linearize
/// graded parts.
pub fn lex_compare(a: &DegreeVector, b: &DegreeVector) -> Ordering {
    a.cmp(b)
}

/// `e(z)`: componentwise `max(-z, 0)`.
pub fn e_of(z: &DegreeVector) -> Vec<u32> {
    z.iter().map(|&zi| (-zi).max(0) as u32).collect()
}

/// `w(z)`: componentwise `max(z, 0)`.
pub fn w_of(z: &DegreeVector) -> Vec<u32> {
    z.iter().map(|&zi| zi.max(0) as u32).collect()
}

/// The monomial `x^(e(z)) d^(w(z))` of degree `z`.
pub fn monomial_of_degree(algebra: &AlgebraSpec, z: &DegreeVector) -> OrePoly {
    OrePoly::monomial_ab(algebra, &e_of(z), &w_of(z), Rational::one())
}

/// `x_i^m d_i^m` as a polynomial in the Euler variables:
///
/// * Weyl / shift-free case: `prod_{j=0}^{m-1} (ti - j)`
/// * q-Weyl: `qi^-(0+1+..+(m-1)) * prod_{j=0}^{m-1} (ti - [j])`
pub fn xd_to_theta(algebra: &AlgebraSpec, i: usize, m: u32) -> CommPoly {
    let tv = theta_vars(algebra.n);
    let mut acc = CommPoly::one(&tv);
    let ti = CommPoly::var(&tv, i);
    let mut qexp = Rational::one();
    let q = algebra.q_at(i);
    for j in 0..m {
        let qj = algebra.q_integer(i, j);
        acc = acc.mul(&ti.sub(&CommPoly::constant(&tv, qj)));
        for _ in 0..j {
            qexp *= &q;
        }
    }
    acc.scalar_mul(&qexp.recip())
}

/// A graded operator in Euler form: `theta(t1..tn) * x^(e(z)) d^(w(z))`.
#[derive(Clone, PartialEq, Eq)]
pub struct ThetaForm {
    pub algebra: AlgebraSpec,
    pub z: DegreeVector,
    pub theta: CommPoly,
}

impl fmt::Debug for ThetaForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) @ {:?}", self.theta, self.z)
    }
}

/// Rewrites a nonzero graded operator into Euler form.
pub fn to_theta_form(p: &OrePoly) -> Result<ThetaForm, NotGraded> {
    assert!(
        p.algebra().kind != AlgebraKind::Shift,
        "Euler forms are defined in the (q-)Weyl algebras"
    );
    if p.is_zero() {
        return Err(NotGraded);
    }
    let z = degree_of(p).ok_or(NotGraded)?;
    let n = p.n();
    let e = e_of(&z);
    let tv = theta_vars(n);
    let mut acc = CommPoly::zero(&tv);
    for (m, c) in p.terms() {
        let (a, b) = m.split_at(n);
        // a = t + e, b = t + w for a unique contraction vector t >= 0.
        let mut f = CommPoly::constant(&tv, c.clone());
        for i in 0..n {
            let ti = a[i] - e[i];
            debug_assert_eq!(b[i] - w_of(&z)[i], ti);
            if ti > 0 {
                f = f.mul(&xd_to_theta(p.algebra(), i, ti));
            }
        }
        // Pull the Euler polynomial past x^e: per unit step in coordinate i,
        // t_i -> (t_i - 1) / q_i.
        for i in 0..n {
            for _ in 0..e[i] {
                let qi = p.algebra().q_at(i);
                f = f.affine_substitute(i, &qi.recip(), &(-qi.recip()));
            }
        }
        acc = acc.add(&f);
    }
    Ok(ThetaForm { algebra: p.algebra().clone(), z, theta: acc })
}

/// Expands an Euler form back into operator normal form.
pub fn from_theta_form(tf: &ThetaForm) -> OrePoly {
    let n = tf.algebra.n;
    let tail = monomial_of_degree(&tf.algebra, &tf.z);
    // Cache powers of each Euler operator.
    let mut theta_pows: Vec<Vec<OrePoly>> = Vec::with_capacity(n);
    for i in 0..n {
        let ti = OrePoly::x(&tf.algebra, i).multiply(&OrePoly::d(&tf.algebra, i));
        let maxe = tf.theta.degree_in(i).unwrap_or(0);
        let mut pows = vec![OrePoly::one(&tf.algebra)];
        for _ in 0..maxe {
            pows.push(pows.last().unwrap().multiply(&ti));
        }
        theta_pows.push(pows);
    }
    let mut acc = OrePoly::zero(&tf.algebra);
    for (mono, c) in tf.theta.terms() {
        let mut term = OrePoly::constant(&tf.algebra, c.clone());
        for i in 0..n {
            if mono[i] > 0 {
                term = term.multiply(&theta_pows[i][mono[i] as usize]);
            }
        }
        acc = acc.add(&term);
    }
    acc.multiply(&tail)
}

/// Conjugates an Euler polynomial past the monomial of degree `z`:
///
/// ```text
/// x^(e(z)) d^(w(z)) * g(t) = theta_shift(g, z) * x^(e(z)) d^(w(z))
/// ```
///
/// In the Weyl case this is the translation `g(t + z)`; in the q-Weyl case
/// coordinate `i` maps through `t_i -> q_i^(z_i) t_i + [z_i]` for `z_i >= 0`
/// and `t_i -> (t_i - [-z_i]) / q_i^(-z_i)` for `z_i < 0`.
pub fn theta_shift(g: &CommPoly, z: &DegreeVector, algebra: &AlgebraSpec) -> CommPoly {
    let mut out = g.clone();
    for (i, &zi) in z.iter().enumerate() {
        if zi == 0 {
            continue;
        }
        let q = algebra.q_at(i);
        if zi > 0 {
            let m = zi as u32;
            let mut qpow = Rational::one();
            for _ in 0..m {
                qpow *= &q;
            }
            out = out.affine_substitute(i, &qpow, &algebra.q_integer(i, m));
        } else {
            let m = (-zi) as u32;
            let mut qpow = Rational::one();
            for _ in 0..m {
                qpow *= &q;
            }
            let a = qpow.recip();
            let b = -algebra.q_integer(i, m) * &a;
            out = out.affine_substitute(i, &a, &b);
        }
    }
    out
}

/// The bridging polynomial of the graded product:
///
/// ```text
/// x^(e(a)) d^(w(a)) * x^(e(b)) d^(w(b)) = gamma(a, b) * x^(e(a+b)) d^(w(a+b))
/// ```
///
/// Computed exactly from the operator product of the two monomials.
pub fn gamma(algebra: &AlgebraSpec, a: &DegreeVector, b: &DegreeVector) -> CommPoly {
    let prod = monomial_of_degree(algebra, a).multiply(&monomial_of_degree(algebra, b));
    let tf = to_theta_form(&prod).expect("monomial products are graded");
    debug_assert_eq!(
        tf.z,
        a.iter().zip(b).map(|(&x, &y)| x + y).collect::<DegreeVector>()
    );
    tf.theta
}

/// If the monic Euler polynomial `f` factors further as an operator, returns
/// the operator factors and the accompanying unit:
///
/// * `ti    = xi * di`
/// * `ti + 1/qi = (1/qi) * di * xi`  (`ti + 1 = di * xi` in the Weyl case)
///
/// All other monic irreducibles of `K[t1..tn]` stay irreducible as operators.
pub fn theta_rewrite_reducibles(
    algebra: &AlgebraSpec,
    f: &CommPoly,
) -> Option<(Vec<OrePoly>, Rational)> {
    if f.total_degree() != Some(1) || f.num_terms() > 2 {
        return None;
    }
    // Must be t_i + c for a single i.
    let sup = f.support_vars();
    if sup.len() != 1 {
        return None;
    }
    let i = sup[0];
    let mut lin = vec![0u32; f.nvars()];
    lin[i] = 1;
    if !f.coeff(&lin).is_one() {
        return None;
    }
    let c = f.coeff(&vec![0; f.nvars()]);
    let x = OrePoly::x(algebra, i);
    let d = OrePoly::d(algebra, i);
    if c.is_zero() {
        return Some((vec![x, d], Rational::one()));
    }
    let qi = algebra.q_at(i);
    if c == qi.recip() {
        return Some((vec![d, x], qi.recip()));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratq};
    use crate::expr::parse;

    fn weyl2() -> AlgebraSpec {
        AlgebraSpec::weyl(2)
    }

    #[test]
    fn degree_of_terms_and_sums() {
        let alg = weyl2();
        let p = parse("x1*d1*d2 + 3*d2", &alg).unwrap();
        assert_eq!(degree_of(&p), Some(vec![0, 1]));
        let q = parse("x1*d2 + d1", &alg).unwrap();
        assert_eq!(degree_of(&q), None);
        assert!(is_graded(&p));
        assert!(!is_graded(&q));
    }

    #[test]
    fn decomposition_partitions_terms() {
        let alg = weyl2();
        let p = parse("d1^3 + x1*d1^2*d2 + 2*d1*d2 + 2*d1^2 + 2*x1*d1*d2 + 2*d2 + d1 + x1*d2", &alg)
            .unwrap();
        let parts = graded_decomposition(&p);
        let mut sum = OrePoly::zero(&alg);
        for (z, part) in &parts {
            assert_eq!(degree_of(part).as_ref(), Some(z));
            sum = sum.add(part);
        }
        assert_eq!(sum, p);
        // Degrees are strictly descending in the announced order.
        for w in parts.windows(2) {
            assert_eq!(compare_degrees(&w[0].0, &w[1].0), Ordering::Greater);
        }
    }

    #[test]
    fn compare_degrees_sum_then_lex() {
        assert_eq!(compare_degrees(&vec![2, 0], &vec![0, 1]), Ordering::Greater);
        assert_eq!(compare_degrees(&vec![1, 0], &vec![0, 1]), Ordering::Greater);
        assert_eq!(compare_degrees(&vec![-1, 2], &vec![2, -1]), Ordering::Less);
        assert_eq!(compare_degrees(&vec![1, 1], &vec![1, 1]), Ordering::Equal);
    }

    #[test]
    fn euler_product_identity_weyl() {
        // x^m d^m equals the stated Euler polynomial, checked by expanding
        // the Euler polynomial back through operator products.
        let alg = AlgebraSpec::weyl(1);
        for m in 0..=4u32 {
            let lhs = OrePoly::x(&alg, 0).pow(m).multiply(&OrePoly::d(&alg, 0).pow(m));
            let tf = ThetaForm {
                algebra: alg.clone(),
                z: vec![0],
                theta: xd_to_theta(&alg, 0, m),
            };
            assert_eq!(from_theta_form(&tf), lhs, "m={}", m);
        }
    }

    #[test]
    fn euler_product_identity_qweyl() {
        let alg = AlgebraSpec::qweyl(1, vec![ratq(2, 3)]);
        for m in 0..=4u32 {
            let lhs = OrePoly::x(&alg, 0).pow(m).multiply(&OrePoly::d(&alg, 0).pow(m));
            let tf = ThetaForm {
                algebra: alg.clone(),
                z: vec![0],
                theta: xd_to_theta(&alg, 0, m),
            };
            assert_eq!(from_theta_form(&tf), lhs, "m={}", m);
        }
    }

    #[test]
    fn theta_form_roundtrip() {
        let alg = weyl2();
        for s in [
            "x1*d1*d2+3*d2",
            "x1^2*x2*d1^2*d2 - 3*x1*x2*d1*d2 + x2*d2",
            "x1^2*d2 + 5*x1^3*x2*d1*d2^2",
            "x1^3",
            "d2^2",
            "x1*x2^2*d1*d2^2",
        ] {
            let p = parse(s, &alg).unwrap();
            let tf = to_theta_form(&p).unwrap();
            assert_eq!(from_theta_form(&tf), p, "input {}", s);
        }
    }

    #[test]
    fn theta_form_roundtrip_qweyl() {
        let alg = AlgebraSpec::qweyl(2, vec![ratq(2, 1), ratq(5, 7)]);
        let x1 = OrePoly::x(&alg, 0);
        let d1 = OrePoly::d(&alg, 0);
        let d2 = OrePoly::d(&alg, 1);
        // Homogeneous of degree (1, 1): terms x^a d^b with b - a = (1,1).
        let p = d1
            .multiply(&d2)
            .add(&x1.multiply(&d1.pow(2)).multiply(&d2).scalar_mul(&rat(3)));
        let tf = to_theta_form(&p).unwrap();
        assert_eq!(from_theta_form(&tf), p);
    }

    #[test]
    fn theta_form_rejects_inhomogeneous() {
        let alg = weyl2();
        let p = parse("x1*d2 + d1", &alg).unwrap();
        assert_eq!(to_theta_form(&p), Err(NotGraded));
    }

    #[test]
    fn theta_shift_is_the_conjugation_law() {
        for alg in [AlgebraSpec::weyl(2), AlgebraSpec::qweyl(2, vec![ratq(3, 2), ratq(2, 1)])] {
            let tv = theta_vars(2);
            let g = CommPoly::from_terms(
                &tv,
                vec![
                    (vec![2, 0], rat(1)),
                    (vec![1, 1], rat(-2)),
                    (vec![0, 0], rat(5)),
                ],
            );
            for z in [vec![1i64, 0], vec![0, -2], vec![2, -1], vec![-1, 1]] {
                let mono = monomial_of_degree(&alg, &z);
                let lhs = mono.multiply(&from_theta_form(&ThetaForm {
                    algebra: alg.clone(),
                    z: vec![0, 0],
                    theta: g.clone(),
                }));
                let shifted = theta_shift(&g, &z, &alg);
                let rhs = from_theta_form(&ThetaForm {
                    algebra: alg.clone(),
                    z: vec![0, 0],
                    theta: shifted,
                })
                .multiply(&mono);
                assert_eq!(lhs, rhs, "z = {:?}", z);
            }
        }
    }

    /// Independent closed form for the Weyl bridging polynomial, case by case
    /// in each coordinate.
    fn gamma_weyl_closed(n: usize, a: &DegreeVector, b: &DegreeVector) -> CommPoly {
        let tv = theta_vars(n);
        let mut acc = CommPoly::one(&tv);
        for i in 0..n {
            let ti = CommPoly::var(&tv, i);
            let lin = |c: i64| ti.add(&CommPoly::constant(&tv, rat(c)));
            let (ai, bi) = (a[i], b[i]);
            if ai >= 0 && bi >= 0 || ai <= 0 && bi <= 0 {
                continue;
            }
            if ai > 0 && bi < 0 {
                // d^ai then x^(-bi)
                let (p, m) = (ai, -bi);
                let lo = if p <= m { 1 } else { p - m + 1 };
                for j in lo..=p {
                    acc = acc.mul(&lin(j));
                }
            } else {
                // x^(-ai) then d^bi
                let (m, p) = (-ai, bi);
                if p <= m {
                    for j in (m - p)..m {
                        acc = acc.mul(&lin(-j));
                    }
                } else {
                    for j in 0..m {
                        acc = acc.mul(&lin(-j));
                    }
                }
            }
        }
        acc
    }

    #[test]
    fn gamma_matches_closed_form_weyl() {
        let alg = weyl2();
        for a1 in -2i64..=2 {
            for b1 in -2i64..=2 {
                for a2 in -1i64..=1 {
                    for b2 in -1i64..=1 {
                        let a = vec![a1, a2];
                        let b = vec![b1, b2];
                        assert_eq!(
                            gamma(&alg, &a, &b),
                            gamma_weyl_closed(2, &a, &b),
                            "a={:?} b={:?}",
                            a,
                            b
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn gamma_known_values() {
        let alg = AlgebraSpec::weyl(1);
        let tv = theta_vars(1);
        let t = CommPoly::var(&tv, 0);
        let c = |k: i64| CommPoly::constant(&tv, rat(k));
        assert_eq!(gamma(&alg, &vec![1], &vec![-1]), t.add(&c(1)));
        assert_eq!(gamma(&alg, &vec![-1], &vec![1]), t.clone());
        assert_eq!(gamma(&alg, &vec![-2], &vec![1]), t.sub(&c(1)));
        assert_eq!(gamma(&alg, &vec![2], &vec![-1]), t.add(&c(2)));
        assert_eq!(gamma(&alg, &vec![1], &vec![1]), CommPoly::one(&tv));
    }

    #[test]
    fn gamma_defining_relation_qweyl() {
        let alg = AlgebraSpec::qweyl(1, vec![ratq(3, 1)]);
        for a1 in -2i64..=2 {
            for b1 in -2i64..=2 {
                let a = vec![a1];
                let b = vec![b1];
                let g = gamma(&alg, &a, &b);
                let lhs =
                    monomial_of_degree(&alg, &a).multiply(&monomial_of_degree(&alg, &b));
                let sum = vec![a1 + b1];
                let rhs = from_theta_form(&ThetaForm {
                    algebra: alg.clone(),
                    z: sum,
                    theta: g,
                });
                assert_eq!(lhs, rhs, "a={:?} b={:?}", a, b);
            }
        }
    }

    #[test]
    fn graded_product_formula() {
        // ptilde * theta_shift(qtilde, a) * gamma(a,b) matches the operator product.
        let alg = weyl2();
        let p = parse("x1*x2*d1*d2^2 + 2*x2*d2", &alg).unwrap(); // graded? x1x2d1d2^2: (1,2)-(1,1)=(0,1); x2d2: (0,1)-(0,1)...
        let p = {
            // build a genuinely graded pair instead
            let _ = p;
            parse("x1*d1*d2 + 3*d2", &alg).unwrap() // degree (0,1)
        };
        let q = parse("x2*d1^2 + d1^2*x2 - x2*d1^2", &alg).unwrap(); // = d1^2*x2, degree (2,-1)
        let tp = to_theta_form(&p).unwrap();
        let tq = to_theta_form(&q).unwrap();
        let prod = p.multiply(&q);
        let tprod = to_theta_form(&prod).unwrap();
        let predicted = tp
            .theta
            .mul(&theta_shift(&tq.theta, &tp.z, &alg))
            .mul(&gamma(&alg, &tp.z, &tq.z));
        assert_eq!(tprod.theta, predicted);
        assert_eq!(
            tprod.z,
            tp.z.iter().zip(&tq.z).map(|(&x, &y)| x + y).collect::<DegreeVector>()
        );
    }

    #[test]
    fn reducible_linear_euler_polynomials() {
        let alg = weyl2();
        let tv = theta_vars(2);
        let t1 = CommPoly::var(&tv, 0);
        let t2 = CommPoly::var(&tv, 1);
        let one = CommPoly::one(&tv);
        // t1 -> x1 * d1
        let (fs, u) = theta_rewrite_reducibles(&alg, &t1).unwrap();
        assert_eq!(u, Rational::one());
        assert_eq!(fs, vec![OrePoly::x(&alg, 0), OrePoly::d(&alg, 0)]);
        // t2 + 1 -> d2 * x2
        let (fs, u) = theta_rewrite_reducibles(&alg, &t2.add(&one)).unwrap();
        assert_eq!(u, Rational::one());
        assert_eq!(fs, vec![OrePoly::d(&alg, 1), OrePoly::x(&alg, 1)]);
        // t1 + 2, t1 + t2, t1^2 stay put.
        assert!(theta_rewrite_reducibles(&alg, &t1.add(&CommPoly::constant(&tv, rat(2)))).is_none());
        assert!(theta_rewrite_reducibles(&alg, &t1.add(&t2)).is_none());
        assert!(theta_rewrite_reducibles(&alg, &t1.mul(&t1)).is_none());
    }

    #[test]
    fn reducible_linear_euler_polynomials_qweyl() {
        let q = ratq(5, 2);
        let alg = AlgebraSpec::qweyl(1, vec![q.clone()]);
        let tv = theta_vars(1);
        let t1 = CommPoly::var(&tv, 0);
        let f = t1.add(&CommPoly::constant(&tv, q.recip()));
        let (fs, u) = theta_rewrite_reducibles(&alg, &f).unwrap();
        assert_eq!(u, q.recip());
        assert_eq!(fs, vec![OrePoly::d(&alg, 0), OrePoly::x(&alg, 0)]);
        // Verify semantics: f = u * d1 * x1 as operators.
        let prod = OrePoly::d(&alg, 0).multiply(&OrePoly::x(&alg, 0)).scalar_mul(&u);
        let tf = ThetaForm { algebra: alg.clone(), z: vec![0], theta: f };
        assert_eq!(from_theta_form(&tf), prod);
        // t1 + 1 is NOT operator-reducible when q != 1.
        let g = t1.add(&CommPoly::one(&tv));
        assert!(theta_rewrite_reducibles(&alg, &g).is_none());
    }
}
