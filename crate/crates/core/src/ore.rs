//! Operator algebras in normal form.
//!
//! An [`OrePoly`] is a finite sum `sum c * x^a * d^b` where `x1..xn` are the
//! polynomial generators and `d1..dn` are the "operator" generators: partial
//! derivatives in the Weyl and q-Weyl algebras, forward shifts in the shift
//! algebra.  The exponent pair `(a, b)` is stored as one vector of length
//! `2n`.  Products are normalized eagerly via the commutation rules
//!
//! * Weyl:    `di * xi = xi * di + 1`
//! * q-Weyl:  `di * xi = qi * xi * di + 1`
//! * shift:   `di * xi = (xi + 1) * di`
//!
//! (generators with distinct indices commute).  The Weyl product additionally
//! has a closed combinatorial formula which serves as a fast path and as an
//! independent cross-check of the generic rewriting product.
//!
//! The module also provides the embedding of the shift algebra into the Weyl
//! algebra sending `xi -> xi * di` and `si -> di` ([`iota_embed`]), its
//! partial inverse ([`iota_preimage`]), and the [`Factorization`] container
//! used by all factorization routines.

use crate::arith::{binomial, cmp_mono, factorial, rat, CommPoly, MonomialOrder, Rational};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Which family of commutation rules is in force.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraKind {
    Weyl,
    QWeyl,
    Shift,
}

/// An algebra instance: the rule family, the number of variable pairs, and
/// (for the q-Weyl case) the deformation parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraSpec {
    pub kind: AlgebraKind,
    pub n: usize,
    /// One parameter per index for `QWeyl`; empty otherwise.
    pub q: Vec<Rational>,
}

impl AlgebraSpec {
    pub fn weyl(n: usize) -> Self {
        assert!(n >= 1);
        AlgebraSpec { kind: AlgebraKind::Weyl, n, q: Vec::new() }
    }

    pub fn shift(n: usize) -> Self {
        assert!(n >= 1);
        AlgebraSpec { kind: AlgebraKind::Shift, n, q: Vec::new() }
    }

    pub fn qweyl(n: usize, q: Vec<Rational>) -> Self {
        assert!(n >= 1);
        assert_eq!(q.len(), n, "one deformation parameter per index");
        for qi in &q {
            assert!(!qi.is_zero(), "deformation parameters must be nonzero");
        }
        AlgebraSpec { kind: AlgebraKind::QWeyl, n, q }
    }

    /// Deformation parameter for index `i` (`1` outside the q-Weyl case).
    pub fn q_at(&self, i: usize) -> Rational {
        match self.kind {
            AlgebraKind::QWeyl => self.q[i].clone(),
            _ => Rational::one(),
        }
    }

    /// The q-integer `[m] = 1 + q + ... + q^(m-1)` for index `i`.
    pub fn q_integer(&self, i: usize, m: u32) -> Rational {
        let q = self.q_at(i);
        let mut acc = Rational::zero();
        let mut pow = Rational::one();
        for _ in 0..m {
            acc += &pow;
            pow *= &q;
        }
        acc
    }

    /// Name of the operator generator family: `d` for (q-)Weyl, `s` for shift.
    pub fn op_symbol(&self) -> &'static str {
        match self.kind {
            AlgebraKind::Shift => "s",
            _ => "d",
        }
    }
}

/// A variable of the operator algebra, for degree queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpVar {
    /// `x_{i+1}` (zero-based index).
    X(usize),
    /// `d_{i+1}` / `s_{i+1}` (zero-based index).
    D(usize),
}

/// Operator in normal form: map from exponent vectors `[a | b]` (length `2n`)
/// to nonzero rational coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct OrePoly {
    algebra: AlgebraSpec,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl OrePoly {
    pub fn zero(algebra: &AlgebraSpec) -> Self {
        OrePoly { algebra: algebra.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(algebra: &AlgebraSpec, c: Rational) -> Self {
        let mut p = OrePoly::zero(algebra);
        if !c.is_zero() {
            p.terms.insert(vec![0; 2 * algebra.n], c);
        }
        p
    }

    pub fn one(algebra: &AlgebraSpec) -> Self {
        OrePoly::constant(algebra, Rational::one())
    }

    /// The generator `x_{i+1}`.
    pub fn x(algebra: &AlgebraSpec, i: usize) -> Self {
        assert!(i < algebra.n);
        let mut mono = vec![0; 2 * algebra.n];
        mono[i] = 1;
        OrePoly::monomial(algebra, mono, Rational::one())
    }

    /// The generator `d_{i+1}` (or `s_{i+1}`).
    pub fn d(algebra: &AlgebraSpec, i: usize) -> Self {
        assert!(i < algebra.n);
        let mut mono = vec![0; 2 * algebra.n];
        mono[algebra.n + i] = 1;
        OrePoly::monomial(algebra, mono, Rational::one())
    }

    /// Single term `c * x^a d^b` given the packed exponent vector.
    pub fn monomial(algebra: &AlgebraSpec, mono: Vec<u32>, c: Rational) -> Self {
        assert_eq!(mono.len(), 2 * algebra.n);
        let mut p = OrePoly::zero(algebra);
        if !c.is_zero() {
            p.terms.insert(mono, c);
        }
        p
    }

    /// Single term `c * x^a d^b` from split exponent vectors.
    pub fn monomial_ab(algebra: &AlgebraSpec, a: &[u32], b: &[u32], c: Rational) -> Self {
        assert_eq!(a.len(), algebra.n);
        assert_eq!(b.len(), algebra.n);
        let mut mono = a.to_vec();
        mono.extend_from_slice(b);
        OrePoly::monomial(algebra, mono, c)
    }

    pub fn from_terms(algebra: &AlgebraSpec, terms: Vec<(Vec<u32>, Rational)>) -> Self {
        let mut p = OrePoly::zero(algebra);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn algebra(&self) -> &AlgebraSpec {
        &self.algebra
    }

    pub fn n(&self) -> usize {
        self.algebra.n
    }

    /// Iterator over `(packed exponents, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, mono: Vec<u32>, c: Rational) {
        assert_eq!(mono.len(), 2 * self.algebra.n);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn assert_same_algebra(&self, other: &Self) {
        assert_eq!(self.algebra, other.algebra, "operands live in different algebras");
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.iter().all(|&e| e == 0) {
                return Some(c.clone());
            }
        }
        None
    }

    /// A unit of the algebra: a nonzero rational constant.
    pub fn is_unit(&self) -> bool {
        self.constant_value().map_or(false, |c| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_algebra(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return OrePoly::zero(&self.algebra);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.clone() * s;
        }
        out
    }

    /// Noncommutative product `self * other`, normalized.  Uses the closed
    /// combinatorial formula in the Weyl case, generator-by-generator
    /// rewriting otherwise.
    pub fn multiply(&self, other: &Self) -> Self {
        self.assert_same_algebra(other);
        match self.algebra.kind {
            AlgebraKind::Weyl => self.multiply_weyl_closed(other),
            _ => self.multiply_rewrite(other),
        }
    }

    /// Closed-formula Weyl product:
    /// `(x^a d^b)(x^c d^e) = sum_k prod_i C(b_i,k_i) C(c_i,k_i) k_i! * x^(a+c-k) d^(b+e-k)`.
    pub fn multiply_weyl_closed(&self, other: &Self) -> Self {
        self.assert_same_algebra(other);
        assert_eq!(self.algebra.kind, AlgebraKind::Weyl);
        let n = self.algebra.n;
        let mut out = OrePoly::zero(&self.algebra);
        for (m1, c1) in &self.terms {
            let (a, b) = m1.split_at(n);
            for (m2, c2) in &other.terms {
                let (c, e) = m2.split_at(n);
                // Enumerate contraction vectors k with k_i <= min(b_i, c_i).
                let kmax: Vec<u32> = b.iter().zip(c).map(|(&bi, &ci)| bi.min(ci)).collect();
                let mut k = vec![0u32; n];
                loop {
                    let mut coeff = c1.clone() * c2;
                    for i in 0..n {
                        if k[i] > 0 {
                            let f = binomial(b[i], k[i]) * binomial(c[i], k[i]) * factorial(k[i]);
                            coeff *= Rational::from_integer(f);
                        }
                    }
                    let mut mono = Vec::with_capacity(2 * n);
                    for i in 0..n {
                        mono.push(a[i] + c[i] - k[i]);
                    }
                    for i in 0..n {
                        mono.push(b[i] + e[i] - k[i]);
                    }
                    out.add_term(mono, coeff);
                    // Odometer over k.
                    let mut pos = 0;
                    loop {
                        if pos == n {
                            break;
                        }
                        if k[pos] < kmax[pos] {
                            k[pos] += 1;
                            break;
                        }
                        k[pos] = 0;
                        pos += 1;
                    }
                    if pos == n {
                        break;
                    }
                }
            }
        }
        out
    }

    /// Product by repeated application of the single-generator commutation
    /// rule; valid in every supported algebra.
    pub fn multiply_rewrite(&self, other: &Self) -> Self {
        self.assert_same_algebra(other);
        let n = self.algebra.n;
        let mut out = OrePoly::zero(&self.algebra);
        for (m2, c2) in &other.terms {
            let (c, e) = m2.split_at(n);
            // acc = self * x^c, built one generator at a time.
            let mut acc = self.scalar_mul(c2);
            for i in 0..n {
                for _ in 0..c[i] {
                    acc = acc.times_x(i);
                }
            }
            // Append d^e: operator generators commute among themselves.
            for (m, cc) in &acc.terms {
                let mut mono = m.clone();
                for i in 0..n {
                    mono[n + i] += e[i];
                }
                out.add_term(mono, cc.clone());
            }
        }
        out
    }

    /// `self * x_i` via the commutation rule:
    ///
    /// * (q-)Weyl: `x^a d^b * xi = qi^(b_i) x^(a+1_i) d^b + [b_i] x^a d^(b-1_i)`
    /// * shift:    `x^a s^b * xi = x^(a+1_i) s^b + b_i x^a s^b`
    fn times_x(&self, i: usize) -> Self {
        let n = self.algebra.n;
        let mut out = OrePoly::zero(&self.algebra);
        for (m, c) in &self.terms {
            let bi = m[n + i];
            match self.algebra.kind {
                AlgebraKind::Weyl | AlgebraKind::QWeyl => {
                    let q = self.algebra.q_at(i);
                    let mut qpow = Rational::one();
                    for _ in 0..bi {
                        qpow *= &q;
                    }
                    let mut m1 = m.clone();
                    m1[i] += 1;
                    out.add_term(m1, c.clone() * qpow);
                    if bi > 0 {
                        let mut m2 = m.clone();
                        m2[n + i] -= 1;
                        out.add_term(m2, c.clone() * self.algebra.q_integer(i, bi));
                    }
                }
                AlgebraKind::Shift => {
                    let mut m1 = m.clone();
                    m1[i] += 1;
                    out.add_term(m1, c.clone());
                    if bi > 0 {
                        out.add_term(m.clone(), c.clone() * rat(bi as i64));
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = OrePoly::one(&self.algebra);
        for _ in 0..e {
            acc = acc.multiply(self);
        }
        acc
    }

    /// Highest exponent of the given variable; `None` for zero.
    pub fn max_var_degree(&self, v: OpVar) -> Option<u32> {
        let n = self.algebra.n;
        let idx = match v {
            OpVar::X(i) => i,
            OpVar::D(i) => n + i,
        };
        self.terms.keys().map(|m| m[idx]).max()
    }

    /// Leading `(exponents, coefficient)` per degree-lex on the packed vector
    /// (`x1 > ... > xn > d1 > ... > dn`).
    pub fn leading_term(&self) -> Option<(Vec<u32>, Rational)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| cmp_mono(a, b, MonomialOrder::DegLex))
            .map(|(m, c)| (m.clone(), c.clone()))
    }

    pub fn is_monic(&self) -> bool {
        self.leading_term().map_or(false, |(_, c)| c.is_one())
    }

    /// Returns `(leading coefficient, monic scalar multiple)`.
    pub fn make_monic(&self) -> (Rational, Self) {
        let (_, lc) = self.leading_term().expect("cannot normalize zero");
        (lc.clone(), self.scalar_mul(&lc.recip()))
    }

    pub fn coeff(&self, mono: &[u32]) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    /// Sum over all `2n` variables of the maximal exponent; a crude size
    /// measure that strictly decreases along nontrivial factorization steps.
    pub fn degree_weight(&self) -> u64 {
        (0..2 * self.algebra.n)
            .map(|idx| self.terms.keys().map(|m| m[idx] as u64).max().unwrap_or(0))
            .sum()
    }

    /// Applies the operator to a commutative polynomial in `x1..xn` (Weyl:
    /// `d_i` acts as `d/dx_i`; shift: `s_i` maps `x_i -> x_i + 1`).  Used as a
    /// semantic cross-check of products.
    pub fn apply(&self, f: &CommPoly) -> CommPoly {
        let n = self.algebra.n;
        assert_eq!(f.nvars(), n, "argument must be a polynomial in x1..xn");
        let mut out = CommPoly::zero(f.vars());
        for (m, c) in &self.terms {
            let (a, b) = m.split_at(n);
            let mut g = f.clone();
            match self.algebra.kind {
                AlgebraKind::Weyl => {
                    for (i, &bi) in b.iter().enumerate() {
                        for _ in 0..bi {
                            g = g.derivative(i);
                        }
                    }
                }
                AlgebraKind::Shift => {
                    let offsets: Vec<Rational> =
                        b.iter().map(|&bi| rat(bi as i64)).collect();
                    g = g.shift_substitute(&offsets);
                }
                AlgebraKind::QWeyl => {
                    panic!("polynomial action is not defined here for the q-case")
                }
            }
            for (i, &ai) in a.iter().enumerate() {
                let xi = CommPoly::var(f.vars(), i);
                for _ in 0..ai {
                    g = g.mul(&xi);
                }
            }
            out = out.add(&g.scalar_mul(c));
        }
        out
    }
}

impl fmt::Display for OrePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::expr::print_canonical(self))
    }
}

impl fmt::Debug for OrePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::expr::print_canonical(self))
    }
}

/// A factorization `h = unit * f1 * f2 * ... * fk` (factors in product order).
#[derive(Clone, PartialEq, Eq)]
pub struct Factorization {
    pub algebra: AlgebraSpec,
    pub unit: Rational,
    pub factors: Vec<OrePoly>,
}

impl Factorization {
    pub fn new(algebra: &AlgebraSpec, unit: Rational, factors: Vec<OrePoly>) -> Self {
        Factorization { algebra: algebra.clone(), unit, factors }
    }

    /// Multiplies out `unit * f1 * ... * fk`.
    pub fn product(&self) -> OrePoly {
        let mut acc = OrePoly::constant(&self.algebra, self.unit.clone());
        for f in &self.factors {
            acc = acc.multiply(f);
        }
        acc
    }

    /// True if the product reproduces `h` exactly.
    pub fn verifies(&self, h: &OrePoly) -> bool {
        self.product() == *h
    }
}

impl fmt::Debug for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * [", self.unit)?;
        for (i, p) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{:?}", p)?;
        }
        write!(f, "]")
    }
}

/// Embedding of the shift algebra into the Weyl algebra:
/// `xi -> xi * di`, `si -> di` (extended multiplicatively; terms
/// `c x^a s^b -> c (x d)^a d^b`).
pub fn iota_embed(p: &OrePoly) -> OrePoly {
    assert_eq!(p.algebra().kind, AlgebraKind::Shift, "embedding expects a shift operator");
    let n = p.n();
    let weyl = AlgebraSpec::weyl(n);
    let mut out = OrePoly::zero(&weyl);
    for (m, c) in p.terms() {
        let (a, b) = m.split_at(n);
        let mut acc = OrePoly::constant(&weyl, c.clone());
        for i in 0..n {
            if a[i] > 0 {
                let theta = OrePoly::x(&weyl, i).multiply(&OrePoly::d(&weyl, i));
                acc = acc.multiply(&theta.pow(a[i]));
            }
        }
        if b.iter().any(|&e| e > 0) {
            let dmono = OrePoly::monomial_ab(&weyl, &vec![0; n], b, Rational::one());
            acc = acc.multiply(&dmono);
        }
        out = out.add(&acc);
    }
    out
}

/// Partial inverse of [`iota_embed`]: returns the unique shift-algebra
/// operator mapping to `w`, or `None` if `w` is outside the image.
pub fn iota_preimage(w: &OrePoly) -> Option<OrePoly> {
    assert_eq!(w.algebra().kind, AlgebraKind::Weyl, "preimage expects a Weyl operator");
    let n = w.n();
    let shift = AlgebraSpec::shift(n);
    let mut rest = w.clone();
    let mut out = OrePoly::zero(&shift);
    while let Some((mono, c)) = rest.leading_term() {
        let (a, b) = mono.split_at(n);
        // The image of c x^a s^(b-a) has leading term c x^a d^b; membership in
        // the image forces b >= a componentwise at every peeling step.
        if a.iter().zip(b).any(|(&ai, &bi)| bi < ai) {
            return None;
        }
        let sexp: Vec<u32> = a.iter().zip(b).map(|(&ai, &bi)| bi - ai).collect();
        let term = OrePoly::monomial_ab(&shift, a, &sexp, c.clone());
        rest = rest.sub(&iota_embed(&term));
        out = out.add(&term);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratq;

    fn sample_weyl(alg: &AlgebraSpec, which: u32) -> OrePoly {
        // Small deterministic operators for product identities.
        let x = OrePoly::x(alg, 0);
        let d = OrePoly::d(alg, 0);
        match which % 4 {
            0 => x.multiply(&d).add(&OrePoly::constant(alg, rat(2))),
            1 => d.pow(2).add(&x.scalar_mul(&rat(3))),
            2 => x.pow(2).multiply(&d).sub(&OrePoly::one(alg)),
            _ => d.multiply(&x).multiply(&d).add(&x),
        }
    }

    #[test]
    fn weyl_defining_relation() {
        let alg = AlgebraSpec::weyl(1);
        let x = OrePoly::x(&alg, 0);
        let d = OrePoly::d(&alg, 0);
        let lhs = d.multiply(&x);
        let rhs = x.multiply(&d).add(&OrePoly::one(&alg));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn distinct_indices_commute() {
        let alg = AlgebraSpec::weyl(2);
        let d1 = OrePoly::d(&alg, 0);
        let x2 = OrePoly::x(&alg, 1);
        assert_eq!(d1.multiply(&x2), x2.multiply(&d1));
    }

    #[test]
    fn closed_formula_matches_rewriting() {
        let alg = AlgebraSpec::weyl(2);
        let x1 = OrePoly::x(&alg, 0);
        let d1 = OrePoly::d(&alg, 0);
        let x2 = OrePoly::x(&alg, 1);
        let d2 = OrePoly::d(&alg, 1);
        let p = d1.pow(3).multiply(&x1.pow(2)).add(&x2.multiply(&d2).pow(2));
        let q = x1.multiply(&d1).multiply(&d2).add(&x2.pow(3));
        assert_eq!(p.multiply_weyl_closed(&q), p.multiply_rewrite(&q));
        assert_eq!(q.multiply_weyl_closed(&p), q.multiply_rewrite(&p));
    }

    #[test]
    fn associativity_weyl() {
        let alg = AlgebraSpec::weyl(1);
        let a = sample_weyl(&alg, 0);
        let b = sample_weyl(&alg, 1);
        let c = sample_weyl(&alg, 2);
        assert_eq!(a.multiply(&b).multiply(&c), a.multiply(&b.multiply(&c)));
    }

    #[test]
    fn product_agrees_with_action_on_polynomials() {
        let alg = AlgebraSpec::weyl(2);
        let p = sample_weyl(&alg, 3);
        let q = sample_weyl(&alg, 1);
        let pq = p.multiply(&q);
        let xv: Vec<String> = vec!["x1".into(), "x2".into()];
        let f = CommPoly::from_terms(
            &xv,
            vec![
                (vec![3, 0], rat(1)),
                (vec![1, 2], rat(-2)),
                (vec![0, 1], rat(5)),
            ],
        );
        assert_eq!(pq.apply(&f), p.apply(&q.apply(&f)));
    }

    #[test]
    fn qweyl_defining_relation() {
        let alg = AlgebraSpec::qweyl(1, vec![ratq(2, 1)]);
        let x = OrePoly::x(&alg, 0);
        let d = OrePoly::d(&alg, 0);
        let lhs = d.multiply(&x);
        let rhs = x.multiply(&d).scalar_mul(&rat(2)).add(&OrePoly::one(&alg));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn qweyl_power_rule() {
        // d * x^2 = q^2 x^2 d + [2] x  with [2] = 1 + q.
        let q = ratq(3, 1);
        let alg = AlgebraSpec::qweyl(1, vec![q.clone()]);
        let x = OrePoly::x(&alg, 0);
        let d = OrePoly::d(&alg, 0);
        let lhs = d.multiply(&x.pow(2));
        let rhs = x
            .pow(2)
            .multiply(&d)
            .scalar_mul(&(q.clone() * &q))
            .add(&x.scalar_mul(&(Rational::one() + &q)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn shift_defining_relation() {
        let alg = AlgebraSpec::shift(1);
        let x = OrePoly::x(&alg, 0);
        let s = OrePoly::d(&alg, 0);
        // s x = (x + 1) s
        let lhs = s.multiply(&x);
        let rhs = x.add(&OrePoly::one(&alg)).multiply(&s);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn shift_action_semantics() {
        let alg = AlgebraSpec::shift(1);
        let x = OrePoly::x(&alg, 0);
        let s = OrePoly::d(&alg, 0);
        let op = s.pow(2).multiply(&x).add(&s.scalar_mul(&rat(3)));
        let xv: Vec<String> = vec!["x1".into()];
        let f = CommPoly::from_terms(&xv, vec![(vec![2], rat(1)), (vec![0], rat(-1))]);
        // Compare with composing actions of the factors.
        let lhs = op.apply(&f);
        let part1 = s.pow(2).apply(&x.apply(&f));
        let part2 = s.apply(&f).scalar_mul(&rat(3));
        assert_eq!(lhs, part1.add(&part2));
    }

    #[test]
    fn associativity_shift_and_qweyl() {
        for alg in [AlgebraSpec::shift(2), AlgebraSpec::qweyl(2, vec![ratq(2, 1), ratq(5, 3)])] {
            let x1 = OrePoly::x(&alg, 0);
            let d1 = OrePoly::d(&alg, 0);
            let d2 = OrePoly::d(&alg, 1);
            let a = d1.multiply(&x1).add(&d2);
            let b = x1.pow(2).multiply(&d2).sub(&OrePoly::one(&alg));
            let c = d1.pow(2).add(&x1.scalar_mul(&rat(4)));
            assert_eq!(a.multiply(&b).multiply(&c), a.multiply(&b.multiply(&c)));
        }
    }

    #[test]
    fn max_var_degree_reads_exponents() {
        let alg = AlgebraSpec::weyl(2);
        let p = OrePoly::from_terms(
            &alg,
            vec![
                (vec![3, 0, 1, 0], rat(1)),
                (vec![0, 2, 0, 4], rat(-1)),
            ],
        );
        assert_eq!(p.max_var_degree(OpVar::X(0)), Some(3));
        assert_eq!(p.max_var_degree(OpVar::X(1)), Some(2));
        assert_eq!(p.max_var_degree(OpVar::D(0)), Some(1));
        assert_eq!(p.max_var_degree(OpVar::D(1)), Some(4));
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let alg = AlgebraSpec::shift(2);
        let x1 = OrePoly::x(&alg, 0);
        let s1 = OrePoly::d(&alg, 0);
        let s2 = OrePoly::d(&alg, 1);
        let p = s1.multiply(&x1).add(&s2.pow(2));
        let q = x1.pow(2).multiply(&s2).add(&OrePoly::constant(&alg, rat(3)));
        let lhs = iota_embed(&p.multiply(&q));
        let rhs = iota_embed(&p).multiply(&iota_embed(&q));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn embedding_maps_generators() {
        let alg = AlgebraSpec::shift(1);
        let weyl = AlgebraSpec::weyl(1);
        let x = OrePoly::x(&alg, 0);
        let s = OrePoly::d(&alg, 0);
        let theta = OrePoly::x(&weyl, 0).multiply(&OrePoly::d(&weyl, 0));
        assert_eq!(iota_embed(&x), theta);
        assert_eq!(iota_embed(&s), OrePoly::d(&weyl, 0));
    }

    #[test]
    fn preimage_roundtrip() {
        let alg = AlgebraSpec::shift(2);
        let x1 = OrePoly::x(&alg, 0);
        let x2 = OrePoly::x(&alg, 1);
        let s1 = OrePoly::d(&alg, 0);
        let s2 = OrePoly::d(&alg, 1);
        let p = x1
            .multiply(&s1)
            .multiply(&s2)
            .add(&x2.pow(2).multiply(&s1))
            .add(&OrePoly::constant(&alg, ratq(7, 2)));
        let w = iota_embed(&p);
        assert_eq!(iota_preimage(&w), Some(p));
    }

    #[test]
    fn preimage_rejects_outside_image() {
        let weyl = AlgebraSpec::weyl(1);
        // Bare x1 is not in the image (x1 itself maps to x1 d1).
        assert_eq!(iota_preimage(&OrePoly::x(&weyl, 0)), None);
        // d1 is in the image (of s1).
        assert!(iota_preimage(&OrePoly::d(&weyl, 0)).is_some());
    }

    #[test]
    fn factorization_product_and_check() {
        let alg = AlgebraSpec::weyl(1);
        let x = OrePoly::x(&alg, 0);
        let d = OrePoly::d(&alg, 0);
        let f1 = d.add(&OrePoly::constant(&alg, rat(2)));
        let f2 = x.add(&OrePoly::constant(&alg, rat(3)));
        let h = f1.multiply(&f2).scalar_mul(&rat(5));
        let fact = Factorization::new(&alg, rat(5), vec![f1, f2]);
        assert!(fact.verifies(&h));
    }
}
