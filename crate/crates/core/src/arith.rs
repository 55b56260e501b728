//! Exact arithmetic: arbitrary-precision rationals and commutative
//! multivariate polynomials over them.
//!
//! [`CommPoly`] is the workhorse: a sparse polynomial over a *fixed, ordered*
//! list of variable names.  Binary operations require both operands to carry
//! the identical variable list; mixing variable sets is a programming error
//! and panics rather than silently unifying.  On top of the ring operations
//! the type provides substitutions, structured division (single- and
//! multi-divisor, under a choice of monomial order), and the gcd machinery
//! (primitive pseudo-remainder sequences) that the factorization layers build
//! on.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exact rational scalar; always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Integer rational `n/1`.
pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational `n/d` (`d != 0`), normalized.
pub fn ratq(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Binomial coefficient `C(n, k)` as a big integer.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Factorial `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for j in 2..=n {
        acc *= BigInt::from(j);
    }
    acc
}

/// Monomial order used by structured division and leading-term queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Pure lexicographic: earlier variables dominate.
    Lex,
    /// Total degree first, ties broken lexicographically.
    DegLex,
}

/// Compares exponent vectors under `order`.  Earlier entries are the more
/// significant variables.
pub fn cmp_mono(a: &[u32], b: &[u32], order: MonomialOrder) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    match order {
        MonomialOrder::Lex => a.cmp(b),
        MonomialOrder::DegLex => {
            let da: u64 = a.iter().map(|&e| e as u64).sum();
            let db: u64 = b.iter().map(|&e| e as u64).sum();
            da.cmp(&db).then_with(|| a.cmp(b))
        }
    }
}

/// Sparse multivariate polynomial over [`Rational`] with a fixed variable list.
#[derive(Clone, PartialEq, Eq)]
pub struct CommPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl CommPoly {
    /// The zero polynomial in the given variables.
    pub fn zero(vars: &[String]) -> Self {
        CommPoly {
            vars: vars.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    /// Constant polynomial.
    pub fn constant(vars: &[String], c: Rational) -> Self {
        let mut p = CommPoly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; p.vars.len()], c);
        }
        p
    }

    /// The polynomial `1`.
    pub fn one(vars: &[String]) -> Self {
        CommPoly::constant(vars, Rational::one())
    }

    /// The variable with index `i`.
    pub fn var(vars: &[String], i: usize) -> Self {
        assert!(i < vars.len(), "variable index out of range");
        let mut p = CommPoly::zero(vars);
        let mut mono = vec![0; p.vars.len()];
        mono[i] = 1;
        p.terms.insert(mono, Rational::one());
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// duplicates and dropping zeros.
    pub fn from_terms(vars: &[String], terms: Vec<(Vec<u32>, Rational)>) -> Self {
        let mut p = CommPoly::zero(vars);
        for (mono, c) in terms {
            p.add_term(mono, c);
        }
        p
    }

    /// Variable names, in order of significance.
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Number of variables.
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Iterator over `(exponents, coefficient)` pairs (ascending pure-lex order
    /// of exponent vectors).
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    /// Number of nonzero terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Adds `c * x^mono` in place.
    pub fn add_term(&mut self, mono: Vec<u32>, c: Rational) {
        assert_eq!(mono.len(), self.vars.len(), "exponent vector length mismatch");
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

    fn assert_same_vars(&self, other: &Self) {
        assert_eq!(
            self.vars, other.vars,
            "operands carry different variable lists; mixed-variable operations are rejected"
        );
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant value if the polynomial has no variable occurrences.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            let (mono, c) = self.terms.iter().next().unwrap();
            if mono.iter().all(|&e| e == 0) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map_or(false, |c| c.is_one())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_vars(other);
        let mut out = self.clone();
        for (mono, c) in &other.terms {
            out.add_term(mono.clone(), c.clone());
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
            return CommPoly::zero(&self.vars);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.clone() * s;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_vars(other);
        let mut out = CommPoly::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mono: Vec<u32> = ma.iter().zip(mb).map(|(&x, &y)| x + y).collect();
                out.add_term(mono, ca.clone() * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = CommPoly::one(&self.vars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Degree in variable `i`; `None` for the zero polynomial.
    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|m| m[i]).max()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    /// Leading `(exponents, coefficient)` under `order`; `None` if zero.
    pub fn leading_term(&self, order: MonomialOrder) -> Option<(Vec<u32>, Rational)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| cmp_mono(a, b, order))
            .map(|(m, c)| (m.clone(), c.clone()))
    }

    /// Coefficient of the monomial `mono` (zero if absent).
    pub fn coeff(&self, mono: &[u32]) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    /// True if the leading coefficient under `order` is `1`.
    pub fn is_monic(&self, order: MonomialOrder) -> bool {
        self.leading_term(order).map_or(false, |(_, c)| c.is_one())
    }

    /// Scales to leading coefficient `1` under `order`; returns
    /// `(former_leading_coefficient, monic_polynomial)`.  Panics on zero.
    pub fn make_monic(&self, order: MonomialOrder) -> (Rational, Self) {
        let (_, lc) = self.leading_term(order).expect("cannot normalize the zero polynomial");
        (lc.clone(), self.scalar_mul(&lc.recip()))
    }

    /// Evaluates at the point `point` (one value per variable).
    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.vars.len(), "point arity mismatch");
        let mut acc = Rational::zero();
        for (mono, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in mono.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Replaces variable `i` by `a * x_i + b`.
    pub fn affine_substitute(&self, i: usize, a: &Rational, b: &Rational) -> Self {
        let mut out = CommPoly::zero(&self.vars);
        for (mono, c) in &self.terms {
            let e = mono[i];
            // (a x + b)^e expanded with binomial coefficients.
            for k in 0..=e {
                let mut coeff = c.clone();
                coeff *= Rational::from_integer(binomial(e, k));
                let mut apow = Rational::one();
                for _ in 0..k {
                    apow *= a;
                }
                let mut bpow = Rational::one();
                for _ in 0..(e - k) {
                    bpow *= b;
                }
                coeff *= apow * bpow;
                let mut m = mono.clone();
                m[i] = k;
                out.add_term(m, coeff);
            }
        }
        out
    }

    /// Replaces variable `v` by the polynomial `value` (over the same
    /// variable list), expanding with Horner's rule.
    pub fn substitute_poly(&self, v: usize, value: &CommPoly) -> Self {
        let coeffs = self.coeffs_in(v);
        let Some(&max_e) = coeffs.keys().max() else {
            return self.clone();
        };
        if max_e == 0 {
            return self.clone();
        }
        let mut acc = CommPoly::zero(&self.vars);
        for e in (0..=max_e).rev() {
            if e < max_e {
                acc = acc.mul(value);
            }
            if let Some(c) = coeffs.get(&e) {
                acc = acc.add(c);
            }
        }
        acc
    }

    /// Simultaneous shift `x_i -> x_i + offsets[i]` for all variables.
    pub fn shift_substitute(&self, offsets: &[Rational]) -> Self {
        assert_eq!(offsets.len(), self.vars.len(), "offset arity mismatch");
        let mut out = self.clone();
        for (i, o) in offsets.iter().enumerate() {
            if !o.is_zero() {
                out = out.affine_substitute(i, &Rational::one(), o);
            }
        }
        out
    }

    /// Replaces variable `i` by the polynomial `g` (same variable list).
    pub fn substitute(&self, i: usize, g: &Self) -> Self {
        self.assert_same_vars(g);
        let mut powers: Vec<CommPoly> = vec![CommPoly::one(&self.vars)];
        let maxdeg = self.degree_in(i).unwrap_or(0);
        for _ in 0..maxdeg {
            powers.push(powers.last().unwrap().mul(g));
        }
        let mut out = CommPoly::zero(&self.vars);
        for (mono, c) in &self.terms {
            let e = mono[i] as usize;
            let mut rest = mono.clone();
            rest[i] = 0;
            let mut base = CommPoly::zero(&self.vars);
            base.add_term(rest, c.clone());
            out = out.add(&base.mul(&powers[e]));
        }
        out
    }

    /// Formal derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = CommPoly::zero(&self.vars);
        for (mono, c) in &self.terms {
            if mono[i] == 0 {
                continue;
            }
            let mut m = mono.clone();
            m[i] -= 1;
            out.add_term(m, c.clone() * rat(mono[i] as i64));
        }
        out
    }

    /// Multi-divisor division: returns `(quotients, remainder)` with
    /// `self = sum q_j * divs_j + r` and no remainder term divisible by any
    /// divisor's leading monomial under `order`.
    pub fn divrem_multi(&self, divs: &[Self], order: MonomialOrder) -> (Vec<Self>, Self) {
        for d in divs {
            self.assert_same_vars(d);
            assert!(!d.is_zero(), "division by the zero polynomial");
        }
        let leads: Vec<(Vec<u32>, Rational)> = divs
            .iter()
            .map(|d| d.leading_term(order).unwrap())
            .collect();
        let mut quots = vec![CommPoly::zero(&self.vars); divs.len()];
        let mut rem = CommPoly::zero(&self.vars);
        let mut work = self.clone();
        while let Some((lm, lc)) = work.leading_term(order) {
            let mut reduced = false;
            for (j, (dm, dc)) in leads.iter().enumerate() {
                if lm.iter().zip(dm).all(|(&a, &b)| a >= b) {
                    let qm: Vec<u32> = lm.iter().zip(dm).map(|(&a, &b)| a - b).collect();
                    let qc = lc.clone() / dc;
                    let mut qterm = CommPoly::zero(&self.vars);
                    qterm.add_term(qm, qc);
                    work = work.sub(&qterm.mul(&divs[j]));
                    quots[j] = quots[j].add(&qterm);
                    reduced = true;
                    break;
                }
            }
            if !reduced {
                let mut t = CommPoly::zero(&self.vars);
                t.add_term(lm.clone(), lc.clone());
                rem = rem.add(&t);
                work = work.sub(&t);
            }
        }
        (quots, rem)
    }

    /// Remainder of `self` under multi-divisor reduction.
    pub fn reduce(&self, divs: &[Self], order: MonomialOrder) -> Self {
        self.divrem_multi(divs, order).1
    }

    /// Exact quotient `self / d` if the division leaves no remainder.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        if self.is_zero() {
            return Some(CommPoly::zero(&self.vars));
        }
        let (quots, rem) = self.divrem_multi(std::slice::from_ref(d), MonomialOrder::DegLex);
        if rem.is_zero() {
            Some(quots.into_iter().next().unwrap())
        } else {
            None
        }
    }

    /// Writes `self = c * p` with `p` having coprime integer coefficients and
    /// positive leading (deg-lex) coefficient; returns `(c, p)`.  Panics on
    /// zero.
    pub fn integer_normalize(&self) -> (Rational, Self) {
        assert!(!self.is_zero(), "cannot normalize the zero polynomial");
        let mut denom_lcm = BigInt::one();
        for c in self.terms.values() {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let scaled = c.numer() * (&denom_lcm / c.denom());
            num_gcd = num_gcd.gcd(&scaled);
        }
        let mut content = Rational::new(num_gcd, denom_lcm);
        let (_, lc) = self.leading_term(MonomialOrder::DegLex).unwrap();
        if lc.is_negative() {
            content = -content;
        }
        let pp = self.scalar_mul(&content.recip());
        (content, pp)
    }

    /// Coefficients of `self` viewed as a univariate polynomial in variable
    /// `v`, keyed by the exponent of `v`; each coefficient is a polynomial in
    /// the remaining variables (same variable list, `v`-exponent zero).
    pub fn coeffs_in(&self, v: usize) -> BTreeMap<u32, CommPoly> {
        let mut out: BTreeMap<u32, CommPoly> = BTreeMap::new();
        for (mono, c) in &self.terms {
            let e = mono[v];
            let mut m = mono.clone();
            m[v] = 0;
            out.entry(e)
                .or_insert_with(|| CommPoly::zero(&self.vars))
                .add_term(m, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Rebuilds a polynomial from per-exponent coefficients in variable `v`.
    pub fn from_coeffs_in(vars: &[String], v: usize, coeffs: &BTreeMap<u32, CommPoly>) -> Self {
        let mut out = CommPoly::zero(vars);
        for (&e, p) in coeffs {
            for (mono, c) in &p.terms {
                let mut m = mono.clone();
                m[v] += e;
                out.add_term(m, c.clone());
            }
        }
        out
    }

    /// Indices of variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.vars.len())
            .filter(|&i| self.terms.keys().any(|m| m[i] > 0))
            .collect()
    }

    /// Dense coefficient vector (ascending degree) when only variable `v`
    /// occurs; panics otherwise.
    pub fn to_univariate_dense(&self, v: usize) -> Vec<Rational> {
        for i in self.support_vars() {
            assert!(i == v, "polynomial is not univariate in the requested variable");
        }
        let deg = self.degree_in(v).unwrap_or(0);
        let mut out = vec![Rational::zero(); deg as usize + 1];
        for (mono, c) in &self.terms {
            out[mono[v] as usize] = c.clone();
        }
        while out.len() > 1 && out.last().unwrap().is_zero() {
            out.pop();
        }
        out
    }

    /// Builds `sum coeffs[k] * x_v^k` over the given variable list.
    pub fn from_univariate_dense(vars: &[String], v: usize, coeffs: &[Rational]) -> Self {
        let mut out = CommPoly::zero(vars);
        for (k, c) in coeffs.iter().enumerate() {
            let mut m = vec![0; vars.len()];
            m[v] = k as u32;
            out.add_term(m, c.clone());
        }
        out
    }

    /// Re-expresses `self` over a larger (or reordered) variable list.  Every
    /// occurring variable of `self` must be present in `new_vars`.
    pub fn rename_vars(&self, new_vars: &[String]) -> Self {
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| new_vars.iter().position(|w| w == v))
            .collect();
        let mut out = CommPoly::zero(new_vars);
        for (mono, c) in &self.terms {
            let mut m = vec![0; new_vars.len()];
            for (i, &e) in mono.iter().enumerate() {
                if e > 0 {
                    let j = map[i].unwrap_or_else(|| {
                        panic!("variable {} missing from the target list", self.vars[i])
                    });
                    m[j] = e;
                }
            }
            out.add_term(m, c.clone());
        }
        out
    }

    /// Greatest common divisor, normalized to integer-primitive form with
    /// positive leading coefficient (and `gcd(f, 0) = normalize(f)`).
    pub fn gcd(&self, other: &Self) -> Self {
        self.assert_same_vars(other);
        let g = gcd_inner(self, other);
        if g.is_zero() {
            g
        } else {
            g.integer_normalize().1
        }
    }
}

/// Recursive primitive-PRS gcd; result is only defined up to a unit.
fn gcd_inner(f: &CommPoly, g: &CommPoly) -> CommPoly {
    if f.is_zero() {
        return g.clone();
    }
    if g.is_zero() {
        return f.clone();
    }
    if f.constant_value().is_some() || g.constant_value().is_some() {
        return CommPoly::one(f.vars());
    }
    let sf = f.support_vars();
    let sg = g.support_vars();
    // Main variable: the most significant variable occurring in either.
    let v = *sf.iter().chain(sg.iter()).min().unwrap();
    if !sf.contains(&v) || !sg.contains(&v) {
        // One operand is free of the main variable: gcd divides the contents.
        let (free, other) = if sf.contains(&v) { (g, f) } else { (f, g) };
        let cont = content_in(other, v);
        return gcd_inner(free, &cont);
    }
    let cf = content_in(f, v);
    let cg = content_in(g, v);
    let cont_gcd = gcd_inner(&cf, &cg);
    let pf = f.exact_div(&cf).expect("content divides");
    let pg = g.exact_div(&cg).expect("content divides");
    // Primitive pseudo-remainder sequence in the main variable.
    let (mut a, mut b) = if pf.degree_in(v) >= pg.degree_in(v) {
        (pf, pg)
    } else {
        (pg, pf)
    };
    loop {
        let r = pseudo_rem(&a, &b, v);
        if r.is_zero() {
            let prim = b.exact_div(&content_in(&b, v)).expect("content divides");
            return cont_gcd.mul(&prim);
        }
        if r.degree_in(v).is_none() || r.degree_in(v) == Some(0) {
            return cont_gcd;
        }
        let rc = content_in(&r, v);
        a = b;
        b = r.exact_div(&rc).expect("content divides");
    }
}

/// Content of `f` with respect to variable `v`: gcd of its `v`-coefficients.
fn content_in(f: &CommPoly, v: usize) -> CommPoly {
    let coeffs = f.coeffs_in(v);
    let mut acc = CommPoly::zero(f.vars());
    for p in coeffs.values() {
        acc = gcd_inner(&acc, p);
        if acc.constant_value().is_some() && !acc.is_zero() {
            return CommPoly::one(f.vars());
        }
    }
    if acc.is_zero() {
        CommPoly::one(f.vars())
    } else {
        acc.integer_normalize().1
    }
}

/// Pseudo-remainder of `a` by `b` in variable `v` (`deg_v a >= deg_v b`).
fn pseudo_rem(a: &CommPoly, b: &CommPoly, v: usize) -> CommPoly {
    let db = b.degree_in(v).expect("divisor must involve the main variable");
    let bc = b.coeffs_in(v);
    let blead = bc.get(&db).unwrap().clone();
    let mut r = a.clone();
    while let Some(dr) = r.degree_in(v) {
        if dr < db {
            break;
        }
        let rc = r.coeffs_in(v);
        let rlead = rc.get(&dr).unwrap().clone();
        // r <- blead * r - rlead * x_v^(dr-db) * b
        let mut shift = CommPoly::zero(a.vars());
        let mut m = vec![0; a.vars().len()];
        m[v] = dr - db;
        shift.add_term(m, Rational::one());
        r = r.mul(&blead).sub(&rlead.mul(&shift).mul(b));
    }
    r
}

impl fmt::Display for CommPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut items: Vec<(Vec<u32>, Rational)> =
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        items.sort_by(|(a, _), (b, _)| cmp_mono(b, a, MonomialOrder::DegLex));
        let mut first = true;
        for (mono, c) in items {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            let trivial = mono.iter().all(|&e| e == 0);
            if !mag.is_one() || trivial {
                parts.push(mag.to_string());
            }
            for (i, &e) in mono.iter().enumerate() {
                if e == 1 {
                    parts.push(self.vars[i].clone());
                } else if e > 1 {
                    parts.push(format!("{}^{}", self.vars[i], e));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for CommPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Convenience: fixed variable lists `t1..tn` used for Euler-operator
/// polynomials throughout the crate.
pub fn theta_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("t{}", i)).collect()
}

/// Rational-root candidates are validated by evaluation; this helper returns
/// all rational roots (with multiplicity 1 each in the returned list) of a
/// univariate polynomial by factoring out linear factors by trial division of
/// candidate roots p/q with p | constant term and q | leading coefficient.
pub fn rational_roots_by_trial(coeffs: &[Rational]) -> Vec<Rational> {
    // Strip trailing zeros; collect x = 0 root.
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().unwrap().is_zero() {
        c.pop();
    }
    let mut roots = Vec::new();
    if c.iter().all(|x| x.is_zero()) {
        return roots;
    }
    let mut low = 0;
    while c[low].is_zero() {
        low += 1;
    }
    if low > 0 {
        roots.push(Rational::zero());
        c.drain(0..low);
    }
    if c.len() <= 1 {
        return roots;
    }
    // Clear denominators to integer coefficients.
    let mut den = BigInt::one();
    for x in &c {
        den = den.lcm(x.denom());
    }
    let ints: Vec<BigInt> = c.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let a0 = ints[0].clone().abs();
    let an = ints.last().unwrap().clone().abs();
    let db = divisors_small(&a0);
    let dq = divisors_small(&an);
    let poly = c;
    let eval = |r: &Rational| -> Rational {
        let mut acc = Rational::zero();
        for x in poly.iter().rev() {
            acc = acc * r + x;
        }
        acc
    };
    let mut seen: Vec<Rational> = Vec::new();
    for p in &db {
        for q in &dq {
            for sign in [1i64, -1] {
                let cand = Rational::new(p.clone() * BigInt::from(sign), q.clone());
                if seen.contains(&cand) {
                    continue;
                }
                seen.push(cand.clone());
                if eval(&cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots
}

/// All positive divisors of `|n|` (`n != 0`), naive trial division; falls back
/// to `{1, |n|}` plus small divisors if `n` is astronomically large.
fn divisors_small(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    if let Some(v) = n.to_u64() {
        let mut out = Vec::new();
        let mut d = 1u64;
        while d.saturating_mul(d) <= v {
            if v % d == 0 {
                out.push(BigInt::from(d));
                if d != v / d {
                    out.push(BigInt::from(v / d));
                }
            }
            d += 1;
            if d > 1_000_000 {
                break;
            }
        }
        out.sort();
        out
    } else {
        let mut out = vec![BigInt::one()];
        for d in 2u64..=1000 {
            if (&n % BigInt::from(d)).is_zero() {
                out.push(BigInt::from(d));
            }
        }
        out.push(n);
        out
    }
}
