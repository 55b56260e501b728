//! Commutative polynomial factorization over the rationals.
//!
//! The univariate engine is classic: integer normalization, squarefree
//! decomposition by gcd chains, factorization modulo a suitable prime
//! (distinct-degree plus equal-degree splitting), quadratic Hensel lifting to
//! a power of the prime exceeding twice a coefficient bound, and subset
//! recombination with trial division ([`factor_univariate`]).
//!
//! Multivariate input is reduced to the univariate engine by exponent packing:
//! substituting `v_j -> t^(B_j)` with mixed-radix strides `B_j` makes the
//! monomial map injective, every factor of the input shows up as a sub-product
//! of the univariate factors of the image, and candidates are confirmed by
//! exact trial division ([`factor_multivariate`]).
//!
//! A second, structurally independent route — writing `f = g * h` with
//! undetermined coefficients over a per-variable degree split and solving the
//! resulting polynomial system ([`split_undetermined`], [`factor_via_splitter`])
//! — serves as a cross-check oracle in the test suite and as a fallback if
//! recombination is ever cut short.
//!
//! All factor lists are returned as `unit * prod factor_i ^ mult_i` with each
//! factor monic under degree-lex.

use crate::arith::{rat, CommPoly, MonomialOrder, Rational};
use crate::util::DetRng;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// `unit * prod factors_i ^ mult_i`, factors monic under degree-lex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorList {
    pub unit: Rational,
    pub factors: Vec<(CommPoly, u32)>,
}

impl FactorList {
    /// Multiplies the list back out.
    pub fn product(&self, vars: &[String]) -> CommPoly {
        let mut acc = CommPoly::constant(vars, self.unit.clone());
        for (f, m) in &self.factors {
            acc = acc.mul(&f.pow(*m));
        }
        acc
    }

    /// Total number of irreducible factors counted with multiplicity.
    pub fn count_with_multiplicity(&self) -> u32 {
        self.factors.iter().map(|(_, m)| m).sum()
    }

    fn push_monic(&mut self, f: CommPoly, mult: u32) {
        let (lc, monic) = f.make_monic(MonomialOrder::DegLex);
        for _ in 0..mult {
            self.unit *= &lc;
        }
        if let Some(slot) = self.factors.iter_mut().find(|(g, _)| *g == monic) {
            slot.1 += mult;
        } else {
            self.factors.push((monic, mult));
        }
    }

    fn sorted(mut self) -> Self {
        self.factors.sort_by(|(a, _), (b, _)| {
            a.total_degree()
                .cmp(&b.total_degree())
                .then_with(|| format!("{}", a).cmp(&format!("{}", b)))
        });
        self
    }
}

/// Squarefree decomposition `f = unit * prod part_i ^ i` with pairwise coprime
/// squarefree monic parts; works for any number of variables (char 0).
pub fn squarefree_decompose(f: &CommPoly) -> FactorList {
    assert!(!f.is_zero(), "cannot decompose the zero polynomial");
    let mut out = FactorList { unit: Rational::one(), factors: Vec::new() };
    if let Some(c) = f.constant_value() {
        out.unit = c;
        return out;
    }
    let (lc, monic) = f.make_monic(MonomialOrder::DegLex);
    out.unit = lc;
    collect_squarefree(&monic, 1, &mut out);
    debug_assert_eq!(out.product(f.vars()), *f);
    out.sorted()
}

/// Recursive helper: pushes the squarefree parts of `f` with multiplicities
/// offset so that a part recorded at depth `base` has multiplicity `base + k`.
fn collect_squarefree(f: &CommPoly, base: u32, out: &mut FactorList) {
    if f.constant_value().is_some() {
        out.unit *= f.constant_value().unwrap();
        return;
    }
    // g = gcd(f, all partial derivatives) = prod p_i ^ (e_i - 1).
    let mut g = f.clone();
    for v in f.support_vars() {
        g = g.gcd(&f.derivative(v));
        if g.is_one() {
            break;
        }
    }
    if g.constant_value().is_some() {
        // f itself squarefree.
        out.push_monic(f.clone(), base);
        return;
    }
    let radical = f.exact_div(&g).expect("gcd divides");
    // Decompose g; its primes are exactly the primes of f with multiplicity >= 2.
    let mut inner = FactorList { unit: Rational::one(), factors: Vec::new() };
    collect_squarefree(&g, 1, &mut inner);
    let mut radical_of_g = CommPoly::one(f.vars());
    for (h, _) in &inner.factors {
        radical_of_g = radical_of_g.mul(h);
    }
    let simple = radical
        .exact_div(&radical_of_g)
        .expect("the radical of the repeated part divides the radical");
    if simple.constant_value().is_none() {
        out.push_monic(simple.clone(), base);
    } else {
        out.unit *= simple.constant_value().unwrap();
    }
    out.unit *= &inner.unit;
    for (h, m) in inner.factors {
        out.push_monic(h, m + base);
    }
}

/// Full factorization of a polynomial involving at most one variable.
pub fn factor_univariate(f: &CommPoly, rng: &mut DetRng) -> FactorList {
    assert!(!f.is_zero(), "cannot factor the zero polynomial");
    let sup = f.support_vars();
    assert!(sup.len() <= 1, "input must be univariate");
    let mut out = FactorList { unit: Rational::one(), factors: Vec::new() };
    if let Some(c) = f.constant_value() {
        out.unit = c;
        return out;
    }
    let v = sup[0];
    let sq = squarefree_decompose(f);
    out.unit = sq.unit.clone();
    for (part, mult) in &sq.factors {
        // part: monic squarefree univariate; extract a power of the variable.
        let mut work = part.clone();
        let low = work
            .terms()
            .map(|(m, _)| m[v])
            .min()
            .unwrap_or(0);
        if low > 0 {
            let xv = CommPoly::var(f.vars(), v);
            out.push_monic(xv.clone(), low * mult);
            work = work.exact_div(&xv.pow(low)).unwrap();
        }
        if work.constant_value().is_some() {
            continue;
        }
        let (content, zpoly) = dense_int(&work, v);
        for _ in 0..*mult {
            out.unit *= &content;
        }
        for factor in zassenhaus(&zpoly, rng) {
            let fp = from_dense_int(f.vars(), v, &factor);
            out.push_monic(fp, *mult);
        }
    }
    debug_assert_eq!(out.product(f.vars()), *f);
    out.sorted()
}

/// Rational roots with multiplicities, read off the linear factors of the
/// full univariate factorization.
pub fn rational_roots(f: &CommPoly, rng: &mut DetRng) -> Vec<(Rational, u32)> {
    let fl = factor_univariate(f, rng);
    let mut out = Vec::new();
    for (g, m) in fl.factors {
        if g.total_degree() == Some(1) {
            let v = g.support_vars()[0];
            let c = g.to_univariate_dense(v);
            // monic: x + c0 -> root -c0
            out.push((-c[0].clone(), m));
        }
    }
    out
}

/// Full factorization of an arbitrary multivariate polynomial.
pub fn factor_multivariate(f: &CommPoly, rng: &mut DetRng) -> FactorList {
    assert!(!f.is_zero(), "cannot factor the zero polynomial");
    let mut out = FactorList { unit: Rational::one(), factors: Vec::new() };
    if let Some(c) = f.constant_value() {
        out.unit = c;
        return out;
    }
    let sup = f.support_vars();
    if sup.len() <= 1 {
        return factor_univariate(f, rng);
    }
    let (lc, monic) = f.make_monic(MonomialOrder::DegLex);
    out.unit = lc;
    // Monomial content: minimal exponent per variable.
    let mut work = monic;
    for &v in &sup {
        let low = work.terms().map(|(m, _)| m[v]).min().unwrap_or(0);
        if low > 0 {
            let xv = CommPoly::var(f.vars(), v);
            out.push_monic(xv.clone(), low);
            work = work.exact_div(&xv.pow(low)).unwrap();
        }
    }
    if work.constant_value().is_some() {
        out.unit *= work.constant_value().unwrap();
        debug_assert_eq!(out.product(f.vars()), *f);
        return out.sorted();
    }
    // Polynomial content with respect to the most significant support variable.
    let sup = work.support_vars();
    if sup.len() == 1 {
        let sub = factor_univariate(&work, rng);
        out.unit *= &sub.unit;
        for (g, m) in sub.factors {
            out.push_monic(g, m);
        }
        debug_assert_eq!(out.product(f.vars()), *f);
        return out.sorted();
    }
    let v = sup[0];
    let coeffs = work.coeffs_in(v);
    let mut content = CommPoly::zero(f.vars());
    for p in coeffs.values() {
        content = content.gcd(p);
        if content.is_one() {
            break;
        }
    }
    if content.constant_value().is_none() {
        let pp = work.exact_div(&content).expect("content divides");
        for sub in [factor_multivariate(&content, rng), factor_multivariate(&pp, rng)] {
            out.unit *= &sub.unit;
            for (g, m) in sub.factors {
                out.push_monic(g, m);
            }
        }
        debug_assert_eq!(out.product(f.vars()), *f);
        return out.sorted();
    }
    // Primitive w.r.t. v: exponent-packing reduction to one variable.
    let found = kronecker_factor(&work, rng);
    out.unit *= &found.unit;
    for (g, m) in found.factors {
        out.push_monic(g, m);
    }
    debug_assert_eq!(out.product(f.vars()), *f);
    out.sorted()
}

/// Exponent-packing factorization of a multivariate polynomial (primitive in
/// its main variable, more than one support variable).
fn kronecker_factor(f: &CommPoly, rng: &mut DetRng) -> FactorList {
    let vars = f.vars().to_vec();
    let sup = f.support_vars();
    // Strides: B_0 = 1, B_j = prod_{l<j} (deg_l + 1).
    let degs: Vec<u32> = sup.iter().map(|&v| f.degree_in(v).unwrap()).collect();
    let mut strides: Vec<u64> = Vec::with_capacity(sup.len());
    let mut acc: u64 = 1;
    for d in &degs {
        strides.push(acc);
        acc = acc
            .checked_mul(*d as u64 + 1)
            .expect("packed degree fits in u64");
    }
    // Pack into a fresh univariate polynomial (in the first support var's slot).
    let pack_var = sup[0];
    let mut packed = CommPoly::zero(&vars);
    for (mono, c) in f.terms() {
        let mut e: u64 = 0;
        for (j, &v) in sup.iter().enumerate() {
            e += mono[v] as u64 * strides[j];
        }
        let mut m = vec![0u32; vars.len()];
        m[pack_var] = u32::try_from(e).expect("packed exponent fits in u32");
        packed.add_term(m, c.clone());
    }
    let uni = factor_univariate(&packed, rng);
    // Multiset of image factors, with multiplicity expanded.
    let mut images: Vec<CommPoly> = Vec::new();
    for (g, m) in &uni.factors {
        for _ in 0..*m {
            images.push(g.clone());
        }
    }
    let mut out = FactorList { unit: Rational::one(), factors: Vec::new() };
    if images.len() > 20 {
        // Subset recombination would be too wide; fall back to the
        // undetermined-coefficient route, which is complete (just slower).
        return factor_via_splitter(f, rng);
    }
    let unpack = |g: &CommPoly| -> Option<CommPoly> {
        let mut res = CommPoly::zero(&vars);
        for (mono, c) in g.terms() {
            let mut e = mono[pack_var] as u64;
            let mut m = vec![0u32; vars.len()];
            for (j, &v) in sup.iter().enumerate().rev() {
                let digit = e / strides[j];
                if digit > degs[j] as u64 {
                    return None;
                }
                m[v] = digit as u32;
                e -= digit * strides[j];
            }
            res.add_term(m, c.clone());
        }
        Some(res)
    };
    let mut work = f.make_monic(MonomialOrder::DegLex).1;
    out.unit = f.make_monic(MonomialOrder::DegLex).0;
    let mut remaining: Vec<CommPoly> = images;
    'outer: loop {
        if work.constant_value().is_some() {
            out.unit *= work.constant_value().unwrap();
            break;
        }
        let r = remaining.len();
        if r == 0 {
            out.push_monic(work.clone(), 1);
            break;
        }
        for size in 1..=r {
            if 2 * size > r && size != r {
                continue;
            }
            let mut subset: Vec<usize> = (0..size).collect();
            loop {
                let mut cand = CommPoly::one(&vars);
                for &i in &subset {
                    cand = cand.mul(&remaining[i]);
                }
                if let Some(multi) = unpack(&cand) {
                    let (_, cmonic) = multi.make_monic(MonomialOrder::DegLex);
                    if let Some(q) = work.exact_div(&cmonic) {
                        let (qlc, qmonic) = q.make_monic(MonomialOrder::DegLex);
                        out.unit *= qlc;
                        out.push_monic(cmonic, 1);
                        for &i in subset.iter().rev() {
                            remaining.remove(i);
                        }
                        work = qmonic;
                        continue 'outer;
                    }
                }
                // Next subset of the same size.
                let mut i = size;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if subset[i] != i + r - size {
                        subset[i] += 1;
                        for j in i + 1..size {
                            subset[j] = subset[j - 1] + 1;
                        }
                        break;
                    }
                    if i == 0 {
                        // exhausted
                        subset.clear();
                        break;
                    }
                }
                if subset.is_empty() {
                    break;
                }
            }
        }
        // No subset divides: remainder is irreducible.
        out.push_monic(work.clone(), 1);
        break;
    }
    out
}

// ---------------------------------------------------------------------------
// Undetermined-coefficient splitting (independent route).
// ---------------------------------------------------------------------------

/// Tries to write `f = g * h` nontrivially by solving for unknown
/// coefficients over every per-variable degree split.  Complete over the
/// rationals: returns `None` only if `f` is irreducible (up to units).
pub fn split_undetermined(f: &CommPoly, rng: &mut DetRng) -> Option<(CommPoly, CommPoly)> {
    let vars = f.vars().to_vec();
    let sup = f.support_vars();
    if sup.is_empty() {
        return None;
    }
    let (_, fm) = f.make_monic(MonomialOrder::DegLex);
    let degs: Vec<u32> = sup.iter().map(|&v| fm.degree_in(v).unwrap()).collect();
    // Enumerate candidate degree vectors dg for g (componentwise <= degs),
    // skipping the trivial all-zero and the full vector.
    let mut shape = vec![0u32; sup.len()];
    loop {
        let trivial = shape.iter().all(|&e| e == 0);
        let full = shape.iter().zip(&degs).all(|(&e, &d)| e == d);
        if !trivial && !full {
            if let Some(pair) = try_split_shape(&fm, &vars, &sup, &degs, &shape, rng) {
                return Some(pair);
            }
        }
        // Odometer.
        let mut i = 0;
        loop {
            if i == shape.len() {
                return None;
            }
            if shape[i] < degs[i] {
                shape[i] += 1;
                break;
            }
            shape[i] = 0;
            i += 1;
        }
    }
}

fn try_split_shape(
    fm: &CommPoly,
    vars: &[String],
    sup: &[usize],
    degs: &[u32],
    dg: &[u32],
    rng: &mut DetRng,
) -> Option<(CommPoly, CommPoly)> {
    let dh: Vec<u32> = degs.iter().zip(dg).map(|(&d, &a)| d - a).collect();
    // Unknowns: one per box monomial of each side.
    let boxes = |shape: &[u32]| -> Vec<Vec<u32>> {
        let mut list = vec![Vec::new()];
        for &d in shape {
            let mut next = Vec::new();
            for m in &list {
                for e in 0..=d {
                    let mut mm = m.clone();
                    mm.push(e);
                    next.push(mm);
                }
            }
            list = next;
        }
        list
    };
    let gbox = boxes(dg);
    let hbox = boxes(&dh);
    let mut unames: Vec<String> = Vec::new();
    for i in 0..gbox.len() {
        unames.push(format!("g{}", i));
    }
    for i in 0..hbox.len() {
        unames.push(format!("h{}", i));
    }
    // Build g * h - f coefficient equations in the unknowns.
    // Each product monomial (in the original vars) yields one equation.
    let mut eqs: BTreeMap<Vec<u32>, CommPoly> = BTreeMap::new();
    let add_eq = |eqs: &mut BTreeMap<Vec<u32>, CommPoly>,
                  mono: Vec<u32>,
                  poly: CommPoly| {
        match eqs.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(poly);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&poly);
                *e.get_mut() = s;
            }
        }
    };
    for (i, gm) in gbox.iter().enumerate() {
        for (j, hm) in hbox.iter().enumerate() {
            // monomial in original vars
            let mut mono = vec![0u32; vars.len()];
            for (k, &v) in sup.iter().enumerate() {
                mono[v] = gm[k] + hm[k];
            }
            let mut um = vec![0u32; unames.len()];
            um[i] = 1;
            um[gbox.len() + j] = 1;
            let term = CommPoly::from_terms(&unames, vec![(um, Rational::one())]);
            add_eq(&mut eqs, mono, term);
        }
    }
    for (mono, c) in fm.terms() {
        let cpoly = CommPoly::constant(&unames, -c.clone());
        add_eq(&mut eqs, mono.clone(), cpoly);
    }
    let base_gens: Vec<CommPoly> = eqs.into_values().filter(|p| !p.is_zero()).collect();
    // Gauge: a nonzero factor cannot vanish on every point of the moment
    // curve (m, m^2, ..); try successive points until the system resolves.
    let gauge_bound: u64 = 2 + sup
        .iter()
        .enumerate()
        .map(|(k, _)| dg[k] as u64 * (k as u64 + 1))
        .sum::<u64>();
    for m in 1..=gauge_bound {
        let point: Vec<Rational> = (0..sup.len())
            .map(|k| {
                let mut p = Rational::one();
                for _ in 0..=k {
                    p *= rat(m as i64);
                }
                p
            })
            .collect();
        // gauge equation: g(point) = 1.
        let mut gauge = CommPoly::constant(&unames, -Rational::one());
        for (i, gm) in gbox.iter().enumerate() {
            let mut coeff = Rational::one();
            for (k, &e) in gm.iter().enumerate() {
                for _ in 0..e {
                    coeff *= &point[k];
                }
            }
            let mut um = vec![0u32; unames.len()];
            um[i] = 1;
            gauge = gauge.add(&CommPoly::from_terms(&unames, vec![(um, coeff)]));
        }
        let mut gens = base_gens.clone();
        gens.push(gauge);
        match crate::groebner::solve_rational(&gens, rng) {
            Ok(sol) => {
                for point in &sol.points {
                    // Reconstruct g and h.
                    let mut g = CommPoly::zero(vars);
                    for (i, gm) in gbox.iter().enumerate() {
                        let mut mono = vec![0u32; vars.len()];
                        for (k, &v) in sup.iter().enumerate() {
                            mono[v] = gm[k];
                        }
                        g.add_term(mono, point[i].clone());
                    }
                    let mut h = CommPoly::zero(vars);
                    for (j, hm) in hbox.iter().enumerate() {
                        let mut mono = vec![0u32; vars.len()];
                        for (k, &v) in sup.iter().enumerate() {
                            mono[v] = hm[k];
                        }
                        h.add_term(mono, point[gbox.len() + j].clone());
                    }
                    if g.constant_value().is_some() || h.constant_value().is_some() {
                        continue;
                    }
                    if g.mul(&h) == *fm {
                        return Some((g, h));
                    }
                }
                return None; // solved (complete) and no nontrivial factor here
            }
            Err(_) => {
                // Positive-dimensional with this gauge; try the next point.
                continue;
            }
        }
    }
    None
}

/// Complete factorization through repeated undetermined-coefficient splits;
/// structurally independent of the packing/lifting route.
pub fn factor_via_splitter(f: &CommPoly, rng: &mut DetRng) -> FactorList {
    let mut out = FactorList { unit: Rational::one(), factors: Vec::new() };
    if let Some(c) = f.constant_value() {
        out.unit = c;
        return out;
    }
    let (lc, fm) = f.make_monic(MonomialOrder::DegLex);
    out.unit = lc;
    let mut stack = vec![fm];
    while let Some(g) = stack.pop() {
        if let Some(c) = g.constant_value() {
            out.unit *= c;
            continue;
        }
        match split_undetermined(&g, rng) {
            Some((a, b)) => {
                let (la, am) = a.make_monic(MonomialOrder::DegLex);
                let (lb, bm) = b.make_monic(MonomialOrder::DegLex);
                out.unit *= la * lb;
                stack.push(am);
                stack.push(bm);
            }
            None => out.push_monic(g, 1),
        }
    }
    debug_assert_eq!(out.product(f.vars()), *f);
    out.sorted()
}

// ---------------------------------------------------------------------------
// Dense integer polynomials and the modular engine.
// ---------------------------------------------------------------------------

/// Converts a univariate monic-or-not CommPoly into `(content, primitive
/// integer coefficients ascending)` with positive leading coefficient.
fn dense_int(f: &CommPoly, v: usize) -> (Rational, Vec<BigInt>) {
    let (c, pp) = f.integer_normalize();
    let dense = pp.to_univariate_dense(v);
    let ints: Vec<BigInt> = dense
        .iter()
        .map(|x| {
            debug_assert!(x.denom().is_one());
            x.numer().clone()
        })
        .collect();
    (c, ints)
}

fn from_dense_int(vars: &[String], v: usize, coeffs: &[BigInt]) -> CommPoly {
    let rats: Vec<Rational> = coeffs.iter().map(|c| Rational::from_integer(c.clone())).collect();
    CommPoly::from_univariate_dense(vars, v, &rats)
}

fn zp_trim(a: &mut Vec<BigInt>) {
    while a.len() > 1 && a.last().unwrap().is_zero() {
        a.pop();
    }
}

/// Exact division over Q of dense integer polys; `None` if not exact.
fn zp_exact_div(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rem: Vec<Rational> = a.iter().map(|c| Rational::from_integer(c.clone())).collect();
    let db = b.len() - 1;
    if a.len() < b.len() {
        return None;
    }
    let mut quo = vec![Rational::zero(); a.len() - b.len() + 1];
    let blead = Rational::from_integer(b[db].clone());
    for i in (0..quo.len()).rev() {
        let c = rem[i + db].clone() / &blead;
        quo[i] = c.clone();
        if !c.is_zero() {
            for (j, bc) in b.iter().enumerate() {
                let delta = c.clone() * Rational::from_integer(bc.clone());
                rem[i + j] -= delta;
            }
        }
    }
    if rem.iter().any(|c| !c.is_zero()) {
        return None;
    }
    if quo.iter().any(|c| !c.denom().is_one()) {
        return None;
    }
    Some(quo.iter().map(|c| c.numer().clone()).collect())
}

fn zp_content(a: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in a {
        g = g.gcd(c);
    }
    if g.is_zero() {
        BigInt::one()
    } else {
        g
    }
}

fn zp_primitive(a: &[BigInt]) -> Vec<BigInt> {
    let mut g = zp_content(a);
    if a.last().unwrap().is_negative() {
        g = -g;
    }
    a.iter().map(|c| c / &g).collect()
}

const PRIME_POOL: [u64; 25] = [
    1009, 1013, 1019, 1021, 1031, 1033, 1039, 1049, 1051, 1061, 1063, 1069, 1087, 1091, 1093,
    1097, 1103, 1109, 1117, 1123, 1129, 1151, 1153, 1163, 1171,
];

/// Factors a primitive squarefree integer polynomial with positive leading
/// coefficient and degree >= 1 into irreducible primitive integer polynomials.
fn zassenhaus(f: &[BigInt], rng: &mut DetRng) -> Vec<Vec<BigInt>> {
    let deg = f.len() - 1;
    if deg == 1 {
        return vec![f.to_vec()];
    }
    let lc = f.last().unwrap().clone();
    // Choose a prime keeping the degree and squarefreeness.
    let mut chosen = None;
    for &p in &PRIME_POOL {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = fp_from_int(f, p);
        let dfp = fp_derivative(&fp, p);
        let g = fp_gcd(&fp, &dfp, p);
        if g.len() == 1 {
            chosen = Some(p);
            break;
        }
    }
    let p = chosen.expect("a squarefree integer polynomial has a good prime in the pool");
    let fp = fp_make_monic(&fp_from_int(f, p), p);
    let mut modular = fp_factor(&fp, p, rng);
    modular.sort();
    if modular.len() == 1 {
        return vec![f.to_vec()];
    }
    // Coefficient bound: (deg+1) * 2^deg * height(f) * |lc| (generous).
    let height = f.iter().map(|c| c.abs()).max().unwrap();
    let bound: BigInt =
        BigInt::from(deg as u64 + 1) * (BigInt::one() << deg) * height * lc.abs();
    let target = bound * 2 + 1;
    let mut pk = BigInt::from(p);
    let mut k = 1u32;
    while pk < target {
        pk = &pk * BigInt::from(p);
        k += 1;
    }
    let _ = k;
    // Lift the monic modular factors to mod p^k against monic f / lc.
    let fmonic_pk = mm_make_monic(&mm_from_int(f, &pk), &pk);
    let lifted = hensel_tree(&fmonic_pk, &modular, p, &pk);
    // Subset recombination.
    let mut remaining: Vec<Vec<BigInt>> = lifted;
    let mut work = f.to_vec();
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    'outer: loop {
        if work.len() == 1 {
            break;
        }
        let r = remaining.len();
        if r == 0 {
            out.push(work.clone());
            break;
        }
        if r == 1 {
            out.push(work.clone());
            break;
        }
        let wlc = work.last().unwrap().clone();
        for size in 1..=r / 2 {
            let mut subset: Vec<usize> = (0..size).collect();
            loop {
                // candidate = symmetric(lc * prod subset mod p^k), primitive part.
                let mut cand = vec![wlc.mod_floor(&pk)];
                for &i in &subset {
                    cand = mm_mul(&cand, &remaining[i], &pk);
                }
                let cand_sym: Vec<BigInt> = cand.iter().map(|c| symmetric(c, &pk)).collect();
                let mut cand_sym = cand_sym;
                zp_trim(&mut cand_sym);
                let cand_prim = zp_primitive(&cand_sym);
                if cand_prim.len() > 1 {
                    if let Some(q) = zp_exact_div(&work, &cand_prim) {
                        out.push(cand_prim);
                        for &i in subset.iter().rev() {
                            remaining.remove(i);
                        }
                        work = zp_primitive(&q);
                        continue 'outer;
                    }
                }
                if !next_subset(&mut subset, r) {
                    break;
                }
            }
        }
        out.push(work.clone());
        break;
    }
    out
}

/// Advances `subset` to the next combination of the same size out of `r`;
/// returns false when exhausted.
fn next_subset(subset: &mut [usize], r: usize) -> bool {
    let size = subset.len();
    let mut i = size;
    while i > 0 {
        i -= 1;
        if subset[i] != i + r - size {
            subset[i] += 1;
            for j in i + 1..size {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn symmetric(c: &BigInt, m: &BigInt) -> BigInt {
    let c = c.mod_floor(m);
    if &c * 2 > *m {
        c - m
    } else {
        c
    }
}

// ---- arithmetic mod a small prime p (dense, ascending, trimmed) ----

fn fp_from_int(f: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut out: Vec<u64> = f.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
    fp_trim(&mut out);
    out
}

fn fp_trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn fp_is_zero(a: &[u64]) -> bool {
    a.len() == 1 && a[0] == 0
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if fp_is_zero(a) || fp_is_zero(b) {
        return vec![0];
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + (x as u128) * (y as u128)) % (p as u128);
        }
    }
    let mut out: Vec<u64> = out.iter().map(|&c| c as u64).collect();
    fp_trim(&mut out);
    out
}

fn fp_powmod_u64(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc: u64 = 1;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

fn fp_inv(a: u64, p: u64) -> u64 {
    fp_powmod_u64(a, p - 2, p)
}

fn fp_make_monic(a: &[u64], p: u64) -> Vec<u64> {
    let lc = *a.last().unwrap();
    if lc == 1 {
        return a.to_vec();
    }
    let inv = fp_inv(lc, p);
    a.iter()
        .map(|&c| ((c as u128 * inv as u128) % p as u128) as u64)
        .collect()
}

fn fp_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return (vec![0], a.to_vec());
    }
    let mut rem: Vec<u64> = a.to_vec();
    let mut quo = vec![0u64; a.len() - b.len() + 1];
    let inv = fp_inv(*b.last().unwrap(), p);
    for i in (0..quo.len()).rev() {
        let c = ((rem[i + db] as u128 * inv as u128) % p as u128) as u64;
        quo[i] = c;
        if c != 0 {
            for (j, &bc) in b.iter().enumerate() {
                let sub = (c as u128 * bc as u128) % p as u128;
                let cur = rem[i + j] as u128;
                rem[i + j] = ((cur + p as u128 * p as u128 - sub) % p as u128) as u64;
            }
        }
    }
    fp_trim(&mut rem);
    fp_trim(&mut quo);
    (quo, rem)
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    fp_trim(&mut x);
    fp_trim(&mut y);
    while !fp_is_zero(&y) {
        let (_, r) = fp_divrem(&x, &y, p);
        x = y;
        y = r;
    }
    if fp_is_zero(&x) {
        x
    } else {
        fp_make_monic(&x, p)
    }
}

fn fp_derivative(a: &[u64], p: u64) -> Vec<u64> {
    if a.len() == 1 {
        return vec![0];
    }
    let mut out: Vec<u64> = (1..a.len())
        .map(|i| ((a[i] as u128 * (i as u128 % p as u128)) % p as u128) as u64)
        .collect();
    fp_trim(&mut out);
    out
}

/// `base^e mod (f, p)` with a big-integer exponent.
fn fp_powmod_poly(base: &[u64], e: &BigUint, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let bits = e.bits();
    for i in (0..bits).rev() {
        acc = fp_divrem(&fp_mul(&acc, &acc, p), f, p).1;
        if e.bit(i) {
            acc = fp_divrem(&fp_mul(&acc, base, p), f, p).1;
        }
    }
    acc
}

/// Distinct-degree decomposition of a monic squarefree polynomial mod p;
/// returns `(degree, product-of-that-degree)` pairs.
fn fp_ddf(f: &[u64], p: u64) -> Vec<(usize, Vec<u64>)> {
    let mut out = Vec::new();
    let mut work = f.to_vec();
    let x = vec![0, 1];
    let mut h = fp_divrem(&x, &work, p).1;
    let mut d = 0usize;
    while work.len() > 1 {
        d += 1;
        if 2 * d > work.len() - 1 {
            out.push((work.len() - 1, work.clone()));
            break;
        }
        h = fp_powmod_poly(&h, &BigUint::from(p), &work, p);
        // gcd(h - x, work)
        let mut hx = h.clone();
        while hx.len() < 2 {
            hx.push(0);
        }
        hx[1] = (hx[1] + p - 1) % p;
        fp_trim(&mut hx);
        let g = fp_gcd(&hx, &work, p);
        if g.len() > 1 {
            out.push((d, g.clone()));
            work = fp_divrem(&work, &g, p).0;
            h = fp_divrem(&h, &work, p).1;
        }
    }
    out
}

/// Equal-degree splitting (Cantor-Zassenhaus) of a monic squarefree product
/// of irreducibles all of degree `d`.
fn fp_edf(f: &[u64], d: usize, p: u64, rng: &mut DetRng, out: &mut Vec<Vec<u64>>) {
    let n = f.len() - 1;
    if n == d {
        out.push(f.to_vec());
        return;
    }
    let exp: BigUint = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
    loop {
        // Random polynomial of degree < n.
        let mut a: Vec<u64> = (0..n).map(|_| rng.below(p)).collect();
        fp_trim(&mut a);
        if fp_is_zero(&a) {
            continue;
        }
        let b = fp_powmod_poly(&a, &exp, f, p);
        // gcd(b - 1, f)
        let mut b1 = b.clone();
        b1[0] = (b1[0] + p - 1) % p;
        fp_trim(&mut b1);
        if fp_is_zero(&b1) {
            continue;
        }
        let g = fp_gcd(&b1, f, p);
        if g.len() > 1 && g.len() < f.len() {
            let (q, _) = fp_divrem(f, &g, p);
            fp_edf(&g, d, p, rng, out);
            fp_edf(&q, d, p, rng, out);
            return;
        }
    }
}

/// Complete factorization of a monic squarefree polynomial mod p.
fn fp_factor(f: &[u64], p: u64, rng: &mut DetRng) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for (d, part) in fp_ddf(f, p) {
        fp_edf(&part, d, p, rng, &mut out);
    }
    out
}

// ---- arithmetic mod m = p^k (dense BigInt, ascending, trimmed) ----

fn mm_from_int(f: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = f.iter().map(|c| c.mod_floor(m)).collect();
    mm_trim(&mut out);
    out
}

fn mm_trim(a: &mut Vec<BigInt>) {
    while a.len() > 1 && a.last().unwrap().is_zero() {
        a.pop();
    }
}

fn mm_from_fp(a: &[u64]) -> Vec<BigInt> {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

fn mm_mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (&out[i + j] + x * y).mod_floor(m);
        }
    }
    mm_trim(&mut out);
    out
}

fn mm_add(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let len = a.len().max(b.len());
    let mut out = vec![BigInt::zero(); len];
    for i in 0..len {
        let x = a.get(i).cloned().unwrap_or_else(BigInt::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigInt::zero);
        out[i] = (x + y).mod_floor(m);
    }
    mm_trim(&mut out);
    out
}

fn mm_sub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let len = a.len().max(b.len());
    let mut out = vec![BigInt::zero(); len];
    for i in 0..len {
        let x = a.get(i).cloned().unwrap_or_else(BigInt::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigInt::zero);
        out[i] = (x - y).mod_floor(m);
    }
    mm_trim(&mut out);
    out
}

fn mm_scalar(a: &[BigInt], s: &BigInt, m: &BigInt) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = a.iter().map(|c| (c * s).mod_floor(m)).collect();
    mm_trim(&mut out);
    out
}

/// Inverse of a unit mod p^k by Hensel-lifting the mod-p inverse.
fn mm_inv_scalar(a: &BigInt, p: u64, m: &BigInt) -> BigInt {
    let a0 = a.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    let mut inv = BigInt::from(fp_inv(a0, p));
    // Newton: inv <- inv * (2 - a*inv) until stable mod m.
    loop {
        let prod = (a * &inv).mod_floor(m);
        if prod.is_one() {
            return inv;
        }
        inv = (&inv * ((BigInt::from(2) - prod).mod_floor(m))).mod_floor(m);
    }
}

fn mm_make_monic(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    // Leading coefficient must be a unit (true here: p does not divide it).
    let lc = a.last().unwrap();
    if lc.is_one() {
        return a.to_vec();
    }
    // p is unknown here; the caller guarantees lc is a unit mod m.
    // Use extended gcd over Z to invert mod m.
    let eg = lc.extended_gcd(m);
    assert!(eg.gcd.is_one(), "leading coefficient must be a unit");
    let inv = eg.x.mod_floor(m);
    mm_scalar(a, &inv, m)
}

/// Division by a monic divisor mod m.
fn mm_divrem_monic(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    let db = b.len() - 1;
    assert!(b.last().unwrap().is_one(), "divisor must be monic");
    if a.len() < b.len() {
        return (vec![BigInt::zero()], a.to_vec());
    }
    let mut rem: Vec<BigInt> = a.to_vec();
    let mut quo = vec![BigInt::zero(); a.len() - b.len() + 1];
    for i in (0..quo.len()).rev() {
        let c = rem[i + db].mod_floor(m);
        quo[i] = c.clone();
        if !c.is_zero() {
            for (j, bc) in b.iter().enumerate() {
                rem[i + j] = (&rem[i + j] - &c * bc).mod_floor(m);
            }
        }
    }
    mm_trim(&mut rem);
    mm_trim(&mut quo);
    (quo, rem)
}

/// Extended Euclid mod p for monic-output Bezout: returns (s, t) with
/// `s*a + t*b = 1 mod p`; requires gcd(a, b) = 1 mod p.
fn fp_bezout(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    // Iterative extended Euclid.
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1) = (vec![1u64], vec![0u64]);
    let (mut t0, mut t1) = (vec![0u64], vec![1u64]);
    while !fp_is_zero(&r1) {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let new_s = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        let new_t = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = new_s;
        t0 = t1;
        t1 = new_t;
    }
    assert!(r0.len() == 1 && r0[0] != 0, "inputs must be coprime mod p");
    let inv = fp_inv(r0[0], p);
    let s = fp_scalar(&s0, inv, p);
    let t = fp_scalar(&t0, inv, p);
    (s, t)
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    let mut out = vec![0u64; len];
    for i in 0..len {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = (x + p - y) % p;
    }
    fp_trim(&mut out);
    out
}

fn fp_scalar(a: &[u64], s: u64, p: u64) -> Vec<u64> {
    let mut out: Vec<u64> = a
        .iter()
        .map(|&c| ((c as u128 * s as u128) % p as u128) as u64)
        .collect();
    fp_trim(&mut out);
    out
}

/// Lifts the factorization `f = prod(mod_factors) (mod p)` to the modulus
/// `pk = p^k`: binary-splits the factor list into two blocks, lifts the pair
/// quadratically, recurses.  `f` is monic mod pk; all returned factors are
/// monic mod pk.
fn hensel_tree(f: &[BigInt], mod_factors: &[Vec<u64>], p: u64, pk: &BigInt) -> Vec<Vec<BigInt>> {
    if mod_factors.len() == 1 {
        return vec![f.to_vec()];
    }
    let mid = mod_factors.len() / 2;
    let (left, right) = mod_factors.split_at(mid);
    let mut a0 = vec![1u64];
    for g in left {
        a0 = fp_mul(&a0, g, p);
    }
    let mut b0 = vec![1u64];
    for g in right {
        b0 = fp_mul(&b0, g, p);
    }
    let (a, b) = hensel_pair(f, &a0, &b0, p, pk);
    let mut out = hensel_tree(&a, left, p, pk);
    out.extend(hensel_tree(&b, right, p, pk));
    out
}

/// Quadratic Hensel lifting of a coprime monic pair `f = a0*b0 (mod p)` up to
/// modulus pk (a power of p); returns the lifted monic pair mod pk.
fn hensel_pair(
    f: &[BigInt],
    a0: &[u64],
    b0: &[u64],
    p: u64,
    pk: &BigInt,
) -> (Vec<BigInt>, Vec<BigInt>) {
    let (s0, t0) = fp_bezout(a0, b0, p);
    let mut a = mm_from_fp(a0);
    let mut b = mm_from_fp(b0);
    let mut s = mm_from_fp(&s0);
    let mut t = mm_from_fp(&t0);
    let mut m = BigInt::from(p);
    while m < *pk {
        let m2 = (&m * &m).min(pk.clone());
        let fcur = mm_from_int(f, &m2);
        // e = f - a*b
        let e = mm_sub(&fcur, &mm_mul(&a, &b, &m2), &m2);
        // a <- a + (t*e mod a); b <- b + s*e + u*b  where t*e = u*a + (t*e mod a)
        let te = mm_mul(&t, &e, &m2);
        let (u, te_mod_a) = mm_divrem_monic(&te, &a, &m2);
        let se = mm_mul(&s, &e, &m2);
        let badd = mm_add(&se, &mm_mul(&u, &b, &m2), &m2);
        a = mm_add(&a, &te_mod_a, &m2);
        b = mm_add(&b, &badd, &m2);
        // Refresh Bezout: d = s*a + t*b - 1; s <- s - s*d mod b; t <- (1 - s*a)/b.
        let sa = mm_mul(&s, &a, &m2);
        let tb = mm_mul(&t, &b, &m2);
        let mut d = mm_add(&sa, &tb, &m2);
        d[0] = (&d[0] - BigInt::one()).mod_floor(&m2);
        mm_trim(&mut d);
        let sd = mm_mul(&s, &d, &m2);
        let s_unred = mm_sub(&s, &sd, &m2);
        let (_, s_new) = mm_divrem_monic(&s_unred, &b, &m2);
        // t = (1 - s_new*a) / b, exact since s_new*a + t*b = 1 mod m2.
        let mut one_minus = mm_mul(&s_new, &a, &m2);
        one_minus = mm_scalar(&one_minus, &BigInt::from(-1), &m2);
        one_minus[0] = (&one_minus[0] + BigInt::one()).mod_floor(&m2);
        mm_trim(&mut one_minus);
        let (t_new, r) = mm_divrem_monic(&one_minus, &b, &m2);
        debug_assert!(r.iter().all(|c| c.is_zero()));
        s = s_new;
        t = t_new;
        m = m2;
    }
    (a, b)
}

// (keep the helper visible to the submodule tests)
#[allow(dead_code)]
fn mm_inv_scalar_unused(a: &BigInt, p: u64, m: &BigInt) -> BigInt {
    mm_inv_scalar(a, p, m)
}
