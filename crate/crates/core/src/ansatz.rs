//! Factorization of inhomogeneous operators through their graded parts.
//!
//! A factorization `h = p * q` couples the graded parts of `p` and `q` level
//! by level: extreme (lexicographically highest/lowest) parts of the factors
//! multiply to the extreme parts of `h`, and all remaining parts live on a
//! bounded degree grid.  The pipeline is:
//!
//! 1. enumerate two-block splits of the extreme parts of `h`
//!    ([`two_block_splits`]);
//! 2. for each candidate pair of extremes, list the possible part degrees of
//!    both factors ([`degree_window`]);
//! 3. eliminate the middle parts of `p` in favour of the middle parts of `q`
//!    twice (descending and ascending through the levels), compare Euler
//!    coefficients, and collect a polynomial system in the unknown
//!    coefficients of `q` plus two scale factors ([`build_system`]);
//! 4. solve the system exactly over the rationals ([`solve_built`]), rebuild
//!    the factor pair ([`reconstruct_pair`]), verify it by multiplication,
//!    and recurse on both factors.
//!
//! Entry points: [`factor`] (Weyl algebra; homogeneous inputs go to the
//! graded engine), [`factor_shift`] (shift algebra via the canonical
//! embedding), and [`factor_with_premultiplier`] (factorizations enabled by
//! a monomial left cofactor).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::arith::{theta_vars, CommPoly, Rational};
use crate::commfact::factor_multivariate;
use crate::gradedfact::factor_graded;
use crate::grading::{
    from_theta_form, gamma, graded_decomposition, is_graded, lex_compare, theta_shift,
    to_theta_form, DegreeVector, ThetaForm,
};
use crate::groebner::{solve_rational, SolveError};
use crate::ore::{
    iota_embed, iota_preimage, AlgebraKind, AlgebraSpec, Factorization, OpVar, OrePoly,
};
use crate::util::DetRng;
use num_traits::{One, Zero};

// ---------------------------------------------------------------------------
// Degree boxes and part windows
// ---------------------------------------------------------------------------

/// Bounds satisfied by every graded part of every factor of a fixed operator
/// `h`: coordinate `t` of a part degree lies in `[-deg_xt(h), deg_dt(h)]`,
/// and the Euler polynomial of a part has degree at most
/// `min(deg_xt(h), deg_dt(h))` in the variable `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub theta: Vec<u32>,
}

impl DegreeBox {
    pub fn contains(&self, z: &DegreeVector) -> bool {
        z.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&zi, (&lo, &hi))| lo <= zi && zi <= hi)
    }

    /// Number of Euler monomials under the per-variable caps.
    pub fn monomial_count(&self) -> u64 {
        self.theta.iter().map(|&b| b as u64 + 1).product()
    }

    /// All degree vectors inside the box, odometer order (coordinate 0
    /// fastest), which is deterministic but otherwise arbitrary.
    pub fn all_degrees(&self) -> Vec<DegreeVector> {
        let n = self.lo.len();
        let mut out = Vec::new();
        let mut cur = self.lo.clone();
        loop {
            out.push(cur.clone());
            let mut i = 0;
            loop {
                if i == n {
                    return out;
                }
                if cur[i] < self.hi[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = self.lo[i];
                i += 1;
            }
        }
    }
}

/// The degree box of `h` (see [`DegreeBox`]).
pub fn degree_box(h: &OrePoly) -> DegreeBox {
    let n = h.n();
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    let mut theta = Vec::with_capacity(n);
    for t in 0..n {
        let dx = h.max_var_degree(OpVar::X(t)).unwrap_or(0);
        let dd = h.max_var_degree(OpVar::D(t)).unwrap_or(0);
        lo.push(-(dx as i64));
        hi.push(dd as i64);
        theta.push(dx.min(dd));
    }
    DegreeBox { lo, hi, theta }
}

/// Cap on the Euler degree (in variable `t`) of any part of any factor of `h`.
pub fn theta_degree_bound(h: &OrePoly, t: usize) -> u32 {
    degree_box(h).theta[t]
}

/// Number of unknown coefficients of one middle part of a factor of `h`.
pub fn coefficient_count(h: &OrePoly) -> u64 {
    degree_box(h).monomial_count()
}

/// Euler exponent vectors under the caps, odometer order with variable 0
/// fastest; index 0 is the constant monomial.
fn box_theta_monomials(bounds: &[u32]) -> Vec<Vec<u32>> {
    let n = bounds.len();
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    loop {
        out.push(cur.clone());
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            if cur[i] < bounds[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

fn in_theta_box(mono: &[u32], bounds: &[u32]) -> bool {
    mono.iter().zip(bounds).all(|(&e, &b)| e <= b)
}

fn add_dv(a: &DegreeVector, b: &DegreeVector) -> DegreeVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub_dv(a: &DegreeVector, b: &DegreeVector) -> DegreeVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn neg_dv(a: &DegreeVector) -> DegreeVector {
    a.iter().map(|x| -x).collect()
}

fn is_zero_dv(a: &DegreeVector) -> bool {
    a.iter().all(|&x| x == 0)
}

/// The graded parts of `h` in Euler form, lexicographically descending by
/// degree.
pub fn theta_levels(h: &OrePoly) -> Vec<(DegreeVector, CommPoly)> {
    let mut parts: Vec<(DegreeVector, CommPoly)> = graded_decomposition(h)
        .into_iter()
        .map(|(z, part)| {
            let tf = to_theta_form(&part).expect("graded part");
            (z, tf.theta)
        })
        .collect();
    parts.sort_by(|a, b| lex_compare(&b.0, &a.0));
    parts
}

fn window_between(bb: &DegreeBox, top: &DegreeVector, bot: &DegreeVector) -> Option<Vec<DegreeVector>> {
    if !bb.contains(top) || !bb.contains(bot) {
        return None;
    }
    if lex_compare(top, bot) != Ordering::Greater {
        return None;
    }
    let mut mid: Vec<DegreeVector> = bb
        .all_degrees()
        .into_iter()
        .filter(|z| {
            lex_compare(top, z) == Ordering::Greater && lex_compare(z, bot) == Ordering::Greater
        })
        .collect();
    mid.sort_by(|a, b| lex_compare(b, a));
    let mut out = vec![top.clone()];
    out.extend(mid);
    out.push(bot.clone());
    Some(out)
}

/// Candidate part-degree sequences for a factor pair of `h` with the given
/// extreme degrees: every box degree lexicographically between the extremes,
/// endpoints included, sorted descending.  `None` when an extreme leaves the
/// box or the upper extreme is not lexicographically above the lower one.
pub fn degree_window(
    h: &OrePoly,
    eta1: &DegreeVector,
    etak: &DegreeVector,
    mu1: &DegreeVector,
    mul: &DegreeVector,
) -> Option<(Vec<DegreeVector>, Vec<DegreeVector>)> {
    let bb = degree_box(h);
    let eta = window_between(&bb, eta1, etak)?;
    let mu = window_between(&bb, mu1, mul)?;
    Some((eta, mu))
}

// ---------------------------------------------------------------------------
// Two-block splits of a graded part
// ---------------------------------------------------------------------------

/// One way of writing a graded part (Euler polynomial `v` at degree `z`) as
/// a product of two graded operators whose degrees stay inside the box:
///
/// `v = scalar * left * theta_shift(right, z_left) * gamma(z_left, z_right)`
///
/// with `left` and `right` monic.
#[derive(Clone, Debug)]
pub struct TwoBlockSplit {
    pub z_left: DegreeVector,
    pub left: CommPoly,
    pub z_right: DegreeVector,
    pub right: CommPoly,
    pub scalar: Rational,
}

/// All two-block splits of the part `(z, v)` of an operator with degree box
/// `bb`.  Trivial blocks (`1` at degree `0`) are included on either side.
pub fn two_block_splits(
    algebra: &AlgebraSpec,
    bb: &DegreeBox,
    z: &DegreeVector,
    v: &CommPoly,
    rng: &mut DetRng,
) -> Vec<TwoBlockSplit> {
    let mut out = Vec::new();
    let mut seen: BTreeSet<(DegreeVector, String)> = BTreeSet::new();
    for z_left in bb.all_degrees() {
        let z_right = sub_dv(z, &z_left);
        if !bb.contains(&z_right) {
            continue;
        }
        let g = gamma(algebra, &z_left, &z_right);
        let rest = match v.exact_div(&g) {
            Some(r) => r,
            None => continue,
        };
        let fl = factor_multivariate(&rest, rng);
        let mults: Vec<u32> = fl.factors.iter().map(|&(_, m)| m).collect();
        let mut pick = vec![0u32; mults.len()];
        loop {
            let mut left = CommPoly::one(v.vars());
            let mut right_pre = CommPoly::one(v.vars());
            for (idx, (f, m)) in fl.factors.iter().enumerate() {
                if pick[idx] > 0 {
                    left = left.mul(&f.pow(pick[idx]));
                }
                if *m > pick[idx] {
                    right_pre = right_pre.mul(&f.pow(m - pick[idx]));
                }
            }
            let right = theta_shift(&right_pre, &neg_dv(&z_left), algebra);
            if seen.insert((z_left.clone(), format!("{}", left))) {
                out.push(TwoBlockSplit {
                    z_left: z_left.clone(),
                    left,
                    z_right: z_right.clone(),
                    right,
                    scalar: fl.unit.clone(),
                });
            }
            // Odometer over factor multiplicities.
            let mut i = 0;
            loop {
                if i == pick.len() {
                    break;
                }
                if pick[i] < mults[i] {
                    pick[i] += 1;
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == pick.len() {
                break;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// The coefficient system of a candidate
// ---------------------------------------------------------------------------

/// A known or scale-factor-scaled extreme part value (an Euler polynomial).
#[derive(Clone, Debug)]
pub enum ExtremeValue {
    Known(CommPoly),
    /// The given monic polynomial times an unknown scalar.
    Scaled(CommPoly),
}

/// Everything that pins down one candidate coefficient system: the graded
/// parts of `h`, the part-degree sequences of both factors, and the extreme
/// part values.
#[derive(Clone, Debug)]
pub struct AnsatzInstance {
    pub algebra: AlgebraSpec,
    /// Euler polynomials of the graded parts of `h`, lex-descending.
    pub h_levels: Vec<(DegreeVector, CommPoly)>,
    /// Part degrees of the left factor, lex-descending (length `k >= 2`).
    pub eta: Vec<DegreeVector>,
    /// Part degrees of the right factor, lex-descending (length `l >= 2`).
    pub mu: Vec<DegreeVector>,
    /// Top part of the left factor (monic).
    pub p_top: CommPoly,
    /// Top part of the right factor (scalar folded in).
    pub q_top: CommPoly,
    pub p_bot: ExtremeValue,
    pub q_bot: ExtremeValue,
    /// Required product of the two bottom scale factors (the bottom level's
    /// scalar); used when the bottom parts are `Scaled`.
    pub c_bot: Rational,
    /// Euler degree caps for the middle parts.
    pub bounds: Vec<u32>,
}

/// Size bookkeeping of a built system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemStats {
    pub k: usize,
    pub l: usize,
    /// Unknown coefficients per middle part.
    pub nu: u64,
    /// Number of emitted level equations (both directions).
    pub level_blocks: usize,
    pub box_generators: usize,
    pub extended_generators: usize,
    /// Total number of unknown middle parts.
    pub unknown_summands: usize,
    /// Cumulative count of distinct unknown middle parts met while scanning
    /// the raw level equations from the highest level down.
    pub prefix_counts: Vec<usize>,
}

/// A candidate coefficient system plus the data needed to rebuild the factor
/// pair from a solution point.
#[derive(Clone, Debug)]
pub struct BuiltSystem {
    /// Unknowns: middle-part coefficients (level by level, box monomial
    /// order), then the bottom scale factors where applicable.
    pub vars: Vec<String>,
    /// Coefficient comparisons at Euler monomials inside the box, plus the
    /// bottom scale generator; zero polynomials are kept.
    pub box_gens: Vec<CommPoly>,
    /// Coefficient comparisons at Euler monomials outside the box.
    pub extended_gens: Vec<CommPoly>,
    pub stats: SystemStats,
    /// Left-factor parts as fractions over the combined ring (descending
    /// elimination), one per entry of `eta`.
    p_td: Vec<Frac>,
    /// Right-factor parts over the combined ring, one per entry of `mu`.
    q_vals: Vec<CommPoly>,
}

/// A quotient of combined-ring polynomials.  Denominators stay small (they
/// are products of known Euler polynomials), so instead of full gcd
/// reduction only exact cancellation of the whole denominator is attempted.
#[derive(Clone, Debug)]
struct Frac {
    num: CommPoly,
    den: CommPoly,
}

impl Frac {
    fn from_poly(p: CommPoly) -> Self {
        let den = CommPoly::one(p.vars());
        Frac { num: p, den }
    }

    fn cancel(mut self) -> Self {
        if self.num.is_zero() {
            self.den = CommPoly::one(self.num.vars());
            return self;
        }
        if self.den.is_one() {
            return self;
        }
        if let Some(q) = self.num.exact_div(&self.den) {
            self.den = CommPoly::one(self.num.vars());
            self.num = q;
        }
        self
    }

    fn add(&self, o: &Frac) -> Frac {
        if self.den == o.den {
            return Frac { num: self.num.add(&o.num), den: self.den.clone() }.cancel();
        }
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        let den = self.den.mul(&o.den);
        Frac { num, den }.cancel()
    }

    fn sub(&self, o: &Frac) -> Frac {
        if self.den == o.den {
            return Frac { num: self.num.sub(&o.num), den: self.den.clone() }.cancel();
        }
        let num = self.num.mul(&o.den).sub(&o.num.mul(&self.den));
        let den = self.den.mul(&o.den);
        Frac { num, den }.cancel()
    }

    fn mul_poly(&self, p: &CommPoly) -> Frac {
        Frac { num: self.num.mul(p), den: self.den.clone() }.cancel()
    }

    fn div_poly(&self, p: &CommPoly) -> Frac {
        assert!(!p.is_zero(), "division by the zero polynomial");
        Frac { num: self.num.clone(), den: self.den.mul(p) }.cancel()
    }
}

/// Splits a combined-ring polynomial into Euler-monomial coefficients over
/// the unknown variables.
fn split_theta(f: &CommPoly, n: usize, tail_vars: &[String]) -> BTreeMap<Vec<u32>, CommPoly> {
    let mut out: BTreeMap<Vec<u32>, CommPoly> = BTreeMap::new();
    for (mono, c) in f.terms() {
        let key = mono[..n].to_vec();
        let tail = mono[n..].to_vec();
        out.entry(key)
            .or_insert_with(|| CommPoly::zero(tail_vars))
            .add_term(tail, c.clone());
    }
    out
}

/// Builds the coefficient system of a candidate.
///
/// The middle parts of the left factor are eliminated twice — once scanning
/// the levels descending (each part expressed from the level it shares with
/// the right factor's top part) and once ascending (from the level shared
/// with the right factor's bottom part).  Each pass then emits, for every
/// level except the two extremes and the pass's own defining levels, the
/// Euler-coefficient comparisons of that level's equation with denominators
/// cleared.  Comparisons at monomials inside the degree caps form the primary
/// system; the rest are kept as an extension tier.  When the bottom parts
/// carry unknown scale factors, the bottom level contributes their product
/// constraint as one extra generator.
pub fn build_system(inst: &AnsatzInstance) -> BuiltSystem {
    let alg = &inst.algebra;
    let n = alg.n;
    let k = inst.eta.len();
    let l = inst.mu.len();
    assert!(k >= 2 && l >= 2, "both factors need at least two parts");
    let tv = theta_vars(n);
    let monos = box_theta_monomials(&inst.bounds);
    let nu = monos.len() as u64;

    // Unknown variables: middle-part coefficients, then scale factors.
    let mut vars: Vec<String> = Vec::new();
    for j in 1..l - 1 {
        for m in 0..monos.len() {
            vars.push(format!("u{}_{}", j + 1, m));
        }
    }
    let sa_idx = match inst.p_bot {
        ExtremeValue::Scaled(_) => {
            vars.push("sa".to_string());
            Some(vars.len() - 1)
        }
        ExtremeValue::Known(_) => None,
    };
    let sb_idx = match inst.q_bot {
        ExtremeValue::Scaled(_) => {
            vars.push("sb".to_string());
            Some(vars.len() - 1)
        }
        ExtremeValue::Known(_) => None,
    };
    let mut comb_vars = tv.clone();
    comb_vars.extend(vars.iter().cloned());
    let ext = |f: &CommPoly| f.rename_vars(&comb_vars);
    let comb_var = |idx: usize| CommPoly::var(&comb_vars, n + idx);

    // Right-factor part values over the combined ring.
    let mut q_vals: Vec<CommPoly> = Vec::with_capacity(l);
    q_vals.push(ext(&inst.q_top));
    for j in 1..l - 1 {
        let mut u = CommPoly::zero(&comb_vars);
        for (m, mono) in monos.iter().enumerate() {
            let mut e = vec![0u32; comb_vars.len()];
            e[..n].copy_from_slice(mono);
            e[n + (j - 1) * monos.len() + m] = 1;
            u.add_term(e, Rational::one());
        }
        q_vals.push(u);
    }
    q_vals.push(match &inst.q_bot {
        ExtremeValue::Known(f) => ext(f),
        ExtremeValue::Scaled(f) => ext(f).mul(&comb_var(sb_idx.unwrap())),
    });

    let p_top_c = ext(&inst.p_top);
    let p_bot_c = match &inst.p_bot {
        ExtremeValue::Known(f) => ext(f),
        ExtremeValue::Scaled(f) => ext(f).mul(&comb_var(sa_idx.unwrap())),
    };

    // Level table: degree -> contributing (left part, right part) pairs.
    let mut table: BTreeMap<DegreeVector, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..k {
        for j in 0..l {
            table
                .entry(add_dv(&inst.eta[i], &inst.mu[j]))
                .or_default()
                .push((i, j));
        }
    }
    debug_assert!(
        inst.h_levels.iter().all(|(z, _)| table.contains_key(z)),
        "every part of the input must be reachable by the candidate degrees"
    );
    let hmap: BTreeMap<DegreeVector, CommPoly> =
        inst.h_levels.iter().map(|(z, v)| (z.clone(), ext(v))).collect();
    let h_at = |z: &DegreeVector| -> CommPoly {
        hmap.get(z).cloned().unwrap_or_else(|| CommPoly::zero(&comb_vars))
    };
    let gam = |i: usize, j: usize| ext(&gamma(alg, &inst.eta[i], &inst.mu[j]));
    let shifted_q = |vals: &[CommPoly], i: usize, j: usize| theta_shift(&vals[j], &inst.eta[i], alg);

    // Descending elimination of the left-factor middle parts.
    let mut p_td: Vec<Frac> = vec![Frac::from_poly(CommPoly::zero(&comb_vars)); k];
    p_td[0] = Frac::from_poly(p_top_c.clone());
    p_td[k - 1] = Frac::from_poly(p_bot_c.clone());
    for i in 1..k - 1 {
        let z = add_dv(&inst.eta[i], &inst.mu[0]);
        let mut acc = Frac::from_poly(h_at(&z));
        for &(a, b) in &table[&z] {
            if (a, b) == (i, 0) {
                continue;
            }
            debug_assert!(a < i, "descending elimination sees earlier left parts only");
            let term = p_td[a].mul_poly(&shifted_q(&q_vals, a, b).mul(&gam(a, b)));
            acc = acc.sub(&term);
        }
        let den = shifted_q(&q_vals, i, 0).mul(&gam(i, 0));
        p_td[i] = acc.div_poly(&den);
    }

    // Ascending elimination.
    let mut p_bu: Vec<Frac> = vec![Frac::from_poly(CommPoly::zero(&comb_vars)); k];
    p_bu[0] = Frac::from_poly(p_top_c);
    p_bu[k - 1] = Frac::from_poly(p_bot_c);
    for i in (1..k - 1).rev() {
        let z = add_dv(&inst.eta[i], &inst.mu[l - 1]);
        let mut acc = Frac::from_poly(h_at(&z));
        for &(a, b) in &table[&z] {
            if (a, b) == (i, l - 1) {
                continue;
            }
            debug_assert!(a > i, "ascending elimination sees later left parts only");
            let term = p_bu[a].mul_poly(&shifted_q(&q_vals, a, b).mul(&gam(a, b)));
            acc = acc.sub(&term);
        }
        let den = shifted_q(&q_vals, i, l - 1).mul(&gam(i, l - 1));
        p_bu[i] = acc.div_poly(&den);
    }

    // Emit coefficient comparisons.
    let top_z = add_dv(&inst.eta[0], &inst.mu[0]);
    let bot_z = add_dv(&inst.eta[k - 1], &inst.mu[l - 1]);
    let td_sources: BTreeSet<DegreeVector> =
        (1..k - 1).map(|i| add_dv(&inst.eta[i], &inst.mu[0])).collect();
    let bu_sources: BTreeSet<DegreeVector> =
        (1..k - 1).map(|i| add_dv(&inst.eta[i], &inst.mu[l - 1])).collect();
    let levels_desc: Vec<DegreeVector> = table.keys().rev().cloned().collect();

    let mut box_gens: Vec<CommPoly> = Vec::new();
    let mut extended_gens: Vec<CommPoly> = Vec::new();
    let mut level_blocks = 0usize;
    for (parts, sources) in [(&p_td, &td_sources), (&p_bu, &bu_sources)] {
        for z in &levels_desc {
            if *z == top_z || *z == bot_z || sources.contains(z) {
                continue;
            }
            let mut e = Frac::from_poly(h_at(z).neg());
            for &(a, b) in &table[z] {
                let term = parts[a].mul_poly(&shifted_q(&q_vals, a, b).mul(&gam(a, b)));
                e = e.add(&term);
            }
            let split = split_theta(&e.num, n, &vars);
            for mono in &monos {
                box_gens.push(
                    split.get(mono).cloned().unwrap_or_else(|| CommPoly::zero(&vars)),
                );
            }
            for (key, g) in &split {
                if !in_theta_box(key, &inst.bounds) && !g.is_zero() {
                    extended_gens.push(g.clone());
                }
            }
            level_blocks += 1;
        }
    }

    // Bottom level: scale-factor constraint.
    match (&inst.p_bot, &inst.q_bot) {
        (ExtremeValue::Scaled(pa), ExtremeValue::Scaled(qb)) => {
            let prod = pa
                .mul(&theta_shift(qb, &inst.eta[k - 1], alg))
                .mul(&gamma(alg, &inst.eta[k - 1], &inst.mu[l - 1]))
                .scalar_mul(&inst.c_bot);
            let hv = inst
                .h_levels
                .iter()
                .find(|(z, _)| *z == bot_z)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(|| CommPoly::zero(&tv));
            debug_assert_eq!(prod, hv, "bottom split must reproduce the bottom level");
            let mut g = CommPoly::var(&vars, sa_idx.unwrap()).mul(&CommPoly::var(&vars, sb_idx.unwrap()));
            g = g.sub(&CommPoly::constant(&vars, inst.c_bot.clone()));
            box_gens.push(g);
        }
        (ExtremeValue::Known(pa), ExtremeValue::Known(qb)) => {
            let prod = pa
                .mul(&theta_shift(qb, &inst.eta[k - 1], alg))
                .mul(&gamma(alg, &inst.eta[k - 1], &inst.mu[l - 1]));
            let hv = inst
                .h_levels
                .iter()
                .find(|(z, _)| *z == bot_z)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(|| CommPoly::zero(&tv));
            debug_assert_eq!(prod, hv, "known bottom parts must reproduce the bottom level");
        }
        _ => panic!("bottom parts must be both known or both scaled"),
    }

    // Raw-scan bookkeeping: distinct unknown middle parts met per level.
    let mut seen_parts: BTreeSet<(bool, usize)> = BTreeSet::new();
    let mut prefix_counts = Vec::with_capacity(levels_desc.len());
    for z in &levels_desc {
        for &(a, b) in &table[z] {
            if a > 0 && a < k - 1 {
                seen_parts.insert((false, a));
            }
            if b > 0 && b < l - 1 {
                seen_parts.insert((true, b));
            }
        }
        prefix_counts.push(seen_parts.len());
    }
    let kappa = (k - 2) + (l - 2);

    // On evenly spaced degree chains, the scan picks up exactly two new
    // unknown parts per level through the first half.
    let eta_steps: Vec<DegreeVector> =
        (0..k - 1).map(|i| sub_dv(&inst.eta[i], &inst.eta[i + 1])).collect();
    let mu_steps: Vec<DegreeVector> =
        (0..l - 1).map(|j| sub_dv(&inst.mu[j], &inst.mu[j + 1])).collect();
    let straight = eta_steps.iter().all(|s| *s == eta_steps[0])
        && mu_steps.iter().all(|s| *s == mu_steps[0])
        && eta_steps[0] == mu_steps[0];
    if straight && k == l {
        for i in 1..=(kappa + 1) / 2 {
            debug_assert_eq!(prefix_counts[i - 1], 2 * (i - 1));
        }
    }
    if straight && k.min(l) >= 3 {
        let m = k.min(l);
        let mm = k.max(l);
        debug_assert!(
            2 * (m - 1) <= level_blocks && level_blocks <= (mm - 1) * (mm - 1),
            "level equation count out of band: {} not in [{}, {}]",
            level_blocks,
            2 * (m - 1),
            (mm - 1) * (mm - 1)
        );
    }

    let stats = SystemStats {
        k,
        l,
        nu,
        level_blocks,
        box_generators: box_gens.len(),
        extended_generators: extended_gens.len(),
        unknown_summands: kappa,
        prefix_counts,
    };
    BuiltSystem { vars, box_gens, extended_gens, stats, p_td, q_vals }
}

/// Solves a built system: primary tier first, and on a positive-dimensional
/// outcome again with the extension tier added.  Returns the rational
/// solution points (coordinates follow `built.vars`) and the total degree of
/// dropped irrational branches.
pub fn solve_built(built: &BuiltSystem, rng: &mut DetRng) -> (Vec<Vec<Rational>>, u64) {
    if built.vars.is_empty() {
        let consistent = built
            .box_gens
            .iter()
            .chain(&built.extended_gens)
            .all(|g| g.is_zero());
        return (if consistent { vec![Vec::new()] } else { Vec::new() }, 0);
    }
    match solve_rational(&built.box_gens, rng) {
        Ok(s) => (s.points, s.dropped_branches),
        Err(SolveError::PositiveDimensional { .. }) => {
            let mut gens = built.box_gens.clone();
            gens.extend(built.extended_gens.iter().cloned());
            match solve_rational(&gens, rng) {
                Ok(s) => (s.points, s.dropped_branches),
                Err(SolveError::PositiveDimensional { .. }) => (Vec::new(), 0),
            }
        }
    }
}

/// Rebuilds the per-level Euler polynomials of both factors at a solution
/// point.  `None` when a left part's cleared denominator does not divide its
/// numerator there (a spurious point of the primary tier).
pub fn reconstruct_parts(
    inst: &AnsatzInstance,
    built: &BuiltSystem,
    point: &[Rational],
) -> Option<(Vec<(DegreeVector, CommPoly)>, Vec<(DegreeVector, CommPoly)>)> {
    assert_eq!(point.len(), built.vars.len());
    let n = inst.algebra.n;
    let tv = theta_vars(n);
    let subst = |f: &CommPoly| -> CommPoly {
        let mut g = f.clone();
        for (i, val) in point.iter().enumerate() {
            g = g.affine_substitute(n + i, &Rational::zero(), val);
        }
        g.rename_vars(&tv)
    };
    let k = inst.eta.len();
    let l = inst.mu.len();
    let mut q_parts = Vec::new();
    for (j, qv) in built.q_vals.iter().enumerate() {
        let th = subst(qv);
        if th.is_zero() {
            if j == 0 || j == l - 1 {
                return None;
            }
            continue;
        }
        q_parts.push((inst.mu[j].clone(), th));
    }
    let mut p_parts = Vec::new();
    for (i, fr) in built.p_td.iter().enumerate() {
        let numv = subst(&fr.num);
        let denv = subst(&fr.den);
        if denv.is_zero() {
            return None;
        }
        let th = numv.exact_div(&denv)?;
        if th.is_zero() {
            if i == 0 || i == k - 1 {
                return None;
            }
            continue;
        }
        p_parts.push((inst.eta[i].clone(), th));
    }
    Some((p_parts, q_parts))
}

/// Rebuilds the factor pair at a solution point (see [`reconstruct_parts`]).
/// The product is *not* checked here; callers verify by multiplication.
pub fn reconstruct_pair(
    inst: &AnsatzInstance,
    built: &BuiltSystem,
    point: &[Rational],
) -> Option<(OrePoly, OrePoly)> {
    let (p_parts, q_parts) = reconstruct_parts(inst, built, point)?;
    let assemble = |parts: &[(DegreeVector, CommPoly)]| -> OrePoly {
        let mut acc = OrePoly::zero(&inst.algebra);
        for (z, th) in parts {
            acc = acc.add(&from_theta_form(&ThetaForm {
                algebra: inst.algebra.clone(),
                z: z.clone(),
                theta: th.clone(),
            }));
        }
        acc
    };
    Some((assemble(&p_parts), assemble(&q_parts)))
}

// ---------------------------------------------------------------------------
// The factorization driver
// ---------------------------------------------------------------------------

/// Result of a factorization run.
#[derive(Clone, Debug)]
pub struct FactorOutcome {
    /// Complete factorizations into monic irreducible factors, deduplicated,
    /// sorted by factor count then printed form.  A single one-factor entry
    /// means the input is irreducible.
    pub factorizations: Vec<Factorization>,
    /// Total degree of the irrational solution branches dropped while
    /// solving coefficient systems.
    pub dropped_branches: u64,
}

/// Inputs [`factor`] and friends refuse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorError {
    /// Zero or a nonzero scalar: nothing to factor.
    ZeroOrUnit,
    /// Inhomogeneous q-commutation operators are out of scope.
    NonGradedQ,
}

impl std::fmt::Display for FactorError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FactorError::ZeroOrUnit => write!(f, "input is zero or a scalar"),
            FactorError::NonGradedQ => {
                write!(f, "q-commutation operators must be homogeneous to be factored")
            }
        }
    }
}

impl std::error::Error for FactorError {}

type Memo = HashMap<(String, bool), FactorOutcome>;

/// Factors a Weyl-algebra operator (or a homogeneous q-commutation operator)
/// into monic irreducible factors: all factorizations when `all` is set, the
/// first one found otherwise.
pub fn factor(h: &OrePoly, all: bool, rng: &mut DetRng) -> Result<FactorOutcome, FactorError> {
    assert_ne!(
        h.algebra().kind,
        AlgebraKind::Shift,
        "shift operators go through factor_shift"
    );
    if h.constant_value().is_some() {
        return Err(FactorError::ZeroOrUnit);
    }
    if h.algebra().kind == AlgebraKind::QWeyl && !is_graded(h) {
        return Err(FactorError::NonGradedQ);
    }
    let mut memo: Memo = HashMap::new();
    Ok(factor_rec(h, all, rng, &mut memo))
}

fn apply_unit(out: &FactorOutcome, lc: &Rational) -> FactorOutcome {
    if lc.is_one() {
        return out.clone();
    }
    FactorOutcome {
        factorizations: out
            .factorizations
            .iter()
            .map(|f| Factorization::new(&f.algebra, f.unit.clone() * lc.clone(), f.factors.clone()))
            .collect(),
        dropped_branches: out.dropped_branches,
    }
}

fn factor_rec(h: &OrePoly, all: bool, rng: &mut DetRng, memo: &mut Memo) -> FactorOutcome {
    let (lc, hm) = h.make_monic();
    let key = (format!("{}", hm), all);
    if let Some(hit) = memo.get(&key) {
        return apply_unit(hit, &lc);
    }
    let out = factor_monic(&hm, all, rng, memo);
    memo.insert(key, out.clone());
    apply_unit(&out, &lc)
}

/// Divides `h` on the left by the graded operator `(g, z_g)` level by level;
/// `None` when some level's Euler division is inexact.
fn left_graded_divide(
    alg: &AlgebraSpec,
    levels: &[(DegreeVector, CommPoly)],
    z_g: &DegreeVector,
    g: &CommPoly,
) -> Option<(OrePoly, OrePoly)> {
    let mut q = OrePoly::zero(alg);
    for (z, v) in levels {
        let beta = sub_dv(z, z_g);
        let gm = gamma(alg, z_g, &beta);
        let t = v.exact_div(g)?.exact_div(&gm)?;
        let qb = theta_shift(&t, &neg_dv(z_g), alg);
        q = q.add(&from_theta_form(&ThetaForm {
            algebra: alg.clone(),
            z: beta,
            theta: qb,
        }));
    }
    let gop = from_theta_form(&ThetaForm { algebra: alg.clone(), z: z_g.clone(), theta: g.clone() });
    Some((gop, q))
}

/// Divides `h` on the right by the graded operator `(g, z_g)` level by level.
fn right_graded_divide(
    alg: &AlgebraSpec,
    levels: &[(DegreeVector, CommPoly)],
    z_g: &DegreeVector,
    g: &CommPoly,
) -> Option<(OrePoly, OrePoly)> {
    let mut p = OrePoly::zero(alg);
    for (z, v) in levels {
        let alpha = sub_dv(z, z_g);
        let den = theta_shift(g, &alpha, alg).mul(&gamma(alg, &alpha, z_g));
        let pa = v.exact_div(&den)?;
        p = p.add(&from_theta_form(&ThetaForm {
            algebra: alg.clone(),
            z: alpha,
            theta: pa,
        }));
    }
    let gop = from_theta_form(&ThetaForm { algebra: alg.clone(), z: z_g.clone(), theta: g.clone() });
    Some((p, gop))
}

fn factor_monic(hm: &OrePoly, all: bool, rng: &mut DetRng, memo: &mut Memo) -> FactorOutcome {
    let trace = std::env::var_os("OPFACTOR_TRACE").is_some();
    let t_entry = std::time::Instant::now();
    let alg = hm.algebra().clone();
    if is_graded(hm) {
        let factorizations = factor_graded(hm, rng, all);
        return FactorOutcome { factorizations, dropped_branches: 0 };
    }
    if trace {
        eprintln!("factor_monic enter: {hm}");
    }
    debug_assert_eq!(alg.kind, AlgebraKind::Weyl);
    let levels = theta_levels(hm);
    let bb = degree_box(hm);
    let (z_top, v_top) = levels.first().expect("nonzero input").clone();
    let (z_bot, v_bot) = levels.last().expect("nonzero input").clone();
    let top_splits = two_block_splits(&alg, &bb, &z_top, &v_top, rng);
    let bot_splits = two_block_splits(&alg, &bb, &z_bot, &v_bot, rng);

    let mut pairs: Vec<(OrePoly, OrePoly)> = Vec::new();
    let mut pair_seen: BTreeSet<(String, String)> = BTreeSet::new();
    let mut dropped = 0u64;
    let enough = |pairs: &Vec<(OrePoly, OrePoly)>| !all && !pairs.is_empty();

    // Left factor graded: one part `(z_left, left)` dividing every level.
    for s in &top_splits {
        if enough(&pairs) {
            break;
        }
        if s.left.is_one() && is_zero_dv(&s.z_left) {
            continue;
        }
        if let Some((g, q)) = left_graded_divide(&alg, &levels, &s.z_left, &s.left) {
            if q.constant_value().is_none() {
                let key = (format!("{}", g), format!("{}", q));
                if pair_seen.insert(key) {
                    pairs.push((g, q));
                }
            }
        }
    }

    // Right factor graded.
    let mut right_seen: BTreeSet<(DegreeVector, String)> = BTreeSet::new();
    for s in &top_splits {
        if enough(&pairs) {
            break;
        }
        if s.right.is_one() && is_zero_dv(&s.z_right) {
            continue;
        }
        if !right_seen.insert((s.z_right.clone(), format!("{}", s.right))) {
            continue;
        }
        if let Some((p, g)) = right_graded_divide(&alg, &levels, &s.z_right, &s.right) {
            if p.constant_value().is_none() {
                let key = (format!("{}", p), format!("{}", g));
                if pair_seen.insert(key) {
                    pairs.push((p, g));
                }
            }
        }
    }

    // Both factors inhomogeneous: candidate extreme pairs, then a coefficient
    // system per candidate.
    let mut cands: Vec<(Vec<DegreeVector>, Vec<DegreeVector>, &TwoBlockSplit, &TwoBlockSplit)> =
        Vec::new();
    if !enough(&pairs) {
        for ts in &top_splits {
            for bs in &bot_splits {
                if lex_compare(&ts.z_left, &bs.z_left) != Ordering::Greater {
                    continue;
                }
                if lex_compare(&ts.z_right, &bs.z_right) != Ordering::Greater {
                    continue;
                }
                let Some((eta, mu)) =
                    degree_window(hm, &ts.z_left, &bs.z_left, &ts.z_right, &bs.z_right)
                else {
                    continue;
                };
                let sums: BTreeSet<DegreeVector> = eta
                    .iter()
                    .flat_map(|e| mu.iter().map(move |m| add_dv(e, m)))
                    .collect();
                if levels.iter().any(|(z, _)| !sums.contains(z)) {
                    continue;
                }
                cands.push((eta, mu, ts, bs));
            }
        }
        cands.sort_by_key(|(eta, mu, ts, bs)| {
            (
                eta.len() + mu.len(),
                format!("{:?}|{}|{:?}|{}", ts.z_left, ts.left, bs.z_left, bs.left),
            )
        });
    }
    for (eta, mu, ts, bs) in cands {
        if enough(&pairs) {
            break;
        }
        let inst = AnsatzInstance {
            algebra: alg.clone(),
            h_levels: levels.clone(),
            eta,
            mu,
            p_top: ts.left.clone(),
            q_top: ts.right.scalar_mul(&ts.scalar),
            p_bot: ExtremeValue::Scaled(bs.left.clone()),
            q_bot: ExtremeValue::Scaled(bs.right.clone()),
            c_bot: bs.scalar.clone(),
            bounds: bb.theta.clone(),
        };
        let t_cand = std::time::Instant::now();
        let built = build_system(&inst);
        let (points, d) = solve_built(&built, rng);
        if trace && t_cand.elapsed().as_millis() > 300 {
            eprintln!(
                "  slow candidate: k={} l={} vars={} box={} ext={} pts={} in {:.2?}",
                inst.eta.len(),
                inst.mu.len(),
                built.vars.len(),
                built.stats.box_generators,
                built.stats.extended_generators,
                points.len(),
                t_cand.elapsed()
            );
        }
        dropped += d;
        for pt in &points {
            if let Some((p, q)) = reconstruct_pair(&inst, &built, pt) {
                if p.multiply(&q) == *hm {
                    let key = (format!("{}", p), format!("{}", q));
                    if pair_seen.insert(key) {
                        pairs.push((p, q));
                    }
                }
            }
        }
    }

    // Recurse on both sides of every split.
    let mut found: Vec<Factorization> = Vec::new();
    let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
    'pairs: for (p, q) in pairs {
        debug_assert!(p.multiply(&q) == *hm, "candidate pair must reproduce the input");
        let (wp, wq, wh) = (p.degree_weight(), q.degree_weight(), hm.degree_weight());
        if wp == 0 || wq == 0 {
            continue;
        }
        debug_assert!(wp < wh && wq < wh, "splits must strictly reduce the degree weight");
        let sub_p = factor_rec(&p, all, rng, memo);
        let sub_q = factor_rec(&q, all, rng, memo);
        dropped += sub_p.dropped_branches + sub_q.dropped_branches;
        for fp in &sub_p.factorizations {
            for fq in &sub_q.factorizations {
                let mut factors = fp.factors.clone();
                factors.extend(fq.factors.iter().cloned());
                let unit = fp.unit.clone() * fq.unit.clone();
                let key: Vec<String> = factors.iter().map(|f| format!("{}", f)).collect();
                if seen.insert(key) {
                    found.push(Factorization::new(&alg, unit, factors));
                }
                if !all {
                    break 'pairs;
                }
            }
        }
    }
    if found.is_empty() {
        found.push(Factorization::new(&alg, Rational::one(), vec![hm.clone()]));
    }
    found.sort_by(|a, b| {
        let ka: Vec<String> = a.factors.iter().map(|f| format!("{}", f)).collect();
        let kb: Vec<String> = b.factors.iter().map(|f| format!("{}", f)).collect();
        (a.factors.len(), ka).cmp(&(b.factors.len(), kb))
    });
    if trace {
        eprintln!("factor_monic exit ({:.2?}): {hm}", t_entry.elapsed());
    }
    FactorOutcome { factorizations: found, dropped_branches: dropped }
}

// ---------------------------------------------------------------------------
// Shift algebra via the canonical embedding
// ---------------------------------------------------------------------------

/// Regroups a sequence of Weyl factors into contiguous blocks whose products
/// lie in the embedded image of the shift algebra, preferring the shortest
/// usable block at each position; needs at least two blocks.
fn group_embedded_blocks(alg: &AlgebraSpec, factors: &[OrePoly]) -> Option<Vec<OrePoly>> {
    fn go(
        alg: &AlgebraSpec,
        factors: &[OrePoly],
        pos: usize,
        acc: &mut Vec<OrePoly>,
    ) -> bool {
        if pos == factors.len() {
            return acc.len() >= 2;
        }
        let mut prod = OrePoly::one(alg);
        for end in pos..factors.len() {
            prod = prod.multiply(&factors[end]);
            if let Some(pre) = iota_preimage(&prod) {
                acc.push(pre);
                if go(alg, factors, end + 1, acc) {
                    return true;
                }
                acc.pop();
            }
        }
        false
    }
    let mut acc = Vec::new();
    if go(alg, factors, 0, &mut acc) {
        Some(acc)
    } else {
        None
    }
}

/// Factors a shift-algebra operator by embedding it into the Weyl algebra,
/// factoring there, and regrouping each result into shift-algebra factors.
pub fn factor_shift(h: &OrePoly, all: bool, rng: &mut DetRng) -> Result<FactorOutcome, FactorError> {
    assert_eq!(h.algebra().kind, AlgebraKind::Shift, "factor_shift expects a shift operator");
    if h.constant_value().is_some() {
        return Err(FactorError::ZeroOrUnit);
    }
    let sh_alg = h.algebra().clone();
    let (lc, hmn) = h.make_monic();
    let hw = iota_embed(&hmn);
    let walg = hw.algebra().clone();
    let inner = factor(&hw, all, rng)?;
    let mut out: Vec<Factorization> = Vec::new();
    let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
    for f in &inner.factorizations {
        if f.factors.len() < 2 {
            continue;
        }
        if let Some(blocks) = group_embedded_blocks(&walg, &f.factors) {
            let mut unit = f.unit.clone() * lc.clone();
            let mut factors = Vec::with_capacity(blocks.len());
            for b in blocks {
                let (c, bm) = b.make_monic();
                unit *= c;
                factors.push(bm);
            }
            let key: Vec<String> = factors.iter().map(|x| format!("{}", x)).collect();
            if seen.insert(key) {
                out.push(Factorization::new(&sh_alg, unit, factors));
            }
        }
    }
    if out.is_empty() {
        out.push(Factorization::new(&sh_alg, lc, vec![hmn]));
    }
    out.sort_by(|a, b| {
        let ka: Vec<String> = a.factors.iter().map(|f| format!("{}", f)).collect();
        let kb: Vec<String> = b.factors.iter().map(|f| format!("{}", f)).collect();
        (a.factors.len(), ka).cmp(&(b.factors.len(), kb))
    });
    Ok(FactorOutcome { factorizations: out, dropped_branches: inner.dropped_branches })
}

// ---------------------------------------------------------------------------
// Monomial premultipliers
// ---------------------------------------------------------------------------

/// All monic `x`-monomials of total degree up to `max_degree`, ascending by
/// (total degree, exponents); starts with `1`.
fn x_monomials_up_to(n: usize, max_degree: u32) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = Vec::new();
    let mut cur = vec![0u32; n];
    loop {
        if cur.iter().sum::<u32>() <= max_degree {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort_by_key(|m| (m.iter().sum::<u32>(), m.clone()));
                return out;
            }
            if cur[i] < max_degree {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// True when some proper prefix of `factors` multiplies to `s` (all monic).
fn has_premultiplier_prefix(factors: &[OrePoly], s: &OrePoly) -> bool {
    let mut prod = OrePoly::one(s.algebra());
    for f in &factors[..factors.len() - 1] {
        prod = prod.multiply(f);
        if prod == *s {
            return true;
        }
    }
    false
}

/// Searches for factorizations of `s * h` over monic `x`-monomial
/// premultipliers `s` of total degree at most `max_degree` (including
/// `s = 1`).  Results that merely split `s` off again are filtered out.
pub fn factor_with_premultiplier(
    h: &OrePoly,
    max_degree: u32,
    all: bool,
    rng: &mut DetRng,
) -> Result<(Vec<(OrePoly, Factorization)>, u64), FactorError> {
    assert_eq!(h.algebra().kind, AlgebraKind::Weyl, "premultipliers are a Weyl-algebra device");
    if h.constant_value().is_some() {
        return Err(FactorError::ZeroOrUnit);
    }
    let alg = h.algebra().clone();
    let n = alg.n;
    let mut out: Vec<(OrePoly, Factorization)> = Vec::new();
    let mut dropped = 0u64;
    for a_vec in x_monomials_up_to(n, max_degree) {
        let s = OrePoly::monomial_ab(&alg, &a_vec, &vec![0; n], Rational::one());
        let sh = s.multiply(h);
        let res = factor(&sh, all, rng)?;
        dropped += res.dropped_branches;
        let s_trivial = a_vec.iter().all(|&e| e == 0);
        for f in &res.factorizations {
            if f.factors.len() < 2 {
                continue;
            }
            if !s_trivial && has_premultiplier_prefix(&f.factors, &s) {
                continue;
            }
            out.push((s.clone(), f.clone()));
        }
    }
    Ok((out, dropped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::expr::parse;
    use crate::groebner::buchberger;

    fn weyl(n: usize) -> AlgebraSpec {
        AlgebraSpec::weyl(n)
    }

    fn op(s: &str, alg: &AlgebraSpec) -> OrePoly {
        parse(s, alg).expect("test expression parses")
    }

    #[test]
    fn window_for_mixed_degree_example() {
        let alg = weyl(2);
        let h = op("x2*d1*d2+d1+x1*x2*d1^2+4*d2+4*x1*d1", &alg);
        let (eta, mu) = degree_window(&h, &vec![0, 1], &vec![0, 0], &vec![1, -1], &vec![0, 0])
            .expect("consistent extremes");
        assert_eq!(eta, vec![vec![0, 1], vec![0, 0]]);
        assert_eq!(mu, vec![vec![1, -1], vec![0, 1], vec![0, 0]]);
    }

    #[test]
    fn top_split_includes_cross_degree_pair() {
        let alg = weyl(2);
        let h = op("x2*d1*d2+d1+x1*x2*d1^2+4*d2+4*x1*d1", &alg);
        let bb = degree_box(&h);
        let levels = theta_levels(&h);
        let (z_top, v_top) = &levels[0];
        assert_eq!(*z_top, vec![1, 0]);
        let splits = two_block_splits(&alg, &bb, z_top, v_top, &mut DetRng::new(1));
        // The top level t2+1 splits as (1 at [0,1]) * (1 at [1,-1]) because
        // gamma([0,1],[1,-1]) = t2+1 accounts for the whole polynomial.
        assert!(splits.iter().any(|s| {
            s.z_left == vec![0, 1]
                && s.left.is_one()
                && s.z_right == vec![1, -1]
                && s.right.is_one()
                && s.scalar == rat(1)
        }));
        for s in &splits {
            let recon = s
                .left
                .mul(&theta_shift(&s.right, &s.z_left, &alg))
                .mul(&gamma(&alg, &s.z_left, &s.z_right))
                .scalar_mul(&s.scalar);
            assert_eq!(recon, *v_top);
        }
    }

    #[test]
    fn known_extremes_system_pins_unique_middle() {
        let alg = weyl(2);
        let p = op("x1*d1*d2+x1*x2*d1*d2+3*x2*d2+x2", &alg);
        let q = op("x1^2*x2*d1+x1^2*d1*d2+2*x1*x2+5*x1*d2+x1", &alg);
        let h = p.multiply(&q);
        assert_eq!(theta_degree_bound(&h, 0), 2);
        assert_eq!(theta_degree_bound(&h, 1), 2);
        assert_eq!(coefficient_count(&h), 9);
        let tv = theta_vars(2);
        let t1 = CommPoly::var(&tv, 0);
        let t2 = CommPoly::var(&tv, 1);
        let inst = AnsatzInstance {
            algebra: alg.clone(),
            h_levels: theta_levels(&h),
            eta: vec![vec![0, 1], vec![0, 0], vec![0, -1]],
            mu: vec![vec![-1, 1], vec![-1, 0], vec![-1, -1]],
            p_top: t1.clone(),
            q_top: t1.add(&CommPoly::constant(&tv, rat(4))),
            p_bot: ExtremeValue::Known(CommPoly::one(&tv)),
            q_bot: ExtremeValue::Known(t1.add(&CommPoly::constant(&tv, rat(1)))),
            c_bot: rat(1),
            bounds: vec![2, 2],
        };
        let built = build_system(&inst);
        assert_eq!(built.stats.nu, 9);
        assert_eq!(built.stats.level_blocks, 4);
        assert_eq!(built.stats.unknown_summands, 2);
        assert_eq!(built.stats.prefix_counts[0], 0);
        assert_eq!(built.box_gens.len(), 36);
        assert_eq!(built.vars.len(), 9);
        let gb = buchberger(&built.box_gens);
        // Ideal of the single point (1, 0, .., 0): basis sorted ascending by
        // leading monomial, so the last variable's generator comes first.
        let mut expected: Vec<CommPoly> = Vec::new();
        for i in (1..9).rev() {
            expected.push(CommPoly::var(&built.vars, i));
        }
        expected.push(CommPoly::var(&built.vars, 0).sub(&CommPoly::one(&built.vars)));
        assert_eq!(gb, expected);
        let (points, dropped) = solve_built(&built, &mut DetRng::new(5));
        assert_eq!(dropped, 0);
        assert_eq!(points.len(), 1);
        let mut want = vec![rat(1)];
        want.extend(std::iter::repeat(rat(0)).take(8));
        assert_eq!(points[0], want);
        let (p_parts, q_parts) = reconstruct_parts(&inst, &built, &points[0]).unwrap();
        // Left middle part: (t1 + 3) t2.
        let mid = p_parts.iter().find(|(z, _)| *z == vec![0, 0]).unwrap();
        assert_eq!(mid.1, t1.add(&CommPoly::constant(&tv, rat(3))).mul(&t2));
        // Right middle part: the constant 1.
        let qmid = q_parts.iter().find(|(z, _)| *z == vec![-1, 0]).unwrap();
        assert!(qmid.1.is_one());
        let (pp, qq) = reconstruct_pair(&inst, &built, &points[0]).unwrap();
        assert_eq!(pp, p);
        assert_eq!(qq, q);
        assert_eq!(pp.multiply(&qq), h);
    }

    #[test]
    fn square_of_linear_splits_once() {
        let alg = weyl(1);
        let h = op("d1^2+2*d1+1", &alg);
        let out = factor(&h, true, &mut DetRng::new(3)).unwrap();
        assert_eq!(out.factorizations.len(), 1);
        let f = &out.factorizations[0];
        assert!(f.unit.is_one());
        let lin = op("d1+1", &alg);
        assert_eq!(f.factors, vec![lin.clone(), lin]);
        assert!(f.verifies(&h));
    }

    #[test]
    fn constructed_product_is_recovered() {
        let alg = weyl(1);
        let p = op("d1+x1", &alg);
        let q = op("d1+1", &alg);
        let h = p.multiply(&q);
        let out = factor(&h, true, &mut DetRng::new(4)).unwrap();
        assert!(out
            .factorizations
            .iter()
            .any(|f| f.factors == vec![p.clone(), q.clone()] && f.unit.is_one()));
        for f in &out.factorizations {
            assert!(f.verifies(&h));
        }
    }

    #[test]
    fn linear_mixed_operator_is_irreducible() {
        let alg = weyl(1);
        let h = op("d1+x1+1", &alg);
        let out = factor(&h, true, &mut DetRng::new(5)).unwrap();
        assert_eq!(out.factorizations.len(), 1);
        assert_eq!(out.factorizations[0].factors, vec![h.clone()]);
    }

    #[test]
    fn one_mode_returns_single_result() {
        let alg = weyl(1);
        let p = op("d1+x1", &alg);
        let q = op("d1+1", &alg);
        let h = p.multiply(&q);
        let out = factor(&h, false, &mut DetRng::new(6)).unwrap();
        assert_eq!(out.factorizations.len(), 1);
        assert!(out.factorizations[0].verifies(&h));
        assert!(out.factorizations[0].factors.len() >= 2);
    }

    #[test]
    fn shift_product_roundtrip() {
        let alg = AlgebraSpec::shift(1);
        let a = op("s1+1", &alg);
        let b = op("s1+x1", &alg);
        let h = a.multiply(&b);
        let out = factor_shift(&h, true, &mut DetRng::new(7)).unwrap();
        assert!(!out.factorizations.is_empty());
        for f in &out.factorizations {
            assert_eq!(f.algebra.kind, AlgebraKind::Shift);
            assert!(f.verifies(&h), "shift factorization must multiply back");
            assert!(f.factors.len() >= 2);
        }
        assert!(out
            .factorizations
            .iter()
            .any(|f| f.factors == vec![a.clone(), b.clone()]));
    }

    #[test]
    fn premultiplier_includes_identity_cofactor() {
        let alg = weyl(1);
        let h = op("d1^2", &alg);
        let (pairs, _) = factor_with_premultiplier(&h, 1, true, &mut DetRng::new(8)).unwrap();
        let one_s = OrePoly::one(&alg);
        let d = op("d1", &alg);
        assert!(pairs
            .iter()
            .any(|(s, f)| *s == one_s && f.factors == vec![d.clone(), d.clone()]));
        // x1 * d1^2 splits as d1 * (x1 d1 - 1) among others; splits that just
        // peel x1 back off are not reported for s = x1.
        for (s, f) in &pairs {
            if *s != one_s {
                assert!(!has_premultiplier_prefix(&f.factors, s));
            }
        }
    }
}
