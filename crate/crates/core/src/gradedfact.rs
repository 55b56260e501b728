//! Factorization of graded (homogeneous) operators.
//!
//! A graded operator `p = ptilde(t) * x^e d^w` factors by factoring the Euler
//! polynomial `ptilde` commutatively and splitting the trailing monomial into
//! single generators.  Two Euler facts make this complete:
//!
//! * the only monic irreducibles of `K[t1..tn]` that factor further as
//!   operators are `ti -> xi * di` and `ti + 1/qi -> (1/qi) di * xi`;
//! * moving a factor past a generator only translates/rescales its Euler
//!   variables, which preserves irreducibility except exactly at those two
//!   special linear polynomials.
//!
//! A factorization is kept as a sequence of *atoms* — irreducible Euler
//! polynomials and bare generators — plus a scalar unit.  All maximal
//! factorizations are enumerated by a breadth-first closure under two moves:
//!
//! * M1: transpose two adjacent atoms (commuting swap, or transposition with
//!   the appropriate Euler substitution; if the moved polynomial lands on a
//!   reducible linear one it is expanded in place);
//! * M2: merge an adjacent generator pair `xi, di` (or `di, xi`) into its
//!   Euler polynomial, transpose that past the left or right neighbour, and
//!   re-expand if it is still reducible.
//!
//! The state space is finite (shifts are bounded by the number of generator
//! atoms), so the closure terminates; outputs are deduplicated by the printed
//! atom sequence and returned in a canonical order.

use crate::arith::{CommPoly, MonomialOrder, Rational};
use crate::commfact;
use crate::grading::{
    e_of, from_theta_form, theta_rewrite_reducibles, theta_shift, to_theta_form, w_of, DegreeVector,
    ThetaForm,
};
use crate::ore::{AlgebraSpec, Factorization, OpVar, OrePoly};
use crate::util::DetRng;
use num_traits::One;
use std::collections::{BTreeSet, VecDeque};

/// One factor in a graded factorization sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GradedAtom {
    /// A monic irreducible Euler polynomial that is not operator-reducible.
    Theta(CommPoly),
    /// A bare generator.
    Gen(OpVar),
}

impl GradedAtom {
    /// The atom as an operator.
    pub fn to_operator(&self, algebra: &AlgebraSpec) -> OrePoly {
        match self {
            GradedAtom::Theta(f) => from_theta_form(&ThetaForm {
                algebra: algebra.clone(),
                z: vec![0; algebra.n],
                theta: f.clone(),
            }),
            GradedAtom::Gen(OpVar::X(i)) => OrePoly::x(algebra, *i),
            GradedAtom::Gen(OpVar::D(i)) => OrePoly::d(algebra, *i),
        }
    }

    fn key(&self) -> String {
        match self {
            GradedAtom::Theta(f) => format!("[{}]", f),
            GradedAtom::Gen(OpVar::X(i)) => format!("x{}", i + 1),
            GradedAtom::Gen(OpVar::D(i)) => format!("d{}", i + 1),
        }
    }
}

#[derive(Clone)]
struct State {
    unit: Rational,
    atoms: Vec<GradedAtom>,
}

impl State {
    fn key(&self) -> Vec<String> {
        self.atoms.iter().map(|a| a.key()).collect()
    }
}

/// Normalizes a freshly produced Euler atom: make it monic (feeding the
/// leading coefficient into the unit) and expand it if operator-reducible.
fn push_theta(algebra: &AlgebraSpec, f: CommPoly, unit: &mut Rational, out: &mut Vec<GradedAtom>) {
    if let Some(c) = f.constant_value() {
        *unit *= c;
        return;
    }
    let (lc, monic) = f.make_monic(MonomialOrder::DegLex);
    *unit *= lc;
    match theta_rewrite_reducibles(algebra, &monic) {
        Some((ops, u)) => {
            *unit *= u;
            for op in ops {
                // ops are single generators x_i / d_i.
                let gen = operator_as_gen(&op).expect("rewrite yields bare generators");
                out.push(GradedAtom::Gen(gen));
            }
        }
        None => out.push(GradedAtom::Theta(monic)),
    }
}

fn operator_as_gen(op: &OrePoly) -> Option<OpVar> {
    let n = op.n();
    if op.num_terms() != 1 {
        return None;
    }
    let (mono, c) = op.terms().next().unwrap();
    if !c.is_one() {
        return None;
    }
    let total: u32 = mono.iter().sum();
    if total != 1 {
        return None;
    }
    let idx = mono.iter().position(|&e| e == 1).unwrap();
    Some(if idx < n { OpVar::X(idx) } else { OpVar::D(idx - n) })
}

/// Degree vector contributed by one atom.
fn atom_degree(atom: &GradedAtom, n: usize) -> DegreeVector {
    match atom {
        GradedAtom::Theta(_) => vec![0; n],
        GradedAtom::Gen(OpVar::X(i)) => {
            let mut z = vec![0i64; n];
            z[*i] = -1;
            z
        }
        GradedAtom::Gen(OpVar::D(i)) => {
            let mut z = vec![0i64; n];
            z[*i] = 1;
            z
        }
    }
}

/// All neighbour states reachable by one M1 or M2 move.
fn neighbours(algebra: &AlgebraSpec, st: &State) -> Vec<State> {
    let n = algebra.n;
    let mut out = Vec::new();
    let atoms = &st.atoms;
    for j in 0..atoms.len().saturating_sub(1) {
        let a = &atoms[j];
        let b = &atoms[j + 1];
        // ---- M1: adjacent transposition ----
        match (a, b) {
            (GradedAtom::Theta(f), GradedAtom::Theta(g)) => {
                let mut s = st.clone();
                s.atoms[j] = GradedAtom::Theta(g.clone());
                s.atoms[j + 1] = GradedAtom::Theta(f.clone());
                out.push(s);
            }
            (GradedAtom::Theta(f), GradedAtom::Gen(v)) => {
                // f * gen = gen * shift(f); the polynomial moves right, so it
                // picks up the inverse conjugation: shift by -deg(gen).
                let z = atom_degree(b, n);
                let shifted = theta_shift(f, &neg(&z), algebra);
                let mut s = State { unit: st.unit.clone(), atoms: Vec::new() };
                s.atoms.extend_from_slice(&atoms[..j]);
                s.atoms.push(GradedAtom::Gen(*v));
                push_theta(algebra, shifted, &mut s.unit, &mut s.atoms);
                s.atoms.extend_from_slice(&atoms[j + 2..]);
                out.push(s);
            }
            (GradedAtom::Gen(v), GradedAtom::Theta(g)) => {
                // gen * g = shift(g) * gen; the polynomial moves left, so it
                // picks up the conjugation by the generator's own degree.
                let z = atom_degree(a, n);
                let shifted = theta_shift(g, &z, algebra);
                let mut s = State { unit: st.unit.clone(), atoms: Vec::new() };
                s.atoms.extend_from_slice(&atoms[..j]);
                push_theta(algebra, shifted, &mut s.unit, &mut s.atoms);
                s.atoms.push(GradedAtom::Gen(*v));
                s.atoms.extend_from_slice(&atoms[j + 2..]);
                out.push(s);
            }
            (GradedAtom::Gen(va), GradedAtom::Gen(vb)) => {
                let commuting = match (va, vb) {
                    (OpVar::X(i), OpVar::D(k)) | (OpVar::D(i), OpVar::X(k)) => i != k,
                    (OpVar::X(i), OpVar::X(k)) | (OpVar::D(i), OpVar::D(k)) => i != k,
                };
                if commuting {
                    let mut s = st.clone();
                    s.atoms.swap(j, j + 1);
                    out.push(s);
                }
            }
        }
        // ---- M2: merge a same-index generator pair, move, re-expand ----
        if let (GradedAtom::Gen(va), GradedAtom::Gen(vb)) = (a, b) {
            let merged: Option<(CommPoly, Rational)> = match (va, vb) {
                (OpVar::X(i), OpVar::D(k)) if i == k => {
                    // x_i d_i = t_i
                    let tv = crate::arith::theta_vars(n);
                    Some((CommPoly::var(&tv, *i), Rational::one()))
                }
                (OpVar::D(i), OpVar::X(k)) if i == k => {
                    // d_i x_i = q_i (t_i + 1/q_i)
                    let tv = crate::arith::theta_vars(n);
                    let qi = algebra.q_at(*i);
                    Some((
                        CommPoly::var(&tv, *i).add(&CommPoly::constant(&tv, qi.recip())),
                        qi.clone(),
                    ))
                }
                _ => None,
            };
            if let Some((tpoly, u)) = merged {
                // Transpose the transient polynomial past the left neighbour.
                if j > 0 {
                    let left = &atoms[j - 1];
                    let mut s = State { unit: st.unit.clone() * &u, atoms: Vec::new() };
                    s.atoms.extend_from_slice(&atoms[..j - 1]);
                    match left {
                        GradedAtom::Theta(g) => {
                            // commute: [g, T] -> [T, g]
                            push_theta(algebra, tpoly.clone(), &mut s.unit, &mut s.atoms);
                            s.atoms.push(GradedAtom::Theta(g.clone()));
                        }
                        GradedAtom::Gen(v) => {
                            // [gen, T] -> [shift(T), gen]: T moves left.
                            let z = atom_degree(left, n);
                            let shifted = theta_shift(&tpoly, &z, algebra);
                            push_theta(algebra, shifted, &mut s.unit, &mut s.atoms);
                            s.atoms.push(GradedAtom::Gen(*v));
                        }
                    }
                    s.atoms.extend_from_slice(&atoms[j + 2..]);
                    out.push(s);
                }
                // Transpose past the right neighbour.
                if j + 2 < atoms.len() {
                    let right = &atoms[j + 2];
                    let mut s = State { unit: st.unit.clone() * &u, atoms: Vec::new() };
                    s.atoms.extend_from_slice(&atoms[..j]);
                    match right {
                        GradedAtom::Theta(g) => {
                            s.atoms.push(GradedAtom::Theta(g.clone()));
                            push_theta(algebra, tpoly.clone(), &mut s.unit, &mut s.atoms);
                        }
                        GradedAtom::Gen(v) => {
                            // [T, gen] -> [gen, shift(T)]: T moves right, so
                            // the conjugation direction is reversed.
                            let z: DegreeVector = atom_degree(right, n);
                            let shifted = theta_shift(&tpoly, &neg(&z), algebra);
                            s.atoms.push(GradedAtom::Gen(*v));
                            push_theta(algebra, shifted, &mut s.unit, &mut s.atoms);
                        }
                    }
                    s.atoms.extend_from_slice(&atoms[j + 3..]);
                    out.push(s);
                }
            }
        }
    }
    out
}

fn neg(z: &DegreeVector) -> DegreeVector {
    z.iter().map(|&v| -v).collect()
}

/// Breadth-first closure of a base factorization under the moves; returns all
/// distinct maximal factorizations in canonical order.
pub fn enumerate_graded(algebra: &AlgebraSpec, base: (Rational, Vec<GradedAtom>)) -> Vec<(Rational, Vec<GradedAtom>)> {
    let start = State { unit: base.0, atoms: base.1 };
    let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut results: Vec<State> = Vec::new();
    let mut queue: VecDeque<State> = VecDeque::new();
    seen.insert(start.key());
    results.push(start.clone());
    queue.push_back(start);
    while let Some(st) = queue.pop_front() {
        for nb in neighbours(algebra, &st) {
            let k = nb.key();
            if seen.insert(k) {
                results.push(nb.clone());
                queue.push_back(nb);
            }
        }
    }
    results.sort_by(|a, b| {
        a.atoms
            .len()
            .cmp(&b.atoms.len())
            .then_with(|| a.key().cmp(&b.key()))
    });
    results.into_iter().map(|s| (s.unit, s.atoms)).collect()
}

fn atoms_to_factorization(
    algebra: &AlgebraSpec,
    unit: Rational,
    atoms: &[GradedAtom],
) -> Factorization {
    let factors: Vec<OrePoly> = atoms.iter().map(|a| a.to_operator(algebra)).collect();
    Factorization::new(algebra, unit, factors)
}

/// Base factorization (unit, atom sequence) of a graded operator.
fn base_atoms(p: &OrePoly, rng: &mut DetRng) -> (Rational, Vec<GradedAtom>) {
    let tf = to_theta_form(p).expect("input must be graded");
    let alg = p.algebra();
    let fl = commfact::factor_multivariate(&tf.theta, rng);
    let mut unit = fl.unit.clone();
    let mut atoms: Vec<GradedAtom> = Vec::new();
    for (f, m) in &fl.factors {
        for _ in 0..*m {
            push_theta(alg, f.clone(), &mut unit, &mut atoms);
        }
    }
    for (i, &e) in e_of(&tf.z).iter().enumerate() {
        for _ in 0..e {
            atoms.push(GradedAtom::Gen(OpVar::X(i)));
        }
    }
    for (i, &w) in w_of(&tf.z).iter().enumerate() {
        for _ in 0..w {
            atoms.push(GradedAtom::Gen(OpVar::D(i)));
        }
    }
    (unit, atoms)
}

/// Factors a graded operator of degree zero (an Euler polynomial).  With
/// `all`, returns every maximal factorization; otherwise just the base one.
pub fn factor_graded_zero(p: &OrePoly, rng: &mut DetRng, all: bool) -> Vec<Factorization> {
    let tf = to_theta_form(p).expect("input must be graded");
    assert!(
        tf.z.iter().all(|&zi| zi == 0),
        "input must have degree zero; use the general graded routine"
    );
    factor_graded(p, rng, all)
}

/// Factors an arbitrary graded operator into irreducible operators.  With
/// `all`, enumerates every maximal factorization (deduplicated, canonical
/// order); otherwise returns only the base factorization.
pub fn factor_graded(p: &OrePoly, rng: &mut DetRng, all: bool) -> Vec<Factorization> {
    let alg = p.algebra().clone();
    let base = base_atoms(p, rng);
    let list = if all {
        enumerate_graded(&alg, base)
    } else {
        vec![base]
    };
    let out: Vec<Factorization> = list
        .into_iter()
        .map(|(u, atoms)| atoms_to_factorization(&alg, u, &atoms))
        .collect();
    debug_assert!(out.iter().all(|f| f.verifies(p)));
    out
}
