//! End-to-end acceptance checks, one test per criterion, each printing a
//! single PASS/FAIL line (visible with `--nocapture`).  Wall-time budgets
//! are asserted where a criterion carries one.

use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use opfactor_core::ansatz::{
    build_system, degree_window, factor, factor_shift, factor_with_premultiplier,
    reconstruct_parts, solve_built, theta_degree_bound, theta_levels, AnsatzInstance,
    ExtremeValue,
};
use opfactor_core::arith::{rat, ratq, theta_vars, CommPoly};
use opfactor_core::expr::parse;
use opfactor_core::gradedfact::factor_graded;
use opfactor_core::grading::{from_theta_form, to_theta_form, ThetaForm};
use opfactor_core::groebner::buchberger;
use opfactor_core::ore::{iota_embed, iota_preimage, AlgebraSpec, OrePoly};
use opfactor_core::util::DetRng;

/// Runs one criterion body, prints its PASS/FAIL line, and enforces an
/// optional wall-time budget.
fn criterion<F: FnOnce() + UnwindSafe>(label: &str, budget: Option<Duration>, body: F) {
    let start = Instant::now();
    match catch_unwind(body) {
        Ok(()) => {
            let elapsed = start.elapsed();
            println!("acceptance {label}: PASS ({elapsed:.2?})");
            if let Some(b) = budget {
                assert!(elapsed < b, "{label} exceeded its {b:?} budget (took {elapsed:.2?})");
            }
        }
        Err(e) => {
            println!("acceptance {label}: FAIL");
            resume_unwind(e);
        }
    }
}

fn op(s: &str, alg: &AlgebraSpec) -> OrePoly {
    parse(s, alg).expect("test expression parses")
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

#[test]
fn criterion_01_two_factorizations_of_composed_cubic() {
    criterion(
        "criterion 1 (two complete factorizations, one with the combined left factor)",
        Some(Duration::from_secs(60)),
        || {
            let alg = AlgebraSpec::weyl(2);
            let h = op("(d1+1)^2*(d1+x1*d2)", &alg);
            let out = factor(&h, true, &mut DetRng::new(0)).unwrap();
            assert_eq!(out.factorizations.len(), 2, "expected exactly two factorizations");
            for f in &out.factorizations {
                assert!(f.verifies(&h));
            }
            let left = op("x1*d1*d2+x1*d2+d1^2+d1+2*d2", &alg);
            let right = op("d1+1", &alg);
            assert!(
                out.factorizations
                    .iter()
                    .any(|f| f.unit == rat(1) && f.factors == vec![left.clone(), right.clone()]),
                "the combined-left-factor factorization is missing"
            );
        },
    );
}

#[test]
fn criterion_02_three_factorizations_of_inhomogeneous_product() {
    criterion(
        "criterion 2 (three factorizations of the non-graded product)",
        Some(Duration::from_secs(600)),
        || {
            let alg = AlgebraSpec::weyl(2);
            let p = op("x1*d1*d2+x1*x2*d1*d2+3*x2*d2+x2", &alg);
            let q = op("x1^2*x2*d1+x1^2*d1*d2+2*x1*x2+5*x1*d2+x1", &alg);
            let h = p.multiply(&q);
            let out = factor(&h, true, &mut DetRng::new(0)).unwrap();
            for f in &out.factorizations {
                assert!(f.verifies(&h));
            }
            assert!(
                out.factorizations
                    .iter()
                    .any(|f| f.unit == rat(1) && f.factors == vec![p.clone(), q.clone()]),
                "the defining two-factor split is missing"
            );
            assert_eq!(out.factorizations.len(), 3, "expected exactly three factorizations");
        },
    );
}

#[test]
fn criterion_03_sixty_graded_factorizations_each() {
    criterion(
        "criterion 3 (graded operators admit exactly 60 factorizations each)",
        Some(Duration::from_secs(60)),
        || {
            let a3 = AlgebraSpec::weyl(3);
            let h3 = op("x1*x2^2*x3^3*d1*d2^2+x2*x3^3*d2", &a3);
            let t = Instant::now();
            let f3 = factor_graded(&h3, &mut DetRng::new(0), true);
            assert!(t.elapsed() < Duration::from_secs(30));
            assert_eq!(f3.len(), 60);
            for f in &f3 {
                assert!(f.verifies(&h3));
            }

            let a2 = AlgebraSpec::weyl(2);
            let h4 = op("(x1^2*d1+x1*x2*d2)*(d1*d2+d1^2*d2^2*x1*x2)", &a2);
            let t = Instant::now();
            let f4 = factor_graded(&h4, &mut DetRng::new(0), true);
            assert!(t.elapsed() < Duration::from_secs(30));
            assert_eq!(f4.len(), 60);
            for f in &f4 {
                assert!(f.verifies(&h4));
            }
        },
    );
}

#[test]
fn criterion_04_twelve_factorizations_in_one_variable() {
    criterion(
        "criterion 4 (univariate operator admits exactly 12 factorizations)",
        Some(Duration::from_secs(60)),
        || {
            let alg = AlgebraSpec::weyl(1);
            let h = op("(x1^4-1)*x1*d1^2+(1+7*x1^4)*d1+8*x1^3", &alg);
            let out = factor(&h, true, &mut DetRng::new(0)).unwrap();
            for f in &out.factorizations {
                assert!(f.verifies(&h));
            }
            // The twelve interleavings of a bare derivation, a linear Euler
            // factor, and the three coprime factors of x1^4 - 1 must all be
            // present.
            let d1 = op("d1", &alg);
            let e2 = op("x1*d1-2", &alg);
            let e1 = op("x1*d1-1", &alg);
            let tail = [op("x1+1", &alg), op("x1-1", &alg), op("x1^2+1", &alg)];
            let perms: [[usize; 3]; 6] =
                [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            for perm in perms {
                for head in [vec![d1.clone(), e2.clone()], vec![e1.clone(), d1.clone()]] {
                    let mut want = head;
                    want.extend(perm.iter().map(|&i| tail[i].clone()));
                    assert!(
                        out.factorizations.iter().any(|f| f.unit == rat(1) && f.factors == want),
                        "missing interleaving"
                    );
                }
            }
            assert_eq!(out.factorizations.len(), 12, "expected exactly 12 factorizations");
        },
    );
}

#[test]
fn criterion_05_degree_zero_euler_form_and_graded_factorizations() {
    criterion(
        "criterion 5 (degree-zero operator: Euler form, commutative split, 3 factorizations)",
        None,
        || {
            let alg = AlgebraSpec::weyl(2);
            let p = op("x1^2*x2*d1^2*d2+2*x1*x2*d1*d2+x1*d1+1", &alg);
            let tf = to_theta_form(&p).expect("degree-zero operator has an Euler form");
            assert!(tf.z.iter().all(|&z| z == 0));
            let tv = theta_vars(2);
            let t1 = CommPoly::var(&tv, 0);
            let t2 = CommPoly::var(&tv, 1);
            let one = CommPoly::one(&tv);
            // theta1*(theta1-1)*theta2 + 2*theta1*theta2 + theta1 + 1
            let expected = t1
                .mul(&t1.sub(&one))
                .mul(&t2)
                .add(&t1.mul(&t2).scalar_mul(&rat(2)))
                .add(&t1)
                .add(&one);
            assert_eq!(tf.theta, expected);
            // Commutative split of the Euler form: (theta1*theta2 + 1)(theta1 + 1).
            let factor_a = t1.mul(&t2).add(&one);
            let factor_b = t1.add(&one);
            assert_eq!(factor_a.mul(&factor_b), tf.theta);

            let fs = factor_graded(&p, &mut DetRng::new(0), true);
            for f in &fs {
                assert!(f.verifies(&p));
            }
            assert_eq!(fs.len(), 3, "expected exactly three graded factorizations");
            let d1 = op("d1", &alg);
            let x1 = op("x1", &alg);
            let tt = op("x1*x2*d1*d2+1", &alg);
            let tts = op("x1*x2*d1*d2-x2*d2+1", &alg);
            let displayed = vec![
                vec![tt.clone(), d1.clone(), x1.clone()],
                vec![d1.clone(), tts, x1.clone()],
                vec![d1, x1, tt],
            ];
            for want in &displayed {
                assert!(
                    fs.iter().any(|f| f.unit == rat(1) && f.factors == *want),
                    "missing displayed factorization"
                );
            }
        },
    );
}

#[test]
fn criterion_06_known_extremes_groebner_basis_and_middle_parts() {
    criterion(
        "criterion 6 (known-extremes system: reduced basis pins the unique middle parts)",
        None,
        || {
            let alg = AlgebraSpec::weyl(2);
            let p = op("x1*d1*d2+x1*x2*d1*d2+3*x2*d2+x2", &alg);
            let q = op("x1^2*x2*d1+x1^2*d1*d2+2*x1*x2+5*x1*d2+x1", &alg);
            let h = p.multiply(&q);
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
            let gb = buchberger(&built.box_gens);
            // Solution set {u0 = 1, u1 = .. = u8 = 0}; the basis is sorted
            // ascending by leading monomial, so the last unknown comes first.
            let mut expected: Vec<CommPoly> = Vec::new();
            for i in (1..9).rev() {
                expected.push(CommPoly::var(&built.vars, i));
            }
            expected.push(CommPoly::var(&built.vars, 0).sub(&CommPoly::one(&built.vars)));
            assert_eq!(gb, expected, "reduced basis differs");
            let (points, dropped) = solve_built(&built, &mut DetRng::new(0));
            assert_eq!(dropped, 0);
            assert_eq!(points.len(), 1);
            let (p_parts, q_parts) = reconstruct_parts(&inst, &built, &points[0]).unwrap();
            let qmid = q_parts.iter().find(|(z, _)| *z == vec![-1, 0]).unwrap();
            assert!(qmid.1.is_one(), "right middle part must be the constant 1");
            let pmid = p_parts.iter().find(|(z, _)| *z == vec![0, 0]).unwrap();
            let want = t1.add(&CommPoly::constant(&tv, rat(3))).mul(&t2);
            assert_eq!(pmid.1, want, "left middle part must be (theta1+3)*theta2");
        },
    );
}

#[test]
fn criterion_07_degree_window_of_mixed_operator() {
    criterion(
        "criterion 7 (degree window: two left parts, three right parts, interior [0,1])",
        None,
        || {
            let alg = AlgebraSpec::weyl(2);
            let h = op("x2*d1*d2+d1+x1*x2*d1^2+4*d2+4*x1*d1", &alg);
            let (eta, mu) =
                degree_window(&h, &vec![0, 1], &vec![0, 0], &vec![1, -1], &vec![0, 0]).expect("window exists");
            assert_eq!(eta, vec![vec![0, 1], vec![0, 0]]);
            assert_eq!(mu, vec![vec![1, -1], vec![0, 1], vec![0, 0]]);
        },
    );
}

#[test]
fn criterion_08_premultiplier_enables_factorization() {
    criterion(
        "criterion 8 (irreducible cubic factors after a monomial premultiplier)",
        Some(Duration::from_secs(120)),
        || {
            let alg = AlgebraSpec::weyl(1);
            let h = op("d1^3-x1*d1-2", &alg);
            let out = factor(&h, true, &mut DetRng::new(0)).unwrap();
            assert_eq!(out.factorizations.len(), 1);
            assert_eq!(out.factorizations[0].factors.len(), 1, "operator must be irreducible");

            let (list, _) = factor_with_premultiplier(&h, 1, true, &mut DetRng::new(0)).unwrap();
            let s = op("x1", &alg);
            let f1 = op("d1", &alg);
            let f2 = op("x1*d1^2-x1^2-d1", &alg);
            assert!(
                list.iter().any(|(pre, f)| *pre == s
                    && f.unit == rat(1)
                    && f.factors == vec![f1.clone(), f2.clone()]),
                "premultiplier x1 must enable the displayed factorization"
            );
            for (pre, f) in &list {
                assert!(f.verifies(&pre.multiply(&h)));
            }
        },
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: randomized property suites, 1000 cases each.
// ---------------------------------------------------------------------------

/// Random operator with bounded exponents, term count, and coefficient size.
fn op_strategy(alg: AlgebraSpec, max_exp: u32, max_terms: usize) -> BoxedStrategy<OrePoly> {
    let n2 = 2 * alg.n;
    prop::collection::vec(
        (prop::collection::vec(0..=max_exp, n2), -3i64..=3),
        1..=max_terms,
    )
    .prop_map(move |terms| {
        let terms = terms
            .into_iter()
            .map(|(mono, c)| (mono, rat(c)))
            .collect::<Vec<_>>();
        OrePoly::from_terms(&alg, terms)
    })
    .boxed()
}

/// Random nonzero commutative polynomial in the Euler variables.
fn theta_poly_strategy(n: usize, max_deg: u32, max_terms: usize) -> BoxedStrategy<CommPoly> {
    let vars = theta_vars(n);
    prop::collection::vec(
        (prop::collection::vec(0..=max_deg, n), -3i64..=3),
        1..=max_terms,
    )
    .prop_filter_map("nonzero", move |terms| {
        let mut acc = CommPoly::zero(&vars);
        for (mono, c) in terms {
            acc = acc.add(&CommPoly::from_terms(&vars, vec![(mono, rat(c))]));
        }
        if acc.is_zero() {
            None
        } else {
            Some(acc)
        }
    })
    .boxed()
}

#[test]
fn criterion_09a_multiply_associativity_distributivity() {
    criterion("criterion 9.1 (product associativity and distributivity)", None, || {
        let mut r = runner(1000);
        let weyl2 = AlgebraSpec::weyl(2);
        let qw = AlgebraSpec::qweyl(2, vec![rat(2), ratq(1, 3)]);
        let strat = (
            op_strategy(weyl2.clone(), 2, 3),
            op_strategy(weyl2.clone(), 2, 3),
            op_strategy(weyl2, 2, 3),
            op_strategy(qw.clone(), 2, 2),
            op_strategy(qw.clone(), 2, 2),
            op_strategy(qw, 2, 2),
        );
        r.run(&strat, |(a, b, c, qa, qb, qc)| {
            prop_assert_eq!(a.multiply(&b).multiply(&c), a.multiply(&b.multiply(&c)));
            prop_assert_eq!(
                a.multiply(&b.add(&c)),
                a.multiply(&b).add(&a.multiply(&c))
            );
            prop_assert_eq!(
                a.add(&b).multiply(&c),
                a.multiply(&c).add(&b.multiply(&c))
            );
            prop_assert_eq!(qa.multiply(&qb).multiply(&qc), qa.multiply(&qb.multiply(&qc)));
            prop_assert_eq!(
                qa.multiply(&qb.add(&qc)),
                qa.multiply(&qb).add(&qa.multiply(&qc))
            );
            Ok(())
        })
        .unwrap();
    });
}

#[test]
fn criterion_09b_euler_form_round_trip() {
    criterion("criterion 9.2 (Euler form round-trip on graded operators)", None, || {
        let mut r = runner(1000);
        let strat = (
            theta_poly_strategy(2, 2, 4),
            prop::collection::vec(-2i64..=2, 2),
            prop::bool::ANY,
        );
        r.run(&strat, |(tp, z, use_q)| {
            let alg = if use_q {
                AlgebraSpec::qweyl(2, vec![rat(2), rat(3)])
            } else {
                AlgebraSpec::weyl(2)
            };
            let tf = ThetaForm { algebra: alg, z: z.clone(), theta: tp.clone() };
            let p = from_theta_form(&tf);
            let back = to_theta_form(&p).expect("constructed operator is graded");
            prop_assert_eq!(back.z, z);
            prop_assert_eq!(back.theta, tp);
            Ok(())
        })
        .unwrap();
    });
}

#[test]
fn criterion_09c_shift_embedding_homomorphism() {
    criterion("criterion 9.3 (shift embedding is a ring homomorphism)", None, || {
        let mut r = runner(1000);
        let shift2 = AlgebraSpec::shift(2);
        let strat = (op_strategy(shift2.clone(), 2, 3), op_strategy(shift2, 2, 3));
        r.run(&strat, |(a, b)| {
            let ea = iota_embed(&a);
            let eb = iota_embed(&b);
            prop_assert_eq!(iota_embed(&a.multiply(&b)), ea.multiply(&eb));
            prop_assert_eq!(iota_embed(&a.add(&b)), ea.add(&eb));
            prop_assert_eq!(iota_preimage(&ea), Some(a));
            Ok(())
        })
        .unwrap();
    });
}

#[test]
fn criterion_09d_factorization_soundness() {
    criterion("criterion 9.4 (every emitted factorization verifies by multiplication)", None, || {
        let mut r = runner(1000);
        let weyl1 = AlgebraSpec::weyl(1);
        let shift1 = AlgebraSpec::shift(1);
        let strat = (
            op_strategy(weyl1, 2, 3),
            op_strategy(shift1, 2, 3),
            prop::num::u64::ANY,
        );
        r.run(&strat, |(w, s, seed)| {
            let mut rng = DetRng::new(seed);
            if let Ok(out) = factor(&w, true, &mut rng) {
                prop_assert!(!out.factorizations.is_empty());
                for f in &out.factorizations {
                    prop_assert!(f.verifies(&w));
                }
            }
            if let Ok(out) = factor_shift(&s, true, &mut rng) {
                prop_assert!(!out.factorizations.is_empty());
                for f in &out.factorizations {
                    prop_assert!(f.verifies(&s));
                }
            }
            Ok(())
        })
        .unwrap();
    });
}

#[test]
fn criterion_09e_system_size_band() {
    criterion("criterion 9.5 (built system size lies in the stated band)", None, || {
        let mut r = runner(1000);
        let strat = (
            3usize..=4,              // chain length (equal on both sides)
            0i64..=1,                // top degree of the left chain
            0i64..=1,                // top degree of the right chain
            prop::collection::vec(theta_poly_strategy(1, 2, 3), 8),
        );
        r.run(&strat, |(l, ptop, qtop, parts)| {
            let alg = AlgebraSpec::weyl(1);
            let eta: Vec<Vec<i64>> = (0..l).map(|i| vec![ptop - i as i64]).collect();
            let mu: Vec<Vec<i64>> = (0..l).map(|j| vec![qtop - j as i64]).collect();
            let p_parts = &parts[..l];
            let q_parts = &parts[4..4 + l];
            let assemble = |chain: &[Vec<i64>], vals: &[CommPoly]| {
                let mut acc = OrePoly::constant(&alg, rat(0));
                for (z, v) in chain.iter().zip(vals) {
                    let tf = ThetaForm { algebra: alg.clone(), z: z.clone(), theta: v.clone() };
                    acc = acc.add(&from_theta_form(&tf));
                }
                acc
            };
            let p = assemble(&eta, p_parts);
            let q = assemble(&mu, q_parts);
            let h = p.multiply(&q);
            if h.is_zero() {
                return Ok(());
            }
            let bounds = vec![theta_degree_bound(&h, 0)];
            let inst = AnsatzInstance {
                algebra: alg.clone(),
                h_levels: theta_levels(&h),
                eta,
                mu,
                p_top: p_parts[0].clone(),
                q_top: q_parts[0].clone(),
                p_bot: ExtremeValue::Known(p_parts[l - 1].clone()),
                q_bot: ExtremeValue::Known(q_parts[l - 1].clone()),
                c_bot: rat(1),
                bounds,
            };
            let built = build_system(&inst);
            let nu = built.stats.nu as usize;
            let lo = 2 * (l - 1) * nu;
            let hi = (l - 1) * (l - 1) * nu;
            prop_assert!(
                built.stats.box_generators >= lo && built.stats.box_generators <= hi,
                "box generator count {} outside [{}, {}]",
                built.stats.box_generators,
                lo,
                hi
            );
            Ok(())
        })
        .unwrap();
    });
}

#[test]
fn criterion_09f_recovers_constructed_splits() {
    criterion("criterion 9.6 (complete enumeration refines every constructed split)", None, || {
        let mut r = runner(1000);
        let weyl1 = AlgebraSpec::weyl(1);
        let strat = (
            op_strategy(weyl1.clone(), 2, 3),
            op_strategy(weyl1, 2, 3),
            prop::num::u64::ANY,
        );
        r.run(&strat, |(pa, qa, seed)| {
            if pa.constant_value().is_some() || qa.constant_value().is_some() {
                return Ok(());
            }
            let (_, p) = pa.make_monic();
            let (_, q) = qa.make_monic();
            let h = p.multiply(&q);
            let out = factor(&h, true, &mut DetRng::new(seed)).unwrap();
            let mut found = false;
            'outer: for f in &out.factorizations {
                if f.unit != rat(1) {
                    continue;
                }
                for cut in 1..f.factors.len() {
                    let mut left = OrePoly::one(p.algebra());
                    for g in &f.factors[..cut] {
                        left = left.multiply(g);
                    }
                    if left != p {
                        continue;
                    }
                    let mut right = OrePoly::one(p.algebra());
                    for g in &f.factors[cut..] {
                        right = right.multiply(g);
                    }
                    if right == q {
                        found = true;
                        break 'outer;
                    }
                }
            }
            prop_assert!(found, "no complete factorization refines the constructed split");
            Ok(())
        })
        .unwrap();
    });
}
