use std::time::Instant;

use opfactor_core::ansatz::{
    build_system, degree_box, degree_window, solve_built, theta_levels, two_block_splits,
    AnsatzInstance, ExtremeValue,
};
use opfactor_core::expr::parse;
use opfactor_core::grading::lex_compare;
use opfactor_core::ore::AlgebraSpec;
use opfactor_core::util::DetRng;

fn main() {
    let alg = AlgebraSpec::weyl(2);
    let h = parse(
        "x1^2*x2^2*d1^2*d2+x1^2*x2*d1^2*d2^2+x1^2*x2*d1^2*d2+x1^2*d1^2*d2^2+x1^2*x2*d1^2+7*x1*x2^2*d1*d2+10*x1*x2*d1*d2^2+x1^2*d1^2+x1*x2^2*d1+6*x1*x2*d1*d2+7*x1*d1*d2^2+7*x1*x2*d1+x1*d1*d2+8*x2^2*d2+20*x2*d2^2+4*x1*d1+2*x2^2+11*x2*d2+5*d2^2+9*x2+d2+2",
        &alg,
    )
    .unwrap();
    let levels = theta_levels(&h);
    let bb = degree_box(&h);
    let mut rng = DetRng::new(0);
    let top = &levels[0];
    let bot = levels.last().unwrap();
    let ts = two_block_splits(&alg, &bb, &top.0, &top.1, &mut rng);
    let bs = two_block_splits(&alg, &bb, &bot.0, &bot.1, &mut rng);
    let mut count = 0;
    let dump: Option<usize> = std::env::var("DUMP_PAIR").ok().and_then(|s| s.parse().ok());
    let only: Option<usize> = std::env::var("SOLVE_PAIR").ok().and_then(|s| s.parse().ok());
    for t in &ts {
        for b in &bs {
            if lex_compare(&t.z_left, &b.z_left) != std::cmp::Ordering::Greater
                || lex_compare(&t.z_right, &b.z_right) != std::cmp::Ordering::Greater
            {
                continue;
            }
            let Some((eta, mu)) = degree_window(&h, &t.z_left, &b.z_left, &t.z_right, &b.z_right)
            else {
                continue;
            };
            count += 1;
            if let Some(d) = dump {
                if count != d {
                    continue;
                }
            }
            if let Some(o) = only {
                if count != o {
                    continue;
                }
            }
            let inst = AnsatzInstance {
                algebra: alg.clone(),
                h_levels: levels.clone(),
                eta: eta.clone(),
                mu: mu.clone(),
                p_top: t.left.clone(),
                q_top: t.right.scalar_mul(&t.scalar),
                p_bot: ExtremeValue::Scaled(b.left.clone()),
                q_bot: ExtremeValue::Scaled(b.right.clone()),
                c_bot: b.scalar.clone(),
                bounds: bb.theta.clone(),
            };
            let built = build_system(&inst);
            if dump.is_some() {
                println!("pair {count}: vars ({}): {:?}", built.vars.len(), built.vars);
                println!("box gens ({}):", built.box_gens.len());
                for g in &built.box_gens {
                    println!("  {g}");
                }
                println!("extended gens ({}):", built.extended_gens.len());
                for g in &built.extended_gens {
                    println!("  {g}");
                }
                return;
            }
            println!(
                "start pair {count}: k={} l={} ext={}",
                eta.len(),
                mu.len(),
                built.extended_gens.len()
            );
            let t0 = Instant::now();
            let (pts, _) = solve_built(&built, &mut rng);
            println!("  solved in {:?} pts={}", t0.elapsed(), pts.len());
        }
    }
}
