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
    let p = parse("x1*d1*d2+x1*x2*d1*d2+3*x2*d2+x2", &alg).unwrap();
    let q = parse("x1^2*x2*d1+x1^2*d1*d2+2*x1*x2+5*x1*d2+x1", &alg).unwrap();
    let h = p.multiply(&q);
    let levels = theta_levels(&h);
    let bb = degree_box(&h);
    let mut rng = DetRng::new(0);
    let top = &levels[0];
    let bot = levels.last().unwrap();
    let ts = two_block_splits(&alg, &bb, &top.0, &top.1, &mut rng);
    let bs = two_block_splits(&alg, &bb, &bot.0, &bot.1, &mut rng);
    let mut total = std::time::Duration::ZERO;
    let mut count = 0;
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
            count += 1;
            println!(
                "start pair {count}: k={} l={} top=({:?}|{:?}) bot=({:?}|{:?})",
                eta.len(),
                mu.len(),
                t.z_left,
                t.z_right,
                b.z_left,
                b.z_right
            );
            let t0 = Instant::now();
            let built = build_system(&inst);
            let t_build = t0.elapsed();
            println!("  built: vars={} gens", built.vars.len());
            let t0 = Instant::now();
            let (pts, _) = solve_built(&built, &mut rng);
            let t_solve = t0.elapsed();
            total += t_build + t_solve;
            println!(
                "k={} l={} vars={} box={} ext={} build={:?} solve={:?} pts={}",
                eta.len(),
                mu.len(),
                built.vars.len(),
                built.stats.box_generators,
                built.stats.extended_generators,
                t_build,
                t_solve,
                pts.len()
            );
        }
    }
    println!("pairs solved: {count}, total time {total:?}");
}
