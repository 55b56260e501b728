//! `opfactor`: command-line driver for exact operator factorization.
//!
//! Parses an operator expression over a chosen algebra, factors it, and
//! prints the result as text or JSON.  Exit codes: `0` success, `1` for
//! flag/parse/domain errors, `2` when `--verify` detects a factorization
//! whose product does not reproduce the input.

use clap::error::ErrorKind;
use clap::Parser;
use opfactor_core::ansatz::{
    factor, factor_shift, factor_with_premultiplier, FactorOutcome,
};
use opfactor_core::arith::Rational;
use opfactor_core::expr::{parse, print_canonical};
use opfactor_core::ore::{AlgebraKind, AlgebraSpec, Factorization, OrePoly};
use opfactor_core::util::DetRng;
use serde_json::json;
use std::time::Instant;

/// Exact factorization of Weyl, shift, and q-Weyl operators.
#[derive(Parser, Debug)]
#[command(name = "opfactor", version, disable_help_subcommand = true)]
struct Args {
    /// Algebra the expression lives in.
    #[arg(long, value_parser = ["weyl", "shift", "qweyl"])]
    algebra: String,

    /// Number of indices (variables x1..xn and their companions).
    #[arg(long)]
    n: usize,

    /// Comma-separated nonzero rational deformation parameters, one per
    /// index (q-Weyl only), e.g. `--q 2,1/3`.
    #[arg(long)]
    q: Option<String>,

    /// Enumerate every factorization into irreducible factors (default).
    #[arg(long, conflicts_with = "one")]
    all: bool,

    /// Stop after the first complete factorization found.
    #[arg(long)]
    one: bool,

    /// Emit a JSON document instead of text.
    #[arg(long)]
    json: bool,

    /// Re-multiply every reported factorization and fail on any mismatch.
    #[arg(long)]
    verify: bool,

    /// Report wall-clock time per phase on standard error.
    #[arg(long)]
    bench: bool,

    /// Also search for factorizations of s*h where s ranges over monic
    /// x-monomials up to this total degree (Weyl only).
    #[arg(long)]
    premultiplier_degree: Option<u32>,

    /// Seed for the deterministic random generator used internally.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// The operator expression, e.g. "(d1+1)^2*(d1+x1*d2)".
    expression: String,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if help { 0 } else { 1 };
        }
    };

    let algebra = match build_algebra(&args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };

    let t_parse = Instant::now();
    let h = match parse(&args.expression, &algebra) {
        Ok(h) => h,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let parse_time = t_parse.elapsed();

    let all = !args.one;
    let mut rng = DetRng::new(args.seed);
    let t_factor = Instant::now();
    let mut outcome = if let Some(d) = args.premultiplier_degree {
        match factor_with_premultiplier(&h, d, all, &mut rng) {
            Ok((list, dropped)) => Outcome::Premultiplied { list, dropped, max_degree: d },
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        }
    } else {
        let r = match algebra.kind {
            AlgebraKind::Shift => factor_shift(&h, all, &mut rng),
            _ => factor(&h, all, &mut rng),
        };
        match r {
            Ok(out) => Outcome::Plain(out),
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        }
    };
    let factor_time = t_factor.elapsed();

    // Test hook: deliberately corrupt the result so the verification path
    // (and its exit code) can be exercised end to end.
    if std::env::var_os("OPFACTOR_INJECT_FAULT").is_some() {
        inject_fault(&mut outcome, &algebra);
    }

    let t_verify = Instant::now();
    if args.verify {
        if let Some(msg) = verify_outcome(&outcome, &h) {
            eprintln!("error: verification failed: {msg}");
            return 2;
        }
    }
    let verify_time = t_verify.elapsed();

    if args.bench {
        eprintln!("bench: parse {:?}", parse_time);
        eprintln!("bench: factor {:?}", factor_time);
        if args.verify {
            eprintln!("bench: verify {:?}", verify_time);
        }
    }

    if args.json {
        println!("{}", render_json(&outcome, &h, &algebra));
    } else {
        print!("{}", render_text(&outcome, &h));
    }
    0
}

/// Factoring result in either of the two driver modes.
enum Outcome {
    Plain(FactorOutcome),
    Premultiplied {
        list: Vec<(OrePoly, Factorization)>,
        dropped: u64,
        max_degree: u32,
    },
}

fn build_algebra(args: &Args) -> Result<AlgebraSpec, String> {
    if args.n == 0 {
        return Err("--n must be at least 1".to_string());
    }
    let spec = match args.algebra.as_str() {
        "weyl" => AlgebraSpec::weyl(args.n),
        "shift" => AlgebraSpec::shift(args.n),
        "qweyl" => {
            let raw = args
                .q
                .as_deref()
                .ok_or_else(|| "--algebra qweyl requires --q".to_string())?;
            let mut qs = Vec::new();
            for part in raw.split(',') {
                let part = part.trim();
                let v: Rational = part
                    .parse()
                    .map_err(|_| format!("invalid rational '{part}' in --q"))?;
                if v == Rational::from_integer(0.into()) {
                    return Err("deformation parameters must be nonzero".to_string());
                }
                qs.push(v);
            }
            if qs.len() != args.n {
                return Err(format!(
                    "--q lists {} values but --n is {}",
                    qs.len(),
                    args.n
                ));
            }
            AlgebraSpec::qweyl(args.n, qs)
        }
        other => return Err(format!("unknown algebra '{other}'")),
    };
    if args.q.is_some() && spec.kind != AlgebraKind::QWeyl {
        return Err("--q only applies to the qweyl algebra".to_string());
    }
    if args.premultiplier_degree.is_some() && spec.kind != AlgebraKind::Weyl {
        return Err("--premultiplier-degree requires the weyl algebra".to_string());
    }
    Ok(spec)
}

fn inject_fault(outcome: &mut Outcome, algebra: &AlgebraSpec) {
    let one = OrePoly::one(algebra);
    match outcome {
        Outcome::Plain(out) => {
            for f in &mut out.factorizations {
                if let Some(last) = f.factors.last_mut() {
                    *last = last.add(&one);
                }
            }
        }
        Outcome::Premultiplied { list, .. } => {
            for (_, f) in list.iter_mut() {
                if let Some(last) = f.factors.last_mut() {
                    *last = last.add(&one);
                }
            }
        }
    }
}

/// Returns a description of the first factorization whose product does not
/// reproduce its target, or `None` when everything checks out.
fn verify_outcome(outcome: &Outcome, h: &OrePoly) -> Option<String> {
    match outcome {
        Outcome::Plain(out) => out
            .factorizations
            .iter()
            .find(|f| !f.verifies(h))
            .map(|f| format!("product of {} differs from the input", render_factorization(f))),
        Outcome::Premultiplied { list, .. } => list
            .iter()
            .find(|(s, f)| !f.verifies(&s.multiply(h)))
            .map(|(s, f)| {
                format!(
                    "product of {} differs from {} times the input",
                    render_factorization(f),
                    print_canonical(s)
                )
            }),
    }
}

fn rational_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn render_factorization(f: &Factorization) -> String {
    let mut parts = Vec::new();
    if !f.unit.is_integer() || f.unit.numer() != &1.into() {
        parts.push(rational_string(&f.unit));
    }
    for p in &f.factors {
        parts.push(format!("({})", print_canonical(p)));
    }
    parts.join(" * ")
}

fn is_irreducible_outcome(outcome: &Outcome) -> bool {
    match outcome {
        Outcome::Plain(out) => {
            out.factorizations.len() == 1 && out.factorizations[0].factors.len() == 1
        }
        // With a premultiplier search, "irreducible" still refers to the
        // input itself: no listed factorization has the trivial premultiplier.
        Outcome::Premultiplied { list, .. } => {
            !list.iter().any(|(s, _)| s.constant_value().is_some())
        }
    }
}

fn render_text(outcome: &Outcome, h: &OrePoly) -> String {
    let mut out = String::new();
    out.push_str(&format!("input: {}\n", print_canonical(h)));
    match outcome {
        Outcome::Plain(res) => {
            if is_irreducible_outcome(outcome) {
                out.push_str("irreducible\n");
            } else {
                for (i, f) in res.factorizations.iter().enumerate() {
                    out.push_str(&format!("factorization {}: {}\n", i + 1, render_factorization(f)));
                }
            }
            if res.dropped_branches > 0 {
                out.push_str(&format!(
                    "dropped irrational branches: {}\n",
                    res.dropped_branches
                ));
            }
        }
        Outcome::Premultiplied { list, dropped, max_degree } => {
            if list.is_empty() {
                out.push_str(&format!(
                    "no factorization found with premultipliers up to degree {}\n",
                    max_degree
                ));
            } else {
                for (i, (s, f)) in list.iter().enumerate() {
                    out.push_str(&format!(
                        "factorization {} (premultiplier {}): {}\n",
                        i + 1,
                        print_canonical(s),
                        render_factorization(f)
                    ));
                }
            }
            if *dropped > 0 {
                out.push_str(&format!("dropped irrational branches: {}\n", dropped));
            }
        }
    }
    out
}

fn algebra_json(a: &AlgebraSpec) -> serde_json::Value {
    match a.kind {
        AlgebraKind::Weyl => json!({ "kind": "weyl", "n": a.n }),
        AlgebraKind::Shift => json!({ "kind": "shift", "n": a.n }),
        AlgebraKind::QWeyl => json!({
            "kind": "qweyl",
            "n": a.n,
            "q": a.q.iter().map(rational_string).collect::<Vec<_>>(),
        }),
    }
}

fn render_json(outcome: &Outcome, h: &OrePoly, algebra: &AlgebraSpec) -> String {
    let (factorizations, dropped) = match outcome {
        Outcome::Plain(res) => {
            let fz: Vec<_> = res
                .factorizations
                .iter()
                .map(|f| {
                    json!({
                        "unit": rational_string(&f.unit),
                        "factors": f.factors.iter().map(print_canonical).collect::<Vec<_>>(),
                    })
                })
                .collect();
            (fz, res.dropped_branches)
        }
        Outcome::Premultiplied { list, dropped, .. } => {
            let fz: Vec<_> = list
                .iter()
                .map(|(s, f)| {
                    json!({
                        "premultiplier": print_canonical(s),
                        "unit": rational_string(&f.unit),
                        "factors": f.factors.iter().map(print_canonical).collect::<Vec<_>>(),
                    })
                })
                .collect();
            (fz, *dropped)
        }
    };
    json!({
        "input": print_canonical(h),
        "algebra": algebra_json(algebra),
        "factorizations": factorizations,
        "irreducible": is_irreducible_outcome(outcome),
        "dropped_irrational_branches": dropped,
    })
    .to_string()
}
