use opfactor_core::ansatz::factor;
use opfactor_core::expr::{parse, print_canonical};
use opfactor_core::ore::AlgebraSpec;
use opfactor_core::util::DetRng;

fn main() {
    let alg = AlgebraSpec::weyl(1);
    let h = parse("(x1^4-1)*x1*d1^2+(1+7*x1^4)*d1+8*x1^3", &alg).unwrap();
    println!("h = {}", print_canonical(&h));
    let out = factor(&h, true, &mut DetRng::new(0)).unwrap();
    println!("count = {}", out.factorizations.len());
    for (i, f) in out.factorizations.iter().enumerate() {
        let parts: Vec<String> = f.factors.iter().map(|p| print_canonical(p)).collect();
        println!("{:2}: unit={} [{}]", i + 1, f.unit, parts.join(" | "));
        assert!(f.verifies(&h));
    }
}
