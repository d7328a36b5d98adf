//! Low regularity schemes and their local errors for the first NLS trees.
use resonance::equation::EquationSpec;
use resonance::fixtures;
use resonance::scheme::{local_error_terms, required_regularity, scheme};

fn main() {
    let eq = EquationSpec::cubic_nls();
    for (name, t) in [("letter", fixtures::letter()), ("nested", fixtures::nested_core()), ("conj nested", fixtures::conj_nested_core())] {
        for r in 1..=2 {
            let s = scheme(&t, 2, r, &eq).unwrap();
            println!("Pi^(2,{r})({name}) =\n  {s}");
        }
        let e = local_error_terms(&t, 2, 2, &eq).unwrap();
        println!("E^(2,2)({name}): regularity {}", required_regularity(&e));
        for x in e {
            println!("  {x}");
        }
        println!();
    }
}
