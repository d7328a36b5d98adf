//! Quadrature oracle: the scheme error decays like t^(r+1).
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use resonance::equation::{generate_trees, EquationSpec};
use resonance::oracle::{default_times, fit_order, nonresonant_tuple, scheme_errors};

fn main() {
    let eq = EquationSpec::cubic_nls();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for nt in generate_trees(&eq, 2).trees.into_iter().skip(1) {
        let o = nt.tree.order() as i64;
        for r in [o, o + 1] {
            let fa = nonresonant_tuple(&nt.tree, 2, r, &eq, 2, &mut rng).unwrap();
            let errs = scheme_errors(&nt.tree, 2, r, &eq, &fa, &default_times()).unwrap();
            let fit = fit_order(&errs).unwrap();
            println!("{} r = {r} at {:?}: slope {:.3}", nt.name, fa.values().collect::<Vec<_>>(), fit.slope);
        }
    }
}
