//! Trees of order at most 2 for cubic NLS with their symmetry factors and weights.
use resonance::equation::{generate_trees, series_weights, EquationSpec};
use resonance::phase::phase_tree;

fn main() {
    let eq = EquationSpec::cubic_nls();
    for w in series_weights(&generate_trees(&eq, 2), &eq).expect("NLS trees have weights") {
        println!("{}: S = {}, Upsilon = {}, weight = {}", w.name, w.symmetry, w.upsilon, w.weight);
        println!("  {}", w.tree);
        println!("  F = {}", phase_tree(&w.tree, &eq));
    }
}
