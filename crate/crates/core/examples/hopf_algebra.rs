//! Coproduct, arborification and shuffles on the nested NLS tree.
use resonance::fixtures;
use resonance::hopf::{arborify, coassoc_check, coproduct_bck, shuffle};
use resonance::tree::{Forest, Letter, Word};

fn main() {
    let t = fixtures::nested_core();
    println!("tree: {t}\n");
    println!("coproduct:\n{}\n", coproduct_bck(&Forest::single(t.clone())));
    println!("arborification: {}\n", arborify(&Forest::single(t.clone())).unwrap());
    println!("coassociative: {}", coassoc_check(&t).holds());

    let a = Letter::try_from(fixtures::letter_on(1, 2, 3)).unwrap();
    let b = Letter::try_from(fixtures::letter_on(4, 5, 6)).unwrap();
    let u = Word::from_root_side(vec![a.clone(), b.clone()]);
    let v = Word::from_root_side(vec![a]);
    println!("\n{u} shuffled with {v}:\n{}", shuffle(&u, &v));
}
