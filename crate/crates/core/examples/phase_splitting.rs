//! Dominant and lower parts of phases, word by word.
use resonance::equation::EquationSpec;
use resonance::fixtures;
use resonance::phase::{dominant_closed_form, split_adaptive, split_word};
use resonance::tree::{Letter, Word};

fn main() {
    let eq = EquationSpec::cubic_nls();
    let w = Word::from_root_side(vec![
        Letter::try_from(fixtures::root_letter()).unwrap(),
        Letter::try_from(fixtures::letter()).unwrap(),
    ]);
    for (j, s) in split_word(&w, &eq).iter().enumerate() {
        println!("prefix {}: phase {} | dom {} | low {}", j + 1, s.sum, s.dominant, s.lower);
    }
    println!("closed form: {}", dominant_closed_form(&fixtures::nested_core(), &eq).unwrap());

    // with more regularity the first prefix is expanded entirely
    for n in [2, 6] {
        let a = split_adaptive(&w, &[0, 0], n, 0, &eq.alpha, &eq);
        let flags: Vec<_> = a.iter().map(|x| (x.condition.to_string(), x.expanded)).collect();
        println!("n = {n}: {flags:?}");
    }
}
