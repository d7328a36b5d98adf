//! The property suite behind `resonance check`.

use std::collections::BTreeMap;
use std::time::Instant;

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::equation::{generate_trees, EquationSpec};
use crate::fixtures;
use crate::hopf::{arborify, coassoc_check, pairing_duality_check, shuffle};
use crate::phase::{core_of, dominant_closed_form, dominant_tree, split_word};
use crate::scheme::{dt_identity_check, ibp_identity_check, psi_tilde_at};
use crate::tree::{Forest, Letter, Word};

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn timed(name: &str, f: impl FnOnce() -> (bool, String)) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = f();
    CheckResult { name: name.into(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

/// Coassociativity on every generated tree of order at most `order`, and on their cores.
pub fn coassociativity(eq: &EquationSpec, order: usize) -> (bool, String) {
    let mut n = 0;
    for nt in generate_trees(eq, order).trees {
        let mut ts = vec![nt.tree.clone()];
        if let Ok(c) = core_of(&nt.tree) {
            ts.push(c.clone());
        }
        for t in ts {
            n += 1;
            if !coassoc_check(&t).holds() {
                return (false, format!("fails on {} ({t})", nt.name));
            }
        }
    }
    (true, format!("{n} trees"))
}

pub fn duality(max_nodes: usize) -> (bool, String) {
    let r = pairing_duality_check(max_nodes);
    let head = r.mismatches.first().cloned().unwrap_or_default();
    (r.holds(), format!("{} trees, {} pairings checked {}", r.trees, r.checked, head))
}

/// `|Ψ̃(u ⧢ v) - Ψ̃(u) Ψ̃(v)|` at random nonresonant integer tuples.
pub fn shuffle_morphism(pairs: usize, seed: u64, tol: f64) -> (bool, String) {
    let eq = EquationSpec::cubic_nls();
    let alphabet: Vec<Letter> =
        (0..4).map(|i| Letter::try_from(fixtures::letter_on(3 * i + 1, 3 * i + 2, 3 * i + 3)).expect("letter")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut done = 0;
    let mut attempts = 0;
    while done < pairs {
        attempts += 1;
        if attempts > 50 * pairs {
            return (false, format!("only {done} nonresonant pairs found"));
        }
        let word = |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(1..=3);
            Word::from_root_side((0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())].clone()).collect())
        };
        let (u, v) = (word(&mut rng), word(&mut rng));
        let fa: BTreeMap<u32, i64> = (1..=12).map(|s| (s, rng.gen_range(-4..=4))).collect();
        let t: f64 = rng.gen_range(0.1..1.0);
        let lhs: Result<Complex64, _> = shuffle(&u, &v).terms().map(|(w, c)| psi_tilde_at(w, &eq, &fa, t).map(|x| x * c as f64)).sum();
        let rhs = psi_tilde_at(&u, &eq, &fa, t).and_then(|a| Ok(a * psi_tilde_at(&v, &eq, &fa, t)?));
        let (Ok(a), Ok(b)) = (lhs, rhs) else { continue };
        worst = worst.max((a - b).norm());
        done += 1;
    }
    (worst <= tol, format!("{pairs} pairs, max |difference| {worst:.2e}"))
}

/// `∂_t Π` rule, symbolically, on the cores of all trees up to `order` and on pairs of them.
pub fn derivative_rule(eq: &EquationSpec, order: usize) -> (bool, String) {
    let cores: Vec<_> = generate_trees(eq, order).trees.iter().filter_map(|nt| core_of(&nt.tree).ok().cloned()).collect();
    let mut n = 0;
    for c in &cores {
        n += 1;
        if !dt_identity_check(&Forest::single(c.clone()), eq).holds() {
            return (false, format!("fails on {c}"));
        }
    }
    let shifted = fixtures::letter_on(20, 21, 22);
    for c in cores.iter().filter(|c| c.order() <= 2) {
        n += 1;
        if !dt_identity_check(&Forest::from_trees(vec![c.clone(), shifted.clone()]), eq).holds() {
            return (false, format!("fails on {c} with a second letter"));
        }
    }
    (true, format!("{n} forests"))
}

pub fn integration_by_parts(n_max: u32, seed: u64, tol: f64) -> (bool, String) {
    let r = ibp_identity_check(n_max, 50, seed);
    (r.holds(tol), format!("{} cases, max relative error {:.2e}", r.cases, r.max_rel_err))
}

/// Tree-level, word-level and closed-form dominant parts agree.
pub fn dominant_consistency(eq: &EquationSpec, order: usize) -> (bool, String) {
    let mut words = 0;
    for nt in generate_trees(eq, order).trees {
        if nt.tree.order() == 0 {
            continue;
        }
        let (Ok(closed), Ok(tree)) = (dominant_closed_form(&nt.tree, eq), dominant_tree(&nt.tree, eq)) else {
            return (false, format!("{} has no closed form", nt.name));
        };
        if closed != tree {
            return (false, format!("{}: {tree} vs {closed}", nt.name));
        }
        let core = Forest::single(nt.tree.children()[0].clone());
        let Ok(ws) = arborify(&core) else { return (false, format!("{} cannot be arborified", nt.name)) };
        for (w, _) in ws.terms() {
            words += 1;
            let last = split_word(w, eq).last().map(|s| s.dominant.clone()).unwrap_or_else(crate::freq_poly::FreqPoly::zero);
            if last != closed {
                return (false, format!("{}: word {w} gives {last}", nt.name));
            }
        }
    }
    (true, format!("{words} words"))
}

/// Runs every check; `quick` shrinks the brute-force universe.
pub fn property_suite(seed: u64, quick: bool) -> Vec<CheckResult> {
    let eq = EquationSpec::cubic_nls();
    vec![
        timed("coassociativity", || coassociativity(&eq, 3)),
        timed("pairing duality", || duality(if quick { 7 } else { 9 })),
        timed("shuffle morphism", || shuffle_morphism(100, seed, 1e-10)),
        timed("derivative rule", || derivative_rule(&eq, if quick { 2 } else { 3 })),
        timed("integration by parts", || integration_by_parts(3, seed, 1e-6)),
        timed("dominant consistency", || dominant_consistency(&eq, 3)),
    ]
}
