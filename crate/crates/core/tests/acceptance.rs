//! Acceptance criteria 1-8, one PASS/FAIL line each.

use std::collections::BTreeMap;
use std::time::Instant;

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resonance::equation::{generate_trees, series_weights, EquationSpec};
use resonance::fixtures;
use resonance::freq_poly::{FreqPoly, RationalExpr};
use resonance::hopf::{arborify, as_letter, coassoc_check, coproduct_bck, reduced_coproduct, shuffle, TensorSum, WordSum};
use resonance::nls::{convergence_study, StepperConfig};
use resonance::oracle::{default_times, fit_order, nonresonant_tuple, quad_pi, scheme_errors};
use resonance::phase::{dominant_closed_form, dominant_tree, phase_tree, split_adaptive, split_word};
use resonance::scheme::{ibp_identity_check, letter_weight, psi_tilde, scheme, ExpPoly};
use resonance::suite;
use resonance::tree::{Forest, Letter, Tree, Word};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn p(s: &str) -> FreqPoly {
    s.parse().expect("polynomial literal")
}

fn f(t: Tree) -> Forest {
    Forest::single(t)
}

fn letter(t: Tree) -> Letter {
    Letter::try_from(t).expect("letter")
}

fn criterion_1() -> Check {
    let eq = EquationSpec::cubic_nls();
    // Δ T_1 = T_1 ⊗ 1 + 1 ⊗ T_1
    let t1 = fixtures::letter();
    let mut want = TensorSum::term(f(t1.clone()), Forest::unit());
    want.add(Forest::unit(), f(t1.clone()), 1);
    ensure(coproduct_bck(&f(t1)) == want, "coproduct of T_1")?;
    // Δ̃ T_3 = 1 ⊗ T_3 + T_2 ⊗ T_1, with T_2 the inner letter and T_1 the root letter
    let t3 = fixtures::nested_core();
    let mut want = TensorSum::term(Forest::unit(), f(t3.clone()));
    want.add(f(fixtures::letter()), f(fixtures::root_letter()), 1);
    ensure(reduced_coproduct(&t3) == want, "reduced coproduct of T_3")?;
    let mut full = want.clone();
    full.add(f(t3.clone()), Forest::unit(), 1);
    ensure(coproduct_bck(&f(t3.clone())) == full, "coproduct of T_3")?;
    // 𝔞(T_3) = T_2 T_1, written root letter first
    let w = Word::from_root_side(vec![letter(fixtures::root_letter()), letter(fixtures::letter())]);
    ensure(arborify(&f(t3)).map_err(|e| e.to_string())? == WordSum::word(w), "arborification of T_3")?;
    let ws = series_weights(&generate_trees(&eq, 2), &eq).map_err(|e| e.to_string())?;
    let s: Vec<u64> = ws.iter().map(|w| w.symmetry).collect();
    ensure(s == vec![1, 2, 2, 4], format!("symmetry factors {s:?}"))?;
    let u: Vec<String> = [0, 1, 3].iter().map(|&i| ws[i].upsilon.coeff.to_string()).collect();
    ensure(u == ["1", "2", "4"], format!("Upsilon coefficients {u:?}"))?;
    Ok("coproducts, arborification, S = 1,2,2,4, Upsilon = 1,2,4".into())
}

fn criterion_2() -> Check {
    let eq = EquationSpec::cubic_nls();
    let s = split_word(&Word::from_root_side(vec![letter(fixtures::letter())]), &eq);
    ensure(s[0].dominant == p("2*k1^2"), format!("dominant {}", s[0].dominant))?;
    ensure(s[0].lower == p("-2*k1*(k2+k3) + 2*k2*k3"), format!("lower {}", s[0].lower))?;
    let a = split_adaptive(&Word::from_root_side(vec![letter(fixtures::letter())]), &[0], 6, 1, &eq.alpha, &eq);
    ensure(a[0].split.dominant.is_zero(), "F^{6,1}_dom(T, 0) should vanish")?;
    let want = p("2*(k1+k4)^2");
    let w = Word::from_root_side(vec![letter(fixtures::root_letter()), letter(fixtures::letter())]);
    let word_dom = split_word(&w, &eq).last().map(|x| x.dominant.clone()).unwrap_or_else(FreqPoly::zero);
    let t3 = fixtures::nested_core();
    ensure(dominant_tree(&t3, &eq).map_err(|e| e.to_string())? == want, "tree dominant of T_3")?;
    ensure(word_dom == want, format!("word dominant {word_dom}"))?;
    ensure(dominant_closed_form(&t3, &eq).map_err(|e| e.to_string())? == want, "closed form of T_3")?;
    Ok("2k1^2 | -2k1(k2+k3)+2k2k3 | 0 | 2(k1+k4)^2".into())
}

fn criterion_3() -> Check {
    let eq = EquationSpec::cubic_nls();
    let t3 = scheme(&fixtures::nested_core(), 2, 2, &eq).map_err(|e| e.to_string())?;
    let half = RationalExpr::from_rational(num::BigRational::new((-1).into(), 2.into()));
    ensure(t3.equals(&ExpPoly::term(half, 2, FreqPoly::zero())), format!("Pi^(2,2)(T_3) = {t3}"))?;
    // -i (1/(iD) - iL/(i²D²)) (e^{itD} - 1) - i² t L/(iD) e^{itD}
    let (d, l) = (p("2*k1^2"), p("-2*k1*(k2+k3) + 2*k2*k3"));
    let a = RationalExpr::one().div_poly(&d, 1).mul_i(-1);
    let b = RationalExpr::from_poly(l.clone()).div_poly(&d, 2).mul_i(1 - 2);
    let c1 = a.sub(&b).mul_i(3);
    let c2 = RationalExpr::from_poly(l).div_poly(&d, 1).mul_i(2 - 1).neg();
    let mut want = ExpPoly::zero();
    want.add_term(c1.clone(), 0, d.clone());
    want.add_term(c1.neg(), 0, FreqPoly::zero());
    want.add_term(c2, 1, d);
    let got = scheme(&fixtures::letter(), 2, 2, &eq).map_err(|e| e.to_string())?;
    ensure(got.equals(&want), format!("Pi^(2,2)(T_1) = {got}"))?;
    Ok("Pi^(2,2)(T_3) = -t^2/2, Pi^(2,2)(T_1) two-term form".into())
}

fn criterion_4() -> Check {
    let eq = EquationSpec::cubic_nls();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = f64::INFINITY;
    let mut report = Vec::new();
    for nt in generate_trees(&eq, 2).trees {
        let o = nt.tree.order() as i64;
        for r in [o, o + 1] {
            for _ in 0..5 {
                let fa = nonresonant_tuple(&nt.tree, 2, r, &eq, 2, &mut rng).map_err(|e| e.to_string())?;
                let errs = scheme_errors(&nt.tree, 2, r, &eq, &fa, &default_times()).map_err(|e| e.to_string())?;
                if o == 0 {
                    // the free leaf is reproduced exactly: nothing to fit
                    ensure(errs.iter().all(|e| e.1 < 1e-14), format!("{} not exact", nt.name))?;
                    continue;
                }
                let fit = fit_order(&errs).map_err(|e| e.to_string())?;
                worst = worst.min(fit.slope - r as f64);
                ensure(fit.slope >= r as f64 + 0.8, format!("{} r = {r} at {fa:?}: slope {:.3}", nt.name, fit.slope))?;
            }
            report.push(format!("{}/r={r}", nt.name));
        }
    }
    Ok(format!("{} cases, min slope - r = {worst:.3}; T0 exact", report.len()))
}

fn criterion_5() -> Check {
    let eq = EquationSpec::cubic_nls();
    let (ok, d) = suite::coassociativity(&eq, 3);
    ensure(ok, format!("coassociativity: {d}"))?;
    let mut trees = 0;
    for nt in generate_trees(&eq, 3).trees {
        trees += 1;
        ensure(coassoc_check(&nt.tree).holds(), format!("coassociativity on {}", nt.name))?;
    }
    let (ok, dual) = suite::duality(9);
    ensure(ok, format!("duality: {dual}"))?;
    let (ok, sh) = suite::shuffle_morphism(100, 5, 1e-10);
    ensure(ok, format!("shuffle: {sh}"))?;
    // the symbolic characters agree with the numeric ones on short words
    let al: Vec<Letter> = (0..3).map(|i| letter(fixtures::letter_on(3 * i + 1, 3 * i + 2, 3 * i + 3))).collect();
    let fa: BTreeMap<u32, i64> = (1..=9).map(|s| (s, [3, -1, 2, 5, 1, -2, 4, 2, -3][s as usize - 1])).collect();
    for i in 0..3 {
        for j in 0..3 {
            let (u, v) = (Word::from_root_side(vec![al[i].clone()]), Word::from_root_side(vec![al[j].clone(), al[(j + 1) % 3].clone()]));
            let lhs: Complex64 = shuffle(&u, &v)
                .terms()
                .map(|(w, c)| psi_tilde(w, &eq).expect("nonresonant").eval(&fa, 0.4).expect("nonzero") * c as f64)
                .sum();
            let rhs = psi_tilde(&u, &eq).expect("nonresonant").mul(&psi_tilde(&v, &eq).expect("nonresonant")).eval(&fa, 0.4).expect("nonzero");
            ensure((lhs - rhs).norm() <= 1e-10, format!("symbolic shuffle {u} | {v}"))?;
        }
    }
    Ok(format!("coassociativity on {trees} trees and cores; duality {dual}; shuffle {sh}"))
}

/// `Π(F)` as a product of quadrature values.
fn quad_forest(f: &Forest, eq: &EquationSpec, fa: &BTreeMap<u32, i64>, t: f64) -> Result<Complex64, String> {
    f.trees().iter().try_fold(Complex64::new(1.0, 0.0), |acc, x| Ok(acc * quad_pi(x, eq, fa, t).map_err(|e| e.to_string())?))
}

fn criterion_6() -> Check {
    let eq = EquationSpec::cubic_nls();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (t, h) = (0.5, 1e-4);
    let mut worst = 0.0f64;
    let trees = [fixtures::letter(), fixtures::nested_core(), fixtures::conj_nested_core()];
    for t0 in &trees {
        for _ in 0..3 {
            let fa: BTreeMap<u32, i64> = (1..=t0.max_symbol()).map(|s| (s, rng.gen_range(-2..=2))).collect();
            let one = f(t0.clone());
            let g = |s: f64| quad_forest(&one, &eq, &fa, s);
            let lhs = (g(t - 2.0 * h)? - g(t - h)? * 8.0 + g(t + h)? * 8.0 - g(t + 2.0 * h)?) / (12.0 * h);
            let mut rhs = Complex64::new(0.0, 0.0);
            for (l, r, c) in coproduct_bck(&one).terms() {
                let Some(x) = as_letter(r) else { continue };
                let w = letter_weight(&x, &eq).eval_exact(&fa);
                let ph = phase_tree(x.tree(), &eq).eval_exact(&fa);
                let (w, ph) = (num::ToPrimitive::to_f64(&w).unwrap_or(f64::NAN), num::ToPrimitive::to_f64(&ph).unwrap_or(f64::NAN));
                rhs += quad_forest(l, &eq, &fa, t)? * Complex64::new(0.0, -1.0) * (c as f64 * w) * Complex64::from_polar(1.0, t * ph);
            }
            let rel = (lhs - rhs).norm() / rhs.norm().max(1e-8);
            worst = worst.max(rel);
        }
    }
    ensure(worst <= 1e-6, format!("derivative rule off by {worst:.2e}"))?;
    let ibp = ibp_identity_check(3, 50, 6);
    ensure(ibp.holds(1e-6), format!("integration by parts off by {:.2e}", ibp.max_rel_err))?;
    Ok(format!("d/dt rule max rel {worst:.1e}; integration by parts (n <= 3) max rel {:.1e}", ibp.max_rel_err))
}

fn criterion_7() -> Check {
    let (ok, d) = suite::dominant_consistency(&EquationSpec::cubic_nls(), 3);
    ensure(ok, d.clone())?;
    Ok(d)
}

fn criterion_8() -> Check {
    let r1 = convergence_study(&StepperConfig::smooth(1), true).map_err(|e| e.to_string())?;
    let (l1, g1) = (r1.local_slope().unwrap_or(f64::NAN), r1.global_slope().unwrap_or(f64::NAN));
    let r2 = convergence_study(&StepperConfig::smooth(2), false).map_err(|e| e.to_string())?;
    let l2 = r2.local_slope().unwrap_or(f64::NAN);
    let msg = format!("r=1 local {l1:.3}, global {g1:.3} (heuristic); r=2 local {l2:.3}; cross-check {:.1e}", r1.cross_check.difference);
    ensure((l1 - 2.0).abs() <= 0.2 && (g1 - 1.0).abs() <= 0.2 && (l2 - 3.0).abs() <= 0.3, msg.clone())?;
    ensure(r1.diverged.is_empty(), "diverged run")?;
    Ok(msg)
}

fn main() {
    let criteria: [(u32, &str, f64, fn() -> Check); 8] = [
        (1, "Hopf fixtures", 1.0, criterion_1),
        (2, "splitting fixtures", 1.0, criterion_2),
        (3, "scheme fixtures", 1.0, criterion_3),
        (4, "oracle order", 60.0, criterion_4),
        (5, "algebra properties", 120.0, criterion_5),
        (6, "identity checks", 30.0, criterion_6),
        (7, "dominant consistency", 10.0, criterion_7),
        (8, "NLS convergence", 300.0, criterion_8),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let res = run();
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match res {
            Ok(d) if secs <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget}s budget")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!("{} criterion {id} {name} ({secs:.2}s / {budget}s): {detail}", if ok { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
