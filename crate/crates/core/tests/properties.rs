use std::collections::BTreeMap;

use proptest::prelude::*;

use resonance::equation::EquationSpec;
use resonance::fixtures;
use resonance::hopf::{coproduct_bck, shuffle};
use resonance::nls::{DataProfile, Stepper};
use resonance::scheme::{pi_exact, psi_tilde_at, scheme, ZeroTest};
use resonance::tree::{Forest, Letter, Word};

fn alphabet() -> Vec<Letter> {
    (0..3).map(|i| Letter::try_from(fixtures::letter_on(3 * i + 1, 3 * i + 2, 3 * i + 3)).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // counit: the 1 ⊗ F and F ⊗ 1 coefficients are 1 for t2-planted trees
    #[test]
    fn coproduct_counit(i in 0usize..3) {
        let t = [fixtures::letter(), fixtures::nested_core(), fixtures::conj_nested_core()][i].clone();
        let f = Forest::single(t);
        let d = coproduct_bck(&f);
        prop_assert_eq!(d.coefficient(&Forest::unit(), &f), 1);
        prop_assert_eq!(d.coefficient(&f, &Forest::unit()), 1);
    }

    #[test]
    fn shuffle_character_at_random_tuples(
        u in prop::collection::vec(0usize..3, 1..4),
        v in prop::collection::vec(0usize..3, 1..4),
        ks in prop::collection::vec(-5i64..=5, 9),
        t in 0.0f64..2.0,
    ) {
        let eq = EquationSpec::cubic_nls();
        let al = alphabet();
        let w = |ix: &[usize]| Word::from_root_side(ix.iter().map(|&i| al[i].clone()).collect());
        let (u, v) = (w(&u), w(&v));
        let fa: BTreeMap<u32, i64> = (1..=9).map(|s| (s, ks[s as usize - 1])).collect();
        let lhs: Result<num::complex::Complex64, _> =
            shuffle(&u, &v).terms().map(|(x, c)| psi_tilde_at(x, &eq, &fa, t).map(|y| y * c as f64)).sum();
        let rhs = psi_tilde_at(&u, &eq, &fa, t).and_then(|a| Ok(a * psi_tilde_at(&v, &eq, &fa, t)?));
        if let (Ok(a), Ok(b)) = (lhs, rhs) {
            prop_assert!((a - b).norm() <= 1e-10);
        }
    }

    // with n large the letter's phase is Taylor expanded: Π^{n,2} = -it + (F/2)t², remainder at most F²t³/6
    #[test]
    fn large_n_scheme_is_the_taylor_polynomial(ks in prop::collection::vec(-3i64..=3, 3), t in 1e-3f64..1e-1) {
        let eq = EquationSpec::cubic_nls();
        let fa: BTreeMap<u32, i64> = (1..=3).map(|s| (s, ks[s as usize - 1])).collect();
        let (k1, k2, k3) = (ks[0] as f64, ks[1] as f64, ks[2] as f64);
        let f = 2.0 * (k1 * k1 - k1 * k2 - k1 * k3 + k2 * k3);
        let s = scheme(&fixtures::letter(), 20, 2, &eq).unwrap().eval(&fa, t).unwrap();
        let e = pi_exact(&fixtures::letter(), &eq, ZeroTest::At(&fa)).eval(&fa, t).unwrap();
        prop_assert!((s - e).norm() <= f * f * t.powi(3) / 6.0 + 1e-14);
    }

    #[test]
    fn linear_flow_is_exact_for_any_data(seed in 0u64..1000, amp in 0.01f64..2.0, tau in 0.001f64..1.0) {
        let mut st = Stepper::new(1, 2, 8, 0.0).unwrap();
        let u0 = DataProfile::Smooth { amplitude: amp }.generate(8, seed).unwrap();
        let u = st.step(&u0, tau).unwrap();
        prop_assert!(u.diff(&u0.untwist(tau)).sobolev_norm(0.0) <= 1e-14 * amp.max(1.0));
    }
}
