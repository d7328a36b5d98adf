use super::*;
use crate::fixtures;
use proptest::prelude::*;

fn iso_count(a: &Tree, b: &Tree) -> u64 {
    if a.edge != b.edge || a.freq != b.freq || a.children.len() != b.children.len() {
        return 0;
    }
    let n = a.children.len();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut total = 0;
    permute(&mut idx, 0, &mut |p| {
        total += a.children.iter().zip(p).map(|(x, &j)| iso_count(x, &b.children[j])).product::<u64>();
    });
    total
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

#[test]
fn validates_first_order_letter() {
    let t = parse_tree("I[t2,0](-k1+k2+k3; I[t1,1](k1), I[t1,0](k2), I[t1,0](k3))").unwrap();
    assert!(t.validate().is_ok());
    assert_eq!(t, fixtures::letter());
    let bad = parse_tree("I[t2,0](k1+k2+k3; I[t1,1](k1), I[t1,0](k2), I[t1,0](k3))").unwrap();
    match bad.validate() {
        Err(TreeError::Inconsistent { path, .. }) => assert!(path.is_empty()),
        other => panic!("expected inconsistency, got {other:?}"),
    }
    assert!(Forest::unit().validate().is_ok());
}

#[test]
fn leaf_coefficients_are_restricted() {
    let t = Tree::leaf(EdgeDeco::T1, FreqVector::from_pairs(&[(1, 2)]));
    assert!(matches!(t.validate(), Err(TreeError::LeafCoefficient { .. })));
}

#[test]
fn orders_and_symmetry_factors_of_nls_trees() {
    let ts = [fixtures::t0(), fixtures::t1(), fixtures::t2(), fixtures::t3()];
    let orders: Vec<usize> = ts.iter().map(Tree::order).collect();
    assert_eq!(orders, vec![0, 1, 2, 2]);
    let s: Vec<u64> = ts.iter().map(Tree::symmetry_factor).collect();
    assert_eq!(s, vec![1, 2, 2, 4]);
    for t in &ts {
        t.validate().unwrap();
        assert!(t.shape_violations().is_empty(), "{t}");
    }
}

#[test]
fn symmetry_factor_matches_brute_force_on_fixtures() {
    for t in [fixtures::letter(), fixtures::nested_core(), fixtures::t3()] {
        assert_eq!(t.symmetry_factor(), iso_count(&t.erased(), &t.erased()));
    }
    // chain of two distinct subtrees
    let chain = Tree::new(
        EdgeDeco::T1,
        FreqVector::zero(),
        vec![Tree::new(EdgeDeco::T2, FreqVector::zero(), vec![Tree::leaf(EdgeDeco::T1_BAR, FreqVector::zero())])],
    );
    assert_eq!(chain.symmetry_factor(), 1);
}

#[test]
fn star_decomposition_of_nested_core() {
    let d = fixtures::nested_core().star_decompose().unwrap();
    assert_eq!(d.root.tree(), &fixtures::root_letter());
    assert_eq!(d.subtrees(), vec![&fixtures::letter()]);
    assert_eq!(d.reassemble(), fixtures::nested_core());
    let l = fixtures::letter().star_decompose().unwrap();
    assert!(l.grafts.is_empty());
    assert_eq!(l.root.tree(), &fixtures::letter());
    assert!(fixtures::t1().star_decompose().is_err());
}

#[test]
fn text_and_json_round_trip() {
    for t in [fixtures::t1(), fixtures::t2(), fixtures::t3()] {
        assert_eq!(parse_tree(&t.to_string()).unwrap(), t);
        assert_eq!(Tree::from_json(&t.to_json()).unwrap(), t);
    }
    let j = fixtures::letter().to_json();
    assert_eq!(j["edge"]["kind"], "t2");
    assert_eq!(j["freq"], "-k1+k2+k3");
}

pub(crate) fn arb_edge() -> impl Strategy<Value = EdgeDeco> {
    (any::<bool>(), any::<bool>()).prop_map(|(k, c)| EdgeDeco::new(if k { EdgeKind::T2 } else { EdgeKind::T1 }, c))
}

/// Edge-decorated trees with zero node decorations, at most `budget` edges.
pub(crate) fn arb_shape(budget: u32) -> BoxedStrategy<Tree> {
    let leaf = arb_edge().prop_map(|e| Tree::leaf(e, FreqVector::zero())).boxed();
    leaf.prop_recursive(4, budget, 3, |inner| {
        (arb_edge(), prop::collection::vec(inner, 1..4))
            .prop_map(|(e, cs)| Tree::new(e, FreqVector::zero(), cs))
    })
    .boxed()
}

proptest! {
    #[test]
    fn symmetry_factor_is_automorphism_count(t in arb_shape(8)) {
        prop_assume!(t.node_count() <= 9);
        prop_assert_eq!(t.symmetry_factor(), iso_count(&t, &t));
    }

    #[test]
    fn canonical_form_ignores_child_order(t in arb_shape(8), seed in any::<u64>()) {
        // rebuild with children listed in a rotated order
        fn rotate(t: &Tree, s: u64) -> Tree {
            let mut cs: Vec<Tree> = t.children.iter().map(|c| rotate(c, s / 3)).collect();
            if !cs.is_empty() {
                let r = (s as usize) % cs.len();
                cs.rotate_left(r);
            }
            Tree { edge: t.edge, freq: t.freq.clone(), children: cs }
        }
        let mut r = rotate(&t, seed);
        fn canon(t: &mut Tree) {
            for c in t.children_mut() { canon(c); }
            t.resort();
        }
        canon(&mut r);
        prop_assert_eq!(r, t);
    }
}
