//! The cubic NLS trees used throughout the docs and tests.
//!
//! Naming follows the tree listing for `|u|^2 u`: `t0` is the free leaf,
//! `t1` the first-order tree, `t2` the nested tree whose inner branch is
//! unconjugated (S = 2) and `t3` the one whose inner branch is conjugated
//! (S = 4). Trees returned by the `*_core` helpers drop the outer t1 edge and
//! are t2-planted, which is the form the algebra acts on.

use crate::freq_poly::FreqVector;
use crate::tree::{EdgeDeco, Tree};

fn k(i: u32) -> FreqVector {
    FreqVector::symbol(i)
}

/// `I_(t2,0)(λ_{-ka+kb+kc} I_(t1,1)(ka) I_(t1,0)(kb) I_(t1,0)(kc))`.
pub fn letter_on(a: u32, b: u32, c: u32) -> Tree {
    Tree::node(
        EdgeDeco::T2,
        vec![Tree::leaf(EdgeDeco::T1_BAR, k(a)), Tree::leaf(EdgeDeco::T1, k(b)), Tree::leaf(EdgeDeco::T1, k(c))],
    )
}

/// The first-order letter on `k1, k2, k3`.
pub fn letter() -> Tree {
    letter_on(1, 2, 3)
}

pub fn t0() -> Tree {
    Tree::leaf(EdgeDeco::T1, k(1))
}

pub fn t1() -> Tree {
    Tree::node(EdgeDeco::T1, vec![letter()])
}

/// Root letter of the nested tree: leaves `k4` (conjugate), `k5` and `ℓ1 = -k1+k2+k3`.
pub fn root_letter() -> Tree {
    let l1 = letter().freq().clone();
    Tree::node(
        EdgeDeco::T2,
        vec![Tree::leaf(EdgeDeco::T1_BAR, k(4)), Tree::leaf(EdgeDeco::T1, k(5)), Tree::leaf(EdgeDeco::T1, l1)],
    )
}

/// t2-planted core of [`t2`].
pub fn nested_core() -> Tree {
    Tree::node(
        EdgeDeco::T2,
        vec![Tree::leaf(EdgeDeco::T1_BAR, k(4)), Tree::leaf(EdgeDeco::T1, k(5)), Tree::node(EdgeDeco::T1, vec![letter()])],
    )
}

pub fn t2() -> Tree {
    Tree::node(EdgeDeco::T1, vec![nested_core()])
}

/// Conjugated inner letter: `I_(t2,1)` over `I_(t1,0)(k1) I_(t1,1)(k2) I_(t1,1)(k3)`.
pub fn conj_letter() -> Tree {
    Tree::node(
        EdgeDeco::T2_BAR,
        vec![Tree::leaf(EdgeDeco::T1, k(1)), Tree::leaf(EdgeDeco::T1_BAR, k(2)), Tree::leaf(EdgeDeco::T1_BAR, k(3))],
    )
}

/// t2-planted core of [`t3`].
pub fn conj_nested_core() -> Tree {
    Tree::node(
        EdgeDeco::T2,
        vec![
            Tree::leaf(EdgeDeco::T1, k(4)),
            Tree::leaf(EdgeDeco::T1, k(5)),
            Tree::node(EdgeDeco::T1_BAR, vec![conj_letter()]),
        ],
    )
}

pub fn t3() -> Tree {
    Tree::node(EdgeDeco::T1, vec![conj_nested_core()])
}
