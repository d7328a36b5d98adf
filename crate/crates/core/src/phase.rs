//! Phases of trees and words, and their dominant/lower splittings.

use num::{BigInt, BigRational, One};

use crate::equation::EquationSpec;
use crate::freq_poly::FreqPoly;
use crate::tree::{EdgeKind, Forest, Tree, TreeError, Word};

/// `F(I_(t,p)(λ_k F)) = (-1)^p P_t((-1)^p k) + F(F)`.
pub fn phase_tree(t: &Tree, eq: &EquationSpec) -> FreqPoly {
    t.children().iter().fold(eq.edge_phase(t.edge(), t.freq()), |acc, c| &acc + &phase_tree(c, eq))
}

pub fn phase(f: &Forest, eq: &EquationSpec) -> FreqPoly {
    f.trees().iter().fold(FreqPoly::zero(), |acc, t| &acc + &phase_tree(t, eq))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitResult {
    /// `F(T_j) + dominant of the previous prefix`.
    pub sum: FreqPoly,
    pub dominant: FreqPoly,
    pub lower: FreqPoly,
}

/// Prefix-by-prefix splitting `dom(w_[j]) = P_dom(F(T_j) + dom(w_[j-1]))`.
pub fn split_word(w: &Word, eq: &EquationSpec) -> Vec<SplitResult> {
    let mut prev = FreqPoly::zero();
    let mut out = Vec::with_capacity(w.len());
    for l in w.letters() {
        let sum = &phase_tree(l.tree(), eq) + &prev;
        let dominant = sum.p_dom();
        let lower = &sum - &dominant;
        prev = dominant.clone();
        out.push(SplitResult { sum, dominant, lower });
    }
    out
}

/// Adaptive splitting at one prefix, with the value of the regularity condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptiveSplit {
    pub split: SplitResult,
    pub condition: BigRational,
    /// `condition <= n`: enough regularity, everything is Taylor expanded.
    pub expanded: bool,
}

/// `m[0]` is `m_1`. Splits each prefix, forcing the dominant part to zero when
/// `(r+ℓ-m_ℓ)·deg(sum_ℓ) + ℓα + Σ_{j<ℓ} (r+j-m_j)·deg(dom_{j-1}) <= n`.
pub fn split_adaptive(w: &Word, m: &[u32], n: i64, r: i64, alpha: &BigRational, eq: &EquationSpec) -> Vec<AdaptiveSplit> {
    assert_eq!(m.len(), w.len(), "one m per letter");
    let mut out: Vec<AdaptiveSplit> = Vec::with_capacity(w.len());
    let mut doms: Vec<FreqPoly> = vec![FreqPoly::zero()];
    for (idx, l) in w.letters().iter().enumerate() {
        let ell = idx as i64 + 1;
        let sum = &phase_tree(l.tree(), eq) + &doms[idx];
        let mut cond = BigRational::from_integer(BigInt::from((r + ell - m[idx] as i64) * sum.degree() as i64));
        cond += alpha * BigRational::from_integer(ell.into());
        for j in 1..ell {
            let c = (r + j - m[j as usize - 1] as i64) * doms[j as usize - 1].degree() as i64;
            cond += BigRational::from_integer(c.into());
        }
        let expanded = cond <= BigRational::from_integer(n.into());
        let dominant = if expanded { FreqPoly::zero() } else { sum.p_dom() };
        let lower = &sum - &dominant;
        doms.push(dominant.clone());
        out.push(AdaptiveSplit { split: SplitResult { sum, dominant, lower }, condition: cond, expanded });
    }
    out
}

/// `dom(T) = P_dom(F(T_r) + Σ dom(T_j))` over the star decomposition.
pub fn dominant_tree(t: &Tree, eq: &EquationSpec) -> Result<FreqPoly, TreeError> {
    let t = core_of(t)?;
    let d = t.star_decompose()?;
    let mut s = phase_tree(d.root.tree(), eq);
    for sub in d.subtrees() {
        s = &s + &dominant_tree(sub, eq)?;
    }
    Ok(s.p_dom())
}

/// Every t2-planted subtree, outermost first.
pub fn t2_nodes(t: &Tree) -> Vec<&Tree> {
    let mut out = Vec::new();
    if t.edge().kind == EdgeKind::T2 {
        out.push(t);
    }
    for c in t.children() {
        out.extend(t2_nodes(c));
    }
    out
}

/// The t2-planted tree itself, or the one below a t1 root.
pub fn core_of(t: &Tree) -> Result<&Tree, TreeError> {
    match (t.edge().kind, t.children()) {
        (EdgeKind::T2, _) => Ok(t),
        (EdgeKind::T1, [c]) if c.edge().kind == EdgeKind::T2 => Ok(c),
        _ => Err(TreeError::Shape(format!("{t} has no t2-planted core"))),
    }
}

/// `±2^{1-σ} (k_r - Σ_j ℓ_j)^σ`, the sign being `(-1)^{a_r}` for even `σ`.
pub fn dominant_closed_form(t: &Tree, eq: &EquationSpec) -> Result<FreqPoly, TreeError> {
    let t = core_of(t)?;
    if !t.shape_violations().is_empty() {
        return Err(TreeError::Shape(t.shape_violations().join("; ")));
    }
    let sigma = eq.sigma();
    let mut lin = t.freq().clone();
    for l in t.leaves() {
        lin = &lin - l.freq();
    }
    let two = BigRational::from_integer(2.into());
    let mut c = two.pow(1 - sigma as i32);
    if sigma % 2 == 0 && t.edge().conj {
        c = -c;
    }
    if sigma == 0 {
        return Ok(FreqPoly::zero());
    }
    // leading coefficient of P_t2 scales the whole form
    let lead = eq.p_t2.terms().next().map(|(_, a)| a.clone()).unwrap_or_else(BigRational::one);
    Ok(lin.to_poly().pow(sigma).scale(&(c * lead)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::generate_trees;
    use crate::fixtures;
    use crate::hopf::arborify;
    use crate::tree::Letter;

    fn p(s: &str) -> FreqPoly {
        s.parse().unwrap()
    }

    fn word(ts: &[Tree]) -> Word {
        Word::from_root_side(ts.iter().map(|t| Letter::try_from(t.clone()).unwrap()).collect())
    }

    #[test]
    fn letter_phase() {
        let eq = EquationSpec::cubic_nls();
        assert_eq!(phase_tree(&fixtures::letter(), &eq), p("(-k1+k2+k3)^2 + k1^2 - k2^2 - k3^2"));
        assert!(phase(&Forest::unit(), &eq).is_zero());
    }

    #[test]
    fn split_fixtures() {
        let eq = EquationSpec::cubic_nls();
        let s = split_word(&word(&[fixtures::letter()]), &eq);
        assert_eq!(s[0].dominant, p("2*k1^2"));
        assert_eq!(s[0].lower, p("-2*k1*(k2+k3) + 2*k2*k3"));
        let s = split_word(&word(&[fixtures::root_letter(), fixtures::letter()]), &eq);
        assert_eq!(s[1].dominant, p("2*(k1+k4)^2"));
        for x in &s {
            assert_eq!(&x.dominant + &x.lower, x.sum);
        }
    }

    #[test]
    fn adaptive_examples() {
        let eq = EquationSpec::cubic_nls();
        let zero = BigRational::from_integer(0.into());
        let w = word(&[fixtures::letter()]);
        let a = split_adaptive(&w, &[0], 2, 1, &zero, &eq);
        assert_eq!(a[0].split.dominant, p("2*k1^2"));
        let a = split_adaptive(&w, &[0], 6, 1, &zero, &eq);
        assert!(a[0].split.dominant.is_zero());
        // the nested example at r = 0 with the reachable m = (1, 0)
        let w = word(&[fixtures::root_letter(), fixtures::letter()]);
        let a = split_adaptive(&w, &[0, 1], 2, 0, &zero, &eq);
        assert!(a.iter().all(|x| x.split.dominant.is_zero()));
        assert_eq!(a[1].split.lower, phase_tree(&fixtures::letter(), &eq));
    }

    #[test]
    fn closed_form_fixtures() {
        let eq = EquationSpec::cubic_nls();
        assert_eq!(dominant_closed_form(&fixtures::letter(), &eq).unwrap(), p("2*k1^2"));
        assert_eq!(dominant_closed_form(&fixtures::nested_core(), &eq).unwrap(), p("2*(k1+k4)^2"));
        assert_eq!(dominant_tree(&fixtures::nested_core(), &eq).unwrap(), p("2*(k1+k4)^2"));
    }

    fn check_consistency(eq: &EquationSpec, order: usize) {
        for nt in generate_trees(eq, order).trees {
            if nt.tree.order() == 0 {
                continue;
            }
            let closed = dominant_closed_form(&nt.tree, eq).unwrap();
            assert_eq!(dominant_tree(&nt.tree, eq).unwrap(), closed, "{}", nt.tree);
            let core = Forest::single(nt.tree.children()[0].clone());
            for (w, _) in arborify(&core).unwrap().terms() {
                assert_eq!(split_word(w, eq).last().unwrap().dominant, closed, "{w}");
            }
        }
    }

    #[test]
    fn dominant_parts_agree_across_words_nls() {
        check_consistency(&EquationSpec::cubic_nls(), 3);
    }

    #[test]
    fn dominant_parts_agree_quadratic_kdv_like() {
        let eq = EquationSpec {
            p_t1: p("k^3"),
            p_t2: p("-k^3"),
            nabla_alpha: p("k"),
            alpha: BigRational::one(),
            nonlinearity: vec![false, false],
        };
        check_consistency(&eq, 3);
    }
}
