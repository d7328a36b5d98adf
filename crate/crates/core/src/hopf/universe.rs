use std::collections::BTreeMap;

use super::{graft, graft_adjoint_tree};
use crate::freq_poly::FreqVector;
use crate::tree::{EdgeDeco, Forest, Tree};

fn z() -> FreqVector {
    FreqVector::zero()
}

/// All edge-decorated trees (zero node decorations) of the structural class
/// with at most `max_nodes` nodes: `(t2-planted, every tree)`.
pub fn class_universe(max_nodes: usize) -> (Vec<Tree>, Vec<Tree>) {
    // by_nodes[n] = t2-planted trees with n nodes
    let mut by_nodes: Vec<Vec<Tree>> = vec![Vec::new(); max_nodes + 1];
    for n in 3..=max_nodes {
        // branches hanging from the letter node, with the nodes they add
        let mut items: Vec<(Tree, usize)> = Vec::new();
        for conj in [false, true] {
            let e = EdgeDeco::new(crate::tree::EdgeKind::T1, conj);
            items.push((Tree::leaf(e, z()), 1));
            for (m, ps) in by_nodes.iter().enumerate().take(n - 2 + 1) {
                for p in ps {
                    items.push((Tree::new(e, z(), vec![p.clone()]), m));
                }
            }
        }
        let mut found = Vec::new();
        multisets(&items, 0, n - 2, &mut Vec::new(), &mut found);
        for cs in found {
            for conj in [false, true] {
                let e = EdgeDeco::new(crate::tree::EdgeKind::T2, conj);
                by_nodes[n].push(Tree::new(e, z(), cs.clone()));
            }
        }
    }
    let planted: Vec<Tree> = by_nodes.iter().flatten().cloned().collect();
    let mut all = planted.clone();
    for conj in [false, true] {
        let e = EdgeDeco::new(crate::tree::EdgeKind::T1, conj);
        all.push(Tree::leaf(e, z()));
        for p in &planted {
            // the outer t1 edge adds one node
            if p.node_count() < max_nodes {
                all.push(Tree::new(e, z(), vec![p.clone()]));
            }
        }
    }
    all.sort();
    all.dedup();
    (planted, all)
}

fn multisets(items: &[(Tree, usize)], from: usize, left: usize, cur: &mut Vec<Tree>, out: &mut Vec<Vec<Tree>>) {
    if left == 0 {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        return;
    }
    for i in from..items.len() {
        let (t, w) = &items[i];
        if *w <= left {
            cur.push(t.clone());
            multisets(items, i, left - w, cur, out);
            cur.pop();
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct DualityReport {
    pub trees: usize,
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl DualityReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

type Key = (Tree, Forest, Forest);

/// Brute-force `⟨↷*τ, σ1⊗σ2⟩ = ⟨τ, σ1↷σ2⟩` with `⟨σ, τ⟩ = δ S(τ)` over the
/// class universe up to `max_nodes` nodes.
pub fn pairing_duality_check(max_nodes: usize) -> DualityReport {
    let (planted, all) = class_universe(max_nodes);
    let mut lhs: BTreeMap<Key, i64> = BTreeMap::new();
    for t in &all {
        for (a, b, c) in graft_adjoint_tree(t).terms() {
            lhs.insert((t.clone(), a.clone(), b.clone()), c);
        }
    }
    let mut rhs: BTreeMap<Key, i64> = BTreeMap::new();
    for t in &all {
        rhs.insert((t.clone(), Forest::unit(), Forest::single(t.clone())), 1);
    }
    for s in &planted {
        rhs.insert((s.clone(), Forest::single(s.clone()), Forest::unit()), 1);
        for t in &all {
            if s.node_count() + t.node_count() - 1 > max_nodes {
                continue;
            }
            let (fs, ft) = (Forest::single(s.clone()), Forest::single(t.clone()));
            for (g, n) in graft(&fs, &ft).expect("single trees") {
                let tau = g.single_tree().expect("grafting two trees gives a tree").clone();
                *rhs.entry((tau, fs.clone(), ft.clone())).or_insert(0) += n;
            }
        }
    }
    let mut report = DualityReport { trees: all.len(), ..Default::default() };
    let mut keys: Vec<&Key> = lhs.keys().chain(rhs.keys()).collect();
    keys.sort();
    keys.dedup();
    for k in keys {
        let (tau, a, b) = k;
        let c = lhs.get(k).copied().unwrap_or(0) as i128;
        let n = rhs.get(k).copied().unwrap_or(0) as i128;
        let left = c * a.symmetry_factor() as i128 * b.symmetry_factor() as i128;
        let right = n * tau.symmetry_factor() as i128;
        report.checked += 1;
        if left != right {
            report.mismatches.push(format!("τ = {tau}, σ1 = {a}, σ2 = {b}: {left} vs {right}"));
        }
    }
    report
}
