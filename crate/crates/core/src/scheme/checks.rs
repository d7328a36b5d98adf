use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::exppoly::ExpPoly;
use super::psi::{letter_weight, ZeroTest};
use super::pi_exact_forest;
use crate::equation::EquationSpec;
use crate::freq_poly::RationalExpr;
use crate::hopf::{as_letter, coproduct_bck};
use crate::phase::phase_tree;
use crate::tree::Forest;

#[derive(Clone, Debug)]
pub struct IbpReport {
    pub cases: usize,
    pub max_rel_err: f64,
    /// Largest relative error with `i^{n-m-1}` in place of `i^{n+m-1}`.
    pub printed_variant_max_rel_err: f64,
}

impl IbpReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_rel_err <= tol
    }
}

/// Checks, at random `D, L, t` and a smooth test function `V`,
/// `(t^n/n!) (iL)^n e^{itD} V = Σ_m i^{n+m-1} L^n/D^{m+1} [∂_t g_m - (t^{n-m}/(n-m)!) e^{itD} V']`
/// with `g_m = t^{n-m}/(n-m)! e^{itD} V`.
pub fn ibp_identity_check(n_max: u32, trials: usize, seed: u64) -> IbpReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = IbpReport { cases: 0, max_rel_err: 0.0, printed_variant_max_rel_err: 0.0 };
    let i = Complex64::i();
    for _ in 0..trials {
        let d: f64 = rng.gen_range(0.5..4.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let l: f64 = rng.gen_range(-2.0..2.0);
        let t: f64 = rng.gen_range(0.1..1.0);
        let coef: Vec<(Complex64, Complex64, f64)> = (0..3)
            .map(|_| {
                (
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    rng.gen_range(0.5..3.0),
                )
            })
            .collect();
        let v = |s: f64| coef.iter().fold(Complex64::new(1.0, 0.0), |acc, (a, b, w)| acc * (a + b * (w * s).sin()));
        let dv = |s: f64| diff(&v, s);
        for n in 0..=n_max {
            let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
            let e = |s: f64| Complex64::from_polar(1.0, s * d);
            let lhs = t.powi(n as i32) / fact(n) * (i * l).powi(n as i32) * e(t) * v(t);
            let mut rhs = Complex64::new(0.0, 0.0);
            let mut printed = Complex64::new(0.0, 0.0);
            for m in 0..=n {
                let k = n - m;
                let g = |s: f64| s.powi(k as i32) / fact(k) * e(s) * v(s);
                let dg = diff(&g, t);
                let bracket = dg - t.powi(k as i32) / fact(k) * e(t) * dv(t);
                let base = l.powi(n as i32) / d.powi(m as i32 + 1);
                rhs += i.powi((n + m) as i32 - 1) * base * bracket;
                printed += i.powi(n as i32 - m as i32 - 1) * base * bracket;
            }
            let scale = lhs.norm().max(1e-3);
            rep.max_rel_err = rep.max_rel_err.max((lhs - rhs).norm() / scale);
            rep.printed_variant_max_rel_err = rep.printed_variant_max_rel_err.max((lhs - printed).norm() / scale);
            rep.cases += 1;
        }
    }
    rep
}

/// Five-point central difference.
fn diff(f: &dyn Fn(f64) -> Complex64, s: f64) -> Complex64 {
    let h = 1e-3;
    (f(s - 2.0 * h) - f(s - h) * 8.0 + f(s + h) * 8.0 - f(s + 2.0 * h)) / (12.0 * h)
}

#[derive(Clone, Debug)]
pub struct DtReport {
    pub lhs: ExpPoly,
    pub rhs: ExpPoly,
}

impl DtReport {
    pub fn holds(&self) -> bool {
        self.lhs.equals(&self.rhs)
    }
}

/// `∂_t Π(F) = -i Σ_{F' ⊗ R, R a letter} Π(F') (-1)^{a_R} |∇|^α(R) e^{it F(R)}`, symbolically.
pub fn dt_identity_check(f: &Forest, eq: &EquationSpec) -> DtReport {
    let zt = ZeroTest::Symbolic;
    let lhs = pi_exact_forest(f.trees(), eq, zt).derivative();
    let mut rhs = ExpPoly::zero();
    for (l, r, c) in coproduct_bck(f).terms() {
        let Some(letter) = as_letter(r) else { continue };
        let k = RationalExpr::from_poly(letter_weight(&letter, eq)).mul_i(-1).scale(&num::BigRational::from_integer(c.into()));
        let e = ExpPoly::term(k, 0, phase_tree(letter.tree(), eq));
        rhs = rhs.add(&pi_exact_forest(l.trees(), eq, zt).mul(&e));
    }
    DtReport { lhs, rhs }
}
