//! Numeric ground truth: nested quadrature of `Π`, evaluation at integer tuples and order fits.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use num::complex::Complex64;
use rand::Rng;

use crate::equation::EquationSpec;
use crate::scheme::{pi_exact, ExpPoly, SchemeBuilder, SchemeError, ZeroDenominator, ZeroTest};
use crate::tree::{EdgeKind, Tree};

/// Integer value of each frequency symbol.
pub type FreqAssignment = BTreeMap<u32, i64>;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("quadrature reached only {achieved:e} (asked {tol:e})")]
    Tolerance { value: Complex64, achieved: f64, tol: f64 },
    #[error("need at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("error value {0} at step {1} is not positive and finite")]
    BadError(f64, f64),
    #[error("steps must be strictly decreasing")]
    Unordered,
    #[error(transparent)]
    Resonance(#[from] ZeroDenominator),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("no nonresonant tuple found after {0} draws")]
    NoTuple(usize),
}

// Gauss-Kronrod 10/21 nodes and weights (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

fn gk21(f: &mut dyn FnMut(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[10];
    let mut g = Complex64::new(0.0, 0.0);
    for j in 0..10 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

fn adaptive(f: &mut dyn FnMut(f64) -> Complex64, a: f64, b: f64, tol: f64, depth: u32) -> (Complex64, f64) {
    let (v, e) = gk21(f, a, b);
    // below this the estimate is roundoff, not truncation
    let floor = 50.0 * f64::EPSILON * (b - a).abs();
    if e <= tol.max(floor) || depth == 0 {
        return (v, e);
    }
    let m = 0.5 * (a + b);
    let (v1, e1) = adaptive(f, a, m, tol / 2.0, depth - 1);
    let (v2, e2) = adaptive(f, m, b, tol / 2.0, depth - 1);
    (v1 + v2, e1 + e2)
}

/// `∫_a^b f` over panels with phase variation below π/4, each refined to `tol·len/(b-a)`.
pub fn integrate(f: &mut dyn FnMut(f64) -> Complex64, a: f64, b: f64, max_freq: f64, tol: f64) -> (Complex64, f64) {
    let panels = ((max_freq * (b - a)) / FRAC_PI_4).ceil().max(1.0) as usize;
    let w = (b - a) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for i in 0..panels {
        let (v, e) = adaptive(f, a + i as f64 * w, a + (i + 1) as f64 * w, tol / panels as f64, 12);
        total += v;
        err += e;
    }
    (total, err)
}

/// The tree with every phase and weight evaluated at one tuple.
struct NumTree {
    kind: EdgeKind,
    phase: f64,
    pre: Complex64,
    bound: f64,
    children: Vec<NumTree>,
}

impl NumTree {
    fn new(t: &Tree, eq: &EquationSpec, x: &[f64]) -> NumTree {
        let phase = eq.edge_phase(t.edge(), t.freq()).compile().eval(x);
        let nab = eq.nabla(t.freq()).compile().eval(x);
        let children: Vec<NumTree> = t.children().iter().map(|c| NumTree::new(c, eq, x)).collect();
        NumTree {
            kind: t.edge().kind,
            phase,
            pre: Complex64::new(0.0, -(t.edge().sign() as f64) * nab),
            bound: phase.abs() + children.iter().map(|c| c.bound).sum::<f64>(),
            children,
        }
    }

    fn value(&self, s: f64, tol: f64, worst: &mut f64) -> Complex64 {
        let mut f = |u: f64| {
            let mut v = Complex64::from_polar(1.0, u * self.phase);
            for c in &self.children {
                v *= c.value(u, tol, worst);
            }
            v
        };
        match self.kind {
            EdgeKind::T1 => f(s),
            EdgeKind::T2 => {
                let (v, e) = integrate(&mut f, 0.0, s, self.bound, tol);
                *worst = worst.max(e);
                self.pre * v
            }
        }
    }
}

/// Ground-truth `Π(T)(time)` by nested adaptive quadrature.
pub fn quad_pi_with_estimate(t: &Tree, eq: &EquationSpec, fa: &FreqAssignment, time: f64, tol: f64) -> (Complex64, f64) {
    let n = t.max_symbol().max(fa.keys().last().copied().unwrap_or(0)) as usize;
    let mut x = vec![0.0; n + 1];
    for (&s, &v) in fa {
        x[s as usize] = v as f64;
    }
    let mut worst = 0.0;
    let v = NumTree::new(t, eq, &x).value(time, tol, &mut worst);
    (v, worst)
}

/// `Π(T)(time)` to absolute tolerance 1e-12 per level.
pub fn quad_pi(t: &Tree, eq: &EquationSpec, fa: &FreqAssignment, time: f64) -> Result<Complex64, OracleError> {
    let tol = 1e-12;
    let (v, e) = quad_pi_with_estimate(t, eq, fa, time, tol);
    if e > tol {
        return Err(OracleError::Tolerance { value: v, achieved: e, tol });
    }
    Ok(v)
}

pub fn eval_exppoly(e: &ExpPoly, fa: &FreqAssignment, time: f64) -> Result<Complex64, OracleError> {
    Ok(e.eval(fa, time)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderFit {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
    /// Root mean square residual of the log-log fit.
    pub residual: f64,
}

/// Least-squares slope of `log err` against `log step`.
pub fn fit_order(errs: &[(f64, f64)]) -> Result<OrderFit, OracleError> {
    if errs.len() < 4 {
        return Err(OracleError::TooFewPoints(errs.len()));
    }
    for w in errs.windows(2) {
        if w[1].0 >= w[0].0 {
            return Err(OracleError::Unordered);
        }
    }
    for &(h, e) in errs {
        if !(e.is_finite() && e > 0.0) {
            return Err(OracleError::BadError(e, h));
        }
    }
    let xs: Vec<f64> = errs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let res = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum::<f64>() / n;
    Ok(OrderFit {
        steps: errs.iter().map(|p| p.0).collect(),
        errors: errs.iter().map(|p| p.1).collect(),
        slope,
        residual: res.sqrt(),
    })
}

/// Times `2^{-4}, …, 2^{-10}`.
pub fn default_times() -> Vec<f64> {
    (4..=10).map(|j| 0.5f64.powi(j)).collect()
}

/// `|Π(T) - Π^{n,r}(T)|` at each time, quadrature on the left.
pub fn scheme_errors(t: &Tree, n: i64, r: i64, eq: &EquationSpec, fa: &FreqAssignment, times: &[f64]) -> Result<Vec<(f64, f64)>, OracleError> {
    let s = SchemeBuilder::new(n, eq).with_zero_test(ZeroTest::At(fa)).tree(t, r)?;
    let c = s.compile();
    let mut x = vec![0.0; (t.max_symbol().max(s.max_symbol()) + 1) as usize];
    for (&k, &v) in fa {
        if (k as usize) < x.len() {
            x[k as usize] = v as f64;
        }
    }
    let mut out = Vec::new();
    for &h in times {
        let exact = quad_pi(t, eq, fa, h)?;
        out.push((h, (exact - c.eval(&x, h)?).norm()));
    }
    Ok(out)
}

/// Draws tuples in `[-range, range]` until every denominator of the scheme and of `Π` is nonzero
/// and every dominant part of the tree's words is nonzero. Tuples at which every local error
/// term vanishes are skipped too: the scheme is exact or of higher order there, so no slope can be fitted.
pub fn nonresonant_tuple<R: Rng>(t: &Tree, n: i64, r: i64, eq: &EquationSpec, range: i64, rng: &mut R) -> Result<FreqAssignment, OracleError> {
    let sym = SchemeBuilder::new(n, eq).tree(t, r)?;
    let exact = pi_exact(t, eq, ZeroTest::Symbolic);
    let mut dens: Vec<_> = sym.denominator_factors().into_iter().collect();
    dens.extend(exact.denominator_factors());
    for t2 in crate::phase::t2_nodes(t) {
        if let Ok(d) = crate::phase::dominant_tree(t2, eq) {
            dens.push(d);
        }
    }
    let errs: Vec<_> = crate::scheme::local_error_terms(t, n, r, eq)?.iter().map(|e| e.expanded()).collect();
    let draws = 1000;
    for _ in 0..draws {
        let fa: FreqAssignment = (1..=t.max_symbol()).map(|s| (s, rng.gen_range(-range..=range))).collect();
        let generic = errs.is_empty() || errs.iter().any(|e| !num::Zero::is_zero(&e.eval_exact(&fa)));
        if generic && dens.iter().all(|d| !num::Zero::is_zero(&d.eval_exact(&fa))) {
            return Ok(fa);
        }
    }
    Err(OracleError::NoTuple(draws))
}
