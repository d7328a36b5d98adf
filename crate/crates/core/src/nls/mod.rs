//! Cubic NLS on the 1-D torus with the generated schemes as one-step maps.

mod reference;
#[cfg(test)]
mod tests;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num::complex::Complex64;
use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use reference::{collocation_solve, cross_validate, cubic_term, rk4_solve, CrossCheck, REFERENCE_STEP};

use crate::equation::{generate_trees, series_weights, EquationError, EquationSpec};
use crate::freq_poly::FreqVector;
use crate::oracle::{fit_order, OracleError, OrderFit};
use crate::scheme::{CompiledExpPoly, ExpPoly, SchemeBuilder, SchemeError, ZeroTest};
use crate::tree::Tree;

#[derive(Debug, thiserror::Error)]
pub enum NlsError {
    #[error("mode count {0} must be even and at least 8")]
    Modes(usize),
    #[error("need gamma > 1/2, got {0}")]
    Gamma(f64),
    #[error("step size must be positive, got {0}")]
    Tau(f64),
    #[error("run diverged at step {step}: norm {norm:e}")]
    Diverged { step: usize, norm: f64 },
    #[error("reference cross-validation failed: difference {0:e}")]
    CrossCheck(f64),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Equation(#[from] EquationError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Fourier coefficients `u_k`, `k ∈ [-N/2, N/2-1]`, stored at `k + N/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridState {
    pub modes: usize,
    pub coeffs: Vec<Complex64>,
}

impl GridState {
    pub fn zeros(modes: usize) -> Result<Self, NlsError> {
        if modes < 8 || modes % 2 == 1 {
            return Err(NlsError::Modes(modes));
        }
        Ok(GridState { modes, coeffs: vec![Complex64::new(0.0, 0.0); modes] })
    }

    pub fn kmin(&self) -> i64 {
        -(self.modes as i64) / 2
    }

    pub fn kmax(&self) -> i64 {
        self.modes as i64 / 2 - 1
    }

    pub fn wavenumbers(&self) -> impl Iterator<Item = i64> {
        self.kmin()..=self.kmax()
    }

    pub fn get(&self, k: i64) -> Complex64 {
        self.coeffs[(k - self.kmin()) as usize]
    }

    pub fn set(&mut self, k: i64, v: Complex64) {
        let i = (k - self.kmin()) as usize;
        self.coeffs[i] = v;
    }

    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `(Σ (1+k²)^s |u_k|²)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.wavenumbers().map(|k| (1.0 + (k * k) as f64).powf(s) * self.get(k).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn diff(&self, o: &GridState) -> GridState {
        GridState { modes: self.modes, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// `v_k = e^{itk²} u_k`.
    pub fn twist(&self, t: f64) -> GridState {
        let mut out = self.clone();
        for k in self.wavenumbers() {
            out.set(k, self.get(k) * Complex64::from_polar(1.0, t * (k * k) as f64));
        }
        out
    }

    pub fn untwist(&self, t: f64) -> GridState {
        self.twist(-t)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataProfile {
    /// `a e^{-k²/8} e^{iθ_k}`.
    Smooth { amplitude: f64 },
    /// `a (1+|k|)^{-γ-1/2} e^{iθ_k}`.
    Sobolev { amplitude: f64, gamma: f64 },
    /// `a` at the single mode `k`.
    SingleMode { amplitude: f64, k: i64 },
    Zero,
}

impl DataProfile {
    pub fn generate(&self, modes: usize, seed: u64) -> Result<GridState, NlsError> {
        let mut g = GridState::zeros(modes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in g.wavenumbers().collect::<Vec<_>>() {
            let theta = rng.gen::<f64>() * 2.0 * PI;
            let mag = match *self {
                DataProfile::Smooth { amplitude } => amplitude * (-((k * k) as f64) / 8.0).exp(),
                DataProfile::Sobolev { amplitude, gamma } => {
                    if gamma <= 0.5 {
                        return Err(NlsError::Gamma(gamma));
                    }
                    amplitude * (1.0 + k.abs() as f64).powf(-gamma - 0.5)
                }
                DataProfile::SingleMode { amplitude, k: k0 } => {
                    if k == k0 {
                        g.set(k, Complex64::new(amplitude, 0.0));
                    }
                    continue;
                }
                DataProfile::Zero => 0.0,
            };
            g.set(k, Complex64::from_polar(mag, theta));
        }
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    /// Scheme order: trees of order at most `r`.
    pub r: i64,
    /// Assumed regularity `n`.
    pub n: i64,
    pub modes: usize,
    pub data: DataProfile,
    #[serde(default)]
    pub seed: u64,
    /// Final time of the global runs.
    pub t_final: f64,
    /// Step sizes, decreasing.
    pub taus: Vec<f64>,
    /// Scale of the cubic term; `0` gives the linear flow.
    #[serde(default = "one")]
    pub coupling: f64,
}

fn one() -> f64 {
    1.0
}

impl StepperConfig {
    pub fn smooth(r: i64) -> Self {
        StepperConfig {
            r,
            n: 2,
            modes: 32,
            data: DataProfile::Smooth { amplitude: 0.2 },
            seed: 1,
            t_final: 0.25,
            taus: (6..=11).map(|j| 0.5f64.powi(j)).collect(),
            coupling: 1.0,
        }
    }
}

/// Above this many tuples a tree is evaluated on the fly instead of tabulated.
const TABLE_LIMIT: usize = 1_000_000;

/// Integer linear form over the leaf symbols.
#[derive(Clone, Debug)]
struct Linear(Vec<(usize, i64)>);

impl Linear {
    fn new(f: &FreqVector) -> Linear {
        Linear(f.coefficients().iter().map(|(&s, &c)| (s as usize, c)).collect())
    }

    fn eval(&self, k: &[i64]) -> i64 {
        self.0.iter().map(|&(s, c)| c * k[s]).sum()
    }
}

/// Denominator factors of a scheme, checked per tuple for the resonant fallback.
struct Fallback {
    factors: Vec<crate::freq_poly::CompiledPoly>,
    cache: HashMap<Vec<bool>, CompiledExpPoly>,
}

struct TreeStep {
    tree: Tree,
    n: i64,
    r: i64,
    weight: f64,
    symbols: usize,
    scheme: ExpPoly,
    compiled: CompiledExpPoly,
    nodes: Vec<Linear>,
    root: Linear,
    data: Vec<(Linear, bool)>,
    fallback: Fallback,
    table: Option<Vec<(usize, Vec<usize>, Complex64)>>,
}

/// One-step map `u(0) ↦ u(τ)` built from `Π^{n,r}` of every tree of order at most `r`.
pub struct Stepper {
    pub r: i64,
    pub n: i64,
    modes: usize,
    coupling: f64,
    eq: EquationSpec,
    trees: Vec<TreeStep>,
    tau: Option<f64>,
}

fn all_nodes<'a>(t: &'a Tree, out: &mut Vec<&'a Tree>) {
    out.push(t);
    for c in t.children() {
        all_nodes(c, out);
    }
}

impl Stepper {
    pub fn new(r: i64, n: i64, modes: usize, coupling: f64) -> Result<Stepper, NlsError> {
        GridState::zeros(modes)?;
        let eq = EquationSpec::cubic_nls();
        let ts = generate_trees(&eq, r.max(0) as usize);
        let mut trees = Vec::new();
        for wt in series_weights(&ts, &eq)? {
            let scheme = SchemeBuilder::new(n, &eq).tree(&wt.tree, r)?;
            let mut nodes = Vec::new();
            all_nodes(&wt.tree, &mut nodes);
            let mut factors: Vec<_> = scheme.denominator_factors().into_iter().collect();
            factors.sort();
            let order = wt.tree.order() as i32;
            trees.push(TreeStep {
                weight: wt.weight.to_f64().unwrap_or(f64::NAN) * coupling.powi(order),
                symbols: wt.tree.max_symbol() as usize,
                compiled: scheme.compile(),
                nodes: nodes.iter().filter(|x| !x.is_leaf()).map(|x| Linear::new(x.freq())).collect(),
                root: Linear::new(wt.tree.freq()),
                data: wt.upsilon.factors.iter().map(|(f, c)| (Linear::new(f), *c)).collect(),
                fallback: Fallback { factors: factors.iter().map(|p| p.compile()).collect(), cache: HashMap::new() },
                scheme,
                n,
                r,
                tree: wt.tree,
                table: None,
            });
        }
        Ok(Stepper { r, n, modes, coupling, eq, trees, tau: None })
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn schemes(&self) -> impl Iterator<Item = (&Tree, &ExpPoly, f64)> {
        self.trees.iter().map(|t| (&t.tree, &t.scheme, t.weight))
    }

    /// Precomputes the coefficient tables of the small trees for step size `tau`.
    pub fn prepare(&mut self, tau: f64) -> Result<(), NlsError> {
        if tau <= 0.0 {
            return Err(NlsError::Tau(tau));
        }
        if self.tau == Some(tau) {
            return Ok(());
        }
        let (modes, eq) = (self.modes, &self.eq);
        for ts in &mut self.trees {
            ts.table = None;
            if (modes as f64).powi(ts.symbols as i32) <= TABLE_LIMIT as f64 {
                let mut table = Vec::new();
                for_each_tuple(ts, modes, eq, tau, &mut |out, idx, c| table.push((out, idx.to_vec(), c)));
                ts.table = Some(table);
            }
        }
        self.tau = Some(tau);
        Ok(())
    }

    pub fn step(&mut self, u: &GridState, tau: f64) -> Result<GridState, NlsError> {
        self.prepare(tau)?;
        let mut out = GridState::zeros(self.modes)?;
        let (modes, eq) = (self.modes, &self.eq);
        for ts in &mut self.trees {
            if ts.weight == 0.0 {
                continue;
            }
            let w = ts.weight;
            let data = ts.data.iter().map(|(_, c)| *c).collect::<Vec<_>>();
            let mut add = |o: usize, idx: &[usize], c: Complex64| {
                let mut v = c * w;
                for (i, &conj) in idx.iter().zip(&data) {
                    let x = u.coeffs[*i];
                    v *= if conj { x.conj() } else { x };
                }
                out.coeffs[o] += v;
            };
            match &ts.table {
                Some(t) => {
                    for (o, idx, c) in t {
                        add(*o, idx, *c);
                    }
                }
                None => for_each_tuple(ts, modes, eq, tau, &mut add),
            }
        }
        Ok(out)
    }

    pub fn run(&mut self, u0: &GridState, tau: f64, steps: usize) -> Result<GridState, NlsError> {
        let mut u = u0.clone();
        let n0 = u0.sobolev_norm(0.0).max(1e-300);
        for s in 0..steps {
            u = self.step(&u, tau)?;
            let nn = u.sobolev_norm(0.0);
            if !u.is_finite() || nn > 1e3 * n0 {
                return Err(NlsError::Diverged { step: s + 1, norm: nn });
            }
        }
        Ok(u)
    }
}

/// Calls `f(output index, data indices, Π^{n,r}(T)(τ; k))` for every tuple whose node
/// frequencies stay in the grid.
fn for_each_tuple(ts: &mut TreeStep, modes: usize, eq: &EquationSpec, tau: f64, f: &mut dyn FnMut(usize, &[usize], Complex64)) {
    let kmin = -(modes as i64) / 2;
    let kmax = modes as i64 / 2 - 1;
    let l = ts.symbols;
    let mut k = vec![kmin; l + 1];
    k[0] = 0;
    let mut x = vec![0.0; l + 1];
    let mut idx = vec![0usize; ts.data.len()];
    if l == 0 {
        return;
    }
    loop {
        if ts.nodes.iter().all(|n| (kmin..=kmax).contains(&n.eval(&k))) {
            for (s, v) in x.iter_mut().zip(&k) {
                *s = *v as f64;
            }
            let val = match ts.compiled.eval(&x, tau) {
                Ok(v) => v,
                Err(_) => resonant_value(ts, eq, &k, &x, tau),
            };
            for (i, (lin, _)) in idx.iter_mut().zip(&ts.data) {
                *i = (lin.eval(&k) - kmin) as usize;
            }
            f((ts.root.eval(&k) - kmin) as usize, &idx, val);
        }
        // odometer over k_1..k_l
        let mut j = 1;
        loop {
            if j > l {
                return;
            }
            if k[j] < kmax {
                k[j] += 1;
                break;
            }
            k[j] = kmin;
            j += 1;
        }
    }
}

fn resonant_value(ts: &mut TreeStep, eq: &EquationSpec, k: &[i64], x: &[f64], tau: f64) -> Complex64 {
    let key: Vec<bool> = ts.fallback.factors.iter().map(|p| p.eval(x).abs() < 0.5).collect();
    let fa: crate::oracle::FreqAssignment = (1..k.len()).map(|s| (s as u32, k[s])).collect();
    let build = || {
        SchemeBuilder::new(ts.n, eq)
            .with_zero_test(ZeroTest::At(&fa))
            .tree(&ts.tree, ts.r)
            .expect("scheme was built once already")
            .compile()
    };
    if let Some(c) = ts.fallback.cache.get(&key) {
        if let Ok(v) = c.eval(x, tau) {
            return v;
        }
        // a denominator only present after the fallback vanishes too
        return build().eval(x, tau).expect("zero test removes every vanishing denominator");
    }
    let c = build();
    let v = c.eval(x, tau).expect("zero test removes every vanishing denominator");
    ts.fallback.cache.insert(key, c);
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyRow {
    pub tau: f64,
    pub local_err_l2: f64,
    pub local_err_h1: f64,
    pub global_err_l2: Option<f64>,
    /// `log2` of the ratio to the previous local error.
    pub slope_running: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct StudyReport {
    pub config: StepperConfig,
    pub rows: Vec<StudyRow>,
    pub local: Result<OrderFit, String>,
    /// Heuristic: no global theorem backs this rate.
    pub global: Option<Result<OrderFit, String>>,
    pub cross_check: CrossCheck,
    /// Step sizes whose global run blew up.
    pub diverged: Vec<f64>,
}

impl StudyReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("tau,local_err_L2,local_err_H1,global_err_L2,slope_running\n");
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.6e}")).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(s, "{:.6e},{:.6e},{:.6e},{},{}", r.tau, r.local_err_l2, r.local_err_h1, opt(r.global_err_l2), opt(r.slope_running));
        }
        s
    }

    pub fn local_slope(&self) -> Option<f64> {
        self.local.as_ref().ok().map(|f| f.slope)
    }

    pub fn global_slope(&self) -> Option<f64> {
        self.global.as_ref().and_then(|g| g.as_ref().ok()).map(|f| f.slope)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let fit = |f: &Result<OrderFit, String>| match f {
            Ok(f) => serde_json::json!({"slope": f.slope, "residual": f.residual}),
            Err(e) => serde_json::json!({"error": e}),
        };
        serde_json::json!({
            "config": self.config,
            "rows": self.rows,
            "local_fit": fit(&self.local),
            "global_fit_heuristic": self.global.as_ref().map(fit),
            "cross_check": self.cross_check,
            "diverged": self.diverged,
        })
    }
}

/// Local errors (one step from the data) for every `τ`; global errors up to `t_final` when `global`.
pub fn convergence_study(cfg: &StepperConfig, global: bool) -> Result<StudyReport, NlsError> {
    if cfg.taus.iter().any(|&t| t <= 0.0) {
        return Err(NlsError::Tau(cfg.taus.iter().cloned().fold(f64::INFINITY, f64::min)));
    }
    let u0 = cfg.data.generate(cfg.modes, cfg.seed)?;
    let tmax = cfg.taus.iter().cloned().fold(0.0, f64::max);
    let cross_check = cross_validate(&u0, tmax, cfg.coupling, 1e-8)?;
    let mut st = Stepper::new(cfg.r, cfg.n, cfg.modes, cfg.coupling)?;
    let reference_final = global.then(|| collocation_solve(&u0, cfg.t_final, cfg.coupling, REFERENCE_STEP));
    let mut rows: Vec<StudyRow> = Vec::new();
    let mut diverged = Vec::new();
    for &tau in &cfg.taus {
        let e = st.step(&u0, tau)?.diff(&collocation_solve(&u0, tau, cfg.coupling, REFERENCE_STEP));
        let global_err_l2 = match &reference_final {
            Some(re) => match st.run(&u0, tau, (cfg.t_final / tau).round() as usize) {
                Ok(u) => Some(u.diff(re).sobolev_norm(0.0)),
                Err(NlsError::Diverged { .. }) => {
                    diverged.push(tau);
                    None
                }
                Err(e) => return Err(e),
            },
            None => None,
        };
        let local_err_l2 = e.sobolev_norm(0.0);
        let slope_running = rows.last().map(|p| (p.local_err_l2 / local_err_l2).log2() / (p.tau / tau).log2());
        rows.push(StudyRow { tau, local_err_l2, local_err_h1: e.sobolev_norm(1.0), global_err_l2, slope_running });
    }
    let local = fit_order(&rows.iter().map(|r| (r.tau, r.local_err_l2)).collect::<Vec<_>>()).map_err(|e| e.to_string());
    let global = global.then(|| {
        let pts: Vec<_> = rows.iter().filter_map(|r| r.global_err_l2.map(|g| (r.tau, g))).collect();
        fit_order(&pts).map_err(|e| e.to_string())
    });
    Ok(StudyReport { config: cfg.clone(), rows, local, global, cross_check, diverged })
}
