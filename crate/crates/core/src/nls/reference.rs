//! High-accuracy solutions of the Galerkin-truncated NLS in the twisted variable
//! `v_k = e^{itk²} u_k`, which solves `v_k' = -i c e^{itk²} Σ_{k = -k1+k2+k3} ū_{k1} u_{k2} u_{k3}`.

use num::complex::Complex64;

use super::{GridState, NlsError};

/// `Σ_{k=-k1+k2+k3} ū_{k1} u_{k2} u_{k3}` over the grid, with `k3 = k + k1 - k2`.
pub fn cubic_term(u: &GridState) -> GridState {
    let mut out = u.clone();
    let (lo, hi) = (u.kmin(), u.kmax());
    for k in lo..=hi {
        let mut acc = Complex64::new(0.0, 0.0);
        for k1 in lo..=hi {
            let a = u.get(k1).conj();
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k2 in lo..=hi {
                let k3 = k + k1 - k2;
                if (lo..=hi).contains(&k3) {
                    acc += a * u.get(k2) * u.get(k3);
                }
            }
        }
        out.set(k, acc);
    }
    out
}

fn rhs(t: f64, v: &GridState, coupling: f64) -> GridState {
    let n = cubic_term(&v.untwist(t)).twist(t);
    GridState { modes: v.modes, coeffs: n.coeffs.iter().map(|c| c * Complex64::new(0.0, -coupling)).collect() }
}

fn axpy(v: &GridState, h: f64, ks: &[(f64, &GridState)]) -> GridState {
    let mut out = v.clone();
    for (w, k) in ks {
        for (o, x) in out.coeffs.iter_mut().zip(&k.coeffs) {
            *o += x * (h * w);
        }
    }
    out
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
fn gauss_legendre(s: usize) -> (Vec<f64>, Vec<f64>) {
    let mut c = Vec::new();
    let mut b = Vec::new();
    for i in 0..s {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (s as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=s {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = s as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        c.push((1.0 - x) / 2.0);
        b.push(1.0 / ((1.0 - x * x) * dp * dp));
    }
    (c, b)
}

/// Collocation matrix `A_ij = ∫_0^{c_i} ℓ_j`.
fn collocation_matrix(c: &[f64], b: &[f64]) -> Vec<Vec<f64>> {
    let lagrange = |j: usize, x: f64| {
        c.iter().enumerate().filter(|&(m, _)| m != j).map(|(_, &cm)| (x - cm) / (c[j] - cm)).product::<f64>()
    };
    c.iter()
        .map(|&ci| (0..c.len()).map(|j| ci * c.iter().zip(b).map(|(&cm, &bm)| bm * lagrange(j, ci * cm)).sum::<f64>()).collect())
        .collect()
}

/// Six-stage Gauss collocation (order 12) in the twisted variable with substeps at most `h_max`.
pub fn collocation_solve(u0: &GridState, t_final: f64, coupling: f64, h_max: f64) -> GridState {
    const S: usize = 6;
    let (c, b) = gauss_legendre(S);
    let a = collocation_matrix(&c, &b);
    let steps = (t_final / h_max).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    let mut v = u0.clone();
    for n in 0..steps {
        let t = n as f64 * h;
        let f0 = rhs(t, &v, coupling);
        let mut k: Vec<GridState> = vec![f0; S];
        for _ in 0..60 {
            let next: Vec<GridState> = (0..S)
                .map(|i| {
                    let terms: Vec<(f64, &GridState)> = (0..S).map(|j| (a[i][j], &k[j])).collect();
                    rhs(t + c[i] * h, &axpy(&v, h, &terms), coupling)
                })
                .collect();
            let change = next
                .iter()
                .zip(&k)
                .flat_map(|(x, y)| x.coeffs.iter().zip(&y.coeffs).map(|(p, q)| (p - q).norm()))
                .fold(0.0, f64::max);
            k = next;
            if change * h < 1e-17 {
                break;
            }
        }
        let terms: Vec<(f64, &GridState)> = b.iter().zip(&k).map(|(&w, x)| (w, x)).collect();
        v = axpy(&v, h, &terms);
    }
    v.untwist(t_final)
}

/// Classical Runge-Kutta in the twisted variable.
pub fn rk4_solve(u0: &GridState, t_final: f64, coupling: f64, steps: usize) -> GridState {
    let h = t_final / steps as f64;
    let mut v = u0.clone();
    for n in 0..steps {
        let t = n as f64 * h;
        let k1 = rhs(t, &v, coupling);
        let k2 = rhs(t + h / 2.0, &axpy(&v, h / 2.0, &[(1.0, &k1)]), coupling);
        let k3 = rhs(t + h / 2.0, &axpy(&v, h / 2.0, &[(1.0, &k2)]), coupling);
        let k4 = rhs(t + h, &axpy(&v, h, &[(1.0, &k3)]), coupling);
        v = axpy(&v, h / 6.0, &[(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)]);
    }
    v.untwist(t_final)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CrossCheck {
    pub checkpoint: f64,
    pub difference: f64,
    pub tolerance: f64,
}

impl CrossCheck {
    pub fn passed(&self) -> bool {
        self.difference <= self.tolerance
    }
}

/// Collocation against fine-step RK4 at one checkpoint.
pub fn cross_validate(u0: &GridState, checkpoint: f64, coupling: f64, tolerance: f64) -> Result<CrossCheck, NlsError> {
    let a = collocation_solve(u0, checkpoint, coupling, REFERENCE_STEP);
    let b = rk4_solve(u0, checkpoint, coupling, (checkpoint / 2f64.powi(-14)).ceil() as usize);
    let cc = CrossCheck { checkpoint, difference: a.diff(&b).sobolev_norm(0.0), tolerance };
    if cc.passed() {
        Ok(cc)
    } else {
        Err(NlsError::CrossCheck(cc.difference))
    }
}

/// Substep of the reference solution.
pub const REFERENCE_STEP: f64 = 1.0 / 4096.0;
