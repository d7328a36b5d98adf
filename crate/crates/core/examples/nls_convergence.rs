//! First-order NLS stepper: local and global errors against the reference solution.
use resonance::nls::{convergence_study, StepperConfig};

fn main() {
    let cfg = StepperConfig::smooth(1);
    let rep = convergence_study(&cfg, true).unwrap();
    print!("{}", rep.to_csv());
    println!("local order {:.3}", rep.local_slope().unwrap_or(f64::NAN));
    println!("global order {:.3} (heuristic)", rep.global_slope().unwrap_or(f64::NAN));
    println!("reference cross-check: {:.1e}", rep.cross_check.difference);
}
