//! The algebraic and analytic property checks, on the small universe.
use resonance::suite::property_suite;

fn main() {
    for r in property_suite(7, true) {
        println!("{} {} ({:.2}s): {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.seconds, r.detail);
    }
}
