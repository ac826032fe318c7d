use std::time::Instant;

use selberg_core::identities::{verify, IdentityCase, PadicMode};

fn run(label: &str, case: IdentityCase) {
    let t = Instant::now();
    match verify(&case) {
        Ok(rep) => println!(
            "{label}: {rep} sigma_rel={:.4} samples={} notes={:?} [{:.2}s]",
            if rep.rhs.norm() > 0.0 { rep.mc_sigma / rep.rhs.norm() } else { 0.0 },
            rep.samples,
            rep.notes,
            t.elapsed().as_secs_f64()
        ),
        Err(e) => println!("{label}: ERROR {e} [{:.2}s]", t.elapsed().as_secs_f64()),
    }
}

#[test]
fn probe() {
    run("thm n3 p5 mc 200k", IdentityCase::Theorem {
        p: 5, n: 3, a: 0.15, b: 0.15, c: 0.05,
        mode: PadicMode::Mc { samples: 200_000, seed: 1 },
    });
}
