use approxcara::caratheodory::{approx_caratheodory, error_bound, AtomOracle, Method, NormKind, SolverConfig, StopRule};
use approxcara::tensor::{
    check_hanner, estimate_modulus_of_smoothness, random_hermitian, schatten_directional_derivative, schatten_norm,
    smoothness_bound, ComplexMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn(usize) -> Result<String, String>;

fn envelope(samples: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut runs = 0;
    for (p, norm, oracle) in [
        (2.0, NormKind::Lp, AtomOracle::basis_atoms(1, 4)),
        (4.0 / 3.0, NormKind::Schatten, AtomOracle::diagonal_basis_atoms(1, 4)),
        (4.0, NormKind::Schatten, AtomOracle::diagonal_basis_atoms(1, 4)),
    ] {
        let oracle = oracle.map_err(|e| e.to_string())?;
        let diam = oracle.diameter(p, norm).map_err(|e| e.to_string())?;
        for _ in 0..samples / 10 {
            let w: Vec<f64> = (0..oracle.len()).map(|_| rng.random_range(0.0..1.0)).collect();
            let total: f64 = w.iter().sum();
            let (r, c) = oracle.shape();
            let mut target = ComplexMatrix::zeros(r, c);
            for (a, wi) in oracle.atoms().iter().zip(&w) {
                target.add_scaled(a.value(), wi / total);
            }
            for method in [Method::Ordered, Method::Greedy] {
                let cfg = SolverConfig { p, norm, method, stop: StopRule::k_max(300), seed: 0 };
                let out = approx_caratheodory(&target, &oracle, &cfg).map_err(|e| e.to_string())?;
                for rec in &out.trace.records {
                    let b = error_bound(rec.k, diam, p, norm).map_err(|e| e.to_string())?;
                    if rec.error > b + 1e-9 {
                        return Err(format!("p={p} {norm} {method} k={}: {} > {b}", rec.k, rec.error));
                    }
                }
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} runs within the envelope"))
}

fn hanner(samples: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for p in [1.0, 1.25, 4.0 / 3.0, 2.0, 4.0, 6.0] {
        for _ in 0..samples {
            let (a, b) = (random_hermitian(4, &mut rng), random_hermitian(4, &mut rng));
            let r = check_hanner(&a, &b, p).map_err(|e| e.to_string())?;
            let ok = if p >= 4.0 {
                r >= -1e-9
            } else if p <= 4.0 / 3.0 {
                r <= 1e-9
            } else {
                r.abs() <= 1e-9
            };
            if !ok {
                return Err(format!("p={p}: residual {r:e}"));
            }
        }
    }
    Ok(format!("{} pairs", 6 * samples))
}

fn smoothness(samples: usize) -> Result<String, String> {
    for p in [4.0 / 3.0, 2.0, 4.0, 6.0] {
        for t in [0.01, 0.1, 0.5] {
            let est = estimate_modulus_of_smoothness(p, t, samples, 3, 4).map_err(|e| e.to_string())?;
            let bound = smoothness_bound(p, t).map_err(|e| e.to_string())?;
            if est > bound + 1e-9 {
                return Err(format!("p={p} t={t}: {est} > {bound}"));
            }
        }
    }
    Ok("12 (p, t) cells below the closed form".into())
}

fn derivative(samples: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for p in [1.2, 4.0 / 3.0, 2.0, 4.0, 7.0] {
        for _ in 0..samples {
            let x = random_hermitian(4, &mut rng);
            let n = schatten_norm(&x, p).map_err(|e| e.to_string())?;
            let d = schatten_directional_derivative(&x, &x, p).map_err(|e| e.to_string())?;
            if (d - n).abs() > 1e-10 * n {
                return Err(format!("p={p}: D_X = {d}, norm {n}"));
            }
        }
    }
    Ok(format!("{} matrices", 5 * samples))
}

pub fn run_all(quick: bool) -> bool {
    let samples = if quick { 100 } else { 1000 };
    let checks: [(&str, Check); 4] =
        [("envelope", envelope), ("hanner", hanner), ("smoothness", smoothness), ("derivative", derivative)];
    let mut ok = true;
    for (name, f) in checks {
        match f(samples) {
            Ok(msg) => println!("ok    {name}: {msg}"),
            Err(msg) => {
                ok = false;
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    ok
}
