//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use approxcara::caratheodory::{approx_caratheodory, error_bound, required_k, required_k_real, AtomOracle, Method, NormKind, SolverConfig, StopRule};
use approxcara::decomp::{symmetrize, DenseTensor, OmegaGDecomposition};
use approxcara::experiment::{run_experiment, run_separation_scan, ExperimentConfig, ExperimentReport, InstanceKind, OneOrMany, ScanFamily};
use approxcara::gauge::{approx_sqrt_pipeline, budget_nn, budget_puri, budget_rank, budget_schatten1, budget_sep, mu1_diagonal_exact, mu_sqrt_bounds_diagonal};
use approxcara::tensor::{
    check_hanner, estimate_modulus_of_smoothness, lp_directional_derivative, lp_norm, random_hermitian, schatten_directional_derivative,
    schatten_norm, smoothness_bound, ComplexMatrix,
};
use approxcara::wsc::{GroupAction, Wsc};
use approxcara::{Complex64, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn convex_target(oracle: &AtomOracle, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let w: Vec<f64> = (0..oracle.len()).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = w.iter().sum();
    let (r, c) = oracle.shape();
    let mut m = ComplexMatrix::zeros(r, c);
    for (a, wi) in oracle.atoms().iter().zip(&w) {
        m.add_scaled(a.value(), wi / total);
    }
    m
}

fn envelope() -> Outcome {
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut runs = 0;
    let setups: [(f64, NormKind); 4] = [(2.0, NormKind::Lp), (4.0 / 3.0, NormKind::Schatten), (2.0, NormKind::Schatten), (4.0, NormKind::Schatten)];
    for d in [3usize, 5, 8] {
        for (p, norm) in setups {
            let oracle = match norm {
                NormKind::Lp => AtomOracle::basis_atoms(1, d),
                NormKind::Schatten => AtomOracle::diagonal_basis_atoms(1, d),
            }
            .map_err(|e| e.to_string())?;
            let diam = oracle.diameter(p, norm).map_err(|e| e.to_string())?;
            for seed in 0..50u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 * d as u64 + seed);
                let target = convex_target(&oracle, &mut rng);
                for method in [Method::Ordered, Method::Greedy] {
                    let cfg = SolverConfig { p, norm, method, stop: StopRule::k_max(1000), seed };
                    let out = approx_caratheodory(&target, &oracle, &cfg).map_err(|e| e.to_string())?;
                    runs += 1;
                    for r in &out.trace.records {
                        let b = error_bound(r.k, diam, p, norm).unwrap();
                        worst = worst.max(r.error - b);
                        ensure(r.error <= b + 1e-9, || format!("d={d} p={p} {norm} {method} seed={seed} k={}: {} > {b}", r.k, r.error))?;
                    }
                }
            }
        }
    }
    Ok(format!("{runs} runs, max(error - bound) = {worst:.3e}"))
}

fn hanner() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut max2: f64 = 0.0;
    for p in [1.0, 1.25, 4.0 / 3.0, 2.0, 4.0, 6.0] {
        for i in 0..1000 {
            let a = random_hermitian(4, &mut rng);
            let b = random_hermitian(4, &mut rng);
            let r = check_hanner(&a, &b, p).map_err(|e| e.to_string())?;
            if p >= 4.0 {
                ensure(r >= -1e-9, || format!("p={p} pair {i}: residual {r:e}"))?;
            } else if p <= 4.0 / 3.0 {
                ensure(r <= 1e-9, || format!("p={p} pair {i}: residual {r:e}"))?;
            } else {
                max2 = max2.max(r.abs());
                ensure(r.abs() <= 1e-9, || format!("p=2 pair {i}: residual {r:e}"))?;
            }
        }
    }
    Ok(format!("6000 pairs, max |residual| at p=2 = {max2:.2e}"))
}

fn smoothness() -> Outcome {
    let mut slack = f64::INFINITY;
    for p in [4.0 / 3.0, 2.0, 4.0, 6.0] {
        for t in [0.01, 0.1, 0.5] {
            let est = estimate_modulus_of_smoothness(p, t, 1000, 3, 4).map_err(|e| e.to_string())?;
            let bound = smoothness_bound(p, t).map_err(|e| e.to_string())?;
            slack = slack.min(bound - est);
            ensure(est <= bound + 1e-9, || format!("p={p} t={t}: estimate {est} > bound {bound}"))?;
        }
    }
    Ok(format!("12 (p, t) cells, min(bound - estimate) = {slack:.3e}"))
}

fn derivatives() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let h = 1e-6;
    let (mut worst_fd, mut worst_self) = (0.0f64, 0.0f64);
    for p in [1.2, 4.0 / 3.0, 2.0, 4.0, 7.0] {
        for i in 0..200 {
            let x = random_hermitian(4, &mut rng);
            let y = random_hermitian(4, &mut rng);
            let pairs: [(&dyn Fn(&ComplexMatrix) -> f64, f64); 2] = [
                (&|m| schatten_norm(m, p).unwrap(), schatten_directional_derivative(&x, &y, p).unwrap()),
                (&|m| lp_norm(m, p).unwrap(), lp_directional_derivative(&x, &y, p).unwrap()),
            ];
            for (norm, d) in pairs {
                let fd = (norm(&(&x + &y.scale(h))) - norm(&(&x - &y.scale(h)))) / (2.0 * h);
                let rel = (fd - d).abs() / d.abs().max(fd.abs());
                worst_fd = worst_fd.max(rel);
                ensure(rel <= 1e-4, || format!("p={p} pair {i}: derivative {d} vs finite difference {fd}"))?;
            }
            for (n, d) in [
                (schatten_norm(&x, p).unwrap(), schatten_directional_derivative(&x, &x, p).unwrap()),
                (lp_norm(&x, p).unwrap(), lp_directional_derivative(&x, &x, p).unwrap()),
            ] {
                let rel = (d - n).abs() / n;
                worst_self = worst_self.max(rel);
                ensure(rel <= 1e-10, || format!("p={p} pair {i}: D_X = {d} vs norm {n}"))?;
            }
        }
    }
    Ok(format!("2000 pairs, worst finite-difference rel. error {worst_fd:.2e}, worst self-derivative rel. error {worst_self:.2e}"))
}

fn convergence_config() -> ExperimentConfig {
    let mut c = ExperimentConfig::new(InstanceKind::Random, 5);
    c.d = OneOrMany::Many(vec![5, 15]);
    c.samples = 20;
    c.k_max = Some(1000);
    c.seed = 2024;
    c
}

fn convergence_report() -> &'static ExperimentReport {
    static REPORT: OnceLock<ExperimentReport> = OnceLock::new();
    REPORT.get_or_init(|| run_experiment(&convergence_config()).expect("convergence run"))
}

fn convergence() -> Outcome {
    let report = convergence_report();
    let limit = 2f64.exp() * 2f64.sqrt();
    let mut notes = Vec::new();
    for s in &report.series {
        ensure(s.rows.len() == 1000 && s.rows.iter().all(|r| r.count == 20), || format!("d={} {}: incomplete series", s.d, s.method))?;
        for w in s.rows.windows(2).filter(|w| w[1].k > 10) {
            ensure(w[1].mean <= 1.05 * w[0].mean, || format!("d={} {}: mean rises {} -> {} at k={}", s.d, s.method, w[0].mean, w[1].mean, w[1].k))?;
        }
        let ratio = s.rows.iter().map(|r| r.mean * (r.k as f64).sqrt()).fold(0.0, f64::max);
        ensure(ratio <= limit * s.diameter, || format!("d={} {}: max mean·√k = {ratio} exceeds {}", s.d, s.method, limit * s.diameter))?;
        notes.push(format!("d={} {} max mean·√k={ratio:.3}", s.d, s.method));
    }
    for d in [5, 15] {
        let ord = report.series_for(d, Method::Ordered).unwrap().row(100).unwrap().mean;
        let gre = report.series_for(d, Method::Greedy).unwrap().row(100).unwrap().mean;
        ensure(gre <= 1.10 * ord, || format!("d={d}: greedy {gre} vs ordered {ord} at k=100"))?;
        notes.push(format!("d={d} k=100 greedy/ordered={:.3}", gre / ord));
    }
    Ok(notes.join("; "))
}

fn separation() -> Outcome {
    let budget = budget_nn(0.1, 2.0, 1.0, 1).map_err(|e| e.to_string())?.value;
    ensure(budget == 43_679, || format!("budget {budget}"))?;
    let mut problems = Vec::new();
    let euclid = run_separation_scan(ScanFamily::Euclid, &[8, 16, 32], 0.1, 2.0, Method::Greedy).map_err(|e| e.to_string())?;
    let slack = run_separation_scan(ScanFamily::Slack, &[6, 12], 0.1, 2.0, Method::Greedy).map_err(|e| e.to_string())?;
    for (family, table) in [("euclid", &euclid), ("slack", &slack)] {
        for r in &table.rows {
            if r.witness_rank as u64 > budget || r.witness_error > 0.1 {
                problems.push(format!("{family} d={}: witness {} (error {}) vs budget {budget}", r.d, r.witness_rank, r.witness_error));
            }
        }
    }
    let ks: Vec<usize> = euclid.rows.iter().map(|r| r.witness_rank).collect();
    let sk: Vec<usize> = slack.rows.iter().map(|r| r.witness_rank).collect();
    let logs: Vec<f64> = euclid.rows.iter().map(|r| r.log2_d.unwrap()).collect();
    if logs != [3.0, 4.0, 5.0] {
        problems.push(format!("log2 column {logs:?}"));
    }
    let (lo, hi) = (*ks.iter().min().unwrap(), *ks.iter().max().unwrap());
    if hi as f64 >= 2.0 * lo as f64 {
        problems.push(format!("euclid witness sizes {ks:?} vary by {:.2}x across d = 8, 16, 32 (limit 2x)", hi as f64 / lo as f64));
    }
    let summary = format!("euclid witness sizes {ks:?} with log2 d = {logs:?}, slack {sk:?}, budget {budget}");
    if problems.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", problems.join("; ")))
    }
}

fn gauge() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..500 {
        let len = rng.random_range(1..12);
        let d: Vec<f64> = (0..len).map(|_| if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.0..5.0) }).collect();
        let trace: f64 = d.iter().sum();
        let mu = mu1_diagonal_exact(&ComplexMatrix::diagonal(&d)).map_err(|e| e.to_string())?;
        ensure((mu - trace).abs() <= 1e-12 * trace.max(1.0), || format!("matrix {i}: μ_1 = {mu}, trace = {trace}"))?;
        if trace > 0.0 {
            for p in [4.0 / 3.0, 2.0, 4.0] {
                let e = mu_sqrt_bounds_diagonal(&ComplexMatrix::diagonal(&d), p).map_err(|e| e.to_string())?;
                ensure(e.is_consistent(), || format!("matrix {i}, p={p}: {e:?}"))?;
            }
        }
    }
    let mut worst: f64 = 0.0;
    let mut max_k = 0;
    for s in 0..20 {
        let d = 2 + s % 3;
        let oracle = AtomOracle::diagonal_basis_atoms(1, d).map_err(|e| e.to_string())?;
        let mut diag: Vec<f64> = (0..d * d).map(|_| rng.random_range(0.0..1.0)).collect();
        let t: f64 = diag.iter().sum();
        diag.iter_mut().for_each(|x| *x /= t);
        let rho = ComplexMatrix::diagonal(&diag);
        let out = approx_sqrt_pipeline(&rho, 0.5, 2.0, &oracle, Method::Greedy, 1).map_err(|e| e.to_string())?;
        let err = schatten_norm(&(&rho - &out.rho_prime), 2.0).unwrap();
        worst = worst.max(err);
        max_k = max_k.max(out.witness_rank());
        ensure(err <= 0.5, || format!("sample {s}: ‖ρ−ρ'‖ = {err}"))?;
        ensure(out.witness_rank() as u64 <= out.budget.value, || format!("sample {s}: k {} > budget {}", out.witness_rank(), out.budget.value))?;
    }
    Ok(format!("500 diagonals exact; pipeline worst ‖ρ−ρ'‖_2 = {worst:.3}, largest witness {max_k}"))
}

fn random_dec(w: &Wsc, r: usize, dim: usize, rng: &mut ChaCha8Rng) -> OmegaGDecomposition {
    let sites = w.vertex_count();
    OmegaGDecomposition::from_fn(w.clone(), GroupAction::trivial(w), r, vec![dim; sites], |_, _| {
        (0..dim).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    })
    .unwrap()
}

fn symmetrization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut cases = 0;
    let mut worst: f64 = f64::NEG_INFINITY;
    for n in [3usize, 4] {
        let w = Wsc::circle(n).unwrap();
        let g = GroupAction::cyclic_rotation(&w).unwrap();
        // vector sites in ℓ2 (d = 2) and operator sites (2 × 2) in Schatten norms
        for (dim, operator) in [(2usize, false), (4, true)] {
            for t in 0..50 {
                let dec = random_dec(&w, 2, dim, &mut rng);
                let m_prime = dec.evaluate().unwrap();
                let noise: Vec<Complex64> = m_prime
                    .entries()
                    .iter()
                    .map(|z| z + Complex64::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)))
                    .collect();
                let m = DenseTensor::new(m_prime.dims().to_vec(), noise).unwrap().group_average(&g).unwrap();
                ensure(m.is_invariant(&g, 1e-12).unwrap(), || "target not invariant".into())?;
                let (m2, sym) = symmetrize(&m_prime, &g, &dec).map_err(|e| e.to_string())?;
                ensure(sym.check_g_compatibility(1e-10).is_ok(), || format!("n={n} target {t}: not G-compatible"))?;
                ensure(sym.index_set_size() <= dec.index_set_size() * n, || format!("index set {}", sym.index_set_size()))?;
                ensure(sym.evaluate().unwrap().max_abs_diff(&m2) <= 1e-10, || "decomposition does not evaluate to the average".into())?;
                let norms: Vec<(String, f64, f64)> = if operator {
                    let (a, b, c) = (m2.to_operator().unwrap(), m.to_operator().unwrap(), m_prime.to_operator().unwrap());
                    [1.0, 4.0 / 3.0, 2.0, 4.0]
                        .iter()
                        .map(|&p| (format!("S{p}"), schatten_norm(&(&a - &b), p).unwrap(), schatten_norm(&(&c - &b), p).unwrap()))
                        .collect()
                } else {
                    vec![("l2".into(), m2.sub(&m).lp_norm(2.0).unwrap(), m_prime.sub(&m).lp_norm(2.0).unwrap())]
                };
                for (name, after, before) in norms {
                    worst = worst.max(after - before);
                    ensure(after <= before + 1e-10, || format!("n={n} target {t} {name}: {after} > {before}"))?;
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} targets, max(‖M''−M‖ − ‖M'−M‖) = {worst:.3e}"))
}

fn parse_big(v: &serde_json::Value) -> u128 {
    v.as_str().unwrap().parse().unwrap()
}

fn parse_real(v: &serde_json::Value) -> f64 {
    v.as_str().unwrap().parse().unwrap()
}

fn check_budget(name: &str, got: approxcara::Result<u64>, want: u128, real: f64) -> Result<(), String> {
    match got {
        // relative 1e-12 on the integer: exact below 1e12, ulp-limited above
        Ok(v) => ensure((v as f64 - want as f64).abs() <= 1e-12 * want as f64, || format!("{name}: {v} vs {want} (real {real})")),
        Err(Error::Overflow(_)) => ensure(want > u64::MAX as u128, || format!("{name}: spurious overflow for {want}")),
        Err(e) => Err(format!("{name}: {e}")),
    }
}

fn bound_table() -> Outcome {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/bounds_grid.json")).map_err(|e| e.to_string())?;
    let grid: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let points = grid["points"].as_array().unwrap();
    ensure(points.len() == 100, || "grid size".into())?;
    let mut worst: f64 = 0.0;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    for (i, pt) in points.iter().enumerate() {
        let p = pt["p"].as_f64().unwrap();
        let eps = pt["epsilon"].as_f64().unwrap();
        let mu = pt["mu"].as_f64().unwrap();
        let g = pt["group_order"].as_u64().unwrap();
        let k = pt["k"].as_u64().unwrap();
        let s = NormKind::Schatten;
        let delta = {
            let x = eps / (mu * mu);
            x / ((1.0 + x).sqrt() + 1.0)
        };
        let reals = [
            ("required_k_real", required_k_real(eps, 2.0 * mu, p, s).unwrap()),
            ("error_bound", error_bound(k, 2.0 * mu, p, s).unwrap()),
            ("rank_real", required_k_real(1.0, 2.0 * mu / eps, p, s).unwrap()),
            ("puri_real", required_k_real(1.0, 2.0 / delta, p, s).unwrap()),
            ("sep_real", required_k_real(eps, 2.0, p, s).unwrap()),
            ("nn_real", required_k_real(eps, 2.0 * mu, p, NormKind::Lp).unwrap()),
        ];
        for (name, got) in reals {
            let want = parse_real(&pt[name]);
            let r = rel(got, want);
            worst = worst.max(r);
            ensure(r <= 1e-12, || format!("point {i} {name}: {got} vs {want}"))?;
        }
        check_budget("rank", budget_rank(eps, p, mu, g).map(|b| b.value), parse_big(&pt["rank"]), reals[2].1)?;
        check_budget("puri", budget_puri(eps, p, mu, g).map(|b| b.value), parse_big(&pt["puri"]), reals[3].1)?;
        check_budget("sep", budget_sep(eps, p, g).map(|b| b.value), parse_big(&pt["sep"]), reals[4].1)?;
        check_budget("nn", budget_nn(eps, p, mu, g).map(|b| b.value), parse_big(&pt["nn"]), reals[5].1)?;
        if let Some(v) = pt.get("schatten1") {
            let (d, n) = (pt["d"].as_u64().unwrap() as usize, pt["n"].as_u64().unwrap() as usize);
            let b2 = budget_rank(eps, p, mu, g).unwrap();
            check_budget("schatten1", budget_schatten1(eps, &b2, d, n).map(|b| b.value), parse_big(v), 0.0)?;
        }
    }
    ensure(required_k(1.0, 2.0, 2.0, NormKind::Schatten).unwrap() == 437, || "437".into())?;
    ensure(budget_sep(2.0, 2.0, 1).unwrap().value == 110, || "110".into())?;
    Ok(format!("100 grid points, worst rel. error {worst:.2e}; spot values 437 and 110"))
}

fn determinism() -> Outcome {
    let first = convergence_report();
    let second = run_experiment(&convergence_config()).map_err(|e| e.to_string())?;
    let mut files = 0;
    for (a, b) in first.series.iter().zip(&second.series) {
        for (ta, tb) in a.traces.iter().zip(&b.traces) {
            let (ta, tb) = (ta.as_ref().unwrap().to_csv(), tb.as_ref().unwrap().to_csv());
            ensure(ta.as_bytes() == tb.as_bytes(), || format!("d={} {}: CSV differs", a.d, a.method))?;
            files += 1;
        }
    }
    ensure(first.to_json().unwrap() == second.to_json().unwrap(), || "report differs".into())?;
    Ok(format!("{files} trace CSVs byte-identical"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 envelope", envelope),
        ("2 hanner", hanner),
        ("3 smoothness", smoothness),
        ("4 derivatives", derivatives),
        ("5 convergence replication", convergence),
        ("6 separation", separation),
        ("7 gauge", gauge),
        ("8 symmetrization", symmetrization),
        ("9 bound table", bound_table),
        ("10 determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                println!("FAIL criterion {name} ({secs:.1}s): {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
