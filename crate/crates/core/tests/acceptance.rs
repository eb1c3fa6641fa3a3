//! Acceptance gate: one line per criterion, nonzero exit on any failure.

mod common;

use std::process::Command as Process;
use std::time::{Duration, Instant};

use rand::Rng;

use coherence_forge::channels::{convexity_suite, monotonicity_suite, random_incoherent_channel};
use coherence_forge::coherence::{
    c_geometric, c_geometric_qubit, c_rel_entropy, c_rel_entropy_is_minimum, CoherenceMeasure,
};
use coherence_forge::conversion::{convert, verify_theorem1, MeasurePair};
use coherence_forge::entanglement::{
    concurrence_two_qubit, e_geometric_two_qubit, e_rel_entropy_mc, mc_embed,
    ppt_is_separable_small, rel_entropy_sandwich,
};
use coherence_forge::io::{parse_state, read_state, state_to_json, write_state};
use coherence_forge::simplex::OptimizerOptions;
use coherence_forge::states::{
    derive_seed, dirichlet_weights, random_diagonal, random_mixed, rng_from_seed, DensityMatrix,
};

const MASTER_SEED: u64 = 20_140_901;

struct Outcome {
    ok: bool,
    detail: String,
}

fn qubit_states(n: usize) -> Vec<DensityMatrix> {
    (0..n)
        .map(|k| random_mixed(2, 2, derive_seed(MASTER_SEED, k as u64)).unwrap())
        .collect()
}

/// States of random rank, so rank-deficient cases are covered.
fn states_of_random_rank(d: usize, n: usize, stream: u64) -> Vec<DensityMatrix> {
    let mut rng = rng_from_seed(derive_seed(MASTER_SEED, stream));
    (0..n)
        .map(|_| {
            let rank = rng.random_range(1..=d);
            random_mixed(d, rank, rng.random()).unwrap()
        })
        .collect()
}

fn c1_closed_form_vs_optimizer() -> Outcome {
    let opts = OptimizerOptions::default();
    let mut worst: f64 = 0.0;
    for rho in qubit_states(1000) {
        let opt = c_geometric(&rho, &opts).unwrap();
        worst = worst.max((opt - c_geometric_qubit(&rho).unwrap()).abs());
    }
    Outcome {
        ok: worst <= 1e-6,
        detail: format!("1000 qubits, worst |C_g(opt) - C_g(closed)| = {worst:.2e} (tol 1e-6)"),
    }
}

fn c2_qubit_conversion() -> Outcome {
    let mut worst_g: f64 = 0.0;
    let mut worst_c: f64 = 0.0;
    for rho in qubit_states(1000) {
        let out = convert(&rho, 2).unwrap();
        worst_g = worst_g
            .max((c_geometric_qubit(&rho).unwrap() - e_geometric_two_qubit(&out).unwrap()).abs());
        worst_c =
            worst_c.max((concurrence_two_qubit(&out).unwrap() - 2.0 * rho.get(0, 1).norm()).abs());
    }
    Outcome {
        ok: worst_g <= 1e-9 && worst_c <= 1e-9,
        detail: format!("1000 qubits, worst |C_g - E_g| = {worst_g:.2e}, worst |C - 2|r01|| = {worst_c:.2e} (tol 1e-9)"),
    }
}

fn c3_rel_entropy_exactness() -> Outcome {
    let mut worst_gap: f64 = 0.0;
    let mut worst_eq: f64 = 0.0;
    let mut errors = 0;
    for d in 2..=4 {
        for rho in states_of_random_rank(d, 1000, 300 + d as u64) {
            let mc = mc_embed(&rho);
            worst_gap = worst_gap.max(rel_entropy_sandwich(&mc).unwrap().gap());
            match e_rel_entropy_mc(&mc) {
                Ok(e) => worst_eq = worst_eq.max((e - c_rel_entropy(&rho)).abs()),
                Err(_) => errors += 1,
            }
        }
    }
    Outcome {
        ok: worst_gap <= 1e-9 && worst_eq <= 1e-9 && errors == 0,
        detail: format!(
            "3000 states (d = 2, 3, 4), worst gap = {worst_gap:.2e}, worst |E_r - C_r| = {worst_eq:.2e}, certification errors = {errors} (tol 1e-9)"
        ),
    }
}

fn c4_geometric_bound_under_channels() -> Outcome {
    let mut failures = 0;
    let mut worst = f64::INFINITY;
    for t in 0..500u64 {
        let s = derive_seed(MASTER_SEED ^ 0x4, t);
        let mut rng = rng_from_seed(s);
        let rho = random_mixed(2, rng.random_range(1..=2), rng.random()).unwrap();
        let ch = random_incoherent_channel(4, rng.random_range(1..=4), rng.random()).unwrap();
        let r = verify_theorem1(&rho, &ch, 2, MeasurePair::Geometric).unwrap();
        worst = worst.min(r.margin);
        if !r.pass {
            failures += 1;
        }
    }
    Outcome {
        ok: failures == 0,
        detail: format!(
            "500 trials, failures = {failures}, worst margin C_g - E_g = {worst:.2e} (tol 1e-8)"
        ),
    }
}

fn c5_separability_of_converted() -> Outcome {
    let mut sep_failures = 0;
    for k in 0..200u64 {
        let rho = random_diagonal(2, derive_seed(MASTER_SEED ^ 0x5, k)).unwrap();
        if !ppt_is_separable_small(&convert(&rho, 2).unwrap()).unwrap() {
            sep_failures += 1;
        }
    }
    let mut ent_failures = 0;
    let mut accepted = 0;
    let mut k = 0u64;
    let mut worst = f64::INFINITY;
    while accepted < 200 {
        let rho = random_mixed(2, 2, derive_seed(MASTER_SEED ^ 0x55, k)).unwrap();
        k += 1;
        let r01 = rho.get(0, 1).norm();
        if r01 < 1e-3 {
            continue;
        }
        accepted += 1;
        let c = concurrence_two_qubit(&convert(&rho, 2).unwrap()).unwrap();
        worst = worst.min(c - 2.0 * r01);
        if !(c >= 2.0 * r01 - 1e-9 && c > 0.0) {
            ent_failures += 1;
        }
    }
    Outcome {
        ok: sep_failures == 0 && ent_failures == 0,
        detail: format!(
            "200 incoherent -> PPT failures = {sep_failures}; 200 coherent -> concurrence failures = {ent_failures}, worst C - 2|r01| = {worst:.2e}"
        ),
    }
}

fn c6_monotonicity_convexity() -> Outcome {
    let opts = OptimizerOptions::default();
    let mut lines = Vec::new();
    let mut total_failures = 0;
    for m in CoherenceMeasure::ALL {
        for d in 2..=3 {
            let seed = derive_seed(MASTER_SEED ^ 0x6, d as u64);
            let mono = monotonicity_suite(m, d, 500, seed, &opts).unwrap();
            let conv = convexity_suite(m, d, 500, seed ^ 1, &opts).unwrap();
            let f = mono.iter().chain(&conv).filter(|r| !r.pass).count();
            total_failures += f;
            let worst = mono
                .iter()
                .chain(&conv)
                .map(|r| r.margin)
                .fold(f64::INFINITY, f64::min);
            lines.push(format!("{m}/d{d}: {f} fail, worst margin {worst:.1e}"));
        }
    }
    Outcome {
        ok: total_failures == 0,
        detail: format!("500 trials each (C2, C3, C4); {}", lines.join("; ")),
    }
}

fn c7_qutrit_grid_oracle() -> Outcome {
    let opts = OptimizerOptions::default();
    let mut worst: f64 = 0.0;
    for rho in states_of_random_rank(3, 50, 700) {
        let opt = c_geometric(&rho, &opts).unwrap();
        let grid = common::grid_geometric_coherence3(rho.matrix(), 100);
        worst = worst.max((opt - grid).abs());
    }
    Outcome {
        ok: worst <= 2e-3,
        detail: format!("50 qutrits, worst |C_g(opt) - C_g(grid 0.01)| = {worst:.2e} (tol 2e-3)"),
    }
}

fn c8_dephased_optimality() -> Outcome {
    let mut violations = 0;
    let mut library_failures = 0;
    let mut worst = f64::INFINITY;
    for d in 2..=3 {
        for (k, rho) in states_of_random_rank(d, 200, 800 + d as u64)
            .into_iter()
            .enumerate()
        {
            let spectrum = rho.spectrum().to_vec();
            let pops = rho.populations();
            let at_dephased = common::entropy_bits(&pops) - common::entropy_bits(&spectrum);
            let seed = derive_seed(MASTER_SEED ^ 0x8, (d * 1000 + k) as u64);
            let mut rng = rng_from_seed(seed);
            for _ in 0..1000 {
                let q = dirichlet_weights(d, &mut rng);
                let h = common::rel_entropy_to_diagonal(&spectrum, &pops, &q);
                worst = worst.min(h - at_dephased);
                if h < at_dephased - 1e-9 {
                    violations += 1;
                }
            }
            if !c_rel_entropy_is_minimum(&rho, 1000, seed).unwrap().pass {
                library_failures += 1;
            }
        }
    }
    Outcome {
        ok: violations == 0 && library_failures == 0,
        detail: format!(
            "400 states x 1000 samples (d = 2, 3), violations = {violations}, library check failures = {library_failures}, min H(rho||sigma) - H(rho||rho_d) = {worst:.2e}"
        ),
    }
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Process::new(env!("CARGO_BIN_EXE_coherence-forge"))
        .args(args)
        .env("COHERENCE_FORGE_THREADS", "1")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn without_header(bytes: &[u8]) -> &[u8] {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .unwrap_or(bytes.len());
    &bytes[(nl + 1).min(bytes.len())..]
}

fn c9_cli_determinism_round_trip() -> Outcome {
    let mut problems = Vec::new();
    let runs: [&[&str]; 4] = [
        &[
            "verify",
            "monotonicity",
            "--trials",
            "20",
            "--seed",
            "11",
            "--dim",
            "2",
            "--measure",
            "all",
        ],
        &["verify", "theorem1", "--trials", "30", "--seed", "5"],
        &["measure", "--preset", "mc:3", "--seed", "2"],
        &["sweep", "--step", "0.05"],
    ];
    for args in runs {
        let (c1, a) = run_cli(args);
        let (c2, b) = run_cli(args);
        let verify = args[0] == "verify";
        let (a, b) = if verify {
            (without_header(&a), without_header(&b))
        } else {
            (&a[..], &b[..])
        };
        if c1 != 0 || c2 != 0 || a != b || a.is_empty() {
            problems.push(format!(
                "`{}` not reproducible (exit {c1}/{c2})",
                args.join(" ")
            ));
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let mut exact = 0;
    for k in 0..50u64 {
        let rho = random_mixed(3, 3, derive_seed(MASTER_SEED ^ 0x9, k)).unwrap();
        let path = dir.path().join(format!("s{k}.json"));
        write_state(&path, &rho, None).unwrap();
        let back = read_state(&path).unwrap();
        let again = parse_state(&state_to_json(&back.state, None).unwrap()).unwrap();
        if back.state.matrix() == rho.matrix() && again.state.matrix() == rho.matrix() {
            exact += 1;
        }
    }
    if exact != 50 {
        problems.push(format!("state round-trip exact for only {exact}/50"));
    }

    let input = dir.path().join("in.json");
    let output = dir.path().join("out.json");
    let rho = random_mixed(2, 2, 99).unwrap();
    write_state(&input, &rho, None).unwrap();
    let (code, _) = run_cli(&[
        "convert",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    let written = read_state(&output).unwrap();
    let expected = convert(&rho, 2).unwrap();
    if code != 0
        || written.state.matrix() != expected.state().matrix()
        || written.subsystems != Some((2, 2))
    {
        problems.push("convert output file differs from the library result".into());
    }

    Outcome {
        ok: problems.is_empty(),
        detail: if problems.is_empty() {
            "4 commands byte-identical across runs; 50 state files and a convert output round-trip bit-exactly".into()
        } else {
            problems.join("; ")
        },
    }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    // libtest passes flags such as --nocapture or a filter; there is nothing to filter here.
    let criteria: [Criterion; 9] = [
        (
            "closed-form C_g vs optimizer",
            Duration::from_secs(60),
            c1_closed_form_vs_optimizer,
        ),
        (
            "qubit conversion equalities",
            Duration::from_secs(10),
            c2_qubit_conversion,
        ),
        (
            "E_r of converted state equals C_r",
            Duration::from_secs(120),
            c3_rel_entropy_exactness,
        ),
        (
            "entanglement below coherence (geometric)",
            Duration::from_secs(120),
            c4_geometric_bound_under_channels,
        ),
        (
            "entangled output iff coherent input",
            Duration::from_secs(30),
            c5_separability_of_converted,
        ),
        (
            "monotonicity and convexity",
            Duration::from_secs(300),
            c6_monotonicity_convexity,
        ),
        (
            "qutrit C_g vs grid search",
            Duration::from_secs(300),
            c7_qutrit_grid_oracle,
        ),
        (
            "dephased state minimizes H(rho||sigma)",
            Duration::from_secs(180),
            c8_dephased_optimality,
        ),
        (
            "CLI determinism and round-trip",
            Duration::from_secs(5),
            c9_cli_determinism_round_trip,
        ),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = outcome.ok && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] {}. {name}: {} [{:.2} s, budget {} s{}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
