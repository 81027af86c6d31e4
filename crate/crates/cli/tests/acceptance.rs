//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

// `!(x <= tol)` is deliberate: NaN must fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use entanglers::constructions::*;
use entanglers::linalg::{self, C64};
use entanglers::search::*;
use entanglers::subspace::*;
use entanglers::varieties::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn truth_table() -> Check {
    let mut checked = 0;
    for d in 1..=10 {
        let p = dimension_gate(VarietyKind::Veronese { d }).map_err(|e| e.to_string())?;
        ensure!(p.exists == (d >= 3), "bosonic d={d}");
        checked += 1;
    }
    for d in 2..=12 {
        let p = dimension_gate(VarietyKind::Grassmannian { d }).map_err(|e| e.to_string())?;
        ensure!(p.exists == (d >= 8), "fermionic d={d}");
        checked += 1;
    }
    let d7 = dimension_gate(VarietyKind::Grassmannian { d: 7 }).unwrap();
    let d8 = dimension_gate(VarietyKind::Grassmannian { d: 8 }).unwrap();
    ensure!((d7.lhs, d7.rhs) == (20, 20), "d=7 boundary {} vs {}", d7.lhs, d7.rhs);
    ensure!((d8.lhs, d8.rhs) == (24, 27), "d=8 boundary {} vs {}", d8.lhs, d8.rhs);
    for d1 in 2..=6 {
        for d2 in 2..=6 {
            let p = dimension_gate(VarietyKind::Segre { d1, d2 }).unwrap();
            ensure!(p.exists == (d1.min(d2) >= 3 && (d1, d2) != (3, 3)), "distinguishable ({d1},{d2})");
            checked += 1;
        }
    }
    Ok(format!("{checked} cases"))
}

fn is_permutation_involution(g: &GateMatrix) -> bool {
    let m = g.matrix();
    let n = m.nrows();
    let entries_ok = m.iter().all(|z| *z == linalg::ZERO || *z == linalg::ONE);
    let rows_ok = (0..n).all(|i| m.row(i).iter().filter(|z| **z == linalg::ONE).count() == 1);
    let cols_ok = (0..n).all(|j| m.column(j).iter().filter(|z| **z == linalg::ONE).count() == 1);
    entries_ok && rows_ok && cols_ok && m * m == linalg::CMatrix::identity(n, n)
}

fn permutation_bue() -> Check {
    let cfg = SearchConfig::default();
    let mut bests = Vec::new();
    for d in 3..=8 {
        let g = build_permutation_bue(d).map_err(|e| e.to_string())?;
        ensure!(is_permutation_involution(&g), "d={d}: not a permutation involution");
        let r = bue_counterexample_search(&g, &cfg).map_err(|e| e.to_string())?;
        ensure!(r.verdict == Verdict::NoneFoundWithinBudget, "d={d}: verdict {}", r.verdict.as_str());
        ensure!(r.best_residual >= 1e-4, "d={d}: best residual {:.3e}", r.best_residual);
        bests.push(format!("{:.3e}", r.best_residual));
    }
    Ok(format!("best residuals {}", bests.join(", ")))
}

fn householder_bue() -> Check {
    let cfg = SearchConfig::default();
    let mut bests = Vec::new();
    for d in 5..=8 {
        let g = build_householder_bue(d).map_err(|e| e.to_string())?;
        ensure!(g.unitarity_defect() <= 1e-12, "d={d}: defect {:.3e}", g.unitarity_defect());
        let t = g.trace();
        let expected = (linalg::binomial(d + 1, 2) - 2 * d) as f64;
        ensure!(t.re.round() == expected && (t.re - expected).abs() <= 1e-9 && t.im.abs() <= 1e-12, "d={d}: trace {t}");
        let r = bue_counterexample_search(&g, &cfg).map_err(|e| e.to_string())?;
        ensure!(r.verdict == Verdict::NoneFoundWithinBudget, "d={d}: verdict {}", r.verdict.as_str());
        ensure!(r.best_residual >= 1e-4, "d={d}: best residual {:.3e}", r.best_residual);
        bests.push(format!("{:.3e}", r.best_residual));
    }
    Ok(format!("best residuals {}", bests.join(", ")))
}

fn polynomial_systems() -> Check {
    let cfg = SearchConfig { restarts: 500, ..SearchConfig::default() };
    let mut mins = Vec::new();
    for d in [3, 5, 8] {
        let r = e1_certify_positive(d, &cfg, CERTIFY_MIN_THRESHOLD).map_err(|e| e.to_string())?;
        ensure!(r.min_found >= 1e-3, "E1 d={d}: min {:.3e}", r.min_found);
        ensure!(e1_product_identity_check(d, 1000, cfg.seed).unwrap(), "E1 d={d}: product identity");
        mins.push(format!("E1({d})={:.4}", r.min_found));
    }
    for d in [5, 6] {
        let r = e2_certify_rank3(d, &cfg, CERTIFY_MIN_THRESHOLD).map_err(|e| e.to_string())?;
        ensure!(r.min_found >= 1e-3, "E2 d={d}: min {:.3e}", r.min_found);
        mins.push(format!("E2({d})={:.4}", r.min_found));
    }
    let r = e2_certify_rank3(4, &cfg, CERTIFY_MIN_THRESHOLD).map_err(|e| e.to_string())?;
    ensure!(r.min_found <= 1e-6, "E2 d=4: min {:.3e}", r.min_found);
    mins.push(format!("E2(4)={:.1e}", r.min_found));
    Ok(mins.join(" "))
}

fn forced_collisions() -> Check {
    let cfg = SearchConfig { seed: 7, ..SearchConfig::default() };
    let mut kinds = vec![GateKind::Bosonic { d: 2 }];
    kinds.extend((4..=7).map(|d| GateKind::Fermionic { d }));
    let mut worst: f64 = 0.0;
    for kind in kinds {
        let r = prevalence_trial(kind, 10, &cfg).map_err(|e| e.to_string())?;
        ensure!(r.counterexamples_found == 10, "{kind}: {} of 10 found", r.counterexamples_found);
        for (rep, seed) in r.reports.iter().zip(&r.gate_seeds) {
            let ce = rep.counterexample.as_ref().ok_or(format!("{kind}: missing counterexample"))?;
            ensure!(ce.image_residual <= 1e-8, "{kind}: residual {:.3e}", ce.image_residual);
            let gate = sample_haar_gate(kind, *seed).unwrap();
            ensure!(ce.reverify(&gate, 1e-8).unwrap(), "{kind} seed {seed}: reverification failed");
            worst = worst.max(ce.image_residual);
        }
    }
    Ok(format!("50 gates, worst image residual {worst:.2e}"))
}

fn prevalence() -> Check {
    let cfg = SearchConfig::default();
    let mut parts = Vec::new();
    for kind in [GateKind::Bosonic { d: 3 }, GateKind::Fermionic { d: 8 }] {
        let r = prevalence_trial(kind, 10, &cfg).map_err(|e| e.to_string())?;
        ensure!(r.fraction_none_found == 1.0, "{kind}: fraction {}", r.fraction_none_found);
        ensure!(r.notes.iter().any(|n| n == NOT_A_PROOF), "{kind}: caveat missing");
        let min_best = r.reports.iter().map(|x| x.best_residual).fold(f64::INFINITY, f64::min);
        parts.push(format!("{kind}: 10/10, smallest best {min_best:.2e}"));
    }
    Ok(parts.join("; "))
}

fn random_vec(d: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    (0..d).map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))).collect()
}

fn unit(d: usize, rng: &mut ChaCha8Rng) -> SingleParticleVector {
    SingleParticleVector::new(random_vec(d, rng)).unwrap().normalized().unwrap()
}

fn diff(a: &[C64], b: &[C64]) -> f64 {
    linalg::norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
}

fn property_suite() -> Check {
    const TRIALS: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let (mut embed, mut round, mut scale) = (0f64, 0f64, 0f64);
    let (mut zero_set, mut expected_zero) = (0, 0);
    for t in 0..TRIALS {
        let d = rng.random_range(2..=8);
        let (a, b) = (unit(d, &mut rng), unit(d, &mut rng));

        // products land on their varieties
        embed = embed.max(veronese_residual(&sym_embed(&a).unwrap()).unwrap());
        let w = wedge_embed(&a, &b).unwrap();
        embed = embed.max(grassmann_residual(&w).unwrap());
        embed = embed.max(plucker_relations_residual(&w).unwrap());
        let d2 = rng.random_range(1..=6);
        let c = unit(d2, &mut rng);
        embed = embed.max(segre_residual(&kron(a.amplitudes(), c.amplitudes()), d, d2).unwrap());

        // decompositions reconstruct their input
        let p = AntiVector::new(d, random_vec(anti_dim(d), &mut rng)).unwrap();
        round = round.max(diff(slater_decompose(&p).unwrap().reconstruct(d).coords(), p.coords()) / p.norm());
        let z = random_vec(d * d2, &mut rng);
        round = round.max(diff(&schmidt_decompose(&z, d, d2).unwrap().reconstruct(), &z) / linalg::norm(&z));

        // both fermionic residuals agree on membership, on and off the zero set
        let q = if t % 2 == 0 { w.clone() } else { p.clone() };
        let by_sigma = grassmann_residual(&q).unwrap() <= MEMBERSHIP_TOL;
        let by_relations = plucker_relations_residual(&q).unwrap() <= MEMBERSHIP_TOL;
        ensure!(by_sigma == by_relations, "trial {t}: Plücker/σ₃ classification disagree (d={d})");
        zero_set += by_sigma as usize;
        // every 2-vector with d <= 3 is decomposable
        expected_zero += (t % 2 == 0 || d <= 3) as usize;

        // residuals ignore global scale
        let s = C64::from_polar(10f64.powf(rng.random_range(-3.0..3.0)), rng.random_range(0.0..6.3));
        let x = SymVector::new(d, random_vec(sym_dim(d), &mut rng)).unwrap();
        scale = scale.max((veronese_residual(&x).unwrap() - veronese_residual(&x.scaled(s)).unwrap()).abs());
        scale = scale.max((grassmann_residual(&p).unwrap() - grassmann_residual(&p.scaled(s)).unwrap()).abs());
        let zs: Vec<C64> = z.iter().map(|v| v * s).collect();
        scale = scale.max((segre_residual(&z, d, d2).unwrap() - segre_residual(&zs, d, d2).unwrap()).abs());
    }
    ensure!(embed <= 1e-12, "embedding residual {embed:.3e}");
    ensure!(round <= 1e-10, "round trip error {round:.3e}");
    ensure!(scale <= 1e-13, "scale variation {scale:.3e}");
    ensure!(zero_set == expected_zero, "{zero_set} states classified decomposable, expected {expected_zero}");
    Ok(format!(
        "{TRIALS} trials: embedding {embed:.1e}, round trip {round:.1e}, scale {scale:.1e}, {zero_set} on zero set"
    ))
}

fn run_cli(args: &[&str], json: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_entanglers"))
        .args(args)
        .arg("--json")
        .arg(json)
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    ensure!(status.code().is_some_and(|c| c != 2), "{args:?} exited with {status}");
    std::fs::read(json).map_err(|e| e.to_string())
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let gate_file = dir.path().join("p3.json");
    let gate_path = gate_file.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["gate", "--kind", "fermionic", "--d", "8"],
        vec!["construct", "permutation", "--d", "3", "--out", gate_path],
        vec!["verify", gate_path, "--restarts", "40"],
        vec!["certify-appendices", "--d", "5", "--restarts", "20"],
        vec!["prevalence", "--kind", "bosonic", "--d", "2", "--count", "3", "--seed", "7"],
        vec!["profile", gate_path, "--samples", "2000"],
    ];
    for args in &commands {
        let first = run_cli(args, &dir.path().join("a.json"))?;
        let second = run_cli(args, &dir.path().join("b.json"))?;
        ensure!(first == second, "{} output differs between runs", args[0]);
    }
    Ok(format!("{} commands byte-identical", commands.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("dimension-gate truth table", truth_table),
        ("permutation entangler d=3..8", permutation_bue),
        ("Householder entangler d=5..8", householder_bue),
        ("E1/E2 polynomial systems", polynomial_systems),
        ("forced collisions", forced_collisions),
        ("prevalence at existence thresholds", prevalence),
        ("algebra property suite", property_suite),
        ("deterministic JSON", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS  [{}] {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  [{}] {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
