//! Runs every search-backed workload at its default budget and prints the
//! minima found and timings. Used to pin the acceptance thresholds.

use std::time::Instant;

use entanglers::constructions::{
    build_householder_bue, build_permutation_bue, e1_certify_positive, e2_certify_rank3, GateKind,
};
use entanglers::search::{bue_counterexample_search, prevalence_trial, SearchConfig};

fn main() {
    let cfg = SearchConfig::default();
    let mut which: Vec<String> = std::env::args().skip(1).collect();
    if which.is_empty() {
        which = ["perm", "house", "e1", "e2", "forced", "prev"].map(String::from).to_vec();
    }
    for w in which {
        let t = Instant::now();
        match w.as_str() {
            "perm" => {
                for d in 3..=8 {
                    let t = Instant::now();
                    let r = bue_counterexample_search(&build_permutation_bue(d).unwrap(), &cfg).unwrap();
                    println!("perm d={d} {:?} best={:.4e} ({:.1?})", r.verdict, r.best_residual, t.elapsed());
                }
            }
            "house" => {
                for d in 5..=8 {
                    let t = Instant::now();
                    let r = bue_counterexample_search(&build_householder_bue(d).unwrap(), &cfg).unwrap();
                    println!("house d={d} {:?} best={:.4e} ({:.1?})", r.verdict, r.best_residual, t.elapsed());
                }
            }
            "e1" => {
                let c = SearchConfig { restarts: 500, ..cfg.clone() };
                for d in [3, 4, 5, 6, 8] {
                    let r = e1_certify_positive(d, &c, 1e-3).unwrap();
                    println!("e1 d={d} min={:.4e} passed={}", r.min_found, r.passed);
                }
            }
            "e2" => {
                let c = SearchConfig { restarts: 500, ..cfg.clone() };
                for d in [3, 4, 5, 6] {
                    let r = e2_certify_rank3(d, &c, 1e-3).unwrap();
                    println!("e2 d={d} min={:.4e} passed={}", r.min_found, r.passed);
                }
            }
            "forced" => {
                let c = SearchConfig { seed: 7, ..cfg.clone() };
                let kinds = [
                    GateKind::Bosonic { d: 2 },
                    GateKind::Fermionic { d: 4 },
                    GateKind::Fermionic { d: 5 },
                    GateKind::Fermionic { d: 6 },
                    GateKind::Fermionic { d: 7 },
                ];
                for k in kinds {
                    let t = Instant::now();
                    let p = prevalence_trial(k, 10, &c).unwrap();
                    let runs: Vec<usize> = p.reports.iter().map(|r| r.restarts_run).collect();
                    let worst = p.reports.iter().map(|r| r.best_residual).fold(0.0, f64::max);
                    println!(
                        "forced {k} found={} worst={worst:.2e} restarts={runs:?} ({:.1?})",
                        p.counterexamples_found,
                        t.elapsed()
                    );
                }
            }
            "prev" => {
                for k in [GateKind::Bosonic { d: 3 }, GateKind::Fermionic { d: 8 }] {
                    let t = Instant::now();
                    let p = prevalence_trial(k, 10, &cfg).unwrap();
                    let bests: Vec<String> = p.reports.iter().map(|r| format!("{:.2e}", r.best_residual)).collect();
                    println!("prev {k} fraction={} bests={bests:?} ({:.1?})", p.fraction_none_found, t.elapsed());
                }
            }
            other => eprintln!("unknown workload {other}"),
        }
        println!("[{w}: {:.1?}]", t.elapsed());
    }
}
