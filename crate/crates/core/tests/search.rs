use entanglers::constructions::*;
use entanglers::linalg::C64;
use entanglers::search::*;
use entanglers::subspace::SingleParticleVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn cfg(restarts: usize) -> SearchConfig {
    SearchConfig { restarts, ..SearchConfig::default() }
}

#[test]
fn identity_gate_is_refuted_on_the_first_restart() {
    for kind in [GateKind::Bosonic { d: 4 }, GateKind::Fermionic { d: 5 }, GateKind::Distinguishable { d1: 3, d2: 4 }] {
        let gate = GateMatrix::identity(kind).unwrap();
        let r = verify_gate(&gate, &cfg(20)).unwrap();
        assert_eq!(r.verdict, Verdict::CounterexampleFound, "{kind}");
        assert_eq!(r.restarts_run, 1);
        assert!(r.counterexample.unwrap().reverify(&gate, 1e-8).unwrap());
    }
}

#[test]
fn haar_gate_in_low_dimension_has_a_counterexample() {
    let gate = sample_haar_gate(GateKind::Bosonic { d: 2 }, 7).unwrap();
    let r = bue_counterexample_search(&gate, &cfg(50)).unwrap();
    assert_eq!(r.verdict, Verdict::CounterexampleFound);
    let ce = r.counterexample.as_ref().unwrap();
    assert!(ce.input_residual <= 1e-12);
    assert!(ce.image_residual <= 1e-8);
    assert!(ce.reconstruction_error <= 1e-8);
    assert!(ce.reverify(&gate, 1e-8).unwrap());
    assert!(r.stopped_early || r.restarts_run == 50);
}

#[test]
fn small_fermionic_systems_short_circuit() {
    let gate = sample_haar_gate(GateKind::Fermionic { d: 3 }, 1).unwrap();
    let r = fue_counterexample_search(&gate, &cfg(10)).unwrap();
    assert_eq!(r.verdict, Verdict::CounterexampleFound);
    assert!(r.notes.iter().any(|n| n.contains("d = 3")));
    assert!(r.counterexample.unwrap().reverify(&gate, 1e-8).unwrap());
}

#[test]
fn permutation_gate_survives_the_search() {
    let gate = build_permutation_bue(5).unwrap();
    let r = bue_counterexample_search(&gate, &cfg(40)).unwrap();
    assert_eq!(r.verdict, Verdict::NoneFoundWithinBudget);
    assert!(r.best_residual >= 1e-4);
    assert!(r.counterexample.is_none());
    assert_eq!(r.construction_status.as_deref(), Some("proven"));
    assert_eq!(r.restarts_run, 40);
}

#[test]
fn distinguishable_boundary_follows_the_dimension_count() {
    let g33 = sample_haar_gate(GateKind::Distinguishable { d1: 3, d2: 3 }, 3).unwrap();
    let r = verify_gate(&g33, &cfg(100)).unwrap();
    assert_eq!(r.verdict, Verdict::CounterexampleFound);
    assert!(r.counterexample.unwrap().reverify(&g33, 1e-8).unwrap());

    let g34 = sample_haar_gate(GateKind::Distinguishable { d1: 3, d2: 4 }, 3).unwrap();
    let r = verify_gate(&g34, &cfg(40)).unwrap();
    assert_eq!(r.verdict, Verdict::NoneFoundWithinBudget);
}

#[test]
fn replay_is_deterministic_and_budget_monotone() {
    let gate = build_permutation_bue(4).unwrap();
    let a = bue_counterexample_search(&gate, &cfg(16)).unwrap();
    let b = bue_counterexample_search(&gate, &cfg(16)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let big = bue_counterexample_search(&gate, &cfg(32)).unwrap();
    assert!(big.best_residual <= a.best_residual);
    let other = bue_counterexample_search(&gate, &SearchConfig { seed: 43, ..cfg(16) }).unwrap();
    assert_ne!(other.iterations_total, a.iterations_total);
}

#[test]
fn prevalence_below_the_threshold_finds_every_counterexample() {
    let r = prevalence_trial(GateKind::Fermionic { d: 5 }, 3, &cfg(50)).unwrap();
    assert!(!r.prediction.exists);
    assert_eq!(r.counterexamples_found, 3);
    assert_eq!(r.fraction_none_found, 0.0);
    assert_eq!(r.gate_seeds.len(), 3);
    assert_eq!(r.gate_seeds[1], optimizer::sub_seed(42, 1));
}

#[test]
fn prevalence_above_the_threshold_carries_the_caveat() {
    let r = prevalence_trial(GateKind::Bosonic { d: 3 }, 2, &cfg(30)).unwrap();
    assert!(r.prediction.exists);
    assert_eq!(r.fraction_none_found, 1.0);
    assert!(r.notes.iter().any(|n| n == NOT_A_PROOF));
}

#[test]
fn profile_of_an_entangler_stays_away_from_zero() {
    let gate = build_permutation_bue(3).unwrap();
    let p = entanglement_profile(&gate, 2000, 42).unwrap();
    assert!(p.min > 0.0);
    assert!(p.min <= p.mean && p.mean <= p.max && p.max <= 1.0);
    assert!(p.quantiles.windows(2).all(|w| w[0].1 <= w[1].1));
    let id = entanglement_profile(&GateMatrix::identity(GateKind::Bosonic { d: 3 }).unwrap(), 100, 1).unwrap();
    assert!(id.max <= 1e-12);
}

fn random_unit(d: usize, rng: &mut ChaCha8Rng) -> SingleParticleVector {
    let v: Vec<C64> = (0..d).map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))).collect();
    SingleParticleVector::new(v).unwrap().normalized().unwrap()
}

// Plain random sampling never beats the optimizer, and its minimum stays above the threshold.
#[test]
fn e1_minimum_agrees_with_random_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for d in [3, 5] {
        let report = e1_certify_positive(d, &cfg(100), CERTIFY_MIN_THRESHOLD).unwrap();
        assert!(report.passed, "d={d}: {}", report.min_found);
        let sampled =
            (0..20_000).map(|_| e1_residual(&random_unit(d, &mut rng)).unwrap()).fold(f64::INFINITY, f64::min);
        assert!(report.min_found <= sampled + 1e-9, "d={d}: search {} vs sampled {sampled}", report.min_found);
        let argmin = SingleParticleVector::new(report.argmin.clone()).unwrap();
        assert!((e1_residual(&argmin).unwrap() - report.min_found).abs() <= 1e-9);
    }
}

#[test]
fn e1_product_identity_holds() {
    for d in [3, 4, 5, 8] {
        assert!(e1_product_identity_check(d, 200, 9).unwrap());
    }
    // each coordinate occurs exactly twice on both sides
    let a = [C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0), C64::new(0.0, 5.0)];
    assert_eq!(product_identity_deviation(&a), 0.0);
}

#[test]
fn e2_separates_small_and_large_d() {
    let low = e2_certify_rank3(4, &cfg(40), CERTIFY_MIN_THRESHOLD).unwrap();
    assert!(low.min_found <= 1e-6);
    assert!(!low.passed);
    let high = e2_certify_rank3(5, &cfg(40), CERTIFY_MIN_THRESHOLD).unwrap();
    assert!(high.passed, "{}", high.min_found);
}

#[test]
fn householder_gates_are_unitary_involutions() {
    for d in 5..=8 {
        let g = build_householder_bue(d).unwrap();
        assert!(g.unitarity_defect() <= 1e-12);
        let t = g.trace();
        assert!((t.re - householder_trace(d) as f64).abs() <= 1e-9 && t.im.abs() <= 1e-12);
    }
    assert!(build_householder_bue(4).unwrap_err().to_string().contains("d >= 5"));
}
