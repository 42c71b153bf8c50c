use dpgrid_core::dp::*;
use dpgrid_core::Error;
use proptest::prelude::*;

const DRAWS: usize = 1_000_000;

fn draws(scale: f64, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..DRAWS).map(|_| laplace_sample(scale, &mut rng).unwrap()).collect()
}

#[test]
fn laplace_moments() {
    let lambda = 2.5;
    let xs = draws(lambda, 11);
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!(mean.abs() <= 3.0 * lambda * (2.0 / n).sqrt(), "mean {mean}");
    assert!((var / (2.0 * lambda * lambda) - 1.0).abs() <= 0.05, "variance {var}");
}

#[test]
fn laplace_median_of_magnitude() {
    let lambda = 0.7;
    let xs = draws(lambda, 12);
    let inside = xs.iter().filter(|x| x.abs() <= lambda * std::f64::consts::LN_2).count();
    let share = inside as f64 / xs.len() as f64;
    assert!((share - 0.5).abs() <= 0.01, "share {share}");
}

#[test]
fn laplace_scale_edge_cases() {
    let mut rng = rng_from_seed(0);
    assert_eq!(laplace_sample(0.0, &mut rng).unwrap(), 0.0);
    assert!(matches!(laplace_sample(-1.0, &mut rng), Err(Error::Parameter(_))));
    assert!(laplace_sample(f64::NAN, &mut rng).is_err());
}

#[test]
fn mechanism_uses_sensitivity_over_epsilon() {
    let values = [1.0, -2.0, 3.5];
    let mut noise = NoiseSource::live(4);
    let mut ledger = PrivacyLedger::new();
    let out = laplace_mechanism(&values, 10.0, 1.0, &mut noise, &mut ledger, "q").unwrap();

    let mut rng = rng_from_seed(4);
    for (o, v) in out.iter().zip(values) {
        let expected = v + laplace_sample(10.0, &mut rng).unwrap();
        assert_eq!(*o, expected);
    }
    assert_eq!(ledger.len(), 1);
    assert_eq!(ledger.total(), 1.0);
}

#[test]
fn mechanism_converges_as_epsilon_grows() {
    for eps in [1e3, 1e6, 1e9] {
        let mut noise = NoiseSource::live(9);
        let mut ledger = PrivacyLedger::new();
        let out = laplace_mechanism(&[0.5], 0.1, eps, &mut noise, &mut ledger, "q").unwrap()[0];
        assert!((out - 0.5).abs() < 50.0 * 0.1 / eps);
    }
}

#[test]
fn mechanism_rejects_bad_parameters() {
    let mut noise = NoiseSource::live(0);
    let mut ledger = PrivacyLedger::new();
    assert!(laplace_mechanism(&[1.0], 1.0, 0.0, &mut noise, &mut ledger, "q").is_err());
    assert!(laplace_mechanism(&[1.0], -1.0, 1.0, &mut noise, &mut ledger, "q").is_err());
    assert!(ledger.is_empty());
}

#[test]
fn noisy_max_without_noise() {
    let mut noise = NoiseSource::new(0, NoiseMode::Off);
    let mut ledger = PrivacyLedger::new();
    assert_eq!(report_noisy_max(&[1.0, 5.0, 3.0], 1.0, 1.0, &mut noise, &mut ledger, "s").unwrap(), 1);
    assert_eq!(report_noisy_max(&[2.0; 4], 1.0, 1.0, &mut noise, &mut ledger, "s").unwrap(), 0);
    assert_eq!(ledger.len(), 2);
    assert!(report_noisy_max(&[], 1.0, 1.0, &mut noise, &mut ledger, "s").is_err());
}

/// Selection frequencies on two score vectors one sensitivity apart must stay
/// within a factor `e^ε`, up to sampling error.
#[test]
fn noisy_max_frequency_ratio() {
    let (eps, delta, trials) = (1.0, 2.0, 200_000u32);
    let near = [0.0, delta];
    let far = [0.0, 0.0];
    let count = |scores: &[f64], seed: u64| {
        let mut noise = NoiseSource::live(seed);
        let mut ledger = PrivacyLedger::new();
        let mut hits = [0u32; 2];
        for _ in 0..trials {
            hits[report_noisy_max(scores, delta, eps, &mut noise, &mut ledger, "s").unwrap()] += 1;
        }
        hits.map(|h| h as f64 / trials as f64)
    };
    let a = count(&near, 21);
    let b = count(&far, 22);
    let bound = eps.exp() * 1.03;
    for i in 0..2 {
        assert!(a[i] / b[i] <= bound && b[i] / a[i] <= bound, "frequencies {a:?} vs {b:?}");
    }
    // The larger score must actually win more often.
    assert!(a[1] > b[1] + 0.1);
}

#[test]
fn compose_reference_values() {
    let mut ledger = PrivacyLedger::new();
    assert_eq!(compose(ledger.entries()), 0.0);
    for e in [0.5, 0.25, 0.25] {
        ledger.charge("x", e).unwrap();
    }
    assert_eq!(compose(ledger.entries()), 1.0);

    let eps = 0.3;
    let split = split_budget_tco(eps, 10).unwrap();
    let mut ledger = PrivacyLedger::new();
    ledger.charge("init", split.epsilon_1).unwrap();
    for _ in 0..20 {
        ledger.charge("q", split.epsilon_2).unwrap();
    }
    assert_eq!(ledger.total(), eps);
}

#[test]
fn split_reference_values() {
    assert_eq!(split_budget_wpo(1.0).unwrap(), BudgetSplit { epsilon_1: 0.5, epsilon_2: 0.25 });
    assert_eq!(split_budget_wpo(2.0).unwrap(), BudgetSplit { epsilon_1: 1.0, epsilon_2: 0.5 });
    assert_eq!(split_budget_tco(1.0, 10).unwrap(), BudgetSplit { epsilon_1: 0.5, epsilon_2: 0.025 });
    assert_eq!(split_budget_tco(1.0, 1).unwrap(), split_budget_wpo(1.0).unwrap());
    assert!(split_budget_tco(1.0, 0).is_err());
    assert!(split_budget_wpo(0.0).is_err());
    assert!(split_budget_wpo(-1.0).is_err());
}

#[test]
fn ledger_json_shape() {
    let mut ledger = PrivacyLedger::new();
    ledger.charge("a", 0.5).unwrap();
    ledger.charge("b", 0.25).unwrap();
    let v: serde_json::Value = serde_json::to_value(&ledger).unwrap();
    assert_eq!(v["total"], 0.75);
    assert_eq!(v["entries"][0]["label"], "a");
    assert_eq!(v["entries"][1]["epsilon"], 0.25);
    let record: LedgerRecord = serde_json::from_value(v).unwrap();
    assert!(record.audit(0.75).passed);
    assert!(!record.audit(1.0).passed);
}

#[test]
fn ledger_rejects_non_positive_charges() {
    let mut ledger = PrivacyLedger::new();
    assert!(ledger.charge("a", 0.0).is_err());
    assert!(ledger.charge("a", f64::INFINITY).is_err());
    assert!(ledger.is_empty());
}

#[test]
fn adjacency_must_be_positive() {
    assert!(AdjacencyParam::new(0.0).is_err());
    assert_eq!(AdjacencyParam::new(0.2).unwrap().get(), 0.2);
}

#[test]
fn derived_seeds_follow_xor() {
    assert_eq!(derive_seed(0b1100, 0b1010), 0b0110);
    assert_eq!(derive_seed(42, 0), 42);
}

proptest! {
    #[test]
    fn wpo_split_is_exact(eps in 1e-6f64..1e3) {
        let s = split_budget_wpo(eps).unwrap();
        prop_assert_eq!(exact_sum([s.epsilon_1, s.epsilon_2, s.epsilon_2]), eps);
    }

    #[test]
    fn tco_split_is_exact(eps in 1e-6f64..1e3, t in 1usize..200) {
        let s = split_budget_tco(eps, t).unwrap();
        let mut ledger = PrivacyLedger::new();
        ledger.charge("init", s.epsilon_1).unwrap();
        for _ in 0..2 * t {
            ledger.charge("q", s.epsilon_2).unwrap();
        }
        prop_assert_eq!(ledger.len(), 1 + 2 * t);
        prop_assert_eq!(ledger.total(), eps);
        prop_assert!(ledger.to_record().audit(eps).passed);
    }

    #[test]
    fn ledger_survives_json(eps in 1e-3f64..10.0, t in 1usize..12) {
        let s = split_budget_tco(eps, t).unwrap();
        let mut ledger = PrivacyLedger::new();
        ledger.charge("tco/capacities", s.epsilon_1).unwrap();
        for _ in 0..2 * t {
            ledger.charge("q", s.epsilon_2).unwrap();
        }
        let record: LedgerRecord = serde_json::from_str(&serde_json::to_string(&ledger).unwrap()).unwrap();
        prop_assert_eq!(&record, &ledger.to_record());
        prop_assert!(record.audit(eps).passed);
    }

    #[test]
    fn noise_off_noisy_max_is_argmax(scores in prop::collection::vec(-1e3f64..1e3, 1..40)) {
        let mut noise = NoiseSource::new(3, NoiseMode::Off);
        let mut ledger = PrivacyLedger::new();
        let got = report_noisy_max(&scores, 1.0, 1.0, &mut noise, &mut ledger, "s").unwrap();
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let expected = scores.iter().position(|&s| s == max).unwrap();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn same_seed_same_outputs(seed in any::<u64>(), values in prop::collection::vec(-10f64..10.0, 1..20)) {
        let run = || {
            let mut noise = NoiseSource::live(seed);
            let mut ledger = PrivacyLedger::new();
            let v = laplace_mechanism(&values, 1.5, 0.3, &mut noise, &mut ledger, "q").unwrap();
            let k = report_noisy_max(&values, 1.5, 0.3, &mut noise, &mut ledger, "s").unwrap();
            (v, k, ledger.total())
        };
        let (a, b) = (run(), run());
        prop_assert_eq!(a.0.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), b.0.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        prop_assert_eq!(a.1, b.1);
        prop_assert_eq!(a.2, b.2);
    }

    #[test]
    fn exact_sum_is_order_free(mut xs in prop::collection::vec(1e-9f64..1e3, 1..50)) {
        let a = exact_sum(xs.iter().copied());
        xs.reverse();
        prop_assert_eq!(a, exact_sum(xs.iter().copied()));
    }
}
