mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use qpac::concept::{
    loss_observable, partition_compatible, true_risk, ConceptClass, LossFunction, Predictor, Strategy,
};
use qpac::env::{
    bloch_spin_preset, classical_embed, classical_risk, draw_samples, haar_unitary, random_class, BlochGrid,
    ClassStructure, Environment,
};
use qpac::qerm::{
    joint_loss_distribution, measure_subclass, run_naive, run_qerm, run_qerm_env, BatchMode, PartitionStrategy,
    QermOptions, TrainingSample,
};
use qpac::quantum::{ComplexMatrix, DensityOperator, ProjectivePovm};
use qpac::{rng, Error};

use common::*;

#[test]
fn eigenbasis_sampling_matches_operator_products() {
    let mut r = rng::seeded(2024);
    for _ in 0..20 {
        let ny = r.random_range(1..=2);
        let d = r.random_range(1..=4 / ny);
        let k = r.random_range(1..=3);
        let class = compatible_class(d, ny, k, &mut r);
        let loss = random_loss(ny, &mut r);
        let rho = random_density(d, &mut r);
        let y = r.random_range(0..ny);
        let partition = partition_compatible(&class, Strategy::Greedy).unwrap();
        let order = &partition.subclasses()[0];
        let predictors: Vec<&Predictor> = order.iter().map(|&i| class.predictor(i)).collect();
        let fast = joint_loss_distribution(&partition.bases()[0], &rho, y, &loss).unwrap();
        let slow = product_operator_distribution(&predictors, &loss, &rho, y);
        let keys: std::collections::BTreeSet<_> = fast.keys().chain(slow.keys()).collect();
        for key in keys {
            let a = fast.get(key).copied().unwrap_or(0.0);
            let b = slow.get(key).copied().unwrap_or(0.0);
            assert!((a - b).abs() <= 1e-9, "{key:?}: {a} vs {b}");
        }
    }
}

#[test]
fn two_commuting_qubit_predictors() {
    // Z-basis predictor and its label flip on |+⟩ with y = 0 under 0-1 loss:
    // exactly one of the two is wrong, each with probability 1/2.
    let labels = labels(2);
    let z = ProjectivePovm::computational_basis(2);
    let flipped = ProjectivePovm::from_elements(labels.clone(), z.elements().iter().rev().cloned().collect()).unwrap();
    let class = ConceptClass::new(labels.clone(), vec![Predictor::new(0, z), Predictor::new(1, flipped)]).unwrap();
    let loss = LossFunction::zero_one(labels).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityOperator::pure(&[qpac::quantum::c64(s, 0.0), qpac::quantum::c64(s, 0.0)]).unwrap();
    let partition = partition_compatible(&class, Strategy::Exact).unwrap();
    let dist = joint_loss_distribution(&partition.bases()[0], &plus, 0, &loss).unwrap();
    let expected: BTreeMap<Vec<usize>, f64> = [(vec![0, 1], 0.5), (vec![1, 0], 0.5)].into_iter().collect();
    assert_eq!(dist.len(), 2);
    for (key, p) in &expected {
        assert!((dist[key] - p).abs() < 1e-12);
    }
}

#[test]
fn empirical_loss_is_unbiased() {
    // 10⁵ single-predictor measurements; the mean loss must sit within 3σ
    // of the true risk, σ² = r (1 - r) / n for a 0-1 loss.
    let mut r = rng::seeded(77);
    let env = random_environment(3, 4, 2, &mut r);
    let basis = haar_unitary(3, &mut r);
    let p = predictor_in_basis(0, &basis, 2, &mut r);
    let loss = LossFunction::zero_one(labels(2)).unwrap();
    let class = ConceptClass::new(labels(2), vec![p]).unwrap();
    let partition = partition_compatible(&class, Strategy::Greedy).unwrap();
    let n = 100_000;
    let mut samples = draw_samples(&env, n, &mut r).unwrap();
    let mut sum = 0.0;
    for s in samples.iter_mut() {
        sum += measure_subclass(&partition.bases()[0], s, &loss, &mut r).unwrap()[0];
    }
    let risk = true_risk(class.predictor(0), &env, &loss).unwrap();
    let sigma = (risk * (1.0 - risk) / n as f64).sqrt();
    assert!(
        (sum / n as f64 - risk).abs() <= 3.0 * sigma,
        "{} vs {risk}",
        sum / n as f64
    );
}

#[test]
fn loss_observable_expectation_is_risk() {
    let mut r = rng::seeded(31);
    let env = random_environment(2, 3, 3, &mut r);
    let p = predictor_in_basis(4, &haar_unitary(2, &mut r), 3, &mut r);
    let loss = random_loss(3, &mut r);
    let obs = loss_observable(&p, &loss).unwrap();
    let avg = env.average_state().unwrap();
    assert!((obs.expectation(&avg).unwrap() - true_risk(&p, &env, &loss).unwrap()).abs() < 1e-12);
}

#[test]
fn embedded_risk_is_classical_expectation() {
    let mut r = rng::seeded(8);
    for _ in 0..50 {
        let nx = r.random_range(1..=8);
        let ny = r.random_range(1..=3);
        let dist = random_dist(nx, ny, &mut r);
        let functions: Vec<Vec<usize>> = (0..4)
            .map(|_| (0..nx).map(|_| r.random_range(0..ny)).collect())
            .collect();
        let features = (0..nx).map(|x| x.to_string()).collect();
        let (env, class) = classical_embed(features, labels(ny), dist.clone(), &functions).unwrap();
        let loss = random_loss(ny, &mut r);
        assert_eq!(partition_compatible(&class, Strategy::Exact).unwrap().m(), 1);
        for (p, f) in class.predictors().iter().zip(&functions) {
            let q = true_risk(p, &env, &loss).unwrap();
            assert!((q - classical_risk(&dist, &loss, f)).abs() <= 1e-12);
        }
    }
}

/// Two blocks of qubit predictors; only the second block holds a
/// zero-risk predictor for an environment of its own eigenstates.
#[test]
fn selection_lands_in_the_block_with_the_perfect_predictor() {
    let mut r = rng::seeded(5);
    let labels = labels(2);
    let a = haar_unitary(2, &mut r);
    let b = haar_unitary(2, &mut r);
    let mk = |id, basis: &ComplexMatrix, assignment: &[usize]| {
        Predictor::new(
            id,
            ProjectivePovm::from_basis(basis, assignment, labels.clone()).unwrap(),
        )
    };
    let class = ConceptClass::new(
        labels.clone(),
        vec![
            mk(0, &a, &[0, 1]),
            mk(1, &a, &[1, 0]),
            mk(2, &b, &[1, 0]),
            mk(3, &b, &[0, 1]),
        ],
    )
    .unwrap();
    let states = (0..2).map(|k| DensityOperator::pure(&b.column(k)).unwrap()).collect();
    let env = Environment::new(
        vec!["b0".into(), "b1".into()],
        labels.clone(),
        states,
        vec![vec![0.5, 0.0], vec![0.0, 0.5]],
    )
    .unwrap();
    let loss = LossFunction::zero_one(labels).unwrap();
    let opts = QermOptions::new(0.2, 0.1).with_strategy(PartitionStrategy::Exact);
    for seed in 0..10 {
        let report = run_qerm_env(&class, &loss, &env, &opts, &mut rng::seeded(seed)).unwrap();
        assert_eq!(report.m(), 2);
        assert_eq!(report.selected.r, 1);
        assert_eq!(report.selected.id, 3);
        assert_eq!(report.emp_loss_selected, 0.0);
        assert!(report.excess.unwrap().abs() < 1e-12);
    }
}

#[test]
fn naive_equals_qerm_for_a_single_predictor() {
    let mut r = rng::seeded(12);
    let class = random_class(3, 2, 1, ClassStructure::SharedBasis, &mut r).unwrap();
    let env = random_environment(3, 3, 2, &mut r);
    let loss = LossFunction::zero_one(labels(2)).unwrap();
    let opts = QermOptions::new(0.25, 0.1);
    let mut s1 = draw_samples(&env, 2000, &mut rng::seeded(1)).unwrap();
    let mut s2 = draw_samples(&env, 2000, &mut rng::seeded(1)).unwrap();
    let a = run_qerm(&class, &loss, &mut s1, &opts, &mut rng::seeded(9)).unwrap();
    let b = run_naive(&class, &loss, &mut s2, &opts, &mut rng::seeded(9)).unwrap();
    assert_eq!(a.empirical_losses, b.empirical_losses);
    assert_eq!(a.n_total, b.n_total);
}

#[test]
fn every_sample_measured_at_most_once() {
    let mut r = rng::seeded(21);
    let class = random_class(2, 2, 5, ClassStructure::HaarRandom, &mut r).unwrap();
    let env = random_environment(2, 2, 2, &mut r);
    let loss = LossFunction::zero_one(labels(2)).unwrap();
    let opts = QermOptions::new(0.3, 0.2).with_mode(BatchMode::Budget(50));
    let mut samples = draw_samples(&env, 60, &mut r).unwrap();
    run_qerm(&class, &loss, &mut samples, &opts, &mut r).unwrap();
    assert!(samples[..50].iter().all(TrainingSample::is_consumed));
    assert!(samples[50..].iter().all(|s| !s.is_consumed()));
    let err = run_qerm(&class, &loss, &mut samples, &opts, &mut r).unwrap_err();
    assert_eq!(err, Error::SampleConsumed(0));

    let mut fresh = TrainingSample::new(0, 0, Arc::clone(&env.states()[0])).with_id(7);
    let basis = &partition_compatible(&class, Strategy::Greedy).unwrap().bases()[0].clone();
    measure_subclass(basis, &mut fresh, &loss, &mut r).unwrap();
    assert_eq!(
        measure_subclass(basis, &mut fresh, &loss, &mut r).unwrap_err(),
        Error::SampleConsumed(7)
    );
}

#[test]
fn bloch_preset_meets_the_guarantee() {
    let env = bloch_spin_preset(BlochGrid { n_theta: 10, n_phi: 10 }, [1, 1, 1]).unwrap();
    let mut r = rng::seeded(3);
    let base = random_class(2, 2, 6, ClassStructure::Blocks(3), &mut r).unwrap();
    let names = env.labels().to_vec();
    let predictors = base
        .predictors()
        .iter()
        .map(|p| {
            Predictor::new(
                p.id,
                ProjectivePovm::from_elements(names.clone(), p.povm.elements().to_vec()).unwrap(),
            )
        })
        .collect();
    let class = ConceptClass::new(names.clone(), predictors).unwrap();
    let loss = LossFunction::zero_one(names).unwrap();
    let (epsilon, delta, trials) = (0.2, 0.1, 200);
    let opts = QermOptions::new(epsilon, delta);
    let failures = (0..trials)
        .filter(|&t| {
            let report = run_qerm_env(&class, &loss, &env, &opts, &mut rng::trial_stream(40, t)).unwrap();
            report.failed(epsilon).unwrap()
        })
        .count();
    let rate = failures as f64 / trials as f64;
    assert!(
        rate <= delta + 3.0 * (delta * (1.0 - delta) / trials as f64).sqrt(),
        "rate {rate}"
    );
}

#[test]
fn excess_risk_shrinks_with_budget() {
    let mut r = rng::seeded(15);
    let class = random_class(2, 2, 6, ClassStructure::HaarRandom, &mut r).unwrap();
    let env = random_environment(2, 6, 2, &mut r);
    let loss = LossFunction::zero_one(labels(2)).unwrap();
    let trials = 200u64;
    let mut medians = Vec::new();
    let mut means = Vec::new();
    for n in [12, 120, 1200, 12000] {
        let opts = QermOptions::new(0.2, 0.1).with_mode(BatchMode::Budget(n));
        let mut excess: Vec<f64> = (0..trials)
            .map(|t| {
                run_qerm_env(&class, &loss, &env, &opts, &mut rng::trial_stream(100, t))
                    .unwrap()
                    .excess
                    .unwrap()
            })
            .collect();
        means.push(excess.iter().sum::<f64>() / trials as f64);
        excess.sort_by(f64::total_cmp);
        medians.push(excess[trials as usize / 2]);
    }
    assert!(medians.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{medians:?}");
    assert!(means[3] < means[0], "{means:?}");
}
