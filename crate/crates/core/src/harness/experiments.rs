//! Command implementations as library functions returning row structs.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ConcentrationConfig, ExperimentConfig, Scenario};
use super::manifest::{ClassManifest, EnvironmentManifest, PartitionExport};
use super::HarnessError;
use crate::concept::{
    compatible_class_bound, objective_of_partition, partition_with, singleton_partition, true_risk, ConceptClass,
    LossFunction, PartitionOptions, Strategy,
};
use crate::env::classical_risk;
use crate::qerm::{
    check_concentration, deviation_bound, hoeffding_tail, plan_run, run_planned_env, uniform_exceedance, BatchMode,
    Observable, PartitionStrategy, QermOptions, StateSource,
};
use crate::quantum::{c64, DensityOperator, Povm};
use crate::{rng, Error};

/// Three binomial standard deviations at rate `p` over `trials` draws.
pub fn binomial_margin(p: f64, trials: usize) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

fn is_infeasible(e: &Error) -> bool {
    matches!(
        e,
        Error::InfeasibleBudget { .. } | Error::InsufficientSamples { .. } | Error::ExactLimit { .. }
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrategyObjective {
    pub strategy: Strategy,
    pub m: usize,
    pub objective: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionReport {
    #[serde(flatten)]
    pub partition: PartitionExport,
    pub epsilon: f64,
    pub delta: f64,
    /// Sample bound of every strategy that ran; singleton is always present.
    pub objectives: Vec<StrategyObjective>,
    /// Strategy with the smallest sample bound.
    pub winner: Strategy,
    /// `⌈(2/ε²) ln(|C|/δ)⌉`, meaningful when the whole class is compatible.
    pub compatible_class_bound: usize,
}

/// Partitions `class` with `strategy` and reports the sample bound of every
/// strategy alongside it.
pub fn partition_report(
    class: &ConceptClass,
    strategy: PartitionStrategy,
    epsilon: f64,
    delta: f64,
    options: PartitionOptions,
) -> Result<PartitionReport, HarnessError> {
    let mut candidates = Vec::new();
    if class.len() <= options.exact_limit {
        candidates.push(partition_with(class, Strategy::Exact, options)?);
    } else if strategy == PartitionStrategy::Exact {
        return Err(Error::ExactLimit {
            size: class.len(),
            limit: options.exact_limit,
        }
        .into());
    }
    candidates.push(partition_with(class, Strategy::Greedy, options)?);
    candidates.push(singleton_partition(class)?);

    let mut objectives = Vec::new();
    for p in &candidates {
        objectives.push(StrategyObjective {
            strategy: p.strategy(),
            m: p.m(),
            objective: objective_of_partition(p, epsilon, delta)?,
        });
    }
    // Ties keep the earlier candidate: exact, then greedy, then singleton.
    let best = (0..candidates.len())
        .min_by_key(|&i| (objectives[i].objective, i))
        .expect("singleton always present");
    let chosen = match strategy {
        PartitionStrategy::Best => best,
        PartitionStrategy::Exact => 0,
        PartitionStrategy::Greedy => candidates.len() - 2,
        PartitionStrategy::Singleton => candidates.len() - 1,
    };
    let p = &candidates[chosen];
    Ok(PartitionReport {
        partition: PartitionExport {
            m: p.m(),
            subclasses: p.ids(class),
            strategy: p.strategy().to_string(),
            objective: objectives[chosen].objective,
        },
        epsilon,
        delta,
        objectives,
        winner: candidates[best].strategy(),
        compatible_class_bound: compatible_class_bound(class.len(), epsilon, delta)?,
    })
}

/// One QERM trial, or one infeasible grid point (`trial` empty).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: Option<usize>,
    pub epsilon: f64,
    pub delta: f64,
    pub m: Option<usize>,
    pub n_total: Option<usize>,
    pub selected_id: Option<usize>,
    pub emp_loss: Option<f64>,
    pub true_risk: Option<f64>,
    pub opt: Option<f64>,
    pub excess: Option<f64>,
    pub failed: Option<bool>,
    pub mode: &'static str,
    pub budget: Option<usize>,
    pub strategy: Option<Strategy>,
    pub status: String,
    pub config_hash: String,
    pub seed: u64,
}

/// Failure statistics of one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSummary {
    pub epsilon: f64,
    pub delta: f64,
    pub mode: &'static str,
    pub budget: Option<usize>,
    pub strategy: Option<Strategy>,
    pub m: Option<usize>,
    pub n_total: Option<usize>,
    pub trials: usize,
    pub failures: usize,
    pub failure_rate: Option<f64>,
    /// `δ + 3σ` at the configured trial count.
    pub allowed_rate: f64,
    pub within_bound: Option<bool>,
    pub median_excess: Option<f64>,
    pub mean_excess: Option<f64>,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sweep {
    pub rows: Vec<TrialRow>,
    pub summary: Vec<GridSummary>,
}

impl Sweep {
    pub fn any_infeasible(&self) -> bool {
        self.summary.iter().any(|s| s.status != "ok")
    }
}

fn mode_name(mode: BatchMode) -> (&'static str, Option<usize>) {
    match mode {
        BatchMode::Complexity => ("complexity", None),
        BatchMode::Budget(n) => ("budget", Some(n)),
    }
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    })
}

/// Runs `config.trials` independent trials at every `(ε, δ, mode)` grid
/// point. Trial `t` uses the stream seeded with `seed + t`; rows come out
/// sorted by grid point, then trial. With `naive` set the singleton
/// partition is forced.
pub fn run_sweep(config: &ExperimentConfig, scenario: &Scenario, naive: bool) -> Result<Sweep, HarnessError> {
    let env = scenario
        .env
        .as_ref()
        .ok_or_else(|| HarnessError::Config("qerm needs an environment".into()))?;
    let hash = config.hash();
    let strategy = if naive {
        PartitionStrategy::Singleton
    } else {
        config.strategy
    };
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &epsilon in &config.epsilon {
        for &delta in &config.delta {
            for mode in config.modes() {
                let (mode_label, budget) = mode_name(mode);
                let opts = QermOptions::new(epsilon, delta)
                    .with_strategy(strategy)
                    .with_mode(mode)
                    .with_partition(config.partition_options());
                let row_base = |trial: Option<usize>, status: String| TrialRow {
                    trial,
                    epsilon,
                    delta,
                    m: None,
                    n_total: None,
                    selected_id: None,
                    emp_loss: None,
                    true_risk: None,
                    opt: None,
                    excess: None,
                    failed: None,
                    mode: mode_label,
                    budget,
                    strategy: None,
                    status,
                    config_hash: hash.clone(),
                    seed: config.seed,
                };
                let mut point = GridSummary {
                    epsilon,
                    delta,
                    mode: mode_label,
                    budget,
                    strategy: None,
                    m: None,
                    n_total: None,
                    trials: config.trials,
                    failures: 0,
                    failure_rate: None,
                    allowed_rate: delta + binomial_margin(delta, config.trials),
                    within_bound: None,
                    median_excess: None,
                    mean_excess: None,
                    status: "ok".into(),
                };
                let (partition, plan) = match plan_run(&scenario.class, &scenario.loss, &opts) {
                    Ok(p) => p,
                    Err(e) if is_infeasible(&e) => {
                        let status = format!("infeasible: {e}");
                        log::warn!("epsilon={epsilon} delta={delta} {mode_label}: {e}");
                        rows.push(row_base(None, status.clone()));
                        point.status = status;
                        summary.push(point);
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                };
                log::info!(
                    "epsilon={epsilon} delta={delta} {mode_label}: m={} n_total={} over {} trials",
                    partition.m(),
                    plan.total(),
                    config.trials
                );
                let reports = (0..config.trials)
                    .into_par_iter()
                    .map(|trial| {
                        let mut stream = rng::trial_stream(config.seed, trial as u64);
                        run_planned_env(&scenario.class, &scenario.loss, env, &partition, &plan, &mut stream)
                    })
                    .collect::<crate::Result<Vec<_>>>()?;
                let mut excesses = Vec::with_capacity(reports.len());
                for (trial, report) in reports.iter().enumerate() {
                    let failed = report.failed(epsilon);
                    point.failures += usize::from(failed == Some(true));
                    excesses.extend(report.excess);
                    rows.push(TrialRow {
                        m: Some(report.m()),
                        n_total: Some(report.n_total),
                        selected_id: Some(report.selected.id),
                        emp_loss: Some(report.emp_loss_selected),
                        true_risk: report.true_risk_selected,
                        opt: report.opt,
                        excess: report.excess,
                        failed,
                        strategy: Some(report.strategy),
                        ..row_base(Some(trial), "ok".into())
                    });
                }
                let rate = point.failures as f64 / config.trials as f64;
                point.strategy = Some(partition.strategy());
                point.m = Some(partition.m());
                point.n_total = Some(plan.total());
                point.failure_rate = Some(rate);
                point.within_bound = Some(rate <= point.allowed_rate);
                point.mean_excess = Some(excesses.iter().sum::<f64>() / excesses.len() as f64);
                point.median_excess = median(&mut excesses);
                summary.push(point);
            }
        }
    }
    Ok(Sweep { rows, summary })
}

/// Partition size and total sample demand of a strategy in complexity mode.
pub fn sample_demand(
    class: &ConceptClass,
    loss: &LossFunction,
    strategy: PartitionStrategy,
    epsilon: f64,
    delta: f64,
) -> crate::Result<(usize, usize)> {
    let opts = QermOptions::new(epsilon, delta).with_strategy(strategy);
    let (partition, plan) = plan_run(class, loss, &opts)?;
    Ok((partition.m(), plan.total()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub epsilon: f64,
    pub delta: f64,
    pub strategy: Strategy,
    pub qerm_m: usize,
    pub qerm_n: usize,
    pub naive_m: usize,
    pub naive_n: usize,
    /// `naive_n / qerm_n`.
    pub ratio: f64,
    pub trials: usize,
    pub qerm_failure_rate: Option<f64>,
    pub naive_failure_rate: Option<f64>,
    pub config_hash: String,
    pub seed: u64,
}

/// Sample demand of QERM against the one-batch-per-predictor baseline at
/// each `(ε, δ)`, in complexity mode. When the scenario has an environment,
/// both learners also run `config.trials` trials and report failure rates.
pub fn compare(config: &ExperimentConfig, scenario: &Scenario) -> Result<Vec<CompareRow>, HarnessError> {
    let hash = config.hash();
    let complexity = ExperimentConfig {
        mode: super::config::ModeKind::Complexity,
        n: Vec::new(),
        ..config.clone()
    };
    let mut rows = Vec::new();
    for &epsilon in &config.epsilon {
        for &delta in &config.delta {
            let opts = QermOptions::new(epsilon, delta)
                .with_strategy(config.strategy)
                .with_partition(config.partition_options());
            let (partition, plan) = plan_run(&scenario.class, &scenario.loss, &opts)?;
            let (naive_m, naive_n) = sample_demand(
                &scenario.class,
                &scenario.loss,
                PartitionStrategy::Singleton,
                epsilon,
                delta,
            )?;
            let (qerm_rate, naive_rate) = match &scenario.env {
                Some(_) => {
                    let point = ExperimentConfig {
                        epsilon: vec![epsilon],
                        delta: vec![delta],
                        ..complexity.clone()
                    };
                    let q = run_sweep(&point, scenario, false)?;
                    let n = run_sweep(&point, scenario, true)?;
                    (q.summary[0].failure_rate, n.summary[0].failure_rate)
                }
                None => (None, None),
            };
            rows.push(CompareRow {
                epsilon,
                delta,
                strategy: partition.strategy(),
                qerm_m: partition.m(),
                qerm_n: plan.total(),
                naive_m,
                naive_n,
                ratio: naive_n as f64 / plan.total() as f64,
                trials: config.trials,
                qerm_failure_rate: qerm_rate,
                naive_failure_rate: naive_rate,
                config_hash: hash.clone(),
                seed: config.seed,
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationRow {
    /// `hoeffding`: one observable against its tail bound. `uniform`: the
    /// largest deviation over a compatible subclass against the uniform radius.
    pub kind: &'static str,
    pub subclass: Option<usize>,
    pub class_size: Option<usize>,
    pub n: usize,
    pub delta: f64,
    /// Deviation threshold `t` (or the uniform radius).
    pub threshold: f64,
    /// Analytic probability bound at the threshold.
    pub bound: f64,
    pub trials: usize,
    pub exceedances: usize,
    pub rate: f64,
    pub margin: f64,
    pub within_bound: bool,
    pub config_hash: String,
    pub seed: u64,
}

fn default_observable() -> crate::Result<(Observable, StateSource)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityOperator::pure(&[c64(s, 0.0), c64(s, 0.0)])?;
    Ok((
        Observable::new(vec![0.0, 1.0], Povm::computational_basis(2))?,
        StateSource::constant(plus),
    ))
}

fn concentration_inputs(c: &ConcentrationConfig) -> crate::Result<(Observable, StateSource)> {
    let (default_obs, default_src) = default_observable()?;
    let observable = match &c.observable {
        Some(o) => Observable::new(o.values.clone(), o.povm.to_povm()?)?,
        None => default_obs,
    };
    let source = match &c.source {
        Some(s) => {
            let states = s
                .states
                .iter()
                .map(|op| DensityOperator::from_matrix(op.to_matrix()?))
                .collect::<crate::Result<Vec<_>>>()?;
            StateSource::new(s.weights.clone(), states)?
        }
        None => default_src,
    };
    Ok((observable, source))
}

/// Empirical exceedance tables for the single-observable tail bound and, when
/// a class and environment are configured, for the uniform deviation radius
/// over each greedy compatible subclass.
pub fn concentration(
    config: &ExperimentConfig,
    scenario: Option<&Scenario>,
) -> Result<Vec<ConcentrationRow>, HarnessError> {
    let c = config
        .concentration
        .as_ref()
        .ok_or_else(|| HarnessError::Config("config has no concentration section".into()))?;
    let trials = c.trials.unwrap_or(config.trials);
    let hash = config.hash();
    let (observable, source) = concentration_inputs(c)?;
    let range = observable.range();

    let mut rows = Vec::new();
    let mut stream_index = 0u64;
    for &n in &c.n {
        for &delta in &config.delta {
            let mut stream = rng::split(config.seed, stream_index);
            stream_index += 1;
            let t = deviation_bound(n, range, delta)?;
            let out = check_concentration(&observable, &source, n, trials, t, &mut stream)?;
            let bound = hoeffding_tail(n, t, range);
            let margin = binomial_margin(bound.min(1.0), trials);
            rows.push(ConcentrationRow {
                kind: "hoeffding",
                subclass: None,
                class_size: None,
                n,
                delta,
                threshold: t,
                bound,
                trials,
                exceedances: out.exceedances,
                rate: out.rate,
                margin,
                within_bound: out.rate <= bound + margin,
                config_hash: hash.clone(),
                seed: config.seed,
            });
        }
    }

    if let (true, Some(s)) = (c.uniform, scenario) {
        if let Some(env) = &s.env {
            let partition = partition_with(&s.class, Strategy::Greedy, config.partition_options())?;
            for (r, positions) in partition.subclasses().iter().enumerate() {
                let sub = s.class.subset(positions)?;
                for &n in &c.n {
                    for &delta in &config.delta {
                        let mut stream = rng::split(config.seed, stream_index);
                        stream_index += 1;
                        let (radius, out) = uniform_exceedance(&sub, &s.loss, env, n, trials, delta, &mut stream)?;
                        let margin = binomial_margin(delta, trials);
                        rows.push(ConcentrationRow {
                            kind: "uniform",
                            subclass: Some(r),
                            class_size: Some(sub.len()),
                            n,
                            delta,
                            threshold: radius,
                            bound: delta,
                            trials,
                            exceedances: out.exceedances,
                            rate: out.rate,
                            margin,
                            within_bound: out.rate <= delta + margin,
                            config_hash: hash.clone(),
                            seed: config.seed,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbedRisk {
    pub id: usize,
    pub quantum_risk: f64,
    pub classical_risk: f64,
    pub abs_diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbedReport {
    /// Number of compatible subclasses found by the exact partitioner.
    pub m: usize,
    pub risks: Vec<EmbedRisk>,
    pub class: ClassManifest,
    pub environment: EnvironmentManifest,
}

/// Embeds the classical problem of the config and compares the quantum true
/// risk of every embedded function with its classical expected loss.
pub fn embed_classical(config: &ExperimentConfig) -> Result<EmbedReport, HarnessError> {
    let problem = config.classical()?;
    let (env, class) = problem.embed()?;
    let loss_config = config
        .loss
        .clone()
        .unwrap_or_else(super::manifest::LossConfig::zero_one);
    let loss = loss_config.build(class.labels())?;
    let options = config.partition_options();
    let strategy = if class.len() <= options.exact_limit {
        Strategy::Exact
    } else {
        Strategy::Greedy
    };
    let m = partition_with(&class, strategy, options)?.m();
    let risks = class
        .predictors()
        .iter()
        .zip(&problem.functions)
        .map(|(p, f)| {
            let quantum_risk = true_risk(p, &env, &loss)?;
            let classical_risk = classical_risk(&problem.dist, &loss, f);
            Ok(EmbedRisk {
                id: p.id,
                quantum_risk,
                classical_risk,
                abs_diff: (quantum_risk - classical_risk).abs(),
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(EmbedReport {
        m,
        risks,
        class: ClassManifest::from_class(&class, Some(loss_config)),
        environment: EnvironmentManifest::from_env(&env),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn realizable(k: usize, structure: &str, extra: &str) -> (ExperimentConfig, Scenario) {
        let text = format!(
            r#"{{"class": {{"random": {{"dim": 4, "labels": 2, "k": {k}, "structure": {structure}}}}},
                "environment": {{"realizable": {{"target": 0}}}}, "seed": 11{extra}}}"#
        );
        let config = ExperimentConfig::from_json(&text).unwrap();
        let scenario = config.scenario(Path::new(".")).unwrap();
        (config, scenario)
    }

    #[test]
    fn shared_basis_partition_is_single() {
        let (_, s) = realizable(8, "\"shared_basis\"", "");
        let report =
            partition_report(&s.class, PartitionStrategy::Best, 0.2, 0.1, PartitionOptions::default()).unwrap();
        assert_eq!(report.partition.m, 1);
        assert_eq!(report.partition.objective, 1016);
        assert!(report.objectives.iter().any(|o| o.strategy == Strategy::Singleton));
    }

    #[test]
    fn one_trial_one_row() {
        let (c, s) = realizable(4, "\"shared_basis\"", "");
        let sweep = run_sweep(&c, &s, false).unwrap();
        assert_eq!(sweep.rows.len(), 1);
        assert_eq!(sweep.rows[0].trial, Some(0));
        assert!(sweep.rows[0].opt.unwrap().abs() < 1e-12);
    }

    #[test]
    fn infeasible_budget_reported_not_fatal() {
        let (c, s) = realizable(
            6,
            "{\"blocks\": 3}",
            r#", "mode": "budget", "n": [2, 30], "strategy": "singleton""#,
        );
        let sweep = run_sweep(&c, &s, false).unwrap();
        assert!(sweep.any_infeasible());
        assert!(sweep.rows[0].status.starts_with("infeasible"));
        assert_eq!(sweep.rows[1].n_total, Some(30));
    }

    #[test]
    fn demand_ratio_for_single_predictor_is_one() {
        let (c, s) = realizable(1, "\"shared_basis\"", "");
        let rows = compare(&c, &s).unwrap();
        assert_eq!(rows[0].ratio, 1.0);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&mut []), None);
    }
}
