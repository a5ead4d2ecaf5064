use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{basis_probabilities, TrainingSample};
use crate::concept::{
    loss_observable, partition_compatible, true_risk, ConceptClass, LossFunction, LossObservable, Strategy,
};
use crate::env::{draw_samples, Environment};
use crate::quantum::{born_distribution, sample_index, DensityOperator, Povm};
use crate::{rng, Error, Result};

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta {delta} not in (0, 1)")));
    }
    Ok(())
}

/// Deviation `t = (b-a) √((2/n) ln(2/δ))` at which the tail bound
/// `2 exp(-n t² / (2 (b-a)²))` equals `δ`.
pub fn deviation_bound(n: usize, range: f64, delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if range.is_nan() || range <= 0.0 {
        return Err(Error::InvalidParameter(format!("range {range} must be positive")));
    }
    check_delta(delta)?;
    Ok(range * ((2.0 / n as f64) * (2.0 / delta).ln()).sqrt())
}

/// `2 exp(-n t² / (2 (b-a)²))`.
pub fn hoeffding_tail(n: usize, t: f64, range: f64) -> f64 {
    2.0 * (-(n as f64) * t * t / (2.0 * range * range)).exp()
}

/// Uniform deviation radius `√((2/n) ln(2|C|/δ))` for a compatible class
/// measured jointly on `n` samples.
pub fn uniform_radius(n: usize, class_size: usize, delta: f64) -> Result<f64> {
    if n == 0 || class_size == 0 {
        return Err(Error::InvalidParameter("n and class size must be positive".into()));
    }
    check_delta(delta)?;
    Ok(((2.0 / n as f64) * (2.0 * class_size as f64 / delta).ln()).sqrt())
}

/// Radius `√((2|C|/n) ln(2/δ))` of the one-batch-per-predictor baseline.
pub fn naive_radius(n: usize, class_size: usize, delta: f64) -> Result<f64> {
    if n == 0 || class_size == 0 {
        return Err(Error::InvalidParameter("n and class size must be positive".into()));
    }
    check_delta(delta)?;
    Ok(((2.0 * class_size as f64 / n as f64) * (2.0 / delta).ln()).sqrt())
}

/// Real-valued measurement: one value per POVM outcome.
#[derive(Clone, Debug)]
pub struct Observable {
    pub values: Vec<f64>,
    pub povm: Povm,
}

impl Observable {
    pub fn new(values: Vec<f64>, povm: Povm) -> Result<Self> {
        if values.len() != povm.len() {
            return Err(Error::OutcomeCount {
                outcomes: values.len(),
                elements: povm.len(),
            });
        }
        Ok(Self { values, povm })
    }

    pub fn range(&self) -> f64 {
        let lo = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }

    /// `⟨M⟩_ρ = Σ_v v tr(M_v ρ)`.
    pub fn expectation(&self, rho: &DensityOperator) -> Result<f64> {
        let p = born_distribution(&self.povm, rho)?;
        Ok(p.iter().zip(&self.values).map(|(p, v)| p * v).sum())
    }
}

impl From<LossObservable> for Observable {
    fn from(o: LossObservable) -> Self {
        Self {
            values: o.values,
            povm: o.povm,
        }
    }
}

/// IID source of states: state `i` is emitted with probability `weights[i]`.
#[derive(Clone, Debug)]
pub struct StateSource {
    weights: Vec<f64>,
    states: Vec<DensityOperator>,
}

impl StateSource {
    pub fn new(weights: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::InvalidDistribution("weights and states must align".into()));
        }
        let parts: Vec<(f64, &DensityOperator)> = weights.iter().copied().zip(states.iter()).collect();
        DensityOperator::mixture(&parts)?;
        Ok(Self { weights, states })
    }

    pub fn constant(rho: DensityOperator) -> Self {
        Self {
            weights: vec![1.0],
            states: vec![rho],
        }
    }

    pub fn average(&self) -> Result<DensityOperator> {
        let parts: Vec<(f64, &DensityOperator)> = self.weights.iter().copied().zip(self.states.iter()).collect();
        DensityOperator::mixture(&parts)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConcentrationOutcome {
    pub trials: usize,
    pub exceedances: usize,
    pub rate: f64,
    /// `⟨M⟩` in the average state.
    pub expectation: f64,
}

/// Fraction of `trials` independent `n`-sample empirical means of `observable`
/// whose distance from `⟨M⟩_ρ̄` is at least `t`.
pub fn check_concentration<R: Rng + ?Sized>(
    observable: &Observable,
    source: &StateSource,
    n: usize,
    trials: usize,
    t: f64,
    rng: &mut R,
) -> Result<ConcentrationOutcome> {
    if n == 0 || trials == 0 {
        return Err(Error::InvalidParameter("n and trials must be positive".into()));
    }
    let expectation = observable.expectation(&source.average()?)?;
    let outcome_probs = source
        .states
        .iter()
        .map(|rho| born_distribution(&observable.povm, rho))
        .collect::<Result<Vec<_>>>()?;
    let seed: u64 = rng.random();
    let exceedances = (0..trials)
        .into_par_iter()
        .filter(|&trial| {
            let mut stream = rng::split(seed, trial as u64);
            let mut sum = 0.0;
            for _ in 0..n {
                let s = if source.states.len() == 1 {
                    0
                } else {
                    sample_index(&source.weights, &mut stream)
                };
                sum += observable.values[sample_index(&outcome_probs[s], &mut stream)];
            }
            (sum / n as f64 - expectation).abs() >= t
        })
        .count();
    Ok(ConcentrationOutcome {
        trials,
        exceedances,
        rate: exceedances as f64 / trials as f64,
        expectation,
    })
}

/// Fraction of trials in which the largest deviation between empirical and
/// true loss over a compatible class, measured jointly on `n` samples,
/// reaches the uniform radius at `delta`.
pub fn uniform_exceedance<R: Rng + ?Sized>(
    class: &ConceptClass,
    loss: &LossFunction,
    env: &Environment,
    n: usize,
    trials: usize,
    delta: f64,
    rng: &mut R,
) -> Result<(f64, ConcentrationOutcome)> {
    let radius = uniform_radius(n, class.len(), delta)?;
    let partition = partition_compatible(class, Strategy::Greedy)?;
    if partition.m() != 1 {
        return Err(Error::InvalidClass(format!(
            "class splits into {} subclasses",
            partition.m()
        )));
    }
    let risks = class
        .predictors()
        .iter()
        .map(|p| true_risk(p, env, loss))
        .collect::<Result<Vec<_>>>()?;
    let basis = &partition.bases()[0];
    let order = &partition.subclasses()[0];
    let seed: u64 = rng.random();
    let exceed = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<bool> {
            let mut stream = rng::split(seed, trial as u64);
            let mut samples: Vec<TrainingSample> = draw_samples(env, n, &mut stream)?;
            let mut sums = vec![0.0; order.len()];
            for s in samples.iter_mut() {
                let probs = basis_probabilities(basis, s.state())?;
                let z = super::measure_with_probabilities(basis, &probs, s, loss, &mut stream)?;
                for (acc, v) in sums.iter_mut().zip(z) {
                    *acc += v;
                }
            }
            let worst = order
                .iter()
                .zip(&sums)
                .map(|(&pos, s)| (s / n as f64 - risks[pos]).abs())
                .fold(0.0, f64::max);
            Ok(worst >= radius)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&e| e)
        .count();
    Ok((
        radius,
        ConcentrationOutcome {
            trials,
            exceedances: exceed,
            rate: exceed as f64 / trials as f64,
            expectation: f64::NAN,
        },
    ))
}

/// Loss observable of a predictor, as a plain observable.
pub fn loss_as_observable(p: &crate::concept::Predictor, loss: &LossFunction) -> Result<Observable> {
    Ok(loss_observable(p, loss)?.into())
}
