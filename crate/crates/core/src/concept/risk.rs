use super::{loss_observable, ConceptClass, LossFunction, Predictor};
use crate::env::Environment;
use crate::{Error, Result};

fn check_alphabets(p: &Predictor, env: &Environment, loss: &LossFunction) -> Result<()> {
    if p.dim() != env.dim() {
        return Err(Error::DimensionMismatch {
            expected: env.dim(),
            found: p.dim(),
        });
    }
    if env.labels() != loss.labels() || p.povm.outcomes() != loss.labels() {
        return Err(Error::AlphabetMismatch);
    }
    Ok(())
}

/// `Σ_{x,y,ŷ} D(x,y) ℓ(y,ŷ) Re tr(M_ŷ ρ_x)`.
pub fn true_risk(p: &Predictor, env: &Environment, loss: &LossFunction) -> Result<f64> {
    check_alphabets(p, env, loss)?;
    let mut risk = 0.0;
    for (x, rho) in env.states().iter().enumerate() {
        let predicted: Vec<f64> = p.povm.elements().iter().map(|m| m.expectation(rho)).collect();
        for (y, &weight) in env.dist()[x].iter().enumerate() {
            if weight == 0.0 {
                continue;
            }
            for (yh, &prob) in predicted.iter().enumerate() {
                risk += weight * loss.value(y, yh) * prob;
            }
        }
    }
    // Round-off can leave a zero risk at -1e-17.
    Ok(risk.max(0.0))
}

/// Same quantity as [`true_risk`], computed as the expectation of the loss
/// observable in the average feature-label state.
pub fn true_risk_via_observable(p: &Predictor, env: &Environment, loss: &LossFunction) -> Result<f64> {
    check_alphabets(p, env, loss)?;
    let obs = loss_observable(p, loss)?;
    obs.expectation(&env.average_state()?)
}

/// Smallest true risk in the class and its position (lowest on ties).
pub fn opt_risk(class: &ConceptClass, env: &Environment, loss: &LossFunction) -> Result<(f64, usize)> {
    let mut best = (f64::INFINITY, 0);
    for (i, p) in class.predictors().iter().enumerate() {
        let r = true_risk(p, env, loss)?;
        if r < best.0 {
            best = (r, i);
        }
    }
    Ok(best)
}
