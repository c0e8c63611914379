//! R-cortisol dynamics.
//!
//! The level follows an explicit-Euler step of
//!
//! ```text
//! dc/dt = rho * s_eff * (c_max - c) - kappa * comfort * c - lambda * (c - c0)
//! ```
//!
//! where `s_eff` is the appraised stress, zeroed when it falls below the
//! profile's stress gate `theta_s`. The result is clamped to `[0, c_max]`.

use crate::appraisal::{appraise, AppraisalResult};
use crate::error::{Error, Result};
use crate::model::{ProfileParams, StimulusFrame};
use crate::scalar::Scalar;

pub fn cortisol_step<T: Scalar>(c: T, appraisal: AppraisalResult<T>, params: &ProfileParams<T>, dt: T) -> Result<T> {
    let inputs = [
        c,
        appraisal.stress,
        appraisal.comfort,
        dt,
        params.rho,
        params.kappa,
        params.lambda,
        params.c0,
        params.c_max,
        params.theta_s,
    ];
    if inputs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    if dt <= T::zero() {
        return Err(Error::InvalidInput(format!("dt = {dt} must be positive")));
    }
    if c < T::zero() || c > params.c_max {
        return Err(Error::InvalidInput(format!(
            "cortisol {c} outside [0, {}]",
            params.c_max
        )));
    }
    let stress = if appraisal.stress >= params.theta_s {
        appraisal.stress
    } else {
        T::zero()
    };
    let drive = params.rho * stress * (params.c_max - c);
    let damping = params.kappa * appraisal.comfort * c;
    let recovery = params.lambda * (c - params.c0);
    let next = c + dt * (drive - damping - recovery);
    Ok(next.max(T::zero()).min(params.c_max))
}

/// Cortisol series for a stream of frames sampled at `tick_hz`, starting
/// from baseline. Element `i` is the level after integrating frame `i`.
pub fn run_dynamics<T: Scalar>(frames: &[StimulusFrame<T>], params: &ProfileParams<T>, tick_hz: u32) -> Result<Vec<T>> {
    params.validate()?;
    if tick_hz == 0 {
        return Err(Error::InvalidInput("tick_hz must be positive".into()));
    }
    let dt = T::one() / T::from_u32(tick_hz).expect("tick rate is representable");
    let mut c = params.c0;
    frames
        .iter()
        .map(|frame| {
            frame.validate()?;
            c = cortisol_step(c, appraise(frame, params), params, dt)?;
            Ok(c)
        })
        .collect()
}

/// Time for `c - c0` to halve under zero input, in the continuous-time limit.
pub fn recovery_halflife<T: Scalar>(params: &ProfileParams<T>) -> T {
    T::LN_2() / params.lambda
}

/// Equilibrium of the continuous-time law under constant appraisal.
pub fn fixed_point<T: Scalar>(appraisal: AppraisalResult<T>, params: &ProfileParams<T>) -> T {
    let stress = if appraisal.stress >= params.theta_s {
        appraisal.stress
    } else {
        T::zero()
    };
    let den = params.rho * stress + params.kappa * appraisal.comfort + params.lambda;
    params.c0 + (params.rho * stress * (params.c_max - params.c0) - params.kappa * appraisal.comfort * params.c0) / den
}
