//! The battery a candidate profile must pass to count as a solution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::{ode_residual, RESIDUAL_WINDOW};
use crate::pohozaev::identity_residual;
use crate::profile::VProfile;
use crate::scaling::{membership_report, phi_from_v, Parameters};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Positivity,
    HMembership,
    LpMembership,
    PohozaevResidual,
    OdeResidual,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: Check,
    pub passed: bool,
    pub value: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckTolerances {
    /// Relative finite-difference residual over `ode_window` (in `t`).
    pub ode: f64,
    pub ode_window: (f64, f64),
    /// Normalized identity residual over `pohozaev_window` (in `r`).
    pub pohozaev: f64,
    pub pohozaev_window: (f64, f64),
}

impl Default for CheckTolerances {
    fn default() -> Self {
        Self { ode: 1e-6, ode_window: RESIDUAL_WINDOW, pohozaev: 1e-5, pohozaev_window: (0.1, 10.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionReport {
    pub outcomes: Vec<CheckOutcome>,
    pub failed: Vec<Check>,
    pub pass: bool,
}

impl SolutionReport {
    pub fn outcome(&self, check: Check) -> Option<&CheckOutcome> {
        self.outcomes.iter().find(|o| o.check == check)
    }
}

/// Runs every check; an evaluation error counts as a failure of that check.
pub fn check_solution(params: &Parameters, v: &VProfile, tol: &CheckTolerances) -> Result<SolutionReport> {
    let mut outcomes = Vec::with_capacity(5);
    let min = v.min_value();
    outcomes.push(CheckOutcome {
        check: Check::Positivity,
        passed: min > 0.0,
        value: Some(min),
        detail: format!("min v = {min:e}"),
    });
    match membership_report(params, v) {
        Ok(m) => {
            let note = m.inconclusive.clone().unwrap_or_default();
            outcomes.push(CheckOutcome {
                check: Check::HMembership,
                passed: m.in_h(),
                value: Some(m.norms.weighted_l2_grad),
                detail: format!("|v|^2 = {:e}, |v'|^2 = {:e} {note}", m.norms.weighted_l2, m.norms.weighted_l2_grad),
            });
            outcomes.push(CheckOutcome {
                check: Check::LpMembership,
                passed: m.in_lp_r,
                value: Some(m.norms.lp_r),
                detail: format!("int phi^p r^(N-1) dr = {:e} {note}", m.norms.lp_r),
            });
        }
        Err(e) => {
            for check in [Check::HMembership, Check::LpMembership] {
                outcomes.push(CheckOutcome { check, passed: false, value: None, detail: e.to_string() });
            }
        }
    }
    outcomes.push(match pohozaev(params, v, tol) {
        Ok(x) => CheckOutcome {
            check: Check::PohozaevResidual,
            passed: x <= tol.pohozaev,
            value: Some(x),
            detail: format!("normalized residual {x:e} on r in {:?}", tol.pohozaev_window),
        },
        Err(e) => CheckOutcome { check: Check::PohozaevResidual, passed: false, value: None, detail: e.to_string() },
    });
    outcomes.push(match ode_residual(params, v, tol.ode_window) {
        Ok(r) => CheckOutcome {
            check: Check::OdeResidual,
            passed: r.relative <= tol.ode,
            value: Some(r.relative),
            detail: format!("relative residual {:e} on t in {:?}", r.relative, r.window),
        },
        Err(e) => CheckOutcome { check: Check::OdeResidual, passed: false, value: None, detail: e.to_string() },
    });
    let failed: Vec<Check> = outcomes.iter().filter(|o| !o.passed).map(|o| o.check).collect();
    Ok(SolutionReport { pass: failed.is_empty(), outcomes, failed })
}

fn pohozaev(params: &Parameters, v: &VProfile, tol: &CheckTolerances) -> Result<f64> {
    if v.is_zero() {
        return Err(Error::Domain("identically zero profile".into()));
    }
    let phi = phi_from_v(params, v)?;
    let (a, b) = tol.pohozaev_window;
    let (a, b) = (a.max(phi.first()), b.min(phi.last()));
    Ok(identity_residual(params, &phi, a, b)?.normalized)
}
