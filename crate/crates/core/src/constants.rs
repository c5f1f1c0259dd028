//! Closed-form evaluation of the sharp operator-norm constants.
//!
//! Everything funnels through two per-axis factors, both evaluated fully
//! in log space because the `q -> p` regime pushes Beta arguments to
//! `p/(q-p)` where the Beta value underflows long before the final small
//! power brings it back to order one.

use crate::error::{HardyError, Result};
use crate::params::{Mode, ProductParams, RELATION_TOL};
use crate::special::{ln_beta, sphere_area};

/// A constant together with its per-axis factorization.
#[derive(Debug, Clone)]
pub struct ConstantResult {
    pub value: f64,
    pub mode: Mode,
    pub per_axis_factors: Vec<f64>,
    pub formula_id: String,
}

impl ConstantResult {
    fn from_factors(mode: Mode, formula_id: &str, factors: Vec<f64>) -> Self {
        ConstantResult {
            value: factors.iter().product(),
            mode,
            per_axis_factors: factors,
            formula_id: formula_id.to_string(),
        }
    }
}

/// The classical one-dimensional weighted constant `p/(p-1-alpha)`
/// (`alpha = 0` reduces to `p/(p-1)`).
pub fn thm_a_constant(p: f64, alpha: f64) -> Result<f64> {
    if !(p.is_finite() && alpha.is_finite()) || p <= 1.0 {
        return Err(HardyError::domain("requires finite inputs with p > 1"));
    }
    if alpha >= p - 1.0 {
        return Err(HardyError::domain(format!(
            "requires alpha < p - 1, got alpha = {alpha}, p = {p}"
        )));
    }
    Ok(p / (p - 1.0 - alpha))
}

/// The sharp unweighted constant for one factor of dimension `n` with
/// order `beta`, at the forced target exponent `q = (1/p - beta/n)^{-1}`:
/// `(p'/q)^{1/q} ((n/(q beta)) B(n/(q beta), n/(q' beta)))^{-beta/n}`.
pub fn thm_b_constant(n: u32, p: f64, beta: f64) -> Result<f64> {
    let nf = n as f64;
    if !(p > 1.0 && p.is_finite()) || !(beta > 0.0 && beta < nf) {
        return Err(HardyError::domain(
            "requires 1 < p < infinity and 0 < beta < n",
        ));
    }
    let inv_q = 1.0 / p - beta / nf;
    if inv_q <= 0.0 {
        return Err(HardyError::domain(format!(
            "requires 1/p > beta/n (got 1/q = {inv_q})"
        )));
    }
    let q = 1.0 / inv_q;
    let q_prime = q / (q - 1.0);
    let p_prime = p / (p - 1.0);
    let z = nf / (q * beta);
    let w = nf / (q_prime * beta);
    let ln_factor = (p_prime / q).ln() / q - (beta / nf) * (z.ln() + ln_beta(z, w)?);
    Ok(ln_factor.exp())
}

/// The product constant for an unweighted instance: one `thm_b` factor per
/// axis.
pub fn thm1_constant(params: &ProductParams) -> Result<ConstantResult> {
    if params.mode() != Mode::Thm1 {
        return Err(HardyError::domain(format!(
            "expected a thm1-mode instance, got {}",
            params.mode()
        )));
    }
    let factors = params
        .axes()
        .iter()
        .map(|a| thm_b_constant(a.n, params.p(), a.beta))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstantResult::from_factors(Mode::Thm1, "thm1", factors))
}

/// Per-axis factor of the two-weight constant:
/// `|S^{n-1}|^{1/q-1/p+beta/n} n^{1/p-1/q-beta/n}
///  (n(p-1)/(n(p-1)-gamma))^{1/p'+1/q} (p'/q)^{1/q}
///  ((p/(q-p)) B(p/(q-p), pq/(q'(q-p))))^{1/q-1/p}`.
fn two_weight_axis_factor(n: u32, beta: f64, gamma: f64, p: f64, q: f64) -> Result<f64> {
    let nf = n as f64;
    if q <= p {
        return Err(HardyError::domain(
            "the two-weight constant requires p < q; use limit_constant at p = q",
        ));
    }
    if gamma >= nf * (p - 1.0) {
        return Err(HardyError::domain(format!(
            "requires gamma < n(p-1), got gamma = {gamma}"
        )));
    }
    let p_prime = p / (p - 1.0);
    let q_prime = q / (q - 1.0);
    let z = p / (q - p);
    let w = p * q / (q_prime * (q - p));
    let diff = 1.0 / q - 1.0 / p;
    let ln_factor = (diff + beta / nf) * sphere_area(n).ln()
        + (-diff - beta / nf) * nf.ln()
        + (1.0 / p_prime + 1.0 / q) * (nf * (p - 1.0) / (nf * (p - 1.0) - gamma)).ln()
        + (p_prime / q).ln() / q
        + diff * (z.ln() + ln_beta(z, w)?);
    Ok(ln_factor.exp())
}

/// The sharp single-space two-weight constant (`beta = 0`, one factor).
pub fn lemma2_constant(n: u32, p: f64, q: f64, gamma: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite() && q.is_finite()) {
        return Err(HardyError::domain("requires 1 < p <= q < infinity"));
    }
    two_weight_axis_factor(n, 0.0, gamma, p, q)
}

/// The m-fold two-weight sharp constant.
pub fn thm2_constant(params: &ProductParams) -> Result<ConstantResult> {
    match params.mode() {
        Mode::Thm2 | Mode::Lemma2 => {}
        other => {
            return Err(HardyError::domain(format!(
                "expected a thm2/lemma2-mode instance, got {other}"
            )))
        }
    }
    let factors = params
        .axes()
        .iter()
        .map(|a| two_weight_axis_factor(a.n, a.beta, a.gamma, params.p(), params.q()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstantResult::from_factors(params.mode(), "thm2", factors))
}

/// The `q -> p` limiting constant `prod_i p/(p-1-gamma_i/n_i)`, sharp for
/// `beta = 0` at `p = q`.
pub fn limit_constant(params: &ProductParams) -> Result<ConstantResult> {
    let p = params.p();
    let factors = params
        .axes()
        .iter()
        .map(|a| thm_a_constant(p, a.gamma / a.dim()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstantResult::from_factors(Mode::Limit, "limit", factors))
}

/// The pair of product-space constants from the one-dimensional
/// all-orders-zero comparison: `eq4 = prod p/(p-alpha_i-1)` (same power)
/// and `eq5 = (prod q/(r(q-beta_i-1)))^{1/r}` (different power), where
/// `1/q + 1 = 1/p + 1/r`. The symbols follow that result's own notation:
/// its `alpha` is this crate's source weight `gamma` on 1-D axes, and its
/// `beta` is this crate's target weight `alpha`.
pub fn thm_c_constants(p: f64, q: f64, wly_alpha: &[f64], wly_beta: &[f64]) -> Result<(f64, f64)> {
    if !(p > 1.0 && q >= p && q.is_finite()) {
        return Err(HardyError::domain("requires 1 < p <= q < infinity"));
    }
    if wly_alpha.len() != wly_beta.len() || wly_alpha.is_empty() {
        return Err(HardyError::domain("weight lists must match and be nonempty"));
    }
    let r = 1.0 / (1.0 / q + 1.0 - 1.0 / p);
    let mut eq4 = 1.0;
    let mut ln_eq5 = 0.0;
    for (i, (&a, &b)) in wly_alpha.iter().zip(wly_beta).enumerate() {
        if a >= p - 1.0 {
            return Err(HardyError::domain(format!(
                "axis {i}: requires alpha < p - 1, got {a}"
            )));
        }
        let residual = (b + 1.0) / q - (a + 1.0) / p;
        if residual.abs() > RELATION_TOL {
            return Err(HardyError::violation(
                Some(i),
                "(beta+1)/q = (alpha+1)/p",
                residual,
            ));
        }
        eq4 *= p / (p - a - 1.0);
        ln_eq5 += (q / (r * (q - b - 1.0))).ln();
    }
    Ok((eq4, (ln_eq5 / r).exp()))
}

/// Comparison of the sharp two-weight constant against the non-sharp
/// `eq5` bound on its shared domain (1-D axes, order zero).
#[derive(Debug, Clone)]
pub struct WlyComparison {
    pub cstar: f64,
    pub eq5: f64,
    /// `cstar / eq5` (at most 1 up to roundoff: a sharp constant cannot
    /// exceed a valid bound constant).
    pub ratio: f64,
    /// `eq5 - cstar`.
    pub gap: f64,
}

/// Evaluate both constants for a 1-D-axes, order-zero two-weight
/// instance, mapping this crate's weights onto the comparison's notation.
pub fn compare_wly(params: &ProductParams) -> Result<WlyComparison> {
    for (i, a) in params.axes().iter().enumerate() {
        if a.n != 1 {
            return Err(HardyError::domain(format!("axis {i}: requires n = 1")));
        }
        if a.beta != 0.0 {
            return Err(HardyError::domain(format!("axis {i}: requires beta = 0")));
        }
    }
    let cstar = thm2_constant(params)?.value;
    let wly_alpha: Vec<f64> = params.axes().iter().map(|a| a.gamma).collect();
    let wly_beta: Vec<f64> = params.axes().iter().map(|a| a.alpha).collect();
    let (_, eq5) = thm_c_constants(params.p(), params.q(), &wly_alpha, &wly_beta)?;
    Ok(WlyComparison {
        cstar,
        eq5,
        ratio: cstar / eq5,
        gap: eq5 - cstar,
    })
}
