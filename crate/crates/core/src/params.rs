//! Exponent and weight parameters, hypothesis validation, and the axis
//! grammar used by the CLI.
//!
//! Every computation in this crate starts from a [`ProductParams`] that has
//! passed [`validate`]: downstream code may assume the governing theorem's
//! hypotheses hold and never re-checks them.

use crate::error::{HardyError, Result};
use std::fmt;

/// Absolute tolerance for residuals of hypothesis identities. The relations
/// are exact in rationals; callers supply binary floats, and 1e-12 separates
/// intent from rounding.
pub const RELATION_TOL: f64 = 1e-12;

/// A Lebesgue exponent pair `1 < p <= q < oo` with conjugates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    pub p: f64,
    pub q: f64,
    pub p_prime: f64,
    pub q_prime: f64,
}

impl Exponents {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && q.is_finite()) {
            return Err(HardyError::domain("exponents must be finite"));
        }
        if p <= 1.0 {
            return Err(HardyError::violation(None, "1 < p", p - 1.0));
        }
        if q < p {
            return Err(HardyError::violation(None, "p <= q", p - q));
        }
        let e = Exponents {
            p,
            q,
            p_prime: p / (p - 1.0),
            q_prime: q / (q - 1.0),
        };
        debug_assert!((1.0 / e.p + 1.0 / e.p_prime - 1.0).abs() <= 1e-14);
        debug_assert!((1.0 / e.q + 1.0 / e.q_prime - 1.0).abs() <= 1e-14);
        Ok(e)
    }
}

/// Per-factor data: dimension `n_i`, fractional order `beta_i`, source power
/// weight `gamma_i` and target power weight `alpha_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisParams {
    pub n: u32,
    pub beta: f64,
    pub gamma: f64,
    pub alpha: f64,
}

impl AxisParams {
    pub fn new(n: u32, beta: f64, gamma: f64, alpha: f64) -> Self {
        AxisParams {
            n,
            beta,
            gamma,
            alpha,
        }
    }

    pub fn dim(&self) -> f64 {
        self.n as f64
    }
}

/// Which theorem governs an instance. `Thm2` requires `p < q`; `p = q` is
/// admitted only under `Limit`, whose constant is the `q -> p` limit value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Thm1,
    Thm2,
    Lemma2,
    Limit,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Thm1 => "thm1",
            Mode::Thm2 => "thm2",
            Mode::Lemma2 => "lemma2",
            Mode::Limit => "limit",
        };
        f.write_str(s)
    }
}

/// A validated problem instance. Immutable after validation; safe to share
/// and send between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductParams {
    axes: Vec<AxisParams>,
    exponents: Exponents,
    mode: Mode,
}

impl ProductParams {
    pub fn axes(&self) -> &[AxisParams] {
        &self.axes
    }

    pub fn exponents(&self) -> Exponents {
        self.exponents
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn m(&self) -> usize {
        self.axes.len()
    }

    pub fn p(&self) -> f64 {
        self.exponents.p
    }

    pub fn q(&self) -> f64 {
        self.exponents.q
    }

    /// Canonical one-line form, also used as the `params` column of reports:
    /// `mode|p=..|q=..|axes=n:beta:gamma:alpha,...`
    pub fn summary(&self) -> String {
        let axes = self
            .axes
            .iter()
            .map(|a| format!("{}:{}:{}:{}", a.n, a.beta, a.gamma, a.alpha))
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "{}|p={}|q={}|axes={}",
            self.mode, self.exponents.p, self.exponents.q, axes
        )
    }
}

/// The unique `alpha` satisfying the compatibility relation
/// `beta + (alpha + n)/q = (gamma + n)/p`.
pub fn derive_alpha(n: u32, beta: f64, gamma: f64, p: f64, q: f64) -> Result<f64> {
    if !(beta.is_finite() && gamma.is_finite() && p.is_finite() && q.is_finite()) {
        return Err(HardyError::domain("derive_alpha requires finite inputs"));
    }
    if p <= 0.0 || q <= 0.0 {
        return Err(HardyError::domain("derive_alpha requires p, q > 0"));
    }
    let n = n as f64;
    Ok(q * ((gamma + n) / p - beta) - n)
}

/// Validate an instance against the hypotheses of its governing theorem.
///
/// Total and deterministic: every input yields exactly one of a validated
/// instance or a [`HardyError::HypothesisViolation`] naming the failed
/// relation.
pub fn validate(axes: &[AxisParams], exponents: Exponents, mode: Mode) -> Result<ProductParams> {
    if axes.is_empty() {
        return Err(HardyError::domain("at least one axis is required"));
    }
    for (i, a) in axes.iter().enumerate() {
        if a.n < 1 {
            return Err(HardyError::violation(Some(i), "n >= 1", -1.0));
        }
        if !(a.beta.is_finite() && a.gamma.is_finite() && a.alpha.is_finite()) {
            return Err(HardyError::domain(format!("axis {i} has non-finite fields")));
        }
    }
    let p = exponents.p;
    let q = exponents.q;

    match mode {
        Mode::Thm1 => {
            if q <= p {
                return Err(HardyError::violation(None, "p < q", p - q));
            }
            for (i, a) in axes.iter().enumerate() {
                let n = a.dim();
                if a.beta <= 0.0 || a.beta >= n {
                    return Err(HardyError::violation(Some(i), "0 < beta < n", a.beta));
                }
                if a.gamma != 0.0 || a.alpha != 0.0 {
                    return Err(HardyError::violation(
                        Some(i),
                        "gamma = alpha = 0",
                        a.gamma.abs().max(a.alpha.abs()),
                    ));
                }
                let residual = 1.0 / q - (1.0 / p - a.beta / n);
                if residual.abs() > RELATION_TOL {
                    return Err(HardyError::violation(Some(i), "1/q = 1/p - beta/n", residual));
                }
            }
        }
        Mode::Thm2 | Mode::Lemma2 => {
            if q <= p {
                return Err(HardyError::violation(None, "p < q", p - q));
            }
            if mode == Mode::Lemma2 {
                if axes.len() != 1 {
                    return Err(HardyError::domain("lemma2 mode is single-axis"));
                }
                if axes[0].beta != 0.0 {
                    return Err(HardyError::violation(Some(0), "beta = 0", axes[0].beta));
                }
            }
            for (i, a) in axes.iter().enumerate() {
                let n = a.dim();
                if a.beta < 0.0 || a.beta >= n {
                    return Err(HardyError::violation(Some(i), "0 <= beta < n", a.beta));
                }
                let bound = n * (p - 1.0);
                if a.gamma >= bound {
                    return Err(HardyError::violation(
                        Some(i),
                        "gamma < n(p-1)",
                        a.gamma - bound,
                    ));
                }
                let residual = a.beta + (a.alpha + n) / q - (a.gamma + n) / p;
                if residual.abs() > RELATION_TOL {
                    return Err(HardyError::violation(
                        Some(i),
                        "beta + (alpha+n)/q = (gamma+n)/p",
                        residual,
                    ));
                }
            }
        }
        Mode::Limit => {
            if (p - q).abs() > RELATION_TOL {
                return Err(HardyError::violation(None, "p = q", p - q));
            }
            for (i, a) in axes.iter().enumerate() {
                let n = a.dim();
                if a.beta != 0.0 {
                    return Err(HardyError::violation(Some(i), "beta = 0", a.beta));
                }
                if (a.gamma - a.alpha).abs() > RELATION_TOL {
                    return Err(HardyError::violation(
                        Some(i),
                        "gamma = alpha",
                        a.gamma - a.alpha,
                    ));
                }
                let bound = n * (p - 1.0);
                if a.gamma >= bound {
                    return Err(HardyError::violation(
                        Some(i),
                        "gamma < n(p-1)",
                        a.gamma - bound,
                    ));
                }
            }
        }
    }

    Ok(ProductParams {
        axes: axes.to_vec(),
        exponents,
        mode,
    })
}

/// Parse the CLI axis grammar: comma-separated `n:beta:gamma[:alpha]`
/// entries. When `alpha` is omitted it is derived from the compatibility
/// relation; when supplied it is kept verbatim (validation will flag an
/// inconsistent value).
pub fn parse_axes(text: &str, p: f64, q: f64) -> Result<Vec<AxisParams>> {
    let mut axes = Vec::new();
    for (i, chunk) in text.split(',').enumerate() {
        let parts: Vec<&str> = chunk.trim().split(':').collect();
        if parts.len() < 3 || parts.len() > 4 {
            return Err(HardyError::domain(format!(
                "axis {i}: expected n:beta:gamma[:alpha], got `{chunk}`"
            )));
        }
        let n: u32 = parts[0]
            .parse()
            .map_err(|_| HardyError::domain(format!("axis {i}: bad dimension `{}`", parts[0])))?;
        let beta = parse_number(parts[1])
            .ok_or_else(|| HardyError::domain(format!("axis {i}: bad beta `{}`", parts[1])))?;
        let gamma = parse_number(parts[2])
            .ok_or_else(|| HardyError::domain(format!("axis {i}: bad gamma `{}`", parts[2])))?;
        let alpha = match parts.get(3) {
            Some(s) => parse_number(s)
                .ok_or_else(|| HardyError::domain(format!("axis {i}: bad alpha `{s}`")))?,
            None => derive_alpha(n, beta, gamma, p, q)?,
        };
        axes.push(AxisParams::new(n, beta, gamma, alpha));
    }
    Ok(axes)
}

/// Numbers are accepted as decimals or simple fractions (`4/3`), so the
/// rational exponents that appear throughout do not lose precision in the
/// shell.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: f64 = num.trim().parse().ok()?;
        let den: f64 = den.trim().parse().ok()?;
        if den == 0.0 {
            return None;
        }
        Some(num / den)
    } else {
        s.parse().ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp(p: f64, q: f64) -> Exponents {
        Exponents::new(p, q).unwrap()
    }

    #[test]
    fn conjugate_identities() {
        for (p, q) in [(4.0 / 3.0, 4.0), (1.5, 2.0), (2.0, 2.0), (3.0, 17.0)] {
            let e = exp(p, q);
            assert!((1.0 / e.p + 1.0 / e.p_prime - 1.0).abs() <= 1e-14);
            assert!((1.0 / e.q + 1.0 / e.q_prime - 1.0).abs() <= 1e-14);
        }
        assert!(Exponents::new(1.0, 2.0).is_err());
        assert!(Exponents::new(2.0, 1.5).is_err());
        assert!(Exponents::new(f64::INFINITY, 2.0).is_err());
    }

    #[test]
    fn thm1_validation_examples() {
        // (n=1, beta=1/2) with p = 4/3, q = 4: 1/4 = 3/4 - 1/2.
        let a = AxisParams::new(1, 0.5, 0.0, 0.0);
        assert!(validate(&[a], exp(4.0 / 3.0, 4.0), Mode::Thm1).is_ok());
        // (n=2, beta=1): same ratio beta/n = 1/2.
        let b = AxisParams::new(2, 1.0, 0.0, 0.0);
        let params = validate(&[a, b], exp(4.0 / 3.0, 4.0), Mode::Thm1).unwrap();
        assert_eq!(params.m(), 2);
        // Mismatched ratio is rejected.
        let c = AxisParams::new(2, 0.5, 0.0, 0.0);
        let err = validate(&[a, c], exp(4.0 / 3.0, 4.0), Mode::Thm1).unwrap_err();
        match err {
            HardyError::HypothesisViolation { axis, .. } => assert_eq!(axis, Some(1)),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn thm1_beta_over_n_constant_across_axes() {
        let axes = [
            AxisParams::new(1, 0.5, 0.0, 0.0),
            AxisParams::new(2, 1.0, 0.0, 0.0),
            AxisParams::new(4, 2.0, 0.0, 0.0),
        ];
        let params = validate(&axes, exp(4.0 / 3.0, 4.0), Mode::Thm1).unwrap();
        let ratios: Vec<f64> = params.axes().iter().map(|a| a.beta / a.dim()).collect();
        for r in &ratios {
            assert!((r - ratios[0]).abs() <= 1e-12);
        }
    }

    #[test]
    fn gamma_boundary_is_rejected() {
        // gamma = 0.9 >= n(p-1) = 0.5 for n=1, p=1.5.
        let a = AxisParams::new(1, 0.0, 0.9, derive_alpha(1, 0.0, 0.9, 1.5, 2.0).unwrap());
        let err = validate(&[a], exp(1.5, 2.0), Mode::Thm2).unwrap_err();
        match err {
            HardyError::HypothesisViolation { relation, .. } => {
                assert!(relation.contains("gamma < n(p-1)"))
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn derive_alpha_examples() {
        assert_eq!(derive_alpha(1, 0.0, 0.0, 2.0, 2.0).unwrap(), 0.0);
        // (n=1, beta=1/2, gamma=0, p=4/3, q=4) -> 4 (3/4 - 1/2) - 1 = 0.
        assert!((derive_alpha(1, 0.5, 0.0, 4.0 / 3.0, 4.0).unwrap() - 0.0).abs() < 1e-12);
        // (n=2, beta=0, gamma=1, p=2, q=3) -> 3 * 3/2 - 2 = 5/2.
        assert!((derive_alpha(2, 0.0, 1.0, 2.0, 3.0).unwrap() - 2.5).abs() < 1e-12);
        assert!(derive_alpha(1, f64::NAN, 0.0, 2.0, 2.0).is_err());
    }

    #[test]
    fn derive_alpha_then_validate_succeeds() {
        // For admissible (n, beta, gamma), the derived alpha always validates.
        let cases = [
            (1u32, 0.1, 0.2, 2.0, 2.5),
            (2, 0.3, 0.5, 2.0, 2.5),
            (3, 1.7, -2.0, 1.5, 4.0),
            (2, 0.0, 0.99, 2.0, 3.0),
        ];
        for (n, beta, gamma, p, q) in cases {
            let alpha = derive_alpha(n, beta, gamma, p, q).unwrap();
            let a = AxisParams::new(n, beta, gamma, alpha);
            validate(&[a], exp(p, q), Mode::Thm2).unwrap();
        }
    }

    #[test]
    fn limit_mode_requires_equal_exponents() {
        let a = AxisParams::new(1, 0.0, 0.3, 0.3);
        assert!(validate(&[a], exp(2.0, 2.0), Mode::Limit).is_ok());
        assert!(validate(&[a], exp(2.0, 2.5), Mode::Limit).is_err());
        // Thm2 mode refuses p = q.
        assert!(validate(&[a], exp(2.0, 2.0), Mode::Thm2).is_err());
    }

    #[test]
    fn axis_grammar_parses_and_derives_alpha() {
        let axes = parse_axes("1:0.5:0,2:1:0", 4.0 / 3.0, 4.0).unwrap();
        assert_eq!(axes.len(), 2);
        assert!((axes[0].alpha - 0.0).abs() < 1e-12);
        let axes = parse_axes("1:0.1:0.2:0.25", 2.0, 2.5).unwrap();
        assert_eq!(axes[0].alpha, 0.25);
        assert!(parse_axes("1:0.5", 2.0, 2.0).is_err());
        assert!(parse_axes("x:0.5:0", 2.0, 2.0).is_err());
    }

    #[test]
    fn fraction_parsing() {
        assert_eq!(parse_number("4/3"), Some(4.0 / 3.0));
        assert_eq!(parse_number("2.5"), Some(2.5));
        assert_eq!(parse_number(" 3 / 4 "), Some(0.75));
        assert_eq!(parse_number("1/0"), None);
        assert_eq!(parse_number("abc"), None);
    }

    #[test]
    fn summary_round_trips_mode_and_axes() {
        let a = AxisParams::new(1, 0.1, 0.2, 0.25);
        let b = AxisParams::new(2, 0.3, 0.5, 0.375);
        let params = validate(&[a, b], exp(2.0, 2.5), Mode::Thm2).unwrap();
        assert_eq!(
            params.summary(),
            "thm2|p=2|q=2.5|axes=1:0.1:0.2:0.25,2:0.3:0.5:0.375"
        );
    }
}
