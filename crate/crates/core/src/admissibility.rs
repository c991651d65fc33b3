//! Parameter-admissibility calculator for the well-posedness statement and
//! the basic-energy proposition: evaluates every inequality window, derives
//! the dependent exponent gamma, and enumerates admissible regions.
//!
//! Two evaluation paths: fast f64 with strict inequalities (boundary equality
//! counts as fail), and an exact path over arbitrary-precision rationals
//! (every finite f64 is a rational, so the conversion is lossless). The
//! rational path re-confirms any verdict independently.
//!
//! The two statements genuinely disagree in two places for alpha < 1 (the
//! q upper bound `4a/(3(2a-1))` vs `4a/(3(3a-2))`, and the s0 lower bound
//! `3-2a` vs `a`); both are evaluated and reported side by side, with no
//! adjudication. Defaults elsewhere use the stricter intersection.

// Negated comparisons like `!(p > bound)` are deliberate: they reject NaN
// inputs, which `p <= bound` would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::FromPrimitive;
use serde::Serialize;

use crate::error::{FbsqError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct ConstraintVerdict {
    pub name: String,
    pub satisfied: bool,
    /// Signed margin to the boundary (positive = satisfied, strict).
    pub slack: f64,
    /// Soft verdicts carry a non-explicit constant and warn instead of reject.
    pub soft: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibleTuple {
    pub d: u32,
    pub alpha: f64,
    pub p: Option<f64>,
    pub q: f64,
    pub s0: f64,
    pub epsilon: Option<f64>,
    pub verdicts: Vec<ConstraintVerdict>,
    /// All hard constraints satisfied.
    pub pass: bool,
}

impl AdmissibleTuple {
    pub fn binding_constraint(&self) -> Option<&str> {
        self.verdicts
            .iter()
            .filter(|v| !v.soft && !v.satisfied)
            .min_by(|a, b| a.slack.partial_cmp(&b.slack).unwrap())
            .map(|v| v.name.as_str())
    }
}

fn verdict(name: &str, slack: f64, soft: bool) -> ConstraintVerdict {
    ConstraintVerdict { name: name.into(), satisfied: slack > 0.0, slack, soft }
}

/// Main-theorem window check:
/// `2/3 < alpha <= 1`, `8/(3a-2) < p < 1/(C ||mu - 1||_inf)`,
/// `a/(2a-1) < q < min{2, 4a/(3(2a-1))}`, `3-2a < s0 < 4a/q - 8a + 6`.
/// The p upper bound is soft (its constant is not explicit); `c_mu` is the
/// caller's stand-in, default 1.
pub fn check_theorem11(
    alpha: f64,
    p: f64,
    q: f64,
    s0: f64,
    epsilon: f64,
    c_mu: f64,
) -> AdmissibleTuple {
    let mut v = Vec::new();
    v.push(verdict("alpha_lower(alpha > 2/3)", alpha - 2.0 / 3.0, false));
    let upper_slack = if alpha <= 1.0 { (1.0 - alpha).max(f64::MIN_POSITIVE) } else { 1.0 - alpha };
    v.push(verdict("alpha_upper(alpha <= 1)", upper_slack, false));
    let denom = 3.0 * alpha - 2.0;
    let p_lo = if denom > 0.0 { 8.0 / denom } else { f64::INFINITY };
    v.push(verdict("p_lower(p > 8/(3a-2))", p - p_lo, false));
    let p_hi = if epsilon * c_mu > 0.0 { 1.0 / (c_mu * epsilon) } else { f64::INFINITY };
    v.push(verdict("p_upper_soft(p < 1/(C eps))", p_hi - p, true));
    let q_lo = if 2.0 * alpha - 1.0 > 0.0 { alpha / (2.0 * alpha - 1.0) } else { f64::INFINITY };
    v.push(verdict("q_lower(q > a/(2a-1))", q - q_lo, false));
    let q_hi = q_upper_theorem11(alpha);
    v.push(verdict("q_upper(q < min{2, 4a/(3(2a-1))})", q_hi - q, false));
    v.push(verdict("s0_lower(s0 > 3-2a)", s0 - (3.0 - 2.0 * alpha), false));
    v.push(verdict("s0_upper(s0 < 4a/q - 8a + 6)", 4.0 * alpha / q - 8.0 * alpha + 6.0 - s0, false));
    let pass = v.iter().all(|c| c.soft || c.satisfied);
    AdmissibleTuple {
        d: 2,
        alpha,
        p: Some(p),
        q,
        s0,
        epsilon: Some(epsilon),
        verdicts: v,
        pass,
    }
}

pub fn q_upper_theorem11(alpha: f64) -> f64 {
    if 2.0 * alpha - 1.0 > 0.0 {
        (4.0 * alpha / (3.0 * (2.0 * alpha - 1.0))).min(2.0)
    } else {
        f64::NEG_INFINITY
    }
}

pub fn q_lower_theorem11(alpha: f64) -> f64 {
    if 2.0 * alpha - 1.0 > 0.0 {
        alpha / (2.0 * alpha - 1.0)
    } else {
        f64::INFINITY
    }
}

/// Basic-energy proposition windows, general dimension plus the d = 2
/// special case (which is NOT identical to the main theorem's; both are
/// reported).
pub fn check_prop31(d: u32, alpha: f64, q: f64, s0: f64) -> AdmissibleTuple {
    assert!(d >= 2, "the proposition is stated for d >= 2");
    let df = d as f64;
    let mut v = Vec::new();
    let alpha_slack = if alpha > 0.0 && alpha <= 1.0 {
        alpha.min(1.0 - alpha).max(f64::MIN_POSITIVE)
    } else if alpha <= 0.0 {
        alpha
    } else {
        1.0 - alpha
    };
    v.push(verdict("p31_alpha(0 < alpha <= 1)", alpha_slack, false));
    // q in (2 a d/(6a + a d - d - 2), 2)
    let q_denom = 6.0 * alpha + alpha * df - df - 2.0;
    let q_lo = if q_denom > 0.0 { 2.0 * alpha * df / q_denom } else { f64::INFINITY };
    v.push(verdict("p31_q_lower(q > 2ad/(6a+ad-d-2))", q - q_lo, false));
    v.push(verdict("p31_q_upper(q < 2)", 2.0 - q, false));
    // s0 in (a d/q + (d+2)/2 - a(d+4)/2, 2 a d/q - a d - 6a + 3 + 3d/2)
    let s0_lo = alpha * df / q + (df + 2.0) / 2.0 - alpha * (df + 4.0) / 2.0;
    let s0_hi = 2.0 * alpha * df / q - alpha * df - 6.0 * alpha + 3.0 + 1.5 * df;
    v.push(verdict("p31_s0_lower(s0 > ad/q + (d+2)/2 - a(d+4)/2)", s0 - s0_lo, false));
    v.push(verdict("p31_s0_upper(s0 < 2ad/q - ad - 6a + 3 + 3d/2)", s0_hi - s0, false));

    if d == 2 {
        v.push(verdict("p31d2_alpha(alpha > 2/3)", alpha - 2.0 / 3.0, false));
        v.push(verdict("p31d2_s0_lower(s0 > a)", s0 - alpha, false));
        v.push(verdict(
            "p31d2_s0_upper(s0 < 4a/q - 8a + 6)",
            4.0 * alpha / q - 8.0 * alpha + 6.0 - s0,
            false,
        ));
        let q_lo2 = if 2.0 * alpha - 1.0 > 0.0 { alpha / (2.0 * alpha - 1.0) } else { f64::INFINITY };
        v.push(verdict("p31d2_q_lower(q > a/(2a-1))", q - q_lo2, false));
        let q_hi2 = if 3.0 * alpha - 2.0 > 0.0 {
            (4.0 * alpha / (3.0 * (3.0 * alpha - 2.0))).min(2.0)
        } else {
            f64::NEG_INFINITY
        };
        v.push(verdict("p31d2_q_upper(q < min{2, 4a/(3(3a-2))})", q_hi2 - q, false));
    }
    let pass = v.iter().all(|c| c.satisfied);
    AdmissibleTuple { d, alpha, p: None, q, s0, epsilon: None, verdicts: v, pass }
}

/// The difference-system Besov index `gamma = 4p/(4 + 4p - 3 a p)` under the
/// precondition `p > 4/(3a - 2)`.
///
/// Direct substitution gives gamma > 2 throughout the admissible region, so
/// the (1, 2] range is advisory: it is reported, not enforced.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Gamma {
    pub value: f64,
    pub in_unit_range: bool,
}

pub fn gamma_exponent(alpha: f64, p: f64) -> Result<Gamma> {
    let denom = 3.0 * alpha - 2.0;
    let bound = if denom > 0.0 { 4.0 / denom } else { f64::INFINITY };
    if !(p > bound) {
        return Err(FbsqError::GammaPrecondition { p, bound });
    }
    let value = 4.0 * p / (4.0 + 4.0 * p - 3.0 * alpha * p);
    Ok(Gamma { value, in_unit_range: value > 1.0 && value <= 2.0 })
}

/// Side-by-side report of the two places where the theorem and the
/// proposition (d = 2) state different windows; emitted verbatim.
#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyReport {
    pub alpha: f64,
    pub q_upper_theorem11_formula: &'static str,
    pub q_upper_theorem11: f64,
    pub q_upper_prop31_d2_formula: &'static str,
    pub q_upper_prop31_d2: f64,
    pub s0_lower_theorem11_formula: &'static str,
    pub s0_lower_theorem11: f64,
    pub s0_lower_prop31_d2_formula: &'static str,
    pub s0_lower_prop31_d2: f64,
    /// Stricter intersection used by defaults.
    pub s0_lower_intersection: f64,
}

pub fn discrepancies(alpha: f64) -> DiscrepancyReport {
    DiscrepancyReport {
        alpha,
        q_upper_theorem11_formula: "min{2, 4a/(3(2a-1))}",
        q_upper_theorem11: q_upper_theorem11(alpha),
        q_upper_prop31_d2_formula: "min{2, 4a/(3(3a-2))}",
        q_upper_prop31_d2: if 3.0 * alpha - 2.0 > 0.0 {
            (4.0 * alpha / (3.0 * (3.0 * alpha - 2.0))).min(2.0)
        } else {
            f64::NEG_INFINITY
        },
        s0_lower_theorem11_formula: "3 - 2a",
        s0_lower_theorem11: 3.0 - 2.0 * alpha,
        s0_lower_prop31_d2_formula: "a",
        s0_lower_prop31_d2: alpha,
        s0_lower_intersection: (3.0 - 2.0 * alpha).max(alpha),
    }
}

// ---------------------------------------------------------------------------
// Exact rational confirmation path.

fn rat(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite input")
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Re-evaluate every verdict of a theorem-1.1 tuple in exact rational
/// arithmetic; returns false on any disagreement with the float path.
pub fn confirm_theorem11_rational(t: &AdmissibleTuple) -> bool {
    let a = rat(t.alpha);
    let q = rat(t.q);
    let s0 = rat(t.s0);
    let p = match t.p {
        Some(v) => rat(v),
        None => return false,
    };
    let three_a_2 = int(3) * &a - int(2);
    let two_a_1 = int(2) * &a - int(1);

    let mut ok = true;
    let mut check = |name_prefix: &str, exact: bool| {
        if let Some(v) = t.verdicts.iter().find(|v| v.name.starts_with(name_prefix)) {
            if v.satisfied != exact {
                ok = false;
            }
        }
    };
    check("alpha_lower", a > int(2) / int(3));
    check("alpha_upper", a <= int(1));
    // p > 8/(3a-2)  <=>  p (3a-2) > 8 when 3a-2 > 0.
    check(
        "p_lower",
        three_a_2 > int(0) && &p * &three_a_2 > int(8),
    );
    // q > a/(2a-1) <=> q (2a-1) > a when 2a-1 > 0.
    check("q_lower", two_a_1 > int(0) && &q * &two_a_1 > a.clone());
    // q < min{2, 4a/(3(2a-1))}.
    let q_hi_ok = q < int(2)
        && two_a_1 > int(0)
        && &q * int(3) * &two_a_1 < int(4) * &a;
    check("q_upper", q_hi_ok);
    check("s0_lower", s0 > int(3) - int(2) * &a);
    // s0 < 4a/q - 8a + 6  <=>  s0 q < 4a - 8aq + 6q (q > 0).
    check(
        "s0_upper",
        q > int(0) && &s0 * &q < int(4) * &a - int(8) * &a * &q + int(6) * &q,
    );
    ok
}

// ---------------------------------------------------------------------------
// Region enumeration.

#[derive(Debug, Clone, Serialize)]
pub struct AlphaSummary {
    pub alpha: f64,
    pub q_window: (f64, f64),
    pub q_window_nonempty: bool,
    /// Constraint that empties the region, when it is empty.
    pub binding_constraint: Option<String>,
    pub n_passing: usize,
    pub discrepancies: DiscrepancyReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionReport {
    pub passing: Vec<AdmissibleTuple>,
    pub summaries: Vec<AlphaSummary>,
}

/// Scan the theorem's windows over an alpha grid: interior q and s0 samples,
/// p sampled above its lower bound.
pub fn enumerate_region(
    alpha_grid: &[f64],
    q_steps: usize,
    s0_steps: usize,
    p_samples: usize,
    epsilon: f64,
    c_mu: f64,
) -> RegionReport {
    let mut passing = Vec::new();
    let mut summaries = Vec::new();
    for &alpha in alpha_grid {
        let q_lo = q_lower_theorem11(alpha);
        let q_hi = q_upper_theorem11(alpha);
        let nonempty = alpha > 2.0 / 3.0 && alpha <= 1.0 && q_lo < q_hi;
        let mut n_passing = 0usize;
        let mut binding: Option<String> = None;
        if !(alpha > 2.0 / 3.0) {
            binding = Some("alpha_lower(alpha > 2/3)".into());
        } else if alpha > 1.0 {
            binding = Some("alpha_upper(alpha <= 1)".into());
        } else if !(q_lo < q_hi) {
            binding = Some("q_window_empty(q_lower >= q_upper)".into());
        } else {
            for iq in 1..=q_steps {
                let q = q_lo + (q_hi - q_lo) * iq as f64 / (q_steps as f64 + 1.0);
                let s0_lo = 3.0 - 2.0 * alpha;
                let s0_hi = 4.0 * alpha / q - 8.0 * alpha + 6.0;
                if !(s0_lo < s0_hi) {
                    binding.get_or_insert_with(|| "s0_window_empty(s0_lower >= s0_upper)".into());
                    continue;
                }
                for is in 1..=s0_steps {
                    let s0 = s0_lo + (s0_hi - s0_lo) * is as f64 / (s0_steps as f64 + 1.0);
                    let p_lo = 8.0 / (3.0 * alpha - 2.0);
                    for ip in 1..=p_samples {
                        let p = p_lo * (1.0 + ip as f64);
                        let tuple = check_theorem11(alpha, p, q, s0, epsilon, c_mu);
                        if tuple.pass {
                            n_passing += 1;
                            passing.push(tuple);
                        }
                    }
                }
            }
            if n_passing > 0 {
                binding = None;
            }
        }
        summaries.push(AlphaSummary {
            alpha,
            q_window: (q_lo, q_hi),
            q_window_nonempty: nonempty,
            binding_constraint: binding,
            n_passing,
            discrepancies: discrepancies(alpha),
        });
    }
    RegionReport { passing, summaries }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem11_windows_at_alpha_one() {
        // q-window (1, 4/3), s0-window (1, 4/q - 2), p > 8.
        assert!((q_lower_theorem11(1.0) - 1.0).abs() < 1e-15);
        assert!((q_upper_theorem11(1.0) - 4.0 / 3.0).abs() < 1e-15);
        let t = check_theorem11(1.0, 9.0, 1.2, 1.1, 0.0, 1.0);
        assert!(t.pass, "{:?}", t.verdicts);
        // s0 upper at q = 1.2 is 4/1.2 - 2 = 1.333..
        let up = t.verdicts.iter().find(|v| v.name.starts_with("s0_upper")).unwrap();
        assert!((up.slack - (4.0 / 1.2 - 2.0 - 1.1)).abs() < 1e-12);
        // p must exceed 8.
        assert!(!check_theorem11(1.0, 7.9, 1.2, 1.1, 0.0, 1.0).pass);
    }

    #[test]
    fn theorem11_worked_example_alpha_09() {
        // q-window (1.125, 1.5), s0-window at q = 1.3 is (1.2, ~1.569),
        // p > 8/0.7 ~ 11.43.
        let alpha = 0.9;
        assert!((q_lower_theorem11(alpha) - 1.125).abs() < 1e-12);
        assert!((q_upper_theorem11(alpha) - 1.5).abs() < 1e-12);
        let s0_hi = 4.0 * alpha / 1.3 - 8.0 * alpha + 6.0;
        assert!((s0_hi - (3.6 / 1.3 - 1.2)).abs() < 1e-12);
        let t = check_theorem11(alpha, 12.0, 1.3, 1.4, 0.0, 1.0);
        assert!(t.pass, "{:?}", t.verdicts);
        assert!(!check_theorem11(alpha, 11.0, 1.3, 1.4, 0.0, 1.0).pass); // p too small
    }

    #[test]
    fn alpha_outside_range_fails() {
        let t = check_theorem11(0.6, 100.0, 1.5, 1.8, 0.0, 1.0);
        assert!(!t.pass);
        let a = t.verdicts.iter().find(|v| v.name.starts_with("alpha_lower")).unwrap();
        assert!(!a.satisfied);
    }

    #[test]
    fn boundary_equality_counts_as_fail() {
        // alpha = 1, q exactly at the lower endpoint 1 must fail.
        let t = check_theorem11(1.0, 9.0, 1.0, 1.1, 0.0, 1.0);
        let v = t.verdicts.iter().find(|v| v.name.starts_with("q_lower")).unwrap();
        assert!(!v.satisfied);
    }

    #[test]
    fn soft_p_upper_warns_but_does_not_reject() {
        // eps = 0.05, c = 1: 1/eps = 20; p = 24 violates the soft bound only.
        let t = check_theorem11(0.8, 24.0, 1.5, 1.5, 0.05, 1.0);
        assert!(t.pass);
        let soft = t.verdicts.iter().find(|v| v.soft).unwrap();
        assert!(!soft.satisfied);
    }

    #[test]
    fn prop31_general_d_worked_examples() {
        // d = 2, alpha = 1: s0 lower bound = 2/q - 1; at q = 1.2 -> 0.666..
        let t = check_prop31(2, 1.0, 1.2, 1.0);
        let lo = t.verdicts.iter().find(|v| v.name.starts_with("p31_s0_lower")).unwrap();
        let expect = 2.0 / 1.2 - 1.0;
        assert!((lo.slack - (1.0 - expect)).abs() < 1e-12);

        // d = 2, alpha = 0.7: q lower bound 2.8/1.6 = 1.75 < 2, window nonempty.
        let t = check_prop31(2, 0.7, 1.8, 1.7);
        let qlo = t.verdicts.iter().find(|v| v.name.starts_with("p31_q_lower")).unwrap();
        assert!((qlo.slack - (1.8 - 1.75)).abs() < 1e-12);
    }

    #[test]
    fn prop31_empty_window_detected() {
        // alpha = 0.6, d = 2: q lower bound = 2.4/(3.6+1.2-4) = 3 > 2: empty.
        let t = check_prop31(2, 0.6, 1.9, 1.5);
        let qlo = t.verdicts.iter().find(|v| v.name.starts_with("p31_q_lower")).unwrap();
        assert!(!qlo.satisfied);
        assert!(!t.pass);
        assert!(t.binding_constraint().is_some());
    }

    #[test]
    fn gamma_worked_examples() {
        // alpha = 1, p = 8: 32/12 = 2.666..; p = 16: 64/20 = 3.2.
        let g = gamma_exponent(1.0, 8.0).unwrap();
        assert!((g.value - 32.0 / 12.0).abs() < 1e-12);
        assert!(!g.in_unit_range);
        let g = gamma_exponent(1.0, 16.0).unwrap();
        assert!((g.value - 3.2).abs() < 1e-12);
        // alpha = 0.8, p = 20: 80/36 = 2.222..
        let g = gamma_exponent(0.8, 20.0).unwrap();
        assert!((g.value - 80.0 / 36.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_precondition_enforced() {
        // alpha = 0.8: need p > 10.
        assert!(matches!(
            gamma_exponent(0.8, 9.9),
            Err(FbsqError::GammaPrecondition { .. })
        ));
        assert!(gamma_exponent(0.8, 10.01).is_ok());
        assert!(matches!(
            gamma_exponent(0.5, 100.0),
            Err(FbsqError::GammaPrecondition { .. })
        ));
    }

    #[test]
    fn gamma_is_increasing_in_p() {
        for alpha in [0.7, 0.8, 0.9, 1.0] {
            let p0 = 4.0 / (3.0 * alpha - 2.0) * 1.01;
            let mut prev = gamma_exponent(alpha, p0).unwrap().value;
            for i in 1..200 {
                let p = p0 + i as f64 * 0.5;
                let g = gamma_exponent(alpha, p).unwrap().value;
                assert!(g > prev, "alpha {alpha}, p {p}");
                prev = g;
            }
        }
    }

    #[test]
    fn gamma_exceeds_two_on_admissible_region() {
        // Brute-force scan: with the theorem's stricter p > 8/(3a-2), gamma
        // as written exceeds 2 everywhere (the open question's resolution).
        for i in 0..=6 {
            let alpha = 0.7 + 0.05 * i as f64;
            let p_lo = 8.0 / (3.0 * alpha - 2.0);
            for j in 1..=20 {
                let p = p_lo * (1.0 + j as f64 * 0.5);
                let g = gamma_exponent(alpha, p).unwrap();
                assert!(g.value > 2.0, "alpha {alpha}, p {p}: gamma {}", g.value);
            }
        }
    }

    #[test]
    fn enumerate_finds_nonempty_regions_for_valid_alpha() {
        let grid: Vec<f64> = vec![0.7, 0.8, 0.9, 1.0];
        let report = enumerate_region(&grid, 3, 3, 2, 0.0, 1.0);
        for s in &report.summaries {
            assert!(s.n_passing > 0, "alpha {} has empty region", s.alpha);
            assert!(s.binding_constraint.is_none());
        }
        // Every passing tuple confirmed by the exact rational path.
        for t in &report.passing {
            assert!(confirm_theorem11_rational(t), "rational path disagrees: {t:?}");
        }
    }

    #[test]
    fn enumerate_empty_below_two_thirds() {
        let report = enumerate_region(&[0.5], 3, 3, 2, 0.0, 1.0);
        assert_eq!(report.passing.len(), 0);
        assert_eq!(
            report.summaries[0].binding_constraint.as_deref(),
            Some("alpha_lower(alpha > 2/3)")
        );
    }

    #[test]
    fn q_window_endpoints_vary_continuously() {
        let mut prev: Option<(f64, f64)> = None;
        let steps = 300;
        for i in 0..=steps {
            let alpha = 2.0 / 3.0 + 1e-3 + (1.0 - 2.0 / 3.0 - 1e-3) * i as f64 / steps as f64;
            let lo = q_lower_theorem11(alpha);
            let hi = q_upper_theorem11(alpha);
            if let Some((plo, phi)) = prev {
                assert!((lo - plo).abs() < 0.2, "q_lower jump at alpha {alpha}");
                assert!((hi - phi).abs() < 0.2, "q_upper jump at alpha {alpha}");
            }
            prev = Some((lo, hi));
        }
    }

    #[test]
    fn discrepancy_report_values() {
        let d = discrepancies(0.8);
        // 4a/(3(2a-1)) = 3.2/1.8 vs 4a/(3(3a-2)) = 3.2/1.2 (capped at 2).
        assert!((d.q_upper_theorem11 - 3.2 / 1.8).abs() < 1e-12);
        assert!((d.q_upper_prop31_d2 - 2.0).abs() < 1e-12);
        assert!((d.s0_lower_theorem11 - 1.4).abs() < 1e-12);
        assert!((d.s0_lower_prop31_d2 - 0.8).abs() < 1e-12);
        assert!((d.s0_lower_intersection - 1.4).abs() < 1e-12);
        // At alpha = 1 the two q bounds coincide.
        let d1 = discrepancies(1.0);
        assert!((d1.q_upper_theorem11 - d1.q_upper_prop31_d2).abs() < 1e-12);
    }
}
