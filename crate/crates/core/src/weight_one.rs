//! The weight-one vanishing pipeline.
//!
//! Let `H` be the rank-`2g` class with roots `±a_i` (an extension of a
//! bundle by its dual, seen through the splitting principle). The two wedge
//! assumptions — the even exterior sum has degree-0 Chern character, the
//! odd exterior sum has vanishing Chern character — boil down, degree by
//! degree, to the statement that
//!
//! `P = -p_1 + 2 sum_i log(1 + e^{a_i})`
//!
//! has each graded piece equal to a *nonzero* rational multiple of the
//! matching graded piece of `ch(H)`. The multiplier in degree `2n` is
//! `-E_{2n-1}(0)/2`, an Euler number value that never vanishes, so the
//! assumptions force `ch(H)` into degree zero. [`verify_lemma21`] certifies
//! exactly this, reporting the per-degree multipliers and residuals.

use serde::Serialize;

use crate::classes::KClass;
use crate::numbers::{euler_number, factorial};
use crate::rat::Rat;
use crate::series::GradedSeries;
use crate::symfun::{to_power_sums, Partition, PowerSumExpr, SymfunError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightOneError {
    #[error("psi expansion routes disagree at degree {0}: {1} vs {2}")]
    PsiRouteDisagreement(usize, Box<Rat>, Box<Rat>),
    #[error("expected vanishing residual in degree {0}, found {1}")]
    NonzeroResidual(usize, String),
    #[error("degree {0} of P is not the expected multiple of p_{0}: found {1}")]
    WrongEvenComponent(usize, String),
    #[error("ch(H) has unexpected degree-{0} component: {1}")]
    WrongChComponent(usize, String),
    #[error("per-degree multiplier vanishes at n={0}")]
    VanishingMultiplier(usize),
    #[error(transparent)]
    Symfun(#[from] SymfunError),
}

/// `prod_i (1 + s e^{a_i})(1 + s e^{-a_i})` for `s = ±1`.
fn wedge_product(g: usize, trunc: usize, s: i64) -> GradedSeries {
    let one = GradedSeries::one(g, trunc);
    let mut out = one.clone();
    for i in 0..g {
        let mut plus = vec![0i64; g];
        plus[i] = 1;
        let mut minus = vec![0i64; g];
        minus[i] = -1;
        for form in [plus, minus] {
            let factor = one
                .add(&GradedSeries::exp_linear_form(g, trunc, &form).scale(&Rat::int(s)))
                .expect("same context");
            out = out.mul(&factor).expect("same context");
        }
    }
    out
}

/// Even and odd wedge characters
/// `(1/2)(prod(1+e^{±a_i}) ± prod(1-e^{±a_i}))`, computed from the product
/// formula and cross-checked against the exterior-power enumeration.
pub fn ch_even_odd_wedge(g: usize, trunc: usize) -> (GradedSeries, GradedSeries) {
    assert!(g >= 1);
    let plus = wedge_product(g, trunc, 1);
    let minus = wedge_product(g, trunc, -1);
    let half = Rat::new(1, 2);
    let even = plus.add(&minus).expect("same context").scale(&half);
    let odd = plus.sub(&minus).expect("same context").scale(&half);

    // Independent route through the exterior-power sums evaluated at ±1:
    // even = (sum ch(lambda^k) + sum (-1)^k ch(lambda^k)) / 2.
    let h = KClass::hodge_sum(g);
    let at_plus = h.lambda_pm1_ch(1, trunc).expect("effective");
    let at_minus = h.lambda_pm1_ch(-1, trunc).expect("effective");
    let even_wedge = at_plus.add(&at_minus).expect("same context").scale(&half);
    let odd_wedge = at_plus.sub(&at_minus).expect("same context").scale(&half);
    assert_eq!(even, even_wedge, "even wedge routes disagree");
    assert_eq!(odd, odd_wedge, "odd wedge routes disagree");
    (even, odd)
}

/// Outcome of the product rewrite
/// `prod (1+e^{a_i})(1+e^{-a_i}) = prod (1+e^{a_i})^2 e^{-a_i}`.
#[derive(Clone, Debug, Serialize)]
pub struct FirstRelationReport {
    pub g: usize,
    pub trunc: usize,
    pub degree_zero: Rat,
    pub first_failing_degree: Option<usize>,
}

impl FirstRelationReport {
    pub fn passed(&self) -> bool {
        self.first_failing_degree.is_none()
    }
}

pub fn first_relation_rewrite(g: usize, trunc: usize) -> FirstRelationReport {
    let lhs = wedge_product(g, trunc, 1);
    let one = GradedSeries::one(g, trunc);
    let mut rhs = one.clone();
    for i in 0..g {
        let mut plus = vec![0i64; g];
        plus[i] = 1;
        let mut minus = vec![0i64; g];
        minus[i] = -1;
        let factor = one
            .add(&GradedSeries::exp_linear_form(g, trunc, &plus))
            .expect("same context");
        rhs = rhs
            .mul(&factor)
            .and_then(|s| s.mul(&factor))
            .and_then(|s| s.mul(&GradedSeries::exp_linear_form(g, trunc, &minus)))
            .expect("same context");
    }
    let diff = lhs.sub(&rhs).expect("same context");
    let mut first_failing = (0..=trunc).find(|&d| !diff.grade_component(d).is_zero());
    let degree_zero = lhs.constant_term();
    if degree_zero != Rat::int(1i64 << (2 * g)) && first_failing.is_none() {
        first_failing = Some(0);
    }
    FirstRelationReport {
        g,
        trunc,
        degree_zero,
        first_failing_degree: first_failing,
    }
}

/// Coefficients `psi_1..psi_D` of `log(1 + e^t) - log 2`, computed by two
/// routes: series logarithm of `(1 + e^t)/2`, and termwise integration of
/// `1 - phi(t)` with `phi` read off the Euler numbers. The routes must
/// agree exactly.
pub fn psi_expansion(trunc: usize) -> Result<Vec<Rat>, WeightOneError> {
    assert!(trunc >= 1);
    // Route A: log((1 + e^t)/2) in one variable.
    let e_t = GradedSeries::exp_linear_form(1, trunc, &[1]);
    let route_a = GradedSeries::one(1, trunc)
        .add(&e_t)
        .expect("same context")
        .scale(&Rat::new(1, 2))
        .log()
        .expect("constant term is one");
    // Route B: psi' = 1 - phi, phi(t) = (1/2) sum E_n(0) t^n/n!, so
    // psi_1 = 1/2 and psi_k = -E_{k-1}(0) / (2 k!) for k >= 2.
    let mut coeffs = Vec::with_capacity(trunc);
    for k in 1..=trunc {
        let route_b = if k == 1 {
            Rat::new(1, 2)
        } else {
            -euler_number(k - 1) * Rat::from_big(1.into(), factorial(k) * 2)
        };
        let a_k = route_a.coeff(&[k as u32]);
        if a_k != route_b {
            return Err(WeightOneError::PsiRouteDisagreement(
                k,
                Box::new(a_k),
                Box::new(route_b),
            ));
        }
        coeffs.push(route_b);
    }
    Ok(coeffs)
}

/// Degree-by-degree certificate that the wedge assumptions force `ch(H)`
/// into degree zero.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma21Report {
    pub g: usize,
    pub trunc: usize,
    /// Odd-degree components of `P`, expected identically zero.
    pub odd_residuals: Vec<(usize, PowerSumExpr)>,
    /// `(n, lambda_n)` with `P_{2n} = lambda_n * ch_{2n}(H)`.
    pub even_ratios: Vec<(usize, Rat)>,
    /// Degree-1 cancellation `-p_1 + 2 psi_1 p_1 = 0`.
    pub degree_one_cancels: bool,
    /// Degree-zero terms dropped before the comparison: only positive
    /// degrees carry content.
    pub dropped_constants: String,
    /// All multipliers are nonzero, so each `ch_{2n}(H)` is forced to zero.
    pub nonvanishing_certified: bool,
}

pub fn verify_lemma21(g: usize, trunc: usize) -> Result<Lemma21Report, WeightOneError> {
    assert!(g >= 1, "g must be positive");
    assert!(trunc >= 2, "need at least degree 2");
    let psi = psi_expansion(trunc)?;

    // P = -p_1 + 2 sum_i psi(a_i), constants dropped: built as a series.
    let mut p_series = GradedSeries::zero(g, trunc);
    let mut psi_univ = vec![Rat::zero()];
    psi_univ.extend(psi.iter().cloned());
    for i in 0..g {
        let mut form = vec![0i64; g];
        form[i] = 1;
        let psi_i = GradedSeries::univariate_in_form(g, trunc, &psi_univ, &form);
        p_series = p_series
            .add(&psi_i.scale(&Rat::int(2)))
            .expect("same context");
        p_series = p_series
            .sub(&GradedSeries::linear_form(g, trunc, &form))
            .expect("same context");
    }
    let p_expr = to_power_sums(&p_series)?;

    // ch(H) with the rank constant dropped.
    let h = KClass::hodge_sum(g);
    let ch_h = h.ch(trunc);
    let ch_expr = to_power_sums(
        &ch_h
            .sub(&GradedSeries::constant(g, trunc, Rat::int(2 * g as i64)))
            .expect("same context"),
    )?;

    // Degree 1 must cancel on the nose.
    let p1 = p_expr.weight_component(1);
    if !p1.is_zero() {
        return Err(WeightOneError::NonzeroResidual(1, p1.to_string()));
    }

    let mut odd_residuals = Vec::new();
    for d in (3..=trunc).step_by(2) {
        let component = p_expr.weight_component(d);
        if !component.is_zero() {
            return Err(WeightOneError::NonzeroResidual(d, component.to_string()));
        }
        let ch_component = ch_expr.weight_component(d);
        if !ch_component.is_zero() {
            return Err(WeightOneError::WrongChComponent(
                d,
                ch_component.to_string(),
            ));
        }
        odd_residuals.push((d, component));
    }

    let mut even_ratios = Vec::new();
    for n in 1..=(trunc / 2) {
        let d = 2 * n;
        let fact = Rat::from_big(1.into(), factorial(d));
        let pure = Partition::new(vec![d as u32]);

        // P_{2n} = (-E_{2n-1}(0)/(2n)!) p_{2n}.
        let expected_p = PowerSumExpr::single(pure.clone(), -euler_number(d - 1) * &fact);
        let got_p = p_expr.weight_component(d);
        if got_p != expected_p {
            return Err(WeightOneError::WrongEvenComponent(d, got_p.to_string()));
        }

        // ch(H)_{2n} = (2/(2n)!) p_{2n}.
        let expected_ch = PowerSumExpr::single(pure, Rat::int(2) * &fact);
        let got_ch = ch_expr.weight_component(d);
        if got_ch != expected_ch {
            return Err(WeightOneError::WrongChComponent(d, got_ch.to_string()));
        }

        // P_{2n} = lambda_n ch_{2n}(H) with lambda_n = -E_{2n-1}(0)/2.
        let lambda_n = -euler_number(d - 1) * Rat::new(1, 2);
        if got_p != got_ch.scale(&lambda_n) {
            return Err(WeightOneError::WrongEvenComponent(d, got_p.to_string()));
        }
        if lambda_n.is_zero() {
            return Err(WeightOneError::VanishingMultiplier(n));
        }
        even_ratios.push((n, lambda_n));
    }

    Ok(Lemma21Report {
        g,
        trunc,
        odd_residuals,
        even_ratios,
        degree_one_cancels: true,
        dropped_constants: format!("{g} * 2 log 2 from P; rank {} from ch(H)", 2 * g),
        nonvanishing_certified: true,
    })
}
