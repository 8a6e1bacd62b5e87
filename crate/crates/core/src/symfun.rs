//! Power-sum decompositions of symmetric series.
//!
//! Symmetric polynomials in `g` variables are rewritten in the basis of
//! power-sum products `p_lambda = p_{l1} p_{l2} ...` indexed by partitions
//! with at most `g` parts. In each degree `d` that family is triangular
//! against the monomial symmetric functions, so the rewrite is unique and
//! exact for every degree up to the truncation bound. Partitions with more
//! than `g` parts are redundant in `g` variables (their power-sum products
//! satisfy relations), which is why the canonical form never uses them.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::linalg::rat_solve_unique;
use crate::rat::Rat;
use crate::series::{GradedSeries, SeriesError};

/// Weakly decreasing positive parts; the empty partition indexes the
/// constant term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|&p| p as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|p| format!("p{p}")).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// All partitions of `d` with at most `max_parts` parts, in a fixed order.
pub fn partitions_of(d: usize, max_parts: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::new();
    fn rec(
        remaining: usize,
        max_part: usize,
        slots: usize,
        cur: &mut Vec<u32>,
        out: &mut Vec<Partition>,
    ) {
        if remaining == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if slots == 0 {
            return;
        }
        let hi = remaining.min(max_part);
        for part in (1..=hi).rev() {
            cur.push(part as u32);
            rec(remaining - part, part, slots - 1, cur, out);
            cur.pop();
        }
    }
    if d == 0 {
        out.push(Partition(Vec::new()));
    } else {
        rec(d, d, max_parts, &mut cur, &mut out);
    }
    out
}

/// A rational combination of power-sum products.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PowerSumExpr {
    terms: BTreeMap<Partition, Rat>,
}

impl PowerSumExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(partition: Partition, coeff: Rat) -> Self {
        let mut e = Self::zero();
        e.insert(partition, coeff);
        e
    }

    pub fn insert(&mut self, partition: Partition, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(partition) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, partition: &Partition) -> Rat {
        self.terms.get(partition).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &Rat)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.insert(p.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &Rat) -> Self {
        let mut out = Self::zero();
        if factor.is_zero() {
            return out;
        }
        for (p, c) in &self.terms {
            out.terms.insert(p.clone(), c * factor);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Rat::int(-1)))
    }

    /// Keep only terms of weight `d`.
    pub fn weight_component(&self, d: usize) -> Self {
        let mut out = Self::zero();
        for (p, c) in &self.terms {
            if p.weight() == d {
                out.terms.insert(p.clone(), c.clone());
            }
        }
        out
    }
}

impl fmt::Display for PowerSumExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(p, c)| format!("{c} * {p}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for PowerSumExpr {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Errors from the symmetric-function conversions.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymfunError {
    #[error("series is not symmetric in its variables")]
    NotSymmetric,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("power-sum transition matrix unexpectedly singular in degree {0}")]
    SingularTransition(usize),
}

/// The power sum `p_k = sum_i a_i^k` as a series.
pub fn power_sum_series(num_vars: usize, trunc: usize, k: u32) -> GradedSeries {
    let mut out = GradedSeries::zero(num_vars, trunc);
    if (k as usize) > trunc {
        return out;
    }
    for i in 0..num_vars {
        let mut coeffs = vec![Rat::zero(); k as usize + 1];
        coeffs[k as usize] = Rat::one();
        let mut form = vec![0i64; num_vars];
        form[i] = 1;
        let term = GradedSeries::univariate_in_form(num_vars, trunc, &coeffs, &form);
        out = out.add(&term).expect("same context");
    }
    out
}

/// Expand a power-sum expression into an honest series in `g` variables.
pub fn from_power_sums(expr: &PowerSumExpr, num_vars: usize, trunc: usize) -> GradedSeries {
    let mut out = GradedSeries::zero(num_vars, trunc);
    for (partition, coeff) in expr.terms() {
        let mut product = GradedSeries::one(num_vars, trunc);
        for &part in partition.parts() {
            product = product
                .mul(&power_sum_series(num_vars, trunc, part))
                .expect("same context");
        }
        out = out.add(&product.scale(coeff)).expect("same context");
    }
    out
}

/// Rewrite a symmetric series in the canonical power-sum basis
/// (partitions with at most `g` parts).
pub fn to_power_sums(s: &GradedSeries) -> Result<PowerSumExpr, SymfunError> {
    if !s.is_symmetric()? {
        return Err(SymfunError::NotSymmetric);
    }
    let g = s.num_vars();
    let trunc = s.trunc_degree();
    let mut out = PowerSumExpr::zero();
    let c0 = s.constant_term();
    if !c0.is_zero() {
        out.insert(Partition::new(Vec::new()), c0);
    }
    for d in 1..=trunc {
        let component = s.grade_component(d);
        if component.is_zero() {
            continue;
        }
        let basis = partitions_of(d, g);
        // Coefficient of the monomial symmetric function m_mu is the
        // coefficient of the monomial with sorted exponents mu.
        let target: Vec<Rat> = basis
            .iter()
            .map(|mu| {
                let mut exps: Vec<u32> = mu.parts().to_vec();
                exps.resize(g, 0);
                component.coeff(&exps)
            })
            .collect();
        // Column lambda of the transition matrix: p_lambda expanded in the
        // m_mu coordinates.
        let columns: Vec<Vec<Rat>> = basis
            .iter()
            .map(|lambda| {
                let expanded =
                    from_power_sums(&PowerSumExpr::single(lambda.clone(), Rat::one()), g, trunc);
                basis
                    .iter()
                    .map(|mu| {
                        let mut exps: Vec<u32> = mu.parts().to_vec();
                        exps.resize(g, 0);
                        expanded.coeff(&exps)
                    })
                    .collect()
            })
            .collect();
        let rows = basis.len();
        let matrix: Vec<Vec<Rat>> = (0..rows)
            .map(|r| (0..rows).map(|c| columns[c][r].clone()).collect())
            .collect();
        let solution =
            rat_solve_unique(&matrix, &target).ok_or(SymfunError::SingularTransition(d))?;
        for (lambda, coeff) in basis.into_iter().zip(solution) {
            out.insert(lambda, coeff);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn partition_enumeration() {
        let all = partitions_of(4, 4);
        assert_eq!(all.len(), 5);
        let two_parts = partitions_of(4, 2);
        assert_eq!(two_parts, vec![p(&[4]), p(&[3, 1]), p(&[2, 2])]);
        assert_eq!(partitions_of(0, 3), vec![p(&[])]);
    }

    #[test]
    fn sum_of_vars_is_p1() {
        for g in 1..=4 {
            let mut s = GradedSeries::zero(g, 4);
            for i in 0..g {
                s = s.add(&GradedSeries::var(g, 4, i).unwrap()).unwrap();
            }
            let expr = to_power_sums(&s).unwrap();
            assert_eq!(expr, PowerSumExpr::single(p(&[1]), Rat::one()));
        }
    }

    #[test]
    fn sum_of_squares_is_p2() {
        let g = 3;
        let mut s = GradedSeries::zero(g, 4);
        for i in 0..g {
            s = s.add(&GradedSeries::var(g, 4, i).unwrap().pow(2)).unwrap();
        }
        assert_eq!(
            to_power_sums(&s).unwrap(),
            PowerSumExpr::single(p(&[2]), Rat::one())
        );
    }

    // Newton-identity oracle: e_k via p_k e_{k-1} - p_2 e_{k-2} ... Used to
    // pin the expected coefficients independently of the solver.
    fn elementary_via_newton(k: usize, g: usize, trunc: usize) -> GradedSeries {
        if k == 0 {
            return GradedSeries::one(g, trunc);
        }
        let mut acc = GradedSeries::zero(g, trunc);
        for i in 1..=k {
            let sign = if i % 2 == 1 { Rat::one() } else { Rat::int(-1) };
            let term = power_sum_series(g, trunc, i as u32)
                .mul(&elementary_via_newton(k - i, g, trunc))
                .unwrap()
                .scale(&sign);
            acc = acc.add(&term).unwrap();
        }
        acc.scale(&Rat::new(1, k as i64))
    }

    #[test]
    fn elementary_symmetric_in_power_sums() {
        // e_2 = (p_1^2 - p_2)/2 for g = 3.
        let e2 = elementary_via_newton(2, 3, 4);
        let expr = to_power_sums(&e2).unwrap();
        let mut expected = PowerSumExpr::zero();
        expected.insert(p(&[1, 1]), Rat::new(1, 2));
        expected.insert(p(&[2]), Rat::new(-1, 2));
        assert_eq!(expr, expected);
    }

    #[test]
    fn round_trip_up_to_g() {
        // to . from is the identity on partitions of weight <= g.
        let g = 3;
        let trunc = 6;
        let mut expr = PowerSumExpr::zero();
        expr.insert(p(&[2, 1]), Rat::new(5, 2));
        expr.insert(p(&[3]), Rat::int(-2));
        expr.insert(p(&[1]), Rat::one());
        let series = from_power_sums(&expr, g, trunc);
        assert_eq!(to_power_sums(&series).unwrap(), expr);
    }

    #[test]
    fn canonical_form_beyond_g_parts() {
        // p_1^3 in two variables has more parts than variables; the
        // canonical rewrite uses partitions with at most 2 parts.
        let g = 2;
        let expr = PowerSumExpr::single(p(&[1, 1, 1]), Rat::one());
        let series = from_power_sums(&expr, g, 6);
        let back = to_power_sums(&series).unwrap();
        assert!(back.terms().all(|(part, _)| part.len() <= g));
        assert_eq!(from_power_sums(&back, g, 6), series);
    }

    #[test]
    fn rejects_non_symmetric() {
        let s = GradedSeries::var(2, 3, 0).unwrap();
        assert!(matches!(to_power_sums(&s), Err(SymfunError::NotSymmetric)));
    }

    #[test]
    fn constant_terms_become_empty_partition() {
        let s = GradedSeries::constant(2, 3, Rat::new(7, 3));
        let expr = to_power_sums(&s).unwrap();
        assert_eq!(expr.coeff(&p(&[])), Rat::new(7, 3));
    }
}
