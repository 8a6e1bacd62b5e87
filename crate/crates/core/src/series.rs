//! Truncated graded power series over the rationals.
//!
//! A [`GradedSeries`] is an element of `Q[[a_1, ..., a_g]]` truncated at a
//! fixed total degree `D`, graded by total degree. This is the working model
//! for the graded pieces of a Chow ring with rational coefficients after the
//! splitting principle: the variables play the role of Chern roots and every
//! characteristic class lands here.
//!
//! Storage is a sparse map from exponent vectors to nonzero coefficients;
//! every operation drops terms above the truncation degree. Two series only
//! combine when their `(num_vars, trunc_degree)` contexts agree.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::numbers::factorial;
use crate::rat::Rat;

/// Errors from series operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series contexts differ: ({0} vars, degree {1}) vs ({2} vars, degree {3})")]
    ContextMismatch(usize, usize, usize, usize),
    #[error("constant term must be zero, found {0}")]
    NonzeroConstantTerm(Rat),
    #[error("constant term must be one, found {0}")]
    ConstantTermNotOne(Rat),
    #[error("constant term must be a unit, found 0")]
    NonUnitConstantTerm,
    #[error("variable index {0} out of range for {1} variables")]
    VariableOutOfRange(usize, usize),
    #[error("symmetry checks support at most 6 variables, got {0}")]
    TooManyVariables(usize),
}

/// Truncated multivariate power series, graded by total degree.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedSeries {
    num_vars: usize,
    trunc: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

fn total_degree(exps: &[u32]) -> usize {
    exps.iter().map(|&e| e as usize).sum()
}

impl GradedSeries {
    pub fn zero(num_vars: usize, trunc: usize) -> Self {
        assert!(num_vars >= 1, "need at least one variable");
        assert!(trunc >= 1, "truncation degree must be positive");
        GradedSeries {
            num_vars,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, trunc: usize, value: Rat) -> Self {
        let mut s = Self::zero(num_vars, trunc);
        if !value.is_zero() {
            s.terms.insert(vec![0; num_vars], value);
        }
        s
    }

    pub fn one(num_vars: usize, trunc: usize) -> Self {
        Self::constant(num_vars, trunc, Rat::one())
    }

    /// The variable `a_{i+1}` (zero-based index).
    pub fn var(num_vars: usize, trunc: usize, i: usize) -> Result<Self, SeriesError> {
        if i >= num_vars {
            return Err(SeriesError::VariableOutOfRange(i, num_vars));
        }
        let mut s = Self::zero(num_vars, trunc);
        let mut exps = vec![0; num_vars];
        exps[i] = 1;
        s.terms.insert(exps, Rat::one());
        Ok(s)
    }

    /// Degree-one series `sum coeffs[i] * a_{i+1}`.
    pub fn linear_form(num_vars: usize, trunc: usize, coeffs: &[i64]) -> Self {
        assert_eq!(coeffs.len(), num_vars, "coefficient count");
        let mut s = Self::zero(num_vars, trunc);
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                let mut exps = vec![0; num_vars];
                exps[i] = 1;
                s.terms.insert(exps, Rat::int(c));
            }
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn trunc_degree(&self) -> usize {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rat {
        self.terms.get(exps).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&vec![0; self.num_vars])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    fn same_context(&self, other: &Self) -> Result<(), SeriesError> {
        if self.num_vars != other.num_vars || self.trunc != other.trunc {
            return Err(SeriesError::ContextMismatch(
                self.num_vars,
                self.trunc,
                other.num_vars,
                other.trunc,
            ));
        }
        Ok(())
    }

    fn insert(&mut self, exps: Vec<u32>, coeff: Rat) {
        if coeff.is_zero() || total_degree(&exps) > self.trunc {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
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

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_context(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, factor: &Rat) -> Self {
        let mut out = Self::zero(self.num_vars, self.trunc);
        if factor.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c * factor);
        }
        out
    }

    /// Truncating product.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_context(other)?;
        let mut out = Self::zero(self.num_vars, self.trunc);
        for (ea, ca) in &self.terms {
            let da = total_degree(ea);
            for (eb, cb) in &other.terms {
                if da + total_degree(eb) > self.trunc {
                    continue;
                }
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.insert(exps, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(self.num_vars, self.trunc);
        for _ in 0..exp {
            acc = acc.mul(self).expect("same context by construction");
        }
        acc
    }

    /// Exponential `sum_k s^k / k!`; requires a vanishing constant term.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        let c0 = self.constant_term();
        if !c0.is_zero() {
            return Err(SeriesError::NonzeroConstantTerm(c0));
        }
        let mut acc = Self::one(self.num_vars, self.trunc);
        let mut term = Self::one(self.num_vars, self.trunc);
        for k in 1..=self.trunc {
            term = term
                .mul(self)?
                .scale(&Rat::from_big(BigInt::from(1), BigInt::from(k as u64)));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Logarithm `sum_k (-1)^{k+1} (s-1)^k / k`; requires constant term one.
    pub fn log(&self) -> Result<Self, SeriesError> {
        let c0 = self.constant_term();
        if !c0.is_one() {
            return Err(SeriesError::ConstantTermNotOne(c0));
        }
        let x = self.sub(&Self::one(self.num_vars, self.trunc))?;
        let mut acc = Self::zero(self.num_vars, self.trunc);
        let mut power = Self::one(self.num_vars, self.trunc);
        for k in 1..=self.trunc {
            power = power.mul(&x)?;
            if power.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&power.scale(&Rat::new(sign, k as i64)))?;
        }
        Ok(acc)
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(SeriesError::NonUnitConstantTerm);
        }
        let inv_c0 = c0.recip();
        // u has positive valuation, self = c0 (1 + u).
        let u = self
            .scale(&inv_c0)
            .sub(&Self::one(self.num_vars, self.trunc))?;
        let mut acc = Self::one(self.num_vars, self.trunc);
        let mut power = Self::one(self.num_vars, self.trunc);
        for k in 1..=self.trunc {
            power = power.mul(&u)?;
            if power.is_zero() {
                break;
            }
            let signed = if k % 2 == 1 {
                power.neg()
            } else {
                power.clone()
            };
            acc = acc.add(&signed)?;
        }
        Ok(acc.scale(&inv_c0))
    }

    /// The homogeneous piece of total degree `k`.
    pub fn grade_component(&self, k: usize) -> Self {
        let mut out = Self::zero(self.num_vars, self.trunc);
        for (e, c) in &self.terms {
            if total_degree(e) == k {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Largest degree with a nonzero term, if any.
    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| total_degree(e)).max()
    }

    /// Apply a permutation of the variables: variable `i` becomes
    /// `perm[i]`.
    pub fn permute_vars(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.num_vars);
        let mut out = Self::zero(self.num_vars, self.trunc);
        for (e, c) in &self.terms {
            let mut exps = vec![0u32; self.num_vars];
            for (i, &ei) in e.iter().enumerate() {
                exps[perm[i]] = ei;
            }
            out.insert(exps, c.clone());
        }
        out
    }

    /// Symmetry under all variable permutations, decided by comparing the
    /// series with its orbit average. Exact; limited to `g <= 6`.
    pub fn is_symmetric(&self) -> Result<bool, SeriesError> {
        if self.num_vars > 6 {
            return Err(SeriesError::TooManyVariables(self.num_vars));
        }
        let perms = permutations(self.num_vars);
        let mut sum = Self::zero(self.num_vars, self.trunc);
        for p in &perms {
            sum = sum.add(&self.permute_vars(p))?;
        }
        let avg = sum.scale(&Rat::from_big(BigInt::from(1), factorial(self.num_vars)));
        Ok(avg == *self)
    }

    /// Substitute a univariate series `sum coeffs[m] x^m` at `x = form`,
    /// a linear form in the variables.
    pub fn univariate_in_form(num_vars: usize, trunc: usize, coeffs: &[Rat], form: &[i64]) -> Self {
        let lin = Self::linear_form(num_vars, trunc, form);
        let mut acc = Self::zero(num_vars, trunc);
        let mut power = Self::one(num_vars, trunc);
        for (m, c) in coeffs.iter().enumerate() {
            if m > 0 {
                power = power.mul(&lin).expect("same context");
                if power.is_zero() {
                    break;
                }
            }
            if !c.is_zero() {
                acc = acc.add(&power.scale(c)).expect("same context");
            }
        }
        acc
    }

    /// `exp(sum_i form[i] a_i)`, computed as a product of univariate
    /// exponentials so large variable counts stay cheap.
    pub fn exp_linear_form(num_vars: usize, trunc: usize, form: &[i64]) -> Self {
        assert_eq!(form.len(), num_vars);
        let mut acc = Self::one(num_vars, trunc);
        for (i, &c) in form.iter().enumerate() {
            if c == 0 {
                continue;
            }
            // exp(c a_i) = sum_m c^m a_i^m / m!
            let mut factor = Self::zero(num_vars, trunc);
            let mut coeff = Rat::one();
            for m in 0..=trunc {
                if m > 0 {
                    coeff *= Rat::new(c, m as i64);
                }
                let mut exps = vec![0u32; num_vars];
                exps[i] = m as u32;
                factor.terms.insert(exps, coeff.clone());
            }
            acc = acc.mul(&factor).expect("same context");
        }
        acc
    }

    /// Sorted rendering, one monomial per line, for golden-file comparisons.
    pub fn render_lines(&self) -> Vec<String> {
        let mut entries: Vec<(&Vec<u32>, &Rat)> = self.terms.iter().collect();
        entries.sort_by_key(|(e, _)| (total_degree(e), (*e).clone()));
        entries
            .into_iter()
            .map(|(e, c)| {
                let mut parts = vec![c.to_string()];
                for (i, &ei) in e.iter().enumerate() {
                    if ei == 1 {
                        parts.push(format!("a{}", i + 1));
                    } else if ei > 1 {
                        parts.push(format!("a{}^{}", i + 1, ei));
                    }
                }
                parts.join(" * ")
            })
            .collect()
    }
}

impl fmt::Display for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "{}", self.render_lines().join(" + "))
    }
}

impl fmt::Debug for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GradedSeries(g={}, D={}, {})",
            self.num_vars, self.trunc, self
        )
    }
}

/// All permutations of `0..n` in a deterministic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k.is_multiple_of(2) {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    if n == 0 {
        out.push(Vec::new());
    } else {
        heap(n, &mut items, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn var(g: usize, d: usize, i: usize) -> GradedSeries {
        GradedSeries::var(g, d, i).unwrap()
    }

    #[test]
    fn truncation_drops_high_degree() {
        // (1 + a1)(1 - a1) at D=1 is 1: the degree-2 term falls away.
        let one = GradedSeries::one(1, 1);
        let a = var(1, 1, 0);
        let lhs = one.add(&a).unwrap().mul(&one.sub(&a).unwrap()).unwrap();
        assert_eq!(lhs, one);
    }

    #[test]
    fn two_variable_product() {
        let one = GradedSeries::one(2, 2);
        let a1 = var(2, 2, 0);
        let a2 = var(2, 2, 1);
        let product = one.add(&a1).unwrap().mul(&one.add(&a2).unwrap()).unwrap();
        let expected = one
            .add(&a1)
            .unwrap()
            .add(&a2)
            .unwrap()
            .add(&a1.mul(&a2).unwrap())
            .unwrap();
        assert_eq!(product, expected);
    }

    #[test]
    fn grade_component_of_exp() {
        // Degree-2 part of exp(a1 + a2) is (a1 + a2)^2 / 2, by the
        // multinomial theorem: a1^2/2 + a1 a2 + a2^2/2.
        let s = var(2, 4, 0).add(&var(2, 4, 1)).unwrap();
        let e = s.exp().unwrap();
        let deg2 = e.grade_component(2);
        let expected = s.pow(2).scale(&Rat::new(1, 2));
        assert_eq!(deg2, expected);
    }

    #[test]
    fn exp_examples() {
        let zero = GradedSeries::zero(1, 3);
        assert_eq!(zero.exp().unwrap(), GradedSeries::one(1, 3));

        let a = var(1, 3, 0);
        let e = a.exp().unwrap();
        assert_eq!(e.coeff(&[0]), Rat::one());
        assert_eq!(e.coeff(&[1]), Rat::one());
        assert_eq!(e.coeff(&[2]), Rat::new(1, 2));
        assert_eq!(e.coeff(&[3]), Rat::new(1, 6));
    }

    #[test]
    fn exp_inverse_law_high_degree() {
        let a = var(1, 12, 0);
        let lhs = a.exp().unwrap().mul(&a.neg().exp().unwrap()).unwrap();
        assert_eq!(lhs, GradedSeries::one(1, 12));
    }

    #[test]
    fn log_examples() {
        let one = GradedSeries::one(1, 5);
        assert!(one.log().unwrap().is_zero());

        let a = var(1, 7, 0);
        assert_eq!(a.exp().unwrap().log().unwrap(), a);

        // Degree-2 coefficient of log((1 + e^t)/2) is 1/8.
        let half_sum = GradedSeries::one(1, 4)
            .add(&var(1, 4, 0).exp().unwrap())
            .unwrap()
            .scale(&Rat::new(1, 2));
        let l = half_sum.log().unwrap();
        assert_eq!(l.coeff(&[2]), Rat::new(1, 8));
    }

    #[test]
    fn log_exp_round_trips() {
        let g = 2;
        let d = 6;
        let s = var(g, d, 0)
            .add(&var(g, d, 1).scale(&Rat::new(3, 2)))
            .unwrap()
            .add(&var(g, d, 0).mul(&var(g, d, 1)).unwrap())
            .unwrap();
        assert_eq!(s.exp().unwrap().log().unwrap(), s);
        let u = GradedSeries::one(g, d).add(&s).unwrap();
        assert_eq!(u.log().unwrap().exp().unwrap(), u);
    }

    #[test]
    fn inverse_is_reciprocal() {
        let g = 2;
        let d = 6;
        let u = GradedSeries::one(g, d)
            .add(&var(g, d, 0))
            .unwrap()
            .add(&var(g, d, 1).scale(&Rat::new(-1, 3)))
            .unwrap();
        let prod = u.mul(&u.inverse().unwrap()).unwrap();
        assert_eq!(prod, GradedSeries::one(g, d));
    }

    #[test]
    fn error_paths() {
        let a = GradedSeries::one(1, 3);
        let b = GradedSeries::one(2, 3);
        assert!(matches!(a.add(&b), Err(SeriesError::ContextMismatch(..))));
        let c = GradedSeries::one(1, 4);
        assert!(matches!(a.mul(&c), Err(SeriesError::ContextMismatch(..))));
        assert!(matches!(
            GradedSeries::one(1, 3).exp(),
            Err(SeriesError::NonzeroConstantTerm(_))
        ));
        assert!(matches!(
            GradedSeries::zero(1, 3).log(),
            Err(SeriesError::ConstantTermNotOne(_))
        ));
        assert!(matches!(
            GradedSeries::zero(1, 3).inverse(),
            Err(SeriesError::NonUnitConstantTerm)
        ));
        assert!(GradedSeries::var(2, 3, 2).is_err());
    }

    #[test]
    fn grade_decomposition_is_exact() {
        let s = var(2, 5, 0)
            .exp()
            .unwrap()
            .mul(&var(2, 5, 1).neg().exp().unwrap())
            .unwrap();
        let mut sum = GradedSeries::zero(2, 5);
        for k in 0..=5 {
            sum = sum.add(&s.grade_component(k)).unwrap();
        }
        assert_eq!(sum, s);
    }

    #[test]
    fn symmetry_detection() {
        let sym = var(3, 4, 0)
            .add(&var(3, 4, 1))
            .unwrap()
            .add(&var(3, 4, 2))
            .unwrap();
        assert!(sym.is_symmetric().unwrap());
        assert!(!var(3, 4, 0).is_symmetric().unwrap());
        let seven = GradedSeries::one(7, 2);
        assert!(matches!(
            seven.is_symmetric(),
            Err(SeriesError::TooManyVariables(7))
        ));
    }

    #[test]
    fn exp_linear_form_matches_general_exp() {
        let form = [2i64, -1, 0];
        let lin = GradedSeries::linear_form(3, 6, &form);
        assert_eq!(
            GradedSeries::exp_linear_form(3, 6, &form),
            lin.exp().unwrap()
        );
    }

    #[test]
    fn render_is_sorted_and_stable() {
        let s = var(2, 3, 1)
            .add(&var(2, 3, 0).pow(2).scale(&Rat::new(-1, 2)))
            .unwrap()
            .add(&GradedSeries::one(2, 3))
            .unwrap();
        assert_eq!(s.render_lines(), vec!["1", "1 * a2", "-1/2 * a1^2"]);
    }

    fn arb_series(g: usize, d: usize) -> impl Strategy<Value = GradedSeries> {
        proptest::collection::vec((-6i64..6, proptest::collection::vec(0u32..3, g)), 0..6).prop_map(
            move |entries| {
                let mut s = GradedSeries::zero(g, d);
                for (c, e) in entries {
                    s.insert(e, Rat::int(c));
                }
                s
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(a in arb_series(2, 4), b in arb_series(2, 4), c in arb_series(2, 4)) {
            let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
            let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
