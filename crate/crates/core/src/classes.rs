//! Split K-theory classes and their characteristic classes.
//!
//! A [`KClass`] is a formal integer combination of line-bundle roots, each
//! root an integer linear form in the Chern-root variables `a_1..a_g`.
//! Negative multiplicities give virtual classes. Everything downstream —
//! Chern character, exterior powers, Todd class, Chern classes — is
//! computed from the roots, which is exactly what the splitting principle
//! licenses.
//!
//! Exterior powers are computed by direct enumeration of k-element subsets
//! of the root multiset. At the scales this crate targets (rank at most 12)
//! that is at most `C(12, 6) = 924` subsets, and exactness beats cleverness.

use std::fmt;

use num_bigint::BigInt;

use crate::numbers::{bernoulli, factorial};
use crate::rat::Rat;
use crate::series::GradedSeries;

/// Errors from K-class operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassError {
    #[error("operation requires an effective class (all multiplicities >= 0)")]
    VirtualClass,
    #[error("classes live over different variable counts: {0} vs {1}")]
    VariableMismatch(usize, usize),
}

/// An integer linear form in the Chern-root variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinForm(Vec<i64>);

impl LinForm {
    pub fn new(coeffs: Vec<i64>) -> Self {
        LinForm(coeffs)
    }

    pub fn zero(num_vars: usize) -> Self {
        LinForm(vec![0; num_vars])
    }

    /// The form `a_{i+1}`.
    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut c = vec![0; num_vars];
        c[i] = 1;
        LinForm(c)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn neg(&self) -> Self {
        LinForm(self.0.iter().map(|&c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        LinForm(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn to_series(&self, trunc: usize) -> GradedSeries {
        GradedSeries::linear_form(self.0.len(), trunc, &self.0)
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if first {
                if c == 1 {
                    write!(f, "a{}", i + 1)?;
                } else if c == -1 {
                    write!(f, "-a{}", i + 1)?;
                } else {
                    write!(f, "{}a{}", c, i + 1)?;
                }
                first = false;
            } else if c > 0 {
                if c == 1 {
                    write!(f, "+a{}", i + 1)?;
                } else {
                    write!(f, "+{}a{}", c, i + 1)?;
                }
            } else if c == -1 {
                write!(f, "-a{}", i + 1)?;
            } else {
                write!(f, "{}a{}", c, i + 1)?;
            }
        }
        Ok(())
    }
}

/// Formal integer combination of line-bundle roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KClass {
    num_vars: usize,
    roots: Vec<(LinForm, i64)>,
}

impl KClass {
    /// Empty (rank-zero) class.
    pub fn zero(num_vars: usize) -> Self {
        KClass {
            num_vars,
            roots: Vec::new(),
        }
    }

    /// A single line with the given root.
    pub fn line(num_vars: usize, root: LinForm) -> Self {
        assert_eq!(root.coeffs().len(), num_vars);
        KClass {
            num_vars,
            roots: vec![(root, 1)],
        }
    }

    pub fn trivial_line(num_vars: usize) -> Self {
        Self::line(num_vars, LinForm::zero(num_vars))
    }

    pub fn from_roots(num_vars: usize, roots: Vec<(LinForm, i64)>) -> Self {
        let mut k = KClass { num_vars, roots };
        k.normalize();
        k
    }

    /// Rank-`g` class with roots `a_1, ..., a_g`: the generic bundle.
    pub fn generic_bundle(g: usize) -> Self {
        Self::from_roots(g, (0..g).map(|i| (LinForm::var(g, i), 1)).collect())
    }

    /// `E + E^dual` for the generic rank-`g` bundle: roots `±a_i`.
    pub fn hodge_sum(g: usize) -> Self {
        let e = Self::generic_bundle(g);
        e.direct_sum(&e.dual()).expect("same variables")
    }

    fn normalize(&mut self) {
        self.roots.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(LinForm, i64)> = Vec::with_capacity(self.roots.len());
        for (form, mult) in self.roots.drain(..) {
            if let Some(last) = merged.last_mut() {
                if last.0 == form {
                    last.1 += mult;
                    continue;
                }
            }
            merged.push((form, mult));
        }
        merged.retain(|(_, m)| *m != 0);
        self.roots = merged;
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn roots(&self) -> &[(LinForm, i64)] {
        &self.roots
    }

    pub fn rank(&self) -> i64 {
        self.roots.iter().map(|(_, m)| m).sum()
    }

    pub fn is_effective(&self) -> bool {
        self.roots.iter().all(|(_, m)| *m >= 0)
    }

    pub fn dual(&self) -> Self {
        Self::from_roots(
            self.num_vars,
            self.roots.iter().map(|(f, m)| (f.neg(), *m)).collect(),
        )
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self, ClassError> {
        if self.num_vars != other.num_vars {
            return Err(ClassError::VariableMismatch(self.num_vars, other.num_vars));
        }
        let mut roots = self.roots.clone();
        roots.extend(other.roots.iter().cloned());
        Ok(Self::from_roots(self.num_vars, roots))
    }

    /// Formal difference `self - other`.
    pub fn minus(&self, other: &Self) -> Result<Self, ClassError> {
        if self.num_vars != other.num_vars {
            return Err(ClassError::VariableMismatch(self.num_vars, other.num_vars));
        }
        let mut roots = self.roots.clone();
        roots.extend(other.roots.iter().map(|(f, m)| (f.clone(), -m)));
        Ok(Self::from_roots(self.num_vars, roots))
    }

    /// Tensor product: roots add pairwise, multiplicities multiply.
    pub fn tensor(&self, other: &Self) -> Result<Self, ClassError> {
        if self.num_vars != other.num_vars {
            return Err(ClassError::VariableMismatch(self.num_vars, other.num_vars));
        }
        let mut roots = Vec::new();
        for (fa, ma) in &self.roots {
            for (fb, mb) in &other.roots {
                roots.push((fa.add(fb), ma * mb));
            }
        }
        Ok(Self::from_roots(self.num_vars, roots))
    }

    /// Roots repeated by multiplicity; effective classes only.
    pub fn expanded_roots(&self) -> Result<Vec<LinForm>, ClassError> {
        if !self.is_effective() {
            return Err(ClassError::VirtualClass);
        }
        let mut out = Vec::new();
        for (form, mult) in &self.roots {
            for _ in 0..*mult {
                out.push(form.clone());
            }
        }
        Ok(out)
    }

    /// Chern character `sum_roots mult * exp(root)`, truncated at `trunc`.
    pub fn ch(&self, trunc: usize) -> GradedSeries {
        let mut out = GradedSeries::zero(self.num_vars, trunc);
        for (form, mult) in &self.roots {
            let e = GradedSeries::exp_linear_form(self.num_vars, trunc, form.coeffs());
            out = out.add(&e.scale(&Rat::int(*mult))).expect("same context");
        }
        out
    }

    /// `k`-th exterior power by direct subset enumeration.
    pub fn lambda(&self, k: usize) -> Result<KClass, ClassError> {
        let roots = self.expanded_roots()?;
        if k == 0 {
            return Ok(Self::trivial_line(self.num_vars));
        }
        if k > roots.len() {
            return Ok(Self::zero(self.num_vars));
        }
        let mut out = Vec::new();
        let mut stack: Vec<usize> = Vec::with_capacity(k);
        fn rec(
            start: usize,
            k: usize,
            roots: &[LinForm],
            stack: &mut Vec<usize>,
            out: &mut Vec<(LinForm, i64)>,
            num_vars: usize,
        ) {
            if stack.len() == k {
                let mut sum = LinForm::zero(num_vars);
                for &i in stack.iter() {
                    sum = sum.add(&roots[i]);
                }
                out.push((sum, 1));
                return;
            }
            for i in start..roots.len() {
                if roots.len() - i < k - stack.len() {
                    break;
                }
                stack.push(i);
                rec(i + 1, k, roots, stack, out, num_vars);
                stack.pop();
            }
        }
        rec(0, k, &roots, &mut stack, &mut out, self.num_vars);
        Ok(Self::from_roots(self.num_vars, out))
    }

    /// `sum_k sign^k ch(lambda^k)`. With `sign = -1` this equals
    /// `prod (1 - e^{root})` over the roots.
    pub fn lambda_pm1_ch(&self, sign: i64, trunc: usize) -> Result<GradedSeries, ClassError> {
        assert!(sign == 1 || sign == -1, "sign must be ±1");
        let rank = self.rank();
        if !self.is_effective() {
            return Err(ClassError::VirtualClass);
        }
        let mut out = GradedSeries::zero(self.num_vars, trunc);
        let mut sgn = Rat::one();
        for k in 0..=rank as usize {
            let chk = self.lambda(k)?.ch(trunc);
            out = out.add(&chk.scale(&sgn)).expect("same context");
            sgn *= Rat::int(sign);
        }
        Ok(out)
    }

    /// Todd class `prod Q(root)^mult` with
    /// `Q(x) = x/(1 - e^{-x}) = 1 + x/2 + sum B_{2k} x^{2k}/(2k)!`.
    /// Virtual classes use the series inverse of `Q`.
    pub fn todd(&self, trunc: usize) -> GradedSeries {
        let q: Vec<Rat> = todd_coefficients(trunc);
        let mut out = GradedSeries::one(self.num_vars, trunc);
        for (form, mult) in &self.roots {
            if form.is_zero() {
                continue; // Q(0) = 1
            }
            let factor = GradedSeries::univariate_in_form(self.num_vars, trunc, &q, form.coeffs());
            let factor = if *mult < 0 {
                factor.inverse().expect("Todd factor is a unit")
            } else {
                factor
            };
            for _ in 0..mult.unsigned_abs() {
                out = out.mul(&factor).expect("same context");
            }
        }
        out
    }

    /// `k`-th Chern class: the `k`-th elementary symmetric function of the
    /// roots. Effective classes only.
    pub fn chern(&self, k: usize, trunc: usize) -> Result<GradedSeries, ClassError> {
        Ok(self.total_chern(trunc)?.grade_component(k))
    }

    /// Total Chern class `prod (1 + root)`.
    pub fn total_chern(&self, trunc: usize) -> Result<GradedSeries, ClassError> {
        let roots = self.expanded_roots()?;
        let mut out = GradedSeries::one(self.num_vars, trunc);
        for root in &roots {
            let factor = GradedSeries::one(self.num_vars, trunc)
                .add(&root.to_series(trunc))
                .expect("same context");
            out = out.mul(&factor).expect("same context");
        }
        Ok(out)
    }

    /// Top Chern class: the product of all roots (zero if any root is 0).
    pub fn c_top(&self, trunc: usize) -> Result<GradedSeries, ClassError> {
        let roots = self.expanded_roots()?;
        let mut out = GradedSeries::one(self.num_vars, trunc);
        for root in &roots {
            out = out.mul(&root.to_series(trunc)).expect("same context");
        }
        Ok(out)
    }
}

/// Coefficients of `x/(1 - e^{-x})` up to degree `trunc`.
pub fn todd_coefficients(trunc: usize) -> Vec<Rat> {
    (0..=trunc)
        .map(|k| {
            if k == 1 {
                Rat::new(1, 2)
            } else {
                bernoulli(k) * Rat::from_big(BigInt::from(1), factorial(k))
            }
        })
        .collect()
}

/// Outcome of the top-Chern-class identity check
/// `todd(dual F) * sum_k (-1)^k ch(lambda^k F) = (-1)^g c_top(F)`.
#[derive(Clone, Debug)]
pub struct CgIdentityReport {
    pub g: usize,
    pub trunc: usize,
    pub first_failing_degree: Option<usize>,
    pub residual_degrees: Vec<(usize, GradedSeries)>,
}

impl CgIdentityReport {
    pub fn passed(&self) -> bool {
        self.first_failing_degree.is_none()
    }
}

/// Check the identity degree by degree for the generic rank-`g` bundle.
pub fn verify_cg_identity(g: usize, trunc: usize) -> CgIdentityReport {
    assert!(g >= 1, "g must be positive");
    assert!(trunc >= g, "truncation must reach degree g");
    let f = KClass::generic_bundle(g);
    let t = f.dual();
    let lhs = t
        .todd(trunc)
        .mul(&f.lambda_pm1_ch(-1, trunc).expect("effective"))
        .expect("same context");
    let sign = if g.is_multiple_of(2) {
        Rat::one()
    } else {
        Rat::int(-1)
    };
    let rhs = f.c_top(trunc).expect("effective").scale(&sign);
    let diff = lhs.sub(&rhs).expect("same context");
    let mut residuals = Vec::new();
    let mut first_failing = None;
    for d in 0..=trunc {
        let r = diff.grade_component(d);
        if !r.is_zero() && first_failing.is_none() {
            first_failing = Some(d);
        }
        residuals.push((d, r));
    }
    CgIdentityReport {
        g,
        trunc,
        first_failing_degree: first_failing,
        residual_degrees: residuals,
    }
}

/// The lambda-ring generating polynomial
/// `sum_k ch(lambda^k K) t^k` as a vector of series indexed by `k`,
/// computed by subset enumeration.
pub fn lambda_t_ch_by_enumeration(
    k_class: &KClass,
    trunc: usize,
) -> Result<Vec<GradedSeries>, ClassError> {
    let rank = k_class.rank();
    if !k_class.is_effective() {
        return Err(ClassError::VirtualClass);
    }
    (0..=rank as usize)
        .map(|k| Ok(k_class.lambda(k)?.ch(trunc)))
        .collect()
}

/// The same generating polynomial computed from the product formula
/// `prod_roots (1 + t e^{root})`, an independent route used as an oracle.
pub fn lambda_t_ch_by_product(
    k_class: &KClass,
    trunc: usize,
) -> Result<Vec<GradedSeries>, ClassError> {
    let roots = k_class.expanded_roots()?;
    let g = k_class.num_vars();
    // Polynomial in t with series coefficients.
    let mut poly: Vec<GradedSeries> = vec![GradedSeries::one(g, trunc)];
    for root in &roots {
        let e = GradedSeries::exp_linear_form(g, trunc, root.coeffs());
        let mut next: Vec<GradedSeries> = vec![GradedSeries::zero(g, trunc); poly.len() + 1];
        for (k, coeff) in poly.iter().enumerate() {
            next[k] = next[k].add(coeff).expect("same context");
            let lifted = coeff.mul(&e).expect("same context");
            next[k + 1] = next[k + 1].add(&lifted).expect("same context");
        }
        poly = next;
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trivial_line_ch_is_one() {
        let k = KClass::trivial_line(1);
        assert_eq!(k.ch(4), GradedSeries::one(1, 4));
    }

    #[test]
    fn hodge_sum_ch_g1() {
        // e^a + e^{-a} = 2 + a^2 + a^4/12 up to degree 4.
        let h = KClass::hodge_sum(1);
        let ch = h.ch(4);
        let mut expected = GradedSeries::constant(1, 4, Rat::int(2));
        let a = GradedSeries::var(1, 4, 0).unwrap();
        expected = expected.add(&a.pow(2)).unwrap();
        expected = expected.add(&a.pow(4).scale(&Rat::new(1, 12))).unwrap();
        assert_eq!(ch, expected);
    }

    #[test]
    fn ch_additivity() {
        let g = 2;
        let e = KClass::generic_bundle(g);
        let h = KClass::hodge_sum(g);
        let sum = e.ch(6).add(&e.dual().ch(6)).unwrap();
        assert_eq!(sum, h.ch(6));
    }

    #[test]
    fn lambda_top_of_hodge_sum_is_trivial() {
        // lambda^2 of {a, -a} has the single root 0.
        let h = KClass::hodge_sum(1);
        let l2 = h.lambda(2).unwrap();
        assert_eq!(l2, KClass::trivial_line(1));
    }

    #[test]
    fn lambda_one_is_identity() {
        let k = KClass::generic_bundle(3);
        assert_eq!(k.lambda(1).unwrap(), k);
    }

    #[test]
    fn lambda_beyond_rank_is_zero() {
        let k = KClass::generic_bundle(2);
        assert_eq!(k.lambda(5).unwrap(), KClass::zero(2));
    }

    #[test]
    fn lambda_rejects_virtual_classes() {
        let k = KClass::generic_bundle(2)
            .minus(&KClass::trivial_line(2))
            .unwrap();
        assert!(matches!(k.lambda(1), Err(ClassError::VirtualClass)));
    }

    #[test]
    fn lambda_product_formula_g2() {
        // sum ch(lambda^k H) t^k = prod (1 + e^{a_i} t)(1 + e^{-a_i} t).
        let h = KClass::hodge_sum(2);
        let enumerated = lambda_t_ch_by_enumeration(&h, 6).unwrap();
        let product = lambda_t_ch_by_product(&h, 6).unwrap();
        assert_eq!(enumerated.len(), product.len());
        for (k, (a, b)) in enumerated.iter().zip(&product).enumerate() {
            assert_eq!(a, b, "coefficient of t^{k}");
        }
    }

    #[test]
    fn lambda_pm1_examples() {
        // 1 - e^0 = 0.
        let triv = KClass::trivial_line(1);
        assert!(triv.lambda_pm1_ch(-1, 4).unwrap().is_zero());

        // Degree-0 part of sum ch(lambda^k H) is 2^{2g}.
        for g in 1..=3 {
            let h = KClass::hodge_sum(g);
            let s = h.lambda_pm1_ch(1, 2).unwrap();
            assert_eq!(s.constant_term(), Rat::int(1 << (2 * g)), "2^(2g) at g={g}");
        }

        // Lowest nonzero degree of prod (1 - e^{root}) is g with leading
        // term prod(-root).
        let f = KClass::generic_bundle(3);
        let s = f.lambda_pm1_ch(-1, 5).unwrap();
        for d in 0..3 {
            assert!(s.grade_component(d).is_zero(), "degree {d} should vanish");
        }
        let lead = s.grade_component(3);
        let expected = f.c_top(5).unwrap().scale(&Rat::int(-1));
        assert_eq!(lead, expected);
    }

    #[test]
    fn todd_basics() {
        // Trivial class: Todd = 1.
        assert_eq!(KClass::trivial_line(1).todd(4), GradedSeries::one(1, 4));
        // Degree-2 coefficient of Q(x) is B_2/2! = 1/12.
        let line = KClass::line(1, LinForm::var(1, 0));
        let t = line.todd(4);
        assert_eq!(t.coeff(&[0]), Rat::one());
        assert_eq!(t.coeff(&[1]), Rat::new(1, 2));
        assert_eq!(t.coeff(&[2]), Rat::new(1, 12));
        assert_eq!(t.coeff(&[3]), Rat::zero());
        assert_eq!(t.coeff(&[4]), Rat::new(-1, 720));
    }

    #[test]
    fn todd_multiplicativity_on_random_splits() {
        let cases = [
            (KClass::generic_bundle(2), KClass::hodge_sum(2)),
            (
                KClass::line(2, LinForm::new(vec![1, -2])),
                KClass::generic_bundle(2).dual(),
            ),
        ];
        for (k1, k2) in cases {
            let sum = k1.direct_sum(&k2).unwrap();
            let lhs = sum.todd(6);
            let rhs = k1.todd(6).mul(&k2.todd(6)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn virtual_todd_cancels() {
        let k = KClass::generic_bundle(2);
        let diff = k.minus(&k).unwrap();
        assert_eq!(diff.todd(6), GradedSeries::one(2, 6));
        // todd(K) * todd(-K) = 1.
        let neg = KClass::zero(2).minus(&k).unwrap();
        let prod = k.todd(6).mul(&neg.todd(6)).unwrap();
        assert_eq!(prod, GradedSeries::one(2, 6));
    }

    #[test]
    fn chern_classes() {
        let f2 = KClass::generic_bundle(2);
        let a1 = GradedSeries::var(2, 4, 0).unwrap();
        let a2 = GradedSeries::var(2, 4, 1).unwrap();
        assert_eq!(f2.c_top(4).unwrap(), a1.mul(&a2).unwrap());

        // c_1(H) = 0: roots cancel in pairs.
        let h = KClass::hodge_sum(2);
        assert!(h.chern(1, 4).unwrap().is_zero());

        let f3 = KClass::generic_bundle(3);
        let product = GradedSeries::var(3, 4, 0)
            .unwrap()
            .mul(&GradedSeries::var(3, 4, 1).unwrap())
            .unwrap()
            .mul(&GradedSeries::var(3, 4, 2).unwrap())
            .unwrap();
        assert_eq!(f3.chern(3, 4).unwrap(), product);

        // A zero root annihilates the top Chern class.
        let with_zero = f2.direct_sum(&KClass::trivial_line(2)).unwrap();
        assert!(with_zero.c_top(4).unwrap().is_zero());
    }

    #[test]
    fn cg_identity_small_ranks() {
        for g in 1..=3 {
            let report = verify_cg_identity(g, 2 * g + 2);
            assert!(report.passed(), "g={g}: {:?}", report.first_failing_degree);
        }
    }

    #[test]
    fn dual_negates_odd_degrees() {
        let k = KClass::from_roots(
            2,
            vec![
                (LinForm::new(vec![1, 1]), 1),
                (LinForm::new(vec![2, -1]), 1),
            ],
        );
        let ch = k.ch(6);
        let chd = k.dual().ch(6);
        for d in 0..=6 {
            let sign = if d % 2 == 0 { Rat::one() } else { Rat::int(-1) };
            assert_eq!(chd.grade_component(d), ch.grade_component(d).scale(&sign));
        }
    }

    #[test]
    fn hodge_sum_ch_is_even_with_doubled_components() {
        for g in 1..=3 {
            let h = KClass::hodge_sum(g);
            let e = KClass::generic_bundle(g);
            let ch_h = h.ch(8);
            let ch_e = e.ch(8);
            for d in 0..=8 {
                if d % 2 == 1 {
                    assert!(ch_h.grade_component(d).is_zero(), "odd degree {d}");
                } else {
                    assert_eq!(
                        ch_h.grade_component(d),
                        ch_e.grade_component(d).scale(&Rat::int(2)),
                        "degree {d}"
                    );
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        // ch is multiplicative under tensor for split classes.
        #[test]
        fn ch_ring_homomorphism(c1 in -2i64..3, c2 in -2i64..3, d1 in -2i64..3, d2 in -2i64..3) {
            let k1 = KClass::line(2, LinForm::new(vec![c1, c2]));
            let k2 = KClass::line(2, LinForm::new(vec![d1, d2]));
            let t = k1.tensor(&k2).unwrap();
            prop_assert_eq!(t.ch(5), k1.ch(5).mul(&k2.ch(5)).unwrap());
        }

        #[test]
        fn dual_is_involutive(c1 in -3i64..4, c2 in -3i64..4, m in 1i64..3) {
            let k = KClass::from_roots(2, vec![(LinForm::new(vec![c1, c2]), m)]);
            prop_assert_eq!(k.dual().dual(), k);
        }
    }
}
