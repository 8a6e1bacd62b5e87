//! The kill/substitute rewriting system on top-Chern-class monomials.
//!
//! `delta(I)` measures the codimension of the image of the pullback map
//! from base boundary classes into the span of the `Y_i`, `i in I`. A
//! monomial `cg * Y_{i_1} ... Y_{i_mu}` dies outright when its support is
//! an empty stratum or has positive delta (the residue surjection factors
//! through the relative log forms). When delta vanishes, a repeated symbol
//! `Y_i` can be traded for a base pullback plus correction monomials with
//! strictly larger support: that is the substitution rule, and iterating
//! it terminates because every step lowers the repeat excess by one.

use std::collections::BTreeSet;

use crate::grr::config::BoundaryConfig;
use crate::grr::cycle::{CycleExpr, Gamma, Marker, Monomial};
use crate::grr::GrrError;
use crate::linalg::{rat_rank, rat_solve_unique, subsets_of_size};
use crate::rat::Rat;

/// `delta_I = |I| - rank` of the multiplicity matrix restricted to rows
/// `I` and columns `J(I)`.
pub fn delta(i_set: &BTreeSet<usize>, cfg: &BoundaryConfig) -> Result<usize, GrrError> {
    if i_set.is_empty() {
        return Err(GrrError::EmptyIndexSet);
    }
    if !cfg.is_stratum(i_set) {
        return Err(GrrError::NotAStratum(cfg.render_y_set(i_set)));
    }
    let j_set = cfg.eff_j(i_set);
    let matrix: Vec<Vec<Rat>> = i_set
        .iter()
        .map(|&i| {
            j_set
                .iter()
                .map(|&j| Rat::int(cfg.nu(i, j) as i64))
                .collect()
        })
        .collect();
    let rank = rat_rank(&matrix);
    let d = i_set.len() - rank;
    // Rank logic: delta = 0 forces |I| <= |J(I)|.
    if d == 0 {
        assert!(
            i_set.len() <= j_set.len(),
            "delta = 0 with |I| > |J(I)| is impossible"
        );
    }
    Ok(d)
}

/// The residue surjection onto the stratum factors through the relative
/// log forms iff `delta > 0`.
pub fn residue_factors(i_set: &BTreeSet<usize>, cfg: &BoundaryConfig) -> Result<bool, GrrError> {
    Ok(delta(i_set, cfg)? > 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KillReason {
    /// The divisor support is not a nonempty stratum.
    EmptyStratum,
    /// `delta > 0`: the residue factors through the relative log forms.
    DeltaPositive,
}

/// Does the top-Chern monomial vanish outright? `None` means it survives.
pub fn kill_rule(mono: &Monomial, cfg: &BoundaryConfig) -> Result<Option<KillReason>, GrrError> {
    if mono.marker() != Some(Marker::Cg) {
        return Err(GrrError::NotCgMonomial);
    }
    let support = mono.y_support();
    if support.is_empty() {
        return Ok(None);
    }
    if !cfg.is_stratum(&support) {
        return Ok(Some(KillReason::EmptyStratum));
    }
    if delta(&support, cfg)? > 0 {
        return Ok(Some(KillReason::DeltaPositive));
    }
    Ok(None)
}

/// Solved substitution data: `Y_i * Y_I = f^*(Gamma) * Y_I + sum beta_l
/// Y_{I + {l}}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionStep {
    pub index: usize,
    pub i_set: BTreeSet<usize>,
    pub gamma: Gamma,
    pub betas: Vec<(usize, Rat)>,
}

/// Solve for the base divisor that cuts out `Y_i` over the stratum and
/// return the rewritten expression for `Y_i * Y_I` (markerless).
///
/// The linear system `sum_j gamma_j nu_{i'}^j = [i' = i]` over the columns
/// `J(I)` is solvable exactly when `delta = 0`; among its solutions the one
/// with the fewest nonzero entries is chosen, ties broken by smallest
/// column indices. The solution is verified against the row relation
/// before anything is emitted.
pub fn substitute_rule(
    index: usize,
    i_set: &BTreeSet<usize>,
    cfg: &BoundaryConfig,
) -> Result<(CycleExpr, SubstitutionStep), GrrError> {
    if !i_set.contains(&index) {
        return Err(GrrError::IndexNotInSet {
            index: cfg.y_name(index).to_string(),
            set: cfg.render_y_set(i_set),
        });
    }
    let d = delta(i_set, cfg)?;
    if d != 0 {
        return Err(GrrError::DeltaNonzero {
            set: cfg.render_y_set(i_set),
            delta: d,
        });
    }
    let rows: Vec<usize> = i_set.iter().copied().collect();
    let cols: Vec<usize> = cfg.eff_j(i_set).into_iter().collect();
    let target: Vec<Rat> = rows
        .iter()
        .map(|&i| if i == index { Rat::one() } else { Rat::zero() })
        .collect();

    // Minimal-support solution: smallest column subsets first, lexicographic
    // within a size, unique-solution subsets only.
    let mut gamma_cols: Option<(Vec<usize>, Vec<Rat>)> = None;
    'outer: for size in 1..=cols.len() {
        for subset in subsets_of_size(cols.len(), size) {
            let a: Vec<Vec<Rat>> = rows
                .iter()
                .map(|&i| {
                    subset
                        .iter()
                        .map(|&c| Rat::int(cfg.nu(i, cols[c]) as i64))
                        .collect()
                })
                .collect();
            if let Some(sol) = rat_solve_unique(&a, &target) {
                let chosen: Vec<usize> = subset.iter().map(|&c| cols[c]).collect();
                gamma_cols = Some((chosen, sol));
                break 'outer;
            }
        }
    }
    let (chosen, sol) = gamma_cols.ok_or_else(|| {
        GrrError::Internal(format!(
            "no gamma solution over {} despite delta = 0",
            cfg.render_y_set(i_set)
        ))
    })?;

    // Round trip: the solved coefficients must reproduce the row relation.
    for &i in &rows {
        let mut acc = Rat::zero();
        for (j, c) in chosen.iter().zip(&sol) {
            acc += &(c * &Rat::int(cfg.nu(i, *j) as i64));
        }
        let expected = if i == index { Rat::one() } else { Rat::zero() };
        if acc != expected {
            return Err(GrrError::Internal(format!(
                "gamma round trip failed on row {}",
                cfg.y_name(i)
            )));
        }
    }

    let gamma = Gamma::new(chosen.iter().cloned().zip(sol.iter().cloned()).collect());

    // Y_i = f^*(Gamma) - sum_{l not in I} (sum_j gamma_j nu_l^j) Y_l, so
    // multiplying by Y_I gives the substitution; terms over empty strata
    // drop on insertion.
    let mut out = CycleExpr::zero();
    out.insert(
        Monomial::one()
            .times_y_set(i_set)
            .times_gamma(gamma.clone()),
        Rat::one(),
        cfg,
    );
    let mut betas = Vec::new();
    for l in 0..cfg.num_y() {
        if i_set.contains(&l) {
            continue;
        }
        let mut coeff = Rat::zero();
        for (j, c) in chosen.iter().zip(&sol) {
            coeff += &(c * &Rat::int(cfg.nu(l, *j) as i64));
        }
        if coeff.is_zero() {
            continue;
        }
        let beta = -coeff;
        betas.push((l, beta.clone()));
        out.insert(Monomial::one().times_y_set(i_set).times_y(l, 1), beta, cfg);
    }

    Ok((
        out,
        SubstitutionStep {
            index,
            i_set: i_set.clone(),
            gamma,
            betas,
        },
    ))
}

/// One recorded rewriting event.
#[derive(Clone, Debug)]
pub enum ReduceStep {
    Killed {
        monomial: Monomial,
        coeff: Rat,
        reason: KillReason,
    },
    Substituted {
        monomial: Monomial,
        coeff: Rat,
        step: SubstitutionStep,
    },
}

/// Result of running the rewriting system to normal form.
#[derive(Clone, Debug)]
pub struct Reduction {
    /// Monomials in normal form: squarefree support, `delta = 0`, meeting
    /// the multiple locus.
    pub normal: CycleExpr,
    /// Monomials whose support misses the multiple locus; returned
    /// unchanged, as the rewriting has nothing to say about them.
    pub passed_through: CycleExpr,
    pub steps: Vec<ReduceStep>,
}

/// Deterministic reduction: canonical monomial order, smallest repeated
/// index first.
pub fn reduce(expr: &CycleExpr, cfg: &BoundaryConfig) -> Result<Reduction, GrrError> {
    reduce_inner(expr, cfg, None)
}

/// Reduction with a seeded random rule order; used to confirm confluence.
/// The normal form must match [`reduce`] for every seed.
pub fn reduce_seeded(
    expr: &CycleExpr,
    cfg: &BoundaryConfig,
    seed: u64,
) -> Result<Reduction, GrrError> {
    reduce_inner(expr, cfg, Some(SplitMix64::new(seed)))
}

fn reduce_inner(
    expr: &CycleExpr,
    cfg: &BoundaryConfig,
    mut rng: Option<SplitMix64>,
) -> Result<Reduction, GrrError> {
    // Preconditions and the pass-through split.
    let mut work = CycleExpr::zero();
    let mut passed_through = CycleExpr::zero();
    for (mono, coeff) in expr.terms() {
        if mono.marker() != Some(Marker::Cg) {
            return Err(GrrError::PreconditionViolated(format!(
                "reduce expects top-Chern monomials, got {}",
                mono.render(cfg)
            )));
        }
        let support = mono.y_support();
        if support.intersection(cfg.z_support()).next().is_none() {
            passed_through.insert(mono.clone(), coeff.clone(), cfg);
        } else {
            work.insert(mono.clone(), coeff.clone(), cfg);
        }
    }

    let cap = cfg.rewrite_cap();
    let mut steps = Vec::new();
    let mut substitutions = 0usize;
    loop {
        // Kill sweep.
        let monos: Vec<Monomial> = work.terms().map(|(m, _)| m.clone()).collect();
        for mono in monos {
            if let Some(reason) = kill_rule(&mono, cfg)? {
                if let Some(coeff) = work.remove(&mono) {
                    steps.push(ReduceStep::Killed {
                        monomial: mono,
                        coeff,
                        reason,
                    });
                }
            }
        }

        // Pick a monomial with a repeated symbol.
        let candidates: Vec<Monomial> = work
            .terms()
            .filter(|(m, _)| m.repeat_excess() > 0)
            .map(|(m, _)| m.clone())
            .collect();
        if candidates.is_empty() {
            break;
        }
        let (mono, index) = match rng.as_mut() {
            None => {
                let m = candidates[0].clone();
                let i = m.smallest_repeated().expect("candidate has a repeat");
                (m, i)
            }
            Some(rng) => {
                let m = candidates[rng.below(candidates.len())].clone();
                let reps = m.repeated_indices();
                let i = reps[rng.below(reps.len())];
                (m, i)
            }
        };
        let coeff = work.remove(&mono).expect("candidate still present");
        let support = mono.y_support();
        let (sub_expr, step) = substitute_rule(index, &support, cfg)?;
        let leftover = mono.clone().divide_y(&support, index);
        let expanded = sub_expr.mul_monomial(&leftover, cfg)?.scale(&coeff);
        work = work.add(&expanded, cfg);
        steps.push(ReduceStep::Substituted {
            monomial: mono,
            coeff,
            step,
        });

        substitutions += 1;
        if substitutions > cap {
            return Err(GrrError::NonTermination {
                cap,
                state: work.render(cfg),
            });
        }
    }

    // Normal-form postconditions.
    for (mono, _) in work.terms() {
        debug_assert_eq!(mono.repeat_excess(), 0);
        debug_assert_eq!(delta(&mono.y_support(), cfg)?, 0);
        debug_assert!(mono
            .y_support()
            .intersection(cfg.z_support())
            .next()
            .is_some());
    }

    Ok(Reduction {
        normal: work,
        passed_through,
        steps,
    })
}

/// Tiny deterministic generator for rule-order fuzzing.
#[derive(Clone, Debug)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grr::cycle::parse_cycle_expr;

    fn cfg_from(text: &str) -> BoundaryConfig {
        BoundaryConfig::parse(text).unwrap()
    }

    fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    const MULTIFIBER: &str = "\
[components]
Y = Y1
T = T1

[nu]
Y1: T1=2

[meta]
base_dim = 1
fiber_dim = 2
";

    const TWO_OVER_ONE: &str = "\
[components]
Y = Y1, Y2
T = T1

[nu]
Y1: T1=1
Y2: T1=1

[strata]
Y1, Y2

[meta]
base_dim = 1
fiber_dim = 1
";

    const CHAIN: &str = "\
[components]
Y = Y1, Y2
T = T1

[nu]
Y1: T1=1
Y2: T1=2

[strata]
Y1, Y2

[meta]
base_dim = 1
fiber_dim = 2
";

    const DIAGONAL: &str = "\
[components]
Y = Y1, Y2
T = T1, T2

[nu]
Y1: T1=1
Y2: T2=1

[strata]
Y1, Y2

[meta]
base_dim = 2
fiber_dim = 1
";

    #[test]
    fn delta_examples() {
        // Semistable single component: surjective, delta 0.
        let cfg = cfg_from(TWO_OVER_ONE);
        assert_eq!(delta(&set(&[0]), &cfg).unwrap(), 0);
        // Two rows over one column: rank 1, delta 1.
        assert_eq!(delta(&set(&[0, 1]), &cfg).unwrap(), 1);
        // Identity matrix: delta 0.
        let diag = cfg_from(DIAGONAL);
        assert_eq!(delta(&set(&[0, 1]), &diag).unwrap(), 0);
        // Errors.
        assert!(matches!(
            delta(&BTreeSet::new(), &cfg),
            Err(GrrError::EmptyIndexSet)
        ));
        // Same components but without the declared crossing.
        let no_stratum = cfg_from(&TWO_OVER_ONE.replace("[strata]\nY1, Y2\n", ""));
        assert!(matches!(
            delta(&set(&[0, 1]), &no_stratum),
            Err(GrrError::NotAStratum(_))
        ));
    }

    #[test]
    fn residue_factors_tracks_delta() {
        let cfg = cfg_from(TWO_OVER_ONE);
        assert!(!residue_factors(&set(&[0]), &cfg).unwrap());
        assert!(residue_factors(&set(&[0, 1]), &cfg).unwrap());
        let diag = cfg_from(DIAGONAL);
        assert!(!residue_factors(&set(&[0, 1]), &diag).unwrap());
    }

    #[test]
    fn kill_rule_examples() {
        let cfg = cfg_from(TWO_OVER_ONE);
        // delta {0,1} = 1: killed.
        let m = Monomial::cg().times_y(0, 1).times_y(1, 1);
        assert_eq!(
            kill_rule(&m, &cfg).unwrap(),
            Some(KillReason::DeltaPositive)
        );
        // Single component with delta 0 survives.
        let m = Monomial::cg().times_y(0, 1);
        assert_eq!(kill_rule(&m, &cfg).unwrap(), None);
        // Empty stratum.
        let cfg3 = cfg_from(
            "\
[components]
Y = Y1, Y2, Y3
T = T1

[nu]
Y1: T1=1
Y2: T1=1
Y3: T1=1

[strata]
Y1, Y2

[meta]
base_dim = 1
fiber_dim = 1
",
        );
        let m = Monomial::cg().times_y(0, 1).times_y(2, 1);
        assert_eq!(
            kill_rule(&m, &cfg3).unwrap(),
            Some(KillReason::EmptyStratum)
        );
        // Marker required.
        let unmarked = Monomial::one().times_y(0, 1);
        assert!(matches!(
            kill_rule(&unmarked, &cfg),
            Err(GrrError::NotCgMonomial)
        ));
    }

    #[test]
    fn substitute_double_fiber() {
        // nu = (2): Y1 * Y1 = f^*(1/2 T1) * Y1.
        let cfg = cfg_from(MULTIFIBER);
        let (expr, step) = substitute_rule(0, &set(&[0]), &cfg).unwrap();
        assert_eq!(step.gamma.coeffs(), &[(0, Rat::new(1, 2))]);
        assert!(step.betas.is_empty());
        assert_eq!(expr.render(&cfg), "f*(1/2 T1)*Y1");
    }

    #[test]
    fn substitute_reduced_two_components() {
        // nu = (1,1)^T: Y1 * Y1 = f^*(T1) * Y1 - Y1*Y2.
        let cfg = cfg_from(TWO_OVER_ONE);
        let (expr, step) = substitute_rule(0, &set(&[0]), &cfg).unwrap();
        assert_eq!(step.gamma.coeffs(), &[(0, Rat::one())]);
        assert_eq!(step.betas, vec![(1, Rat::int(-1))]);
        assert_eq!(expr.render(&cfg), "f*(T1)*Y1 - Y1*Y2");
    }

    #[test]
    fn substitute_identity_nu() {
        // Identity matrix: Y1 * Y_{12} = f^*(T1) * Y_{12}.
        let cfg = cfg_from(DIAGONAL);
        let (expr, step) = substitute_rule(0, &set(&[0, 1]), &cfg).unwrap();
        assert_eq!(step.gamma.coeffs(), &[(0, Rat::one())]);
        assert!(step.betas.is_empty());
        assert_eq!(expr.render(&cfg), "f*(T1)*Y1*Y2");
    }

    #[test]
    fn substitute_preconditions() {
        let cfg = cfg_from(TWO_OVER_ONE);
        assert!(matches!(
            substitute_rule(1, &set(&[0]), &cfg),
            Err(GrrError::IndexNotInSet { .. })
        ));
        assert!(matches!(
            substitute_rule(0, &set(&[0, 1]), &cfg),
            Err(GrrError::DeltaNonzero { delta: 1, .. })
        ));
    }

    #[test]
    fn reduce_multifiber_square() {
        let cfg = cfg_from(MULTIFIBER);
        let expr = parse_cycle_expr("cg*Y1*Y1", &cfg).unwrap();
        let red = reduce(&expr, &cfg).unwrap();
        assert_eq!(red.normal.render(&cfg), "cg*f*(1/2 T1)*Y1");
        assert!(red.passed_through.is_zero());
        assert_eq!(red.steps.len(), 1);
    }

    #[test]
    fn reduce_chain_trace() {
        // Hand-traced: cg*Y2^2 -> cg*f*(1/2 T1)*Y2 - 1/2 cg*Y1*Y2, and the
        // second monomial dies because delta{1,2} = 1.
        let cfg = cfg_from(CHAIN);
        let expr = parse_cycle_expr("cg*Y2*Y2", &cfg).unwrap();
        let red = reduce(&expr, &cfg).unwrap();
        assert_eq!(red.normal.render(&cfg), "cg*f*(1/2 T1)*Y2");
        let kills: Vec<_> = red
            .steps
            .iter()
            .filter(|s| matches!(s, ReduceStep::Killed { .. }))
            .collect();
        assert_eq!(kills.len(), 1);
        match kills[0] {
            ReduceStep::Killed { coeff, reason, .. } => {
                assert_eq!(coeff, &Rat::new(-1, 2));
                assert_eq!(*reason, KillReason::DeltaPositive);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn reduce_passes_through_off_z_monomials() {
        // Y1 misses the multiple locus in the chain config: untouched.
        let cfg = cfg_from(CHAIN);
        let expr = parse_cycle_expr("cg*Y1*Y1", &cfg).unwrap();
        let red = reduce(&expr, &cfg).unwrap();
        assert!(red.normal.is_zero());
        assert_eq!(red.passed_through.render(&cfg), "cg*Y1^2");
        assert!(red.steps.is_empty());
    }

    #[test]
    fn reduce_requires_cg() {
        let cfg = cfg_from(CHAIN);
        let expr = parse_cycle_expr("Y1*Y2", &cfg).unwrap();
        assert!(matches!(
            reduce(&expr, &cfg),
            Err(GrrError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn reduce_cap_guards_against_runaway_inputs() {
        // Exponent far above the boundary dimension exhausts the cap.
        let cfg = cfg_from(MULTIFIBER);
        let mono = Monomial::cg().times_y(0, 40);
        let expr = CycleExpr::from_monomial(mono, Rat::one(), &cfg);
        assert!(matches!(
            reduce(&expr, &cfg),
            Err(GrrError::NonTermination { .. })
        ));
    }

    #[test]
    fn seeded_reduction_confluent_on_chain() {
        let cfg = cfg_from(CHAIN);
        let expr = parse_cycle_expr("cg*Y2*Y2*Y2 + 2*cg*Y1*Y2*Y2", &cfg).unwrap();
        let baseline = reduce(&expr, &cfg).unwrap();
        for seed in 0..50 {
            let fuzzed = reduce_seeded(&expr, &cfg, seed).unwrap();
            assert_eq!(fuzzed.normal, baseline.normal, "seed {seed}");
            assert_eq!(fuzzed.passed_through, baseline.passed_through);
        }
    }

    #[test]
    fn splitmix_is_deterministic() {
        let mut a = SplitMix64::new(7);
        let mut b = SplitMix64::new(7);
        for _ in 0..10 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
