//! Pushforward vanishing and the correction-term ledger.
//!
//! The cancellation argument has three moving parts. First, every
//! correction term arising from the boundary comparison of Todd classes is
//! tracked at support level: `err` terms live on strata where two or more
//! components of one reduced pullback meet, `v` terms on supports meeting
//! the multiple locus `Z_j`, `w` terms on supports with two distinct
//! components of a reduced pullback, and `N(i)` terms on single components
//! lying over deeper base strata. Second, each family is annihilated by a
//! named mechanism: the residue kill for `err` and all-onto `w` supports,
//! and the pushforward argument for everything meeting `Z`. Third, the
//! pushforward argument itself: after rewriting to normal form, replace the
//! top Chern class by `f^*(xi) + W`; the `W` part dies against the multiple
//! locus and the pullback part dies because the fibers have dimension at
//! least the relative dimension. When `Z` is empty the comparison sheaf
//! vanishes and the whole ledger beyond the top-Chern identity is empty.

use std::collections::BTreeSet;
use std::fmt;

use crate::classes::{verify_cg_identity, CgIdentityReport};
use crate::grr::config::BoundaryConfig;
use crate::grr::cycle::{CycleExpr, Marker, Monomial};
use crate::grr::rewrite::{delta, reduce, KillReason, ReduceStep, Reduction};
use crate::grr::GrrError;
use crate::rat::Rat;

/// Which family a correction term belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// From the quotient of the reduced-pullback structure sheaves.
    ErrTilde,
    /// The comparison sheaf as a whole (used for summary entries).
    ExtC,
    /// Ext-Todd of the non-reduced part of the pullback of `T_j`.
    Vj(usize),
    /// Ext-Todd of the normalization excess of the reduced pullback of
    /// `T_j`.
    Wj(usize),
    /// A component lying in two or more reduced pullbacks.
    Ni(usize),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::ErrTilde => write!(f, "err"),
            Origin::ExtC => write!(f, "ext-C"),
            Origin::Vj(j) => write!(f, "v[{j}]"),
            Origin::Wj(j) => write!(f, "w[{j}]"),
            Origin::Ni(i) => write!(f, "N[{i}]"),
        }
    }
}

/// How a support was annihilated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fate {
    /// Killed by the residue surjection onto a depth-two stratum.
    KilledErrStratum,
    /// Killed because `delta > 0` on the support.
    KilledDeltaPositive,
    /// Killed because the support is an empty stratum.
    KilledEmptyStratum,
    /// Survived rewriting and vanished under pushforward: `|I| <= |J(I)|`,
    /// so fibers have dimension at least the relative dimension.
    PushforwardZero { i_len: usize, j_len: usize },
    /// The `W` part of the top Chern class annihilated it.
    WAnnihilated,
}

impl fmt::Display for Fate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fate::KilledErrStratum => write!(f, "killed (depth-two residue)"),
            Fate::KilledDeltaPositive => write!(f, "killed (delta > 0)"),
            Fate::KilledEmptyStratum => write!(f, "killed (empty stratum)"),
            Fate::PushforwardZero { i_len, j_len } => {
                write!(f, "pushforward zero (|I| = {i_len} <= |J| = {j_len})")
            }
            Fate::WAnnihilated => write!(f, "annihilated by W"),
        }
    }
}

/// One tracked correction term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionTerm {
    pub origin: Origin,
    pub support: BTreeSet<usize>,
    pub fate: Fate,
}

/// Outcome of the pushforward-vanishing pipeline on one expression.
#[derive(Clone, Debug)]
pub struct PushforwardReport {
    pub verdict: bool,
    pub reduction: Reduction,
    /// Rendered monomial and its fate, in processing order.
    pub fates: Vec<(String, Fate)>,
    /// A rendered witness when the verdict is false.
    pub witness: Option<String>,
}

/// Run the full vanishing pipeline on an expression of top-Chern monomials
/// that all meet the multiple locus: reduce to normal form, split the top
/// Chern class into `f^*(xi) + W`, kill the `W` part against the multiple
/// locus, and check the fiber-dimension inequality on the pullback part.
pub fn pushforward_vanishes(
    expr: &CycleExpr,
    cfg: &BoundaryConfig,
) -> Result<PushforwardReport, GrrError> {
    for (mono, _) in expr.terms() {
        if mono.marker() != Some(Marker::Cg) {
            return Err(GrrError::PreconditionViolated(format!(
                "pushforward pipeline expects top-Chern monomials, got {}",
                mono.render(cfg)
            )));
        }
        if mono
            .y_support()
            .intersection(cfg.z_support())
            .next()
            .is_none()
        {
            return Err(GrrError::PreconditionViolated(format!(
                "monomial {} does not meet the multiple locus",
                mono.render(cfg)
            )));
        }
    }

    let reduction = reduce(expr, cfg)?;
    let mut fates: Vec<(String, Fate)> = reduction
        .steps
        .iter()
        .filter_map(|step| match step {
            ReduceStep::Killed {
                monomial, reason, ..
            } => Some((
                monomial.render(cfg),
                match reason {
                    KillReason::EmptyStratum => Fate::KilledEmptyStratum,
                    KillReason::DeltaPositive => Fate::KilledDeltaPositive,
                },
            )),
            ReduceStep::Substituted { .. } => None,
        })
        .collect();

    let mut verdict = true;
    let mut witness = None;
    for (mono, _coeff) in reduction.normal.terms() {
        // cg = f^*(xi) + W: the W branch dies on the multiple locus, which
        // every surviving monomial meets.
        let w_mono = mono.clone().with_marker(Some(Marker::W));
        let w_expr = CycleExpr::from_monomial(w_mono, Rat::one(), cfg);
        if w_expr.is_zero() {
            fates.push((
                mono.clone().with_marker(Some(Marker::W)).render(cfg),
                Fate::WAnnihilated,
            ));
        } else {
            verdict = false;
            witness = Some(format!(
                "W-branch of {} survives; hypothesis 3 unavailable",
                mono.render(cfg)
            ));
            continue;
        }

        let support = mono.y_support();
        let i_len = support.len();
        let j_len = cfg.eff_j(&support).len();
        let xi_rendered = mono.clone().with_marker(Some(Marker::Xi)).render(cfg);
        if i_len <= j_len {
            // Fiber dimension of Y_I over its image is
            // fiber_dim + |J| - |I| >= fiber_dim >= 1, so the pushforward
            // of the pulled-back class vanishes.
            fates.push((xi_rendered, Fate::PushforwardZero { i_len, j_len }));
        } else {
            verdict = false;
            witness = Some(format!(
                "{} has |I| = {} > |J| = {}",
                xi_rendered, i_len, j_len
            ));
        }
    }

    Ok(PushforwardReport {
        verdict,
        reduction,
        fates,
        witness,
    })
}

/// The support-level audit of every correction family.
#[derive(Clone, Debug)]
pub struct AuditReport {
    /// Terms from the quotient of reduced-pullback sheaves; killed before
    /// the comparison sheaf enters.
    pub err_terms: Vec<CorrectionTerm>,
    /// Terms from the comparison sheaf: the `v`, `w`, and `N` families.
    /// Empty exactly when the configuration is semistable.
    pub c_terms: Vec<CorrectionTerm>,
    /// First support not covered by any kill or vanish path, if any.
    pub counterexample: Option<String>,
}

impl AuditReport {
    pub fn certified(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn certify_support_via_pushforward(
    support: &BTreeSet<usize>,
    cfg: &BoundaryConfig,
) -> Result<Result<Fate, String>, GrrError> {
    let mono = Monomial::cg().times_y_set(support);
    let expr = CycleExpr::from_monomial(mono, Rat::one(), cfg);
    let report = pushforward_vanishes(&expr, cfg)?;
    if !report.verdict {
        return Ok(Err(report
            .witness
            .unwrap_or_else(|| "pushforward verdict false".to_string())));
    }
    // Summarize: killed during rewriting, or pushed forward to zero.
    let fate = if report.reduction.normal.is_zero() {
        match report.reduction.steps.iter().find_map(|s| match s {
            ReduceStep::Killed { reason, .. } => Some(reason),
            _ => None,
        }) {
            Some(KillReason::EmptyStratum) => Fate::KilledEmptyStratum,
            _ => Fate::KilledDeltaPositive,
        }
    } else {
        let j_len = cfg.eff_j(support).len();
        Fate::PushforwardZero {
            i_len: support.len(),
            j_len,
        }
    };
    Ok(Ok(fate))
}

/// Enumerate the correction families of the boundary comparison and
/// certify that each support is annihilated.
///
/// * `err`: strata of size two or more inside the component set of a
///   single reduced pullback — killed by the residue surjection.
/// * `v_j` (only when `Z_j` is nonzero): strata meeting the multiple part
///   of `f^*T_j` — handled by the pushforward pipeline.
/// * `w_j`: strata with two or more components of the reduced pullback of
///   `T_j`. When every component maps onto `T_j`, `delta > 0` is forced
///   and the support is killed; otherwise the support meets `Z` and the
///   pushforward pipeline applies.
/// * `N(i)`: components lying in two or more reduced pullbacks; they lie
///   in `Z`, so the pushforward pipeline applies.
///
/// When `Z` is empty the comparison sheaf vanishes and only `err` terms
/// (if any) are reported; the correction ledger proper stays empty.
pub fn correction_support_audit(cfg: &BoundaryConfig) -> Result<AuditReport, GrrError> {
    let mut err_terms = Vec::new();
    let mut seen_err: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for j in 0..cfg.num_t() {
        let comps = cfg.t_j_components(j);
        if comps.len() < 2 {
            continue;
        }
        for stratum in cfg.strata() {
            if stratum.len() >= 2 && stratum.is_subset(&comps) && seen_err.insert(stratum.clone()) {
                err_terms.push(CorrectionTerm {
                    origin: Origin::ErrTilde,
                    support: stratum.clone(),
                    fate: Fate::KilledErrStratum,
                });
            }
        }
    }

    let mut c_terms = Vec::new();
    let mut counterexample = None;

    if !cfg.is_semistable() {
        'families: {
            // v_j families.
            for j in 0..cfg.num_t() {
                let z_j = cfg.z_j_support(j);
                if z_j.is_empty() {
                    continue;
                }
                for stratum in cfg.strata() {
                    if stratum.intersection(&z_j).next().is_none() {
                        continue;
                    }
                    match certify_support_via_pushforward(stratum, cfg)? {
                        Ok(fate) => c_terms.push(CorrectionTerm {
                            origin: Origin::Vj(j),
                            support: stratum.clone(),
                            fate,
                        }),
                        Err(msg) => {
                            counterexample = Some(format!(
                                "v[{j}] support {}: {msg}",
                                cfg.render_y_set(stratum)
                            ));
                            break 'families;
                        }
                    }
                }
            }

            // w_j families.
            for j in 0..cfg.num_t() {
                let comps = cfg.t_j_components(j);
                if comps.len() < 2 {
                    continue;
                }
                let phi_j: BTreeSet<usize> = comps
                    .iter()
                    .copied()
                    .filter(|&i| cfg.eff_j(&BTreeSet::from([i])) == BTreeSet::from([j]))
                    .collect();
                for stratum in cfg.strata() {
                    if stratum.len() < 2 || !stratum.is_subset(&comps) {
                        continue;
                    }
                    if stratum.is_subset(&phi_j) {
                        // Every component maps onto T_j, so the image of the
                        // stratum is T_j itself and the rank collapses.
                        let d = delta(stratum, cfg)?;
                        if d > 0 {
                            c_terms.push(CorrectionTerm {
                                origin: Origin::Wj(j),
                                support: stratum.clone(),
                                fate: Fate::KilledDeltaPositive,
                            });
                        } else {
                            counterexample = Some(format!(
                                "w[{j}] support {} has every component onto {} yet delta = 0",
                                cfg.render_y_set(stratum),
                                cfg.t_name(j)
                            ));
                            break 'families;
                        }
                    } else {
                        // Some component lies over a deeper stratum, hence in
                        // Z; the pushforward pipeline takes over.
                        if stratum.intersection(cfg.z_support()).next().is_none() {
                            counterexample = Some(format!(
                                "w[{j}] support {} misses the multiple locus but is not all-onto",
                                cfg.render_y_set(stratum)
                            ));
                            break 'families;
                        }
                        match certify_support_via_pushforward(stratum, cfg)? {
                            Ok(fate) => c_terms.push(CorrectionTerm {
                                origin: Origin::Wj(j),
                                support: stratum.clone(),
                                fate,
                            }),
                            Err(msg) => {
                                counterexample = Some(format!(
                                    "w[{j}] support {}: {msg}",
                                    cfg.render_y_set(stratum)
                                ));
                                break 'families;
                            }
                        }
                    }
                }
            }

            // N(i) terms.
            for i in 0..cfg.num_y() {
                if cfg.n_of(i) == 0 {
                    continue;
                }
                let support = BTreeSet::from([i]);
                if !cfg.z_support().contains(&i) {
                    counterexample = Some(format!(
                        "N[{}] positive but {} is not in Z",
                        i,
                        cfg.y_name(i)
                    ));
                    break 'families;
                }
                match certify_support_via_pushforward(&support, cfg)? {
                    Ok(fate) => c_terms.push(CorrectionTerm {
                        origin: Origin::Ni(i),
                        support,
                        fate,
                    }),
                    Err(msg) => {
                        counterexample =
                            Some(format!("N[{}] support {{{}}}: {msg}", i, cfg.y_name(i)));
                        break 'families;
                    }
                }
            }
        }
    }

    Ok(AuditReport {
        err_terms,
        c_terms,
        counterexample,
    })
}

/// Full certification of the boundary cancellation for one configuration.
#[derive(Clone, Debug)]
pub struct CertifyReport {
    pub cg_identity: CgIdentityReport,
    pub audit: AuditReport,
    pub certified: bool,
}

impl CertifyReport {
    /// Human-readable ledger: one line per cancelled term.
    pub fn ledger_lines(&self, cfg: &BoundaryConfig) -> Vec<String> {
        let mut out = Vec::new();
        out.push(format!(
            "top-Chern identity at g = {}, degree {}: {}",
            self.cg_identity.g,
            self.cg_identity.trunc,
            if self.cg_identity.passed() {
                "holds"
            } else {
                "FAILS"
            }
        ));
        if !self.audit.err_terms.is_empty() || !self.audit.c_terms.is_empty() {
            out.push(format!(
                "comparison sheaf decomposition ({}): {} err term(s), {} correction term(s)",
                Origin::ExtC,
                self.audit.err_terms.len(),
                self.audit.c_terms.len()
            ));
        }
        for t in self.audit.err_terms.iter().chain(&self.audit.c_terms) {
            out.push(format!(
                "{} on {}: {}",
                t.origin,
                cfg.render_y_set(&t.support),
                t.fate
            ));
        }
        if let Some(ce) = &self.audit.counterexample {
            out.push(format!("NOT COVERED: {ce}"));
        }
        out
    }

    /// Number of entries in the comparison-sheaf correction ledger.
    pub fn correction_ledger_len(&self) -> usize {
        self.audit.c_terms.len()
    }
}

/// Validate the hypotheses structurally and certify that the boundary
/// contribution cancels: the alternating pushforward reduces to a
/// degree-zero class.
pub fn theorem_grr_certify(cfg: &BoundaryConfig) -> Result<CertifyReport, GrrError> {
    if !cfg.w_annihilates_z() {
        return Err(GrrError::HypothesisThreeViolated);
    }
    let g = cfg.fiber_dim();
    if g == 0 || g > 6 {
        return Err(GrrError::FiberDimUnsupported(g));
    }
    let cg_identity = verify_cg_identity(g, 2 * g + 2);
    let audit = correction_support_audit(cfg)?;
    let certified = cg_identity.passed() && audit.certified();
    Ok(CertifyReport {
        cg_identity,
        audit,
        certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grr::cycle::parse_cycle_expr;

    fn cfg_from(text: &str) -> BoundaryConfig {
        BoundaryConfig::parse(text).unwrap()
    }

    const SEMISTABLE_DIAGONAL: &str = "\
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
fiber_dim = 2
";

    const MULTIFIBER: &str = "\
[components]
Y = Y1
T = T1

[nu]
Y1: T1=2

[meta]
base_dim = 1
fiber_dim = 2
z_support = Y1
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

    // T1 pulls back to two reduced components both onto T1; T2 carries the
    // multiple fiber that makes Z nonempty.
    const TWO_ONTO_PLUS_MULTIPLE: &str = "\
[components]
Y = Y1, Y2, Y3
T = T1, T2

[nu]
Y1: T1=1
Y2: T1=1
Y3: T2=2

[strata]
Y1, Y2

[meta]
base_dim = 2
fiber_dim = 2
";

    #[test]
    fn pushforward_multifiber_single_component() {
        let cfg = cfg_from(MULTIFIBER);
        let expr = parse_cycle_expr("cg*Y1", &cfg).unwrap();
        let report = pushforward_vanishes(&expr, &cfg).unwrap();
        assert!(report.verdict);
        assert!(report
            .fates
            .iter()
            .any(|(_, f)| matches!(f, Fate::PushforwardZero { i_len: 1, j_len: 1 })));
        assert!(report.fates.iter().any(|(_, f)| *f == Fate::WAnnihilated));
    }

    #[test]
    fn pushforward_rejects_off_z_monomials() {
        let cfg = cfg_from(CHAIN);
        let expr = parse_cycle_expr("cg*Y1", &cfg).unwrap();
        assert!(matches!(
            pushforward_vanishes(&expr, &cfg),
            Err(GrrError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn pushforward_chain_with_repeats() {
        let cfg = cfg_from(CHAIN);
        let expr = parse_cycle_expr("cg*Y2*Y2", &cfg).unwrap();
        let report = pushforward_vanishes(&expr, &cfg).unwrap();
        assert!(report.verdict);
    }

    #[test]
    fn pushforward_is_vacuously_true_on_the_zero_expression() {
        let cfg = cfg_from(SEMISTABLE_DIAGONAL);
        let report = pushforward_vanishes(&CycleExpr::zero(), &cfg).unwrap();
        assert!(report.verdict);
        assert!(report.fates.is_empty());
    }

    #[test]
    fn pushforward_true_via_kill_path_when_rank_collapses() {
        // Two components over a single T: delta on the crossing is forced
        // positive, so the kill rule fires before the dimension step could
        // ever see |I| > |J|.
        let cfg = cfg_from(CHAIN);
        let expr = parse_cycle_expr("cg*Y1*Y2", &cfg).unwrap();
        let report = pushforward_vanishes(&expr, &cfg).unwrap();
        assert!(report.verdict);
        assert!(report
            .fates
            .iter()
            .any(|(_, f)| *f == Fate::KilledDeltaPositive));
        assert!(report.reduction.normal.is_zero());
    }

    #[test]
    fn audit_semistable_is_empty() {
        let cfg = cfg_from(SEMISTABLE_DIAGONAL);
        let audit = correction_support_audit(&cfg).unwrap();
        assert!(audit.certified());
        assert!(audit.err_terms.is_empty());
        assert!(audit.c_terms.is_empty());
    }

    #[test]
    fn audit_semistable_two_over_one_has_err_terms_only() {
        let cfg = cfg_from(
            "\
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
",
        );
        let audit = correction_support_audit(&cfg).unwrap();
        assert!(audit.certified());
        assert_eq!(audit.err_terms.len(), 1);
        assert_eq!(audit.err_terms[0].fate, Fate::KilledErrStratum);
        assert!(audit.c_terms.is_empty());
    }

    #[test]
    fn audit_multifiber_has_v_family() {
        let cfg = cfg_from(MULTIFIBER);
        let audit = correction_support_audit(&cfg).unwrap();
        assert!(audit.certified());
        assert!(!audit.c_terms.is_empty());
        assert!(audit
            .c_terms
            .iter()
            .any(|t| matches!(t.origin, Origin::Vj(0))));
    }

    #[test]
    fn audit_two_onto_kills_w_family_by_delta() {
        let cfg = cfg_from(TWO_ONTO_PLUS_MULTIPLE);
        let audit = correction_support_audit(&cfg).unwrap();
        assert!(audit.certified(), "{:?}", audit.counterexample);
        let w_terms: Vec<_> = audit
            .c_terms
            .iter()
            .filter(|t| matches!(t.origin, Origin::Wj(0)))
            .collect();
        assert_eq!(w_terms.len(), 1);
        assert_eq!(w_terms[0].support, BTreeSet::from([0, 1]));
        assert_eq!(w_terms[0].fate, Fate::KilledDeltaPositive);
    }

    #[test]
    fn certify_semistable() {
        let cfg = cfg_from(SEMISTABLE_DIAGONAL);
        let report = theorem_grr_certify(&cfg).unwrap();
        assert!(report.certified);
        assert_eq!(report.correction_ledger_len(), 0);
        let lines = report.ledger_lines(&cfg);
        assert!(lines[0].contains("holds"), "{lines:?}");
    }

    #[test]
    fn audit_flags_supports_outside_every_mechanism() {
        // A carries an override sending its image into a deeper stratum
        // even though its row has total multiplicity one, so the crossing
        // A.B is neither all-onto nor inside the multiple locus: no
        // mechanism covers it and the audit must name it.
        let cfg = cfg_from(
            "\
[components]
Y = A, B, C
T = S, T

[nu]
A: S=1
B: S=1
C: T=2

[strata]
A, B

[J]
A -> S, T
A, B -> S, T

[meta]
base_dim = 2
fiber_dim = 2
",
        );
        let audit = correction_support_audit(&cfg).unwrap();
        assert!(!audit.certified());
        let message = audit.counterexample.unwrap();
        assert!(message.contains("{A,B}"), "{message}");
    }

    #[test]
    fn certify_semistable_at_every_supported_fiber_dimension() {
        for g in 1..=4 {
            let text = SEMISTABLE_DIAGONAL.replace("fiber_dim = 2", &format!("fiber_dim = {g}"));
            let cfg = cfg_from(&text);
            let report = theorem_grr_certify(&cfg).unwrap();
            assert!(report.certified, "g = {g}");
            assert_eq!(report.correction_ledger_len(), 0, "g = {g}");
        }
    }

    #[test]
    fn certify_multifiber_has_nonempty_ledger() {
        let cfg = cfg_from(MULTIFIBER);
        let report = theorem_grr_certify(&cfg).unwrap();
        assert!(report.certified);
        assert!(report.correction_ledger_len() > 0);
    }

    #[test]
    fn certify_rejects_hypothesis_three_violation() {
        let text = format!("{MULTIFIBER}w_annihilates_z = false\n");
        let cfg = cfg_from(&text);
        assert!(matches!(
            theorem_grr_certify(&cfg),
            Err(GrrError::HypothesisThreeViolated)
        ));
    }

    #[test]
    fn certify_rejects_oversized_fiber_dimension() {
        let text = MULTIFIBER.replace("fiber_dim = 2", "fiber_dim = 9");
        let cfg = cfg_from(&text);
        assert!(matches!(
            theorem_grr_certify(&cfg),
            Err(GrrError::FiberDimUnsupported(9))
        ));
    }
}
