//! The verification check registry.
//!
//! Every check implements [`Check`] behind a trait object, is registered
//! by name in [`registry`], and can be selected at runtime (`verify-all
//! --check NAME`). `verify-all` simply runs the whole registry; the report
//! subcommand serializes the outcomes.

use std::collections::BTreeSet;

use anyhow::{anyhow, Result};
use num_bigint::BigInt;

use chowcheck_core::classes::{
    lambda_t_ch_by_enumeration, lambda_t_ch_by_product, verify_cg_identity, KClass,
};
use chowcheck_core::cone::{
    find_invariance_witness, fixed_stratum_check, is_smooth, parse_cone, ConePoint,
    FixedStratumOutcome, GroupElem,
};
use chowcheck_core::grr::{
    delta, parse_cycle_expr, reduce, reduce_seeded, theorem_grr_certify, BoundaryConfig, GrrError,
    ReduceStep,
};
use chowcheck_core::linalg::{det_laplace, minor_rank, subsets_of_size};
use chowcheck_core::numbers::{euler_number, euler_via_bernoulli};
use chowcheck_core::rat::Rat;
use chowcheck_core::weight_one::{
    ch_even_odd_wedge, first_relation_rewrite, psi_expansion, verify_lemma21,
};

use crate::fixtures::{FixtureKind, FixtureSet};

pub struct CheckEnv {
    pub g_max: usize,
    pub d_max: usize,
    pub fixtures: FixtureSet,
}

pub struct CheckOutcome {
    pub passed: bool,
    pub details: Vec<String>,
}

impl CheckOutcome {
    fn pass(details: Vec<String>) -> Self {
        CheckOutcome {
            passed: true,
            details,
        }
    }

    fn fail(details: Vec<String>) -> Self {
        CheckOutcome {
            passed: false,
            details,
        }
    }
}

/// A named verification strategy.
pub trait Check {
    fn name(&self) -> String;
    fn description(&self) -> String;
    fn run(&self, env: &CheckEnv) -> Result<CheckOutcome>;
}

/// All registered checks, in report order. Lemma checks are instantiated
/// per genus up to `g_max`.
pub fn registry(g_max: usize) -> Vec<Box<dyn Check>> {
    let mut out: Vec<Box<dyn Check>> = vec![Box::new(EulerBridge), Box::new(PsiRoutes)];
    for g in 1..=g_max {
        out.push(Box::new(Lemma21 { g }));
    }
    out.push(Box::new(WedgeDegreeZero));
    out.push(Box::new(LambdaProduct));
    out.push(Box::new(CgIdentity));
    out.push(Box::new(GrrFixtures));
    out.push(Box::new(DeltaOracle));
    out.push(Box::new(RewriteFuzz));
    out.push(Box::new(ConeCorpus));
    out.push(Box::new(InvolutionSamples));
    out
}

pub fn find(name: &str, g_max: usize) -> Option<Box<dyn Check>> {
    registry(g_max).into_iter().find(|c| c.name() == name)
}

struct EulerBridge;

impl Check for EulerBridge {
    fn name(&self) -> String {
        "numbers/euler-bridge".into()
    }

    fn description(&self) -> String {
        "two independent Euler-number routes agree and never vanish".into()
    }

    fn run(&self, _env: &CheckEnv) -> Result<CheckOutcome> {
        for n in 1..=64 {
            let via_bernoulli = euler_via_bernoulli(n);
            let direct = euler_number(2 * n - 1);
            if via_bernoulli != direct {
                return Ok(CheckOutcome::fail(vec![format!(
                    "bridge mismatch at n = {n}: {via_bernoulli} vs {direct}"
                )]));
            }
        }
        for n in 1..=200 {
            if euler_via_bernoulli(n).is_zero() {
                return Ok(CheckOutcome::fail(vec![format!("vanishing at n = {n}")]));
            }
        }
        Ok(CheckOutcome::pass(vec![
            format!(
                "equality for n = 1..64, e.g. n = 2 gives {}",
                euler_via_bernoulli(2)
            ),
            "nonvanishing for n = 1..200".to_string(),
        ]))
    }
}

struct PsiRoutes;

impl Check for PsiRoutes {
    fn name(&self) -> String {
        "numbers/psi-routes".into()
    }

    fn description(&self) -> String {
        "logarithm expansion agrees with the Euler-number integration route".into()
    }

    fn run(&self, env: &CheckEnv) -> Result<CheckOutcome> {
        let coeffs = psi_expansion(env.d_max.max(4))?;
        let details = vec![format!(
            "psi_1..psi_4 = {}, {}, {}, {}",
            coeffs[0], coeffs[1], coeffs[2], coeffs[3]
        )];
        if coeffs[0] != Rat::new(1, 2) || coeffs[1] != Rat::new(1, 8) {
            return Ok(CheckOutcome::fail(details));
        }
        Ok(CheckOutcome::pass(details))
    }
}

struct Lemma21 {
    g: usize,
}

impl Check for Lemma21 {
    fn name(&self) -> String {
        format!("weight-one/lemma21-g{}", self.g)
    }

    fn description(&self) -> String {
        format!(
            "wedge assumptions force the Chern character into degree zero at genus {}",
            self.g
        )
    }

    fn run(&self, env: &CheckEnv) -> Result<CheckOutcome> {
        let trunc = (2 * self.g + 2).min(env.d_max).max(2);
        let report = verify_lemma21(self.g, trunc)?;
        let mut details = Vec::new();
        for (n, lambda) in &report.even_ratios {
            details.push(format!("lambda_{n} = {lambda}"));
        }
        if report.nonvanishing_certified && report.degree_one_cancels {
            Ok(CheckOutcome::pass(details))
        } else {
            Ok(CheckOutcome::fail(details))
        }
    }
}

struct WedgeDegreeZero;

impl Check for WedgeDegreeZero {
    fn name(&self) -> String {
        "weight-one/wedge-constant".into()
    }

    fn description(&self) -> String {
        "degree-zero wedge constants and the square rewrite of the even product".into()
    }

    fn run(&self, env: &CheckEnv) -> Result<CheckOutcome> {
        let mut details = Vec::new();
        for g in 1..=env.g_max {
            let (even, odd) = ch_even_odd_wedge(g, 2);
            let expected = Rat::int(1 << (2 * g - 1));
            if even.constant_term() != expected || odd.constant_term() != expected {
                return Ok(CheckOutcome::fail(vec![format!(
                    "degree-zero mismatch at g = {g}"
                )]));
            }
            let relation = first_relation_rewrite(g, (2 * g + 2).min(env.d_max));
            if !relation.passed() || relation.degree_zero != Rat::int(1 << (2 * g)) {
                return Ok(CheckOutcome::fail(vec![format!(
                    "square rewrite failed at g = {g}, degree {:?}",
                    relation.first_failing_degree
                )]));
            }
            details.push(format!(
                "g = {g}: even/odd constants {}, product constant {}",
                expected, relation.degree_zero
            ));
        }
        Ok(CheckOutcome::pass(details))
    }
}

struct LambdaProduct;

impl Check for LambdaProduct {
    fn name(&self) -> String {
        "classes/lambda-product".into()
    }

    fn description(&self) -> String {
        "exterior-power enumeration equals the product formula, coefficient by coefficient".into()
    }

    fn run(&self, env: &CheckEnv) -> Result<CheckOutcome> {
        let mut details = Vec::new();
        for g in 1..=env.g_max.min(3) {
            let trunc = env.d_max.min(8);
            let h = KClass::hodge_sum(g);
            let enumerated = lambda_t_ch_by_enumeration(&h, trunc)
                .map_err(|e| anyhow!("enumeration failed: {e}"))?;
            let product =
                lambda_t_ch_by_product(&h, trunc).map_err(|e| anyhow!("product failed: {e}"))?;
            for (k, (a, b)) in enumerated.iter().zip(&product).enumerate() {
                if a != b {
                    return Ok(CheckOutcome::fail(vec![format!(
                        "mismatch at g = {g}, coefficient of t^{k}"
                    )]));
                }
            }
            details.push(format!(
                "g = {g}: {} coefficients agree to degree {trunc}",
                enumerated.len()
            ));
        }
        Ok(CheckOutcome::pass(details))
    }
}

struct CgIdentity;

impl Check for CgIdentity {
    fn name(&self) -> String {
        "classes/cg-identity".into()
    }

    fn description(&self) -> String {
        "Todd class times the alternating wedge character equals the signed top Chern class".into()
    }

    fn run(&self, env: &CheckEnv) -> Result<CheckOutcome> {
        let mut details = Vec::new();
        for g in 1..=env.g_max {
            let trunc = (2 * g + 2).min(env.d_max).max(g);
            let report = verify_cg_identity(g, trunc);
            if !report.passed() {
                return Ok(CheckOutcome::fail(vec![format!(
                    "g = {g} fails first at degree {:?}",
                    report.first_failing_degree
                )]));
            }
            details.push(format!("g = {g}: all residuals zero to degree {trunc}"));
        }
        Ok(CheckOutcome::pass(details))
    }
}

struct GrrFixtures;

impl Check for GrrFixtures {
    fn name(&self) -> String {
        "grr/fixtures".into()
    }

    fn description(&self) -> String {
        "certification passes on the boundary corpus with the expected ledgers".into()
    }

    fn run(&self, env: &CheckEnv) -> Result<CheckOutcome> {
        let mut details = Vec::new();

        let load = |name: &str| -> Result<BoundaryConfig> {
            BoundaryConfig::parse(env.fixtures.get(name)?).map_err(|e| anyhow!("{name}: {e}"))
        };

        let semistable = theorem_grr_certify(&load("semistable.cfg")?)
            .map_err(|e| anyhow!("semistable.cfg: {e}"))?;
        if !semistable.certified || semistable.correction_ledger_len() != 0 {
            return Ok(CheckOutcome::fail(vec![format!(
                "semistable.cfg: certified = {}, ledger = {}",
                semistable.certified,
                semistable.correction_ledger_len()
            )]));
        }
        details.push("semistable.cfg: certified with empty correction ledger".to_string());

        for name in ["multifiber.cfg", "chain.cfg"] {
            let report = theorem_grr_certify(&load(name)?).map_err(|e| anyhow!("{name}: {e}"))?;
            if !report.certified || report.correction_ledger_len() == 0 {
                return Ok(CheckOutcome::fail(vec![format!(
                    "{name}: certified = {}, ledger = {}",
                    report.certified,
                    report.correction_ledger_len()
                )]));
            }
            details.push(format!(
                "{name}: certified, {} correction term(s) accounted",
                report.correction_ledger_len()
            ));
        }

        match theorem_grr_certify(&load("adversarial.cfg")?) {
            Err(GrrError::HypothesisThreeViolated) => {
                details.push("adversarial.cfg: rejected at validation".to_string());
            }
            other => {
                return Ok(CheckOutcome::fail(vec![format!(
                    "adversarial.cfg: expected rejection, got {other:?}"
                )]));
            }
        }

        Ok(CheckOutcome::pass(details))
    }
}

// Brute-force delta: enumerate the image of the pullback map over the
// integer grid {-1,0,1}^|J| and take the rank of the image vectors using
// Laplace minors only.
fn delta_grid_oracle(i_set: &BTreeSet<usize>, cfg: &BoundaryConfig) -> usize {
    let rows: Vec<usize> = i_set.iter().copied().collect();
    let cols: Vec<usize> = cfg.eff_j(i_set).into_iter().collect();
    let mut points: Vec<Vec<BigInt>> = Vec::new();
    let mut coeffs = vec![-1i64; cols.len()];
    loop {
        let vector: Vec<BigInt> = rows
            .iter()
            .map(|&i| {
                let mut s = 0i64;
                for (pos, &j) in cols.iter().enumerate() {
                    s += coeffs[pos] * cfg.nu(i, j) as i64;
                }
                BigInt::from(s)
            })
            .collect();
        points.push(vector);
        let mut k = cols.len();
        loop {
            if k == 0 {
                let rows_n = rows.len();
                let matrix: Vec<Vec<BigInt>> = (0..rows_n)
                    .map(|r| points.iter().map(|p| p[r].clone()).collect())
                    .collect();
                return rows_n - minor_rank(&matrix);
            }
            k -= 1;
            if coeffs[k] < 1 {
                coeffs[k] += 1;
                for c in coeffs.iter_mut().skip(k + 1) {
                    *c = -1;
                }
                break;
            }
        }
    }
}

struct DeltaOracle;

impl Check for DeltaOracle {
    fn name(&self) -> String {
        "grr/delta-oracle".into()
    }

    fn description(&self) -> String {
        "rank-based delta equals brute-force image enumeration on every fixture stratum".into()
    }

    fn run(&self, env: &CheckEnv) -> Result<CheckOutcome> {
        let mut compared = 0usize;
        for (name, kind, text) in env.fixtures.iter() {
            if kind != FixtureKind::Config {
                continue;
            }
            let cfg = BoundaryConfig::parse(text).map_err(|e| anyhow!("{name}: {e}"))?;
            let strata: Vec<BTreeSet<usize>> = cfg.strata().cloned().collect();
            for stratum in strata {
                let direct = delta(&stratum, &cfg).map_err(|e| anyhow!("{name}: {e}"))?;
                let oracle = delta_grid_oracle(&stratum, &cfg);
                if direct != oracle {
                    return Ok(CheckOutcome::fail(vec![format!(
                        "{name} stratum {}: delta {direct} vs oracle {oracle}",
                        cfg.render_y_set(&stratum)
                    )]));
                }
                compared += 1;
            }
        }
        Ok(CheckOutcome::pass(vec![format!(
            "{compared} strata agree with the enumeration oracle"
        )]))
    }
}

struct RewriteFuzz;

impl Check for RewriteFuzz {
    fn name(&self) -> String {
        "grr/rewrite-fuzz".into()
    }

    fn description(&self) -> String {
        "randomized rule orders reach the same normal form; substitutions round-trip".into()
    }

    fn run(&self, env: &CheckEnv) -> Result<CheckOutcome> {
        let cases = [
            ("multifiber.cfg", vec!["cg*Y1*Y1", "cg*Y1*Y1*Y1"]),
            (
                "chain.cfg",
                vec!["cg*Y2*Y2", "cg*Y2*Y2*Y2", "cg*Y1*Y2*Y2 - 3*cg*Y2*Y2"],
            ),
        ];
        let mut fuzzed = 0usize;
        let mut round_trips = 0usize;
        for (name, exprs) in cases {
            let cfg = BoundaryConfig::parse(env.fixtures.get(name)?)
                .map_err(|e| anyhow!("{name}: {e}"))?;
            for src in exprs {
                let expr = parse_cycle_expr(src, &cfg).map_err(|e| anyhow!("{src}: {e}"))?;
                let baseline = reduce(&expr, &cfg).map_err(|e| anyhow!("{src}: {e}"))?;
                // External round-trip audit of every substitution step.
                for step in &baseline.steps {
                    if let ReduceStep::Substituted { step, .. } = step {
                        for &i in &step.i_set {
                            let mut acc = Rat::zero();
                            for (j, c) in step.gamma.coeffs() {
                                acc += &(c * &Rat::int(cfg.nu(i, *j) as i64));
                            }
                            let expected = if i == step.index {
                                Rat::one()
                            } else {
                                Rat::zero()
                            };
                            if acc != expected {
                                return Ok(CheckOutcome::fail(vec![format!(
                                    "{name} {src}: gamma row relation fails on {}",
                                    cfg.y_name(i)
                                )]));
                            }
                            round_trips += 1;
                        }
                    }
                }
                for seed in 0..110u64 {
                    let alt = reduce_seeded(&expr, &cfg, seed)
                        .map_err(|e| anyhow!("{src} seed {seed}: {e}"))?;
                    if alt.normal != baseline.normal {
                        return Ok(CheckOutcome::fail(vec![format!(
                            "{name} {src}: normal forms diverge at seed {seed}"
                        )]));
                    }
                    fuzzed += 1;
                }
            }
        }
        Ok(CheckOutcome::pass(vec![format!(
            "{fuzzed} seeded reductions confluent; {round_trips} substitution rows verified"
        )]))
    }
}

// Independent smoothness oracle: full rank and unit gcd of maximal minors.
fn smooth_minor_oracle(cone: &chowcheck_core::cone::Cone) -> bool {
    let rows: Vec<Vec<BigInt>> = cone
        .generators()
        .iter()
        .map(|p| p.flatten().into_iter().map(BigInt::from).collect())
        .collect();
    let r = rows.len();
    let d = rows[0].len();
    if r > d {
        return false;
    }
    let mut gcd = BigInt::from(0);
    for cols in subsets_of_size(d, r) {
        let sub: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
            .collect();
        gcd = num_integer::Integer::gcd(&gcd, &det_laplace(&sub));
    }
    gcd == BigInt::from(1)
}

struct ConeCorpus;

impl Check for ConeCorpus {
    fn name(&self) -> String {
        "cone/corpus".into()
    }

    fn description(&self) -> String {
        "smoothness matches the minor oracle; witnesses and fixed-stratum outcomes as expected"
            .into()
    }

    fn run(&self, env: &CheckEnv) -> Result<CheckOutcome> {
        let mut details = Vec::new();
        // name -> (smooth, expect_pass) where expect_pass: Some(true) pass,
        // Some(false) hypothesis violation, None = no fixed-stratum run.
        let expectations: &[(&str, bool, Option<bool>)] = &[
            ("g1_pass.cone", true, Some(true)),
            ("g1_oddmu.cone", true, Some(false)),
            ("g1_rough.cone", false, None),
            ("g2_pass.cone", true, Some(true)),
            ("g1_swap.cone", false, None),
        ];
        for &(name, want_smooth, want_pass) in expectations {
            let cone = parse_cone(env.fixtures.get(name)?).map_err(|e| anyhow!("{name}: {e}"))?;
            let smooth = is_smooth(&cone);
            if smooth != smooth_minor_oracle(&cone) {
                return Ok(CheckOutcome::fail(vec![format!(
                    "{name}: smoothness disagrees with the minor oracle"
                )]));
            }
            if smooth != want_smooth {
                return Ok(CheckOutcome::fail(vec![format!(
                    "{name}: expected smooth = {want_smooth}, got {smooth}"
                )]));
            }
            let witness = find_invariance_witness(&cone, 8);
            match (want_pass, witness) {
                (None, w) => {
                    details.push(format!(
                        "{name}: smooth = {smooth}, witness = {}",
                        w.map(|w| format!("perm {:?}, mu {:?}", w.perm, w.mu))
                            .unwrap_or_else(|| "none".to_string())
                    ));
                }
                (Some(expect_pass), Some(w)) => {
                    let report = fixed_stratum_check(&cone, &w, cone.context())
                        .map_err(|e| anyhow!("{name}: {e}"))?;
                    let passed = matches!(report.outcome, FixedStratumOutcome::Pass { .. });
                    if passed != expect_pass {
                        return Ok(CheckOutcome::fail(vec![format!(
                            "{name}: fixed-stratum outcome {report}"
                        )]));
                    }
                    details.push(format!("{name}: {report}"));
                }
                (Some(_), None) => {
                    return Ok(CheckOutcome::fail(vec![format!(
                        "{name}: no invariance witness found"
                    )]));
                }
            }
        }
        // The swap fixture must produce the transposition witness.
        let swap = parse_cone(env.fixtures.get("g1_swap.cone")?)?;
        match find_invariance_witness(&swap, 4) {
            Some(w) if w.perm == vec![1, 0] && w.mu == vec![0] => {}
            other => {
                return Ok(CheckOutcome::fail(vec![format!(
                    "g1_swap.cone: expected swap witness, got {other:?}"
                )]));
            }
        }
        Ok(CheckOutcome::pass(details))
    }
}

struct InvolutionSamples;

impl Check for InvolutionSamples {
    fn name(&self) -> String {
        "cone/involution-samples".into()
    }

    fn description(&self) -> String {
        "the sign involution is an involution and fixes the bilinear form on 1000 samples".into()
    }

    fn run(&self, _env: &CheckEnv) -> Result<CheckOutcome> {
        let mut rng = chowcheck_core::grr::rewrite::SplitMix64::new(0x10e5);
        let g = 3;
        let inv = GroupElem::involution(g);
        for sample in 0..1000 {
            let mut b = vec![vec![0i64; g]; g];
            #[allow(clippy::needless_range_loop)]
            for i in 0..g {
                for j in 0..=i {
                    let v = rng.below(9) as i64 - 4;
                    b[i][j] = v;
                    b[j][i] = v;
                }
            }
            let l: Vec<i64> = (0..g).map(|_| rng.below(9) as i64 - 4).collect();
            let p = ConePoint::new(b, l).map_err(|e| anyhow!("sample {sample}: {e}"))?;
            let once = inv.act(&p);
            if once.b != p.b {
                return Ok(CheckOutcome::fail(vec![format!(
                    "sample {sample}: bilinear form moved"
                )]));
            }
            if inv.act(&once) != p {
                return Ok(CheckOutcome::fail(vec![format!(
                    "sample {sample}: involution is not order two"
                )]));
            }
        }
        Ok(CheckOutcome::pass(vec![
            "1000 samples: order two, bilinear form fixed".to_string(),
        ]))
    }
}
