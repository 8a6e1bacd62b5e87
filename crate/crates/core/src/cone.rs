//! Integer lattice cones in `B(N) x N^dual` and the sign involution.
//!
//! Points are pairs `(b, l)` of an integer symmetric `g x g` bilinear form
//! and an integer covector. The group `GL(N) ⋉ N` acts by
//! `(gamma, mu): (b, l) -> (b', l' + b' mu)` with `b' = gamma^{-T} b
//! gamma^{-1}` and `l' = l gamma^{-1}`; the element `(-I, 0)` realizes the
//! sign involution `(b, l) -> (b, -l)`.
//!
//! A cone is smooth when its generators extend to a Z-basis of the ambient
//! lattice, detected through the Smith normal form. For a smooth cone that
//! the involution maps to itself (witnessed by a generator permutation and
//! a translation vector `mu`), the even-level rescaling `N = 2 N'` forces
//! `mu` to be even, the permutation to be the identity, and the span of the
//! generators to project isomorphically to `B(N)` — which is what
//! [`fixed_stratum_check`] verifies coordinate by coordinate.

// Index-style loops read better than iterator chains in this matrix code.
#![allow(clippy::needless_range_loop)]

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::linalg::{rat_kernel, rat_rank, smith_normal_form};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConeError {
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(i64),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: expected {0}, got {1}")]
    DimensionMismatch(usize, usize),
    #[error("generator must be nonzero")]
    ZeroGenerator,
    #[error("witness does not map the generators onto themselves")]
    InvalidWitness,
    #[error("cone is not smooth; the fixed-stratum argument needs a partial Z-basis")]
    NotSmooth,
    #[error("cone parse error at line {0}: {1}")]
    Parse(usize, String),
}

/// Rank of `N` plus the derived ambient dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeContext {
    pub g: usize,
}

impl LatticeContext {
    pub fn new(g: usize) -> Self {
        assert!(g >= 1);
        LatticeContext { g }
    }

    /// Dimension of the space of symmetric forms, `g(g+1)/2`.
    pub fn dim_b(&self) -> usize {
        self.g * (self.g + 1) / 2
    }

    /// Ambient dimension of `B(N) x N^dual`.
    pub fn ambient_dim(&self) -> usize {
        self.dim_b() + self.g
    }
}

/// A point `(b, l)` with `b` integer symmetric and `l` an integer covector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConePoint {
    pub b: Vec<Vec<i64>>,
    pub l: Vec<i64>,
}

impl ConePoint {
    pub fn new(b: Vec<Vec<i64>>, l: Vec<i64>) -> Result<Self, ConeError> {
        let g = l.len();
        if b.len() != g || b.iter().any(|row| row.len() != g) {
            return Err(ConeError::DimensionMismatch(g, b.len()));
        }
        for i in 0..g {
            for j in 0..g {
                if b[i][j] != b[j][i] {
                    return Err(ConeError::NotSymmetric);
                }
            }
        }
        Ok(ConePoint { b, l })
    }

    pub fn g(&self) -> usize {
        self.l.len()
    }

    pub fn is_zero(&self) -> bool {
        self.b.iter().all(|r| r.iter().all(|&v| v == 0)) && self.l.iter().all(|&v| v == 0)
    }

    /// Flatten to ambient coordinates: upper-triangle entries of `b`
    /// (row-major, including the diagonal), then `l`.
    pub fn flatten(&self) -> Vec<i64> {
        let g = self.g();
        let mut out = Vec::with_capacity(g * (g + 1) / 2 + g);
        for i in 0..g {
            for j in i..g {
                out.push(self.b[i][j]);
            }
        }
        out.extend_from_slice(&self.l);
        out
    }

    /// Flatten only the `B(N)` coordinates.
    pub fn flatten_b(&self) -> Vec<i64> {
        let g = self.g();
        let mut out = Vec::with_capacity(g * (g + 1) / 2);
        for i in 0..g {
            for j in i..g {
                out.push(self.b[i][j]);
            }
        }
        out
    }
}

impl fmt::Display for ConePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .b
            .iter()
            .map(|r| {
                format!(
                    "[{}]",
                    r.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
                )
            })
            .collect();
        write!(
            f,
            "b = [{}]; l = [{}]",
            rows.join(","),
            self.l
                .iter()
                .map(i64::to_string)
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// Finitely generated cone; generators are kept in a canonical order so
/// equality is set equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    g: usize,
    gens: Vec<ConePoint>,
}

impl Cone {
    pub fn new(gens: Vec<ConePoint>) -> Result<Self, ConeError> {
        let Some(first) = gens.first() else {
            return Err(ConeError::ZeroGenerator);
        };
        let g = first.g();
        for p in &gens {
            if p.g() != g {
                return Err(ConeError::DimensionMismatch(g, p.g()));
            }
            if p.is_zero() {
                return Err(ConeError::ZeroGenerator);
            }
        }
        let mut gens = gens;
        gens.sort();
        Ok(Cone { g, gens })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn generators(&self) -> &[ConePoint] {
        &self.gens
    }

    pub fn context(&self) -> LatticeContext {
        LatticeContext::new(self.g)
    }
}

/// An element `(gamma, mu)` of `GL(N) ⋉ N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElem {
    gamma: Vec<Vec<i64>>,
    gamma_inv: Vec<Vec<i64>>,
    mu: Vec<i64>,
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn mat_vec(a: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

fn vec_mat(v: &[i64], a: &[Vec<i64>]) -> Vec<i64> {
    let n = v.len();
    (0..n)
        .map(|j| (0..n).map(|i| v[i] * a[i][j]).sum())
        .collect()
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

fn det_i128(a: &[Vec<i64>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return a[0][0] as i128;
    }
    let mut det = 0i128;
    for c in 0..n {
        if a[0][c] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> = a[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(cc, _)| cc != c)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect();
        let term = a[0][c] as i128 * det_i128(&minor);
        if c % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    det
}

/// Integer inverse of a unimodular matrix via the adjugate.
fn unimodular_inverse(a: &[Vec<i64>]) -> Result<Vec<Vec<i64>>, ConeError> {
    let n = a.len();
    let det = det_i128(a);
    if det != 1 && det != -1 {
        return Err(ConeError::NotUnimodular(det as i64));
    }
    let mut inv = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            // Entry (i, j) of the inverse is cofactor C_{ji} / det.
            let minor: Vec<Vec<i64>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| a[r][c]).collect())
                .collect();
            let mut cof = det_i128(&minor);
            if (i + j) % 2 == 1 {
                cof = -cof;
            }
            inv[i][j] = (cof * det) as i64; // det = ±1, so cof/det = cof*det
        }
    }
    Ok(inv)
}

impl GroupElem {
    pub fn new(gamma: Vec<Vec<i64>>, mu: Vec<i64>) -> Result<Self, ConeError> {
        if gamma.len() != mu.len() || gamma.iter().any(|r| r.len() != mu.len()) {
            return Err(ConeError::DimensionMismatch(mu.len(), gamma.len()));
        }
        let gamma_inv = unimodular_inverse(&gamma)?;
        Ok(GroupElem {
            gamma,
            gamma_inv,
            mu,
        })
    }

    pub fn identity(g: usize) -> Self {
        GroupElem {
            gamma: identity(g),
            gamma_inv: identity(g),
            mu: vec![0; g],
        }
    }

    /// The sign involution `(-I, 0)`.
    pub fn involution(g: usize) -> Self {
        let minus: Vec<Vec<i64>> = (0..g)
            .map(|i| (0..g).map(|j| if i == j { -1 } else { 0 }).collect())
            .collect();
        GroupElem {
            gamma: minus.clone(),
            gamma_inv: minus,
            mu: vec![0; g],
        }
    }

    pub fn translation(mu: Vec<i64>) -> Self {
        let g = mu.len();
        GroupElem {
            gamma: identity(g),
            gamma_inv: identity(g),
            mu,
        }
    }

    /// Group law chosen so that `act(compose(x, y), v) = act(x, act(y, v))`.
    pub fn compose(&self, other: &Self) -> Self {
        let gamma = mat_mul(&self.gamma, &other.gamma);
        let gamma_inv = mat_mul(&other.gamma_inv, &self.gamma_inv);
        let mut mu = mat_vec(&self.gamma, &other.mu);
        for (m, s) in mu.iter_mut().zip(&self.mu) {
            *m += s;
        }
        GroupElem {
            gamma,
            gamma_inv,
            mu,
        }
    }

    /// Action on a point:
    /// `b -> gamma^{-T} b gamma^{-1}`, `l -> l gamma^{-1} + b'(mu, .)`.
    pub fn act(&self, p: &ConePoint) -> ConePoint {
        let inv = &self.gamma_inv;
        let g = p.g();
        // b' = inv^T b inv
        let mut b_new = vec![vec![0i64; g]; g];
        for i in 0..g {
            for j in 0..g {
                let mut s = 0i64;
                for k in 0..g {
                    for m in 0..g {
                        s += inv[k][i] * p.b[k][m] * inv[m][j];
                    }
                }
                b_new[i][j] = s;
            }
        }
        let mut l_new = vec_mat(&p.l, inv);
        let shift = mat_vec(&b_new, &self.mu);
        for (l, s) in l_new.iter_mut().zip(shift) {
            *l += s;
        }
        ConePoint { b: b_new, l: l_new }
    }
}

/// True iff the generators extend to a Z-basis of the ambient lattice:
/// linearly independent with all elementary divisors equal to one.
pub fn is_smooth(cone: &Cone) -> bool {
    let rows: Vec<Vec<BigInt>> = cone
        .gens
        .iter()
        .map(|p| p.flatten().into_iter().map(BigInt::from).collect())
        .collect();
    let diag = smith_normal_form(&rows);
    diag.len() >= cone.gens.len()
        && diag
            .iter()
            .take(cone.gens.len())
            .all(|d| d == &BigInt::one())
}

/// Membership in the support locus: `b` positive semi-definite and `l`
/// vanishing on the kernel of `b`. Exact: PSD via all principal minors,
/// kernel via rational elimination.
pub fn in_ctilde(p: &ConePoint) -> bool {
    let g = p.g();
    for mask in 1u32..(1 << g) {
        let idx: Vec<usize> = (0..g).filter(|&i| mask & (1 << i) != 0).collect();
        let minor: Vec<Vec<BigInt>> = idx
            .iter()
            .map(|&r| idx.iter().map(|&c| BigInt::from(p.b[r][c])).collect())
            .collect();
        if crate::linalg::det_laplace(&minor) < BigInt::from(0) {
            return false;
        }
    }
    let b_rat: Vec<Vec<Rat>> =
        p.b.iter()
            .map(|row| row.iter().map(|&v| Rat::int(v)).collect())
            .collect();
    for v in rat_kernel(&b_rat) {
        let mut s = Rat::zero();
        for (li, vi) in p.l.iter().zip(&v) {
            s += &(Rat::int(*li) * vi);
        }
        if !s.is_zero() {
            return false;
        }
    }
    true
}

/// Witness that the involution maps the cone to itself: a permutation `j`
/// of the generators and a translation `mu` with `b_i = b_{j(i)}` and
/// `l_i + l_{j(i)} = b_{j(i)} mu` for all `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceWitness {
    pub perm: Vec<usize>,
    pub mu: Vec<i64>,
}

/// Deterministic bounded search: permutations compatible with the
/// `b`-components in lexicographic order, then the smallest admissible
/// integer `mu` with coordinates in `[-bound, bound]`. Absence of a
/// witness within the bound is not a proof of non-invariance.
pub fn find_invariance_witness(cone: &Cone, bound: i64) -> Option<InvarianceWitness> {
    let r = cone.gens.len();
    let g = cone.g;
    let candidates: Vec<Vec<usize>> = (0..r)
        .map(|i| {
            (0..r)
                .filter(|&j| cone.gens[i].b == cone.gens[j].b)
                .collect()
        })
        .collect();
    fn assign(
        i: usize,
        candidates: &[Vec<usize>],
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        cone: &Cone,
        g: usize,
        bound: i64,
    ) -> Option<InvarianceWitness> {
        let r = perm.len();
        if i == r {
            return solve_mu(cone, perm, g, bound).map(|mu| InvarianceWitness {
                perm: perm.clone(),
                mu,
            });
        }
        for &j in &candidates[i] {
            if used[j] {
                continue;
            }
            perm[i] = j;
            used[j] = true;
            if let Some(w) = assign(i + 1, candidates, perm, used, cone, g, bound) {
                return Some(w);
            }
            used[j] = false;
            perm[i] = usize::MAX;
        }
        None
    }
    let mut perm = vec![usize::MAX; r];
    let mut used = vec![false; r];
    assign(0, &candidates, &mut perm, &mut used, cone, g, bound)
}

/// Default search bound: `g * max|l|` plus one.
pub fn default_witness_bound(cone: &Cone) -> i64 {
    let max_l = cone
        .gens
        .iter()
        .flat_map(|p| p.l.iter().map(|v| v.abs()))
        .max()
        .unwrap_or(0);
    max_l * cone.g as i64 + 1
}

// Solve l_i + l_{j(i)} = b_{j(i)} mu for an integer mu within the bound.
fn solve_mu(cone: &Cone, perm: &[usize], g: usize, bound: i64) -> Option<Vec<i64>> {
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    for (i, &j) in perm.iter().enumerate() {
        let target = &cone.gens[j];
        for row in 0..g {
            rows.push(target.b[row].iter().map(|&v| Rat::int(v)).collect());
            rhs.push(Rat::int(cone.gens[i].l[row] + target.l[row]));
        }
    }
    // Unique rational solution: accept iff integral and within the bound.
    if let Some(sol) = crate::linalg::rat_solve_unique(&rows, &rhs) {
        let mut mu = Vec::with_capacity(g);
        for v in sol {
            if !v.is_integer() {
                return None;
            }
            let as_i64 = i64::try_from(v.numer()).ok()?;
            if as_i64.abs() > bound {
                return None;
            }
            mu.push(as_i64);
        }
        if check_mu(cone, perm, &mu) {
            return Some(mu);
        }
        return None;
    }
    // Underdetermined or inconsistent: bounded grid search. Each
    // coordinate runs through 0, 1, -1, 2, -2, ... so free coordinates
    // settle on the smallest value rather than an arbitrary corner.
    let values: Vec<i64> = {
        let mut v = vec![0i64];
        for k in 1..=bound {
            v.push(k);
            v.push(-k);
        }
        v
    };
    let mut idx = vec![0usize; g];
    let mut mu = vec![0i64; g];
    loop {
        if check_mu(cone, perm, &mu) {
            return Some(mu);
        }
        let mut k = g;
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            if idx[k] + 1 < values.len() {
                idx[k] += 1;
                mu[k] = values[idx[k]];
                for pos in k + 1..g {
                    idx[pos] = 0;
                    mu[pos] = values[0];
                }
                break;
            }
        }
    }
}

fn check_mu(cone: &Cone, perm: &[usize], mu: &[i64]) -> bool {
    for (i, &j) in perm.iter().enumerate() {
        if cone.gens[i].b != cone.gens[j].b {
            return false;
        }
        let target = &cone.gens[j];
        let b_mu = mat_vec(&target.b, mu);
        for row in 0..cone.g {
            if cone.gens[i].l[row] + target.l[row] != b_mu[row] {
                return false;
            }
        }
    }
    true
}

/// Outcome of the even-level fixed-point verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedStratumOutcome {
    /// All steps verified: the permutation is forced to the identity, the
    /// translation halves integrally, and the generator span projects
    /// with full rank to `B(N)` — the fixed stratum lies in the smooth
    /// locus.
    Pass {
        mu_half: Vec<i64>,
        rank_full: usize,
        rank_b: usize,
    },
    /// The witness translation is odd in some coordinate, which the
    /// even-level lattice rescaling rules out. Not a verification failure:
    /// the cone itself is excluded by the hypotheses.
    HypothesisViolation { odd_coordinate: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedStratumReport {
    pub outcome: FixedStratumOutcome,
}

impl FixedStratumReport {
    pub fn passed(&self) -> bool {
        matches!(self.outcome, FixedStratumOutcome::Pass { .. })
    }
}

impl fmt::Display for FixedStratumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            FixedStratumOutcome::Pass {
                mu_half,
                rank_full,
                rank_b,
            } => write!(
                f,
                "fixed stratum lies in smooth locus (mu' = {mu_half:?}, rank {rank_full} = rank_B {rank_b})"
            ),
            FixedStratumOutcome::HypothesisViolation { odd_coordinate } => write!(
                f,
                "hypothesis violation: witness translation is odd in coordinate {}; the even-level rescaling excludes this cone",
                odd_coordinate
            ),
        }
    }
}

/// Run the even-level fixed-point argument on a smooth, involution
/// invariant cone.
///
/// Verifies, in order: the witness translation is even (`mu = 2 mu'`),
/// otherwise the cone violates the even-level hypothesis; the generators
/// are congruent mod 2 to their permuted images, which on a partial
/// Z-basis forces the permutation to be the identity; `l_i = b_i mu'` over
/// the integers; and the span of `(b_i, l_i)` has the same rank as its
/// projection to `B(N)`.
pub fn fixed_stratum_check(
    cone: &Cone,
    witness: &InvarianceWitness,
    ctx: LatticeContext,
) -> Result<FixedStratumReport, ConeError> {
    assert_eq!(ctx.g, cone.g, "context mismatch");
    if witness.perm.len() != cone.gens.len()
        || witness.mu.len() != cone.g
        || !check_mu(cone, &witness.perm, &witness.mu)
    {
        return Err(ConeError::InvalidWitness);
    }
    if !is_smooth(cone) {
        return Err(ConeError::NotSmooth);
    }
    if let Some(odd) = witness.mu.iter().position(|m| m.rem_euclid(2) == 1) {
        return Ok(FixedStratumReport {
            outcome: FixedStratumOutcome::HypothesisViolation {
                odd_coordinate: odd,
            },
        });
    }
    let mu_half: Vec<i64> = witness.mu.iter().map(|m| m / 2).collect();

    for (i, &j) in witness.perm.iter().enumerate() {
        let a = cone.gens[i].flatten();
        let b = cone.gens[j].flatten();
        assert!(
            a.iter().zip(&b).all(|(x, y)| (x - y) % 2 == 0),
            "witness relation must make generators congruent mod 2"
        );
        assert_eq!(
            j, i,
            "mod-2 congruence on a partial Z-basis forces j(i) = i"
        );
    }

    // With j = id: 2 l_i = 2 b_i mu', hence l_i = b_i mu' over Z.
    for gen in &cone.gens {
        let expected = mat_vec(&gen.b, &mu_half);
        assert_eq!(gen.l, expected, "l_i = b_i mu' must hold integrally");
    }

    let full: Vec<Vec<Rat>> = cone
        .gens
        .iter()
        .map(|p| p.flatten().into_iter().map(Rat::int).collect())
        .collect();
    let b_only: Vec<Vec<Rat>> = cone
        .gens
        .iter()
        .map(|p| p.flatten_b().into_iter().map(Rat::int).collect())
        .collect();
    let rank_full = rat_rank(&full);
    let rank_b = rat_rank(&b_only);
    assert_eq!(
        rank_full, rank_b,
        "stratum codimension must match its image"
    );

    Ok(FixedStratumReport {
        outcome: FixedStratumOutcome::Pass {
            mu_half,
            rank_full,
            rank_b,
        },
    })
}

/// Parse a cone file: one generator per line in the form
/// `b = [[1,0],[0,2]]; l = [3,4]`. Blank lines and `#` comments allowed.
pub fn parse_cone(text: &str) -> Result<Cone, ConeError> {
    let mut gens = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| ConeError::Parse(lineno + 1, msg.to_string());
        let (b_part, l_part) = line
            .split_once(';')
            .ok_or_else(|| err("expected `b = ...; l = ...`"))?;
        let b_src = b_part
            .trim()
            .strip_prefix('b')
            .map(str::trim_start)
            .and_then(|s| s.strip_prefix('='))
            .ok_or_else(|| err("expected `b = ...`"))?;
        let l_src = l_part
            .trim()
            .strip_prefix('l')
            .map(str::trim_start)
            .and_then(|s| s.strip_prefix('='))
            .ok_or_else(|| err("expected `l = ...`"))?;
        let b = parse_matrix(b_src.trim()).map_err(|m| err(&m))?;
        let l = parse_vector(l_src.trim()).map_err(|m| err(&m))?;
        gens.push(ConePoint::new(b, l).map_err(|e| err(&e.to_string()))?);
    }
    Cone::new(gens)
}

fn parse_vector(src: &str) -> Result<Vec<i64>, String> {
    let inner = src
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or("expected [..]")?;
    if inner.trim().is_empty() {
        return Err("empty vector".to_string());
    }
    inner
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| e.to_string()))
        .collect()
}

fn parse_matrix(src: &str) -> Result<Vec<Vec<i64>>, String> {
    let inner = src
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or("expected [[..],[..]]")?;
    let mut rows = Vec::new();
    let mut depth = 0usize;
    let mut start = None;
    for (i, ch) in inner.char_indices() {
        match ch {
            '[' => {
                if depth == 0 {
                    start = Some(i);
                }
                depth += 1;
            }
            ']' => {
                depth = depth.checked_sub(1).ok_or("unbalanced brackets")?;
                if depth == 0 {
                    let row_src = &inner[start.ok_or("unbalanced brackets")?..=i];
                    rows.push(parse_vector(row_src)?);
                    start = None;
                }
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err("unbalanced brackets".to_string());
    }
    if rows.is_empty() {
        return Err("empty matrix".to_string());
    }
    Ok(rows)
}
