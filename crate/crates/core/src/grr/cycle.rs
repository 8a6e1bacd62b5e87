//! Formal cycle expressions: rational combinations of monomials in
//! boundary-divisor symbols, base pullbacks, and the three markers.
//!
//! Two zero rules are applied eagerly on insertion, so expressions stay in
//! a canonical sorted normal form and equality is structural:
//!
//! * a monomial whose divisor support is not a nonempty stratum is zero;
//! * a `W`-marked monomial meeting the multiple locus is zero, when the
//!   configuration declares that annihilation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::grr::config::BoundaryConfig;
use crate::grr::GrrError;
use crate::rat::Rat;

/// Codimension-`g` markers carried by at most one factor per monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Marker {
    /// Top Chern class of the relative log cotangent bundle.
    Cg,
    /// The fiber-supported part of its decomposition.
    W,
    /// The base pullback part `f^*(xi)`.
    Xi,
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Marker::Cg => write!(f, "cg"),
            Marker::W => write!(f, "W"),
            Marker::Xi => write!(f, "xi"),
        }
    }
}

/// A rational divisor on the base, `sum_j coeff_j T_j`, kept sorted with
/// nonzero coefficients. Pulled back, it contributes one codimension to a
/// monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Gamma {
    coeffs: Vec<(usize, Rat)>,
}

impl Gamma {
    pub fn new(mut coeffs: Vec<(usize, Rat)>) -> Self {
        coeffs.retain(|(_, c)| !c.is_zero());
        coeffs.sort_by_key(|(j, _)| *j);
        Gamma { coeffs }
    }

    pub fn coeffs(&self) -> &[(usize, Rat)] {
        &self.coeffs
    }

    pub fn render(&self, cfg: &BoundaryConfig) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (pos, (j, c)) in self.coeffs.iter().enumerate() {
            let (sign, magnitude) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if pos == 0 {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            if magnitude.is_one() {
                out.push_str(cfg.t_name(*j));
            } else {
                out.push_str(&format!("{} {}", magnitude, cfg.t_name(*j)));
            }
        }
        out
    }
}

/// A single monomial: optional marker, divisor symbols with exponents, and
/// a multiset of base pullbacks.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Monomial {
    marker: Option<Marker>,
    y_exp: BTreeMap<usize, u32>,
    pullbacks: Vec<Gamma>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn cg() -> Self {
        Monomial {
            marker: Some(Marker::Cg),
            ..Default::default()
        }
    }

    pub fn marker(&self) -> Option<Marker> {
        self.marker
    }

    pub fn with_marker(mut self, marker: Option<Marker>) -> Self {
        self.marker = marker;
        self
    }

    pub fn times_y(mut self, i: usize, k: u32) -> Self {
        if k > 0 {
            *self.y_exp.entry(i).or_insert(0) += k;
        }
        self
    }

    pub fn times_y_set(mut self, set: &BTreeSet<usize>) -> Self {
        for &i in set {
            self = self.times_y(i, 1);
        }
        self
    }

    pub fn times_gamma(mut self, gamma: Gamma) -> Self {
        self.pullbacks.push(gamma);
        self.pullbacks.sort();
        self
    }

    pub fn y_exponents(&self) -> &BTreeMap<usize, u32> {
        &self.y_exp
    }

    pub fn y_support(&self) -> BTreeSet<usize> {
        self.y_exp.keys().copied().collect()
    }

    pub fn pullbacks(&self) -> &[Gamma] {
        &self.pullbacks
    }

    pub fn total_y_degree(&self) -> u32 {
        self.y_exp.values().sum()
    }

    /// Excess over squarefree: `sum max(e_i - 1, 0)`.
    pub fn repeat_excess(&self) -> u32 {
        self.y_exp.values().map(|&e| e.saturating_sub(1)).sum()
    }

    /// Smallest index with exponent at least two, if any.
    pub fn smallest_repeated(&self) -> Option<usize> {
        self.y_exp.iter().find(|(_, &e)| e >= 2).map(|(&i, _)| i)
    }

    pub fn repeated_indices(&self) -> Vec<usize> {
        self.y_exp
            .iter()
            .filter(|(_, &e)| e >= 2)
            .map(|(&i, _)| i)
            .collect()
    }

    /// Total codimension: `fiber_dim` for a marker, one per divisor power,
    /// one per pullback.
    pub fn codim(&self, fiber_dim: usize) -> usize {
        let marker = if self.marker.is_some() { fiber_dim } else { 0 };
        marker + self.total_y_degree() as usize + self.pullbacks.len()
    }

    /// Divide out one copy of `Y_i` for each `i` in `set`, plus one extra
    /// copy of `extra`. Panics if the exponents do not allow it.
    pub fn divide_y(mut self, set: &BTreeSet<usize>, extra: usize) -> Self {
        let mut needed: BTreeMap<usize, u32> = set.iter().map(|&i| (i, 1)).collect();
        *needed.entry(extra).or_insert(0) += 1;
        for (i, need) in needed {
            let e = self.y_exp.get_mut(&i).expect("factor must be present");
            assert!(*e >= need, "exponent underflow dividing monomial");
            *e -= need;
            if *e == 0 {
                self.y_exp.remove(&i);
            }
        }
        self
    }

    /// Product of two monomials; errors if both carry a marker.
    pub fn mul(&self, other: &Self) -> Result<Self, GrrError> {
        let marker = match (self.marker, other.marker) {
            (Some(_), Some(_)) => {
                return Err(GrrError::Internal(
                    "product of two marked monomials".to_string(),
                ))
            }
            (m, None) => m,
            (None, m) => m,
        };
        let mut y_exp = self.y_exp.clone();
        for (&i, &e) in &other.y_exp {
            *y_exp.entry(i).or_insert(0) += e;
        }
        let mut pullbacks = self.pullbacks.clone();
        pullbacks.extend(other.pullbacks.iter().cloned());
        pullbacks.sort();
        Ok(Monomial {
            marker,
            y_exp,
            pullbacks,
        })
    }

    pub fn render(&self, cfg: &BoundaryConfig) -> String {
        let mut parts: Vec<String> = Vec::new();
        if let Some(m) = self.marker {
            parts.push(m.to_string());
        }
        for gamma in &self.pullbacks {
            parts.push(format!("f*({})", gamma.render(cfg)));
        }
        for (&i, &e) in &self.y_exp {
            if e == 1 {
                parts.push(cfg.y_name(i).to_string());
            } else {
                parts.push(format!("{}^{}", cfg.y_name(i), e));
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// A rational combination of monomials in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CycleExpr {
    terms: BTreeMap<Monomial, Rat>,
}

impl CycleExpr {
    pub fn zero() -> Self {
        CycleExpr::default()
    }

    pub fn from_monomial(mono: Monomial, coeff: Rat, cfg: &BoundaryConfig) -> Self {
        let mut e = Self::zero();
        e.insert(mono, coeff, cfg);
        e
    }

    /// Insert with the zero rules applied.
    pub fn insert(&mut self, mono: Monomial, coeff: Rat, cfg: &BoundaryConfig) {
        if coeff.is_zero() {
            return;
        }
        let support = mono.y_support();
        if !support.is_empty() && !cfg.is_stratum(&support) {
            return; // empty stratum
        }
        if mono.marker() == Some(Marker::W)
            && cfg.w_annihilates_z()
            && support.intersection(cfg.z_support()).next().is_some()
        {
            return; // W annihilates the multiple locus
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
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

    pub fn add(&self, other: &Self, cfg: &BoundaryConfig) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone(), cfg);
        }
        out
    }

    pub fn scale(&self, factor: &Rat) -> Self {
        let mut out = Self::zero();
        if factor.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c * factor);
        }
        out
    }

    /// Multiply every term by a fixed monomial factor.
    pub fn mul_monomial(&self, factor: &Monomial, cfg: &BoundaryConfig) -> Result<Self, GrrError> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.insert(m.mul(factor)?, c.clone(), cfg);
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn remove(&mut self, mono: &Monomial) -> Option<Rat> {
        self.terms.remove(mono)
    }

    pub fn render(&self, cfg: &BoundaryConfig) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (pos, (m, c)) in self.terms.iter().enumerate() {
            let body = m.render(cfg);
            if pos == 0 {
                if c.is_one() {
                    out.push_str(&body);
                } else if *c == Rat::int(-1) {
                    out.push_str(&format!("-{body}"));
                } else {
                    out.push_str(&format!("{c}*{body}"));
                }
            } else if c.is_one() {
                out.push_str(&format!(" + {body}"));
            } else if *c == Rat::int(-1) {
                out.push_str(&format!(" - {body}"));
            } else if c.is_negative() {
                out.push_str(&format!(" - {}*{body}", -c));
            } else {
                out.push_str(&format!(" + {c}*{body}"));
            }
        }
        out
    }
}

/// Parse the minimal expression grammar:
///
/// ```text
/// expr   := [sign] term { ("+" | "-") term }
/// term   := factor { "*" factor }
/// factor := rational | "cg" | "W" | "xi" | <Y name> | "f*(" gamma ")"
/// gamma  := [sign] gterm { ("+" | "-") gterm }
/// gterm  := [rational] <T name>
/// ```
pub fn parse_cycle_expr(src: &str, cfg: &BoundaryConfig) -> Result<CycleExpr, GrrError> {
    let mut parser = ExprParser {
        src: src.as_bytes(),
        pos: 0,
        cfg,
    };
    let expr = parser.parse_expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(GrrError::ExprParse(format!(
            "unexpected trailing input at byte {}",
            parser.pos
        )));
    }
    Ok(expr)
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
    cfg: &'a BoundaryConfig,
}

impl<'a> ExprParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_expr(&mut self) -> Result<CycleExpr, GrrError> {
        let mut out = CycleExpr::zero();
        let mut sign = if self.eat(b'-') {
            Rat::int(-1)
        } else {
            Rat::one()
        };
        loop {
            let (mono, coeff) = self.parse_term()?;
            out.insert(mono, coeff * &sign, self.cfg);
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = Rat::one();
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = Rat::int(-1);
                }
                _ => break,
            }
        }
        Ok(out)
    }

    fn parse_term(&mut self) -> Result<(Monomial, Rat), GrrError> {
        let mut mono = Monomial::one();
        let mut coeff = Rat::one();
        loop {
            self.parse_factor(&mut mono, &mut coeff)?;
            if !self.eat(b'*') {
                break;
            }
        }
        Ok((mono, coeff))
    }

    fn parse_factor(&mut self, mono: &mut Monomial, coeff: &mut Rat) -> Result<(), GrrError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let r = self.parse_rational()?;
                *coeff *= r;
                Ok(())
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let word = self.parse_word();
                // `f*(...)` pullback wrapper.
                if word == "f" && self.src.get(self.pos) == Some(&b'*') {
                    self.pos += 1;
                    if !self.eat(b'(') {
                        return Err(GrrError::ExprParse("expected `(` after `f*`".to_string()));
                    }
                    let gamma = self.parse_gamma()?;
                    if !self.eat(b')') {
                        return Err(GrrError::ExprParse("expected `)`".to_string()));
                    }
                    *mono = mono.clone().times_gamma(gamma);
                    return Ok(());
                }
                let set_marker = |mono: &mut Monomial, m: Marker| -> Result<(), GrrError> {
                    if mono.marker().is_some() {
                        return Err(GrrError::ExprParse(
                            "monomial carries more than one marker".to_string(),
                        ));
                    }
                    *mono = mono.clone().with_marker(Some(m));
                    Ok(())
                };
                match word.as_str() {
                    "cg" => set_marker(mono, Marker::Cg),
                    "W" => set_marker(mono, Marker::W),
                    "xi" => set_marker(mono, Marker::Xi),
                    name => {
                        let i = self
                            .cfg
                            .y_index(name)
                            .map_err(|_| GrrError::ExprParse(format!("unknown symbol `{name}`")))?;
                        let power = self.parse_exponent()?;
                        *mono = mono.clone().times_y(i, power);
                        Ok(())
                    }
                }
            }
            other => Err(GrrError::ExprParse(format!(
                "expected factor, found {:?}",
                other.map(char::from)
            ))),
        }
    }

    // `Y1^3` style powers; absent exponent means one.
    fn parse_exponent(&mut self) -> Result<u32, GrrError> {
        if self.src.get(self.pos) != Some(&b'^') {
            return Ok(1);
        }
        self.pos += 1;
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        text.parse::<u32>()
            .map_err(|_| GrrError::ExprParse(format!("bad exponent `{text}`")))
            .and_then(|p| {
                if p == 0 {
                    Err(GrrError::ExprParse("exponent must be positive".to_string()))
                } else {
                    Ok(p)
                }
            })
    }

    fn parse_gamma(&mut self) -> Result<Gamma, GrrError> {
        let mut coeffs: Vec<(usize, Rat)> = Vec::new();
        let mut sign = if self.eat(b'-') {
            Rat::int(-1)
        } else {
            Rat::one()
        };
        loop {
            let mut c = sign.clone();
            // A sign may also sit directly on the term.
            if self.eat(b'-') {
                c = -c;
            }
            if matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                c *= self.parse_rational()?;
            }
            let word = match self.peek() {
                Some(ch) if ch.is_ascii_alphabetic() => self.parse_word(),
                _ => {
                    return Err(GrrError::ExprParse(
                        "expected T component in pullback".to_string(),
                    ))
                }
            };
            let j = self
                .cfg
                .t_index(&word)
                .map_err(|_| GrrError::ExprParse(format!("unknown T component `{word}`")))?;
            coeffs.push((j, c));
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = Rat::one();
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = Rat::int(-1);
                }
                _ => break,
            }
        }
        Ok(Gamma::new(coeffs))
    }

    fn parse_word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn parse_rational(&mut self) -> Result<Rat, GrrError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos])
            .map_err(|_| GrrError::ExprParse("invalid utf8".to_string()))?;
        text.parse()
            .map_err(|_| GrrError::ExprParse(format!("bad rational `{text}`")))
    }
}
