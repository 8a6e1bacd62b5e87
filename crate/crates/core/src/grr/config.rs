//! Boundary configuration: components, multiplicities, strata, and the
//! structured-text format that describes them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error at line {0}: {1}")]
    Parse(usize, String),
    #[error("unknown component name `{0}`")]
    UnknownName(String),
    #[error("duplicate component name `{0}`")]
    DuplicateName(String),
    #[error("both component lists must be nonempty")]
    EmptyComponents,
    #[error("component `{0}` has no multiplicity over any T component")]
    UnmappedComponent(String),
    #[error("declared z_support {declared} does not match the multiplicities, expected {derived}")]
    ZSupportMismatch { declared: String, derived: String },
    #[error("J override for {set} must contain the column support {support}")]
    JNotSuperset { set: String, support: String },
    #[error(
        "J assignment not monotone: {small} maps to {j_small} but the larger {big} maps to {j_big}"
    )]
    JNotMonotone {
        small: String,
        big: String,
        j_small: String,
        j_big: String,
    },
    #[error("missing [meta] key `{0}`")]
    MissingMeta(&'static str),
}

/// Combinatorial descriptor of a compactified fibration's boundary.
///
/// Invariants enforced at construction: every `Y_i` has a positive
/// multiplicity over some `T_j`; the nonempty strata are downward closed
/// and contain all singletons; explicit `J` overrides contain the column
/// support and are monotone; the support of `Z = f^*T - Y` is exactly the
/// set of rows with total multiplicity at least two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryConfig {
    y_names: Vec<String>,
    t_names: Vec<String>,
    nu: Vec<Vec<u64>>,
    strata: BTreeSet<BTreeSet<usize>>,
    j_overrides: BTreeMap<BTreeSet<usize>, BTreeSet<usize>>,
    z_support: BTreeSet<usize>,
    base_dim: usize,
    fiber_dim: usize,
    w_annihilates_z: bool,
}

impl BoundaryConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        y_names: Vec<String>,
        t_names: Vec<String>,
        nu: Vec<Vec<u64>>,
        declared_strata: Vec<BTreeSet<usize>>,
        j_overrides: BTreeMap<BTreeSet<usize>, BTreeSet<usize>>,
        declared_z_support: Option<BTreeSet<usize>>,
        base_dim: usize,
        fiber_dim: usize,
        w_annihilates_z: bool,
    ) -> Result<Self, ConfigError> {
        if y_names.is_empty() || t_names.is_empty() {
            return Err(ConfigError::EmptyComponents);
        }
        for names in [&y_names, &t_names] {
            let mut seen = BTreeSet::new();
            for n in names {
                if !seen.insert(n) {
                    return Err(ConfigError::DuplicateName(n.clone()));
                }
            }
        }
        assert_eq!(nu.len(), y_names.len(), "nu row count");
        assert!(
            nu.iter().all(|r| r.len() == t_names.len()),
            "nu column count"
        );
        for (i, row) in nu.iter().enumerate() {
            if row.iter().all(|&v| v == 0) {
                return Err(ConfigError::UnmappedComponent(y_names[i].clone()));
            }
        }

        // Strata: all singletons, plus the downward closure of everything
        // declared.
        let mut strata: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        for i in 0..y_names.len() {
            strata.insert(BTreeSet::from([i]));
        }
        for base in declared_strata {
            let items: Vec<usize> = base.iter().copied().collect();
            for mask in 1u64..(1 << items.len()) {
                let subset: BTreeSet<usize> = items
                    .iter()
                    .enumerate()
                    .filter(|&(b, _)| mask & (1 << b) != 0)
                    .map(|(_, &i)| i)
                    .collect();
                strata.insert(subset);
            }
        }

        // Z = f^*T - Y is supported where a row has total multiplicity >= 2.
        let derived_z: BTreeSet<usize> = nu
            .iter()
            .enumerate()
            .filter(|(_, row)| row.iter().sum::<u64>() >= 2)
            .map(|(i, _)| i)
            .collect();
        if let Some(declared) = declared_z_support {
            if declared != derived_z {
                return Err(ConfigError::ZSupportMismatch {
                    declared: render_set(&declared, &y_names),
                    derived: render_set(&derived_z, &y_names),
                });
            }
        }

        let cfg = BoundaryConfig {
            y_names,
            t_names,
            nu,
            strata,
            j_overrides,
            z_support: derived_z,
            base_dim,
            fiber_dim,
            w_annihilates_z,
        };
        cfg.validate_j()?;
        Ok(cfg)
    }

    fn validate_j(&self) -> Result<(), ConfigError> {
        for (set, j) in &self.j_overrides {
            let support = self.default_j(set);
            if !support.is_subset(j) {
                return Err(ConfigError::JNotSuperset {
                    set: self.render_y_set(set),
                    support: render_set(&support, &self.t_names),
                });
            }
        }
        // Monotonicity of the effective assignment over all stratum pairs.
        for small in &self.strata {
            for big in &self.strata {
                if small.is_subset(big) {
                    let j_small = self.eff_j(small);
                    let j_big = self.eff_j(big);
                    if !j_small.is_subset(&j_big) {
                        return Err(ConfigError::JNotMonotone {
                            small: self.render_y_set(small),
                            big: self.render_y_set(big),
                            j_small: render_set(&j_small, &self.t_names),
                            j_big: render_set(&j_big, &self.t_names),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn num_y(&self) -> usize {
        self.y_names.len()
    }

    pub fn num_t(&self) -> usize {
        self.t_names.len()
    }

    pub fn y_name(&self, i: usize) -> &str {
        &self.y_names[i]
    }

    pub fn t_name(&self, j: usize) -> &str {
        &self.t_names[j]
    }

    pub fn y_index(&self, name: &str) -> Result<usize, ConfigError> {
        self.y_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ConfigError::UnknownName(name.to_string()))
    }

    pub fn t_index(&self, name: &str) -> Result<usize, ConfigError> {
        self.t_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ConfigError::UnknownName(name.to_string()))
    }

    pub fn nu(&self, i: usize, j: usize) -> u64 {
        self.nu[i][j]
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn w_annihilates_z(&self) -> bool {
        self.w_annihilates_z
    }

    /// `Y_I` nonempty?
    pub fn is_stratum(&self, set: &BTreeSet<usize>) -> bool {
        self.strata.contains(set)
    }

    pub fn strata(&self) -> impl Iterator<Item = &BTreeSet<usize>> {
        self.strata.iter()
    }

    pub fn z_support(&self) -> &BTreeSet<usize> {
        &self.z_support
    }

    /// Semistable means the pullback of `T` is reduced: `Z` is empty.
    pub fn is_semistable(&self) -> bool {
        self.z_support.is_empty()
    }

    /// Column support `{j : nu_i^j > 0}` unioned over `I`.
    pub fn default_j(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &i in set {
            for j in 0..self.num_t() {
                if self.nu[i][j] > 0 {
                    out.insert(j);
                }
            }
        }
        out
    }

    /// Effective `J(I)`: the explicit override when present, otherwise the
    /// column support.
    pub fn eff_j(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        self.j_overrides
            .get(set)
            .cloned()
            .unwrap_or_else(|| self.default_j(set))
    }

    /// Step cap for the rewriting loop.
    pub fn rewrite_cap(&self) -> usize {
        self.num_y() * (self.base_dim + self.fiber_dim)
    }

    /// Components of `Z_j = f^*T_j - (f^*T_j)_red`: rows with `nu >= 2` in
    /// column `j`.
    pub fn z_j_support(&self, j: usize) -> BTreeSet<usize> {
        (0..self.num_y()).filter(|&i| self.nu[i][j] >= 2).collect()
    }

    /// Components of the reduced pullback of `T_j`: rows with `nu >= 1`.
    pub fn t_j_components(&self, j: usize) -> BTreeSet<usize> {
        (0..self.num_y()).filter(|&i| self.nu[i][j] >= 1).collect()
    }

    /// `N(i)`: the number of `T_j` whose reduced pullback contains `Y_i`,
    /// minus one.
    pub fn n_of(&self, i: usize) -> usize {
        let count = (0..self.num_t()).filter(|&j| self.nu[i][j] >= 1).count();
        count.saturating_sub(1)
    }

    pub fn render_y_set(&self, set: &BTreeSet<usize>) -> String {
        render_set(set, &self.y_names)
    }

    pub fn render_t_set(&self, set: &BTreeSet<usize>) -> String {
        render_set(set, &self.t_names)
    }

    /// Parse the structured-text format; see the crate README for a worked
    /// example. Sections: `[components]`, `[nu]`, `[strata]`, `[J]`,
    /// `[meta]`. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut section = String::new();
        let mut y_names: Vec<String> = Vec::new();
        let mut t_names: Vec<String> = Vec::new();
        let mut nu_lines: Vec<(usize, String)> = Vec::new();
        let mut strata_lines: Vec<(usize, String)> = Vec::new();
        let mut j_lines: Vec<(usize, String)> = Vec::new();
        let mut meta: BTreeMap<String, (usize, String)> = BTreeMap::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let n = lineno + 1;
            let err = |msg: &str| ConfigError::Parse(n, msg.to_string());
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_lowercase();
                continue;
            }
            match section.as_str() {
                "components" => {
                    let (key, value) = line
                        .split_once('=')
                        .ok_or_else(|| err("expected `Y = ...` or `T = ...`"))?;
                    let names: Vec<String> = value
                        .split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect();
                    match key.trim() {
                        "Y" => y_names = names,
                        "T" => t_names = names,
                        other => return Err(err(&format!("unknown component list `{other}`"))),
                    }
                }
                "nu" => nu_lines.push((n, line.to_string())),
                "strata" => strata_lines.push((n, line.to_string())),
                "j" => j_lines.push((n, line.to_string())),
                "meta" => {
                    let (key, value) = line
                        .split_once('=')
                        .ok_or_else(|| err("expected `key = value`"))?;
                    meta.insert(key.trim().to_string(), (n, value.trim().to_string()));
                }
                "" => return Err(err("content before the first section header")),
                other => return Err(err(&format!("unknown section `{other}`"))),
            }
        }

        if y_names.is_empty() || t_names.is_empty() {
            return Err(ConfigError::EmptyComponents);
        }
        let find = |names: &[String], name: &str, lineno: usize| {
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| ConfigError::Parse(lineno, format!("unknown component `{name}`")))
        };

        let mut nu = vec![vec![0u64; t_names.len()]; y_names.len()];
        for (n, line) in nu_lines {
            let (y, rest) = line
                .split_once(':')
                .ok_or_else(|| ConfigError::Parse(n, "expected `Yi: Tj=k, ...`".to_string()))?;
            let i = find(&y_names, y.trim(), n)?;
            for assignment in rest.split(',') {
                let assignment = assignment.trim();
                if assignment.is_empty() {
                    continue;
                }
                let (t, k) = assignment.split_once('=').ok_or_else(|| {
                    ConfigError::Parse(n, format!("expected `Tj=k`, got `{assignment}`"))
                })?;
                let j = find(&t_names, t.trim(), n)?;
                let mult: u64 = k
                    .trim()
                    .parse()
                    .map_err(|_| ConfigError::Parse(n, format!("bad multiplicity `{k}`")))?;
                nu[i][j] = mult;
            }
        }

        let parse_y_set = |src: &str, n: usize| -> Result<BTreeSet<usize>, ConfigError> {
            src.split(',')
                .map(|s| s.trim())
                .filter(|s| !s.is_empty())
                .map(|name| find(&y_names, name, n))
                .collect()
        };
        let mut declared_strata = Vec::new();
        for (n, line) in strata_lines {
            declared_strata.push(parse_y_set(&line, n)?);
        }

        let mut j_overrides = BTreeMap::new();
        for (n, line) in j_lines {
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| ConfigError::Parse(n, "expected `I -> J`".to_string()))?;
            let set = parse_y_set(lhs, n)?;
            let j_set: BTreeSet<usize> = rhs
                .split(',')
                .map(|s| s.trim())
                .filter(|s| !s.is_empty())
                .map(|name| find(&t_names, name, n))
                .collect::<Result<_, _>>()?;
            j_overrides.insert(set, j_set);
        }

        let meta_usize = |key: &'static str| -> Result<usize, ConfigError> {
            let (n, value) = meta.get(key).ok_or(ConfigError::MissingMeta(key))?;
            value
                .parse()
                .map_err(|_| ConfigError::Parse(*n, format!("bad value for `{key}`")))
        };
        let base_dim = meta_usize("base_dim")?;
        let fiber_dim = meta_usize("fiber_dim")?;
        let declared_z = match meta.get("z_support") {
            Some((n, value)) => {
                if value.trim().is_empty() || value.trim() == "none" {
                    Some(BTreeSet::new())
                } else {
                    Some(parse_y_set(value, *n)?)
                }
            }
            None => None,
        };
        let w_annihilates_z = match meta.get("w_annihilates_z") {
            Some((n, value)) => match value.trim() {
                "true" => true,
                "false" => false,
                other => {
                    return Err(ConfigError::Parse(
                        *n,
                        format!("expected true/false for w_annihilates_z, got `{other}`"),
                    ))
                }
            },
            None => true,
        };

        Self::new(
            y_names,
            t_names,
            nu,
            declared_strata,
            j_overrides,
            declared_z,
            base_dim,
            fiber_dim,
            w_annihilates_z,
        )
    }
}

impl fmt::Display for BoundaryConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Y components: {}", self.y_names.join(", "))?;
        writeln!(f, "T components: {}", self.t_names.join(", "))?;
        for (i, row) in self.nu.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > 0)
                .map(|(j, v)| format!("{}={}", self.t_names[j], v))
                .collect();
            writeln!(f, "  {}: {}", self.y_names[i], cells.join(", "))?;
        }
        writeln!(f, "Z support: {}", self.render_y_set(&self.z_support))?;
        write!(
            f,
            "base_dim = {}, fiber_dim = {}",
            self.base_dim, self.fiber_dim
        )
    }
}

fn render_set(set: &BTreeSet<usize>, names: &[String]) -> String {
    if set.is_empty() {
        return "{}".to_string();
    }
    let parts: Vec<&str> = set.iter().map(|&i| names[i].as_str()).collect();
    format!("{{{}}}", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SEMISTABLE: &str = "\
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

    #[test]
    fn parses_semistable() {
        let cfg = BoundaryConfig::parse(SEMISTABLE).unwrap();
        assert_eq!(cfg.num_y(), 2);
        assert_eq!(cfg.num_t(), 2);
        assert!(cfg.is_semistable());
        assert!(cfg.is_stratum(&BTreeSet::from([0, 1])));
        assert!(cfg.is_stratum(&BTreeSet::from([0])));
        assert_eq!(cfg.eff_j(&BTreeSet::from([0])), BTreeSet::from([0]));
        assert_eq!(cfg.eff_j(&BTreeSet::from([0, 1])), BTreeSet::from([0, 1]));
    }

    #[test]
    fn parses_multifiber_and_derives_z() {
        let cfg = BoundaryConfig::parse(MULTIFIBER).unwrap();
        assert!(!cfg.is_semistable());
        assert_eq!(cfg.z_support(), &BTreeSet::from([0]));
        assert_eq!(cfg.n_of(0), 0);
        assert_eq!(cfg.z_j_support(0), BTreeSet::from([0]));
    }

    #[test]
    fn strata_closure_is_automatic() {
        let text = "\
[components]
Y = A, B, C
T = T1

[nu]
A: T1=1
B: T1=1
C: T1=1

[strata]
A, B, C

[meta]
base_dim = 3
fiber_dim = 1
";
        let cfg = BoundaryConfig::parse(text).unwrap();
        // All seven nonempty subsets present.
        assert_eq!(cfg.strata().count(), 7);
    }

    #[test]
    fn z_support_mismatch_is_rejected() {
        let text = MULTIFIBER.replace("z_support = Y1", "z_support = none");
        let err = BoundaryConfig::parse(&text).unwrap_err();
        assert!(matches!(err, ConfigError::ZSupportMismatch { .. }), "{err}");
    }

    #[test]
    fn unmapped_component_is_rejected() {
        let text = "\
[components]
Y = Y1, Y2
T = T1

[nu]
Y1: T1=1

[meta]
base_dim = 1
fiber_dim = 1
";
        assert!(matches!(
            BoundaryConfig::parse(text),
            Err(ConfigError::UnmappedComponent(_))
        ));
    }

    #[test]
    fn j_override_must_contain_support() {
        let text = "\
[components]
Y = Y1, Y2
T = T1, T2

[nu]
Y1: T1=1
Y2: T2=1

[strata]
Y1, Y2

[J]
Y1 -> T2

[meta]
base_dim = 2
fiber_dim = 1
";
        assert!(matches!(
            BoundaryConfig::parse(text),
            Err(ConfigError::JNotSuperset { .. })
        ));
    }

    #[test]
    fn j_override_must_be_monotone() {
        let text = "\
[components]
Y = Y1, Y2
T = T1, T2

[nu]
Y1: T1=1
Y2: T1=1, T2=1

[strata]
Y1, Y2

[J]
Y1 -> T1, T2

[meta]
base_dim = 2
fiber_dim = 1
";
        // J({Y1}) = {T1,T2} but J({Y1,Y2}) defaults to {T1,T2}: monotone.
        // Shrinking the big one breaks it.
        let ok = BoundaryConfig::parse(text).unwrap();
        assert_eq!(ok.eff_j(&BTreeSet::from([0])).len(), 2);

        let text2 = text.replace("Y1 -> T1, T2", "Y1 -> T1, T2\nY1, Y2 -> T1, T2");
        assert!(BoundaryConfig::parse(&text2).is_ok());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad =
            "[components]\nY = Y1\nT = T1\n[nu]\nY1 T1=1\n[meta]\nbase_dim = 1\nfiber_dim = 1\n";
        match BoundaryConfig::parse(bad) {
            Err(ConfigError::Parse(line, _)) => assert_eq!(line, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_meta_is_reported() {
        let bad = "[components]\nY = Y1\nT = T1\n[nu]\nY1: T1=1\n";
        assert!(matches!(
            BoundaryConfig::parse(bad),
            Err(ConfigError::MissingMeta("base_dim"))
        ));
    }

    #[test]
    fn w_flag_round_trips() {
        let text = format!("{MULTIFIBER}w_annihilates_z = false\n");
        let cfg = BoundaryConfig::parse(&text).unwrap();
        assert!(!cfg.w_annihilates_z());
    }
}
