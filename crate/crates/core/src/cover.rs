//! Splitting types of degree-`d` covers, group cases with their quotient
//! conversion tables, and the linear relations tying quotient point counts to
//! the Frobenius traces of isogeny factors of the Galois closure's Jacobian.
//!
//! The conversion tables and the group grid live in an embedded text file
//! (`tables/cover_cases.txt`) that is parsed and validated at first use, so the
//! tables can be audited independently of the code.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoverError {
    #[error("parts must be positive and sum to the cover degree")]
    BadPartition,
    #[error("operation requires degree {expected}, got {got}")]
    WrongDegree { expected: u8, got: u8 },
    #[error("splitting type {0} is not admissible here")]
    InadmissibleType(String),
    #[error("splitting sequence prefix is too short: need {need} terms, have {have}")]
    ShortPrefix { need: usize, have: usize },
    #[error("table file error at line {line}: {msg}")]
    Table { line: usize, msg: String },
}

/// Partition of the cover degree recording the relative degrees of the places
/// above an unramified place. Canonical form: weakly decreasing parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SplittingType {
    parts: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl SplittingType {
    pub fn new(mut parts: Vec<u8>) -> Result<Self, CoverError> {
        if parts.is_empty() || parts.iter().any(|&p| p == 0) {
            return Err(CoverError::BadPartition);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(SplittingType { parts })
    }

    pub fn parts(&self) -> &[u8] {
        &self.parts
    }

    pub fn degree(&self) -> u8 {
        self.parts.iter().sum()
    }

    /// Parity of the corresponding permutation: even iff the number of parts
    /// has the same parity as the degree.
    pub fn parity(&self) -> Parity {
        if (self.degree() as usize - self.parts.len()) % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Number of parts equal to 1 (places of the cover with residue degree 1
    /// over the base place).
    pub fn singles(&self) -> u32 {
        self.parts.iter().filter(|&&p| p == 1).count() as u32
    }

    pub fn count_of(&self, part: u8) -> u32 {
        self.parts.iter().filter(|&&p| p == part).count() as u32
    }

    /// Parse `"3+1^2"` style notation.
    pub fn parse(s: &str) -> Result<Self, CoverError> {
        let mut parts = Vec::new();
        for term in s.split('+') {
            let (base, mult) = match term.split_once('^') {
                Some((b, m)) => (b, m),
                None => (term, "1"),
            };
            let base: u8 = base.trim().parse().map_err(|_| CoverError::BadPartition)?;
            let mult: u8 = mult.trim().parse().map_err(|_| CoverError::BadPartition)?;
            if mult == 0 {
                return Err(CoverError::BadPartition);
            }
            parts.extend(std::iter::repeat(base).take(mult as usize));
        }
        SplittingType::new(parts)
    }
}

/// Canonical order: `6 < 5+1 < 4+2 < 4+1^2 < ... < 1^6`, i.e. reverse of the
/// natural lexicographic order on the weakly decreasing part vectors.
impl Ord for SplittingType {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.parts.cmp(&self.parts)
    }
}

impl PartialOrd for SplittingType {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        let mut first = true;
        while i < self.parts.len() {
            let p = self.parts[i];
            let mut run = 1;
            while i + run < self.parts.len() && self.parts[i + run] == p {
                run += 1;
            }
            if !first {
                write!(f, "+")?;
            }
            if run == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{run}")?;
            }
            first = false;
            i += run;
        }
        Ok(())
    }
}

/// All partitions of `d` in canonical order.
pub fn partitions(d: u8) -> Vec<SplittingType> {
    fn rec(remaining: u8, max: u8, current: &mut Vec<u8>, out: &mut Vec<SplittingType>) {
        if remaining == 0 {
            out.push(SplittingType {
                parts: current.clone(),
            });
            return;
        }
        let mut p = max.min(remaining);
        while p >= 1 {
            current.push(p);
            rec(remaining - p, p, current, out);
            current.pop();
            p -= 1;
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out
}

/// Image of a degree-6 splitting type under the outer automorphism exchange:
/// `6 <-> 3+2+1`, `2^3 <-> 2+1^4`, `3^2 <-> 3+1^3`, all other types fixed.
pub fn twin_image(t: &SplittingType) -> Result<SplittingType, CoverError> {
    if t.degree() != 6 {
        return Err(CoverError::WrongDegree {
            expected: 6,
            got: t.degree(),
        });
    }
    let swap = [("6", "3+2+1"), ("2^3", "2+1^4"), ("3^2", "3+1^3")];
    let name = t.to_string();
    for (a, b) in swap {
        if name == a {
            return SplittingType::parse(b);
        }
        if name == b {
            return SplittingType::parse(a);
        }
    }
    Ok(t.clone())
}

/// Conversion of an admissible degree-5 type to the degree-6 and degree-20
/// quotients of the Galois closure.
pub fn a5_quotient_images(
    t: &SplittingType,
) -> Result<(SplittingType, SplittingType), CoverError> {
    let table = [
        ("5", "5+1", "5^4"),
        ("3+1^2", "3^2", "3^6+1^2"),
        ("2^2+1", "2^2+1^2", "2^10"),
        ("1^5", "1^6", "1^20"),
    ];
    let name = t.to_string();
    for (src, six, twenty) in table {
        if name == src {
            return Ok((SplittingType::parse(six)?, SplittingType::parse(twenty)?));
        }
    }
    Err(CoverError::InadmissibleType(name))
}

/// Image in the degree-2 quotient: `1^2` for even types, `2` for odd types.
pub fn resolvent_image(t: &SplittingType) -> SplittingType {
    match t.parity() {
        Parity::Even => SplittingType { parts: vec![1, 1] },
        Parity::Odd => SplittingType { parts: vec![2] },
    }
}

/// Multiset of splitting types, stored as sorted (type, multiplicity) pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeMultiset {
    entries: Vec<(SplittingType, u32)>,
}

impl TypeMultiset {
    pub fn new(mut entries: Vec<(SplittingType, u32)>) -> Self {
        entries.retain(|(_, c)| *c > 0);
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(SplittingType, u32)> = Vec::with_capacity(entries.len());
        for (t, c) in entries {
            match merged.last_mut() {
                Some((last, count)) if *last == t => *count += c,
                _ => merged.push((t, c)),
            }
        }
        TypeMultiset { entries: merged }
    }

    pub fn empty() -> Self {
        TypeMultiset {
            entries: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[(SplittingType, u32)] {
        &self.entries
    }

    pub fn size(&self) -> u32 {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    pub fn total_singles(&self) -> i64 {
        self.entries
            .iter()
            .map(|(t, c)| t.singles() as i64 * *c as i64)
            .sum()
    }

    pub fn contains_type(&self, t: &SplittingType) -> bool {
        self.entries.iter().any(|(u, _)| u == t)
    }

    /// Parse `{6 (x3), 3^2}` style notation.
    pub fn parse(s: &str) -> Result<Self, CoverError> {
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or(CoverError::BadPartition)?;
        let mut entries = Vec::new();
        for item in inner.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (ty, count) = match item.split_once("(x") {
                Some((t, c)) => {
                    let c = c.trim_end_matches(')').trim();
                    (
                        t.trim(),
                        c.parse::<u32>().map_err(|_| CoverError::BadPartition)?,
                    )
                }
                None => (item, 1),
            };
            entries.push((SplittingType::parse(ty)?, count));
        }
        Ok(TypeMultiset::new(entries))
    }
}

impl fmt::Display for TypeMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (t, c)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if *c == 1 {
                write!(f, "{t}")?;
            } else {
                write!(f, "{t} (x{c})")?;
            }
        }
        write!(f, "}}")
    }
}

/// Per-degree multisets of splitting types; term `i` covers the degree-`i+1`
/// places of the base curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingSequence {
    pub terms: Vec<TypeMultiset>,
}

impl fmt::Display for SplittingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

pub type Conversion = BTreeMap<SplittingType, Vec<u8>>;

/// How a factor's trace is read off from the quotient point count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceRelation {
    /// `T_n = N_n(C) - N_n(quotient)`: the quotient's Jacobian is isogenous to
    /// `J(C) x factor`.
    Direct,
    /// `T_n = N_n(C) - 2 T_{A,n} - T_{first factor,n} - N_n(quotient)`: the
    /// quotient's Jacobian carries `J(C) x A^2 x B1 x` this factor.
    BackSubstituted,
    /// `T_n = 2 N_n(C) - N_n(quotient)`: the quotient is the disjoint union of
    /// `C` and a cover whose Jacobian is isogenous to `J(C) x factor`.
    Doubled,
}

/// One isogeny-factor check: conversion table into a quotient cover plus the
/// linear relation recovering the factor's Frobenius traces.
#[derive(Clone, Debug)]
pub struct FactorSchema {
    pub name: String,
    /// Factor dimension is `dim_per_g1 * (g - 1)` for etale covers.
    pub dim_per_g1: u32,
    pub relation: TraceRelation,
    pub quotient_degree: u32,
    pub conversion: Conversion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupTag {
    S3,
    S4,
    A5,
    S6,
    Pgl25,
}

impl GroupTag {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "S3" => Some(GroupTag::S3),
            "S4" => Some(GroupTag::S4),
            "A5" => Some(GroupTag::A5),
            "S6" => Some(GroupTag::S6),
            "PGL25" => Some(GroupTag::Pgl25),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GroupTag::S3 => "S3",
            GroupTag::S4 => "S4",
            GroupTag::A5 => "A5",
            GroupTag::S6 => "S6",
            GroupTag::Pgl25 => "PGL(2,5)",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResolventKind {
    /// The group sits inside the alternating group: no quadratic resolvent.
    None,
    /// Purely geometric quadratic resolvent.
    Geometric,
    /// Constant quadratic resolvent: odd place degrees take odd types, even
    /// degrees take even types.
    Constant,
}

impl ResolventKind {
    pub fn label(&self) -> &'static str {
        match self {
            ResolventKind::None => "none",
            ResolventKind::Geometric => "geometric",
            ResolventKind::Constant => "constant",
        }
    }
}

/// A `(d, G, G0)` configuration: admissible types, conversion tables, trace
/// relations, and the redundant closure cross-check where one is tabulated.
#[derive(Clone, Debug)]
pub struct GroupCase {
    pub id: String,
    pub d: u8,
    pub group: Option<GroupTag>,
    pub resolvent: ResolventKind,
    pub admissible: Vec<SplittingType>,
    pub factors: Vec<FactorSchema>,
    /// Conversion into the full Galois closure, checked against
    /// `N(closure) = N(C) - 2 T_A - T_B` when present.
    pub closure_check: Option<Conversion>,
}

impl GroupCase {
    /// Admissible types at a given place degree, honoring the parity rule for
    /// constant resolvents.
    pub fn admissible_at(&self, degree: usize) -> Vec<&SplittingType> {
        self.admissible
            .iter()
            .filter(|t| match self.resolvent {
                ResolventKind::Constant => {
                    let want = if degree % 2 == 1 {
                        Parity::Odd
                    } else {
                        Parity::Even
                    };
                    t.parity() == want
                }
                _ => true,
            })
            .collect()
    }

    /// A configuration with every partition admissible and no factor checks;
    /// used by synthetic control cases.
    pub fn unrestricted(d: u8) -> GroupCase {
        GroupCase {
            id: "control".to_string(),
            d,
            group: None,
            resolvent: ResolventKind::None,
            admissible: partitions(d),
            factors: Vec::new(),
            closure_check: None,
        }
    }
}

/// Identity conversion on the admissible types of a case (the cover itself).
pub fn identity_conversion(case: &GroupCase) -> Conversion {
    case.admissible
        .iter()
        .map(|t| (t.clone(), t.parts().to_vec()))
        .collect()
}

/// Parity conversion: even types to `1+1`, odd types to `2`.
fn parity_conversion(types: &[SplittingType]) -> Conversion {
    types
        .iter()
        .map(|t| (t.clone(), resolvent_image(t).parts().to_vec()))
        .collect()
}

/// `N_n` of the quotient cover determined by a splitting-sequence prefix and a
/// conversion table. Needs the prefix to carry every degree dividing `n`.
pub fn quotient_count(
    prefix: &[TypeMultiset],
    conversion: &Conversion,
    n: usize,
) -> Result<i64, CoverError> {
    if prefix.len() < n {
        return Err(CoverError::ShortPrefix {
            need: n,
            have: prefix.len(),
        });
    }
    let mut total: i64 = 0;
    for (m, term) in prefix.iter().enumerate().take(n) {
        let m = m + 1;
        if n % m != 0 {
            continue;
        }
        for (t, count) in term.entries() {
            let parts = conversion
                .get(t)
                .ok_or_else(|| CoverError::InadmissibleType(t.to_string()))?;
            for &p in parts {
                let place_degree = m * p as usize;
                if n % place_degree == 0 {
                    total += place_degree as i64 * *count as i64;
                }
            }
        }
    }
    Ok(total)
}

/// Trace prefix of one isogeny factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorTraces {
    pub name: String,
    /// Actual dimension (`dim_per_g1 * (g-1)` already applied).
    pub dim: usize,
    pub traces: Vec<i64>,
}

/// Derive trace prefixes for every factor of `case` from a splitting-sequence
/// prefix. `c_counts[n-1]` must be concrete for all covered degrees;
/// `cprime_counts` entries may be `None`, in which case the sequence-implied
/// count stands in.
pub fn derived_traces(
    case: &GroupCase,
    prefix: &[TypeMultiset],
    g: usize,
    c_counts: &[i64],
    cprime_counts: &[Option<i64>],
) -> Result<Vec<FactorTraces>, CoverError> {
    let len = prefix.len();
    let identity = identity_conversion(case);
    let mut t_a: Vec<i64> = Vec::with_capacity(len);
    for n in 1..=len {
        let nc = c_counts[n - 1];
        let ncp = match cprime_counts.get(n - 1).copied().flatten() {
            Some(v) => v,
            None => quotient_count(prefix, &identity, n)?,
        };
        t_a.push(nc - ncp);
    }
    let mut out: Vec<FactorTraces> = Vec::with_capacity(case.factors.len());
    for schema in &case.factors {
        let mut traces = Vec::with_capacity(len);
        for n in 1..=len {
            let nq = quotient_count(prefix, &schema.conversion, n)?;
            let nc = c_counts[n - 1];
            let t = match schema.relation {
                TraceRelation::Direct => nc - nq,
                TraceRelation::Doubled => 2 * nc - nq,
                TraceRelation::BackSubstituted => {
                    let first = &out
                        .first()
                        .expect("back-substituted factor listed after its dependency")
                        .traces;
                    nc - 2 * t_a[n - 1] - first[n - 1] - nq
                }
            };
            traces.push(t);
        }
        out.push(FactorTraces {
            name: schema.name.clone(),
            dim: schema.dim_per_g1 as usize * (g - 1),
            traces,
        });
    }
    // Redundant cross-check against the full closure where tabulated: the
    // closure count must satisfy N(closure) = N(C) - 2 T_A - T_B.
    if let Some(closure) = &case.closure_check {
        let b = out
            .iter()
            .find(|f| f.name == "B")
            .expect("closure check requires a B factor");
        for n in 1..=len {
            let nq = quotient_count(prefix, closure, n)?;
            debug_assert_eq!(
                nq,
                c_counts[n - 1] - 2 * t_a[n - 1] - b.traces[n - 1],
                "closure count identity failed at degree {n}"
            );
        }
    }
    Ok(out)
}

/// Frobenius traces of `A`: `T_{A,n} = N_n(C) - N_n(C')`.
pub fn prym_traces(
    prefix: &[TypeMultiset],
    case: &GroupCase,
    c_counts: &[i64],
    cprime_counts: &[Option<i64>],
) -> Result<Vec<i64>, CoverError> {
    let identity = identity_conversion(case);
    let mut t_a = Vec::with_capacity(prefix.len());
    for n in 1..=prefix.len() {
        let ncp = match cprime_counts.get(n - 1).copied().flatten() {
            Some(v) => v,
            None => quotient_count(prefix, &identity, n)?,
        };
        t_a.push(c_counts[n - 1] - ncp);
    }
    Ok(t_a)
}

static GRID: OnceLock<Vec<GroupCase>> = OnceLock::new();

/// The grid of `(d, G, G0)` cases, parsed from the embedded tables file and
/// validated against the partition invariants.
pub fn group_grid() -> &'static [GroupCase] {
    GRID.get_or_init(|| {
        let cases =
            parse_tables(include_str!("../tables/cover_cases.txt")).expect("embedded tables parse");
        validate_grid(&cases).expect("embedded tables validate");
        cases
    })
}

pub fn grid_case(id: &str) -> Option<&'static GroupCase> {
    group_grid().iter().find(|c| c.id == id)
}

/// Grid entries applicable to a given cover degree.
pub fn grid_for_degree(d: u8) -> Vec<&'static GroupCase> {
    group_grid().iter().filter(|c| c.d == d).collect()
}

fn parse_tables(text: &str) -> Result<Vec<GroupCase>, CoverError> {
    let mut cases: Vec<GroupCase> = Vec::new();
    let mut current: Option<GroupCase> = None;
    let mut current_factor: Option<FactorSchema> = None;
    let mut in_closure = false;
    let err = |line: usize, msg: &str| CoverError::Table {
        line,
        msg: msg.to_string(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let key = tokens.next().unwrap();
        match key {
            "case" => {
                if let Some(mut c) = current.take() {
                    if let Some(f) = current_factor.take() {
                        c.factors.push(f);
                    }
                    cases.push(c);
                }
                in_closure = false;
                let id = tokens.next().ok_or_else(|| err(line_no, "missing id"))?;
                current = Some(GroupCase {
                    id: id.to_string(),
                    d: 0,
                    group: None,
                    resolvent: ResolventKind::None,
                    admissible: Vec::new(),
                    factors: Vec::new(),
                    closure_check: None,
                });
            }
            "d" => {
                let c = current.as_mut().ok_or_else(|| err(line_no, "no open case"))?;
                c.d = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(line_no, "bad degree"))?;
            }
            "group" => {
                let c = current.as_mut().ok_or_else(|| err(line_no, "no open case"))?;
                let name = tokens.next().ok_or_else(|| err(line_no, "missing group"))?;
                c.group = Some(GroupTag::parse(name).ok_or_else(|| err(line_no, "unknown group"))?);
            }
            "resolvent" => {
                let c = current.as_mut().ok_or_else(|| err(line_no, "no open case"))?;
                c.resolvent = match tokens.next() {
                    Some("none") => ResolventKind::None,
                    Some("geometric") => ResolventKind::Geometric,
                    Some("constant") => ResolventKind::Constant,
                    _ => return Err(err(line_no, "bad resolvent kind")),
                };
            }
            "types" => {
                let c = current.as_mut().ok_or_else(|| err(line_no, "no open case"))?;
                for t in tokens {
                    c.admissible.push(
                        SplittingType::parse(t).map_err(|e| err(line_no, &e.to_string()))?,
                    );
                }
                c.admissible.sort();
            }
            "factor" => {
                let c = current.as_mut().ok_or_else(|| err(line_no, "no open case"))?;
                if let Some(f) = current_factor.take() {
                    c.factors.push(f);
                }
                in_closure = false;
                let name = tokens.next().ok_or_else(|| err(line_no, "missing name"))?;
                let rest: Vec<&str> = tokens.collect();
                let mut dim = None;
                let mut relation = None;
                let mut degree = None;
                let mut i = 0;
                while i < rest.len() {
                    match rest[i] {
                        "dim" => dim = rest.get(i + 1).and_then(|t| t.parse().ok()),
                        "relation" => {
                            relation = match rest.get(i + 1) {
                                Some(&"direct") => Some(TraceRelation::Direct),
                                Some(&"back") => Some(TraceRelation::BackSubstituted),
                                Some(&"doubled") => Some(TraceRelation::Doubled),
                                _ => None,
                            }
                        }
                        "degree" => degree = rest.get(i + 1).and_then(|t| t.parse().ok()),
                        _ => return Err(err(line_no, "bad factor attribute")),
                    }
                    i += 2;
                }
                current_factor = Some(FactorSchema {
                    name: name.to_string(),
                    dim_per_g1: dim.ok_or_else(|| err(line_no, "missing dim"))?,
                    relation: relation.ok_or_else(|| err(line_no, "missing relation"))?,
                    quotient_degree: degree.ok_or_else(|| err(line_no, "missing degree"))?,
                    conversion: Conversion::new(),
                });
            }
            "parity-map" => {
                let f = current_factor
                    .as_mut()
                    .ok_or_else(|| err(line_no, "no open factor"))?;
                let c = current.as_ref().unwrap();
                f.conversion = parity_conversion(&c.admissible);
            }
            "closure" => {
                let c = current.as_mut().ok_or_else(|| err(line_no, "no open case"))?;
                if let Some(f) = current_factor.take() {
                    c.factors.push(f);
                }
                c.closure_check = Some(Conversion::new());
                in_closure = true;
            }
            "map" => {
                let rest: Vec<&str> = tokens.collect();
                if rest.len() != 3 || rest[1] != "->" {
                    return Err(err(line_no, "map syntax: map <type> -> <partition>"));
                }
                let from =
                    SplittingType::parse(rest[0]).map_err(|e| err(line_no, &e.to_string()))?;
                let to = SplittingType::parse(rest[2]).map_err(|e| err(line_no, &e.to_string()))?;
                let target = if in_closure {
                    current
                        .as_mut()
                        .and_then(|c| c.closure_check.as_mut())
                        .ok_or_else(|| err(line_no, "no open closure block"))?
                } else {
                    &mut current_factor
                        .as_mut()
                        .ok_or_else(|| err(line_no, "no open factor"))?
                        .conversion
                };
                target.insert(from, to.parts().to_vec());
            }
            "end" => {
                let mut c = current.take().ok_or_else(|| err(line_no, "no open case"))?;
                if let Some(f) = current_factor.take() {
                    c.factors.push(f);
                }
                in_closure = false;
                cases.push(c);
            }
            _ => return Err(err(line_no, "unknown directive")),
        }
    }
    if let Some(mut c) = current.take() {
        if let Some(f) = current_factor.take() {
            c.factors.push(f);
        }
        cases.push(c);
    }
    Ok(cases)
}

fn validate_grid(cases: &[GroupCase]) -> Result<(), CoverError> {
    let fail = |msg: String| CoverError::Table { line: 0, msg };
    for case in cases {
        let all = partitions(case.d);
        for t in &case.admissible {
            if t.degree() != case.d {
                return Err(fail(format!("{}: type {t} has wrong degree", case.id)));
            }
            if !all.contains(t) {
                return Err(fail(format!("{}: {t} is not a partition", case.id)));
            }
        }
        for f in &case.factors {
            for t in &case.admissible {
                let parts = f.conversion.get(t).ok_or_else(|| {
                    fail(format!("{}: factor {} misses type {t}", case.id, f.name))
                })?;
                let sum: u32 = parts.iter().map(|&p| p as u32).sum();
                if sum != f.quotient_degree {
                    return Err(fail(format!(
                        "{}: factor {} image of {t} sums to {sum}, want {}",
                        case.id, f.name, f.quotient_degree
                    )));
                }
            }
            // Parity maps must follow the even/odd rule exactly.
            if f.quotient_degree == 2 {
                for t in &case.admissible {
                    let expect = resolvent_image(t);
                    if f.conversion[t] != expect.parts() {
                        return Err(fail(format!(
                            "{}: parity image of {t} should be {expect}",
                            case.id
                        )));
                    }
                }
            }
        }
        if let Some(closure) = &case.closure_check {
            for t in &case.admissible {
                let parts = closure
                    .get(t)
                    .ok_or_else(|| fail(format!("{}: closure misses type {t}", case.id)))?;
                let sum: u32 = parts.iter().map(|&p| p as u32).sum();
                if sum as u8 != 2 * case.d {
                    return Err(fail(format!("{}: closure image of {t} has bad sum", case.id)));
                }
            }
        }
        // Twin tables must agree with the outer-automorphism exchange.
        if case.d == 6 {
            for f in &case.factors {
                if f.quotient_degree == 6 {
                    for t in &case.admissible {
                        let expect = twin_image(t).unwrap();
                        if f.conversion[t] != expect.parts() {
                            return Err(fail(format!(
                                "{}: twin image of {t} should be {expect}",
                                case.id
                            )));
                        }
                    }
                }
            }
        }
        if case.group == Some(GroupTag::A5) {
            for t in &case.admissible {
                if t.parity() != Parity::Even {
                    return Err(fail(format!("{}: {t} is odd, A5 types are even", case.id)));
                }
                let (six, twenty) = a5_quotient_images(t).unwrap();
                for f in &case.factors {
                    let expect = if f.quotient_degree == 6 { &six } else { &twenty };
                    if f.conversion[t] != expect.parts() {
                        return Err(fail(format!("{}: quotient image of {t} mismatch", case.id)));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(s: &str) -> SplittingType {
        SplittingType::parse(s).unwrap()
    }

    #[test]
    fn partition_counts_and_order() {
        assert_eq!(partitions(3).len(), 3);
        assert_eq!(partitions(5).len(), 7);
        let p6 = partitions(6);
        assert_eq!(p6.len(), 11);
        assert_eq!(p6[0], ty("6"));
        assert_eq!(p6[1], ty("5+1"));
        assert_eq!(p6[10], ty("1^6"));
        let mut sorted = p6.clone();
        sorted.sort();
        assert_eq!(sorted, p6, "generation order is the canonical order");
    }

    #[test]
    fn parity_fixtures() {
        assert_eq!(ty("5").parity(), Parity::Even);
        assert_eq!(ty("6").parity(), Parity::Odd);
        assert_eq!(ty("2+1^2").parity(), Parity::Odd);
        assert_eq!(resolvent_image(&ty("5")), ty("1^2"));
        assert_eq!(resolvent_image(&ty("6")), ty("2"));
        assert_eq!(resolvent_image(&ty("2+1^2")), ty("2"));
    }

    #[test]
    fn resolvent_matches_parity_for_all_small_degrees() {
        for d in 2..=7u8 {
            for t in partitions(d) {
                let img = resolvent_image(&t);
                assert_eq!(
                    img == ty("1^2"),
                    t.parity() == Parity::Even,
                    "type {t} of degree {d}"
                );
            }
        }
    }

    #[test]
    fn twin_fixtures_and_involution() {
        assert_eq!(twin_image(&ty("6")).unwrap(), ty("3+2+1"));
        assert_eq!(twin_image(&ty("1^6")).unwrap(), ty("1^6"));
        assert_eq!(twin_image(&ty("3^2")).unwrap(), ty("3+1^3"));
        for t in partitions(6) {
            let tw = twin_image(&t).unwrap();
            assert_eq!(twin_image(&tw).unwrap(), t, "involution at {t}");
            assert_eq!(tw.parity(), t.parity(), "parity preserved at {t}");
        }
        assert!(twin_image(&ty("5")).is_err());
    }

    #[test]
    fn a5_image_fixtures_and_sums() {
        assert_eq!(
            a5_quotient_images(&ty("5")).unwrap(),
            (ty("5+1"), ty("5^4"))
        );
        assert_eq!(
            a5_quotient_images(&ty("1^5")).unwrap(),
            (ty("1^6"), ty("1^20"))
        );
        assert_eq!(
            a5_quotient_images(&ty("2^2+1")).unwrap(),
            (ty("2^2+1^2"), ty("2^10"))
        );
        for t in ["5", "3+1^2", "2^2+1", "1^5"] {
            let (six, twenty) = a5_quotient_images(&ty(t)).unwrap();
            assert_eq!(six.degree(), 6);
            assert_eq!(twenty.degree(), 20);
        }
        assert!(a5_quotient_images(&ty("4+1")).is_err());
    }

    #[test]
    fn grid_loads_and_validates() {
        let grid = group_grid();
        assert_eq!(grid.len(), 8);
        let a5 = grid_case("a5").unwrap();
        assert_eq!(
            a5.admissible,
            vec![ty("5"), ty("3+1^2"), ty("2^2+1"), ty("1^5")]
        );
        let s6c = grid_case("s6-a6").unwrap();
        assert_eq!(s6c.resolvent, ResolventKind::Constant);
        let odd_deg1: Vec<String> = s6c.admissible_at(1).iter().map(|t| t.to_string()).collect();
        assert_eq!(odd_deg1, vec!["6", "4+1^2", "3+2+1", "2^3", "2+1^4"]);
        let pgl = grid_case("pgl25").unwrap();
        assert_eq!(pgl.admissible.len(), 7);
        for banned in ["4+2", "3+2+1", "3+1^3", "2+1^4"] {
            assert!(!pgl.admissible.contains(&ty(banned)));
        }
        let s3 = grid_case("s3").unwrap();
        assert_eq!(s3.admissible.len(), 3);
        assert!(s3.closure_check.is_some());
    }

    #[test]
    fn quotient_count_fixtures() {
        // Three split degree-1 places of a cubic cover: resolvent count 6.
        let s3 = grid_case("s3").unwrap();
        let term = TypeMultiset::parse("{3 (x3)}").unwrap();
        let b = &s3.factors[0].conversion;
        assert_eq!(quotient_count(&[term], b, 1).unwrap(), 6);

        // Four degree-1 places of type 5: one extra fixed place each.
        let a5 = grid_case("a5").unwrap();
        let term = TypeMultiset::parse("{5 (x4)}").unwrap();
        let d5 = &a5.factors[0].conversion;
        assert_eq!(quotient_count(&[term], d5, 1).unwrap(), 4);

        // Twin count for {6 (x3), 3^2}: each 6 contributes one singleton via
        // 3+2+1, and 3^2 contributes three via 3+1^3.
        let s6 = grid_case("s6").unwrap();
        let twin = &s6.factors[1].conversion;
        let term = TypeMultiset::parse("{6 (x3), 3^2}").unwrap();
        assert_eq!(quotient_count(&[term], twin, 1).unwrap(), 6);
    }

    #[test]
    fn derived_traces_degree5_fixture() {
        // Counts (4,8,10; 0,0,15): traces of the six-dimensional factor must
        // come out (-4, -8, -25).
        let a5 = grid_case("a5").unwrap();
        let prefix = vec![
            TypeMultiset::parse("{5 (x4)}").unwrap(),
            TypeMultiset::parse("{5 (x2)}").unwrap(),
            TypeMultiset::parse("{5, 1^5}").unwrap(),
        ];
        let out = derived_traces(
            a5,
            &prefix,
            2,
            &[4, 8, 10],
            &[Some(0), Some(0), Some(15)],
        )
        .unwrap();
        assert_eq!(out[0].name, "B1");
        assert_eq!(out[0].dim, 5);
        assert_eq!(out[0].traces, vec![0, 0, -15]);
        assert_eq!(out[1].name, "B2");
        assert_eq!(out[1].dim, 6);
        assert_eq!(out[1].traces, vec![-4, -8, -25]);
    }

    #[test]
    fn derived_traces_degree6_fixture() {
        // Degree-1 splittings {6 (x3), 4+2, 3^2} for counts starting (5, ...):
        // T_B = 1 and T_B1 = -1.
        let s6 = grid_case("s6").unwrap();
        let prefix = vec![TypeMultiset::parse("{6 (x3), 4+2, 3^2}").unwrap()];
        let out = derived_traces(s6, &prefix, 2, &[5], &[Some(0)]).unwrap();
        assert_eq!(out[0].name, "B");
        assert_eq!(out[0].traces, vec![1]);
        assert_eq!(out[1].name, "B1");
        assert_eq!(out[1].traces, vec![-1]);
    }

    #[test]
    fn derived_traces_uses_sequence_counts_for_wildcards() {
        // Three degree-1 places with types {3, 2+1, 1^3}: the sequence implies
        // N_1(C') = 1 + 3 = 4, so a concrete entry 4 and a wildcard agree.
        let s3 = grid_case("s3").unwrap();
        let prefix = vec![TypeMultiset::parse("{3, 2+1, 1^3}").unwrap()];
        let with_count = derived_traces(s3, &prefix, 2, &[3], &[Some(4)]).unwrap();
        let with_wildcard = derived_traces(s3, &prefix, 2, &[3], &[None]).unwrap();
        assert_eq!(with_count, with_wildcard);
        assert_eq!(with_count[0].traces, vec![-1]);
    }

    #[test]
    fn multiset_roundtrip_and_display() {
        let m = TypeMultiset::parse("{6 (x3), 3^2}").unwrap();
        assert_eq!(m.to_string(), "{6 (x3), 3^2}");
        assert_eq!(m.size(), 4);
        assert_eq!(m.total_singles(), 0);
        assert_eq!(TypeMultiset::empty().to_string(), "{}");
        assert_eq!(TypeMultiset::parse("{}").unwrap(), TypeMultiset::empty());
    }
}
