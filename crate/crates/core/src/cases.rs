//! Candidate ingestion: the case-file format, the bundled dataset, completion
//! of partial point-count rows into full Weil-polynomial pairs, and expansion
//! of resolved candidates into the group-case grid.
//!
//! Case files are line oriented. The first non-comment line is the header
//! `prymsieve-cases v1`. Each following line is either
//!
//! ```text
//! row label=<id> d=<d> g=<g> g'=<g'> [jc2=<n>] [jc4=<n>] [C=<counts>] [C'=<counts>]
//! control label=<id> d=<d> g=<g> g'=<g'> C=<counts> C'=<counts>
//! ```
//!
//! where counts are comma separated with `*` for an omitted entry. `row`
//! candidates are completed against the relative-class-number-one constraint
//! and expanded into the group grid; `control` rows carry explicit profiles,
//! get no group restrictions, and serve as positive controls for the sieve.
//! The reserved path token `builtin:table2` loads the bundled dataset.

use crate::cover::{grid_for_degree, GroupCase, ResolventKind};
use crate::sieve::{CaseInstance, StaticFlags};
use crate::weil::{
    enumerate_real_weil, expand_real_weil, group_order, point_counts, PointCountProfile,
    RealWeilPolynomial, ValueFilters,
};
use num_traits::ToPrimitive;
use thiserror::Error;

/// Reserved token accepted in place of a file path.
pub const BUILTIN_TOKEN: &str = "builtin:table2";

/// The bundled dataset, embedded verbatim.
pub const BUILTIN_DATASET: &str = include_str!("../data/table2.cases");

const HEADER: &str = "prymsieve-cases v1";

/// Completion and sieving horizon.
pub const DEPTH: usize = 7;

/// Genus triples `(d, g, g')` that may appear in a case file.
pub const TRIPLES: &[(u8, usize, usize)] = &[
    (2, 2, 3),
    (2, 2, 4),
    (2, 2, 5),
    (2, 3, 5),
    (2, 3, 6),
    (2, 4, 7),
    (2, 4, 8),
    (2, 5, 9),
    (2, 6, 11),
    (2, 7, 13),
    (3, 2, 4),
    (3, 2, 6),
    (3, 3, 7),
    (3, 4, 10),
    (4, 2, 5),
    (4, 2, 6),
    (4, 3, 9),
    (5, 2, 6),
    (6, 2, 7),
    (7, 2, 8),
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CaseFileError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing or unsupported header; expected `{HEADER}`")]
    BadHeader,
    #[error("row {label}: {msg}")]
    Invalid { label: String, msg: String },
}

#[derive(Debug, Error)]
pub enum CompletionError {
    #[error("row {label}: the Prym would have genus 0 (g' = g)")]
    DegeneratePrym { label: String },
    #[error("row {label}: no completion matches the row's constraints")]
    Unresolvable { label: String },
    #[error("weil error: {0}")]
    Weil(#[from] crate::weil::WeilError),
}

/// One dataset row: partial point counts for a candidate pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateRow {
    pub label: String,
    pub d: u8,
    pub g: usize,
    pub g_prime: usize,
    pub counts_c: Vec<Option<i64>>,
    pub counts_cprime: Vec<Option<i64>>,
    pub jac_c_f2: Option<i64>,
    pub jac_c_f4: Option<i64>,
    /// Control rows bypass completion and group restrictions.
    pub control: bool,
}

impl CandidateRow {
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        s.push_str(if self.control { "control" } else { "row" });
        s.push_str(&format!(" label={}", self.label));
        s.push_str(&format!(" d={} g={} g'={}", self.d, self.g, self.g_prime));
        if let Some(j) = self.jac_c_f2 {
            s.push_str(&format!(" jc2={j}"));
        }
        if let Some(j) = self.jac_c_f4 {
            s.push_str(&format!(" jc4={j}"));
        }
        if !self.counts_c.is_empty() {
            s.push_str(&format!(" C={}", counts_to_string(&self.counts_c)));
        }
        if !self.counts_cprime.is_empty() {
            s.push_str(&format!(" C'={}", counts_to_string(&self.counts_cprime)));
        }
        s
    }

    /// Is the cover forced etale by the genus relation `g' = d(g-1) + 1`?
    pub fn etale(&self) -> bool {
        self.g_prime == self.d as usize * (self.g - 1) + 1
    }
}

fn counts_to_string(counts: &[Option<i64>]) -> String {
    counts
        .iter()
        .map(|c| match c {
            Some(v) => v.to_string(),
            None => "*".to_string(),
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_counts(s: &str) -> Result<Vec<Option<i64>>, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            if t == "*" {
                Ok(None)
            } else {
                t.parse::<i64>()
                    .map(Some)
                    .map_err(|_| format!("bad count entry `{t}`"))
            }
        })
        .collect()
}

/// Serialize a list of rows in the canonical file layout.
pub fn serialize_cases(rows: &[CandidateRow]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.serialize());
        out.push('\n');
    }
    out
}

/// Parse a case file from its text.
pub fn parse_cases(text: &str) -> Result<Vec<CandidateRow>, CaseFileError> {
    let mut rows = Vec::new();
    let mut header_seen = false;
    let mut anon = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != HEADER {
                return Err(CaseFileError::BadHeader);
            }
            header_seen = true;
            continue;
        }
        let err = |msg: String| CaseFileError::Parse { line: line_no, msg };
        let mut tokens = line.split_whitespace();
        let kind = tokens.next().unwrap();
        let control = match kind {
            "row" => false,
            "control" => true,
            other => return Err(err(format!("unknown record kind `{other}`"))),
        };
        let mut row = CandidateRow {
            label: String::new(),
            d: 0,
            g: 0,
            g_prime: 0,
            counts_c: Vec::new(),
            counts_cprime: Vec::new(),
            jac_c_f2: None,
            jac_c_f4: None,
            control,
        };
        for tok in tokens {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got `{tok}`")))?;
            match key {
                "label" => row.label = value.to_string(),
                "d" => row.d = value.parse().map_err(|_| err("bad d".into()))?,
                "g" => row.g = value.parse().map_err(|_| err("bad g".into()))?,
                "g'" => row.g_prime = value.parse().map_err(|_| err("bad g'".into()))?,
                "jc2" => row.jac_c_f2 = Some(value.parse().map_err(|_| err("bad jc2".into()))?),
                "jc4" => row.jac_c_f4 = Some(value.parse().map_err(|_| err("bad jc4".into()))?),
                "C" => row.counts_c = parse_counts(value).map_err(|m| err(m))?,
                "C'" => row.counts_cprime = parse_counts(value).map_err(|m| err(m))?,
                other => return Err(err(format!("unknown field `{other}`"))),
            }
        }
        if row.label.is_empty() {
            anon += 1;
            row.label = format!("row{anon:03}");
        }
        validate_row(&row)?;
        rows.push(row);
    }
    if !header_seen {
        return Err(CaseFileError::BadHeader);
    }
    Ok(rows)
}

fn validate_row(row: &CandidateRow) -> Result<(), CaseFileError> {
    let fail = |msg: String| CaseFileError::Invalid {
        label: row.label.clone(),
        msg,
    };
    if !row.control && !TRIPLES.contains(&(row.d, row.g, row.g_prime)) {
        return Err(fail(format!(
            "triple (d, g, g') = ({}, {}, {}) is not in the classification",
            row.d, row.g, row.g_prime
        )));
    }
    if row.counts_c.len() > DEPTH || row.counts_cprime.len() > DEPTH {
        return Err(fail("counts longer than the search depth".into()));
    }
    for (name, counts) in [("C", &row.counts_c), ("C'", &row.counts_cprime)] {
        if counts.iter().flatten().any(|&v| v < 0) {
            return Err(fail(format!("negative point count in {name}")));
        }
        let profile = PointCountProfile {
            q: 2,
            genus: 0,
            counts: counts.clone(),
        };
        if let Err(e) = profile.place_counts() {
            return Err(fail(format!("{name}: {e}")));
        }
    }
    Ok(())
}

/// Load a case file from a path or the reserved builtin token.
pub fn load_cases(path: &str) -> Result<Vec<CandidateRow>, CaseFileError> {
    if path == BUILTIN_TOKEN {
        return parse_cases(BUILTIN_DATASET);
    }
    let text = std::fs::read_to_string(path).map_err(|e| CaseFileError::Parse {
        line: 0,
        msg: format!("cannot read `{path}`: {e}"),
    })?;
    parse_cases(&text)
}

/// A row completed into an explicit pair of real Weil polynomials with full
/// depth-7 profiles.
#[derive(Clone, Debug)]
pub struct ResolvedCandidate {
    pub row: CandidateRow,
    /// Index among the row's resolutions, 1-based, in output order.
    pub index: usize,
    pub h_c: RealWeilPolynomial,
    pub h_a: RealWeilPolynomial,
    pub profile_c: PointCountProfile,
    pub profile_cprime: PointCountProfile,
}

impl ResolvedCandidate {
    pub fn jc2(&self) -> i64 {
        group_order(&self.h_c, 1).to_i64().expect("small order")
    }

    pub fn jc4(&self) -> i64 {
        group_order(&self.h_c, 2).to_i64().expect("small order")
    }
}

/// Leading prefix of concrete entries, as prescribed eigenvalue power sums
/// `p_n = q^n + 1 - N_n`.
fn prescribed_sums(counts: &[Option<i64>]) -> Vec<i64> {
    let mut out = Vec::new();
    for (i, c) in counts.iter().enumerate() {
        match c {
            Some(v) => out.push(2i64.pow(i as u32 + 1) + 1 - v),
            None => break,
        }
    }
    out
}

/// Does the degree-place inequality (or its stated exceptional pattern) hold?
///
/// The inequality reads `a_1(F) > sum_{i <= (d-1)/2} a_i(F') + a_{d/2}(F')/2`;
/// the one admissible exception is `d = 5` with `a_1(F) = 5` and
/// `(a_1, a_2, a_3)(F') = (0, 5, 0)`.
pub fn place_inequality_holds(
    d: u8,
    a_f: &[i64],
    a_fprime: &[i64],
) -> bool {
    let half = (d as usize - 1) / 2;
    let mut rhs2: i64 = 0; // twice the right-hand side, to stay integral
    for i in 1..=half {
        rhs2 += 2 * a_fprime[i - 1];
    }
    if d % 2 == 0 {
        rhs2 += a_fprime[d as usize / 2 - 1];
    }
    if 2 * a_f[0] > rhs2 {
        return true;
    }
    d == 5 && a_f[0] == 5 && a_fprime[0] == 0 && a_fprime[1] == 5 && a_fprime[2] == 0
}

/// Complete a row into all pairs `(h_C, h_A)` consistent with it.
///
/// `h_C` must match the row's concrete counts and Jacobian orders; `h_A` must
/// have `#A(F_2) = 1` (trivial relative class group) and make every concrete
/// entry of the `C'` counts, all place counts to depth 7, and the degree-place
/// inequality hold. Output is ordered by the coefficient vectors.
pub fn complete_candidate(
    row: &CandidateRow,
) -> Result<Vec<ResolvedCandidate>, CompletionError> {
    let g_a = row
        .g_prime
        .checked_sub(row.g)
        .filter(|&v| v > 0)
        .ok_or_else(|| CompletionError::DegeneratePrym {
            label: row.label.clone(),
        })?;
    let mut filters_c = ValueFilters::default();
    if let Some(j) = row.jac_c_f2 {
        filters_c.order_exact.push((1, j));
    }
    if let Some(j) = row.jac_c_f4 {
        filters_c.order_exact.push((2, j));
    }
    let presc_c = prescribed_sums(&row.counts_c);
    let hc_list = enumerate_real_weil(row.g, 2, &presc_c, &filters_c)?.polys;
    let filters_a = ValueFilters {
        order_exact: vec![(1, 1)],
        ..Default::default()
    };
    let mut out = Vec::new();
    let mut ha_cache: std::collections::HashMap<Vec<i64>, Vec<RealWeilPolynomial>> =
        Default::default();
    for h_c in hc_list {
        let Ok(profile_c) = point_counts(&h_c, DEPTH) else {
            continue;
        };
        if !matches_concrete(&profile_c, &row.counts_c) {
            continue;
        }
        let Ok(a_c) = profile_c.place_counts() else {
            continue;
        };
        let a_c: Vec<i64> = a_c.into_iter().map(|v| v.unwrap()).collect();
        let p_c = expand_real_weil(&h_c).power_sums_to(DEPTH);
        let p_c: Vec<i64> = p_c.iter().map(|v| v.to_i64().unwrap()).collect();
        // Prescribe the Prym's traces from the leading concrete C' entries.
        let mut presc_a = Vec::new();
        for (i, c) in row.counts_cprime.iter().enumerate() {
            match c {
                Some(v) => presc_a.push(2i64.pow(i as u32 + 1) + 1 - v - p_c[i]),
                None => break,
            }
        }
        let ha_list = match ha_cache.entry(presc_a.clone()) {
            std::collections::hash_map::Entry::Occupied(e) => e.get().clone(),
            std::collections::hash_map::Entry::Vacant(e) => {
                let list = enumerate_real_weil(g_a, 2, &presc_a, &filters_a)?.polys;
                e.insert(list.clone());
                list
            }
        };
        for h_a in ha_list {
            let p_a = expand_real_weil(&h_a).power_sums_to(DEPTH);
            let counts_cp: Vec<Option<i64>> = (0..DEPTH)
                .map(|i| {
                    Some(2i64.pow(i as u32 + 1) + 1 - p_c[i] - p_a[i].to_i64().unwrap())
                })
                .collect();
            if counts_cp.iter().flatten().any(|&v| v < 0) {
                continue;
            }
            let profile_cprime = PointCountProfile {
                q: 2,
                genus: row.g_prime,
                counts: counts_cp,
            };
            if !matches_concrete(&profile_cprime, &row.counts_cprime) {
                continue;
            }
            let Ok(a_cp) = profile_cprime.place_counts() else {
                continue;
            };
            let a_cp: Vec<i64> = a_cp.into_iter().map(|v| v.unwrap()).collect();
            if !place_inequality_holds(row.d, &a_c, &a_cp) {
                continue;
            }
            out.push(ResolvedCandidate {
                row: row.clone(),
                index: 0,
                h_c: h_c.clone(),
                h_a,
                profile_c: profile_c.clone(),
                profile_cprime,
            });
        }
    }
    if out.is_empty() {
        return Err(CompletionError::Unresolvable {
            label: row.label.clone(),
        });
    }
    for (i, r) in out.iter_mut().enumerate() {
        r.index = i + 1;
    }
    Ok(out)
}

fn matches_concrete(profile: &PointCountProfile, expected: &[Option<i64>]) -> bool {
    expected.iter().enumerate().all(|(i, e)| match e {
        None => true,
        Some(v) => profile.counts.get(i).copied().flatten() == Some(*v),
    })
}

/// Expand resolved candidates into sieve instances, one per applicable
/// `(G, G0)` grid entry. Rows whose genus pair is not etale produce no
/// instances (those covers are ramified and handled outside this search), and
/// no grid entry exists for `d = 7`.
pub fn expand_to_grid(resolved: &[ResolvedCandidate]) -> Vec<CaseInstance> {
    let mut out = Vec::new();
    for cand in resolved {
        if !cand.row.etale() {
            continue;
        }
        let jc2 = cand.jc2();
        let jc4 = cand.jc4();
        let n1 = cand.profile_c.counts[0].unwrap();
        let n2 = cand.profile_c.counts[1].unwrap();
        let pm2 = cand.row.g == 2 && ((n1, n2) == (2, 8) || (n1, n2) == (4, 8));
        for case in grid_for_degree(cand.row.d) {
            let geometric = case.resolvent == ResolventKind::Geometric;
            let flags = StaticFlags {
                jc2_even: geometric,
                jc4_mod3: case.d == 4 && case.resolvent == ResolventKind::Constant,
                b_order_mod3: case.d == 4 && geometric,
                b_trace_pm2: pm2,
            };
            let id = format!("{}#{}:{}", cand.row.label, cand.index, case.id);
            let inst = CaseInstance::new(
                id,
                case.clone(),
                cand.row.g,
                cand.row.g_prime,
                &cand.profile_c,
                &cand.profile_cprime,
                jc2,
                jc4,
                flags,
            )
            .expect("resolved profiles are concrete and consistent");
            out.push(inst);
        }
    }
    out
}

/// Build the sieve instance for a control row.
pub fn control_instance(row: &CandidateRow) -> Result<CaseInstance, CaseFileError> {
    let fail = |msg: &str| CaseFileError::Invalid {
        label: row.label.clone(),
        msg: msg.to_string(),
    };
    if !row.control {
        return Err(fail("not a control row"));
    }
    let profile_c = PointCountProfile {
        q: 2,
        genus: row.g,
        counts: row.counts_c.clone(),
    };
    let profile_cp = PointCountProfile {
        q: 2,
        genus: row.g_prime,
        counts: row.counts_cprime.clone(),
    };
    CaseInstance::new(
        format!("{}:control", row.label),
        GroupCase::unrestricted(row.d),
        row.g,
        row.g_prime,
        &profile_c,
        &profile_cp,
        1,
        1,
        StaticFlags::default(),
    )
    .map_err(|e| fail(&e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_serialize_roundtrip() {
        let text = "prymsieve-cases v1\n# comment\nrow label=a d=4 g=2 g'=5 C'=1,*,1\nrow label=b d=3 g=2 g'=4 jc2=13\n";
        let rows = parse_cases(text).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].counts_cprime, vec![Some(1), None, Some(1)]);
        let round = serialize_cases(&rows);
        assert_eq!(parse_cases(&round).unwrap(), rows);
    }

    #[test]
    fn parse_errors_are_located() {
        assert_eq!(parse_cases("nonsense\n"), Err(CaseFileError::BadHeader));
        let bad = "prymsieve-cases v1\nrow label=x d=3 g=2 g'=4 C=a\n";
        match parse_cases(bad) {
            Err(CaseFileError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let bad_triple = "prymsieve-cases v1\nrow label=x d=3 g=2 g'=5\n";
        assert!(matches!(
            parse_cases(bad_triple),
            Err(CaseFileError::Invalid { .. })
        ));
        // Empty file (header only) is an empty list.
        assert_eq!(parse_cases("prymsieve-cases v1\n").unwrap(), vec![]);
    }

    #[test]
    fn builtin_dataset_loads() {
        let rows = load_cases(BUILTIN_TOKEN).unwrap();
        assert_eq!(rows.len(), 44);
        assert!(rows.iter().all(|r| !r.control));
        let d7: Vec<_> = rows.iter().filter(|r| r.d == 7).collect();
        assert_eq!(d7.len(), 1);
        assert_eq!(d7[0].counts_c, vec![Some(5), Some(7)]);
        assert_eq!(d7[0].jac_c_f2, Some(14));
        assert_eq!(
            d7[0].counts_cprime,
            [0, 0, 0, 0, 0, 84, 133].map(Some).to_vec()
        );
    }

    #[test]
    fn degenerate_prym_rejected() {
        let row = CandidateRow {
            label: "x".into(),
            d: 3,
            g: 2,
            g_prime: 2,
            counts_c: vec![],
            counts_cprime: vec![],
            jac_c_f2: None,
            jac_c_f4: None,
            control: false,
        };
        assert!(matches!(
            complete_candidate(&row),
            Err(CompletionError::DegeneratePrym { .. })
        ));
    }

    #[test]
    fn degree7_row_completion_is_pinned() {
        let rows = load_cases(BUILTIN_TOKEN).unwrap();
        let row = rows.iter().find(|r| r.d == 7).unwrap();
        let resolved = complete_candidate(row).unwrap();
        assert_eq!(resolved.len(), 1);
        assert_eq!(resolved[0].h_c.coefficients_i64(), vec![1, 2, -1]);
        assert_eq!(
            resolved[0].h_a.coefficients_i64(),
            vec![1, -5, -3, 43, -33, -59, 43]
        );
        assert_eq!(group_order(&resolved[0].h_a, 1), crate::Int::from(1));
        // No grid entry for d = 7.
        assert!(expand_to_grid(&resolved).is_empty());
    }

    #[test]
    fn grid_expansion_counts() {
        let mk = |d: u8, g: usize, gp: usize, c: &[i64], cp: &[i64], jc2: Option<i64>| {
            CandidateRow {
                label: format!("t{d}"),
                d,
                g,
                g_prime: gp,
                counts_c: c.iter().map(|&v| Some(v)).collect(),
                counts_cprime: cp.iter().map(|&v| Some(v)).collect(),
                jac_c_f2: jc2,
                jac_c_f4: None,
                control: false,
            }
        };
        let d5 = complete_candidate(&mk(5, 2, 6, &[4, 8, 10], &[0, 0, 15], None)).unwrap();
        let per = expand_to_grid(&d5[..1].to_vec()).len();
        assert_eq!(per, 1, "degree 5 expands to the single A5 case");
        let d6 = complete_candidate(&mk(6, 2, 7, &[5, 7, 11, 15, 15], &[0, 2, 6, 10, 5], None))
            .unwrap();
        assert_eq!(expand_to_grid(&d6[..1].to_vec()).len(), 4);
        let d3 = complete_candidate(&mk(3, 2, 4, &[3], &[0], None)).unwrap();
        assert_eq!(expand_to_grid(&d3[..1].to_vec()).len(), 1);
    }

    #[test]
    fn ramified_rows_resolve_but_emit_no_instances() {
        let rows = load_cases(BUILTIN_TOKEN).unwrap();
        let ramified: Vec<_> = rows.iter().filter(|r| !r.etale()).collect();
        assert_eq!(ramified.len(), 4, "three d=3 (2,6) rows and one d=4 (2,6)");
        for row in ramified {
            let resolved = complete_candidate(row).unwrap();
            assert!(!resolved.is_empty());
            assert!(expand_to_grid(&resolved).is_empty());
        }
    }

    #[test]
    fn completion_matches_wildcard_rows() {
        let rows = load_cases(BUILTIN_TOKEN).unwrap();
        let wild = rows
            .iter()
            .find(|r| r.counts_cprime.contains(&None))
            .unwrap();
        let resolved = complete_candidate(wild).unwrap();
        for cand in &resolved {
            for (i, e) in wild.counts_cprime.iter().enumerate() {
                if let Some(v) = e {
                    assert_eq!(cand.profile_cprime.counts[i], Some(*v));
                }
            }
            assert_eq!(group_order(&cand.h_a, 1), crate::Int::from(1));
        }
    }
}
