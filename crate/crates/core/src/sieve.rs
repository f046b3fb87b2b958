//! Depth-limited backtracking search over splitting sequences.
//!
//! A case instance fixes the candidate point counts of the base curve and the
//! cover together with a group configuration. The search runs degree by
//! degree: `extend` lists the multisets of admissible types matching the place
//! counts, `prune` derives the trace prefixes of the isogeny factors and cuts
//! any branch whose traces admit no real Weil polynomial. Static checks on the
//! Jacobian order run once, before the search.
//!
//! Weil-existence queries are memoized in a concurrent map keyed by the exact
//! inputs; values are idempotent, so racing writers are harmless.

use crate::cover::{
    derived_traces, FactorTraces, GroupCase, SplittingSequence, SplittingType, TypeMultiset,
};
use crate::weil::{exists_real_weil, PointCountProfile, ValueFilters};
use dashmap::DashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SieveError {
    #[error("base-curve profile must be concrete to depth {0}")]
    ProfileTooShort(usize),
    #[error("profile error: {0}")]
    Profile(#[from] crate::weil::ProfileError),
    #[error("cover error: {0}")]
    Cover(#[from] crate::cover::CoverError),
}

/// Which static restrictions apply to an instance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StaticFlags {
    /// Require `#J(C)(F_2)` even (unramified quadratic subcover via class
    /// field theory).
    pub jc2_even: bool,
    /// Require `#J(C)(F_4) = 0 mod 3` (cyclic cubic cover of the constant
    /// quadratic extension).
    pub jc4_mod3: bool,
    /// Filter the B enumeration by `#J(C)(F_2) * #B(F_2) = 0 mod 3` (cyclic
    /// cubic cover of the geometric quadratic resolvent).
    pub b_order_mod3: bool,
    /// Filter the B enumeration by `T_{B,2}` in `{-2, 2}` (the two genus-2
    /// curves with counts (2,8) and (4,8) force an extreme elliptic trace).
    pub b_trace_pm2: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StaticFailure {
    JacobianOrderOdd { jc2: i64 },
    JacobianOrderNotDivisibleBy3 { jc4: i64 },
}

impl std::fmt::Display for StaticFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StaticFailure::JacobianOrderOdd { jc2 } => write!(
                f,
                "#J(C)(F_2) = {jc2} is odd; an unramified quadratic subcover forces it even"
            ),
            StaticFailure::JacobianOrderNotDivisibleBy3 { jc4 } => write!(
                f,
                "#J(C)(F_4) = {jc4} is not divisible by 3; a cyclic cubic etale cover over F_4 forces it"
            ),
        }
    }
}

/// One candidate pair under one group configuration, ready to sieve.
#[derive(Clone, Debug)]
pub struct CaseInstance {
    pub id: String,
    pub case: GroupCase,
    pub g: usize,
    pub g_prime: usize,
    /// `N_n(C)`, concrete to the search horizon.
    pub c_counts: Vec<i64>,
    /// `N_n(C')`; `None` entries are unconstrained.
    pub cprime_counts: Vec<Option<i64>>,
    /// `a_n(F)`.
    pub c_places: Vec<i64>,
    /// `a_n(F')`; `None` where not determined.
    pub cprime_places: Vec<Option<i64>>,
    pub jc2: i64,
    pub jc4: i64,
    pub flags: StaticFlags,
}

impl CaseInstance {
    pub fn new(
        id: String,
        case: GroupCase,
        g: usize,
        g_prime: usize,
        c_profile: &PointCountProfile,
        cprime_profile: &PointCountProfile,
        jc2: i64,
        jc4: i64,
        flags: StaticFlags,
    ) -> Result<Self, SieveError> {
        let c_places_opt = c_profile.place_counts()?;
        let c_counts: Vec<i64> = c_profile.counts.iter().map(|c| c.unwrap_or(-1)).collect();
        let c_places: Vec<i64> = c_places_opt.iter().map(|c| c.unwrap_or(-1)).collect();
        let cprime_places = cprime_profile.place_counts()?;
        Ok(CaseInstance {
            id,
            case,
            g,
            g_prime,
            c_counts,
            cprime_counts: cprime_profile.counts.clone(),
            c_places,
            cprime_places,
            jc2,
            jc4,
            flags,
        })
    }

    fn concrete_to(&self, depth: usize) -> bool {
        self.c_counts.len() >= depth
            && self.c_places.len() >= depth
            && self.c_counts[..depth].iter().all(|&v| v >= 0)
            && self.c_places[..depth].iter().all(|&v| v >= 0)
    }
}

/// Evaluate the static restrictions.
pub fn static_checks(inst: &CaseInstance) -> Result<(), StaticFailure> {
    if inst.flags.jc2_even && inst.jc2 % 2 != 0 {
        return Err(StaticFailure::JacobianOrderOdd { jc2: inst.jc2 });
    }
    if inst.flags.jc4_mod3 && inst.jc4 % 3 != 0 {
        return Err(StaticFailure::JacobianOrderNotDivisibleBy3 { jc4: inst.jc4 });
    }
    Ok(())
}

/// Contributions to `a_m(F')` already forced by the prefix (degrees `k | m`
/// with `k <= prefix.len()`).
fn prior_places(prefix: &[TypeMultiset], m: usize) -> i64 {
    let mut total = 0i64;
    for (k, term) in prefix.iter().enumerate() {
        let k = k + 1;
        if m % k != 0 {
            continue;
        }
        let part = (m / k) as u8;
        for (t, c) in term.entries() {
            total += t.count_of(part) as i64 * *c as i64;
        }
    }
    total
}

/// All admissible `n`-th terms: multisets of `a_n(F)` admissible types whose
/// singleton count matches the residual `a_n(F')`.
///
/// Only the place counts fully determined by degrees `<= n` are enforced here;
/// a term whose larger parts overshoot a deeper place count dies when the
/// search reaches that degree, keeping the per-depth frontier aligned with the
/// hand analysis of each case.
pub fn extend(
    inst: &CaseInstance,
    prefix: &[TypeMultiset],
    n: usize,
    castelnuovo_severi: bool,
) -> Vec<TypeMultiset> {
    let size = inst.c_places[n - 1];
    debug_assert!(size >= 0);
    // Residual singleton requirement from a_n(F').
    let residual = match inst.cprime_places.get(n - 1).copied().flatten() {
        Some(total) => {
            let r = total - prior_places(prefix, n);
            if r < 0 {
                return Vec::new();
            }
            Some(r)
        }
        None => None,
    };
    let cs_active = castelnuovo_severi
        && num_integer::Integer::gcd(&inst.jc2, &(inst.case.d as i64)) == 1;
    let types: Vec<&SplittingType> = inst
        .case
        .admissible_at(n)
        .into_iter()
        .filter(|t| {
            if !cs_active {
                return true;
            }
            // A pulled-back divisor class argument: a degree-1 place lifts to
            // at most one degree-1 place; a degree-3 place lifting to four or
            // more degree-3 places forces a low-genus contradiction.
            match n {
                1 => t.singles() <= 1,
                3 => t.singles() <= 3,
                _ => true,
            }
        })
        .collect();
    let cs_pair_rule = cs_active && n == 3 && inst.g_prime > 4;

    // Suffix extrema of the singleton counts, for feasibility pruning.
    let k = types.len();
    let mut min_s = vec![u32::MAX; k + 1];
    let mut max_s = vec![0u32; k + 1];
    min_s[k] = u32::MAX;
    for i in (0..k).rev() {
        min_s[i] = min_s[i + 1].min(types[i].singles());
        max_s[i] = max_s[i + 1].max(types[i].singles());
    }

    let mut out = Vec::new();
    let mut chosen: Vec<(SplittingType, u32)> = Vec::new();
    rec_extend(
        &types,
        0,
        size as u32,
        residual,
        &min_s,
        &max_s,
        cs_pair_rule,
        0,
        &mut chosen,
        &mut out,
    );
    out
}

#[allow(clippy::too_many_arguments)]
fn rec_extend(
    types: &[&SplittingType],
    idx: usize,
    remaining: u32,
    residual_singles: Option<i64>,
    min_s: &[u32],
    max_s: &[u32],
    cs_pair_rule: bool,
    cs_heavy: u32,
    chosen: &mut Vec<(SplittingType, u32)>,
    out: &mut Vec<TypeMultiset>,
) {
    if remaining == 0 {
        if residual_singles.map_or(true, |r| r == 0) {
            out.push(TypeMultiset::new(chosen.clone()));
        }
        return;
    }
    if idx >= types.len() {
        return;
    }
    // Feasibility: the singles requirement must stay reachable.
    if let Some(r) = residual_singles {
        let lo = if min_s[idx] == u32::MAX {
            0
        } else {
            remaining as i64 * min_s[idx] as i64
        };
        let hi = remaining as i64 * max_s[idx] as i64;
        if r < lo || r > hi {
            return;
        }
    }
    let t = types[idx];
    let singles = t.singles() as i64;
    let mut max_count = remaining;
    if let Some(r) = residual_singles {
        if singles > 0 {
            max_count = max_count.min((r / singles) as u32);
        }
    }
    if cs_pair_rule && t.singles() >= 2 {
        max_count = max_count.min(1u32.saturating_sub(cs_heavy));
    }
    let mut count = max_count;
    loop {
        if count > 0 {
            chosen.push((t.clone(), count));
        }
        let heavy = cs_heavy + if t.singles() >= 2 { count } else { 0 };
        rec_extend(
            types,
            idx + 1,
            remaining - count,
            residual_singles.map(|r| r - singles * count as i64),
            min_s,
            max_s,
            cs_pair_rule,
            heavy,
            chosen,
            out,
        );
        if count > 0 {
            chosen.pop();
        }
        if count == 0 {
            break;
        }
        count -= 1;
    }
}

/// Memoized Weil-existence oracle shared across cases. Last write wins; the
/// cached value is a pure function of the key, so races are benign.
#[derive(Default)]
pub struct WeilCache {
    map: DashMap<(usize, u64, Vec<i64>, ValueFilters), bool>,
}

impl WeilCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn exists(&self, genus: usize, q: u64, sums: &[i64], filters: &ValueFilters) -> bool {
        let key = (genus, q, sums.to_vec(), filters.clone());
        if let Some(v) = self.map.get(&key) {
            return *v;
        }
        let v = exists_real_weil(genus, q, sums, filters)
            .map(|e| e.found())
            .unwrap_or(false);
        self.map.insert(key, v);
        v
    }
}

#[derive(Clone, Debug)]
pub enum PruneOutcome {
    Keep(Vec<FactorTraces>),
    Cut {
        traces: Vec<FactorTraces>,
        factor: String,
        dim: usize,
    },
}

/// Derive the factor traces for a prefix and test each against the Weil
/// existence oracle, with the instance's B-specific filters applied.
pub fn prune(
    inst: &CaseInstance,
    prefix: &[TypeMultiset],
    cache: &WeilCache,
) -> Result<PruneOutcome, SieveError> {
    let traces = derived_traces(
        &inst.case,
        prefix,
        inst.g,
        &inst.c_counts,
        &inst.cprime_counts,
    )?;
    for factor in &traces {
        let mut filters = ValueFilters::default();
        if factor.name == "B" {
            if inst.flags.b_trace_pm2 {
                filters.trace_in.push((1, vec![-2, 2]));
            }
            if inst.flags.b_order_mod3 && inst.jc2 % 3 != 0 {
                filters.order_divisible.push((1, 3));
            }
        }
        if !cache.exists(factor.dim, 2, &factor.traces, &filters) {
            return Ok(PruneOutcome::Cut {
                factor: factor.name.clone(),
                dim: factor.dim,
                traces,
            });
        }
    }
    Ok(PruneOutcome::Keep(traces))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Eliminated,
    Survived,
}

#[derive(Clone, Debug)]
pub struct FrontierEntry {
    pub prefix: SplittingSequence,
    pub traces: Vec<FactorTraces>,
}

#[derive(Clone, Debug, Default)]
pub struct DepthFrontier {
    pub entries: Vec<FrontierEntry>,
    pub total: u64,
}

#[derive(Clone, Debug)]
pub struct CutStats {
    pub depth: usize,
    pub label: String,
    pub count: u64,
    pub exemplars: Vec<FrontierEntry>,
}

#[derive(Clone, Debug)]
pub struct SieveReport {
    pub instance_id: String,
    pub outcome: Outcome,
    pub static_failure: Option<StaticFailure>,
    pub depth: usize,
    /// Longest prefix length that survived extension and pruning.
    pub max_depth_reached: usize,
    /// Surviving prefixes per depth `1..=depth` (entry lists are capped).
    pub frontiers: Vec<DepthFrontier>,
    pub cuts: Vec<CutStats>,
    pub survivors: Vec<FrontierEntry>,
    pub survivor_total: u64,
}

impl SieveReport {
    pub fn eliminated(&self) -> bool {
        self.outcome == Outcome::Eliminated
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SieveOptions {
    pub depth: usize,
    pub castelnuovo_severi: bool,
    pub frontier_cap: usize,
    pub exemplar_cap: usize,
    pub survivor_cap: usize,
}

impl Default for SieveOptions {
    fn default() -> Self {
        SieveOptions {
            depth: 7,
            castelnuovo_severi: false,
            frontier_cap: 64,
            exemplar_cap: 8,
            survivor_cap: 16,
        }
    }
}

struct Acc<'a> {
    opts: &'a SieveOptions,
    frontiers: Vec<DepthFrontier>,
    cuts: std::collections::BTreeMap<(usize, String), (u64, Vec<FrontierEntry>)>,
    survivors: Vec<FrontierEntry>,
    survivor_total: u64,
}

impl Acc<'_> {
    fn cut(&mut self, depth: usize, label: String, prefix: &[TypeMultiset], traces: Vec<FactorTraces>) {
        let slot = self.cuts.entry((depth, label)).or_default();
        slot.0 += 1;
        if slot.1.len() < self.opts.exemplar_cap {
            slot.1.push(FrontierEntry {
                prefix: SplittingSequence {
                    terms: prefix.to_vec(),
                },
                traces,
            });
        }
    }

    fn frontier(&mut self, depth: usize, prefix: &[TypeMultiset], traces: &[FactorTraces]) {
        let f = &mut self.frontiers[depth - 1];
        f.total += 1;
        if f.entries.len() < self.opts.frontier_cap {
            f.entries.push(FrontierEntry {
                prefix: SplittingSequence {
                    terms: prefix.to_vec(),
                },
                traces: traces.to_vec(),
            });
        }
    }
}

/// Run the depth-limited search for one instance.
pub fn sieve(
    inst: &CaseInstance,
    opts: &SieveOptions,
    cache: &WeilCache,
) -> Result<SieveReport, SieveError> {
    if !inst.concrete_to(opts.depth) {
        return Err(SieveError::ProfileTooShort(opts.depth));
    }
    let mut acc = Acc {
        opts,
        frontiers: vec![DepthFrontier::default(); opts.depth],
        cuts: Default::default(),
        survivors: Vec::new(),
        survivor_total: 0,
    };
    let static_failure = static_checks(inst).err();
    if static_failure.is_none() {
        let mut prefix: Vec<TypeMultiset> = Vec::with_capacity(opts.depth);
        dfs(inst, opts, cache, &mut prefix, 1, &mut acc)?;
    }
    let max_depth_reached = acc
        .frontiers
        .iter()
        .rposition(|f| f.total > 0)
        .map_or(0, |i| i + 1);
    let cuts = acc
        .cuts
        .into_iter()
        .map(|((depth, label), (count, exemplars))| CutStats {
            depth,
            label,
            count,
            exemplars,
        })
        .collect();
    let outcome = if acc.survivor_total == 0 {
        Outcome::Eliminated
    } else {
        Outcome::Survived
    };
    Ok(SieveReport {
        instance_id: inst.id.clone(),
        outcome,
        static_failure,
        depth: opts.depth,
        max_depth_reached,
        frontiers: acc.frontiers,
        cuts,
        survivors: acc.survivors,
        survivor_total: acc.survivor_total,
    })
}

fn dfs(
    inst: &CaseInstance,
    opts: &SieveOptions,
    cache: &WeilCache,
    prefix: &mut Vec<TypeMultiset>,
    n: usize,
    acc: &mut Acc<'_>,
) -> Result<(), SieveError> {
    let exts = extend(inst, prefix, n, opts.castelnuovo_severi);
    if exts.is_empty() {
        acc.cut(
            n,
            "place-count-mismatch".to_string(),
            prefix,
            Vec::new(),
        );
        return Ok(());
    }
    for term in exts {
        prefix.push(term);
        match prune(inst, prefix, cache)? {
            PruneOutcome::Cut {
                traces,
                factor,
                dim,
            } => {
                acc.cut(
                    n,
                    format!("trace-infeasible:{factor}(dim {dim})"),
                    prefix,
                    traces,
                );
            }
            PruneOutcome::Keep(traces) => {
                acc.frontier(n, prefix, &traces);
                if n == opts.depth {
                    acc.survivor_total += 1;
                    if acc.survivors.len() < opts.survivor_cap {
                        acc.survivors.push(FrontierEntry {
                            prefix: SplittingSequence {
                                terms: prefix.clone(),
                            },
                            traces,
                        });
                    }
                } else {
                    dfs(inst, opts, cache, prefix, n + 1, acc)?;
                }
            }
        }
        prefix.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{grid_case, partitions};

    fn profile(counts: &[i64]) -> PointCountProfile {
        PointCountProfile {
            q: 2,
            genus: 0,
            counts: counts.iter().map(|&c| Some(c)).collect(),
        }
    }

    fn profile_opt(counts: &[Option<i64>]) -> PointCountProfile {
        PointCountProfile {
            q: 2,
            genus: 0,
            counts: counts.to_vec(),
        }
    }

    fn a5_instance(c: &[i64], cp: &[i64], jc2: i64) -> CaseInstance {
        CaseInstance::new(
            "test".into(),
            grid_case("a5").unwrap().clone(),
            2,
            6,
            &profile(c),
            &profile(cp),
            jc2,
            0,
            StaticFlags::default(),
        )
        .unwrap()
    }

    #[test]
    fn static_check_fixtures() {
        let mut inst = a5_instance(&[4], &[0], 11);
        inst.flags.jc4_mod3 = true;
        inst.jc4 = 40;
        assert_eq!(
            static_checks(&inst),
            Err(StaticFailure::JacobianOrderNotDivisibleBy3 { jc4: 40 })
        );
        inst.jc4 = 39;
        assert_eq!(static_checks(&inst), Ok(()));
        inst.flags.jc2_even = true;
        inst.jc2 = 13;
        assert_eq!(
            static_checks(&inst),
            Err(StaticFailure::JacobianOrderOdd { jc2: 13 })
        );
    }

    #[test]
    fn extend_unique_term_degree5() {
        // Counts (4,8,10; 0,0,15): the only degree-1 term is {5 (x4)}.
        let inst = a5_instance(&[4, 8, 10], &[0, 0, 15], 1);
        let terms = extend(&inst, &[], 1, false);
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].to_string(), "{5 (x4)}");
        // Degree 2: {5 (x2)} is forced.
        let prefix = vec![terms[0].clone()];
        let t2 = extend(&inst, &prefix, 2, false);
        assert_eq!(t2.len(), 1);
        assert_eq!(t2[0].to_string(), "{5 (x2)}");
        // Degree 3: {5, 1^5} is forced.
        let prefix = vec![terms[0].clone(), t2[0].clone()];
        let t3 = extend(&inst, &prefix, 3, false);
        assert_eq!(t3.len(), 1);
        assert_eq!(t3[0].to_string(), "{5, 1^5}");
    }

    #[test]
    fn extend_empty_place_count_gives_empty_multiset() {
        // a_3(F) = 0 for counts (5,9,5): the unique extension is {}.
        let inst = a5_instance(&[5, 9, 5], &[0, 10, 0], 15);
        let t1 = extend(&inst, &[], 1, false);
        assert_eq!(t1.len(), 1);
        assert_eq!(t1[0].to_string(), "{5 (x5)}");
        let t2 = extend(&inst, &[t1[0].clone()], 2, false);
        assert_eq!(t2.len(), 1);
        assert_eq!(t2[0].to_string(), "{5, 1^5}");
        let t3 = extend(&inst, &[t1[0].clone(), t2[0].clone()], 3, false);
        assert_eq!(t3.len(), 1);
        assert_eq!(t3[0], TypeMultiset::empty());
    }

    #[test]
    fn prune_cuts_degree5_trace_fixture() {
        // Prefix {5 (x5)}, {5, 1^5}, {} gives B2 traces (-5, -19, -5), which
        // no dimension-6 real Weil polynomial matches.
        let inst = a5_instance(&[5, 9, 5], &[0, 10, 0], 15);
        let prefix = vec![
            TypeMultiset::parse("{5 (x5)}").unwrap(),
            TypeMultiset::parse("{5, 1^5}").unwrap(),
            TypeMultiset::empty(),
        ];
        let cache = WeilCache::new();
        match prune(&inst, &prefix, &cache).unwrap() {
            PruneOutcome::Cut { traces, factor, .. } => {
                assert_eq!(factor, "B2");
                let b2 = traces.iter().find(|f| f.name == "B2").unwrap();
                assert_eq!(b2.traces, vec![-5, -19, -5]);
            }
            PruneOutcome::Keep(_) => panic!("expected a cut"),
        }
    }

    #[test]
    fn zero_trace_prefixes_are_kept() {
        // A single zero trace is always realizable; the pair (0, 0) is
        // realizable in every factor dimension above 1 (e.g. T(T^2-5)^2 for
        // dimension 5) but not in dimension 1, where p_2 = t^2 - 4.
        let cache = WeilCache::new();
        for dim in 1usize..=6 {
            assert!(cache.exists(dim, 2, &[0], &ValueFilters::default()), "dim {dim}");
        }
        for dim in 2usize..=6 {
            assert!(
                cache.exists(dim, 2, &[0, 0], &ValueFilters::default()),
                "dim {dim}"
            );
        }
        assert!(!cache.exists(1, 2, &[0, 0], &ValueFilters::default()));
    }

    #[test]
    fn control_case_survives() {
        // Split-cover control: C' counts are three times the counts of an
        // actual genus-2 curve; the all-1^3 sequence survives to any depth.
        let c = [5, 7, 11, 15, 15, 91, 131];
        let cp: Vec<i64> = c.iter().map(|&v| 3 * v).collect();
        let inst = CaseInstance::new(
            "control".into(),
            GroupCase::unrestricted(3),
            2,
            4,
            &profile(&c),
            &profile(&cp),
            1,
            1,
            StaticFlags::default(),
        )
        .unwrap();
        let report = sieve(&inst, &SieveOptions::default(), &WeilCache::new()).unwrap();
        assert_eq!(report.outcome, Outcome::Survived);
        assert_eq!(report.survivor_total, 1);
        let seq = &report.survivors[0].prefix;
        let ones = partitions(3).pop().unwrap();
        assert!(seq
            .terms
            .iter()
            .all(|t| t.entries().iter().all(|(u, _)| *u == ones)));
    }

    #[test]
    fn wildcard_entries_do_not_constrain() {
        let inst = CaseInstance::new(
            "wild".into(),
            grid_case("a5").unwrap().clone(),
            2,
            6,
            &profile(&[4, 8, 10]),
            &profile_opt(&[Some(0), None, Some(15)]),
            1,
            1,
            StaticFlags::default(),
        )
        .unwrap();
        // With a_2(F') unconstrained, any singles total is allowed in degree 2.
        let prefix = vec![TypeMultiset::parse("{5 (x4)}").unwrap()];
        let t2 = extend(&inst, &prefix, 2, false);
        assert!(t2.len() > 1);
    }

    #[test]
    fn castelnuovo_severi_restricts_types() {
        // Counts (4,10,7; 0,2,15) with #J(C)(F_2) = 11 coprime to 5: with the
        // option on, the degree-3 term {1^5} is excluded.
        let inst = a5_instance(&[4, 10, 7], &[0, 2, 15], 11);
        let prefix = vec![
            TypeMultiset::parse("{5 (x3)}").unwrap(),
            TypeMultiset::parse("{5 (x2), 2^2+1}").unwrap(),
        ];
        let with_off = extend(&inst, &prefix, 3, false);
        assert!(with_off.iter().any(|m| m.to_string() == "{1^5}"));
        let with_on = extend(&inst, &prefix, 3, true);
        assert!(with_on.is_empty());
    }
}
