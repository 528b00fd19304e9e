//! Exhaustive, exact verification of privacy, decodability, and rate.
//!
//! The only randomness in any built-in scheme is the user's permutation
//! profile, drawn uniformly from a finite set of `(L!)^K` profiles. The
//! auditor therefore never samples: it enumerates every profile, tallies
//! each server's view as an exact rational distribution, and demands
//! bit-for-bit equality of those distributions across every pair of
//! indices in the server's privacy set. Decodability is a
//! content-independent rank test run for every target and every profile.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use serde::Serialize;

use crate::algebra::{FieldSpec, LinComb, PermutationProfile, Solution, SymbolRef};
use crate::error::Result;
use crate::model::{MessageId, PrivacySetting, ServerId, StorageGraph};
use crate::schemes::{plan_for, QueryPlan};
use crate::Rational;

/// A planner under audit: anything that turns `(theta, profile)` into a
/// query plan. Built-in settings are audited through [`plan_for`];
/// deliberately broken planners can be audited the same way.
pub trait Planner {
    fn plan(&self, theta: MessageId, profile: &PermutationProfile) -> Result<QueryPlan>;
}

impl<F> Planner for F
where
    F: Fn(MessageId, &PermutationProfile) -> Result<QueryPlan>,
{
    fn plan(&self, theta: MessageId, profile: &PermutationProfile) -> Result<QueryPlan> {
        self(theta, profile)
    }
}

/// The planner for a built-in setting.
pub struct SettingPlanner<'a> {
    pub setting: &'a PrivacySetting,
    pub graph: &'a StorageGraph,
}

impl Planner for SettingPlanner<'_> {
    fn plan(&self, theta: MessageId, profile: &PermutationProfile) -> Result<QueryPlan> {
        plan_for(self.setting, self.graph, theta, profile)
    }
}

/// A server's full received value for one retrieval: the ordered list of
/// combinations it gets, `[]` being the null query.
pub type QueryValue = Vec<LinComb>;

/// Exact distribution of a server's view over the permutation space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryDistribution {
    support: BTreeMap<QueryValue, Rational>,
}

// Serialized as a list of (value, probability) entries; a query value
// is a list, which JSON cannot use as an object key.
impl Serialize for QueryDistribution {
    fn serialize<S>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error>
    where
        S: serde::Serializer,
    {
        serializer.collect_seq(self.support.iter().map(|(value, p)| {
            serde_json::json!({
                "value": value.iter().map(|c| c.render()).collect::<Vec<_>>(),
                "probability": [p.numer(), p.denom()],
            })
        }))
    }
}

impl QueryDistribution {
    pub fn support(&self) -> impl Iterator<Item = (&QueryValue, Rational)> {
        self.support.iter().map(|(v, &p)| (v, p))
    }

    pub fn probability(&self, value: &QueryValue) -> Rational {
        self.support.get(value).copied().unwrap_or_else(|| Ratio::new(0, 1))
    }

    pub fn total(&self) -> Rational {
        self.support.values().sum()
    }
}

/// One indistinguishability failure: a query value whose probability
/// differs between two indices of the same privacy set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrivacyViolation {
    pub server: ServerId,
    pub theta_pair: (MessageId, MessageId),
    pub witness: QueryValue,
    pub probabilities: (Rational, Rational),
}

/// Outcome of a privacy audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrivacyReport {
    pub violations: Vec<PrivacyViolation>,
    /// Number of `(server, theta, theta)` distribution comparisons made.
    pub comparisons: u64,
}

impl PrivacyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A `(theta, profile index)` pair whose plan failed the rank test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodabilityFailure {
    pub theta: MessageId,
    pub profile_index: usize,
    pub unreachable: Vec<SymbolRef>,
}

/// Outcome of a decodability audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodabilityReport {
    pub failures: Vec<DecodabilityFailure>,
    pub checks: u64,
}

impl DecodabilityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Download counts and the exact achieved rate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RateReport {
    pub per_theta_download: BTreeMap<MessageId, u64>,
    pub rate: Rational,
}

/// Exact distribution of the query value `server` receives when `theta`
/// is retrieved, over all permutation profiles.
pub fn query_distribution(
    setting: &PrivacySetting,
    graph: &StorageGraph,
    server: ServerId,
    theta: MessageId,
) -> Result<QueryDistribution> {
    setting.validate(graph)?;
    query_distribution_with(&SettingPlanner { setting, graph }, graph, server, theta)
}

/// [`query_distribution`] for an arbitrary planner.
pub fn query_distribution_with(
    planner: &impl Planner,
    graph: &StorageGraph,
    server: ServerId,
    theta: MessageId,
) -> Result<QueryDistribution> {
    let profiles = PermutationProfile::enumerate_all(graph.n_messages(), 2);
    let total = profiles.len() as i64;
    let mut counts: BTreeMap<QueryValue, i64> = BTreeMap::new();
    for profile in &profiles {
        let plan = planner.plan(theta, profile)?;
        let value = plan.queries.get(&server).cloned().unwrap_or_default();
        *counts.entry(value).or_insert(0) += 1;
    }
    Ok(QueryDistribution {
        support: counts
            .into_iter()
            .map(|(v, c)| (v, Ratio::new(c, total)))
            .collect(),
    })
}

/// Checks that every server's view is identically distributed across all
/// indices in its privacy set.
pub fn audit_privacy(setting: &PrivacySetting, graph: &StorageGraph) -> Result<PrivacyReport> {
    let sets = setting.privacy_sets(graph)?;
    audit_privacy_with(&SettingPlanner { setting, graph }, graph, &sets)
}

/// [`audit_privacy`] for an arbitrary planner and explicit privacy sets.
pub fn audit_privacy_with(
    planner: &impl Planner,
    graph: &StorageGraph,
    privacy_sets: &BTreeMap<ServerId, BTreeSet<MessageId>>,
) -> Result<PrivacyReport> {
    // One enumeration pass per theta fills the view distribution of every
    // server at once.
    let profiles = PermutationProfile::enumerate_all(graph.n_messages(), 2);
    let total = profiles.len() as i64;
    let mut dists: BTreeMap<(MessageId, ServerId), QueryDistribution> = BTreeMap::new();
    for theta in graph.messages() {
        let mut counts: BTreeMap<ServerId, BTreeMap<QueryValue, i64>> =
            graph.servers().map(|s| (s, BTreeMap::new())).collect();
        for profile in &profiles {
            let plan = planner.plan(theta, profile)?;
            for server in graph.servers() {
                let value = plan.queries.get(&server).cloned().unwrap_or_default();
                *counts.get_mut(&server).expect("server").entry(value).or_insert(0) += 1;
            }
        }
        for (server, c) in counts {
            let support = c
                .into_iter()
                .map(|(v, n)| (v, Ratio::new(n, total)))
                .collect();
            dists.insert((theta, server), QueryDistribution { support });
        }
    }

    let mut violations = Vec::new();
    let mut comparisons = 0u64;
    for server in graph.servers() {
        let requires: Vec<MessageId> = privacy_sets[&server].iter().copied().collect();
        for (i, &a) in requires.iter().enumerate() {
            for &b in &requires[i + 1..] {
                comparisons += 1;
                record_mismatches(
                    server,
                    (a, b),
                    &dists[&(a, server)],
                    &dists[&(b, server)],
                    &mut violations,
                );
            }
        }
    }
    Ok(PrivacyReport {
        violations,
        comparisons,
    })
}

fn record_mismatches(
    server: ServerId,
    pair: (MessageId, MessageId),
    da: &QueryDistribution,
    db: &QueryDistribution,
    out: &mut Vec<PrivacyViolation>,
) {
    let mut values: BTreeSet<&QueryValue> = da.support.keys().collect();
    values.extend(db.support.keys());
    for value in values {
        let pa = da.probability(value);
        let pb = db.probability(value);
        if pa != pb {
            out.push(PrivacyViolation {
                server,
                theta_pair: pair,
                witness: value.clone(),
                probabilities: (pa, pb),
            });
        }
    }
}

/// Rank-tests both symbols of every target under every profile. The test
/// is content-independent: only coefficient vectors matter.
pub fn check_decodability(
    setting: &PrivacySetting,
    graph: &StorageGraph,
    field: FieldSpec,
) -> Result<DecodabilityReport> {
    setting.validate(graph)?;
    check_decodability_with(&SettingPlanner { setting, graph }, graph, field)
}

/// [`check_decodability`] for an arbitrary planner.
pub fn check_decodability_with(
    planner: &impl Planner,
    graph: &StorageGraph,
    field: FieldSpec,
) -> Result<DecodabilityReport> {
    let profiles = PermutationProfile::enumerate_all(graph.n_messages(), 2);
    let mut failures = Vec::new();
    let mut checks = 0u64;
    for theta in graph.messages() {
        for (profile_index, profile) in profiles.iter().enumerate() {
            checks += 1;
            let plan = planner.plan(theta, profile)?;
            // Right-hand sides are irrelevant to feasibility; zeros do.
            let equations: Vec<(LinComb, u64)> = plan
                .combs()
                .map(|(_, comb)| (comb.clone(), 0))
                .collect();
            let targets: Vec<SymbolRef> = (1..=profile.message_len())
                .map(|j| profile.symbol(theta, j))
                .collect::<Result<_>>()?;
            match crate::algebra::solve_targets(&equations, &targets, field) {
                Solution::Values(_) => {}
                Solution::Infeasible { unreachable } => failures.push(DecodabilityFailure {
                    theta,
                    profile_index,
                    unreachable,
                }),
            }
        }
    }
    Ok(DecodabilityReport { failures, checks })
}

/// Counts downloaded symbols per target and forms the exact rate
/// `K·L / Σ_θ D_θ`.
pub fn measure_rate(setting: &PrivacySetting, graph: &StorageGraph) -> Result<RateReport> {
    setting.validate(graph)?;
    let k = graph.n_messages();
    let l = 2u32;
    let identity = PermutationProfile::identity(k, l);
    let mut per_theta = BTreeMap::new();
    let swapped = PermutationProfile::from_perms(
        graph.messages().map(|m| (m, vec![2, 1])).collect(),
        2,
    )
    .expect("the all-swap profile is a valid profile");
    for theta in graph.messages() {
        let d = plan_for(setting, graph, theta, &identity)?.download_count();
        // Counts do not depend on the drawn profile; permutations only
        // relabel symbol indices inside each combination.
        let d_swapped = plan_for(setting, graph, theta, &swapped)?.download_count();
        debug_assert_eq!(d, d_swapped);
        let _ = d_swapped;
        per_theta.insert(theta, d);
    }
    let total: u64 = per_theta.values().sum();
    let rate = Ratio::new((k as i64) * (l as i64), total as i64);
    Ok(RateReport {
        per_theta_download: per_theta,
        rate,
    })
}

/// A deliberately broken planner: the special server's request for the
/// target's second symbol skips the permutation and always names raw
/// index 1. Used to demonstrate that the privacy audit produces concrete
/// witnesses.
pub fn planner_leaking_special_symbol<'a>(
    setting: &'a PrivacySetting,
    graph: &'a StorageGraph,
) -> impl Planner + 'a {
    move |theta: MessageId, profile: &PermutationProfile| {
        let mut plan = plan_for(setting, graph, theta, profile)?;
        let special = graph.wrap_server(theta.index() as i64 + 1);
        if let Some(combs) = plan.queries.get_mut(&special) {
            for comb in combs.iter_mut() {
                if comb.messages().contains(&theta) {
                    let rebuilt = comb
                        .terms()
                        .map(|(sym, coeff)| {
                            if sym.msg == theta {
                                (SymbolRef::new(theta, 1), coeff)
                            } else {
                                (sym, coeff)
                            }
                        })
                        .collect::<Vec<_>>();
                    *comb = LinComb::from_terms(rebuilt)?;
                }
            }
        }
        Ok(plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GraphKind;

    fn path(n: u32) -> StorageGraph {
        StorageGraph::build(GraphKind::Path, n).unwrap()
    }

    fn cycle(n: u32) -> StorageGraph {
        StorageGraph::build(GraphKind::Cycle, n).unwrap()
    }

    fn msg(k: u32) -> MessageId {
        MessageId::new(k)
    }

    fn sid(s: u32) -> ServerId {
        ServerId::new(s)
    }

    fn rat(n: i64, d: i64) -> Rational {
        Ratio::new(n, d)
    }

    #[test]
    fn special_server_distribution_is_uniform() {
        // Server 2 of P_4 under modified-edge privacy, theta = 1: the four
        // sums W1[s]+W2[t] each appear with probability 1/4 (only the
        // permutations of W1 and W2 matter out of 2^3 profiles).
        let g = path(4);
        let d = query_distribution(&PrivacySetting::PathModifiedEdge, &g, sid(2), msg(1)).unwrap();
        assert_eq!(d.support.len(), 4);
        for s in 1..=2u32 {
            for t in 1..=2u32 {
                let value = vec![LinComb::sum(
                    SymbolRef::new(msg(1), s),
                    SymbolRef::new(msg(2), t),
                )];
                assert_eq!(d.probability(&value), rat(1, 4));
            }
        }
        assert_eq!(d.total(), rat(1, 1));
    }

    #[test]
    fn uncontacted_server_is_null_with_probability_one() {
        let g = path(4);
        let d = query_distribution(&PrivacySetting::PathModifiedEdge, &g, sid(4), msg(1)).unwrap();
        assert_eq!(d.probability(&Vec::new()), rat(1, 1));
        assert_eq!(d.support.len(), 1);
    }

    #[test]
    fn edge_server_views_match_across_protected_indices() {
        let g = path(4);
        let d1 = query_distribution(&PrivacySetting::PathModifiedEdge, &g, sid(1), msg(1)).unwrap();
        let d2 = query_distribution(&PrivacySetting::PathModifiedEdge, &g, sid(1), msg(2)).unwrap();
        assert_eq!(d1, d2);
        // Uniform over the two clean W1 symbols.
        for s in 1..=2u32 {
            let value = vec![LinComb::single(SymbolRef::new(msg(1), s))];
            assert_eq!(d1.probability(&value), rat(1, 2));
        }
    }

    #[test]
    fn privacy_passes_for_published_examples() {
        let report = audit_privacy(&PrivacySetting::CyclicFirstNeighbor, &cycle(5)).unwrap();
        assert!(report.passed(), "{:?}", report.violations.first());

        let report = audit_privacy(&PrivacySetting::PathModifiedEdge, &path(4)).unwrap();
        assert!(report.passed(), "{:?}", report.violations.first());
    }

    #[test]
    fn leaky_planner_fails_with_witness_at_special_server() {
        let g = path(4);
        let setting = PrivacySetting::PathModifiedEdge;
        let planner = planner_leaking_special_symbol(&setting, &g);
        let sets = setting.privacy_sets(&g).unwrap();
        let report = audit_privacy_with(&planner, &g, &sets).unwrap();
        assert!(!report.passed());
        // Server 2 must appear as a witness: retrieving theta = 1 pins
        // W1's symbol index to 1 there, while theta = 2 keeps it uniform.
        let witness = report
            .violations
            .iter()
            .find(|v| v.server == sid(2))
            .expect("violation at the special server");
        let (pa, pb) = witness.probabilities;
        assert_ne!(pa, pb);
        let half = rat(1, 2);
        let quarter = rat(1, 4);
        assert!(
            (pa == half && pb == quarter) || (pa == quarter && pb == half),
            "mass 1/2 vs 1/4 expected on an index-1 sum, got {pa} vs {pb}"
        );
    }

    #[test]
    fn decodability_passes_for_sample_settings() {
        let gf2 = FieldSpec::GF2;
        let r = check_decodability(&PrivacySetting::CyclicTwoSidedH { h: 1 }, &cycle(7), gf2)
            .unwrap();
        assert!(r.passed());
        assert_eq!(r.checks, 7 * 128);

        let r = check_decodability(&PrivacySetting::PathOneSidedH { h: 1 }, &path(6), gf2).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn truncated_plan_fails_decodability() {
        let g = path(4);
        let setting = PrivacySetting::PathModifiedEdge;
        let truncated = |theta: MessageId, profile: &PermutationProfile| {
            let mut plan = plan_for(&setting, &g, theta, profile)?;
            // Drop the right anchor (last arc server's comb) so W_theta(2)
            // becomes unreachable whenever the special sum is real.
            let last = plan
                .arc
                .server_at(&g, plan.arc.length - 1);
            plan.queries.insert(last, Vec::new());
            Ok(plan)
        };
        let report = check_decodability_with(&truncated, &g, FieldSpec::GF2).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn measured_rates_match_published_values() {
        let r = measure_rate(&PrivacySetting::PathModifiedEdge, &path(4)).unwrap();
        let counts: Vec<u64> = r.per_theta_download.values().copied().collect();
        assert_eq!(counts, vec![3, 4, 3]);
        assert_eq!(r.rate, rat(3, 5));

        let r = measure_rate(&PrivacySetting::CyclicFirstNeighbor, &cycle(5)).unwrap();
        assert!(r.per_theta_download.values().all(|&d| d == 5));
        assert_eq!(r.rate, rat(2, 5));

        let r = measure_rate(&PrivacySetting::CyclicIthNeighbor { i: 3 }, &cycle(7)).unwrap();
        assert!(r.per_theta_download.values().all(|&d| d == 6));
        assert_eq!(r.rate, rat(1, 3));
    }

    #[test]
    fn distributions_sum_to_one_exactly() {
        let g = cycle(5);
        for server in g.servers() {
            for theta in g.messages() {
                let d =
                    query_distribution(&PrivacySetting::CyclicFirstNeighbor, &g, server, theta)
                        .unwrap();
                assert_eq!(d.total(), rat(1, 1));
                // Denominators divide the size of the profile space.
                for (_, p) in d.support() {
                    assert_eq!((1 << g.n_messages()) % p.denom(), 0);
                }
            }
        }
    }

    #[test]
    fn download_counts_are_profile_invariant() {
        for (setting, graph) in crate::model::all_test_settings() {
            if graph.n_messages() > 7 {
                continue;
            }
            let profiles = PermutationProfile::enumerate_all(graph.n_messages(), 2);
            for theta in graph.messages() {
                let counts: BTreeSet<u64> = profiles
                    .iter()
                    .map(|p| {
                        plan_for(&setting, &graph, theta, p)
                            .unwrap()
                            .download_count()
                    })
                    .collect();
                assert_eq!(counts.len(), 1, "{setting:?} theta={theta}");
            }
        }
    }
}
