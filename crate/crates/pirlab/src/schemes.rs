//! Retrieval schemes: the unified window subroutine, the per-setting
//! planners, answering, and decoding.
//!
//! Every built-in scheme is an instance of one pattern. A contiguous
//! *arc* of servers is contacted; the two arc ends serve clean single
//! symbols (*anchors*), the servers in between serve two-symbol *chain
//! sums* that telescope, and the server just after the target message
//! additionally carries its second symbol. Accumulating the chain sums
//! from the left anchor resolves `W_θ(1)`; accumulating from the right
//! anchor cancels the interference inside the special sum and yields
//! `W_θ(2)`. Some settings add *dummy queries* outside the arc so that
//! distant servers cannot tell whether they are near the action.
//!
//! All symbol indices pass through the user's private permutation
//! profile before they are emitted, which is what makes the downloads
//! look index-free to every server.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::algebra::{
    evaluate, solve_targets, FieldSpec, LinComb, MessageStore, PermutationProfile, Solution,
    SymbolRef,
};
use crate::error::{Error, Result};
use crate::model::{GraphKind, MessageId, PrivacySetting, ServerId, StorageGraph};

/// A contiguous run of servers; on cycles it may wrap, and with
/// `length = N + 1` the two end roles land on the same physical server.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub start: ServerId,
    pub length: u32,
}

impl Arc {
    pub fn new(start: ServerId, length: u32) -> Self {
        Arc { start, length }
    }

    /// The server at 0-based position `pos` along the arc.
    pub fn server_at(&self, graph: &StorageGraph, pos: u32) -> ServerId {
        graph.wrap_server(self.start.index() as i64 + pos as i64)
    }

    /// All arc servers in arc order; the wrap-collision end is not
    /// repeated.
    pub fn servers(&self, graph: &StorageGraph) -> Vec<ServerId> {
        let distinct = self.length.min(graph.n_servers());
        (0..distinct).map(|p| self.server_at(graph, p)).collect()
    }
}

/// Per-server query lists for one retrieval. An empty list is the null
/// query: that server is simply never contacted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryPlan {
    pub theta: MessageId,
    pub queries: BTreeMap<ServerId, Vec<LinComb>>,
    pub arc: Arc,
    pub dummy_servers: BTreeSet<ServerId>,
}

impl QueryPlan {
    /// Total number of linear combinations (downloaded symbols), `D_θ`.
    pub fn download_count(&self) -> u64 {
        self.queries.values().map(|q| q.len() as u64).sum()
    }

    /// Servers that receive at least one combination.
    pub fn contacted_servers(&self) -> impl Iterator<Item = ServerId> + '_ {
        self.queries
            .iter()
            .filter(|(_, q)| !q.is_empty())
            .map(|(&s, _)| s)
    }

    /// Every equation the answers will satisfy, paired with the answer
    /// slot it lands in, in `(server, position)` order.
    pub fn combs(&self) -> impl Iterator<Item = (ServerId, &LinComb)> {
        self.queries
            .iter()
            .flat_map(|(&s, q)| q.iter().map(move |c| (s, c)))
    }
}

/// One full retrieval as seen by the user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub plan: QueryPlan,
    pub answers: BTreeMap<ServerId, Vec<u64>>,
    pub decoded: Vec<u64>,
}

/// Runs the window subroutine over an explicit arc.
///
/// Preconditions: `θ` and `θ+1` lie strictly inside the arc, except that
/// `θ` may sit on the left end when that end is server 1 of a path, and
/// `θ+1` may sit on the right end when that end is server `N` of a path
/// (the special sum then degenerates to the clean symbol `W_θ(2)`).
pub fn window_retrieve(
    graph: &StorageGraph,
    arc: Arc,
    theta: MessageId,
    profile: &PermutationProfile,
) -> Result<QueryPlan> {
    let n = graph.n_servers();
    let len = arc.length;
    if len < 3 {
        return Err(Error::InvalidArc(format!(
            "window arcs need at least 3 servers, got {len}"
        )));
    }
    match graph.kind() {
        GraphKind::Path => {
            if arc.start.index() + len - 1 > n {
                return Err(Error::InvalidArc(format!(
                    "arc [{}..{}] leaves the path",
                    arc.start.index(),
                    arc.start.index() + len - 1
                )));
            }
        }
        GraphKind::Cycle => {
            if len > n + 1 {
                return Err(Error::InvalidArc(format!(
                    "arc of length {len} wraps a {n}-cycle more than once"
                )));
            }
        }
    }
    if theta.index() > graph.n_messages() {
        return Err(Error::ParameterRange(format!(
            "theta = {} exceeds K = {}",
            theta.index(),
            graph.n_messages()
        )));
    }

    let last = arc.server_at(graph, len - 1);
    let pos_theta = position_of(graph, &arc, theta.index())?;
    let special_server = graph.wrap_server(theta.index() as i64 + 1);
    // On a path with theta = K there is no message theta+1; the special
    // sum degenerates before it would be needed.
    let theta_next = (graph.kind() == GraphKind::Cycle
        || theta.index() < graph.n_messages())
    .then(|| graph.wrap_message(theta.index() as i64 + 1));

    let theta_on_left_end = pos_theta == 0;
    if theta_on_left_end && !(graph.kind() == GraphKind::Path && arc.start.index() == 1) {
        return Err(Error::InvalidArc(format!(
            "theta = {} sits on the arc's left end",
            theta.index()
        )));
    }
    let special_pos = pos_theta + 1;
    let special_on_right_end = special_pos == len - 1;
    if special_pos > len - 1
        || (special_on_right_end && !(graph.kind() == GraphKind::Path && last.index() == n))
    {
        return Err(Error::InvalidArc(format!(
            "theta = {} has no room for its successor inside the arc",
            theta.index()
        )));
    }

    // One comb per arc position; the wrap-collision end contributes a
    // second comb to the shared physical server.
    let mut queries: BTreeMap<ServerId, Vec<LinComb>> =
        graph.servers().map(|s| (s, Vec::new())).collect();
    for pos in 0..len {
        let server = arc.server_at(graph, pos);
        let comb = if pos == 0 {
            // Left anchor: clean first symbol of the start server's
            // newer message.
            LinComb::single(profile.symbol(graph.wrap_message(server.index() as i64), 1)?)
        } else if pos == len - 1 && !(special_on_right_end && server == special_server) {
            // Right anchor: clean first symbol of the end server's older
            // message.
            LinComb::single(profile.symbol(graph.wrap_message(server.index() as i64 - 1), 1)?)
        } else if server == special_server && pos == special_pos {
            if special_on_right_end {
                // Degenerate special at the path's right edge.
                LinComb::single(profile.symbol(theta, 2)?)
            } else {
                let next = theta_next.expect("non-degenerate special has a successor");
                LinComb::sum(profile.symbol(theta, 2)?, profile.symbol(next, 1)?)
            }
        } else {
            chain_sum(graph, profile, server)?
        };
        queries.get_mut(&server).expect("server in map").push(comb);
    }

    Ok(QueryPlan {
        theta,
        queries,
        arc,
        dummy_servers: BTreeSet::new(),
    })
}

/// The chain sum at a server: first permuted symbol of each of its two
/// stored messages.
fn chain_sum(
    graph: &StorageGraph,
    profile: &PermutationProfile,
    server: ServerId,
) -> Result<LinComb> {
    let newer = graph.wrap_message(server.index() as i64);
    let older = graph.wrap_message(server.index() as i64 - 1);
    Ok(LinComb::sum(
        profile.symbol(older, 1)?,
        profile.symbol(newer, 1)?,
    ))
}

fn position_of(graph: &StorageGraph, arc: &Arc, server_index: u32) -> Result<u32> {
    let pos = match graph.kind() {
        GraphKind::Path => {
            let s = server_index as i64 - arc.start.index() as i64;
            if s < 0 || s >= arc.length as i64 {
                return Err(Error::InvalidArc(format!(
                    "server {server_index} lies outside the arc"
                )));
            }
            s as u32
        }
        GraphKind::Cycle => {
            let n = graph.n_servers() as i64;
            ((server_index as i64 - arc.start.index() as i64).rem_euclid(n)) as u32
        }
    };
    Ok(pos)
}

/// Selects the retrieval arc (and dummy servers) for a privacy setting
/// and delegates to [`window_retrieve`].
pub fn plan_for(
    setting: &PrivacySetting,
    graph: &StorageGraph,
    theta: MessageId,
    profile: &PermutationProfile,
) -> Result<QueryPlan> {
    setting.validate(graph)?;
    if theta.index() < 1 || theta.index() > graph.n_messages() {
        return Err(Error::ParameterRange(format!(
            "theta = {} outside 1..={}",
            theta.index(),
            graph.n_messages()
        )));
    }
    let n = graph.n_servers();
    let t = theta.index() as i64;
    let path_arc = |start: i64, end: i64| -> Arc {
        Arc::new(ServerId::new(start as u32), (end - start + 1) as u32)
    };
    let cycle_arc = |start: i64, length: u32| -> Arc {
        Arc::new(graph.wrap_server(start), length)
    };

    let (arc, dummies): (Arc, Vec<ServerId>) = match *setting {
        PrivacySetting::PathModifiedEdge => {
            let arc = if t == 1 {
                path_arc(1, 3)
            } else if t <= n as i64 - 2 {
                path_arc(t - 1, t + 2)
            } else {
                path_arc(n as i64 - 2, n as i64)
            };
            (arc, vec![])
        }
        PrivacySetting::PathOneSidedH { h } => {
            let h = h as i64;
            let arc = if t <= (h + 1).min(n as i64 - 2) {
                path_arc(1, t + 2)
            } else if t <= n as i64 - 2 {
                path_arc(t - h - 1, t + 2)
            } else {
                path_arc((n as i64 - h - 2).max(1), n as i64)
            };
            (arc, vec![])
        }
        PrivacySetting::PathTwoSidedH { .. } | PrivacySetting::PathTwoSidedHModEdge { .. } => {
            // Arc = the contiguous span of the servers requiring privacy
            // for theta, extended one server on each side, clipped.
            let span = setting.servers_requiring_privacy(graph, theta)?;
            let lo = span.iter().next().expect("nonempty").index() as i64;
            let hi = span.iter().next_back().expect("nonempty").index() as i64;
            debug_assert_eq!(hi - lo + 1, span.len() as i64, "span must be contiguous");
            (arc_from_span(lo, hi, n), vec![])
        }
        PrivacySetting::CyclicFirstNeighbor => (cycle_arc(t - 2, 5), vec![]),
        PrivacySetting::CyclicIthNeighbor { i } => {
            if i == 2 {
                (cycle_arc(t - 3, 6), vec![])
            } else {
                let dummies = vec![
                    graph.wrap_server(t - i as i64),
                    graph.wrap_server(t - i as i64 + 1),
                ];
                (cycle_arc(t - 1, 4), dummies)
            }
        }
        PrivacySetting::CyclicOneSidedH { h } => (cycle_arc(t - h as i64 - 1, h + 4), vec![]),
        PrivacySetting::CyclicTwoSidedH { h } => {
            (cycle_arc(t - h as i64 - 1, 2 * h + 4), vec![])
        }
    };

    let mut plan = window_retrieve(graph, arc, theta, profile)?;
    for server in dummies {
        let comb = chain_sum(graph, profile, server)?;
        plan.queries
            .get_mut(&server)
            .expect("server in map")
            .push(comb);
        plan.dummy_servers.insert(server);
    }
    Ok(plan)
}

fn arc_from_span(lo: i64, hi: i64, n: u32) -> Arc {
    let start = (lo - 1).max(1);
    let end = (hi + 1).min(n as i64);
    Arc::new(ServerId::new(start as u32), (end - start + 1) as u32)
}

/// Evaluates a server's answer to a query list. Every combination must
/// reference only messages the server stores.
pub fn answer(
    graph: &StorageGraph,
    server: ServerId,
    query: &[LinComb],
    store: &MessageStore,
    field: FieldSpec,
) -> Result<Vec<u64>> {
    let stored = graph.stores(server);
    for comb in query {
        if let Some(&msg) = comb.messages().iter().find(|m| !stored.contains(m)) {
            return Err(Error::Locality { server, msg });
        }
    }
    query.iter().map(|c| evaluate(c, store, field)).collect()
}

/// Recovers `W_θ` from honest answers, in stored symbol order.
///
/// Decoding is plain linear algebra over the received equations: both
/// permuted positions of `W_θ` are solved for and written back to their
/// raw slots.
pub fn decode(
    plan: &QueryPlan,
    answers: &BTreeMap<ServerId, Vec<u64>>,
    profile: &PermutationProfile,
    field: FieldSpec,
) -> Result<Vec<u64>> {
    let mut equations = Vec::new();
    for (server, combs) in &plan.queries {
        let got = answers.get(server).map(|a| a.len()).unwrap_or(0);
        if got != combs.len() {
            return Err(Error::AnswerShape {
                server: *server,
                expected: combs.len(),
                got,
            });
        }
        if let Some(values) = answers.get(server) {
            for (comb, &value) in combs.iter().zip(values) {
                equations.push((comb.clone(), value));
            }
        }
    }
    let l = profile.message_len();
    let targets: Vec<SymbolRef> = (1..=l)
        .map(|j| profile.symbol(plan.theta, j))
        .collect::<Result<_>>()?;
    match solve_targets(&equations, &targets, field) {
        Solution::Values(values) => {
            let mut decoded = vec![0u64; l as usize];
            for target in &targets {
                decoded[(target.sym - 1) as usize] = values[target];
            }
            Ok(decoded)
        }
        Solution::Infeasible { unreachable } => Err(Error::Undecodable(unreachable)),
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

    fn identity(graph: &StorageGraph) -> PermutationProfile {
        PermutationProfile::identity(graph.n_messages(), 2)
    }

    /// Renders a plan compactly for assertions: `server: comb;comb` with
    /// null queries omitted.
    fn rendered(plan: &QueryPlan) -> BTreeMap<u32, String> {
        plan.queries
            .iter()
            .filter(|(_, q)| !q.is_empty())
            .map(|(s, q)| {
                (
                    s.index(),
                    q.iter().map(|c| c.render()).collect::<Vec<_>>().join(";"),
                )
            })
            .collect()
    }

    #[test]
    fn window_on_p4_theta1() {
        let g = path(4);
        let plan =
            window_retrieve(&g, Arc::new(sid(1), 3), msg(1), &identity(&g)).unwrap();
        let r = rendered(&plan);
        assert_eq!(r[&1], "W1[1]");
        assert_eq!(r[&2], "W1[2]+W2[1]");
        assert_eq!(r[&3], "W2[1]");
        assert!(!r.contains_key(&4));
        assert_eq!(plan.download_count(), 3);
    }

    #[test]
    fn window_on_c5_theta1_wrapping_arc() {
        let g = cycle(5);
        let plan =
            window_retrieve(&g, Arc::new(sid(4), 5), msg(1), &identity(&g)).unwrap();
        let r = rendered(&plan);
        assert_eq!(r[&4], "W4[1]");
        assert_eq!(r[&5], "W4[1]+W5[1]");
        assert_eq!(r[&1], "W1[1]+W5[1]");
        assert_eq!(r[&2], "W1[2]+W2[1]");
        assert_eq!(r[&3], "W2[1]");
        assert_eq!(plan.download_count(), 5);
    }

    #[test]
    fn window_on_p4_right_edge_degenerates() {
        let g = path(4);
        let plan =
            window_retrieve(&g, Arc::new(sid(2), 3), msg(3), &identity(&g)).unwrap();
        let r = rendered(&plan);
        assert_eq!(r[&2], "W2[1]");
        assert_eq!(r[&3], "W2[1]+W3[1]");
        assert_eq!(r[&4], "W3[2]");
    }

    #[test]
    fn window_rejects_bad_arcs() {
        let g = path(4);
        let id = identity(&g);
        // Arc leaving the path.
        assert!(window_retrieve(&g, Arc::new(sid(3), 3), msg(3), &id).is_err());
        // Theta on the left end away from server 1.
        assert!(window_retrieve(&g, Arc::new(sid(2), 3), msg(2), &id).is_err());
        // No room for theta's successor.
        assert!(window_retrieve(&g, Arc::new(sid(1), 3), msg(2), &id).is_err());
    }

    #[test]
    fn plan_modified_edge_matches_published_rows() {
        let g = path(4);
        let id = identity(&g);
        let plan = plan_for(&PrivacySetting::PathModifiedEdge, &g, msg(2), &id).unwrap();
        let r = rendered(&plan);
        assert_eq!(r[&1], "W1[1]");
        assert_eq!(r[&2], "W1[1]+W2[1]");
        assert_eq!(r[&3], "W2[2]+W3[1]");
        assert_eq!(r[&4], "W3[1]");
        assert_eq!(plan.download_count(), 4);
    }

    #[test]
    fn plan_ith_neighbor_with_dummies() {
        let g = cycle(7);
        let id = identity(&g);
        let plan = plan_for(
            &PrivacySetting::CyclicIthNeighbor { i: 3 },
            &g,
            msg(1),
            &id,
        )
        .unwrap();
        let r = rendered(&plan);
        assert_eq!(r[&7], "W7[1]");
        assert_eq!(r[&1], "W1[1]+W7[1]");
        assert_eq!(r[&2], "W1[2]+W2[1]");
        assert_eq!(r[&3], "W2[1]");
        // Dummies at theta - i = 5 and theta - i + 1 = 6.
        assert_eq!(r[&5], "W4[1]+W5[1]");
        assert_eq!(r[&6], "W5[1]+W6[1]");
        assert_eq!(plan.download_count(), 6);
        assert_eq!(
            plan.dummy_servers,
            BTreeSet::from([sid(5), sid(6)])
        );
    }

    #[test]
    fn plan_two_sided_cycle_h0() {
        let g = cycle(5);
        let id = identity(&g);
        let plan = plan_for(&PrivacySetting::CyclicTwoSidedH { h: 0 }, &g, msg(1), &id).unwrap();
        let r = rendered(&plan);
        assert_eq!(r[&5], "W5[1]");
        assert_eq!(r[&1], "W1[1]+W5[1]");
        assert_eq!(r[&2], "W1[2]+W2[1]");
        assert_eq!(r[&3], "W2[1]");
        assert!(!r.contains_key(&4));
        assert_eq!(plan.download_count(), 4);
    }

    #[test]
    fn wrap_collision_server_answers_two_combs() {
        // One-sided cyclic privacy at h = N-3 contacts every server and
        // the arc's two ends share one physical server.
        let g = cycle(5);
        let id = identity(&g);
        let plan = plan_for(&PrivacySetting::CyclicOneSidedH { h: 2 }, &g, msg(1), &id).unwrap();
        let r = rendered(&plan);
        assert_eq!(r[&3], "W3[1];W2[1]");
        assert_eq!(plan.download_count(), 6); // h + 4
    }

    #[test]
    fn answer_examples() {
        let g = path(4);
        let gf2 = FieldSpec::GF2;
        let contents = [(1u32, vec![1, 0]), (2, vec![1, 1]), (3, vec![0, 1])]
            .into_iter()
            .map(|(k, v)| (msg(k), v))
            .collect();
        let store = MessageStore::new(contents, 2, gf2).unwrap();

        let q = vec![LinComb::sum(
            SymbolRef::new(msg(1), 1),
            SymbolRef::new(msg(2), 1),
        )];
        assert_eq!(answer(&g, sid(2), &q, &store, gf2).unwrap(), vec![0]);

        assert_eq!(answer(&g, sid(1), &[], &store, gf2).unwrap(), Vec::<u64>::new());

        let bad = vec![LinComb::single(SymbolRef::new(msg(1), 1))];
        assert_eq!(
            answer(&g, sid(3), &bad, &store, gf2),
            Err(Error::Locality {
                server: sid(3),
                msg: msg(1)
            })
        );
    }

    /// Brute-force oracle: answer a plan against an explicit store and
    /// check the decoder returns exactly the stored target message.
    fn decode_round_trip(graph: &StorageGraph, plan: &QueryPlan, profile: &PermutationProfile) {
        let gf2 = FieldSpec::GF2;
        let k = graph.n_messages();
        let cells = (k * 2) as u32;
        for bits in 0..(1u64 << cells) {
            let contents: BTreeMap<MessageId, Vec<u64>> = (1..=k)
                .map(|m| {
                    let base = ((m - 1) * 2) as u64;
                    (
                        msg(m),
                        vec![(bits >> base) & 1, (bits >> (base + 1)) & 1],
                    )
                })
                .collect();
            let store = MessageStore::new(contents, 2, gf2).unwrap();
            let answers: BTreeMap<ServerId, Vec<u64>> = plan
                .queries
                .iter()
                .map(|(&s, q)| (s, answer(graph, s, q, &store, gf2).unwrap()))
                .collect();
            let decoded = decode(plan, &answers, profile, gf2).unwrap();
            assert_eq!(decoded, store.message(plan.theta).unwrap());
        }
    }

    #[test]
    fn decode_all_stores_p4_theta1() {
        let g = path(4);
        let id = identity(&g);
        let plan = plan_for(&PrivacySetting::PathModifiedEdge, &g, msg(1), &id).unwrap();
        decode_round_trip(&g, &plan, &id);
    }

    #[test]
    fn decode_all_stores_c5_theta1() {
        let g = cycle(5);
        let id = identity(&g);
        let plan = plan_for(&PrivacySetting::CyclicFirstNeighbor, &g, msg(1), &id).unwrap();
        decode_round_trip(&g, &plan, &id);
    }

    #[test]
    fn decode_all_stores_under_swapped_profile() {
        let g = path(4);
        let perms = (1..=3)
            .map(|k| (msg(k), vec![2, 1]))
            .collect();
        let swapped = PermutationProfile::from_perms(perms, 2).unwrap();
        let plan = plan_for(&PrivacySetting::PathModifiedEdge, &g, msg(2), &swapped).unwrap();
        decode_round_trip(&g, &plan, &swapped);
    }

    #[test]
    fn decode_without_right_anchor_is_infeasible() {
        let g = path(4);
        let gf2 = FieldSpec::GF2;
        let id = identity(&g);
        let mut plan = plan_for(&PrivacySetting::PathModifiedEdge, &g, msg(2), &id).unwrap();
        plan.queries.insert(sid(4), Vec::new()); // drop the anchor
        let contents = (1..=3).map(|k| (msg(k), vec![1, 0])).collect();
        let store = MessageStore::new(contents, 2, gf2).unwrap();
        let answers: BTreeMap<ServerId, Vec<u64>> = plan
            .queries
            .iter()
            .map(|(&s, q)| (s, answer(&g, s, q, &store, gf2).unwrap()))
            .collect();
        match decode(&plan, &answers, &id, gf2) {
            Err(Error::Undecodable(targets)) => {
                assert_eq!(targets, vec![SymbolRef::new(msg(2), 2)]);
            }
            other => panic!("expected undecodable, got {other:?}"),
        }
    }

    #[test]
    fn download_counts_match_closed_forms() {
        let id2 = |g: &StorageGraph| PermutationProfile::identity(g.n_messages(), 2);
        // Path, modified edge: 3 at the two edges, 4 in the middle.
        for n in 4..=9u32 {
            let g = path(n);
            for t in 1..=g.n_messages() {
                let d = plan_for(&PrivacySetting::PathModifiedEdge, &g, msg(t), &id2(&g))
                    .unwrap()
                    .download_count();
                let expect = if t == 1 || t == n - 1 { 3 } else { 4 };
                assert_eq!(d, expect, "modified-edge N={n} theta={t}");
            }
        }
        // One-sided path: theta+2 / h+4 / clipped tail.
        for n in 5..=9u32 {
            let g = path(n);
            for h in 1..=n - 2 {
                let setting = PrivacySetting::PathOneSidedH { h };
                for t in 1..=g.n_messages() {
                    let d = plan_for(&setting, &g, msg(t), &id2(&g))
                        .unwrap()
                        .download_count();
                    let expect = if t <= (h + 1).min(n - 2) {
                        (t + 2) as u64
                    } else if t <= n - 2 {
                        (h + 4) as u64
                    } else {
                        (h + 3).min(n) as u64
                    };
                    assert_eq!(d, expect, "one-sided N={n} h={h} theta={t}");
                }
            }
        }
        // Cyclic counts are theta-independent.
        for n in 5..=9u32 {
            let g = cycle(n);
            for t in 1..=n {
                let d = plan_for(&PrivacySetting::CyclicFirstNeighbor, &g, msg(t), &id2(&g))
                    .unwrap()
                    .download_count();
                assert_eq!(d, 5);
            }
            for h in 0..=(n - 3) / 2 {
                let d = plan_for(&PrivacySetting::CyclicTwoSidedH { h }, &g, msg(1), &id2(&g))
                    .unwrap()
                    .download_count();
                assert_eq!(d, (2 * h + 4) as u64);
            }
            for h in 0..=n - 3 {
                let d = plan_for(&PrivacySetting::CyclicOneSidedH { h }, &g, msg(1), &id2(&g))
                    .unwrap()
                    .download_count();
                assert_eq!(d, (h + 4) as u64);
            }
        }
    }

    #[test]
    fn rotation_equivariance_on_cycles() {
        let g = cycle(7);
        let id = identity(&g);
        for setting in [
            PrivacySetting::CyclicFirstNeighbor,
            PrivacySetting::CyclicIthNeighbor { i: 3 },
            PrivacySetting::CyclicOneSidedH { h: 2 },
            PrivacySetting::CyclicTwoSidedH { h: 1 },
        ] {
            let base = plan_for(&setting, &g, msg(1), &id).unwrap();
            for t in 2..=7u32 {
                let shifted = plan_for(&setting, &g, msg(t), &id).unwrap();
                let expect = rotate_plan(&g, &base, t as i64 - 1);
                assert_eq!(
                    rendered(&shifted),
                    rendered(&expect),
                    "{setting:?} theta={t}"
                );
            }
        }
    }

    fn rotate_plan(graph: &StorageGraph, plan: &QueryPlan, shift: i64) -> QueryPlan {
        let queries = plan
            .queries
            .iter()
            .map(|(s, combs)| {
                let server = graph.wrap_server(s.index() as i64 + shift);
                let combs = combs
                    .iter()
                    .map(|c| {
                        LinComb::from_terms(c.terms().map(|(sym, coeff)| {
                            (
                                SymbolRef::new(
                                    graph.wrap_message(sym.msg.index() as i64 + shift),
                                    sym.sym,
                                ),
                                coeff,
                            )
                        }))
                        .unwrap()
                    })
                    .collect();
                (server, combs)
            })
            .collect();
        QueryPlan {
            theta: graph.wrap_message(plan.theta.index() as i64 + shift),
            queries,
            arc: Arc::new(
                graph.wrap_server(plan.arc.start.index() as i64 + shift),
                plan.arc.length,
            ),
            dummy_servers: plan
                .dummy_servers
                .iter()
                .map(|s| graph.wrap_server(s.index() as i64 + shift))
                .collect(),
        }
    }

    #[test]
    fn plans_reference_only_stored_messages() {
        for (setting, graph) in &crate::model::all_test_settings() {
            let id = identity(graph);
            for t in 1..=graph.n_messages() {
                let plan = plan_for(setting, graph, msg(t), &id).unwrap();
                for (server, comb) in plan.combs() {
                    for m in comb.messages() {
                        assert!(
                            graph.is_stored(server, m),
                            "{setting:?} theta={t}: {m} not stored at {server}"
                        );
                    }
                }
            }
        }
    }
}
