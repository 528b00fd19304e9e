//! Storage graphs and privacy-requirement sets.
//!
//! A storage graph places `K` replicated messages on `N` servers. On the
//! path graph `P_N` the servers form a line and consecutive servers share
//! one message (`K = N-1`); on the cyclic graph `C_N` the line closes into
//! a ring (`K = N`). Every message lives on exactly two adjacent servers.
//!
//! Each server `n` carries a privacy-requirement set `P_n`: the message
//! indices whose retrieval must look identical from that server's point of
//! view. `P_n` always contains the server's own stored indices `I_n` and
//! may extend to the storage of nearby servers, parameterized by a
//! neighborhood range.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 1-based server index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ServerId(u32);

impl ServerId {
    /// Wraps a 1-based index. Range against `N` is checked where a graph
    /// is available.
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "server indices are 1-based");
        ServerId(index)
    }

    pub fn index(&self) -> u32 {
        self.0
    }
}

impl fmt::Display for ServerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "server {}", self.0)
    }
}

/// 1-based message index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MessageId(u32);

impl MessageId {
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "message indices are 1-based");
        MessageId(index)
    }

    pub fn index(&self) -> u32 {
        self.0
    }
}

impl fmt::Display for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}", self.0)
    }
}

/// Storage topology: a line of servers or a ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Path,
    Cycle,
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::Path => write!(f, "path"),
            GraphKind::Cycle => write!(f, "cycle"),
        }
    }
}

/// A path or cyclic storage graph together with its stored-index map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StorageGraph {
    kind: GraphKind,
    n_servers: u32,
}

impl StorageGraph {
    /// Builds a storage graph with `n` servers.
    ///
    /// Path graphs need at least 3 servers, cycles at least 4; below that
    /// the edge-replication layout degenerates.
    pub fn build(kind: GraphKind, n: u32) -> Result<Self> {
        let min = match kind {
            GraphKind::Path => 3,
            GraphKind::Cycle => 4,
        };
        if n < min {
            return Err(Error::ParameterRange(format!(
                "a {kind} graph needs at least {min} servers, got {n}"
            )));
        }
        Ok(StorageGraph { kind, n_servers: n })
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn n_servers(&self) -> u32 {
        self.n_servers
    }

    /// Number of messages: `N-1` on a path, `N` on a cycle.
    pub fn n_messages(&self) -> u32 {
        match self.kind {
            GraphKind::Path => self.n_servers - 1,
            GraphKind::Cycle => self.n_servers,
        }
    }

    pub fn servers(&self) -> impl Iterator<Item = ServerId> {
        (1..=self.n_servers).map(ServerId::new)
    }

    pub fn messages(&self) -> impl Iterator<Item = MessageId> {
        (1..=self.n_messages()).map(MessageId::new)
    }

    /// Normalizes an integer to a server index, wrapping modulo `N` on
    /// cycles with residue 0 rendered as `N`. Panics on out-of-range path
    /// indices; path callers are expected to stay in range.
    pub fn wrap_server(&self, raw: i64) -> ServerId {
        ServerId::new(self.wrap(raw))
    }

    /// Normalizes an integer to a message index, with the same modular
    /// convention as [`wrap_server`](Self::wrap_server). On cycles message
    /// and server indices share the same modulus `N`.
    pub fn wrap_message(&self, raw: i64) -> MessageId {
        match self.kind {
            GraphKind::Cycle => MessageId::new(self.wrap(raw)),
            GraphKind::Path => {
                assert!(
                    raw >= 1 && raw <= self.n_messages() as i64,
                    "message index {raw} out of range on a path graph"
                );
                MessageId::new(raw as u32)
            }
        }
    }

    fn wrap(&self, raw: i64) -> u32 {
        match self.kind {
            GraphKind::Cycle => {
                let n = self.n_servers as i64;
                ((raw - 1).rem_euclid(n) + 1) as u32
            }
            GraphKind::Path => {
                assert!(
                    raw >= 1 && raw <= self.n_servers as i64,
                    "server index {raw} out of range on a path graph"
                );
                raw as u32
            }
        }
    }

    /// The stored-index set `I_n`.
    pub fn stores(&self, server: ServerId) -> BTreeSet<MessageId> {
        let n = server.index();
        assert!(n >= 1 && n <= self.n_servers, "server index out of range");
        match self.kind {
            GraphKind::Path => {
                if n == 1 {
                    BTreeSet::from([MessageId::new(1)])
                } else if n == self.n_servers {
                    BTreeSet::from([MessageId::new(n - 1)])
                } else {
                    BTreeSet::from([MessageId::new(n - 1), MessageId::new(n)])
                }
            }
            GraphKind::Cycle => BTreeSet::from([
                self.wrap_message(n as i64 - 1),
                self.wrap_message(n as i64),
            ]),
        }
    }

    /// True iff `msg` is stored at `server`.
    pub fn is_stored(&self, server: ServerId, msg: MessageId) -> bool {
        self.stores(server).contains(&msg)
    }

    /// The complete stored-index map.
    pub fn storage_map(&self) -> BTreeMap<ServerId, BTreeSet<MessageId>> {
        self.servers().map(|s| (s, self.stores(s))).collect()
    }
}

/// A named, parameterized rule producing the privacy-requirement set of
/// every server.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum PrivacySetting {
    /// Path: interior servers keep only their own storage private; each
    /// edge server inherits the privacy set of its inner neighbor.
    PathModifiedEdge,
    /// Path: `P_n` covers the storage of `h` servers to the right.
    PathOneSidedH { h: u32 },
    /// Path: `P_n` covers the storage of `h` servers on both sides.
    PathTwoSidedH { h: u32 },
    /// Two-sided path privacy with the edge servers additionally
    /// inheriting their inner neighbor's set.
    PathTwoSidedHModEdge { h: u32 },
    /// Cycle: `P_n = I_n ∪ I_{n+1}`.
    CyclicFirstNeighbor,
    /// Cycle: `P_n = I_n ∪ I_{n+i}` for a fixed stride `i ≥ 2`.
    CyclicIthNeighbor { i: u32 },
    /// Cycle: `P_n` covers the storage of `h` servers clockwise.
    CyclicOneSidedH { h: u32 },
    /// Cycle: `P_n` covers the storage of `h` servers on both sides.
    CyclicTwoSidedH { h: u32 },
}

impl PrivacySetting {
    /// Short machine-friendly name, also used by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            PrivacySetting::PathModifiedEdge => "modified-edge",
            PrivacySetting::PathOneSidedH { .. } => "one-sided-path",
            PrivacySetting::PathTwoSidedH { .. } => "two-sided-path",
            PrivacySetting::PathTwoSidedHModEdge { .. } => "two-sided-mod-edge",
            PrivacySetting::CyclicFirstNeighbor => "first-neighbor",
            PrivacySetting::CyclicIthNeighbor { .. } => "ith-neighbor",
            PrivacySetting::CyclicOneSidedH { .. } => "one-sided-cycle",
            PrivacySetting::CyclicTwoSidedH { .. } => "two-sided-cycle",
        }
    }

    /// The neighborhood parameter, if the rule has one.
    pub fn param(&self) -> Option<u32> {
        match *self {
            PrivacySetting::PathOneSidedH { h }
            | PrivacySetting::PathTwoSidedH { h }
            | PrivacySetting::PathTwoSidedHModEdge { h }
            | PrivacySetting::CyclicOneSidedH { h }
            | PrivacySetting::CyclicTwoSidedH { h } => Some(h),
            PrivacySetting::CyclicIthNeighbor { i } => Some(i),
            PrivacySetting::PathModifiedEdge | PrivacySetting::CyclicFirstNeighbor => None,
        }
    }

    /// Expected graph kind for this rule.
    pub fn graph_kind(&self) -> GraphKind {
        match self {
            PrivacySetting::PathModifiedEdge
            | PrivacySetting::PathOneSidedH { .. }
            | PrivacySetting::PathTwoSidedH { .. }
            | PrivacySetting::PathTwoSidedHModEdge { .. } => GraphKind::Path,
            PrivacySetting::CyclicFirstNeighbor
            | PrivacySetting::CyclicIthNeighbor { .. }
            | PrivacySetting::CyclicOneSidedH { .. }
            | PrivacySetting::CyclicTwoSidedH { .. } => GraphKind::Cycle,
        }
    }

    /// Checks rule/graph compatibility and parameter ranges.
    ///
    /// The ranges are the ones for which a working retrieval scheme exists
    /// in this library. Two published upper boundaries are deliberately
    /// rejected because no sound construction is known for them (see the
    /// guide's chapter on open ranges): `CyclicIthNeighbor` with
    /// `i = N-2`, and `CyclicOneSidedH` with `h = N-2`.
    pub fn validate(&self, graph: &StorageGraph) -> Result<()> {
        if graph.kind() != self.graph_kind() {
            return Err(Error::KindMismatch {
                setting: self.name().to_string(),
                kind: graph.kind().to_string(),
            });
        }
        let n = graph.n_servers();
        match *self {
            PrivacySetting::PathModifiedEdge => Ok(()),
            PrivacySetting::PathOneSidedH { h } => {
                range_check("h", h, 1, n - 2, "1..=N-2")
            }
            PrivacySetting::PathTwoSidedH { h } => {
                range_check("h", h, 1, n - 3, "1..=N-3")
            }
            PrivacySetting::PathTwoSidedHModEdge { h } => {
                range_check("h", h, 0, n - 3, "0..=N-3")
            }
            PrivacySetting::CyclicFirstNeighbor => {
                if n < 5 {
                    Err(Error::ParameterRange(format!(
                        "first-neighbor privacy needs N >= 5 (its 5-server retrieval \
                         window cannot fit on a {n}-cycle)"
                    )))
                } else {
                    Ok(())
                }
            }
            PrivacySetting::CyclicIthNeighbor { i } => {
                if n < 6 {
                    return Err(Error::ParameterRange(format!(
                        "ith-neighbor privacy needs N >= 6 (the 6-server retrieval \
                         window for i = 2 cannot fit on a {n}-cycle)"
                    )));
                }
                if i == n - 2 {
                    return Err(Error::ParameterRange(format!(
                        "i = N-2 = {i} is rejected: the dummy servers would collide \
                         with the retrieval window and leak the request; this upper \
                         boundary is a documented open question"
                    )));
                }
                range_check("i", i, 2, n - 3, "2..=N-3")
            }
            PrivacySetting::CyclicOneSidedH { h } => {
                if h == n - 2 {
                    return Err(Error::ParameterRange(format!(
                        "h = N-2 = {h} is rejected: the retrieval window of length \
                         h+4 would wrap the cycle twice; this upper boundary is a \
                         documented open question"
                    )));
                }
                range_check("h", h, 0, n - 3, "0..=N-3")
            }
            PrivacySetting::CyclicTwoSidedH { h } => {
                range_check("h", h, 0, (n - 3) / 2, "0..=floor((N-3)/2)")
            }
        }
    }

    /// Computes `P_n` for every server.
    pub fn privacy_sets(
        &self,
        graph: &StorageGraph,
    ) -> Result<BTreeMap<ServerId, BTreeSet<MessageId>>> {
        self.validate(graph)?;
        let n = graph.n_servers() as i64;
        let k_max = graph.n_messages();
        let mut sets = BTreeMap::new();
        for server in graph.servers() {
            let s = server.index() as i64;
            let set: BTreeSet<MessageId> = match *self {
                PrivacySetting::PathModifiedEdge => {
                    // Interior servers are local; the two edge servers
                    // inherit their inner neighbor's storage.
                    let pivot = if s == 1 {
                        2
                    } else if s == n {
                        n - 1
                    } else {
                        s
                    };
                    graph.stores(ServerId::new(pivot as u32))
                }
                PrivacySetting::PathOneSidedH { h } => {
                    path_range(s - 1, s + h as i64, k_max)
                }
                PrivacySetting::PathTwoSidedH { h } => {
                    path_range(s - h as i64 - 1, s + h as i64, k_max)
                }
                PrivacySetting::PathTwoSidedHModEdge { h } => {
                    let pivot = if s == 1 {
                        2
                    } else if s == n {
                        n - 1
                    } else {
                        s
                    };
                    path_range(pivot - h as i64 - 1, pivot + h as i64, k_max)
                }
                PrivacySetting::CyclicFirstNeighbor => {
                    cyclic_range(graph, s - 1, s + 1)
                }
                PrivacySetting::CyclicIthNeighbor { i } => {
                    let mut set = cyclic_range(graph, s - 1, s);
                    set.extend(cyclic_range(graph, s + i as i64 - 1, s + i as i64));
                    set
                }
                PrivacySetting::CyclicOneSidedH { h } => {
                    cyclic_range(graph, s - 1, s + h as i64)
                }
                PrivacySetting::CyclicTwoSidedH { h } => {
                    cyclic_range(graph, s - h as i64 - 1, s + h as i64)
                }
            };
            debug_assert!(
                graph.stores(server).is_subset(&set),
                "I_n must be contained in P_n"
            );
            sets.insert(server, set);
        }
        Ok(sets)
    }

    /// The set of servers whose privacy set contains `k` (the servers a
    /// retrieval of `W_k` must hide itself from).
    pub fn servers_requiring_privacy(
        &self,
        graph: &StorageGraph,
        k: MessageId,
    ) -> Result<BTreeSet<ServerId>> {
        if k.index() > graph.n_messages() {
            return Err(Error::ParameterRange(format!(
                "message index {} exceeds K = {}",
                k.index(),
                graph.n_messages()
            )));
        }
        let sets = self.privacy_sets(graph)?;
        Ok(sets
            .into_iter()
            .filter(|(_, p)| p.contains(&k))
            .map(|(s, _)| s)
            .collect())
    }
}

fn range_check(name: &str, val: u32, lo: u32, hi: u32, range: &str) -> Result<()> {
    if val < lo || val > hi {
        Err(Error::ParameterRange(format!(
            "{name} = {val} outside {range} (= {lo}..={hi} here)"
        )))
    } else {
        Ok(())
    }
}

/// `[lo:hi]` clipped to `[1, k_max]` on a path.
fn path_range(lo: i64, hi: i64, k_max: u32) -> BTreeSet<MessageId> {
    let lo = lo.max(1);
    let hi = hi.min(k_max as i64);
    (lo..=hi).map(|k| MessageId::new(k as u32)).collect()
}

/// `[lo:hi]` as a wrapping interval of message indices on a cycle. When
/// the interval covers at least `N` positions it is the full index set.
fn cyclic_range(graph: &StorageGraph, lo: i64, hi: i64) -> BTreeSet<MessageId> {
    let n = graph.n_servers() as i64;
    let span = hi - lo + 1;
    if span >= n {
        return graph.messages().collect();
    }
    (lo..=hi).map(|k| graph.wrap_message(k)).collect()
}

/// One accepted (setting, graph) pair per rule, plus size variants.
/// Shared across this crate's module tests.
#[cfg(test)]
pub(crate) fn all_test_settings() -> Vec<(PrivacySetting, StorageGraph)> {
    let path = |n| StorageGraph::build(GraphKind::Path, n).unwrap();
    let cycle = |n| StorageGraph::build(GraphKind::Cycle, n).unwrap();
    vec![
        (PrivacySetting::PathModifiedEdge, path(4)),
        (PrivacySetting::PathModifiedEdge, path(7)),
        (PrivacySetting::PathOneSidedH { h: 1 }, path(6)),
        (PrivacySetting::PathOneSidedH { h: 4 }, path(6)),
        (PrivacySetting::PathTwoSidedH { h: 1 }, path(5)),
        (PrivacySetting::PathTwoSidedH { h: 3 }, path(7)),
        (PrivacySetting::PathTwoSidedHModEdge { h: 0 }, path(5)),
        (PrivacySetting::PathTwoSidedHModEdge { h: 2 }, path(8)),
        (PrivacySetting::CyclicFirstNeighbor, cycle(5)),
        (PrivacySetting::CyclicFirstNeighbor, cycle(8)),
        (PrivacySetting::CyclicIthNeighbor { i: 2 }, cycle(6)),
        (PrivacySetting::CyclicIthNeighbor { i: 3 }, cycle(7)),
        (PrivacySetting::CyclicOneSidedH { h: 0 }, cycle(5)),
        (PrivacySetting::CyclicOneSidedH { h: 2 }, cycle(5)),
        (PrivacySetting::CyclicOneSidedH { h: 3 }, cycle(6)),
        (PrivacySetting::CyclicTwoSidedH { h: 0 }, cycle(4)),
        (PrivacySetting::CyclicTwoSidedH { h: 1 }, cycle(5)),
        (PrivacySetting::CyclicTwoSidedH { h: 2 }, cycle(7)),
    ]
}
