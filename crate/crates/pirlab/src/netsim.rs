//! A simulated multi-server network with a bit-exact wire format.
//!
//! One user node talks to `N` server nodes. Each server holds only its
//! own shard and statelessly maps queries to answers; the user draws its
//! permutation profile from seeded randomness and never sees a store it
//! did not reconstruct. Uncontacted servers receive no message at all —
//! a null query is the *absence* of traffic, so a silent server cannot
//! even tell that a retrieval is underway.
//!
//! Transport is an in-process network with per-link FIFO order and a
//! deterministic round-robin schedule. Messages cross it encoded; the
//! codec is canonical (one byte sequence per message value), so swapping
//! in a socket transport would not change any observable behavior.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::algebra::{FieldSpec, LinComb, MessageStore, PermutationProfile};
use crate::error::{Error, Result};
use crate::model::{MessageId, PrivacySetting, ServerId, StorageGraph};
use crate::schemes::{decode, plan_for, Transcript};

/// A storage server: an id, the shard it stores, and the field it
/// computes in.
#[derive(Debug, Clone)]
pub struct ServerNode {
    id: ServerId,
    shard: MessageStore,
    field: FieldSpec,
    graph: StorageGraph,
}

impl ServerNode {
    pub fn id(&self) -> ServerId {
        self.id
    }

    /// The messages this node holds.
    pub fn shard(&self) -> &MessageStore {
        &self.shard
    }

    /// Maps a query to an answer. Pure in `(shard, query)`: no session
    /// state, no clock, no global store.
    pub fn handle(&self, query: &[LinComb]) -> Result<Vec<u64>> {
        crate::schemes::answer(&self.graph, self.id, query, &self.shard, self.field)
    }
}

/// The retrieving user.
#[derive(Debug, Clone)]
pub struct UserNode {
    pub setting: PrivacySetting,
    pub graph: StorageGraph,
    pub rng_seed: u64,
    pub field: FieldSpec,
}

/// Samples message contents from seeded randomness and shards them onto
/// server nodes. Returns the full store as well, for oracle comparison
/// in tests; protocol code must only ever touch the nodes.
pub fn provision(
    graph: &StorageGraph,
    field: FieldSpec,
    seed: u64,
) -> (Vec<ServerNode>, MessageStore) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let l = 2u32;
    let contents: BTreeMap<MessageId, Vec<u64>> = graph
        .messages()
        .map(|k| (k, (0..l).map(|_| field.sample(&mut rng)).collect()))
        .collect();
    let store = MessageStore::new(contents, l, field).expect("sampled store is valid");
    let nodes = graph
        .servers()
        .map(|id| ServerNode {
            id,
            shard: store.restrict(&graph.stores(id)),
            field,
            graph: graph.clone(),
        })
        .collect();
    (nodes, store)
}

/// Message direction on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WireKind {
    Query,
    Answer,
}

/// Payload of a wire message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WirePayload {
    /// The combination list a server is asked to evaluate.
    Query(Vec<LinComb>),
    /// The field elements it returns.
    Answer(Vec<u64>),
}

/// One message on the simulated wire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireMessage {
    pub session: u64,
    pub server: ServerId,
    pub payload: WirePayload,
}

impl WireMessage {
    pub fn kind(&self) -> WireKind {
        match self.payload {
            WirePayload::Query(_) => WireKind::Query,
            WirePayload::Answer(_) => WireKind::Answer,
        }
    }
}

/// Errors from [`decode_wire`]. `offset` is the byte position where the
/// input stopped being a canonical encoding.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("wire parse error at byte {offset}: expected {expected}")]
pub struct WireParseError {
    pub offset: usize,
    pub expected: String,
}

/// Encodes a message canonically: a decimal byte-length prefix, a colon,
/// then a fixed-key-order JSON document
/// `{"kind":…,"session":…,"server":…,"payload":…}` with integers as
/// unsigned decimals and the payload in canonical text form (combs
/// joined by `;`, answer values joined by `,`).
pub fn encode_wire(msg: &WireMessage) -> Vec<u8> {
    let kind = match msg.kind() {
        WireKind::Query => "query",
        WireKind::Answer => "answer",
    };
    let payload = match &msg.payload {
        WirePayload::Query(combs) => combs
            .iter()
            .map(|c| c.render())
            .collect::<Vec<_>>()
            .join(";"),
        WirePayload::Answer(values) => values
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    };
    let doc = format!(
        "{{\"kind\":\"{kind}\",\"session\":{},\"server\":{},\"payload\":\"{payload}\"}}",
        msg.session,
        msg.server.index(),
    );
    format!("{}:{doc}", doc.len()).into_bytes()
}

/// Decodes a canonical wire encoding. Strict: exactly the bytes
/// [`encode_wire`] produces are accepted, so `encode(decode(b)) == b`
/// whenever decoding succeeds.
pub fn decode_wire(bytes: &[u8]) -> std::result::Result<WireMessage, WireParseError> {
    let mut p = Parser::new(bytes);
    let declared_len = p.uint("a decimal length prefix")?;
    p.literal(b":")?;
    let body_start = p.pos;
    p.literal(b"{\"kind\":\"")?;
    let kind = p.until_quote("a message kind")?;
    let kind = match kind.as_str() {
        "query" => WireKind::Query,
        "answer" => WireKind::Answer,
        _ => {
            return Err(WireParseError {
                offset: body_start,
                expected: "kind `query` or `answer`".into(),
            })
        }
    };
    p.literal(b"\",\"session\":")?;
    let session = p.uint("a session id")?;
    p.literal(b",\"server\":")?;
    let server = p.uint("a server index")?;
    if server < 1 || server > u32::MAX as u64 {
        return Err(WireParseError {
            offset: p.pos,
            expected: "a 1-based server index".into(),
        });
    }
    p.literal(b",\"payload\":\"")?;
    let payload_text = p.until_quote("a payload")?;
    p.literal(b"\"}")?;
    if p.pos - body_start != declared_len as usize {
        return Err(WireParseError {
            offset: p.pos,
            expected: format!("a length prefix of {}", p.pos - body_start),
        });
    }
    if p.pos != bytes.len() {
        return Err(WireParseError {
            offset: p.pos,
            expected: "end of input".into(),
        });
    }
    let payload = match kind {
        WireKind::Query => {
            let combs = if payload_text.is_empty() {
                Vec::new()
            } else {
                payload_text
                    .split(';')
                    .map(LinComb::parse)
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| WireParseError {
                        offset: p.pos,
                        expected: format!("a canonical query payload ({e})"),
                    })?
            };
            WirePayload::Query(combs)
        }
        WireKind::Answer => {
            let values = if payload_text.is_empty() {
                Vec::new()
            } else {
                payload_text
                    .split(',')
                    .map(|v| {
                        if v.is_empty() || v.len() > 1 && v.starts_with('0') {
                            return Err(WireParseError {
                                offset: p.pos,
                                expected: "unsigned decimal answer values".into(),
                            });
                        }
                        v.parse::<u64>().map_err(|_| WireParseError {
                            offset: p.pos,
                            expected: "unsigned decimal answer values".into(),
                        })
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()?
            };
            WirePayload::Answer(values)
        }
    };
    let msg = WireMessage {
        session,
        server: ServerId::new(server as u32),
        payload,
    };
    // Canonicality backstop: combs re-render in sorted term order, so a
    // payload that parsed but was written non-canonically re-encodes
    // differently and is rejected with the first differing byte.
    let reencoded = encode_wire(&msg);
    if reencoded != bytes {
        let offset = reencoded
            .iter()
            .zip(bytes.iter())
            .position(|(a, b)| a != b)
            .unwrap_or_else(|| reencoded.len().min(bytes.len()));
        return Err(WireParseError {
            offset,
            expected: "a canonical encoding".into(),
        });
    }
    Ok(msg)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Parser { bytes, pos: 0 }
    }

    fn literal(&mut self, lit: &[u8]) -> std::result::Result<(), WireParseError> {
        for (i, &b) in lit.iter().enumerate() {
            if self.bytes.get(self.pos + i) != Some(&b) {
                return Err(WireParseError {
                    offset: self.pos + i,
                    expected: format!("`{}`", String::from_utf8_lossy(lit)),
                });
            }
        }
        self.pos += lit.len();
        Ok(())
    }

    fn uint(&mut self, what: &str) -> std::result::Result<u64, WireParseError> {
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
        }
        let digits = &self.bytes[start..self.pos];
        if digits.is_empty() || (digits.len() > 1 && digits[0] == b'0') {
            return Err(WireParseError {
                offset: start,
                expected: what.into(),
            });
        }
        std::str::from_utf8(digits)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| WireParseError {
                offset: start,
                expected: what.into(),
            })
    }

    fn until_quote(&mut self, what: &str) -> std::result::Result<String, WireParseError> {
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'"' {
                let text = std::str::from_utf8(&self.bytes[start..self.pos])
                    .map_err(|_| WireParseError {
                        offset: start,
                        expected: "UTF-8 text".into(),
                    })?
                    .to_string();
                return Ok(text);
            }
            self.pos += 1;
        }
        Err(WireParseError {
            offset: self.pos,
            expected: what.into(),
        })
    }
}

/// The in-process transport: per-destination FIFO queues drained in
/// deterministic round-robin order.
#[derive(Debug, Default)]
struct SimNetwork {
    /// Inbound query bytes per server.
    to_servers: BTreeMap<ServerId, Vec<Vec<u8>>>,
    /// Answer bytes on their way back, merged by (round, server id).
    to_user: Vec<Vec<u8>>,
}

impl SimNetwork {
    fn send_query(&mut self, server: ServerId, bytes: Vec<u8>) {
        self.to_servers.entry(server).or_default().push(bytes);
    }

    /// One scheduler round: every server handles at most one inbound
    /// message, in server-id order.
    fn step(&mut self, nodes: &BTreeMap<ServerId, &ServerNode>) -> Result<bool> {
        let mut progressed = false;
        for (&id, node) in nodes {
            let Some(queue) = self.to_servers.get_mut(&id) else {
                continue;
            };
            if queue.is_empty() {
                continue;
            }
            progressed = true;
            let bytes = queue.remove(0);
            let msg = decode_wire(&bytes).map_err(|e| Error::Session(e.to_string()))?;
            let WirePayload::Query(combs) = msg.payload else {
                return Err(Error::Session(format!(
                    "server {} received a non-query message",
                    id.index()
                )));
            };
            let values = node.handle(&combs)?;
            let reply = WireMessage {
                session: msg.session,
                server: id,
                payload: WirePayload::Answer(values),
            };
            self.to_user.push(encode_wire(&reply));
        }
        Ok(progressed)
    }
}

/// Runs one full retrieval over the simulated network and returns the
/// transcript. The decoded message always equals the provisioned one
/// when servers answer honestly.
pub fn run_session(user: &UserNode, servers: &[ServerNode], theta: MessageId) -> Result<Transcript> {
    let graph = &user.graph;
    if theta.index() < 1 || theta.index() > graph.n_messages() {
        return Err(Error::Session(format!(
            "theta = {} outside 1..={}",
            theta.index(),
            graph.n_messages()
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(user.rng_seed);
    let profile = PermutationProfile::sample(&mut rng, graph.n_messages(), 2);
    run_session_with_profile(user, servers, theta, &profile)
}

/// [`run_session`] with an explicit permutation profile; used by the CLI
/// to reproduce published tables with identity permutations.
pub fn run_session_with_profile(
    user: &UserNode,
    servers: &[ServerNode],
    theta: MessageId,
    profile: &PermutationProfile,
) -> Result<Transcript> {
    let graph = &user.graph;
    let nodes: BTreeMap<ServerId, &ServerNode> = servers.iter().map(|s| (s.id(), s)).collect();
    for id in graph.servers() {
        if !nodes.contains_key(&id) {
            return Err(Error::Session(format!(
                "no node provisioned for server {}",
                id.index()
            )));
        }
    }

    let plan = plan_for(&user.setting, graph, theta, profile)?;
    let session = user.rng_seed ^ u64::from(theta.index());

    let mut net = SimNetwork::default();
    // Null query = no message: only contacted servers hear anything.
    for server in plan.contacted_servers() {
        let msg = WireMessage {
            session,
            server,
            payload: WirePayload::Query(plan.queries[&server].clone()),
        };
        net.send_query(server, encode_wire(&msg));
    }
    while net.step(&nodes)? {}

    let mut answers: BTreeMap<ServerId, Vec<u64>> =
        graph.servers().map(|s| (s, Vec::new())).collect();
    for bytes in &net.to_user {
        let msg = decode_wire(bytes).map_err(|e| Error::Session(e.to_string()))?;
        if msg.session != session {
            return Err(Error::Session(format!(
                "answer for unknown session {}",
                msg.session
            )));
        }
        let WirePayload::Answer(values) = msg.payload else {
            return Err(Error::Session("user received a non-answer message".into()));
        };
        answers.insert(msg.server, values);
    }

    let decoded = decode(&plan, &answers, profile, user.field)?;
    Ok(Transcript {
        plan,
        answers,
        decoded,
    })
}
