//! Finite-field symbol arithmetic, linear-combination requests, symbol
//! permutations, and an exact linear solver.
//!
//! Everything a server ever sends back is a linear combination of stored
//! message symbols over a prime field `GF(q)`. Decoding and decodability
//! proofs therefore reduce to exact linear algebra: a symbol is
//! recoverable iff its unit vector lies in the row span of the received
//! equations' coefficient matrix. No floating point is involved anywhere.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MessageId;

/// A prime field `GF(q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    q: u64,
}

impl FieldSpec {
    /// The default field: `GF(2)`. Every built-in scheme uses
    /// coefficient-1 sums, so binary symbols suffice.
    pub const GF2: FieldSpec = FieldSpec { q: 2 };

    pub fn new(q: u64) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::ParameterRange(format!(
                "field modulus must be prime, got {q}"
            )));
        }
        Ok(FieldSpec { q })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.q - b % self.q) % self.q
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.q && b < self.q);
        // Desk-scale moduli: products stay far away from u64 overflow.
        (a * b) % self.q
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.q != 0, "zero has no inverse");
        self.pow(a % self.q, self.q - 2)
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.q - a % self.q) % self.q
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Draws a uniform element of the field.
    pub fn sample(&self, rng: &mut impl rand::Rng) -> u64 {
        rng.gen_range(0..self.q)
    }
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A single message symbol: the `sym`th symbol (1-based) of message `msg`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SymbolRef {
    pub msg: MessageId,
    pub sym: u32,
}

impl SymbolRef {
    pub fn new(msg: MessageId, sym: u32) -> Self {
        assert!(sym >= 1, "symbol indices are 1-based");
        SymbolRef { msg, sym }
    }
}

impl fmt::Display for SymbolRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}[{}]", self.msg.index(), self.sym)
    }
}

/// A non-empty linear combination of message symbols with nonzero
/// coefficients, kept in canonical `(msg, sym)` order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinComb {
    terms: BTreeMap<SymbolRef, u64>,
}

impl LinComb {
    /// A single symbol with coefficient 1.
    pub fn single(sym: SymbolRef) -> Self {
        LinComb {
            terms: BTreeMap::from([(sym, 1)]),
        }
    }

    /// The coefficient-1 sum of two symbols.
    pub fn sum(a: SymbolRef, b: SymbolRef) -> Self {
        assert_ne!(a, b, "a chain sum never repeats a symbol");
        LinComb {
            terms: BTreeMap::from([(a, 1), (b, 1)]),
        }
    }

    /// Builds a combination from explicit terms. Coefficients must be
    /// nonzero; the set must be non-empty.
    pub fn from_terms(terms: impl IntoIterator<Item = (SymbolRef, u64)>) -> Result<Self> {
        let terms: BTreeMap<SymbolRef, u64> = terms.into_iter().collect();
        if terms.is_empty() {
            return Err(Error::ParameterRange(
                "a linear combination needs at least one term".into(),
            ));
        }
        if terms.values().any(|&c| c == 0) {
            return Err(Error::ParameterRange(
                "linear combination coefficients must be nonzero".into(),
            ));
        }
        Ok(LinComb { terms })
    }

    pub fn terms(&self) -> impl Iterator<Item = (SymbolRef, u64)> + '_ {
        self.terms.iter().map(|(&s, &c)| (s, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The set of messages this combination touches.
    pub fn messages(&self) -> BTreeSet<MessageId> {
        self.terms.keys().map(|s| s.msg).collect()
    }

    /// Canonical text form: terms joined by `+`, each `W<msg>[<sym>]`
    /// with a `<coeff>*` prefix when the coefficient exceeds 1.
    pub fn render(&self) -> String {
        self.terms
            .iter()
            .map(|(s, &c)| {
                if c == 1 {
                    s.to_string()
                } else {
                    format!("{c}*{s}")
                }
            })
            .collect::<Vec<_>>()
            .join("+")
    }

    /// Parses the canonical text form. The inverse of [`render`](Self::render).
    pub fn parse(text: &str) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for part in text.split('+') {
            let (coeff, rest) = match part.split_once('*') {
                Some((c, rest)) => {
                    let coeff = parse_uint(c, part)?;
                    if coeff < 2 {
                        return Err(parse_err(part, "coefficient prefixes start at 2"));
                    }
                    (coeff, rest)
                }
                None => (1, part),
            };
            let rest = rest
                .strip_prefix('W')
                .ok_or_else(|| parse_err(part, "expected `W`"))?;
            let (msg, sym) = rest
                .split_once('[')
                .ok_or_else(|| parse_err(part, "expected `[`"))?;
            let sym = sym
                .strip_suffix(']')
                .ok_or_else(|| parse_err(part, "expected `]`"))?;
            let msg = parse_uint(msg, part)?;
            let sym = parse_uint(sym, part)?;
            if msg < 1 || sym < 1 || msg > u32::MAX as u64 || sym > u32::MAX as u64 {
                return Err(parse_err(part, "indices are 1-based 32-bit integers"));
            }
            let key = SymbolRef::new(MessageId::new(msg as u32), sym as u32);
            if terms.insert(key, coeff).is_some() {
                return Err(parse_err(part, "duplicate term"));
            }
        }
        LinComb::from_terms(terms)
    }
}

fn parse_uint(text: &str, context: &str) -> Result<u64> {
    if text.is_empty() || text.starts_with('0') && text != "0" || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_err(context, "expected an unsigned decimal"));
    }
    text.parse()
        .map_err(|_| parse_err(context, "integer out of range"))
}

fn parse_err(context: &str, what: &str) -> Error {
    Error::ParameterRange(format!("cannot parse `{context}`: {what}"))
}

impl fmt::Display for LinComb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

// Combinations serialize as their canonical text form, keeping
// transcripts and audit reports readable and byte-stable.
impl serde::Serialize for LinComb {
    fn serialize<S>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error>
    where
        S: serde::Serializer,
    {
        serializer.serialize_str(&self.render())
    }
}

impl<'de> serde::Deserialize<'de> for LinComb {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let text = String::deserialize(deserializer)?;
        LinComb::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// The user's private per-message symbol permutations. `pi(k)` maps the
/// logical symbol position to the raw stored index that is actually
/// requested on the wire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationProfile {
    /// `pi[k][j-1]` = raw index of logical symbol `j` of message `k`.
    pi: BTreeMap<MessageId, Vec<u32>>,
    l: u32,
}

impl PermutationProfile {
    /// The identity profile on `k_count` messages of length `l`.
    pub fn identity(k_count: u32, l: u32) -> Self {
        let pi = (1..=k_count)
            .map(|k| (MessageId::new(k), (1..=l).collect()))
            .collect();
        PermutationProfile { pi, l }
    }

    /// Builds a profile from explicit permutations; each must be a
    /// bijection on `[1, l]`.
    pub fn from_perms(perms: BTreeMap<MessageId, Vec<u32>>, l: u32) -> Result<Self> {
        for (k, perm) in &perms {
            let mut seen: Vec<u32> = perm.clone();
            seen.sort_unstable();
            let expect: Vec<u32> = (1..=l).collect();
            if seen != expect {
                return Err(Error::ParameterRange(format!(
                    "permutation for {k} is not a bijection on 1..={l}"
                )));
            }
        }
        Ok(PermutationProfile { pi: perms, l })
    }

    /// Draws every permutation independently and uniformly.
    pub fn sample(rng: &mut impl rand::Rng, k_count: u32, l: u32) -> Self {
        use rand::seq::SliceRandom;
        let pi = (1..=k_count)
            .map(|k| {
                let mut perm: Vec<u32> = (1..=l).collect();
                perm.shuffle(rng);
                (MessageId::new(k), perm)
            })
            .collect();
        PermutationProfile { pi, l }
    }

    /// Enumerates all `(l!)^k_count` profiles in a deterministic order.
    pub fn enumerate_all(k_count: u32, l: u32) -> Vec<PermutationProfile> {
        let perms = permutations(l);
        let mut out = Vec::new();
        let mut counters = vec![0usize; k_count as usize];
        loop {
            let pi = (1..=k_count)
                .map(|k| (MessageId::new(k), perms[counters[(k - 1) as usize]].clone()))
                .collect();
            out.push(PermutationProfile { pi, l });
            // Odometer increment over the per-message permutation choices.
            let mut pos = 0usize;
            loop {
                if pos == counters.len() {
                    return out;
                }
                counters[pos] += 1;
                if counters[pos] < perms.len() {
                    break;
                }
                counters[pos] = 0;
                pos += 1;
            }
        }
    }

    pub fn message_len(&self) -> u32 {
        self.l
    }

    /// Maps a logical symbol position of `msg` to its raw index.
    pub fn apply(&self, msg: MessageId, logical_sym: u32) -> Result<u32> {
        if logical_sym < 1 || logical_sym > self.l {
            return Err(Error::ParameterRange(format!(
                "symbol index {logical_sym} outside 1..={}",
                self.l
            )));
        }
        let perm = self.pi.get(&msg).ok_or_else(|| {
            Error::ParameterRange(format!("no permutation for {msg} in this profile"))
        })?;
        Ok(perm[(logical_sym - 1) as usize])
    }

    /// Maps a raw index back to its logical position.
    pub fn invert(&self, msg: MessageId, raw_sym: u32) -> Result<u32> {
        let perm = self.pi.get(&msg).ok_or_else(|| {
            Error::ParameterRange(format!("no permutation for {msg} in this profile"))
        })?;
        perm.iter()
            .position(|&r| r == raw_sym)
            .map(|p| (p + 1) as u32)
            .ok_or_else(|| {
                Error::ParameterRange(format!("raw index {raw_sym} outside 1..={}", self.l))
            })
    }

    /// A permuted symbol reference: `W_msg(logical_sym)` as it appears on
    /// the wire.
    pub fn symbol(&self, msg: MessageId, logical_sym: u32) -> Result<SymbolRef> {
        Ok(SymbolRef::new(msg, self.apply(msg, logical_sym)?))
    }
}

fn permutations(l: u32) -> Vec<Vec<u32>> {
    let mut items: Vec<u32> = (1..=l).collect();
    let mut out = Vec::new();
    heap_permute(&mut items, l as usize, &mut out);
    out.sort();
    out
}

fn heap_permute(items: &mut Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

/// The full message contents: every message has exactly `L` field
/// elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageStore {
    l: u32,
    contents: BTreeMap<MessageId, Vec<u64>>,
}

impl MessageStore {
    pub fn new(contents: BTreeMap<MessageId, Vec<u64>>, l: u32, field: FieldSpec) -> Result<Self> {
        for (k, vals) in &contents {
            if vals.len() != l as usize {
                return Err(Error::ParameterRange(format!(
                    "{k} has {} symbols, expected {l}",
                    vals.len()
                )));
            }
            if vals.iter().any(|&v| v >= field.q()) {
                return Err(Error::ParameterRange(format!(
                    "{k} contains values outside GF({})",
                    field.q()
                )));
            }
        }
        Ok(MessageStore { l, contents })
    }

    pub fn message_len(&self) -> u32 {
        self.l
    }

    pub fn messages(&self) -> impl Iterator<Item = MessageId> + '_ {
        self.contents.keys().copied()
    }

    pub fn message(&self, k: MessageId) -> Option<&[u64]> {
        self.contents.get(&k).map(|v| v.as_slice())
    }

    pub fn symbol(&self, sym: SymbolRef) -> Result<u64> {
        self.contents
            .get(&sym.msg)
            .and_then(|v| v.get((sym.sym - 1) as usize))
            .copied()
            .ok_or(Error::Unresolved(sym))
    }

    /// Restricts the store to a subset of messages (a server shard).
    pub fn restrict(&self, keep: &BTreeSet<MessageId>) -> MessageStore {
        MessageStore {
            l: self.l,
            contents: self
                .contents
                .iter()
                .filter(|(k, _)| keep.contains(k))
                .map(|(&k, v)| (k, v.clone()))
                .collect(),
        }
    }
}

/// Evaluates a linear combination against a store: `Σ coeff·symbol mod q`.
pub fn evaluate(comb: &LinComb, store: &MessageStore, field: FieldSpec) -> Result<u64> {
    let mut acc = 0u64;
    for (sym, coeff) in comb.terms() {
        let val = store.symbol(sym)?;
        acc = field.add(acc, field.mul(coeff % field.q(), val));
    }
    Ok(acc)
}

/// Outcome of [`solve_targets`]: either a value for every requested
/// target, or the set of targets outside the equations' span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Values(BTreeMap<SymbolRef, u64>),
    Infeasible { unreachable: Vec<SymbolRef> },
}

impl Solution {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Solution::Values(_))
    }

    pub fn value(&self, target: SymbolRef) -> Option<u64> {
        match self {
            Solution::Values(m) => m.get(&target).copied(),
            Solution::Infeasible { .. } => None,
        }
    }
}

/// Solves for `targets` given linear equations over `GF(q)`.
///
/// A target is recoverable iff its unit vector lies in the row span of
/// the coefficient matrix; this is decided exactly by Gaussian
/// elimination, independent of the right-hand sides. Equations are
/// assumed consistent (they are whenever they came from evaluating one
/// store).
pub fn solve_targets(
    equations: &[(LinComb, u64)],
    targets: &[SymbolRef],
    field: FieldSpec,
) -> Solution {
    // Column index for every symbol that appears anywhere.
    let mut vars: BTreeSet<SymbolRef> = targets.iter().copied().collect();
    for (comb, _) in equations {
        vars.extend(comb.terms().map(|(s, _)| s));
    }
    let vars: Vec<SymbolRef> = vars.into_iter().collect();
    let col: BTreeMap<SymbolRef, usize> = vars.iter().copied().zip(0..).collect();

    // Rows of [A | b].
    let mut rows: Vec<(Vec<u64>, u64)> = equations
        .iter()
        .map(|(comb, rhs)| {
            let mut row = vec![0u64; vars.len()];
            for (sym, coeff) in comb.terms() {
                row[col[&sym]] = coeff % field.q();
            }
            (row, *rhs % field.q())
        })
        .collect();

    // Reduced row echelon form; remember each pivot's column.
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut next_row = 0usize;
    for c in 0..vars.len() {
        let Some(pivot_row) = (next_row..rows.len()).find(|&r| rows[r].0[c] != 0) else {
            continue;
        };
        rows.swap(next_row, pivot_row);
        let inv = field.inv(rows[next_row].0[c]);
        scale_row(&mut rows[next_row], inv, field);
        for r in 0..rows.len() {
            if r != next_row && rows[r].0[c] != 0 {
                let factor = rows[r].0[c];
                let (head, tail) = rows.split_at_mut(r.max(next_row));
                let (target, source) = if r < next_row {
                    (&mut head[r], &tail[0])
                } else {
                    (&mut tail[0], &head[next_row])
                };
                subtract_scaled(target, source, factor, field);
            }
        }
        pivots.push((next_row, c));
        next_row += 1;
    }

    // Express each target's unit vector in terms of the pivot rows.
    let mut values = BTreeMap::new();
    let mut unreachable = Vec::new();
    for &target in targets {
        let t = col[&target];
        let mut residual = vec![0u64; vars.len()];
        residual[t] = 1;
        let mut rhs_acc = 0u64;
        for &(r, c) in &pivots {
            let factor = residual[c];
            if factor != 0 {
                rhs_acc = field.add(rhs_acc, field.mul(factor, rows[r].1));
                for i in 0..residual.len() {
                    residual[i] = field.sub(residual[i], field.mul(factor, rows[r].0[i]));
                }
            }
        }
        if residual.iter().all(|&v| v == 0) {
            values.insert(target, rhs_acc);
        } else {
            unreachable.push(target);
        }
    }
    if unreachable.is_empty() {
        Solution::Values(values)
    } else {
        Solution::Infeasible { unreachable }
    }
}

fn scale_row(row: &mut (Vec<u64>, u64), factor: u64, field: FieldSpec) {
    for v in row.0.iter_mut() {
        *v = field.mul(*v, factor);
    }
    row.1 = field.mul(row.1, factor);
}

fn subtract_scaled(target: &mut (Vec<u64>, u64), source: &(Vec<u64>, u64), factor: u64, field: FieldSpec) {
    for (t, &s) in target.0.iter_mut().zip(source.0.iter()) {
        *t = field.sub(*t, field.mul(factor, s));
    }
    target.1 = field.sub(target.1, field.mul(factor, source.1));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MessageId;

    fn sym(msg: u32, s: u32) -> SymbolRef {
        SymbolRef::new(MessageId::new(msg), s)
    }

    fn store(pairs: &[(u32, [u64; 2])], field: FieldSpec) -> MessageStore {
        let contents = pairs
            .iter()
            .map(|&(k, v)| (MessageId::new(k), v.to_vec()))
            .collect();
        MessageStore::new(contents, 2, field).unwrap()
    }

    #[test]
    fn identity_and_swap_permutations() {
        let id = PermutationProfile::identity(3, 2);
        assert_eq!(id.apply(MessageId::new(1), 2).unwrap(), 2);

        let mut perms = BTreeMap::new();
        perms.insert(MessageId::new(3), vec![2, 1]);
        let swap = PermutationProfile::from_perms(perms, 2).unwrap();
        assert_eq!(swap.apply(MessageId::new(3), 1).unwrap(), 2);
        assert_eq!(swap.apply(MessageId::new(3), 2).unwrap(), 1);
    }

    #[test]
    fn uniform_profile_output_is_uniform() {
        // Enumerating both L=2 permutations: each raw index shows up once.
        let all = PermutationProfile::enumerate_all(1, 2);
        assert_eq!(all.len(), 2);
        let raws: Vec<u32> = all
            .iter()
            .map(|p| p.apply(MessageId::new(1), 1).unwrap())
            .collect();
        let mut sorted = raws.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![1, 2]);
    }

    #[test]
    fn enumerate_all_counts() {
        assert_eq!(PermutationProfile::enumerate_all(3, 2).len(), 8);
        assert_eq!(PermutationProfile::enumerate_all(2, 3).len(), 36);
    }

    #[test]
    fn apply_then_invert_is_identity() {
        for profile in PermutationProfile::enumerate_all(2, 3) {
            for k in 1..=2u32 {
                for j in 1..=3u32 {
                    let raw = profile.apply(MessageId::new(k), j).unwrap();
                    assert_eq!(profile.invert(MessageId::new(k), raw).unwrap(), j);
                }
            }
        }
    }

    #[test]
    fn evaluate_examples() {
        let gf2 = FieldSpec::GF2;
        let s = store(&[(1, [1, 0]), (5, [1, 1])], gf2);
        let comb = LinComb::sum(sym(1, 1), sym(5, 1));
        assert_eq!(evaluate(&comb, &s, gf2).unwrap(), 0); // 1+1 mod 2

        let s2 = store(&[(2, [0, 1])], gf2);
        assert_eq!(evaluate(&LinComb::single(sym(2, 2)), &s2, gf2).unwrap(), 1);

        let gf3 = FieldSpec::new(3).unwrap();
        let s3 = store(&[(1, [1, 0]), (2, [1, 2])], gf3);
        let comb3 = LinComb::sum(sym(1, 1), sym(2, 1));
        assert_eq!(evaluate(&comb3, &s3, gf3).unwrap(), 2); // 1+1 mod 3
    }

    #[test]
    fn evaluate_unresolved_reference() {
        let gf2 = FieldSpec::GF2;
        let s = store(&[(1, [1, 0])], gf2);
        let comb = LinComb::single(sym(9, 1));
        assert_eq!(
            evaluate(&comb, &s, gf2),
            Err(Error::Unresolved(sym(9, 1)))
        );
    }

    #[test]
    fn solve_direct_read() {
        let gf2 = FieldSpec::GF2;
        let eqs = vec![(LinComb::single(sym(1, 1)), 1)];
        let sol = solve_targets(&eqs, &[sym(1, 1)], gf2);
        assert_eq!(sol.value(sym(1, 1)), Some(1));
    }

    #[test]
    fn solve_by_elimination() {
        // W1[2] + W2[1] = v, W2[1] = w  =>  W1[2] = v - w. Independently:
        // over GF(3) with v = 1, w = 2 the answer is 1 - 2 = 2 mod 3.
        let gf3 = FieldSpec::new(3).unwrap();
        let eqs = vec![
            (LinComb::sum(sym(1, 2), sym(2, 1)), 1),
            (LinComb::single(sym(2, 1)), 2),
        ];
        let sol = solve_targets(&eqs, &[sym(1, 2)], gf3);
        assert_eq!(sol.value(sym(1, 2)), Some(2));
    }

    #[test]
    fn solve_underdetermined_is_infeasible() {
        let gf2 = FieldSpec::GF2;
        let eqs = vec![(LinComb::sum(sym(1, 1), sym(2, 1)), 1)];
        let sol = solve_targets(&eqs, &[sym(1, 1)], gf2);
        assert_eq!(
            sol,
            Solution::Infeasible {
                unreachable: vec![sym(1, 1)]
            }
        );
    }

    #[test]
    fn render_and_parse() {
        let comb = LinComb::sum(sym(1, 2), sym(2, 1));
        assert_eq!(comb.render(), "W1[2]+W2[1]");
        assert_eq!(LinComb::parse("W1[2]+W2[1]").unwrap(), comb);

        let with_coeff = LinComb::from_terms([(sym(1, 1), 2), (sym(2, 2), 1)]).unwrap();
        assert_eq!(with_coeff.render(), "2*W1[1]+W2[2]");
        assert_eq!(LinComb::parse("2*W1[1]+W2[2]").unwrap(), with_coeff);

        assert!(LinComb::parse("").is_err());
        assert!(LinComb::parse("W1[0]").is_err());
        assert!(LinComb::parse("1*W1[1]").is_err());
        assert!(LinComb::parse("W01[1]").is_err());
    }

    #[test]
    fn canonical_term_order() {
        let a = LinComb::sum(sym(5, 1), sym(1, 1));
        let b = LinComb::sum(sym(1, 1), sym(5, 1));
        assert_eq!(a, b);
        assert_eq!(a.render(), "W1[1]+W5[1]");
    }
}
