//! Running test purposes against implementations, the acyclic-defeat
//! construction and the exponential lower-bound family.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog;
use crate::models::{Iolts, ModelError, Sym};
use crate::testgen::{model_sha256, FaultModel, Multigraph, Orientation, TestPurpose};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("tester and implementation alphabets do not match")]
    AlphabetMismatch,
    #[error("purpose {0:?} has a cycle outside its verdict states")]
    CyclicPurpose(String),
    #[error("fault model was not generated from the one-state a-loop specification")]
    NonCanonicalSpec,
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunVerdict {
    Pass,
    Fail,
    /// Passed without reaching either verdict state.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurposeRun {
    pub name: String,
    pub verdict: RunVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
}

impl PurposeRun {
    pub fn passed(&self) -> bool {
        self.verdict != RunVerdict::Fail
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregate {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub aggregate: Aggregate,
    pub purposes: Vec<PurposeRun>,
}

fn check_alphabets(tester: &TestPurpose, imp: &Iolts) -> Result<(), RunnerError> {
    let expected = match tester.orientation() {
        Orientation::Tester => tester.model().alphabet().swapped(),
        Orientation::Spec => tester.model().alphabet().clone(),
    };
    if &expected == imp.alphabet() {
        Ok(())
    } else {
        Err(RunnerError::AlphabetMismatch)
    }
}

/// Synchronous product of a tester and an implementation: internal moves
/// interleave, observable labels synchronize. Only reachable pairs are kept;
/// they are named `(t|q)`. The result uses the implementation's alphabet.
pub fn cross_product(tester: &TestPurpose, imp: &Iolts) -> Result<Iolts, RunnerError> {
    check_alphabets(tester, imp)?;
    let t = tester.model();
    let start = (t.initial(), imp.initial());
    let mut index: HashMap<(usize, usize), usize> = HashMap::from([(start, 0)]);
    let mut pairs = vec![start];
    let mut ts: Vec<(usize, Sym, usize)> = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        let mut moves = Vec::new();
        for &(l, p2) in t.successors(p) {
            match l {
                None => moves.push((None, (p2, q))),
                Some(l) => {
                    for &(m, q2) in imp.successors(q) {
                        if m == Some(l) {
                            moves.push((Some(l), (p2, q2)));
                        }
                    }
                }
            }
        }
        for &(m, q2) in imp.successors(q) {
            if m.is_none() {
                moves.push((None, (p, q2)));
            }
        }
        for (l, pair) in moves {
            let j = *index.entry(pair).or_insert_with(|| {
                pairs.push(pair);
                pairs.len() - 1
            });
            ts.push((i, l, j));
        }
        i += 1;
    }
    let states = pairs
        .iter()
        .map(|&(p, q)| format!("({}|{})", t.states()[p], imp.states()[q]))
        .collect();
    Ok(Iolts::assemble(imp.alphabet().clone(), states, 0, ts))
}

type Pair = (usize, usize);

/// Breadth-first search by number of observable labels, closing every layer
/// under internal moves. Returns the label word of the first goal found and
/// whether `mark` held at some visited pair.
fn shortest_to_goal(
    start: Pair,
    goal: impl Fn(Pair) -> bool,
    mark: impl Fn(Pair) -> bool,
    internal: impl Fn(Pair) -> Vec<Pair>,
    observable: impl Fn(Pair) -> Vec<(usize, Pair)>,
) -> (Option<Vec<usize>>, bool) {
    let mut parent: HashMap<Pair, (Pair, Sym)> = HashMap::new();
    let mut seen = BTreeSet::from([start]);
    let mut layer = vec![start];
    let mut marked = false;
    while !layer.is_empty() {
        let mut i = 0;
        while i < layer.len() {
            for next in internal(layer[i]) {
                if seen.insert(next) {
                    parent.insert(next, (layer[i], None));
                    layer.push(next);
                }
            }
            i += 1;
        }
        marked |= layer.iter().any(|&p| mark(p));
        if let Some(&found) = layer.iter().find(|&&p| goal(p)) {
            let mut word = Vec::new();
            let mut cur = found;
            while let Some(&(prev, l)) = parent.get(&cur) {
                word.extend(l);
                cur = prev;
            }
            word.reverse();
            return (Some(word), marked);
        }
        let mut next_layer = Vec::new();
        for &p in &layer {
            for (l, next) in observable(p) {
                if seen.insert(next) {
                    parent.insert(next, (p, Some(l)));
                    next_layer.push(next);
                }
            }
        }
        layer = next_layer;
    }
    (None, marked)
}

fn internal_moves(m: &Iolts, s: usize) -> impl Iterator<Item = usize> + '_ {
    m.successors(s).iter().filter(|t| t.0.is_none()).map(|t| t.1)
}

/// Runs one purpose. The verdict is `fail` when some `(fail, q)` pair is
/// reachable, with the shortest such trace as witness.
pub fn passes(imp: &Iolts, tp: &TestPurpose) -> Result<PurposeRun, RunnerError> {
    check_alphabets(tp, imp)?;
    let t = tp.model();
    let (fail, pass) = (tp.fail(), tp.pass());
    let (witness, reached_pass) = shortest_to_goal(
        (t.initial(), imp.initial()),
        |(p, _)| Some(p) == fail,
        |(p, _)| Some(p) == pass,
        |(p, q)| {
            let mut v: Vec<Pair> = internal_moves(imp, q).map(|q2| (p, q2)).collect();
            v.extend(internal_moves(t, p).map(|p2| (p2, q)));
            v
        },
        |(p, q)| {
            let mut v = Vec::new();
            for &(l, p2) in t.successors(p) {
                let Some(l) = l else { continue };
                for &(m, q2) in imp.successors(q) {
                    if m == Some(l) {
                        v.push((l, (p2, q2)));
                    }
                }
            }
            v
        },
    );
    let name = tp.name.clone();
    Ok(match witness {
        Some(w) => PurposeRun { name, verdict: RunVerdict::Fail, witness: Some(imp.trace_names(&w)) },
        None if reached_pass => PurposeRun { name, verdict: RunVerdict::Pass, witness: None },
        None => PurposeRun { name, verdict: RunVerdict::Inconclusive, witness: None },
    })
}

/// Runs every purpose, in parallel on `jobs` threads (all cores by default).
/// The implementation passes the fault model when no purpose fails.
pub fn run_fault_model(imp: &Iolts, fm: &FaultModel, jobs: Option<usize>) -> Result<RunReport, RunnerError> {
    let run = || fm.purposes.par_iter().map(|tp| passes(imp, tp)).collect::<Result<Vec<_>, _>>();
    let purposes = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunnerError::Pool(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let aggregate = if purposes.iter().all(PurposeRun::passed) { Aggregate::Pass } else { Aggregate::Fail };
    Ok(RunReport { aggregate, purposes })
}

/// Whether the implementation passes every raw purpose of the multigraph,
/// decided without enumerating them: some purpose fails exactly when a
/// root-to-fail word is an observable trace of the implementation. Returns
/// the shortest such word.
pub fn fails_multigraph(imp: &Iolts, g: &Multigraph) -> Option<Vec<String>> {
    let (witness, _) = shortest_to_goal(
        (g.root(), imp.initial()),
        |(v, _)| Some(v) == g.fail(),
        |_| false,
        |(v, q)| internal_moves(imp, q).map(|q2| (v, q2)).collect(),
        |(v, q)| {
            let mut out = Vec::new();
            for &(l, v2) in g.arcs(v) {
                for &(m, q2) in imp.successors(q) {
                    if m == Some(l) {
                        out.push((l, (v2, q2)));
                    }
                }
            }
            out
        },
    );
    witness.map(|w| g.spec().trace_names(&w))
}

/// The implementation `I_k`: `k` a-steps, then output x, with a-loops at
/// the last two states. It violates ioco against the one-state a-loop
/// specification but passes every acyclic purpose whose traces are at
/// most `k` long.
pub fn defeat_implementation(k: usize) -> Iolts {
    let name = |i: usize| format!("q{i}");
    let mut ts: Vec<(String, &str, String)> = (1..=k).map(|i| (name(i - 1), "a", name(i))).collect();
    ts.push((name(k), "x", "q".to_string()));
    ts.push((name(k), "a", name(k)));
    ts.push(("q".to_string(), "a", "q".to_string()));
    let borrowed: Vec<(&str, &str, &str)> = ts.iter().map(|(s, l, t)| (s.as_str(), *l, t.as_str())).collect();
    Iolts::new(&["a"], &["x"], "q0", &borrowed).expect("valid")
}

/// Builds `I_k` for `k` the longest trace of any purpose.
pub fn defeat_acyclic_fault_model(fm: &FaultModel) -> Result<Iolts, RunnerError> {
    let canonical = catalog::single_loop_spec();
    if !fm.provenance.spec_sha256.is_empty() && fm.provenance.spec_sha256 != model_sha256(&canonical) {
        return Err(RunnerError::NonCanonicalSpec);
    }
    let mut k = 0;
    for tp in &fm.purposes {
        if &tp.spec_view().alphabet().clone() != canonical.alphabet() {
            return Err(RunnerError::NonCanonicalSpec);
        }
        let len = tp.max_trace_len().ok_or_else(|| RunnerError::CyclicPurpose(tp.name.clone()))?;
        k = k.max(len);
    }
    Ok(defeat_implementation(k))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBound {
    pub m: usize,
    /// Binomial-sum count of words of length `m` in `(0+11)*`.
    #[serde(rename = "F_m")]
    pub f_m: u128,
    /// The same count by enumerating all binary words, when `m` is small.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brute_force: Option<u128>,
    /// `Φ^m / √5`.
    pub bound: f64,
}

/// Largest `m` for which the binary words are enumerated.
pub const BRUTE_FORCE_LIMIT: usize = 24;

pub const PHI: f64 = 1.618_033_988_749_895;

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Whether a binary word splits into blocks `0` and `11`.
pub fn in_r_language(word: &[u8]) -> bool {
    let mut i = 0;
    while i < word.len() {
        match word[i] {
            0 => i += 1,
            _ if i + 1 < word.len() && word[i + 1] == 1 => i += 2,
            _ => return false,
        }
    }
    true
}

fn r_count_brute(m: usize) -> u128 {
    (0u64..1 << m)
        .filter(|bits| {
            let word: Vec<u8> = (0..m).map(|i| ((bits >> (m - 1 - i)) & 1) as u8).collect();
            in_r_language(&word)
        })
        .count() as u128
}

pub fn count_lower_bound(m: usize) -> LowerBound {
    let f_m = (0..=m / 2).map(|i| binomial((m - i) as u128, i as u128)).sum();
    let brute_force = (m <= BRUTE_FORCE_LIMIT).then(|| r_count_brute(m));
    LowerBound { m, f_m, brute_force, bound: PHI.powi(m as i32) / 5f64.sqrt() }
}

/// Words of `(0+11)*` of length exactly `len`, in lexicographic order.
pub fn r_words(len: usize) -> Vec<Vec<u8>> {
    if len == 0 {
        return vec![vec![]];
    }
    let mut out: Vec<Vec<u8>> = r_words(len - 1)
        .into_iter()
        .map(|mut w| {
            w.insert(0, 0);
            w
        })
        .collect();
    if len >= 2 {
        out.extend(r_words(len - 2).into_iter().map(|mut w| {
            w.splice(0..0, [1, 1]);
            w
        }));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
/// `TestCases`: input-enabled implementations of the parity specification.
/// `Schemes`: implementations of the ring specification, which has a second output.
#[serde(rename_all = "lowercase")]
pub enum Variant {
    TestCases,
    Schemes,
}

/// The implementation that follows `alpha` and then emits x; any input
/// off the word leads to a `pass` state with input loops.
pub fn alpha_implementation(alpha: &[u8], variant: Variant) -> Iolts {
    let r = alpha.len();
    let q = |i: usize| format!("q{i}");
    let bit = |b: u8| if b == 0 { "0" } else { "1" };
    let mut ts: Vec<(String, &str, String)> = Vec::new();
    for (i, &y) in alpha.iter().enumerate() {
        ts.push((q(i), bit(y), q(i + 1)));
        ts.push((q(i), bit(1 - y), "pass".to_string()));
    }
    ts.push((q(r), "x", q(r + 1)));
    if variant == Variant::TestCases {
        for b in ["0", "1"] {
            ts.push((q(r), b, "pass".to_string()));
            ts.push((q(r + 1), b, q(r + 1)));
        }
    }
    for b in ["0", "1"] {
        ts.push(("pass".to_string(), b, "pass".to_string()));
    }
    let borrowed: Vec<(&str, &str, &str)> = ts.iter().map(|(s, l, t)| (s.as_str(), *l, t.as_str())).collect();
    let outputs: &[&str] = match variant {
        Variant::TestCases => &["x"],
        Variant::Schemes => &["a", "x"],
    };
    Iolts::new(&["0", "1"], outputs, "q0", &borrowed).expect("valid")
}

/// The specification and one implementation per word `alpha` of
/// `(0+11)*` with `1 <= |alpha| <= m-3`.
pub fn adversarial_family(m: usize, variant: Variant) -> (Iolts, Vec<(String, Iolts)>) {
    let spec = match variant {
        Variant::TestCases => catalog::parity_spec(),
        Variant::Schemes => catalog::ring_spec(m.max(3)),
    };
    let mut family = Vec::new();
    for len in 1..=m.saturating_sub(3) {
        for alpha in r_words(len) {
            let name: String = alpha.iter().map(|b| char::from(b'0' + b)).collect();
            family.push((name, alpha_implementation(&alpha, variant)));
        }
    }
    (spec, family)
}
