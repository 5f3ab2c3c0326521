//! Finite automata over action labels and the regular-language algebra used
//! to build test suites.

mod regex;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{ActionAlphabet, Iolts, ModelError, Sym, TAU};

pub use regex::{parse_regex, RegexError};

/// Reserved spelling of the empty move in serialized automata.
pub const EPS: &str = "eps";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FsaError {
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("label {0:?} is not in the alphabet")]
    UnknownLabel(String),
    #[error("state {0:?} declared twice")]
    DuplicateState(String),
    #[error("the automata have different alphabets")]
    AlphabetMismatch,
    #[error("automaton is not deterministic")]
    NotDeterministic,
    #[error("automaton is not complete")]
    NotComplete,
    #[error("only automata whose states are all final induce a transition system")]
    NonTrivialFinalSet,
    #[error("malformed automaton description: {0}")]
    Syntax(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawFsa {
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub finals: Vec<String>,
    pub transitions: Vec<(String, String, String)>,
}

/// Finite automaton with ε-moves; transition labels index [`Fsa::alphabet`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fsa {
    alphabet: Vec<String>,
    states: Vec<String>,
    initial: usize,
    finals: Vec<bool>,
    transitions: Vec<(usize, Sym, usize)>,
}

/// Result of an emptiness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    Witness(Vec<String>),
}

impl Emptiness {
    pub fn is_empty(&self) -> bool {
        matches!(self, Emptiness::Empty)
    }

    pub fn witness(&self) -> Option<&[String]> {
        match self {
            Emptiness::Empty => None,
            Emptiness::Witness(w) => Some(w),
        }
    }
}

fn sorted_alphabet<I: IntoIterator<Item = S>, S: Into<String>>(labels: I) -> Vec<String> {
    let set: BTreeSet<String> = labels.into_iter().map(Into::into).collect();
    set.into_iter().collect()
}

fn fresh(base: &str, taken: &[String]) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

impl Fsa {
    pub(crate) fn assemble(
        alphabet: Vec<String>,
        states: Vec<String>,
        initial: usize,
        finals: Vec<bool>,
        mut transitions: Vec<(usize, Sym, usize)>,
    ) -> Fsa {
        transitions.sort_unstable();
        transitions.dedup();
        Fsa { alphabet, states, initial, finals, transitions }
    }

    pub fn from_raw(raw: &RawFsa) -> Result<Fsa, FsaError> {
        let alphabet = sorted_alphabet(raw.alphabet.iter().cloned());
        if alphabet.iter().any(|l| l == EPS || l == TAU) {
            return Err(FsaError::Syntax("reserved label in alphabet".into()));
        }
        let mut index = HashMap::new();
        for (i, s) in raw.states.iter().enumerate() {
            if index.insert(s.as_str(), i).is_some() {
                return Err(FsaError::DuplicateState(s.clone()));
            }
        }
        let lookup = |s: &String| index.get(s.as_str()).copied().ok_or_else(|| FsaError::UnknownState(s.clone()));
        let initial = lookup(&raw.initial)?;
        let mut finals = vec![false; raw.states.len()];
        for f in &raw.finals {
            finals[lookup(f)?] = true;
        }
        let mut transitions = Vec::new();
        for (s, l, t) in &raw.transitions {
            let sym = if l == EPS {
                None
            } else {
                Some(alphabet.binary_search(l).map_err(|_| FsaError::UnknownLabel(l.clone()))?)
            };
            transitions.push((lookup(s)?, sym, lookup(t)?));
        }
        Ok(Fsa::assemble(alphabet, raw.states.clone(), initial, finals, transitions))
    }

    pub fn from_json(text: &str) -> Result<Fsa, FsaError> {
        let raw: RawFsa = serde_json::from_str(text).map_err(|e| FsaError::Syntax(e.to_string()))?;
        Fsa::from_raw(&raw)
    }

    pub fn to_raw(&self) -> RawFsa {
        RawFsa {
            alphabet: self.alphabet.clone(),
            states: self.states.clone(),
            initial: self.states[self.initial].clone(),
            finals: (0..self.states.len()).filter(|&i| self.finals[i]).map(|i| self.states[i].clone()).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|&(s, l, t)| (self.states[s].clone(), self.sym_name(l).to_string(), self.states[t].clone()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("serializable")
    }

    /// Graphviz rendering with final states drawn as double circles.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph fsa {\n  rankdir=LR;\n  __start [shape=point];\n");
        for (i, s) in self.states.iter().enumerate() {
            let shape = if self.finals[i] { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  \"{}\" [shape={}];", s.replace('"', "\\\""), shape);
        }
        let _ = writeln!(out, "  __start -> \"{}\";", self.states[self.initial].replace('"', "\\\""));
        for &(s, l, t) in &self.transitions {
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{}\"];",
                self.states[s].replace('"', "\\\""),
                self.states[t].replace('"', "\\\""),
                self.sym_name(l)
            );
        }
        out.push_str("}\n");
        out
    }

    /// The empty language.
    pub fn empty<I: IntoIterator<Item = S>, S: Into<String>>(alphabet: I) -> Fsa {
        Fsa::assemble(sorted_alphabet(alphabet), vec!["z0".into()], 0, vec![false], vec![])
    }

    /// The language containing only the empty word.
    pub fn epsilon<I: IntoIterator<Item = S>, S: Into<String>>(alphabet: I) -> Fsa {
        Fsa::assemble(sorted_alphabet(alphabet), vec!["z0".into()], 0, vec![true], vec![])
    }

    /// Every word over the alphabet.
    pub fn universal<I: IntoIterator<Item = S>, S: Into<String>>(alphabet: I) -> Fsa {
        let alphabet = sorted_alphabet(alphabet);
        let ts = (0..alphabet.len()).map(|i| (0, Some(i), 0)).collect();
        Fsa::assemble(alphabet, vec!["z0".into()], 0, vec![true], ts)
    }

    /// One-letter words over the given subset of the alphabet.
    pub fn letters<I, S>(alphabet: I, letters: &BTreeSet<String>) -> Result<Fsa, FsaError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let alphabet = sorted_alphabet(alphabet);
        let mut ts = Vec::new();
        for l in letters {
            let i = alphabet.binary_search(l).map_err(|_| FsaError::UnknownLabel(l.clone()))?;
            ts.push((0, Some(i), 1));
        }
        Ok(Fsa::assemble(alphabet, vec!["z0".into(), "z1".into()], 0, vec![false, true], ts))
    }

    /// A finite language given by its words.
    pub fn words<I, S, W>(alphabet: I, words: &[W]) -> Result<Fsa, FsaError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
        W: AsRef<[String]>,
    {
        let alphabet = sorted_alphabet(alphabet);
        let mut states = vec!["w0".to_string()];
        let mut finals = vec![false];
        let mut trie: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for w in words {
            let mut cur = 0;
            for l in w.as_ref() {
                let i = alphabet.binary_search(l).map_err(|_| FsaError::UnknownLabel(l.clone()))?;
                cur = *trie.entry((cur, i)).or_insert_with(|| {
                    states.push(format!("w{}", states.len()));
                    finals.push(false);
                    states.len() - 1
                });
            }
            finals[cur] = true;
        }
        let ts = trie.iter().map(|(&(s, l), &t)| (s, Some(l), t)).collect();
        Ok(Fsa::assemble(alphabet, states, 0, finals, ts))
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn finals(&self) -> &[bool] {
        &self.finals
    }

    pub fn transitions(&self) -> &[(usize, Sym, usize)] {
        &self.transitions
    }

    pub fn sym_name(&self, sym: Sym) -> &str {
        match sym {
            None => EPS,
            Some(i) => &self.alphabet[i],
        }
    }

    pub fn has_epsilon(&self) -> bool {
        self.transitions.iter().any(|t| t.1.is_none())
    }

    fn succ(&self) -> Vec<Vec<(Sym, usize)>> {
        let mut succ = vec![Vec::new(); self.states.len()];
        for &(s, l, t) in &self.transitions {
            succ[s].push((l, t));
        }
        succ
    }

    fn closure(succ: &[Vec<(Sym, usize)>], set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for &(l, t) in &succ[s] {
                if l.is_none() && set.insert(t) {
                    stack.push(t);
                }
            }
        }
    }

    pub fn accepts<S: AsRef<str>>(&self, word: &[S]) -> bool {
        let succ = self.succ();
        let mut cur = BTreeSet::from([self.initial]);
        Fsa::closure(&succ, &mut cur);
        for l in word {
            let Ok(i) = self.alphabet.binary_search_by(|x| x.as_str().cmp(l.as_ref())) else {
                return false;
            };
            let mut next = BTreeSet::new();
            for &s in &cur {
                for &(m, t) in &succ[s] {
                    if m == Some(i) {
                        next.insert(t);
                    }
                }
            }
            Fsa::closure(&succ, &mut next);
            cur = next;
        }
        cur.iter().any(|&s| self.finals[s])
    }

    /// ε-free, with partial transition function.
    pub fn is_deterministic(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.transitions.iter().all(|&(s, l, _)| l.is_some() && seen.insert((s, l)))
    }

    /// Deterministic with a transition on every label from every state.
    pub fn is_complete(&self) -> bool {
        self.is_deterministic() && self.transitions.len() == self.alphabet.len() * self.states.len()
    }

    /// The same automaton over a larger alphabet.
    pub fn widen(&self, alphabet: &[String]) -> Result<Fsa, FsaError> {
        let alphabet = sorted_alphabet(alphabet.iter().cloned());
        let mut ts = Vec::with_capacity(self.transitions.len());
        for &(s, l, t) in &self.transitions {
            let sym = match l {
                None => None,
                Some(i) => Some(
                    alphabet
                        .binary_search(&self.alphabet[i])
                        .map_err(|_| FsaError::AlphabetMismatch)?,
                ),
            };
            ts.push((s, sym, t));
        }
        Ok(Fsa::assemble(alphabet, self.states.clone(), self.initial, self.finals.clone(), ts))
    }

    /// Keeps only the states reachable from the initial state.
    pub fn trim(&self) -> Fsa {
        let succ = self.succ();
        let mut seen = vec![false; self.states.len()];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(s) = queue.pop_front() {
            for &(_, t) in &succ[s] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        let mut map = vec![usize::MAX; self.states.len()];
        let mut states = Vec::new();
        let mut finals = Vec::new();
        for i in 0..self.states.len() {
            if seen[i] {
                map[i] = states.len();
                states.push(self.states[i].clone());
                finals.push(self.finals[i]);
            }
        }
        let ts = self
            .transitions
            .iter()
            .filter(|t| seen[t.0])
            .map(|&(s, l, t)| (map[s], l, map[t]))
            .collect();
        Fsa::assemble(self.alphabet.clone(), states, map[self.initial], finals, ts)
    }
}

/// The automaton induced by a transition system: internal moves become
/// ε-moves and every state is final, so its language is the set of
/// observable traces.
pub fn lts_to_fsa(model: &Iolts) -> Fsa {
    Fsa::assemble(
        model.labels().to_vec(),
        model.states().to_vec(),
        model.initial(),
        vec![true; model.states().len()],
        model.transitions().to_vec(),
    )
}

/// The transition system induced by an all-final automaton. Labels listed in
/// `outputs` become outputs and the rest inputs; ε self-loops are dropped and
/// unreachable states removed.
pub fn fsa_to_lts(a: &Fsa, outputs: &BTreeSet<String>) -> Result<Iolts, FsaError> {
    if a.finals.iter().any(|f| !f) {
        return Err(FsaError::NonTrivialFinalSet);
    }
    let inputs: Vec<&String> = a.alphabet.iter().filter(|l| !outputs.contains(*l)).collect();
    let outs: Vec<&String> = a.alphabet.iter().filter(|l| outputs.contains(*l)).collect();
    let alphabet = ActionAlphabet::new(inputs.into_iter().cloned(), outs.into_iter().cloned())?;
    let ts = a.transitions.iter().copied().filter(|&(s, l, t)| !(l.is_none() && s == t)).collect();
    let model = Iolts::assemble(alphabet, a.states.clone(), a.initial, ts);
    Ok(model.restrict_to_reachable())
}

/// A deterministic model with the same observable traces, and whether any
/// determinization was needed. Subset states are named as in [`determinize`].
pub fn determinize_lts(model: &Iolts) -> Result<(Iolts, bool), FsaError> {
    if model.is_deterministic() {
        return Ok((model.clone(), false));
    }
    let det = fsa_to_lts(&determinize(&lts_to_fsa(model)), &model.alphabet().outputs)?;
    Ok((det.with_alphabet(model.alphabet().clone())?, true))
}

/// Removes ε-moves; state names are kept and a state becomes final when its
/// ε-closure contains a final state.
pub fn eliminate_epsilon(a: &Fsa) -> Fsa {
    if !a.has_epsilon() {
        return a.clone();
    }
    let succ = a.succ();
    let mut finals = vec![false; a.states.len()];
    let mut ts = Vec::new();
    for (p, fin) in finals.iter_mut().enumerate() {
        let mut cl = BTreeSet::from([p]);
        Fsa::closure(&succ, &mut cl);
        *fin = cl.iter().any(|&r| a.finals[r]);
        for &r in &cl {
            for &(l, q) in &succ[r] {
                if l.is_some() {
                    ts.push((p, l, q));
                }
            }
        }
    }
    Fsa::assemble(a.alphabet.clone(), a.states.clone(), a.initial, finals, ts)
}

fn subset_name(a: &Fsa, set: &BTreeSet<usize>) -> String {
    let mut names: Vec<&str> = set.iter().map(|&i| a.states[i].as_str()).collect();
    names.sort_unstable();
    format!("{{{}}}", names.join(","))
}

/// Subset construction. Result states are named `{p,q}` after the sorted
/// names of the source states they stand for; the empty set is not created.
pub fn determinize(a: &Fsa) -> Fsa {
    let succ = a.succ();
    let mut start = BTreeSet::from([a.initial]);
    Fsa::closure(&succ, &mut start);
    let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    let mut sets = vec![start.clone()];
    index.insert(start, 0);
    let mut ts = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        let mut moves: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &s in &sets[i] {
            for &(l, t) in &succ[s] {
                if let Some(l) = l {
                    moves.entry(l).or_default().insert(t);
                }
            }
        }
        for (l, mut target) in moves {
            Fsa::closure(&succ, &mut target);
            let j = match index.get(&target) {
                Some(&j) => j,
                None => {
                    sets.push(target.clone());
                    index.insert(target, sets.len() - 1);
                    sets.len() - 1
                }
            };
            ts.push((i, Some(l), j));
        }
        i += 1;
    }
    let states = sets.iter().map(|s| subset_name(a, s)).collect();
    let finals = sets.iter().map(|s| s.iter().any(|&q| a.finals[q])).collect();
    Fsa::assemble(a.alphabet.clone(), states, 0, finals, ts)
}

/// Adds one fresh non-final sink and routes every missing move to it. The
/// sink is added even when the input is already complete.
pub fn complete(a: &Fsa) -> Result<Fsa, FsaError> {
    if !a.is_deterministic() {
        return Err(FsaError::NotDeterministic);
    }
    let n = a.states.len();
    let mut states = a.states.clone();
    states.push(fresh("e", &a.states));
    let mut finals = a.finals.clone();
    finals.push(false);
    let mut ts = a.transitions.clone();
    let defined: BTreeSet<(usize, usize)> = a.transitions.iter().map(|&(s, l, _)| (s, l.unwrap())).collect();
    for s in 0..=n {
        for l in 0..a.alphabet.len() {
            if !defined.contains(&(s, l)) {
                ts.push((s, Some(l), n));
            }
        }
    }
    Ok(Fsa::assemble(a.alphabet.clone(), states, a.initial, finals, ts))
}

pub fn complement(a: &Fsa) -> Result<Fsa, FsaError> {
    if !a.is_complete() {
        return Err(FsaError::NotComplete);
    }
    let mut c = a.clone();
    c.finals.iter_mut().for_each(|f| *f = !*f);
    Ok(c)
}

fn same_alphabet(a: &Fsa, b: &Fsa) -> Result<(), FsaError> {
    if a.alphabet == b.alphabet {
        Ok(())
    } else {
        Err(FsaError::AlphabetMismatch)
    }
}

/// Product construction restricted to reachable pairs; states are named `(p|q)`.
pub fn intersect(a: &Fsa, b: &Fsa) -> Result<Fsa, FsaError> {
    same_alphabet(a, b)?;
    let a = eliminate_epsilon(a);
    let b = eliminate_epsilon(b);
    let (sa, sb) = (a.succ(), b.succ());
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = vec![(a.initial, b.initial)];
    index.insert(pairs[0], 0);
    let mut ts = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        for &(l, p2) in &sa[p] {
            for &(m, q2) in &sb[q] {
                if l == m {
                    let j = *index.entry((p2, q2)).or_insert_with(|| {
                        pairs.push((p2, q2));
                        pairs.len() - 1
                    });
                    ts.push((i, l, j));
                }
            }
        }
        i += 1;
    }
    let states = pairs.iter().map(|&(p, q)| format!("({}|{})", a.states[p], b.states[q])).collect();
    let finals = pairs.iter().map(|&(p, q)| a.finals[p] && b.finals[q]).collect();
    Ok(Fsa::assemble(a.alphabet.clone(), states, 0, finals, ts))
}

/// Disjoint union under a fresh initial state linked by ε-moves.
pub fn union_(a: &Fsa, b: &Fsa) -> Result<Fsa, FsaError> {
    same_alphabet(a, b)?;
    let (na, nb) = (a.states.len(), b.states.len());
    let mut states = vec!["u".to_string()];
    states.extend(a.states.iter().map(|s| format!("L.{s}")));
    states.extend(b.states.iter().map(|s| format!("R.{s}")));
    let mut finals = vec![false];
    finals.extend_from_slice(&a.finals);
    finals.extend_from_slice(&b.finals);
    let mut ts = vec![(0, None, 1 + a.initial), (0, None, 1 + na + b.initial)];
    ts.extend(a.transitions.iter().map(|&(s, l, t)| (1 + s, l, 1 + t)));
    ts.extend(b.transitions.iter().map(|&(s, l, t)| (1 + na + s, l, 1 + na + t)));
    debug_assert_eq!(states.len(), na + nb + 1);
    Ok(Fsa::assemble(a.alphabet.clone(), states, 0, finals, ts))
}

/// Words of `a` followed by words of `b`.
pub fn concat(a: &Fsa, b: &Fsa) -> Result<Fsa, FsaError> {
    same_alphabet(a, b)?;
    let na = a.states.len();
    let mut states: Vec<String> = a.states.iter().map(|s| format!("L.{s}")).collect();
    states.extend(b.states.iter().map(|s| format!("R.{s}")));
    let mut finals = vec![false; na];
    finals.extend_from_slice(&b.finals);
    let mut ts: Vec<(usize, Sym, usize)> = a.transitions.clone();
    ts.extend(b.transitions.iter().map(|&(s, l, t)| (na + s, l, na + t)));
    for (s, &f) in a.finals.iter().enumerate() {
        if f {
            ts.push((s, None, na + b.initial));
        }
    }
    Ok(Fsa::assemble(a.alphabet.clone(), states, a.initial, finals, ts))
}

/// Shortest accepted word; ties are broken lexicographically by label.
pub fn is_empty(a: &Fsa) -> Emptiness {
    let a = eliminate_epsilon(a);
    let succ = a.succ();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; a.states.len()];
    let mut seen = vec![false; a.states.len()];
    seen[a.initial] = true;
    let mut queue = VecDeque::from([a.initial]);
    while let Some(s) = queue.pop_front() {
        if a.finals[s] {
            let mut word = Vec::new();
            let mut cur = s;
            while let Some((p, l)) = parent[cur] {
                word.push(a.alphabet[l].clone());
                cur = p;
            }
            word.reverse();
            return Emptiness::Witness(word);
        }
        let mut out: Vec<(usize, usize)> = succ[s].iter().map(|&(l, t)| (l.unwrap(), t)).collect();
        out.sort_unstable();
        for (l, t) in out {
            if !seen[t] {
                seen[t] = true;
                parent[t] = Some((s, l));
                queue.push_back(t);
            }
        }
    }
    Emptiness::Empty
}

/// Language equality through emptiness of the symmetric difference.
pub fn language_equivalent(a: &Fsa, b: &Fsa) -> bool {
    let alphabet = sorted_alphabet(a.alphabet.iter().chain(b.alphabet.iter()).cloned());
    let a = a.widen(&alphabet).expect("superset");
    let b = b.widen(&alphabet).expect("superset");
    let da = complete(&determinize(&a)).expect("deterministic");
    let db = complete(&determinize(&b)).expect("deterministic");
    let only_a = intersect(&da, &complement(&db).expect("complete")).expect("same alphabet");
    let only_b = intersect(&db, &complement(&da).expect("complete")).expect("same alphabet");
    is_empty(&only_a).is_empty() && is_empty(&only_b).is_empty()
}
