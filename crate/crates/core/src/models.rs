//! Transition-system models and their observable semantics.
//!
//! A single [`Iolts`] type carries states, an initial state, an input/output
//! alphabet and a transition relation. Plain labelled transition systems are
//! represented by the same type (see [`Lts`]); the input/output partition is
//! simply ignored by the operations that do not need it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reserved spelling of the internal action.
pub const TAU: &str = "tau";
/// Reserved spelling of the quiescence output.
pub const DELTA: &str = "delta";
/// Reserved name of the failing verdict state.
pub const FAIL: &str = "fail";
/// Reserved name of the passing verdict state.
pub const PASS: &str = "pass";

/// Index of a label in [`Iolts::labels`]; `None` stands for the internal action.
pub type Sym = Option<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("label {0:?} is declared both as input and as output")]
    DisjointnessViolation(String),
    #[error("state {0:?} is not reachable from the initial state")]
    UnreachableState(String),
    #[error("reserved label {0:?} used where it is not allowed")]
    ReservedLabelMisuse(String),
    #[error("transition endpoint {0:?} is not a declared state")]
    DanglingEndpoint(String),
    #[error("internal self-loop at state {0:?}")]
    TauSelfLoop(String),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("state {0:?} declared twice")]
    DuplicateState(String),
    #[error("malformed label {0:?}")]
    MalformedLabel(String),
    #[error("the quiescence label is already used by a transition")]
    DeltaAlreadyUsed,
    #[error("the two models have different alphabets")]
    AlphabetMismatch,
    #[error("quiescence loop condition violated at state {0:?}")]
    QuiescenceViolation(String),
    #[error("malformed model description: {0}")]
    Syntax(String),
}

/// Checks a raw description; see [`Iolts::from_raw`].
pub fn validate_model(raw: &RawModel, normalize: bool) -> Result<Iolts, ModelError> {
    Iolts::from_raw(raw, normalize)
}

pub fn is_reserved(label: &str) -> bool {
    matches!(label, TAU | DELTA | FAIL | PASS)
}

fn check_label(label: &str) -> Result<(), ModelError> {
    let ok = !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '?' | '!'));
    if ok {
        Ok(())
    } else {
        Err(ModelError::MalformedLabel(label.to_string()))
    }
}

/// Disjoint input and output label sets, with quiescence present when the
/// reserved `delta` label is declared as an output.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ActionAlphabet {
    pub inputs: BTreeSet<String>,
    pub outputs: BTreeSet<String>,
}

impl ActionAlphabet {
    pub fn new<I, O, S, T>(inputs: I, outputs: O) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        O: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let inputs: BTreeSet<String> = inputs.into_iter().map(Into::into).collect();
        let outputs: BTreeSet<String> = outputs.into_iter().map(Into::into).collect();
        for l in inputs.iter().chain(outputs.iter()) {
            check_label(l)?;
        }
        for l in &inputs {
            if is_reserved(l) {
                return Err(ModelError::ReservedLabelMisuse(l.clone()));
            }
            if outputs.contains(l) {
                return Err(ModelError::DisjointnessViolation(l.clone()));
            }
        }
        for l in &outputs {
            if is_reserved(l) && l != DELTA {
                return Err(ModelError::ReservedLabelMisuse(l.clone()));
            }
        }
        Ok(ActionAlphabet { inputs, outputs })
    }

    pub fn quiescence(&self) -> Option<&str> {
        self.outputs.get(DELTA).map(String::as_str)
    }

    /// The same labels with the roles of inputs and outputs exchanged.
    pub fn swapped(&self) -> ActionAlphabet {
        ActionAlphabet { inputs: self.outputs.clone(), outputs: self.inputs.clone() }
    }

    pub fn labels(&self) -> BTreeSet<String> {
        self.inputs.union(&self.outputs).cloned().collect()
    }
}

/// Serialized form shared by every command-line tool.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawModel {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub transitions: Vec<(String, String, String)>,
}

/// A finite input/output labelled transition system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iolts {
    alphabet: ActionAlphabet,
    labels: Vec<String>,
    output_mask: Vec<bool>,
    states: Vec<String>,
    initial: usize,
    transitions: Vec<(usize, Sym, usize)>,
    succ: Vec<Vec<(Sym, usize)>>,
}

/// Plain labelled transition systems share the representation; the
/// input/output partition carries no meaning for them.
pub type Lts = Iolts;

impl Iolts {
    /// Validates a raw description. With `normalize`, internal self-loops and
    /// unreachable states are removed instead of being reported.
    pub fn from_raw(raw: &RawModel, normalize: bool) -> Result<Iolts, ModelError> {
        let alphabet = ActionAlphabet::new(raw.inputs.iter().cloned(), raw.outputs.iter().cloned())?;
        let mut index = BTreeMap::new();
        for (i, s) in raw.states.iter().enumerate() {
            if s.is_empty() {
                return Err(ModelError::Syntax("empty state name".into()));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        let initial = *index
            .get(&raw.initial)
            .ok_or_else(|| ModelError::DanglingEndpoint(raw.initial.clone()))?;
        let labels: Vec<String> = alphabet.labels().into_iter().collect();
        let mut transitions = Vec::with_capacity(raw.transitions.len());
        for (s, l, t) in &raw.transitions {
            let si = *index.get(s).ok_or_else(|| ModelError::DanglingEndpoint(s.clone()))?;
            let ti = *index.get(t).ok_or_else(|| ModelError::DanglingEndpoint(t.clone()))?;
            let sym = if l == TAU {
                None
            } else if is_reserved(l) && (l != DELTA || alphabet.quiescence().is_none()) {
                return Err(ModelError::ReservedLabelMisuse(l.clone()));
            } else {
                Some(labels.binary_search(l).map_err(|_| ModelError::UnknownLabel(l.clone()))?)
            };
            if sym.is_none() && si == ti {
                if normalize {
                    continue;
                }
                return Err(ModelError::TauSelfLoop(s.clone()));
            }
            transitions.push((si, sym, ti));
        }
        let model = Iolts::assemble(alphabet, raw.states.clone(), initial, transitions);
        let reach = model.reachable();
        if let Some(i) = reach.iter().position(|r| !r) {
            if !normalize {
                return Err(ModelError::UnreachableState(model.states[i].clone()));
            }
            return Ok(model.restrict_to_reachable());
        }
        Ok(model)
    }

    /// Builds and validates a model from borrowed pieces. States are listed
    /// in order of first appearance, starting with the initial state.
    pub fn new(
        inputs: &[&str],
        outputs: &[&str],
        initial: &str,
        transitions: &[(&str, &str, &str)],
    ) -> Result<Iolts, ModelError> {
        let mut states = vec![initial.to_string()];
        for (s, _, t) in transitions {
            for x in [s, t] {
                if !states.iter().any(|y| y == x) {
                    states.push(x.to_string());
                }
            }
        }
        let raw = RawModel {
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            states,
            initial: initial.to_string(),
            transitions: transitions
                .iter()
                .map(|(s, l, t)| (s.to_string(), l.to_string(), t.to_string()))
                .collect(),
        };
        Iolts::from_raw(&raw, false)
    }

    pub fn from_json(text: &str, normalize: bool) -> Result<Iolts, ModelError> {
        let raw: RawModel = serde_json::from_str(text).map_err(|e| ModelError::Syntax(e.to_string()))?;
        Iolts::from_raw(&raw, normalize)
    }

    /// Unchecked constructor for models produced by the library itself.
    /// Transitions are sorted and deduplicated.
    pub(crate) fn assemble(
        alphabet: ActionAlphabet,
        states: Vec<String>,
        initial: usize,
        mut transitions: Vec<(usize, Sym, usize)>,
    ) -> Iolts {
        let labels: Vec<String> = alphabet.labels().into_iter().collect();
        let output_mask = labels.iter().map(|l| alphabet.outputs.contains(l)).collect();
        transitions.sort_unstable();
        transitions.dedup();
        let mut succ = vec![Vec::new(); states.len()];
        for &(s, l, t) in &transitions {
            succ[s].push((l, t));
        }
        Iolts { alphabet, labels, output_mask, states, initial, transitions, succ }
    }

    pub fn to_raw(&self) -> RawModel {
        RawModel {
            inputs: self.alphabet.inputs.iter().cloned().collect(),
            outputs: self.alphabet.outputs.iter().cloned().collect(),
            states: self.states.clone(),
            initial: self.states[self.initial].clone(),
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

    /// Graphviz rendering; verdict states are drawn with a double circle.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph model {\n  rankdir=LR;\n  node [shape=circle];\n");
        out.push_str("  __start [shape=point];\n");
        for s in &self.states {
            let shape = if s == FAIL || s == PASS { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  \"{}\" [shape={}];", escape(s), shape);
        }
        let _ = writeln!(out, "  __start -> \"{}\";", escape(&self.states[self.initial]));
        for &(s, l, t) in &self.transitions {
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{}\"];",
                escape(&self.states[s]),
                escape(&self.states[t]),
                escape(self.sym_name(l))
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn alphabet(&self) -> &ActionAlphabet {
        &self.alphabet
    }

    /// All observable labels in lexicographic order; label indices refer to it.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn transitions(&self) -> &[(usize, Sym, usize)] {
        &self.transitions
    }

    pub fn successors(&self, s: usize) -> &[(Sym, usize)] {
        &self.succ[s]
    }

    pub fn is_output(&self, label: usize) -> bool {
        self.output_mask[label]
    }

    pub fn is_input(&self, label: usize) -> bool {
        !self.output_mask[label]
    }

    pub fn sym_name(&self, sym: Sym) -> &str {
        match sym {
            None => TAU,
            Some(i) => &self.labels[i],
        }
    }

    pub fn state_index(&self, name: &str) -> Result<usize, ModelError> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    pub fn label_index(&self, name: &str) -> Result<usize, ModelError> {
        self.labels
            .binary_search_by(|x| x.as_str().cmp(name))
            .map_err(|_| ModelError::UnknownLabel(name.to_string()))
    }

    pub fn trace_indices<S: AsRef<str>>(&self, trace: &[S]) -> Result<Vec<usize>, ModelError> {
        trace.iter().map(|l| self.label_index(l.as_ref())).collect()
    }

    pub fn trace_names(&self, trace: &[usize]) -> Vec<String> {
        trace.iter().map(|&i| self.labels[i].clone()).collect()
    }

    pub fn names(&self, set: &BTreeSet<usize>) -> BTreeSet<String> {
        set.iter().map(|&i| self.states[i].clone()).collect()
    }

    fn label_names(&self, set: &BTreeSet<usize>) -> BTreeSet<String> {
        set.iter().map(|&i| self.labels[i].clone()).collect()
    }

    pub fn has_tau(&self) -> bool {
        self.transitions.iter().any(|t| t.1.is_none())
    }

    /// Reachability flags from the initial state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(s) = queue.pop_front() {
            for &(_, t) in &self.succ[s] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// Drops unreachable states, keeping the relative order of the others.
    pub fn restrict_to_reachable(&self) -> Iolts {
        let reach = self.reachable();
        let mut map = vec![usize::MAX; self.states.len()];
        let mut states = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            if reach[i] {
                map[i] = states.len();
                states.push(s.clone());
            }
        }
        let transitions = self
            .transitions
            .iter()
            .filter(|t| reach[t.0])
            .map(|&(s, l, t)| (map[s], l, map[t]))
            .collect();
        Iolts::assemble(self.alphabet.clone(), states, map[self.initial], transitions)
    }

    /// The same model started from another state, with states that become
    /// unreachable removed.
    pub fn rerooted(&self, state: usize) -> Iolts {
        let mut m = self.clone();
        m.initial = state;
        m.restrict_to_reachable()
    }

    /// The same transition structure over a different alphabet. Every label
    /// in use must be present in the new alphabet.
    pub fn with_alphabet(&self, alphabet: ActionAlphabet) -> Result<Iolts, ModelError> {
        let labels: Vec<String> = alphabet.labels().into_iter().collect();
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for &(s, l, t) in &self.transitions {
            let sym = match l {
                None => None,
                Some(i) => Some(
                    labels
                        .binary_search(&self.labels[i])
                        .map_err(|_| ModelError::UnknownLabel(self.labels[i].clone()))?,
                ),
            };
            transitions.push((s, sym, t));
        }
        Ok(Iolts::assemble(alphabet, self.states.clone(), self.initial, transitions))
    }

    /// The same model seen from the other side of the interface.
    pub fn swapped(&self) -> Iolts {
        let mut m = self.clone();
        m.alphabet = self.alphabet.swapped();
        m.output_mask = m.labels.iter().map(|l| m.alphabet.outputs.contains(l)).collect();
        m
    }

    /// States reachable through internal moves only, including the start set.
    pub fn tau_closure(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut closed = set.clone();
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for &(l, t) in &self.succ[s] {
                if l.is_none() && closed.insert(t) {
                    stack.push(t);
                }
            }
        }
        closed
    }

    /// One observable step on `label` from a τ-closed set, closed again.
    pub fn step(&self, set: &BTreeSet<usize>, label: usize) -> BTreeSet<usize> {
        let mut next = BTreeSet::new();
        for &s in set {
            for &(l, t) in &self.succ[s] {
                if l == Some(label) {
                    next.insert(t);
                }
            }
        }
        self.tau_closure(&next)
    }

    pub fn after_indices(&self, start: &BTreeSet<usize>, trace: &[usize]) -> BTreeSet<usize> {
        let mut cur = self.tau_closure(start);
        for &l in trace {
            if cur.is_empty() {
                break;
            }
            cur = self.step(&cur, l);
        }
        cur
    }

    /// `start after trace`: every state reachable by an observable path
    /// spelling `trace`.
    pub fn after<S: AsRef<str>>(&self, start: &str, trace: &[S]) -> Result<BTreeSet<String>, ModelError> {
        let s = self.state_index(start)?;
        let tr = self.trace_indices(trace)?;
        Ok(self.names(&self.after_indices(&BTreeSet::from([s]), &tr)))
    }

    /// Labels with an observable step out of the set, restricted by `keep`.
    fn enabled(&self, set: &BTreeSet<usize>, keep: impl Fn(usize) -> bool) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &s in &self.tau_closure(set) {
            for &(l, _) in &self.succ[s] {
                if let Some(l) = l {
                    if keep(l) {
                        out.insert(l);
                    }
                }
            }
        }
        out
    }

    pub fn out_indices(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        self.enabled(set, |l| self.output_mask[l])
    }

    pub fn inp_indices(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        self.enabled(set, |l| !self.output_mask[l])
    }

    pub fn init_indices(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        self.enabled(set, |_| true)
    }

    fn state_set(&self, states: &BTreeSet<String>) -> Result<BTreeSet<usize>, ModelError> {
        states.iter().map(|s| self.state_index(s)).collect()
    }

    pub fn out_set(&self, states: &BTreeSet<String>) -> Result<BTreeSet<String>, ModelError> {
        Ok(self.label_names(&self.out_indices(&self.state_set(states)?)))
    }

    pub fn inp_set(&self, states: &BTreeSet<String>) -> Result<BTreeSet<String>, ModelError> {
        Ok(self.label_names(&self.inp_indices(&self.state_set(states)?)))
    }

    pub fn init_set(&self, states: &BTreeSet<String>) -> Result<BTreeSet<String>, ModelError> {
        Ok(self.label_names(&self.init_indices(&self.state_set(states)?)))
    }

    /// No internal moves and no state with two transitions on one label.
    pub fn is_deterministic(&self) -> bool {
        self.succ.iter().all(|out| {
            let mut seen = BTreeSet::new();
            out.iter().all(|&(l, _)| l.is_some() && seen.insert(l))
        })
    }

    fn quiescence_index(&self) -> Option<usize> {
        self.alphabet.quiescence().and_then(|d| self.label_index(d).ok())
    }

    /// States without outgoing output or internal transitions. A declared
    /// quiescence label is not counted as an output here.
    pub fn quiescent_indices(&self) -> BTreeSet<usize> {
        let delta = self.quiescence_index();
        (0..self.states.len())
            .filter(|&s| {
                self.succ[s].iter().all(|&(l, _)| match l {
                    None => false,
                    Some(l) => !self.output_mask[l] || Some(l) == delta,
                })
            })
            .collect()
    }

    pub fn quiescent_states(&self) -> BTreeSet<String> {
        self.names(&self.quiescent_indices())
    }

    /// Adds `delta` to the outputs and a `delta` self-loop at each quiescent state.
    pub fn delta_extend(&self) -> Result<DeltaIolts, ModelError> {
        if let Some(d) = self.quiescence_index() {
            if self.transitions.iter().any(|t| t.1 == Some(d)) {
                return Err(ModelError::DeltaAlreadyUsed);
            }
        }
        let quiet = self.quiescent_indices();
        let mut alphabet = self.alphabet.clone();
        alphabet.outputs.insert(DELTA.to_string());
        let widened = self.with_alphabet(alphabet)?;
        let d = widened.label_index(DELTA)?;
        let mut transitions = widened.transitions.clone();
        transitions.extend(quiet.iter().map(|&s| (s, Some(d), s)));
        Ok(DeltaIolts(Iolts::assemble(
            widened.alphabet.clone(),
            widened.states.clone(),
            widened.initial,
            transitions,
        )))
    }

    /// Per-state and whole-model structural classes.
    pub fn classify(&self) -> ClassReport {
        let n = self.states.len();
        let n_inputs = self.alphabet.inputs.len();
        let n_outputs = self.alphabet.outputs.len();
        let reach = self.reachable();
        let mut states = Vec::with_capacity(n);
        for s in 0..n {
            let single = BTreeSet::from([s]);
            let inp = self.inp_indices(&single).len();
            let out = self.out_indices(&single).len();
            states.push(StateClass {
                name: self.states[s].clone(),
                sink: inp + out == 0,
                input_state: inp > 0,
                single_input: inp <= 1,
                input_enabled: inp == n_inputs,
                input_complete: inp == 0 || inp == n_inputs,
                output_complete: out == 0 || out == n_outputs,
                output_deterministic: out == 1,
            });
        }
        let all = |f: fn(&StateClass) -> bool| states.iter().all(f);
        let has_sink = states.iter().any(|c| c.sink);
        let progressive = !has_sink && self.output_subgraph_acyclic();
        let input_states = states.iter().filter(|c| c.input_state).count();
        ClassReport {
            deterministic: self.is_deterministic(),
            input_enabled: all(|c| c.input_enabled),
            input_complete: all(|c| c.input_complete),
            output_complete: all(|c| c.output_complete),
            output_deterministic: all(|c| c.output_deterministic),
            single_input: all(|c| c.single_input),
            has_sink,
            initially_connected: reach.iter().all(|&r| r),
            progressive,
            input_state_minimal: self.is_input_state_minimal(),
            input_states,
            states,
        }
    }

    /// True when the subgraph of output and internal transitions has no cycle,
    /// i.e. every cycle of the model contains an input transition.
    pub fn output_subgraph_acyclic(&self) -> bool {
        let n = self.states.len();
        let mut indeg = vec![0usize; n];
        let keep = |l: Sym| l.is_none_or(|l| self.output_mask[l]);
        for &(_, l, t) in &self.transitions {
            if keep(l) {
                indeg[t] += 1;
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&s| indeg[s] == 0).collect();
        let mut removed = 0;
        while let Some(s) = queue.pop_front() {
            removed += 1;
            for &(l, t) in &self.succ[s] {
                if keep(l) {
                    indeg[t] -= 1;
                    if indeg[t] == 0 {
                        queue.push_back(t);
                    }
                }
            }
        }
        removed == n
    }

    /// Input-states are pairwise distinguishable.
    pub fn is_input_state_minimal(&self) -> bool {
        let input_states: Vec<usize> = (0..self.states.len())
            .filter(|&s| !self.inp_indices(&BTreeSet::from([s])).is_empty())
            .collect();
        for (i, &a) in input_states.iter().enumerate() {
            for &b in &input_states[i + 1..] {
                if !distinguishable_indices(self, a, self, b) {
                    return false;
                }
            }
        }
        true
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Whether the synchronous product of `a` started at `sa` and `b` started at
/// `sb` reaches a state where the two sides share no observable label.
pub fn distinguishable(a: &Iolts, sa: &str, b: &Iolts, sb: &str) -> Result<bool, ModelError> {
    if a.alphabet != b.alphabet {
        return Err(ModelError::AlphabetMismatch);
    }
    Ok(distinguishable_indices(a, a.state_index(sa)?, b, b.state_index(sb)?))
}

fn distinguishable_indices(a: &Iolts, sa: usize, b: &Iolts, sb: usize) -> bool {
    // Observable product over τ-closed pairs; a pair whose closures share no
    // enabled label is a sink of the cross-product.
    let start = (sa, sb);
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((p, q)) = queue.pop_front() {
        let cp = a.tau_closure(&BTreeSet::from([p]));
        let cq = b.tau_closure(&BTreeSet::from([q]));
        let mut common = false;
        for &x in &cp {
            for &(l, x2) in &a.succ[x] {
                let Some(l) = l else {
                    if seen.insert((x2, q)) {
                        queue.push_back((x2, q));
                    }
                    continue;
                };
                for &y in &cq {
                    for &(m, y2) in &b.succ[y] {
                        if m == Some(l) {
                            common = true;
                            if seen.insert((x2, y2)) {
                                queue.push_back((x2, y2));
                            }
                        }
                    }
                }
            }
        }
        for &y in &cq {
            for &(m, y2) in &b.succ[y] {
                if m.is_none() && seen.insert((p, y2)) {
                    queue.push_back((p, y2));
                }
            }
        }
        if !common {
            return true;
        }
    }
    false
}

/// Whether the input-states of a model are pairwise distinguishable.
pub fn is_input_state_minimal(model: &Iolts) -> bool {
    model.is_input_state_minimal()
}

/// An IOLTS whose `delta` self-loops sit exactly at the quiescent states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaIolts(Iolts);

impl DeltaIolts {
    /// Accepts a model that already declares `delta` when its loops satisfy
    /// the quiescence condition.
    pub fn check(model: Iolts) -> Result<DeltaIolts, ModelError> {
        let d = model
            .quiescence_index()
            .ok_or_else(|| ModelError::ReservedLabelMisuse(DELTA.to_string()))?;
        for s in 0..model.states.len() {
            let quiet = model.succ[s]
                .iter()
                .all(|&(l, _)| matches!(l, Some(l) if !model.output_mask[l] || l == d));
            let loops: Vec<usize> = model.succ[s].iter().filter(|x| x.0 == Some(d)).map(|x| x.1).collect();
            let ok = if quiet { loops == [s] } else { loops.is_empty() };
            if !ok || loops.iter().any(|&t| t != s) {
                return Err(ModelError::QuiescenceViolation(model.states[s].clone()));
            }
        }
        Ok(DeltaIolts(model))
    }

    pub fn model(&self) -> &Iolts {
        &self.0
    }

    pub fn into_model(self) -> Iolts {
        self.0
    }

    /// States carrying a `delta` self-loop.
    pub fn delta_states(&self) -> BTreeSet<String> {
        let d = self.0.quiescence_index().expect("declared");
        self.0
            .transitions
            .iter()
            .filter(|t| t.1 == Some(d))
            .map(|t| self.0.states[t.0].clone())
            .collect()
    }

    /// Removes the `delta` loops and extends again.
    pub fn rederive(&self) -> Result<DeltaIolts, ModelError> {
        let d = self.0.quiescence_index().expect("declared");
        let kept = self.0.transitions.iter().copied().filter(|t| t.1 != Some(d)).collect();
        let base = Iolts::assemble(self.0.alphabet.clone(), self.0.states.clone(), self.0.initial, kept);
        base.delta_extend()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct StateClass {
    pub name: String,
    pub sink: bool,
    pub input_state: bool,
    pub single_input: bool,
    pub input_enabled: bool,
    pub input_complete: bool,
    pub output_complete: bool,
    pub output_deterministic: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ClassReport {
    pub deterministic: bool,
    pub input_enabled: bool,
    pub input_complete: bool,
    pub output_complete: bool,
    pub output_deterministic: bool,
    pub single_input: bool,
    pub has_sink: bool,
    pub initially_connected: bool,
    pub progressive: bool,
    pub input_state_minimal: bool,
    pub input_states: usize,
    pub states: Vec<StateClass>,
}
