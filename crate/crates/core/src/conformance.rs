//! The (D,F)-conformance relation, its complete test-suite language, ioco
//! and adherence checks.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{
    complement, complete, determinize, determinize_lts, intersect, is_empty, lts_to_fsa, union_, Emptiness, Fsa,
    FsaError,
};
use crate::models::{Iolts, ModelError};

/// An observable trace, one label per element.
pub type Trace = Vec<String>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConformanceError {
    #[error("models or languages are over different alphabets")]
    AlphabetMismatch,
    #[error(transparent)]
    Fsa(#[from] FsaError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Conforms,
    Violates,
}

/// Which half of the test-suite language a witness belongs to: `D` words
/// the specification lacks, or `F` words the specification has.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Clause {
    D,
    F,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clause: Option<Clause>,
    /// Set when nondeterministic models were determinized before checking.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub determinized: bool,
}

impl Verdict {
    pub fn conforms() -> Verdict {
        Verdict { outcome: Outcome::Conforms, witness: None, clause: None, determinized: false }
    }

    pub fn violates(witness: Vec<String>, clause: Clause) -> Verdict {
        Verdict { outcome: Outcome::Violates, witness: Some(witness), clause: Some(clause), determinized: false }
    }

    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Conforms
    }
}

/// Automaton for `(D ∩ co-otr(S)) ∪ (F ∩ otr(S))`.
#[derive(Clone, Debug)]
pub struct TestSuiteFsa {
    pub automaton: Fsa,
}

/// Complete deterministic automaton for `otr(spec)` and its complement.
fn trace_automata(spec: &Iolts) -> Result<(Fsa, Fsa), ConformanceError> {
    let det = complete(&determinize(&lts_to_fsa(spec)))?;
    let co = complement(&det)?;
    Ok((det, co))
}

fn check_alphabet(spec: &Iolts, languages: &[&Fsa]) -> Result<(), ConformanceError> {
    if languages.iter().all(|l| l.alphabet() == spec.labels()) {
        Ok(())
    } else {
        Err(ConformanceError::AlphabetMismatch)
    }
}

fn check_models(spec: &Iolts, imp: &Iolts) -> Result<(), ConformanceError> {
    if spec.alphabet() == imp.alphabet() {
        Ok(())
    } else {
        Err(ConformanceError::AlphabetMismatch)
    }
}

pub fn build_test_suite(spec: &Iolts, d: &Fsa, f: &Fsa) -> Result<TestSuiteFsa, ConformanceError> {
    check_alphabet(spec, &[d, f])?;
    let (det, co) = trace_automata(spec)?;
    let automaton = union_(&intersect(d, &co)?, &intersect(f, &det)?)?;
    Ok(TestSuiteFsa { automaton })
}

/// Decides `impl conf_{D,F} spec`. The shortest witness is returned; on a
/// length tie a `D` witness is preferred.
pub fn check_conf(spec: &Iolts, imp: &Iolts, d: &Fsa, f: &Fsa) -> Result<Verdict, ConformanceError> {
    check_models(spec, imp)?;
    check_alphabet(spec, &[d, f])?;
    let (det, co) = trace_automata(spec)?;
    let traces = lts_to_fsa(imp);
    let wd = is_empty(&intersect(&intersect(&traces, d)?, &co)?);
    let wf = is_empty(&intersect(&intersect(&traces, f)?, &det)?);
    Ok(match (wd, wf) {
        (Emptiness::Empty, Emptiness::Empty) => Verdict::conforms(),
        (Emptiness::Witness(w), Emptiness::Empty) => Verdict::violates(w, Clause::D),
        (Emptiness::Empty, Emptiness::Witness(w)) => Verdict::violates(w, Clause::F),
        (Emptiness::Witness(a), Emptiness::Witness(b)) => {
            if b.len() < a.len() {
                Verdict::violates(b, Clause::F)
            } else {
                Verdict::violates(a, Clause::D)
            }
        }
    })
}

/// `otr(spec)` followed by one output label.
pub fn ioco_d_language(spec: &Iolts) -> Result<Fsa, ConformanceError> {
    let outputs = Fsa::letters(spec.labels().iter().cloned(), &spec.alphabet().outputs)?;
    Ok(crate::automata::concat(&lts_to_fsa(spec), &outputs)?)
}

/// Decides `impl ioco spec` by a breadth-first walk over pairs of states of
/// the determinized models; the witness is the shortest, then least,
/// trace ending in an output the specification does not allow.
pub fn check_ioco(spec: &Iolts, imp: &Iolts) -> Result<Verdict, ConformanceError> {
    check_models(spec, imp)?;
    let (s, ds) = determinize_lts(spec)?;
    let (i, di) = determinize_lts(imp)?;
    let n_labels = s.labels().len();
    let table = |m: &Iolts| {
        let mut t = vec![vec![None; n_labels]; m.states().len()];
        for &(p, l, q) in m.transitions() {
            t[p][l.expect("deterministic")] = Some(q);
        }
        t
    };
    let (ts, ti) = (table(&s), table(&i));
    let start = (s.initial(), i.initial());
    let mut parent: HashMap<(usize, usize), ((usize, usize), usize)> = HashMap::new();
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut verdict = Verdict::conforms();
    'search: while let Some((p, q)) = queue.pop_front() {
        for l in 0..n_labels {
            let Some(q2) = ti[q][l] else { continue };
            match ts[p][l] {
                None if s.is_output(l) => {
                    let mut word = vec![l];
                    let mut cur = (p, q);
                    while let Some(&(prev, m)) = parent.get(&cur) {
                        word.push(m);
                        cur = prev;
                    }
                    word.reverse();
                    verdict = Verdict::violates(s.trace_names(&word), Clause::D);
                    break 'search;
                }
                None => {}
                Some(p2) if seen.insert((p2, q2)) => {
                    parent.insert((p2, q2), ((p, q), l));
                    queue.push_back((p2, q2));
                }
                Some(_) => {}
            }
        }
    }
    verdict.determinized = ds || di;
    Ok(verdict)
}

/// Whether no observable trace of `imp` lies in the suite language.
pub fn check_adherence(imp: &Iolts, suite: &TestSuiteFsa) -> Result<Verdict, ConformanceError> {
    if imp.labels() != suite.automaton.alphabet() {
        return Err(ConformanceError::AlphabetMismatch);
    }
    Ok(match is_empty(&intersect(&lts_to_fsa(imp), &suite.automaton)?) {
        Emptiness::Empty => Verdict::conforms(),
        Emptiness::Witness(w) => Verdict { outcome: Outcome::Violates, witness: Some(w), clause: None, determinized: false },
    })
}

/// Finite sublanguages `D' ⊆ D` and `F' ⊆ F` that decide conformance of this
/// implementation exactly as `D` and `F` do: each is empty or holds the
/// shortest violating word of its clause.
pub fn finite_witnesses(
    spec: &Iolts,
    imp: &Iolts,
    d: &Fsa,
    f: &Fsa,
) -> Result<(Vec<Trace>, Vec<Trace>), ConformanceError> {
    check_models(spec, imp)?;
    check_alphabet(spec, &[d, f])?;
    let (det, co) = trace_automata(spec)?;
    let traces = lts_to_fsa(imp);
    let pick = |e: Emptiness| match e {
        Emptiness::Empty => vec![],
        Emptiness::Witness(w) => vec![w],
    };
    Ok((
        pick(is_empty(&intersect(&intersect(&traces, d)?, &co)?)),
        pick(is_empty(&intersect(&intersect(&traces, f)?, &det)?)),
    ))
}

/// Every trace of `imp` of length at most `max_len` that lies in the
/// test-suite language, with its clause, found by direct enumeration.
pub fn violations_up_to(
    spec: &Iolts,
    imp: &Iolts,
    d: &Fsa,
    f: &Fsa,
    max_len: usize,
) -> Result<Vec<(Vec<String>, Clause)>, ConformanceError> {
    check_models(spec, imp)?;
    check_alphabet(spec, &[d, f])?;
    let mut found = Vec::new();
    let mut frontier = vec![(Vec::<usize>::new(), imp.tau_closure(&BTreeSet::from([imp.initial()])))];
    let spec_start = spec.tau_closure(&BTreeSet::from([spec.initial()]));
    for depth in 0..=max_len {
        let mut next = Vec::new();
        for (word, states) in &frontier {
            let names = imp.trace_names(word);
            let in_spec = !spec.after_indices(&spec_start, word).is_empty();
            if !in_spec && d.accepts(&names) {
                found.push((names.clone(), Clause::D));
            }
            if in_spec && f.accepts(&names) {
                found.push((names, Clause::F));
            }
            if depth < max_len {
                for l in 0..imp.labels().len() {
                    let after = imp.step(states, l);
                    if !after.is_empty() {
                        let mut w = word.clone();
                        w.push(l);
                        next.push((w, after));
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(found)
}
