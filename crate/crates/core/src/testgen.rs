//! Test purposes, fault models and scheme suites.
//!
//! A test purpose is a tester model whose inputs are the specification's
//! outputs and vice versa, with reserved verdict states `fail` and `pass`.
//! A scheme keeps the specification's orientation. Both are stored as
//! [`TestPurpose`] values tagged with their [`Orientation`].

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::automata::{determinize_lts, FsaError};
use crate::models::{Iolts, ModelError, RawModel, Sym, FAIL, PASS};

#[derive(Debug, Error)]
pub enum TestgenError {
    #[error("specification must be deterministic")]
    NondeterministicSpec,
    #[error("{paths} purposes exceed the cap of {cap}")]
    BudgetExceeded { paths: u128, cap: usize },
    #[error("state {0:?} has more than one tester output")]
    NotLinear(String),
    #[error("state name {0:?} is reserved for verdicts")]
    ReservedStateName(String),
    #[error("a verdict state reaches the other verdict state")]
    VerdictPath,
    #[error("bad state enumeration: {0}")]
    BadEnumeration(String),
    #[error("operation needs a {0:?} artifact")]
    WrongOrientation(Orientation),
    #[error("word is not a path to fail in the multigraph")]
    NoSuchPath,
    #[error("io error: {0}")]
    Io(String),
    #[error("malformed artifact: {0}")]
    Json(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Fsa(#[from] FsaError),
}

/// `Tester`: inputs are the specification's outputs (test purposes).
/// `Spec`: inputs are the specification's inputs (schemes).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Tester,
    Spec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestPurpose {
    pub name: String,
    model: Iolts,
    orientation: Orientation,
}

pub type Scheme = TestPurpose;

fn verdict_index(model: &Iolts, name: &str) -> Option<usize> {
    model.state_index(name).ok()
}

impl TestPurpose {
    /// Wraps a model, rejecting ones where a verdict state reaches the other.
    pub fn new(name: impl Into<String>, model: Iolts, orientation: Orientation) -> Result<TestPurpose, TestgenError> {
        let tp = TestPurpose { name: name.into(), model, orientation };
        if let (Some(f), Some(p)) = (tp.fail(), tp.pass()) {
            let from_f = tp.model.reach_from(f);
            let from_p = tp.model.reach_from(p);
            if from_f.contains(&p) || from_p.contains(&f) {
                return Err(TestgenError::VerdictPath);
            }
        }
        Ok(tp)
    }

    pub fn model(&self) -> &Iolts {
        &self.model
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// The model with the specification's input/output orientation.
    pub fn spec_view(&self) -> Iolts {
        match self.orientation {
            Orientation::Tester => self.model.swapped(),
            Orientation::Spec => self.model.clone(),
        }
    }

    pub fn fail(&self) -> Option<usize> {
        verdict_index(&self.model, FAIL)
    }

    pub fn pass(&self) -> Option<usize> {
        verdict_index(&self.model, PASS)
    }

    fn is_verdict(&self, s: usize) -> bool {
        Some(s) == self.fail() || Some(s) == self.pass()
    }

    /// Longest trace, not counting self-loops at verdict states; `None` when
    /// some other cycle exists.
    pub fn max_trace_len(&self) -> Option<usize> {
        let n = self.model.states().len();
        let arcs: Vec<Vec<usize>> = (0..n)
            .map(|s| {
                self.model
                    .successors(s)
                    .iter()
                    .filter(|&&(_, t)| !(t == s && self.is_verdict(s)))
                    .map(|&(_, t)| t)
                    .collect()
            })
            .collect();
        let order = topological(&arcs)?;
        let mut longest = vec![0usize; n];
        for &s in order.iter().rev() {
            longest[s] = arcs[s].iter().map(|&t| longest[t] + 1).max().unwrap_or(0);
        }
        Some(longest[self.model.initial()])
    }
}

fn topological(arcs: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = arcs.len();
    let mut indeg = vec![0usize; n];
    for out in arcs {
        for &t in out {
            indeg[t] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&s| indeg[s] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(s) = queue.pop_front() {
        order.push(s);
        for &t in &arcs[s] {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                queue.push_back(t);
            }
        }
    }
    (order.len() == n).then_some(order)
}

trait Reach {
    fn reach_from(&self, s: usize) -> BTreeSet<usize>;
}

impl Reach for Iolts {
    /// Every state reachable from `s` by one or more moves.
    fn reach_from(&self, s: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![s];
        while let Some(p) = stack.pop() {
            for &(_, t) in self.successors(p) {
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        seen
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArtifactKind {
    Faultmodel,
    Schemes,
    Singletp,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: ArtifactKind,
    pub spec_sha256: String,
    pub m: usize,
    pub transforms: Vec<String>,
    pub enumeration: Vec<String>,
    /// Number of root-to-fail paths in the multigraph.
    pub paths: u128,
    pub truncated: bool,
}

/// An ordered collection of test purposes or schemes over one alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaultModel {
    pub purposes: Vec<TestPurpose>,
    pub provenance: Provenance,
}

pub type SchemeSuite = FaultModel;

/// SHA-256 of the canonical JSON form of a model.
pub fn model_sha256(model: &Iolts) -> String {
    hex::encode(Sha256::digest(model.to_json().as_bytes()))
}

impl FaultModel {
    pub fn empty(kind: ArtifactKind) -> FaultModel {
        FaultModel {
            purposes: vec![],
            provenance: Provenance {
                kind,
                spec_sha256: String::new(),
                m: 0,
                transforms: vec![],
                enumeration: vec![],
                paths: 0,
                truncated: false,
            },
        }
    }

    /// Writes `provenance.json` and one model file per purpose.
    pub fn save(&self, dir: &Path) -> Result<(), TestgenError> {
        let io = |e: std::io::Error| TestgenError::Io(e.to_string());
        fs::create_dir_all(dir).map_err(io)?;
        let prov = serde_json::to_string_pretty(&self.provenance).expect("serializable");
        fs::write(dir.join("provenance.json"), prov + "\n").map_err(io)?;
        for tp in &self.purposes {
            fs::write(dir.join(format!("{}.json", tp.name)), tp.model.to_json() + "\n").map_err(io)?;
        }
        Ok(())
    }

    /// Reads a directory written by [`FaultModel::save`]. A directory
    /// without a provenance record holds an empty fault model.
    pub fn load(dir: &Path) -> Result<FaultModel, TestgenError> {
        let io = |e: std::io::Error| TestgenError::Io(e.to_string());
        let prov_path = dir.join("provenance.json");
        let mut fm = if prov_path.exists() {
            let text = fs::read_to_string(&prov_path).map_err(io)?;
            let provenance: Provenance =
                serde_json::from_str(&text).map_err(|e| TestgenError::Json(e.to_string()))?;
            FaultModel { purposes: vec![], provenance }
        } else {
            if !dir.is_dir() {
                return Err(TestgenError::Io(format!("{} is not a directory", dir.display())));
            }
            FaultModel::empty(ArtifactKind::Faultmodel)
        };
        let orientation = match fm.provenance.kind {
            ArtifactKind::Schemes => Orientation::Spec,
            _ => Orientation::Tester,
        };
        let mut files: Vec<_> = fs::read_dir(dir)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json") && p.file_name().is_some_and(|n| n != "provenance.json"))
            .collect();
        files.sort();
        for path in files {
            let text = fs::read_to_string(&path).map_err(io)?;
            let raw: RawModel = serde_json::from_str(&text).map_err(|e| TestgenError::Json(e.to_string()))?;
            let model = Iolts::from_raw(&raw, false)?;
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            fm.purposes.push(TestPurpose::new(name, model, orientation)?);
        }
        Ok(fm)
    }
}

fn check_reserved_names(spec: &Iolts) -> Result<(), TestgenError> {
    match spec.states().iter().find(|s| *s == FAIL || *s == PASS) {
        Some(s) => Err(TestgenError::ReservedStateName(s.clone())),
        None => Ok(()),
    }
}

fn output_indices(model: &Iolts) -> Vec<usize> {
    (0..model.labels().len()).filter(|&l| model.is_output(l)).collect()
}

fn input_indices(model: &Iolts) -> Vec<usize> {
    (0..model.labels().len()).filter(|&l| model.is_input(l)).collect()
}

/// The single test purpose that decides ioco for every implementation: the
/// determinized specification, swapped, where each missing output leads to
/// `fail`. `fail` carries self-loops on the specification's outputs and is
/// left out when no output is ever missing.
pub fn complete_test_purpose(spec: &Iolts) -> Result<TestPurpose, TestgenError> {
    check_reserved_names(spec)?;
    let (b, _) = determinize_lts(spec)?;
    let n = b.states().len();
    let mut states = b.states().to_vec();
    states.push(FAIL.to_string());
    let mut ts: Vec<(usize, Sym, usize)> = b.transitions().to_vec();
    let outputs = output_indices(&b);
    for s in 0..n {
        let present: BTreeSet<usize> = b.successors(s).iter().filter_map(|t| t.0).collect();
        for &l in &outputs {
            if !present.contains(&l) {
                ts.push((s, Some(l), n));
            }
        }
    }
    for &l in &outputs {
        ts.push((n, Some(l), n));
    }
    let model = Iolts::assemble(b.alphabet().swapped(), states, b.initial(), ts).restrict_to_reachable();
    TestPurpose::new("complete", model, Orientation::Tester)
}

/// Node of the level multigraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Node {
    State { state: usize, level: usize },
    Fail,
}

/// A root-to-fail path: visited nodes and the labels between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphPath {
    pub nodes: Vec<usize>,
    pub labels: Vec<usize>,
}

/// Layered unfolding of a deterministic specification with `mn+1` levels.
/// Arcs that move to a later state in the enumeration stay on their level;
/// all others go one level down. Nodes unreachable from the root are pruned.
#[derive(Clone, Debug)]
pub struct Multigraph {
    spec: Iolts,
    m: usize,
    levels: usize,
    enumeration: Vec<usize>,
    pre_prune_nodes: usize,
    nodes: Vec<Node>,
    arcs: Vec<Vec<(usize, usize)>>,
    fail: Option<usize>,
}

impl Multigraph {
    /// `enumeration` lists state names in order; by default the initial
    /// state comes first and the rest follow in lexicographic order.
    pub fn build(spec: &Iolts, m: usize, enumeration: Option<&[String]>) -> Result<Multigraph, TestgenError> {
        if !spec.is_deterministic() {
            return Err(TestgenError::NondeterministicSpec);
        }
        let n = spec.states().len();
        let order: Vec<usize> = match enumeration {
            Some(names) => {
                let mut order = Vec::with_capacity(n);
                for name in names {
                    order.push(spec.state_index(name).map_err(|_| TestgenError::BadEnumeration(name.clone()))?);
                }
                let distinct: BTreeSet<usize> = order.iter().copied().collect();
                if order.len() != n || distinct.len() != n {
                    return Err(TestgenError::BadEnumeration("must list every state once".into()));
                }
                order
            }
            None => {
                let mut rest: Vec<usize> = (0..n).filter(|&s| s != spec.initial()).collect();
                rest.sort_by(|&a, &b| spec.states()[a].cmp(&spec.states()[b]));
                std::iter::once(spec.initial()).chain(rest).collect()
            }
        };
        let mut rank = vec![0; n];
        for (r, &s) in order.iter().enumerate() {
            rank[s] = r;
        }
        let levels = m * n + 1;
        let total = n * levels;
        let fail_id = total;
        let outputs = output_indices(spec);
        let mut arcs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); total + 1];
        for k in 0..levels {
            for (r, &s) in order.iter().enumerate() {
                let id = k * n + r;
                let mut present = BTreeSet::new();
                for &(l, t) in spec.successors(s) {
                    let l = l.expect("deterministic");
                    present.insert(l);
                    if rank[t] > r {
                        arcs[id].push((l, k * n + rank[t]));
                    } else if k + 1 < levels {
                        arcs[id].push((l, (k + 1) * n + rank[t]));
                    }
                }
                for &l in &outputs {
                    if !present.contains(&l) {
                        arcs[id].push((l, fail_id));
                    }
                }
                arcs[id].sort_unstable();
            }
        }
        let root = order.iter().position(|&s| s == spec.initial()).expect("initial state");
        let mut seen = vec![false; total + 1];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(_, t) in &arcs[v] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        let mut map = vec![usize::MAX; total + 1];
        let mut nodes = Vec::new();
        for id in 0..=total {
            if seen[id] {
                map[id] = nodes.len();
                nodes.push(if id == fail_id {
                    Node::Fail
                } else {
                    Node::State { state: order[id % n], level: id / n }
                });
            }
        }
        let kept: Vec<Vec<(usize, usize)>> = (0..=total)
            .filter(|&id| seen[id])
            .map(|id| arcs[id].iter().map(|&(l, t)| (l, map[t])).collect())
            .collect();
        let fail = seen[fail_id].then(|| map[fail_id]);
        Ok(Multigraph {
            spec: spec.clone(),
            m,
            levels,
            enumeration: order,
            pre_prune_nodes: total,
            nodes,
            arcs: kept,
            fail,
        })
    }

    pub fn spec(&self) -> &Iolts {
        &self.spec
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// State nodes before pruning, `n(mn+1)`.
    pub fn pre_prune_nodes(&self) -> usize {
        self.pre_prune_nodes
    }

    /// Reachable nodes, including `fail` when it is reachable.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn fail(&self) -> Option<usize> {
        self.fail
    }

    pub fn node(&self, i: usize) -> Node {
        self.nodes[i]
    }

    pub fn arcs(&self, i: usize) -> &[(usize, usize)] {
        &self.arcs[i]
    }

    pub fn enumeration(&self) -> Vec<String> {
        self.enumeration.iter().map(|&s| self.spec.states()[s].clone()).collect()
    }

    /// `state@level`, or `fail`.
    pub fn node_name(&self, i: usize) -> String {
        match self.nodes[i] {
            Node::State { state, level } => format!("{}@{}", self.spec.states()[state], level),
            Node::Fail => FAIL.to_string(),
        }
    }

    /// Number of paths from each node to `fail`, saturating at `u128::MAX`.
    fn paths_to_fail(&self) -> Vec<u128> {
        let mut count = vec![0u128; self.nodes.len()];
        if let Some(f) = self.fail {
            count[f] = 1;
        }
        // Node indices follow (level, rank), which is a topological order.
        for v in (0..self.nodes.len()).rev() {
            if Some(v) == self.fail {
                continue;
            }
            count[v] = self.arcs[v].iter().fold(0u128, |acc, &(_, t)| acc.saturating_add(count[t]));
        }
        count
    }

    /// Number of root-to-fail paths, that is, of raw test purposes.
    pub fn count_paths(&self) -> u128 {
        self.paths_to_fail()[self.root()]
    }

    /// Lazily enumerates root-to-fail paths in lexicographic order of words.
    pub fn paths(&self) -> PathIter<'_> {
        let live = self.paths_to_fail().iter().map(|&c| c > 0).collect();
        let stack = if self.fail.is_some() { vec![(self.root(), 0)] } else { vec![] };
        PathIter { graph: self, live, stack, labels: vec![] }
    }

    /// The path at position `index` of [`Multigraph::paths`], found without
    /// enumerating its predecessors.
    pub fn path_at(&self, mut index: u128) -> Option<GraphPath> {
        let count = self.paths_to_fail();
        if index >= count[self.root()] {
            return None;
        }
        let mut nodes = vec![self.root()];
        let mut labels = vec![];
        let mut cur = self.root();
        while Some(cur) != self.fail {
            let mut chosen = None;
            for &(l, t) in &self.arcs[cur] {
                if index < count[t] {
                    chosen = Some((l, t));
                    break;
                }
                index -= count[t];
            }
            let (l, t) = chosen?;
            labels.push(l);
            nodes.push(t);
            cur = t;
        }
        Some(GraphPath { nodes, labels })
    }

    /// The path spelling `word`, whose last label must lead to `fail`.
    pub fn path_for(&self, word: &[usize]) -> Option<GraphPath> {
        let mut nodes = vec![self.root()];
        let mut cur = self.root();
        for &l in word {
            cur = self.arcs[cur].iter().find(|a| a.0 == l)?.1;
            nodes.push(cur);
        }
        (Some(cur) == self.fail).then(|| GraphPath { nodes, labels: word.to_vec() })
    }

    /// The raw linear test purpose of a path, in tester orientation.
    pub fn purpose(&self, path: &GraphPath, name: impl Into<String>) -> Result<TestPurpose, TestgenError> {
        let (states, ts) = self.linear(path);
        let model = Iolts::assemble(self.spec.alphabet().swapped(), states, 0, ts);
        TestPurpose::new(name, model, Orientation::Tester)
    }

    /// The scheme of a path: the linear path in specification orientation,
    /// where every state taking an output also sends each other output to a
    /// `pass` sink.
    pub fn scheme(&self, path: &GraphPath, name: impl Into<String>) -> Result<Scheme, TestgenError> {
        let (mut states, mut ts) = self.linear(path);
        let outputs = output_indices(&self.spec);
        let mut pass = None;
        for (i, &l) in path.labels.iter().enumerate() {
            if !self.spec.is_output(l) {
                continue;
            }
            for &x in &outputs {
                if x != l {
                    let p = *pass.get_or_insert_with(|| {
                        states.push(PASS.to_string());
                        states.len() - 1
                    });
                    ts.push((i, Some(x), p));
                }
            }
        }
        let model = Iolts::assemble(self.spec.alphabet().clone(), states, 0, ts);
        TestPurpose::new(name, model, Orientation::Spec)
    }

    fn linear(&self, path: &GraphPath) -> (Vec<String>, Vec<(usize, Sym, usize)>) {
        let states = path.nodes.iter().map(|&v| self.node_name(v)).collect();
        let ts = path.labels.iter().enumerate().map(|(i, &l)| (i, Some(l), i + 1)).collect();
        (states, ts)
    }
}

/// Depth-first walk over root-to-fail paths, skipping dead ends.
pub struct PathIter<'a> {
    graph: &'a Multigraph,
    live: Vec<bool>,
    stack: Vec<(usize, usize)>,
    labels: Vec<usize>,
}

impl Iterator for PathIter<'_> {
    type Item = GraphPath;

    fn next(&mut self) -> Option<GraphPath> {
        while let Some(&mut (v, ref mut next)) = self.stack.last_mut() {
            if Some(v) == self.graph.fail {
                let path = GraphPath {
                    nodes: self.stack.iter().map(|e| e.0).collect(),
                    labels: self.labels.clone(),
                };
                self.stack.pop();
                self.labels.pop();
                return Some(path);
            }
            let arcs = &self.graph.arcs[v];
            while *next < arcs.len() && !self.live[arcs[*next].1] {
                *next += 1;
            }
            if *next == arcs.len() {
                self.stack.pop();
                self.labels.pop();
                continue;
            }
            let (l, t) = arcs[*next];
            *next += 1;
            self.labels.push(l);
            self.stack.push((t, 0));
        }
        None
    }
}

/// Sends every missing tester input (specification output) to `pass` and
/// adds input self-loops at both verdict states.
pub fn make_input_enabled(tp: &TestPurpose) -> Result<TestPurpose, TestgenError> {
    if tp.orientation != Orientation::Tester {
        return Err(TestgenError::WrongOrientation(Orientation::Tester));
    }
    let m = &tp.model;
    let inputs = input_indices(m);
    let mut states = m.states().to_vec();
    let mut ts = m.transitions().to_vec();
    let mut pass = tp.pass();
    for s in 0..m.states().len() {
        if tp.is_verdict(s) {
            continue;
        }
        let present: BTreeSet<usize> = m.successors(s).iter().filter_map(|t| t.0).collect();
        for &l in &inputs {
            if !present.contains(&l) {
                let p = *pass.get_or_insert_with(|| {
                    states.push(PASS.to_string());
                    states.len() - 1
                });
                ts.push((s, Some(l), p));
            }
        }
    }
    for v in [tp.fail(), pass].into_iter().flatten() {
        ts.extend(inputs.iter().map(|&l| (v, Some(l), v)));
    }
    let model = Iolts::assemble(m.alphabet().clone(), states, m.initial(), ts);
    TestPurpose::new(tp.name.clone(), model, Orientation::Tester)
}

/// Gives every non-verdict state without a tester output one, the least
/// tester output label, leading to `pass`.
pub fn make_output_deterministic(tp: &TestPurpose) -> Result<TestPurpose, TestgenError> {
    if tp.orientation != Orientation::Tester {
        return Err(TestgenError::WrongOrientation(Orientation::Tester));
    }
    let m = &tp.model;
    let Some(&least) = output_indices(m).first() else {
        return Ok(tp.clone());
    };
    let enabled = validate_test_purpose(tp).input_enabled;
    let mut states = m.states().to_vec();
    let mut ts = m.transitions().to_vec();
    let mut pass = tp.pass();
    let mut created = false;
    for s in 0..m.states().len() {
        if tp.is_verdict(s) {
            continue;
        }
        let outs = m.successors(s).iter().filter(|t| t.0.is_some_and(|l| m.is_output(l))).count();
        if outs > 1 {
            return Err(TestgenError::NotLinear(m.states()[s].clone()));
        }
        if outs == 0 {
            let p = *pass.get_or_insert_with(|| {
                created = true;
                states.push(PASS.to_string());
                states.len() - 1
            });
            ts.push((s, Some(least), p));
        }
    }
    if created && enabled {
        let p = pass.expect("created");
        ts.extend(input_indices(m).into_iter().map(|l| (p, Some(l), p)));
    }
    let model = Iolts::assemble(m.alphabet().clone(), states, m.initial(), ts);
    TestPurpose::new(tp.name.clone(), model, Orientation::Tester)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenOptions {
    pub input_enabled: bool,
    pub output_deterministic: bool,
    /// Upper bound on the number of purposes.
    pub cap: Option<usize>,
    /// With a cap, keep the first `cap` purposes instead of failing.
    pub truncate: bool,
    pub enumeration: Option<Vec<String>>,
}

impl GenOptions {
    pub fn all_transforms() -> GenOptions {
        GenOptions { input_enabled: true, output_deterministic: true, ..GenOptions::default() }
    }

    fn transforms(&self) -> Vec<String> {
        let mut t = vec![];
        if self.input_enabled {
            t.push("input-enabled".to_string());
        }
        if self.output_deterministic {
            t.push("output-deterministic".to_string());
        }
        t
    }
}

fn purpose_name(i: usize) -> String {
    format!("tp{i:05}")
}

fn apply_transforms(tp: TestPurpose, opts: &GenOptions) -> Result<TestPurpose, TestgenError> {
    let tp = if opts.input_enabled { make_input_enabled(&tp)? } else { tp };
    if opts.output_deterministic {
        make_output_deterministic(&tp)
    } else {
        Ok(tp)
    }
}

fn generate(spec: &Iolts, m: usize, opts: &GenOptions, kind: ArtifactKind) -> Result<FaultModel, TestgenError> {
    check_reserved_names(spec)?;
    let (b, _) = determinize_lts(spec)?;
    let g = Multigraph::build(&b, m, opts.enumeration.as_deref())?;
    let paths = g.count_paths();
    let mut limit = usize::MAX;
    let mut truncated = false;
    if let Some(cap) = opts.cap {
        if paths > cap as u128 {
            if !opts.truncate {
                return Err(TestgenError::BudgetExceeded { paths, cap });
            }
            limit = cap;
            truncated = true;
        }
    }
    let mut purposes = Vec::new();
    for (i, path) in g.paths().take(limit).enumerate() {
        let tp = match kind {
            ArtifactKind::Schemes => g.scheme(&path, purpose_name(i))?,
            _ => apply_transforms(g.purpose(&path, purpose_name(i))?, opts)?,
        };
        purposes.push(tp);
    }
    let transforms = if kind == ArtifactKind::Schemes { vec![] } else { opts.transforms() };
    Ok(FaultModel {
        purposes,
        provenance: Provenance {
            kind,
            spec_sha256: model_sha256(spec),
            m,
            transforms,
            enumeration: g.enumeration(),
            paths,
            truncated,
        },
    })
}

/// One linear test purpose per root-to-fail path of the multigraph, with
/// the requested transforms applied.
pub fn gen_fault_model(spec: &Iolts, m: usize, opts: &GenOptions) -> Result<FaultModel, TestgenError> {
    generate(spec, m, opts, ArtifactKind::Faultmodel)
}

/// One scheme per root-to-fail path of the multigraph.
pub fn gen_scheme_suite(spec: &Iolts, m: usize, opts: &GenOptions) -> Result<SchemeSuite, TestgenError> {
    generate(spec, m, opts, ArtifactKind::Schemes)
}

/// The purpose the fault model would contain for the given word, if any.
pub fn purpose_for_word<S: AsRef<str>>(
    spec: &Iolts,
    m: usize,
    word: &[S],
    opts: &GenOptions,
) -> Result<TestPurpose, TestgenError> {
    let (b, _) = determinize_lts(spec)?;
    let g = Multigraph::build(&b, m, opts.enumeration.as_deref())?;
    let labels = b.trace_indices(word)?;
    let path = g.path_for(&labels).ok_or(TestgenError::NoSuchPath)?;
    let name = word.iter().map(AsRef::as_ref).collect::<Vec<_>>().join("");
    apply_transforms(g.purpose(&path, name)?, opts)
}

/// Structural checks on a test purpose. Output-determinism and the
/// one-output-plus-all-inputs shape are checked at non-verdict states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PurposeReport {
    /// No verdict state reaches the other.
    pub verdicts_separated: bool,
    pub deterministic: bool,
    pub input_enabled: bool,
    pub output_deterministic: bool,
    /// No cycles other than self-loops at verdict states.
    pub acyclic_except_verdict_loops: bool,
    /// Both verdict states exist and accept every tester input.
    pub verdict_states_enabled: bool,
    /// Each non-verdict state enables every tester input and one tester output.
    pub init_shape: bool,
}

impl PurposeReport {
    pub fn all(&self) -> bool {
        self.verdicts_separated
            && self.deterministic
            && self.input_enabled
            && self.output_deterministic
            && self.acyclic_except_verdict_loops
            && self.verdict_states_enabled
            && self.init_shape
    }
}

fn direct_labels(m: &Iolts, s: usize) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let mut ins = BTreeSet::new();
    let mut outs = BTreeSet::new();
    for &(l, _) in m.successors(s) {
        if let Some(l) = l {
            if m.is_output(l) {
                outs.insert(l);
            } else {
                ins.insert(l);
            }
        }
    }
    (ins, outs)
}

pub fn validate_test_purpose(tp: &TestPurpose) -> PurposeReport {
    let m = &tp.model;
    let inputs: BTreeSet<usize> = input_indices(m).into_iter().collect();
    let separated = match (tp.fail(), tp.pass()) {
        (Some(f), Some(p)) => !m.reach_from(f).contains(&p) && !m.reach_from(p).contains(&f),
        _ => true,
    };
    let mut input_enabled = true;
    let mut output_det = true;
    let mut shape = true;
    for s in 0..m.states().len() {
        let (ins, outs) = direct_labels(m, s);
        let has_tau = m.successors(s).iter().any(|t| t.0.is_none());
        input_enabled &= ins == inputs;
        if !tp.is_verdict(s) {
            output_det &= outs.len() == 1;
            shape &= ins == inputs && outs.len() == 1 && !has_tau;
        }
    }
    let verdict_ok = |v: Option<usize>| {
        v.is_some_and(|v| {
            let (ins, outs) = direct_labels(m, v);
            ins == inputs && outs.is_empty() && m.successors(v).iter().all(|&(_, t)| t == v)
        })
    };
    PurposeReport {
        verdicts_separated: separated,
        deterministic: m.is_deterministic(),
        input_enabled,
        output_deterministic: output_det,
        acyclic_except_verdict_loops: tp.max_trace_len().is_some(),
        verdict_states_enabled: verdict_ok(tp.fail()) && verdict_ok(tp.pass()),
        init_shape: shape,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchemeReport {
    pub acyclic: bool,
    pub single_input: bool,
    pub output_complete: bool,
    pub fail_is_sink: bool,
    /// Only `fail` and `pass` are sinks.
    pub sinks_are_verdicts: bool,
}

impl SchemeReport {
    pub fn all(&self) -> bool {
        self.acyclic && self.single_input && self.output_complete && self.fail_is_sink && self.sinks_are_verdicts
    }
}

pub fn validate_scheme(s: &Scheme) -> SchemeReport {
    let m = &s.model;
    let n = m.states().len();
    let arcs: Vec<Vec<usize>> = (0..n).map(|v| m.successors(v).iter().map(|t| t.1).collect()).collect();
    let all_outputs: BTreeSet<usize> = output_indices(m).into_iter().collect();
    let mut single_input = true;
    let mut output_complete = true;
    let mut sinks_ok = true;
    for v in 0..n {
        let (ins, outs) = direct_labels(m, v);
        single_input &= ins.len() <= 1;
        output_complete &= outs.is_empty() || outs == all_outputs;
        if m.successors(v).is_empty() {
            sinks_ok &= s.is_verdict(v);
        }
    }
    SchemeReport {
        acyclic: topological(&arcs).is_some(),
        single_input,
        output_complete,
        fail_is_sink: s.fail().is_some_and(|f| m.successors(f).is_empty()),
        sinks_are_verdicts: sinks_ok,
    }
}

/// Names of the states of each path node sequence, for inspection.
pub fn path_node_names(g: &Multigraph, path: &GraphPath) -> Vec<String> {
    path.nodes.iter().map(|&v| g.node_name(v)).collect()
}

/// Per-label tally of arcs, used by tests and the command-line summary.
pub fn arc_kinds(g: &Multigraph) -> BTreeMap<&'static str, usize> {
    let mut tally = BTreeMap::new();
    for v in 0..g.node_count() {
        for &(_, t) in g.arcs(v) {
            let kind = match (g.node(v), g.node(t)) {
                (_, Node::Fail) => "fail",
                (Node::State { level: a, .. }, Node::State { level: b, .. }) if a == b => "horizontal",
                _ => "vertical",
            };
            *tally.entry(kind).or_insert(0) += 1;
        }
    }
    tally
}
