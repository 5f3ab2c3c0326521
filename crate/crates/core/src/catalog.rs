//! Small reference models used by the tests, the examples directory and the
//! command-line tool.

use crate::models::Iolts;

fn build(inputs: &[&str], outputs: &[&str], transitions: &[(&str, &str, &str)]) -> Iolts {
    Iolts::new(inputs, outputs, transitions[0].0, transitions).expect("catalog model is valid")
}

/// Labels b, c, t with two internal moves back to the start; no input/output split.
pub fn tau_loop_lts() -> Iolts {
    build(
        &["b", "c", "t"],
        &[],
        &[
            ("s0", "b", "s1"),
            ("s0", "b", "s2"),
            ("s1", "b", "s1"),
            ("s1", "t", "s3"),
            ("s2", "b", "s2"),
            ("s2", "c", "s4"),
            ("s3", "tau", "s0"),
            ("s4", "tau", "s0"),
        ],
    )
}

/// Nondeterministic drinks machine: a button press commits silently to tea or coffee.
pub fn coffee_machine() -> Iolts {
    build(
        &["but"],
        &["tea", "coffee"],
        &[
            ("s0", "but", "s1"),
            ("s0", "but", "s2"),
            ("s1", "but", "s1"),
            ("s2", "but", "s2"),
            ("s1", "tea", "tea"),
            ("s2", "coffee", "cof"),
            ("tea", "tau", "s0"),
            ("cof", "tau", "s0"),
        ],
    )
}

/// Four-state specification used for (D,F)-conformance.
pub fn conf_spec() -> Iolts {
    build(
        &["a", "b"],
        &["x"],
        &[
            ("s0", "a", "s1"),
            ("s0", "b", "s3"),
            ("s1", "b", "s2"),
            ("s1", "x", "s2"),
            ("s1", "a", "s3"),
            ("s2", "b", "s2"),
            ("s2", "x", "s3"),
            ("s3", "a", "s3"),
            ("s3", "b", "s0"),
        ],
    )
}

/// Implementation of [`conf_spec`] where the output at q2 became an input.
pub fn conf_impl() -> Iolts {
    build(
        &["a", "b"],
        &["x"],
        &[
            ("q0", "a", "q1"),
            ("q0", "b", "q3"),
            ("q1", "b", "q2"),
            ("q1", "x", "q2"),
            ("q1", "a", "q3"),
            ("q2", "b", "q2"),
            ("q2", "a", "q3"),
            ("q3", "a", "q3"),
            ("q3", "b", "q0"),
        ],
    )
}

/// [`conf_impl`] with an extra output from q3 back to q0.
pub fn conf_impl_extra_output() -> Iolts {
    let mut raw = conf_impl().to_raw();
    raw.transitions.push(("q3".into(), "x".into(), "q0".into()));
    Iolts::from_raw(&raw, false).expect("valid")
}

/// Four-state deterministic specification used for ioco and fault models.
pub fn ioco_spec() -> Iolts {
    build(
        &["a", "b"],
        &["x"],
        &[
            ("s0", "a", "s1"),
            ("s0", "b", "s3"),
            ("s1", "a", "s1"),
            ("s1", "x", "s2"),
            ("s1", "b", "s3"),
            ("s2", "a", "s1"),
            ("s2", "b", "s3"),
            ("s3", "a", "s3"),
            ("s3", "b", "s2"),
        ],
    )
}

/// [`ioco_spec`] with an unspecified output from q3.
pub fn ioco_impl() -> Iolts {
    build(
        &["a", "b"],
        &["x"],
        &[
            ("q0", "a", "q1"),
            ("q0", "b", "q3"),
            ("q1", "a", "q1"),
            ("q1", "x", "q2"),
            ("q1", "b", "q3"),
            ("q2", "a", "q1"),
            ("q2", "b", "q3"),
            ("q3", "a", "q3"),
            ("q3", "b", "q2"),
            ("q3", "x", "q2"),
        ],
    )
}

/// Model with internal moves whose quiescent states are s1 and s3.
pub fn quiescence_base() -> Iolts {
    build(
        &["a"],
        &["b"],
        &[
            ("s0", "a", "s1"),
            ("s0", "tau", "s1"),
            ("s1", "a", "s2"),
            ("s2", "tau", "s3"),
            ("s2", "b", "s3"),
            ("s3", "a", "s3"),
        ],
    )
}

/// Inputs 0 and 1 toggle between s0 and s1 on `1`; only s1 may emit x.
pub fn parity_spec() -> Iolts {
    build(
        &["0", "1"],
        &["x"],
        &[
            ("s0", "0", "s0"),
            ("s0", "1", "s1"),
            ("s1", "0", "s1"),
            ("s1", "1", "s0"),
            ("s1", "x", "s2"),
            ("s2", "0", "s2"),
            ("s2", "1", "s2"),
        ],
    )
}

/// Parity specification extended with an output `a` and a chain s2..s_k of
/// input-states closing back to s0; it has `k` input-states. Requires k >= 3.
pub fn ring_spec(k: usize) -> Iolts {
    assert!(k >= 3, "ring needs at least three states after s1");
    let name = |i: usize| format!("s{i}");
    let mut ts: Vec<(String, &str, String)> = vec![
        (name(0), "0", name(0)),
        (name(0), "1", name(1)),
        (name(0), "a", name(2)),
        (name(1), "0", name(1)),
        (name(1), "1", name(0)),
        (name(1), "x", name(2)),
        (name(1), "a", name(3)),
    ];
    for i in 2..k {
        ts.push((name(i), "0", name(i + 1)));
        ts.push((name(i), "1", name(i + 1)));
    }
    ts.push((name(k), "x", name(0)));
    let borrowed: Vec<(&str, &str, &str)> = ts.iter().map(|(s, l, t)| (s.as_str(), *l, t.as_str())).collect();
    build(&["0", "1"], &["a", "x"], &borrowed)
}

/// One state with an input self-loop and no outputs.
pub fn single_loop_spec() -> Iolts {
    build(&["a"], &["x"], &[("s0", "a", "s0")])
}
