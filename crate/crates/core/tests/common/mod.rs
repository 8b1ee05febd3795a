//! Dense reference pipelines built from codewords, circuits and Bell links,
//! independent of the stabilizer recurrences.
#![allow(dead_code)]

use forge_core::codes::{self, CodeKind, CodeSpec, Party};
use forge_core::oracle::{self, link, DenseState};
use forge_core::tasks::BellOutcome;
use forge_core::{Bits, PauliString};
use num_complex::Complex64 as C;

pub const TOL: f64 = 1e-10;

/// Links each non-distinguished qubit of `outer` to the distinguished qubit
/// of a fresh copy of `inner`, block by block.
pub fn concat_dense(outer: &DenseState, inner: &DenseState, m: usize) -> DenseState {
    let mut cur = outer.clone();
    for _ in 0..m {
        cur = link(&cur, &[1], inner, &[0]).unwrap();
    }
    cur.normalized()
}

fn repeat_word(block: &DenseState, times: usize) -> DenseState {
    (1..times).fold(block.clone(), |acc, _| acc.tensor(block).unwrap())
}

fn ghz_block(m: usize, minus: bool) -> DenseState {
    let zero = oracle::basis_word(&"0".repeat(m));
    let one = oracle::basis_word(&"1".repeat(m)).scale(C::new(if minus { -1.0 } else { 1.0 }, 0.0));
    zero.add(&one).normalized()
}

/// `|0_L>`, `|1_L>` of one level of a code family.
pub fn codewords(kind: CodeKind) -> (DenseState, DenseState) {
    match kind {
        CodeKind::Shor(m1, m2) => (
            repeat_word(&ghz_block(m2, false), m1),
            repeat_word(&ghz_block(m2, true), m1),
        ),
        CodeKind::Ring5 => {
            let adj: Vec<Bits> = (0..5)
                .map(|q| {
                    let mut r = Bits::zeros(5);
                    r.set((q + 1) % 5, true);
                    r.set((q + 4) % 5, true);
                    r
                })
                .collect();
            let c5 = oracle::graph_state(&adj).unwrap();
            let all_z = PauliString::from_factors(0, &[forge_core::PauliFactor::Z; 5]);
            (c5.clone(), c5.apply_pauli(&all_z))
        }
        other => CodeSpec::new(other, 1)
            .codewords()
            .expect("family has codewords"),
    }
}

/// Encoder state, input first; decoders use the same state.
pub fn encoder_dense(spec: &CodeSpec) -> DenseState {
    let (c0, c1) = codewords(spec.kind);
    let base = oracle::jamiolkowski_codewords(&c0, &c1)
        .unwrap()
        .normalized();
    let m = base.n_qubits() - 1;
    (1..spec.levels).fold(base.clone(), |inner, _| concat_dense(&base, &inner, m))
}

pub fn dejmps_dense(party: Party, rounds: usize) -> DenseState {
    let base = codes::dejmps_circuit_state(party).unwrap();
    (1..rounds).fold(base.clone(), |inner, _| concat_dense(&base, &inner, 2))
}

pub fn switcher_dense(from: &CodeSpec, to: &CodeSpec) -> DenseState {
    link(&encoder_dense(from), &[0], &encoder_dense(to), &[0])
        .unwrap()
        .normalized()
}

pub fn logical_epp_dense(code: &CodeSpec, rounds: usize, party: Party) -> DenseState {
    let round = codes::dejmps_circuit_state(party).unwrap();
    let mut cur = encoder_dense(code);
    for _ in 0..rounds {
        cur = concat_dense(&round, &cur, 2);
    }
    link(&cur, &[0], &encoder_dense(code), &[0])
        .unwrap()
        .normalized()
}

pub fn repeater_dense(party: Party) -> DenseState {
    let d = codes::dejmps_circuit_state(party).unwrap();
    link(&d, &[0], &d, &[0]).unwrap().normalized()
}

/// Deterministic pseudo-random single-qubit amplitudes.
pub fn sample_qubit(seed: u64) -> (C, C) {
    let t = 0.37 + 0.91 * seed as f64;
    let a = C::new(t.cos(), 0.0);
    let b = C::from_polar(t.sin(), 1.3 * t + 0.2);
    (a, b)
}

/// Result of teleporting a logical state through a decoder by brute force.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Teleported {
    Impossible,
    Pauli(char),
}

/// Prepares `a|0_L> + b|1_L>` (with `error` applied) on ancillas, Bell-projects
/// each ancilla with the matching decoder input and identifies the Pauli
/// relating the output to `a|0> + b|1>`.
pub fn teleport_through_decoder(
    spec: &CodeSpec,
    pattern: &[BellOutcome],
    error: Option<&PauliString>,
) -> Teleported {
    let (c0, c1) = codewords(spec.kind);
    let dec = encoder_dense(spec);
    let m = pattern.len();
    let mut found: Option<char> = None;
    for seed in [1u64, 2] {
        let (a, b) = sample_qubit(seed);
        let mut logical = c0.clone().scale(a).add(&c1.clone().scale(b));
        if let Some(e) = error {
            logical = logical.apply_pauli(e);
        }
        let mut state = logical.tensor(&dec).unwrap();
        // Ancillas 0..m, decoder output m, decoder inputs m+1..=2m. Each
        // projection removes two qubits ahead of the remaining pairs.
        for (k, o) in pattern.iter().enumerate() {
            let anc = 0;
            let inp = m - k + 1;
            let (s, _) = state.bell_project(anc, inp, o.factor()).unwrap();
            state = s;
        }
        if state.norm() < 1e-9 {
            return Teleported::Impossible;
        }
        let target = DenseState::from_amplitudes(vec![a, b]).unwrap();
        let u = ['I', 'X', 'Y', 'Z']
            .into_iter()
            .find(|&u| {
                let fixed = state.apply_pauli(&PauliString::single(1, 0, u));
                (oracle::fidelity_up_to_phase(&fixed, &target) - 1.0).abs() < 1e-9
            })
            .expect("output is a Pauli image of the input");
        if found.is_some_and(|f| f != u) {
            panic!("correction depends on the input state");
        }
        found = Some(u);
    }
    Teleported::Pauli(found.unwrap())
}

/// `c (-1)^{k.j} alpha_i(k xor i_bits) = alpha_{i xor 1}(k)` for K operators
/// and `= (-1)^i alpha_i(k)` for F operators, on the dense state of `a`.
pub fn alpha_relations_hold(a: &forge_core::AuxOps) -> bool {
    use forge_core::concat::recurrence_data;
    let s = oracle::state_of(&a.to_stabilizers().unwrap()).unwrap();
    let m = a.m_qubits();
    for (is_k, set) in [(true, a.k_set()), (false, a.f_set())] {
        for op in set {
            let (c, ib, jb) = recurrence_data(op);
            let phase = C::i().powu(c as u32);
            for kcode in 0..(1usize << m) {
                let k =
                    Bits::from_bools(&(0..m).map(|l| (kcode >> l) & 1 == 1).collect::<Vec<_>>());
                let sign = if k.dot(&jb) { -1.0 } else { 1.0 };
                for i in [false, true] {
                    let lhs = phase * sign * oracle::alpha(&s, i, &k.xor(&ib));
                    let rhs = if is_k {
                        oracle::alpha(&s, !i, &k)
                    } else {
                        oracle::alpha(&s, i, &k) * if i { -1.0 } else { 1.0 }
                    };
                    if (lhs - rhs).norm() > TOL {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Brute-force decoder classification: clean if the pattern can occur, else
/// the first listed error that makes it possible, else uncorrectable.
pub fn brute_force_decode(
    s: &CodeSpec,
    pattern: &[BellOutcome],
    model: &forge_core::tasks::ErrorModel,
) -> (PauliString, forge_core::tasks::Verdict) {
    use forge_core::tasks::Verdict;
    let pauli = |u: char| PauliString::single(1, 0, u);
    if let Teleported::Pauli(u) = teleport_through_decoder(s, pattern, None) {
        return (pauli(u), Verdict::Clean);
    }
    for e in model.errors(pattern.len()) {
        if let Teleported::Pauli(u) = teleport_through_decoder(s, pattern, Some(&e)) {
            return (pauli(u), Verdict::Detected { error: e });
        }
    }
    (PauliString::identity(1), Verdict::Uncorrectable)
}
