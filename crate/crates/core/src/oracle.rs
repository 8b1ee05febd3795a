//! Dense state-vector reference engine for desk-scale verification.
//!
//! Basis index bit `n - 1 - q` holds qubit `q`, so qubit 0 is the most
//! significant bit and the leftmost tensor factor.

use num_complex::Complex64 as C;

use crate::bits::Bits;
use crate::error::{ForgeError, Result};
use crate::pauli::{PauliFactor, PauliString};
use crate::stabilizer::{Role, StabilizerTableau};

pub const DEFAULT_CAP: usize = 14;

pub type Gate = [[C; 2]; 2];

const TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<C>,
}

fn check_cap(n: usize) -> Result<()> {
    if n > DEFAULT_CAP {
        Err(ForgeError::CapExceeded(n, DEFAULT_CAP))
    } else {
        Ok(())
    }
}

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub mod gates {
    use super::{c, Gate, C};
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn h() -> Gate {
        [
            [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)],
            [c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)],
        ]
    }

    pub fn s() -> Gate {
        [[c(1.0), c(0.0)], [c(0.0), C::i()]]
    }

    pub fn x() -> Gate {
        [[c(0.0), c(1.0)], [c(1.0), c(0.0)]]
    }

    pub fn z() -> Gate {
        [[c(1.0), c(0.0)], [c(0.0), c(-1.0)]]
    }

    pub fn y() -> Gate {
        [[c(0.0), -C::i()], [C::i(), c(0.0)]]
    }

    /// `exp(-i theta X / 2)`.
    pub fn rx(theta: f64) -> Gate {
        let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        [[c(co), C::new(0.0, -si)], [C::new(0.0, -si), c(co)]]
    }

    pub fn pauli(symbol: char) -> Gate {
        match symbol {
            'X' => x(),
            'Y' => y(),
            'Z' => z(),
            _ => [[c(1.0), c(0.0)], [c(0.0), c(1.0)]],
        }
    }
}

impl DenseState {
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_cap(n)?;
        let mut amps = vec![c(0.0); 1 << n];
        amps[index] = c(1.0);
        Ok(DenseState { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<C>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n {
            return Err(ForgeError::Domain(
                "amplitude count is not a power of two".into(),
            ));
        }
        check_cap(n)?;
        Ok(DenseState { n, amps })
    }

    /// Product state `|+>^n`.
    pub fn plus(n: usize) -> Result<Self> {
        check_cap(n)?;
        let a = c((0.5f64).powf(n as f64 / 2.0));
        Ok(DenseState {
            n,
            amps: vec![a; 1 << n],
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amps
    }

    #[inline]
    fn mask(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let nrm = self.norm();
        if nrm > 0.0 {
            for a in &mut self.amps {
                *a /= nrm;
            }
        }
        self
    }

    pub fn scale(mut self, s: C) -> Self {
        for a in &mut self.amps {
            *a *= s;
        }
        self
    }

    pub fn inner(&self, other: &DenseState) -> C {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn add(&self, other: &DenseState) -> DenseState {
        DenseState {
            n: self.n,
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn tensor(&self, other: &DenseState) -> Result<DenseState> {
        check_cap(self.n + other.n)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(DenseState {
            n: self.n + other.n,
            amps,
        })
    }

    pub fn apply_gate(&self, q: usize, g: &Gate) -> DenseState {
        let m = self.mask(q);
        let mut out = self.amps.clone();
        for idx in 0..self.amps.len() {
            if idx & m == 0 {
                let (a0, a1) = (self.amps[idx], self.amps[idx | m]);
                out[idx] = g[0][0] * a0 + g[0][1] * a1;
                out[idx | m] = g[1][0] * a0 + g[1][1] * a1;
            }
        }
        DenseState {
            n: self.n,
            amps: out,
        }
    }

    pub fn cnot(&self, control: usize, target: usize) -> DenseState {
        let (mc, mt) = (self.mask(control), self.mask(target));
        let mut out = self.amps.clone();
        for (idx, amp) in out.iter_mut().enumerate() {
            if idx & mc != 0 {
                *amp = self.amps[idx ^ mt];
            }
        }
        DenseState {
            n: self.n,
            amps: out,
        }
    }

    pub fn cz(&self, a: usize, b: usize) -> DenseState {
        let (ma, mb) = (self.mask(a), self.mask(b));
        let mut out = self.amps.clone();
        for (idx, v) in out.iter_mut().enumerate() {
            if idx & ma != 0 && idx & mb != 0 {
                *v = -*v;
            }
        }
        DenseState {
            n: self.n,
            amps: out,
        }
    }

    /// Applies a Pauli operator factor by factor on basis states.
    pub fn apply_pauli(&self, p: &PauliString) -> DenseState {
        assert_eq!(p.n_qubits(), self.n);
        let (a, factors) = p.factor_decompose();
        let mut flip = 0usize;
        let mut sign_mask = 0usize;
        let mut ys = 0u32;
        for (q, f) in factors.iter().enumerate() {
            let m = self.mask(q);
            match f.symbol() {
                'X' => flip |= m,
                'Z' => sign_mask |= m,
                'Y' => {
                    flip |= m;
                    sign_mask |= m;
                    ys += 1;
                }
                _ => {}
            }
        }
        // Y|b> = i (-1)^b |b xor 1>, Z|b> = (-1)^b |b>, X|b> = |b xor 1>.
        let pre = C::i().powu(a as u32 + ys);
        let mut out = vec![c(0.0); self.amps.len()];
        for (idx, &v) in self.amps.iter().enumerate() {
            let sign = if (idx & sign_mask).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            out[idx ^ flip] += v * pre * sign;
        }
        DenseState {
            n: self.n,
            amps: out,
        }
    }

    /// `(I + P) / 2` applied to the state.
    pub fn project_plus(&self, p: &PauliString) -> DenseState {
        let pv = self.apply_pauli(p);
        DenseState {
            n: self.n,
            amps: self
                .amps
                .iter()
                .zip(&pv.amps)
                .map(|(a, b)| (a + b) * 0.5)
                .collect(),
        }
    }

    pub fn is_stabilized_by(&self, p: &PauliString) -> bool {
        let pv = self.apply_pauli(p);
        self.amps
            .iter()
            .zip(&pv.amps)
            .all(|(a, b)| (a - b).norm() < TOL)
    }

    /// Qubit `q` of the result is qubit `perm[q]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> DenseState {
        assert_eq!(perm.len(), self.n);
        let mut out = vec![c(0.0); self.amps.len()];
        for (idx, &v) in self.amps.iter().enumerate() {
            let mut new_idx = 0usize;
            for (q, &src) in perm.iter().enumerate() {
                if idx & self.mask(src) != 0 {
                    new_idx |= 1 << (self.n - 1 - q);
                }
            }
            out[new_idx] = v;
        }
        DenseState {
            n: self.n,
            amps: out,
        }
    }

    /// Contracts qubit `q` with `<b|` for computational basis value `b`.
    pub fn project_basis(&self, q: usize, b: bool) -> DenseState {
        let keep: Vec<usize> = (0..self.n).filter(|&k| k != q).collect();
        let mut out = vec![c(0.0); 1 << (self.n - 1)];
        for (idx, &v) in self.amps.iter().enumerate() {
            if (idx & self.mask(q) != 0) == b {
                out[compress(idx, self.n, &keep)] += v;
            }
        }
        DenseState {
            n: self.n - 1,
            amps: out,
        }
    }

    /// Projects qubits `qa`, `qb` onto `(id (x) sigma)|phi+>` and removes them.
    /// Returns the unnormalized remainder and its norm.
    pub fn bell_project(
        &self,
        qa: usize,
        qb: usize,
        outcome: PauliFactor,
    ) -> Result<(DenseState, f64)> {
        if qa == qb || qa >= self.n || qb >= self.n {
            return Err(ForgeError::Domain(format!("bad Bell pair ({qa}, {qb})")));
        }
        let sigma = gates::pauli(outcome.symbol());
        let keep: Vec<usize> = (0..self.n).filter(|&k| k != qa && k != qb).collect();
        let mut out = vec![c(0.0); 1 << (self.n - 2)];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (idx, &v) in self.amps.iter().enumerate() {
            let a = (idx & self.mask(qa) != 0) as usize;
            let b = (idx & self.mask(qb) != 0) as usize;
            // Bell component <a, b| (id (x) sigma)|phi+> = sigma[b][a] / sqrt 2.
            let beta = sigma[b][a] * s;
            out[compress(idx, self.n, &keep)] += beta.conj() * v;
        }
        let st = DenseState {
            n: self.n - 2,
            amps: out,
        };
        let nrm = st.norm();
        Ok((st, nrm))
    }

    /// Single-qubit reduced check: `G_i = (<i^x| (x) id) |psi>` on qubit `q`.
    pub fn x_branch(&self, q: usize, i: bool) -> DenseState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b0 = self.project_basis(q, false).scale(c(s));
        let b1 = self.project_basis(q, true).scale(c(if i { -s } else { s }));
        b0.add(&b1)
    }
}

fn compress(idx: usize, n: usize, keep: &[usize]) -> usize {
    let mut out = 0usize;
    for &q in keep {
        out = (out << 1) | ((idx >> (n - 1 - q)) & 1);
    }
    out
}

/// `|<a|b>|^2 / (|a|^2 |b|^2)`.
pub fn fidelity_up_to_phase(a: &DenseState, b: &DenseState) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 || a.n != b.n {
        return 0.0;
    }
    a.inner(b).norm_sqr() / (na * na * nb * nb)
}

/// Unique common +1 eigenstate of a full-rank tableau.
pub fn state_of(t: &StabilizerTableau) -> Result<DenseState> {
    let n = t.n_qubits();
    check_cap(n)?;
    if !t.is_full_rank() {
        return Err(ForgeError::InvalidTableau(
            "state_of needs a full-rank tableau".into(),
        ));
    }
    for index in 0..(1usize << n) {
        let mut s = DenseState::basis(n, index)?;
        for g in t.generators() {
            s = s.project_plus(g);
        }
        if s.norm() > 1e-6 {
            return Ok(s.normalized());
        }
    }
    Err(ForgeError::Internal(
        "no basis state has support on the code space".into(),
    ))
}

/// Graph state built by CZ gates on `|+>^n`.
pub fn graph_state(adjacency: &[Bits]) -> Result<DenseState> {
    let n = adjacency.len();
    let mut s = DenseState::plus(n)?;
    for (a, row) in adjacency.iter().enumerate() {
        for b in row.iter_ones().filter(|&b| b > a) {
            s = s.cz(a, b);
        }
    }
    Ok(s)
}

/// Choi-type state `sum_b |b>_in (x) O|b>_out / sqrt(2^n_in)`, inputs first.
pub fn from_map<F>(n_in: usize, n_out: usize, op: F) -> Result<DenseState>
where
    F: Fn(usize) -> DenseState,
{
    check_cap(n_in + n_out)?;
    let mut amps = vec![c(0.0); 1 << (n_in + n_out)];
    let s = (0.5f64).powf(n_in as f64 / 2.0);
    for b in 0..(1usize << n_in) {
        let out = op(b);
        assert_eq!(out.n, n_out);
        for (o, v) in out.amps.iter().enumerate() {
            amps[(b << n_out) | o] = v * s;
        }
    }
    Ok(DenseState {
        n: n_in + n_out,
        amps,
    })
}

/// `(I (x) U)|phi+>^{(x)n}` for an `n`-qubit circuit given as a state map.
pub fn jamiolkowski<F>(n: usize, circuit: F) -> Result<DenseState>
where
    F: Fn(DenseState) -> DenseState,
{
    from_map(n, n, |b| {
        circuit(DenseState::basis(n, b).expect("within cap"))
    })
}

/// `(|0>|c0> + |1>|c1>) / sqrt 2`.
pub fn jamiolkowski_codewords(c0: &DenseState, c1: &DenseState) -> Result<DenseState> {
    from_map(1, c0.n, |b| if b == 0 { c0.clone() } else { c1.clone() })
}

/// Computational basis codeword from a bit string such as `"010"`.
pub fn basis_word(bits: &str) -> DenseState {
    let n = bits.len();
    let idx = bits
        .chars()
        .fold(0usize, |acc, ch| (acc << 1) | (ch == '1') as usize);
    DenseState::basis(n, idx).expect("within cap")
}

/// Contracts each pair `(a_qubits[k], b_qubits[k])` with `<phi+|` without
/// forming the full product. The result lists the remaining qubits of `a`
/// followed by those of `b`, unnormalized.
pub fn link(
    a: &DenseState,
    a_qubits: &[usize],
    b: &DenseState,
    b_qubits: &[usize],
) -> Result<DenseState> {
    assert_eq!(a_qubits.len(), b_qubits.len());
    let p = a_qubits.len();
    let a_keep: Vec<usize> = (0..a.n).filter(|q| !a_qubits.contains(q)).collect();
    let b_keep: Vec<usize> = (0..b.n).filter(|q| !b_qubits.contains(q)).collect();
    let (na, nb) = (a_keep.len(), b_keep.len());
    check_cap(na + nb)?;
    // Regroup both states as [kept][linked] matrices.
    let a_perm: Vec<usize> = a_keep.iter().chain(a_qubits).copied().collect();
    let b_perm: Vec<usize> = b_keep.iter().chain(b_qubits).copied().collect();
    let ap = a.permute(&a_perm);
    let bp = b.permute(&b_perm);
    let mut amps = vec![c(0.0); 1 << (na + nb)];
    let s = (0.5f64).powf(p as f64 / 2.0);
    let lp = 1usize << p;
    for ra in 0..(1usize << na) {
        for rb in 0..(1usize << nb) {
            let mut acc = c(0.0);
            for l in 0..lp {
                acc += ap.amps[(ra << p) | l] * bp.amps[(rb << p) | l];
            }
            amps[(ra << nb) | rb] = acc * s;
        }
    }
    Ok(DenseState { n: na + nb, amps })
}

/// Connecting function `alpha_i(k) = <phi+|^{(x)m} |k^x> |G_i>` for a state
/// whose qubit 0 is distinguished and qubits `1..=m` carry `G_i`.
pub fn alpha(s_outer: &DenseState, i: bool, k_bits: &Bits) -> C {
    let g = s_outer.x_branch(0, i);
    let m = g.n;
    assert_eq!(k_bits.len(), m);
    let mut acc = c(0.0);
    for (b, &v) in g.amps.iter().enumerate() {
        let mut sign = 1.0;
        for l in 0..m {
            if (b >> (m - 1 - l)) & 1 == 1 && k_bits.get(l) {
                sign = -sign;
            }
        }
        acc += v * sign;
    }
    acc * (0.5f64).powf(m as f64)
}

/// Brute-force stabilizer group of a dense state: every Hermitian Pauli with
/// eigenvalue +1, reduced to an independent generating set.
pub fn stabilizer_group_of(s: &DenseState) -> Result<StabilizerTableau> {
    let n = s.n;
    if n > 8 {
        return Err(ForgeError::CapExceeded(n, 8));
    }
    let unit = s.clone().normalized();
    let mut gens: Vec<PauliString> = Vec::new();
    for code in 1..(1usize << (2 * n)) {
        let factors: Vec<PauliFactor> = (0..n)
            .map(|q| PauliFactor::all()[(code >> (2 * (n - 1 - q))) & 3])
            .collect();
        for a in [0u8, 2] {
            let p = PauliString::from_factors(a, &factors);
            if unit.is_stabilized_by(&p) {
                let mut trial = gens.clone();
                trial.push(p);
                if crate::stabilizer::is_independent(&trial) {
                    gens = trial;
                }
            }
        }
    }
    StabilizerTableau::new(n, vec![Role::Output; n], gens)
}
