//! n-qubit Pauli operators in binary symplectic form.
//!
//! A [`PauliString`] stores `i^phase * prod_q X^{x_q} Z^{z_q}` with the X factor
//! to the left on every qubit. `Y = i X Z`, so a printed `Y` contributes one
//! unit of internal phase.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::Bits;
use crate::error::{check_len, ForgeError, Result};

/// Single-qubit factor `sigma_{i,j}` with `sigma_{0,1} = X`, `sigma_{1,0} = Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliFactor {
    pub i: bool,
    pub j: bool,
}

impl PauliFactor {
    pub const I: PauliFactor = PauliFactor { i: false, j: false };
    pub const X: PauliFactor = PauliFactor { i: false, j: true };
    pub const Z: PauliFactor = PauliFactor { i: true, j: false };
    pub const Y: PauliFactor = PauliFactor { i: true, j: true };

    pub fn new(i: bool, j: bool) -> Self {
        PauliFactor { i, j }
    }

    pub fn all() -> [PauliFactor; 4] {
        [Self::I, Self::X, Self::Z, Self::Y]
    }

    pub fn symbol(self) -> char {
        match (self.i, self.j) {
            (false, false) => 'I',
            (false, true) => 'X',
            (true, false) => 'Z',
            (true, true) => 'Y',
        }
    }

    /// Sign in `(s (x) id)|phi+> = sign (id (x) s)|phi+>`, equal to `(-1)^{ij}`.
    pub fn bell_transfer_sign(self) -> i8 {
        if self.i && self.j {
            -1
        } else {
            1
        }
    }

    /// Action on X-basis states: `s |k^x> = i^phase |k_out^x>` with
    /// `i^phase = (-i)^{ij} (-1)^{kj}` and `k_out = k xor i`.
    pub fn xbasis_action(self, k: bool) -> (u8, bool) {
        let mut phase = 0u8;
        if self.i && self.j {
            phase += 3;
        }
        if k && self.j {
            phase += 2;
        }
        (phase % 4, k ^ self.i)
    }
}

/// Free-function form of [`PauliFactor::bell_transfer_sign`].
pub fn bell_transfer_sign(f: PauliFactor) -> i8 {
    f.bell_transfer_sign()
}

/// Free-function form of [`PauliFactor::xbasis_action`].
pub fn xbasis_action(f: PauliFactor, k: bool) -> (u8, bool) {
    f.xbasis_action(k)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    x: Bits,
    z: Bits,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            x: Bits::zeros(n),
            z: Bits::zeros(n),
            phase: 0,
        }
    }

    /// Builds from raw symplectic parts; `phase` is the internal exponent.
    pub fn from_parts(x: Bits, z: Bits, phase: u8) -> Self {
        assert_eq!(x.len(), z.len(), "x and z parts differ in length");
        PauliString {
            x,
            z,
            phase: phase % 4,
        }
    }

    /// Builds from per-qubit factors and a prefactor `i^a` that multiplies the
    /// plain tensor product of `I, X, Y, Z` matrices.
    pub fn from_factors(a: u8, factors: &[PauliFactor]) -> Self {
        let mut p = PauliString::identity(factors.len());
        let mut ys = 0u8;
        for (q, f) in factors.iter().enumerate() {
            p.x.set(q, f.j);
            p.z.set(q, f.i);
            if f.i && f.j {
                ys += 1;
            }
        }
        p.phase = (a + ys) % 4;
        p
    }

    /// Single-qubit Pauli `symbol` at `qubit` on `n` qubits.
    pub fn single(n: usize, qubit: usize, symbol: char) -> Self {
        let mut factors = vec![PauliFactor::I; n];
        factors[qubit] = match symbol {
            'X' => PauliFactor::X,
            'Y' => PauliFactor::Y,
            'Z' => PauliFactor::Z,
            _ => PauliFactor::I,
        };
        PauliString::from_factors(0, &factors)
    }

    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &Bits {
        &self.x
    }

    pub fn z_bits(&self) -> &Bits {
        &self.z
    }

    /// Power of `i` in front of the plain tensor product of `I, X, Y, Z`.
    pub fn phase_exp(&self) -> u8 {
        self.matrix_phase()
    }

    /// Power of `i` in front of `prod_q X^{x_q} Z^{z_q}`.
    pub fn xz_phase(&self) -> u8 {
        self.phase
    }

    /// Symplectic vector `(x | z)` of length `2n`.
    pub fn symplectic(&self) -> Bits {
        self.x.concat(&self.z)
    }

    pub fn from_symplectic(v: &Bits, phase: u8) -> Self {
        let n = v.len() / 2;
        PauliString::from_parts(v.slice(0, n), v.slice(n, 2 * n), phase)
    }

    pub fn factor(&self, q: usize) -> PauliFactor {
        PauliFactor::new(self.z.get(q), self.x.get(q))
    }

    pub fn y_count(&self) -> usize {
        self.x.and(&self.z).count_ones()
    }

    pub fn weight(&self) -> usize {
        self.x.or(&self.z).count_ones()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as usize + self.y_count()).is_multiple_of(2)
    }

    /// Prefactor of the plain matrix tensor product, as a power of `i`.
    pub fn matrix_phase(&self) -> u8 {
        ((self.phase as usize + 4 * self.n_qubits() - self.y_count()) % 4) as u8
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    /// Multiplies by the scalar `i^k`.
    pub fn times_i(mut self, k: u8) -> Self {
        self.phase = (self.phase + k) % 4;
        self
    }

    /// Exact product `self * other`.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        check_len(self.n_qubits(), other.n_qubits())?;
        Ok(self.mul(other))
    }

    pub(crate) fn mul(&self, other: &PauliString) -> PauliString {
        // Moving Z^{z_a} past X^{x_b} costs (-1)^{z_a . x_b}.
        let swap = if self.z.dot(&other.x) { 2 } else { 0 };
        PauliString {
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
            phase: (self.phase + other.phase + swap) % 4,
        }
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        check_len(self.n_qubits(), other.n_qubits())?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &PauliString) -> bool {
        self.x.dot(&other.z) == self.z.dot(&other.x)
    }

    pub fn tensor(&self, other: &PauliString) -> PauliString {
        PauliString {
            x: self.x.concat(&other.x),
            z: self.z.concat(&other.z),
            phase: (self.phase + other.phase) % 4,
        }
    }

    /// `(a, factors)` with `self = i^a * tensor(factors)` as plain matrices.
    pub fn factor_decompose(&self) -> (u8, Vec<PauliFactor>) {
        let factors = (0..self.n_qubits()).map(|q| self.factor(q)).collect();
        (self.matrix_phase(), factors)
    }

    /// Restriction to the listed qubits, keeping the matrix prefactor.
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let (a, f) = self.factor_decompose();
        let sub: Vec<PauliFactor> = qubits.iter().map(|&q| f[q]).collect();
        PauliString::from_factors(a, &sub)
    }

    /// Copy with qubit `q` removed, keeping the matrix prefactor.
    pub fn remove_qubit(&self, q: usize) -> PauliString {
        let keep: Vec<usize> = (0..self.n_qubits()).filter(|&i| i != q).collect();
        self.restrict(&keep)
    }

    /// Places `self` on `positions` of an `n`-qubit register.
    pub fn embed(&self, n: usize, positions: &[usize]) -> PauliString {
        assert_eq!(positions.len(), self.n_qubits());
        let (a, f) = self.factor_decompose();
        let mut full = vec![PauliFactor::I; n];
        for (k, &p) in positions.iter().enumerate() {
            full[p] = f[k];
        }
        PauliString::from_factors(a, &full)
    }

    /// Reorders qubits: qubit `q` of the result is qubit `perm[q]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> PauliString {
        self.restrict(perm)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.matrix_phase() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}")?;
        for q in 0..self.n_qubits() {
            write!(f, "{}", self.factor(q).symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for PauliString {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (a, body) = if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else {
            (0, s)
        };
        if body.is_empty() {
            return Err(ForgeError::Parse(format!("empty Pauli string {s:?}")));
        }
        let factors = body
            .chars()
            .map(|c| match c {
                'I' => Ok(PauliFactor::I),
                'X' => Ok(PauliFactor::X),
                'Y' => Ok(PauliFactor::Y),
                'Z' => Ok(PauliFactor::Z),
                other => Err(ForgeError::Parse(format!(
                    "bad Pauli symbol {other:?} in {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_factors(a, &factors))
    }
}

impl std::ops::Neg for PauliString {
    type Output = PauliString;

    fn neg(self) -> PauliString {
        self.times_i(2)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a Pauli string, panicking on malformed input. Intended for literals.
pub fn p(s: &str) -> PauliString {
    s.parse().unwrap_or_else(|e| panic!("{e}"))
}
