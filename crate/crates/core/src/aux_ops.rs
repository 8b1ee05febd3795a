//! Auxiliary operator sets K and F of a resource state with one
//! distinguished qubit.
//!
//! The state is stabilized by `Z (x) K` for every `K` and `X (x) F` for every
//! `F`, with the distinguished qubit first.

use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};
use crate::pauli::{p, PauliString};
use crate::stabilizer::{canonical_generators, Role, StabilizerTableau};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Distinguished qubit is the single input (1 -> m tasks).
    Input,
    /// Distinguished qubit is the single output (m -> 1 tasks).
    Output,
}

impl Side {
    pub fn role(self) -> Role {
        match self {
            Side::Input => Role::Input,
            Side::Output => Role::Output,
        }
    }

    /// Role of the non-distinguished qubits.
    pub fn other_role(self) -> Role {
        match self {
            Side::Input => Role::Output,
            Side::Output => Role::Input,
        }
    }

    pub fn flipped(self) -> Side {
        match self {
            Side::Input => Side::Output,
            Side::Output => Side::Input,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AuxJson", into = "AuxJson")]
pub struct AuxOps {
    side: Side,
    k_set: Vec<PauliString>,
    f_set: Vec<PauliString>,
    m: usize,
}

#[derive(Serialize, Deserialize)]
struct AuxJson {
    side: Side,
    k_set: Vec<PauliString>,
    f_set: Vec<PauliString>,
}

impl TryFrom<AuxJson> for AuxOps {
    type Error = ForgeError;

    fn try_from(j: AuxJson) -> Result<Self> {
        AuxOps::new(j.side, j.k_set, j.f_set)
    }
}

impl From<AuxOps> for AuxJson {
    fn from(a: AuxOps) -> Self {
        AuxJson {
            side: a.side,
            k_set: a.k_set,
            f_set: a.f_set,
        }
    }
}

impl AuxOps {
    /// Validated constructor: the induced stabilizers must form a valid tableau.
    pub fn new(side: Side, k_set: Vec<PauliString>, f_set: Vec<PauliString>) -> Result<Self> {
        let m = k_set
            .iter()
            .chain(&f_set)
            .map(|q| q.n_qubits())
            .next()
            .ok_or_else(|| ForgeError::InvalidTableau("empty auxiliary operator sets".into()))?;
        let aux = AuxOps {
            side,
            k_set,
            f_set,
            m,
        };
        aux.to_stabilizers()?;
        Ok(aux)
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn k_set(&self) -> &[PauliString] {
        &self.k_set
    }

    pub fn f_set(&self) -> &[PauliString] {
        &self.f_set
    }

    pub fn m_qubits(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.k_set.len() + self.f_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_complete(&self) -> bool {
        self.len() == self.m + 1
    }

    /// Same operators with the distinguished qubit relabelled.
    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    /// Tableau with the distinguished qubit first, `Z (x) K` rows then `X (x) F` rows.
    pub fn to_stabilizers(&self) -> Result<StabilizerTableau> {
        let gens: Vec<PauliString> = self
            .k_set
            .iter()
            .map(|k| p("Z").tensor(k))
            .chain(self.f_set.iter().map(|f| p("X").tensor(f)))
            .collect();
        let mut roles = vec![self.side.other_role(); self.m + 1];
        roles[0] = self.side.role();
        StabilizerTableau::new(self.m + 1, roles, gens)
    }

    /// Reduces every F modulo the subgroup generated by products `K_a K_b`.
    pub fn reduce_f(&self) -> AuxOps {
        if self.k_set.len() < 2 {
            return self.clone();
        }
        let pairs: Vec<PauliString> = self.k_set[1..]
            .iter()
            .map(|k| self.k_set[0].mul(k))
            .collect();
        let rows = canonical_generators(&pairs, self.m);
        let f_set = self
            .f_set
            .iter()
            .map(|f| {
                let mut f = f.clone();
                for r in &rows {
                    let pivot = r.symplectic().first_one().expect("nonzero row");
                    if f.symplectic().get(pivot) {
                        f = f.mul(r);
                    }
                }
                f
            })
            .collect();
        AuxOps {
            side: self.side,
            k_set: self.k_set.clone(),
            f_set,
            m: self.m,
        }
    }
}

pub fn to_stabilizers(a: &AuxOps) -> Result<StabilizerTableau> {
    a.to_stabilizers()
}

/// Splits a full-rank tableau at qubit `q` into K and F sets.
///
/// The first generator with X or Y at `q` becomes the X pivot, the first
/// remaining generator with Z there the Z pivot. Every other generator is
/// cleared at `q` and folded into a new K (original factor Z, Y or I) or a
/// new F (original factor X).
pub fn from_stabilizers(t: &StabilizerTableau, q: usize) -> Result<AuxOps> {
    if q >= t.n_qubits() {
        return Err(ForgeError::Domain(format!("qubit {q} out of range")));
    }
    if !t.is_full_rank() {
        return Err(ForgeError::InvalidTableau(
            "from_stabilizers needs a full-rank tableau".into(),
        ));
    }
    let side = match t.roles()[q] {
        Role::Input => Side::Input,
        Role::Output => Side::Output,
        Role::Virtual => {
            return Err(ForgeError::Composition(
                "virtual qubit cannot be distinguished".into(),
            ))
        }
    };
    let mut gens = t.generators().to_vec();
    let original: Vec<char> = gens.iter().map(|g| g.factor(q).symbol()).collect();
    let px = gens
        .iter()
        .position(|g| g.x_bits().get(q))
        .ok_or(ForgeError::NotSplittable(q))?;
    for r in 0..gens.len() {
        if r != px && gens[r].x_bits().get(q) {
            gens[r] = gens[r].mul(&gens[px]);
        }
    }
    let pz = (0..gens.len())
        .find(|&r| r != px && gens[r].z_bits().get(q))
        .ok_or(ForgeError::NotSplittable(q))?;
    for r in 0..gens.len() {
        if r != pz && gens[r].z_bits().get(q) {
            gens[r] = gens[r].mul(&gens[pz]);
        }
    }
    let mut k_set = vec![gens[pz].remove_qubit(q)];
    let mut f_set = vec![gens[px].remove_qubit(q)];
    for r in (0..gens.len()).filter(|&r| r != px && r != pz) {
        if original[r] == 'X' {
            f_set.push(gens[px].mul(&gens[r]).remove_qubit(q));
        } else {
            k_set.push(gens[pz].mul(&gens[r]).remove_qubit(q));
        }
    }
    AuxOps::new(side, k_set, f_set)
}
