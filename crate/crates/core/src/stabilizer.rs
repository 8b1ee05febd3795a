//! Stabilizer generator sets: validation, canonical form and group equality.

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{check_len, ForgeError, Result};
use crate::gf2::{self, Echelon};
use crate::pauli::PauliString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Input,
    Output,
    Virtual,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TableauJson", into = "TableauJson")]
pub struct StabilizerTableau {
    n: usize,
    roles: Vec<Role>,
    generators: Vec<PauliString>,
}

#[derive(Serialize, Deserialize)]
struct TableauJson {
    n: usize,
    roles: Vec<Role>,
    generators: Vec<PauliString>,
}

impl TryFrom<TableauJson> for StabilizerTableau {
    type Error = ForgeError;

    fn try_from(j: TableauJson) -> Result<Self> {
        StabilizerTableau::new(j.n, j.roles, j.generators)
    }
}

impl From<StabilizerTableau> for TableauJson {
    fn from(t: StabilizerTableau) -> Self {
        TableauJson {
            n: t.n,
            roles: t.roles,
            generators: t.generators,
        }
    }
}

impl StabilizerTableau {
    /// Validated constructor: generators must be Hermitian, pairwise
    /// commuting and independent.
    pub fn new(n: usize, roles: Vec<Role>, generators: Vec<PauliString>) -> Result<Self> {
        check_len(n, roles.len())?;
        for g in &generators {
            check_len(n, g.n_qubits())?;
            if !g.is_hermitian() {
                return Err(ForgeError::InvalidTableau(format!("{g} is not Hermitian")));
            }
        }
        if generators.len() > n {
            return Err(ForgeError::InvalidTableau(format!(
                "{} generators on {n} qubits",
                generators.len()
            )));
        }
        for (a, ga) in generators.iter().enumerate() {
            for gb in &generators[a + 1..] {
                if !ga.commutes_unchecked(gb) {
                    return Err(ForgeError::InvalidTableau(format!(
                        "{ga} and {gb} anticommute"
                    )));
                }
            }
        }
        if !is_independent(&generators) {
            return Err(ForgeError::InvalidTableau(
                "generators are dependent".into(),
            ));
        }
        Ok(StabilizerTableau {
            n,
            roles,
            generators,
        })
    }

    pub fn with_uniform_role(generators: Vec<PauliString>, role: Role) -> Result<Self> {
        let n = generators.first().map_or(0, |g| g.n_qubits());
        StabilizerTableau::new(n, vec![role; n], generators)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn is_full_rank(&self) -> bool {
        self.generators.len() == self.n
    }

    pub fn qubits_with_role(&self, role: Role) -> Vec<usize> {
        (0..self.n).filter(|&q| self.roles[q] == role).collect()
    }

    pub fn with_roles(mut self, roles: Vec<Role>) -> Result<Self> {
        check_len(self.n, roles.len())?;
        self.roles = roles;
        Ok(self)
    }

    /// Canonical generator set: reduced echelon form of `(x|z)` with the
    /// x block first, phases tracked through exact products.
    pub fn canonicalize(&self) -> StabilizerTableau {
        StabilizerTableau {
            n: self.n,
            roles: self.roles.clone(),
            generators: canonical_generators(&self.generators, self.n),
        }
    }

    /// Group equality including signs.
    pub fn group_equal(&self, other: &StabilizerTableau) -> Result<bool> {
        check_len(self.n, other.n)?;
        Ok(self.generators.len() == other.generators.len()
            && canonical_generators(&self.generators, self.n)
                == canonical_generators(&other.generators, other.n))
    }

    /// Group element with the given Pauli part, if the Pauli part occurs.
    pub fn element_with_support(&self, p: &PauliString) -> Option<PauliString> {
        let rows: Vec<Bits> = self.generators.iter().map(|g| g.symplectic()).collect();
        let ech = Echelon::new(&rows, 2 * self.n);
        let combo = ech.express(&p.symplectic())?;
        Some(product(&self.generators, &combo, self.n))
    }

    /// `Some(true)` if `p` is in the group, `Some(false)` if `-p` is, else `None`.
    pub fn membership(&self, p: &PauliString) -> Option<bool> {
        let e = self.element_with_support(p)?;
        Some(e == *p)
    }

    pub fn stabilizes(&self, p: &PauliString) -> bool {
        self.membership(p) == Some(true)
    }

    /// Qubit permutation: qubit `q` of the result is qubit `perm[q]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> StabilizerTableau {
        StabilizerTableau {
            n: self.n,
            roles: perm.iter().map(|&q| self.roles[q]).collect(),
            generators: self.generators.iter().map(|g| g.permute(perm)).collect(),
        }
    }
}

/// Product of the generators selected by `combo`, taken in index order.
pub(crate) fn product(gens: &[PauliString], combo: &Bits, n: usize) -> PauliString {
    combo
        .iter_ones()
        .fold(PauliString::identity(n), |acc, i| acc.mul(&gens[i]))
}

pub(crate) fn canonical_generators(gens: &[PauliString], n: usize) -> Vec<PauliString> {
    let mut rows: Vec<PauliString> = gens.to_vec();
    let mut top = 0;
    for col in 0..2 * n {
        let bit = |p: &PauliString| {
            if col < n {
                p.x_bits().get(col)
            } else {
                p.z_bits().get(col - n)
            }
        };
        let Some(piv) = (top..rows.len()).find(|&r| bit(&rows[r])) else {
            continue;
        };
        rows.swap(top, piv);
        for r in 0..rows.len() {
            if r != top && bit(&rows[r]) {
                rows[r] = rows[r].mul(&rows[top]);
            }
        }
        top += 1;
    }
    rows.truncate(top);
    rows
}

/// GF(2) independence of the Pauli parts.
pub fn is_independent(gens: &[PauliString]) -> bool {
    let rows: Vec<Bits> = gens.iter().map(|g| g.symplectic()).collect();
    gf2::is_independent(&rows)
}

pub fn symplectic_rank(gens: &[PauliString]) -> usize {
    let rows: Vec<Bits> = gens.iter().map(|g| g.symplectic()).collect();
    gf2::rank(&rows)
}

pub fn canonicalize(t: &StabilizerTableau) -> StabilizerTableau {
    t.canonicalize()
}

pub fn group_equal(a: &StabilizerTableau, b: &StabilizerTableau) -> Result<bool> {
    a.group_equal(b)
}

/// Graph state generators `K_a = X_a prod_{b ~ a} Z_b`.
pub fn from_graph(adjacency: &[Bits]) -> Result<StabilizerTableau> {
    let n = adjacency.len();
    check_adjacency(adjacency)?;
    let gens = (0..n)
        .map(|a| PauliString::from_parts(Bits::unit(n, a), adjacency[a].clone(), 0))
        .collect();
    StabilizerTableau::new(n, vec![Role::Output; n], gens)
}

pub(crate) fn check_adjacency(adjacency: &[Bits]) -> Result<()> {
    let n = adjacency.len();
    for (a, row) in adjacency.iter().enumerate() {
        check_len(n, row.len())?;
        if row.get(a) {
            return Err(ForgeError::InvalidGraph(format!("self loop at vertex {a}")));
        }
        for b in row.iter_ones() {
            if !adjacency[b].get(a) {
                return Err(ForgeError::InvalidGraph(format!(
                    "edge {a}-{b} is not symmetric"
                )));
            }
        }
    }
    Ok(())
}
