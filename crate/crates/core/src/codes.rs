//! Built-in elementary tasks and the `CodeSpec` text grammar.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::aux_ops::{from_stabilizers, AuxOps, Side};
use crate::concat::{staircase, tower};
use crate::error::{ForgeError, Result};
use crate::oracle::{self, gates, DenseState};
use crate::pauli::{p, PauliString};
use crate::stabilizer::{Role, StabilizerTableau};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CodeKind {
    Bitflip(usize),
    Phaseflip(usize),
    Shor(usize, usize),
    Ring5,
    Dejmps(Party),
    Dfs,
    Wire,
}

/// An elementary task together with its concatenation depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodeSpec {
    pub kind: CodeKind,
    pub levels: usize,
}

impl CodeSpec {
    pub fn new(kind: CodeKind, levels: usize) -> Self {
        CodeSpec { kind, levels }
    }

    /// Elementary auxiliary operators, before concatenation.
    pub fn base(&self) -> Result<AuxOps> {
        match self.kind {
            CodeKind::Bitflip(m) => bitflip(m),
            CodeKind::Phaseflip(m) => phaseflip(m),
            CodeKind::Shor(m1, m2) => generalized_shor(m1, m2),
            CodeKind::Ring5 => cluster_ring(),
            CodeKind::Dejmps(party) => dejmps(party),
            CodeKind::Dfs => dfs(),
            CodeKind::Wire => Ok(wire()),
        }
    }

    /// Auxiliary operators after `levels` rounds of self-concatenation.
    pub fn aux(&self) -> Result<AuxOps> {
        let reduce = matches!(self.kind, CodeKind::Dejmps(_));
        tower(&self.base()?, self.levels.max(1), reduce)
    }

    pub fn is_purification(&self) -> bool {
        matches!(self.kind, CodeKind::Dejmps(_))
    }

    /// Codewords `|0_L>`, `|1_L>` of one level, where the family has them.
    pub fn codewords(&self) -> Option<(DenseState, DenseState)> {
        match self.kind {
            CodeKind::Bitflip(m) => Some((
                oracle::basis_word(&"0".repeat(m)),
                oracle::basis_word(&"1".repeat(m)),
            )),
            CodeKind::Phaseflip(m) => {
                let (z, o) = (
                    oracle::basis_word(&"0".repeat(m)),
                    oracle::basis_word(&"1".repeat(m)),
                );
                let h = gates::h();
                let had = |s: DenseState| (0..m).fold(s, |acc, q| acc.apply_gate(q, &h));
                Some((had(z), had(o)))
            }
            CodeKind::Dfs => Some((oracle::basis_word("01"), oracle::basis_word("10"))),
            CodeKind::Wire => Some((oracle::basis_word("0"), oracle::basis_word("1"))),
            _ => None,
        }
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CodeKind::Bitflip(m) => write!(f, "bitflip:{m}")?,
            CodeKind::Phaseflip(m) => write!(f, "phaseflip:{m}")?,
            CodeKind::Shor(a, b) => write!(f, "shor:{a}x{b}")?,
            CodeKind::Ring5 => write!(f, "ring5")?,
            CodeKind::Dejmps(Party::Alice) => write!(f, "dejmps:alice")?,
            CodeKind::Dejmps(Party::Bob) => write!(f, "dejmps:bob")?,
            CodeKind::Dfs => write!(f, "dfs")?,
            CodeKind::Wire => write!(f, "wire")?,
        }
        if self.levels != 1 {
            write!(f, "@{}", self.levels)?;
        }
        Ok(())
    }
}

fn parse_size(s: &str, what: &str) -> Result<usize> {
    let m: usize = s
        .parse()
        .map_err(|_| ForgeError::Parse(format!("bad {what} size {s:?}")))?;
    if m < 2 {
        return Err(ForgeError::Domain(format!(
            "{what} size must be at least 2, got {m}"
        )));
    }
    Ok(m)
}

impl FromStr for CodeSpec {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, levels) = match s.split_once('@') {
            Some((b, l)) => (
                b,
                l.parse::<usize>()
                    .map_err(|_| ForgeError::Parse(format!("bad level suffix in {s:?}")))?,
            ),
            None => (s, 1),
        };
        if levels == 0 {
            return Err(ForgeError::Domain("level suffix must be at least 1".into()));
        }
        let (name, arg) = match body.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (body, None),
        };
        let kind = match (name, arg) {
            ("bitflip", Some(a)) => CodeKind::Bitflip(parse_size(a, "bitflip")?),
            ("phaseflip", Some(a)) => CodeKind::Phaseflip(parse_size(a, "phaseflip")?),
            ("shor", Some(a)) => {
                let (x, y) = a
                    .split_once('x')
                    .ok_or_else(|| ForgeError::Parse(format!("shor needs m1xm2, got {a:?}")))?;
                CodeKind::Shor(parse_size(x, "shor")?, parse_size(y, "shor")?)
            }
            ("ring5", None) => CodeKind::Ring5,
            ("dejmps", Some("alice")) => CodeKind::Dejmps(Party::Alice),
            ("dejmps", Some("bob")) => CodeKind::Dejmps(Party::Bob),
            ("dfs", None) => CodeKind::Dfs,
            ("wire", None) => CodeKind::Wire,
            _ => return Err(ForgeError::Parse(format!("unknown code spec {s:?}"))),
        };
        Ok(CodeSpec { kind, levels })
    }
}

impl Serialize for CodeSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CodeSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

fn strings(ops: &[PauliString]) -> Vec<PauliString> {
    ops.to_vec()
}

/// `K = {Z^{(i)}}`, `F = {X^{(x)m}}`.
pub fn bitflip(m: usize) -> Result<AuxOps> {
    if m < 2 {
        return Err(ForgeError::Domain("bitflip needs m >= 2".into()));
    }
    let k = (0..m).map(|i| PauliString::single(m, i, 'Z')).collect();
    let f = vec![PauliString::from_factors(
        0,
        &vec![crate::PauliFactor::X; m],
    )];
    AuxOps::new(Side::Input, k, f)
}

/// `K = {X^{(i)}}`, `F = {Z^{(x)m}}`.
pub fn phaseflip(m: usize) -> Result<AuxOps> {
    if m < 2 {
        return Err(ForgeError::Domain("phaseflip needs m >= 2".into()));
    }
    let k = (0..m).map(|i| PauliString::single(m, i, 'X')).collect();
    let f = vec![PauliString::from_factors(
        0,
        &vec![crate::PauliFactor::Z; m],
    )];
    AuxOps::new(Side::Input, k, f)
}

/// `K = {(X^{(x)m2}) on block j}`, `F` = staircase of one `Z` per block.
pub fn generalized_shor(m1: usize, m2: usize) -> Result<AuxOps> {
    if m1 < 2 || m2 < 2 {
        return Err(ForgeError::Domain("shor needs m1, m2 >= 2".into()));
    }
    let n = m1 * m2;
    let block = PauliString::from_factors(0, &vec![crate::PauliFactor::X; m2]);
    let k = (0..m1)
        .map(|j| block.embed(n, &(j * m2..(j + 1) * m2).collect::<Vec<_>>()))
        .collect();
    let singles: Vec<PauliString> = (0..m2).map(|i| PauliString::single(m2, i, 'Z')).collect();
    let f = staircase(&singles, m1);
    AuxOps::new(Side::Input, k, f)
}

/// Listed stabilizer rows of the five-qubit cluster-ring resource state,
/// input qubit first.
pub fn cluster_ring_tableau() -> StabilizerTableau {
    let rows = ["ZXZIIZ", "ZZXZII", "ZIZXZI", "ZIIZXZ", "ZZIIZX", "XZZZZZ"];
    let mut roles = vec![Role::Output; 6];
    roles[0] = Role::Input;
    StabilizerTableau::new(6, roles, rows.iter().map(|r| p(r)).collect())
        .expect("listed rows form a valid tableau")
}

pub fn cluster_ring() -> Result<AuxOps> {
    from_stabilizers(&cluster_ring_tableau(), 0)
}

/// One DEJMPS round as a 2 -> 1 map, ordered (output, input 1, input 2).
///
/// Both inputs are rotated by `exp(-+ i pi/4 X)`, a CNOT runs from the first
/// pair to the second, and the second is kept on outcome 0.
pub fn dejmps_circuit_state(party: Party) -> Result<DenseState> {
    let theta = match party {
        Party::Alice => std::f64::consts::FRAC_PI_2,
        Party::Bob => -std::f64::consts::FRAC_PI_2,
    };
    let rx = gates::rx(theta);
    let map = oracle::from_map(2, 1, |b| {
        DenseState::basis(2, b)
            .expect("two qubits")
            .apply_gate(0, &rx)
            .apply_gate(1, &rx)
            .cnot(0, 1)
            .project_basis(1, false)
    })?;
    Ok(map.permute(&[2, 0, 1]).normalized())
}

pub fn dejmps(party: Party) -> Result<AuxOps> {
    match party {
        Party::Alice => AuxOps::new(
            Side::Output,
            strings(&[p("-YI"), p("-IY")]),
            strings(&[p("-ZZ")]),
        ),
        Party::Bob => {
            let t = oracle::stabilizer_group_of(&dejmps_circuit_state(Party::Bob)?)?
                .with_roles(vec![Role::Output, Role::Input, Role::Input])?;
            Ok(from_stabilizers(&t, 0)?.reduce_f())
        }
    }
}

/// Encoder for `|0_L> = |01>`, `|1_L> = |10>`, derived from its dense state.
pub fn dfs() -> Result<AuxOps> {
    let (c0, c1) = (oracle::basis_word("01"), oracle::basis_word("10"));
    let state = oracle::jamiolkowski_codewords(&c0, &c1)?;
    let t = oracle::stabilizer_group_of(&state)?.with_roles(vec![
        Role::Input,
        Role::Output,
        Role::Output,
    ])?;
    from_stabilizers(&t, 0)
}

/// Identity channel.
pub fn wire() -> AuxOps {
    AuxOps::new(Side::Input, vec![p("Z")], vec![p("X")]).expect("Bell pair")
}
