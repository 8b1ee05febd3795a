//! Composite pipelines and correction bookkeeping: plans, switchers,
//! repeaters, logical purification, Bell-outcome corrections and byproduct
//! propagation.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aux_ops::{AuxOps, Side};
use crate::bits::Bits;
use crate::codes::{self, CodeKind, CodeSpec, Party};
use crate::concat::{build_next_level, couple, swap, RecurrenceInput};
use crate::error::{check_len, ForgeError, Result};
use crate::gf2;
use crate::graph_state::{to_graph, GraphState};
use crate::pauli::{PauliFactor, PauliString};
use crate::stabilizer::{product, Role, StabilizerTableau};

/// Bell outcome `(id (x) sigma_{i,j}) |phi+>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellOutcome {
    PhiPlus,
    PsiPlus,
    PhiMinus,
    PsiMinus,
}

impl BellOutcome {
    pub fn all() -> [BellOutcome; 4] {
        [
            BellOutcome::PhiPlus,
            BellOutcome::PsiPlus,
            BellOutcome::PhiMinus,
            BellOutcome::PsiMinus,
        ]
    }

    pub fn factor(self) -> PauliFactor {
        match self {
            BellOutcome::PhiPlus => PauliFactor::I,
            BellOutcome::PsiPlus => PauliFactor::X,
            BellOutcome::PhiMinus => PauliFactor::Z,
            BellOutcome::PsiMinus => PauliFactor::Y,
        }
    }

    pub fn from_factor(f: PauliFactor) -> BellOutcome {
        match (f.i, f.j) {
            (false, false) => BellOutcome::PhiPlus,
            (false, true) => BellOutcome::PsiPlus,
            (true, false) => BellOutcome::PhiMinus,
            (true, true) => BellOutcome::PsiMinus,
        }
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellOutcome::PhiPlus => "phi+",
            BellOutcome::PsiPlus => "psi+",
            BellOutcome::PhiMinus => "phi-",
            BellOutcome::PsiMinus => "psi-",
        })
    }
}

impl FromStr for BellOutcome {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        BellOutcome::all()
            .into_iter()
            .find(|o| o.to_string() == s)
            .ok_or_else(|| ForgeError::Parse(format!("unknown Bell outcome {s:?}")))
    }
}

/// Pauli `sigma_{i_1,j_1} (x) ... (x) sigma_{i_m,j_m}` induced by a pattern.
pub fn pattern_pauli(pattern: &[BellOutcome]) -> PauliString {
    let factors: Vec<PauliFactor> = pattern.iter().map(|o| o.factor()).collect();
    PauliString::from_factors(0, &factors)
}

/// All `4^m` patterns, first qubit slowest.
pub fn all_patterns(m: usize) -> Vec<Vec<BellOutcome>> {
    (0..1usize << (2 * m))
        .map(|code| {
            (0..m)
                .map(|q| BellOutcome::all()[(code >> (2 * (m - 1 - q))) & 3])
                .collect()
        })
        .collect()
}

/// Output correction after reading a qubit into an encoder.
pub fn encode_correction(outcome: BellOutcome, aux: &AuxOps) -> Result<PauliString> {
    if aux.side() != Side::Input || !aux.is_complete() {
        return Err(ForgeError::Composition(
            "encode corrections need a complete encoder".into(),
        ));
    }
    let (k, f) = (&aux.k_set()[0], &aux.f_set()[0]);
    Ok(match outcome {
        BellOutcome::PhiPlus => PauliString::identity(aux.m_qubits()),
        BellOutcome::PsiPlus => f.clone(),
        BellOutcome::PhiMinus => k.clone(),
        BellOutcome::PsiMinus => f.mul(k),
    })
}

/// Correctable errors on the input qubits of a decoder, tried in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorModel {
    None,
    /// X errors up to the given weight.
    BitFlips(usize),
    /// Z errors up to the given weight.
    PhaseFlips(usize),
    /// Any single-qubit Pauli.
    SingleQubit,
    Custom(Vec<PauliString>),
}

impl ErrorModel {
    /// Errors the family corrects by design.
    pub fn for_code(spec: &CodeSpec) -> ErrorModel {
        match spec.kind {
            CodeKind::Bitflip(m) if spec.levels == 1 => ErrorModel::BitFlips((m - 1) / 2),
            CodeKind::Phaseflip(m) if spec.levels == 1 => ErrorModel::PhaseFlips((m - 1) / 2),
            CodeKind::Bitflip(_)
            | CodeKind::Phaseflip(_)
            | CodeKind::Shor(..)
            | CodeKind::Ring5 => ErrorModel::SingleQubit,
            CodeKind::Dejmps(_) | CodeKind::Dfs | CodeKind::Wire => ErrorModel::None,
        }
    }

    /// Error list on `m` qubits, by weight and then lexicographically.
    pub fn errors(&self, m: usize) -> Vec<PauliString> {
        let weighted = |symbol: char, w: usize| -> Vec<PauliString> {
            let mut out = Vec::new();
            for weight in 1..=w.min(m) {
                for code in 0..1usize << m {
                    if code.count_ones() as usize == weight {
                        let mut p = PauliString::identity(m);
                        for q in (0..m).filter(|q| (code >> (m - 1 - q)) & 1 == 1) {
                            p = p.mul(&PauliString::single(m, q, symbol));
                        }
                        out.push(p);
                    }
                }
            }
            out.sort_by_key(|p| (p.weight(), std::cmp::Reverse(p.to_string())));
            out
        };
        match self {
            ErrorModel::None => Vec::new(),
            ErrorModel::BitFlips(w) => weighted('X', *w),
            ErrorModel::PhaseFlips(w) => weighted('Z', *w),
            ErrorModel::SingleQubit => (0..m)
                .flat_map(|q| ['X', 'Y', 'Z'].map(|s| PauliString::single(m, q, s)))
                .collect(),
            ErrorModel::Custom(list) => list.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    /// The pattern occurs without errors.
    Clean,
    /// The pattern reveals the listed input error.
    Detected { error: PauliString },
    /// No listed error explains the pattern; the default correction applies.
    Uncorrectable,
    /// The heralded branch failed.
    Discard,
}

/// Correction for one outcome pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    pub pattern: Vec<BellOutcome>,
    /// Pauli on the output qubits, identity when nothing applies.
    pub correction: PauliString,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionTable {
    pub entries: Vec<Correction>,
}

impl CorrectionTable {
    pub fn get(&self, pattern: &[BellOutcome]) -> Option<&Correction> {
        self.entries.iter().find(|e| e.pattern == pattern)
    }
}

/// Pauli on the outputs equivalent to `p_in` on the inputs of `t`'s state:
/// `p_in |psi> = p_out |psi>`, phases included.
pub fn propagate_byproduct(t: &StabilizerTableau, p_in: &PauliString) -> Result<PauliString> {
    let inputs = t.qubits_with_role(Role::Input);
    let outputs = t.qubits_with_role(Role::Output);
    check_len(inputs.len(), p_in.n_qubits())?;
    if inputs.len() + outputs.len() != t.n_qubits() {
        return Err(ForgeError::Composition(
            "byproducts need a tableau without virtual qubits".into(),
        ));
    }
    let gens = t.generators();
    let restricted: Vec<Bits> = gens
        .iter()
        .map(|g| g.restrict(&inputs).symplectic())
        .collect();
    let a_rows = gf2::transpose(&restricted, 2 * inputs.len());
    let combo =
        gf2::solve(&a_rows, &p_in.symplectic(), gens.len()).ok_or(ForgeError::NoPropagation)?;
    let s = product(gens, &combo, t.n_qubits());
    let (a, factors) = s.factor_decompose();
    let out: Vec<PauliFactor> = outputs.iter().map(|&q| factors[q]).collect();
    Ok(PauliString::from_factors(
        (p_in.matrix_phase() + 4 - a) % 4,
        &out,
    ))
}

/// `P^T` as a matrix: `Y^T = -Y`.
pub fn transpose_pauli(p: &PauliString) -> PauliString {
    if p.y_count() % 2 == 1 {
        -p.clone()
    } else {
        p.clone()
    }
}

/// Propagates through stages joined output-to-input by `|phi+>` links.
pub fn propagate_chain(stages: &[StabilizerTableau], p_in: &PauliString) -> Result<PauliString> {
    let mut cur = p_in.clone();
    for (k, t) in stages.iter().enumerate() {
        if k > 0 {
            cur = transpose_pauli(&cur);
        }
        cur = propagate_byproduct(t, &cur)?;
    }
    Ok(cur)
}

/// Classifies one pattern on the inputs of `t`: clean if its Pauli
/// propagates, detected if it propagates after one listed error, otherwise
/// `fallback`.
pub fn classify(
    t: &StabilizerTableau,
    pattern: &[BellOutcome],
    errors: &[PauliString],
    fallback: Verdict,
) -> Result<Correction> {
    let p = pattern_pauli(pattern);
    let n_out = t.qubits_with_role(Role::Output).len();
    let strip = |q: PauliString| PauliString::from_factors(0, &q.factor_decompose().1);
    match propagate_byproduct(t, &p) {
        Ok(out) => {
            return Ok(Correction {
                pattern: pattern.to_vec(),
                correction: strip(out),
                verdict: Verdict::Clean,
            })
        }
        Err(ForgeError::NoPropagation) => {}
        Err(e) => return Err(e),
    }
    for e in errors {
        check_len(p.n_qubits(), e.n_qubits())?;
        if let Ok(out) = propagate_byproduct(t, &p.mul(e)) {
            return Ok(Correction {
                pattern: pattern.to_vec(),
                correction: strip(out),
                verdict: Verdict::Detected { error: e.clone() },
            });
        }
    }
    Ok(Correction {
        pattern: pattern.to_vec(),
        correction: PauliString::identity(n_out),
        verdict: fallback,
    })
}

/// Decoder correction: the pattern's Pauli is sorted into the cosets of the
/// logical group, shifted by the listed errors if needed.
pub fn decode_correction(
    pattern: &[BellOutcome],
    aux: &AuxOps,
    model: &ErrorModel,
) -> Result<Correction> {
    if aux.side() != Side::Output {
        return Err(ForgeError::Composition(
            "decode corrections need a single-output state".into(),
        ));
    }
    check_len(aux.m_qubits(), pattern.len())?;
    let t = input_first(aux)?;
    classify(
        &t,
        pattern,
        &model.errors(aux.m_qubits()),
        Verdict::Uncorrectable,
    )
}

/// Keep (with correction) or discard for a purification resource state,
/// judged from this party's in-coupling outcomes alone.
pub fn purification_outcome(pattern: &[BellOutcome], aux: &AuxOps) -> Result<Correction> {
    if aux.side() != Side::Output {
        return Err(ForgeError::Composition(
            "purification states have a single output".into(),
        ));
    }
    check_len(aux.m_qubits(), pattern.len())?;
    classify(&input_first(aux)?, pattern, &[], Verdict::Discard)
}

/// Inputs first, then the distinguished output.
fn input_first(aux: &AuxOps) -> Result<StabilizerTableau> {
    let t = aux.to_stabilizers()?;
    let m = aux.m_qubits();
    let perm: Vec<usize> = (1..=m).chain([0]).collect();
    Ok(t.permute(&perm))
}

/// Full table over every pattern on the inputs of `t`.
pub fn correction_table(
    t: &StabilizerTableau,
    model: &ErrorModel,
    fallback: Verdict,
) -> Result<CorrectionTable> {
    let m = t.qubits_with_role(Role::Input).len();
    if m > 8 {
        return Err(ForgeError::CapExceeded(m, 8));
    }
    let errors = model.errors(m);
    let entries = all_patterns(m)
        .iter()
        .map(|pat| classify(t, pat, &errors, fallback.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrectionTable { entries })
}

pub fn encoder(spec: &CodeSpec) -> Result<AuxOps> {
    if spec.is_purification() {
        return Err(ForgeError::Composition(format!("{spec} is not a code")));
    }
    Ok(spec.aux()?.with_side(Side::Input))
}

/// Same state as the encoder with input and output exchanged.
pub fn decoder(spec: &CodeSpec) -> Result<AuxOps> {
    Ok(encoder(spec)?.with_side(Side::Output))
}

/// Decoder of `from` Bell-linked to the encoder of `to`.
pub fn switcher(from: &CodeSpec, to: &CodeSpec) -> Result<StabilizerTableau> {
    couple(&decoder(from)?, &encoder(to)?)
}

pub fn syndrome_readout(code: &CodeSpec) -> Result<StabilizerTableau> {
    switcher(code, code)
}

/// Entanglement swapping between the outputs of two purification stages.
pub fn repeater(left: &CompositionPlan, right: &CompositionPlan) -> Result<StabilizerTableau> {
    swap(&left.evaluate_aux()?, &right.evaluate_aux()?)
}

/// `rounds` DEJMPS rounds on top of `inner`, one concatenation per round.
pub fn purify_over(inner: &AuxOps, rounds: usize, party: Party) -> Result<AuxOps> {
    let round = codes::dejmps(party)?;
    let mut cur = inner.clone();
    for _ in 0..rounds {
        cur = build_next_level(&RecurrenceInput {
            outer: round.clone(),
            inner: cur,
        })?
        .reduce_f();
    }
    Ok(cur)
}

/// Decode, purify for `rounds` rounds, and re-encode.
pub fn logical_epp(code: &CodeSpec, rounds: usize, party: Party) -> Result<StabilizerTableau> {
    if rounds == 0 {
        return Err(ForgeError::Domain(
            "at least one purification round is needed".into(),
        ));
    }
    let purified = purify_over(&decoder(code)?, rounds, party)?;
    couple(&purified, &encoder(code)?)
}

pub fn dfs_epp(rounds: usize, party: Party) -> Result<StabilizerTableau> {
    logical_epp(&CodeSpec::new(CodeKind::Dfs, 1), rounds, party)
}

/// Plan node: a code family or explicit operator sets, optionally with the
/// side overridden (`output` turns an encoder into a decoder).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanNode {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<CodeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<AuxOps>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
}

impl PlanNode {
    pub fn code(id: &str, code: CodeSpec) -> Self {
        PlanNode {
            id: id.into(),
            code: Some(code),
            aux: None,
            side: None,
        }
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = Some(side);
        self
    }

    fn base(&self) -> Result<AuxOps> {
        let aux = match (&self.code, &self.aux) {
            (Some(c), None) => c.aux()?,
            (None, Some(a)) => a.clone(),
            _ => {
                return Err(ForgeError::Composition(format!(
                    "node {} needs exactly one of code and aux",
                    self.id
                )))
            }
        };
        Ok(match self.side {
            Some(s) => aux.with_side(s),
            None => aux,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PlanEdge {
    /// Copies of `inner` attached to every non-distinguished qubit of `outer`.
    Concatenate { outer: String, inner: String },
    /// Bell link between the distinguished qubits of two chains.
    Couple { from: String, to: String },
}

/// Concatenation chains, optionally joined by one Bell link.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionPlan {
    pub nodes: Vec<PlanNode>,
    #[serde(default)]
    pub edges: Vec<PlanEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Built {
    pub tableau: StabilizerTableau,
    pub graph: GraphState,
}

enum Shape<'a> {
    Single(&'a str),
    Coupled(&'a str, &'a str),
}

impl CompositionPlan {
    pub fn single(node: PlanNode) -> Self {
        CompositionPlan {
            nodes: vec![node],
            edges: Vec::new(),
        }
    }

    fn node(&self, id: &str) -> Result<&PlanNode> {
        self.nodes
            .iter()
            .find(|n| n.id == id)
            .ok_or_else(|| ForgeError::Composition(format!("unknown node {id}")))
    }

    fn inner_of(&self) -> Result<HashMap<&str, &str>> {
        let mut inner = HashMap::new();
        let mut used_as_inner = HashSet::new();
        for e in &self.edges {
            if let PlanEdge::Concatenate { outer, inner: i } = e {
                self.node(outer)?;
                self.node(i)?;
                if inner.insert(outer.as_str(), i.as_str()).is_some() {
                    return Err(ForgeError::Composition(format!(
                        "node {outer} has two inner tasks"
                    )));
                }
                if !used_as_inner.insert(i.as_str()) {
                    return Err(ForgeError::Composition(format!("node {i} is used twice")));
                }
            }
        }
        Ok(inner)
    }

    fn shape(&self) -> Result<Shape<'_>> {
        let mut ids = HashSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id.as_str()) {
                return Err(ForgeError::Composition(format!("duplicate node {}", n.id)));
            }
        }
        let inner = self.inner_of()?;
        let inners: HashSet<&str> = inner.values().copied().collect();
        let roots: Vec<&str> = self
            .nodes
            .iter()
            .map(|n| n.id.as_str())
            .filter(|id| !inners.contains(id))
            .collect();
        let couples: Vec<(&str, &str)> = self
            .edges
            .iter()
            .filter_map(|e| match e {
                PlanEdge::Couple { from, to } => Some((from.as_str(), to.as_str())),
                _ => None,
            })
            .collect();
        // Every chain must end; a cycle leaves nodes unreachable from roots.
        let mut reached = 0;
        for r in &roots {
            let mut cur = Some(*r);
            while let Some(c) = cur {
                reached += 1;
                if reached > self.nodes.len() {
                    break;
                }
                cur = inner.get(c).copied();
            }
        }
        if reached != self.nodes.len() {
            return Err(ForgeError::Composition(
                "concatenation edges form a cycle".into(),
            ));
        }
        match (couples.as_slice(), roots.as_slice()) {
            ([], [r]) => Ok(Shape::Single(r)),
            ([(a, b)], [_, _]) if roots.contains(a) && roots.contains(b) && a != b => {
                Ok(Shape::Coupled(a, b))
            }
            _ => Err(ForgeError::Composition(
                "a plan is one chain, or two chains joined by one couple edge".into(),
            )),
        }
    }

    fn evaluate_chain(&self, id: &str, inner: &HashMap<&str, &str>) -> Result<AuxOps> {
        let node = self.node(id)?;
        let base = node.base()?;
        let Some(i) = inner.get(id) else {
            return Ok(base);
        };
        let built = build_next_level(&RecurrenceInput {
            outer: base,
            inner: self.evaluate_chain(i, inner)?,
        })?;
        Ok(built.reduce_f())
    }

    /// Operator sets of a plan without a couple edge.
    pub fn evaluate_aux(&self) -> Result<AuxOps> {
        match self.shape()? {
            Shape::Single(r) => self.evaluate_chain(r, &self.inner_of()?),
            Shape::Coupled(..) => Err(ForgeError::Composition(
                "a coupled plan has no distinguished qubit".into(),
            )),
        }
    }

    pub fn tableau(&self) -> Result<StabilizerTableau> {
        let inner = self.inner_of()?;
        match self.shape()? {
            Shape::Single(r) => self.evaluate_chain(r, &inner)?.to_stabilizers(),
            Shape::Coupled(a, b) => {
                let (x, y) = (
                    self.evaluate_chain(a, &inner)?,
                    self.evaluate_chain(b, &inner)?,
                );
                match (x.side(), y.side()) {
                    (Side::Output, Side::Input) => couple(&x, &y),
                    (Side::Output, Side::Output) => swap(&x, &y),
                    _ => Err(ForgeError::Composition(format!(
                        "couple {a} -> {b} needs an output-side source"
                    ))),
                }
            }
        }
    }

    pub fn build(&self) -> Result<Built> {
        let tableau = self.tableau()?;
        let graph = to_graph(&tableau)?;
        Ok(Built { tableau, graph })
    }
}

pub fn build(plan: &CompositionPlan) -> Result<Built> {
    plan.build()
}

/// Plan for [`logical_epp`].
pub fn logical_epp_plan(code: &CodeSpec, rounds: usize, party: Party) -> CompositionPlan {
    CompositionPlan {
        nodes: vec![
            PlanNode::code("decode", *code).with_side(Side::Output),
            PlanNode::code("purify", CodeSpec::new(CodeKind::Dejmps(party), rounds)),
            PlanNode::code("encode", *code).with_side(Side::Input),
        ],
        edges: vec![
            PlanEdge::Concatenate {
                outer: "purify".into(),
                inner: "decode".into(),
            },
            PlanEdge::Couple {
                from: "purify".into(),
                to: "encode".into(),
            },
        ],
    }
}

/// Disjoint union, `a`'s qubits first.
pub fn tensor(a: &StabilizerTableau, b: &StabilizerTableau) -> Result<StabilizerTableau> {
    let (na, nb) = (a.n_qubits(), b.n_qubits());
    let gens = a
        .generators()
        .iter()
        .map(|g| g.tensor(&PauliString::identity(nb)))
        .chain(
            b.generators()
                .iter()
                .map(|g| PauliString::identity(na).tensor(g)),
        )
        .collect();
    let roles = a.roles().iter().chain(b.roles()).copied().collect();
    StabilizerTableau::new(na + nb, roles, gens)
}
