//! Graph states with local Clifford corrections, the DEJMPS graph rules and
//! graph export.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{check_len, ForgeError, Result};
use crate::gf2::{self, Echelon};
use crate::pauli::{PauliFactor, PauliString};
use crate::stabilizer::{self, canonical_generators, Role, StabilizerTableau};

/// Single-qubit Clifford `U`, stored as the images `U X U^dag` and
/// `U Z U^dag`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CliffordJson", into = "CliffordJson")]
pub struct LocalClifford {
    x: PauliString,
    z: PauliString,
}

#[derive(Serialize, Deserialize)]
struct CliffordJson {
    x: PauliString,
    z: PauliString,
}

impl TryFrom<CliffordJson> for LocalClifford {
    type Error = ForgeError;

    fn try_from(j: CliffordJson) -> Result<Self> {
        LocalClifford::new(j.x, j.z)
    }
}

impl From<LocalClifford> for CliffordJson {
    fn from(c: LocalClifford) -> Self {
        CliffordJson { x: c.x, z: c.z }
    }
}

impl LocalClifford {
    pub fn new(x: PauliString, z: PauliString) -> Result<Self> {
        check_len(1, x.n_qubits())?;
        check_len(1, z.n_qubits())?;
        let ok = x.is_hermitian()
            && z.is_hermitian()
            && !x.is_identity_up_to_phase()
            && !z.is_identity_up_to_phase()
            && !x.commutes_unchecked(&z);
        if !ok {
            return Err(ForgeError::Domain(format!(
                "images {x}, {z} do not define a Clifford"
            )));
        }
        Ok(LocalClifford { x, z })
    }

    fn from_images(x: &str, z: &str) -> Self {
        LocalClifford::new(crate::pauli::p(x), crate::pauli::p(z)).expect("valid images")
    }

    pub fn identity() -> Self {
        Self::from_images("+X", "+Z")
    }

    pub fn h() -> Self {
        Self::from_images("+Z", "+X")
    }

    pub fn s() -> Self {
        Self::from_images("+Y", "+Z")
    }

    pub fn s_dag() -> Self {
        Self::from_images("-Y", "+Z")
    }

    /// Conjugation by the Pauli `X^x Z^z`.
    pub fn pauli(x: bool, z: bool) -> Self {
        LocalClifford::new(
            crate::pauli::p(if z { "-X" } else { "+X" }),
            crate::pauli::p(if x { "-Z" } else { "+Z" }),
        )
        .expect("valid images")
    }

    /// Clifford with symplectic columns `(a, b)` for X and `(c, d)` for Z and
    /// positive Hermitian images.
    fn from_symplectic(a: bool, b: bool, c: bool, d: bool) -> Option<Self> {
        let img = |x: bool, z: bool| {
            PauliString::from_parts(
                Bits::from_bools(&[x]),
                Bits::from_bools(&[z]),
                u8::from(x && z),
            )
        };
        LocalClifford::new(img(a, b), img(c, d)).ok()
    }

    pub fn x_image(&self) -> &PauliString {
        &self.x
    }

    pub fn z_image(&self) -> &PauliString {
        &self.z
    }

    pub fn is_identity(&self) -> bool {
        *self == LocalClifford::identity()
    }

    /// `U P U^dag` for a single-qubit factor.
    pub fn image(&self, f: PauliFactor) -> PauliString {
        match (f.j, f.i) {
            (false, false) => PauliString::identity(1),
            (true, false) => self.x.clone(),
            (false, true) => self.z.clone(),
            (true, true) => self.x.mul(&self.z).times_i(1),
        }
    }

    /// Applies `self` first, then `next`.
    pub fn then(&self, next: &LocalClifford) -> LocalClifford {
        LocalClifford {
            x: next.conjugate(&self.x),
            z: next.conjugate(&self.z),
        }
    }

    /// `U p U^dag` for a one-qubit Pauli string.
    pub fn conjugate(&self, p: &PauliString) -> PauliString {
        conjugate(p, std::slice::from_ref(self))
    }

    pub fn inverse(&self) -> LocalClifford {
        all_local_cliffords()
            .into_iter()
            .map(|(c, _)| c)
            .find(|c| self.then(c).is_identity())
            .expect("the single-qubit Clifford group is closed")
    }

    /// Shortest gate word in `H` and `S`, in time order; `"I"` for the identity.
    pub fn name(&self) -> String {
        all_local_cliffords()
            .into_iter()
            .find(|(c, _)| c == self)
            .map(|(_, w)| if w.is_empty() { "I".to_string() } else { w })
            .expect("the single-qubit Clifford group is closed")
    }
}

impl fmt::Debug for LocalClifford {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(X->{}, Z->{})", self.name(), self.x, self.z)
    }
}

/// The 24 single-qubit Cliffords modulo phase, each with its shortest word
/// over `{H, S}`.
pub fn all_local_cliffords() -> Vec<(LocalClifford, String)> {
    let gens = [("H", LocalClifford::h()), ("S", LocalClifford::s())];
    let mut seen = vec![(LocalClifford::identity(), String::new())];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (g, c) in &gens {
            let next = seen[i].0.then(c);
            if !seen.iter().any(|(s, _)| *s == next) {
                let word = format!("{}{}", seen[i].1, g);
                seen.push((next, word));
                queue.push_back(seen.len() - 1);
            }
        }
    }
    seen
}

/// `(prod_q U_q) p (prod_q U_q)^dag`.
pub fn conjugate(p: &PauliString, cliffords: &[LocalClifford]) -> PauliString {
    let n = p.n_qubits();
    assert_eq!(n, cliffords.len(), "one Clifford per qubit");
    let mut x = Bits::zeros(n);
    let mut z = Bits::zeros(n);
    let mut phase = p.xz_phase();
    for (q, c) in cliffords.iter().enumerate() {
        let mut img = PauliString::identity(1);
        if p.x_bits().get(q) {
            img = img.mul(&c.x);
        }
        if p.z_bits().get(q) {
            img = img.mul(&c.z);
        }
        x.set(q, img.x_bits().get(0));
        z.set(q, img.z_bits().get(0));
        phase = (phase + img.xz_phase()) % 4;
    }
    PauliString::from_parts(x, z, phase)
}

fn conjugate_all(gens: &[PauliString], cliffords: &[LocalClifford]) -> Vec<PauliString> {
    gens.iter().map(|g| conjugate(g, cliffords)).collect()
}

fn at(n: usize, q: usize, c: LocalClifford) -> Vec<LocalClifford> {
    let mut v = vec![LocalClifford::identity(); n];
    v[q] = c;
    v
}

/// Graph state `|G>` followed by the local Cliffords `local_cliffords`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct GraphState {
    adjacency: Vec<Bits>,
    local_cliffords: Vec<LocalClifford>,
    roles: Vec<Role>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    roles: Vec<Role>,
    edges: Vec<(usize, usize)>,
    local_cliffords: Vec<LocalClifford>,
}

impl TryFrom<GraphJson> for GraphState {
    type Error = ForgeError;

    fn try_from(j: GraphJson) -> Result<Self> {
        let mut adj = vec![Bits::zeros(j.n); j.n];
        for (a, b) in j.edges {
            if a >= j.n || b >= j.n || a == b {
                return Err(ForgeError::InvalidGraph(format!("bad edge {a}-{b}")));
            }
            adj[a].set(b, true);
            adj[b].set(a, true);
        }
        GraphState::new(adj, j.local_cliffords, j.roles)
    }
}

impl From<GraphState> for GraphJson {
    fn from(g: GraphState) -> Self {
        GraphJson {
            n: g.n_qubits(),
            edges: g.edges(),
            roles: g.roles,
            local_cliffords: g.local_cliffords,
        }
    }
}

impl GraphState {
    pub fn new(
        adjacency: Vec<Bits>,
        local_cliffords: Vec<LocalClifford>,
        roles: Vec<Role>,
    ) -> Result<Self> {
        stabilizer::check_adjacency(&adjacency)?;
        check_len(adjacency.len(), local_cliffords.len())?;
        check_len(adjacency.len(), roles.len())?;
        Ok(GraphState {
            adjacency,
            local_cliffords,
            roles,
        })
    }

    /// Plain graph state with every qubit an output.
    pub fn from_adjacency(adjacency: Vec<Bits>) -> Result<Self> {
        let n = adjacency.len();
        GraphState::new(
            adjacency,
            vec![LocalClifford::identity(); n],
            vec![Role::Output; n],
        )
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        GraphState::try_from(GraphJson {
            n,
            roles: vec![Role::Output; n],
            edges: edges.to_vec(),
            local_cliffords: vec![LocalClifford::identity(); n],
        })
    }

    pub fn with_roles(mut self, roles: Vec<Role>) -> Result<Self> {
        check_len(self.n_qubits(), roles.len())?;
        self.roles = roles;
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.adjacency.len()
    }

    pub fn adjacency(&self) -> &[Bits] {
        &self.adjacency
    }

    pub fn local_cliffords(&self) -> &[LocalClifford] {
        &self.local_cliffords
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, row) in self.adjacency.iter().enumerate() {
            out.extend(row.iter_ones().filter(|&b| b > a).map(|b| (a, b)));
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].count_ones()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.adjacency[v].iter_ones().collect()
    }

    /// Stabilizer tableau of the corrected state.
    pub fn to_tableau(&self) -> Result<StabilizerTableau> {
        let g = stabilizer::from_graph(&self.adjacency)?;
        let gens = conjugate_all(g.generators(), &self.local_cliffords);
        StabilizerTableau::new(self.n_qubits(), self.roles.clone(), gens)
    }

    /// Centre of the star if the graph is a star on all its vertices.
    pub fn star_center(&self) -> Option<usize> {
        is_star(&self.adjacency)
    }

    pub fn is_bipartite(&self) -> bool {
        is_bipartite(&self.adjacency)
    }

    /// Connected components after deleting `v`, each sorted by vertex index.
    pub fn components_without(&self, v: usize) -> Vec<Vec<usize>> {
        components(&self.adjacency, Some(v))
    }

    pub fn export(&self, format: ExportFormat) -> String {
        export(self, format)
    }
}

/// Centre of a star graph, the lowest index in the two-vertex case.
pub fn is_star(adjacency: &[Bits]) -> Option<usize> {
    let n = adjacency.len();
    if n < 2 {
        return None;
    }
    let edges: usize = adjacency.iter().map(|r| r.count_ones()).sum::<usize>() / 2;
    if edges != n - 1 {
        return None;
    }
    (0..n).find(|&v| adjacency[v].count_ones() == n - 1)
}

pub fn is_bipartite(adjacency: &[Bits]) -> bool {
    let n = adjacency.len();
    let mut color: Vec<Option<bool>> = vec![None; n];
    for s in 0..n {
        if color[s].is_some() {
            continue;
        }
        color[s] = Some(false);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let cv = color[v].expect("coloured");
            for w in adjacency[v].iter_ones() {
                match color[w] {
                    None => {
                        color[w] = Some(!cv);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == cv => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

fn components(adjacency: &[Bits], removed: Option<usize>) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    let mut seen = vec![false; n];
    if let Some(r) = removed {
        seen[r] = true;
    }
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for w in adjacency[v].iter_ones() {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Local Clifford conversion of a full-rank tableau to a graph state.
pub fn to_graph(t: &StabilizerTableau) -> Result<GraphState> {
    let n = t.n_qubits();
    if !t.is_full_rank() {
        return Err(ForgeError::InvalidTableau(format!(
            "{} generators on {n} qubits, a graph needs a full-rank tableau",
            t.generators().len()
        )));
    }
    // Running Clifford `u` with `gens = u t u^dag`.
    let mut u = vec![LocalClifford::identity(); n];
    let mut gens = t.generators().to_vec();
    let apply =
        |gens: &mut Vec<PauliString>, u: &mut Vec<LocalClifford>, q: usize, c: LocalClifford| {
            *gens = conjugate_all(gens, &at(n, q, c.clone()));
            u[q] = u[q].then(&c);
        };

    loop {
        gens = canonical_generators(&gens, n);
        let pivots: Vec<usize> = gens.iter().filter_map(|g| g.x_bits().first_one()).collect();
        if pivots.len() == n {
            break;
        }
        let q = gens[pivots.len()..]
            .iter()
            .flat_map(|g| g.z_bits().iter_ones())
            .find(|q| !pivots.contains(q))
            .ok_or_else(|| ForgeError::Internal("no Hadamard raises the x rank".into()))?;
        apply(&mut gens, &mut u, q, LocalClifford::h());
    }
    // The x block is now the identity, row `q` acting as X or Y on qubit `q`.
    for q in 0..n {
        if gens[q].z_bits().get(q) {
            apply(&mut gens, &mut u, q, LocalClifford::s_dag());
        }
    }
    for q in 0..n {
        if gens[q].matrix_phase() == 2 {
            apply(&mut gens, &mut u, q, LocalClifford::pauli(false, true));
        }
    }
    let adjacency: Vec<Bits> = gens.iter().map(|g| g.z_bits().clone()).collect();
    let local = u.iter().map(LocalClifford::inverse).collect();
    let g = GraphState::new(adjacency, local, t.roles().to_vec())?;
    if !g.to_tableau()?.group_equal(t)? {
        return Err(ForgeError::Internal(
            "graph conversion does not reproduce the group".into(),
        ));
    }
    Ok(g)
}

/// Local Cliffords `L` with `L |G> = |t>` for the graph `adjacency`, if any.
pub fn lc_equivalent(
    t: &StabilizerTableau,
    adjacency: &[Bits],
) -> Result<Option<Vec<LocalClifford>>> {
    let n = t.n_qubits();
    check_len(n, adjacency.len())?;
    stabilizer::check_adjacency(adjacency)?;
    if !t.is_full_rank() {
        return Err(ForgeError::InvalidTableau(
            "equivalence needs a full-rank tableau".into(),
        ));
    }
    // Unknowns per qubit q: 4q + (a, b, c, d), X -> X^a Z^b and Z -> X^c Z^d.
    // Each mapped graph generator must commute with every generator of t.
    let mut eqs = Vec::with_capacity(n * n);
    for (v, neighbours) in adjacency.iter().enumerate() {
        for g in t.generators() {
            let mut row = Bits::zeros(4 * n);
            row.set(4 * v, g.z_bits().get(v));
            row.set(4 * v + 1, g.x_bits().get(v));
            for q in neighbours.iter_ones() {
                row.set(4 * q + 2, g.z_bits().get(q));
                row.set(4 * q + 3, g.x_bits().get(q));
            }
            eqs.push(row);
        }
    }
    let ech = Echelon::new(&eqs, 4 * n);
    let Some(vars) = search_invertible(&ech, n) else {
        return Ok(None);
    };
    let sym: Vec<LocalClifford> = (0..n)
        .map(|q| {
            LocalClifford::from_symplectic(
                vars[4 * q],
                vars[4 * q + 1],
                vars[4 * q + 2],
                vars[4 * q + 3],
            )
            .expect("determinant one")
        })
        .collect();

    // Fix signs with a Pauli that anticommutes exactly with the wrong rows.
    let graph = stabilizer::from_graph(adjacency)?;
    let mapped = conjugate_all(graph.generators(), &sym);
    let mut rows = Vec::with_capacity(n);
    let mut flips = Bits::zeros(n);
    for (v, g) in mapped.iter().enumerate() {
        match t.membership(g) {
            Some(positive) => flips.set(v, !positive),
            None => {
                return Err(ForgeError::Internal(
                    "mapped generator outside the group".into(),
                ))
            }
        }
        rows.push(g.z_bits().concat(g.x_bits()));
    }
    let fix = gf2::solve(&rows, &flips, 2 * n)
        .ok_or_else(|| ForgeError::Internal("sign correction has no solution".into()))?;
    let local: Vec<LocalClifford> = sym
        .iter()
        .enumerate()
        .map(|(q, c)| c.then(&LocalClifford::pauli(fix.get(q), fix.get(n + q))))
        .collect();
    let g = GraphState::new(adjacency.to_vec(), local.clone(), t.roles().to_vec())?;
    if !g.to_tableau()?.group_equal(t)? {
        return Err(ForgeError::Internal(
            "equivalence check failed after sign fixing".into(),
        ));
    }
    Ok(Some(local))
}

/// Backtracking over the free variables of `ech`, highest qubit first, for an
/// assignment whose every 2x2 block is invertible.
fn search_invertible(ech: &Echelon, n: usize) -> Option<Vec<bool>> {
    let mut pivot_row = vec![None; 4 * n];
    for (r, &p) in ech.pivots.iter().enumerate() {
        pivot_row[p] = Some(r);
    }
    let mut vals = vec![false; 4 * n];
    fn go(q: usize, ech: &Echelon, pivot_row: &[Option<usize>], vals: &mut Vec<bool>) -> bool {
        let base = 4 * q;
        let free: Vec<usize> = (base..base + 4)
            .filter(|&v| pivot_row[v].is_none())
            .collect();
        for code in 0..(1u32 << free.len()) {
            for (k, &v) in free.iter().enumerate() {
                vals[v] = (code >> k) & 1 == 1;
            }
            for v in (base..base + 4).rev() {
                if let Some(r) = pivot_row[v] {
                    let row = &ech.rows[r];
                    vals[v] = row
                        .iter_ones()
                        .filter(|&c| c != v)
                        .fold(false, |acc, c| acc ^ vals[c]);
                }
            }
            let det = (vals[base] && vals[base + 3]) ^ (vals[base + 1] && vals[base + 2]);
            if det && (q == 0 || go(q - 1, ech, pivot_row, vals)) {
                return true;
            }
        }
        false
    }
    if n == 0 {
        return Some(vals);
    }
    go(n - 1, ech, &pivot_row, &mut vals).then_some(vals)
}

/// Graph of the DEJMPS resource state for `n` rounds built from the
/// duplicate-and-connect rules. Vertex 0 is the output hub.
pub fn dejmps_graph(n: usize) -> Result<GraphState> {
    if n == 0 {
        return Err(ForgeError::Domain(
            "at least one purification round is needed".into(),
        ));
    }
    let inputs = dejmps_inputs(n);
    let m = inputs.len();
    let mut adj = vec![Bits::zeros(m + 1); m + 1];
    for a in 0..m {
        adj[0].set(a + 1, true);
        adj[a + 1].set(0, true);
        for b in inputs[a].iter_ones() {
            adj[a + 1].set(b + 1, true);
        }
    }
    let mut roles = vec![Role::Input; m + 1];
    roles[0] = Role::Output;
    GraphState::new(adj, vec![LocalClifford::identity(); m + 1], roles)
}

/// Input subgraph with the hub removed.
fn dejmps_inputs(n: usize) -> Vec<Bits> {
    match n {
        1 => vec![Bits::zeros(2); 2],
        2 => disjoint(&[edge(), edge()]),
        _ => {
            let h = dejmps_inputs(n - 2);
            let joined = join(&h, &h);
            disjoint(&[joined.clone(), joined])
        }
    }
}

fn edge() -> Vec<Bits> {
    vec![Bits::unit(2, 1), Bits::unit(2, 0)]
}

fn disjoint(parts: &[Vec<Bits>]) -> Vec<Bits> {
    let n: usize = parts.iter().map(Vec::len).sum();
    let mut out = Vec::with_capacity(n);
    let mut offset = 0;
    for part in parts {
        for row in part {
            let mut r = Bits::zeros(n);
            for b in row.iter_ones() {
                r.set(offset + b, true);
            }
            out.push(r);
        }
        offset += part.len();
    }
    out
}

/// Disjoint union with every vertex of `a` linked to every vertex of `b`.
fn join(a: &[Bits], b: &[Bits]) -> Vec<Bits> {
    let mut out = disjoint(&[a.to_vec(), b.to_vec()]);
    let (na, n) = (a.len(), a.len() + b.len());
    for x in 0..na {
        for y in na..n {
            out[x].set(y, true);
            out[y].set(x, true);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Graphml,
    Json,
}

impl FromStr for ExportFormat {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(ExportFormat::Dot),
            "graphml" => Ok(ExportFormat::Graphml),
            "json" => Ok(ExportFormat::Json),
            other => Err(ForgeError::Parse(format!(
                "unknown export format {other:?}"
            ))),
        }
    }
}

fn color(role: Role) -> &'static str {
    match role {
        Role::Input => "red",
        Role::Output => "blue",
        Role::Virtual => "gray",
    }
}

fn role_name(role: Role) -> &'static str {
    match role {
        Role::Input => "input",
        Role::Output => "output",
        Role::Virtual => "virtual",
    }
}

/// Deterministic text serialization, nodes in qubit order.
pub fn export(g: &GraphState, format: ExportFormat) -> String {
    use fmt::Write;
    let mut s = String::new();
    match format {
        ExportFormat::Dot => {
            s.push_str("graph G {\n  node [style=filled];\n");
            for q in 0..g.n_qubits() {
                let c = &g.local_cliffords[q];
                let label = if c.is_identity() {
                    String::new()
                } else {
                    format!(", label=\"q{q} {}\"", c.name())
                };
                let _ = writeln!(s, "  q{q} [fillcolor={}{label}];", color(g.roles[q]));
            }
            for (a, b) in g.edges() {
                let _ = writeln!(s, "  q{a} -- q{b};");
            }
            s.push_str("}\n");
        }
        ExportFormat::Graphml => {
            s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
            s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
            s.push_str(
                "  <key id=\"role\" for=\"node\" attr.name=\"role\" attr.type=\"string\"/>\n",
            );
            s.push_str("  <key id=\"clifford\" for=\"node\" attr.name=\"clifford\" attr.type=\"string\"/>\n");
            s.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
            for q in 0..g.n_qubits() {
                let _ = writeln!(
                    s,
                    "    <node id=\"q{q}\"><data key=\"role\">{}</data><data key=\"clifford\">{}</data></node>",
                    role_name(g.roles[q]),
                    g.local_cliffords[q].name()
                );
            }
            for (a, b) in g.edges() {
                let _ = writeln!(s, "    <edge source=\"q{a}\" target=\"q{b}\"/>");
            }
            s.push_str("  </graph>\n</graphml>\n");
        }
        ExportFormat::Json => {
            s = serde_json::to_string_pretty(g).expect("graph state serializes");
            s.push('\n');
        }
    }
    s
}
