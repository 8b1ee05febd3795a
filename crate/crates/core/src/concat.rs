//! Recurrences for concatenated and coupled resource states.
//!
//! A level is built by feeding every non-distinguished qubit of an outer task
//! into the distinguished qubit of a copy of an inner task. Each outer
//! operator `i^a (x) sigma_{i_k, j_k}` becomes `c (x) F^{j_k} (x) K^{i_k}` with
//! `c = a prod i^{i_k j_k}`.

use crate::aux_ops::{AuxOps, Side};
use crate::bits::Bits;
use crate::error::{ForgeError, Result};
use crate::gf2::Echelon;
use crate::pauli::{p, PauliString};
use crate::stabilizer::{Role, StabilizerTableau};

/// Per-slot choice of inner representatives: `k[s]` indexes the inner K set
/// and `f[s]` the inner F set at slot `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selector {
    pub k: Vec<usize>,
    pub f: Vec<usize>,
}

impl Selector {
    pub fn first(m: usize) -> Self {
        Selector {
            k: vec![0; m],
            f: vec![0; m],
        }
    }
}

#[derive(Clone, Debug)]
pub struct RecurrenceInput {
    pub outer: AuxOps,
    pub inner: AuxOps,
}

/// Phase exponent `c` and the bit vectors (`i` bits, `j` bits) of an outer operator.
pub fn recurrence_data(outer_op: &PauliString) -> (u8, Bits, Bits) {
    let (a, factors) = outer_op.factor_decompose();
    let m = factors.len();
    let mut ib = Bits::zeros(m);
    let mut jb = Bits::zeros(m);
    let mut c = a;
    for (s, f) in factors.iter().enumerate() {
        ib.set(s, f.i);
        jb.set(s, f.j);
        if f.i && f.j {
            c += 1;
        }
    }
    (c % 4, ib, jb)
}

/// `c (x)_r F_r^{j_r} (x)_s K_s^{i_s}` for one outer operator.
pub fn extend_op(outer_op: &PauliString, inner: &AuxOps, choose: &Selector) -> Result<PauliString> {
    let (c, ib, jb) = recurrence_data(outer_op);
    let m = outer_op.n_qubits();
    let mi = inner.m_qubits();
    if !ib.is_zero() && inner.k_set().is_empty() {
        return Err(ForgeError::InsufficientAux("K"));
    }
    if !jb.is_zero() && inner.f_set().is_empty() {
        return Err(ForgeError::InsufficientAux("F"));
    }
    let mut f_part = PauliString::identity(0);
    let mut k_part = PauliString::identity(0);
    for s in 0..m {
        let fb = if jb.get(s) {
            inner.f_set()[choose.f[s]].clone()
        } else {
            PauliString::identity(mi)
        };
        let kb = if ib.get(s) {
            inner.k_set()[choose.k[s]].clone()
        } else {
            PauliString::identity(mi)
        };
        f_part = f_part.tensor(&fb);
        k_part = k_part.tensor(&kb);
    }
    Ok(f_part.mul(&k_part).times_i(c))
}

pub fn extend_k(outer_k: &PauliString, inner: &AuxOps, choose: &Selector) -> Result<PauliString> {
    extend_op(outer_k, inner, choose)
}

pub fn extend_f(outer_f: &PauliString, inner: &AuxOps, choose: &Selector) -> Result<PauliString> {
    extend_op(outer_f, inner, choose)
}

/// Staircase selectors for one outer operator: all slots on the first
/// representative, then one slot at a time moved to each other
/// representative. Slots carrying Y vary their K and F choices separately.
pub fn staircase_selectors(outer_op: &PauliString, inner: &AuxOps) -> Vec<Selector> {
    let m = outer_op.n_qubits();
    let base = Selector::first(m);
    let mut out = vec![base.clone()];
    for s in 0..m {
        let f = outer_op.factor(s);
        if f.i {
            for kk in 1..inner.k_set().len() {
                let mut sel = base.clone();
                sel.k[s] = kk;
                out.push(sel);
            }
        }
        if f.j {
            for ff in 1..inner.f_set().len() {
                let mut sel = base.clone();
                sel.f[s] = ff;
                out.push(sel);
            }
        }
    }
    out
}

/// Tensor products `A_{i_1} (x) .. (x) A_{i_m}` in staircase order: all first
/// elements, then one slot at a time (last slot first) through the others.
pub fn staircase(ops: &[PauliString], m: usize) -> Vec<PauliString> {
    let mut rows = vec![vec![0usize; m]];
    for slot in (0..m).rev() {
        for i in 1..ops.len() {
            let mut r = vec![0usize; m];
            r[slot] = i;
            rows.push(r);
        }
    }
    rows.iter()
        .map(|r| {
            r.iter()
                .fold(PauliString::identity(0), |acc, &i| acc.tensor(&ops[i]))
        })
        .collect()
}

/// Greedily keeps candidates whose Pauli parts are independent of those
/// already kept, stopping at `target`.
fn select_independent(
    candidates: Vec<(bool, PauliString)>,
    target: usize,
) -> Vec<(bool, PauliString)> {
    let mut kept: Vec<(bool, PauliString)> = Vec::new();
    let mut rows: Vec<Bits> = Vec::new();
    for (is_k, op) in candidates {
        if kept.len() == target {
            break;
        }
        let v = op.symplectic();
        if !rows.is_empty() && Echelon::new(&rows, v.len()).contains(&v) {
            continue;
        }
        if v.is_zero() {
            continue;
        }
        rows.push(v);
        kept.push((is_k, op));
    }
    kept
}

fn check_hermitian(op: &PauliString, what: &str) -> Result<()> {
    if op.is_hermitian() {
        Ok(())
    } else {
        Err(ForgeError::Internal(format!(
            "{what} {op} is not Hermitian"
        )))
    }
}

/// Auxiliary operators of the concatenation `inner^{(x)m} o outer`.
pub fn build_next_level(r: &RecurrenceInput) -> Result<AuxOps> {
    let (outer, inner) = (&r.outer, &r.inner);
    if outer.side() != inner.side() {
        return Err(ForgeError::Composition(
            "concatenated tasks must share the distinguished side".into(),
        ));
    }
    if !outer.is_complete() || !inner.is_complete() {
        return Err(ForgeError::Composition(
            "concatenation needs complete operator sets".into(),
        ));
    }
    let total = outer.m_qubits() * inner.m_qubits();
    let mut candidates = Vec::new();
    for (is_k, set) in [(true, outer.k_set()), (false, outer.f_set())] {
        for op in set {
            for sel in staircase_selectors(op, inner) {
                let e = extend_op(op, inner, &sel)?;
                check_hermitian(&e, if is_k { "K" } else { "F" })?;
                let lead = if is_k { p("Z") } else { p("X") };
                candidates.push((is_k, lead.tensor(&e)));
            }
        }
    }
    let kept = select_independent(candidates, total + 1);
    if kept.len() != total + 1 {
        return Err(ForgeError::Internal(format!(
            "staircase reached rank {} instead of {}",
            kept.len(),
            total + 1
        )));
    }
    let mut k_set = Vec::new();
    let mut f_set = Vec::new();
    for (is_k, op) in kept {
        let stripped = op.remove_qubit(0);
        if is_k {
            k_set.push(stripped);
        } else {
            f_set.push(stripped);
        }
    }
    AuxOps::new(outer.side(), k_set, f_set)
}

/// `levels`-fold concatenation of `base` with itself; level 1 is `base`.
pub fn tower(base: &AuxOps, levels: usize, reduce: bool) -> Result<AuxOps> {
    if levels == 0 {
        return Err(ForgeError::Domain("tower needs at least one level".into()));
    }
    let mut cur = base.clone();
    for _ in 1..levels {
        cur = build_next_level(&RecurrenceInput {
            outer: base.clone(),
            inner: cur,
        })?;
        if reduce {
            cur = cur.reduce_f();
        }
    }
    Ok(cur)
}

fn couple_sets(a: &AuxOps, b: &AuxOps, roles: Vec<Role>) -> Result<StabilizerTableau> {
    let mut candidates = Vec::new();
    for (is_k, sa, sb) in [(true, a.k_set(), b.k_set()), (false, a.f_set(), b.f_set())] {
        if sa.is_empty() || sb.is_empty() {
            continue;
        }
        for y in sb {
            candidates.push((is_k, sa[0].tensor(y)));
        }
        for x in &sa[1..] {
            candidates.push((is_k, x.tensor(&sb[0])));
        }
    }
    let target = a.m_qubits() + b.m_qubits();
    let kept = select_independent(candidates, target);
    if kept.len() != target {
        return Err(ForgeError::Internal(format!(
            "coupling reached rank {} instead of {target}",
            kept.len()
        )));
    }
    StabilizerTableau::new(target, roles, kept.into_iter().map(|(_, op)| op).collect())
}

/// Bell-links the output of `a` to the input of `b`.
pub fn couple(a: &AuxOps, b: &AuxOps) -> Result<StabilizerTableau> {
    if a.side() != Side::Output || b.side() != Side::Input {
        return Err(ForgeError::Composition(
            "couple links a single-output state to a single-input state".into(),
        ));
    }
    let roles = vec![Role::Input; a.m_qubits()]
        .into_iter()
        .chain(vec![Role::Output; b.m_qubits()])
        .collect();
    couple_sets(a, b, roles)
}

/// Bell-links the outputs of two single-output states, as in entanglement
/// swapping. Every remaining qubit is an input.
pub fn swap(a: &AuxOps, b: &AuxOps) -> Result<StabilizerTableau> {
    if a.side() != Side::Output || b.side() != Side::Output {
        return Err(ForgeError::Composition(
            "swap links two single-output states".into(),
        ));
    }
    couple_sets(a, b, vec![Role::Input; a.m_qubits() + b.m_qubits()])
}

/// Links qubit `slot` of `t` to the distinguished qubit of `inner`,
/// replacing X by F, Z by K and Y by `i F K` at that slot.
pub fn project_slot(
    t: &StabilizerTableau,
    slot: usize,
    inner: &AuxOps,
) -> Result<StabilizerTableau> {
    let n = t.n_qubits();
    if slot >= n {
        return Err(ForgeError::Domain(format!("slot {slot} out of range")));
    }
    if t.roles()[slot] != inner.side().other_role() {
        return Err(ForgeError::Composition(format!(
            "slot {slot} has role {:?}, incompatible with the inner distinguished side",
            t.roles()[slot]
        )));
    }
    let mi = inner.m_qubits();
    let before: Vec<usize> = (0..slot).collect();
    let after: Vec<usize> = (slot + 1..n).collect();
    let mut candidates = Vec::new();
    for g in t.generators() {
        let (a, factors) = g.factor_decompose();
        let left = PauliString::from_factors(0, &factors[..slot]);
        let right = PauliString::from_factors(0, &factors[slot + 1..]);
        let f0 = || {
            inner
                .f_set()
                .first()
                .cloned()
                .ok_or(ForgeError::InsufficientAux("F"))
        };
        let k0 = || {
            inner
                .k_set()
                .first()
                .cloned()
                .ok_or(ForgeError::InsufficientAux("K"))
        };
        let middles: Vec<PauliString> = match factors[slot].symbol() {
            'I' => vec![PauliString::identity(mi)],
            'X' => inner.f_set().to_vec(),
            'Z' => inner.k_set().to_vec(),
            _ => {
                let (f, k) = (f0()?, k0()?);
                let mut v: Vec<PauliString> = inner
                    .k_set()
                    .iter()
                    .map(|kk| f.mul(kk).times_i(1))
                    .collect();
                v.extend(inner.f_set()[1..].iter().map(|ff| ff.mul(&k).times_i(1)));
                v
            }
        };
        if middles.is_empty() {
            return Err(ForgeError::InsufficientAux("K or F"));
        }
        for mid in middles {
            let op = left.tensor(&mid).tensor(&right).times_i(a);
            check_hermitian(&op, "projected stabilizer")?;
            candidates.push((true, op));
        }
    }
    let target = n + mi - 1;
    let kept = select_independent(candidates, target);
    if kept.len() != target {
        return Err(ForgeError::Internal(format!(
            "single projection reached rank {} instead of {target}",
            kept.len()
        )));
    }
    let roles: Vec<Role> = before
        .iter()
        .map(|&q| t.roles()[q])
        .chain(std::iter::repeat_n(inner.side().other_role(), mi))
        .chain(after.iter().map(|&q| t.roles()[q]))
        .collect();
    StabilizerTableau::new(target, roles, kept.into_iter().map(|(_, op)| op).collect())
}

/// Closed-form operator counts used as assertions.
pub mod counts {
    /// Independent staircase products from `n` operators over `m` slots.
    pub fn staircase(n: usize, m: usize) -> usize {
        n * m - m + 1
    }

    /// `|K| + |F|` after concatenating an `m`-slot outer task with an
    /// inner task on `n` qubits.
    pub fn level(n: usize, m: usize) -> usize {
        n * m + 1
    }

    /// Stabilizers after coupling `n` and `m` non-distinguished qubits.
    pub fn coupling(n: usize, m: usize) -> usize {
        n + m
    }

    /// Stabilizers after one projection joining an `M`- and an `N`-qubit state.
    pub fn single_projection(big_m: usize, big_n: usize) -> usize {
        big_m + big_n - 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::is_independent;

    fn aux(side: Side, k: &[&str], f: &[&str]) -> AuxOps {
        AuxOps::new(
            side,
            k.iter().map(|s| p(s)).collect(),
            f.iter().map(|s| p(s)).collect(),
        )
        .unwrap()
    }

    fn dejmps() -> AuxOps {
        aux(Side::Output, &["-YI", "-IY"], &["-ZZ"])
    }

    fn bitflip3() -> AuxOps {
        aux(Side::Input, &["ZII", "IZI", "IIZ"], &["XXX"])
    }

    #[test]
    fn recurrence_data_for_dejmps() {
        let (c, ib, jb) = recurrence_data(&p("-YI"));
        assert_eq!(c, 3);
        assert_eq!(ib, Bits::from_bools(&[true, false]));
        assert_eq!(jb, Bits::from_bools(&[true, false]));
        let (c, ib, jb) = recurrence_data(&p("-ZZ"));
        assert_eq!(c, 2);
        assert_eq!(ib, Bits::from_bools(&[true, true]));
        assert!(jb.is_zero());
    }

    #[test]
    fn extend_examples() {
        let d = dejmps();
        let sel = Selector::first(2);
        let k = extend_k(&p("-YI"), &d, &sel).unwrap();
        let fk = d.f_set()[0].mul(&d.k_set()[0]);
        assert_eq!(k, fk.tensor(&PauliString::identity(2)).times_i(3));
        let f = extend_f(&p("-ZZ"), &d, &sel).unwrap();
        assert_eq!(f, -d.k_set()[0].tensor(&d.k_set()[0]));

        let bf = bitflip3();
        let k = extend_k(&p("IZI"), &bf, &Selector::first(3)).unwrap();
        assert_eq!(k, p("IIIZIIIII"));
        let f = extend_f(&p("XXX"), &bf, &Selector::first(3)).unwrap();
        assert_eq!(f, p("XXXXXXXXX"));

        let wire = aux(Side::Input, &["Z"], &["X"]);
        assert_eq!(
            extend_k(&p("IX"), &wire, &Selector::first(2)).unwrap(),
            p("IX")
        );
        let no_f = aux(Side::Input, &["Z"], &[]);
        assert_eq!(
            extend_k(&p("X"), &no_f, &Selector::first(1)),
            Err(ForgeError::InsufficientAux("F"))
        );
    }

    #[test]
    fn bitflip_level_two_counts() {
        let bf = bitflip3();
        let l2 = build_next_level(&RecurrenceInput {
            outer: bf.clone(),
            inner: bf.clone(),
        })
        .unwrap();
        assert_eq!(l2.len(), counts::level(3, 3));
        assert_eq!(l2.k_set().len(), 9);
        assert_eq!(l2.f_set(), &[p("XXXXXXXXX")]);
    }

    #[test]
    fn dejmps_level_counts() {
        let mut cur = dejmps();
        for n in 2..=4 {
            cur = build_next_level(&RecurrenceInput {
                outer: dejmps(),
                inner: cur,
            })
            .unwrap()
            .reduce_f();
            assert_eq!(cur.m_qubits(), 1 << n);
            assert_eq!(cur.len(), (1 << n) + 1);
            assert_eq!(cur.f_set().len(), 1);
        }
    }

    #[test]
    fn side_mismatch_is_rejected() {
        let r = RecurrenceInput {
            outer: dejmps(),
            inner: bitflip3(),
        };
        assert!(matches!(
            build_next_level(&r),
            Err(ForgeError::Composition(_))
        ));
        assert!(couple(&bitflip3(), &bitflip3()).is_err());
        assert!(swap(&dejmps(), &bitflip3()).is_err());
    }

    #[test]
    fn staircase_counts() {
        for (n, m) in [(2, 3), (3, 2), (3, 3)] {
            let ops: Vec<PauliString> = ["XI", "ZI", "IX"][..n].iter().map(|s| p(s)).collect();
            let st = staircase(&ops, m);
            assert_eq!(st.len(), counts::staircase(n, m));
            assert!(is_independent(&st));
        }
    }

    #[test]
    fn wire_coupling_is_bell_pair() {
        let w_out = aux(Side::Output, &["Z"], &["X"]);
        let w_in = aux(Side::Input, &["Z"], &["X"]);
        let t = couple(&w_out, &w_in).unwrap();
        let bell =
            StabilizerTableau::with_uniform_role(vec![p("XX"), p("ZZ")], Role::Input).unwrap();
        assert!(t.group_equal(&bell).unwrap());
        assert_eq!(t.roles(), &[Role::Input, Role::Output]);
    }

    #[test]
    fn single_projection_matches_level_build() {
        let d = dejmps();
        let outer = d.to_stabilizers().unwrap();
        let once = project_slot(&outer, 1, &d).unwrap();
        assert_eq!(once.generators().len(), counts::single_projection(3, 3));
        let twice = project_slot(&once, 3, &d).unwrap();
        let direct = build_next_level(&RecurrenceInput {
            outer: d.clone(),
            inner: d.clone(),
        })
        .unwrap()
        .to_stabilizers()
        .unwrap();
        assert!(twice.group_equal(&direct).unwrap());
    }
}
