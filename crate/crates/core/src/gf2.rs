//! Linear algebra over GF(2) on row lists of [`Bits`].

use crate::bits::Bits;

/// Reduced row echelon form that remembers how each reduced row was built
/// from the input rows.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// Nonzero reduced rows, one per pivot.
    pub rows: Vec<Bits>,
    /// Pivot column of each reduced row, strictly increasing.
    pub pivots: Vec<usize>,
    /// `combos[r]` marks the input rows whose sum is `rows[r]`.
    pub combos: Vec<Bits>,
    n_inputs: usize,
    n_cols: usize,
}

impl Echelon {
    pub fn new(input: &[Bits], n_cols: usize) -> Self {
        let n_inputs = input.len();
        let mut rows: Vec<Bits> = input.to_vec();
        let mut combos: Vec<Bits> = (0..n_inputs).map(|i| Bits::unit(n_inputs, i)).collect();
        for r in &rows {
            assert_eq!(r.len(), n_cols, "row length does not match column count");
        }
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..n_cols {
            let Some(p) = (top..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(top, p);
            combos.swap(top, p);
            for r in 0..rows.len() {
                if r != top && rows[r].get(col) {
                    let (pr, pc) = (rows[top].clone(), combos[top].clone());
                    rows[r].xor_assign(&pr);
                    combos[r].xor_assign(&pc);
                }
            }
            pivots.push(col);
            top += 1;
        }
        rows.truncate(top);
        combos.truncate(top);
        Echelon {
            rows,
            pivots,
            combos,
            n_inputs,
            n_cols,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Reduces `v` against the echelon rows and returns the residue together
    /// with the set of input rows that were added.
    pub fn reduce(&self, v: &Bits) -> (Bits, Bits) {
        let mut residue = v.clone();
        let mut used = Bits::zeros(self.n_inputs);
        for (r, &col) in self.pivots.iter().enumerate() {
            if residue.get(col) {
                residue.xor_assign(&self.rows[r]);
                used.xor_assign(&self.combos[r]);
            }
        }
        (residue, used)
    }

    /// Input-row combination summing to `v`, if `v` lies in the row space.
    pub fn express(&self, v: &Bits) -> Option<Bits> {
        let (residue, used) = self.reduce(v);
        residue.is_zero().then_some(used)
    }

    pub fn contains(&self, v: &Bits) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Basis of `{x : row . x = 0 for every row}`.
    pub fn nullspace(&self) -> Vec<Bits> {
        let mut is_pivot = vec![false; self.n_cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.n_cols).filter(|&c| !is_pivot[c]) {
            let mut v = Bits::unit(self.n_cols, free);
            for (r, &p) in self.pivots.iter().enumerate() {
                if self.rows[r].get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }
}

pub fn rank(rows: &[Bits]) -> usize {
    match rows.first() {
        None => 0,
        Some(r) => Echelon::new(rows, r.len()).rank(),
    }
}

pub fn is_independent(rows: &[Bits]) -> bool {
    rank(rows) == rows.len()
}

/// Solves `A x = b` where `A` is given by its rows. Returns one solution.
pub fn solve(a_rows: &[Bits], b: &Bits, n_cols: usize) -> Option<Bits> {
    assert_eq!(a_rows.len(), b.len());
    // Augment each row with its right-hand side bit and eliminate.
    let aug: Vec<Bits> = a_rows
        .iter()
        .enumerate()
        .map(|(i, r)| r.concat(&Bits::from_bools(&[b.get(i)])))
        .collect();
    let ech = Echelon::new(&aug, n_cols + 1);
    if ech.pivots.last() == Some(&n_cols) {
        return None;
    }
    let mut x = Bits::zeros(n_cols);
    for (r, &p) in ech.pivots.iter().enumerate() {
        if ech.rows[r].get(n_cols) {
            x.set(p, true);
        }
    }
    Some(x)
}

/// Transpose of a row list with `n_cols` columns.
pub fn transpose(rows: &[Bits], n_cols: usize) -> Vec<Bits> {
    let mut out = vec![Bits::zeros(rows.len()); n_cols];
    for (i, r) in rows.iter().enumerate() {
        for j in r.iter_ones() {
            out[j].set(i, true);
        }
    }
    out
}
