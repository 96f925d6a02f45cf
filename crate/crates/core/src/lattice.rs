//! Integer lattices: Smith normal form, finitely generated abelian groups,
//! kernels and integer solving.
//!
//! Everything here is exact `i64` arithmetic. Inputs are small (a handful of
//! generators), so no attempt is made to control coefficient growth beyond
//! picking the smallest pivot at each step.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds a matrix from row vectors; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has wrong length");
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0; self.cols];
        for (i, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += c * self[(i, j)];
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: i64) {
        for j in 0..self.cols {
            let v = self[(src, j)];
            self[(dst, j)] += c * v;
        }
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: i64) {
        for i in 0..self.rows {
            let v = self[(i, src)];
            self[(i, dst)] += c * v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            self[(i, j)] = -self[(i, j)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form `L·A·R = D` with `L`, `R` unimodular.
///
/// The inverses are tracked alongside so that `A = U·D·V` with
/// `U = L⁻¹`, `V = R⁻¹` can be checked exactly.
#[derive(Clone, Debug)]
pub struct Smith {
    pub left: Matrix,
    pub left_inv: Matrix,
    pub right: Matrix,
    pub right_inv: Matrix,
    /// The full `m × n` diagonal matrix.
    pub d: Matrix,
    /// Nonzero diagonal entries, positive, each dividing the next.
    pub diagonal: Vec<i64>,
}

impl Smith {
    pub fn new(a: &Matrix) -> Smith {
        let (m, n) = (a.nrows(), a.ncols());
        let mut d = a.clone();
        let mut left = Matrix::identity(m);
        let mut left_inv = Matrix::identity(m);
        let mut right = Matrix::identity(n);
        let mut right_inv = Matrix::identity(n);

        let row_swap = |d: &mut Matrix, l: &mut Matrix, li: &mut Matrix, a: usize, b: usize| {
            d.swap_rows(a, b);
            l.swap_rows(a, b);
            li.swap_cols(a, b);
        };
        let col_swap = |d: &mut Matrix, r: &mut Matrix, ri: &mut Matrix, a: usize, b: usize| {
            d.swap_cols(a, b);
            r.swap_cols(a, b);
            ri.swap_rows(a, b);
        };

        let mut diagonal = Vec::new();
        for t in 0..m.min(n) {
            loop {
                // smallest nonzero entry of the trailing block
                let mut best: Option<(usize, usize)> = None;
                for i in t..m {
                    for j in t..n {
                        let v = d[(i, j)].abs();
                        if v != 0 && best.is_none_or(|(bi, bj)| v < d[(bi, bj)].abs()) {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((pi, pj)) = best else {
                    break;
                };
                row_swap(&mut d, &mut left, &mut left_inv, t, pi);
                col_swap(&mut d, &mut right, &mut right_inv, t, pj);

                let p = d[(t, t)];
                let mut dirty = false;
                for i in t + 1..m {
                    let q = d[(i, t)] / p;
                    if q != 0 {
                        d.add_row(i, t, -q);
                        left.add_row(i, t, -q);
                        left_inv.add_col(t, i, q);
                    }
                    dirty |= d[(i, t)] != 0;
                }
                for j in t + 1..n {
                    let q = d[(t, j)] / p;
                    if q != 0 {
                        d.add_col(j, t, -q);
                        right.add_col(j, t, -q);
                        right_inv.add_row(t, j, q);
                    }
                    dirty |= d[(t, j)] != 0;
                }
                if dirty {
                    continue;
                }
                // divisibility of the remaining block by the pivot
                let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| d[(i, j)] % p != 0));
                if let Some(i) = bad {
                    d.add_row(t, i, 1);
                    left.add_row(t, i, 1);
                    left_inv.add_col(i, t, -1);
                    continue;
                }
                break;
            }
            if d[(t, t)] == 0 {
                break;
            }
            if d[(t, t)] < 0 {
                d.negate_row(t);
                left.negate_row(t);
                left_inv.negate_col(t);
            }
            diagonal.push(d[(t, t)]);
        }
        Smith { left, left_inv, right, right_inv, d, diagonal }
    }

    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

/// Rank over ℚ of a set of integer vectors of common length `dim`.
pub fn rank(dim: usize, vectors: &[Vec<i64>]) -> usize {
    if vectors.is_empty() || dim == 0 {
        return 0;
    }
    Smith::new(&Matrix::from_rows(dim, vectors)).rank()
}

/// Basis of the left kernel `{x : x·A = 0}` (rows of the result).
pub fn left_kernel(a: &Matrix) -> Vec<Vec<i64>> {
    let s = Smith::new(a);
    (s.rank()..a.nrows()).map(|i| s.left.row(i).to_vec()).collect()
}

/// Basis of the right kernel `{y : A·y = 0}`, returned as vectors.
pub fn right_kernel(a: &Matrix) -> Vec<Vec<i64>> {
    let s = Smith::new(a);
    (s.rank()..a.ncols()).map(|j| s.right.column(j)).collect()
}

/// Integer solution `x` of `x·A = v`, if one exists.
pub fn solve_left(a: &Matrix, v: &[i64]) -> Option<Vec<i64>> {
    let s = Smith::new(a);
    solve_left_with(&s, a.nrows(), v)
}

/// Same as [`solve_left`] with a precomputed Smith form of `A`.
pub fn solve_left_with(s: &Smith, nrows: usize, v: &[i64]) -> Option<Vec<i64>> {
    // x·L⁻¹·D = v·R
    let w = s.right.left_apply(v);
    let mut y = vec![0; nrows];
    for (i, &wi) in w.iter().enumerate() {
        if i < s.rank() {
            if wi % s.diagonal[i] != 0 {
                return None;
            }
            y[i] = wi / s.diagonal[i];
        } else if wi != 0 {
            return None;
        }
    }
    Some(s.left.left_apply(&y))
}

/// A ℤ-basis of the lattice spanned by `gens` in `ℤⁿ`.
pub fn lattice_basis(n: usize, gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    if gens.is_empty() {
        return Vec::new();
    }
    let a = Matrix::from_rows(n, gens);
    let s = Smith::new(&a);
    s.left.mul(&a).to_rows().into_iter().take(s.rank()).collect()
}

pub fn gcd_all(values: impl IntoIterator<Item = i64>) -> i64 {
    values.into_iter().fold(0, |g, v| g.gcd(&v))
}

/// A finitely generated abelian group `ℤ^rank ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/dₛ`.
///
/// Elements are integer vectors: free coordinates first, then one
/// coordinate per torsion factor reduced into `[0, dᵢ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FGAbelianGroup {
    pub rank: usize,
    pub invariant_factors: Vec<i64>,
}

impl FGAbelianGroup {
    pub fn free(rank: usize) -> Self {
        Self { rank, invariant_factors: Vec::new() }
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    /// Length of the element vectors.
    pub fn dim(&self) -> usize {
        self.rank + self.invariant_factors.len()
    }

    pub fn torsion_order(&self) -> i64 {
        self.invariant_factors.iter().product()
    }

    pub fn has_torsion(&self) -> bool {
        !self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.invariant_factors.is_empty()
    }

    /// True if some invariant factor is divisible by `p`.
    pub fn has_p_torsion(&self, p: i64) -> bool {
        self.invariant_factors.iter().any(|d| d % p == 0)
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.dim()]
    }

    pub fn reduce(&self, mut x: Vec<i64>) -> Vec<i64> {
        for (i, d) in self.invariant_factors.iter().enumerate() {
            let c = &mut x[self.rank + i];
            *c = c.rem_euclid(*d);
        }
        x
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        self.reduce(a.iter().zip(b).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        self.reduce(a.iter().zip(b).map(|(x, y)| x - y).collect())
    }

    pub fn scale(&self, a: &[i64], k: i64) -> Vec<i64> {
        self.reduce(a.iter().map(|x| x * k).collect())
    }

    pub fn free_part<'a>(&self, a: &'a [i64]) -> &'a [i64] {
        &a[..self.rank]
    }

    pub fn torsion_part<'a>(&self, a: &'a [i64]) -> &'a [i64] {
        &a[self.rank..]
    }

    /// Relation rows `dᵢ·e_{rank+i}` presenting the torsion inside `ℤ^dim`.
    pub fn torsion_relations(&self) -> Vec<Vec<i64>> {
        self.invariant_factors
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let mut r = vec![0; self.dim()];
                r[self.rank + i] = *d;
                r
            })
            .collect()
    }

    /// All torsion elements (free part zero). Only sensible for tiny groups.
    pub fn torsion_elements(&self) -> Vec<Vec<i64>> {
        let mut out = vec![self.zero()];
        for (i, &d) in self.invariant_factors.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for e in &out {
                for c in 0..d {
                    let mut x = e.clone();
                    x[self.rank + i] = c;
                    next.push(x);
                }
            }
            out = next;
        }
        out
    }
}

impl std::fmt::Display for FGAbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// The quotient `ℤⁿ / ⟨relations⟩` together with the coordinate change
/// taking a vector of `ℤⁿ` to its class.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: FGAbelianGroup,
    smith: Smith,
    n: usize,
}

impl Quotient {
    pub fn new(n: usize, relations: &[Vec<i64>]) -> Quotient {
        let smith = Smith::new(&Matrix::from_rows(n, relations));
        let torsion: Vec<i64> = smith.diagonal.iter().copied().filter(|&d| d > 1).collect();
        let group = FGAbelianGroup { rank: n - smith.rank(), invariant_factors: torsion };
        Quotient { group, smith, n }
    }

    /// Class of `x ∈ ℤⁿ` in the quotient group.
    pub fn project(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.n);
        let y = self.smith.right.left_apply(x);
        let r = self.smith.rank();
        let mut out: Vec<i64> = y[r..].to_vec();
        for (i, &d) in self.smith.diagonal.iter().enumerate() {
            if d > 1 {
                out.push(y[i].rem_euclid(d));
            }
        }
        out
    }
}

/// Quotient of a group `G` by the subgroup generated by `gens`, returned as a
/// new group plus the projection of `G`-elements.
pub fn group_quotient(g: &FGAbelianGroup, gens: &[Vec<i64>]) -> Quotient {
    let mut rels = g.torsion_relations();
    rels.extend(gens.iter().cloned());
    Quotient::new(g.dim(), &rels)
}

/// Subgroup of `G` generated by `gens`, as an abstract group.
pub fn subgroup(g: &FGAbelianGroup, gens: &[Vec<i64>]) -> FGAbelianGroup {
    if gens.is_empty() {
        return FGAbelianGroup::trivial();
    }
    // ℤ^k → G, kernel K; the subgroup is ℤ^k / K.
    let k = gens.len();
    let mut rows: Vec<Vec<i64>> = gens.to_vec();
    for t in g.torsion_relations() {
        rows.push(t);
    }
    let ker = left_kernel(&Matrix::from_rows(g.dim(), &rows));
    let rels: Vec<Vec<i64>> = ker.into_iter().map(|v| v[..k].to_vec()).collect();
    Quotient::new(k, &rels).group
}

/// Membership of `v` in the subgroup of `G` generated by `gens`.
#[derive(Clone, Debug)]
pub struct SubgroupMembership {
    smith: Smith,
    nrows: usize,
}

impl SubgroupMembership {
    pub fn new(g: &FGAbelianGroup, gens: &[Vec<i64>]) -> Self {
        let mut rows: Vec<Vec<i64>> = gens.to_vec();
        rows.extend(g.torsion_relations());
        let m = Matrix::from_rows(g.dim(), &rows);
        Self { smith: Smith::new(&m), nrows: rows.len() }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        solve_left_with(&self.smith, self.nrows, v).is_some()
    }
}

/// Puts generator images into a canonical coordinate system: the free parts
/// are brought to lower-triangular column Hermite form, then torsion
/// coordinates of pivot generators are cleared where the pivot allows it.
pub fn canonicalize_images(g: &FGAbelianGroup, images: &mut [Vec<i64>]) {
    let r = g.rank;
    let n = images.len();
    let mut pivots: Vec<(usize, usize, i64)> = Vec::new();
    let mut c = 0;
    for i in 0..n {
        if c >= r {
            break;
        }
        // column Euclid on row i over columns c..r
        loop {
            let nz: Vec<usize> = (c..r).filter(|&j| images[i][j] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let &jmin = nz.iter().min_by_key(|&&j| images[i][j].abs()).unwrap();
            for &j in &nz {
                if j != jmin {
                    let q = images[i][j] / images[i][jmin];
                    for row in images.iter_mut() {
                        row[j] -= q * row[jmin];
                    }
                }
            }
        }
        let Some(j) = (c..r).find(|&j| images[i][j] != 0) else {
            continue;
        };
        for row in images.iter_mut() {
            row.swap(j, c);
        }
        if images[i][c] < 0 {
            for row in images.iter_mut() {
                row[c] = -row[c];
            }
        }
        let h = images[i][c];
        for cp in 0..c {
            let q = images[i][cp].div_euclid(h);
            if q != 0 {
                for row in images.iter_mut() {
                    row[cp] -= q * row[c];
                }
            }
        }
        pivots.push((i, c, h));
        c += 1;
    }

    // shifting the free basis vector e_c by a torsion element t changes
    // torsion coordinates by −f_c·t
    for &(i, c, h) in &pivots {
        for (j, &d) in g.invariant_factors.iter().enumerate() {
            let b = images[i][r + j].rem_euclid(d);
            if b == 0 {
                continue;
            }
            let gg = h.gcd(&d);
            if b % gg != 0 {
                continue;
            }
            let (hh, dd) = (h / gg, d / gg);
            let inv = mod_inverse(hh.rem_euclid(dd), dd).unwrap_or(0);
            let x = ((b / gg) * inv).rem_euclid(dd);
            for row in images.iter_mut() {
                row[r + j] = (row[r + j] - row[c] * x).rem_euclid(d);
            }
        }
    }
    for row in images.iter_mut() {
        for (j, &d) in g.invariant_factors.iter().enumerate() {
            row[r + j] = row[r + j].rem_euclid(d);
        }
    }
}

pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let e = a.extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_smith(a: &Matrix) {
        let s = Smith::new(a);
        assert_eq!(s.left.mul(a).mul(&s.right), s.d);
        assert_eq!(s.left_inv.mul(&s.d).mul(&s.right_inv), *a);
        assert_eq!(s.left.mul(&s.left_inv), Matrix::identity(a.nrows()));
        assert_eq!(s.right.mul(&s.right_inv), Matrix::identity(a.ncols()));
        for w in s.diagonal.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                if i != j || i >= s.rank() {
                    assert_eq!(s.d[(i, j)], 0);
                }
            }
        }
    }

    #[test]
    fn smith_small() {
        let a = Matrix::from_rows(3, &[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        check_smith(&a);
        assert_eq!(Smith::new(&a).diagonal, vec![2, 6, 12]);
    }

    #[test]
    fn quotient_two_lines() {
        // ℤ² / (2,-2) = ℤ ⊕ ℤ/2
        let q = Quotient::new(2, &[vec![2, -2]]);
        assert_eq!(q.group, FGAbelianGroup { rank: 1, invariant_factors: vec![2] });
    }

    #[test]
    fn canonical_two_lines() {
        let q = Quotient::new(2, &[vec![2, -2]]);
        let mut imgs = vec![q.project(&[1, 0]), q.project(&[0, 1])];
        canonicalize_images(&q.group, &mut imgs);
        assert_eq!(imgs, vec![vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn canonical_cusp() {
        let q = Quotient::new(2, &[vec![3, -2]]);
        let mut imgs = vec![q.project(&[1, 0]), q.project(&[0, 1])];
        canonicalize_images(&q.group, &mut imgs);
        assert_eq!(imgs, vec![vec![2], vec![3]]);
    }

    #[test]
    fn kernels_and_solving() {
        let a = Matrix::from_rows(2, &[vec![1, 1], vec![2, 2], vec![0, 3]]);
        for k in left_kernel(&a) {
            assert_eq!(a.left_apply(&k), vec![0, 0]);
        }
        assert_eq!(left_kernel(&a).len(), 1);
        let x = solve_left(&a, &[3, 6]).unwrap();
        assert_eq!(a.left_apply(&x), vec![3, 6]);
        assert!(solve_left(&a, &[1, 2]).is_none());
        let b = Matrix::from_rows(3, &[vec![1, 2, 3]]);
        let rk = right_kernel(&b);
        assert_eq!(rk.len(), 2);
        for y in rk {
            assert_eq!(y.iter().zip([1, 2, 3]).map(|(a, b)| a * b).sum::<i64>(), 0);
        }
    }

    #[test]
    fn subgroup_torsion() {
        let g = FGAbelianGroup { rank: 1, invariant_factors: vec![2] };
        let s = subgroup(&g, &[vec![0, 1]]);
        assert_eq!(s, FGAbelianGroup { rank: 0, invariant_factors: vec![2] });
        let s = subgroup(&g, &[vec![2, 0], vec![1, 1]]);
        assert_eq!(s, FGAbelianGroup { rank: 1, invariant_factors: vec![] });
    }

    proptest! {
        #[test]
        fn smith_reconstructs(rows in 1usize..5, cols in 1usize..5, seed in proptest::collection::vec(-9i64..10, 25)) {
            let data: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 5 + j]).collect()).collect();
            check_smith(&Matrix::from_rows(cols, &data));
        }
    }
}
