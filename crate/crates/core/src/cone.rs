//! Rational polyhedral cones spanned by finitely many integer vectors.
//!
//! Facets are found by brute force over `(d−1)`-subsets of the spanning
//! vectors, which is plenty for the handful of generators we deal with.
//! Faces are the intersections of facets, reported as sets of indices into
//! the spanning vectors.

use std::collections::BTreeSet;

use crate::lattice::{gcd_all, rank, right_kernel, Matrix, Smith};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    /// Indices of spanning vectors lying on the facet.
    pub members: Vec<usize>,
    /// Primitive integer functional, zero on the facet and ≥ 0 on the cone.
    pub normal: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct Cone {
    ambient: usize,
    vectors: Vec<Vec<i64>>,
    rank: usize,
    facets: Vec<Facet>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("lattice point coordinate {value} exceeds the degree cap {cap}")]
pub struct CapExceeded {
    pub value: i64,
    pub cap: i64,
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// All `k`-element subsets of `0..n`, in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl Cone {
    pub fn new(ambient: usize, vectors: Vec<Vec<i64>>) -> Cone {
        let rk = rank(ambient, &vectors);
        let mut facets: Vec<Facet> = Vec::new();
        if rk > 0 {
            for subset in subsets(vectors.len(), rk - 1) {
                let rows: Vec<Vec<i64>> = subset.iter().map(|&i| vectors[i].clone()).collect();
                if rank(ambient, &rows) != rk - 1 {
                    continue;
                }
                let kernel = if rows.is_empty() {
                    (0..ambient)
                        .map(|i| {
                            let mut e = vec![0; ambient];
                            e[i] = 1;
                            e
                        })
                        .collect()
                } else {
                    right_kernel(&Matrix::from_rows(ambient, &rows))
                };
                let Some(mut normal) = kernel.into_iter().find(|n| vectors.iter().any(|v| dot(n, v) != 0)) else {
                    continue;
                };
                let values: Vec<i64> = vectors.iter().map(|v| dot(&normal, v)).collect();
                let pos = values.iter().any(|&x| x > 0);
                let neg = values.iter().any(|&x| x < 0);
                if pos && neg {
                    continue;
                }
                let g = gcd_all(normal.iter().copied());
                let sign = if neg { -1 } else { 1 };
                for c in normal.iter_mut() {
                    *c = sign * *c / g;
                }
                let members: Vec<usize> = (0..vectors.len()).filter(|&i| values[i] == 0).collect();
                if !facets.iter().any(|f| f.members == members) {
                    facets.push(Facet { members, normal });
                }
            }
        }
        facets.sort_by(|a, b| a.members.cmp(&b.members));
        Cone { ambient, vectors, rank: rk, facets }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.rank
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// All faces as sorted index sets, ordered by size then lexicographically.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.vectors.len()).collect();
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        set.insert(all);
        let mut frontier: Vec<Vec<usize>> = self.facets.iter().map(|f| f.members.clone()).collect();
        for f in &frontier {
            set.insert(f.clone());
        }
        while let Some(face) = frontier.pop() {
            for facet in &self.facets {
                let meet: Vec<usize> = face.iter().copied().filter(|i| facet.members.contains(i)).collect();
                if set.insert(meet.clone()) {
                    frontier.push(meet);
                }
            }
        }
        let mut faces: Vec<Vec<usize>> = set.into_iter().collect();
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        faces
    }

    /// The minimal face: spanning vectors in the lineality space.
    pub fn lineality(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.vectors.len()).collect();
        for f in &self.facets {
            idx.retain(|i| f.members.contains(i));
        }
        idx
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality().iter().all(|&i| self.vectors[i].iter().all(|&c| c == 0))
    }

    /// Integer functional vanishing on the lineality space and strictly
    /// positive on every spanning vector outside it.
    pub fn grading(&self) -> Vec<i64> {
        let mut g = vec![0; self.ambient];
        for f in &self.facets {
            for (a, b) in g.iter_mut().zip(&f.normal) {
                *a += b;
            }
        }
        g
    }

    pub fn in_span(&self, x: &[i64]) -> bool {
        let mut rows = self.vectors.clone();
        rows.push(x.to_vec());
        rank(self.ambient, &rows) == self.rank
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.in_span(x) && self.facets.iter().all(|f| dot(&f.normal, x) >= 0)
    }

    /// A generating set of the monoid `C ∩ ℤⁿ`.
    ///
    /// Every lattice point of the cone is a nonnegative integer combination
    /// of the spanning vectors plus a lattice point of some half-open
    /// parallelepiped spanned by a basis chosen among them; those points are
    /// enumerated exactly through the Smith form of the basis. For pointed
    /// cones the result is reduced to the Hilbert basis.
    pub fn lattice_generators(&self, cap: i64) -> Result<Vec<Vec<i64>>, CapExceeded> {
        let nonzero: Vec<usize> =
            (0..self.vectors.len()).filter(|&i| self.vectors[i].iter().any(|&c| c != 0)).collect();
        let mut cands: BTreeSet<Vec<i64>> = nonzero.iter().map(|&i| self.vectors[i].clone()).collect();
        let d = self.rank;
        if d > 0 {
            for sub in subsets(nonzero.len(), d) {
                let basis: Vec<Vec<i64>> = sub.iter().map(|&k| self.vectors[nonzero[k]].clone()).collect();
                if rank(self.ambient, &basis) != d {
                    continue;
                }
                for p in parallelepiped_points(self.ambient, &basis) {
                    cands.insert(p);
                }
            }
        }
        for c in &cands {
            if let Some(&v) = c.iter().find(|v| v.abs() > cap) {
                return Err(CapExceeded { value: v, cap });
            }
        }
        let cands: Vec<Vec<i64>> = cands.into_iter().collect();
        if !self.is_pointed() {
            return Ok(cands);
        }
        let reducible = |c: &Vec<i64>| {
            cands.iter().any(|o| {
                o != c && {
                    let diff: Vec<i64> = c.iter().zip(o).map(|(a, b)| a - b).collect();
                    self.contains(&diff)
                }
            })
        };
        Ok(cands.iter().filter(|c| !reducible(c)).cloned().collect())
    }
}

/// Nonzero lattice points `Σ λᵢ bᵢ` with `0 ≤ λᵢ < 1` for a linearly
/// independent integer basis `b`.
pub fn parallelepiped_points(ambient: usize, basis: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let k = basis.len();
    let s = Smith::new(&Matrix::from_rows(ambient, basis));
    debug_assert_eq!(s.rank(), k);
    let diag = &s.diagonal;
    let top = *diag.last().unwrap_or(&1);
    let mut out = Vec::new();
    let mut c = vec![0i64; k];
    loop {
        if c.iter().any(|&x| x != 0) {
            // μ·top = Σᵢ cᵢ·(top/dᵢ)·L[i,·]
            let mut mu = vec![0i64; k];
            for i in 0..k {
                if c[i] == 0 {
                    continue;
                }
                let w = c[i] * (top / diag[i]);
                for (b, m) in mu.iter_mut().enumerate() {
                    *m += w * s.left[(i, b)];
                }
            }
            let mut x = vec![0i64; ambient];
            for (b, m) in mu.iter().enumerate() {
                let frac = m.rem_euclid(top);
                for (xi, bi) in x.iter_mut().zip(&basis[b]) {
                    *xi += frac * bi;
                }
            }
            debug_assert!(x.iter().all(|v| v % top == 0));
            for v in x.iter_mut() {
                *v /= top;
            }
            if x.iter().any(|&v| v != 0) {
                out.push(x);
            }
        }
        // odometer over ∏ [0, dᵢ)
        let mut i = 0;
        while i < k {
            c[i] += 1;
            if c[i] < diag[i] {
                break;
            }
            c[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    out
}
