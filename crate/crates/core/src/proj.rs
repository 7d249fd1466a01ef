//! Projective spaces `PG(n, F)`: canonical points, canonical subspaces (RREF
//! bases) and exhaustive subspace enumeration.
//!
//! The RREF basis of a subspace is its deduplication key everywhere in the
//! crate: two subspaces are equal iff their RREF bases are equal.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Elem, Field, FieldError};
use crate::linalg::{self, Matrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjError {
    #[error("the zero vector is not a projective point")]
    ZeroVector,
    #[error("ambient spaces differ: PG({0}) vs PG({1})")]
    AmbientMismatch(usize, usize),
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("enumeration of {count} subspaces exceeds the budget of {budget}")]
    Budget { count: u128, budget: u128 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Default cap on the number of subspaces a single enumeration may yield.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

/// A point of `PG(n, F)` whose first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjPoint {
    coords: Vec<Elem>,
}

impl ProjPoint {
    pub fn new(field: &Field, v: &[Elem]) -> Result<ProjPoint, ProjError> {
        for &x in v {
            field.check(x)?;
        }
        normalize(field, v)
    }

    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Elem> {
        self.coords
    }

    /// Projective dimension of the ambient space.
    pub fn ambient(&self) -> usize {
        self.coords.len() - 1
    }

    /// Coordinatewise `x -> x^(s^i)`, `s = p^sub_degree`, re-normalised.
    pub fn conjugate(&self, field: &Field, i: u32, sub_degree: u32) -> Result<ProjPoint, ProjError> {
        let v = self
            .coords
            .iter()
            .map(|&x| field.frobenius(x, sub_degree, i))
            .collect::<Result<Vec<_>, _>>()?;
        normalize(field, &v)
    }
}

/// Canonical representative of the projective point spanned by `v`.
pub fn normalize(field: &Field, v: &[Elem]) -> Result<ProjPoint, ProjError> {
    let lead = v.iter().copied().find(|&x| x != 0).ok_or(ProjError::ZeroVector)?;
    let coords = if lead == 1 {
        v.to_vec()
    } else {
        let inv = field.inv(lead)?;
        v.iter().map(|&x| field.mul(x, inv)).collect()
    };
    Ok(ProjPoint { coords })
}

/// In-place variant used in hot loops; returns false for the zero vector.
pub fn normalize_in_place(field: &Field, v: &mut [Elem]) -> bool {
    let Some(lead) = v.iter().copied().find(|&x| x != 0) else {
        return false;
    };
    if lead != 1 {
        let inv = field.inv(lead).expect("nonzero");
        for x in v.iter_mut() {
            *x = field.mul(*x, inv);
        }
    }
    true
}

/// A subspace of `PG(n, F)` stored by its RREF basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

/// Wire form: ambient projective dimension plus row-major basis encodings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceRecord {
    pub ambient: usize,
    pub field_order: u32,
    pub rows: Vec<Vec<Elem>>,
}

impl Subspace {
    /// Span of the given vectors in `PG(ambient, F)`.
    pub fn from_rows<R: AsRef<[Elem]>>(
        field: &Field,
        ambient: usize,
        rows: &[R],
    ) -> Result<Subspace, ProjError> {
        let mut m = Matrix::empty(ambient + 1);
        for r in rows {
            let r = r.as_ref();
            if r.len() != ambient + 1 {
                return Err(ProjError::AmbientMismatch(ambient, r.len().saturating_sub(1)));
            }
            for &x in r {
                field.check(x)?;
            }
            m.push_row(r);
        }
        linalg::rref(field, &mut m);
        Ok(Subspace { ambient, basis: m })
    }

    /// Wraps a matrix already known to be in RREF with no zero rows.
    pub(crate) fn from_rref_unchecked(ambient: usize, basis: Matrix) -> Subspace {
        debug_assert_eq!(basis.cols(), ambient + 1);
        Subspace { ambient, basis }
    }

    pub fn empty(ambient: usize) -> Subspace {
        Subspace { ambient, basis: Matrix::empty(ambient + 1) }
    }

    pub fn whole(ambient: usize) -> Subspace {
        Subspace { ambient, basis: Matrix::identity(ambient + 1) }
    }

    pub fn from_point(p: &ProjPoint) -> Subspace {
        let basis = Matrix::from_rows(&[p.coords()]).expect("single row");
        Subspace { ambient: p.ambient(), basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Vector-space dimension (number of basis rows).
    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// Projective dimension; the empty subspace has dimension -1.
    pub fn dim(&self) -> isize {
        self.basis.rows() as isize - 1
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .row_iter()
            .map(|r| r.iter().position(|&x| x != 0).expect("RREF rows are nonzero"))
            .collect()
    }

    /// Reduces `v` against the RREF basis; the result is zero iff `v` lies in the span.
    fn reduce(&self, field: &Field, v: &mut [Elem]) {
        for row in self.basis.row_iter() {
            let pc = row.iter().position(|&x| x != 0).expect("nonzero row");
            let f = v[pc];
            if f != 0 {
                for (x, &b) in v.iter_mut().zip(row) {
                    *x = field.sub(*x, field.mul(f, b));
                }
            }
        }
    }

    pub fn contains_vector(&self, field: &Field, v: &[Elem]) -> bool {
        assert_eq!(v.len(), self.ambient + 1, "vector length");
        let mut w = v.to_vec();
        self.reduce(field, &mut w);
        w.iter().all(|&x| x == 0)
    }

    pub fn contains(&self, field: &Field, p: &ProjPoint) -> bool {
        self.contains_vector(field, p.coords())
    }

    pub fn contains_subspace(&self, field: &Field, other: &Subspace) -> bool {
        other.basis.row_iter().all(|r| self.contains_vector(field, r))
    }

    /// All points of the subspace over `field`, which may be an extension of the
    /// field the basis was written over. Points come out canonical.
    pub fn points<'a>(&'a self, field: &'a Field) -> impl Iterator<Item = ProjPoint> + 'a {
        let k = self.rank();
        projective_vectors(field.order(), k).map(move |coeffs| ProjPoint {
            coords: combine(field, &coeffs, &self.basis),
        })
    }

    /// Number of points over a field of order `q`.
    pub fn num_points(&self, q: u32) -> u128 {
        gaussian_binomial(self.rank(), 1, q as u128)
    }

    pub fn span(&self, field: &Field, other: &Subspace) -> Result<Subspace, ProjError> {
        if self.ambient != other.ambient {
            return Err(ProjError::AmbientMismatch(self.ambient, other.ambient));
        }
        let mut m = self.basis.clone();
        for r in other.basis.row_iter() {
            m.push_row(r);
        }
        linalg::rref(field, &mut m);
        Ok(Subspace { ambient: self.ambient, basis: m })
    }

    /// Intersection via annihilators: `A ∩ B = (A^⊥ + B^⊥)^⊥`.
    pub fn meet(&self, field: &Field, other: &Subspace) -> Result<Subspace, ProjError> {
        if self.ambient != other.ambient {
            return Err(ProjError::AmbientMismatch(self.ambient, other.ambient));
        }
        let mut dual = linalg::kernel(field, &self.basis);
        for r in linalg::kernel(field, &other.basis).row_iter() {
            dual.push_row(r);
        }
        let mut m = linalg::kernel(field, &dual);
        linalg::rref(field, &mut m);
        Ok(Subspace { ambient: self.ambient, basis: m })
    }

    /// Coordinatewise Frobenius image of the subspace, re-canonicalised.
    pub fn conjugate(&self, field: &Field, i: u32, sub_degree: u32) -> Result<Subspace, ProjError> {
        field.frobenius(0, sub_degree, i)?;
        let mut m = self.basis.map(|x| field.frobenius_unchecked(x, sub_degree, i));
        linalg::rref(field, &mut m);
        Ok(Subspace { ambient: self.ambient, basis: m })
    }

    /// Applies the row-vector action `v -> v M` and re-canonicalises.
    pub fn transform(&self, field: &Field, m: &Matrix) -> Result<Subspace, ProjError> {
        let mut b = self.basis.mul(field, m).map_err(|e| ProjError::InvalidDimension(e.to_string()))?;
        linalg::rref(field, &mut b);
        Ok(Subspace { ambient: self.ambient, basis: b })
    }

    /// Whether every basis entry lies in the tower level `sub`.
    pub fn is_rational_over(&self, sub: &Field) -> bool {
        self.basis.data().iter().all(|&x| sub.contains(x))
    }

    pub fn to_record(&self, field: &Field) -> SubspaceRecord {
        SubspaceRecord {
            ambient: self.ambient,
            field_order: field.order(),
            rows: self.basis.to_rows(),
        }
    }

    pub fn from_record(field: &Field, rec: &SubspaceRecord) -> Result<Subspace, ProjError> {
        if rec.field_order != field.order() {
            return Err(ProjError::InvalidDimension(format!(
                "record over a field of order {}, expected {}",
                rec.field_order,
                field.order()
            )));
        }
        Subspace::from_rows(field, rec.ambient, &rec.rows)
    }
}

/// Linear combination `sum coeffs[i] * rows[i]`.
pub fn combine(field: &Field, coeffs: &[Elem], basis: &Matrix) -> Vec<Elem> {
    linalg::vec_mul(field, coeffs, basis)
}

/// Canonical vectors of length `k` over a field of order `q`: every point of
/// `PG(k-1, q)` once, in lexicographic order of (leading position, tail).
pub fn projective_vectors(q: u32, k: usize) -> impl Iterator<Item = Vec<Elem>> {
    (0..k).flat_map(move |lead| {
        let tail = k - lead - 1;
        let count = (q as u64).pow(tail as u32);
        (0..count).map(move |idx| {
            let mut v = vec![0; k];
            v[lead] = 1;
            let mut x = idx;
            for slot in v[lead + 1..].iter_mut().rev() {
                *slot = (x % q as u64) as Elem;
                x /= q as u64;
            }
            v
        })
    })
}

/// All points of `PG(n, F)` in canonical order.
pub fn points_of_space(field: &Field, n: usize) -> impl Iterator<Item = ProjPoint> {
    projective_vectors(field.order(), n + 1).map(|coords| ProjPoint { coords })
}

/// Position of a canonical point in [`points_of_space`] order.
pub fn point_index(q: u32, coords: &[Elem]) -> u64 {
    let k = coords.len();
    let lead = coords.iter().position(|&x| x != 0).expect("canonical point");
    let q = q as u64;
    let mut offset = 0u64;
    for l in 0..lead {
        offset += q.pow((k - l - 1) as u32);
    }
    let tail = coords[lead + 1..].iter().fold(0u64, |acc, &x| acc * q + x as u64);
    offset + tail
}

/// Gaussian binomial `[n choose k]_q`: the number of `k`-dimensional vector
/// subspaces of `F_q^n`.
pub fn gaussian_binomial(n: usize, k: usize, q: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// Pivot columns of one RREF shape together with the number of subspaces of that shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PivotPattern {
    pub pivots: Vec<usize>,
    /// Free (row, column) positions, in row-major order.
    pub free: Vec<(usize, usize)>,
    pub count: u128,
}

/// Restartable position inside a subspace stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubspaceCursor {
    pub pattern: usize,
    pub offset: u128,
}

/// Deterministic enumeration of all `k`-dimensional projective subspaces of
/// `PG(n, F)`: pivot patterns in lexicographic order, then free entries in
/// lexicographic order (last free entry fastest).
#[derive(Clone, Debug)]
pub struct SubspaceEnumerator {
    field: Field,
    n: usize,
    k: usize,
    patterns: Vec<PivotPattern>,
    starts: Vec<u128>,
    total: u128,
}

impl SubspaceEnumerator {
    pub fn new(field: &Field, n: usize, k: usize, budget: u128) -> Result<Self, ProjError> {
        if k > n {
            return Err(ProjError::InvalidDimension(format!(
                "subspaces of dimension {k} in PG({n})"
            )));
        }
        let q = field.order() as u128;
        let total = gaussian_binomial(n + 1, k + 1, q);
        if total > budget {
            return Err(ProjError::Budget { count: total, budget });
        }
        let mut patterns = Vec::new();
        for pivots in combinations(n + 1, k + 1) {
            let mut free = Vec::new();
            for (r, &pc) in pivots.iter().enumerate() {
                for c in pc + 1..=n {
                    if !pivots.contains(&c) {
                        free.push((r, c));
                    }
                }
            }
            let count = q.pow(free.len() as u32);
            patterns.push(PivotPattern { pivots, free, count });
        }
        let mut starts = Vec::with_capacity(patterns.len());
        let mut acc = 0u128;
        for p in &patterns {
            starts.push(acc);
            acc += p.count;
        }
        debug_assert_eq!(acc, total);
        Ok(SubspaceEnumerator { field: field.clone(), n, k, patterns, starts, total })
    }

    pub fn count(&self) -> u128 {
        self.total
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn subspace_dim(&self) -> usize {
        self.k
    }

    pub fn patterns(&self) -> &[PivotPattern] {
        &self.patterns
    }

    pub fn cursor_of(&self, index: u128) -> SubspaceCursor {
        let pattern = match self.starts.binary_search(&index) {
            Ok(mut i) => {
                // skip empty patterns (only possible for q = 1, which cannot occur)
                while self.patterns[i].count == 0 {
                    i += 1;
                }
                i
            }
            Err(i) => i - 1,
        };
        SubspaceCursor { pattern, offset: index - self.starts[pattern] }
    }

    pub fn index_of(&self, cursor: SubspaceCursor) -> u128 {
        self.starts[cursor.pattern] + cursor.offset
    }

    /// The subspace at global position `index`.
    pub fn get(&self, index: u128) -> Subspace {
        assert!(index < self.total, "index out of range");
        let cur = self.cursor_of(index);
        let pat = &self.patterns[cur.pattern];
        let q = self.field.order() as u128;
        let mut m = Matrix::zeros(self.k + 1, self.n + 1);
        for (r, &pc) in pat.pivots.iter().enumerate() {
            m.set(r, pc, 1);
        }
        let mut x = cur.offset;
        for &(r, c) in pat.free.iter().rev() {
            m.set(r, c, (x % q) as Elem);
            x /= q;
        }
        Subspace::from_rref_unchecked(self.n, m)
    }

    pub fn iter(&self) -> impl Iterator<Item = Subspace> + '_ {
        (0..self.total).map(move |i| self.get(i))
    }

    /// Subspaces with global index in `range`; used to partition work.
    pub fn iter_range(&self, range: std::ops::Range<u128>) -> impl Iterator<Item = Subspace> + '_ {
        let end = range.end.min(self.total);
        (range.start..end).map(move |i| self.get(i))
    }

    /// Global index of a subspace of the right dimension (inverse of [`Self::get`]).
    pub fn index_of_subspace(&self, s: &Subspace) -> Option<u128> {
        if s.ambient != self.n || s.rank() != self.k + 1 {
            return None;
        }
        let pivots = s.pivots();
        let pi = self.patterns.iter().position(|p| p.pivots == pivots)?;
        let q = self.field.order() as u128;
        let offset = self.patterns[pi]
            .free
            .iter()
            .fold(0u128, |acc, &(r, c)| acc * q + s.basis.get(r, c) as u128);
        Some(self.starts[pi] + offset)
    }
}

/// `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] != i + n - k {
                break;
            }
            if i == 0 && c[0] == n - k {
                return out;
            }
        }
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}
