//! Spread sets of `n x n` matrices, their spreads `S(A) = {(x, xA)}` of
//! `PG(2n - 1, q)`, the Desarguesian construction in a trace-self-dual basis,
//! transport of symmetric spread sets to linear sets of `PG(5, q^2)`, and the
//! presemifield `x ∘ y = x M(y)` with its nuclei.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Elem, Field, FieldError, Tower, TowerDescriptor};
use crate::linalg::{self, LinalgError, Matrix};
use crate::linset::{self, linset_points, LinearSetSpec, LinsetContext, LinsetError};
use crate::proj::{self, ProjError, ProjPoint, Subspace};
use crate::veronese::SymPoint;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpreadError {
    #[error("no trace-self-dual basis of F_{ext} over F_{sub}")]
    NoSelfDualBasis { ext: u32, sub: u32 },
    #[error("F_{ext} is not an extension of degree {degree} of F_{sub} in one tower")]
    BadExtension { ext: u32, sub: u32, degree: u32 },
    #[error("not a spread set: {0}")]
    NotASpread(String),
    #[error("not a semifield spread set")]
    NotASemifield,
    #[error("spread set member {0} is not symmetric")]
    NotSymmetric(usize),
    #[error("spread set spans F_q-dimension {found}, expected {expected}")]
    WrongDimension { found: usize, expected: usize },
    #[error("{elements} elements exceed the brute-force budget {budget}")]
    Budget { elements: u64, budget: u64 },
    #[error("malformed spread set: {0}")]
    Malformed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Proj(#[from] ProjError),
    #[error(transparent)]
    Linset(#[from] LinsetError),
}

pub type Result<T> = std::result::Result<T, SpreadError>;

/// Brute-force cap on presemifield size.
pub const PRESEMIFIELD_BUDGET: u64 = 1 << 12;
/// Cap on the number of points of the affine plane built by [`spread_cover`].
pub const AFFINE_POINT_BUDGET: u64 = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpreadSet {
    pub n: usize,
    pub field: Field,
    pub matrices: Vec<Matrix>,
}

/// A field level inside a serialized tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDesc {
    pub tower: TowerDescriptor,
    pub level: usize,
}

impl FieldDesc {
    pub fn of(field: &Field) -> FieldDesc {
        FieldDesc { tower: field.tower().descriptor(), level: field.level() }
    }

    pub fn build(&self) -> Result<Field> {
        Ok(Tower::from_descriptor(&self.tower)?.field(self.level)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadSetRecord {
    pub n: usize,
    pub field: FieldDesc,
    /// Row-major entries of each matrix.
    pub matrices: Vec<Vec<Elem>>,
}

impl SpreadSet {
    pub fn new(field: &Field, n: usize, matrices: Vec<Matrix>) -> Result<SpreadSet> {
        for (i, m) in matrices.iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(SpreadError::Malformed(format!("matrix {i} is not {n}x{n}")));
            }
            if let Some(&x) = m.data().iter().find(|&&x| !field.contains(x)) {
                return Err(SpreadError::Malformed(format!("matrix {i} has entry {x} outside F_{}", field.order())));
            }
        }
        Ok(SpreadSet { n, field: field.clone(), matrices })
    }

    pub fn to_record(&self) -> SpreadSetRecord {
        SpreadSetRecord {
            n: self.n,
            field: FieldDesc::of(&self.field),
            matrices: self.matrices.iter().map(|m| m.data().to_vec()).collect(),
        }
    }

    pub fn from_record(rec: &SpreadSetRecord) -> Result<SpreadSet> {
        let field = rec.field.build()?;
        let ms = rec
            .matrices
            .iter()
            .map(|d| Matrix::from_vec(rec.n, rec.n, d.clone()).map_err(SpreadError::from))
            .collect::<Result<Vec<_>>>()?;
        SpreadSet::new(&field, rec.n, ms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("record serializes")
    }

    pub fn from_json(s: &str) -> Result<SpreadSet> {
        let rec: SpreadSetRecord = serde_json::from_str(s).map_err(|e| SpreadError::Malformed(e.to_string()))?;
        SpreadSet::from_record(&rec)
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }
}

fn check_extension(ext: &Field, sub: &Field, degree: u32) -> Result<()> {
    if !ext.same_tower(sub) || ext.degree() != degree * sub.degree() {
        return Err(SpreadError::BadExtension { ext: ext.order(), sub: sub.order(), degree });
    }
    Ok(())
}

/// First basis `(b0, b1, b2)` of `ext` over `sub` with `Tr(b_i b_j) = δ_ij`,
/// in lexicographic order of encodings.
pub fn self_dual_basis(ext: &Field, sub: &Field) -> Result<[Elem; 3]> {
    check_extension(ext, sub, 3)?;
    let sd = sub.degree();
    let tr = |x: Elem| ext.trace(x, sd).expect("same tower");
    let unit: Vec<Elem> = ext.elements().filter(|&b| b != 0 && tr(ext.mul(b, b)) == 1).collect();
    for &b0 in &unit {
        for &b1 in unit.iter().filter(|&&b| tr(ext.mul(b0, b)) == 0) {
            for &b2 in unit.iter().filter(|&&b| tr(ext.mul(b0, b)) == 0 && tr(ext.mul(b1, b)) == 0) {
                if ext.subfield_rank(&[b0, b1, b2], sub)? == 3 {
                    return Ok([b0, b1, b2]);
                }
            }
        }
    }
    Err(SpreadError::NoSelfDualBasis { ext: ext.order(), sub: sub.order() })
}

/// Multiplication-by-`c` matrices of the cubic extension in a self-dual basis:
/// `M(c)_ij = Tr(b_i c b_j)`, listed in encoding order of `c`. All are symmetric.
pub fn desarguesian_spread_set(ext: &Field, sub: &Field) -> Result<SpreadSet> {
    let b = self_dual_basis(ext, sub)?;
    let sd = sub.degree();
    let matrices = ext
        .elements()
        .map(|c| {
            let mut m = Matrix::zeros(3, 3);
            for i in 0..3 {
                for j in 0..3 {
                    let v = ext.mul(ext.mul(b[i], c), b[j]);
                    m.set(i, j, ext.trace(v, sd).expect("same tower"));
                }
            }
            m
        })
        .collect();
    SpreadSet::new(sub, 3, matrices)
}

/// Multiplication matrices of `ext` over `sub` in the power basis of the
/// encoding (row `i` holds the coordinates of `b_i c`); any degree.
pub fn field_spread_set(ext: &Field, sub: &Field) -> Result<SpreadSet> {
    if !ext.same_tower(sub) || ext.degree() % sub.degree() != 0 {
        return Err(SpreadError::BadExtension { ext: ext.order(), sub: sub.order(), degree: 0 });
    }
    let n = (ext.degree() / sub.degree()) as usize;
    let basis: Vec<Elem> = (0..n).map(|i| sub.order().pow(i as u32)).collect();
    let matrices = ext
        .elements()
        .map(|c| {
            let rows: Vec<Vec<Elem>> = basis.iter().map(|&bi| ext.coordinates(ext.mul(bi, c), sub)).collect();
            Matrix::from_rows(&rows).expect("square")
        })
        .collect();
    SpreadSet::new(sub, n, matrices)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadFlags {
    /// `|C| = q^n`.
    pub full_size: bool,
    pub zero_present: bool,
    /// All pairwise differences are nonsingular.
    pub spread: bool,
    /// Closed under addition.
    pub additive: bool,
    /// `spread`, `full_size` and `additive`.
    pub semifield: bool,
    /// All members symmetric.
    pub symplectic: bool,
    /// All members alternating (skew-symmetric with zero diagonal).
    pub alternating: bool,
    /// `spread`, `alternating`, even matrix size `m` and `|C| = q^(m-1)`.
    pub kerdock: bool,
}

pub fn validate_spread_set(c: &SpreadSet) -> SpreadFlags {
    let f = &c.field;
    let q = f.order() as u128;
    let size = c.matrices.len() as u128;
    let full_size = q.checked_pow(c.n as u32) == Some(size);
    let zero_present = c.matrices.iter().any(|m| m.is_zero());
    let distinct = c.matrices.iter().collect::<HashSet<_>>().len() == c.matrices.len();
    let spread = distinct
        && (0..c.matrices.len()).into_par_iter().all(|i| {
            c.matrices[i + 1..].iter().all(|b| {
                let d = c.matrices[i].sub(f, b).expect("same shape");
                linalg::determinant(f, &d).expect("square") != 0
            })
        });
    let set: HashSet<&Matrix> = c.matrices.iter().collect();
    let additive = c.matrices.par_iter().all(|a| {
        c.matrices.iter().all(|b| set.contains(&a.add(f, b).expect("same shape")))
    });
    let symplectic = c.matrices.iter().all(|m| m.is_symmetric());
    let alternating = c.matrices.iter().all(|m| m.is_alternating(f));
    let kerdock = spread
        && alternating
        && c.n % 2 == 0
        && c.n >= 2
        && q.checked_pow(c.n as u32 - 1) == Some(size);
    SpreadFlags {
        full_size,
        zero_present,
        spread,
        additive,
        semifield: spread && full_size && additive,
        symplectic,
        alternating,
        kerdock,
    }
}

/// `β((x1, y1), (x2, y2)) = x1 y2^T - y1 x2^T` on `F_q^{2n}`.
pub fn symplectic_form(field: &Field, u: &[Elem], v: &[Elem]) -> Elem {
    let n = u.len() / 2;
    field.sub(linalg::dot(field, &u[..n], &v[n..]), linalg::dot(field, &u[n..], &v[..n]))
}

/// `S(A) = {(x, xA)}` as a subspace of `PG(2n - 1, q)`.
pub fn s_of(field: &Field, a: &Matrix) -> Result<Subspace> {
    let n = a.rows();
    let rows: Vec<Vec<Elem>> = (0..n)
        .map(|i| {
            let mut r = vec![0; 2 * n];
            r[i] = 1;
            r[n..].copy_from_slice(a.row(i));
            r
        })
        .collect();
    Ok(Subspace::from_rows(field, 2 * n - 1, &rows)?)
}

/// `S(∞) = {(0, x)}`.
pub fn s_infinity(field: &Field, n: usize) -> Result<Subspace> {
    let rows: Vec<Vec<Elem>> = (0..n)
        .map(|i| {
            let mut r = vec![0; 2 * n];
            r[n + i] = 1;
            r
        })
        .collect();
    Ok(Subspace::from_rows(field, 2 * n - 1, &rows)?)
}

/// A pair of basis vectors of `s` with nonzero `β`, if any.
pub fn isotropy_witness(field: &Field, s: &Subspace) -> Option<(Vec<Elem>, Vec<Elem>)> {
    let b = s.basis();
    for i in 0..b.rows() {
        for j in i + 1..b.rows() {
            if symplectic_form(field, b.row(i), b.row(j)) != 0 {
                return Some((b.row(i).to_vec(), b.row(j).to_vec()));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffinePlaneCheck {
    pub points: u64,
    pub lines: u64,
    /// Every two distinct points lie on exactly one line.
    pub unique_joins: bool,
    /// Each of the `q^n + 1` parallel classes partitions the points into `q^n` lines.
    pub parallel_classes: bool,
}

impl AffinePlaneCheck {
    pub fn holds(&self) -> bool {
        self.unique_joins && self.parallel_classes
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpreadCover {
    /// `S(A)` for each member in order, then `S(∞)`.
    pub subspaces: Vec<Subspace>,
    /// Every point of `PG(2n - 1, q)` lies in exactly one subspace.
    pub partition: bool,
    /// Every subspace is totally isotropic for `β`.
    pub isotropic: bool,
    /// Translation plane axioms, when the plane has at most [`AFFINE_POINT_BUDGET`] points.
    pub affine_plane: Option<AffinePlaneCheck>,
}

/// Builds the spread of a spread set and checks the partition property,
/// isotropy, and (for tiny cases) the affine plane axioms. The partition is
/// counted point by point, independently of [`validate_spread_set`]; the
/// affine plane is only built when it is a partition.
pub fn spread_cover(c: &SpreadSet) -> Result<SpreadCover> {
    let f = &c.field;
    let n = c.n;
    let q = f.order();
    let mut subspaces = c.matrices.iter().map(|a| s_of(f, a)).collect::<Result<Vec<_>>>()?;
    subspaces.push(s_infinity(f, n)?);

    let total = proj::gaussian_binomial(2 * n, 1, q as u128) as usize;
    let hits: Vec<u32> = subspaces
        .par_iter()
        .map(|s| {
            let mut h = vec![0u32; total];
            for p in s.points(f) {
                h[proj::point_index(q, p.coords()) as usize] += 1;
            }
            h
        })
        .reduce(|| vec![0u32; total], |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        });
    let partition = hits.iter().all(|&h| h == 1);
    let isotropic = subspaces.iter().all(|s| isotropy_witness(f, s).is_none());

    let points = (q as u64).pow(2 * n as u32);
    let affine_plane =
        (partition && points <= AFFINE_POINT_BUDGET).then(|| affine_plane_check(f, n, &subspaces));
    Ok(SpreadCover { subspaces, partition, isotropic, affine_plane })
}

fn vector_of(q: u32, len: usize, mut idx: u64) -> Vec<Elem> {
    let mut v = vec![0; len];
    for slot in v.iter_mut().rev() {
        *slot = (idx % q as u64) as Elem;
        idx /= q as u64;
    }
    v
}

fn index_of(q: u32, v: &[Elem]) -> u64 {
    v.iter().fold(0, |acc, &x| acc * q as u64 + x as u64)
}

/// Points are vectors of `F_q^{2n}`, lines are cosets of the spread members.
fn affine_plane_check(f: &Field, n: usize, spread: &[Subspace]) -> AffinePlaneCheck {
    let q = f.order();
    let len = 2 * n;
    let points = (q as u64).pow(len as u32);
    let qn = (q as u64).pow(n as u32);
    let mut lines: Vec<Vec<u64>> = Vec::new();
    let mut parallel_classes = true;
    for s in spread {
        let members: Vec<Vec<Elem>> = (0..qn)
            .map(|i| proj::combine(f, &vector_of(q, n, i), s.basis()))
            .collect();
        let mut seen = vec![false; points as usize];
        let mut class = 0;
        for start in 0..points {
            if seen[start as usize] {
                continue;
            }
            let v = vector_of(q, len, start);
            let mut line: Vec<u64> = members
                .iter()
                .map(|m| index_of(q, &(0..len).map(|k| f.add(v[k], m[k])).collect::<Vec<_>>()))
                .collect();
            line.sort_unstable();
            for &p in &line {
                parallel_classes &= !seen[p as usize];
                seen[p as usize] = true;
            }
            lines.push(line);
            class += 1;
        }
        parallel_classes &= class == qn;
    }
    let np = points as usize;
    let mut pair_count = vec![0u8; np * np];
    for line in &lines {
        for (i, &a) in line.iter().enumerate() {
            for &b in &line[i + 1..] {
                let slot = &mut pair_count[a as usize * np + b as usize];
                *slot = slot.saturating_add(1);
            }
        }
    }
    let unique_joins = (0..np).all(|a| (a + 1..np).all(|b| pair_count[a * np + b] == 1));
    AffinePlaneCheck { points, lines: lines.len() as u64, unique_joins, parallel_classes }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpreadLinset {
    /// Distinct points `SymPoint(A)` for nonzero members, sorted.
    pub points: Vec<ProjPoint>,
    /// Span of the points.
    pub span: Subspace,
    /// Parametrization by the diagonal, when the diagonal map is injective.
    pub spec: Option<LinearSetSpec>,
}

impl SpreadLinset {
    pub fn is_plane(&self) -> bool {
        self.span.dim() == 2
    }
}

/// F_q-coordinates of a symmetric matrix over `F_{q^2}`: the 12 halves of its six entries.
fn sym_coords(ctx: &LinsetContext, t: &[Elem; 6]) -> Vec<Elem> {
    t.iter()
        .flat_map(|&x| {
            let (c0, c1) = ctx.param.split(&ctx.ext, &ctx.base, x);
            [c0, c1]
        })
        .collect()
}

/// Maps a symmetric spread set over `F_{q^2}` that is a 6-dimensional
/// `F_q`-space to its linear set of `PG(5, q^2)`.
pub fn spread_to_linset(ctx: &LinsetContext, c: &SpreadSet) -> Result<SpreadLinset> {
    if c.n != 3 || c.field != ctx.ext {
        return Err(SpreadError::Malformed("expected 3x3 matrices over F_{q^2}".into()));
    }
    let syms = c
        .matrices
        .iter()
        .enumerate()
        .map(|(i, m)| SymPoint::from_matrix(m).ok_or(SpreadError::NotSymmetric(i)))
        .collect::<Result<Vec<_>>>()?;
    let (base, ext) = (&ctx.base, &ctx.ext);
    let coords: Vec<Vec<Elem>> = syms.iter().map(|s| sym_coords(ctx, &s.0)).collect();
    let mut m = Matrix::from_rows(&coords)?;
    let dim = linalg::rref(base, &mut m).len();
    let closed = validate_spread_set(c).additive;
    if dim != 6 || !closed || c.matrices.len() as u64 != (base.order() as u64).pow(6) {
        return Err(SpreadError::WrongDimension { found: dim, expected: 6 });
    }
    let points: BTreeSet<ProjPoint> = syms
        .iter()
        .filter(|s| s.0 != [0; 6])
        .map(|s| proj::normalize(ext, &s.0).expect("nonzero"))
        .collect();
    let points: Vec<ProjPoint> = points.into_iter().collect();
    let span = Subspace::from_rows(ext, 5, &points.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>())?;
    let spec = diagonal_spec(ctx, &m)?;
    if let Some(s) = &spec {
        let mine: Vec<ProjPoint> = linset_points(ctx, s)?.points.into_iter().map(|w| w.point).collect();
        assert_eq!(mine, points, "parametrization reproduces the linear set");
    }
    Ok(SpreadLinset { points, span, spec })
}

/// The `q^6` symmetric matrices `{(x, y, z, F1, F2, F3)(u) : u ∈ F_q^6}` of a
/// linear-set spec, in parameter order starting from `u = 0`.
pub fn linset_spread_set(ctx: &LinsetContext, spec: &LinearSetSpec) -> Result<SpreadSet> {
    let param = spec.validate(ctx)?;
    let q = ctx.q();
    let matrices = std::iter::once(vec![0; 6])
        .chain(proj::projective_vectors(q, 6).flat_map(|u| {
            (1..q).map(move |s| u.iter().map(|&x| ctx.base.mul(s, x)).collect::<Vec<_>>())
        }))
        .map(|u| SymPoint(linset::point_vector(ctx, &param, spec, &u)).to_matrix())
        .collect();
    SpreadSet::new(&ctx.ext, 3, matrices)
}

/// Writes the space (given by an `F_q`-basis in 12 coordinates) as
/// `(x, y, z, F1, F2, F3)` with `F_i` linear in `(x1, .., z2)`.
fn diagonal_spec(ctx: &LinsetContext, basis: &Matrix) -> Result<Option<LinearSetSpec>> {
    let base = &ctx.base;
    let diag = Matrix::from_rows(&basis.row_iter().map(|r| r[..6].to_vec()).collect::<Vec<_>>())?;
    let dinv = match linalg::inverse(base, &diag) {
        Ok(m) => m,
        Err(LinalgError::Singular) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    // row j of dinv . basis = the member whose diagonal parameters are e_j
    let images = dinv.mul(base, basis)?;
    let mut forms = [[0; 6]; 6];
    for j in 0..6 {
        let row = images.row(j);
        for r in 0..6 {
            forms[r][j] = row[6 + r];
        }
    }
    Ok(Some(LinearSetSpec { a: ctx.param.a, forms }))
}

/// `x ∘ y = x M(y)` where `M(y)` is the member whose first row is `y`.
#[derive(Clone, Debug)]
pub struct Presemifield {
    field: Field,
    n: usize,
    /// `right_mul[index(y)]` is the matrix of `x -> x ∘ y`.
    right_mul: Vec<Matrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NucleiReport {
    pub order: u64,
    pub left_nucleus: u64,
    pub middle_nucleus: u64,
    pub right_nucleus: u64,
    /// Elements in all three nuclei.
    pub nucleus: u64,
    /// Elements of the nucleus commuting with everything.
    pub center: u64,
}

impl Presemifield {
    pub fn new(c: &SpreadSet) -> Result<Presemifield> {
        if !validate_spread_set(c).semifield {
            return Err(SpreadError::NotASemifield);
        }
        let q = c.field.order();
        let order = (q as u64).pow(c.n as u32);
        if order > PRESEMIFIELD_BUDGET {
            return Err(SpreadError::Budget { elements: order, budget: PRESEMIFIELD_BUDGET });
        }
        let mut right_mul = vec![Matrix::zeros(c.n, c.n); order as usize];
        for m in &c.matrices {
            right_mul[index_of(q, m.row(0)) as usize] = m.clone();
        }
        Ok(Presemifield { field: c.field.clone(), n: c.n, right_mul })
    }

    pub fn order(&self) -> u64 {
        self.right_mul.len() as u64
    }

    pub fn element(&self, idx: u64) -> Vec<Elem> {
        vector_of(self.field.order(), self.n, idx)
    }

    pub fn index(&self, v: &[Elem]) -> u64 {
        index_of(self.field.order(), v)
    }

    pub fn mul(&self, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
        linalg::vec_mul(&self.field, x, &self.right_mul[self.index(y) as usize])
    }

    pub fn add(&self, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
        x.iter().zip(y).map(|(&a, &b)| self.field.add(a, b)).collect()
    }

    /// The isotopic semifield `x * y = R_e^{-1}(x) ∘ L_e^{-1}(y)` with
    /// `R_e(x) = x ∘ e`, `L_e(y) = e ∘ y`; its identity is `e ∘ e`.
    pub fn semifield_isotope(&self, e: &[Elem]) -> Result<Presemifield> {
        let f = &self.field;
        if e.len() != self.n || e.iter().all(|&x| x == 0) {
            return Err(SpreadError::Malformed("isotope element must be a nonzero vector".into()));
        }
        let r_inv = linalg::inverse(f, &self.right_mul[self.index(e) as usize])?;
        let mut l_inv = vec![0u64; self.right_mul.len()];
        for (y, m) in self.right_mul.iter().enumerate() {
            l_inv[self.index(&linalg::vec_mul(f, e, m)) as usize] = y as u64;
        }
        let right_mul = l_inv
            .iter()
            .map(|&y| r_inv.mul(f, &self.right_mul[y as usize]))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Presemifield { field: f.clone(), n: self.n, right_mul })
    }

    /// Nuclei of the semifield isotope at the first unit vector; unlike
    /// [`Presemifield::nuclei`] these sizes are isotopy invariants.
    pub fn semifield_nuclei(&self) -> Result<NucleiReport> {
        let mut e = vec![0; self.n];
        e[0] = 1;
        Ok(self.semifield_isotope(&e)?.nuclei())
    }

    /// The full multiplication table by element index.
    pub fn table(&self) -> Vec<Vec<u64>> {
        let n = self.order();
        (0..n)
            .map(|i| (0..n).map(|j| self.index(&self.mul(&self.element(i), &self.element(j)))).collect())
            .collect()
    }

    /// An additive basis: `F_p`-multiples of the encoding basis of each coordinate.
    fn additive_basis(&self) -> Vec<Vec<Elem>> {
        let f = &self.field;
        let p = f.characteristic();
        let prime_basis: Vec<Elem> = (0..f.degree()).map(|i| p.pow(i)).collect();
        (0..self.n)
            .flat_map(|k| {
                prime_basis.iter().map(move |&b| {
                    let mut v = vec![0; self.n];
                    v[k] = b;
                    v
                })
            })
            .collect()
    }

    /// Left, middle and right nuclei and center. Multiplication is biadditive,
    /// so each identity is checked on pairs from an additive basis.
    pub fn nuclei(&self) -> NucleiReport {
        let basis = self.additive_basis();
        self.nuclei_over(&basis, &basis)
    }

    /// Same as [`Presemifield::nuclei`], quantifying over all element pairs.
    pub fn nuclei_brute_force(&self) -> NucleiReport {
        let all: Vec<Vec<Elem>> = (0..self.order()).map(|i| self.element(i)).collect();
        self.nuclei_over(&all, &all)
    }

    fn nuclei_over(&self, xs: &[Vec<Elem>], ys: &[Vec<Elem>]) -> NucleiReport {
        let all: Vec<Vec<Elem>> = (0..self.order()).map(|i| self.element(i)).collect();
        let m = |a: &[Elem], b: &[Elem]| self.mul(a, b);
        let flags: Vec<[bool; 4]> = all
            .par_iter()
            .map(|k| {
                let mut left = true;
                let mut middle = true;
                let mut right = true;
                for x in xs {
                    for y in ys {
                        left &= m(k, &m(x, y)) == m(&m(k, x), y);
                        middle &= m(x, &m(k, y)) == m(&m(x, k), y);
                        right &= m(x, &m(y, k)) == m(&m(x, y), k);
                    }
                }
                let commutes = xs.iter().all(|x| m(k, x) == m(x, k));
                [left, middle, right, commutes]
            })
            .collect();
        let count = |pred: &dyn Fn(&[bool; 4]) -> bool| flags.iter().filter(|f| pred(f)).count() as u64;
        NucleiReport {
            order: self.order(),
            left_nucleus: count(&|f| f[0]),
            middle_nucleus: count(&|f| f[1]),
            right_nucleus: count(&|f| f[2]),
            nucleus: count(&|f| f[0] && f[1] && f[2]),
            center: count(&|f| f[0] && f[1] && f[2] && f[3]),
        }
    }

    /// Distributivity on both sides and absence of zero divisors, exhaustively.
    pub fn check_division_algebra(&self) -> bool {
        let all: Vec<Vec<Elem>> = (0..self.order()).map(|i| self.element(i)).collect();
        let zero = vec![0; self.n];
        all.par_iter().all(|x| {
            all.iter().all(|y| {
                let xy = self.mul(x, y);
                (xy != zero || *x == zero || *y == zero)
                    && all.iter().all(|z| {
                        self.mul(x, &self.add(y, z)) == self.add(&xy, &self.mul(x, z))
                            && self.mul(&self.add(x, y), z) == self.add(&self.mul(x, z), &self.mul(y, z))
                    })
            })
        })
    }
}
