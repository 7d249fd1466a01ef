//! The quadric Veronese surface `V ⊂ PG(5, F)`, its secant variety `V1`, the
//! special planes inside `V1`, plane intersection profiles and the lifted
//! action of `PGL(3, F)`.
//!
//! Coordinates `(t0, ..., t5)` are read as the symmetric matrix
//!
//! ```text
//!   t0 t3 t4
//!   t3 t1 t5
//!   t4 t5 t2
//! ```
//!
//! This convention is also the wire format of every point written by the crate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Elem, Field, FieldError};
use crate::linalg::{self, LinalgError, Matrix};
use crate::proj::{self, ProjError, ProjPoint, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("expected a plane, got a subspace of projective dimension {0}")]
    NotAPlane(isize),
    #[error("expected a point of PG(2), got {0} coordinates")]
    NotInPg2(usize),
    #[error("the nucleus plane exists only in characteristic 2 (characteristic is {0})")]
    NoNucleusPlane(u32),
    #[error("plane is not contained in the secant variety")]
    NotContained,
    #[error("plane is contained in the secant variety but matches no conic, tangent or nucleus plane")]
    Unclassified,
    #[error("collineation matrix is singular")]
    SingularCollineation,
    #[error("cubic extension has {points} points per plane, over the budget of {budget}")]
    Budget { points: u64, budget: u64 },
    #[error("fields must be a base level and its cubic extension in one tower")]
    BadContext,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Proj(#[from] ProjError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, GeomError>;

/// A point of `PG(5, F)` with its symmetric-matrix view.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymPoint(pub [Elem; 6]);

impl SymPoint {
    pub fn to_matrix(&self) -> Matrix {
        let t = &self.0;
        Matrix::from_rows(&[[t[0], t[3], t[4]], [t[3], t[1], t[5]], [t[4], t[5], t[2]]])
            .expect("3x3")
    }

    /// Inverse of [`SymPoint::to_matrix`]; `None` for a non-symmetric or non-3x3 matrix.
    pub fn from_matrix(m: &Matrix) -> Option<SymPoint> {
        if m.rows() != 3 || m.cols() != 3 || !m.is_symmetric() {
            return None;
        }
        Some(SymPoint([m.get(0, 0), m.get(1, 1), m.get(2, 2), m.get(0, 1), m.get(0, 2), m.get(1, 2)]))
    }

    pub fn rank(&self, field: &Field) -> usize {
        linalg::rank(field, &self.to_matrix())
    }

    pub fn is_veronese(&self, field: &Field) -> bool {
        self.rank(field) == 1
    }

    pub fn normalized(&self, field: &Field) -> Result<SymPoint> {
        let p = proj::normalize(field, &self.0)?;
        Ok(SymPoint(p.coords().try_into().expect("six coordinates")))
    }

    pub fn to_point(&self, field: &Field) -> Result<ProjPoint> {
        Ok(proj::normalize(field, &self.0)?)
    }
}

fn pg2(p: &ProjPoint) -> Result<[Elem; 3]> {
    p.coords().try_into().map_err(|_| GeomError::NotInPg2(p.coords().len()))
}

/// The Veronese map `(x, y, z) -> (x^2, y^2, z^2, xy, xz, yz)`.
pub fn v2(field: &Field, p: &ProjPoint) -> Result<SymPoint> {
    let [x, y, z] = pg2(p)?;
    Ok(v2_raw(field, [x, y, z]))
}

pub(crate) fn v2_raw(field: &Field, [x, y, z]: [Elem; 3]) -> SymPoint {
    SymPoint([
        field.mul(x, x),
        field.mul(y, y),
        field.mul(z, z),
        field.mul(x, y),
        field.mul(x, z),
        field.mul(y, z),
    ])
}

/// Recovers `P` from a rank-one symmetric matrix `v2(P)` (up to scalars).
pub fn v2_preimage(field: &Field, t: &SymPoint) -> Option<ProjPoint> {
    if !t.is_veronese(field) {
        return None;
    }
    let m = t.to_matrix();
    let row = (0..3).map(|r| m.row(r)).find(|r| r.iter().any(|&x| x != 0))?;
    proj::normalize(field, row).ok()
}

/// `t0 t1 t2 - t0 t5^2 - t1 t4^2 - t2 t3^2 + 2 t3 t4 t5`.
#[inline]
pub fn secant_value(field: &Field, t: &[Elem; 6]) -> Elem {
    let f = field;
    let a = f.mul(f.mul(t[0], t[1]), t[2]);
    let b = f.mul(t[0], f.square(t[5]));
    let c = f.mul(t[1], f.square(t[4]));
    let d = f.mul(t[2], f.square(t[3]));
    let e = f.mul(f.mul(t[3], t[4]), t[5]);
    let two_e = f.add(e, e);
    f.add(f.sub(f.sub(f.sub(a, b), c), d), two_e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecantEval {
    pub value: Elem,
    pub member: bool,
}

/// Evaluates the secant cubic and decides membership in `V1`. Membership is
/// computed both from the cubic and from the matrix determinant; they must agree.
pub fn secant_eval(field: &Field, t: &SymPoint) -> SecantEval {
    let value = secant_value(field, &t.0);
    let det = linalg::determinant(field, &t.to_matrix()).expect("square");
    assert_eq!(value, det, "secant cubic and determinant disagree");
    SecantEval { value, member: value == 0 }
}

/// A homogeneous cubic in `k` variables, kept as a list of monomials
/// `c * y_a y_b y_c` with `a <= b <= c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicForm {
    vars: usize,
    terms: Vec<(u8, u8, u8, Elem)>,
}

impl CubicForm {
    fn from_dense(field: &Field, vars: usize, dense: Vec<Elem>) -> CubicForm {
        let _ = field;
        let mut terms = Vec::new();
        for a in 0..vars {
            for b in a..vars {
                for c in b..vars {
                    let v = dense[(a * vars + b) * vars + c];
                    if v != 0 {
                        terms.push((a as u8, b as u8, c as u8, v));
                    }
                }
            }
        }
        CubicForm { vars, terms }
    }

    // Accumulates coef * L1 * L2 * L3 where each L is a linear form given by a
    // column accessor.
    fn accumulate(
        field: &Field,
        dense: &mut [Elem],
        vars: usize,
        coef: Elem,
        l: [&dyn Fn(usize) -> Elem; 3],
    ) {
        for i in 0..vars {
            let x = l[0](i);
            if x == 0 {
                continue;
            }
            let cx = field.mul(coef, x);
            for j in 0..vars {
                let y = l[1](j);
                if y == 0 {
                    continue;
                }
                let cxy = field.mul(cx, y);
                for k in 0..vars {
                    let z = l[2](k);
                    if z == 0 {
                        continue;
                    }
                    let mut idx = [i, j, k];
                    idx.sort_unstable();
                    let slot = &mut dense[(idx[0] * vars + idx[1]) * vars + idx[2]];
                    *slot = field.add(*slot, field.mul(cxy, z));
                }
            }
        }
    }

    /// Restriction of the secant cubic to the span of the rows of `basis`
    /// (a `k x 6` matrix); the result is a cubic in the `k` row coefficients.
    pub fn secant_restriction(field: &Field, basis: &Matrix) -> CubicForm {
        assert_eq!(basis.cols(), 6, "ambient PG(5)");
        let k = basis.rows();
        let one = 1;
        let minus = field.neg(1);
        let two = field.add(1, 1);
        let secant: [(usize, usize, usize, Elem); 5] =
            [(0, 1, 2, one), (0, 5, 5, minus), (1, 4, 4, minus), (2, 3, 3, minus), (3, 4, 5, two)];
        let mut dense = vec![0; k * k * k];
        for &(a, b, c, coef) in &secant {
            if coef == 0 {
                continue;
            }
            let la = |i: usize| basis.get(i, a);
            let lb = |i: usize| basis.get(i, b);
            let lc = |i: usize| basis.get(i, c);
            Self::accumulate(field, &mut dense, k, coef, [&la, &lb, &lc]);
        }
        Self::from_dense(field, k, dense)
    }

    /// Substitutes `y = z B` where `B` is `m x vars`; returns a cubic in `m` variables.
    pub fn substitute(&self, field: &Field, b: &Matrix) -> CubicForm {
        assert_eq!(b.cols(), self.vars, "substitution shape");
        let m = b.rows();
        let mut dense = vec![0; m * m * m];
        for &(a, bb, c, coef) in &self.terms {
            let la = |i: usize| b.get(i, a as usize);
            let lb = |i: usize| b.get(i, bb as usize);
            let lc = |i: usize| b.get(i, c as usize);
            Self::accumulate(field, &mut dense, m, coef, [&la, &lb, &lc]);
        }
        Self::from_dense(field, m, dense)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(u8, u8, u8, Elem)] {
        &self.terms
    }

    #[inline]
    pub fn eval(&self, field: &Field, y: &[Elem]) -> Elem {
        let mut acc = 0;
        for &(a, b, c, coef) in &self.terms {
            let m = field.mul(field.mul(y[a as usize], y[b as usize]), y[c as usize]);
            acc = field.add(acc, field.mul(coef, m));
        }
        acc
    }

    /// Whether every partial derivative vanishes at `y`.
    pub fn gradient_vanishes(&self, field: &Field, y: &[Elem]) -> bool {
        let mut grad = vec![0; self.vars];
        for &(a, b, c, coef) in &self.terms {
            let (a, b, c) = (a as usize, b as usize, c as usize);
            let (ya, yb, yc) = (y[a], y[b], y[c]);
            grad[a] = field.add(grad[a], field.mul(coef, field.mul(yb, yc)));
            grad[b] = field.add(grad[b], field.mul(coef, field.mul(ya, yc)));
            grad[c] = field.add(grad[c], field.mul(coef, field.mul(ya, yb)));
        }
        grad.iter().all(|&g| g == 0)
    }

    /// Singular point test: the form and its gradient vanish.
    pub fn is_singular_at(&self, field: &Field, y: &[Elem]) -> bool {
        self.eval(field, y) == 0 && self.gradient_vanishes(field, y)
    }
}

/// Whether the subspace lies inside `V1` as a variety (the restricted cubic is
/// the zero polynomial), as opposed to merely having all rational points in it.
pub fn subspace_in_secant(field: &Field, s: &Subspace) -> bool {
    CubicForm::secant_restriction(field, s.basis()).is_zero()
}

/// The three kinds of planes contained in `V1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SpecialPlane {
    /// Plane of `v2(l)`, `l = {ax + by + cz = 0}`; `line` holds `(a, b, c)`.
    Conic { line: ProjPoint },
    /// Tangent plane to `V` at `v2(point)`.
    Tangent { point: ProjPoint },
    Nucleus,
}

pub fn special_plane(field: &Field, kind: &SpecialPlane) -> Result<Subspace> {
    match kind {
        SpecialPlane::Conic { line } => conic_plane(field, line),
        SpecialPlane::Tangent { point } => tangent_plane(field, point),
        SpecialPlane::Nucleus => nucleus_plane(field),
    }
}

/// Two independent vectors spanning `{v : v . w = 0}`.
fn annihilator(field: &Field, w: [Elem; 3]) -> Matrix {
    let m = Matrix::from_rows(&[w]).expect("1x3");
    linalg::kernel(field, &m)
}

/// Span of `v2` of three points of the line `ax + by + cz = 0`.
pub fn conic_plane(field: &Field, line: &ProjPoint) -> Result<Subspace> {
    let l = pg2(line)?;
    let k = annihilator(field, l);
    let u: [Elem; 3] = k.row(0).try_into().expect("3");
    let v: [Elem; 3] = k.row(1).try_into().expect("3");
    let w = [field.add(u[0], v[0]), field.add(u[1], v[1]), field.add(u[2], v[2])];
    let rows = [v2_raw(field, u).0, v2_raw(field, v).0, v2_raw(field, w).0];
    let s = Subspace::from_rows(field, 5, &rows)?;
    debug_assert_eq!(s.dim(), 2);
    Ok(s)
}

/// `{A symmetric : v_i A v_j^T = 0, i, j in {1, 2}}` with `v_1, v_2` spanning
/// the annihilator of `P`.
pub fn tangent_plane(field: &Field, point: &ProjPoint) -> Result<Subspace> {
    let p = pg2(point)?;
    let k = annihilator(field, p);
    let (v1, v2r) = (k.row(0), k.row(1));
    let bilinear = |v: &[Elem], w: &[Elem]| -> [Elem; 6] {
        let f = field;
        [
            f.mul(v[0], w[0]),
            f.mul(v[1], w[1]),
            f.mul(v[2], w[2]),
            f.add(f.mul(v[0], w[1]), f.mul(v[1], w[0])),
            f.add(f.mul(v[0], w[2]), f.mul(v[2], w[0])),
            f.add(f.mul(v[1], w[2]), f.mul(v[2], w[1])),
        ]
    };
    let cons = Matrix::from_rows(&[bilinear(v1, v1), bilinear(v1, v2r), bilinear(v2r, v2r)])?;
    let ker = linalg::kernel(field, &cons);
    let s = Subspace::from_rows(field, 5, &ker.to_rows())?;
    debug_assert_eq!(s.dim(), 2);
    Ok(s)
}

/// The plane of zero-diagonal symmetric matrices `{t0 = t1 = t2 = 0}`.
pub fn nucleus_plane(field: &Field) -> Result<Subspace> {
    if field.characteristic() != 2 {
        return Err(GeomError::NoNucleusPlane(field.characteristic()));
    }
    Ok(Subspace::from_rows(
        field,
        5,
        &[[0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1]],
    )?)
}

/// Identifies a plane contained in `V1` as a conic, tangent or nucleus plane.
pub fn classify_contained_plane(field: &Field, plane: &Subspace) -> Result<SpecialPlane> {
    if plane.dim() != 2 || plane.ambient() != 5 {
        return Err(GeomError::NotAPlane(plane.dim()));
    }
    if !subspace_in_secant(field, plane) {
        return Err(GeomError::NotContained);
    }
    if field.characteristic() == 2 && *plane == nucleus_plane(field)? {
        return Ok(SpecialPlane::Nucleus);
    }
    // conic planes: all matrices share a kernel vector
    let mut stacked = Matrix::zeros(3, 9);
    for (i, row) in plane.basis().row_iter().enumerate() {
        let a = SymPoint(row.try_into().expect("6")).to_matrix();
        for r in 0..3 {
            for c in 0..3 {
                stacked.set(r, 3 * i + c, a.get(r, c));
            }
        }
    }
    let common = linalg::kernel(field, &stacked.transpose());
    if common.rows() > 0 {
        let line = proj::normalize(field, common.row(0))?;
        if conic_plane(field, &line)? == *plane {
            return Ok(SpecialPlane::Conic { line });
        }
    }
    // tangent planes: the unique Veronese point is rational
    for p in plane.points(field) {
        let t = SymPoint(p.coords().try_into().expect("6"));
        if let Some(pre) = v2_preimage(field, &t) {
            if tangent_plane(field, &pre)? == *plane {
                return Ok(SpecialPlane::Tangent { point: pre });
            }
        }
    }
    Err(GeomError::Unclassified)
}

/// A base field together with its cubic extension, taken from one tower.
#[derive(Clone, Debug)]
pub struct GeomContext {
    pub base: Field,
    pub ext: Field,
    /// Cap on the number of points of a plane over the extension.
    pub ext_budget: u64,
}

pub const DEFAULT_EXT_BUDGET: u64 = 300_000;

impl GeomContext {
    pub fn new(base: Field, ext: Field) -> Result<GeomContext> {
        if !base.same_tower(&ext) || ext.degree() != 3 * base.degree() {
            return Err(GeomError::BadContext);
        }
        Ok(GeomContext { base, ext, ext_budget: DEFAULT_EXT_BUDGET })
    }

    /// `F_Q` and `F_{Q^3}` for a prime power `Q`.
    pub fn for_order(order: u32) -> Result<GeomContext> {
        let (p, e) = prime_power(order).ok_or(FieldError::NotPrime(order))?;
        let t = crate::field::Tower::new(p, &[e, 3])?;
        GeomContext::new(t.field(1)?, t.field(2)?)
    }

    /// Frobenius of the extension over the base: `x -> x^Q`.
    pub fn sigma(&self, x: Elem) -> Elem {
        self.ext.frobenius_unchecked(x, self.base.degree(), 1)
    }
}

/// `(p, e)` with `n = p^e`, if `n` is a prime power.
pub fn prime_power(n: u32) -> Option<(u32, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n % d == 0)?;
    let (mut m, mut e) = (n, 0);
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileTag {
    ContainedConic,
    ContainedTangent,
    ContainedNucleus,
    HasRationalPoints,
    ThreeConjugateLines,
    Other,
}

impl ProfileTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProfileTag::ContainedConic => "contained-conic",
            ProfileTag::ContainedTangent => "contained-tangent",
            ProfileTag::ContainedNucleus => "contained-nucleus",
            ProfileTag::HasRationalPoints => "has-rational-points",
            ProfileTag::ThreeConjugateLines => "three-conjugate-lines",
            ProfileTag::Other => "other",
        }
    }
}

/// Extension-field data of a plane section `π ∩ V1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionData {
    /// Lines of `π` over the extension lying in `V1`, as RREF bases in `PG(5)`.
    pub lines: Vec<Vec<Vec<Elem>>>,
    /// Singular points of the plane cubic over the extension, in `PG(5)` coordinates.
    pub singular_points: Vec<[Elem; 6]>,
    /// Pairwise intersections of the lines that lie on `V` and are not base-rational.
    pub veronese_points: Vec<[Elem; 6]>,
    /// Whether the lines form one orbit of size 3 under the Frobenius over the base.
    pub conjugate_triple: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionProfile {
    pub tag: ProfileTag,
    /// Base-rational points of `π ∩ V1`.
    pub rational_points: u64,
    pub plane_points: u64,
    /// Whether `π ⊂ V1` as a variety.
    pub contained: bool,
    /// Number of base-field lines of `π` inside `V1` (full profiles only).
    pub base_lines: Option<u64>,
    pub classification: Option<SpecialPlane>,
    pub extension: Option<ExtensionData>,
}

/// Base-field lines of the plane in plane coordinates: dual vectors of PG(2, F).
fn line_basis(field: &Field, dual: &[Elem]) -> Matrix {
    annihilator(field, dual.try_into().expect("3"))
}

/// Full profile of a plane: rational count, base lines, classification if
/// contained, and the extension analysis when the plane has no rational point
/// of `V1`.
pub fn plane_profile(ctx: &GeomContext, plane: &Subspace) -> Result<IntersectionProfile> {
    profile(ctx, plane, true)
}

/// Cheaper profile used by censuses: skips base-line counting, and only runs
/// the extension analysis for planes without rational points.
pub fn quick_profile(ctx: &GeomContext, plane: &Subspace) -> Result<IntersectionProfile> {
    profile(ctx, plane, false)
}

fn profile(ctx: &GeomContext, plane: &Subspace, full: bool) -> Result<IntersectionProfile> {
    if plane.dim() != 2 || plane.ambient() != 5 {
        return Err(GeomError::NotAPlane(plane.dim()));
    }
    let base = &ctx.base;
    let q = base.order();
    let cubic = CubicForm::secant_restriction(base, plane.basis());
    let plane_points = q as u64 * q as u64 + q as u64 + 1;
    let contained = cubic.is_zero();
    let rational_points = if contained {
        plane_points
    } else {
        proj::projective_vectors(q, 3).filter(|y| cubic.eval(base, y) == 0).count() as u64
    };

    let base_lines = if full {
        let n = if contained {
            plane_points
        } else {
            proj::projective_vectors(q, 3)
                .filter(|d| cubic.substitute(base, &line_basis(base, d)).is_zero())
                .count() as u64
        };
        Some(n)
    } else {
        None
    };

    if contained {
        let (tag, classification) = match classify_contained_plane(base, plane) {
            Ok(k) => {
                let tag = match k {
                    SpecialPlane::Conic { .. } => ProfileTag::ContainedConic,
                    SpecialPlane::Tangent { .. } => ProfileTag::ContainedTangent,
                    SpecialPlane::Nucleus => ProfileTag::ContainedNucleus,
                };
                (tag, Some(k))
            }
            Err(GeomError::Unclassified) => (ProfileTag::Other, None),
            Err(e) => return Err(e),
        };
        return Ok(IntersectionProfile {
            tag,
            rational_points,
            plane_points,
            contained,
            base_lines,
            classification,
            extension: None,
        });
    }
    if rational_points > 0 {
        return Ok(IntersectionProfile {
            tag: ProfileTag::HasRationalPoints,
            rational_points,
            plane_points,
            contained,
            base_lines,
            classification: None,
            extension: None,
        });
    }

    let extension = extension_analysis(ctx, plane, &cubic)?;
    let tag = if extension.conjugate_triple {
        ProfileTag::ThreeConjugateLines
    } else {
        ProfileTag::Other
    };
    Ok(IntersectionProfile {
        tag,
        rational_points,
        plane_points,
        contained,
        base_lines,
        classification: None,
        extension: Some(extension),
    })
}

fn extension_analysis(ctx: &GeomContext, plane: &Subspace, cubic: &CubicForm) -> Result<ExtensionData> {
    let ext = &ctx.ext;
    let s = ext.order() as u64;
    let points = s * s + s + 1;
    if points > ctx.ext_budget {
        return Err(GeomError::Budget { points, budget: ctx.ext_budget });
    }
    let to_ambient = |y: &[Elem]| -> [Elem; 6] {
        let v = proj::combine(ext, y, plane.basis());
        let p = proj::normalize(ext, &v).expect("basis rows are independent");
        p.coords().try_into().expect("6")
    };

    // A line of the plane lies in V1 iff the cubic vanishes at 4 of its points:
    // a nonzero binary cubic form has at most 3 projective zeros, and s >= 8.
    let omega = 2.min(ext.order() - 1);
    let mut lines: Vec<Vec<Elem>> = Vec::new();
    for dual in proj::projective_vectors(ext.order(), 3) {
        let k = line_basis(ext, &dual);
        let (u, v) = (k.row(0), k.row(1));
        let samples = [
            u.to_vec(),
            v.to_vec(),
            (0..3).map(|i| ext.add(u[i], v[i])).collect::<Vec<_>>(),
            (0..3).map(|i| ext.add(u[i], ext.mul(omega, v[i]))).collect::<Vec<_>>(),
        ];
        if samples.iter().all(|y| cubic.eval(ext, y) == 0) {
            lines.push(dual);
        }
    }

    let mut singular = Vec::new();
    for y in proj::projective_vectors(ext.order(), 3) {
        if cubic.is_singular_at(ext, &y) {
            singular.push(y);
        }
    }

    let sub_degree = ctx.base.degree();
    let mut conjugate_triple = false;
    let mut veronese_points = Vec::new();
    if lines.len() == 3 {
        let conj = |d: &[Elem]| -> Vec<Elem> {
            let v: Vec<Elem> = d.iter().map(|&x| ctx.sigma(x)).collect();
            proj::normalize(ext, &v).expect("nonzero").into_coords()
        };
        let l1 = conj(&lines[0]);
        let l2 = conj(&l1);
        let orbit_ok = l1 != lines[0]
            && l2 != lines[0]
            && l1 != l2
            && lines.contains(&l1)
            && lines.contains(&l2)
            && conj(&l2) == lines[0];
        let mut meets = Vec::new();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let m = cross(ext, &lines[i], &lines[j]);
            let amb = to_ambient(&m);
            meets.push((m, amb));
        }
        let distinct = meets[0].0 != meets[1].0 && meets[1].0 != meets[2].0 && meets[0].0 != meets[2].0;
        let on_v = meets.iter().all(|(_, a)| SymPoint(*a).is_veronese(ext));
        let irrational = meets.iter().all(|(_, a)| {
            let c: Vec<Elem> = a.iter().map(|&x| ext.frobenius_unchecked(x, sub_degree, 1)).collect();
            proj::normalize(ext, &c).expect("nonzero").coords() != a
        });
        let mut sing_sorted: Vec<Vec<Elem>> = singular.clone();
        sing_sorted.sort();
        let mut meet_sorted: Vec<Vec<Elem>> = meets.iter().map(|(m, _)| m.clone()).collect();
        meet_sorted.sort();
        conjugate_triple = orbit_ok && distinct && on_v && irrational && sing_sorted == meet_sorted;
        if on_v {
            veronese_points = meets.iter().map(|(_, a)| *a).collect();
        }
    }

    let lines_ambient = lines
        .iter()
        .map(|d| {
            let k = line_basis(ext, d);
            let rows: Vec<Vec<Elem>> =
                k.row_iter().map(|r| proj::combine(ext, r, plane.basis())).collect();
            Subspace::from_rows(ext, 5, &rows).map(|s| s.basis().to_rows())
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(ExtensionData {
        lines: lines_ambient,
        singular_points: singular.iter().map(|y| to_ambient(y)).collect(),
        veronese_points,
        conjugate_triple,
    })
}

/// Intersection point of two lines of PG(2) given by dual coordinates.
fn cross(field: &Field, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let f = field;
    let v = [
        f.sub(f.mul(a[1], b[2]), f.mul(a[2], b[1])),
        f.sub(f.mul(a[2], b[0]), f.mul(a[0], b[2])),
        f.sub(f.mul(a[0], b[1]), f.mul(a[1], b[0])),
    ];
    proj::normalize(field, &v).expect("distinct lines").into_coords()
}

/// The 6x6 matrix `L` with `t(M^T A M) = t(A) L`, i.e. the action on `PG(5)`
/// induced by `P -> P M` on `PG(2)`.
pub fn lift_collineation(field: &Field, m: &Matrix) -> Result<Matrix> {
    if m.rows() != 3 || m.cols() != 3 {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() }.into());
    }
    if linalg::determinant(field, m)? == 0 {
        return Err(GeomError::SingularCollineation);
    }
    let mt = m.transpose();
    let mut out = Matrix::zeros(6, 6);
    for k in 0..6 {
        let mut e = [0; 6];
        e[k] = 1;
        let a = SymPoint(e).to_matrix();
        let img = mt.mul(field, &a)?.mul(field, m)?;
        let t = SymPoint::from_matrix(&img).expect("congruence preserves symmetry");
        for (j, &x) in t.0.iter().enumerate() {
            out.set(k, j, x);
        }
    }
    Ok(out)
}

pub fn apply_to_point(field: &Field, lifted: &Matrix, t: &SymPoint) -> SymPoint {
    let v = linalg::vec_mul(field, &t.0, lifted);
    SymPoint(v.try_into().expect("6"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Tower;
    use crate::proj::{points_of_space, SubspaceEnumerator, DEFAULT_BUDGET};
    use rand::{Rng, SeedableRng};

    fn field(order: u32) -> Field {
        GeomContext::for_order(order).unwrap().base
    }

    fn pt(f: &Field, v: &[Elem]) -> ProjPoint {
        ProjPoint::new(f, v).unwrap()
    }

    #[test]
    fn v2_examples() {
        let f = field(2);
        assert_eq!(v2(&f, &pt(&f, &[1, 0, 0])).unwrap().0, [1, 0, 0, 0, 0, 0]);
        assert_eq!(v2(&f, &pt(&f, &[1, 1, 1])).unwrap().0, [1; 6]);
        let imgs: std::collections::HashSet<_> =
            points_of_space(&f, 2).map(|p| v2(&f, &p).unwrap()).collect();
        assert_eq!(imgs.len(), 7);
        assert!(imgs.iter().all(|t| t.rank(&f) == 1));
        assert!(matches!(v2(&f, &pt(&f, &[1, 0])), Err(GeomError::NotInPg2(2))));
    }

    #[test]
    fn v2_preimage_inverts() {
        let f = field(4);
        for p in points_of_space(&f, 2) {
            assert_eq!(v2_preimage(&f, &v2(&f, &p).unwrap()).unwrap(), p);
        }
    }

    #[test]
    fn secant_examples() {
        let f = field(4);
        let e = secant_eval(&f, &SymPoint([0, 0, 0, 1, 1, 1]));
        assert!(e.member);
        let e = secant_eval(&f, &SymPoint([1, 1, 1, 0, 0, 0]));
        assert_eq!(e, SecantEval { value: 1, member: false });
    }

    #[test]
    fn secant_membership_count_pg5_2() {
        // oracle: rank of the 3x3 matrix by brute force over F2
        let f = field(2);
        let mut members = 0;
        for p in points_of_space(&f, 5) {
            let t = SymPoint(p.coords().try_into().unwrap());
            let e = secant_eval(&f, &t);
            assert_eq!(e.member, t.rank(&f) < 3);
            members += e.member as usize;
        }
        assert_eq!(members, 35);
    }

    #[test]
    fn odd_characteristic_secant_has_the_cross_term() {
        let f = field(3);
        // t3 = t4 = t5 = 1, diagonal zero: value is 2 t3 t4 t5 = 2
        assert_eq!(secant_value(&f, &[0, 0, 0, 1, 1, 1]), 2);
        assert!(matches!(nucleus_plane(&f), Err(GeomError::NoNucleusPlane(3))));
        for p in points_of_space(&f, 5) {
            let _ = secant_eval(&f, &SymPoint(p.coords().try_into().unwrap()));
        }
    }

    #[test]
    fn special_plane_examples() {
        let f = field(4);
        let n = nucleus_plane(&f).unwrap();
        let pts: Vec<_> = n.points(&f).collect();
        assert_eq!(pts.len(), 21);
        assert!(pts.iter().all(|p| secant_value(&f, p.coords().try_into().unwrap()) == 0));

        let f2 = field(2);
        let conic = conic_plane(&f2, &pt(&f2, &[0, 0, 1])).unwrap();
        let on_v: Vec<_> = points_of_space(&f2, 2)
            .map(|p| v2(&f2, &p).unwrap())
            .filter(|t| conic.contains_vector(&f2, &t.0))
            .collect();
        assert_eq!(on_v.len(), 3);

        let tan = tangent_plane(&f2, &pt(&f2, &[1, 0, 0])).unwrap();
        let on_v = points_of_space(&f2, 2)
            .filter(|p| tan.contains_vector(&f2, &v2(&f2, p).unwrap().0))
            .count();
        assert_eq!(on_v, 1);
        assert!(subspace_in_secant(&f2, &conic) && subspace_in_secant(&f2, &tan));
    }

    #[test]
    fn conic_plane_matches_common_kernel_description() {
        let f = field(4);
        for line in points_of_space(&f, 2) {
            let plane = conic_plane(&f, &line).unwrap();
            for p in plane.points(&f) {
                let a = SymPoint(p.coords().try_into().unwrap()).to_matrix();
                assert!(linalg::vec_mul(&f, line.coords(), &a).iter().all(|&x| x == 0));
            }
            for p in points_of_space(&f, 2) {
                let on_line = linalg::dot(&f, p.coords(), line.coords()) == 0;
                assert_eq!(plane.contains_vector(&f, &v2(&f, &p).unwrap().0), on_line);
            }
        }
    }

    #[test]
    fn classification_examples() {
        let f = field(2);
        assert_eq!(classify_contained_plane(&f, &nucleus_plane(&f).unwrap()).unwrap(), SpecialPlane::Nucleus);
        let line = pt(&f, &[1, 1, 0]);
        let conic = conic_plane(&f, &line).unwrap();
        assert_eq!(classify_contained_plane(&f, &conic).unwrap(), SpecialPlane::Conic { line });
        let p = pt(&f, &[0, 1, 1]);
        let tan = tangent_plane(&f, &p).unwrap();
        assert_eq!(classify_contained_plane(&f, &tan).unwrap(), SpecialPlane::Tangent { point: p });
        let diag = Subspace::from_rows(&f, 5, &[[1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]])
            .unwrap();
        assert_eq!(classify_contained_plane(&f, &diag), Err(GeomError::NotContained));
    }

    #[test]
    fn contained_planes_over_f2() {
        let f = field(2);
        let e = SubspaceEnumerator::new(&f, 5, 2, DEFAULT_BUDGET).unwrap();
        let mut kinds = [0usize; 3];
        for s in e.iter() {
            match classify_contained_plane(&f, &s) {
                Ok(SpecialPlane::Conic { .. }) => kinds[0] += 1,
                Ok(SpecialPlane::Tangent { .. }) => kinds[1] += 1,
                Ok(SpecialPlane::Nucleus) => kinds[2] += 1,
                Err(GeomError::NotContained) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert_eq!(kinds, [7, 7, 1]);
    }

    #[test]
    fn conic_and_tangent_planes_meet_the_nucleus_plane() {
        for q in [2, 4] {
            let f = field(q);
            let n = nucleus_plane(&f).unwrap();
            for x in points_of_space(&f, 2) {
                let c = conic_plane(&f, &x).unwrap();
                assert_eq!(c.meet(&f, &n).unwrap().dim(), 0);
                let t = tangent_plane(&f, &x).unwrap();
                assert_eq!(t.meet(&f, &n).unwrap().dim(), 1);
            }
        }
    }

    #[test]
    fn profile_examples() {
        let ctx = GeomContext::for_order(2).unwrap();
        let f = &ctx.base;
        let diag = Subspace::from_rows(f, 5, &[[1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]])
            .unwrap();
        let p = plane_profile(&ctx, &diag).unwrap();
        assert_eq!(p.tag, ProfileTag::HasRationalPoints);
        assert!(p.rational_points > 0);
        // the three coordinate lines t_i = t_j = 0 lie in V1
        assert_eq!(p.base_lines, Some(3));

        let ctx4 = GeomContext::for_order(4).unwrap();
        let n = nucleus_plane(&ctx4.base).unwrap();
        let p = plane_profile(&ctx4, &n).unwrap();
        assert_eq!(p.tag, ProfileTag::ContainedNucleus);
        assert_eq!(p.rational_points, 21);
        let line = Subspace::from_rows(f, 5, &[[1, 0, 0, 0, 0, 0]]).unwrap();
        assert!(matches!(plane_profile(&ctx, &line), Err(GeomError::NotAPlane(0))));
    }

    fn conjugate_triple_plane(ctx: &GeomContext, seed: u64) -> Subspace {
        // R in PG(2, Q^3) with coordinates independent over F_Q
        let (base, ext) = (&ctx.base, &ctx.ext);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        loop {
            let r = [1, rng.gen_range(0..ext.order()), rng.gen_range(0..ext.order())];
            if !ext.moore_independence(&r, base).unwrap() {
                continue;
            }
            let rs: Vec<[Elem; 3]> = (0..3)
                .map(|i| r.map(|x| ext.frobenius(x, base.degree(), i).unwrap()))
                .collect();
            let rows: Vec<[Elem; 6]> = rs.iter().map(|&v| v2_raw(ext, v).0).collect();
            let s = Subspace::from_rows(ext, 5, &rows).unwrap();
            assert!(s.is_rational_over(base));
            return Subspace::from_rows(base, 5, &s.basis().to_rows()).unwrap();
        }
    }

    #[test]
    fn conjugate_triple_planes_are_disjoint() {
        let t = Tower::new(2, &[1, 2, 3]).unwrap();
        let ctx = GeomContext::new(t.field(2).unwrap(), t.field(3).unwrap()).unwrap();
        for seed in 0..5 {
            let plane = conjugate_triple_plane(&ctx, seed);
            let p = plane_profile(&ctx, &plane).unwrap();
            assert_eq!(p.rational_points, 0);
            assert_eq!(p.tag, ProfileTag::ThreeConjugateLines);
            let ext = p.extension.unwrap();
            assert_eq!(ext.lines.len(), 3);
            assert_eq!(ext.singular_points.len(), 3);
            assert_eq!(ext.veronese_points.len(), 3);
        }
    }

    #[test]
    fn lift_examples() {
        let f = field(4);
        assert_eq!(lift_collineation(&f, &Matrix::identity(3)).unwrap(), Matrix::identity(6));
        let sing = Matrix::from_rows(&[[1, 1, 0], [1, 1, 0], [0, 0, 1]]).unwrap();
        assert_eq!(lift_collineation(&f, &sing), Err(GeomError::SingularCollineation));
    }

    fn random_invertible(f: &Field, rng: &mut rand_chacha::ChaCha8Rng) -> Matrix {
        loop {
            let rows: Vec<Vec<Elem>> =
                (0..3).map(|_| (0..3).map(|_| rng.gen_range(0..f.order())).collect()).collect();
            let m = Matrix::from_rows(&rows).unwrap();
            if linalg::determinant(f, &m).unwrap() != 0 {
                return m;
            }
        }
    }

    #[test]
    fn lift_intertwines_v2_and_preserves_varieties() {
        for q in [3, 4] {
            let f = field(q);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
            for _ in 0..100 {
                let m = random_invertible(&f, &mut rng);
                let l = lift_collineation(&f, &m).unwrap();
                let p: Vec<Elem> = (0..3).map(|_| rng.gen_range(0..f.order())).collect();
                if p.iter().all(|&x| x == 0) {
                    continue;
                }
                let pm = linalg::vec_mul(&f, &p, &m);
                let lhs = apply_to_point(&f, &l, &v2_raw(&f, p.clone().try_into().unwrap()));
                let rhs = v2_raw(&f, pm.try_into().unwrap());
                assert_eq!(lhs, rhs);
                let t: [Elem; 6] = std::array::from_fn(|_| rng.gen_range(0..f.order()));
                let img = apply_to_point(&f, &l, &SymPoint(t));
                assert_eq!(secant_value(&f, &t) == 0, secant_value(&f, &img.0) == 0);
                if q == 4 {
                    let n = nucleus_plane(&f).unwrap();
                    assert_eq!(n.transform(&f, &l).unwrap(), n);
                }
            }
        }
    }

    #[test]
    fn lift_composition_is_a_homomorphism() {
        let f = field(4);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = random_invertible(&f, &mut rng);
            let b = random_invertible(&f, &mut rng);
            let la = lift_collineation(&f, &a).unwrap();
            let lb = lift_collineation(&f, &b).unwrap();
            let lab = lift_collineation(&f, &a.mul(&f, &b).unwrap()).unwrap();
            assert_eq!(la.mul(&f, &lb).unwrap(), lab);
        }
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }
}
