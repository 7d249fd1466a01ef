//! Rank-6 `F_q`-linear sets `{(x, y, z, F1, F2, F3)}` of `PG(5, q^2)` and the
//! cubic system `(f, g)` over `F_q` whose common zeros are the parameters of
//! points of the linear set on the secant variety.
//!
//! Parameters are `u = (x1, x2, y1, y2, z1, z2) ∈ F_q^6` with `x = x1 + ξ x2`
//! and so on; `F_i = l_i + ξ l_i'` where the six form rows are
//! `l1, l2, m1, m2, n1, n2` (so `F1 = l1 + ξ l2`, `F2 = m1 + ξ m2`,
//! `F3 = n1 + ξ n2`).

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Elem, Field, FieldError, QuadraticParam, Tower};
use crate::proj::{self, ProjPoint};
use crate::veronese::secant_value;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinsetError {
    #[error("invalid linear set spec: {0}")]
    InvalidSpec(String),
    #[error("q = {q} exceeds the enumeration limit {max}")]
    OversizedQ { q: u32, max: u32 },
    #[error("linear sets are only implemented in characteristic 2 (q = {0})")]
    OddCharacteristic(u32),
    #[error("direct and (f,g) disjointness verdicts disagree")]
    OracleMismatch,
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Result<T> = std::result::Result<T, LinsetError>;

/// Largest `q` for point enumeration of a linear set.
pub const MAX_POINTS_Q: u32 = 4;
/// Largest `q` for brute-force zero finding of `(f, g)`.
pub const MAX_ZEROS_Q: u32 = 16;

/// `F_q ⊂ F_{q^2} ⊂ F_{q^6}` for `q = 2^e`, built as the tower `(2, [e, 2, 3])`.
#[derive(Clone, Debug)]
pub struct LinsetContext {
    pub base: Field,
    pub ext: Field,
    /// The cubic extension of `ext`, used by plane profiles.
    pub top: Field,
    pub param: QuadraticParam,
}

impl LinsetContext {
    pub fn for_q(q: u32) -> Result<LinsetContext> {
        if q < 2 || !q.is_power_of_two() {
            return Err(LinsetError::OddCharacteristic(q));
        }
        let e = q.trailing_zeros();
        let tower = Tower::new(2, &[e, 2, 3])?;
        Self::from_tower(&tower, 1)
    }

    /// Uses levels `level` and `level + 1` of `tower` as `F_q` and `F_{q^2}`.
    pub fn from_tower(tower: &Arc<Tower>, level: usize) -> Result<LinsetContext> {
        let base = tower.field(level)?;
        let ext = tower.field(level + 1)?;
        let top = tower.field(level + 2)?;
        if base.characteristic() != 2 {
            return Err(LinsetError::OddCharacteristic(base.order()));
        }
        let param = QuadraticParam::find(&base, &ext)?;
        Ok(LinsetContext { base, ext, top, param })
    }

    pub fn q(&self) -> u32 {
        self.base.order()
    }

    /// The quadratic parameter for a given `a`: `ξ` is the least root of `t^2 + a t + 1`.
    pub fn param_for(&self, a: Elem) -> Result<QuadraticParam> {
        if a == self.param.a {
            return Ok(self.param);
        }
        if !self.base.contains(a) {
            return Err(LinsetError::InvalidSpec(format!("a = {a} is not in F_{}", self.q())));
        }
        let xi = self
            .ext
            .elements()
            .find(|&t| self.ext.add(self.ext.add(self.ext.square(t), self.ext.mul(a, t)), 1) == 0);
        let p = xi.map(|xi| QuadraticParam { a, xi });
        match p {
            Some(p) if p.is_valid(&self.base, &self.ext) => Ok(p),
            _ => Err(LinsetError::InvalidSpec(format!("t^2 + {a} t + 1 is reducible over F_{}", self.q()))),
        }
    }
}

/// Six `F_q`-linear forms on `(x1, x2, y1, y2, z1, z2)` plus the parameter `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearSetSpec {
    pub a: Elem,
    pub forms: [[Elem; 6]; 6],
}

impl LinearSetSpec {
    pub fn zero(a: Elem) -> LinearSetSpec {
        LinearSetSpec { a, forms: [[0; 6]; 6] }
    }

    pub fn random<R: Rng + ?Sized>(ctx: &LinsetContext, rng: &mut R) -> LinearSetSpec {
        let q = ctx.q();
        let mut forms = [[0; 6]; 6];
        for row in forms.iter_mut() {
            for c in row.iter_mut() {
                *c = rng.gen_range(0..q);
            }
        }
        LinearSetSpec { a: ctx.param.a, forms }
    }

    pub fn validate(&self, ctx: &LinsetContext) -> Result<QuadraticParam> {
        for row in &self.forms {
            if let Some(&c) = row.iter().find(|&&c| !ctx.base.contains(c)) {
                return Err(LinsetError::InvalidSpec(format!("form coefficient {c} is not in F_{}", ctx.q())));
            }
        }
        ctx.param_for(self.a)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn from_json(s: &str) -> Result<LinearSetSpec> {
        serde_json::from_str(s).map_err(|e| LinsetError::InvalidSpec(e.to_string()))
    }
}

/// Evaluates the point `(x, y, z, F1, F2, F3)` of `F_{q^2}^6` at parameter `u`.
pub fn point_vector(ctx: &LinsetContext, param: &QuadraticParam, spec: &LinearSetSpec, u: &[Elem]) -> [Elem; 6] {
    let (b, e) = (&ctx.base, &ctx.ext);
    let form = |r: usize| -> Elem {
        spec.forms[r].iter().zip(u).fold(0, |acc, (&c, &x)| b.add(acc, b.mul(c, x)))
    };
    let join = |c0: Elem, c1: Elem| param.join(e, c0, c1);
    [
        join(u[0], u[1]),
        join(u[2], u[3]),
        join(u[4], u[5]),
        join(form(0), form(1)),
        join(form(2), form(3)),
        join(form(4), form(5)),
    ]
}

/// Parameter of a point vector whose first three coordinates are `(x, y, z)`.
fn params_of_xyz(ctx: &LinsetContext, param: &QuadraticParam, w: &[Elem]) -> [Elem; 6] {
    let mut u = [0; 6];
    for i in 0..3 {
        let (c0, c1) = param.split(&ctx.ext, &ctx.base, w[i]);
        u[2 * i] = c0;
        u[2 * i + 1] = c1;
    }
    u
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub point: ProjPoint,
    pub weight: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinsetPoints {
    pub q: u32,
    /// Sorted by point coordinates.
    pub points: Vec<WeightedPoint>,
}

impl LinsetPoints {
    /// `Σ (q^w(P) - 1)`, which equals `q^6 - 1` for a rank-6 linear set.
    pub fn weighted_cardinality(&self) -> u64 {
        self.points.iter().map(|p| (self.q as u64).pow(p.weight as u32) - 1).sum()
    }

    pub fn all_weight_two(&self) -> bool {
        self.points.iter().all(|p| p.weight == 2)
    }
}

/// Points of the linear set with their weights.
///
/// The weight of `P` is 2 iff `ξ` times a preimage vector of `P` lies again in
/// `W`; it is cross-checked against the number of projective preimages.
pub fn linset_points(ctx: &LinsetContext, spec: &LinearSetSpec) -> Result<LinsetPoints> {
    let q = ctx.q();
    if q > MAX_POINTS_Q {
        return Err(LinsetError::OversizedQ { q, max: MAX_POINTS_Q });
    }
    let param = spec.validate(ctx)?;
    let ext = &ctx.ext;
    let mut preimages: BTreeMap<Vec<Elem>, (u64, [Elem; 6])> = BTreeMap::new();
    for u in proj::projective_vectors(q, 6) {
        let w = point_vector(ctx, &param, spec, &u);
        let p = proj::normalize(ext, &w).expect("W meets x = y = z = 0 trivially");
        preimages.entry(p.into_coords()).or_insert((0, w)).0 += 1;
    }
    let mut points = Vec::with_capacity(preimages.len());
    for (coords, (count, w)) in preimages {
        let xw: Vec<Elem> = w.iter().map(|&c| ext.mul(param.xi, c)).collect();
        let u2 = params_of_xyz(ctx, &param, &xw);
        let weight = if point_vector(ctx, &param, spec, &u2)[..] == xw[..] { 2 } else { 1 };
        let expected = if weight == 2 { q as u64 + 1 } else { 1 };
        assert_eq!(count, expected, "weight test disagrees with the preimage count");
        points.push(WeightedPoint { point: ProjPoint::new(ext, &coords).expect("nonzero"), weight });
    }
    Ok(LinsetPoints { q, points })
}

/// Monomial exponent vector over `(x1, x2, y1, y2, z1, z2)`.
pub type Monomial = [u8; 6];
/// Sparse polynomial; zero coefficients are never stored.
pub type Poly = BTreeMap<Monomial, Elem>;

fn poly_add_term(field: &Field, p: &mut Poly, m: Monomial, c: Elem) {
    if c == 0 {
        return;
    }
    let slot = p.entry(m).or_insert(0);
    *slot = field.add(*slot, c);
    if *slot == 0 {
        p.remove(&m);
    }
}

fn poly_add(field: &Field, a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (&m, &c) in b {
        poly_add_term(field, &mut out, m, c);
    }
    out
}

fn poly_mul(field: &Field, a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, &ca) in a {
        for (mb, &cb) in b {
            let m: Monomial = std::array::from_fn(|i| ma[i] + mb[i]);
            poly_add_term(field, &mut out, m, field.mul(ca, cb));
        }
    }
    out
}

fn poly_scale(field: &Field, a: &Poly, s: Elem) -> Poly {
    let mut out = Poly::new();
    for (&m, &c) in a {
        poly_add_term(field, &mut out, m, field.mul(s, c));
    }
    out
}

fn var(k: usize) -> Monomial {
    let mut m = [0; 6];
    m[k] = 1;
    m
}

fn linear(field: &Field, coeffs: &[Elem]) -> Poly {
    let mut p = Poly::new();
    for (k, &c) in coeffs.iter().enumerate() {
        poly_add_term(field, &mut p, var(k), c);
    }
    p
}

/// `(Σ c_k v_k)^2 = Σ c_k^2 v_k^2` in characteristic 2.
fn frobenius_square(field: &Field, coeffs: &[Elem]) -> Poly {
    let mut p = Poly::new();
    for (k, &c) in coeffs.iter().enumerate() {
        let mut m = [0; 6];
        m[k] = 2;
        poly_add_term(field, &mut p, m, field.square(c));
    }
    p
}

pub fn poly_eval(field: &Field, p: &Poly, u: &[Elem]) -> Elem {
    p.iter().fold(0, |acc, (m, &c)| {
        let mut t = c;
        for (k, &e) in m.iter().enumerate() {
            for _ in 0..e {
                t = field.mul(t, u[k]);
            }
        }
        field.add(acc, t)
    })
}

/// The pair of cubics with `secant(point(u)) = f(u) + ξ g(u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FGSystem {
    pub f: Poly,
    pub g: Poly,
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    monomial: Monomial,
    coeff: Elem,
}

#[derive(Serialize, Deserialize)]
struct FGRecord {
    f: Vec<TermRecord>,
    g: Vec<TermRecord>,
}

fn to_terms(p: &Poly) -> Vec<TermRecord> {
    p.iter().map(|(&monomial, &coeff)| TermRecord { monomial, coeff }).collect()
}

fn from_terms(field: Option<&Field>, terms: Vec<TermRecord>) -> Poly {
    let mut p = Poly::new();
    for t in terms {
        match field {
            Some(f) => poly_add_term(f, &mut p, t.monomial, t.coeff),
            None if t.coeff != 0 => {
                p.insert(t.monomial, t.coeff);
            }
            None => {}
        }
    }
    p
}

impl Serialize for FGSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FGRecord { f: to_terms(&self.f), g: to_terms(&self.g) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FGSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FGRecord::deserialize(d)?;
        Ok(FGSystem { f: from_terms(None, r.f), g: from_terms(None, r.g) })
    }
}

impl FGSystem {
    pub fn is_homogeneous_cubic(&self) -> bool {
        self.f.keys().chain(self.g.keys()).all(|m| m.iter().map(|&e| e as u32).sum::<u32>() == 3)
    }

    pub fn coeff(&self, which: char, m: Monomial) -> Elem {
        let p = if which == 'f' { &self.f } else { &self.g };
        p.get(&m).copied().unwrap_or(0)
    }

    /// `α f + β g`.
    pub fn combination(&self, field: &Field, alpha: Elem, beta: Elem) -> Poly {
        poly_add(field, &poly_scale(field, &self.f, alpha), &poly_scale(field, &self.g, beta))
    }

    pub fn eval(&self, field: &Field, u: &[Elem]) -> (Elem, Elem) {
        (poly_eval(field, &self.f, u), poly_eval(field, &self.g, u))
    }
}

/// `x1x2y1, x1x2y2, x1x2z1, x1x2z2`.
pub const FORBIDDEN_MONOMIALS: [Monomial; 4] =
    [[1, 1, 1, 0, 0, 0], [1, 1, 0, 1, 0, 0], [1, 1, 0, 0, 1, 0], [1, 1, 0, 0, 0, 1]];

/// Whether no `α f + β g` contains a forbidden monomial, checked symbolically
/// on every combination.
pub fn forbidden_monomials_absent(field: &Field, sys: &FGSystem) -> bool {
    field.elements().all(|alpha| {
        field.elements().all(|beta| {
            let c = sys.combination(field, alpha, beta);
            FORBIDDEN_MONOMIALS.iter().all(|m| !c.contains_key(m))
        })
    })
}

/// Expands `x y z + x F3^2 + y F2^2 + z F1^2` over `F_{q^2}` and splits every
/// coefficient along `{1, ξ}`; the result is checked against the closed form.
pub fn derive_fg(ctx: &LinsetContext, spec: &LinearSetSpec) -> Result<FGSystem> {
    let param = spec.validate(ctx)?;
    let sys = expand_fg(ctx, &param, spec);
    assert_eq!(sys, closed_form_fg(&ctx.base, spec), "expansion disagrees with the closed form");
    Ok(sys)
}

fn expand_fg(ctx: &LinsetContext, param: &QuadraticParam, spec: &LinearSetSpec) -> FGSystem {
    let e = &ctx.ext;
    let coord = |i: usize| -> Poly {
        let mut p = Poly::new();
        poly_add_term(e, &mut p, var(2 * i), 1);
        poly_add_term(e, &mut p, var(2 * i + 1), param.xi);
        p
    };
    let big_f = |i: usize| -> Poly {
        let coeffs: Vec<Elem> =
            (0..6).map(|k| param.join(e, spec.forms[2 * i][k], spec.forms[2 * i + 1][k])).collect();
        linear(e, &coeffs)
    };
    let (x, y, z) = (coord(0), coord(1), coord(2));
    let sq = |p: &Poly| poly_mul(e, p, p);
    let mut total = poly_mul(e, &poly_mul(e, &x, &y), &z);
    total = poly_add(e, &total, &poly_mul(e, &x, &sq(&big_f(2))));
    total = poly_add(e, &total, &poly_mul(e, &y, &sq(&big_f(1))));
    total = poly_add(e, &total, &poly_mul(e, &z, &sq(&big_f(0))));
    let (mut f, mut g) = (Poly::new(), Poly::new());
    for (&m, &c) in &total {
        let (c0, c1) = param.split(e, &ctx.base, c);
        poly_add_term(&ctx.base, &mut f, m, c0);
        poly_add_term(&ctx.base, &mut g, m, c1);
    }
    FGSystem { f, g }
}

/// The displayed closed forms of `f` and `g` with `l, m, n` substituted.
pub fn closed_form_fg(base: &Field, spec: &LinearSetSpec) -> FGSystem {
    let b = base;
    let a = spec.a;
    let v = |k: usize| linear(b, &{
        let mut c = [0; 6];
        c[k] = 1;
        c
    });
    let (x1, x2, y1, y2, z1, z2) = (v(0), v(1), v(2), v(3), v(4), v(5));
    let m3 = |p: &Poly, q: &Poly, r: &Poly| poly_mul(b, &poly_mul(b, p, q), r);
    let sq = |r: usize| frobenius_square(b, &spec.forms[r]);
    let (l1s, l2s, m1s, m2s, n1s, n2s) = (sq(0), sq(1), sq(2), sq(3), sq(4), sq(5));
    let sum = |ps: &[Poly]| ps.iter().fold(Poly::new(), |acc, p| poly_add(b, &acc, p));
    let mul = |p: &Poly, q: &Poly| poly_mul(b, p, q);

    let f = sum(&[
        m3(&x1, &y1, &z1),
        m3(&x1, &y2, &z2),
        m3(&x2, &y1, &z2),
        m3(&x2, &y2, &z1),
        poly_scale(b, &m3(&x2, &y2, &z2), a),
        mul(&x1, &n1s),
        mul(&y1, &m1s),
        mul(&z1, &l1s),
        mul(&x1, &n2s),
        mul(&y1, &m2s),
        mul(&z1, &l2s),
        poly_scale(b, &sum(&[mul(&x2, &n2s), mul(&y2, &m2s), mul(&z2, &l2s)]), a),
    ]);
    let a2p1 = b.add(b.square(a), 1);
    let g = sum(&[
        m3(&x1, &y1, &z2),
        m3(&x1, &y2, &z1),
        m3(&x2, &y1, &z1),
        mul(&x2, &n1s),
        mul(&y2, &m1s),
        mul(&z2, &l1s),
        poly_scale(
            b,
            &sum(&[
                m3(&x1, &y2, &z2),
                m3(&x2, &y1, &z2),
                m3(&x2, &y2, &z1),
                mul(&x1, &n2s),
                mul(&y1, &m2s),
                mul(&z1, &l2s),
            ]),
            a,
        ),
        poly_scale(
            b,
            &sum(&[m3(&x2, &y2, &z2), mul(&x2, &n2s), mul(&y2, &m2s), mul(&z2, &l2s)]),
            a2p1,
        ),
    ]);
    FGSystem { f, g }
}

/// Common projective zeros of `f` and `g` over `F_q`, in canonical order.
pub fn fg_zeros(base: &Field, sys: &FGSystem) -> Result<Vec<ProjPoint>> {
    let q = base.order();
    if q > MAX_ZEROS_Q {
        return Err(LinsetError::OversizedQ { q, max: MAX_ZEROS_Q });
    }
    Ok(proj::projective_vectors(q, 6)
        .filter(|u| sys.eval(base, u) == (0, 0))
        .map(|u| ProjPoint::new(base, &u).expect("nonzero"))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointVerdict {
    pub disjoint: bool,
    /// First point of the linear set on the secant variety, in parameter order.
    pub witness: Option<ProjPoint>,
    /// Parameter vector of the witness.
    pub witness_param: Option<Vec<Elem>>,
    pub meets_nucleus: bool,
    /// Number of `F_q`-projective parameters landing on the secant variety;
    /// equals the number of common zeros of `(f, g)`.
    pub secant_params: u64,
}

/// Decides disjointness from the secant variety by testing every parameter
/// directly, and cross-checks the verdict against the zeros of `(f, g)`.
pub fn disjoint_from_secant(ctx: &LinsetContext, spec: &LinearSetSpec) -> Result<DisjointVerdict> {
    let q = ctx.q();
    if q > MAX_POINTS_Q {
        return Err(LinsetError::OversizedQ { q, max: MAX_POINTS_Q });
    }
    let param = spec.validate(ctx)?;
    let ext = &ctx.ext;
    let mut witness = None;
    let mut direct = Vec::new();
    let mut meets_nucleus = false;
    for u in proj::projective_vectors(q, 6) {
        let w = point_vector(ctx, &param, spec, &u);
        meets_nucleus |= w[0] == 0 && w[1] == 0 && w[2] == 0;
        if secant_value(ext, &w) == 0 {
            if witness.is_none() {
                witness = Some((proj::normalize(ext, &w).expect("nonzero"), u.clone()));
            }
            direct.push(u);
        }
    }
    let sys = derive_fg(ctx, spec)?;
    let zeros: Vec<Vec<Elem>> = fg_zeros(&ctx.base, &sys)?.into_iter().map(|p| p.into_coords()).collect();
    if zeros != direct {
        return Err(LinsetError::OracleMismatch);
    }
    let (witness, witness_param) = match witness {
        Some((p, u)) => (Some(p), Some(u)),
        None => (None, None),
    };
    Ok(DisjointVerdict {
        disjoint: direct.is_empty(),
        witness,
        witness_param,
        meets_nucleus,
        secant_params: direct.len() as u64,
    })
}

/// [`disjoint_from_secant`] over a batch, in input order.
pub fn disjoint_batch(ctx: &LinsetContext, specs: &[LinearSetSpec]) -> Vec<Result<DisjointVerdict>> {
    specs.par_iter().map(|s| disjoint_from_secant(ctx, s)).collect()
}

/// A nonzero common zero of the linear form `h` and `g`, if one exists.
/// With 6 variables and total degree 4 one always does.
pub fn common_zero_with_linear(base: &Field, h: &[Elem; 6], g: &Poly) -> Option<Vec<Elem>> {
    proj::projective_vectors(base.order(), 6).find(|u| {
        let hu = h.iter().zip(u).fold(0, |acc, (&c, &x)| base.add(acc, base.mul(c, x)));
        hu == 0 && poly_eval(base, g, u) == 0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx2() -> LinsetContext {
        LinsetContext::for_q(2).unwrap()
    }

    #[test]
    fn context_parameters() {
        let c = ctx2();
        assert_eq!((c.base.order(), c.ext.order(), c.top.order()), (2, 4, 64));
        assert_eq!(c.param.a, 1);
        let c4 = LinsetContext::for_q(4).unwrap();
        assert_eq!((c4.base.order(), c4.ext.order(), c4.top.order()), (4, 16, 4096));
        assert!(c4.param.is_valid(&c4.base, &c4.ext));
        assert!(matches!(LinsetContext::for_q(3), Err(LinsetError::OddCharacteristic(3))));
        assert!(c.param_for(0).is_err());
    }

    #[test]
    fn zero_spec_is_a_plane_of_weight_two_points() {
        let c = ctx2();
        let pts = linset_points(&c, &LinearSetSpec::zero(1)).unwrap();
        assert_eq!(pts.points.len(), 21);
        assert!(pts.all_weight_two());
        assert!(pts.points.iter().all(|p| p.point.coords()[3..] == [0, 0, 0]));
        assert_eq!(pts.weighted_cardinality(), 63);
    }

    #[test]
    fn cardinality_identity_for_random_specs() {
        for q in [2, 4] {
            let c = LinsetContext::for_q(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(q as u64);
            let mut saw_weight_one = false;
            for _ in 0..20 {
                let pts = linset_points(&c, &LinearSetSpec::random(&c, &mut rng)).unwrap();
                saw_weight_one |= pts.points.iter().any(|p| p.weight == 1);
                assert_eq!(pts.weighted_cardinality(), (q as u64).pow(6) - 1);
            }
            assert!(saw_weight_one);
        }
    }

    #[test]
    fn oversized_q_is_rejected() {
        let c = LinsetContext::for_q(8).unwrap();
        let s = LinearSetSpec::zero(c.param.a);
        assert_eq!(linset_points(&c, &s), Err(LinsetError::OversizedQ { q: 8, max: 4 }));
    }

    #[test]
    fn zero_spec_fg_matches_display() {
        let c = ctx2();
        let sys = derive_fg(&c, &LinearSetSpec::zero(1)).unwrap();
        let f: Vec<Monomial> = sys.f.keys().copied().collect();
        let mut expect_f = vec![
            [1, 0, 1, 0, 1, 0],
            [1, 0, 0, 1, 0, 1],
            [0, 1, 1, 0, 0, 1],
            [0, 1, 0, 1, 1, 0],
            [0, 1, 0, 1, 0, 1],
        ];
        expect_f.sort();
        assert_eq!(f, expect_f);
        // a = 1: g = x1y1z2 + x1y2z1 + x2y1z1 + x1y2z2 + x2y1z2 + x2y2z1, (a^2 + 1) = 0
        let g: Vec<Monomial> = sys.g.keys().copied().collect();
        let mut expect_g = vec![
            [1, 0, 1, 0, 0, 1],
            [1, 0, 0, 1, 1, 0],
            [0, 1, 1, 0, 1, 0],
            [1, 0, 0, 1, 0, 1],
            [0, 1, 1, 0, 0, 1],
            [0, 1, 0, 1, 1, 0],
        ];
        expect_g.sort();
        assert_eq!(g, expect_g);
        assert!(sys.f.values().chain(sys.g.values()).all(|&c| c == 1));
    }

    #[test]
    fn fg_structure_for_random_specs() {
        for q in [2, 4] {
            let c = LinsetContext::for_q(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            for _ in 0..100 {
                let s = LinearSetSpec::random(&c, &mut rng);
                let sys = derive_fg(&c, &s).unwrap();
                assert!(sys.is_homogeneous_cubic());
                assert!(forbidden_monomials_absent(&c.base, &sys));
                assert_eq!(sys.coeff('f', [1, 0, 1, 0, 1, 0]), 1);
                assert_eq!(sys.coeff('g', [1, 0, 1, 0, 1, 0]), 0);
                assert_ne!(sys.f, sys.g);
            }
        }
    }

    #[test]
    fn fg_evaluates_the_secant_cubic() {
        // oracle: secant(point(u)) split along {1, ξ}
        let c = LinsetContext::for_q(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let s = LinearSetSpec::random(&c, &mut rng);
            let sys = derive_fg(&c, &s).unwrap();
            for _ in 0..50 {
                let u: Vec<Elem> = (0..6).map(|_| rng.gen_range(0..4)).collect();
                let w = point_vector(&c, &c.param, &s, &u);
                let split = c.param.split(&c.ext, &c.base, secant_value(&c.ext, &w));
                assert_eq!(sys.eval(&c.base, &u), split);
            }
        }
    }

    #[test]
    fn fg_json_roundtrip() {
        let c = ctx2();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sys = derive_fg(&c, &LinearSetSpec::random(&c, &mut rng)).unwrap();
        let js = serde_json::to_string(&sys).unwrap();
        assert!(js.starts_with("{\"f\":[{\"monomial\":["));
        let back: FGSystem = serde_json::from_str(&js).unwrap();
        assert_eq!(back, sys);
    }

    #[test]
    fn spec_json_roundtrip_and_validation() {
        let c = ctx2();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = LinearSetSpec::random(&c, &mut rng);
        assert_eq!(LinearSetSpec::from_json(&s.to_json()).unwrap(), s);
        let mut bad = s.clone();
        bad.forms[0][0] = 3;
        assert!(matches!(bad.validate(&c), Err(LinsetError::InvalidSpec(_))));
        assert!(LinearSetSpec::from_json("{\"a\":1}").is_err());
    }

    #[test]
    fn zero_spec_meets_the_secant_variety() {
        let c = ctx2();
        let s = LinearSetSpec::zero(1);
        let v = disjoint_from_secant(&c, &s).unwrap();
        assert!(!v.disjoint);
        assert_eq!(v.witness.unwrap().coords(), &[1, 0, 0, 0, 0, 0]);
        assert!(!v.meets_nucleus);
        let zeros = fg_zeros(&c.base, &derive_fg(&c, &s).unwrap()).unwrap();
        assert_eq!(zeros[0].coords(), &[1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn oracle_equivalence_on_random_specs() {
        for q in [2, 4] {
            let c = LinsetContext::for_q(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            let specs: Vec<_> = (0..if q == 2 { 300 } else { 5 })
                .map(|_| LinearSetSpec::random(&c, &mut rng))
                .collect();
            for v in disjoint_batch(&c, &specs) {
                v.unwrap();
            }
        }
    }

    #[test]
    fn chevalley_warning_sampled() {
        for q in [2, 4] {
            let c = LinsetContext::for_q(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(23);
            for _ in 0..if q == 2 { 100 } else { 10 } {
                let s = LinearSetSpec::random(&c, &mut rng);
                let sys = derive_fg(&c, &s).unwrap();
                let h: [Elem; 6] = std::array::from_fn(|_| rng.gen_range(0..q));
                assert!(common_zero_with_linear(&c.base, &h, &sys.g).is_some());
            }
        }
    }
}
