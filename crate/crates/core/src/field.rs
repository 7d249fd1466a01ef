//! Arithmetic in small finite fields organised as explicit towers.
//!
//! A [`Tower`] starts at the prime field `F_p` (level 0) and adds one level per
//! requested relative degree. Level `i` is `L_{i-1}[t] / (m_i(t))`, where `m_i`
//! is the least monic irreducible polynomial of the requested degree over
//! `L_{i-1}`. Polynomials are ordered by the integer `sum c_j * |L_{i-1}|^j`
//! over their non-leading coefficients, so the choice is reproducible.
//!
//! Elements are encoded as integers: an element of level `i` is
//! `sum enc(c_j) * |L_{i-1}|^j` where `c_j` are its coefficients over the
//! previous level. Consequences of this nested encoding:
//!
//! - the embedding of a lower level into a higher one is the identity on
//!   encodings, so embeddings compose trivially;
//! - an encoding lies in level `j` iff it is smaller than `|L_j|`;
//! - the base-`|L_j|` digits of an encoding are its coordinates over `L_j`;
//! - in characteristic 2 addition is XOR, in general it is digit-wise mod `p`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, Matrix};

/// Encoded field element. See the module docs for the encoding.
pub type Elem = u32;

/// Largest total degree `[top : F_p]` a tower may have.
pub const MAX_TOTAL_DEGREE: u32 = 24;

// Levels up to this order get exp/log tables.
const TABLE_LIMIT: u32 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("extension degrees must be positive")]
    ZeroDegree,
    #[error("total degree {total} exceeds the cap of {cap}")]
    DegreeCap { total: u32, cap: u32 },
    #[error("field of order {p}^{degree} does not fit the 32-bit element encoding")]
    OrderTooLarge { p: u32, degree: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("encoding {elem} is not an element of the field of order {order}")]
    NotInField { elem: Elem, order: u32 },
    #[error("subfield degree {sub} does not divide field degree {degree}")]
    NonDividingDegree { sub: u32, degree: u32 },
    #[error("tower has no level {0}")]
    NoSuchLevel(usize),
    #[error("fields belong to different towers")]
    MixedTowers,
    #[error("invalid modulus at level {level}: {reason}")]
    InvalidModulus { level: usize, reason: String },
    #[error("operation requires characteristic 2, field has characteristic {0}")]
    OddCharacteristic(u32),
    #[error("expected an extension of degree {expected} over the base, found {found}")]
    WrongExtensionDegree { expected: u32, found: u32 },
    #[error("no a with t^2 + a t + 1 irreducible was found (field arithmetic is inconsistent)")]
    NoQuadraticParam,
    #[error("element sequence is empty")]
    EmptySequence,
    #[error("{len} elements cannot be independent over a subfield of index {index}")]
    TooManyElements { len: usize, index: u32 },
}

pub type Result<T> = std::result::Result<T, FieldError>;

#[derive(Debug)]
struct LogTables {
    // exp has length 2 * (order - 1) so that log a + log b never needs a reduction
    exp: Vec<Elem>,
    log: Vec<u32>,
}

#[derive(Debug)]
struct Level {
    rel_degree: u32,
    abs_degree: u32,
    order: u32,
    // monic modulus over the previous level, constant term first, leading 1 included
    modulus: Vec<Elem>,
    tables: Option<LogTables>,
}

/// An immutable chain `F_p = L_0 ⊆ L_1 ⊆ ... ⊆ L_k`.
#[derive(Debug)]
pub struct Tower {
    p: u32,
    degrees: Vec<u32>,
    levels: Vec<Level>,
}

/// JSON form of a tower: the prime, the relative degrees and one modulus per level
/// (coefficients in previous-level encodings, constant term first, monic).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerDescriptor {
    pub p: u32,
    pub degrees: Vec<u32>,
    pub moduli: Vec<Vec<Elem>>,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Tower {
    /// Builds the tower `F_p ⊆ F_{p^{d_1}} ⊆ F_{p^{d_1 d_2}} ⊆ ...`.
    pub fn new(p: u32, degrees: &[u32]) -> Result<Arc<Tower>> {
        Self::build(p, degrees, None)
    }

    /// Rebuilds a tower from its descriptor. Supplied moduli must be monic,
    /// of the declared degree and irreducible over their base level.
    pub fn from_descriptor(desc: &TowerDescriptor) -> Result<Arc<Tower>> {
        if desc.moduli.len() != desc.degrees.len() {
            return Err(FieldError::InvalidModulus {
                level: desc.moduli.len().min(desc.degrees.len()) + 1,
                reason: "one modulus per degree is required".into(),
            });
        }
        Self::build(desc.p, &desc.degrees, Some(&desc.moduli))
    }

    fn build(p: u32, degrees: &[u32], moduli: Option<&[Vec<Elem>]>) -> Result<Arc<Tower>> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if degrees.iter().any(|&d| d == 0) {
            return Err(FieldError::ZeroDegree);
        }
        let total: u64 = degrees.iter().map(|&d| d as u64).product();
        if total > MAX_TOTAL_DEGREE as u64 {
            return Err(FieldError::DegreeCap {
                total: total.min(u32::MAX as u64) as u32,
                cap: MAX_TOTAL_DEGREE,
            });
        }
        let total = total as u32;
        if (p as u64).checked_pow(total).map_or(true, |o| o > u32::MAX as u64) {
            return Err(FieldError::OrderTooLarge { p, degree: total });
        }

        let mut tower = Tower {
            p,
            degrees: degrees.to_vec(),
            levels: vec![Level {
                rel_degree: 1,
                abs_degree: 1,
                order: p,
                modulus: vec![0, 1],
                tables: None,
            }],
        };
        if p <= TABLE_LIMIT {
            tower.levels[0].tables = Some(tower.build_tables(0));
        }

        for (i, &d) in degrees.iter().enumerate() {
            let base = i;
            let modulus = match moduli {
                Some(ms) => {
                    let m = ms[i].clone();
                    tower.check_modulus(base, d, &m)?;
                    m
                }
                None => tower.least_irreducible(base, d),
            };
            let prev = &tower.levels[base];
            let abs_degree = prev.abs_degree * d;
            tower.levels.push(Level {
                rel_degree: d,
                abs_degree,
                order: p.pow(abs_degree),
                modulus,
                tables: None,
            });
            let lvl = tower.levels.len() - 1;
            if tower.levels[lvl].order <= TABLE_LIMIT {
                let tables = tower.build_tables(lvl);
                tower.levels[lvl].tables = Some(tables);
            }
        }
        Ok(Arc::new(tower))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Number of levels including the prime field.
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn descriptor(&self) -> TowerDescriptor {
        TowerDescriptor {
            p: self.p,
            degrees: self.degrees.clone(),
            moduli: self.levels[1..].iter().map(|l| l.modulus.clone()).collect(),
        }
    }

    /// Field handle for level `level`.
    pub fn field(self: &Arc<Self>, level: usize) -> Result<Field> {
        if level >= self.levels.len() {
            return Err(FieldError::NoSuchLevel(level));
        }
        Ok(Field { tower: Arc::clone(self), level })
    }

    pub fn top(self: &Arc<Self>) -> Field {
        Field { tower: Arc::clone(self), level: self.levels.len() - 1 }
    }

    fn check_modulus(&self, base: usize, d: u32, m: &[Elem]) -> Result<()> {
        let level = base + 1;
        let order = self.levels[base].order;
        if m.len() != d as usize + 1 || m[d as usize] != 1 {
            return Err(FieldError::InvalidModulus {
                level,
                reason: format!("expected a monic polynomial of degree {d}"),
            });
        }
        if m.iter().any(|&c| c >= order) {
            return Err(FieldError::InvalidModulus {
                level,
                reason: "coefficient outside the base level".into(),
            });
        }
        if !self.is_irreducible(base, m) {
            return Err(FieldError::InvalidModulus { level, reason: "reducible".into() });
        }
        Ok(())
    }

    fn least_irreducible(&self, base: usize, d: u32) -> Vec<Elem> {
        let k = self.levels[base].order as u64;
        let count = k.pow(d);
        for idx in 0..count {
            let mut m = digits(idx, k, d as usize);
            m.push(1);
            if self.is_irreducible(base, &m) {
                return m;
            }
        }
        unreachable!("irreducible polynomials of every degree exist over a finite field")
    }

    /// Exhaustive irreducibility test over level `base`: root search for degree
    /// at most 3, trial division by every monic polynomial of degree up to d/2
    /// otherwise.
    fn is_irreducible(&self, base: usize, m: &[Elem]) -> bool {
        let d = m.len() - 1;
        if d == 1 {
            return true;
        }
        let k = self.levels[base].order;
        if d <= 3 {
            return (0..k).all(|x| self.poly_eval(base, m, x) != 0);
        }
        for e in 1..=d / 2 {
            for idx in 0..(k as u64).pow(e as u32) {
                let mut f = digits(idx, k as u64, e);
                f.push(1);
                if self.poly_rem(base, m, &f).iter().all(|&c| c == 0) {
                    return false;
                }
            }
        }
        true
    }

    fn poly_eval(&self, level: usize, m: &[Elem], x: Elem) -> Elem {
        m.iter().rev().fold(0, |acc, &c| self.add(self.mul_at(level, acc, x), c))
    }

    // Remainder of a modulo the monic polynomial b, both over level `level`.
    fn poly_rem(&self, level: usize, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let db = b.len() - 1;
        let mut r = a.to_vec();
        while r.len() > db {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - db;
            if lead != 0 {
                for (j, &bj) in b.iter().enumerate() {
                    let t = self.mul_at(level, lead, bj);
                    r[shift + j] = self.sub(r[shift + j], t);
                }
            }
            r.pop();
        }
        r
    }

    fn build_tables(&self, level: usize) -> LogTables {
        let order = self.levels[level].order;
        let n = (order - 1) as usize;
        let factors = prime_factors(n as u64);
        let g = (1..order)
            .find(|&g| {
                factors.iter().all(|&r| self.slow_pow(level, g, n as u64 / r) != 1)
            })
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = vec![0; 2 * n.max(1)];
        let mut log = vec![0; order as usize];
        let mut x: Elem = 1;
        for i in 0..n {
            exp[i] = x;
            log[x as usize] = i as u32;
            x = self.slow_mul(level, x, g);
        }
        for i in n..2 * n {
            exp[i] = exp[i - n];
        }
        LogTables { exp, log }
    }

    fn slow_pow(&self, level: usize, x: Elem, mut e: u64) -> Elem {
        let mut base = x;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(level, acc, base);
            }
            base = self.slow_mul(level, base, base);
            e >>= 1;
        }
        acc
    }

    // Schoolbook product over the previous level followed by reduction.
    fn slow_mul(&self, level: usize, a: Elem, b: Elem) -> Elem {
        if level == 0 {
            return ((a as u64 * b as u64) % self.p as u64) as Elem;
        }
        let lv = &self.levels[level];
        let base = level - 1;
        let k = self.levels[base].order as u64;
        let d = lv.rel_degree as usize;
        if d == 1 {
            return self.mul_at(base, a, b);
        }
        let da = digits(a as u64, k, d);
        let db = digits(b as u64, k, d);
        let mut prod = vec![0; 2 * d - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                let t = self.mul_at(base, x, y);
                prod[i + j] = self.add(prod[i + j], t);
            }
        }
        let r = self.poly_rem(base, &prod, &lv.modulus);
        undigits(&r, k)
    }

    fn mul_at(&self, level: usize, a: Elem, b: Elem) -> Elem {
        match &self.levels[level].tables {
            Some(t) => {
                if a == 0 || b == 0 {
                    0
                } else {
                    t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
                }
            }
            None => self.slow_mul(level, a, b),
        }
    }

    fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return a ^ b;
        }
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }
}

fn digits(mut x: u64, base: u64, len: usize) -> Vec<Elem> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((x % base) as Elem);
        x /= base;
    }
    out
}

fn undigits(ds: &[Elem], base: u64) -> Elem {
    ds.iter().rev().fold(0u64, |acc, &d| acc * base + d as u64) as Elem
}

/// Operation tag for [`Field::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Inv,
    Pow,
}

/// A level of a tower. Cheap to clone; all arithmetic is pure.
#[derive(Clone)]
pub struct Field {
    tower: Arc<Tower>,
    level: usize,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.tower.p, self.degree())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.tower, &other.tower) && self.level == other.level
    }
}

impl Eq for Field {}

impl Field {
    /// Convenience constructor for `GF(p^degree)` as a two-level tower.
    pub fn new(p: u32, degree: u32) -> Result<Field> {
        Ok(Tower::new(p, &[degree])?.top())
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn level(&self) -> usize {
        self.level
    }

    fn lv(&self) -> &Level {
        &self.tower.levels[self.level]
    }

    pub fn order(&self) -> u32 {
        self.lv().order
    }

    pub fn characteristic(&self) -> u32 {
        self.tower.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.lv().abs_degree
    }

    /// Monic modulus of this level over the previous one.
    pub fn modulus(&self) -> &[Elem] {
        &self.lv().modulus
    }

    /// Another level of the same tower.
    pub fn subfield(&self, level: usize) -> Result<Field> {
        if level > self.level {
            return Err(FieldError::NoSuchLevel(level));
        }
        self.tower.field(level)
    }

    /// The previous level of the tower, if any.
    pub fn base(&self) -> Option<Field> {
        self.level.checked_sub(1).map(|l| Field { tower: Arc::clone(&self.tower), level: l })
    }

    pub fn same_tower(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.tower, &other.tower)
    }

    #[inline]
    pub fn contains(&self, x: Elem) -> bool {
        x < self.order()
    }

    pub fn check(&self, x: Elem) -> Result<Elem> {
        if self.contains(x) {
            Ok(x)
        } else {
            Err(FieldError::NotInField { elem: x, order: self.order() })
        }
    }

    /// Elements in canonical enumeration order.
    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order()
    }

    /// Embedding of an element of the level `from` (identity on encodings).
    pub fn embed(&self, x: Elem, from: &Field) -> Result<Elem> {
        if !self.same_tower(from) {
            return Err(FieldError::MixedTowers);
        }
        if from.level > self.level {
            return Err(FieldError::NoSuchLevel(from.level));
        }
        from.check(x)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.tower.add(a, b)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.tower.sub(a, b)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.tower.neg(a)
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        debug_assert!(self.contains(a) && self.contains(b));
        self.tower.mul_at(self.level, a, b)
    }

    pub fn square(&self, a: Elem) -> Elem {
        self.mul(a, a)
    }

    pub fn pow(&self, x: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if x == 0 {
            return 0;
        }
        let n = (self.order() - 1) as u64;
        match &self.lv().tables {
            Some(t) => {
                let l = (t.log[x as usize] as u64 * (e % n)) % n;
                t.exp[l as usize]
            }
            None => self.tower.slow_pow(self.level, x, e % n + if e % n == 0 { n } else { 0 }),
        }
    }

    pub fn inv(&self, x: Elem) -> Result<Elem> {
        if x == 0 {
            return Err(FieldError::DivisionByZero);
        }
        match &self.lv().tables {
            Some(t) => {
                let n = self.order() - 1;
                Ok(t.exp[((n - t.log[x as usize]) % n) as usize])
            }
            None => Ok(self.pow(x, (self.order() - 2) as u64)),
        }
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Tagged dispatch. For `Pow` the second operand is the exponent; for `Inv`
    /// it is ignored. Encodings outside this level are rejected.
    pub fn arith(&self, op: ArithOp, x: Elem, y: Elem) -> Result<Elem> {
        self.check(x)?;
        match op {
            ArithOp::Add => Ok(self.add(x, self.check(y)?)),
            ArithOp::Mul => Ok(self.mul(x, self.check(y)?)),
            ArithOp::Inv => self.inv(x),
            ArithOp::Pow => Ok(self.pow(x, y as u64)),
        }
    }

    fn check_subdegree(&self, sub_degree: u32) -> Result<()> {
        if sub_degree == 0 || self.degree() % sub_degree != 0 {
            return Err(FieldError::NonDividingDegree { sub: sub_degree, degree: self.degree() });
        }
        Ok(())
    }

    /// `x^(s^i)` where `s = p^sub_degree` is the order of the subfield.
    pub fn frobenius(&self, x: Elem, sub_degree: u32, i: u32) -> Result<Elem> {
        self.check_subdegree(sub_degree)?;
        Ok(self.frobenius_unchecked(x, sub_degree, i))
    }

    pub(crate) fn frobenius_unchecked(&self, x: Elem, sub_degree: u32, i: u32) -> Elem {
        if x == 0 {
            return 0;
        }
        let n = (self.order() - 1) as u64;
        if n == 1 {
            return x;
        }
        let e = pow_mod(self.tower.p as u64, sub_degree as u64 * i as u64, n);
        // e == 0 cannot happen: n = p^D - 1 is coprime to p
        self.pow(x, e)
    }

    /// Relative trace down to the subfield of degree `sub_degree` over `F_p`.
    pub fn trace(&self, x: Elem, sub_degree: u32) -> Result<Elem> {
        self.check_subdegree(sub_degree)?;
        let m = self.degree() / sub_degree;
        let mut acc = 0;
        let mut y = x;
        for _ in 0..m {
            acc = self.add(acc, y);
            y = self.frobenius_unchecked(y, sub_degree, 1);
        }
        Ok(acc)
    }

    /// Frobenius power together with the trace, in one call.
    pub fn frobenius_trace(&self, x: Elem, sub_degree: u32, i: u32) -> Result<(Elem, Elem)> {
        Ok((self.frobenius(x, sub_degree, i)?, self.trace(x, sub_degree)?))
    }

    /// Coordinates of `x` over the tower level `sub` (base-`|sub|` digits).
    pub fn coordinates(&self, x: Elem, sub: &Field) -> Vec<Elem> {
        let k = sub.order() as u64;
        let len = (self.degree() / sub.degree()) as usize;
        digits(x as u64, k, len)
    }

    /// Inverse of [`Field::coordinates`].
    pub fn from_coordinates(&self, coords: &[Elem], sub: &Field) -> Elem {
        undigits(coords, sub.order() as u64)
    }

    /// Whether `elems` are linearly independent over the tower level `sub`.
    ///
    /// Computed twice: by the Moore determinant `det[x_j^(s^i)]` over this
    /// field and by the rank of the coordinate vectors over `sub`. A
    /// disagreement is a bug and panics.
    pub fn moore_independence(&self, elems: &[Elem], sub: &Field) -> Result<bool> {
        let moore = self.moore_determinant(elems, sub)? != 0;
        let rank = self.subfield_rank(elems, sub)?;
        assert_eq!(moore, rank == elems.len(), "Moore determinant and coordinate rank disagree");
        Ok(moore)
    }

    /// Determinant of the Moore matrix with rows of successive `s`-Frobenius powers.
    pub fn moore_determinant(&self, elems: &[Elem], sub: &Field) -> Result<Elem> {
        self.moore_prereq(elems, sub)?;
        let k = elems.len();
        let mut m = Matrix::zeros(k, k);
        for (j, &x) in elems.iter().enumerate() {
            let mut y = self.check(x)?;
            for i in 0..k {
                m.set(i, j, y);
                y = self.frobenius_unchecked(y, sub.degree(), 1);
            }
        }
        Ok(linalg::determinant(self, &m).expect("square by construction"))
    }

    /// Rank over `sub` of the coordinate vectors of `elems`.
    pub fn subfield_rank(&self, elems: &[Elem], sub: &Field) -> Result<usize> {
        self.moore_prereq(elems, sub)?;
        let rows: Vec<Vec<Elem>> = elems.iter().map(|&x| self.coordinates(x, sub)).collect();
        let m = Matrix::from_rows(&rows).expect("rows have equal length");
        Ok(linalg::rank(sub, &m))
    }

    fn moore_prereq(&self, elems: &[Elem], sub: &Field) -> Result<()> {
        if !self.same_tower(sub) {
            return Err(FieldError::MixedTowers);
        }
        if sub.level > self.level {
            return Err(FieldError::NoSuchLevel(sub.level));
        }
        if elems.is_empty() {
            return Err(FieldError::EmptySequence);
        }
        let index = self.degree() / sub.degree();
        if elems.len() > index as usize {
            return Err(FieldError::TooManyElements { len: elems.len(), index });
        }
        Ok(())
    }
}

fn pow_mod(base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    let mut b = base % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// The pair `(a, ξ)` with `t^2 + a t + 1` irreducible over `F_q` and `ξ` a root in `F_{q^2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticParam {
    pub a: Elem,
    pub xi: Elem,
}

impl QuadraticParam {
    /// Least `a` (in enumeration order) making `t^2 + a t + 1` irreducible over
    /// `base`, and the least root of it in `ext`, which must be quadratic over `base`.
    pub fn find(base: &Field, ext: &Field) -> Result<QuadraticParam> {
        if base.characteristic() != 2 {
            return Err(FieldError::OddCharacteristic(base.characteristic()));
        }
        if !base.same_tower(ext) {
            return Err(FieldError::MixedTowers);
        }
        if ext.degree() != 2 * base.degree() {
            return Err(FieldError::WrongExtensionDegree {
                expected: 2,
                found: ext.degree() / base.degree(),
            });
        }
        let eval = |f: &Field, a: Elem, t: Elem| f.add(f.add(f.mul(t, t), f.mul(a, t)), 1);
        let a = base
            .elements()
            .find(|&a| base.elements().all(|t| eval(base, a, t) != 0))
            .ok_or(FieldError::NoQuadraticParam)?;
        let xi = ext
            .elements()
            .find(|&t| eval(ext, a, t) == 0)
            .ok_or(FieldError::NoQuadraticParam)?;
        Ok(QuadraticParam { a, xi })
    }

    /// Whether the stored pair satisfies `ξ^2 = aξ + 1` with `t^2 + a t + 1` rootless over `base`.
    pub fn is_valid(&self, base: &Field, ext: &Field) -> bool {
        base.contains(self.a)
            && ext.contains(self.xi)
            && ext.square(self.xi) == ext.add(ext.mul(self.a, self.xi), 1)
            && base.elements().all(|t| {
                base.add(base.add(base.square(t), base.mul(self.a, t)), 1) != 0
            })
    }

    /// Splits `c ∈ F_{q^2}` as `c0 + c1 ξ` with `c0, c1 ∈ F_q`.
    pub fn split(&self, ext: &Field, base: &Field, c: Elem) -> (Elem, Elem) {
        let sd = base.degree();
        let cq = ext.frobenius_unchecked(c, sd, 1);
        let xq = ext.frobenius_unchecked(self.xi, sd, 1);
        let c1 = ext.div(ext.sub(c, cq), ext.sub(self.xi, xq)).expect("ξ is not in the base field");
        let c0 = ext.sub(c, ext.mul(c1, self.xi));
        debug_assert!(base.contains(c0) && base.contains(c1));
        (c0, c1)
    }

    pub fn join(&self, ext: &Field, c0: Elem, c1: Elem) -> Elem {
        ext.add(c0, ext.mul(c1, self.xi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Field {
        Tower::new(2, &[1, 2]).unwrap().top()
    }

    #[test]
    fn create_tower_examples() {
        let t = Tower::new(2, &[1, 2]).unwrap();
        assert_eq!(t.num_levels(), 3);
        assert_eq!(t.top().order(), 4);
        let t = Tower::new(2, &[2, 2, 3]).unwrap();
        let orders: Vec<u32> = (0..t.num_levels()).map(|l| t.field(l).unwrap().order()).collect();
        assert_eq!(orders, vec![2, 4, 16, 4096]);
        let t = Tower::new(3, &[1, 2]).unwrap();
        assert_eq!(t.top().order(), 9);
    }

    #[test]
    fn create_tower_errors() {
        assert_eq!(Tower::new(4, &[2]).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(Tower::new(2, &[2, 0]).unwrap_err(), FieldError::ZeroDegree);
        assert!(matches!(Tower::new(2, &[5, 5]).unwrap_err(), FieldError::DegreeCap { .. }));
        assert!(matches!(Tower::new(3, &[3, 7]).unwrap_err(), FieldError::OrderTooLarge { .. }));
    }

    #[test]
    fn moduli_are_least_irreducible() {
        // F4 = F2[t]/(t^2+t+1), F8 = F2[t]/(t^3+t+1)
        assert_eq!(Field::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(Field::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        // over F4 the least irreducible quadratic is t^2 + t + ω (ω encoded as 2)
        let t = Tower::new(2, &[2, 2]).unwrap();
        assert_eq!(t.top().modulus(), &[2, 1, 1]);
        // F9 = F3[t]/(t^2+1)
        assert_eq!(Field::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn arith_examples() {
        let f = f4();
        let xi = 2;
        assert_eq!(f.mul(xi, xi), 3); // ξ^2 = ξ + 1
        assert_eq!(f.inv(1).unwrap(), 1);
        assert_eq!(f.inv(0), Err(FieldError::DivisionByZero));
        assert_eq!(f.arith(ArithOp::Add, 4, 1), Err(FieldError::NotInField { elem: 4, order: 4 }));
        let f8 = Field::new(2, 3).unwrap();
        for g in 1..8 {
            assert_eq!(f8.pow(g, 7), 1);
        }
        let t = Tower::new(2, &[1, 2, 3]).unwrap();
        let f64_ = t.top();
        for g in 1..64 {
            assert_eq!(f64_.pow(g, 63), 1);
        }
    }

    #[test]
    fn frobenius_trace_examples() {
        let f = f4();
        assert_eq!(f.trace(2, 1).unwrap(), 1);
        let t = Tower::new(2, &[1, 2, 3]).unwrap();
        let top = t.top();
        for x in top.elements() {
            assert_eq!(top.frobenius(x, 2, 3).unwrap(), x);
        }
        let f8 = Field::new(2, 3).unwrap();
        let ones = f8.elements().filter(|&x| f8.trace(x, 1).unwrap() == 1).count();
        assert_eq!(ones, 4);
        assert!(matches!(top.trace(5, 4), Err(FieldError::NonDividingDegree { .. })));
    }

    #[test]
    fn frobenius_fixes_exactly_the_subfield() {
        for (p, degs) in [(2u32, vec![2u32, 2]), (2, vec![1, 2, 3]), (3, vec![1, 2]), (2, vec![4])] {
            let t = Tower::new(p, &degs).unwrap();
            let top = t.top();
            for lvl in 0..t.num_levels() {
                let sub = t.field(lvl).unwrap();
                for x in top.elements() {
                    let fixed = top.frobenius(x, sub.degree(), 1).unwrap() == x;
                    assert_eq!(fixed, sub.contains(x), "p={p} degs={degs:?} level={lvl} x={x}");
                }
            }
            for x in top.elements() {
                for y in top.elements().step_by(3) {
                    let fx = top.frobenius(x, 1, 1).unwrap();
                    let fy = top.frobenius(y, 1, 1).unwrap();
                    assert_eq!(top.frobenius(top.mul(x, y), 1, 1).unwrap(), top.mul(fx, fy));
                    assert_eq!(top.frobenius(top.add(x, y), 1, 1).unwrap(), top.add(fx, fy));
                }
            }
        }
    }

    #[test]
    fn embedding_commutes_with_arithmetic() {
        let t = Tower::new(2, &[2, 2, 3]).unwrap();
        let (f4, f16, top) = (t.field(1).unwrap(), t.field(2).unwrap(), t.top());
        for a in f16.elements() {
            for b in f16.elements() {
                assert_eq!(f16.mul(a, b), top.mul(a, b));
                if a < 4 && b < 4 {
                    assert_eq!(f4.mul(a, b), f16.mul(a, b));
                }
            }
        }
        assert_eq!(top.embed(3, &f4), Ok(3));
    }

    #[test]
    fn slow_path_matches_tables() {
        let t = Tower::new(2, &[2, 2, 3]).unwrap();
        let top = t.top();
        for a in (0..4096).step_by(37) {
            for b in (0..4096).step_by(53) {
                assert_eq!(top.mul(a, b), t.slow_mul(3, a, b));
            }
        }
    }

    #[test]
    fn big_field_without_tables() {
        let f = Field::new(2, 21).unwrap();
        let x = 0x1234;
        let y = f.inv(x).unwrap();
        assert_eq!(f.mul(x, y), 1);
        assert_eq!(f.pow(x, (f.order() - 1) as u64), 1);
    }

    #[test]
    fn odd_characteristic_arithmetic() {
        let f = Tower::new(3, &[1, 2, 3]).unwrap().top();
        for a in f.elements().step_by(7) {
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn quadratic_param_examples() {
        let t = Tower::new(2, &[1, 2]).unwrap();
        let (f2, f4) = (t.field(1).unwrap(), t.top());
        let qp = QuadraticParam::find(&f2, &f4).unwrap();
        assert_eq!(qp.a, 1);
        assert_eq!(f4.mul(qp.xi, qp.xi), f4.add(qp.xi, 1));
        assert!(qp.is_valid(&f2, &f4));
        // a = 0 gives t^2 + 1 = (t + 1)^2
        assert!(!QuadraticParam { a: 0, xi: 1 }.is_valid(&f2, &f4));

        // q = 4: oracle is a root search over F4 for every candidate a
        let t = Tower::new(2, &[2, 2]).unwrap();
        let (b, e) = (t.field(1).unwrap(), t.top());
        let qp = QuadraticParam::find(&b, &e).unwrap();
        let rootless: Vec<Elem> = (0..4)
            .filter(|&a| (0..4).all(|x| b.add(b.add(b.mul(x, x), b.mul(a, x)), 1) != 0))
            .collect();
        assert_eq!(qp.a, rootless[0]);
        assert!(qp.is_valid(&b, &e));
        for c in e.elements() {
            let (c0, c1) = qp.split(&e, &b, c);
            assert_eq!(qp.join(&e, c0, c1), c);
        }
        let odd = Tower::new(3, &[1, 2]).unwrap();
        assert!(matches!(
            QuadraticParam::find(&odd.field(1).unwrap(), &odd.top()),
            Err(FieldError::OddCharacteristic(3))
        ));
    }

    #[test]
    fn moore_examples() {
        let t = Tower::new(2, &[1, 2]).unwrap();
        let (f2, f4) = (t.field(1).unwrap(), t.top());
        assert!(f4.moore_independence(&[1, 2], &f2).unwrap());
        let t = Tower::new(2, &[1, 2, 3]).unwrap();
        let (f4, top) = (t.field(2).unwrap(), t.top());
        let (x, y) = (5, 17);
        assert!(!top.moore_independence(&[x, y, top.add(x, y)], &f4).unwrap());
        assert_eq!(top.moore_independence(&[], &f4), Err(FieldError::EmptySequence));
        assert!(matches!(
            top.moore_independence(&[1, 2, 3, 4], &f4),
            Err(FieldError::TooManyElements { .. })
        ));
    }

    #[test]
    fn descriptor_round_trip() {
        let t = Tower::new(2, &[1, 2, 3]).unwrap();
        let d = t.descriptor();
        let json = serde_json::to_string(&d).unwrap();
        let back: TowerDescriptor = serde_json::from_str(&json).unwrap();
        let t2 = Tower::from_descriptor(&back).unwrap();
        assert_eq!(t2.descriptor(), d);
        let mut bad = d.clone();
        bad.moduli[1] = vec![1, 0, 1]; // t^2 + 1 over F2
        assert!(matches!(Tower::from_descriptor(&bad), Err(FieldError::InvalidModulus { .. })));
    }
}
