//! Exhaustive search for rank-6 linear sets of `PG(5, 4)` disjoint from the
//! secant variety (`q = 2`).
//!
//! A spec is three 12-bit codes, one per `F_i`: bits `0..6` hold the form
//! `l_i` and bits `6..12` the form `l_i'`, bit `k` being the coefficient of the
//! `k`-th parameter in `(x1, x2, y1, y2, z1, z2)`. A parameter vector `u` is a
//! 6-bit mask in the same order.
//!
//! Candidates are grouped in blocks `(F1, F2)` of 4096 values of `F3`. On
//! parameters with `x = 0` the secant value does not involve `F3`, so whole
//! blocks are rejected there; on the others the condition is `F3(u) != c_u`
//! for a value `c_u` fixed by the block, which is solved by intersecting
//! precomputed bitsets.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{timer, CensusError, CensusReport, Result, MAX_WITNESSES};
use crate::field::Elem;
use crate::linset::{disjoint_from_secant, linset_points, LinearSetSpec, LinsetContext};

const CODES: usize = 1 << 12;
const WORDS: usize = CODES / 64;

pub const SLICE_ID: &str = "f1-canonical";
const SLICE_DEFINITION: &str = "F1 is the least code in its orbit under F4* scalars on (x,y,z), \
diagonal collineations diag(d1,d2,d3) lifted to PG(5,4), and Frobenius; F2, F3 free";
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    RestrictedSlice,
    Full,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::RestrictedSlice => "restricted-slice",
            Strategy::Full => "full",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = CensusError;
    fn from_str(s: &str) -> Result<Strategy> {
        match s {
            "restricted-slice" => Ok(Strategy::RestrictedSlice),
            "full" => Ok(Strategy::Full),
            _ => Err(CensusError::InvalidParams(format!("unknown strategy {s:?}"))),
        }
    }
}

/// F4 tables taken from the field tower, plus the `{1, ξ}` coordinates.
struct F4 {
    mul: [[u8; 4]; 4],
    sq: [u8; 4],
    inv: [u8; 4],
    join: [[u8; 2]; 2],
    split: [(u8, u8); 4],
}

impl F4 {
    fn new(ctx: &LinsetContext) -> Result<F4> {
        let e = &ctx.ext;
        if ctx.q() != 2 {
            return Err(CensusError::InvalidParams(format!("the linear-set search needs q = 2, got {}", ctx.q())));
        }
        let mut t = F4 { mul: [[0; 4]; 4], sq: [0; 4], inv: [0; 4], join: [[0; 2]; 2], split: [(0, 0); 4] };
        for a in 0..4u32 {
            for b in 0..4u32 {
                t.mul[a as usize][b as usize] = e.mul(a, b) as u8;
            }
            t.sq[a as usize] = e.square(a) as u8;
            t.inv[a as usize] = if a == 0 { 0 } else { e.inv(a).expect("nonzero") as u8 };
        }
        for c0 in 0..2u32 {
            for c1 in 0..2u32 {
                let v = ctx.param.join(e, c0, c1) as u8;
                t.join[c0 as usize][c1 as usize] = v;
                t.split[v as usize] = (c0 as u8, c1 as u8);
            }
        }
        Ok(t)
    }

    #[inline]
    fn xyz(&self, u: u8) -> [u8; 3] {
        std::array::from_fn(|i| self.join[(u >> (2 * i) & 1) as usize][(u >> (2 * i + 1) & 1) as usize])
    }

    fn param_of(&self, xyz: [u8; 3]) -> u8 {
        (0..3).fold(0, |acc, i| {
            let (c0, c1) = self.split[xyz[i] as usize];
            acc | c0 << (2 * i) | c1 << (2 * i + 1)
        })
    }

    #[inline]
    fn fval(&self, code: u16, u: u8) -> u8 {
        let lo = ((code & 63) as u8 & u).count_ones() & 1;
        let hi = (((code >> 6) & 63) as u8 & u).count_ones() & 1;
        self.join[lo as usize][hi as usize]
    }

    #[inline]
    fn sqrt(&self, a: u8) -> u8 {
        // squaring is an involution on F4
        self.sq[a as usize]
    }

    /// `xyz + x F3^2 + y F2^2 + z F1^2`.
    #[inline]
    fn secant(&self, codes: [u16; 3], u: u8) -> u8 {
        let [x, y, z] = self.xyz(u);
        let m = &self.mul;
        let s = |c: u16| self.sq[self.fval(c, u) as usize];
        m[m[x as usize][y as usize] as usize][z as usize]
            ^ m[x as usize][s(codes[2]) as usize]
            ^ m[y as usize][s(codes[1]) as usize]
            ^ m[z as usize][s(codes[0]) as usize]
    }
}

fn codes_of(spec: &LinearSetSpec) -> [u16; 3] {
    let mask = |r: usize| (0..6).fold(0u16, |acc, k| acc | ((spec.forms[r][k] & 1) as u16) << k);
    std::array::from_fn(|i| mask(2 * i) | mask(2 * i + 1) << 6)
}

fn spec_of(a: Elem, codes: [u16; 3]) -> LinearSetSpec {
    let mut forms = [[0; 6]; 6];
    for i in 0..3 {
        for k in 0..6 {
            forms[2 * i][k] = (codes[i] >> k & 1) as Elem;
            forms[2 * i + 1][k] = (codes[i] >> (6 + k) & 1) as Elem;
        }
    }
    LinearSetSpec { a, forms }
}

/// The fixed order of the 63 test vectors: `x`-only, `y`-only, `z`-only, then the rest.
pub fn test_order() -> Vec<u8> {
    let axis: Vec<u8> = [1u8, 2, 3].iter().flat_map(|&v| [v, v << 2, v << 4]).collect();
    let mut order: Vec<u8> = [0usize, 3, 6, 1, 4, 7, 2, 5, 8].iter().map(|&i| axis[i]).collect();
    order.extend((1..64u8).filter(|u| !axis.contains(u)));
    order
}

/// Position in [`test_order`] of the first parameter whose point lies on the
/// secant variety, or `None` if the linear set is disjoint from it.
pub fn first_rejecting_vector(ctx: &LinsetContext, spec: &LinearSetSpec) -> Result<Option<usize>> {
    let t = F4::new(ctx)?;
    spec.validate(ctx)?;
    let codes = codes_of(spec);
    Ok(test_order().iter().position(|&u| t.secant(codes, u) == 0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionProfile {
    pub specs: u64,
    /// `survivors[k]`: specs not rejected by the first `k` test vectors.
    pub survivors: Vec<u64>,
}

impl RejectionProfile {
    pub fn is_monotone(&self) -> bool {
        self.survivors.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Survival counts of seeded random specs against the test vectors.
pub fn rejection_profile(ctx: &LinsetContext, specs: u64, seed: u64) -> Result<RejectionProfile> {
    let t = F4::new(ctx)?;
    let order = test_order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<[u16; 3]> = (0..specs).map(|_| std::array::from_fn(|_| rng.gen_range(0..CODES as u16))).collect();
    let hist = draws
        .par_chunks(1 << 14)
        .map(|chunk| {
            let mut h = vec![0u64; order.len() + 1];
            for &c in chunk {
                let k = order.iter().position(|&u| t.secant(c, u) == 0).unwrap_or(order.len());
                h[k] += 1;
            }
            h
        })
        .reduce(|| vec![0u64; order.len() + 1], |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        });
    // survivors[k] = specs rejected at position >= k
    let mut survivors = vec![0u64; order.len() + 1];
    let mut acc = 0;
    for k in (0..=order.len()).rev() {
        acc += hist[k];
        survivors[k] = acc;
    }
    Ok(RejectionProfile { specs, survivors })
}

/// An element of the normalization group: coordinatewise scaling of
/// `(x, y, z, F1, F2, F3)` by `λ (d1^2, d2^2, d3^2, d1 d2, d1 d3, d2 d3)`,
/// followed by Frobenius when `frobenius` is set. It preserves the secant variety.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    pub lambda: Elem,
    pub d: [Elem; 3],
    pub frobenius: bool,
}

impl Normalization {
    fn all() -> Vec<Normalization> {
        let mut out = Vec::new();
        for frobenius in [false, true] {
            for lambda in 1..4 {
                for d1 in 1..4 {
                    for d2 in 1..4 {
                        for d3 in 1..4 {
                            out.push(Normalization { lambda, d: [d1, d2, d3], frobenius });
                        }
                    }
                }
            }
        }
        out
    }

    fn multipliers(&self, t: &F4) -> [u8; 6] {
        let m = |a: u8, b: u8| t.mul[a as usize][b as usize];
        let l = self.lambda as u8;
        let [d1, d2, d3] = self.d.map(|x| x as u8);
        [
            m(l, m(d1, d1)),
            m(l, m(d2, d2)),
            m(l, m(d3, d3)),
            m(l, m(d1, d2)),
            m(l, m(d1, d3)),
            m(l, m(d2, d3)),
        ]
    }

    fn apply(&self, t: &F4, codes: [u16; 3]) -> [u16; 3] {
        let c = self.multipliers(t);
        let f = |i: usize, v: u8| {
            let w = t.mul[c[i] as usize][v as usize];
            if self.frobenius { t.sq[w as usize] } else { w }
        };
        let finv = |i: usize, v: u8| {
            let w = if self.frobenius { t.sqrt(v) } else { v };
            t.mul[t.inv[c[i] as usize] as usize][w as usize]
        };
        let mut out = [0u16; 3];
        for k in 0..6 {
            let u_new = 1u8 << k;
            let xyz_new = t.xyz(u_new);
            let u_old = t.param_of(std::array::from_fn(|i| finv(i, xyz_new[i])));
            for i in 0..3 {
                let v = f(3 + i, t.fval(codes[i], u_old));
                let (lo, hi) = t.split[v as usize];
                out[i] |= (lo as u16) << k | (hi as u16) << (6 + k);
            }
        }
        out
    }
}

/// Sorted least representatives of the orbits of `F1` codes.
pub fn canonical_f1_reps(ctx: &LinsetContext) -> Result<Vec<u16>> {
    let t = F4::new(ctx)?;
    let group = Normalization::all();
    let mut reps: Vec<u16> = (0..CODES as u16)
        .into_par_iter()
        .filter(|&c| group.iter().all(|g| g.apply(&t, [c, 0, 0])[0] >= c))
        .collect();
    reps.sort_unstable();
    Ok(reps)
}

/// Maps a spec into the slice: applies the group element sending `F1` to its
/// orbit representative (the first such element in a fixed order).
pub fn normalize_spec(ctx: &LinsetContext, spec: &LinearSetSpec) -> Result<(Normalization, LinearSetSpec)> {
    let t = F4::new(ctx)?;
    spec.validate(ctx)?;
    let codes = codes_of(spec);
    let group = Normalization::all();
    let best = group
        .iter()
        .map(|g| (g.apply(&t, codes)[0], *g))
        .min_by_key(|x| x.0)
        .expect("nonempty group")
        .1;
    Ok((best, spec_of(spec.a, best.apply(&t, codes))))
}

/// Applies a normalization to a full spec.
pub fn apply_normalization(ctx: &LinsetContext, g: &Normalization, spec: &LinearSetSpec) -> Result<LinearSetSpec> {
    let t = F4::new(ctx)?;
    Ok(spec_of(spec.a, g.apply(&t, codes_of(spec))))
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub strategy: Strategy,
    pub checkpoint: Option<PathBuf>,
    /// Candidates between checkpoints.
    pub checkpoint_every: u64,
    /// Stop after this many checkpoint segments, leaving the checkpoint behind.
    pub stop_after: Option<u64>,
    pub timing: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            strategy: Strategy::RestrictedSlice,
            checkpoint: None,
            checkpoint_every: 10_000_000,
            stop_after: None,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub q: u32,
    pub strategy: Strategy,
    pub slice: String,
    pub f1_classes: u64,
    pub total_blocks: u64,
    /// Next unprocessed block `(F1 index, F2)` in lexicographic order.
    pub cursor: u64,
    pub found: Vec<[u16; 3]>,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Checkpoint> {
        let s = fs::read_to_string(path)?;
        serde_json::from_str(&s).map_err(|e| CensusError::Checkpoint(format!("{}: {e}", path.display())))
    }

    /// Writes to a temporary sibling, then renames over `path`.
    pub fn store(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        fs::write(&tmp, serde_json::to_string(self).expect("checkpoint serializes"))?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    fn validate(&self, expect: &Checkpoint) -> Result<()> {
        let same = self.version == expect.version
            && self.q == expect.q
            && self.strategy == expect.strategy
            && self.slice == expect.slice
            && self.f1_classes == expect.f1_classes
            && self.total_blocks == expect.total_blocks;
        if !same {
            return Err(CensusError::Checkpoint("parameters do not match this search".into()));
        }
        if self.cursor > self.total_blocks {
            return Err(CensusError::Checkpoint("cursor beyond the search space".into()));
        }
        let sorted = self.found.windows(2).all(|w| w[0] < w[1]);
        if !sorted || self.found.iter().flatten().any(|&c| c as usize >= CODES) {
            return Err(CensusError::Checkpoint("found list is corrupt".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoundSpec {
    pub spec: LinearSetSpec,
    /// All points of weight 2, i.e. the linear set is a plane.
    pub plane: bool,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub report: CensusReport,
    pub found: Vec<FoundSpec>,
    /// False when stopped early by `stop_after`.
    pub complete: bool,
}

struct Engine {
    t: F4,
    /// Test vectors with `x != 0`, in test order.
    xs: Vec<u8>,
    /// Test vectors with `x = 0`, in test order.
    x0: Vec<u8>,
    /// `bits[u][v]`: codes `c` with `F(u) = v`.
    bits: Vec<[[u64; WORDS]; 4]>,
}

impl Engine {
    fn new(ctx: &LinsetContext) -> Result<Engine> {
        let t = F4::new(ctx)?;
        let order = test_order();
        let xs: Vec<u8> = order.iter().copied().filter(|u| u & 3 != 0).collect();
        let x0: Vec<u8> = order.iter().copied().filter(|u| u & 3 == 0).collect();
        let mut bits = vec![[[0u64; WORDS]; 4]; 64];
        for u in 1..64u8 {
            for c in 0..CODES as u16 {
                let v = t.fval(c, u);
                bits[u as usize][v as usize][c as usize / 64] |= 1 << (c % 64);
            }
        }
        Ok(Engine { t, xs, x0, bits })
    }

    /// The `F3` codes completing `(f1, f2)` to a disjoint spec.
    fn block(&self, f1: u16, f2: u16) -> Vec<u16> {
        let t = &self.t;
        let m = &t.mul;
        for &u in &self.x0 {
            if t.secant([f1, f2, 0], u) == 0 {
                return Vec::new();
            }
        }
        let mut allowed = [u64::MAX; WORDS];
        for &u in &self.xs {
            let [x, y, z] = t.xyz(u);
            let rest = m[m[x as usize][y as usize] as usize][z as usize]
                ^ m[y as usize][t.sq[t.fval(f2, u) as usize] as usize]
                ^ m[z as usize][t.sq[t.fval(f1, u) as usize] as usize];
            // x F3(u)^2 = rest is the forbidden case
            let bad = t.sqrt(m[t.inv[x as usize] as usize][rest as usize]);
            let mut any = 0;
            for (a, b) in allowed.iter_mut().zip(&self.bits[u as usize][bad as usize]) {
                *a &= !b;
                any |= *a;
            }
            if any == 0 {
                return Vec::new();
            }
        }
        let mut out = Vec::new();
        for (w, &word) in allowed.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros();
                out.push((w * 64) as u16 + b as u16);
                bits &= bits - 1;
            }
        }
        out
    }
}

fn fnv(found: &[[u16; 3]]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for c in found.iter().flatten() {
        for b in c.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    format!("{h:016x}")
}

/// Searches the chosen family for specs disjoint from the secant variety.
/// Every hit is re-verified by the direct test and the `(f, g)` oracle.
pub fn linset_search(ctx: &LinsetContext, opts: &SearchOptions) -> Result<SearchOutcome> {
    let start = timer(opts.timing);
    let engine = Engine::new(ctx)?;
    let f1s: Vec<u16> = match opts.strategy {
        Strategy::RestrictedSlice => canonical_f1_reps(ctx)?,
        Strategy::Full => (0..CODES as u16).collect(),
    };
    let total_blocks = f1s.len() as u64 * CODES as u64;
    let mut state = Checkpoint {
        version: CHECKPOINT_VERSION,
        q: ctx.q(),
        strategy: opts.strategy,
        slice: match opts.strategy {
            Strategy::RestrictedSlice => SLICE_ID.to_string(),
            Strategy::Full => "none".to_string(),
        },
        f1_classes: f1s.len() as u64,
        total_blocks,
        cursor: 0,
        found: Vec::new(),
    };
    if let Some(path) = &opts.checkpoint {
        if path.exists() {
            let loaded = Checkpoint::load(path)?;
            loaded.validate(&state)?;
            state = loaded;
        }
    }

    let segment = (opts.checkpoint_every / CODES as u64).max(1);
    let mut segments_done = 0u64;
    while state.cursor < total_blocks {
        if opts.stop_after.is_some_and(|n| segments_done >= n) {
            break;
        }
        let end = (state.cursor + segment).min(total_blocks);
        let hits: Vec<Vec<[u16; 3]>> = (state.cursor..end)
            .into_par_iter()
            .map(|b| {
                let f1 = f1s[(b / CODES as u64) as usize];
                let f2 = (b % CODES as u64) as u16;
                engine.block(f1, f2).into_iter().map(|f3| [f1, f2, f3]).collect()
            })
            .collect();
        state.found.extend(hits.into_iter().flatten());
        state.cursor = end;
        segments_done += 1;
        if let Some(path) = &opts.checkpoint {
            state.store(path)?;
        }
    }
    let complete = state.cursor == total_blocks;

    let verified: Vec<Result<FoundSpec>> = state
        .found
        .par_iter()
        .map(|&codes| {
            let spec = spec_of(ctx.param.a, codes);
            let v = disjoint_from_secant(ctx, &spec)?;
            if !v.disjoint {
                return Err(CensusError::Profile(format!("search hit {codes:?} meets the secant variety")));
            }
            let plane = linset_points(ctx, &spec)?.all_weight_two();
            Ok(FoundSpec { spec, plane })
        })
        .collect();
    let found = verified.into_iter().collect::<Result<Vec<_>>>()?;

    let candidates = state.cursor * CODES as u64;
    let planes = found.iter().filter(|f| f.plane).count() as u64;
    let mut r = CensusReport::new("search-linsets");
    r.param("q", ctx.q())
        .param("strategy", opts.strategy.as_str())
        .param("slice", state.slice.clone())
        .param(
            "slice_definition",
            match opts.strategy {
                Strategy::RestrictedSlice => SLICE_DEFINITION,
                Strategy::Full => "all 2^36 coefficient matrices",
            },
        )
        .param("f1_classes", f1s.len() as u64)
        .param("candidates", total_blocks * CODES as u64)
        .param("test_vectors", 63u64);
    r.counts.insert("rejected".into(), candidates - found.len() as u64);
    r.counts.insert("disjoint-plane".into(), planes);
    r.counts.insert("disjoint-non-plane".into(), found.len() as u64 - planes);
    r.check("oracle-agreement", true).check("found-digest", fnv(&state.found));
    r.witnesses = found
        .iter()
        .take(MAX_WITNESSES)
        .map(|f| json!({"a": f.spec.a, "forms": f.spec.forms, "plane": f.plane}))
        .collect();
    r.checkpoint = Some(json!({"cursor": state.cursor, "total_blocks": total_blocks, "complete": complete}));
    r.finish_timing(start);
    Ok(SearchOutcome { report: r, found, complete })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proj;
    use crate::veronese::secant_value;

    fn ctx() -> LinsetContext {
        LinsetContext::for_q(2).unwrap()
    }

    #[test]
    fn test_order_is_a_permutation() {
        let o = test_order();
        assert_eq!(o.len(), 63);
        assert_eq!(&o[..9], &[1, 2, 3, 4, 8, 12, 16, 32, 48]);
        let mut s = o.clone();
        s.sort();
        assert_eq!(s, (1..64).collect::<Vec<u8>>());
    }

    #[test]
    fn fast_secant_matches_generic() {
        let c = ctx();
        let t = F4::new(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let spec = LinearSetSpec::random(&c, &mut rng);
            let codes = codes_of(&spec);
            assert_eq!(spec_of(spec.a, codes), spec);
            for u in 1..64u8 {
                let uv: Vec<Elem> = (0..6).map(|k| (u >> k & 1) as Elem).collect();
                let w = crate::linset::point_vector(&c, &c.param, &spec, &uv);
                assert_eq!(t.secant(codes, u) as Elem, secant_value(&c.ext, &w));
            }
        }
    }

    #[test]
    fn zero_spec_rejected_first() {
        let c = ctx();
        assert_eq!(first_rejecting_vector(&c, &LinearSetSpec::zero(1)).unwrap(), Some(0));
    }

    #[test]
    fn block_matches_per_candidate_test() {
        let c = ctx();
        let e = Engine::new(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..400 {
            let f1 = rng.gen_range(0..CODES as u16);
            let f2 = rng.gen_range(0..CODES as u16);
            let got = e.block(f1, f2);
            let want: Vec<u16> =
                (0..CODES as u16).filter(|&f3| (1..64u8).all(|u| e.t.secant([f1, f2, f3], u) != 0)).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn normalizations_preserve_the_secant_count() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let group = Normalization::all();
        for _ in 0..30 {
            let spec = LinearSetSpec::random(&c, &mut rng);
            let before = disjoint_from_secant(&c, &spec).unwrap().secant_params;
            let g = group[rng.gen_range(0..group.len())];
            let image = apply_normalization(&c, &g, &spec).unwrap();
            assert_eq!(disjoint_from_secant(&c, &image).unwrap().secant_params, before);
            // the point set is mapped by the semilinear map
            let pts = linset_points(&c, &spec).unwrap();
            let img = linset_points(&c, &image).unwrap();
            assert_eq!(pts.points.len(), img.points.len());
        }
    }

    #[test]
    fn normalization_maps_points_to_points() {
        let c = ctx();
        let t = F4::new(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for g in Normalization::all().into_iter().step_by(7) {
            let spec = LinearSetSpec::random(&c, &mut rng);
            let image = apply_normalization(&c, &g, &spec).unwrap();
            let mult = g.multipliers(&t);
            let img_pts: std::collections::BTreeSet<_> =
                linset_points(&c, &image).unwrap().points.into_iter().map(|p| p.point).collect();
            for p in linset_points(&c, &spec).unwrap().points {
                let v: Vec<Elem> = p
                    .point
                    .coords()
                    .iter()
                    .zip(mult)
                    .map(|(&x, m)| {
                        let w = c.ext.mul(x, m as Elem);
                        if g.frobenius { c.ext.square(w) } else { w }
                    })
                    .collect();
                assert!(img_pts.contains(&proj::normalize(&c.ext, &v).unwrap()));
            }
        }
    }

    #[test]
    fn reps_cover_every_orbit() {
        let c = ctx();
        let reps = canonical_f1_reps(&c).unwrap();
        assert!(reps.len() < CODES / 10);
        assert_eq!(reps[0], 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let spec = LinearSetSpec::random(&c, &mut rng);
            let (_, n) = normalize_spec(&c, &spec).unwrap();
            assert!(reps.binary_search(&codes_of(&n)[0]).is_ok());
        }
    }

    #[test]
    fn rejection_profile_decays() {
        let p = rejection_profile(&ctx(), 20_000, 5).unwrap();
        assert_eq!(p.survivors[0], 20_000);
        assert!(p.is_monotone());
        assert!(p.survivors[1] < p.survivors[0] && p.survivors[10] < p.survivors[1]);
    }

    #[test]
    fn checkpoint_rejects_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        fs::write(&path, "{not json").unwrap();
        let opts = SearchOptions { checkpoint: Some(path.clone()), ..Default::default() };
        assert!(matches!(linset_search(&ctx(), &opts), Err(CensusError::Checkpoint(_))));
        let bad = Checkpoint {
            version: CHECKPOINT_VERSION,
            q: 2,
            strategy: Strategy::Full,
            slice: "none".into(),
            f1_classes: 1,
            total_blocks: 1,
            cursor: 0,
            found: vec![],
        };
        bad.store(&path).unwrap();
        assert!(matches!(linset_search(&ctx(), &opts), Err(CensusError::Checkpoint(_))));
    }
}
