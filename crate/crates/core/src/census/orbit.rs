use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{timer, CensusError, CensusReport, DisjointCensus, Result, MAX_WITNESSES};
use crate::field::Elem;
use crate::linalg::{self, Matrix};
use crate::proj::{self, Subspace};
use crate::veronese::{lift_collineation, quick_profile, v2_preimage, GeomContext, SymPoint};

#[derive(Clone, Debug)]
pub struct OrbitOptions {
    pub pairs: usize,
    pub seed: u64,
    pub timing: bool,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions { pairs: 100, seed: 0, timing: false }
    }
}

/// The triple `(R, R^σ, R^{σ^2})` of a plane disjoint from the secant
/// variety, with `R` the least of the three canonical points.
pub fn triple_of_plane(ctx: &GeomContext, plane: &Subspace) -> Result<[[Elem; 3]; 3]> {
    let p = quick_profile(ctx, plane)?;
    let ext = p
        .extension
        .filter(|e| e.conjugate_triple && e.veronese_points.len() == 3)
        .ok_or_else(|| CensusError::Profile("plane is not of three-conjugate-lines type".into()))?;
    let mut pre: Vec<Vec<Elem>> = ext
        .veronese_points
        .iter()
        .map(|t| {
            v2_preimage(&ctx.ext, &SymPoint(*t))
                .map(|p| p.into_coords())
                .ok_or_else(|| CensusError::Profile("singular point off the Veronese surface".into()))
        })
        .collect::<Result<_>>()?;
    pre.sort();
    let r: [Elem; 3] = pre[0].clone().try_into().expect("3");
    let rs = r.map(|x| ctx.sigma(x));
    let rss = rs.map(|x| ctx.sigma(x));
    for v in [&rs, &rss] {
        let n = proj::normalize(&ctx.ext, v).expect("nonzero").into_coords();
        if !pre.contains(&n) {
            return Err(CensusError::Profile("singular points are not a Frobenius orbit".into()));
        }
    }
    Ok([r, rs, rss])
}

/// The collineation `M` over the base field with `R M = R'` for the
/// conjugate triples of two planes, if it exists.
fn connecting_matrix(ctx: &GeomContext, a: &[[Elem; 3]; 3], b: &[[Elem; 3]; 3]) -> Option<Matrix> {
    let x = Matrix::from_rows(a).expect("3x3");
    let y = Matrix::from_rows(b).expect("3x3");
    let m = linalg::inverse(&ctx.ext, &x).ok()?.mul(&ctx.ext, &y).ok()?;
    m.data().iter().all(|&e| ctx.base.contains(e)).then_some(m)
}

/// For seeded random pairs of census planes, builds the collineation taking
/// one conjugate triple to the other and checks that its lift maps plane to plane.
pub fn orbit_transitivity_check(census: &DisjointCensus, opts: &OrbitOptions) -> Result<CensusReport> {
    let start = timer(opts.timing);
    let ctx = &census.geom;
    let n = census.planes.len();
    if n == 0 {
        return Err(CensusError::InvalidParams("empty census".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pairs: Vec<(usize, usize)> = (0..opts.pairs).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    let probes: Vec<[Elem; 3]> = (0..opts.pairs)
        .map(|_| std::array::from_fn(|_| rng.gen_range(1..ctx.ext.order())))
        .collect();

    let mut needed: Vec<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
    needed.sort_unstable();
    needed.dedup();
    let triples: BTreeMap<usize, [[Elem; 3]; 3]> = needed
        .par_iter()
        .map(|&i| triple_of_plane(ctx, &census.planes[i]).map(|t| (i, t)))
        .collect::<Result<_>>()?;

    let outcomes: Vec<(bool, bool, serde_json::Value)> = pairs
        .par_iter()
        .zip(probes.par_iter())
        .map(|(&(i, j), probe)| {
            let (src, dst) = (&census.planes[i], &census.planes[j]);
            let Some(m) = connecting_matrix(ctx, &triples[&i], &triples[&j]) else {
                return (false, true, json!({"pair": [i, j], "reason": "no rational collineation"}));
            };
            let mapped = lift_collineation(&ctx.base, &m)
                .ok()
                .and_then(|l| src.transform(&ctx.base, &l).ok())
                .is_some_and(|img| img == *dst);
            // σ(P M) = σ(P) M since M is rational
            let pm = linalg::vec_mul(&ctx.ext, probe, &m);
            let lhs: Vec<Elem> = pm.iter().map(|&x| ctx.sigma(x)).collect();
            let sp: Vec<Elem> = probe.iter().map(|&x| ctx.sigma(x)).collect();
            let commutes = lhs == linalg::vec_mul(&ctx.ext, &sp, &m);
            (mapped, commutes, json!({"pair": [i, j], "matrix": m.to_rows()}))
        })
        .collect();

    let success = outcomes.iter().filter(|o| o.0).count() as u64;
    let mut r = CensusReport::new("orbit-check");
    r.param("q", census.linset.q())
        .param("pairs", opts.pairs as u64)
        .param("seed", opts.seed)
        .param("census_planes", n as u64);
    r.counts.insert("success".into(), success);
    r.counts.insert("failure".into(), opts.pairs as u64 - success);
    r.check("all-mapped", success == opts.pairs as u64)
        .check("sigma-commutes", outcomes.iter().all(|o| o.1));
    r.witnesses = outcomes
        .iter()
        .filter(|o| !o.0)
        .chain(outcomes.iter().filter(|o| o.0))
        .take(MAX_WITNESSES)
        .map(|o| o.2.clone())
        .collect();
    r.finish_timing(start);
    Ok(r)
}
