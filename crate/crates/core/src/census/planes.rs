use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde_json::json;

use super::{timer, CensusError, CensusReport, Result, MAX_WITNESSES};
use crate::field::{Elem, Field};
use crate::linset::LinsetContext;
use crate::proj::{self, Subspace, SubspaceEnumerator, DEFAULT_BUDGET};
use crate::veronese::{
    quick_profile, v2_raw, CubicForm, GeomContext, ProfileTag, SpecialPlane, SymPoint,
};

#[derive(Clone, Debug)]
pub struct PlaneCensusOptions {
    pub timing: bool,
    /// Planes per parallel work unit.
    pub chunk: u128,
    pub budget: u128,
}

impl Default for PlaneCensusOptions {
    fn default() -> Self {
        PlaneCensusOptions { timing: false, chunk: 4096, budget: DEFAULT_BUDGET }
    }
}

fn chunks(total: u128, chunk: u128) -> Vec<std::ops::Range<u128>> {
    let chunk = chunk.max(1);
    (0..total.div_ceil(chunk)).map(|i| i * chunk..((i + 1) * chunk).min(total)).collect()
}

#[derive(Default)]
struct ClassifyChunk {
    tags: BTreeMap<ProfileTag, u64>,
    pointwise_only: u64,
    contained: Vec<(u128, Option<SpecialPlane>, Vec<Vec<Elem>>)>,
}

/// Profiles every plane of `PG(5, Q)`, classifies those inside the secant
/// variety and checks that no solid lies inside it.
pub fn classify_all_planes(order: u32, opts: &PlaneCensusOptions) -> Result<CensusReport> {
    let start = timer(opts.timing);
    let ctx = GeomContext::for_order(order)?;
    let base = &ctx.base;
    let planes = SubspaceEnumerator::new(base, 5, 2, opts.budget)?;
    let solids = SubspaceEnumerator::new(base, 5, 3, opts.budget)?;

    let parts: Vec<Result<ClassifyChunk>> = chunks(planes.count(), opts.chunk)
        .into_par_iter()
        .map(|range| {
            let mut out = ClassifyChunk::default();
            for (idx, plane) in range.clone().zip(planes.iter_range(range)) {
                let p = quick_profile(&ctx, &plane)?;
                *out.tags.entry(p.tag).or_default() += 1;
                if p.contained {
                    out.contained.push((idx, p.classification, plane.basis().to_rows()));
                } else if p.rational_points == p.plane_points {
                    out.pointwise_only += 1;
                }
            }
            Ok(out)
        })
        .collect();

    let mut tags: BTreeMap<ProfileTag, u64> = BTreeMap::new();
    let mut pointwise_only = 0;
    let mut contained = Vec::new();
    for part in parts {
        let part = part?;
        for (t, n) in part.tags {
            *tags.entry(t).or_default() += n;
        }
        pointwise_only += part.pointwise_only;
        contained.extend(part.contained);
    }
    let unclassified = contained.iter().filter(|c| c.1.is_none()).count() as u64;

    let contained_solids: u64 = chunks(solids.count(), opts.chunk)
        .into_par_iter()
        .map(|range| {
            solids
                .iter_range(range)
                .filter(|s| CubicForm::secant_restriction(base, s.basis()).is_zero())
                .count() as u64
        })
        .sum();

    let mut r = CensusReport::new("classify-planes");
    r.param("order", order).param("planes", planes.count() as u64).param("solids", solids.count() as u64);
    for tag in [
        ProfileTag::ContainedConic,
        ProfileTag::ContainedTangent,
        ProfileTag::ContainedNucleus,
        ProfileTag::HasRationalPoints,
        ProfileTag::ThreeConjugateLines,
        ProfileTag::Other,
    ] {
        r.counts.insert(tag.as_str().to_string(), tags.get(&tag).copied().unwrap_or(0));
    }
    r.check("contained", contained.len() as u64)
        .check("unclassified", unclassified)
        .check("classification-complete", unclassified == 0)
        .check("contained-solids", contained_solids)
        .check("maximality", contained_solids == 0)
        .check("pointwise-only-planes", pointwise_only);
    r.witnesses = contained
        .iter()
        .take(MAX_WITNESSES)
        .map(|(idx, kind, rows)| json!({"index": *idx as u64, "kind": kind, "basis": rows}))
        .collect();
    r.finish_timing(start);
    Ok(r)
}

/// Result of [`disjoint_plane_census`]; `planes` are in enumeration order.
#[derive(Clone, Debug)]
pub struct DisjointCensus {
    pub report: CensusReport,
    pub planes: Vec<Subspace>,
    pub geom: GeomContext,
    pub linset: LinsetContext,
}

/// Planes of `PG(5, base)` spanned by `v2(R), v2(R^σ), v2(R^{σ^2})` for
/// `R ∈ PG(2, ext)` with coordinates independent over `base`. Returns the
/// number of such points `R` and each plane with its multiplicity.
pub fn conjugate_triple_planes(base: &Field, ext: &Field) -> Result<(u64, BTreeMap<Subspace, u32>)> {
    let sd = base.degree();
    let rows: Vec<(Elem, Elem)> = ext.elements().flat_map(|a| ext.elements().map(move |b| (a, b))).collect();
    let found: Vec<Subspace> = rows
        .par_iter()
        .filter(|&&(a, b)| ext.moore_independence(&[1, a, b], base).expect("same tower"))
        .map(|&(a, b)| {
            let r = [1, a, b];
            let vs: Vec<[Elem; 6]> = (0..3)
                .map(|i| v2_raw(ext, r.map(|x| ext.frobenius_unchecked(x, sd, i))).0)
                .collect();
            let s = Subspace::from_rows(ext, 5, &vs).expect("valid rows");
            assert!(s.is_rational_over(base) && s.dim() == 2, "conjugate triple spans a rational plane");
            s
        })
        .collect();
    let mut planes: BTreeMap<Subspace, u32> = BTreeMap::new();
    for s in &found {
        *planes.entry(s.clone()).or_default() += 1;
    }
    Ok((found.len() as u64, planes))
}

/// Counts planes of `PG(5, q^2)` disjoint from the secant variety, profiles
/// each, and compares with the independent count of conjugate triples.
pub fn disjoint_plane_census(q: u32, opts: &PlaneCensusOptions) -> Result<DisjointCensus> {
    let start = timer(opts.timing);
    let lctx = LinsetContext::for_q(q)?;
    let ctx = GeomContext::new(lctx.ext.clone(), lctx.top.clone())?;
    let base = &ctx.base;
    let planes = SubspaceEnumerator::new(base, 5, 2, opts.budget)?;
    let vectors: Vec<Vec<Elem>> = proj::projective_vectors(base.order(), 3).collect();

    let parts: Vec<Result<Vec<(u128, Subspace, bool, bool, serde_json::Value)>>> = chunks(planes.count(), opts.chunk)
        .into_par_iter()
        .map(|range| {
            let mut out = Vec::new();
            for (idx, plane) in range.clone().zip(planes.iter_range(range)) {
                let cubic = CubicForm::secant_restriction(base, plane.basis());
                if vectors.iter().any(|y| cubic.eval(base, y) == 0) {
                    continue;
                }
                let p = quick_profile(&ctx, &plane)?;
                let ext = p.extension.as_ref().ok_or_else(|| CensusError::Profile("missing extension data".into()))?;
                let conforming = p.tag == ProfileTag::ThreeConjugateLines;
                let singular_on_v = ext.singular_points.len() == 3
                    && ext.singular_points.iter().all(|s| SymPoint(*s).is_veronese(&ctx.ext));
                let w = json!({"index": idx as u64, "basis": plane.basis().to_rows(), "singular_points": ext.singular_points});
                out.push((idx, plane, conforming, singular_on_v, w));
            }
            Ok(out)
        })
        .collect();

    let mut found = Vec::new();
    for part in parts {
        found.extend(part?);
    }
    let disjoint = found.len() as u64;
    let nonconforming = found.iter().filter(|f| !f.2).count() as u64;
    let singular_ok = found.iter().all(|f| f.3);

    let (triple_points, triple_planes) = conjugate_triple_planes(base, &ctx.ext)?;
    let census_set: BTreeSet<&Subspace> = found.iter().map(|f| &f.1).collect();
    let triple_set: BTreeSet<&Subspace> = triple_planes.keys().collect();
    let each_thrice = triple_planes.values().all(|&n| n == 3);

    let mut r = CensusReport::new("disjoint-planes");
    r.param("q", q)
        .param("field_order", base.order())
        .param("extension_order", ctx.ext.order())
        .param("planes", planes.count() as u64);
    r.counts.insert("disjoint".into(), disjoint);
    r.counts.insert("meets".into(), planes.count() as u64 - disjoint);
    r.check("three-conjugate-lines", nonconforming == 0)
        .check("nonconforming", nonconforming)
        .check("singular-points-on-veronese", singular_ok)
        .check("triple-points", triple_points)
        .check("triple-planes", triple_planes.len() as u64)
        .check("triples-per-plane-three", each_thrice)
        .check("double-oracle", triple_points % 3 == 0 && disjoint == triple_points / 3)
        .check("triple-planes-match", census_set == triple_set);
    r.witnesses = found
        .iter()
        .filter(|f| !f.2)
        .chain(found.iter().filter(|f| f.2))
        .take(MAX_WITNESSES)
        .map(|f| f.4.clone())
        .collect();
    r.finish_timing(start);
    Ok(DisjointCensus {
        report: r,
        planes: found.into_iter().map(|f| f.1).collect(),
        geom: ctx,
        linset: lctx,
    })
}
