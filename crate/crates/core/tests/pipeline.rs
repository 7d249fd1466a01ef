use std::fs;

use symspread_core::census::{
    classify_all_planes, conjugate_triple_planes, linset_search, normalize_spec, Checkpoint, PlaneCensusOptions,
    SearchOptions,
};
use symspread_core::linset::{disjoint_from_secant, LinearSetSpec, LinsetContext};
use symspread_core::spread::{
    desarguesian_spread_set, linset_spread_set, spread_cover, spread_to_linset, validate_spread_set, Presemifield,
};
use symspread_core::veronese::{plane_profile, GeomContext, ProfileTag};
use symspread_core::CensusError;

fn ctx() -> LinsetContext {
    LinsetContext::for_q(2).unwrap()
}

#[test]
fn desarguesian_linear_set_is_a_conjugate_triple_plane() {
    let ctx = ctx();
    let c = desarguesian_spread_set(&ctx.top, &ctx.ext).unwrap();
    let lin = spread_to_linset(&ctx, &c).unwrap();
    assert!(lin.is_plane());
    assert_eq!(lin.points.len(), 21);
    let geom = GeomContext::new(ctx.ext.clone(), ctx.top.clone()).unwrap();
    let profile = plane_profile(&geom, &lin.span).unwrap();
    assert_eq!(profile.tag, ProfileTag::ThreeConjugateLines);
    assert_eq!(profile.rational_points, 0);

    let (_, triples) = conjugate_triple_planes(&geom.base, &geom.ext).unwrap();
    assert!(triples.contains_key(&lin.span));

    let spec = lin.spec.unwrap();
    assert!(disjoint_from_secant(&ctx, &spec).unwrap().disjoint);
    let rebuilt = linset_spread_set(&ctx, &spec).unwrap();
    let mut a: Vec<_> = rebuilt.matrices.iter().map(|m| m.to_rows()).collect();
    let mut b: Vec<_> = c.matrices.iter().map(|m| m.to_rows()).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn spread_set_of_a_meeting_spec_is_not_a_spread() {
    let ctx = ctx();
    let spec = LinearSetSpec::zero(ctx.param.a);
    let c = linset_spread_set(&ctx, &spec).unwrap();
    assert_eq!(c.matrices.len(), 64);
    let flags = validate_spread_set(&c);
    assert!(!flags.spread && flags.additive && flags.symplectic);
    assert!(!spread_cover(&c).unwrap().partition);
}

#[test]
fn slice_search_hits_are_symplectic_semifields() {
    let ctx = ctx();
    let out = linset_search(&ctx, &SearchOptions::default()).unwrap();
    assert!(out.complete);
    assert_eq!(out.report.count("disjoint-plane"), 100);
    assert_eq!(out.report.count("disjoint-non-plane"), 1900);
    assert_eq!(out.report.total(), 126 * 4096 * 4096);

    let plane = out.found.iter().find(|f| f.plane).unwrap();
    let non_plane = out.found.iter().find(|f| !f.plane).unwrap();
    for (f, field_like) in [(plane, true), (non_plane, false)] {
        let c = linset_spread_set(&ctx, &f.spec).unwrap();
        let flags = validate_spread_set(&c);
        assert!(flags.semifield && flags.symplectic);
        let cover = spread_cover(&c).unwrap();
        assert!(cover.partition && cover.isotropic);
        let ps = Presemifield::new(&c).unwrap();
        assert!(ps.check_division_algebra());
        let nuclei = ps.semifield_nuclei().unwrap();
        assert_eq!(nuclei.center == 64, field_like, "{nuclei:?}");
        assert!(nuclei.center >= 2 && nuclei.left_nucleus >= 4, "{nuclei:?}");
    }
}

#[test]
fn normalized_desarguesian_spec_is_in_the_slice() {
    let ctx = ctx();
    let c = desarguesian_spread_set(&ctx.top, &ctx.ext).unwrap();
    let spec = spread_to_linset(&ctx, &c).unwrap().spec.unwrap();
    let (_, n) = normalize_spec(&ctx, &spec).unwrap();
    assert!(disjoint_from_secant(&ctx, &n).unwrap().disjoint);
    let out = linset_search(&ctx, &SearchOptions::default()).unwrap();
    assert!(out.found.iter().any(|f| f.spec == n && f.plane));
}

#[test]
fn corrupt_or_foreign_checkpoints_are_rejected() {
    let ctx = ctx();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ck.json");
    let opts = SearchOptions {
        checkpoint: Some(path.clone()),
        checkpoint_every: 4096 * 4096 * 8,
        stop_after: Some(2),
        ..Default::default()
    };
    let partial = linset_search(&ctx, &opts).unwrap();
    assert!(!partial.complete);
    let saved = Checkpoint::load(&path).unwrap();
    assert_eq!(saved.cursor, 16 * 4096);

    fs::write(&path, "{not json").unwrap();
    assert!(matches!(linset_search(&ctx, &opts), Err(CensusError::Checkpoint(_))));

    let mut foreign = saved.clone();
    foreign.slice = "other-slice".into();
    foreign.store(&path).unwrap();
    assert!(matches!(linset_search(&ctx, &opts), Err(CensusError::Checkpoint(_))));

    let mut beyond = saved;
    beyond.cursor = beyond.total_blocks + 1;
    beyond.store(&path).unwrap();
    assert!(matches!(linset_search(&ctx, &opts), Err(CensusError::Checkpoint(_))));
}

#[test]
fn classification_report_is_stable_at_order_two() {
    let r = classify_all_planes(2, &PlaneCensusOptions::default()).unwrap();
    assert_eq!(r.total(), 1395);
    assert_eq!(r.count("contained-conic"), 7);
    assert_eq!(r.count("contained-tangent"), 7);
    assert_eq!(r.count("contained-nucleus"), 1);
    assert_eq!(r.count("three-conjugate-lines"), 8);
    assert_eq!(r.checks["pointwise-only-planes"], 7);
    assert!(r.checks_pass());
    assert_eq!(r.elapsed_ms, None);
    assert_eq!(r.witnesses.len(), 15);
    assert_eq!(r.to_csv().lines().count(), 7);
}
