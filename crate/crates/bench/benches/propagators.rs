use std::hint::black_box;
use std::path::PathBuf;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use hcprop::circuit::CircuitModel;
use hcprop::geometry::{Point, Rect, Segment, SpatialIndex};
use hcprop::graphalg::min_one_tree;
use hcprop::halfcheck::{cbp_bound, ncl_precompute, onetree_bound, select_root};
use hcprop::kernel::{propagate, PropagationStats, PropagatorSet, Schedule, Space};
use hcprop::tsplib::TspInstance;

fn berlin52() -> Arc<TspInstance> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/berlin52.tsp");
    Arc::new(TspInstance::read(path).unwrap())
}

fn bench(c: &mut Criterion) {
    let inst = berlin52();
    let model = CircuitModel::new(inst.clone()).unwrap();
    let set = PropagatorSet::new(model.num_vars(), model.standard_propagators());
    let mut root = Space::new(model.root_store(), &set);
    propagate(
        &mut root,
        &set,
        Schedule::All,
        &mut PropagationStats::default(),
    );
    let store = root.store;

    c.bench_function("ncl_precompute/berlin52", |b| {
        b.iter(|| ncl_precompute(black_box(&inst), 130).unwrap())
    });
    c.bench_function("cbp_root/berlin52", |b| {
        b.iter(|| cbp_bound(&model, black_box(&store), 0.25))
    });

    let n = inst.n();
    let edges = inst.edges_by_weight();
    c.bench_function("min_one_tree/berlin52", |b| {
        b.iter(|| min_one_tree(n, edges.iter().copied(), black_box(0), &[]).unwrap())
    });
    c.bench_function("onetree_root/berlin52", |b| {
        b.iter(|| {
            let root = select_root(&model, &store, 0).unwrap();
            onetree_bound(&model, black_box(&store), root)
        })
    });

    let segments: Vec<Segment> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .map(|(u, v)| Segment::new(inst.point(u), inst.point(v), (u, v)))
        .collect();
    c.bench_function("index_build/berlin52", |b| {
        b.iter(|| SpatialIndex::build(black_box(segments.clone())))
    });
    let index = SpatialIndex::build(segments.clone());
    let probe = &segments[segments.len() / 2];
    c.bench_function("index_query_crossing/berlin52", |b| {
        b.iter(|| index.query_crossing(black_box(probe)))
    });
    let area = Rect {
        min: Point::new(300.0, 300.0),
        max: Point::new(800.0, 800.0),
    };
    c.bench_function("index_query_bbox/berlin52", |b| {
        b.iter(|| index.query_bbox(black_box(&area)).len())
    });
}

criterion_group!(benches, bench);
criterion_main!(benches);
