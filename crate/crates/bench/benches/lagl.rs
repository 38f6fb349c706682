use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use lagl::affine::fit_affine;
use lagl::curves::{matching_average, mean_hausdorff};
use lagl::field::solve_field;
use lagl::geodesy::{geodesic_distance, point_to_segment_distance, GeoSegment};
use lagl::{BandThreshold, Correspondence, CorrespondenceSet, GeoPoint, PixelPoint};
use lagl_bench::{point_pairs, river, three_region_system};

fn geodesy(c: &mut Criterion) {
    let pairs = point_pairs(1000);
    c.bench_function("inverse_1000_pairs", |b| {
        b.iter(|| pairs.iter().map(|(p, q)| geodesic_distance(*p, *q)).sum::<f64>())
    });
    let seg = GeoSegment::new(GeoPoint::new(10.0, 45.0).unwrap(), GeoPoint::new(10.4, 45.3).unwrap());
    let p = GeoPoint::new(10.1, 45.25).unwrap();
    c.bench_function("point_to_segment", |b| b.iter(|| point_to_segment_distance(black_box(p), &seg)));
}

fn affine(c: &mut Criterion) {
    let pairs = (0..50)
        .map(|k| {
            let x = PixelPoint::new((k * 37 % 1000) as f64, (k * 61 % 800) as f64);
            Correspondence {
                source: x,
                target: GeoPoint::new(0.01 * x.x1 + 10.0, -0.01 * x.x2 + 50.0).unwrap(),
                label: String::new(),
            }
        })
        .collect();
    let set = CorrespondenceSet::new("s", pairs);
    c.bench_function("fit_affine_50", |b| b.iter(|| fit_affine(black_box(&set)).unwrap()));
}

fn field(c: &mut Criterion) {
    let mut g = c.benchmark_group("field_solve");
    g.sample_size(10);
    for n in [100, 250] {
        let sys = three_region_system(n);
        g.bench_function(format!("{n}x{n}"), |b| b.iter(|| solve_field(&sys).unwrap()));
    }
    g.finish();
}

fn curves(c: &mut Criterion) {
    let (a, b) = (river(400, 0.0), river(300, 0.05));
    let band = BandThreshold::from_km(10.0).unwrap();
    let mut g = c.benchmark_group("curves");
    g.sample_size(10);
    g.bench_function("mean_hausdorff_400x300", |bn| bn.iter(|| mean_hausdorff(&a, &b)));
    g.bench_function("matching_average_400x300", |bn| bn.iter(|| matching_average(&a, &b, band)));
    g.finish();
}

criterion_group!(benches, geodesy, affine, field, curves);
criterion_main!(benches);
