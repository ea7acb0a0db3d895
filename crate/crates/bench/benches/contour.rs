use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use oqc_bench::{arrivals, backhaul, hcn};
use oqc_core::scenarios::{Scenario, PACKET_BITS};
use oqc_core::simulate::estimate_backhaul_outage;
use oqc_core::sir::{SirCache, TabulatedSir};
use oqc_core::{wireless, McSettings, WirelessConfig};

fn backhaul_outage(c: &mut Criterion) {
    let mut g = c.benchmark_group("backhaul_outage");
    for variant in [Scenario::I, Scenario::II, Scenario::III] {
        let b = backhaul(variant);
        for a in arrivals() {
            let id = format!("{variant}/{:?}", a.shape());
            g.bench_function(BenchmarkId::from_parameter(id), |bench| {
                bench.iter(|| b.outage(black_box(&a), 0.003).unwrap())
            });
        }
    }
    g.finish();
}

fn wireless_outage(c: &mut Criterion) {
    let cache = SirCache::new(hcn());
    let sir = cache.tier(0).unwrap();
    let w = WirelessConfig::new(50e3, PACKET_BITS).unwrap();
    let mut g = c.benchmark_group("wireless_outage");
    for a in arrivals() {
        g.bench_function(
            BenchmarkId::from_parameter(format!("{:?}", a.shape())),
            |bench| bench.iter(|| wireless::outage(sir, &w, black_box(&a), 0.003).unwrap()),
        );
    }
    g.finish();
}

fn sir_table(c: &mut Criterion) {
    let model = hcn().sir_model().unwrap();
    c.bench_function("tabulate_sir", |bench| {
        bench.iter(|| TabulatedSir::new(black_box(model.clone())).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let b = backhaul(Scenario::III);
    let a = arrivals()[1];
    let s = McSettings::with_samples(20_000, 1).unwrap();
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    g.bench_function("backhaul_20k", |bench| {
        bench.iter(|| estimate_backhaul_outage(&b, &a, 0.003, black_box(&s)).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    backhaul_outage,
    wireless_outage,
    sir_table,
    monte_carlo
);
criterion_main!(benches);
