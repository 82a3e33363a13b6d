//! Parallel against sequential execution for the randomized suites and a campaign.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use epfkit::channel::{campaign_specs, run_uq_campaign, solve_channel, CampaignKind, ChannelConfig};
use epfkit::verify::{run_all, VerifyConfig};
use epfkit::Execution;

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for instances in [1_000, 10_000] {
        for (name, exec) in MODES {
            let cfg = VerifyConfig { instances, exec, ..Default::default() };
            group.bench_with_input(BenchmarkId::new(name, instances), &cfg, |b, cfg| {
                b.iter(|| black_box(run_all(cfg)).passed())
            });
        }
    }
    group.finish();
}

fn campaign(c: &mut Criterion) {
    let cfg = ChannelConfig::default();
    let baseline = solve_channel(&cfg).expect("baseline converges");
    let specs = campaign_specs(CampaignKind::Consistent, 0.5).unwrap();
    let mut group = c.benchmark_group("campaign");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| run_uq_campaign(&cfg, &baseline, CampaignKind::Consistent, black_box(&specs), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, suites, campaign);
criterion_main!(benches);
