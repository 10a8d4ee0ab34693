//! Timing of the per-trial solvers on the reference geometry.

use std::hint::black_box;

use covrelay::allocation::{sca_optimize, ScaConfig};
use covrelay::channel::norm_sqr;
use covrelay::detection::{certificate, covert_box_bounds, phase_scales};
use covrelay::direct::{direct_optimize, DirectChannels, DirectConfig};
use covrelay::{
    link_variances, sample_channels, LinkGains, Phase, PowerSplit, SystemParams, Topology,
};
use criterion::{criterion_group, criterion_main, Criterion};

fn sca(c: &mut Criterion) {
    let params = SystemParams::default();
    let v = link_variances(&Topology::reference(), params.path_loss_exp).unwrap();
    let ch = sample_channels(&v, &params, 7).unwrap();
    let gains = LinkGains::from_channel_gains(&params, norm_sqr(&ch.h_sr[0]), ch.h_rd[0].norm_sqr());
    let willies = v.willie_links(0);
    let config = ScaConfig::default();
    c.bench_function("sca_optimize", |b| {
        b.iter(|| sca_optimize(black_box(&params), &willies, black_box(&gains), &config).unwrap())
    });
}

fn direct(c: &mut Criterion) {
    let params = SystemParams::default();
    let v = link_variances(&Topology::reference(), params.path_loss_exp).unwrap();
    let ch = sample_channels(&v, &params, 7).unwrap();
    let channels = DirectChannels {
        h_sd: ch.h_sd.clone(),
        h_sj: ch.h_sr.clone(),
    };
    let config = DirectConfig::default();
    c.bench_function("direct_optimize", |b| {
        b.iter(|| direct_optimize(black_box(&channels), &params, &config).unwrap())
    });
}

fn detection(c: &mut Criterion) {
    let params = SystemParams::default();
    let v = link_variances(&Topology::reference(), params.path_loss_exp).unwrap();
    let links = v.willie_links(0)[0];
    let split = PowerSplit { rho: 0.1, xi: 0.97 };
    c.bench_function("certificate", |b| {
        b.iter(|| {
            let s = phase_scales(black_box(split), &params, &links, Phase::One).unwrap();
            certificate(&s)
        })
    });
    c.bench_function("covert_box_bounds", |b| {
        b.iter(|| covert_box_bounds(&params, black_box(&links), params.epsilon).unwrap())
    });
}

criterion_group!(benches, sca, direct, detection);
criterion_main!(benches);
