//! Empirical link statistics against the configured path-loss variances.

use covrelay::channel::{link_variances, sample_channels, seeded_rng, complex_gaussian};
use covrelay::numeric::mean_and_std_err;
use covrelay::{Point, SystemParams, Topology};
use num_complex::Complex64;

fn topology() -> Topology {
    let mut t = Topology::reference();
    t.relays.push(Point::new(0.5, 0.8));
    t.willies.push(Point::new(1.0, -4.0));
    t
}

fn check(name: &str, draws: &[f64], variance: f64) {
    let (mean, se) = mean_and_std_err(draws);
    assert!(
        (mean - variance).abs() <= 3.0 * se,
        "{name}: mean {mean:e} vs {variance:e} (se {se:e})"
    );
}

#[test]
fn every_link_matches_its_variance() {
    let v = link_variances(&topology(), 4.0).unwrap();
    let params = SystemParams { antennas: 2, ..SystemParams::default() };
    let n = 50_000;
    let mut sd = Vec::new();
    let mut sr = vec![Vec::new(); 2];
    let mut rd = vec![Vec::new(); 2];
    let mut sw = vec![Vec::new(); 2];
    let mut dw = vec![Vec::new(); 2];
    let mut rw = vec![Vec::new(); 4];
    let mut rr = Vec::new();
    for s in 0..n {
        let c = sample_channels(&v, &params, s).unwrap();
        sd.extend(c.h_sd.iter().map(Complex64::norm_sqr));
        for j in 0..2 {
            sr[j].extend(c.h_sr[j].iter().map(Complex64::norm_sqr));
            rd[j].push(c.h_rd[j].norm_sqr());
            sw[j].extend(c.h_sw[j].iter().map(Complex64::norm_sqr));
            dw[j].push(c.h_dw[j].norm_sqr());
            for w in 0..2 {
                rw[2 * j + w].push(c.h_rw[j][w].norm_sqr());
            }
        }
        rr.push(c.h_rr[0][1].norm_sqr());
        assert_eq!(c.h_rr[0][1], c.h_rr[1][0]);
    }
    check("sd", &sd, v.sd);
    for j in 0..2 {
        check("sr", &sr[j], v.sr[j]);
        check("rd", &rd[j], v.rd[j]);
        check("sw", &sw[j], v.sw[j]);
        check("dw", &dw[j], v.dw[j]);
        for w in 0..2 {
            check("rw", &rw[2 * j + w], v.rw[j][w]);
        }
    }
    check("rr", &rr, v.rr[0][1]);
}

#[test]
fn circular_symmetry() {
    let mut rng = seeded_rng(11);
    let draws: Vec<Complex64> = (0..100_000).map(|_| complex_gaussian(&mut rng, 2.0)).collect();
    let re: Vec<f64> = draws.iter().map(|c| c.re * c.re).collect();
    let im: Vec<f64> = draws.iter().map(|c| c.im * c.im).collect();
    let cross: Vec<f64> = draws.iter().map(|c| c.re * c.im).collect();
    check("re", &re, 1.0);
    check("im", &im, 1.0);
    check("cross", &cross, 0.0);
}
