//! The optimized null-space jamming direction against random directions.

use covrelay::channel::{complex_gaussian_vector, seeded_rng};
use covrelay::direct::{
    direct_optimize, direct_sinrs, null_space_basis, DirectChannels, DirectConfig, JammingVector,
};
use covrelay::SystemParams;

#[test]
fn optimized_jamming_beats_random_direction() {
    let params = SystemParams { antennas: 8, ..SystemParams::default() };
    let trials = 200;
    let mut wins = 0;
    for t in 0..trials {
        let mut rng = seeded_rng(900 + t);
        let relays = 1 + (t as usize % 3);
        let ch = DirectChannels {
            h_sd: complex_gaussian_vector(&mut rng, 8, 1e-4),
            h_sj: (0..relays).map(|_| complex_gaussian_vector(&mut rng, 8, 1.6e-3)).collect(),
        };
        let r = direct_optimize(&ch, &params, &DirectConfig::default()).unwrap();
        let (_, opt) = direct_sinrs(r.rho, &r.jamming.z, &ch, &params).unwrap();
        let basis = null_space_basis(&ch.h_sd).unwrap();
        let u = complex_gaussian_vector(&mut rng, basis.len(), 1.0);
        let jam = JammingVector::new(basis, u, (1.0 - r.rho) * params.power).unwrap();
        let (_, random) = direct_sinrs(r.rho, &jam.z, &ch, &params).unwrap();
        let worst = |g: &[f64]| g.iter().copied().fold(0.0, f64::max);
        wins += usize::from(worst(&opt) <= worst(&random));
    }
    assert!(wins * 100 >= 95 * trials as usize, "optimized wins {wins}/{trials}");
}
