#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use savanna_pulse::presets::Region;
use savanna_pulse::{Model, OmegaArg, VegetationParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pick(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

/// Draws a parameter set uniformly from the plausible ranges of `region`.
/// The open-ended fire period of the semi-arid region is capped at 15 years.
pub fn draw_params(rng: &mut ChaCha8Rng, region: Region) -> VegetationParams {
    let (kg, gg, dg, kt, gt, dt, lft, tau, gtg) = match region {
        Region::R1 => (
            (2.0, 5.0),
            (0.4, 1.5),
            (0.0, 0.0),
            (10.0, 25.0),
            (0.3, 0.9),
            (0.0, 0.0),
            (0.1, 0.5),
            (10.0, 15.0),
            (-0.01, 0.03),
        ),
        Region::R2 => (
            (8.0, 10.0),
            (1.5, 3.0),
            (0.0, 0.0),
            (25.0, 60.0),
            (0.9, 1.2),
            (0.0, 0.0),
            (0.1, 0.5),
            (2.0, 8.0),
            (0.01, 0.08),
        ),
        Region::R3 => (
            (10.0, 20.0),
            (3.0, 4.6),
            (0.0, 0.9),
            (60.0, 115.0),
            (1.2, 7.2),
            (0.0, 0.015),
            (0.1, 0.4),
            (0.5, 2.0),
            (0.03, 0.09),
        ),
    };
    VegetationParams {
        k_g: pick(rng, kg.0, kg.1),
        gamma_g: pick(rng, gg.0, gg.1),
        delta_g0: pick(rng, dg.0, dg.1),
        k_t: pick(rng, kt.0, kt.1),
        gamma_t: pick(rng, gt.0, gt.1),
        delta_t: pick(rng, dt.0, dt.1),
        lambda_ft: pick(rng, lft.0, lft.1),
        lambda_fg: pick(rng, 0.1, 0.9),
        tau: pick(rng, tau.0, tau.1),
        gamma_tg: pick(rng, gtg.0, gtg.1),
        alpha: 2.0,
        theta: 2.0,
        omega_arg_convention: OmegaArg::BurntGrass,
    }
}

/// `n` models with regions cycling R1, R2, R3.
pub fn random_models(seed: u64, n: usize) -> Vec<Model> {
    let mut r = rng(seed);
    let regions = [Region::R1, Region::R2, Region::R3];
    (0..n)
        .map(|k| Model::new(draw_params(&mut r, regions[k % 3])).expect("table ranges are valid"))
        .collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Logistic growth `x0 e^{rt} / (1 + x0 (e^{rt} - 1)/cap)`, written out
/// independently of the library.
pub fn logistic(x0: f64, r: f64, cap: f64, t: f64) -> f64 {
    let e = (r * t).exp();
    x0 * e / (1.0 + x0 / cap * (e - 1.0))
}
