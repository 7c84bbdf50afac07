// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use qar::config::{validate, Gating, LeakSpec, LeakTarget, MediumKind, SystemConfig, ValidatedConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const COLD_TEMPS: [f64; 3] = [0.75, 0.5, 0.125];
pub const WARM_TEMPS: [f64; 3] = [3.0, 2.0, 1.0];
pub const SWAPPED_TEMPS: [f64; 3] = [10.0, 6.0, 5.0];
pub const KAPPA: f64 = 0.005;

pub fn standard(medium: MediumKind, omega_c: f64, g: f64, temps: [f64; 3]) -> ValidatedConfig {
    validate(SystemConfig::standard(medium, omega_c, g, temps, KAPPA)).unwrap()
}

pub fn swapped(omega_c: f64, g: f64) -> ValidatedConfig {
    validate(SystemConfig::swapped(MediumKind::tls(), omega_c, 0.1, g, SWAPPED_TEMPS, KAPPA)).unwrap()
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Seeded corpus cycling through every medium, topology, gating preset and
/// leak target, with random temperatures, couplings and frequencies.
/// Oscillator media get temperatures low enough to keep truncations small.
pub fn corpus(n: usize, seed: u64) -> Vec<ValidatedConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let medium = [MediumKind::tls(), MediumKind::tlos(), MediumKind::oms()][i % 3];
            let oscillator = i % 3 != 0;
            let tc = log_uniform(&mut rng, 0.05, if oscillator { 0.2 } else { 1.0 });
            let th = tc * rng.random_range(1.1..3.0);
            let tw = th * rng.random_range(1.1..if oscillator { 2.0 } else { 5.0 });
            let kappa = log_uniform(&mut rng, 1e-3, 1e-2);
            let g = log_uniform(&mut rng, 1e-3, 0.1);
            let p = [1.0, 1.0, 2.0, 3.0][rng.random_range(0..4)];
            let mut c = match (i / 3) % 5 {
                4 => SystemConfig::swapped(medium, rng.random_range(0.1..0.5), rng.random_range(0.1..1.0), g, [tw, th, tc], kappa),
                _ => SystemConfig::standard(medium, rng.random_range(0.1..0.6), g, [tw, th, tc], kappa),
            };
            match (i / 3) % 5 {
                1 => c.gating = Gating::SingleCycle,
                2 => c.leak = Some(LeakSpec { overlap_target: LeakTarget::WorkTransition }),
                3 => c.leak = Some(LeakSpec { overlap_target: LeakTarget::HotTransition }),
                _ => {}
            }
            for role in qar::config::BathRole::ALL {
                c.baths.get_mut(role).ohmic_exponent = p;
            }
            validate(c).unwrap()
        })
        .collect()
}
