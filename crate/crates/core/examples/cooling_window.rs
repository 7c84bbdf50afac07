// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Where cooling stops: the dressed cold frequency against the window
//! set by the three temperatures.

use qar::config::{validate, MediumKind, SystemConfig};
use qar::thermo;

fn main() {
    let temps = [3.0, 2.0, 1.0];
    let g = 0.02;
    let cfg = validate(SystemConfig::standard(MediumKind::tls(), 0.1, g, temps, 0.005)).unwrap();
    let w = thermo::cooling_window(&cfg).unwrap();
    println!("window: dressed omega_c < {w:.4}, so omega_c < {:.4}", (w * w - 4.0 * g * g).sqrt());
    for k in 1..=12 {
        let omega_c = 0.025 * k as f64;
        let r = thermo::solve(&cfg.modify(|c| c.omega_b = omega_c).unwrap()).unwrap();
        println!("omega_c = {omega_c:.3}  dressed = {:.4}  J_c = {:+.3e}  cooling = {}", r.omega_b_dressed, r.currents.cold, r.flags.cooling);
    }
}
