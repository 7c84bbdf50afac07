// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Efficiency at maximum power as the qubit coupling grows.

use qar::config::{validate, MediumKind, SystemConfig};
use qar::studies::{max_power_point, search_interval};

fn main() {
    println!("g,omega_c*,J_c*,eps*/eps_c,above eps_c/2");
    for g in [0.005, 0.02, 0.05, 0.08, 0.11] {
        let cfg = validate(SystemConfig::standard(MediumKind::tls(), 0.1, g, [3.0, 2.0, 1.0], 0.005)).unwrap();
        let (lo, hi) = search_interval(&cfg).unwrap();
        let p = max_power_point(&cfg, lo, hi).unwrap();
        println!("{g},{:.5},{:.4e},{:.4},{}", p.omega_c, p.j_c, p.cop_ratio, p.surpassed);
    }
}
