// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! With the work and cold baths exchanged, the maximum-power COP stays at
//! half of Carnot for every coupling.

use qar::config::{validate, MediumKind, SystemConfig};
use qar::studies::{swapped_bound_check, SWAPPED_G_VALUES};

fn main() {
    let base = validate(SystemConfig::swapped(MediumKind::tls(), 0.1, 0.1, 0.05, [10.0, 6.0, 5.0], 0.005)).unwrap();
    for row in swapped_bound_check(&base, &SWAPPED_G_VALUES, 5e-4).unwrap() {
        println!(
            "g = {:.3}  dressed omega_w = {:.4}  eps*/eps_c = {:.5}  bound holds = {}",
            row.g, row.omega_w_dressed, row.point.cop_ratio, row.holds
        );
    }
}
