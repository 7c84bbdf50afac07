// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! The closed-form two-qubit rate model against the full master equation.

use qar::config::{validate, MediumKind, SystemConfig};
use qar::oracle::{analytic_currents, numeric_equivalent, RateParams};
use qar::thermo;

fn main() {
    for omega_c in [0.05, 0.1, 0.2, 0.3] {
        let cfg = validate(SystemConfig::standard(MediumKind::tls(), omega_c, 0.02, [1e4, 2.0, 1.0], 0.005)).unwrap();
        let exact = analytic_currents(&RateParams::from_config(&cfg));
        let numeric = thermo::solve(&numeric_equivalent(&cfg)).unwrap();
        let rel = (numeric.currents.cold - exact.j_c).abs() / exact.j_c.abs();
        println!("omega_c = {omega_c}: J_c closed form {:.6e}, master equation {:.6e}, rel diff {rel:.1e}", exact.j_c, numeric.currents.cold);
    }
}
