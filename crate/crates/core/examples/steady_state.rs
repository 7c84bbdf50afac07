// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Steady state and heat currents of two coupled qubits.

use qar::config::{validate, MediumKind, SystemConfig};
use qar::thermo;

fn main() {
    let cfg = validate(SystemConfig::standard(MediumKind::tls(), 0.05, 0.005, [0.75, 0.5, 0.125], 0.005)).unwrap();
    let r = thermo::solve(&cfg).unwrap();
    println!("populations: {:?}", r.populations);
    println!("J_w = {:e}  J_h = {:e}  J_c = {:e}", r.currents.work, r.currents.hot, r.currents.cold);
    println!("first-law residual {:e}, entropy production {:e}", r.first_law_residual, r.sigma);
    match r.cop {
        Some(cop) => println!("cooling with COP {cop:.4} ({:.1}% of Carnot)", 100.0 * cop / r.carnot),
        None => println!("not cooling"),
    }
}
