// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! A hot bath that also reaches the work transition: the power-COP curve
//! turns into a closed loop.

use qar::config::{validate, LeakTarget, MediumKind, SystemConfig};
use qar::studies::leak_curves;

fn main() {
    let base = validate(SystemConfig::standard(MediumKind::tls(), 0.1, 0.04, [3.0, 2.0, 1.0], 0.005)).unwrap();
    for (label, target) in [("no leak", None), ("leak", Some(LeakTarget::WorkTransition))] {
        for c in leak_curves(&base, &[0.02, 0.04, 0.06], target, 60).unwrap() {
            match c.max_cop_ratio {
                Some(m) => println!("{label:8} g = {:.2}: max eps/eps_c = {m:.4}, closed = {}", c.g, c.closed),
                None => println!("{label:8} g = {:.2}: no cooling", c.g),
            }
        }
    }
}
