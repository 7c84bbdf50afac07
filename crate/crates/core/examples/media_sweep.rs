// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Cooling power of the three working media across an omega_c sweep.

use qar::config::{validate, MediumKind, SystemConfig};
use qar::studies::{run_sweep, Grid, SweepParam, SweepSpec};

fn main() {
    let media = [("TLS", MediumKind::tls()), ("TLOS", MediumKind::tlos()), ("OMS", MediumKind::oms())];
    let grid = Grid::linear(0.01, 0.12, 12);
    let mut columns = Vec::new();
    for (name, medium) in media {
        let base = validate(SystemConfig::standard(medium, 0.05, 0.005, [0.75, 0.5, 0.125], 0.005)).unwrap();
        let res = run_sweep(&SweepSpec { base, param: SweepParam::OmegaC, grid: grid.clone(), correlations: false }).unwrap();
        columns.push((name, res));
    }
    println!("omega_c,{}", columns.iter().map(|(n, _)| format!("J_c_{n}")).collect::<Vec<_>>().join(","));
    for (i, x) in grid.values().unwrap().iter().enumerate() {
        let js: Vec<String> = columns.iter().map(|(_, r)| r.rows[i].j_c().map_or("NA".into(), |j| format!("{j:e}"))).collect();
        println!("{x},{}", js.join(","));
    }
}
