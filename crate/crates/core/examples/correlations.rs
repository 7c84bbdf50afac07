// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Mutual information, discord and the PPT test on the two-qubit steady
//! state.

use qar::config::{validate, MediumKind, SystemConfig};
use qar::correlations::{analyze, Party};
use qar::{medium, thermo};

fn main() {
    println!("g,I,discord,ppt_min_eig,entangled");
    for g in [0.001, 0.01, 0.05, 0.1, 0.2] {
        let cfg = validate(SystemConfig::standard(MediumKind::tls(), 0.1, g, [0.75, 0.5, 0.125], 0.005)).unwrap();
        let r = thermo::solve(&cfg).unwrap();
        let dressed = medium::build_with_truncation(&cfg, r.dim_a, r.dim_b);
        let c = analyze(&dressed, &r.density_matrix(), Party::A).unwrap();
        let d = c.discord.map_or(f64::NAN, |d| d.discord);
        let ppt = c.ppt.unwrap();
        println!("{g},{:.4e},{:.4e},{:.4e},{}", c.mutual_information, d, ppt.min_eigenvalue, ppt.entangled);
    }
}
