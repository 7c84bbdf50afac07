// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Bath response functions and the transition ledger of one machine.

use qar::config::{validate, BathRole, MediumKind, SystemConfig};
use qar::{liouvillian, medium, spectra};

fn main() {
    let cfg = validate(SystemConfig::standard(MediumKind::tls(), 0.1, 0.02, [3.0, 2.0, 1.0], 0.005)).unwrap();
    let cold = cfg.baths.get(BathRole::Cold);
    println!("omega,G_cold(omega),G_cold(-omega)");
    for k in 1..=8 {
        let w = 0.05 * k as f64;
        println!("{w},{:e},{:e}", spectra::spectral_response(w, cold), spectra::spectral_response(-w, cold));
    }
    let dressed = medium::build(&cfg);
    let l = liouvillian::assemble(&cfg, &dressed).unwrap();
    print!("\n{}", l.ledger_csv());
}
