// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! A small random campaign: how often efficiency at maximum power beats
//! half of Carnot.

use qar::studies::{random_campaign, SamplingSpec};

fn main() {
    let spec = SamplingSpec { samples: 200, seed: 1, histogram_bins: 10, ..SamplingSpec::default() };
    let res = random_campaign(&spec);
    println!("{} samples, {} failures", res.rows.len(), res.failures);
    println!("fraction above eps_c/2: {:.3}", res.surpassing_fraction);
    println!("largest eps*/eps_c: {:.4}, above Carnot: {}", res.max_ratio, res.above_carnot);
    print!("\n{}", res.histogram.csv());
    if let Some(fit) = res.near_carnot_fit {
        println!("\nnear Carnot: omega_c* ~ g^{:.2} ({} points)", fit.exponent, fit.points);
    }
}
