// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

//! Steady states and thermodynamics of two-body quantum absorption
//! refrigerators.

pub mod cli;
pub mod config;
pub mod correlations;
pub mod io;
pub mod liouvillian;
pub mod medium;
pub mod oracle;
pub mod quad;
pub mod spectra;
pub mod steady;
pub mod studies;
pub mod thermo;
