// Copyright 2026 The qar Authors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(qar::cli::run(std::env::args_os()));
}
