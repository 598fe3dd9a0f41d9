// Copyright 2026 The scauth Authors
// SPDX-License-Identifier: Apache-2.0

//! Benchmarks only; see `benches/`.
