// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace duccex {

/// Worker count used by parallel kernels. 0 means hardware concurrency.
void set_num_threads(std::size_t n);
[[nodiscard]] std::size_t num_threads();

/// Runs fn(begin, end) over contiguous chunks of [0, n). Each index is
/// visited exactly once; callers must only write to per-index outputs.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t min_chunk = 64);

}  // namespace duccex
