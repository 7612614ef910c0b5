// Copyright (c) 2026 The densetrack authors
// SPDX-License-Identifier: Apache-2.0

#include "densetrack/nn/gemm.hpp"

extern "C" void openblas_set_num_threads(int);

namespace densetrack {

void pin_blas_single_thread() { openblas_set_num_threads(1); }

}  // namespace densetrack
