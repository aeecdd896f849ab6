// Copyright 2026 The qtf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>

namespace qtf {

/// Numerical thresholds shared by every module. All values are relative:
/// the absolute cutoff is `value * max(1, ‖M‖_max)` for the matrix at hand.
struct Tolerances {
    double psd = 1e-9;           // eigenvalue floor for "M ⪰ 0"
    double rank = 1e-10;         // eigenvalue cutoff when counting rank / factoring Grams
    double hermitian = 1e-8;     // ‖M − M†‖_max admitted by hermitian_eig
    double jacobi_offdiag = 1e-12;
    int jacobi_max_sweeps = 100;

    static double scale(double max_abs) { return std::max(1.0, max_abs); }
};

inline constexpr Tolerances kDefaultTolerances{};

} // namespace qtf
