// Copyright 2026 The SFT Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Quad-precision readout support. Include after sft/field.hpp and link
// libquadmath. In double, phi^-1(phi(r)) loses about e^r ulps for large
// positive r; __float128 keeps the round trip below 1e-12 out to |r| = 30.

#ifndef SFT_QUAD_HPP_
#define SFT_QUAD_HPP_

#include <quadmath.h>

#include "sft/field.hpp"

namespace sft {

template <>
struct ScalarMath<__float128> {
  static __float128 exp(__float128 x) { return expq(x); }
  static __float128 log(__float128 x) { return logq(x); }
  static __float128 log1p(__float128 x) { return log1pq(x); }
  static bool isfinite(__float128 x) { return finiteq(x) != 0; }
};

}  // namespace sft

#endif  // SFT_QUAD_HPP_
