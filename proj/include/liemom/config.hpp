//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

namespace liemom {

inline constexpr const char* kVersion = "0.1.0";

struct Tolerances {
  double orth = 1e-10;  // |g^T g - I| and |det g - 1|
  double cut = 1e-8;    // minimal distance of a rotation angle from pi
  double series_margin = 1e-3;  // dlog refuses |ad|_op >= 2*pi - margin
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace liemom
