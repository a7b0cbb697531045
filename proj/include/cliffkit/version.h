//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_VERSION_H_
#define CLIFFKIT_VERSION_H_

#include <string_view>

namespace cliffkit {

inline constexpr std::string_view kToolVersion = "0.1.0";

} // namespace cliffkit

#endif // CLIFFKIT_VERSION_H_
