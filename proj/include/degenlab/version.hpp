// SPDX-License-Identifier: Apache-2.0

#ifndef DEGENLAB_VERSION_HPP
#define DEGENLAB_VERSION_HPP

namespace degenlab {

inline constexpr const char* kVersion = "0.1.0";

} // namespace degenlab

#endif
