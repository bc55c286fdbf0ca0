// SPDX-License-Identifier: Apache-2.0

#ifndef DEGENLAB_IO_HPP
#define DEGENLAB_IO_HPP

#include <filesystem>
#include <ostream>
#include <string>

#include "degenlab/grid.hpp"

namespace degenlab {

/// Doubles printed with 17 significant digits round-trip exactly.
std::string fmt17(double v);

/// Snapshot rows: node_index,x1..xn,component,re,im. When `component` is
/// nonnegative only that component is written.
void write_snapshot_csv(std::ostream& os, const GridFunction& u, int component = -1);

/// Write-then-rename so partially written files never appear under the
/// final name.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

} // namespace degenlab

#endif
