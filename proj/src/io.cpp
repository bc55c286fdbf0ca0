// SPDX-License-Identifier: Apache-2.0

#include "degenlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace degenlab {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_snapshot_csv(std::ostream& os, const GridFunction& u, int component) {
  const GridSpec& grid = u.grid();
  os << "node_index";
  for (int k = 0; k < grid.dim(); ++k) os << ",x" << k + 1;
  os << ",component,re,im\n";
  for (Index node = 0; node < grid.node_count(); ++node) {
    const auto x = grid.node_x(node);
    for (int c = 0; c < u.components(); ++c) {
      if (component >= 0 && c != component) continue;
      os << node;
      for (int k = 0; k < grid.dim(); ++k) os << ',' << fmt17(x[static_cast<std::size_t>(k)]);
      os << ',' << c << ',' << fmt17(u.at(node, c).real()) << ',' << fmt17(u.at(node, c).imag()) << '\n';
    }
  }
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << content;
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

} // namespace degenlab
