#pragma once

// Field snapshot files.
//
// Plain-text CSV:
//
//   nx,ny,hx,hy,x0,y0
//   <nx>,<ny>,<hx>,<hy>,<x0>,<y0>
//   <name_1>,...,<name_k>
//   one line per node in row-major order (j outer, i inner), k values each
//
// Reals are written with 17 significant digits, so a write/read cycle
// reproduces every value bit for bit.

#include <filesystem>
#include <string>
#include <vector>

#include "hucai/grid.hpp"

namespace hucai {

struct Snapshot {
    Grid2D grid;
    std::vector<std::string> names;
    /// columns[c][k] is component c at linear node index k.
    std::vector<std::vector<double>> columns;

    const std::vector<double>& column(const std::string& name) const;
    ScalarField scalar(const std::string& name) const;
    VectorField2 vector(const std::string& name1, const std::string& name2) const;
};

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
/// Throws InvalidArgument on malformed input (message carries the line number).
Snapshot read_snapshot(const std::filesystem::path& path);

/// Snapshot with columns p, m1, m2.
Snapshot make_state_snapshot(const ScalarField& p, const VectorField2& m);

}  // namespace hucai
