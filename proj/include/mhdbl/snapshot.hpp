#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mhdbl/field.hpp"

namespace mhdbl {

/// Binary field container. Layout (little-endian, native doubles):
///
///   "MHDBLSNP"            8-byte magic
///   u32 version           currently 1
///   u64 nx, u64 ny
///   f64 L_x, f64 y_max, f64 stretch
///   f64[ny] y_nodes
///   u32 field count
///   per field: u32 name length, name bytes, f64[ny*nx] row-major samples
///
/// Doubles are copied verbatim, so a write/read round trip is bit-exact.
struct Snapshot {
    GridPtr grid;
    std::vector<std::pair<std::string, Field>> fields;

    const Field& get(const std::string& name) const;
    bool has(const std::string& name) const;
};

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

/// Rebuild a Grid from snapshot metadata.
GridPtr grid_from_nodes(std::size_t nx, double lx, std::vector<double> nodes, double stretch);

}  // namespace mhdbl
