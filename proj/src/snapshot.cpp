#include "mhdbl/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "mhdbl/errors.hpp"

namespace mhdbl {

namespace {

constexpr char kMagic[8] = {'M', 'H', 'D', 'B', 'L', 'S', 'N', 'P'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw Error("snapshot: truncated file");
    return v;
}

}  // namespace

const Field& Snapshot::get(const std::string& name) const {
    for (const auto& [n, f] : fields) {
        if (n == name) return f;
    }
    throw Error("snapshot: no field named '" + name + "'");
}

bool Snapshot::has(const std::string& name) const {
    for (const auto& entry : fields) {
        if (entry.first == name) return true;
    }
    return false;
}

GridPtr grid_from_nodes(std::size_t nx, double lx, std::vector<double> nodes, double stretch) {
    return Grid::from_nodes(nx, lx, std::move(nodes), stretch);
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
    if (!snap.grid) throw Error("snapshot: missing grid");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("snapshot: cannot open " + path.string() + " for writing");
    const Grid& g = *snap.grid;
    os.write(kMagic, sizeof(kMagic));
    put(os, kVersion);
    put(os, static_cast<std::uint64_t>(g.nx()));
    put(os, static_cast<std::uint64_t>(g.ny()));
    put(os, g.lx());
    put(os, g.y_max());
    put(os, g.stretch());
    os.write(reinterpret_cast<const char*>(g.y().data()), static_cast<std::streamsize>(g.ny() * sizeof(double)));
    put(os, static_cast<std::uint32_t>(snap.fields.size()));
    for (const auto& [name, f] : snap.fields) {
        if (!f.grid().same_shape(g)) throw Error("snapshot: field '" + name + "' lives on a different grid");
        put(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        os.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(g.size() * sizeof(double)));
    }
    if (!os) throw Error("snapshot: write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("snapshot: cannot open " + path.string());
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw Error("snapshot: bad magic in " + path.string());
    const auto version = take<std::uint32_t>(is);
    if (version != kVersion) throw Error("snapshot: unsupported version " + std::to_string(version));
    const auto nx = take<std::uint64_t>(is);
    const auto ny = take<std::uint64_t>(is);
    const auto lx = take<double>(is);
    take<double>(is);  // y_max, implied by the node list
    const auto stretch = take<double>(is);
    std::vector<double> nodes(ny);
    is.read(reinterpret_cast<char*>(nodes.data()), static_cast<std::streamsize>(ny * sizeof(double)));
    if (!is) throw Error("snapshot: truncated node list");
    Snapshot snap;
    snap.grid = grid_from_nodes(nx, lx, std::move(nodes), stretch);
    const auto count = take<std::uint32_t>(is);
    for (std::uint32_t n = 0; n < count; ++n) {
        const auto len = take<std::uint32_t>(is);
        std::string name(len, '\0');
        is.read(name.data(), len);
        std::vector<double> values(snap.grid->size());
        is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
        if (!is) throw Error("snapshot: truncated samples for '" + name + "'");
        snap.fields.emplace_back(std::move(name), Field(snap.grid, std::move(values)));
    }
    return snap;
}

}  // namespace mhdbl
