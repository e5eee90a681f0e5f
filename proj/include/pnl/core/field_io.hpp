#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "pnl/core/field.hpp"

namespace pnl {

// Binary field snapshot, little-endian:
//   magic "PNLF", version u32, n u32, N u32, boundary u32,
//   per-axis cells i64[n], per-axis extent f64[n], row-major f64 values.
namespace detail {
inline void write_raw(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}
inline void read_raw(std::istream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!is) throw std::runtime_error("field snapshot: truncated stream");
}
}  // namespace detail

inline void save_field(std::ostream& os, const Field& f) {
    const GridSpec& g = f.grid();
    os.write("PNLF", 4);
    std::uint32_t version = 1, n = static_cast<std::uint32_t>(g.dim()),
                  N = static_cast<std::uint32_t>(f.components()),
                  boundary = g.boundary() == Boundary::Periodic ? 1u : 0u;
    detail::write_raw(os, &version, 4);
    detail::write_raw(os, &n, 4);
    detail::write_raw(os, &N, 4);
    detail::write_raw(os, &boundary, 4);
    for (long c : g.cells()) {
        std::int64_t v = c;
        detail::write_raw(os, &v, 8);
    }
    for (double e : g.extent()) detail::write_raw(os, &e, 8);
    detail::write_raw(os, f.values().data(), f.values().size() * sizeof(double));
}

inline void save_field(const std::string& path, const Field& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("field snapshot: cannot open " + path);
    save_field(os, f);
}

inline Field load_field(std::istream& is) {
    char magic[4];
    detail::read_raw(is, magic, 4);
    if (std::memcmp(magic, "PNLF", 4) != 0) throw std::runtime_error("field snapshot: bad magic");
    std::uint32_t version, n, N, boundary;
    detail::read_raw(is, &version, 4);
    if (version != 1) throw std::runtime_error("field snapshot: unsupported version");
    detail::read_raw(is, &n, 4);
    detail::read_raw(is, &N, 4);
    detail::read_raw(is, &boundary, 4);
    if (n == 0 || n > 16 || N == 0 || N > 4096) throw std::runtime_error("field snapshot: implausible header");
    std::vector<long> cells(n);
    std::vector<double> extent(n);
    for (std::uint32_t d = 0; d < n; ++d) {
        std::int64_t v;
        detail::read_raw(is, &v, 8);
        cells[d] = static_cast<long>(v);
    }
    for (std::uint32_t d = 0; d < n; ++d) detail::read_raw(is, &extent[d], 8);
    GridSpec grid(extent, cells, boundary ? Boundary::Periodic : Boundary::Dirichlet);
    std::vector<double> values(static_cast<std::size_t>(grid.node_count()) * N);
    detail::read_raw(is, values.data(), values.size() * sizeof(double));
    is.peek();
    if (!is.eof()) throw std::runtime_error("field snapshot: trailing bytes");
    return Field(std::move(grid), static_cast<int>(N), std::move(values));
}

inline Field load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("field snapshot: cannot open " + path);
    return load_field(is);
}

}  // namespace pnl
