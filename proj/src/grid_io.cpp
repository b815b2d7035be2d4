#include "vortexlab/grid.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace vlab {

namespace {
constexpr char kMagic[8] = {'V', 'L', 'G', 'R', 'I', 'D', '0', '1'};
}

// Little-endian layout: magic[8], int32 n, int32 ncomp(=1), float64 L,
// then n*n float64 values in column-major order. This code targets
// little-endian hosts only and refuses to read anything else.
void write_grid_binary(const PeriodicField& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("write_grid_binary: cannot open " + path);
    out.write(kMagic, 8);
    int32_t n = f.n, ncomp = 1;
    double L = f.L;
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&ncomp), 4);
    out.write(reinterpret_cast<const char*>(&L), 8);
    out.write(reinterpret_cast<const char*>(f.values.data()),
              sizeof(double) * f.n * f.n);
    if (!out) throw NumericalError("write_grid_binary: write failed");
}

PeriodicField read_grid_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("read_grid_binary: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw ConfigError("read_grid_binary: bad magic in " + path);
    int32_t n = 0, ncomp = 0;
    double L = 0.0;
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&ncomp), 4);
    in.read(reinterpret_cast<char*>(&L), 8);
    if (ncomp != 1) throw ConfigError("read_grid_binary: unsupported component count");
    PeriodicField f(n, L);
    in.read(reinterpret_cast<char*>(f.values.data()), sizeof(double) * n * n);
    if (!in) throw ConfigError("read_grid_binary: truncated file " + path);
    return f;
}

void write_grid_csv(const PeriodicField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_grid_csv: cannot open " + path);
    out << "x,y,value\n";
    out.precision(17);
    for (int j = 0; j < f.n; ++j)
        for (int i = 0; i < f.n; ++i)
            out << f.x(i) << ',' << f.y(j) << ',' << f.values(i, j) << '\n';
}

} // namespace vlab
