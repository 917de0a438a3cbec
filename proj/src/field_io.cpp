#include "nsasym/field_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "nsasym/util.hpp"

namespace nsasym {

namespace {

const char kMagic[8] = {'N', 'S', 'A', 'F', '1', 0, 0, 0};

void put_i64(std::ostream& os, std::int64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    put_i64(os, static_cast<std::int64_t>(u));
}

std::int64_t get_i64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return static_cast<std::int64_t>(v);
}

double get_f64(std::istream& is) {
    std::uint64_t u = static_cast<std::uint64_t>(get_i64(is));
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

int rank_code(Rank r) {
    switch (r) {
        case Rank::scalar: return 0;
        case Rank::vector: return 1;
        case Rank::tensor: return 2;
    }
    return 0;
}

Rank code_rank(int c) {
    if (c == 0) return Rank::scalar;
    if (c == 1) return Rank::vector;
    if (c == 2) return Rank::tensor;
    throw std::runtime_error("field file: bad rank code");
}

}  // namespace

void write_field(const std::string& path, const Field& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os.write(kMagic, 8);
    put_i64(os, f.grid.dim);
    put_i64(os, f.grid.points_per_dim);
    put_f64(os, f.grid.half_extent);
    put_i64(os, rank_code(f.rank));
    put_f64(os, f.time);
    for (double v : f.data) put_f64(os, v);
    if (!os) throw std::runtime_error("write failed: " + path);
}

FieldHeader read_field_header(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 5) != 0) throw std::runtime_error("not an NSAF1 file: " + path);
    FieldHeader h;
    h.n = static_cast<int>(get_i64(is));
    h.N = static_cast<int>(get_i64(is));
    h.L = get_f64(is);
    h.rank_code = static_cast<int>(get_i64(is));
    h.t = get_f64(is);
    if (!is) throw std::runtime_error("truncated header: " + path);
    return h;
}

Field read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 5) != 0) throw std::runtime_error("not an NSAF1 file: " + path);
    const int n = static_cast<int>(get_i64(is));
    const int N = static_cast<int>(get_i64(is));
    const double L = get_f64(is);
    const int rc = static_cast<int>(get_i64(is));
    const double t = get_f64(is);
    Field f(make_grid(n, L, N), code_rank(rc), t);
    for (double& v : f.data) v = get_f64(is);
    if (!is) throw std::runtime_error("truncated field data: " + path);
    return f;
}

void write_field_csv(const std::string& path, const Field& f) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    const Grid& g = f.grid;
    for (int d = 0; d < g.dim; ++d) os << "x" << (d + 1) << ",";
    for (int c = 0; c < f.ncomp; ++c) os << "c" << c << (c + 1 < f.ncomp ? "," : "");
    os << "\n";
    double x[3];
    for (std::size_t i = 0; i < g.npoints(); ++i) {
        g.node(i, x);
        for (int d = 0; d < g.dim; ++d) os << format_double(x[d]) << ",";
        for (int c = 0; c < f.ncomp; ++c) os << format_double(f.at(c, i)) << (c + 1 < f.ncomp ? "," : "");
        os << "\n";
    }
}

}  // namespace nsasym
