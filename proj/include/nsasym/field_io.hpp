#ifndef NSASYM_FIELD_IO_HPP
#define NSASYM_FIELD_IO_HPP

#include <string>

#include "nsasym/field.hpp"

namespace nsasym {

// Binary snapshot format NSAF1: 8-byte magic "NSAF1\0\0\0", then n, N
// (int64), L (f64), rank (int64: 0 scalar, 1 vector, 2 tensor), t (f64),
// all little-endian, followed by row-major f64 samples per component.
void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path);

struct FieldHeader {
    int n;
    int N;
    double L;
    int rank_code;
    double t;
};
FieldHeader read_field_header(const std::string& path);

// CSV export: one row per node, columns x1..xn then components.
void write_field_csv(const std::string& path, const Field& f);

}  // namespace nsasym

#endif
