#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fourierops.hpp"
#include "fracdomain.hpp"
#include "special.hpp"

namespace mutrans {

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw Error("io", "read", "truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// CSV lines "x,re,im" with a header row.
inline std::string grid_csv(const GridFunction& f) {
    std::ostringstream os;
    os << "x,re,im\n";
    for (std::size_t k = 0; k < f.size(); ++k)
        os << detail::fmt17(f.x(k)) << ',' << detail::fmt17(f[k].real()) << ',' << detail::fmt17(f[k].imag()) << '\n';
    return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("io", "write", "cannot open " + path);
    os << text;
}

/// Reads "x,re,im" (or "x,u") rows written by grid_csv; returns x and complex samples.
inline std::pair<std::vector<double>, std::vector<cplx>> read_csv_columns(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("io", "read_csv", "cannot open " + path);
    std::vector<double> xs;
    std::vector<cplx> ys;
    std::string line;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> cols;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) {
                numeric = false;
                break;
            }
            cols.push_back(v);
        }
        if (!numeric) {
            if (xs.empty()) continue;  // header
            throw Error("io", "read_csv", "non-numeric data on line " + std::to_string(row));
        }
        if (cols.size() < 2) throw Error("io", "read_csv", "need at least two columns on line " + std::to_string(row));
        xs.push_back(cols[0]);
        ys.emplace_back(cols[1], cols.size() > 2 ? cols[2] : 0.0);
    }
    if (xs.empty()) throw Error("io", "read_csv", "no data in " + path);
    return {xs, ys};
}

/// GridFunction from a grid_csv file; the grid must be the full uniform line grid.
inline GridFunction read_grid_csv(const std::string& path, Side side = Side::nonneg) {
    auto [xs, ys] = read_csv_columns(path);
    double L = -xs.front();
    GridFunction f(xs.size(), L, side);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (std::abs(xs[k] - f.x(k)) > 1e-9 * L) throw Error("io", "read_grid_csv", "x column is not the grid -L + k h");
        f[k] = ys[k];
    }
    return f;
}

/// Binary layout: uint64 N, float64 L, int32 side; then N (re, im) float64 pairs, little-endian.
inline void write_grid_binary(const GridFunction& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("io", "write_grid_binary", "cannot open " + path);
    detail::put_le<std::uint64_t>(os, f.size());
    detail::put_le<double>(os, f.L);
    detail::put_le<std::int32_t>(os, std::int32_t(f.side));
    for (std::size_t k = 0; k < f.size(); ++k) {
        detail::put_le<double>(os, f[k].real());
        detail::put_le<double>(os, f[k].imag());
    }
}

inline GridFunction read_grid_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("io", "read_grid_binary", "cannot open " + path);
    auto N = detail::get_le<std::uint64_t>(is);
    double L = detail::get_le<double>(is);
    auto side = detail::get_le<std::int32_t>(is);
    if (side < 0 || side > 2) throw Error("io", "read_grid_binary", "bad support side");
    GridFunction f(std::size_t(N), L, Side(side));
    for (std::size_t k = 0; k < N; ++k) {
        double re = detail::get_le<double>(is), im = detail::get_le<double>(is);
        f[k] = {re, im};
    }
    return f;
}

/// Binary layout: uint64 N, float64 a, int32 method; then the (N-1) x (N-1) matrix row-major float64, little-endian.
inline void write_operator_binary(const IntervalOperator& op, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("io", "write_operator_binary", "cannot open " + path);
    detail::put_le<std::uint64_t>(os, op.n_basis);
    detail::put_le<double>(os, op.a);
    detail::put_le<std::int32_t>(os, std::int32_t(op.construction));
    for (long i = 0; i < op.matrix.rows(); ++i)
        for (long j = 0; j < op.matrix.cols(); ++j) detail::put_le<double>(os, op.matrix(i, j));
}

inline IntervalOperator read_operator_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("io", "read_operator_binary", "cannot open " + path);
    IntervalOperator op;
    op.n_basis = std::size_t(detail::get_le<std::uint64_t>(is));
    op.a = detail::get_le<double>(is);
    op.construction = Construction(detail::get_le<std::int32_t>(is));
    long n = long(op.n_basis) - 1;
    op.matrix.resize(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) op.matrix(i, j) = detail::get_le<double>(is);
    return op;
}

}  // namespace mutrans
