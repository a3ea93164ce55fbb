#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <mutrans/io.hpp>

using namespace mutrans;
namespace fs = std::filesystem;

namespace {

std::string tmp(const std::string& name) { return (fs::temp_directory_path() / ("mutrans_io_" + name)).string(); }

GridFunction sample_grid(Side side) {
    GridFunction f(256, 5.0, side);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = {std::sin(f.x(k)) / 3.0, std::exp(-f.x(k) * f.x(k)) * 1e-7};
    return f;
}

}  // namespace

TEST(GridBinary, RoundTripIsBitExact) {
    for (Side s : {Side::whole, Side::nonneg, Side::nonpos}) {
        GridFunction f = sample_grid(s);
        std::string p = tmp("grid.bin");
        write_grid_binary(f, p);
        EXPECT_EQ(fs::file_size(p), 8u + 8u + 4u + 16u * f.size());
        GridFunction g = read_grid_binary(p);
        ASSERT_EQ(g.size(), f.size());
        EXPECT_EQ(g.L, f.L);
        EXPECT_EQ(g.side, s);
        for (std::size_t k = 0; k < f.size(); ++k) EXPECT_EQ(g[k], f[k]);
        fs::remove(p);
    }
}

TEST(GridBinary, TruncatedAndMissingFiles) {
    GridFunction f = sample_grid(Side::whole);
    std::string p = tmp("short.bin");
    write_grid_binary(f, p);
    fs::resize_file(p, fs::file_size(p) - 9);
    EXPECT_THROW(read_grid_binary(p), Error);
    fs::remove(p);
    EXPECT_THROW(read_grid_binary(tmp("does_not_exist.bin")), Error);
}

TEST(GridBinary, BadSideTag) {
    std::string p = tmp("side.bin");
    {
        std::ofstream os(p, std::ios::binary);
        detail::put_le<std::uint64_t>(os, 4);
        detail::put_le<double>(os, 1.0);
        detail::put_le<std::int32_t>(os, 7);
    }
    EXPECT_THROW(read_grid_binary(p), Error);
    fs::remove(p);
}

TEST(GridCsv, RoundTripAt17Digits) {
    GridFunction f = sample_grid(Side::nonneg);
    std::string p = tmp("grid.csv");
    write_text(p, grid_csv(f));
    GridFunction g = read_grid_csv(p, Side::nonneg);
    ASSERT_EQ(g.size(), f.size());
    EXPECT_DOUBLE_EQ(g.L, f.L);
    for (std::size_t k = 0; k < f.size(); ++k) EXPECT_EQ(g[k], f[k]);
    fs::remove(p);
}

TEST(GridCsv, HeaderAndColumns) {
    GridFunction f(4, 1.0);
    f[1] = {2.5, -1.0};
    std::string s = grid_csv(f);
    EXPECT_EQ(s.substr(0, 8), "x,re,im\n");
    EXPECT_NE(s.find("-0.5,2.5,-1\n"), std::string::npos);
}

TEST(GridCsv, TwoColumnFilesAreReal) {
    std::string p = tmp("two.csv");
    write_text(p, "# comment\nx,u\n-1,0\n-0.5,1.5\n0,2\n0.5,3\n");
    auto [x, y] = read_csv_columns(p);
    ASSERT_EQ(x.size(), 4u);
    EXPECT_EQ(y[1], cplx(1.5, 0.0));
    GridFunction g = read_grid_csv(p);
    EXPECT_EQ(g.size(), 4u);
    EXPECT_DOUBLE_EQ(g.h(), 0.5);
    fs::remove(p);
}

TEST(GridCsv, ValidationErrors) {
    std::string p = tmp("bad.csv");
    write_text(p, "x,re,im\n");
    EXPECT_THROW(read_csv_columns(p), Error);
    write_text(p, "x,re,im\n0,1,0\n1,abc,0\n");
    EXPECT_THROW(read_csv_columns(p), Error);
    write_text(p, "x,re,im\n0\n");
    EXPECT_THROW(read_csv_columns(p), Error);
    write_text(p, "-1,0\n-0.5,0\n0.1,0\n0.5,0\n");
    EXPECT_THROW(read_grid_csv(p), Error);
    fs::remove(p);
    EXPECT_THROW(read_csv_columns(tmp("does_not_exist.csv")), Error);
}

TEST(OperatorBinary, RoundTrip) {
    IntervalOperator op = assemble_fraclap(0.5, 64, Construction::eigen_power, 8.0);
    std::string p = tmp("op.bin");
    write_operator_binary(op, p);
    EXPECT_EQ(fs::file_size(p), 8u + 8u + 4u + 8u * 63u * 63u);
    IntervalOperator q = read_operator_binary(p);
    EXPECT_EQ(q.n_basis, op.n_basis);
    EXPECT_EQ(q.a, op.a);
    EXPECT_EQ(q.construction, op.construction);
    EXPECT_EQ((q.matrix - op.matrix).cwiseAbs().maxCoeff(), 0.0);
    fs::resize_file(p, 100);
    EXPECT_THROW(read_operator_binary(p), Error);
    fs::remove(p);
}

TEST(Format, SeventeenDigitsRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::strtod(detail::fmt17(v).c_str(), nullptr), v);
}
