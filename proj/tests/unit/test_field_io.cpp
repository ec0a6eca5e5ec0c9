#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hucai/error.hpp"
#include "hucai/field_io.hpp"

using namespace hucai;
namespace fs = std::filesystem;

namespace {
fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("hucai_io_" + name);
}
}  // namespace

TEST(FieldIo, RoundTripIsBitExact) {
    const Grid2D g = Grid2D::rectangle(5, 4, 1.3, 0.7, -0.1, 0.2);
    ScalarField p = ScalarField::sample(g, [](double x, double y) { return std::sin(x) / 3.0 + y * 1e-300; });
    VectorField2 m = VectorField2::sample(g, [](double x, double y) { return Vec2{x / 7.0, -y * 1e10}; });
    const fs::path f = temp_file("roundtrip.csv");
    write_snapshot(f, make_state_snapshot(p, m));
    const Snapshot s = read_snapshot(f);
    EXPECT_EQ(s.grid, g);
    EXPECT_EQ(s.scalar("p").values, p.values);
    const VectorField2 m2 = s.vector("m1", "m2");
    EXPECT_EQ(m2.c1, m.c1);
    EXPECT_EQ(m2.c2, m.c2);
    fs::remove(f);
}

TEST(FieldIo, MalformedInputReportsLine) {
    const fs::path f = temp_file("bad.csv");
    {
        std::ofstream out(f);
        out << "nx,ny,hx,hy,x0,y0\n3,3,0.5,0.5,0,0\np\n0\n0\nnot_a_number\n0\n0\n0\n0\n0\n0\n";
    }
    try {
        read_snapshot(f);
        FAIL() << "expected an exception";
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("line 6"), std::string::npos) << e.what();
    }
    fs::remove(f);
}

TEST(FieldIo, MissingFileAndColumn) {
    EXPECT_THROW(read_snapshot(temp_file("does_not_exist.csv")), Error);
    const Grid2D g = Grid2D::unit_square(2);
    const Snapshot s = make_state_snapshot(ScalarField(g), VectorField2(g));
    EXPECT_THROW(s.column("q"), InvalidArgument);
}
