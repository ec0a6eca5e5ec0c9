#include "hucai/field_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hucai/error.hpp"

namespace hucai {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_real(const std::string& s, int line_no) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && *b == ' ') ++b;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) {
        throw InvalidArgument("snapshot line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return v;
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const std::vector<double>& Snapshot::column(const std::string& name) const {
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (names[c] == name) return columns[c];
    }
    throw InvalidArgument("snapshot: no column named '" + name + "'");
}

ScalarField Snapshot::scalar(const std::string& name) const {
    ScalarField f(grid);
    f.values = column(name);
    return f;
}

VectorField2 Snapshot::vector(const std::string& name1, const std::string& name2) const {
    VectorField2 f(grid);
    f.c1 = column(name1);
    f.c2 = column(name2);
    return f;
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
    if (snap.names.size() != snap.columns.size() || snap.names.empty()) {
        throw InvalidArgument("write_snapshot: names and columns disagree");
    }
    for (const auto& c : snap.columns) {
        if (c.size() != snap.grid.size()) throw InvalidArgument("write_snapshot: column size != nx*ny");
    }
    std::ofstream os(path);
    if (!os) throw Error("write_snapshot: cannot open " + path.string());
    const Grid2D& g = snap.grid;
    os << "nx,ny,hx,hy,x0,y0\n";
    os << g.nx << ',' << g.ny << ',' << fmt17(g.hx) << ',' << fmt17(g.hy) << ',' << fmt17(g.x0)
       << ',' << fmt17(g.y0) << '\n';
    for (std::size_t c = 0; c < snap.names.size(); ++c) os << (c ? "," : "") << snap.names[c];
    os << '\n';
    for (std::size_t k = 0; k < g.size(); ++k) {
        for (std::size_t c = 0; c < snap.columns.size(); ++c) {
            os << (c ? "," : "") << fmt17(snap.columns[c][k]);
        }
        os << '\n';
    }
    if (!os) throw Error("write_snapshot: write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("read_snapshot: cannot open " + path.string());
    std::string line;
    int line_no = 0;
    auto next = [&]() -> bool {
        if (!std::getline(is, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };
    if (!next() || line != "nx,ny,hx,hy,x0,y0") {
        throw InvalidArgument("snapshot line 1: expected header 'nx,ny,hx,hy,x0,y0'");
    }
    if (!next()) throw InvalidArgument("snapshot line 2: missing grid values");
    const auto gv = split_csv(line);
    if (gv.size() != 6) throw InvalidArgument("snapshot line 2: expected 6 grid values");
    Snapshot snap;
    snap.grid.nx = static_cast<int>(parse_real(gv[0], line_no));
    snap.grid.ny = static_cast<int>(parse_real(gv[1], line_no));
    snap.grid.hx = parse_real(gv[2], line_no);
    snap.grid.hy = parse_real(gv[3], line_no);
    snap.grid.x0 = parse_real(gv[4], line_no);
    snap.grid.y0 = parse_real(gv[5], line_no);
    snap.grid.validate();
    if (!next()) throw InvalidArgument("snapshot line 3: missing column names");
    snap.names = split_csv(line);
    if (snap.names.empty()) throw InvalidArgument("snapshot line 3: no columns");
    snap.columns.assign(snap.names.size(), std::vector<double>(snap.grid.size()));
    for (std::size_t k = 0; k < snap.grid.size(); ++k) {
        if (!next()) {
            throw InvalidArgument("snapshot line " + std::to_string(line_no + 1) + ": truncated file");
        }
        const auto vals = split_csv(line);
        if (vals.size() != snap.names.size()) {
            throw InvalidArgument("snapshot line " + std::to_string(line_no) + ": wrong column count");
        }
        for (std::size_t c = 0; c < vals.size(); ++c) snap.columns[c][k] = parse_real(vals[c], line_no);
    }
    return snap;
}

Snapshot make_state_snapshot(const ScalarField& p, const VectorField2& m) {
    Snapshot s;
    s.grid = p.grid;
    s.names = {"p", "m1", "m2"};
    s.columns = {p.values, m.c1, m.c2};
    return s;
}

}  // namespace hucai
