#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "hucai/dynamics.hpp"
#include "hucai/error.hpp"
#include "hucai/field_io.hpp"
#include "modes.hpp"

using namespace hucai;
using namespace hucai::app;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config_text(text, "cfg");
    } catch (const InvalidArgument& e) {
        return e.what();
    }
    return {};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hucai_cli_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(Config, MinimalSimulateFillsDefaults) {
    const RunConfig c = parse_config_text("mode = simulate\n");
    EXPECT_EQ(c.mode, Mode::Simulate);
    EXPECT_DOUBLE_EQ(c.tol, 1e-10);
    EXPECT_DOUBLE_EQ(c.params.v_min, 1.0);
    EXPECT_DOUBLE_EQ(c.params.r_exp, 2.0);
    EXPECT_DOUBLE_EQ(c.params.delta_exp, 2.5);
    EXPECT_EQ(c.dt, 0.0);
}

TEST(Config, CommentsAndWhitespace) {
    const RunConfig c = parse_config_text("# header\n\n  cells =  16  # trailing\nmms_cells = 8, 16 ,32\n");
    EXPECT_EQ(c.cells, 16);
    EXPECT_EQ(c.mms_cells, (std::vector<int>{8, 16, 32}));
}

TEST(Config, GammaBelowHalfRejected) {
    const std::string e = error_of("gamma = 0.4\n");
    EXPECT_NE(e.find("gamma"), std::string::npos) << e;
    EXPECT_NE(e.find("1/2"), std::string::npos) << e;
}

TEST(Config, DeGiorgiNeedsBall) {
    EXPECT_NE(error_of("mode = degiorgi\nball_x = 0.5\n").find("ball"), std::string::npos);
    EXPECT_NO_THROW(parse_config_text("mode = degiorgi\nball_x = 0.5\nball_y = 0.5\nball_r = 0.2\n"));
}

TEST(Config, ModeOverrideValidatedAfterwards) {
    EXPECT_THROW(parse_config_text("cells = 8\n", "cfg", Mode::DeGiorgi), InvalidArgument);
    EXPECT_EQ(parse_config_text("mode = degiorgi\n", "cfg", Mode::Mms).mode, Mode::Mms);
}

TEST(Config, ParseErrorsCarryLineNumbers) {
    EXPECT_NE(error_of("cells = 8\n\nfoo = 1\n").find("line 3"), std::string::npos);
    EXPECT_NE(error_of("cells = 8\ncells = 9\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("cells\n").find("line 1"), std::string::npos);
    EXPECT_NE(error_of("T = 1\nalpha = one\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("dt = 0\n").find("dt"), std::string::npos);
    EXPECT_NE(error_of("mode = explode\n").find("unknown mode"), std::string::npos);
}

TEST(Config, MissingFile) {
    EXPECT_THROW(parse_config("/nonexistent/hucai.cfg"), InvalidArgument);
}

TEST(Config, OutputDirectoryPrecedence) {
    RunConfig c;
    c.out = "from_file";
    EXPECT_EQ(resolve_out_dir(c, "", nullptr), fs::path("from_file"));
    EXPECT_EQ(resolve_out_dir(c, "", ""), fs::path("from_file"));
    EXPECT_EQ(resolve_out_dir(c, "", "from_env"), fs::path("from_env"));
    EXPECT_EQ(resolve_out_dir(c, "from_cli", "from_env"), fs::path("from_cli"));
}

TEST(Run, ZeroDataSimulationHasZeroMonitors) {
    const RunConfig c = parse_config_text("cells = 8\nsource = zero\nm0 = zero\nT = 0.1\n");
    const fs::path out = scratch("zero");
    std::ostringstream log;
    EXPECT_EQ(run(c, out, log), 0) << log.str();
    const auto recs = read_monitor_csv(out / "monitor.csv");
    ASSERT_FALSE(recs.empty());
    for (const MonitorRecord& r : recs) {
        EXPECT_EQ(r.sup_grad_p, 0.0);
        EXPECT_EQ(r.sup_grad_m, 0.0);
        EXPECT_EQ(r.sup_v, 0.0);
        EXPECT_EQ(r.l2_m, 0.0);
    }
    EXPECT_TRUE(fs::exists(out / "summary.json"));
    fs::remove_all(out);
}

TEST(Run, SimulationIsDeterministicAndRoundTrips) {
    const RunConfig c = parse_config_text("cells = 12\nT = 0.2\nsnapshot_stride = 5\n");
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    std::ostringstream log;
    ASSERT_EQ(run(c, a, log), 0);
    ASSERT_EQ(run(c, b, log), 0);
    EXPECT_EQ(slurp(a / "monitor.csv"), slurp(b / "monitor.csv"));
    EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));
    for (const auto& e : fs::directory_iterator(a / "snapshots")) {
        EXPECT_EQ(slurp(e.path()), slurp(b / "snapshots" / e.path().filename()));
        const Snapshot s = read_snapshot(e.path());
        EXPECT_EQ(s.names, (std::vector<std::string>{"p", "m1", "m2"}));
    }
    const auto recs = read_monitor_csv(a / "monitor.csv");
    write_monitor_csv(a / "again.csv", recs);
    EXPECT_EQ(slurp(a / "monitor.csv"), slurp(a / "again.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Run, SourceFromSnapshotFile) {
    const fs::path dir = scratch("srcfile");
    fs::create_directories(dir);
    const Grid2D g = Grid2D::unit_square(10);
    Snapshot s;
    s.grid = g;
    s.names = {"s"};
    s.columns = {std::vector<double>(g.size(), 3.0)};
    write_snapshot(dir / "s.csv", s);
    const RunConfig c = parse_config_text("source = file:" + (dir / "s.csv").string() + "\nT = 0.05\n");
    std::ostringstream log;
    EXPECT_EQ(run(c, dir / "out", log), 0) << log.str();
    const auto recs = read_monitor_csv(dir / "out" / "monitor.csv");
    EXPECT_GT(recs.front().sup_grad_p, 0.0);
    fs::remove_all(dir);
}

TEST(Run, VerifyModePasses) {
    const RunConfig c = parse_config_text("mode = verify\nverify_points = 2000\nresidual_cells = 64, 128, 256\n");
    const fs::path out = scratch("verify");
    std::ostringstream log;
    EXPECT_EQ(run(c, out, log), 0) << log.str();
    const std::string rep = slurp(out / "verify_report.json");
    EXPECT_NE(rep.find("\"hessian_identity\""), std::string::npos);
    EXPECT_EQ(rep.find("\"fail\""), std::string::npos);
    fs::remove_all(out);
}

TEST(Run, MmsModeWritesOrderTable) {
    const RunConfig c = parse_config_text("mode = mms\nmms_cells = 16, 32, 64\n");
    const fs::path out = scratch("mms");
    std::ostringstream log;
    run(c, out, log);
    std::ifstream in(out / "mms_orders.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "operator,cells,error,order");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 15);
    fs::remove_all(out);
}

TEST(Run, DeGiorgiOnSnapshot) {
    const fs::path dir = scratch("dg");
    fs::create_directories(dir);
    const Grid2D g = Grid2D::unit_square(32);
    ScalarField p = ScalarField::sample(g, [](double x, double y) { return 3.0 * x * (1 - x) * y * (1 - y); });
    write_snapshot(dir / "state.csv", make_state_snapshot(p, VectorField2(g)));
    const RunConfig c = parse_config_text("mode = degiorgi\nsource = zero\nball_x = 0.5\nball_y = 0.5\nball_r = 0.3\n"
                                          "degiorgi_snapshot = " + (dir / "state.csv").string() + "\n");
    std::ostringstream log;
    EXPECT_EQ(run(c, dir / "out", log), 0) << log.str();
    EXPECT_TRUE(fs::exists(dir / "out" / "degiorgi.csv"));
    fs::remove_all(dir);
}
