// End-to-end tests of the installed command-line tool: spawns the real
// binary, parses the CSV files it writes, checks exit codes and determinism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

constexpr double kPi = 3.14159265358979323846;

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() /
              ("qbcli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()));
        fs::create_directories(dir);
    }
    ~Sandbox() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    static int counter() {
        static int n = 0;
        return ++n;
    }
    fs::path operator/(const std::string& name) const { return dir / name; }
};

int run(const std::string& args, const fs::path& log) {
    const std::string cmd =
        std::string(QB_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Csv parse_csv(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    Csv csv;
    std::string line;
    REQUIRE(std::getline(in, line));
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) csv.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        REQUIRE(row.size() == csv.header.size());
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("usage and exit codes") {
    Sandbox sb;
    CHECK(run("--help", sb / "help.log") == 0);
    CHECK(run("no-such-command", sb / "bad.log") == 1);
    CHECK(run("time-sweep --no-such-flag", sb / "flag.log") == 1);

    write_file(sb / "bad.conf", "bogus_key=1\n");
    CHECK(run("time-sweep --config " + (sb / "bad.conf").string(), sb / "conf.log") == 1);
    CHECK(slurp(sb / "conf.log").find("bogus_key") != std::string::npos);

    // non-passive init is a config error
    CHECK(run("repeat-charge --init trunc2:0.2 --out " + (sb / "x.csv").string(),
              sb / "init.log") == 1);
}

TEST_CASE("time sweep of the resonant vacuum") {
    Sandbox sb;
    write_file(sb / "opt.conf", "opt_alpha_grid=19\nopt_gamma_grid=4\n# small optimizer\n");
    const std::string out1 = (sb / "sweep1.csv").string();
    const int rc = run("time-sweep --config " + (sb / "opt.conf").string() +
                           " --tgrid 0:6.283185307179586:41 --out " + out1,
                       sb / "ts.log");
    REQUIRE(rc == 0);

    const Csv csv = parse_csv(out1);
    CHECK(csv.header ==
          std::vector<std::string>{"t", "ergotropy", "daemonic_min", "daemonic_max", "gap",
                                   "band"});
    REQUIRE(csv.rows.size() == 41);
    for (size_t i = 0; i < csv.rows.size(); ++i) {
        const auto& row = csv.rows[i];
        const double t = row[0], s2 = std::sin(t) * std::sin(t);
        CHECK(std::abs(row[1] - std::max(0.0, s2 - (1.0 - s2))) < 1e-9);  // ergotropy
        CHECK(std::abs(row[2] - s2) < 1e-9);                              // daemonic_min
        CHECK(std::abs(row[3] - s2) < 1e-9);                              // daemonic_max
        CHECK(std::abs(row[4] - (row[2] - row[1])) < 1e-12);              // gap column
        CHECK(std::abs(row[5] - (row[3] - row[2])) < 1e-12);              // band column
    }
    const auto& first = csv.rows[0];
    for (double v : first) CHECK(v == 0.0);

    // identical invocation produces a byte-identical file
    const std::string out2 = (sb / "sweep2.csv").string();
    REQUIRE(run("time-sweep --config " + (sb / "opt.conf").string() +
                    " --tgrid 0:6.283185307179586:41 --out " + out2,
                sb / "ts2.log") == 0);
    CHECK(slurp(out1) == slurp(out2));

    // the worker pool must not change the output
    write_file(sb / "opt3.conf", "opt_alpha_grid=19\nopt_gamma_grid=4\nthreads=3\n");
    const std::string out3 = (sb / "sweep3.csv").string();
    REQUIRE(run("time-sweep --config " + (sb / "opt3.conf").string() +
                    " --tgrid 0:6.283185307179586:41 --out " + out3,
                sb / "ts3.log") == 0);
    CHECK(slurp(out1) == slurp(out3));
}

TEST_CASE("repeat-charge ladder table") {
    Sandbox sb;
    const std::string out = (sb / "ladder.csv").string();
    REQUIRE(run("repeat-charge --cycles 15 --out " + out, sb / "rc.log") == 0);
    const Csv csv = parse_csv(out);
    REQUIRE(csv.header.size() == 14);  // m, tau_m, e_max_m, pop_0..pop_10
    CHECK(csv.header[0] == "m");
    CHECK(csv.header[3] == "pop_0");
    CHECK(csv.header[13] == "pop_10");
    REQUIRE(csv.rows.size() == 10);
    for (size_t i = 0; i < csv.rows.size(); ++i) {
        CHECK(csv.rows[i][0] == doctest::Approx(i + 1.0));
        CHECK(std::abs(csv.rows[i][2] - (i + 1.0)) < 1e-9);
        CHECK(std::abs(csv.rows[i][1] - kPi / (2.0 * std::sqrt(i + 1.0))) < 1e-8);
    }
    CHECK(slurp(sb / "rc.log").find("full_charge") != std::string::npos);
}

TEST_CASE("double-mode table flags simultaneous charging") {
    Sandbox sb;
    const std::string out = (sb / "dm.csv").string();
    REQUIRE(run("double-mode --cycles 3 --out " + out, sb / "dm.log") == 0);
    const Csv csv = parse_csv(out);
    CHECK(csv.header == std::vector<std::string>{"m", "tau_m", "e_b", "e_b1", "e_b2",
                                                 "simultaneous"});
    REQUIRE(csv.rows.size() == 3);
    CHECK(csv.rows[0][5] == 0.0);
    CHECK(std::abs(csv.rows[0][2] - 0.85) < 1e-9);  // omega1 c^2 + omega2 s^2 at theta = pi/2
    CHECK(csv.rows[1][5] == 1.0);
    CHECK(csv.rows[1][3] > 1e-3);
    CHECK(csv.rows[1][4] > 1e-3);
}

TEST_CASE("double-mode truncated inits charge collectively first") {
    Sandbox sb;
    const std::string out = (sb / "dm_trunc.csv").string();
    REQUIRE(run("double-mode --init trunc2:0.8 --cycles 3 --out " + out, sb / "dmt.log") == 0);
    const Csv csv = parse_csv(out);
    REQUIRE(csv.rows.size() == 3);
    // round 1: the collective battery charges while neither mode does
    CHECK(csv.rows[0][2] > 0.5);
    CHECK(csv.rows[0][3] <= 1e-9);
    CHECK(csv.rows[0][4] <= 1e-9);
    CHECK(csv.rows[0][5] == 0.0);
    // later rounds carry all three
    CHECK(csv.rows[2][2] > csv.rows[0][2]);
    CHECK(csv.rows[2][3] > 1e-3);
    CHECK(csv.rows[2][4] > 1e-3);
    CHECK(csv.rows[2][5] == 1.0);
}

TEST_CASE("landscape grid") {
    Sandbox sb;
    write_file(sb / "grid.conf", "r0_grid=0.6:0.9:4\nalpha_grid=0:3.141592653589793:9\n");
    const std::string out1 = (sb / "ls1.csv").string();
    REQUIRE(run("landscape --config " + (sb / "grid.conf").string() + " --out " + out1,
                sb / "ls.log") == 0);
    const Csv csv = parse_csv(out1);
    CHECK(csv.header == std::vector<std::string>{"r0", "alpha", "advantage"});
    REQUIRE(csv.rows.size() == 36);
    for (int block = 0; block < 4; ++block) {
        double best = 1e300;
        int best_j = -1;
        for (int j = 0; j < 9; ++j) {
            const auto& row = csv.rows[block * 9 + j];
            CHECK(row[2] >= -1e-9);
            if (row[2] < best) {
                best = row[2];
                best_j = j;
            }
        }
        // resonant two-level mixtures minimize in the energy eigenbasis
        CHECK((best_j == 0 || best_j == 8));
    }

    // the advantage table is invariant under a shift of gamma
    write_file(sb / "grid2.conf",
               "r0_grid=0.6:0.9:4\nalpha_grid=0:3.141592653589793:9\ngamma=2.0\n");
    const std::string out2 = (sb / "ls2.csv").string();
    REQUIRE(run("landscape --config " + (sb / "grid2.conf").string() + " --out " + out2,
                sb / "ls2.log") == 0);
    const Csv csv2 = parse_csv(out2);
    REQUIRE(csv2.rows.size() == csv.rows.size());
    for (size_t i = 0; i < csv.rows.size(); ++i) {
        CHECK(std::abs(csv.rows[i][2] - csv2.rows[i][2]) < 1e-9);
    }
}

TEST_CASE("beta sweep in the deep-cold limit") {
    Sandbox sb;
    write_file(sb / "beta.conf", "beta_grid=50:50:1\nopt_alpha_grid=19\nopt_gamma_grid=4\n");
    const std::string out = (sb / "beta.csv").string();
    REQUIRE(run("beta-sweep --config " + (sb / "beta.conf").string() + " --out " + out,
                sb / "bs.log") == 0);
    const Csv csv = parse_csv(out);
    CHECK(csv.header == std::vector<std::string>{"beta", "tau", "e_max", "daemonic_min", "gap"});
    REQUIRE(csv.rows.size() == 1);
    CHECK(std::abs(csv.rows[0][2] - 1.0) < 1e-6);
    CHECK(csv.rows[0][4] < 1e-3);
    CHECK(slurp(sb / "bs.log").find("gapless") != std::string::npos);
}

TEST_CASE("verify subcommand passes") {
    Sandbox sb;
    CHECK(run("verify", sb / "verify.log") == 0);
    const std::string log = slurp(sb / "verify.log");
    CHECK(log.find("verification passed") != std::string::npos);
    CHECK(log.find("FAIL") == std::string::npos);
}
