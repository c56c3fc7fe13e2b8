#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "relepr/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args)
{
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = relepr::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) fields.push_back(field);
    if (!line.empty() && line.back() == sep) fields.emplace_back();
    return fields;
}

/// Data rows (header comments and the column line removed).
std::vector<std::vector<std::string>> rows(const std::string& csv)
{
    std::vector<std::vector<std::string>> out;
    std::istringstream in(csv);
    std::string line;
    bool seen_columns = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        if (!seen_columns) {
            REQUIRE(line == "v,param,model,C,delta,extra");
            seen_columns = true;
            continue;
        }
        out.push_back(split(line, ','));
    }
    return out;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string field(const std::string& text, const std::string& key)
{
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
    }
    return {};
}

struct TempDir {
    fs::path path;
    TempDir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("relepr-test-" + std::to_string(std::random_device{}()) + "-" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("correlate")
{
    SUBCASE("same-frame singlet")
    {
        const Run r = cli({"correlate", "--model", "pf-same-frame", "--spin", "half", "--a", "1,0,0", "--b", "1,0,0"});
        REQUIRE(r.code == 0);
        const auto data = rows(r.out);
        REQUIRE(data.size() == 1);
        CHECK(data[0][2] == "pf-same-frame");
        CHECK(data[0][3] == "-1");
        CHECK(data[0][4] == "0");
    }
    SUBCASE("spin-1 Newton-Wigner on fig5")
    {
        const Run r = cli({"correlate", "--model", "nw-one", "--preset", "fig5", "--omega", "0", "--v", "0.8"});
        REQUIRE(r.code == 0);
        const auto data = rows(r.out);
        CHECK(data[0][0] == "0.8");
        CHECK(data[0][1] == "0");
        CHECK(data[0][3] == "-0.0879001628");
        CHECK(data[0][4] == "0.578766504");
    }
    SUBCASE("fig2 at rest")
    {
        const Run r = cli({"correlate", "--model", "nw-half", "--preset", "fig2", "--theta", "0", "--v", "0"});
        REQUIRE(r.code == 0);
        const auto data = rows(r.out);
        CHECK(data[0][3] == "-1");
        CHECK(data[0][4] == "0");
    }
    SUBCASE("degree angles")
    {
        const Run deg = cli({"correlate", "--model", "nw-half", "--preset", "fig2", "--theta", "45deg", "--v", "0.8"});
        const Run rad = cli({"correlate", "--model", "nw-half", "--preset", "fig2", "--theta", "0.785398163397448", "--v", "0.8"});
        REQUIRE(deg.code == 0);
        CHECK(rows(deg.out)[0][3] == rows(rad.out)[0][3]);
    }
    SUBCASE("header block")
    {
        const Run r = cli({"correlate", "--model", "cm-half", "--preset", "fig2", "--v", "0.5"});
        CHECK(r.out.find("# model: cm-half") != std::string::npos);
        CHECK(r.out.find("# tool: relepr ") != std::string::npos);
        CHECK(r.out.find("# vA: ") != std::string::npos);
    }
    SUBCASE("json")
    {
        const Run r = cli({"correlate", "--model", "pf-same-frame", "--a", "1,0,0", "--b", "0,1,0", "--format", "json"});
        REQUIRE(r.code == 0);
        CHECK(r.out.find("\"rows\"") != std::string::npos);
        CHECK(r.out.find("\"C\": 0") != std::string::npos);
    }
    SUBCASE("validation errors name the field")
    {
        Run r = cli({"correlate", "--model", "pf-same-frame", "--a", "1,0", "--b", "1,0,0"});
        CHECK(r.code == 2);
        CHECK(r.err.find("--a") != std::string::npos);
        r = cli({"correlate", "--model", "pf-same-frame", "--a", "3,0,0", "--b", "1,0,0"});
        CHECK(r.code == 2);
        CHECK(r.err.find("--a") != std::string::npos);
        r = cli({"correlate", "--model", "nw-half", "--a", "1,0,0", "--b", "1,0,0", "--vA", "1,0,0"});
        CHECK(r.code == 2);
        CHECK(r.err.find("--vA") != std::string::npos);
        CHECK(cli({"correlate", "--model", "bogus"}).code == 2);
        CHECK(cli({"correlate", "--model", "nw-half", "--v", "0.5"}).code == 2);
        CHECK(cli({"correlate", "--model", "nw-half", "--preset", "fig2", "--omega", "1"}).code == 2);
        CHECK(cli({"nonsense"}).code == 2);
        CHECK(cli({}).code == 2);
    }
    SUBCASE("help")
    {
        CHECK(cli({"--help"}).code == 0);
    }
}

TEST_CASE("inequality")
{
    SUBCASE("CHSH at the fig10 axes")
    {
        const Run r = cli({"inequality", "--model", "pf-same-frame", "--spin", "half", "--preset", "fig10"});
        REQUIRE(r.code == 0);
        CHECK(field(r.out, "# value") == "2.82842712");
        CHECK(field(r.out, "# violated") == "true");
        CHECK(rows(r.out)[0][5] == "0.828427125");
    }
    SUBCASE("Bell-Mermin at its maximum")
    {
        const Run r = cli({"inequality", "--model", "nw-one", "--preset", "fig9", "--v", "0.414214"});
        REQUIRE(r.code == 0);
        CHECK(field(r.out, "# value") == "1.06066017");
        CHECK(field(r.out, "# violated") == "true");
    }
    SUBCASE("Bell-Mermin same-frame")
    {
        const Run r = cli({"inequality", "--model", "pf-same-frame", "--spin", "one", "--preset", "fig9"});
        REQUIRE(r.code == 0);
        CHECK(field(r.out, "# value") == "1");
        CHECK(field(r.out, "# violated") == "false");
    }
    SUBCASE("spin mismatch")
    {
        CHECK(cli({"inequality", "--model", "nw-one", "--kind", "chsh", "--preset", "fig10"}).code == 2);
        CHECK(cli({"inequality", "--model", "nw-half", "--kind", "other", "--preset", "fig10"}).code == 2);
    }
}

TEST_CASE("scan")
{
    SUBCASE("rows follow the grid")
    {
        const Run r = cli({"scan", "--model", "nw-half", "--preset", "fig2", "--theta", "0", "--objective", "deviation",
                           "--grid", "0:0.8:5"});
        REQUIRE(r.code == 0);
        const auto data = rows(r.out);
        REQUIRE(data.size() == 5);
        CHECK(data[0][0] == "0");
        CHECK(data[0][4] == "0");
        CHECK(data[4][0] == "0.8");
        CHECK(data[4][4] == "0.115384615");
        CHECK(r.out.find("# grid v: 0:0.8:5") != std::string::npos);
    }
    SUBCASE("angle grid")
    {
        const Run r = cli({"scan", "--model", "nw-half,cm-half", "--preset", "fig2", "--grid", "0:0.5:3", "--angle-grid",
                           "0:3:4", "--threads", "2"});
        REQUIRE(r.code == 0);
        CHECK(rows(r.out).size() == 24);
    }
    SUBCASE("validation")
    {
        CHECK(cli({"scan", "--model", "nw-half", "--preset", "fig2", "--grid", "0:0.9:0"}).code == 2);
        CHECK(cli({"scan", "--model", "nw-half", "--preset", "fig2", "--grid", "0:1.5:3"}).code == 2);
        CHECK(cli({"scan", "--model", "nw-half", "--grid", "0:0.5:3"}).code == 2);
        CHECK(cli({"scan", "--model", "nw-half", "--preset", "fig2", "--vA", "0.1,0,0"}).code == 2);
        CHECK(cli({"scan", "--model", "nw-half", "--preset", "fig2", "--objective", "model-gap"}).code == 2);
    }
    SUBCASE("unwritable output")
    {
        const Run r = cli({"scan", "--model", "nw-half", "--preset", "fig2", "--grid", "0:0.5:3", "--out",
                           "/nonexistent-dir/x/out.csv"});
        CHECK(r.code == 3);
    }
}

TEST_CASE("optimize")
{
    const Run r = cli({"optimize", "--model", "pf-same-frame", "--preset", "fig10", "--free", "axes", "--starts", "8"});
    REQUIRE(r.code == 0);
    const double best = std::stod(field(r.out, "best_value"));
    CHECK(best >= 2.0 * std::sqrt(2.0) - 1e-6);
    CHECK(best <= 2.0 * std::sqrt(2.0) + 1e-9);

    const Run bm = cli({"optimize", "--model", "nw-one", "--preset", "fig9", "--objective", "bell-mermin", "--free", "v",
                        "--format", "json", "--trace"});
    REQUIRE(bm.code == 0);
    CHECK(bm.out.find("\"best_value\": 1.06066017") != std::string::npos);
    CHECK(bm.out.find("\"trace\"") != std::string::npos);

    CHECK(cli({"optimize", "--model", "pf-same-frame", "--preset", "fig10"}).code == 2);
    CHECK(cli({"optimize", "--model", "nw-half", "--preset", "fig2", "--free", "omega"}).code == 2);
}

TEST_CASE("power")
{
    const auto n = [](const char* v) {
        const Run r = cli({"power", "--model", "nw-half", "--preset", "fig2", "--theta", "0", "--v", v});
        REQUIRE(r.code == 0);
        return std::stoull(field(r.out, "required_events"));
    };
    CHECK(n("0.8") == 129);
    CHECK(n("0.17") == 193283);
    CHECK(n("0.17") > n("0.8"));
    CHECK(cli({"power", "--model", "nw-half", "--preset", "fig2", "--v", "0"}).code == 2);
    CHECK(cli({"power", "--model", "nw-one", "--preset", "fig5", "--v", "0.5"}).code == 2);
}

TEST_CASE("sample")
{
    const std::vector<std::string> args{"sample", "--model", "pf-same-frame", "--a", "1,0,0", "--b", "0.7071067811865476,0.7071067811865476,0",
                                        "--events", "100000", "--seed", "3"};
    const Run a = cli(args);
    const Run b = cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("\"prng\": \"mt19937_64/u53/inverse-cdf\"") != std::string::npos);
    CHECK(cli({"sample", "--model", "nw-one", "--preset", "fig5", "--v", "0.5"}).code == 2);
}

TEST_CASE("figures")
{
    TempDir first;
    TempDir second;
    const Run r1 = cli({"figures", "--out", first.path.string(), "--grid", "0:0.8:5"});
    const Run r2 = cli({"figures", "--out", second.path.string(), "--grid", "0:0.8:5"});
    REQUIRE(r1.code == 0);
    REQUIRE(r2.code == 0);
    for (const char* name : {"fig4a.csv", "fig4b.csv", "fig7.csv", "fig9.csv", "fig10.csv"}) {
        CAPTURE(name);
        REQUIRE(fs::exists(first.path / name));
        CHECK(slurp(first.path / name) == slurp(second.path / name));
    }

    const std::string fig4a = slurp(first.path / "fig4a.csv");
    CHECK(fig4a.find("# angles theta: 0, pi/4, pi/3, 2pi/3") != std::string::npos);
    const auto data = rows(fig4a);
    REQUIRE(data.size() == 20);
    for (const auto& row : data) {
        if (row[0] == "0") CHECK(row[4] == "0");
    }
    CHECK(data[4][1] == "0");
    CHECK(data[4][4] == "0.115384615");

    const auto fig10 = rows(slurp(first.path / "fig10.csv"));
    REQUIRE(fig10.size() == 15);
    for (std::size_t i = 0; i < 5; ++i) CHECK(fig10[i][3] == "2.82842712");

    TempDir anchor;
    REQUIRE(cli({"figures", "--out", anchor.path.string(), "--grid", "0:0.828428:3"}).code == 0);
    const auto fig9 = rows(slurp(anchor.path / "fig9.csv"));
    REQUIRE(fig9.size() == 9);
    CHECK(fig9[1][0] == "0.414214");
    CHECK(fig9[1][2] == "nw-one");
    CHECK(fig9[1][3] == "1.06066017");
    CHECK(fig9[4][3] == "1.06066017");
    CHECK(fig9[7][3] == "1");

    TempDir json;
    REQUIRE(cli({"figures", "--out", json.path.string(), "--grid", "0:0.5:2", "--format", "json"}).code == 0);
    CHECK(fs::exists(json.path / "fig7.json"));

    CHECK(cli({"figures", "--out", "/proc/relepr-cannot-write", "--grid", "0:0.5:2"}).code == 3);
    CHECK(cli({"figures", "--grid", "0:0.5:1"}).code == 2);
}

TEST_CASE("installed binary exit codes")
{
    const auto status = [](const std::string& args) {
        const int raw = std::system((std::string(RELEPR_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status("correlate --model pf-same-frame --a 1,0,0 --b 0,0,1") == 0);
    CHECK(status("scan --model nw-half --preset fig2 --grid 0:0.9:0") == 2);
    CHECK(status("scan --model nw-half --preset fig2 --grid 0:0.5:3 --out /nonexistent-dir/x.csv") == 3);
}
