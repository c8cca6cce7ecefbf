#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "roccet_lab/cli.hpp"

namespace fs = std::filesystem;
using roccet_lab::cli::run_cli;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("roccet_lab_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

int count_lines(const std::string& text) {
    return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("run writes the three artifacts") {
    const fs::path dir = scratch_dir("run");
    const Result r = cli({"run", "--builtin", "bw-halving", "--algo", "roccet", "-o", dir.string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "trace.csv"));
    CHECK(fs::exists(dir / "events.json"));
    CHECK(fs::exists(dir / "summary.txt"));
    CHECK(slurp(dir / "trace.csv").rfind("# roccet-lab trace v1\n", 0) == 0);
    const auto events = nlohmann::json::parse(slurp(dir / "events.json"));
    CHECK(events["format"] == "roccet-lab events v1");
    CHECK(events["config"]["name"] == "bw-halving");
}

TEST_CASE("unknown builtin is a validation error") {
    const Result r = cli({"run", "--builtin", "nope"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error: validation: unknown scenario 'nope'\n", 0) == 0);
    CHECK(count_lines(r.err) == 2);
}

TEST_CASE("usage errors") {
    CHECK(cli({}).code == 1);
    CHECK(cli({"fly"}).code == 1);
    const Result both = cli({"run", "--builtin", "steady", "--scenario", "x.json"});
    CHECK(both.code == 1);
    CHECK(both.err.rfind("error: usage: ", 0) == 0);
    CHECK(cli({"run"}).code == 1);
    CHECK(cli({"run", "--builtin", "steady", "--algo", "vegas", "-o", scratch_dir("algo").string()}).code == 1);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("overrides are echoed in the resolved config") {
    const fs::path dir = scratch_dir("override");
    const Result r = cli({"run", "--builtin", "bw-halving", "--set", "roccet.alpha=0.5", "--set", "horizon_s=20", "-o",
                          dir.string()});
    REQUIRE(r.code == 0);
    const std::string summary = slurp(dir / "summary.txt");
    const auto pos = summary.find("# resolved config\n");
    REQUIRE(pos != std::string::npos);
    const auto config = nlohmann::json::parse(summary.substr(pos + 18));
    CHECK(config["roccet"]["alpha"] == 0.5);
    CHECK(config["horizon_s"] == 20);

    const Result bad = cli({"run", "--builtin", "steady", "--set", "roccet.alfa=1", "-o", dir.string()});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("unknown key 'roccet.alfa'") != std::string::npos);
}

TEST_CASE("same invocation gives identical artifacts") {
    const fs::path a = scratch_dir("same_a"), b = scratch_dir("same_b");
    REQUIRE(cli({"run", "--builtin", "frozen-cwnd", "--seed", "7", "-o", a.string()}).code == 0);
    REQUIRE(cli({"run", "--builtin", "frozen-cwnd", "--seed", "7", "-o", b.string()}).code == 0);
    for (const char* f : {"trace.csv", "events.json", "summary.txt"}) CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("output directory from the environment") {
    const fs::path dir = scratch_dir("env");
    ::setenv(roccet_lab::cli::kOutputEnv, dir.c_str(), 1);
    const Result r = cli({"run", "--builtin", "steady", "--set", "horizon_s=3"});
    ::unsetenv(roccet_lab::cli::kOutputEnv);
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "trace.csv"));
}

TEST_CASE("report compares traces") {
    const fs::path roccet = scratch_dir("rep_roccet"), cubic = scratch_dir("rep_cubic");
    REQUIRE(cli({"run", "--builtin", "bw-halving", "--algo", "roccet", "-o", roccet.string()}).code == 0);
    REQUIRE(cli({"run", "--builtin", "bw-halving", "--algo", "cubic", "--set", "cubic.freeze_when_app_limited=true", "-o",
                 cubic.string()})
                .code == 0);
    const std::string r_csv = (roccet / "trace.csv").string(), c_csv = (cubic / "trace.csv").string();
    const Result r = cli({"report", r_csv, c_csv});
    REQUIRE(r.code == 0);

    std::istringstream table(r.out);
    std::string header, line;
    std::getline(table, header);
    CHECK(header.find(r_csv) != std::string::npos);
    CHECK(header.find(c_csv) != std::string::npos);
    std::map<std::string, std::vector<std::string>> cells;
    while (std::getline(table, line)) {
        std::istringstream words(line);
        std::vector<std::string> w;
        for (std::string x; words >> x;) w.push_back(x);
        REQUIRE(w.size() >= 4);
        cells[w[0] + " " + w[1]] = {w[w.size() - 2], w[w.size() - 1]};
    }
    CHECK(std::stoi(cells["ce RoccetCe"][0]) >= 1);
    CHECK(std::stoi(cells["ce RoccetCe"][1]) == 0);

    const auto events = nlohmann::json::parse(slurp(roccet / "events.json"));
    int after = 0;
    for (const auto& e : events["ce"]) after += e["kind"] == "RoccetCe" && e["time_ms"].get<double>() >= 15000;
    CHECK(after >= 1);

    const Result json_out = cli({"report", "--format", "json", r_csv});
    CHECK(json_out.code == 0);
    CHECK(nlohmann::json::parse(json_out.out).size() == 1);
}

TEST_CASE("report errors name the file and row") {
    const fs::path dir = scratch_dir("bad_trace");
    fs::create_directories(dir);
    const fs::path bad = dir / "trace.csv";
    std::ofstream(bad) << "# roccet-lab trace v1\n# config {}\ntime_ms,flow_id,cwnd_seg,srtt_ms,goodput_mbps,queue_seg\n"
                          "10.000,0,10.000,40.000,1.0,0\n20.000,0,ten,40.000,1.0,0\n";
    const Result r = cli({"report", bad.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find(bad.string() + ":5:") != std::string::npos);

    const fs::path none = dir / "header_only.csv";
    std::ofstream(none) << "# roccet-lab trace v1\n# config {}\ntime_ms,flow_id,cwnd_seg,srtt_ms,goodput_mbps,queue_seg\n";
    CHECK(cli({"report", none.string()}).code == 1);

    const fs::path late = dir / "late.csv";
    std::ofstream(late) << "# roccet-lab trace v1\n# config {}\ntime_ms,flow_id,cwnd_seg,srtt_ms,goodput_mbps,queue_seg\n"
                           "0.000,0,10.000,40.000,1.0,0\n1000.000,1,10.000,40.000,1.0,0\n";
    const Result w = cli({"report", late.string()});
    CHECK(w.code == 1);
    CHECK(w.err.find("no samples in window [0.100 s, 1.000 s)") != std::string::npos);

    CHECK(cli({"report", (dir / "missing.csv").string()}).code == 1);
}

TEST_CASE("sweep writes a results table") {
    const fs::path dir = scratch_dir("sweep");
    const Result r = cli({"sweep", "--builtin", "intra-10x40", "--reps", "1", "--set", "horizon_s=4", "--serial", "-o",
                          dir.string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "results.csv"));
    CHECK(fs::exists(dir / "sweep.json"));
    CHECK(count_lines(slurp(dir / "results.csv")) == 1 + 4 * (2 + 4 + 8));
    CHECK(r.out.find("n_flows=1 buffer_bdp=1") != std::string::npos);

    const Result capped = cli({"sweep", "--builtin", "fairness-10x40", "--reps", "200"});
    CHECK(capped.code == 1);
    CHECK(capped.err.find("7200") != std::string::npos);
}

TEST_CASE("list-scenarios") {
    const Result r = cli({"list-scenarios"});
    CHECK(r.code == 0);
    for (const char* name : {"steady", "bw-halving", "frozen-cwnd", "fairness-10x40", "intra-10x40"})
        CHECK(r.out.find(name) != std::string::npos);
}

TEST_CASE("the binary reports exit codes") {
    const std::string bin = ROCCET_LAB_BIN;
    auto status = [](const std::string& cmd) {
        const int raw = std::system((cmd + " > /dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status(bin + " list-scenarios") == 0);
    CHECK(status(bin + " run --builtin nope") == 1);
    const fs::path blocked = scratch_dir("blocked");
    std::ofstream(blocked.string()) << "a file, not a directory";
    CHECK(status(bin + " run --builtin steady --set horizon_s=2 -o " + (blocked / "sub").string()) == 2);
    fs::remove(blocked);
}
