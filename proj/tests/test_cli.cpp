#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qdport/cli.hpp"
#include "qdport/io.hpp"

using namespace qdport;
namespace fs = std::filesystem;

namespace {

struct Cli {
    fs::path dir;
    std::ostringstream out, err;

    Cli() {
        dir = fs::temp_directory_path() / ("qdport_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~Cli() { fs::remove_all(dir); }

    std::string at(const std::string& name) const { return (dir / name).string(); }

    int operator()(std::vector<std::string> args) {
        out.str("");
        err.str("");
        args.insert(args.begin(), "qdport");
        return cli_dispatch(args, out, err);
    }
};

}  // namespace

TEST_CASE("usage errors") {
    Cli cli;
    CHECK(cli({}) == kExitUsage);
    CHECK(cli({"estimate", "--preset", "toy"}) == kExitUsage);
    CHECK(cli({"estimate", "--preset", "toy", "--out", cli.at("e.json"), "--bogus"}) == kExitUsage);
    CHECK(cli.err.str().find("bogus") != std::string::npos);
    CHECK(cli({"qd-run", "--out", cli.at("a.jsonl"), "--w0", "1,0,0", "--max-sharpe"}) == kExitUsage);
    CHECK(cli({"--help"}) == kExitOk);
}

TEST_CASE("toy workflow") {
    Cli cli;
    REQUIRE(cli({"estimate", "--preset", "toy", "--out", cli.at("toy.json")}) == kExitOk);
    CHECK(fs::exists(cli.at("toy.json")));

    REQUIRE(cli({"fit-gamma", "--estimates", cli.at("toy.json"), "--weights", "0.581,0.228,0.191"}) == kExitOk);
    const auto fit = nlohmann::json::parse(cli.out.str());
    CHECK(fit.at("max_abs_error").get<double>() <= 5e-3);

    REQUIRE(cli({"frontier", "--estimates", cli.at("toy.json"), "--points", "20", "--out", cli.at("f.csv")}) ==
            kExitOk);
    std::ifstream f(cli.at("f.csv"));
    std::string header;
    std::getline(f, header);
    CHECK(header == "gamma,sigma,mu,w1,w2,w3");

    std::ofstream(cli.at("toy.conf")) << "M = 40\nn_max = 8000\nn_cvt = 1000\nreference = weights:0.581,0.228,0.191\n"
                                      << "estimates = " << cli.at("toy.json") << "\n";
    const std::vector<std::string> run{"qd-run", "--config", cli.at("toy.conf"), "--seed", "5", "--quiet",
                                       "--out", cli.at("a.jsonl"), "--snapshots-out", cli.at("s.csv"),
                                       "--manifest-out", cli.at("m.json"), "--metrics-out", cli.at("met.json")};
    REQUIRE(cli(run) == kExitOk);
    const std::string first = io::file_checksum(cli.at("a.jsonl"));
    REQUIRE(cli(run) == kExitOk);
    CHECK(io::file_checksum(cli.at("a.jsonl")) == first);

    const auto manifest = nlohmann::json::parse(io::read_text(cli.at("m.json")));
    CHECK(manifest.at("archive_checksum").get<std::string>() == first);
    CHECK(manifest.at("config").at("M").get<int>() == 40);
    CHECK(manifest.at("estimates_checksum").get<std::string>() == io::checksum(io::load_estimates(cli.at("toy.json"))));

    REQUIRE(cli({"select", "--archive", cli.at("a.jsonl"), "--bd", "0.6,0.2,0.2"}) == kExitOk);
    const auto sel = nlohmann::json::parse(cli.out.str());
    CHECK(sel.at("near_optimal").get<bool>());
    CHECK(sel.at("weights").size() == 3);

    REQUIRE(cli({"metrics", "--archive", cli.at("a.jsonl"), "--estimates", cli.at("toy.json")}) == kExitOk);
    const auto met = nlohmann::json::parse(cli.out.str());
    CHECK(met.contains("qd_score1"));
    CHECK(met.contains("hull_area_weights"));

    REQUIRE(cli({"report", "--snapshots", cli.at("s.csv"), "--out", cli.at("t.csv"), "--archive", cli.at("a.jsonl"),
                 "--profiles-out", cli.at("p.csv")}) == kExitOk);
    CHECK(fs::file_size(cli.at("t.csv")) > 0);
    CHECK(fs::file_size(cli.at("p.csv")) > 0);
}

TEST_CASE("data and numerical errors") {
    Cli cli;
    CHECK(cli({"estimate", "--returns", cli.at("missing.csv"), "--out", cli.at("e.json")}) == kExitData);

    REQUIRE(cli({"estimate", "--preset", "toy", "--out", cli.at("toy.json")}) == kExitOk);
    REQUIRE(cli({"qd-run", "--estimates", cli.at("toy.json"), "--M", "20", "--n-max", "2000", "--n-cvt", "200",
                 "--quiet", "--out", cli.at("a.jsonl")}) == kExitOk);
    Estimates other = io::load_estimates(cli.at("toy.json"));
    other.mu[0] += 0.01;
    io::save_estimates(cli.at("other.json"), other);
    CHECK(cli({"metrics", "--archive", cli.at("a.jsonl"), "--estimates", cli.at("other.json")}) == kExitData);
    CHECK(cli({"select", "--archive", cli.at("a.jsonl"), "--bd", "0.5,0.5"}) == kExitData);
    CHECK(cli({"qd-run", "--estimates", cli.at("toy.json"), "--max-sharpe", "--rf", "0.5", "--quiet", "--out",
               cli.at("b.jsonl")}) == kExitData);

    // Two assets mirrored around a constant: the equal-weight market has zero variance.
    std::ofstream r(cli.at("flat.csv"));
    r << "date,A,B\n2020-01-02,0.01,-0.01\n2020-01-03,0.02,-0.02\n2020-01-06,-0.01,0.01\n";
    r.close();
    CHECK(cli({"estimate", "--returns", cli.at("flat.csv"), "--out", cli.at("e.json")}) == kExitNumerical);
    CHECK(cli.err.str().find("numerical") != std::string::npos);
}

TEST_CASE("synthetic workflow") {
    Cli cli;
    REQUIRE(cli({"synth", "--assets", "12", "--sectors", "3", "--days", "300", "--seed", "3", "--returns-out",
                 cli.at("r.csv"), "--universe-out", cli.at("u.csv"), "--market-out", cli.at("m.csv")}) == kExitOk);
    REQUIRE(cli({"estimate", "--returns", cli.at("r.csv"), "--universe", cli.at("u.csv"), "--market", "cap", "--out",
                 cli.at("e.json")}) == kExitOk);
    REQUIRE(cli({"estimate", "--returns", cli.at("r.csv"), "--market", cli.at("m.csv"), "--method", "sample",
                 "--window", "200", "--out", cli.at("e2.json")}) == kExitOk);
    REQUIRE(cli({"qd-run", "--estimates", cli.at("e.json"), "--universe", cli.at("u.csv"), "--behavior", "B2",
                 "--fitness", "F1", "--c", "0.05", "--M", "50", "--n-max", "5000", "--n-cvt", "500", "--gamma", "2",
                 "--quiet", "--out", cli.at("a.jsonl")}) == kExitOk);
    REQUIRE(cli({"sweep", "--archive", cli.at("a.jsonl"), "--returns", cli.at("r.csv"), "--t-grid", "100,300",
                 "--c-grid", "0.01,0.05", "--out", cli.at("sw.csv")}) == kExitOk);
    std::ifstream s(cli.at("sw.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(s, line)) ++rows;
    CHECK(rows == 3);
}
