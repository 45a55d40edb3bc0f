#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hankelinv/config.hpp"
#include "hankelinv/io.hpp"

#include <json.hpp>

#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

using namespace hankelinv;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "hankelinv_cli_XXXXXX").string();
        path = mkdtemp(tmpl.data());
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(HANKELINV_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::size_t line_count(const fs::path& p) {
    std::istringstream is(read_text(p));
    std::size_t n = 0;
    for (std::string l; std::getline(is, l);) ++n;
    return n;
}

// Small benchmark-system config with a coarse grid.
fs::path write_config(const fs::path& dir, const json& patch) {
    ExperimentConfig c;
    c.Nt = 300;
    c.grid_m1 = {0.5, 1.5, 5};
    c.grid_m2 = {4.0, 6.0, 5};
    c.eps_sigma = 3e-2;
    c.eps_mode = EpsMode::relative;
    c.selection = Selection::nullity_sigma;
    json j = c.to_json();
    j.merge_patch(patch);
    const fs::path file = dir / "config.json";
    write_text(file, j.dump(2));
    return file;
}

}  // namespace

TEST_CASE("generate, aggregate, recover and validate") {
    TempDir tmp;
    const fs::path cfg = write_config(tmp.path, json::object());
    REQUIRE(run("generate -c " + q(cfg) + " --out " + q(tmp.path / "gen")) == 0);
    CHECK(line_count(tmp.path / "gen" / "dataset_noisy.jsonl") == 301);
    CHECK(line_count(tmp.path / "gen" / "dataset_clean.jsonl") == 301);
    const json manifest = json::parse(read_text(tmp.path / "gen" / "manifest.json"));
    CHECK(manifest.at("config").at("Nt") == 300);

    const fs::path noisy = tmp.path / "gen" / "dataset_noisy.jsonl";
    REQUIRE(run("recover -c " + q(cfg) + " --dataset " + q(noisy) + " --out " + q(tmp.path / "r1")) == 0);
    REQUIRE(run("aggregate -c " + q(cfg) + " --dataset " + q(noisy) + " --out " + q(tmp.path / "stats.json")) == 0);
    REQUIRE(run("recover -c " + q(cfg) + " --stats " + q(tmp.path / "stats.json") + " --out " + q(tmp.path / "r2")) == 0);
    CHECK(read_text(tmp.path / "r1" / "landscape.csv") == read_text(tmp.path / "r2" / "landscape.csv"));
    CHECK(read_text(tmp.path / "r1" / "candidate.json") == read_text(tmp.path / "r2" / "candidate.json"));
    CHECK(line_count(tmp.path / "r1" / "landscape.csv") == 26);

    SUBCASE("a rerun reproduces every output except timings") {
        REQUIRE(run("recover -c " + q(cfg) + " --dataset " + q(noisy) + " --out " + q(tmp.path / "r3")) == 0);
        CHECK(read_text(tmp.path / "r1" / "landscape.csv") == read_text(tmp.path / "r3" / "landscape.csv"));
        json a = json::parse(read_text(tmp.path / "r1" / "manifest.json"));
        json b = json::parse(read_text(tmp.path / "r3" / "manifest.json"));
        a.erase("timings_s");
        b.erase("timings_s");
        CHECK(a == b);
    }
    SUBCASE("validate the recovered candidate") {
        REQUIRE(run("validate -c " + q(cfg) + " --candidate " + q(tmp.path / "r1" / "candidate.json") +
                    " --out " + q(tmp.path / "v")) == 0);
        const json v = json::parse(read_text(tmp.path / "v" / "validation.json"));
        CHECK(v.at("k") == 3);
        CHECK(v.at("theta_max").get<double>() >= 0.0);
        CHECK(v.at("theta_max").get<double>() < 1.5708);
    }
    SUBCASE("the true null space validates to zero angle") {
        const fs::path oracle = tmp.path / "oracle.json";
        REQUIRE(run("validate -c " + q(cfg) + " --oracle-out " + q(oracle) + " --out " + q(tmp.path / "v0")) == 0);
        REQUIRE(run("validate -c " + q(cfg) + " --candidate " + q(oracle) + " --out " + q(tmp.path / "v0")) == 0);
        const json v = json::parse(read_text(tmp.path / "v0" / "validation.json"));
        CHECK(v.at("theta_max").get<double>() <= 1e-7);
    }
}

TEST_CASE("noiseless data recovers the zero-noise point") {
    TempDir tmp;
    const fs::path cfg = write_config(
        tmp.path, {{"Nt", 50},
                   {"noise", {{"input", {{"m1", 0.0}, {"m2", 0.0}}}, {"output", {{"m1", 0.0}, {"m2", 0.0}}}}},
                   {"grid", {{"m1", {{"lo", 0.0}, {"hi", 1.0}, {"points", 3}}}, {"m2", {{"lo", 0.0}, {"hi", 1.0}, {"points", 3}}}}},
                   {"eps_sigma", 1e-8},
                   {"eps_sigma_mode", "absolute"}});
    REQUIRE(run("generate -c " + q(cfg) + " --out " + q(tmp.path)) == 0);
    REQUIRE(run("recover -c " + q(cfg) + " --dataset " + q(tmp.path / "dataset_noisy.jsonl") + " --out " + q(tmp.path / "r")) == 0);
    const Candidate c = read_candidate_json(tmp.path / "r" / "candidate.json");
    CHECK(c.point == MomentPoint::identical(0.0, 0.0));
}

TEST_CASE("no admitted candidate exits with 2") {
    TempDir tmp;
    const fs::path cfg = write_config(
        tmp.path, {{"Nt", 100}, {"grid", {{"m1", {{"lo", 10.0}, {"hi", 11.0}}}}}, {"eps_sigma", 1e-3},
                   {"eps_sigma_mode", "absolute"}});
    REQUIRE(run("generate -c " + q(cfg) + " --out " + q(tmp.path)) == 0);
    CHECK(run("recover -c " + q(cfg) + " --dataset " + q(tmp.path / "dataset_noisy.jsonl") + " --out " + q(tmp.path / "r")) == 2);
    CHECK(fs::exists(tmp.path / "r" / "landscape.csv"));
    CHECK_FALSE(fs::exists(tmp.path / "r" / "candidate.json"));
}

TEST_CASE("invalid configurations fail with 3 before writing anything") {
    TempDir tmp;
    const fs::path cfg = write_config(tmp.path, {{"N", 1}, {"L", 2}});
    CHECK(run("generate -c " + q(cfg) + " --out " + q(tmp.path / "out")) == 3);
    CHECK_FALSE(fs::exists(tmp.path / "out"));
    const fs::path ok = write_config(tmp.path, json::object());
    CHECK(run("generate -c " + q(ok) + " --n 8 --out " + q(tmp.path / "out")) == 3);
    CHECK(run("generate -c " + q(ok) + " --eps-mode sideways --out " + q(tmp.path / "out")) == 3);
    CHECK(run("sweep -c " + q(ok) + " --nt-list 500,250 --out " + q(tmp.path / "out")) == 3);
    CHECK_FALSE(fs::exists(tmp.path / "out"));
    CHECK(run("frobnicate") == 3);
    CHECK(run("recover -c " + q(ok) + " --dataset " + q(tmp.path / "missing.jsonl") + " --out " + q(tmp.path / "r")) == 4);
}

TEST_CASE("sweep writes one row per Nt and seed") {
    TempDir tmp;
    const fs::path cfg = write_config(tmp.path, json::object());
    REQUIRE(run("sweep -c " + q(cfg) + " --nt-list 250,500,1000 --seeds 5 --out " + q(tmp.path)) == 0);
    CHECK(line_count(tmp.path / "convergence.csv") == 16);
    CHECK(line_count(tmp.path / "summary.csv") == 4);
    const json m = json::parse(read_text(tmp.path / "manifest.json"));
    CHECK(m.at("nt_list") == json::array({250, 500, 1000}));
}
