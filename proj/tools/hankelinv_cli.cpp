// hankelinv: recover the input/output invariants of an LTI system from a
// large set of noisy, fragmented experiments.
//
//   hankelinv generate  --out DIR                 dataset_clean.jsonl, dataset_noisy.jsonl
//   hankelinv aggregate --dataset F --out F       statistics snapshot
//   hankelinv recover   (--dataset F | --stats F) --out DIR
//   hankelinv validate  --candidate F --out DIR
//   hankelinv sweep     --nt-list a,b,c --seeds K --out DIR
//
// Exit codes: 0 success, 2 no admitted candidate, 3 invalid configuration,
// 4 I/O or file format error, 1 anything else.

#include "hankelinv/config.hpp"
#include "hankelinv/estimator.hpp"
#include "hankelinv/io.hpp"
#include "hankelinv/lti_sim.hpp"
#include "hankelinv/stats.hpp"
#include "hankelinv/validate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>

using namespace hankelinv;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kNoCandidate = 2, kInvalidConfig = 3, kIo = 4 };

struct Overrides {
    std::string config_path;
    std::optional<int> Nt, N, L;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<double> eps_sigma, eps_rank;
    std::optional<std::string> eps_mode, selection, noise_family, moment_mode;
    std::optional<double> m1, m2;

    void attach(CLI::App* app) {
        app->add_option("-c,--config", config_path, "Experiment config JSON (or a run manifest)");
        app->add_option("--nt", Nt, "Number of experiments");
        app->add_option("--n", N, "Samples per experiment");
        app->add_option("--depth", L, "Hankel depth L");
        app->add_option("--seed", seed, "Root random seed");
        app->add_option("-j,--workers", workers, "Worker threads (0 = all cores)");
        app->add_option("--eps-sigma", eps_sigma, "Singular value threshold");
        app->add_option("--eps-mode", eps_mode, "absolute | relative");
        app->add_option("--eps-rank", eps_rank, "Relative numerical rank threshold");
        app->add_option("--selection", selection, "min-sigma | nullity-sigma");
        app->add_option("--noise-family", noise_family,
                        "gaussian | uniform | shifted-exponential (both channels)");
        app->add_option("--m1", m1, "Noise first raw moment (both channels)");
        app->add_option("--m2", m2, "Noise second raw moment (both channels)");
        app->add_option("--moment-mode", moment_mode, "identical | distinct");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig c =
            config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(config_path);
        if (Nt) c.Nt = *Nt;
        if (N) c.N = *N;
        if (L) c.L = *L;
        if (seed) c.seed = *seed;
        if (workers) c.workers = *workers;
        if (eps_sigma) c.eps_sigma = *eps_sigma;
        if (eps_rank) c.eps_rank = *eps_rank;
        try {
            if (eps_mode) c.eps_mode = eps_mode_from_string(*eps_mode);
            if (selection) c.selection = selection_from_string(*selection);
            if (moment_mode) c.moment_mode = moment_mode_from_string(*moment_mode);
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
        if (noise_family) c.noise_u.family = c.noise_y.family = *noise_family;
        if (m1) c.noise_u.m1 = c.noise_y.m1 = *m1;
        if (m2) c.noise_u.m2 = c.noise_y.m2 = *m2;
        c.validate();
        return c;
    }
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_manifest(const fs::path& path, const std::string& command,
                    const ExperimentConfig& cfg, const json& outputs, const json& timings,
                    const json& extra = json::object()) {
    json m;
    m["command"] = command;
    m["config"] = cfg.to_json();
    m["outputs"] = outputs;
    m["timings_s"] = timings;
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    write_text(path, m.dump(2) + "\n");
}

json point_json(const MomentPoint& p, MomentMode mode) {
    if (mode == MomentMode::identical) return {{"m1", p.m1u}, {"m2", p.m2u}};
    return {{"m1u", p.m1u}, {"m2u", p.m2u}, {"m1y", p.m1y}, {"m2y", p.m2y}};
}

int cmd_generate(const ExperimentConfig& cfg, const fs::path& out) {
    ensure_dir(out);
    const StateSpace ss = cfg.system();
    Stopwatch t_gen;
    const Dataset clean = generate_dataset(ss, cfg.Nt, cfg.N, cfg.L, cfg.x0, cfg.seed, cfg.workers);
    const Dataset noisy =
        add_noise(clean, cfg.noise_u.spec(), cfg.noise_y.spec(), cfg.seed, cfg.workers);
    const double gen_s = t_gen.seconds();
    Stopwatch t_write;
    write_dataset_jsonl(out / "dataset_clean.jsonl", clean);
    write_dataset_jsonl(out / "dataset_noisy.jsonl", noisy);
    write_manifest(out / "manifest.json", "generate", cfg,
                   {{"clean", "dataset_clean.jsonl"}, {"noisy", "dataset_noisy.jsonl"}},
                   {{"generate", gen_s}, {"write", t_write.seconds()}});
    std::cout << "wrote " << cfg.Nt << " experiments to " << out.string() << "\n";
    return kOk;
}

int cmd_aggregate(const ExperimentConfig& cfg, const fs::path& dataset, const fs::path& out) {
    Stopwatch t;
    const SufficientStats st = aggregate_jsonl(dataset, cfg.L);
    write_stats_json(out, st);
    std::cout << "aggregated " << st.count() << " experiments (d=" << st.d() << ", Nc=" << st.Nc()
              << ") in " << t.seconds() << " s\n";
    return kOk;
}

int cmd_recover(const ExperimentConfig& cfg, const std::string& dataset,
                const std::string& stats_path, const fs::path& out) {
    if (dataset.empty() == stats_path.empty())
        throw ConfigError("recover: give exactly one of --dataset or --stats");
    ensure_dir(out);
    const StateSpace ss = cfg.system();
    Stopwatch t_agg;
    const SufficientStats st =
        dataset.empty() ? read_stats_json(stats_path) : aggregate_jsonl(dataset, cfg.L);
    const double agg_s = t_agg.seconds();
    if (st.layout() != HankelLayout{ss.m(), ss.p(), cfg.L})
        throw ConfigError("recover: statistics shape does not match the configured system and L");

    const AveragedStats avg = st.finalize();
    Stopwatch t_search;
    const GridSearchResult res = grid_search(avg, cfg.grid(), cfg.search_options());
    const double search_s = t_search.seconds();

    write_stats_json(out / "stats.json", st);
    write_landscape_csv(out / "landscape.csv", res, cfg.moment_mode);
    json outputs = {{"stats", "stats.json"}, {"landscape", "landscape.csv"}};
    json extra = {{"admitted", res.candidates.size()}, {"grid_points", res.landscape.size()}};
    if (res.best) {
        write_candidate_json(out / "candidate.json", *res.best, cfg.moment_mode);
        outputs["candidate"] = "candidate.json";
        extra["best"] = point_json(res.best->point, cfg.moment_mode);
        extra["best"]["sigma_min"] = res.best->sigma_min;
    }
    write_manifest(out / "manifest.json", "recover", cfg, outputs,
                   {{"aggregate", agg_s}, {"grid_search", search_s}}, extra);

    std::cout << "grid points: " << res.landscape.size() << ", admitted: " << res.candidates.size()
              << "\n";
    if (!res.best) {
        std::cout << "no admitted candidate; widen the grid or raise eps_sigma\n";
        return kNoCandidate;
    }
    const MomentPoint& p = res.best->point;
    if (cfg.moment_mode == MomentMode::identical)
        std::cout << "best m1=" << p.m1u << " m2=" << p.m2u;
    else
        std::cout << "best m1u=" << p.m1u << " m2u=" << p.m2u << " m1y=" << p.m1y
                  << " m2y=" << p.m2y;
    std::cout << " sigma_min=" << res.best->sigma_min << "\n";
    return kOk;
}

int cmd_validate(const ExperimentConfig& cfg, const std::string& candidate_path,
                 const std::string& oracle_out, const fs::path& out) {
    const SubspaceBasis v_true = true_nullspace(cfg.system(), cfg.L);
    if (!oracle_out.empty()) {
        Candidate oracle;
        oracle.point = MomentPoint::identical(0.0, 0.0);
        oracle.nullspace = v_true;
        write_candidate_json(oracle_out, oracle, MomentMode::identical);
    }
    if (candidate_path.empty()) return kOk;
    const Candidate c = read_candidate_json(candidate_path);
    if (c.nullspace.k() != v_true.k() || c.nullspace.d() != v_true.d())
        throw InvalidArgument("validate: candidate null space is " +
                              std::to_string(c.nullspace.k()) + "x" +
                              std::to_string(c.nullspace.d()) + ", expected " +
                              std::to_string(v_true.k()) + "x" + std::to_string(v_true.d()));
    const SubspaceError err = subspace_angle(v_true, c.nullspace);
    ensure_dir(out);
    json report;
    report["theta_max"] = err.theta_max;
    report["cosines"] = std::vector<double>(err.cosines.data(), err.cosines.data() + err.cosines.size());
    report["k"] = v_true.k();
    report["d"] = v_true.d();
    report["candidate"] = fs::path(candidate_path).filename().string();
    write_text(out / "validation.json", report.dump(2) + "\n");
    std::cout << "theta_max=" << format_real(err.theta_max) << " rad\n";
    return kOk;
}

std::vector<int> parse_nt_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ConfigError("bad --nt-list entry '" + item + "'");
        }
    }
    return out;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& nt_list, int seeds,
              const fs::path& out) {
    StudySetup setup;
    setup.system = cfg.system();
    setup.noise_u = cfg.noise_u.spec();
    setup.noise_y = cfg.noise_y.spec();
    setup.N = cfg.N;
    setup.L = cfg.L;
    setup.x0 = cfg.x0;
    setup.grid = cfg.grid();
    setup.search = cfg.search_options();
    setup.nt_list = parse_nt_list(nt_list);
    setup.seeds = seeds;
    setup.root_seed = cfg.seed;
    setup.workers = cfg.workers;
    for (int Nt : setup.nt_list)
        if (Nt < 1) throw ConfigError("sweep: Nt values must be positive");
    for (std::size_t i = 1; i < setup.nt_list.size(); ++i)
        if (setup.nt_list[i] <= setup.nt_list[i - 1])
            throw ConfigError("sweep: --nt-list must be strictly ascending");
    if (seeds < 1) throw ConfigError("sweep: --seeds must be >= 1");

    ensure_dir(out);
    Stopwatch t;
    const StudyResult res = convergence_study(setup);
    write_convergence_csv(out / "convergence.csv", res);
    write_summary_csv(out / "summary.csv", res);
    write_manifest(out / "manifest.json", "sweep", cfg,
                   {{"convergence", "convergence.csv"}, {"summary", "summary.csv"}},
                   {{"sweep", t.seconds()}}, {{"nt_list", setup.nt_list}, {"seeds", seeds}});
    for (const auto& s : res.summary)
        std::cout << "Nt=" << s.Nt << " median theta_max=" << format_real(s.median_theta_max) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Recover LTI input/output invariants from noisy fragmented data"};
    app.require_subcommand(1);

    Overrides ov;
    std::string out_dir, dataset, stats_path, candidate, oracle_out, out_file;
    std::string nt_list = "100,200,400,800,1600,3200,6400,12800";
    int seeds = 10;

    auto* gen = app.add_subcommand("generate", "Simulate clean and noisy datasets");
    ov.attach(gen);
    gen->add_option("-o,--out", out_dir, "Output directory")->required();

    auto* agg = app.add_subcommand("aggregate", "Reduce a dataset to a statistics snapshot");
    ov.attach(agg);
    agg->add_option("-d,--dataset", dataset, "Dataset JSONL")->required();
    agg->add_option("-o,--out", out_file, "Output stats JSON")->required();

    auto* rec = app.add_subcommand("recover", "Grid-search noise moments and the null space");
    ov.attach(rec);
    rec->add_option("-d,--dataset", dataset, "Dataset JSONL");
    rec->add_option("-s,--stats", stats_path, "Statistics snapshot JSON");
    rec->add_option("-o,--out", out_dir, "Output directory")->required();

    auto* val = app.add_subcommand("validate", "Compare a candidate null space to the true one");
    ov.attach(val);
    val->add_option("--candidate", candidate, "Candidate JSON from recover");
    val->add_option("--oracle-out", oracle_out, "Also write the true null space as candidate JSON");
    val->add_option("-o,--out", out_dir, "Output directory")->required();

    auto* swp = app.add_subcommand("sweep", "Subspace error versus number of experiments");
    ov.attach(swp);
    swp->add_option("--nt-list", nt_list, "Ascending comma-separated Nt values");
    swp->add_option("--seeds", seeds, "Replicates per Nt");
    swp->add_option("-o,--out", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalidConfig;
    }

    try {
        const ExperimentConfig cfg = ov.resolve();
        if (*gen) return cmd_generate(cfg, out_dir);
        if (*agg) return cmd_aggregate(cfg, dataset, out_file);
        if (*rec) return cmd_recover(cfg, dataset, stats_path, out_dir);
        if (*val) return cmd_validate(cfg, candidate, oracle_out, out_dir);
        if (*swp) return cmd_sweep(cfg, nt_list, seeds, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kInvalidConfig;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kInvalidConfig;
    } catch (const InfeasibleRequest& e) {
        std::cerr << "infeasible configuration: " << e.what() << "\n";
        return kInvalidConfig;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const FormatError& e) {
        std::cerr << "bad input file: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
