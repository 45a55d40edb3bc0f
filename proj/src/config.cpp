#include "hankelinv/config.hpp"

#include "hankelinv/io.hpp"

namespace hankelinv {

using nlohmann::json;

StateSpace preset_system(const std::string& name) {
    if (name == "benchmark") return benchmark_system();
    throw ConfigError("unknown system preset '" + name + "'");
}

StateSpace ExperimentConfig::system() const {
    if (inline_system) return *inline_system;
    return preset_system(system_preset);
}

MomentGrid ExperimentConfig::grid() const {
    if (moment_mode == MomentMode::identical) return MomentGrid::identical(grid_m1, grid_m2);
    return MomentGrid::distinct(grid_m1u, grid_m2u, grid_m1y, grid_m2y);
}

int ExperimentConfig::nullity() const {
    const StateSpace ss = system();
    return ss.p() * L - ss.n();
}

GridSearchOptions ExperimentConfig::search_options() const {
    GridSearchOptions o;
    o.eps_sigma = eps_sigma;
    o.eps_mode = eps_mode;
    o.eps_rank = eps_rank;
    o.selection = selection;
    o.nullity = nullity();
    o.workers = workers;
    return o;
}

void ExperimentConfig::validate() const {
    if (Nt < 1) throw ConfigError("Nt must be >= 1");
    if (L < 1) throw ConfigError("L must be >= 1");
    if (N < L) throw ConfigError("N must be >= L (N=" + std::to_string(N) +
                                 ", L=" + std::to_string(L) + ")");
    const StateSpace ss = system();
    const int order = L + ss.n();
    if (N < (ss.m() + 1) * order - 1)
        throw ConfigError("N=" + std::to_string(N) + " is too short for inputs persistently "
                          "exciting of order L+n=" + std::to_string(order));
    const int d = (ss.m() + ss.p()) * L;
    const int k = ss.p() * L - ss.n();
    if (k < 1 || k > d - 1)
        throw ConfigError("pL - n = " + std::to_string(k) + " leaves no null space to recover");
    if (x0.half_width < 0.0) throw ConfigError("x0 half_width must be >= 0");
    if (!(eps_sigma > 0.0)) throw ConfigError("eps_sigma must be > 0");
    if (!(eps_rank > 0.0)) throw ConfigError("eps_rank must be > 0");
    try {
        noise_u.spec();
        noise_y.spec();
        grid().check();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

namespace {

json axis_json(const GridAxis& a) { return {{"lo", a.lo}, {"hi", a.hi}, {"points", a.points}}; }

GridAxis axis_from(const json& j, GridAxis fallback) {
    fallback.lo = j.value("lo", fallback.lo);
    fallback.hi = j.value("hi", fallback.hi);
    fallback.points = j.value("points", fallback.points);
    return fallback;
}

json matrix_json(const Matrix& M) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(row);
    }
    return rows;
}

Matrix matrix_from(const json& j, const char* name) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ConfigError(std::string("system.") + name + " must be a non-empty list of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix M(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ConfigError(std::string("system.") + name + " is ragged");
        for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return M;
}

NoiseConfig noise_from(const json& j, NoiseConfig fallback) {
    fallback.family = j.value("family", fallback.family);
    fallback.m1 = j.value("m1", fallback.m1);
    fallback.m2 = j.value("m2", fallback.m2);
    return fallback;
}

json noise_json(const NoiseConfig& n) { return {{"family", n.family}, {"m1", n.m1}, {"m2", n.m2}}; }

}  // namespace

json ExperimentConfig::to_json() const {
    json j;
    if (inline_system) {
        j["system"] = {{"A", matrix_json(inline_system->A())},
                       {"B", matrix_json(inline_system->B())},
                       {"C", matrix_json(inline_system->C())},
                       {"D", matrix_json(inline_system->D())}};
    } else {
        j["system"] = system_preset;
    }
    j["Nt"] = Nt;
    j["N"] = N;
    j["L"] = L;
    j["x0"] = {{"policy", x0.kind == InitialStatePolicy::Kind::zero ? "zero" : "random-bounded"},
               {"half_width", x0.half_width}};
    j["noise"] = {{"input", noise_json(noise_u)}, {"output", noise_json(noise_y)}};
    j["moment_mode"] = to_string(moment_mode);
    if (moment_mode == MomentMode::identical) {
        j["grid"] = {{"m1", axis_json(grid_m1)}, {"m2", axis_json(grid_m2)}};
    } else {
        j["grid"] = {{"m1u", axis_json(grid_m1u)}, {"m2u", axis_json(grid_m2u)},
                     {"m1y", axis_json(grid_m1y)}, {"m2y", axis_json(grid_m2y)}};
    }
    j["eps_sigma"] = eps_sigma;
    j["eps_sigma_mode"] = to_string(eps_mode);
    j["eps_rank"] = eps_rank;
    j["selection"] = to_string(selection);
    j["seed"] = seed;
    j["workers"] = workers;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& in) {
    const json& j = in.contains("config") ? in.at("config") : in;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    try {
        if (j.contains("system")) {
            const json& s = j.at("system");
            if (s.is_string()) {
                c.system_preset = s.get<std::string>();
                preset_system(c.system_preset);
            } else {
                c.system_preset.clear();
                c.inline_system = StateSpace(matrix_from(s.at("A"), "A"), matrix_from(s.at("B"), "B"),
                                             matrix_from(s.at("C"), "C"), matrix_from(s.at("D"), "D"));
            }
        }
        c.Nt = j.value("Nt", c.Nt);
        c.N = j.value("N", c.N);
        c.L = j.value("L", c.L);
        if (j.contains("x0")) {
            const json& x = j.at("x0");
            const std::string policy = x.value("policy", std::string("random-bounded"));
            if (policy == "zero")
                c.x0.kind = InitialStatePolicy::Kind::zero;
            else if (policy == "random-bounded")
                c.x0.kind = InitialStatePolicy::Kind::random_bounded;
            else
                throw ConfigError("unknown x0 policy '" + policy + "'");
            c.x0.half_width = x.value("half_width", c.x0.half_width);
        }
        if (j.contains("noise")) {
            const json& n = j.at("noise");
            if (n.contains("input") || n.contains("output")) {
                if (n.contains("input")) c.noise_u = noise_from(n.at("input"), c.noise_u);
                if (n.contains("output")) c.noise_y = noise_from(n.at("output"), c.noise_y);
            } else {
                c.noise_u = noise_from(n, c.noise_u);
                c.noise_y = noise_from(n, c.noise_y);
            }
        }
        if (j.contains("moment_mode"))
            c.moment_mode = moment_mode_from_string(j.at("moment_mode").get<std::string>());
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            if (g.contains("m1")) c.grid_m1 = axis_from(g.at("m1"), c.grid_m1);
            if (g.contains("m2")) c.grid_m2 = axis_from(g.at("m2"), c.grid_m2);
            if (g.contains("m1u")) c.grid_m1u = axis_from(g.at("m1u"), c.grid_m1u);
            if (g.contains("m2u")) c.grid_m2u = axis_from(g.at("m2u"), c.grid_m2u);
            if (g.contains("m1y")) c.grid_m1y = axis_from(g.at("m1y"), c.grid_m1y);
            if (g.contains("m2y")) c.grid_m2y = axis_from(g.at("m2y"), c.grid_m2y);
        }
        c.eps_sigma = j.value("eps_sigma", c.eps_sigma);
        if (j.contains("eps_sigma_mode"))
            c.eps_mode = eps_mode_from_string(j.at("eps_sigma_mode").get<std::string>());
        c.eps_rank = j.value("eps_rank", c.eps_rank);
        if (j.contains("selection"))
            c.selection = selection_from_string(j.at("selection").get<std::string>());
        c.seed = j.value("seed", c.seed);
        c.workers = j.value("workers", c.workers);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return from_json(j);
}

}  // namespace hankelinv
