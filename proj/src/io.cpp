#include "hankelinv/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hankelinv {

using nlohmann::json;

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void write_rows(std::ostream& os, const Matrix& M) {
    os << '[';
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        if (r) os << ',';
        os << '[';
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            if (c) os << ',';
            os << format_real(M(r, c));
        }
        os << ']';
    }
    os << ']';
}

void write_flat(std::ostream& os, const double* data, Eigen::Index n) {
    os << '[';
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i) os << ',';
        os << format_real(data[i]);
    }
    os << ']';
}

json parse(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(what + ": " + e.what());
    }
}

Matrix rows_to_matrix(const json& j, Eigen::Index rows, Eigen::Index cols,
                      const std::string& what) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw FormatError(what + ": expected " + std::to_string(rows) + " rows");
    Matrix M(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw FormatError(what + ": row " + std::to_string(r) + " has wrong width");
        for (Eigen::Index c = 0; c < cols; ++c) {
            const json& v = row[static_cast<std::size_t>(c)];
            if (!v.is_number()) throw FormatError(what + ": non-numeric entry");
            M(r, c) = v.get<double>();
        }
    }
    return M;
}

DatasetMeta parse_meta(const std::string& line) {
    const json j = parse(line, "dataset header");
    if (!j.contains("meta")) throw FormatError("dataset: first line must be a meta header");
    const json& m = j.at("meta");
    DatasetMeta meta;
    try {
        meta = {m.at("Nt").get<int>(), m.at("N").get<int>(), m.at("m").get<int>(),
                m.at("p").get<int>()};
    } catch (const json::exception& e) {
        throw FormatError(std::string("dataset header: ") + e.what());
    }
    if (meta.Nt < 1 || meta.N < 1 || meta.m < 1 || meta.p < 1)
        throw FormatError("dataset header: counts must be positive");
    return meta;
}

}  // namespace

void write_dataset_jsonl(const fs::path& path, const Dataset& ds) {
    ds.check();
    auto out = open_out(path);
    out << "{\"meta\":{\"Nt\":" << ds.Nt() << ",\"N\":" << ds.N << ",\"m\":" << ds.m
        << ",\"p\":" << ds.p << "}}\n";
    for (int i = 0; i < ds.Nt(); ++i) {
        const auto& e = ds.experiments[static_cast<std::size_t>(i)];
        out << "{\"i\":" << i << ",\"u\":";
        write_rows(out, e.u);
        out << ",\"y\":";
        write_rows(out, e.y);
        out << "}\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

DatasetMeta for_each_experiment(const fs::path& path,
                                const std::function<void(const Experiment&)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw FormatError("dataset: empty file");
    const DatasetMeta meta = parse_meta(line);
    int seen = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = parse(line, "dataset line " + std::to_string(seen + 1));
        if (!j.contains("i") || j.at("i") != seen)
            throw FormatError("dataset: experiment index out of order at line " +
                              std::to_string(seen + 2));
        Experiment e{rows_to_matrix(j.at("u"), meta.N, meta.m, "u"),
                     rows_to_matrix(j.at("y"), meta.N, meta.p, "y")};
        fn(e);
        ++seen;
    }
    if (seen != meta.Nt)
        throw FormatError("dataset: header says Nt=" + std::to_string(meta.Nt) + " but file has " +
                          std::to_string(seen));
    return meta;
}

Dataset read_dataset_jsonl(const fs::path& path) {
    Dataset ds;
    const DatasetMeta meta =
        for_each_experiment(path, [&](const Experiment& e) { ds.experiments.push_back(e); });
    ds.N = meta.N;
    ds.m = meta.m;
    ds.p = meta.p;
    return ds;
}

SufficientStats aggregate_jsonl(const fs::path& path, int L) {
    std::optional<StatsReducer> reducer;
    const DatasetMeta meta = for_each_experiment(path, [&](const Experiment& e) {
        if (!reducer) {
            if (L < 1 || e.length() < L) throw InvalidArgument("aggregate: need N >= L >= 1");
            reducer.emplace(HankelLayout{static_cast<int>(e.u.cols()),
                                         static_cast<int>(e.y.cols()), L},
                            e.length() - L + 1);
        }
        reducer->push(stacked_hankel(e, L));
    });
    (void)meta;
    return reducer->result();
}

void write_stats_json(const fs::path& path, const SufficientStats& st) {
    auto out = open_out(path);
    const auto& lay = st.layout();
    out << "{\"d\":" << st.d() << ",\"Nc\":" << st.Nc() << ",\"count\":" << st.count()
        << ",\"m\":" << lay.m << ",\"p\":" << lay.p << ",\"L\":" << lay.L << ",\"G\":";
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> G = st.G();
    write_flat(out, G.data(), G.size());
    out << ",\"rowsum\":";
    write_flat(out, st.rowsum().data(), st.rowsum().size());
    out << "}\n";
    if (!out) throw IoError("write failed: " + path.string());
}

SufficientStats read_stats_json(const fs::path& path) {
    const json j = parse(read_text(path), "stats snapshot");
    try {
        const HankelLayout layout{j.at("m").get<int>(), j.at("p").get<int>(),
                                  j.at("L").get<int>()};
        const int d = j.at("d").get<int>();
        if (d != layout.rows()) throw FormatError("stats snapshot: d != (m+p)L");
        const auto g = j.at("G").get<std::vector<double>>();
        const auto r = j.at("rowsum").get<std::vector<double>>();
        if (g.size() != static_cast<std::size_t>(d) * d || r.size() != static_cast<std::size_t>(d))
            throw FormatError("stats snapshot: G/rowsum size mismatch");
        Matrix G(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) G(a, b) = g[static_cast<std::size_t>(a) * d + b];
        Vector rs = Eigen::Map<const Vector>(r.data(), d);
        return SufficientStats::from_parts(layout, j.at("Nc").get<int>(),
                                           j.at("count").get<std::int64_t>(), G, rs);
    } catch (const json::exception& e) {
        throw FormatError(std::string("stats snapshot: ") + e.what());
    }
}

void write_landscape_csv(const fs::path& path, const GridSearchResult& res, MomentMode mode) {
    auto out = open_out(path);
    if (mode == MomentMode::identical)
        out << "m1,m2,sigma_min,numerical_rank,admitted\n";
    else
        out << "m1u,m2u,m1y,m2y,sigma_min,numerical_rank,admitted\n";
    for (const auto& lp : res.landscape) {
        const auto& p = lp.point;
        if (mode == MomentMode::identical)
            out << format_real(p.m1u) << ',' << format_real(p.m2u);
        else
            out << format_real(p.m1u) << ',' << format_real(p.m2u) << ','
                << format_real(p.m1y) << ',' << format_real(p.m2y);
        out << ',' << format_real(lp.sigma_min) << ',' << lp.numerical_rank << ','
            << (lp.admitted ? 1 : 0) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_candidate_json(const fs::path& path, const Candidate& c, MomentMode mode) {
    auto out = open_out(path);
    out << '{';
    if (mode == MomentMode::identical) {
        out << "\"m1\":" << format_real(c.point.m1u) << ",\"m2\":" << format_real(c.point.m2u);
    } else {
        out << "\"m1u\":" << format_real(c.point.m1u) << ",\"m2u\":" << format_real(c.point.m2u)
            << ",\"m1y\":" << format_real(c.point.m1y) << ",\"m2y\":" << format_real(c.point.m2y);
    }
    out << ",\"sigma_min\":" << format_real(c.sigma_min) << ",\"nullspace\":";
    write_rows(out, c.nullspace.basis);
    out << ",\"singular_values\":";
    write_flat(out, c.singular_values.data(), c.singular_values.size());
    out << "}\n";
    if (!out) throw IoError("write failed: " + path.string());
}

Candidate read_candidate_json(const fs::path& path) {
    const json j = parse(read_text(path), "candidate");
    try {
        Candidate c;
        if (j.contains("m1")) {
            c.point = MomentPoint::identical(j.at("m1").get<double>(), j.at("m2").get<double>());
        } else {
            c.point = {j.at("m1u").get<double>(), j.at("m2u").get<double>(),
                       j.at("m1y").get<double>(), j.at("m2y").get<double>()};
        }
        c.sigma_min = j.value("sigma_min", 0.0);
        const json& ns = j.at("nullspace");
        if (!ns.is_array()) throw FormatError("candidate: nullspace must be an array");
        const auto k = static_cast<Eigen::Index>(ns.size());
        const Eigen::Index d = k == 0 ? 0 : static_cast<Eigen::Index>(ns[0].size());
        c.nullspace.basis = rows_to_matrix(ns, k, d, "nullspace");
        if (j.contains("singular_values")) {
            const auto sv = j.at("singular_values").get<std::vector<double>>();
            c.singular_values = Eigen::Map<const Vector>(sv.data(), static_cast<Eigen::Index>(sv.size()));
        }
        return c;
    } catch (const json::exception& e) {
        throw FormatError(std::string("candidate: ") + e.what());
    }
}

void write_convergence_csv(const fs::path& path, const StudyResult& res) {
    auto out = open_out(path);
    out << "Nt,seed,theta_max,admitted\n";
    for (const auto& c : res.cells) {
        out << c.Nt << ',' << c.seed << ','
            << (c.theta_max ? format_real(*c.theta_max) : std::string("nan")) << ','
            << (c.theta_max ? 1 : 0) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_summary_csv(const fs::path& path, const StudyResult& res) {
    auto out = open_out(path);
    out << "Nt,median_theta_max\n";
    for (const auto& s : res.summary) out << s.Nt << ',' << format_real(s.median_theta_max) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace hankelinv
