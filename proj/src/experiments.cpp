#include "cckm/experiments.hpp"

#include "cckm/core.hpp"
#include "cckm/heuristics.hpp"
#include "cckm/kernels.hpp"
#include "cckm/oracle.hpp"
#include "cckm/rounding.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

namespace cckm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    std::string t = s.substr(b, e - b + 1);
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = t.substr(1, t.size() - 2);
    return t;
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') quoted = !quoted;
        if (ch == delim && !quoted) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

bool parse_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(v);
}

bool parse_int(const std::string& s, int& v) {
    if (s.empty()) return false;
    char* end = nullptr;
    const long x = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        return false;
    v = static_cast<int>(x);
    return true;
}

}  // namespace

CardinalitySpec LabeledData::spec_from_labels() const {
    if (labels.empty()) throw Error(ErrorKind::Config, "cardinalities from labels need a label column");
    std::map<int, int> counts;
    int n0 = 0;
    for (int l : labels) {
        if (l < 0)
            ++n0;
        else
            ++counts[l];
    }
    std::vector<int> sizes;
    for (auto [l, c] : counts) sizes.push_back(c);
    return CardinalitySpec(sizes, n0);
}

LabeledData parse_csv(std::istream& is, const IngestOptions& opt, const std::string& source) {
    std::string line;
    int line_no = 0;
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> cells;
    std::vector<int> line_of;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto f = split(line, opt.delimiter);
        if (opt.header && names.empty()) {
            names = f;
            continue;
        }
        cells.push_back(std::move(f));
        line_of.push_back(line_no);
    }
    if (cells.empty()) throw Error(ErrorKind::Ingest, source + ": no data rows");
    const std::size_t width = opt.header ? names.size() : cells[0].size();
    if (!opt.header)
        for (std::size_t j = 0; j < width; ++j) names.push_back(std::to_string(j));

    int label_col = -1;
    if (!opt.label_column.empty()) {
        for (std::size_t j = 0; j < names.size(); ++j)
            if (names[j] == opt.label_column) label_col = static_cast<int>(j);
        if (label_col < 0) throw Error(ErrorKind::Ingest, source + ": no column named '" + opt.label_column + "'");
    }

    LabeledData out;
    for (std::size_t j = 0; j < width; ++j)
        if (static_cast<int>(j) != label_col) out.feature_names.push_back(names[j]);
    const int N = static_cast<int>(cells.size());
    const int d = static_cast<int>(out.feature_names.size());
    if (d == 0) throw Error(ErrorKind::Ingest, source + ": no feature columns");
    out.data.points.resize(N, d);
    std::vector<std::string> raw_labels;
    for (int i = 0; i < N; ++i) {
        const auto& row = cells[i];
        const std::string where = source + ":" + std::to_string(line_of[i]);
        if (row.size() != width)
            throw Error(ErrorKind::Ingest, where + ": expected " + std::to_string(width) + " fields, found " +
                                               std::to_string(row.size()));
        int c = 0;
        for (std::size_t j = 0; j < width; ++j) {
            if (row[j].empty())
                throw Error(ErrorKind::Ingest, where + ": missing value in column '" + names[j] + "'");
            if (static_cast<int>(j) == label_col) {
                raw_labels.push_back(row[j]);
                continue;
            }
            double v;
            if (!parse_double(row[j], v))
                throw Error(ErrorKind::Ingest,
                            where + ": non-numeric value '" + row[j] + "' in column '" + names[j] + "'");
            out.data.points(i, c++) = v;
        }
    }
    if (label_col >= 0) {
        bool all_int = true;
        std::vector<int> ints(N);
        for (int i = 0; i < N && all_int; ++i) all_int = parse_int(raw_labels[i], ints[i]);
        if (all_int) {
            out.labels = std::move(ints);
        } else {
            std::map<std::string, int> ids;
            for (const auto& s : raw_labels) {
                auto it = ids.emplace(s, static_cast<int>(ids.size())).first;
                out.labels.push_back(it->second);
            }
        }
    }
    return out;
}

LabeledData ingest_csv(const std::string& path, const IngestOptions& opt) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::Ingest, "cannot open " + path);
    return parse_csv(f, opt, path);
}

void write_csv(std::ostream& os, const DataSet& ds, const std::vector<int>* labels) {
    os << std::setprecision(17);
    for (int j = 0; j < ds.d(); ++j) os << (j ? "," : "") << "x" << j;
    if (labels) os << ",label";
    os << "\n";
    for (int i = 0; i < ds.N(); ++i) {
        for (int j = 0; j < ds.d(); ++j) os << (j ? "," : "") << ds.points(i, j);
        if (labels) os << "," << (*labels)[i];
        os << "\n";
    }
}

std::vector<int> planted_labels(const Clustering& c) {
    std::vector<int> l = c.labels();
    for (int& x : l)
        if (x == c.K()) x = -1;
    return l;
}

namespace {

RelaxationKind without_outliers(RelaxationKind k) {
    switch (k) {
        case RelaxationKind::R_LP_o: return RelaxationKind::R_LP;
        case RelaxationKind::R_SDP_o: return RelaxationKind::R_SDP;
        case RelaxationKind::R_LP_ob: return RelaxationKind::R_LP_b;
        case RelaxationKind::R_SDP_ob: return RelaxationKind::R_SDP_b;
        default: return k;
    }
}

}  // namespace

ElbowResult elbow_scan(const DataSet& ds, int K, const std::vector<int>& relative_sizes,
                       const std::vector<int>& n0_grid, RelaxationKind kind, const SolverConfig& cfg,
                       double min_curvature) {
    if (!is_outlier_kind(kind))
        throw Error(ErrorKind::Config, std::string("elbow scan needs an outlier relaxation, got ") + kind_name(kind));
    std::vector<int> rel = relative_sizes.empty() ? std::vector<int>(K, 1) : relative_sizes;
    if (static_cast<int>(rel.size()) != K)
        throw Error(ErrorKind::SpecViolation, "relative sizes must have K entries");
    int unit = 0;
    for (int r : rel) {
        if (r < 1) throw Error(ErrorKind::SpecViolation, "relative sizes must be positive");
        unit += r;
    }
    std::vector<int> grid = n0_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    ElbowResult res;
    const Eigen::MatrixXd D = distance_matrix(ds);
    for (int n0 : grid) {
        const int rest = ds.N() - n0;
        if (n0 < 0 || rest < unit || rest % unit != 0) {
            res.skipped.push_back(n0);
            continue;
        }
        std::vector<int> sizes;
        for (int r : rel) sizes.push_back(r * (rest / unit));
        CardinalitySpec spec(sizes, n0);
        // with no outliers the outlier block is pinned, so solve the plain counterpart
        ConicProgram p = build_relaxation(n0 == 0 ? without_outliers(kind) : kind, D, Eigen::MatrixXd(), spec);
        RelaxationSolution s = solve(p, cfg);
        res.curve.push_back({n0, s.objective, s.status});
    }
    if (res.curve.empty()) throw Error(ErrorKind::SpecViolation, "no admissible n_0 in the elbow grid");

    const std::size_t m = res.curve.size();
    double top = 0.0;
    for (const auto& pt : res.curve) top = std::max(top, pt.objective);
    const double floor = std::max(1e-12 * top, std::numeric_limits<double>::min());
    std::vector<double> L(m);
    for (std::size_t t = 0; t < m; ++t) L[t] = std::log(std::max(res.curve[t].objective, floor));
    res.second_difference.assign(m, 0.0);
    res.chosen_n0 = res.curve[0].n0;
    double best = min_curvature;
    for (std::size_t t = 1; t + 1 < m; ++t) {
        res.second_difference[t] = L[t - 1] - 2.0 * L[t] + L[t + 1];
        if (res.second_difference[t] > best) {
            best = res.second_difference[t];
            res.chosen_n0 = res.curve[t].n0;
        }
    }
    return res;
}

void ExperimentConfig::validate() const {
    if (methods.empty()) throw Error(ErrorKind::Config, "no methods requested");
    data.validate();
    spec.validate(data.N());
    if (!labels.empty() && static_cast<int>(labels.size()) != data.N())
        throw Error(ErrorKind::Config, "label count does not match the number of points");
    if (workers < 1) throw Error(ErrorKind::Config, "workers must be at least 1");
}

double recovery_accuracy(const Clustering& c, const std::vector<int>& labels) {
    const int N = static_cast<int>(labels.size());
    std::map<int, int> cls;
    for (int l : labels)
        if (l >= 0) cls.emplace(l, 0);
    int idx = 0;
    for (auto& [l, id] : cls) id = idx++;
    const int K = c.K();
    const int C = static_cast<int>(cls.size());
    const int m = std::max({K, C, 1});
    Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(m, m);
    int matched_outliers = 0;
    for (int k = 0; k < K; ++k)
        for (int i : c.clusters[k])
            if (labels[i] >= 0) overlap(k, cls[labels[i]]) += 1.0;
    for (int i : c.outliers)
        if (labels[i] < 0) ++matched_outliers;
    Assignment a = solve_assignment(-overlap, std::vector<int>(m, 1));
    return (-a.objective + matched_outliers) / std::max(N, 1);
}

namespace {

const char* error_status(ErrorKind k) {
    switch (k) {
        case ErrorKind::SpecViolation: return "spec-violation";
        case ErrorKind::ResourceLimit: return "resource-limit";
        case ErrorKind::DegenerateCluster: return "degenerate-cluster";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::Config: return "config-error";
        default: return "error";
    }
}

struct Shared {
    const ExperimentConfig& cfg;
    Eigen::MatrixXd D, W;
};

void attach_bounds(ReportRow& row, double lb, double ub) {
    row.lb = lb;
    row.ub = ub;
    row.gap = (ub - lb) / std::max(1.0, std::fabs(lb));
}

void attach_accuracy(ReportRow& row, const ExperimentConfig& cfg, const Clustering& c) {
    if (!cfg.labels.empty()) row.accuracy = recovery_accuracy(c, cfg.labels);
}

ReportRow run_method(const Shared& sh, const std::string& method) {
    const ExperimentConfig& cfg = sh.cfg;
    ReportRow row;
    row.method = method;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (method == "oracle") {
            OracleResult o = enumerate_optimal(cfg.data, cfg.spec, cfg.oracle_cap);
            attach_bounds(row, o.cost, o.cost);
            row.status = "optimal";
            attach_accuracy(row, cfg, o.clustering);
        } else if (method == "bennett" || method.rfind("bennett:", 0) == 0) {
            int runs = cfg.bennett_runs;
            if (method.size() > 8) runs = std::stoi(method.substr(8));
            MultiStartReport ms = multistart_bennett(cfg.data, cfg.spec, runs, cfg.seed, cfg.bennett_max_iters);
            row.ub = ms.best_cost;
            row.cv = ms.cv;
            row.status = "heuristic";
            attach_accuracy(row, cfg, ms.best);
        } else if (method == "bennett-init") {
            if (cfg.labels.empty()) throw Error(ErrorKind::Config, "bennett-init needs labels");
            std::vector<int> lab = cfg.labels;
            std::map<int, int> ids;
            for (int l : lab)
                if (l >= 0) ids.emplace(l, 0);
            int k = 0;
            for (auto& [l, id] : ids) id = k++;
            for (int& l : lab) l = l < 0 ? static_cast<int>(ids.size()) : ids[l];
            Clustering init = Clustering::from_labels(lab, static_cast<int>(ids.size()));
            BennettResult b = bennett(cfg.data, cfg.spec, centroids(cfg.data, init), cfg.bennett_max_iters);
            row.ub = b.cost;
            row.status = b.converged ? "converged" : "max-iterations";
            attach_accuracy(row, cfg, b.clustering);
        } else {
            const auto plus = method.find('+');
            if (method == "PW2:spectral") {
                row.lb = solve_pw2_spectral(sh.W, cfg.spec.K());
                row.status = "optimal";
                row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                return row;
            }
            const RelaxationKind kind = parse_kind(method.substr(0, plus));
            if (plus == std::string::npos) {
                ConicProgram p = build_relaxation(kind, sh.D, sh.W, cfg.spec);
                RelaxationSolution s = solve(p, cfg.solver);
                row.lb = s.objective;
                row.status = status_name(s.status);
                if (kind == RelaxationKind::AW) row.message = "value of <D,Z>, twice the PW1 scale";
            } else {
                const std::string tail = method.substr(plus + 1);
                if (tail != "round" && tail != "round+lloyd")
                    throw Error(ErrorKind::Config, "unknown method suffix '" + tail + "'");
                const bool lloyd = tail == "round+lloyd";
                RoundingResult r;
                if (kind == RelaxationKind::R_LP || kind == RelaxationKind::R_SDP)
                    r = round_general(cfg.data, cfg.spec, kind, cfg.solver);
                else if (kind == RelaxationKind::R_LP_b || kind == RelaxationKind::R_SDP_b) {
                    if (!cfg.spec.is_balanced() || cfg.spec.outliers != 0)
                        throw Error(ErrorKind::SpecViolation, "balanced rounding needs equal sizes and no outliers");
                    r = round_balanced(cfg.data, cfg.spec.sizes[0], cfg.spec.K(), kind, cfg.solver, lloyd);
                } else if (is_outlier_kind(kind))
                    r = round_outlier(cfg.data, cfg.spec, kind, cfg.solver);
                else
                    throw Error(ErrorKind::Config, std::string("no rounding algorithm for ") + kind_name(kind));
                attach_bounds(row, r.lower_bound, r.upper_bound);
                row.status = status_name(r.status);
                attach_accuracy(row, cfg, r.clustering);
            }
        }
    } catch (const Error& e) {
        row.status = error_status(e.kind());
        row.message = e.what();
    } catch (const std::exception& e) {
        row.status = "error";
        row.message = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    Report rep;
    rep.name = cfg.name;
    rep.N = cfg.data.N();
    rep.d = cfg.data.d();
    rep.spec = cfg.spec;
    rep.seed = cfg.seed;
    Shared sh{cfg, distance_matrix(cfg.data), gram_matrix(cfg.data)};
    rep.rows.resize(cfg.methods.size());
    const int workers = std::min<int>(cfg.workers, static_cast<int>(cfg.methods.size()));
    if (workers <= 1) {
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) rep.rows[m] = run_method(sh, cfg.methods[m]);
        return rep;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t m; (m = next++) < cfg.methods.size();) rep.rows[m] = run_method(sh, cfg.methods[m]);
        });
    for (auto& t : pool) t.join();
    return rep;
}

void print_table(std::ostream& os, const Report& r) {
    auto num = [](const std::optional<double>& v, int prec) {
        if (!v) return std::string("--");
        std::ostringstream s;
        s << std::fixed << std::setprecision(prec) << *v;
        return s.str();
    };
    os << r.name << ": N=" << r.N << " d=" << r.d << " K=" << r.spec.K() << " n0=" << r.spec.outliers << "\n";
    os << std::left << std::setw(22) << "method" << std::right << std::setw(12) << "LB" << std::setw(12) << "UB"
       << std::setw(10) << "gap" << std::setw(10) << "time[s]" << std::setw(9) << "acc"
       << "  status\n";
    for (const auto& row : r.rows) {
        os << std::left << std::setw(22) << row.method << std::right << std::setw(12) << num(row.lb, 4)
           << std::setw(12) << num(row.ub, 4) << std::setw(10) << num(row.gap, 5) << std::setw(10)
           << num(row.seconds, 2) << std::setw(9) << num(row.accuracy, 3) << "  " << row.status;
        if (row.cv) os << " (cv " << num(row.cv, 4) << ")";
        if (!row.message.empty()) os << " [" << row.message << "]";
        os << "\n";
    }
}

std::string environment_summary() {
    std::ostringstream s;
    s << "isa=" << kern::isa_name(kern::active_isa()) << " compiler=" <<
#if defined(__clang__)
        "clang "
#elif defined(__GNUC__)
        "gcc "
#endif
      << __VERSION__ << " eigen=" << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION;
    return s.str();
}

std::string report_json(const Report& r, const ExperimentConfig& cfg, bool include_timing) {
    using nlohmann::json;
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json j;
    j["config"] = {
        {"name", cfg.name},
        {"N", r.N},
        {"d", r.d},
        {"sizes", cfg.spec.sizes},
        {"outliers", cfg.spec.outliers},
        {"methods", cfg.methods},
        {"seed", cfg.seed},
        {"bennett_runs", cfg.bennett_runs},
        {"solver",
         {{"tol_feas", cfg.solver.tol_feas},
          {"tol_gap", cfg.solver.tol_gap},
          {"max_iters", cfg.solver.max_iters},
          {"time_budget", cfg.solver.time_budget}}},
        {"has_labels", !cfg.labels.empty()},
    };
    json rows = json::array();
    for (const auto& row : r.rows) {
        json o = {{"method", row.method}, {"lb", opt(row.lb)},     {"ub", opt(row.ub)},
                  {"gap", opt(row.gap)},  {"status", row.status}, {"accuracy", opt(row.accuracy)},
                  {"cv", opt(row.cv)}};
        if (!row.message.empty()) o["message"] = row.message;
        if (include_timing) o["seconds"] = row.seconds;
        rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
    j["environment"] = environment_summary();
    return j.dump(2);
}

}  // namespace cckm
