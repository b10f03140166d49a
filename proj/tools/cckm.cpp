#include "cckm/core.hpp"
#include "cckm/experiments.hpp"
#include "cckm/oracle.hpp"
#include "cckm/sdpa.hpp"
#include "cckm/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace cckm;

namespace {

enum Exit { kOk = 0, kConfig = 2, kSolver = 3, kResource = 4 };

struct DataArgs {
    std::string path;
    std::string label_column;
    std::string delimiter = ",";
    bool no_header = false;
    bool zscore = false;
    std::string spec = "labels";
    int outliers = -1;
};

void add_data_options(CLI::App* app, DataArgs& a) {
    app->add_option("--data", a.path, "CSV file with one point per row")->required();
    app->add_option("--label-column", a.label_column, "column holding class labels");
    app->add_option("--delimiter", a.delimiter, "field separator");
    app->add_flag("--no-header", a.no_header, "first line is data");
    app->add_flag("--zscore", a.zscore, "standardize every feature");
    app->add_option("--spec", a.spec, "cluster sizes: n1,n2,... | labels | balanced:K");
    app->add_option("--outliers", a.outliers, "number of outliers n_0");
}

std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Config, "not an integer list: '" + s + "'");
        }
    }
    return out;
}

std::vector<std::string> parse_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

LabeledData load(const DataArgs& a) {
    if (a.delimiter.size() != 1) throw Error(ErrorKind::Config, "delimiter must be one character");
    IngestOptions opt;
    opt.label_column = a.label_column;
    opt.delimiter = a.delimiter[0];
    opt.header = !a.no_header;
    LabeledData d = ingest_csv(a.path, opt);
    if (a.zscore) {
        std::vector<std::string> warnings;
        d.data = zscore(d.data, &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    }
    return d;
}

CardinalitySpec resolve_spec(const DataArgs& a, const LabeledData& d) {
    CardinalitySpec spec;
    const int N = d.data.N();
    const int n0 = std::max(a.outliers, 0);
    if (a.spec == "labels") {
        spec = d.spec_from_labels();
        if (a.outliers >= 0 && a.outliers != spec.outliers)
            throw Error(ErrorKind::Config, "--outliers disagrees with the labelled outlier count");
    } else if (a.spec.rfind("balanced:", 0) == 0) {
        const int K = parse_ints(a.spec.substr(9)).at(0);
        if (K < 1 || (N - n0) % K != 0)
            throw Error(ErrorKind::Config, "N - n_0 is not divisible by K = " + std::to_string(K));
        spec = CardinalitySpec::balanced(K, (N - n0) / K, n0);
    } else {
        spec = CardinalitySpec(parse_ints(a.spec), n0);
    }
    spec.validate(N);
    return spec;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::Config, "cannot write " + path);
    f << text;
}

int row_exit(const ReportRow& row) {
    if (row.status == "resource-limit" || row.status == "timeout") return kResource;
    if (row.status == "config-error" || row.status == "spec-violation") return kConfig;
    if (row.status == "optimal" || row.status == "heuristic" || row.status == "converged") return kOk;
    return kSolver;
}

void apply_solver(SolverConfig& s, double tol, double budget, int max_iters) {
    s.tol_feas = tol;
    s.tol_gap = tol;
    s.time_budget = budget;
    s.max_iters = max_iters;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cardinality-constrained k-means with LP/SDP bounds"};
    app.require_subcommand(1);

    DataArgs data;
    std::string kind = "R_LP_b", method, methods, out;
    std::uint64_t seed = 0;
    double tol = 0.0, budget = 0.0;
    int max_iters = 0, workers = 1, runs = 10;

    auto solver_opts = [&](CLI::App* c) {
        c->add_option("--seed", seed, "seed for randomized methods");
        c->add_option("--tol", tol, "solver tolerance (0 = backend default)");
        c->add_option("--time-budget", budget, "seconds per solve (0 = unlimited)");
        c->add_option("--max-iters", max_iters, "solver iteration cap (0 = backend default)");
        c->add_option("--out", out, "structured report file");
    };

    auto* cluster = app.add_subcommand("cluster", "run one method on one dataset");
    add_data_options(cluster, data);
    cluster->add_option("--kind", kind, "relaxation kind");
    cluster->add_option("--method", method, "method string (default: KIND+round)");
    cluster->add_option("--runs", runs, "multistart runs for bennett");
    solver_opts(cluster);

    auto* bench = app.add_subcommand("bench", "report several methods on one dataset");
    add_data_options(bench, data);
    bench->add_option("--methods", methods, "comma-separated method strings")
        ->default_val("R_SDP_b+round,R_LP_b+round,bennett,PW1_b,PW2");
    bench->add_option("--runs", runs, "multistart runs for bennett");
    bench->add_option("--workers", workers, "methods run concurrently");
    solver_opts(bench);

    std::string rel, grid = "0,3,6,9,12", curve_out;
    int K = 3;
    double min_curv = 0.0;
    auto* elbow = app.add_subcommand("elbow", "choose n_0 from the outlier-relaxation curve");
    elbow->add_option("--data", data.path, "CSV file")->required();
    elbow->add_option("--label-column", data.label_column, "column to ignore as features");
    elbow->add_flag("--zscore", data.zscore, "standardize every feature");
    elbow->add_option("-k,--clusters", K, "number of clusters");
    elbow->add_option("--relative-sizes", rel, "relative cluster sizes (default all equal)");
    elbow->add_option("--grid", grid, "candidate n_0 values");
    elbow->add_option("--kind", kind, "outlier relaxation")->default_val("R_LP_ob");
    elbow->add_option("--min-curvature", min_curv, "smallest second difference accepted as an elbow");
    elbow->add_option("--curve-out", curve_out, "CSV of n_0 and objective");
    solver_opts(elbow);

    std::string generator = "separated", sizes = "4,4,4";
    double delta = 4.0, margin = 2.0;
    int dim = 2, n = 4, n0 = 0;
    auto* synth = app.add_subcommand("synth", "write a generated instance as CSV");
    synth->add_option("--generator", generator, "balls | separated")->check(CLI::IsMember({"balls", "separated"}));
    synth->add_option("--sizes", sizes, "cluster sizes for balls");
    synth->add_option("--delta", delta, "center distance for balls");
    synth->add_option("--dim", dim, "dimension");
    synth->add_option("-k,--clusters", K, "clusters for separated");
    synth->add_option("--n", n, "cluster size for separated");
    synth->add_option("--n0", n0, "outliers for separated");
    synth->add_option("--margin", margin, "separation margin (> 1)");
    synth->add_option("--seed", seed, "seed");
    synth->add_option("--out", out, "CSV file (default stdout)");

    double cap = 2e6;
    auto* oracle = app.add_subcommand("oracle", "exact optimum by enumeration");
    add_data_options(oracle, data);
    oracle->add_option("--cap", cap, "largest partition count to enumerate");
    oracle->add_option("--out", out, "structured report file");

    std::string format = "sdpa";
    auto* exp = app.add_subcommand("export", "write a relaxation in SDPA or text form");
    add_data_options(exp, data);
    exp->add_option("--kind", kind, "relaxation kind");
    exp->add_option("--format", format, "sdpa | text")->check(CLI::IsMember({"sdpa", "text"}));
    exp->add_option("--out", out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*cluster || *bench || *oracle) {
            LabeledData d = load(data);
            ExperimentConfig cfg;
            cfg.name = data.path;
            cfg.data = d.data;
            cfg.labels = d.labels;
            cfg.spec = resolve_spec(data, d);
            cfg.seed = seed;
            cfg.bennett_runs = runs;
            cfg.workers = workers;
            cfg.oracle_cap = cap;
            apply_solver(cfg.solver, tol, budget, max_iters);
            if (*cluster) {
                parse_kind(kind);
                cfg.methods = {method.empty() ? kind + "+round" : method};
            } else if (*bench) {
                cfg.methods = parse_list(methods);
            } else {
                cfg.methods = {"oracle"};
            }
            Report rep = run_experiment(cfg);
            print_table(std::cout, rep);
            if (!out.empty()) write_text(out, report_json(rep, cfg) + "\n");
            if (*bench) return kOk;
            return row_exit(rep.rows[0]);
        }
        if (*elbow) {
            LabeledData d = load(data);
            SolverConfig cfg;
            apply_solver(cfg, tol, budget, max_iters);
            ElbowResult e = elbow_scan(d.data, K, rel.empty() ? std::vector<int>{} : parse_ints(rel),
                                       parse_ints(grid), parse_kind(kind), cfg, min_curv);
            std::cout << "n0,objective,second_difference,status\n";
            std::ostringstream csv;
            csv.precision(17);
            csv << "n0,objective\n";
            nlohmann::json j;
            j["kind"] = kind;
            j["chosen_n0"] = e.chosen_n0;
            j["skipped"] = e.skipped;
            for (std::size_t t = 0; t < e.curve.size(); ++t) {
                const auto& p = e.curve[t];
                std::cout << p.n0 << "," << p.objective << "," << e.second_difference[t] << ","
                          << status_name(p.status) << "\n";
                csv << p.n0 << "," << p.objective << "\n";
                j["curve"].push_back({{"n0", p.n0},
                                      {"objective", p.objective},
                                      {"second_difference", e.second_difference[t]},
                                      {"status", status_name(p.status)}});
            }
            std::cout << "chosen n0 = " << e.chosen_n0 << "\n";
            if (!curve_out.empty()) write_text(curve_out, csv.str());
            if (!out.empty()) write_text(out, j.dump(2) + "\n");
            return kOk;
        }
        if (*synth) {
            PlantedInstance inst = generator == "balls" ? generate_stochastic_balls(parse_ints(sizes), delta, dim, seed)
                                                        : generate_separated_instance(K, n, n0, dim, margin, seed);
            std::ostringstream csv;
            std::vector<int> labels = planted_labels(inst.planted);
            write_csv(csv, inst.data, &labels);
            write_text(out, csv.str());
            std::cerr << "max_intra " << inst.cert.max_intra << " min_inter " << inst.cert.min_inter
                      << " min_outlier " << inst.cert.min_outlier << " S " << inst.cert.satisfies_S << " S' "
                      << inst.cert.satisfies_S_prime << "\n";
            return kOk;
        }
        if (*exp) {
            LabeledData d = load(data);
            CardinalitySpec spec = resolve_spec(data, d);
            ConicProgram p = build_relaxation(parse_kind(kind), distance_matrix(d.data), gram_matrix(d.data), spec);
            std::ostringstream s;
            if (format == "sdpa")
                write_sdpa(s, p);
            else
                dump_text(s, p);
            write_text(out, s.str());
            return kOk;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::ResourceLimit: return kResource;
            case ErrorKind::DegenerateCluster:
            case ErrorKind::Precondition: return kSolver;
            default: return kConfig;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSolver;
    }
    return kOk;
}
