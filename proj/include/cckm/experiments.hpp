#pragma once

#include "cckm/conic.hpp"
#include "cckm/solvers.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cckm {

struct IngestOptions {
    std::string label_column;  // name, or 0-based index when the file has no header
    char delimiter = ',';
    bool header = true;
};

struct LabeledData {
    DataSet data;
    std::vector<std::string> feature_names;
    // Integer labels are kept as written (-1 marks an outlier); other labels are
    // numbered by first appearance.
    std::vector<int> labels;

    bool has_labels() const { return !labels.empty(); }
    // Sizes of the non-negative classes in increasing label order, with -1 as n_0.
    CardinalitySpec spec_from_labels() const;
};

LabeledData parse_csv(std::istream& is, const IngestOptions& opt = {}, const std::string& source = "<input>");
LabeledData ingest_csv(const std::string& path, const IngestOptions& opt = {});
// Header row x0..x{d-1}[,label]; labels use the planted-instance convention (-1 outliers).
void write_csv(std::ostream& os, const DataSet& ds, const std::vector<int>* labels = nullptr);
std::vector<int> planted_labels(const Clustering& c);

struct ElbowPoint {
    int n0 = 0;
    double objective = 0.0;
    SolveStatus status = SolveStatus::Optimal;
};

struct ElbowResult {
    std::vector<ElbowPoint> curve;        // grid values that passed filtering, ascending
    std::vector<int> skipped;             // grid values with non-integral residual sizes
    std::vector<double> second_difference;  // per curve point; 0 at both ends
    int chosen_n0 = 0;
};

// Solves the outlier relaxation for every admissible n_0 and picks the point with the
// largest second difference of the log objective. If no interior point exceeds
// min_curvature the smallest grid value is chosen.
ElbowResult elbow_scan(const DataSet& ds, int K, const std::vector<int>& relative_sizes,
                       const std::vector<int>& n0_grid, RelaxationKind kind, const SolverConfig& cfg = {},
                       double min_curvature = 0.0);

// Method strings:
//   KIND              relaxation bound only
//   PW2:spectral      PW2 value from the closed form instead of a conic solve
//   KIND+round        relaxation plus the matching rounding algorithm
//   KIND+round+lloyd  balanced rounding followed by one centroid reassignment
//   bennett[:runs]    k-means++ multistart of the capacitated local search
//   bennett-init      one local search started from the centroids of the given labels
//   oracle            exhaustive enumeration
struct ExperimentConfig {
    std::string name;
    DataSet data;
    std::vector<int> labels;  // optional ground truth
    CardinalitySpec spec;
    std::vector<std::string> methods;
    SolverConfig solver;
    std::uint64_t seed = 0;
    int bennett_runs = 10;
    int bennett_max_iters = 1000;
    double oracle_cap = 2e6;
    int workers = 1;

    void validate() const;
};

struct ReportRow {
    std::string method;
    std::optional<double> lb, ub, gap;
    double seconds = 0.0;
    std::string status;
    std::optional<double> accuracy;
    std::optional<double> cv;  // multistart coefficient of variation
    std::string message;
};

struct Report {
    std::string name;
    int N = 0, d = 0;
    CardinalitySpec spec;
    std::uint64_t seed = 0;
    std::vector<ReportRow> rows;
};

Report run_experiment(const ExperimentConfig& cfg);

// Fraction of points whose cluster maps to their class under the best one-to-one
// matching of clusters to classes; label -1 matches the outlier set.
double recovery_accuracy(const Clustering& c, const std::vector<int>& labels);

void print_table(std::ostream& os, const Report& r);
// Structured report: config echo, rows and environment; timing fields are omitted when
// include_timing is false so that reports can be compared byte for byte.
std::string report_json(const Report& r, const ExperimentConfig& cfg, bool include_timing = true);
std::string environment_summary();

}  // namespace cckm
