#pragma once

#include "cckm/types.hpp"

#include <deque>
#include <string>
#include <utility>
#include <vector>

namespace cckm {

enum class RelaxationKind {
    R_LP,
    R_SDP,
    R_LP_b,
    R_SDP_b,
    R_LP_o,
    R_SDP_o,
    R_LP_ob,
    R_SDP_ob,
    NAIVE_L,
    PW1,
    PW2,
    PW1_b,
    AW,
};

const char* kind_name(RelaxationKind k);
RelaxationKind parse_kind(const std::string& s);
bool is_sdp(RelaxationKind k);
bool is_balanced_kind(RelaxationKind k);
bool is_outlier_kind(RelaxationKind k);
bool is_pw_kind(RelaxationKind k);

// Packed upper triangle of a symmetric block: entry (i,j), i <= j, lives at j(j+1)/2 + i.
inline int packed_index(int i, int j) {
    if (i > j) std::swap(i, j);
    return j * (j + 1) / 2 + i;
}
inline int packed_size(int n) { return n * (n + 1) / 2; }

struct Block {
    enum class Type { Vector, Symmetric };
    std::string name;
    Type type = Type::Vector;
    int dim = 0;     // vector length or matrix order
    int offset = 0;  // first variable index
    int size() const { return type == Type::Vector ? dim : packed_size(dim); }
    int var(int i) const { return offset + i; }
    int var(int i, int j) const { return offset + packed_index(i, j); }
};

// const + sum coef * v[var]
struct AffineRow {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    AffineRow& add(int var, double coef) {
        terms.emplace_back(var, coef);
        return *this;
    }
    AffineRow& shift(double c) {
        constant += c;
        return *this;
    }
    AffineRow negated() const;
    double eval(const double* v) const;
};

enum class Cone { Zero, NonNeg, Psd };

// Zero: row == 0. NonNeg: row >= 0. Psd: rows are the packed upper triangle of a
// symmetric affine matrix of order psd_order that must be positive semidefinite.
struct ConstraintFamily {
    std::string name;
    Cone cone = Cone::Zero;
    int psd_order = 0;
    std::vector<AffineRow> rows;
};

struct ConicProgram {
    RelaxationKind kind = RelaxationKind::R_LP;
    int N = 0;
    CardinalitySpec spec;
    std::vector<Block> blocks;
    int num_vars = 0;
    Eigen::VectorXd objective;  // min objective . v + objective_constant
    double objective_constant = 0.0;
    std::deque<ConstraintFamily> families;  // deque: references stay valid while adding

    int add_vector_block(const std::string& name, int n);
    int add_symmetric_block(const std::string& name, int n);
    ConstraintFamily& add_family(const std::string& name, Cone cone, int psd_order = 0);
    const Block& block(const std::string& name) const;
    bool has_psd() const;
    std::size_t num_rows() const;
    double eval_objective(const Eigen::VectorXd& v) const;
};

enum class SolveStatus { Optimal, MaxIterations, Infeasible, Unbounded, NumericalFailure, TimeLimit };
const char* status_name(SolveStatus s);

struct Residuals {
    double primal = 0.0;  // max absolute constraint violation
    double dual = 0.0;
    double gap = 0.0;     // relative duality gap
};

struct RelaxationSolution {
    RelaxationKind kind = RelaxationKind::R_LP;
    Eigen::VectorXd v;                       // raw variable vector
    std::vector<Eigen::VectorXd> vectors;    // vector blocks in program order
    std::vector<Eigen::MatrixXd> matrices;   // symmetric blocks in program order
    double objective = 0.0;
    double dual_objective = 0.0;
    Residuals residuals;
    SolveStatus status = SolveStatus::Optimal;
    int iterations = 0;
    double seconds = 0.0;

    bool optimal() const { return status == SolveStatus::Optimal; }
};

// Fills the typed block views of sol from sol.v.
void unpack_blocks(const ConicProgram& p, RelaxationSolution& sol);
Eigen::VectorXd pack_blocks(const ConicProgram& p, const std::vector<Eigen::VectorXd>& vectors,
                            const std::vector<Eigen::MatrixXd>& matrices);

// Rows for (x, M) in the LP or SDP constraint set of cardinality n.
void build_block_constraints(ConicProgram& p, const Block& x, const Block& M, int n, bool sdp,
                             const std::string& tag);

struct BuildOptions {
    // pins point 0 to the first cluster in NAIVE_L
    bool naive_symmetry_break = false;
};

ConicProgram build_relaxation(RelaxationKind kind, const Eigen::MatrixXd& D, const Eigen::MatrixXd& W,
                              const CardinalitySpec& spec, const BuildOptions& opt = {});

struct FeasibilityReport {
    double max_violation = 0.0;
    double min_psd_eig = 0.0;
    std::string worst_family;
    bool feasible(double tol) const { return max_violation <= tol && min_psd_eig >= -tol; }
};
FeasibilityReport check_feasibility(const ConicProgram& p, const Eigen::VectorXd& v);

// Integral point x^k_i = +-1, M^k = x^k x^k^T in the block layout of program p
// (R_* kinds and NAIVE_L); objective equals the clustering cost.
RelaxationSolution embed_integral(const ConicProgram& p, const Clustering& c);

// Per-cluster (x^k, M^k) pairs implied by a solution: clusters 1..K in order for
// R_LP/R_SDP (including the K = 2 single-block form), (x^1, M^1) and the shared (x, M)
// for balanced kinds, and the outlier block first for outlier kinds.
std::vector<std::pair<Eigen::VectorXd, Eigen::MatrixXd>> cluster_blocks(const ConicProgram& p,
                                                                        const RelaxationSolution& s);

// Z = (1/4) sum_k (1/n_k)(M^k + 11' + x^k 1' + 1 x^k'); the balanced form expands the
// shared block K - 1 times. Throws Precondition if the input is infeasible beyond tol.
Eigen::MatrixXd lift_to_pw(const ConicProgram& p, const RelaxationSolution& s, double tol = 1e-6);

struct AssignmentSpace {
    Eigen::VectorXd pi;
    Eigen::MatrixXd eta;
};
AssignmentSpace to_assignment_space(const Eigen::VectorXd& x, const Eigen::MatrixXd& M);

}  // namespace cckm
