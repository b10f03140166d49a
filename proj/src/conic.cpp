#include "cckm/conic.hpp"

#include "cckm/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cckm {

namespace {

struct KindInfo {
    RelaxationKind kind;
    const char* name;
};

constexpr KindInfo kKinds[] = {
    {RelaxationKind::R_LP, "R_LP"},       {RelaxationKind::R_SDP, "R_SDP"},
    {RelaxationKind::R_LP_b, "R_LP_b"},   {RelaxationKind::R_SDP_b, "R_SDP_b"},
    {RelaxationKind::R_LP_o, "R_LP_o"},   {RelaxationKind::R_SDP_o, "R_SDP_o"},
    {RelaxationKind::R_LP_ob, "R_LP_ob"}, {RelaxationKind::R_SDP_ob, "R_SDP_ob"},
    {RelaxationKind::NAIVE_L, "NAIVE_L"}, {RelaxationKind::PW1, "PW1"},
    {RelaxationKind::PW2, "PW2"},         {RelaxationKind::PW1_b, "PW1_b"},
    {RelaxationKind::AW, "AW"},
};

}  // namespace

const char* kind_name(RelaxationKind k) {
    for (const auto& e : kKinds)
        if (e.kind == k) return e.name;
    return "?";
}

RelaxationKind parse_kind(const std::string& s) {
    for (const auto& e : kKinds)
        if (s == e.name) return e.kind;
    throw Error(ErrorKind::Config, "unknown relaxation kind '" + s + "'");
}

bool is_sdp(RelaxationKind k) {
    switch (k) {
        case RelaxationKind::R_SDP:
        case RelaxationKind::R_SDP_b:
        case RelaxationKind::R_SDP_o:
        case RelaxationKind::R_SDP_ob:
        case RelaxationKind::PW1:
        case RelaxationKind::PW2:
        case RelaxationKind::PW1_b:
        case RelaxationKind::AW:
            return true;
        default:
            return false;
    }
}

bool is_balanced_kind(RelaxationKind k) {
    return k == RelaxationKind::R_LP_b || k == RelaxationKind::R_SDP_b || k == RelaxationKind::R_LP_ob ||
           k == RelaxationKind::R_SDP_ob || k == RelaxationKind::PW1_b;
}

bool is_outlier_kind(RelaxationKind k) {
    return k == RelaxationKind::R_LP_o || k == RelaxationKind::R_SDP_o || k == RelaxationKind::R_LP_ob ||
           k == RelaxationKind::R_SDP_ob;
}

bool is_pw_kind(RelaxationKind k) {
    return k == RelaxationKind::PW1 || k == RelaxationKind::PW2 || k == RelaxationKind::PW1_b ||
           k == RelaxationKind::AW;
}

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::MaxIterations: return "max-iterations";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::NumericalFailure: return "numerical-failure";
        case SolveStatus::TimeLimit: return "timeout";
    }
    return "?";
}

AffineRow AffineRow::negated() const {
    AffineRow r = *this;
    r.constant = -r.constant;
    for (auto& t : r.terms) t.second = -t.second;
    return r;
}

double AffineRow::eval(const double* v) const {
    double s = constant;
    for (const auto& [j, c] : terms) s += c * v[j];
    return s;
}

int ConicProgram::add_vector_block(const std::string& name, int n) {
    Block b{name, Block::Type::Vector, n, num_vars};
    num_vars += b.size();
    blocks.push_back(b);
    return static_cast<int>(blocks.size()) - 1;
}

int ConicProgram::add_symmetric_block(const std::string& name, int n) {
    Block b{name, Block::Type::Symmetric, n, num_vars};
    num_vars += b.size();
    blocks.push_back(b);
    return static_cast<int>(blocks.size()) - 1;
}

ConstraintFamily& ConicProgram::add_family(const std::string& name, Cone cone, int psd_order) {
    families.push_back(ConstraintFamily{name, cone, psd_order, {}});
    return families.back();
}

const Block& ConicProgram::block(const std::string& name) const {
    for (const auto& b : blocks)
        if (b.name == name) return b;
    throw Error(ErrorKind::InvalidInput, "program has no block named " + name);
}

bool ConicProgram::has_psd() const {
    return std::any_of(families.begin(), families.end(), [](const ConstraintFamily& f) { return f.cone == Cone::Psd; });
}

std::size_t ConicProgram::num_rows() const {
    std::size_t n = 0;
    for (const auto& f : families) n += f.rows.size();
    return n;
}

double ConicProgram::eval_objective(const Eigen::VectorXd& v) const { return objective.dot(v) + objective_constant; }

void unpack_blocks(const ConicProgram& p, RelaxationSolution& sol) {
    sol.vectors.clear();
    sol.matrices.clear();
    for (const auto& b : p.blocks) {
        if (b.type == Block::Type::Vector) {
            sol.vectors.push_back(sol.v.segment(b.offset, b.dim));
        } else {
            Eigen::MatrixXd M(b.dim, b.dim);
            for (int j = 0; j < b.dim; ++j)
                for (int i = 0; i <= j; ++i) M(i, j) = M(j, i) = sol.v[b.var(i, j)];
            sol.matrices.push_back(std::move(M));
        }
    }
}

Eigen::VectorXd pack_blocks(const ConicProgram& p, const std::vector<Eigen::VectorXd>& vectors,
                            const std::vector<Eigen::MatrixXd>& matrices) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(p.num_vars);
    std::size_t vi = 0, mi = 0;
    for (const auto& b : p.blocks) {
        if (b.type == Block::Type::Vector) {
            v.segment(b.offset, b.dim) = vectors.at(vi++);
        } else {
            const Eigen::MatrixXd& M = matrices.at(mi++);
            for (int j = 0; j < b.dim; ++j)
                for (int i = 0; i <= j; ++i) v[b.var(i, j)] = 0.5 * (M(i, j) + M(j, i));
        }
    }
    return v;
}

FeasibilityReport check_feasibility(const ConicProgram& p, const Eigen::VectorXd& v) {
    FeasibilityReport rep;
    rep.min_psd_eig = 0.0;
    for (const auto& f : p.families) {
        double worst = 0.0;
        if (f.cone == Cone::Psd) {
            Eigen::MatrixXd S(f.psd_order, f.psd_order);
            for (int j = 0; j < f.psd_order; ++j)
                for (int i = 0; i <= j; ++i) S(i, j) = S(j, i) = f.rows[packed_index(i, j)].eval(v.data());
            double e = sym_eig(S).values.minCoeff();
            if (e < rep.min_psd_eig) {
                rep.min_psd_eig = e;
                if (-e > rep.max_violation) rep.worst_family = f.name;
            }
            continue;
        }
        for (const auto& r : f.rows) {
            double val = r.eval(v.data());
            double viol = f.cone == Cone::Zero ? std::fabs(val) : std::max(0.0, -val);
            worst = std::max(worst, viol);
        }
        if (worst > rep.max_violation) {
            rep.max_violation = worst;
            rep.worst_family = f.name;
        }
    }
    return rep;
}

}  // namespace cckm
