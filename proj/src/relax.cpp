#include "cckm/conic.hpp"

#include "cckm/solvers.hpp"

#include <cmath>
#include <numeric>

namespace cckm {

void build_block_constraints(ConicProgram& p, const Block& x, const Block& M, int n, bool sdp, const std::string& tag) {
    const int N = x.dim;
    if (n < 1 || n > N)
        throw Error(ErrorKind::SpecViolation, "block cardinality " + std::to_string(n) + " outside [1, " +
                                                  std::to_string(N) + "]");
    const double c = 2.0 * n - N;

    auto& sum = p.add_family(tag + ".sum", Cone::Zero);
    AffineRow r;
    for (int i = 0; i < N; ++i) r.add(x.var(i), 1.0);
    r.shift(-c);
    sum.rows.push_back(r);

    auto& rowsum = p.add_family(tag + ".rowsum", Cone::Zero);
    for (int i = 0; i < N; ++i) {
        AffineRow q;
        for (int j = 0; j < N; ++j) q.add(M.var(i, j), 1.0);
        q.add(x.var(i), -c);
        rowsum.rows.push_back(q);
    }

    auto& diag = p.add_family(tag + ".diag", Cone::Zero);
    for (int i = 0; i < N; ++i) diag.rows.push_back(AffineRow().add(M.var(i, i), 1.0).shift(-1.0));

    // M + 11' + x1' + 1x' >= 0 and M + 11' - x1' - 1x' >= 0 are symmetric: upper triangle only.
    auto& pp = p.add_family(tag + ".pp", Cone::NonNeg);
    auto& mm = p.add_family(tag + ".mm", Cone::NonNeg);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i <= j; ++i) {
            AffineRow a, b;
            a.add(M.var(i, j), 1.0).shift(1.0);
            b.add(M.var(i, j), 1.0).shift(1.0);
            if (i == j) {
                a.add(x.var(i), 2.0);
                b.add(x.var(i), -2.0);
            } else {
                a.add(x.var(i), 1.0).add(x.var(j), 1.0);
                b.add(x.var(i), -1.0).add(x.var(j), -1.0);
            }
            pp.rows.push_back(a);
            mm.rows.push_back(b);
        }
    // M - 11' + x1' - 1x' <= 0; its transpose is the fourth family, so all ordered pairs
    // once. The diagonal reduces to m_ii <= 1, already implied by diag(M) = 1.
    auto& pm = p.add_family(tag + ".pm", Cone::NonNeg);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            pm.rows.push_back(AffineRow().add(M.var(i, j), -1.0).add(x.var(i), -1.0).add(x.var(j), 1.0).shift(1.0));
        }

    if (sdp) {
        auto& schur = p.add_family(tag + ".schur", Cone::Psd, N + 1);
        for (int j = 0; j <= N; ++j)
            for (int i = 0; i <= j; ++i) {
                if (j < N)
                    schur.rows.push_back(AffineRow().add(M.var(i, j), 1.0));
                else if (i < N)
                    schur.rows.push_back(AffineRow().add(x.var(i), 1.0));
                else
                    schur.rows.push_back(AffineRow().shift(1.0));
            }
    }
}

namespace {

// objective += w <D, M + 11' + s(x1' + 1x')>
void add_block_objective(ConicProgram& p, const Eigen::MatrixXd& D, const Block& x, double s, const Block& M,
                         double w) {
    const int N = x.dim;
    for (int j = 0; j < N; ++j)
        for (int i = 0; i <= j; ++i) p.objective[M.var(i, j)] += w * (i == j ? D(i, i) : 2.0 * D(i, j));
    Eigen::VectorXd r = D.rowwise().sum();
    for (int i = 0; i < N; ++i) p.objective[x.var(i)] += w * s * 2.0 * r[i];
    p.objective_constant += w * D.sum();
}

void check_distance(const Eigen::MatrixXd& D, int N) {
    if (D.rows() != N || D.cols() != N) throw Error(ErrorKind::InvalidInput, "distance matrix size mismatch");
    if (!D.allFinite()) throw Error(ErrorKind::InvalidInput, "distance matrix has non-finite entries");
}

void add_pw_common(ConicProgram& p, const Block& Z, int K) {
    const int N = Z.dim;
    auto& rows = p.add_family("Z.rowsum", Cone::Zero);
    for (int i = 0; i < N; ++i) {
        AffineRow r;
        for (int j = 0; j < N; ++j) r.add(Z.var(i, j), 1.0);
        rows.rows.push_back(r.shift(-1.0));
    }
    auto& tr = p.add_family("Z.trace", Cone::Zero);
    AffineRow t;
    for (int i = 0; i < N; ++i) t.add(Z.var(i, i), 1.0);
    tr.rows.push_back(t.shift(-static_cast<double>(K)));
    auto& psd = p.add_family("Z.psd", Cone::Psd, N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i <= j; ++i) psd.rows.push_back(AffineRow().add(Z.var(i, j), 1.0));
}

void add_z_nonneg(ConicProgram& p, const Block& Z) {
    auto& nn = p.add_family("Z.nonneg", Cone::NonNeg);
    for (int j = 0; j < Z.dim; ++j)
        for (int i = 0; i <= j; ++i) nn.rows.push_back(AffineRow().add(Z.var(i, j), 1.0));
}

// objective += <G, I - Z> when sign = -1 and G = W; <G, Z> when sign = +1
void add_z_objective(ConicProgram& p, const Block& Z, const Eigen::MatrixXd& G, double sign) {
    for (int j = 0; j < Z.dim; ++j)
        for (int i = 0; i <= j; ++i) p.objective[Z.var(i, j)] += sign * (i == j ? G(i, i) : 2.0 * G(i, j));
}

}  // namespace

ConicProgram build_relaxation(RelaxationKind kind, const Eigen::MatrixXd& D, const Eigen::MatrixXd& W,
                              const CardinalitySpec& spec, const BuildOptions& opt) {
    const int N = static_cast<int>(D.rows());
    check_distance(D, N);
    spec.validate(N);
    const int K = spec.K();
    if (is_balanced_kind(kind) && !spec.is_balanced())
        throw Error(ErrorKind::SpecViolation, std::string(kind_name(kind)) + " needs equal cluster sizes");
    if (is_outlier_kind(kind) && spec.outliers < 1)
        throw Error(ErrorKind::SpecViolation, std::string(kind_name(kind)) + " needs at least one outlier");
    if (!is_outlier_kind(kind) && spec.outliers != 0)
        throw Error(ErrorKind::SpecViolation, std::string(kind_name(kind)) + " does not model outliers");

    ConicProgram p;
    p.kind = kind;
    p.N = N;
    p.spec = spec;
    const bool sdp = is_sdp(kind);

    switch (kind) {
        case RelaxationKind::R_LP:
        case RelaxationKind::R_SDP: {
            // two clusters: x^2 = -x^1, M^2 = M^1 solve the second block's constraints for free
            int nb = K == 2 ? 1 : K;
            for (int k = 0; k < nb; ++k) {
                p.add_vector_block("x" + std::to_string(k + 1), N);
                p.add_symmetric_block("M" + std::to_string(k + 1), N);
            }
            p.objective = Eigen::VectorXd::Zero(p.num_vars);
            for (int k = 0; k < nb; ++k) {
                const Block x = p.blocks[2 * k], M = p.blocks[2 * k + 1];
                build_block_constraints(p, x, M, spec.sizes[k], sdp, "C" + std::to_string(k + 1));
                add_block_objective(p, D, x, 1.0, M, 1.0 / (8.0 * spec.sizes[k]));
            }
            if (K == 2) {
                add_block_objective(p, D, p.blocks[0], -1.0, p.blocks[1], 1.0 / (8.0 * spec.sizes[1]));
            } else if (K > 2) {
                auto& cpl = p.add_family("coupling", Cone::Zero);
                for (int i = 0; i < N; ++i) {
                    AffineRow r;
                    for (int k = 0; k < K; ++k) r.add(p.blocks[2 * k].var(i), 1.0);
                    cpl.rows.push_back(r.shift(-(2.0 - K)));
                }
            }
            break;
        }
        case RelaxationKind::R_LP_b:
        case RelaxationKind::R_SDP_b: {
            const int n = spec.sizes[0];
            p.add_vector_block("x1", N);
            p.add_symmetric_block("M1", N);
            p.add_vector_block("x", N);
            p.add_symmetric_block("M", N);
            p.objective = Eigen::VectorXd::Zero(p.num_vars);
            build_block_constraints(p, p.blocks[0], p.blocks[1], n, sdp, "C1");
            build_block_constraints(p, p.blocks[2], p.blocks[3], n, sdp, "C");
            add_block_objective(p, D, p.blocks[0], 1.0, p.blocks[1], 1.0 / (8.0 * n));
            if (K > 1) add_block_objective(p, D, p.blocks[2], 1.0, p.blocks[3], (K - 1.0) / (8.0 * n));
            auto& cpl = p.add_family("coupling", Cone::Zero);
            for (int i = 0; i < N; ++i)
                cpl.rows.push_back(
                    AffineRow().add(p.blocks[0].var(i), 1.0).add(p.blocks[2].var(i), K - 1.0).shift(-(2.0 - K)));
            p.add_family("symmetry", Cone::Zero).rows.push_back(AffineRow().add(p.blocks[0].var(0), 1.0).shift(-1.0));
            break;
        }
        case RelaxationKind::R_LP_o:
        case RelaxationKind::R_SDP_o: {
            // one normal cluster: x^1 = -x^0, M^1 = M^0 as in the two-cluster case
            int nb = K == 1 ? 1 : K + 1;
            for (int k = 0; k < nb; ++k) {
                p.add_vector_block("x" + std::to_string(k), N);
                p.add_symmetric_block("M" + std::to_string(k), N);
            }
            p.objective = Eigen::VectorXd::Zero(p.num_vars);
            for (int k = 0; k < nb; ++k) {
                const Block x = p.blocks[2 * k], M = p.blocks[2 * k + 1];
                int nk = k == 0 ? spec.outliers : spec.sizes[k - 1];
                build_block_constraints(p, x, M, nk, sdp, "C" + std::to_string(k));
                if (k > 0) add_block_objective(p, D, x, 1.0, M, 1.0 / (8.0 * nk));
            }
            if (K == 1) {
                add_block_objective(p, D, p.blocks[0], -1.0, p.blocks[1], 1.0 / (8.0 * spec.sizes[0]));
            } else {
                auto& cpl = p.add_family("coupling", Cone::Zero);
                for (int i = 0; i < N; ++i) {
                    AffineRow r;
                    for (int k = 0; k <= K; ++k) r.add(p.blocks[2 * k].var(i), 1.0);
                    cpl.rows.push_back(r.shift(-(1.0 - K)));
                }
            }
            break;
        }
        case RelaxationKind::R_LP_ob:
        case RelaxationKind::R_SDP_ob: {
            const int n = spec.sizes[0];
            p.add_vector_block("x0", N);
            p.add_symmetric_block("M0", N);
            p.add_vector_block("x", N);
            p.add_symmetric_block("M", N);
            p.objective = Eigen::VectorXd::Zero(p.num_vars);
            build_block_constraints(p, p.blocks[0], p.blocks[1], spec.outliers, sdp, "C0");
            build_block_constraints(p, p.blocks[2], p.blocks[3], n, sdp, "C");
            add_block_objective(p, D, p.blocks[2], 1.0, p.blocks[3], static_cast<double>(K) / (8.0 * n));
            auto& cpl = p.add_family("coupling", Cone::Zero);
            for (int i = 0; i < N; ++i)
                cpl.rows.push_back(AffineRow()
                                       .add(p.blocks[2].var(i), static_cast<double>(K))
                                       .add(p.blocks[0].var(i), 1.0)
                                       .shift(-(1.0 - K)));
            break;
        }
        case RelaxationKind::NAIVE_L: {
            for (int k = 0; k < K; ++k) {
                p.add_vector_block("pi" + std::to_string(k + 1), N);
                p.add_symmetric_block("eta" + std::to_string(k + 1), N);
            }
            p.objective = Eigen::VectorXd::Zero(p.num_vars);
            auto& bounds = p.add_family("pi.bounds", Cone::NonNeg);
            auto& etann = p.add_family("eta.nonneg", Cone::NonNeg);
            auto& link = p.add_family("eta.link", Cone::NonNeg);
            auto& card = p.add_family("pi.cardinality", Cone::Zero);
            for (int k = 0; k < K; ++k) {
                const Block pi = p.blocks[2 * k], eta = p.blocks[2 * k + 1];
                AffineRow s;
                for (int i = 0; i < N; ++i) {
                    bounds.rows.push_back(AffineRow().add(pi.var(i), 1.0));
                    bounds.rows.push_back(AffineRow().add(pi.var(i), -1.0).shift(1.0));
                    s.add(pi.var(i), 1.0);
                }
                card.rows.push_back(s.shift(-static_cast<double>(spec.sizes[k])));
                for (int j = 0; j < N; ++j)
                    for (int i = 0; i <= j; ++i) {
                        etann.rows.push_back(AffineRow().add(eta.var(i, j), 1.0));
                        AffineRow l;
                        l.add(eta.var(i, j), 1.0).shift(1.0);
                        if (i == j)
                            l.add(pi.var(i), -2.0);
                        else
                            l.add(pi.var(i), -1.0).add(pi.var(j), -1.0);
                        link.rows.push_back(l);
                        if (i != j) p.objective[eta.var(i, j)] += D(i, j) / spec.sizes[k];
                    }
            }
            auto& part = p.add_family("pi.partition", Cone::Zero);
            for (int i = 0; i < N; ++i) {
                AffineRow r;
                for (int k = 0; k < K; ++k) r.add(p.blocks[2 * k].var(i), 1.0);
                part.rows.push_back(r.shift(-1.0));
            }
            if (opt.naive_symmetry_break)
                p.add_family("symmetry", Cone::Zero).rows.push_back(AffineRow().add(p.blocks[0].var(0), 1.0).shift(-1.0));
            break;
        }
        case RelaxationKind::PW1:
        case RelaxationKind::PW1_b:
        case RelaxationKind::PW2: {
            if (W.rows() != N || W.cols() != N) throw Error(ErrorKind::InvalidInput, "Gram matrix size mismatch");
            p.add_symmetric_block("Z", N);
            p.objective = Eigen::VectorXd::Zero(p.num_vars);
            add_z_objective(p, p.blocks[0], W, -1.0);
            p.objective_constant = W.trace();
            add_pw_common(p, p.blocks[0], K);
            if (kind != RelaxationKind::PW2) add_z_nonneg(p, p.blocks[0]);
            if (kind == RelaxationKind::PW1_b) {
                auto& ub = p.add_family("Z.upper", Cone::NonNeg);
                const Block Z = p.blocks[0];
                for (int j = 0; j < N; ++j)
                    for (int i = 0; i <= j; ++i)
                        ub.rows.push_back(AffineRow().add(Z.var(i, j), -1.0).shift(static_cast<double>(K) / N));
            }
            if (kind == RelaxationKind::PW2) {
                auto& comp = p.add_family("I-Z.psd", Cone::Psd, N);
                const Block Z = p.blocks[0];
                for (int j = 0; j < N; ++j)
                    for (int i = 0; i <= j; ++i)
                        comp.rows.push_back(AffineRow().add(Z.var(i, j), -1.0).shift(i == j ? 1.0 : 0.0));
            }
            break;
        }
        case RelaxationKind::AW: {
            // Same feasible set as PW1, assembled separately.
            p.add_symmetric_block("Z", N);
            const Block Z = p.blocks[0];
            p.objective = Eigen::VectorXd::Zero(p.num_vars);
            add_z_objective(p, Z, D, 1.0);
            auto& psd = p.add_family("Z.psd", Cone::Psd, N);
            auto& nn = p.add_family("Z.nonneg", Cone::NonNeg);
            for (int j = 0; j < N; ++j)
                for (int i = 0; i <= j; ++i) {
                    psd.rows.push_back(AffineRow().add(Z.var(i, j), 1.0));
                    nn.rows.push_back(AffineRow().add(Z.var(i, j), 1.0));
                }
            auto& stoch = p.add_family("Z.stochastic", Cone::Zero);
            AffineRow tr;
            for (int i = 0; i < N; ++i) {
                AffineRow r;
                for (int j = 0; j < N; ++j) r.add(Z.var(i, j), 1.0);
                stoch.rows.push_back(r.shift(-1.0));
                tr.add(Z.var(i, i), 1.0);
            }
            p.add_family("Z.trace", Cone::Zero).rows.push_back(tr.shift(-static_cast<double>(K)));
            break;
        }
    }
    return p;
}

namespace {

Eigen::VectorXd indicator_pm(int N, const std::vector<int>& S) {
    Eigen::VectorXd x = -Eigen::VectorXd::Ones(N);
    for (int i : S) x[i] = 1.0;
    return x;
}

}  // namespace

RelaxationSolution embed_integral(const ConicProgram& p, const Clustering& c) {
    const int N = p.N;
    const int K = p.spec.K();
    c.validate(p.spec, N);
    std::vector<Eigen::VectorXd> vecs;
    std::vector<Eigen::MatrixXd> mats;
    auto push_pm = [&](const std::vector<int>& S) {
        Eigen::VectorXd x = indicator_pm(N, S);
        vecs.push_back(x);
        mats.push_back(x * x.transpose());
    };
    // average of the given clusters' integral pairs
    auto push_avg = [&](const std::vector<int>& ks) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
        for (int k : ks) {
            Eigen::VectorXd xk = indicator_pm(N, c.clusters[k]);
            x += xk;
            M += xk * xk.transpose();
        }
        if (!ks.empty()) {
            x /= ks.size();
            M /= ks.size();
        } else {
            x.setOnes();
            M.setOnes();
        }
        vecs.push_back(x);
        mats.push_back(M);
    };

    switch (p.kind) {
        case RelaxationKind::R_LP:
        case RelaxationKind::R_SDP:
            for (int k = 0; k < (K == 2 ? 1 : K); ++k) push_pm(c.clusters[k]);
            break;
        case RelaxationKind::R_LP_b:
        case RelaxationKind::R_SDP_b: {
            // the first block must hold point 0; relabel so its cluster comes first
            int first = 0;
            for (int k = 0; k < K; ++k)
                if (std::find(c.clusters[k].begin(), c.clusters[k].end(), 0) != c.clusters[k].end()) first = k;
            push_pm(c.clusters[first]);
            std::vector<int> rest;
            for (int k = 0; k < K; ++k)
                if (k != first) rest.push_back(k);
            push_avg(rest);
            break;
        }
        case RelaxationKind::R_LP_o:
        case RelaxationKind::R_SDP_o:
            push_pm(c.outliers);
            if (K > 1)
                for (int k = 0; k < K; ++k) push_pm(c.clusters[k]);
            break;
        case RelaxationKind::R_LP_ob:
        case RelaxationKind::R_SDP_ob: {
            push_pm(c.outliers);
            std::vector<int> all(K);
            std::iota(all.begin(), all.end(), 0);
            push_avg(all);
            break;
        }
        case RelaxationKind::NAIVE_L:
            for (int k = 0; k < K; ++k) {
                Eigen::VectorXd pi = Eigen::VectorXd::Zero(N);
                for (int i : c.clusters[k]) pi[i] = 1.0;
                vecs.push_back(pi);
                mats.push_back(pi * pi.transpose());
            }
            break;
        default: {
            Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(N, N);
            for (int k = 0; k < K; ++k)
                for (int i : c.clusters[k])
                    for (int j : c.clusters[k]) Z(i, j) = 1.0 / c.clusters[k].size();
            mats.push_back(Z);
            break;
        }
    }
    RelaxationSolution s;
    s.kind = p.kind;
    s.v = pack_blocks(p, vecs, mats);
    unpack_blocks(p, s);
    s.objective = s.dual_objective = p.eval_objective(s.v);
    s.status = SolveStatus::Optimal;
    return s;
}

std::vector<std::pair<Eigen::VectorXd, Eigen::MatrixXd>> cluster_blocks(const ConicProgram& p,
                                                                        const RelaxationSolution& s) {
    std::vector<std::pair<Eigen::VectorXd, Eigen::MatrixXd>> out;
    const int K = p.spec.K();
    switch (p.kind) {
        case RelaxationKind::R_LP:
        case RelaxationKind::R_SDP:
            if (K == 2) {
                out.emplace_back(s.vectors[0], s.matrices[0]);
                out.emplace_back(-s.vectors[0], s.matrices[0]);
            } else {
                for (int k = 0; k < K; ++k) out.emplace_back(s.vectors[k], s.matrices[k]);
            }
            break;
        case RelaxationKind::R_LP_o:
        case RelaxationKind::R_SDP_o:
            if (K == 1) {
                out.emplace_back(s.vectors[0], s.matrices[0]);
                out.emplace_back(-s.vectors[0], s.matrices[0]);
            } else {
                for (int k = 0; k <= K; ++k) out.emplace_back(s.vectors[k], s.matrices[k]);
            }
            break;
        case RelaxationKind::R_LP_b:
        case RelaxationKind::R_SDP_b:
        case RelaxationKind::R_LP_ob:
        case RelaxationKind::R_SDP_ob:
            out.emplace_back(s.vectors[0], s.matrices[0]);
            out.emplace_back(s.vectors[1], s.matrices[1]);
            break;
        default:
            throw Error(ErrorKind::InvalidInput, std::string("no (x, M) blocks in ") + kind_name(p.kind));
    }
    return out;
}

Eigen::MatrixXd lift_to_pw(const ConicProgram& p, const RelaxationSolution& s, double tol) {
    if (p.kind != RelaxationKind::R_SDP && p.kind != RelaxationKind::R_SDP_b && p.kind != RelaxationKind::R_LP &&
        p.kind != RelaxationKind::R_LP_b)
        throw Error(ErrorKind::Precondition, std::string("lift_to_pw expects an R_LP, R_SDP or balanced solution, got ") +
                                                 kind_name(p.kind));
    FeasibilityReport fr = check_feasibility(p, s.v);
    if (!fr.feasible(tol))
        throw Error(ErrorKind::Precondition, "input solution infeasible: max violation " +
                                                 std::to_string(fr.max_violation) + " in " + fr.worst_family +
                                                 ", min PSD eigenvalue " + std::to_string(fr.min_psd_eig));
    const int N = p.N;
    const int K = p.spec.K();
    const Eigen::MatrixXd J = Eigen::MatrixXd::Ones(N, N);
    auto term = [&](const Eigen::VectorXd& x, const Eigen::MatrixXd& M) {
        Eigen::MatrixXd T = M + J;
        T.colwise() += x;
        T.rowwise() += x.transpose();
        return T;
    };
    auto blocks = cluster_blocks(p, s);
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(N, N);
    if (is_balanced_kind(p.kind)) {
        const double n = p.spec.sizes[0];
        Z = (term(blocks[0].first, blocks[0].second) + (K - 1.0) * term(blocks[1].first, blocks[1].second)) / (4.0 * n);
    } else {
        for (int k = 0; k < K; ++k) Z += term(blocks[k].first, blocks[k].second) / (4.0 * p.spec.sizes[k]);
    }
    return 0.5 * (Z + Z.transpose());
}

AssignmentSpace to_assignment_space(const Eigen::VectorXd& x, const Eigen::MatrixXd& M) {
    AssignmentSpace a;
    a.pi = (x.array() + 1.0) / 2.0;
    a.eta = M;
    a.eta.colwise() += x;
    a.eta.rowwise() += x.transpose();
    a.eta.array() += 1.0;
    a.eta /= 4.0;
    return a;
}

}  // namespace cckm
