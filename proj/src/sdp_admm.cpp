// Operator-splitting conic solver.
//   min q'x  s.t.  A x + s = b,  s in {0}^me x R+^nn x PSD x ...
// Each iteration solves the quasi-definite system
//   [ sigma I + Ac' rho_c Ac    Ae'        ] [x~]   [ sigma x - q + Ac' rho_c rc ]
//   [ Ae                       -1/rho_e    ] [nu] = [ re                         ]
// (cone rows eliminated, equality rows kept), then projects onto the cones.
// The data are Ruiz-equilibrated with a single row scale per PSD cone.
#include "cckm/kernels.hpp"
#include "cckm/solvers.hpp"

#include "standard_form.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <chrono>
#include <cmath>

namespace cckm {

using detail::SpMat;

namespace {

constexpr double kSigma = 1e-6;
constexpr double kAlpha = 1.5;
constexpr double kEqRhoFactor = 1e3;

struct Problem {
    int n = 0, me = 0, nn = 0, m = 0;
    std::vector<int> psd_orders;
    std::vector<int> psd_start;
    SpMat A;  // m x n, rows: equalities, nonnegatives, PSD svec
    Eigen::VectorXd b, q;
};

struct Scaling {
    Eigen::VectorXd D;  // variables
    Eigen::VectorXd E;  // rows
    double c = 1.0;     // objective
};

Scaling equilibrate(Problem& P, bool enabled) {
    Scaling sc;
    sc.D = Eigen::VectorXd::Ones(P.n);
    sc.E = Eigen::VectorXd::Ones(P.m);
    if (!enabled) return sc;
    auto clamp = [](double v) { return std::min(1e4, std::max(1e-4, v)); };
    for (int pass = 0; pass < 15; ++pass) {
        Eigen::VectorXd cn = Eigen::VectorXd::Zero(P.n), rn = Eigen::VectorXd::Zero(P.m);
        for (int j = 0; j < P.A.outerSize(); ++j)
            for (SpMat::InnerIterator it(P.A, j); it; ++it) {
                double a = std::fabs(it.value());
                cn[j] = std::max(cn[j], a);
                rn[it.row()] = std::max(rn[it.row()], a);
            }
        Eigen::VectorXd dj(P.n), ei(P.m);
        for (int j = 0; j < P.n; ++j) dj[j] = cn[j] > 0 ? clamp(1.0 / std::sqrt(cn[j])) : 1.0;
        for (int i = 0; i < P.m; ++i) ei[i] = rn[i] > 0 ? clamp(1.0 / std::sqrt(rn[i])) : 1.0;
        // a cone must stay invariant: one scale per PSD block
        for (std::size_t k = 0; k < P.psd_orders.size(); ++k) {
            int len = P.psd_orders[k] * (P.psd_orders[k] + 1) / 2;
            double mean = ei.segment(P.psd_start[k], len).mean();
            ei.segment(P.psd_start[k], len).setConstant(mean);
        }
        P.A = ei.asDiagonal() * P.A * dj.asDiagonal();
        sc.D = sc.D.cwiseProduct(dj);
        sc.E = sc.E.cwiseProduct(ei);
    }
    P.b = sc.E.cwiseProduct(P.b);
    P.q = sc.D.cwiseProduct(P.q);
    double qn = P.q.size() ? P.q.lpNorm<Eigen::Infinity>() : 0.0;
    sc.c = qn > 0 ? clamp(1.0 / qn) : 1.0;
    P.q *= sc.c;
    return sc;
}

void project_psd(double* v, int order, Eigen::MatrixXd& work) {
    const double r2 = std::sqrt(2.0);
    int k = 0;
    for (int j = 0; j < order; ++j)
        for (int i = 0; i <= j; ++i, ++k) {
            double val = i == j ? v[k] : v[k] / r2;
            work(i, j) = val;
            work(j, i) = val;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(work);
    Eigen::VectorXd lam = es.eigenvalues();
    if (lam.minCoeff() >= 0.0) return;
    if (lam.maxCoeff() <= 0.0) {
        std::fill(v, v + k, 0.0);
        return;
    }
    const Eigen::MatrixXd& V = es.eigenvectors();
    // rebuild from whichever side has fewer eigenvectors
    int npos = 0;
    for (int i = 0; i < order; ++i) npos += lam[i] > 0.0;
    if (npos <= order / 2) {
        work.setZero();
        for (int i = 0; i < order; ++i)
            if (lam[i] > 0.0) work.selfadjointView<Eigen::Upper>().rankUpdate(V.col(i), lam[i]);
    } else {
        for (int i = 0; i < order; ++i)
            if (lam[i] < 0.0) work.selfadjointView<Eigen::Upper>().rankUpdate(V.col(i), -lam[i]);
    }
    k = 0;
    for (int j = 0; j < order; ++j)
        for (int i = 0; i <= j; ++i, ++k) v[k] = i == j ? work(i, j) : work(i, j) * r2;
}

struct Kkt {
    const Problem& P;
    SpMat Ac, Ae, Act;
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt;
    bool ok = true;

    explicit Kkt(const Problem& p) : P(p) {
        Ae = P.A.topRows(P.me);
        Ac = P.A.bottomRows(P.m - P.me);
        Act = Ac.transpose();
    }

    void factor(const Eigen::VectorXd& rho) {
        Eigen::VectorXd rc = rho.tail(P.m - P.me);
        SpMat H = Act * (rc.asDiagonal() * Ac);
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(H.nonZeros() + Ae.nonZeros() + P.n + P.me);
        for (int j = 0; j < H.outerSize(); ++j)
            for (SpMat::InnerIterator it(H, j); it; ++it)
                if (it.row() >= j) t.emplace_back(it.row(), j, it.value());
        for (int j = 0; j < P.n; ++j) t.emplace_back(j, j, kSigma);
        for (int j = 0; j < Ae.outerSize(); ++j)
            for (SpMat::InnerIterator it(Ae, j); it; ++it) t.emplace_back(P.n + it.row(), j, it.value());
        for (int i = 0; i < P.me; ++i) t.emplace_back(P.n + i, P.n + i, -1.0 / rho[i]);
        SpMat K(P.n + P.me, P.n + P.me);
        K.setFromTriplets(t.begin(), t.end());
        if (ldlt.rows() == 0) ldlt.analyzePattern(K);
        ldlt.factorize(K);
        ok = ldlt.info() == Eigen::Success;
    }
};

}  // namespace

RelaxationSolution solve_sdp(const ConicProgram& prog, const SolverConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const SolverConfig cfg = config.with_defaults(true);
    if (prog.N > cfg.max_n)
        throw Error(ErrorKind::ResourceLimit, "N = " + std::to_string(prog.N) + " exceeds the configured cap " +
                                                  std::to_string(cfg.max_n));
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    detail::StandardForm sf = detail::lower(prog, true);
    RelaxationSolution sol;
    sol.kind = prog.kind;
    auto finish = [&](const Eigen::VectorXd& xr) {
        sol.v = sf.expand(xr);
        unpack_blocks(prog, sol);
        sol.objective = prog.eval_objective(sol.v);
        sol.residuals.primal = check_feasibility(prog, sol.v).max_violation;
        sol.seconds = elapsed();
        return sol;
    };
    if (sf.infeasible) {
        sol.status = SolveStatus::Infeasible;
        return finish(Eigen::VectorXd::Zero(sf.n));
    }

    Problem P;
    P.n = sf.n;
    P.me = static_cast<int>(sf.Aeq.rows());
    P.nn = sf.n_nonneg;
    P.m = P.me + static_cast<int>(sf.Ac.rows());
    P.psd_orders = sf.psd_orders;
    int start = P.me + P.nn;
    for (int o : P.psd_orders) {
        P.psd_start.push_back(start);
        start += o * (o + 1) / 2;
    }
    {
        SpMat A(P.m, P.n);
        std::vector<Eigen::Triplet<double>> t;
        for (int j = 0; j < sf.Aeq.outerSize(); ++j)
            for (SpMat::InnerIterator it(sf.Aeq, j); it; ++it) t.emplace_back(it.row(), j, it.value());
        for (int j = 0; j < sf.Ac.outerSize(); ++j)
            for (SpMat::InnerIterator it(sf.Ac, j); it; ++it) t.emplace_back(P.me + it.row(), j, -it.value());
        A.setFromTriplets(t.begin(), t.end());
        P.A = A;
        P.b.resize(P.m);
        P.b << sf.beq, sf.ac;
        P.q = sf.c;
    }
    const Eigen::VectorXd b_orig = P.b, q_orig = P.q;
    const SpMat A_orig = P.A;
    const Scaling sc = equilibrate(P, cfg.scaling);
    const SpMat At = P.A.transpose();

    double rho_base = 0.1;
    Eigen::VectorXd rho(P.m);
    auto set_rho = [&](double r) {
        rho_base = r;
        rho.head(P.me).setConstant(kEqRhoFactor * r);
        rho.tail(P.m - P.me).setConstant(r);
    };
    set_rho(rho_base);
    Kkt kkt(P);
    kkt.factor(rho);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(P.n), s = Eigen::VectorXd::Zero(P.m), y = Eigen::VectorXd::Zero(P.m);
    Eigen::VectorXd xt(P.n), st(P.m), shat(P.m), r(P.m), rhs(P.n + P.me), Ax(P.m);
    std::vector<Eigen::MatrixXd> work;
    for (int o : P.psd_orders) work.emplace_back(o, o);
    const auto& kern = kern::active();
    const int mc = P.m - P.me;

    const double nb = b_orig.size() ? b_orig.lpNorm<Eigen::Infinity>() : 0.0;
    const double nq = q_orig.size() ? q_orig.lpNorm<Eigen::Infinity>() : 0.0;
    sol.status = SolveStatus::MaxIterations;
    const double eps = cfg.tol_feas, eps_gap = cfg.tol_gap;

    int it = 0;
    for (; it < cfg.max_iters; ++it) {
        // linear system
        r = P.b - s + y.cwiseQuotient(rho);
        rhs.head(P.n) = kSigma * x - P.q;
        if (mc > 0) rhs.head(P.n) += kkt.Act * rho.tail(mc).cwiseProduct(r.tail(mc));
        if (P.me > 0) rhs.tail(P.me) = r.head(P.me);
        Eigen::VectorXd u = kkt.ldlt.solve(rhs);
        xt = u.head(P.n);
        Ax = P.A * xt;
        // s~ = s - (nu + y)/rho with nu = rho (A x~ - r) on cone rows and nu = u_e on equality rows
        st = s - y.cwiseQuotient(rho);
        if (mc > 0) st.tail(mc) -= Ax.tail(mc) - r.tail(mc);
        if (P.me > 0) st.head(P.me) -= u.tail(P.me).cwiseQuotient(rho.head(P.me));

        x = kAlpha * xt + (1.0 - kAlpha) * x;
        shat = kAlpha * st + (1.0 - kAlpha) * s;

        // projections and multiplier update
        for (int i = 0; i < P.me; ++i) {
            y[i] += rho[i] * shat[i];
            s[i] = 0.0;
        }
        kern.nonneg_step(shat.data() + P.me, y.data() + P.me, s.data() + P.me, rho.data() + P.me, P.nn);
        for (std::size_t k = 0; k < P.psd_orders.size(); ++k) {
            int o = P.psd_orders[k], len = o * (o + 1) / 2, st0 = P.psd_start[k];
            Eigen::VectorXd w = shat.segment(st0, len) + y.segment(st0, len).cwiseQuotient(rho.segment(st0, len));
            Eigen::VectorXd pw = w;
            project_psd(pw.data(), o, work[k]);
            s.segment(st0, len) = pw;
            y.segment(st0, len) = rho.segment(st0, len).cwiseProduct(w - pw);
        }

        const bool check = (it % 10 == 0) || it == cfg.max_iters - 1;
        if (!check) continue;

        // residuals in the original scale; the multiplier of "s in K" is -y
        Eigen::VectorXd xu = sc.D.cwiseProduct(x);
        Eigen::VectorXd su = s.cwiseQuotient(sc.E);
        Eigen::VectorXd yu = sc.E.cwiseProduct(y) / sc.c;
        Eigen::VectorXd Axu = A_orig * xu;
        Eigen::VectorXd Atyu = A_orig.transpose() * yu;
        double rp = (Axu + su - b_orig).lpNorm<Eigen::Infinity>();
        double rd = P.n ? (q_orig - Atyu).lpNorm<Eigen::Infinity>() : 0.0;
        double pobj = q_orig.dot(xu), dobj = b_orig.dot(yu);
        double ap = std::max({Axu.lpNorm<Eigen::Infinity>(), su.lpNorm<Eigen::Infinity>(), nb});
        double ad = std::max(Atyu.lpNorm<Eigen::Infinity>(), nq);
        double gap = std::fabs(pobj - dobj);
        sol.residuals.dual = rd / (1.0 + ad);
        sol.residuals.gap = gap / (1.0 + std::fabs(pobj) + std::fabs(dobj));
        sol.dual_objective = dobj + sf.c0;
        sol.iterations = it + 1;
        if (cfg.log && it % 100 == 0)
            *cfg.log << "admm " << it << ' ' << rp / (1.0 + ap) << ' ' << rd / (1.0 + ad) << ' '
                     << sol.residuals.gap << ' ' << pobj + sf.c0 << ' ' << rho_base << '\n';
        if (rp <= eps * (1.0 + ap) && rd <= eps * (1.0 + ad) &&
            gap <= eps_gap * (1.0 + std::fabs(pobj) + std::fabs(dobj))) {
            sol.status = SolveStatus::Optimal;
            break;
        }
        if (!std::isfinite(rp) || !std::isfinite(rd)) {
            sol.status = SolveStatus::NumericalFailure;
            break;
        }
        if (cfg.time_budget > 0.0 && elapsed() > cfg.time_budget) {
            sol.status = SolveStatus::TimeLimit;
            break;
        }

        // step-size adaptation on the scaled residuals
        if (it > 0 && it % 50 == 0) {
            Eigen::VectorXd Axs = P.A * x, Aty = At * y;
            double sp = (Axs + s - P.b).lpNorm<Eigen::Infinity>() /
                        std::max({Axs.lpNorm<Eigen::Infinity>(), s.lpNorm<Eigen::Infinity>(),
                                  P.b.lpNorm<Eigen::Infinity>(), 1e-12});
            double sd = (P.q - Aty).lpNorm<Eigen::Infinity>() /
                        std::max({Aty.lpNorm<Eigen::Infinity>(), P.q.lpNorm<Eigen::Infinity>(), 1e-12});
            double ratio = std::sqrt(sp / std::max(sd, 1e-300));
            double nr = std::min(1e6, std::max(1e-6, rho_base * ratio));
            if (nr > 5.0 * rho_base || nr < rho_base / 5.0) {
                // y is kept; s and x carry over unchanged
                set_rho(nr);
                kkt.factor(rho);
                if (!kkt.ok) {
                    sol.status = SolveStatus::NumericalFailure;
                    break;
                }
            }
        }
    }
    (void)kern;
    return finish(sc.D.cwiseProduct(x));
}

}  // namespace cckm
