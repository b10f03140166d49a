// Homogeneous self-dual interior point method with Mehrotra predictor-corrector.
//   min c'x  s.t.  A x = b,  G x + s = h,  s >= 0
// Newton systems are reduced to the quasi-definite matrix
//   [ G' W^-2 G + reg   A'  ]
//   [ A                -reg ]
// and factored with a sparse LDL' (AMD ordering), followed by iterative refinement.
#include "cckm/solvers.hpp"

#include "standard_form.hpp"

#include <Eigen/SparseCholesky>

#include <chrono>
#include <cmath>
#include <limits>

namespace cckm {

using detail::SpMat;

SolverConfig SolverConfig::with_defaults(bool sdp) const {
    SolverConfig c = *this;
    if (c.tol_feas <= 0.0) c.tol_feas = sdp ? 1e-6 : 1e-8;
    if (c.tol_gap <= 0.0) c.tol_gap = c.tol_feas;
    if (c.max_iters <= 0) c.max_iters = sdp ? 20000 : 200;
    return c;
}

namespace {

constexpr double kReg = 1e-9;

struct KktSolver {
    const SpMat& A;
    const SpMat& G;
    SpMat Gt;
    SpMat At;
    Eigen::VectorXd w;  // z ./ s
    SpMat H;            // G' diag(w) G, unregularized
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt;
    int n, me;
    bool ok = true;

    KktSolver(const SpMat& A_, const SpMat& G_) : A(A_), G(G_), Gt(G_.transpose()), At(A_.transpose()) {
        n = static_cast<int>(G.cols());
        me = static_cast<int>(A.rows());
    }

    // Starts at the weakest regularization; stronger() refactors after a vanished pivot
    // or a non-finite solve. Refinement in solve() works against the unregularized system.
    double reg = kReg;
    void factor(const Eigen::VectorXd& wv) {
        for (reg = kReg; reg <= 1e-4; reg *= 100.0) {
            factor(wv, reg);
            if (ok) return;
        }
    }
    bool stronger() {
        for (reg *= 100.0; reg <= 1e-4; reg *= 100.0) {
            factor(w, reg);
            if (ok) return true;
        }
        ok = false;
        return false;
    }

    void factor(const Eigen::VectorXd& wv, double reg) {
        w = wv;
        SpMat WG = w.asDiagonal() * G;
        H = Gt * WG;
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(H.nonZeros() + A.nonZeros() + n + me);
        for (int j = 0; j < H.outerSize(); ++j)
            for (SpMat::InnerIterator it(H, j); it; ++it)
                if (it.row() >= j) t.emplace_back(it.row(), j, it.value());
        for (int j = 0; j < n; ++j) t.emplace_back(j, j, reg);
        for (int j = 0; j < A.outerSize(); ++j)
            for (SpMat::InnerIterator it(A, j); it; ++it) t.emplace_back(n + it.row(), j, it.value());
        for (int i = 0; i < me; ++i) t.emplace_back(n + i, n + i, -reg);
        SpMat K(n + me, n + me);
        K.setFromTriplets(t.begin(), t.end());
        ldlt.compute(K);
        ok = ldlt.info() == Eigen::Success;
    }

    Eigen::VectorXd apply_reduced(const Eigen::VectorXd& u) const {
        Eigen::VectorXd out(n + me);
        out.head(n) = H * u.head(n);
        if (me > 0) {
            out.head(n) += At * u.tail(me);
            out.tail(me) = A * u.head(n);
        }
        return out;
    }

    // Solves [0 A' G'; A 0 0; G 0 -W^2] (dx, dy, dz) = (r1, r2, r3).
    void solve(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, const Eigen::VectorXd& r3, Eigen::VectorXd& dx,
               Eigen::VectorXd& dy, Eigen::VectorXd& dz) const {
        Eigen::VectorXd rhs(n + me);
        rhs.head(n) = r1 + Gt * w.cwiseProduct(r3);
        if (me > 0) rhs.tail(me) = r2;
        Eigen::VectorXd u = ldlt.solve(rhs);
        // Refinement can diverge when A is rank deficient; keep only improving steps.
        Eigen::VectorXd res = rhs - apply_reduced(u);
        double rn = res.lpNorm<Eigen::Infinity>();
        for (int k = 0; k < 5 && rn > 1e-14 * (1.0 + rhs.lpNorm<Eigen::Infinity>()); ++k) {
            Eigen::VectorXd u2 = u + ldlt.solve(res);
            Eigen::VectorXd res2 = rhs - apply_reduced(u2);
            const double rn2 = res2.lpNorm<Eigen::Infinity>();
            if (!(rn2 < rn)) break;
            u.swap(u2);
            res.swap(res2);
            rn = rn2;
        }
        dx = u.head(n);
        dy = u.tail(me);
        dz = w.cwiseProduct(G * dx - r3);
    }
};

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
    double a = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
    return a;
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

}  // namespace

RelaxationSolution solve_lp(const ConicProgram& prog, const SolverConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const SolverConfig cfg = config.with_defaults(false);
    if (prog.has_psd()) throw Error(ErrorKind::InvalidInput, "solve_lp called on a program with PSD constraints");
    if (prog.N > cfg.max_n)
        throw Error(ErrorKind::ResourceLimit, "N = " + std::to_string(prog.N) + " exceeds the configured cap " +
                                                  std::to_string(cfg.max_n));

    detail::StandardForm sf = detail::lower(prog, true);
    RelaxationSolution sol;
    sol.kind = prog.kind;
    auto finish = [&](const Eigen::VectorXd& xr) {
        sol.v = sf.expand(xr);
        unpack_blocks(prog, sol);
        sol.objective = prog.eval_objective(sol.v);
        sol.residuals.primal = check_feasibility(prog, sol.v).max_violation;
        sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return sol;
    };
    if (sf.infeasible) {
        sol.status = SolveStatus::Infeasible;
        return finish(Eigen::VectorXd::Zero(sf.n));
    }

    const SpMat& A = sf.Aeq;
    const Eigen::VectorXd& b = sf.beq;
    const SpMat G = -sf.Ac;
    const Eigen::VectorXd& h = sf.ac;
    const Eigen::VectorXd& c = sf.c;
    const int n = sf.n, me = static_cast<int>(A.rows()), m = static_cast<int>(G.rows());

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n), y = Eigen::VectorXd::Zero(me);
    Eigen::VectorXd s = Eigen::VectorXd::Ones(m), z = Eigen::VectorXd::Ones(m);
    double tau = 1.0, kappa = 1.0;

    KktSolver kkt(A, G);
    const double nb = std::max(inf_norm(b), inf_norm(h)), nc = inf_norm(c);
    Eigen::VectorXd best_x = x;
    double best_merit = std::numeric_limits<double>::infinity();
    sol.status = SolveStatus::MaxIterations;

    for (int it = 0;; ++it) {
        Eigen::VectorXd F1 = c * tau, F2 = b * tau - A * x, F3 = h * tau - G * x - s;
        if (me > 0) F1 += A.transpose() * y;
        if (m > 0) F1 += G.transpose() * z;
        const double cx = c.dot(x), by = b.dot(y), hz = h.dot(z);
        const double F4 = -cx - by - hz - kappa;
        const double mu = (s.dot(z) + tau * kappa) / (m + 1);

        // iterate quality in the original scale
        Eigen::VectorXd xs = x / tau;
        Eigen::VectorXd rp_eq = me > 0 ? Eigen::VectorXd(A * xs - b) : Eigen::VectorXd();
        Eigen::VectorXd rp_in = G * xs + s / tau - h;
        Eigen::VectorXd rd = c;
        if (me > 0) rd += A.transpose() * (y / tau);
        if (m > 0) rd += G.transpose() * (z / tau);
        const double pres = std::max(inf_norm(rp_eq), inf_norm(rp_in)) / (1.0 + nb);
        const double dres = inf_norm(rd) / (1.0 + nc);
        const double pobj = cx / tau, dobj = (-by - hz) / tau;
        const double gap = std::fabs(pobj - dobj) / (1.0 + std::fabs(pobj));
        sol.iterations = it;
        sol.residuals.dual = dres;
        sol.residuals.gap = gap;
        sol.dual_objective = dobj + sf.c0;
        double merit = std::max({pres, dres, gap});
        if (merit < best_merit) {
            best_merit = merit;
            best_x = xs;
        }
        if (cfg.log)
            *cfg.log << "ipm " << it << ' ' << pres << ' ' << dres << ' ' << gap << ' ' << pobj + sf.c0 << '\n';
        if (pres <= cfg.tol_feas && dres <= cfg.tol_feas && gap <= cfg.tol_gap) {
            sol.status = SolveStatus::Optimal;
            return finish(xs);
        }
        // infeasibility certificates of the embedding
        if (by + hz < 0.0) {
            Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
            if (me > 0) r += A.transpose() * y;
            if (m > 0) r += G.transpose() * z;
            if (inf_norm(r) <= cfg.tol_feas * -(by + hz) && tau < 1e-6 * kappa) {
                sol.status = SolveStatus::Infeasible;
                return finish(best_x);
            }
        }
        if (cx < 0.0) {
            double r = std::max(me > 0 ? inf_norm(A * x) : 0.0, inf_norm(G * x + s));
            if (r <= cfg.tol_feas * -cx && tau < 1e-6 * kappa) {
                sol.status = SolveStatus::Unbounded;
                return finish(best_x);
            }
        }
        if (it >= cfg.max_iters) break;
        if (cfg.time_budget > 0.0 &&
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() > cfg.time_budget) {
            sol.status = SolveStatus::TimeLimit;
            break;
        }

        kkt.factor(z.cwiseQuotient(s));
        if (!kkt.ok) {
            sol.status = SolveStatus::NumericalFailure;
            break;
        }
        Eigen::VectorXd dx1, dy1, dz1;
        kkt.solve(-c, b, h, dx1, dy1, dz1);
        while (!dx1.allFinite() || !dz1.allFinite()) {
            if (!kkt.stronger()) break;
            kkt.solve(-c, b, h, dx1, dy1, dz1);
        }
        if (!kkt.ok || !dx1.allFinite()) {
            sol.status = SolveStatus::NumericalFailure;
            break;
        }
        const double den = kappa / tau - c.dot(dx1) - b.dot(dy1) - h.dot(dz1);

        auto direction = [&](double eta, const Eigen::VectorXd& ds_rhs, double dk_rhs, Eigen::VectorXd& dx,
                             Eigen::VectorXd& dy, Eigen::VectorXd& dz, Eigen::VectorXd& ds, double& dtau,
                             double& dkappa) {
            Eigen::VectorXd r3 = eta * F3 - ds_rhs.cwiseQuotient(z);
            Eigen::VectorXd dx2, dy2, dz2;
            kkt.solve(-eta * F1, eta * F2, r3, dx2, dy2, dz2);
            dtau = (-eta * F4 + dk_rhs / tau + c.dot(dx2) + b.dot(dy2) + h.dot(dz2)) / den;
            dx = dx2 + dtau * dx1;
            dy = dy2 + dtau * dy1;
            dz = dz2 + dtau * dz1;
            ds = (ds_rhs - s.cwiseProduct(dz)).cwiseQuotient(z);
            dkappa = (dk_rhs - kappa * dtau) / tau;
        };
        auto step_len = [&](const Eigen::VectorXd& ds, const Eigen::VectorXd& dz, double dtau, double dkappa) {
            double a = std::min(max_step(s, ds), max_step(z, dz));
            if (dtau < 0.0) a = std::min(a, -tau / dtau);
            if (dkappa < 0.0) a = std::min(a, -kappa / dkappa);
            return a;
        };

        Eigen::VectorXd dxa, dya, dza, dsa;
        double dta, dka;
        Eigen::VectorXd sz = s.cwiseProduct(z);
        direction(1.0, -sz, -tau * kappa, dxa, dya, dza, dsa, dta, dka);
        double aa = std::min(1.0, step_len(dsa, dza, dta, dka));
        double sigma = std::pow(1.0 - aa, 3);

        Eigen::VectorXd ds_rhs = -sz - dsa.cwiseProduct(dza);
        ds_rhs.array() += sigma * mu;
        double dk_rhs = -tau * kappa + sigma * mu - dta * dka;
        Eigen::VectorXd dx, dy, dz, ds;
        double dt, dk;
        direction(1.0 - sigma, ds_rhs, dk_rhs, dx, dy, dz, ds, dt, dk);
        double alpha = std::min(1.0, 0.99 * step_len(ds, dz, dt, dk));
        if (!(alpha > 0.0) || !std::isfinite(alpha) || !dx.allFinite() || !dz.allFinite() || !std::isfinite(dt)) {
            sol.status = SolveStatus::NumericalFailure;
            break;
        }
        x += alpha * dx;
        y += alpha * dy;
        z += alpha * dz;
        s += alpha * ds;
        tau += alpha * dt;
        kappa += alpha * dk;
    }
    return finish(best_x);
}

RelaxationSolution solve(const ConicProgram& p, const SolverConfig& cfg) {
    return p.has_psd() ? solve_sdp(p, cfg) : solve_lp(p, cfg);
}

}  // namespace cckm
