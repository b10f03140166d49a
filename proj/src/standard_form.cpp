#include "standard_form.hpp"

#include <cmath>

namespace cckm::detail {

Eigen::VectorXd StandardForm::expand(const Eigen::VectorXd& v) const {
    Eigen::VectorXd full(column.size());
    for (std::size_t j = 0; j < column.size(); ++j) full[j] = column[j] >= 0 ? v[column[j]] : fixed_value[j];
    return full;
}

SpMat build_sparse(const std::vector<AffineRow>& rows, const std::vector<int>& column, int ncols) {
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (const auto& [j, c] : rows[r].terms)
            if (column[j] >= 0 && c != 0.0) trip.emplace_back(static_cast<int>(r), column[j], c);
    SpMat A(static_cast<int>(rows.size()), ncols);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    return A;
}

namespace {

// Folds fixed variables into the constant term.
AffineRow reduce(const AffineRow& r, const std::vector<int>& column, const std::vector<double>& fixed) {
    AffineRow out;
    out.constant = r.constant;
    for (const auto& [j, c] : r.terms) {
        if (column[j] < 0)
            out.constant += c * fixed[j];
        else
            out.terms.emplace_back(j, c);
    }
    return out;
}

}  // namespace

StandardForm lower(const ConicProgram& p, bool presolve) {
    StandardForm sf;
    const int nv = p.num_vars;
    std::vector<const AffineRow*> eq, nn;
    for (const auto& f : p.families) {
        if (f.cone == Cone::Zero)
            for (const auto& r : f.rows) eq.push_back(&r);
        else if (f.cone == Cone::NonNeg)
            for (const auto& r : f.rows) nn.push_back(&r);
    }

    sf.column.assign(nv, 0);
    sf.fixed_value.assign(nv, 0.0);
    std::vector<char> fixed(nv, 0);
    if (presolve) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const AffineRow* r : eq) {
                int free_var = -1, nfree = 0;
                double coef = 0.0, cst = r->constant;
                for (const auto& [j, c] : r->terms) {
                    if (c == 0.0) continue;
                    if (fixed[j]) {
                        cst += c * sf.fixed_value[j];
                    } else if (j == free_var) {
                        coef += c;
                    } else {
                        ++nfree;
                        free_var = j;
                        coef = c;
                    }
                }
                if (nfree == 1 && coef != 0.0) {
                    fixed[free_var] = 1;
                    sf.fixed_value[free_var] = -cst / coef;
                    changed = true;
                }
            }
        }
    }
    int n = 0;
    for (int j = 0; j < nv; ++j) sf.column[j] = fixed[j] ? -1 : n++;
    sf.n = n;

    sf.c = Eigen::VectorXd::Zero(n);
    sf.c0 = p.objective_constant;
    for (int j = 0; j < nv; ++j) {
        if (fixed[j])
            sf.c0 += p.objective[j] * sf.fixed_value[j];
        else
            sf.c[sf.column[j]] += p.objective[j];
    }

    auto feas_tol = [](const AffineRow& r) { return 1e-9 * (1.0 + std::fabs(r.constant)); };

    std::vector<AffineRow> eq_rows;
    for (const AffineRow* r : eq) {
        AffineRow q = reduce(*r, sf.column, sf.fixed_value);
        if (q.terms.empty()) {
            if (std::fabs(q.constant) > feas_tol(*r)) sf.infeasible = true;
            continue;
        }
        eq_rows.push_back(std::move(q));
    }
    std::vector<AffineRow> cone_rows;
    for (const AffineRow* r : nn) {
        AffineRow q = reduce(*r, sf.column, sf.fixed_value);
        if (q.terms.empty()) {
            if (q.constant < -feas_tol(*r)) sf.infeasible = true;
            continue;
        }
        cone_rows.push_back(std::move(q));
    }
    sf.n_nonneg = static_cast<int>(cone_rows.size());
    const double r2 = std::sqrt(2.0);
    for (const auto& f : p.families) {
        if (f.cone != Cone::Psd) continue;
        sf.psd_orders.push_back(f.psd_order);
        for (int j = 0; j < f.psd_order; ++j)
            for (int i = 0; i <= j; ++i) {
                AffineRow q = reduce(f.rows[packed_index(i, j)], sf.column, sf.fixed_value);
                if (i != j) {
                    q.constant *= r2;
                    for (auto& t : q.terms) t.second *= r2;
                }
                cone_rows.push_back(std::move(q));
            }
    }

    sf.Aeq = build_sparse(eq_rows, sf.column, n);
    sf.beq.resize(eq_rows.size());
    for (std::size_t r = 0; r < eq_rows.size(); ++r) sf.beq[r] = -eq_rows[r].constant;
    sf.Ac = build_sparse(cone_rows, sf.column, n);
    sf.ac.resize(cone_rows.size());
    for (std::size_t r = 0; r < cone_rows.size(); ++r) sf.ac[r] = cone_rows[r].constant;
    return sf;
}

}  // namespace cckm::detail
