#include "cckm/sdpa.hpp"

#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

namespace cckm {

namespace {

const char* cone_name(Cone c) {
    switch (c) {
        case Cone::Zero: return "zero";
        case Cone::NonNeg: return "nonneg";
        case Cone::Psd: return "psd";
    }
    return "?";
}

// Merged coefficients of one row, keyed by variable.
std::map<int, double> merged(const AffineRow& r) {
    std::map<int, double> m;
    for (auto [v, c] : r.terms) m[v] += c;
    return m;
}

struct Entry {
    int mat, blk, i, j;
    double val;
};

}  // namespace

void write_sdpa(std::ostream& os, const ConicProgram& p) {
    // Block 1 is diagonal and collects equality pairs and nonnegative rows.
    std::vector<const AffineRow*> diag_rows;
    std::vector<double> diag_sign;
    std::vector<const ConstraintFamily*> psd;
    for (const auto& f : p.families) {
        if (f.cone == Cone::Psd) {
            psd.push_back(&f);
            continue;
        }
        for (const auto& r : f.rows) {
            diag_rows.push_back(&r);
            diag_sign.push_back(1.0);
            if (f.cone == Cone::Zero) {
                diag_rows.push_back(&r);
                diag_sign.push_back(-1.0);
            }
        }
    }
    std::vector<Entry> entries;
    auto emit_row = [&](const AffineRow& r, double sign, int blk, int i, int j) {
        // row(v) = constant + sum coef v  ==  sum F_m v_m - F_0
        if (r.constant != 0.0) entries.push_back({0, blk, i, j, -sign * r.constant});
        for (auto [v, c] : merged(r))
            if (c != 0.0) entries.push_back({v + 1, blk, i, j, sign * c});
    };
    int blk = 0;
    if (!diag_rows.empty()) {
        ++blk;
        for (std::size_t t = 0; t < diag_rows.size(); ++t)
            emit_row(*diag_rows[t], diag_sign[t], blk, static_cast<int>(t) + 1, static_cast<int>(t) + 1);
    }
    for (const auto* f : psd) {
        ++blk;
        for (int j = 0; j < f->psd_order; ++j)
            for (int i = 0; i <= j; ++i) emit_row(f->rows[packed_index(i, j)], 1.0, blk, i + 1, j + 1);
    }

    os << std::setprecision(17);
    os << "* relaxation " << kind_name(p.kind) << " N=" << p.N << "\n";
    os << "* objective_constant " << p.objective_constant << "\n";
    os << p.num_vars << "\n" << blk << "\n";
    if (!diag_rows.empty()) os << -static_cast<long>(diag_rows.size()) << (psd.empty() ? "" : " ");
    for (std::size_t t = 0; t < psd.size(); ++t) os << psd[t]->psd_order << (t + 1 < psd.size() ? " " : "");
    os << "\n";
    for (int v = 0; v < p.num_vars; ++v) os << p.objective[v] << (v + 1 < p.num_vars ? " " : "\n");
    for (const auto& e : entries) os << e.mat << " " << e.blk << " " << e.i << " " << e.j << " " << e.val << "\n";
}

ConicProgram read_sdpa(std::istream& is) {
    std::string line;
    double obj_const = 0.0;
    std::vector<std::string> body;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '*' || line[0] == '"') {
            std::istringstream c(line.substr(1));
            std::string key;
            c >> key;
            if (key == "objective_constant") c >> obj_const;
            continue;
        }
        for (char& ch : line)
            if (ch == ',' || ch == '(' || ch == ')' || ch == '{' || ch == '}') ch = ' ';
        body.push_back(line);
    }
    std::istringstream in([&] {
        std::string all;
        for (const auto& b : body) all += b + "\n";
        return all;
    }());
    int m = 0, nblocks = 0;
    if (!(in >> m >> nblocks) || m < 0 || nblocks < 0) throw Error(ErrorKind::Ingest, "SDPA: bad header");
    std::vector<long> sizes(nblocks);
    for (auto& s : sizes)
        if (!(in >> s) || s == 0) throw Error(ErrorKind::Ingest, "SDPA: bad block structure");

    ConicProgram p;
    p.add_vector_block("x", m);
    p.objective = Eigen::VectorXd::Zero(m);
    p.objective_constant = obj_const;
    for (int v = 0; v < m; ++v)
        if (!(in >> p.objective[v])) throw Error(ErrorKind::Ingest, "SDPA: bad objective vector");
    std::vector<ConstraintFamily*> fam(nblocks);
    for (int b = 0; b < nblocks; ++b) {
        const std::string name = "block" + std::to_string(b + 1);
        if (sizes[b] < 0) {
            fam[b] = &p.add_family(name, Cone::NonNeg);
            fam[b]->rows.resize(-sizes[b]);
        } else {
            fam[b] = &p.add_family(name, Cone::Psd, static_cast<int>(sizes[b]));
            fam[b]->rows.resize(packed_size(static_cast<int>(sizes[b])));
        }
    }
    int mat, blk, i, j;
    double val;
    while (in >> mat >> blk >> i >> j >> val) {
        if (mat < 0 || mat > m || blk < 1 || blk > nblocks) throw Error(ErrorKind::Ingest, "SDPA: entry out of range");
        const long n = std::labs(sizes[blk - 1]);
        if (i < 1 || j < 1 || i > n || j > n) throw Error(ErrorKind::Ingest, "SDPA: entry index out of range");
        if (sizes[blk - 1] < 0 && i != j) throw Error(ErrorKind::Ingest, "SDPA: off-diagonal entry in diagonal block");
        AffineRow& r = sizes[blk - 1] < 0 ? fam[blk - 1]->rows[i - 1] : fam[blk - 1]->rows[packed_index(i - 1, j - 1)];
        if (mat == 0)
            r.shift(-val);
        else
            r.add(mat - 1, val);
    }
    if (!in.eof()) throw Error(ErrorKind::Ingest, "SDPA: malformed entry line");
    return p;
}

void dump_text(std::ostream& os, const ConicProgram& p) {
    os << std::setprecision(17);
    os << "program " << kind_name(p.kind) << " N " << p.N << " vars " << p.num_vars << " rows " << p.num_rows()
       << "\n";
    os << "spec";
    for (int n : p.spec.sizes) os << " " << n;
    os << " outliers " << p.spec.outliers << "\n";
    for (const auto& b : p.blocks)
        os << "block " << b.name << " " << (b.type == Block::Type::Vector ? "vector" : "symmetric") << " dim "
           << b.dim << " offset " << b.offset << "\n";
    os << "objective constant " << p.objective_constant << "\n";
    for (int v = 0; v < p.num_vars; ++v)
        if (p.objective[v] != 0.0) os << "  v" << v << " " << p.objective[v] << "\n";
    for (const auto& f : p.families) {
        os << "family " << f.name << " " << cone_name(f.cone);
        if (f.cone == Cone::Psd) os << " order " << f.psd_order;
        os << " rows " << f.rows.size() << "\n";
        for (std::size_t r = 0; r < f.rows.size(); ++r) {
            os << "  " << r << " const " << f.rows[r].constant;
            for (auto [v, c] : merged(f.rows[r]))
                if (c != 0.0) os << " v" << v << "*" << c;
            os << "\n";
        }
    }
}

}  // namespace cckm
