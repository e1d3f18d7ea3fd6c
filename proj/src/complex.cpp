#include "opalg/complex.hpp"

#include <algorithm>

namespace opalg {

FiniteComplex::FiniteComplex(const Field& F, int lo, int hi, Grading g)
    : F_(F), lo_(lo), hi_(hi), grading_(g) {
    if (hi < lo) throw MathError("empty degree range");
}

void FiniteComplex::set_dim(int deg, int n) {
    if (deg < lo_ || deg > hi_) throw MathError("degree outside complex range");
    if (n < 0) throw MathError("negative dimension");
    dims_[deg] = n;
}

int FiniteComplex::dim(int deg) const {
    auto it = dims_.find(deg);
    return it == dims_.end() ? 0 : it->second;
}

void FiniteComplex::set_diff(int deg, SparseMatrix d) {
    int tgt = deg + step();
    if (d.cols() != dim(deg) || d.rows() != dim(tgt))
        throw MathError("differential shape does not match dimensions in degree " + std::to_string(deg));
    if ((tgt < lo_ || tgt > hi_) && !d.is_zero())
        throw MathError("differential leaves the degree range");
    diffs_[deg] = std::move(d);
}

const SparseMatrix& FiniteComplex::diff(int deg) const {
    auto it = diffs_.find(deg);
    if (it != diffs_.end() && it->second.cols() == dim(deg) && it->second.rows() == dim(deg + step()))
        return it->second;
    diffs_[deg] = SparseMatrix(dim(deg + step()), dim(deg));
    return diffs_[deg];
}

void FiniteComplex::validate() const {
    for (auto& [deg, d] : diffs_) {
        if (d.cols() != dim(deg) || d.rows() != dim(deg + step()))
            throw MathError("differential shape mismatch in degree " + std::to_string(deg));
    }
    for (int deg = lo_; deg <= hi_; ++deg) {
        const SparseMatrix& d1 = diff(deg);
        const SparseMatrix& d2 = diff(deg + step());
        if (d1.cols() == 0 || d2.cols() == 0) continue;
        if (!d2.multiply(d1, F_).is_zero())
            throw MathError("d o d != 0 starting in degree " + std::to_string(deg));
    }
}

std::map<int, int> FiniteComplex::homology() const {
    validate();
    std::vector<int> degs;
    for (int d = lo_ - 1; d <= hi_ + 1; ++d) degs.push_back(d);
    std::vector<int> ranks(degs.size(), 0);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(degs.size()); ++i) {
        const SparseMatrix& d = diffs_.count(degs[i]) ? diffs_.at(degs[i]) : SparseMatrix();
        ranks[i] = (d.rows() == 0 || d.cols() == 0) ? 0 : rank(d, F_);
    }
    std::map<int, int> r;
    for (std::size_t i = 0; i < degs.size(); ++i) r[degs[i]] = ranks[i];
    std::map<int, int> h;
    for (int d = lo_; d <= hi_; ++d) h[d] = dim(d) - r[d] - r[d - step()];
    return h;
}

long long FiniteComplex::euler_characteristic() const {
    long long e = 0;
    for (int d = lo_; d <= hi_; ++d) e += ((d % 2 == 0) ? 1 : -1) * static_cast<long long>(dim(d));
    return e;
}

long long FiniteComplex::homology_euler_characteristic() const {
    long long e = 0;
    for (auto& [d, n] : homology()) e += ((d % 2 == 0) ? 1 : -1) * static_cast<long long>(n);
    return e;
}

FiniteComplex sphere_complex(const Field& F, int n, Grading g) {
    FiniteComplex C(F, n, n, g);
    C.set_dim(n, 1);
    return C;
}

FiniteComplex disk_complex(const Field& F, int n, Grading g) {
    // Two cells in degrees n and n-1 (homological) joined by the identity.
    int a = g == Grading::Homological ? n : n - 1;
    int b = g == Grading::Homological ? n - 1 : n;
    FiniteComplex C(F, std::min(a, b), std::max(a, b), g);
    C.set_dim(a, 1);
    C.set_dim(b, 1);
    C.set_diff(a, SparseMatrix::identity(1));
    return C;
}

FiniteComplex direct_sum(const FiniteComplex& A, const FiniteComplex& B) {
    if (A.grading() != B.grading() || !(A.field() == B.field()))
        throw MathError("direct sum of incompatible complexes");
    FiniteComplex S(A.field(), std::min(A.lo(), B.lo()), std::max(A.hi(), B.hi()), A.grading());
    for (int d = S.lo(); d <= S.hi(); ++d) S.set_dim(d, A.dim(d) + B.dim(d));
    for (int d = S.lo(); d <= S.hi(); ++d) {
        int t = d + S.step();
        SparseMatrix M(S.dim(t), S.dim(d));
        const SparseMatrix& da = A.diff(d);
        const SparseMatrix& db = B.diff(d);
        for (int c = 0; c < da.cols(); ++c) M.set_col(c, da.col(c));
        for (int c = 0; c < db.cols(); ++c) {
            SparseVec v;
            for (auto& [r, x] : db.col(c)) v.emplace_back(r + A.dim(t), x);
            M.set_col(A.dim(d) + c, v);
        }
        if (S.dim(t) > 0 || S.dim(d) > 0) S.set_diff(d, M);
    }
    return S;
}

SparseMatrix ChainMap::at(int deg) const {
    auto it = maps.find(deg);
    if (it != maps.end()) return it->second;
    return SparseMatrix(target->dim(deg), source->dim(deg));
}

bool is_chain_map(const ChainMap& f) {
    const FiniteComplex& C = *f.source;
    const FiniteComplex& D = *f.target;
    const Field& F = C.field();
    for (auto& [deg, m] : f.maps)
        if (m.rows() != D.dim(deg) || m.cols() != C.dim(deg)) return false;
    int lo = std::min(C.lo(), D.lo()) - 1, hi = std::max(C.hi(), D.hi()) + 1;
    for (int deg = lo; deg <= hi; ++deg) {
        int t = deg + C.step();
        if (C.dim(deg) == 0) continue;
        SparseMatrix lhs = f.at(t).multiply(C.diff(deg), F);
        SparseMatrix rhs = D.diff(deg).multiply(f.at(deg), F);
        if (!(lhs.added(rhs, F.neg(1), F).is_zero())) return false;
    }
    return true;
}

std::vector<SparseVec> cycles(const FiniteComplex& C, int deg) {
    const SparseMatrix& d = C.diff(deg);
    if (d.rows() == 0) {
        std::vector<SparseVec> all;
        for (int i = 0; i < C.dim(deg); ++i) all.push_back({{i, 1}});
        return all;
    }
    return kernel_basis(d, C.field());
}

std::vector<SparseVec> boundaries(const FiniteComplex& C, int deg) {
    const SparseMatrix& d = C.diff(deg - C.step());
    std::vector<SparseVec> out;
    for (int c = 0; c < d.cols(); ++c)
        if (!d.col(c).empty()) out.push_back(d.col(c));
    return out;
}

int induced_rank(const ChainMap& f, int deg) {
    const Field& F = f.source->field();
    ColumnReducer red(F, false);
    for (auto& b : boundaries(*f.target, deg)) red.add(b);
    int base = red.rank();
    SparseMatrix m = f.at(deg);
    for (auto& z : cycles(*f.source, deg)) red.add(m.apply(z, F));
    return red.rank() - base;
}

bool is_quasi_iso(const ChainMap& f) {
    if (!is_chain_map(f)) throw MathError("map does not commute with the differentials");
    auto hs = f.source->homology();
    auto ht = f.target->homology();
    int lo = std::min(f.source->lo(), f.target->lo()), hi = std::max(f.source->hi(), f.target->hi());
    for (int deg = lo; deg <= hi; ++deg) {
        int a = hs.count(deg) ? hs[deg] : 0;
        int b = ht.count(deg) ? ht[deg] : 0;
        if (a != b) return false;
        if (a == 0) continue;
        if (induced_rank(f, deg) != a) return false;
    }
    return true;
}

}  // namespace opalg
