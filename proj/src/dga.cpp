#include "opalg/dga.hpp"

#include <algorithm>
#include <memory>

namespace opalg {

FiniteDGA::FiniteDGA(const Field& F, std::vector<int> degrees) : F_(F), deg_(std::move(degrees)) {
    if (deg_.empty() || deg_[0] != 0) throw MathError("a DGA needs its unit as basis element 0 in degree 0");
    const int n = size();
    local_.assign(n, 0);
    std::map<int, int> count;
    for (int i = 0; i < n; ++i) local_[i] = count[deg_[i]]++;
    d_.assign(n, {});
    prod_.assign(static_cast<std::size_t>(n) * n, {});
    for (int i = 0; i < n; ++i) {
        prod_[i] = {{i, 1}};
        prod_[static_cast<std::size_t>(i) * n] = {{i, 1}};
    }
}

int FiniteDGA::min_degree() const { return *std::min_element(deg_.begin(), deg_.end()); }
int FiniteDGA::max_degree() const { return *std::max_element(deg_.begin(), deg_.end()); }

void FiniteDGA::set_d(int i, SparseVec v) {
    for (auto& [j, c] : v)
        if (deg_[j] != deg_[i] + 1) throw MathError("differential does not raise degree by one");
    d_[i] = std::move(v);
}

void FiniteDGA::set_product(int i, int j, SparseVec v) {
    for (auto& [t, c] : v)
        if (deg_[t] != deg_[i] + deg_[j]) throw MathError("product is not homogeneous");
    prod_[static_cast<std::size_t>(i) * size() + j] = std::move(v);
}

SparseVec FiniteDGA::apply_d(const SparseVec& x) const {
    SparseVec out;
    for (auto& [i, c] : x) axpy(out, c, d_[i], F_);
    return out;
}

SparseVec FiniteDGA::mul(const SparseVec& x, const SparseVec& y) const {
    SparseVec out;
    for (auto& [i, a] : x)
        for (auto& [j, b] : y) axpy(out, F_.mul(a, b), product(i, j), F_);
    return out;
}

bool FiniteDGA::d_is_zero() const {
    for (auto& v : d_)
        if (!v.empty()) return false;
    return true;
}

void FiniteDGA::validate() const {
    const int n = size();
    for (int i = 0; i < n; ++i) {
        if (!apply_d(d_[i]).empty()) throw MathError("d o d is not zero");
        if (mul(unit(), {{i, 1}}) != SparseVec{{i, 1}} || mul({{i, 1}}, unit()) != SparseVec{{i, 1}})
            throw MathError("unit law fails");
    }
    if (!d_[0].empty()) throw MathError("the unit is not a cocycle");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            SparseVec ij = product(i, j);
            SparseVec lhs = apply_d(ij);
            SparseVec rhs = mul(d_[i], {{j, 1}});
            axpy(rhs, F_.sign(deg_[i]), mul({{i, 1}}, d_[j]), F_);
            if (lhs != rhs) throw MathError("Leibniz rule fails");
            for (int k = 0; k < n; ++k)
                if (mul(ij, {{k, 1}}) != mul({{i, 1}}, product(j, k))) throw MathError("product is not associative");
        }
}

bool FiniteDGA::is_graded_commutative() const {
    for (int i = 0; i < size(); ++i)
        for (int j = 0; j < size(); ++j)
            if (product(i, j) != scaled(product(j, i), F_.sign(static_cast<long long>(deg_[i]) * deg_[j]), F_))
                return false;
    return true;
}

std::vector<int> FiniteDGA::basis_in_degree(int deg) const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (deg_[i] == deg) out.push_back(i);
    return out;
}

SparseVec FiniteDGA::to_global(int deg, const SparseVec& local) const {
    auto b = basis_in_degree(deg);
    SparseVec out;
    for (auto& [j, c] : local) out.push_back({b[j], c});
    std::sort(out.begin(), out.end());
    return out;
}

FiniteComplex FiniteDGA::complex() const {
    const int lo = min_degree(), hi = max_degree();
    FiniteComplex C(F_, lo, hi, Grading::Cohomological);
    for (int k = lo; k <= hi; ++k) C.set_dim(k, static_cast<int>(basis_in_degree(k).size()));
    for (int k = lo; k < hi; ++k) {
        SparseMatrix M(C.dim(k + 1), C.dim(k));
        for (int i : basis_in_degree(k))
            for (auto& [j, c] : d_[i]) M.set(local_[j], local_[i], c);
        C.set_diff(k, M);
    }
    return C;
}

FiniteDGA exterior_algebra(const Field& F, int n) {
    if (n < 1) throw MathError("exterior generator must have positive degree");
    FiniteDGA A(F, {0, n});
    A.set_product(1, 1, {});
    return A;
}

long long koszul_exponent(const Perm& s, const std::vector<int>& degrees) {
    long long e = 0;
    const int k = s.size();
    for (int a = 1; a <= k; ++a)
        for (int b = a + 1; b <= k; ++b)
            if (s(a) > s(b)) e += static_cast<long long>(degrees[s(a) - 1]) * degrees[s(b) - 1];
    return e;
}

EPlusAlgebra commutative_as_eplus(FiniteDGA A) {
    if (!A.is_graded_commutative()) throw MathError("algebra is not graded commutative");
    EPlusAlgebra E{std::move(A), {}};
    E.lambda = [alg = std::make_shared<FiniteDGA>(E.A)](const BEElement& x, const std::vector<int>& args) {
        const Field& F = alg->field();
        if (static_cast<int>(args.size()) != x.arity()) throw MathError("arity mismatch in evaluation");
        SparseVec out;
        if (x.arity() == 0) {
            for (auto& [s, c] : x.terms()) axpy(out, c, alg->unit(), F);
            return out;
        }
        const PermTable& T = PermTable::get(x.arity());
        std::vector<int> degs;
        for (int a : args) degs.push_back(alg->degree(a));
        for (auto& [s, c] : x.terms()) {
            if (s.size() != 1) continue;
            const Perm& p = T.perm(s[0]);
            SparseVec v = alg->unit();
            for (int j = 1; j <= p.size(); ++j) v = alg->mul(v, {{args[p(j) - 1], 1}});
            axpy(out, F.mul(c, F.sign(koszul_exponent(p, degs))), v, F);
        }
        return out;
    };
    return E;
}

FiniteComplex linear_dual(const FiniteComplex& C) {
    FiniteComplex D(C.field(), -C.hi(), -C.lo(), C.grading());
    for (int i = D.lo(); i <= D.hi(); ++i) D.set_dim(i, C.dim(-i));
    for (int i = D.lo(); i <= D.hi(); ++i) {
        int t = i + D.step();
        if (t < D.lo() || t > D.hi()) continue;
        // (D phi)(z) = phi(dz) for z in C_{-t}
        D.set_diff(i, C.diff(-t).transpose());
    }
    return D;
}

FiniteComplex shift(const FiniteComplex& C, int s) {
    FiniteComplex D(C.field(), C.lo() - s, C.hi() - s, C.grading());
    for (int i = D.lo(); i <= D.hi(); ++i) D.set_dim(i, C.dim(i + s));
    for (int i = D.lo(); i <= D.hi(); ++i) {
        int t = i + D.step();
        if (t < D.lo() || t > D.hi()) continue;
        D.set_diff(i, C.diff(i + s));
    }
    return D;
}

}  // namespace opalg
