#include "opalg/hochschild.hpp"

#include <algorithm>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace opalg {

namespace {

SparseVec basis_vec(int i) { return {{i, 1}}; }

int suspended_degree(const FiniteDGA& A, const std::vector<int>& w) {
    int s = 0;
    for (int a : w) s += A.degree(a) - 1;
    return s;
}

void add_term(BarChain& out, const BarTerm& t, Elt c, const Field& F) {
    if (c == 0) return;
    auto it = out.find(t);
    if (it == out.end()) {
        out.emplace(t, c);
        return;
    }
    it->second = F.add(it->second, c);
    if (it->second == 0) out.erase(it);
}

template <class Map, class Key>
void add_entry(Map& out, const Key& k, Elt c, const Field& F) {
    if (c == 0) return;
    auto it = out.find(k);
    if (it == out.end()) {
        out.emplace(k, c);
        return;
    }
    it->second = F.add(it->second, c);
    if (it->second == 0) out.erase(it);
}

void put(HCochain& f, int wid, const SparseVec& v, Elt c, const Field& F) {
    if (v.empty() || c == 0) return;
    SparseVec& slot = f.values[wid];
    axpy(slot, c, v, F);
    if (slot.empty()) f.values.erase(wid);
}

const SparseVec* value_at(const HCochain& f, int wid) {
    auto it = f.values.find(wid);
    return it == f.values.end() ? nullptr : &it->second;
}

// Value of D(f) at one word: d_M f(w) - (-1)^{|f|} phi(D_B(1[w]1)) with
// phi(a[u]b) = (-1)^{|a||f|} a f(u) b.
SparseVec differential_at(const WordSpace& W, const Bimodule& M, const HCochain& f, int wid) {
    const FiniteDGA& A = W.algebra();
    const Field& F = A.field();
    SparseVec out;
    if (const SparseVec* v = value_at(f, wid)) out = M.apply_d(*v);
    BarChain x{{BarTerm{0, W.word(wid), 0}, 1}};
    BarChain dx = bar_differential(A, x);
    const Elt outer = F.neg(F.sign(f.degree));
    for (auto& [t, c] : dx) {
        int u = W.id(t.body);
        if (u < 0 || W.length(u) > f.max_len) continue;
        const SparseVec* v = value_at(f, u);
        if (!v) continue;
        SparseVec val = M.act_right(M.act_left(basis_vec(t.left), *v), basis_vec(t.right));
        Elt s = F.mul(outer, F.mul(c, F.sign(static_cast<long long>(A.degree(t.left)) * f.degree)));
        axpy(out, s, val, F);
    }
    return out;
}

}  // namespace

Bimodule::Bimodule(const FiniteDGA& A, std::vector<int> degrees)
    : A_(std::make_shared<FiniteDGA>(A)), deg_(std::move(degrees)) {
    const int n = size();
    const std::size_t na = static_cast<std::size_t>(A.size());
    d_.assign(n, {});
    left_.assign(na * n, {});
    right_.assign(na * n, {});
    for (int m = 0; m < n; ++m) {
        left_[m] = basis_vec(m);
        right_[m] = basis_vec(m);
    }
}

Bimodule Bimodule::regular(const FiniteDGA& A) {
    std::vector<int> deg(A.size());
    for (int i = 0; i < A.size(); ++i) deg[i] = A.degree(i);
    Bimodule M(A, deg);
    for (int m = 0; m < A.size(); ++m) {
        M.set_d(m, A.d(m));
        for (int a = 0; a < A.size(); ++a) {
            M.set_left(a, m, A.product(a, m));
            M.set_right(m, a, A.product(m, a));
        }
    }
    return M;
}

Bimodule Bimodule::dual(const FiniteDGA& A) {
    const Field& F = A.field();
    const int n = A.size();
    std::vector<int> deg(n);
    for (int i = 0; i < n; ++i) deg[i] = -A.degree(i);
    Bimodule M(A, deg);
    for (int j = 0; j < n; ++j) {
        SparseVec dj;
        for (int x = 0; x < n; ++x) {
            Elt c = coeff(A.d(x), j);
            if (c) dj.push_back({x, F.mul(F.neg(F.sign(deg[j])), c)});
        }
        M.set_d(j, dj);
        for (int a = 0; a < n; ++a) {
            SparseVec l, r;
            for (int x = 0; x < n; ++x) {
                Elt cl = coeff(A.product(x, a), j);
                if (cl) l.push_back({x, F.mul(F.sign(static_cast<long long>(A.degree(a)) * (deg[j] + A.degree(x))), cl)});
                Elt cr = coeff(A.product(a, x), j);
                if (cr) r.push_back({x, cr});
            }
            M.set_left(a, j, l);
            M.set_right(j, a, r);
        }
    }
    return M;
}

SparseVec Bimodule::apply_d(const SparseVec& m) const {
    SparseVec out;
    for (auto& [i, c] : m) axpy(out, c, d_[i], A_->field());
    return out;
}

SparseVec Bimodule::act_left(const SparseVec& a, const SparseVec& m) const {
    SparseVec out;
    const Field& F = A_->field();
    for (auto& [i, c] : a)
        for (auto& [j, e] : m) axpy(out, F.mul(c, e), left(i, j), F);
    return out;
}

SparseVec Bimodule::act_right(const SparseVec& m, const SparseVec& a) const {
    SparseVec out;
    const Field& F = A_->field();
    for (auto& [j, e] : m)
        for (auto& [i, c] : a) axpy(out, F.mul(c, e), right(j, i), F);
    return out;
}

void Bimodule::validate() const {
    const FiniteDGA& A = *A_;
    const Field& F = A.field();
    const int n = size(), na = A.size();
    for (int m = 0; m < n; ++m) {
        for (auto& [t, c] : d_[m])
            if (deg_[t] != deg_[m] + 1) throw MathError("module differential does not raise degree by one");
        if (!apply_d(d_[m]).empty()) throw MathError("module d o d is not zero");
        if (left(0, m) != basis_vec(m) || right(m, 0) != basis_vec(m)) throw MathError("module unit law fails");
    }
    for (int a = 0; a < na; ++a)
        for (int m = 0; m < n; ++m) {
            SparseVec am = left(a, m), ma = right(m, a);
            for (auto& [t, c] : am)
                if (deg_[t] != deg_[m] + A.degree(a)) throw MathError("left action is not homogeneous");
            for (auto& [t, c] : ma)
                if (deg_[t] != deg_[m] + A.degree(a)) throw MathError("right action is not homogeneous");
            SparseVec lhs = apply_d(am);
            SparseVec rhs = act_left(A.d(a), basis_vec(m));
            axpy(rhs, F.sign(A.degree(a)), act_left(basis_vec(a), d_[m]), F);
            if (lhs != rhs) throw MathError("left Leibniz rule fails");
            lhs = apply_d(ma);
            rhs = act_right(d_[m], basis_vec(a));
            axpy(rhs, F.sign(deg_[m]), act_right(basis_vec(m), A.d(a)), F);
            if (lhs != rhs) throw MathError("right Leibniz rule fails");
            for (int b = 0; b < na; ++b) {
                if (act_left(A.product(a, b), basis_vec(m)) != act_left(basis_vec(a), left(b, m)))
                    throw MathError("left action is not associative");
                if (act_right(basis_vec(m), A.product(a, b)) != act_right(ma, basis_vec(b)))
                    throw MathError("right action is not associative");
                if (act_right(am, basis_vec(b)) != act_left(basis_vec(a), right(m, b)))
                    throw MathError("left and right actions do not commute");
            }
        }
}

WordSpace::WordSpace(std::shared_ptr<const FiniteDGA> A, int max_len) : A_(std::move(A)), max_len_(max_len) {
    if (max_len_ < 0) throw MathError("word length bound must be nonnegative");
    const int r = A_->size() - 1;
    start_.push_back(0);
    words_.push_back({});
    start_.push_back(1);
    std::vector<std::vector<int>> layer{{}};
    for (int len = 1; len <= max_len_; ++len) {
        std::vector<std::vector<int>> next;
        for (auto& w : layer)
            for (int a = 1; a <= r; ++a) {
                auto v = w;
                v.push_back(a);
                next.push_back(std::move(v));
            }
        if (words_.size() + next.size() > 4000000) throw MathError("word space too large for this length bound");
        for (auto& w : next) words_.push_back(w);
        start_.push_back(static_cast<int>(words_.size()));
        layer = std::move(next);
    }
    wdeg_.resize(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        wdeg_[i] = suspended_degree(*A_, words_[i]);
        index_.emplace(words_[i], static_cast<int>(i));
    }
}

int WordSpace::id(const std::vector<int>& w) const {
    auto it = index_.find(w);
    return it == index_.end() ? -1 : it->second;
}

HCochain add(const WordSpace& W, const HCochain& f, const HCochain& g, Elt c) {
    const Field& F = W.algebra().field();
    if (!f.is_zero() && !g.is_zero() && c != 0 && f.degree != g.degree)
        throw MathError("adding cochains of different degrees");
    HCochain out;
    out.degree = f.is_zero() ? g.degree : f.degree;
    out.max_len = std::min(f.max_len, g.max_len);
    for (auto& [w, v] : f.values)
        if (W.length(w) <= out.max_len) put(out, w, v, 1, F);
    for (auto& [w, v] : g.values)
        if (W.length(w) <= out.max_len) put(out, w, v, c, F);
    return out;
}

HCochain truncate(const HCochain& f, const WordSpace& W, int max_len) {
    HCochain out;
    out.degree = f.degree;
    out.max_len = std::min(f.max_len, max_len);
    for (auto& [w, v] : f.values)
        if (W.length(w) <= out.max_len) out.values.emplace(w, v);
    return out;
}

HochschildComplex::HochschildComplex(std::shared_ptr<const WordSpace> W, std::shared_ptr<const Bimodule> M, int L,
                                     Filter admissible)
    : W_(std::move(W)), M_(std::move(M)), L_(L), admissible_(std::move(admissible)) {
    if (L_ > W_->max_len()) throw MathError("word space is shorter than the requested length bound");
    for (int w = 0; w < W_->count_upto(L_); ++w) words_by_degree_[W_->degree(w)].push_back(w);
}

const HochschildComplex::Block& HochschildComplex::block(int q) const {
    auto it = blocks_.find(q);
    if (it != blocks_.end()) return it->second;
    Block b;
    for (int m = 0; m < M_->size(); ++m) {
        auto wit = words_by_degree_.find(M_->degree(m) - q);
        if (wit == words_by_degree_.end()) continue;
        for (int w : wit->second)
            if (!admissible_ || admissible_(w, m)) b.basis.push_back({w, m});
    }
    std::sort(b.basis.begin(), b.basis.end());
    for (std::size_t i = 0; i < b.basis.size(); ++i)
        b.pos.emplace(static_cast<long long>(b.basis[i].first) * M_->size() + b.basis[i].second, static_cast<int>(i));
    return blocks_.emplace(q, std::move(b)).first->second;
}

int HochschildComplex::dim(int q) const { return static_cast<int>(block(q).basis.size()); }

const std::vector<std::pair<int, int>>& HochschildComplex::basis(int q) const { return block(q).basis; }

const SparseMatrix& HochschildComplex::diff(int q) const {
    auto it = diffs_.find(q);
    if (it != diffs_.end()) return it->second;
    const Block& src = block(q);
    const Block& tgt = block(q + 1);
    const Field& F = W_->algebra().field();
    const FiniteDGA& A = W_->algebra();
    const int nm = M_->size();
    // rows are grouped by target word; each word is independent
    std::vector<int> targets;
    for (auto& [w, m] : tgt.basis)
        if (targets.empty() || targets.back() != w) targets.push_back(w);
    std::vector<std::vector<std::tuple<int, int, Elt>>> parts(targets.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long long ti = 0; ti < static_cast<long long>(targets.size()); ++ti) {
        const int w = targets[ti];
        auto& out = parts[ti];
        auto emit = [&](int u, int m, const SparseVec& val) {
            auto sp = src.pos.find(static_cast<long long>(u) * nm + m);
            if (sp == src.pos.end()) return;
            for (auto& [m2, c] : val) {
                auto tp = tgt.pos.find(static_cast<long long>(w) * nm + m2);
                if (tp != tgt.pos.end()) out.emplace_back(tp->second, sp->second, c);
            }
        };
        for (int m = 0; m < nm; ++m)
            if (M_->degree(m) - W_->degree(w) == q) emit(w, m, M_->d(m));
        BarChain x{{BarTerm{0, W_->word(w), 0}, 1}};
        BarChain dx = bar_differential(A, x);
        const Elt outer = F.neg(F.sign(q));
        for (auto& [t, c] : dx) {
            int u = W_->id(t.body);
            if (u < 0) continue;
            Elt s = F.mul(outer, F.mul(c, F.sign(static_cast<long long>(A.degree(t.left)) * q)));
            for (int m = 0; m < nm; ++m) {
                if (M_->degree(m) - W_->degree(u) != q) continue;
                SparseVec val = M_->act_right(M_->act_left(basis_vec(t.left), basis_vec(m)), basis_vec(t.right));
                emit(u, m, scaled(val, s, F));
            }
        }
    }
    SparseMatrix D(static_cast<int>(tgt.basis.size()), static_cast<int>(src.basis.size()));
    for (auto& part : parts)
        for (auto& [r, c, v] : part) D.add(r, c, v, F);
    return diffs_.emplace(q, std::move(D)).first->second;
}

SparseVec HochschildComplex::to_local(const HCochain& f) const {
    const Block& b = block(f.degree);
    const Field& F = W_->algebra().field();
    std::map<int, Elt> acc;
    for (auto& [w, v] : f.values) {
        if (W_->length(w) > L_) continue;
        for (auto& [m, c] : v) {
            auto it = b.pos.find(static_cast<long long>(w) * M_->size() + m);
            if (it == b.pos.end()) throw MathError("cochain value lies outside the complex");
            add_entry(acc, it->second, c, F);
        }
    }
    return SparseVec(acc.begin(), acc.end());
}

HCochain HochschildComplex::from_local(int q, const SparseVec& v) const {
    const Block& b = block(q);
    const Field& F = W_->algebra().field();
    HCochain f;
    f.degree = q;
    f.max_len = L_;
    for (auto& [i, c] : v) put(f, b.basis[i].first, basis_vec(b.basis[i].second), c, F);
    return f;
}

HCochain HochschildComplex::D(const HCochain& f) const {
    HCochain out;
    out.degree = f.degree + 1;
    out.max_len = std::min(L_, f.max_len);
    const int n = W_->count_upto(out.max_len);
    std::vector<SparseVec> vals(n);
#pragma omp parallel for schedule(dynamic, 64)
    for (int w = 0; w < n; ++w) vals[w] = differential_at(*W_, *M_, f, w);
    for (int w = 0; w < n; ++w)
        if (!vals[w].empty()) out.values.emplace(w, std::move(vals[w]));
    return out;
}

int HochschildComplex::betti(int q) const {
    auto rk = [&](int deg) {
        auto it = ranks_.find(deg);
        if (it != ranks_.end()) return it->second;
        int r = rank(diff(deg), W_->algebra().field());
        ranks_[deg] = r;
        return r;
    };
    return dim(q) - rk(q) - rk(q - 1);
}

std::map<int, int> HochschildComplex::betti(int lo, int hi) const {
    std::map<int, int> out;
    for (int q = lo; q <= hi; ++q) out[q] = betti(q);
    return out;
}

FiniteComplex HochschildComplex::complex(int lo, int hi) const {
    FiniteComplex C(W_->algebra().field(), lo, hi);
    for (int q = lo; q <= hi; ++q) C.set_dim(q, dim(q));
    for (int q = lo; q < hi; ++q) C.set_diff(q, diff(q));
    return C;
}

std::vector<HCochain> HochschildComplex::homology_basis(int q) const {
    const Field& F = W_->algebra().field();
    ColumnReducer red(F, false);
    const SparseMatrix& in = diff(q - 1);
    for (int c = 0; c < in.cols(); ++c) red.add(in.col(c));
    std::vector<HCochain> out;
    for (auto& z : kernel_basis(diff(q), F))
        if (red.add(z)) out.push_back(from_local(q, z));
    return out;
}

bool HochschildComplex::is_cocycle(const HCochain& f) const {
    HCochain g = truncate(f, *W_, L_);
    return D(g).is_zero();
}

bool HochschildComplex::is_coboundary(const HCochain& f) const {
    if (f.max_len < L_) throw MathError("cochain is not defined up to the length bound");
    SparseVec v = to_local(f);
    if (v.empty()) return true;
    SparseVec x;
    return solve(diff(f.degree - 1), v, x, W_->algebra().field());
}

BarChain bar_differential(const FiniteDGA& A, const BarChain& x) {
    const Field& F = A.field();
    BarChain out;
    for (auto& [t, c] : x) {
        const auto& w = t.body;
        const int k = static_cast<int>(w.size());
        // eps[i] = |a| + sum_{j<i} |s a_j|, 1-based i
        std::vector<long long> eps(k + 2, A.degree(t.left));
        for (int i = 2; i <= k + 1; ++i) eps[i] = eps[i - 1] + A.degree(w[i - 2]) - 1;
        for (auto& [l, e] : A.d(t.left)) add_term(out, {l, w, t.right}, F.mul(c, e), F);
        for (int i = 1; i <= k; ++i)
            for (auto& [b, e] : A.d(w[i - 1])) {
                if (b == 0) continue;
                auto v = w;
                v[i - 1] = b;
                add_term(out, {t.left, v, t.right}, F.mul(F.neg(F.sign(eps[i])), F.mul(c, e)), F);
            }
        for (auto& [r, e] : A.d(t.right)) add_term(out, {t.left, w, r}, F.mul(F.sign(eps[k + 1]), F.mul(c, e)), F);
        if (k == 0) continue;
        std::vector<int> rest(w.begin() + 1, w.end());
        for (auto& [l, e] : A.product(t.left, w[0]))
            add_term(out, {l, rest, t.right}, F.mul(F.sign(A.degree(t.left)), F.mul(c, e)), F);
        for (int i = 2; i <= k; ++i)
            for (auto& [b, e] : A.product(w[i - 2], w[i - 1])) {
                if (b == 0) continue;
                std::vector<int> v(w.begin(), w.begin() + (i - 2));
                v.push_back(b);
                v.insert(v.end(), w.begin() + i, w.end());
                add_term(out, {t.left, v, t.right}, F.mul(F.sign(eps[i]), F.mul(c, e)), F);
            }
        std::vector<int> init(w.begin(), w.end() - 1);
        for (auto& [r, e] : A.product(w[k - 1], t.right))
            add_term(out, {t.left, init, r}, F.mul(F.neg(F.sign(eps[k])), F.mul(c, e)), F);
    }
    return out;
}

HChain hochschild_chain_differential(const FiniteDGA& A, const HChain& x) {
    const Field& F = A.field();
    HChain out;
    for (auto& [key, c] : x) {
        BarChain dx = bar_differential(A, {{BarTerm{key.first, key.second, 0}, c}});
        for (auto& [t, e] : dx) {
            // a[w]b -> (-1)^{|b|(|a| + |w|)} b a [w]
            long long s = static_cast<long long>(A.degree(t.right)) *
                          (A.degree(t.left) + suspended_degree(A, t.body));
            for (auto& [l, g] : A.product(t.right, t.left))
                add_entry(out, std::make_pair(l, t.body), F.mul(F.sign(s), F.mul(e, g)), F);
        }
    }
    return out;
}

HChain connes_B(const FiniteDGA& A, const HChain& x) {
    const Field& F = A.field();
    HChain out;
    for (auto& [key, c] : x) {
        if (key.first == 0) continue;
        std::vector<int> s{key.first};
        s.insert(s.end(), key.second.begin(), key.second.end());
        const int n = static_cast<int>(s.size());
        long long total = suspended_degree(A, s);
        long long before = 0;
        for (int i = 0; i < n; ++i) {
            // rotation bringing s[i] to the front
            std::vector<int> body(s.begin() + i, s.end());
            body.insert(body.end(), s.begin(), s.begin() + i);
            add_entry(out, std::make_pair(0, body), F.mul(F.sign(before * (total - before)), c), F);
            before += A.degree(s[i]) - 1;
        }
    }
    return out;
}

Elt evaluate_dual(const FiniteDGA& A, const HCochain& psi, const WordSpace& W, int a, const std::vector<int>& body) {
    int w = W.id(body);
    if (w < 0 || W.length(w) > psi.max_len) throw MathError("functional is not defined on this word");
    const SparseVec* v = value_at(psi, w);
    if (!v) return 0;
    // a moves past the bar word
    return A.field().mul(A.field().sign(static_cast<long long>(A.degree(a)) * W.degree(w)), coeff(*v, a));
}

HCochain cup(const WordSpace& W, const Bimodule& M, const HCochain& f, const HCochain& g) {
    const FiniteDGA& A = W.algebra();
    const Field& F = A.field();
    HCochain out;
    out.degree = f.degree + g.degree;
    out.max_len = std::min(f.max_len, g.max_len);
    for (auto& [u1, v1] : f.values) {
        if (W.length(u1) > out.max_len) continue;
        const auto& w1 = W.word(u1);
        Elt s = F.sign(static_cast<long long>(g.degree) * W.degree(u1));
        for (auto& [u2, v2] : g.values) {
            if (W.length(u1) + W.length(u2) > out.max_len) continue;
            std::vector<int> w = w1;
            w.insert(w.end(), W.word(u2).begin(), W.word(u2).end());
            put(out, W.id(w), M.act_left(v1, v2), s, F);
        }
    }
    return out;
}

HCochain brace(const WordSpace& W, const HCochain& f, const HCochain& g, int max_len) {
    const FiniteDGA& A = W.algebra();
    const Field& F = A.field();
    if (max_len > g.max_len || max_len > W.max_len()) throw MathError("brace output longer than its input");
    HCochain out;
    out.degree = f.degree + g.degree - 1;
    out.max_len = max_len;
    const int n = W.count_upto(max_len);
    std::vector<SparseVec> vals(n);
#pragma omp parallel for schedule(dynamic, 64)
    for (int w = 0; w < n; ++w) {
        const auto& word = W.word(w);
        const int k = static_cast<int>(word.size());
        SparseVec acc;
        long long before = 0;
        for (int i = 0; i <= k; ++i) {
            std::vector<int> mid;
            for (int j = i; j <= k; ++j) {
                if (j > i) mid.push_back(word[j - 1]);
                const SparseVec* gv = value_at(g, W.id(mid));
                if (!gv) continue;
                Elt s = F.sign(static_cast<long long>(g.degree - 1) * before);
                for (auto& [t, c] : *gv) {
                    if (t == 0) continue;
                    std::vector<int> nw(word.begin(), word.begin() + i);
                    nw.push_back(t);
                    nw.insert(nw.end(), word.begin() + j, word.end());
                    if (static_cast<int>(nw.size()) > f.max_len)
                        throw MathError("brace needs the outer cochain on longer words");
                    const SparseVec* fv = value_at(f, W.id(nw));
                    if (fv) axpy(acc, F.mul(s, c), *fv, F);
                }
            }
            if (i < k) before += A.degree(word[i]) - 1;
        }
        vals[w] = std::move(acc);
    }
    for (int w = 0; w < n; ++w)
        if (!vals[w].empty()) out.values.emplace(w, std::move(vals[w]));
    return out;
}

HCochain bracket(const WordSpace& W, const HCochain& f, const HCochain& g, int max_len) {
    const Field& F = W.algebra().field();
    HCochain a = brace(W, f, g, max_len);
    HCochain b = brace(W, g, f, max_len);
    HCochain out = add(W, a, b, F.neg(F.sign(static_cast<long long>(f.degree - 1) * (g.degree - 1))));
    out.degree = f.degree + g.degree - 1;
    return out;
}

HCochain connes_B_dual(const WordSpace& W, const Bimodule& DA, const HCochain& psi, int max_len) {
    const FiniteDGA& A = W.algebra();
    const Field& F = A.field();
    if (max_len + 1 > psi.max_len) throw MathError("dual Connes boundary needs one more length");
    HCochain out;
    out.degree = psi.degree - 1;
    out.max_len = max_len;
    const int n = W.count_upto(max_len);
    std::vector<SparseVec> vals(n);
#pragma omp parallel for schedule(dynamic, 64)
    for (int w = 0; w < n; ++w) {
        SparseVec acc;
        for (int a = 1; a < A.size(); ++a) {
            HChain b = connes_B(A, {{std::make_pair(a, W.word(w)), 1}});
            Elt v = 0;
            for (auto& [key, c] : b) v = F.add(v, F.mul(c, evaluate_dual(A, psi, W, 0, key.second)));
            v = F.mul(v, F.sign(static_cast<long long>(A.degree(a)) * W.degree(w) + psi.degree + 1));
            if (v) acc.push_back({a, v});
        }
        vals[w] = std::move(acc);
    }
    (void)DA;
    for (int w = 0; w < n; ++w)
        if (!vals[w].empty()) out.values.emplace(w, std::move(vals[w]));
    return out;
}

HCochain duality_cochain(const Bimodule& DA, const Duality& G) {
    if (G.gamma.empty()) throw MathError("duality element is zero");
    const int deg = DA.degree(G.gamma.front().first);
    for (auto& [i, c] : G.gamma)
        if (DA.degree(i) != deg) throw MathError("duality element is not homogeneous");
    if (!DA.apply_d(G.gamma).empty()) throw MathError("duality element is not a cocycle");
    HCochain c;
    c.degree = deg;
    c.max_len = 1 << 20;
    c.values.emplace(0, G.gamma);
    return c;
}

Duality top_class_duality(const FiniteDGA& A) {
    const int top = A.max_degree();
    auto b = A.basis_in_degree(top);
    if (b.size() != 1) throw MathError("top degree is not one-dimensional");
    return Duality{basis_vec(b[0])};
}

DualityCheck check_duality(const Bimodule& DA, const Duality& G) {
    const FiniteDGA& A = DA.algebra();
    const Field& F = A.field();
    const int n = A.size();
    DualityCheck out;
    out.cocycle = DA.apply_d(G.gamma).empty();
    SparseMatrix dA(n, n), dD(DA.size(), DA.size());
    for (int i = 0; i < n; ++i) dA.set_col(i, A.d(i));
    for (int i = 0; i < DA.size(); ++i) dD.set_col(i, DA.d(i));
    ColumnReducer red(F, false);
    for (int c = 0; c < dD.cols(); ++c) red.add(dD.col(c));
    const int base = red.rank();
    for (auto& z : kernel_basis(dA, F)) red.add(DA.act_left(z, G.gamma));
    out.rank = red.rank() - base;
    const int hA = n - 2 * rank(dA, F);
    const int hD = DA.size() - 2 * base;
    out.dim = hA;
    out.bijective = out.cocycle && out.rank == hA && hA == hD;
    return out;
}

BVStructure::BVStructure(std::shared_ptr<const WordSpace> W, const Duality& G, int L)
    : W_(std::move(W)), G_(G), L_(L) {
    const FiniteDGA& A = W_->algebra();
    const Field& F = A.field();
    if (L_ > W_->max_len()) throw MathError("word space is shorter than the requested length bound");
    R_ = std::make_shared<Bimodule>(Bimodule::regular(A));
    DA_ = std::make_shared<Bimodule>(Bimodule::dual(A));
    DualityCheck chk = check_duality(*DA_, G_);
    if (!chk.cocycle) {
        failure_ = "duality element is not a cocycle";
        return;
    }
    if (!chk.bijective) {
        failure_ = "a -> a.Gamma is not bijective in homology";
        return;
    }
    const int n = A.size();
    SparseMatrix T(n, n);
    for (int a = 0; a < n; ++a) T.set_col(a, DA_->act_left(basis_vec(a), G_.gamma));
    if (rank(T, F) != n) {
        failure_ = "a -> a.Gamma is a quasi-isomorphism but not invertible at chain level";
        return;
    }
    inv_ = SparseMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        SparseVec x;
        solve(T, basis_vec(j), x, F);
        inv_.set_col(j, x);
    }
    c_ = duality_cochain(*DA_, G_);
    ok_ = true;
}

const HochschildComplex& BVStructure::hc(int len) const {
    auto& slot = hcs_[len];
    if (!slot) slot = std::make_unique<HochschildComplex>(W_, R_, len);
    return *slot;
}

const HochschildComplex& BVStructure::hc_dual(int len) const {
    auto& slot = hcds_[len];
    if (!slot) slot = std::make_unique<HochschildComplex>(W_, DA_, len);
    return *slot;
}

HCochain BVStructure::phi(const HCochain& f) const {
    if (!ok_) throw MathError(failure_);
    return cup(*W_, *DA_, f, c_);
}

HCochain BVStructure::phi_inverse(const HCochain& g) const {
    if (!ok_) throw MathError(failure_);
    const Field& F = W_->algebra().field();
    HCochain f;
    f.degree = g.degree - c_.degree;
    f.max_len = g.max_len;
    for (auto& [w, v] : g.values)
        put(f, w, inv_.apply(v, F), F.sign(static_cast<long long>(c_.degree) * W_->degree(w)), F);
    return f;
}

HCochain BVStructure::delta(const HCochain& f) const {
    return phi_inverse(connes_B_dual(*W_, *DA_, phi(f), f.max_len - 1));
}

BVReport verify_bv(const BVStructure& S, int lo, int hi) {
    BVReport r;
    r.duality_ok = S.duality_ok();
    r.failure = S.failure();
    if (!r.duality_ok) return r;
    const WordSpace& W = S.words();
    const Field& F = W.algebra().field();
    const int L = S.max_len();
    if (L < 2) throw MathError("the BV check needs length bound at least 2");
    HCochain unit;
    unit.degree = 0;
    unit.max_len = L;
    unit.values.emplace(0, basis_vec(0));
    r.delta_unit_zero = S.delta(unit).is_zero();
    r.b_dual_c_zero = connes_B_dual(W, S.dual_module(), truncate(S.cochain_c(), W, L), L - 1).is_zero();
    std::vector<HCochain> gens;
    for (int q = lo; q <= hi; ++q)
        for (auto& g : S.hc(L).homology_basis(q)) gens.push_back(g);
    r.generators = static_cast<int>(gens.size());
    std::vector<HCochain> deltas;
    for (auto& g : gens) {
        deltas.push_back(S.delta(g));
        HCochain dd = S.delta(deltas.back());
        if (!S.hc(L - 2).is_coboundary(dd)) ++r.delta_squared_failed;
    }
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = 0; j < gens.size(); ++j) {
            const HCochain& a = gens[i];
            const HCochain& b = gens[j];
            const Bimodule& R = S.regular_module();
            HCochain br = bracket(W, a, b, L - 1);
            HCochain t1 = S.delta(cup(W, R, a, b));
            HCochain t2 = cup(W, R, deltas[i], b);
            HCochain t3 = cup(W, R, a, deltas[j]);
            HCochain inner = add(W, add(W, t1, t2, F.neg(1)), t3, F.neg(F.sign(a.degree)));
            inner.degree = a.degree + b.degree - 1;
            HCochain res = add(W, br, inner, F.neg(F.sign(a.degree)));
            res.degree = a.degree + b.degree - 1;
            ++r.pairs_checked;
            if (!S.hc(L - 1).is_coboundary(truncate(res, W, L - 1))) ++r.pairs_failed;
        }
    return r;
}

TruncationReport hochschild_report(std::shared_ptr<const WordSpace> W, std::shared_ptr<const Bimodule> M, int L,
                                   int lo, int hi) {
    TruncationReport r;
    r.max_len = L;
    r.lo = lo;
    r.hi = hi;
    HochschildComplex a(W, M, L), b(W, M, L + 1);
    r.betti = a.betti(lo, hi);
    r.betti_next = b.betti(lo, hi);
    for (int q = lo; q <= hi; ++q) r.stabilized[q] = r.betti[q] == r.betti_next[q];
    return r;
}

std::map<std::pair<int, int>, int> hochschild_bigraded(std::shared_ptr<const WordSpace> W,
                                                       std::shared_ptr<const Bimodule> M, int L, int lo, int hi) {
    if (!W->algebra().d_is_zero()) throw MathError("length grading needs an algebra with zero differential");
    for (int m = 0; m < M->size(); ++m)
        if (!M->d(m).empty()) throw MathError("length grading needs a module with zero differential");
    const Field& F = W->algebra().field();
    HochschildComplex C(W, M, L);
    // rank of the part of diff(q) from length k to length k + 1
    auto part_rank = [&](int q, int k) {
        const auto& src = C.basis(q);
        const auto& tgt = C.basis(q + 1);
        std::vector<int> rows(tgt.size(), -1);
        int nr = 0;
        for (std::size_t i = 0; i < tgt.size(); ++i)
            if (W->length(tgt[i].first) == k + 1) rows[i] = nr++;
        std::vector<SparseVec> cols;
        for (std::size_t j = 0; j < src.size(); ++j) {
            if (W->length(src[j].first) != k) continue;
            SparseVec v;
            for (auto& [i, c] : C.diff(q).col(static_cast<int>(j)))
                if (rows[i] >= 0) v.push_back({rows[i], c});
            std::sort(v.begin(), v.end());
            cols.push_back(v);
        }
        SparseMatrix P(nr, static_cast<int>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) P.set_col(static_cast<int>(j), cols[j]);
        return rank(P, F);
    };
    std::map<std::pair<int, int>, int> out;
    for (int k = 0; k < L; ++k)
        for (int q = lo; q <= hi; ++q) {
            int d = 0;
            for (auto& [w, m] : C.basis(q))
                if (W->length(w) == k) ++d;
            int b = d - part_rank(q, k) - (k > 0 ? part_rank(q - 1, k - 1) : 0);
            out[{k, q}] = b;
        }
    return out;
}

}  // namespace opalg
