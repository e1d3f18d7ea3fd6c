#include "opalg/enveloping.hpp"

#include <algorithm>

namespace opalg {

namespace {

// The orbit normal form with 1 at position i among k values.
Perm normal_perm(int k, int i) {
    std::vector<int> w;
    int next = 2;
    for (int j = 1; j <= k; ++j) w.push_back(j == i ? 1 : next++);
    return Perm(w);
}

void add_to(std::map<int, Elt>& acc, int idx, Elt c, const Field& F) {
    if (c == 0) return;
    Elt v = F.add(acc[idx], c);
    if (v == 0)
        acc.erase(idx);
    else
        acc[idx] = v;
}

SparseVec to_vec(const std::map<int, Elt>& m) { return SparseVec(m.begin(), m.end()); }

// All tuples of length k over the reduced basis 1..n-1.
void for_each_tuple(int k, int n, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> t(k, 1);
    if (n <= 1 && k > 0) return;
    while (true) {
        fn(t);
        int j = k - 1;
        while (j >= 0 && t[j] == n - 1) t[j--] = 1;
        if (j < 0) return;
        ++t[j];
    }
}

// All simplices of E(k)_l whose first permutation is in the given set.
void for_each_simplex(int k, int l, const std::vector<int>& firsts, const std::function<void(const Simplex&)>& fn) {
    const PermTable& T = PermTable::get(k);
    Simplex s(l + 1);
    std::function<void(int)> rec = [&](int j) {
        if (j == l + 1) {
            fn(s);
            return;
        }
        for (int r = 0; r < T.order(); ++r) {
            if (s[j - 1] == r) continue;
            s[j] = static_cast<std::uint16_t>(r);
            rec(j + 1);
        }
    };
    for (int f : firsts) {
        s[0] = static_cast<std::uint16_t>(f);
        rec(1);
    }
}

}  // namespace

bool is_orbit_normal(const Perm& p) {
    int last = 1;
    for (int v : p.values()) {
        if (v == 1) continue;
        if (v < last) return false;
        last = v;
    }
    return true;
}

EnvAlgebra::EnvAlgebra(std::shared_ptr<const EPlusAlgebra> A, EnvTruncation T)
    : A_(std::move(A)), T_(T), F_(A_->A.field()) {
    if (T_.max_arity < 0 || T_.max_be_degree < 0) throw MathError("negative truncation");
    if (T_.min_degree > 0 || T_.max_degree < 0) throw MathError("truncation does not contain the unit generator 1_1(t)");
    if (T_.max_arity + 1 > 7) throw MathError("arity too large for the permutation tables");
    build_generators();
    build_relations();
    for (int i = 0; i < num_generators(); ++i)
        if (!pivots_.count(i)) basis_.push_back(i);
}

bool EnvAlgebra::inside(int arity, int be_degree, int degree) const {
    return arity <= T_.max_arity && be_degree <= T_.max_be_degree && degree >= T_.min_degree &&
           degree <= T_.max_degree;
}

int EnvAlgebra::degree(int i) const {
    const auto& g = gens_[i];
    int d = -g.be_degree();
    for (int a : g.args) d += algebra().degree(a);
    return d;
}

int EnvAlgebra::degree_of(const SparseVec& u) const { return u.empty() ? 0 : degree(u.front().first); }

void EnvAlgebra::build_generators() {
    const int n = algebra().size();
    // order: arity, BE degree, simplex, arguments
    for (int k = 0; k <= T_.max_arity; ++k) {
        const PermTable& P = PermTable::get(k + 1);
        std::vector<int> firsts;
        for (int i = 1; i <= k + 1; ++i) firsts.push_back(P.rank(normal_perm(k + 1, i)));
        for (int l = 0; l <= T_.max_be_degree; ++l)
            for_each_simplex(k + 1, l, firsts, [&](const Simplex& s) {
                for_each_tuple(k, n, [&](const std::vector<int>& args) {
                    int deg = -l;
                    for (int a : args) deg += algebra().degree(a);
                    if (!inside(k, l, deg)) return;
                    EnvGenerator g{s, args};
                    index_[g] = static_cast<int>(gens_.size());
                    gens_.push_back(g);
                });
            });
    }
}

int EnvAlgebra::index_of(const EnvGenerator& g) const {
    auto it = index_.find(g);
    return it == index_.end() ? -1 : it->second;
}

void EnvAlgebra::add_term(SparseVec& out, int arity, const Simplex& s, const std::vector<int>& args, Elt c) const {
    if (c == 0) return;
    const int k = arity;
    const PermTable& P = PermTable::get(k + 1);
    const Perm& w0 = P.perm(s[0]);
    const int i = w0.inverse()(1);
    const Perm rep0 = normal_perm(k + 1, i);
    const Perm tau = w0 * rep0.inverse();
    const int tinv = P.rank(tau.inverse());
    Simplex rep(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) rep[j] = static_cast<std::uint16_t>(P.mul(tinv, s[j]));
    std::vector<int> degs(k + 1, 0);
    for (int j = 0; j < k; ++j) degs[j + 1] = algebra().degree(args[j]);
    std::vector<int> nargs(k);
    for (int j = 1; j <= k; ++j) nargs[j - 1] = args[tau(j + 1) - 2];
    int idx = index_of({rep, nargs});
    if (idx < 0) return;
    axpy(out, F_.mul(c, F_.sign(koszul_exponent(tau, degs))), SparseVec{{idx, 1}}, F_);
}

void EnvAlgebra::build_relations() {
    const int n = algebra().size();
    auto insert = [&](SparseVec v) {
        std::map<int, Elt> m(v.begin(), v.end());
        while (!m.empty()) {
            auto it = std::prev(m.end());
            auto pv = pivots_.find(it->first);
            if (pv == pivots_.end()) break;
            Elt c = F_.neg(it->second);
            for (auto& [j, x] : pv->second) add_to(m, j, F_.mul(c, x), F_);
        }
        if (m.empty()) return;
        Elt lead = F_.inv(std::prev(m.end())->second);
        SparseVec r;
        for (auto& [j, x] : m) r.push_back({j, F_.mul(lead, x)});
        pivots_[r.back().first] = r;
    };
    for (int kp = 1; kp <= T_.max_arity; ++kp) {
        const PermTable& Pp = PermTable::get(kp + 1);
        std::vector<int> pfirst;
        for (int i = 1; i <= kp + 1; ++i) pfirst.push_back(Pp.rank(normal_perm(kp + 1, i)));
        for (int m = 2; kp + m - 1 <= T_.max_arity; ++m) {
            for (int l1 = 0; l1 <= T_.max_be_degree; ++l1)
                for (int l2 = 0; l1 + l2 <= T_.max_be_degree; ++l2)
                    for_each_simplex(kp + 1, l1, pfirst, [&](const Simplex& ps) {
                        const BEElement p = BEElement::basis(kp + 1, ps);
                        for_each_simplex(m, l2, {0}, [&](const Simplex& qs) {
                            const BEElement q = BEElement::basis(m, qs);
                            for (int s = 1; s <= kp; ++s) {
                                const BEElement pq = be_partial_compose(p, 1 + s, q, F_);
                                for_each_tuple(kp + m - 1, n, [&](const std::vector<int>& args) {
                                    int deg = -(l1 + l2);
                                    for (int a : args) deg += algebra().degree(a);
                                    if (!inside(kp + m - 1, l1 + l2, deg)) return;
                                    SparseVec rel;
                                    for (auto& [t, c] : pq.terms()) add_term(rel, kp + m - 1, t, args, c);
                                    long long before = 0;
                                    for (int j = 0; j < s - 1; ++j) before += algebra().degree(args[j]);
                                    std::vector<int> inner(args.begin() + (s - 1), args.begin() + (s - 1) + m);
                                    SparseVec val = A_->lambda(q, inner);
                                    Elt sg = F_.neg(F_.sign(static_cast<long long>(l2) * before));
                                    std::vector<int> outer(args.begin(), args.begin() + (s - 1));
                                    outer.push_back(0);
                                    outer.insert(outer.end(), args.begin() + (s - 1) + m, args.end());
                                    for (auto& [b, c] : val) {
                                        if (b == 0) throw MathError("the reduced algebra is not closed under the action");
                                        outer[s - 1] = b;
                                        add_term(rel, kp, ps, outer, F_.mul(sg, c));
                                    }
                                    insert(rel);
                                });
                            }
                        });
                    });
        }
    }
}

SparseVec EnvAlgebra::normal_form(const SparseVec& v) const {
    std::map<int, Elt> m(v.begin(), v.end());
    std::map<int, Elt> out;
    while (!m.empty()) {
        auto it = std::prev(m.end());
        auto pv = pivots_.find(it->first);
        if (pv == pivots_.end()) {
            out[it->first] = it->second;
            m.erase(it);
            continue;
        }
        Elt c = F_.neg(it->second);
        for (auto& [j, x] : pv->second) add_to(m, j, F_.mul(c, x), F_);
    }
    return to_vec(out);
}

SparseVec EnvAlgebra::element(const BEElement& sigma, const std::vector<int>& args) const {
    if (sigma.arity() != static_cast<int>(args.size()) + 1) throw MathError("arity mismatch in enveloping element");
    for (int a : args)
        if (a <= 0 || a >= algebra().size()) throw MathError("arguments must be reduced basis elements");
    SparseVec out;
    for (auto& [s, c] : sigma.terms()) add_term(out, sigma.arity() - 1, s, args, c);
    return normal_form(out);
}

SparseVec EnvAlgebra::unit() const { return element(BEElement::basis({Perm::identity(1)}), {}); }

SparseVec EnvAlgebra::d(const SparseVec& u) const {
    SparseVec out;
    for (auto& [gi, c] : u) {
        const auto& g = gens_[gi];
        const int k = g.arity(), l = g.be_degree();
        auto ds = be_differential(BEElement::basis(k + 1, g.sigma), F_);
        for (auto& [s, v] : ds.terms()) add_term(out, k, s, g.args, F_.mul(c, v));
        long long eps = l;
        for (int i = 0; i < k; ++i) {
            for (auto& [b, v] : algebra().d(g.args[i])) {
                if (b == 0) throw MathError("the reduced algebra is not a subcomplex");
                auto args = g.args;
                args[i] = b;
                add_term(out, k, g.sigma, args, F_.mul(F_.mul(c, v), F_.sign(eps)));
            }
            eps += algebra().degree(g.args[i]);
        }
    }
    return normal_form(out);
}

SparseVec EnvAlgebra::product(const SparseVec& u, const SparseVec& v) const {
    SparseVec out;
    for (auto& [gi, c] : u)
        for (auto& [gj, e] : v) {
            const auto& p = gens_[gi];
            const auto& q = gens_[gj];
            const int k = p.arity() + q.arity();
            if (k > T_.max_arity || p.be_degree() + q.be_degree() > T_.max_be_degree) continue;
            long long da = 0, db = 0;
            for (int a : p.args) da += algebra().degree(a);
            for (int b : q.args) db += algebra().degree(b);
            Elt sg = F_.sign(da * (db - q.be_degree()));
            auto pq = be_partial_compose(BEElement::basis(p.arity() + 1, p.sigma), 1,
                                         BEElement::basis(q.arity() + 1, q.sigma), F_);
            std::vector<int> args = q.args;
            args.insert(args.end(), p.args.begin(), p.args.end());
            for (auto& [s, x] : pq.terms()) add_term(out, k, s, args, F_.mul(F_.mul(c, e), F_.mul(sg, x)));
        }
    return normal_form(out);
}

SparseVec EnvAlgebra::f(const SparseVec& u) const {
    SparseVec out;
    for (auto& [gi, c] : u) {
        const auto& g = gens_[gi];
        std::vector<int> args{0};
        args.insert(args.end(), g.args.begin(), g.args.end());
        axpy(out, c, A_->lambda(BEElement::basis(g.arity() + 1, g.sigma), args), F_);
    }
    return out;
}

SparseVec EnvAlgebra::g(const SparseVec& a) const {
    SparseVec out;
    for (auto& [b, c] : a) {
        if (b == 0)
            axpy(out, c, unit(), F_);
        else
            axpy(out, c, element(BEElement::basis({Perm({1, 2})}), {b}), F_);
    }
    return out;
}

SparseVec EnvAlgebra::h(const SparseVec& u) const {
    SparseVec out;
    for (auto& [gi, c] : u) {
        const auto& g = gens_[gi];
        auto H = prism_homotopy(BEElement::basis(g.arity() + 1, g.sigma), F_);
        for (auto& [s, v] : H.terms()) add_term(out, g.arity(), s, g.args, F_.mul(c, v));
    }
    return normal_form(out);
}

SparseVec EnvAlgebra::mirror(const SparseVec& u) const {
    SparseVec out;
    for (auto& [gi, c] : u) {
        const auto& g = gens_[gi];
        auto o = be_op(BEElement::basis(g.arity() + 1, g.sigma), F_);
        for (auto& [s, v] : o.terms()) add_term(out, g.arity(), s, g.args, F_.mul(c, v));
    }
    return normal_form(out);
}

SparseVec EnvAlgebra::as_embed(int a, int b) const {
    if (a == 0 && b == 0) return unit();
    if (b == 0) return element(BEElement::basis({Perm({2, 1})}), {a});
    if (a == 0) return element(BEElement::basis({Perm({1, 2})}), {b});
    return element(BEElement::basis({Perm({2, 1, 3})}), {a, b});
}

SparseVec EnvAlgebra::act_on_A(const SparseVec& u, const SparseVec& x) const {
    SparseVec out;
    for (auto& [gi, c] : u) {
        const auto& g = gens_[gi];
        const BEElement s = BEElement::basis(g.arity() + 1, g.sigma);
        for (auto& [xi, e] : x) {
            std::vector<int> args{xi};
            args.insert(args.end(), g.args.begin(), g.args.end());
            axpy(out, F_.mul(c, e), A_->lambda(s, args), F_);
        }
    }
    return out;
}

SparseVec EnvAlgebra::act_on_dual(const SparseVec& u, const SparseVec& hv) const {
    SparseVec out;
    SparseVec mu = mirror(u);
    for (int j = 0; j < algebra().size(); ++j) {
        SparseVec img = act_on_A(mu, {{j, 1}});
        Elt v = 0;
        for (auto& [i, c] : img) v = F_.add(v, F_.mul(c, coeff(hv, i)));
        if (v) out.push_back({j, v});
    }
    return out;
}

EnvAlgebra::Complex EnvAlgebra::complex(int max_l) const {
    std::map<int, std::vector<int>> by_deg;
    for (int i : basis_)
        if (gens_[i].be_degree() <= max_l) by_deg[degree(i)].push_back(i);
    int lo = by_deg.empty() ? 0 : by_deg.begin()->first;
    int hi = by_deg.empty() ? 0 : by_deg.rbegin()->first;
    Complex out{FiniteComplex(F_, lo, hi, Grading::Cohomological), by_deg};
    std::map<int, int> pos;
    for (auto& [deg, b] : by_deg) {
        out.C.set_dim(deg, static_cast<int>(b.size()));
        for (std::size_t j = 0; j < b.size(); ++j) pos[b[j]] = static_cast<int>(j);
    }
    for (auto& [deg, b] : by_deg) {
        if (!by_deg.count(deg + 1)) continue;
        SparseMatrix M(out.C.dim(deg + 1), out.C.dim(deg));
        for (std::size_t j = 0; j < b.size(); ++j)
            for (auto& [t, c] : d({{b[j], 1}})) {
                auto it = pos.find(t);
                if (it == pos.end() || gens_[t].be_degree() > max_l) continue;
                M.set(it->second, static_cast<int>(j), c);
            }
        out.C.set_diff(deg, M);
    }
    return out;
}

}  // namespace opalg
