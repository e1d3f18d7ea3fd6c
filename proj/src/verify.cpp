#include "opalg/verify.hpp"

#include <random>

#include "opalg/barratt_eccles.hpp"
#include "opalg/perm.hpp"

namespace opalg {

bool Verification::ok() const {
    for (auto& c : checks)
        if (c.failed) return false;
    return true;
}

CheckTally& Verification::tally(const std::string& name) {
    for (auto& c : checks)
        if (c.name == name) return c;
    checks.push_back({name, 0, 0});
    return checks.back();
}

namespace {

void record(CheckTally& t, bool ok) {
    ++t.checked;
    if (!ok) ++t.failed;
}

std::vector<std::vector<Perm>> tuples(const std::vector<int>& arities) {
    std::vector<std::vector<Perm>> out{{}};
    for (int a : arities) {
        std::vector<std::vector<Perm>> next;
        for (auto& t : out)
            for (auto& p : all_perms(a)) {
                auto u = t;
                u.push_back(p);
                next.push_back(u);
            }
        out.swap(next);
    }
    return out;
}

int total(const std::vector<int>& v) {
    int s = 0;
    for (int x : v) s += x;
    return s;
}

// gamma(gamma(a; b); c) = gamma(a; gamma(b_1; c..), ..., gamma(b_k; ..c))
bool may_associative(const Perm& a, const std::vector<Perm>& bs, const std::vector<Perm>& cs) {
    std::vector<Perm> ds;
    std::size_t off = 0;
    for (auto& b : bs) {
        std::vector<Perm> sub(cs.begin() + static_cast<long>(off), cs.begin() + static_cast<long>(off + b.size()));
        ds.push_back(perm_operad_compose(b, sub));
        off += b.size();
    }
    return perm_operad_compose(perm_operad_compose(a, bs), cs) == perm_operad_compose(a, ds);
}

// gamma(s.a; b) = s_*(|b|).gamma(a; b_{s(1)}, ..., b_{s(k)})
bool equivariant_outer(const Perm& s, const Perm& a, const std::vector<Perm>& bs) {
    std::vector<int> ar;
    std::vector<Perm> b2;
    for (auto& b : bs) ar.push_back(b.size());
    for (int j = 1; j <= s.size(); ++j) b2.push_back(bs[s(j) - 1]);
    return perm_operad_compose(s * a, bs) == block_permutation(s, ar) * perm_operad_compose(a, b2);
}

// gamma(a; t_1 b_1, ..., t_k b_k) = (t_1 + ... + t_k).gamma(a; b)
bool equivariant_inner(const Perm& a, const std::vector<Perm>& ts, const std::vector<Perm>& bs) {
    std::vector<Perm> tb;
    for (std::size_t s = 0; s < bs.size(); ++s) tb.push_back(ts[s] * bs[s]);
    return perm_operad_compose(a, tb) == direct_sum(ts) * perm_operad_compose(a, bs);
}

Perm random_perm(int k, std::mt19937& rng) {
    std::vector<int> v(k);
    for (int i = 0; i < k; ++i) v[i] = i + 1;
    std::shuffle(v.begin(), v.end(), rng);
    return Perm(v);
}

std::vector<Perm> random_tuple(const std::vector<int>& ar, std::mt19937& rng) {
    std::vector<Perm> out;
    for (int a : ar) out.push_back(random_perm(a, rng));
    return out;
}

}  // namespace

Verification verify_permutation_operad(int exhaustive_arity, int samples, std::uint32_t seed) {
    Verification V;
    auto& unit = V.tally("perm.unit");
    auto& assoc = V.tally("perm.may_associativity");
    auto& eq1 = V.tally("perm.equivariance_outer");
    auto& eq2 = V.tally("perm.equivariance_inner");
    for (int k = 1; k <= exhaustive_arity + 1; ++k)
        for (auto& s : all_perms(k)) {
            record(unit, perm_operad_compose(Perm::identity(1), {s}) == s);
            record(unit, perm_operad_compose(s, std::vector<Perm>(k, Perm::identity(1))) == s);
        }
    for (int k = 1; k <= exhaustive_arity; ++k)
        for (auto& a : all_perms(k))
            for (int code = 0; code < (1 << k); ++code) {
                std::vector<int> ar(k);
                for (int j = 0; j < k; ++j) ar[j] = 1 + ((code >> j) & 1);
                const int n = total(ar);
                for (auto& bs : tuples(ar)) {
                    for (int ccode = 0; ccode < (1 << n); ++ccode) {
                        std::vector<int> car(n);
                        for (int j = 0; j < n; ++j) car[j] = 1 + ((ccode >> j) & 1);
                        for (auto& cs : tuples(car)) record(assoc, may_associative(a, bs, cs));
                    }
                    for (auto& s : all_perms(k)) record(eq1, equivariant_outer(s, a, bs));
                    for (auto& ts : tuples(ar)) record(eq2, equivariant_inner(a, ts, bs));
                }
            }
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> small(1, 3), tiny(1, 2);
    for (int t = 0; t < samples; ++t) {
        Perm a = random_perm(4, rng);
        std::vector<int> ar(4), car;
        for (auto& x : ar) x = small(rng);
        for (int j = 0; j < total(ar); ++j) car.push_back(tiny(rng));
        auto bs = random_tuple(ar, rng);
        auto cs = random_tuple(car, rng);
        record(unit, perm_operad_compose(a, std::vector<Perm>(4, Perm::identity(1))) == a);
        record(assoc, may_associative(a, bs, cs));
        record(eq1, equivariant_outer(random_perm(4, rng), a, bs));
        record(eq2, equivariant_inner(a, random_tuple(ar, rng), bs));
    }
    return V;
}

namespace {

int be_degree(const BEElement& x) {
    return x.terms().empty() ? 0 : static_cast<int>(x.terms().begin()->first.size()) - 1;
}

long long basis_count(int k, int l) {
    long long f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    if (f == 1) return l == 0 ? 1 : 0;
    long long c = f;
    for (int i = 0; i < l; ++i) c *= f - 1;
    return c;
}

// Rank sequences of length m up to relabelling: restricted growth strings
// with distinct neighbours and at most `symbols` values.
void patterns(int m, int symbols, std::vector<Simplex>& out) {
    Simplex s;
    auto rec = [&](auto&& self, int top) -> void {
        if (static_cast<int>(s.size()) == m) {
            out.push_back(s);
            return;
        }
        for (int v = 0; v <= std::min(top + 1, symbols - 1); ++v) {
            if (!s.empty() && s.back() == v) continue;
            s.push_back(static_cast<std::uint16_t>(v));
            self(self, std::max(top, v));
            s.pop_back();
        }
    };
    rec(rec, -1);
}

BEElement random_basis(int arity, int degree, const Field& F, std::mt19937& rng) {
    const PermTable& T = PermTable::get(arity);
    std::uniform_int_distribution<int> pick(0, T.order() - 1);
    Simplex s;
    while (static_cast<int>(s.size()) < degree + 1) {
        int r = pick(rng);
        if (!s.empty() && s.back() == r) continue;
        s.push_back(static_cast<std::uint16_t>(r));
    }
    BEElement x(arity);
    x.add(s, static_cast<Elt>(1 + rng() % (F.p() - 1)), F);
    return x;
}

BEElement signed_copy(const BEElement& x, long long e, const Field& F) {
    BEElement out(x.arity());
    out.add(x, F.sign(e), F);
    return out;
}

BEElement plus(const BEElement& a, const BEElement& b, const Field& F) {
    BEElement out = a;
    out.add(b, 1, F);
    return out;
}

void check_compositions(Verification& V, const BEElement& x, const BEElement& y, const BEElement& z,
                        const Field& F) {
    auto& seq = V.tally("be.sequential_associativity");
    auto& par = V.tally("be.parallel_associativity");
    for (int i = 1; i <= x.arity(); ++i)
        for (int j = 1; j <= y.arity(); ++j) {
            auto lhs = be_partial_compose(be_partial_compose(x, i, y, F), i + j - 1, z, F);
            auto rhs = be_partial_compose(x, i, be_partial_compose(y, j, z, F), F);
            record(seq, lhs == rhs);
        }
    for (int i = 1; i <= x.arity(); ++i)
        for (int j = i + 1; j <= x.arity(); ++j) {
            // (x o_i y) o_{j + |y| - 1} z = (-1)^{|y||z|} (x o_j z) o_i y
            auto lhs = be_partial_compose(be_partial_compose(x, i, y, F), j + y.arity() - 1, z, F);
            auto rhs = be_partial_compose(be_partial_compose(x, j, z, F), i, y, F);
            record(par, lhs == signed_copy(rhs, static_cast<long long>(be_degree(y)) * be_degree(z), F));
        }
}

void check_equivariance(Verification& V, const BEElement& x, const BEElement& y, const Field& F) {
    auto& eq1 = V.tally("be.equivariance_outer");
    auto& eq2 = V.tally("be.equivariance_inner");
    auto& leib = V.tally("be.composition_leibniz");
    const int k = x.arity();
    for (int i = 1; i <= k; ++i) {
        std::vector<int> sizes(k, 1);
        sizes[i - 1] = y.arity();
        for (auto& s : all_perms(k)) {
            auto lhs = be_partial_compose(be_act(s, x, F), i, y, F);
            auto rhs = be_act(block_permutation(s, sizes), be_partial_compose(x, s.inverse()(i), y, F), F);
            record(eq1, lhs == rhs);
        }
        for (auto& t : all_perms(y.arity())) {
            std::vector<Perm> blocks(k, Perm::identity(1));
            blocks[i - 1] = t;
            auto lhs = be_partial_compose(x, i, be_act(t, y, F), F);
            auto rhs = be_act(direct_sum(blocks), be_partial_compose(x, i, y, F), F);
            record(eq2, lhs == rhs);
        }
        auto lhs = be_differential(be_partial_compose(x, i, y, F), F);
        auto rhs = plus(be_partial_compose(be_differential(x, F), i, y, F),
                        signed_copy(be_partial_compose(x, i, be_differential(y, F), F), be_degree(x), F), F);
        record(leib, lhs == rhs);
    }
}

}  // namespace

Verification verify_barratt_eccles(const Field& F, int max_arity, int max_degree, int samples, std::uint32_t seed) {
    Verification V;
    auto& lit = V.tally("be.d2_literal");
    auto& pat = V.tally("be.d2_patterns");
    const long long literal_limit = 300000;
    for (int k = 1; k <= max_arity; ++k) {
        const int order = PermTable::get(k).order();
        for (int l = 0; l <= max_degree; ++l) {
            if (basis_count(k, l) <= literal_limit) {
                for (auto& s : be_basis(k, l))
                    record(lit, be_differential(be_differential(BEElement::basis(k, s), F), F).is_zero());
            } else {
                std::vector<Simplex> ps;
                patterns(l + 1, order, ps);
                for (auto& s : ps)
                    record(pat, be_differential(be_differential(BEElement::basis(k, s), F), F).is_zero());
            }
        }
    }
    // exhaustive small pieces: arity 2 up to total degree 3, arity 3 in degree <= 1
    std::vector<BEElement> ar2, ar3;
    for (int l = 0; l <= 2; ++l)
        for (auto& s : be_basis(2, l)) ar2.push_back(BEElement::basis(2, s));
    for (int l = 0; l <= 1; ++l)
        for (auto& s : be_basis(3, l)) ar3.push_back(BEElement::basis(3, s));
    for (auto& x : ar2)
        for (auto& y : ar2)
            for (auto& z : ar2)
                if (be_degree(x) + be_degree(y) + be_degree(z) <= 3) check_compositions(V, x, y, z, F);
    for (auto& x : ar3)
        for (auto& y : ar2)
            if (be_degree(y) <= 1) check_equivariance(V, x, y, F);
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> deg(0, 2);
    for (int t = 0; t < samples; ++t) {
        auto x = random_basis(2, deg(rng), F, rng);
        auto y = random_basis(2, deg(rng), F, rng);
        auto z = random_basis(2, deg(rng), F, rng);
        check_compositions(V, x, y, z, F);
        if (t % 10 == 0) check_equivariance(V, random_basis(3, deg(rng), F, rng), random_basis(2, deg(rng), F, rng), F);
    }
    return V;
}

}  // namespace opalg
