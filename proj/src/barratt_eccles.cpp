#include "opalg/barratt_eccles.hpp"

#include <algorithm>
#include <memory>
#include <mutex>

namespace opalg {

PermTable::PermTable(int k) : k_(k), perms_(all_perms(k)) {
    const std::size_t n = perms_.size();
    mul_.resize(n * n);
    op_.resize(n);
    inv_.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) mul_[a * n + b] = rank(perms_[a] * perms_[b]);
        op_[a] = k > 0 ? rank(opalg::op(perms_[a])) : 0;
        inv_[a] = rank(perms_[a].inverse());
    }
}

const PermTable& PermTable::get(int k) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<PermTable>> tables;
    if (k < 0 || k > 7) throw MathError("arity outside the supported range 0..7");
    std::lock_guard<std::mutex> lock(mu);
    auto it = tables.find(k);
    if (it == tables.end()) it = tables.emplace(k, std::unique_ptr<PermTable>(new PermTable(k))).first;
    return *it->second;
}

int PermTable::rank(const Perm& p) const {
    // Lehmer code in lexicographic order
    const int k = p.size();
    int r = 0;
    for (int i = 1; i <= k; ++i) {
        int smaller = 0;
        for (int j = i + 1; j <= k; ++j)
            if (p(j) < p(i)) ++smaller;
        r = r * (k - i + 1) + smaller;
    }
    return r;
}

bool is_nondegenerate(const Simplex& s) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] == s[i - 1]) return false;
    return !s.empty();
}

BEElement BEElement::basis(const std::vector<Perm>& perms) {
    if (perms.empty()) throw MathError("empty Barratt-Eccles simplex");
    const int k = perms[0].size();
    const PermTable& T = PermTable::get(k);
    Simplex s;
    for (auto& p : perms) {
        if (p.size() != k) throw MathError("permutations of different sizes in one simplex");
        s.push_back(static_cast<std::uint16_t>(T.rank(p)));
    }
    if (!is_nondegenerate(s)) throw MathError("two consecutive permutations are equal");
    BEElement x(k);
    x.terms_[s] = 1;
    return x;
}

BEElement BEElement::basis(int arity, const Simplex& s) {
    if (!is_nondegenerate(s)) throw MathError("degenerate Barratt-Eccles simplex");
    BEElement x(arity);
    x.terms_[s] = 1;
    return x;
}

void BEElement::add(const Simplex& s, Elt c, const Field& F) {
    if (c == 0 || !is_nondegenerate(s)) return;
    auto it = terms_.find(s);
    if (it == terms_.end()) {
        terms_.emplace(s, c);
    } else {
        it->second = F.add(it->second, c);
        if (it->second == 0) terms_.erase(it);
    }
}

void BEElement::add(const BEElement& x, Elt c, const Field& F) {
    if (x.is_zero()) return;
    if (arity_ != x.arity_) throw MathError("adding Barratt-Eccles elements of different arities");
    for (auto& [s, v] : x.terms_) add(s, F.mul(c, v), F);
}

Elt BEElement::coeff(const Simplex& s) const {
    auto it = terms_.find(s);
    return it == terms_.end() ? 0 : it->second;
}

BEElement be_differential(const BEElement& x, const Field& F) {
    BEElement out(x.arity());
    for (auto& [s, c] : x.terms()) {
        if (s.size() < 2) continue;
        for (std::size_t i = 0; i < s.size(); ++i) {
            Simplex f;
            f.reserve(s.size() - 1);
            for (std::size_t j = 0; j < s.size(); ++j)
                if (j != i) f.push_back(s[j]);
            out.add(f, F.mul(c, F.sign(static_cast<long long>(i))), F);
        }
    }
    return out;
}

BEElement be_act(const Perm& p, const BEElement& x, const Field& F) {
    if (p.size() != x.arity()) throw MathError("permutation size does not match the arity");
    const PermTable& T = PermTable::get(x.arity());
    int r = T.rank(p);
    BEElement out(x.arity());
    for (auto& [s, c] : x.terms()) {
        Simplex t(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) t[i] = static_cast<std::uint16_t>(T.mul(r, s[i]));
        out.add(t, c, F);
    }
    return out;
}

namespace {

// Enumerates lattice paths from (0,0) to (d,e) as step strings (false = first
// coordinate, true = second) together with the signature of the shuffle.
void for_each_path(int d, int e, const std::function<void(const std::vector<bool>&, int)>& fn) {
    std::vector<bool> steps(d + e, false);
    std::function<void(int, int, int, int)> rec = [&](int pos, int rd, int re, int inv) {
        if (pos == d + e) {
            fn(steps, inv);
            return;
        }
        if (rd > 0) {
            steps[pos] = false;
            // every earlier second-coordinate step is an inversion
            rec(pos + 1, rd - 1, re, inv + (e - re));
        }
        if (re > 0) {
            steps[pos] = true;
            rec(pos + 1, rd, re - 1, inv);
        }
    };
    rec(0, d, e, 0);
}

}  // namespace

BEElement be_partial_compose(const BEElement& x, int i, const BEElement& y, const Field& F) {
    const int k = x.arity(), l = y.arity();
    if (i < 1 || i > k) throw MathError("composition slot out of range");
    const int n = k + l - 1;
    const PermTable& Tx = PermTable::get(k);
    const PermTable& Ty = PermTable::get(l);
    const PermTable& Tn = PermTable::get(n);
    std::map<std::pair<int, int>, int> memo;
    auto comp = [&](int a, int b) {
        auto key = std::make_pair(a, b);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        int r = Tn.rank(partial_compose(Tx.perm(a), i, Ty.perm(b)));
        memo.emplace(key, r);
        return r;
    };
    BEElement out(n);
    for (auto& [sx, cx] : x.terms())
        for (auto& [sy, cy] : y.terms()) {
            const int d = static_cast<int>(sx.size()) - 1, e = static_cast<int>(sy.size()) - 1;
            Elt c = F.mul(cx, cy);
            for_each_path(d, e, [&](const std::vector<bool>& steps, int inv) {
                Simplex t;
                t.reserve(d + e + 1);
                int a = 0, b = 0;
                t.push_back(static_cast<std::uint16_t>(comp(sx[a], sy[b])));
                for (bool up : steps) {
                    if (up)
                        ++b;
                    else
                        ++a;
                    t.push_back(static_cast<std::uint16_t>(comp(sx[a], sy[b])));
                }
                out.add(t, F.mul(c, F.sign(inv)), F);
            });
        }
    return out;
}

BEElement be_op(const BEElement& x, const Field& F) {
    const PermTable& T = PermTable::get(x.arity());
    BEElement out(x.arity());
    for (auto& [s, c] : x.terms()) {
        Simplex t(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) t[i] = static_cast<std::uint16_t>(T.op(s[i]));
        out.add(t, c, F);
    }
    return out;
}

BETensor be_diagonal(const BEElement& x, const Field& F) {
    BETensor out;
    for (auto& [s, c] : x.terms())
        for (std::size_t i = 0; i < s.size(); ++i) {
            Simplex a(s.begin(), s.begin() + i + 1), b(s.begin() + i, s.end());
            auto key = std::make_pair(a, b);
            Elt v = F.add(out.count(key) ? out[key] : 0, c);
            if (v == 0)
                out.erase(key);
            else
                out[key] = v;
        }
    return out;
}

BEElement be_F(const BEElement& x, const Field& F) {
    const int k = x.arity();
    if (k < 1) throw MathError("F_k needs arity at least 1");
    const PermTable& T = PermTable::get(k);
    const PermTable& Tk = PermTable::get(k - 1);
    BEElement out(k - 1);
    for (auto& [s, c] : x.terms()) {
        Simplex t(s.size());
        for (std::size_t i = 0; i < s.size(); ++i)
            t[i] = static_cast<std::uint16_t>(Tk.rank(delete_input(T.perm(s[i]), 1)));
        out.add(t, c, F);
    }
    return out;
}

BEElement be_G(const BEElement& x, const Field& F) {
    if (x.arity() == 0) {
        // (1,2) o_2 (unit of E_+(0)) is the identity of E(1)
        BEElement out(1);
        for (auto& [s, c] : x.terms())
            if (s.size() == 1) out.add(Simplex{0}, c, F);
        return out;
    }
    return be_partial_compose(BEElement::basis({Perm({1, 2})}), 2, x, F);
}

namespace {

int phi(const PermTable& T, int r) {
    // move the value 1 to the front: G F on a single permutation
    const Perm& p = T.perm(r);
    std::vector<int> w{1};
    for (int v : p.values())
        if (v != 1) w.push_back(v);
    return T.rank(Perm(w));
}

}  // namespace

BEElement prism_homotopy(const BEElement& x, const Field& F) {
    const PermTable& T = PermTable::get(x.arity());
    BEElement out(x.arity());
    for (auto& [s, c] : x.terms()) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            Simplex t(s.begin(), s.begin() + i + 1);
            for (std::size_t j = i; j < s.size(); ++j) t.push_back(static_cast<std::uint16_t>(phi(T, s[j])));
            out.add(t, F.mul(c, F.sign(static_cast<long long>(i))), F);
        }
    }
    return out;
}

OrbitHomotopy::OrbitHomotopy(int arity, int max_degree, const Field& F)
    : arity_(arity), max_degree_(max_degree), F_(F) {
    if (arity < 1) throw MathError("homotopy needs arity at least 1");
}

namespace {

// Element tau of S_k (fixing 1) bringing s_0 to the orbit normal form in which
// the values 2..k appear in increasing order.
int normalizer(const PermTable& T, int r0) {
    const Perm& p = T.perm(r0);
    std::vector<int> tau(p.size() + 1, 0);
    tau[1] = 1;
    int next = 2;
    for (int v : p.values())
        if (v != 1) tau[v] = next++;
    return T.rank(Perm(std::vector<int>(tau.begin() + 1, tau.end())));
}

}  // namespace

BEElement OrbitHomotopy::on_basis(const Simplex& s) {
    const PermTable& T = PermTable::get(arity_);
    if (static_cast<int>(s.size()) - 1 > max_degree_)
        throw MathError("homotopy requested above its degree bound");
    int tau = normalizer(T, s[0]);
    Simplex rep(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) rep[i] = static_cast<std::uint16_t>(T.mul(tau, s[i]));
    auto it = cache_.find(rep);
    if (it == cache_.end()) {
        BEElement x = BEElement::basis(arity_, rep);
        BEElement target = be_G(be_F(x, F_), F_);
        target.add(x, F_.neg(1), F_);
        if (rep.size() > 1) target.add(apply(be_differential(x, F_)), F_.neg(1), F_);
        // particular preimage under d by the cone contraction on the identity
        BEElement h(arity_);
        for (auto& [t, c] : target.terms()) {
            if (t[0] == T.identity()) continue;
            Simplex u{static_cast<std::uint16_t>(T.identity())};
            u.insert(u.end(), t.begin(), t.end());
            h.add(u, c, F_);
        }
        it = cache_.emplace(rep, h).first;
    }
    return be_act(T.perm(T.inv(tau)), it->second, F_);
}

BEElement OrbitHomotopy::apply(const BEElement& x) {
    if (x.arity() != arity_) throw MathError("homotopy applied in the wrong arity");
    BEElement out(arity_);
    for (auto& [s, c] : x.terms()) out.add(on_basis(s), c, F_);
    return out;
}

std::vector<Simplex> be_basis(int arity, int degree) {
    const PermTable& T = PermTable::get(arity);
    std::vector<Simplex> out;
    const int n = T.order();
    if (n == 1 && degree > 0) return out;
    Simplex cur;
    std::function<void()> rec = [&]() {
        if (static_cast<int>(cur.size()) == degree + 1) {
            out.push_back(cur);
            return;
        }
        for (int r = 0; r < n; ++r) {
            if (!cur.empty() && cur.back() == r) continue;
            cur.push_back(static_cast<std::uint16_t>(r));
            rec();
            cur.pop_back();
        }
    };
    rec();
    return out;
}

std::map<SurjectionWord, Elt> table_reduction(const BEElement& x, const Field& F) {
    const int k = x.arity();
    const PermTable& T = PermTable::get(k);
    std::map<SurjectionWord, Elt> out;
    for (auto& [s, c] : x.terms()) {
        const int d = static_cast<int>(s.size()) - 1;
        if (d > 0 && F.p() != 2)
            throw MathError("positive-degree cochain operations are implemented over F_2 only");
        std::vector<int> r(d + 1, 1);
        std::function<void(int, int)> rec = [&](int row, int left) {
            if (row == d) {
                r[d] = left;
                if (left < 1) return;
                std::vector<char> finished(k + 1, 0);
                std::vector<int> word;
                for (int i = 0; i <= d; ++i) {
                    std::vector<int> rem;
                    for (int v : T.perm(s[i]).values())
                        if (!finished[v]) rem.push_back(v);
                    if (static_cast<int>(rem.size()) < r[i]) return;
                    if (i == d && static_cast<int>(rem.size()) != r[i]) return;
                    for (int j = 0; j < r[i]; ++j) word.push_back(rem[j]);
                    for (int j = 0; j + 1 < r[i]; ++j) finished[rem[j]] = 1;
                }
                for (std::size_t j = 1; j < word.size(); ++j)
                    if (word[j] == word[j - 1]) return;
                SurjectionWord u{k, word};
                Elt v = F.add(out.count(u) ? out[u] : 0, c);
                if (v == 0)
                    out.erase(u);
                else
                    out[u] = v;
                return;
            }
            for (int ri = 1; ri <= left - (d - row); ++ri) {
                r[row] = ri;
                rec(row + 1, left - ri);
            }
        };
        rec(0, k + d);
    }
    return out;
}

Elt surjection_eval(const SurjectionWord& u, int n, const std::function<int(int)>& degree,
                    const std::function<Elt(int, const std::vector<int>&)>& value, const Field& F) {
    const int m = static_cast<int>(u.word.size());
    const int k = u.arity;
    int total = 0;
    for (int i = 1; i <= k; ++i) total += degree(i);
    if (total - u.degree() != n) return 0;
    if (u.degree() > 0 && F.p() != 2)
        throw MathError("positive-degree cochain operations are implemented over F_2 only");
    // last occurrence of each value, for the Koszul sign of degree-0 words
    Elt acc = 0;
    std::vector<int> cuts(m + 1, 0);
    cuts[m] = n;
    std::function<void(int)> rec = [&](int j) {
        if (j == m) {
            std::vector<std::vector<int>> faces(k + 1);
            for (int t = 0; t < m; ++t)
                for (int v = cuts[t]; v <= cuts[t + 1]; ++v) faces[u.word[t]].push_back(v);
            Elt prod = 1;
            for (int i = 1; i <= k; ++i) {
                auto& f = faces[i];
                if (static_cast<int>(f.size()) != degree(i) + 1) return;
                for (std::size_t a = 1; a < f.size(); ++a)
                    if (f[a] <= f[a - 1]) return;
                prod = F.mul(prod, value(i, f));
                if (prod == 0) return;
            }
            if (u.degree() == 0) {
                // Koszul sign of reordering the factors from word order to 1..k
                long long sgn = 0;
                for (int a = 0; a < m; ++a)
                    for (int b = a + 1; b < m; ++b)
                        if (u.word[a] > u.word[b]) sgn += static_cast<long long>(degree(u.word[a])) * degree(u.word[b]);
                prod = F.mul(prod, F.sign(sgn));
            }
            acc = F.add(acc, prod);
            return;
        }
        for (int c = cuts[j - 1 < 0 ? 0 : j - 1]; c <= n; ++c) {
            cuts[j] = c;
            rec(j + 1);
        }
    };
    if (m == 0) return 0;
    cuts[0] = 0;
    rec(1);
    return acc;
}

}  // namespace opalg
