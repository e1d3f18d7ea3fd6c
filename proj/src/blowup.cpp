#include "opalg/blowup.hpp"

#include <algorithm>
#include <bit>

namespace opalg {

FilteredComplex::FilteredComplex(std::shared_ptr<const SimplicialComplex> K, std::vector<int> level, int n)
    : K_(std::move(K)), level_(std::move(level)), n_(n) {
    if (n_ < 0) throw InputError("filtered complex: negative formal dimension");
    if (static_cast<int>(level_.size()) != K_->count(0)) throw InputError("filtered complex: one level per vertex");
    for (int l : level_)
        if (l < 0 || l > n_) throw InputError("filtered complex: level outside 0..formal_dimension");
    bool any = false;
    for (int v = 0; v < K_->count(0); ++v) any = any || level_[v] == n_;
    if (!any) throw InputError("filtered complex: no regular simplex");
}

FilteredComplex FilteredComplex::from_data(const SimplicialComplexData& d) {
    if (d.formal_dimension < 0) throw InputError("filtered complex: 'formal_dimension' is required");
    if (d.filtration.empty()) throw InputError("filtered complex: 'filtration' is required");
    auto K = std::make_shared<const SimplicialComplex>(d);
    std::vector<int> level(K->count(0), -1);
    for (int v = 0; v < K->count(0); ++v) {
        auto it = d.filtration.find(v);
        if (it == d.filtration.end())
            throw InputError("filtered complex: vertex " + std::to_string(d.vertices[v]) + " has no level");
        level[v] = it->second;
    }
    return FilteredComplex(K, level, d.formal_dimension);
}

FilteredComplex FilteredComplex::trivial(std::shared_ptr<const SimplicialComplex> K, int n) {
    std::vector<int> level(K->count(0), n);
    return FilteredComplex(std::move(K), level, n);
}

std::vector<SimplexVerts> FilteredComplex::decomposition(const SimplexVerts& s) const {
    std::vector<SimplexVerts> parts(n_ + 1);
    for (int v : s) parts[level_[v]].push_back(v);
    return parts;
}

bool FilteredComplex::is_regular(const SimplexVerts& s) const {
    for (int v : s)
        if (level_[v] == n_) return true;
    return false;
}

int FilteredComplex::dim_in(const SimplexVerts& s, int i) const {
    int c = 0;
    for (int v : s) c += level_[v] <= i;
    return c - 1;
}

namespace {

int popcount(std::uint32_t m) { return std::popcount(m); }

// Sign of the permutation sorting `v`.
long long inversions(const std::vector<int>& v) {
    long long s = 0;
    for (std::size_t a = 0; a < v.size(); ++a)
        for (std::size_t b = a + 1; b < v.size(); ++b) s += v[a] > v[b];
    return s;
}

}  // namespace

BlowupCochains::BlowupCochains(std::shared_ptr<const FilteredComplex> X, const Field& F) : X_(std::move(X)), F_(F) {
    const SimplicialComplex& K = X_->complex();
    const int n = X_->n();
    for (int d = 0; d <= K.dimension(); ++d)
        for (auto& s : K.simplices(d))
            if (X_->is_regular(s)) {
                regular_index_[s] = static_cast<int>(regular_.size());
                regular_.push_back(s);
            }
    local_.resize(regular_.size());
    for (std::size_t r = 0; r < regular_.size(); ++r) {
        Local& L = local_[r];
        L.parts = X_->decomposition(regular_[r]);
        std::vector<std::vector<std::uint32_t>> choices(n + 1);
        for (int i = 0; i < n; ++i) {
            const int m = static_cast<int>(L.parts[i].size());
            for (std::uint32_t mask = 1; mask < (1u << (m + 1)); ++mask) choices[i].push_back(mask);
        }
        const int mn = static_cast<int>(L.parts[n].size());
        for (std::uint32_t mask = 1; mask < (1u << mn); ++mask) choices[n].push_back(mask);
        LocalTensor t;
        t.masks.assign(n + 1, 0);
        auto rec = [&](auto&& self, int i, int deg) -> void {
            if (i > n) {
                L.tensors[deg].push_back(t);
                return;
            }
            for (auto m : choices[i]) {
                t.masks[i] = m;
                self(self, i + 1, deg + popcount(m) - 1);
            }
        };
        rec(rec, 0, 0);
        for (auto& [deg, ts] : L.tensors) {
            top_ = std::max(top_, deg);
            for (std::size_t j = 0; j < ts.size(); ++j) {
                coord_index_[deg][{static_cast<int>(r), ts[j]}] = static_cast<int>(coords_[deg].size());
                coords_[deg].push_back({static_cast<int>(r), static_cast<int>(j)});
            }
        }
    }
}

int BlowupCochains::coord_count(int k) const {
    auto it = coords_.find(k);
    return it == coords_.end() ? 0 : static_cast<int>(it->second.size());
}

std::pair<int, const LocalTensor*> BlowupCochains::coord(int k, int c) const {
    auto [s, j] = coords_.at(k)[c];
    return {s, &local_[s].tensors.at(k)[j]};
}

int BlowupCochains::coord_index(int k, int sigma, const LocalTensor& t) const {
    auto it = coord_index_.find(k);
    if (it == coord_index_.end()) return -1;
    auto jt = it->second.find({sigma, t});
    return jt == it->second.end() ? -1 : jt->second;
}

int BlowupCochains::tensor_degree(const LocalTensor& t) const {
    int d = 0;
    for (auto m : t.masks) d += popcount(m) - 1;
    return d;
}

SparseVec BlowupCochains::local_d(int sigma, const LocalTensor& t) const {
    const Local& L = local_[sigma];
    const int n = X_->n();
    const int k = tensor_degree(t);
    std::map<int, Elt> acc;
    int eps = 0;
    for (int i = 0; i <= n; ++i) {
        const int width = static_cast<int>(L.parts[i].size()) + (i < n ? 1 : 0);
        const std::uint32_t m = t.masks[i];
        for (int u = 0; u < width; ++u) {
            if (m & (1u << u)) continue;
            int below = popcount(m & ((1u << u) - 1));
            LocalTensor s = t;
            s.masks[i] = m | (1u << u);
            int idx = coord_index(k + 1, sigma, s);
            Elt c = F_.sign(eps + below);
            Elt v = F_.add(acc[idx], c);
            if (v)
                acc[idx] = v;
            else
                acc.erase(idx);
        }
        eps += popcount(m) - 1;
    }
    return SparseVec(acc.begin(), acc.end());
}

SparseVec BlowupCochains::d(int k, const SparseVec& v) const {
    SparseVec out;
    for (auto& [c, x] : v) {
        auto [s, t] = coord(k, c);
        SparseVec part = local_d(s, *t);
        axpy(out, x, part, F_);
    }
    return out;
}

LocalTensor BlowupCochains::restrict_to(int sigma, int tau, const LocalTensor& t, bool& ok) const {
    const Local& S = local_[sigma];
    const Local& T = local_[tau];
    const int n = X_->n();
    LocalTensor r;
    r.masks.assign(n + 1, 0);
    ok = true;
    for (int i = 0; i <= n; ++i) {
        const auto& sp = S.parts[i];
        const auto& tp = T.parts[i];
        const int ms = static_cast<int>(sp.size()), mt = static_cast<int>(tp.size());
        std::uint32_t out = 0;
        for (int b = 0; b < ms; ++b) {
            if (!(t.masks[i] & (1u << b))) continue;
            auto it = std::find(tp.begin(), tp.end(), sp[b]);
            if (it == tp.end()) {
                ok = false;
                return r;
            }
            out |= 1u << (it - tp.begin());
        }
        if (i < n && (t.masks[i] & (1u << ms))) out |= 1u << mt;
        r.masks[i] = out;
    }
    return r;
}

const std::vector<SparseVec>& BlowupCochains::families(int k) const {
    auto it = families_.find(k);
    if (it != families_.end()) return it->second;
    const int nc = coord_count(k);
    std::vector<SparseVec> rows;
    // ω_τ = ω_σ restricted, for every regular codimension-one face τ of σ
    for (std::size_t s = 0; s < regular_.size(); ++s) {
        const auto& sv = regular_[s];
        if (sv.size() < 2) continue;
        auto ts = local_[s].tensors.find(k);
        for (std::size_t drop = 0; drop < sv.size(); ++drop) {
            SimplexVerts face = sv;
            face.erase(face.begin() + static_cast<long>(drop));
            auto ft = regular_index_.find(face);
            if (ft == regular_index_.end()) continue;
            const int tau = ft->second;
            std::map<int, SparseVec> by_target;
            auto tt = local_[tau].tensors.find(k);
            if (tt != local_[tau].tensors.end())
                for (auto& t : tt->second) by_target[coord_index(k, tau, t)] = {};
            if (ts != local_[s].tensors.end())
                for (auto& t : ts->second) {
                    bool ok;
                    LocalTensor r = restrict_to(static_cast<int>(s), tau, t, ok);
                    if (!ok) continue;
                    by_target[coord_index(k, tau, r)].push_back({coord_index(k, static_cast<int>(s), t), F_.neg(1)});
                }
            for (auto& [target, row] : by_target) {
                row.push_back({target, 1});
                std::sort(row.begin(), row.end());
                rows.push_back(row);
            }
        }
    }
    SparseMatrix M(static_cast<int>(rows.size()), nc);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (auto& [c, v] : rows[r]) M.add(static_cast<int>(r), c, v, F_);
    return families_[k] = kernel_basis(M, F_);
}

bool BlowupCochains::is_compatible(int k, const SparseVec& v) const {
    ColumnReducer red(F_, false);
    for (auto& f : families(k)) red.add(f);
    return red.contains(v);
}

bool BlowupCochains::tensor_allowable(int sigma, const LocalTensor& t, const Perversity& p) const {
    const Local& L = local_[sigma];
    const int n = X_->n();
    for (int c = 1; c <= n; ++c) {
        const int k = n - c;
        if (L.parts[k].empty()) continue;
        const int m = static_cast<int>(L.parts[k].size());
        if (t.masks[k] & (1u << m)) continue;  // not on Δ_k × {1}
        int tail = 0;
        for (int j = k + 1; j <= n; ++j) tail += popcount(t.masks[j]) - 1;
        if (tail > p[c]) return false;
    }
    return true;
}

std::vector<int> BlowupCochains::perverse_degree(int k, const SparseVec& v) const {
    const int n = X_->n();
    std::vector<int> out(n + 1, -1);
    for (auto& [c, x] : v) {
        auto [s, t] = coord(k, c);
        const Local& L = local_[s];
        for (int cc = 1; cc <= n; ++cc) {
            const int kk = n - cc;
            if (L.parts[kk].empty()) continue;
            if (t->masks[kk] & (1u << L.parts[kk].size())) continue;
            int tail = 0;
            for (int j = kk + 1; j <= n; ++j) tail += popcount(t->masks[j]) - 1;
            out[cc] = std::max(out[cc], tail);
        }
    }
    return out;
}

bool BlowupCochains::allowable(int k, const SparseVec& v, const Perversity& p) const {
    auto pd = perverse_degree(k, v);
    for (int c = 1; c <= X_->n(); ++c)
        if (pd[c] > p[c]) return false;
    return true;
}

const BlowupCochains::PComplex& BlowupCochains::pcomplex(const Perversity& p) const {
    if (p.n() != X_->n() || !is_gm(p)) throw MathError("perversity of the wrong formal dimension");
    auto it = pcomplexes_.find(p);
    if (it != pcomplexes_.end()) return it->second;
    PComplex P{FiniteComplex(F_, 0, top_), {}};
    for (int k = 0; k <= top_; ++k) {
        // ω = Σ a_f f over compatible families f, with ω and dω allowable
        const auto& fam = families(k);
        std::vector<char> bad_k(coord_count(k)), bad_k1(coord_count(k + 1));
        for (int c = 0; c < coord_count(k); ++c) {
            auto [s, t] = coord(k, c);
            bad_k[c] = !tensor_allowable(s, *t, p);
        }
        for (int c = 0; c < coord_count(k + 1); ++c) {
            auto [s, t] = coord(k + 1, c);
            bad_k1[c] = !tensor_allowable(s, *t, p);
        }
        std::map<int, int> row_of;
        SparseMatrix M(0, 0);
        std::vector<SparseVec> cols;
        for (auto& f : fam) {
            SparseVec col;
            for (auto& [c, v] : f)
                if (bad_k[c]) col.push_back({c, v});
            for (auto& [c, v] : d(k, f))
                if (bad_k1[c]) col.push_back({coord_count(k) + c, v});
            std::sort(col.begin(), col.end());
            cols.push_back(col);
        }
        SparseMatrix A(coord_count(k) + coord_count(k + 1), static_cast<int>(fam.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) A.set_col(static_cast<int>(j), cols[j]);
        auto ker = kernel_basis(A, F_);
        std::vector<SparseVec> basis;
        for (auto& z : ker) {
            SparseVec w;
            for (auto& [j, a] : z) axpy(w, a, fam[j], F_);
            basis.push_back(w);
        }
        P.basis[k] = std::move(basis);
        P.C.set_dim(k, static_cast<int>(P.basis[k].size()));
    }
    for (int k = 0; k < top_; ++k) {
        ColumnReducer red(F_, true);
        for (auto& b : P.basis[k + 1]) red.add(b);
        SparseMatrix D(P.C.dim(k + 1), P.C.dim(k));
        for (std::size_t j = 0; j < P.basis[k].size(); ++j) {
            SparseVec combo;
            if (!red.reduce(d(k, P.basis[k][j]), &combo).empty())
                throw MathError("blown-up complex is not closed under d");
            D.set_col(static_cast<int>(j), combo);
        }
        P.C.set_diff(k, D);
    }
    return pcomplexes_.emplace(p, std::move(P)).first->second;
}

const FiniteComplex& BlowupCochains::complex(const Perversity& p) const { return pcomplex(p).C; }

const std::vector<SparseVec>& BlowupCochains::basis(const Perversity& p, int k) const {
    static const std::vector<SparseVec> empty;
    const auto& P = pcomplex(p);
    auto it = P.basis.find(k);
    return it == P.basis.end() ? empty : it->second;
}

PerverseComplex BlowupCochains::perverse() const {
    const int n = X_->n();
    PerverseComplex Z(n, F_, 0, top_);
    const auto& P = gm_perversities(n);
    for (auto& p : P) Z.set_component(p, complex(p));
    for (auto& [a, b] : gm_covers(n)) {
        std::map<int, SparseMatrix> m;
        for (int k = 0; k <= top_; ++k) {
            const auto& Ba = basis(P[a], k);
            const auto& Bb = basis(P[b], k);
            ColumnReducer red(F_, true);
            for (auto& v : Bb) red.add(v);
            SparseMatrix M(static_cast<int>(Bb.size()), static_cast<int>(Ba.size()));
            for (std::size_t j = 0; j < Ba.size(); ++j) {
                SparseVec combo;
                if (!red.reduce(Ba[j], &combo).empty()) throw MathError("blown-up complexes are not nested");
                M.set_col(static_cast<int>(j), combo);
            }
            m[k] = M;
        }
        Z.set_map(P[a], P[b], m);
    }
    return Z;
}

SparseVec BlowupCochains::unit() const {
    SparseVec u;
    for (int c = 0; c < coord_count(0); ++c) u.push_back({c, 1});
    return u;
}

namespace {

// Coordinates of a family grouped by regular simplex.
std::map<int, std::vector<std::pair<const LocalTensor*, Elt>>> by_simplex(const BlowupCochains& N, int k,
                                                                           const SparseVec& v) {
    std::map<int, std::vector<std::pair<const LocalTensor*, Elt>>> out;
    for (auto& [c, x] : v) {
        auto [s, t] = N.coord(k, c);
        out[s].push_back({t, x});
    }
    return out;
}

// Alexander-Whitney cup of two faces of one simplex: nonzero when the last
// vertex of a is the first vertex of b.
std::uint32_t aw_mask(std::uint32_t a, std::uint32_t b) {
    const int top_a = 31 - std::countl_zero(a);
    const int low_b = std::countr_zero(b);
    if (top_a != low_b) return 0;
    return a | b;
}

}  // namespace

SparseVec BlowupCochains::cup(int k1, const SparseVec& a, int k2, const SparseVec& b) const {
    auto A = by_simplex(*this, k1, a), B = by_simplex(*this, k2, b);
    std::map<int, Elt> acc;
    const int n = X_->n();
    for (auto& [s, ta] : A) {
        auto it = B.find(s);
        if (it == B.end()) continue;
        for (auto& [x, cx] : ta)
            for (auto& [y, cy] : it->second) {
                LocalTensor r;
                r.masks.assign(n + 1, 0);
                bool zero = false;
                long long sgn = 0;
                for (int i = 0; i <= n && !zero; ++i) {
                    r.masks[i] = aw_mask(x->masks[i], y->masks[i]);
                    zero = r.masks[i] == 0;
                    for (int j = 0; j < i; ++j)
                        sgn += static_cast<long long>(popcount(x->masks[i]) - 1) * (popcount(y->masks[j]) - 1);
                }
                if (zero) continue;
                int idx = coord_index(k1 + k2, s, r);
                Elt v = F_.add(acc[idx], F_.mul(F_.sign(sgn), F_.mul(cx, cy)));
                if (v)
                    acc[idx] = v;
                else
                    acc.erase(idx);
            }
    }
    return SparseVec(acc.begin(), acc.end());
}

SparseVec BlowupCochains::eplus_action(const BEElement& x, const std::vector<std::pair<int, SparseVec>>& inputs) const {
    const int m = x.arity();
    if (static_cast<int>(inputs.size()) != m) throw MathError("arity does not match the number of inputs");
    const int n = X_->n();
    // iterated diagonal: terms (one simplex per factor, coefficient)
    struct DTerm {
        std::vector<Simplex> parts;
        Elt c;
    };
    std::vector<DTerm> terms;
    for (auto& [s, c] : x.terms()) terms.push_back({{s}, c});
    for (int f = 0; f < n; ++f) {
        std::vector<DTerm> next;
        for (auto& t : terms) {
            BETensor D = be_diagonal(BEElement::basis(m, t.parts.back()), F_);
            for (auto& [st, c] : D) {
                DTerm u = t;
                u.parts.back() = st.first;
                u.parts.push_back(st.second);
                u.c = F_.mul(t.c, c);
                next.push_back(u);
            }
        }
        terms = std::move(next);
    }
    std::map<Simplex, std::map<SurjectionWord, Elt>> tables;
    auto table = [&](const Simplex& s) -> const std::map<SurjectionWord, Elt>& {
        auto it = tables.find(s);
        if (it != tables.end()) return it->second;
        return tables[s] = table_reduction(BEElement::basis(m, s), F_);
    };
    int out_deg = -static_cast<int>(x.terms().empty() ? 0 : x.terms().begin()->first.size() - 1);
    std::vector<std::map<int, std::vector<std::pair<const LocalTensor*, Elt>>>> grouped;
    for (auto& [k, v] : inputs) {
        out_deg += k;
        grouped.push_back(by_simplex(*this, k, v));
    }
    std::map<int, Elt> acc;
    for (std::size_t s = 0; s < regular_.size(); ++s) {
        const Local& L = local_[s];
        std::vector<const std::vector<std::pair<const LocalTensor*, Elt>>*> in(m);
        bool empty = false;
        for (int i = 0; i < m; ++i) {
            auto it = grouped[i].find(static_cast<int>(s));
            if (it == grouped[i].end()) {
                empty = true;
                break;
            }
            in[i] = &it->second;
        }
        if (empty) continue;
        std::vector<int> choice(m, 0);
        // multilinear expansion over the local tensors of each input
        for (;;) {
            Elt coeff = 1;
            std::vector<const LocalTensor*> ts(m);
            for (int i = 0; i < m; ++i) {
                ts[i] = (*in[i])[choice[i]].first;
                coeff = F_.mul(coeff, (*in[i])[choice[i]].second);
            }
            for (auto& term : terms) {
                // factor f: act with parts[f] on the factor-f cochains
                std::vector<std::map<std::uint32_t, Elt>> outs(n + 1);
                long long sgn = 0;
                bool zero = false;
                for (int f = 0; f <= n && !zero; ++f) {
                    const int width = static_cast<int>(L.parts[f].size()) + (f < n ? 1 : 0);
                    int rest_x = 0;
                    for (int g = f + 1; g <= n; ++g) rest_x += static_cast<int>(term.parts[g].size()) - 1;
                    std::vector<int> deg_a(m), deg_b(m, 0);
                    for (int i = 0; i < m; ++i) {
                        deg_a[i] = popcount(ts[i]->masks[f]) - 1;
                        for (int g = f + 1; g <= n; ++g) deg_b[i] += popcount(ts[i]->masks[g]) - 1;
                    }
                    int sum_a = 0;
                    for (int i = 0; i < m; ++i) sum_a += deg_a[i];
                    sgn += static_cast<long long>(rest_x) * sum_a;
                    for (int i = 0; i < m; ++i)
                        for (int j = i + 1; j < m; ++j) sgn += static_cast<long long>(deg_b[i]) * deg_a[j];
                    const int fdeg = sum_a - (static_cast<int>(term.parts[f].size()) - 1);
                    if (fdeg < 0 || fdeg >= width) {
                        zero = true;
                        break;
                    }
                    const auto& tab = table(term.parts[f]);
                    for (std::uint32_t face = 1; face < (1u << width); ++face) {
                        if (popcount(face) - 1 != fdeg) continue;
                        std::vector<int> verts;
                        for (int b = 0; b < width; ++b)
                            if (face & (1u << b)) verts.push_back(b);
                        Elt val = 0;
                        for (auto& [u, cu] : tab) {
                            Elt e = surjection_eval(
                                u, fdeg, [&](int i) { return deg_a[i - 1]; },
                                [&](int i, const std::vector<int>& fc) -> Elt {
                                    std::uint32_t mask = 0;
                                    for (int q : fc) mask |= 1u << verts[q];
                                    return mask == ts[i - 1]->masks[f] ? 1 : 0;
                                },
                                F_);
                            val = F_.add(val, F_.mul(cu, e));
                        }
                        if (val) outs[f][face] = val;
                    }
                    if (outs[f].empty()) zero = true;
                }
                if (zero) continue;
                const Elt base = F_.mul(F_.mul(coeff, term.c), F_.sign(sgn));
                LocalTensor r;
                r.masks.assign(n + 1, 0);
                auto rec = [&](auto&& self, int f, Elt c) -> void {
                    if (f > n) {
                        int idx = coord_index(out_deg, static_cast<int>(s), r);
                        Elt v = F_.add(acc[idx], c);
                        if (v)
                            acc[idx] = v;
                        else
                            acc.erase(idx);
                        return;
                    }
                    for (auto& [mask, v] : outs[f]) {
                        r.masks[f] = mask;
                        self(self, f + 1, F_.mul(c, v));
                    }
                };
                rec(rec, 0, base);
            }
            int i = 0;
            while (i < m && ++choice[i] == static_cast<int>(in[i]->size())) choice[i++] = 0;
            if (i == m) break;
        }
    }
    return SparseVec(acc.begin(), acc.end());
}

SparseVec BlowupCochains::eplus_action(const BEElement& x, const std::vector<std::pair<int, SparseVec>>& inputs,
                                       const std::vector<Perversity>& perversities) const {
    const int n = X_->n();
    if (perversities.size() != inputs.size()) throw MathError("one perversity per input");
    Perversity sum = zero_perversity(n);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (perversities[i].n() != n) throw MathError("perversity of the wrong formal dimension");
        if (!allowable(inputs[i].first, inputs[i].second, perversities[i]))
            throw MathError("input is not allowable for its perversity");
        sum = pointwise_sum(sum, perversities[i]);
    }
    if (!leq(sum, top_perversity(n))) throw MathError("perversity overflow");
    return eplus_action(x, inputs);
}

bool simplex_allowable(const FilteredComplex& X, const SimplexVerts& s, const Perversity& p) {
    const int n = X.n();
    const int k = static_cast<int>(s.size()) - 1;
    for (int c = 2; c <= n; ++c) {
        const int dm = X.dim_in(s, n - c);
        if (dm >= 0 && dm > k - c + p[c]) return false;
    }
    return true;
}

IntersectionChains intersection_chains(const FilteredComplex& X, const Perversity& p, const Field& F) {
    if (p.n() != X.n() || !is_gm(p)) throw MathError("perversity of the wrong formal dimension");
    const SimplicialComplex& K = X.complex();
    const int top = K.dimension();
    FiniteComplex chains = K.chain_complex(F);
    IntersectionChains out{FiniteComplex(F, 0, top, Grading::Homological), {}};
    std::vector<std::vector<char>> ok(top + 1);
    for (int k = 0; k <= top; ++k)
        for (auto& s : K.simplices(k)) ok[k].push_back(simplex_allowable(X, s, p));
    for (int k = 0; k <= top; ++k) {
        // allowable k-chains whose boundary avoids the non-allowable (k-1)-simplices
        std::vector<int> cols;
        for (int i = 0; i < K.count(k); ++i)
            if (ok[k][i]) cols.push_back(i);
        SparseMatrix A(k > 0 ? K.count(k - 1) : 0, static_cast<int>(cols.size()));
        if (k > 0) {
            const SparseMatrix& bd = chains.diff(k);
            for (std::size_t j = 0; j < cols.size(); ++j) {
                SparseVec col;
                for (auto& [r, v] : bd.col(cols[j]))
                    if (!ok[k - 1][r]) col.push_back({r, v});
                A.set_col(static_cast<int>(j), col);
            }
        }
        std::vector<SparseVec> basis;
        for (auto& z : kernel_basis(A, F)) {
            SparseVec w;
            for (auto& [j, a] : z) w.push_back({cols[j], a});
            std::sort(w.begin(), w.end());
            basis.push_back(w);
        }
        out.C.set_dim(k, static_cast<int>(basis.size()));
        out.basis[k] = std::move(basis);
    }
    for (int k = 1; k <= top; ++k) {
        ColumnReducer red(F, true);
        for (auto& b : out.basis[k - 1]) red.add(b);
        SparseMatrix D(out.C.dim(k - 1), out.C.dim(k));
        for (std::size_t j = 0; j < out.basis[k].size(); ++j) {
            SparseVec combo;
            if (!red.reduce(chains.diff(k).apply(out.basis[k][j], F), &combo).empty())
                throw MathError("intersection chains are not closed under the boundary");
            D.set_col(static_cast<int>(j), combo);
        }
        out.C.set_diff(k, D);
    }
    return out;
}

SparseVec fundamental_cycle(const FilteredComplex& X, const Field& F) {
    const SimplicialComplex& K = X.complex();
    const int n = X.n();
    if (K.dimension() != n) throw InputError("fundamental cycle: complex dimension differs from the formal dimension");
    SparseVec zeta;
    if (!K.data().orientation.empty() || F.p() == 2) {
        zeta = K.fundamental_chain(F);
    } else {
        FiniteComplex C = K.chain_complex(F);
        auto ker = kernel_basis(C.diff(n), F);
        if (ker.size() != 1 || static_cast<int>(ker[0].size()) != K.count(n))
            throw InputError("fundamental cycle: no unique full-support top cycle; supply an orientation");
        zeta = scaled(ker[0], F.inv(ker[0].front().second), F);
    }
    if (!K.is_cycle(zeta, F)) throw InputError("fundamental cycle: ζ is not a cycle");
    const Perversity z = zero_perversity(n);
    for (auto& [i, c] : zeta)
        if (!simplex_allowable(X, K.simplices(n)[i], z) || !X.is_regular(K.simplices(n)[i]))
            throw InputError("fundamental cycle: ζ is not a cycle of I^0C_n");
    return zeta;
}

SparseVec cap_with_zeta(const BlowupCochains& N, int k, const SparseVec& omega, const SparseVec& zeta) {
    const FilteredComplex& X = N.space();
    const SimplicialComplex& K = X.complex();
    const Field& F = N.field();
    const int n = X.n();
    const int out_dim = n - k;
    std::map<int, Elt> acc;
    if (out_dim < 0) return {};
    std::map<int, Elt> zc;
    for (auto& [i, c] : zeta) zc[i] = c;
    for (auto& [c, x] : omega) {
        auto [s, t] = N.coord(k, c);
        const SimplexVerts& sv = N.regular_simplices()[s];
        if (static_cast<int>(sv.size()) != n + 1) continue;
        auto zt = zc.find(K.index(sv));
        if (zt == zc.end()) continue;
        const auto parts = X.decomposition(sv);
        // Δ̃_σ carries the orientation of σ: the join order of the parts
        // against the vertex order
        std::vector<int> join_order;
        for (auto& part : parts) join_order.insert(join_order.end(), part.begin(), part.end());
        // factorwise cap with the top simplex: f(front face) . back face
        std::vector<std::uint32_t> chain(n + 1);
        bool zero = false;
        long long sgn = inversions(join_order);
        int capped_before = 0;
        for (int f = 0; f <= n && !zero; ++f) {
            const int width = static_cast<int>(parts[f].size()) + (f < n ? 1 : 0);
            const std::uint32_t mask = t->masks[f];
            const int a = popcount(mask) - 1;
            const std::uint32_t full = (1u << width) - 1;
            if (mask != (1u << (a + 1)) - 1) {
                zero = true;
                break;
            }
            chain[f] = full & ~((1u << a) - 1);
            // Koszul sign for moving the cochain factor past the earlier capped factors
            sgn += static_cast<long long>(a) * capped_before;
            capped_before += width - 1 - a;
        }
        if (zero) continue;
        // μ_* through the shuffle triangulation of the product of faces: a
        // vertex tuple goes to its first non-apex entry
        std::vector<std::vector<int>> faces(n + 1);
        for (int f = 0; f <= n; ++f) {
            const int m = static_cast<int>(parts[f].size());
            for (int b = 0; b <= m; ++b)
                if (chain[f] & (1u << b)) faces[f].push_back(b < m ? parts[f][b] : -1);
        }
        std::vector<int> pos(n + 1, 0), steps;
        auto image = [&]() {
            for (int f = 0; f <= n; ++f)
                if (faces[f][pos[f]] >= 0) return faces[f][pos[f]];
            return -1;
        };
        std::vector<int> verts{image()};
        auto rec = [&](auto&& self) -> void {
            if (static_cast<int>(verts.size()) == out_dim + 1) {
                std::vector<int> sorted = verts;
                std::sort(sorted.begin(), sorted.end());
                if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return;
                const long long e = sgn + inversions(steps) + inversions(verts);
                const int idx = K.index(sorted);
                Elt v = F.add(acc[idx], F.mul(F.sign(e), F.mul(x, zt->second)));
                if (v)
                    acc[idx] = v;
                else
                    acc.erase(idx);
                return;
            }
            for (int f = 0; f <= n; ++f) {
                if (pos[f] + 1 >= static_cast<int>(faces[f].size())) continue;
                ++pos[f];
                steps.push_back(f);
                verts.push_back(image());
                if (verts.back() != verts[verts.size() - 2]) self(self);
                verts.pop_back();
                steps.pop_back();
                --pos[f];
            }
        };
        int dom_dim = 0;
        for (int f = 0; f <= n; ++f) dom_dim += static_cast<int>(faces[f].size()) - 1;
        if (dom_dim == out_dim) rec(rec);
    }
    return SparseVec(acc.begin(), acc.end());
}

CapDuality cap_duality(const BlowupCochains& N, const Perversity& p) {
    const FilteredComplex& X = N.space();
    const Field& F = N.field();
    const int n = X.n();
    CapDuality out;
    out.zeta = fundamental_cycle(X, F);
    IntersectionChains I = intersection_chains(X, p, F);
    const FiniteComplex& S = N.complex(p);
    out.target = std::make_shared<FiniteComplex>(F, S.lo(), S.hi());
    for (int k = S.lo(); k <= S.hi(); ++k)
        if (n - k >= 0 && n - k <= I.C.hi()) out.target->set_dim(k, I.C.dim(n - k));
    for (int k = S.lo(); k < S.hi(); ++k)
        if (n - k - 1 >= 0 && n - k <= I.C.hi()) out.target->set_diff(k, I.C.diff(n - k));
    out.map.source = &N.complex(p);
    out.map.target = out.target.get();
    for (int k = S.lo(); k <= S.hi(); ++k) {
        ColumnReducer red(F, true);
        if (n - k >= 0) {
            for (auto& b : I.basis[n - k]) red.add(b);
        }
        const auto& B = N.basis(p, k);
        SparseMatrix M(out.target->dim(k), static_cast<int>(B.size()));
        for (std::size_t j = 0; j < B.size(); ++j) {
            SparseVec combo;
            if (!red.reduce(cap_with_zeta(N, k, B[j], out.zeta), &combo).empty())
                throw MathError("cap product leaves the intersection chains");
            // the sign makes DP commute with the differentials
            M.set_col(static_cast<int>(j), scaled(combo, F.sign(static_cast<long long>(k) * (k + 1) / 2), F));
        }
        out.map.maps[k] = M;
    }
    out.chain_map = is_chain_map(out.map);
    out.source_betti = S.homology();
    out.target_betti = out.target->homology();
    out.bijective = out.chain_map;
    for (int k = S.lo(); k <= S.hi(); ++k) {
        int r = out.chain_map ? induced_rank(out.map, k) : 0;
        out.induced_rank[k] = r;
        int a = out.source_betti.count(k) ? out.source_betti[k] : 0;
        int b = out.target_betti.count(k) ? out.target_betti[k] : 0;
        if (r != a || r != b) out.bijective = false;
    }
    return out;
}

}  // namespace opalg
