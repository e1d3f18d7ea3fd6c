#include "opalg/perverse.hpp"

#include <algorithm>
#include <mutex>

namespace opalg {

namespace {

// Reduction to a normal form against pivots keyed by their largest index.
class FullReducer {
public:
    explicit FullReducer(const Field& F) : F_(F) {}

    SparseVec reduce(SparseVec v) const {
        for (;;) {
            int hit = -1;
            for (auto it = v.rbegin(); it != v.rend(); ++it)
                if (piv_.count(it->first)) {
                    hit = it->first;
                    break;
                }
            if (hit < 0) return v;
            const Elt c = coeff(v, hit);
            axpy(v, F_.neg(c), piv_.at(hit), F_);
        }
    }
    void add(const SparseVec& v) {
        SparseVec r = reduce(v);
        if (r.empty()) return;
        Elt lead = r.back().second;
        piv_.emplace(r.back().first, scaled(r, F_.inv(lead), F_));
    }
    bool is_pivot(int i) const { return piv_.count(i) > 0; }

private:
    Field F_;
    std::map<int, SparseVec> piv_;
};

void check_same_n(const Perversity& p, const Perversity& q) {
    if (p.n() != q.n()) throw MathError("perversities of different formal dimension");
}

SparseMatrix zero_matrix(int rows, int cols) { return SparseMatrix(rows, cols); }

// Entry (r, c) of M, with M stored by columns.
std::vector<std::vector<std::pair<int, Elt>>> rows_of(const SparseMatrix& M) {
    std::vector<std::vector<std::pair<int, Elt>>> out(M.rows());
    for (int c = 0; c < M.cols(); ++c)
        for (auto& [r, v] : M.col(c)) out[r].push_back({c, v});
    return out;
}

}  // namespace

bool is_gm(const Perversity& p) {
    const int n = p.n();
    if (n < 0) return false;
    for (int i = 0; i <= std::min(n, 2); ++i)
        if (p[i] != 0) return false;
    for (int i = 2; i < n; ++i)
        if (p[i + 1] < p[i] || p[i + 1] > p[i] + 1) return false;
    return true;
}

bool leq(const Perversity& p, const Perversity& q) {
    check_same_n(p, q);
    for (int i = 0; i <= p.n(); ++i)
        if (p[i] > q[i]) return false;
    return true;
}

Perversity zero_perversity(int n) { return Perversity{std::vector<int>(n + 1, 0)}; }

Perversity top_perversity(int n) {
    Perversity t = zero_perversity(n);
    for (int i = 2; i <= n; ++i) t.v[i] = i - 2;
    return t;
}

const std::vector<Perversity>& gm_perversities(int n) {
    static std::mutex mu;
    static std::map<int, std::vector<Perversity>> cache;
    if (n < 0) throw MathError("negative formal dimension");
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<Perversity> out;
    std::vector<int> v(n + 1, 0);
    auto rec = [&](auto&& self, int i) -> void {
        if (i > n) {
            out.push_back(Perversity{v});
            return;
        }
        if (i <= 2) {
            v[i] = 0;
            self(self, i + 1);
            return;
        }
        for (int s : {0, 1}) {
            v[i] = v[i - 1] + s;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end());
    return cache.emplace(n, std::move(out)).first->second;
}

const std::vector<std::pair<int, int>>& gm_covers(int n) {
    static std::mutex mu;
    static std::map<int, std::vector<std::pair<int, int>>> cache;
    const auto& P = gm_perversities(n);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<std::pair<int, int>> out;
    const int m = static_cast<int>(P.size());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j || !leq(P[i], P[j])) continue;
            bool cover = true;
            for (int k = 0; k < m && cover; ++k)
                if (k != i && k != j && leq(P[i], P[k]) && leq(P[k], P[j])) cover = false;
            if (cover) out.push_back({i, j});
        }
    return cache.emplace(n, std::move(out)).first->second;
}

Perversity pointwise_sum(const Perversity& p, const Perversity& q) {
    check_same_n(p, q);
    Perversity s = p;
    for (int i = 0; i <= p.n(); ++i) s.v[i] += q[i];
    return s;
}

Perversity gm_closure(const Perversity& s) {
    const int n = s.n();
    if (!leq(s, top_perversity(n))) throw MathError("no GM perversity lies above this function");
    Perversity r = zero_perversity(n);
    for (int i = 0; i <= n; ++i)
        for (int k = 0; k <= n; ++k) r.v[i] = std::max(r.v[i], s[k] - std::max(k - i, 0));
    if (!is_gm(r)) throw MathError("GM closure failed");
    return r;
}

Perversity gm_interior(const Perversity& s) {
    const int n = s.n();
    Perversity b = s;
    const Perversity t = top_perversity(n);
    for (int i = 0; i <= n; ++i) {
        if (s[i] < 0) throw MathError("no GM perversity lies below this function");
        b.v[i] = std::min(s[i], t[i]);
    }
    Perversity r = b;
    for (int i = 0; i <= n; ++i)
        for (int k = 0; k <= n; ++k) r.v[i] = std::min(r.v[i], b[k] + std::max(i - k, 0));
    if (!is_gm(r)) throw MathError("GM interior failed");
    return r;
}

Perversity perv_plus(const Perversity& p, const Perversity& q) {
    Perversity s = pointwise_sum(p, q);
    if (!leq(s, top_perversity(p.n()))) throw MathError("p + q exceeds the top perversity");
    return gm_closure(s);
}

Perversity perv_minus(const Perversity& q, const Perversity& p) {
    if (!leq(p, q)) throw MathError("q - p needs p <= q");
    Perversity s = q;
    for (int i = 0; i <= q.n(); ++i) s.v[i] -= p[i];
    return gm_interior(s);
}

Perversity perv_dual(const Perversity& p) {
    if (!is_gm(p)) throw MathError("not a GM perversity");
    return perv_minus(top_perversity(p.n()), p);
}

PerverseComplex::PerverseComplex(int n, const Field& F, int lo, int hi) : n_(n), F_(F), lo_(lo), hi_(hi) {
    comps_.assign(gm_perversities(n).size(), FiniteComplex(F, lo, hi));
}

int PerverseComplex::index(const Perversity& p) const {
    const auto& P = perversities();
    auto it = std::lower_bound(P.begin(), P.end(), p);
    if (it == P.end() || !(*it == p)) throw MathError("not a GM perversity of this formal dimension");
    return static_cast<int>(it - P.begin());
}

void PerverseComplex::set_component(const Perversity& p, FiniteComplex C) {
    if (C.lo() != lo_ || C.hi() != hi_) throw MathError("component on a different degree range");
    if (C.grading() != Grading::Cohomological) throw MathError("perverse complexes are cohomological");
    comps_[index(p)] = std::move(C);
}

void PerverseComplex::set_map(const Perversity& p, const Perversity& q, std::map<int, SparseMatrix> m) {
    const int i = index(p), j = index(q);
    const auto& cov = gm_covers(n_);
    if (std::find(cov.begin(), cov.end(), std::make_pair(i, j)) == cov.end())
        throw MathError("structure maps are given on covering pairs");
    maps_[{i, j}] = std::move(m);
}

SparseMatrix PerverseComplex::map(const Perversity& p, const Perversity& q, int deg) const {
    const int i = index(p), j = index(q);
    const FiniteComplex& S = comps_[i];
    const FiniteComplex& T = comps_[j];
    if (i == j) return SparseMatrix::identity(S.dim(deg));
    if (!leq(p, q)) throw MathError("structure map needs p <= q");
    const auto& P = perversities();
    for (auto& [a, b] : gm_covers(n_)) {
        if (a != i || !leq(P[b], q)) continue;
        SparseMatrix step = zero_matrix(comps_[b].dim(deg), S.dim(deg));
        auto it = maps_.find({a, b});
        if (it != maps_.end()) {
            auto d = it->second.find(deg);
            if (d != it->second.end()) step = d->second;
        }
        return map(P[b], q, deg).multiply(step, F_);
    }
    return zero_matrix(T.dim(deg), S.dim(deg));
}

void PerverseComplex::validate() const {
    const auto& P = perversities();
    for (auto& C : comps_) C.validate();
    for (auto& [ij, m] : maps_) {
        const FiniteComplex& S = comps_[ij.first];
        const FiniteComplex& T = comps_[ij.second];
        ChainMap f{&S, &T, m};
        for (int d = lo_; d <= hi_; ++d) {
            SparseMatrix a = f.at(d);
            if (a.rows() != T.dim(d) || a.cols() != S.dim(d)) throw MathError("structure map has the wrong shape");
        }
        if (!is_chain_map(f)) throw MathError("structure map is not a chain map");
    }
    // all cover paths between comparable perversities agree
    const auto& cov = gm_covers(n_);
    for (std::size_t i = 0; i < P.size(); ++i)
        for (std::size_t j = 0; j < P.size(); ++j) {
            if (i == j || !leq(P[i], P[j])) continue;
            for (int d = lo_; d <= hi_; ++d) {
                std::vector<SparseMatrix> ways;
                for (auto& [a, b] : cov) {
                    if (a != static_cast<int>(i) || !leq(P[b], P[j])) continue;
                    SparseMatrix step = zero_matrix(comps_[b].dim(d), comps_[i].dim(d));
                    auto it = maps_.find({a, b});
                    if (it != maps_.end() && it->second.count(d)) step = it->second.at(d);
                    ways.push_back(map(P[b], P[j], d).multiply(step, F_));
                }
                for (auto& w : ways)
                    if (!(w == ways.front())) throw MathError("structure maps do not compose consistently");
            }
        }
}

std::map<Perversity, std::map<int, int>> PerverseComplex::homology() const {
    std::map<Perversity, std::map<int, int>> out;
    const auto& P = perversities();
    for (std::size_t i = 0; i < P.size(); ++i) out[P[i]] = comps_[i].homology();
    return out;
}

FiniteComplex unit_complex(const Field& F) {
    FiniteComplex C(F, 0, 0);
    C.set_dim(0, 1);
    return C;
}

PerverseComplex F_perversity(int n, const Perversity& p, const FiniteComplex& C) {
    PerverseComplex Z(n, C.field(), C.lo(), C.hi());
    const auto& P = gm_perversities(n);
    for (auto& q : P)
        if (leq(p, q)) Z.set_component(q, C);
    for (auto& [a, b] : gm_covers(n)) {
        std::map<int, SparseMatrix> m;
        for (int d = C.lo(); d <= C.hi(); ++d)
            m[d] = leq(p, P[a]) ? SparseMatrix::identity(C.dim(d)) : zero_matrix(Z.at(P[b]).dim(d), 0);
        Z.set_map(P[a], P[b], m);
    }
    return Z;
}

namespace {

// Direct sum of Z^p_a (x) Y^q_b over index pairs, graded by a + b.
struct TensorSpace {
    struct Block {
        int pair, a, dz, dy, offset;
    };
    std::vector<std::pair<int, int>> pairs;
    std::map<int, std::vector<Block>> blocks;  // degree -> blocks
    std::map<int, int> size;
    std::map<std::pair<int, int>, int> pair_index;

    int locate(int deg, int pair, int a) const {
        for (std::size_t i = 0; i < blocks.at(deg).size(); ++i) {
            const Block& b = blocks.at(deg)[i];
            if (b.pair == pair && b.a == a) return static_cast<int>(i);
        }
        return -1;
    }
};

TensorSpace tensor_space(const PerverseComplex& Z, const PerverseComplex& Y, const std::vector<std::pair<int, int>>& pairs,
                         int lo, int hi) {
    const auto& P = Z.perversities();
    TensorSpace S;
    S.pairs = pairs;
    for (std::size_t k = 0; k < pairs.size(); ++k) S.pair_index[pairs[k]] = static_cast<int>(k);
    for (int d = lo; d <= hi; ++d) {
        int off = 0;
        auto& bl = S.blocks[d];
        for (std::size_t k = 0; k < pairs.size(); ++k)
            for (int a = Z.lo(); a <= Z.hi(); ++a) {
                int b = d - a;
                if (b < Y.lo() || b > Y.hi()) continue;
                int dz = Z.at(P[pairs[k].first]).dim(a), dy = Y.at(P[pairs[k].second]).dim(b);
                if (dz * dy == 0) continue;
                bl.push_back({static_cast<int>(k), a, dz, dy, off});
                off += dz * dy;
            }
        S.size[d] = off;
    }
    return S;
}

struct Quotient {
    std::vector<int> basis;          // indices of the ambient space
    std::map<int, int> pos;          // ambient index -> quotient index
    std::unique_ptr<FullReducer> red;
    SparseVec project(const SparseVec& v) const {
        SparseVec r = red->reduce(v), out;
        for (auto& [i, c] : r) out.push_back({pos.at(i), c});
        return out;
    }
};

}  // namespace

PerverseComplex perv_tensor(const PerverseComplex& Z, const PerverseComplex& Y) {
    if (Z.n() != Y.n()) throw MathError("perverse complexes of different formal dimension");
    const Field& F = Z.field();
    const int n = Z.n();
    const auto& P = gm_perversities(n);
    const int np = static_cast<int>(P.size());
    const int lo = Z.lo() + Y.lo(), hi = Z.hi() + Y.hi();
    PerverseComplex out(n, F, lo, hi);
    std::vector<TensorSpace> spaces(np);
    std::vector<std::map<int, Quotient>> quots(np);
    for (int r = 0; r < np; ++r) {
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < np; ++i)
            for (int j = 0; j < np; ++j)
                if (leq(pointwise_sum(P[i], P[j]), P[r])) pairs.push_back({i, j});
        TensorSpace S = tensor_space(Z, Y, pairs, lo, hi);
        for (int d = lo; d <= hi; ++d) {
            Quotient Q;
            Q.red = std::make_unique<FullReducer>(F);
            // identifications along covers in either slot
            for (auto& blk : S.blocks[d]) {
                auto [i, j] = S.pairs[blk.pair];
                for (auto& [u, v] : gm_covers(n)) {
                    for (int slot = 0; slot < 2; ++slot) {
                        if ((slot == 0 && u != i) || (slot == 1 && u != j)) continue;
                        auto target = slot == 0 ? std::make_pair(v, j) : std::make_pair(i, v);
                        auto pt = S.pair_index.find(target);
                        if (pt == S.pair_index.end()) continue;
                        int tb = S.locate(d, pt->second, blk.a);
                        SparseMatrix phi = slot == 0 ? Z.map(P[i], P[v], blk.a) : Y.map(P[j], P[v], d - blk.a);
                        for (int x = 0; x < blk.dz; ++x)
                            for (int y = 0; y < blk.dy; ++y) {
                                SparseVec rel{{blk.offset + x * blk.dy + y, 1}};
                                if (tb >= 0) {
                                    const auto& T = S.blocks[d][tb];
                                    SparseVec img;
                                    if (slot == 0)
                                        for (auto& [x2, c] : phi.col(x)) img.push_back({T.offset + x2 * T.dy + y, c});
                                    else
                                        for (auto& [y2, c] : phi.col(y)) img.push_back({T.offset + x * T.dy + y2, c});
                                    std::sort(img.begin(), img.end());
                                    axpy(rel, F.neg(1), img, F);
                                }
                                Q.red->add(rel);
                            }
                    }
                }
            }
            for (int e = 0; e < S.size[d]; ++e)
                if (!Q.red->is_pivot(e)) {
                    Q.pos[e] = static_cast<int>(Q.basis.size());
                    Q.basis.push_back(e);
                }
            quots[r].emplace(d, std::move(Q));
        }
        // differential on representatives
        FiniteComplex C(F, lo, hi);
        for (int d = lo; d <= hi; ++d) C.set_dim(d, static_cast<int>(quots[r][d].basis.size()));
        for (int d = lo; d < hi; ++d) {
            const Quotient& Q = quots[r][d];
            SparseMatrix D(C.dim(d + 1), C.dim(d));
            for (std::size_t qi = 0; qi < Q.basis.size(); ++qi) {
                const int e = Q.basis[qi];
                const TensorSpace::Block* blk = nullptr;
                for (auto& b : S.blocks[d])
                    if (e >= b.offset && e < b.offset + b.dz * b.dy) blk = &b;
                const int x = (e - blk->offset) / blk->dy, y = (e - blk->offset) % blk->dy;
                auto [i, j] = S.pairs[blk->pair];
                SparseVec img;
                const SparseMatrix& dz = Z.at(P[i]).diff(blk->a);
                int t1 = S.locate(d + 1, blk->pair, blk->a + 1);
                if (t1 >= 0) {
                    const auto& T = S.blocks[d + 1][t1];
                    SparseVec part;
                    for (auto& [x2, c] : dz.col(x)) part.push_back({T.offset + x2 * T.dy + y, c});
                    std::sort(part.begin(), part.end());
                    axpy(img, 1, part, F);
                }
                const SparseMatrix& dy = Y.at(P[j]).diff(d - blk->a);
                int t2 = S.locate(d + 1, blk->pair, blk->a);
                if (t2 >= 0) {
                    const auto& T = S.blocks[d + 1][t2];
                    SparseVec part;
                    for (auto& [y2, c] : dy.col(y)) part.push_back({T.offset + x * T.dy + y2, c});
                    std::sort(part.begin(), part.end());
                    axpy(img, F.sign(blk->a), part, F);
                }
                D.set_col(static_cast<int>(qi), quots[r][d + 1].project(img));
            }
            C.set_diff(d, D);
        }
        out.set_component(P[r], C);
        spaces[r] = std::move(S);
    }
    for (auto& [a, b] : gm_covers(n)) {
        std::map<int, SparseMatrix> m;
        for (int d = lo; d <= hi; ++d) {
            const Quotient& Qa = quots[a][d];
            const Quotient& Qb = quots[b][d];
            SparseMatrix M(static_cast<int>(Qb.basis.size()), static_cast<int>(Qa.basis.size()));
            for (std::size_t qi = 0; qi < Qa.basis.size(); ++qi) {
                const int e = Qa.basis[qi];
                const TensorSpace::Block* blk = nullptr;
                for (auto& bl : spaces[a].blocks[d])
                    if (e >= bl.offset && e < bl.offset + bl.dz * bl.dy) blk = &bl;
                int pb = spaces[b].pair_index.at(spaces[a].pairs[blk->pair]);
                int tb = spaces[b].locate(d, pb, blk->a);
                const auto& T = spaces[b].blocks[d][tb];
                M.set_col(static_cast<int>(qi), Qb.project({{T.offset + (e - blk->offset), 1}}));
            }
            m[d] = M;
        }
        out.set_map(P[a], P[b], m);
    }
    return out;
}

namespace {

// Product over index pairs of Hom^k(Z^p, Y^q); coordinates (pair, a, y, x).
struct HomSpace {
    struct Block {
        int pair, a, dz, dy, offset;
    };
    std::vector<std::pair<int, int>> pairs;
    std::map<int, std::vector<Block>> blocks;
    std::map<int, int> size;
    std::map<std::pair<int, int>, int> pair_index;
    int locate(int k, int pair, int a) const {
        const auto& bl = blocks.at(k);
        for (std::size_t i = 0; i < bl.size(); ++i)
            if (bl[i].pair == pair && bl[i].a == a) return static_cast<int>(i);
        return -1;
    }
    const Block& block_of(int k, int e) const {
        for (auto& b : blocks.at(k))
            if (e >= b.offset && e < b.offset + b.dz * b.dy) return b;
        throw MathError("coordinate out of range");
    }
};

// comps(i) gives the complexes Z^{P_i}, Y^{P_j} through accessors
template <class ZAt, class YAt>
HomSpace hom_space(ZAt zat, YAt yat, int zlo, int zhi, int ylo, int yhi, const std::vector<std::pair<int, int>>& pairs,
                   int lo, int hi) {
    HomSpace S;
    S.pairs = pairs;
    for (std::size_t k = 0; k < pairs.size(); ++k) S.pair_index[pairs[k]] = static_cast<int>(k);
    for (int k = lo; k <= hi + 1; ++k) {
        int off = 0;
        auto& bl = S.blocks[k];
        for (std::size_t p = 0; p < pairs.size(); ++p)
            for (int a = zlo; a <= zhi; ++a) {
                if (a + k < ylo || a + k > yhi) continue;
                int dz = zat(pairs[p].first).dim(a), dy = yat(pairs[p].second).dim(a + k);
                if (dz * dy == 0) continue;
                bl.push_back({static_cast<int>(p), a, dz, dy, off});
                off += dz * dy;
            }
        S.size[k] = off;
    }
    return S;
}

// Every (pair, a) slot in degree k, including those with no coordinates,
// so that constraints forcing a component to vanish are not lost.
template <class ZAt, class YAt>
std::vector<HomSpace::Block> all_blocks(const HomSpace& S, ZAt zat, YAt yat, int zlo, int zhi, int k) {
    std::vector<HomSpace::Block> out;
    for (std::size_t p = 0; p < S.pairs.size(); ++p)
        for (int a = zlo; a <= zhi; ++a) {
            const int pi = static_cast<int>(p);
            int idx = S.locate(k, pi, a);
            if (idx >= 0)
                out.push_back(S.blocks.at(k)[idx]);
            else
                out.push_back({pi, a, zat(S.pairs[p].first).dim(a), yat(S.pairs[p].second).dim(a + k), -1});
        }
    return out;
}

// D f = d_Y f - (-1)^k f d_Z on a coordinate vector of degree k.
template <class ZAt, class YAt>
SparseVec hom_differential(const HomSpace& S, ZAt zat, YAt yat, int k, const SparseVec& f, const Field& F) {
    std::map<int, Elt> acc;
    auto addc = [&](int idx, Elt c) {
        Elt v = F.add(acc[idx], c);
        if (v)
            acc[idx] = v;
        else
            acc.erase(idx);
    };
    for (auto& [e, c] : f) {
        const auto& b = S.block_of(k, e);
        const int y = (e - b.offset) / b.dz, x = (e - b.offset) % b.dz;
        auto [i, j] = S.pairs[b.pair];
        int t1 = S.locate(k + 1, b.pair, b.a);
        if (t1 >= 0) {
            const auto& T = S.blocks.at(k + 1)[t1];
            for (auto& [y2, v] : yat(j).diff(b.a + k).col(y)) addc(T.offset + y2 * T.dz + x, F.mul(c, v));
        }
        int t2 = S.locate(k + 1, b.pair, b.a - 1);
        if (t2 >= 0) {
            const auto& T = S.blocks.at(k + 1)[t2];
            // (f dZ)[y][x0] = sum_x f[y][x] dZ[x][x0]
            const SparseMatrix& dz = zat(i).diff(b.a - 1);
            for (int x0 = 0; x0 < dz.cols(); ++x0) {
                Elt v = coeff(dz.col(x0), x);
                if (v) addc(T.offset + y * T.dz + x0, F.mul(F.neg(F.sign(k)), F.mul(c, v)));
            }
        }
    }
    return SparseVec(acc.begin(), acc.end());
}

}  // namespace

PerverseComplex perv_hom(const PerverseComplex& Z, const PerverseComplex& Y) {
    if (Z.n() != Y.n()) throw MathError("perverse complexes of different formal dimension");
    const Field& F = Z.field();
    const int n = Z.n();
    const auto& P = gm_perversities(n);
    const int np = static_cast<int>(P.size());
    const int lo = Y.lo() - Z.hi(), hi = Y.hi() - Z.lo();
    auto zat = [&](int i) -> const FiniteComplex& { return Z.at(P[i]); };
    auto yat = [&](int j) -> const FiniteComplex& { return Y.at(P[j]); };
    PerverseComplex out(n, F, lo, hi);
    std::vector<HomSpace> spaces(np);
    std::vector<std::map<int, std::vector<SparseVec>>> kers(np);
    for (int r = 0; r < np; ++r) {
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < np; ++i)
            for (int j = 0; j < np; ++j)
                if (leq(pointwise_sum(P[i], P[r]), P[j])) pairs.push_back({i, j});
        HomSpace S = hom_space(zat, yat, Z.lo(), Z.hi(), Y.lo(), Y.hi(), pairs, lo, hi);
        for (int k = lo; k <= hi + 1; ++k) {
            // compatibility constraints along covers
            std::vector<SparseVec> rows;
            for (auto& b : all_blocks(S, zat, yat, Z.lo(), Z.hi(), k)) {
                auto [i, j] = S.pairs[b.pair];
                for (auto& [u, v] : gm_covers(n)) {
                    if (v == i) {
                        // f_{u,j} = f_{i,j} o phi^Z_{u<i}
                        int pu = S.pair_index.at({u, j});
                        SparseMatrix phi = Z.map(P[u], P[i], b.a);
                        int tb = S.locate(k, pu, b.a);
                        int du = Z.at(P[u]).dim(b.a);
                        for (int xu = 0; xu < du; ++xu)
                            for (int y = 0; y < b.dy; ++y) {
                                SparseVec row;
                                if (tb >= 0) {
                                    const auto& T = S.blocks[k][tb];
                                    row.push_back({T.offset + y * T.dz + xu, 1});
                                }
                                SparseVec part;
                                for (auto& [x, c] : phi.col(xu)) part.push_back({b.offset + y * b.dz + x, F.neg(c)});
                                std::sort(part.begin(), part.end());
                                axpy(row, 1, part, F);
                                if (!row.empty()) rows.push_back(row);
                            }
                    }
                    if (u == j) {
                        // f_{i,v} = phi^Y_{j<v} o f_{i,j}
                        int pv = S.pair_index.at({i, v});
                        SparseMatrix phi = Y.map(P[j], P[v], b.a + k);
                        auto phirows = rows_of(phi);
                        int tb = S.locate(k, pv, b.a);
                        int dv = Y.at(P[v]).dim(b.a + k);
                        for (int x = 0; x < b.dz; ++x)
                            for (int yv = 0; yv < dv; ++yv) {
                                SparseVec row;
                                if (tb >= 0) {
                                    const auto& T = S.blocks[k][tb];
                                    row.push_back({T.offset + yv * T.dz + x, 1});
                                }
                                SparseVec part;
                                for (auto& [y, c] : phirows[yv]) part.push_back({b.offset + y * b.dz + x, F.neg(c)});
                                std::sort(part.begin(), part.end());
                                axpy(row, 1, part, F);
                                if (!row.empty()) rows.push_back(row);
                            }
                    }
                }
            }
            SparseMatrix Cm(static_cast<int>(rows.size()), S.size[k]);
            for (std::size_t rr = 0; rr < rows.size(); ++rr)
                for (auto& [c, v] : rows[rr]) Cm.add(static_cast<int>(rr), c, v, F);
            kers[r][k] = kernel_basis(Cm, F);
        }
        FiniteComplex C(F, lo, hi);
        for (int k = lo; k <= hi; ++k) C.set_dim(k, static_cast<int>(kers[r][k].size()));
        for (int k = lo; k < hi; ++k) {
            ColumnReducer red(F, true);
            for (auto& v : kers[r][k + 1]) red.add(v);
            SparseMatrix D(C.dim(k + 1), C.dim(k));
            for (std::size_t c = 0; c < kers[r][k].size(); ++c) {
                SparseVec img = hom_differential(S, zat, yat, k, kers[r][k][c], F);
                SparseVec combo;
                if (!red.reduce(img, &combo).empty()) throw MathError("limit is not closed under the differential");
                D.set_col(static_cast<int>(c), combo);
            }
            C.set_diff(k, D);
        }
        out.set_component(P[r], C);
        spaces[r] = std::move(S);
    }
    for (auto& [a, b] : gm_covers(n)) {
        std::map<int, SparseMatrix> m;
        for (int k = lo; k <= hi; ++k) {
            ColumnReducer red(F, true);
            for (auto& v : kers[b][k]) red.add(v);
            SparseMatrix M(static_cast<int>(kers[b][k].size()), static_cast<int>(kers[a][k].size()));
            for (std::size_t c = 0; c < kers[a][k].size(); ++c) {
                SparseVec img;
                for (auto& [e, v] : kers[a][k][c]) {
                    const auto& blk = spaces[a].block_of(k, e);
                    auto pt = spaces[b].pair_index.find(spaces[a].pairs[blk.pair]);
                    if (pt == spaces[b].pair_index.end()) continue;
                    int tb = spaces[b].locate(k, pt->second, blk.a);
                    img.push_back({spaces[b].blocks[k][tb].offset + (e - blk.offset), v});
                }
                std::sort(img.begin(), img.end());
                SparseVec combo;
                if (!red.reduce(img, &combo).empty()) throw MathError("restriction leaves the limit");
                M.set_col(static_cast<int>(c), combo);
            }
            m[k] = M;
        }
        out.set_map(P[a], P[b], m);
    }
    return out;
}

PerverseComplex perv_dual_complex(const PerverseComplex& Z) {
    return perv_hom(Z, F_perversity(Z.n(), zero_perversity(Z.n()), unit_complex(Z.field())));
}

NatDims natural_maps(const PerverseComplex& X, const PerverseComplex& W, int k) {
    if (X.n() != W.n()) throw MathError("perverse complexes of different formal dimension");
    const Field& F = X.field();
    const auto& P = X.perversities();
    const int np = static_cast<int>(P.size());
    auto xat = [&](int i) -> const FiniteComplex& { return X.at(P[i]); };
    auto wat = [&](int i) -> const FiniteComplex& { return W.at(P[i]); };
    std::vector<std::pair<int, int>> pairs;
    for (int r = 0; r < np; ++r) pairs.push_back({r, r});
    HomSpace S = hom_space(xat, wat, X.lo(), X.hi(), W.lo(), W.hi(), pairs, k, k);
    std::vector<SparseVec> rows;
    for (auto& b : all_blocks(S, xat, wat, X.lo(), X.hi(), k)) {
        const int r = S.pairs[b.pair].first;
        for (auto& [u, v] : gm_covers(X.n())) {
            if (u != r) continue;
            // f_v phi^X - phi^W f_r = 0 on X^r_a
            SparseMatrix px = X.map(P[r], P[v], b.a);
            SparseMatrix pw = W.map(P[r], P[v], b.a + k);
            auto pwrows = rows_of(pw);
            int tb = S.locate(k, v, b.a);
            int dv = W.at(P[v]).dim(b.a + k);
            for (int x = 0; x < b.dz; ++x)
                for (int yv = 0; yv < dv; ++yv) {
                    SparseVec row;
                    if (tb >= 0) {
                        const auto& T = S.blocks[k][tb];
                        for (auto& [x2, c] : px.col(x)) row.push_back({T.offset + yv * T.dz + x2, c});
                    }
                    SparseVec part;
                    for (auto& [y, c] : pwrows[yv]) part.push_back({b.offset + y * b.dz + x, F.neg(c)});
                    std::sort(row.begin(), row.end());
                    std::sort(part.begin(), part.end());
                    axpy(row, 1, part, F);
                    if (!row.empty()) rows.push_back(row);
                }
        }
    }
    const int ncols = S.size[k];
    SparseMatrix Cn(static_cast<int>(rows.size()), ncols);
    for (std::size_t rr = 0; rr < rows.size(); ++rr)
        for (auto& [c, v] : rows[rr]) Cn.add(static_cast<int>(rr), c, v, F);
    NatDims out;
    out.all = ncols - rank(Cn, F);
    SparseMatrix Dm(S.size[k + 1] + static_cast<int>(rows.size()), ncols);
    for (int c = 0; c < ncols; ++c) {
        SparseVec col = hom_differential(S, xat, wat, k, {{c, 1}}, F);
        for (auto& [r, v] : Cn.col(c)) col.push_back({S.size[k + 1] + r, v});
        Dm.set_col(c, col);
    }
    out.chain = ncols - rank(Dm, F);
    return out;
}

int chain_map_dim(const FiniteComplex& N, const FiniteComplex& M) {
    const Field& F = N.field();
    const int lo = std::max(N.lo(), M.lo()), hi = std::min(N.hi(), M.hi());
    std::map<int, int> off;
    int total = 0;
    for (int a = lo; a <= hi; ++a) {
        off[a] = total;
        total += N.dim(a) * M.dim(a);
    }
    std::map<std::pair<int, int>, Elt> rowsmap;
    std::map<int, int> roff;
    int nrows = 0;
    for (int a = lo - 1; a <= hi; ++a) {
        roff[a] = nrows;
        nrows += N.dim(a) * M.dim(a + 1);
    }
    SparseMatrix C(nrows, total);
    // (d_M f - f d_N) on N_a -> M_{a+1}; coordinate (y, x) of f_a at off + y * dimN + x
    for (int a = lo; a <= hi; ++a) {
        const int dn = N.dim(a), dm = M.dim(a);
        for (int y = 0; y < dm; ++y)
            for (int x = 0; x < dn; ++x) {
                const int col = off[a] + y * dn + x;
                for (auto& [y2, c] : M.diff(a).col(y))
                    if (a + 1 <= hi + 1) C.add(roff[a] + y2 * dn + x, col, c, F);
                if (a - 1 >= lo - 1) {
                    const SparseMatrix& d = N.diff(a - 1);
                    const int dn0 = N.dim(a - 1);
                    for (int x0 = 0; x0 < d.cols(); ++x0) {
                        Elt v = coeff(d.col(x0), x);
                        if (v) C.add(roff[a - 1] + y * dn0 + x0, col, F.neg(v), F);
                    }
                }
            }
    }
    return total - rank(C, F);
}

SparseMatrix PerverseMap::at(int idx, int deg) const {
    const auto& P = source->perversities();
    auto it = maps.find(idx);
    if (it != maps.end()) {
        auto d = it->second.find(deg);
        if (d != it->second.end()) return d->second;
    }
    return SparseMatrix(target->at(P[idx]).dim(deg), source->at(P[idx]).dim(deg));
}

bool is_perverse_map(const PerverseMap& f) {
    const auto& P = f.source->perversities();
    const Field& F = f.source->field();
    for (std::size_t i = 0; i < P.size(); ++i) {
        ChainMap c{&f.source->at(P[i]), &f.target->at(P[i]), {}};
        for (int d = f.source->lo(); d <= f.source->hi(); ++d) c.maps[d] = f.at(static_cast<int>(i), d);
        if (!is_chain_map(c)) return false;
    }
    for (auto& [a, b] : gm_covers(f.source->n()))
        for (int d = f.source->lo(); d <= f.source->hi(); ++d) {
            SparseMatrix l = f.at(b, d).multiply(f.source->map(P[a], P[b], d), F);
            SparseMatrix r = f.target->map(P[a], P[b], d).multiply(f.at(a, d), F);
            if (!(l == r)) return false;
        }
    return true;
}

bool is_perverse_quasi_iso(const PerverseMap& f) {
    if (!is_perverse_map(f)) throw MathError("not a morphism of perverse complexes");
    const auto& P = f.source->perversities();
    for (std::size_t i = 0; i < P.size(); ++i) {
        ChainMap c{&f.source->at(P[i]), &f.target->at(P[i]), {}};
        for (int d = f.source->lo(); d <= f.source->hi(); ++d) c.maps[d] = f.at(static_cast<int>(i), d);
        if (!is_quasi_iso(c)) return false;
    }
    return true;
}

bool is_perverse_homotopy(const PerverseMap& f, const PerverseMap& g, const PerverseMap& h) {
    const PerverseComplex& S = *f.source;
    const PerverseComplex& T = *f.target;
    const Field& F = S.field();
    const auto& P = S.perversities();
    // h.at(i, d) maps degree d to degree d - 1
    auto hm = [&](int i, int d) {
        auto it = h.maps.find(i);
        if (it != h.maps.end() && it->second.count(d)) return it->second.at(d);
        return SparseMatrix(T.at(P[i]).dim(d - 1), S.at(P[i]).dim(d));
    };
    for (std::size_t i = 0; i < P.size(); ++i) {
        const int ii = static_cast<int>(i);
        for (int d = S.lo(); d <= S.hi(); ++d) {
            SparseMatrix lhs = T.at(P[i]).diff(d - 1).multiply(hm(ii, d), F);
            lhs = lhs.added(hm(ii, d + 1).multiply(S.at(P[i]).diff(d), F), 1, F);
            SparseMatrix rhs = f.at(ii, d).added(g.at(ii, d), F.neg(1), F);
            if (!(lhs == rhs)) return false;
        }
    }
    for (auto& [a, b] : gm_covers(S.n()))
        for (int d = S.lo(); d <= S.hi(); ++d) {
            SparseMatrix l = hm(b, d).multiply(S.map(P[a], P[b], d), F);
            SparseMatrix r = T.map(P[a], P[b], d - 1).multiply(hm(a, d), F);
            if (!(l == r)) return false;
        }
    return true;
}

void PerverseDGA::validate() const {
    A->validate();
    if (static_cast<int>(weight.size()) != A->size()) throw MathError("one weight per basis element");
    const Perversity t = top_perversity(n);
    for (auto& w : weight)
        if (w.n() != n || !is_gm(w)) throw MathError("weights must be GM perversities");
    if (!(weight[0] == zero_perversity(n))) throw MathError("the unit has weight zero");
    for (int i = 0; i < A->size(); ++i) {
        for (auto& [j, c] : A->d(i))
            if (!leq(weight[j], weight[i])) throw MathError("differential raises the weight");
        for (int j = 0; j < A->size(); ++j) {
            Perversity s = pointwise_sum(weight[i], weight[j]);
            if (!leq(s, t)) continue;
            Perversity bound = gm_closure(s);
            for (auto& [k, c] : A->product(i, j))
                if (!leq(weight[k], bound)) throw MathError("product exceeds the sum of weights");
        }
    }
}

PerverseComplex PerverseDGA::as_complex() const {
    const Field& F = A->field();
    const int lo = A->min_degree(), hi = A->max_degree();
    PerverseComplex Z(n, F, lo, hi);
    const auto& P = gm_perversities(n);
    // position of each basis element inside A^p
    std::vector<std::vector<int>> pos(P.size(), std::vector<int>(A->size(), -1));
    for (std::size_t r = 0; r < P.size(); ++r) {
        FiniteComplex C(F, lo, hi);
        std::map<int, int> count;
        for (int d = lo; d <= hi; ++d)
            for (int i : A->basis_in_degree(d))
                if (leq(weight[i], P[r])) pos[r][i] = count[d]++;
        for (int d = lo; d <= hi; ++d) C.set_dim(d, count[d]);
        for (int d = lo; d < hi; ++d) {
            SparseMatrix D(count[d + 1], count[d]);
            for (int i : A->basis_in_degree(d)) {
                if (pos[r][i] < 0) continue;
                SparseVec v;
                for (auto& [j, c] : A->d(i)) v.push_back({pos[r][j], c});
                std::sort(v.begin(), v.end());
                D.set_col(pos[r][i], v);
            }
            C.set_diff(d, D);
        }
        Z.set_component(P[r], C);
    }
    for (auto& [a, b] : gm_covers(n)) {
        std::map<int, SparseMatrix> m;
        for (int d = lo; d <= hi; ++d) {
            SparseMatrix M(Z.at(P[b]).dim(d), Z.at(P[a]).dim(d));
            for (int i : A->basis_in_degree(d))
                if (pos[a][i] >= 0) M.set(pos[b][i], pos[a][i], 1);
            m[d] = M;
        }
        Z.set_map(P[a], P[b], m);
    }
    return Z;
}

bool PerverseHochschild::admissible(const HCochain& f) const {
    for (auto& [w, v] : f.values) {
        if (v.empty()) continue;
        if (w >= static_cast<int>(word_ok.size()) || !word_ok[w]) return false;
        for (auto& [m, c] : v)
            if (!leq(weight[m], value_bound[w])) return false;
    }
    return true;
}

HCochain PerverseHochschild::restrict(const HCochain& f) const {
    HCochain g = f;
    for (auto it = g.values.begin(); it != g.values.end();)
        it = it->first < static_cast<int>(word_ok.size()) && word_ok[it->first] ? std::next(it) : g.values.erase(it);
    return g;
}

std::unique_ptr<PerverseHochschild> perverse_hochschild(const PerverseDGA& A, const Perversity& r,
                                                        std::shared_ptr<const WordSpace> W, int L) {
    A.validate();
    if (!is_gm(r) || r.n() != A.n) throw MathError("r must be a GM perversity of the same formal dimension");
    if (&W->algebra() != A.A.get()) throw MathError("word space over a different algebra");
    auto P = std::make_unique<PerverseHochschild>();
    P->r = r;
    P->W = W;
    P->weight = A.weight;
    P->M = std::make_shared<const Bimodule>(Bimodule::regular(*A.A));
    const Perversity t = top_perversity(A.n);
    const int nw = W->count_upto(L);
    P->word_ok.assign(nw, 0);
    P->value_bound.assign(nw, zero_perversity(A.n));
    for (int w = 0; w < nw; ++w) {
        Perversity s = zero_perversity(A.n);
        for (int a : W->word(w)) s = pointwise_sum(s, A.weight[a]);
        if (!leq(s, t)) continue;
        Perversity cl = gm_closure(s);
        if (!leq(pointwise_sum(r, cl), t)) continue;
        P->word_ok[w] = 1;
        P->value_bound[w] = perv_plus(r, cl);
    }
    const PerverseHochschild* raw = P.get();
    P->C = std::make_unique<HochschildComplex>(W, P->M, L, [raw](int w, int m) {
        return w < static_cast<int>(raw->word_ok.size()) && raw->word_ok[w] && leq(raw->weight[m], raw->value_bound[w]);
    });
    return P;
}

bool perverse_hochschild_closed(const PerverseHochschild& P, int lo, int hi) {
    for (int q = lo; q <= hi; ++q)
        for (auto& [w, m] : P.C->basis(q)) {
            HCochain f;
            f.degree = q;
            f.max_len = P.C->max_len();
            f.values[w] = {{m, 1}};
            if (!P.admissible(P.D(f))) return false;
        }
    return true;
}

}  // namespace opalg
