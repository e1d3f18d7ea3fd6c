#include "opalg/simplicial.hpp"

#include <algorithm>
#include <set>

namespace opalg {

namespace {

int sort_sign(std::vector<long long>& v) {
    int inv = 0;
    for (std::size_t a = 0; a < v.size(); ++a)
        for (std::size_t b = a + 1; b < v.size(); ++b)
            if (v[a] > v[b]) ++inv;
    std::sort(v.begin(), v.end());
    return inv;
}

}  // namespace

SimplicialComplexData SimplicialComplexData::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("complex: expected a JSON object");
    if (!j.contains("vertices") || !j["vertices"].is_array()) throw InputError("complex: missing array 'vertices'");
    if (!j.contains("facets") || !j["facets"].is_array()) throw InputError("complex: missing array 'facets'");
    SimplicialComplexData K;
    for (std::size_t i = 0; i < j["vertices"].size(); ++i) {
        const auto& v = j["vertices"][i];
        if (!v.is_number_integer()) throw InputError("complex: vertices[" + std::to_string(i) + "] is not an integer");
        K.vertices.push_back(v.get<long long>());
    }
    std::sort(K.vertices.begin(), K.vertices.end());
    if (std::adjacent_find(K.vertices.begin(), K.vertices.end()) != K.vertices.end())
        throw InputError("complex: duplicate vertex");
    if (K.vertices.empty()) throw InputError("complex: no vertices");
    auto vindex = [&](const nlohmann::json& v, const std::string& where) {
        if (!v.is_number_integer()) throw InputError(where + " is not an integer vertex");
        auto it = std::lower_bound(K.vertices.begin(), K.vertices.end(), v.get<long long>());
        if (it == K.vertices.end() || *it != v.get<long long>()) throw InputError(where + " is not a declared vertex");
        return static_cast<int>(it - K.vertices.begin());
    };
    auto read_simplex = [&](const nlohmann::json& f, const std::string& where, int* sign) {
        if (!f.is_array() || f.empty()) throw InputError(where + " is not a nonempty array");
        std::vector<long long> idx;
        for (std::size_t a = 0; a < f.size(); ++a) idx.push_back(vindex(f[a], where + "[" + std::to_string(a) + "]"));
        int s = sort_sign(idx);
        if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) throw InputError(where + " repeats a vertex");
        if (sign) *sign = s;
        return SimplexVerts(idx.begin(), idx.end());
    };
    for (std::size_t i = 0; i < j["facets"].size(); ++i)
        K.facets.push_back(read_simplex(j["facets"][i], "complex: facets[" + std::to_string(i) + "]", nullptr));
    if (j.contains("filtration")) {
        const auto& f = j["filtration"];
        if (!f.is_object()) throw InputError("complex: 'filtration' must be an object");
        for (auto it = f.begin(); it != f.end(); ++it) {
            long long label;
            try {
                std::size_t pos = 0;
                label = std::stoll(it.key(), &pos);
                if (pos != it.key().size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw InputError("complex: filtration key '" + it.key() + "' is not an integer vertex");
            }
            int v = vindex(nlohmann::json(label), "complex: filtration key '" + it.key() + "'");
            if (!it.value().is_number_integer() || it.value().get<int>() < 0)
                throw InputError("complex: filtration level of '" + it.key() + "' is not a nonnegative integer");
            K.filtration[v] = it.value().get<int>();
        }
    }
    if (j.contains("formal_dimension")) {
        if (!j["formal_dimension"].is_number_integer()) throw InputError("complex: 'formal_dimension' must be an integer");
        K.formal_dimension = j["formal_dimension"].get<int>();
    }
    if (j.contains("orientation")) {
        const auto& o = j["orientation"];
        if (!o.is_array()) throw InputError("complex: 'orientation' must be an array");
        for (std::size_t i = 0; i < o.size(); ++i) {
            std::string where = "complex: orientation[" + std::to_string(i) + "]";
            if (!o[i].is_array() || o[i].size() != 2 || !o[i][1].is_number_integer())
                throw InputError(where + " must be [facet, integer coefficient]");
            int sgn = 0;
            SimplexVerts s = read_simplex(o[i][0], where, &sgn);
            long long c = o[i][1].get<long long>();
            K.orientation.push_back({s, (sgn % 2) ? -c : c});
        }
    }
    return K;
}

SimplicialComplexData SimplicialComplexData::parse(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    return from_json(j);
}

nlohmann::json SimplicialComplexData::to_json() const {
    nlohmann::json j;
    j["vertices"] = vertices;
    nlohmann::json fs = nlohmann::json::array();
    for (auto& f : facets) {
        nlohmann::json a = nlohmann::json::array();
        for (int v : f) a.push_back(vertices[v]);
        fs.push_back(a);
    }
    j["facets"] = fs;
    if (!filtration.empty()) {
        nlohmann::json f = nlohmann::json::object();
        for (auto& [v, l] : filtration) f[std::to_string(vertices[v])] = l;
        j["filtration"] = f;
    }
    if (formal_dimension >= 0) j["formal_dimension"] = formal_dimension;
    return j;
}

SimplicialComplexData SimplicialComplexData::from_facets(const std::vector<std::vector<long long>>& facets) {
    nlohmann::json j;
    std::set<long long> vs;
    for (auto& f : facets) vs.insert(f.begin(), f.end());
    j["vertices"] = std::vector<long long>(vs.begin(), vs.end());
    j["facets"] = facets;
    return from_json(j);
}

SimplicialComplex::SimplicialComplex(const SimplicialComplexData& data) : data_(data) {
    std::set<SimplexVerts> all;
    for (int v = 0; v < static_cast<int>(data_.vertices.size()); ++v) all.insert({v});
    for (auto& f : data_.facets) {
        const int m = static_cast<int>(f.size());
        if (m > 20) throw InputError("complex: facet dimension too large");
        for (int mask = 1; mask < (1 << m); ++mask) {
            SimplexVerts s;
            for (int a = 0; a < m; ++a)
                if (mask & (1 << a)) s.push_back(f[a]);
            all.insert(s);
        }
    }
    for (auto& s : all) {
        std::size_t d = s.size() - 1;
        if (simplices_.size() <= d) simplices_.resize(d + 1);
        simplices_[d].push_back(s);
    }
    index_.resize(simplices_.size());
    for (std::size_t d = 0; d < simplices_.size(); ++d)
        for (std::size_t i = 0; i < simplices_[d].size(); ++i) index_[d][simplices_[d][i]] = static_cast<int>(i);
}

int SimplicialComplex::count(int d) const {
    return d < 0 || d > dimension() ? 0 : static_cast<int>(simplices_[d].size());
}

int SimplicialComplex::index(const SimplexVerts& s) const {
    if (s.empty() || static_cast<int>(s.size()) - 1 > dimension()) return -1;
    auto& m = index_[s.size() - 1];
    auto it = m.find(s);
    return it == m.end() ? -1 : it->second;
}

FiniteComplex SimplicialComplex::chain_complex(const Field& F) const {
    FiniteComplex C(F, 0, dimension(), Grading::Homological);
    for (int d = 0; d <= dimension(); ++d) C.set_dim(d, count(d));
    for (int d = 1; d <= dimension(); ++d) {
        SparseMatrix M(count(d - 1), count(d));
        for (int j = 0; j < count(d); ++j) {
            const auto& s = simplices_[d][j];
            for (int i = 0; i <= d; ++i) {
                SimplexVerts f = s;
                f.erase(f.begin() + i);
                M.set(index(f), j, F.sign(i));
            }
        }
        C.set_diff(d, M);
    }
    return C;
}

SparseVec SimplicialComplex::fundamental_chain(const Field& F) const {
    const int n = dimension();
    std::vector<Elt> dense(count(n), 0);
    if (data_.orientation.empty()) {
        if (F.p() != 2) throw InputError("complex: an orientation is required outside characteristic 2");
        for (auto& s : simplices_[n]) dense[index(s)] = 1;
    } else {
        for (auto& [s, c] : data_.orientation) {
            if (static_cast<int>(s.size()) - 1 != n) throw InputError("complex: orientation simplex is not top-dimensional");
            int i = index(s);
            if (i < 0) throw InputError("complex: orientation simplex is not in the complex");
            dense[i] = F.add(dense[i], F.from_int(c));
        }
    }
    return from_dense(dense);
}

bool SimplicialComplex::is_cycle(const SparseVec& top, const Field& F) const {
    const int n = dimension();
    if (n == 0) return true;
    return chain_complex(F).diff(n).apply(top, F).empty();
}

std::vector<Elt> aw_cup(const SimplicialComplex& K, const Field& F, int p, const std::vector<Elt>& a, int q,
                        const std::vector<Elt>& b) {
    std::vector<Elt> out(K.count(p + q), 0);
    for (int i = 0; i < K.count(p + q); ++i) {
        const auto& s = K.simplices(p + q)[i];
        SimplexVerts front(s.begin(), s.begin() + p + 1), back(s.begin() + p, s.end());
        out[i] = F.mul(a[K.index(front)], b[K.index(back)]);
    }
    return out;
}

NormalizedCochains::NormalizedCochains(std::shared_ptr<const SimplicialComplex> K, const Field& F)
    : K_(std::move(K)), F_(F), E_{FiniteDGA(F, {0}), {}} {
    const int n = K_->dimension();
    // unit, duals of vertices 1..V-1, then duals of simplices by dimension
    std::vector<int> degs(K_->count(0), 0);
    offset_.assign(n + 1, 0);
    for (int d = 1; d <= n; ++d) {
        offset_[d] = static_cast<int>(degs.size());
        degs.insert(degs.end(), K_->count(d), d);
    }
    FiniteDGA A(F, degs);

    for (int d = 0; d < n; ++d)
        for (int i = 0; i < K_->count(d); ++i) {
            if (d == 0 && i == 0) continue;
            std::vector<Elt> v(K_->count(d + 1), 0);
            for (int j = 0; j < K_->count(d + 1); ++j) {
                const auto& s = K_->simplices(d + 1)[j];
                for (int t = 0; t <= d + 1; ++t) {
                    SimplexVerts f = s;
                    f.erase(f.begin() + t);
                    if (K_->index(f) == i) v[j] = F.add(v[j], F.sign(t));
                }
            }
            SparseVec dv;
            for (int j = 0; j < K_->count(d + 1); ++j)
                if (v[j]) dv.push_back({offset_[d + 1] + j, v[j]});
            A.set_d(basis_index(d, i), dv);
        }
    E_.A = A;

    auto Kp = K_;
    auto self_offsets = offset_;
    const Field Fc = F;
    auto degs_copy = degs;
    auto values_of = [self_offsets, degs_copy](int b, int dim, int idx) -> Elt {
        if (b == 0) return dim == 0 ? 1 : 0;
        if (degs_copy[b] != dim) return 0;
        return (b - self_offsets[dim]) == idx ? 1 : 0;
    };
    E_.lambda = [Kp, self_offsets, Fc, values_of, degs_copy](const BEElement& x,
                                                             const std::vector<int>& args) -> SparseVec {
        const Field& F = Fc;
        if (static_cast<int>(args.size()) != x.arity()) throw MathError("arity mismatch in evaluation");
        int total = 0;
        for (int a : args) total += degs_copy[a];
        std::map<int, std::vector<Elt>> out_vals;
        if (x.arity() == 0) {
            Elt c = 0;
            for (auto& [s, v] : x.terms())
                if (s.size() == 1) c = F.add(c, v);
            return c ? SparseVec{{0, c}} : SparseVec{};
        }
        auto words = table_reduction(x, F);
        for (auto& [u, c] : words) {
            const int m = total - u.degree();
            if (m < 0 || m > Kp->dimension()) continue;
            auto& vals = out_vals[m];
            if (vals.empty()) vals.assign(Kp->count(m), 0);
            for (int t = 0; t < Kp->count(m); ++t) {
                const auto& tau = Kp->simplices(m)[t];
                Elt e = surjection_eval(
                    u, m, [&](int i) { return degs_copy[args[i - 1]]; },
                    [&](int i, const std::vector<int>& face) {
                        SimplexVerts f;
                        for (int p : face) f.push_back(tau[p]);
                        return values_of(args[i - 1], static_cast<int>(f.size()) - 1, Kp->index(f));
                    },
                    F);
                vals[t] = F.add(vals[t], F.mul(c, e));
            }
        }
        SparseVec out;
        for (auto& [m, vals] : out_vals) {
            if (m == 0) {
                if (vals[0]) out.push_back({0, vals[0]});
                for (int i = 1; i < Kp->count(0); ++i)
                    if (F.sub(vals[i], vals[0])) out.push_back({i, F.sub(vals[i], vals[0])});
            } else {
                for (int i = 0; i < Kp->count(m); ++i)
                    if (vals[i]) out.push_back({self_offsets[m] + i, vals[i]});
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    };

    // product from the arity-2 degree-0 action of the identity
    const BEElement id2 = BEElement::basis({Perm::identity(2)});
    for (int i = 1; i < E_.A.size(); ++i)
        for (int j = 1; j < E_.A.size(); ++j) {
            if (degs[i] + degs[j] > n) {
                E_.A.set_product(i, j, {});
                continue;
            }
            E_.A.set_product(i, j, E_.lambda(id2, {i, j}));
        }
}

int NormalizedCochains::basis_index(int dim, int idx) const {
    if (dim == 0) return idx == 0 ? -1 : idx;
    return offset_[dim] + idx;
}

SparseVec NormalizedCochains::dual_of(int dim, int idx) const {
    if (dim == 0 && idx == 0) {
        SparseVec v{{0, 1}};
        for (int i = 1; i < K_->count(0); ++i) v.push_back({i, F_.neg(1)});
        return v;
    }
    return {{basis_index(dim, idx), 1}};
}

std::vector<Elt> NormalizedCochains::values(const SparseVec& x, int dim) const {
    std::vector<Elt> out(K_->count(dim), 0);
    for (auto& [b, c] : x) {
        if (dga().degree(b) != dim) continue;
        if (b == 0) {
            for (auto& v : out) v = F_.add(v, c);
        } else {
            int idx = dim == 0 ? b : b - offset_[dim];
            out[idx] = F_.add(out[idx], c);
        }
    }
    return out;
}

SparseVec NormalizedCochains::from_values(int dim, const std::vector<Elt>& vals) const {
    SparseVec out;
    for (int i = 0; i < K_->count(dim); ++i) axpy(out, vals[i], dual_of(dim, i), F_);
    return out;
}

CapProduct cap_with_fundamental_cycle(const NormalizedCochains& A, const SparseVec& xi) {
    const SimplicialComplex& K = A.complex();
    const Field& F = A.dga().field();
    const int n = K.dimension();
    if (!K.is_cycle(xi, F)) throw InputError("fundamental chain is not a cycle");
    CapProduct out;
    out.source = std::make_shared<FiniteComplex>(A.dga().complex());
    FiniteComplex chains = K.chain_complex(F);
    auto T = std::make_shared<FiniteComplex>(F, 0, n, Grading::Cohomological);
    for (int k = 0; k <= n; ++k) T->set_dim(k, K.count(n - k));
    for (int k = 0; k < n; ++k) T->set_diff(k, chains.diff(n - k));
    out.target = T;
    out.map.source = out.source.get();
    out.map.target = out.target.get();
    for (int k = 0; k <= n; ++k) {
        auto basis = A.dga().basis_in_degree(k);
        SparseMatrix M(K.count(n - k), static_cast<int>(basis.size()));
        // sign making the cap product commute with the differentials
        Elt sgn = F.sign(static_cast<long long>(n) * k + static_cast<long long>(k) * (k - 1) / 2);
        for (std::size_t j = 0; j < basis.size(); ++j) {
            auto vals = A.values({{basis[j], 1}}, k);
            for (auto& [t, c] : xi) {
                const auto& s = K.simplices(n)[t];
                SimplexVerts back(s.begin() + (n - k), s.end()), front(s.begin(), s.begin() + (n - k) + 1);
                Elt v = F.mul(F.mul(c, sgn), vals[K.index(back)]);
                if (v) M.add(K.index(front), static_cast<int>(j), v, F);
            }
        }
        out.map.maps[k] = M;
    }
    return out;
}

}  // namespace opalg
