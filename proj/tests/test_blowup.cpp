#include <algorithm>
#include <memory>
#include <random>

#include "doctest.h"
#include "opalg/blowup.hpp"

using namespace opalg;

namespace {

using Facets = std::vector<std::vector<long long>>;

const Facets kBoundaryTriangle = {{0, 1}, {0, 2}, {1, 2}};
const Facets kBoundaryTetra = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};

// Seven-vertex torus.
Facets torus7() {
    Facets out;
    for (long long i = 0; i < 7; ++i) {
        std::vector<long long> a{i, (i + 1) % 7, (i + 3) % 7}, b{i, (i + 2) % 7, (i + 3) % 7};
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        out.push_back(a);
        out.push_back(b);
    }
    return out;
}

Facets join_vertex(const Facets& L, long long v) {
    Facets out;
    for (auto f : L) {
        f.push_back(v);
        out.push_back(f);
    }
    return out;
}

Facets suspension(const Facets& L, long long a, long long b) {
    Facets out = join_vertex(L, a), second = join_vertex(L, b);
    out.insert(out.end(), second.begin(), second.end());
    return out;
}

std::shared_ptr<const FilteredComplex> filtered(const Facets& facets, const std::map<long long, int>& levels, int n) {
    auto d = SimplicialComplexData::from_facets(facets);
    for (std::size_t i = 0; i < d.vertices.size(); ++i) {
        auto it = levels.find(d.vertices[i]);
        d.filtration[static_cast<int>(i)] = it == levels.end() ? n : it->second;
    }
    d.formal_dimension = n;
    return std::make_shared<const FilteredComplex>(FilteredComplex::from_data(d));
}

std::map<int, int> plain_homology(const Facets& facets, const Field& F) {
    SimplicialComplex K(SimplicialComplexData::from_facets(facets));
    return K.chain_complex(F).homology();
}

int at(const std::map<int, int>& m, int k) {
    auto it = m.find(k);
    return it == m.end() ? 0 : it->second;
}

SparseVec random_family(const std::vector<SparseVec>& basis, const Field& F, std::mt19937& rng) {
    SparseVec out;
    for (auto& b : basis) axpy(out, static_cast<Elt>(rng() % F.p()), b, F);
    return out;
}

SparseVec sum(SparseVec a, const SparseVec& b, const Field& F, Elt c = 1) {
    axpy(a, c, b, F);
    return a;
}

Simplex simplex(std::initializer_list<int> ranks) {
    Simplex s;
    for (int r : ranks) s.push_back(static_cast<std::uint16_t>(r));
    return s;
}

}  // namespace

TEST_CASE("filtered complex input is validated") {
    auto d = SimplicialComplexData::from_facets(kBoundaryTetra);
    CHECK_THROWS_AS(FilteredComplex::from_data(d), InputError);
    d.formal_dimension = 2;
    CHECK_THROWS_AS(FilteredComplex::from_data(d), InputError);
    d.filtration = {{0, 2}, {1, 2}, {2, 2}};
    CHECK_THROWS_AS(FilteredComplex::from_data(d), InputError);
    d.filtration[3] = 5;
    CHECK_THROWS_AS(FilteredComplex::from_data(d), InputError);
    d.filtration[3] = 0;
    auto X = FilteredComplex::from_data(d);
    CHECK(X.n() == 2);
    CHECK(X.level(3) == 0);
    CHECK(X.is_regular({0, 3}));
    CHECK_FALSE(X.is_regular({3}));
    CHECK(X.dim_in({0, 1, 3}, 0) == 0);
    CHECK(X.dim_in({0, 1}, 1) == -1);
    auto parts = X.decomposition({0, 1, 3});
    CHECK(parts[0] == SimplexVerts{3});
    CHECK(parts[2] == SimplexVerts{0, 1});
}

TEST_CASE("trivial filtration gives ordinary cochains and chains") {
    for (int p : {2, 3}) {
        Field F(p);
        for (const Facets& facets : {kBoundaryTetra, torus7()}) {
            auto K = std::make_shared<const SimplicialComplex>(SimplicialComplexData::from_facets(facets));
            auto X = std::make_shared<const FilteredComplex>(FilteredComplex::trivial(K, 2));
            BlowupCochains N(X, F);
            const Perversity z = zero_perversity(2);
            for (int k = 0; k <= 2; ++k) {
                CHECK(static_cast<int>(N.families(k).size()) == K->count(k));
                CHECK(N.complex(z).dim(k) == K->count(k));
                for (auto& f : N.families(k))
                    for (int c = 1; c <= 2; ++c) CHECK(N.perverse_degree(k, f)[c] <= 0);
            }
            CHECK(N.betti(z) == K->chain_complex(F).homology());
            auto I = intersection_chains(*X, z, F);
            for (int k = 0; k <= 2; ++k) CHECK(I.C.dim(k) == K->count(k));
            CHECK(I.C.homology() == K->chain_complex(F).homology());
        }
    }
}

TEST_CASE("blown-up differential squares to zero and the subcomplexes are nested") {
    Field F(3);
    auto X = filtered(suspension(torus7(), 10, 11), {{10, 0}, {11, 0}}, 3);
    BlowupCochains N(X, F);
    for (int k = 0; k + 2 <= N.top_degree(); ++k)
        for (int c = 0; c < N.coord_count(k); ++c) CHECK(N.d(k + 1, N.d(k, {{c, 1}})).empty());
    for (int k = 0; k < N.top_degree(); ++k)
        for (auto& f : N.families(k)) CHECK(N.is_compatible(k + 1, N.d(k, f)));
    const auto& P = gm_perversities(3);
    for (auto& p : P) N.complex(p).validate();
    for (auto& p : P)
        for (auto& q : P)
            if (leq(p, q))
                for (int k = 0; k <= N.top_degree(); ++k) CHECK(N.complex(p).dim(k) <= N.complex(q).dim(k));
    N.perverse().validate();
}

TEST_CASE("cone formulas for blown-up cohomology and intersection homology") {
    for (int p : {2, 3}) {
        Field F(p);
        for (const Facets& link : {kBoundaryTriangle, kBoundaryTetra, torus7()}) {
            const int N_dim = static_cast<int>(link[0].size());
            auto X = filtered(join_vertex(link, 100), {{100, 0}}, N_dim);
            BlowupCochains N(X, F);
            auto HL = plain_homology(link, F);
            for (auto& q : gm_perversities(N_dim)) {
                auto H = N.betti(q);
                auto I = intersection_chains(*X, q, F).C.homology();
                for (int k = 0; k <= N_dim; ++k) {
                    CHECK(at(H, k) == (k <= q[N_dim] ? at(HL, k) : 0));
                    CHECK(at(I, k) == (k <= N_dim - 2 - q[N_dim] ? at(HL, k) : 0));
                }
            }
        }
    }
}

TEST_CASE("cone on the boundary of a triangle has trivial blown-up cohomology") {
    Field F(2);
    auto X = filtered(join_vertex(kBoundaryTriangle, 3), {{3, 0}}, 2);
    BlowupCochains N(X, F);
    const Perversity z = zero_perversity(2);
    CHECK(N.betti(z) == std::map<int, int>{{0, 1}, {1, 0}, {2, 0}});
    CHECK(intersection_chains(*X, z, F).C.homology() == std::map<int, int>{{0, 1}, {1, 0}, {2, 0}});
    CHECK_THROWS_AS(fundamental_cycle(*X, F), InputError);
}

TEST_CASE("blown-up Betti numbers match intersection homology at the complementary perversity") {
    struct Case {
        Facets facets;
        std::map<long long, int> levels;
        int n;
    };
    std::vector<Case> cases = {
        {suspension(kBoundaryTriangle, 8, 9), {{8, 0}, {9, 0}}, 2},
        {suspension(torus7(), 10, 11), {{10, 0}, {11, 0}}, 3},
        {suspension(kBoundaryTetra, 10, 11), {{10, 1}, {11, 1}}, 3},
    };
    for (int p : {2, 3})
        for (auto& c : cases) {
            Field F(p);
            auto X = filtered(c.facets, c.levels, c.n);
            BlowupCochains N(X, F);
            for (auto& q : gm_perversities(c.n)) {
                auto H = N.betti(q);
                auto I = intersection_chains(*X, perv_dual(q), F).C.homology();
                for (int k = 0; k <= c.n; ++k) CHECK(at(H, k) == at(I, k));
            }
        }
    // the suspended torus separates the two perversities
    Field F(2);
    BlowupCochains N(filtered(suspension(torus7(), 10, 11), {{10, 0}, {11, 0}}, 3), F);
    CHECK(N.betti(zero_perversity(3)) == std::map<int, int>{{0, 1}, {1, 0}, {2, 2}, {3, 1}});
    CHECK(N.betti(top_perversity(3)) == std::map<int, int>{{0, 1}, {1, 2}, {2, 0}, {3, 1}});
}

TEST_CASE("cap with the fundamental cycle is a duality on pseudomanifolds") {
    for (int p : {2, 3, 5}) {
        Field F(p);
        for (auto X : {filtered(suspension(kBoundaryTriangle, 8, 9), {{8, 0}, {9, 0}}, 2),
                       filtered(suspension(torus7(), 10, 11), {{10, 0}, {11, 0}}, 3),
                       filtered(suspension(kBoundaryTetra, 10, 11), {{10, 1}, {11, 1}}, 3),
                       filtered(suspension({{5, 6, 7}, {5, 6, 8}, {5, 7, 8}, {6, 7, 8}}, 1, 9), {{1, 0}, {9, 0}}, 3)}) {
            BlowupCochains N(X, F);
            for (auto& q : gm_perversities(X->n())) {
                auto D = cap_duality(N, q);
                CHECK(D.chain_map);
                CHECK(D.bijective);
                for (int k = 0; k <= X->n(); ++k) CHECK(at(D.source_betti, k) == at(D.target_betti, k));
            }
            auto zeta = fundamental_cycle(*X, F);
            CHECK(cap_with_zeta(N, 0, N.unit(), zeta) == zeta);
        }
    }
}

TEST_CASE("duality fails and is reported off pseudomanifolds") {
    Field F(2);
    Facets wedge = kBoundaryTetra;
    for (auto f : kBoundaryTetra) {
        for (auto& v : f) v = v == 0 ? 0 : v + 10;
        wedge.push_back(f);
    }
    auto K = std::make_shared<const SimplicialComplex>(SimplicialComplexData::from_facets(wedge));
    auto X = std::make_shared<const FilteredComplex>(FilteredComplex::trivial(K, 2));
    BlowupCochains N(X, F);
    auto D = cap_duality(N, zero_perversity(2));
    CHECK(D.chain_map);
    CHECK_FALSE(D.bijective);
    CHECK(at(D.source_betti, 0) == 1);
    CHECK(at(D.target_betti, 0) == 2);
    CHECK_THROWS_AS(cap_duality(BlowupCochains(X, Field(3)), zero_perversity(2)), InputError);
}

TEST_CASE("blown-up cup product") {
    Field F(3);
    std::mt19937 rng(7);
    auto X = filtered(suspension(torus7(), 10, 11), {{10, 0}, {11, 0}}, 3);
    BlowupCochains N(X, F);
    const auto& P = gm_perversities(3);
    const SparseVec one = N.unit();
    CHECK(N.is_compatible(0, one));
    CHECK(N.d(0, one).empty());
    for (int trial = 0; trial < 6; ++trial) {
        const int i = trial % 2, j = (trial / 2) % 2, l = trial % 3;
        auto a = random_family(N.families(i), F, rng);
        auto b = random_family(N.families(j), F, rng);
        auto c = random_family(N.families(l), F, rng);
        CHECK(N.cup(0, one, i, a) == a);
        CHECK(N.cup(i, a, 0, one) == a);
        auto ab = N.cup(i, a, j, b);
        CHECK(N.is_compatible(i + j, ab));
        CHECK(N.cup(i + j, ab, l, c) == N.cup(i, a, j + l, N.cup(j, b, l, c)));
        auto lhs = N.d(i + j, ab);
        auto rhs = sum(N.cup(i + 1, N.d(i, a), j, b), N.cup(i, a, j + 1, N.d(j, b)), F, F.sign(i));
        CHECK(lhs == rhs);
        // perverse degrees add
        auto pa = N.perverse_degree(i, a), pb = N.perverse_degree(j, b), pab = N.perverse_degree(i + j, ab);
        for (int cc = 1; cc <= 3; ++cc)
            if (pa[cc] < 0 || pb[cc] < 0)
                CHECK(pab[cc] < 0);
            else
                CHECK(pab[cc] <= pa[cc] + pb[cc]);
    }
    for (auto& p : P)
        for (auto& q : P) {
            if (!leq(pointwise_sum(p, q), top_perversity(3))) continue;
            const Perversity r = perv_plus(p, q);
            for (int i = 0; i <= 1; ++i)
                for (int j = 0; j <= 2; ++j)
                    for (int trial = 0; trial < 2; ++trial) {
                        auto a = random_family(N.basis(p, i), F, rng);
                        auto b = random_family(N.basis(q, j), F, rng);
                        auto ab = N.cup(i, a, j, b);
                        CHECK(N.allowable(i + j, ab, r));
                        CHECK(N.allowable(i + j + 1, N.d(i + j, ab), r));
                    }
        }
}

TEST_CASE("E_+ action in arity two and degree zero is the cup product") {
    for (int p : {2, 3}) {
        Field F(p);
        std::mt19937 rng(11);
        auto X = filtered(suspension(torus7(), 10, 11), {{10, 0}, {11, 0}}, 3);
        BlowupCochains N(X, F);
        const BEElement id = BEElement::basis(2, simplex({0}));
        const BEElement tw = BEElement::basis(2, simplex({1}));
        for (int i = 0; i <= 2; ++i)
            for (int j = 0; j + i <= 3; ++j) {
                auto a = random_family(N.families(i), F, rng);
                auto b = random_family(N.families(j), F, rng);
                CHECK(N.eplus_action(id, {{i, a}, {j, b}}) == N.cup(i, a, j, b));
                CHECK(N.eplus_action(tw, {{i, a}, {j, b}}) == scaled(N.cup(j, b, i, a), F.sign(i * j), F));
                CHECK(N.eplus_action(id, {{0, N.unit()}, {j, b}}) == b);
            }
    }
}

TEST_CASE("E_+ action commutes with the differentials in characteristic two") {
    Field F(2);
    std::mt19937 rng(5);
    auto X = filtered(suspension(kBoundaryTetra, 10, 11), {{10, 0}, {11, 0}}, 3);
    BlowupCochains N(X, F);
    for (int deg = 1; deg <= 2; ++deg)
        for (auto& s : be_basis(2, deg)) {
            BEElement x = BEElement::basis(2, s);
            BEElement dx = be_differential(x, F);
            for (int i = 0; i <= 2; ++i)
                for (int j = 0; j <= 2; ++j) {
                    auto a = random_family(N.families(i), F, rng);
                    auto b = random_family(N.families(j), F, rng);
                    const int out = i + j - deg;
                    if (out < 0) continue;
                    auto xab = N.eplus_action(x, {{i, a}, {j, b}});
                    CHECK(N.is_compatible(out, xab));
                    SparseVec rhs = N.eplus_action(dx, {{i, a}, {j, b}});
                    rhs = sum(rhs, N.eplus_action(x, {{i + 1, N.d(i, a)}, {j, b}}), F);
                    rhs = sum(rhs, N.eplus_action(x, {{i, a}, {j + 1, N.d(j, b)}}), F);
                    CHECK(N.d(out, xab) == rhs);
                }
        }
}

TEST_CASE("E_+ action respects perverse degree on the cone") {
    Field F(2);
    auto X = filtered(join_vertex(kBoundaryTriangle, 3), {{3, 0}}, 2);
    BlowupCochains N(X, F);
    const Perversity z = zero_perversity(2);
    std::vector<std::pair<int, SparseVec>> cochains;
    for (int k = 0; k <= 2; ++k)
        for (auto& b : N.basis(z, k)) cochains.push_back({k, b});
    REQUIRE(!cochains.empty());
    int checked = 0;
    for (int deg = 0; deg <= 2; ++deg)
        for (auto& s : be_basis(2, deg)) {
            BEElement x = BEElement::basis(2, s);
            for (auto& a : cochains)
                for (auto& b : cochains) {
                    const int out = a.first + b.first - deg;
                    if (out < 0) continue;
                    auto y = N.eplus_action(x, {a, b}, {z, z});
                    CHECK(N.allowable(out, y, z));
                    CHECK(N.is_compatible(out, y));
                    ++checked;
                }
        }
    CHECK(checked > 0);
}

TEST_CASE("E_+ action rejects perversity overflow") {
    Field F(2);
    auto X = filtered(suspension(torus7(), 10, 11), {{10, 0}, {11, 0}}, 3);
    BlowupCochains N(X, F);
    const Perversity t = top_perversity(3), z = zero_perversity(3);
    const BEElement id = BEElement::basis(2, simplex({0}));
    auto one = N.unit();
    CHECK(N.eplus_action(id, {{0, one}, {0, one}}, {z, t}) == one);
    CHECK_THROWS_AS(N.eplus_action(id, {{0, one}, {0, one}}, {t, t}), MathError);
    CHECK_THROWS_AS(N.eplus_action(id, {{0, one}}, {z}), MathError);
}
