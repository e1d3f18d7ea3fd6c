#include <random>

#include "doctest.h"
#include "opalg/complex.hpp"

using namespace opalg;

namespace {

SparseMatrix random_matrix(int r, int c, const Field& F, std::mt19937& rng, double density) {
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<int> val(1, static_cast<int>(F.p()) - 1);
    SparseMatrix M(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
            if (u(rng) < density) M.set(i, j, val(rng));
    return M;
}

// Boundary matrices of the full simplex complex on the subsets of {0..3}
// of size <= 3, built with plain bitmask loops.
FiniteComplex boundary_of_tetrahedron(const Field& F) {
    std::vector<std::vector<int>> cells(3);
    for (int m = 1; m < 16; ++m) {
        int pc = __builtin_popcount(m);
        if (pc <= 3) cells[pc - 1].push_back(m);
    }
    FiniteComplex C(F, 0, 2, Grading::Homological);
    for (int d = 0; d < 3; ++d) C.set_dim(d, static_cast<int>(cells[d].size()));
    for (int d = 1; d < 3; ++d) {
        SparseMatrix B(C.dim(d - 1), C.dim(d));
        for (int j = 0; j < C.dim(d); ++j) {
            int m = cells[d][j];
            int pos = 0;
            for (int v = 0; v < 4; ++v) {
                if (!(m & (1 << v))) continue;
                int face = m & ~(1 << v);
                int r = static_cast<int>(std::find(cells[d - 1].begin(), cells[d - 1].end(), face) - cells[d - 1].begin());
                B.set(r, j, F.sign(pos));
                ++pos;
            }
        }
        C.set_diff(d, B);
    }
    return C;
}

}  // namespace

TEST_CASE("field arithmetic") {
    CHECK_THROWS_AS(Field(4), MathError);
    Field F(5);
    CHECK(F.mul(3, F.inv(3)) == 1);
    CHECK(F.from_int(-7) == 3);
    CHECK(F.sign(3) == 4);
}

TEST_CASE("rank of trivial matrices") {
    Field F2(2);
    CHECK(rank(SparseMatrix::identity(3), F2) == 3);
    CHECK(rank(SparseMatrix(2, 5), F2) == 0);
}

TEST_CASE("rank agrees across elimination orders") {
    std::mt19937 rng(17);
    for (unsigned p : {2u, 3u, 5u}) {
        Field F(p);
        for (int t = 0; t < 30; ++t) {
            auto M = random_matrix(20, 20, F, rng, 0.2 + 0.02 * t);
            int r1 = rank(M, F);
            CHECK(r1 == rank_reference(M, F));
            CHECK(r1 == rank_sparse(M, F));
            CHECK(r1 == rank_dense(M, F, true));
            CHECK(r1 == rank(M.transpose(), F));
        }
        // above the dense threshold
        auto M = random_matrix(150, 120, F, rng, 0.03);
        CHECK(rank(M, F) == rank_reference(M, F));
        CHECK(rank(M, F) == rank_dense(M, F, false));
    }
    // low-rank product
    Field F5(5);
    auto A = random_matrix(30, 4, F5, rng, 0.8);
    auto B = random_matrix(4, 30, F5, rng, 0.8);
    auto P = A.multiply(B, F5);
    CHECK(rank(P, F5) <= 4);
    CHECK(rank(P, F5) == rank_reference(P, F5));
}

TEST_CASE("kernel and solve") {
    Field F(3);
    std::mt19937 rng(5);
    auto M = random_matrix(12, 18, F, rng, 0.3);
    auto K = kernel_basis(M, F);
    CHECK(static_cast<int>(K.size()) == 18 - rank(M, F));
    for (auto& v : K) CHECK(M.apply(v, F).empty());
    SparseVec x0 = {{1, 2}, {7, 1}};
    SparseVec b = M.apply(x0, F);
    SparseVec x;
    REQUIRE(solve(M, b, x, F));
    CHECK(M.apply(x, F) == b);
}

TEST_CASE("sphere, disk and boundary of the tetrahedron") {
    Field F2(2);
    for (int n : {0, 2, 5}) {
        auto S = sphere_complex(F2, n);
        auto h = S.homology();
        for (auto& [d, b] : h) CHECK(b == (d == n ? 1 : 0));
        auto D = disk_complex(F2, n);
        for (auto& [d, b] : D.homology()) CHECK(b == 0);
    }
    auto T = boundary_of_tetrahedron(F2);
    auto h = T.homology();
    CHECK(h[0] == 1);
    CHECK(h[1] == 0);
    CHECK(h[2] == 1);
    CHECK(T.euler_characteristic() == T.homology_euler_characteristic());
    Field F3(3);
    auto T3 = boundary_of_tetrahedron(F3);
    CHECK(T3.homology()[2] == 1);
}

TEST_CASE("complexes failing d o d = 0 are rejected") {
    Field F(3);
    FiniteComplex C(F, 0, 2);
    C.set_dim(0, 1);
    C.set_dim(1, 1);
    C.set_dim(2, 1);
    C.set_diff(0, SparseMatrix::identity(1));
    C.set_diff(1, SparseMatrix::identity(1));
    CHECK_THROWS_AS(C.homology(), MathError);
}

TEST_CASE("quasi-isomorphism checks") {
    Field F(5);
    auto S = sphere_complex(F, 2);
    ChainMap id{&S, &S, {{2, SparseMatrix::identity(1)}}};
    CHECK(is_quasi_iso(id));
    ChainMap zero{&S, &S, {}};
    CHECK_FALSE(is_quasi_iso(zero));

    auto D = disk_complex(F, 4);
    auto SD = direct_sum(S, D);
    SparseMatrix inc(SD.dim(2), 1);
    inc.set(0, 0, 1);
    ChainMap f{&S, &SD, {{2, inc}}};
    CHECK(is_quasi_iso(f));
    CHECK(SD.homology()[2] == 1);

    // a map that is not a chain map is rejected
    ChainMap g{&D, &D, {{3, SparseMatrix::identity(1)}}};
    CHECK_THROWS_AS(is_quasi_iso(g), MathError);
}
