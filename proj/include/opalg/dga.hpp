#pragma once

#include <functional>
#include <vector>

#include "opalg/barratt_eccles.hpp"
#include "opalg/complex.hpp"
#include "opalg/linalg.hpp"

namespace opalg {

// Finite-dimensional cochain DGA on a homogeneous basis. Basis element 0 is
// the unit (degree 0), so elements 1..size()-1 span the reduced algebra.
class FiniteDGA {
public:
    FiniteDGA(const Field& F, std::vector<int> degrees);

    const Field& field() const { return F_; }
    int size() const { return static_cast<int>(deg_.size()); }
    int degree(int i) const { return deg_[i]; }
    int min_degree() const;
    int max_degree() const;

    void set_d(int i, SparseVec v);
    const SparseVec& d(int i) const { return d_[i]; }
    void set_product(int i, int j, SparseVec v);
    const SparseVec& product(int i, int j) const { return prod_[static_cast<std::size_t>(i) * size() + j]; }

    SparseVec apply_d(const SparseVec& x) const;
    SparseVec mul(const SparseVec& x, const SparseVec& y) const;
    SparseVec unit() const { return {{0, 1}}; }
    bool d_is_zero() const;

    // Throws MathError unless degrees are respected and d^2 = 0, the unit,
    // associativity and the Leibniz rule d(ab) = da.b + (-1)^|a| a.db hold.
    void validate() const;
    bool is_graded_commutative() const;

    // Basis indices of a given degree and the position of i among them.
    std::vector<int> basis_in_degree(int deg) const;
    int local_index(int i) const { return local_[i]; }
    FiniteComplex complex() const;
    SparseVec to_global(int deg, const SparseVec& local) const;

private:
    Field F_;
    std::vector<int> deg_;
    std::vector<int> local_;
    std::vector<SparseVec> d_;
    std::vector<SparseVec> prod_;
};

// Exterior algebra on one generator x of degree n >= 1 with zero
// differential: basis (1, x), x^2 = 0. This is H^*(S^n).
FiniteDGA exterior_algebra(const Field& F, int n);

// An algebra over E_+: a DGA together with an evaluation rule
// lambda(x; a_1, ..., a_k) for BE elements x of arity k and basis elements a_i.
struct EPlusAlgebra {
    FiniteDGA A;
    std::function<SparseVec(const BEElement&, const std::vector<int>&)> lambda;
};

// Pullback along E_+ -> Com_+: positive-degree BE elements act by zero and
// a permutation acts by the Koszul-signed product of the permuted arguments.
// Throws MathError unless A is graded commutative.
EPlusAlgebra commutative_as_eplus(FiniteDGA A);

// Koszul sign exponent of listing the arguments in the order s(1), ..., s(k).
long long koszul_exponent(const Perm& s, const std::vector<int>& degrees);

// DZ^i = Hom(Z^{-i}, F); the differential is precomposition with d.
FiniteComplex linear_dual(const FiniteComplex& C);
// (C[s])^i = C^{i+s}, same differentials.
FiniteComplex shift(const FiniteComplex& C, int s);

}  // namespace opalg
