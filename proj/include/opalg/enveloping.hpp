#pragma once

#include <map>
#include <memory>
#include <vector>

#include "opalg/barratt_eccles.hpp"
#include "opalg/complex.hpp"
#include "opalg/dga.hpp"

namespace opalg {

// Truncation of the enveloping algebra: words sigma(t, a_1..a_k) with
// k <= max_arity, BE degree l <= max_be_degree and cochain degree
// sum |a_i| - l inside [min_degree, max_degree].
struct EnvTruncation {
    int max_arity = 3;
    int max_be_degree = 3;
    int min_degree = -1000000;
    int max_degree = 1000000;
};

// A generator sigma(t, a_1, ..., a_k): sigma is a simplex of E(k+1) in
// orbit normal form (the values 2..k+1 of its first permutation appear in
// increasing order) and a_i are basis indices of the reduced algebra.
struct EnvGenerator {
    Simplex sigma;
    std::vector<int> args;
    int arity() const { return static_cast<int>(args.size()); }
    int be_degree() const { return static_cast<int>(sigma.size()) - 1; }
    auto operator<=>(const EnvGenerator&) const = default;
};

// The enveloping algebra U_E(A-bar) of an E_+-algebra in truncation. The
// reduced algebra is spanned by basis elements 1..N-1 of A, which must be
// closed under the action (an augmentation ideal). Elements are sparse
// vectors over generator indices; every operation returns normal forms
// modulo the coinvariant and operadic relations.
class EnvAlgebra {
public:
    EnvAlgebra(std::shared_ptr<const EPlusAlgebra> A, EnvTruncation T);

    const EPlusAlgebra& source() const { return *A_; }
    const FiniteDGA& algebra() const { return A_->A; }
    const EnvTruncation& truncation() const { return T_; }
    const Field& field() const { return F_; }

    int num_generators() const { return static_cast<int>(gens_.size()); }
    const EnvGenerator& generator(int i) const { return gens_[i]; }
    int degree(int i) const;  // cochain degree
    int relation_count() const { return static_cast<int>(pivots_.size()); }
    // Generators that are not eliminated by the relations; they form a basis.
    const std::vector<int>& basis() const { return basis_; }
    bool inside(int arity, int be_degree, int degree) const;

    // sigma(t, args) for an arbitrary BE element of arity k+1 and basis
    // indices args (unit entries are not allowed). Terms outside the
    // truncation are dropped.
    SparseVec element(const BEElement& sigma, const std::vector<int>& args) const;
    SparseVec normal_form(const SparseVec& v) const;
    SparseVec unit() const;

    SparseVec d(const SparseVec& u) const;
    // p(t, a).q(t, b) = (-1)^{|a|(|q|+|b|)} (p o_1 q)(t, b, a)
    SparseVec product(const SparseVec& u, const SparseVec& v) const;

    // f(sigma(t, a)) = lambda(sigma; 1, a) in A.
    SparseVec f(const SparseVec& u) const;
    // g(1) = 1_1(t), g(a) = (1,2)(t, a) for a in the reduced algebra.
    SparseVec g(const SparseVec& a) const;
    // h(sigma(t, a)) = H(sigma)(t, a) with the prism homotopy H.
    SparseVec h(const SparseVec& u) const;
    // m(w(t, a)) = op(w)(t, a). With Koszul-signed coinvariants the sign
    // (-1)^{eps_i eta_i} of the opposite-order product is produced by the
    // relabelling of the arguments, so no extra sign appears here.
    SparseVec mirror(const SparseVec& u) const;
    // A (x) A^op -> U: a (x) b -> (2,1,3)(t, a, b) and the unit cases.
    SparseVec as_embed(int a, int b) const;

    // Left action on A: sigma(t, a).x = lambda(sigma; x, a).
    SparseVec act_on_A(const SparseVec& u, const SparseVec& x) const;
    // Left action on DA (coordinates in the dual basis):
    // (u.h)(x) = (-1)^{|u||h|} h(m(u).x).
    SparseVec act_on_dual(const SparseVec& u, const SparseVec& h) const;

    // Complex on the basis in cochain degrees, restricted to BE degree <= max_l.
    struct Complex {
        FiniteComplex C;
        std::map<int, std::vector<int>> basis;  // degree -> generator indices
    };
    Complex complex(int max_l) const;

    int degree_of(const SparseVec& u) const;

private:
    int index_of(const EnvGenerator& g) const;
    // Adds c * sigma(t, args) for a single simplex in arbitrary position.
    void add_term(SparseVec& out, int arity, const Simplex& s, const std::vector<int>& args, Elt c) const;
    void build_generators();
    void build_relations();

    std::shared_ptr<const EPlusAlgebra> A_;
    EnvTruncation T_;
    Field F_;
    std::vector<EnvGenerator> gens_;
    std::map<EnvGenerator, int> index_;
    std::map<int, SparseVec> pivots_;  // leading (largest) index -> relation
    std::vector<int> basis_;
};

// Orbit normal form of the first permutation: position of 1 is kept,
// the values 2..k appear in increasing order.
bool is_orbit_normal(const Perm& p);

}  // namespace opalg
