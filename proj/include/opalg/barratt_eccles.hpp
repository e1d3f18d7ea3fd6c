#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "opalg/field.hpp"
#include "opalg/perm.hpp"

namespace opalg {

// Lexicographic ranking of S_k, with cached product and op tables.
class PermTable {
public:
    static const PermTable& get(int k);

    int arity() const { return k_; }
    int order() const { return static_cast<int>(perms_.size()); }
    const Perm& perm(int r) const { return perms_[r]; }
    int rank(const Perm& p) const;
    int mul(int a, int b) const { return mul_[static_cast<std::size_t>(a) * perms_.size() + b]; }
    int op(int a) const { return op_[a]; }
    int inv(int a) const { return inv_[a]; }
    int identity() const { return 0; }

private:
    explicit PermTable(int k);
    int k_;
    std::vector<Perm> perms_;
    std::vector<int> mul_, op_, inv_;
};

// A basis element (s_0, ..., s_l) of E(k)_l, stored as permutation ranks.
using Simplex = std::vector<std::uint16_t>;

bool is_nondegenerate(const Simplex& s);

// Element of E(k): a linear combination of nondegenerate simplices.
class BEElement {
public:
    BEElement() = default;
    explicit BEElement(int arity) : arity_(arity) {}
    static BEElement basis(const std::vector<Perm>& perms);  // throws on degenerate input
    static BEElement basis(int arity, const Simplex& s);

    int arity() const { return arity_; }
    const std::map<Simplex, Elt>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    // Adds c * s; degenerate simplices are dropped.
    void add(const Simplex& s, Elt c, const Field& F);
    void add(const BEElement& x, Elt c, const Field& F);
    Elt coeff(const Simplex& s) const;

    bool operator==(const BEElement& o) const { return arity_ == o.arity_ && terms_ == o.terms_; }

private:
    int arity_ = 0;
    std::map<Simplex, Elt> terms_;
};

// d(s_0..s_l) = sum (-1)^i (s_0..^s_i..s_l); terms with equal neighbours vanish.
BEElement be_differential(const BEElement& x, const Field& F);
// Left action s.(s_0..s_l) = (s s_0, ..., s s_l).
BEElement be_act(const Perm& s, const BEElement& x, const Field& F);
// Lattice-path partial composition x o_i y.
BEElement be_partial_compose(const BEElement& x, int i, const BEElement& y, const Field& F);
BEElement be_op(const BEElement& x, const Field& F);

using BETensor = std::map<std::pair<Simplex, Simplex>, Elt>;
// Alexander-Whitney type diagonal of E(k) into E(k) (x) E(k).
BETensor be_diagonal(const BEElement& x, const Field& F);

// F_k plugs the arity-0 unit into input 1; G_k(x) = (1,2) o_2 x.
BEElement be_F(const BEElement& x, const Field& F);
BEElement be_G(const BEElement& x, const Field& F);

// Homotopy built from the prism operator of the simplicial homotopy from
// the identity to G_k F_k:  H(s_0..s_l) = sum_i (-1)^i (s_0..s_i, phi s_i..phi s_l),
// phi = G_k F_k on permutations. It commutes with partial compositions in
// inputs >= 2 and with the action of S_k on those inputs.
BEElement prism_homotopy(const BEElement& x, const Field& F);

// Homotopy obtained by solving dH(x) = (GF - id)(x) - H(dx) degree by degree
// on one representative of each S_k-orbit (S_k acting on inputs 2..k+1) and
// extending equivariantly. Values are cached.
class OrbitHomotopy {
public:
    OrbitHomotopy(int arity, int max_degree, const Field& F);
    BEElement apply(const BEElement& x);
    int arity() const { return arity_; }
    int max_degree() const { return max_degree_; }
    std::size_t solved_orbits() const { return cache_.size(); }

private:
    BEElement on_basis(const Simplex& s);
    int arity_, max_degree_;
    Field F_;
    std::map<Simplex, BEElement> cache_;  // keyed by orbit representatives
};

// All nondegenerate simplices of E(k)_l.
std::vector<Simplex> be_basis(int arity, int degree);

// --- surjection operad and the cochain action -------------------------

struct SurjectionWord {
    int arity = 0;
    std::vector<int> word;  // values in 1..arity, every value occurs, no equal neighbours
    int degree() const { return static_cast<int>(word.size()) - arity; }
    auto operator<=>(const SurjectionWord&) const = default;
};

// Table reduction E -> X. Signs are only produced for degree 0 or over F_2.
std::map<SurjectionWord, Elt> table_reduction(const BEElement& x, const Field& F);

// Interval-cut evaluation of a surjection on an n-simplex with vertices
// 0..n. `value(i, face)` returns c_i evaluated on the face given as a sorted
// vertex list; `degree(i)` is the degree of c_i.
Elt surjection_eval(const SurjectionWord& u, int n, const std::function<int(int)>& degree,
                    const std::function<Elt(int, const std::vector<int>&)>& value, const Field& F);

}  // namespace opalg
