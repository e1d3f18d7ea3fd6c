#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "opalg/complex.hpp"
#include "opalg/dga.hpp"

namespace opalg {

// Differential graded bimodule over a FiniteDGA, on a homogeneous basis.
class Bimodule {
public:
    Bimodule(const FiniteDGA& A, std::vector<int> degrees);

    static Bimodule regular(const FiniteDGA& A);
    // DA with basis dual to the basis of A (degree -|e_j|),
    // (d phi)(x) = -(-1)^{|phi|} phi(dx), (a.phi.b)(x) = (-1)^{|a|(|phi|+|b|+|x|)} phi(b x a).
    static Bimodule dual(const FiniteDGA& A);

    const FiniteDGA& algebra() const { return *A_; }
    int size() const { return static_cast<int>(deg_.size()); }
    int degree(int m) const { return deg_[m]; }
    const SparseVec& d(int m) const { return d_[m]; }
    const SparseVec& left(int a, int m) const { return left_[static_cast<std::size_t>(a) * size() + m]; }
    const SparseVec& right(int m, int a) const { return right_[static_cast<std::size_t>(a) * size() + m]; }
    void set_d(int m, SparseVec v) { d_[m] = std::move(v); }
    void set_left(int a, int m, SparseVec v) { left_[static_cast<std::size_t>(a) * size() + m] = std::move(v); }
    void set_right(int m, int a, SparseVec v) { right_[static_cast<std::size_t>(a) * size() + m] = std::move(v); }

    SparseVec apply_d(const SparseVec& m) const;
    SparseVec act_left(const SparseVec& a, const SparseVec& m) const;
    SparseVec act_right(const SparseVec& m, const SparseVec& a) const;
    // Throws MathError unless d^2 = 0, both actions are unital, associative,
    // commute with each other and satisfy the Leibniz rules.
    void validate() const;

private:
    std::shared_ptr<const FiniteDGA> A_;
    std::vector<int> deg_;
    std::vector<SparseVec> d_, left_, right_;
};

// Words [a_1|...|a_k] over the reduced basis 1..N-1 of A, k <= max_len,
// numbered by length and then lexicographically.
class WordSpace {
public:
    WordSpace(std::shared_ptr<const FiniteDGA> A, int max_len);

    const FiniteDGA& algebra() const { return *A_; }
    std::shared_ptr<const FiniteDGA> algebra_ptr() const { return A_; }
    int max_len() const { return max_len_; }
    int size() const { return static_cast<int>(words_.size()); }
    int count_upto(int len) const { return len < 0 ? 0 : start_[std::min(len, max_len_) + 1]; }
    const std::vector<int>& word(int id) const { return words_[id]; }
    int length(int id) const { return static_cast<int>(words_[id].size()); }
    // degree of the suspended word: sum (|a_i| - 1)
    int degree(int id) const { return wdeg_[id]; }
    int id(const std::vector<int>& w) const;

private:
    std::shared_ptr<const FiniteDGA> A_;
    int max_len_;
    std::vector<std::vector<int>> words_;
    std::vector<int> wdeg_;
    std::vector<int> start_;
    std::map<std::vector<int>, int> index_;
};

// A Hochschild cochain f: words of length <= max_len -> M, homogeneous of
// degree |f| = |f(w)| - deg(w).
struct HCochain {
    int degree = 0;
    int max_len = 0;
    std::map<int, SparseVec> values;  // word id -> element of M

    bool is_zero() const { return values.empty(); }
    bool operator==(const HCochain& o) const {
        return degree == o.degree && max_len == o.max_len && values == o.values;
    }
};

// f + c g, truncated to the smaller length bound.
HCochain add(const WordSpace& W, const HCochain& f, const HCochain& g, Elt c);
HCochain truncate(const HCochain& f, const WordSpace& W, int max_len);

// The truncated Hochschild cochain complex HC^{<=L}(A, M). The differential
// is the one of Hom_{A^e}(B(A), M) restricted to words of length <= L, a
// quotient complex of the full one. Degrees are built lazily and cached, so
// an object must not be shared between threads while it is being queried.
class HochschildComplex {
public:
    // admissible(word id, module basis index) restricts the basis; the
    // caller is responsible for the restricted span being closed under D.
    using Filter = std::function<bool(int, int)>;
    HochschildComplex(std::shared_ptr<const WordSpace> W, std::shared_ptr<const Bimodule> M, int L,
                      Filter admissible = {});

    const WordSpace& words() const { return *W_; }
    const Bimodule& module() const { return *M_; }
    int max_len() const { return L_; }

    int dim(int q) const;
    const std::vector<std::pair<int, int>>& basis(int q) const;  // (word id, module basis index)
    // Matrix of D from degree q to q + 1 (assembled in parallel per word).
    const SparseMatrix& diff(int q) const;
    SparseVec to_local(const HCochain& f) const;
    HCochain from_local(int q, const SparseVec& v) const;
    // D(f) on words of length <= min(L, f.max_len), via the bar differential.
    HCochain D(const HCochain& f) const;

    int betti(int q) const;
    std::map<int, int> betti(int lo, int hi) const;
    FiniteComplex complex(int lo, int hi) const;  // degrees [lo, hi], outer differentials dropped
    // Cocycles whose classes form a basis of H^q.
    std::vector<HCochain> homology_basis(int q) const;
    bool is_cocycle(const HCochain& f) const;
    bool is_coboundary(const HCochain& f) const;

private:
    struct Block {
        std::vector<std::pair<int, int>> basis;
        std::unordered_map<long long, int> pos;
    };
    const Block& block(int q) const;
    std::shared_ptr<const WordSpace> W_;
    std::shared_ptr<const Bimodule> M_;
    int L_;
    Filter admissible_;
    std::map<int, std::vector<int>> words_by_degree_;
    mutable std::map<int, Block> blocks_;
    mutable std::map<int, SparseMatrix> diffs_;
    mutable std::map<int, int> ranks_;
};

// D on the two-sided bar complex; a bar word a[a_1|...|a_k]b is stored as
// (a, body, b) with a, b basis indices of A.
struct BarTerm {
    int left;
    std::vector<int> body;
    int right;
    auto operator<=>(const BarTerm&) const = default;
};
using BarChain = std::map<BarTerm, Elt>;
BarChain bar_differential(const FiniteDGA& A, const BarChain& x);

// Normalized Hochschild chains a_0[a_1|...|a_k] of A, stored as (a_0, body).
using HChain = std::map<std::pair<int, std::vector<int>>, Elt>;
// b = A (x)_{A^e} D_B, moving the right coefficient around to the front.
HChain hochschild_chain_differential(const FiniteDGA& A, const HChain& x);
// B(a[a_1|...|a_k]) = sum_i (-1)^{kappa_i} 1[a_i|...|a_k|a|a_1|...|a_{i-1}], kappa_i the
// Koszul sign of the cyclic rotation of the suspended letters; zero when a is the unit.
HChain connes_B(const FiniteDGA& A, const HChain& x);
// psi in HC(A, DA) seen as the functional a[x] -> (-1)^{|a| deg(x)} psi(x)(a) on
// Hochschild chains; this is an isomorphism of complexes onto the dual of HC_*(A).
Elt evaluate_dual(const FiniteDGA& A, const HCochain& psi, const WordSpace& W, int a, const std::vector<int>& body);

// Cup product (f u g)(w) = sum (-1)^{|g| deg(w1)} f(w1).g(w2) over w = w1 w2,
// with f in HC(A, A) and g in HC(A, M) acting through the left action.
HCochain cup(const WordSpace& W, const Bimodule& M, const HCochain& f, const HCochain& g);
// f o g = sum over insertions (-1)^{(|g|-1) deg(w1)} f(w1, g(w2), w3); output
// on words of length <= max_len (inputs must be known one length further
// when g has a length-0 component).
HCochain brace(const WordSpace& W, const HCochain& f, const HCochain& g, int max_len);
// [f, g] = f o g - (-1)^{(|f|-1)(|g|-1)} g o f
HCochain bracket(const WordSpace& W, const HCochain& f, const HCochain& g, int max_len);
// Dual of the normalized Connes boundary on HC(A, DA): the functional of
// B^vee(psi) is -(-1)^{|psi|} times the functional of psi precomposed with B,
// the same dual convention under which D corresponds to the dual of b; B^vee
// anticommutes with D. Output on words of length <= max_len
// (uses the input on length max_len + 1).
HCochain connes_B_dual(const WordSpace& W, const Bimodule& DA, const HCochain& psi, int max_len);

// Pairing data of a derived Poincare duality model: Gamma in DA.
struct Duality {
    SparseVec gamma;  // element of DA (dual-basis coordinates)
};
// c(a[]b) = a.Gamma.b : the length-0 cochain with value Gamma.
HCochain duality_cochain(const Bimodule& DA, const Duality& G);
// Frobenius pairing of H^*(S^n) = Lambda(x): Gamma = x^dual.
Duality top_class_duality(const FiniteDGA& A);
// Rank of a -> a.Gamma on homology, and whether it is bijective.
struct DualityCheck {
    bool cocycle = false;
    bool bijective = false;
    int rank = 0;
    int dim = 0;
};
DualityCheck check_duality(const Bimodule& DA, const Duality& G);

// Batalin-Vilkovisky data on truncated Hochschild cohomology of a
// Frobenius model: phi(f) = f u c is inverted at chain level.
class BVStructure {
public:
    // W must allow words of length L.
    BVStructure(std::shared_ptr<const WordSpace> W, const Duality& G, int L);

    bool duality_ok() const { return ok_; }
    const std::string& failure() const { return failure_; }
    int max_len() const { return L_; }
    const WordSpace& words() const { return *W_; }
    const Bimodule& regular_module() const { return *R_; }
    const Bimodule& dual_module() const { return *DA_; }
    const HochschildComplex& hc(int len) const;        // HC^{<=len}(A, A)
    const HochschildComplex& hc_dual(int len) const;   // HC^{<=len}(A, DA)
    HCochain phi(const HCochain& f) const;
    HCochain phi_inverse(const HCochain& g) const;
    // Delta = phi^{-1} B^vee phi, lowering the length bound by one.
    HCochain delta(const HCochain& f) const;
    const HCochain& cochain_c() const { return c_; }

private:
    std::shared_ptr<const WordSpace> W_;
    std::shared_ptr<Bimodule> R_;
    std::shared_ptr<Bimodule> DA_;
    Duality G_;
    int L_;
    bool ok_ = false;
    std::string failure_;
    HCochain c_;
    SparseMatrix inv_;  // inverse of a -> a.Gamma
    mutable std::map<int, std::unique_ptr<HochschildComplex>> hcs_, hcds_;
};

// Outcome of the BV relation check on all pairs of homology generators.
struct BVReport {
    bool duality_ok = false;
    std::string failure;
    int generators = 0;
    bool delta_unit_zero = false;
    bool b_dual_c_zero = false;
    int pairs_checked = 0;
    int pairs_failed = 0;
    int delta_squared_failed = 0;
};
// Generators are homology bases of HC^{<=L} in degrees [lo, hi]; relations
// are checked in HC^{<=L-1} (Delta^2 in HC^{<=L-2}).
BVReport verify_bv(const BVStructure& S, int lo, int hi);

// Betti numbers of HC^{<=L} and HC^{<=L+1} in a window, with the
// stabilization flag per degree. W must allow words of length L + 1.
struct TruncationReport {
    int max_len = 0;
    int lo = 0, hi = 0;
    std::map<int, int> betti;
    std::map<int, int> betti_next;
    std::map<int, bool> stabilized;
};
TruncationReport hochschild_report(std::shared_ptr<const WordSpace> W, std::shared_ptr<const Bimodule> M, int L,
                                   int lo, int hi);
// When A and M have zero differential the word length is a second grading.
// Betti numbers per (length k, total degree q) for k < L, q in [lo, hi].
std::map<std::pair<int, int>, int> hochschild_bigraded(std::shared_ptr<const WordSpace> W,
                                                       std::shared_ptr<const Bimodule> M, int L, int lo, int hi);

}  // namespace opalg
