#pragma once

#include <map>
#include <memory>
#include <vector>

#include "opalg/complex.hpp"
#include "opalg/dga.hpp"
#include "opalg/hochschild.hpp"

namespace opalg {

// A function p(0..n) on codimensions. GM perversities satisfy
// p(0) = p(1) = p(2) = 0 and p(i) <= p(i+1) <= p(i) + 1.
struct Perversity {
    std::vector<int> v;

    int n() const { return static_cast<int>(v.size()) - 1; }
    int operator[](int i) const { return v[i]; }
    bool operator==(const Perversity&) const = default;
    auto operator<=>(const Perversity&) const = default;  // lexicographic, for containers only
};

bool is_gm(const Perversity& p);
// pointwise order
bool leq(const Perversity& p, const Perversity& q);
Perversity zero_perversity(int n);
Perversity top_perversity(int n);  // t(i) = i - 2 for i >= 2
// All GM perversities of formal dimension n, in lexicographic order.
const std::vector<Perversity>& gm_perversities(int n);
// Pointwise sum and difference, not rounded.
Perversity pointwise_sum(const Perversity& p, const Perversity& q);
// Smallest GM perversity >= s; throws MathError unless s <= t.
Perversity gm_closure(const Perversity& s);
// Largest GM perversity <= s; throws MathError when s has a negative value.
Perversity gm_interior(const Perversity& s);
// Smallest GM perversity >= p + q; requires p + q <= t.
Perversity perv_plus(const Perversity& p, const Perversity& q);
// Largest GM perversity <= q - p; requires p <= q.
Perversity perv_minus(const Perversity& q, const Perversity& p);
// D p = t - p
Perversity perv_dual(const Perversity& p);

// A functor from the GM poset of formal dimension n to cochain complexes on
// a common degree range. Every perversity carries a component; structure
// maps are stored for the covering relations and composed on demand.
class PerverseComplex {
public:
    PerverseComplex(int n, const Field& F, int lo, int hi);

    int n() const { return n_; }
    const Field& field() const { return F_; }
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    const std::vector<Perversity>& perversities() const { return gm_perversities(n_); }
    int index(const Perversity& p) const;

    void set_component(const Perversity& p, FiniteComplex C);
    const FiniteComplex& at(const Perversity& p) const { return comps_.at(index(p)); }
    // Structure map for a covering pair p < q (degree -> matrix).
    void set_map(const Perversity& p, const Perversity& q, std::map<int, SparseMatrix> m);
    // Structure map for any p <= q in degree deg.
    SparseMatrix map(const Perversity& p, const Perversity& q, int deg) const;

    // Throws MathError unless every component lies on [lo, hi] and every
    // structure map is a chain map of the right shape.
    void validate() const;
    std::map<Perversity, std::map<int, int>> homology() const;

private:
    int n_;
    Field F_;
    int lo_, hi_;
    std::vector<FiniteComplex> comps_;
    std::map<std::pair<int, int>, std::map<int, SparseMatrix>> maps_;
};

// Covering pairs (i, j) of the GM poset, by index.
const std::vector<std::pair<int, int>>& gm_covers(int n);

// The complex with one basis element in degree 0.
FiniteComplex unit_complex(const Field& F);
// F_p(C)_q = C if p <= q and 0 otherwise; structure maps identity or zero.
PerverseComplex F_perversity(int n, const Perversity& p, const FiniteComplex& C);
// (Z (x) Y)^r = colim_{p+q<=r} Z^p (x) Y^q
PerverseComplex perv_tensor(const PerverseComplex& Z, const PerverseComplex& Y);
// [Z, Y]^r = lim_{r<=q-p} [Z^p, Y^q]
PerverseComplex perv_hom(const PerverseComplex& Z, const PerverseComplex& Y);
// DZ = [Z, F_0(F)]; (DZ)^r_k = Hom(Z^{t-r}_{-k}, F)
PerverseComplex perv_dual_complex(const PerverseComplex& Z);

// Degree-k natural transformations X -> W: families f_r of degree-k
// graded maps commuting with the structure maps. Dimension of the whole
// space, and of those commuting with the differentials.
struct NatDims {
    int all = 0;
    int chain = 0;
};
NatDims natural_maps(const PerverseComplex& X, const PerverseComplex& W, int k);
// Dimension of the degree-0 chain maps N -> M between plain complexes.
int chain_map_dim(const FiniteComplex& N, const FiniteComplex& M);

// A morphism of perverse complexes: per perversity index, degree -> matrix.
struct PerverseMap {
    const PerverseComplex* source = nullptr;
    const PerverseComplex* target = nullptr;
    std::map<int, std::map<int, SparseMatrix>> maps;

    SparseMatrix at(int idx, int deg) const;
};
bool is_perverse_map(const PerverseMap& f);
// Perversity-wise quasi-isomorphism; throws MathError if f is not a map.
bool is_perverse_quasi_iso(const PerverseMap& f);
// h has degree -1: dh + hd = f - g in every perversity, and h commutes
// with the structure maps.
bool is_perverse_homotopy(const PerverseMap& f, const PerverseMap& g, const PerverseMap& h);

// A DGA whose perverse pieces are spanned by basis elements: A^p is spanned
// by the e_i with weight(i) <= p. Requires d e_i in A^{weight(i)} and
// e_i e_j in A^{weight(i) (+) weight(j)} whenever the sum is <= t.
struct PerverseDGA {
    int n = 2;
    std::shared_ptr<const FiniteDGA> A;
    std::vector<Perversity> weight;

    void validate() const;
    PerverseComplex as_complex() const;
};

// The r-component of the perverse Hochschild cochain complex of A with
// coefficients in itself, truncated at length L. A word w with weight
// s(w) = sum of letter weights lies in the domain when s(w) has a GM
// closure with r + closure <= t; cochains are defined on those words only
// and take values in A^{r (+) closure}.
struct PerverseHochschild {
    Perversity r;
    std::shared_ptr<const WordSpace> W;
    std::shared_ptr<const Bimodule> M;
    std::unique_ptr<HochschildComplex> C;
    std::vector<Perversity> weight;               // per basis element of A
    std::vector<int> word_ok;                     // per word: allowed
    std::vector<Perversity> value_bound;          // per word: r (+) closure
    // Supported on allowed words with values under the bound.
    bool admissible(const HCochain& f) const;
    // Drops the values on words outside the domain of the r-component.
    HCochain restrict(const HCochain& f) const;
    // The differential of the r-component: D followed by restriction.
    HCochain D(const HCochain& f) const { return restrict(C->D(f)); }
};
std::unique_ptr<PerverseHochschild> perverse_hochschild(const PerverseDGA& A, const Perversity& r,
                                                        std::shared_ptr<const WordSpace> W, int L);
// D maps the restricted span into itself in degrees [lo, hi].
bool perverse_hochschild_closed(const PerverseHochschild& P, int lo, int hi);

}  // namespace opalg
