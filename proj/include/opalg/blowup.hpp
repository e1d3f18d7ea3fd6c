#pragma once

#include <map>
#include <memory>
#include <vector>

#include "opalg/barratt_eccles.hpp"
#include "opalg/complex.hpp"
#include "opalg/perverse.hpp"
#include "opalg/simplicial.hpp"

namespace opalg {

// A simplicial complex with vertex levels in 0..n. X_i is the full
// subcomplex on the vertices of level <= i, so a simplex splits as the join
// of its level parts and meets X_i in the face spanned by levels <= i.
class FilteredComplex {
public:
    FilteredComplex(std::shared_ptr<const SimplicialComplex> K, std::vector<int> level, int n);
    // Requires "filtration" on every vertex and "formal_dimension"; throws InputError.
    static FilteredComplex from_data(const SimplicialComplexData& d);
    // Every vertex at level n: no singular strata.
    static FilteredComplex trivial(std::shared_ptr<const SimplicialComplex> K, int n);

    const SimplicialComplex& complex() const { return *K_; }
    std::shared_ptr<const SimplicialComplex> complex_ptr() const { return K_; }
    int n() const { return n_; }
    int level(int v) const { return level_[v]; }

    // parts[i] = vertices of s with level i, in vertex order
    std::vector<SimplexVerts> decomposition(const SimplexVerts& s) const;
    bool is_regular(const SimplexVerts& s) const;
    // dim(s ∩ X_i), -1 when empty
    int dim_in(const SimplexVerts& s, int i) const;

private:
    std::shared_ptr<const SimplicialComplex> K_;
    std::vector<int> level_;
    int n_;
};

// One basis element of N^*(cΔ_0) (x) ... (x) N^*(cΔ_{n-1}) (x) N^*(Δ_n) for a
// regular simplex. Factor i < n is a nonempty subset of Δ_i plus the apex,
// encoded as a bit mask over the vertices of Δ_i (in order) with the apex as
// the highest bit; the last factor is a nonempty subset of Δ_n.
struct LocalTensor {
    std::vector<std::uint32_t> masks;
    auto operator<=>(const LocalTensor&) const = default;
};

// Blown-up cochains of a filtered complex: compatible families
// ω = (ω_σ) over the regular simplices, with perverse degrees and the
// p-intersection subcomplexes.
class BlowupCochains {
public:
    BlowupCochains(std::shared_ptr<const FilteredComplex> X, const Field& F);

    const FilteredComplex& space() const { return *X_; }
    const Field& field() const { return F_; }
    int top_degree() const { return top_; }

    // Coordinates of degree k: (regular simplex, local tensor) pairs.
    int coord_count(int k) const;
    std::pair<int, const LocalTensor*> coord(int k, int c) const;  // (regular simplex id, tensor)
    int coord_index(int k, int sigma, const LocalTensor& t) const;  // -1 if absent
    const std::vector<SimplexVerts>& regular_simplices() const { return regular_; }

    // The differential on coordinate vectors (not necessarily compatible).
    SparseVec d(int k, const SparseVec& v) const;
    // Basis of the compatible families in degree k.
    const std::vector<SparseVec>& families(int k) const;
    bool is_compatible(int k, const SparseVec& v) const;

    // ‖v‖ as a function on codimensions 0..n; -1 stands for -infinity.
    std::vector<int> perverse_degree(int k, const SparseVec& v) const;
    bool allowable(int k, const SparseVec& v, const Perversity& p) const;

    // The p-intersection complex on degrees [0, top]; basis(p, k) lists the
    // families spanning degree k in the order of the complex.
    const FiniteComplex& complex(const Perversity& p) const;
    const std::vector<SparseVec>& basis(const Perversity& p, int k) const;
    std::map<int, int> betti(const Perversity& p) const { return complex(p).homology(); }
    // p -> Ñ_p with inclusions as structure maps.
    PerverseComplex perverse() const;

    SparseVec unit() const;
    // Simplex-wise product of the tensor algebras with the Alexander-Whitney
    // cup in each factor and the Koszul sign between factors.
    SparseVec cup(int k1, const SparseVec& a, int k2, const SparseVec& b) const;
    // Simplex-wise E_+ action: iterated diagonal of x, then the surjection
    // action in every factor. Positive-degree x requires characteristic 2.
    SparseVec eplus_action(const BEElement& x, const std::vector<std::pair<int, SparseVec>>& inputs) const;
    // As above for inputs allowable at p_1..p_m; throws MathError on perversity
    // overflow (sum of the p_i not below t) or on a non-allowable input.
    SparseVec eplus_action(const BEElement& x, const std::vector<std::pair<int, SparseVec>>& inputs,
                           const std::vector<Perversity>& perversities) const;

private:
    struct Local {
        std::vector<SimplexVerts> parts;
        std::map<int, std::vector<LocalTensor>> tensors;  // degree -> tensors
    };
    struct PComplex {
        FiniteComplex C;
        std::map<int, std::vector<SparseVec>> basis;
    };
    int tensor_degree(const LocalTensor& t) const;
    bool tensor_allowable(int sigma, const LocalTensor& t, const Perversity& p) const;
    SparseVec local_d(int sigma, const LocalTensor& t) const;  // in local pairs (degree k+1 coords)
    LocalTensor restrict_to(int sigma, int tau, const LocalTensor& t, bool& ok) const;
    const PComplex& pcomplex(const Perversity& p) const;

    std::shared_ptr<const FilteredComplex> X_;
    Field F_;
    int top_ = 0;
    std::vector<SimplexVerts> regular_;
    std::map<SimplexVerts, int> regular_index_;
    std::vector<Local> local_;
    std::map<int, std::vector<std::pair<int, int>>> coords_;   // k -> (sigma, tensor idx)
    std::map<int, std::map<std::pair<int, LocalTensor>, int>> coord_index_;
    mutable std::map<int, std::vector<SparseVec>> families_;
    mutable std::map<Perversity, PComplex> pcomplexes_;
};

// Intersection chains: a k-simplex is p-allowable when
// dim(σ ∩ X_{n-c}) <= k - c + p(c) for 2 <= c <= n; I^pC_k consists of the
// allowable chains with allowable boundary.
struct IntersectionChains {
    FiniteComplex C;                           // homological grading
    std::map<int, std::vector<SparseVec>> basis;  // degree -> chains over the k-simplices
};
IntersectionChains intersection_chains(const FilteredComplex& X, const Perversity& p, const Field& F);
bool simplex_allowable(const FilteredComplex& X, const SimplexVerts& s, const Perversity& p);

// Cap product with a fundamental cycle ζ ∈ I^0C_n: DP(ω) = Σ_σ ζ_σ μ_*(ω_σ ∩ Δ̃_σ),
// as a cochain map Ñ_p → I^pC_{n-*} (chains of dimension n-k in degree k).
struct CapDuality {
    SparseVec zeta;                       // over the n-simplices
    std::shared_ptr<FiniteComplex> target;  // I^pC_{n-*}, cohomological
    ChainMap map;
    bool chain_map = false;
    bool bijective = false;               // in homology, every degree
    std::map<int, int> induced_rank;
    std::map<int, int> source_betti, target_betti;
};
// Chain-level cap of a single cochain with ζ, as a chain on the (n-k)-simplices.
SparseVec cap_with_zeta(const BlowupCochains& N, int k, const SparseVec& omega, const SparseVec& zeta);
// ζ from the orientation data, else the facet sum over F_2, else the unique
// full-support n-cycle; throws InputError when ζ is not a cycle of I^0C_n.
SparseVec fundamental_cycle(const FilteredComplex& X, const Field& F);
CapDuality cap_duality(const BlowupCochains& N, const Perversity& p);

}  // namespace opalg
