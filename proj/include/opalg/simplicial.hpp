#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "opalg/complex.hpp"
#include "opalg/dga.hpp"

namespace opalg {

// Malformed or inconsistent input data.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using SimplexVerts = std::vector<int>;  // sorted vertex indices

// A finite simplicial complex given by its facets. Vertices are stored in
// sorted label order and every simplex is a sorted list of vertex indices.
struct SimplicialComplexData {
    std::vector<long long> vertices;
    std::vector<SimplexVerts> facets;
    std::map<int, int> filtration;  // vertex index -> level, optional
    int formal_dimension = -1;      // optional
    std::vector<std::pair<SimplexVerts, long long>> orientation;  // optional top chain

    static SimplicialComplexData from_json(const nlohmann::json& j);
    static SimplicialComplexData parse(const std::string& text);
    nlohmann::json to_json() const;
    static SimplicialComplexData from_facets(const std::vector<std::vector<long long>>& facets);
};

// The downward closure of a SimplicialComplexData with indexed simplices.
class SimplicialComplex {
public:
    explicit SimplicialComplex(const SimplicialComplexData& data);

    const SimplicialComplexData& data() const { return data_; }
    int dimension() const { return static_cast<int>(simplices_.size()) - 1; }
    int count(int d) const;
    const std::vector<SimplexVerts>& simplices(int d) const { return simplices_[d]; }
    // Index of a simplex among those of its dimension, -1 if absent.
    int index(const SimplexVerts& s) const;

    // Simplicial chains, homological grading, d(v_0..v_m) = sum (-1)^i (..^v_i..).
    FiniteComplex chain_complex(const Field& F) const;
    // Top-dimensional chain from the orientation data; over F_2 the facet
    // sum is used when no orientation is given. Throws InputError otherwise.
    SparseVec fundamental_chain(const Field& F) const;
    bool is_cycle(const SparseVec& top, const Field& F) const;

private:
    SimplicialComplexData data_;
    std::vector<std::vector<SimplexVerts>> simplices_;
    std::vector<std::map<SimplexVerts, int>> index_;
};

// Normalized cochains as an E_+-algebra. Basis: element 0 is the unit
// (sum of vertex duals), elements 1..V-1 are the duals of vertices 1..V-1,
// then the duals of the simplices of dimension 1, 2, ... in index order.
class NormalizedCochains {
public:
    NormalizedCochains(std::shared_ptr<const SimplicialComplex> K, const Field& F);

    const SimplicialComplex& complex() const { return *K_; }
    const EPlusAlgebra& algebra() const { return E_; }
    const FiniteDGA& dga() const { return E_.A; }

    // Basis element for the dual of simplex (dim, idx); in dimension 0 the
    // dual of vertex 0 is not a basis element and is expressed via the unit.
    SparseVec dual_of(int dim, int idx) const;
    // Values of a cochain on all simplices of a dimension.
    std::vector<Elt> values(const SparseVec& x, int dim) const;
    SparseVec from_values(int dim, const std::vector<Elt>& vals) const;
    int basis_index(int dim, int idx) const;  // -1 for vertex 0

private:
    std::shared_ptr<const SimplicialComplex> K_;
    Field F_;
    std::vector<int> offset_;
    EPlusAlgebra E_;
};

// Alexander-Whitney cup product computed directly on values.
std::vector<Elt> aw_cup(const SimplicialComplex& K, const Field& F, int p, const std::vector<Elt>& a, int q,
                        const std::vector<Elt>& b);

struct CapProduct {
    std::shared_ptr<FiniteComplex> source;  // cochains
    std::shared_ptr<FiniteComplex> target;  // chains C_{n-k} placed in degree k
    ChainMap map;
};

// phi -> phi cap xi with phi cap (v_0..v_n) = phi(v_{n-k}..v_n) (v_0..v_{n-k}),
// signed so that the result is a chain map. Throws InputError when xi is
// not a cycle.
CapProduct cap_with_fundamental_cycle(const NormalizedCochains& A, const SparseVec& xi);

}  // namespace opalg
