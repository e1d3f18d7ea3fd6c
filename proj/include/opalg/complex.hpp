#pragma once

#include <map>
#include <vector>

#include "opalg/linalg.hpp"

namespace opalg {

enum class Grading { Cohomological, Homological };

// Finite chain complex over F_p on the explicit degree range [lo, hi].
// diff(d) maps degree d to degree d + step(), step = +1 (cohomological)
// or -1 (homological). Columns index the source basis.
class FiniteComplex {
public:
    FiniteComplex(const Field& F, int lo, int hi, Grading g = Grading::Cohomological);

    const Field& field() const { return F_; }
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    Grading grading() const { return grading_; }
    int step() const { return grading_ == Grading::Cohomological ? 1 : -1; }

    void set_dim(int deg, int n);
    int dim(int deg) const;
    // Differential out of degree deg. Shapes are checked against dims.
    void set_diff(int deg, SparseMatrix d);
    const SparseMatrix& diff(int deg) const;

    // Throws MathError unless every shape matches and d o d = 0.
    void validate() const;
    std::map<int, int> homology() const;
    long long euler_characteristic() const;
    long long homology_euler_characteristic() const;

private:
    Field F_;
    int lo_, hi_;
    Grading grading_;
    std::map<int, int> dims_;
    mutable std::map<int, SparseMatrix> diffs_;
};

FiniteComplex sphere_complex(const Field& F, int n, Grading g = Grading::Cohomological);
FiniteComplex disk_complex(const Field& F, int n, Grading g = Grading::Cohomological);
FiniteComplex direct_sum(const FiniteComplex& A, const FiniteComplex& B);

struct ChainMap {
    const FiniteComplex* source = nullptr;
    const FiniteComplex* target = nullptr;
    std::map<int, SparseMatrix> maps;  // degree -> (dim target) x (dim source)

    SparseMatrix at(int deg) const;
};

bool is_chain_map(const ChainMap& f);
// Rank of the induced map H_deg(source) -> H_deg(target).
int induced_rank(const ChainMap& f, int deg);
// Throws MathError when f does not commute with the differentials.
bool is_quasi_iso(const ChainMap& f);

// Cycle basis of C in degree deg, and the boundaries landing in deg.
std::vector<SparseVec> cycles(const FiniteComplex& C, int deg);
std::vector<SparseVec> boundaries(const FiniteComplex& C, int deg);

}  // namespace opalg
