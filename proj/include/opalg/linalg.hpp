#pragma once

#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "opalg/field.hpp"

namespace opalg {

// Sparse vector: entries sorted by index, no stored zeros.
using SparseVec = std::vector<std::pair<int, Elt>>;

void axpy(SparseVec& y, Elt c, const SparseVec& x, const Field& F);
SparseVec scaled(const SparseVec& x, Elt c, const Field& F);
SparseVec from_dense(const std::vector<Elt>& v);
std::vector<Elt> to_dense(const SparseVec& v, int n);
Elt coeff(const SparseVec& v, int idx);

// Column-major sparse matrix; column c is the image of basis vector c.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    void set(int r, int c, Elt v);
    void add(int r, int c, Elt v, const Field& F);
    Elt get(int r, int c) const;
    void set_col(int c, SparseVec v);
    const SparseVec& col(int c) const { return cols_data_[c]; }

    SparseMatrix transpose() const;
    SparseMatrix multiply(const SparseMatrix& B, const Field& F) const;
    SparseMatrix added(const SparseMatrix& B, Elt c, const Field& F) const;
    SparseVec apply(const SparseVec& x, const Field& F) const;
    bool is_zero() const;
    std::size_t nnz() const;
    std::map<std::pair<int, int>, Elt> entries() const;
    std::vector<Elt> dense() const;  // row-major

    static SparseMatrix identity(int n);
    static SparseMatrix from_dense(int rows, int cols, const std::vector<Elt>& rm);

    bool operator==(const SparseMatrix& o) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<SparseVec> cols_data_;
};

// Rank over F_p. Dense elimination below 64x64, sparse row echelon above.
int rank(const SparseMatrix& M, const Field& F);
// Independent second elimination: column reduction on the lowest nonzero
// row, columns processed right to left.
int rank_reference(const SparseMatrix& M, const Field& F);
// Dense Gaussian elimination, optionally with the row updates spread over
// OpenMP threads. The result does not depend on the thread count.
int rank_dense(const SparseMatrix& M, const Field& F, bool parallel);
int rank_sparse(const SparseMatrix& M, const Field& F);

// Incremental column reduction with optional bookkeeping of combinations.
// Each stored pivot vector has a distinct lowest (largest) index.
class ColumnReducer {
public:
    ColumnReducer(const Field& F, bool track);

    // Returns true when v is independent of the vectors added so far.
    bool add(const SparseVec& v);
    int rank() const { return static_cast<int>(pivots_.size()); }
    int added() const { return n_added_; }

    // Reduces v against the pivots; when combo is given and tracking is on,
    // v - residual = sum_i combo[i] * (i-th added vector).
    SparseVec reduce(const SparseVec& v, SparseVec* combo = nullptr) const;
    bool contains(const SparseVec& v) const { return reduce(v).empty(); }
    // Combinations of added vectors that vanish (requires tracking).
    const std::vector<SparseVec>& kernel() const { return kernel_; }

private:
    struct Pivot {
        SparseVec vec;
        SparseVec combo;
    };
    Field F_;
    bool track_;
    int n_added_ = 0;
    std::unordered_map<int, Pivot> pivots_;
    std::vector<SparseVec> kernel_;
};

// Kernel basis of M (vectors in the source space).
std::vector<SparseVec> kernel_basis(const SparseMatrix& M, const Field& F);
// Solve M x = b; returns false when b is not in the image.
bool solve(const SparseMatrix& M, const SparseVec& b, SparseVec& x, const Field& F);

}  // namespace opalg
