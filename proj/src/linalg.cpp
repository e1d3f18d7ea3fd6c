#include "opalg/linalg.hpp"

#include <algorithm>

namespace opalg {

void axpy(SparseVec& y, Elt c, const SparseVec& x, const Field& F) {
    if (c == 0 || x.empty()) return;
    SparseVec out;
    out.reserve(y.size() + x.size());
    std::size_t i = 0, j = 0;
    while (i < y.size() || j < x.size()) {
        if (j == x.size() || (i < y.size() && y[i].first < x[j].first)) {
            out.push_back(y[i++]);
        } else if (i == y.size() || x[j].first < y[i].first) {
            out.emplace_back(x[j].first, F.mul(c, x[j].second));
            ++j;
        } else {
            Elt v = F.add(y[i].second, F.mul(c, x[j].second));
            if (v != 0) out.emplace_back(y[i].first, v);
            ++i;
            ++j;
        }
    }
    y.swap(out);
}

SparseVec scaled(const SparseVec& x, Elt c, const Field& F) {
    SparseVec out;
    if (c == 0) return out;
    out.reserve(x.size());
    for (auto& [i, v] : x) out.emplace_back(i, F.mul(c, v));
    return out;
}

SparseVec from_dense(const std::vector<Elt>& v) {
    SparseVec out;
    for (int i = 0; i < static_cast<int>(v.size()); ++i)
        if (v[i] != 0) out.emplace_back(i, v[i]);
    return out;
}

std::vector<Elt> to_dense(const SparseVec& v, int n) {
    std::vector<Elt> out(n, 0);
    for (auto& [i, x] : v) out[i] = x;
    return out;
}

Elt coeff(const SparseVec& v, int idx) {
    auto it = std::lower_bound(v.begin(), v.end(), std::make_pair(idx, Elt(0)));
    if (it != v.end() && it->first == idx) return it->second;
    return 0;
}

SparseMatrix::SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), cols_data_(cols) {
    if (rows < 0 || cols < 0) throw MathError("negative matrix dimension");
}

void SparseMatrix::set(int r, int c, Elt v) {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw MathError("matrix index out of range");
    auto& col = cols_data_[c];
    auto it = std::lower_bound(col.begin(), col.end(), std::make_pair(r, Elt(0)));
    if (it != col.end() && it->first == r) {
        if (v == 0)
            col.erase(it);
        else
            it->second = v;
    } else if (v != 0) {
        col.insert(it, {r, v});
    }
}

void SparseMatrix::add(int r, int c, Elt v, const Field& F) { set(r, c, F.add(get(r, c), v)); }

Elt SparseMatrix::get(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw MathError("matrix index out of range");
    return coeff(cols_data_[c], r);
}

void SparseMatrix::set_col(int c, SparseVec v) {
    if (c < 0 || c >= cols_) throw MathError("matrix column out of range");
    for (auto& e : v)
        if (e.first < 0 || e.first >= rows_ || e.second == 0)
            throw MathError("bad column entry");
    cols_data_[c] = std::move(v);
}

SparseMatrix SparseMatrix::transpose() const {
    SparseMatrix T(cols_, rows_);
    for (int c = 0; c < cols_; ++c)
        for (auto& [r, v] : cols_data_[c]) T.cols_data_[r].emplace_back(c, v);
    return T;
}

SparseVec SparseMatrix::apply(const SparseVec& x, const Field& F) const {
    SparseVec y;
    for (auto& [c, v] : x) {
        if (c < 0 || c >= cols_) throw MathError("vector index out of range");
        axpy(y, v, cols_data_[c], F);
    }
    return y;
}

SparseMatrix SparseMatrix::multiply(const SparseMatrix& B, const Field& F) const {
    if (cols_ != B.rows_) throw MathError("matrix shape mismatch in product");
    SparseMatrix P(rows_, B.cols_);
    for (int c = 0; c < B.cols_; ++c) P.cols_data_[c] = apply(B.cols_data_[c], F);
    return P;
}

SparseMatrix SparseMatrix::added(const SparseMatrix& B, Elt c, const Field& F) const {
    if (rows_ != B.rows_ || cols_ != B.cols_) throw MathError("matrix shape mismatch in sum");
    SparseMatrix S = *this;
    for (int j = 0; j < cols_; ++j) axpy(S.cols_data_[j], c, B.cols_data_[j], F);
    return S;
}

bool SparseMatrix::is_zero() const {
    for (auto& c : cols_data_)
        if (!c.empty()) return false;
    return true;
}

std::size_t SparseMatrix::nnz() const {
    std::size_t n = 0;
    for (auto& c : cols_data_) n += c.size();
    return n;
}

std::map<std::pair<int, int>, Elt> SparseMatrix::entries() const {
    std::map<std::pair<int, int>, Elt> out;
    for (int c = 0; c < cols_; ++c)
        for (auto& [r, v] : cols_data_[c]) out[{r, c}] = v;
    return out;
}

std::vector<Elt> SparseMatrix::dense() const {
    std::vector<Elt> out(static_cast<std::size_t>(rows_) * cols_, 0);
    for (int c = 0; c < cols_; ++c)
        for (auto& [r, v] : cols_data_[c]) out[static_cast<std::size_t>(r) * cols_ + c] = v;
    return out;
}

SparseMatrix SparseMatrix::identity(int n) {
    SparseMatrix I(n, n);
    for (int i = 0; i < n; ++i) I.cols_data_[i] = {{i, 1}};
    return I;
}

SparseMatrix SparseMatrix::from_dense(int rows, int cols, const std::vector<Elt>& rm) {
    SparseMatrix M(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (rm[static_cast<std::size_t>(r) * cols + c] != 0)
                M.cols_data_[c].emplace_back(r, rm[static_cast<std::size_t>(r) * cols + c]);
    return M;
}

bool SparseMatrix::operator==(const SparseMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && cols_data_ == o.cols_data_;
}

int rank_dense(const SparseMatrix& M, const Field& F, bool parallel) {
    const int R = M.rows(), C = M.cols();
    std::vector<Elt> a = M.dense();
    int rank = 0;
    for (int c = 0; c < C && rank < R; ++c) {
        int piv = -1;
        for (int r = rank; r < R; ++r)
            if (a[static_cast<std::size_t>(r) * C + c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        if (piv != rank)
            for (int j = c; j < C; ++j)
                std::swap(a[static_cast<std::size_t>(piv) * C + j], a[static_cast<std::size_t>(rank) * C + j]);
        Elt* prow = &a[static_cast<std::size_t>(rank) * C];
        Elt iv = F.inv(prow[c]);
        for (int j = c; j < C; ++j) prow[j] = F.mul(prow[j], iv);
        const int start = rank + 1;
#pragma omp parallel for schedule(static) if (parallel && (R - start) * (C - c) > 4096)
        for (int r = start; r < R; ++r) {
            Elt* row = &a[static_cast<std::size_t>(r) * C];
            Elt f = row[c];
            if (f == 0) continue;
            Elt nf = F.neg(f);
            for (int j = c; j < C; ++j)
                if (prow[j] != 0) row[j] = F.add(row[j], F.mul(nf, prow[j]));
        }
        ++rank;
    }
    return rank;
}

int rank_sparse(const SparseMatrix& M, const Field& F) {
    SparseMatrix T = M.transpose();
    std::vector<int> order(T.cols());
    for (int i = 0; i < T.cols(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return T.col(x).size() < T.col(y).size(); });
    std::unordered_map<int, SparseVec> piv;
    for (int idx : order) {
        SparseVec row = T.col(idx);
        while (!row.empty()) {
            auto it = piv.find(row.front().first);
            if (it == piv.end()) break;
            axpy(row, F.neg(row.front().second), it->second, F);
        }
        if (row.empty()) continue;
        Elt iv = F.inv(row.front().second);
        int lead = row.front().first;
        piv.emplace(lead, scaled(row, iv, F));
    }
    return static_cast<int>(piv.size());
}

int rank(const SparseMatrix& M, const Field& F) {
    if (M.rows() == 0 || M.cols() == 0) return 0;
    if (M.rows() <= 64 && M.cols() <= 64) return rank_dense(M, F, false);
    double density = static_cast<double>(M.nnz()) / (static_cast<double>(M.rows()) * M.cols());
    if (density > 0.25 && static_cast<double>(M.rows()) * M.cols() < 4.0e6) return rank_dense(M, F, true);
    return rank_sparse(M, F);
}

int rank_reference(const SparseMatrix& M, const Field& F) {
    ColumnReducer red(F, false);
    for (int c = M.cols() - 1; c >= 0; --c) red.add(M.col(c));
    return red.rank();
}

ColumnReducer::ColumnReducer(const Field& F, bool track) : F_(F), track_(track) {}

SparseVec ColumnReducer::reduce(const SparseVec& v, SparseVec* combo) const {
    SparseVec r = v;
    if (combo) combo->clear();
    while (!r.empty()) {
        auto it = pivots_.find(r.back().first);
        if (it == pivots_.end()) break;
        const Pivot& p = it->second;
        Elt c = F_.mul(r.back().second, F_.inv(p.vec.back().second));
        axpy(r, F_.neg(c), p.vec, F_);
        if (combo && track_) axpy(*combo, c, p.combo, F_);
    }
    return r;
}

bool ColumnReducer::add(const SparseVec& v) {
    SparseVec combo;
    SparseVec r = reduce(v, track_ ? &combo : nullptr);
    int id = n_added_++;
    if (track_) {
        // r = v - sum combo_i * col_i, so the combination of r is e_id - combo.
        SparseVec c = scaled(combo, F_.neg(1), F_);
        axpy(c, 1, SparseVec{{id, 1}}, F_);
        combo.swap(c);
    }
    if (r.empty()) {
        if (track_) kernel_.push_back(std::move(combo));
        return false;
    }
    int low = r.back().first;
    pivots_.emplace(low, Pivot{std::move(r), std::move(combo)});
    return true;
}

std::vector<SparseVec> kernel_basis(const SparseMatrix& M, const Field& F) {
    ColumnReducer red(F, true);
    for (int c = 0; c < M.cols(); ++c) red.add(M.col(c));
    return red.kernel();
}

bool solve(const SparseMatrix& M, const SparseVec& b, SparseVec& x, const Field& F) {
    ColumnReducer red(F, true);
    for (int c = 0; c < M.cols(); ++c) red.add(M.col(c));
    SparseVec combo;
    SparseVec r = red.reduce(b, &combo);
    if (!r.empty()) return false;
    x = combo;
    return true;
}

}  // namespace opalg
