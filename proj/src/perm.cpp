#include "opalg/perm.hpp"

#include <algorithm>
#include <numeric>

#include "opalg/field.hpp"

namespace opalg {

Perm::Perm(std::vector<int> values) : v_(std::move(values)) {
    std::vector<char> seen(v_.size() + 1, 0);
    for (int x : v_) {
        if (x < 1 || x > static_cast<int>(v_.size()) || seen[x])
            throw MathError("not a permutation value sequence");
        seen[x] = 1;
    }
}

Perm Perm::identity(int k) {
    std::vector<int> v(k);
    std::iota(v.begin(), v.end(), 1);
    return Perm(std::move(v));
}

Perm Perm::inverse() const {
    std::vector<int> w(v_.size());
    for (std::size_t i = 0; i < v_.size(); ++i) w[v_[i] - 1] = static_cast<int>(i) + 1;
    Perm p;
    p.v_ = std::move(w);
    return p;
}

int Perm::sign() const {
    int inv = 0;
    for (std::size_t i = 0; i < v_.size(); ++i)
        for (std::size_t j = i + 1; j < v_.size(); ++j)
            if (v_[i] > v_[j]) ++inv;
    return (inv % 2) ? -1 : 1;
}

std::string Perm::str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < v_.size(); ++i) s += (i ? "," : "") + std::to_string(v_[i]);
    return s + ")";
}

Perm operator*(const Perm& a, const Perm& b) {
    if (a.size() != b.size()) throw MathError("product of permutations of different sizes");
    std::vector<int> w(a.size());
    for (int i = 1; i <= a.size(); ++i) w[i - 1] = a(b(i));
    return Perm(std::move(w));
}

Perm block_permutation(const Perm& s, const std::vector<int>& sizes) {
    const int k = s.size();
    if (static_cast<int>(sizes.size()) != k) throw MathError("block sizes do not match the permutation size");
    std::vector<int> start(k + 1, 0);
    for (int j = 0; j < k; ++j) {
        if (sizes[j] < 0) throw MathError("negative block size");
        start[j + 1] = start[j] + sizes[j];
    }
    std::vector<int> w;
    w.reserve(start[k]);
    for (int pos = 1; pos <= k; ++pos) {
        int blk = s(pos) - 1;
        for (int x = start[blk] + 1; x <= start[blk + 1]; ++x) w.push_back(x);
    }
    return Perm(std::move(w));
}

Perm direct_sum(const std::vector<Perm>& taus) {
    std::vector<int> w;
    int off = 0;
    for (auto& t : taus) {
        for (int x : t.values()) w.push_back(x + off);
        off += t.size();
    }
    return Perm(std::move(w));
}

Perm perm_operad_compose(const Perm& s, const std::vector<Perm>& taus) {
    if (static_cast<int>(taus.size()) != s.size()) throw MathError("arity mismatch in composition");
    std::vector<int> sizes;
    for (auto& t : taus) sizes.push_back(t.size());
    return direct_sum(taus) * block_permutation(s, sizes);
}

Perm partial_compose(const Perm& s, int slot, const Perm& t) {
    if (slot < 1 || slot > s.size()) throw MathError("composition slot out of range");
    std::vector<Perm> taus(s.size(), Perm::identity(1));
    taus[slot - 1] = t;
    return perm_operad_compose(s, taus);
}

Perm op(const Perm& s) {
    const int k = s.size();
    if (k < 1) throw MathError("op of the empty permutation");
    int i = s.inverse()(1);
    std::vector<int> w;
    for (int j = i + 1; j <= k; ++j) w.push_back(s(j));
    w.push_back(1);
    for (int j = 1; j < i; ++j) w.push_back(s(j));
    return Perm(std::move(w));
}

Perm delete_input(const Perm& s, int input) {
    std::vector<int> w;
    for (int x : s.values())
        if (x != input) w.push_back(x > input ? x - 1 : x);
    return Perm(std::move(w));
}

std::vector<Perm> all_perms(int k) {
    std::vector<int> v(k);
    std::iota(v.begin(), v.end(), 1);
    std::vector<Perm> out;
    do {
        out.emplace_back(v);
    } while (std::next_permutation(v.begin(), v.end()));
    return out;
}

}  // namespace opalg
