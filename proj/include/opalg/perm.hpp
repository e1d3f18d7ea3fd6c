#pragma once

#include <compare>
#include <string>
#include <vector>

namespace opalg {

// A permutation of {1..k} written as its value sequence (s(1), ..., s(k)).
class Perm {
public:
    Perm() = default;
    explicit Perm(std::vector<int> values);  // throws unless a bijection of {1..k}

    static Perm identity(int k);

    int size() const { return static_cast<int>(v_.size()); }
    int operator()(int i) const { return v_[i - 1]; }  // 1-indexed
    const std::vector<int>& values() const { return v_; }

    Perm inverse() const;
    int sign() const;  // +1 or -1
    std::string str() const;

    auto operator<=>(const Perm&) const = default;

private:
    std::vector<int> v_;
};

// Group product as functions: (a * b)(i) = a(b(i)). This is the "a.b"
// of the operad axioms; the symmetric action on the permutation operad
// is left translation.
Perm operator*(const Perm& a, const Perm& b);

// Block permutation s_*(i_1..i_k): the output lists block s(1), then
// block s(2), ..., where block j is the j-th run of i_j consecutive integers.
Perm block_permutation(const Perm& s, const std::vector<int>& sizes);
Perm direct_sum(const std::vector<Perm>& taus);
Perm perm_operad_compose(const Perm& s, const std::vector<Perm>& taus);
Perm partial_compose(const Perm& s, int slot, const Perm& t);
// s^op = (s(i+1), ..., s(k), 1, s(1), ..., s(i-1)) with i = s^{-1}(1).
Perm op(const Perm& s);

// Removes input 1 (the value 1) and renumbers: plugging the arity-0 unit
// into slot 1.
Perm delete_input(const Perm& s, int input);

std::vector<Perm> all_perms(int k);

}  // namespace opalg
