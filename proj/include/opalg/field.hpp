#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace opalg {

using Elt = std::uint32_t;

class Field {
public:
    explicit Field(std::uint32_t p);

    std::uint32_t p() const { return p_; }

    Elt add(Elt a, Elt b) const {
        std::uint32_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    Elt sub(Elt a, Elt b) const { return a >= b ? a - b : a + p_ - b; }
    Elt neg(Elt a) const { return a == 0 ? 0 : p_ - a; }
    Elt mul(Elt a, Elt b) const {
        return static_cast<Elt>((static_cast<std::uint64_t>(a) * b) % p_);
    }
    Elt inv(Elt a) const;
    Elt from_int(long long v) const {
        long long r = v % static_cast<long long>(p_);
        return static_cast<Elt>(r < 0 ? r + p_ : r);
    }
    // (-1)^e as a field element
    Elt sign(long long e) const { return (e & 1) ? neg(1) : 1; }
    // symmetric representative in (-p/2, p/2]
    long long lift(Elt a) const {
        return a > p_ / 2 ? static_cast<long long>(a) - p_ : static_cast<long long>(a);
    }

    bool operator==(const Field& o) const { return p_ == o.p_; }

private:
    std::uint32_t p_;
};

bool is_prime(std::uint32_t n);

class MathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace opalg
