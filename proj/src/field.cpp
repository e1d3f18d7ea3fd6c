#include "opalg/field.hpp"

namespace opalg {

bool is_prime(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

Field::Field(std::uint32_t p) : p_(p) {
    if (!is_prime(p)) throw MathError("field characteristic " + std::to_string(p) + " is not prime");
    if (p > 46337) throw MathError("field characteristic too large");
}

Elt Field::inv(Elt a) const {
    if (a == 0) throw MathError("division by zero in F_" + std::to_string(p_));
    long long t = 0, nt = 1, r = p_, nr = a;
    while (nr != 0) {
        long long q = r / nr;
        long long tmp = t - q * nt;
        t = nt;
        nt = tmp;
        tmp = r - q * nr;
        r = nr;
        nr = tmp;
    }
    return from_int(t);
}

}  // namespace opalg
