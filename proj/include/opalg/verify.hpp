#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "opalg/field.hpp"

namespace opalg {

struct CheckTally {
    std::string name;
    long long checked = 0;
    long long failed = 0;
};

struct Verification {
    std::deque<CheckTally> checks;
    bool ok() const;
    CheckTally& tally(const std::string& name);
};

// May associativity, unit and both equivariance identities of the
// permutation operad: exhaustive for arities <= exhaustive_arity, plus
// `samples` random draws with an arity-4 outer operation.
Verification verify_permutation_operad(int exhaustive_arity, int samples, std::uint32_t seed);

// Barratt-Eccles: d^2 = 0 on E(k)_l for k <= max_arity, l <= max_degree,
// partial compositions (sequential and parallel associativity, both
// equivariances, Leibniz rule) exhaustively on small pieces and on random
// samples with arity-4 results.
Verification verify_barratt_eccles(const Field& F, int max_arity, int max_degree, int samples, std::uint32_t seed);

}  // namespace opalg
