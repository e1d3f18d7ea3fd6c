#pragma once

#include <random>

#include "opalg/barratt_eccles.hpp"

namespace testhelp {

inline opalg::Simplex random_simplex(int arity, int degree, std::mt19937& rng) {
    const opalg::PermTable& T = opalg::PermTable::get(arity);
    std::uniform_int_distribution<int> pick(0, T.order() - 1);
    opalg::Simplex s;
    while (static_cast<int>(s.size()) < degree + 1) {
        int r = pick(rng);
        if (!s.empty() && s.back() == r) continue;
        s.push_back(static_cast<std::uint16_t>(r));
    }
    return s;
}

inline opalg::BEElement random_element(int arity, int degree, int terms, std::mt19937& rng,
                                       const opalg::Field& F) {
    opalg::BEElement x(arity);
    std::uniform_int_distribution<int> coef(1, static_cast<int>(F.p()) - 1);
    for (int t = 0; t < terms; ++t) x.add(random_simplex(arity, degree, rng), coef(rng), F);
    return x;
}

// Relabels inputs 2..n of every permutation by a fixed permutation tau (tau(1) = 1).
inline opalg::BEElement relabel(const opalg::Perm& tau, const opalg::BEElement& x, const opalg::Field& F) {
    return opalg::be_act(tau, x, F);
}

}  // namespace testhelp
