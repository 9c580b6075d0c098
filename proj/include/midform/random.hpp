#pragma once

#include "linalg.hpp"

#include <cstdint>
#include <random>

namespace midform {

/// Seeded RNG used by every randomized search in the library.  All consumers
/// take an explicit seed so identical inputs reproduce identical runs.
struct SearchRng {
    std::mt19937_64 gen;

    explicit SearchRng(std::uint64_t seed) : gen(seed) {}

    int int_in(int lo, int hi) {  // inclusive bounds
        std::uniform_int_distribution<int> dist(lo, hi);
        return dist(gen);
    }

    double unit() {
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        return dist(gen);
    }

    /// Random unimodular integer matrix built from row shears and signed
    /// swaps; determinant is +-1, entries stay small for few steps.
    RatMatrix unimodular(int n, int shears) {
        RatMatrix m = RatMatrix::identity(n);
        for (int s = 0; s < shears; ++s) {
            const int kind = int_in(0, 3);
            const int i = int_in(0, n - 1);
            int j = int_in(0, n - 1);
            if (n > 1)
                while (j == i) j = int_in(0, n - 1);
            if (kind < 3 && n > 1) {
                int c = int_in(-2, 2);
                if (c == 0) c = 1;
                for (int t = 0; t < n; ++t) m.at(i, t) += Rational(c) * m.at(j, t);
            } else if (n > 1) {
                for (int t = 0; t < n; ++t) {
                    Rational tmp = m.at(i, t);
                    m.at(i, t) = -m.at(j, t);
                    m.at(j, t) = tmp;
                }
            }
        }
        return m;
    }
};

}  // namespace midform
