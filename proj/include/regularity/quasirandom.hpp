#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "regularity/graph.hpp"
#include "regularity/pair_check.hpp"

namespace reg {

struct QuasirandomCertificate {
    int n = 0;
    double avg_degree = 0.0;
    std::uint64_t walk4 = 0;  // closed 4-walks = sum of squared codegrees
    double alpha = 0.0;       // (walk4 - d^4)^+ / n^4
    double lambda = 0.0;      // alpha^{1/4} * n

    // Mixing guarantee for every S, T: |e(S,T) - d|S||T|/n| < lambda sqrt(|S||T|).
    double mixing_bound(std::size_t s, std::size_t t) const {
        return lambda * std::sqrt(static_cast<double>(s) * static_cast<double>(t));
    }
};

// walk4 via codegree sums: trace(A^4) = sum over ordered vertex pairs (u, v)
// of |N(u) ∩ N(v)|^2, with codeg(u, u) = deg(u). Integer-exact.
inline QuasirandomCertificate quasirandom_certificate(const DenseGraph& g) {
    QuasirandomCertificate c;
    const int n = g.n(), words = g.words();
    c.n = n;
    std::uint64_t degsum = 0;
    for (int u = 0; u < n; ++u) degsum += g.degree(u);
    c.avg_degree = static_cast<double>(degsum) / n;

    std::uint64_t w4 = 0;
    for (int u = 0; u < n; ++u) {
        const std::uint64_t* ru = g.row(u);
        std::uint64_t cd = g.degree(u);
        w4 += cd * cd;  // u = v term
        for (int v = u + 1; v < n; ++v) {
            const std::uint64_t* rv = g.row(v);
            std::uint64_t k = 0;
            for (int w = 0; w < words; ++w) k += std::popcount(ru[w] & rv[w]);
            w4 += 2 * k * k;
        }
    }
    c.walk4 = w4;
    double d4 = std::pow(c.avg_degree, 4.0);
    double n4 = std::pow(static_cast<double>(n), 4.0);
    c.alpha = std::max(0.0, (static_cast<double>(w4) - d4)) / n4;
    c.lambda = std::pow(c.alpha, 0.25) * n;
    return c;
}

// Spectral pair certificate: every qualifying sub-pair density sits within
// lambda / (delta * sqrt(|X||Y|)) of the global d/n ratio, so the spread is
// at most twice that. One-sided: true certifies, false is inconclusive.
inline PairVerdict check_pair_spectral(const QuasirandomCertificate& c, std::size_t nx, std::size_t ny,
                                       double eps, double delta) {
    PairVerdict v;
    v.mode = CheckMode::Spectral;
    double denom = delta * std::sqrt(static_cast<double>(nx) * static_cast<double>(ny));
    v.max_spread = denom > 0 ? 2.0 * c.lambda / denom : 2.0;
    v.regular = v.max_spread <= eps;
    return v;
}

}  // namespace reg
