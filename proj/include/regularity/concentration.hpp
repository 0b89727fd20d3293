#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "regularity/graph.hpp"
#include "regularity/lower_bounds.hpp"
#include "regularity/rng.hpp"

namespace reg {

// e^{-2 a^2 / n}
inline double chernoff_tail(double a, std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("chernoff_tail: n < 1");
    if (a < 0) throw std::invalid_argument("chernoff_tail: a < 0");
    return std::exp(-2.0 * a * a / static_cast<double>(n));
}

enum class ThresholdKind { BipartiteF, GnpG, GnpSelfG, GnpH };

struct DiscrepancyThreshold {
    ThresholdKind kind;
    double value = 0.0;  // the closed form; checkers compare against sqrt(value)
};

struct ThresholdInputs {
    double u1 = 0, u2 = 0;  // subset sizes (u for the self variant goes in u1)
    double m = 0, M = 0;    // bipartite universe sizes
    double n = 0;           // G(n, p) vertex count
};

inline DiscrepancyThreshold discrepancy_threshold(ThresholdKind kind, const ThresholdInputs& in) {
    const double e = std::exp(1.0);
    auto chk = [](bool c, const char* msg) {
        if (!c) throw std::invalid_argument(std::string("discrepancy_threshold: ") + msg);
    };
    DiscrepancyThreshold t{kind, 0.0};
    switch (kind) {
        case ThresholdKind::BipartiteF:
            chk(in.u1 > 0 && in.u2 > 0 && in.m > 0 && in.M > 0, "inputs must be positive");
            chk(in.u1 <= in.m && in.u2 <= in.M, "subset exceeds universe");
            t.value = in.u1 * in.u2 * (in.u1 * std::log(e * in.m / in.u1) + in.u2 * std::log(e * in.M / in.u2));
            break;
        case ThresholdKind::GnpG:
            chk(in.u1 > 0 && in.u2 > 0 && in.n > 0, "inputs must be positive");
            chk(in.u1 <= in.u2, "needs u1 <= u2");
            chk(in.u2 <= in.n, "subset exceeds universe");
            t.value = 2.0 * in.u1 * in.u2 * in.u2 * std::log(in.n * e / in.u2);
            break;
        case ThresholdKind::GnpSelfG:
            chk(in.u1 > 0 && in.n > 0, "inputs must be positive");
            chk(in.u1 <= in.n, "subset exceeds universe");
            t.value = 0.5 * in.u1 * in.u1 * in.u1 * std::log(in.n * e / in.u1);
            break;
        case ThresholdKind::GnpH:
            chk(in.u1 > 0 && in.u2 > 0 && in.n > 0, "inputs must be positive");
            chk(in.u1 <= in.u2, "needs u1 <= u2");
            chk(in.u2 <= in.n, "subset exceeds universe");
            t.value = in.u1 * in.u2 * in.u2 * std::log(in.n * e / in.u2);
            break;
    }
    if (!(t.value >= 0.0) || !std::isfinite(t.value))
        throw std::invalid_argument("discrepancy_threshold: log of nonpositive argument");
    return t;
}

struct UniformityReport {
    int samples = 0;
    int disjoint_violations = 0;   // |e(U1,U2) - p u1 u2| > sqrt(g)
    int self_violations = 0;       // |e(U) - p C(u,2)| > sqrt(g(u))
    int overlap_violations = 0;    // |e(U1,U2) - p u1 u2| > 5 sqrt(h)
    double violation_rate() const {
        return samples ? static_cast<double>(disjoint_violations + self_violations + overlap_violations) /
                             (3.0 * samples)
                       : 0.0;
    }
};

// Samples subset (pairs) and asserts the three displayed inequalities.
inline UniformityReport check_uniformity(const DenseGraph& g, double p, int samples, Rng rng) {
    UniformityReport rep;
    rep.samples = samples;
    int n = g.n();
    for (int t = 0; t < samples; ++t) {
        // disjoint pair
        {
            int u2 = 1 + rng.below_int(n - 1);
            int u1 = 1 + rng.below_int(u2);
            if (u1 + u2 <= n) {
                auto both = sample_without_replacement(rng, n, u1 + u2);
                Rng srng = rng.stream("split", t);
                srng.shuffle(both);
                VertexSet a(both.begin(), both.begin() + u1), b(both.begin() + u1, both.end());
                std::sort(a.begin(), a.end());
                std::sort(b.begin(), b.end());
                double ecnt = static_cast<double>(edge_pairs(g, a, b));
                auto th = discrepancy_threshold(ThresholdKind::GnpG,
                                                {.u1 = double(u1), .u2 = double(u2), .n = double(n)});
                if (std::abs(ecnt - p * u1 * u2) > std::sqrt(th.value)) rep.disjoint_violations++;
            }
        }
        // single subset
        {
            int u = 2 + rng.below_int(n - 1);
            auto a = sample_without_replacement(rng, n, u);
            double ecnt = static_cast<double>(edge_pairs(g, a, a)) / 2.0;  // unordered
            auto th = discrepancy_threshold(ThresholdKind::GnpSelfG, {.u1 = double(u), .n = double(n)});
            if (std::abs(ecnt - p * u * (u - 1) / 2.0) > std::sqrt(th.value)) rep.self_violations++;
        }
        // not necessarily disjoint pair
        {
            int u2 = 1 + rng.below_int(n);
            int u1 = 1 + rng.below_int(u2);
            auto a = sample_without_replacement(rng, n, u1);
            auto b = sample_without_replacement(rng, n, u2);
            double ecnt = static_cast<double>(edge_pairs(g, a, b));
            auto th = discrepancy_threshold(ThresholdKind::GnpH,
                                            {.u1 = double(u1), .u2 = double(u2), .n = double(n)});
            if (std::abs(ecnt - p * u1 * u2) > 5.0 * std::sqrt(th.value)) rep.overlap_violations++;
        }
    }
    return rep;
}

struct BalanceReport {
    bool verdict = false;        // qualifying count >= tau * m
    bool hypothesis_ok = false;  // (1/2 - mu)(1 - sigma^2) > tau/2 + 2(1-tau) alpha (1-alpha)
    double sigma = 0.0;          // ||lambda||_2 / ||lambda||_1, recomputed
    int qualifying = 0;
    std::vector<double> a, b;    // per-partition mass on each side
};

// Counts partitions i with min(a_i, b_i) > alpha ||lambda||_1, where
// a_i and b_i are the lambda-masses of the two sides.
inline BalanceReport balance_check(const PartitionFamily& fam, const std::vector<double>& lambda,
                                   double tau, double alpha, double mu) {
    if (static_cast<int>(lambda.size()) != fam.M)
        throw std::invalid_argument("balance_check: lambda size != M");
    double l1 = 0.0, l2 = 0.0;
    for (double x : lambda) {
        if (x < 0) throw std::invalid_argument("balance_check: lambda must be nonnegative");
        l1 += x;
        l2 += x * x;
    }
    if (l1 <= 0) throw std::invalid_argument("balance_check: lambda must not be all zero");
    BalanceReport rep;
    rep.sigma = std::sqrt(l2) / l1;
    rep.hypothesis_ok =
        (0.5 - mu) * (1.0 - rep.sigma * rep.sigma) > tau / 2.0 + 2.0 * (1.0 - tau) * alpha * (1.0 - alpha);
    for (int i = 0; i < fam.m; ++i) {
        double ai = 0.0;
        for (int j = 0; j < fam.M; ++j)
            if (fam.rows[i].test(j)) ai += lambda[j];
        double bi = l1 - ai;
        rep.a.push_back(ai);
        rep.b.push_back(bi);
        if (std::min(ai, bi) > alpha * l1) rep.qualifying++;
    }
    rep.verdict = rep.qualifying >= tau * fam.m;
    return rep;
}

}  // namespace reg
