#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "regularity/graph.hpp"

namespace reg {

// Number of h-tuples (v_1..v_h) in W_1 × ... × W_h, all distinct, inducing
// exactly H under i -> v_i. Brute-force h-fold loop, h <= 8.
inline std::uint64_t count_induced(const DenseGraph& g, const DenseGraph& h,
                                   const std::vector<VertexSet>& w) {
    const int hh = h.n();
    if (static_cast<std::size_t>(hh) != w.size())
        throw std::invalid_argument("count_induced: |V(H)| != |W|");
    if (hh > 8) throw std::invalid_argument("count_induced: h > 8");

    std::vector<int> pick(hh, -1);
    std::uint64_t count = 0;
    // iterative nested loop
    std::vector<std::size_t> idx(hh, 0);
    int level = 0;
    while (level >= 0) {
        if (idx[level] >= w[level].size()) {
            idx[level] = 0;
            --level;
            if (level >= 0) ++idx[level];
            continue;
        }
        int v = w[level][idx[level]];
        bool ok = true;
        for (int j = 0; j < level && ok; ++j) {
            if (pick[j] == v) ok = false;
            else if (g.has_edge(pick[j], v) != h.has_edge(j, level)) ok = false;
        }
        if (!ok) {
            ++idx[level];
            continue;
        }
        pick[level] = v;
        if (level == hh - 1) {
            ++count;
            ++idx[level];
        } else {
            ++level;
        }
    }
    return count;
}

struct CountingThreshold {
    double value = 0.0;       // (eta/4)^C(h,2) * prod |W_i|
    bool gamma_ok = false;    // gamma <= eta^h / (4h)
    bool sizes_ok = false;    // every |W_i| >= 1/gamma
    double gamma_required = 0.0;
};

inline double counting_lemma_threshold(double eta, int h, const std::vector<std::size_t>& sizes) {
    if (h < 2) throw std::invalid_argument("counting_lemma_threshold: h < 2");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("counting_lemma_threshold: eta outside (0,1)");
    double c2 = static_cast<double>(h) * (h - 1) / 2.0;
    double v = std::pow(eta / 4.0, c2);
    for (std::size_t s : sizes) v *= static_cast<double>(s);
    return v;
}

// Companion predicate: the hypotheses under which the threshold is a valid
// lower bound on the induced-copy count.
inline CountingThreshold counting_lemma_check(double eta, int h, double gamma,
                                              const std::vector<std::size_t>& sizes) {
    CountingThreshold t;
    t.value = counting_lemma_threshold(eta, h, sizes);
    t.gamma_required = std::pow(eta, h) / (4.0 * h);
    t.gamma_ok = gamma <= t.gamma_required + 1e-15;
    t.sizes_ok = true;
    for (std::size_t s : sizes)
        if (static_cast<double>(s) < 1.0 / gamma) t.sizes_ok = false;
    return t;
}

}  // namespace reg
