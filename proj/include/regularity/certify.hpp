#pragma once

#include <future>
#include <thread>
#include <vector>

#include "regularity/cut_norm.hpp"
#include "regularity/pair_check.hpp"
#include "regularity/partition.hpp"

namespace reg {

struct IrregularPairsReport {
    int irregular_ordered_pairs = 0;   // sampled mode: a lower bound
    int pairs_checked = 0;
    CheckMode mode = CheckMode::Exhaustive;
    std::vector<std::pair<int, int>> irregular;  // ordered (i, j) indices
};

// Ordered block pairs (i != j) whose verdict is irregular. Work is split
// over threads into fixed slots so the result is independent of scheduling.
inline IrregularPairsReport count_irregular_pairs(const DenseGraph& g, const VertexPartition& p,
                                                  double eps, double delta, CheckMode mode,
                                                  Rng rng = Rng(0), int trials = 256, int threads = 1,
                                                  int cap = 18) {
    int k = p.size();
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j) pairs.emplace_back(i, j);

    std::vector<char> bad(pairs.size(), 0);
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t t = lo; t < hi; ++t) {
            auto [i, j] = pairs[t];
            PairVerdict v;
            if (mode == CheckMode::Exhaustive)
                v = check_pair_exhaustive(g, p.block(i), p.block(j), eps, delta, cap);
            else
                v = check_pair_sampled(g, p.block(i), p.block(j), eps, delta, trials,
                                       rng.stream("pair", static_cast<std::uint64_t>(i) * k + j));
            bad[t] = v.regular ? 0 : 1;
        }
    };

    if (threads <= 1 || pairs.size() < 2) {
        work(0, pairs.size());
    } else {
        int tn = std::min<int>(threads, static_cast<int>(pairs.size()));
        std::vector<std::future<void>> fs;
        std::size_t chunk = (pairs.size() + tn - 1) / tn;
        for (int t = 0; t < tn; ++t) {
            std::size_t lo = t * chunk, hi = std::min(pairs.size(), lo + chunk);
            if (lo >= hi) break;
            fs.push_back(std::async(std::launch::async, work, lo, hi));
        }
        for (auto& f : fs) f.get();
    }

    IrregularPairsReport rep;
    rep.mode = mode;
    rep.pairs_checked = static_cast<int>(pairs.size());
    for (std::size_t t = 0; t < pairs.size(); ++t)
        if (bad[t]) {
            rep.irregular_ordered_pairs++;
            rep.irregular.push_back(pairs[t]);
        }
    return rep;
}

}  // namespace reg
