#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "regularity/certify.hpp"
#include "regularity/cut_norm.hpp"
#include "regularity/graph.hpp"
#include "regularity/partition.hpp"

namespace reg {

enum class WitnessMode { Exact, Heuristic, Auto };

struct WeakRegResult {
    VertexPartition partition{1, {{0}}};
    int rounds = 0;
    std::vector<std::pair<int, double>> defect_history;  // (round, witness value)
    bool certified = false;
};

namespace detail {

// Certification margin: refinements of a partition certified at this
// threshold stay within 2 eps n^2 under the diagonal-zeroed convention.
inline double weak_margin(const DenseGraph& g, const VertexPartition& p) {
    auto dens = block_densities(g, p);
    double dp = 0.0;
    for (int i = 0; i < p.size(); ++i) dp += p.block(i).size() * dens[i][i];
    return dp + g.n() / 2.0;
}

struct WitnessSearch {
    double value = 0.0;
    VertexSet a, b;
};

inline WitnessSearch find_weak_witness(const DenseGraph& g, const VertexPartition& p, WitnessMode mode,
                                       Rng rng) {
    Matrix d = defect_matrix(g, p);
    bool exact = mode == WitnessMode::Exact || (mode == WitnessMode::Auto && g.n() <= 24);
    CutNormResult r = exact ? cut_norm_exact(d) : cut_norm_heuristic(d, rng);
    WitnessSearch w;
    w.value = r.value;
    w.a = r.argA;
    w.b = r.argB;
    return w;
}

// Four-way split of every block by the witness pair; empty cells dropped.
inline VertexPartition split_by_witness(const VertexPartition& p, const VertexSet& a,
                                        const VertexSet& b, int n) {
    std::vector<char> in_a(n, 0), in_b(n, 0);
    for (int v : a) in_a[v] = 1;
    for (int v : b) in_b[v] = 1;
    std::vector<VertexSet> blocks;
    for (const auto& blk : p.blocks()) {
        VertexSet cell[4];
        for (int v : blk) cell[in_a[v] * 2 + in_b[v]].push_back(v);
        for (auto& c : cell)
            if (!c.empty()) blocks.push_back(std::move(c));
    }
    return VertexPartition(n, std::move(blocks));
}

}  // namespace detail

// Frieze-Kannan scheme: refine by the maximizing cut-norm witness of the
// defect matrix, rebalance equitably, stop when no witness exceeds the
// certification threshold. Exact mode (n <= 24) certifies the output.
inline WeakRegResult fk_partition(const DenseGraph& g, double eps, WitnessMode mode, Rng rng,
                                  int start_blocks = 1) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("fk_partition: eps outside (0,1)");
    bool exact = mode == WitnessMode::Exact || (mode == WitnessMode::Auto && g.n() <= 24);
    if (mode == WitnessMode::Exact && g.n() > 24)
        throw std::invalid_argument("fk_partition: exact mode needs n <= 24");

    const int n = g.n();
    const double n2 = static_cast<double>(n) * n;
    int max_rounds = static_cast<int>(std::ceil(2.0 / (eps * eps))) + 1;

    WeakRegResult res;
    res.partition = equitable_rebalance(g, VertexPartition::trivial(n), std::min(n, std::max(1, start_blocks)));

    while (true) {
        double threshold = std::max(0.0, eps * n2 - detail::weak_margin(g, res.partition));
        auto w = detail::find_weak_witness(g, res.partition, mode, rng.stream("witness", res.rounds));
        if (w.value <= threshold + 1e-9 || w.value <= 1e-9) {
            res.certified = exact;
            return res;
        }
        if (res.rounds >= max_rounds || res.partition.size() == n) {
            // cap reached: fall back to singletons, which have zero defect
            res.partition = VertexPartition::singletons(n);
            res.defect_history.emplace_back(res.rounds, 0.0);
            res.rounds++;
            res.certified = exact;
            return res;
        }
        res.defect_history.emplace_back(res.rounds, w.value);
        auto split = detail::split_by_witness(res.partition, w.a, w.b, n);
        int k = split.size();
        int target = std::min<double>(n, std::ceil(16.0 * k / (eps * eps)));
        target = std::max(target, k);
        res.partition = equitable_rebalance(g, split, target);
        res.rounds++;
    }
}

// Refinement variant: the output refines `base` exactly; rebalancing happens
// within base blocks, preserving global equitability of an equitable base.
inline WeakRegResult fk_refine(const DenseGraph& g, const VertexPartition& base, double eps,
                               WitnessMode mode, Rng rng) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("fk_refine: eps outside (0,1)");
    bool exact = mode == WitnessMode::Exact || (mode == WitnessMode::Auto && g.n() <= 24);
    const int n = g.n();
    const double n2 = static_cast<double>(n) * n;
    int max_rounds = static_cast<int>(std::ceil(2.0 / (eps * eps))) + 1;

    WeakRegResult res;
    res.partition = base;

    while (true) {
        double threshold = std::max(0.0, eps * n2 - detail::weak_margin(g, res.partition));
        auto w = detail::find_weak_witness(g, res.partition, mode, rng.stream("witness", res.rounds));
        if (w.value <= threshold + 1e-9 || w.value <= 1e-9) {
            res.certified = exact;
            return res;
        }
        if (res.rounds >= max_rounds || res.partition.size() == n) {
            std::vector<VertexSet> singles;
            for (int v = 0; v < n; ++v) singles.push_back({v});
            res.partition = VertexPartition(n, std::move(singles));
            res.defect_history.emplace_back(res.rounds, 0.0);
            res.rounds++;
            res.certified = exact;
            return res;
        }
        res.defect_history.emplace_back(res.rounds, w.value);
        auto split = detail::split_by_witness(res.partition, w.a, w.b, n);
        int k = split.size();
        int target = std::min<double>(n, std::ceil(16.0 * k / (eps * eps)));
        int kappa = (target + base.size() - 1) / base.size();
        res.partition = equitable_refine_within(base, split, std::max(1, kappa));
        // ensure progress: the rebalance must not collapse below the split
        if (res.partition.size() < split.size()) res.partition = split;
        res.rounds++;
    }
}

struct TaoResult {
    VertexPartition p{1, {{0}}};  // coarse, weak eps-regular
    VertexPartition q{1, {{0}}};  // fine refinement, weak delta(|p|)-regular
    int t = 0;
    double energy_gap = 0.0;  // q(Q) - q(P)
    int outer_rounds = 0;
    double delta_used = 0.0;
    bool certified = false;  // both weak certificates exact
};

// Iterate: refine P at precision min(delta(|P|), eps); stop when the
// refinement gains no more than eps of mean square density.
inline TaoResult tao_partition(const DenseGraph& g, double eps, int s,
                               const std::function<double(int)>& delta_fn, WitnessMode mode, Rng rng) {
    if (s < 1) throw std::invalid_argument("tao_partition: s < 1");
    TaoResult res;
    auto first = fk_partition(g, eps, mode, rng.stream("base"), std::min(s, g.n()));
    res.p = first.partition;
    bool cert = first.certified;

    int max_outer = static_cast<int>(std::ceil(1.0 / eps)) + 1;
    for (int j = 0; j < max_outer; ++j) {
        res.outer_rounds = j + 1;
        res.t = res.p.size();
        res.delta_used = std::min(delta_fn(res.t), eps);
        if (!(res.delta_used > 0.0)) throw std::invalid_argument("tao_partition: delta(t) must be positive");
        auto fine = fk_refine(g, res.p, res.delta_used, mode, rng.stream("refine", j));
        res.q = fine.partition;
        res.energy_gap = mean_square_density(g, res.q) - mean_square_density(g, res.p);
        if (res.energy_gap <= eps || j == max_outer - 1) {
            res.certified = cert && fine.certified;
            return res;
        }
        res.p = res.q;
        cert = fine.certified;  // weak delta <= eps regular, so weak eps-regular
    }
    return res;
}

struct RegularityParams {
    double eps = 0.0, delta = 0.0, eta = 0.0;
    void validate() const {
        if (!(eps > 0 && eps < 1 && delta > 0 && delta < 1 && eta > 0 && eta < 1))
            throw std::invalid_argument("RegularityParams: all of eps, delta, eta must lie in (0,1)");
    }
};

struct SzemerediResult {
    VertexPartition partition{1, {{0}}};
    IrregularPairsReport report;
    TaoResult tao;
    double eta_budget = 0.0;  // eta * k^2 in ordered pairs
};

// Tao iteration with a precision schedule aimed at pair regularity, then an
// irregular-pair count of the fine partition at (eps, delta).
inline SzemerediResult szemeredi_partition(const DenseGraph& g, const RegularityParams& params,
                                           WitnessMode mode, Rng rng, int threads = 1, int cap = 18) {
    params.validate();
    double eps_tao = params.eta / 2.0;
    double floor = params.eps * params.delta * params.delta / 8.0;
    auto delta_fn = [&](int t) { return std::min(eps_tao, floor / (static_cast<double>(t) * t)); };

    SzemerediResult res;
    res.tao = tao_partition(g, eps_tao, 1, delta_fn, mode, rng.stream("tao"));
    res.partition = res.tao.q;
    bool exhaustive_ok = true;
    for (const auto& b : res.partition.blocks())
        if (static_cast<int>(b.size()) > cap) exhaustive_ok = false;
    res.report = count_irregular_pairs(g, res.partition, params.eps, params.delta,
                                       exhaustive_ok ? CheckMode::Exhaustive : CheckMode::Sampled,
                                       rng.stream("count"), 256, threads, cap);
    res.eta_budget = params.eta * static_cast<double>(res.partition.size()) * res.partition.size();
    return res;
}

}  // namespace reg
