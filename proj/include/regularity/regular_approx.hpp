#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regularity/graph.hpp"
#include "regularity/partition.hpp"
#include "regularity/rng.hpp"
#include "regularity/weak_regularity.hpp"

namespace reg {

struct EditSet {
    std::vector<std::pair<int, int>> additions, deletions;  // u < v
    std::vector<std::string> add_tags, del_tags;            // per-edit provenance

    std::size_t count() const { return additions.size() + deletions.size(); }

    void add(int u, int v, const std::string& tag) {
        if (u > v) std::swap(u, v);
        additions.emplace_back(u, v);
        add_tags.push_back(tag);
    }
    void del(int u, int v, const std::string& tag) {
        if (u > v) std::swap(u, v);
        deletions.emplace_back(u, v);
        del_tags.push_back(tag);
    }

    void merge(const EditSet& o) {
        additions.insert(additions.end(), o.additions.begin(), o.additions.end());
        deletions.insert(deletions.end(), o.deletions.begin(), o.deletions.end());
        add_tags.insert(add_tags.end(), o.add_tags.begin(), o.add_tags.end());
        del_tags.insert(del_tags.end(), o.del_tags.begin(), o.del_tags.end());
    }

    void sort_edits() {
        // stable pairwise sort keeping tags aligned
        auto reorder = [](std::vector<std::pair<int, int>>& es, std::vector<std::string>& tags) {
            std::vector<std::size_t> idx(es.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return es[a] < es[b]; });
            std::vector<std::pair<int, int>> es2;
            std::vector<std::string> tg2;
            for (auto i : idx) {
                es2.push_back(es[i]);
                tg2.push_back(tags[i]);
            }
            es = std::move(es2);
            tags = std::move(tg2);
        };
        reorder(additions, add_tags);
        reorder(deletions, del_tags);
    }

    // Validates the invariants against g and returns the edited graph.
    DenseGraph apply(const DenseGraph& g) const {
        DenseGraph out = g;
        for (auto [u, v] : additions) {
            if (g.has_edge(u, v)) throw std::invalid_argument("EditSet: addition of existing edge");
            out.add_edge(u, v);
        }
        for (auto [u, v] : deletions) {
            if (!g.has_edge(u, v)) throw std::invalid_argument("EditSet: deletion of missing edge");
            out.remove_edge(u, v);
        }
        return out;
    }
};

struct GFunction {
    std::function<double(int)> eval;
    std::string description;

    static GFunction constant(double c) {
        return GFunction{[c](int) { return c; }, "g(t) = " + std::to_string(c)};
    }
};

struct RegularizePairOptions {
    int max_attempts = 64;
    int discrepancy_samples = 4096;
    bool enforce_size = false;  // the |B| > 8 delta^{-2} floor; advisory by default
};

struct RegularizeResult {
    bool ok = false;
    EditSet edits;
    double original_density = 0.0;
    double achieved_density = 0.0;
    double edit_bound = 0.0;  // (delta + sqrt(dq)) |A| |B|
    int attempts = 0;
    int fail_density = 0, fail_edits = 0, fail_discrepancy = 0;
};

// Per sub-pair (A_i, B_j) with surplus a = d(A_i,B_j) - d(A,B): delete edges
// with probability a / d(A_i,B_j) when a >= 0, else add non-edges with
// probability -a / (1 - d(A_i,B_j)). Fresh randomness per attempt until the
// three success events hold: density within ±delta, the edit budget, and no
// sampled subset discrepancy above 2 delta |A||B|.
inline RegularizeResult regularize_pair(const DenseGraph& g, const VertexSet& A, const VertexSet& B,
                                        const std::vector<VertexSet>& PA,
                                        const std::vector<VertexSet>& PB, double delta, Rng rng,
                                        const RegularizePairOptions& opts = {},
                                        const std::string& tag = "pair") {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("regularize_pair: delta outside (0,1)");
    RegularizeResult res;
    if (opts.enforce_size && !(static_cast<double>(std::min(A.size(), B.size())) > 8.0 / (delta * delta)))
        throw std::invalid_argument("regularize_pair: |B| <= 8 delta^-2");

    const double ab = static_cast<double>(A.size()) * static_cast<double>(B.size());
    const double eta = density(g, A, B);
    res.original_density = eta;

    // mean square density across the sub-partitions, and the edit budget
    double q_pair = eta * eta, q_sub = 0.0;
    std::vector<std::vector<double>> dij(PA.size(), std::vector<double>(PB.size()));
    for (std::size_t i = 0; i < PA.size(); ++i)
        for (std::size_t j = 0; j < PB.size(); ++j) {
            dij[i][j] = density(g, PA[i], PB[j]);
            q_sub += dij[i][j] * dij[i][j] * (PA[i].size() * static_cast<double>(PB[j].size())) / ab;
        }
    double dq = std::max(0.0, q_sub - q_pair);
    res.edit_bound = (delta + std::sqrt(dq)) * ab;

    for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
        res.attempts = attempt + 1;
        Rng arng = rng.stream("attempt", attempt);
        EditSet es;
        for (std::size_t i = 0; i < PA.size(); ++i)
            for (std::size_t j = 0; j < PB.size(); ++j) {
                double a = dij[i][j] - eta;
                if (a >= 0.0) {
                    if (dij[i][j] <= 0.0) continue;  // a = 0 with no edges to delete
                    double pr = a / dij[i][j];
                    for (int u : PA[i])
                        for (int v : PB[j])
                            if (g.has_edge(u, v) && arng.bernoulli(pr)) es.del(u, v, tag);
                } else {
                    double pr = -a / (1.0 - dij[i][j]);
                    for (int u : PA[i])
                        for (int v : PB[j])
                            if (u != v && !g.has_edge(u, v) && arng.bernoulli(pr)) es.add(u, v, tag);
                }
            }

        DenseGraph edited = es.apply(g);
        double d_new = density(edited, A, B);
        bool density_ok = std::abs(d_new - eta) <= delta;
        bool edits_ok = static_cast<double>(es.count()) <= res.edit_bound + 1e-9;
        bool disc_ok = true;
        if (density_ok && edits_ok) {
            Rng srng = arng.stream("disc");
            for (int t = 0; t < opts.discrepancy_samples; ++t) {
                VertexSet sa, sb;
                for (int u : A)
                    if (srng.next() & 1) sa.push_back(u);
                for (int v : B)
                    if (srng.next() & 1) sb.push_back(v);
                if (sa.empty() || sb.empty()) continue;
                double e = static_cast<double>(edge_pairs(edited, sa, sb));
                if (std::abs(e - eta * sa.size() * sb.size()) > 2.0 * delta * ab) {
                    disc_ok = false;
                    break;
                }
            }
        }
        if (density_ok && edits_ok && disc_ok) {
            es.sort_edits();
            res.ok = true;
            res.edits = std::move(es);
            res.achieved_density = d_new;
            return res;
        }
        if (!density_ok) res.fail_density++;
        if (!edits_ok) res.fail_edits++;
        if (density_ok && edits_ok && !disc_ok) res.fail_discrepancy++;
    }
    res.ok = false;
    return res;
}

struct RegularApproxResult {
    bool ok = false;
    bool degenerate_scale = false;  // singleton escape: n below the pair-size floor
    EditSet edits;
    VertexPartition partition{1, {{0}}};
    TaoResult tao;
    double edit_budget = 0.0;  // (delta(t) + eps0^{1/2}) n^2
    std::string failed_pair;
    double delta_t = 0.0;
};

// Tao partition at eps0 = (eps/2)^2 with delta(t) = min(g(t)^3 / (32 t^2),
// eps/2), then pair-by-pair randomized regularization using the Q-induced
// sub-partitions. Total edits stay below (delta(t) + eps0^{1/2}) n^2 <= eps n^2.
inline RegularApproxResult regular_approximation(const DenseGraph& g, double eps, int s,
                                                 const GFunction& gfn, Rng rng,
                                                 WitnessMode mode = WitnessMode::Auto, int threads = 1) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("regular_approximation: eps outside (0,1)");
    if (s < 1) throw std::invalid_argument("regular_approximation: s < 1");
    const int n = g.n();
    const double eps0 = (eps / 2.0) * (eps / 2.0);
    auto delta_fn = [&](int t) {
        double gt = gfn.eval(t);
        return std::min(gt * gt * gt / (32.0 * t * t), eps / 2.0);
    };

    RegularApproxResult res;
    // scale escape: when even the coarsest pairs are below the size floor the
    // partition into singletons is g-regular with zero edits
    double ds = delta_fn(s);
    if (static_cast<double>(n) / (2.0 * std::max(1, s)) <= 8.0 / (ds * ds)) {
        res.ok = true;
        res.degenerate_scale = true;
        res.partition = VertexPartition::singletons(n);
        res.delta_t = ds;
        res.edit_budget = (ds + std::sqrt(eps0)) * static_cast<double>(n) * n;
        return res;
    }

    res.tao = tao_partition(g, eps0, s, delta_fn, mode, rng.stream("tao"));
    const VertexPartition& p = res.tao.p;
    const VertexPartition& q = res.tao.q;
    int t = p.size();
    res.delta_t = delta_fn(t);
    res.partition = p;
    res.edit_budget = (res.delta_t + std::sqrt(eps0)) * static_cast<double>(n) * n;

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < t; ++i)
        for (int j = i + 1; j < t; ++j) pairs.emplace_back(i, j);

    std::vector<RegularizeResult> results(pairs.size());
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            auto [i, j] = pairs[idx];
            std::vector<VertexSet> pa, pb;
            std::map<int, VertexSet> ga, gb;
            for (int v : p.block(i)) ga[q.block_of(v)].push_back(v);
            for (int v : p.block(j)) gb[q.block_of(v)].push_back(v);
            for (auto& [k, cell] : ga) pa.push_back(cell);
            for (auto& [k, cell] : gb) pb.push_back(cell);
            std::string tag = "pair-" + std::to_string(i) + "-" + std::to_string(j);
            results[idx] = regularize_pair(g, p.block(i), p.block(j), pa, pb, res.delta_t,
                                           rng.stream("pair", static_cast<std::uint64_t>(i) * t + j), {},
                                           tag);
        }
    };
    if (threads <= 1 || pairs.size() < 2) {
        work(0, pairs.size());
    } else {
        int tn = std::min<int>(threads, static_cast<int>(pairs.size()));
        std::vector<std::future<void>> fs;
        std::size_t chunk = (pairs.size() + tn - 1) / tn;
        for (int w = 0; w < tn; ++w) {
            std::size_t lo = w * chunk, hi = std::min(pairs.size(), lo + chunk);
            if (lo >= hi) break;
            fs.push_back(std::async(std::launch::async, work, lo, hi));
        }
        for (auto& f : fs) f.get();
    }

    for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
        if (!results[idx].ok) {
            res.ok = false;
            res.failed_pair =
                "pair-" + std::to_string(pairs[idx].first) + "-" + std::to_string(pairs[idx].second);
            return res;
        }
        res.edits.merge(results[idx].edits);
    }
    res.edits.sort_edits();
    res.ok = true;
    return res;
}

}  // namespace reg
