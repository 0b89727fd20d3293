#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "regularity/graph.hpp"

namespace reg {

// Ordered list of disjoint nonempty vertex blocks covering 0..n-1.
class VertexPartition {
public:
    VertexPartition(int n, std::vector<VertexSet> blocks) : n_(n), blocks_(std::move(blocks)) {
        block_of_.assign(n_, -1);
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            if (blocks_[b].empty()) throw std::invalid_argument("VertexPartition: empty block");
            std::sort(blocks_[b].begin(), blocks_[b].end());
            for (int v : blocks_[b]) {
                if (v < 0 || v >= n_ || block_of_[v] != -1)
                    throw std::invalid_argument("VertexPartition: blocks must partition V");
                block_of_[v] = static_cast<int>(b);
            }
        }
        for (int v = 0; v < n_; ++v)
            if (block_of_[v] == -1) throw std::invalid_argument("VertexPartition: uncovered vertex");
    }

    static VertexPartition trivial(int n) { return VertexPartition(n, {all_vertices(n)}); }

    static VertexPartition singletons(int n) {
        std::vector<VertexSet> b(n);
        for (int i = 0; i < n; ++i) b[i] = {i};
        return VertexPartition(n, std::move(b));
    }

    // k blocks of consecutive vertex ids, sizes differing by at most one.
    static VertexPartition intervals(int n, int k) {
        if (k < 1 || k > n) throw std::invalid_argument("intervals: need 1 <= k <= n");
        std::vector<VertexSet> b(k);
        int base = n / k, extra = n % k, v = 0;
        for (int i = 0; i < k; ++i) {
            int sz = base + (i < extra ? 1 : 0);
            for (int j = 0; j < sz; ++j) b[i].push_back(v++);
        }
        return VertexPartition(n, std::move(b));
    }

    int n() const { return n_; }
    int size() const { return static_cast<int>(blocks_.size()); }
    const std::vector<VertexSet>& blocks() const { return blocks_; }
    const VertexSet& block(int i) const { return blocks_[i]; }
    int block_of(int v) const { return block_of_[v]; }

    bool equitable() const {
        std::size_t mn = blocks_[0].size(), mx = mn;
        for (const auto& b : blocks_) {
            mn = std::min(mn, b.size());
            mx = std::max(mx, b.size());
        }
        return mx - mn <= 1;
    }

    bool refines(const VertexPartition& coarse) const {
        if (coarse.n() != n_) return false;
        for (const auto& b : blocks_) {
            int c = coarse.block_of(b[0]);
            for (int v : b)
                if (coarse.block_of(v) != c) return false;
        }
        return true;
    }

    bool same_blocks(const VertexPartition& o) const {
        if (o.n() != n_ || o.size() != size()) return false;
        auto a = blocks_, b = o.blocks_;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        return a == b;
    }

    // Blocks reordered by smallest member; the canonical order for output.
    VertexPartition canonical() const {
        auto b = blocks_;
        std::sort(b.begin(), b.end(),
                  [](const VertexSet& x, const VertexSet& y) { return x[0] < y[0]; });
        return VertexPartition(n_, std::move(b));
    }

private:
    int n_;
    std::vector<VertexSet> blocks_;
    std::vector<int> block_of_;
};

// All pairwise block densities; diag entries use the ordered non-loop count.
inline std::vector<std::vector<double>> block_densities(const DenseGraph& g, const VertexPartition& p) {
    int k = p.size();
    std::vector<Bitmask> masks;
    masks.reserve(k);
    for (int i = 0; i < k; ++i) masks.push_back(Bitmask::of(g.n(), p.block(i)));
    std::vector<std::vector<std::uint64_t>> e(k, std::vector<std::uint64_t>(k, 0));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) e[i][j] = g.edges_into_mask(p.block(i), masks[j]);
    std::vector<std::vector<double>> d(k, std::vector<double>(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            d[i][j] = static_cast<double>(e[i][j]) /
                      (static_cast<double>(p.block(i).size()) * static_cast<double>(p.block(j).size()));
    return d;
}

// q(P) = sum over ordered block pairs (including i = j) of d^2 * p_i * p_j.
inline double mean_square_density(const DenseGraph& g, const VertexPartition& p) {
    auto d = block_densities(g, p);
    int k = p.size();
    double n = g.n(), q = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            q += d[i][j] * d[i][j] * (p.block(i).size() / n) * (p.block(j).size() / n);
    return q;
}

// Nonempty intersections P_i ∩ Q_j ordered lexicographically by (i, j).
inline VertexPartition common_refinement(const VertexPartition& p, const VertexPartition& q) {
    if (p.n() != q.n()) throw std::invalid_argument("common_refinement: mismatched vertex sets");
    std::map<std::pair<int, int>, VertexSet> cells;
    for (int v = 0; v < p.n(); ++v) cells[{p.block_of(v), q.block_of(v)}].push_back(v);
    std::vector<VertexSet> blocks;
    blocks.reserve(cells.size());
    for (auto& [key, cell] : cells) blocks.push_back(std::move(cell));
    return VertexPartition(p.n(), std::move(blocks));
}

// Equitable partition into exactly t blocks with q(P') >= q(P) - 2k/t.
// Each input block is chopped into full-size pieces; the per-block
// leftovers (fewer than n/t vertices each) are pooled and dealt
// round-robin to the unfinished pieces in index order.
inline VertexPartition equitable_rebalance(const DenseGraph& g, const VertexPartition& p, int t) {
    (void)g;  // the bound is structural; the graph does not steer the construction
    int n = p.n();
    if (t < p.size()) throw std::invalid_argument("equitable_rebalance: t < |P|");
    if (t > n) throw std::invalid_argument("equitable_rebalance: t > n");
    int small = n / t, big_count = n % t;  // big pieces have size small+1
    int need_big = big_count, need_small = t - big_count;

    std::vector<VertexSet> pieces;
    pieces.reserve(t);
    VertexSet pool;
    for (const auto& blk : p.blocks()) {
        std::size_t pos = 0;
        while (true) {
            std::size_t rem = blk.size() - pos;
            int take = 0;
            if (need_big > 0 && rem >= static_cast<std::size_t>(small + 1))
                take = small + 1, --need_big;
            else if (need_small > 0 && small > 0 && rem >= static_cast<std::size_t>(small))
                take = small, --need_small;
            else
                break;
            pieces.emplace_back(blk.begin() + pos, blk.begin() + pos + take);
            pos += take;
        }
        pool.insert(pool.end(), blk.begin() + pos, blk.end());
    }
    std::sort(pool.begin(), pool.end());

    // Remaining quota pieces are built from the pool.
    std::vector<int> sizes;
    for (int i = 0; i < need_big; ++i) sizes.push_back(small + 1);
    for (int i = 0; i < need_small; ++i) sizes.push_back(small);
    std::size_t at = 0;
    for (int sz : sizes) {
        pieces.emplace_back(pool.begin() + at, pool.begin() + at + sz);
        at += sz;
    }
    if (at != pool.size()) throw std::logic_error("equitable_rebalance: quota mismatch");
    return VertexPartition(n, std::move(pieces));
}

// Within-block rebalance: every block of `coarse` is split into exactly
// `pieces_per_block` near-equal pieces (leftovers pooled per block), so the
// result refines `coarse` and is globally equitable when `coarse` is.
inline VertexPartition equitable_refine_within(const VertexPartition& coarse,
                                               const VertexPartition& fine,
                                               int pieces_per_block) {
    if (!fine.refines(coarse)) throw std::invalid_argument("equitable_refine_within: not a refinement");
    std::vector<VertexSet> out;
    for (int ci = 0; ci < coarse.size(); ++ci) {
        const VertexSet& blk = coarse.block(ci);
        int kappa = std::min<int>(pieces_per_block, static_cast<int>(blk.size()));
        int small = static_cast<int>(blk.size()) / kappa;
        int bigs = static_cast<int>(blk.size()) % kappa;

        // Chop each fine cell inside this block; pool per-block leftovers.
        std::map<int, VertexSet> by_fine;
        for (int v : blk) by_fine[fine.block_of(v)].push_back(v);
        std::vector<VertexSet> pieces;
        VertexSet pool;
        int need_big = bigs, need_small = kappa - bigs;
        for (auto& [fi, cell] : by_fine) {
            std::size_t pos = 0;
            while (true) {
                std::size_t rem = cell.size() - pos;
                int take = 0;
                if (need_big > 0 && rem >= static_cast<std::size_t>(small + 1))
                    take = small + 1, --need_big;
                else if (need_small > 0 && small > 0 && rem >= static_cast<std::size_t>(small))
                    take = small, --need_small;
                else
                    break;
                pieces.emplace_back(cell.begin() + pos, cell.begin() + pos + take);
                pos += take;
            }
            pool.insert(pool.end(), cell.begin() + pos, cell.end());
        }
        std::sort(pool.begin(), pool.end());
        std::size_t at = 0;
        std::vector<int> sizes;
        for (int i = 0; i < need_big; ++i) sizes.push_back(small + 1);
        for (int i = 0; i < need_small; ++i) sizes.push_back(small);
        for (int sz : sizes) {
            pieces.emplace_back(pool.begin() + at, pool.begin() + at + sz);
            at += sz;
        }
        if (at != pool.size()) throw std::logic_error("equitable_refine_within: quota mismatch");
        for (auto& pc : pieces) out.push_back(std::move(pc));
    }
    return VertexPartition(coarse.n(), std::move(out));
}

struct RefinementReport {
    double beta = 0.0;
    double upsilon = 0.0;   // smallest v making Z a (beta, v)-refinement
    int contained_count = 0;
    bool verdict = false;   // contained_count >= (1 - upsilon) * |blocks|
};

// For each block Z_j: is some P-block covering >= (1-beta)|Z_j| of it?
inline RefinementReport refinement_distance(const VertexPartition& z, const VertexPartition& p,
                                            double beta) {
    if (z.n() != p.n()) throw std::invalid_argument("refinement_distance: mismatched vertex sets");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("refinement_distance: beta outside (0,1)");
    RefinementReport rep;
    rep.beta = beta;
    for (const auto& blk : z.blocks()) {
        std::map<int, int> overlap;
        for (int v : blk) overlap[p.block_of(v)]++;
        int best = 0;
        for (auto& [i, c] : overlap) best = std::max(best, c);
        if (static_cast<double>(best) >= (1.0 - beta) * static_cast<double>(blk.size()))
            rep.contained_count++;
    }
    rep.upsilon = 1.0 - static_cast<double>(rep.contained_count) / static_cast<double>(z.size());
    rep.verdict =
        static_cast<double>(rep.contained_count) >= (1.0 - rep.upsilon) * static_cast<double>(z.size());
    return rep;
}

struct ClosenessReport {
    bool close = false;
    int bad_coarse_pairs = 0;  // pairs (i, i') exceeding the eps*l^2 budget
    int coarse_pairs = 0;
};

// B must refine A with the same number of sub-blocks per A-block. Checks:
// all but <= eps*k^2 pairs (i, i') have all but <= eps*l^2 pairs (j, j')
// with |d(V_i, V_i') - d(V_ij, V_i'j')| < eps.
inline ClosenessReport partition_closeness(const DenseGraph& g, const VertexPartition& a,
                                           const VertexPartition& b, double eps) {
    if (!b.refines(a)) throw std::invalid_argument("partition_closeness: B does not refine A");
    int k = a.size();
    std::vector<std::vector<int>> sub(k);  // indices of B-blocks inside each A-block
    for (int j = 0; j < b.size(); ++j) sub[a.block_of(b.block(j)[0])].push_back(j);
    std::size_t l = sub[0].size();
    for (const auto& s : sub)
        if (s.size() != l) throw std::invalid_argument("partition_closeness: uneven sub-block counts");

    auto da = block_densities(g, a);
    auto db = block_densities(g, b);
    ClosenessReport rep;
    for (int i = 0; i < k; ++i)
        for (int i2 = i; i2 < k; ++i2) {
            rep.coarse_pairs++;
            int bad = 0;
            for (int x : sub[i])
                for (int y : sub[i2])
                    if (!(std::abs(da[i][i2] - db[x][y]) < eps)) ++bad;
            if (bad > eps * static_cast<double>(l) * static_cast<double>(l)) rep.bad_coarse_pairs++;
        }
    rep.close = rep.bad_coarse_pairs <= eps * static_cast<double>(k) * static_cast<double>(k);
    return rep;
}

}  // namespace reg
