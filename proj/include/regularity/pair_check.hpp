#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "regularity/graph.hpp"
#include "regularity/rng.hpp"

namespace reg {

enum class CheckMode { Exhaustive, Sampled, Spectral };

inline const char* to_string(CheckMode m) {
    switch (m) {
        case CheckMode::Exhaustive: return "exhaustive";
        case CheckMode::Sampled: return "sampled";
        default: return "spectral";
    }
}

// Two qualifying sub-pairs whose densities differ by more than eps.
struct PairWitness {
    VertexSet x_hi, y_hi;
    double d_hi = 0.0;
    VertexSet x_lo, y_lo;
    double d_lo = 0.0;
    double spread() const { return d_hi - d_lo; }
};

struct PairVerdict {
    bool regular = false;
    CheckMode mode = CheckMode::Exhaustive;
    std::optional<PairWitness> witness;
    double max_spread = 0.0;  // exhaustive: exact; sampled: over tried candidates
    std::uint64_t pairs_examined = 0;
};

namespace detail {

// For a fixed X' (as per-vertex counts c_y = e(X', {y})), the extreme
// densities over Y' of every qualifying size come from sorted prefixes:
// at fixed |Y'| = s the max (min) of sum c_y is the top (bottom) s entries.
struct YSideExtremes {
    double best_hi, best_lo;
    int hi_size, lo_size;
    bool hi_from_top;  // always true for hi, false for lo; kept for clarity
};

}  // namespace detail

// Enumerates all X' ⊆ X with |X'| >= delta|X| and, per X', scans every
// qualifying |Y'| via sorted prefix sums. Regular iff the spread of
// d(X', Y') over qualifying sub-pairs is <= eps (closed band).
// X and Y may overlap; loops are never counted by e().
inline PairVerdict check_pair_exhaustive(const DenseGraph& g, const VertexSet& X, const VertexSet& Y,
                                         double eps, double delta, int cap = 18) {
    if (X.empty() || Y.empty()) throw std::invalid_argument("check_pair_exhaustive: empty side");
    if (static_cast<int>(X.size()) > cap || static_cast<int>(Y.size()) > cap)
        throw std::invalid_argument("check_pair_exhaustive: side exceeds cap; use sampled mode");

    const int nx = static_cast<int>(X.size());
    const int ny = static_cast<int>(Y.size());
    const int min_x = std::min(nx, std::max(1, static_cast<int>(std::ceil(delta * nx - 1e-12))));
    const int min_y = std::min(ny, std::max(1, static_cast<int>(std::ceil(delta * ny - 1e-12))));

    // adjacency of X-members restricted to Y, as ny-bit rows
    std::vector<std::uint32_t> xrow(nx, 0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            if (g.has_edge(X[i], Y[j])) xrow[i] |= 1u << j;

    std::vector<int> cnt(ny, 0);   // c_y for the current X'
    std::vector<int> order(ny);    // y indices sorted by cnt
    std::vector<int> prefix(ny + 1, 0);

    double best_hi = -1.0, best_lo = 2.0;
    std::uint32_t hi_mask = 0, lo_mask = 0;
    int hi_ysize = 0, lo_ysize = 0;
    bool lo_from_bottom = true;
    std::uint64_t examined = 0;

    std::uint32_t gray_prev = 0;
    const std::uint32_t total = 1u << nx;
    for (std::uint32_t m = 1; m < total; ++m) {
        std::uint32_t gray = m ^ (m >> 1);
        std::uint32_t flipped = gray ^ gray_prev;
        int fb = std::countr_zero(flipped);
        bool added = gray & flipped;
        std::uint32_t bits = xrow[fb];
        while (bits) {
            int y = std::countr_zero(bits);
            bits &= bits - 1;
            cnt[y] += added ? 1 : -1;
        }
        gray_prev = gray;

        int xs = std::popcount(gray);
        if (xs < min_x) continue;

        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return cnt[a] != cnt[b] ? cnt[a] < cnt[b] : a < b;
        });
        for (int j = 0; j < ny; ++j) prefix[j + 1] = prefix[j] + cnt[order[j]];
        int tot = prefix[ny];

        for (int s = min_y; s <= ny; ++s) {
            ++examined;
            double dx = static_cast<double>(xs) * s;
            double hi = (tot - prefix[ny - s]) / dx;  // top s counts
            double lo = prefix[s] / dx;               // bottom s counts
            if (hi > best_hi) {
                best_hi = hi;
                hi_mask = gray;
                hi_ysize = s;
            }
            if (lo < best_lo) {
                best_lo = lo;
                lo_mask = gray;
                lo_ysize = s;
                lo_from_bottom = true;
            }
        }
    }

    PairVerdict v;
    v.mode = CheckMode::Exhaustive;
    v.pairs_examined = examined;
    v.max_spread = best_hi - best_lo;
    v.regular = v.max_spread <= eps + 1e-12;
    if (!v.regular) {
        auto rebuild = [&](std::uint32_t xmask, int ysize, bool from_top) {
            std::pair<VertexSet, VertexSet> out;
            std::fill(cnt.begin(), cnt.end(), 0);
            for (int i = 0; i < nx; ++i)
                if (xmask >> i & 1) {
                    out.first.push_back(X[i]);
                    std::uint32_t bits = xrow[i];
                    while (bits) {
                        int y = std::countr_zero(bits);
                        bits &= bits - 1;
                        cnt[y]++;
                    }
                }
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                return cnt[a] != cnt[b] ? cnt[a] < cnt[b] : a < b;
            });
            if (from_top)
                for (int j = ny - ysize; j < ny; ++j) out.second.push_back(Y[order[j]]);
            else
                for (int j = 0; j < ysize; ++j) out.second.push_back(Y[order[j]]);
            std::sort(out.second.begin(), out.second.end());
            return out;
        };
        PairWitness w;
        auto [xh, yh] = rebuild(hi_mask, hi_ysize, true);
        auto [xl, yl] = rebuild(lo_mask, lo_ysize, !lo_from_bottom ? true : false);
        w.x_hi = std::move(xh);
        w.y_hi = std::move(yh);
        w.d_hi = best_hi;
        w.x_lo = std::move(xl);
        w.y_lo = std::move(yl);
        w.d_lo = best_lo;
        v.witness = std::move(w);
    }
    return v;
}

// One-sided randomized witness search: random qualifying subset pairs plus
// degree-deviation-guided candidates. Returns a witness or "no violation
// found"; never certifies regularity.
inline PairVerdict check_pair_sampled(const DenseGraph& g, const VertexSet& X, const VertexSet& Y,
                                      double eps, double delta, int trials, Rng rng) {
    if (X.empty() || Y.empty()) throw std::invalid_argument("check_pair_sampled: empty side");
    if (trials < 1) throw std::invalid_argument("check_pair_sampled: trials < 1");
    const int nx = static_cast<int>(X.size());
    const int ny = static_cast<int>(Y.size());
    const int sx = std::min(nx, std::max(1, static_cast<int>(std::ceil(delta * nx - 1e-12))));
    const int sy = std::min(ny, std::max(1, static_cast<int>(std::ceil(delta * ny - 1e-12))));

    double best_hi = -1.0, best_lo = 2.0;
    VertexSet hi_x, hi_y, lo_x, lo_y;
    std::uint64_t examined = 0;
    auto consider = [&](const VertexSet& A, const VertexSet& B) {
        if (A.empty() || B.empty()) return;
        double d = density(g, A, B);
        ++examined;
        if (d > best_hi) {
            best_hi = d;
            hi_x = A;
            hi_y = B;
        }
        if (d < best_lo) {
            best_lo = d;
            lo_x = A;
            lo_y = B;
        }
    };

    consider(X, Y);

    // Guided candidates: top and bottom slices by degree into the other side.
    Bitmask ymask = Bitmask::of(g.n(), Y), xmask = Bitmask::of(g.n(), X);
    auto slice = [&](const VertexSet& side, const Bitmask& other, int s) {
        std::vector<int> idx = side;
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
            return g.degree_into(a, other) < g.degree_into(b, other);
        });
        VertexSet bottom(idx.begin(), idx.begin() + s);
        VertexSet top(idx.end() - s, idx.end());
        std::sort(bottom.begin(), bottom.end());
        std::sort(top.begin(), top.end());
        return std::pair(bottom, top);
    };
    auto [xbot, xtop] = slice(X, ymask, sx);
    auto [ybot, ytop] = slice(Y, xmask, sy);
    for (const auto& a : {xbot, xtop, X})
        for (const auto& b : {ybot, ytop, Y}) consider(a, b);
    consider(xtop, ytop);
    consider(xbot, ybot);

    for (int t = 0; t < trials; ++t) {
        VertexSet a, b;
        auto ai = sample_without_replacement(rng, nx, sx);
        auto bi = sample_without_replacement(rng, ny, sy);
        for (int i : ai) a.push_back(X[i]);
        for (int j : bi) b.push_back(Y[j]);
        consider(a, b);
    }

    PairVerdict v;
    v.mode = CheckMode::Sampled;
    v.pairs_examined = examined;
    v.max_spread = best_hi - best_lo;
    if (v.max_spread > eps + 1e-12) {
        v.regular = false;
        PairWitness w;
        w.x_hi = hi_x;
        w.y_hi = hi_y;
        w.d_hi = best_hi;
        w.x_lo = lo_x;
        w.y_lo = lo_y;
        w.d_lo = best_lo;
        v.witness = std::move(w);
    } else {
        v.regular = true;  // read as "no violation found in N trials"
    }
    return v;
}

}  // namespace reg
