#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "regularity/rng.hpp"

namespace reg {

using VertexSet = std::vector<int>;  // sorted, distinct vertex ids

// Fixed-width bitmask over vertex ids.
class Bitmask {
public:
    Bitmask() : n_(0) {}
    explicit Bitmask(int n) : n_(n), w_((n + 63) / 64, 0) {}

    static Bitmask of(int n, const VertexSet& vs) {
        Bitmask m(n);
        for (int v : vs) m.set(v);
        return m;
    }

    void set(int v) { w_[v >> 6] |= 1ULL << (v & 63); }
    void reset(int v) { w_[v >> 6] &= ~(1ULL << (v & 63)); }
    bool test(int v) const { return (w_[v >> 6] >> (v & 63)) & 1; }
    int size_bits() const { return n_; }
    int words() const { return static_cast<int>(w_.size()); }
    const std::uint64_t* data() const { return w_.data(); }
    std::uint64_t* data() { return w_.data(); }

    int count() const {
        int c = 0;
        for (std::uint64_t w : w_) c += std::popcount(w);
        return c;
    }

private:
    int n_;
    std::vector<std::uint64_t> w_;
};

// Undirected dense graph on vertices 0..n-1 as a bit-packed symmetric
// adjacency matrix. No loops. Optionally carries a bipartition marker
// (first `left` vertices vs the rest) for generated bipartite instances.
class DenseGraph {
public:
    explicit DenseGraph(int n) : n_(n), words_((n + 63) / 64), bits_(static_cast<std::size_t>(n) * words_, 0) {
        if (n < 1) throw std::invalid_argument("DenseGraph: n must be >= 1");
    }

    static DenseGraph edgeless(int n) { return DenseGraph(n); }

    static DenseGraph complete(int n) {
        DenseGraph g(n);
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
        return g;
    }

    int n() const { return n_; }
    int words() const { return words_; }

    void add_edge(int u, int v) {
        check_pair(u, v);
        bits_[static_cast<std::size_t>(u) * words_ + (v >> 6)] |= 1ULL << (v & 63);
        bits_[static_cast<std::size_t>(v) * words_ + (u >> 6)] |= 1ULL << (u & 63);
    }

    void remove_edge(int u, int v) {
        check_pair(u, v);
        bits_[static_cast<std::size_t>(u) * words_ + (v >> 6)] &= ~(1ULL << (v & 63));
        bits_[static_cast<std::size_t>(v) * words_ + (u >> 6)] &= ~(1ULL << (u & 63));
    }

    bool has_edge(int u, int v) const {
        if (u == v) return false;
        return (bits_[static_cast<std::size_t>(u) * words_ + (v >> 6)] >> (v & 63)) & 1;
    }

    const std::uint64_t* row(int u) const { return &bits_[static_cast<std::size_t>(u) * words_]; }

    int degree(int u) const {
        const std::uint64_t* r = row(u);
        int c = 0;
        for (int w = 0; w < words_; ++w) c += std::popcount(r[w]);
        return c;
    }

    std::uint64_t edge_count() const {
        std::uint64_t c = 0;
        for (int u = 0; u < n_; ++u) c += degree(u);
        return c / 2;
    }

    // Ordered pairs (x, y), x in X, y adjacent to x and covered by mask.
    std::uint64_t edges_into_mask(const VertexSet& X, const Bitmask& mask) const {
        std::uint64_t c = 0;
        for (int x : X) {
            const std::uint64_t* r = row(x);
            for (int w = 0; w < words_; ++w) c += std::popcount(r[w] & mask.data()[w]);
        }
        return c;
    }

    int degree_into(int u, const Bitmask& mask) const {
        const std::uint64_t* r = row(u);
        int c = 0;
        for (int w = 0; w < words_; ++w) c += std::popcount(r[w] & mask.data()[w]);
        return c;
    }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> es;
        es.reserve(edge_count());
        for (int u = 0; u < n_; ++u)
            for (int v = u + 1; v < n_; ++v)
                if (has_edge(u, v)) es.emplace_back(u, v);
        return es;
    }

    void set_bipartition(int left) { left_ = left; }
    std::optional<int> bipartition() const { return left_; }

    bool operator==(const DenseGraph& o) const { return n_ == o.n_ && bits_ == o.bits_; }

private:
    void check_pair(int u, int v) const {
        if (u < 0 || v < 0 || u >= n_ || v >= n_ || u == v)
            throw std::invalid_argument("DenseGraph: bad vertex pair");
    }

    int n_;
    int words_;
    std::vector<std::uint64_t> bits_;
    std::optional<int> left_;
};

// e(X, Y): ordered pairs (x, y) with x in X, y in Y, xy an edge.
// Loops never counted, so overlapping X and Y are fine.
inline std::uint64_t edge_pairs(const DenseGraph& g, const VertexSet& X, const VertexSet& Y) {
    Bitmask ym = Bitmask::of(g.n(), Y);
    return g.edges_into_mask(X, ym);
}

inline double density(const DenseGraph& g, const VertexSet& X, const VertexSet& Y) {
    if (X.empty() || Y.empty()) throw std::invalid_argument("density: empty vertex set");
    return static_cast<double>(edge_pairs(g, X, Y)) /
           (static_cast<double>(X.size()) * static_cast<double>(Y.size()));
}

inline VertexSet all_vertices(int n) {
    VertexSet v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

// G(n, p): each pair independently an edge, deterministic given the stream.
inline DenseGraph gnp(int n, double p, Rng rng) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("gnp: p outside [0,1]");
    DenseGraph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.bernoulli(p)) g.add_edge(u, v);
    return g;
}

}  // namespace reg
