#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "regularity/graph.hpp"
#include "regularity/partition.hpp"
#include "regularity/rng.hpp"

namespace reg {

// Bipartite 2n-vertex graph: A-side vertex i adjacent to B-side vertex j
// iff i <= j (1-indexed). A-side occupies ids 0..n-1, B-side n..2n-1.
inline DenseGraph half_graph(int n) {
    if (n < 1) throw std::invalid_argument("half_graph: n < 1");
    DenseGraph g(2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) g.add_edge(i, n + j);
    g.set_bipartition(n);
    return g;
}

// ---------------------------------------------------------------------------
// B(m, M) partition family
// ---------------------------------------------------------------------------

struct FamilyDiagnostics {
    bool pass = false;
    bool same_side_ok = false;     // pairwise same-side counts < (1/2 + mu) m
    bool codegree_ok = false;      // common (non)neighbors < (1/4 + M^{-1/4}) M
    bool discrepancy_ok = false;   // sampled sqrt(f) subset discrepancy
    bool theory_m_ok = false;      // m >= 2 mu^{-2} log M (reported, not enforced)
    bool theory_M_ok = false;      // M >= m (reported, not enforced)
    int attempts = 0;
    int worst_same_side = 0;
    double worst_discrepancy_ratio = 0.0;  // max |e - u1 u2 / 2| / sqrt(f)
};

struct PartitionFamily {
    int m = 0, M = 0;
    double mu = 0.0;
    std::vector<Bitmask> rows;  // A_i as subset of [M]; B_i is the complement
    FamilyDiagnostics diag;
    bool ok() const { return diag.pass; }
};

inline double family_f_threshold(int u1, int u2, int m, int M) {
    double e = std::exp(1.0);
    return static_cast<double>(u1) * u2 *
           (u1 * std::log(e * m / static_cast<double>(u1)) + u2 * std::log(e * M / static_cast<double>(u2)));
}

// Samples each row's neighborhood as a uniform M/2-subset of [M]; redraws
// until the exact pairwise checks hold and the sampled subset-discrepancy
// spot-check finds no violation.
inline PartitionFamily partition_family(int m, int M, double mu, Rng rng, int retries = 32,
                                        int spot_samples = 256) {
    if (m < 1) throw std::invalid_argument("partition_family: m < 1");
    if (M < 2 || M % 2 != 0) throw std::invalid_argument("partition_family: M must be even and >= 2");
    if (!(mu > 0.0 && mu < 0.5)) throw std::invalid_argument("partition_family: mu outside (0, 1/2)");

    PartitionFamily fam;
    fam.m = m;
    fam.M = M;
    fam.mu = mu;
    fam.diag.theory_m_ok = m >= 2.0 * std::pow(mu, -2.0) * std::log(static_cast<double>(M));
    fam.diag.theory_M_ok = M >= m;

    for (int attempt = 0; attempt < retries; ++attempt) {
        fam.diag.attempts = attempt + 1;
        Rng arng = rng.stream("family-attempt", attempt);
        std::vector<Bitmask> rows;
        rows.reserve(m);
        for (int i = 0; i < m; ++i) {
            auto pick = sample_without_replacement(arng, M, M / 2);
            rows.push_back(Bitmask::of(M, pick));
        }

        // pairwise same-side counts over columns; regulates coupling across
        // rows, so a single row has nothing to satisfy
        bool same_ok = true;
        int worst = 0;
        double limit = m == 1 ? 2.0 : (0.5 + mu) * m;
        for (int j = 0; j < M && same_ok; ++j)
            for (int j2 = j + 1; j2 < M; ++j2) {
                int same = 0;
                for (int i = 0; i < m; ++i)
                    if (rows[i].test(j) == rows[i].test(j2)) ++same;
                worst = std::max(worst, same);
                if (!(same < limit)) {
                    same_ok = false;
                    break;
                }
            }
        fam.diag.worst_same_side = worst;
        fam.diag.same_side_ok = same_ok;

        // pairwise codegree (and co-nonneighbor) counts over rows
        bool codeg_ok = true;
        double climit = (0.25 + std::pow(static_cast<double>(M), -0.25)) * M;
        for (int i = 0; i < m && codeg_ok; ++i)
            for (int i2 = i + 1; i2 < m; ++i2) {
                int common = 0, common_non = 0;
                for (int w = 0; w < rows[i].words(); ++w) {
                    common += std::popcount(rows[i].data()[w] & rows[i2].data()[w]);
                }
                // complement within [M]
                for (int j = 0; j < M; ++j)
                    if (!rows[i].test(j) && !rows[i2].test(j)) ++common_non;
                if (!(common < climit && common_non < climit)) {
                    codeg_ok = false;
                    break;
                }
            }
        fam.diag.codegree_ok = codeg_ok;

        // sampled subset discrepancy against sqrt(f)
        bool disc_ok = true;
        double worst_ratio = 0.0;
        Rng srng = arng.stream("spot");
        for (int t = 0; t < spot_samples && disc_ok; ++t) {
            int u1 = 1 + srng.below_int(m);
            int u2 = 1 + srng.below_int(M);
            auto us = sample_without_replacement(srng, m, u1);
            auto vs = sample_without_replacement(srng, M, u2);
            std::uint64_t e = 0;
            for (int i : us)
                for (int j : vs)
                    if (rows[i].test(j)) ++e;
            double dev = std::abs(static_cast<double>(e) - 0.5 * u1 * u2);
            double bound = std::sqrt(family_f_threshold(u1, u2, m, M));
            worst_ratio = std::max(worst_ratio, bound > 0 ? dev / bound : 0.0);
            if (dev > bound) disc_ok = false;
        }
        fam.diag.discrepancy_ok = disc_ok;
        fam.diag.worst_discrepancy_ratio = worst_ratio;

        if (same_ok && codeg_ok && disc_ok) {
            fam.diag.pass = true;
            fam.rows = std::move(rows);
            return fam;
        }
        if (attempt == retries - 1) fam.rows = std::move(rows);
    }
    fam.diag.pass = false;
    return fam;
}

// ---------------------------------------------------------------------------
// Nested-partition construction with planted complete bipartite pairs
// ---------------------------------------------------------------------------

struct GowersParams {
    int m1 = 8;            // parts in the top partition
    int s = 2;             // number of partition levels
    double rho = std::ldexp(1.0, -20);
    std::vector<double> p;  // per-level edge probabilities, size s-1
    std::uint64_t seed = 0;
    // desk-scale caps and knobs; requested theory values are reported alongside
    int a_cap = 4;          // even cap on the per-level arity a_i
    int bottom_block = 1;   // vertices per deepest part
    double family_mu = 0.4;
    int retries = 8;
    int family_retries = 32;
    int spot_samples = 128;
};

struct LevelSplit {
    // for a level-i edge (X, Y): which of X's a_i children form X^1_Y,
    // and which of Y's children form Y^1_X
    Bitmask x_side1, y_side1;
};

struct GowersLevelDiagnostics {
    bool degree_ok = false, codegree_ok = false, fresh_edges_ok = false;
    bool union_density_ok = false, cross_density_ok = false, discrepancy_ok = false;
    bool energy_increment_ok = false;
    double max_degree_dev = 0.0, max_codegree_dev = 0.0;
    std::uint64_t fresh_edges = 0;
    double max_union_density = 0.0, max_cross_density = 0.0;
    double q_this = 0.0, q_next = 0.0;
};

struct GowersDiagnostics {
    bool pass = false;
    bool nu_meaningful = false;  // nu < 1, else the density checks are vacuous
    double nu = 0.0;
    int attempts = 0;
    std::vector<GowersLevelDiagnostics> levels;
};

struct GowersInstance {
    GowersParams params;
    std::vector<int> a;       // realized arities a_1..a_{s-1}
    std::vector<int> m;       // parts per level m_1..m_s
    int n = 0;
    DenseGraph graph{1};
    std::vector<VertexPartition> partitions;                    // P_1..P_s
    std::vector<std::vector<std::pair<int, int>>> level_edges;  // G_i as block pairs, i = 1..s-1
    std::vector<std::vector<LevelSplit>> level_splits;          // parallel to level_edges
    GowersDiagnostics diag;
    bool ok() const { return diag.pass; }
};

namespace detail {

// Rebuilds the adjacency from (partitions, level edges, splits).
inline DenseGraph materialize_gowers(const GowersInstance& inst) {
    DenseGraph g(inst.n);
    int s = inst.params.s;
    for (int lev = 0; lev + 1 < s; ++lev) {
        const auto& pi = inst.partitions[lev];
        const auto& pnext = inst.partitions[lev + 1];
        int ai = inst.a[lev];
        for (std::size_t e = 0; e < inst.level_edges[lev].size(); ++e) {
            auto [X, Y] = inst.level_edges[lev][e];
            const LevelSplit& sp = inst.level_splits[lev][e];
            for (int d = 0; d < 2; ++d) {
                VertexSet xs, ys;
                for (int c = 0; c < ai; ++c) {
                    bool on_x = sp.x_side1.test(c) == (d == 0);
                    bool on_y = sp.y_side1.test(c) == (d == 0);
                    const VertexSet& xc = pnext.block(X * ai + c);
                    const VertexSet& yc = pnext.block(Y * ai + c);
                    if (on_x) xs.insert(xs.end(), xc.begin(), xc.end());
                    if (on_y) ys.insert(ys.end(), yc.begin(), yc.end());
                }
                for (int u : xs)
                    for (int v : ys)
                        if (u != v && !g.has_edge(u, v)) g.add_edge(u, v);
            }
        }
        (void)pi;
    }
    return g;
}

}  // namespace detail

// Builds nested equitable interval partitions P_1..P_s, samples each level
// graph G_i = G(m_i, p_i), equips each G_i-edge with equal splits drawn from
// a shared B(|N(X)|, a_i) family per part X, plants complete bipartite graphs
// between matched split sides, and retries until the edge-distribution
// battery passes.
inline GowersInstance gowers_graph(const GowersParams& params) {
    if (params.s < 1) throw std::invalid_argument("gowers_graph: s < 1");
    if (params.m1 < 1) throw std::invalid_argument("gowers_graph: m1 < 1");
    if (static_cast<int>(params.p.size()) < params.s - 1)
        throw std::invalid_argument("gowers_graph: need p_i for each level below s");
    if (params.a_cap < 2 || params.a_cap % 2 != 0)
        throw std::invalid_argument("gowers_graph: a_cap must be even and >= 2");

    GowersInstance inst;
    inst.params = params;
    int s = params.s;

    // realized arities: theory value 2^{floor(rho m_i^{9/10})}, replaced by
    // the even desk cap whenever it is degenerate (< 2) or too large
    inst.m = {params.m1};
    for (int i = 0; i + 1 < s; ++i) {
        double theory = std::exp2(std::floor(params.rho * std::pow(inst.m[i], 0.9)));
        int ai = params.a_cap;
        if (theory >= 2.0 && theory <= params.a_cap) ai = 2 * static_cast<int>(theory / 2);
        inst.a.push_back(ai);
        inst.m.push_back(inst.m[i] * ai);
    }
    inst.n = inst.m[s - 1] * params.bottom_block;

    double nu = 0.0;
    for (int i = 0; i + 1 < s; ++i) nu += 3.0 * params.p[i];
    inst.diag.nu = nu;
    inst.diag.nu_meaningful = nu < 1.0;

    for (int lev = 0; lev < s; ++lev)
        inst.partitions.push_back(VertexPartition::intervals(inst.n, inst.m[lev]));

    Rng root(params.seed);
    for (int attempt = 0; attempt < params.retries; ++attempt) {
        inst.diag.attempts = attempt + 1;
        inst.diag.levels.assign(std::max(0, s - 1), GowersLevelDiagnostics{});
        inst.level_edges.assign(std::max(0, s - 1), {});
        inst.level_splits.assign(std::max(0, s - 1), {});
        Rng arng = root.stream("attempt", attempt);

        bool built = true;
        for (int lev = 0; lev + 1 < s && built; ++lev) {
            int mi = inst.m[lev], ai = inst.a[lev];
            Rng lrng = arng.stream("level", lev);
            // G_i = G(m_i, p_i)
            std::vector<std::vector<int>> nbr(mi);
            for (int x = 0; x < mi; ++x)
                for (int y = x + 1; y < mi; ++y)
                    if (lrng.bernoulli(params.p[lev])) {
                        nbr[x].push_back(y);
                        nbr[y].push_back(x);
                        inst.level_edges[lev].emplace_back(x, y);
                    }
            // shared family per part: row t of X's family decides the split
            // of X against its t-th neighbor
            std::vector<PartitionFamily> fams(mi);
            for (int x = 0; x < mi && built; ++x) {
                int deg = static_cast<int>(nbr[x].size());
                if (deg == 0) continue;
                fams[x] = partition_family(deg, ai, params.family_mu, lrng.stream("family", x),
                                           params.family_retries, params.spot_samples);
                if (!fams[x].ok()) built = false;
            }
            if (!built) break;
            std::vector<std::map<int, int>> row_of(mi);
            for (int x = 0; x < mi; ++x)
                for (std::size_t t = 0; t < nbr[x].size(); ++t) row_of[x][nbr[x][t]] = static_cast<int>(t);
            for (auto [x, y] : inst.level_edges[lev]) {
                LevelSplit sp;
                sp.x_side1 = fams[x].rows[row_of[x][y]];
                sp.y_side1 = fams[y].rows[row_of[y][x]];
                inst.level_splits[lev].push_back(std::move(sp));
            }
        }
        if (!built) continue;

        inst.graph = detail::materialize_gowers(inst);

        // ---- diagnostic battery ----
        bool all_ok = true;
        // cumulative graph strictly below each level, for freshness and the
        // planted-pair density checks
        DenseGraph below(inst.n);

        std::vector<double> qs;
        for (int lev = 0; lev < s; ++lev) qs.push_back(mean_square_density(inst.graph, inst.partitions[lev]));

        for (int lev = 0; lev + 1 < s; ++lev) {
            auto& d = inst.diag.levels[lev];
            int mi = inst.m[lev];
            double pi = params.p[lev];
            const auto& edges = inst.level_edges[lev];
            std::vector<std::vector<char>> adj(mi, std::vector<char>(mi, 0));
            std::vector<int> deg(mi, 0);
            for (auto [x, y] : edges) {
                adj[x][y] = adj[y][x] = 1;
                ++deg[x];
                ++deg[y];
            }

            double m34 = std::pow(static_cast<double>(mi), 0.75);
            d.degree_ok = true;
            for (int x = 0; x < mi; ++x) {
                double dev = std::abs(deg[x] - pi * mi);
                d.max_degree_dev = std::max(d.max_degree_dev, dev);
                if (dev > m34) d.degree_ok = false;
            }
            d.codegree_ok = true;
            for (int x = 0; x < mi; ++x)
                for (int y = x + 1; y < mi; ++y) {
                    int cd = 0;
                    for (int z = 0; z < mi; ++z)
                        if (adj[x][z] && adj[y][z]) ++cd;
                    double dev = std::abs(cd - pi * pi * mi);
                    d.max_codegree_dev = std::max(d.max_codegree_dev, dev);
                    if (dev > m34) d.codegree_ok = false;
                }

            // freshness: G_i edges whose block pair is not already complete in `below`
            std::uint64_t fresh = 0;
            const auto& blocks = inst.partitions[lev].blocks();
            for (auto [x, y] : edges) {
                int u = blocks[x][0], v = blocks[y][0];
                if (!below.has_edge(u, v)) ++fresh;
            }
            d.fresh_edges = fresh;
            d.fresh_edges_ok = static_cast<double>(fresh) >= pi * mi * mi / 4.0;

            // density of any vertex into U(X) = union of N_{G_i}(X)
            d.union_density_ok = true;
            for (int x = 0; x < mi && d.union_density_ok; ++x) {
                if (deg[x] == 0) continue;
                Bitmask um(inst.n);
                for (int y = 0; y < mi; ++y)
                    if (adj[x][y])
                        for (int v : blocks[y]) um.set(v);
                int usz = um.count();
                for (int v = 0; v < inst.n; ++v) {
                    if (inst.partitions[lev].block_of(v) == x) continue;
                    double dv = static_cast<double>(inst.graph.degree_into(v, um)) / usz;
                    d.max_union_density = std::max(d.max_union_density, dv);
                    if (dv > nu) {
                        d.union_density_ok = false;
                        break;
                    }
                }
            }

            // planted-pair checks: for each fresh edge, density(X^d_Y, Y^d_X) = 1
            // and the cross sides are sparse
            d.cross_density_ok = true;
            const auto& pnext = inst.partitions[lev + 1];
            int ai = inst.a[lev];
            for (std::size_t e = 0; e < edges.size(); ++e) {
                auto [x, y] = edges[e];
                int u0 = blocks[x][0], v0 = blocks[y][0];
                bool is_fresh = !below.has_edge(u0, v0);
                const LevelSplit& sp = inst.level_splits[lev][e];
                for (int dside = 0; dside < 2 && d.cross_density_ok; ++dside) {
                    VertexSet xs, ys;
                    for (int c = 0; c < ai; ++c) {
                        const VertexSet& xc = pnext.block(x * ai + c);
                        const VertexSet& yc = pnext.block(y * ai + c);
                        if (sp.x_side1.test(c) == (dside == 0)) xs.insert(xs.end(), xc.begin(), xc.end());
                        if (sp.y_side1.test(c) == (dside == 0)) ys.insert(ys.end(), yc.begin(), yc.end());
                    }
                    if (density(inst.graph, xs, ys) != 1.0) d.cross_density_ok = false;
                    if (is_fresh) {
                        // vertices of the opposite X-side should see few of Y^d
                        Bitmask ym = Bitmask::of(inst.n, ys);
                        VertexSet xs_other;
                        for (int c = 0; c < ai; ++c)
                            if (sp.x_side1.test(c) != (dside == 0)) {
                                const VertexSet& xc = pnext.block(x * ai + c);
                                xs_other.insert(xs_other.end(), xc.begin(), xc.end());
                            }
                        for (int v : xs_other) {
                            double dv = static_cast<double>(inst.graph.degree_into(v, ym)) / ys.size();
                            d.max_cross_density = std::max(d.max_cross_density, dv);
                            if (dv > nu) {
                                d.cross_density_ok = false;
                                break;
                            }
                        }
                    }
                }
            }

            // sampled subset discrepancy in G_i against 5 sqrt(h)
            d.discrepancy_ok = true;
            Rng drng = arng.stream("disc", lev);
            for (int t = 0; t < params.spot_samples; ++t) {
                int u2sz = 1 + drng.below_int(mi);
                int u1sz = 1 + drng.below_int(u2sz);
                auto us = sample_without_replacement(drng, mi, u1sz);
                auto vs = sample_without_replacement(drng, mi, u2sz);
                std::uint64_t e = 0;
                for (int xx : us)
                    for (int yy : vs)
                        if (xx != yy && adj[xx][yy]) ++e;
                double h = static_cast<double>(u1sz) * u2sz * u2sz *
                           std::log(mi * std::exp(1.0) / static_cast<double>(u2sz));
                if (std::abs(static_cast<double>(e) - pi * u1sz * u2sz) > 5.0 * std::sqrt(h)) {
                    d.discrepancy_ok = false;
                    break;
                }
            }

            d.q_this = qs[lev];
            d.q_next = qs[lev + 1];
            d.energy_increment_ok = qs[lev + 1] >= qs[lev] + pi / 32.0 - 1e-6;

            all_ok = all_ok && d.degree_ok && d.codegree_ok && d.fresh_edges_ok &&
                     d.union_density_ok && d.cross_density_ok && d.discrepancy_ok &&
                     d.energy_increment_ok;

            // extend `below` with this level's planted bipartite graphs
            for (std::size_t e = 0; e < edges.size(); ++e) {
                auto [x, y] = edges[e];
                const LevelSplit& sp = inst.level_splits[lev][e];
                for (int dside = 0; dside < 2; ++dside) {
                    VertexSet xs, ys;
                    for (int c = 0; c < ai; ++c) {
                        if (sp.x_side1.test(c) == (dside == 0)) {
                            const VertexSet& xc = pnext.block(x * ai + c);
                            xs.insert(xs.end(), xc.begin(), xc.end());
                        }
                        if (sp.y_side1.test(c) == (dside == 0)) {
                            const VertexSet& yc = pnext.block(y * ai + c);
                            ys.insert(ys.end(), yc.begin(), yc.end());
                        }
                    }
                    for (int u : xs)
                        for (int v : ys)
                            if (u != v && !below.has_edge(u, v)) below.add_edge(u, v);
                }
            }
        }

        if (all_ok) {
            inst.diag.pass = true;
            return inst;
        }
    }
    inst.diag.pass = false;
    return inst;
}

// ---------------------------------------------------------------------------
// Strong-lower-bound parameter schedule
// ---------------------------------------------------------------------------

struct ScheduleEntry {
    int level = 0;  // l
    int step = 0;   // j
    double log2_m = 0.0;   // log2 of the part count, exact until overflow
    bool m_finite = false;  // the part count fits a double
    double p = 0.0;         // p_{l,j} clamped into (0, 1]
    double eps_level = 0.0;
};

struct StrongLbCaps {
    int levels = 3;     // realized s
    int m1 = 16;        // realized top part count
    int a_cap = 4;
    int bottom_block = 1;
};

struct StrongLbResult {
    double t = 0.0;          // 2^{-20} / eps
    double m1_theory = 0.0;  // 2^{10} eps^{-2}
    std::vector<ScheduleEntry> schedule;
    GowersInstance instance;
};

// Evaluates the (l, j)-indexed schedule and delegates generation to
// gowers_graph under the desk caps.
inline StrongLbResult strong_lb_graph(double eps, const std::function<double(double)>& f,
                                      const StrongLbCaps& caps, std::uint64_t seed,
                                      int schedule_rows = 64) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("strong_lb_graph: eps outside (0,1)");
    double f1 = f(1.0);
    if (!(f1 > 0.0 && f1 <= std::ldexp(1.0, -100) * std::pow(eps, 6.0)))
        throw std::invalid_argument("strong_lb_graph: need f(1) <= 2^-100 eps^6");

    StrongLbResult res;
    res.t = std::ldexp(1.0, -20) / eps;
    res.m1_theory = std::ldexp(1.0, 10) / (eps * eps);

    // schedule rows until the part count stops being representable
    double rho = std::ldexp(1.0, -20);
    double log2_m = std::log2(res.m1_theory);
    bool finite = true;
    double M_level = 1.0;  // M_l, the anchor for eps_l = f(M_l)
    int rows = 0;
    for (int level = 1; rows < schedule_rows && level <= std::max(1.0, res.t); ++level) {
        double eps_l = f(M_level);
        double h_l = std::pow(eps, 5.0) / (std::ldexp(1.0, 70) * eps_l);
        double log2_m_prev2 = log2_m;
        for (int j = 1; rows < schedule_rows && j <= std::min(h_l, 1e6); ++j) {
            ScheduleEntry en;
            en.level = level;
            en.step = j;
            en.log2_m = log2_m;
            en.m_finite = finite;
            en.eps_level = eps_l;
            double base = std::ldexp(1.0, 30) * std::pow(eps, -4.0) * eps_l;
            if (finite) base = std::max(base, std::exp2(-log2_m / 10.0));  // m^{-1/10}
            if (j == static_cast<int>(h_l) - 1) base = std::max(base, std::ldexp(1.0, 10) * eps);
            en.p = std::min(1.0, base);
            res.schedule.push_back(en);
            ++rows;
            // advance m: m' = m * 2^{floor(rho m^{0.9})}
            if (finite) {
                double a_log2 = std::floor(rho * std::exp2(0.9 * log2_m));
                if (!std::isfinite(a_log2) || log2_m + a_log2 > 1e15) {
                    finite = false;
                } else {
                    log2_m += std::max(0.0, a_log2);
                    if (log2_m > 1e15) finite = false;
                }
            }
            if (j == static_cast<int>(h_l) - 2) log2_m_prev2 = log2_m;
        }
        M_level = finite ? std::exp2(log2_m_prev2) : std::numeric_limits<double>::infinity();
        if (!finite) break;
    }

    // realized instance under the caps
    GowersParams gp;
    gp.m1 = caps.m1;
    gp.s = caps.levels;
    gp.a_cap = caps.a_cap;
    gp.bottom_block = caps.bottom_block;
    gp.seed = seed;
    for (int i = 0; i + 1 < caps.levels; ++i) {
        double p = i < static_cast<int>(res.schedule.size()) ? res.schedule[i].p : 0.5;
        // desk instances need sampleable levels
        gp.p.push_back(std::clamp(p, 0.05, 1.0));
    }
    res.instance = gowers_graph(gp);
    return res;
}

// ---------------------------------------------------------------------------
// Weak regularity lower-bound weights
// ---------------------------------------------------------------------------

struct WeightMatrix {
    int rows = 0, cols = 0;
    std::vector<double> w;
    double at(int r, int c) const { return w[static_cast<std::size_t>(r) * cols + c]; }
    double& at(int r, int c) { return w[static_cast<std::size_t>(r) * cols + c]; }
};

struct CutFamily {
    // side-0 membership masks per cut; side 1 is the complement
    std::vector<Bitmask> u_side0, v_side0;
};

struct WeakLBParams {
    int n = 0;
    int r = 0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
};

struct WeakLBInstance {
    WeakLBParams params;
    WeightMatrix w;
    CutFamily cuts;
    std::vector<std::vector<std::uint8_t>> s_count;  // s(u, v) agreements
};

// W(u, v) = 1/2 + (s(u,v) - t(u,v)) alpha over r independent balanced cuts,
// clipped into [0, 1].
inline WeakLBInstance weak_lb_weights(const WeakLBParams& params) {
    if (params.n < 2 || params.n % 2 != 0) throw std::invalid_argument("weak_lb_weights: n must be even");
    if (params.r < 0 || params.r > 255) throw std::invalid_argument("weak_lb_weights: bad r");
    WeakLBInstance inst;
    inst.params = params;
    int n = params.n;
    Rng rng(params.seed);
    for (int i = 0; i < params.r; ++i) {
        auto us = sample_without_replacement(rng, n, n / 2);
        auto vs = sample_without_replacement(rng, n, n / 2);
        inst.cuts.u_side0.push_back(Bitmask::of(n, us));
        inst.cuts.v_side0.push_back(Bitmask::of(n, vs));
    }
    inst.s_count.assign(n, std::vector<std::uint8_t>(n, 0));
    inst.w.rows = inst.w.cols = n;
    inst.w.w.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            int s = 0;
            for (int i = 0; i < params.r; ++i)
                if (inst.cuts.u_side0[i].test(u) == inst.cuts.v_side0[i].test(v)) ++s;
            inst.s_count[u][v] = static_cast<std::uint8_t>(s);
            double W = 0.5 + (2.0 * s - params.r) * params.alpha;
            inst.w.at(u, v) = std::clamp(W, 0.0, 1.0);
        }
    return inst;
}

// Independent Bernoulli realization. U occupies ids 0..n-1, V ids n..2n-1.
inline DenseGraph realize_bernoulli(const WeightMatrix& w, Rng rng) {
    DenseGraph g(w.rows + w.cols);
    for (int u = 0; u < w.rows; ++u)
        for (int v = 0; v < w.cols; ++v)
            if (rng.bernoulli(w.at(u, v))) g.add_edge(u, w.rows + v);
    g.set_bipartition(w.rows);
    return g;
}

struct WeakLBReport {
    double extreme_fraction = 0.0;      // |W - 1/2| > 1/4
    double extreme_chernoff_bound = 0.0;  // 2 e^{-2 a^2 / r}, a = 1/(8 alpha)
    int nice_count = 0;                 // <= n/8 extreme pairs at u
    int very_nice_count = 0;            // nice and all cut-side margins >= alpha/2
    int n = 0, r = 0;
    // optional caller-driven probes
    std::optional<double> discrepancy_quantity;  // weighted version
    std::optional<std::vector<int>> useful_per_block;
};

// Extreme / nice / very nice statistics plus optional probes: useful pairs
// for a caller partition of U and the four-term cut discrepancy for caller
// sets (A0, A1) against cut i.
inline WeakLBReport weak_lb_diagnostics(const WeakLBInstance& inst,
                                        const VertexPartition* u_partition = nullptr,
                                        const VertexSet* A0 = nullptr, const VertexSet* A1 = nullptr,
                                        int cut_index = -1) {
    const int n = inst.params.n, r = inst.params.r;
    const double alpha = inst.params.alpha;
    WeakLBReport rep;
    rep.n = n;
    rep.r = r;
    if (alpha > 0 && r > 0) {
        double a = 1.0 / (8.0 * alpha);
        rep.extreme_chernoff_bound = 2.0 * std::exp(-2.0 * a * a / r);
    }

    std::vector<int> extreme_at(n, 0);
    std::uint64_t extreme = 0;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            double W = 0.5 + (2.0 * static_cast<int>(inst.s_count[u][v]) - r) * alpha;
            if (std::abs(W - 0.5) > 0.25) {
                ++extreme;
                ++extreme_at[u];
            }
        }
    rep.extreme_fraction = static_cast<double>(extreme) / (static_cast<double>(n) * n);

    for (int u = 0; u < n; ++u) {
        if (extreme_at[u] > n / 8) continue;
        rep.nice_count++;
        bool very = true;
        for (int i = 0; i < r && very; ++i) {
            bool u_on_0 = inst.cuts.u_side0[i].test(u);
            double d0 = 0.0, d1 = 0.0;
            int c0 = 0, c1 = 0;
            for (int v = 0; v < n; ++v) {
                if (inst.cuts.v_side0[i].test(v)) {
                    d0 += inst.w.at(u, v);
                    ++c0;
                } else {
                    d1 += inst.w.at(u, v);
                    ++c1;
                }
            }
            d0 /= c0;
            d1 /= c1;
            double margin = u_on_0 ? d0 - d1 : d1 - d0;
            if (margin < alpha / 2.0) very = false;
        }
        if (very) rep.very_nice_count++;
    }

    if (u_partition) {
        std::vector<int> useful(u_partition->size(), 0);
        for (int t = 0; t < u_partition->size(); ++t) {
            const auto& blk = u_partition->block(t);
            for (int i = 0; i < r; ++i) {
                int on0 = 0;
                for (int u : blk)
                    if (inst.cuts.u_side0[i].test(u)) ++on0;
                int mn = std::min(on0, static_cast<int>(blk.size()) - on0);
                if (mn * 32 >= static_cast<int>(blk.size())) useful[t]++;
            }
        }
        rep.useful_per_block = std::move(useful);
    }

    if (A0 && A1 && cut_index >= 0 && cut_index < r) {
        auto esum = [&](const VertexSet& A, bool side0) {
            double s = 0.0;
            for (int u : A)
                for (int v = 0; v < n; ++v)
                    if (inst.cuts.v_side0[cut_index].test(v) == side0) s += inst.w.at(u, v);
            return s;
        };
        rep.discrepancy_quantity =
            esum(*A0, true) - esum(*A1, true) + esum(*A1, false) - esum(*A0, false);
    }
    return rep;
}

}  // namespace reg
