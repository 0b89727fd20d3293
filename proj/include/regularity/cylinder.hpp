#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "regularity/graph.hpp"
#include "regularity/pair_check.hpp"
#include "regularity/partition.hpp"
#include "regularity/rng.hpp"
#include "regularity/weak_regularity.hpp"

namespace reg {

struct Cylinder {
    std::vector<VertexSet> parts;  // parts[i] ⊆ ground[i]
};

struct CylinderPartition {
    std::vector<VertexSet> ground;  // V_1 .. V_k
    std::vector<Cylinder> cylinders;

    int k() const { return static_cast<int>(ground.size()); }

    double density(std::size_t idx) const {
        double d = 1.0;
        for (int i = 0; i < k(); ++i)
            d *= static_cast<double>(cylinders[idx].parts[i].size()) / ground[i].size();
        return d;
    }

    // Exact mass check: sum over cylinders of prod |W_i| equals prod |V_i|.
    // Falls back to a tolerance check if the products overflow 128 bits.
    bool mass_is_one(bool* exact = nullptr) const {
        bool overflow = false;
        auto prod = [&](const std::vector<std::size_t>& sizes) -> unsigned __int128 {
            unsigned __int128 p = 1;
            for (auto s : sizes) {
                if (s != 0 && p > (~static_cast<unsigned __int128>(0)) / s) {
                    overflow = true;
                    return 0;
                }
                p *= s;
            }
            return p;
        };
        std::vector<std::size_t> gs;
        for (const auto& g : ground) gs.push_back(g.size());
        unsigned __int128 total = prod(gs);
        unsigned __int128 acc = 0;
        for (std::size_t c = 0; c < cylinders.size() && !overflow; ++c) {
            std::vector<std::size_t> ws;
            for (const auto& w : cylinders[c].parts) ws.push_back(w.size());
            unsigned __int128 m = prod(ws);
            if (acc > (~static_cast<unsigned __int128>(0)) - m) overflow = true;
            acc += m;
        }
        if (!overflow) {
            if (exact) *exact = true;
            return acc == total;
        }
        if (exact) *exact = false;
        double s = 0.0;
        for (std::size_t c = 0; c < cylinders.size(); ++c) s += density(c);
        return std::abs(s - 1.0) < 1e-9;
    }

    bool cylinders_disjoint() const {
        for (std::size_t a = 0; a < cylinders.size(); ++a)
            for (std::size_t b = a + 1; b < cylinders.size(); ++b) {
                bool separated = false;
                for (int i = 0; i < k() && !separated; ++i) {
                    const auto& wa = cylinders[a].parts[i];
                    const auto& wb = cylinders[b].parts[i];
                    VertexSet inter;
                    std::set_intersection(wa.begin(), wa.end(), wb.begin(), wb.end(),
                                          std::back_inserter(inter));
                    if (inter.empty()) separated = true;
                }
                if (!separated) return false;
            }
        return true;
    }
};

struct CylinderVerdict {
    double regular_mass = 0.0;  // fraction of product tuples in regular cylinders
    std::vector<char> flags;    // per-cylinder regular flag
    bool strong = false;        // self-pairs (i = j) included in the checks
    CheckMode mode = CheckMode::Exhaustive;
};

struct CylinderOptions {
    CheckMode mode = CheckMode::Sampled;
    bool strong = false;      // also require (W_i, W_i) pairs
    int pair_cap = 18;        // exact-mode size cap
    int sampled_trials = 64;
    std::size_t max_cylinders = 100000;
};

namespace detail {

struct CylPairCheck {
    bool regular = true;
    int bad_i = -1, bad_j = -1;
    PairWitness witness;
    bool has_witness = false;
};

inline CylPairCheck check_cylinder(const DenseGraph& g, const Cylinder& c, double eps,
                                   const CylinderOptions& opts, Rng rng) {
    CylPairCheck out;
    int k = static_cast<int>(c.parts.size());
    for (int i = 0; i < k; ++i) {
        int j0 = opts.strong ? i : i + 1;
        for (int j = j0; j < k; ++j) {
            PairVerdict v;
            if (opts.mode == CheckMode::Exhaustive) {
                v = check_pair_exhaustive(g, c.parts[i], c.parts[j], eps, eps, opts.pair_cap);
            } else {
                v = check_pair_sampled(g, c.parts[i], c.parts[j], eps, eps, opts.sampled_trials,
                                       rng.stream("cyl-pair", static_cast<std::uint64_t>(i) * k + j));
            }
            if (!v.regular) {
                out.regular = false;
                out.bad_i = i;
                out.bad_j = j;
                if (v.witness) {
                    out.witness = *v.witness;
                    out.has_witness = true;
                }
                return out;
            }
        }
    }
    return out;
}

inline VertexSet set_minus(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline VertexSet set_inter(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace detail

struct DlrResult {
    CylinderPartition partition;
    CylinderVerdict verdict;
    double beta_theory = 0.0;  // eps^{k^2 eps^{-5}}, the floor it implies
    int rounds = 0;
    bool certified = false;  // exact mode and mass bound met
};

// Iterated witness splitting: while the mass of irregular cylinders exceeds
// eps, split each irregular cylinder along a violating pair's witness
// subsets. Splits that would push a coordinate below the size floor are
// refused; such cylinders stay, and the achieved mass is reported.
inline DlrResult dlr_partition(const DenseGraph& g, const std::vector<VertexSet>& ground, double eps,
                               const CylinderOptions& opts, Rng rng) {
    int k = static_cast<int>(ground.size());
    if (k < 1) throw std::invalid_argument("dlr_partition: empty ground");
    for (std::size_t a = 0; a < ground.size(); ++a)
        for (std::size_t b = a + 1; b < ground.size(); ++b)
            if (!detail::set_inter(ground[a], ground[b]).empty())
                throw std::invalid_argument("dlr_partition: ground parts must be disjoint");

    DlrResult res;
    res.beta_theory = std::pow(eps, static_cast<double>(k) * k * std::pow(eps, -5.0));
    std::vector<std::size_t> floor_sz(k);
    for (int i = 0; i < k; ++i)
        floor_sz[i] = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(res.beta_theory * ground[i].size())));

    res.partition.ground = ground;
    Cylinder full;
    full.parts = ground;
    res.partition.cylinders.push_back(std::move(full));

    std::vector<char> frozen{0};
    std::vector<char> checked{0};
    std::vector<detail::CylPairCheck> checks(1);
    std::uint64_t check_id = 0;
    while (true) {
        auto& cyls = res.partition.cylinders;
        std::vector<char> regular(cyls.size(), 0);
        double irregular_mass = 0.0;
        for (std::size_t c = 0; c < cyls.size(); ++c) {
            if (!checked[c]) {
                checks[c] = detail::check_cylinder(g, cyls[c], eps, opts, rng.stream("check", check_id++));
                checked[c] = 1;
            }
            regular[c] = checks[c].regular;
            if (!checks[c].regular) irregular_mass += res.partition.density(c);
        }
        res.verdict.flags = regular;
        res.verdict.strong = opts.strong;
        res.verdict.mode = opts.mode;
        res.verdict.regular_mass = 0.0;
        for (std::size_t c = 0; c < cyls.size(); ++c)
            if (regular[c]) res.verdict.regular_mass += res.partition.density(c);

        if (irregular_mass <= eps + 1e-12) break;
        if (cyls.size() > opts.max_cylinders) break;  // budget: freeze and report

        // split pass
        bool any_split = false;
        std::vector<Cylinder> next;
        std::vector<char> next_frozen;
        std::vector<char> next_checked;
        std::vector<detail::CylPairCheck> next_checks;
        auto carry = [&](std::size_t c) {
            next.push_back(cyls[c]);
            next_frozen.push_back(frozen[c]);
            next_checked.push_back(1);
            next_checks.push_back(checks[c]);
        };
        for (std::size_t c = 0; c < cyls.size(); ++c) {
            if (regular[c] || frozen[c]) {
                carry(c);
                continue;
            }
            const auto& chk = checks[c];
            auto try_split = [&](const VertexSet& wx, const VertexSet& wy) -> bool {
                if (!chk.has_witness) return false;
                int i = chk.bad_i, j = chk.bad_j;
                VertexSet xi = detail::set_inter(cyls[c].parts[i], wx);
                VertexSet xo = detail::set_minus(cyls[c].parts[i], wx);
                // self pair: split only the one coordinate when i == j
                std::vector<std::pair<VertexSet, VertexSet>> xparts, yparts;
                if (xi.empty() || xo.empty()) {
                    if (i == j) return false;
                }
                if (i == j) {
                    if (xi.empty() || xo.empty()) return false;
                    if (xi.size() < floor_sz[i] || xo.size() < floor_sz[i]) return false;
                    for (const auto& xs : {xi, xo}) {
                        Cylinder child = cyls[c];
                        child.parts[i] = xs;
                        next.push_back(child);
                        next_frozen.push_back(0);
                        next_checked.push_back(0);
                        next_checks.emplace_back();
                    }
                    return true;
                }
                VertexSet yi = detail::set_inter(cyls[c].parts[j], wy);
                VertexSet yo = detail::set_minus(cyls[c].parts[j], wy);
                std::vector<VertexSet> xs_list, ys_list;
                if (!xi.empty() && !xo.empty()) {
                    xs_list = {xi, xo};
                } else {
                    xs_list = {cyls[c].parts[i]};
                }
                if (!yi.empty() && !yo.empty()) {
                    ys_list = {yi, yo};
                } else {
                    ys_list = {cyls[c].parts[j]};
                }
                if (xs_list.size() == 1 && ys_list.size() == 1) return false;
                for (const auto& xs : xs_list)
                    if (xs.size() < floor_sz[i]) return false;
                for (const auto& ys : ys_list)
                    if (ys.size() < floor_sz[j]) return false;
                for (const auto& xs : xs_list)
                    for (const auto& ys : ys_list) {
                        Cylinder child = cyls[c];
                        child.parts[i] = xs;
                        child.parts[j] = ys;
                        next.push_back(child);
                        next_frozen.push_back(0);
                        next_checked.push_back(0);
                        next_checks.emplace_back();
                    }
                return true;
            };

            auto rollback = [&](std::size_t sz) {
                next.resize(sz);
                next_frozen.resize(sz);
                next_checked.resize(sz);
                next_checks.resize(sz);
            };
            std::size_t before = next.size();
            bool split_ok = chk.has_witness && try_split(chk.witness.x_hi, chk.witness.y_hi);
            if (!split_ok) {
                rollback(before);
                split_ok = chk.has_witness && try_split(chk.witness.x_lo, chk.witness.y_lo);
            }
            if (!split_ok) {
                rollback(before);
                carry(c);
                next_frozen.back() = 1;  // frozen: floor refused the split
            } else {
                any_split = true;
            }
        }
        res.partition.cylinders = std::move(next);
        frozen = std::move(next_frozen);
        checked = std::move(next_checked);
        checks = std::move(next_checks);
        res.rounds++;
        if (!any_split) break;
    }

    res.certified = opts.mode == CheckMode::Exhaustive && res.verdict.regular_mass >= 1.0 - eps - 1e-12;
    return res;
}

// Equal chunks by vertex index, one DLR pass, then the parts of a regular
// cylinder of maximal minimum part size, truncated to equal sizes.
inline std::vector<VertexSet> regular_cylinder(const DenseGraph& g, int k, double eps,
                                               const CylinderOptions& opts, Rng rng) {
    int n = g.n();
    if (k < 1 || k > n) throw std::invalid_argument("regular_cylinder: need 1 <= k <= n");
    int chunk = n / k;
    std::vector<VertexSet> ground(k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < chunk; ++j) ground[i].push_back(i * chunk + j);

    auto dlr = dlr_partition(g, ground, eps, opts, rng.stream("dlr"));
    int best = -1;
    std::size_t best_min = 0;
    for (std::size_t c = 0; c < dlr.partition.cylinders.size(); ++c) {
        if (!dlr.verdict.flags[c]) continue;
        std::size_t mn = dlr.partition.cylinders[c].parts[0].size();
        for (const auto& p : dlr.partition.cylinders[c].parts) mn = std::min(mn, p.size());
        if (static_cast<int>(mn) > static_cast<int>(best_min)) {
            best_min = mn;
            best = static_cast<int>(c);
        }
    }
    std::vector<VertexSet> out(k);
    if (best < 0) {
        // singleton fallback: vacuously regular parts
        for (int i = 0; i < k; ++i) out[i] = {ground[i][0]};
        return out;
    }
    for (int i = 0; i < k; ++i) {
        const auto& p = dlr.partition.cylinders[best].parts[i];
        out[i] = VertexSet(p.begin(), p.begin() + best_min);
    }
    return out;
}

struct RamseyCylinderResult {
    bool ok = false;
    int achieved = 0;  // parts delivered
    std::vector<VertexSet> parts;
    double density_spread = 0.0;
    int k_used = 0;
};

// Bucket pair densities into width-1/t classes and extract a monochromatic
// clique by greedy pigeonhole; returns s parts whose pairwise densities
// differ by at most 1/t.
inline RamseyCylinderResult ramsey_uniform_cylinder(const DenseGraph& g, int s, int t, double alpha,
                                                    const CylinderOptions& opts, Rng rng, int k_cap = 64) {
    if (s < 1 || t < 1) throw std::invalid_argument("ramsey_uniform_cylinder: s, t >= 1");
    RamseyCylinderResult res;
    double k_theory = std::pow(static_cast<double>(t), static_cast<double>(t) * s);
    int k = k_cap;
    if (k_theory < k_cap) k = std::max(2, static_cast<int>(k_theory));
    k = std::max(1, std::min(k, g.n() / 2));
    // parts below 1/alpha^2 vertices cannot carry a nontrivial alpha-level
    // verdict; bail out rather than shredding the graph
    double min_chunk = std::min(1e9, 1.0 / (alpha * alpha));
    if (static_cast<double>(g.n()) / k < min_chunk) k = static_cast<int>(g.n() / min_chunk);
    if (k < 1) {
        res.ok = false;
        res.achieved = 0;
        res.k_used = 0;
        return res;
    }
    res.k_used = k;

    // the uniformity guarantee comes from bucketing below; a coarse DLR pass
    // is enough, so cap its splitting budget
    CylinderOptions copts = opts;
    copts.max_cylinders = std::min<std::size_t>(copts.max_cylinders, 2000);
    auto parts = regular_cylinder(g, k, alpha, copts, rng.stream("cyl"));

    // color pairs by density bucket
    std::vector<std::vector<int>> color(k, std::vector<int>(k, 0));
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            double d = density(g, parts[i], parts[j]);
            int c = std::min(t - 1, static_cast<int>(d * t));
            color[i][j] = color[j][i] = c;
        }

    // greedy pigeonhole: repeatedly pick the first candidate, keep its
    // largest color class; prefix-monochromatic sequence
    std::vector<int> cand(k);
    for (int i = 0; i < k; ++i) cand[i] = i;
    std::vector<std::pair<int, int>> seq;  // (part, color toward the rest)
    while (!cand.empty()) {
        int v = cand.front();
        cand.erase(cand.begin());
        if (cand.empty()) {
            seq.emplace_back(v, -1);
            break;
        }
        std::map<int, std::vector<int>> classes;
        for (int u : cand) classes[color[v][u]].push_back(u);
        int best_color = -1;
        std::size_t best_size = 0;
        for (auto& [c, members] : classes)
            if (members.size() > best_size) {
                best_size = members.size();
                best_color = c;
            }
        seq.emplace_back(v, best_color);
        cand = classes[best_color];
    }
    // majority color among the recorded ones
    std::map<int, std::vector<int>> by_color;
    for (auto [v, c] : seq)
        if (c >= 0) by_color[c].push_back(v);
    // the terminal vertex joins any class matching its edges; add it to the
    // class of the color it has toward the last recorded member if possible
    std::vector<int> chosen;
    int chosen_color = -1;
    for (auto& [c, members] : by_color)
        if (static_cast<int>(members.size()) > static_cast<int>(chosen.size())) {
            chosen = members;
            chosen_color = c;
        }
    if (!seq.empty() && seq.back().second == -1 && chosen_color >= 0) {
        int tail = seq.back().first;
        bool fits = true;
        for (int v : chosen)
            if (color[v][tail] != chosen_color) fits = false;
        if (fits) chosen.push_back(tail);
    }

    res.achieved = std::min<int>(s, static_cast<int>(chosen.size()));
    for (int i = 0; i < res.achieved; ++i) res.parts.push_back(parts[chosen[i]]);
    res.ok = res.achieved >= s;

    double lo = 2.0, hi = -1.0;
    for (std::size_t i = 0; i < res.parts.size(); ++i)
        for (std::size_t j = i + 1; j < res.parts.size(); ++j) {
            double d = density(g, res.parts[i], res.parts[j]);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    res.density_spread = res.parts.size() > 1 ? hi - lo : 0.0;
    return res;
}

namespace detail {

inline bool self_check_passes(const DenseGraph& g, const VertexSet& u, double eps,
                              const CylinderOptions& opts, Rng rng) {
    if (u.size() == 1) return true;
    if (opts.mode == CheckMode::Exhaustive) {
        if (static_cast<int>(u.size()) > opts.pair_cap) return false;  // cannot certify
        return check_pair_exhaustive(g, u, u, eps, eps, opts.pair_cap).regular;
    }
    return check_pair_sampled(g, u, u, eps, eps, opts.sampled_trials, rng).regular;
}

}  // namespace detail

// Pipeline: bucketed cylinder parts merged into one set that is eps-regular
// with itself. Candidates are tried from largest to smallest, each verified
// in the given mode; a single vertex is the guaranteed fallback.
inline VertexSet self_regular_subset(const DenseGraph& g, double eps, const CylinderOptions& opts,
                                     Rng rng) {
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("self_regular_subset: eps outside (0,1/2)");
    double alpha = (eps / 3.0) * (eps / 3.0);
    int st = std::max(2, static_cast<int>(std::ceil(2.0 / alpha)));

    // cheapest candidate first: the whole vertex set
    VertexSet whole = all_vertices(g.n());
    if (detail::self_check_passes(g, whole, eps, opts, rng.stream("verify-whole"))) return whole;

    // below this size no candidate can beat the density granularity 1/ceil(eps|U|)
    if (1.0 / (eps * eps) > static_cast<double>(g.n())) return {0};

    auto ram = ramsey_uniform_cylinder(g, st, st, alpha, opts, rng.stream("ramsey"));
    std::vector<VertexSet> candidates;
    if (ram.achieved > 1) {
        VertexSet u;
        for (const auto& p : ram.parts) u.insert(u.end(), p.begin(), p.end());
        std::sort(u.begin(), u.end());
        candidates.push_back(std::move(u));  // 3 sqrt(alpha) <= eps when the pipeline delivered
    }
    if (!ram.parts.empty()) candidates.push_back(ram.parts[0]);

    for (const auto& cand : candidates) {
        if (cand.empty()) continue;
        if (detail::self_check_passes(g, cand, eps, opts, rng.stream("verify", cand.size())))
            return cand;
    }
    return {0};  // single vertex, vacuously regular
}

struct SelfRegularBlock {
    VertexSet block;
    double claimed_eps = 0.0;  // after the two redistribution degradations
};

struct SelfRegularPartition {
    std::vector<SelfRegularBlock> blocks;
    VertexPartition partition{1, {{0}}};
};

// alpha = eps + sqrt(beta) + beta
inline double degraded_regularity(double eps, double beta) {
    if (!(eps >= 0.0 && eps < 1.0 && beta >= 0.0 && beta < 1.0))
        throw std::invalid_argument("degraded_regularity: parameters outside [0,1)");
    return eps + std::sqrt(beta) + beta;
}

// Repeatedly pull 3 eps/4-regular subsets until at most eps^2/100 of the
// vertices remain, then hand the leftovers out proportionally and account
// two degradations per touched block.
inline SelfRegularPartition self_regular_partition(const DenseGraph& g, double eps,
                                                   const CylinderOptions& opts, Rng rng) {
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("self_regular_partition: eps outside (0,1/2)");
    const int n = g.n();
    double pull_eps = 0.75 * eps;
    std::vector<char> used(n, 0);
    std::vector<VertexSet> pulled;
    int remaining = n;
    int pull_id = 0;
    while (static_cast<double>(remaining) > eps * eps / 100.0 * n) {
        // induced subgraph on the remaining vertices
        VertexSet rest;
        for (int v = 0; v < n; ++v)
            if (!used[v]) rest.push_back(v);
        DenseGraph sub(static_cast<int>(rest.size()));
        for (std::size_t a = 0; a < rest.size(); ++a)
            for (std::size_t b = a + 1; b < rest.size(); ++b)
                if (g.has_edge(rest[a], rest[b])) sub.add_edge(static_cast<int>(a), static_cast<int>(b));
        VertexSet local = self_regular_subset(sub, pull_eps, opts, rng.stream("pull", pull_id++));
        VertexSet global;
        for (int li : local) global.push_back(rest[li]);
        std::sort(global.begin(), global.end());
        for (int v : global) used[v] = 1;
        remaining -= static_cast<int>(global.size());
        pulled.push_back(std::move(global));
    }

    // leftovers proportionally, round-robin by block size order
    VertexSet leftovers;
    for (int v = 0; v < n; ++v)
        if (!used[v]) leftovers.push_back(v);
    std::vector<std::size_t> order(pulled.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pulled[a].size() > pulled[b].size(); });
    std::vector<double> added(pulled.size(), 0.0);
    std::size_t oi = 0;
    for (int v : leftovers) {
        pulled[order[oi % order.size()]].push_back(v);
        added[order[oi % order.size()]] += 1.0;
        ++oi;
    }

    SelfRegularPartition out;
    std::vector<VertexSet> blocks;
    for (std::size_t i = 0; i < pulled.size(); ++i) {
        std::sort(pulled[i].begin(), pulled[i].end());
        double base = pulled[i].size() > added[i] ? pulled[i].size() - added[i] : 1.0;
        double beta = added[i] / base;
        double claimed = pull_eps;
        // the pair picks up the new vertices on both sides
        claimed = degraded_regularity(claimed, std::min(0.999, beta));
        claimed = degraded_regularity(claimed, std::min(0.999, beta));
        out.blocks.push_back({pulled[i], claimed});
        blocks.push_back(pulled[i]);
    }
    out.partition = VertexPartition(n, std::move(blocks));
    return out;
}

// Q(K): group vertices of each ground part by the set of cylinders whose
// i-th coordinate contains them.
inline VertexPartition reduced_partition(const CylinderPartition& kp, int n) {
    std::map<std::pair<int, std::vector<char>>, VertexSet> groups;
    std::vector<char> covered(n, 0);
    for (int i = 0; i < kp.k(); ++i) {
        std::map<int, std::vector<char>> sig;
        for (int v : kp.ground[i]) sig[v] = std::vector<char>(kp.cylinders.size(), 0);
        for (std::size_t c = 0; c < kp.cylinders.size(); ++c)
            for (int v : kp.cylinders[c].parts[i]) sig[v][c] = 1;
        for (auto& [v, s] : sig) {
            groups[{i, s}].push_back(v);
            covered[v] = 1;
        }
    }
    std::vector<VertexSet> blocks;
    for (auto& [key, blk] : groups) blocks.push_back(blk);
    // vertices outside the ground (possible when the ground does not cover V)
    VertexSet rest;
    for (int v = 0; v < n; ++v)
        if (!covered[v]) rest.push_back(v);
    if (!rest.empty()) blocks.push_back(rest);
    return VertexPartition(n, std::move(blocks));
}

struct StrongCylinderOptions {
    CylinderOptions cyl;
    double gamma_floor = 0.0;  // desk floor for the per-block self-regularity level
    std::size_t max_tuples = 100000;
    int rebalance_cap = 1 << 14;
};

struct StrongCylinderResult {
    VertexPartition p{1, {{0}}};
    CylinderPartition kp;
    VertexPartition q{1, {{0}}};
    int rounds = 0;
    double q_gap = 0.0;
    double gamma_theory = 0.0, gamma_used = 0.0;
    bool singleton_escape = false;
};

// Round loop: self-regularize every block, run DLR on each block-tuple
// product at f(k), union into a strongly f(k)-regular cylinder partition,
// form Q(K), stop once q(Q) <= q(P) + eps, else rebalance and repeat.
inline StrongCylinderResult strong_cylinder_partition(const DenseGraph& g, double eps, int s,
                                                      const std::function<double(int)>& f, Rng rng,
                                                      StrongCylinderOptions opts = {}) {
    if (!(eps > 0.0 && eps < 1.0 / 3.0))
        throw std::invalid_argument("strong_cylinder_partition: eps outside (0,1/3)");
    const int n = g.n();
    StrongCylinderResult res;
    res.p = equitable_rebalance(g, VertexPartition::trivial(n), std::min(n, std::max(1, s)));

    auto singleton_escape = [&]() {
        res.singleton_escape = true;
        res.p = VertexPartition::singletons(n);
        res.kp.ground.clear();
        Cylinder full;
        for (int v = 0; v < n; ++v) {
            res.kp.ground.push_back({v});
            full.parts.push_back({v});
        }
        res.kp.cylinders = {full};
        res.q = VertexPartition::singletons(n);
        res.q_gap = 0.0;
        return res;
    };

    int max_rounds = static_cast<int>(std::ceil(2.0 / eps)) + 1;
    for (int round = 0; round < max_rounds; ++round) {
        res.rounds = round + 1;
        int k = res.p.size();
        double fk = f(k);
        if (!(fk > 0.0 && fk <= eps + 1e-12))
            throw std::invalid_argument("strong_cylinder_partition: f(k) must lie in (0, eps]");
        double beta = std::pow(fk, static_cast<double>(k) * k * std::pow(fk, -5.0));
        res.gamma_theory = fk * beta;
        res.gamma_used = std::max(res.gamma_theory, opts.gamma_floor);
        res.gamma_used = std::min(res.gamma_used, 0.49);
        if (!(res.gamma_used > 0.0)) res.gamma_used = 1e-6;

        // self-regular partition of each block
        std::vector<std::vector<VertexSet>> sub(k);
        std::size_t tuples = 1;
        bool overflow = false;
        for (int i = 0; i < k; ++i) {
            DenseGraph bg(static_cast<int>(res.p.block(i).size()));
            const auto& blk = res.p.block(i);
            for (std::size_t a = 0; a < blk.size(); ++a)
                for (std::size_t b = a + 1; b < blk.size(); ++b)
                    if (g.has_edge(blk[a], blk[b])) bg.add_edge(static_cast<int>(a), static_cast<int>(b));
            auto sp = self_regular_partition(bg, res.gamma_used, opts.cyl, rng.stream("selfreg", round * 1000 + i));
            for (const auto& sb : sp.blocks.size() ? sp.blocks : std::vector<SelfRegularBlock>{}) {
                VertexSet gl;
                for (int li : sb.block) gl.push_back(blk[li]);
                std::sort(gl.begin(), gl.end());
                sub[i].push_back(std::move(gl));
            }
            if (sub[i].empty()) sub[i].push_back(blk);
            if (tuples > opts.max_tuples / std::max<std::size_t>(1, sub[i].size())) overflow = true;
            tuples *= sub[i].size();
        }
        if (overflow || tuples > opts.max_tuples) return singleton_escape();

        // DLR per block-tuple product, union into K
        res.kp.ground.clear();
        for (int i = 0; i < k; ++i) res.kp.ground.push_back(res.p.block(i));
        res.kp.cylinders.clear();
        std::vector<std::size_t> idx(k, 0);
        CylinderOptions dopts = opts.cyl;
        dopts.strong = true;
        std::size_t tuple_id = 0;
        while (true) {
            std::vector<VertexSet> ground_t(k);
            for (int i = 0; i < k; ++i) ground_t[i] = sub[i][idx[i]];
            auto dlr = dlr_partition(g, ground_t, fk, dopts, rng.stream("dlr", round * 100000 + tuple_id));
            for (auto& c : dlr.partition.cylinders) res.kp.cylinders.push_back(std::move(c));
            ++tuple_id;
            int lev = k - 1;
            while (lev >= 0 && ++idx[lev] == sub[lev].size()) {
                idx[lev] = 0;
                --lev;
            }
            if (lev < 0) break;
            if (res.kp.cylinders.size() > opts.max_tuples) return singleton_escape();
        }

        res.q = reduced_partition(res.kp, n);
        double qq = mean_square_density(g, res.q);
        double qp = mean_square_density(g, res.p);
        res.q_gap = qq - qp;
        if (res.q_gap <= eps + 1e-12) return res;

        int target = std::min<double>(n, std::ceil(4.0 / eps) * res.q.size());
        target = std::max(target, res.q.size());
        if (target > opts.rebalance_cap || round == max_rounds - 1) return singleton_escape();
        res.p = equitable_rebalance(g, res.q, target);
    }
    return singleton_escape();
}

struct RepresentativesResult {
    bool ok = false;
    std::vector<VertexSet> w;  // W_i per ground part
    int cylinder_index = -1;
    int fail_strong = 0, fail_close = 0, fail_size = 0;  // per-condition failures
    double s_desk = 0.0;  // size denominator actually used
};

// Scans cylinders by decreasing d(K) for one that is strongly f(k)-regular,
// eps-close to P, and has every |W_i| >= |V_i| / (4 S), with S taken as the
// largest per-coordinate part multiplicity of K.
inline RepresentativesResult select_representatives(const DenseGraph& g, const VertexPartition& p,
                                                    const CylinderPartition& kp, double eps,
                                                    const std::function<double(int)>& f,
                                                    const CylinderOptions& opts, Rng rng) {
    RepresentativesResult res;
    int k = kp.k();
    if (k != p.size()) throw std::invalid_argument("select_representatives: K ground mismatch");
    double fk = f(k);

    // S at desk scale: the per-coordinate count of distinct parts
    std::size_t s_desk = 1;
    for (int i = 0; i < k; ++i) {
        std::vector<VertexSet> parts;
        for (const auto& c : kp.cylinders) parts.push_back(c.parts[i]);
        std::sort(parts.begin(), parts.end());
        parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
        s_desk = std::max(s_desk, parts.size());
    }
    res.s_desk = static_cast<double>(s_desk);

    auto dens_p = block_densities(g, p);

    std::vector<std::size_t> order(kp.cylinders.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return kp.density(a) > kp.density(b);
    });

    for (std::size_t oi : order) {
        const Cylinder& c = kp.cylinders[oi];
        bool size_ok = true;
        for (int i = 0; i < k; ++i)
            if (static_cast<double>(c.parts[i].size()) <
                static_cast<double>(kp.ground[i].size()) / (4.0 * s_desk))
                size_ok = false;
        if (!size_ok) {
            res.fail_size++;
            continue;
        }
        int bad_pairs = 0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                if (i == j) continue;
                double d = density(g, c.parts[i], c.parts[j]);
                if (std::abs(d - dens_p[i][j]) > eps) ++bad_pairs;
            }
        if (static_cast<double>(bad_pairs) > eps * static_cast<double>(k) * k) {
            res.fail_close++;
            continue;
        }
        CylinderOptions sopts = opts;
        sopts.strong = true;
        auto chk = detail::check_cylinder(g, c, fk, sopts, rng.stream("rep", oi));
        if (!chk.regular) {
            res.fail_strong++;
            continue;
        }
        res.ok = true;
        res.w = c.parts;
        res.cylinder_index = static_cast<int>(oi);
        return res;
    }
    return res;
}

}  // namespace reg
