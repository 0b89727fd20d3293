#include <catch2/catch_amalgamated.hpp>

#include "regularity/cylinder.hpp"
#include "regularity/removal.hpp"

using namespace reg;

namespace {

DenseGraph complete_bipartite(int a, int b) {
    DenseGraph g(a + b);
    for (int u = 0; u < a; ++u)
        for (int v = a; v < a + b; ++v) g.add_edge(u, v);
    return g;
}

DenseGraph two_cliques_with_strays(int half, const std::vector<std::pair<int, int>>& strays) {
    DenseGraph g(2 * half);
    for (int u = 0; u < half; ++u)
        for (int v = u + 1; v < half; ++v) g.add_edge(u, v);
    for (int u = half; u < 2 * half; ++u)
        for (int v = u + 1; v < 2 * half; ++v) g.add_edge(u, v);
    for (auto [u, v] : strays) g.add_edge(u, v);
    return g;
}

DenseGraph path3() {
    DenseGraph h(3);
    h.add_edge(0, 1);
    h.add_edge(1, 2);
    return h;
}

}  // namespace

TEST_CASE("dlr_partition on a complete bipartite ground") {
    DenseGraph g = complete_bipartite(10, 10);
    std::vector<VertexSet> ground(2);
    for (int v = 0; v < 10; ++v) ground[0].push_back(v);
    for (int v = 10; v < 20; ++v) ground[1].push_back(v);
    CylinderOptions opts;
    opts.mode = CheckMode::Exhaustive;
    auto res = dlr_partition(g, ground, 0.3, opts, Rng(1));
    CHECK(res.partition.cylinders.size() == 1);
    CHECK(res.verdict.regular_mass == 1.0);
    CHECK(res.certified);
}

TEST_CASE("dlr_partition recovers a planted 2x2 block structure") {
    // V1 = A1|A2, V2 = B1|B2; complete on the diagonal blocks, empty across
    DenseGraph g(24);
    auto in = [](int v, int lo, int hi) { return lo <= v && v < hi; };
    for (int u = 0; u < 12; ++u)
        for (int v = 12; v < 24; ++v) {
            bool diag = (in(u, 0, 6) && in(v, 12, 18)) || (in(u, 6, 12) && in(v, 18, 24));
            if (diag) g.add_edge(u, v);
        }
    std::vector<VertexSet> ground(2);
    for (int v = 0; v < 12; ++v) ground[0].push_back(v);
    for (int v = 12; v < 24; ++v) ground[1].push_back(v);
    CylinderOptions opts;
    opts.mode = CheckMode::Exhaustive;
    auto res = dlr_partition(g, ground, 0.3, opts, Rng(2));
    CHECK(res.certified);
    CHECK(res.verdict.regular_mass >= 1.0 - 0.3);
    // every regular cylinder is density-pure across its (V1, V2) parts
    for (std::size_t c = 0; c < res.partition.cylinders.size(); ++c) {
        if (!res.verdict.flags[c]) continue;
        const auto& parts = res.partition.cylinders[c].parts;
        double d = density(g, parts[0], parts[1]);
        CHECK((d == 0.0 || d == 1.0));
    }
    // mass bookkeeping is exact
    bool exact = false;
    CHECK(res.partition.mass_is_one(&exact));
    CHECK(exact);
    CHECK(res.partition.cylinders_disjoint());
}

TEST_CASE("dlr_partition certifies random cross structure exhaustively") {
    // both sides edgeless internally, random across, eps = 0.4
    Rng rng(33);
    DenseGraph g(24);
    for (int u = 0; u < 12; ++u)
        for (int v = 12; v < 24; ++v)
            if (rng.bernoulli(0.5)) g.add_edge(u, v);
    std::vector<VertexSet> ground(2);
    for (int v = 0; v < 12; ++v) ground[0].push_back(v);
    for (int v = 12; v < 24; ++v) ground[1].push_back(v);
    CylinderOptions opts;
    opts.mode = CheckMode::Exhaustive;
    auto res = dlr_partition(g, ground, 0.4, opts, Rng(3));
    CHECK(res.certified);
    CHECK(res.verdict.regular_mass >= 1.0 - 0.4 - 1e-12);
}

TEST_CASE("regular_cylinder delivers verified equal parts") {
    DenseGraph g = gnp(48, 0.5, Rng(404));
    CylinderOptions opts;
    opts.mode = CheckMode::Exhaustive;
    auto parts = regular_cylinder(g, 3, 0.35, opts, Rng(5));
    REQUIRE(parts.size() == 3);
    CHECK(parts[0].size() == parts[1].size());
    CHECK(parts[1].size() == parts[2].size());
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (std::size_t j = i + 1; j < parts.size(); ++j)
            CHECK(check_pair_exhaustive(g, parts[i], parts[j], 0.35, 0.35).regular);
}

TEST_CASE("ramsey_uniform_cylinder density buckets") {
    // complete graph: all densities 1
    auto r = ramsey_uniform_cylinder(DenseGraph::complete(24), 3, 2, 0.45, {}, Rng(6));
    CHECK(r.achieved >= 2);
    CHECK(r.density_spread <= 0.5 + 1e-12);

    // s = t = 3 on G(81, 1/2): spread <= 1/3
    DenseGraph g = gnp(81, 0.5, Rng(777));
    CylinderOptions opts;  // sampled mode
    auto r3 = ramsey_uniform_cylinder(g, 3, 3, 0.45, opts, Rng(7));
    CHECK(r3.achieved >= 2);
    CHECK(r3.density_spread <= 1.0 / 3.0 + 1e-12);
}

TEST_CASE("self_regular_subset") {
    // singleton graph
    CHECK(self_regular_subset(DenseGraph(1), 0.4, {}, Rng(1)) == VertexSet{0});

    // complete graph: the whole vertex set passes exhaustively
    CylinderOptions opts;
    opts.mode = CheckMode::Exhaustive;
    auto u = self_regular_subset(DenseGraph::complete(16), 0.45, opts, Rng(2));
    CHECK(u.size() == 16);
    CHECK(check_pair_exhaustive(DenseGraph::complete(16), u, u, 0.45, 0.45).regular);

    // G(40, 1/2): sampled-mode subset, then verify on the subset (exact when
    // it fits the cap)
    DenseGraph g = gnp(40, 0.5, Rng(999));
    auto u2 = self_regular_subset(g, 0.45, {}, Rng(3));
    REQUIRE(!u2.empty());
    if (u2.size() <= 18) {
        CHECK(check_pair_exhaustive(g, u2, u2, 0.45, 0.45).regular);
    } else {
        CHECK(check_pair_sampled(g, u2, u2, 0.45, 0.45, 512, Rng(4)).regular);
    }
}

TEST_CASE("degraded_regularity formula") {
    CHECK(degraded_regularity(0.3, 0.0) == Catch::Approx(0.3));
    CHECK(degraded_regularity(0.1, 0.04) == Catch::Approx(0.34));
    CHECK(degraded_regularity(0.2, 0.25) == Catch::Approx(0.95));
}

TEST_CASE("vertex-add degradation property") {
    // dense planted pair plus a small random attachment: the grown pair is
    // regular at the degraded level eps + sqrt(beta) + beta
    Rng rng(515);
    for (int t = 0; t < 8; ++t) {
        DenseGraph g(27);
        VertexSet a, b, c;
        for (int v = 0; v < 12; ++v) a.push_back(v);
        for (int v = 12; v < 24; ++v) b.push_back(v);
        for (int v = 24; v < 27; ++v) c.push_back(v);
        for (int u : a)
            for (int v : b) g.add_edge(u, v);
        Rng er = rng.stream("edges", t);
        for (int u : a)
            for (int v : c)
                if (er.bernoulli(0.5)) g.add_edge(u, v);
        double eps_hat = check_pair_exhaustive(g, a, b, 1.0, 0.25).max_spread;
        CHECK(eps_hat == 0.0);  // complete pair
        double beta = static_cast<double>(c.size()) / b.size();
        double alpha = degraded_regularity(eps_hat, beta);
        VertexSet bc = b;
        bc.insert(bc.end(), c.begin(), c.end());
        auto v = check_pair_exhaustive(g, a, bc, alpha, alpha);
        CHECK(v.regular);
    }

    // measured random pairs: the ported bound eps + 2 beta / alpha covers the
    // grown pair's spread whenever the base spread was measured exactly
    for (int t = 0; t < 6; ++t) {
        DenseGraph g = gnp(24, 0.5, rng.stream("g2", t));
        VertexSet a, b, c;
        for (int v = 0; v < 10; ++v) a.push_back(v);
        for (int v = 10; v < 20; ++v) b.push_back(v);
        for (int v = 20; v < 23; ++v) c.push_back(v);
        double eps_hat = check_pair_exhaustive(g, a, b, 1.0, 0.4).max_spread;
        double beta = static_cast<double>(c.size()) / b.size();
        double alpha = degraded_regularity(std::min(0.99, eps_hat), std::min(0.99, beta));
        VertexSet bc = b;
        bc.insert(bc.end(), c.begin(), c.end());
        double grown = check_pair_exhaustive(g, a, bc, 1.0, alpha).max_spread;
        CHECK(grown <= std::min(1.0, eps_hat + 2.0 * beta / alpha) + 1e-9);
    }
}

TEST_CASE("union lemma property on uniform multipartite instances") {
    // s parts, pairwise complete (spread 0 <= alpha), union checked at
    // 3 sqrt(alpha)
    int s = 32, part = 2;
    int n = s * part;
    DenseGraph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (u / part != v / part) g.add_edge(u, v);
    double alpha = 2.0 / s;  // s >= 2 / alpha, alpha <= 1/9
    double eps = 3.0 * std::sqrt(alpha);
    VertexSet u = all_vertices(n);
    // analytic extremes: any qualifying pair has density >= 1 - part/(eps n)
    double min_possible = 1.0 - static_cast<double>(part) / (eps * n);
    CHECK(1.0 - min_possible <= eps);
    // sampled verification finds no violation
    CHECK(check_pair_sampled(g, u, u, eps, eps, 2000, Rng(12)).regular);

    // the edgeless union is trivially fine
    CHECK(check_pair_sampled(DenseGraph::edgeless(n), u, u, eps, eps, 500, Rng(13)).regular);
}

TEST_CASE("merging lemma property") {
    // alpha = eps^2/4 forces complete-or-empty pairs at exhaustive scale;
    // the merged pair stays eps-regular
    double eps = 0.5, alpha = eps * eps / 4.0;
    DenseGraph g(16);
    VertexSet a{0, 1, 2, 3};
    std::vector<VertexSet> bs = {{4, 5, 6, 7}, {8, 9, 10, 11}, {12, 13, 14, 15}};
    for (const auto& b : bs)
        for (int u : a)
            for (int v : b) g.add_edge(u, v);
    for (const auto& b : bs) CHECK(check_pair_exhaustive(g, a, b, alpha, alpha).regular);
    VertexSet all_b;
    for (const auto& b : bs) all_b.insert(all_b.end(), b.begin(), b.end());
    CHECK(check_pair_exhaustive(g, a, all_b, eps, eps).regular);

    // sampled variant at a substantive scale: random pairs with equal
    // densities, merged pair shows no violation at eps
    Rng rng(616);
    DenseGraph g2(160);
    VertexSet a2;
    for (int v = 0; v < 40; ++v) a2.push_back(v);
    std::vector<VertexSet> b2(3);
    for (int i = 0; i < 3; ++i)
        for (int v = 40 + 40 * i; v < 80 + 40 * i; ++v) b2[i].push_back(v);
    for (const auto& b : b2)
        for (int u : a2)
            for (int v : b)
                if (rng.bernoulli(0.5)) g2.add_edge(u, v);
    VertexSet merged;
    for (const auto& b : b2) merged.insert(merged.end(), b.begin(), b.end());
    CHECK(check_pair_sampled(g2, a2, merged, 0.5, 0.5, 1500, Rng(17)).regular);
}

TEST_CASE("reduced_partition") {
    // single cylinder with W_i = V_i: Q is the ground partition
    CylinderPartition kp;
    kp.ground = {{0, 1, 2}, {3, 4, 5}};
    Cylinder full;
    full.parts = kp.ground;
    kp.cylinders = {full};
    auto q = reduced_partition(kp, 6);
    CHECK(q.size() == 2);

    // k = 1 with two cylinders splitting V_1
    CylinderPartition kp2;
    kp2.ground = {{0, 1, 2, 3}};
    Cylinder c1, c2;
    c1.parts = {{0, 1}};
    c2.parts = {{2, 3}};
    kp2.cylinders = {c1, c2};
    auto q2 = reduced_partition(kp2, 4);
    CHECK(q2.size() == 2);
    CHECK(q2.same_blocks(VertexPartition(4, {{0, 1}, {2, 3}})));

    // planted 2x2: four blocks
    CylinderPartition kp3;
    kp3.ground = {{0, 1, 2, 3}, {4, 5, 6, 7}};
    Cylinder d1, d2, d3, d4;
    d1.parts = {{0, 1}, {4, 5}};
    d2.parts = {{0, 1}, {6, 7}};
    d3.parts = {{2, 3}, {4, 5}};
    d4.parts = {{2, 3}, {6, 7}};
    kp3.cylinders = {d1, d2, d3, d4};
    auto q3 = reduced_partition(kp3, 8);
    CHECK(q3.size() == 4);
}

TEST_CASE("strong_cylinder_partition invariants") {
    for (auto [name, graph] : std::vector<std::pair<std::string, DenseGraph>>{
             {"complete", DenseGraph::complete(20)},
             {"edgeless", DenseGraph::edgeless(20)},
             {"gnp64", gnp(64, 0.5, Rng(42))}}) {
        INFO(name);
        double eps = 0.3;
        auto f = [eps](int k) { return std::min(eps, 1.0 / k); };
        auto res = strong_cylinder_partition(graph, eps, 2, f, Rng(9));
        CHECK(res.q.refines(res.p));
        double qp = mean_square_density(graph, res.p);
        double qq = mean_square_density(graph, res.q);
        CHECK(qq <= qp + eps + 1e-12);
        CHECK(res.rounds <= 2.0 / eps + 1);
        CHECK(res.kp.mass_is_one());
        CHECK(res.kp.cylinders_disjoint());
    }
}

TEST_CASE("cylinder closeness follows a small q gap") {
    // whenever q(Q(K)) <= q(P) + eps', the weighted closeness sum stays
    // below the eps = 2^{1/3} eps'^{1/6} budget
    DenseGraph g = gnp(48, 0.5, Rng(2025));
    double eps = 0.3;
    auto f = [eps](int k) { return std::min(eps, 1.0 / k); };
    StrongCylinderOptions opts;
    opts.gamma_floor = 0.45;
    auto res = strong_cylinder_partition(g, eps, 2, f, Rng(10), opts);
    double qp = mean_square_density(g, res.p);
    double qq = mean_square_density(g, res.q);
    REQUIRE(qq <= qp + eps + 1e-12);
    double close_eps = std::pow(2.0, 1.0 / 3.0) * std::pow(eps, 1.0 / 6.0);
    // direct computation of the closeness sum
    auto dens = block_densities(g, res.p);
    int k = res.p.size();
    double bad_mass = 0.0;
    for (std::size_t c = 0; c < res.kp.cylinders.size(); ++c) {
        const auto& parts = res.kp.cylinders[c].parts;
        int bad = 0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                if (i == j) continue;
                if (std::abs(density(g, parts[i], parts[j]) - dens[i][j]) > close_eps) ++bad;
            }
        if (bad > close_eps * k * k) bad_mass += res.kp.density(c);
    }
    CHECK(bad_mass <= close_eps + 1e-9);
}

TEST_CASE("select_representatives") {
    // complete graph: any cylinder qualifies
    DenseGraph g = DenseGraph::complete(24);
    double eps = 0.3;
    auto f = [eps](int k) { return std::min(eps, 1.0 / k); };
    StrongCylinderOptions opts;
    opts.gamma_floor = 0.45;
    auto scp = strong_cylinder_partition(g, eps, 2, f, Rng(11), opts);
    auto reps = select_representatives(g, scp.p, scp.kp, eps, f, opts.cyl, Rng(12));
    REQUIRE(reps.ok);
    CHECK(static_cast<int>(reps.w.size()) == scp.p.size());

    // G(64, 1/2) continuation: all three conditions re-verified
    DenseGraph g2 = gnp(64, 0.5, Rng(42));
    auto scp2 = strong_cylinder_partition(g2, eps, 2, f, Rng(13), opts);
    auto reps2 = select_representatives(g2, scp2.p, scp2.kp, eps, f, opts.cyl, Rng(14));
    if (reps2.ok) {
        auto dens = block_densities(g2, scp2.p);
        int k = scp2.p.size();
        int bad = 0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (i != j && std::abs(density(g2, reps2.w[i], reps2.w[j]) - dens[i][j]) > eps) ++bad;
        CHECK(static_cast<double>(bad) <= eps * k * k);
        for (int i = 0; i < k; ++i)
            CHECK(static_cast<double>(reps2.w[i].size()) >=
                  static_cast<double>(scp2.kp.ground[i].size()) / (4.0 * reps2.s_desk));
    }
}

TEST_CASE("induced_removal") {
    DenseGraph p3 = path3();

    // edgeless graph: already induced-free of any pattern with an edge
    auto r0 = induced_removal(DenseGraph::edgeless(20), p3, 0.3, Rng(1));
    CHECK(r0.ok);
    CHECK(r0.already_free);
    CHECK(r0.edits.count() == 0);

    // complete graph vs the independent triple: no induced copies
    DenseGraph indep(3);
    auto r1 = induced_removal(DenseGraph::complete(20), indep, 0.3, Rng(2));
    CHECK(r1.ok);
    CHECK(r1.already_free);

    // two cliques of 24 joined by 3 stray edges: edits remove the strays
    DenseGraph g = two_cliques_with_strays(24, {{0, 24}, {5, 30}, {12, 40}});
    auto res = induced_removal(g, p3, 0.3, Rng(3));
    REQUIRE(res.ok);
    CHECK_FALSE(res.certificate);
    CHECK(res.copies_before > 0);
    CHECK(res.copies_after == 0);
    CHECK(static_cast<double>(res.edits.count()) <= 0.3 * 48.0 * 48.0);
    auto edited = res.edits.apply(g);
    std::vector<VertexSet> full(3, all_vertices(48));
    CHECK(count_induced(edited, p3, full) == 0);
}

TEST_CASE("sampling_tester") {
    DenseGraph p3 = path3();
    // induced-free graphs always accepted
    auto acc = sampling_tester(DenseGraph::complete(20), p3, 0.2, Rng(5));
    CHECK(acc.accept);

    // complete G vs H = triangle: every distinct tuple induces
    DenseGraph tri(3);
    tri.add_edge(0, 1);
    tri.add_edge(1, 2);
    tri.add_edge(0, 2);
    int rejects = 0;
    for (int t = 0; t < 50; ++t)
        if (!sampling_tester(DenseGraph::complete(30), tri, 0.5, Rng(100 + t)).accept) ++rejects;
    CHECK(rejects == 50);

    // planted copies at fraction >= 2 delta: rejection rate >= 2/3
    // G: disjoint triangles plus isolated vertices; H = triangle
    DenseGraph g(12);
    for (int b = 0; b < 4; ++b) {
        g.add_edge(3 * b, 3 * b + 1);
        g.add_edge(3 * b + 1, 3 * b + 2);
        g.add_edge(3 * b, 3 * b + 2);
    }
    // triangle tuple fraction: 4 triangles * 6 orderings / 12^3 = 24/1728
    double frac = 24.0 / 1728.0;
    double delta = frac / 2.0;
    int rej = 0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t)
        if (!sampling_tester(g, tri, delta, Rng(5000 + t)).accept) ++rej;
    CHECK(rej >= trials * 2 / 3);
}
