// Command-line surface for the regularity toolkit: generators, partitioners,
// verifiers, removal, and report plumbing. Every run prints a JSON summary
// with a manifest (command, seed, parameters, file digests) to stdout.
//
// Exit codes: 0 success, 1 domain error, 2 verification failure,
// 3 retry exhaustion, 64 usage errors.

#include <chrono>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "regularity/certify.hpp"
#include "regularity/concentration.hpp"
#include "regularity/cylinder.hpp"
#include "regularity/graph.hpp"
#include "regularity/io.hpp"
#include "regularity/lower_bounds.hpp"
#include "regularity/partition.hpp"
#include "regularity/quasirandom.hpp"
#include "regularity/regular_approx.hpp"
#include "regularity/removal.hpp"
#include "regularity/serialize.hpp"
#include "regularity/tower.hpp"
#include "regularity/version.hpp"
#include "regularity/weak_regularity.hpp"

using json = nlohmann::json;
using namespace reg;

namespace {

struct Manifest {
    json inputs = json::object();
    json outputs = json::object();
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    std::string read(const std::string& path) {
        std::string content = read_file(path);
        inputs[path] = fnv1a_digest(content);
        return content;
    }
    void write(const std::string& path, const std::string& content) {
        write_file(path, content);
        outputs[path] = fnv1a_digest(content);
    }

    void emit(const std::string& command, std::uint64_t seed, json params, json result) {
        json out;
        out["schema"] = 1;
        out["version"] = kVersion;
        out["command"] = command;
        out["seed"] = seed;
        out["params"] = std::move(params);
        out["inputs"] = inputs;
        out["outputs"] = outputs;
        out["result"] = std::move(result);
        out["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        std::cout << out.dump(2) << std::endl;
    }
};

DenseGraph load_graph_m(Manifest& m, const std::string& path) {
    std::istringstream in(m.read(path));
    return graph_from_stream(in);
}

VertexPartition load_partition_m(Manifest& m, const std::string& path, int n) {
    std::istringstream in(m.read(path));
    return partition_from_stream(in, n);
}

VertexSet parse_ids(const std::string& s) {
    VertexSet out;
    std::istringstream in(s);
    int v;
    while (in >> v) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

json partition_summary(const VertexPartition& p) {
    json j;
    j["blocks"] = p.size();
    j["equitable"] = p.equitable();
    return j;
}

json witness_json(const PairVerdict& v) {
    json j;
    j["mode"] = to_string(v.mode);
    j["regular"] = v.regular;
    j["max_spread"] = v.max_spread;
    j["pairs_examined"] = v.pairs_examined;
    if (v.witness) {
        j["witness"] = {{"x_hi", v.witness->x_hi}, {"y_hi", v.witness->y_hi},
                        {"d_hi", v.witness->d_hi},  {"x_lo", v.witness->x_lo},
                        {"y_lo", v.witness->y_lo},  {"d_lo", v.witness->d_lo}};
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph regularity toolkit"};
    app.require_subcommand(1);
    std::uint64_t seed = 0;
    int threads = 1;
    app.add_option("--seed", seed, "root random seed")->capture_default_str();
    app.add_option("--threads", threads, "worker threads for pair sweeps")->capture_default_str();

    Manifest man;

    // ------------------------------------------------------------------ gen
    auto* gen = app.add_subcommand("gen", "instance generators");
    gen->require_subcommand(1);

    auto* gen_half = gen->add_subcommand("half-graph", "half-graph on 2n vertices");
    int hg_n = 4;
    std::string hg_out = "half.graph";
    gen_half->add_option("--n", hg_n)->required();
    gen_half->add_option("--out", hg_out)->capture_default_str();
    gen_half->callback([&] {
        auto g = half_graph(hg_n);
        man.write(hg_out, graph_to_string(g));
        man.emit("gen half-graph", seed, {{"n", hg_n}}, {{"n", g.n()}, {"edges", g.edge_count()}});
    });

    auto* gen_int = gen->add_subcommand("intervals", "interval partition file");
    int in_n = 16, in_k = 4;
    std::string in_out = "intervals.partition";
    gen_int->add_option("--n", in_n)->required();
    gen_int->add_option("--k", in_k)->required();
    gen_int->add_option("--out", in_out)->capture_default_str();
    gen_int->callback([&] {
        auto p = VertexPartition::intervals(in_n, in_k);
        man.write(in_out, partition_to_string(p));
        man.emit("gen intervals", seed, {{"n", in_n}, {"k", in_k}}, partition_summary(p));
    });

    auto* gen_gnp = gen->add_subcommand("gnp", "Erdos-Renyi G(n, p)");
    int gnp_n = 32;
    double gnp_p = 0.5;
    std::string gnp_out = "gnp.graph";
    gen_gnp->add_option("--n", gnp_n)->required();
    gen_gnp->add_option("--p", gnp_p)->required();
    gen_gnp->add_option("--out", gnp_out)->capture_default_str();
    gen_gnp->callback([&] {
        auto g = gnp(gnp_n, gnp_p, Rng(seed));
        man.write(gnp_out, graph_to_string(g));
        man.emit("gen gnp", seed, {{"n", gnp_n}, {"p", gnp_p}},
                 {{"n", g.n()}, {"edges", g.edge_count()}});
    });

    auto* gen_gowers = gen->add_subcommand("gowers", "nested-partition construction");
    GowersParams gp;
    std::vector<double> gp_p;
    std::string gowers_out = "gowers";
    gen_gowers->add_option("--m1", gp.m1)->required();
    gen_gowers->add_option("--s", gp.s)->required();
    gen_gowers->add_option("--p", gp_p, "per-level edge probabilities")->required();
    gen_gowers->add_option("--cap-a", gp.a_cap)->capture_default_str();
    gen_gowers->add_option("--bottom", gp.bottom_block)->capture_default_str();
    gen_gowers->add_option("--mu", gp.family_mu)->capture_default_str();
    gen_gowers->add_option("--retries", gp.retries)->capture_default_str();
    gen_gowers->add_option("--out", gowers_out, "output prefix")->capture_default_str();
    gen_gowers->callback([&] {
        gp.p = gp_p;
        gp.seed = seed;
        auto inst = gowers_graph(gp);
        man.write(gowers_out + ".graph", graph_to_string(inst.graph));
        json side;
        side["m"] = inst.m;
        side["a"] = inst.a;
        side["nu"] = inst.diag.nu;
        side["nu_meaningful"] = inst.diag.nu_meaningful;
        side["attempts"] = inst.diag.attempts;
        side["pass"] = inst.diag.pass;
        json parts = json::array();
        for (const auto& p : inst.partitions) {
            json blocks = json::array();
            for (const auto& b : p.blocks()) blocks.push_back(b);
            parts.push_back(blocks);
        }
        side["partitions"] = parts;
        json levels = json::array();
        for (const auto& d : inst.diag.levels)
            levels.push_back({{"degree_ok", d.degree_ok},
                              {"codegree_ok", d.codegree_ok},
                              {"fresh_edges", d.fresh_edges},
                              {"fresh_edges_ok", d.fresh_edges_ok},
                              {"union_density_ok", d.union_density_ok},
                              {"cross_density_ok", d.cross_density_ok},
                              {"discrepancy_ok", d.discrepancy_ok},
                              {"energy_increment_ok", d.energy_increment_ok},
                              {"q_this", d.q_this},
                              {"q_next", d.q_next}});
        side["diagnostics"] = levels;
        man.write(gowers_out + ".json", json(side).dump(2));
        man.emit("gen gowers", seed,
                 {{"m1", gp.m1}, {"s", gp.s}, {"p", gp_p}, {"cap_a", gp.a_cap}, {"mu", gp.family_mu}},
                 {{"n", inst.n}, {"edges", inst.graph.edge_count()}, {"pass", inst.diag.pass}});
        if (!inst.diag.pass) std::exit(3);
    });

    auto* gen_slb = gen->add_subcommand("strong-lb", "strong-lower-bound schedule + instance");
    double slb_eps = 0.0078125;
    double slb_fconst = 0.0;
    StrongLbCaps slb_caps;
    std::string slb_out = "stronglb";
    gen_slb->add_option("--eps", slb_eps)->required();
    gen_slb->add_option("--f-const", slb_fconst, "constant value of f; default 2^-100 eps^6");
    gen_slb->add_option("--levels", slb_caps.levels)->capture_default_str();
    gen_slb->add_option("--m1", slb_caps.m1)->capture_default_str();
    gen_slb->add_option("--cap-a", slb_caps.a_cap)->capture_default_str();
    gen_slb->add_option("--out", slb_out)->capture_default_str();
    gen_slb->callback([&] {
        double fc = slb_fconst > 0 ? slb_fconst : std::ldexp(1.0, -100) * std::pow(slb_eps, 6.0);
        auto res = strong_lb_graph(slb_eps, [fc](double) { return fc; }, slb_caps, seed);
        man.write(slb_out + ".graph", graph_to_string(res.instance.graph));
        json side;
        side["t"] = res.t;
        side["m1_theory"] = res.m1_theory;
        json rows = json::array();
        for (const auto& r : res.schedule)
            rows.push_back({{"level", r.level},
                            {"step", r.step},
                            {"log2_m", r.log2_m},
                            {"m_finite", r.m_finite},
                            {"p", r.p},
                            {"eps_level", r.eps_level}});
        side["schedule"] = rows;
        side["instance_pass"] = res.instance.diag.pass;
        man.write(slb_out + ".json", json(side).dump(2));
        man.emit("gen strong-lb", seed, {{"eps", slb_eps}, {"f_const", fc}},
                 {{"t", res.t}, {"schedule_rows", res.schedule.size()},
                  {"instance_pass", res.instance.diag.pass}});
    });

    auto* gen_wlb = gen->add_subcommand("weak-lb", "weighted weak-regularity lower bound");
    WeakLBParams wp;
    bool wlb_realize = false;
    std::string wlb_out = "weaklb";
    gen_wlb->add_option("--n", wp.n)->required();
    gen_wlb->add_option("--r", wp.r)->required();
    gen_wlb->add_option("--alpha", wp.alpha)->required();
    gen_wlb->add_flag("--realize", wlb_realize, "also emit a Bernoulli realization");
    gen_wlb->add_option("--out", wlb_out)->capture_default_str();
    gen_wlb->callback([&] {
        wp.seed = seed;
        auto inst = weak_lb_weights(wp);
        man.write(wlb_out + ".weights", weights_to_string(inst.w));
        auto rep = weak_lb_diagnostics(inst);
        json side;
        side["extreme_fraction"] = rep.extreme_fraction;
        side["extreme_chernoff_bound"] = rep.extreme_chernoff_bound;
        side["nice_count"] = rep.nice_count;
        side["very_nice_count"] = rep.very_nice_count;
        json cuts = json::array();
        for (int i = 0; i < wp.r; ++i) {
            VertexSet u0, v0;
            for (int v = 0; v < wp.n; ++v) {
                if (inst.cuts.u_side0[i].test(v)) u0.push_back(v);
                if (inst.cuts.v_side0[i].test(v)) v0.push_back(v);
            }
            cuts.push_back({{"u0", u0}, {"v0", v0}});
        }
        side["cuts"] = cuts;
        man.write(wlb_out + ".json", json(side).dump(2));
        if (wlb_realize) {
            auto g = realize_bernoulli(inst.w, Rng(seed).stream("realize"));
            man.write(wlb_out + ".graph", graph_to_string(g));
        }
        man.emit("gen weak-lb", seed, {{"n", wp.n}, {"r", wp.r}, {"alpha", wp.alpha}},
                 {{"extreme_fraction", rep.extreme_fraction}, {"nice", rep.nice_count}});
    });

    // ------------------------------------------------------------ partition
    auto* part = app.add_subcommand("partition", "regularity partitioners");
    part->require_subcommand(1);

    auto* pweak = part->add_subcommand("weak", "weak regular partition by energy increment");
    std::string pw_graph, pw_out = "weak.partition", pw_report;
    double pw_eps = 0.2;
    bool pw_exact = false;
    int pw_s = 1;
    pweak->add_option("--graph", pw_graph)->required();
    pweak->add_option("--eps", pw_eps)->required();
    pweak->add_option("--s", pw_s)->capture_default_str();
    pweak->add_flag("--exact", pw_exact);
    pweak->add_option("--out-partition", pw_out)->capture_default_str();
    pweak->add_option("--report", pw_report, "also write the JSON summary here");
    pweak->callback([&] {
        auto g = load_graph_m(man, pw_graph);
        auto res = fk_partition(g, pw_eps, pw_exact ? WitnessMode::Exact : WitnessMode::Heuristic,
                                Rng(seed), pw_s);
        man.write(pw_out, partition_to_string(res.partition.canonical()));
        json r = partition_summary(res.partition);
        r["rounds"] = res.rounds;
        r["certified"] = res.certified;
        json hist = json::array();
        for (auto [round, value] : res.defect_history) hist.push_back({{"round", round}, {"defect", value}});
        r["defect_history"] = hist;
        if (!pw_report.empty()) man.write(pw_report, json(r).dump(2));
        man.emit("partition weak", seed, {{"eps", pw_eps}, {"exact", pw_exact}, {"s", pw_s}}, r);
    });

    auto* ptao = part->add_subcommand("tao", "two-level refinement");
    std::string pt_graph, pt_coarse = "tao_p.partition", pt_fine = "tao_q.partition";
    double pt_eps = 0.2, pt_delta_c = 0.2;
    int pt_s = 2;
    bool pt_exact = false;
    ptao->add_option("--graph", pt_graph)->required();
    ptao->add_option("--eps", pt_eps)->required();
    ptao->add_option("--s", pt_s)->capture_default_str();
    ptao->add_option("--delta-c", pt_delta_c, "delta(t) = C / t")->capture_default_str();
    ptao->add_flag("--exact", pt_exact);
    ptao->add_option("--out-coarse", pt_coarse)->capture_default_str();
    ptao->add_option("--out-fine", pt_fine)->capture_default_str();
    ptao->callback([&] {
        auto g = load_graph_m(man, pt_graph);
        double c = pt_delta_c;
        auto res = tao_partition(g, pt_eps, pt_s, [c](int t) { return c / t; },
                                 pt_exact ? WitnessMode::Exact : WitnessMode::Heuristic, Rng(seed));
        man.write(pt_coarse, partition_to_string(res.p.canonical()));
        man.write(pt_fine, partition_to_string(res.q.canonical()));
        man.emit("partition tao", seed,
                 {{"eps", pt_eps}, {"s", pt_s}, {"delta_c", pt_delta_c}, {"exact", pt_exact}},
                 {{"t", res.t},
                  {"fine_blocks", res.q.size()},
                  {"energy_gap", res.energy_gap},
                  {"outer_rounds", res.outer_rounds},
                  {"delta_used", res.delta_used},
                  {"certified", res.certified}});
    });

    auto* psz = part->add_subcommand("szemeredi", "partition with irregular-pair report");
    std::string ps_graph, ps_out = "szemeredi.partition";
    RegularityParams ps_params;
    bool ps_exact = false;
    psz->add_option("--graph", ps_graph)->required();
    psz->add_option("--eps", ps_params.eps)->required();
    psz->add_option("--delta", ps_params.delta)->required();
    psz->add_option("--eta", ps_params.eta)->required();
    psz->add_flag("--exact", ps_exact);
    psz->add_option("--out-partition", ps_out)->capture_default_str();
    psz->callback([&] {
        auto g = load_graph_m(man, ps_graph);
        auto res = szemeredi_partition(g, ps_params, ps_exact ? WitnessMode::Exact : WitnessMode::Heuristic,
                                       Rng(seed), threads);
        man.write(ps_out, partition_to_string(res.partition.canonical()));
        json r = partition_summary(res.partition);
        r["irregular_ordered_pairs"] = res.report.irregular_ordered_pairs;
        r["eta_budget"] = res.eta_budget;
        r["mode"] = to_string(res.report.mode);
        man.emit("partition szemeredi", seed,
                 {{"eps", ps_params.eps}, {"delta", ps_params.delta}, {"eta", ps_params.eta}}, r);
        if (res.report.irregular_ordered_pairs > res.eta_budget) std::exit(2);
    });

    auto* papx = part->add_subcommand("approx", "regular approximation by pair regularization");
    std::string pa_graph, pa_edits = "approx.edits", pa_out = "approx.partition";
    double pa_eps = 0.2, pa_g = 0.3;
    int pa_s = 2;
    papx->add_option("--graph", pa_graph)->required();
    papx->add_option("--eps", pa_eps)->required();
    papx->add_option("--s", pa_s)->capture_default_str();
    papx->add_option("--g", pa_g, "constant g")->capture_default_str();
    papx->add_option("--out-edits", pa_edits)->capture_default_str();
    papx->add_option("--out-partition", pa_out)->capture_default_str();
    papx->callback([&] {
        auto g = load_graph_m(man, pa_graph);
        auto res = regular_approximation(g, pa_eps, pa_s, GFunction::constant(pa_g), Rng(seed),
                                         WitnessMode::Auto, threads);
        man.write(pa_edits, editset_to_string(res.edits));
        man.write(pa_out, partition_to_string(res.partition.canonical()));
        man.emit("partition approx", seed, {{"eps", pa_eps}, {"s", pa_s}, {"g", pa_g}},
                 {{"ok", res.ok},
                  {"edits", res.edits.count()},
                  {"edit_budget", res.edit_budget},
                  {"degenerate_scale", res.degenerate_scale},
                  {"blocks", res.partition.size()},
                  {"failed_pair", res.failed_pair}});
        if (!res.ok) std::exit(3);
    });

    auto* psc = part->add_subcommand("strong-cylinder", "strong cylinder regularity");
    std::string sc_graph, sc_cyl = "strong.cylinders", sc_p = "strong_p.partition",
                sc_q = "strong_q.partition";
    double sc_eps = 0.3, sc_f = 0.25, sc_gamma = 0.45;
    int sc_s = 2;
    psc->add_option("--graph", sc_graph)->required();
    psc->add_option("--eps", sc_eps)->required();
    psc->add_option("--s", sc_s)->capture_default_str();
    psc->add_option("--f-const", sc_f, "constant f; clamped into (0, eps]")->capture_default_str();
    psc->add_option("--gamma-floor", sc_gamma)->capture_default_str();
    psc->add_option("--out-cylinders", sc_cyl)->capture_default_str();
    psc->add_option("--out-p", sc_p)->capture_default_str();
    psc->add_option("--out-q", sc_q)->capture_default_str();
    psc->callback([&] {
        auto g = load_graph_m(man, sc_graph);
        StrongCylinderOptions opts;
        opts.gamma_floor = sc_gamma;
        double f = std::min(sc_f, sc_eps);
        auto res = strong_cylinder_partition(g, sc_eps, sc_s, [f](int) { return f; }, Rng(seed), opts);
        man.write(sc_cyl, cylinders_to_string(res.kp));
        man.write(sc_p, partition_to_string(res.p.canonical()));
        man.write(sc_q, partition_to_string(res.q.canonical()));
        man.emit("partition strong-cylinder", seed,
                 {{"eps", sc_eps}, {"s", sc_s}, {"f_const", f}, {"gamma_floor", sc_gamma}},
                 {{"p_blocks", res.p.size()},
                  {"q_blocks", res.q.size()},
                  {"cylinders", res.kp.cylinders.size()},
                  {"rounds", res.rounds},
                  {"q_gap", res.q_gap},
                  {"singleton_escape", res.singleton_escape}});
    });

    // --------------------------------------------------------------- verify
    auto* ver = app.add_subcommand("verify", "certified checks");
    ver->require_subcommand(1);

    auto* vweak = ver->add_subcommand("weak", "weak regularity of a partition");
    std::string vw_graph, vw_part;
    double vw_eps = 0.2;
    bool vw_exact = false;
    vweak->add_option("--graph", vw_graph)->required();
    vweak->add_option("--partition", vw_part)->required();
    vweak->add_option("--eps", vw_eps)->required();
    vweak->add_flag("--exact", vw_exact);
    vweak->callback([&] {
        auto g = load_graph_m(man, vw_graph);
        auto p = load_partition_m(man, vw_part, g.n());
        auto res = check_weak_partition(g, p, vw_eps, vw_exact, Rng(seed));
        man.emit("verify weak", seed, {{"eps", vw_eps}, {"exact", vw_exact}},
                 {{"ok", res.ok},
                  {"cut_value", res.cut.value},
                  {"threshold", res.threshold},
                  {"arg_a", res.cut.argA},
                  {"arg_b", res.cut.argB},
                  {"exact_norm", res.cut.exact}});
        if (!res.ok) std::exit(2);
    });

    auto* vpair = ver->add_subcommand("pair", "regularity of a vertex-set pair");
    std::string vp_graph, vp_x, vp_y, vp_mode = "exhaustive";
    double vp_eps = 0.25, vp_delta = 0.25;
    int vp_trials = 256;
    vpair->add_option("--graph", vp_graph)->required();
    vpair->add_option("--x", vp_x, "space-separated vertex ids")->required();
    vpair->add_option("--y", vp_y)->required();
    vpair->add_option("--eps", vp_eps)->required();
    vpair->add_option("--delta", vp_delta)->required();
    vpair->add_option("--mode", vp_mode)->check(CLI::IsMember({"exhaustive", "sampled"}));
    vpair->add_option("--trials", vp_trials)->capture_default_str();
    vpair->callback([&] {
        auto g = load_graph_m(man, vp_graph);
        auto x = parse_ids(vp_x), y = parse_ids(vp_y);
        PairVerdict v = vp_mode == "exhaustive"
                            ? check_pair_exhaustive(g, x, y, vp_eps, vp_delta)
                            : check_pair_sampled(g, x, y, vp_eps, vp_delta, vp_trials, Rng(seed));
        man.emit("verify pair", seed,
                 {{"eps", vp_eps}, {"delta", vp_delta}, {"mode", vp_mode}, {"trials", vp_trials}},
                 witness_json(v));
        if (!v.regular) std::exit(2);
    });

    auto* virr = ver->add_subcommand("irregular-pairs", "count irregular ordered block pairs");
    std::string vi_graph, vi_part, vi_mode = "exhaustive";
    double vi_eps = 0.25, vi_delta = 0.25;
    int vi_trials = 256;
    virr->add_option("--graph", vi_graph)->required();
    virr->add_option("--partition", vi_part)->required();
    virr->add_option("--eps", vi_eps)->required();
    virr->add_option("--delta", vi_delta)->required();
    virr->add_option("--mode", vi_mode)->check(CLI::IsMember({"exhaustive", "sampled"}));
    virr->add_option("--trials", vi_trials)->capture_default_str();
    virr->callback([&] {
        auto g = load_graph_m(man, vi_graph);
        auto p = load_partition_m(man, vi_part, g.n());
        auto rep = count_irregular_pairs(g, p, vi_eps, vi_delta,
                                         vi_mode == "exhaustive" ? CheckMode::Exhaustive : CheckMode::Sampled,
                                         Rng(seed), vi_trials, threads);
        json pairs = json::array();
        for (auto [i, j] : rep.irregular) pairs.push_back({i, j});
        man.emit("verify irregular-pairs", seed,
                 {{"eps", vi_eps}, {"delta", vi_delta}, {"mode", vi_mode}},
                 {{"irregular_ordered_pairs", rep.irregular_ordered_pairs},
                  {"pairs_checked", rep.pairs_checked},
                  {"irregular", pairs}});
    });

    auto* vq = ver->add_subcommand("quasirandom", "4-walk mixing certificate");
    std::string vq_graph;
    int vq_samples = 1000;
    vq->add_option("--graph", vq_graph)->required();
    vq->add_option("--samples", vq_samples, "random (S,T) pairs to spot-check")->capture_default_str();
    vq->callback([&] {
        auto g = load_graph_m(man, vq_graph);
        auto c = quasirandom_certificate(g);
        Rng rng(seed);
        int violations = 0;
        for (int t = 0; t < vq_samples; ++t) {
            int a = 1 + rng.below_int(g.n()), b = 1 + rng.below_int(g.n());
            auto S = sample_without_replacement(rng, g.n(), a);
            auto T = sample_without_replacement(rng, g.n(), b);
            double e = static_cast<double>(edge_pairs(g, S, T));
            double expect = c.avg_degree * a * b / g.n();
            if (std::abs(e - expect) >= c.mixing_bound(a, b) + 1e-9) ++violations;
        }
        man.emit("verify quasirandom", seed, {{"samples", vq_samples}},
                 {{"n", c.n},
                  {"avg_degree", c.avg_degree},
                  {"walk4", c.walk4},
                  {"alpha", c.alpha},
                  {"lambda", c.lambda},
                  {"violations", violations}});
        if (violations > 0) std::exit(2);
    });

    auto* vclose = ver->add_subcommand("closeness", "refinement density closeness");
    std::string vc_graph, vc_coarse, vc_fine;
    double vc_eps = 0.1;
    vclose->add_option("--graph", vc_graph)->required();
    vclose->add_option("--coarse", vc_coarse)->required();
    vclose->add_option("--fine", vc_fine)->required();
    vclose->add_option("--eps", vc_eps)->required();
    vclose->callback([&] {
        auto g = load_graph_m(man, vc_graph);
        auto a = load_partition_m(man, vc_coarse, g.n());
        auto b = load_partition_m(man, vc_fine, g.n());
        auto rep = partition_closeness(g, a, b, vc_eps);
        man.emit("verify closeness", seed, {{"eps", vc_eps}},
                 {{"close", rep.close},
                  {"bad_coarse_pairs", rep.bad_coarse_pairs},
                  {"coarse_pairs", rep.coarse_pairs}});
        if (!rep.close) std::exit(2);
    });

    // -------------------------------------------------------------- removal
    auto* rem = app.add_subcommand("removal", "induced-pattern removal and testing");
    rem->require_subcommand(1);

    auto* rind = rem->add_subcommand("induced", "edit to an induced-H-free graph");
    std::string ri_graph, ri_pattern, ri_edits = "removal.edits";
    double ri_eps = 0.3;
    rind->add_option("--graph", ri_graph)->required();
    rind->add_option("--pattern", ri_pattern)->required();
    rind->add_option("--eps", ri_eps)->required();
    rind->add_option("--out-edits", ri_edits)->capture_default_str();
    rind->callback([&] {
        auto g = load_graph_m(man, ri_graph);
        auto h = load_graph_m(man, ri_pattern);
        auto res = induced_removal(g, h, ri_eps, Rng(seed));
        man.write(ri_edits, editset_to_string(res.edits));
        man.emit("removal induced", seed, {{"eps", ri_eps}},
                 {{"ok", res.ok},
                  {"already_free", res.already_free},
                  {"certificate", res.certificate},
                  {"edits", res.edits.count()},
                  {"copies_before", res.copies_before},
                  {"copies_after", res.copies_after},
                  {"counting_threshold", res.counting_threshold},
                  {"eta", res.eta},
                  {"f_theory", res.f_theory},
                  {"f_used", res.f_used},
                  {"failure", res.failure}});
        if (!res.ok) std::exit(2);
    });

    auto* rtest = rem->add_subcommand("test", "one-sided sampling tester");
    std::string rt_graph, rt_pattern;
    double rt_delta = 0.1;
    rtest->add_option("--graph", rt_graph)->required();
    rtest->add_option("--pattern", rt_pattern)->required();
    rtest->add_option("--delta", rt_delta)->required();
    rtest->callback([&] {
        auto g = load_graph_m(man, rt_graph);
        auto h = load_graph_m(man, rt_pattern);
        auto res = sampling_tester(g, h, rt_delta, Rng(seed));
        man.emit("removal test", seed, {{"delta", rt_delta}},
                 {{"accept", res.accept}, {"samples", res.samples}, {"hits", res.hits}});
    });

    // ---------------------------------------------------------------- tools
    auto* tools = app.add_subcommand("tools", "bookkeeping functions");
    tools->require_subcommand(1);

    auto* ttower = tools->add_subcommand("tower", "t_i(x)");
    int ti = 2;
    double tx = 2.0;
    ttower->add_option("--i", ti)->required();
    ttower->add_option("--x", tx)->required();
    ttower->callback([&] {
        double v = tower(ti, tx);
        man.emit("tools tower", seed, {{"i", ti}, {"x", tx}},
                 {{"value", v}, {"finite", std::isfinite(v)}});
    });

    auto* ttint = tools->add_subcommand("tower-int", "T(n) with T(1) = 2");
    int tn = 3;
    ttint->add_option("--n", tn)->required();
    ttint->callback([&] {
        auto v = tower_int(tn);
        json r{{"materialized", v.materialized}, {"describe", v.describe()}};
        if (v.materialized && v.log2 <= 4096) r["decimal"] = v.decimal();
        man.emit("tools tower-int", seed, {{"n", tn}}, r);
    });

    auto* twow = tools->add_subcommand("wowzer", "W(n)");
    int wn = 3;
    twow->add_option("--n", wn)->required();
    twow->callback([&] {
        auto v = wowzer(wn);
        man.emit("tools wowzer", seed, {{"n", wn}},
                 {{"materialized", v.materialized}, {"describe", v.describe()}});
    });

    auto* tlog = tools->add_subcommand("logstar", "iterated logarithm");
    double lx = 16.0;
    tlog->add_option("--x", lx)->required();
    tlog->callback([&] {
        man.emit("tools logstar", seed, {{"x", lx}}, {{"value", iterated_log(lx)}});
    });

    auto* tcher = tools->add_subcommand("chernoff", "tail bound e^{-2a^2/n}");
    double ca = 1.0;
    std::uint64_t cn = 100;
    tcher->add_option("--a", ca)->required();
    tcher->add_option("--n", cn)->required();
    tcher->callback([&] {
        man.emit("tools chernoff", seed, {{"a", ca}, {"n", cn}}, {{"value", chernoff_tail(ca, cn)}});
    });

    auto* tthr = tools->add_subcommand("thresholds", "discrepancy threshold formulas");
    std::string kind = "gnp-h";
    ThresholdInputs tin;
    tthr->add_option("--kind", kind)->check(CLI::IsMember({"bipartite-f", "gnp-g", "gnp-self-g", "gnp-h"}));
    tthr->add_option("--u1", tin.u1);
    tthr->add_option("--u2", tin.u2);
    tthr->add_option("--m", tin.m);
    tthr->add_option("--M", tin.M);
    tthr->add_option("--n", tin.n);
    tthr->callback([&] {
        ThresholdKind k = kind == "bipartite-f" ? ThresholdKind::BipartiteF
                          : kind == "gnp-g"     ? ThresholdKind::GnpG
                          : kind == "gnp-self-g" ? ThresholdKind::GnpSelfG
                                                 : ThresholdKind::GnpH;
        auto t = discrepancy_threshold(k, tin);
        man.emit("tools thresholds", seed, {{"kind", kind}},
                 {{"value", t.value}, {"sqrt", std::sqrt(t.value)}});
    });

    // ---------------------------------------------------------------- report
    auto* rep = app.add_subcommand("report", "convert JSON reports to CSV");
    std::string rp_in, rp_out = "report.csv";
    bool rp_csv = false;
    rep->add_option("--in", rp_in)->required();
    rep->add_option("--out", rp_out)->capture_default_str();
    rep->add_flag("--csv", rp_csv, "emit defect histories / density tables as CSV");
    rep->callback([&] {
        json j = json::parse(man.read(rp_in));
        std::ostringstream csv;
        if (j.contains("defect_history")) {
            csv << "round,defect\n";
            for (const auto& row : j["defect_history"])
                csv << row["round"].get<int>() << ',' << row["defect"].get<double>() << '\n';
        } else if (j.contains("result") && j["result"].contains("defect_history")) {
            csv << "round,defect\n";
            for (const auto& row : j["result"]["defect_history"])
                csv << row["round"].get<int>() << ',' << row["defect"].get<double>() << '\n';
        } else {
            csv << "key,value\n";
            for (auto& [k, v] : j.items())
                if (v.is_number()) csv << k << ',' << v.dump() << '\n';
        }
        man.write(rp_out, csv.str());
        man.emit("report", seed, {{"in", rp_in}}, {{"rows", std::count(csv.str().begin(), csv.str().end(), '\n')}});
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 64;
    } catch (const std::invalid_argument& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
