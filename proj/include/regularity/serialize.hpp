#pragma once

#include <cstdio>
#include <tuple>
#include <sstream>
#include <string>

#include "regularity/cylinder.hpp"
#include "regularity/io.hpp"
#include "regularity/lower_bounds.hpp"
#include "regularity/regular_approx.hpp"

namespace reg {

// Edit set file: one line per edit, "+ u v" or "- u v", sorted by (u, v).
inline std::string editset_to_string(const EditSet& es) {
    std::vector<std::tuple<int, int, char>> rows;
    for (auto [u, v] : es.additions) rows.emplace_back(u, v, '+');
    for (auto [u, v] : es.deletions) rows.emplace_back(u, v, '-');
    std::sort(rows.begin(), rows.end());
    std::ostringstream os;
    for (auto [u, v, c] : rows) os << c << ' ' << u << ' ' << v << '\n';
    return os.str();
}

inline EditSet editset_from_stream(std::istream& in) {
    EditSet es;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        char c;
        int u, v;
        if (!(ls >> c >> u >> v)) throw std::runtime_error("edit set parse: bad line");
        if (c == '+')
            es.add(u, v, "file");
        else if (c == '-')
            es.del(u, v, "file");
        else
            throw std::runtime_error("edit set parse: bad op");
    }
    return es;
}

// Cylinder partition file: "k", the k ground sets, "m", then one line per
// cylinder with the k part-sets separated by " | ".
inline std::string cylinders_to_string(const CylinderPartition& kp) {
    std::ostringstream os;
    os << kp.k() << '\n';
    for (const auto& g : kp.ground) {
        for (std::size_t i = 0; i < g.size(); ++i) os << (i ? " " : "") << g[i];
        os << '\n';
    }
    os << kp.cylinders.size() << '\n';
    for (const auto& c : kp.cylinders) {
        for (int i = 0; i < kp.k(); ++i) {
            if (i) os << " | ";
            for (std::size_t j = 0; j < c.parts[i].size(); ++j) os << (j ? " " : "") << c.parts[i][j];
        }
        os << '\n';
    }
    return os.str();
}

inline CylinderPartition cylinders_from_stream(std::istream& in) {
    CylinderPartition kp;
    int k;
    if (!(in >> k)) throw std::runtime_error("cylinder parse: bad k");
    std::string line;
    std::getline(in, line);
    for (int i = 0; i < k; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("cylinder parse: missing ground");
        std::istringstream ls(line);
        VertexSet g;
        int v;
        while (ls >> v) g.push_back(v);
        kp.ground.push_back(std::move(g));
    }
    std::size_t m;
    in >> m;
    std::getline(in, line);
    for (std::size_t c = 0; c < m; ++c) {
        if (!std::getline(in, line)) throw std::runtime_error("cylinder parse: missing cylinder");
        Cylinder cyl;
        std::string piece;
        std::istringstream ls(line);
        VertexSet cur;
        std::string tok;
        while (ls >> tok) {
            if (tok == "|") {
                cyl.parts.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(std::stoi(tok));
            }
        }
        cyl.parts.push_back(cur);
        if (static_cast<int>(cyl.parts.size()) != k) throw std::runtime_error("cylinder parse: arity");
        kp.cylinders.push_back(std::move(cyl));
    }
    return kp;
}

// Weight matrix file: "rows cols" then one row of %.17g entries per line.
inline std::string weights_to_string(const WeightMatrix& w) {
    std::ostringstream os;
    os << w.rows << ' ' << w.cols << '\n';
    char buf[64];
    for (int r = 0; r < w.rows; ++r) {
        for (int c = 0; c < w.cols; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", w.at(r, c));
            os << (c ? " " : "") << buf;
        }
        os << '\n';
    }
    return os.str();
}

inline WeightMatrix weights_from_stream(std::istream& in) {
    WeightMatrix w;
    if (!(in >> w.rows >> w.cols)) throw std::runtime_error("weights parse: bad header");
    w.w.resize(static_cast<std::size_t>(w.rows) * w.cols);
    for (auto& x : w.w)
        if (!(in >> x)) throw std::runtime_error("weights parse: truncated");
    return w;
}

}  // namespace reg
