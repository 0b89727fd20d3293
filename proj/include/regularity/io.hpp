#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "regularity/graph.hpp"
#include "regularity/partition.hpp"

namespace reg {

// Graph file: first line "n m", then m lines "u v" with 0 <= u < v < n, sorted.
inline std::string graph_to_string(const DenseGraph& g) {
    std::ostringstream os;
    auto es = g.edges();
    os << g.n() << ' ' << es.size() << '\n';
    for (auto [u, v] : es) os << u << ' ' << v << '\n';
    return os.str();
}

inline DenseGraph graph_from_stream(std::istream& in) {
    int n;
    std::uint64_t m;
    if (!(in >> n >> m)) throw std::runtime_error("graph parse: bad header");
    DenseGraph g(n);
    int pu = -1, pv = -1;
    for (std::uint64_t i = 0; i < m; ++i) {
        int u, v;
        if (!(in >> u >> v)) throw std::runtime_error("graph parse: truncated edge list");
        if (!(0 <= u && u < v && v < n)) throw std::runtime_error("graph parse: bad edge");
        if (u < pu || (u == pu && v <= pv)) throw std::runtime_error("graph parse: edges not sorted");
        pu = u;
        pv = v;
        g.add_edge(u, v);
    }
    return g;
}

// Partition file: one line per block, space-separated sorted vertex ids.
inline std::string partition_to_string(const VertexPartition& p) {
    std::ostringstream os;
    for (const auto& b : p.blocks()) {
        for (std::size_t i = 0; i < b.size(); ++i) os << (i ? " " : "") << b[i];
        os << '\n';
    }
    return os.str();
}

inline VertexPartition partition_from_stream(std::istream& in, int n) {
    std::vector<VertexSet> blocks;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        VertexSet b;
        int v;
        while (ls >> v) b.push_back(v);
        if (!b.empty()) blocks.push_back(std::move(b));
    }
    return VertexPartition(n, std::move(blocks));
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline DenseGraph load_graph(const std::string& path) {
    std::istringstream in(read_file(path));
    return graph_from_stream(in);
}

inline VertexPartition load_partition(const std::string& path, int n) {
    std::istringstream in(read_file(path));
    return partition_from_stream(in, n);
}

// FNV-1a 64-bit content digest, hex-encoded.
inline std::string fnv1a_digest(const std::string& content) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : content) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace reg
