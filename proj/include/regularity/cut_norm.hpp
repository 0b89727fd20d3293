#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "regularity/graph.hpp"
#include "regularity/partition.hpp"
#include "regularity/rng.hpp"

namespace reg {

struct Matrix {
    int rows = 0, cols = 0;
    std::vector<double> a;  // row-major

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

struct CutNormResult {
    double value = 0.0;
    std::vector<int> argA, argB;  // row / column index sets
    bool exact = false;
};

inline double submatrix_sum(const Matrix& d, const std::vector<int>& A, const std::vector<int>& B) {
    double s = 0.0;
    for (int r : A)
        for (int c : B) s += d.at(r, c);
    return s;
}

// Exact max over A ⊆ rows, B ⊆ cols of |sum_{A×B} D|. Rows are enumerated in
// Gray-code order with O(1) incremental column sums; for a fixed A the best B
// is the set of columns with positive (resp. negative) sums.
inline CutNormResult cut_norm_exact(const Matrix& d, int row_cap = 24) {
    if (d.rows > row_cap) throw std::invalid_argument("cut_norm_exact: too many rows");
    const int R = d.rows, C = d.cols;
    std::vector<double> col(C, 0.0);
    double pos = 0.0, neg = 0.0;  // sum of positive / negative column sums
    double best = 0.0;
    std::uint32_t best_mask = 0;
    bool best_pos = true;

    std::uint32_t gray_prev = 0;
    const std::uint64_t total = 1ULL << R;
    for (std::uint64_t m = 1; m < total; ++m) {
        std::uint32_t gray = static_cast<std::uint32_t>(m ^ (m >> 1));
        std::uint32_t flipped = gray ^ gray_prev;
        int fr = std::countr_zero(flipped);
        double sign = (gray & flipped) ? 1.0 : -1.0;
        const double* row = &d.a[static_cast<std::size_t>(fr) * C];
        for (int c = 0; c < C; ++c) {
            double before = col[c];
            double after = before + sign * row[c];
            col[c] = after;
            if (before > 0) pos -= before;
            if (before < 0) neg -= -before;
            if (after > 0) pos += after;
            if (after < 0) neg += -after;
        }
        gray_prev = gray;
        if (pos > best) {
            best = pos;
            best_mask = gray;
            best_pos = true;
        }
        if (neg > best) {
            best = neg;
            best_mask = gray;
            best_pos = false;
        }
    }

    CutNormResult res;
    res.exact = true;
    res.value = best;
    if (best > 0.0) {
        // Reconstruct the witness sets deterministically.
        std::vector<double> cs(C, 0.0);
        for (int r = 0; r < R; ++r)
            if (best_mask >> r & 1) {
                res.argA.push_back(r);
                for (int c = 0; c < C; ++c) cs[c] += d.at(r, c);
            }
        for (int c = 0; c < C; ++c)
            if (best_pos ? cs[c] > 0 : cs[c] < 0) res.argB.push_back(c);
        res.value = std::abs(submatrix_sum(d, res.argA, res.argB));
    }
    return res;
}

// Alternating maximization from random and singular-vector initializations.
// The returned value is a certified lower bound: the witness is re-summed.
inline CutNormResult cut_norm_heuristic(const Matrix& d, Rng rng, int random_starts = 8) {
    const int R = d.rows, C = d.cols;
    CutNormResult res;
    res.exact = false;
    if (R == 0 || C == 0) return res;

    auto improve_cols = [&](const std::vector<char>& inA, std::vector<char>& inB, bool positive) {
        for (int c = 0; c < C; ++c) {
            double s = 0.0;
            for (int r = 0; r < R; ++r)
                if (inA[r]) s += d.at(r, c);
            inB[c] = positive ? (s > 0) : (s < 0);
        }
    };
    auto improve_rows = [&](std::vector<char>& inA, const std::vector<char>& inB, bool positive) {
        for (int r = 0; r < R; ++r) {
            double s = 0.0;
            for (int c = 0; c < C; ++c)
                if (inB[c]) s += d.at(r, c);
            inA[r] = positive ? (s > 0) : (s < 0);
        }
    };
    auto value_of = [&](const std::vector<char>& inA, const std::vector<char>& inB) {
        double s = 0.0;
        for (int r = 0; r < R; ++r)
            if (inA[r])
                for (int c = 0; c < C; ++c)
                    if (inB[c]) s += d.at(r, c);
        return s;
    };

    auto run = [&](std::vector<char> inA, bool positive) {
        std::vector<char> inB(C, 0);
        double prev = -1.0;
        for (int it = 0; it < 64; ++it) {
            improve_cols(inA, inB, positive);
            improve_rows(inA, inB, positive);
            double v = positive ? value_of(inA, inB) : -value_of(inA, inB);
            if (v <= prev + 1e-15) break;
            prev = v;
        }
        double v = value_of(inA, inB);
        double av = std::abs(v);
        if (av > res.value) {
            res.value = av;
            res.argA.clear();
            res.argB.clear();
            for (int r = 0; r < R; ++r)
                if (inA[r]) res.argA.push_back(r);
            for (int c = 0; c < C; ++c)
                if (inB[c]) res.argB.push_back(c);
        }
    };

    // Top singular vector by power iteration; sign pattern seeds one start.
    {
        std::vector<double> u(R, 1.0), v(C, 0.0);
        for (int it = 0; it < 40; ++it) {
            for (int c = 0; c < C; ++c) {
                double s = 0.0;
                for (int r = 0; r < R; ++r) s += d.at(r, c) * u[r];
                v[c] = s;
            }
            double nv = 0.0;
            for (double x : v) nv += x * x;
            nv = std::sqrt(nv);
            if (nv < 1e-300) break;
            for (double& x : v) x /= nv;
            for (int r = 0; r < R; ++r) {
                double s = 0.0;
                for (int c = 0; c < C; ++c) s += d.at(r, c) * v[c];
                u[r] = s;
            }
            double nu = 0.0;
            for (double x : u) nu += x * x;
            nu = std::sqrt(nu);
            if (nu < 1e-300) break;
            for (double& x : u) x /= nu;
        }
        std::vector<char> inA(R, 0);
        for (int r = 0; r < R; ++r) inA[r] = u[r] > 0;
        run(inA, true);
        run(inA, false);
        for (int r = 0; r < R; ++r) inA[r] = u[r] < 0;
        run(inA, true);
        run(inA, false);
    }

    for (int s = 0; s < random_starts; ++s) {
        std::vector<char> inA(R, 0);
        for (int r = 0; r < R; ++r) inA[r] = rng.next() & 1;
        run(inA, true);
        run(inA, false);
    }
    return res;
}

// Defect matrix D(u, v) = A(u, v) - d(block(u), block(v)), diagonal zeroed.
inline Matrix defect_matrix(const DenseGraph& g, const VertexPartition& p) {
    auto dens = block_densities(g, p);
    int n = g.n();
    Matrix d(n, n);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            if (u == v) continue;
            d.at(u, v) = (g.has_edge(u, v) ? 1.0 : 0.0) - dens[p.block_of(u)][p.block_of(v)];
        }
    return d;
}

struct WeakCheckResult {
    bool ok = false;
    CutNormResult cut;     // maximizing (A, B) over the defect matrix
    double threshold = 0.0;  // eps * n^2
};

// Weak regularity check: max |f_P(A, B)| <= eps n^2 with f evaluated on the
// diagonal-zeroed defect matrix. Exact mode requires n <= 24.
inline WeakCheckResult check_weak_partition(const DenseGraph& g, const VertexPartition& p, double eps,
                                            bool exact, Rng rng = Rng(0)) {
    Matrix d = defect_matrix(g, p);
    WeakCheckResult res;
    res.threshold = eps * static_cast<double>(g.n()) * static_cast<double>(g.n());
    res.cut = exact ? cut_norm_exact(d) : cut_norm_heuristic(d, rng);
    res.ok = res.cut.value <= res.threshold + 1e-9;
    return res;
}

}  // namespace reg
