#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "vsm/core/geometry.hpp"
#include "vsm/core/special.hpp"
#include "vsm/errors.hpp"

namespace vsm {

struct GaussRule {
    std::vector<double> nodes, weights;
};

/// N-point Gauss rule for int_0^1 f(v) v^alpha (1-v)^beta dv (Golub-Welsch).
inline GaussRule gauss_jacobi01(int N, double alpha, double beta) {
    detail::require(N >= 1, "gauss_jacobi01: need N >= 1");
    detail::require(alpha > -1.0 && beta > -1.0, "gauss_jacobi01: exponents must exceed -1");
    // on [-1,1] with weight (1-x)^a (1+x)^b, x = 2v - 1
    const double a = beta, b = alpha, ab = a + b;
    Eigen::VectorXd diag(N), sub(std::max(N - 1, 1));
    for (int k = 0; k < N; ++k) {
        const double s = 2.0 * k + ab;
        diag(k) = (k == 0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    }
    for (int k = 1; k < N; ++k) {
        const double s = 2.0 * k + ab;
        double beta_k;
        if (k == 1)
            beta_k = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        else
            beta_k = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
        sub(k - 1) = std::sqrt(beta_k);
    }
    GaussRule r;
    r.nodes.resize(N);
    r.weights.resize(N);
    // total mass of v^alpha (1-v)^beta on [0,1]
    const double mu0 = std::exp(log_gamma(alpha + 1.0) + log_gamma(beta + 1.0) - log_gamma(alpha + beta + 2.0));
    if (N == 1) {
        r.nodes[0] = 0.5 * (1.0 + diag(0));
        r.weights[0] = mu0;
        return r;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(N - 1), Eigen::ComputeEigenvectors);
    for (int k = 0; k < N; ++k) {
        r.nodes[k] = 0.5 * (1.0 + es.eigenvalues()(k));
        const double v0 = es.eigenvectors()(0, k);
        r.weights[k] = mu0 * v0 * v0;
    }
    return r;
}

/// Rules are memoized; building them is the expensive part for small cells.
inline const GaussRule& cached_gauss_jacobi01(int N, double alpha, double beta) {
    static std::mutex mu;
    static std::map<std::tuple<int, double, double>, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(N, alpha, beta);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, gauss_jacobi01(N, alpha, beta)).first;
    return it->second;
}

/// Edgewise (Kuhn) subdivision of the simplex chart into resolution^(n-1)
/// congruent cells of volume 1/(resolution^(n-1) (n-1)!). Cumulative
/// coordinates c_k = r (y_1 + ... + y_k) turn the chart into the ordered
/// region 0 <= c_1 <= ... <= c_{n-1} <= r; each unit cube there splits into
/// Kuhn simplices labelled by a base corner and a permutation.
class SimplexGrid {
public:
    struct Cell {
        std::vector<int> base;
        std::vector<int> perm;
        std::vector<std::vector<double>> vertices;  // n barycentric points (sum 1)
    };

    SimplexGrid(int n, int resolution) : n_(n), r_(resolution) {
        detail::require(n >= 2, "SimplexGrid: need n >= 2");
        detail::require(resolution >= 1, "SimplexGrid: resolution must be positive");
        const int dim = n - 1;
        std::vector<int> base(dim, 0);
        std::vector<int> perm(dim);
        for (;;) {
            std::iota(perm.begin(), perm.end(), 0);
            do {
                Cell c{base, perm, {}};
                std::vector<int> v = base;
                bool inside = vertex_inside(v);
                c.vertices.push_back(to_barycentric(v));
                for (int j = 0; j < dim && inside; ++j) {
                    ++v[perm[j]];
                    inside = vertex_inside(v);
                    c.vertices.push_back(to_barycentric(v));
                }
                if (inside) {
                    index_[key(base, perm)] = cells_.size();
                    cells_.push_back(std::move(c));
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            int k = 0;
            while (k < dim && ++base[k] == r_) base[k++] = 0;
            if (k == dim) break;
        }
    }

    int n() const { return n_; }
    int resolution() const { return r_; }
    std::size_t cell_count() const { return cells_.size(); }
    const Cell& cell(std::size_t i) const { return cells_[i]; }
    double cell_volume() const { return std::exp(-(n_ - 1) * std::log(r_) - log_gamma(n_)); }

    /// Cell centroids with weight cell_volume(): a midpoint-type rule whose
    /// weights sum to 1/(n-1)!.
    std::vector<std::pair<std::vector<double>, double>> nodes() const {
        std::vector<std::pair<std::vector<double>, double>> out;
        for (const auto& c : cells_) {
            std::vector<double> g(n_, 0.0);
            for (const auto& v : c.vertices)
                for (int i = 0; i < n_; ++i) g[i] += v[i] / n_;
            out.emplace_back(std::move(g), cell_volume());
        }
        return out;
    }

    /// Index of the cell containing y (ties broken deterministically).
    std::size_t locate(const std::vector<double>& y) const {
        detail::require(static_cast<int>(y.size()) == n_, "SimplexGrid::locate: dimension mismatch");
        const int dim = n_ - 1;
        std::vector<int> base(dim);
        std::vector<double> frac(dim);
        double cum = 0.0;
        for (int k = 0; k < dim; ++k) {
            cum += y[k];
            double c = std::clamp(cum * r_, 0.0, static_cast<double>(r_));
            int b = std::min(static_cast<int>(std::floor(c)), r_ - 1);
            base[k] = b;
            frac[k] = c - b;
        }
        std::vector<int> perm(dim);
        std::iota(perm.begin(), perm.end(), 0);
        std::stable_sort(perm.begin(), perm.end(), [&](int i, int j) { return frac[i] > frac[j]; });
        auto it = index_.find(key(base, perm));
        if (it != index_.end()) return it->second;
        // boundary round-off: choose the valid permutation closest in order
        std::size_t best = cells_.size();
        double best_bad = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            if (cells_[i].base != base) continue;
            double bad = 0.0;
            const auto& p = cells_[i].perm;
            for (int j = 0; j + 1 < dim; ++j) bad += std::max(0.0, frac[p[j + 1]] - frac[p[j]]);
            if (bad < best_bad) {
                best_bad = bad;
                best = i;
            }
        }
        if (best == cells_.size()) throw domain_error("SimplexGrid::locate: point outside the simplex");
        return best;
    }

private:
    bool vertex_inside(const std::vector<int>& c) const {
        int prev = 0;
        for (int v : c) {
            if (v < prev) return false;
            prev = v;
        }
        return prev <= r_;
    }
    std::vector<double> to_barycentric(const std::vector<int>& c) const {
        std::vector<double> y(n_);
        int prev = 0;
        for (int k = 0; k < n_ - 1; ++k) {
            y[k] = static_cast<double>(c[k] - prev) / r_;
            prev = c[k];
        }
        y[n_ - 1] = static_cast<double>(r_ - prev) / r_;
        return y;
    }
    static std::vector<int> key(const std::vector<int>& base, const std::vector<int>& perm) {
        std::vector<int> k(base);
        k.insert(k.end(), perm.begin(), perm.end());
        return k;
    }

    int n_, r_;
    std::vector<Cell> cells_;
    std::map<std::vector<int>, std::size_t> index_;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

namespace detail {

/// Product Gauss rule over one simplex cell in stick-breaking coordinates.
/// Singular factors y_i^{e_i} (e_i != 0) are moved into Jacobi weights when
/// the cell vertices with y_i > 0 form a singleton or a suffix in some vertex
/// order; the remaining factor (weighted mean of vertex values)^e is smooth.
template <class F>
double cell_integral(F& f, const std::vector<std::vector<double>>& V, double volume,
                     const std::vector<double>& e, int order, std::size_t& evals) {
    const int n = static_cast<int>(V.size());  // vertices = barycentric dimension
    const int dim = n - 1;
    std::vector<int> singular;
    for (int i = 0; i < static_cast<int>(e.size()); ++i) {
        if (e[i] == 0.0) continue;
        int zeros = 0;
        for (const auto& v : V) zeros += v[i] == 0.0;
        if (zeros > 0) singular.push_back(i);
    }
    // vertex order: try all permutations, keep the first that factorizes
    std::vector<int> ord(n);
    std::iota(ord.begin(), ord.end(), 0);
    auto ok = [&](const std::vector<int>& o) {
        for (int i : singular) {
            std::vector<int> pos;
            for (int p = 0; p < n; ++p)
                if (V[o[p]][i] > 0.0) pos.push_back(p);
            if (pos.size() == 1) continue;
            if (pos.empty() || pos.back() != n - 1 || pos.back() - pos.front() + 1 != static_cast<int>(pos.size()))
                return false;
        }
        return true;
    };
    bool found = singular.empty();
    if (!found) {
        do {
            if (ok(ord)) {
                found = true;
                break;
            }
        } while (std::next_permutation(ord.begin(), ord.end()));
    }
    if (!found) {
        // no factorizing order: split the edge joining vertices that lie on two
        // different singular faces, which separates the two singularities
        int bi = -1, bj = -1;
        for (std::size_t a = 0; a < singular.size() && bi < 0; ++a)
            for (std::size_t b = 0; b < singular.size() && bi < 0; ++b) {
                if (a == b) continue;
                for (int i = 0; i < n && bi < 0; ++i)
                    for (int j = 0; j < n; ++j)
                        if (i != j && V[i][singular[a]] == 0.0 && V[j][singular[b]] == 0.0 &&
                            V[i][singular[b]] > 0.0 && V[j][singular[a]] > 0.0) {
                            bi = i, bj = j;
                            break;
                        }
            }
        if (bi < 0) {
            double best = -1.0;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    double d2 = 0.0;
                    for (std::size_t k = 0; k < V[i].size(); ++k) d2 += (V[i][k] - V[j][k]) * (V[i][k] - V[j][k]);
                    if (d2 > best) best = d2, bi = i, bj = j;
                }
        }
        std::vector<double> mid(V[bi].size());
        for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = 0.5 * (V[bi][k] + V[bj][k]);
        if (volume < 1e-9) throw quadrature_error("simplex_quadrature: cannot separate singular faces");
        auto A = V, B = V;
        A[bi] = mid;
        B[bj] = mid;
        return cell_integral(f, A, 0.5 * volume, e, order, evals) + cell_integral(f, B, 0.5 * volume, e, order, evals);
    }
    // Jacobi exponents per stick-breaking variable v_1..v_dim
    std::vector<double> al(dim, 0.0), be(dim, 0.0);
    for (int k = 0; k < dim; ++k) be[k] = dim - 1 - k;  // Jacobian prod (1-v_k)^{dim-1-k}
    struct Factor {
        int i;
        std::vector<int> pos;
    };
    std::vector<Factor> factors;
    for (int i : singular) {
        Factor fa{i, {}};
        for (int p = 0; p < n; ++p)
            if (V[ord[p]][i] > 0.0) fa.pos.push_back(p);
        const int p0 = fa.pos.front();
        if (fa.pos.size() == 1 && p0 < dim) {
            al[p0] += e[i];
            for (int j = 0; j < p0; ++j) be[j] += e[i];
        } else {  // suffix starting at p0: tail sum = prod_{j<p0} (1-v_j)
            for (int j = 0; j < p0; ++j) be[j] += e[i];
        }
        factors.push_back(std::move(fa));
    }
    std::vector<const GaussRule*> rules(dim);
    for (int k = 0; k < dim; ++k) rules[k] = &cached_gauss_jacobi01(order, al[k], be[k]);

    // Jacobian from the standard lambda-simplex (volume 1/dim!) to this cell
    const double jac = volume * std::exp(log_gamma(n));
    const std::size_t ydim = V[0].size();
    std::vector<int> idx(dim, 0);
    std::vector<double> lam(n), y(ydim);
    double total = 0.0;
    for (;;) {
        double w = 1.0, rest = 1.0;
        for (int k = 0; k < dim; ++k) {
            const double v = rules[k]->nodes[idx[k]];
            w *= rules[k]->weights[idx[k]];
            lam[k] = rest * v;
            rest *= 1.0 - v;
        }
        lam[dim] = rest;
        std::fill(y.begin(), y.end(), 0.0);
        for (int p = 0; p < n; ++p)
            for (std::size_t c = 0; c < ydim; ++c) y[c] += lam[p] * V[ord[p]][c];
        double s = 0.0;
        for (double v : y) s += v;
        for (double& v : y) v = std::max(v, 0.0) / s;
        double val = f(y);
        ++evals;
        for (const auto& fa : factors) {
            double tl = 0.0;
            for (int p : fa.pos) tl += lam[p];
            val /= std::pow(tl, e[fa.i]);
        }
        total += w * val;
        int k = 0;
        while (k < dim && ++idx[k] == order) idx[k++] = 0;
        if (k == dim) break;
    }
    return total * jac;
}

}  // namespace detail

/// Integral of f over the simplex chart (Lebesgue measure in the first n-1
/// coordinates), cell by cell with an order-point product Gauss rule.
/// f receives a barycentric vector y (sum 1). exponents e_i declare
/// integrable factors y_i^{e_i}, e_i > -1, absorbed into Jacobi weights.
/// The error estimate compares against a rule of lower order; when it
/// exceeds tol a quadrature_error is thrown.
template <class F>
QuadratureResult simplex_quadrature(F&& f, const SimplexGrid& grid, const std::vector<double>& exponents = {},
                                    int order = 8, double tol = std::numeric_limits<double>::infinity()) {
    const int n = grid.n();
    std::vector<double> e = exponents;
    if (e.empty()) e.assign(n, 0.0);
    detail::require(static_cast<int>(e.size()) == n, "simplex_quadrature: exponent count mismatch");
    for (double v : e) detail::require(v > -1.0, "simplex_quadrature: exponents must exceed -1");
    detail::require(order >= 2, "simplex_quadrature: order must be >= 2");
    auto run = [&](int ord, std::size_t& evals) {
        double s = 0.0;
        for (std::size_t c = 0; c < grid.cell_count(); ++c)
            s += detail::cell_integral(f, grid.cell(c).vertices, grid.cell_volume(), e, ord, evals);
        return s;
    };
    QuadratureResult r;
    r.value = run(order, r.evaluations);
    const int lo = std::max(2, (3 * order) / 4);
    const double coarse = run(lo, r.evaluations);
    r.error_estimate = std::abs(r.value - coarse);
    if (r.error_estimate > tol) throw quadrature_error("simplex_quadrature: refinements disagree beyond tolerance");
    return r;
}

/// Masses of every grid cell under density f (same conventions as above).
template <class F>
std::vector<double> cell_masses(F&& f, const SimplexGrid& grid, const std::vector<double>& exponents = {},
                                int order = 8) {
    std::vector<double> e = exponents;
    if (e.empty()) e.assign(grid.n(), 0.0);
    std::vector<double> out(grid.cell_count());
    std::size_t evals = 0;
    for (std::size_t c = 0; c < grid.cell_count(); ++c)
        out[c] = detail::cell_integral(f, grid.cell(c).vertices, grid.cell_volume(), e, order, evals);
    return out;
}

}  // namespace vsm
