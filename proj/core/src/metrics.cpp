#include "mfg/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

#include "mfg/errors.hpp"

namespace mfg {

double w1_1d(const StateGrid& grid, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (mu.size() != grid.size() || nu.size() != grid.size()) {
        throw DimensionError("w1_1d: measures are not defined on the given grid");
    }
    double cdf_gap = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        cdf_gap += mu[i] - nu[i];
        total += std::abs(cdf_gap) * (grid.point(i + 1) - grid.point(i));
    }
    return total;
}

double tv(std::span<const double> mu, std::span<const double> nu) {
    if (mu.size() != nu.size()) throw DimensionError("tv: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += std::abs(mu[i] - nu[i]);
    return s;
}

double tv(const DiscreteMeasure& mu, const DiscreteMeasure& nu) { return tv(mu.weights(), nu.weights()); }

double w1_discrete_metric(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (mu.size() != nu.size()) throw DimensionError("w1_discrete_metric: length mismatch");
    return 0.5 * tv(mu, nu);
}

Matrix absolute_distance_cost(const StateGrid& grid) {
    Matrix c(grid.size(), grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = 0; j < grid.size(); ++j) c(i, j) = std::abs(grid.point(i) - grid.point(j));
    return c;
}

Matrix discrete_metric_cost(std::size_t n) {
    Matrix c(n, n, 1.0);
    for (std::size_t i = 0; i < n; ++i) c(i, i) = 0.0;
    return c;
}

namespace {

void check_marginals(const Matrix& cost, std::span<const double> mu, std::span<const double> nu) {
    if (cost.rows != mu.size() || cost.cols != nu.size()) {
        throw DimensionError("transport: cost matrix does not match marginal sizes");
    }
    if (mu.empty() || nu.empty()) throw InvalidMeasureError("transport: empty marginal");
    for (double w : mu)
        if (!(w >= 0.0)) throw InvalidMeasureError("transport: negative source weight");
    for (double w : nu)
        if (!(w >= 0.0)) throw InvalidMeasureError("transport: negative target weight");
    const double sm = std::accumulate(mu.begin(), mu.end(), 0.0);
    const double sn = std::accumulate(nu.begin(), nu.end(), 0.0);
    if (std::abs(sm - sn) > 1e-9) {
        throw InvalidMeasureError("transport: marginal masses differ (" + std::to_string(sm) + " vs " +
                                  std::to_string(sn) + ")");
    }
}

double plan_cost(const Matrix& cost, const TransportPlan& plan) {
    double v = 0.0;
    for (std::size_t k = 0; k < plan.data.size(); ++k) v += cost.data[k] * plan.data[k];
    return v;
}

using CellIndex = std::pair<std::size_t, std::size_t>;

// Basic solution of a spanning-tree basis by repeatedly peeling leaves.
// Returns false when the chosen cells do not form a spanning tree.
bool solve_tree_basis(std::size_t rows, std::size_t cols, const std::vector<CellIndex>& basis,
                      std::span<const double> mu, std::span<const double> nu, TransportPlan& plan) {
    std::vector<double> supply(mu.begin(), mu.end());
    std::vector<double> demand(nu.begin(), nu.end());
    std::vector<int> row_deg(rows, 0), col_deg(cols, 0);
    for (auto [i, j] : basis) {
        ++row_deg[i];
        ++col_deg[j];
    }
    std::vector<bool> used(basis.size(), false);
    plan = TransportPlan(rows, cols);
    std::size_t remaining = basis.size();
    while (remaining > 0) {
        bool progressed = false;
        for (std::size_t e = 0; e < basis.size(); ++e) {
            if (used[e]) continue;
            auto [i, j] = basis[e];
            double q;
            if (row_deg[i] == 1) {
                q = supply[i];
            } else if (col_deg[j] == 1) {
                q = demand[j];
            } else {
                continue;
            }
            plan(i, j) = q;
            supply[i] -= q;
            demand[j] -= q;
            --row_deg[i];
            --col_deg[j];
            used[e] = true;
            --remaining;
            progressed = true;
        }
        if (!progressed) return false;  // contains a cycle
    }
    return true;
}

}  // namespace

TransportSolution transport_enumerate(const Matrix& cost, std::span<const double> mu,
                                      std::span<const double> nu) {
    check_marginals(cost, mu, nu);
    const std::size_t r = mu.size(), c = nu.size();
    const std::size_t cells = r * c;
    const std::size_t k = r + c - 1;
    if (cells > 20) throw DimensionError("transport_enumerate: instance too large for enumeration");

    TransportSolution best;
    best.value = std::numeric_limits<double>::infinity();
    std::vector<CellIndex> basis;
    TransportPlan plan;
    // Enumerate all k-subsets of cells through bitmasks.
    for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
        basis.clear();
        for (std::size_t b = 0; b < cells; ++b)
            if (mask & (1u << b)) basis.emplace_back(b / c, b % c);
        if (!solve_tree_basis(r, c, basis, mu, nu, plan)) continue;
        bool feasible = true;
        for (double x : plan.data) {
            if (x < -1e-14) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;
        for (double& x : plan.data) x = std::max(x, 0.0);
        const double v = plan_cost(cost, plan);
        if (v < best.value) {
            best.value = v;
            best.plan = plan;
        }
    }
    return best;
}

TransportSolution transport_simplex(const Matrix& cost, std::span<const double> mu,
                                    std::span<const double> nu) {
    check_marginals(cost, mu, nu);
    const std::size_t r = mu.size(), c = nu.size();

    TransportPlan x(r, c);
    std::vector<CellIndex> basis;
    std::vector<char> is_basic(r * c, 0);
    {
        std::vector<double> supply(mu.begin(), mu.end());
        std::vector<double> demand(nu.begin(), nu.end());
        std::size_t i = 0, j = 0;
        while (true) {
            const double q = std::min(supply[i], demand[j]);
            x(i, j) = q;
            basis.emplace_back(i, j);
            is_basic[i * c + j] = 1;
            supply[i] -= q;
            demand[j] -= q;
            if (i == r - 1 && j == c - 1) break;
            if (i == r - 1) {
                ++j;
            } else if (j == c - 1) {
                ++i;
            } else if (supply[i] <= demand[j]) {
                ++i;
            } else {
                ++j;
            }
        }
    }

    // Nodes 0..r-1 are rows, r..r+c-1 columns.
    const std::size_t nodes = r + c;
    std::vector<double> potential(nodes);
    std::vector<std::vector<std::size_t>> adjacency(nodes);  // basis edge indices
    std::vector<std::size_t> parent_edge(nodes);
    std::vector<char> seen(nodes);

    auto build_adjacency = [&] {
        for (auto& a : adjacency) a.clear();
        for (std::size_t e = 0; e < basis.size(); ++e) {
            adjacency[basis[e].first].push_back(e);
            adjacency[r + basis[e].second].push_back(e);
        }
    };
    auto other_end = [&](std::size_t e, std::size_t node) {
        const auto [i, j] = basis[e];
        return node < r ? r + j : i;
    };

    const double scale = std::max(1.0, *std::max_element(cost.data.begin(), cost.data.end()));
    const std::size_t dantzig_budget = 10 * r * c + 100;
    const std::size_t max_iterations = 200 * r * c + 1000;

    for (std::size_t iter = 0;; ++iter) {
        if (iter > max_iterations) throw std::runtime_error("transport_simplex: iteration limit reached");
        build_adjacency();

        // Potentials u_i + v_j = c_ij on basic cells, u_0 = 0.
        std::fill(seen.begin(), seen.end(), 0);
        std::queue<std::size_t> bfs;
        potential[0] = 0.0;
        seen[0] = 1;
        bfs.push(0);
        while (!bfs.empty()) {
            const std::size_t node = bfs.front();
            bfs.pop();
            for (std::size_t e : adjacency[node]) {
                const std::size_t next = other_end(e, node);
                if (seen[next]) continue;
                const auto [i, j] = basis[e];
                potential[next] = cost(i, j) - potential[node];
                seen[next] = 1;
                bfs.push(next);
            }
        }

        // Pricing: Dantzig first, Bland's rule afterwards to rule out cycling.
        const bool bland = iter >= dantzig_budget;
        double best_reduced = -1e-12 * scale;
        std::size_t enter_i = r, enter_j = c;
        for (std::size_t i = 0; i < r && !(bland && enter_i < r); ++i) {
            for (std::size_t j = 0; j < c; ++j) {
                if (is_basic[i * c + j]) continue;
                const double reduced = cost(i, j) - potential[i] - potential[r + j];
                if (reduced < best_reduced) {
                    best_reduced = reduced;
                    enter_i = i;
                    enter_j = j;
                    if (bland) break;
                }
            }
        }
        if (enter_i == r) break;  // optimal

        // Tree path from column node of the entering cell to its row node.
        std::fill(seen.begin(), seen.end(), 0);
        const std::size_t start = r + enter_j;
        const std::size_t goal = enter_i;
        seen[start] = 1;
        bfs.push(start);
        while (!bfs.empty()) {
            const std::size_t node = bfs.front();
            bfs.pop();
            if (node == goal) break;
            for (std::size_t e : adjacency[node]) {
                const std::size_t next = other_end(e, node);
                if (seen[next]) continue;
                seen[next] = 1;
                parent_edge[next] = e;
                bfs.push(next);
            }
        }
        while (!bfs.empty()) bfs.pop();

        // Edges from start to goal; walking back from goal reverses the order.
        std::vector<std::size_t> path;
        for (std::size_t node = goal; node != start;) {
            const std::size_t e = parent_edge[node];
            path.push_back(e);
            node = other_end(e, node);
        }
        std::reverse(path.begin(), path.end());

        // Signs along the path starting at the entering column: -, +, -, ...
        double theta = std::numeric_limits<double>::infinity();
        std::size_t leave = path.size();
        for (std::size_t p = 0; p < path.size(); p += 2) {
            const auto [i, j] = basis[path[p]];
            const double v = x(i, j);
            if (v < theta || (bland && v == theta && path[p] < path[leave])) {
                theta = v;
                leave = p;
            }
        }
        x(enter_i, enter_j) = theta;
        for (std::size_t p = 0; p < path.size(); ++p) {
            const auto [i, j] = basis[path[p]];
            x(i, j) += (p % 2 == 0) ? -theta : theta;
        }
        const std::size_t leaving_edge = path[leave];
        const auto [li, lj] = basis[leaving_edge];
        x(li, lj) = 0.0;
        is_basic[li * c + lj] = 0;
        basis[leaving_edge] = {enter_i, enter_j};
        is_basic[enter_i * c + enter_j] = 1;
    }

    for (double& v : x.data) v = std::max(v, 0.0);
    TransportSolution sol;
    sol.value = plan_cost(cost, x);
    sol.plan = std::move(x);
    return sol;
}

TransportSolution w1_lp_oracle(const Matrix& cost, std::span<const double> mu, std::span<const double> nu) {
    if (mu.size() <= 4 && nu.size() <= 4) return transport_enumerate(cost, mu, nu);
    return transport_simplex(cost, mu, nu);
}

}  // namespace mfg
