#ifndef GTQW_GRAPHS_HPP
#define GTQW_GRAPHS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gtqw/error.hpp"

namespace gtqw {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Parameters of a central-random glued tree: two depth-n trees with
/// branching rate B, joined leaf-to-leaf by a seeded random gluing.
struct GluedTreeSpec {
    int branching = 2;
    int depth = 1;
    std::uint64_t gluing_seed = 0;
};

namespace detail {

inline std::uint64_t checked_pow(std::uint64_t base, int exponent) {
    std::uint64_t result = 1;
    for (int i = 0; i < exponent; ++i) {
        if (result > UINT64_MAX / base) {
            throw ParameterError("glued tree size overflows 64-bit node counter");
        }
        result *= base;
    }
    return result;
}

inline void check_tree_params(int B, int n) {
    if (B < 2) {
        throw ParameterError("branching rate B must be >= 2 (got " + std::to_string(B) + ")");
    }
    if (n < 1) {
        throw ParameterError("tree depth n must be >= 1 (got " + std::to_string(n) + ")");
    }
}

// Unbiased integer in [0, bound) by rejection. std::uniform_int_distribution
// is implementation-defined, which would break cross-platform reproducibility.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % bound;
}

}  // namespace detail

/// Number of nodes in column j (0 <= j <= 2n+1).
inline std::uint64_t column_size(int B, int n, int j) {
    detail::check_tree_params(B, n);
    if (j < 0 || j > 2 * n + 1) {
        throw ParameterError("column index out of range");
    }
    return j <= n ? detail::checked_pow(B, j) : detail::checked_pow(B, 2 * n + 1 - j);
}

/// Closed form 2(B^(n+1) - 1)/(B - 1).
inline std::uint64_t glued_tree_node_count(int B, int n) {
    detail::check_tree_params(B, n);
    return 2 * ((detail::checked_pow(B, n + 1) - 1) / static_cast<std::uint64_t>(B - 1));
}

/// Explicit glued tree. Nodes are numbered column-major, left to right,
/// starting at 0 for the entrance.
struct GluedTreeGraph {
    int branching = 0;
    int depth = 0;
    std::uint64_t seed = 0;
    std::vector<int> column;  // column of each node
    std::vector<Edge> edges;  // unordered pairs, stored with first < second
    NodeId entrance = 0;
    NodeId exit = 0;

    std::size_t node_count() const { return column.size(); }
    int column_count() const { return 2 * depth + 2; }

    /// Node ids grouped by column, in ascending id order.
    std::vector<std::vector<NodeId>> columns() const {
        std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(std::max(column_count(), 0)));
        for (std::size_t id = 0; id < column.size(); ++id) {
            const int c = column[id];
            if (c >= 0 && c < column_count()) {
                out[static_cast<std::size_t>(c)].push_back(static_cast<NodeId>(id));
            }
        }
        return out;
    }
};

/// Reduced (2n+2)-site chain Hamiltonian.
struct ChainHamiltonian {
    int branching = 0;
    int depth = 0;
    double gamma = 1.0;
    std::vector<double> off_diagonal;
    std::vector<double> diagonal;

    std::size_t size() const { return diagonal.size(); }
};

namespace detail {

// Samples a simple B-regular bipartite graph between `leaves` left and right
// leaves. Configuration-model pairing, then parallel edges are removed by
// degree-preserving switches; a pairing whose switches stall is discarded.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> sample_gluing(std::uint64_t leaves, int B,
                                                                           std::mt19937_64& rng) {
    constexpr int kResampleBudget = 1000;
    const std::uint64_t stubs = leaves * static_cast<std::uint64_t>(B);

    for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
        std::vector<std::uint64_t> right(stubs);
        for (std::uint64_t s = 0; s < stubs; ++s) {
            right[s] = s / static_cast<std::uint64_t>(B);
        }
        for (std::uint64_t s = stubs - 1; s > 0; --s) {
            std::swap(right[s], right[uniform_below(rng, s + 1)]);
        }
        std::vector<std::pair<std::uint64_t, std::uint64_t>> glue(stubs);
        std::map<std::pair<std::uint64_t, std::uint64_t>, int> multiplicity;
        for (std::uint64_t s = 0; s < stubs; ++s) {
            glue[s] = {s / static_cast<std::uint64_t>(B), right[s]};
            ++multiplicity[glue[s]];
        }

        std::vector<std::uint64_t> duplicates;
        for (std::uint64_t s = 0; s < stubs; ++s) {
            if (multiplicity[glue[s]] > 1) {
                duplicates.push_back(s);
            }
        }

        const std::uint64_t switch_budget = 200 * stubs + 1000;
        std::uint64_t switches = 0;
        while (!duplicates.empty() && switches < switch_budget) {
            const std::uint64_t s = duplicates.back();
            if (multiplicity[glue[s]] <= 1) {
                duplicates.pop_back();
                continue;
            }
            ++switches;
            const std::uint64_t other = uniform_below(rng, stubs);
            if (other == s) {
                continue;
            }
            const auto [u, v] = glue[s];
            const auto [x, y] = glue[other];
            if (u == x || v == y) {
                continue;
            }
            if (multiplicity.count({u, y}) != 0 || multiplicity.count({x, v}) != 0) {
                continue;
            }
            const auto erase_one = [&](const std::pair<std::uint64_t, std::uint64_t>& e) {
                if (--multiplicity[e] == 0) {
                    multiplicity.erase(e);
                }
            };
            erase_one(glue[s]);
            erase_one(glue[other]);
            glue[s] = {u, y};
            glue[other] = {x, v};
            ++multiplicity[glue[s]];
            ++multiplicity[glue[other]];
            duplicates.pop_back();
        }
        if (duplicates.empty()) {
            return glue;
        }
    }
    throw GenerationError("gluing sampler exceeded " + std::to_string(kResampleBudget) + " resamples");
}

}  // namespace detail

/// Builds the central-random glued tree for `spec`. Same spec, same graph.
inline GluedTreeGraph build_glued_tree(const GluedTreeSpec& spec) {
    const int B = spec.branching;
    const int n = spec.depth;
    detail::check_tree_params(B, n);
    const std::uint64_t total = glued_tree_node_count(B, n);
    if (total > UINT32_MAX) {
        throw ParameterError("glued tree with " + std::to_string(total) + " nodes exceeds the node id range");
    }

    GluedTreeGraph g;
    g.branching = B;
    g.depth = n;
    g.seed = spec.gluing_seed;
    const int cols = 2 * n + 2;

    std::vector<std::uint64_t> offset(static_cast<std::size_t>(cols) + 1, 0);
    for (int j = 0; j < cols; ++j) {
        offset[j + 1] = offset[j] + column_size(B, n, j);
    }
    g.column.resize(total);
    for (int j = 0; j < cols; ++j) {
        std::fill(g.column.begin() + static_cast<std::ptrdiff_t>(offset[j]),
                  g.column.begin() + static_cast<std::ptrdiff_t>(offset[j + 1]), j);
    }
    const auto id = [&](int j, std::uint64_t k) { return static_cast<NodeId>(offset[j] + k); };

    g.edges.reserve(total - 2 + column_size(B, n, n) * static_cast<std::uint64_t>(B));
    // Left tree: node k of column j hangs off node k/B of column j-1.
    for (int j = 1; j <= n; ++j) {
        for (std::uint64_t k = 0; k < column_size(B, n, j); ++k) {
            g.edges.emplace_back(id(j - 1, k / B), id(j, k));
        }
    }
    std::mt19937_64 rng(spec.gluing_seed);
    for (const auto& [left, right] : detail::sample_gluing(column_size(B, n, n), B, rng)) {
        g.edges.emplace_back(id(n, left), id(n + 1, right));
    }
    // Right tree mirrors the left one.
    for (int j = n + 1; j <= 2 * n; ++j) {
        for (std::uint64_t k = 0; k < column_size(B, n, j); ++k) {
            g.edges.emplace_back(id(j, k), id(j + 1, k / B));
        }
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.entrance = 0;
    g.exit = static_cast<NodeId>(total - 1);
    return g;
}

/// One failed structural check.
struct Violation {
    std::string kind;  // "column size", "degree", "parallel edge", ...
    std::string detail;
    std::vector<NodeId> nodes;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool passed() const { return violations.empty(); }

    bool has(const std::string& kind) const {
        return std::any_of(violations.begin(), violations.end(),
                           [&](const Violation& v) { return v.kind == kind; });
    }
};

/// Checks every structural invariant of a glued tree. Never throws on a
/// malformed graph; each problem becomes a Violation.
inline ValidationReport validate_gluing(const GluedTreeGraph& g) {
    ValidationReport report;
    const auto add = [&](std::string kind, std::string detail, std::vector<NodeId> nodes = {}) {
        report.violations.push_back({std::move(kind), std::move(detail), std::move(nodes)});
    };

    const int B = g.branching;
    const int n = g.depth;
    if (B < 2 || n < 1) {
        add("parameters", "B must be >= 2 and n >= 1");
        return report;
    }
    const std::size_t N = g.node_count();
    const int cols = g.column_count();

    std::uint64_t expected_total = 0;
    try {
        expected_total = glued_tree_node_count(B, n);
    } catch (const Error& e) {
        add("parameters", e.what());
        return report;
    }
    if (N != expected_total) {
        add("node count", "expected " + std::to_string(expected_total) + " nodes, found " + std::to_string(N));
    }
    for (std::size_t v = 0; v < N; ++v) {
        if (g.column[v] < 0 || g.column[v] >= cols) {
            add("column range", "column " + std::to_string(g.column[v]) + " outside 0.." + std::to_string(cols - 1),
                {static_cast<NodeId>(v)});
        }
    }
    const auto members = g.columns();
    for (int j = 0; j < cols; ++j) {
        const std::uint64_t want = column_size(B, n, j);
        if (members[j].size() != want) {
            add("column size",
                "column " + std::to_string(j) + " has " + std::to_string(members[j].size()) + " nodes, expected " +
                    std::to_string(want),
                members[j]);
        }
    }
    if (g.entrance >= N || g.column[g.entrance] != 0) {
        add("entrance", "entrance must be the column-0 node", {g.entrance});
    }
    if (g.exit >= N || g.column[g.exit] != cols - 1) {
        add("exit", "exit must be the column-" + std::to_string(cols - 1) + " node", {g.exit});
    }

    // Neighbor counts toward the previous and next column.
    std::vector<std::uint64_t> back(N, 0), forward(N, 0);
    std::set<Edge> seen;
    for (const auto& [a0, b0] : g.edges) {
        if (a0 >= N || b0 >= N) {
            add("edge range", "edge endpoint outside node range", {a0, b0});
            continue;
        }
        if (a0 == b0) {
            add("self loop", "node joined to itself", {a0});
            continue;
        }
        const Edge e = a0 < b0 ? Edge{a0, b0} : Edge{b0, a0};
        if (!seen.insert(e).second) {
            add("parallel edge", "edge repeated", {e.first, e.second});
            continue;
        }
        const int ca = g.column[e.first];
        const int cb = g.column[e.second];
        if (std::abs(ca - cb) != 1) {
            add("column adjacency", "edge joins columns " + std::to_string(ca) + " and " + std::to_string(cb),
                {e.first, e.second});
            continue;
        }
        const NodeId lo = ca < cb ? e.first : e.second;
        const NodeId hi = ca < cb ? e.second : e.first;
        ++forward[lo];
        ++back[hi];
    }

    const auto ub = static_cast<std::uint64_t>(B);
    for (std::size_t v = 0; v < N; ++v) {
        const int c = g.column[v];
        if (c < 0 || c >= cols) {
            continue;
        }
        std::uint64_t want_back = 0, want_forward = 0;
        if (c == 0) {
            want_forward = ub;
        } else if (c < n) {
            want_back = 1;
            want_forward = ub;
        } else if (c == n) {
            want_back = 1;
            want_forward = ub;  // glue
        } else if (c == n + 1) {
            want_back = ub;  // glue
            want_forward = 1;
        } else if (c < cols - 1) {
            want_back = ub;
            want_forward = 1;
        } else {
            want_back = ub;
        }
        if (back[v] != want_back || forward[v] != want_forward) {
            const bool glue = (c == n && forward[v] != want_forward) || (c == n + 1 && back[v] != want_back);
            add(glue ? "glue degree" : "degree",
                "node in column " + std::to_string(c) + " has " + std::to_string(back[v]) + " left / " +
                    std::to_string(forward[v]) + " right neighbors, expected " + std::to_string(want_back) +
                    " / " + std::to_string(want_forward),
                {static_cast<NodeId>(v)});
        }
    }

    // Connectivity by union-find over valid edges.
    std::vector<NodeId> parent(N);
    for (std::size_t v = 0; v < N; ++v) {
        parent[v] = static_cast<NodeId>(v);
    }
    const auto find = [&](NodeId v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    for (const auto& [a, b] : seen) {
        parent[find(a)] = find(b);
    }
    if (N > 0) {
        std::vector<NodeId> stray;
        const NodeId root = find(0);
        for (std::size_t v = 0; v < N; ++v) {
            if (find(static_cast<NodeId>(v)) != root) {
                stray.push_back(static_cast<NodeId>(v));
            }
        }
        if (!stray.empty()) {
            add("connectivity", std::to_string(stray.size()) + " nodes unreachable from node 0", std::move(stray));
        }
    }
    return report;
}

/// Chain couplings: sqrt(B)*gamma everywhere except B*gamma across the glue.
/// On-site terms are zero: a uniform propagation constant only adds a global
/// phase.
inline ChainHamiltonian reduce_to_chain(int B, int n, double gamma) {
    detail::check_tree_params(B, n);
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw ParameterError("hopping rate gamma must be positive and finite");
    }
    ChainHamiltonian h;
    h.branching = B;
    h.depth = n;
    h.gamma = gamma;
    const std::size_t sites = 2 * static_cast<std::size_t>(n) + 2;
    h.diagonal.assign(sites, 0.0);
    h.off_diagonal.assign(sites - 1, std::sqrt(static_cast<double>(B)) * gamma);
    h.off_diagonal[static_cast<std::size_t>(n)] = static_cast<double>(B) * gamma;
    return h;
}

/// Overlap of a node-basis state with each uniform column state |col j>.
inline std::vector<std::complex<double>> column_project(const GluedTreeGraph& g,
                                                        std::span<const std::complex<double>> amplitudes) {
    if (amplitudes.size() != g.node_count()) {
        throw ParameterError("amplitude vector has " + std::to_string(amplitudes.size()) + " entries, graph has " +
                             std::to_string(g.node_count()) + " nodes");
    }
    const auto cols = static_cast<std::size_t>(g.column_count());
    std::vector<std::complex<double>> out(cols, 0.0);
    std::vector<double> count(cols, 0.0);
    for (std::size_t v = 0; v < amplitudes.size(); ++v) {
        const auto c = static_cast<std::size_t>(g.column[v]);
        out[c] += amplitudes[v];
        count[c] += 1.0;
    }
    for (std::size_t c = 0; c < cols; ++c) {
        if (count[c] > 0.0) {
            out[c] /= std::sqrt(count[c]);
        }
    }
    return out;
}

}  // namespace gtqw

#endif
