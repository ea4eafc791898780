#include "lexmdl/depforest.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

namespace lexmdl {

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

// Adjacency over undirected edges, neighbours in index order.
std::vector<std::vector<std::size_t>>
adjacency(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>> &edges) {
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto &e : edges) {
        adj[e.first].push_back(e.second);
        adj[e.second].push_back(e.first);
    }
    for (auto &v : adj) std::sort(v.begin(), v.end());
    return adj;
}

// Orient every component from its smallest-index node.
std::vector<int> orient(std::size_t n,
                        const std::vector<std::pair<std::size_t, std::size_t>> &edges) {
    auto adj = adjacency(n, edges);
    std::vector<int> parent(n, -2); // -2 = unvisited
    for (std::size_t root = 0; root < n; ++root) {
        if (parent[root] != -2) continue;
        parent[root] = -1;
        std::deque<std::size_t> queue{root};
        while (!queue.empty()) {
            std::size_t u = queue.front();
            queue.pop_front();
            for (std::size_t w : adj[u])
                if (parent[w] == -2) {
                    parent[w] = static_cast<int>(u);
                    queue.push_back(w);
                }
        }
    }
    return parent;
}

// MLE tables for the orientation given by `parent`.
DependencyForestModel estimate_forest(const PairStats &stats,
                                      const std::vector<int> &parent) {
    DependencyForestModel model;
    model.variables = stats.variables();
    model.parent = parent;
    model.tables.resize(stats.var_count());
    const Count n = stats.data_size();
    for (std::size_t i = 0; i < stats.var_count(); ++i) {
        std::size_t ki = model.variables[i].k();
        if (parent[i] < 0) {
            model.tables[i].resize(ki);
            for (std::size_t b = 0; b < ki; ++b)
                model.tables[i][b] = stats.marginal_count(i, b) / n;
        } else {
            std::size_t p = static_cast<std::size_t>(parent[i]);
            std::size_t kp = model.variables[p].k();
            model.tables[i].assign(kp * ki, 0.0);
            for (std::size_t a = 0; a < kp; ++a) {
                Count ctx = stats.marginal_count(p, a);
                if (ctx > 0.0) {
                    for (std::size_t b = 0; b < ki; ++b)
                        model.tables[i][a * ki + b] =
                            stats.joint_count(i, b, p, a) / ctx;
                } else {
                    // Unseen parent value: back off to the child marginal.
                    for (std::size_t b = 0; b < ki; ++b)
                        model.tables[i][a * ki + b] = stats.marginal_count(i, b) / n;
                    model.fallback_rows.emplace_back(i, a);
                }
            }
        }
    }
    return model;
}

// Variables in ancestor-before-descendant order, components by root index.
std::vector<std::size_t> topological_order(const DependencyForestModel &model) {
    std::size_t n = model.variables.size();
    std::vector<std::vector<std::size_t>> children(n);
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < n; ++i) {
        if (model.parent[i] < 0) roots.push_back(i);
        else children[static_cast<std::size_t>(model.parent[i])].push_back(i);
    }
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t r : roots) {
        std::vector<std::size_t> stack{r};
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            order.push_back(u);
            for (auto it = children[u].rbegin(); it != children[u].rend(); ++it)
                stack.push_back(*it);
        }
    }
    return order;
}

// Node marginals plus one k_p x k_c joint table per directed edge, derived
// by propagating from the roots.
struct Derived {
    std::vector<std::vector<double>> marginal;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> edge_joint;
};

Derived derive_distributions(const DependencyForestModel &model) {
    Derived d;
    d.marginal.resize(model.variables.size());
    for (std::size_t u : topological_order(model)) {
        std::size_t ku = model.variables[u].k();
        if (model.parent[u] < 0) {
            d.marginal[u] = model.tables[u];
            continue;
        }
        std::size_t p = static_cast<std::size_t>(model.parent[u]);
        std::size_t kp = model.variables[p].k();
        std::vector<double> joint(kp * ku, 0.0);
        std::vector<double> marg(ku, 0.0);
        for (std::size_t a = 0; a < kp; ++a)
            for (std::size_t b = 0; b < ku; ++b) {
                double w = d.marginal[p][a] * model.tables[u][a * ku + b];
                joint[a * ku + b] = w;
                marg[b] += w;
            }
        d.edge_joint[{p, u}] = std::move(joint);
        d.marginal[u] = std::move(marg);
    }
    return d;
}

// Joint of an undirected edge as (u rows, w cols), whichever way the edge
// is stored.
std::vector<double> edge_joint_as(const Derived &d, const DependencyForestModel &model,
                                  std::size_t u, std::size_t w) {
    std::size_t ku = model.variables[u].k();
    std::size_t kw = model.variables[w].k();
    auto it = d.edge_joint.find({u, w});
    if (it != d.edge_joint.end()) return it->second;
    it = d.edge_joint.find({w, u});
    if (it == d.edge_joint.end())
        throw ValidationError("no edge between the requested variables");
    std::vector<double> flipped(ku * kw, 0.0);
    for (std::size_t a = 0; a < kw; ++a)
        for (std::size_t b = 0; b < ku; ++b)
            flipped[b * kw + a] = it->second[a * ku + b];
    return flipped;
}

// Path between two variables over the undirected forest; empty if they lie
// in different components.
std::vector<std::size_t> tree_path(const DependencyForestModel &model,
                                   std::size_t from, std::size_t to) {
    std::size_t n = model.variables.size();
    std::vector<std::pair<std::size_t, std::size_t>> undirected;
    for (std::size_t i = 0; i < n; ++i)
        if (model.parent[i] >= 0)
            undirected.emplace_back(static_cast<std::size_t>(model.parent[i]), i);
    auto adj = adjacency(n, undirected);
    std::vector<int> prev(n, -2);
    prev[from] = -1;
    std::deque<std::size_t> queue{from};
    while (!queue.empty()) {
        std::size_t u = queue.front();
        queue.pop_front();
        if (u == to) break;
        for (std::size_t w : adj[u])
            if (prev[w] == -2) {
                prev[w] = static_cast<int>(u);
                queue.push_back(w);
            }
    }
    if (prev[to] == -2) return {};
    std::vector<std::size_t> path{to};
    while (path.back() != from)
        path.push_back(static_cast<std::size_t>(prev[path.back()]));
    std::reverse(path.begin(), path.end());
    return path;
}

} // namespace

int VariableSpec::value_index(const std::string &value) const {
    for (std::size_t i = 0; i < domain.size(); ++i)
        if (domain[i] == value) return static_cast<int>(i);
    return -1;
}

int PairStats::var_index(const std::string &name) const {
    for (std::size_t i = 0; i < variables_.size(); ++i)
        if (variables_[i].name == name) return static_cast<int>(i);
    return -1;
}

void PairStats::add_assignment(const std::vector<std::size_t> &values, Count weight) {
    if (values.size() != variables_.size())
        throw ValidationError("assignment does not cover every variable");
    n_ += weight;
    for (std::size_t i = 0; i < values.size(); ++i) {
        marginals_[i][values[i]] += weight;
        for (std::size_t j = 0; j < i; ++j)
            joints_[i][j][values[i] * variables_[j].k() + values[j]] += weight;
    }
}

namespace {

PairStats build_stats(const AssignmentTable &table,
                      std::vector<VariableSpec> specs) {
    PairStats stats(std::move(specs));
    std::vector<std::size_t> row(table.variables.size());
    for (const auto &r : table.rows) {
        for (std::size_t i = 0; i < r.first.size(); ++i) {
            int idx = stats.variables()[i].value_index(r.first[i]);
            if (idx < 0)
                throw ValidationError("value '" + r.first[i] +
                                      "' outside the domain of variable '" +
                                      stats.variables()[i].name + "'");
            row[i] = static_cast<std::size_t>(idx);
        }
        stats.add_assignment(row, r.second);
    }
    return stats;
}

} // namespace

PairStats make_pair_stats(const AssignmentTable &table) {
    std::vector<VariableSpec> specs(table.variables.size());
    for (std::size_t i = 0; i < table.variables.size(); ++i)
        specs[i].name = table.variables[i];
    std::vector<std::set<std::string>> seen(table.variables.size());
    for (const auto &r : table.rows)
        for (std::size_t i = 0; i < r.first.size(); ++i)
            seen[i].insert(r.first[i]);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (seen[i].count("0")) specs[i].domain.push_back("0");
        for (const auto &v : seen[i])
            if (v != "0") specs[i].domain.push_back(v);
    }
    return build_stats(table, std::move(specs));
}

PairStats make_pair_stats(const AssignmentTable &table,
                          const std::vector<VariableSpec> &declared) {
    if (declared.size() != table.variables.size())
        throw ValidationError("declared variables do not match the table");
    for (std::size_t i = 0; i < declared.size(); ++i)
        if (declared[i].name != table.variables[i])
            throw ValidationError("declared variable order does not match the table");
    return build_stats(table, declared);
}

double empirical_mi(const PairStats &stats, std::size_t i, std::size_t j) {
    const Count n = stats.data_size();
    if (n <= 0.0) throw ValidationError("empirical_mi: no data");
    double mi = 0.0;
    std::size_t ki = stats.variables()[i].k();
    std::size_t kj = stats.variables()[j].k();
    for (std::size_t a = 0; a < ki; ++a)
        for (std::size_t b = 0; b < kj; ++b) {
            Count f = stats.joint_count(i, a, j, b);
            if (f <= 0.0) continue;
            double pij = f / n;
            double pi = stats.marginal_count(i, a) / n;
            double pj = stats.marginal_count(j, b) / n;
            mi += pij * std::log2(pij / (pi * pj));
        }
    return std::max(mi, 0.0);
}

double theta(const PairStats &stats, std::size_t i, std::size_t j) {
    const Count n = stats.data_size();
    if (n <= 0.0) throw ValidationError("theta: no data");
    double ki = static_cast<double>(stats.variables()[i].k());
    double kj = static_cast<double>(stats.variables()[j].k());
    return empirical_mi(stats, i, j) -
           (ki - 1.0) * (kj - 1.0) * std::log2(n) / (2.0 * n);
}

std::vector<ThetaEntry> theta_table(const PairStats &stats) {
    std::vector<ThetaEntry> out;
    for (std::size_t i = 0; i < stats.var_count(); ++i)
        for (std::size_t j = i + 1; j < stats.var_count(); ++j)
            out.push_back({i, j, empirical_mi(stats, i, j), theta(stats, i, j)});
    return out;
}

int DependencyForestModel::var_index(const std::string &name) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
        if (variables[i].name == name) return static_cast<int>(i);
    return -1;
}

std::size_t DependencyForestModel::edge_count() const {
    std::size_t c = 0;
    for (int p : parent)
        if (p >= 0) ++c;
    return c;
}

std::size_t DependencyForestModel::parameter_count() const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < variables.size(); ++i) {
        std::size_t ki = variables[i].k();
        c += parent[i] < 0
                 ? ki - 1
                 : (ki - 1) * variables[static_cast<std::size_t>(parent[i])].k();
    }
    return c;
}

std::vector<std::pair<int, int>> DependencyForestModel::edges() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < parent.size(); ++i)
        if (parent[i] >= 0) out.emplace_back(parent[i], static_cast<int>(i));
    return out;
}

DependencyForestModel learn_forest(const PairStats &stats) {
    if (stats.data_size() <= 0.0)
        throw ValidationError("learn_forest: no data");
    std::size_t n = stats.var_count();
    struct Candidate {
        double theta;
        std::size_t i, j;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            candidates.push_back({theta(stats, i, j), i, j});
    // Variables are kept in lexicographic name order, so index pairs break
    // theta ties deterministically.
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate &a, const Candidate &b) {
                  if (a.theta != b.theta) return a.theta > b.theta;
                  if (a.i != b.i) return a.i < b.i;
                  return a.j < b.j;
              });
    UnionFind uf(n);
    std::vector<std::pair<std::size_t, std::size_t>> accepted;
    for (const auto &c : candidates)
        if (c.theta > 0.0 && uf.unite(c.i, c.j)) accepted.emplace_back(c.i, c.j);
    return estimate_forest(stats, orient(n, accepted));
}

DependencyForestModel estimate_forest_model(
    const PairStats &stats,
    const std::vector<std::pair<std::size_t, std::size_t>> &edges) {
    return estimate_forest(stats, orient(stats.var_count(), edges));
}

double forest_description_length(
    const PairStats &stats,
    const std::vector<std::pair<std::size_t, std::size_t>> &edges) {
    const Count n = stats.data_size();
    std::vector<int> parent = orient(stats.var_count(), edges);
    double param = 0.0, data = 0.0;
    for (std::size_t i = 0; i < stats.var_count(); ++i) {
        double ki = static_cast<double>(stats.variables()[i].k());
        if (parent[i] < 0) {
            param += (ki - 1.0) / 2.0 * std::log2(n);
            for (std::size_t b = 0; b < stats.variables()[i].k(); ++b) {
                Count f = stats.marginal_count(i, b);
                if (f > 0.0) data -= f * std::log2(f / n);
            }
        } else {
            std::size_t p = static_cast<std::size_t>(parent[i]);
            double kp = static_cast<double>(stats.variables()[p].k());
            param += (ki - 1.0) / 2.0 * kp * std::log2(n);
            for (std::size_t a = 0; a < stats.variables()[p].k(); ++a) {
                Count ctx = stats.marginal_count(p, a);
                if (ctx <= 0.0) continue;
                for (std::size_t b = 0; b < stats.variables()[i].k(); ++b) {
                    Count f = stats.joint_count(i, b, p, a);
                    if (f > 0.0) data -= f * std::log2(f / ctx);
                }
            }
        }
    }
    return param + data;
}

DependencyForestModel brute_force_best_forest(const PairStats &stats) {
    std::size_t n = stats.var_count();
    if (n > 5)
        throw ValidationError("brute_force_best_forest is guarded at 5 variables");
    std::vector<std::pair<std::size_t, std::size_t>> all_edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) all_edges.emplace_back(i, j);

    double best_bits = kInfiniteBits;
    std::vector<std::pair<std::size_t, std::size_t>> best_edges;
    for (std::size_t mask = 0; mask < (std::size_t{1} << all_edges.size()); ++mask) {
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        UnionFind uf(n);
        bool acyclic = true;
        for (std::size_t e = 0; e < all_edges.size(); ++e) {
            if (!(mask & (std::size_t{1} << e))) continue;
            if (!uf.unite(all_edges[e].first, all_edges[e].second)) {
                acyclic = false;
                break;
            }
            edges.push_back(all_edges[e]);
        }
        if (!acyclic) continue;
        double bits = forest_description_length(stats, edges);
        bool better = bits < best_bits - kBitsTolerance;
        bool tie = std::abs(bits - best_bits) <= kBitsTolerance;
        if (better || (tie && edges.size() < best_edges.size())) {
            best_bits = bits;
            best_edges = edges;
        }
    }
    return estimate_forest(stats, orient(n, best_edges));
}

double joint_probability(const DependencyForestModel &model,
                         const std::vector<std::string> &assignment) {
    if (assignment.size() != model.variables.size())
        throw ValidationError("assignment does not cover every variable");
    std::vector<std::size_t> values(assignment.size());
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        int idx = model.variables[i].value_index(assignment[i]);
        if (idx < 0)
            throw ValidationError("value '" + assignment[i] +
                                  "' outside the domain of variable '" +
                                  model.variables[i].name + "'");
        values[i] = static_cast<std::size_t>(idx);
    }
    double prob = 1.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::size_t ki = model.variables[i].k();
        prob *= model.parent[i] < 0
                    ? model.tables[i][values[i]]
                    : model.tables[i][values[static_cast<std::size_t>(model.parent[i])] * ki +
                                      values[i]];
    }
    return prob;
}

DependencyForestModel reroot(const DependencyForestModel &model,
                             const std::string &new_root) {
    int idx = model.var_index(new_root);
    if (idx < 0)
        throw ValidationError("unknown variable '" + new_root + "'");
    std::size_t target = static_cast<std::size_t>(idx);

    // Already a root: nothing to re-derive.
    if (model.parent[target] < 0) return model;

    Derived d = derive_distributions(model);

    // Re-orient only the component containing new_root.
    std::vector<int> parent = model.parent;
    std::vector<std::size_t> component;
    {
        std::set<std::size_t> seen{target};
        std::deque<std::size_t> queue{target};
        std::vector<std::vector<std::size_t>> adj(model.variables.size());
        for (std::size_t i = 0; i < model.parent.size(); ++i)
            if (model.parent[i] >= 0) {
                adj[i].push_back(static_cast<std::size_t>(model.parent[i]));
                adj[static_cast<std::size_t>(model.parent[i])].push_back(i);
            }
        while (!queue.empty()) {
            std::size_t u = queue.front();
            queue.pop_front();
            component.push_back(u);
            for (std::size_t w : adj[u])
                if (seen.insert(w).second) {
                    parent[w] = static_cast<int>(u);
                    queue.push_back(w);
                }
        }
        parent[target] = -1;
    }

    DependencyForestModel out = model;
    out.parent = parent;
    out.fallback_rows.clear();
    for (std::size_t u : component) {
        std::size_t ku = model.variables[u].k();
        if (parent[u] < 0) {
            out.tables[u] = d.marginal[u];
            continue;
        }
        std::size_t p = static_cast<std::size_t>(parent[u]);
        std::size_t kp = model.variables[p].k();
        std::vector<double> joint = edge_joint_as(d, model, p, u);
        std::vector<double> table(kp * ku, 0.0);
        for (std::size_t a = 0; a < kp; ++a) {
            double ctx = d.marginal[p][a];
            if (ctx > 0.0) {
                for (std::size_t b = 0; b < ku; ++b)
                    table[a * ku + b] = joint[a * ku + b] / ctx;
            } else {
                for (std::size_t b = 0; b < ku; ++b)
                    table[a * ku + b] = d.marginal[u][b];
                out.fallback_rows.emplace_back(u, a);
            }
        }
        out.tables[u] = std::move(table);
    }
    return out;
}

AssignmentTable sample_from_forest(const DependencyForestModel &model,
                                   std::size_t count, std::uint64_t seed) {
    if (count == 0)
        throw ValidationError("sample_from_forest: count must be positive");
    Rng rng(seed);
    auto order = topological_order(model);
    std::map<std::vector<std::string>, Count> rows;
    std::vector<std::size_t> values(model.variables.size());
    for (std::size_t s = 0; s < count; ++s) {
        for (std::size_t u : order) {
            std::size_t ku = model.variables[u].k();
            const double *dist =
                model.parent[u] < 0
                    ? model.tables[u].data()
                    : model.tables[u].data() +
                          values[static_cast<std::size_t>(model.parent[u])] * ku;
            double x = rng.next_double();
            std::size_t pick = ku - 1;
            double acc = 0.0;
            for (std::size_t b = 0; b < ku; ++b) {
                acc += dist[b];
                if (x < acc) {
                    pick = b;
                    break;
                }
            }
            values[u] = pick;
        }
        std::vector<std::string> row(model.variables.size());
        for (std::size_t i = 0; i < row.size(); ++i)
            row[i] = model.variables[i].domain[values[i]];
        rows[row] += 1.0;
    }
    AssignmentTable table;
    for (const auto &v : model.variables) table.variables.push_back(v.name);
    table.rows.assign(rows.begin(), rows.end());
    table.total = static_cast<Count>(count);
    return table;
}

std::vector<double> marginal_distribution(const DependencyForestModel &model,
                                          std::size_t var) {
    return derive_distributions(model).marginal[var];
}

std::vector<double> conditional_distribution(const DependencyForestModel &model,
                                             std::size_t target, std::size_t cond,
                                             std::size_t cond_value) {
    Derived d = derive_distributions(model);
    if (d.marginal[cond][cond_value] <= 0.0)
        throw ValidationError("conditioning event '" +
                              model.variables[cond].name + "=" +
                              model.variables[cond].domain[cond_value] +
                              "' has probability zero");
    auto path = tree_path(model, cond, target);
    if (path.empty()) return d.marginal[target];

    // Delta at the conditioning value, pushed through the edge conditionals
    // along the path.
    std::vector<double> dist(model.variables[cond].k(), 0.0);
    dist[cond_value] = 1.0;
    for (std::size_t step = 0; step + 1 < path.size(); ++step) {
        std::size_t u = path[step], w = path[step + 1];
        std::size_t ku = model.variables[u].k();
        std::size_t kw = model.variables[w].k();
        std::vector<double> joint = edge_joint_as(d, model, u, w);
        std::vector<double> next(kw, 0.0);
        for (std::size_t a = 0; a < ku; ++a) {
            if (dist[a] <= 0.0) continue;
            double ctx = d.marginal[u][a];
            if (ctx <= 0.0) continue;
            for (std::size_t b = 0; b < kw; ++b)
                next[b] += dist[a] * joint[a * kw + b] / ctx;
        }
        dist = std::move(next);
    }
    return dist;
}

double depen_conditional(const DependencyForestModel &model,
                         const std::string &target, const std::string &target_value,
                         const std::string &cond, const std::string &cond_value) {
    int t = model.var_index(target);
    int c = model.var_index(cond);
    if (t < 0 || c < 0)
        throw ValidationError("unknown variable in conditional query");
    int tv = model.variables[static_cast<std::size_t>(t)].value_index(target_value);
    int cv = model.variables[static_cast<std::size_t>(c)].value_index(cond_value);
    if (tv < 0 || cv < 0)
        throw ValidationError("out-of-domain value in conditional query");
    return conditional_distribution(model, static_cast<std::size_t>(t),
                                    static_cast<std::size_t>(c),
                                    static_cast<std::size_t>(cv))[static_cast<std::size_t>(tv)];
}

std::vector<double> pairwise_marginal(const DependencyForestModel &model,
                                      std::size_t u, std::size_t w) {
    Derived d = derive_distributions(model);
    std::size_t ku = model.variables[u].k();
    std::size_t kw = model.variables[w].k();
    std::vector<double> joint(ku * kw, 0.0);
    auto path = tree_path(model, u, w);
    if (path.empty()) {
        for (std::size_t a = 0; a < ku; ++a)
            for (std::size_t b = 0; b < kw; ++b)
                joint[a * kw + b] = d.marginal[u][a] * d.marginal[w][b];
        return joint;
    }
    for (std::size_t a = 0; a < ku; ++a) {
        if (d.marginal[u][a] <= 0.0) continue;
        std::vector<double> dist(ku, 0.0);
        dist[a] = 1.0;
        for (std::size_t step = 0; step + 1 < path.size(); ++step) {
            std::size_t x = path[step], y = path[step + 1];
            std::size_t kx = model.variables[x].k();
            std::size_t ky = model.variables[y].k();
            std::vector<double> ej = edge_joint_as(d, model, x, y);
            std::vector<double> next(ky, 0.0);
            for (std::size_t va = 0; va < kx; ++va) {
                if (dist[va] <= 0.0) continue;
                double ctx = d.marginal[x][va];
                if (ctx <= 0.0) continue;
                for (std::size_t vb = 0; vb < ky; ++vb)
                    next[vb] += dist[va] * ej[va * ky + vb] / ctx;
            }
            dist = std::move(next);
        }
        for (std::size_t b = 0; b < kw; ++b)
            joint[a * kw + b] = d.marginal[u][a] * dist[b];
    }
    return joint;
}

double kl_forest(const DependencyForestModel &p, const DependencyForestModel &q) {
    if (p.variables.size() != q.variables.size())
        throw ValidationError("kl_forest: variable sets differ");
    for (std::size_t i = 0; i < p.variables.size(); ++i)
        if (p.variables[i].name != q.variables[i].name ||
            p.variables[i].domain != q.variables[i].domain)
            throw ValidationError("kl_forest: variable domains differ");

    Derived dp = derive_distributions(p);
    double kl = 0.0;

    // E_p[log2 p(x)]: entropies along p's own factorization.
    for (std::size_t i = 0; i < p.variables.size(); ++i) {
        std::size_t ki = p.variables[i].k();
        if (p.parent[i] < 0) {
            for (std::size_t b = 0; b < ki; ++b)
                kl += xlog2(dp.marginal[i][b]);
        } else {
            std::size_t par = static_cast<std::size_t>(p.parent[i]);
            std::size_t kp = p.variables[par].k();
            const auto &joint = dp.edge_joint.at({par, i});
            for (std::size_t a = 0; a < kp; ++a)
                for (std::size_t b = 0; b < ki; ++b) {
                    double w = joint[a * ki + b];
                    if (w <= 0.0) continue;
                    kl += w * std::log2(p.tables[i][a * ki + b]);
                }
        }
    }

    // -E_p[log2 q(x)]: q's factors weighted by p's pairwise marginals.
    for (std::size_t i = 0; i < q.variables.size(); ++i) {
        std::size_t ki = q.variables[i].k();
        if (q.parent[i] < 0) {
            for (std::size_t b = 0; b < ki; ++b) {
                double w = dp.marginal[i][b];
                if (w <= 0.0) continue;
                if (q.tables[i][b] <= 0.0) return kInfiniteBits;
                kl -= w * std::log2(q.tables[i][b]);
            }
        } else {
            std::size_t par = static_cast<std::size_t>(q.parent[i]);
            std::size_t kp = q.variables[par].k();
            std::vector<double> joint = pairwise_marginal(p, par, i);
            for (std::size_t a = 0; a < kp; ++a)
                for (std::size_t b = 0; b < ki; ++b) {
                    double w = joint[a * ki + b];
                    if (w <= 0.0) continue;
                    if (q.tables[i][a * ki + b] <= 0.0) return kInfiniteBits;
                    kl -= w * std::log2(q.tables[i][a * ki + b]);
                }
        }
    }
    return std::max(kl, 0.0);
}

} // namespace lexmdl
