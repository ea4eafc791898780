#ifndef LEXMDL_DEPFOREST_HPP
#define LEXMDL_DEPFOREST_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lexmdl/common.hpp"
#include "lexmdl/corpus.hpp"

namespace lexmdl {

// One case-slot random variable.  The domain is ordered: "0" (absence)
// first when it occurs, remaining values lexicographic.  Domains are taken
// from the data unless declared up front.
struct VariableSpec {
    std::string name;
    std::vector<std::string> domain;
    std::size_t k() const { return domain.size(); }
    int value_index(const std::string &value) const;
};

// Marginal and pairwise joint counts over the variables of one verb's
// assignment table; everything downstream (theta, forests) reads from here.
class PairStats {
public:
    explicit PairStats(std::vector<VariableSpec> variables)
        : variables_(std::move(variables)),
          marginals_(variables_.size()), joints_(variables_.size()) {
        for (std::size_t i = 0; i < variables_.size(); ++i) {
            marginals_[i].assign(variables_[i].k(), 0.0);
            joints_[i].resize(i);
            for (std::size_t j = 0; j < i; ++j)
                joints_[i][j].assign(variables_[i].k() * variables_[j].k(), 0.0);
        }
    }

    const std::vector<VariableSpec> &variables() const { return variables_; }
    std::size_t var_count() const { return variables_.size(); }
    Count data_size() const { return n_; }
    int var_index(const std::string &name) const;

    Count marginal_count(std::size_t i, std::size_t value) const {
        return marginals_[i][value];
    }
    Count joint_count(std::size_t i, std::size_t xi, std::size_t j,
                      std::size_t xj) const {
        if (i == j) throw ValidationError("joint_count needs distinct variables");
        return i > j ? joints_[i][j][xi * variables_[j].k() + xj]
                     : joints_[j][i][xj * variables_[i].k() + xi];
    }

    void add_assignment(const std::vector<std::size_t> &values, Count weight);

private:
    std::vector<VariableSpec> variables_;
    Count n_ = 0.0;
    std::vector<std::vector<Count>> marginals_;
    std::vector<std::vector<std::vector<Count>>> joints_; // [i][j<i]
};

// Domains from the observed rows ("0" first, rest lexicographic), or from
// `declared` when the variable inventory is known up front.
PairStats make_pair_stats(const AssignmentTable &table);
PairStats make_pair_stats(const AssignmentTable &table,
                          const std::vector<VariableSpec> &declared);

// I(Xi, Xj) of the empirical joint, bits, with 0 log 0 = 0.
double empirical_mi(const PairStats &stats, std::size_t i, std::size_t j);

// theta(Xi, Xj) = I(Xi, Xj) - (ki - 1)(kj - 1) log2(N) / (2N).  Positive
// theta is what justifies a dependency link.
double theta(const PairStats &stats, std::size_t i, std::size_t j);

struct ThetaEntry {
    std::size_t i, j; // i < j
    double mi;
    double theta;
};
std::vector<ThetaEntry> theta_table(const PairStats &stats);

// Forest-factorized joint distribution over the slot variables: each
// variable conditions on at most one parent.
struct DependencyForestModel {
    std::string verb;
    std::vector<VariableSpec> variables;
    std::vector<int> parent; // -1 for roots
    // Root tables hold k_i marginals; child tables hold P(child=b|parent=a)
    // at [a * k_child + b].
    std::vector<std::vector<double>> tables;
    // Child rows backed off to the child marginal because the parent value
    // never occurred; (variable, parent value) pairs.
    std::vector<std::pair<std::size_t, std::size_t>> fallback_rows;

    int var_index(const std::string &name) const;
    std::size_t edge_count() const;
    std::size_t parameter_count() const;
    std::vector<std::pair<int, int>> edges() const; // (parent, child)
};

// Kruskal on descending theta, links only across components, theta > 0.
// Ties broken on the lexicographically smaller variable-name pair; each
// tree is oriented from its lexicographically smallest variable.
DependencyForestModel learn_forest(const PairStats &stats);

// MLE model for a fixed undirected structure (empty edges = the fully
// independent model).
DependencyForestModel estimate_forest_model(
    const PairStats &stats,
    const std::vector<std::pair<std::size_t, std::size_t>> &edges);

// Parameter plus data bits of the MLE forest with the given undirected
// edges; orientation does not change the value.
double forest_description_length(const PairStats &stats,
                                 const std::vector<std::pair<std::size_t, std::size_t>> &edges);

// Exhaustive search over all forests (guard: n <= 5); scoring oracle for
// learn_forest.
DependencyForestModel brute_force_best_forest(const PairStats &stats);

double joint_probability(const DependencyForestModel &model,
                         const std::vector<std::string> &assignment);

// Reverse orientations along the path from the component's current root to
// new_root and re-derive tables; the joint distribution is unchanged.
DependencyForestModel reroot(const DependencyForestModel &model,
                             const std::string &new_root);

// i.i.d. ancestral sampling, roots first; deterministic for a fixed seed.
AssignmentTable sample_from_forest(const DependencyForestModel &model,
                                   std::size_t count, std::uint64_t seed);

std::vector<double> marginal_distribution(const DependencyForestModel &model,
                                          std::size_t var);

// P(target = . | cond = cond_value), by composing edge conditionals along
// the tree path; equals the target marginal when the variables live in
// different components.  Conditioning on a probability-zero event throws.
std::vector<double> conditional_distribution(const DependencyForestModel &model,
                                             std::size_t target, std::size_t cond,
                                             std::size_t cond_value);

double depen_conditional(const DependencyForestModel &model,
                         const std::string &target, const std::string &target_value,
                         const std::string &cond, const std::string &cond_value);

// Exact pairwise marginal P(u, w) as a k_u x k_w row-major table.
std::vector<double> pairwise_marginal(const DependencyForestModel &model,
                                      std::size_t u, std::size_t w);

// Exact D(p || q) in bits; the models must share variables and domains.
// +infinity when q gives zero probability to a p-positive configuration.
double kl_forest(const DependencyForestModel &p, const DependencyForestModel &q);

} // namespace lexmdl

#endif // LEXMDL_DEPFOREST_HPP
