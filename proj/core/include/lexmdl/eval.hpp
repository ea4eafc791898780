#ifndef LEXMDL_EVAL_HPP
#define LEXMDL_EVAL_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lexmdl/common.hpp"
#include "lexmdl/corpus.hpp"
#include "lexmdl/depforest.hpp"

namespace lexmdl {

struct PerplexityResult {
    double cross_entropy_bits = 0.0; // H(P_T, P_M)
    double perplexity = 1.0;         // 2^H; +infinity on a zero-prob item
    std::vector<std::size_t> zero_items; // indices of offending test rows
};

// 2^H with H = -sum_x P_T(x) log2 P_M(x).  Items with zero model
// probability make the result +infinity rather than raising.
PerplexityResult perplexity(
    const std::function<double(const std::vector<std::string> &)> &model_prob,
    const AssignmentTable &test);

// D(p || q) over a shared finite support, bits; +infinity where q = 0 < p.
double kl_models(const std::vector<double> &p, const std::vector<double> &q);

struct LearningCurvePoint {
    std::size_t data_size = 0;
    double mean_links = 0.0;
    double mean_kl = 0.0; // bits; may be +infinity on sparse small samples
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

// Sample from the true forest at each size, re-learn, and track how the
// link count and KL(true || estimated) behave; deterministic per seed.
std::vector<LearningCurvePoint>
run_recovery_experiment(const DependencyForestModel &true_model,
                        const std::vector<std::size_t> &sizes,
                        std::size_t trials, std::uint64_t seed);

struct CrossValidationResult {
    std::vector<double> fold_scores;
    double mean = 0.0;
};

// Train on k-1 folds, score the held-out fold, aggregate.
template <typename Record, typename Learner, typename Scorer>
CrossValidationResult cross_validate(const std::vector<Record> &records,
                                     std::size_t k, std::uint64_t seed,
                                     Learner learn, Scorer score) {
    CrossValidationResult result;
    for (const Fold &fold : split_folds(records.size(), k, seed)) {
        std::vector<Record> train, test;
        train.reserve(fold.train.size());
        test.reserve(fold.test.size());
        for (std::size_t i : fold.train) train.push_back(records[i]);
        for (std::size_t i : fold.test) test.push_back(records[i]);
        auto model = learn(train);
        result.fold_scores.push_back(score(model, test));
    }
    for (double s : result.fold_scores) result.mean += s;
    result.mean /= static_cast<double>(result.fold_scores.size());
    return result;
}

} // namespace lexmdl

#endif // LEXMDL_EVAL_HPP
