#include "lexmdl/eval.hpp"

#include <cmath>

namespace lexmdl {

PerplexityResult perplexity(
    const std::function<double(const std::vector<std::string> &)> &model_prob,
    const AssignmentTable &test) {
    if (test.total <= 0.0)
        throw ValidationError("perplexity: empty test data");
    PerplexityResult result;
    for (std::size_t i = 0; i < test.rows.size(); ++i) {
        const auto &row = test.rows[i];
        if (row.second <= 0.0) continue;
        double q = model_prob(row.first);
        if (q <= 0.0) {
            result.zero_items.push_back(i);
            continue;
        }
        result.cross_entropy_bits -= row.second / test.total * std::log2(q);
    }
    if (!result.zero_items.empty()) {
        result.cross_entropy_bits = kInfiniteBits;
        result.perplexity = kInfiniteBits;
    } else {
        result.perplexity = std::exp2(result.cross_entropy_bits);
    }
    return result;
}

double kl_models(const std::vector<double> &p, const std::vector<double> &q) {
    if (p.size() != q.size())
        throw ValidationError("kl_models: supports differ in size");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return kInfiniteBits;
        kl += p[i] * std::log2(p[i] / q[i]);
    }
    return std::max(kl, 0.0);
}

std::vector<LearningCurvePoint>
run_recovery_experiment(const DependencyForestModel &true_model,
                        const std::vector<std::size_t> &sizes,
                        std::size_t trials, std::uint64_t seed) {
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1])
            throw ValidationError("recovery experiment sizes must ascend");
    if (trials < 1)
        throw ValidationError("recovery experiment needs at least one trial");

    Rng master(seed);
    std::vector<LearningCurvePoint> curve;
    curve.reserve(sizes.size());
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        LearningCurvePoint point;
        point.data_size = sizes[si];
        point.trials = trials;
        point.seed = seed;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            std::uint64_t stream = master.fork(si * 1000 + trial).next_u64();
            AssignmentTable data =
                sample_from_forest(true_model, sizes[si], stream);
            PairStats stats = make_pair_stats(data, true_model.variables);
            DependencyForestModel estimated = learn_forest(stats);
            point.mean_links += static_cast<double>(estimated.edge_count());
            point.mean_kl += kl_forest(true_model, estimated);
        }
        point.mean_links /= static_cast<double>(trials);
        point.mean_kl /= static_cast<double>(trials);
        curve.push_back(point);
    }
    return curve;
}

} // namespace lexmdl
