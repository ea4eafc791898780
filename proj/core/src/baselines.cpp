#include "lexmdl/baselines.hpp"

#include <cmath>

namespace lexmdl {

double laplace(Count count, Count total, std::size_t vocab_size) {
    if (vocab_size == 0)
        throw ValidationError("laplace: empty vocabulary");
    if (count < 0.0 || total < 0.0)
        throw ValidationError("laplace: negative counts");
    return (count + 0.5) / (total + 0.5 * static_cast<double>(vocab_size));
}

std::optional<double> t_score(const TScoreInputs &inputs) {
    if (inputs.n_v <= 0.0 || inputs.n_n1 <= 0.0)
        throw ValidationError("t_score: sample sizes must be positive");
    double denom =
        std::sqrt(inputs.var_v / inputs.n_v + inputs.var_n1 / inputs.n_n1);
    if (denom <= 0.0) return std::nullopt;
    return (inputs.p_v - inputs.p_n1) / denom;
}

std::optional<double> association_ratio(double p_cond, double p_marg) {
    if (p_cond <= 0.0 || p_marg <= 0.0) return std::nullopt;
    return std::log2(p_cond / p_marg);
}

std::optional<double>
selectional_association(const std::vector<ClassAssociation> &classes) {
    std::optional<double> best;
    for (const auto &c : classes) {
        if (c.p_class <= 0.0) continue;
        double value = c.p_class_given_context <= 0.0
                           ? 0.0
                           : c.p_class_given_context *
                                 std::log2(c.p_class_given_context / c.p_class);
        if (!best || value > *best) best = value;
    }
    return best;
}

} // namespace lexmdl
