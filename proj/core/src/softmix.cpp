#include "lexmdl/softmix.hpp"

#include <cmath>

namespace lexmdl {

namespace {

double class_prob(const SoftCaseSlotModel &model, std::size_t i,
                  const std::string &token) {
    auto it = model.within_class[i].find(token);
    return it == model.within_class[i].end() ? 0.0 : it->second;
}

void validate(const SoftCaseSlotModel &model) {
    if (model.coeffs.empty() || model.coeffs.size() != model.within_class.size())
        throw ValidationError("mixture coefficients not aligned with classes");
}

} // namespace

double log_likelihood(const SoftCaseSlotModel &model,
                      const std::vector<std::string> &sample) {
    validate(model);
    if (sample.empty()) throw ValidationError("log_likelihood: empty sample");
    double total = 0.0;
    for (const auto &token : sample) {
        double mix = 0.0;
        for (std::size_t i = 0; i < model.coeffs.size(); ++i)
            mix += model.coeffs[i] * class_prob(model, i, token);
        if (mix <= 0.0) return -kInfiniteBits;
        total += std::log2(mix);
    }
    return total / static_cast<double>(sample.size());
}

EmTrace em_fit(SoftCaseSlotModel &model, const std::vector<std::string> &sample,
               const EmOptions &options) {
    validate(model);
    if (sample.empty()) throw ValidationError("em_fit: empty sample");
    if (options.eta <= 0.0) throw ValidationError("em_fit: eta must be positive");
    for (double c : model.coeffs)
        if (c <= 0.0)
            throw ValidationError("em_fit: initial coefficients must be positive");

    const std::size_t m = model.coeffs.size();
    const double s = static_cast<double>(sample.size());
    EmTrace trace;
    double previous = log_likelihood(model, sample);

    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        // grad_i = dL/dtheta_i of L = (1/S) sum_t ln(mix_t); then
        // theta_i * grad_i is the usual posterior-mass average, so the
        // update stays on the simplex for any eta.
        std::vector<double> grad(m, 0.0);
        for (const auto &token : sample) {
            double mix = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                mix += model.coeffs[i] * class_prob(model, i, token);
            if (mix <= 0.0)
                throw ValidationError("em_fit: token '" + token +
                                      "' has zero mixture probability");
            for (std::size_t i = 0; i < m; ++i)
                grad[i] += class_prob(model, i, token) / mix;
        }
        bool clamped = false;
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double next =
                model.coeffs[i] * (options.eta * (grad[i] / s - 1.0) + 1.0);
            if (next < 0.0) {
                next = 0.0;
                clamped = true;
            }
            model.coeffs[i] = next;
            sum += next;
        }
        if (clamped) {
            ++trace.clamped_steps;
            if (sum <= 0.0)
                throw ValidationError("em_fit: all coefficients clamped to zero");
        }
        for (std::size_t i = 0; i < m; ++i) model.coeffs[i] /= sum;

        ++trace.iterations;
        double current = log_likelihood(model, sample);
        trace.log_likelihoods.push_back(current);
        if (std::abs(current - previous) < options.min_improvement) break;
        previous = current;
    }
    return trace;
}

} // namespace lexmdl
