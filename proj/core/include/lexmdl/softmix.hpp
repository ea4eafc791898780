#ifndef LEXMDL_SOFTMIX_HPP
#define LEXMDL_SOFTMIX_HPP

#include <map>
#include <string>
#include <vector>

#include "lexmdl/common.hpp"

namespace lexmdl {

// Soft case slot model: P(n|v,r) = sum_i theta_i P_i(n), a finite mixture
// over (possibly overlapping) classes.  The within-class distributions are
// supplied; only the mixture coefficients are learned.
struct SoftCaseSlotModel {
    std::string verb;
    std::string slot;
    std::vector<std::string> class_names;
    std::vector<std::map<std::string, double>> within_class; // P_i(n)
    std::vector<double> coeffs;                              // theta
};

// Mean base-2 log mixture probability of the tokens; -infinity when some
// token has zero probability under every positive-coefficient class.
double log_likelihood(const SoftCaseSlotModel &model,
                      const std::vector<std::string> &sample);

struct EmOptions {
    std::size_t max_iterations = 500;
    double eta = 1.0;          // 1 = standard EM
    double min_improvement = 1e-8;
};

struct EmTrace {
    std::size_t iterations = 0;
    std::vector<double> log_likelihoods; // after each iteration
    std::size_t clamped_steps = 0; // eta != 1 can exit the simplex
};

// Exponentiated-gradient EM update
//   theta_i <- theta_i * (eta * (grad_i - 1) + 1)
// with the likelihood gradient taken in natural log so that eta = 1 is the
// standard EM step (the simplex is then preserved exactly).  Coefficients
// pushed negative by eta != 1 are clamped to zero and renormalized.
EmTrace em_fit(SoftCaseSlotModel &model, const std::vector<std::string> &sample,
               const EmOptions &options = {});

} // namespace lexmdl

#endif // LEXMDL_SOFTMIX_HPP
