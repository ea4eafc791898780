#ifndef LEXMDL_BASELINES_HPP
#define LEXMDL_BASELINES_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "lexmdl/common.hpp"

namespace lexmdl {

// Smoothed conditional (f + 0.5) / (f_total + 0.5 N); strictly positive and
// summing to one over a vocabulary of size N.
double laplace(Count count, Count total, std::size_t vocab_size);

struct TScoreInputs {
    double p_v = 0.0;
    double p_n1 = 0.0;
    double var_v = 0.0;   // sigma^2 of the verb-side estimate
    double var_n1 = 0.0;  // sigma^2 of the noun-side estimate
    double n_v = 0.0;     // sample sizes behind the two estimates
    double n_n1 = 0.0;
};

// t = (p_v - p_n1) / sqrt(var_v/n_v + var_n1/n_n1); empty when the
// denominator vanishes (no decision possible).
std::optional<double> t_score(const TScoreInputs &inputs);

// log2(p_cond / p_marg); empty when either probability is zero.
std::optional<double> association_ratio(double p_cond, double p_marg);

struct ClassAssociation {
    double p_class_given_context = 0.0; // P(C|v,r)
    double p_class = 0.0;               // P(C)
};

// A(n|v,r) = max over classes containing n of P(C|v,r) log2(P(C|v,r)/P(C)).
std::optional<double>
selectional_association(const std::vector<ClassAssociation> &classes);

} // namespace lexmdl

#endif // LEXMDL_BASELINES_HPP
