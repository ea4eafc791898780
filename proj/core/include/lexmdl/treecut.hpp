#ifndef LEXMDL_TREECUT_HPP
#define LEXMDL_TREECUT_HPP

#include <map>
#include <string>
#include <vector>

#include "lexmdl/corpus.hpp"
#include "lexmdl/thesaurus.hpp"

namespace lexmdl {

// A tree cut model M = (cut, probs): the learned case-slot generalization.
// probs sum to one over the cut; zero-probability classes stay in the model
// and are filtered only when reporting.
struct TreeCutModel {
    std::string verb;
    std::string slot;
    Cut cut;
    std::vector<double> probs; // aligned with cut
    Count sample_size = 0.0;
    int subtree_root = -1; // root of the model's support in the thesaurus
};

struct DescriptionLength {
    double param_bits = 0.0;
    double data_bits = 0.0;
    double total_bits = 0.0; // L' = param + data (the model-class constant
                             // log|G| is common to every cut and dropped)
};

// Sum per-leaf frequencies onto each cut node.
std::vector<Count> aggregate_frequencies(const Thesaurus &t, const Cut &cut,
                                         const std::map<std::string, Count> &leaf_freqs);

// MLE: probs[C] = f(C) / total.
TreeCutModel estimate_cut(const Thesaurus &t, const Cut &cut,
                          const std::vector<Count> &freqs, Count total);

struct WordProbability {
    double prob = 0.0;
    bool in_support = false;
    int cut_node = -1;
};

// Hard case slot model: P(n|v,r) = P(C)/|C| for the unique cut class C
// dominating the leaf labeled `noun`.
WordProbability word_probability(const TreeCutModel &model, const Thesaurus &t,
                                 const std::string &noun);

// L' of the MLE model for `cut` on the given per-cut-node frequencies.
// param_bits uses the free-parameter count (|cut| - 1).
DescriptionLength description_length(const Thesaurus &t, const Cut &cut,
                                     const std::vector<Count> &freqs,
                                     Count total);

// Same, but against an already-estimated model's probabilities; a positive
// frequency on a zero-probability class yields +infinity data_bits.
DescriptionLength description_length(const Thesaurus &t, const TreeCutModel &model,
                                     const std::vector<Count> &freqs,
                                     Count total);

struct VisitCounter {
    std::size_t visits = 0;
};

// Bottom-up search for the cut of minimum description length.  base_cut is
// treated as the leaf level (aggregated frequencies aligned with it); within
// the recursion the parameter term is |cut|/2 * log2(total) for every
// subtree, which differs from the free-parameter form only by a constant.
// Ties keep the finer cut.  Linear in the number of nodes.
Cut find_mdl(const Thesaurus &t, const Cut &base_cut,
             const std::vector<Count> &freqs, Count total,
             int subtree_root = -1, VisitCounter *counter = nullptr);

inline Cut find_mdl(const Thesaurus &t, const StartingCut &start,
                    VisitCounter *counter = nullptr) {
    return find_mdl(t, start.cut, start.freqs, start.total,
                    start.subtree_root, counter);
}

struct GeneralizeResult {
    TreeCutModel model;
    StartingCut start;
    // Classes with prob >= threshold, most probable first.
    std::vector<std::pair<std::string, double>> report;
};

// starting_cut -> find_mdl -> estimate_cut, plus the filtered report.
GeneralizeResult generalize(const CaseSlotSample &sample, const Thesaurus &t,
                            double report_threshold);

// D(empirical || model) in bits over the leaves; +infinity when the model
// gives zero probability to an observed leaf.
double kl_to_empirical(const TreeCutModel &model, const Thesaurus &t,
                       const std::map<std::string, Count> &leaf_freqs,
                       Count total);

} // namespace lexmdl

#endif // LEXMDL_TREECUT_HPP
