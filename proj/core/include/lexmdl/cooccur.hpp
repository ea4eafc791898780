#ifndef LEXMDL_COOCCUR_HPP
#define LEXMDL_COOCCUR_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexmdl/corpus.hpp"
#include "lexmdl/thesaurus.hpp"

namespace lexmdl {

struct WordClass {
    std::string id;
    std::vector<std::string> words; // sorted
};

struct Partition {
    std::vector<WordClass> classes;

    static Partition singletons(const std::vector<std::string> &vocabulary);
    std::size_t size() const { return classes.size(); }
    int class_of(const std::string &word) const; // -1 when absent
};

enum class ClusterSide { noun, verb };

struct MergeEvent {
    ClusterSide side;
    std::string left, right; // class ids merged (left < right)
    std::string merged;      // id of the new class
    double delta_bits;       // data-cost increase at decision time
    std::size_t iteration;   // outer 2D-Clustering round, 1-based
};

// P(n,v) = P(Cn,Cv) * P(n|Cn) * P(v|Cv) over disjoint word classes.
struct HardCooccurrenceModel {
    std::string slot;
    Partition nouns;
    Partition verbs;
    std::vector<double> class_joint; // |noun classes| x |verb classes|, row-major
    std::map<std::string, double> noun_given_class;
    std::map<std::string, double> verb_given_class;
    std::map<std::string, std::size_t> noun_class_index;
    std::map<std::string, std::size_t> verb_class_index;
    Count m = 0.0;

    double class_joint_at(std::size_t cn, std::size_t cv) const {
        return class_joint[cn * verbs.size() + cv];
    }
    double joint(const std::string &n, const std::string &v) const;
};

HardCooccurrenceModel estimate_model(const CooccurrenceSample &sample,
                                     const Partition &nouns,
                                     const Partition &verbs);

struct CoocDescriptionLength {
    std::size_t free_parameters = 0;
    double param_bits = 0.0;
    double data_bits = 0.0;
    double total_bits = 0.0;
};

// k = (|Pn|*|Pv| - 1) + (N - |Pn|) + (V - |Pv|) free parameters.
CoocDescriptionLength model_description_length(const HardCooccurrenceModel &model,
                                               const CooccurrenceSample &sample);

// Increase in data description length caused by merging two same-side
// classes, in bits; equals m times the mutual information reduction.
double merge_delta(const CooccurrenceSample &sample, const Partition &nouns,
                   const Partition &verbs, ClusterSide side, std::size_t i,
                   std::size_t j);

struct ClusterResult {
    Partition nouns;
    Partition verbs;
    std::vector<MergeEvent> history;
    HardCooccurrenceModel model;
};

// One Merge pass over the chosen side: candidates below the MDL threshold
// (k_B - k_A) * log2(m) / 2 in ascending delta order, at most `batch`
// merges.  Returns the performed merges.
std::vector<MergeEvent> merge_step(const CooccurrenceSample &sample,
                                   Partition &nouns, Partition &verbs,
                                   ClusterSide side, std::size_t batch);

// Alternate noun-side and verb-side merging until neither side changes.
ClusterResult two_d_clustering(const CooccurrenceSample &sample,
                               std::size_t batch_nouns, std::size_t batch_verbs);

// Binary-or-wider tree over the vocabulary; internal nodes are the merge
// events, unmerged top-level classes join under a synthetic root.
Thesaurus thesaurus_from_history(const std::vector<MergeEvent> &history,
                                 ClusterSide side,
                                 const std::vector<std::string> &vocabulary);

// P(n|v), class-smoothed: positive for unseen pairs whose classes co-occur.
// Empty when the verb has zero marginal probability (no decision possible).
std::optional<double> noun_given_verb(const HardCooccurrenceModel &model,
                                      const std::string &n, const std::string &v);

} // namespace lexmdl

#endif // LEXMDL_COOCCUR_HPP
