#ifndef LEXMDL_DISAMBIG_HPP
#define LEXMDL_DISAMBIG_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lexmdl/cooccur.hpp"
#include "lexmdl/corpus.hpp"
#include "lexmdl/depforest.hpp"
#include "lexmdl/treecut.hpp"

namespace lexmdl {

enum class Choice { attach_v, attach_n1, none };

// Which rule produced the decision.  `fallback` is the configured default
// direction; it serializes as "default".
enum class Stage { hcm, tcm, fallback, la, sa, depenla, compound };

const char *stage_name(Stage stage);
const char *choice_name(Choice choice);

struct AttachmentDecision {
    Choice choice = Choice::none;
    Stage stage = Stage::fallback;
    double score_v = 0.0;
    double score_n1 = 0.0;
    double threshold_used = 0.0;
};

// Probabilities this close count as equal, so float noise cannot decide an
// attachment.
inline constexpr double kDecisionTolerance = 1e-12;

// Model registry for the back-off procedure.  Co-occurrence models are
// keyed by preposition; tree cut models by (head, preposition).  A missing
// entry contributes probability zero and the case falls through.
struct BackoffRegistry {
    std::map<std::string, HardCooccurrenceModel> hcm_verb; // p -> (n2, v) model
    std::map<std::string, HardCooccurrenceModel> hcm_noun; // p -> (n2, n1) model
    std::map<std::pair<std::string, std::string>, TreeCutModel> tcm_verb;
    std::map<std::pair<std::string, std::string>, TreeCutModel> tcm_noun;
    const Thesaurus *thesaurus = nullptr; // required when tcm models exist
};

// Class probability of the cut class dominating n2; the max over classes
// when sense-split leaves put n2 under several.  Zero outside the support.
double tcm_conditional(const TreeCutModel &model, const Thesaurus &t,
                       const std::string &n2);

// Compare co-occurrence probabilities, fall back to tree-cut class
// probabilities on a tie, fall back to the default on a second tie.
AttachmentDecision backoff_decide(const QuadrupleRecord &q,
                                  const BackoffRegistry &registry,
                                  Choice default_choice);

// Counts of (head, preposition) doubles, for the lexical association score.
struct DoubleCounts {
    std::map<std::pair<std::string, std::string>, Count> head_prep;
    std::map<std::string, Count> head_total;

    void add(const std::string &head, const std::string &prep, Count c = 1.0);
    Count of(const std::string &head, const std::string &prep) const;
    Count total(const std::string &head) const;
};

// Hindle-style lexical association: t-score between P(p|v) and P(p|n1)
// with binomial variances.
AttachmentDecision la_decide(const QuadrupleRecord &q, const DoubleCounts &doubles,
                             double t_threshold, Choice default_choice);

// DepenLA: when X_arg2 and X_p are dependent in the verb's slot-based
// forest, the verb side uses P(X_p=1 | X_arg2=1) instead of the marginal.
struct DepenLAVerbModel {
    const DependencyForestModel *forest = nullptr;
    Count data_size = 0.0;
    std::string object_slot = "arg2";
};

AttachmentDecision depen_la_decide(const QuadrupleRecord &q,
                                   const DepenLAVerbModel &verb_model,
                                   const DoubleCounts &noun_doubles,
                                   double t_threshold, Choice default_choice);

// Compound-noun attachment: larger conditional wins, tie gives none.
// attach_v stands for the left (adjacent) head, attach_n1 for the right.
AttachmentDecision compound_decide(double left_conditional,
                                   double right_conditional);

struct ScoredQuadruple {
    double score_v = 0.0;
    double score_n1 = 0.0;
    AttachmentLabel label = AttachmentLabel::attv;
};

struct SweepPoint {
    double threshold = 0.0;
    std::size_t total = 0;
    std::size_t decided = 0;
    std::size_t correct = 0;
    double coverage = 0.0;
    std::optional<double> accuracy; // empty when nothing was decided
};

// Accuracy-coverage table: decide when |score_v - score_n1| exceeds the
// threshold, toward the larger score.
std::vector<SweepPoint> threshold_sweep(const std::vector<ScoredQuadruple> &items,
                                        const std::vector<double> &thresholds);

} // namespace lexmdl

#endif // LEXMDL_DISAMBIG_HPP
