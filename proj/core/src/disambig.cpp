#include "lexmdl/disambig.hpp"

#include <algorithm>
#include <cmath>

#include "lexmdl/baselines.hpp"

namespace lexmdl {

const char *stage_name(Stage stage) {
    switch (stage) {
    case Stage::hcm: return "hcm";
    case Stage::tcm: return "tcm";
    case Stage::fallback: return "default";
    case Stage::la: return "la";
    case Stage::sa: return "sa";
    case Stage::depenla: return "depenla";
    case Stage::compound: return "compound";
    }
    return "?";
}

const char *choice_name(Choice choice) {
    switch (choice) {
    case Choice::attach_v: return "attv";
    case Choice::attach_n1: return "attn";
    case Choice::none: return "none";
    }
    return "?";
}

double tcm_conditional(const TreeCutModel &model, const Thesaurus &t,
                       const std::string &n2) {
    double best = 0.0;
    for (int leaf : t.sense_leaves(n2)) {
        WordProbability wp = word_probability(model, t, t.label(leaf));
        if (!wp.in_support) continue;
        auto pos = std::find(model.cut.begin(), model.cut.end(), wp.cut_node);
        double class_prob =
            model.probs[static_cast<std::size_t>(pos - model.cut.begin())];
        best = std::max(best, class_prob);
    }
    return best;
}

namespace {

double hcm_probability(const std::map<std::string, HardCooccurrenceModel> &models,
                       const std::string &prep, const std::string &n2,
                       const std::string &head) {
    auto it = models.find(prep);
    if (it == models.end()) return 0.0;
    return noun_given_verb(it->second, n2, head).value_or(0.0);
}

double tcm_probability(
    const std::map<std::pair<std::string, std::string>, TreeCutModel> &models,
    const Thesaurus *t, const std::string &head, const std::string &prep,
    const std::string &n2) {
    auto it = models.find({head, prep});
    if (it == models.end()) return 0.0;
    if (!t)
        throw ValidationError("tree cut models need a thesaurus in the registry");
    return tcm_conditional(it->second, *t, n2);
}

} // namespace

AttachmentDecision backoff_decide(const QuadrupleRecord &q,
                                  const BackoffRegistry &registry,
                                  Choice default_choice) {
    AttachmentDecision d;
    d.threshold_used = kDecisionTolerance;

    d.score_v = hcm_probability(registry.hcm_verb, q.p, q.n2, q.v);
    d.score_n1 = hcm_probability(registry.hcm_noun, q.p, q.n2, q.n1);
    if (std::abs(d.score_v - d.score_n1) > kDecisionTolerance) {
        d.stage = Stage::hcm;
        d.choice = d.score_v > d.score_n1 ? Choice::attach_v : Choice::attach_n1;
        return d;
    }

    d.score_v = tcm_probability(registry.tcm_verb, registry.thesaurus, q.v, q.p, q.n2);
    d.score_n1 =
        tcm_probability(registry.tcm_noun, registry.thesaurus, q.n1, q.p, q.n2);
    if (std::abs(d.score_v - d.score_n1) > kDecisionTolerance) {
        d.stage = Stage::tcm;
        d.choice = d.score_v > d.score_n1 ? Choice::attach_v : Choice::attach_n1;
        return d;
    }

    d.stage = Stage::fallback;
    d.choice = default_choice;
    d.score_v = 0.0;
    d.score_n1 = 0.0;
    return d;
}

void DoubleCounts::add(const std::string &head, const std::string &prep, Count c) {
    head_prep[{head, prep}] += c;
    head_total[head] += c;
}

Count DoubleCounts::of(const std::string &head, const std::string &prep) const {
    auto it = head_prep.find({head, prep});
    return it == head_prep.end() ? 0.0 : it->second;
}

Count DoubleCounts::total(const std::string &head) const {
    auto it = head_total.find(head);
    return it == head_total.end() ? 0.0 : it->second;
}

namespace {

AttachmentDecision decide_by_t(std::optional<double> p_v, Count n_v,
                               std::optional<double> p_n1, Count n_n1,
                               double t_threshold, Choice default_choice,
                               Stage decided_stage) {
    AttachmentDecision d;
    d.threshold_used = t_threshold;
    if (!p_v || !p_n1 || n_v <= 0.0 || n_n1 <= 0.0) {
        d.stage = Stage::fallback;
        d.choice = default_choice;
        return d;
    }
    d.score_v = *p_v;
    d.score_n1 = *p_n1;
    TScoreInputs in;
    in.p_v = *p_v;
    in.p_n1 = *p_n1;
    in.var_v = *p_v * (1.0 - *p_v);
    in.var_n1 = *p_n1 * (1.0 - *p_n1);
    in.n_v = n_v;
    in.n_n1 = n_n1;
    std::optional<double> t = t_score(in);
    if (t && *t > t_threshold) {
        d.stage = decided_stage;
        d.choice = Choice::attach_v;
    } else if (t && *t < -t_threshold) {
        d.stage = decided_stage;
        d.choice = Choice::attach_n1;
    } else {
        d.stage = Stage::fallback;
        d.choice = default_choice;
    }
    return d;
}

} // namespace

AttachmentDecision la_decide(const QuadrupleRecord &q, const DoubleCounts &doubles,
                             double t_threshold, Choice default_choice) {
    Count n_v = doubles.total(q.v);
    Count n_n1 = doubles.total(q.n1);
    std::optional<double> p_v, p_n1;
    if (n_v > 0.0) p_v = doubles.of(q.v, q.p) / n_v;
    if (n_n1 > 0.0) p_n1 = doubles.of(q.n1, q.p) / n_n1;
    return decide_by_t(p_v, n_v, p_n1, n_n1, t_threshold, default_choice,
                       Stage::la);
}

AttachmentDecision depen_la_decide(const QuadrupleRecord &q,
                                   const DepenLAVerbModel &verb_model,
                                   const DoubleCounts &noun_doubles,
                                   double t_threshold, Choice default_choice) {
    if (!verb_model.forest)
        return la_decide(q, noun_doubles, t_threshold, default_choice);

    const DependencyForestModel &forest = *verb_model.forest;
    int slot = forest.var_index(q.p);
    int arg2 = forest.var_index(verb_model.object_slot);
    if (slot < 0) {
        // The verb's patterns never saw this slot; give the noun side the say.
        return la_decide(q, noun_doubles, t_threshold, default_choice);
    }

    std::size_t sl = static_cast<std::size_t>(slot);
    int present = forest.variables[sl].value_index("1");
    std::optional<double> p_v;
    if (present >= 0) {
        if (arg2 >= 0) {
            std::size_t a2 = static_cast<std::size_t>(arg2);
            int a2_present = forest.variables[a2].value_index("1");
            if (a2_present >= 0 &&
                marginal_distribution(forest, a2)[static_cast<std::size_t>(
                    a2_present)] > 0.0) {
                // Dependent slots: condition on the object being present.
                // (The conditional equals the marginal when independent.)
                p_v = conditional_distribution(
                    forest, sl, a2,
                    static_cast<std::size_t>(a2_present))[static_cast<std::size_t>(present)];
            }
        }
        if (!p_v)
            p_v = marginal_distribution(forest, sl)[static_cast<std::size_t>(present)];
    } else {
        p_v = 0.0;
    }

    Count n_n1 = noun_doubles.total(q.n1);
    std::optional<double> p_n1;
    if (n_n1 > 0.0) p_n1 = noun_doubles.of(q.n1, q.p) / n_n1;
    return decide_by_t(p_v, verb_model.data_size, p_n1, n_n1, t_threshold,
                       default_choice, Stage::depenla);
}

AttachmentDecision compound_decide(double left_conditional,
                                   double right_conditional) {
    AttachmentDecision d;
    d.stage = Stage::compound;
    d.score_v = left_conditional;
    d.score_n1 = right_conditional;
    d.threshold_used = kDecisionTolerance;
    if (std::abs(left_conditional - right_conditional) <= kDecisionTolerance)
        d.choice = Choice::none;
    else
        d.choice = left_conditional > right_conditional ? Choice::attach_v
                                                        : Choice::attach_n1;
    return d;
}

std::vector<SweepPoint> threshold_sweep(const std::vector<ScoredQuadruple> &items,
                                        const std::vector<double> &thresholds) {
    if (items.empty())
        throw ValidationError("threshold_sweep: empty test set");
    std::vector<SweepPoint> out;
    out.reserve(thresholds.size());
    for (double threshold : thresholds) {
        SweepPoint point;
        point.threshold = threshold;
        point.total = items.size();
        for (const auto &item : items) {
            double diff = item.score_v - item.score_n1;
            if (std::abs(diff) <= threshold) continue;
            ++point.decided;
            AttachmentLabel chosen =
                diff > 0.0 ? AttachmentLabel::attv : AttachmentLabel::attn;
            if (chosen == item.label) ++point.correct;
        }
        point.coverage =
            static_cast<double>(point.decided) / static_cast<double>(point.total);
        if (point.decided > 0)
            point.accuracy = static_cast<double>(point.correct) /
                             static_cast<double>(point.decided);
        out.push_back(point);
    }
    return out;
}

} // namespace lexmdl
