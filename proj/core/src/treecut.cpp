#include "lexmdl/treecut.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace lexmdl {

namespace {

// Data bits contributed by one cut class: -f(C) * log2(P(C) / |C|).
double class_data_bits(double prob, Count freq, std::size_t leaf_count) {
    if (freq <= 0.0) return 0.0;
    if (prob <= 0.0) return kInfiniteBits;
    return -freq * std::log2(prob / static_cast<double>(leaf_count));
}

} // namespace

std::vector<Count> aggregate_frequencies(const Thesaurus &t, const Cut &cut,
                                         const std::map<std::string, Count> &leaf_freqs) {
    std::vector<Count> out(cut.size(), 0.0);
    for (const auto &kv : leaf_freqs) {
        int leaf = t.find(kv.first);
        if (leaf == -1)
            throw ValidationError("noun '" + kv.first +
                                  "' is not in the thesaurus");
        for (std::size_t i = 0; i < cut.size(); ++i)
            if (t.dominates(cut[i], leaf)) {
                out[i] += kv.second;
                break;
            }
    }
    return out;
}

TreeCutModel estimate_cut(const Thesaurus &t, const Cut &cut,
                          const std::vector<Count> &freqs, Count total) {
    if (total <= 0.0)
        throw ValidationError("estimate_cut: no data (total = 0)");
    if (freqs.size() != cut.size())
        throw ValidationError("estimate_cut: frequencies not aligned with cut");
    TreeCutModel model;
    model.cut = cut;
    model.sample_size = total;
    model.probs.reserve(cut.size());
    for (Count f : freqs) model.probs.push_back(f / total);
    model.subtree_root = cut.size() == 1
                             ? cut[0]
                             : [&] {
                                   int a = cut[0];
                                   while (!t.dominates(a, cut.back()))
                                       a = t.node(a).parent;
                                   return a;
                               }();
    return model;
}

WordProbability word_probability(const TreeCutModel &model, const Thesaurus &t,
                                 const std::string &noun) {
    WordProbability out;
    int leaf = t.find(noun);
    if (leaf == -1 || !t.is_leaf(leaf)) return out;
    std::set<int> in_cut(model.cut.begin(), model.cut.end());
    for (int id = leaf; id != -1; id = t.node(id).parent) {
        if (in_cut.count(id)) {
            auto pos = std::find(model.cut.begin(), model.cut.end(), id);
            std::size_t i = static_cast<std::size_t>(pos - model.cut.begin());
            out.prob = model.probs[i] / static_cast<double>(t.leaf_count(id));
            out.in_support = true;
            out.cut_node = id;
            return out;
        }
    }
    return out;
}

DescriptionLength description_length(const Thesaurus &t, const Cut &cut,
                                     const std::vector<Count> &freqs,
                                     Count total) {
    if (total <= 0.0)
        throw ValidationError("description_length: no data (total = 0)");
    DescriptionLength dl;
    dl.param_bits =
        0.5 * static_cast<double>(cut.size() - 1) * std::log2(total);
    for (std::size_t i = 0; i < cut.size(); ++i)
        dl.data_bits +=
            class_data_bits(freqs[i] / total, freqs[i], t.leaf_count(cut[i]));
    dl.total_bits = dl.param_bits + dl.data_bits;
    return dl;
}

DescriptionLength description_length(const Thesaurus &t, const TreeCutModel &model,
                                     const std::vector<Count> &freqs,
                                     Count total) {
    if (total <= 0.0)
        throw ValidationError("description_length: no data (total = 0)");
    DescriptionLength dl;
    dl.param_bits =
        0.5 * static_cast<double>(model.cut.size() - 1) * std::log2(total);
    for (std::size_t i = 0; i < model.cut.size(); ++i) {
        double bits = class_data_bits(model.probs[i], freqs[i],
                                      t.leaf_count(model.cut[i]));
        if (bits == kInfiniteBits) {
            dl.data_bits = kInfiniteBits;
            dl.total_bits = kInfiniteBits;
            return dl;
        }
        dl.data_bits += bits;
    }
    dl.total_bits = dl.param_bits + dl.data_bits;
    return dl;
}

Cut find_mdl(const Thesaurus &t, const Cut &base_cut,
             const std::vector<Count> &freqs, Count total,
             int subtree_root, VisitCounter *counter) {
    if (total <= 0.0)
        throw ValidationError("find_mdl: no data (total = 0)");
    if (base_cut.size() != freqs.size())
        throw ValidationError("find_mdl: frequencies not aligned with cut");

    int root = subtree_root == -1 ? t.root() : subtree_root;
    std::map<int, Count> base_freq;
    for (std::size_t i = 0; i < base_cut.size(); ++i)
        base_freq[base_cut[i]] = freqs[i];

    const double half_log_s = 0.5 * std::log2(total);

    // L' of the single-node cut [id] holding frequency f: the parameter term
    // counts |cut|/2 halves here (see header), the data term spreads P(id)
    // uniformly over the |id| leaves below.
    auto root_bits = [&](int id, Count f) {
        return half_log_s + class_data_bits(f / total, f, t.leaf_count(id));
    };

    struct Sub {
        Cut cut;
        double bits;
        Count freq;
    };
    std::function<Sub(int)> rec = [&](int id) -> Sub {
        if (counter) ++counter->visits;
        auto base = base_freq.find(id);
        if (base != base_freq.end())
            return Sub{Cut{id}, root_bits(id, base->second), base->second};

        if (t.is_leaf(id))
            throw ValidationError("find_mdl: node '" + t.label(id) +
                                  "' below the base cut");
        Sub combined{Cut{}, 0.0, 0.0};
        for (int c : t.node(id).children) {
            Sub child = rec(c);
            combined.cut.insert(combined.cut.end(), child.cut.begin(),
                                child.cut.end());
            combined.bits += child.bits;
            combined.freq += child.freq;
        }
        double collapsed = root_bits(id, combined.freq);
        if (collapsed < combined.bits - kBitsTolerance)
            return Sub{Cut{id}, collapsed, combined.freq};
        return combined;
    };
    return rec(root).cut;
}

GeneralizeResult generalize(const CaseSlotSample &sample, const Thesaurus &t,
                            double report_threshold) {
    if (report_threshold < 0.0 || report_threshold >= 1.0)
        throw ValidationError("report threshold must lie in [0, 1)");
    GeneralizeResult result;
    result.start = starting_cut(t, sample);
    Cut best = find_mdl(t, result.start);

    std::map<std::string, Count> leaf_freqs;
    for (std::size_t i = 0; i < result.start.cut.size(); ++i)
        leaf_freqs[t.label(result.start.cut[i])] = result.start.freqs[i];
    std::vector<Count> freqs = aggregate_frequencies(t, best, leaf_freqs);

    result.model = estimate_cut(t, best, freqs, result.start.total);
    result.model.verb = sample.verb;
    result.model.slot = sample.slot;
    result.model.subtree_root = result.start.subtree_root;

    for (std::size_t i = 0; i < best.size(); ++i)
        if (result.model.probs[i] >= report_threshold &&
            result.model.probs[i] > 0.0)
            result.report.emplace_back(t.label(best[i]), result.model.probs[i]);
    std::stable_sort(result.report.begin(), result.report.end(),
                     [](const auto &a, const auto &b) {
                         if (a.second != b.second) return a.second > b.second;
                         return a.first < b.first;
                     });
    return result;
}

double kl_to_empirical(const TreeCutModel &model, const Thesaurus &t,
                       const std::map<std::string, Count> &leaf_freqs,
                       Count total) {
    double kl = 0.0;
    for (const auto &kv : leaf_freqs) {
        if (kv.second <= 0.0) continue;
        double p = kv.second / total;
        WordProbability q = word_probability(model, t, kv.first);
        if (q.prob <= 0.0) return kInfiniteBits;
        kl += p * std::log2(p / q.prob);
    }
    return kl;
}

} // namespace lexmdl
