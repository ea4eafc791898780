#include "lexmdl/cooccur.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace lexmdl {

namespace {

std::map<std::string, Count> side_marginals(const CooccurrenceSample &sample,
                                            ClusterSide side) {
    std::map<std::string, Count> out;
    const auto &vocab =
        side == ClusterSide::noun ? sample.noun_vocab : sample.verb_vocab;
    for (const auto &w : vocab) out[w] = 0.0;
    for (const auto &kv : sample.counts)
        out[side == ClusterSide::noun ? kv.first.first : kv.first.second] +=
            kv.second;
    return out;
}

std::size_t free_parameters(std::size_t pn, std::size_t pv, std::size_t n_words,
                            std::size_t v_words) {
    return pn * pv - 1 + (n_words - pn) + (v_words - pv);
}

// Counts of one side's classes against the other side's classes.
struct ClassMatrix {
    std::vector<std::vector<Count>> rows; // [this side class][other side class]
    std::vector<Count> row_totals;
};

ClassMatrix class_matrix(const CooccurrenceSample &sample, const Partition &rows,
                         const Partition &cols, ClusterSide row_side) {
    std::map<std::string, std::size_t> row_of, col_of;
    for (std::size_t i = 0; i < rows.classes.size(); ++i)
        for (const auto &w : rows.classes[i].words) row_of[w] = i;
    for (std::size_t j = 0; j < cols.classes.size(); ++j)
        for (const auto &w : cols.classes[j].words) col_of[w] = j;

    ClassMatrix m;
    m.rows.assign(rows.classes.size(),
                  std::vector<Count>(cols.classes.size(), 0.0));
    m.row_totals.assign(rows.classes.size(), 0.0);
    for (const auto &kv : sample.counts) {
        const std::string &rw =
            row_side == ClusterSide::noun ? kv.first.first : kv.first.second;
        const std::string &cw =
            row_side == ClusterSide::noun ? kv.first.second : kv.first.first;
        auto ri = row_of.find(rw);
        auto ci = col_of.find(cw);
        if (ri == row_of.end() || ci == col_of.end())
            throw ValidationError("word pair (" + kv.first.first + ", " +
                                  kv.first.second +
                                  ") not covered by the partitions");
        m.rows[ri->second][ci->second] += kv.second;
        m.row_totals[ri->second] += kv.second;
    }
    return m;
}

double row_merge_delta(const ClassMatrix &m, std::size_t i, std::size_t j) {
    double delta = 0.0;
    Count fi = m.row_totals[i], fj = m.row_totals[j];
    for (std::size_t c = 0; c < m.rows[i].size(); ++c) {
        Count a = m.rows[i][c], b = m.rows[j][c];
        if (a + b > 0.0 && fi + fj > 0.0)
            delta -= (a + b) * std::log2((a + b) / (fi + fj));
        if (a > 0.0) delta += a * std::log2(a / fi);
        if (b > 0.0) delta += b * std::log2(b / fj);
    }
    return std::max(delta, 0.0);
}

// Fresh synthetic id: "N<k>"/"V<k>" with collision underscores.
std::string fresh_class_id(const Partition &rows, const Partition &cols,
                           ClusterSide side) {
    char prefix = side == ClusterSide::noun ? 'N' : 'V';
    std::size_t next = 1;
    for (const auto &c : rows.classes) {
        const std::string &id = c.id;
        if (id.size() >= 2 && id[0] == prefix) {
            std::size_t digits = 0;
            while (1 + digits < id.size() && isdigit(static_cast<unsigned char>(id[1 + digits])))
                ++digits;
            if (digits > 0)
                next = std::max(
                    next, static_cast<std::size_t>(
                              std::stoull(id.substr(1, digits))) + 1);
        }
    }
    std::string id = std::string(1, prefix) + std::to_string(next);
    auto collides = [&](const std::string &candidate) {
        for (const auto &c : rows.classes)
            if (c.id == candidate) return true;
        for (const auto &c : cols.classes)
            if (c.id == candidate) return true;
        for (const auto &c : rows.classes)
            for (const auto &w : c.words)
                if (w == candidate) return true;
        return false;
    };
    while (collides(id)) id += "_";
    return id;
}

} // namespace

Partition Partition::singletons(const std::vector<std::string> &vocabulary) {
    Partition p;
    p.classes.reserve(vocabulary.size());
    for (const auto &w : vocabulary) p.classes.push_back({w, {w}});
    std::sort(p.classes.begin(), p.classes.end(),
              [](const WordClass &a, const WordClass &b) { return a.id < b.id; });
    return p;
}

int Partition::class_of(const std::string &word) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (const auto &w : classes[i].words)
            if (w == word) return static_cast<int>(i);
    return -1;
}

double HardCooccurrenceModel::joint(const std::string &n,
                                    const std::string &v) const {
    auto ni = noun_given_class.find(n);
    auto vi = verb_given_class.find(v);
    if (ni == noun_given_class.end() || vi == verb_given_class.end()) return 0.0;
    return class_joint_at(noun_class_index.at(n), verb_class_index.at(v)) *
           ni->second * vi->second;
}

HardCooccurrenceModel estimate_model(const CooccurrenceSample &sample,
                                     const Partition &nouns,
                                     const Partition &verbs) {
    if (sample.m <= 0.0)
        throw ValidationError("estimate_model: no data (m = 0)");
    for (const auto &c : nouns.classes)
        if (c.words.empty())
            throw ValidationError("empty noun class '" + c.id + "'");
    for (const auto &c : verbs.classes)
        if (c.words.empty())
            throw ValidationError("empty verb class '" + c.id + "'");

    auto check_cover = [](const Partition &p, const std::vector<std::string> &vocab,
                          const char *side) {
        std::set<std::string> seen;
        std::size_t total = 0;
        for (const auto &c : p.classes) {
            total += c.words.size();
            seen.insert(c.words.begin(), c.words.end());
        }
        if (seen.size() != total)
            throw ValidationError(std::string(side) + " classes overlap");
        for (const auto &w : vocab)
            if (!seen.count(w))
                throw ValidationError(std::string(side) + " '" + w +
                                      "' missing from the partition");
        if (seen.size() != vocab.size())
            throw ValidationError(std::string(side) +
                                  " partition contains words outside the vocabulary");
    };
    check_cover(nouns, sample.noun_vocab, "noun");
    check_cover(verbs, sample.verb_vocab, "verb");

    HardCooccurrenceModel model;
    model.slot = sample.slot;
    model.nouns = nouns;
    model.verbs = verbs;
    model.m = sample.m;

    ClassMatrix m = class_matrix(sample, nouns, verbs, ClusterSide::noun);
    model.class_joint.assign(nouns.size() * verbs.size(), 0.0);
    for (std::size_t i = 0; i < nouns.size(); ++i)
        for (std::size_t j = 0; j < verbs.size(); ++j)
            model.class_joint[i * verbs.size() + j] = m.rows[i][j] / sample.m;

    auto word_conditionals = [](const Partition &p,
                                const std::map<std::string, Count> &marginals) {
        std::map<std::string, double> out;
        for (const auto &c : p.classes) {
            Count total = 0.0;
            for (const auto &w : c.words) total += marginals.at(w);
            for (const auto &w : c.words)
                out[w] = total > 0.0
                             ? marginals.at(w) / total
                             : 1.0 / static_cast<double>(c.words.size());
        }
        return out;
    };
    model.noun_given_class =
        word_conditionals(nouns, side_marginals(sample, ClusterSide::noun));
    model.verb_given_class =
        word_conditionals(verbs, side_marginals(sample, ClusterSide::verb));
    for (std::size_t i = 0; i < nouns.size(); ++i)
        for (const auto &w : nouns.classes[i].words) model.noun_class_index[w] = i;
    for (std::size_t j = 0; j < verbs.size(); ++j)
        for (const auto &w : verbs.classes[j].words) model.verb_class_index[w] = j;
    return model;
}

CoocDescriptionLength model_description_length(const HardCooccurrenceModel &model,
                                               const CooccurrenceSample &sample) {
    CoocDescriptionLength dl;
    std::size_t n_words = 0, v_words = 0;
    for (const auto &c : model.nouns.classes) n_words += c.words.size();
    for (const auto &c : model.verbs.classes) v_words += c.words.size();
    dl.free_parameters =
        free_parameters(model.nouns.size(), model.verbs.size(), n_words, v_words);
    dl.param_bits =
        static_cast<double>(dl.free_parameters) / 2.0 * std::log2(sample.m);
    for (const auto &kv : sample.counts) {
        if (kv.second <= 0.0) continue;
        double p = model.joint(kv.first.first, kv.first.second);
        if (p <= 0.0) {
            dl.data_bits = kInfiniteBits;
            dl.total_bits = kInfiniteBits;
            return dl;
        }
        dl.data_bits -= kv.second * std::log2(p);
    }
    dl.total_bits = dl.param_bits + dl.data_bits;
    return dl;
}

double merge_delta(const CooccurrenceSample &sample, const Partition &nouns,
                   const Partition &verbs, ClusterSide side, std::size_t i,
                   std::size_t j) {
    if (i == j) throw ValidationError("merge_delta needs two distinct classes");
    const Partition &rows = side == ClusterSide::noun ? nouns : verbs;
    const Partition &cols = side == ClusterSide::noun ? verbs : nouns;
    ClassMatrix m = class_matrix(sample, rows, cols, side);
    return row_merge_delta(m, i, j);
}

std::vector<MergeEvent> merge_step(const CooccurrenceSample &sample,
                                   Partition &nouns, Partition &verbs,
                                   ClusterSide side, std::size_t batch) {
    if (batch < 1) throw ValidationError("merge batch size must be positive");
    Partition &rows = side == ClusterSide::noun ? nouns : verbs;
    Partition &cols = side == ClusterSide::noun ? verbs : nouns;
    if (rows.size() < 2 || sample.m <= 0.0) return {};

    std::size_t n_words = 0, v_words = 0;
    for (const auto &c : nouns.classes) n_words += c.words.size();
    for (const auto &c : verbs.classes) v_words += c.words.size();

    std::size_t k_before, k_after;
    if (side == ClusterSide::noun) {
        k_before = free_parameters(nouns.size(), verbs.size(), n_words, v_words);
        k_after = free_parameters(nouns.size() - 1, verbs.size(), n_words, v_words);
    } else {
        k_before = free_parameters(nouns.size(), verbs.size(), n_words, v_words);
        k_after = free_parameters(nouns.size(), verbs.size() - 1, n_words, v_words);
    }
    // Model-cost savings of one merge; data-cost increases at or beyond it
    // are discarded.
    double threshold = static_cast<double>(k_before - k_after) / 2.0 *
                       std::log2(sample.m);

    ClassMatrix m = class_matrix(sample, rows, cols, side);
    struct Candidate {
        double delta;
        std::string a, b; // class ids, a < b
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            double delta = row_merge_delta(m, i, j);
            if (delta < threshold) {
                auto [a, b] = std::minmax(rows.classes[i].id, rows.classes[j].id);
                candidates.push_back({delta, a, b});
            }
        }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate &x, const Candidate &y) {
                  if (x.delta != y.delta) return x.delta < y.delta;
                  if (x.a != y.a) return x.a < y.a;
                  return x.b < y.b;
              });

    std::vector<MergeEvent> events;
    auto find_class = [&rows](const std::string &id) -> int {
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows.classes[i].id == id) return static_cast<int>(i);
        return -1;
    };
    // Track the current container of each pre-step class id.
    std::map<std::string, std::string> container;
    for (const auto &c : rows.classes) container[c.id] = c.id;
    auto resolve = [&container](std::string id) {
        while (container.at(id) != id) id = container.at(id);
        return id;
    };

    for (const auto &cand : candidates) {
        if (events.size() >= batch) break;
        std::string ida = resolve(cand.a);
        std::string idb = resolve(cand.b);
        if (ida == idb) continue;
        int ia = find_class(ida), ib = find_class(idb);
        WordClass merged;
        merged.id = fresh_class_id(rows, cols, side);
        merged.words = rows.classes[static_cast<std::size_t>(ia)].words;
        merged.words.insert(merged.words.end(),
                            rows.classes[static_cast<std::size_t>(ib)].words.begin(),
                            rows.classes[static_cast<std::size_t>(ib)].words.end());
        std::sort(merged.words.begin(), merged.words.end());

        MergeEvent event;
        event.side = side;
        event.left = std::min(ida, idb);
        event.right = std::max(ida, idb);
        event.merged = merged.id;
        event.delta_bits = cand.delta;
        event.iteration = 0;
        events.push_back(event);

        container[ida] = merged.id;
        container[idb] = merged.id;
        container[merged.id] = merged.id;
        std::size_t lo = static_cast<std::size_t>(std::min(ia, ib));
        std::size_t hi = static_cast<std::size_t>(std::max(ia, ib));
        rows.classes.erase(rows.classes.begin() + static_cast<long>(hi));
        rows.classes.erase(rows.classes.begin() + static_cast<long>(lo));
        rows.classes.push_back(std::move(merged));
    }
    return events;
}

ClusterResult two_d_clustering(const CooccurrenceSample &sample,
                               std::size_t batch_nouns, std::size_t batch_verbs) {
    // Zero-marginal words cannot inform the clustering; they sit out in a
    // reserved class appended afterwards.
    auto active = [&](ClusterSide side) {
        std::vector<std::string> in, out;
        for (const auto &kv : side_marginals(sample, side))
            (kv.second > 0.0 ? in : out).push_back(kv.first);
        return std::make_pair(in, out);
    };
    auto [nouns_in, nouns_out] = active(ClusterSide::noun);
    auto [verbs_in, verbs_out] = active(ClusterSide::verb);

    CooccurrenceSample clustered = sample;
    clustered.noun_vocab = nouns_in;
    clustered.verb_vocab = verbs_in;

    ClusterResult result;
    result.nouns = Partition::singletons(nouns_in);
    result.verbs = Partition::singletons(verbs_in);

    for (std::size_t iteration = 1;; ++iteration) {
        auto noun_events = merge_step(clustered, result.nouns, result.verbs,
                                      ClusterSide::noun, batch_nouns);
        auto verb_events = merge_step(clustered, result.nouns, result.verbs,
                                      ClusterSide::verb, batch_verbs);
        for (auto &e : noun_events) e.iteration = iteration;
        for (auto &e : verb_events) e.iteration = iteration;
        result.history.insert(result.history.end(), noun_events.begin(),
                              noun_events.end());
        result.history.insert(result.history.end(), verb_events.begin(),
                              verb_events.end());
        if (noun_events.empty() && verb_events.empty()) break;
    }

    auto append_reserved = [](Partition &p, const std::vector<std::string> &words,
                              const char *id) {
        if (words.empty()) return;
        std::string name = id;
        for (bool collides = true; collides;) {
            collides = false;
            for (const auto &c : p.classes)
                if (c.id == name) { collides = true; break; }
            if (collides) name += "_";
        }
        p.classes.push_back({name, words});
    };
    append_reserved(result.nouns, nouns_out, "UNSEEN");
    append_reserved(result.verbs, verbs_out, "UNSEEN");

    result.model = estimate_model(sample, result.nouns, result.verbs);
    return result;
}

Thesaurus thesaurus_from_history(const std::vector<MergeEvent> &history,
                                 ClusterSide side,
                                 const std::vector<std::string> &vocabulary) {
    std::vector<std::pair<std::string, std::string>> edges;
    std::set<std::string> top(vocabulary.begin(), vocabulary.end());
    std::set<std::string> labels(vocabulary.begin(), vocabulary.end());
    for (const auto &event : history) {
        if (event.side != side) continue;
        if (!top.count(event.left) || !top.count(event.right))
            throw ValidationError("merge history references unknown class '" +
                                  event.left + "' or '" + event.right + "'");
        if (!labels.insert(event.merged).second)
            throw ValidationError("duplicate class id '" + event.merged +
                                  "' in merge history");
        edges.emplace_back(event.merged, event.left);
        edges.emplace_back(event.merged, event.right);
        top.erase(event.left);
        top.erase(event.right);
        top.insert(event.merged);
    }
    // Fully merged: the final event is already the root.
    if (top.size() == 1 && !edges.empty() && labels.count(*top.begin()) &&
        !std::count(vocabulary.begin(), vocabulary.end(), *top.begin()))
        return Thesaurus::from_edges(edges);

    std::string root = "ROOT";
    while (labels.count(root)) root += "_";
    for (const auto &t : top) edges.emplace_back(root, t);
    return Thesaurus::from_edges(edges);
}

std::optional<double> noun_given_verb(const HardCooccurrenceModel &model,
                                      const std::string &n, const std::string &v) {
    auto vi = model.verb_given_class.find(v);
    if (vi == model.verb_given_class.end()) return std::nullopt;
    std::size_t cv = model.verb_class_index.at(v);
    double p_cv = 0.0;
    for (std::size_t cn = 0; cn < model.nouns.size(); ++cn)
        p_cv += model.class_joint_at(cn, cv);
    if (p_cv * vi->second <= 0.0) return std::nullopt;

    auto ni = model.noun_given_class.find(n);
    if (ni == model.noun_given_class.end()) return 0.0;
    return model.class_joint_at(model.noun_class_index.at(n), cv) * ni->second /
           p_cv;
}

} // namespace lexmdl
