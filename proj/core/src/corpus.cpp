#include "lexmdl/corpus.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace lexmdl {

namespace {

std::vector<std::string> split_tabs(const std::string &line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    for (;;) {
        auto pos = line.find('\t', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

bool skippable(const std::string &line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!isspace(static_cast<unsigned char>(c))) return false;
    }
    return true; // blank
}

Count parse_count(const std::string &field, std::size_t lineno) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(field, &used);
    } catch (const std::exception &) {
        throw ParseError("bad count '" + field + "'", lineno);
    }
    if (used != field.size())
        throw ParseError("bad count '" + field + "'", lineno);
    if (value < 0.0)
        throw ValidationError("negative count '" + field + "' on line " +
                              std::to_string(lineno));
    return value;
}

void require_token(const std::string &field, const char *what,
                   std::size_t lineno) {
    if (field.empty())
        throw ParseError(std::string("empty ") + what + " field", lineno);
}

// Reads lines, strips \r, reports (line, lineno) for non-comment lines.
template <typename Fn> void for_each_data_line(std::istream &in, Fn fn) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (skippable(line)) continue;
        fn(line, lineno);
    }
}

} // namespace

std::vector<CaseSlotSample> parse_case_slot_file(std::istream &in) {
    // Aggregate counts per (verb, slot, noun); duplicate lines accumulate.
    std::map<std::pair<std::string, std::string>, CaseSlotSample> samples;
    for_each_data_line(in, [&](const std::string &line, std::size_t lineno) {
        auto fields = split_tabs(line);
        if (fields.size() != 3 && fields.size() != 4)
            throw ParseError("expected 3 or 4 tab-separated fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        require_token(fields[0], "verb", lineno);
        require_token(fields[1], "slot", lineno);
        require_token(fields[2], "noun", lineno);
        Count c = fields.size() == 4 ? parse_count(fields[3], lineno) : 1.0;
        auto key = std::make_pair(fields[0], fields[1]);
        auto &sample = samples[key];
        sample.verb = fields[0];
        sample.slot = fields[1];
        sample.counts[fields[2]] += c;
        sample.total += c;
    });
    std::vector<CaseSlotSample> out;
    out.reserve(samples.size());
    for (auto &kv : samples) out.push_back(std::move(kv.second));
    return out;
}

std::vector<CaseFrameSample> parse_case_frame_file(std::istream &in) {
    // Format: verb \t slot=value,slot=value,... \t count
    // An empty middle field is the empty frame.  The directive comment
    //   #!granularity=word|class|slot
    // tags all following frames; default is word.
    std::map<std::string, CaseFrameSample> samples;
    std::vector<std::string> order;
    Granularity gran = Granularity::word;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("#!granularity=", 0) == 0) {
            std::string g = line.substr(14);
            if (g == "word") gran = Granularity::word;
            else if (g == "class") gran = Granularity::clazz;
            else if (g == "slot") gran = Granularity::slot;
            else throw ParseError("unknown granularity '" + g + "'", lineno);
            continue;
        }
        if (skippable(line)) continue;

        auto fields = split_tabs(line);
        if (fields.size() != 2 && fields.size() != 3)
            throw ParseError("expected 2 or 3 tab-separated fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        require_token(fields[0], "verb", lineno);
        CaseFrame frame;
        frame.count = fields.size() == 3 ? parse_count(fields[2], lineno) : 1.0;
        if (!fields[1].empty()) {
            std::stringstream ss(fields[1]);
            std::string item;
            while (std::getline(ss, item, ',')) {
                auto eq = item.find('=');
                if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
                    throw ParseError("bad slot assignment '" + item + "'",
                                     lineno);
                std::string slot = item.substr(0, eq);
                std::string value = item.substr(eq + 1);
                if (value == "0")
                    throw ParseError("explicit 0 value for slot '" + slot +
                                         "'; absent slots are implicit",
                                     lineno);
                if (gran == Granularity::slot && value != "1")
                    throw ValidationError(
                        "slot granularity allows only value 1, got '" + value +
                        "' on line " + std::to_string(lineno));
                if (!frame.slots.emplace(slot, value).second)
                    throw ParseError("slot '" + slot + "' assigned twice",
                                     lineno);
            }
        }
        auto it = samples.find(fields[0]);
        if (it == samples.end()) {
            it = samples.emplace(fields[0], CaseFrameSample{}).first;
            it->second.verb = fields[0];
            order.push_back(fields[0]);
        }
        it->second.granularity = gran;
        it->second.frames.push_back(std::move(frame));
    }

    std::vector<CaseFrameSample> out;
    out.reserve(order.size());
    for (const auto &verb : order) {
        CaseFrameSample &s = samples[verb];
        std::set<std::string> inv;
        for (const auto &f : s.frames)
            for (const auto &kv : f.slots) inv.insert(kv.first);
        s.slot_inventory.assign(inv.begin(), inv.end());
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<CooccurrenceSample> parse_cooccurrence_file(std::istream &in) {
    // Format: slot \t noun \t verb [\t count]
    std::map<std::string, CooccurrenceSample> samples;
    for_each_data_line(in, [&](const std::string &line, std::size_t lineno) {
        auto fields = split_tabs(line);
        if (fields.size() != 3 && fields.size() != 4)
            throw ParseError("expected 3 or 4 tab-separated fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        require_token(fields[0], "slot", lineno);
        require_token(fields[1], "noun", lineno);
        require_token(fields[2], "verb", lineno);
        Count c = fields.size() == 4 ? parse_count(fields[3], lineno) : 1.0;
        auto &sample = samples[fields[0]];
        sample.slot = fields[0];
        sample.counts[{fields[1], fields[2]}] += c;
        sample.m += c;
    });
    std::vector<CooccurrenceSample> out;
    out.reserve(samples.size());
    for (auto &kv : samples) {
        auto &s = kv.second;
        std::set<std::string> nouns, verbs;
        for (const auto &e : s.counts) {
            nouns.insert(e.first.first);
            verbs.insert(e.first.second);
        }
        s.noun_vocab.assign(nouns.begin(), nouns.end());
        s.verb_vocab.assign(verbs.begin(), verbs.end());
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<QuadrupleRecord> parse_quadruple_file(std::istream &in) {
    std::vector<QuadrupleRecord> out;
    for_each_data_line(in, [&](const std::string &line, std::size_t lineno) {
        auto fields = split_tabs(line);
        if (fields.size() != 4 && fields.size() != 5)
            throw ParseError("expected 4 or 5 tab-separated fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        QuadrupleRecord q;
        require_token(fields[0], "verb", lineno);
        require_token(fields[1], "n1", lineno);
        require_token(fields[2], "preposition", lineno);
        require_token(fields[3], "n2", lineno);
        q.v = fields[0];
        q.n1 = fields[1];
        q.p = fields[2];
        q.n2 = fields[3];
        if (fields.size() == 5) {
            if (fields[4] == "attv") q.label = AttachmentLabel::attv;
            else if (fields[4] == "attn") q.label = AttachmentLabel::attn;
            else throw ParseError("bad label '" + fields[4] + "'", lineno);
        }
        out.push_back(std::move(q));
    });
    return out;
}

void write_case_slot_file(std::ostream &out,
                          const std::vector<CaseSlotSample> &samples) {
    for (const auto &s : samples)
        for (const auto &kv : s.counts)
            out << s.verb << '\t' << s.slot << '\t' << kv.first << '\t'
                << kv.second << '\n';
}

AssignmentTable frames_to_vectors(const CaseFrameSample &sample) {
    AssignmentTable table;
    table.variables = sample.slot_inventory;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < table.variables.size(); ++i)
        index[table.variables[i]] = i;

    std::map<std::vector<std::string>, Count> rows;
    for (const auto &frame : sample.frames) {
        std::vector<std::string> row(table.variables.size(), "0");
        for (const auto &kv : frame.slots) {
            auto it = index.find(kv.first);
            if (it == index.end())
                throw ValidationError("frame mentions slot '" + kv.first +
                                      "' outside the inventory");
            row[it->second] = kv.second;
        }
        rows[row] += frame.count;
        table.total += frame.count;
    }
    table.rows.assign(rows.begin(), rows.end());
    return table;
}

std::vector<Fold> split_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ValidationError("split_folds requires k >= 2");
    if (n < k)
        throw ValidationError("split_folds requires at least k records, got " +
                              std::to_string(n));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rng.next_below(i)]);

    std::vector<Fold> folds(k);
    for (std::size_t i = 0; i < n; ++i)
        folds[i % k].test.push_back(order[i]);
    for (std::size_t f = 0; f < k; ++f) {
        std::sort(folds[f].test.begin(), folds[f].test.end());
        for (std::size_t g = 0; g < k; ++g)
            if (g != f)
                folds[f].train.insert(folds[f].train.end(),
                                      folds[g].test.begin(),
                                      folds[g].test.end());
        std::sort(folds[f].train.begin(), folds[f].train.end());
    }
    return folds;
}

} // namespace lexmdl
