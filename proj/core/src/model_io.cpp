#include "lexmdl/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lexmdl {

using nlohmann::json;

namespace {

void expect_kind(const json &j, const char *kind) {
    if (!j.is_object() || j.value("kind", "") != kind)
        throw ValidationError(std::string("expected a '") + kind + "' document");
}

json partition_to_json(const Partition &p) {
    json out = json::array();
    for (const auto &c : p.classes)
        out.push_back({{"id", c.id}, {"words", c.words}});
    return out;
}

Partition partition_from_json(const json &j) {
    Partition p;
    for (const auto &c : j)
        p.classes.push_back(
            {c.at("id").get<std::string>(),
             c.at("words").get<std::vector<std::string>>()});
    return p;
}

} // namespace

json tree_cut_to_json(const TreeCutModel &model, const Thesaurus &t) {
    json cut = json::array();
    for (std::size_t i = 0; i < model.cut.size(); ++i)
        cut.push_back({t.label(model.cut[i]), model.probs[i]});
    return json{{"kind", "tree_cut_model"},
                {"verb", model.verb},
                {"slot", model.slot},
                {"sample_size", model.sample_size},
                {"support_root",
                 model.subtree_root >= 0 ? json(t.label(model.subtree_root))
                                         : json()},
                {"cut", cut}};
}

TreeCutModel tree_cut_from_json(const json &j, const Thesaurus &t) {
    expect_kind(j, "tree_cut_model");
    TreeCutModel model;
    model.verb = j.at("verb").get<std::string>();
    model.slot = j.at("slot").get<std::string>();
    model.sample_size = j.at("sample_size").get<double>();
    if (!j.at("support_root").is_null()) {
        std::string label = j.at("support_root").get<std::string>();
        model.subtree_root = t.find(label);
        if (model.subtree_root == -1)
            throw ValidationError("support root '" + label +
                                  "' is not in the thesaurus");
    }
    for (const auto &entry : j.at("cut")) {
        std::string label = entry.at(0).get<std::string>();
        int id = t.find(label);
        if (id == -1)
            throw ValidationError("cut node '" + label +
                                  "' is not in the thesaurus");
        model.cut.push_back(id);
        model.probs.push_back(entry.at(1).get<double>());
    }
    return model;
}

json forest_to_json(const DependencyForestModel &model) {
    json variables = json::array();
    for (const auto &v : model.variables)
        variables.push_back({{"name", v.name}, {"domain", v.domain}});
    json nodes = json::object();
    for (std::size_t i = 0; i < model.variables.size(); ++i) {
        json node;
        std::size_t ki = model.variables[i].k();
        if (model.parent[i] < 0) {
            node["parent"] = nullptr;
            node["table"] = model.tables[i];
        } else {
            std::size_t p = static_cast<std::size_t>(model.parent[i]);
            node["parent"] = model.variables[p].name;
            json rows = json::array();
            for (std::size_t a = 0; a < model.variables[p].k(); ++a) {
                json row = json::array();
                for (std::size_t b = 0; b < ki; ++b)
                    row.push_back(model.tables[i][a * ki + b]);
                rows.push_back(row);
            }
            node["table"] = rows;
        }
        nodes[model.variables[i].name] = node;
    }
    json fallback = json::array();
    for (const auto &fr : model.fallback_rows)
        fallback.push_back({model.variables[fr.first].name, fr.second});
    return json{{"kind", "dependency_forest_model"},
                {"verb", model.verb},
                {"variables", variables},
                {"nodes", nodes},
                {"fallback_rows", fallback}};
}

DependencyForestModel forest_from_json(const json &j) {
    expect_kind(j, "dependency_forest_model");
    DependencyForestModel model;
    model.verb = j.value("verb", "");
    for (const auto &v : j.at("variables")) {
        VariableSpec spec;
        spec.name = v.at("name").get<std::string>();
        spec.domain = v.at("domain").get<std::vector<std::string>>();
        if (spec.domain.empty())
            throw ValidationError("variable '" + spec.name + "' has empty domain");
        model.variables.push_back(std::move(spec));
    }
    model.parent.assign(model.variables.size(), -1);
    model.tables.resize(model.variables.size());
    const json &nodes = j.at("nodes");
    for (std::size_t i = 0; i < model.variables.size(); ++i) {
        const auto &name = model.variables[i].name;
        if (!nodes.contains(name))
            throw ValidationError("missing node table for variable '" + name + "'");
        const json &node = nodes.at(name);
        std::size_t ki = model.variables[i].k();
        if (node.at("parent").is_null()) {
            auto table = node.at("table").get<std::vector<double>>();
            if (table.size() != ki)
                throw ValidationError("marginal table size mismatch for '" +
                                      name + "'");
            model.tables[i] = std::move(table);
        } else {
            std::string parent_name = node.at("parent").get<std::string>();
            int p = model.var_index(parent_name);
            if (p < 0)
                throw ValidationError("unknown parent '" + parent_name + "'");
            model.parent[i] = p;
            std::size_t kp = model.variables[static_cast<std::size_t>(p)].k();
            const json &rows = node.at("table");
            if (rows.size() != kp)
                throw ValidationError("conditional table rows mismatch for '" +
                                      name + "'");
            model.tables[i].reserve(kp * ki);
            for (const auto &row : rows) {
                if (row.size() != ki)
                    throw ValidationError("conditional table row size mismatch "
                                          "for '" + name + "'");
                for (const auto &cell : row)
                    model.tables[i].push_back(cell.get<double>());
            }
        }
    }
    // Reject cyclic parent chains.
    for (std::size_t i = 0; i < model.parent.size(); ++i) {
        std::size_t steps = 0;
        for (int p = model.parent[i]; p >= 0;
             p = model.parent[static_cast<std::size_t>(p)])
            if (++steps > model.parent.size())
                throw ValidationError("parent links form a cycle");
    }
    if (j.contains("fallback_rows"))
        for (const auto &fr : j.at("fallback_rows")) {
            int v = model.var_index(fr.at(0).get<std::string>());
            if (v >= 0)
                model.fallback_rows.emplace_back(static_cast<std::size_t>(v),
                                                 fr.at(1).get<std::size_t>());
        }
    return model;
}

json cooccurrence_to_json(const HardCooccurrenceModel &model) {
    json joint = json::array();
    for (std::size_t i = 0; i < model.nouns.size(); ++i) {
        json row = json::array();
        for (std::size_t jv = 0; jv < model.verbs.size(); ++jv)
            row.push_back(model.class_joint_at(i, jv));
        joint.push_back(row);
    }
    return json{{"kind", "hard_cooccurrence_model"},
                {"slot", model.slot},
                {"m", model.m},
                {"noun_classes", partition_to_json(model.nouns)},
                {"verb_classes", partition_to_json(model.verbs)},
                {"class_joint", joint},
                {"noun_given_class", model.noun_given_class},
                {"verb_given_class", model.verb_given_class}};
}

HardCooccurrenceModel cooccurrence_from_json(const json &j) {
    expect_kind(j, "hard_cooccurrence_model");
    HardCooccurrenceModel model;
    model.slot = j.at("slot").get<std::string>();
    model.m = j.at("m").get<double>();
    model.nouns = partition_from_json(j.at("noun_classes"));
    model.verbs = partition_from_json(j.at("verb_classes"));
    const json &joint = j.at("class_joint");
    if (joint.size() != model.nouns.size())
        throw ValidationError("class_joint rows mismatch");
    model.class_joint.reserve(model.nouns.size() * model.verbs.size());
    for (const auto &row : joint) {
        if (row.size() != model.verbs.size())
            throw ValidationError("class_joint columns mismatch");
        for (const auto &cell : row) model.class_joint.push_back(cell.get<double>());
    }
    model.noun_given_class =
        j.at("noun_given_class").get<std::map<std::string, double>>();
    model.verb_given_class =
        j.at("verb_given_class").get<std::map<std::string, double>>();
    for (std::size_t i = 0; i < model.nouns.size(); ++i)
        for (const auto &w : model.nouns.classes[i].words)
            model.noun_class_index[w] = i;
    for (std::size_t v = 0; v < model.verbs.size(); ++v)
        for (const auto &w : model.verbs.classes[v].words)
            model.verb_class_index[w] = v;
    return model;
}

json softmix_to_json(const SoftCaseSlotModel &model) {
    json classes = json::array();
    for (std::size_t i = 0; i < model.class_names.size(); ++i)
        classes.push_back({{"name", model.class_names[i]},
                           {"coeff", model.coeffs[i]},
                           {"dist", model.within_class[i]}});
    return json{{"kind", "soft_case_slot_model"},
                {"verb", model.verb},
                {"slot", model.slot},
                {"classes", classes}};
}

SoftCaseSlotModel softmix_from_json(const json &j) {
    expect_kind(j, "soft_case_slot_model");
    SoftCaseSlotModel model;
    model.verb = j.value("verb", "");
    model.slot = j.value("slot", "");
    for (const auto &c : j.at("classes")) {
        model.class_names.push_back(c.at("name").get<std::string>());
        model.coeffs.push_back(c.at("coeff").get<double>());
        model.within_class.push_back(
            c.at("dist").get<std::map<std::string, double>>());
    }
    return model;
}

std::string merge_history_tsv(const std::vector<MergeEvent> &history) {
    std::ostringstream out;
    out << "# side\tleft\tright\tmerged\tdelta_bits\titeration\n";
    for (const auto &e : history)
        out << (e.side == ClusterSide::noun ? "noun" : "verb") << '\t' << e.left
            << '\t' << e.right << '\t' << e.merged << '\t'
            << format_double(e.delta_bits) << '\t' << e.iteration << '\n';
    return out.str();
}

std::string thesaurus_edges(const Thesaurus &t) {
    std::ostringstream out;
    std::vector<int> stack{t.root()};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        const auto &node = t.node(id);
        for (auto it = node.children.rbegin(); it != node.children.rend(); ++it)
            stack.push_back(*it);
        for (int c : node.children)
            out << node.label << '\t' << t.label(c) << '\n';
    }
    return out.str();
}

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

void write_text_atomic(const std::filesystem::path &path,
                       const std::string &content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

void write_json_atomic(const std::filesystem::path &path, const json &j) {
    write_text_atomic(path, j.dump(2) + "\n");
}

json read_json(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    json j;
    in >> j;
    return j;
}

} // namespace lexmdl
