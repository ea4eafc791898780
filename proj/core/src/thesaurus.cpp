#include "lexmdl/thesaurus.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <set>
#include <sstream>

namespace lexmdl {

namespace {

std::vector<std::pair<std::string, std::string>>
read_edge_lines(std::istream &in) {
    std::vector<std::pair<std::string, std::string>> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = true;
        for (char c : line)
            if (!isspace(static_cast<unsigned char>(c))) { blank = false; break; }
        if (blank || line[0] == '#') continue;
        auto pos = line.find('\t');
        if (pos == std::string::npos || line.find('\t', pos + 1) != std::string::npos)
            throw ParseError("expected 'parent<TAB>child'", lineno);
        std::string parent = line.substr(0, pos);
        std::string child = line.substr(pos + 1);
        if (parent.empty() || child.empty())
            throw ParseError("empty node label", lineno);
        edges.emplace_back(std::move(parent), std::move(child));
    }
    return edges;
}

} // namespace

Thesaurus Thesaurus::from_edges(
    const std::vector<std::pair<std::string, std::string>> &edges) {
    if (edges.empty())
        throw ValidationError("thesaurus needs at least one edge");

    Thesaurus t;
    auto intern = [&t](const std::string &label) {
        auto it = t.by_label_.find(label);
        if (it != t.by_label_.end()) return it->second;
        int id = static_cast<int>(t.nodes_.size());
        t.nodes_.push_back(Node{label, -1, {}, 0, 0, 0});
        t.by_label_.emplace(label, id);
        return id;
    };

    for (const auto &e : edges) {
        int p = intern(e.first);
        int c = intern(e.second);
        if (p == c)
            throw ValidationError("self-loop at node '" + e.first + "'");
        Node &child = t.nodes_[static_cast<std::size_t>(c)];
        if (child.parent != -1)
            throw ValidationError("node '" + e.second + "' has multiple parents");
        child.parent = p;
        t.nodes_[static_cast<std::size_t>(p)].children.push_back(c);
    }

    for (std::size_t i = 0; i < t.nodes_.size(); ++i) {
        if (t.nodes_[i].parent != -1) continue;
        if (t.root_ != -1)
            throw ValidationError("multiple roots: '" +
                                  t.nodes_[static_cast<std::size_t>(t.root_)].label +
                                  "' and '" + t.nodes_[i].label + "'");
        t.root_ = static_cast<int>(i);
    }
    if (t.root_ == -1)
        throw ValidationError("no root: the edge list contains a cycle");

    // Iterative DFS: preorder intervals, leaf counts, cycle/reachability check.
    std::vector<int> state(t.nodes_.size(), 0);
    int clock = 0;
    std::size_t visited = 0;
    std::vector<std::pair<int, std::size_t>> stack{{t.root_, 0}};
    state[static_cast<std::size_t>(t.root_)] = 1;
    t.nodes_[static_cast<std::size_t>(t.root_)].tin = clock++;
    ++visited;
    while (!stack.empty()) {
        auto &[id, next_child] = stack.back();
        Node &n = t.nodes_[static_cast<std::size_t>(id)];
        if (next_child < n.children.size()) {
            int c = n.children[next_child++];
            if (state[static_cast<std::size_t>(c)] != 0)
                throw ValidationError("cycle through node '" +
                                      t.nodes_[static_cast<std::size_t>(c)].label + "'");
            state[static_cast<std::size_t>(c)] = 1;
            t.nodes_[static_cast<std::size_t>(c)].tin = clock++;
            ++visited;
            stack.emplace_back(c, 0);
        } else {
            n.tout = clock;
            n.leaf_count = n.children.empty() ? 1 : 0;
            for (int c : n.children)
                n.leaf_count += t.nodes_[static_cast<std::size_t>(c)].leaf_count;
            stack.pop_back();
        }
    }
    if (visited != t.nodes_.size())
        throw ValidationError("disconnected nodes: the edge list contains a cycle");
    return t;
}

Thesaurus parse_thesaurus(std::istream &in) {
    return Thesaurus::from_edges(read_edge_lines(in));
}

int Thesaurus::find(const std::string &label) const {
    auto it = by_label_.find(label);
    return it == by_label_.end() ? -1 : it->second;
}

std::vector<int> Thesaurus::sense_leaves(const std::string &noun) const {
    std::vector<int> out;
    int exact = find(noun);
    if (exact != -1 && is_leaf(exact)) out.push_back(exact);
    // Sense-split virtual words: leaves labeled "noun#<sense>".
    auto it = by_label_.lower_bound(noun + "#");
    std::string hi = noun + "$"; // '$' == '#' + 1 in ASCII
    for (; it != by_label_.end() && it->first < hi; ++it)
        if (is_leaf(it->second)) out.push_back(it->second);
    return out;
}

std::vector<int> Thesaurus::leaves() const { return leaves_under(root_); }

std::vector<int> Thesaurus::leaves_under(int id) const {
    std::vector<int> out;
    std::vector<int> stack{id};
    while (!stack.empty()) {
        int n = stack.back();
        stack.pop_back();
        const Node &node = nodes_[static_cast<std::size_t>(n)];
        if (node.children.empty()) out.push_back(n);
        for (auto it = node.children.rbegin(); it != node.children.rend(); ++it)
            stack.push_back(*it);
    }
    return out;
}

std::vector<Cut> enumerate_cuts(const Thesaurus &t, int subtree_root,
                                std::size_t guard) {
    int root = subtree_root == -1 ? t.root() : subtree_root;
    BigInt total = count_cuts(t, root);
    if (total > BigInt(guard))
        throw ValidationError("tree has " + total.str() +
                              " cuts, beyond the enumeration guard; "
                              "use count_cuts instead");

    std::function<std::vector<Cut>(int)> rec = [&](int id) {
        if (t.is_leaf(id)) return std::vector<Cut>{Cut{id}};
        std::vector<Cut> combos{Cut{}};
        for (int c : t.node(id).children) {
            std::vector<Cut> child_cuts = rec(c);
            std::vector<Cut> next;
            next.reserve(combos.size() * child_cuts.size());
            for (const Cut &prefix : combos)
                for (const Cut &suffix : child_cuts) {
                    Cut merged = prefix;
                    merged.insert(merged.end(), suffix.begin(), suffix.end());
                    next.push_back(std::move(merged));
                }
            combos = std::move(next);
        }
        combos.push_back(Cut{id});
        return combos;
    };
    return rec(root);
}

BigInt count_cuts(const Thesaurus &t, int subtree_root) {
    int root = subtree_root == -1 ? t.root() : subtree_root;
    // Postorder accumulation to keep deep trees off the call stack.
    std::map<int, BigInt> memo;
    std::vector<std::pair<int, bool>> stack{{root, false}};
    while (!stack.empty()) {
        auto [id, expanded] = stack.back();
        stack.pop_back();
        if (t.is_leaf(id)) {
            memo[id] = 1;
            continue;
        }
        if (!expanded) {
            stack.emplace_back(id, true);
            for (int c : t.node(id).children) stack.emplace_back(c, false);
            continue;
        }
        BigInt prod = 1;
        for (int c : t.node(id).children) prod *= memo[c];
        memo[id] = prod + 1;
    }
    return memo[root];
}

StartingCut starting_cut(const Thesaurus &t, const CaseSlotSample &sample) {
    StartingCut result;

    std::map<int, Count> leaf_freq;
    for (const auto &kv : sample.counts) {
        int id = t.find(kv.first);
        if (id == -1 || !t.is_leaf(id)) {
            result.unknown_tokens.push_back(kv.first);
            continue;
        }
        leaf_freq[id] += kv.second;
        result.total += kv.second;
    }
    if (leaf_freq.empty())
        throw ValidationError("no sample noun is a leaf of the thesaurus");

    // Lowest node properly dominating every observed leaf.  For a single
    // observed leaf this is its parent, so that the zero-frequency siblings
    // stay available for generalization.
    std::vector<bool> touched(t.size(), false);
    for (const auto &kv : leaf_freq)
        for (int id = kv.first; id != -1; id = t.node(id).parent) {
            if (touched[static_cast<std::size_t>(id)]) break;
            touched[static_cast<std::size_t>(id)] = true;
        }
    int lca = leaf_freq.begin()->first;
    while (true) {
        bool covers_all = true;
        for (const auto &kv : leaf_freq)
            if (!t.dominates(lca, kv.first)) { covers_all = false; break; }
        if (covers_all) break;
        lca = t.node(lca).parent;
    }
    if (t.is_leaf(lca) && t.node(lca).parent != -1)
        lca = t.node(lca).parent;
    result.subtree_root = lca;

    // Cut members: observed leaves, plus untouched children of touched nodes
    // inside the subtree (they carry frequency zero).  Preorder keeps the
    // listing canonical.
    std::vector<std::pair<int, Count>> members;
    std::vector<int> stack{lca};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        if (!touched[static_cast<std::size_t>(id)]) {
            members.emplace_back(id, 0.0);
            continue;
        }
        if (t.is_leaf(id)) {
            members.emplace_back(id, leaf_freq[id]);
            continue;
        }
        for (auto it = t.node(id).children.rbegin();
             it != t.node(id).children.rend(); ++it)
            stack.push_back(*it);
    }
    std::sort(members.begin(), members.end(),
              [&](const auto &a, const auto &b) {
                  return t.node(a.first).tin < t.node(b.first).tin;
              });
    for (const auto &m : members) {
        result.cut.push_back(m.first);
        result.freqs.push_back(m.second);
    }
    std::sort(result.unknown_tokens.begin(), result.unknown_tokens.end());
    result.excluded_leaves =
        t.leaf_count(t.root()) - t.leaf_count(lca);
    return result;
}

} // namespace lexmdl
