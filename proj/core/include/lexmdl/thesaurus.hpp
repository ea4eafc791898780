#ifndef LEXMDL_THESAURUS_HPP
#define LEXMDL_THESAURUS_HPP

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lexmdl/common.hpp"
#include "lexmdl/corpus.hpp"

namespace lexmdl {

using BigInt = boost::multiprecision::cpp_int;

// A rooted unordered tree of noun classes.  Leaves are nouns, internal
// nodes are classes; immutable once built.
class Thesaurus {
public:
    struct Node {
        std::string label;
        int parent = -1;
        std::vector<int> children;
        std::size_t leaf_count = 0; // |C|: leaves dominated by this node
        int tin = 0, tout = 0;      // preorder interval, for dominance tests
    };

    static Thesaurus from_edges(
        const std::vector<std::pair<std::string, std::string>> &edges);

    int root() const { return root_; }
    std::size_t size() const { return nodes_.size(); }
    const Node &node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
    const std::string &label(int id) const { return node(id).label; }
    bool is_leaf(int id) const { return node(id).children.empty(); }
    std::size_t leaf_count(int id) const { return node(id).leaf_count; }

    // -1 when no node carries the label.
    int find(const std::string &label) const;
    // Every leaf whose label is `noun` or a sense-split variant "noun#...".
    std::vector<int> sense_leaves(const std::string &noun) const;

    bool dominates(int ancestor, int descendant) const {
        const Node &a = node(ancestor);
        const Node &d = node(descendant);
        return a.tin <= d.tin && d.tout <= a.tout;
    }

    std::vector<int> leaves() const;
    std::vector<int> leaves_under(int id) const;

private:
    std::vector<Node> nodes_;
    std::map<std::string, int> by_label_;
    int root_ = -1;
};

// A tree cut: node ids in preorder, mutually non-dominating, jointly
// dominating every leaf of the (sub)tree they cut.
using Cut = std::vector<int>;

// Edge-list format `parent \t child`, one edge per line, '#' comments.
Thesaurus parse_thesaurus(std::istream &in);

// All cuts of the subtree rooted at `subtree_root` (default: whole tree).
// Refuses trees with more than `guard` cuts; use count_cuts for those.
std::vector<Cut> enumerate_cuts(const Thesaurus &t, int subtree_root = -1,
                                std::size_t guard = (std::size_t{1} << 20));

// count(leaf) = 1, count(internal) = prod count(children) + 1.
BigInt count_cuts(const Thesaurus &t, int subtree_root = -1);

// The cut generalization starts from, with per-cut-node frequencies summed
// from the sample.  The cut is a valid cut of the subtree rooted at
// `subtree_root`, the lowest node properly dominating every observed leaf;
// unobserved branches inside that subtree enter with zero frequency,
// branches outside it stay out of the model's support.
struct StartingCut {
    Cut cut;
    std::vector<Count> freqs; // aligned with cut
    Count total = 0.0;        // |S| after dropping unknown nouns
    int subtree_root = -1;
    std::vector<std::string> unknown_tokens; // sorted
    std::size_t excluded_leaves = 0; // leaves outside the support
};

StartingCut starting_cut(const Thesaurus &t, const CaseSlotSample &sample);

} // namespace lexmdl

#endif // LEXMDL_THESAURUS_HPP
