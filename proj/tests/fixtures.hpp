#ifndef LEXMDL_TESTS_FIXTURES_HPP
#define LEXMDL_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "lexmdl/cooccur.hpp"
#include "lexmdl/corpus.hpp"
#include "lexmdl/depforest.hpp"
#include "lexmdl/thesaurus.hpp"

namespace lexmdl::fixtures {

// ANIMAL -> BIRD -> {swallow, crow, eagle, bird}
//        -> INSECT -> {bug, bee, insect}
Thesaurus animal_thesaurus();

// Subject-slot observations for "fly": bird 4, bee 2, crow 2, eagle 2.
CaseSlotSample fly_arg1_sample();

// Six class-based case frames over arg1/arg2/from/to, total count 9.
CaseFrameSample class_frame_sample();

// Two noun blocks {a,b} x {x,y} and {c,d} x {z,w}, uniform inside each
// block, m = 400.
CooccurrenceSample block_cooccurrence();

// Random thesaurus with at most `max_leaves` leaves (at least 2).
Thesaurus random_tree(Rng &rng, std::size_t max_leaves);

// Non-negative integer frequencies per leaf label, at least one positive.
std::map<std::string, Count> random_leaf_counts(Rng &rng, const Thesaurus &t,
                                                unsigned max_count);

// Random assignment table over `vars` variables with domain sizes 2..3.
AssignmentTable random_assignments(Rng &rng, std::size_t vars, Count rows);

// Random tree-structured forest over `vars` binary variables with random
// tables (every probability strictly positive).
DependencyForestModel random_binary_tree_model(Rng &rng, std::size_t vars);

} // namespace lexmdl::fixtures

#endif // LEXMDL_TESTS_FIXTURES_HPP
