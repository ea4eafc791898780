#ifndef LEXMDL_CORPUS_HPP
#define LEXMDL_CORPUS_HPP

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lexmdl/common.hpp"

namespace lexmdl {

// One sample S of case slot data: the multiset of nouns observed at slot r
// of verb v, kept as per-noun counts.  total == |S|.
struct CaseSlotSample {
    std::string verb;
    std::string slot;
    std::map<std::string, Count> counts;
    Count total = 0.0;
};

enum class Granularity { word, clazz, slot };

// A case frame: values per named slot.  Absent slots are implicitly 0 and
// are materialized by frames_to_vectors.  In slot granularity every present
// value is "1".
struct CaseFrame {
    std::map<std::string, std::string> slots;
    Count count = 1.0;
};

struct CaseFrameSample {
    std::string verb;
    Granularity granularity = Granularity::word;
    std::vector<CaseFrame> frames;
    std::vector<std::string> slot_inventory; // ordered
};

// Complete assignments over a slot inventory, one row per distinct value
// vector.  Row values align with the inventory; "0" marks absence.
struct AssignmentTable {
    std::vector<std::string> variables;
    std::vector<std::pair<std::vector<std::string>, Count>> rows;
    Count total = 0.0;
};

// Co-occurrence data for one slot: counts of (noun, verb) pairs.
struct CooccurrenceSample {
    std::string slot;
    std::map<std::pair<std::string, std::string>, Count> counts;
    std::vector<std::string> noun_vocab; // sorted, unique
    std::vector<std::string> verb_vocab; // sorted, unique
    Count m = 0.0;
};

enum class AttachmentLabel { attv, attn };

struct QuadrupleRecord {
    std::string v, n1, p, n2;
    std::optional<AttachmentLabel> label;
};

// Line formats are tab-separated with '#' comments; see README.
std::vector<CaseSlotSample> parse_case_slot_file(std::istream &in);
std::vector<CaseFrameSample> parse_case_frame_file(std::istream &in);
std::vector<CooccurrenceSample> parse_cooccurrence_file(std::istream &in);
std::vector<QuadrupleRecord> parse_quadruple_file(std::istream &in);

void write_case_slot_file(std::ostream &out,
                          const std::vector<CaseSlotSample> &samples);

// Expand frames into complete assignment rows over the sample's slot
// inventory.  The joint probability of a frame is the probability of the
// complete assignment, so absent slots must appear explicitly as 0.
AssignmentTable frames_to_vectors(const CaseFrameSample &sample);

struct Fold {
    std::vector<std::size_t> train; // indices into the record sequence
    std::vector<std::size_t> test;
};

// Deterministic k-fold split of [0, n).  Test sizes differ by at most one.
std::vector<Fold> split_folds(std::size_t n, std::size_t k, std::uint64_t seed);

} // namespace lexmdl

#endif // LEXMDL_CORPUS_HPP
