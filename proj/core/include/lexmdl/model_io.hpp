#ifndef LEXMDL_MODEL_IO_HPP
#define LEXMDL_MODEL_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lexmdl/cooccur.hpp"
#include "lexmdl/depforest.hpp"
#include "lexmdl/softmix.hpp"
#include "lexmdl/treecut.hpp"

namespace lexmdl {

nlohmann::json tree_cut_to_json(const TreeCutModel &model, const Thesaurus &t);
TreeCutModel tree_cut_from_json(const nlohmann::json &j, const Thesaurus &t);

nlohmann::json forest_to_json(const DependencyForestModel &model);
DependencyForestModel forest_from_json(const nlohmann::json &j);

nlohmann::json cooccurrence_to_json(const HardCooccurrenceModel &model);
HardCooccurrenceModel cooccurrence_from_json(const nlohmann::json &j);

nlohmann::json softmix_to_json(const SoftCaseSlotModel &model);
SoftCaseSlotModel softmix_from_json(const nlohmann::json &j);

std::string merge_history_tsv(const std::vector<MergeEvent> &history);
std::string thesaurus_edges(const Thesaurus &t);

// Shortest clean decimal form, fixed across platforms ("%.12g").
std::string format_double(double value);

// Write-temp-then-rename so readers never see partial files.
void write_text_atomic(const std::filesystem::path &path,
                       const std::string &content);
void write_json_atomic(const std::filesystem::path &path,
                       const nlohmann::json &j);

nlohmann::json read_json(const std::filesystem::path &path);

} // namespace lexmdl

#endif // LEXMDL_MODEL_IO_HPP
