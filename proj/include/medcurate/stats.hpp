#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>

#include <json.hpp>

#include "medcurate/records.hpp"

namespace medcurate {

/// Record counts by category and language, with ratios. Ratios are absent
/// for an empty manifest and otherwise sum to 1.
struct DistributionReport {
  std::size_t total = 0;
  std::map<std::string, std::size_t> by_category;
  std::map<std::string, std::size_t> by_lang;  // "zh", "en"
  std::map<std::string, std::map<std::string, std::size_t>> by_category_lang;
  std::map<std::string, double> category_ratio;
  std::map<std::string, double> lang_ratio;

  nlohmann::ordered_json to_json() const;
};

/// Category of a document is its source tag.
DistributionReport distribution(std::span<const Document> docs);

/// Category of a dialogue: single_turn_QA_ch, single_turn_QA_en,
/// multi_turn_QA_ch or multi_turn_QA_en, by exchange count and language.
DistributionReport distribution(std::span<const Dialogue> dialogues);

std::string dialogue_category(const Dialogue& d);

}  // namespace medcurate
