#include "medcurate/stats.hpp"

namespace medcurate {
namespace {

void add(DistributionReport& r, const std::string& category, Lang lang) {
  const std::string l(to_string(lang));
  ++r.total;
  ++r.by_category[category];
  ++r.by_lang[l];
  ++r.by_category_lang[category][l];
}

void finish(DistributionReport& r) {
  if (r.total == 0) return;
  const double n = static_cast<double>(r.total);
  for (const auto& [k, v] : r.by_category) r.category_ratio[k] = static_cast<double>(v) / n;
  for (const auto& [k, v] : r.by_lang) r.lang_ratio[k] = static_cast<double>(v) / n;
}

}  // namespace

nlohmann::ordered_json DistributionReport::to_json() const {
  nlohmann::ordered_json j;
  j["total"] = total;
  j["by_category"] = by_category;
  j["by_lang"] = by_lang;
  j["by_category_lang"] = by_category_lang;
  j["category_ratio"] = category_ratio;
  j["lang_ratio"] = lang_ratio;
  return j;
}

DistributionReport distribution(std::span<const Document> docs) {
  DistributionReport r;
  for (const auto& d : docs) add(r, d.source, d.lang);
  finish(r);
  return r;
}

std::string dialogue_category(const Dialogue& d) {
  return std::string(d.exchanges() > 1 ? "multi_turn_QA_" : "single_turn_QA_") + (d.lang() == Lang::zh ? "ch" : "en");
}

DistributionReport distribution(std::span<const Dialogue> dialogues) {
  DistributionReport r;
  for (const auto& d : dialogues) add(r, dialogue_category(d), d.lang());
  finish(r);
  return r;
}

}  // namespace medcurate
