#include "medcurate/mix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "medcurate/errors.hpp"

namespace medcurate {

nlohmann::ordered_json MixPlan::to_json() const {
  nlohmann::ordered_json j;
  j["stage"] = stage == Stage::stage1 ? 1 : 2;
  j["total_tokens"] = total_tokens;
  j["allocations"] = nlohmann::ordered_json::array();
  for (const auto& a : allocations) {
    j["allocations"].push_back({{"source", a.source},
                                {"tokens", a.tokens},
                                {"target_fraction", a.target_fraction},
                                {"available_tokens", a.available_tokens},
                                {"epochs", a.epochs}});
  }
  j["warnings"] = warnings;
  return j;
}

MixPlan plan_mix(Stage stage, std::uint64_t total_tokens, std::span<const SourceBudget> sources) {
  if (total_tokens == 0) throw ValidationError("total_tokens must be positive");
  if (sources.empty()) throw ValidationError("no sources to plan");
  std::set<std::string> names;
  long double fraction_sum = 0.0L;
  for (const auto& s : sources) {
    if (!names.insert(s.name).second) throw ValidationError("duplicate source " + s.name);
    if (!(s.target_fraction >= 0.0 && s.target_fraction <= 1.0))
      throw ValidationError("fraction of " + s.name + " outside [0, 1]");
    if (s.target_fraction > 0.0 && s.available_tokens == 0)
      throw ValidationError("source " + s.name + " has a nonzero fraction but no available tokens");
    fraction_sum += s.target_fraction;
  }
  if (std::fabs(static_cast<double>(fraction_sum) - 1.0) > kFractionTolerance)
    throw ValidationError("fractions sum to " + std::to_string(static_cast<double>(fraction_sum)) + ", not 1");

  // Quotas are computed from fractions renormalized to sum to exactly 1.
  const std::size_t n = sources.size();
  std::vector<std::uint64_t> base(n);
  std::vector<long double> remainder(n);
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double quota = static_cast<long double>(total_tokens) * sources[i].target_fraction / fraction_sum;
    const long double floor_q = std::floor(quota);
    base[i] = std::min<std::uint64_t>(static_cast<std::uint64_t>(floor_q), total_tokens);
    remainder[i] = quota - floor_q;
    assigned += base[i];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Largest remainder first; equal remainders go to the lexicographically smaller name.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return sources[a].name < sources[b].name;
  });
  std::size_t cursor = 0;
  while (assigned < total_tokens) {
    const std::size_t i = order[cursor++ % n];
    if (sources[i].target_fraction == 0.0) continue;
    ++base[i];
    ++assigned;
  }
  // Floating-point excess, possible only from rounding noise: take back from
  // the smallest remainders.
  cursor = 0;
  while (assigned > total_tokens) {
    const std::size_t i = order[n - 1 - (cursor++ % n)];
    if (base[i] == 0) continue;
    --base[i];
    --assigned;
  }

  MixPlan plan;
  plan.stage = stage;
  plan.total_tokens = total_tokens;
  for (std::size_t i = 0; i < n; ++i) {
    Allocation a;
    a.source = sources[i].name;
    a.tokens = base[i];
    a.target_fraction = sources[i].target_fraction;
    a.available_tokens = sources[i].available_tokens;
    a.epochs = a.available_tokens == 0 ? 0.0
                                       : static_cast<double>(a.tokens) / static_cast<double>(a.available_tokens);
    if (a.epochs > 1.0) {
      std::ostringstream w;
      w << "source " << a.source << " is upsampled to " << a.epochs << " epochs";
      plan.warnings.push_back(w.str());
    }
    plan.allocations.push_back(std::move(a));
  }
  return plan;
}

SourceBudget parse_source_budget(const std::string& spec) {
  const auto first = spec.find(':');
  const auto second = first == std::string::npos ? std::string::npos : spec.find(':', first + 1);
  if (second == std::string::npos || spec.find(':', second + 1) != std::string::npos)
    throw ValidationError("source must be name:available:fraction, got \"" + spec + "\"");
  SourceBudget s;
  s.name = spec.substr(0, first);
  if (s.name.empty()) throw ValidationError("empty source name in \"" + spec + "\"");
  try {
    std::size_t used = 0;
    const std::string avail = spec.substr(first + 1, second - first - 1);
    const double a = std::stod(avail, &used);
    if (used != avail.size() || a < 0 || a != std::floor(a)) throw std::invalid_argument("available");
    s.available_tokens = static_cast<std::uint64_t>(a);
    const std::string frac = spec.substr(second + 1);
    s.target_fraction = std::stod(frac, &used);
    if (used != frac.size()) throw std::invalid_argument("fraction");
  } catch (const std::exception&) {
    throw ValidationError("cannot parse source \"" + spec + "\"");
  }
  return s;
}

}  // namespace medcurate
