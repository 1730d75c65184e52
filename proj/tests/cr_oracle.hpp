#pragma once

// Independent reference for the information scores: recounts n-grams by
// scanning the training strings for every query and renders prompts by hand.

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "medcurate/records.hpp"
#include "medcurate/text.hpp"

namespace oracle {

struct NGramOracle {
  std::vector<std::u32string> padded;  // each training text with begin pad and end symbol
  std::set<char32_t> alphabet;
  std::size_t order;

  static constexpr char32_t kBegin = 0x110000;
  static constexpr char32_t kEnd = 0x110001;

  NGramOracle(const std::vector<std::string>& texts, std::size_t n) : order(n) {
    for (const auto& t : texts) {
      std::u32string s(n - 1, kBegin);
      for (char32_t c : medcurate::text::code_points(t)) {
        s.push_back(c);
        alphabet.insert(c);
      }
      s.push_back(kEnd);
      padded.push_back(s);
    }
  }

  double prob(const std::u32string& history, char32_t next) const {
    const std::u32string h = history.substr(history.size() - (order - 1));
    double joint = 0, total = 0;
    for (const auto& s : padded)
      for (std::size_t i = order - 1; i < s.size(); ++i) {
        if (s.compare(i - (order - 1), order - 1, h) != 0) continue;
        total += 1;
        if (s[i] == next) joint += 1;
      }
    return (joint + 1) / (total + static_cast<double>(alphabet.size() + 1));
  }

  double mean_nll(const std::string& context, const std::string& continuation) const {
    std::u32string h(order - 1, kBegin);
    for (char32_t c : medcurate::text::code_points(context)) h.push_back(c);
    double sum = 0;
    std::size_t n = 0;
    for (char32_t c : medcurate::text::code_points(continuation)) {
      sum += -std::log(prob(h, c));
      h.push_back(c);
      ++n;
    }
    return sum / static_cast<double>(n);
  }
};

inline std::string line(const medcurate::Dialogue& d, std::size_t i) {
  const bool zh = d.lang() == medcurate::Lang::zh;
  const auto& t = d.turns()[i];
  if (t.role == medcurate::Role::user) return (zh ? "用户：" : "User: ") + t.text + "\n";
  return (zh ? "医生：" : "Doctor: ") + t.text + "\n";
}

inline std::string prefix(const medcurate::Dialogue& d) {
  return d.lang() == medcurate::Lang::zh ? "医生：" : "Doctor: ";
}

inline double conditioned(const NGramOracle& lm, const medcurate::Dialogue& d, std::size_t t) {
  std::string ctx;
  for (std::size_t i = 0; i < t; ++i) ctx += line(d, i);
  return lm.mean_nll(ctx + prefix(d), d.turns()[t].text);
}

inline double direct(const NGramOracle& lm, const medcurate::Dialogue& d, std::size_t t) {
  return lm.mean_nll(line(d, t - 1) + prefix(d), d.turns()[t].text);
}

/// Random dialogue with 1..max_exchanges exchanges over `alphabet`.
template <class Rng>
medcurate::Dialogue random_dialogue(Rng& rng, const std::u32string& alphabet, std::size_t max_exchanges,
                                    const std::string& id) {
  std::vector<medcurate::Turn> turns;
  const std::size_t exchanges = rng.below(max_exchanges) + 1;
  for (std::size_t k = 0; k < 2 * exchanges; ++k) {
    std::string s;
    const std::size_t len = rng.below(12) + 1;
    for (std::size_t i = 0; i < len; ++i) s += medcurate::text::encode_utf8(alphabet[rng.below(alphabet.size())]);
    turns.push_back({k % 2 ? medcurate::Role::assistant : medcurate::Role::user, s});
  }
  return {id, rng.below(2) ? medcurate::Lang::en : medcurate::Lang::zh, std::move(turns)};
}

}  // namespace oracle
