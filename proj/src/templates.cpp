#include "medcurate/templates.hpp"

#include "medcurate/digest.hpp"

namespace medcurate {
namespace detail {
extern const std::string_view kSingleJudgeV1;
extern const std::string_view kMultiJudgeV1;
extern const std::string_view kDpoCompareV1;
extern const std::string_view kDoctorSystemV1;
}  // namespace detail

std::string PromptTemplate::hash() const { return sha256(text).hex(); }

std::string PromptTemplate::render(const std::map<std::string, std::string>& vars) const {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      const auto close = text.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = vars.find(std::string(text.substr(i + 1, close - i - 1)));
        if (it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(text[i++]);
  }
  return out;
}

const PromptTemplate& single_judge_template() {
  static const PromptTemplate t{"single_judge_v1", detail::kSingleJudgeV1};
  return t;
}

const PromptTemplate& multi_judge_template() {
  static const PromptTemplate t{"multi_judge_v1", detail::kMultiJudgeV1};
  return t;
}

const PromptTemplate& dpo_compare_template() {
  static const PromptTemplate t{"dpo_compare_v1", detail::kDpoCompareV1};
  return t;
}

const PromptTemplate& doctor_system_prompt() {
  static const PromptTemplate t{"doctor_system_v1", detail::kDoctorSystemV1};
  return t;
}

}  // namespace medcurate
