#include "medcurate/text.hpp"

#include <memory>

#include <unicode/brkiter.h>
#include <unicode/normalizer2.h>
#include <unicode/rbbi.h>
#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "medcurate/errors.hpp"

namespace medcurate::text {
namespace {

icu::UnicodeString to_icu(std::string_view s) {
  return icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
}

std::string from_icu(const icu::UnicodeString& u) {
  std::string out;
  u.toUTF8String(out);
  return out;
}

// BreakIterator construction is costly; each thread keeps its own clone.
icu::BreakIterator& word_breaker() {
  thread_local std::unique_ptr<icu::BreakIterator> it = [] {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::BreakIterator> bi(
        icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status)) throw Error("ICU word break iterator unavailable");
    return bi;
  }();
  return *it;
}

}  // namespace

bool is_valid_utf8(std::string_view s) {
  int32_t i = 0;
  const auto n = static_cast<int32_t>(s.size());
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  while (i < n) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) return false;
  }
  return true;
}

std::vector<char32_t> code_points(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  int32_t i = 0;
  const auto n = static_cast<int32_t>(s.size());
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  while (i < n) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
    out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
  }
  return out;
}

std::string encode_utf8(char32_t cp) {
  char buf[4];
  int32_t len = 0;
  UBool err = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, 4, static_cast<UChar32>(cp), err);
  if (err) return "\xEF\xBF\xBD";
  return std::string(buf, static_cast<std::size_t>(len));
}

std::size_t code_point_count(std::string_view s) {
  std::size_t count = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++count;
  return count;
}

std::string nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString out = norm->normalize(to_icu(s), status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  return from_icu(out);
}

std::string case_fold(std::string_view s) {
  icu::UnicodeString u = to_icu(s);
  u.foldCase();
  return from_icu(u);
}

std::string canonicalize(std::string_view s) {
  const std::string normalized = nfc(s);
  std::string out;
  out.reserve(normalized.size());
  bool pending_space = false;
  for (char32_t cp : code_points(normalized)) {
    if (u_isUWhiteSpace(static_cast<UChar32>(cp))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out += encode_utf8(cp);
  }
  return out;
}

bool is_cjk(char32_t cp) {
  UErrorCode status = U_ZERO_ERROR;
  const UScriptCode script = uscript_getScript(static_cast<UChar32>(cp), &status);
  if (U_FAILURE(status)) return false;
  return script == USCRIPT_HAN || script == USCRIPT_HIRAGANA || script == USCRIPT_KATAKANA ||
         script == USCRIPT_BOPOMOFO;
}

std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> tokens;
  if (s.empty()) return tokens;
  const icu::UnicodeString u = to_icu(s);
  icu::BreakIterator& bi = word_breaker();
  bi.setText(u);

  int32_t start = bi.first();
  for (int32_t end = bi.next(); end != icu::BreakIterator::DONE; start = end, end = bi.next()) {
    if (bi.getRuleStatus() == UBRK_WORD_NONE) continue;
    // Split CJK characters out of the segment; keep other runs whole.
    icu::UnicodeString run;
    int32_t i = start;
    while (i < end) {
      const UChar32 c = u.char32At(i);
      const int32_t width = U16_LENGTH(c);
      if (is_cjk(static_cast<char32_t>(c))) {
        if (!run.isEmpty()) {
          tokens.push_back(from_icu(run));
          run.remove();
        }
        tokens.push_back(from_icu(icu::UnicodeString(c)));
      } else {
        run.append(c);
      }
      i += width;
    }
    if (!run.isEmpty()) tokens.push_back(from_icu(run));
  }
  return tokens;
}

std::vector<std::string> normalized_tokens(std::string_view s) {
  return word_tokens(case_fold(nfc(s)));
}

std::string trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace medcurate::text
