#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "medcurate/errors.hpp"
#include "medcurate/records.hpp"

namespace medcurate {

enum class Schema { document, dialogue, mcq, pair };

Schema parse_schema(std::string_view);
std::string_view to_string(Schema);

/// JSON Lines codecs. parse_record throws ValidationError (or a JSON
/// exception) on a malformed line.
template <class Record>
Record parse_record(std::string_view line);

template <> Document parse_record<Document>(std::string_view);
template <> Dialogue parse_record<Dialogue>(std::string_view);
template <> MCQItem parse_record<MCQItem>(std::string_view);
template <> PreferencePair parse_record<PreferencePair>(std::string_view);

std::string serialize(const Document&);
std::string serialize(const Dialogue&);
std::string serialize(const MCQItem&);
std::string serialize(const PreferencePair&);

struct LineError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

template <class Record>
using ReadItem = std::variant<Record, LineError>;

/// Lazy, single-consumer reader. Blank lines are skipped; every other line
/// yields either a record or a LineError carrying its line number.
template <class Record>
class RecordReader {
 public:
  explicit RecordReader(const std::filesystem::path& path) : in_(path), path_(path) {
    if (!in_) throw IoError("cannot open " + path.string());
  }

  std::optional<ReadItem<Record>> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      try {
        return ReadItem<Record>(parse_record<Record>(line));
      } catch (const std::exception& e) {
        return ReadItem<Record>(LineError{line_no_, e.what()});
      }
    }
    if (in_.bad()) throw IoError("read failure in " + path_.string());
    return std::nullopt;
  }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
  std::size_t line_no_ = 0;
};

template <class Record>
struct ReadAll {
  std::vector<Record> records;
  std::vector<LineError> errors;
};

template <class Record>
ReadAll<Record> read_records(const std::filesystem::path& path) {
  ReadAll<Record> out;
  RecordReader<Record> reader(path);
  while (auto item = reader.next()) {
    if (auto* r = std::get_if<Record>(&*item))
      out.records.push_back(std::move(*r));
    else
      out.errors.push_back(std::get<LineError>(*item));
  }
  return out;
}

class RecordWriter {
 public:
  explicit RecordWriter(const std::filesystem::path& path);

  template <class Record>
  void write(const Record& r) {
    write_line(serialize(r));
  }
  void write_line(std::string_view line);
  /// Flushes and checks the stream; throws IoError with the partial count.
  void close();
  std::size_t count() const { return count_; }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t count_ = 0;
};

template <class Record>
std::size_t write_records(std::span<const Record> records, const std::filesystem::path& path) {
  RecordWriter w(path);
  for (const auto& r : records) w.write(r);
  w.close();
  return w.count();
}

template <class Record>
std::size_t write_records(const std::vector<Record>& records, const std::filesystem::path& path) {
  return write_records(std::span<const Record>(records), path);
}

/// {"stage": ..., "reason": ..., "record": {...}}
std::string rejection_line(std::string_view stage, std::string_view reason, std::string_view record_json);

/// One rejection_line per entry.
template <class Record>
std::size_t write_rejections(const std::vector<Rejection<Record>>& rejections, std::string_view stage,
                             const std::filesystem::path& path) {
  RecordWriter w(path);
  for (const auto& r : rejections) w.write_line(rejection_line(stage, r.reason, serialize(r.record)));
  w.close();
  return w.count();
}

}  // namespace medcurate
