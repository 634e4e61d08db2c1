#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ultra {

enum class Verdict { Holds, Fails, Undetermined };

std::string to_string(Verdict v);

struct CheckRecord {
  std::string name;    ///< check family, e.g. "relation.ck"
  std::string anchor;  ///< the formula being checked
  std::string subject; ///< scope element, e.g. "v3" or "p[{1}]"
  std::uint64_t index = 0;
  std::string scope;
  Verdict verdict = Verdict::Holds;
  /// label/value pairs; rationals as p/q
  std::vector<std::pair<std::string, std::string>> witnesses;
  std::string note;
};

class Report {
public:
  void add(CheckRecord r) { records_.push_back(std::move(r)); }
  void merge(const Report& o);
  /// Sorted by name, then index, then subject.
  std::vector<CheckRecord> sorted() const;
  const std::vector<CheckRecord>& records() const { return records_; }

  std::size_t count(Verdict v) const;
  bool all_hold() const { return count(Verdict::Fails) == 0 && count(Verdict::Undetermined) == 0; }
  /// First record with the given name and subject, or nullptr.
  const CheckRecord* find(const std::string& name, const std::string& subject) const;

  std::string text() const;
  /// One JSON object per line.
  std::string records_jsonl() const;

private:
  std::vector<CheckRecord> records_;
};

/// 0 all hold, 1 some certified failure, 2 only undetermined results.
int exit_code(const Report& r);

} // namespace ultra
