#include "ultra/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>
#include <tuple>

namespace ultra {

std::string to_string(Verdict v) {
  switch (v) {
  case Verdict::Holds:
    return "holds";
  case Verdict::Fails:
    return "fails";
  case Verdict::Undetermined:
    return "undetermined";
  }
  return "?";
}

void Report::merge(const Report& o) {
  records_.insert(records_.end(), o.records_.begin(), o.records_.end());
}

std::vector<CheckRecord> Report::sorted() const {
  std::vector<CheckRecord> out = records_;
  std::stable_sort(out.begin(), out.end(), [](const CheckRecord& a, const CheckRecord& b) {
    return std::tie(a.name, a.index, a.subject) < std::tie(b.name, b.index, b.subject);
  });
  return out;
}

std::size_t Report::count(Verdict v) const {
  return std::count_if(records_.begin(), records_.end(),
                       [&](const CheckRecord& r) { return r.verdict == v; });
}

const CheckRecord* Report::find(const std::string& name, const std::string& subject) const {
  for (const CheckRecord& r : records_)
    if (r.name == name && r.subject == subject)
      return &r;
  return nullptr;
}

std::string Report::text() const {
  std::ostringstream os;
  for (const CheckRecord& r : sorted()) {
    os << to_string(r.verdict) << "  " << r.name;
    if (!r.subject.empty())
      os << " [" << r.subject << "]";
    if (!r.witnesses.empty()) {
      os << "  witness:";
      for (const auto& [k, v] : r.witnesses)
        os << " " << k << "=" << v;
    }
    if (!r.note.empty())
      os << "  (" << r.note << ")";
    os << "\n";
  }
  os << "summary: " << count(Verdict::Holds) << " hold, " << count(Verdict::Fails) << " fail, "
     << count(Verdict::Undetermined) << " undetermined\n";
  return os.str();
}

std::string Report::records_jsonl() const {
  std::ostringstream os;
  for (const CheckRecord& r : sorted()) {
    nlohmann::json j;
    j["name"] = r.name;
    j["anchor"] = r.anchor;
    j["subject"] = r.subject;
    j["index"] = r.index;
    j["scope"] = r.scope;
    j["verdict"] = to_string(r.verdict);
    nlohmann::json w = nlohmann::json::array();
    for (const auto& [k, v] : r.witnesses)
      w.push_back({{"label", k}, {"value", v}});
    j["witnesses"] = w;
    j["note"] = r.note;
    os << j.dump() << "\n";
  }
  return os.str();
}

int exit_code(const Report& r) {
  if (r.count(Verdict::Fails))
    return 1;
  if (r.count(Verdict::Undetermined))
    return 2;
  return 0;
}

} // namespace ultra
