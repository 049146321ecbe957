#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "exclab/bounds.hpp"
#include "exclab/classical.hpp"
#include "exclab/game.hpp"

namespace exclab::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Numeric output carries 12 significant digits.
inline double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", v);
  return std::strtod(buffer, nullptr);
}

inline std::string format12(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", v);
  return buffer;
}

inline Json document(const std::string& kind) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  return j;
}

// ---------------------------------------------------------------------------
// Bounds tables

inline const std::vector<std::string>& bounds_columns() {
  static const std::vector<std::string> columns{"n", "m", "gamma_log2", "classical_ic_lower", "quantum_entropy_upper",
                                                "quantum_ic_upper"};
  return columns;
}

inline void write_bounds_csv(std::ostream& out, const std::vector<bounds::BoundsRow>& rows) {
  const auto& cols = bounds_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << r.m << ',' << format12(r.gamma_log2) << ',' << format12(r.classical_ic_lower) << ','
        << format12(r.quantum_entropy_upper) << ',' << format12(r.quantum_ic_upper) << '\n';
  }
}

inline Json bounds_json(const std::vector<bounds::BoundsRow>& rows, const bounds::MRule& rule) {
  Json j = document("bounds_table");
  j["m_rule"] = {{"kind", rule.name()}, {"value", round12(rule.value)}};
  j["columns"] = bounds_columns();
  Json arr = Json::array();
  for (const auto& r : rows) {
    arr.push_back({{"n", r.n},
                   {"m", r.m},
                   {"gamma_log2", round12(r.gamma_log2)},
                   {"classical_ic_lower", round12(r.classical_ic_lower)},
                   {"quantum_entropy_upper", round12(r.quantum_entropy_upper)},
                   {"quantum_ic_upper", round12(r.quantum_ic_upper)}});
  }
  j["rows"] = std::move(arr);
  return j;
}

// ---------------------------------------------------------------------------
// Game records

inline Json to_json(const game::Message& msg) {
  Json j;
  j["kind"] = game::to_string(msg.kind);
  switch (msg.kind) {
    case game::Strategy::quantum:
      j["qubits"] = msg.qubits;
      j["theta"] = round12(msg.theta);
      break;
    case game::Strategy::classical_cover:
      j["string"] = msg.cover_string ? msg.cover_string->str() : "";
      j["index"] = msg.cover_index;
      break;
    case game::Strategy::entanglement_assisted:
      if (msg.set_index) {
        j["set_index"] = *msg.set_index;
      } else {
        j["abort"] = true;
      }
      break;
  }
  return j;
}

inline Json to_json(const game::Transcript& tr) {
  Json j;
  j["x"] = tr.x.str();
  j["y"] = tr.y.indices();
  j["message"] = to_json(tr.message);
  j["answer"] = tr.answer ? Json(tr.answer->str()) : Json(nullptr);
  j["aborted"] = tr.aborted;
  j["won"] = tr.won ? Json(*tr.won) : Json(nullptr);
  return j;
}

/// One JSON object per line, in trial order.
inline void write_transcripts(std::ostream& out, const std::vector<game::Transcript>& transcripts) {
  for (const auto& tr : transcripts) out << to_json(tr).dump() << '\n';
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_floating_point_v<T>) return round12(*v);
  else return *v;
}

inline Json to_json(const game::RunStatistics& s) {
  Json j = document("run_statistics");
  j["strategy"] = game::to_string(s.strategy);
  j["n"] = s.n;
  j["m"] = s.m;
  j["seed"] = s.seed;
  j["trials"] = s.trials;
  j["wins"] = s.wins;
  j["losses"] = s.losses;
  j["aborts"] = s.aborts;
  j["win_rate"] = round12(s.win_rate());
  j["abort_rate"] = round12(s.abort_rate());
  j["abort_rate_threshold"] = optional_json(s.abort_rate_threshold());
  j["k"] = optional_json(s.k);
  j["delta"] = optional_json(s.delta);
  j["message_bits"] = round12(s.message_bits);
  j["message_unit"] = s.message_unit;
  j["message_bits_integral"] = optional_json(s.message_bits_integral);
  j["message_bits_with_abort"] = optional_json(s.message_bits_with_abort);
  j["empirical_conditional_entropy"] = optional_json(s.empirical_conditional_entropy);
  j["exact_conditional_entropy"] = optional_json(s.exact_conditional_entropy);
  j["zero_error"] = s.zero_error();
  return j;
}

// ---------------------------------------------------------------------------
// Oracle witnesses

inline Json to_json(const classical::AnswerSet& a_set) {
  Json arr = Json::array();
  std::size_t j = 0;
  for_each_subset(a_set.n(), a_set.m(), [&](const SubsetY& y) {
    arr.push_back({{"y", y.indices()}, {"z", a_set.answers()[j++].str()}});
  });
  return {{"n", a_set.n()}, {"m", a_set.m()}, {"answers", std::move(arr)}};
}

inline classical::AnswerSet answer_set_from_json(const Json& j) {
  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();
  const auto subsets = all_subsets(n, m);
  const auto& arr = j.at("answers");
  detail::require(arr.size() == subsets.size(), "answer set JSON: wrong number of answers");
  std::vector<BitString> answers(subsets.size());
  std::vector<bool> seen(subsets.size(), false);
  for (const auto& entry : arr) {
    const SubsetY y(entry.at("y").get<std::vector<int>>(), n);
    detail::require(y.size() == m, "answer set JSON: subset has wrong size");
    const auto rank = subset_rank(y);
    detail::require(!seen[rank], "answer set JSON: duplicate subset");
    seen[rank] = true;
    answers[rank] = BitString::parse(entry.at("z").get<std::string>());
  }
  return classical::AnswerSet(n, m, std::move(answers));
}

}  // namespace exclab::io
