// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/report.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace revcal::report {

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::logic_error("report row width mismatch");
  rows_.push_back(std::move(row));
}

std::string Table::to_text(const std::string& title) const {
  std::vector<std::size_t> width(header_.size());
  for (std::size_t c = 0; c < header_.size(); ++c) width[c] = header_[c].size();
  for (const auto& r : rows_) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  if (!title.empty()) out += title + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      // first column left-aligned (labels), the rest right-aligned (numbers)
      out += c == 0 ? fmt::format("{:<{}}", cells[c], width[c])
                    : fmt::format("  {:>{}}", cells[c], width[c]);
    }
    out += "\n";
  };
  line(header_);
  std::size_t total = 0;
  for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c == 0 ? 0 : 2);
  out += std::string(total, '-') + "\n";
  for (const auto& r : rows_) line(r);
  return out;
}

std::string Table::to_csv() const {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  };
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out += ',';
      out += quote(cells[c]);
    }
    out += "\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::string percent(std::optional<double> fraction) {
  if (!fraction) return "n/a";
  return fmt::format("{:.1f}%", *fraction * 100.0);
}

std::string full(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{}", value);
}

std::string full(std::optional<double> value) { return value ? full(*value) : std::string{}; }

std::string sig6(double value) { return fmt::format("{:.6g}", value); }

}  // namespace revcal::report
