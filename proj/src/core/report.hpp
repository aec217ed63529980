// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef REVCAL_CORE_REPORT_HPP
#define REVCAL_CORE_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

namespace revcal::report {

/// A table rendered either as aligned text or as CSV. Cells are pre-formatted
/// strings; formatting policy lives in the helpers below.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string to_text(const std::string& title = {}) const;
  std::string to_csv() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// "57.0%"; "n/a" when absent.
std::string percent(std::optional<double> fraction);
/// Shortest round-trip representation of a double; "inf"/"-inf"/"nan" spelled out.
std::string full(double value);
/// Empty string when absent.
std::string full(std::optional<double> value);
/// Six significant digits.
std::string sig6(double value);

}  // namespace revcal::report

#endif  // REVCAL_CORE_REPORT_HPP
