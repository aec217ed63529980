// Copyright 2026 The revcal Authors
// SPDX-License-Identifier: Apache-2.0

// Strict field accessors for hand-written JSON decoders. Every failure is an
// InvalidInput naming the key.

#ifndef REVCAL_CORE_JSON_UTIL_HPP
#define REVCAL_CORE_JSON_UTIL_HPP

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "core/types.hpp"

namespace revcal::json_util {

inline void only_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                      std::string_view context) {
  if (!j.is_object()) throw InvalidInput(fmt::format("{}: expected a JSON object", context));
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidInput(fmt::format("{}: unknown key '{}'", context, key));
    }
  }
}

inline const nlohmann::json& field(const nlohmann::json& j, std::string_view key) {
  auto it = j.find(key);
  if (it == j.end()) throw InvalidInput(fmt::format("{}: missing", key));
  return *it;
}

inline double number(const nlohmann::json& j, std::string_view key) {
  const auto& v = field(j, key);
  if (!v.is_number()) throw InvalidInput(fmt::format("{}: expected a number", key));
  return v.get<double>();
}

inline std::int64_t integer(const nlohmann::json& j, std::string_view key) {
  const auto& v = field(j, key);
  if (!v.is_number_integer()) throw InvalidInput(fmt::format("{}: expected an integer", key));
  return v.get<std::int64_t>();
}

inline bool boolean(const nlohmann::json& j, std::string_view key) {
  const auto& v = field(j, key);
  if (!v.is_boolean()) throw InvalidInput(fmt::format("{}: expected true or false", key));
  return v.get<bool>();
}

inline std::string string(const nlohmann::json& j, std::string_view key) {
  const auto& v = field(j, key);
  if (!v.is_string()) throw InvalidInput(fmt::format("{}: expected a string", key));
  return v.get<std::string>();
}

inline std::vector<double> number_array(const nlohmann::json& j, std::string_view key) {
  const auto& v = field(j, key);
  if (!v.is_array()) throw InvalidInput(fmt::format("{}: expected an array of numbers", key));
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw InvalidInput(fmt::format("{}: expected an array of numbers", key));
    out.push_back(x.get<double>());
  }
  return out;
}

inline std::vector<std::int64_t> integer_array(const nlohmann::json& j, std::string_view key) {
  const auto& v = field(j, key);
  if (!v.is_array()) throw InvalidInput(fmt::format("{}: expected an array of integers", key));
  std::vector<std::int64_t> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) {
      throw InvalidInput(fmt::format("{}: expected an array of integers", key));
    }
    out.push_back(x.get<std::int64_t>());
  }
  return out;
}

}  // namespace revcal::json_util

#endif  // REVCAL_CORE_JSON_UTIL_HPP
