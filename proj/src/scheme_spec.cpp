// SPDX-License-Identifier: Apache-2.0
#include "indc/scheme_spec.hpp"

#include "indc/errors.hpp"

#include <cctype>
#include <charconv>
#include <optional>

namespace indc {

namespace {

[[noreturn]] void fail(std::string_view text, std::size_t pos, const std::string& msg) {
  throw usage_error("scheme '" + std::string(text) + "': " + msg + " at position " +
                    std::to_string(pos));
}

int parse_int(std::string_view text, std::size_t begin, std::size_t end) {
  int value = 0;
  const char* first = text.data() + begin;
  const char* last = text.data() + end;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (begin == end || ec != std::errc() || ptr != last)
    fail(text, begin, "expected an integer");
  return value;
}

}  // namespace

IndcScheme parse_scheme(std::string_view text) {
  if (text.empty()) throw usage_error("empty scheme spec");
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) fail(text, text.size(), "missing ':M=<m>'");

  std::vector<ButcherTableau> methods;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= colon) {
    std::size_t end = text.find('+', pos);
    if (end == std::string_view::npos || end > colon) end = colon;
    const std::string_view item = text.substr(pos, end - pos);
    if (item.empty()) fail(text, pos, "empty method name");

    int count = 1;
    std::string_view name = item;
    if (const auto star = item.find('*'); star != std::string_view::npos) {
      if (first) fail(text, pos + star, "'*' is only allowed on corrections");
      name = item.substr(0, star);
      count = parse_int(text, pos + star + 1, end);
      if (count < 1) fail(text, pos + star + 1, "repeat count must be >= 1");
      if (name.empty()) fail(text, pos, "empty method name");
    }
    ButcherTableau t;
    try {
      t = builtin(name);
    } catch (const usage_error& e) {
      fail(text, pos, e.what());
    }
    for (int i = 0; i < count; ++i) methods.push_back(t);
    first = false;
    pos = end + 1;
  }

  std::optional<int> M, K;
  pos = colon + 1;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view kv = text.substr(pos, end - pos);
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) fail(text, pos, "expected <key>=<value>");
    const std::string_view key = kv.substr(0, eq);
    const int value = parse_int(text, pos + eq + 1, end);
    if (key == "M" || key == "m") {
      if (M) fail(text, pos, "M given twice");
      M = value;
    } else if (key == "K" || key == "k") {
      if (K) fail(text, pos, "K given twice");
      if (value < 0) fail(text, pos + eq + 1, "K must be >= 0");
      K = value;
    } else {
      fail(text, pos, "unknown key '" + std::string(key) + "'");
    }
    pos = end + 1;
  }
  if (!M) fail(text, text.size(), "missing M");

  if (K) {
    if (methods.size() == 1) {
      methods.resize(*K + 1, methods.front());
    } else if (static_cast<int>(methods.size()) - 1 != *K) {
      fail(text, colon, "K=" + std::to_string(*K) + " disagrees with " +
                            std::to_string(methods.size() - 1) + " listed corrections");
    }
  }
  try {
    return make_scheme(*M, std::move(methods));
  } catch (const usage_error& e) {
    fail(text, colon + 1, e.what());
  }
}

std::string format_scheme(const IndcScheme& scheme) {
  const auto& ms = scheme.methods;
  bool uniform = true;
  for (const auto& t : ms) uniform = uniform && t.name == ms.front().name;

  std::string out = short_token(ms.front());
  if (uniform) {
    return out + ":M=" + std::to_string(scheme.M) + ",K=" + std::to_string(scheme.K());
  }
  for (std::size_t k = 1; k < ms.size();) {
    std::size_t run = 1;
    while (k + run < ms.size() && ms[k + run].name == ms[k].name) ++run;
    out += "+" + short_token(ms[k]);
    if (run > 1) out += "*" + std::to_string(run);
    k += run;
  }
  return out + ":M=" + std::to_string(scheme.M);
}

}  // namespace indc
