// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "indc/solver.hpp"

#include <string>
#include <string_view>

namespace indc {

/// Parses "<pred>[+<corr>[*<count>]...]:M=<m>[,K=<k>]".
///
///   BE:M=3,K=2        BE prediction and two BE corrections
///   DIRK2SA+DIRK2SA:M=4
///   Radau3+BE*2:M=6   Radau IIA prediction, two BE corrections
///
/// With no correction list, K copies of the prediction method are used. When
/// both a list and K are given they must agree. Errors are usage_error with
/// the character position of the problem.
IndcScheme parse_scheme(std::string_view text);

/// Canonical text for a scheme; parse_scheme(format_scheme(s)) reproduces s.
std::string format_scheme(const IndcScheme& scheme);

}  // namespace indc
