// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace paralab {

/// Shortest decimal text that parses back to the same double; every CSV
/// number goes through here so outputs are byte-stable.
std::string format_number(double v);

std::string escape_xml(std::string_view s);

/// Quotes a CSV field when it holds a comma, quote or newline.
std::string csv_field(std::string_view s);

}  // namespace paralab
