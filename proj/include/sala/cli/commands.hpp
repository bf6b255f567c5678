// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sala::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 bad usage.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sala::cli
