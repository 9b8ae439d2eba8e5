// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

namespace wsf::log {

enum class Level { kDebug = 0, kInfo = 1, kWarning = 2, kError = 3, kOff = 4 };

void set_level(Level level);
Level level();

void debug(std::string_view message);
void info(std::string_view message);
void warning(std::string_view message);
void error(std::string_view message);

}  // namespace wsf::log
