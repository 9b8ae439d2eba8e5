// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace wsf::log {

namespace {

std::atomic<Level> g_level{Level::kWarning};
std::mutex g_mutex;

void emit(Level lvl, const char* tag, std::string_view message) {
  if (lvl < g_level.load()) {
    return;
  }
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "[wsf " << tag << "] " << message << '\n';
}

}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

void debug(std::string_view message) { emit(Level::kDebug, "debug", message); }
void info(std::string_view message) { emit(Level::kInfo, "info", message); }
void warning(std::string_view message) { emit(Level::kWarning, "warning", message); }
void error(std::string_view message) { emit(Level::kError, "error", message); }

}  // namespace wsf::log
