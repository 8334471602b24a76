// Copyright 2026 The Pulseforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace pulseforge {

// Diagnostics go to stderr only; level set by PULSEFORGE_LOG (debug|info|warn,
// default warn).
enum class LogLevel { Debug = 0, Info = 1, Warn = 2 };

inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("PULSEFORGE_LOG");
    if (env == nullptr) return LogLevel::Warn;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    return LogLevel::Warn;
  }();
  return level;
}

inline void log_line(LogLevel level, const std::string& msg) {
  if (level < log_level()) return;
  const char* tag = level == LogLevel::Debug ? "debug" : (level == LogLevel::Info ? "info" : "warn");
  std::fprintf(stderr, "[pulseforge:%s] %s\n", tag, msg.c_str());
}

}  // namespace pulseforge
