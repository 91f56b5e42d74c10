// Copyright 2026 The rs2ad Authors
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

#include "rs2ad/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace rs2ad::log {
namespace {

Level read_level() {
  const char* env = std::getenv("RS2AD_LOG");
  if (!env) return Level::off;
  const std::string value(env);
  if (value == "info") return Level::info;
  if (value == "debug") return Level::debug;
  return Level::off;
}

std::mutex& mutex() {
  static std::mutex m;
  return m;
}

void emit(const std::string& msg) {
  std::lock_guard<std::mutex> lock(mutex());
  std::cerr << "[rs2ad] " << msg << "\n";
}

}  // namespace

Level level() {
  static const Level cached = read_level();
  return cached;
}

void info(const std::string& msg) {
  if (level() >= Level::info) emit(msg);
}

void debug(const std::string& msg) {
  if (level() >= Level::debug) emit(msg);
}

}  // namespace rs2ad::log
