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

#pragma once

#include <string>

namespace rs2ad::log {

enum class Level { off = 0, info = 1, debug = 2 };

/// Verbosity from the RS2AD_LOG environment variable (off | info | debug),
/// read once per process; unset or unrecognized values mean off.
Level level();

/// Writes "[rs2ad] msg" to stderr when the level allows it.
void info(const std::string& msg);
void debug(const std::string& msg);

}  // namespace rs2ad::log
