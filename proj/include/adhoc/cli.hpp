// Copyright 2026 The adhoc Authors
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

// cli.hpp: command-line front end.
//
// Exit codes: 0 ok, 1 runtime or validation failure, 2 usage.
// Output root defaults to $ADHOC_OUT_ROOT (else ./runs) when --out is absent.

#pragma once

#include <iosfwd>
#include <string>

namespace adhoc {

inline constexpr const char* kOutRootEnv = "ADHOC_OUT_ROOT";

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Files written into every run directory.
struct RunFiles {
  static constexpr const char* config = "config.json";
  static constexpr const char* records = "records.json";
  static constexpr const char* plot = "plotdata.csv";
  static constexpr const char* manifest = "manifest.json";
};

}  // namespace adhoc
