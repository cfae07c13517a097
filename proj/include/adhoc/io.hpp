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

// io.hpp: JSON and CSV forms of the result types.
//
// CSV: comma separated, one header row, '.' decimal point, LF line ends.
// Numbers are written in their shortest round-trip form so output is
// byte-stable.

#pragma once

#include "adhoc/fidelity.hpp"
#include "adhoc/grape.hpp"
#include "adhoc/model.hpp"
#include "adhoc/simplex.hpp"

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace adhoc {

using Json = nlohmann::ordered_json;

std::string format_number(double v);

class CsvTable {
 public:
  using Cell = std::variant<double, long long, std::string>;

  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<Cell> row);
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

/// Columns: time, ch0, ch1, ... (time is the slice midpoint).
std::string controls_to_csv(const ControlSet& c);
ControlSet controls_from_csv(const std::string& text, double total_time);

Json to_json(const ControlSet& c);
ControlSet controls_from_json(const Json& j);

Json to_json(const FidelityEstimate& e);
Json to_json(const OpenLoopResult& r);
Json to_json(const CalibrationResult& r);

/// Columns: iteration, eval_count, best, worst, delta_worst, threshold.
CsvTable history_table(const CalibrationResult& r);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace adhoc
