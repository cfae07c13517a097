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

#include "adhoc/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace adhoc {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw ValidationError("CsvTable: empty header");
}

void CsvTable::add_row(std::vector<Cell> row) {
  if (row.size() != header_.size()) throw ValidationError("CsvTable: row width differs from header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
              out += format_number(v);
            else if constexpr (std::is_same_v<T, long long>)
              out += std::to_string(v);
            else if (v.find_first_of(",\"\n") == std::string::npos)
              out += v;
            else {
              out += '"';
              for (char ch : v) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
              out += '"';
            }
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string controls_to_csv(const ControlSet& c) {
  std::vector<std::string> header{"time"};
  for (int k = 0; k < c.channels(); ++k) header.push_back("ch" + std::to_string(k));
  CsvTable t(header);
  for (int j = 0; j < c.slices(); ++j) {
    std::vector<CsvTable::Cell> row{c.grid().midpoint(j)};
    for (int k = 0; k < c.channels(); ++k) row.emplace_back(c(k, j));
    t.add_row(std::move(row));
  }
  return t.str();
}

ControlSet controls_from_csv(const std::string& text, double total_time) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("controls csv: empty input");
  const int channels = static_cast<int>(std::count(line.begin(), line.end(), ','));
  if (channels < 1) throw ValidationError("controls csv: need at least one channel column");
  std::vector<std::vector<double>> cols(channels);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');  // time
    for (int k = 0; k < channels; ++k) {
      if (!std::getline(ls, cell, ',')) throw ValidationError("controls csv: short row");
      cols[k].push_back(std::stod(cell));
    }
  }
  const int n = static_cast<int>(cols[0].size());
  if (n < 1) throw ValidationError("controls csv: no slices");
  RMatrix v(channels, n);
  for (int k = 0; k < channels; ++k)
    for (int j = 0; j < n; ++j) v(k, j) = cols[k][j];
  return ControlSet(TimeGrid(total_time, n), std::move(v));
}

Json to_json(const ControlSet& c) {
  Json values = Json::array();
  for (int k = 0; k < c.channels(); ++k) {
    Json ch = Json::array();
    for (int j = 0; j < c.slices(); ++j) ch.push_back(c(k, j));
    values.push_back(std::move(ch));
  }
  return {{"total_time", c.grid().total_time()}, {"slices", c.slices()}, {"values", values}};
}

ControlSet controls_from_json(const Json& j) {
  const double t = j.at("total_time").get<double>();
  const int n = j.at("slices").get<int>();
  const auto& values = j.at("values");
  RMatrix v(static_cast<Eigen::Index>(values.size()), n);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (static_cast<int>(values[k].size()) != n)
      throw ValidationError("controls json: channel length differs from slices");
    for (int s = 0; s < n; ++s) v(static_cast<Eigen::Index>(k), s) = values[k][s].get<double>();
  }
  return ControlSet(TimeGrid(t, n), std::move(v));
}

Json to_json(const FidelityEstimate& e) {
  return {{"value", e.value},     {"kind", to_string(e.kind)}, {"samples", e.samples},
          {"depolarized", e.depolarized}, {"p_bar", e.p_bar}, {"sigma_p", e.sigma_p},
          {"std_error", e.std_error}};
}

Json to_json(const OpenLoopResult& r) {
  return {{"initial_infidelity", r.initial_infidelity},
          {"final_infidelity", r.final_infidelity},
          {"iterations", r.iterations},
          {"evaluations", r.evaluations},
          {"stop_reason", r.stop_reason},
          {"infidelity_history", r.infidelity_history},
          {"gradient_norm_history", r.gradient_norm_history},
          {"controls", to_json(r.controls)}};
}

Json to_json(const CalibrationResult& r) {
  Json history = Json::array();
  for (const auto& h : r.history)
    history.push_back({{"iteration", h.iteration},
                       {"eval_count", h.eval_count},
                       {"best", h.best},
                       {"worst", h.worst},
                       {"delta_worst", h.delta_worst},
                       {"threshold", h.threshold}});
  return {{"best", r.best},
          {"best_fidelity", r.best_fidelity},
          {"eval_count", r.eval_count},
          {"halt_reason", to_string(r.halt_reason)},
          {"final_mean_delta_worst", r.final_mean_delta_worst},
          {"final_threshold", r.final_threshold},
          {"history", history}};
}

CsvTable history_table(const CalibrationResult& r) {
  CsvTable t({"iteration", "eval_count", "best", "worst", "delta_worst", "threshold"});
  for (const auto& h : r.history)
    t.add_row({static_cast<long long>(h.iteration), static_cast<long long>(h.eval_count), h.best,
               h.worst, h.delta_worst, h.threshold});
  return t;
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace adhoc
