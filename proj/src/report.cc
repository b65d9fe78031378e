// Copyright 2026 The gaitenroll Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gaitenroll/report.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <tuple>

#include "gaitenroll/io_util.h"

namespace gaitenroll {

namespace {

using Json = nlohmann::ordered_json;

double parse_number(const std::string& field) {
  if (field == "inf") return std::numeric_limits<double>::infinity();
  if (field == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0') throw InputError("not a number: \"" + field + "\"");
  return v;
}

// JSON cannot carry infinities; they travel as strings.
Json number_json(double v) {
  if (std::isinf(v)) return format_double(v);
  return v;
}

double number_from_json(const Json& j) {
  return j.is_string() ? parse_number(j.get<std::string>()) : j.get<double>();
}

}  // namespace

Json EvalReport::to_json() const {
  Json doc;
  doc["method"] = method;
  doc["mcc"] = mcc;
  doc["auc"] = auc;
  doc["f1"] = f1;
  doc["ap"] = ap;
  doc["threshold"] = number_json(threshold);
  doc["confusion"] = {{"tp", confusion.tp}, {"fp", confusion.fp}, {"fn", confusion.fn}, {"tn", confusion.tn}};
  doc["n_probes"] = n_probes;
  if (scenario) {
    doc["scenario"] = {{"gallery_ids", scenario->gallery_ids},
                       {"walks_per_id", scenario->walks_per_id},
                       {"pos_probes", scenario->pos_probes},
                       {"neg_probes", scenario->neg_probes},
                       {"seed", scenario->seed}};
  } else {
    doc["scenario"] = nullptr;
  }
  doc["checkpoint_digest"] = checkpoint_digest;
  doc["config_digest"] = config_digest;
  return doc;
}

EvalReport EvalReport::from_json(const Json& doc) {
  EvalReport r;
  r.method = doc.at("method").get<std::string>();
  r.mcc = doc.at("mcc").get<double>();
  r.auc = doc.at("auc").get<double>();
  r.f1 = doc.at("f1").get<double>();
  r.ap = doc.at("ap").get<double>();
  r.threshold = number_from_json(doc.at("threshold"));
  const auto& c = doc.at("confusion");
  r.confusion = {c.at("tp").get<std::size_t>(), c.at("fp").get<std::size_t>(),
                 c.at("fn").get<std::size_t>(), c.at("tn").get<std::size_t>()};
  r.n_probes = doc.at("n_probes").get<std::size_t>();
  if (doc.contains("scenario") && !doc["scenario"].is_null()) {
    const auto& s = doc["scenario"];
    r.scenario = ScenarioSpec{s.at("gallery_ids").get<std::size_t>(), s.at("walks_per_id").get<std::size_t>(),
                              s.at("pos_probes").get<std::size_t>(), s.at("neg_probes").get<std::size_t>(),
                              s.at("seed").get<std::uint64_t>()};
  }
  r.checkpoint_digest = doc.value("checkpoint_digest", "");
  r.config_digest = doc.value("config_digest", "");
  return r;
}

ScoredLabels scored_labels(std::span<const ProbeScore> scores) {
  ScoredLabels sl;
  for (const auto& s : scores) {
    sl.scores.push_back(s.score);
    sl.labels.push_back(s.label);
  }
  return sl;
}

EvalReport summarize_scores(std::span<const ProbeScore> scores, double threshold) {
  const ScoredLabels sl = scored_labels(scores);
  EvalReport r;
  r.threshold = threshold;
  r.confusion = confusion(sl.labels, decide(sl.scores, threshold));
  r.mcc = mcc(r.confusion);
  r.f1 = f1(r.confusion);
  r.auc = roc_auc(sl);
  r.ap = average_precision(sl);
  r.n_probes = scores.size();
  return r;
}

std::vector<ProbeScore> make_probe_scores(std::span<const std::string> ids,
                                          std::span<const std::string> walks,
                                          std::span<const int> labels,
                                          std::span<const double> scores, double threshold) {
  if (ids.size() != walks.size() || ids.size() != labels.size() || ids.size() != scores.size()) {
    throw std::invalid_argument("make_probe_scores: length mismatch");
  }
  std::vector<ProbeScore> out;
  out.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.push_back({ids[i], walks[i], labels[i], scores[i], scores[i] >= threshold ? 1 : 0});
  }
  std::sort(out.begin(), out.end(), [](const ProbeScore& a, const ProbeScore& b) {
    return std::tie(a.id, a.walk) < std::tie(b.id, b.walk);
  });
  return out;
}

std::string scores_csv(std::span<const ProbeScore> scores) {
  std::string out = "id,walk,label,score,decision\n";
  for (const auto& s : scores) {
    out += s.id + "," + s.walk + "," + std::to_string(s.label) + "," + format_double(s.score) +
           "," + std::to_string(s.decision) + "\n";
  }
  return out;
}

std::vector<ProbeScore> parse_scores_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "id,walk,label,score,decision") {
    throw InputError("scores CSV: missing header");
  }
  std::vector<ProbeScore> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 5) {
      throw InputError("scores CSV line " + std::to_string(line_no) + ": expected 5 fields");
    }
    try {
      out.push_back({fields[0], fields[1], std::stoi(fields[2]), parse_number(fields[3]),
                     std::stoi(fields[4])});
    } catch (const std::exception& e) {
      throw InputError("scores CSV line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string format_report(const EvalReport& report) { return report.to_json().dump(2) + "\n"; }

EvalReport load_report(const std::filesystem::path& path) {
  try {
    return EvalReport::from_json(Json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": malformed report: " + e.what());
  }
}

std::string comparison_csv(std::span<const EvalReport> reports, std::span<const std::string> names) {
  std::string out = "name,method,mcc,auc,f1,ap,threshold,n_probes\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    out += names[i] + "," + r.method + "," + format_double(r.mcc) + "," + format_double(r.auc) +
           "," + format_double(r.f1) + "," + format_double(r.ap) + "," +
           format_double(r.threshold) + "," + std::to_string(r.n_probes) + "\n";
  }
  return out;
}

std::string comparison_text(std::span<const EvalReport> reports, std::span<const std::string> names) {
  std::size_t name_width = 4;
  std::size_t method_width = 6;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    name_width = std::max(name_width, names[i].size());
    method_width = std::max(method_width, reports[i].method.size());
  }
  auto row = [&](const std::string& name, const std::string& method, const std::string& rest) {
    std::string line = name + std::string(name_width - name.size() + 2, ' ') + method +
                       std::string(method_width - method.size() + 2, ' ') + rest;
    return line + "\n";
  };
  std::string out = row("name", "method", "   mcc     auc      f1      ap  n_probes");
  char buf[128];
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    std::snprintf(buf, sizeof buf, "%6.4f  %6.4f  %6.4f  %6.4f  %8zu", r.mcc, r.auc, r.f1, r.ap,
                  r.n_probes);
    out += row(names[i], r.method, buf);
  }
  return out;
}

}  // namespace gaitenroll
