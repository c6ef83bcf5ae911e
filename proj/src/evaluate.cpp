#include "siteguard/evaluate.hpp"

#include <algorithm>
#include <set>

#include "siteguard/errors.hpp"

namespace siteguard {

std::vector<LabelRecord> parse_label_records(const std::string& text) {
  std::vector<LabelRecord> out;
  for (const auto& [line, j] : parse_json_lines(text)) {
    const auto bad = [&](const std::string& what) {
      throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": " + what);
    };
    if (!j.is_object()) bad("record is not an object");
    LabelRecord r;
    try {
      r.frame = j.at("frame").get<int>();
      if (j.contains("rule"))
        r.rule_id = j.at("rule").get<std::string>();
      else if (j.contains("rule_id"))
        r.rule_id = j.at("rule_id").get<std::string>();
      else
        bad("missing rule");
      r.violated = j.at("violated").get<bool>();
    } catch (const Json::exception& e) {
      bad(e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

SceneReport evaluate(const std::vector<LabelRecord>& pred, const std::vector<LabelRecord>& truth) {
  SceneReport report;
  if (!truth.empty()) {
    const auto [lo, hi] = std::minmax_element(truth.begin(), truth.end(),
                                              [](const LabelRecord& a, const LabelRecord& b) { return a.frame < b.frame; });
    report.first_frame = lo->frame;
    report.last_frame = hi->frame;
  }
  for (const auto& p : pred)
    if (p.frame < report.first_frame || p.frame > report.last_frame)
      throw Error(ErrorCode::FrameRangeMismatch, "predicted frame " + std::to_string(p.frame) +
                                                     " outside truth range [" + std::to_string(report.first_frame) +
                                                     ", " + std::to_string(report.last_frame) + "]");

  std::set<std::string> rules;
  for (const auto& r : truth) rules.insert(r.rule_id);
  for (const auto& r : pred) rules.insert(r.rule_id);

  const std::size_t n = static_cast<std::size_t>(report.last_frame - report.first_frame + 1);
  for (const auto& id : rules) {
    RuleReport& rr = report.rules[id];
    rr.predicted.assign(n, false);
    rr.truth.assign(n, false);
  }
  for (const auto& r : pred)
    if (r.violated) report.rules[r.rule_id].predicted[r.frame - report.first_frame] = true;
  for (const auto& r : truth)
    if (r.violated) report.rules[r.rule_id].truth[r.frame - report.first_frame] = true;

  double sum = 0.0;
  for (auto& [id, rr] : report.rules) {
    for (std::size_t f = 0; f < n; ++f) {
      const bool p = rr.predicted[f], t = rr.truth[f];
      if (p && t) ++rr.tp;
      else if (p) ++rr.fp;
      else if (t) ++rr.fn;
      else ++rr.tn;
    }
    rr.accuracy_pct = rr.total() > 0 ? 100.0 * static_cast<double>(rr.tp + rr.tn) / rr.total() : 100.0;
    sum += rr.accuracy_pct;
  }
  report.mean_accuracy_pct = report.rules.empty() ? 100.0 : sum / static_cast<double>(report.rules.size());
  return report;
}

OrderedJson to_json(const SceneReport& report) {
  OrderedJson root;
  root["frames"] = {report.first_frame, report.last_frame};
  OrderedJson rules = OrderedJson::object();
  for (const auto& [id, rr] : report.rules) {
    OrderedJson r;
    r["tp"] = rr.tp;
    r["fp"] = rr.fp;
    r["tn"] = rr.tn;
    r["fn"] = rr.fn;
    r["accuracy_pct"] = round_sig9(rr.accuracy_pct);
    std::string pred, truth;
    for (bool b : rr.predicted) pred += b ? '1' : '0';
    for (bool b : rr.truth) truth += b ? '1' : '0';
    r["timeline"] = {{"predicted", pred}, {"truth", truth}};
    rules[id] = std::move(r);
  }
  root["rules"] = rules;
  root["mean_accuracy_pct"] = round_sig9(report.mean_accuracy_pct);
  return root;
}

}  // namespace siteguard
