#pragma once

#include <map>
#include <string>
#include <vector>

#include "siteguard/json_io.hpp"

namespace siteguard {

// Scene-level record: any entity violating `rule_id` at `frame`.
struct LabelRecord {
  int frame = 0;
  std::string rule_id;
  bool violated = false;
};

// Accepts violations ({rule, ...}) and ground-truth ({rule_id, ...}) lines.
std::vector<LabelRecord> parse_label_records(const std::string& text);

struct RuleReport {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy_pct = 100.0;
  std::vector<bool> predicted;  // per evaluated frame
  std::vector<bool> truth;
  long total() const { return tp + fp + tn + fn; }
};

struct SceneReport {
  int first_frame = 0;
  int last_frame = -1;
  std::map<std::string, RuleReport> rules;
  double mean_accuracy_pct = 100.0;
};

// Frames evaluated are the truth's [min, max] range. Throws
// FrameRangeMismatch when the prediction has frames outside it.
SceneReport evaluate(const std::vector<LabelRecord>& pred, const std::vector<LabelRecord>& truth);

OrderedJson to_json(const SceneReport& report);

}  // namespace siteguard
