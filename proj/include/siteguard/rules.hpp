#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "siteguard/json_io.hpp"

namespace siteguard {

enum class Predicate { attachment, multi_worker_requirement, exclusive_occupancy };
enum class Anchor { neck, torso, feet };

struct Threshold {
  enum class Kind { fraction, meters };
  Kind kind = Kind::fraction;
  double value = 0.1;

  static Threshold fraction(double f) { return {Kind::fraction, f}; }
  static Threshold meters(double m) { return {Kind::meters, m}; }
};

struct ViolationRule {
  std::string rule_id;
  Predicate predicate = Predicate::attachment;
  std::string subject_class;
  Anchor worker_anchor = Anchor::neck;
  Threshold tau;
  std::optional<int> required_workers;  // multi_worker_requirement only
  std::optional<int> max_workers;       // exclusive_occupancy only
};

// Throws InvalidConfig.
void validate(const ViolationRule& rule);

std::string_view to_string(Predicate p);
std::string_view to_string(Anchor a);

// Hardhat, platform, step ladder and large window rules with the default
// body-scaled thresholds.
std::vector<ViolationRule> default_rules();

std::vector<ViolationRule> parse_rules(const std::string& text);
std::vector<ViolationRule> load_rules(const std::filesystem::path& path);
std::string serialize_rules(const std::vector<ViolationRule>& rules);

}  // namespace siteguard
