#include "siteguard/rules.hpp"

#include "siteguard/errors.hpp"
#include "siteguard/skeleton.hpp"

namespace siteguard {

namespace {

Predicate parse_predicate(const std::string& s) {
  if (s == "attachment") return Predicate::attachment;
  if (s == "multi_worker_requirement") return Predicate::multi_worker_requirement;
  if (s == "exclusive_occupancy") return Predicate::exclusive_occupancy;
  throw Error(ErrorCode::InvalidConfig, "unknown predicate '" + s + "'");
}

Anchor parse_anchor(const std::string& s) {
  if (s == "neck") return Anchor::neck;
  if (s == "torso") return Anchor::torso;
  if (s == "feet") return Anchor::feet;
  throw Error(ErrorCode::InvalidConfig, "unknown anchor '" + s + "'");
}

ViolationRule rule_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "rule must be an object");
  ViolationRule r;
  try {
    r.rule_id = j.at("id").get<std::string>();
    r.predicate = parse_predicate(j.at("predicate").get<std::string>());
    r.subject_class = j.at("subject_class").get<std::string>();
    r.worker_anchor = parse_anchor(j.at("anchor").get<std::string>());
    const Json& tau = j.at("tau");
    if (!tau.is_object() || tau.size() != 1)
      throw Error(ErrorCode::InvalidConfig, "rule '" + r.rule_id + "': tau needs exactly one of fraction or meters");
    if (tau.contains("fraction"))
      r.tau = Threshold::fraction(tau.at("fraction").get<double>());
    else if (tau.contains("meters"))
      r.tau = Threshold::meters(tau.at("meters").get<double>());
    else
      throw Error(ErrorCode::InvalidConfig, "rule '" + r.rule_id + "': tau needs fraction or meters");
    if (j.contains("required_workers")) r.required_workers = j.at("required_workers").get<int>();
    if (j.contains("max_workers")) r.max_workers = j.at("max_workers").get<int>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad rule: ") + e.what());
  }
  validate(r);
  return r;
}

}  // namespace

void validate(const ViolationRule& rule) {
  const auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::InvalidConfig, "rule '" + rule.rule_id + "': " + msg);
  };
  if (rule.rule_id.empty()) fail("empty id");
  if (rule.subject_class.empty()) fail("empty subject_class");
  if (rule.subject_class == kWorkerClass) fail("subject_class cannot be worker");
  if (rule.tau.kind == Threshold::Kind::fraction) {
    if (!(rule.tau.value > 0.0 && rule.tau.value <= 1.0)) fail("fraction must lie in (0, 1]");
  } else if (!(rule.tau.value > 0.0)) {
    fail("meters must be positive");
  }
  switch (rule.predicate) {
    case Predicate::attachment:
      if (rule.required_workers || rule.max_workers) fail("attachment takes no worker counts");
      break;
    case Predicate::multi_worker_requirement:
      if (!rule.required_workers || rule.max_workers) fail("multi_worker_requirement needs required_workers only");
      if (*rule.required_workers < 1) fail("required_workers must be >= 1");
      break;
    case Predicate::exclusive_occupancy:
      if (!rule.max_workers || rule.required_workers) fail("exclusive_occupancy needs max_workers only");
      if (*rule.max_workers < 0) fail("max_workers must be >= 0");
      break;
  }
}

std::string_view to_string(Predicate p) {
  switch (p) {
    case Predicate::attachment: return "attachment";
    case Predicate::multi_worker_requirement: return "multi_worker_requirement";
    case Predicate::exclusive_occupancy: return "exclusive_occupancy";
  }
  return "?";
}

std::string_view to_string(Anchor a) {
  switch (a) {
    case Anchor::neck: return "neck";
    case Anchor::torso: return "torso";
    case Anchor::feet: return "feet";
  }
  return "?";
}

std::vector<ViolationRule> default_rules() {
  std::vector<ViolationRule> rules(4);
  rules[0] = {"no_hardhat", Predicate::attachment, "hardhat", Anchor::neck, Threshold::fraction(0.1), {}, {}};
  rules[1] = {"platform_occupancy", Predicate::exclusive_occupancy, "platform", Anchor::feet,
              Threshold::fraction(0.5), {}, 1};
  rules[2] = {"ladder_holding", Predicate::multi_worker_requirement, "step_ladder", Anchor::torso,
              Threshold::fraction(0.4), 2, {}};
  rules[3] = {"large_window_handling", Predicate::multi_worker_requirement, "large_window", Anchor::torso,
              Threshold::fraction(0.5), 2, {}};
  return rules;
}

std::vector<ViolationRule> parse_rules(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("rules file is not JSON: ") + e.what());
  }
  if (!j.is_array()) throw Error(ErrorCode::InvalidConfig, "rules file must hold a JSON array");
  std::vector<ViolationRule> rules;
  for (const auto& item : j) {
    rules.push_back(rule_from_json(item));
    for (std::size_t i = 0; i + 1 < rules.size(); ++i)
      if (rules[i].rule_id == rules.back().rule_id)
        throw Error(ErrorCode::InvalidConfig, "duplicate rule id '" + rules.back().rule_id + "'");
  }
  return rules;
}

std::vector<ViolationRule> load_rules(const std::filesystem::path& path) {
  return parse_rules(read_text_file(path));
}

std::string serialize_rules(const std::vector<ViolationRule>& rules) {
  OrderedJson out = OrderedJson::array();
  for (const auto& r : rules) {
    OrderedJson j;
    j["id"] = r.rule_id;
    j["predicate"] = std::string(to_string(r.predicate));
    j["subject_class"] = r.subject_class;
    j["anchor"] = std::string(to_string(r.worker_anchor));
    OrderedJson tau;
    tau[r.tau.kind == Threshold::Kind::fraction ? "fraction" : "meters"] = round_sig9(r.tau.value);
    j["tau"] = tau;
    if (r.required_workers) j["required_workers"] = *r.required_workers;
    if (r.max_workers) j["max_workers"] = *r.max_workers;
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

}  // namespace siteguard
