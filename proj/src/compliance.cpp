#include "siteguard/compliance.hpp"

#include <algorithm>
#include <tuple>

namespace siteguard {

const std::optional<Eigen::Vector3d>& SemanticJoints::anchor(Anchor a) const {
  switch (a) {
    case Anchor::neck: return neck;
    case Anchor::torso: return torso;
    case Anchor::feet: return feet;
  }
  return neck;
}

SemanticJoints derive_semantic_joints(const Pose3D& pose) {
  SemanticJoints s;
  const bool shoulders = pose.has(Joint::shoulder_l) && pose.has(Joint::shoulder_r);
  const bool hips = pose.has(Joint::hip_l) && pose.has(Joint::hip_r);
  if (shoulders) s.neck = 0.5 * (pose.at(Joint::shoulder_l) + pose.at(Joint::shoulder_r));
  if (shoulders && hips)
    s.torso = 0.25 * (pose.at(Joint::shoulder_l) + pose.at(Joint::shoulder_r) + pose.at(Joint::hip_l) +
                      pose.at(Joint::hip_r));
  Eigen::Vector3d feet = Eigen::Vector3d::Zero();
  int n = 0;
  for (Joint a : {Joint::ankle_l, Joint::ankle_r}) {
    if (!pose.has(a)) continue;
    feet += pose.at(a);
    ++n;
  }
  if (n > 0) s.feet = feet / n;
  return s;
}

double resolve_threshold(const ViolationRule& rule, std::optional<double> worker_height, double nominal_height) {
  if (rule.tau.kind == Threshold::Kind::meters) return rule.tau.value;
  return rule.tau.value * worker_height.value_or(nominal_height);
}

int ViolationEvent::key_entity() const {
  if (object_track_id) return *object_track_id;
  return worker_track_ids.empty() ? -1 : worker_track_ids.front();
}

std::vector<WorkerObservation> worker_observations(std::span<const Track> workers, int frame) {
  std::vector<WorkerObservation> out;
  for (const auto& t : workers) {
    if (t.history.empty()) continue;
    const Pose3D& pose = t.latest_pose();
    WorkerObservation w;
    w.id = t.track_id;
    w.anchors = derive_semantic_joints(pose);
    w.centroid = pose.centroid();
    w.height = t.worker_height;
    w.fresh = t.seen_at(frame);
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<ObjectObservation> object_observations(std::span<const Track> objects, int frame) {
  std::vector<ObjectObservation> out;
  for (const auto& t : objects) {
    if (t.history.empty()) continue;
    out.push_back({t.track_id, t.entity_class, t.latest_object().position, t.seen_at(frame)});
  }
  return out;
}

namespace {

template <typename T>
std::vector<const T*> sorted_by_id(std::span<const T> items) {
  std::vector<const T*> out;
  for (const auto& it : items) out.push_back(&it);
  std::sort(out.begin(), out.end(), [](const T* a, const T* b) { return a->id < b->id; });
  return out;
}

std::vector<const ObjectObservation*> subjects(const ViolationRule& rule,
                                               std::span<const ObjectObservation> objects) {
  std::vector<const ObjectObservation*> out;
  for (const auto* o : sorted_by_id(objects))
    if (o->object_class == rule.subject_class) out.push_back(o);
  return out;
}

struct Proximity {
  std::vector<int> certain;
  int uncertain = 0;
};

// A worker counts as certain when observed with its anchor inside the
// threshold. One whose anchor cannot be measured but whose body is close
// enough that it might be inside counts as uncertain.
Proximity proximity(const ViolationRule& rule, const std::vector<const WorkerObservation*>& workers,
                    const ObjectObservation& obj, double nominal_height) {
  Proximity p;
  for (const auto* w : workers) {
    const double tau = resolve_threshold(rule, w->height, nominal_height);
    const auto& anchor = w->anchors.anchor(rule.worker_anchor);
    if (w->fresh && anchor) {
      if ((*anchor - obj.position).norm() < tau) p.certain.push_back(w->id);
      continue;
    }
    if (!w->centroid) continue;
    const double reach = tau + 0.5 * w->height.value_or(nominal_height);
    if ((*w->centroid - obj.position).norm() < reach) ++p.uncertain;
  }
  return p;
}

ViolationEvent object_event(const ViolationRule& rule, const ObjectObservation& obj, int frame) {
  ViolationEvent e;
  e.frame = frame;
  e.rule_id = rule.rule_id;
  e.object_track_id = obj.id;
  return e;
}

}  // namespace

std::vector<ViolationEvent> evaluate_attachment(const ViolationRule& rule, std::span<const WorkerObservation> workers,
                                                std::span<const ObjectObservation> objects, int frame,
                                                double nominal_height) {
  const auto ws = sorted_by_id(workers);
  const auto hats = subjects(rule, objects);

  struct Pair {
    double d;
    std::size_t w, h;
  };
  std::vector<Pair> pairs;
  std::vector<double> tau(ws.size());
  for (std::size_t i = 0; i < ws.size(); ++i) {
    tau[i] = resolve_threshold(rule, ws[i]->height, nominal_height);
    const auto& anchor = ws[i]->anchors.anchor(rule.worker_anchor);
    if (!ws[i]->fresh || !anchor) continue;
    for (std::size_t h = 0; h < hats.size(); ++h) {
      if (!hats[h]->fresh) continue;
      const double d = (*anchor - hats[h]->position).norm();
      if (d < tau[i]) pairs.push_back({d, i, h});
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& a, const Pair& b) { return std::tie(a.d, a.w, a.h) < std::tie(b.d, b.w, b.h); });
  std::vector<int> hat_of(ws.size(), -1);
  std::vector<bool> hat_used(hats.size(), false);
  for (const auto& p : pairs) {
    if (hat_of[p.w] >= 0 || hat_used[p.h]) continue;
    hat_of[p.w] = static_cast<int>(p.h);
    hat_used[p.h] = true;
  }

  std::vector<ViolationEvent> events;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    ViolationEvent e;
    e.frame = frame;
    e.rule_id = rule.rule_id;
    e.worker_track_ids = {ws[i]->id};
    const auto& anchor = ws[i]->anchors.anchor(rule.worker_anchor);
    if (!ws[i]->fresh || !anchor) {
      e.evidence = false;
    } else if (hat_of[i] >= 0) {
      e.violated = false;
    } else {
      // An unobserved hat that was last seen on this worker leaves the
      // outcome open.
      bool stale_nearby = false;
      for (const auto* h : hats)
        if (!h->fresh && (*anchor - h->position).norm() < tau[i]) stale_nearby = true;
      if (stale_nearby)
        e.evidence = false;
      else
        e.violated = true;
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<ViolationEvent> evaluate_multi_worker(const ViolationRule& rule,
                                                  std::span<const WorkerObservation> workers,
                                                  std::span<const ObjectObservation> objects, int frame,
                                                  double nominal_height) {
  const auto ws = sorted_by_id(workers);
  const int required = rule.required_workers.value_or(2);
  std::vector<ViolationEvent> events;
  for (const auto* obj : subjects(rule, objects)) {
    ViolationEvent e = object_event(rule, *obj, frame);
    if (!obj->fresh) {
      e.evidence = false;
      events.push_back(std::move(e));
      continue;
    }
    const Proximity p = proximity(rule, ws, *obj, nominal_height);
    const int c = static_cast<int>(p.certain.size());
    e.worker_track_ids = p.certain;
    if (c >= required)
      e.violated = false;
    else if (c + p.uncertain < required)
      e.violated = c >= 1;
    else
      e.evidence = false;
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<ViolationEvent> evaluate_exclusive_occupancy(const ViolationRule& rule,
                                                         std::span<const WorkerObservation> workers,
                                                         std::span<const ObjectObservation> objects, int frame,
                                                         double nominal_height) {
  const auto ws = sorted_by_id(workers);
  const int max = rule.max_workers.value_or(1);
  std::vector<ViolationEvent> events;
  for (const auto* obj : subjects(rule, objects)) {
    ViolationEvent e = object_event(rule, *obj, frame);
    if (!obj->fresh) {
      e.evidence = false;
      events.push_back(std::move(e));
      continue;
    }
    const Proximity p = proximity(rule, ws, *obj, nominal_height);
    const int c = static_cast<int>(p.certain.size());
    e.worker_track_ids = p.certain;
    if (c > max)
      e.violated = true;
    else if (c + p.uncertain <= max)
      e.violated = false;
    else
      e.evidence = false;
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<ViolationEvent> evaluate_rule(const ViolationRule& rule, std::span<const WorkerObservation> workers,
                                          std::span<const ObjectObservation> objects, int frame,
                                          double nominal_height) {
  switch (rule.predicate) {
    case Predicate::attachment: return evaluate_attachment(rule, workers, objects, frame, nominal_height);
    case Predicate::multi_worker_requirement:
      return evaluate_multi_worker(rule, workers, objects, frame, nominal_height);
    case Predicate::exclusive_occupancy:
      return evaluate_exclusive_occupancy(rule, workers, objects, frame, nominal_height);
  }
  return {};
}

std::vector<ViolationEvent> evaluate_rule(const ViolationRule& rule, std::span<const Track> worker_tracks,
                                          std::span<const Track> object_tracks, int frame, double nominal_height) {
  const auto ws = worker_observations(worker_tracks, frame);
  const auto os = object_observations(object_tracks, frame);
  return evaluate_rule(rule, std::span<const WorkerObservation>(ws), std::span<const ObjectObservation>(os), frame,
                       nominal_height);
}

std::vector<ViolationEvent> latch_violations(const std::vector<ViolationEvent>& prev,
                                             const std::vector<ViolationEvent>& curr, int frame) {
  std::map<std::pair<std::string, int>, bool> was_violated;
  for (const auto& e : prev) was_violated[{e.rule_id, e.key_entity()}] = e.violated;
  std::vector<ViolationEvent> out = curr;
  for (auto& e : out) {
    e.frame = frame;
    if (e.evidence) {
      e.latched = false;
      continue;
    }
    const auto it = was_violated.find({e.rule_id, e.key_entity()});
    e.violated = it != was_violated.end() && it->second;
    e.latched = e.violated;
  }
  return out;
}

ComplianceEngine::ComplianceEngine(std::vector<ViolationRule> rules, double nominal_height)
    : rules_(std::move(rules)), nominal_height_(nominal_height) {
  for (const auto& r : rules_) validate(r);
}

std::vector<ViolationEvent> ComplianceEngine::step(std::span<const Track> worker_tracks,
                                                   std::span<const Track> object_tracks, int frame) {
  const auto ws = worker_observations(worker_tracks, frame);
  const auto os = object_observations(object_tracks, frame);
  std::vector<ViolationEvent> events;
  for (const auto& rule : rules_) {
    auto evs = evaluate_rule(rule, std::span<const WorkerObservation>(ws), std::span<const ObjectObservation>(os),
                             frame, nominal_height_);
    events.insert(events.end(), std::make_move_iterator(evs.begin()), std::make_move_iterator(evs.end()));
  }
  previous_ = latch_violations(previous_, events, frame);
  return previous_;
}

}  // namespace siteguard
