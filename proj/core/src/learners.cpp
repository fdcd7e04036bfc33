#include "cmab/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cmab {

std::string_view to_string(RadiusMode r) { return r == RadiusMode::HighProbability ? "high-prob" : "hoeffding"; }

RadiusMode parse_radius_mode(std::string_view s) {
  if (s == "high-prob") return RadiusMode::HighProbability;
  if (s == "hoeffding") return RadiusMode::Hoeffding;
  throw ConfigurationError("unknown radius mode `" + std::string(s) + "`");
}

double confidence_radius(RadiusMode mode, int m, std::int64_t t, std::int64_t observations, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
  if (t < 1) throw ParameterError("round index must be at least 1");
  if (observations == 0) return kUnobservedRadius;
  const double n = static_cast<double>(observations);
  const double td = static_cast<double>(t);
  if (mode == RadiusMode::Hoeffding) return std::sqrt(3.0 * std::log(td) / (2.0 * n));
  return std::sqrt(std::log(4.0 * m * td * td * td / delta) / (2.0 * n));
}

LearnerState::LearnerState(int m, RadiusMode mode, double delta)
    : obs_count(static_cast<std::size_t>(m), 0),
      sum(static_cast<std::size_t>(m), 0.0),
      sum_sq(static_cast<std::size_t>(m), 0.0),
      counters(static_cast<std::size_t>(m), 0),
      mode(mode),
      delta(delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
}

double LearnerState::emp_mean(int i) const {
  const auto n = obs_count[static_cast<std::size_t>(i)];
  return n == 0 ? 0.0 : std::clamp(sum[static_cast<std::size_t>(i)] / static_cast<double>(n), 0.0, 1.0);
}

double LearnerState::emp_variance(int i) const {
  const auto n = obs_count[static_cast<std::size_t>(i)];
  if (n == 0) return 0.0;
  const double mean = emp_mean(i);
  return std::max(sum_sq[static_cast<std::size_t>(i)] / static_cast<double>(n) - mean * mean, 0.0);
}

double LearnerState::radius(int i) const {
  return confidence_radius(mode, m(), t + 1, obs_count[static_cast<std::size_t>(i)], delta);
}

MeanVector confidence_bounds(const LearnerState& state, Direction direction) {
  std::vector<double> b(static_cast<std::size_t>(state.m()));
  for (int i = 0; i < state.m(); ++i) {
    const double rho = state.radius(i);
    const double mean = state.emp_mean(i);
    b[static_cast<std::size_t>(i)] =
        direction == Direction::Maximize ? std::min(mean + rho, 1.0) : std::max(mean - rho, 0.0);
  }
  return MeanVector(std::move(b));
}

Learner::Learner(const Instance& instance, RadiusMode mode, double delta)
    : instance_(instance), state_(instance.m(), mode, delta) {}

void Learner::observe(const CorruptedFeedback& feedback) {
  if (!pending_) throw ProtocolError("feedback received before any super arm was selected");
  const auto& observable = pending_->observable;
  for (const Observation& o : feedback.observations()) {
    if (!std::binary_search(observable.begin(), observable.end(), o.arm))
      throw ProtocolError("feedback for base arm " + std::to_string(o.arm) + " which `" + pending_->label +
                          "` cannot trigger");
    if (!(o.value >= 0.0 && o.value <= 1.0)) throw ProtocolError("feedback value outside [0,1]");
  }
  for (int i : observable) ++state_.counters[static_cast<std::size_t>(i)];
  for (const Observation& o : feedback.observations()) {
    const auto i = static_cast<std::size_t>(o.arm);
    ++state_.obs_count[i];
    state_.sum[i] += o.value;
    state_.sum_sq[i] += o.value * o.value;
  }
  ++state_.t;
  pending_.reset();
}

Cucb::Cucb(const Instance& instance, Oracle oracle, RadiusMode mode, double delta)
    : Learner(instance, mode, delta), oracle_(std::move(oracle)) {}

SuperArm Cucb::select() {
  last_ = oracle_(confidence_bounds(state_, instance_.direction));
  pending_ = last_.chosen;
  return last_.chosen;
}

SuperArm cucb_step(Cucb& learner, const CorruptedFeedback* previous) {
  if (previous) learner.observe(*previous);
  return learner.select();
}

std::string_view to_string(CascadeIndex c) {
  switch (c) {
    case CascadeIndex::Ucb1: return "cascade-ucb1";
    case CascadeIndex::KlUcb: return "cascade-klucb";
    case CascadeIndex::UcbV: return "cascade-ucbv";
  }
  return "?";
}

namespace {

double bernoulli_kl(double p, double q) {
  constexpr double eps = 1e-15;
  p = std::clamp(p, eps, 1.0 - eps);
  q = std::clamp(q, eps, 1.0 - eps);
  return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

}  // namespace

double kl_ucb_index(double mean, std::int64_t n, double budget) {
  if (n == 0) return 1.0;
  double lo = mean, hi = 1.0;
  const double limit = budget / static_cast<double>(n);
  if (bernoulli_kl(mean, hi) <= limit) return 1.0;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (bernoulli_kl(mean, mid) <= limit) lo = mid;
    else hi = mid;
  }
  return lo;
}

double cascade_index(CascadeIndex kind, const LearnerState& state, int item, std::int64_t t) {
  const auto n = state.obs_count[static_cast<std::size_t>(item)];
  if (n == 0) return 1.0;
  const double mean = state.emp_mean(item);
  const double lt = std::log(static_cast<double>(t));
  const double nd = static_cast<double>(n);
  double index = 1.0;
  switch (kind) {
    case CascadeIndex::Ucb1:
      index = mean + std::sqrt(1.5 * lt / nd);
      break;
    case CascadeIndex::KlUcb: {
      const double lnln = t >= 3 ? std::log(lt) : 0.0;
      index = kl_ucb_index(mean, n, lt + 3.0 * std::max(lnln, 0.0));
      break;
    }
    case CascadeIndex::UcbV:
      index = mean + std::sqrt(2.0 * state.emp_variance(item) * lt / nd) + 3.0 * lt / nd;
      break;
  }
  return std::min(index, 1.0);
}

CascadeLearner::CascadeLearner(const Instance& instance, CascadeIndex kind)
    : Learner(instance, RadiusMode::Hoeffding, kDefaultDelta), kind_(kind) {
  if (instance.family != Family::Cascade) throw ConfigurationError("cascade learners need a cascade instance");
  const int k = instance.cascade().k;
  if (k < 1 || k >= instance.m()) throw ParameterError("list length K must satisfy 1 <= K < m");
}

std::vector<double> CascadeLearner::indices() const {
  std::vector<double> idx(static_cast<std::size_t>(state_.m()));
  for (int i = 0; i < state_.m(); ++i) idx[static_cast<std::size_t>(i)] = cascade_index(kind_, state_, i, state_.t + 1);
  return idx;
}

SuperArm CascadeLearner::select() {
  const auto idx = indices();
  auto r = topk_cascade_oracle(instance_, instance_.cascade().k, MeanVector(idx));
  pending_ = r.chosen;
  return r.chosen;
}

namespace {

SuperArm cascade_step(CascadeLearner& learner, CascadeIndex expected, const CorruptedFeedback* previous) {
  if (learner.kind() != expected)
    throw ConfigurationError("learner runs " + std::string(to_string(learner.kind())) + ", not " +
                             std::string(to_string(expected)));
  if (previous) learner.observe(*previous);
  return learner.select();
}

}  // namespace

SuperArm cascade_ucb1_step(CascadeLearner& learner, const CorruptedFeedback* previous) {
  return cascade_step(learner, CascadeIndex::Ucb1, previous);
}

SuperArm cascade_klucb_step(CascadeLearner& learner, const CorruptedFeedback* previous) {
  return cascade_step(learner, CascadeIndex::KlUcb, previous);
}

SuperArm cascade_ucbv_step(CascadeLearner& learner, const CorruptedFeedback* previous) {
  return cascade_step(learner, CascadeIndex::UcbV, previous);
}

std::string_view to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::Cucb: return "cucb";
    case LearnerKind::CascadeUcb1: return "cascade-ucb1";
    case LearnerKind::CascadeKlUcb: return "cascade-klucb";
    case LearnerKind::CascadeUcbV: return "cascade-ucbv";
  }
  return "?";
}

LearnerKind parse_learner(std::string_view s) {
  for (LearnerKind k : {LearnerKind::Cucb, LearnerKind::CascadeUcb1, LearnerKind::CascadeKlUcb, LearnerKind::CascadeUcbV})
    if (to_string(k) == s) return k;
  throw ConfigurationError("unknown learner `" + std::string(s) + "`");
}

std::unique_ptr<Learner> make_learner(const Instance& instance, LearnerKind kind, Oracle oracle, RadiusMode mode,
                                      double delta) {
  switch (kind) {
    case LearnerKind::Cucb: return std::make_unique<Cucb>(instance, std::move(oracle), mode, delta);
    case LearnerKind::CascadeUcb1: return std::make_unique<CascadeLearner>(instance, CascadeIndex::Ucb1);
    case LearnerKind::CascadeKlUcb: return std::make_unique<CascadeLearner>(instance, CascadeIndex::KlUcb);
    case LearnerKind::CascadeUcbV: return std::make_unique<CascadeLearner>(instance, CascadeIndex::UcbV);
  }
  throw ConfigurationError("unknown learner");
}

}  // namespace cmab
