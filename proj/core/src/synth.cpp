// Copyright 2026 The Pareido Authors
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

#include "pareido/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>

#include "pareido/error.hpp"
#include "pareido/fingerprint.hpp"
#include "pareido/text.hpp"

namespace pareido {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t SplitMix64::index(std::size_t n) {
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

std::uint64_t image_seed(std::uint64_t seed, std::string_view image_id) {
  SplitMix64 mix(Fnv1a{}.update(seed).update(image_id).digest());
  return mix.next();
}

std::vector<std::size_t> stratified_counts(std::span<const double> mix, std::size_t n) {
  if (mix.empty()) throw_validation("empty mix");
  double sum = 0.0;
  for (double p : mix) {
    if (!std::isfinite(p) || p < 0.0) throw_validation("mix entries must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw_validation("mix must sum to 1");

  std::vector<std::size_t> counts(mix.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    const double exact = mix[i] / sum * static_cast<double>(n);
    // Guard against 0.1 * 50 landing at 4.999...
    const double fl = std::floor(exact + 1e-9);
    counts[i] = static_cast<std::size_t>(fl);
    assigned += counts[i];
    remainders.emplace_back(exact - fl, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[remainders[k % remainders.size()].second];
  return counts;
}

std::vector<std::pair<std::string, double>> SynthCorpusSpec::default_emotion_mix() {
  const std::vector<std::string> labels = {"angry", "disgusted", "happy", "other",
                                           "sad",   "scared",    "surprised", "unknown"};
  std::vector<std::pair<std::string, double>> mix;
  for (const auto& l : labels) mix.emplace_back(l, 1.0 / static_cast<double>(labels.size()));
  return mix;
}

namespace {

template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
}

template <typename T, typename Mix>
std::vector<T> allocate(const Mix& mix, const std::vector<T>& values, std::size_t n, SplitMix64& rng) {
  const auto counts = stratified_counts(mix, n);
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i = 0; i < counts.size(); ++i) out.insert(out.end(), counts[i], values[i]);
  shuffle(out, rng);
  return out;
}

CoarseClass sample_class(std::span<const double> mix, SplitMix64& rng) {
  double u = rng.uniform();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (u < mix[c]) return kAllClasses[c];
    u -= mix[c];
  }
  return CoarseClass::Other;
}

constexpr std::int64_t kImageSize = 600;
// Keeps behavior draws independent of corpus layout draws under a shared seed.
constexpr std::uint64_t kBehaviorSalt = 0x6a09e667f3bcc909ULL;
constexpr double kCellSize = 200.0;

}  // namespace

Corpus generate_corpus(const SynthCorpusSpec& spec) {
  if (spec.n_images == 0) throw_validation("n_images must be positive");
  SplitMix64 rng(spec.seed);

  const std::vector<CoarseClass> classes(kAllClasses.begin(), kAllClasses.end());
  const std::vector<Difficulty> diffs(kAllDifficulties.begin(), kAllDifficulties.end());
  std::vector<std::string> emotions;
  std::vector<double> emotion_weights;
  for (const auto& [label, w] : spec.emotion_mix) {
    emotions.push_back(canonicalize_emotion(label));
    emotion_weights.push_back(w);
  }

  const auto image_classes = allocate(spec.class_mix, classes, spec.n_images, rng);
  const auto image_diffs = allocate(spec.difficulty_mix, diffs, spec.n_images, rng);
  const auto image_emotions = allocate(emotion_weights, emotions, spec.n_images, rng);

  Corpus corpus;
  corpus.reserve(spec.n_images);
  for (std::size_t i = 0; i < spec.n_images; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "synth-%06zu", i);
    ImageRecord img;
    img.image_id = id;
    img.width = kImageSize;
    img.height = kImageSize;
    img.difficulty = image_diffs[i];
    img.emotion = image_emotions[i];
    img.image_label = image_classes[i];

    SplitMix64 local(image_seed(spec.seed, img.image_id));
    const std::size_t k = 1 + local.index(3);
    std::vector<std::size_t> cells(9);
    std::iota(cells.begin(), cells.end(), std::size_t{0});
    shuffle(cells, local);
    const std::size_t primary = local.index(k);
    for (std::size_t r = 0; r < k; ++r) {
      const double cx0 = static_cast<double>(cells[r] % 3) * kCellSize;
      const double cy0 = static_cast<double>(cells[r] / 3) * kCellSize;
      const double w = std::floor(60.0 + 80.0 * local.uniform());
      const double h = std::floor(60.0 + 80.0 * local.uniform());
      const double x = cx0 + std::floor((kCellSize - w) * local.uniform());
      const double y = cy0 + std::floor((kCellSize - h) * local.uniform());
      RegionAnnotation reg;
      reg.region_id = "r" + std::to_string(r + 1);
      reg.box = {x, y, x + w, y + h};
      reg.is_primary = r == primary;
      reg.label = reg.is_primary ? img.image_label : sample_class(spec.class_mix, local);
      img.regions.push_back(std::move(reg));
    }
    corpus.push_back(std::move(img));
  }
  return corpus;
}

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::Overactivation: return "overactivation";
    case Mechanism::Abstention: return "abstention";
    case Mechanism::Suppression: return "suppression";
  }
  return "overactivation";
}

std::optional<Mechanism> parse_mechanism(std::string_view text) {
  const std::string t = to_lower(trim(text));
  for (Mechanism m : {Mechanism::Overactivation, Mechanism::Abstention, Mechanism::Suppression}) {
    if (t == to_string(m)) return m;
  }
  return std::nullopt;
}

BehaviorConfig BehaviorConfig::preset(Mechanism m) {
  BehaviorConfig c;
  c.mechanism = m;
  c.model_id = "synth-" + std::string(to_string(m));
  switch (m) {
    case Mechanism::Suppression:
      c.fire_rate = 0.05;
      c.human_pull = 0.9;
      c.entropy_level = 0.05;
      break;
    case Mechanism::Abstention:
      c.fire_rate = 1.0;
      c.human_pull = 0.2;
      c.entropy_level = 0.95;
      break;
    case Mechanism::Overactivation:
      c.fire_rate = 1.0;
      c.human_pull = 0.9;
      c.entropy_level = 0.2;
      break;
  }
  return c;
}

BehaviorConfig BehaviorConfig::from_config(const KvConfig& cfg) {
  BehaviorConfig c;
  if (auto p = cfg.get("preset")) {
    auto m = parse_mechanism(*p);
    if (!m) throw_validation(cfg.source() + ": unknown preset '" + *p + "'");
    c = preset(*m);
  }
  if (auto m = cfg.get("mechanism")) {
    auto parsed = parse_mechanism(*m);
    if (!parsed) throw_validation(cfg.source() + ": unknown mechanism '" + *m + "'");
    c.mechanism = *parsed;
    if (!cfg.contains("preset")) c.model_id = "synth-" + std::string(to_string(*parsed));
  }
  if (auto v = cfg.get_double("human_pull")) c.human_pull = *v;
  if (auto v = cfg.get_double("entropy_level")) c.entropy_level = *v;
  if (auto v = cfg.get_double("fire_rate")) c.fire_rate = *v;
  if (auto v = cfg.get("localization_noise")) {
    if (to_lower(*v) == "localization-failure") {
      c.localization_noise = kLocalizationFailureJitter;
    } else {
      c.localization_noise = cfg.get_double("localization_noise").value();
    }
  }
  if (auto v = cfg.get_double("seed")) {
    if (*v < 0 || *v != std::floor(*v)) throw_validation(cfg.source() + ": seed must be a non-negative integer");
    c.seed = static_cast<std::uint64_t>(*v);
  }
  if (auto v = cfg.get("model_id")) c.model_id = *v;
  if (auto v = cfg.get("mode")) {
    auto mode = parse_prediction_mode(*v);
    if (!mode) throw_validation(cfg.source() + ": unknown mode '" + *v + "'");
    c.mode = *mode;
  }
  constexpr std::string_view kBiasPrefix = "emotion_bias.";
  for (const auto& [key, _] : cfg.entries()) {
    if (key.rfind(kBiasPrefix, 0) == 0) {
      c.emotion_bias[canonicalize_emotion(key.substr(kBiasPrefix.size()))] = *cfg.get_double(key);
    }
  }
  if (c.model_id.empty()) c.model_id = "synth-" + std::string(to_string(c.mechanism));
  if (auto problem = c.validate(); !problem.empty()) throw_validation(cfg.source() + ": " + problem);
  return c;
}

std::string BehaviorConfig::validate() const {
  auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!in_unit(human_pull)) return "human_pull must be in [0, 1]";
  if (!in_unit(entropy_level)) return "entropy_level must be in [0, 1]";
  if (!in_unit(fire_rate)) return "fire_rate must be in [0, 1]";
  if (!std::isfinite(localization_noise) || localization_noise < 0.0) {
    return "localization_noise must be >= 0";
  }
  for (const auto& [label, delta] : emotion_bias) {
    if (!std::isfinite(delta)) return "emotion_bias for '" + label + "' is not finite";
  }
  if (model_id.empty()) return "model_id must be non-empty";
  return {};
}

double mixture_entropy(double w) {
  const double k = static_cast<double>(kNumClasses);
  const double top = 1.0 - w + w / k;
  const double rest = w / k;
  double h = 0.0;
  if (top > 0.0) h -= top * std::log(top);
  if (rest > 0.0) h -= (k - 1.0) * rest * std::log(rest);
  return h;
}

double mixing_weight_for_entropy(double target_entropy) {
  const double hmax = std::log(static_cast<double>(kNumClasses));
  if (!(target_entropy >= 0.0) || target_entropy > hmax + 1e-12) {
    throw_validation("target entropy outside [0, ln 5]");
  }
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (mixture_entropy(mid) < target_entropy) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double w = 0.5 * (lo + hi);
  if (target_entropy <= 0.0) return 0.0;
  if (target_entropy >= hmax) return 1.0;
  return w;
}

namespace {

struct RegionPlan {
  double w;            // mixing weight toward uniform
  double human_prob;   // probability the one-hot target is Human
};

// Chooses the target-Human probability so that E[p_Human] = q:
//   t (1 - w) + w / 5 = q.
RegionPlan plan_for(double q, double w, std::string_view context) {
  const double k = static_cast<double>(kNumClasses);
  constexpr double kEps = 1e-9;
  if (w >= 1.0 - 1e-12) {
    if (std::abs(q - 1.0 / k) > kEps) {
      throw_validation(std::string(context) + ": uniform predictions fix P(Human) at 0.2, requested " +
                       format_double(q));
    }
    return {1.0, 0.0};
  }
  const double lo = w / k;
  const double hi = 1.0 - w + w / k;
  if (q < lo - kEps || q > hi + kEps) {
    throw_validation(std::string(context) + ": P(Human)=" + format_double(q) +
                     " is unreachable at the requested entropy; feasible range is [" + format_double(lo) +
                     ", " + format_double(hi) + "]");
  }
  return {w, std::clamp((q - lo) / (1.0 - w), 0.0, 1.0)};
}

// Shift of at least `mag` along one axis that keeps a non-empty interval
// inside [0, limit] after clamping. Prefers `sign`.
std::optional<double> escape_shift(double lo, double hi, double mag, double sign, double limit) {
  for (double s : {sign, -sign}) {
    const double d = s * mag;
    if (std::min(hi + d, limit) > std::max(lo + d, 0.0)) return d;
  }
  return std::nullopt;
}

// Large jitter (noise >= 1) displaces the box by noise * size along each
// axis, so it shares no area with the region and its center falls outside.
// Returns nullopt when the region is too large to be escaped on either axis.
std::optional<Box> jitter_box(const Box& gt, double noise, double width, double height, SplitMix64& rng) {
  const double bw = gt.width();
  const double bh = gt.height();
  double dx;
  double dy;
  if (noise >= 1.0) {
    const double sx = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double sy = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const auto ex = escape_shift(gt.x_min, gt.x_max, noise * bw, sx, width);
    const auto ey = escape_shift(gt.y_min, gt.y_max, noise * bh, sy, height);
    if (!ex && !ey) return std::nullopt;
    dx = ex.value_or(0.0);
    dy = ey.value_or(0.0);
  } else {
    dx = (2.0 * rng.uniform() - 1.0) * noise * bw;
    dy = (2.0 * rng.uniform() - 1.0) * noise * bh;
  }
  Box b{std::clamp(gt.x_min + dx, 0.0, width), std::clamp(gt.y_min + dy, 0.0, height),
        std::clamp(gt.x_max + dx, 0.0, width), std::clamp(gt.y_max + dy, 0.0, height)};
  if (!b.valid()) return gt;
  return b;
}

}  // namespace

std::vector<PredictionRecord> generate_behavior(const Corpus& corpus, const BehaviorConfig& config) {
  if (auto problem = config.validate(); !problem.empty()) throw_validation(problem);
  const double hmax = std::log(static_cast<double>(kNumClasses));
  const double w = mixing_weight_for_entropy(config.entropy_level * hmax);

  // Validate every emotion up front so infeasible configs fail before output.
  std::map<std::string, RegionPlan> plans;
  for (const auto& img : corpus) {
    if (plans.count(img.emotion)) continue;
    double q = config.human_pull;
    if (auto it = config.emotion_bias.find(img.emotion); it != config.emotion_bias.end()) q += it->second;
    q = std::clamp(q, 0.0, 1.0);
    plans.emplace(img.emotion, plan_for(q, w, "emotion '" + img.emotion + "'"));
  }

  const double k = static_cast<double>(kNumClasses);
  std::vector<PredictionRecord> out;
  out.reserve(corpus.size());
  for (const auto& img : corpus) {
    const RegionPlan& plan = plans.at(img.emotion);
    SplitMix64 rng(image_seed(config.seed ^ kBehaviorSalt, img.image_id));
    PredictionRecord rec;
    rec.image_id = img.image_id;
    rec.model_id = config.model_id;
    rec.mode = config.mode;
    for (const auto& region : img.regions) {
      const double fire_u = rng.uniform();
      const double target_u = rng.uniform();
      const std::size_t alt = rng.index(kNumClasses - 1);
      if (fire_u >= config.fire_rate) continue;

      const CoarseClass target =
          target_u < plan.human_prob ? CoarseClass::Human : kAllClasses[1 + alt];
      ClassDistribution::Values v;
      v.fill(plan.w / k);
      v[index_of(target)] = 1.0 - plan.w + plan.w / k;
      const ClassDistribution dist(v);

      if (config.mode == PredictionMode::BoxLevel) {
        rec.region_preds.push_back({region.region_id, dist});
      } else {
        const auto box = jitter_box(region.box, config.localization_noise, static_cast<double>(img.width),
                                    static_cast<double>(img.height), rng);
        if (box) rec.boxes.push_back({*box, dist, std::nullopt});
      }
    }
    if (rec.mode == PredictionMode::BoxLevel && rec.region_preds.empty()) continue;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace pareido
