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

#include "pareido/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pareido/error.hpp"

namespace pareido {

namespace {

MetricValue make_rate(std::string_view name, std::size_t numerator, std::size_t denominator,
                      std::size_t excluded = 0) {
  MetricValue m;
  m.name = std::string(name);
  m.numerator = static_cast<double>(numerator);
  m.denominator = denominator;
  m.excluded = excluded;
  if (denominator > 0) m.value = m.numerator / static_cast<double>(denominator);
  return m;
}

MetricValue make_mean(std::string_view name, double sum, std::size_t count, std::size_t excluded) {
  MetricValue m;
  m.name = std::string(name);
  m.numerator = sum;
  m.denominator = count;
  m.excluded = excluded;
  if (count > 0) m.value = sum / static_cast<double>(count);
  return m;
}

// Image-level Human rate conditioned on the image label and a matched primary.
template <typename Condition>
MetricValue primary_human_rate(std::string_view name, std::span<const ImageEvaluation> images,
                               Condition condition) {
  std::size_t hits = 0;
  std::size_t total = 0;
  std::size_t excluded = 0;
  for (const auto& ev : images) {
    if (!condition(ev.image->image_label)) continue;
    const auto& pred = ev.region_predictions[ev.match.primary_index];
    if (!pred) {
      ++excluded;
      continue;
    }
    ++total;
    if (predicted_class(*pred) == CoarseClass::Human) ++hits;
  }
  return make_rate(name, hits, total, excluded);
}

}  // namespace

MetricValue detection_rate(std::span<const MatchResult> matches) {
  if (matches.empty()) throw_validation("detection_rate: empty corpus");
  const auto hits = std::count_if(matches.begin(), matches.end(),
                                  [](const MatchResult& m) { return m.any_prediction_on_primary; });
  return make_rate(metric::kDetectionRate, static_cast<std::size_t>(hits), matches.size());
}

MetricValue ppdr(std::span<const MatchResult> matches) {
  if (matches.empty()) throw_validation("ppdr: empty corpus");
  const auto hits = std::count_if(matches.begin(), matches.end(),
                                  [](const MatchResult& m) { return m.primary_matched(); });
  return make_rate(metric::kPpdr, static_cast<std::size_t>(hits), matches.size());
}

ClassDistribution aggregate_image_distribution(std::span<const ClassDistribution> matched) {
  if (matched.empty()) throw_validation("cannot aggregate an empty set of distributions");
  ClassDistribution::Values mean{};
  for (const auto& d : matched) {
    for (std::size_t c = 0; c < kNumClasses; ++c) mean[c] += d[c];
  }
  double total = 0.0;
  for (double& v : mean) {
    v /= static_cast<double>(matched.size());
    total += v;
  }
  for (double& v : mean) v /= total;
  return ClassDistribution(mean);
}

double entropy(const ClassDistribution& p) {
  double h = 0.0;
  for (double v : p.values()) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return std::clamp(h, 0.0, std::log(static_cast<double>(kNumClasses)));
}

std::vector<ImageDistribution> image_distributions(std::span<const ImageEvaluation> images) {
  std::vector<ImageDistribution> out;
  std::vector<ClassDistribution> matched;
  for (const auto& ev : images) {
    matched.clear();
    for (const auto& p : ev.region_predictions) {
      if (p) matched.push_back(*p);
    }
    if (matched.empty()) continue;
    out.push_back({ev.image->image_id, aggregate_image_distribution(matched), matched.size()});
  }
  return out;
}

MetricValue rai(std::span<const ImageDistribution> image_dists) {
  // Sum in image_id order so the value does not depend on input order.
  std::vector<std::size_t> order(image_dists.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return image_dists[a].image_id < image_dists[b].image_id;
  });
  double sum = 0.0;
  for (std::size_t i : order) sum += entropy(image_dists[i].p);
  return make_mean(metric::kRai, sum, image_dists.size(), 0);
}

MetricValue rai(std::span<const ImageEvaluation> images) {
  const auto dists = image_distributions(images);
  MetricValue m = rai(std::span<const ImageDistribution>(dists));
  m.excluded = images.size() - dists.size();
  return m;
}

CoarseClass predicted_class(const ClassDistribution& p) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (p[c] >= p[best]) best = c;
  }
  return kAllClasses[best];
}

MetricValue fbs(std::span<const ImageEvaluation> images) {
  std::size_t hits = 0;
  std::size_t total = 0;
  std::size_t excluded = 0;
  for (const auto& ev : images) {
    for (std::size_t r = 0; r < ev.image->regions.size(); ++r) {
      if (ev.image->regions[r].label == CoarseClass::Human) continue;
      const auto& pred = ev.region_predictions[r];
      if (!pred) {
        ++excluded;
        continue;
      }
      ++total;
      if (predicted_class(*pred) == CoarseClass::Human) ++hits;
    }
  }
  return make_rate(metric::kFbs, hits, total, excluded);
}

MetricValue nonhuman_to_human_rate(std::span<const ImageEvaluation> images) {
  return primary_human_rate(metric::kNonhumanToHuman, images,
                            [](CoarseClass y) { return y != CoarseClass::Human; });
}

MetricValue alien_to_human_rate(std::span<const ImageEvaluation> images) {
  return primary_human_rate(metric::kAlienToHuman, images,
                            [](CoarseClass y) { return y == CoarseClass::Alien; });
}

MetricValue response_rate(std::span<const GtBoxResponse> responses) {
  if (responses.empty()) throw_validation("response_rate: no GT-box responses");
  const auto hits = std::count_if(responses.begin(), responses.end(),
                                  [](const GtBoxResponse& r) { return r.responded; });
  return make_rate(metric::kResponseRate, static_cast<std::size_t>(hits), responses.size());
}

MetricValue mean_human_score(std::span<const GtBoxResponse> responses) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : responses) {
    if (!r.responded) continue;
    if (!r.human_score) throw_validation("responding box without human_score");
    sum += *r.human_score;
    ++count;
  }
  return make_mean(metric::kMeanHumanScore, sum, count, responses.size() - count);
}

std::vector<MetricValue> core_metrics(std::span<const ImageEvaluation> images) {
  std::vector<MetricValue> out;
  out.reserve(6);
  if (images.empty()) {
    out.push_back(make_rate(metric::kDetectionRate, 0, 0));
    out.push_back(make_rate(metric::kPpdr, 0, 0));
  } else {
    std::vector<MatchResult> matches;
    matches.reserve(images.size());
    for (const auto& ev : images) matches.push_back(ev.match);
    out.push_back(detection_rate(matches));
    out.push_back(ppdr(matches));
  }
  out.push_back(rai(images));
  out.push_back(fbs(images));
  out.push_back(nonhuman_to_human_rate(images));
  out.push_back(alien_to_human_rate(images));
  return out;
}

std::vector<MetricValue> response_metrics(std::span<const GtBoxResponse> responses) {
  std::vector<MetricValue> out;
  if (responses.empty()) {
    out.push_back(make_rate(metric::kResponseRate, 0, 0));
  } else {
    out.push_back(response_rate(responses));
  }
  out.push_back(mean_human_score(responses));
  return out;
}

}  // namespace pareido
