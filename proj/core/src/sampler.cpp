// Copyright (c) 2026 The MTGAN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mtgan/sampler.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <tuple>

#include <spdlog/spdlog.h>

#include "mtgan/error.hpp"

namespace mtgan {

std::uint64_t EpochPairCount(const SamplingPlan& p) {
  if (p.speakers < 1 || p.anchors < 1 || p.positives < 1 ||
      p.other_classes < 1 || p.negatives < 1) {
    throw ConfigError("sampling counts n, A, P, K, J must all be >= 1");
  }
  return static_cast<std::uint64_t>(p.speakers) * p.anchors * p.positives *
         p.other_classes * p.negatives;
}

std::vector<MinedNegative> SelectSemiHard(std::span<const double> d_an,
                                          double d_ap, double margin,
                                          int count) {
  if (d_an.empty()) throw ConfigError("no negative candidates to mine from");
  // (tier, signed distance key, index); lexicographic order is the ranking.
  std::vector<std::tuple<int, double, std::size_t>> ranked;
  ranked.reserve(d_an.size());
  for (std::size_t i = 0; i < d_an.size(); ++i) {
    const double d = d_an[i];
    if (d > d_ap && d < d_ap + margin) {
      ranked.emplace_back(0, d, i);
    } else if (d >= d_ap) {
      ranked.emplace_back(1, d, i);
    } else {
      ranked.emplace_back(2, -d, i);
    }
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<MinedNegative> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const auto& [tier, key, index] = ranked[k % ranked.size()];
    out.push_back({index, tier != 0});
  }
  return out;
}

namespace {

double CosineDistanceRows(const Tensor<float>& e, std::size_t a,
                          std::size_t b) {
  const auto x = e.sample(static_cast<int>(a));
  const auto y = e.sample(static_cast<int>(b));
  double dot = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    dot += static_cast<double>(x[j]) * y[j];
  }
  return 1.0 - dot;
}

std::mt19937_64 EpochRng(std::uint64_t seed, int epoch) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(epoch), std::uint64_t{0x5A3B}};
  return std::mt19937_64(seq);
}

// count draws from items: a shuffled pass, repeated (reshuffled) as needed.
template <typename V>
std::vector<V> Cycle(std::vector<V> items, int count, std::mt19937_64& rng) {
  std::vector<V> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    std::shuffle(items.begin(), items.end(), rng);
    for (const V& v : items) {
      if (static_cast<int>(out.size()) == count) break;
      out.push_back(v);
    }
  }
  return out;
}

std::size_t PickOther(const std::vector<std::size_t>& pool, std::size_t exclude,
                      std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 2);
  const auto pos = std::find(pool.begin(), pool.end(), exclude) - pool.begin();
  std::size_t r = pick(rng);
  if (static_cast<std::ptrdiff_t>(r) >= pos) ++r;
  return pool[r];
}

}  // namespace

MinedBatch MineBatch(const Tensor<float>& embeddings,
                     std::span<const int> labels, double margin) {
  const std::size_t n = embeddings.shape().n;
  if (labels.size() != n) {
    throw ShapeError("MineBatch: label count does not match batch");
  }
  MinedBatch out;
  std::vector<double> d_an;
  std::vector<std::size_t> cand;
  for (std::size_t a = 0; a < n; ++a) {
    cand.clear();
    d_an.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (labels[j] != labels[a]) {
        cand.push_back(j);
        d_an.push_back(CosineDistanceRows(embeddings, a, j));
      }
    }
    if (cand.empty()) continue;
    for (std::size_t p = 0; p < n; ++p) {
      if (p == a || labels[p] != labels[a]) continue;
      const double d_ap = CosineDistanceRows(embeddings, a, p);
      const auto pick = SelectSemiHard(d_an, d_ap, margin, 1).front();
      out.triples.push_back({a, p, cand[pick.candidate]});
      out.fallback.push_back(pick.fallback);
    }
  }
  return out;
}

TripletSampler::TripletSampler(SamplingPlan plan, const FeatureSet& features,
                               std::uint64_t seed, Margin margin)
    : plan_(plan),
      seed_(seed),
      margin_(margin),
      by_label_(features.IndicesByLabel()) {
  for (int label = 0; label < static_cast<int>(by_label_.size()); ++label) {
    if (by_label_[label].size() >= 2) {
      eligible_.push_back(label);
    } else {
      spdlog::warn("speaker {} has {} slice(s); skipped for triplet sampling",
                   features.speakers()[label], by_label_[label].size());
    }
  }
  if (eligible_.size() < 2) {
    throw ConfigError("triplet sampling needs at least 2 speakers with >= 2 "
                      "slices, found " + std::to_string(eligible_.size()));
  }
  if (plan_.speakers == 0) plan_.speakers = static_cast<int>(eligible_.size());
  EpochPairCount(plan_);
  if (plan_.speakers < 2) {
    throw ConfigError("sampling needs n >= 2 speakers per epoch");
  }
  if (plan_.speakers > static_cast<int>(eligible_.size())) {
    throw ConfigError("sampling plan asks for " +
                      std::to_string(plan_.speakers) + " speakers but only " +
                      std::to_string(eligible_.size()) + " are eligible");
  }
  if (plan_.mode == SamplingMode::kSemiHard && plan_.mining_batch < 2) {
    throw ConfigError("mining_batch must be at least 2");
  }
}

EpochTriples TripletSampler::SampleEpoch(int epoch, const EmbedFn& embed) const {
  const bool semi_hard = plan_.mode == SamplingMode::kSemiHard;
  if (semi_hard && !embed) {
    throw ConfigError("semi-hard sampling needs an embedding function");
  }
  auto rng = EpochRng(seed_, epoch);
  std::vector<int> chosen = eligible_;
  std::shuffle(chosen.begin(), chosen.end(), rng);
  chosen.resize(plan_.speakers);

  EpochTriples out;
  out.triples.reserve(PairCount());
  for (int s : chosen) {
    const auto& own = by_label_[s];
    std::vector<int> others;
    for (int c : chosen) {
      if (c != s) others.push_back(c);
    }
    const auto classes = Cycle(others, plan_.other_classes, rng);
    const auto anchors = Cycle(own, plan_.anchors, rng);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a : anchors) {
      for (int p = 0; p < plan_.positives; ++p) {
        pairs.emplace_back(a, PickOther(own, a, rng));
      }
    }

    if (!semi_hard) {
      for (const auto& [a, p] : pairs) {
        for (int c : classes) {
          const auto& pool = by_label_[c];
          std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
          for (int j = 0; j < plan_.negatives; ++j) {
            out.triples.push_back({a, p, pool[pick(rng)]});
          }
        }
      }
      continue;
    }

    // Mining pool: this speaker's anchors and positives plus a random draw
    // from each negative class, sized to fit the mining batch.
    std::vector<std::size_t> pool;
    for (const auto& [a, p] : pairs) {
      pool.push_back(a);
      pool.push_back(p);
    }
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    std::vector<int> distinct_classes = classes;
    std::sort(distinct_classes.begin(), distinct_classes.end());
    distinct_classes.erase(
        std::unique(distinct_classes.begin(), distinct_classes.end()),
        distinct_classes.end());
    const int room = std::max<int>(
        static_cast<int>(distinct_classes.size()),
        plan_.mining_batch - static_cast<int>(pool.size()));
    const int per_class = std::max(1, room / static_cast<int>(
                                                  distinct_classes.size()));
    std::map<int, std::vector<std::size_t>> candidates;
    for (int c : distinct_classes) {
      auto items = by_label_[c];
      std::shuffle(items.begin(), items.end(), rng);
      items.resize(std::min<std::size_t>(items.size(), per_class));
      std::sort(items.begin(), items.end());
      candidates[c] = items;
      pool.insert(pool.end(), items.begin(), items.end());
    }
    const Tensor<float> emb = embed(pool);
    if (emb.shape().n != static_cast<int>(pool.size())) {
      throw ShapeError("embedding function returned " +
                       std::to_string(emb.shape().n) + " rows for " +
                       std::to_string(pool.size()) + " slices");
    }
    std::map<std::size_t, std::size_t> row_of;
    for (std::size_t r = 0; r < pool.size(); ++r) row_of.emplace(pool[r], r);

    for (const auto& [a, p] : pairs) {
      const double d_ap = CosineDistanceRows(emb, row_of.at(a), row_of.at(p));
      for (int c : classes) {
        const auto& cand = candidates.at(c);
        std::vector<double> d_an(cand.size());
        for (std::size_t k = 0; k < cand.size(); ++k) {
          d_an[k] = CosineDistanceRows(emb, row_of.at(a), row_of.at(cand[k]));
        }
        for (const auto& pick :
             SelectSemiHard(d_an, d_ap, margin_.value(), plan_.negatives)) {
          out.triples.push_back({a, p, cand[pick.candidate]});
          if (pick.fallback) ++out.fallbacks;
        }
      }
    }
  }
  std::shuffle(out.triples.begin(), out.triples.end(), rng);
  return out;
}

std::vector<std::vector<Triplet>> SplitBatches(std::span<const Triplet> triples,
                                               std::size_t batch_size) {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  std::vector<std::vector<Triplet>> out;
  for (std::size_t i = 0; i < triples.size(); i += batch_size) {
    const std::size_t end = std::min(triples.size(), i + batch_size);
    out.emplace_back(triples.begin() + i, triples.begin() + end);
  }
  return out;
}

}  // namespace mtgan
