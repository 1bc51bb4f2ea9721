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

#include "mtgan/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "mtgan/error.hpp"

namespace mtgan {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ToDouble(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
  }
  return out;
}

long long ToInt(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("config key '" + key + "': '" + v +
                      "' is not an integer");
  }
  return out;
}

unsigned long long ToUnsigned(const std::string& key, const std::string& v) {
  unsigned long long out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("config key '" + key + "': '" + v +
                      "' is not a non-negative integer");
  }
  return out;
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<int> ToIntList(const std::string& key, const std::string& v) {
  std::vector<int> out;
  if (Trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(static_cast<int>(ToInt(key, Trim(item))));
  }
  return out;
}

std::string FromIntList(const std::vector<int>& v) {
  return fmt::format("{}", fmt::join(v, ","));
}

struct Field {
  std::string key;
  std::function<std::string(const TrainConfig&)> get;
  std::function<void(TrainConfig&, const std::string&)> set;
};

template <typename M>
Field NumberField(std::string key, M TrainConfig::*member) {
  return {key,
          [member](const TrainConfig& c) { return fmt::format("{}", c.*member); },
          [member, key](TrainConfig& c, const std::string& v) {
            if constexpr (std::is_floating_point_v<M>) {
              c.*member = ToDouble(key, v);
            } else if constexpr (std::is_unsigned_v<M>) {
              c.*member = static_cast<M>(ToUnsigned(key, v));
            } else {
              c.*member = static_cast<M>(ToInt(key, v));
            }
          }};
}

Field BoolField(std::string key, bool TrainConfig::*member) {
  return {key,
          [member](const TrainConfig& c) {
            return std::string(c.*member ? "true" : "false");
          },
          [member, key](TrainConfig& c, const std::string& v) {
            c.*member = ToBool(key, v);
          }};
}

// Fields of nested structs, addressed by accessor.
template <typename Get>
Field NestedNumber(std::string key, Get access) {
  return {key,
          [access](const TrainConfig& c) {
            return fmt::format("{}", access(const_cast<TrainConfig&>(c)));
          },
          [access, key](TrainConfig& c, const std::string& v) {
            auto& ref = access(c);
            using M = std::remove_reference_t<decltype(ref)>;
            if constexpr (std::is_floating_point_v<M>) {
              ref = ToDouble(key, v);
            } else {
              ref = static_cast<M>(ToInt(key, v));
            }
          }};
}

template <typename Get>
Field NestedList(std::string key, Get access) {
  return {key,
          [access](const TrainConfig& c) {
            return FromIntList(access(const_cast<TrainConfig&>(c)));
          },
          [access, key](TrainConfig& c, const std::string& v) {
            access(c) = ToIntList(key, v);
          }};
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(NestedNumber("frames", [](TrainConfig& c) -> int& { return c.net.frames; }));
    f.push_back(NestedNumber("mels", [](TrainConfig& c) -> int& { return c.net.mels; }));
    f.push_back(NestedNumber("embed_dim", [](TrainConfig& c) -> int& { return c.net.embed_dim; }));
    f.push_back(NestedNumber("noise_dim", [](TrainConfig& c) -> int& { return c.net.noise_dim; }));
    f.push_back(NestedNumber("kernel", [](TrainConfig& c) -> int& { return c.net.kernel; }));
    f.push_back(NestedNumber("leaky_slope", [](TrainConfig& c) -> double& { return c.net.leaky_slope; }));
    f.push_back(NestedList("encoder_channels", [](TrainConfig& c) -> std::vector<int>& { return c.net.encoder_channels; }));
    f.push_back(NestedList("generator_channels", [](TrainConfig& c) -> std::vector<int>& { return c.net.generator_channels; }));
    f.push_back(NestedList("critic_channels", [](TrainConfig& c) -> std::vector<int>& { return c.net.critic_channels; }));
    f.push_back(NestedList("classifier_channels", [](TrainConfig& c) -> std::vector<int>& { return c.net.classifier_channels; }));
    f.push_back(NestedNumber("w_triplet", [](TrainConfig& c) -> double& { return c.weights.triplet; }));
    f.push_back(NestedNumber("w_softmax", [](TrainConfig& c) -> double& { return c.weights.softmax; }));
    f.push_back(NestedNumber("w_generator", [](TrainConfig& c) -> double& { return c.weights.generator; }));
    f.push_back(NestedNumber("w_discriminator", [](TrainConfig& c) -> double& { return c.weights.discriminator; }));
    f.push_back(NumberField("margin", &TrainConfig::margin));
    f.push_back({"triplet_reduction",
                 [](const TrainConfig& c) {
                   return std::string(c.triplet_reduction == Reduction::kSum ? "sum" : "mean");
                 },
                 [](TrainConfig& c, const std::string& v) {
                   if (v == "sum") {
                     c.triplet_reduction = Reduction::kSum;
                   } else if (v == "mean") {
                     c.triplet_reduction = Reduction::kMean;
                   } else {
                     throw ConfigError("config key 'triplet_reduction': expected sum or mean, got '" + v + "'");
                   }
                 }});
    f.push_back({"sampling",
                 [](const TrainConfig& c) {
                   return std::string(c.plan.mode == SamplingMode::kRandom ? "random" : "semi_hard");
                 },
                 [](TrainConfig& c, const std::string& v) {
                   if (v == "random") {
                     c.plan.mode = SamplingMode::kRandom;
                   } else if (v == "semi_hard") {
                     c.plan.mode = SamplingMode::kSemiHard;
                   } else {
                     throw ConfigError("config key 'sampling': expected random or semi_hard, got '" + v + "'");
                   }
                 }});
    f.push_back(NestedNumber("speakers_per_epoch", [](TrainConfig& c) -> int& { return c.plan.speakers; }));
    f.push_back(NestedNumber("anchors", [](TrainConfig& c) -> int& { return c.plan.anchors; }));
    f.push_back(NestedNumber("positives", [](TrainConfig& c) -> int& { return c.plan.positives; }));
    f.push_back(NestedNumber("other_classes", [](TrainConfig& c) -> int& { return c.plan.other_classes; }));
    f.push_back(NestedNumber("negatives", [](TrainConfig& c) -> int& { return c.plan.negatives; }));
    f.push_back(NestedNumber("mining_batch", [](TrainConfig& c) -> int& { return c.plan.mining_batch; }));
    f.push_back(NumberField("batch_triplets", &TrainConfig::batch_triplets));
    f.push_back(NumberField("epochs", &TrainConfig::epochs));
    f.push_back(NumberField("seed", &TrainConfig::seed));
    f.push_back(NumberField("lr_encoder", &TrainConfig::lr_encoder));
    f.push_back(NumberField("lr_classifier", &TrainConfig::lr_classifier));
    f.push_back(NumberField("lr_generator", &TrainConfig::lr_generator));
    f.push_back(NumberField("lr_critic", &TrainConfig::lr_critic));
    f.push_back(NumberField("beta1", &TrainConfig::beta1));
    f.push_back(NumberField("beta2", &TrainConfig::beta2));
    f.push_back(NumberField("adv_beta1", &TrainConfig::adv_beta1));
    f.push_back(NumberField("adv_beta2", &TrainConfig::adv_beta2));
    f.push_back(NumberField("adam_eps", &TrainConfig::adam_eps));
    f.push_back(NumberField("g_steps_per_d_step", &TrainConfig::g_steps_per_d_step));
    f.push_back({"gan_objective",
                 [](const TrainConfig& c) {
                   return std::string(c.gan_objective == GanObjective::kWassersteinGp ? "wgan_gp" : "log_loss");
                 },
                 [](TrainConfig& c, const std::string& v) {
                   if (v == "wgan_gp") {
                     c.gan_objective = GanObjective::kWassersteinGp;
                   } else if (v == "log_loss") {
                     c.gan_objective = GanObjective::kLogLoss;
                   } else {
                     throw ConfigError("config key 'gan_objective': expected wgan_gp or log_loss, got '" + v + "'");
                   }
                 }});
    f.push_back(NumberField("gp_lambda", &TrainConfig::gp_lambda));
    f.push_back(BoolField("use_gan", &TrainConfig::use_gan));
    f.push_back(BoolField("use_softmax", &TrainConfig::use_softmax));
    f.push_back(BoolField("use_triplet", &TrainConfig::use_triplet));
    f.push_back(NumberField("checkpoint_every", &TrainConfig::checkpoint_every));
    f.push_back(NumberField("dump_every", &TrainConfig::dump_every));
    f.push_back(NumberField("dump_count", &TrainConfig::dump_count));
    return f;
  }();
  return fields;
}

}  // namespace

void TrainConfig::Validate() const {
  NetConfig probe = net;
  probe.num_classes = std::max(1, probe.num_classes);
  probe.Validate();
  weights.Validate();
  Margin check(margin);
  (void)check;
  if (plan.speakers < 0 || plan.anchors < 1 || plan.positives < 1 ||
      plan.other_classes < 1 || plan.negatives < 1) {
    throw ConfigError("sampling counts anchors, positives, other_classes, "
                      "negatives must be >= 1 (speakers_per_epoch >= 0)");
  }
  if (batch_triplets < 1) throw ConfigError("batch_triplets must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  for (double lr : {lr_encoder, lr_classifier, lr_generator, lr_critic}) {
    if (!(lr > 0.0)) throw ConfigError("learning rates must be > 0");
  }
  for (double b : {beta1, beta2, adv_beta1, adv_beta2}) {
    if (!(b >= 0.0 && b < 1.0)) throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be > 0");
  if (g_steps_per_d_step < 1) {
    throw ConfigError("g_steps_per_d_step must be >= 1");
  }
  if (!(gp_lambda >= 0.0)) throw ConfigError("gp_lambda must be >= 0");
  if (!use_gan && !use_softmax && !use_triplet) {
    throw ConfigError("at least one of use_gan, use_softmax, use_triplet "
                      "must be enabled");
  }
  if (checkpoint_every < 0 || dump_every < 0 || dump_count < 0) {
    throw ConfigError("checkpoint_every, dump_every, dump_count must be >= 0");
  }
}

TrainConfig ParseConfig(const std::string& text) {
  std::map<std::string, const Field*> by_key;
  for (const auto& f : Fields()) by_key.emplace(f.key, &f);
  TrainConfig config;
  std::set<std::string> seen;
  std::stringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value, got '" + line + "'");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      throw ConfigError("unknown config key '" + key + "' on line " +
                        std::to_string(line_no));
    }
    if (!seen.insert(key).second) {
      throw ConfigError("config key '" + key + "' repeated on line " +
                        std::to_string(line_no));
    }
    it->second->set(config, value);
  }
  config.Validate();
  return config;
}

TrainConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

std::string ConfigToText(const TrainConfig& config) {
  std::string out;
  for (const auto& f : Fields()) {
    out += f.key + " = " + f.get(config) + "\n";
  }
  return out;
}

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : Fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

std::vector<std::string> StructuralDifferences(const TrainConfig& a,
                                               const TrainConfig& b) {
  static const std::set<std::string> ignored = {"epochs", "checkpoint_every",
                                                "dump_every", "dump_count"};
  std::vector<std::string> out;
  for (const auto& f : Fields()) {
    if (ignored.contains(f.key)) continue;
    if (f.get(a) != f.get(b)) out.push_back(f.key);
  }
  return out;
}

}  // namespace mtgan
