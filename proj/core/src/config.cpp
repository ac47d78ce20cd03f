//
// Copyright 2026 The dpfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpfl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dpfl/errors.hpp"

namespace dpfl::exp {
namespace {

const std::set<std::string, std::less<>>& known_keys() {
  static const std::set<std::string, std::less<>> keys = {
      "mode",
      "seed",
      "sampling",
      "data.path",
      "data.synthetic.n_samples",
      "data.synthetic.n_features",
      "data.synthetic.separation",
      "data.synthetic.noise_std",
      "data.split.train",
      "data.split.val",
      "data.split.test",
      "data.normalize",
      "model.hidden",
      "model.activation",
      "train.optimizer",
      "train.learning_rate",
      "train.lot_size",
      "train.epochs",
      "dp.clip_norm",
      "dp.sigma",
      "dp.epsilon",
      "dp.delta",
      "dp.conversion",
      "fed.clients",
      "fed.fraction",
      "fed.local_batch",
      "fed.local_epochs",
      "fed.rounds",
      "fed.prox_mu",
      "fed.threads",
      "metrics.wall_time",
  };
  return keys;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

class Reader {
 public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  bool has(std::string_view key) const { return kv_.find(key) != kv_.end(); }
  bool has_prefix(std::string_view prefix) const {
    return std::any_of(kv_.begin(), kv_.end(),
                       [&](const auto& e) { return e.first.starts_with(prefix); });
  }

  std::optional<std::string> str(std::string_view key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return it->second;
  }

  double real(std::string_view key, double def) const {
    auto s = str(key);
    if (!s) return def;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
    if (ec != std::errc() || ptr != s->data() + s->size() || s->empty() || !std::isfinite(v)) {
      fail(key, "expected a finite real number, got '" + *s + "'");
    }
    return v;
  }

  std::uint64_t count(std::string_view key, std::uint64_t def) const {
    auto s = str(key);
    if (!s) return def;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
    if (ec != std::errc() || ptr != s->data() + s->size() || s->empty()) {
      fail(key, "expected a non-negative integer, got '" + *s + "'");
    }
    return v;
  }

  bool boolean(std::string_view key, bool def) const {
    auto s = str(key);
    if (!s) return def;
    if (*s == "true" || *s == "1" || *s == "yes") return true;
    if (*s == "false" || *s == "0" || *s == "no") return false;
    fail(key, "expected true or false, got '" + *s + "'");
  }

  std::vector<std::size_t> count_list(std::string_view key, std::vector<std::size_t> def) const {
    auto s = str(key);
    if (!s) return def;
    std::vector<std::size_t> out;
    std::string_view rest = *s;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      std::size_t v = 0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size() || item.empty()) {
        fail(key, "expected a comma-separated list of integers, got '" + *s + "'");
      }
      out.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  template <typename F>
  auto parsed(std::string_view key, F&& parse, decltype(parse(std::string_view{})) def) const {
    auto s = str(key);
    if (!s) return def;
    try {
      return parse(*s);
    } catch (const std::invalid_argument& e) {
      fail(key, e.what());
    }
  }

  [[noreturn]] static void fail(std::string_view key, const std::string& msg) {
    throw ConfigError(std::string(key) + ": " + msg);
  }

 private:
  const KeyValues& kv_;
};

void require(bool ok, std::string_view key, const std::string& msg) {
  if (!ok) Reader::fail(key, msg);
}

}  // namespace

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::kCentral: return "central";
    case Mode::kCentralDp: return "central-dp";
    case Mode::kFed: return "fed";
    case Mode::kFedLdp: return "fed-ldp";
  }
  return "?";
}

Mode mode_from_string(std::string_view s) {
  if (s == "central") return Mode::kCentral;
  if (s == "central-dp") return Mode::kCentralDp;
  if (s == "fed") return Mode::kFed;
  if (s == "fed-ldp") return Mode::kFedLdp;
  throw std::invalid_argument("unknown mode '" + std::string(s) +
                              "' (expected central, central-dp, fed or fed-ldp)");
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(view.substr(0, eq)));
    const std::string value(trim(view.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_key_values(in);
}

ExperimentConfig parse_config(const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    if (!known_keys().contains(key)) throw ConfigError("unknown key '" + key + "'");
  }
  const Reader r(kv);
  ExperimentConfig cfg;

  require(r.has("mode"), "mode", "required");
  cfg.mode = r.parsed("mode", mode_from_string, Mode::kCentral);
  cfg.seed = r.count("seed", 0);
  cfg.sampling = r.parsed("sampling", optim::sampling_from_string, optim::SamplingMode::kShuffle);

  if (auto p = r.str("data.path")) {
    require(!p->empty(), "data.path", "must not be empty");
    require(!r.has_prefix("data.synthetic."), "data.path",
            "cannot be combined with data.synthetic.* keys");
    cfg.data.path = *p;
  } else if (!r.has_prefix("data.synthetic.")) {
    throw ConfigError("data: a dataset is required (data.path or data.synthetic.*)");
  }
  auto& syn = cfg.data.synthetic;
  syn.n_samples = r.count("data.synthetic.n_samples", syn.n_samples);
  syn.n_features = r.count("data.synthetic.n_features", syn.n_features);
  syn.class_separation = r.real("data.synthetic.separation", syn.class_separation);
  syn.noise_std = r.real("data.synthetic.noise_std", syn.noise_std);
  require(syn.n_samples >= 5, "data.synthetic.n_samples", "must be >= 5");
  require(syn.n_features >= 1, "data.synthetic.n_features", "must be >= 1");
  require(syn.noise_std > 0.0, "data.synthetic.noise_std", "must be > 0");
  auto& sp = cfg.data.split;
  sp.train = r.real("data.split.train", sp.train);
  sp.val = r.real("data.split.val", sp.val);
  sp.test = r.real("data.split.test", sp.test);
  try {
    sp.validate();
  } catch (const std::invalid_argument& e) {
    Reader::fail("data.split", e.what());
  }
  cfg.data.normalize = r.boolean("data.normalize", true);

  cfg.hidden_dims = r.count_list("model.hidden", cfg.hidden_dims);
  require(!cfg.hidden_dims.empty() &&
              std::all_of(cfg.hidden_dims.begin(), cfg.hidden_dims.end(),
                          [](std::size_t h) { return h >= 1; }),
          "model.hidden", "needs at least one layer, each of width >= 1");
  cfg.activation = r.parsed("model.activation", nn::activation_from_string, nn::Activation::kReLU);

  const bool priv = is_private(cfg.mode);
  const auto default_opt = priv ? optim::OptimizerKind::kDpAdam : optim::OptimizerKind::kAdam;
  cfg.optimizer = r.parsed("train.optimizer", optim::optimizer_from_string, default_opt);
  require(optim::is_private(cfg.optimizer) == priv, "train.optimizer",
          std::string(optim::to_string(cfg.optimizer)) + " is not valid in mode " +
              std::string(to_string(cfg.mode)));
  cfg.train.learning_rate = r.real("train.learning_rate", 0.001);
  require(cfg.train.learning_rate > 0.0, "train.learning_rate", "must be > 0");
  cfg.train.lot_size = r.count("train.lot_size", 1024);
  require(cfg.train.lot_size >= 1, "train.lot_size", "must be >= 1");
  cfg.train.epochs = r.count("train.epochs", 50);

  if (r.has_prefix("dp.")) {
    DpSection dp;
    dp.clip_norm = r.real("dp.clip_norm", 4.0);
    require(dp.clip_norm > 0.0, "dp.clip_norm", "must be > 0");
    if (auto s = r.str("dp.sigma"); s && *s != "auto") {
      const double sigma = r.real("dp.sigma", 0.0);
      require(sigma >= 0.0, "dp.sigma", "must be >= 0");
      dp.sigma = sigma;
    }
    require(r.has("dp.epsilon"), "dp.epsilon", "required in the dp section");
    dp.budget.epsilon = r.real("dp.epsilon", 0.0);
    require(dp.budget.epsilon > 0.0, "dp.epsilon", "must be > 0");
    dp.budget.delta = r.real("dp.delta", 1e-5);
    require(dp.budget.delta > 0.0 && dp.budget.delta < 1.0, "dp.delta", "must lie in (0, 1)");
    dp.conversion = r.parsed("dp.conversion", privacy::conversion_from_string,
                             privacy::Conversion::kClassic);
    if (priv && dp.sigma) require(*dp.sigma > 0.0, "dp.sigma", "must be > 0 in private modes");
    cfg.dp = dp;
  }
  if (r.has_prefix("fed.")) {
    FedSection fed;
    require(r.has("fed.clients"), "fed.clients", "required in the fed section");
    fed.clients = r.count("fed.clients", fed.clients);
    require(fed.clients >= 1, "fed.clients", "must be >= 1");
    fed.fraction = r.real("fed.fraction", fed.fraction);
    require(fed.fraction > 0.0 && fed.fraction <= 1.0, "fed.fraction", "must lie in (0, 1]");
    fed.local_batch = r.count("fed.local_batch", fed.local_batch);
    require(fed.local_batch >= 1, "fed.local_batch", "must be >= 1");
    fed.local_epochs = r.count("fed.local_epochs", fed.local_epochs);
    require(fed.local_epochs >= 1, "fed.local_epochs", "must be >= 1");
    fed.rounds = r.count("fed.rounds", fed.rounds);
    fed.prox_mu = r.real("fed.prox_mu", fed.prox_mu);
    require(fed.prox_mu >= 0.0, "fed.prox_mu", "must be >= 0");
    fed.threads = r.count("fed.threads", fed.threads);
    require(fed.threads >= 1, "fed.threads", "must be >= 1");
    cfg.fed = fed;
  }
  cfg.wall_time = r.boolean("metrics.wall_time", false);

  if (priv && !cfg.dp) {
    throw ConfigError("dp: mode " + std::string(to_string(cfg.mode)) + " requires a dp section");
  }
  if (is_federated(cfg.mode) && !cfg.fed) {
    throw ConfigError("fed: mode " + std::string(to_string(cfg.mode)) + " requires a fed section");
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  return parse_config(read_key_values(path));
}

KeyValues to_key_values(const ExperimentConfig& cfg) {
  KeyValues kv;
  kv["mode"] = to_string(cfg.mode);
  kv["seed"] = std::to_string(cfg.seed);
  kv["sampling"] = optim::to_string(cfg.sampling);
  if (cfg.data.path) {
    kv["data.path"] = cfg.data.path->string();
  } else {
    kv["data.synthetic.n_samples"] = std::to_string(cfg.data.synthetic.n_samples);
    kv["data.synthetic.n_features"] = std::to_string(cfg.data.synthetic.n_features);
    kv["data.synthetic.separation"] = format_double(cfg.data.synthetic.class_separation);
    kv["data.synthetic.noise_std"] = format_double(cfg.data.synthetic.noise_std);
  }
  kv["data.split.train"] = format_double(cfg.data.split.train);
  kv["data.split.val"] = format_double(cfg.data.split.val);
  kv["data.split.test"] = format_double(cfg.data.split.test);
  kv["data.normalize"] = cfg.data.normalize ? "true" : "false";
  std::string hidden;
  for (std::size_t i = 0; i < cfg.hidden_dims.size(); ++i) {
    if (i > 0) hidden += ',';
    hidden += std::to_string(cfg.hidden_dims[i]);
  }
  kv["model.hidden"] = hidden;
  kv["model.activation"] = nn::to_string(cfg.activation);
  kv["train.optimizer"] = optim::to_string(cfg.optimizer);
  kv["train.learning_rate"] = format_double(cfg.train.learning_rate);
  kv["train.lot_size"] = std::to_string(cfg.train.lot_size);
  kv["train.epochs"] = std::to_string(cfg.train.epochs);
  if (cfg.dp) {
    kv["dp.clip_norm"] = format_double(cfg.dp->clip_norm);
    kv["dp.sigma"] = cfg.dp->sigma ? format_double(*cfg.dp->sigma) : "auto";
    kv["dp.epsilon"] = format_double(cfg.dp->budget.epsilon);
    kv["dp.delta"] = format_double(cfg.dp->budget.delta);
    kv["dp.conversion"] = privacy::to_string(cfg.dp->conversion);
  }
  if (cfg.fed) {
    kv["fed.clients"] = std::to_string(cfg.fed->clients);
    kv["fed.fraction"] = format_double(cfg.fed->fraction);
    kv["fed.local_batch"] = std::to_string(cfg.fed->local_batch);
    kv["fed.local_epochs"] = std::to_string(cfg.fed->local_epochs);
    kv["fed.rounds"] = std::to_string(cfg.fed->rounds);
    kv["fed.prox_mu"] = format_double(cfg.fed->prox_mu);
    kv["fed.threads"] = std::to_string(cfg.fed->threads);
  }
  kv["metrics.wall_time"] = cfg.wall_time ? "true" : "false";
  return kv;
}

KeyValues with_overrides(KeyValues base, const std::vector<std::string>& overrides) {
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "': expected key=value");
    base[std::string(trim(std::string_view(o).substr(0, eq)))] =
        std::string(trim(std::string_view(o).substr(eq + 1)));
  }
  return base;
}

std::vector<ExperimentConfig> make_sweep(const KeyValues& base, const std::string& key,
                                         const std::vector<std::string>& values) {
  std::vector<ExperimentConfig> out;
  out.reserve(values.size());
  for (const std::string& v : values) out.push_back(parse_config(with_overrides(base, {key + "=" + v})));
  return out;
}

}  // namespace dpfl::exp
