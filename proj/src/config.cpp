#include "ctcbert/config.hpp"

#include "ctcbert/error.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace ctcbert {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  require(ec == std::errc() && ptr == end, ErrorKind::ConfigInvalid,
          "key '" + std::string(key) + "': cannot parse '" + std::string(value) + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error(ErrorKind::ConfigInvalid,
              "key '" + std::string(key) + "': expected true/false, got '" + std::string(value) + "'");
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

struct Field {
  std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T, class Access>
Field number_field(Access access) {
  return {[access](ExperimentConfig& c, std::string_view k, std::string_view v) {
            access(c) = parse_number<T>(k, v);
          },
          [access](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(access(const_cast<ExperimentConfig&>(c)));
            } else {
              return std::to_string(access(const_cast<ExperimentConfig&>(c)));
            }
          }};
}

template <class Access>
Field bool_field(Access access) {
  return {[access](ExperimentConfig& c, std::string_view k, std::string_view v) {
            access(c) = parse_bool(k, v);
          },
          [access](const ExperimentConfig& c) -> std::string {
            return access(const_cast<ExperimentConfig&>(c)) ? "true" : "false";
          }};
}

#define CTCBERT_FIELD(type, member) \
  number_field<type>([](ExperimentConfig& c) -> type& { return c.member; })

const std::vector<std::pair<std::string, Field>>& schema() {
  static const std::vector<std::pair<std::string, Field>> fields = {
      {"seed", CTCBERT_FIELD(std::uint64_t, seed)},
      {"utterances", CTCBERT_FIELD(int, corpus.utterances)},
      {"eval_utterances", CTCBERT_FIELD(int, eval_utterances)},
      {"frames", CTCBERT_FIELD(int, corpus.frames)},
      {"vocab", CTCBERT_FIELD(int, corpus.vocab)},
      {"feature_dim", CTCBERT_FIELD(int, corpus.feature_dim)},
      {"self_loop", CTCBERT_FIELD(double, corpus.self_loop)},
      {"sigma", CTCBERT_FIELD(double, corpus.sigma)},
      {"jitter_max", CTCBERT_FIELD(int, corpus.jitter_max)},
      {"jitter_prob", CTCBERT_FIELD(double, corpus.jitter_prob)},
      {"corrupt_prob", CTCBERT_FIELD(double, corpus.corrupt_prob)},
      {"model_dim", CTCBERT_FIELD(int, model.model_dim)},
      {"embed_dim", CTCBERT_FIELD(int, model.embed_dim)},
      {"layers", CTCBERT_FIELD(int, model.layers)},
      {"attention", bool_field([](ExperimentConfig& c) -> bool& { return c.model.attention; })},
      {"attention_window", CTCBERT_FIELD(int, model.attention_window)},
      {"nonlinearity",
       {[](ExperimentConfig& c, std::string_view, std::string_view v) {
          c.model.nonlinearity = parse_nonlinearity(v);
        },
        [](const ExperimentConfig& c) { return std::string(to_string(c.model.nonlinearity)); }}},
      {"steps", CTCBERT_FIELD(std::int64_t, train.steps)},
      {"batch_size", CTCBERT_FIELD(int, train.batch_size)},
      {"lr", CTCBERT_FIELD(double, train.lr_peak)},
      {"lr_warmup", CTCBERT_FIELD(std::int64_t, train.lr_warmup_steps)},
      {"lr_decay",
       {[](ExperimentConfig& c, std::string_view, std::string_view v) {
          c.train.decay = parse_lr_decay(v);
        },
        [](const ExperimentConfig& c) { return std::string(to_string(c.train.decay)); }}},
      {"adam_beta1", CTCBERT_FIELD(double, train.beta1)},
      {"adam_beta2", CTCBERT_FIELD(double, train.beta2)},
      {"weight_decay", CTCBERT_FIELD(double, train.weight_decay)},
      {"grad_clip", CTCBERT_FIELD(double, train.grad_clip)},
      {"mask_p", CTCBERT_FIELD(double, train.mask_prob)},
      {"mask_l", CTCBERT_FIELD(int, train.mask_span)},
      {"alpha", CTCBERT_FIELD(double, train.mode.alpha)},
      {"ce_warmup", CTCBERT_FIELD(std::int64_t, train.mode.ce_warmup_steps)},
      {"finetune_steps", CTCBERT_FIELD(std::int64_t, finetune.steps)},
      {"finetune_batch_size", CTCBERT_FIELD(int, finetune.batch_size)},
      {"finetune_lr", CTCBERT_FIELD(double, finetune.lr_peak)},
      {"finetune_lr_warmup", CTCBERT_FIELD(std::int64_t, finetune.lr_warmup_steps)},
      {"finetune_vocab", CTCBERT_FIELD(int, finetune.vocab)},
      {"freeze_encoder",
       bool_field([](ExperimentConfig& c) -> bool& { return c.finetune.freeze_encoder; })},
  };
  return fields;
}

#undef CTCBERT_FIELD

const Field& find_field(std::string_view key) {
  for (const auto& [name, field] : schema()) {
    if (name == key) return field;
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown config key '" + std::string(key) + "'");
}

}  // namespace

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  find_field(key).set(*this, key, trim(value));
  sync();
}

std::string ExperimentConfig::get(std::string_view key) const { return find_field(key).get(*this); }

void ExperimentConfig::sync() {
  corpus.seed = seed;
  train.seed = seed;
  finetune.seed = seed;
  model.vocab = corpus.vocab;
  model.feature_dim = corpus.feature_dim;
  finetune.beta1 = train.beta1;
  finetune.beta2 = train.beta2;
  finetune.weight_decay = train.weight_decay;
  finetune.grad_clip = train.grad_clip;
}

void ExperimentConfig::validate() const {
  ctcbert::validate(corpus);
  require(eval_utterances >= 1, ErrorKind::ConfigInvalid, "eval_utterances must be >= 1");
  ctcbert::validate(model);
  ctcbert::validate(train);
  require(finetune.steps >= 0 && finetune.batch_size >= 1 && finetune.lr_peak > 0.0 &&
              finetune.lr_warmup_steps >= 0 && finetune.vocab >= 0,
          ErrorKind::ConfigInvalid, "finetune settings out of range");
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& [name, field] : schema()) out += name + " = " + field.get(*this) + "\n";
  return out;
}

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& entry : schema()) n.push_back(entry.first);
    return n;
  }();
  return names;
}

ExperimentConfig parse_config(std::string_view text, const std::string& origin) {
  ExperimentConfig config;
  config.sync();
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = origin + ":" + std::to_string(number) + ": ";
    const std::string content = trim(line.substr(0, line.find('#')));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    require(eq != std::string::npos, ErrorKind::ConfigInvalid, where + "expected key = value");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    require(seen.insert(key).second, ErrorKind::ConfigInvalid,
            where + "duplicate key '" + key + "'");
    try {
      config.set(key, value);
    } catch (const Error& e) {
      throw Error(e.kind(), where + e.what());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Io, "cannot open config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

}  // namespace ctcbert
