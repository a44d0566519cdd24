#include "e2t/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace e2t {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": '" + v + "'");
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  try {
    const long long n = std::stoll(v);
    if (n < 0) throw std::invalid_argument("negative");
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
  }
}

std::vector<std::pair<std::size_t, std::size_t>> parse_filters(const std::string& v) {
  // format: "3:400,4:300,5:300"
  std::vector<std::pair<std::size_t, std::size_t>> filters;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("config: cnn_filters entries must look like 'h:maps'");
    }
    filters.emplace_back(parse_size("cnn_filters", item.substr(0, colon)),
                         parse_size("cnn_filters", item.substr(colon + 1)));
  }
  if (filters.empty()) throw std::invalid_argument("config: cnn_filters is empty");
  return filters;
}

std::string filters_to_string(const std::vector<std::pair<std::size_t, std::size_t>>& f) {
  std::ostringstream os;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) os << ',';
    os << f[i].first << ':' << f[i].second;
  }
  return os.str();
}

}  // namespace

std::size_t RunConfig::entity_encoding_dim() const {
  if (e2t_encoder == EntityEncoderKind::rnn) return 2 * e2t_state;
  std::size_t total = 0;
  for (const auto& [h, maps] : cnn_filters) total += maps;
  return total;
}

void RunConfig::validate() const {
  if (vocab_cap <= 4) throw std::invalid_argument("config: vocab_cap must exceed 4");
  if (word_dim == 0 || state == 0 || att_dim == 0 || out_dim == 0) {
    throw std::invalid_argument("config: dimensions must be positive");
  }
  if (use_e2t && (entity_dim == 0 || e2t_state == 0)) {
    throw std::invalid_argument("config: entity dimensions must be positive");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw std::invalid_argument("config: dropout must be in [0,1)");
  }
  if (batch_size == 0 || max_epochs == 0 || patience == 0) {
    throw std::invalid_argument("config: batch_size, max_epochs, patience must be positive");
  }
  if (beam == 0 || max_len == 0) {
    throw std::invalid_argument("config: beam and max_len must be positive");
  }
  if (use_e2t && e2t_k == 0) throw std::invalid_argument("config: e2t_k must be positive");
  for (const auto& [h, maps] : cnn_filters) {
    if (h == 0 || maps == 0) {
      throw std::invalid_argument("config: cnn filter sizes and map counts must be positive");
    }
  }
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "seed") cfg.seed = parse_size(key, value);
  else if (key == "vocab_cap") cfg.vocab_cap = parse_size(key, value);
  else if (key == "word_dim") cfg.word_dim = parse_size(key, value);
  else if (key == "entity_dim") cfg.entity_dim = parse_size(key, value);
  else if (key == "state") cfg.state = parse_size(key, value);
  else if (key == "att_dim") cfg.att_dim = parse_size(key, value);
  else if (key == "out_dim") cfg.out_dim = parse_size(key, value);
  else if (key == "use_e2t") cfg.use_e2t = parse_bool(key, value);
  else if (key == "e2t_encoder") {
    if (value == "rnn") cfg.e2t_encoder = EntityEncoderKind::rnn;
    else if (value == "cnn") cfg.e2t_encoder = EntityEncoderKind::cnn;
    else throw std::invalid_argument("config: e2t_encoder must be rnn or cnn");
  } else if (key == "e2t_pooling") {
    if (value == "firm") cfg.e2t_pooling = PoolingKind::firm;
    else if (value == "soft") cfg.e2t_pooling = PoolingKind::soft;
    else throw std::invalid_argument("config: e2t_pooling must be firm or soft");
  } else if (key == "e2t_gate") cfg.e2t_gate = parse_bool(key, value);
  else if (key == "e2t_vector_gate") cfg.e2t_vector_gate = parse_bool(key, value);
  else if (key == "e2t_k" || key == "k") cfg.e2t_k = parse_size(key, value);
  else if (key == "e2t_state") cfg.e2t_state = parse_size(key, value);
  else if (key == "cnn_filters") cfg.cnn_filters = parse_filters(value);
  else if (key == "dropout") cfg.dropout = parse_double(key, value);
  else if (key == "batch_size") cfg.batch_size = parse_size(key, value);
  else if (key == "max_epochs") cfg.max_epochs = parse_size(key, value);
  else if (key == "patience") cfg.patience = parse_size(key, value);
  else if (key == "beam") cfg.beam = parse_size(key, value);
  else if (key == "max_len") cfg.max_len = parse_size(key, value);
  else if (key == "tune_budget") cfg.tune_budget = parse_size(key, value);
  else if (key == "length_norm") cfg.length_norm = parse_bool(key, value);
  else if (key == "word_vectors") cfg.word_vectors = value;
  else if (key == "entity_vectors") cfg.entity_vectors = value;
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

RunConfig parse_config_text(const std::string& text,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    }
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  for (const auto& [k, v] : overrides) apply_config_entry(cfg, k, v);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

std::string config_to_text(const RunConfig& cfg) {
  std::ostringstream os;
  os << "seed=" << cfg.seed << '\n';
  os << "vocab_cap=" << cfg.vocab_cap << '\n';
  os << "word_dim=" << cfg.word_dim << '\n';
  os << "entity_dim=" << cfg.entity_dim << '\n';
  os << "state=" << cfg.state << '\n';
  os << "att_dim=" << cfg.att_dim << '\n';
  os << "out_dim=" << cfg.out_dim << '\n';
  os << "use_e2t=" << (cfg.use_e2t ? "true" : "false") << '\n';
  os << "e2t_encoder=" << (cfg.e2t_encoder == EntityEncoderKind::rnn ? "rnn" : "cnn") << '\n';
  os << "e2t_pooling=" << (cfg.e2t_pooling == PoolingKind::firm ? "firm" : "soft") << '\n';
  os << "e2t_gate=" << (cfg.e2t_gate ? "on" : "off") << '\n';
  os << "e2t_vector_gate=" << (cfg.e2t_vector_gate ? "on" : "off") << '\n';
  os << "e2t_k=" << cfg.e2t_k << '\n';
  os << "e2t_state=" << cfg.e2t_state << '\n';
  os << "cnn_filters=" << filters_to_string(cfg.cnn_filters) << '\n';
  os << "dropout=" << cfg.dropout << '\n';
  os << "batch_size=" << cfg.batch_size << '\n';
  os << "max_epochs=" << cfg.max_epochs << '\n';
  os << "patience=" << cfg.patience << '\n';
  os << "beam=" << cfg.beam << '\n';
  os << "max_len=" << cfg.max_len << '\n';
  os << "tune_budget=" << cfg.tune_budget << '\n';
  os << "length_norm=" << (cfg.length_norm ? "true" : "false") << '\n';
  if (!cfg.word_vectors.empty()) os << "word_vectors=" << cfg.word_vectors << '\n';
  if (!cfg.entity_vectors.empty()) os << "entity_vectors=" << cfg.entity_vectors << '\n';
  return os.str();
}

}  // namespace e2t
