#include "e2t/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

namespace e2t {

namespace {
const std::vector<std::string> kReserved = {"<pad>", "<unk>", "<bos>", "<eos>"};
}

Vocabulary::Vocabulary() {
  for (const auto& t : kReserved) insert(t);
}

void Vocabulary::insert(const std::string& token) {
  token_to_id_.emplace(token, static_cast<int>(id_to_token_.size()));
  id_to_token_.push_back(token);
}

int Vocabulary::id(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return token_to_id_.count(token) > 0;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw std::out_of_range("vocabulary id " + std::to_string(id) + " out of range");
  }
  return id_to_token_[id];
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& sequences,
                             std::size_t cap) {
  if (cap <= 4) throw std::invalid_argument("vocabulary cap must exceed 4");
  // std::map keeps ties lexicographic without a second sort key shuffle
  std::map<std::string, std::size_t> freq;
  for (const auto& seq : sequences) {
    for (const auto& tok : seq) ++freq[tok];
  }
  std::vector<std::pair<std::string, std::size_t>> entries(freq.begin(), freq.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  const std::size_t keep = std::min(entries.size(), cap - 4);
  for (std::size_t i = 0; i < keep; ++i) v.insert(entries[i].first);
  return v;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (std::size_t i = 4; i < id_to_token_.size(); ++i) {
    out << id_to_token_[i] << '\n';
  }
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Vocabulary v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (v.contains(line)) {
      throw std::runtime_error(path + ": duplicate token '" + line + "'");
    }
    v.insert(line);
  }
  return v;
}

}  // namespace e2t
