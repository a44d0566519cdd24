#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace e2t {

// Bidirectional token<->id map with four reserved ids and a size cap.
// Ids 4.. are ordered by descending corpus frequency, ties broken
// lexicographically. Unknown tokens look up as UNK.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;

  Vocabulary();

  int id(const std::string& token) const;
  const std::string& token(int id) const;
  bool contains(const std::string& token) const;
  std::size_t size() const { return id_to_token_.size(); }

  // tokens beyond the reserved four, in id order
  const std::vector<std::string>& tokens() const { return id_to_token_; }

  void save(const std::string& path) const;  // one non-reserved token per line
  static Vocabulary load(const std::string& path);

  // Keeps the (cap - 4) most frequent tokens. cap must exceed 4.
  static Vocabulary build(const std::vector<std::vector<std::string>>& sequences,
                          std::size_t cap = 50000);

 private:
  void insert(const std::string& token);

  std::unordered_map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
};

}  // namespace e2t
