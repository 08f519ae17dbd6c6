#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "icprobe/lexicon.hpp"
#include "icprobe/textio.hpp"

namespace icprobe::testing {

inline std::filesystem::path SampleDir() { return ICPROBE_SAMPLE_DIR; }

inline lexicon::NamePool SamplePool() {
  lexicon::NamePool pool;
  pool.male = {"John", "David", "Michael", "James", "Robert", "Thomas", "Daniel", "Paul", "Mark", "Peter"};
  pool.female = {"Mary", "Sarah", "Emma", "Anna", "Laura", "Alice", "Julia", "Susan", "Helen", "Kate"};
  return pool;
}

// "w000" .. "w199" are not valid nonce words (digits), so use letters.
inline lexicon::NonceLexicon LetterNonce(std::size_t n = 200) {
  lexicon::NonceLexicon lex;
  for (std::size_t i = 0; i < n; ++i) {
    std::string w = "n";
    for (std::size_t v = i + 26 * 26; v; v /= 26) w += static_cast<char>('a' + v % 26);
    lex.words.push_back(w);
  }
  return lex;
}

inline lexicon::VerbEntry Praise() { return {"v1", "praise", "{SUBJ} praised {OBJ}", -45, "en"}; }
inline lexicon::VerbEntry Apologize() {
  return {"v2", "apologize", "{SUBJ} apologized to {OBJ}", 60, "en"};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("icprobe_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace icprobe::testing
