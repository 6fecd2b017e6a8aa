#ifndef DIALECTMT_TESTS_TEST_UTIL_HPP
#define DIALECTMT_TESTS_TEST_UTIL_HPP

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dialectmt/corpus.hpp"

namespace testutil {

// Scratch directory removed when the test section ends.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    auto base = std::filesystem::temp_directory_path();
    path_ = base / ("dialectmt_test_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline dialectmt::Sentence sent(const std::string& line) {
  return dialectmt::sentence_from_line(line);
}

inline std::vector<dialectmt::Sentence> sents(const std::vector<std::string>& lines) {
  std::vector<dialectmt::Sentence> out;
  for (const auto& l : lines) out.push_back(sent(l));
  return out;
}

inline dialectmt::ParallelCorpus corpus(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  dialectmt::ParallelCorpus c;
  for (const auto& [s, t] : pairs) c.pairs.emplace_back(sent(s), sent(t));
  return c;
}

}  // namespace testutil

#endif
