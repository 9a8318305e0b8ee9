#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

// A file under the system temp directory, removed on destruction.
class TempFile {
 public:
  explicit TempFile(const std::string& contents, const std::string& suffix = ".mtx") {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("symsolve_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + suffix);
    std::ofstream(path_) << contents;
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};
