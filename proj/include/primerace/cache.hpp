#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "primerace/field.hpp"
#include "primerace/zeros.hpp"

namespace primerace {

inline constexpr const char* kCacheEnv = "PRIMERACE_CACHE_DIR";

// Directory-backed blob store; every read and write holds an flock on <key>.lock.
class Cache {
 public:
  explicit Cache(std::filesystem::path dir);
  // $PRIMERACE_CACHE_DIR, else $XDG_CACHE_HOME/primerace, else ~/.cache/primerace.
  static std::filesystem::path default_dir();

  const std::filesystem::path& dir() const { return dir_; }
  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& blob) const;
  // Returns the cached blob or stores produce(); the lock spans both.
  std::string get_or_create(const std::string& key, const std::function<std::string()>& produce,
                            bool* hit = nullptr) const;

 private:
  std::filesystem::path dir_;
};

// log A(chi) per character, serialized with 17 significant digits.
std::vector<double> conductor_table(const FieldModel& field, const Cache* cache, bool* hit = nullptr);
ZeroArchive cached_archive(const FieldModel& field, double height, const Cache* cache, bool* hit = nullptr);

}  // namespace primerace
