#include "primerace/cache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "primerace/errors.hpp"

namespace primerace {

namespace fs = std::filesystem;

namespace {

const std::string kModule = "cli";

class FileLock {
 public:
  FileLock(const fs::path& path, int op) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw ComputationError(kModule, "cannot open lock file " + path.string());
    if (::flock(fd_, op) != 0) {
      ::close(fd_);
      throw ComputationError(kModule, "cannot lock " + path.string());
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

void check_key(const std::string& key) {
  if (key.empty() || key.find('/') != std::string::npos || key.starts_with("."))
    throw ValidationError(kModule, "invalid cache key '" + key + "'");
}

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& blob) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ComputationError(kModule, "cannot write " + tmp.string());
    out << blob;
  }
  fs::rename(tmp, p);
}

std::string height_tag(double h) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", h);
  return buf;
}

}  // namespace

Cache::Cache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw ValidationError(kModule, "cannot create cache directory " + dir_.string() + ": " + ec.message());
}

fs::path Cache::default_dir() {
  if (const char* d = std::getenv(kCacheEnv); d && *d) return d;
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return fs::path(x) / "primerace";
  if (const char* h = std::getenv("HOME"); h && *h) return fs::path(h) / ".cache" / "primerace";
  return fs::temp_directory_path() / "primerace-cache";
}

std::optional<std::string> Cache::get(const std::string& key) const {
  check_key(key);
  FileLock lock(dir_ / (key + ".lock"), LOCK_SH);
  return read_file(dir_ / key);
}

void Cache::put(const std::string& key, const std::string& blob) const {
  check_key(key);
  FileLock lock(dir_ / (key + ".lock"), LOCK_EX);
  write_file(dir_ / key, blob);
}

std::string Cache::get_or_create(const std::string& key, const std::function<std::string()>& produce,
                                 bool* hit) const {
  check_key(key);
  FileLock lock(dir_ / (key + ".lock"), LOCK_EX);
  if (auto blob = read_file(dir_ / key)) {
    if (hit) *hit = true;
    return *blob;
  }
  if (hit) *hit = false;
  std::string blob = produce();
  write_file(dir_ / key, blob);
  return blob;
}

std::vector<double> conductor_table(const FieldModel& field, const Cache* cache, bool* hit) {
  auto produce = [&] {
    std::string s;
    char buf[40];
    for (double v : field.log_conductors()) {
      std::snprintf(buf, sizeof buf, "%.17g\n", v);
      s += buf;
    }
    return s;
  };
  const std::string blob =
      cache ? cache->get_or_create(field.fingerprint() + ".conductors", produce, hit) : produce();
  if (!cache && hit) *hit = false;
  std::vector<double> out;
  std::istringstream in(blob);
  for (double v; in >> v;) out.push_back(v);
  if (out.size() != static_cast<std::size_t>(field.group().order()))
    throw ComputationError(kModule, "cached conductor table has the wrong length; remove " + field.fingerprint() +
                                        ".conductors from the cache");
  return out;
}

ZeroArchive cached_archive(const FieldModel& field, double height, const Cache* cache, bool* hit) {
  auto produce = [&] {
    std::ostringstream out;
    write_archive(out, compute_archive(field, height), field);
    return out.str();
  };
  const std::string key = field.fingerprint() + ".zeros-" + height_tag(height);
  const std::string blob = cache ? cache->get_or_create(key, produce, hit) : produce();
  if (!cache && hit) *hit = false;
  std::istringstream in(blob);
  ZeroArchive a = parse_archive(in, field, cache ? (cache->dir() / key).string() : "<computed>");
  a.provenance = Provenance::Computed;
  return a;
}

}  // namespace primerace
