#include "primerace/berry_esseen.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

const std::string kModule = "berry_esseen";

using Rgs = std::vector<std::uint8_t>;

// Restricted growth strings a_0 = 0, a_i <= 1 + max(a_0..a_{i-1}).
std::vector<Rgs> enumerate_rgs(int n) {
  std::vector<Rgs> out;
  if (n == 0) {
    out.emplace_back();
    return out;
  }
  out.reserve(static_cast<std::size_t>(bell_number(n)));
  Rgs a(n, 0), mx(n, 0);
  while (true) {
    out.push_back(a);
    int i = n - 1;
    while (i > 0 && a[i] > mx[i - 1]) --i;
    if (i == 0) break;
    ++a[i];
    mx[i] = std::max(mx[i - 1], a[i]);
    for (int j = i + 1; j < n; ++j) {
      a[j] = 0;
      mx[j] = mx[i];
    }
  }
  return out;
}

class PartitionCache {
 public:
  std::shared_ptr<const std::vector<Rgs>> get(int n) {
    {
      std::shared_lock lock(mu_);
      if (auto it = cache_.find(n); it != cache_.end()) return it->second;
    }
    auto built = std::make_shared<const std::vector<Rgs>>(enumerate_rgs(n));
    std::unique_lock lock(mu_);
    return cache_.try_emplace(n, std::move(built)).first->second;
  }

 private:
  std::shared_mutex mu_;
  std::map<int, std::shared_ptr<const std::vector<Rgs>>> cache_;
};

PartitionCache& cache() {
  static PartitionCache c;
  return c;
}

void check_size(std::size_t n) {
  if (n > static_cast<std::size_t>(kMaxPartitionSize))
    throw ValidationError(kModule, "index set larger than " + std::to_string(kMaxPartitionSize));
}

void check_distinct(std::span<const int> K) {
  std::set<int> seen(K.begin(), K.end());
  if (seen.size() != K.size()) throw ValidationError(kModule, "index set has repeated entries");
}

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

}  // namespace

long long bell_number(int n) {
  if (n < 0) throw ValidationError(kModule, "negative Bell index");
  if (n > 25) throw ValidationError(kModule, "Bell index too large");
  std::vector<long long> row{1};
  for (int i = 0; i < n; ++i) {
    std::vector<long long> next{row.back()};
    for (long long v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

std::size_t partition_count(int n) {
  check_size(static_cast<std::size_t>(n));
  return cache().get(n)->size();
}

std::vector<SetPartition> set_partitions(std::span<const int> K) {
  check_size(K.size());
  check_distinct(K);
  const auto rgs = cache().get(static_cast<int>(K.size()));
  std::vector<SetPartition> out;
  out.reserve(rgs->size());
  for (const auto& a : *rgs) {
    SetPartition p;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] >= p.size()) p.emplace_back();
      p[a[i]].push_back(K[i]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

double moebius_weight(const SetPartition& p) {
  const int m = static_cast<int>(p.size());
  return (m % 2 == 1 ? 1.0 : -1.0) * factorial(m - 1);
}

std::complex<double> lambda_operator(const TestFunction& h, std::span<const int> K, std::span<const double> s) {
  check_size(K.size());
  check_distinct(K);
  for (int k : K)
    if (k < 0 || static_cast<std::size_t>(k) >= s.size()) throw ValidationError(kModule, "index outside the argument");
  const int n = static_cast<int>(K.size());
  if (n == 0) return h(std::vector<double>(s.size(), 0.0));

  // h(psi_J s) memoized by the subset mask of J within K.
  std::vector<std::complex<double>> memo(std::size_t{1} << n);
  std::vector<bool> have(memo.size(), false);
  std::vector<double> arg(s.size());
  auto eval = [&](unsigned mask) {
    if (!have[mask]) {
      std::fill(arg.begin(), arg.end(), 0.0);
      for (int i = 0; i < n; ++i)
        if ((mask >> i) & 1u) arg[K[i]] = s[K[i]];
      memo[mask] = h(arg);
      have[mask] = true;
    }
    return memo[mask];
  };

  const auto rgs = cache().get(n);
  std::vector<unsigned> masks;
  std::complex<double> total{0.0, 0.0};
  for (const auto& a : *rgs) {
    masks.assign(n, 0u);
    int m = 0;
    for (int i = 0; i < n; ++i) {
      masks[a[i]] |= 1u << i;
      m = std::max(m, a[i] + 1);
    }
    std::complex<double> prod{1.0, 0.0};
    for (int b = 0; b < m; ++b) prod *= eval(masks[b]);
    total += (m % 2 == 1 ? 1.0 : -1.0) * factorial(m - 1) * prod;
  }
  return total;
}

}  // namespace primerace
