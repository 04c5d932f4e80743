#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace primerace {

inline constexpr int kMaxPartitionSize = 12;

using SetPartition = std::vector<std::vector<int>>;

long long bell_number(int n);

// All set partitions of K (|K| <= 12), blocks in order of least element.
std::vector<SetPartition> set_partitions(std::span<const int> K);

// Number of partitions of an n-set; served from the shared cache.
std::size_t partition_count(int n);

// (-1)^{m-1} (m-1)! for a partition with m blocks.
double moebius_weight(const SetPartition& p);

using TestFunction = std::function<std::complex<double>(std::span<const double>)>;

// Lambda_K h(s) = sum_{P} (-1)^{|P|-1} (|P|-1)! prod_{J in P} h(psi_J s),
// where psi_J zeroes every coordinate outside J.
std::complex<double> lambda_operator(const TestFunction& h, std::span<const int> K, std::span<const double> s);

}  // namespace primerace
