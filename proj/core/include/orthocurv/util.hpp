#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace orthocurv {

// Exit-code taxonomy: verdict FAIL -> 1, ConfigError -> 2, NumericError -> 3.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Counter-based deterministic RNG. SplitMix64 core; streams are forked by
// re-keying so per-path sequences are independent of evaluation order and
// thread count. Gaussian via explicit Box-Muller (platform-stable, unlike
// std::normal_distribution).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  // Independent stream keyed by (this stream's seed, index): forking is a
  // pure function of the constructed identity, not of how many draws the
  // parent has made. Used one-per-path/sample.
  Rng fork(std::uint64_t index) const {
    Rng r(seed_ ^ (0x9e3779b97f4a7c15ULL + index * 0xbf58476d1ce4e5b9ULL));
    r.next();
    return r;
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in (0,1]; never returns 0 so log() is safe.
  double uniform() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  double gaussian();           // Box-Muller, caches the pair's second value
  double uniform_in(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// FNV-1a 64-bit over bytes; reports embed the hex digest of their canonical
// serialization, so equal content implies equal hash across runs and threads.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::string fnv1a64_hex(const std::string& s);

// Deterministic parallel loop: indices are chunked over nthreads workers, each
// fn(i) writes only to slot i of caller-owned storage. Results are identical
// for any nthreads >= 1.
void parallel_for(std::size_t n, int nthreads, const std::function<void(std::size_t)>& fn);

// 17-significant-digit float formatting used by every report writer.
std::string float17(double x);

// Composite Simpson on [a,b] with n (even) intervals.
double simpson(const std::function<double(double)>& f, double a, double b, int n);

std::vector<double> linspace(double a, double b, int n);

}  // namespace orthocurv
