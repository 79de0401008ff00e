#ifndef MHRES_COMMON_HPP
#define MHRES_COMMON_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mhres {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class UsageError : public Error {
public:
  explicit UsageError(const std::string& what) : Error(what) {}
};

class SolverError : public Error {
public:
  explicit SolverError(const std::string& what) : Error(what) {}
};

// Deterministic RNG wrapper. std::mt19937_64 output is fully specified by the
// standard; the *distributions* are not, so all draws go through the helpers
// below instead of <random> distribution objects.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // uniform double in [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n), rejection-sampled
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw Error("Rng::below: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  long intRange(long lo, long hi) {  // inclusive
    return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {  // Fisher-Yates
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // derive an independent stream, e.g. per subproblem
  Rng fork(std::uint64_t salt) {
    return Rng(eng_() ^ (salt * 0x9e3779b97f4a7c15ULL));
  }

private:
  std::mt19937_64 eng_;
};

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace mhres

#endif
