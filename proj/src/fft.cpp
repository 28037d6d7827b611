#include "gm/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

namespace gm {

namespace {

// Planner calls are not thread-safe in FFTW; execution with new-array
// functions is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class PlanCache {
 public:
  ~PlanCache() {
    std::lock_guard lock(planner_mutex());
    for (auto& [key, entry] : plans_) {
      fftw_destroy_plan(entry.plan);
      fftw_free(entry.buf);
    }
  }

  // Runs the transform in place on `data` (size n).
  void run(std::vector<std::complex<double>>& data, int sign) {
    const auto n = data.size();
    auto it = plans_.find({n, sign});
    if (it == plans_.end()) {
      std::lock_guard lock(planner_mutex());
      auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
      fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE);
      it = plans_.emplace(std::pair{n, sign}, Entry{p, buf}).first;
    }
    auto& e = it->second;
    std::copy(data.begin(), data.end(), reinterpret_cast<std::complex<double>*>(e.buf));
    fftw_execute(e.plan);
    const auto* out = reinterpret_cast<const std::complex<double>*>(e.buf);
    std::copy(out, out + n, data.begin());
  }

 private:
  struct Entry {
    fftw_plan plan;
    fftw_complex* buf;
  };
  std::map<std::pair<std::size_t, int>, Entry> plans_;
};

PlanCache& cache() {
  thread_local PlanCache c;
  return c;
}

}  // namespace

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x) {
  return fft(x, x.size());
}

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x, std::size_t n) {
  std::vector<std::complex<double>> out(n);
  std::copy_n(x.begin(), std::min(n, x.size()), out.begin());
  if (n == 0) return out;
  cache().run(out, FFTW_FORWARD);
  return out;
}

std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> X) {
  std::vector<std::complex<double>> out(X.begin(), X.end());
  if (out.empty()) return out;
  cache().run(out, FFTW_BACKWARD);
  return out;
}

}  // namespace gm
