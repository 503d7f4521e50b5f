#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace mqg::fft {

namespace detail {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// FFTW_ESTIMATE keeps the chosen algorithm, and hence every output bit,
// independent of timing measurements.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  std::pair<fftw_plan, fftw_plan> plans(int n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> a(static_cast<std::size_t>(n) * n);
    std::vector<std::complex<double>> b(a.size());
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan fwd = fftw_plan_dft_2d(n, n, in, out, FFTW_FORWARD, flags);
    fftw_plan bwd = fftw_plan_dft_2d(n, n, in, out, FFTW_BACKWARD, flags);
    return plans_.emplace(n, std::make_pair(fwd, bwd)).first->second;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.first);
      fftw_destroy_plan(p.second);
    }
  }

  std::mutex mutex_;
  std::map<int, std::pair<fftw_plan, fftw_plan>> plans_;
};

inline void execute(fftw_plan plan, std::span<const std::complex<double>> in,
                    std::span<std::complex<double>> out) {
  // FFTW does not write to the input of an out-of-place c2c transform.
  auto* src = const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data()));
  fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace detail

/// Unnormalized forward DFT: out[k] = sum_x in[x] e^{-2 pi i k.x / n}.
inline void forward(int n, std::span<const std::complex<double>> in,
                    std::span<std::complex<double>> out) {
  detail::execute(detail::PlanCache::instance().plans(n).first, in, out);
}

/// Unnormalized inverse DFT: out[x] = sum_k in[k] e^{+2 pi i k.x / n}.
inline void backward(int n, std::span<const std::complex<double>> in,
                     std::span<std::complex<double>> out) {
  detail::execute(detail::PlanCache::instance().plans(n).second, in, out);
}

}  // namespace mqg::fft
