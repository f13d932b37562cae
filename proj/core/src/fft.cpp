#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace neel::detail {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created in-place and unaligned so any vector works.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    auto* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(std::vector<std::complex<double>>& data, int sign) {
  if (data.empty()) return;
  fftw_plan plan = cache().get(static_cast<int>(data.size()), sign);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

}  // namespace

void fft_forward(std::vector<std::complex<double>>& data) {
  run(data, FFTW_FORWARD);
}

void fft_inverse(std::vector<std::complex<double>>& data) {
  run(data, FFTW_BACKWARD);
}

}  // namespace neel::detail
