#include "dafd/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace dafd::fft {
namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // FFTW_ESTIMATE leaves the scratch arrays untouched; they only fix the
    // plan's shape. FFTW_UNALIGNED lets us execute on std::vector storage.
    auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(std::span<const cplx> in, std::span<cplx> out, int sign) {
  const int n = static_cast<int>(in.size());
  fftw_plan plan = cache().get(n, sign);
  // fftw_execute_dft never writes to its input for out-of-place plans.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plan, src, dst);
}

}  // namespace

std::vector<cplx> forward(std::span<const cplx> samples) {
  std::vector<cplx> out(samples.size());
  if (samples.empty()) return out;
  execute(samples, out, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(samples.size());
  for (auto& c : out) c *= scale;
  return out;
}

std::vector<cplx> inverse(std::span<const cplx> spectrum) {
  std::vector<cplx> out(spectrum.size());
  if (spectrum.empty()) return out;
  execute(spectrum, out, FFTW_BACKWARD);
  return out;
}

void backward_inplace(std::span<cplx> data) {
  if (data.empty()) return;
  std::vector<cplx> copy(data.begin(), data.end());
  execute(copy, data, FFTW_BACKWARD);
}

}  // namespace dafd::fft
