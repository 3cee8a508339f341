#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace nlslab::detail {
namespace {

struct PlanKey {
  int dim;
  std::size_t n0;
  std::size_t n1;
  int sign;
  auto operator<=>(const PlanKey&) const = default;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const PlanKey& key) {
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // Planning scratch; FFTW_ESTIMATE never touches the arrays' contents and
    // FFTW_UNALIGNED lets new-array execution use any std::complex buffer.
    std::vector<cplx> scratch(key.n0 * key.n1);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = key.dim == 1
                         ? fftw_plan_dft_1d(static_cast<int>(key.n0), p, p, key.sign, flags)
                         : fftw_plan_dft_2d(static_cast<int>(key.n0), static_cast<int>(key.n1),
                                            p, p, key.sign, flags);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void dft(std::span<cplx> data, int dim, std::size_t n0, std::size_t n1, Direction dir) {
  const PlanKey key{dim, n0, dim == 2 ? n1 : 1, static_cast<int>(dir)};
  fftw_plan plan = cache().get(key);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

}  // namespace nlslab::detail
