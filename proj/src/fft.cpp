#include "wig/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace wig {

namespace {

std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

void run_axis(cplx* base, int m, int howmany, int stride, int sign, int outer, long block) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* p = reinterpret_cast<fftw_complex*>(base);
    plan = fftw_plan_many_dft(1, &m, howmany, p, nullptr, stride, 1, p, nullptr, stride, 1,
                              sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  for (int o = 0; o < outer; ++o) {
    auto* p = reinterpret_cast<fftw_complex*>(base + o * block);
    fftw_execute_dft(plan, p, p);
  }
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

void centered_dft_axis(std::vector<cplx>& data, const std::vector<int>& dims, int axis, int sign,
                       double scale) {
  int m = dims.at(axis);
  if (m % 2 != 0) throw Error(ErrorCode::GridMismatch, "centered DFT needs an even axis length");
  long inner = 1, outer = 1;
  for (int a = axis + 1; a < static_cast<int>(dims.size()); ++a) inner *= dims[a];
  for (int a = 0; a < axis; ++a) outer *= dims[a];
  long block = inner * m;
  // (-1)^j before and (-1)^(k + m/2) after turn the standard DFT into the centered one.
  double post = ((m / 2) % 2 == 0) ? scale : -scale;
  for (long o = 0; o < outer; ++o)
    for (int j = 1; j < m; j += 2) {
      cplx* row = data.data() + o * block + static_cast<long>(j) * inner;
      for (long i = 0; i < inner; ++i) row[i] = -row[i];
    }
  run_axis(data.data(), m, static_cast<int>(inner), static_cast<int>(inner), sign,
           static_cast<int>(outer), block);
  for (long o = 0; o < outer; ++o)
    for (int k = 0; k < m; ++k) {
      double f = (k % 2 == 0) ? post : -post;
      cplx* row = data.data() + o * block + static_cast<long>(k) * inner;
      for (long i = 0; i < inner; ++i) row[i] *= f;
    }
}

void centered_dft(cplx* data, int m, int sign, double scale) {
  if (m % 2 != 0) throw Error(ErrorCode::GridMismatch, "centered DFT needs an even axis length");
  for (int j = 1; j < m; j += 2) data[j] = -data[j];
  run_axis(data, m, 1, 1, sign, 1, m);
  double post = ((m / 2) % 2 == 0) ? scale : -scale;
  for (int k = 0; k < m; ++k) data[k] *= (k % 2 == 0) ? post : -post;
}

}  // namespace wig
