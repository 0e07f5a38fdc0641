#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace klab {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class ComplexCompensatedSum {
 public:
  void add(std::complex<double> v) {
    re_.add(v.real());
    im_.add(v.imag());
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

/// Parallel-map capability handed to the compute kernels.
///
/// With one thread the body runs as a plain serial loop; this is the reference
/// path. Otherwise the indices are distributed with OpenMP. Each index must
/// write only to its own output slot, and every reduction over the slots is done
/// afterwards in ascending index order, so results do not depend on the thread
/// count.
class Executor {
 public:
  explicit Executor(int threads = 1) : threads_(threads < 1 ? 1 : threads) {}

  int threads() const { return threads_; }

  template <class Body>
  void for_each_index(std::size_t count, Body&& body) const {
    if (threads_ == 1 || count < 2) {
      for (std::size_t i = 0; i < count; ++i) body(i);
      return;
    }
    // Exceptions cannot cross the OpenMP region; keep the one from the lowest
    // index so the reported failure is deterministic.
    std::vector<std::exception_ptr> errors(count);
    const auto n = static_cast<long long>(count);
#pragma omp parallel for num_threads(threads_) schedule(dynamic, 1)
    for (long long i = 0; i < n; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

 private:
  int threads_;
};

}  // namespace klab
