#pragma once

#include <cstddef>
#include <exception>

namespace actplace {

/// Selects between the OpenMP kernels and the serial reference path. Both
/// paths produce bit-identical results; the serial one is kept for testing.
enum class Exec { serial, parallel };

/// Calls fn(i) for i in [0, count). Exceptions thrown by fn are captured and
/// the first one is rethrown after the loop completes.
template <class Fn>
void for_each_index(Exec exec, std::size_t count, Fn&& fn) {
  if (exec == Exec::serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(actplace_for_each_index)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace actplace
