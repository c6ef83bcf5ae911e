#pragma once

#include <exception>

namespace siteguard::detail {

// Exceptions must not escape an OpenMP region; the first one is rethrown
// after the loop.
class ExceptionSlot {
 public:
  template <typename F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
#pragma omp critical(siteguard_exception_slot)
      if (!error_) error_ = std::current_exception();
    }
  }

  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

}  // namespace siteguard::detail
