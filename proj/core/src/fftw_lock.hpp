#pragma once

#include <mutex>

namespace finsler::detail {

// FFTW's planner is not reentrant; every plan create/destroy goes through this lock.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace finsler::detail
