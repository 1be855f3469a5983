#pragma once

#include <cstddef>
#include <exception>

namespace smkl {

/// Caps the OpenMP worker count; n < 1 restores the runtime default.
void set_num_threads(int n);
int max_threads();

/// Runs body(i) for i in [0, n) across OpenMP workers. The first exception
/// thrown by any iteration is rethrown on the calling thread.
template <class Body>
void parallel_for(std::ptrdiff_t n, Body&& body) {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical(smkl_parallel_for_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace smkl
