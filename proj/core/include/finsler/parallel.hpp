#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace finsler {

/// Worker count used by the data-parallel loops. Defaults to 1.
void set_thread_count(int threads);
int thread_count();

/// Calls body(i) for i in [0, count), split into contiguous chunks across workers.
/// Each index is visited exactly once; the body must only write to slot i.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Pairwise (cascade) summation in a fixed tree order. The result depends only on
/// the input sequence, never on how it was produced.
double pairwise_sum(std::span<const double> values);

/// Evaluates f at every index in parallel, then reduces with pairwise_sum.
double parallel_sum(std::size_t count, const std::function<double(std::size_t)>& f);

}  // namespace finsler
