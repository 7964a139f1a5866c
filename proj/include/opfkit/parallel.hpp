#pragma once

#include <cstddef>
#include <functional>

namespace opfkit {

/// Runs fn(i) for i in [0, n). jobs == 1 uses the plain serial loop (the
/// reference path); jobs > 1 dispatches the same body across an OpenMP team.
/// Work items must be independent; outputs are written to index i slots so
/// results do not depend on the worker count.
void run_indexed(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Hardware concurrency, floored at 1.
int default_jobs();

}  // namespace opfkit
