#pragma once

#include <string>
#include <vector>

#include "skp/solver.hpp"

namespace skp {

/// Writes per-trial traces as CSV with the columns
///   trial,k,rel_error,wall_clock_s,eps_norm
/// one row per recorded iterate (k = 0 rows carry zero wall clock and eps).
/// rel_error and eps_norm are rendered shortest-round-trip so reruns with the
/// same seeds reproduce those columns byte for byte.
void write_trace_csv(const std::string& path,
                     const std::vector<SolverTrace>& traces);

std::string termination_name(Termination t);

}  // namespace skp
