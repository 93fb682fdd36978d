#include "skp/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace skp {

namespace {

std::string render(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, std::size_t(ptr - buf));
}

}  // namespace

void write_trace_csv(const std::string& path,
                     const std::vector<SolverTrace>& traces) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  out << "trial,k,rel_error,wall_clock_s,eps_norm\n";
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const SolverTrace& trace = traces[t];
    for (std::size_t k = 0; k < trace.rel_errors.size(); ++k) {
      const double wall = (k >= 1 && k <= trace.step_seconds.size())
                              ? trace.step_seconds[k - 1]
                              : 0.0;
      const double eps =
          (k >= 1 && k <= trace.eps_norms.size()) ? trace.eps_norms[k - 1] : 0.0;
      out << t << ',' << k << ',' << render(trace.rel_errors[k]) << ','
          << render(wall) << ',' << render(eps) << '\n';
    }
  }
  if (!out) throw std::runtime_error("write_trace_csv: write failed for " + path);
}

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::kTolReached:
      return "tol_reached";
    case Termination::kMaxIters:
      return "max_iters";
    case Termination::kDiverged:
      return "diverged";
  }
  return "unknown";
}

}  // namespace skp
