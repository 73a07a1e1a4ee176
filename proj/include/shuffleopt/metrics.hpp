// Derived quantities reported by the harness: completion-time degradation,
// stacked base/extra completion split, and network energy drawn from a
// stage-2 activation solution.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "shuffleopt/common.hpp"
#include "shuffleopt/optmodel.hpp"
#include "shuffleopt/topology.hpp"

namespace shuffleopt {

// Percentage increase of the failed completion time over the baseline.
// Exact optima can never improve under failures, so callers may treat small
// negative outputs as numerical noise; this function reports the raw value.
inline double degradation(double t_fail_s, double t_base_s) {
  if (!(t_base_s > 0)) throw DomainError("degradation: baseline completion must be positive");
  if (!(t_fail_s >= 0)) throw DomainError("degradation: failed completion must be non-negative");
  return 100.0 * (t_fail_s - t_base_s) / t_base_s;
}

// Split a failed-case completion into the no-failure base and the extra time
// attributable to the failure (for stacked-bar style reporting).
struct CompletionSplit {
  double base_s = 0.0;
  double extra_s = 0.0;
};

inline CompletionSplit overall_completion(double t_base_s, double t_fail_s) {
  if (!(t_base_s >= 0) || !(t_fail_s >= 0))
    throw DomainError("overall_completion: completion times must be non-negative");
  CompletionSplit split;
  split.base_s = t_base_s;
  split.extra_s = t_fail_s > t_base_s ? t_fail_s - t_base_s : 0.0;
  return split;
}

struct EnergyOptions {
  // Servers burn NIC power regardless of the routing, so they are excluded
  // from the network energy by default; enable to add them as always-active.
  bool include_servers = false;
};

struct EnergyBreakdown {
  double active_power_w = 0.0;  // sum of active-state draw over counted nodes
  double idle_power_w = 0.0;    // sum of idle-state draw over counted nodes
  int active_nodes = 0;
  int idle_nodes = 0;
  double energy_j = 0.0;         // (active + idle power) * completion time
  double energy_active_j = 0.0;  // active power alone * completion time
};

// Energy consumed over one shuffle of duration `completion_s`, reading the
// per-node activation variables out of a solved stage-2 model. Every powered
// element of the topology must carry an activation variable; anything else
// means the solution belongs to a different model.
inline EnergyBreakdown energy(const Topology& t, const ModelBundle& stage2,
                              const std::vector<double>& x, double completion_s,
                              const EnergyOptions& opt = {}) {
  if (!(completion_s >= 0) || !std::isfinite(completion_s))
    throw DomainError("energy: completion time must be finite and non-negative");
  if (stage2.model.stage_tag != "stage2")
    throw ModelMismatchError("energy: expected a stage-2 model, got '" +
                             stage2.model.stage_tag + "'");
  if (stage2.model.topology_fp != t.fingerprint())
    throw ModelMismatchError("energy: model was built for a different topology");
  if (x.size() != stage2.model.vars.size())
    throw ModelMismatchError("energy: solution size does not match the model");

  EnergyBreakdown out;
  for (const auto& n : t.nodes) {
    if (is_server(n.kind)) {
      if (opt.include_servers) {
        out.active_power_w += n.power_active_w;
        ++out.active_nodes;
      }
      continue;
    }
    if (!is_powered_element(n.kind)) continue;  // passive gear draws nothing
    auto it = stage2.meta.u_var.find(n.id);
    if (it == stage2.meta.u_var.end())
      throw ModelMismatchError("energy: no activation variable for powered node '" +
                               n.label + "'");
    const double u = x[static_cast<size_t>(it->second)];
    if (u >= 0.5) {
      out.active_power_w += n.power_active_w;
      ++out.active_nodes;
    } else {
      out.idle_power_w += n.power_idle_w;
      ++out.idle_nodes;
    }
  }
  out.energy_active_j = out.active_power_w * completion_s;
  out.energy_j = (out.active_power_w + out.idle_power_w) * completion_s;
  return out;
}

// One evaluated case, as emitted into the result tables.
struct RunMetrics {
  std::string topology;       // family label of the topology document
  std::string scenario;       // scenario name ("none" for the baseline)
  bool fatal = false;         // scenario disconnected some demand
  double volume_mb = 0.0;     // total shuffle volume
  double lambda = 0.0;        // optimal concurrency factor (MB/s per unit)
  double completion_s = 0.0;  // minimum shuffle completion time
  double degradation_pct = 0.0;
  double base_s = 0.0;
  double extra_s = 0.0;
  double active_power_w = 0.0;
  double idle_power_w = 0.0;
  int active_nodes = 0;
  int idle_nodes = 0;
  double energy_j = 0.0;
  double energy_active_j = 0.0;
};

}  // namespace shuffleopt
