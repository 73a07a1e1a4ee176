// Link-failure scenarios: whole-link removal, fatality detection, scenario
// suite documents, and deterministic scenario generators.
#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shuffleopt/common.hpp"
#include "shuffleopt/topology.hpp"
#include "shuffleopt/workload.hpp"

namespace shuffleopt {

struct Scenario {
  std::string name;
  std::vector<LinkId> failed_links;  // ids in the pristine topology

  std::uint64_t fingerprint() const {
    std::uint64_t h = fnv1a_append(1469598103934665603ULL, name);
    for (LinkId l : failed_links) h = fnv1a_append(h, static_cast<std::int64_t>(l));
    return h;
  }
};

inline Scenario baseline_scenario() { return Scenario{"none", {}}; }

// Remove whole links (both directions of traffic). Surviving links keep
// their original ids, so applying the same scenario twice is a no-op; only
// ids outside the topology's link id universe are rejected.
inline Topology apply_scenario(const Topology& t, const Scenario& s) {
  std::set<LinkId> failed;
  for (LinkId id : s.failed_links) {
    if (id < 0 || id >= t.link_id_limit)
      throw ScenarioError("scenario '" + s.name + "': link id " + std::to_string(id) +
                          " outside topology (universe is 0.." +
                          std::to_string(t.link_id_limit - 1) + ")");
    failed.insert(id);
  }
  Topology out = t;
  out.links.erase(std::remove_if(out.links.begin(), out.links.end(),
                                 [&](const Link& l) { return failed.count(l.id) > 0; }),
                  out.links.end());
  for (auto& g : out.groups)
    g.members.erase(std::remove_if(g.members.begin(), g.members.end(),
                                   [&](LinkId m) { return failed.count(m) > 0; }),
                    g.members.end());
  return out;
}

// Ids of network demands with no surviving path. Links carry traffic both
// ways, so undirected reachability decides. Colocated demands use the
// server-internal loopback and are never disconnected.
inline std::vector<DemandId> disconnected_demands(const Topology& t,
                                                  const std::vector<Demand>& demands) {
  std::vector<NodeId> comp(t.nodes.size());
  std::iota(comp.begin(), comp.end(), 0);
  // Union-find with path halving.
  auto find = [&](NodeId x) {
    while (comp[static_cast<size_t>(x)] != x) {
      comp[static_cast<size_t>(x)] = comp[static_cast<size_t>(comp[static_cast<size_t>(x)])];
      x = comp[static_cast<size_t>(x)];
    }
    return x;
  };
  for (const auto& l : t.links) {
    NodeId ra = find(l.a), rb = find(l.b);
    if (ra != rb) comp[static_cast<size_t>(ra)] = rb;
  }
  std::vector<DemandId> out;
  for (const auto& d : demands) {
    if (d.colocated || d.volume_mb <= 0) continue;
    if (find(d.src) != find(d.snk)) out.push_back(d.id);
  }
  return out;
}

inline bool is_fatal(const Topology& t, const std::vector<Demand>& demands) {
  return !disconnected_demands(t, demands).empty();
}

// NonFatal, or Fatal carrying exactly the demands left without a path.
struct Fatality {
  bool fatal = false;
  std::vector<DemandId> disconnected;
};

inline Fatality classify_scenario(const Topology& t, const DemandSet& d,
                                  const Scenario& s) {
  Topology degraded = apply_scenario(t, s);
  Fatality f;
  f.disconnected = disconnected_demands(degraded, d.demands);
  f.fatal = !f.disconnected.empty();
  return f;
}

inline void throw_if_fatal(const Topology& t, const std::vector<Demand>& demands,
                           const std::string& scenario_name) {
  auto dead = disconnected_demands(t, demands);
  if (!dead.empty())
    throw FatalScenarioError("scenario '" + scenario_name + "' disconnects " +
                                 std::to_string(dead.size()) + " demand(s)",
                             dead);
}

// ---------------------------------------------------------------------------
// Suite documents
// ---------------------------------------------------------------------------

namespace detail {

// Map "<labelA>--<labelB>" (either orientation) to the link id. Ambiguous
// labels (parallel links) and unknown labels are errors.
inline LinkId resolve_link_label(const Topology& t, const std::string& label) {
  LinkId found = -1;
  int hits = 0;
  for (const auto& l : t.links) {
    const std::string fwd = link_label(t, l);
    const Node* a = t.find_node(l.a);
    const Node* b = t.find_node(l.b);
    const std::string rev = (b ? b->label : "?") + "--" + (a ? a->label : "?");
    if (label == fwd || label == rev) {
      found = l.id;
      ++hits;
    }
  }
  if (hits == 0) throw ParseError("scenario document: unknown link label '" + label + "'");
  if (hits > 1)
    throw ParseError("scenario document: link label '" + label + "' is ambiguous (" +
                     std::to_string(hits) + " matches)");
  return found;
}

}  // namespace detail

inline nlohmann::ordered_json scenarios_to_json(const std::vector<Scenario>& suite,
                                                const Topology& t) {
  nlohmann::ordered_json doc;
  doc["scenarios"] = nlohmann::ordered_json::array();
  for (const auto& s : suite) {
    nlohmann::ordered_json js;
    js["name"] = s.name;
    js["failed_links"] = nlohmann::ordered_json::array();
    for (LinkId id : s.failed_links) {
      const Link* l = t.find_link(id);
      if (l)
        js["failed_links"].push_back(link_label(t, *l));
      else
        js["failed_links"].push_back(id);  // label unavailable, keep the raw id
    }
    doc["scenarios"].push_back(std::move(js));
  }
  return doc;
}

inline std::vector<Scenario> scenarios_from_json(const nlohmann::json& doc,
                                                 const Topology& t) {
  if (!doc.contains("scenarios"))
    throw ParseError("scenario document: missing 'scenarios' array");
  std::vector<Scenario> suite;
  std::set<std::string> names;
  for (const auto& js : doc.at("scenarios")) {
    Scenario s;
    s.name = detail::get_field<std::string>(js, "name", "scenario");
    if (!names.insert(s.name).second)
      throw ParseError("scenario document: duplicate scenario name '" + s.name + "'");
    if (!js.contains("failed_links"))
      throw ParseError("scenario document: scenario '" + s.name + "' missing 'failed_links'");
    for (const auto& entry : js.at("failed_links")) {
      if (entry.is_number_integer()) {
        LinkId id = entry.get<LinkId>();
        if (id < 0 || id >= t.link_id_limit)
          throw ParseError("scenario document: scenario '" + s.name + "' references link id " +
                           std::to_string(id) + " outside the topology");
        s.failed_links.push_back(id);
      } else if (entry.is_string()) {
        s.failed_links.push_back(detail::resolve_link_label(t, entry.get<std::string>()));
      } else {
        throw ParseError("scenario document: scenario '" + s.name +
                         "' has a failed_links entry that is neither id nor label");
      }
    }
    std::sort(s.failed_links.begin(), s.failed_links.end());
    s.failed_links.erase(std::unique(s.failed_links.begin(), s.failed_links.end()),
                         s.failed_links.end());
    suite.push_back(std::move(s));
  }
  return suite;
}

inline void save_scenarios(const std::vector<Scenario>& suite, const Topology& t,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << scenarios_to_json(suite, t).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

inline std::vector<Scenario> load_scenarios(const std::string& path, const Topology& t) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario document: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scenario document: ") + e.what());
  }
  return scenarios_from_json(doc, t);
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

inline std::vector<Scenario> all_single_link_scenarios(const Topology& t) {
  std::vector<Scenario> suite;
  for (const auto& l : t.links)
    suite.push_back(Scenario{"fail:" + link_label(t, l), {l.id}});
  return suite;
}

// `count` scenarios, each failing between 1 and max_failed distinct links.
// Hand-rolled draws keep the suite identical across standard libraries.
inline std::vector<Scenario> random_scenario_suite(const Topology& t, int count,
                                                   int max_failed, std::uint64_t seed) {
  if (count < 0) throw ParameterError("scenario count must be >= 0");
  if (max_failed < 1) throw ParameterError("max_failed must be >= 1");
  if (static_cast<size_t>(max_failed) > t.links.size())
    throw ParameterError("max_failed exceeds link count");
  std::mt19937_64 rng(seed);
  std::vector<Scenario> suite;
  for (int i = 0; i < count; ++i) {
    int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_failed));
    std::vector<LinkId> pool;
    pool.reserve(t.links.size());
    for (const auto& l : t.links) pool.push_back(l.id);
    for (size_t j = pool.size() - 1; j > 0; --j)
      std::swap(pool[j], pool[static_cast<size_t>(rng() % (j + 1))]);
    pool.resize(static_cast<size_t>(k));
    std::sort(pool.begin(), pool.end());
    suite.push_back(Scenario{"rand" + std::to_string(i), std::move(pool)});
  }
  return suite;
}

// Grow `base` by `extra` additional distinct live links: the result is a
// superset scenario, useful for monotonicity checks.
inline Scenario extend_scenario(const Topology& t, const Scenario& base, int extra,
                                std::mt19937_64& rng) {
  std::set<LinkId> chosen(base.failed_links.begin(), base.failed_links.end());
  std::vector<LinkId> pool;
  for (const auto& l : t.links)
    if (!chosen.count(l.id)) pool.push_back(l.id);
  if (static_cast<size_t>(extra) > pool.size())
    throw ParameterError("cannot extend scenario: not enough remaining links");
  for (size_t j = pool.size() - 1; j > 0; --j)
    std::swap(pool[j], pool[static_cast<size_t>(rng() % (j + 1))]);
  for (int i = 0; i < extra; ++i) chosen.insert(pool[static_cast<size_t>(i)]);
  Scenario out;
  out.name = base.name + "+ext" + std::to_string(extra);
  out.failed_links.assign(chosen.begin(), chosen.end());
  return out;
}

}  // namespace shuffleopt
