#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "shuffleopt/topology.hpp"
#include "test_util.hpp"

using namespace shuffleopt;

namespace {

int count_kind(const Topology& t, NodeKind k) {
  int c = 0;
  for (const auto& n : t.nodes)
    if (n.kind == k) ++c;
  return c;
}

int count_servers(const Topology& t) { return count_kind(t, NodeKind::Server); }

}  // namespace

TEST_CASE("spine-leaf generator produces the expected shape") {
  TopologyParams p;
  p.spines = 4;
  p.leaves = 4;
  p.servers_per_leaf = 4;
  const Topology t = build_spine_leaf(p);
  CHECK(t.nodes.size() == 24);
  CHECK(count_servers(t) == 16);
  CHECK(t.links.size() == 32);  // 16 access + 4*4 fabric
  CHECK(t.groups.empty());
  CHECK(validate_topology(t).ok());
  CHECK(t.arch_tag == "spine-leaf");
  CHECK(t.node_by_label("rack2.server3").has_value());
  CHECK(t.node_by_label("spine3").has_value());
  CHECK_FALSE(t.node_by_label("nope").has_value());
}

TEST_CASE("fat-tree generator produces the expected shape") {
  TopologyParams p;
  p.k = 4;
  const Topology t = build_fat_tree(p);
  CHECK(count_servers(t) == 16);              // k^3/4
  CHECK(t.nodes.size() - 16 == 20);           // 5k^2/4 switches
  CHECK(t.links.size() == 48);
  CHECK(validate_topology(t).ok());
  // Every aggregation switch must reach exactly k/2 cores.
  const auto agg = t.node_by_label("pod0.agg1");
  REQUIRE(agg.has_value());
  int agg_core_links = 0;
  for (const auto& l : t.links) {
    const bool touches_agg = l.a == *agg || l.b == *agg;
    const NodeId other = l.a == *agg ? l.b : l.a;
    if (touches_agg && t.find_node(other)->kind == NodeKind::CoreSwitch) ++agg_core_links;
  }
  CHECK(agg_core_links == 2);
  CHECK_THROWS_AS(build_fat_tree([] {
                    TopologyParams q;
                    q.k = 3;
                    return q;
                  }()),
                  ParameterError);
}

TEST_CASE("bcube generator produces the expected shape") {
  TopologyParams p;
  p.n = 4;
  p.level = 1;
  const Topology t = build_bcube(p);
  CHECK(count_servers(t) == 16);   // n^(level+1)
  CHECK(t.nodes.size() == 24);     // + (level+1)*n^level switches
  CHECK(t.links.size() == 32);     // every server is dual-homed
  CHECK(validate_topology(t).ok());
  // Each server has exactly level+1 links.
  std::map<NodeId, int> degree;
  for (const auto& l : t.links) {
    degree[l.a]++;
    degree[l.b]++;
  }
  for (const auto& n : t.nodes)
    if (is_server(n.kind)) CHECK(degree[n.id] == 2);
}

TEST_CASE("dcell generator produces the expected shape") {
  TopologyParams p;
  p.n = 4;
  p.level = 1;
  const Topology t = build_dcell(p);
  CHECK(count_servers(t) == 20);  // 5 cells of 4
  CHECK(t.nodes.size() == 25);
  CHECK(t.links.size() == 30);    // 20 access + C(5,2) cross links
  CHECK(validate_topology(t).ok());
  // The canonical DCell wiring: cell i's server j-1 pairs with cell j's server i.
  const NodeId c0s1 = *t.node_by_label("cell0.srv1");
  const NodeId c2s0 = *t.node_by_label("cell2.srv0");
  bool found = false;
  for (const auto& l : t.links)
    if ((l.a == c0s1 && l.b == c2s0) || (l.a == c2s0 && l.b == c0s1)) found = true;
  CHECK(found);
}

TEST_CASE("c-through generator produces the expected shape") {
  TopologyParams p;
  p.racks = 4;
  p.servers_per_rack = 4;
  const Topology t = build_c_through(p);
  CHECK(count_servers(t) == 16);
  CHECK(t.nodes.size() == 21);    // servers + 4 ToR + electrical agg
  CHECK(t.links.size() == 26);    // 16 + 4 + C(4,2) optical candidates
  REQUIRE(t.groups.size() == 1);
  CHECK(t.groups[0].members.size() == 6);
  for (const auto& [node, k] : t.groups[0].budgets) CHECK(k == 1);
  CHECK(t.groups[0].budgets.size() == 4);
  CHECK(validate_topology(t).ok());
  // Optical candidates carry the group id; access links do not.
  for (LinkId lid : t.groups[0].members)
    CHECK(t.find_link(lid)->optical_group == t.groups[0].id);
  int optical = 0;
  for (const auto& l : t.links) optical += l.optical_group.has_value() ? 1 : 0;
  CHECK(optical == 6);
}

TEST_CASE("helios generator produces the expected shape") {
  TopologyParams p;
  p.pods = 4;
  p.servers_per_pod = 4;
  p.optical_capacity_mbps = 2000.0;
  const Topology t = build_helios(p);
  CHECK(t.nodes.size() == 21);
  CHECK(t.links.size() == 26);
  REQUIRE(t.groups.size() == 1);
  for (const auto& [node, k] : t.groups[0].budgets) CHECK(k == 2);
  for (LinkId lid : t.groups[0].members)
    CHECK(t.find_link(lid)->capacity_mbps == 2000.0);
  CHECK(validate_topology(t).ok());
}

TEST_CASE("pon generator is passive and dual-homed") {
  TopologyParams p;
  p.racks = 2;
  p.groups_per_rack = 2;
  p.servers_per_group = 2;
  const Topology t = build_pon_servercentric(p);
  CHECK(count_servers(t) == 8);
  CHECK(count_kind(t, NodeKind::PonComponent) == 3);  // 2 rack stars + core
  CHECK(t.nodes.size() == 11);
  CHECK(t.links.size() == 20);  // 8*2 homing + 4 intra-group pairs
  for (const auto& n : t.nodes)
    if (n.kind == NodeKind::PonComponent) {
      CHECK(n.power_active_w == 0.0);
      CHECK(n.power_idle_w == 0.0);
    }
  CHECK(validate_topology(t).ok());
}

TEST_CASE("power profile annotates nodes by kind") {
  TopologyParams p;
  p.power.switch_active_w = 150.0;
  p.power.switch_idle_w = 60.0;
  p.power.server_nic_w = 10.0;
  const Topology t = build_spine_leaf(p);
  for (const auto& n : t.nodes) {
    if (is_server(n.kind)) {
      CHECK(n.power_active_w == 10.0);
      CHECK(n.power_idle_w == 10.0);
    } else {
      CHECK(n.power_active_w == 150.0);
      CHECK(n.power_idle_w == 60.0);
    }
  }
}

TEST_CASE("build_topology dispatches by family tag") {
  TopologyParams p;
  CHECK(build_topology("spine-leaf", p).arch_tag == "spine-leaf");
  CHECK(build_topology("fat-tree", p).arch_tag == "fat-tree");
  CHECK(build_topology("bcube", p).arch_tag == "bcube");
  CHECK(build_topology("dcell", p).arch_tag == "dcell");
  CHECK(build_topology("c-through", p).arch_tag == "c-through");
  CHECK(build_topology("helios", p).arch_tag == "helios");
  CHECK(build_topology("pon-servercentric", p).arch_tag == "pon-servercentric");
  CHECK_THROWS_AS(build_topology("clos", p), ParameterError);
}

TEST_CASE("fingerprints are stable and sensitive") {
  TopologyParams p;
  const Topology a = build_fat_tree(p);
  const Topology b = build_fat_tree(p);
  CHECK(a.fingerprint() == b.fingerprint());
  TopologyParams q = p;
  q.link_capacity_mbps = 500.0;
  CHECK(a.fingerprint() != build_fat_tree(q).fingerprint());
}

TEST_CASE("topology JSON round-trips exactly") {
  TopologyParams p;
  p.racks = 3;
  p.servers_per_rack = 2;
  const Topology t = build_c_through(p);
  const Topology back = topology_from_json(topology_to_json(t));
  CHECK(back.fingerprint() == t.fingerprint());
  CHECK(back.arch_tag == t.arch_tag);
  CHECK(back.groups.size() == t.groups.size());
  CHECK(back.link_id_limit == t.link_id_limit);
}

TEST_CASE("topology file I/O") {
  const Topology t = testutil::parallel_topology();
  const std::string path = "topo_io_test.json";
  save_topology(t, path);
  const Topology back = load_topology(path);
  CHECK(back.fingerprint() == t.fingerprint());
  CHECK_THROWS_AS(load_topology("does_not_exist.json"), IoError);
  std::remove(path.c_str());
}

TEST_CASE("link labels resolve in either orientation") {
  const Topology t = testutil::line_topology();
  const Link& l = t.links[0];
  CHECK(link_label(t, l) == "a--s");
  CHECK(detail::resolve_link_label(t, "a--s") == l.id);
  CHECK(detail::resolve_link_label(t, "s--a") == l.id);
  CHECK_THROWS_AS(detail::resolve_link_label(t, "a--zzz"), ParseError);
}

TEST_CASE("validate_topology flags broken documents") {
  Topology t = testutil::line_topology();
  t.links[0].capacity_mbps = -5.0;
  CHECK_FALSE(validate_topology(t).ok());

  Topology t2 = testutil::line_topology();
  t2.links[0].b = 99;  // dangling endpoint
  CHECK_FALSE(validate_topology(t2).ok());

  Topology t3 = testutil::line_topology();
  t3.nodes[2].power_idle_w = t3.nodes[2].power_active_w + 1;  // idle above active
  CHECK_FALSE(validate_topology(t3).ok());
}
