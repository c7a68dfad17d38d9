// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/topology.hpp"

#include "cfnembed/errors.hpp"
#include "rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

namespace cfn {

CapacityExceeded::CapacityExceeded(std::string node_id, std::string resource, double required, double available)
    : Error("capacity exceeded at node '" + node_id + "': " + resource + " requires " + std::to_string(required)
            + " but only " + std::to_string(available) + " is available"),
      node_id_(std::move(node_id)),
      resource_(std::move(resource)),
      required_(required),
      available_(available)
{
}

SearchSpaceTooLarge::SearchSpaceTooLarge(double estimate, std::uint64_t limit)
    : Error([&] {
          char buf[160];
          std::snprintf(buf, sizeof buf, "search space of %.4g configurations exceeds the limit of %llu", estimate,
                        static_cast<unsigned long long>(limit));
          return std::string(buf);
      }()),
      estimate_(estimate)
{
}

namespace {

constexpr std::array<std::pair<NodeKind, std::string_view>, 10> kKindNames{{
    {NodeKind::IoT, "IoT"},
    {NodeKind::ONU, "ONU"},
    {NodeKind::OLT, "OLT"},
    {NodeKind::AccessRouter, "AccessRouter"},
    {NodeKind::MetroRouter, "MetroRouter"},
    {NodeKind::MetroSwitch, "MetroSwitch"},
    {NodeKind::CoreIpWdm, "CoreIpWdm"},
    {NodeKind::AF, "AF"},
    {NodeKind::MF, "MF"},
    {NodeKind::CDC, "CDC"},
}};

bool profile_ok(double max_power, double idle_power, double capacity)
{
    return std::isfinite(max_power) && std::isfinite(idle_power) && std::isfinite(capacity)
        && max_power >= idle_power && idle_power >= 0.0 && capacity > 0.0;
}

std::string zero_padded(int value, int width)
{
    std::string s = std::to_string(value);
    if (static_cast<int>(s.size()) < width)
        s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
    return s;
}

} // namespace

std::string_view to_string(NodeKind kind)
{
    for (const auto& [k, name] : kKindNames)
        if (k == kind)
            return name;
    return "?";
}

NodeKind node_kind_from_string(std::string_view text)
{
    for (const auto& [k, name] : kKindNames)
        if (name == text)
            return k;
    throw ParseError("unknown node kind '" + std::string(text) + "'");
}

bool is_processing_kind(NodeKind kind)
{
    return kind == NodeKind::IoT || kind == NodeKind::AF || kind == NodeKind::MF || kind == NodeKind::CDC;
}

double energy_per_bit(const DeviceProfile& profile)
{
    return (profile.max_power - profile.idle_power) / profile.capacity;
}

double energy_per_bit(const LanProfile& profile)
{
    return (profile.max_power - profile.idle_power) / profile.capacity;
}

ValidationReport validate_topology(const CfnTopology& t)
{
    ValidationReport report;
    auto add = [&](std::string code, std::string message) { report.push_back({std::move(code), std::move(message)}); };

    if (!(t.idle_share_delta >= 0.0 && t.idle_share_delta <= 1.0))
        add("invalid delta", "idle_share_delta must lie in [0, 1]");

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const Node& n = t.nodes[i];
        if (n.id.empty())
            add("empty id", "node #" + std::to_string(i) + " has an empty id");
        if (!index.emplace(n.id, i).second)
            add("duplicate id", "node id '" + n.id + "' is used more than once");

        const bool processing_kind = is_processing_kind(n.kind);
        if (processing_kind != n.is_processing())
            add("role mismatch", "node '" + n.id + "' of kind " + std::string(to_string(n.kind))
                                     + (processing_kind ? " lacks a server profile" : " must not carry a server profile"));
        if (!processing_kind && !n.is_network())
            add("role mismatch", "network node '" + n.id + "' lacks a device profile");
        if (n.device && !profile_ok(n.device->max_power, n.device->idle_power, n.device->capacity))
            add("invalid profile", "device profile of '" + n.id + "' violates max >= idle >= 0, capacity > 0");
        if (n.server) {
            if (!profile_ok(n.server->max_power, n.server->idle_power, n.server->capacity))
                add("invalid profile", "server profile of '" + n.id + "' violates max >= idle >= 0, capacity > 0");
            if (n.server_count_max < 1)
                add("invalid server count", "processing node '" + n.id + "' needs server_count_max >= 1");
        }
        if (n.lan && !profile_ok(n.lan->max_power, n.lan->idle_power, n.lan->capacity))
            add("invalid profile", "LAN profile of '" + n.id + "' violates max >= idle >= 0, capacity > 0");
        if (!(n.pue_net >= 1.0) || !(n.pue_pr >= 1.0))
            add("invalid pue", "node '" + n.id + "' has a PUE below 1");
    }

    std::vector<std::vector<std::size_t>> adj(t.nodes.size());
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& [a, b] : t.links) {
        const auto ia = index.find(a);
        const auto ib = index.find(b);
        if (ia == index.end() || ib == index.end()) {
            add("unknown endpoint", "link " + a + " -- " + b + " references an unknown node");
            continue;
        }
        if (a == b) {
            add("self-loop", "link " + a + " -- " + b + " is a self-loop");
            continue;
        }
        if (!seen.emplace(std::min(a, b), std::max(a, b)).second)
            add("duplicate link", "link " + a + " -- " + b + " appears more than once");
        adj[ia->second].push_back(ib->second);
        adj[ib->second].push_back(ia->second);
    }

    if (!t.nodes.empty()) {
        std::vector<bool> reached(t.nodes.size(), false);
        std::vector<std::size_t> stack{0};
        reached[0] = true;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t u : adj[v])
                if (!reached[u]) {
                    reached[u] = true;
                    stack.push_back(u);
                }
        }
        std::string unreached;
        for (std::size_t i = 0; i < t.nodes.size(); ++i)
            if (!reached[i])
                unreached += (unreached.empty() ? "" : ", ") + t.nodes[i].id;
        if (!unreached.empty())
            add("disconnected", "nodes not reachable from '" + t.nodes[0].id + "': " + unreached);
    }
    return report;
}

CfnTopology build_default_cfn(const DefaultTopologyConfig& c)
{
    if (c.iot_count < 1 || c.zone_count < 1 || c.core_nodes < 1)
        throw ConfigError("default topology needs iot_count >= 1, zone_count >= 1 and core_nodes >= 1");

    CfnTopology t;
    t.idle_share_delta = c.idle_share_delta;

    auto network = [&](std::string id, NodeKind kind, const DeviceProfile& p, double pue,
                       std::optional<int> zone = std::nullopt) {
        Node n;
        n.id = std::move(id);
        n.kind = kind;
        n.device = p;
        n.pue_net = n.pue_pr = pue;
        n.zone = zone;
        t.nodes.push_back(std::move(n));
    };
    auto processing = [&](std::string id, NodeKind kind, const DeviceProfile& server, int count,
                          std::optional<LanProfile> lan, double pue, std::optional<int> zone = std::nullopt) {
        Node n;
        n.id = std::move(id);
        n.kind = kind;
        n.server = server;
        n.server_count_max = count;
        n.lan = lan;
        n.pue_net = n.pue_pr = pue;
        n.zone = zone;
        t.nodes.push_back(std::move(n));
    };
    auto link = [&](const std::string& a, const std::string& b) { t.links.emplace_back(a, b); };

    // Even spread over zones, shuffled so that device numbering does not
    // reveal the zone.
    std::vector<int> zone_of(static_cast<std::size_t>(c.iot_count));
    for (int i = 0; i < c.iot_count; ++i)
        zone_of[static_cast<std::size_t>(i)] = 1 + i % c.zone_count;
    detail::Rng rng(c.seed);
    for (std::size_t i = zone_of.size(); i > 1; --i)
        std::swap(zone_of[i - 1], zone_of[rng.below(i)]);

    const int width = std::max(2, static_cast<int>(std::to_string(c.iot_count).size()));
    for (int i = 0; i < c.iot_count; ++i) {
        const int z = zone_of[static_cast<std::size_t>(i)];
        const std::string id = "iot_" + zero_padded(i + 1, width);
        processing(id, NodeKind::IoT, c.iot_server, c.ns_iot, std::nullopt, c.pue_other, z);
        link(id, "onu_" + std::to_string(z));
    }
    for (int z = 1; z <= c.zone_count; ++z) {
        network("onu_" + std::to_string(z), NodeKind::ONU, c.onu, c.pue_other, z);
        link("onu_" + std::to_string(z), "olt");
    }
    network("olt", NodeKind::OLT, c.olt, c.pue_other);

    network("access_router", NodeKind::AccessRouter, c.access_router, c.pue_other);
    processing("af", NodeKind::AF, c.af_server, c.ns_af, c.af_lan, c.pue_af);
    link("olt", "access_router");
    link("access_router", "af");

    network("metro_router", NodeKind::MetroRouter, c.metro_router, c.pue_other);
    network("metro_switch", NodeKind::MetroSwitch, c.metro_switch, c.pue_other);
    processing("mf", NodeKind::MF, c.mf_server, c.ns_mf, c.mf_lan, c.pue_mf);
    link("olt", "metro_router");
    link("metro_router", "metro_switch");
    link("metro_switch", "mf");

    std::string previous = "metro_switch";
    for (int k = 1; k <= c.core_nodes; ++k) {
        const std::string id = "core_" + std::to_string(k);
        network(id, NodeKind::CoreIpWdm, c.core, c.pue_core);
        link(previous, id);
        previous = id;
    }
    processing("cdc", NodeKind::CDC, c.cdc_server, c.ns_cdc, c.cdc_lan, c.pue_cdc);
    link(previous, "cdc");
    return t;
}

// --- Substrate -------------------------------------------------------------

Substrate::Substrate(CfnTopology topology) : topology_(std::move(topology))
{
    const ValidationReport report = validate_topology(topology_);
    if (!report.empty()) {
        std::string msg = "invalid topology:";
        for (const auto& v : report)
            msg += "\n  [" + v.code + "] " + v.message;
        throw ConfigError(msg);
    }

    const std::size_t n = topology_.nodes.size();
    adjacency_.resize(n);
    metered_flag_.assign(n, false);
    weight_.assign(n, 0.0);
    processing_slot_.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const Node& node = topology_.nodes[i];
        index_.emplace(node.id, static_cast<NodeIndex>(i));
        if (node.is_processing()) {
            processing_slot_[i] = static_cast<int>(processing_.size());
            processing_.push_back(static_cast<NodeIndex>(i));
        } else if (node.is_network()) {
            metered_flag_[i] = true;
            metered_.push_back(static_cast<NodeIndex>(i));
            weight_[i] = node.pue_net * energy_per_bit(*node.device);
        }
    }
    for (const auto& [a, b] : topology_.links) {
        const NodeIndex ia = index_.at(a);
        const NodeIndex ib = index_.at(b);
        adjacency_[static_cast<std::size_t>(ia)].push_back(ib);
        adjacency_[static_cast<std::size_t>(ib)].push_back(ia);
    }
    for (auto& list : adjacency_)
        std::sort(list.begin(), list.end(), [&](NodeIndex x, NodeIndex y) { return node(x).id < node(y).id; });

    const std::size_t p = processing_.size();
    routes_.resize(p * p);
    routes_metered_.resize(p * p);
    std::vector<double> dist;
    std::vector<int> hops;
    for (NodeIndex e : processing_) {
        distances_to(e, dist, hops);
        for (NodeIndex b : processing_) {
            if (b == e)
                continue;
            Route r = extract_path(b, e, dist, hops);
            std::vector<NodeIndex> metered;
            for (NodeIndex v : r.nodes)
                if (is_metered(v))
                    metered.push_back(v);
            routes_metered_[pair_slot(b, e)] = std::move(metered);
            routes_[pair_slot(b, e)] = std::move(r);
        }
    }
}

std::optional<NodeIndex> Substrate::find(std::string_view id) const
{
    const auto it = index_.find(std::string(id));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

NodeIndex Substrate::index_of(std::string_view id) const
{
    if (auto i = find(id))
        return *i;
    throw InputError("unknown node id '" + std::string(id) + "'");
}

bool Substrate::adjacent(NodeIndex a, NodeIndex b) const
{
    const auto& list = neighbors(a);
    return std::find(list.begin(), list.end(), b) != list.end();
}

std::size_t Substrate::pair_slot(NodeIndex b, NodeIndex e) const
{
    const int sb = processing_slot_[static_cast<std::size_t>(b)];
    const int se = processing_slot_[static_cast<std::size_t>(e)];
    if (sb < 0 || se < 0)
        throw InputError("route requested between non-processing nodes");
    return static_cast<std::size_t>(sb) * processing_.size() + static_cast<std::size_t>(se);
}

const Route& Substrate::route(NodeIndex b, NodeIndex e) const
{
    return routes_[pair_slot(b, e)];
}

const std::vector<NodeIndex>& Substrate::route_metered(NodeIndex b, NodeIndex e) const
{
    return routes_metered_[pair_slot(b, e)];
}

// Node-weighted Dijkstra towards e. dist[v] includes the weights of v and e;
// hops[v] is the hop count of the cheapest path (fewest hops among ties).
void Substrate::distances_to(NodeIndex e, std::vector<double>& dist, std::vector<int>& hops) const
{
    const std::size_t n = size();
    dist.assign(n, std::numeric_limits<double>::infinity());
    hops.assign(n, std::numeric_limits<int>::max());
    using Item = std::tuple<double, int, NodeIndex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[static_cast<std::size_t>(e)] = weight(e);
    hops[static_cast<std::size_t>(e)] = 0;
    queue.emplace(weight(e), 0, e);
    while (!queue.empty()) {
        auto [d, h, v] = queue.top();
        queue.pop();
        if (d > dist[static_cast<std::size_t>(v)]
            || (d == dist[static_cast<std::size_t>(v)] && h > hops[static_cast<std::size_t>(v)]))
            continue;
        for (NodeIndex u : neighbors(v)) {
            const double nd = d + weight(u);
            const int nh = h + 1;
            auto& du = dist[static_cast<std::size_t>(u)];
            auto& hu = hops[static_cast<std::size_t>(u)];
            if (nd < du || (nd == du && nh < hu)) {
                du = nd;
                hu = nh;
                queue.emplace(nd, nh, u);
            }
        }
    }
}

Route Substrate::extract_path(NodeIndex b, NodeIndex e, const std::vector<double>& dist,
                              const std::vector<int>& hops) const
{
    Route r;
    if (b == e)
        return r;
    if (!std::isfinite(dist[static_cast<std::size_t>(b)]))
        throw NoPathError("no path between '" + node(b).id + "' and '" + node(e).id + "'");
    r.cost = dist[static_cast<std::size_t>(b)];
    NodeIndex v = b;
    r.nodes.push_back(v);
    while (v != e) {
        const double rest = dist[static_cast<std::size_t>(v)];
        const int want_hops = hops[static_cast<std::size_t>(v)] - 1;
        NodeIndex next = -1;
        // Neighbours are sorted by id, so the first match is the lexicographic choice.
        for (NodeIndex u : neighbors(v)) {
            if (hops[static_cast<std::size_t>(u)] != want_hops)
                continue;
            const double via = weight(v) + dist[static_cast<std::size_t>(u)];
            if (std::abs(via - rest) <= 1e-12 * std::max(1.0, std::abs(rest))) {
                next = u;
                break;
            }
        }
        if (next < 0)
            throw NoPathError("route reconstruction failed between '" + node(b).id + "' and '" + node(e).id + "'");
        v = next;
        r.nodes.push_back(v);
    }
    return r;
}

Route Substrate::min_power_path(NodeIndex b, NodeIndex e) const
{
    if (b < 0 || e < 0 || static_cast<std::size_t>(b) >= size() || static_cast<std::size_t>(e) >= size())
        throw InputError("node index out of range");
    if (b == e)
        return {};
    if (processing_slot_[static_cast<std::size_t>(b)] >= 0 && processing_slot_[static_cast<std::size_t>(e)] >= 0)
        return route(b, e);
    std::vector<double> dist;
    std::vector<int> hops;
    distances_to(e, dist, hops);
    return extract_path(b, e, dist, hops);
}

std::vector<std::string> min_power_path(const Substrate& substrate, std::string_view from, std::string_view to)
{
    const Route r = substrate.min_power_path(substrate.index_of(from), substrate.index_of(to));
    std::vector<std::string> ids;
    ids.reserve(r.nodes.size());
    for (NodeIndex v : r.nodes)
        ids.push_back(substrate.node(v).id);
    return ids;
}

} // namespace cfn
