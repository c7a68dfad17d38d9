// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CFNEMBED_POWER_HPP
#define CFNEMBED_POWER_HPP

#include "cfnembed/topology.hpp"
#include "cfnembed/workload.hpp"

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cfn {

/// How traffic crossing a network node is metered.
///   PaperLiteral: inflow plus outflow, except outflow into the destination
///                 node (a transit node is metered on entry and on exit).
///   CountOnce:    inflow plus traffic sourced at the node.
enum class TrafficCounting
{
    PaperLiteral,
    CountOnce,
};

std::string_view to_string(TrafficCounting counting);
TrafficCounting traffic_counting_from_string(std::string_view text);

struct PowerOptions
{
    TrafficCounting counting = TrafficCounting::PaperLiteral;
};

/// Absolute tolerance on capacity comparisons and watt equality.
inline constexpr double kTolerance = 1e-9;

using NodePair = std::pair<NodeIndex, NodeIndex>;

/// Assignment of every VM to a processing node. `assign[i][j]` is the node of
/// VM j of the i-th VSR of the batch the placement belongs to. `routes` may
/// override the default minimum-power route for a node pair.
struct Placement
{
    std::vector<std::vector<NodeIndex>> assign;
    std::map<NodePair, std::vector<NodeIndex>> routes;

    bool operator==(const Placement&) const = default;
};

/// Builds a placement from (vsr position, vm id) -> node id entries.
Placement make_placement(const Substrate& substrate, std::span<const Vsr> vsrs,
                         const std::map<std::pair<int, int>, std::string>& assignment);

/// Fills `routes` with the default route for every node pair carrying traffic.
void complete_routes(const Substrate& substrate, std::span<const Vsr> vsrs, Placement& placement);

/// Throws InputError unless every VM is assigned to a processing node, every
/// input VM sits on its VSR's source device and every explicit route is a
/// path of the topology between the right endpoints.
void check_placement(const Substrate& substrate, std::span<const Vsr> vsrs, const Placement& placement);

/// Inter-node traffic in Mbps keyed by (source node, destination node).
/// Co-located virtual links are not part of the map.
std::map<NodePair, double> aggregate_traffic(const Placement& placement, std::span<const Vsr> vsrs);

/// ceil(omega / capacity); throws CapacityExceeded when more than ns_max
/// servers would be needed.
int servers_required(double omega, const DeviceProfile& server, int ns_max, const std::string& node_id = {});

/// Per-unit traffic multiplier of each node along a route b = v0 ... vk = e.
/// Only metered nodes receive a multiplier.
std::vector<std::pair<NodeIndex, int>> route_meter_counts(const Substrate& substrate,
                                                          std::span<const NodeIndex> path, TrafficCounting counting);

struct NodeUsage
{
    double lambda_n = 0.0; // Gbps metered at a network node
    double omega_p = 0.0;  // GFLOPS hosted at a processing node
    double theta_p = 0.0;  // Gbps through the node's LAN
    int n_servers = 0;
    bool beta = false;     // network node active
    bool phi = false;      // processing node active
    double power = 0.0;    // total watts attributed to the node

    bool operator==(const NodeUsage&) const = default;
};

struct PowerBreakdown
{
    double net_proportional = 0.0;
    double net_idle = 0.0;
    double pr_proportional = 0.0;
    double pr_idle = 0.0;
    double lan_proportional = 0.0;
    double lan_idle = 0.0;
    double total = 0.0;
    std::vector<NodeUsage> per_node; // indexed by NodeIndex

    double network() const { return net_proportional + net_idle; }
    double processing() const { return pr_proportional + pr_idle; }
    double lan() const { return lan_proportional + lan_idle; }

    bool operator==(const PowerBreakdown&) const = default;
};

struct NetworkPower
{
    double watts = 0.0;
    double proportional = 0.0;
    double idle = 0.0;
    std::vector<double> lambda; // Gbps per node
    std::vector<bool> beta;
};

struct ProcessingPower
{
    double watts = 0.0;
    double proportional = 0.0;
    double idle = 0.0;
    double lan_proportional = 0.0;
    double lan_idle = 0.0;
    std::vector<double> omega; // GFLOPS per node
    std::vector<double> theta; // Gbps per node
    std::vector<int> servers;
    std::vector<bool> phi;
};

// Single-node cost terms shared by the evaluator, the MILP and the solvers.
struct NetworkNodeTerms
{
    double proportional = 0.0;
    double idle = 0.0;
};
NetworkNodeTerms network_node_terms(const Node& node, double lambda_gbps, double delta);

struct ProcessingNodeTerms
{
    double proportional = 0.0;
    double idle = 0.0;
    double lan_proportional = 0.0;
    double lan_idle = 0.0;
    int servers = 0;
    bool active = false;
};
/// Unchecked: the caller guarantees omega and theta fit the node.
ProcessingNodeTerms processing_node_terms(const Node& node, double omega, double theta_gbps, double delta);

/// Server count without the capacity check.
int servers_for(double omega, double server_capacity);

/// Idle power of a network device or LAN after idle-share proration.
double effective_idle(const DeviceProfile& profile, double delta);
double effective_idle(const LanProfile& profile, double delta);

NetworkPower network_power(const Substrate& substrate, std::span<const Vsr> vsrs, const Placement& placement,
                           const PowerOptions& options = {});

ProcessingPower processing_power(const Substrate& substrate, std::span<const Vsr> vsrs, const Placement& placement);

/// Total power of a placement. Throws InputError for malformed placements
/// and CapacityExceeded naming the first overloaded node.
PowerBreakdown evaluate_placement(const Substrate& substrate, std::span<const Vsr> vsrs, const Placement& placement,
                                  const PowerOptions& options = {});

namespace detail {
/// Non-throwing variant for hot loops; returns false and fills `failure` on
/// capacity violations. Placement structure is not re-checked.
bool evaluate_unchecked(const Substrate& substrate, std::span<const Vsr> vsrs, const Placement& placement,
                        const PowerOptions& options, PowerBreakdown& out, std::string* failure);
} // namespace detail

} // namespace cfn

#endif
