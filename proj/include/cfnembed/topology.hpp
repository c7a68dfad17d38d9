// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CFNEMBED_TOPOLOGY_HPP
#define CFNEMBED_TOPOLOGY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cfn {

using NodeIndex = std::int32_t;

enum class NodeKind
{
    IoT,
    ONU,
    OLT,
    AccessRouter,
    MetroRouter,
    MetroSwitch,
    CoreIpWdm,
    AF,
    MF,
    CDC,
};

std::string_view to_string(NodeKind kind);
NodeKind node_kind_from_string(std::string_view text);

/// True for the kinds that host VMs: IoT, AF, MF and CDC.
bool is_processing_kind(NodeKind kind);

/// Power profile of a network device (capacity in Gbps) or of a single
/// server (capacity in GFLOPS).
struct DeviceProfile
{
    std::string name;
    double max_power = 0.0;
    double idle_power = 0.0;
    double capacity = 0.0;
    bool shared = false;

    bool operator==(const DeviceProfile&) const = default;
};

/// LAN fabric inside a processing node. Capacity in Gbps.
struct LanProfile
{
    double max_power = 0.0;
    double idle_power = 0.0;
    double capacity = 0.0;
    bool shared = false;

    bool operator==(const LanProfile&) const = default;
};

/// W per Gbps for network devices, W per GFLOPS for servers.
double energy_per_bit(const DeviceProfile& profile);
double energy_per_bit(const LanProfile& profile);

struct Node
{
    std::string id;
    NodeKind kind = NodeKind::IoT;
    std::optional<DeviceProfile> device; // network role
    std::optional<DeviceProfile> server; // processing role
    int server_count_max = 0;
    std::optional<LanProfile> lan;
    double pue_net = 1.0;
    double pue_pr = 1.0;
    std::optional<int> zone;

    bool is_processing() const { return server.has_value(); }
    bool is_network() const { return device.has_value(); }

    bool operator==(const Node&) const = default;
};

struct CfnTopology
{
    std::vector<Node> nodes;
    std::vector<std::pair<std::string, std::string>> links;
    double idle_share_delta = 0.03;

    bool operator==(const CfnTopology&) const = default;
};

struct Violation
{
    std::string code;    // e.g. "duplicate id", "disconnected"
    std::string message; // human-readable, names the offending ids
};

using ValidationReport = std::vector<Violation>;

/// Empty iff every structural and profile invariant of the topology holds.
ValidationReport validate_topology(const CfnTopology& topology);

/// Parameters of the reference four-layer IoT / access fog / metro fog / cloud
/// hierarchy. Every device profile can be overridden.
struct DefaultTopologyConfig
{
    int iot_count = 20;
    int zone_count = 4;
    std::uint64_t seed = 7;
    int core_nodes = 2;
    double idle_share_delta = 0.03;

    DeviceProfile iot_server{"IoT (Rpi 4 B 4GB)", 7.3, 2.56, 13.5, false};
    DeviceProfile af_server{"AF Server (Intel i5-3427U)", 37.2, 13.8, 34.5, false};
    DeviceProfile mf_server{"MF Server (Intel i5-3427U)", 37.2, 13.8, 34.5, false};
    DeviceProfile cdc_server{"CDC (Intel Xeon E5-2640)", 298.0, 58.7, 428.0, false};

    DeviceProfile onu{"ONU AP (Wi-Fi)", 15.0, 9.0, 10.0, false};
    DeviceProfile olt{"OLT", 1940.0, 60.0, 8600.0, true};
    DeviceProfile access_router{"Access Router", 30.0, 27.0, 40.0, false};
    DeviceProfile metro_router{"Metro Router Port", 30.0, 27.0, 40.0, true};
    DeviceProfile metro_switch{"Metro Switch", 470.0, 423.0, 600.0, true};
    // 0.14 W/Gbps is the published efficiency; capacity follows from it.
    DeviceProfile core{"IP/WDM Node", 878.0, 790.0, (878.0 - 790.0) / 0.14, true};

    LanProfile af_lan{470.0, 423.0, 600.0, false};
    LanProfile mf_lan{470.0, 423.0, 600.0, false};
    LanProfile cdc_lan{470.0, 423.0, 600.0, true};

    int ns_iot = 1;
    int ns_af = 5;
    int ns_mf = 10;
    int ns_cdc = 1000;

    double pue_af = 1.25;
    double pue_mf = 1.35;
    double pue_cdc = 1.12;
    double pue_core = 1.5;
    double pue_other = 1.0;
};

/// Builds the reference hierarchy:
///   iot_NN -- onu_Z -- olt -- access_router -- af
///                       olt -- metro_router -- metro_switch -- mf
///                                              metro_switch -- core_1 -- ... -- core_K -- cdc
/// IoT devices are spread evenly over the zones in a seeded random order.
CfnTopology build_default_cfn(const DefaultTopologyConfig& config = {});

struct Route
{
    std::vector<NodeIndex> nodes; // b ... e inclusive; empty when b == e
    double cost = 0.0;            // sum of PUE_net * energy_per_bit over metered nodes
};

/// Validated, indexed view of a topology with precomputed routes between
/// processing nodes. Immutable after construction.
class Substrate
{
public:
    /// Throws ConfigError listing every violation when the topology is invalid.
    explicit Substrate(CfnTopology topology);

    const CfnTopology& topology() const { return topology_; }
    std::size_t size() const { return topology_.nodes.size(); }
    const Node& node(NodeIndex i) const { return topology_.nodes[static_cast<std::size_t>(i)]; }
    double idle_share_delta() const { return topology_.idle_share_delta; }

    std::optional<NodeIndex> find(std::string_view id) const;
    NodeIndex index_of(std::string_view id) const; // throws InputError

    const std::vector<NodeIndex>& neighbors(NodeIndex i) const { return adjacency_[static_cast<std::size_t>(i)]; }
    bool adjacent(NodeIndex a, NodeIndex b) const;

    const std::vector<NodeIndex>& processing_nodes() const { return processing_; }
    const std::vector<NodeIndex>& network_nodes() const { return metered_; }

    /// A node is metered by the network power term when it has a network
    /// role and no processing role.
    bool is_metered(NodeIndex i) const { return metered_flag_[static_cast<std::size_t>(i)]; }

    /// Routing weight of a node: PUE_net * energy_per_bit for metered nodes, 0 otherwise.
    double weight(NodeIndex i) const { return weight_[static_cast<std::size_t>(i)]; }

    /// Precomputed minimum-power route between two processing nodes.
    const Route& route(NodeIndex b, NodeIndex e) const;

    /// Metered nodes on the precomputed route between two processing nodes.
    const std::vector<NodeIndex>& route_metered(NodeIndex b, NodeIndex e) const;

    /// Minimum-power path between any two nodes; ties broken by hop count and
    /// then by the lexicographically smallest id sequence. Throws NoPathError.
    Route min_power_path(NodeIndex b, NodeIndex e) const;

private:
    std::size_t pair_slot(NodeIndex b, NodeIndex e) const;
    Route extract_path(NodeIndex b, NodeIndex e, const std::vector<double>& dist,
                       const std::vector<int>& hops) const;
    void distances_to(NodeIndex e, std::vector<double>& dist, std::vector<int>& hops) const;

    CfnTopology topology_;
    std::unordered_map<std::string, NodeIndex> index_;
    std::vector<std::vector<NodeIndex>> adjacency_;
    std::vector<NodeIndex> processing_;
    std::vector<NodeIndex> metered_;
    std::vector<bool> metered_flag_;
    std::vector<double> weight_;
    std::vector<int> processing_slot_;
    std::vector<Route> routes_;
    std::vector<std::vector<NodeIndex>> routes_metered_;
};

/// Convenience: id-level path query on a raw topology.
std::vector<std::string> min_power_path(const Substrate& substrate, std::string_view from, std::string_view to);

} // namespace cfn

#endif
