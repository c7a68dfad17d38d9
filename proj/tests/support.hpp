// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CFNEMBED_TESTS_SUPPORT_HPP
#define CFNEMBED_TESTS_SUPPORT_HPP

#include "cfnembed/harness.hpp"

#include <string>
#include <vector>

namespace cfn::test {

inline Node network_node(std::string id, NodeKind kind, DeviceProfile device, double pue = 1.0)
{
    Node n;
    n.id = std::move(id);
    n.kind = kind;
    n.device = device;
    n.pue_net = pue;
    return n;
}

inline Node processing_node(std::string id, NodeKind kind, DeviceProfile server, int servers,
                            std::optional<LanProfile> lan = std::nullopt, double pue = 1.0)
{
    Node n;
    n.id = std::move(id);
    n.kind = kind;
    n.server = server;
    n.server_count_max = servers;
    n.lan = lan;
    n.pue_pr = pue;
    return n;
}

/// Default hierarchy shrunk to `iot` devices in `zones` zones.
inline CfnTopology small_cfn(int iot = 3, int zones = 2, std::uint64_t seed = 1)
{
    DefaultTopologyConfig c;
    c.iot_count = iot;
    c.zone_count = zones;
    c.seed = seed;
    return build_default_cfn(c);
}

/// Chain input -> vm1 -> ... with the given demands (first is the input).
inline Vsr chain(int id, std::vector<double> flops, std::vector<double> mbps, std::string source = "iot_01")
{
    Vsr v;
    v.id = id;
    v.source_iot = std::move(source);
    for (std::size_t i = 0; i < flops.size(); ++i)
        v.vms.push_back({static_cast<int>(i), flops[i], i == 0});
    for (std::size_t i = 0; i + 1 < flops.size(); ++i)
        v.vlinks.push_back({static_cast<int>(i), static_cast<int>(i + 1), mbps[i]});
    return v;
}

inline std::vector<Vsr> random_batch(const CfnTopology& t, int vsrs, std::uint64_t seed,
                                     VlinkPattern pattern = VlinkPattern::Chain)
{
    WorkloadSpec w;
    w.vsr_count = vsrs;
    w.seed = seed;
    w.vlink_pattern = pattern;
    return generate_vsrs(w, t);
}

inline NodeIndex idx(const Substrate& s, const std::string& id) { return s.index_of(id); }

} // namespace cfn::test

#endif
