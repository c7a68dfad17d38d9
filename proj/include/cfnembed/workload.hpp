// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CFNEMBED_WORKLOAD_HPP
#define CFNEMBED_WORKLOAD_HPP

#include "cfnembed/topology.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cfn {

struct VmNode
{
    int id = 0;                // index within the VSR
    double flops_demand = 0.0; // GFLOPS
    bool is_input = false;

    bool operator==(const VmNode&) const = default;
};

struct VirtualLink
{
    int src = 0;
    int dst = 0;
    double bitrate = 0.0; // Mbps

    bool operator==(const VirtualLink&) const = default;
};

/// Virtual service request: a weakly connected VM digraph whose input VM is
/// pinned to the IoT device `source_iot`.
struct Vsr
{
    int id = 0;
    std::vector<VmNode> vms;
    std::vector<VirtualLink> vlinks;
    std::string source_iot;

    int input_vm() const; // -1 when there is none
    bool operator==(const Vsr&) const = default;
};

enum class VlinkPattern
{
    Chain,
    Star,
    RandomConnected,
};

std::string_view to_string(VlinkPattern pattern);
VlinkPattern vlink_pattern_from_string(std::string_view text);

struct Range
{
    double min = 0.0;
    double max = 0.0;

    bool operator==(const Range&) const = default;
};

struct WorkloadSpec
{
    int vsr_count = 1;
    int vms_per_vsr = 3;
    Range flops_range{3.0, 10.0};
    Range input_flops_range{0.1, 1.0};
    // Not a published figure: inter-VM bitrates are left open, so a small
    // Mbps range is assumed.
    Range bitrate_range{1.0, 50.0};
    VlinkPattern vlink_pattern = VlinkPattern::Chain;
    std::string source_iot = "iot_01";
    std::uint64_t seed = 1;

    bool operator==(const WorkloadSpec&) const = default;
};

/// Throws ConfigError for inconsistent ranges or counts.
void check_workload_spec(const WorkloadSpec& spec);

/// Deterministic in `spec`. VM 0 of every VSR is the input VM. Throws
/// ConfigError when `source_iot` is not an IoT node of `topology`.
std::vector<Vsr> generate_vsrs(const WorkloadSpec& spec, const CfnTopology& topology);

/// Structural checks only (demands, single input VM, connectivity).
ValidationReport validate_vsr(const Vsr& vsr);

/// Structural checks plus "source_iot names an IoT node of the topology".
ValidationReport validate_vsr(const Vsr& vsr, const CfnTopology& topology);

struct Demand
{
    double gflops = 0.0;
    double mbps = 0.0;
};

Demand total_demand(std::span<const Vsr> vsrs);

} // namespace cfn

#endif
