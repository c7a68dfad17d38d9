// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/workload.hpp"

#include "cfnembed/errors.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cfn {

int Vsr::input_vm() const
{
    for (std::size_t i = 0; i < vms.size(); ++i)
        if (vms[i].is_input)
            return static_cast<int>(i);
    return -1;
}

std::string_view to_string(VlinkPattern pattern)
{
    switch (pattern) {
    case VlinkPattern::Chain:
        return "chain";
    case VlinkPattern::Star:
        return "star";
    case VlinkPattern::RandomConnected:
        return "random-connected";
    }
    return "?";
}

VlinkPattern vlink_pattern_from_string(std::string_view text)
{
    if (text == "chain")
        return VlinkPattern::Chain;
    if (text == "star")
        return VlinkPattern::Star;
    if (text == "random-connected")
        return VlinkPattern::RandomConnected;
    throw ParseError("unknown vlink pattern '" + std::string(text) + "'");
}

void check_workload_spec(const WorkloadSpec& s)
{
    auto range_ok = [](const Range& r, bool positive) {
        return std::isfinite(r.min) && std::isfinite(r.max) && r.min <= r.max && (positive ? r.min > 0.0 : r.min >= 0.0);
    };
    if (s.vsr_count < 0)
        throw ConfigError("vsr_count must be >= 0");
    if (s.vms_per_vsr < 1)
        throw ConfigError("vms_per_vsr must be >= 1");
    if (!range_ok(s.flops_range, true))
        throw ConfigError("flops_range needs 0 < min <= max");
    if (!range_ok(s.input_flops_range, true))
        throw ConfigError("input_flops_range needs 0 < min <= max");
    if (!range_ok(s.bitrate_range, false))
        throw ConfigError("bitrate_range needs 0 <= min <= max");
}

std::vector<Vsr> generate_vsrs(const WorkloadSpec& spec, const CfnTopology& topology)
{
    check_workload_spec(spec);
    const auto it = std::find_if(topology.nodes.begin(), topology.nodes.end(),
                                 [&](const Node& n) { return n.id == spec.source_iot; });
    if (it == topology.nodes.end() || it->kind != NodeKind::IoT)
        throw ConfigError("source_iot '" + spec.source_iot + "' is not an IoT node of the topology");

    detail::Rng rng(spec.seed);
    std::vector<Vsr> out;
    out.reserve(static_cast<std::size_t>(spec.vsr_count));
    const int n = spec.vms_per_vsr;
    for (int r = 0; r < spec.vsr_count; ++r) {
        Vsr v;
        v.id = r;
        v.source_iot = spec.source_iot;
        v.vms.push_back({0, rng.uniform(spec.input_flops_range.min, spec.input_flops_range.max), true});
        for (int s = 1; s < n; ++s)
            v.vms.push_back({s, rng.uniform(spec.flops_range.min, spec.flops_range.max), false});

        auto add_link = [&](int a, int b) {
            v.vlinks.push_back({a, b, rng.uniform(spec.bitrate_range.min, spec.bitrate_range.max)});
        };
        switch (spec.vlink_pattern) {
        case VlinkPattern::Chain:
            for (int s = 1; s < n; ++s)
                add_link(s - 1, s);
            break;
        case VlinkPattern::Star:
            for (int s = 1; s < n; ++s)
                add_link(0, s);
            break;
        case VlinkPattern::RandomConnected: {
            // Random spanning tree rooted at the input, then sparse extra edges.
            std::set<std::pair<int, int>> used;
            for (int s = 1; s < n; ++s) {
                const int parent = static_cast<int>(rng.below(static_cast<std::uint64_t>(s)));
                used.emplace(parent, s);
                add_link(parent, s);
            }
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b)
                    if (!used.count({a, b}) && rng.chance(0.25))
                        add_link(a, b);
            break;
        }
        }
        out.push_back(std::move(v));
    }
    return out;
}

ValidationReport validate_vsr(const Vsr& v)
{
    ValidationReport report;
    const std::string tag = "VSR " + std::to_string(v.id);
    auto add = [&](std::string code, std::string message) { report.push_back({std::move(code), tag + ": " + message}); };

    if (v.vms.empty()) {
        add("no VMs", "has no VMs");
        return report;
    }
    int inputs = 0;
    for (std::size_t i = 0; i < v.vms.size(); ++i) {
        const VmNode& vm = v.vms[i];
        if (vm.id != static_cast<int>(i))
            add("vm id mismatch", "VM at position " + std::to_string(i) + " has id " + std::to_string(vm.id));
        if (!(vm.flops_demand > 0.0) || !std::isfinite(vm.flops_demand))
            add("invalid demand", "VM " + std::to_string(vm.id) + " needs a positive FLOPS demand");
        if (vm.is_input)
            ++inputs;
    }
    if (inputs == 0)
        add("no input VM", "has no input VM");
    else if (inputs > 1)
        add("multiple input VMs", "has " + std::to_string(inputs) + " input VMs");

    const int n = static_cast<int>(v.vms.size());
    std::vector<std::vector<int>> adj(v.vms.size());
    for (const VirtualLink& l : v.vlinks) {
        const std::string name = std::to_string(l.src) + "->" + std::to_string(l.dst);
        if (l.src < 0 || l.src >= n || l.dst < 0 || l.dst >= n) {
            add("unknown endpoint", "virtual link " + name + " references a missing VM");
            continue;
        }
        if (l.src == l.dst)
            add("self-loop", "virtual link " + name + " is a self-loop");
        if (!(l.bitrate >= 0.0) || !std::isfinite(l.bitrate))
            add("invalid bitrate", "virtual link " + name + " has a negative bitrate");
        adj[static_cast<std::size_t>(l.src)].push_back(l.dst);
        adj[static_cast<std::size_t>(l.dst)].push_back(l.src);
    }

    std::vector<bool> seen(v.vms.size(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const int x = stack.back();
        stack.pop_back();
        for (int y : adj[static_cast<std::size_t>(x)])
            if (!seen[static_cast<std::size_t>(y)]) {
                seen[static_cast<std::size_t>(y)] = true;
                stack.push_back(y);
            }
    }
    std::string missing;
    for (int i = 0; i < n; ++i)
        if (!seen[static_cast<std::size_t>(i)])
            missing += (missing.empty() ? "" : ", ") + std::to_string(i);
    if (!missing.empty())
        add("not connected", "VMs not connected to the rest: " + missing);
    return report;
}

ValidationReport validate_vsr(const Vsr& v, const CfnTopology& topology)
{
    ValidationReport report = validate_vsr(v);
    const auto it = std::find_if(topology.nodes.begin(), topology.nodes.end(),
                                 [&](const Node& n) { return n.id == v.source_iot; });
    if (it == topology.nodes.end() || it->kind != NodeKind::IoT)
        report.push_back({"invalid source",
                          "VSR " + std::to_string(v.id) + ": source_iot '" + v.source_iot + "' is not an IoT node"});
    return report;
}

Demand total_demand(std::span<const Vsr> vsrs)
{
    Demand d;
    for (const Vsr& v : vsrs) {
        for (const VmNode& vm : v.vms)
            d.gflops += vm.flops_demand;
        for (const VirtualLink& l : v.vlinks)
            d.mbps += l.bitrate;
    }
    return d;
}

} // namespace cfn
