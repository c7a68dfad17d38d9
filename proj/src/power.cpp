// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/power.hpp"

#include "cfnembed/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cfn {

namespace {

// Sum after sorting, so that placements which differ only by a permutation of
// identical nodes produce bit-identical totals.
double sorted_sum(std::vector<double>& terms)
{
    std::sort(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms)
        s += t;
    return s;
}

struct Usage
{
    std::vector<double> omega;
    std::vector<double> theta;  // Gbps
    std::vector<double> lambda; // Gbps
};

struct Failure
{
    NodeIndex node = -1;
    std::string resource;
    double required = 0.0;
    double available = 0.0;
};

Usage accumulate_usage(const Substrate& sub, std::span<const Vsr> vsrs, const Placement& placement,
                       TrafficCounting counting)
{
    Usage u;
    u.omega.assign(sub.size(), 0.0);
    u.theta.assign(sub.size(), 0.0);
    u.lambda.assign(sub.size(), 0.0);
    std::map<NodePair, double> traffic;
    for (std::size_t i = 0; i < vsrs.size(); ++i) {
        const Vsr& v = vsrs[i];
        const auto& where = placement.assign[i];
        for (std::size_t j = 0; j < v.vms.size(); ++j)
            u.omega[static_cast<std::size_t>(where[j])] += v.vms[j].flops_demand;
        for (const VirtualLink& l : v.vlinks) {
            const NodeIndex b = where[static_cast<std::size_t>(l.src)];
            const NodeIndex e = where[static_cast<std::size_t>(l.dst)];
            const double gbps = l.bitrate / 1000.0;
            u.theta[static_cast<std::size_t>(b)] += gbps;
            if (b != e) {
                u.theta[static_cast<std::size_t>(e)] += gbps;
                traffic[{b, e}] += l.bitrate;
            }
        }
    }
    for (const auto& [pair, mbps] : traffic) {
        const auto it = placement.routes.find(pair);
        const std::vector<NodeIndex>& path =
            it != placement.routes.end() ? it->second : sub.route(pair.first, pair.second).nodes;
        for (const auto& [node, count] : route_meter_counts(sub, path, counting))
            u.lambda[static_cast<std::size_t>(node)] += count * (mbps / 1000.0);
    }
    return u;
}

std::optional<Failure> check_capacities(const Substrate& sub, const Usage& u)
{
    for (NodeIndex n : sub.network_nodes()) {
        const double cap = sub.node(n).device->capacity;
        if (u.lambda[static_cast<std::size_t>(n)] > cap + kTolerance)
            return Failure{n, "switching capacity (Gbps)", u.lambda[static_cast<std::size_t>(n)], cap};
    }
    for (NodeIndex p : sub.processing_nodes()) {
        const Node& node = sub.node(p);
        const double cap = node.server->capacity * node.server_count_max;
        if (u.omega[static_cast<std::size_t>(p)] > cap + kTolerance)
            return Failure{p, "processing capacity (GFLOPS)", u.omega[static_cast<std::size_t>(p)], cap};
        if (node.lan && u.theta[static_cast<std::size_t>(p)] > node.lan->capacity + kTolerance)
            return Failure{p, "LAN capacity (Gbps)", u.theta[static_cast<std::size_t>(p)], node.lan->capacity};
    }
    return std::nullopt;
}

[[noreturn]] void throw_failure(const Substrate& sub, const Failure& f)
{
    throw CapacityExceeded(sub.node(f.node).id, f.resource, f.required, f.available);
}

} // namespace

std::string_view to_string(TrafficCounting counting)
{
    return counting == TrafficCounting::PaperLiteral ? "paper-literal" : "count-once";
}

TrafficCounting traffic_counting_from_string(std::string_view text)
{
    if (text == "paper-literal")
        return TrafficCounting::PaperLiteral;
    if (text == "count-once")
        return TrafficCounting::CountOnce;
    throw ParseError("unknown traffic counting mode '" + std::string(text) + "'");
}

Placement make_placement(const Substrate& sub, std::span<const Vsr> vsrs,
                         const std::map<std::pair<int, int>, std::string>& assignment)
{
    Placement p;
    p.assign.resize(vsrs.size());
    for (std::size_t i = 0; i < vsrs.size(); ++i) {
        p.assign[i].assign(vsrs[i].vms.size(), -1);
        for (std::size_t j = 0; j < vsrs[i].vms.size(); ++j) {
            const auto it = assignment.find({static_cast<int>(i), static_cast<int>(j)});
            if (it != assignment.end())
                p.assign[i][j] = sub.index_of(it->second);
            else if (vsrs[i].vms[j].is_input)
                p.assign[i][j] = sub.index_of(vsrs[i].source_iot);
            else
                throw InputError("VM " + std::to_string(j) + " of VSR " + std::to_string(vsrs[i].id)
                                 + " is not assigned");
        }
    }
    complete_routes(sub, vsrs, p);
    return p;
}

void complete_routes(const Substrate& sub, std::span<const Vsr> vsrs, Placement& placement)
{
    for (const auto& [pair, mbps] : aggregate_traffic(placement, vsrs)) {
        (void)mbps;
        if (!placement.routes.count(pair))
            placement.routes.emplace(pair, sub.route(pair.first, pair.second).nodes);
    }
}

void check_placement(const Substrate& sub, std::span<const Vsr> vsrs, const Placement& placement)
{
    if (placement.assign.size() != vsrs.size())
        throw InputError("placement covers " + std::to_string(placement.assign.size()) + " VSRs, expected "
                         + std::to_string(vsrs.size()));
    for (std::size_t i = 0; i < vsrs.size(); ++i) {
        const Vsr& v = vsrs[i];
        const auto& where = placement.assign[i];
        if (where.size() != v.vms.size())
            throw InputError("VSR " + std::to_string(v.id) + ": not every VM is assigned");
        for (std::size_t j = 0; j < where.size(); ++j) {
            const NodeIndex b = where[j];
            if (b < 0 || static_cast<std::size_t>(b) >= sub.size() || !sub.node(b).is_processing())
                throw InputError("VSR " + std::to_string(v.id) + " VM " + std::to_string(j)
                                 + " is not assigned to a processing node");
            if (v.vms[j].is_input && sub.node(b).id != v.source_iot)
                throw InputError("VSR " + std::to_string(v.id) + ": input VM must be placed on its source '"
                                 + v.source_iot + "', not '" + sub.node(b).id + "'");
        }
    }
    for (const auto& [pair, path] : placement.routes) {
        const auto& [b, e] = pair;
        if (path.size() < 2 || path.front() != b || path.back() != e)
            throw InputError("route does not connect its endpoints");
        for (std::size_t k = 0; k + 1 < path.size(); ++k)
            if (path[k] < 0 || static_cast<std::size_t>(path[k]) >= sub.size() || !sub.adjacent(path[k], path[k + 1]))
                throw InputError("route uses a non-existent link");
    }
}

std::map<NodePair, double> aggregate_traffic(const Placement& placement, std::span<const Vsr> vsrs)
{
    std::map<NodePair, double> traffic;
    for (std::size_t i = 0; i < vsrs.size() && i < placement.assign.size(); ++i)
        for (const VirtualLink& l : vsrs[i].vlinks) {
            const NodeIndex b = placement.assign[i][static_cast<std::size_t>(l.src)];
            const NodeIndex e = placement.assign[i][static_cast<std::size_t>(l.dst)];
            if (b != e)
                traffic[{b, e}] += l.bitrate;
        }
    return traffic;
}

int servers_for(double omega, double server_capacity)
{
    if (omega <= 0.0)
        return 0;
    return static_cast<int>(std::ceil(omega / server_capacity - kTolerance));
}

int servers_required(double omega, const DeviceProfile& server, int ns_max, const std::string& node_id)
{
    if (omega < 0.0)
        throw InputError("negative workload");
    const int n = servers_for(omega, server.capacity);
    if (n > ns_max)
        throw CapacityExceeded(node_id.empty() ? server.name : node_id, "servers", n, ns_max);
    return n;
}

std::vector<std::pair<NodeIndex, int>> route_meter_counts(const Substrate& sub, std::span<const NodeIndex> path,
                                                          TrafficCounting counting)
{
    std::vector<std::pair<NodeIndex, int>> out;
    const std::size_t k = path.empty() ? 0 : path.size() - 1;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (!sub.is_metered(path[i]))
            continue;
        int count = i > 0 ? 1 : 0; // inflow
        if (counting == TrafficCounting::PaperLiteral) {
            if (i + 1 < k) // outflow, unless it enters the destination
                ++count;
        } else if (i == 0) {
            ++count; // sourced here
        }
        if (count > 0)
            out.emplace_back(path[i], count);
    }
    return out;
}

double effective_idle(const DeviceProfile& profile, double delta)
{
    return profile.shared ? delta * profile.idle_power : profile.idle_power;
}

double effective_idle(const LanProfile& profile, double delta)
{
    return profile.shared ? delta * profile.idle_power : profile.idle_power;
}

NetworkNodeTerms network_node_terms(const Node& node, double lambda_gbps, double delta)
{
    NetworkNodeTerms t;
    if (lambda_gbps > 0.0) {
        t.proportional = node.pue_net * energy_per_bit(*node.device) * lambda_gbps;
        t.idle = node.pue_net * effective_idle(*node.device, delta);
    }
    return t;
}

ProcessingNodeTerms processing_node_terms(const Node& node, double omega, double theta_gbps, double delta)
{
    ProcessingNodeTerms t;
    t.servers = servers_for(omega, node.server->capacity);
    t.active = omega > 0.0 || theta_gbps > 0.0;
    t.proportional = node.pue_pr * energy_per_bit(*node.server) * omega;
    t.idle = node.pue_pr * t.servers * node.server->idle_power;
    if (node.lan) {
        t.lan_proportional = node.pue_pr * energy_per_bit(*node.lan) * theta_gbps;
        if (t.active)
            t.lan_idle = node.pue_pr * effective_idle(*node.lan, delta);
    }
    return t;
}

NetworkPower network_power(const Substrate& sub, std::span<const Vsr> vsrs, const Placement& placement,
                           const PowerOptions& options)
{
    check_placement(sub, vsrs, placement);
    const Usage u = accumulate_usage(sub, vsrs, placement, options.counting);
    NetworkPower out;
    out.lambda = u.lambda;
    out.beta.assign(sub.size(), false);
    std::vector<double> prop, idle;
    for (NodeIndex n : sub.network_nodes()) {
        const double lambda = u.lambda[static_cast<std::size_t>(n)];
        const double cap = sub.node(n).device->capacity;
        if (lambda > cap + kTolerance)
            throw CapacityExceeded(sub.node(n).id, "switching capacity (Gbps)", lambda, cap);
        const NetworkNodeTerms t = network_node_terms(sub.node(n), lambda, sub.idle_share_delta());
        out.beta[static_cast<std::size_t>(n)] = lambda > 0.0;
        prop.push_back(t.proportional);
        idle.push_back(t.idle);
    }
    out.proportional = sorted_sum(prop);
    out.idle = sorted_sum(idle);
    out.watts = out.proportional + out.idle;
    return out;
}

ProcessingPower processing_power(const Substrate& sub, std::span<const Vsr> vsrs, const Placement& placement)
{
    check_placement(sub, vsrs, placement);
    const Usage u = accumulate_usage(sub, vsrs, placement, TrafficCounting::CountOnce);
    ProcessingPower out;
    out.omega = u.omega;
    out.theta = u.theta;
    out.servers.assign(sub.size(), 0);
    out.phi.assign(sub.size(), false);
    std::vector<double> prop, idle, lprop, lidle;
    for (NodeIndex p : sub.processing_nodes()) {
        const Node& node = sub.node(p);
        const double omega = u.omega[static_cast<std::size_t>(p)];
        const double theta = u.theta[static_cast<std::size_t>(p)];
        servers_required(omega, *node.server, node.server_count_max, node.id);
        if (node.lan && theta > node.lan->capacity + kTolerance)
            throw CapacityExceeded(node.id, "LAN capacity (Gbps)", theta, node.lan->capacity);
        const ProcessingNodeTerms t = processing_node_terms(node, omega, theta, sub.idle_share_delta());
        out.servers[static_cast<std::size_t>(p)] = t.servers;
        out.phi[static_cast<std::size_t>(p)] = t.active;
        prop.push_back(t.proportional);
        idle.push_back(t.idle);
        lprop.push_back(t.lan_proportional);
        lidle.push_back(t.lan_idle);
    }
    out.proportional = sorted_sum(prop);
    out.idle = sorted_sum(idle);
    out.lan_proportional = sorted_sum(lprop);
    out.lan_idle = sorted_sum(lidle);
    out.watts = out.proportional + out.idle + out.lan_proportional + out.lan_idle;
    return out;
}

namespace detail {

bool evaluate_unchecked(const Substrate& sub, std::span<const Vsr> vsrs, const Placement& placement,
                        const PowerOptions& options, PowerBreakdown& out, std::string* failure)
{
    const Usage u = accumulate_usage(sub, vsrs, placement, options.counting);
    if (auto f = check_capacities(sub, u)) {
        if (failure)
            *failure = "node '" + sub.node(f->node).id + "': " + f->resource + " exceeded";
        return false;
    }
    const double delta = sub.idle_share_delta();
    out = PowerBreakdown{};
    out.per_node.assign(sub.size(), NodeUsage{});
    std::vector<double> net_prop, net_idle, pr_prop, pr_idle, lan_prop, lan_idle;
    for (NodeIndex n : sub.network_nodes()) {
        const double lambda = u.lambda[static_cast<std::size_t>(n)];
        const NetworkNodeTerms t = network_node_terms(sub.node(n), lambda, delta);
        NodeUsage& usage = out.per_node[static_cast<std::size_t>(n)];
        usage.lambda_n = lambda;
        usage.beta = lambda > 0.0;
        usage.power = t.proportional + t.idle;
        net_prop.push_back(t.proportional);
        net_idle.push_back(t.idle);
    }
    for (NodeIndex p : sub.processing_nodes()) {
        const double omega = u.omega[static_cast<std::size_t>(p)];
        const double theta = u.theta[static_cast<std::size_t>(p)];
        const ProcessingNodeTerms t = processing_node_terms(sub.node(p), omega, theta, delta);
        NodeUsage& usage = out.per_node[static_cast<std::size_t>(p)];
        usage.omega_p = omega;
        usage.theta_p = theta;
        usage.n_servers = t.servers;
        usage.phi = t.active;
        usage.power = t.proportional + t.idle + t.lan_proportional + t.lan_idle;
        pr_prop.push_back(t.proportional);
        pr_idle.push_back(t.idle);
        lan_prop.push_back(t.lan_proportional);
        lan_idle.push_back(t.lan_idle);
    }
    out.net_proportional = sorted_sum(net_prop);
    out.net_idle = sorted_sum(net_idle);
    out.pr_proportional = sorted_sum(pr_prop);
    out.pr_idle = sorted_sum(pr_idle);
    out.lan_proportional = sorted_sum(lan_prop);
    out.lan_idle = sorted_sum(lan_idle);
    out.total = out.net_proportional + out.net_idle + out.pr_proportional + out.pr_idle + out.lan_proportional
              + out.lan_idle;
    return true;
}

} // namespace detail

PowerBreakdown evaluate_placement(const Substrate& sub, std::span<const Vsr> vsrs, const Placement& placement,
                                  const PowerOptions& options)
{
    check_placement(sub, vsrs, placement);
    const Usage u = accumulate_usage(sub, vsrs, placement, options.counting);
    if (auto f = check_capacities(sub, u))
        throw_failure(sub, *f);
    PowerBreakdown out;
    detail::evaluate_unchecked(sub, vsrs, placement, options, out, nullptr);
    return out;
}

} // namespace cfn
