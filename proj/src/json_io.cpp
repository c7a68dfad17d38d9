// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/json_io.hpp"

#include "cfnembed/errors.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace cfn {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json parse(std::string_view text)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object())
        throw ParseError(where + " must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ParseError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key))
        throw ParseError(where + ": missing '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(where + ": '" + key + "' has the wrong type");
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where)
{
    return j.contains(key) ? get<T>(j, key, where) : fallback;
}

DeviceProfile device_from(const json& j, const std::string& where)
{
    only_keys(j, {"name", "max_power", "idle_power", "capacity", "shared"}, where);
    return {get_or<std::string>(j, "name", "", where), get<double>(j, "max_power", where),
            get<double>(j, "idle_power", where), get<double>(j, "capacity", where),
            get_or<bool>(j, "shared", false, where)};
}

ordered_json device_to(const DeviceProfile& d)
{
    return {{"name", d.name}, {"max_power", d.max_power}, {"idle_power", d.idle_power}, {"capacity", d.capacity},
            {"shared", d.shared}};
}

Range range_from(const json& j, const char* key, Range fallback, const std::string& where)
{
    if (!j.contains(key))
        return fallback;
    const json& r = j.at(key);
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
        throw ParseError(where + ": '" + key + "' must be [min, max]");
    return {r[0].get<double>(), r[1].get<double>()};
}

CfnTopology topology_from(const json& j)
{
    only_keys(j, {"nodes", "links", "idle_share_delta"}, "topology");
    CfnTopology t;
    t.idle_share_delta = get_or<double>(j, "idle_share_delta", 0.03, "topology");
    if (!j.contains("nodes") || !j.at("nodes").is_array())
        throw ParseError("topology: 'nodes' must be an array");
    for (const json& n : j.at("nodes")) {
        const std::string where = "node " + (n.is_object() && n.contains("id") ? n.at("id").dump() : "?");
        only_keys(n, {"id", "kind", "device", "server", "server_count_max", "lan", "pue_net", "pue_pr", "zone"}, where);
        Node node;
        node.id = get<std::string>(n, "id", where);
        node.kind = node_kind_from_string(get<std::string>(n, "kind", where));
        if (n.contains("device"))
            node.device = device_from(n.at("device"), where + " device");
        if (n.contains("server"))
            node.server = device_from(n.at("server"), where + " server");
        node.server_count_max = get_or<int>(n, "server_count_max", 0, where);
        if (n.contains("lan")) {
            const json& l = n.at("lan");
            only_keys(l, {"max_power", "idle_power", "capacity", "shared"}, where + " lan");
            node.lan = LanProfile{get<double>(l, "max_power", where), get<double>(l, "idle_power", where),
                                  get<double>(l, "capacity", where), get_or<bool>(l, "shared", false, where)};
        }
        node.pue_net = get_or<double>(n, "pue_net", 1.0, where);
        node.pue_pr = get_or<double>(n, "pue_pr", 1.0, where);
        if (n.contains("zone") && !n.at("zone").is_null())
            node.zone = get<int>(n, "zone", where);
        t.nodes.push_back(std::move(node));
    }
    if (j.contains("links")) {
        if (!j.at("links").is_array())
            throw ParseError("topology: 'links' must be an array");
        for (const json& l : j.at("links")) {
            if (!l.is_array() || l.size() != 2 || !l[0].is_string() || !l[1].is_string())
                throw ParseError("topology: every link must be [\"a\", \"b\"]");
            t.links.emplace_back(l[0].get<std::string>(), l[1].get<std::string>());
        }
    }
    return t;
}

DefaultTopologyConfig builder_from(const json& j)
{
    only_keys(j, {"iot_count", "zone_count", "seed", "core_nodes", "idle_share_delta"}, "topology builder");
    DefaultTopologyConfig c;
    c.iot_count = get_or<int>(j, "iot_count", c.iot_count, "topology builder");
    c.zone_count = get_or<int>(j, "zone_count", c.zone_count, "topology builder");
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed, "topology builder");
    c.core_nodes = get_or<int>(j, "core_nodes", c.core_nodes, "topology builder");
    c.idle_share_delta = get_or<double>(j, "idle_share_delta", c.idle_share_delta, "topology builder");
    return c;
}

std::vector<Vsr> vsrs_from(const json& j)
{
    only_keys(j, {"vsrs"}, "VSR batch");
    if (!j.contains("vsrs") || !j.at("vsrs").is_array())
        throw ParseError("VSR batch: 'vsrs' must be an array");
    std::vector<Vsr> out;
    for (const json& v : j.at("vsrs")) {
        const std::string where = "VSR " + (v.is_object() && v.contains("id") ? v.at("id").dump() : "?");
        only_keys(v, {"id", "source_iot", "vms", "vlinks"}, where);
        Vsr r;
        r.id = get<int>(v, "id", where);
        r.source_iot = get<std::string>(v, "source_iot", where);
        if (!v.contains("vms") || !v.at("vms").is_array())
            throw ParseError(where + ": 'vms' must be an array");
        for (const json& m : v.at("vms")) {
            only_keys(m, {"id", "flops", "is_input"}, where + " VM");
            r.vms.push_back({get<int>(m, "id", where), get<double>(m, "flops", where),
                             get_or<bool>(m, "is_input", false, where)});
        }
        if (v.contains("vlinks")) {
            if (!v.at("vlinks").is_array())
                throw ParseError(where + ": 'vlinks' must be an array");
            for (const json& l : v.at("vlinks")) {
                only_keys(l, {"src", "dst", "mbps"}, where + " vlink");
                r.vlinks.push_back({get<int>(l, "src", where), get<int>(l, "dst", where), get<double>(l, "mbps", where)});
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

Strategy strategy_from(const json& j)
{
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "enumeration")
            return EnumerationParams{};
        if (s == "bnb")
            return BranchAndBoundParams{};
        if (s == "heuristic")
            return HeuristicParams{};
        if (s == "cdc" || s == "CDC")
            return FixedLayerParams{Layer::CDC};
        if (s == "af" || s == "AF")
            return FixedLayerParams{Layer::AF};
        if (s == "mf" || s == "MF")
            return FixedLayerParams{Layer::MF};
        throw ParseError("unknown strategy '" + s + "'");
    }
    const std::string kind = get<std::string>(j, "kind", "strategy");
    if (kind == "enumeration") {
        only_keys(j, {"kind", "max_configurations"}, "strategy");
        EnumerationParams p;
        p.max_configurations = get_or<std::uint64_t>(j, "max_configurations", p.max_configurations, "strategy");
        return p;
    }
    if (kind == "bnb") {
        only_keys(j, {"kind", "epsilon", "node_limit", "bound", "warm_start"}, "strategy");
        BranchAndBoundParams p;
        p.epsilon = get_or<double>(j, "epsilon", p.epsilon, "strategy");
        p.node_limit = get_or<std::int64_t>(j, "node_limit", p.node_limit, "strategy");
        p.warm_start = get_or<bool>(j, "warm_start", p.warm_start, "strategy");
        const std::string bound = get_or<std::string>(j, "bound", "full", "strategy");
        if (bound == "full")
            p.bound = BoundMode::Full;
        else if (bound == "committed")
            p.bound = BoundMode::Committed;
        else if (bound == "none")
            p.bound = BoundMode::None;
        else
            throw ParseError("strategy: unknown bound mode '" + bound + "'");
        return p;
    }
    if (kind == "heuristic") {
        only_keys(j, {"kind", "seed", "restarts", "neighborhood", "move_budget"}, "strategy");
        HeuristicParams p;
        p.seed = get_or<std::uint64_t>(j, "seed", p.seed, "strategy");
        p.restarts = get_or<int>(j, "restarts", p.restarts, "strategy");
        p.move_budget = get_or<std::int64_t>(j, "move_budget", p.move_budget, "strategy");
        const std::string nb = get_or<std::string>(j, "neighborhood", "relocate", "strategy");
        if (nb == "relocate")
            p.neighborhood = Neighborhood::Relocate;
        else if (nb == "relocate-swap")
            p.neighborhood = Neighborhood::RelocateSwap;
        else
            throw ParseError("strategy: unknown neighborhood '" + nb + "'");
        return p;
    }
    if (kind == "fixed") {
        only_keys(j, {"kind", "layer"}, "strategy");
        const std::string layer = get<std::string>(j, "layer", "strategy");
        if (layer == "CDC" || layer == "cdc")
            return FixedLayerParams{Layer::CDC};
        if (layer == "AF" || layer == "af")
            return FixedLayerParams{Layer::AF};
        if (layer == "MF" || layer == "mf")
            return FixedLayerParams{Layer::MF};
        throw ParseError("strategy: unknown layer '" + layer + "'");
    }
    throw ParseError("strategy: unknown kind '" + kind + "'");
}

Scenario scenario_from(const json& j, const std::string& base_dir)
{
    only_keys(j, {"topology", "workload", "strategies", "sweep", "base_seed", "output", "traffic_counting",
                  "record_timing", "threads", "bnb", "heuristic", "enumeration"},
              "scenario");
    Scenario s;
    if (j.contains("topology")) {
        const json& t = j.at("topology");
        if (t.is_object() && t.contains("builder")) {
            only_keys(t, {"builder"}, "scenario topology");
            s.topology = build_default_cfn(builder_from(t.at("builder")));
        } else if (t.is_object() && t.contains("file")) {
            only_keys(t, {"file"}, "scenario topology");
            std::filesystem::path p = get<std::string>(t, "file", "scenario topology");
            if (p.is_relative())
                p = std::filesystem::path(base_dir) / p;
            s.topology = topology_from(parse(read_text_file(p.string())));
        } else {
            s.topology = topology_from(t);
        }
    } else {
        s.topology = build_default_cfn();
    }

    if (j.contains("workload")) {
        const json& w = j.at("workload");
        only_keys(w, {"vms_per_vsr", "flops_range", "input_flops_range", "bitrate_range", "vlink_pattern",
                      "source_iot"},
                  "workload");
        s.workload.vms_per_vsr = get_or<int>(w, "vms_per_vsr", s.workload.vms_per_vsr, "workload");
        s.workload.flops_range = range_from(w, "flops_range", s.workload.flops_range, "workload");
        s.workload.input_flops_range = range_from(w, "input_flops_range", s.workload.input_flops_range, "workload");
        s.workload.bitrate_range = range_from(w, "bitrate_range", s.workload.bitrate_range, "workload");
        if (w.contains("vlink_pattern"))
            s.workload.vlink_pattern = vlink_pattern_from_string(get<std::string>(w, "vlink_pattern", "workload"));
        s.workload.source_iot = get_or<std::string>(w, "source_iot", s.workload.source_iot, "workload");
    }
    if (j.contains("strategies"))
        s.strategies = get<std::vector<std::string>>(j, "strategies", "scenario");
    if (j.contains("sweep")) {
        const json& w = j.at("sweep");
        only_keys(w, {"from", "to", "step"}, "sweep");
        s.sweep.from = get_or<int>(w, "from", s.sweep.from, "sweep");
        s.sweep.to = get_or<int>(w, "to", s.sweep.to, "sweep");
        s.sweep.step = get_or<int>(w, "step", s.sweep.step, "sweep");
    }
    s.base_seed = get_or<std::uint64_t>(j, "base_seed", s.base_seed, "scenario");
    s.output = get_or<std::string>(j, "output", s.output, "scenario");
    if (j.contains("traffic_counting"))
        s.power.counting = traffic_counting_from_string(get<std::string>(j, "traffic_counting", "scenario"));
    s.record_timing = get_or<bool>(j, "record_timing", s.record_timing, "scenario");
    s.threads = get_or<int>(j, "threads", s.threads, "scenario");
    if (j.contains("bnb")) {
        json b = j.at("bnb");
        b["kind"] = "bnb";
        s.bnb = std::get<BranchAndBoundParams>(strategy_from(b));
    }
    if (j.contains("heuristic")) {
        json h = j.at("heuristic");
        h["kind"] = "heuristic";
        s.heuristic = std::get<HeuristicParams>(strategy_from(h));
    }
    if (j.contains("enumeration")) {
        json e = j.at("enumeration");
        e["kind"] = "enumeration";
        s.enumeration = std::get<EnumerationParams>(strategy_from(e));
    }
    return s;
}

template <typename F>
auto guarded(F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid document: ") + e.what());
    }
}

} // namespace

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    if (in.bad())
        throw IoError("failed reading '" + path + "'");
    return s.str();
}

void write_text_file(const std::string& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

std::string topology_to_json(const CfnTopology& t)
{
    ordered_json nodes = ordered_json::array();
    for (const Node& n : t.nodes) {
        ordered_json j;
        j["id"] = n.id;
        j["kind"] = std::string(to_string(n.kind));
        if (n.device)
            j["device"] = device_to(*n.device);
        if (n.server) {
            j["server"] = device_to(*n.server);
            j["server_count_max"] = n.server_count_max;
        }
        if (n.lan)
            j["lan"] = {{"max_power", n.lan->max_power},
                        {"idle_power", n.lan->idle_power},
                        {"capacity", n.lan->capacity},
                        {"shared", n.lan->shared}};
        j["pue_net"] = n.pue_net;
        j["pue_pr"] = n.pue_pr;
        if (n.zone)
            j["zone"] = *n.zone;
        nodes.push_back(std::move(j));
    }
    ordered_json links = ordered_json::array();
    for (const auto& [a, b] : t.links)
        links.push_back({a, b});
    ordered_json out;
    out["idle_share_delta"] = t.idle_share_delta;
    out["nodes"] = std::move(nodes);
    out["links"] = std::move(links);
    return out.dump(2) + "\n";
}

CfnTopology topology_from_json(std::string_view text)
{
    return guarded([&] { return topology_from(parse(text)); });
}

std::string vsrs_to_json(std::span<const Vsr> vsrs)
{
    ordered_json arr = ordered_json::array();
    for (const Vsr& v : vsrs) {
        ordered_json vms = ordered_json::array();
        for (const VmNode& m : v.vms)
            vms.push_back({{"id", m.id}, {"flops", m.flops_demand}, {"is_input", m.is_input}});
        ordered_json links = ordered_json::array();
        for (const VirtualLink& l : v.vlinks)
            links.push_back({{"src", l.src}, {"dst", l.dst}, {"mbps", l.bitrate}});
        ordered_json j;
        j["id"] = v.id;
        j["source_iot"] = v.source_iot;
        j["vms"] = std::move(vms);
        j["vlinks"] = std::move(links);
        arr.push_back(std::move(j));
    }
    ordered_json out;
    out["vsrs"] = std::move(arr);
    return out.dump(2) + "\n";
}

std::vector<Vsr> vsrs_from_json(std::string_view text)
{
    return guarded([&] { return vsrs_from(parse(text)); });
}

std::string solution_to_json(const Substrate& sub, std::span<const Vsr> vsrs, const Solution& s)
{
    ordered_json out;
    const bool solved = s.status != SolveStatus::Infeasible;
    out["status"] = std::string(to_string(s.status));
    out["objective_w"] = solved ? ordered_json(s.objective) : ordered_json(nullptr);
    out["gap"] = s.gap;
    ordered_json assignment = ordered_json::array();
    if (solved)
        for (std::size_t r = 0; r < s.placement.assign.size() && r < vsrs.size(); ++r)
            for (std::size_t m = 0; m < s.placement.assign[r].size(); ++m)
                assignment.push_back({{"vsr", vsrs[r].id},
                                      {"vm", static_cast<int>(m)},
                                      {"node", sub.node(s.placement.assign[r][m]).id}});
    out["assignment"] = std::move(assignment);
    if (solved) {
        const PowerBreakdown& b = s.breakdown;
        ordered_json br;
        br["net_proportional_w"] = b.net_proportional;
        br["net_idle_w"] = b.net_idle;
        br["pr_proportional_w"] = b.pr_proportional;
        br["pr_idle_w"] = b.pr_idle;
        br["lan_proportional_w"] = b.lan_proportional;
        br["lan_idle_w"] = b.lan_idle;
        br["total_w"] = b.total;
        ordered_json per_node = ordered_json::object();
        for (std::size_t i = 0; i < b.per_node.size(); ++i) {
            const NodeUsage& u = b.per_node[i];
            if (!u.beta && !u.phi)
                continue;
            ordered_json n;
            if (u.beta)
                n["lambda_gbps"] = u.lambda_n;
            if (u.phi) {
                n["omega_gflops"] = u.omega_p;
                n["theta_gbps"] = u.theta_p;
                n["servers"] = u.n_servers;
            }
            n["power_w"] = u.power;
            per_node[sub.node(static_cast<NodeIndex>(i)).id] = std::move(n);
        }
        br["per_node"] = std::move(per_node);
        out["breakdown"] = std::move(br);
    } else {
        out["breakdown"] = nullptr;
    }
    out["nodes_explored"] = s.nodes_explored;
    out["wall_time_s"] = s.wall_time;
    if (!s.message.empty())
        out["message"] = s.message;
    return out.dump(2) + "\n";
}

Scenario scenario_from_json(std::string_view text, const std::string& base_dir)
{
    return guarded([&] { return scenario_from(parse(text), base_dir); });
}

Scenario load_scenario(const std::string& path)
{
    const std::filesystem::path p(path);
    return scenario_from_json(read_text_file(path), p.has_parent_path() ? p.parent_path().string() : ".");
}

Strategy strategy_from_json(std::string_view text)
{
    return guarded([&] { return strategy_from(parse(text)); });
}

ValidationReport validate_document(std::string_view text, const std::string& base_dir, DocumentKind* kind)
{
    const json j = parse(text);
    if (!j.is_object())
        throw ParseError("document must be a JSON object");
    if (j.contains("nodes")) {
        if (kind)
            *kind = DocumentKind::Topology;
        return validate_topology(topology_from_json(text));
    }
    if (j.contains("vsrs")) {
        if (kind)
            *kind = DocumentKind::VsrBatch;
        ValidationReport report;
        for (const Vsr& v : vsrs_from_json(text))
            for (Violation& x : validate_vsr(v))
                report.push_back(std::move(x));
        return report;
    }
    if (j.contains("strategies") || j.contains("sweep") || j.contains("workload") || j.contains("topology")) {
        if (kind)
            *kind = DocumentKind::Scenario;
        const Scenario s = scenario_from_json(text, base_dir);
        try {
            check_scenario(s);
        } catch (const ConfigError& e) {
            return {{"invalid scenario", e.what()}};
        }
        return {};
    }
    throw ParseError("unrecognized document: expected a topology, a VSR batch or a scenario");
}

} // namespace cfn
