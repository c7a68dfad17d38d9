// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/milp.hpp"

#include "cfnembed/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_set>

namespace cfn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string sanitize(const std::string& id)
{
    std::string out;
    for (char c : id)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])))
        out = "n" + out;
    return out;
}

class Builder
{
public:
    Builder(const Substrate& sub, std::span<const Vsr> vsrs, const PowerOptions& options, bool use_ids)
        : sub_(sub), vsrs_(vsrs), options_(options)
    {
        for (std::size_t i = 0; i < sub.size(); ++i)
            names_.push_back(use_ids ? sanitize(sub.node(static_cast<NodeIndex>(i)).id) : "n" + std::to_string(i));
    }

    MilpModel build()
    {
        MilpIndex& ix = m_.index;
        const auto& proc = sub_.processing_nodes();
        const auto& net = sub_.network_nodes();
        const double delta = sub_.idle_share_delta();
        const std::size_t n = sub_.size();
        ix.lambda.assign(n, -1);
        ix.beta.assign(n, -1);
        ix.omega.assign(n, -1);
        ix.servers.assign(n, -1);
        ix.theta.assign(n, -1);
        ix.phi.assign(n, -1);

        // Assignment variables and the assignment / pinning constraints.
        std::vector<std::vector<std::vector<NodeIndex>>> hosts(vsrs_.size());
        for (std::size_t r = 0; r < vsrs_.size(); ++r) {
            const Vsr& v = vsrs_[r];
            const NodeIndex source = sub_.index_of(v.source_iot);
            hosts[r].resize(v.vms.size());
            for (const VmNode& vm : v.vms) {
                auto& h = hosts[r][static_cast<std::size_t>(vm.id)];
                if (vm.is_input)
                    h = {source};
                else
                    h = proc;
                for (NodeIndex b : h)
                    ix.assign[{static_cast<int>(r), vm.id, b}] =
                        var("d_" + std::to_string(r) + "_" + std::to_string(vm.id) + "_" + names_[idx(b)],
                            VarKind::Binary, 0.0, 1.0);
            }
        }
        for (std::size_t r = 0; r < vsrs_.size(); ++r) {
            const Vsr& v = vsrs_[r];
            for (const VmNode& vm : v.vms) {
                std::vector<Term> t;
                for (NodeIndex b : hosts[r][static_cast<std::size_t>(vm.id)])
                    t.push_back({1.0, d(r, vm.id, b)});
                if (vm.is_input)
                    add("pin_" + std::to_string(r), std::move(t), Sense::Equal, 1.0);
                else
                    add("assign_" + std::to_string(r) + "_" + std::to_string(vm.id), std::move(t), Sense::Equal, 1.0);
            }
        }

        // Linearized products of the endpoint assignments of every virtual link.
        std::map<NodePair, std::vector<Term>> pair_terms;
        std::vector<std::vector<Term>> theta_terms(n);
        for (std::size_t r = 0; r < vsrs_.size(); ++r) {
            const Vsr& v = vsrs_[r];
            for (std::size_t k = 0; k < v.vlinks.size(); ++k) {
                const VirtualLink& l = v.vlinks[k];
                const double g = l.bitrate / 1000.0;
                for (NodeIndex b : hosts[r][static_cast<std::size_t>(l.src)])
                    for (NodeIndex e : hosts[r][static_cast<std::size_t>(l.dst)]) {
                        const std::string tag = std::to_string(r) + "_" + std::to_string(k) + "_" + names_[idx(b)] + "_"
                                              + names_[idx(e)];
                        const int y = var("y_" + tag, VarKind::Continuous, 0.0, 1.0);
                        ix.product[{static_cast<int>(r), static_cast<int>(k), b, e}] = y;
                        const int db = d(r, l.src, b);
                        const int de = d(r, l.dst, e);
                        add("ylo_" + tag, {{1.0, y}, {-1.0, db}, {-1.0, de}}, Sense::GreaterEqual, -1.0);
                        add("yups_" + tag, {{1.0, y}, {-1.0, db}}, Sense::LessEqual, 0.0);
                        add("yupd_" + tag, {{1.0, y}, {-1.0, de}}, Sense::LessEqual, 0.0);
                        theta_terms[idx(b)].push_back({g, y});
                        if (b != e) {
                            theta_terms[idx(e)].push_back({g, y});
                            pair_terms[{b, e}].push_back({g, y});
                        }
                    }
            }
        }

        // Aggregated traffic and its flow through the substrate.
        std::vector<std::vector<Term>> lambda_terms(n);
        for (NodeIndex b : proc)
            for (NodeIndex e : proc) {
                const auto it = pair_terms.find({b, e});
                if (it == pair_terms.end())
                    continue;
                const std::string tag = names_[idx(b)] + "_" + names_[idx(e)];
                const int L = var("L_" + tag, VarKind::Continuous, 0.0, kInf);
                ix.traffic[{b, e}] = L;
                std::vector<Term> t{{1.0, L}};
                for (const Term& y : it->second)
                    t.push_back({-y.coef, y.var});
                add("trf_" + tag, std::move(t), Sense::Equal, 0.0);

                for (std::size_t a = 0; a < n; ++a)
                    for (NodeIndex c : sub_.neighbors(static_cast<NodeIndex>(a))) {
                        const auto from = static_cast<NodeIndex>(a);
                        ix.flow[{b, e, from, c}] =
                            var("f_" + tag + "_" + names_[a] + "_" + names_[idx(c)], VarKind::Continuous, 0.0, kInf);
                    }
                for (std::size_t a = 0; a < n; ++a) {
                    const auto node = static_cast<NodeIndex>(a);
                    std::vector<Term> fc;
                    for (NodeIndex c : sub_.neighbors(node))
                        fc.push_back({1.0, ix.flow.at({b, e, node, c})});
                    for (NodeIndex c : sub_.neighbors(node))
                        fc.push_back({-1.0, ix.flow.at({b, e, c, node})});
                    if (node == b)
                        fc.push_back({-1.0, L});
                    if (node == e)
                        fc.push_back({1.0, L});
                    add("flow_" + tag + "_" + names_[a], std::move(fc), Sense::Equal, 0.0);

                    if (!sub_.is_metered(node))
                        continue;
                    for (NodeIndex c : sub_.neighbors(node))
                        lambda_terms[a].push_back({1.0, ix.flow.at({b, e, c, node})});
                    for (NodeIndex c : sub_.neighbors(node)) {
                        const bool counted = options_.counting == TrafficCounting::PaperLiteral ? c != e : node == b;
                        if (counted)
                            lambda_terms[a].push_back({1.0, ix.flow.at({b, e, node, c})});
                    }
                }
            }

        // Network nodes.
        for (NodeIndex node : net) {
            const Node& nd = sub_.node(node);
            const int ln = var("ln_" + names_[idx(node)], VarKind::Continuous, 0.0, kInf);
            const int be = var("be_" + names_[idx(node)], VarKind::Binary, 0.0, 1.0);
            ix.lambda[idx(node)] = ln;
            ix.beta[idx(node)] = be;
            std::vector<Term> t{{1.0, ln}};
            for (const Term& x : lambda_terms[idx(node)])
                t.push_back({-x.coef, x.var});
            add("lamn_" + names_[idx(node)], std::move(t), Sense::Equal, 0.0);
            add("ncap_" + names_[idx(node)], {{1.0, ln}, {-nd.device->capacity, be}}, Sense::LessEqual, 0.0);
            m_.objective.push_back({nd.pue_net * energy_per_bit(*nd.device), ln});
            m_.objective.push_back({nd.pue_net * effective_idle(*nd.device, delta), be});
        }

        // Processing nodes.
        for (NodeIndex p : proc) {
            const Node& nd = sub_.node(p);
            const std::string& name = names_[idx(p)];
            const int om = var("om_" + name, VarKind::Continuous, 0.0, kInf);
            const int ns = var("ns_" + name, VarKind::Integer, 0.0, nd.server_count_max);
            const int th = var("th_" + name, VarKind::Continuous, 0.0, kInf);
            const int ph = var("ph_" + name, VarKind::Binary, 0.0, 1.0);
            ix.omega[idx(p)] = om;
            ix.servers[idx(p)] = ns;
            ix.theta[idx(p)] = th;
            ix.phi[idx(p)] = ph;

            std::vector<Term> wt{{1.0, om}};
            for (std::size_t r = 0; r < vsrs_.size(); ++r)
                for (const VmNode& vm : vsrs_[r].vms) {
                    const auto it = ix.assign.find({static_cast<int>(r), vm.id, p});
                    if (it != ix.assign.end())
                        wt.push_back({-vm.flops_demand, it->second});
                }
            add("omega_" + name, std::move(wt), Sense::Equal, 0.0);
            add("srv_" + name, {{nd.server->capacity, ns}, {-1.0, om}}, Sense::GreaterEqual, 0.0);
            add("nsmax_" + name, {{1.0, ns}, {-static_cast<double>(nd.server_count_max), ph}}, Sense::LessEqual, 0.0);
            std::vector<Term> tt{{1.0, th}};
            for (const Term& x : theta_terms[idx(p)])
                tt.push_back({-x.coef, x.var});
            add("theta_" + name, std::move(tt), Sense::Equal, 0.0);
            if (nd.lan)
                add("lcap_" + name, {{1.0, th}, {-nd.lan->capacity, ph}}, Sense::LessEqual, 0.0);

            m_.objective.push_back({nd.pue_pr * energy_per_bit(*nd.server), om});
            m_.objective.push_back({nd.pue_pr * nd.server->idle_power, ns});
            if (nd.lan) {
                m_.objective.push_back({nd.pue_pr * energy_per_bit(*nd.lan), th});
                m_.objective.push_back({nd.pue_pr * effective_idle(*nd.lan, delta), ph});
            }
        }
        return std::move(m_);
    }

    bool names_unique() const { return dup_ == false; }

private:
    static std::size_t idx(NodeIndex i) { return static_cast<std::size_t>(i); }

    int d(std::size_t r, int s, NodeIndex b) const { return m_.index.assign.at({static_cast<int>(r), s, b}); }

    int var(std::string name, VarKind kind, double lo, double hi)
    {
        if (!seen_.insert(name).second)
            dup_ = true;
        m_.variables.push_back({std::move(name), kind, lo, hi});
        return static_cast<int>(m_.variables.size()) - 1;
    }

    void add(std::string name, std::vector<Term> terms, Sense sense, double rhs)
    {
        if (!seen_.insert(name).second)
            dup_ = true;
        m_.constraints.push_back({std::move(name), std::move(terms), sense, rhs});
    }

    const Substrate& sub_;
    std::span<const Vsr> vsrs_;
    PowerOptions options_;
    std::vector<std::string> names_;
    MilpModel m_;
    std::unordered_set<std::string> seen_;
    bool dup_ = false;
};

} // namespace

int MilpModel::find(const std::string& name) const
{
    for (std::size_t i = 0; i < variables.size(); ++i)
        if (variables[i].name == name)
            return static_cast<int>(i);
    return -1;
}

bool same_model(const MilpModel& a, const MilpModel& b)
{
    return a.variables == b.variables && a.constraints == b.constraints && a.objective == b.objective
        && a.objective_constant == b.objective_constant;
}

MilpModel formulate(const Substrate& sub, std::span<const Vsr> vsrs, const PowerOptions& options)
{
    for (const Vsr& v : vsrs)
        if (!validate_vsr(v, sub.topology()).empty())
            throw InputError("invalid VSR " + std::to_string(v.id));
    {
        Builder b(sub, vsrs, options, true);
        MilpModel m = b.build();
        if (b.names_unique())
            return m;
    }
    // Node ids that collide once sanitized fall back to index-based names.
    Builder b(sub, vsrs, options, false);
    return b.build();
}

VariableValues complete_values(const MilpModel& model, const Substrate& sub, std::span<const Vsr> vsrs,
                               const Placement& placement)
{
    std::vector<double> x(model.variables.size(), 0.0);
    const MilpIndex& ix = model.index;
    auto at = [&](std::size_t r, std::size_t s) -> NodeIndex {
        if (r < placement.assign.size() && s < placement.assign[r].size())
            return placement.assign[r][s];
        return -1;
    };

    for (const auto& [key, v] : ix.assign)
        if (at(static_cast<std::size_t>(std::get<0>(key)), static_cast<std::size_t>(std::get<1>(key))) == std::get<2>(key))
            x[static_cast<std::size_t>(v)] = 1.0;

    std::map<NodePair, double> traffic;
    const std::size_t n = sub.size();
    std::vector<double> theta(n, 0.0), omega(n, 0.0);
    for (std::size_t r = 0; r < vsrs.size(); ++r) {
        const Vsr& v = vsrs[r];
        for (std::size_t s = 0; s < v.vms.size(); ++s) {
            const NodeIndex b = at(r, s);
            if (b >= 0 && static_cast<std::size_t>(b) < n)
                omega[static_cast<std::size_t>(b)] += v.vms[s].flops_demand;
        }
        for (std::size_t k = 0; k < v.vlinks.size(); ++k) {
            const VirtualLink& l = v.vlinks[k];
            const NodeIndex b = at(r, static_cast<std::size_t>(l.src));
            const NodeIndex e = at(r, static_cast<std::size_t>(l.dst));
            const auto it = ix.product.find({static_cast<int>(r), static_cast<int>(k), b, e});
            if (it == ix.product.end())
                continue;
            x[static_cast<std::size_t>(it->second)] = 1.0;
            const double g = l.bitrate / 1000.0;
            theta[static_cast<std::size_t>(b)] += g;
            if (b != e) {
                theta[static_cast<std::size_t>(e)] += g;
                traffic[{b, e}] += g;
            }
        }
    }

    std::vector<double> lambda(n, 0.0);
    for (const auto& [pair, g] : traffic) {
        const auto lit = ix.traffic.find(pair);
        if (lit != ix.traffic.end())
            x[static_cast<std::size_t>(lit->second)] = g;
        const auto rit = placement.routes.find(pair);
        const std::vector<NodeIndex>& path =
            rit != placement.routes.end() ? rit->second : sub.route(pair.first, pair.second).nodes;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const auto fit = ix.flow.find({pair.first, pair.second, path[i], path[i + 1]});
            if (fit != ix.flow.end())
                x[static_cast<std::size_t>(fit->second)] += g;
        }
    }
    // Network load follows the same metering expression the model uses.
    for (const Constraint& c : model.constraints) {
        if (c.name.rfind("lamn_", 0) != 0)
            continue;
        double s = 0.0;
        for (std::size_t i = 1; i < c.terms.size(); ++i)
            s -= c.terms[i].coef * x[static_cast<std::size_t>(c.terms[i].var)];
        x[static_cast<std::size_t>(c.terms[0].var)] = s;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (ix.lambda[i] >= 0)
            lambda[i] = x[static_cast<std::size_t>(ix.lambda[i])];
        if (ix.beta[i] >= 0)
            x[static_cast<std::size_t>(ix.beta[i])] = lambda[i] > 0.0 ? 1.0 : 0.0;
        if (ix.omega[i] < 0)
            continue;
        const Node& node = sub.node(static_cast<NodeIndex>(i));
        x[static_cast<std::size_t>(ix.omega[i])] = omega[i];
        x[static_cast<std::size_t>(ix.servers[i])] = servers_for(omega[i], node.server->capacity);
        x[static_cast<std::size_t>(ix.theta[i])] = theta[i];
        x[static_cast<std::size_t>(ix.phi[i])] = omega[i] > 0.0 || theta[i] > 0.0 ? 1.0 : 0.0;
    }

    VariableValues out;
    for (std::size_t i = 0; i < x.size(); ++i)
        out.emplace(model.variables[i].name, x[i]);
    return out;
}

SolutionCheckReport check_solution(const MilpModel& model, const VariableValues& values)
{
    std::vector<double> x(model.variables.size(), 0.0);
    SolutionCheckReport rep;
    for (std::size_t i = 0; i < model.variables.size(); ++i) {
        const Variable& v = model.variables[i];
        const auto it = values.find(v.name);
        if (it == values.end())
            throw InputError("no value for variable '" + v.name + "'");
        x[i] = it->second;
        if (x[i] < v.lower - kFeasibilityTolerance || x[i] > v.upper + kFeasibilityTolerance)
            rep.bound_violations.push_back(v.name);
        if (v.kind != VarKind::Continuous && std::abs(x[i] - std::round(x[i])) > kFeasibilityTolerance)
            rep.integrality_violations.push_back(v.name);
    }
    rep.residuals.reserve(model.constraints.size());
    for (const Constraint& c : model.constraints) {
        double lhs = 0.0;
        for (const Term& t : c.terms)
            lhs += t.coef * x[static_cast<std::size_t>(t.var)];
        const double r = lhs - c.rhs;
        rep.residuals.push_back(r);
        double violation = 0.0;
        switch (c.sense) {
        case Sense::LessEqual:
            violation = std::max(0.0, r);
            break;
        case Sense::GreaterEqual:
            violation = std::max(0.0, -r);
            break;
        case Sense::Equal:
            violation = std::abs(r);
            break;
        }
        if (violation > kFeasibilityTolerance)
            rep.violated.push_back({c.name, violation});
    }
    rep.objective = model.objective_constant;
    for (const Term& t : model.objective)
        rep.objective += t.coef * x[static_cast<std::size_t>(t.var)];
    rep.feasible = rep.violated.empty() && rep.bound_violations.empty() && rep.integrality_violations.empty();
    return rep;
}

SolutionCheckReport check_placement_model(const Substrate& sub, std::span<const Vsr> vsrs, const Placement& placement,
                                          const PowerOptions& options)
{
    const MilpModel model = formulate(sub, vsrs, options);
    return check_solution(model, complete_values(model, sub, vsrs, placement));
}

} // namespace cfn
