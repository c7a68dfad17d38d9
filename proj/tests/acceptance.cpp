// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit code
// is nonzero when any selected criterion fails.

#include "cfnembed/errors.hpp"
#include "cfnembed/harness.hpp"
#include "cfnembed/json_io.hpp"
#include "cfnembed/milp.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef CFN_SOURCE_DIR
#define CFN_SOURCE_DIR "."
#endif

namespace {

using namespace cfn;

struct Outcome
{
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* format, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, a);
    return buf;
}

// Model/evaluator agreement for one solved instance; empty when consistent.
std::string consistency(const Substrate& sub, std::span<const Vsr> vsrs, const Solution& s, const PowerOptions& power)
{
    if (s.status == SolveStatus::Infeasible)
        return {};
    const PowerBreakdown eval = evaluate_placement(sub, vsrs, s.placement, power);
    if (std::abs(eval.total - s.objective) > 1e-9)
        return "objective differs from evaluate_placement";
    const SolutionCheckReport report = check_placement_model(sub, vsrs, s.placement, power);
    if (!report.feasible)
        return "check_solution reports a violation"
             + (report.violated.empty() ? std::string() : " (" + report.violated.front().name + ")");
    if (std::abs(report.objective - eval.total) > 1e-6)
        return "model objective " + fmt("%.9g", report.objective) + " vs evaluated " + fmt("%.9g", eval.total);
    return {};
}

class Context
{
public:
    explicit Context(std::string scenario_path) : path_(std::move(scenario_path)) {}

    const Scenario& scenario()
    {
        if (!scenario_)
            scenario_ = load_scenario(path_);
        return *scenario_;
    }

    const Substrate& substrate()
    {
        if (!substrate_)
            substrate_ = std::make_unique<Substrate>(scenario().topology);
        return *substrate_;
    }

    const ResultTable& sweep()
    {
        if (!table_)
            table_ = run_sweep(scenario());
        return *table_;
    }

    // Instances solved by the oracle-equivalence check: (index, consistency error).
    std::vector<std::string> consistency_errors;
    int consistency_checked = 0;

private:
    std::string path_;
    std::optional<Scenario> scenario_;
    std::unique_ptr<Substrate> substrate_;
    std::optional<ResultTable> table_;
};

Outcome table_fidelity(Context&)
{
    const DefaultTopologyConfig c;
    struct Row
    {
        const char* name;
        double measured;
        double expected;
    };
    const Row rows[] = {
        {"ONU", energy_per_bit(c.onu), 0.6},
        {"OLT", energy_per_bit(c.olt), 0.22},
        {"metro router", energy_per_bit(c.metro_router), 0.08},
        {"metro switch", energy_per_bit(c.metro_switch), 0.08},
        {"IoT", energy_per_bit(c.iot_server), 0.35},
        {"AF", energy_per_bit(c.af_server), 0.67},
        {"MF", energy_per_bit(c.mf_server), 0.67},
        {"CDC", energy_per_bit(c.cdc_server), 0.55},
    };
    Outcome out;
    std::ostringstream d;
    for (const Row& r : rows) {
        const bool ok = std::abs(r.measured - r.expected) <= 0.01 + 1e-12;
        out.pass = out.pass && ok;
        d << r.name << "=" << fmt("%.4f", r.measured) << (ok ? "" : "(!)") << " ";
    }
    out.detail = d.str();
    return out;
}

Outcome oracle_equivalence(Context& ctx)
{
    const int instances = 120;
    int mismatches = 0, heuristic_below = 0, infeasible = 0, bad_gap = 0;
    double worst_heuristic_gap = 0.0;
    std::string first;
    for (int seed = 1; seed <= instances; ++seed) {
        DefaultTopologyConfig tc;
        tc.iot_count = 3;
        tc.zone_count = 2;
        tc.seed = static_cast<std::uint64_t>(seed);
        const Substrate sub(build_default_cfn(tc));

        WorkloadSpec w;
        w.vsr_count = 1 + seed % 3;
        w.vms_per_vsr = 3;
        w.seed = static_cast<std::uint64_t>(1000 + seed);
        w.vlink_pattern = seed % 2 ? VlinkPattern::Chain : VlinkPattern::Star;
        if (seed % 5 == 0)
            w.flops_range = {8.0, 20.0};
        const auto vsrs = generate_vsrs(w, sub.topology());

        SolveOptions options;
        options.power.counting = seed % 4 == 3 ? TrafficCounting::CountOnce : TrafficCounting::PaperLiteral;
        const Solution exact = solve_exact_enumeration(sub, vsrs, {}, options);
        const Solution bnb = solve_branch_and_bound(sub, vsrs, {}, options);
        const Solution heur = solve_heuristic(sub, vsrs, {}, options);

        if (exact.status != bnb.status || exact.objective != bnb.objective) {
            ++mismatches;
            if (first.empty())
                first = "seed " + std::to_string(seed) + ": enumeration " + fmt("%.12g", exact.objective)
                      + " vs branch-and-bound " + fmt("%.12g", bnb.objective);
        }
        if (exact.status == SolveStatus::Infeasible) {
            ++infeasible;
            continue;
        }
        if (heur.status != SolveStatus::Infeasible) {
            if (heur.objective < exact.objective)
                ++heuristic_below;
            if (!(heur.gap >= 0.0 && std::isfinite(heur.gap)))
                ++bad_gap;
            worst_heuristic_gap = std::max(worst_heuristic_gap, (heur.objective - exact.objective) / exact.objective);
        }
        for (const Solution* s : {&exact, &bnb, &heur}) {
            ++ctx.consistency_checked;
            const std::string e = consistency(sub, vsrs, *s, options.power);
            if (!e.empty())
                ctx.consistency_errors.push_back("small seed " + std::to_string(seed) + ": " + e);
        }
    }
    Outcome out;
    out.pass = mismatches == 0 && heuristic_below == 0 && bad_gap == 0 && ctx.consistency_errors.empty();
    std::ostringstream d;
    d << instances << " instances (" << infeasible << " infeasible), mismatches=" << mismatches
      << " heuristic_below_exact=" << heuristic_below << " worst_heuristic_excess=" << fmt("%.2f%%",
                                                                                          100.0 * worst_heuristic_gap)
      << " check_failures=" << ctx.consistency_errors.size();
    if (!first.empty())
        d << "; " << first;
    out.detail = d.str();
    return out;
}

Outcome dominance(Context& ctx)
{
    const ResultTable& t = ctx.sweep();
    const Scenario& sc = ctx.scenario();
    Outcome out;
    int points = 0;
    std::string worst;
    for (int n = sc.sweep.from; n <= sc.sweep.to; n += sc.sweep.step) {
        const ResultRow* cfn = t.find(n, "CFN");
        const ResultRow* cdc = t.find(n, "CDC");
        if (!cfn || !cdc || !cfn->solved() || !cdc->solved()) {
            out.pass = false;
            worst = "missing or unsolved row at " + std::to_string(n);
            continue;
        }
        ++points;
        if (cfn->total_w > cdc->total_w) {
            out.pass = false;
            worst = "point " + std::to_string(n) + ": CFN " + fmt("%.6g", cfn->total_w) + " > CDC "
                  + fmt("%.6g", cdc->total_w);
        }
    }
    out.detail = std::to_string(points) + " points" + (worst.empty() ? "" : "; " + worst);
    return out;
}

Outcome fog_bypass(Context& ctx)
{
    Outcome out;
    int points = 0;
    for (const ResultRow& r : ctx.sweep().rows) {
        if (r.strategy != "CFN")
            continue;
        ++points;
        if (!r.solved() || r.omega_af != 0.0 || r.omega_mf != 0.0) {
            out.pass = false;
            out.detail = "point " + std::to_string(r.vsr_count) + ": omega_af=" + fmt("%.6g", r.omega_af)
                       + " omega_mf=" + fmt("%.6g", r.omega_mf) + "; ";
        }
    }
    out.detail += std::to_string(points) + " CFN points";
    return out;
}

double layer_capacity(const Substrate& sub, NodeKind kind)
{
    double cap = 0.0;
    for (NodeIndex p : sub.processing_nodes())
        if (sub.node(p).kind == kind)
            cap += sub.node(p).server->capacity * sub.node(p).server_count_max;
    return cap;
}

Outcome spill(Context& ctx)
{
    const Scenario& sc = ctx.scenario();
    const Substrate& sub = ctx.substrate();
    const double cap = layer_capacity(sub, NodeKind::IoT);
    double granularity = 0.0;
    for (NodeIndex p : sub.processing_nodes())
        if (sub.node(p).kind == NodeKind::IoT)
            granularity = std::max(granularity, sub.node(p).server->capacity);

    // First sweep point where the exact series moves work to the CDC; past
    // the sweep, the first count whose demand exceeds the IoT layer.
    int point = -1;
    for (const ResultRow& r : ctx.sweep().rows)
        if (point < 0 && r.strategy == "CFN" && r.solved() && r.omega_cdc > 0.0)
            point = r.vsr_count;
    for (int n = sc.sweep.to + 1; n <= sc.sweep.to + 40 && point < 0; ++n)
        if (total_demand(sweep_batch(sc, n)).gflops > cap)
            point = n;
    Outcome out;
    if (point < 0) {
        out.pass = false;
        out.detail = "no spill found";
        return out;
    }
    const auto batch = sweep_batch(sc, point);
    const auto prev_batch = sweep_batch(sc, point - 1);
    const Solution s = run_strategy(sub, batch, "CFN", sc);
    const Solution prev = run_strategy(sub, prev_batch, "CFN", sc);
    const ResultRow row = make_row(sub, point, "CFN", s, false);
    const ResultRow prow = make_row(sub, point - 1, "CFN", prev, false);
    for (const auto& [b, sol] : {std::pair{&batch, &s}, std::pair{&prev_batch, &prev}}) {
        ++ctx.consistency_checked;
        const std::string e = consistency(sub, *b, *sol, sc.power);
        if (!e.empty())
            ctx.consistency_errors.push_back("spill point: " + e);
    }

    const bool cdc_used = row.solved() && row.omega_cdc > 0.0;
    const bool iot_full = row.solved() && std::abs(row.omega_iot - cap) <= granularity;
    const bool spike = row.solved() && prow.solved() && row.total_w > 1.5 * prow.total_w;
    out.pass = cdc_used && iot_full && spike;
    std::ostringstream d;
    d << "point " << point << " (demand " << fmt("%.2f", total_demand(batch).gflops) << ", IoT capacity "
      << fmt("%.1f", cap) << ", status " << to_string(s.status) << "): omega_cdc=" << fmt("%.2f", row.omega_cdc)
      << (cdc_used ? " ok" : " FAIL") << ", omega_iot=" << fmt("%.2f", row.omega_iot) << " vs "
      << fmt("%.1f", cap) << "+-" << fmt("%.1f", granularity) << (iot_full ? " ok" : " FAIL")
      << ", total " << fmt("%.2f", row.total_w) << " vs previous " << fmt("%.2f", prow.total_w) << " (x"
      << fmt("%.2f", prow.total_w > 0 ? row.total_w / prow.total_w : 0.0) << ")" << (spike ? " ok" : " FAIL");
    out.detail = d.str();
    return out;
}

Outcome savings_band(Context& ctx)
{
    const SavingsSummary s = savings_summary(ctx.sweep(), "CDC", "CFN");
    Outcome out;
    const bool avg_ok = s.avg >= 50.0 && s.avg <= 90.0;
    const bool min_ok = s.min >= 10.0;
    const bool max_ok = s.max <= 95.0;
    out.pass = avg_ok && min_ok && max_ok;
    std::ostringstream d;
    d << "measured avg=" << fmt("%.1f", s.avg) << "%" << (avg_ok ? "" : "(!)") << " min=" << fmt("%.1f", s.min)
      << "%" << (min_ok ? "" : "(!)") << " max=" << fmt("%.1f", s.max) << "%" << (max_ok ? "" : "(!)")
      << " over " << s.points << " points; reference avg=68% min=19% max=91%";
    out.detail = d.str();
    return out;
}

Outcome model_consistency(Context& ctx)
{
    // The small instances and the spill point register their checks when run.
    if (ctx.consistency_checked == 0) {
        oracle_equivalence(ctx);
        spill(ctx);
    }
    const Scenario& sc = ctx.scenario();
    const Substrate& sub = ctx.substrate();
    for (const ResultRow& r : ctx.sweep().rows) {
        if (!r.solved())
            continue;
        const auto batch = sweep_batch(sc, r.vsr_count);
        ++ctx.consistency_checked;
        const std::string e = consistency(sub, batch, r.solution, sc.power);
        if (!e.empty())
            ctx.consistency_errors.push_back("sweep point " + std::to_string(r.vsr_count) + " " + r.strategy + ": "
                                             + e);
    }
    Outcome out;
    out.pass = ctx.consistency_errors.empty();
    out.detail = std::to_string(ctx.consistency_checked) + " solutions checked, "
               + std::to_string(ctx.consistency_errors.size()) + " inconsistent";
    if (!ctx.consistency_errors.empty())
        out.detail += "; " + ctx.consistency_errors.front();
    return out;
}

Outcome determinism(Context& ctx)
{
    const std::string first = to_csv(ctx.sweep());
    const std::string second = to_csv(run_sweep(ctx.scenario()));
    Outcome out;
    out.pass = first == second;
    out.detail = std::to_string(first.size()) + " bytes, " + (out.pass ? "identical" : "different");
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance checks"};
    std::vector<int> selected;
    std::string scenario = std::string(CFN_SOURCE_DIR) + "/data/default_scenario.json";
    app.add_option("-c,--criterion", selected, "Criterion number (repeatable); all when omitted")
        ->check(CLI::Range(1, 8));
    app.add_option("--scenario", scenario, "Scenario file")->capture_default_str();
    CLI11_PARSE(app, argc, argv);
    if (selected.empty())
        selected = {1, 2, 3, 4, 5, 6, 7, 8};

    const std::vector<std::pair<const char*, std::function<Outcome(Context&)>>> criteria = {
        {"table fidelity", table_fidelity},   {"oracle equivalence", oracle_equivalence},
        {"dominance over CDC", dominance},     {"fog bypass", fog_bypass},
        {"spill behaviour", spill},            {"savings band", savings_band},
        {"model/evaluator consistency", model_consistency}, {"determinism", determinism},
    };

    Context ctx(scenario);
    int failed = 0;
    for (int id : selected) {
        const auto& [name, check] = criteria[static_cast<std::size_t>(id - 1)];
        Outcome o;
        try {
            o = check(ctx);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("error: ") + e.what();
        }
        std::printf("criterion %d %-28s %s  %s\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
