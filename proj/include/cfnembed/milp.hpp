// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CFNEMBED_MILP_HPP
#define CFNEMBED_MILP_HPP

#include "cfnembed/power.hpp"

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace cfn {

enum class VarKind
{
    Continuous,
    Integer,
    Binary,
};

enum class Sense
{
    LessEqual,
    Equal,
    GreaterEqual,
};

struct Variable
{
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = 0.0;
    double upper = 0.0;

    bool operator==(const Variable&) const = default;
};

struct Term
{
    double coef = 0.0;
    int var = -1; // position in MilpModel::variables

    bool operator==(const Term&) const = default;
};

struct Constraint
{
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::Equal;
    double rhs = 0.0;

    bool operator==(const Constraint&) const = default;
};

/// Positions of the variables behind each model quantity; -1 when absent.
struct MilpIndex
{
    std::map<std::tuple<int, int, NodeIndex>, int> assign;                     // (vsr pos, vm, node) -> d
    std::map<std::tuple<int, int, NodeIndex, NodeIndex>, int> product;         // (vsr pos, vlink, b, e) -> y
    std::map<NodePair, int> traffic;                                           // (b, e) -> L, Gbps
    std::map<std::tuple<NodeIndex, NodeIndex, NodeIndex, NodeIndex>, int> flow; // (b, e, m, n) -> f, Gbps
    std::vector<int> lambda, beta;                                             // per node
    std::vector<int> omega, servers, theta, phi;                               // per node
};

/// Minimization model. Traffic variables are in Gbps.
struct MilpModel
{
    std::vector<Variable> variables;
    std::vector<Constraint> constraints;
    std::vector<Term> objective;
    double objective_constant = 0.0;
    MilpIndex index;

    /// Position of a variable by name, -1 when absent.
    int find(const std::string& name) const;
};

/// Structural equality of two models (variables, constraints, objective);
/// the semantic index is ignored.
bool same_model(const MilpModel& a, const MilpModel& b);

MilpModel formulate(const Substrate& substrate, std::span<const Vsr> vsrs, const PowerOptions& options = {});

using VariableValues = std::map<std::string, double>;

/// Values of every model variable implied by a placement and its routes.
VariableValues complete_values(const MilpModel& model, const Substrate& substrate, std::span<const Vsr> vsrs,
                               const Placement& placement);

struct ConstraintViolation
{
    std::string name;
    double violation = 0.0; // positive amount by which the constraint fails
};

struct SolutionCheckReport
{
    std::vector<double> residuals; // per constraint, lhs - rhs
    std::vector<ConstraintViolation> violated;
    std::vector<std::string> bound_violations;
    std::vector<std::string> integrality_violations;
    double objective = 0.0;
    bool feasible = false;
};

inline constexpr double kFeasibilityTolerance = 1e-6;

/// Throws InputError when a variable has no value.
SolutionCheckReport check_solution(const MilpModel& model, const VariableValues& values);

/// Evaluate a placement end to end: formulate, complete and check.
SolutionCheckReport check_placement_model(const Substrate& substrate, std::span<const Vsr> vsrs,
                                          const Placement& placement, const PowerOptions& options = {});

void write_lp(const MilpModel& model, std::ostream& out);
std::string to_lp(const MilpModel& model);
/// Writes the LP text to a file; throws IoError.
void export_lp(const MilpModel& model, const std::string& path);

/// Parses LP text written by write_lp (and the common subset of the format).
/// Throws ParseError.
MilpModel parse_lp(std::string_view text);

} // namespace cfn

#endif
