// Copyright 2026 The cfnembed Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfnembed/errors.hpp"
#include "cfnembed/milp.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace cfn {

namespace {

std::string number(double v)
{
    if (std::isinf(v))
        return v > 0 ? "+inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_terms(std::ostream& out, const MilpModel& m, const std::vector<Term>& terms)
{
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const Term& t = terms[i];
        const bool negative = std::signbit(t.coef);
        if (i > 0 || negative)
            out << (negative ? "- " : "+ ");
        out << number(std::abs(t.coef)) << ' ' << m.variables[static_cast<std::size_t>(t.var)].name;
        if (i + 1 < terms.size())
            out << ' ';
    }
}

std::string_view sense_text(Sense s)
{
    switch (s) {
    case Sense::LessEqual:
        return "<=";
    case Sense::GreaterEqual:
        return ">=";
    case Sense::Equal:
        break;
    }
    return "=";
}

void write_names(std::ostream& out, const MilpModel& m, VarKind kind)
{
    int on_line = 0;
    for (const Variable& v : m.variables) {
        if (v.kind != kind)
            continue;
        out << ' ' << v.name;
        if (++on_line == 8) {
            out << '\n';
            on_line = 0;
        }
    }
    if (on_line > 0)
        out << '\n';
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(std::string_view s)
{
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok)
        out.push_back(tok);
    return out;
}

double parse_number(const std::string& tok, int line)
{
    const std::string l = lower(tok);
    if (l == "inf" || l == "+inf" || l == "infinity" || l == "+infinity")
        return std::numeric_limits<double>::infinity();
    if (l == "-inf" || l == "-infinity")
        return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* begin = tok.data() + (tok.size() > 1 && tok[0] == '+' ? 1 : 0);
    const auto [ptr, ec] = std::from_chars(begin, tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError("LP line " + std::to_string(line) + ": bad number '" + tok + "'");
    return v;
}

bool is_number(const std::string& tok)
{
    if (tok.empty())
        return false;
    const std::string l = lower(tok);
    if (l == "inf" || l == "+inf" || l == "-inf" || l == "infinity" || l == "+infinity" || l == "-infinity")
        return true;
    const char c = tok[0];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.'
        || ((c == '+' || c == '-') && tok.size() > 1
            && (std::isdigit(static_cast<unsigned char>(tok[1])) || tok[1] == '.'));
}

bool valid_name(const std::string& s)
{
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

class Reader
{
public:
    MilpModel read(std::string_view text)
    {
        enum class Section { None, Objective, Constraints, Bounds, Generals, Binaries, End };
        Section section = Section::None;
        std::string pending;
        int pending_line = 0;
        auto flush = [&]() {
            if (pending.empty())
                return;
            if (section == Section::Objective)
                objective(pending, pending_line);
            else if (section == Section::Constraints)
                constraint(pending, pending_line);
            pending.clear();
        };

        std::istringstream in{std::string(text)};
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            const auto comment = raw.find('\\');
            const std::string s = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
            if (s.empty())
                continue;
            const std::string key = lower(s);
            Section next = Section::None;
            if (key == "minimize" || key == "minimise" || key == "min")
                next = Section::Objective;
            else if (key == "subject to" || key == "such that" || key == "st" || key == "s.t.")
                next = Section::Constraints;
            else if (key == "bounds")
                next = Section::Bounds;
            else if (key == "generals" || key == "general" || key == "integers")
                next = Section::Generals;
            else if (key == "binaries" || key == "binary")
                next = Section::Binaries;
            else if (key == "end")
                next = Section::End;
            if (next != Section::None) {
                flush();
                section = next;
                if (section == Section::End)
                    break;
                continue;
            }
            switch (section) {
            case Section::Objective:
            case Section::Constraints:
                // A line with a label starts a new row; others continue it.
                if (s.find(':') != std::string::npos && !pending.empty())
                    flush();
                if (pending.empty())
                    pending_line = line;
                pending += ' ' + s;
                break;
            case Section::Bounds:
                bound(s, line);
                break;
            case Section::Generals:
                for (const std::string& name : split(s))
                    kind_of(name, VarKind::Integer, line);
                break;
            case Section::Binaries:
                for (const std::string& name : split(s))
                    kind_of(name, VarKind::Binary, line);
                break;
            case Section::None:
            case Section::End:
                throw ParseError("LP line " + std::to_string(line) + ": content outside a section");
            }
        }
        flush();
        if (section != Section::End)
            throw ParseError("LP text lacks an End line");
        return finish();
    }

private:
    struct RawVar
    {
        VarKind kind = VarKind::Continuous;
        double lower = 0.0;
        double upper = std::numeric_limits<double>::infinity();
        bool bounded = false;
        int bound_order = -1;
        int appearance = 0;
    };

    int touch(const std::string& name, int line)
    {
        if (!valid_name(name))
            throw ParseError("LP line " + std::to_string(line) + ": invalid variable name '" + name + "'");
        const auto it = vars_.find(name);
        if (it != vars_.end())
            return it->second;
        const int id = static_cast<int>(raw_.size());
        vars_.emplace(name, id);
        names_.push_back(name);
        raw_.push_back({});
        raw_.back().appearance = id;
        return id;
    }

    // Parses "[label:] term term ... [sense rhs]".
    std::vector<Term> terms(const std::vector<std::string>& toks, std::size_t from, std::size_t to, double& constant,
                            int line)
    {
        std::vector<Term> out;
        double sign = 1.0;
        double coef = 1.0;
        bool have_coef = false;
        for (std::size_t i = from; i < to; ++i) {
            const std::string& t = toks[i];
            if (t == "+" || t == "-") {
                if (have_coef) {
                    constant += sign * coef;
                    have_coef = false;
                    coef = 1.0;
                }
                sign = t == "-" ? -1.0 : 1.0;
                continue;
            }
            if (is_number(t)) {
                if (have_coef)
                    throw ParseError("LP line " + std::to_string(line) + ": two numbers in a row");
                coef = parse_number(t, line);
                have_coef = true;
                continue;
            }
            out.push_back({sign * coef, touch(t, line)});
            sign = 1.0;
            coef = 1.0;
            have_coef = false;
        }
        if (have_coef)
            constant += sign * coef;
        return out;
    }

    void objective(const std::string& text, int line)
    {
        std::string body = text;
        const auto colon = body.find(':');
        if (colon != std::string::npos)
            body = body.substr(colon + 1);
        const auto toks = split(body);
        double constant = 0.0;
        objective_ = terms(toks, 0, toks.size(), constant, line);
        constant_ = constant;
    }

    void constraint(const std::string& text, int line)
    {
        const auto colon = text.find(':');
        if (colon == std::string::npos)
            throw ParseError("LP line " + std::to_string(line) + ": constraint without a name");
        Constraint c;
        c.name = trim(text.substr(0, colon));
        auto toks = split(text.substr(colon + 1));
        std::size_t pos = toks.size();
        for (std::size_t i = 0; i < toks.size(); ++i)
            if (toks[i] == "<=" || toks[i] == ">=" || toks[i] == "=" || toks[i] == "=<" || toks[i] == "=>"
                || toks[i] == "<" || toks[i] == ">") {
                pos = i;
                break;
            }
        if (pos + 2 != toks.size())
            throw ParseError("LP line " + std::to_string(line) + ": constraint '" + c.name + "' needs 'sense rhs'");
        const std::string& s = toks[pos];
        c.sense = (s == "<=" || s == "=<" || s == "<") ? Sense::LessEqual
                : (s == ">=" || s == "=>" || s == ">") ? Sense::GreaterEqual
                                                      : Sense::Equal;
        double constant = 0.0;
        c.terms = terms(toks, 0, pos, constant, line);
        c.rhs = parse_number(toks[pos + 1], line) - constant;
        constraints_.push_back(std::move(c));
    }

    void bound(const std::string& s, int line)
    {
        const auto toks = split(s);
        auto set = [&](const std::string& name, double lo, double hi) {
            const int id = touch(name, line);
            RawVar& v = raw_[static_cast<std::size_t>(id)];
            v.lower = lo;
            v.upper = hi;
            v.bounded = true;
            if (v.bound_order < 0)
                v.bound_order = bound_count_++;
        };
        if (toks.size() == 2 && lower(toks[1]) == "free") {
            set(toks[0], -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
        } else if (toks.size() == 5 && toks[1] == "<=" && toks[3] == "<=") {
            set(toks[2], parse_number(toks[0], line), parse_number(toks[4], line));
        } else if (toks.size() == 3 && (toks[1] == "<=" || toks[1] == ">=" || toks[1] == "=")) {
            const int id = touch(toks[0], line);
            RawVar v = raw_[static_cast<std::size_t>(id)];
            const double x = parse_number(toks[2], line);
            if (toks[1] == "<=")
                set(toks[0], v.lower, x);
            else if (toks[1] == ">=")
                set(toks[0], x, v.upper);
            else
                set(toks[0], x, x);
        } else {
            throw ParseError("LP line " + std::to_string(line) + ": unsupported bound '" + s + "'");
        }
    }

    void kind_of(const std::string& name, VarKind kind, int line)
    {
        RawVar& v = raw_[static_cast<std::size_t>(touch(name, line))];
        v.kind = kind;
        if (kind == VarKind::Binary && !v.bounded) {
            v.lower = 0.0;
            v.upper = 1.0;
        }
    }

    MilpModel finish()
    {
        // Variables listed under Bounds come first, in that order.
        std::vector<int> order(raw_.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            const RawVar& x = raw_[static_cast<std::size_t>(a)];
            const RawVar& y = raw_[static_cast<std::size_t>(b)];
            const bool bx = x.bound_order >= 0;
            const bool by = y.bound_order >= 0;
            if (bx != by)
                return bx;
            if (bx)
                return x.bound_order < y.bound_order;
            return x.appearance < y.appearance;
        });
        std::vector<int> position(raw_.size());
        MilpModel m;
        for (std::size_t i = 0; i < order.size(); ++i) {
            const RawVar& v = raw_[static_cast<std::size_t>(order[i])];
            position[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
            m.variables.push_back({names_[static_cast<std::size_t>(order[i])], v.kind, v.lower, v.upper});
        }
        auto remap = [&](std::vector<Term> terms) {
            for (Term& t : terms)
                t.var = position[static_cast<std::size_t>(t.var)];
            return terms;
        };
        m.objective = remap(objective_);
        m.objective_constant = constant_;
        for (Constraint& c : constraints_) {
            c.terms = remap(std::move(c.terms));
            m.constraints.push_back(std::move(c));
        }
        return m;
    }

    std::unordered_map<std::string, int> vars_;
    std::vector<std::string> names_;
    std::vector<RawVar> raw_;
    int bound_count_ = 0;
    std::vector<Term> objective_;
    double constant_ = 0.0;
    std::vector<Constraint> constraints_;
};

} // namespace

void write_lp(const MilpModel& m, std::ostream& out)
{
    out << "Minimize\n obj: ";
    write_terms(out, m, m.objective);
    if (m.objective.empty())
        out << number(m.objective_constant);
    else if (m.objective_constant != 0.0)
        out << (std::signbit(m.objective_constant) ? " - " : " + ") << number(std::abs(m.objective_constant));
    out << "\nSubject To\n";
    for (const Constraint& c : m.constraints) {
        out << ' ' << c.name << ": ";
        write_terms(out, m, c.terms);
        out << ' ' << sense_text(c.sense) << ' ' << number(c.rhs) << '\n';
    }
    out << "Bounds\n";
    for (const Variable& v : m.variables)
        out << ' ' << number(v.lower) << " <= " << v.name << " <= " << number(v.upper) << '\n';
    out << "Generals\n";
    write_names(out, m, VarKind::Integer);
    out << "Binaries\n";
    write_names(out, m, VarKind::Binary);
    out << "End\n";
}

std::string to_lp(const MilpModel& model)
{
    std::ostringstream out;
    write_lp(model, out);
    return out.str();
}

void export_lp(const MilpModel& model, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    write_lp(model, out);
    out.flush();
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

MilpModel parse_lp(std::string_view text)
{
    return Reader{}.read(text);
}

} // namespace cfn
