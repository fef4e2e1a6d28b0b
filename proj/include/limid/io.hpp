#pragma once

#include <charconv>
#include <cstdio>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "limid/errors.hpp"
#include "limid/model.hpp"

namespace limid {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& tok, int line) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ParseError(line, "expected a number, got '" + tok + "'");
    return v;
}

inline long parse_int(const std::string& tok, int line) {
    long v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ParseError(line, "expected an integer, got '" + tok + "'");
    return v;
}

/// Parse LIMID-text-v1. Line-based, '#' starts a comment, tokens separated by
/// whitespace. Declarations assign ids in order of appearance.
inline Limid parse_limid(std::istream& in) {
    Limid l;
    bool saw_header = false;
    std::vector<char> has_cpt, has_util;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        const std::string& kw = tok[0];
        if (!saw_header) {
            if (kw != "limid" || tok.size() != 2)
                throw ParseError(line_no, "expected 'limid <name>' as the first directive");
            l.name = tok[1];
            saw_header = true;
            continue;
        }
        auto declare = [&](VarKind kind, int cardinality) {
            if (l.find(tok[1]))
                throw SemanticError("variable '" + tok[1] + "' declared twice");
            Variable v;
            v.id = l.num_vars();
            v.name = tok[1];
            v.kind = kind;
            v.cardinality = cardinality;
            l.variables.push_back(v);
            l.parents.emplace_back();
            l.cpts.emplace_back();
            l.utils.emplace_back();
            has_cpt.push_back(0);
            has_util.push_back(0);
        };
        auto lookup = [&](const std::string& name) {
            auto id = l.find(name);
            if (!id) throw SemanticError("reference to undeclared variable '" + name + "'");
            return *id;
        };
        if (kw == "chance" || kw == "decision") {
            if (tok.size() != 3) throw ParseError(line_no, "expected '" + kw + " <name> <cardinality>'");
            long card = parse_int(tok[2], line_no);
            if (card < 1) throw SemanticError("cardinality of '" + tok[1] + "' must be positive");
            declare(kw == "chance" ? VarKind::Chance : VarKind::Decision, static_cast<int>(card));
        } else if (kw == "utility") {
            if (tok.size() != 2) throw ParseError(line_no, "expected 'utility <name>'");
            declare(VarKind::Utility, 0);
        } else if (kw == "parents") {
            if (tok.size() < 2) throw ParseError(line_no, "expected 'parents <child> [<parent> ...]'");
            VarId child = lookup(tok[1]);
            if (!l.parents[child].empty())
                throw SemanticError("parents of '" + tok[1] + "' listed twice");
            for (std::size_t i = 2; i < tok.size(); ++i) {
                VarId p = lookup(tok[i]);
                if (l.var(p).kind == VarKind::Utility)
                    throw SemanticError("utility '" + tok[i] + "' cannot be a parent");
                l.parents[child].push_back(p);
            }
        } else if (kw == "cpt") {
            if (tok.size() < 2) throw ParseError(line_no, "expected 'cpt <chance> <values...>'");
            VarId v = lookup(tok[1]);
            if (!l.is_chance(v)) throw SemanticError("'" + tok[1] + "' is not a chance variable");
            if (has_cpt[v]) throw SemanticError("cpt of '" + tok[1] + "' listed twice");
            for (std::size_t i = 2; i < tok.size(); ++i)
                l.cpts[v].push_back(parse_double(tok[i], line_no));
            if (l.cpts[v].size() != l.cpt_len(v))
                throw SemanticError("cpt of '" + tok[1] + "' has " + std::to_string(l.cpts[v].size()) +
                                    " values, expected " + std::to_string(l.cpt_len(v)));
            has_cpt[v] = 1;
        } else if (kw == "util") {
            if (tok.size() < 2) throw ParseError(line_no, "expected 'util <utility> <values...>'");
            VarId v = lookup(tok[1]);
            if (!l.is_utility(v)) throw SemanticError("'" + tok[1] + "' is not a utility variable");
            if (has_util[v]) throw SemanticError("util of '" + tok[1] + "' listed twice");
            for (std::size_t i = 2; i < tok.size(); ++i)
                l.utils[v].push_back(parse_double(tok[i], line_no));
            if (l.utils[v].size() != l.parent_states(v))
                throw SemanticError("util of '" + tok[1] + "' has " + std::to_string(l.utils[v].size()) +
                                    " values, expected " + std::to_string(l.parent_states(v)));
            has_util[v] = 1;
        } else if (kw == "order") {
            if (!l.declared_order.empty()) throw SemanticError("order listed twice");
            for (std::size_t i = 1; i < tok.size(); ++i) {
                VarId d = lookup(tok[i]);
                if (!l.is_decision(d))
                    throw SemanticError("'" + tok[i] + "' in order is not a decision");
                l.declared_order.push_back(d);
            }
        } else {
            throw ParseError(line_no, "unknown directive '" + kw + "'");
        }
    }
    if (!saw_header) throw ParseError(line_no == 0 ? 1 : line_no, "empty input, expected 'limid <name>'");
    for (VarId v = 0; v < l.num_vars(); ++v) {
        if (l.is_chance(v) && !has_cpt[v])
            throw SemanticError("chance variable '" + l.var(v).name + "' has no cpt");
        if (l.is_utility(v) && !has_util[v])
            throw SemanticError("utility variable '" + l.var(v).name + "' has no util table");
    }
    return l;
}

inline Limid parse_limid(const std::string& text) {
    std::istringstream in(text);
    return parse_limid(in);
}

/// Canonical form: declarations in id order, then parents, cpt, and util lines
/// in id order, then the explicit order directive if one was given. Values are
/// printed in shortest round-trip form, so serialize(parse(s)) is a fixpoint.
inline std::string serialize_limid(const Limid& l) {
    std::ostringstream out;
    out << "limid " << l.name << "\n";
    for (const auto& v : l.variables) {
        switch (v.kind) {
            case VarKind::Chance: out << "chance " << v.name << " " << v.cardinality << "\n"; break;
            case VarKind::Decision: out << "decision " << v.name << " " << v.cardinality << "\n"; break;
            case VarKind::Utility: out << "utility " << v.name << "\n"; break;
        }
    }
    for (VarId v = 0; v < l.num_vars(); ++v) {
        if (l.parents[v].empty()) continue;
        out << "parents " << l.var(v).name;
        for (VarId p : l.parents[v]) out << " " << l.var(p).name;
        out << "\n";
    }
    for (VarId v = 0; v < l.num_vars(); ++v) {
        if (!l.is_chance(v)) continue;
        out << "cpt " << l.var(v).name;
        for (double x : l.cpts[v]) out << " " << format_double(x);
        out << "\n";
    }
    for (VarId v = 0; v < l.num_vars(); ++v) {
        if (!l.is_utility(v)) continue;
        out << "util " << l.var(v).name;
        for (double x : l.utils[v]) out << " " << format_double(x);
        out << "\n";
    }
    if (!l.declared_order.empty()) {
        out << "order";
        for (VarId d : l.declared_order) out << " " << l.var(d).name;
        out << "\n";
    }
    return out.str();
}

}  // namespace limid
