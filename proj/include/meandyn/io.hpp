#pragma once

// JSON, CSV and text renderings, plus parsers for the command-line syntax of
// points, pairs, families and space descriptors.

#include "averaging.hpp"
#include "core.hpp"
#include "density.hpp"
#include "folner.hpp"
#include "gallery.hpp"
#include "measures.hpp"
#include "relations.hpp"
#include "space.hpp"

#include <json.hpp>

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace meandyn {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Numbers

/// Exact value with a float rendering next to it.
inline Json exact_json(const Rational& q)
{
    return Json{{"exact", fraction_string(q)}, {"float", to_double(q)}};
}

/// Shortest round-tripping decimal.
inline std::string float_string(double x)
{
    std::ostringstream s;
    s << std::setprecision(17) << x;
    double back = std::stod(s.str());
    for (int prec = 1; prec <= 17; ++prec) {
        std::ostringstream t;
        t << std::setprecision(prec) << x;
        if (std::stod(t.str()) == back)
            return t.str();
    }
    return s.str();
}

// ---------------------------------------------------------------------------
// Points and pairs

inline std::string coord_string(const Point& p)
{
    switch (p.coord) {
    case Coord::Int: return std::to_string(p.s);
    case Coord::PlusInf: return "+inf";
    case Coord::MinusInf: return "-inf";
    case Coord::Inf: return "inf";
    }
    return "?";
}

inline Json to_json(const Point& p)
{
    return Json{{"copy", p.copy}, {"coord", coord_string(p)}};
}

inline Json to_json(const PointPair& p)
{
    return Json::array({to_json(p.first), to_json(p.second)});
}

namespace detail {

inline Point coord_point(std::string_view c, int copy)
{
    c = trim(c);
    if (c == "inf")
        return Point::inf(copy);
    if (c == "+inf")
        return Point::plus_inf(copy);
    if (c == "-inf")
        return Point::minus_inf(copy);
    return Point::integer(parse_int(c), copy);
}

} // namespace detail

inline Point point_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("copy") || !j.contains("coord"))
        throw ParseError("a point is {\"copy\": i, \"coord\": \"s\" | \"+inf\" | \"-inf\" | \"inf\"}");
    const auto& c = j.at("coord");
    if (c.is_number_integer())
        return Point::integer(c.get<std::int64_t>(), j.at("copy").get<int>());
    return detail::coord_point(c.get<std::string>(), j.at("copy").get<int>());
}

/// "<coord>[@copy]" with coord an integer, inf, +inf or -inf; "up_X" and
/// "down_X" name copies 1 and 0. The copy defaults to the space's first one.
inline Point parse_point(std::string_view text, const Space& space)
{
    auto s = detail::trim(text);
    if (s.empty())
        throw ParseError("empty point");
    int copy = space.first_copy();
    if (s.starts_with("up_")) {
        copy = 1;
        s.remove_prefix(3);
    } else if (s.starts_with("down_")) {
        copy = 0;
        s.remove_prefix(5);
    } else if (auto at = s.find('@'); at != std::string_view::npos) {
        copy = static_cast<int>(detail::parse_int(s.substr(at + 1)));
        s = s.substr(0, at);
    }
    auto p = detail::coord_point(s, copy);
    if (!space.is_member(p))
        throw ParseError("point '" + std::string(text) + "' is not in the space");
    return space.canonical(p);
}

/// "a,b" or "(a,b)".
inline PointPair parse_pair(std::string_view text, const Space& space)
{
    auto s = detail::trim(text);
    if (s.starts_with("(") && s.ends_with(")"))
        s = s.substr(1, s.size() - 2);
    auto comma = s.find(',');
    if (comma == std::string_view::npos || s.find(',', comma + 1) != std::string_view::npos)
        throw ParseError("a pair is written 'a,b', got '" + std::string(text) + "'");
    return {parse_point(s.substr(0, comma), space), parse_point(s.substr(comma + 1), space)};
}

// ---------------------------------------------------------------------------
// Spaces

inline Json to_json(const Space& sp)
{
    Json j{{"variant", sp.kind() == SpaceKind::OnePoint ? "one_point" : "two_point"},
           {"copies", sp.copies()},
           {"action", std::string(to_string(sp.action()))},
           {"group", std::string(to_string(sp.group()))}};
    if (sp.kind() == SpaceKind::TwoPoint) {
        Json glue = Json::array();
        for (const auto& [a, b] : sp.gluings())
            glue.push_back(Json::array({to_json(a), to_json(b)}));
        j["gluings"] = glue;
        Json layout = Json::array();
        for (const auto& seg : sp.segments())
            layout.push_back({{"copy", seg.copy}, {"reversed", seg.reversed}, {"offset", seg.offset}});
        j["layout"] = layout;
    }
    return j;
}

inline ActionKind parse_action(const std::string& a)
{
    if (a == "translate")
        return ActionKind::Translate;
    if (a == "sigma")
        return ActionKind::Sigma;
    if (a == "lamplighter")
        return ActionKind::Lamplighter;
    throw ParseError("unknown action '" + a + "' (translate|sigma|lamplighter)");
}

inline Space space_from_json(const Json& j)
{
    try {
        const auto variant = j.at("variant").get<std::string>();
        const int copies = j.at("copies").get<int>();
        if (variant == "one_point")
            return Space::one_point(copies, parse_action(j.value("action", std::string("translate"))));
        if (variant != "two_point")
            throw ParseError("unknown space variant '" + variant + "' (one_point|two_point)");
        std::vector<std::pair<Point, Point>> glue;
        for (const auto& g : j.value("gluings", Json::array()))
            glue.emplace_back(point_from_json(g.at(0)), point_from_json(g.at(1)));
        std::vector<Segment> layout;
        for (const auto& s : j.value("layout", Json::array()))
            layout.push_back({s.at("copy").get<int>(), s.value("reversed", false), s.value("offset", std::int64_t{0})});
        return Space::two_point(copies, glue, parse_action(j.value("action", std::string("translate"))), layout);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad space descriptor: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Folner families

inline Json to_json(const FolnerFamily& f)
{
    switch (f.kind()) {
    case FolnerFamily::Kind::Interleaved: {
        Json parts = Json::array();
        for (const auto& p : f.parts())
            parts.push_back(to_json(p));
        return {{"kind", "interleaved"}, {"params", {{"parts", parts}}}};
    }
    case FolnerFamily::Kind::Subsequence:
        return {{"kind", "subsequence"}, {"params", {{"base", to_json(f.parts().front())}, {"indices", f.indices()}}}};
    default: return {{"kind", f.name()}};
    }
}

inline FolnerFamily family_from_json(const Json& j)
{
    try {
        const auto kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
        if (kind == "z_initial")
            return FolnerFamily::z_initial();
        if (kind == "z_centered")
            return FolnerFamily::z_centered();
        if (kind == "z_shifted")
            return FolnerFamily::z_shifted();
        if (kind == "lamp_box")
            return FolnerFamily::lamp_box();
        if (kind == "interleaved") {
            std::vector<FolnerFamily> parts;
            for (const auto& p : j.at("params").at("parts"))
                parts.push_back(family_from_json(p));
            return FolnerFamily::interleaved(parts);
        }
        if (kind == "subsequence") {
            const auto& p = j.at("params");
            return FolnerFamily::subsequence(family_from_json(p.at("base")),
                                             p.at("indices").get<std::vector<std::uint64_t>>());
        }
        throw ParseError("unknown family '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad family descriptor: ") + e.what());
    }
}

/// A bare family name or a JSON descriptor.
inline FolnerFamily parse_family(const std::string& text)
{
    auto s = detail::trim(text);
    if (s.starts_with("{")) {
        try {
            return family_from_json(Json::parse(s));
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("family JSON: ") + e.what());
        }
    }
    return family_from_json(Json(std::string(s)));
}

// ---------------------------------------------------------------------------
// Results

inline Json to_json(const HittingRecord& r)
{
    return {{"pair", to_json(r.pair)}, {"neighborhood", r.neighborhood}, {"family", r.family}, {"n", r.n},
            {"hits", r.hits},          {"size", r.size},                 {"ratio", exact_json(r.ratio)}};
}

inline Json to_json(const WitnessRecord& w)
{
    Json j{{"source", w.source},         {"index", w.index},    {"pair", to_json(w.pair)},
           {"distance", w.distance},     {"radius", w.radius},  {"n", w.n},
           {"density", exact_json(w.density)}};
    if (!w.element.empty())
        j["element"] = w.element;
    return j;
}

inline Json to_json(const Certificate& c)
{
    Json params = Json::object();
    for (const auto& [k, v] : c.parameters)
        params[k] = v;
    Json witnesses = Json::array();
    for (const auto& w : c.witnesses)
        witnesses.push_back(to_json(w));
    Json j{{"kind", std::string(to_string(c.kind))},
           {"pair", to_json(c.pair)},
           {"family", c.family},
           {"verdict", std::string(to_string(c.verdict))},
           {"threshold", exact_json(c.threshold)},
           {"radii", c.radii},
           {"parameters", params},
           {"witnesses", witnesses}};
    if (!c.note.empty())
        j["note"] = c.note;
    return j;
}

template <class P>
Json to_json(const AtomicMeasure<P>& mu)
{
    Json atoms = Json::array();
    for (const auto& [p, w] : mu.atoms())
        atoms.push_back({{"point", to_json(p)}, {"weight", exact_json(w)}});
    return {{"size", mu.size()}, {"atoms", atoms}};
}

inline Json to_json(const AverageProfile& p)
{
    Json rows = Json::array();
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        Json r{{"n", p.window.lo + i}, {"size", p.sizes[i]}, {"value", p.values[i]}};
        if (!p.exact.empty())
            r["exact"] = fraction_string(p.exact[i]);
        rows.push_back(r);
    }
    return {{"family", p.family},
            {"pair", to_json(p.pair)},
            {"window", {p.window.lo, p.window.hi}},
            {"tail_sup", p.tail_sup},
            {"stabilized", p.stabilized},
            {"profile", rows}};
}

inline Json to_json(const DensityProfile& d)
{
    Json rows = Json::array();
    for (const auto& r : d.records)
        rows.push_back(to_json(r));
    return {{"window", {d.window.lo, d.window.hi}},
            {"tail_max", exact_json(d.tail_max)},
            {"tail_argmax", d.tail_argmax},
            {"records", rows}};
}

inline Json to_json(const BanachEstimate& b)
{
    return {{"shape", b.shape},
            {"n", b.n},
            {"value", exact_json(b.value)},
            {"argmax", to_string(b.argmax)},
            {"translates", b.translates}};
}

inline Json to_json(const MecReport& m)
{
    return {{"verdict", std::string(to_string(m.verdict))},
            {"epsilon", m.epsilon},
            {"ks", m.ks},
            {"distances", m.distances},
            {"estimates", m.estimates},
            {"violating", m.violating},
            {"witness", to_json(m.witness)}};
}

inline Json to_json(const Profile& p)
{
    return {{"name", p.name},
            {"lamp_n", p.lamp_n},
            {"z_window", p.z_window},
            {"fixed_window", p.fixed_window},
            {"banach_n", p.banach_n},
            {"truncation", p.truncation}};
}

inline Json to_json(const RowResult& r)
{
    Json values = Json::object();
    for (const auto& [k, v] : r.values)
        values[k] = v;
    Json certs = Json::array();
    for (const auto& c : r.certificates)
        certs.push_back(to_json(c));
    Json j{{"id", r.id}, {"claim", r.claim}, {"status", std::string(to_string(r.status))}, {"values", values}};
    if (!r.detail.empty())
        j["detail"] = r.detail;
    j["certificates"] = certs;
    return j;
}

inline Json to_json(const Report& rep)
{
    Json rows = Json::array();
    for (const auto& r : rep.rows)
        rows.push_back(to_json(r));
    return {{"system", rep.system},
            {"profile", to_json(rep.profile)},
            {"status", rep.all_match() ? "MATCH" : (rep.any_mismatch() ? "MISMATCH" : "INCONCLUSIVE")},
            {"rows", rows}};
}

inline Json to_json(const FiniteModel& m, const Relation& r)
{
    auto name = [&](int i) { return m.classes()[static_cast<std::size_t>(i)].name; };
    Json pairs = Json::array();
    for (auto [a, b] : r.pairs)
        pairs.push_back(Json::array({name(a), name(b)}));
    Json quotient = Json::object();
    for (std::size_t i = 0; i < r.quotient.size(); ++i)
        quotient[name(static_cast<int>(i))] = r.quotient[i];
    return {{"pairs", pairs}, {"quotient", quotient}};
}

// ---------------------------------------------------------------------------
// CSV and tables

inline std::string csv(const AverageProfile& p)
{
    std::ostringstream s;
    s << "n,size,value" << (p.exact.empty() ? "" : ",exact") << "\n";
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        s << p.window.lo + i << "," << p.sizes[i] << "," << float_string(p.values[i]);
        if (!p.exact.empty())
            s << "," << fraction_string(p.exact[i]);
        s << "\n";
    }
    return s.str();
}

inline std::string csv(const DensityProfile& d)
{
    std::ostringstream s;
    s << "n,hits,size,ratio,ratio_float\n";
    for (const auto& r : d.records)
        s << r.n << "," << r.hits << "," << r.size << "," << fraction_string(r.ratio) << ","
          << float_string(to_double(r.ratio)) << "\n";
    return s.str();
}

template <class P>
std::string csv(const AtomicMeasure<P>& mu)
{
    std::ostringstream s;
    s << "point,weight,weight_float\n";
    for (const auto& [p, w] : mu.atoms())
        s << "\"" << to_string(p) << "\"," << fraction_string(w) << "," << float_string(to_double(w)) << "\n";
    return s.str();
}

inline std::string csv(const Report& rep)
{
    std::ostringstream s;
    s << "system,row,status,claim\n";
    for (const auto& r : rep.rows)
        s << rep.system << "," << r.id << "," << to_string(r.status) << ",\"" << r.claim << "\"\n";
    return s.str();
}

inline std::string table(const Report& rep)
{
    std::size_t w = 4;
    for (const auto& r : rep.rows)
        w = std::max(w, r.id.size());
    std::ostringstream s;
    s << rep.system << " [" << rep.profile.name << "]\n";
    for (const auto& r : rep.rows) {
        s << "  " << std::left << std::setw(static_cast<int>(w)) << r.id << "  " << std::setw(12) << to_string(r.status)
          << r.claim << "\n";
        if (!r.detail.empty())
            s << "  " << std::string(w, ' ') << "  " << std::string(12, ' ') << r.detail << "\n";
    }
    return s.str();
}

} // namespace meandyn
