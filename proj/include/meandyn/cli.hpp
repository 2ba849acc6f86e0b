#pragma once

// Command-line front end. run() parses argv, echoes the resolved config with
// every result and maps errors to exit codes: 0 ok, 1 mismatch in reproduce,
// 2 usage or input error, 3 budget exceeded.

#include "io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace meandyn::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_mismatch = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_budget = 3;

struct Source
{
    std::string gallery;
    std::string space;
};

struct Output
{
    std::string format = "json";
    std::string path;
};

namespace detail {

inline Window parse_window(const std::string& text)
{
    auto s = meandyn::detail::trim(text);
    auto sep = s.find_first_of(":,");
    if (sep == std::string_view::npos)
        throw ParseError("a window is written lo:hi, got '" + text + "'");
    auto lo = meandyn::detail::parse_int(s.substr(0, sep));
    auto hi = meandyn::detail::parse_int(s.substr(sep + 1));
    if (lo < 1 || hi < lo)
        throw DomainError("window must satisfy 1 <= lo <= hi");
    return {static_cast<std::uint64_t>(lo), static_cast<std::uint64_t>(hi)};
}

inline Json read_json_arg(const std::string& text)
{
    std::string body = text;
    auto t = meandyn::detail::trim(text);
    if (!t.starts_with("{")) {
        std::ifstream in{std::string(t)};
        if (!in)
            throw ParseError("cannot read space descriptor '" + text + "'");
        std::ostringstream s;
        s << in.rdbuf();
        body = s.str();
    }
    try {
        return Json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("space descriptor: ") + e.what());
    }
}

/// Gallery entry for --gallery, or a bare entry around a --space descriptor.
inline GalleryEntry resolve(const Source& src)
{
    if (!src.gallery.empty() && !src.space.empty())
        throw ParseError("give either --gallery or --space, not both");
    if (!src.gallery.empty())
        return build(src.gallery);
    if (src.space.empty())
        throw ParseError("a space is required: --gallery NAME or --space JSON");
    auto sp = space_from_json(read_json_arg(src.space));
    std::vector<FolnerFamily> fams;
    if (sp.group() == GroupKind::Lamplighter)
        fams = {FolnerFamily::lamp_box()};
    else
        fams = {FolnerFamily::z_initial(), FolnerFamily::z_centered(), FolnerFamily::z_shifted()};
    return meandyn::detail::entry("custom", "user-supplied space", sp, fams);
}

inline FolnerFamily family_or_default(const std::string& text, const GalleryEntry& e)
{
    auto f = text.empty() ? e.families.front() : parse_family(text);
    if (f.group() != e.space.group())
        throw DescriptorMismatch("family " + f.name() + " acts in " + std::string(to_string(f.group())) +
                                 ", the space in " + std::string(to_string(e.space.group())));
    return f;
}

inline Json source_json(const GalleryEntry& e)
{
    return {{"system", e.name}, {"space", to_json(e.space)}};
}

class Emitter
{
public:
    Emitter(const Output& o, std::ostream& out) : opt_(o), out_(&out)
    {
        if (opt_.format != "json" && opt_.format != "csv" && opt_.format != "table")
            throw ParseError("unknown format '" + opt_.format + "' (json|csv|table)");
        if (!opt_.path.empty()) {
            file_.open(opt_.path);
            if (!file_)
                throw ParseError("cannot write '" + opt_.path + "'");
            out_ = &file_;
        }
    }

    const std::string& format() const { return opt_.format; }

    void json(const Json& config, const Json& result)
    {
        *out_ << Json{{"config", config}, {"result", result}}.dump(2) << "\n";
    }

    /// CSV and tables carry the config as a leading comment line.
    void text(const Json& config, const std::string& body) { *out_ << "# config " << config.dump() << "\n" << body; }

private:
    Output opt_;
    std::ostream* out_;
    std::ofstream file_;
};

inline void add_output(CLI::App* app, Output& o)
{
    app->add_option("--format", o.format, "json | csv | table")->capture_default_str();
    app->add_option("-o,--output", o.path, "write to a file instead of stdout");
}

inline void add_source(CLI::App* app, Source& s)
{
    app->add_option("--gallery", s.gallery, "gallery system name");
    app->add_option("--space", s.space, "space descriptor: JSON text or a file path");
}

inline std::string kv_table(const std::vector<std::pair<std::string, std::string>>& rows)
{
    std::size_t w = 0;
    for (const auto& [k, v] : rows)
        w = std::max(w, k.size());
    std::ostringstream s;
    for (const auto& [k, v] : rows)
        s << std::left << std::setw(static_cast<int>(w) + 2) << k << v << "\n";
    return s.str();
}

inline std::string certificate_table(const Certificate& c)
{
    std::vector<std::pair<std::string, std::string>> rows{{"kind", std::string(to_string(c.kind))},
                                                          {"pair", to_string(c.pair)},
                                                          {"family", c.family},
                                                          {"verdict", std::string(to_string(c.verdict))},
                                                          {"threshold", fraction_string(c.threshold)}};
    for (const auto& [k, v] : c.parameters)
        rows.emplace_back(k, v);
    if (!c.note.empty())
        rows.emplace_back("note", c.note);
    return kv_table(rows);
}

inline CertKind parse_kind(const std::string& k)
{
    if (k == "qrms-f")
        return CertKind::QrmsF;
    if (k == "srjms-f")
        return CertKind::SrjmsF;
    if (k == "swsm-f")
        return CertKind::SwsmF;
    if (k == "qrms")
        return CertKind::QrmsBanach;
    if (k == "qrp")
        return CertKind::Qrp;
    if (k == "proximal")
        return CertKind::Proximal;
    if (k == "forward-closure")
        return CertKind::NegativeForwardClosure;
    throw ParseError("unknown detector '" + k + "' (qrms-f|srjms-f|swsm-f|qrms|qrp|proximal|forward-closure)");
}

} // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Mean equicontinuity and sensitivity toolkit", "meandyn"};
    app.require_subcommand(1);
    std::uint64_t max_atoms = Budget{}.max_atoms;
    app.add_option("--max-atoms", max_atoms, "largest Folner set that may be materialized")->capture_default_str();

    Output output;
    Source source;
    std::string family_text, pair_text, x_text, y_text, window_text = "1:60", target_text, profile_name = "quick";
    std::vector<std::string> families_text, k_text;
    std::uint64_t n = 1;
    std::uint64_t banach_n = 0;
    double radius = 0.25;
    bool exact = false;

    auto* folner = app.add_subcommand("folner", "Folner set cardinality, elements, defect or the lamplighter bound");
    std::string stat = "cardinality";
    folner->add_option("--family", family_text, "family name or JSON descriptor")->required();
    folner->add_option("--n", n, "index")->required();
    folner->add_option("--stat", stat, "cardinality | elements | defect | bound")->capture_default_str();
    folner->add_option("--k", k_text, "group elements for defect / bound, e.g. \"s^1 t{0,2}\"");
    detail::add_output(folner, output);

    auto* avg = app.add_subcommand("avg", "Cesaro averages of the metric and the D_F estimate");
    detail::add_source(avg, source);
    avg->add_option("--x", x_text, "first point")->required();
    avg->add_option("--y", y_text, "second point")->required();
    avg->add_option("--family", families_text, "family; several give a Weyl estimate");
    avg->add_option("--window", window_text, "lo:hi")->capture_default_str();
    avg->add_flag("--exact", exact, "exact rational averages");
    detail::add_output(avg, output);

    auto* density = app.add_subcommand("density", "hitting densities of a ball neighborhood");
    detail::add_source(density, source);
    density->add_option("--pair", pair_text, "start pair a,b")->required();
    density->add_option("--target", target_text, "ball center (defaults to the start pair)");
    density->add_option("--radius", radius, "ball radius in the sum metric")->capture_default_str();
    density->add_option("--family", family_text, "family name or JSON descriptor");
    density->add_option("--window", window_text, "lo:hi")->capture_default_str();
    density->add_option("--banach-n", banach_n, "Banach estimate with F_n as the shape");
    detail::add_output(density, output);

    auto* measure = app.add_subcommand("measure", "empirical measure of a pair along F_n");
    detail::add_source(measure, source);
    measure->add_option("--pair", pair_text, "start pair a,b")->required();
    measure->add_option("--family", family_text, "family name or JSON descriptor");
    measure->add_option("--n", n, "index")->required();
    measure->add_option("--target", target_text, "report W1 to the Dirac mass at this pair");
    detail::add_output(measure, output);

    auto* detect = app.add_subcommand("detect", "relation detector certificate for one pair");
    std::string kind_text;
    detect->add_option("kind", kind_text, "qrms-f | srjms-f | swsm-f | qrms | qrp | proximal | forward-closure")
        ->required();
    detail::add_source(detect, source);
    detect->add_option("--pair", pair_text, "target pair a,b")->required();
    detect->add_option("--family", family_text, "family name or JSON descriptor");
    detect->add_option("--profile", profile_name, "quick | full")->capture_default_str();
    detail::add_output(detect, output);

    auto* icer = app.add_subcommand("icer", "closed invariant equivalence relation generated by Q_rms^F evidence");
    icer->add_option("--gallery", source.gallery, "gallery system with a finite model")->required();
    icer->add_option("--family", family_text, "family name or JSON descriptor");
    icer->add_option("--profile", profile_name, "quick | full")->capture_default_str();
    detail::add_output(icer, output);

    auto* reproduce = app.add_subcommand("reproduce", "check a gallery system against its expected results");
    std::string system = "all";
    reproduce->add_option("system", system, "gallery name or all")->capture_default_str();
    reproduce->add_option("--profile", profile_name, "quick | full")->capture_default_str();
    detail::add_output(reproduce, output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        Budget budget{max_atoms};
        detail::Emitter emit(output, out);
        Json config{{"command", app.get_subcommands().front()->get_name()}, {"max_atoms", max_atoms}};
        config["format"] = output.format;

        if (*folner) {
            auto f = parse_family(family_text);
            config["family"] = to_json(f);
            config["n"] = n;
            config["stat"] = stat;
            std::vector<GroupElement> ks;
            for (const auto& k : k_text)
                ks.push_back(parse_element(k, f.group()));
            if (!ks.empty()) {
                config["k"] = Json::array();
                for (const auto& k : ks)
                    config["k"].push_back(to_string(k));
            }
            Json result;
            std::vector<std::pair<std::string, std::string>> rows;
            if (stat == "cardinality") {
                result = {{"cardinality", cardinality(f, n)}};
                rows = {{"cardinality", std::to_string(cardinality(f, n))}};
            } else if (stat == "elements") {
                Json list = Json::array();
                std::string text;
                for (const auto& g : enumerate(f, n, budget)) {
                    list.push_back(to_string(g));
                    text += to_string(g) + "\n";
                }
                result = {{"size", list.size()}, {"elements", list}};
                if (emit.format() != "json") {
                    emit.text(config, text);
                    return exit_ok;
                }
            } else if (stat == "defect") {
                if (ks.empty())
                    throw ParseError("--stat defect needs at least one --k element");
                auto d = defect(f, n, ks, budget);
                result = {{"defect", exact_json(d)}};
                rows = {{"defect", fraction_string(d)}};
            } else if (stat == "bound") {
                if (ks.size() != 1 || f.kind() != FolnerFamily::Kind::LampBox)
                    throw ParseError("--stat bound needs --family lamp_box and exactly one --k element");
                auto b = lamp_defect_bound(ks.front(), n);
                auto d = defect(f, n, ks, budget);
                result = {{"bound", exact_json(b)}, {"defect", exact_json(d)}, {"holds", d <= b}};
                rows = {{"bound", fraction_string(b)}, {"defect", fraction_string(d)}};
            } else {
                throw ParseError("unknown --stat '" + stat + "' (cardinality|elements|defect|bound)");
            }
            if (emit.format() == "json")
                emit.json(config, result);
            else if (emit.format() == "csv") {
                std::string body = "stat,value\n";
                for (const auto& [k, v] : rows)
                    body += k + "," + v + "\n";
                emit.text(config, body);
            } else
                emit.text(config, detail::kv_table(rows));
            return exit_ok;
        }

        if (*reproduce) {
            auto prof = profile(profile_name);
            config["profile"] = to_json(prof);
            config["system"] = system;
            std::vector<std::string> names = system == "all" ? gallery_names() : std::vector<std::string>{system};
            Json reports = Json::array();
            std::string text;
            bool mismatch = false;
            for (const auto& name : names) {
                auto rep = verify(build(name), prof);
                mismatch = mismatch || rep.any_mismatch();
                reports.push_back(to_json(rep));
                text += emit.format() == "csv" ? csv(rep) : table(rep);
            }
            if (emit.format() == "json")
                emit.json(config, names.size() == 1 ? reports.front() : Json{{"reports", reports}});
            else
                emit.text(config, text);
            return mismatch ? exit_mismatch : exit_ok;
        }

        auto entry = detail::resolve(source);
        config["source"] = detail::source_json(entry);

        if (*avg) {
            auto w = detail::parse_window(window_text);
            auto x = parse_point(x_text, entry.space), y = parse_point(y_text, entry.space);
            std::vector<FolnerFamily> fams;
            for (const auto& t : families_text)
                fams.push_back(detail::family_or_default(t, entry));
            if (fams.empty())
                fams.push_back(entry.families.front());
            config["x"] = to_json(x);
            config["y"] = to_json(y);
            config["families"] = Json::array();
            for (const auto& f : fams)
                config["families"].push_back(to_json(f));
            config["window"] = {w.lo, w.hi};
            config["exact"] = exact;
            std::vector<AverageProfile> profiles;
            for (const auto& f : fams)
                profiles.push_back(besicovitch_profile(entry.space, x, y, f, w, exact, budget));
            if (emit.format() == "json") {
                Json result;
                if (profiles.size() == 1) {
                    result = to_json(profiles.front());
                } else {
                    Json per = Json::array();
                    std::size_t best = 0;
                    for (std::size_t i = 0; i < profiles.size(); ++i) {
                        per.push_back(to_json(profiles[i]));
                        if (profiles[i].tail_sup > profiles[best].tail_sup)
                            best = i;
                    }
                    result = {{"weyl_estimate", profiles[best].tail_sup},
                              {"argmax", profiles[best].family},
                              {"profiles", per}};
                }
                emit.json(config, result);
            } else {
                std::string body;
                for (const auto& p : profiles) {
                    if (profiles.size() > 1)
                        body += "# family " + p.family + "\n";
                    body += emit.format() == "csv"
                                ? csv(p)
                                : detail::kv_table({{"family", p.family},
                                                    {"tail_sup", float_string(p.tail_sup)},
                                                    {"stabilized", p.stabilized ? "true" : "false"}});
                }
                emit.text(config, body);
            }
            return exit_ok;
        }

        if (*density) {
            auto f = detail::family_or_default(family_text, entry);
            auto p = parse_pair(pair_text, entry.space);
            auto target = target_text.empty() ? p : parse_pair(target_text, entry.space);
            auto u = Neighborhood::ball(target, radius);
            config["family"] = to_json(f);
            config["pair"] = to_json(p);
            config["neighborhood"] = u.describe();
            ElementCache cache(budget);
            if (banach_n > 0) {
                config["banach_n"] = banach_n;
                auto b = ub_dens_estimate(entry.space, p, u, f, banach_n, default_translates(f.group(), banach_n),
                                          cache);
                if (emit.format() == "json")
                    emit.json(config, to_json(b));
                else
                    emit.text(config, detail::kv_table({{"value", fraction_string(b.value)},
                                                        {"argmax", to_string(b.argmax)},
                                                        {"translates", std::to_string(b.translates)}}));
                return exit_ok;
            }
            auto w = detail::parse_window(window_text);
            config["window"] = {w.lo, w.hi};
            auto d = ua_dens_estimate(entry.space, p, u, f, w, cache);
            if (emit.format() == "json")
                emit.json(config, to_json(d));
            else if (emit.format() == "csv")
                emit.text(config, csv(d));
            else
                emit.text(config, detail::kv_table({{"tail_max", fraction_string(d.tail_max)},
                                                    {"tail_argmax", std::to_string(d.tail_argmax)}}));
            return exit_ok;
        }

        if (*measure) {
            auto f = detail::family_or_default(family_text, entry);
            auto p = parse_pair(pair_text, entry.space);
            config["family"] = to_json(f);
            config["pair"] = to_json(p);
            config["n"] = n;
            ElementCache cache(budget);
            auto mu = empirical(entry.space, p, f, n, cache);
            Json result{{"measure", to_json(mu)}};
            std::string extra;
            if (!target_text.empty()) {
                auto t = parse_pair(target_text, entry.space);
                config["target"] = to_json(t);
                auto d = w1(mu, dirac(entry.space, t));
                result["w1_to_target"] = exact_json(d);
                extra = "# w1_to_target " + fraction_string(d) + "\n";
            }
            if (emit.format() == "json")
                emit.json(config, result);
            else
                emit.text(config, extra + csv(mu));
            return exit_ok;
        }

        if (*detect) {
            auto kind = detail::parse_kind(kind_text);
            auto f = detail::family_or_default(family_text, entry);
            auto p = parse_pair(pair_text, entry.space);
            auto prof = profile(profile_name);
            config["detector"] = kind_text;
            config["family"] = to_json(f);
            config["pair"] = to_json(p);
            config["profile"] = to_json(prof);
            auto c = run_detector(entry, kind, p, f, prof);
            if (emit.format() == "json")
                emit.json(config, to_json(c));
            else
                emit.text(config, detail::certificate_table(c));
            return exit_ok;
        }

        if (*icer) {
            if (!entry.model)
                throw DomainError("no finite model is registered for " + entry.name);
            auto f = detail::family_or_default(family_text, entry);
            auto prof = profile(profile_name);
            config["family"] = to_json(f);
            config["profile"] = to_json(prof);
            std::vector<ClassPair> q;
            Json evidence = Json::array();
            for (const auto& a : entry.space.limit_points())
                for (const auto& b : entry.space.limit_points()) {
                    auto c = run_detector(entry, CertKind::QrmsF, {a, b}, f, prof);
                    if (c.positive()) {
                        q.emplace_back(entry.limit_class.at(a), entry.limit_class.at(b));
                        evidence.push_back(to_json(PointPair{a, b}));
                    }
                }
            auto rel = icer_hull(*entry.model, q);
            auto result = to_json(*entry.model, rel);
            result["generating_pairs"] = evidence;
            if (emit.format() == "json") {
                emit.json(config, result);
            } else {
                std::string body = emit.format() == "csv" ? "a,b\n" : "";
                for (const auto& pr : result["pairs"])
                    body += pr[0].get<std::string>() + (emit.format() == "csv" ? "," : " ~ ") +
                            pr[1].get<std::string>() + "\n";
                emit.text(config, body);
            }
            return exit_ok;
        }
    } catch (const BudgetError& e) {
        err << "budget: " << e.what() << "\n";
        return exit_budget;
    } catch (const OverflowError& e) {
        err << "budget: " << e.what() << "\n";
        return exit_budget;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}

} // namespace meandyn::cli
