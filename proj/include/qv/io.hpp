#pragma once

// JSON and CSV readers/writers. Readers report the offending field by path,
// e.g. "values[12][0][1]: expected a number".

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qv/dirichlet.hpp"
#include "qv/embed.hpp"
#include "qv/energy.hpp"
#include "qv/extend.hpp"
#include "qv/grid.hpp"
#include "qv/qspace.hpp"
#include "qv/verify.hpp"

namespace qv::io {

using json = nlohmann::json;

namespace detail {

inline std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
inline std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

[[noreturn]] inline void bad(const std::string& path, const std::string& what)
{
    throw InvalidInput((path.empty() ? std::string("document") : path) + ": " + what);
}

inline const json& field(const json& j, const std::string& path, const std::string& key)
{
    if (!j.is_object()) bad(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) bad(at(path, key), "missing field");
    return *it;
}

inline const json& array(const json& j, const std::string& path)
{
    if (!j.is_array()) bad(path, "expected an array");
    return j;
}

inline double number(const json& j, const std::string& path)
{
    if (!j.is_number()) bad(path, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) bad(path, "expected a finite number");
    return x;
}

inline std::size_t count(const json& j, const std::string& path)
{
    if (!j.is_number_integer() || j.get<long long>() < 0) bad(path, "expected a nonnegative integer");
    return j.get<std::size_t>();
}

inline Point point(const json& j, const std::string& path)
{
    array(j, path);
    Point p;
    for (std::size_t i = 0; i < j.size(); ++i) p.push_back(number(j[i], at(path, i)));
    return p;
}

inline std::size_t count_field(const json& j, const std::string& path, const std::string& key)
{
    return count(field(j, path, key), at(path, key));
}

inline double number_field(const json& j, const std::string& path, const std::string& key)
{
    return number(field(j, path, key), at(path, key));
}

/// Turns library validation errors into messages that name the record.
template <class F>
auto checked(const std::string& path, F&& f)
{
    try {
        return f();
    } catch (const InvalidInput& e) {
        bad(path, e.what());
    }
}

} // namespace detail

// ---- tuples -------------------------------------------------------------

inline json to_json(const QTuple& v)
{
    json a = json::array();
    for (std::size_t i = 0; i < v.Q(); ++i) a.push_back(std::vector<double>(v.point(i).begin(), v.point(i).end()));
    return a;
}

/// [[y_1], ..., [y_Q]]; every point needs the same positive dimension.
inline QTuple tuple_from_json(const json& j, const std::string& path = "")
{
    detail::array(j, path);
    if (j.empty()) detail::bad(path, "tuple needs at least one point");
    std::vector<Point> pts;
    for (std::size_t i = 0; i < j.size(); ++i) {
        pts.push_back(detail::point(j[i], detail::at(path, i)));
        if (pts.back().empty()) detail::bad(detail::at(path, i), "point needs at least one coordinate");
        if (pts.back().size() != pts.front().size()) detail::bad(detail::at(path, i), "point dimension differs from the first point");
    }
    return QTuple(pts);
}

inline json to_json(const DistResult& d, MetricKind kind)
{
    return {{"kind", to_string(kind)}, {"distance", d.value}, {"matching", d.match.perm}};
}

// ---- frames -------------------------------------------------------------

inline json to_json(const DirectionFrame& f)
{
    json bases = json::array();
    for (const auto& b : f.bases) bases.push_back(b);
    return {{"n", f.n}, {"Q", f.Q}, {"K", f.K()}, {"epsilon", f.epsilon}, {"bases", bases}};
}

inline DirectionFrame frame_from_json(const json& j, const std::string& path = "")
{
    DirectionFrame f;
    f.n = detail::count_field(j, path, "n");
    f.Q = detail::count_field(j, path, "Q");
    f.epsilon = detail::number_field(j, path, "epsilon");
    const std::string bp = detail::at(path, "bases");
    const json& bases = detail::array(detail::field(j, path, "bases"), bp);
    for (std::size_t k = 0; k < bases.size(); ++k) {
        const std::string kp = detail::at(bp, k);
        Basis b;
        for (std::size_t a = 0; a < detail::array(bases[k], kp).size(); ++a)
            b.push_back(detail::point(bases[k][a], detail::at(kp, a)));
        f.bases.push_back(std::move(b));
    }
    if (j.contains("K") && detail::count_field(j, path, "K") != f.bases.size())
        detail::bad(detail::at(path, "K"), "does not match the number of bases");
    detail::checked(path, [&] {
        f.validate();
        return 0;
    });
    return f;
}

inline json to_json(const EmbeddedVector& z, const DirectionFrame& f)
{
    return {{"n", f.n}, {"Q", f.Q}, {"K", f.K()}, {"xi", z.coords}};
}

/// Either {"xi": [...]} or a bare array.
inline EmbeddedVector embedded_from_json(const json& j, const std::string& path = "")
{
    EmbeddedVector z;
    z.coords = j.is_object() ? detail::point(detail::field(j, path, "xi"), detail::at(path, "xi")) : detail::point(j, path);
    return z;
}

// ---- grids --------------------------------------------------------------

inline json to_json(const GridFunction& g)
{
    json mask = json::array(), values = json::array();
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        mask.push_back(static_cast<int>(g.mask[k]));
        values.push_back(g.active(k) ? to_json(g.values[k]) : json(nullptr));
    }
    return {{"m", g.m}, {"n", g.n},           {"Q", g.Q},       {"shape", g.shape},
            {"h", g.h}, {"origin", g.origin}, {"mask", mask}, {"values", values}};
}

/// Mask entries are 0/1/2 or "interior"/"boundary"/"outside". Outside nodes
/// may hold null. "origin" defaults to the zero vector.
inline GridFunction grid_from_json(const json& j, const std::string& path = "")
{
    GridFunction g;
    g.m = detail::count_field(j, path, "m");
    g.n = detail::count_field(j, path, "n");
    g.Q = detail::count_field(j, path, "Q");
    if (g.m < 1) detail::bad(detail::at(path, "m"), "must be positive");
    if (g.n < 1) detail::bad(detail::at(path, "n"), "must be positive");
    if (g.Q < 1) detail::bad(detail::at(path, "Q"), "must be positive");
    const std::string sp = detail::at(path, "shape");
    const json& shape = detail::array(detail::field(j, path, "shape"), sp);
    if (shape.size() != g.m) detail::bad(sp, "must have m entries");
    for (std::size_t a = 0; a < shape.size(); ++a) {
        g.shape.push_back(detail::count(shape[a], detail::at(sp, a)));
        if (g.shape.back() < 1) detail::bad(detail::at(sp, a), "must be positive");
    }
    g.h = detail::number_field(j, path, "h");
    if (!(g.h > 0.0)) detail::bad(detail::at(path, "h"), "must be positive");
    if (j.contains("origin")) {
        g.origin = detail::point(j["origin"], detail::at(path, "origin"));
        if (g.origin.size() != g.m) detail::bad(detail::at(path, "origin"), "must have m entries");
    } else {
        g.origin.assign(g.m, 0.0);
    }

    const std::size_t total = g.node_count();
    const std::string mp = detail::at(path, "mask"), vp = detail::at(path, "values");
    const json& mask = detail::array(detail::field(j, path, "mask"), mp);
    const json& values = detail::array(detail::field(j, path, "values"), vp);
    if (mask.size() != total) detail::bad(mp, "expected " + std::to_string(total) + " entries");
    if (values.size() != total) detail::bad(vp, "expected " + std::to_string(total) + " entries");
    g.mask.resize(total);
    g.values.assign(total, QTuple::zero(g.Q, g.n));
    for (std::size_t k = 0; k < total; ++k) {
        const json& e = mask[k];
        if (e.is_string()) {
            const auto s = e.get<std::string>();
            if (s == "interior") g.mask[k] = NodeKind::interior;
            else if (s == "boundary") g.mask[k] = NodeKind::boundary;
            else if (s == "outside") g.mask[k] = NodeKind::outside;
            else detail::bad(detail::at(mp, k), "unknown node kind '" + s + "'");
        } else {
            const std::size_t c = detail::count(e, detail::at(mp, k));
            if (c > 2) detail::bad(detail::at(mp, k), "node kind must be 0, 1 or 2");
            g.mask[k] = static_cast<NodeKind>(c);
        }
        if (g.mask[k] == NodeKind::outside && values[k].is_null()) continue;
        const QTuple v = tuple_from_json(values[k], detail::at(vp, k));
        if (v.Q() != g.Q || v.n() != g.n) detail::bad(detail::at(vp, k), "tuple does not have the grid's Q and n");
        g.values[k] = v;
    }
    detail::checked(path, [&] {
        g.validate();
        return 0;
    });
    return g;
}

// ---- boundary and scattered samples ------------------------------------

inline json samples_to_json(const std::vector<Point>& x, const std::vector<QTuple>& v)
{
    json pts = json::array();
    for (std::size_t k = 0; k < x.size(); ++k) pts.push_back({{"x", x[k]}, {"v", to_json(v[k])}});
    return pts;
}

inline void samples_from_json(const json& j, const std::string& path, std::vector<Point>& x, std::vector<QTuple>& v)
{
    detail::array(j, path);
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string kp = detail::at(path, k);
        x.push_back(detail::point(detail::field(j[k], kp, "x"), detail::at(kp, "x")));
        v.push_back(tuple_from_json(detail::field(j[k], kp, "v"), detail::at(kp, "v")));
        if (v.back().Q() != v.front().Q() || v.back().n() != v.front().n())
            detail::bad(detail::at(kp, "v"), "tuple differs in Q or n from the first sample");
    }
}

inline json to_json(const BoundarySample& s)
{
    std::vector<Point> x;
    std::vector<QTuple> v;
    for (const auto& p : s.points) {
        x.push_back(p.x);
        v.push_back(p.v);
    }
    return {{"m", s.m}, {"R", s.R}, {"points", samples_to_json(x, v)}};
}

inline BoundarySample boundary_from_json(const json& j, const std::string& path = "")
{
    BoundarySample s;
    s.m = detail::count_field(j, path, "m");
    s.R = j.contains("R") ? detail::number_field(j, path, "R") : 1.0;
    std::vector<Point> x;
    std::vector<QTuple> v;
    samples_from_json(detail::field(j, path, "points"), detail::at(path, "points"), x, v);
    for (std::size_t k = 0; k < x.size(); ++k) s.points.push_back({std::move(x[k]), std::move(v[k])});
    detail::checked(path, [&] {
        s.validate();
        return 0;
    });
    return s;
}

/// Input of the Whitney extension.
struct WhitneyData {
    std::size_t m = 0;
    Box box;
    std::size_t depth = 10;
    std::vector<Point> locations;
    std::vector<QTuple> values;
};

inline json to_json(const WhitneyData& w)
{
    return {{"m", w.m},
            {"box", {{"lo", w.box.lo}, {"hi", w.box.hi}}},
            {"depth", w.depth},
            {"points", samples_to_json(w.locations, w.values)}};
}

inline WhitneyData whitney_from_json(const json& j, const std::string& path = "")
{
    WhitneyData w;
    w.m = detail::count_field(j, path, "m");
    const std::string bp = detail::at(path, "box");
    const json& box = detail::field(j, path, "box");
    w.box.lo = detail::point(detail::field(box, bp, "lo"), detail::at(bp, "lo"));
    w.box.hi = detail::point(detail::field(box, bp, "hi"), detail::at(bp, "hi"));
    if (j.contains("depth")) w.depth = detail::count_field(j, path, "depth");
    samples_from_json(detail::field(j, path, "points"), detail::at(path, "points"), w.locations, w.values);
    return w;
}

// ---- energy ---------------------------------------------------------------

inline json to_json(const EnergyReport& r, bool per_edge = true)
{
    json out = {{"total", r.total}, {"p", r.p}, {"iterations", r.iterations}, {"converged", r.converged}};
    if (per_edge) {
        json edges = json::array();
        for (const auto& t : r.per_edge)
            edges.push_back({{"a", t.edge.a}, {"b", t.edge.b}, {"axis", t.edge.axis},
                             {"contribution", t.contribution}, {"matching", t.match.perm}});
        out["per_edge"] = std::move(edges);
    }
    return out;
}

// ---- verification ---------------------------------------------------------

inline Range range_from_json(const json& j, const std::string& path)
{
    detail::array(j, path);
    if (j.size() != 2) detail::bad(path, "expected [lo, hi]");
    return {detail::count(j[0], detail::at(path, 0)), detail::count(j[1], detail::at(path, 1))};
}

inline json to_json(const CheckConfig& c)
{
    return {{"seed", c.seed},
            {"trials", c.trials},
            {"Q_range", {c.Q_range.first, c.Q_range.second}},
            {"n_range", {c.n_range.first, c.n_range.second}},
            {"m_range", {c.m_range.first, c.m_range.second}},
            {"tolerances", c.tolerances}};
}

/// Every field is optional and falls back to the defaults.
inline CheckConfig config_from_json(const json& j, const std::string& path = "")
{
    CheckConfig c;
    if (!j.is_object()) detail::bad(path, "expected an object");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) detail::bad(detail::at(path, "seed"), "expected a nonnegative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("trials")) c.trials = detail::count_field(j, path, "trials");
    if (j.contains("Q_range")) c.Q_range = range_from_json(j["Q_range"], detail::at(path, "Q_range"));
    if (j.contains("n_range")) c.n_range = range_from_json(j["n_range"], detail::at(path, "n_range"));
    if (j.contains("m_range")) c.m_range = range_from_json(j["m_range"], detail::at(path, "m_range"));
    if (j.contains("tolerances")) {
        const std::string tp = detail::at(path, "tolerances");
        if (!j["tolerances"].is_object()) detail::bad(tp, "expected an object");
        for (const auto& [k, v] : j["tolerances"].items()) c.tolerances[k] = detail::number(v, detail::at(tp, k));
    }
    detail::checked(path, [&] {
        c.validate();
        return 0;
    });
    return c;
}

inline json to_json(const CheckReport& r)
{
    json w = json::array();
    for (const auto& s : r.witnesses) w.push_back(json::parse(s));
    return {{"name", r.name},           {"trials", r.trials},     {"failures", r.failures},
            {"worst_ratio", r.worst_ratio}, {"witnesses", w}, {"measured", r.measured}};
}

inline CheckReport report_from_json(const json& j, const std::string& path = "")
{
    CheckReport r;
    const json& name = detail::field(j, path, "name");
    if (!name.is_string()) detail::bad(detail::at(path, "name"), "expected a string");
    r.name = name.get<std::string>();
    r.trials = detail::count_field(j, path, "trials");
    r.failures = detail::count_field(j, path, "failures");
    r.worst_ratio = detail::number_field(j, path, "worst_ratio");
    if (j.contains("witnesses"))
        for (const auto& w : detail::array(j["witnesses"], detail::at(path, "witnesses"))) r.witnesses.push_back(w.dump());
    if (j.contains("measured"))
        for (const auto& [k, v] : j["measured"].items())
            r.measured[k] = detail::number(v, detail::at(detail::at(path, "measured"), k));
    if (r.failures > r.trials) detail::bad(detail::at(path, "failures"), "exceeds trials");
    return r;
}

inline json to_json(const std::vector<CheckReport>& reports)
{
    bool passed = true;
    json checks = json::array();
    for (const auto& r : reports) {
        passed = passed && r.passed();
        checks.push_back(to_json(r));
    }
    return {{"passed", passed}, {"checks", checks}};
}

inline std::vector<CheckReport> reports_from_json(const json& j, const std::string& path = "")
{
    std::vector<CheckReport> out;
    const std::string cp = detail::at(path, "checks");
    const json& checks = detail::array(detail::field(j, path, "checks"), cp);
    for (std::size_t k = 0; k < checks.size(); ++k) out.push_back(report_from_json(checks[k], detail::at(cp, k)));
    return out;
}

// ---- files ----------------------------------------------------------------

inline json read_json(std::istream& in, const std::string& name)
{
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput(name + ": malformed JSON at byte " + std::to_string(e.byte));
    }
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput(path + ": cannot open for reading");
    return read_json(in, path);
}

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) throw InvalidInput(path + ": cannot open for writing");
    out << text;
    if (!out) throw InvalidInput(path + ": write failed");
}

inline void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

inline std::string format_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// One point per line, comma separated. Blank lines, '#' comments and a
/// non-numeric header line are skipped.
inline std::vector<Point> read_points_csv(std::istream& in, const std::string& name)
{
    std::vector<Point> out;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Point p;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                p.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t\r", used) != std::string::npos) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (!numeric) {
            if (out.empty() && lineno == 1) continue;
            throw InvalidInput(name + ": line " + std::to_string(lineno) + " is not a list of numbers");
        }
        if (!out.empty() && p.size() != out.front().size())
            throw InvalidInput(name + ": line " + std::to_string(lineno) + " has a different number of columns");
        out.push_back(std::move(p));
    }
    return out;
}

inline std::vector<Point> read_points_csv_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput(path + ": cannot open for reading");
    return read_points_csv(in, path);
}

/// "iteration,total_energy" rows.
inline std::string history_csv(const std::vector<double>& history)
{
    std::string s = "iteration,total_energy\n";
    for (std::size_t k = 0; k < history.size(); ++k) s += std::to_string(k) + "," + format_number(history[k]) + "\n";
    return s;
}

} // namespace qv::io
