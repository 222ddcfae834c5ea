#include <gtest/gtest.h>

#include <sstream>

#include "qv/io.hpp"

using namespace qv;
using io::json;

namespace {

std::string message_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const InvalidInput& e) {
        return e.what();
    }
    return "no error";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

} // namespace

TEST(Io, TupleRoundTrip)
{
    Rng rng(1);
    const QTuple v = rng.tuple(3, 2);
    const QTuple w = io::tuple_from_json(json::parse(io::to_json(v).dump()));
    EXPECT_TRUE(w.identical(v));
}

TEST(Io, TupleErrorsNameThePath)
{
    EXPECT_TRUE(contains(message_of([] { io::tuple_from_json(json::parse("[[1,2],[3]]"), "a"); }), "a[1]"));
    EXPECT_TRUE(contains(message_of([] { io::tuple_from_json(json::parse("[]"), "a"); }), "a: tuple needs"));
    EXPECT_TRUE(contains(message_of([] { io::tuple_from_json(json::parse("[[1,\"x\"]]"), "b"); }), "b[0][1]"));
    EXPECT_TRUE(contains(message_of([] { io::tuple_from_json(json::parse("{}"), "c"); }), "c: expected an array"));
}

TEST(Io, GridRoundTripKeepsOutsideNodes)
{
    GridFunction g = make_ball_grid(2, 7, 1.0, 2, 3);
    Rng rng(2);
    randomize(g, rng);
    const json j = io::to_json(g);
    std::size_t nulls = 0;
    for (const auto& v : j["values"]) nulls += v.is_null();
    EXPECT_EQ(nulls, g.count(NodeKind::outside));
    const GridFunction back = io::grid_from_json(json::parse(j.dump()));
    ASSERT_TRUE(back.same_layout(g));
    EXPECT_EQ(back.mask, g.mask);
    for (std::size_t k = 0; k < g.node_count(); ++k)
        if (g.active(k)) {
            EXPECT_TRUE(back.values[k].identical(g.values[k]));
        }
}

TEST(Io, GridAcceptsNamedKindsAndDefaultOrigin)
{
    const json j = json::parse(R"({"m":1,"n":1,"Q":1,"shape":[3],"h":0.5,
        "mask":["boundary","interior",1],"values":[[[0]],[[0.5]],[[1]]]})");
    const GridFunction g = io::grid_from_json(j);
    EXPECT_EQ(g.origin, Point{0.0});
    EXPECT_EQ(g.mask[1], NodeKind::interior);
    EXPECT_EQ(g.mask[2], NodeKind::boundary);
}

TEST(Io, GridErrorsNameTheField)
{
    json j = io::to_json(make_box_grid(1, 3, 0.0, 1.0, 1, 1));
    json missing = j;
    missing.erase("h");
    EXPECT_TRUE(contains(message_of([&] { io::grid_from_json(missing, "grid"); }), "grid.h: missing field"));
    json wrong = j;
    wrong["values"][1] = json::parse("[[1],[2]]");
    EXPECT_TRUE(contains(message_of([&] { io::grid_from_json(wrong, "grid"); }), "grid.values[1]"));
    json kind = j;
    kind["mask"][0] = "edge";
    EXPECT_TRUE(contains(message_of([&] { io::grid_from_json(kind, "grid"); }), "grid.mask[0]: unknown node kind"));
    json shape = j;
    shape["shape"] = json::parse("[4]");
    EXPECT_TRUE(contains(message_of([&] { io::grid_from_json(shape, "grid"); }), "grid.mask: expected 4 entries"));
}

TEST(Io, FrameRoundTrip)
{
    const auto f = build_frame(2, 2);
    const auto back = io::frame_from_json(json::parse(io::to_json(f).dump()));
    EXPECT_EQ(back.bases, f.bases);
    EXPECT_EQ(back.epsilon, f.epsilon);
    EXPECT_EQ(back.n, 2u);
    EXPECT_EQ(back.Q, 2u);
    json bad = io::to_json(f);
    bad["bases"][0][0] = json::parse("[2, 0]");
    EXPECT_THROW(io::frame_from_json(bad), InvalidInput);
}

TEST(Io, EmbeddedVectorForms)
{
    const auto f = build_frame(1, 2);
    const auto z = xi(QTuple(2, 1, {0.5, -1.0}), f);
    const json obj = io::to_json(z, f);
    EXPECT_EQ(io::embedded_from_json(obj).coords, z.coords);
    EXPECT_EQ(io::embedded_from_json(obj["xi"]).coords, z.coords);
    EXPECT_TRUE(contains(message_of([] { io::embedded_from_json(json::parse("{}"), "z"); }), "z.xi: missing field"));
}

TEST(Io, BoundaryAndWhitneyRoundTrip)
{
    BoundarySample s;
    s.m = 2;
    s.R = 2.0;
    s.points = {{{2.0, 0.0}, QTuple(1, 1, {1.0})}, {{0.0, -2.0}, QTuple(1, 1, {3.0})}};
    const auto back = io::boundary_from_json(json::parse(io::to_json(s).dump()));
    ASSERT_EQ(back.points.size(), 2u);
    EXPECT_EQ(back.R, 2.0);
    EXPECT_EQ(back.points[1].x, s.points[1].x);
    json off = io::to_json(s);
    off["points"][0]["x"] = json::parse("[1, 0]");
    EXPECT_TRUE(contains(message_of([&] { io::boundary_from_json(off, "sample"); }), "not on the sphere"));

    io::WhitneyData w;
    w.m = 1;
    w.box = {{0.0}, {1.0}};
    w.depth = 7;
    w.locations = {{0.25}};
    w.values = {QTuple(2, 1, {1.0, 2.0})};
    const auto wb = io::whitney_from_json(json::parse(io::to_json(w).dump()));
    EXPECT_EQ(wb.depth, 7u);
    EXPECT_EQ(wb.box.hi, Point{1.0});
    EXPECT_TRUE(wb.values[0].identical(w.values[0]));
}

TEST(Io, ConfigAndReports)
{
    CheckConfig c;
    c.seed = 9;
    c.trials = 12;
    c.Q_range = {2, 3};
    c.tolerances["xi"] = 1e-6;
    const CheckConfig back = io::config_from_json(json::parse(io::to_json(c).dump()));
    EXPECT_EQ(back.seed, 9u);
    EXPECT_EQ(back.trials, 12u);
    EXPECT_EQ(back.Q_range, (Range{2, 3}));
    EXPECT_EQ(back.tolerances, c.tolerances);
    EXPECT_EQ(io::config_from_json(json::object()).trials, CheckConfig{}.trials);
    EXPECT_TRUE(contains(message_of([] { io::config_from_json(json::parse(R"({"Q_range":[3,1]})"), "cfg"); }), "Q_range"));
    EXPECT_TRUE(contains(message_of([] { io::config_from_json(json::parse(R"({"trials":-4})"), "cfg"); }), "cfg.trials"));

    CheckReport r("demo");
    r.trials = 3;
    r.fail(R"({"v": [[1]], "why": "x"})");
    r.ratio(2.0, 1.0);
    r.measured["alpha"] = 0.5;
    const json doc = io::to_json(std::vector<CheckReport>{r});
    EXPECT_FALSE(doc["passed"].get<bool>());
    EXPECT_EQ(doc["checks"][0]["witnesses"][0]["why"], "x");
    const auto rb = io::reports_from_json(json::parse(doc.dump()));
    ASSERT_EQ(rb.size(), 1u);
    EXPECT_EQ(rb[0].name, "demo");
    EXPECT_EQ(rb[0].failures, 1u);
    EXPECT_EQ(rb[0].worst_ratio, 2.0);
    EXPECT_EQ(rb[0].measured.at("alpha"), 0.5);
}

TEST(Io, MalformedJsonReportsByte)
{
    std::istringstream in("{\"a\": [1, 2,, 3]}");
    const std::string msg = message_of([&] { io::read_json(in, "input.json"); });
    EXPECT_TRUE(contains(msg, "input.json: malformed JSON at byte"));
    EXPECT_THROW(io::read_json_file("/nonexistent/file.json"), InvalidInput);
}

TEST(Io, PointsCsv)
{
    std::istringstream in("x,y\n# comment\n0.5, 1\n\n-2,3e-1\n");
    const auto pts = io::read_points_csv(in, "q.csv");
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[0], (Point{0.5, 1.0}));
    EXPECT_EQ(pts[1], (Point{-2.0, 0.3}));
    std::istringstream ragged("1,2\n3\n");
    EXPECT_TRUE(contains(message_of([&] { io::read_points_csv(ragged, "q.csv"); }), "q.csv: line 2"));
    std::istringstream junk("1,2\n3,abc\n");
    EXPECT_TRUE(contains(message_of([&] { io::read_points_csv(junk, "q.csv"); }), "line 2 is not a list of numbers"));
}

TEST(Io, HistoryCsv)
{
    EXPECT_EQ(io::history_csv({2.0, 0.5}), "iteration,total_energy\n0,2\n1,0.5\n");
    EXPECT_EQ(io::format_number(0.1), "0.10000000000000001");
}
