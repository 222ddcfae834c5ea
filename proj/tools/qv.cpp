// qv: command-line front end. Exit status 0 on success, 1 on domain or
// input errors, 2 on usage errors.

#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "qv/io.hpp"
#include "qv/qv.hpp"

namespace {

using qv::io::json;

void emit(const json& j, const std::string& out)
{
    if (out.empty())
        std::cout << j.dump(2) << "\n";
    else
        qv::io::write_json_file(out, j);
}

// Ball grid on [-R, R]^m whose boundary nodes take the value of the sample
// nearest to their radial projection onto the sphere.
qv::GridFunction grid_from_sphere(const qv::BoundarySample& s, std::size_t per_axis)
{
    const auto& first = s.points.front().v;
    qv::GridFunction g = qv::make_ball_grid(s.m, per_axis, s.R, first.Q(), first.n());
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (g.mask[k] == qv::NodeKind::outside) continue;
        qv::Point x = g.location(k);
        const double r = qv::detail::norm(x);
        if (g.mask[k] == qv::NodeKind::interior || r == 0.0) continue;
        for (double& c : x) c *= s.R / r;
        std::size_t best = 0;
        double bd = INFINITY;
        for (std::size_t j = 0; j < s.points.size(); ++j) {
            const double d = qv::detail::squared_distance(s.points[j].x, x);
            if (d < bd) {
                bd = d;
                best = j;
            }
        }
        g.values[k] = s.points[best].v;
    }
    return g;
}

std::string solution_csv(const qv::GridFunction& g)
{
    std::string s;
    for (std::size_t a = 0; a < g.m; ++a) s += "x" + std::to_string(a) + ",";
    s += "branch";
    for (std::size_t j = 0; j < g.n; ++j) s += ",y" + std::to_string(j);
    s += "\n";
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (!g.active(k)) continue;
        const auto x = g.location(k);
        for (std::size_t i = 0; i < g.Q; ++i) {
            for (double c : x) s += qv::io::format_number(c) + ",";
            s += std::to_string(i);
            for (double c : g.values[k].point(i)) s += "," + qv::io::format_number(c);
            s += "\n";
        }
    }
    return s;
}

json values_json(const std::vector<qv::Point>& queries, const std::vector<qv::QTuple>& values)
{
    json out = json::array();
    for (std::size_t k = 0; k < queries.size(); ++k) out.push_back({{"x", queries[k]}, {"v", qv::io::to_json(values[k])}});
    return {{"values", out}};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Q-valued maps: metrics, embeddings, extensions and Dirichlet minimisers"};
    app.require_subcommand(1);
    std::function<void()> run;

    // dist
    std::string kind = "g2", a_path, b_path, out;
    auto* dist = app.add_subcommand("dist", "G1/G2/Ginf distance and an optimal matching");
    dist->add_option("--kind", kind, "g1|g2|ginf")->check(CLI::IsMember({"g1", "g2", "ginf"}));
    dist->add_option("--a", a_path, "first tuple JSON")->required();
    dist->add_option("--b", b_path, "second tuple JSON")->required();
    dist->add_option("--out", out, "output JSON (default stdout)");
    dist->callback([&] {
        run = [&] {
            const auto v = qv::io::tuple_from_json(qv::io::read_json_file(a_path), a_path);
            const auto w = qv::io::tuple_from_json(qv::io::read_json_file(b_path), b_path);
            const auto k = qv::metric_from_string(kind);
            emit(qv::io::to_json(qv::dist(v, w, k), k), out);
        };
    });

    // frame
    std::size_t n = 1, q = 1, K = 0;
    std::uint64_t seed = 1;
    auto* frame = app.add_subcommand("frame", "build a direction frame for the embedding xi");
    frame->add_option("--n", n, "point dimension")->required();
    frame->add_option("--q", q, "tuple size Q")->required();
    frame->add_option("--k", K, "number of bases (0 picks the smallest certified count)");
    frame->add_option("--seed", seed, "random seed");
    frame->add_option("--out", out, "output JSON (default stdout)");
    frame->callback([&] {
        run = [&] {
            qv::FrameOptions fo;
            fo.seed = seed;
            emit(qv::io::to_json(qv::build_frame(n, q, K, fo)), out);
        };
    });

    // embed
    std::string in, frame_path, frame_out;
    auto* embed = app.add_subcommand("embed", "xi(v) for a tuple");
    embed->add_option("--in", in, "tuple JSON")->required();
    embed->add_option("--frame", frame_path, "frame JSON (default: built from --seed)");
    embed->add_option("--seed", seed, "seed for a freshly built frame");
    embed->add_option("--frame-out", frame_out, "write the frame used");
    embed->add_option("--out", out, "output JSON (default stdout)");
    embed->callback([&] {
        run = [&] {
            const auto v = qv::io::tuple_from_json(qv::io::read_json_file(in), in);
            qv::DirectionFrame f;
            if (!frame_path.empty()) {
                f = qv::io::frame_from_json(qv::io::read_json_file(frame_path), frame_path);
            } else {
                qv::FrameOptions fo;
                fo.seed = seed;
                f = qv::build_frame(v.n(), v.Q(), 0, fo);
            }
            if (!frame_out.empty()) qv::io::write_json_file(frame_out, qv::io::to_json(f));
            emit(qv::io::to_json(qv::xi(v, f), f), out);
        };
    });

    // decode
    std::string hint_path;
    auto* decode = app.add_subcommand("decode", "recover a tuple from xi coordinates");
    decode->add_option("--in", in, "embedded vector JSON")->required();
    decode->add_option("--frame", frame_path, "frame JSON")->required();
    decode->add_option("--hint", hint_path, "starting tuple JSON");
    decode->add_option("--out", out, "output JSON (default stdout)");
    decode->callback([&] {
        run = [&] {
            const auto z = qv::io::embedded_from_json(qv::io::read_json_file(in), in);
            const auto f = qv::io::frame_from_json(qv::io::read_json_file(frame_path), frame_path);
            std::optional<qv::QTuple> hint;
            if (!hint_path.empty()) hint = qv::io::tuple_from_json(qv::io::read_json_file(hint_path), hint_path);
            emit(qv::io::to_json(qv::decode(z, f, hint)), out);
        };
    });

    // extend
    std::string query_path;
    auto* extend = app.add_subcommand("extend", "cone, Whitney and plane extensions");
    extend->require_subcommand(1);
    auto* cone = extend->add_subcommand("cone", "cone extension of spherical samples");
    auto* whitney = extend->add_subcommand("whitney", "Whitney extension of scattered samples (m <= 2)");
    auto* plane = extend->add_subcommand("plane", "extend a unit-ball grid function to [-2, 2]^m");
    for (auto* sub : {cone, whitney}) {
        sub->add_option("--in", in, "sample JSON")->required();
        sub->add_option("--query", query_path, "query points CSV")->required();
        sub->add_option("--out", out, "output JSON (default stdout)");
    }
    plane->add_option("--in", in, "grid JSON")->required();
    plane->add_option("--out", out, "output JSON (default stdout)");
    cone->callback([&] {
        run = [&] {
            const qv::ConeExtension ext(qv::io::boundary_from_json(qv::io::read_json_file(in), in));
            const auto qs = qv::io::read_points_csv_file(query_path);
            std::vector<qv::QTuple> vals;
            for (const auto& x : qs) vals.push_back(ext(x));
            emit(values_json(qs, vals), out);
        };
    });
    whitney->callback([&] {
        run = [&] {
            auto d = qv::io::whitney_from_json(qv::io::read_json_file(in), in);
            const qv::WhitneyExtension ext(d.locations, d.values, d.box, d.depth);
            const auto qs = qv::io::read_points_csv_file(query_path);
            std::vector<qv::QTuple> vals;
            for (const auto& x : qs) vals.push_back(ext(x));
            emit(values_json(qs, vals), out);
        };
    });
    plane->callback([&] {
        run = [&] {
            emit(qv::io::to_json(qv::extend_to_plane(qv::io::grid_from_json(qv::io::read_json_file(in), in))), out);
        };
    });

    // solve
    std::string boundary_path, history_path = "hist.csv", csv_path, inner = "auto", init = "whitney";
    std::string sol_path = "sol.json";
    std::size_t grid = 64, restarts = 3, max_outer = 200;
    double p = 2.0, tol = 1e-10;
    auto* solve = app.add_subcommand("solve", "discrete p-energy Dirichlet minimiser");
    solve->add_option("--boundary", boundary_path, "grid JSON, or spherical sample JSON {m, R, points}")->required();
    solve->add_option("--grid", grid, "nodes per axis when the boundary is a spherical sample");
    solve->add_option("--p", p, "exponent in (1, 8]");
    solve->add_option("--tol", tol, "relative energy decrease that stops the iteration");
    solve->add_option("--out", sol_path, "solution grid JSON");
    solve->add_option("--history", history_path, "energy history CSV");
    solve->add_option("--csv", csv_path, "solution as CSV rows x..., branch, y...");
    solve->add_option("--seed", seed, "restart seed");
    solve->add_option("--restarts", restarts, "runs from perturbed starts");
    solve->add_option("--max-outer", max_outer, "outer iteration cap per run");
    solve->add_option("--inner", inner, "auto|p2|gradient")->check(CLI::IsMember({"auto", "p2", "gradient"}));
    solve->add_option("--init", init, "whitney|nearest")->check(CLI::IsMember({"whitney", "nearest"}));
    solve->callback([&] {
        run = [&] {
            const json j = qv::io::read_json_file(boundary_path);
            const qv::GridFunction problem = j.contains("points")
                                                 ? grid_from_sphere(qv::io::boundary_from_json(j, boundary_path), grid)
                                                 : qv::io::grid_from_json(j, boundary_path);
            qv::DirichletOptions opt;
            opt.p = p;
            opt.tol = tol;
            opt.seed = seed;
            opt.restarts = restarts;
            opt.max_outer = max_outer;
            opt.inner = inner == "p2" ? qv::InnerSolver::p2_linear
                                      : (inner == "gradient" ? qv::InnerSolver::gradient : qv::InnerSolver::automatic);
            opt.init = init == "nearest" ? qv::InitMethod::nearest_boundary : qv::InitMethod::whitney;
            const auto r = qv::solve_dirichlet(problem, opt);
            qv::io::write_json_file(sol_path, qv::io::to_json(r.solution));
            qv::io::write_text_file(history_path, qv::io::history_csv(r.history));
            if (!csv_path.empty()) qv::io::write_text_file(csv_path, solution_csv(r.solution));
            json summary = qv::io::to_json(r.report, false);
            summary["run_energy"] = r.run_energy;
            summary["best_run"] = r.best_run;
            summary["defect_moves"] = r.defect_moves;
            std::cout << summary.dump(2) << "\n";
        };
    });

    // energy
    bool per_edge = false;
    auto* energy = app.add_subcommand("energy", "discrete p-energy of a grid function");
    energy->add_option("--in", in, "grid JSON")->required();
    energy->add_option("--p", p, "exponent > 1");
    energy->add_flag("--per-edge", per_edge, "include every edge term and matching");
    energy->add_option("--out", out, "output JSON (default stdout)");
    energy->callback([&] {
        run = [&] {
            const auto g = qv::io::grid_from_json(qv::io::read_json_file(in), in);
            emit(qv::io::to_json(qv::discrete_energy(g, p), per_edge), out);
        };
    });

    // trace
    auto* trace = app.add_subcommand("trace", "restriction of a grid function to its boundary nodes");
    trace->add_option("--in", in, "grid JSON")->required();
    trace->add_option("--out", out, "output JSON (default stdout)");
    trace->callback([&] {
        run = [&] {
            const auto t = qv::trace(qv::io::grid_from_json(qv::io::read_json_file(in), in));
            emit({{"nodes", t.nodes}, {"points", qv::io::samples_to_json(t.locations, t.values)}}, out);
        };
    });

    // verify
    std::string config_path, report_path;
    std::optional<std::uint64_t> verify_seed;
    std::optional<std::size_t> trials;
    auto* verify = app.add_subcommand("verify", "run the property checks");
    verify->add_option("--config", config_path, "check configuration JSON");
    verify->add_option("--report", report_path, "report JSON");
    verify->add_option("--seed", verify_seed, "override the configured seed");
    verify->add_option("--trials", trials, "override the configured trial count");
    int verify_status = 0;
    verify->callback([&] {
        run = [&] {
            qv::CheckConfig cfg;
            if (!config_path.empty()) cfg = qv::io::config_from_json(qv::io::read_json_file(config_path), config_path);
            if (verify_seed) cfg.seed = *verify_seed;
            if (trials) cfg.trials = *trials;
            const auto reports = qv::run_all(cfg);
            for (const auto& r : reports) {
                std::cout << (r.passed() ? "pass " : "FAIL ") << r.name << " trials=" << r.trials
                          << " failures=" << r.failures << " worst_ratio=" << qv::io::format_number(r.worst_ratio);
                for (const auto& [k, v] : r.measured) std::cout << " " << k << "=" << qv::io::format_number(v);
                std::cout << "\n";
            }
            if (!report_path.empty()) qv::io::write_json_file(report_path, qv::io::to_json(reports));
            for (const auto& r : reports)
                if (!r.passed()) verify_status = 1;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        run();
    } catch (const std::exception& e) {
        std::cerr << "qv: " << e.what() << "\n";
        return 1;
    }
    return verify_status;
}
