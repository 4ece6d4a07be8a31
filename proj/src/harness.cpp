#include "dkdv/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace dkdv {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char b[64];
    std::snprintf(b, sizeof(b), "%.17g", v);
    return b;
}

std::string fmtg(double v) {
    char b[64];
    std::snprintf(b, sizeof(b), "%g", v);
    return b;
}

[[noreturn]] void bad_key(const std::string& path, const std::string& msg) {
    throw validation_error(path + ": " + msg);
}

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) bad_key(path, "expected a JSON object");
}

void check_allowed(const json& obj, const std::string& path,
                   std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok) bad_key(path + "." + it.key(), "unknown key");
    }
}

double num_at(const json& obj, const std::string& path, const char* key, double def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_number()) bad_key(path + "." + key, "expected a number");
    return v.get<double>();
}

std::int64_t int_at(const json& obj, const std::string& path, const char* key, std::int64_t def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) bad_key(path + "." + key, "expected an integer");
    return v.get<std::int64_t>();
}

std::vector<double> list_at(const json& obj, const std::string& path, const char* key,
                            std::vector<double> def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_array()) bad_key(path + "." + key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) bad_key(path + "." + key, "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    try {
        model.validate();
    } catch (const validation_error& e) {
        throw validation_error(std::string("$.model: ") + e.what());
    }
    if (!is_power_of_two(n_points) || n_points < 8)
        bad_key("$.grid.n_points", "must be a power of two >= 8");
    if (!(domain_length > 0.0)) bad_key("$.grid.L", "must be positive");
    if (!is_power_of_two(n_time) || n_time < 16)
        bad_key("$.grid.n_time", "must be a power of two >= 16");
    if (!(t_box >= 2.0)) bad_key("$.grid.T_box", "must be >= 2");
    if (!(dt > 0.0)) bad_key("$.run.dt", "must be positive");
    if (!(run_T > 0.0)) bad_key("$.run.T", "must be positive");
    if (record_every < 1) bad_key("$.run.record_every", "must be >= 1");
    if (ic.kind != "bump" && ic.kind != "random-hs" && ic.kind != "zero")
        bad_key("$.run.ic.kind", "must be one of bump | random-hs | zero");
    if (trials < 10) bad_key("$.verify.trials", "must be >= 10");
    if (jobs < 1) bad_key("$.io.jobs", "must be >= 1");
    for (double n1 : n1_list)
        if (!is_dyadic(n1)) bad_key("$.sweep.n1_list", "entries must be powers of two");
    for (double a : sweep_alpha)
        if (!(a > 0.0 && a <= 1.0)) bad_key("$.sweep.alpha", "entries must be in (0,1]");
    try {
        picard.validate(model);
    } catch (const validation_error& e) {
        throw validation_error(std::string("$.picard: ") + e.what());
    }
}

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw validation_error(std::string("config parse error: ") + e.what());
    }
    expect_object(root, "$");
    check_allowed(root, "$", {"model", "grid", "run", "picard", "sweep", "verify", "io"});

    ExperimentConfig cfg;

    if (root.contains("model")) {
        const json& m = root["model"];
        expect_object(m, "$.model");
        check_allowed(m, "$.model", {"alpha", "s", "b", "delta", "nu_probe"});
        cfg.model.alpha = num_at(m, "$.model", "alpha", cfg.model.alpha);
        cfg.model.s = num_at(m, "$.model", "s", cfg.model.s);
        cfg.model.b = num_at(m, "$.model", "b", cfg.model.b);
        cfg.model.delta = num_at(m, "$.model", "delta", cfg.model.delta);
        cfg.model.nu_probe = num_at(m, "$.model", "nu_probe", cfg.model.nu_probe);
    }
    if (root.contains("grid")) {
        const json& g = root["grid"];
        expect_object(g, "$.grid");
        check_allowed(g, "$.grid", {"n_points", "L", "n_time", "T_box"});
        cfg.n_points = int_at(g, "$.grid", "n_points", cfg.n_points);
        cfg.domain_length = num_at(g, "$.grid", "L", cfg.domain_length);
        cfg.n_time = int_at(g, "$.grid", "n_time", cfg.n_time);
        cfg.t_box = num_at(g, "$.grid", "T_box", cfg.t_box);
    }
    if (root.contains("run")) {
        const json& r = root["run"];
        expect_object(r, "$.run");
        check_allowed(r, "$.run", {"dt", "T", "record_every", "s_probe", "ic"});
        cfg.dt = num_at(r, "$.run", "dt", cfg.dt);
        cfg.run_T = num_at(r, "$.run", "T", cfg.run_T);
        cfg.record_every = int_at(r, "$.run", "record_every", cfg.record_every);
        cfg.s_probe = num_at(r, "$.run", "s_probe", cfg.s_probe);
        if (r.contains("ic")) {
            const json& ic = r["ic"];
            expect_object(ic, "$.run.ic");
            check_allowed(ic, "$.run.ic", {"kind", "amplitude"});
            if (ic.contains("kind")) {
                if (!ic["kind"].is_string()) bad_key("$.run.ic.kind", "expected a string");
                cfg.ic.kind = ic["kind"].get<std::string>();
            }
            cfg.ic.amplitude = num_at(ic, "$.run.ic", "amplitude", cfg.ic.amplitude);
        }
    }
    if (root.contains("picard")) {
        const json& p = root["picard"];
        expect_object(p, "$.picard");
        check_allowed(p, "$.picard", {"T", "n_quad", "max_iters", "s_c_plus", "gamma", "t_box"});
        cfg.picard.T = num_at(p, "$.picard", "T", cfg.picard.T);
        cfg.picard.n_quad = int_at(p, "$.picard", "n_quad", cfg.picard.n_quad);
        cfg.picard.max_iters = int_at(p, "$.picard", "max_iters", cfg.picard.max_iters);
        cfg.picard.s_c_plus = num_at(p, "$.picard", "s_c_plus", cfg.picard.s_c_plus);
        cfg.picard.gamma = num_at(p, "$.picard", "gamma", cfg.picard.gamma);
        cfg.picard.t_box = num_at(p, "$.picard", "t_box", cfg.picard.t_box);
    }
    if (root.contains("sweep")) {
        const json& s = root["sweep"];
        expect_object(s, "$.sweep");
        check_allowed(s, "$.sweep", {"s", "alpha", "n1_list"});
        cfg.sweep_s = list_at(s, "$.sweep", "s", cfg.sweep_s);
        cfg.sweep_alpha = list_at(s, "$.sweep", "alpha", cfg.sweep_alpha);
        cfg.n1_list = list_at(s, "$.sweep", "n1_list", cfg.n1_list);
    }
    if (root.contains("verify")) {
        const json& v = root["verify"];
        expect_object(v, "$.verify");
        check_allowed(v, "$.verify", {"trials", "n_x", "n_time", "theta", "rho"});
        cfg.trials = static_cast<int>(int_at(v, "$.verify", "trials", cfg.trials));
        cfg.lemma_opts.n_x = int_at(v, "$.verify", "n_x", cfg.lemma_opts.n_x);
        cfg.lemma_opts.n_time = int_at(v, "$.verify", "n_time", cfg.lemma_opts.n_time);
        cfg.lemma_opts.theta_stri = num_at(v, "$.verify", "theta", cfg.lemma_opts.theta_stri);
        cfg.lemma_opts.rho_stri = num_at(v, "$.verify", "rho", cfg.lemma_opts.rho_stri);
    }
    if (root.contains("io")) {
        const json& io = root["io"];
        expect_object(io, "$.io");
        check_allowed(io, "$.io", {"out", "seed", "jobs", "timestamp"});
        if (io.contains("out")) {
            if (!io["out"].is_string()) bad_key("$.io.out", "expected a string");
            cfg.out_dir = io["out"].get<std::string>();
        }
        cfg.seed = static_cast<std::uint64_t>(int_at(io, "$.io", "seed", 0));
        cfg.jobs = static_cast<int>(int_at(io, "$.io", "jobs", cfg.jobs));
        if (io.contains("timestamp")) {
            if (!io["timestamp"].is_boolean()) bad_key("$.io.timestamp", "expected a boolean");
            cfg.svg_timestamp = io["timestamp"].get<bool>();
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("config file not found: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_defaults_help() {
    return "config defaults: model {alpha=1, s=-0.9, b=0.5, delta=0.01, nu_probe=0.1}; "
           "grid {n_points=512, L=64*pi, n_time=512, T_box=4}; "
           "run {dt=0.001, T=1, record_every=10, s_probe=0, ic={kind=bump, amplitude=1}}; "
           "picard {T=0.5, n_quad=257, max_iters=25, s_c_plus=-0.45, gamma=auto, t_box=4}; "
           "sweep {alpha=[1], s=[-0.9], n1_list=[16..256]}; verify {trials=10}; "
           "io {out=out, seed=0, jobs=1, timestamp=false}";
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw validation_error("unwritable path: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw validation_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string sweep_report_json(const SweepReport& rep) {
    json j;
    j["s"] = rep.s;
    j["alpha"] = rep.alpha;
    j["n1_values"] = rep.n1_values;
    j["ratios"] = rep.ratios;
    j["fitted_slope"] = rep.fitted_slope;
    j["slope_stderr"] = rep.slope_stderr;
    j["predicted_slope"] = rep.predicted_slope;
    j["verdict"] = rep.verdict == SweepVerdict::Divergent ? "divergent" : "bounded";
    return j.dump(2) + "\n";
}

std::string sweep_report_csv(const SweepReport& rep) {
    std::string out = "N1,ratio,log2N1,logratio\n";
    for (size_t i = 0; i < rep.n1_values.size(); ++i) {
        out += fmt17(rep.n1_values[i]) + "," + fmt17(rep.ratios[i]) + "," +
               fmt17(std::log2(rep.n1_values[i])) + "," + fmt17(std::log(rep.ratios[i])) + "\n";
    }
    return out;
}

namespace {

struct SvgAxes {
    double xmin, xmax, ymin, ymax;
    static constexpr double w = 640, h = 480, ml = 70, mr = 20, mt = 20, mb = 50;
    double px(double x) const { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); }
    double py(double y) const { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); }
};

std::string svg_header(bool timestamp) {
    std::string s =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
        "viewBox=\"0 0 640 480\">\n";
    if (timestamp) {
        char buf[64];
        std::time_t now = std::time(nullptr);
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        s += std::string("<metadata>generated ") + buf + "</metadata>\n";
    }
    return s;
}

std::string svg_frame(const SvgAxes& a, const std::string& xlabel, const std::string& ylabel) {
    std::ostringstream s;
    s << "<rect x=\"" << SvgAxes::ml << "\" y=\"" << SvgAxes::mt << "\" width=\""
      << (SvgAxes::w - SvgAxes::ml - SvgAxes::mr) << "\" height=\""
      << (SvgAxes::h - SvgAxes::mt - SvgAxes::mb)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double fx = a.xmin + (a.xmax - a.xmin) * i / 4.0;
        double fy = a.ymin + (a.ymax - a.ymin) * i / 4.0;
        s << "<text x=\"" << a.px(fx) << "\" y=\"" << (SvgAxes::h - SvgAxes::mb + 18)
          << "\" font-size=\"11\" text-anchor=\"middle\">" << fmtg(fx) << "</text>\n";
        s << "<text x=\"" << (SvgAxes::ml - 8) << "\" y=\"" << a.py(fy) + 4
          << "\" font-size=\"11\" text-anchor=\"end\">" << fmtg(fy) << "</text>\n";
    }
    s << "<text x=\"" << (SvgAxes::ml + (SvgAxes::w - SvgAxes::ml - SvgAxes::mr) / 2) << "\" y=\""
      << (SvgAxes::h - 12) << "\" font-size=\"12\" text-anchor=\"middle\">" << xlabel
      << "</text>\n";
    s << "<text x=\"14\" y=\"" << (SvgAxes::mt + (SvgAxes::h - SvgAxes::mt - SvgAxes::mb) / 2)
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << (SvgAxes::mt + (SvgAxes::h - SvgAxes::mt - SvgAxes::mb) / 2) << ")\">" << ylabel
      << "</text>\n";
    return s.str();
}

}  // namespace

std::string sweep_plot_svg(const SweepReport& rep, bool timestamp) {
    if (rep.n1_values.empty()) throw validation_error("sweep_plot_svg: empty report");
    std::vector<double> xs, ys;
    for (size_t i = 0; i < rep.n1_values.size(); ++i) {
        xs.push_back(std::log(rep.n1_values[i]));
        ys.push_back(std::log(std::max(rep.ratios[i], 1e-300)));
    }
    SvgAxes a{*std::min_element(xs.begin(), xs.end()), *std::max_element(xs.begin(), xs.end()),
              *std::min_element(ys.begin(), ys.end()), *std::max_element(ys.begin(), ys.end())};
    if (a.xmax == a.xmin) a.xmax += 1;
    if (a.ymax == a.ymin) { a.ymax += 0.5; a.ymin -= 0.5; }

    std::string s = svg_header(timestamp);
    s += "<!-- data\n" + sweep_report_csv(rep) + "-->\n";
    s += svg_frame(a, "ln N1", "ln ratio");

    // fitted line, anchored at the centroid of the points
    {
        double mean_x = 0, mean_y = 0;
        for (size_t i = 0; i < xs.size(); ++i) { mean_x += xs[i]; mean_y += ys[i]; }
        mean_x /= xs.size();
        mean_y /= ys.size();
        double y0 = mean_y + rep.fitted_slope * (a.xmin - mean_x);
        double y1 = mean_y + rep.fitted_slope * (a.xmax - mean_x);
        std::ostringstream o;
        o << "<line x1=\"" << a.px(a.xmin) << "\" y1=\"" << a.py(y0) << "\" x2=\""
          << a.px(a.xmax) << "\" y2=\"" << a.py(y1)
          << "\" stroke=\"#888888\" stroke-dasharray=\"5,3\"/>\n";
        s += o.str();
    }

    std::ostringstream pl;
    pl << "<polyline fill=\"none\" stroke=\"#0057b8\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < xs.size(); ++i) pl << a.px(xs[i]) << "," << a.py(ys[i]) << " ";
    pl << "\"/>\n";
    for (size_t i = 0; i < xs.size(); ++i)
        pl << "<circle cx=\"" << a.px(xs[i]) << "\" cy=\"" << a.py(ys[i])
           << "\" r=\"3\" fill=\"#0057b8\"/>\n";
    s += pl.str();

    char ann[160];
    std::snprintf(ann, sizeof(ann),
                  "<text x=\"%g\" y=\"%g\" font-size=\"13\">slope=%.3f&#177;%.3f "
                  "(predicted %.3f, %s)</text>\n",
                  SvgAxes::ml + 10.0, SvgAxes::mt + 18.0, rep.fitted_slope, rep.slope_stderr,
                  rep.predicted_slope,
                  rep.verdict == SweepVerdict::Divergent ? "divergent" : "bounded");
    s += ann;
    s += "</svg>\n";
    return s;
}

std::string decay_plot_svg(const std::vector<double>& times, const std::vector<double>& values,
                           bool timestamp) {
    if (times.empty() || times.size() != values.size())
        throw validation_error("decay_plot_svg: empty or mismatched series");
    std::vector<double> ys;
    for (double v : values) ys.push_back(std::log10(std::max(std::abs(v), 1e-300)));
    SvgAxes a{times.front(), times.back(), *std::min_element(ys.begin(), ys.end()),
              *std::max_element(ys.begin(), ys.end())};
    if (a.xmax == a.xmin) a.xmax += 1;
    if (a.ymax == a.ymin) { a.ymax += 0.5; a.ymin -= 0.5; }

    std::string s = svg_header(timestamp);
    s += "<!-- data\nt,value\n";
    for (size_t i = 0; i < times.size(); ++i)
        s += fmt17(times[i]) + "," + fmt17(values[i]) + "\n";
    s += "-->\n";
    s += svg_frame(a, "t", "log10 norm");
    std::ostringstream pl;
    pl << "<polyline fill=\"none\" stroke=\"#b80057\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < times.size(); ++i) pl << a.px(times[i]) << "," << a.py(ys[i]) << " ";
    pl << "\"/>\n";
    s += pl.str();
    s += "</svg>\n";
    return s;
}

void emit_plot(const SweepReport& rep, const std::filesystem::path& path, bool timestamp) {
    atomic_write(path, sweep_plot_svg(rep, timestamp));
}

void emit_plot(const std::vector<double>& times, const std::vector<double>& values,
               const std::filesystem::path& path, bool timestamp) {
    atomic_write(path, decay_plot_svg(times, values, timestamp));
}

namespace {

Field build_initial_condition(const ExperimentConfig& cfg, const GridPtr& grid) {
    Field u0(grid);
    const Grid1D& g = *grid;
    if (cfg.ic.kind == "zero") return u0;
    if (cfg.ic.kind == "bump") {
        const double c = g.domain_length() / 2.0;
        for (std::int64_t j = 0; j < g.n_points(); ++j) {
            double r = (g.point(j) - c) / 2.0;
            double sech = 1.0 / std::cosh(r);
            u0.values[j] = cfg.ic.amplitude * sech * sech;
        }
        return u0;
    }
    // random-hs: |u_hat| ~ <xi>^{-s-1/2}, conjugate-symmetric, unit H^s norm
    SpectralField u_hat(grid);
    GaussianRng rng(cfg.seed * 0x9E3779B97F4A7C15ULL + 17);
    const std::int64_t n = g.n_points();
    for (std::int64_t i = 0; i < n; ++i) {
        std::int64_t k = g.mode(i);
        if (k <= 0) continue;
        double xi = g.frequency(i);
        double env = std::pow(1.0 + xi * xi, (-cfg.model.s - 0.5) / 2.0);
        cplx z(rng(), rng());
        u_hat.coeffs[i] = env * z;
        u_hat.coeffs[n / 2 - k] = std::conj(env * z);
    }
    double hs = sobolev_norm(u_hat, cfg.model.s);
    if (hs > 0)
        for (auto& c : u_hat.coeffs) c *= cfg.ic.amplitude / hs;
    return transform(u_hat);
}

void write_error_report(const std::filesystem::path& out_dir, int code, const std::string& msg) {
    json j;
    j["status"] = "error";
    j["code"] = code;
    j["message"] = msg;
    std::fprintf(stderr, "%s\n", j.dump().c_str());
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!ec) {
        try {
            atomic_write(out_dir / "error.json", j.dump(2) + "\n");
        } catch (...) {
        }
    }
}

// chunked parallel map over [0, n)
void parallel_for(std::int64_t n, int jobs, const std::function<void(std::int64_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    std::atomic<std::int64_t> next{0};
    int nw = static_cast<int>(std::min<std::int64_t>(jobs, n));
    std::vector<std::exception_ptr> errors(nw);
    for (int w = 0; w < nw; ++w)
        workers.emplace_back([&, w] {
            try {
                for (std::int64_t i = next++; i < n; i = next++) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : workers) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

int do_solve(const ExperimentConfig& cfg, const std::filesystem::path& out, bool decay_mode) {
    auto grid = make_grid(cfg.n_points, cfg.domain_length);
    Field u0 = build_initial_condition(cfg, grid);
    Trajectory traj = solve_ivp(u0, cfg.run_T, cfg.dt, cfg.model, cfg.record_every);

    {
        std::ostringstream csv;
        write_trajectory_csv(traj, cfg.s_probe, csv);
        atomic_write(out / "trajectory.csv", csv.str());
    }
    if (!decay_mode) {
        for (size_t i = 0; i < traj.states.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_%04zu.bin", i);
            std::ostringstream bin(std::ios::binary);
            write_snapshot(traj.states[i], traj.times[i], cfg.model.alpha, bin);
            atomic_write(out / name, bin.str());
        }
    }

    auto decay = decay_diagnostic(traj, cfg.s_probe);
    if (decay_mode) {
        std::string csv = "t,hs_norm\n";
        for (size_t i = 0; i < decay.size(); ++i)
            csv += fmt17(traj.times[i]) + "," + fmt17(decay[i]) + "\n";
        atomic_write(out / "decay.csv", csv);
        emit_plot(traj.times, decay, out / "decay.svg", cfg.svg_timestamp);
    }

    Field final_state = transform(traj.states.back());
    json j;
    j["status"] = "ok";
    j["subcommand"] = decay_mode ? "decay" : "solve";
    j["records"] = traj.times.size();
    j["final_t"] = traj.times.back();
    j["final_l2"] = sobolev_norm(traj.states.back(), 0.0);
    j["edge_amplitude_ratio"] = edge_amplitude_ratio(final_state);
    {
        double m0 = traj.states.front().coeffs[grid->n_points() / 2].real();
        double m1 = traj.states.back().coeffs[grid->n_points() / 2].real();
        j["mean_drift"] = std::abs(m1 - m0) / grid->domain_length();
    }
    atomic_write(out / "summary.json", j.dump(2) + "\n");
    return 0;
}

int do_picard(const ExperimentConfig& cfg, const std::filesystem::path& out) {
    auto grid = make_grid(cfg.n_points, cfg.domain_length);
    Field u0 = build_initial_condition(cfg, grid);
    PicardResult res = picard_solve(u0, cfg.picard, cfg.model);

    json j;
    j["status"] = res.converged ? "ok" : "non-convergence";
    j["subcommand"] = "picard";
    j["converged"] = res.converged;
    j["iterations"] = res.iterations;
    j["diffs"] = res.diffs;
    j["contraction_ratios"] = res.ratios;

    double max_err = 0.0;
    if (res.converged) {
        double resolution_change = duhamel_resolution_check(res.fixed_point, u0, cfg.picard,
                                                            cfg.model);
        j["quadrature_resolution_change"] = resolution_change;
        j["quadrature_warning"] = resolution_change > 1e-6;

        const SpaceTimeGrid& st = *res.fixed_point.st_grid;
        const double lattice_dt = st.dt();
        const std::int64_t sub = 8;
        const double direct_dt = lattice_dt / sub;
        const double t_half = cfg.picard.T / 2.0;
        std::int64_t n_cmp = static_cast<std::int64_t>(std::floor(t_half / lattice_dt + 1e-12));
        Trajectory direct = solve_ivp(u0, n_cmp * lattice_dt, direct_dt, cfg.model, sub);
        std::string csv = "t,l2_error\n";
        for (std::int64_t i = 0; i <= n_cmp; ++i) {
            std::int64_t jslot = st.time_zero_index() + i;
            std::vector<cplx> slice(st.n_x());
            for (std::int64_t k = 0; k < st.n_x(); ++k) slice[k] = res.fixed_point.at(jslot, k);
            Field diff(grid);
            Field direct_phys = transform(direct.states[i]);
            for (std::int64_t k = 0; k < st.n_x(); ++k)
                diff.values[k] = slice[k].real() - direct_phys.values[k];
            double err = l2_norm(diff);
            max_err = std::max(max_err, err);
            csv += fmt17(i * lattice_dt) + "," + fmt17(err) + "\n";
        }
        atomic_write(out / "picard_compare.csv", csv);
        j["direct_agreement_max_l2_error"] = max_err;
    }
    atomic_write(out / "picard.json", j.dump(2) + "\n");
    atomic_write(out / "summary.json", j.dump(2) + "\n");
    return res.converged ? 0 : 3;
}

int do_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out) {
    struct Point {
        double alpha, s;
    };
    std::vector<Point> points;
    for (double a : cfg.sweep_alpha)
        for (double s : cfg.sweep_s) points.push_back({a, s});
    std::vector<SweepReport> reports(points.size());
    parallel_for(static_cast<std::int64_t>(points.size()), cfg.jobs, [&](std::int64_t i) {
        reports[i] = sharpness_sweep(points[i].s, points[i].alpha, cfg.n1_list, cfg.model);
    });
    json summary = json::array();
    for (size_t i = 0; i < points.size(); ++i) {
        std::string stem = "sweep_a" + fmtg(points[i].alpha) + "_s" + fmtg(points[i].s);
        atomic_write(out / (stem + ".json"), sweep_report_json(reports[i]));
        atomic_write(out / (stem + ".csv"), sweep_report_csv(reports[i]));
        emit_plot(reports[i], out / (stem + ".svg"), cfg.svg_timestamp);
        json e;
        e["alpha"] = points[i].alpha;
        e["s"] = points[i].s;
        e["fitted_slope"] = reports[i].fitted_slope;
        e["predicted_slope"] = reports[i].predicted_slope;
        e["verdict"] = reports[i].verdict == SweepVerdict::Divergent ? "divergent" : "bounded";
        summary.push_back(e);
    }
    json j;
    j["status"] = "ok";
    j["subcommand"] = "bilinear-sweep";
    j["points"] = summary;
    atomic_write(out / "summary.json", j.dump(2) + "\n");
    return 0;
}

int do_blocks(const ExperimentConfig& cfg, const std::filesystem::path& out) {
    auto family = plus_minus_block_family();
    std::vector<BlockSharpness> rows(family.size());
    parallel_for(static_cast<std::int64_t>(family.size()), cfg.jobs,
                 [&](std::int64_t i) { rows[i] = block_sharpness(family[i], cfg.model); });
    std::string csv = "N1,N2,N3,L1,L2,L3,bound,measured,ratio\n";
    double rmin = 1e300, rmax = 0.0;
    for (const auto& r : rows) {
        csv += fmt17(r.block.n1) + "," + fmt17(r.block.n2) + "," + fmt17(r.block.n3) + "," +
               fmt17(r.block.l1) + "," + fmt17(r.block.l2) + "," + fmt17(r.block.l3) + "," +
               fmt17(r.bound) + "," + fmt17(r.measured) + "," + fmt17(r.ratio()) + "\n";
        rmin = std::min(rmin, r.ratio());
        rmax = std::max(rmax, r.ratio());
    }
    atomic_write(out / "blocks.csv", csv);
    json j;
    j["status"] = "ok";
    j["subcommand"] = "blocks";
    j["blocks"] = rows.size();
    j["ratio_min"] = rmin;
    j["ratio_max"] = rmax;
    j["ratio_spread"] = rmax / rmin;
    atomic_write(out / "summary.json", j.dump(2) + "\n");
    return 0;
}

int do_verify(const ExperimentConfig& cfg, const std::filesystem::path& out) {
    const std::vector<LemmaKind> kinds = {
        LemmaKind::LinFree,  LemmaKind::LinDuhamel,   LemmaKind::Smoothing,
        LemmaKind::L4Strichartz, LemmaKind::L2Contract, LemmaKind::CalcA,
        LemmaKind::CalcB};
    std::vector<LemmaVerdict> verdicts(kinds.size());
    parallel_for(static_cast<std::int64_t>(kinds.size()), cfg.jobs, [&](std::int64_t i) {
        verdicts[i] = lemma_check(kinds[i], cfg.trials, cfg.model, cfg.seed, cfg.lemma_opts);
    });
    bool all = true;
    for (size_t i = 0; i < kinds.size(); ++i) {
        atomic_write(out / ("verdict_" + lemma_kind_name(kinds[i]) + ".json"),
                     lemma_verdict_json(verdicts[i]) + "\n");
        all = all && verdicts[i].pass;
    }
    json j;
    j["status"] = "ok";
    j["subcommand"] = "verify";
    j["all_pass"] = all;
    atomic_write(out / "summary.json", j.dump(2) + "\n");
    return 0;
}

}  // namespace

int run_subcommand(const std::string& name, const ExperimentConfig& cfg) {
    std::filesystem::path out(cfg.out_dir);
    try {
        cfg.validate();
        std::filesystem::create_directories(out);
        if (cfg.resume && std::filesystem::exists(out / "summary.json")) return 0;

        if (name == "solve") return do_solve(cfg, out, false);
        if (name == "decay") return do_solve(cfg, out, true);
        if (name == "picard") return do_picard(cfg, out);
        if (name == "bilinear-sweep") return do_sweep(cfg, out);
        if (name == "blocks") return do_blocks(cfg, out);
        if (name == "verify") return do_verify(cfg, out);
        throw validation_error("unknown subcommand: " + name);
    } catch (const validation_error& e) {
        write_error_report(out, 2, e.what());
        return 2;
    } catch (const numerical_error& e) {
        write_error_report(out, 3, e.what());
        return 3;
    }
}

}  // namespace dkdv
