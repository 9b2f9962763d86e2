#include "rodeo/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rodeo/ensemble_engine.hpp"
#include "rodeo/errors.hpp"
#include "rodeo/exact.hpp"
#include "rodeo/jump_engine.hpp"

namespace rodeo {

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

BlochSeries slice(const BlochSeries& s, std::size_t n) {
  BlochSeries r;
  r.times.assign(s.times.begin(), s.times.begin() + static_cast<long>(n));
  r.x.assign(s.x.begin(), s.x.begin() + static_cast<long>(n));
  r.y.assign(s.y.begin(), s.y.begin() + static_cast<long>(n));
  r.z.assign(s.z.begin(), s.z.begin() + static_cast<long>(n));
  r.se_x.assign(s.se_x.begin(), s.se_x.begin() + static_cast<long>(n));
  r.se_y.assign(s.se_y.begin(), s.se_y.begin() + static_cast<long>(n));
  r.se_z.assign(s.se_z.begin(), s.se_z.begin() + static_cast<long>(n));
  return r;
}

void write_trajectory_csv(const std::string& path, const BlochSeries& ex,
                          const BlochSeries& mc, const std::vector<int>* n_classes,
                          const std::vector<long>* reverse_cum, bool breakdown) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "t,x_exact,y_exact,z_exact,x_mc,y_mc,z_mc,"
         "stderr_x,stderr_y,stderr_z,n_classes,reverse_jumps_cum,breakdown_flag\n";
  const std::size_t n = mc.times.size();
  for (std::size_t k = 0; k < n; ++k) {
    out << fmt_g(mc.times[k]) << ',' << fmt_g(ex.x[k]) << ',' << fmt_g(ex.y[k]) << ','
        << fmt_g(ex.z[k]) << ',' << fmt_g(mc.x[k]) << ',' << fmt_g(mc.y[k]) << ','
        << fmt_g(mc.z[k]) << ',' << fmt_g(mc.se_x[k]) << ',' << fmt_g(mc.se_y[k]) << ','
        << fmt_g(mc.se_z[k]) << ',' << (n_classes ? (*n_classes)[k] : 0) << ','
        << (reverse_cum ? (*reverse_cum)[k] : 0) << ','
        << ((breakdown && k + 1 == n) ? 1 : 0) << '\n';
  }
}

void write_populations_csv(const std::string& path, const std::vector<double>& times,
                           const std::vector<std::vector<std::pair<int, long>>>& populations,
                           long n_members) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "t,class_id,weight\n";
  for (std::size_t k = 0; k < populations.size(); ++k)
    for (const auto& [id, count] : populations[k])
      out << fmt_g(times[k]) << ',' << id << ','
          << fmt_g(static_cast<double>(count) / static_cast<double>(n_members)) << '\n';
}

// ---- plotting ----------------------------------------------------------

struct Panel {
  double x0, y0, w, h;
  double tmin, tmax, vmin, vmax;
  double px(double t) const { return x0 + (t - tmin) / (tmax - tmin) * w; }
  double py(double v) const { return y0 + h - (v - vmin) / (vmax - vmin) * h; }
};

std::string fmt_px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void pad_range(double& lo, double& hi) {
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  } else {
    double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
}

void frame(std::string& svg, const Panel& p, const std::string& title) {
  svg += "<rect x=\"" + fmt_px(p.x0) + "\" y=\"" + fmt_px(p.y0) + "\" width=\"" +
         fmt_px(p.w) + "\" height=\"" + fmt_px(p.h) +
         "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  svg += "<text x=\"" + fmt_px(p.x0) + "\" y=\"" + fmt_px(p.y0 - 8) +
         "\" font-size=\"14\" fill=\"#222\">" + title + "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    double t = p.tmin + (p.tmax - p.tmin) * i / 4.0;
    double x = p.px(t);
    svg += "<line x1=\"" + fmt_px(x) + "\" y1=\"" + fmt_px(p.y0) + "\" x2=\"" + fmt_px(x) +
           "\" y2=\"" + fmt_px(p.y0 + p.h) + "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt_px(x) + "\" y=\"" + fmt_px(p.y0 + p.h + 16) +
           "\" font-size=\"11\" fill=\"#444\" text-anchor=\"middle\">" + fmt_tick(t) +
           "</text>\n";
    double v = p.vmin + (p.vmax - p.vmin) * i / 4.0;
    double y = p.py(v);
    svg += "<line x1=\"" + fmt_px(p.x0) + "\" y1=\"" + fmt_px(y) + "\" x2=\"" +
           fmt_px(p.x0 + p.w) + "\" y2=\"" + fmt_px(y) +
           "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt_px(p.x0 - 6) + "\" y=\"" + fmt_px(y + 4) +
           "\" font-size=\"11\" fill=\"#444\" text-anchor=\"end\">" + fmt_tick(v) +
           "</text>\n";
  }
}

void polyline(std::string& svg, const Panel& p, const std::vector<double>& ts,
              const std::vector<double>& vs, const char* color, bool dashed) {
  if (ts.empty()) return;
  svg += "<polyline fill=\"none\" stroke=\"";
  svg += color;
  svg += "\" stroke-width=\"1.5\"";
  if (dashed) svg += " stroke-dasharray=\"6 3\"";
  svg += " points=\"";
  // Thin long series so the file stays small; 2000 points is plenty visually.
  std::size_t stride = ts.size() > 2000 ? ts.size() / 2000 : 1;
  for (std::size_t k = 0; k < ts.size(); k += stride) {
    svg += fmt_px(p.px(ts[k])) + "," + fmt_px(p.py(vs[k])) + " ";
  }
  if ((ts.size() - 1) % stride != 0)
    svg += fmt_px(p.px(ts.back())) + "," + fmt_px(p.py(vs.back()));
  svg += "\"/>\n";
}

const char* kColors[6] = {"#d62728", "#2ca02c", "#1f77b4",
                          "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

void write_plot_svg(const std::string& path, const BlochSeries& exact,
                    const BlochSeries& mc,
                    const std::vector<std::vector<std::pair<int, long>>>& populations,
                    long n_members) {
  const double tmin = exact.times.empty() ? 0.0 : exact.times.front();
  const double tmax = exact.times.empty() ? 1.0 : std::max(exact.times.back(), tmin + 1e-9);

  double lo = -1.0, hi = 1.0;
  for (const auto* s : {&exact, &mc}) {
    for (const auto* comp : {&s->x, &s->y, &s->z}) {
      for (double v : *comp) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  pad_range(lo, hi);
  Panel top{70, 40, 780, 300, tmin, tmax, lo, hi};

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"640\" "
         "viewBox=\"0 0 900 640\">\n";
  svg += "<rect width=\"900\" height=\"640\" fill=\"white\"/>\n";
  frame(svg, top, "state components (solid: integrated, dashed: sampled)");
  const char* names[3] = {"x", "y", "z"};
  const std::vector<double>* ev[3] = {&exact.x, &exact.y, &exact.z};
  const std::vector<double>* mv[3] = {&mc.x, &mc.y, &mc.z};
  for (int c = 0; c < 3; ++c) {
    polyline(svg, top, exact.times, *ev[c], kColors[c], false);
    polyline(svg, top, mc.times, *mv[c], kColors[c], true);
    double lx = top.x0 + top.w - 120 + 40.0 * c;
    svg += "<text x=\"" + fmt_px(lx) + "\" y=\"" + fmt_px(top.y0 + 16) +
           "\" font-size=\"12\" fill=\"" + kColors[c] + "\">" + names[c] + "</text>\n";
  }

  Panel bottom{70, 420, 780, 170, tmin, tmax, 0.0, 1.0};
  if (!populations.empty()) {
    // One line per class id, weight = fraction of members.
    std::vector<int> ids;
    for (const auto& snap : populations)
      for (const auto& [id, count] : snap)
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    bottom.vmin = 0.0;
    bottom.vmax = 1.0;
    pad_range(bottom.vmin, bottom.vmax);
    frame(svg, bottom, "class populations");
    for (std::size_t i = 0; i < ids.size(); ++i) {
      std::vector<double> w(populations.size(), 0.0);
      for (std::size_t k = 0; k < populations.size(); ++k)
        for (const auto& [id, count] : populations[k])
          if (id == ids[i])
            w[k] = static_cast<double>(count) / static_cast<double>(n_members);
      const char* color = kColors[i % 6];
      polyline(svg, bottom, mc.times, w, color, false);
      svg += "<text x=\"" + fmt_px(bottom.x0 + bottom.w - 100) + "\" y=\"" +
             fmt_px(bottom.y0 + 16 + 14.0 * static_cast<double>(i % 10)) +
             "\" font-size=\"11\" fill=\"" + color + "\">class " +
             std::to_string(ids[i]) + "</text>\n";
    }
  } else {
    double shi = 1e-12;
    for (const auto* comp : {&mc.se_x, &mc.se_y, &mc.se_z})
      for (double v : *comp) shi = std::max(shi, v);
    bottom.vmin = 0.0;
    bottom.vmax = shi;
    pad_range(bottom.vmin, bottom.vmax);
    frame(svg, bottom, "standard errors");
    const std::vector<double>* sv[3] = {&mc.se_x, &mc.se_y, &mc.se_z};
    for (int c = 0; c < 3; ++c) polyline(svg, bottom, mc.times, *sv[c], kColors[c], false);
  }
  svg += "</svg>\n";

  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << svg;
}

namespace {

nlohmann::json config_echo(const RunConfig& cfg) {
  return {{"mode", cfg.mode},
          {"preset", cfg.preset_name},
          {"strategy", cfg.strategy_name},
          {"dim", cfg.model.dim()},
          {"dt", cfg.dt},
          {"t_max", cfg.t_max},
          {"n_traj", cfg.n_traj},
          {"seed", cfg.seed},
          {"threads", cfg.threads},
          {"max_event_prob", cfg.max_event_prob},
          {"out_dir", cfg.out_dir}};
}

nlohmann::json compare_json(const CompareReport& r) {
  return {{"pass", r.pass},
          {"n_points", r.n_points},
          {"n_failures", r.n_failures},
          {"max_deviation", r.max_dev},
          {"max_deviation_time", r.max_dev_time},
          {"max_deviation_component", std::string(1, r.max_dev_component)},
          {"min_margin", r.min_margin}};
}

nlohmann::json breakdown_json(const BreakdownEvent& e) {
  nlohmann::json target = nlohmann::json::array();
  for (const auto& a : e.missing_target)
    target.push_back({a.real(), a.imag()});
  return {{"time", e.time},
          {"source_class", e.source_class},
          {"eigenindex", e.eigenindex},
          {"rate", e.rate},
          {"missing_target", target}};
}

}  // namespace

RunOutcome run(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  RunOutcome out;
  nlohmann::json& s = out.summary;
  s["config"] = config_echo(cfg);

  const std::string traj_path = cfg.out_dir + "/trajectory.csv";
  const std::string pop_path = cfg.out_dir + "/populations.csv";
  const std::string svg_path = cfg.out_dir + "/plot.svg";
  const std::string summary_path = cfg.out_dir + "/summary.json";

  auto finish = [&](int code, const std::string& status) {
    out.exit_code = code;
    out.status = status;
    s["status"] = status;
    s["exit_code"] = code;
    std::ofstream f(summary_path);
    f << s.dump(2) << "\n";
    return out;
  };

  try {
    CMatrix rho0 = projector(cfg.initial_state);
    DensityTrajectory exact = evolve_exact(cfg.model, rho0, cfg.dt, cfg.t_max);
    BlochSeries bex = bloch_series(exact);
    s["grid_points"] = bex.times.size();

    TrajectoryConfig tc;
    tc.dt = cfg.dt;
    tc.t_max = cfg.t_max;
    tc.n_traj = cfg.n_traj;
    tc.seed = cfg.seed;
    tc.max_event_prob = cfg.max_event_prob;
    tc.threads = cfg.threads;

    if (cfg.mode == "exact") {
      write_trajectory_csv(traj_path, bex, bex, nullptr, nullptr, false);
      write_plot_svg(svg_path, bex, bex, {}, cfg.n_traj);
      s["t_end"] = bex.times.back();
      return finish(0, "ok");
    }

    if (cfg.mode == "jump" || (cfg.mode == "compare" && cfg.compare_engine == "jump")) {
      JumpEnsembleResult jr =
          run_jump_ensemble(cfg.model, cfg.strategy, cfg.initial_state, tc);
      BlochSeries bmc = bloch_series(jr.ensemble);
      CompareReport rep = compare(bex, bmc, cfg.compare_abs_floor, cfg.compare_z_tol);
      write_trajectory_csv(traj_path, bex, bmc, nullptr, nullptr, false);
      write_plot_svg(svg_path, bex, bmc, {}, cfg.n_traj);
      s["jumps"] = {{"direct", jr.total_jumps}, {"reverse", 0}};
      s["comparison"] = compare_json(rep);
      s["t_end"] = bmc.times.back();
      if (cfg.mode == "compare" && !rep.pass) return finish(1, "compare_failed");
      return finish(0, "ok");
    }

    // nmqj, witness, and compare against the ensemble engine
    NmqjResult nr = run_nmqj(cfg.model, cfg.strategy, cfg.initial_state, tc);
    BlochSeries bmc = bloch_series(nr.ensemble);
    BlochSeries bcut = slice(bex, bmc.times.size());
    CompareReport rep = compare(bcut, bmc, cfg.compare_abs_floor, cfg.compare_z_tol);
    write_trajectory_csv(traj_path, bcut, bmc, &nr.n_classes, &nr.reverse_jumps_cum,
                         nr.breakdown.has_value());
    write_populations_csv(pop_path, bmc.times, nr.populations, cfg.n_traj);
    write_plot_svg(svg_path, bcut, bmc, nr.populations, cfg.n_traj);
    s["jumps"] = {{"direct", nr.direct_jumps}, {"reverse", nr.reverse_jumps}};
    s["comparison"] = compare_json(rep);
    s["n_classes_final"] = nr.final_classes.size();
    s["t_end"] = bmc.times.back();
    if (nr.breakdown) s["breakdown"] = breakdown_json(*nr.breakdown);

    if (cfg.mode == "witness") {
      PositivityMonitor mon = positivity_monitor(exact);
      ChoiSpectrumSeries choi = propagator_choi(cfg.model, cfg.dt, cfg.t_max);
      double min_mu = mon.mu.empty() ? 0.0 : *std::min_element(mon.mu.begin(), mon.mu.end());
      double min_choi = choi.min_eigenvalue.empty()
                            ? 0.0
                            : *std::min_element(choi.min_eigenvalue.begin(),
                                                choi.min_eigenvalue.end());
      nlohmann::json pos = {{"min_mu", min_mu}, {"choi_min_eigenvalue", min_choi}};
      if (mon.first_violation_time) pos["first_violation_time"] = *mon.first_violation_time;
      if (choi.first_negative_time) pos["choi_first_negative_time"] = *choi.first_negative_time;
      s["positivity"] = pos;
      return finish(0, "ok");
    }
    if (nr.breakdown) return finish(4, "breakdown");
    if (cfg.mode == "compare" && !rep.pass) return finish(1, "compare_failed");
    return finish(0, "ok");
  } catch (const StepTooLarge& e) {
    s["error"] = e.what();
    return finish(3, "step_too_large");
  } catch (const NegativeRate& e) {
    s["error"] = e.what();
    s["negative_rate"] = {
        {"time", e.time()}, {"eigenindex", e.eigenindex()}, {"rate", e.rate()}};
    return finish(3, "negative_rate");
  }
}

}  // namespace rodeo
