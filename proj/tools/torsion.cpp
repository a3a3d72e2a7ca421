// torsion: simulate, analyze, and plan thermal-noise-limited torsion
// pendulum measurements. Subcommands: simulate, analyze, model, plan,
// validate. Exit codes: 0 ok, 1 validation failure, 2 I/O failure,
// 3 identity/comparison failure.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "torsion/config.hpp"
#include "torsion/constants.hpp"
#include "torsion/langevin.hpp"
#include "torsion/pendulum.hpp"
#include "torsion/planner.hpp"
#include "torsion/rng.hpp"
#include "torsion/series_io.hpp"
#include "torsion/spectral.hpp"
#include "torsion/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace torsion;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_io = 2;
constexpr int exit_identity = 3;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

KeyValueConfig load_config(const CommonArgs& args, bool required) {
  KeyValueConfig cfg;
  if (!args.config_path.empty())
    cfg = KeyValueConfig::parse_file(args.config_path);
  else if (required)
    throw std::invalid_argument("--config is required for this command");
  for (const auto& ov : args.overrides) cfg.apply_override(ov);
  if (args.seed) cfg.set("sim.seed", std::to_string(*args.seed));
  if (args.workers) cfg.set("runtime.workers", std::to_string(*args.workers));
  return cfg;
}

fs::path prepare_out_dir(const CommonArgs& args) {
  fs::path dir(args.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir))
    throw std::runtime_error("cannot create output directory " +
                             dir.string());
  return dir;
}

PendulumParams pendulum_from(const KeyValueConfig& cfg) {
  PendulumParams p;
  p.inertia = cfg.get_double("pendulum.inertia");
  p.damping = cfg.get_double("pendulum.damping");
  p.stiffness = cfg.get_double("pendulum.stiffness");
  p.temperature = cfg.get_double("pendulum.temperature");
  return p;
}

SimConfig sim_config_from(const KeyValueConfig& cfg) {
  SimConfig sim;
  sim.pendulum = pendulum_from(cfg);
  const std::string mode = cfg.get_string("sim.mode", "free");
  if (mode == "feedback") {
    FeedbackParams fb;
    fb.proportional_gain = cfg.get_double("feedback.proportional_gain");
    fb.integral_gain = cfg.get_double("feedback.integral_gain");
    sim.feedback = fb;
    sim.include_inertia = cfg.get_bool("sim.include_inertia", false);
  } else if (mode != "free") {
    throw std::invalid_argument("sim.mode must be 'free' or 'feedback'");
  }
  sim.dt = cfg.get_double("sim.dt");
  sim.n_steps = cfg.get_int("sim.n_steps");
  if (cfg.has("sim.n_burnin")) sim.n_burnin = cfg.get_int("sim.n_burnin");
  sim.seed = cfg.get_uint("sim.seed", 0);
  const std::string stepper = cfg.get_string("sim.stepper", "exact");
  if (stepper == "exact")
    sim.stepper = StepperKind::ExactGaussian;
  else if (stepper == "euler")
    sim.stepper = StepperKind::EulerMaruyama;
  else
    throw std::invalid_argument("sim.stepper must be 'exact' or 'euler'");
  sim.noise_enabled = cfg.get_bool("sim.noise", true);
  sim.external_torque = cfg.get_double("sim.external_torque", 0.0);
  sim.initial_angle = cfg.get_double("sim.initial_angle", 0.0);
  return sim;
}

KeyValueConfig echo_of(const SimConfig& sim) {
  KeyValueConfig echo;
  for (const auto& [k, v] : sim.canonical_items()) echo.set(k, v);
  return echo;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const CommonArgs& args) {
  const KeyValueConfig cfg = load_config(args, true);
  const SimConfig base = sim_config_from(cfg);
  base.validate();

  const std::int64_t n_records = cfg.get_int("sim.n_records", 1);
  if (n_records < 1)
    throw std::invalid_argument("sim.n_records must be >= 1");
  const int workers = static_cast<int>(
      std::min<std::int64_t>(cfg.get_int("runtime.workers", 1), n_records));
  if (workers < 1) throw std::invalid_argument("runtime.workers must be >= 1");

  const std::string prefix = cfg.get_string("output.prefix", "run");
  const std::string format = cfg.get_string("output.format", "text");
  if (format != "text" && format != "binary" && format != "both")
    throw std::invalid_argument(
        "output.format must be text, binary, or both");
  const fs::path dir = prepare_out_dir(args);

  std::vector<std::string> written(static_cast<std::size_t>(n_records) * 2);
  std::vector<std::string> warnings(static_cast<std::size_t>(n_records));
  std::atomic<std::int64_t> cursor{0};
  std::vector<std::string> failures(static_cast<std::size_t>(workers));

  auto record_name = [&](std::int64_t i, const char* channel,
                         const char* ext) {
    char tag[32] = "";
    if (n_records > 1)
      std::snprintf(tag, sizeof(tag), ".r%04lld",
                    static_cast<long long>(i));
    return (dir / (prefix + tag + "." + channel + ext)).string();
  };

  auto run_record = [&](std::int64_t i) {
    SimConfig rec = base;
    if (n_records > 1)
      rec.seed = Rng::derive_stream(base.seed, static_cast<std::uint64_t>(i));
    KeyValueConfig echo = echo_of(rec);
    if (n_records > 1) {
      echo.set("ensemble.master_seed", std::to_string(base.seed));
      echo.set("ensemble.index", std::to_string(i));
    }
    auto emit = [&](const TimeSeries& ts, const char* channel,
                    std::size_t slot) {
      if (format != "binary") {
        write_timeseries_text(ts, echo, record_name(i, channel, ".txt"));
        written[slot] = record_name(i, channel, ".txt");
      }
      if (format != "text") {
        write_timeseries_binary(ts, record_name(i, channel, ".bin"));
        if (written[slot].empty())
          written[slot] = record_name(i, channel, ".bin");
      }
    };
    if (rec.feedback) {
      const FeedbackSimResult res = simulate_feedback(rec);
      emit(res.angle, "angle", static_cast<std::size_t>(i) * 2);
      emit(res.integrator_torque, "torque",
           static_cast<std::size_t>(i) * 2 + 1);
      warnings[static_cast<std::size_t>(i)] = res.warning;
    } else {
      const FreeSimResult res = simulate_free(rec);
      emit(res.angle, "angle", static_cast<std::size_t>(i) * 2);
      emit(res.angular_velocity, "velocity",
           static_cast<std::size_t>(i) * 2 + 1);
    }
  };

  auto worker = [&](int w) {
    try {
      for (;;) {
        const std::int64_t i = cursor.fetch_add(1);
        if (i >= n_records) break;
        run_record(i);
      }
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(w)] = e.what();
    }
  };
  if (workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failures)
    if (!f.empty()) throw std::runtime_error(f);

  // sidecar with the resolved configuration and output listing
  KeyValueConfig meta = echo_of(base);
  meta.set("sim.n_records", std::to_string(n_records));
  meta.set("output.prefix", prefix);
  meta.set("output.format", format);
  const std::string meta_path = (dir / (prefix + ".meta")).string();
  std::ofstream meta_out(meta_path);
  if (!meta_out) throw std::runtime_error("cannot write " + meta_path);
  meta_out << "# torsion simulate sidecar\n" << meta.canonical_text();
  meta_out << "fingerprint = " << to_hex(base.fingerprint()) << "\n";
  for (std::size_t s = 0; s < written.size(); ++s)
    if (!written[s].empty())
      meta_out << "file." << s << " = " << written[s] << "\n";
  for (std::size_t i = 0; i < warnings.size(); ++i)
    if (!warnings[i].empty())
      meta_out << "warning." << i << " = " << warnings[i] << "\n";
  meta_out.close();

  std::cout << "wrote " << n_records * 2 << " series file(s) under "
            << dir.string() << " (prefix " << prefix << ")\n";
  for (const auto& w : warnings)
    if (!w.empty()) std::cout << "warning: " << w << "\n";
  return exit_ok;
}

// ----------------------------------------------------------------- analyze

NoiseSpectrum sample_model_psd(const SimConfig& sim, double arm_radius,
                               Channel channel,
                               const std::vector<double>& freqs) {
  NoiseSpectrum model;
  model.kind = sim.feedback ? SpectrumKind::ForceDensity
                            : SpectrumKind::AngleDensity;
  for (double f : freqs) {
    model.frequency.push_back(f);
    if (sim.feedback) {
      if (channel != Channel::IntegratorTorque)
        throw std::invalid_argument(
            "feedback analysis expects an IntegratorTorque series");
      model.value.push_back(
          feedback_force_psd(sim.pendulum, *sim.feedback, arm_radius, f));
    } else {
      if (channel != Channel::Angle)
        throw std::invalid_argument("free analysis expects an Angle series");
      model.value.push_back(free_angle_psd(sim.pendulum, f));
    }
  }
  return model;
}

int cmd_analyze(const CommonArgs& args) {
  const KeyValueConfig cfg = load_config(args, true);
  const std::string input = cfg.get_string("analyze.input");

  KeyValueConfig header;
  TimeSeries ts = read_timeseries_text(input, &header);

  // the header must describe the run that produced the samples
  const SimConfig sim = sim_config_from(header);
  if (sim.fingerprint() != ts.fingerprint)
    throw std::runtime_error(
        input + ": fingerprint mismatch: header configuration digests to " +
        to_hex(sim.fingerprint()) + " but the series is tagged " +
        to_hex(ts.fingerprint) +
        " (series analyzed against the wrong configuration?)");

  const double arm_radius = cfg.get_double("analyze.arm_radius", 1.0);
  if (!(arm_radius > 0))
    throw std::invalid_argument("analyze.arm_radius must be > 0");
  if (sim.feedback) {
    // integrator torque divided by the arm is the measured force
    for (auto& v : ts.values) v /= arm_radius;
  }

  std::size_t segment_len = 1;
  if (cfg.has("analyze.segment_len")) {
    segment_len = static_cast<std::size_t>(cfg.get_int("analyze.segment_len"));
  } else {
    // largest power of two not exceeding an eighth of the record
    while (segment_len * 8 <= ts.values.size()) segment_len <<= 1;
  }
  const double overlap = cfg.get_double("analyze.overlap", 0.5);
  const WindowKind window =
      window_from_name(cfg.get_string("analyze.window", "hann"));
  const PsdEstimate est = estimate_psd(ts, segment_len, overlap, window);

  const double df = est.frequency[1];
  const double f_min = cfg.get_double("analyze.f_min", 5.0 * df);
  const double f_max = cfg.get_double("analyze.f_max", 0.25 / ts.dt);
  const double tolerance = cfg.get_double("analyze.tolerance", 0.10);
  const auto bands = decade_bands(f_min, f_max);

  std::vector<double> model_freqs;
  for (double f : est.frequency)
    if (f > 0) model_freqs.push_back(f);
  const NoiseSpectrum model =
      sample_model_psd(sim, arm_radius, ts.channel, model_freqs);
  const ComparisonReport report = compare_psd(est, model, bands, tolerance);

  // autocorrelation out to three loop relaxation times
  const double omega0 =
      sim.feedback ? std::sqrt(sim.feedback->integral_gain /
                               sim.pendulum.damping)
                   : std::sqrt(sim.pendulum.stiffness / sim.pendulum.inertia);
  const double quality =
      sim.feedback
          ? sim.feedback->integral_gain /
                (omega0 *
                 (sim.pendulum.stiffness + sim.feedback->proportional_gain))
          : sim.pendulum.stiffness / (omega0 * sim.pendulum.damping);
  std::size_t max_lag = static_cast<std::size_t>(
      std::floor(3.0 * 2.0 * quality / omega0 / ts.dt));
  if (cfg.has("analyze.max_lag"))
    max_lag = static_cast<std::size_t>(cfg.get_int("analyze.max_lag"));
  max_lag = std::min(max_lag, ts.values.size() / 10 - 1);
  const std::vector<double> autocorr = estimate_autocorr(ts, max_lag);

  const fs::path dir = prepare_out_dir(args);
  const std::string prefix = cfg.get_string("output.prefix", "analysis");

  KeyValueConfig echo;
  echo.set("analyze.input", input);
  echo.set("analyze.segment_len", std::to_string(segment_len));
  echo.set_double("analyze.overlap", overlap);
  echo.set("analyze.window", window_name(window));
  echo.set_double("analyze.arm_radius", arm_radius);
  echo.set_double("analyze.f_min", f_min);
  echo.set_double("analyze.f_max", f_max);
  echo.set_double("analyze.tolerance", tolerance);
  echo.set("analyze.max_lag", std::to_string(max_lag));
  echo.set("analyze.fingerprint", to_hex(ts.fingerprint));

  // PSD: frequency, estimate, model
  {
    std::vector<double> f_col, est_col, model_col;
    for (std::size_t k = 0; k < est.frequency.size(); ++k) {
      if (est.frequency[k] <= 0) continue;
      f_col.push_back(est.frequency[k]);
      est_col.push_back(est.value[k]);
      model_col.push_back(model.value[f_col.size() - 1]);
    }
    write_columns_text((dir / (prefix + ".psd.txt")).string(), echo,
                       {"frequency_hz", "estimate", "model"},
                       {f_col, est_col, model_col});
  }
  // autocorrelation: lag, estimate, model
  {
    std::vector<double> lag_col, est_col, model_col;
    for (std::size_t l = 0; l < autocorr.size(); ++l) {
      const double t = static_cast<double>(l) * ts.dt;
      lag_col.push_back(t);
      est_col.push_back(autocorr[l]);
      model_col.push_back(
          sim.feedback
              ? feedback_force_autocorr(sim.pendulum, *sim.feedback,
                                        arm_radius, t)
              : free_angle_autocorr(sim.pendulum, t));
    }
    write_columns_text((dir / (prefix + ".autocorr.txt")).string(), echo,
                       {"lag_s", "estimate", "model"},
                       {lag_col, est_col, model_col});
  }

  json report_json;
  report_json["type"] = "psd_comparison";
  report_json["input"] = input;
  report_json["fingerprint"] = to_hex(ts.fingerprint);
  report_json["tolerance"] = report.tolerance;
  report_json["pass"] = report.pass;
  report_json["score"] = report.score;
  report_json["max_abs_rel_deviation"] = report.max_abs_rel_deviation;
  report_json["n_segments"] = est.n_segments;
  for (const auto& band : report.bands) {
    report_json["bands"].push_back({{"f_lo", band.f_lo},
                                    {"f_hi", band.f_hi},
                                    {"n_bins", band.n_bins},
                                    {"estimate_mean", band.estimate_mean},
                                    {"model_mean", band.model_mean},
                                    {"rel_deviation", band.rel_deviation}});
  }
  const std::string report_path = (dir / (prefix + ".report.json")).string();
  std::ofstream report_out(report_path);
  if (!report_out) throw std::runtime_error("cannot write " + report_path);
  report_out << report_json.dump(2) << "\n";
  report_out.close();

  std::cout << (report.pass ? "PASS" : "FAIL") << ": max band deviation "
            << report.max_abs_rel_deviation * 100.0 << "% (tolerance "
            << report.tolerance * 100.0 << "%), " << report.bands.size()
            << " bands, " << est.n_segments << " segments\n";
  return report.pass ? exit_ok : exit_identity;
}

// ------------------------------------------------------------------- model

int cmd_model(const CommonArgs& args) {
  const KeyValueConfig cfg = load_config(args, true);
  const std::string kind = cfg.get_string("model.kind");
  const PendulumParams p = pendulum_from(cfg);
  FeedbackParams fb;
  const bool needs_feedback = kind.rfind("feedback", 0) == 0;
  if (needs_feedback) {
    fb.proportional_gain = cfg.get_double("feedback.proportional_gain");
    fb.integral_gain = cfg.get_double("feedback.integral_gain");
  }
  const double arm_radius = cfg.get_double("model.arm_radius", 1.0);
  const int n_points = static_cast<int>(cfg.get_int("model.n_points", 500));
  if (n_points < 2) throw std::invalid_argument("model.n_points must be >= 2");

  std::vector<double> axis, value;
  std::string axis_name, value_name;
  const bool is_autocorr = kind.find("autocorr") != std::string::npos;
  if (is_autocorr) {
    const double t_max = cfg.get_double("model.t_max");
    if (!(t_max > 0)) throw std::invalid_argument("model.t_max must be > 0");
    for (int i = 0; i < n_points; ++i) {
      const double t = t_max * i / (n_points - 1);
      axis.push_back(t);
      if (kind == "free_angle_autocorr")
        value.push_back(free_angle_autocorr(p, t));
      else if (kind == "feedback_force_autocorr")
        value.push_back(feedback_force_autocorr(p, fb, arm_radius, t));
      else
        throw std::invalid_argument("unknown model.kind '" + kind + "'");
    }
    axis_name = "lag_s";
    value_name = kind;
  } else {
    const double f_min = cfg.get_double("model.f_min");
    const double f_max = cfg.get_double("model.f_max");
    const bool log_spacing = cfg.get_bool("model.log_spacing", true);
    if (!(f_max > f_min) || !(f_min >= 0))
      throw std::invalid_argument("need 0 <= model.f_min < model.f_max");
    if (log_spacing && !(f_min > 0))
      throw std::invalid_argument("log spacing needs model.f_min > 0");
    for (int i = 0; i < n_points; ++i) {
      const double s = static_cast<double>(i) / (n_points - 1);
      const double f = log_spacing
                           ? f_min * std::pow(f_max / f_min, s)
                           : f_min + (f_max - f_min) * s;
      axis.push_back(f);
      if (kind == "free_angle_psd")
        value.push_back(free_angle_psd(p, f));
      else if (kind == "feedback_angle_psd")
        value.push_back(feedback_angle_psd(p, fb, f));
      else if (kind == "feedback_force_psd")
        value.push_back(feedback_force_psd(p, fb, arm_radius, f));
      else
        throw std::invalid_argument("unknown model.kind '" + kind + "'");
    }
    axis_name = "frequency_hz";
    value_name = kind;
  }

  const fs::path dir = prepare_out_dir(args);
  const std::string prefix = cfg.get_string("output.prefix", "model");
  KeyValueConfig echo;
  echo.set("model.kind", kind);
  echo.set("model.n_points", std::to_string(n_points));
  echo.set_double("pendulum.inertia", p.inertia);
  echo.set_double("pendulum.damping", p.damping);
  echo.set_double("pendulum.stiffness", p.stiffness);
  echo.set_double("pendulum.temperature", p.temperature);
  if (needs_feedback) {
    echo.set_double("feedback.proportional_gain", fb.proportional_gain);
    echo.set_double("feedback.integral_gain", fb.integral_gain);
    echo.set_double("model.arm_radius", arm_radius);
  }
  if (is_autocorr) {
    echo.set_double("model.t_max", cfg.get_double("model.t_max"));
  } else {
    echo.set_double("model.f_min", cfg.get_double("model.f_min"));
    echo.set_double("model.f_max", cfg.get_double("model.f_max"));
    echo.set("model.log_spacing",
             cfg.get_bool("model.log_spacing", true) ? "true" : "false");
  }
  const std::string path = (dir / (prefix + "." + kind + ".txt")).string();
  write_columns_text(path, echo, {axis_name, value_name}, {axis, value});
  std::cout << "wrote " << path << "\n";
  return exit_ok;
}

// -------------------------------------------------------------------- plan

int cmd_plan(const CommonArgs& args) {
  const KeyValueConfig cfg = load_config(args, true);
  MeasurementPlan plan;
  plan.wire.radius = cfg.get_double("plan.wire_radius");
  plan.wire.length = cfg.get_double("plan.wire_length");
  plan.wire.internal_viscosity =
      cfg.get_double("plan.wire_viscosity", plan.wire.internal_viscosity);
  plan.wire.torsion_modulus =
      cfg.get_double("plan.wire_modulus", plan.wire.torsion_modulus);
  plan.pendulum = pendulum_from(cfg);
  plan.arm_radius = cfg.get_double("plan.arm_radius");
  plan.curvature_radius = cfg.get_double("plan.curvature_radius");
  plan.separation = cfg.get_double("plan.separation");
  plan.temperature = cfg.get_double("plan.temperature");
  plan.target_accuracy = cfg.get_double("plan.accuracy");
  plan.averaging_time = cfg.get_double("plan.averaging_time");
  const std::string reduction = cfg.get_string("plan.reduction", "perfect");
  if (reduction == "perfect")
    plan.reduction = CasimirReduction::PerfectConductor;
  else if (reduction == "halved")
    plan.reduction = CasimirReduction::DielectricHalved;
  else
    throw std::invalid_argument("plan.reduction must be perfect or halved");
  plan.excess_noise_factor = cfg.get_double("plan.excess_noise_factor", 1.0);
  plan.voltage_noise_density =
      cfg.get_double("plan.voltage_noise_density", 0.0);
  plan.angle_sensitivity = cfg.get_double("plan.angle_sensitivity", 0.0);

  const FeasibilityReport rep = feasibility_report(plan);

  const fs::path dir = prepare_out_dir(args);
  const std::string prefix = cfg.get_string("output.prefix", "plan");

  char buf[160];
  std::ostringstream text;
  text << "measurement feasibility report\n";
  text << "================================\n";
  for (const auto& e : rep.budget.entries) {
    std::snprintf(buf, sizeof(buf), "  %-32s %.6e %s%s\n", e.label.c_str(),
                  e.value, e.unit.c_str(), e.in_total ? "  [noise]" : "");
    text << buf;
  }
  std::snprintf(buf, sizeof(buf), "  %-32s %.6e dyne\n", "total force noise",
                rep.budget.total_force_noise);
  text << buf;
  std::snprintf(buf, sizeof(buf),
                "  required averaging time    %.6e s (thermal only)\n",
                rep.required_averaging_time);
  text << buf;
  std::snprintf(buf, sizeof(buf),
                "  required averaging time    %.6e s (all noise)\n",
                rep.effective_required_averaging_time);
  text << buf;
  std::snprintf(buf, sizeof(buf), "  margin %.6f -> %s\n", rep.margin,
                rep.achievable ? "achievable" : "not achievable");
  text << buf;
  if (rep.casimir_below_validity)
    text << "  note: separation below the 4 um validity range of the "
            "thermal force expression\n";

  const std::string text_path = (dir / (prefix + ".report.txt")).string();
  std::ofstream text_out(text_path);
  if (!text_out) throw std::runtime_error("cannot write " + text_path);
  text_out << text.str();
  text_out.close();

  json j;
  j["type"] = "feasibility_report";
  j["casimir_force_dyne"] = rep.casimir_force;
  j["casimir_below_validity"] = rep.casimir_below_validity;
  j["target_force_noise_dyne"] = rep.target_force_noise;
  j["thermal_force_noise_dyne"] = rep.thermal_force_noise;
  j["effective_force_noise_dyne"] = rep.effective_force_noise;
  j["required_averaging_time_s"] = rep.required_averaging_time;
  j["effective_required_averaging_time_s"] =
      rep.effective_required_averaging_time;
  j["margin"] = rep.margin;
  j["achievable"] = rep.achievable;
  for (const auto& e : rep.budget.entries)
    j["budget"].push_back({{"label", e.label},
                           {"value", e.value},
                           {"unit", e.unit},
                           {"in_total", e.in_total}});
  j["total_force_noise_dyne"] = rep.budget.total_force_noise;
  const std::string json_path = (dir / (prefix + ".report.json")).string();
  std::ofstream json_out(json_path);
  if (!json_out) throw std::runtime_error("cannot write " + json_path);
  json_out << j.dump(2) << "\n";
  json_out.close();

  std::cout << text.str();
  return exit_ok;
}

// ---------------------------------------------------------------- validate

int cmd_validate(std::uint64_t seed, bool inject_fault) {
  const auto checks = run_identity_suite(seed, inject_fault);
  bool all_pass = true;
  for (const auto& c : checks) {
    std::printf("%-36s residual %.6e  (tolerance %.1e)  %s\n",
                c.name.c_str(), c.residual, c.tolerance,
                c.pass ? "PASS" : "FAIL");
    all_pass &= c.pass;
  }
  std::printf("%s: %zu identity check(s)\n", all_pass ? "PASS" : "FAIL",
              checks.size());
  return all_pass ? exit_ok : exit_identity;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "torsion: thermal-noise simulation and measurement planning for "
      "torsion pendulums (CGS units)"};
  app.require_subcommand(1);

  CommonArgs common;
  bool inject_fault = false;

  auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config)
      sub->add_option("--config", common.config_path,
                      "key = value configuration file");
    sub->add_option("--set", common.overrides,
                    "override KEY=VALUE (repeatable)");
    sub->add_option("--out", common.out_dir, "output directory");
    sub->add_option("--seed", common.seed, "override sim.seed");
    sub->add_option("--workers", common.workers, "worker pool size");
  };

  CLI::App* simulate = app.add_subcommand(
      "simulate", "run a seeded Langevin simulation, write series files");
  add_common(simulate, true);
  CLI::App* analyze = app.add_subcommand(
      "analyze",
      "estimate spectra of a simulated record and compare to the model");
  add_common(analyze, true);
  CLI::App* model = app.add_subcommand(
      "model", "evaluate closed-form spectra and autocorrelations on a grid");
  add_common(model, true);
  CLI::App* plan = app.add_subcommand(
      "plan", "wire, noise-budget, and Casimir feasibility report");
  add_common(plan, true);
  CLI::App* validate = app.add_subcommand(
      "validate", "run the built-in closed-form identity suite");
  add_common(validate, false);
  validate->add_flag("--inject-fault", inject_fault,
                     "perturb one identity (for testing the failure path)")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_validation;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(common);
    if (analyze->parsed()) return cmd_analyze(common);
    if (model->parsed()) return cmd_model(common);
    if (plan->parsed()) return cmd_plan(common);
    if (validate->parsed())
      return cmd_validate(common.seed.value_or(20260808), inject_fault);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::runtime_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return exit_io;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  }
  return exit_validation;
}
