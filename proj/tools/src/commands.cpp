#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "protmeas/readout.hpp"
#include "protmeas/rng.hpp"
#include "protmeas/scaling.hpp"
#include "protmeas/tomography.hpp"

namespace protmeas::cli {

namespace {

// Evaluates fn(0..n-1) with bounded concurrency; results stay in index order.
template <typename R>
std::vector<R> ordered_map(std::size_t n, const std::function<R(std::size_t)>& fn) {
  const std::size_t width = std::max(1U, std::thread::hardware_concurrency());
  std::vector<R> out;
  out.reserve(n);
  for (std::size_t start = 0; start < n; start += width) {
    std::vector<std::future<R>> batch;
    for (std::size_t i = start; i < std::min(n, start + width); ++i) {
      batch.push_back(std::async(std::launch::async, fn, i));
    }
    for (auto& f : batch) {
      out.push_back(f.get());
    }
  }
  return out;
}

const char* axis_name(char a) {
  switch (a) {
    case 'x':
      return "x";
    case 'y':
      return "y";
    default:
      return "z";
  }
}

std::string big(const BigInt& v) { return v.str(); }

}  // namespace

std::vector<ResultRecord> simulate(const ExperimentConfig& config) {
  const std::string hash = config.hash();
  const EvolutionOptions options = config.evolution();
  return ordered_map<ResultRecord>(config.schedule.size(), [&](std::size_t i) {
    const EvolutionReport r = analyze(config.setup(config.schedule[i]), options);
    ResultRecord rec = make_record("simulate", hash, config.run.base_seed);
    rec.set("T", r.T)
        .set("pointer_shift", r.pointer_shift)
        .set("expectation_target", r.expectation_target)
        .set("disturbance_prob", r.disturbance_prob)
        .set("entropy_bits", r.entropy_bits)
        .set("pert_error", r.pert_error)
        .set("validity_indicator", r.validity_indicator)
        .set("norm_deficit", r.norm_deficit)
        .set("second_order_phase", options.second_order_phase);
    return rec;
  });
}

std::vector<ResultRecord> monte_carlo_records(const ExperimentConfig& config) {
  const std::string hash = config.hash();
  const EvolutionOptions options = config.evolution();
  const ReadoutOptions readout = config.readout();
  const RunBlock& run = config.run;
  auto per_t = ordered_map<std::vector<ResultRecord>>(config.schedule.size(), [&](std::size_t i) {
    const ProtectiveSetup setup = config.setup(config.schedule[i]);
    const TrialStatistics s =
        monte_carlo(setup, run.trials, run.base_seed, readout, options, run.emit_trials);
    std::vector<ResultRecord> recs;
    ResultRecord summary = make_record("monte-carlo", hash, run.base_seed);
    summary.set("T", setup.T)
        .set("expectation_target", s.expectation_target)
        .set("disturbance_prob", s.exact_disturbance)
        .set("validity_indicator", validity_indicator(setup))
        .set("record", std::string("summary"))
        .set("trials", s.n_trials)
        .set("mean_estimate", s.mean_estimate)
        .set("std_error", s.std_error)
        .set("freq_disturbed", s.freq_disturbed)
        .set("freq_disturbed_se", binomial_std_error(s.exact_disturbance, s.n_trials))
        .set("freq_low_fidelity", s.freq_low_fidelity);
    recs.push_back(std::move(summary));
    for (std::size_t k = 0; k < s.trials.size(); ++k) {
      const ReadoutOutcome& t = s.trials[k];
      ResultRecord rec = make_record("monte-carlo", hash, t.seed);
      rec.set("T", setup.T)
          .set("record", std::string("trial"))
          .set("trial", static_cast<std::uint64_t>(k))
          .set("x_sampled", t.x_sampled)
          .set("o_estimate", t.o_estimate)
          .set("fidelity", t.fidelity)
          .set("projected_back", t.projected_back)
          .set("found_in_initial", t.found_in_initial);
      recs.push_back(std::move(rec));
    }
    return recs;
  });
  std::vector<ResultRecord> out;
  for (auto& v : per_t) {
    std::move(v.begin(), v.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<ResultRecord> tomography_records(const ExperimentConfig& config) {
  if (!config.tomography) {
    throw ConfigError("/tomography", "missing (required by the tomography command)");
  }
  const TomographyBlock& tb = *config.tomography;
  const std::string hash = config.hash();
  const std::uint64_t seed = config.run.base_seed;
  const TomographyOptions options{.apparatus = config.apparatus, .evolution = config.evolution()};
  const BlochVector truth = bloch_of(tb.psi);

  auto per_t = ordered_map<std::vector<ResultRecord>>(config.schedule.size(), [&](std::size_t i) {
    const double T = config.schedule[i];
    const TomographyResult r = protective_tomography(tb.psi, tb.gap, T, tb.mode, seed, options);
    const char* mode = r.mode == TomographyMode::Sampled ? "sampled" : "ideal-mean";
    std::vector<ResultRecord> recs;
    for (const AxisRecord& a : r.per_axis) {
      ResultRecord rec = make_record("tomography", hash, a.seed);
      rec.set("T", T)
          .set("record", std::string("axis"))
          .set("mode", std::string(mode))
          .set("axis", std::string(axis_name(a.axis)))
          .set("estimate", a.estimate)
          .set("survival_probability", a.survival_probability);
      if (r.mode == TomographyMode::Sampled) {
        rec.set("x_sampled", a.x_sampled).set("survived", a.survived);
      }
      recs.push_back(std::move(rec));
    }
    const double err = std::sqrt((r.bloch.x - truth.x) * (r.bloch.x - truth.x) +
                                 (r.bloch.y - truth.y) * (r.bloch.y - truth.y) +
                                 (r.bloch.z - truth.z) * (r.bloch.z - truth.z));
    ResultRecord summary = make_record("tomography", hash, seed);
    summary.set("T", T)
        .set("record", std::string("summary"))
        .set("mode", std::string(mode))
        .set("nx", r.bloch.x)
        .set("ny", r.bloch.y)
        .set("nz", r.bloch.z)
        .set("raw_norm", r.raw.norm())
        .set("clipped", r.clipped)
        .set("bloch_error", err)
        .set("fidelity_true", r.fidelity_true)
        .set("survived", r.survived);
    recs.push_back(std::move(summary));
    return recs;
  });
  std::vector<ResultRecord> out;
  for (auto& v : per_t) {
    std::move(v.begin(), v.end(), std::back_inserter(out));
  }
  return out;
}

ResultRecord scaling_record(const ScalingArgs& args) {
  const ScalingReport r = scaling_report(args.n_qubits, args.seconds_per_measurement,
                                         args.assume_pure, args.c_pure, args.age_seconds);
  const nlohmann::json canonical = {{"N", args.n_qubits},
                                    {"T_per", args.seconds_per_measurement},
                                    {"assume_pure", args.assume_pure},
                                    {"c_pure", args.c_pure},
                                    {"age_seconds", args.age_seconds}};
  ResultRecord rec = make_record("scaling", hex64(fnv1a64(canonical.dump())), 0);
  rec.set("N", static_cast<std::uint64_t>(r.n_qubits))
      .set("d", big(r.dim))
      .set("count_general", big(r.count_general))
      .set("count_pure", big(r.count_pure))
      .set("assume_pure", r.assume_pure)
      .set("c_pure", r.c_pure)
      .set("T_per", r.seconds_per_measurement)
      .set("total_seconds", r.budget.total_seconds)
      .set("age_seconds", args.age_seconds)
      .set("age_universe_ratio", r.budget.age_universe_ratio)
      .set("orders_of_magnitude", r.budget.orders_of_magnitude);
  return rec;
}

LinearFit sweep_fit(const std::vector<ResultRecord>& records, const SweepFitArgs& args) {
  std::vector<double> ts;
  std::vector<double> ys;
  for (const auto& r : records) {
    if (r.find("T") == nullptr || r.find(args.field) == nullptr) {
      continue;
    }
    if (const Value* v = r.find("record"); v != nullptr) {
      const auto* s = std::get_if<std::string>(v);
      if (s != nullptr && *s != "summary") {
        continue;
      }
    }
    if (r.find("validity_indicator") != nullptr && !(r.number("validity_indicator") < args.gate)) {
      continue;
    }
    const double y = r.number(args.field);
    if (!(y > 0.0)) {
      continue;
    }
    ts.push_back(r.number("T"));
    ys.push_back(y);
  }
  if (ts.size() < args.min_points) {
    throw InsufficientRange("insufficient adiabatic range: " + std::to_string(ts.size()) +
                            " record(s) with validity_indicator < " + std::to_string(args.gate) +
                            " and positive " + args.field + ", need " +
                            std::to_string(args.min_points));
  }
  return loglog_fit(ts, ys);
}

ResultRecord fit_record(const LinearFit& fit, const SweepFitArgs& args, const std::string& hash,
                        std::uint64_t seed) {
  ResultRecord rec = make_record("sweep-fit", hash, seed);
  rec.set("field", args.field)
      .set("gate", args.gate)
      .set("slope", fit.slope)
      .set("intercept", fit.intercept)
      .set("r_squared", fit.r_squared)
      .set("points", static_cast<std::uint64_t>(fit.points));
  return rec;
}

// ---------------------------------------------------------------- run_cli

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  bool strict_boundary = false;
  bool second_order_phase = false;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "experiment configuration (JSON)");
  if (config_required) {
    opt->required();
  }
  cmd->add_option("--out", c.out, "output file (default stdout)");
  cmd->add_option("--format", c.format, "json (one object per line) or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--seed", c.seed, "override run.base_seed");
  cmd->add_flag("--strict-boundary", c.strict_boundary, "fail when the pointer reaches the window edge");
  cmd->add_flag("--second-order-phase", c.second_order_phase,
                "include the second-order energy phase in the perturbative state");
}

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (c.seed) {
    cfg.override_seed(*c.seed);
  }
  if (c.strict_boundary) {
    cfg.run.strict_boundary = true;
    cfg.canonical["run"]["strict_boundary"] = true;
  }
  if (c.second_order_phase) {
    cfg.run.second_order_phase = true;
    cfg.canonical["run"]["second_order_phase"] = true;
  }
  return cfg;
}

void emit(const Common& c, const std::vector<ResultRecord>& records, std::ostream& out) {
  const Format f = c.format == "csv" ? Format::Csv : Format::Json;
  if (c.out.empty() || c.out == "-") {
    write_records(out, records, f);
    return;
  }
  std::ofstream file(c.out);
  if (!file) {
    throw ConfigError(c.out, "cannot open output file");
  }
  write_records(file, records, f);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Protective measurement simulator", "protmeas"};
  app.require_subcommand(1);

  Common sim_opts;
  Common mc_opts;
  Common tomo_opts;
  Common fit_opts;
  Common scale_opts;
  auto* sim = app.add_subcommand("simulate", "exact and first-order evolution over a T schedule");
  auto* mc = app.add_subcommand("monte-carlo", "seeded readout trials per T");
  auto* tomo = app.add_subcommand("tomography", "qubit tomography from three protective measurements");
  auto* fit = app.add_subcommand("sweep-fit", "log-log fit of a record field against T");
  auto* scale = app.add_subcommand("scaling", "measurement counts and time budget for N qubits");
  add_common(sim, sim_opts, true);
  add_common(mc, mc_opts, true);
  add_common(tomo, tomo_opts, true);
  add_common(fit, fit_opts, false);

  std::string records_path;
  SweepFitArgs fit_args;
  fit->add_option("--records", records_path, "JSON-lines records to fit ('-' for stdin)");
  fit->add_option("--field", fit_args.field, "record field to fit against T");
  fit->add_option("--gate", fit_args.gate, "keep records with validity_indicator below this");

  ScalingArgs scaling_args;
  scale->add_option("--out", scale_opts.out, "output file (default stdout)");
  scale->add_option("--format", scale_opts.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  scale->add_option("-N,--qubits", scaling_args.n_qubits, "qubit count")
      ->required()
      ->check(CLI::Range(1, 1 << 20));
  scale->add_option("--tper,--Tper", scaling_args.seconds_per_measurement,
                    "seconds per protective measurement")
      ->check(CLI::PositiveNumber);
  scale->add_flag("--pure", scaling_args.assume_pure, "use the pure-state count c 2^N");
  scale->add_option("--c-pure", scaling_args.c_pure, "pure-state count constant")
      ->check(CLI::PositiveNumber);
  scale->add_option("--age", scaling_args.age_seconds, "age of the universe in seconds")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (sim->parsed()) {
      emit(sim_opts, simulate(load(sim_opts)), out);
    } else if (mc->parsed()) {
      emit(mc_opts, monte_carlo_records(load(mc_opts)), out);
    } else if (tomo->parsed()) {
      emit(tomo_opts, tomography_records(load(tomo_opts)), out);
    } else if (scale->parsed()) {
      emit(scale_opts, {scaling_record(scaling_args)}, out);
    } else if (fit->parsed()) {
      if (records_path.empty() == fit_opts.config.empty()) {
        err << "protmeas sweep-fit: give exactly one of --records or --config\n";
        return kUsage;
      }
      std::vector<ResultRecord> records;
      if (!fit_opts.config.empty()) {
        records = simulate(load(fit_opts));
      } else if (records_path == "-") {
        records = read_json_lines(std::cin);
      } else {
        std::ifstream in(records_path);
        if (!in) {
          err << "protmeas sweep-fit: cannot open " << records_path << "\n";
          return kUsage;
        }
        try {
          records = read_json_lines(in);
        } catch (const std::exception& e) {
          err << "protmeas sweep-fit: " << records_path << ": " << e.what() << "\n";
          return kConfig;
        }
      }
      std::string hash;
      std::uint64_t seed = 0;
      if (!records.empty()) {
        if (const auto* h = std::get_if<std::string>(records.front().find("config_hash"))) {
          hash = *h;
        }
        if (const auto* s = std::get_if<std::uint64_t>(records.front().find("seed"))) {
          seed = *s;
        }
      }
      emit(fit_opts, {fit_record(sweep_fit(records, fit_args), fit_args, hash, seed)}, out);
    }
  } catch (const ConfigError& e) {
    err << "protmeas: configuration error at " << e.what() << "\n";
    return kConfig;
  } catch (const ConfigurationError& e) {
    err << "protmeas: configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const ResourceError& e) {
    err << "protmeas: resource limit: " << e.what() << "\n";
    return kResource;
  } catch (const InsufficientRange& e) {
    err << "protmeas: " << e.what() << "\n";
    return kInsufficientRange;
  } catch (const std::exception& e) {
    err << "protmeas: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}

}  // namespace protmeas::cli
