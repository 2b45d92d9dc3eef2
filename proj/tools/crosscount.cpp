// crosscount: simulate / detect / synthesize / train / count / evaluate / sweep.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "crosscount/config.hpp"
#include "crosscount/io.hpp"
#include "crosscount/nn/model_io.hpp"
#include "crosscount/pipeline.hpp"

using namespace crosscount;

namespace {

// Options every subcommand accepts. Precedence: preset < config file < flags.
struct CommonOptions {
  std::string preset = "testbed1";
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<double> tau;
  std::string mode;
  std::optional<double> window_minutes;
  std::optional<double> slot_duration;
  std::optional<int> max_count;
  std::optional<int> hidden;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> learning_rate;
  std::optional<double> momentum;
  std::optional<double> clip_norm;
  std::string scenario_file;

  void attach(CLI::App* app) {
    app->add_option("--preset", preset, "Default parameter column: testbed1 or testbed2");
    app->add_option("--config", config_file, "key=value configuration file");
    app->add_option("--seed", seed, "RNG seed (overrides rng_seed from files)");
    app->add_option("--tau", tau, "Blockage threshold in dBm");
    app->add_option("--mode", mode, "Detector mode: attenuation, deviation or elevation");
    app->add_option("--window-minutes", window_minutes, "Counting window length in minutes");
    app->add_option("--slot-duration", slot_duration, "Slot length in seconds");
    app->add_option("--max-count", max_count, "Largest count class");
    app->add_option("--hidden", hidden, "LSTM hidden units");
    app->add_option("--epochs", epochs, "Training epochs");
    app->add_option("--batch-size", batch_size, "Mini-batch size");
    app->add_option("--learning-rate", learning_rate, "SGDM learning rate");
    app->add_option("--momentum", momentum, "SGDM momentum");
    app->add_option("--clip-norm", clip_norm, "Gradient norm clip (0 disables)");
    app->add_option("--scenario", scenario_file, "key=value simulator scenario file");
  }

  SystemConfig config() const {
    SystemConfig c = crosscount::preset(preset);
    if (!config_file.empty()) c = parse_config(io::read_file(config_file), c);
    if (seed) c.rng_seed = *seed;
    if (tau) c.tau = *tau;
    if (!mode.empty()) c.detector_mode = parse_detector_mode(mode);
    if (window_minutes) c.window_minutes = *window_minutes;
    if (slot_duration) c.slot_duration = *slot_duration;
    if (max_count) c.max_count = *max_count;
    if (hidden) c.lstm_hidden = *hidden;
    if (epochs) c.epochs = *epochs;
    if (batch_size) c.batch_size = *batch_size;
    if (learning_rate) c.learning_rate = *learning_rate;
    if (momentum) c.momentum = *momentum;
    if (clip_norm) c.clip_norm = *clip_norm;
    c.validate();
    return c;
  }

  sim::SimScenario scenario() const {
    sim::SimScenario s;
    if (!scenario_file.empty()) {
      s = parse_scenario(io::read_file(scenario_file));
      s.validate();
      s.require_detectable();
    }
    if (seed) s.rng_seed = *seed;
    return s;
  }
};

void note(const std::string& msg) { std::cerr << "crosscount: " << msg << "\n"; }

void warn_remainder(double total, double minutes) {
  const double rest = trailing_remainder(total, minutes);
  if (rest > 0.0) {
    note("warning: dropping the trailing " + io::format_double(rest) + " s that do not fill a " +
         io::format_double(minutes) + " min window");
  }
}

std::vector<BlockageSequence> read_originals(const std::string& crossings, const std::string& trace,
                                             const std::string& sequences, const SystemConfig& cfg) {
  const int given = !crossings.empty() + !trace.empty() + !sequences.empty();
  if (given != 1) fail(ErrorKind::InvalidArgument, "give exactly one of --crossings, --trace or --originals");
  if (!crossings.empty()) {
    const auto log = io::parse_crossing_log(io::read_file(crossings));
    warn_remainder(log.duration, cfg.window_minutes);
    return originals_from_log(log, cfg);
  }
  if (!trace.empty()) {
    const auto tr = io::parse_rss_trace(io::read_file(trace));
    warn_remainder(tr.window_length(), cfg.window_minutes);
    return originals_from_trace(tr, cfg);
  }
  std::vector<BlockageSequence> out;
  for (auto& row : io::parse_sequence_file(io::read_file(sequences), cfg.slot_duration)) {
    if (row.sequence.size() != cfg.w()) {
      fail(ErrorKind::Mismatch, "original sequences have " + std::to_string(row.sequence.size()) +
                                    " slots but the window holds " + std::to_string(cfg.w()));
    }
    out.push_back(std::move(row.sequence));
  }
  return out;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(io::parse_double(io::trim(piece), "sweep value"));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

nn::EpochCallback progress(bool quiet) {
  if (quiet) return {};
  return [](int epoch, double loss) {
    std::fprintf(stderr, "epoch %d loss %.6f\n", epoch, loss);
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Device-free crowd counting from line-of-sight blockage sequences"};
  app.require_subcommand(1);

  CommonOptions common;
  bool quiet = false;
  std::string out, trace_in, crossings_in, originals_in, dataset_in, model_in;
  int label = 0;
  std::optional<int> agents;
  std::optional<double> duration;
  std::string crossings_out, truth_out, table_out;
  int windows_per_class = 20;
  std::string parameter = "tau", values;

  auto* simulate = app.add_subcommand("simulate", "Simulate walkers and write the RSS trace they cause");
  common.attach(simulate);
  simulate->add_option("--agents", agents, "Number of walkers");
  simulate->add_option("--duration", duration, "Seconds to simulate");
  simulate->add_option("--out", out, "RSS trace output")->required();
  simulate->add_option("--crossings-out", crossings_out, "Crossing log output (all walkers)");
  simulate->add_option("--truth-out", truth_out, "True blockage sequence output (whole duration)");

  auto* detect = app.add_subcommand("detect", "Blockage sequences from an RSS trace, one per window");
  common.attach(detect);
  detect->add_option("--trace", trace_in, "RSS trace")->required();
  detect->add_option("--label", label, "Label written in front of every sequence");
  detect->add_option("--out", out, "Sequence file output")->required();

  auto* synthesize = app.add_subcommand("synthesize", "Balanced training set from single-walker data");
  common.attach(synthesize);
  synthesize->add_option("--crossings", crossings_in, "Crossing log of one walker");
  synthesize->add_option("--trace", trace_in, "RSS trace of one walker (detected window by window)");
  synthesize->add_option("--originals", originals_in, "Sequence file of single-walker windows");
  synthesize->add_option("--out", out, "Dataset output; provenance goes to <out>.prov")->required();

  auto* train = app.add_subcommand("train", "Train the LSTM counter");
  common.attach(train);
  train->add_option("--dataset", dataset_in, "Dataset from synthesize")->required();
  train->add_option("--out", out, "Model output")->required();
  train->add_flag("--quiet", quiet, "No per-epoch loss on stderr");

  auto* count = app.add_subcommand("count", "Detect and count on one trace");
  common.attach(count);
  count->add_option("--model", model_in, "Trained model")->required();
  count->add_option("--trace", trace_in, "RSS trace covering exactly one window")->required();

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Count on fresh simulated windows with known counts");
  common.attach(evaluate_cmd);
  evaluate_cmd->add_option("--model", model_in, "Trained model")->required();
  evaluate_cmd->add_option("--windows-per-class", windows_per_class, "Simulated windows per count");
  evaluate_cmd->add_option("--out", out, "CSV output (real,estimated,error)")->required();
  evaluate_cmd->add_option("--table-out", table_out, "Human-readable report output");

  auto* sweep = app.add_subcommand("sweep", "Absolute counting error across tau or window length");
  common.attach(sweep);
  sweep->add_option("--param", parameter, "tau or window_minutes")->check(CLI::IsMember({"tau", "window_minutes"}));
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--model", model_in, "Trained model (tau sweep)");
  sweep->add_option("--crossings", crossings_in, "Training crossing log (window sweep)");
  sweep->add_option("--trace", trace_in, "Training RSS trace (window sweep)");
  sweep->add_option("--windows-per-class", windows_per_class, "Simulated windows per count");
  sweep->add_option("--out", out, "CSV output (value,epsilon)")->required();
  sweep->add_flag("--quiet", quiet, "No progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const SystemConfig cfg = common.config();

    if (*simulate) {
      auto sc = common.scenario();
      if (agents) sc.agents = *agents;
      if (duration) sc.duration = *duration;
      sc.validate();
      const auto trajectories = sim::simulate_walk(sc);
      std::vector<double> times;
      for (const auto& tr : trajectories) {
        const auto c = sim::crossings(tr, sc.los);
        times.insert(times.end(), c.begin(), c.end());
      }
      std::sort(times.begin(), times.end());
      io::write_file_atomic(out, io::format_rss_trace(sim::synthesize_rss(trajectories, sc)));
      if (!crossings_out.empty()) io::write_file_atomic(crossings_out, io::format_crossing_log({sc.duration, times}));
      if (!truth_out.empty()) {
        const auto w = sim::scenario_slots(sc, cfg.slot_duration);
        io::write_file_atomic(truth_out,
                              io::format_sequence_line(sc.agents, timestamps_to_sequence(times, w, cfg.slot_duration)));
      }
      note(std::to_string(times.size()) + " crossings by " + std::to_string(sc.agents) + " walker(s)");
    } else if (*detect) {
      const auto tr = io::parse_rss_trace(io::read_file(trace_in));
      warn_remainder(tr.window_length(), cfg.window_minutes);
      std::string text;
      for (const auto& seq : originals_from_trace(tr, cfg)) text += io::format_sequence_line(label, seq);
      io::write_file_atomic(out, text);
    } else if (*synthesize) {
      const auto originals = read_originals(crossings_in, trace_in, originals_in, cfg);
      const auto ds = build_dataset(originals, cfg.plan());
      io::write_file_atomic(out, io::format_dataset(ds));
      io::write_file_atomic(out + ".prov", io::format_provenance(ds));
      note(std::to_string(originals.size()) + " originals -> " + std::to_string(ds.samples.size()) + " samples, " +
           std::to_string(ds.class_size(0)) + " per class");
    } else if (*train) {
      const auto ds = io::dataset_from_sequences(io::parse_sequence_file(io::read_file(dataset_in), cfg.slot_duration));
      if (ds.max_class != cfg.max_count) {
        fail(ErrorKind::Mismatch, "dataset has classes 0.." + std::to_string(ds.max_class) + " but max_count is " +
                                      std::to_string(cfg.max_count));
      }
      if (ds.w != cfg.w()) {
        fail(ErrorKind::Mismatch, "dataset sequences have " + std::to_string(ds.w) + " slots but the window holds " +
                                      std::to_string(cfg.w()));
      }
      const auto res = nn::train(ds, cfg.architecture(), cfg.hyper(), progress(quiet));
      nn::save_model(res.model, out);
      note("training accuracy " + io::format_double(nn::training_accuracy(res.model, ds)));
    } else if (*count) {
      const auto model = nn::load_model(model_in);
      const auto tr = io::parse_rss_trace(io::read_file(trace_in));
      std::cout << count_people(model, tr, cfg.tau, cfg.detector_mode) << "\n";
    } else if (*evaluate_cmd) {
      const auto model = nn::load_model(model_in);
      SystemConfig c = cfg;
      c.max_count = model.classes() - 1;
      c.window_minutes = static_cast<double>(model.w) * model.slot_duration / 60.0;
      c.slot_duration = model.slot_duration;
      const auto windows = make_eval_windows(common.scenario(), c, windows_per_class, c.rng_seed);
      const auto report = evaluate(model, windows, c.tau, c.detector_mode);
      io::write_file_atomic(out, report.to_csv());
      if (!table_out.empty()) io::write_file_atomic(table_out, report.to_table());
      std::cout << report.to_table();
    } else if (*sweep) {
      const auto xs = parse_values(values);
      std::vector<SweepRow> rows;
      if (parameter == "tau") {
        if (model_in.empty()) fail(ErrorKind::InvalidArgument, "tau sweep needs --model");
        const auto model = nn::load_model(model_in);
        SystemConfig c = cfg;
        c.max_count = model.classes() - 1;
        c.window_minutes = static_cast<double>(model.w) * model.slot_duration / 60.0;
        c.slot_duration = model.slot_duration;
        const auto windows = make_eval_windows(common.scenario(), c, windows_per_class, c.rng_seed);
        rows = sweep_tau(model, windows, xs, c.detector_mode);
      } else {
        check_sweep_values("window_minutes", xs, 1.0, 5.0);
        for (double m : xs) {
          SystemConfig c = cfg;
          c.window_minutes = m;
          c.validate();
          const auto originals = read_originals(crossings_in, trace_in, "", c);
          const auto trained = train_from_originals(originals, c);
          const auto windows = make_eval_windows(common.scenario(), c, windows_per_class, c.rng_seed);
          rows.push_back({m, evaluate(trained.result.model, windows, c.tau, c.detector_mode).epsilon});
          if (!quiet) note("window " + io::format_double(m) + " min: epsilon " + std::to_string(rows.back().epsilon));
        }
      }
      io::write_file_atomic(out, format_sweep_csv(rows));
      std::cout << format_sweep_csv(rows);
    }
  } catch (const Error& e) {
    std::cerr << "crosscount: error[" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "crosscount: error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
