// neckpose command-line front end. Every subcommand maps onto library calls;
// failures print the stage name and exit with that stage's code.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "neckpose/neckpose.hpp"

namespace np = neckpose;

namespace {

np::Schedule schedule_or_default(const std::string& path) {
  return path.empty() ? np::default_schedule() : np::read_schedule_file(path);
}

template <typename F>
void with_output(const std::string& path, F&& body) {
  auto out = np::detail::open_output(path);
  body(out);
  if (!out) throw np::IoError("failed writing '" + path + "'");
}

void write_reports(const std::string& dir, const np::EvaluationReport& report) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path d(dir);
  with_output((d / "report.txt").string(), [&](std::ostream& o) { np::write_report_text(o, report); });
  with_output((d / "report.json").string(), [&](std::ostream& o) { o << np::report_to_json(report).dump(2) << '\n'; });
  with_output((d / "confusion.csv").string(), [&](std::ostream& o) { np::write_confusion_csv(o, report); });
  with_output((d / "metrics.csv").string(), [&](std::ostream& o) { np::write_metrics_csv(o, report); });
  with_output((d / "metric_bars.csv").string(), [&](std::ostream& o) { np::write_metric_bars(o, report); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neck posture classification from accelerometer, kinematic and tendon-force features"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a labelled synthetic IMU session");
  std::string synth_schedule, synth_csv, synth_truth;
  std::uint64_t synth_seed = 42;
  double synth_scale = 1.0, synth_rate = 100.0;
  synth->add_option("--schedule", synth_schedule, "LABEL,seconds schedule (default: nine postures x 120 s)");
  synth->add_option("--seed", synth_seed, "noise seed");
  synth->add_option("--out-csv", synth_csv, "IMU CSV to write")->required();
  synth->add_option("--out-truth", synth_truth, "ground-truth pose MOT to write");
  synth->add_option("--noise-scale", synth_scale, "multiplier on the default noise (2 = back placement)");
  synth->add_option("--rate", synth_rate, "sample rate, Hz");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse an IMU CSV, fill gaps and replace outliers");
  std::string ingest_csv, ingest_out;
  np::CleaningSettings cleaning;
  double ingest_rate = 100.0;
  ingest->add_option("--csv", ingest_csv, "IMU CSV")->required();
  ingest->add_option("--out", ingest_out, "cleaned IMU CSV")->required();
  ingest->add_option("--window", cleaning.hampel_window, "Hampel window (odd)");
  ingest->add_option("--k", cleaning.hampel_k, "Hampel threshold in robust sigmas");
  ingest->add_option("--rate", ingest_rate, "nominal sample rate, Hz");

  // preprocess
  auto* prep = app.add_subcommand("preprocess", "IMU CSV to labelled 1 Hz accelerometer features");
  std::string prep_csv, prep_schedule, prep_out;
  prep->add_option("--csv", prep_csv, "IMU CSV")->required();
  prep->add_option("--schedule", prep_schedule, "posture schedule (default: nine postures x 120 s)");
  prep->add_option("--out", prep_out, "feature CSV")->required();
  prep->add_option("--window", cleaning.hampel_window, "Hampel window (odd)");
  prep->add_option("--k", cleaning.hampel_k, "Hampel threshold in robust sigmas");

  // to-trc
  auto* to_trc = app.add_subcommand("to-trc", "Accelerometer features to model marker trajectories");
  std::string trc_data, trc_model, trc_out, trc_units = "m";
  double coupling = np::kBandCoupling;
  to_trc->add_option("--data", trc_data, "feature CSV from preprocess")->required();
  to_trc->add_option("--model", trc_model, "model config (default model if omitted)");
  to_trc->add_option("--out", trc_out, "TRC to write")->required();
  to_trc->add_option("--coupling", coupling, "band coupling roll/yaw used to infer yaw (0 disables)");
  to_trc->add_option("--units", trc_units, "m or mm")->check(CLI::IsMember({"m", "mm"}));

  // ik
  auto* ik = app.add_subcommand("ik", "Marker trajectories to neck joint angles");
  std::string ik_model, ik_trc, ik_out;
  bool cold_start = false;
  ik->add_option("--model", ik_model, "model config (default model if omitted)");
  ik->add_option("--trc", ik_trc, "TRC input")->required();
  ik->add_option("--out", ik_out, "MOT output; diagnostics go to <out>.report.txt")->required();
  ik->add_flag("--cold-start", cold_start, "start every frame at neutral");

  // kinetics
  auto* kin = app.add_subcommand("kinetics", "Joint angles to hyoid tendon forces");
  std::string kin_model, kin_mot, kin_out;
  kin->add_option("--model", kin_model, "model config (default model if omitted)");
  kin->add_option("--mot", kin_mot, "MOT input")->required();
  kin->add_option("--out", kin_out, "STO output")->required();

  // features
  auto* feat = app.add_subcommand("features", "Assemble model-mediated features on the labelled 1 Hz rows");
  std::string feat_data, feat_mot, feat_sto, feat_out, feat_source = "tendon-force", feat_model;
  feat->add_option("--data", feat_data, "labelled feature CSV from preprocess")->required();
  feat->add_option("--mot", feat_mot, "IK MOT aligned with the rows")->required();
  feat->add_option("--sto", feat_sto, "tendon-force STO aligned with the rows")->required();
  feat->add_option("--model", feat_model, "model config (default model if omitted)");
  feat->add_option("--source", feat_source, "accel, position, tendon-force or combined");
  feat->add_option("--out", feat_out, "feature CSV")->required();

  // train
  auto* train = app.add_subcommand("train", "Fit a random forest on a labelled feature CSV");
  std::string train_data, train_out;
  double ratio = 0.75;
  std::uint64_t split_seed = 42;
  np::ForestParams forest_params;
  train->add_option("--data", train_data, "labelled feature CSV")->required();
  train->add_option("--out", train_out, "classifier file")->required();
  train->add_option("--ratio", ratio, "training fraction per class");
  train->add_option("--split-seed", split_seed, "stratified split seed");
  train->add_option("--trees", forest_params.n_trees, "number of trees");
  train->add_option("--max-depth", forest_params.max_depth, "0 = unlimited");
  train->add_option("--min-split", forest_params.min_samples_split, "minimum rows to split a node");
  train->add_option("--features-per-split", forest_params.features_per_split, "0 = floor(sqrt(d))");
  train->add_option("--seed", forest_params.seed, "forest seed");

  // predict
  auto* predict = app.add_subcommand("predict", "Classify the rows of a feature CSV");
  std::string pred_forest, pred_data, pred_out;
  predict->add_option("--forest", pred_forest, "classifier file")->required();
  predict->add_option("--data", pred_data, "feature CSV (label column optional)")->required();
  predict->add_option("--out", pred_out, "predictions CSV (stdout if omitted)");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score a classifier on the held-out rows of its split");
  std::string eval_forest, eval_data, eval_dir;
  bool eval_all = false;
  eval->add_option("--forest", eval_forest, "classifier file")->required();
  eval->add_option("--data", eval_data, "labelled feature CSV")->required();
  eval->add_option("--out-dir", eval_dir, "write report.txt/json and CSVs here");
  eval->add_flag("--all", eval_all, "score every row instead of the test split");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Run the whole chain from IMU data to an evaluation report");
  std::string pipe_config, pipe_source, pipe_out, pipe_csv, pipe_schedule, pipe_model;
  double pipe_scale = -1.0;
  pipe->add_option("--config", pipe_config, "key = value config file");
  pipe->add_option("--source", pipe_source, "imu, accel, position, tendon-force or combined");
  pipe->add_option("--out-dir", pipe_out, "output directory");
  pipe->add_option("--csv", pipe_csv, "IMU CSV (synthesised when omitted)");
  pipe->add_option("--schedule", pipe_schedule, "posture schedule");
  pipe->add_option("--model", pipe_model, "model config");
  pipe->add_option("--noise-scale", pipe_scale, "synthetic noise multiplier");

  // model dump
  auto* model_cmd = app.add_subcommand("model", "Model inspection");
  model_cmd->require_subcommand(1);
  auto* dump = model_cmd->add_subcommand("dump", "Print the neutral marker and muscle table");
  std::string dump_model;
  dump->add_option("--model", dump_model, "model config (default model if omitted)");

  CLI11_PARSE(app, argc, argv);

  using np::Stage;
  try {
    if (*synth) {
      np::run_stage(Stage::Synth, [&] {
        np::NoiseSpec noise;
        noise.seed = synth_seed;
        const auto session =
            np::simulate_session(schedule_or_default(synth_schedule), noise.scaled(synth_scale), synth_rate);
        with_output(synth_csv, [&](std::ostream& o) { np::write_imu_csv(o, session.imu); });
        if (!synth_truth.empty())
          with_output(synth_truth, [&](std::ostream& o) {
            np::write_mot(o, np::mot_from_joint_trajectory(session.truth, true, "synthetic_truth"));
          });
        std::cout << "wrote " << session.imu.samples.size() << " samples (band coupling roll = "
                  << np::kBandCoupling << " * yaw)\n";
      });
    } else if (*ingest) {
      const auto raw = np::run_stage(Stage::Ingest, [&] { return np::read_imu_csv_file(ingest_csv, ingest_rate); });
      np::run_stage(Stage::Ingest, [&] {
        const auto cleaned = np::clean_series(raw, cleaning);
        with_output(ingest_out, [&](std::ostream& o) { np::write_imu_csv(o, cleaned); });
      });
    } else if (*prep) {
      const auto raw = np::run_stage(Stage::Ingest, [&] { return np::read_imu_csv_file(prep_csv); });
      np::run_stage(Stage::Preprocess, [&] {
        const auto table = np::imu_feature_table(np::clean_series(raw, cleaning), schedule_or_default(prep_schedule));
        np::write_feature_csv_file(prep_out, table);
        std::cout << table.rows.size() << " rows\n";
      });
    } else if (*to_trc) {
      np::run_stage(Stage::ToTrc, [&] {
        const auto model = np::load_model(trc_model);
        const auto table = np::read_feature_csv_file(trc_data);
        if (table.names != np::imu_feature_names())
          throw np::ShapeError("to-trc needs the accelerometer feature CSV written by preprocess");
        const auto markers = np::markers_from_imu_rows(model, table, coupling);
        const auto name = std::filesystem::path(trc_out).filename().string();
        with_output(trc_out, [&](std::ostream& o) {
          np::write_trc(o, np::trc_from_markers(markers, {name, 1.0, trc_units}));
        });
      });
    } else if (*ik) {
      np::run_stage(Stage::Ik, [&] {
        const auto model = np::load_model(ik_model);
        const auto markers = np::markers_from_trc(np::read_trc_file(ik_trc));
        const auto result = np::solve_trajectory(model, markers, np::IkSettings{}, cold_start);
        const auto name = std::filesystem::path(ik_out).stem().string();
        with_output(ik_out, [&](std::ostream& o) {
          np::write_mot(o, np::mot_from_joint_trajectory(result.trajectory, true, name));
        });
        with_output(ik_out + ".report.txt", [&](std::ostream& o) { np::write_ik_report(o, result); });
        std::cout << result.frames.size() << " frames, " << result.non_converged() << " not converged\n";
      });
    } else if (*kin) {
      np::run_stage(Stage::Kinetics, [&] {
        const auto model = np::load_model(kin_model);
        const auto traj =
            np::snap_to_range(np::joint_trajectory_from_mot(np::read_mot_file(kin_mot)), model.range_of_motion());
        const auto forces = np::compute_force_series(model, traj);
        with_output(kin_out, [&](std::ostream& o) { np::write_mot(o, np::mot_from_forces(forces)); });
      });
    } else if (*feat) {
      np::run_stage(Stage::Features, [&] {
        const auto source = np::parse_feature_source(feat_source);
        if (source == np::FeatureSource::Imu) throw np::ConfigError("imu features come straight from preprocess");
        const auto model = np::load_model(feat_model);
        const auto labels = np::read_feature_csv_file(feat_data);
        const auto poses = np::joint_trajectory_from_mot(np::read_mot_file(feat_mot));
        const auto forces = np::forces_from_mot(np::read_mot_file(feat_sto), model);
        np::write_feature_csv_file(feat_out, np::model_feature_table(source, labels, poses, forces));
      });
    } else if (*train) {
      np::run_stage(Stage::Train, [&] {
        const auto table = np::read_feature_csv_file(train_data);
        np::write_bundle_file(train_out, np::train_classifier(table, ratio, split_seed, forest_params));
      });
    } else if (*predict) {
      np::run_stage(Stage::Predict, [&] {
        const auto bundle = np::read_bundle_file(pred_forest);
        const auto table = np::read_feature_csv_file(pred_data);
        if (table.names != bundle.feature_names)
          throw np::ShapeError("dataset feature columns differ from the classifier's");
        auto emit = [&](std::ostream& o) {
          o << "t,predicted";
          for (const auto& n : np::posture_names()) o << ",p_" << n;
          o << '\n';
          for (const auto& r : table.rows) {
            const auto x = np::normalize(bundle.stats, r.features);
            const auto p = np::predict_proba(bundle.forest, x);
            o << np::detail::format_shortest(r.t) << ',' << np::to_string(np::posture_at(np::predict(bundle.forest, x)));
            for (double v : p) o << ',' << np::detail::format_fixed(v, 4);
            o << '\n';
          }
        };
        if (pred_out.empty()) emit(std::cout);
        else with_output(pred_out, emit);
      });
    } else if (*eval) {
      const auto report = np::run_stage(Stage::Evaluate, [&] {
        return np::evaluate_classifier(np::read_bundle_file(eval_forest), np::read_feature_csv_file(eval_data),
                                       eval_all);
      });
      np::run_stage(Stage::Report, [&] {
        np::write_report_text(std::cout, report);
        if (!eval_dir.empty()) write_reports(eval_dir, report);
      });
    } else if (*pipe) {
      auto config = np::run_stage(Stage::Config, [&] {
        np::KeyValueConfig kv;
        if (!pipe_config.empty()) kv = np::KeyValueConfig::read_file(pipe_config);
        if (!pipe_source.empty()) kv.set("source", pipe_source);
        if (!pipe_out.empty()) kv.set("out_dir", pipe_out);
        if (!pipe_csv.empty()) kv.set("csv", pipe_csv);
        if (!pipe_schedule.empty()) kv.set("schedule", pipe_schedule);
        if (!pipe_model.empty()) kv.set("model", pipe_model);
        if (pipe_scale >= 0.0) kv.set("noise_scale", np::detail::format_shortest(pipe_scale));
        return np::pipeline_config_from(kv);
      });
      const auto result = np::run_pipeline(config);
      std::cout << "source " << np::to_string(config.source) << ": " << result.dataset_rows << " rows, accuracy "
                << np::detail::format_fixed(result.report.accuracy, 4) << " on " << result.report.total()
                << " test rows\n";
      for (const auto& f : result.files) std::cout << "  " << f << '\n';
    } else if (*dump) {
      np::run_stage(Stage::Config, [&] {
        const auto model = np::load_model(dump_model);
        std::cout << "marker\tsegment\tx\ty\tz\n";
        for (std::size_t i = 0; i < model.markers().size(); ++i) {
          const auto& m = model.markers()[i];
          const auto& p = model.neutral_markers()[i];
          std::cout << m.name << '\t' << np::to_string(m.at.segment) << '\t' << np::detail::format_fixed(p.x(), 6)
                    << '\t' << np::detail::format_fixed(p.y(), 6) << '\t' << np::detail::format_fixed(p.z(), 6)
                    << '\n';
        }
        std::cout << "\nmuscle\torigin\tinsertion\tneutral_length\tslack_length\tstiffness\n";
        for (std::size_t i = 0; i < model.muscles().size(); ++i) {
          const auto& m = model.muscles()[i];
          std::cout << m.name << '\t' << np::to_string(m.origin.segment) << '\t' << np::to_string(m.insertion.segment)
                    << '\t' << np::detail::format_fixed(model.neutral_muscle_lengths()[i], 6) << '\t'
                    << np::detail::format_fixed(m.slack_length, 6) << '\t' << np::detail::format_shortest(m.stiffness)
                    << '\n';
        }
      });
    }
  } catch (const np::StageError& e) {
    std::cerr << "neckpose: stage " << np::stage_name(e.stage()) << " failed: " << e.detail() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "neckpose: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
