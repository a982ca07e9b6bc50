#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "neckpose/detail/text.hpp"
#include "neckpose/error.hpp"
#include "neckpose/evaluation.hpp"
#include "neckpose/forest.hpp"
#include "neckpose/ik.hpp"
#include "neckpose/imu.hpp"
#include "neckpose/kinetics.hpp"
#include "neckpose/kv_config.hpp"
#include "neckpose/neck_model.hpp"
#include "neckpose/posture.hpp"
#include "neckpose/preprocess.hpp"
#include "neckpose/sim_io.hpp"
#include "neckpose/synth.hpp"

namespace neckpose {

// ---------------------------------------------------------------------------
// Stage-tagged errors. Each stage has its own process exit code.

enum class Stage { Config, Synth, Ingest, Preprocess, ToTrc, Ik, Kinetics, Features, Train, Predict, Evaluate, Report };

constexpr const char* stage_name(Stage s) noexcept {
  switch (s) {
    case Stage::Config: return "config";
    case Stage::Synth: return "synth";
    case Stage::Ingest: return "ingest";
    case Stage::Preprocess: return "preprocess";
    case Stage::ToTrc: return "to-trc";
    case Stage::Ik: return "ik";
    case Stage::Kinetics: return "kinetics";
    case Stage::Features: return "features";
    case Stage::Train: return "train";
    case Stage::Predict: return "predict";
    case Stage::Evaluate: return "evaluate";
    case Stage::Report: return "report";
  }
  return "unknown";
}

constexpr int stage_exit_code(Stage s) noexcept { return 2 + static_cast<int>(s); }

class StageError : public Error {
public:
  StageError(Stage stage, const std::string& what)
      : Error(std::string(stage_name(stage)) + ": " + what), stage_(stage), detail_(what) {}
  Stage stage() const noexcept { return stage_; }
  int exit_code() const noexcept { return stage_exit_code(stage_); }
  const std::string& detail() const noexcept { return detail_; }

private:
  Stage stage_;
  std::string detail_;
};

/// Runs `body`, re-throwing any library or I/O failure tagged with `stage`.
template <typename F>
auto run_stage(Stage stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

// ---------------------------------------------------------------------------
// Feature tables

enum class FeatureSource { Imu, Accel, Position, TendonForce, Combined };

constexpr const char* to_string(FeatureSource s) noexcept {
  switch (s) {
    case FeatureSource::Imu: return "imu";
    case FeatureSource::Accel: return "accel";
    case FeatureSource::Position: return "position";
    case FeatureSource::TendonForce: return "tendon-force";
    case FeatureSource::Combined: return "combined";
  }
  return "imu";
}

inline FeatureSource parse_feature_source(std::string_view s) {
  for (auto f : {FeatureSource::Imu, FeatureSource::Accel, FeatureSource::Position, FeatureSource::TendonForce,
                 FeatureSource::Combined})
    if (s == to_string(f)) return f;
  throw ConfigError("unknown feature source '" + std::string(s) +
                    "' (expected imu, accel, position, tendon-force or combined)");
}

/// Labelled rows plus the names of their feature columns.
struct FeatureTable {
  std::vector<std::string> names;
  std::vector<LabeledFeatureRow> rows;
  bool labelled = true;  // false: the label column is absent and row labels are meaningless

  std::vector<FeatureRow> features() const {
    std::vector<FeatureRow> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.features);
    return out;
  }
  std::vector<std::size_t> labels() const {
    if (!labelled) throw ShapeError("feature table has no label column");
    std::vector<std::size_t> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(index_of(r.label));
    return out;
  }
  bool operator==(const FeatureTable&) const = default;
};

/// CSV with header `t,<feature names>[,label]`.
inline void write_feature_csv(std::ostream& out, const FeatureTable& table) {
  out << 't';
  for (const auto& n : table.names) out << ',' << n;
  out << (table.labelled ? ",label\n" : "\n");
  for (const auto& r : table.rows) {
    out << detail::format_shortest(r.t);
    for (double v : r.features) out << ',' << detail::format_shortest(v);
    if (table.labelled) out << ',' << to_string(r.label);
    out << '\n';
  }
}

inline FeatureTable read_feature_csv(std::istream& in) {
  FeatureTable table;
  std::string line;
  std::size_t line_no = 0;
  if (!detail::getline_stripped(in, line)) throw FormatError("feature CSV is empty");
  ++line_no;
  const auto header = detail::split(line, ',');
  if (header.empty() || detail::trim(header.front()) != "t")
    throw FormatError("feature CSV header must be t,<features...>[,label]");
  table.labelled = detail::trim(header.back()) == "label";
  const std::size_t width = header.size();
  const std::size_t last_feature = table.labelled ? width - 1 : width;
  for (std::size_t i = 1; i < last_feature; ++i) table.names.emplace_back(detail::trim(header[i]));
  if (table.names.empty()) throw FormatError("feature CSV has no feature columns");
  while (detail::getline_stripped(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() != width) throw ParseError(line_no, "expected " + std::to_string(width) + " cells");
    LabeledFeatureRow row;
    const auto t = detail::to_double(cells[0]);
    if (!t) throw ParseError(line_no, "bad time cell");
    row.t = *t;
    for (std::size_t i = 1; i < last_feature; ++i) {
      const auto v = detail::to_double(cells[i]);
      if (!v || !std::isfinite(*v)) throw ParseError(line_no, "'" + std::string(cells[i]) + "' is not a finite number");
      row.features.push_back(*v);
    }
    if (table.labelled) {
      const auto label = try_parse_posture(detail::trim(cells.back()));
      if (!label) throw ParseError(line_no, "unknown posture label '" + std::string(cells.back()) + "'");
      row.label = *label;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline FeatureTable read_feature_csv_file(const std::string& path) {
  auto in = detail::open_input(path);
  return read_feature_csv(in);
}

inline void write_feature_csv_file(const std::string& path, const FeatureTable& table) {
  auto out = detail::open_output(path);
  write_feature_csv(out, table);
}

// ---------------------------------------------------------------------------
// Stages as library calls

struct CleaningSettings {
  std::size_t hampel_window = 11;
  double hampel_k = 3.0;
};

/// Missing-value repair followed by outlier replacement.
inline ImuSeries clean_series(const ImuSeries& raw, const CleaningSettings& settings = {}) {
  return remove_outliers(interpolate_missing(raw), settings.hampel_window, settings.hampel_k);
}

inline const std::vector<std::string>& imu_feature_names() {
  static const std::vector<std::string> names = {"imu_x", "imu_y", "imu_z"};
  return names;
}

/// Cleaned series to labelled 1 Hz accelerometer rows.
inline FeatureTable imu_feature_table(const ImuSeries& cleaned, const Schedule& schedule) {
  const auto rows = aggregate_to_1hz(cleaned);
  return {imu_feature_names(), segment_by_schedule(rows, schedule)};
}

/// Pose implied by a static band reading: pitch and roll from gravity, yaw
/// from the band-coupling rule (zero when coupling is zero).
inline NeckPose pose_from_tilt(const TiltEstimate& tilt, double coupling, const RangeOfMotion& rom) {
  const double yaw = coupling != 0.0 ? tilt.roll / coupling : 0.0;
  return rom.clamp({tilt.pitch, tilt.roll, yaw});
}

/// Skull-driven marker trajectories from the 1 Hz accelerometer rows.
inline MarkerTrajectorySet markers_from_imu_rows(const NeckModel& model, const FeatureTable& imu, double coupling) {
  const std::size_t cx = 0;
  if (imu.names.size() < 3) throw ShapeError("accelerometer table needs three columns");
  MarkerTrajectorySet out;
  out.names = model.marker_names();
  for (const auto& r : imu.rows) {
    const Eigen::Vector3d a(r.features[cx], r.features[cx + 1], r.features[cx + 2]);
    const NeckPose pose = pose_from_tilt(tilt_from_accel(a), coupling, model.range_of_motion());
    out.push_back(marker_positions(model, pose, r.t));
  }
  return out;
}

/// Assembles model-mediated features for each labelled row. `poses` and
/// `forces` are aligned with `labels.rows`.
inline FeatureTable model_feature_table(FeatureSource source, const FeatureTable& labels, const JointTrajectory& poses,
                                        const MuscleForceSeries& forces) {
  if (poses.size() != labels.rows.size() || forces.size() != labels.rows.size())
    throw ShapeError("kinematic, kinetic and label rows are not aligned");
  const bool with_position = source == FeatureSource::Position || source == FeatureSource::Combined;
  const bool with_accel = source == FeatureSource::Accel || source == FeatureSource::Combined;
  const bool with_force = source == FeatureSource::TendonForce || source == FeatureSource::Combined;
  FeatureTable out;
  out.labelled = labels.labelled;
  if (with_position) out.names.insert(out.names.end(), {"pos_pitch", "pos_roll", "pos_yaw"});
  if (with_accel) out.names.insert(out.names.end(), {"acc_x", "acc_y", "acc_z"});
  if (with_force)
    for (const auto& n : forces.names) out.names.push_back("force_" + n);
  for (std::size_t k = 0; k < labels.rows.size(); ++k) {
    if (std::abs(poses.times[k] - labels.rows[k].t) > 1e-6 || std::abs(forces.times[k] - labels.rows[k].t) > 1e-6)
      throw ShapeError("row " + std::to_string(k) + ": kinematic, kinetic and label times disagree");
    LabeledFeatureRow row{labels.rows[k].t, {}, labels.rows[k].label};
    const NeckPose& p = poses.poses[k];
    if (with_position) row.features.insert(row.features.end(), {p.pitch, p.roll, p.yaw});
    if (with_accel) {
      const Eigen::Vector3d a = accel_reading(p);
      row.features.insert(row.features.end(), {a.x(), a.y(), a.z()});
    }
    if (with_force) row.features.insert(row.features.end(), forces.forces[k].begin(), forces.forces[k].end());
    out.rows.push_back(std::move(row));
  }
  return out;
}

/// Clamps poses that sit within `tolerance` outside the range of motion,
/// which happens when angles come back from fixed-decimal degree text.
/// Anything further out is left for the range check to reject.
inline JointTrajectory snap_to_range(JointTrajectory traj, const RangeOfMotion& rom, double tolerance = 1e-7) {
  const RangeOfMotion widened{rom.pitch + tolerance, rom.roll + tolerance, rom.yaw + tolerance};
  for (auto& p : traj.poses)
    if (widened.contains(p)) p = rom.clamp(p);
  return traj;
}

// ---------------------------------------------------------------------------
// Classifier bundle: normalisation, split settings and the forest together.

struct ClassifierBundle {
  std::vector<std::string> feature_names;
  ChannelStats stats;
  double split_ratio = 0.75;
  std::uint64_t split_seed = 42;
  TrainedForest forest;

  bool operator==(const ClassifierBundle&) const = default;
};

inline void write_bundle(std::ostream& out, const ClassifierBundle& b) {
  out << "neckpose-classifier 1\n";
  out << "features " << b.feature_names.size();
  for (const auto& n : b.feature_names) out << ' ' << n;
  out << "\nmean";
  for (double v : b.stats.mean) out << ' ' << detail::format_shortest(v);
  out << "\nstddev";
  for (double v : b.stats.stddev) out << ' ' << detail::format_shortest(v);
  out << "\nsplit " << detail::format_shortest(b.split_ratio) << ' ' << b.split_seed << '\n';
  write_forest(out, b.forest);
}

inline ClassifierBundle read_bundle(std::istream& in) {
  ClassifierBundle b;
  std::string line;
  auto tokens = [&](std::string_view key) {
    if (!detail::getline_stripped(in, line)) throw FormatError("classifier file ends early");
    auto t = detail::split_ws(line);
    if (t.empty() || t[0] != key) throw FormatError("classifier file: expected '" + std::string(key) + "' line");
    return t;
  };
  auto num = [](std::string_view s) {
    const auto v = detail::to_double(s);
    if (!v) throw FormatError("classifier file: '" + std::string(s) + "' is not a number");
    return *v;
  };
  auto t = tokens("neckpose-classifier");
  if (t.size() != 2 || t[1] != "1") throw FormatError("unsupported classifier file version");
  t = tokens("features");
  const auto d = detail::to_integer<std::size_t>(t.size() > 1 ? t[1] : "");
  if (!d || t.size() != 2 + *d) throw FormatError("classifier file: malformed features line");
  for (std::size_t i = 0; i < *d; ++i) b.feature_names.emplace_back(t[2 + i]);
  t = tokens("mean");
  for (std::size_t i = 1; i < t.size(); ++i) b.stats.mean.push_back(num(t[i]));
  t = tokens("stddev");
  for (std::size_t i = 1; i < t.size(); ++i) b.stats.stddev.push_back(num(t[i]));
  t = tokens("split");
  if (t.size() != 3) throw FormatError("classifier file: malformed split line");
  b.split_ratio = num(t[1]);
  const auto seed = detail::to_integer<std::uint64_t>(t[2]);
  if (!seed) throw FormatError("classifier file: bad split seed");
  b.split_seed = *seed;
  b.forest = read_forest(in);
  if (b.stats.mean.size() != *d || b.stats.stddev.size() != *d || b.forest.n_features != *d)
    throw FormatError("classifier file: feature counts disagree");
  return b;
}

inline void write_bundle_file(const std::string& path, const ClassifierBundle& b) {
  auto out = detail::open_output(path);
  write_bundle(out, b);
}

inline ClassifierBundle read_bundle_file(const std::string& path) {
  auto in = detail::open_input(path);
  return read_bundle(in);
}

inline std::vector<std::string> posture_class_names() {
  const auto names = posture_names();
  return {names.begin(), names.end()};
}

inline std::vector<FeatureRow> normalized_features(const ChannelStats& stats, const FeatureTable& table,
                                                   std::span<const std::size_t> rows) {
  std::vector<FeatureRow> out;
  out.reserve(rows.size());
  for (auto i : rows) out.push_back(normalize(stats, table.rows.at(i).features));
  return out;
}

/// Stratified split, train-only z-score statistics, forest fit.
inline ClassifierBundle train_classifier(const FeatureTable& table, double ratio, std::uint64_t split_seed,
                                         const ForestParams& params) {
  const auto names = posture_class_names();
  const auto labels = table.labels();
  const auto split = stratified_split(labels, kPostureCount, ratio, split_seed, names);
  std::vector<FeatureRow> train_raw;
  std::vector<std::size_t> train_y;
  for (auto i : split.train) {
    train_raw.push_back(table.rows[i].features);
    train_y.push_back(labels[i]);
  }
  ClassifierBundle b;
  b.feature_names = table.names;
  b.stats = fit_stats(std::span<const std::vector<double>>(train_raw), table.names);
  b.split_ratio = ratio;
  b.split_seed = split_seed;
  const auto train_x = normalized_features(b.stats, table, split.train);
  b.forest = fit(train_x, train_y, kPostureCount, params);
  return b;
}

/// Test rows of the bundle's own split, or every row when `all_rows` is set.
inline EvaluationReport evaluate_classifier(const ClassifierBundle& b, const FeatureTable& table, bool all_rows = false) {
  if (table.names != b.feature_names) throw ShapeError("dataset feature columns differ from the classifier's");
  const auto labels = table.labels();
  std::vector<std::size_t> rows;
  if (all_rows) {
    for (std::size_t i = 0; i < table.rows.size(); ++i) rows.push_back(i);
  } else {
    rows = stratified_split(labels, kPostureCount, b.split_ratio, b.split_seed, posture_class_names()).test;
  }
  const auto x = normalized_features(b.stats, table, rows);
  std::vector<std::size_t> y;
  for (auto i : rows) y.push_back(labels[i]);
  return evaluate(b.forest, x, y, posture_class_names());
}

// ---------------------------------------------------------------------------
// End-to-end run

struct PipelineConfig {
  std::string csv_path;       // empty: synthesise a session
  std::string schedule_path;  // empty: nine postures x 120 s
  std::string model_path;     // empty: default model
  std::string out_dir = "pipeline_out";
  FeatureSource source = FeatureSource::Imu;
  double split_ratio = 0.75;
  std::uint64_t split_seed = 42;
  NoiseSpec noise;
  double noise_scale = 1.0;  // 2 approximates the back-of-neck placement
  double rate_hz = 100.0;
  CleaningSettings cleaning;
  double band_coupling = kBandCoupling;
  ForestParams forest;
  bool cold_start_ik = false;
};

inline PipelineConfig pipeline_config_from(const KeyValueConfig& kv) {
  kv.require_known({"csv", "schedule", "model", "out_dir", "source", "split_ratio", "split_seed", "synth_seed",
                    "accel_noise", "jitter", "noise_scale", "rate_hz", "hampel_window", "hampel_k", "band_coupling",
                    "n_trees", "max_depth", "min_samples_split", "features_per_split", "forest_seed", "cold_start_ik"});
  PipelineConfig c;
  c.csv_path = kv.get_string("csv", c.csv_path);
  c.schedule_path = kv.get_string("schedule", c.schedule_path);
  c.model_path = kv.get_string("model", c.model_path);
  c.out_dir = kv.get_string("out_dir", c.out_dir);
  c.source = parse_feature_source(kv.get_string("source", to_string(c.source)));
  c.split_ratio = kv.get_double("split_ratio", c.split_ratio);
  c.split_seed = kv.get_uint("split_seed", c.split_seed);
  c.noise.seed = kv.get_uint("synth_seed", c.noise.seed);
  c.noise.accel_std = kv.get_double("accel_noise", c.noise.accel_std);
  c.noise.jitter_std = kv.get_double("jitter", c.noise.jitter_std);
  c.noise_scale = kv.get_double("noise_scale", c.noise_scale);
  c.rate_hz = kv.get_double("rate_hz", c.rate_hz);
  c.cleaning.hampel_window = kv.get_uint("hampel_window", c.cleaning.hampel_window);
  c.cleaning.hampel_k = kv.get_double("hampel_k", c.cleaning.hampel_k);
  c.band_coupling = kv.get_double("band_coupling", c.band_coupling);
  c.forest.n_trees = kv.get_uint("n_trees", c.forest.n_trees);
  c.forest.max_depth = kv.get_uint("max_depth", c.forest.max_depth);
  c.forest.min_samples_split = kv.get_uint("min_samples_split", c.forest.min_samples_split);
  c.forest.features_per_split = kv.get_uint("features_per_split", c.forest.features_per_split);
  c.forest.seed = kv.get_uint("forest_seed", c.forest.seed);
  const auto cold = kv.get_string("cold_start_ik", "no");
  if (cold != "yes" && cold != "no") throw ConfigError("cold_start_ik must be yes or no");
  c.cold_start_ik = cold == "yes";
  return c;
}

struct PipelineResult {
  EvaluationReport report;
  std::size_t dataset_rows = 0;
  std::size_t ik_non_converged = 0;
  std::vector<std::string> files;  // everything written, in order
};

/// ingest -> preprocess -> [tilt -> markers -> TRC -> IK -> MOT -> tendon
/// forces -> STO] -> features -> split/train -> evaluate -> reports.
/// Every intermediate file is re-read with this library's parsers before the
/// next stage consumes it.
inline PipelineResult run_pipeline(const PipelineConfig& config) {
  namespace fs = std::filesystem;
  PipelineResult result;

  run_stage(Stage::Config, [&] {
    if (!(config.split_ratio > 0.0 && config.split_ratio < 1.0)) throw ConfigError("split_ratio must be in (0, 1)");
    if (!(config.noise_scale >= 0.0)) throw ConfigError("noise_scale must be >= 0");
    fs::create_directories(config.out_dir);
  });
  const fs::path dir(config.out_dir);
  auto path_of = [&](const char* name) { return (dir / name).string(); };
  auto write_file = [&](const std::string& path, const std::function<void(std::ostream&)>& body) {
    auto out = detail::open_output(path);
    body(out);
    if (!out) throw IoError("failed writing '" + path + "'");
    result.files.push_back(path);
  };

  const NeckModel model = run_stage(Stage::Config, [&] { return load_model(config.model_path); });
  const Schedule schedule = run_stage(Stage::Config, [&] {
    return config.schedule_path.empty() ? default_schedule() : read_schedule_file(config.schedule_path);
  });

  std::string csv_path = config.csv_path;
  if (csv_path.empty()) {
    csv_path = path_of("imu.csv");
    run_stage(Stage::Synth, [&] {
      const auto session = simulate_session(schedule, config.noise.scaled(config.noise_scale), config.rate_hz,
                                            model.range_of_motion());
      write_file(csv_path, [&](std::ostream& out) { write_imu_csv(out, session.imu); });
    });
  }

  const ImuSeries cleaned = run_stage(Stage::Ingest, [&] {
    return clean_series(read_imu_csv_file(csv_path, config.rate_hz), config.cleaning);
  });
  const FeatureTable imu = run_stage(Stage::Preprocess, [&] { return imu_feature_table(cleaned, schedule); });

  FeatureTable dataset;
  if (config.source == FeatureSource::Imu) {
    dataset = imu;
  } else {
    const std::string trc_path = path_of("markers.trc");
    run_stage(Stage::ToTrc, [&] {
      const auto markers = markers_from_imu_rows(model, imu, config.band_coupling);
      write_file(trc_path, [&](std::ostream& out) {
        write_trc(out, trc_from_markers(markers, {"markers.trc", 1.0, "m"}));
      });
    });
    const std::string mot_path = path_of("ik.mot");
    const JointTrajectory poses = run_stage(Stage::Ik, [&] {
      const auto markers = markers_from_trc(read_trc_file(trc_path));
      const auto ik = solve_trajectory(model, markers, IkSettings{}, config.cold_start_ik);
      result.ik_non_converged = ik.non_converged();
      write_file(mot_path, [&](std::ostream& out) {
        write_mot(out, mot_from_joint_trajectory(ik.trajectory, true, "neck_kinematics"));
      });
      write_file(path_of("ik_report.txt"), [&](std::ostream& out) { write_ik_report(out, ik); });
      return joint_trajectory_from_mot(read_mot_file(mot_path));
    });
    const std::string sto_path = path_of("forces.sto");
    const MuscleForceSeries forces = run_stage(Stage::Kinetics, [&] {
      const JointTrajectory clamped = snap_to_range(poses, model.range_of_motion());
      write_file(sto_path, [&](std::ostream& out) { write_mot(out, mot_from_forces(compute_force_series(model, clamped))); });
      return forces_from_mot(read_mot_file(sto_path), model);
    });
    dataset = run_stage(Stage::Features, [&] { return model_feature_table(config.source, imu, poses, forces); });
  }
  result.dataset_rows = dataset.rows.size();
  run_stage(Stage::Features, [&] {
    write_file(path_of("dataset.csv"), [&](std::ostream& out) { write_feature_csv(out, dataset); });
  });

  const ClassifierBundle bundle = run_stage(Stage::Train, [&] {
    auto b = train_classifier(dataset, config.split_ratio, config.split_seed, config.forest);
    write_file(path_of("forest.txt"), [&](std::ostream& out) { write_bundle(out, b); });
    return b;
  });

  result.report = run_stage(Stage::Evaluate, [&] { return evaluate_classifier(bundle, dataset); });

  run_stage(Stage::Report, [&] {
    write_file(path_of("report.txt"), [&](std::ostream& out) {
      out << "feature source: " << to_string(config.source) << '\n'
          << "dataset rows: " << dataset.rows.size() << " x " << dataset.names.size() << " features\n";
      if (config.source != FeatureSource::Imu && config.band_coupling != 0.0)
        out << "note: yaw inferred from band roll with coupling " << detail::format_shortest(config.band_coupling)
            << " (synthetic modelling assumption)\n";
      out << '\n';
      write_report_text(out, result.report);
    });
    write_file(path_of("report.json"), [&](std::ostream& out) {
      auto j = report_to_json(result.report);
      j["feature_source"] = to_string(config.source);
      j["band_coupling"] = config.band_coupling;
      out << j.dump(2) << '\n';
    });
    write_file(path_of("confusion.csv"), [&](std::ostream& out) { write_confusion_csv(out, result.report); });
    write_file(path_of("metrics.csv"), [&](std::ostream& out) { write_metrics_csv(out, result.report); });
    write_file(path_of("metric_bars.csv"), [&](std::ostream& out) { write_metric_bars(out, result.report); });
  });
  return result;
}

}  // namespace neckpose
