#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mimu/errors.hpp"
#include "mimu/simulator.hpp"

namespace mimu {

inline constexpr int kDatasetSchemaVersion = 1;

/// 17 significant digits: decimal text that reconstructs binary64 exactly.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace io_detail {

inline double parse_double(std::string_view token, const std::string& file, std::size_t line) {
  double out = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) {
    throw DataError(file + ":" + std::to_string(line) + ": corrupt numeric field '" +
                    std::string(token) + "'");
  }
  return out;
}

inline std::vector<double> parse_row(const std::string& line_text, std::size_t expected,
                                     const std::string& file, std::size_t line) {
  std::vector<double> out;
  out.reserve(expected);
  std::size_t pos = 0;
  while (pos <= line_text.size()) {
    std::size_t comma = line_text.find(',', pos);
    if (comma == std::string::npos) comma = line_text.size();
    out.push_back(parse_double({line_text.data() + pos, comma - pos}, file, line));
    pos = comma + 1;
    if (comma == line_text.size()) break;
  }
  if (out.size() != expected) {
    throw DataError(file + ":" + std::to_string(line) + ": expected " + std::to_string(expected) +
                    " columns, got " + std::to_string(out.size()));
  }
  return out;
}

}  // namespace io_detail

// --- JSON conversions for configuration types -------------------------------

inline nlohmann::json to_json(const Mat3& m) {
  nlohmann::json a = nlohmann::json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  return a;
}

inline Mat3 mat3_from_json(const nlohmann::json& a) {
  if (!a.is_array() || a.size() != 9) throw DataError("expected 9-element matrix array");
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = a.at(static_cast<std::size_t>(r * 3 + c)).get<double>();
  return m;
}

inline nlohmann::json to_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3_from_json(const nlohmann::json& a) {
  if (!a.is_array() || a.size() != 3) throw DataError("expected 3-element vector array");
  return {a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
}

inline nlohmann::json to_json(const ImuIntrinsics& intr) {
  return {{"C_g", to_json(intr.C_g)},
          {"C_a", to_json(intr.C_a)},
          {"gyro_noise_density", intr.gyro_noise_density},
          {"accel_noise_density", intr.accel_noise_density},
          {"gyro_bias_walk", intr.gyro_bias_walk},
          {"accel_bias_walk", intr.accel_bias_walk},
          {"tau_g", intr.tau_g},
          {"tau_a", intr.tau_a},
          {"gamma_g", intr.gamma_g},
          {"gamma_a", intr.gamma_a},
          {"ignore_bias_decay", intr.ignore_bias_decay}};
}

inline ImuIntrinsics intrinsics_from_json(const nlohmann::json& j) {
  ImuIntrinsics intr;
  intr.C_g = mat3_from_json(j.at("C_g"));
  intr.C_a = mat3_from_json(j.at("C_a"));
  intr.gyro_noise_density = j.at("gyro_noise_density").get<double>();
  intr.accel_noise_density = j.at("accel_noise_density").get<double>();
  intr.gyro_bias_walk = j.at("gyro_bias_walk").get<double>();
  intr.accel_bias_walk = j.at("accel_bias_walk").get<double>();
  intr.tau_g = j.value("tau_g", 300.0);
  intr.tau_a = j.value("tau_a", 300.0);
  intr.gamma_g = j.value("gamma_g", 0.0);
  intr.gamma_a = j.value("gamma_a", 0.0);
  intr.ignore_bias_decay = j.value("ignore_bias_decay", true);
  return intr;
}

inline nlohmann::json to_json(const SystematicErrorSpec& sys) {
  auto drift = [](const std::array<SystematicErrorSpec::AxisDrift, 3>& d) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : d) {
      a.push_back({{"amplitude", x.amplitude}, {"period", x.period}, {"phase", x.phase}});
    }
    return a;
  };
  nlohmann::json schedule = nlohmann::json::array();
  for (const auto& [lo, hi] : sys.schedule) schedule.push_back({lo, hi});
  return {{"gyro_scale_offset", to_json(sys.gyro_scale_offset)},
          {"accel_scale_offset", to_json(sys.accel_scale_offset)},
          {"gyro_bias_offset", to_json(sys.gyro_bias_offset)},
          {"accel_bias_offset", to_json(sys.accel_bias_offset)},
          {"gyro_drift", drift(sys.gyro_drift)},
          {"accel_drift", drift(sys.accel_drift)},
          {"schedule", schedule}};
}

inline SystematicErrorSpec systematic_from_json(const nlohmann::json& j) {
  SystematicErrorSpec sys;
  sys.gyro_scale_offset = vec3_from_json(j.at("gyro_scale_offset"));
  sys.accel_scale_offset = vec3_from_json(j.at("accel_scale_offset"));
  sys.gyro_bias_offset = vec3_from_json(j.at("gyro_bias_offset"));
  sys.accel_bias_offset = vec3_from_json(j.at("accel_bias_offset"));
  auto drift = [](const nlohmann::json& a, std::array<SystematicErrorSpec::AxisDrift, 3>& out) {
    for (std::size_t i = 0; i < 3 && i < a.size(); ++i) {
      out[i].amplitude = a.at(i).at("amplitude").get<double>();
      out[i].period = a.at(i).at("period").get<double>();
      out[i].phase = a.at(i).at("phase").get<double>();
    }
  };
  if (j.contains("gyro_drift")) drift(j.at("gyro_drift"), sys.gyro_drift);
  if (j.contains("accel_drift")) drift(j.at("accel_drift"), sys.accel_drift);
  if (j.contains("schedule")) {
    for (const auto& w : j.at("schedule")) {
      sys.schedule.emplace_back(w.at(0).get<double>(), w.at(1).get<double>());
    }
  }
  return sys;
}

inline nlohmann::json to_json(const RigConfig& rig) {
  nlohmann::json imus = nlohmann::json::array();
  for (const auto& imu : rig.imus) {
    imus.push_back({{"R_MI", to_json(imu.extrinsics.R_MI.m)},
                    {"p_IM", to_json(imu.extrinsics.p_IM)},
                    {"intrinsics", to_json(imu.intrinsics)},
                    {"systematic", to_json(imu.systematic)},
                    {"initial_bias_gyro", to_json(imu.initial_bias.b_g)},
                    {"initial_bias_accel", to_json(imu.initial_bias.b_a)}});
  }
  return {{"imus", imus},
          {"imu_rate_hz", rig.imu_rate},
          {"master_rate_hz", rig.master_rate},
          {"master_orientation_noise_rad", rig.master_orientation_noise},
          {"master_position_noise_m", rig.master_position_noise},
          {"gravity", to_json(rig.gravity)}};
}

inline RigConfig rig_from_json(const nlohmann::json& j) {
  RigConfig rig;
  for (const auto& e : j.at("imus")) {
    ImuRigEntry imu;
    imu.extrinsics.R_MI = Rotation(mat3_from_json(e.at("R_MI")));
    imu.extrinsics.p_IM = vec3_from_json(e.at("p_IM"));
    imu.intrinsics = intrinsics_from_json(e.at("intrinsics"));
    imu.systematic = systematic_from_json(e.at("systematic"));
    imu.initial_bias.b_g = vec3_from_json(e.at("initial_bias_gyro"));
    imu.initial_bias.b_a = vec3_from_json(e.at("initial_bias_accel"));
    rig.imus.push_back(std::move(imu));
  }
  rig.imu_rate = j.at("imu_rate_hz").get<double>();
  rig.master_rate = j.at("master_rate_hz").get<double>();
  rig.master_orientation_noise = j.at("master_orientation_noise_rad").get<double>();
  rig.master_position_noise = j.at("master_position_noise_m").get<double>();
  rig.gravity = vec3_from_json(j.at("gravity"));
  return rig;
}

inline nlohmann::json to_json(const TrajectorySpec& spec) {
  return {{"duration_s", spec.duration},
          {"control_cadence_s", spec.control_cadence},
          {"orientation_amplitude_rad", spec.orientation_amplitude},
          {"translation_amplitude_m", spec.translation_amplitude},
          {"seed", spec.seed}};
}

inline TrajectorySpec trajectory_spec_from_json(const nlohmann::json& j) {
  TrajectorySpec spec;
  spec.duration = j.at("duration_s").get<double>();
  spec.control_cadence = j.at("control_cadence_s").get<double>();
  spec.orientation_amplitude = j.at("orientation_amplitude_rad").get<double>();
  spec.translation_amplitude = j.at("translation_amplitude_m").get<double>();
  spec.seed = j.value("seed", std::uint64_t{0});
  return spec;
}

// --- Dataset directory format ------------------------------------------------

struct ManifestFile {
  std::string path;  // relative to the dataset directory
  std::string kind;  // "imu" | "master" | "ground_truth"
  int imu_index = -1;
  std::size_t rows = 0;
};

struct DatasetManifest {
  int schema_version = kDatasetSchemaVersion;
  std::uint64_t seed = 0;
  double duration = 0.0;
  RigConfig rig;
  std::vector<ManifestFile> files;
  std::string created;
};

/// Write CSVs first, manifest.json last (commit marker). IMU files carry
/// t,wx,wy,wz,ax,ay,az; the master file t + row-major rotation + position;
/// ground truth adds velocity columns.
inline DatasetManifest write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  if (dataset.imu_streams.empty()) {
    throw DataError("write_dataset: dataset has no IMU streams");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("write_dataset: cannot create directory " + dir.string());

  DatasetManifest manifest;
  manifest.seed = dataset.seed;
  manifest.duration = dataset.duration;
  manifest.rig = dataset.rig;
  {
    char stamp[32];
    const std::time_t now = std::time(nullptr);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    manifest.created = stamp;
  }

  auto open_out = [&](const std::string& name) {
    std::ofstream out(dir / name, std::ios::trunc);
    if (!out) throw DataError("write_dataset: cannot open " + (dir / name).string());
    return out;
  };

  for (std::size_t i = 0; i < dataset.imu_streams.size(); ++i) {
    const std::string name = "imu" + std::to_string(i) + ".csv";
    std::ofstream out = open_out(name);
    out << "t,wx,wy,wz,ax,ay,az\n";
    for (const auto& s : dataset.imu_streams[i]) {
      out << format_double(s.t);
      for (int c = 0; c < 3; ++c) out << ',' << format_double(s.omega[c]);
      for (int c = 0; c < 3; ++c) out << ',' << format_double(s.accel[c]);
      out << '\n';
    }
    manifest.files.push_back({name, "imu", static_cast<int>(i), dataset.imu_streams[i].size()});
  }

  {
    std::ofstream out = open_out("master.csv");
    out << "t,r00,r01,r02,r10,r11,r12,r20,r21,r22,px,py,pz\n";
    for (const auto& obs : dataset.master) {
      out << format_double(obs.t);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out << ',' << format_double(obs.R.m(r, c));
      for (int c = 0; c < 3; ++c) out << ',' << format_double(obs.p[c]);
      out << '\n';
    }
    manifest.files.push_back({"master.csv", "master", -1, dataset.master.size()});
  }

  {
    std::ofstream out = open_out("ground_truth.csv");
    out << "t,r00,r01,r02,r10,r11,r12,r20,r21,r22,px,py,pz,vx,vy,vz\n";
    for (const auto& g : dataset.ground_truth) {
      out << format_double(g.t);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out << ',' << format_double(g.R.m(r, c));
      for (int c = 0; c < 3; ++c) out << ',' << format_double(g.p[c]);
      for (int c = 0; c < 3; ++c) out << ',' << format_double(g.v[c]);
      out << '\n';
    }
    manifest.files.push_back({"ground_truth.csv", "ground_truth", -1, dataset.ground_truth.size()});
  }

  nlohmann::json j;
  j["schema_version"] = manifest.schema_version;
  j["seed"] = manifest.seed;
  j["duration_s"] = manifest.duration;
  j["rig"] = to_json(manifest.rig);
  j["created"] = manifest.created;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : manifest.files) {
    files.push_back(
        {{"path", f.path}, {"kind", f.kind}, {"imu_index", f.imu_index}, {"rows", f.rows}});
  }
  j["files"] = files;
  std::ofstream out = open_out("manifest.json");
  out << j.dump(2) << '\n';
  return manifest;
}

/// Read a dataset directory back. Validates the schema version, per-file
/// row counts against the manifest, and strictly increasing timestamps.
inline Dataset read_dataset(const std::filesystem::path& dir) {
  const std::filesystem::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw DataError("read_dataset: missing manifest " + manifest_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("read_dataset: malformed manifest: " + std::string(e.what()));
  }

  const int version = j.value("schema_version", -1);
  if (version != kDatasetSchemaVersion) {
    throw DataError("read_dataset: unsupported schema version " + std::to_string(version));
  }

  Dataset out;
  try {
    out.seed = j.at("seed").get<std::uint64_t>();
    out.duration = j.at("duration_s").get<double>();
    out.rig = rig_from_json(j.at("rig"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("read_dataset: malformed manifest: " + std::string(e.what()));
  }
  out.imu_streams.resize(out.rig.imus.size());

  auto read_rows = [&](const std::string& rel, std::size_t expected_rows, std::size_t cols,
                       auto&& consume) {
    const std::filesystem::path path = dir / rel;
    std::ifstream file(path);
    if (!file) throw DataError("read_dataset: missing file " + path.string());
    std::string line;
    std::size_t line_no = 0, rows = 0;
    double prev_t = -std::numeric_limits<double>::infinity();
    while (std::getline(file, line)) {
      ++line_no;
      if (line_no == 1) continue;  // header
      if (line.empty()) continue;
      const auto row = io_detail::parse_row(line, cols, path.string(), line_no);
      if (!(row[0] > prev_t)) {
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": nonmonotonic timestamp");
      }
      prev_t = row[0];
      consume(row);
      ++rows;
    }
    if (rows != expected_rows) {
      throw DataError(path.string() + ": row count " + std::to_string(rows) +
                      " does not match manifest count " + std::to_string(expected_rows));
    }
  };

  for (const auto& f : j.at("files")) {
    const std::string kind = f.at("kind").get<std::string>();
    const std::string path = f.at("path").get<std::string>();
    const auto rows = f.at("rows").get<std::size_t>();
    if (kind == "imu") {
      const int idx = f.at("imu_index").get<int>();
      if (idx < 0 || static_cast<std::size_t>(idx) >= out.imu_streams.size()) {
        throw DataError("read_dataset: IMU index out of range in manifest");
      }
      auto& stream = out.imu_streams[static_cast<std::size_t>(idx)];
      stream.reserve(rows);
      read_rows(path, rows, 7, [&](const std::vector<double>& row) {
        ImuSample s;
        s.t = row[0];
        s.omega = Vec3(row[1], row[2], row[3]);
        s.accel = Vec3(row[4], row[5], row[6]);
        s.imu_index = idx;
        stream.push_back(s);
      });
    } else if (kind == "master") {
      out.master.reserve(rows);
      read_rows(path, rows, 13, [&](const std::vector<double>& row) {
        MasterObservation obs;
        obs.t = row[0];
        Mat3 m;
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) m(r, c) = row[static_cast<std::size_t>(1 + r * 3 + c)];
        obs.R = Rotation(m);
        obs.p = Vec3(row[10], row[11], row[12]);
        out.master.push_back(obs);
      });
    } else if (kind == "ground_truth") {
      out.ground_truth.reserve(rows);
      read_rows(path, rows, 16, [&](const std::vector<double>& row) {
        GroundTruthSample g;
        g.t = row[0];
        Mat3 m;
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) m(r, c) = row[static_cast<std::size_t>(1 + r * 3 + c)];
        g.R = Rotation(m);
        g.p = Vec3(row[10], row[11], row[12]);
        g.v = Vec3(row[13], row[14], row[15]);
        out.ground_truth.push_back(g);
      });
    } else {
      throw DataError("read_dataset: unknown file kind '" + kind + "'");
    }
  }
  return out;
}

}  // namespace mimu
