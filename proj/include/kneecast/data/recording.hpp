#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kneecast::data {

enum class Condition { normal, abnormal, exo };

std::string_view to_string(Condition c);
Condition parse_condition(std::string_view name);

/// Canonical EMG channel order: biceps femoris, rectus femoris,
/// semitendinosus, vastus medialis.
inline constexpr std::array<std::string_view, 4> kEmgLabels{"BF", "RF", "ST", "VM"};

struct Recording {
  double sample_rate_hz = 1000.0;
  std::vector<double> time_ms;
  std::array<std::vector<double>, 4> emg;  // mV, canonical order
  std::vector<double> knee_angle_deg;
  std::optional<std::vector<double>> hip_angle_deg;
  std::optional<std::vector<double>> force_thigh_n;
  std::optional<std::vector<double>> force_shank_n;
  std::string subject_id = "unknown";
  Condition condition = Condition::normal;
  std::string trial_id = "1";

  std::size_t size() const { return knee_angle_deg.size(); }
  bool has_forces() const { return force_thigh_n.has_value() && force_shank_n.has_value(); }
  /// Throws DataError unless all present channels share one length >= 1 and
  /// every sample is finite.
  void validate() const;
  /// Copy restricted to samples [0, n).
  Recording truncated(std::size_t n) const;
};

/// Column names of the CSV layout. Defaults are the documented header.
struct CsvSchema {
  std::string time = "time_ms";
  std::array<std::string, 4> emg{"emg_bf", "emg_rf", "emg_st", "emg_vm"};
  std::string knee = "knee_angle_deg";
  std::string hip = "hip_angle_deg";
  std::string force_thigh = "force_thigh_n";
  std::string force_shank = "force_shank_n";
};

/// Sidecar metadata path for a CSV file: same stem, ".json" extension.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Parses a CSV recording plus its optional JSON sidecar
/// {subject_id, condition, trial_id, sample_rate_hz}. The sample rate is
/// inferred as round(1000 / median(delta time_ms)).
Recording load_recording(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Same, from in-memory CSV text (no sidecar).
Recording parse_recording_csv(std::string_view text, const CsvSchema& schema = {});

/// Writes CSV and sidecar atomically. Output is a pure function of `rec`.
void save_recording(const Recording& rec, const std::filesystem::path& path);
std::string format_recording_csv(const Recording& rec);

}  // namespace kneecast::data
