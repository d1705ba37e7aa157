#include "kneecast/data/recording.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kneecast/error.hpp"
#include "kneecast/io/atomic_file.hpp"

namespace kneecast::data {

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::normal: return "normal";
    case Condition::abnormal: return "abnormal";
    case Condition::exo: return "exo";
  }
  return "?";
}

Condition parse_condition(std::string_view name) {
  if (name == "normal") return Condition::normal;
  if (name == "abnormal") return Condition::abnormal;
  if (name == "exo") return Condition::exo;
  throw ConfigError("unknown condition '" + std::string(name) + "'", "condition");
}

namespace {

void check_channel(const std::vector<double>& ch, std::size_t n, std::string_view name) {
  if (ch.size() != n) {
    std::ostringstream m;
    m << "channel " << name << " has " << ch.size() << " samples, expected " << n;
    throw DataError(m.str(), "shape");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(ch[i])) {
      std::ostringstream m;
      m << "channel " << name << " sample " << i << " is not finite";
      throw DataError(m.str());
    }
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

double parse_cell(std::string_view cell, std::size_t row, std::string_view column) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    std::ostringstream m;
    m << "row " << row << ": column " << column << " has unparsable value '" << cell << "'";
    throw DataError(m.str());
  }
  if (!std::isfinite(v)) {
    std::ostringstream m;
    m << "row " << row << ": column " << column << " is not finite";
    throw DataError(m.str());
  }
  return v;
}

std::string fmt_number(double v) {
  // shortest text that reads back to the same double
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void Recording::validate() const {
  const std::size_t n = size();
  if (n == 0) throw DataError("recording is empty", "shape");
  if (!(sample_rate_hz > 0.0)) throw DataError("sample rate must be positive");
  if (!time_ms.empty()) check_channel(time_ms, n, "time_ms");
  for (std::size_t c = 0; c < emg.size(); ++c) check_channel(emg[c], n, kEmgLabels[c]);
  check_channel(knee_angle_deg, n, "knee_angle_deg");
  if (hip_angle_deg) check_channel(*hip_angle_deg, n, "hip_angle_deg");
  if (force_thigh_n) check_channel(*force_thigh_n, n, "force_thigh_n");
  if (force_shank_n) check_channel(*force_shank_n, n, "force_shank_n");
}

Recording Recording::truncated(std::size_t n) const {
  Recording r = *this;
  auto cut = [n](std::vector<double>& v) {
    if (v.size() > n) v.resize(n);
  };
  cut(r.time_ms);
  for (auto& ch : r.emg) cut(ch);
  cut(r.knee_angle_deg);
  if (r.hip_angle_deg) cut(*r.hip_angle_deg);
  if (r.force_thigh_n) cut(*r.force_thigh_n);
  if (r.force_shank_n) cut(*r.force_shank_n);
  return r;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

Recording parse_recording_csv(std::string_view text, const CsvSchema& schema) {
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      line = text.substr(pos, end - pos);
      pos = end + 1;
      if (!trim(line).empty()) return true;
    }
    return false;
  };

  std::string_view header_line;
  if (!next_line(header_line)) throw DataError("CSV has no header", "schema");
  if (header_line.size() >= 3 && header_line.substr(0, 3) == "\xEF\xBB\xBF") header_line.remove_prefix(3);
  const auto header = split_fields(header_line);

  auto find_col = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  auto require_col = [&](const std::string& name) {
    auto idx = find_col(name);
    if (!idx) throw DataError("missing required column '" + name + "'", "schema");
    return *idx;
  };

  const std::size_t time_col = require_col(schema.time);
  std::array<std::size_t, 4> emg_cols{};
  for (std::size_t c = 0; c < 4; ++c) emg_cols[c] = require_col(schema.emg[c]);
  const std::size_t knee_col = require_col(schema.knee);
  const auto hip_col = find_col(schema.hip);
  const auto thigh_col = find_col(schema.force_thigh);
  const auto shank_col = find_col(schema.force_shank);
  if (thigh_col.has_value() != shank_col.has_value()) {
    throw DataError("force columns must appear together ('" + schema.force_thigh + "', '" +
                        schema.force_shank + "')",
                    "schema");
  }

  Recording rec;
  if (hip_col) rec.hip_angle_deg.emplace();
  if (thigh_col) {
    rec.force_thigh_n.emplace();
    rec.force_shank_n.emplace();
  }
  std::string_view line;
  std::size_t row = 0;
  while (next_line(line)) {
    ++row;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      std::ostringstream m;
      m << "row " << row << ": expected " << header.size() << " fields, got " << fields.size();
      throw DataError(m.str(), "schema");
    }
    const double t = parse_cell(fields[time_col], row, schema.time);
    if (!rec.time_ms.empty() && !(t > rec.time_ms.back())) {
      std::ostringstream m;
      m << "row " << row << ": time column is not strictly increasing";
      throw DataError(m.str());
    }
    rec.time_ms.push_back(t);
    for (std::size_t c = 0; c < 4; ++c) rec.emg[c].push_back(parse_cell(fields[emg_cols[c]], row, schema.emg[c]));
    rec.knee_angle_deg.push_back(parse_cell(fields[knee_col], row, schema.knee));
    if (hip_col) rec.hip_angle_deg->push_back(parse_cell(fields[*hip_col], row, schema.hip));
    if (thigh_col) {
      rec.force_thigh_n->push_back(parse_cell(fields[*thigh_col], row, schema.force_thigh));
      rec.force_shank_n->push_back(parse_cell(fields[*shank_col], row, schema.force_shank));
    }
  }
  if (rec.time_ms.empty()) throw DataError("CSV has no data rows", "shape");

  if (rec.time_ms.size() >= 2) {
    std::vector<double> dt(rec.time_ms.size() - 1);
    for (std::size_t i = 1; i < rec.time_ms.size(); ++i) dt[i - 1] = rec.time_ms[i] - rec.time_ms[i - 1];
    auto mid = dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2);
    std::nth_element(dt.begin(), mid, dt.end());
    double median = *mid;
    if (dt.size() % 2 == 0) {
      median = (median + *std::max_element(dt.begin(), mid)) / 2.0;
    }
    rec.sample_rate_hz = std::round(1000.0 / median);
  }
  rec.validate();
  return rec;
}

Recording load_recording(const std::filesystem::path& path, const CsvSchema& schema) {
  if (!std::filesystem::exists(path)) throw DataError("file not found: '" + path.string() + "'", "io");
  Recording rec = parse_recording_csv(io::read_file(path), schema);
  rec.subject_id = path.stem().string();
  const auto meta_path = sidecar_path(path);
  if (std::filesystem::exists(meta_path)) {
    nlohmann::json meta;
    try {
      meta = nlohmann::json::parse(io::read_file(meta_path));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("sidecar '" + meta_path.string() + "' is not valid JSON: " + e.what(), "schema");
    }
    try {
      if (meta.contains("subject_id")) rec.subject_id = meta["subject_id"].get<std::string>();
      if (meta.contains("trial_id")) rec.trial_id = meta["trial_id"].get<std::string>();
      if (meta.contains("condition")) rec.condition = parse_condition(meta["condition"].get<std::string>());
      if (meta.contains("sample_rate_hz")) {
        const double declared = meta["sample_rate_hz"].get<double>();
        if (rec.time_ms.size() >= 2 && std::abs(declared - rec.sample_rate_hz) > 0.01 * declared) {
          std::ostringstream m;
          m << "sidecar declares " << declared << " Hz but time column implies " << rec.sample_rate_hz << " Hz";
          throw DataError(m.str(), "schema");
        }
        rec.sample_rate_hz = declared;
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError("sidecar '" + meta_path.string() + "': " + e.what(), "schema");
    }
  }
  return rec;
}

std::string format_recording_csv(const Recording& rec) {
  rec.validate();
  const CsvSchema schema;
  std::string out;
  out.reserve(rec.size() * 80);
  out += schema.time;
  for (const auto& name : schema.emg) out += "," + name;
  out += "," + schema.knee;
  if (rec.hip_angle_deg) out += "," + schema.hip;
  if (rec.has_forces()) out += "," + schema.force_thigh + "," + schema.force_shank;
  out += '\n';
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const double t = rec.time_ms.empty() ? static_cast<double>(i) * 1000.0 / rec.sample_rate_hz : rec.time_ms[i];
    out += fmt_number(t);
    for (const auto& ch : rec.emg) {
      out += ',';
      out += fmt_number(ch[i]);
    }
    out += ',';
    out += fmt_number(rec.knee_angle_deg[i]);
    if (rec.hip_angle_deg) {
      out += ',';
      out += fmt_number((*rec.hip_angle_deg)[i]);
    }
    if (rec.has_forces()) {
      out += ',';
      out += fmt_number((*rec.force_thigh_n)[i]);
      out += ',';
      out += fmt_number((*rec.force_shank_n)[i]);
    }
    out += '\n';
  }
  return out;
}

void save_recording(const Recording& rec, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_recording_csv(rec));
  nlohmann::json meta{{"subject_id", rec.subject_id},
                      {"condition", std::string(to_string(rec.condition))},
                      {"trial_id", rec.trial_id},
                      {"sample_rate_hz", rec.sample_rate_hz}};
  io::write_file_atomic(sidecar_path(path), meta.dump(2) + "\n");
}

}  // namespace kneecast::data
