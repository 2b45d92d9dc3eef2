#pragma once

// Text file formats shared by the library and the command-line tool.
//
//   crossing log   "# duration_s=<float>" then one timestamp (s) per line
//   sequence file  "<label>,<bitstring>" per line
//   RSS trace      "# window_s=<float>" then "t_seconds,rss_dbm" per line
//   provenance     "index,label,origin,constituents,source,flipped_bit" per sample
//   key=value      flat configuration, '#' starts a comment

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "crosscount/core.hpp"
#include "crosscount/error.hpp"

namespace crosscount::io {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) fail(ErrorKind::InvalidArgument, "cannot format number");
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    fail(ErrorKind::Parse, "malformed number '" + s + "' for " + std::string(what));
  }
  return v;
}

inline long long parse_int(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    fail(ErrorKind::Parse, "malformed integer '" + s + "' for " + std::string(what));
  }
  return v;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Write to a sibling temp file, then rename over the destination.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) fail(ErrorKind::Io, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::Io, "cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

inline std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    pos = nl + 1;
  }
  return out;
}

// "# key=value" header on the first line.
inline double parse_header(const std::vector<std::string>& lines, std::string_view key, std::string_view file_kind) {
  const std::string expect = "# " + std::string(key) + "=";
  if (lines.empty() || lines.front().rfind(expect, 0) != 0) {
    fail(ErrorKind::Parse, std::string(file_kind) + " must start with '" + expect + "<float>'");
  }
  return parse_double(std::string_view(lines.front()).substr(expect.size()), key);
}

// ---------------------------------------------------------------------------
// Crossing log

struct CrossingLog {
  double duration = 0.0;
  std::vector<double> times;

  friend bool operator==(const CrossingLog&, const CrossingLog&) = default;
};

inline CrossingLog parse_crossing_log(std::string_view text) {
  const auto lines = lines_of(text);
  CrossingLog log;
  log.duration = parse_header(lines, "duration_s", "crossing log");
  if (!(log.duration > 0.0)) fail(ErrorKind::Parse, "crossing log duration must be positive");
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto line = trim(lines[k]);
    if (line.empty() || line[0] == '#') continue;
    log.times.push_back(parse_double(line, "crossing time on line " + std::to_string(k + 1)));
  }
  return log;
}

inline std::string format_crossing_log(const CrossingLog& log) {
  std::string out = "# duration_s=" + format_double(log.duration) + "\n";
  for (double t : log.times) out += format_double(t) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Sequence file

struct LabeledSequence {
  int label = 0;
  BlockageSequence sequence;
};

inline std::vector<LabeledSequence> parse_sequence_file(std::string_view text, double slot_duration = 1.0) {
  std::vector<LabeledSequence> out;
  const auto lines = lines_of(text);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto line = trim(lines[k]);
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      fail(ErrorKind::Parse, "sequence file line " + std::to_string(k + 1) + " lacks '<label>,<bits>'");
    }
    const auto label = parse_int(std::string_view(line).substr(0, comma), "label");
    if (label < 0) fail(ErrorKind::Parse, "negative label on line " + std::to_string(k + 1));
    auto seq = BlockageSequence::from_string(trim(std::string_view(line).substr(comma + 1)), slot_duration);
    if (!out.empty() && seq.size() != out.front().sequence.size()) {
      fail(ErrorKind::Parse, "sequence on line " + std::to_string(k + 1) + " has a different length");
    }
    out.push_back({static_cast<int>(label), std::move(seq)});
  }
  return out;
}

inline std::string format_sequence_line(int label, const BlockageSequence& seq) {
  return std::to_string(label) + "," + seq.to_string() + "\n";
}

inline std::string format_dataset(const LabeledDataset& ds) {
  std::string out;
  out.reserve(ds.samples.size() * (ds.w + 4));
  for (const auto& s : ds.samples) out += format_sequence_line(s.label, s.sequence);
  return out;
}

inline std::string format_provenance(const LabeledDataset& ds) {
  std::string out = "index,label,origin,constituents,source,flipped_bit\n";
  for (std::size_t k = 0; k < ds.samples.size(); ++k) {
    const auto& s = ds.samples[k];
    std::string constituents;
    for (auto c : s.constituents) constituents += (constituents.empty() ? "" : ";") + std::to_string(c);
    out += std::to_string(k) + "," + std::to_string(s.label) + "," + std::string(to_string(s.origin)) + "," +
           constituents + "," + (s.source ? std::to_string(*s.source) : "") + "," +
           (s.flipped_bit ? std::to_string(*s.flipped_bit) : "") + "\n";
  }
  return out;
}

// Dataset from a sequence file; every class must have the same size. Provenance is not restored.
inline LabeledDataset dataset_from_sequences(const std::vector<LabeledSequence>& rows) {
  if (rows.empty()) fail(ErrorKind::Parse, "dataset file holds no samples");
  LabeledDataset ds;
  ds.w = rows.front().sequence.size();
  for (const auto& r : rows) {
    ds.max_class = std::max(ds.max_class, r.label);
    ds.samples.push_back(LabeledSample{r.sequence, r.label, Origin::Collected, {}, std::nullopt, std::nullopt});
  }
  ds.validate();
  for (int c = 0; c <= ds.max_class; ++c) {
    if (ds.class_size(c) != ds.class_size(0)) {
      fail(ErrorKind::Parse, "dataset classes differ in size: class 0 has " + std::to_string(ds.class_size(0)) +
                                 ", class " + std::to_string(c) + " has " + std::to_string(ds.class_size(c)));
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------
// RSS trace file

inline RssTrace parse_rss_trace(std::string_view text) {
  const auto lines = lines_of(text);
  const double window = parse_header(lines, "window_s", "RSS trace");
  std::vector<RssReading> readings;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto line = trim(lines[k]);
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      fail(ErrorKind::Parse, "RSS trace line " + std::to_string(k + 1) + " lacks 't_seconds,rss_dbm'");
    }
    readings.push_back({parse_double(std::string_view(line).substr(0, comma), "timestamp"),
                        parse_double(std::string_view(line).substr(comma + 1), "rss")});
  }
  try {
    return RssTrace(std::move(readings), window);
  } catch (const Error& e) {
    fail(ErrorKind::Parse, std::string("invalid RSS trace: ") + e.what());
  }
}

inline std::string format_rss_trace(const RssTrace& trace) {
  std::string out = "# window_s=" + format_double(trace.window_length()) + "\n";
  for (const auto& r : trace.readings()) out += format_double(r.t) + "," + format_double(r.rss) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// key=value

inline std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  const auto lines = lines_of(text);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    auto line = trim(lines[k]);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::Parse, "line " + std::to_string(k + 1) + " is not key=value: '" + line + "'");
    }
    auto key = trim(std::string_view(line).substr(0, eq));
    auto value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) fail(ErrorKind::Parse, "empty key on line " + std::to_string(k + 1));
    if (!out.emplace(key, value).second) fail(ErrorKind::Parse, "duplicate key '" + key + "'");
  }
  return out;
}

}  // namespace crosscount::io
