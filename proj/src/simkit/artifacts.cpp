// SPDX-License-Identifier: Apache-2.0
#include "uavplace/simkit/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef UAVPLACE_VERSION
#define UAVPLACE_VERSION "0.0.0"
#endif

namespace uavplace::simkit {

namespace fs = std::filesystem;

namespace {

std::string escape_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  return cells;
}

// Value of a "<prefix><value>" line inside text, or empty.
std::string find_line_value(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  return {};
}

std::string provenance_lines(const Stamp& stamp, const std::string& lead) {
  std::string out;
  out += lead + "tool: uavplace " + tool_version() + "\n";
  out += lead + "kind: " + stamp.kind + "\n";
  out += lead + "seed: " + std::to_string(stamp.seed) + "\n";
  out += lead + "complete: " + (stamp.complete ? "true" : "false") + "\n";
  out += lead + "config_hash: " + stamp.hash() + "\n";
  out += lead + "config: " + canonical_json(stamp.config) + "\n";
  return out;
}

}  // namespace

std::string tool_version() { return UAVPLACE_VERSION; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("CsvTable: row has " + std::to_string(row.size()) +
                                " cells, expected " + std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::out_of_range("no column '" + name + "'");
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  const std::string& cell = rows.at(row).at(column(name));
  if (cell == "inf") return INFINITY;
  if (cell == "-inf") return -INFINITY;
  if (cell == "nan") return NAN;
  return std::stod(cell);
}

std::string render_csv(const CsvTable& table, const Stamp& stamp) {
  std::string out = provenance_lines(stamp, "# ");
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += escape_cell(cells[i]);
    }
    out += '\n';
  };
  emit(table.columns);
  for (const auto& row : table.rows) emit(row);
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      t.columns = split_csv_line(line);
      header = false;
    } else {
      t.add(split_csv_line(line));
    }
  }
  return t;
}

void write_atomic(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ArtifactStore::ArtifactStore(fs::path dir, Stamp stamp)
    : dir_(std::move(dir)), stamp_(std::move(stamp)) {
  fs::create_directories(dir_);
}

fs::path ArtifactStore::put(const std::string& name, const std::string& bytes) {
  const fs::path path = dir_ / name;
  write_atomic(path, bytes);
  for (auto& f : files_)
    if (f["name"] == name) {
      f["bytes"] = bytes.size();
      f["fnv1a"] = fnv1a_hex(bytes);
      return path;
    }
  files_.push_back({{"name", name}, {"bytes", bytes.size()}, {"fnv1a", fnv1a_hex(bytes)}});
  return path;
}

fs::path ArtifactStore::write_csv(const std::string& name, const CsvTable& table) {
  return put(name, render_csv(table, stamp_));
}

fs::path ArtifactStore::write_json(const std::string& name, Json body) {
  body["config"] = stamp_.config;
  body["config_hash"] = stamp_.hash();
  body["seed"] = stamp_.seed;
  body["tool_version"] = tool_version();
  if (!body.contains("complete")) body["complete"] = stamp_.complete;
  return put(name, body.dump(2) + "\n");
}

fs::path ArtifactStore::write_svg(const std::string& name, const std::string& svg) {
  const auto body_start = svg.find("<svg");
  if (body_start == std::string::npos) throw std::invalid_argument("write_svg: not an SVG document");
  std::string out = svg.substr(0, body_start);
  out += "<!--\n" + provenance_lines(stamp_, "") + "-->\n";
  out += svg.substr(body_start);
  return put(name, out);
}

fs::path ArtifactStore::write_manifest() {
  Json m;
  m["kind"] = stamp_.kind;
  m["files"] = files_;
  return write_json("manifest.json", m);
}

VerifyReport verify_artifacts(const fs::path& dir) {
  VerifyReport rep;
  auto fail = [&rep](const std::string& what) {
    rep.ok = false;
    rep.problems.push_back(what);
  };
  Json manifest;
  try {
    manifest = Json::parse(read_file(dir / "manifest.json"));
  } catch (const std::exception& e) {
    fail(std::string("manifest.json: ") + e.what());
    return rep;
  }
  auto check_hash = [&](const std::string& name, const Json& config, const std::string& stated) {
    if (config_hash(config) != stated)
      fail(name + ": config hash " + stated + " does not match its config (" +
           config_hash(config) + ")");
    if (stated != manifest.value("config_hash", std::string()))
      fail(name + ": config hash differs from the manifest");
  };
  check_hash("manifest.json", manifest.value("config", Json()),
             manifest.value("config_hash", std::string()));
  if (!manifest.value("complete", true)) fail("manifest.json: run flagged incomplete");

  for (const auto& entry : manifest.value("files", Json::array())) {
    const std::string name = entry.value("name", std::string());
    ++rep.files_checked;
    std::string bytes;
    try {
      bytes = read_file(dir / name);
    } catch (const std::exception& e) {
      fail(name + ": " + e.what());
      continue;
    }
    if (fnv1a_hex(bytes) != entry.value("fnv1a", std::string()))
      fail(name + ": digest mismatch");
    try {
      if (name.ends_with(".json")) {
        const Json j = Json::parse(bytes);
        check_hash(name, j.value("config", Json()), j.value("config_hash", std::string()));
      } else {
        const std::string lead = name.ends_with(".csv") ? "# " : "";
        const std::string stated = find_line_value(bytes, lead + "config_hash: ");
        const std::string config = find_line_value(bytes, lead + "config: ");
        if (stated.empty() || config.empty())
          fail(name + ": no embedded provenance");
        else
          check_hash(name, Json::parse(config), stated);
      }
    } catch (const std::exception& e) {
      fail(name + ": " + e.what());
    }
  }
  return rep;
}

}  // namespace uavplace::simkit
