#include "loopsoup/io.hpp"

#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "loopsoup/error.hpp"

namespace loopsoup {

using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw RuntimeError("cannot write " + tmp + ": " + std::strerror(errno));
  const bool ok = std::fwrite(content.data(), 1, content.size(), f) == content.size() && std::fflush(f) == 0 &&
                  ::fsync(::fileno(f)) == 0;
  std::fclose(f);
  if (!ok) {
    std::remove(tmp.c_str());
    throw RuntimeError("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw RuntimeError("cannot rename " + tmp + " to " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string rows_to_csv(const std::vector<EstimateRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += r.kind + "," + std::to_string(r.dimension) + "," + num(r.alpha) + "," + num(r.kappa) + "," + num(r.n) + "," +
           num(r.value) + "," + num(r.standard_error) + "," + std::to_string(r.replicas) + "," + num(r.wall_time) + "\n";
  }
  return out;
}

std::vector<EstimateRow> rows_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("CSV header mismatch");
  std::vector<EstimateRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 9) throw ConfigError("CSV row with " + std::to_string(f.size()) + " fields");
    EstimateRow r;
    r.kind = f[0];
    r.dimension = std::stoi(f[1]);
    r.alpha = std::strtod(f[2].c_str(), nullptr);
    r.kappa = std::strtod(f[3].c_str(), nullptr);
    r.n = std::strtod(f[4].c_str(), nullptr);
    r.value = std::strtod(f[5].c_str(), nullptr);
    r.standard_error = std::strtod(f[6].c_str(), nullptr);
    r.replicas = std::stoull(f[7]);
    r.wall_time = std::strtod(f[8].c_str(), nullptr);
    rows.push_back(r);
  }
  return rows;
}

std::string result_sidecar_json(const ExperimentSpec& spec, const ExperimentResult& result) {
  json j;
  j["kind"] = to_string(spec.kind);
  j["d"] = spec.dimension;
  j["alpha"] = spec.alpha;
  j["kappa"] = spec.kappa;
  if (result.fit) {
    j["fit"] = {{"slope", result.fit->slope},
                {"slope_se", result.fit->slope_se},
                {"intercept", result.fit->intercept},
                {"points_used", result.fit->points_used},
                {"excluded", result.fit->excluded}};
  } else {
    j["fit"] = nullptr;
  }
  json meta = json::object();
  for (const auto& [k, v] : result.metadata) meta[k] = finite_or_null(v);
  j["metadata"] = meta;
  j["notes"] = result.notes;
  return j.dump(2) + "\n";
}

std::string soup_to_text(const LoopList& loops) {
  std::string out;
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const auto loop = loops.loop(i);
    out += std::to_string(loop.size());
    for (SiteIndex s : loop) {
      out += ' ';
      out += std::to_string(s);
    }
    out += '\n';
  }
  return out;
}

LoopList soup_from_text(const std::string& text) {
  LoopList loops;
  std::istringstream in(text);
  std::string line;
  std::vector<SiteIndex> buf;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t n = 0;
    if (!(ls >> n)) throw ConfigError("soup line " + std::to_string(lineno) + ": missing length");
    buf.clear();
    std::uint64_t s = 0;
    while (ls >> s) buf.push_back(static_cast<SiteIndex>(s));
    if (buf.size() != n || n < 2) throw ConfigError("soup line " + std::to_string(lineno) + ": bad loop");
    loops.add(buf);
  }
  return loops;
}

std::string soup_manifest_json(const SoupSample& soup, const std::string& config_json) {
  const auto& p = soup.params;
  json j = {{"tool_version", kToolVersion},
            {"params",
             {{"alpha", p.alpha},
              {"dimension", p.spec.dimension},
              {"box_radius", p.spec.box_radius},
              {"kappa", p.spec.kappa},
              {"order", p.order == VertexOrder::Reverse ? "reverse" : "lexicographic"},
              {"jmax", soup.cap.jmax},
              {"green_bound", soup.cap.green_bound},
              {"residual_intensity", soup.cap.residual}}},
            {"seed", p.seed},
            {"stream", p.stream},
            {"loops", soup.loops.size()},
            {"total_length", soup.loops.total_length()},
            {"config", json::parse(config_json)}};
  return j.dump(2) + "\n";
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_json(const Manifest& m) {
  char host[256] = {0};
  ::gethostname(host, sizeof host - 1);
  json streams = json::object();
  for (const auto& [name, id] : m.streams) streams[name] = id;
  json j = {{"tool_version", kToolVersion},
            {"config", json::parse(m.config_json)},
            {"seed", m.seed},
            {"streams", streams},
            {"started", m.started},
            {"finished", m.finished},
            {"host", {{"name", host}, {"hardware_threads", std::thread::hardware_concurrency()}}}};
  return j.dump(2) + "\n";
}

}  // namespace loopsoup
