#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

namespace shum::app {

std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fixed(double x, int decimals) {
  if (std::isnan(x)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  return buf;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a_hex(bytes);
}

Json to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v[i])) {
      arr.push_back(v[i]);
    } else {
      arr.push_back(nullptr);
    }
  }
  return arr;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << contents;
  if (!out) throw InputError("write failed for " + path.string());
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    std::string_view item = text.substr(start, comma - start);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
    if (!item.empty()) items.emplace_back(item);
    start = comma + 1;
  }
  return items;
}

std::string Manifest::hash() const {
  Json keyed;
  keyed["command"] = command;
  keyed["version"] = SHUM_VERSION_STRING;
  keyed["seed"] = seed;
  keyed["config"] = config;
  return fnv1a_hex(keyed.dump());
}

Json Manifest::to_json() const {
  Json j;
  j["manifest_hash"] = hash();
  j["command"] = command;
  j["command_line"] = command_line;
  j["replay_args"] = replay_args;
  j["version"] = SHUM_VERSION_STRING;
  j["seed"] = seed;
  j["config"] = config;
  j["workers"] = workers;
  j["wall_seconds"] = wall_seconds;
  j["timings_seconds"] = timings;
  return j;
}

std::vector<std::string> strip_run_flags(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--out" || a == "--workers") {
      ++i;
      continue;
    }
    if (a.rfind("--out=", 0) == 0 || a.rfind("--workers=", 0) == 0) continue;
    kept.push_back(a);
  }
  return kept;
}

}  // namespace shum::app
