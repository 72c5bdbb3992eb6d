#include "zx/io.hpp"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace zx {

void atomic_write_file(const std::string& path, const std::string& contents) {
  std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out.write(contents.data(), std::streamsize(contents.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("rename failed for " + path);
  }
}

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto strip = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r\n");
      if (a == std::string::npos) return std::string();
      size_t b = s.find_last_not_of(" \t\r\n");
      return s.substr(a, b - a + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line missing '=': " + line);
    std::string key = strip(line.substr(0, eq));
    std::string val = strip(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error("config line with empty key");
    kv[key] = val;
  }
  return kv;
}

std::string cache_dir() {
  const char* d = std::getenv("ZXLB_CACHE_DIR");
  return d ? std::string(d) : std::string();
}

}  // namespace zx
