#pragma once
#include <map>
#include <string>

namespace zx {

// Writes to <path>.tmp.<pid> then renames, so readers never observe a torn file.
void atomic_write_file(const std::string& path, const std::string& contents);

// 17 significant digits, '.' decimal, no grouping.
std::string fmt_g17(double v);

// Flat key=value file; '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// $ZXLB_CACHE_DIR, or empty when unset.
std::string cache_dir();

}  // namespace zx
