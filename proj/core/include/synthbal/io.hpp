#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "synthbal/common.hpp"

namespace synthbal {

// ---- number formatting -----------------------------------------------------
// Human-facing CSVs carry 4 decimals, JSON carries 17 significant digits.
// Both are produced through these helpers so runs are byte-reproducible.

std::string fmt_fixed(double x, int decimals = 4);
std::string fmt_g17(double x);

// ---- plain CSV (no quoting; the formats defined here never need it) --------

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Csv read_csv(std::istream& in);
Csv read_csv_file(const std::string& path);

// ---- key = value config files ----------------------------------------------
// '#' starts a comment; blank lines ignored; later keys override earlier.

std::vector<std::pair<std::string, std::string>> read_kv_stream(std::istream& in,
                                                                const std::string& where);
std::vector<std::pair<std::string, std::string>> read_kv_file(const std::string& path);

// ---- small string/number utilities ------------------------------------------

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_list(std::string_view s);  // comma list, trimmed
long long parse_int(const std::string& text, const std::string& what);
double parse_double(const std::string& text, const std::string& what);

// ---- filesystem --------------------------------------------------------------

// Write to "<path>.tmp" then rename, so readers never observe partial files.
void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);
void ensure_directory(const std::string& path);

}  // namespace synthbal
