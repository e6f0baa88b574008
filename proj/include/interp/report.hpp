#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "interp/evaluation.hpp"
#include "interp/listspace.hpp"
#include "interp/selection.hpp"

namespace interp {

inline constexpr const char* kToolkitVersion = "1.0.0";

/// FNV-1a 64-bit content hash used for manifest input/output digests.
std::uint64_t fnv1a_64(std::string_view bytes);

/// "fnv1a64:" followed by 16 lowercase hex digits of the file's bytes.
std::string digest_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Fixed-point decimal formatting (standard round-half-to-even via printf).
std::string format_fixed(double value, int decimals);

std::string scoreboard_csv(const ScoreBoard& board);
std::string scoreboard_markdown(const ScoreBoard& board);
std::string score_table_csv(const std::vector<ScoreRow>& rows);
std::string score_table_markdown(const std::vector<ScoreRow>& rows);
std::string selection_csv(const SelectionReport& report);
std::string selection_markdown(const SelectionReport& report);

/// Grouped-bar accuracy chart (one group per model kind and kept-feature
/// count, one bar per selection method, full-feature baseline as a dashed
/// rule). Self-contained SVG markup, no plotting dependency.
std::string selection_svg(const SelectionReport& report);

/// Record of one CLI run: the exact argument vector (re-dispatchable), the
/// seed, and content digests of every input and output file. Contains no
/// timestamps so reruns are byte-comparable.
struct Manifest {
  std::string command;
  std::vector<std::string> args;
  std::uint64_t seed = 0;
  std::string version = kToolkitVersion;
  std::map<std::string, std::string> inputs;   // path -> digest
  std::map<std::string, std::string> outputs;  // path -> digest

  std::string to_json_string() const;
  static Manifest from_json_string(const std::string& text);
};

void save_manifest(const Manifest& manifest, const std::string& path);
Manifest load_manifest(const std::string& path);

}  // namespace interp
