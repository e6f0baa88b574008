#include "interp/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace interp {

using json = nlohmann::ordered_json;

std::uint64_t fnv1a_64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::string digest_file(const std::string& path) {
  const std::uint64_t h = fnv1a_64(read_text_file(path));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

namespace {

/// Features by descending total with universe-index tie-break — the same
/// order aggregate() emits.
std::vector<std::size_t> ranking_order(const ScoreBoard& board) {
  std::vector<std::size_t> order(board.features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (board.totals[a] != board.totals[b]) return board.totals[a] > board.totals[b];
    return a < b;
  });
  return order;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

std::string scoreboard_csv(const ScoreBoard& board) {
  std::ostringstream out;
  out << "rank,feature,borda_total\n";
  const auto order = ranking_order(board);
  for (std::size_t r = 0; r < order.size(); ++r)
    out << r + 1 << ',' << board.features[order[r]] << ',' << board.totals[order[r]] << '\n';
  return out.str();
}

std::string scoreboard_markdown(const ScoreBoard& board) {
  std::ostringstream out;
  out << "| rank | feature | Borda total |\n|---:|---|---:|\n";
  const auto order = ranking_order(board);
  for (std::size_t r = 0; r < order.size(); ++r)
    out << "| " << r + 1 << " | " << board.features[order[r]] << " | " << board.totals[order[r]]
        << " |\n";
  return out.str();
}

std::string score_table_csv(const std::vector<ScoreRow>& rows) {
  std::ostringstream out;
  out << "name,l_score\n";
  for (const ScoreRow& row : rows) out << row.name << ',' << format_fixed(row.score, 4) << '\n';
  return out.str();
}

std::string score_table_markdown(const std::vector<ScoreRow>& rows) {
  std::ostringstream out;
  out << "| interpretation | L_score |\n|---|---:|\n";
  for (const ScoreRow& row : rows)
    out << "| " << row.name << " | " << format_fixed(row.score, 4) << " |\n";
  return out.str();
}

std::string selection_csv(const SelectionReport& report) {
  std::ostringstream out;
  out << "model,method,n_kept,test_accuracy,features\n";
  for (const SelectionCell& cell : report.cells)
    out << cell.model_kind << ',' << cell.method << ',' << cell.n_kept << ','
        << format_fixed(cell.test_accuracy, 4) << ',' << join(cell.features, "|") << '\n';
  return out.str();
}

std::string selection_markdown(const SelectionReport& report) {
  std::ostringstream out;
  out << "| model | method | kept | test accuracy | features |\n|---|---|---:|---:|---|\n";
  for (const SelectionCell& cell : report.cells)
    out << "| " << cell.model_kind << " | " << cell.method << " | " << cell.n_kept << " | "
        << format_fixed(cell.test_accuracy, 4) << " | " << join(cell.features, " ") << " |\n";
  return out.str();
}

std::string selection_svg(const SelectionReport& report) {
  // collect model kinds, kept counts, and methods in deterministic order
  std::vector<std::string> kinds, methods;
  std::vector<std::size_t> kept;
  for (const SelectionCell& c : report.cells) {
    if (c.method == "all") continue;
    if (std::find(kinds.begin(), kinds.end(), c.model_kind) == kinds.end())
      kinds.push_back(c.model_kind);
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end())
      methods.push_back(c.method);
    if (std::find(kept.begin(), kept.end(), c.n_kept) == kept.end()) kept.push_back(c.n_kept);
  }
  std::sort(kinds.begin(), kinds.end());
  std::sort(methods.begin(), methods.end());
  std::sort(kept.begin(), kept.end());

  const auto cell_accuracy = [&](const std::string& kind, const std::string& method,
                                 std::size_t n) -> double {
    for (const SelectionCell& c : report.cells)
      if (c.model_kind == kind && c.method == method && (method == "all" || c.n_kept == n))
        return c.test_accuracy;
    return -1.0;
  };

  const double bar_w = 18.0, gap = 8.0, group_gap = 26.0;
  const double plot_h = 220.0, margin_left = 50.0, margin_top = 30.0, margin_bottom = 70.0;
  const double group_w = static_cast<double>(methods.size()) * bar_w + gap;
  const std::size_t n_groups = kinds.size() * kept.size();
  const double plot_w = static_cast<double>(n_groups) * (group_w + group_gap);
  const double width = margin_left + plot_w + 120.0;
  const double height = margin_top + plot_h + margin_bottom;
  const char* palette[] = {"#4878cf", "#ee854a", "#6acc65", "#d65f5f"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_fixed(width, 0)
      << "\" height=\"" << format_fixed(height, 0) << "\" font-family=\"sans-serif\" "
      << "font-size=\"11\">\n";
  svg << "<text x=\"" << format_fixed(margin_left, 0) << "\" y=\"18\" font-size=\"14\">"
      << "Test accuracy by selection method (seed " << report.seed << ", test fraction "
      << format_fixed(report.test_fraction, 2) << ")</text>\n";

  // y axis with 0.25 gridlines
  for (int tick = 0; tick <= 4; ++tick) {
    const double frac = static_cast<double>(tick) / 4.0;
    const double y = margin_top + plot_h * (1.0 - frac);
    svg << "<line x1=\"" << format_fixed(margin_left, 1) << "\" y1=\"" << format_fixed(y, 1)
        << "\" x2=\"" << format_fixed(margin_left + plot_w, 1) << "\" y2=\""
        << format_fixed(y, 1) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << format_fixed(margin_left - 34.0, 1) << "\" y=\""
        << format_fixed(y + 4.0, 1) << "\">" << format_fixed(frac, 2) << "</text>\n";
  }

  double x = margin_left + group_gap / 2.0;
  for (const std::string& kind : kinds) {
    for (std::size_t n : kept) {
      double bx = x;
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const double acc = cell_accuracy(kind, methods[mi], n);
        if (acc >= 0.0) {
          const double h = plot_h * acc;
          svg << "<rect x=\"" << format_fixed(bx, 1) << "\" y=\""
              << format_fixed(margin_top + plot_h - h, 1) << "\" width=\""
              << format_fixed(bar_w, 1) << "\" height=\"" << format_fixed(h, 1) << "\" fill=\""
              << palette[mi % 4] << "\"/>\n";
        }
        bx += bar_w;
      }
      const double base = cell_accuracy(kind, "all", 0);
      if (base >= 0.0) {
        const double y = margin_top + plot_h * (1.0 - base);
        svg << "<line x1=\"" << format_fixed(x - 3.0, 1) << "\" y1=\"" << format_fixed(y, 1)
            << "\" x2=\"" << format_fixed(x + group_w - gap + 3.0, 1) << "\" y2=\""
            << format_fixed(y, 1) << "\" stroke=\"#333333\" stroke-dasharray=\"4,3\"/>\n";
      }
      svg << "<text x=\"" << format_fixed(x, 1) << "\" y=\""
          << format_fixed(margin_top + plot_h + 16.0, 1) << "\">" << kind << "</text>\n";
      svg << "<text x=\"" << format_fixed(x, 1) << "\" y=\""
          << format_fixed(margin_top + plot_h + 30.0, 1) << "\">n=" << n << "</text>\n";
      x += group_w + group_gap;
    }
  }

  // legend
  double ly = margin_top + 10.0;
  const double lx = margin_left + plot_w + 14.0;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    svg << "<rect x=\"" << format_fixed(lx, 1) << "\" y=\"" << format_fixed(ly - 9.0, 1)
        << "\" width=\"12\" height=\"12\" fill=\"" << palette[mi % 4] << "\"/>\n";
    svg << "<text x=\"" << format_fixed(lx + 18.0, 1) << "\" y=\"" << format_fixed(ly + 1.0, 1)
        << "\">" << methods[mi] << "</text>\n";
    ly += 18.0;
  }
  svg << "<line x1=\"" << format_fixed(lx, 1) << "\" y1=\"" << format_fixed(ly - 3.0, 1)
      << "\" x2=\"" << format_fixed(lx + 12.0, 1) << "\" y2=\"" << format_fixed(ly - 3.0, 1)
      << "\" stroke=\"#333333\" stroke-dasharray=\"4,3\"/>\n";
  svg << "<text x=\"" << format_fixed(lx + 18.0, 1) << "\" y=\"" << format_fixed(ly + 1.0, 1)
      << "\">all features</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string Manifest::to_json_string() const {
  json o;
  o["format"] = "interp.manifest/1";
  o["command"] = command;
  o["args"] = args;
  o["seed"] = seed;
  o["version"] = version;
  o["inputs"] = inputs;
  o["outputs"] = outputs;
  return o.dump(2);
}

Manifest Manifest::from_json_string(const std::string& text) {
  const json o = json::parse(text);
  if (o.at("format").get<std::string>() != "interp.manifest/1")
    throw std::runtime_error("unsupported manifest format");
  Manifest m;
  m.command = o.at("command").get<std::string>();
  m.args = o.at("args").get<std::vector<std::string>>();
  m.seed = o.at("seed").get<std::uint64_t>();
  m.version = o.at("version").get<std::string>();
  m.inputs = o.at("inputs").get<std::map<std::string, std::string>>();
  m.outputs = o.at("outputs").get<std::map<std::string, std::string>>();
  return m;
}

void save_manifest(const Manifest& manifest, const std::string& path) {
  write_text_file(path, manifest.to_json_string() + "\n");
}

Manifest load_manifest(const std::string& path) {
  return Manifest::from_json_string(read_text_file(path));
}

}  // namespace interp
