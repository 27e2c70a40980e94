#include "srcpool/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

namespace srcpool {

namespace {

constexpr std::array<std::string_view, 16> kColumns = {
    "graph",  "operator",     "experiment",    "status",     "k",        "mse",
    "gamma",  "mse_gt_gamma", "quad_loss",     "edge_density", "median_weight", "storage",
    "epochs", "eig_before",   "eig_after",     "wall_time_ms"};

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string join(const Vector& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += format_double(v[i]);
  }
  return out;
}

// Quote cells that contain separators (status messages may).
std::string cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

struct Frame {
  double width = 480, height = 320, margin = 40;
  double x0, x1, y0, y1;
  double px(double x) const { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); }
  double py(double y) const { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); }
};

void svg_open(std::ostream& out, const Frame& f, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\""
      << f.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << f.width / 2 << "\" y=\"18\" text-anchor=\"middle\">" << title << "</text>\n"
      << "<rect x=\"" << f.margin << "\" y=\"" << f.margin << "\" width=\"" << f.width - 2 * f.margin
      << "\" height=\"" << f.height - 2 * f.margin << "\" fill=\"none\" stroke=\"#888\"/>\n";
  out << "<text x=\"" << f.margin << "\" y=\"" << f.height - f.margin + 14 << "\">"
      << format_double(f.x0) << "</text>\n"
      << "<text x=\"" << f.width - f.margin << "\" y=\"" << f.height - f.margin + 14
      << "\" text-anchor=\"end\">" << format_double(f.x1) << "</text>\n"
      << "<text x=\"" << f.margin - 4 << "\" y=\"" << f.height - f.margin << "\" text-anchor=\"end\">"
      << format_double(f.y0) << "</text>\n"
      << "<text x=\"" << f.margin - 4 << "\" y=\"" << f.margin + 8 << "\" text-anchor=\"end\">"
      << format_double(f.y1) << "</text>\n";
}

void polyline(std::ostream& out, const Frame& f, std::span<const double> xs,
              std::span<const double> ys, const char* color) {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << (i ? " " : "") << f.px(xs[i]) << ',' << f.py(ys[i]);
  out << "\"/>\n";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string_view experiment_name(Experiment e) {
  return e == Experiment::Spectral ? "spectral" : "ae";
}

std::span<const std::string_view> report_columns() { return kColumns; }

void write_reports_csv(std::ostream& out, std::span<const ExperimentReport> reports) {
  for (std::size_t c = 0; c < kColumns.size(); ++c) out << (c ? "," : "") << kColumns[c];
  out << '\n';
  for (const auto& r : reports) {
    const bool ok = r.ok();
    std::string flag;
    if (r.mse && r.gamma) flag = r.mse_exceeds_gamma() ? "1" : "0";
    out << cell(r.graph_name) << ',' << cell(r.operator_id) << ',' << experiment_name(r.experiment)
        << ',' << cell(r.status) << ',' << (ok ? std::to_string(r.k) : "") << ',' << opt(r.mse)
        << ',' << opt(r.gamma) << ',' << flag << ',' << opt(r.quad_loss) << ','
        << opt(r.edge_density) << ',' << opt(r.median_weight) << ','
        << (ok ? std::to_string(r.storage) : "") << ',' << r.epochs << ',' << join(r.eig_before)
        << ',' << join(r.eig_after) << ',' << r.wall_time_ms << '\n';
  }
}

void write_loss_curve_csv(std::ostream& out, std::span<const double> curve) {
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < curve.size(); ++i) out << i << ',' << format_double(curve[i]) << '\n';
}

void write_storage_csv(std::ostream& out, std::span<const StorageProbe> probes) {
  out << "operator,n,k,storage\n";
  for (const auto& p : probes)
    for (const auto& row : p.rows)
      out << p.operator_id << ',' << row.n << ',' << row.k << ',' << row.storage << '\n';
  for (const auto& p : probes)
    if (p.slope) out << "# slope " << p.operator_id << ' ' << format_double(*p.slope) << '\n';
}

void write_spectrum_svg(std::ostream& out, const ExperimentReport& report) {
  Frame f;
  f.x0 = 0.0;
  f.x1 = 1.0;
  f.y0 = 0.0;
  f.y1 = 2.0;
  svg_open(out, f, report.graph_name + " / " + report.operator_id + " normalized Laplacian spectrum");
  auto draw = [&](const Vector& eig, const char* color) {
    if (eig.size() == 0) return;
    std::vector<double> xs(static_cast<std::size_t>(eig.size())), ys(xs.size());
    for (Index i = 0; i < eig.size(); ++i) {
      xs[static_cast<std::size_t>(i)] = eig.size() > 1 ? static_cast<double>(i) / static_cast<double>(eig.size() - 1) : 0.0;
      ys[static_cast<std::size_t>(i)] = std::clamp(eig[i], 0.0, 2.0);
    }
    polyline(out, f, xs, ys, color);
  };
  draw(report.eig_before, "black");
  draw(report.eig_after, "#1f77b4");
  out << "</svg>\n";
}

void write_loss_curves_svg(std::ostream& out,
                           std::span<const std::pair<std::string, std::vector<double>>> series) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t longest = 1;
  for (const auto& [name, curve] : series) {
    longest = std::max(longest, curve.size());
    for (double v : curve) {
      if (v > 0.0) {
        lo = std::min(lo, std::log10(v));
        hi = std::max(hi, std::log10(v));
      }
    }
  }
  if (!(lo < hi)) {
    lo = -1.0;
    hi = 1.0;
  }
  Frame f;
  f.x0 = 0.0;
  f.x1 = static_cast<double>(std::max<std::size_t>(longest - 1, 1));
  f.y0 = lo;
  f.y1 = hi;
  svg_open(out, f, "training loss (log10)");
  std::size_t s = 0;
  for (const auto& [name, curve] : series) {
    const char* color = kPalette[s % std::size(kPalette)];
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (curve[i] <= 0.0) continue;
      xs.push_back(static_cast<double>(i));
      ys.push_back(std::log10(curve[i]));
    }
    polyline(out, f, xs, ys, color);
    out << "<text x=\"" << f.width - f.margin - 4 << "\" y=\"" << f.margin + 14 * (s + 1)
        << "\" text-anchor=\"end\" fill=\"" << color << "\">" << name << "</text>\n";
    ++s;
  }
  out << "</svg>\n";
}

}  // namespace srcpool
