#include "rfdm/plot.hpp"

#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "rfdm/error.hpp"

namespace rfdm {

namespace {

constexpr const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
                                    "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) { return detail::format_double(v); }

}  // namespace

std::pair<double, double> plot_position(const RocPoint& p, const PlotLayout& l) {
  const double w = l.width - 2.0 * l.margin;
  const double h = l.height - 2.0 * l.margin;
  return {l.margin + p.fpr * w, l.margin + (1.0 - p.tpr) * h};
}

std::string render_roc_svg(std::span<const PlotSeries> series, const PlotLayout& l) {
  std::ostringstream os;
  const double x0 = l.margin, x1 = l.width - l.margin;
  const double y0 = l.margin, y1 = l.height - l.margin;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(l.width) << "\" height=\"" << num(l.height)
     << "\" viewBox=\"0 0 " << num(l.width) << ' ' << num(l.height) << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << num(l.width) << "\" height=\"" << num(l.height)
     << "\" fill=\"white\"/>\n";

  os << "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
     << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0) << "\" height=\""
     << num(y1 - y0) << "\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = t / 5.0;
    const auto [tx, ty] = plot_position({v, v}, l);
    os << "<line x1=\"" << num(tx) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(tx) << "\" y2=\"" << num(y1 + 5)
       << "\"/>\n"
       << "<line x1=\"" << num(x0 - 5) << "\" y1=\"" << num(ty) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(ty)
       << "\"/>\n";
  }
  os << "</g>\n<g id=\"ticks\" font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = t / 5.0;
    const auto [tx, ty] = plot_position({v, v}, l);
    char label[8];
    std::snprintf(label, sizeof label, "%.1f", v);
    os << "<text x=\"" << num(tx) << "\" y=\"" << num(y1 + 18) << "\" text-anchor=\"middle\">" << label << "</text>\n"
       << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(ty + 4) << "\" text-anchor=\"end\">" << label << "</text>\n";
  }
  os << "<text x=\"" << num(0.5 * (x0 + x1)) << "\" y=\"" << num(l.height - 15)
     << "\" text-anchor=\"middle\">False positive rate</text>\n"
     << "<text x=\"15\" y=\"" << num(0.5 * (y0 + y1)) << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
     << num(0.5 * (y0 + y1)) << ")\">True positive rate</text>\n</g>\n";

  os << "<line id=\"diagonal\" x1=\"" << num(x0) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x1) << "\" y2=\""
     << num(y0) << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    os << "<polyline class=\"roc\" data-label=\"" << escape(series[s].label) << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < series[s].curve.points.size(); ++k) {
      const auto [px, py] = plot_position(series[s].curve.points[k], l);
      os << (k ? " " : "") << num(px) << ',' << num(py);
    }
    os << "\"/>\n";
  }

  os << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    const double ly = y1 - 12.0 - 16.0 * static_cast<double>(series.size() - 1 - s);
    char auc[32];
    std::snprintf(auc, sizeof auc, "%.3f", series[s].curve.auc);
    os << "<line x1=\"" << num(x1 - 170) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(x1 - 150) << "\" y2=\""
       << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << num(x1 - 145) << "\" y=\"" << num(ly) << "\">" << escape(series[s].label) << " (AUC "
       << auc << ")</text>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

void emit_plot(std::span<const PlotSeries> series, const std::filesystem::path& path, const PlotLayout& l) {
  const std::string svg = render_roc_svg(series, l);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << svg;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace rfdm
