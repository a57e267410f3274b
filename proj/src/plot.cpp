#include "tuner/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <optional>

namespace tuner {

namespace {

constexpr double width = 640.0;
constexpr double panel_height = 200.0;
constexpr double margin_left = 70.0;
constexpr double margin_right = 20.0;
constexpr double margin_top = 40.0;
constexpr double panel_gap = 50.0;

std::string num(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 2);
  std::string s(buf, end);
  // Trailing zeros only add bytes.
  while (s.size() > 1 && s.back() == '0')
    s.pop_back();
  if (s.back() == '.')
    s.pop_back();
  return s == "-0" ? "0" : s;
}

std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    case '"': out += "&quot;"; break;
    default: out.push_back(c);
    }
  }
  return out;
}

struct series {
  std::string label;
  std::string color;
  std::vector<std::optional<double>> ys; ///< nullopt leaves a gap
};

struct panel {
  std::string title;
  std::vector<series> lines;
};

std::string render_panel(const panel &p, double top, std::size_t points) {
  const double plot_w = width - margin_left - margin_right;
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto &s : p.lines)
    for (const auto &y : s.ys)
      if (y) {
        lo = any ? std::min(lo, *y) : *y;
        hi = any ? std::max(hi, *y) : *y;
        any = true;
      }
  lo = std::min(lo, 0.0);
  if (hi <= lo)
    hi = lo + 1.0;
  const auto x_of = [&](std::size_t i) {
    return margin_left + (points > 1 ? plot_w * static_cast<double>(i) /
                                           static_cast<double>(points - 1)
                                     : plot_w / 2);
  };
  const auto y_of = [&](double y) { return top + panel_height * (hi - y) / (hi - lo); };

  std::string out;
  out += "<text x=\"" + num(margin_left) + "\" y=\"" + num(top - 10) +
         "\" font-size=\"13\">" + escape(p.title) + "</text>\n";
  out += "<rect x=\"" + num(margin_left) + "\" y=\"" + num(top) + "\" width=\"" +
         num(plot_w) + "\" height=\"" + num(panel_height) +
         "\" fill=\"none\" stroke=\"#999\"/>\n";
  out += "<text x=\"" + num(margin_left - 6) + "\" y=\"" + num(top + 4) +
         "\" font-size=\"11\" text-anchor=\"end\">" + num(hi) + "</text>\n";
  out += "<text x=\"" + num(margin_left - 6) + "\" y=\"" + num(top + panel_height + 4) +
         "\" font-size=\"11\" text-anchor=\"end\">" + num(lo) + "</text>\n";
  out += "<text x=\"" + num(margin_left) + "\" y=\"" + num(top + panel_height + 16) +
         "\" font-size=\"11\">0</text>\n";
  out += "<text x=\"" + num(margin_left + plot_w) + "\" y=\"" +
         num(top + panel_height + 16) + "\" font-size=\"11\" text-anchor=\"end\">" +
         std::to_string(points > 0 ? points - 1 : 0) + "</text>\n";

  double legend_x = margin_left + plot_w;
  for (auto it = p.lines.rbegin(); it != p.lines.rend(); ++it) {
    out += "<text x=\"" + num(legend_x) + "\" y=\"" + num(top - 10) +
           "\" font-size=\"11\" text-anchor=\"end\" fill=\"" + it->color + "\">" +
           escape(it->label) + "</text>\n";
    legend_x -= 8.0 * static_cast<double>(it->label.size()) + 16.0;
  }

  for (const auto &s : p.lines) {
    std::string pts;
    auto flush = [&] {
      if (!pts.empty())
        out += "<polyline fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
      pts.clear();
    };
    for (std::size_t i = 0; i < s.ys.size(); ++i) {
      if (!s.ys[i]) {
        flush();
        continue;
      }
      if (!pts.empty())
        pts += ' ';
      pts += num(x_of(i)) + "," + num(y_of(*s.ys[i]));
      out += "<circle cx=\"" + num(x_of(i)) + "\" cy=\"" + num(y_of(*s.ys[i])) +
             "\" r=\"2\" fill=\"" + s.color + "\"/>\n";
    }
    flush();
  }
  return out;
}

std::string render_chart(const std::string &title, const std::vector<panel> &panels,
                         std::size_t points, const std::string &x_label) {
  const double height = margin_top + static_cast<double>(panels.size()) *
                                         (panel_height + panel_gap);
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
         num(height) + "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(width / 2) + "\" y=\"18\" font-size=\"15\" " +
         "text-anchor=\"middle\">" + escape(title) + "</text>\n";
  double top = margin_top + 15.0;
  for (const auto &p : panels) {
    out += render_panel(p, top, points);
    top += panel_height + panel_gap;
  }
  out += "<text x=\"" + num(width / 2) + "\" y=\"" + num(height - 8) +
         "\" font-size=\"11\" text-anchor=\"middle\">" + escape(x_label) + "</text>\n";
  out += "</svg>\n";
  return out;
}

std::optional<double> base_height(const lattice_value &v) {
  if (v.is_int())
    return v.as_int().is_infinite() ? std::nullopt
                                    : std::optional<double>(static_cast<double>(v.as_int().value()));
  if (v.is_bool())
    return v.as_bool() ? 1.0 : 0.0;
  return static_cast<double>(v.as_bits().popcount());
}

double delta_height(const delta_distribution &d) {
  const auto &raw = d.raw();
  if (const auto *p = std::get_if<poisson_delta>(&raw))
    return p->lambda;
  if (const auto *b = std::get_if<bernoulli_delta>(&raw))
    return b->q;
  const auto &qs = std::get<bernoulli_vector_delta>(raw).qs;
  return std::accumulate(qs.begin(), qs.end(), 0.0) / static_cast<double>(qs.size());
}

std::string delta_label(const delta_distribution &d) {
  const auto &raw = d.raw();
  if (std::holds_alternative<poisson_delta>(raw))
    return "poisson lambda";
  if (std::holds_alternative<bernoulli_delta>(raw))
    return "bernoulli q";
  return "mean bernoulli q";
}

std::string base_label(const lattice_kind &k) {
  switch (k.tag) {
  case lattice_tag::integer: return "base value";
  case lattice_tag::boolean: return "base (1 = true)";
  case lattice_tag::bits: return "base (enabled labels)";
  }
  return "base";
}

} // namespace

std::vector<chart_file> render_trace_charts(const trace_contents &trace) {
  const auto &records = trace.records;
  // Point 0 is the state before the first iteration, point k the state after
  // iteration k-1.
  const std::size_t points = records.size() + 1;
  std::vector<chart_file> files;

  for (std::size_t p = 0; p < trace.cat.size(); ++p) {
    const auto &spec = trace.cat[p];
    series base{base_label(spec.kind), "#1f77b4", {}};
    series delta{delta_label(records.front().distributions_before[p].delta()), "#d62728", {}};
    base.ys.push_back(base_height(records.front().distributions_before[p].base()));
    delta.ys.push_back(delta_height(records.front().distributions_before[p].delta()));
    for (const auto &rec : records) {
      base.ys.push_back(base_height(rec.distributions_after[p].base()));
      delta.ys.push_back(delta_height(rec.distributions_after[p].delta()));
    }
    files.push_back({"param-" + spec.name + ".svg",
                     render_chart(spec.name + " (" + spec.kind.to_string() + ")",
                                  {{"P_base", {base}}, {"P_delta", {delta}}}, points,
                                  "iteration (0 = initial)")});
  }

  series best{"fewest alarms", "#2ca02c", {}};
  series universe{"distinct alarms", "#ff7f0e", {}};
  series done{"completed analyses", "#9467bd", {}};
  for (const auto &rec : records) {
    std::optional<double> b;
    for (const auto &o : rec.outcomes)
      if (const auto *c = std::get_if<completed>(&o))
        b = b ? std::min(*b, static_cast<double>(c->alarms.size()))
              : static_cast<double>(c->alarms.size());
    best.ys.push_back(b);
    universe.ys.push_back(static_cast<double>(rec.alarm_universe.size()));
    done.ys.push_back(static_cast<double>(rec.completed));
  }
  files.push_back({"alarms.svg",
                   render_chart("alarms per iteration",
                                {{"alarm counts", {best, universe}}, {"completion", {done}}},
                                records.size(), "iteration")});
  return files;
}

} // namespace tuner
