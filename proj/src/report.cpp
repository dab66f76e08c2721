#include "speclab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace speclab {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols{"inequality_id", "domain", "k", "h", "lhs", "rhs_constant_free",
                                             "known_constant", "ratio", "error_budget", "verdict",
                                             "theta_reference"};
  return cols;
}

namespace {

// labels are ours, but quote anything a CSV reader would trip on
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

void join(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
  out << '\n';
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

json estimate(const Estimate& e) { return {{"value", number(e.value)}, {"error", number(e.error)}}; }

json estimates(const std::vector<Estimate>& v) {
  json a = json::array();
  for (const auto& e : v) a.push_back(estimate(e));
  return a;
}

json point(const Point& p, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[static_cast<std::size_t>(i)]);
  return a;
}

json set_quantities(const SetQuantities& q) {
  json j{{"lambda", estimates(q.lambda)}, {"measure", estimate(q.measure)}};
  if (q.has_torsion) {
    j["torsion"] = estimate(q.torsion);
    j["sup_w"] = estimate(q.sup_w);
    j["boundary_gradient"] = estimate(q.boundary_grad);
  }
  return j;
}

json record_json(const InequalityRecord& r) {
  json j{{"inequality_id", r.id},
         {"domain", r.domain},
         {"k", r.k},
         {"h", r.h},
         {"lhs", number(r.lhs)},
         {"lhs_error", number(r.lhs_error)},
         {"rhs_constant_free", number(r.rhs_constant_free)},
         {"rhs_error", number(r.rhs_error)},
         {"known_constant", r.known_constant ? json(*r.known_constant) : json(nullptr)},
         {"ratio", number(r.ratio)},
         {"error_budget", number(r.error_budget)},
         {"verdict", verdict_name(r.verdict)},
         {"theta_reference", r.theta_reference}};
  json notes = json::object();
  for (const auto& [k, v] : r.notes) notes[k] = std::isnan(v) ? json(true) : number(v);
  j["notes"] = notes;
  return j;
}

json asymmetry_json(const AsymmetryResult& a, int dim) {
  json j{{"value", a.value}, {"balls", a.balls}, {"starts", a.starts}, {"hit_search_box", a.hit_search_box}};
  if (a.pair)
    j["witness"] = {{"center1", point(a.pair->center1, dim)},
                    {"center2", point(a.pair->center2, dim)},
                    {"radius", a.pair->radius}};
  else
    j["witness"] = {{"center", point(a.ball.center, dim)}, {"radius", a.ball.radius}};
  return j;
}

json fit_json(const ExponentFit& f) {
  json samples = json::array();
  for (const auto& s : f.samples)
    samples.push_back({{"t", s.t}, {"delta_lambda2", estimate(s.d2)}, {"delta_lambda_k", estimate(s.dk)},
                       {"kept", s.kept}, {"note", s.note}});
  return {{"family", family_name(f.family)}, {"k", f.k},           {"mode", fit_mode_name(f.mode)},
          {"slope", f.slope},                {"intercept", f.intercept}, {"r_squared", f.r_squared},
          {"n_points", f.n_points},          {"samples", samples}};
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<InequalityRecord>& records) {
  join(out, record_columns());
  for (const auto& r : records)
    join(out, {csv_field(r.id), csv_field(r.domain), std::to_string(r.k), format_number(r.h), format_number(r.lhs),
               format_number(r.rhs_constant_free), r.known_constant ? format_number(*r.known_constant) : "",
               format_number(r.ratio), format_number(r.error_budget), std::string(verdict_name(r.verdict)),
               r.theta_reference});
}

void write_aggregates_csv(std::ostream& out, const std::vector<Aggregate>& aggregates) {
  join(out, {"inequality_id", "rows", "violations", "within_budget", "finite", "infinite", "max_ratio", "min_ratio",
             "argmax_domain", "argmax_k", "argmax_budget"});
  for (const auto& a : aggregates)
    join(out, {csv_field(a.id), std::to_string(a.rows), std::to_string(a.violations), std::to_string(a.within_budget),
               std::to_string(a.finite), std::to_string(a.infinite), format_number(a.max_ratio),
               format_number(a.min_ratio), csv_field(a.argmax_domain), std::to_string(a.argmax_k),
               format_number(a.argmax_budget)});
}

void write_stability_csv(std::ostream& out, const std::vector<StabilityRow>& rows) {
  join(out, {"inequality_id", "max_ratio_h", "max_ratio_h_half", "relative_change", "combined_budget", "stable"});
  for (const auto& r : rows)
    join(out, {csv_field(r.id), format_number(r.coarse), format_number(r.fine), format_number(r.change),
               format_number(r.budget), r.stable ? "true" : "false"});
}

void write_fits_csv(std::ostream& out, const std::vector<ExponentFit>& fits) {
  join(out, {"family", "k", "mode", "slope", "intercept", "r_squared", "n_points"});
  for (const auto& f : fits)
    join(out, {std::string(family_name(f.family)), std::to_string(f.k), std::string(fit_mode_name(f.mode)),
               format_number(f.slope), format_number(f.intercept), format_number(f.r_squared),
               std::to_string(f.n_points)});
}

void write_sweep_json(std::ostream& out, const SweepReport& report, const std::vector<StabilityRow>& stability) {
  json j;
  j["h"] = report.h;
  j["k_max"] = report.k_max;
  json recs = json::array();
  for (const auto& r : report.records) recs.push_back(record_json(r));
  j["records"] = recs;
  json aggs = json::array();
  for (const auto& a : report.aggregates)
    aggs.push_back({{"inequality_id", a.id},
                    {"rows", a.rows},
                    {"violations", a.violations},
                    {"within_budget", a.within_budget},
                    {"finite", a.finite},
                    {"infinite", a.infinite},
                    {"max_ratio", number(a.max_ratio)},
                    {"min_ratio", number(a.min_ratio)},
                    {"argmax_domain", a.argmax_domain},
                    {"argmax_k", a.argmax_k},
                    {"argmax_budget", a.argmax_budget}});
  j["aggregates"] = aggs;
  json fails = json::array();
  for (const auto& f : report.failures) fails.push_back({{"domain", f.domain}, {"error", f.error}});
  j["failures"] = fails;
  json doms = json::array();
  for (const auto& ev : report.evaluations) {
    json d{{"label", ev.label},
           {"dim", ev.dim},
           {"h", ev.h},
           {"cells_fine", ev.cells_fine},
           {"omega", set_quantities(ev.omega)},
           {"fraenkel1", asymmetry_json(ev.f1, ev.dim)},
           {"fraenkel2", asymmetry_json(ev.f2, ev.dim)}};
    if (ev.inside) {
      d["inside_witness"] = set_quantities(*ev.inside);
      d["outside_witness_measure"] = estimate(ev.outside_measure);
    }
    if (ev.decomposition) {
      const auto& q = *ev.decomposition;
      d["decomposition"] = {{"source", q.source},
                            {"fell_back", q.fell_back},
                            {"lambda1_plus", estimate(q.lambda1_plus)},
                            {"lambda1_minus", estimate(q.lambda1_minus)},
                            {"measure_plus", estimate(q.measure_plus)},
                            {"measure_minus", estimate(q.measure_minus)},
                            {"pieces", set_quantities(q.pieces)}};
    } else {
      d["decomposition_error"] = ev.decomposition_error;
    }
    doms.push_back(d);
  }
  j["domains"] = doms;
  if (!stability.empty()) {
    json s = json::array();
    for (const auto& r : stability)
      s.push_back({{"inequality_id", r.id},
                   {"max_ratio_h", number(r.coarse)},
                   {"max_ratio_h_half", number(r.fine)},
                   {"relative_change", number(r.change)},
                   {"combined_budget", number(r.budget)},
                   {"stable", r.stable}});
    j["stability"] = s;
  }
  out << j.dump(1) << '\n';
}

void write_fits_json(std::ostream& out, const std::vector<ExponentFit>& fits, const std::optional<DoublingFit>& doubling) {
  json j;
  json f = json::array();
  for (const auto& x : fits) f.push_back(fit_json(x));
  j["fits"] = f;
  if (doubling) {
    json pts = json::array();
    for (const auto& p : doubling->points)
      pts.push_back({{"domain", p.domain},
                     {"k", p.k},
                     {"lhs", estimate(p.lhs)},
                     {"rhs", estimate(p.rhs)},
                     {"scaling_law_discrepancy", p.scaling_discrepancy}});
    j["doubling"] = {{"points", pts},
                     {"slope", doubling->fit.slope},
                     {"intercept", doubling->fit.intercept},
                     {"r_squared", doubling->fit.r_squared},
                     {"measured_log2_prefactor", doubling->power},
                     {"log2_spread", doubling->power_spread},
                     {"printed_log2_prefactor", doubling->printed_power},
                     {"scaling_log2_prefactor", doubling->scaling_power},
                     {"matches", doubling->matches}};
  }
  out << j.dump(1) << '\n';
}

// --- SVG -------------------------------------------------------------------

namespace {

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

std::string render_svg(const Plot& plot) {
  const double W = 640, H = 440, L = 70, R = 150, T = 40, B = 55;
  auto tx = [&](double v) { return plot.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!plot.log_x || x > 0) && (!plot.log_y || y > 0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double px = 0.05 * (x1 - x0), py = 0.05 * (y1 - y0);
  x0 -= px, x1 += px, y0 -= py, y1 += py;
  auto X = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto Y = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(plot.title)
    << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double vx = x0 + (x1 - x0) * i / 4.0, vy = y0 + (y1 - y0) * i / 4.0;
    const std::string lx = plot.log_x ? "1e" + fmt(vx) : fmt(vx);
    const std::string ly = plot.log_y ? "1e" + fmt(vy) : fmt(vy);
    o << "<text x=\"" << X(vx) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << lx << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << Y(vy) + 4 << "\" text-anchor=\"end\">" << ly << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << escape(plot.x_label)
    << "</text>\n";
  o << "<text transform=\"translate(16," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(plot.y_label) << "</text>\n";

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const auto& ser = plot.series[s];
    const char* color = kColors[s % std::size(kColors)];
    double sx0 = std::numeric_limits<double>::infinity(), sx1 = -sx0;
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      if (!usable(ser.x[i], ser.y[i])) continue;
      sx0 = std::min(sx0, tx(ser.x[i]));
      sx1 = std::max(sx1, tx(ser.x[i]));
      o << "<circle cx=\"" << X(tx(ser.x[i])) << "\" cy=\"" << Y(ty(ser.y[i])) << "\" r=\"3\" fill=\"" << color
        << "\"/>\n";
    }
    if (ser.line && std::isfinite(sx0)) {
      // the fit lives in natural-log coordinates when both axes are logarithmic
      auto line_y = [&](double xv) {
        if (plot.log_x && plot.log_y) return (ser.line->slope * xv * std::log(10.0) + ser.line->intercept) / std::log(10.0);
        return ser.line->slope * xv + ser.line->intercept;
      };
      o << "<line x1=\"" << X(sx0) << "\" y1=\"" << Y(line_y(sx0)) << "\" x2=\"" << X(sx1) << "\" y2=\""
        << Y(line_y(sx1)) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = T + 14 + 16.0 * static_cast<double>(s);
    o << "<circle cx=\"" << W - R + 14 << "\" cy=\"" << ly - 4 << "\" r=\"4\" fill=\"" << color << "\"/>\n";
    o << "<text x=\"" << W - R + 22 << "\" y=\"" << ly << "\">" << escape(ser.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace speclab
