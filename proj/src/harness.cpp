#include "speclab/harness.hpp"

#include <algorithm>
#include <map>
#include <numbers>
#include <tuple>

#include "speclab/errors.hpp"
#include "speclab/parallel.hpp"
#include "speclab/reference.hpp"

namespace speclab {

// --- Estimate arithmetic ---------------------------------------------------

Estimate operator+(Estimate a, Estimate b) { return {a.value + b.value, a.error + b.error}; }
Estimate operator-(Estimate a, Estimate b) { return {a.value - b.value, a.error + b.error}; }
Estimate operator*(Estimate a, Estimate b) {
  return {a.value * b.value, std::abs(b.value) * a.error + std::abs(a.value) * b.error};
}
Estimate operator/(Estimate a, Estimate b) {
  const double v = a.value / b.value;
  return {v, (a.error + std::abs(v) * b.error) / std::abs(b.value)};
}
Estimate operator*(double s, Estimate a) { return {s * a.value, std::abs(s) * a.error}; }

Estimate pow(Estimate a, double p) {
  const double v = std::pow(a.value, p);
  if (a.error == 0.0) return {v, 0.0};
  if (a.value < 0.0) return {v, std::numeric_limits<double>::quiet_NaN()};
  // interval bound, valid near zero for fractional powers
  const double up = std::pow(a.value + a.error, p);
  const double down = std::pow(std::max(a.value - a.error, 0.0), p);
  return {v, std::max(std::abs(up - v), std::abs(v - down))};
}

Estimate abs(Estimate a) { return {std::abs(a.value), a.error}; }
Estimate positive_part(Estimate a) { return {std::max(a.value, 0.0), a.error}; }
Estimate max(Estimate a, Estimate b) { return {std::max(a.value, b.value), std::max(a.error, b.error)}; }
Estimate min(Estimate a, Estimate b) { return {std::min(a.value, b.value), std::max(a.error, b.error)}; }

SetQuantities combine(const SpectrumResult& coarse, const SpectrumResult& fine) {
  if (coarse.eigenvalues.size() != fine.eigenvalues.size()) throw ArgumentError("combine: ladder levels disagree on k");
  SetQuantities q;
  for (std::size_t i = 0; i < fine.eigenvalues.size(); ++i)
    q.lambda.push_back(Estimate::richardson(coarse.eigenvalues[i], fine.eigenvalues[i]));
  if (coarse.domain && fine.domain) q.measure = {fine.domain->measure(), std::abs(fine.domain->measure() - coarse.domain->measure())};
  return q;
}

SetQuantities combine(const SpectrumResult& coarse, const SpectrumResult& fine, const TorsionResult& tc,
                      const TorsionResult& tf) {
  SetQuantities q = combine(coarse, fine);
  q.torsion = Estimate::richardson(tc.T, tf.T);
  q.sup_w = Estimate::richardson(tc.sup_w, tf.sup_w);
  q.boundary_grad = Estimate::richardson(tc.boundary_grad_max, tf.boundary_grad_max);
  q.has_torsion = true;
  return q;
}

std::string_view theta_source_name(ThetaSource s) { return s == ThetaSource::analytic ? "analytic" : "grid"; }

ReferenceValues analytic_references(int dim, int count) {
  const auto r = reference::references(dim, count);
  ReferenceValues v;
  v.dim = dim;
  v.source = ThetaSource::analytic;
  for (double x : r.ball) v.ball.push_back(Estimate::exact(x));
  for (double x : r.theta) v.theta.push_back(Estimate::exact(x));
  v.torsion_ball = Estimate::exact(r.torsion_ball);
  v.torsion_theta = Estimate::exact(r.torsion_theta);
  v.sup_w_ball = Estimate::exact(r.sup_w_ball);
  return v;
}

ReferenceValues grid_references(int dim, int count, double h, const SolveOptions& solve) {
  const double rb = 1.0;
  const double rt = std::pow(0.5, 1.0 / dim);
  const Point far{1.5, 0.0, 0.0};
  auto ball = [&](double hh) { return make_ball(rb, {0.0, 0.0, 0.0}, hh, dim); };
  auto theta = [&](double hh) {
    Point a{-far[0], 0.0, 0.0};
    return make_theta(TwoBallConfig{dim, a, far, rt}, hh);
  };
  const auto sb = spectrum_extrapolated(ball, h, count, solve);
  const auto st = spectrum_extrapolated(theta, h, count, solve);
  const auto tb = torsion_extrapolated(ball, h, solve);
  const auto tt = torsion_extrapolated(theta, h, solve);
  ReferenceValues v;
  v.dim = dim;
  v.source = ThetaSource::grid;
  for (std::size_t i = 0; i < sb.eigenvalues.size(); ++i) {
    v.ball.push_back({sb.eigenvalues[i], sb.error_estimate[i]});
    v.theta.push_back({st.eigenvalues[i], st.error_estimate[i]});
  }
  v.torsion_ball = {tb.T, tb.T_error};
  v.torsion_theta = {tt.T, tt.T_error};
  v.sup_w_ball = {tb.sup_w, tb.sup_w_error};
  return v;
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::holds_within_budget: return "holds-within-budget";
    case Verdict::violated: return "violated";
    case Verdict::constant_unknown: return "constant-unknown";
    case Verdict::not_applicable: return "not-applicable";
    case Verdict::exploratory: return "exploratory";
  }
  return "?";
}

// --- records ----------------------------------------------------------------

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  if (lhs == 0.0) return kNaN;
  return lhs > 0.0 ? kInf : -kInf;
}

InequalityRecord base(std::string id, std::string domain, int k, double h, Estimate lhs, Estimate rhs) {
  InequalityRecord r;
  r.id = std::move(id);
  r.domain = std::move(domain);
  r.k = k;
  r.h = h;
  r.lhs = lhs.value;
  r.rhs_constant_free = rhs.value;
  r.lhs_error = lhs.error;
  r.rhs_error = rhs.error;
  return r;
}

InequalityRecord not_applicable(std::string id, std::string domain, int k, double h, std::string why) {
  InequalityRecord r = base(std::move(id), std::move(domain), k, h, {kNaN, 0.0}, {kNaN, 0.0});
  r.verdict = Verdict::not_applicable;
  r.notes.emplace_back("reason: " + why, kNaN);
  return r;
}

double kpow(int k, int d) { return std::pow(static_cast<double>(k), 2.0 + 4.0 / d); }

// the lambda_2 gap to Theta and the threshold under which it is noise
struct Gap {
  Estimate delta;
  double threshold;
  bool above() const { return delta.value > threshold; }
  bool below() const { return delta.value < -threshold; }
};

Gap lambda2_gap(const SetQuantities& omega, const ReferenceValues& ref, const BudgetPolicy& p) {
  Gap g;
  g.delta = omega.eig(2) - ref.theta_eig(2);
  g.threshold = std::max(g.delta.error, p.floor * ref.theta_eig(2).value);
  return g;
}

}  // namespace

InequalityRecord known_record(std::string id, std::string domain, int k, double h, Estimate lhs, Estimate rhs_cf,
                              double constant, const BudgetPolicy& policy) {
  InequalityRecord r = base(std::move(id), std::move(domain), k, h, lhs, rhs_cf);
  r.known_constant = constant;
  const double R = constant * rhs_cf.value;
  const double scale = std::max(std::abs(lhs.value), std::abs(R));
  const double abs_err = lhs.error + std::abs(constant) * rhs_cf.error;
  r.error_budget = scale > 0.0 ? std::max(abs_err / scale, policy.floor) : policy.floor;
  r.ratio = rhs_cf.value > 0.0 ? lhs.value / rhs_cf.value : kNaN;
  const double excess = lhs.value - R;
  if (std::isnan(excess)) r.verdict = Verdict::not_applicable;
  else if (excess <= 0.0) r.verdict = Verdict::holds;
  else if (excess <= r.error_budget * scale) r.verdict = Verdict::holds_within_budget;
  else r.verdict = Verdict::violated;
  return r;
}

InequalityRecord ratio_record(std::string id, std::string domain, int k, double h, Estimate lhs, Estimate rhs_cf,
                              const BudgetPolicy& policy) {
  InequalityRecord r = base(std::move(id), std::move(domain), k, h, lhs, rhs_cf);
  r.ratio = safe_ratio(lhs.value, rhs_cf.value);
  const double rel = (lhs.value != 0.0 ? lhs.relative() : 0.0) + rhs_cf.relative();
  r.error_budget = std::max(rel, policy.floor);
  r.verdict = Verdict::constant_unknown;
  return r;
}

InequalityRecord check_faber_krahn(const std::string& label, double h, const SetQuantities& omega,
                                   const ReferenceValues& ref, const BudgetPolicy& p) {
  auto r = known_record("FK", label, 1, h, ref.ball_eig(1), omega.eig(1), 1.0, p);
  r.theta_reference = theta_source_name(ref.source);
  return r;
}

InequalityRecord check_krahn_szego(const std::string& label, double h, const SetQuantities& omega,
                                   const ReferenceValues& ref, const BudgetPolicy& p) {
  auto r = known_record("KS", label, 2, h, ref.theta_eig(2), omega.eig(2), 1.0, p);
  r.theta_reference = theta_source_name(ref.source);
  return r;
}

InequalityRecord check_saint_venant(const std::string& label, double h, const SetQuantities& omega,
                                    const ReferenceValues& ref, const BudgetPolicy& p) {
  auto r = known_record("SVI", label, 0, h, omega.torsion, ref.torsion_ball, 1.0, p);
  r.theta_reference = theta_source_name(ref.source);
  return r;
}

InequalityRecord check_talenti(const std::string& label, double h, const SetQuantities& omega,
                               const ReferenceValues& ref, const BudgetPolicy& p) {
  auto r = known_record("Talenti", label, 0, h, omega.sup_w, ref.sup_w_ball, 1.0, p);
  r.theta_reference = theta_source_name(ref.source);
  return r;
}

InequalityRecord check_cheng_yang(const std::string& label, double h, const SetQuantities& omega, int dim, int k,
                                  const BudgetPolicy& p) {
  const double kk = std::pow(static_cast<double>(k), 2.0 / dim);
  auto r = known_record("CY", label, k, h, omega.eig(k), kk * omega.eig(1), 1.0 + 4.0 / dim, p);
  r.theta_reference = "none";
  return r;
}

InequalityRecord check_lemma_B(const std::string& label, double h, const SetQuantities& omega,
                               const SetQuantities& sub, int dim, int k, const BudgetPolicy& p) {
  const Estimate one = Estimate::exact(1.0);
  const Estimate lhs = one / omega.eig(k) - one / sub.eig(k);
  const Estimate rhs = static_cast<double>(k) * pow(omega.eig(k), dim / 2.0) * (omega.torsion - sub.torsion);
  auto r = known_record("LemmaB", label, k, h, lhs, rhs, reference::eigen_torsion_constant(), p);
  r.theta_reference = "none";
  return r;
}

InequalityRecord check_lemma_B_lower(const std::string& label, double h, const SetQuantities& omega,
                                     const SetQuantities& sub, int k, const BudgetPolicy& p) {
  const Estimate one = Estimate::exact(1.0);
  auto r = known_record("LemmaB-lower", label, k, h, one / sub.eig(k) - one / omega.eig(k), Estimate::exact(0.0),
                        1.0, p);
  r.ratio = kNaN;
  r.theta_reference = "none";
  return r;
}

InequalityRecord check_kohler_jobin(const std::string& label, double h, const SetQuantities& omega,
                                    const ReferenceValues& ref, int order, const BudgetPolicy& p) {
  if (order != 1 && order != 2) throw ArgumentError("Kohler-Jobin order must be 1 or 2");
  const int d = ref.dim;
  const double e = (d + 2.0) / 2.0;
  const Estimate lhs = order == 1 ? pow(ref.ball_eig(1), e) * ref.torsion_ball : pow(ref.theta_eig(2), e) * ref.torsion_theta;
  const Estimate rhs = pow(omega.eig(order), e) * omega.torsion;
  auto r = known_record(order == 1 ? "KJ1" : "KJ2", label, order, h, lhs, rhs, 1.0, p);
  r.theta_reference = theta_source_name(ref.source);
  return r;
}

InequalityRecord check_torvol(const std::string& label, double h, const SetQuantities& omega,
                              const SetQuantities& inside, Estimate outside_measure, int dim,
                              const BudgetPolicy& p) {
  auto r = known_record("torvol", label, 0, h, omega.torsion - inside.torsion, outside_measure,
                        reference::torsion_volume_constant(dim), p);
  r.theta_reference = "none";
  return r;
}

InequalityRecord check_decomposition(const std::string& label, double h, const SetQuantities& omega,
                                     const DecompositionQuantities& dq, const BudgetPolicy& p) {
  auto r = known_record("decomposition", label, 2, h, max(dq.lambda1_plus, dq.lambda1_minus), omega.eig(2), 1.0, p);
  r.theta_reference = "none";
  r.notes.emplace_back("lambda1_plus", dq.lambda1_plus.value);
  r.notes.emplace_back("lambda1_minus", dq.lambda1_minus.value);
  r.notes.emplace_back("source: " + dq.source, kNaN);
  if (dq.fell_back) r.notes.emplace_back("components split exceeded lambda2; nodal sets used", kNaN);
  return r;
}

InequalityRecord check_claim(const std::string& label, double h, const SetQuantities& omega,
                             const DecompositionQuantities& dq, const ReferenceValues& ref, const BudgetPolicy& p) {
  const int d = ref.dim;
  const double half = unit_ball_volume(d) / 2.0;
  if (!(dq.measure_minus.value < half && half < dq.measure_plus.value))
    return not_applicable("claim", label, 0, h, "piece measures do not straddle omega_d/2");
  const Estimate ball_plus =
      ref.ball_eig(1) * pow(Estimate::exact(unit_ball_volume(d)) / dq.measure_plus, 2.0 / d);
  auto r = known_record("claim", label, 0, h, omega.eig(2) - ball_plus, omega.eig(2) - ref.theta_eig(2), 2.0, p);
  r.theta_reference = theta_source_name(ref.source);
  r.notes.emplace_back("lambda1_ball_plus", ball_plus.value);
  r.notes.emplace_back("measure_plus", dq.measure_plus.value);
  r.notes.emplace_back("measure_minus", dq.measure_minus.value);
  return r;
}

namespace {

InequalityRecord theorem_record(std::string id, const std::string& label, double h, Estimate lhs, Estimate rhs,
                                const Gap& gap, const ReferenceValues& ref, const BudgetPolicy& p) {
  auto r = ratio_record(std::move(id), label, 0, h, lhs, rhs, p);
  r.theta_reference = theta_source_name(ref.source);
  r.notes.emplace_back("delta_lambda2", gap.delta.value);
  r.notes.emplace_back("delta_lambda2_threshold", gap.threshold);
  if (!gap.above()) {
    r.ratio = kNaN;
    r.notes.emplace_back("gap within budget; ratio not aggregated", kNaN);
  }
  return r;
}

void require_gap(const Gap& g, const std::string& label) {
  if (g.below())
    throw DiscretizationBiasError("lambda2('" + label + "') - lambda2(Theta) = " + std::to_string(g.delta.value) +
                                  " is below -" + std::to_string(g.threshold));
}

}  // namespace

InequalityRecord check_theorem1(const std::string& label, double h, const SetQuantities& omega,
                                const ReferenceValues& ref, int k, const BudgetPolicy& p) {
  const int d = ref.dim;
  const Gap g = lambda2_gap(omega, ref, p);
  require_gap(g, label);
  const Estimate lhs = abs(omega.eig(k) - ref.theta_eig(k));
  const Estimate rhs = kpow(k, d) * pow(omega.eig(2), d / (d + 1.0)) * pow(positive_part(g.delta), 1.0 / (d + 1.0));
  auto r = theorem_record("TH1", label, h, lhs, rhs, g, ref, p);
  r.k = k;
  return r;
}

InequalityRecord check_theorem2bis(const std::string& label, double h, const SetQuantities& omega,
                                   const ReferenceValues& ref, int k, const BudgetPolicy& p) {
  const Gap g = lambda2_gap(omega, ref, p);
  require_gap(g, label);
  const Estimate lhs = positive_part(omega.eig(k) - ref.theta_eig(k));
  const Estimate rhs = kpow(k, ref.dim) * pow(omega.eig(2), 0.5) * pow(positive_part(g.delta), 0.5);
  auto r = theorem_record("TH2bis", label, h, lhs, rhs, g, ref, p);
  r.k = k;
  return r;
}

InequalityRecord check_theorem2(const std::string& label, double h, const SetQuantities& omega,
                                const DecompositionQuantities& dq, const ReferenceValues& ref, int k,
                                const BudgetPolicy& p) {
  const Gap g = lambda2_gap(omega, ref, p);
  require_gap(g, label);
  const Estimate mx = max(dq.lambda1_plus, dq.lambda1_minus);
  const double slack = std::max(mx.error + omega.eig(2).error, p.floor * omega.eig(2).value);
  if (mx.value > omega.eig(2).value + slack)
    throw DecompositionError("decomposition of '" + label + "' has max lambda1 = " + std::to_string(mx.value) +
                             " above lambda2 = " + std::to_string(omega.eig(2).value));
  const Estimate lhs = abs(dq.pieces.eig(k) - ref.theta_eig(k));
  const Estimate rhs = kpow(k, ref.dim) * pow(omega.eig(2), 0.5) * pow(positive_part(g.delta), 0.5);
  auto r = theorem_record("TH2", label, h, lhs, rhs, g, ref, p);
  r.k = k;
  r.notes.emplace_back("max_lambda1_pieces", mx.value);
  r.notes.emplace_back("min_lambda1_pieces", min(dq.lambda1_plus, dq.lambda1_minus).value);
  return r;
}

InequalityRecord check_lambda1_stability(const std::string& label, double h, const SetQuantities& omega,
                                         const ReferenceValues& ref, int k, const BudgetPolicy& p) {
  const Estimate gap = omega.eig(1) - ref.ball_eig(1);
  const double threshold = std::max(gap.error, p.floor * ref.ball_eig(1).value);
  const Estimate lhs = abs(omega.eig(k) - ref.ball_eig(k));
  const Estimate rhs = kpow(k, ref.dim) * pow(omega.eig(1), 0.5) * pow(positive_part(gap), 0.5);
  auto r = ratio_record("lambda1-stability", label, k, h, lhs, rhs, p);
  r.theta_reference = theta_source_name(ref.source);
  r.notes.emplace_back("delta_lambda1", gap.value);
  if (!(gap.value > threshold)) {
    r.ratio = kNaN;
    r.notes.emplace_back("gap within budget; ratio not aggregated", kNaN);
  }
  return r;
}

std::pair<InequalityRecord, InequalityRecord> check_qFK_qKS(const std::string& label, double h,
                                                            const SetQuantities& omega, double f1, double f2,
                                                            const ReferenceValues& ref, const BudgetPolicy& p) {
  // asymmetry values below this are rasterization noise
  constexpr double zero_asymmetry = 5e-3;
  const int d = ref.dim;
  auto make = [&](std::string id, Estimate lhs, double f, double power) {
    auto r = ratio_record(std::move(id), label, 0, h, lhs, Estimate::exact(std::pow(f, power)), p);
    r.theta_reference = theta_source_name(ref.source);
    r.notes.emplace_back("asymmetry", f);
    const double threshold = std::max(lhs.error, p.floor);
    const bool gap = lhs.value > threshold;
    if (f < zero_asymmetry) {
      if (gap) {
        r.ratio = kInf;
        r.notes.emplace_back("zero asymmetry with a strict eigenvalue gap", kNaN);
      } else {
        r.ratio = kNaN;
        r.notes.emplace_back("equality case", kNaN);
      }
    } else if (!gap) {
      r.ratio = kNaN;
      r.notes.emplace_back("deficit within budget; ratio not aggregated", kNaN);
    }
    return r;
  };
  auto fk = make("qFK", omega.eig(1) / ref.ball_eig(1) - Estimate::exact(1.0), f1, 2.0);
  fk.k = 1;
  auto ks = make("qKS", omega.eig(2) / ref.theta_eig(2) - Estimate::exact(1.0), f2, d + 1.0);
  ks.k = 2;
  return {fk, ks};
}

InequalityRecord check_torsion_qks(const std::string& label, double h, const SetQuantities& omega,
                                   const DecompositionQuantities& dq, const ReferenceValues& ref,
                                   const BudgetPolicy& p) {
  if (!(omega.eig(2).value <= 2.0 * ref.theta_eig(2).value))
    return not_applicable("torsion-qKS", label, 2, h, "lambda2 above twice lambda2(Theta)");
  const Estimate lhs = (omega.eig(2) - ref.theta_eig(2)) / ref.theta_eig(2);
  Estimate deficit = (omega.torsion - dq.pieces.torsion) / omega.torsion;
  const bool zero = std::abs(deficit.value) <= std::max(deficit.error, 1e-12);
  if (zero) deficit = Estimate::exact(0.0);
  auto r = ratio_record("torsion-qKS", label, 2, h, lhs, deficit * deficit, p);
  if (zero) r.notes.emplace_back("torsion deficit of the decomposition is zero", kNaN);
  r.verdict = Verdict::exploratory;
  r.theta_reference = theta_source_name(ref.source);
  return r;
}

// --- evaluation ---------------------------------------------------------

namespace {

struct Level {
  std::shared_ptr<const GridDomain> omega;
  SpectrumResult spec;
  TorsionResult tors;
};

SpectrumResult solve_level(const GridDomain& d, int k, const SolveOptions& opts, const SpectrumResult* coarse) {
  SolveOptions o = opts;
  if (coarse && coarse->domain) {
    o.eigen.start.clear();
    for (const auto& u : coarse->eigenfunctions) o.eigen.start.push_back(prolongate(*coarse->domain, u, d));
  }
  return spectrum(d, k, o);
}

int usable_k(const GridDomain& d, int k) {
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(k), d.cell_count() - 1));
}

// The two pieces are separate open sets: Dirichlet conditions hold across
// the interface, so the union's spectrum is the sorted merge of the pieces'.
struct PieceLevel {
  std::vector<double> lambda;
  double torsion = 0.0;
  double measure = 0.0;
};

Point centroid(const GridDomain& g) {
  Point c{};
  const auto cells = g.interior_cells();
  for (std::size_t i : cells) {
    const Point p = g.frame().center(i);
    for (int a = 0; a < 3; ++a) c[a] += p[a];
  }
  for (auto& x : c) x /= static_cast<double>(std::max<std::size_t>(cells.size(), 1));
  return c;
}

double distance(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]); }

// "+" is the larger piece at each level; when the pieces have nearly equal
// measure the two levels can disagree, so match the fine pieces to the
// coarse ones by position
void align_pieces(const Decomposition& coarse, Decomposition& fine) {
  const Point cp = centroid(coarse.omega_plus), cm = centroid(coarse.omega_minus);
  const Point fp = centroid(fine.omega_plus), fm = centroid(fine.omega_minus);
  if (distance(fp, cp) + distance(fm, cm) <= distance(fp, cm) + distance(fm, cp)) return;
  std::swap(fine.omega_plus, fine.omega_minus);
  std::swap(fine.lambda1_plus, fine.lambda1_minus);
}

PieceLevel piece_level(const Decomposition& dec, int k, const SolveOptions& opts) {
  PieceLevel p;
  for (const GridDomain* g : {&dec.omega_plus, &dec.omega_minus}) {
    if (g->cell_count() == 1) {
      p.lambda.push_back(2.0 * g->dim() / (g->h() * g->h()));
    } else {
      const auto s = spectrum(*g, usable_k(*g, k), opts);
      p.lambda.insert(p.lambda.end(), s.eigenvalues.begin(), s.eigenvalues.end());
    }
    p.torsion += torsion(*g, opts).T;
    p.measure += g->measure();
  }
  std::sort(p.lambda.begin(), p.lambda.end());
  if (static_cast<int>(p.lambda.size()) > k) p.lambda.resize(static_cast<std::size_t>(k));
  return p;
}

}  // namespace

DomainEvaluation evaluate(const DomainSpec& spec, const HarnessOptions& opts) {
  if (opts.k_max < 2) throw ArgumentError("k_max must be at least 2");
  DomainEvaluation ev;
  ev.label = spec.label;
  ev.dim = spec.shape.dim();
  ev.h = opts.h;
  const int d = ev.dim;
  const int k = opts.k_max;
  const double hs[2] = {opts.h, opts.h / 2.0};

  std::array<std::optional<GridDomain>, 2> omega;
  std::array<SpectrumResult, 2> spec_;
  std::array<TorsionResult, 2> tors;
  for (int l = 0; l < 2; ++l) {
    omega[l].emplace(rasterize(spec.shape, hs[l], spec.label));
    omega[l]->require_nonempty();
    spec_[l] = solve_level(*omega[l], k, opts.solve, l == 1 ? &spec_[0] : nullptr);
    tors[l] = torsion(*omega[l], opts.solve);
  }
  ev.omega = combine(spec_[0], spec_[1], tors[0], tors[1]);
  ev.cells_fine = omega[1]->cell_count();

  // decomposition at both levels
  try {
    DecomposeOptions dopt;
    dopt.solve = opts.solve;
    dopt.budget = opts.budget.floor;
    std::array<std::optional<Decomposition>, 2> dec;
    std::array<PieceLevel, 2> pl;
    for (int l = 0; l < 2; ++l) {
      dec[l].emplace(decompose(*omega[l], spec_[l], dopt));
      if (l == 1) align_pieces(*dec[0], *dec[1]);
      pl[l] = piece_level(*dec[l], k, opts.solve);
    }
    if (static_cast<int>(std::min(pl[0].lambda.size(), pl[1].lambda.size())) < k)
      throw DecompositionError("decomposition pieces too small for k_max");
    DecompositionQuantities dq;
    dq.lambda1_plus = Estimate::richardson(dec[0]->lambda1_plus, dec[1]->lambda1_plus);
    dq.lambda1_minus = Estimate::richardson(dec[0]->lambda1_minus, dec[1]->lambda1_minus);
    const double mp = dec[1]->omega_plus.measure(), mm = dec[1]->omega_minus.measure();
    dq.measure_plus = {mp, std::abs(mp - dec[0]->omega_plus.measure())};
    dq.measure_minus = {mm, std::abs(mm - dec[0]->omega_minus.measure())};
    for (int i = 0; i < k; ++i)
      dq.pieces.lambda.push_back(Estimate::richardson(pl[0].lambda[static_cast<std::size_t>(i)],
                                                      pl[1].lambda[static_cast<std::size_t>(i)]));
    dq.pieces.torsion = Estimate::richardson(pl[0].torsion, pl[1].torsion);
    dq.pieces.measure = {pl[1].measure, std::abs(pl[1].measure - pl[0].measure)};
    dq.pieces.has_torsion = true;
    dq.source = std::string(source_name(dec[1]->source));
    dq.fell_back = dec[1]->fell_back;
    ev.decomposition = std::move(dq);
  } catch (const Error& e) {
    ev.decomposition_error = e.what();
  }

  // asymmetries and the two-ball witness, sized for measure omega_d
  AsymmetryOptions aopt = opts.asymmetry;
  aopt.reference_measure = unit_ball_volume(d);
  ev.f1 = fraenkel1(*omega[1], aopt);
  ev.f2 = fraenkel2(*omega[1], aopt);
  ev.witness = *ev.f2.pair;

  std::array<SpectrumResult, 2> sspec;
  std::array<TorsionResult, 2> stors;
  std::array<double, 2> outside{};
  bool ok = true;
  for (int l = 0; l < 2 && ok; ++l) {
    const GridDomain w = rasterize(ev.witness.shape(), omega[l]->frame());
    const GridDomain in = intersect(*omega[l], w);
    outside[l] = set_minus(*omega[l], w).measure();
    if (static_cast<int>(in.cell_count()) <= k) {
      ok = false;
      break;
    }
    sspec[l] = in.mask() == omega[l]->mask() ? spec_[l] : solve_level(in, k, opts.solve, nullptr);
    stors[l] = in.mask() == omega[l]->mask() ? tors[l] : torsion(in, opts.solve);
  }
  if (ok) {
    ev.inside = combine(sspec[0], sspec[1], stors[0], stors[1]);
    ev.outside_measure = {outside[1], std::abs(outside[1] - outside[0])};
  }
  return ev;
}

std::vector<InequalityRecord> check_all(const DomainEvaluation& ev, const ReferenceValues& ref,
                                        const HarnessOptions& opts, std::vector<DomainFailure>* failures) {
  std::vector<InequalityRecord> out;
  const auto& p = opts.budget;
  const std::string& L = ev.label;
  const double h = ev.h;
  const int k_max = std::min<int>(opts.k_max, static_cast<int>(ev.omega.lambda.size()));

  auto guarded = [&](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (!failures) throw;
      failures->push_back({L, std::string(what) + ": " + e.what()});
    }
  };

  out.push_back(check_faber_krahn(L, h, ev.omega, ref, p));
  out.push_back(check_krahn_szego(L, h, ev.omega, ref, p));
  out.push_back(check_saint_venant(L, h, ev.omega, ref, p));
  out.push_back(check_talenti(L, h, ev.omega, ref, p));
  out.push_back(check_kohler_jobin(L, h, ev.omega, ref, 1, p));
  out.push_back(check_kohler_jobin(L, h, ev.omega, ref, 2, p));
  for (int k = 1; k <= k_max; ++k) {
    out.push_back(check_cheng_yang(L, h, ev.omega, ev.dim, k, p));
    out.push_back(check_lambda1_stability(L, h, ev.omega, ref, k, p));
    if (ev.inside) {
      out.push_back(check_lemma_B(L, h, ev.omega, *ev.inside, ev.dim, k, p));
      out.push_back(check_lemma_B_lower(L, h, ev.omega, *ev.inside, k, p));
    } else {
      out.push_back(not_applicable("LemmaB", L, k, h, "witness intersection too small"));
      out.push_back(not_applicable("LemmaB-lower", L, k, h, "witness intersection too small"));
    }
    guarded("TH1", [&] { out.push_back(check_theorem1(L, h, ev.omega, ref, k, p)); });
    guarded("TH2bis", [&] { out.push_back(check_theorem2bis(L, h, ev.omega, ref, k, p)); });
    if (ev.decomposition)
      guarded("TH2", [&] { out.push_back(check_theorem2(L, h, ev.omega, *ev.decomposition, ref, k, p)); });
  }
  if (ev.inside) out.push_back(check_torvol(L, h, ev.omega, *ev.inside, ev.outside_measure, ev.dim, p));
  else out.push_back(not_applicable("torvol", L, 0, h, "witness intersection too small"));
  if (ev.decomposition) {
    out.push_back(check_decomposition(L, h, ev.omega, *ev.decomposition, p));
    out.push_back(check_claim(L, h, ev.omega, *ev.decomposition, ref, p));
    out.push_back(check_torsion_qks(L, h, ev.omega, *ev.decomposition, ref, p));
  } else if (failures) {
    failures->push_back({L, "decomposition: " + ev.decomposition_error});
  } else {
    throw DecompositionError(ev.decomposition_error);
  }
  auto [fk, ks] = check_qFK_qKS(L, h, ev.omega, ev.f1.value, ev.f2.value, ref, p);
  out.push_back(std::move(fk));
  out.push_back(std::move(ks));

  std::stable_sort(out.begin(), out.end(), [](const InequalityRecord& a, const InequalityRecord& b) {
    return std::tie(a.id, a.k) < std::tie(b.id, b.k);
  });
  return out;
}

// --- sweeps -----------------------------------------------------------------

bool is_known_constant_id(std::string_view id) {
  static const std::string_view ids[] = {"FK",  "KS",  "SVI", "Talenti",       "CY",   "LemmaB", "LemmaB-lower",
                                         "torvol", "KJ1", "KJ2", "decomposition", "claim"};
  return std::find(std::begin(ids), std::end(ids), id) != std::end(ids);
}

std::size_t SweepReport::violations() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.verdict == Verdict::violated;
  return n;
}

const Aggregate* SweepReport::aggregate(std::string_view id) const {
  for (const auto& a : aggregates)
    if (a.id == id) return &a;
  return nullptr;
}

std::vector<Aggregate> aggregate(const std::vector<InequalityRecord>& records) {
  std::map<std::string, Aggregate> by_id;
  for (const auto& r : records) {
    Aggregate& a = by_id[r.id];
    a.id = r.id;
    ++a.rows;
    a.violations += r.verdict == Verdict::violated;
    a.within_budget += r.verdict == Verdict::holds_within_budget;
    if (std::isinf(r.ratio)) ++a.infinite;
    if (!std::isfinite(r.ratio)) continue;
    ++a.finite;
    if (std::isnan(a.max_ratio) || r.ratio > a.max_ratio) {
      a.max_ratio = r.ratio;
      a.argmax_domain = r.domain;
      a.argmax_k = r.k;
      a.argmax_budget = r.error_budget;
    }
    if (std::isnan(a.min_ratio) || r.ratio < a.min_ratio) a.min_ratio = r.ratio;
  }
  std::vector<Aggregate> out;
  for (auto& [id, a] : by_id) out.push_back(std::move(a));
  return out;
}

SweepReport sweep(const std::vector<DomainSpec>& corpus, const HarnessOptions& opts, unsigned jobs) {
  if (corpus.empty()) throw ArgumentError("sweep: empty corpus");
  const int dim = corpus.front().shape.dim();
  for (const auto& s : corpus)
    if (s.shape.dim() != dim) throw ArgumentError("sweep: corpus mixes dimensions");
  const ReferenceValues ref =
      opts.theta == ThetaSource::analytic ? analytic_references(dim, opts.k_max) : grid_references(dim, opts.k_max, opts.h, opts.solve);

  struct Slot {
    std::optional<DomainEvaluation> ev;
    std::vector<InequalityRecord> records;
    std::vector<DomainFailure> failures;
  };
  std::vector<Slot> slots(corpus.size());
  parallel_for(corpus.size(), jobs, [&](std::size_t i) {
    Slot& s = slots[i];
    try {
      s.ev.emplace(evaluate(corpus[i], opts));
      s.records = check_all(*s.ev, ref, opts, &s.failures);
    } catch (const std::exception& e) {
      s.failures.push_back({corpus[i].label, e.what()});
    }
  });

  SweepReport rep;
  rep.h = opts.h;
  rep.k_max = opts.k_max;
  for (auto& s : slots) {
    for (auto& r : s.records) rep.records.push_back(std::move(r));
    for (auto& f : s.failures) rep.failures.push_back(std::move(f));
    if (s.ev) rep.evaluations.push_back(std::move(*s.ev));
  }
  std::stable_sort(rep.records.begin(), rep.records.end(), [](const InequalityRecord& a, const InequalityRecord& b) {
    return std::tie(a.id, a.domain, a.k) < std::tie(b.id, b.domain, b.k);
  });
  rep.aggregates = aggregate(rep.records);
  return rep;
}

std::vector<StabilityRow> compare_stability(const SweepReport& coarse, const SweepReport& fine,
                                            const std::vector<std::string>& ids) {
  std::vector<StabilityRow> out;
  for (const auto& id : ids) {
    StabilityRow row;
    row.id = id;
    const Aggregate* a = coarse.aggregate(id);
    const Aggregate* b = fine.aggregate(id);
    row.coarse = a ? a->max_ratio : kNaN;
    row.fine = b ? b->max_ratio : kNaN;
    row.budget = (a ? a->argmax_budget : 0.0) + (b ? b->argmax_budget : 0.0);
    const double scale = std::max(std::abs(row.coarse), std::abs(row.fine));
    row.change = scale > 0.0 ? std::abs(row.fine - row.coarse) / scale : 0.0;
    row.stable = std::isfinite(row.coarse) && std::isfinite(row.fine) && row.change < row.budget;
    out.push_back(row);
  }
  return out;
}

}  // namespace speclab
