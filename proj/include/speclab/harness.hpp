#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "speclab/asymmetry.hpp"
#include "speclab/geometry.hpp"
#include "speclab/nodal.hpp"
#include "speclab/operators.hpp"

namespace speclab {

/// A value with an absolute error bound, propagated to first order.
struct Estimate {
  double value = 0.0;
  double error = 0.0;

  static Estimate exact(double v) { return {v, 0.0}; }
  /// Richardson pair: 2 fine - coarse, error |fine - coarse|.
  static Estimate richardson(double coarse, double fine) { return {2.0 * fine - coarse, std::abs(fine - coarse)}; }
  double relative() const {
    if (error == 0.0) return 0.0;
    return value == 0.0 ? std::numeric_limits<double>::infinity() : error / std::abs(value);
  }
};

Estimate operator+(Estimate a, Estimate b);
Estimate operator-(Estimate a, Estimate b);
Estimate operator*(Estimate a, Estimate b);
Estimate operator/(Estimate a, Estimate b);
Estimate operator*(double s, Estimate a);
Estimate pow(Estimate a, double p);
Estimate abs(Estimate a);
/// max(a, 0)
Estimate positive_part(Estimate a);
Estimate max(Estimate a, Estimate b);
Estimate min(Estimate a, Estimate b);

/// Extrapolated quantities of one set.
struct SetQuantities {
  std::vector<Estimate> lambda;  // lambda_1..lambda_k
  Estimate torsion;
  Estimate sup_w;
  Estimate boundary_grad;
  Estimate measure;
  bool has_torsion = false;

  const Estimate& eig(int k) const { return lambda.at(static_cast<std::size_t>(k - 1)); }
};

SetQuantities combine(const SpectrumResult& coarse, const SpectrumResult& fine);
SetQuantities combine(const SpectrumResult& coarse, const SpectrumResult& fine, const TorsionResult& tc,
                      const TorsionResult& tf);

enum class ThetaSource { analytic, grid };
std::string_view theta_source_name(ThetaSource s);

/// Ball and two-ball values of measure omega_d that every comparison uses.
struct ReferenceValues {
  int dim = 2;
  ThetaSource source = ThetaSource::analytic;
  std::vector<Estimate> ball;   // lambda_k(B)
  std::vector<Estimate> theta;  // lambda_k(Theta)
  Estimate torsion_ball, torsion_theta, sup_w_ball;

  const Estimate& ball_eig(int k) const { return ball.at(static_cast<std::size_t>(k - 1)); }
  const Estimate& theta_eig(int k) const { return theta.at(static_cast<std::size_t>(k - 1)); }
};

ReferenceValues analytic_references(int dim, int count);
/// Same values solved on the ladder (h, h/2), for cross-validation.
ReferenceValues grid_references(int dim, int count, double h, const SolveOptions& solve = {});

enum class Verdict { holds, holds_within_budget, violated, constant_unknown, not_applicable, exploratory };
std::string_view verdict_name(Verdict v);

struct InequalityRecord {
  std::string id;
  std::string domain;
  int k = 0;  // 0 when the check has no index
  double h = 0.0;
  double lhs = 0.0;
  double rhs_constant_free = 0.0;
  std::optional<double> known_constant;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double error_budget = 0.0;
  Verdict verdict = Verdict::constant_unknown;
  std::string theta_reference = "analytic";
  double lhs_error = 0.0;
  double rhs_error = 0.0;
  /// named side quantities kept for the JSON report
  std::vector<std::pair<std::string, double>> notes;
};

struct BudgetPolicy {
  double floor = 0.01;
};

/// lhs <= K rhs with K known. Budget = max(rel(lhs) + rel(rhs), floor);
/// violated only when lhs exceeds K rhs by more than the budget allows
/// (relative to K rhs, with the absolute propagated errors as slack).
InequalityRecord known_record(std::string id, std::string domain, int k, double h, Estimate lhs, Estimate rhs_cf,
                              double constant, const BudgetPolicy& policy = {});
/// Ratio-only record for non-explicit constants.
InequalityRecord ratio_record(std::string id, std::string domain, int k, double h, Estimate lhs, Estimate rhs_cf,
                              const BudgetPolicy& policy = {});

// --- individual checks --------------------------------------------------

InequalityRecord check_faber_krahn(const std::string& label, double h, const SetQuantities& omega,
                                   const ReferenceValues& ref, const BudgetPolicy& p = {});
InequalityRecord check_krahn_szego(const std::string& label, double h, const SetQuantities& omega,
                                   const ReferenceValues& ref, const BudgetPolicy& p = {});
InequalityRecord check_saint_venant(const std::string& label, double h, const SetQuantities& omega,
                                    const ReferenceValues& ref, const BudgetPolicy& p = {});
InequalityRecord check_talenti(const std::string& label, double h, const SetQuantities& omega,
                               const ReferenceValues& ref, const BudgetPolicy& p = {});
InequalityRecord check_cheng_yang(const std::string& label, double h, const SetQuantities& omega, int dim, int k,
                                  const BudgetPolicy& p = {});
/// Upper half of the two-sided bound on 1/lambda_k(Omega) - 1/lambda_k(Omega').
InequalityRecord check_lemma_B(const std::string& label, double h, const SetQuantities& omega,
                               const SetQuantities& sub, int dim, int k, const BudgetPolicy& p = {});
/// Lower half: 1/lambda_k(Omega') - 1/lambda_k(Omega) <= 0.
InequalityRecord check_lemma_B_lower(const std::string& label, double h, const SetQuantities& omega,
                                     const SetQuantities& sub, int k, const BudgetPolicy& p = {});
InequalityRecord check_kohler_jobin(const std::string& label, double h, const SetQuantities& omega,
                                    const ReferenceValues& ref, int order, const BudgetPolicy& p = {});
/// T(Omega) - T(Omega cap Theta) <= c_d |Omega minus Theta|.
InequalityRecord check_torvol(const std::string& label, double h, const SetQuantities& omega,
                              const SetQuantities& inside, Estimate outside_measure, int dim,
                              const BudgetPolicy& p = {});

/// Extrapolated data of a decomposition.
struct DecompositionQuantities {
  Estimate lambda1_plus, lambda1_minus;
  Estimate measure_plus, measure_minus;
  SetQuantities pieces;  // the union of the two pieces
  std::string source;
  bool fell_back = false;
};

InequalityRecord check_decomposition(const std::string& label, double h, const SetQuantities& omega,
                                     const DecompositionQuantities& dq, const BudgetPolicy& p = {});
InequalityRecord check_claim(const std::string& label, double h, const SetQuantities& omega,
                             const DecompositionQuantities& dq, const ReferenceValues& ref,
                             const BudgetPolicy& p = {});
/// Throws DiscretizationBiasError when lambda_2(Omega) falls below
/// lambda_2(Theta) beyond the budget.
InequalityRecord check_theorem1(const std::string& label, double h, const SetQuantities& omega,
                                const ReferenceValues& ref, int k, const BudgetPolicy& p = {});
InequalityRecord check_theorem2(const std::string& label, double h, const SetQuantities& omega,
                                const DecompositionQuantities& dq, const ReferenceValues& ref, int k,
                                const BudgetPolicy& p = {});
InequalityRecord check_theorem2bis(const std::string& label, double h, const SetQuantities& omega,
                                   const ReferenceValues& ref, int k, const BudgetPolicy& p = {});
InequalityRecord check_lambda1_stability(const std::string& label, double h, const SetQuantities& omega,
                                         const ReferenceValues& ref, int k, const BudgetPolicy& p = {});
/// (lambda_1/lambda_1(B) - 1)/F1^2 and (lambda_2/lambda_2(Theta) - 1)/F2^{d+1}.
std::pair<InequalityRecord, InequalityRecord> check_qFK_qKS(const std::string& label, double h,
                                                            const SetQuantities& omega, double f1, double f2,
                                                            const ReferenceValues& ref, const BudgetPolicy& p = {});
/// Torsion deficit of the decomposition against the lambda_2 gap; no verdict.
InequalityRecord check_torsion_qks(const std::string& label, double h, const SetQuantities& omega,
                                   const DecompositionQuantities& dq, const ReferenceValues& ref,
                                   const BudgetPolicy& p = {});

// --- per-domain evaluation and sweeps -------------------------------------

/// An analytic open set of measure omega_d.
struct DomainSpec {
  std::string label;
  Shape shape;
};

struct HarnessOptions {
  int k_max = 6;
  double h = 1.0 / 32.0;  // coarse spacing; the fine level is h/2
  SolveOptions solve{};
  BudgetPolicy budget{};
  AsymmetryOptions asymmetry{};
  ThetaSource theta = ThetaSource::analytic;
};

struct DomainEvaluation {
  std::string label;
  int dim = 2;
  double h = 0.0;
  SetQuantities omega;
  std::optional<DecompositionQuantities> decomposition;
  std::string decomposition_error;
  AsymmetryResult f1, f2;
  /// witness pair with balls of measure omega_d/2
  TwoBallConfig witness;
  std::optional<SetQuantities> inside;  // Omega cap witness
  Estimate outside_measure;              // |Omega minus witness|
  std::size_t cells_fine = 0;
};

DomainEvaluation evaluate(const DomainSpec& spec, const HarnessOptions& opts);
struct DomainFailure {
  std::string domain;
  std::string error;
};

/// All checks for one evaluated domain, sorted by (id, k). Check errors are
/// appended to `failures` when given, thrown otherwise.
std::vector<InequalityRecord> check_all(const DomainEvaluation& ev, const ReferenceValues& ref,
                                        const HarnessOptions& opts, std::vector<DomainFailure>* failures = nullptr);

struct Aggregate {
  std::string id;
  std::size_t rows = 0;
  std::size_t violations = 0;
  std::size_t within_budget = 0;
  std::size_t infinite = 0;  // ratio = inf, e.g. zero asymmetry with a gap
  std::size_t finite = 0;
  double max_ratio = std::numeric_limits<double>::quiet_NaN();
  double min_ratio = std::numeric_limits<double>::quiet_NaN();
  std::string argmax_domain;
  int argmax_k = 0;
  double argmax_budget = 0.0;
};

struct SweepReport {
  double h = 0.0;
  int k_max = 0;
  std::vector<InequalityRecord> records;
  std::vector<Aggregate> aggregates;
  std::vector<DomainFailure> failures;
  std::vector<DomainEvaluation> evaluations;

  std::size_t violations() const;
  const Aggregate* aggregate(std::string_view id) const;
};

/// Ids whose constant is known and must never be violated.
bool is_known_constant_id(std::string_view id);

/// Parallel over domains on `jobs` workers (0 = hardware concurrency).
/// Records are merged in (id, domain, k) order regardless of scheduling.
SweepReport sweep(const std::vector<DomainSpec>& corpus, const HarnessOptions& opts, unsigned jobs = 0);
std::vector<Aggregate> aggregate(const std::vector<InequalityRecord>& records);

struct StabilityRow {
  std::string id;
  double coarse = 0.0;  // empirical constant at ladder h
  double fine = 0.0;    // at ladder h/2
  double change = 0.0;  // |fine - coarse| / max(|coarse|, |fine|)
  double budget = 0.0;  // sum of the budgets of the two maximizing rows
  bool stable = false;
};

std::vector<StabilityRow> compare_stability(const SweepReport& coarse, const SweepReport& fine,
                                            const std::vector<std::string>& ids);

}  // namespace speclab
