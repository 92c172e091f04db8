#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace fairprice {

/// Probability mass over the 8 cells (Y, Yhat, S) in {0,1}^3. The substrate
/// for checking which fairness criteria a joint distribution satisfies.
struct JointPMF {
  // p[y][yhat][s]
  double p[2][2][2] = {};

  void validate(double tol = 1e-9) const;  // nonnegative, sums to 1

  double p_s(int s) const;
  double p_y(int y) const;
  double p_yhat1_given_s(int s) const;       // acceptance rate a(s)
  double p_y1_given_s(int s) const;          // base rate
  double p_yhat1_given_ys(int y, int s) const;
  double p_y_given_yhat_s(int y, int yhat, int s) const;

  double base_rate_gap() const;  // |P(Y=1|S=0) - P(Y=1|S=1)|
};

enum class CriterionStatus { Holds, Fails, Vacuous };

struct CriteriaFlags {
  CriterionStatus sp = CriterionStatus::Vacuous;
  CriterionStatus eo = CriterionStatus::Vacuous;
  // Predictive parity as full conditional independence Y _|_ S | Yhat
  // (PPV and NPV equality), the statement Prop. 3's proof relies on.
  CriterionStatus pp = CriterionStatus::Vacuous;
  // The weaker PPV-only display; exposed separately because SP and PPV-only
  // parity can coexist with unequal base rates while the full version cannot.
  CriterionStatus pp_ppv_only = CriterionStatus::Vacuous;
};

CriteriaFlags criteria_satisfied(const JointPMF& j, double tol);

struct BaseRateIdentity {
  // PPV*FPR / (PPV*FPR + (1-PPV)*TPR); unset when the denominator is 0
  // (perfect prediction, the indeterminate 0/0 case).
  std::optional<double> implied_base_rate;
};

// Implied base rate per group from the rate triple (tpr, fpr, ppv).
std::array<BaseRateIdentity, 2> base_rate_identities(
    const std::array<double, 2>& tpr, const std::array<double, 2>& fpr,
    const std::array<double, 2>& ppv);

enum class CriterionPair { SP_EO, SP_PP, EO_PP };

struct WitnessResult {
  std::optional<JointPMF> witness;
  std::uint64_t examined = 0;
  // For certified-empty results: what degeneracy every near-witness exhibits.
  std::string note;
};

struct WitnessSearchOptions {
  double grid_step = 0.05;   // resolution over the 7-simplex
  double tol = 1e-9;         // criteria tolerance
  // extra structural requirement for SP_EO: only accept witnesses whose
  // common TPR and FPR differ by at least this much (0 = no requirement)
  double min_tpr_fpr_gap = 0.0;
  int threads = 0;           // 0 = hardware_concurrency (capped by caller)
};

// Grid search over valid JointPMFs for one satisfying both criteria of the
// pair with |base-rate gap| >= delta. SP_PP uses the PPV-only variant (the
// full-independence version has no unequal-base-rate witnesses). EO_PP is
// restricted to pmfs with a true and a false positive in each group; outside
// that regime perfect prediction satisfies both criteria trivially and the
// base-rate identity degenerates to 0/0. Results are
// merged in lexicographic cell order, so the returned witness is
// deterministic regardless of thread count.
WitnessResult impossibility_witness_search(CriterionPair pair, double delta,
                                           const WitnessSearchOptions& opts = {});

// Constructive SP + PPV-only-PP witness with base rates (b0, b1): TPR ratio
// set to the reciprocal base-rate ratio, FPRs chosen to equalize acceptance.
JointPMF construct_sp_pp_witness(double b0, double b1, double pi1, double tpr1);

std::string to_string(CriterionStatus s);

}  // namespace fairprice
