#include "veriq/incentives.hpp"

#include <cmath>
#include <limits>

#include "veriq/error.hpp"

namespace veriq {

namespace {

void require(bool ok, const std::string& inequality) {
  if (!ok) throw ConfigError("game config violates " + inequality);
}

bool finite_all(const GameConfig& c) {
  for (double v : {c.price, c.cost_honest, c.cost_cheat, c.fine, c.info_honest,
                   c.info_cheat, c.audit_cost, c.verify_cost, c.alpha,
                   c.rates.p_tp, c.rates.p_tn, c.rates.p_fp, c.rates.p_fn})
    if (!std::isfinite(v)) return false;
  return true;
}

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

double info(const GameConfig& c, Action a) {
  return a == Action::Honest ? c.info_honest : c.info_cheat;
}

double cost(const GameConfig& c, Action a) {
  return a == Action::Honest ? c.cost_honest : c.cost_cheat;
}

TwoCloudTable two_cloud_unchecked(const GameConfig& c, Contract contract,
                                  AuditAccounting accounting) {
  TwoCloudTable t;
  t.contract = contract;
  t.accounting = accounting;
  const double a = c.alpha;
  const double P = c.price;
  const double F = c.fine;

  for (Action x : {Action::Honest, Action::Cheat}) {
    for (Action y : {Action::Honest, Action::Cheat}) {
      PlayerUtilities& u = t.at(x, y);
      if (x == Action::Honest && y == Action::Honest) {
        u.owner = c.info_honest - (1 + a) * P;
        u.s1 = u.s2 = 0.5 * (1 + a) * (P - c.cost_honest);
        continue;
      }
      // Any profile with a cheat mismatches when duplicated. A duplicated,
      // mismatched round voids both payments and both computations.
      const double infos = info(c, x) + info(c, y);
      const double undetected_owner = 0.5 * infos - P;
      const double s1_base = 0.5 * (1 - a) * (P - cost(c, x));
      const double s2_base = 0.5 * (1 - a) * (P - cost(c, y));
      if (contract == Contract::One) {
        u.owner = a * (2 * F + infos) + (1 - a) * undetected_owner;
        u.s1 = s1_base - a * F;
        u.s2 = s2_base - a * F;
      } else {
        const int cheaters =
            (x == Action::Cheat ? 1 : 0) + (y == Action::Cheat ? 1 : 0);
        const double reimbursed =
            accounting == AuditAccounting::CheaterReimburses ? c.audit_cost : 0.0;
        const double penalty = F + reimbursed / cheaters;
        u.owner = a * (cheaters * F + infos - c.audit_cost + reimbursed) +
                  (1 - a) * undetected_owner;
        u.s1 = s1_base - (x == Action::Cheat ? a * penalty : 0.0);
        u.s2 = s2_base - (y == Action::Cheat ? a * penalty : 0.0);
      }
    }
  }
  return t;
}

SingleCloudTable single_cloud_unchecked(const GameConfig& c) {
  SingleCloudTable t;
  t.alpha = c.alpha;
  const double P = c.price;
  const auto& r = c.rates;

  t.server_nh = P - c.cost_honest;
  t.server_vh = P - c.cost_honest;
  t.server_nc = P - c.cost_cheat;
  t.server_vc = r.p_fp * P - c.cost_cheat - r.p_tn * (c.audit_cost + c.fine);

  t.owner_nh = c.info_honest - P;
  t.owner_vh = c.info_honest - P - c.verify_cost - r.p_fn * c.audit_cost;
  t.owner_nc = c.info_cheat - P;
  // The owner pays C(A) and collects F + C(A) from a caught cheater.
  t.owner_vc = c.info_cheat - c.verify_cost + r.p_tn * c.fine - r.p_fp * P;

  const double a = c.alpha;
  t.honest.owner = a * t.owner_vh + (1 - a) * t.owner_nh;
  t.honest.s1 = a * t.server_vh + (1 - a) * t.server_nh;
  t.cheat.owner = a * t.owner_vc + (1 - a) * t.owner_nc;
  t.cheat.s1 = a * t.server_vc + (1 - a) * t.server_nc;
  return t;
}

bool approx_ge(double lhs, double rhs) {
  const double tol = 1e-9 * (1.0 + std::fabs(lhs) + std::fabs(rhs));
  return lhs - rhs >= -tol;
}

RationalityCheck make_check(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, lhs - rhs, approx_ge(lhs, rhs)};
}

}  // namespace

void validate(const GameConfig& c, GameForm form) {
  require(finite_all(c), "finiteness of every field");
  require(in_unit(c.alpha), "0 <= alpha <= 1");
  require(c.fine >= 0, "F >= 0");
  require(c.cost_cheat >= 0, "C(Q') >= 0");
  require(c.cost_cheat <= c.cost_honest, "C(Q') <= C(Q)");
  require(c.cost_honest <= c.price, "C(Q) <= P");
  require(c.info_cheat < 0, "I_v(Q') < 0");
  require(c.info_honest > 0, "I_v(Q) > 0");
  require(c.audit_cost >= 0, "C(A) >= 0");
  require(c.verify_cost >= 0, "C(V) >= 0");
  require(c.audit_cost < c.info_honest - c.info_cheat,
          "C(A) < I_v(Q) - I_v(Q')");
  require(in_unit(c.rates.p_tp) && in_unit(c.rates.p_tn) &&
              in_unit(c.rates.p_fp) && in_unit(c.rates.p_fn),
          "error rates within [0, 1]");
  require(std::fabs(c.rates.p_fp - (1 - c.rates.p_tn)) <= 1e-12,
          "p_fp = 1 - p_tn");
  require(std::fabs(c.rates.p_fn - (1 - c.rates.p_tp)) <= 1e-12,
          "p_fn = 1 - p_tp");
  if (form == GameForm::TwoCloud) {
    require(c.info_honest >= (1 + c.alpha) * c.price,
            "I_v(Q) >= (1 + alpha) P (two-cloud individual rationality)");
  } else {
    require(c.info_honest >= c.price,
            "I_v(Q) >= P (single-cloud individual rationality)");
  }
}

TwoCloudTable utilities_two_cloud(const GameConfig& config, Contract contract,
                                  AuditAccounting accounting) {
  if (contract == Contract::Three)
    throw ConfigError("contract 3 belongs to the single-cloud game");
  validate(config, GameForm::TwoCloud);
  return two_cloud_unchecked(config, contract, accounting);
}

SingleCloudTable utilities_single_cloud(const GameConfig& config) {
  validate(config, GameForm::SingleCloud);
  return single_cloud_unchecked(config);
}

double alpha_threshold_two_cloud(double gain, double fine, double price) {
  if (gain <= 0) return 0.0;
  if (!(fine + price > 0))
    throw ParameterError("alpha threshold needs F + P > 0");
  return gain / (2 * fine + 2 * price + gain);
}

double effective_two_cloud_fine(const GameConfig& config, Contract contract,
                                AuditAccounting accounting) {
  if (contract == Contract::Two &&
      accounting == AuditAccounting::CheaterReimburses)
    return config.fine + config.audit_cost;
  return config.fine;
}

double alpha_threshold_two_cloud(const GameConfig& config, Contract contract,
                                 AuditAccounting accounting) {
  if (contract == Contract::Three)
    throw ConfigError("contract 3 belongs to the single-cloud game");
  const double gain = config.gain();
  if (gain <= 0) return 0.0;
  // u_S1(h,h) - u_S1(c,h) = -G/2 + alpha (F + P - (C(Q) + C(Q'))/2).
  const double fine = effective_two_cloud_fine(config, contract, accounting);
  const double denom = 2 * fine + 2 * (config.price - config.cost_honest) + gain;
  if (!(denom > 0))
    throw ParameterError("two-cloud threshold needs 2F + 2(P - C(Q)) + G > 0");
  return gain / denom;
}

double alpha_uniform_two_cloud(double price, double fine) {
  if (price <= 0) return 0.0;
  if (fine < 0) throw ParameterError("uniform alpha needs F >= 0");
  return price / (2 * fine + price);
}

double alpha_practical_two_cloud(double price, double fine) {
  if (!(fine > 0)) throw ParameterError("practical alpha needs F > 0");
  if (price <= 0) return 0.0;
  return alpha_threshold_two_cloud(price, fine, price);
}

double alpha_practical_two_cloud_printed(double price, double fine) {
  if (!(fine > 0)) throw ParameterError("practical alpha needs F > 0");
  return price / (2 * fine - price);
}

SingleCloudThreshold alpha_threshold_single_cloud(const GameConfig& c) {
  if (!(c.rates.p_tn > 0))
    throw UndeterrableError(
        "p_tn = 0: local verification never flags a cheat, no alpha deters");
  const double denom = c.rates.p_tn * (c.audit_cost + c.fine + c.price);
  if (!(denom > 0))
    throw ParameterError("single-cloud threshold needs C(A) + F + P > 0");
  const double gain = c.gain();
  SingleCloudThreshold t;
  t.value = gain <= 0 ? 0.0 : gain / denom;
  t.feasible = t.value <= 1.0;
  return t;
}

bool RationalityReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const RationalityCheck* RationalityReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

RationalityReport check_rationality(const GameConfig& config, double alpha,
                                    GameForm form, Contract contract) {
  GameConfig c = config;
  c.alpha = alpha;
  RationalityReport r;
  r.form = form;
  r.alpha = alpha;

  if (form == GameForm::TwoCloud) {
    if (contract == Contract::Three) contract = Contract::One;
    const auto accounting = AuditAccounting::CheaterReimburses;
    r.threshold = alpha_threshold_two_cloud(c, contract, accounting);
    const auto t = two_cloud_unchecked(c, contract, accounting);
    r.checks.push_back(make_check("owner IR: I_v(Q) >= (1+alpha)P",
                                  c.info_honest, (1 + alpha) * c.price));
    r.checks.push_back(make_check("server IR: P >= C(Q)", c.price, c.cost_honest));
    r.checks.push_back(make_check("owner equilibrium utility u_O(h,h) >= 0",
                                  t.at(Action::Honest, Action::Honest).owner, 0));
    r.checks.push_back(make_check("server equilibrium utility u_S1(h,h) >= 0",
                                  t.at(Action::Honest, Action::Honest).s1, 0));
    r.checks.push_back(make_check("IC: alpha >= threshold", alpha, r.threshold));
    r.checks.push_back(make_check("IC: u_S1(h,h) >= u_S1(c,h)",
                                  t.at(Action::Honest, Action::Honest).s1,
                                  t.at(Action::Cheat, Action::Honest).s1));
  } else {
    const auto t = single_cloud_unchecked(c);
    r.checks.push_back(make_check("owner IR: I_v(q) >= P", c.info_honest, c.price));
    r.checks.push_back(make_check("server IR: P >= C(q)", c.price, c.cost_honest));
    r.checks.push_back(make_check("owner equilibrium utility u_O(alpha,h) >= 0",
                                  t.honest.owner, 0));
    r.checks.push_back(make_check("server equilibrium utility u_S(alpha,h) >= 0",
                                  t.honest.s1, 0));
    if (c.rates.p_tn > 0 && c.audit_cost + c.fine + c.price > 0) {
      r.threshold = alpha_threshold_single_cloud(c).value;
    } else {
      r.threshold = c.gain() > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    r.checks.push_back(make_check("IC: alpha >= threshold", alpha, r.threshold));
    r.checks.push_back(make_check("IC: u_S(alpha,h) >= u_S(alpha,c)",
                                  t.honest.s1, t.cheat.s1));
  }
  return r;
}

Action best_response_two_cloud(const GameConfig& config, Contract contract,
                               AuditAccounting accounting) {
  const auto t = utilities_two_cloud(config, contract, accounting);
  return t.at(Action::Honest, Action::Honest).s1 >=
                 t.at(Action::Cheat, Action::Honest).s1
             ? Action::Honest
             : Action::Cheat;
}

Action best_response_single_cloud(const GameConfig& config) {
  const auto t = utilities_single_cloud(config);
  return t.honest.s1 >= t.cheat.s1 ? Action::Honest : Action::Cheat;
}

}  // namespace veriq
