#pragma once

#include <array>
#include <string>
#include <vector>

namespace veriq {

// Local-verifier error rates. p_tn is the probability a cheat is flagged,
// p_fn the probability an honest result is (wrongly) flagged.
struct ErrorRates {
  double p_tp = 1.0;
  double p_tn = 1.0;
  double p_fp = 0.0;
  double p_fn = 0.0;

  static ErrorRates from(double p_tn, double p_fn) {
    return {1.0 - p_fn, p_tn, 1.0 - p_tn, p_fn};
  }
};

// All economic scalars of both games. Currency values are plain reals.
struct GameConfig {
  double price = 0;        // P(Q), paid per computation
  double cost_honest = 0;  // C(Q)
  double cost_cheat = 0;   // C(Q')
  double fine = 0;         // F
  double info_honest = 0;  // I_v(Q) > 0
  double info_cheat = 0;   // I_v(Q') < 0
  double audit_cost = 0;   // C(A)
  double verify_cost = 0;  // C(V), single-cloud local verification
  ErrorRates rates;
  double alpha = 0;

  // What a server saves by cheating, C(Q) - C(Q').
  double gain() const { return cost_honest - cost_cheat; }
};

enum class GameForm { TwoCloud, SingleCloud };
enum class Contract { One = 1, Two = 2, Three = 3 };
// Contract 2: who carries the audit cost once a cheater is identified.
enum class AuditAccounting { OwnerBears, CheaterReimburses };
enum class Action { Honest, Cheat };

inline const char* to_string(Action a) { return a == Action::Honest ? "h" : "c"; }

// Throws ConfigError naming the first violated inequality.
void validate(const GameConfig& config, GameForm form);

struct PlayerUtilities {
  double owner = 0;
  double s1 = 0;  // the single server in the single-cloud game
  double s2 = 0;
};

struct TwoCloudTable {
  Contract contract = Contract::One;
  AuditAccounting accounting = AuditAccounting::CheaterReimburses;
  std::array<PlayerUtilities, 4> cells{};

  const PlayerUtilities& at(Action s1, Action s2) const {
    return cells[index(s1, s2)];
  }
  PlayerUtilities& at(Action s1, Action s2) { return cells[index(s1, s2)]; }

 private:
  static std::size_t index(Action s1, Action s2) {
    return (s1 == Action::Cheat ? 2 : 0) + (s2 == Action::Cheat ? 1 : 0);
  }
};

// Expected utilities over {h,c} x {h,c}. Contract One charges both servers F
// on a mismatch; Contract Two fines only the cheaters the audit identifies.
TwoCloudTable utilities_two_cloud(
    const GameConfig& config, Contract contract,
    AuditAccounting accounting = AuditAccounting::CheaterReimburses);

struct SingleCloudTable {
  double alpha = 0;
  // Pure verify (v) / no-verify (n) rows, owner and server.
  double owner_vh = 0, owner_vc = 0, owner_nh = 0, owner_nc = 0;
  double server_vh = 0, server_vc = 0, server_nh = 0, server_nc = 0;
  // Mixed at alpha: u(alpha, a) = alpha u(v, a) + (1 - alpha) u(n, a).
  PlayerUtilities honest;
  PlayerUtilities cheat;

  const PlayerUtilities& at(Action a) const {
    return a == Action::Honest ? honest : cheat;
  }
};

// Contract 3: a caught cheater pays F + C(A) and is not paid.
SingleCloudTable utilities_single_cloud(const GameConfig& config);

// The closed form G / (2F + 2P + G); 0 when G <= 0. It sits below the point
// where the two-cloud utilities actually cross by 2C(Q) in the denominator,
// so it is not on its own enough to deter.
double alpha_threshold_two_cloud(double gain, double fine, double price);

// The fine a server actually risks under the given contract. Under Contract
// Two with reimbursement the caught cheater also pays C(A).
double effective_two_cloud_fine(const GameConfig& config, Contract contract,
                                AuditAccounting accounting);

// Exact indifference point of S1 against an honest S2:
// G / (2F + 2(P - C(Q)) + G), with F replaced by the effective fine.
double alpha_threshold_two_cloud(
    const GameConfig& config, Contract contract,
    AuditAccounting accounting = AuditAccounting::CheaterReimburses);

// Threshold with G = P, the largest gain the owner cannot rule out:
// P / (2F + 3P).
double alpha_practical_two_cloud(double price, double fine);
// The closed form P / (2F - P) as printed alongside that substitution. It
// does not follow from it; kept for comparison only.
double alpha_practical_two_cloud_printed(double price, double fine);
// Smallest alpha that deters every server with G <= P under the exact
// threshold: P / (2F + P), reached at C(Q) = P, C(Q') = 0.
double alpha_uniform_two_cloud(double price, double fine);

struct SingleCloudThreshold {
  double value = 0;
  bool feasible = true;  // false when value > 1
};

// (C(q) - C(q')) / (p_tn (C(A) + F + P)). Throws UndeterrableError when
// p_tn == 0.
SingleCloudThreshold alpha_threshold_single_cloud(const GameConfig& config);

struct RationalityCheck {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  double margin = 0;  // lhs - rhs
  bool pass = false;
};

struct RationalityReport {
  GameForm form = GameForm::TwoCloud;
  double alpha = 0;
  double threshold = 0;
  std::vector<RationalityCheck> checks;

  bool all_pass() const;
  const RationalityCheck* find(const std::string& name) const;
};

// Report-only: lists individual-rationality and incentive-compatibility
// inequalities at the given alpha. Never throws for a bad config.
RationalityReport check_rationality(const GameConfig& config, double alpha,
                                    GameForm form,
                                    Contract contract = Contract::One);

// Best response of a server that knows the contract: honest iff its expected
// utility from honesty is at least that of cheating (the other server honest
// in the two-cloud game).
Action best_response_two_cloud(const GameConfig& config, Contract contract,
                               AuditAccounting accounting =
                                   AuditAccounting::CheaterReimburses);
Action best_response_single_cloud(const GameConfig& config);

}  // namespace veriq
