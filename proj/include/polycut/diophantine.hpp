#pragma once

// Diophantine diagnostics: exact continued fractions with quadratic
// periodicity certificates, empirical homogeneous/inhomogeneous Diophantine
// constants c(R) for embedded groups, and the scheme-level checks D, D_F and
// the flag-group condition.

#include "polycut/complexity.hpp"

namespace cps {

struct ParamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CFExpansion {
  std::vector<Int> quotients;  // a_0; a_1, a_2, ...
  // (preperiod length, period quotients), set for quadratic inputs
  std::optional<std::pair<int, std::vector<Int>>> periodic;
};

// Exact continued fraction, `depth` quotients. Quadratic fields additionally
// run the integer (P + sqrt(D))/Q cycle detection and set `periodic`.
CFExpansion cf_expand(const Fs& x, int depth);

struct QuadCertificate {
  bool applicable = false;       // quadratic field and irrational input
  std::vector<Int> period;       // certificate: bounded quotients
  CFExpansion expansion;
};

// Quadratic irrationals are always badly approximable; the certificate is
// the continued-fraction period. Other degrees: not applicable.
QuadCertificate is_bad_quadratic(const Fs& x);

// A rank-r subgroup of internal space with a lift into (1/N)Z^k; the lattice
// norm eta is the total-space sup norm of the lift.
struct DiophGroup {
  QLattice lift;       // k x r rational basis
  FMat phys;           // d x r images under proj_phys
  FMat internal;       // n x r images under proj_int (inside the factor)
  Rat delta{1};        // d_i / n_i
  std::string name;
};

struct DiophWitness {
  IVec coords;      // in the group basis
  double eta = 0;   // total-space sup norm of the lift
  double dist = 0;  // distance to the target
  double value = 0; // dist * eta^delta
  bool set = false;
};

struct DiophRecord {
  Rat radius;
  std::vector<DiophWitness> best;  // per target, running minimum
};

struct DiophantineEstimate {
  DiophGroup group;
  std::vector<FVec> targets;
  std::vector<Rat> schedule;
  std::vector<DiophRecord> records;  // one per schedule radius

  double c_final(int target) const {
    return records.empty() ? -1.0 : records.back().best[target].value;
  }
};

DiophantineEstimate dioph_estimate(const Scheme& s, const DiophGroup& group,
                                   const std::vector<FVec>& targets,
                                   const std::vector<Rat>& schedule,
                                   int threads = 1);

enum class DiophVerdict { Certified, EmpiricallyConsistent, EmpiricallyFailing };
std::string verdict_string(DiophVerdict v);

// Decay rule: failing iff c(R_max) < c(R_min)/32 with a strictly decreasing
// tail over at least 4 schedule points.
DiophVerdict classify_decay(const DiophantineEstimate& est, int target);

struct FactorCheck {
  int factor = -1;
  DiophantineEstimate estimate;
  std::optional<QuadCertificate> certificate;  // 2-to-1 quadratic path
  DiophVerdict verdict = DiophVerdict::EmpiricallyConsistent;
};

struct StabiliserCertificate {
  int subspace = -1;
  QuadCertificate certificate;
};

struct CheckDResult {
  std::vector<FactorCheck> factors;
  std::vector<StabiliserCertificate> stabiliser_evidence;
  DiophVerdict overall = DiophVerdict::EmpiricallyConsistent;
};

CheckDResult check_D(const Scheme& s, const ComplexityReport& rep,
                     const std::vector<Rat>& schedule, int threads = 1);

struct CheckDFResult {
  long scale_N = 1;
  std::vector<FactorCheck> factors;  // targets = F_i on (1/N)Gamma_i
  DiophVerdict overall = DiophVerdict::EmpiricallyConsistent;
};

CheckDFResult check_DF(const Scheme& s, const ComplexityReport& rep,
                       const std::vector<Rat>& schedule, long scale_N,
                       int threads = 1);

struct FlagConditionRun {
  int flag0_a = -1, flag0_b = -1, factor = -1;
  DiophantineEstimate estimate;  // targets: the distinct v(f')_i - v(f)_i
  DiophVerdict verdict = DiophVerdict::EmpiricallyConsistent;
};

struct FlagConditionResult {
  std::vector<FlagConditionRun> runs;
  DiophVerdict overall = DiophVerdict::EmpiricallyConsistent;
};

FlagConditionResult check_flag_condition(const Scheme& s,
                                         const ComplexityReport& rep,
                                         const std::vector<Rat>& schedule,
                                         int threads = 1);

std::vector<Rat> default_schedule();  // 2^4 .. 2^16

}  // namespace cps
