#pragma once

// Scheme file parsing (strict JSON), report serialization, CSV writers.

#include "polycut/complexity.hpp"
#include "polycut/diophantine.hpp"
#include "polycut/empirics.hpp"

#include <iosfwd>

namespace cps {

struct SchemeParseError : std::runtime_error {
  int line = -1, column = -1;
  SchemeParseError(const std::string& what, int l = -1, int c = -1)
      : std::runtime_error(what), line(l), column(c) {}
};

// Strict parse: unknown keys rejected, every scalar a length-g array of
// rational strings.
Scheme parse_scheme_json(const std::string& text);
Scheme load_scheme_file(const std::string& path);

std::string scalar_json(const Fs& v, int degree);  // ["p/q", ...]

std::string validation_json(const ValidationReport& rep);
std::string complexity_json(const ComplexityReport& rep);
std::string diophantine_json(const ComplexityReport& rep,
                             const std::optional<CheckDResult>& d,
                             const std::optional<CheckDFResult>& df,
                             const std::optional<FlagConditionResult>& flag,
                             const std::string& lr_line);

// Overall LR verdict line per the decision rule (C + strongest evidence).
std::string lr_verdict_line(const ComplexityReport& rep,
                            const std::optional<CheckDResult>& d,
                            const std::optional<CheckDFResult>& df,
                            const std::optional<FlagConditionResult>& flag);

void write_points_csv(std::ostream& os, const Scheme& s,
                      const PointPattern& pat, int precision);
void write_complexity_csv(std::ostream& os, const ComplexityTable& t,
                          int precision);
void write_repetitivity_csv(std::ostream& os, const RepetitivityTable& t,
                            int precision);
void write_cutregions_csv(std::ostream& os, const std::vector<PWRow>& pw,
                          const std::vector<CutRegionCensus>& census,
                          int precision);
void write_dioph_csv(std::ostream& os, const DiophantineEstimate& est,
                     int precision);

std::string csv_quote(const std::string& s);
std::string double_decimal(double v, int digits);  // exact binary -> decimal

}  // namespace cps
