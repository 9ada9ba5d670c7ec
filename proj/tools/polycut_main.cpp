// polycut: exact analysis of polytopal cut-and-project schemes.
//
// Subcommands: validate, analyze, diophantine, generate, empirics. All output
// numbers come from exact module computations; the CLI only formats them.

#include "polycut/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidScheme = 1;
constexpr int kExitIo = 2;
constexpr int kExitUnsupportedDim = 3;
constexpr int kExitSingularity = 4;

struct Options {
  std::string scheme_path;
  std::string out_dir = ".";
  std::vector<std::string> radii;
  std::string box = "10";
  std::string schedule = "2^4..2^16";
  long nmax = 12;
  long scale_n = 1;
  int precision = 12;
  int threads = 1;
  unsigned long seed = 1;
  bool run_d = false, run_df = false, run_flag = false;
};

std::vector<cps::Rat> parse_radii(const std::vector<std::string>& items) {
  std::vector<cps::Rat> out;
  for (const std::string& piece : items) {
    std::stringstream ss(piece);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) out.push_back(cps::parse_rational(tok));
    }
  }
  if (out.empty()) out = {cps::Rat(2), cps::Rat(4), cps::Rat(8)};
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i] <= 0) throw cps::ParseError("radii must be positive");
    if (i && !(out[i - 1] < out[i]))
      throw cps::ParseError("radii must be increasing");
  }
  return out;
}

std::vector<cps::Rat> parse_schedule(const std::string& text) {
  // "2^a..2^b" or a comma list of rationals
  auto caret = text.find("2^");
  if (caret == 0) {
    auto dots = text.find("..");
    if (dots == std::string::npos || text.compare(dots + 2, 2, "2^") != 0)
      throw cps::ParseError("schedule must look like 2^4..2^16 or a,b,c");
    int a = std::stoi(text.substr(2, dots - 2));
    int b = std::stoi(text.substr(dots + 4));
    if (a > b || a < 0 || b > 62) throw cps::ParseError("bad schedule range");
    std::vector<cps::Rat> out;
    for (int j = a; j <= b; ++j) out.push_back(cps::Rat(cps::Int(1) << j));
    return out;
  }
  std::vector<cps::Rat> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(cps::parse_rational(tok));
  if (out.empty()) throw cps::ParseError("empty schedule");
  return out;
}

std::ofstream open_out(const Options& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out_dir);
  std::filesystem::path p = std::filesystem::path(opt.out_dir) / name;
  std::ofstream f(p, std::ios::binary);
  if (!f) throw cps::SchemeParseError("cannot write " + p.string());
  return f;
}

int cmd_validate(const Options& opt) {
  cps::Scheme s = cps::load_scheme_file(opt.scheme_path);
  cps::ValidationReport rep = cps::validate_scheme(s);
  std::cout << cps::validation_json(rep) << "\n";
  return rep.assumptions_pass() ? kExitOk : kExitInvalidScheme;
}

cps::ComplexityReport analyzed_or_throw(const cps::Scheme& s, const Options& opt) {
  cps::ValidationReport v = cps::validate_scheme(s);
  if (!v.assumptions_pass()) {
    std::cout << cps::validation_json(v) << "\n";
    throw cps::InvalidWindow("scheme assumptions fail");
  }
  return cps::complexity_exponent(s, opt.nmax);
}

int cmd_analyze(const Options& opt) {
  cps::Scheme s = cps::load_scheme_file(opt.scheme_path);
  cps::ComplexityReport rep = analyzed_or_throw(s, opt);
  std::cout << cps::complexity_json(rep) << "\n";
  return kExitOk;
}

int cmd_diophantine(const Options& opt) {
  cps::Scheme s = cps::load_scheme_file(opt.scheme_path);
  cps::ComplexityReport rep = analyzed_or_throw(s, opt);
  std::vector<cps::Rat> schedule = parse_schedule(opt.schedule);

  bool any_flag = opt.run_d || opt.run_df || opt.run_flag;
  bool weakly =
      rep.homogeneity.kind == cps::HomogeneityVerdict::Homogeneous ||
      rep.homogeneity.kind == cps::HomogeneityVerdict::WeaklyHomogeneous;
  bool do_d = any_flag ? opt.run_d : weakly;
  bool do_df = any_flag ? opt.run_df : !weakly;
  bool do_flag = any_flag ? opt.run_flag : !weakly;

  std::optional<cps::CheckDResult> d;
  std::optional<cps::CheckDFResult> df;
  std::optional<cps::FlagConditionResult> flag;
  if (rep.C) {
    if (do_d) d = cps::check_D(s, rep, schedule, opt.threads);
    if (do_df) df = cps::check_DF(s, rep, schedule, opt.scale_n, opt.threads);
    if (do_flag) flag = cps::check_flag_condition(s, rep, schedule, opt.threads);
  }
  std::string lr = cps::lr_verdict_line(rep, d, df, flag);
  std::cout << cps::diophantine_json(rep, d, df, flag, lr) << "\n";

  auto dump = [&](const cps::DiophantineEstimate& est, const std::string& name) {
    std::ofstream f = open_out(opt, name);
    cps::write_dioph_csv(f, est, opt.precision);
  };
  if (d)
    for (const cps::FactorCheck& fc : d->factors)
      dump(fc.estimate, "dioph_D_" + fc.estimate.group.name + ".csv");
  if (df)
    for (const cps::FactorCheck& fc : df->factors)
      dump(fc.estimate, "dioph_DF_" + fc.estimate.group.name + ".csv");
  if (flag)
    for (const cps::FlagConditionRun& r : flag->runs)
      dump(r.estimate, "dioph_flag_" + r.estimate.group.name + ".csv");
  return kExitOk;
}

int cmd_generate(const Options& opt) {
  cps::Scheme s = cps::load_scheme_file(opt.scheme_path);
  cps::ValidationReport v = cps::validate_scheme(s);
  if (!v.assumptions_pass()) {
    std::cout << cps::validation_json(v) << "\n";
    return kExitInvalidScheme;
  }
  cps::Rat box = cps::parse_rational(opt.box);
  cps::PointPattern pat = cps::generate_pattern(s, box);
  std::ofstream f = open_out(opt, "points.csv");
  const cps::Scheme* eff = &s;
  cps::Scheme reduced;
  if (s.cyclic) {
    reduced = cps::reduce_cyclic(s);
    eff = &reduced;
  }
  cps::write_points_csv(f, *eff, pat, opt.precision);
  std::cout << "{\n  \"points\": " << pat.points.size() << ",\n  \"box\": \""
            << cps::rational_string(box) << "\"\n}\n";
  return kExitOk;
}

int cmd_empirics(const Options& opt) {
  cps::Scheme s = cps::load_scheme_file(opt.scheme_path);
  cps::ComplexityReport rep = analyzed_or_throw(s, opt);
  const cps::Scheme& base = rep.analyzed;  // cyclic-reduced, unlabelled
  std::vector<cps::Rat> radii = parse_radii(opt.radii);
  cps::Rat box = cps::parse_rational(opt.box);

  // patches and repetitivity run on the scheme as given (labels intact),
  // cyclic components reduced first
  const cps::Scheme* pat_scheme = &s;
  cps::Scheme reduced;
  if (s.cyclic) {
    reduced = cps::reduce_cyclic(s);
    pat_scheme = &reduced;
  }
  cps::PointPattern pat = cps::generate_pattern(*pat_scheme, box);

  cps::ComplexityTable ct =
      cps::empirical_complexity(*pat_scheme, pat, radii, rep.alpha, opt.threads);
  {
    std::ofstream f = open_out(opt, "complexity.csv");
    cps::write_complexity_csv(f, ct, opt.precision);
  }
  cps::RepetitivityTable rt = cps::empirical_repetitivity(
      *pat_scheme, pat, radii, opt.seed, opt.threads);
  {
    std::ofstream f = open_out(opt, "repetitivity.csv");
    cps::write_repetitivity_csv(f, rt, opt.precision);
  }
  std::vector<cps::CutRegionCensus> census;
  std::vector<cps::PWRow> pw;
  if (base.n <= 2) {
    for (const cps::Rat& r : radii) census.push_back(cps::cut_region_census(*pat_scheme, r));
    pw = cps::pw_estimate(*pat_scheme, radii);
    std::ofstream f = open_out(opt, "cutregions.csv");
    cps::write_cutregions_csv(f, pw, census, opt.precision);
  }
  std::cout << "{\n  \"points\": " << pat.points.size()
            << ",\n  \"radii\": " << radii.size() << ",\n  \"alpha\": "
            << rep.alpha << "\n}\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polycut: exact analysis of polytopal cut-and-project schemes"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scheme", opt.scheme_path, "scheme JSON file")->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--precision", opt.precision, "decimal digits in output")
        ->check(CLI::Range(1, 60));
    sub->add_option("--threads", opt.threads, "worker thread cap")
        ->check(CLI::Range(1, 64));
    sub->add_option("--seed", opt.seed, "seed for sampled probes");
    sub->add_option("--nmax", opt.nmax, "weak homogeneity search bound");
  };

  CLI::App* validate = app.add_subcommand("validate", "check scheme assumptions");
  add_common(validate);
  CLI::App* analyze = app.add_subcommand("analyze", "complexity report (alpha, C, ...)");
  add_common(analyze);
  CLI::App* dioph = app.add_subcommand("diophantine", "Diophantine diagnostics");
  add_common(dioph);
  dioph->add_option("--schedule", opt.schedule, "radii, e.g. 2^4..2^16 or a,b,c");
  dioph->add_option("--scale-n", opt.scale_n, "lattice refinement 1/N for D_F");
  dioph->add_flag("--homogeneous", opt.run_d, "force the D path");
  dioph->add_flag("--inhomogeneous", opt.run_df, "force the D_F path");
  dioph->add_flag("--flag-condition", opt.run_flag, "force the flag-group path");
  CLI::App* generate = app.add_subcommand("generate", "emit points.csv");
  add_common(generate);
  generate->add_option("--box", opt.box, "physical box radius L");
  CLI::App* empirics = app.add_subcommand("empirics", "patch/repetitivity/cut-region tables");
  add_common(empirics);
  empirics->add_option("--box", opt.box, "physical box radius L");
  empirics->add_option("--radii", opt.radii, "patch radii list a,b,c");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(opt);
    if (analyze->parsed()) return cmd_analyze(opt);
    if (dioph->parsed()) return cmd_diophantine(opt);
    if (generate->parsed()) return cmd_generate(opt);
    if (empirics->parsed()) return cmd_empirics(opt);
  } catch (const cps::SchemeParseError& e) {
    std::cerr << "parse error";
    if (e.line >= 0) std::cerr << " at line " << e.line << ", column " << e.column;
    std::cerr << ": " << e.what() << "\n";
    return kExitIo;
  } catch (const cps::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitIo;
  } catch (const cps::UnsupportedDimension& e) {
    std::cerr << "unsupported dimension: " << e.what() << "\n";
    return kExitUnsupportedDim;
  } catch (const cps::SingularityError& e) {
    std::cerr << "singularity: " << e.what() << " at gamma = (";
    for (int i = 0; i < e.gamma.size(); ++i)
      std::cerr << (i ? "," : "") << e.gamma(i).get_str();
    std::cerr << ")\n";
    return kExitSingularity;
  } catch (const cps::InvalidWindow& e) {
    std::cerr << "invalid scheme: " << e.what() << "\n";
    return kExitInvalidScheme;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
