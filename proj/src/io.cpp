#include "polycut/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace cps {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw SchemeParseError(msg); }

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      fail("unknown key \"" + it.key() + "\" in " + where);
}

Rat parse_rat_json(const json& v, const std::string& where) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rat(v.get<long>());
  fail("expected rational string in " + where);
}

Fs parse_scalar(const json& v, const FieldPtr& field, const std::string& where) {
  int g = field->degree();
  if (!v.is_array() || static_cast<int>(v.size()) != g)
    fail("scalar in " + where + " must be an array of " + std::to_string(g) +
         " rational strings");
  std::vector<Rat> c(static_cast<size_t>(g));
  for (int i = 0; i < g; ++i) c[static_cast<size_t>(i)] = parse_rat_json(v[i], where);
  return Fs(field, std::move(c));
}

FVec parse_vector(const json& v, const FieldPtr& field, int len,
                  const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != len)
    fail("vector in " + where + " must have length " + std::to_string(len));
  FVec out(len);
  for (int i = 0; i < len; ++i) out(i) = parse_scalar(v[i], field, where);
  return out;
}

FMat parse_matrix(const json& v, const FieldPtr& field, int rows, int cols,
                  const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != rows)
    fail(where + " must have " + std::to_string(rows) + " rows");
  FMat out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!v[i].is_array() || static_cast<int>(v[i].size()) != cols)
      fail(where + " row " + std::to_string(i) + " must have " +
           std::to_string(cols) + " entries");
    for (int j = 0; j < cols; ++j)
      out(i, j) = parse_scalar(v[i][j], field, where);
  }
  return out;
}

Window parse_window(const json& v, const FieldPtr& field, int n,
                    const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where + " must be a nonempty array");
  Window w;
  for (size_t pi = 0; pi < v.size(); ++pi) {
    const json& pj = v[pi];
    std::string pwhere = where + "[" + std::to_string(pi) + "]";
    if (!pj.is_object()) fail(pwhere + " must be an object");
    reject_unknown(pj, {"label", "vertices", "halfspaces"}, pwhere);
    std::optional<std::string> label;
    if (pj.contains("label")) {
      if (!pj["label"].is_string()) fail(pwhere + ".label must be a string");
      label = pj["label"].get<std::string>();
    }
    bool has_v = pj.contains("vertices"), has_h = pj.contains("halfspaces");
    if (has_v == has_h)
      fail(pwhere + " needs exactly one of \"vertices\" or \"halfspaces\"");
    if (has_v) {
      const json& vs = pj["vertices"];
      if (!vs.is_array() || vs.empty()) fail(pwhere + ".vertices empty");
      std::vector<FVec> pts;
      for (size_t i = 0; i < vs.size(); ++i)
        pts.push_back(parse_vector(vs[i], field, n, pwhere + ".vertices"));
      w.pieces.push_back(ConvexPiece::from_vertices(label, std::move(pts)));
    } else {
      const json& hs = pj["halfspaces"];
      if (!hs.is_array() || hs.empty()) fail(pwhere + ".halfspaces empty");
      std::vector<HalfSpace> halves;
      for (size_t i = 0; i < hs.size(); ++i) {
        const json& hj = hs[i];
        std::string hwhere = pwhere + ".halfspaces[" + std::to_string(i) + "]";
        if (!hj.is_object()) fail(hwhere + " must be an object");
        reject_unknown(hj, {"normal", "offset", "side"}, hwhere);
        if (!hj.contains("normal") || !hj.contains("offset") ||
            !hj.contains("side"))
          fail(hwhere + " needs normal, offset, side");
        FVec nrm = parse_vector(hj["normal"], field, n, hwhere);
        Fs off = parse_scalar(hj["offset"], field, hwhere);
        std::string side = hj["side"].get<std::string>();
        if (side != "le" && side != "ge") fail(hwhere + ".side must be le|ge");
        halves.push_back(
            {Hyperplane(nrm, off), side == "le" ? Side::LE : Side::GE});
      }
      w.pieces.push_back(ConvexPiece::from_halfspaces(label, std::move(halves)));
    }
  }
  return w;
}

}  // namespace

Scheme parse_scheme_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // recover line/column from the byte offset
    size_t off = e.byte;
    int line = 1, col = 1;
    for (size_t i = 0; i + 1 < off && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemeParseError(std::string("JSON syntax error: ") + e.what(), line,
                           col);
  }
  if (!root.is_object()) fail("top level must be an object");
  reject_unknown(root,
                 {"field", "k", "d", "n", "proj_physical", "proj_internal",
                  "window", "cyclic"},
                 "top level");
  for (const char* key : {"field", "k", "d", "n", "proj_physical",
                          "proj_internal"})
    if (!root.contains(key)) fail(std::string("missing key \"") + key + "\"");

  const json& fj = root["field"];
  if (!fj.is_object()) fail("\"field\" must be an object");
  reject_unknown(fj, {"minpoly", "root"}, "field");
  if (!fj.contains("minpoly") || !fj.contains("root"))
    fail("field needs minpoly and root");
  std::vector<Int> mp;
  for (const json& c : fj["minpoly"]) {
    if (!c.is_number_integer()) fail("minpoly entries must be integers");
    mp.push_back(Int(c.get<long>()));
  }
  const json& rj = fj["root"];
  reject_unknown(rj, {"lo", "hi"}, "field.root");
  if (!rj.contains("lo") || !rj.contains("hi")) fail("root needs lo and hi");
  FieldPtr field = NumberField::make(mp, parse_rat_json(rj["lo"], "root.lo"),
                                     parse_rat_json(rj["hi"], "root.hi"));

  Scheme s;
  s.field = field;
  if (!root["k"].is_number_integer() || !root["d"].is_number_integer() ||
      !root["n"].is_number_integer())
    fail("k, d, n must be integers");
  s.k = root["k"].get<int>();
  s.d = root["d"].get<int>();
  s.n = root["n"].get<int>();
  if (s.k != s.d + s.n || s.d < 1 || s.n < 1) fail("need k = d + n, d,n >= 1");
  s.proj_phys = parse_matrix(root["proj_physical"], field, s.d, s.k,
                             "proj_physical");
  s.proj_int = parse_matrix(root["proj_internal"], field, s.n, s.k,
                            "proj_internal");

  bool has_window = root.contains("window");
  bool has_cyclic = root.contains("cyclic");
  if (!has_window && !has_cyclic)
    fail("need \"window\" (or \"cyclic\" with residue windows)");
  if (has_window)
    s.window = parse_window(root["window"], field, s.n, "window");

  if (has_cyclic) {
    const json& cj = root["cyclic"];
    if (!cj.is_object()) fail("\"cyclic\" must be an object");
    reject_unknown(cj, {"modulus", "kappa", "windows", "shifts"}, "cyclic");
    if (!cj.contains("modulus") || !cj.contains("kappa") ||
        !cj.contains("windows"))
      fail("cyclic needs modulus, kappa, windows");
    CyclicData c;
    c.modulus = cj["modulus"].get<long>();
    if (c.modulus < 1) fail("cyclic.modulus must be >= 1");
    const json& kj = cj["kappa"];
    if (!kj.is_array() || static_cast<int>(kj.size()) != s.k)
      fail("cyclic.kappa must have k entries");
    c.kappa = IVec(s.k);
    for (int i = 0; i < s.k; ++i) c.kappa(i) = Int(kj[i].get<long>());
    for (auto it = cj["windows"].begin(); it != cj["windows"].end(); ++it) {
      long res = std::stol(it.key());
      c.windows[res] =
          parse_window(it.value(), field, s.n, "cyclic.windows[" + it.key() + "]");
    }
    if (cj.contains("shifts"))
      for (auto it = cj["shifts"].begin(); it != cj["shifts"].end(); ++it) {
        long res = std::stol(it.key());
        const json& sv = it.value();
        if (!sv.is_array() || static_cast<int>(sv.size()) != s.k)
          fail("cyclic.shifts[" + it.key() + "] must have k entries");
        IVec g(s.k);
        for (int i = 0; i < s.k; ++i) g(i) = Int(sv[i].get<long>());
        c.shifts[res] = g;
      }
    s.cyclic = std::move(c);
  }
  return s;
}

Scheme load_scheme_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemeParseError("cannot open scheme file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scheme_json(ss.str());
}

namespace {

json scalar_to_json(const Fs& v, int degree) {
  json a = json::array();
  for (const Rat& c : v.coeffs_padded(degree)) a.push_back(rational_string(c));
  return a;
}

json vec_to_json(const FVec& v, int degree) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(scalar_to_json(v(i), degree));
  return a;
}

json qvec_to_json(const QVec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(rational_string(v(i)));
  return a;
}

}  // namespace

std::string scalar_json(const Fs& v, int degree) {
  return scalar_to_json(v, degree).dump();
}

std::string validation_json(const ValidationReport& rep) {
  json j;
  j["assumptions"] = {{"physical_injective", rep.phys_injective},
                      {"internal_injective", rep.int_injective},
                      {"dense", rep.dense}};
  j["shapes_ok"] = rep.shapes_ok;
  j["stacked_invertible"] = rep.stacked_invertible;
  j["window_valid"] = rep.window_valid;
  j["nonsingular_up_to_bound"] = rep.nonsingular_up_to_bound;
  j["singular_scan_bound"] = rational_string(rep.singular_bound);
  json w = json::array();
  for (const IVec& g : rep.singular_witnesses) {
    json gv = json::array();
    for (int i = 0; i < g.size(); ++i) gv.push_back(g(i).get_si());
    w.push_back(gv);
  }
  j["singular_witnesses"] = w;
  j["failures"] = rep.failures;
  j["pass"] = rep.assumptions_pass();
  return j.dump(2);
}

std::string complexity_json(const ComplexityReport& rep) {
  int g = rep.analyzed.field->degree();
  json j;
  j["alpha"] = rep.alpha;
  j["C"] = rep.C;
  json stabs = json::array();
  for (const StabiliserInfo& st : rep.stabilisers) {
    json e;
    e["subspace_normal"] = vec_to_json(st.subspace_normal, g);
    e["rank"] = st.rank;
    e["beta"] = st.beta;
    e["alpha_H"] = st.alpha_H;
    stabs.push_back(e);
  }
  j["stabilisers"] = stabs;
  json flags = json::array();
  for (const SubspaceFlag& f : rep.flags0) {
    json e;
    e["members"] = f.members;
    e["alpha_f"] = f.alpha_f;
    flags.push_back(e);
  }
  j["flags"] = flags;
  json dec;
  dec["decomposable"] = rep.decomposition.decomposable;
  dec["factor_count"] = rep.decomposition.factors.size();
  json fcts = json::array();
  for (const FactorData& f : rep.decomposition.factors) {
    json e;
    e["active_subspaces"] = f.active;
    e["n_i"] = f.n_i;
    e["k_i"] = f.k_i;
    e["d_i"] = f.d_i;
    e["delta"] = rational_string(f.delta);
    e["csr_rank_ok"] = f.csr_rank_ok;
    fcts.push_back(e);
  }
  dec["factors"] = fcts;
  dec["sum_finite_index"] = rep.decomposition.sum_finite_index;
  if (rep.decomposition.sum_finite_index)
    dec["sum_index"] = rep.decomposition.sum_index.get_str();
  j["decomposition"] = dec;
  json hom;
  switch (rep.homogeneity.kind) {
    case HomogeneityVerdict::Homogeneous:
      hom["verdict"] = "homogeneous";
      break;
    case HomogeneityVerdict::WeaklyHomogeneous:
      hom["verdict"] = "weakly-homogeneous";
      break;
    case HomogeneityVerdict::NotWithinBound:
      hom["verdict"] = "not-within-bound";
      break;
    case HomogeneityVerdict::NotApplicable:
      hom["verdict"] = "not-applicable";
      break;
  }
  if (rep.homogeneity.witness_N > 0) hom["N"] = rep.homogeneity.witness_N;
  if (!rep.homogeneity.note.empty()) hom["note"] = rep.homogeneity.note;
  j["homogeneity"] = hom;
  json fset = json::array();
  for (const FVec& f : rep.F) fset.push_back(vec_to_json(f, g));
  j["F"] = fset;
  json verts = json::array();
  for (const FVec& v : rep.generalized_vertices) verts.push_back(vec_to_json(v, g));
  j["generalized_vertices"] = verts;
  json fgs = json::array();
  for (const FlagGroupInfo& fg : rep.flag_groups) {
    json e;
    e["flag"] = fg.flag0;
    e["finite_index"] = fg.finite && fg.index_over_gamma.finite();
    if (fg.finite && fg.index_over_gamma.finite()) {
      e["index_over_gamma"] = fg.index_over_gamma.index.get_str();
      json basis = json::array();
      QMat b = fg.lattice.basis_rational();
      for (int c = 0; c < b.cols(); ++c) basis.push_back(qvec_to_json(b.col(c)));
      e["lift_basis"] = basis;
    }
    fgs.push_back(e);
  }
  j["flag_groups"] = fgs;
  j["consequences_of_C"] = {
      {"hyperplane_spanning", rep.consequences.hyperplane_spanning},
      {"subflag_lines_ok", rep.consequences.subflag_lines_ok},
      {"subflag_sum_finite", rep.consequences.subflag_sum_finite}};
  return j.dump(2);
}

std::string lr_verdict_line(const ComplexityReport& rep,
                            const std::optional<CheckDResult>& d,
                            const std::optional<CheckDFResult>& df,
                            const std::optional<FlagConditionResult>& flag) {
  if (!rep.C) return "LR: fails (C necessary)";
  bool weakly = rep.homogeneity.kind == HomogeneityVerdict::Homogeneous ||
                rep.homogeneity.kind == HomogeneityVerdict::WeaklyHomogeneous;
  DiophVerdict worst = DiophVerdict::Certified;
  bool any = false;
  auto fold = [&](DiophVerdict v) {
    any = true;
    if (v == DiophVerdict::EmpiricallyFailing)
      worst = DiophVerdict::EmpiricallyFailing;
    else if (v == DiophVerdict::EmpiricallyConsistent &&
             worst == DiophVerdict::Certified)
      worst = DiophVerdict::EmpiricallyConsistent;
  };
  if (d) fold(d->overall);
  if (df) fold(df->overall);
  if (flag) fold(flag->overall);
  if (!any) return "LR: C holds (no Diophantine evidence requested)";
  if (worst == DiophVerdict::EmpiricallyFailing) {
    if (weakly) return "LR: fails (D necessary)";
    return "LR: fails (D_F necessary)";
  }
  if (worst == DiophVerdict::Certified) return "LR: certified-consistent";
  return "LR: empirically-consistent";
}

std::string diophantine_json(const ComplexityReport& rep,
                             const std::optional<CheckDResult>& d,
                             const std::optional<CheckDFResult>& df,
                             const std::optional<FlagConditionResult>& flag,
                             const std::string& lr_line) {
  json j;
  j["C"] = rep.C;
  j["alpha"] = rep.alpha;
  auto factor_json = [&](const FactorCheck& fc) {
    json e;
    e["factor"] = fc.factor;
    e["group"] = fc.estimate.group.name;
    e["delta"] = rational_string(fc.estimate.group.delta);
    e["verdict"] = verdict_string(fc.verdict);
    if (fc.certificate) {
      json cert;
      json per = json::array();
      for (const Int& q : fc.certificate->period) per.push_back(q.get_str());
      cert["period"] = per;
      e["certificate"] = cert;
    }
    json cs = json::array();
    for (const DiophRecord& r : fc.estimate.records) {
      json rr;
      rr["R"] = rational_string(r.radius);
      json vals = json::array();
      for (const DiophWitness& wtn : r.best)
        vals.push_back(double_decimal(wtn.value, 9));
      rr["c"] = vals;
      cs.push_back(rr);
    }
    e["records"] = cs;
    return e;
  };
  if (d) {
    json dd;
    dd["overall"] = verdict_string(d->overall);
    json fs = json::array();
    for (const FactorCheck& fc : d->factors) fs.push_back(factor_json(fc));
    dd["factors"] = fs;
    json ev = json::array();
    for (const StabiliserCertificate& sc : d->stabiliser_evidence) {
      json e;
      e["subspace"] = sc.subspace;
      json per = json::array();
      for (const Int& q : sc.certificate.period) per.push_back(q.get_str());
      e["period"] = per;
      ev.push_back(e);
    }
    dd["stabiliser_certificates"] = ev;
    j["D"] = dd;
  }
  if (df) {
    json dd;
    dd["overall"] = verdict_string(df->overall);
    dd["scale_N"] = df->scale_N;
    json fs = json::array();
    for (const FactorCheck& fc : df->factors) fs.push_back(factor_json(fc));
    dd["factors"] = fs;
    j["D_F"] = dd;
  }
  if (flag) {
    json dd;
    dd["overall"] = verdict_string(flag->overall);
    json runs = json::array();
    for (const FlagConditionRun& r : flag->runs) {
      json e;
      e["flags"] = {r.flag0_a, r.flag0_b};
      e["factor"] = r.factor;
      e["verdict"] = verdict_string(r.verdict);
      e["targets"] = r.estimate.targets.size();
      runs.push_back(e);
    }
    dd["runs"] = runs;
    j["flag_condition"] = dd;
  }
  j["homogeneity"] =
      rep.homogeneity.kind == HomogeneityVerdict::Homogeneous
          ? "homogeneous"
          : rep.homogeneity.kind == HomogeneityVerdict::WeaklyHomogeneous
                ? "weakly-homogeneous"
                : rep.homogeneity.kind == HomogeneityVerdict::NotWithinBound
                      ? "not-within-bound"
                      : "not-applicable";
  j["LR"] = lr_line;
  return j.dump(2);
}

std::string csv_quote(const std::string& s) {
  bool need = s.find_first_of(",\"\n\r") != std::string::npos;
  if (!need) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string double_decimal(double v, int digits) {
  // exact binary value of the double, then exact decimal rounding
  if (!std::isfinite(v)) return "nan";
  Rat r;
  mpq_set_d(r.get_mpq_t(), v);
  return decimal_string(r, digits);
}

namespace {

std::string fs_decimal(const Fs& v, int digits) {
  // certified enclosure narrow enough that rounding is stable except exactly
  // at ties, which the rational fast path resolves
  if (v.is_rational()) return decimal_string(v.rational(), digits);
  for (unsigned bits = 96;; bits *= 2) {
    QInterval e = v.enclosure(bits);
    std::string a = decimal_string(e.lo, digits);
    std::string b = decimal_string(e.hi, digits);
    if (a == b) return a;
    if (bits > (1u << 18))
      return a;  // irrational tie-chasing cap; enclosure already 2^-262144
  }
}

}  // namespace

void write_points_csv(std::ostream& os, const Scheme& s,
                      const PointPattern& pat, int precision) {
  for (int i = 0; i < s.d; ++i) os << "x" << (i + 1) << ",";
  os << "label";
  for (int i = 0; i < s.k; ++i) os << ",g" << (i + 1);
  os << "\n";
  for (const PatternPoint& p : pat.points) {
    for (int i = 0; i < s.d; ++i)
      os << fs_decimal(p.physical(i), precision) << ",";
    os << csv_quote(p.label.value_or(""));
    for (int i = 0; i < s.k; ++i) os << "," << p.lattice(i).get_str();
    os << "\n";
  }
}

void write_complexity_csv(std::ostream& os, const ComplexityTable& t,
                          int precision) {
  os << "r,p_hat,p_hat_over_r_alpha\n";
  for (const ComplexityRow& row : t.rows)
    os << rational_string(row.r) << "," << row.p_hat << ","
       << double_decimal(row.ratio, precision) << "\n";
}

void write_repetitivity_csv(std::ostream& os, const RepetitivityTable& t,
                            int precision) {
  os << "r,rho_hat,rho_hat_over_r,insufficient_box\n";
  for (const RepetitivityRow& row : t.rows)
    os << rational_string(row.r) << "," << double_decimal(row.rho_hat, precision)
       << "," << double_decimal(row.ratio, precision) << ","
       << (row.insufficient_box ? "1" : "0") << "\n";
}

void write_cutregions_csv(std::ostream& os, const std::vector<PWRow>& pw,
                          const std::vector<CutRegionCensus>& census,
                          int precision) {
  os << "r,region_count,cutter_count,min_volume,pw_product\n";
  for (size_t i = 0; i < pw.size(); ++i) {
    os << rational_string(pw[i].r) << "," << census[i].region_count << ","
       << census[i].cutter_count << "," << fs_decimal(pw[i].min_volume, precision)
       << "," << fs_decimal(pw[i].product, precision) << "\n";
  }
}

void write_dioph_csv(std::ostream& os, const DiophantineEstimate& est,
                     int precision) {
  os << "R,target_index,c_R,witness_coords\n";
  for (const DiophRecord& rec : est.records) {
    for (size_t t = 0; t < rec.best.size(); ++t) {
      os << rational_string(rec.radius) << "," << t << ",";
      const DiophWitness& w = rec.best[t];
      os << double_decimal(w.value, precision) << ",";
      std::string coords;
      for (int i = 0; i < w.coords.size(); ++i) {
        if (i) coords += " ";
        coords += w.coords(i).get_str();
      }
      os << csv_quote(coords) << "\n";
    }
  }
}

}  // namespace cps
