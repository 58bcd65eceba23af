#include "diag/json_io.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace diag {

using nlohmann::json;

json xnat_to_json(const XNat& x) {
  if (x.is_inf()) return json("inf");
  if (x.v <= Int(9007199254740992LL)) return json(static_cast<std::int64_t>(x.v));
  return json(x.v.str());  // too large for a JSON number: string fallback
}

XNat xnat_from_json(const json& j) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf") return XNat::infinity();
    return XNat(Int(s));
  }
  if (j.is_number_unsigned() || j.is_number_integer()) {
    std::int64_t n = j.get<std::int64_t>();
    return XNat(Int(n));
  }
  throw std::invalid_argument("count must be a nonnegative integer or \"inf\"");
}

namespace {

json comp_to_json(const TailComp& c) {
  json j;
  if (const auto* z = std::get_if<ZeroTail>(&c)) {
    j["kind"] = "zeros";
    j["count"] = xnat_to_json(z->count);
  } else if (const auto* g = std::get_if<GeometricTail>(&c)) {
    j["kind"] = "geo";
    j["first"] = rat_str(g->first);
    j["ratio"] = rat_str(g->ratio);
  } else if (const auto* p = std::get_if<PowerTail>(&c)) {
    j["kind"] = "pow";
    j["coefficient"] = rat_str(p->coefficient);
    j["exponent"] = rat_str(p->exponent);
    j["offset"] = p->offset.str();
  } else {
    const auto& e = std::get<EchoGeoTail>(c);
    j["kind"] = "echo";
    j["first"] = rat_str(e.first);
    j["ratio"] = rat_str(e.ratio);
  }
  return j;
}

TailComp comp_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "zeros") return ZeroTail{xnat_from_json(j.at("count"))};
  if (kind == "geo")
    return GeometricTail{parse_rat(j.at("first").get<std::string>()),
                         parse_rat(j.at("ratio").get<std::string>())};
  if (kind == "pow") {
    Int off = 0;
    const json& o = j.at("offset");
    if (o.is_string()) off = Int(o.get<std::string>());
    else off = Int(o.get<std::int64_t>());
    return PowerTail{parse_rat(j.at("coefficient").get<std::string>()),
                     parse_rat(j.at("exponent").get<std::string>()), off};
  }
  if (kind == "echo")
    return EchoGeoTail{parse_rat(j.at("first").get<std::string>()),
                       parse_rat(j.at("ratio").get<std::string>())};
  throw std::invalid_argument("unknown tail component kind: " + kind);
}

json tail_to_json(const TailSpec& t) {
  json comps = json::array();
  for (const auto& c : t.comps) comps.push_back(comp_to_json(c));
  return json{{"comps", comps}};
}

TailSpec tail_from_json(const json& j) {
  TailSpec t;
  if (j.is_null()) return t;
  for (const auto& c : j.at("comps")) t.comps.push_back(comp_from_json(c));
  return t;
}

const char* tri_json(Tri t) {
  return t == Tri::True ? "holds" : t == Tri::False ? "fails" : "unknown";
}

}  // namespace

json sequence_to_json(const ExtendedSequence& s) {
  json prefix = json::array();
  for (const Rat& x : s.prefix) prefix.push_back(rat_str(x));
  return json{{"prefix", prefix},
              {"pos_tail", tail_to_json(s.positive_tail)},
              {"neg_tail", tail_to_json(s.negative_tail)},
              {"zeros", xnat_to_json(s.zero_count)}};
}

ExtendedSequence sequence_from_json(const json& j) {
  ExtendedSequence s;
  if (j.contains("prefix"))
    for (const auto& x : j.at("prefix")) s.prefix.push_back(parse_rat(x.get<std::string>()));
  if (j.contains("pos_tail")) s.positive_tail = tail_from_json(j.at("pos_tail"));
  if (j.contains("neg_tail")) s.negative_tail = tail_from_json(j.at("neg_tail"));
  if (j.contains("zeros")) s.zero_count = xnat_from_json(j.at("zeros"));
  validate_sequence(s);
  return s;
}

json verdict_to_json(const Verdict& v) {
  json conds;
  for (int i = 0; i < 6; ++i) {
    json c{{"status", tri_json(v.trace.p[i].status)}};
    if (!v.trace.p[i].witness.empty()) c["witness"] = v.trace.p[i].witness;
    conds["p" + std::to_string(i + 1)] = c;
  }
  json splits = json::array();
  for (const auto& so : v.splittings_examined) {
    json s{{"z0", xnat_to_json(so.split.z0)},
           {"z1", xnat_to_json(so.split.z1)},
           {"z2", xnat_to_json(so.split.z2)},
           {"positive", kernel_out_name(so.pos.out)},
           {"negative", kernel_out_name(so.neg.out)}};
    if (!so.pos.witness.empty()) s["positive_witness"] = so.pos.witness;
    if (!so.neg.witness.empty()) s["negative_witness"] = so.neg.witness;
    splits.push_back(s);
  }
  return json{{"schema", 1},
              {"outcome", outcome_name(v.outcome)},
              {"conditions", conds},
              {"sigma_plus", v.trace.excess.sigma_plus.str()},
              {"sigma_minus", v.trace.excess.sigma_minus.str()},
              {"splittings", splits},
              {"precision_level", v.precision_level},
              {"note", v.note}};
}

json problem_to_json(const ProblemSpec& p) {
  return json{{"lambda", sequence_to_json(p.lambda)},
              {"d", sequence_to_json(p.d)},
              {"options",
               {{"precision", p.options.precision_level},
                {"truncation", p.options.truncation},
                {"format", p.options.format}}}};
}

ProblemSpec problem_from_json(const json& j) {
  ProblemSpec p;
  p.lambda = sequence_from_json(j.at("lambda"));
  p.d = sequence_from_json(j.at("d"));
  if (j.contains("options")) {
    const json& o = j.at("options");
    if (o.contains("precision")) p.options.precision_level = o.at("precision").get<int>();
    if (o.contains("truncation")) p.options.truncation = o.at("truncation").get<long>();
    if (o.contains("format")) p.options.format = o.at("format").get<std::string>();
  }
  if (p.options.precision_level < 1 || p.options.precision_level > 3)
    throw std::invalid_argument("options.precision must be 1, 2, or 3");
  if (p.options.truncation < 1)
    throw std::invalid_argument("options.truncation must be positive");
  if (p.options.format != "text" && p.options.format != "json")
    throw std::invalid_argument("options.format must be \"text\" or \"json\"");
  return p;
}

json matrix_to_json(const SymMat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.n; ++j) row.push_back(m.at(i, j));
    rows.push_back(row);
  }
  return json{{"n", m.n}, {"rows", rows}};
}

SymMat matrix_from_json(const json& j) {
  std::size_t n = j.at("n").get<std::size_t>();
  SymMat m(n);
  const json& rows = j.at("rows");
  if (rows.size() != n) throw std::invalid_argument("matrix rows do not match n");
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw std::invalid_argument("matrix row length mismatch");
    for (std::size_t k = 0; k < n; ++k) m.at(i, k) = rows[i][k].get<double>();
  }
  return m;
}

std::string matrix_to_text(const SymMat& m) {
  std::string out = std::to_string(m.n) + "\n";
  char buf[40];
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m.at(i, j));
      out += buf;
      out += (j + 1 < m.n) ? ' ' : '\n';
    }
  }
  return out;
}

SymMat matrix_from_text(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0;
  if (!(in >> n)) throw std::invalid_argument("matrix text: missing dimension");
  SymMat m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(in >> m.at(i, j))) throw std::invalid_argument("matrix text: truncated");
  return m;
}

json build_trace_to_json(const BuildTrace& t, const RealizationReport* rep) {
  json target = json::array(), alphas = json::array(), achieved = json::array();
  for (const Rat& x : t.target) target.push_back(rat_str(x));
  for (const Rat& x : t.alphas) alphas.push_back(rat_str(x));
  for (double x : t.achieved_diagonal) achieved.push_back(x);
  json j{{"schema", 1},
         {"n", t.matrix.n},
         {"target", target},
         {"achieved_diagonal", achieved},
         {"alphas", alphas},
         {"moves", t.chain.moves.size()},
         {"residual_entry", t.residual_entry},
         {"residual_exact", rat_str(t.residual_exact)}};
  if (t.c_bound_finite) j["c_bound"] = rat_str(t.c_bound);
  if (rep)
    j["verification"] = json{{"eigen_residual", rep->eigen_residual},
                             {"diag_residual", rep->diag_residual},
                             {"off_residual", rep->off_residual},
                             {"sweeps", rep->sweeps}};
  return j;
}

}  // namespace diag
