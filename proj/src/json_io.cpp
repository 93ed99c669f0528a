#include "credal/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "credal/error.hpp"

namespace credal::io {

namespace {

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

class Reader {
 public:
  Reader(const Json& doc, std::string source) : doc_(doc), source_(std::move(source)) {}

  [[noreturn]] void error(const Json::json_pointer& at, const std::string& what) const {
    throw ParseError(source_ + "#" + at.to_string(), what);
  }

  const Json& get(const Json::json_pointer& at) const { return doc_.at(at); }
  bool has(const Json::json_pointer& at) const { return doc_.contains(at); }

  const Json& object(const Json::json_pointer& at) const {
    if (!has(at) || !get(at).is_object()) error(at, "expected an object");
    return get(at);
  }
  const Json& array(const Json::json_pointer& at) const {
    if (!has(at) || !get(at).is_array()) error(at, "expected an array");
    return get(at);
  }
  std::string string(const Json::json_pointer& at) const {
    if (!has(at) || !get(at).is_string()) error(at, "expected a string");
    return get(at).get<std::string>();
  }
  std::size_t count(const Json::json_pointer& at) const {
    if (!has(at) || !get(at).is_number_unsigned()) error(at, "expected a nonnegative integer");
    return get(at).get<std::size_t>();
  }
  std::int64_t integer(const Json::json_pointer& at) const {
    if (!has(at) || !get(at).is_number_integer()) error(at, "expected an integer");
    return get(at).get<std::int64_t>();
  }
  double real(const Json::json_pointer& at) const {
    if (!has(at) || !get(at).is_number()) error(at, "expected a number");
    return get(at).get<double>();
  }

  /// A JSON number is read as the shortest decimal that round-trips to it,
  /// which is the literal as written for ordinary inputs. Strings may hold
  /// "p/q" or a decimal.
  Rational rational(const Json::json_pointer& at) const {
    if (!has(at)) error(at, "missing value");
    const Json& v = get(at);
    try {
      if (v.is_number_integer()) return Rational(v.dump());
      if (v.is_number_float()) return parse_rational(v.dump());
      if (v.is_string()) return parse_rational(v.get<std::string>());
    } catch (const CredalError& e) {
      error(at, e.what());
    } catch (const std::invalid_argument& e) {
      error(at, e.what());
    }
    error(at, "expected a number or a \"p/q\" string");
  }

  std::vector<Rational> rationals(const Json::json_pointer& at) const {
    const Json& a = array(at);
    std::vector<Rational> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(rational(at / i));
    return out;
  }
  std::vector<double> reals(const Json::json_pointer& at) const {
    const Json& a = array(at);
    std::vector<double> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(real(at / i));
    return out;
  }

  void only(const Json::json_pointer& at, std::initializer_list<const char*> keys) const {
    for (const auto& [k, _] : object(at).items()) {
      bool known = false;
      for (const char* key : keys) known = known || k == key;
      if (!known) error(at / k, "unknown field");
    }
  }

  /// Library precondition failures while building from a well-formed
  /// document are reported as schema errors at `at`.
  template <typename F>
  auto build(const Json::json_pointer& at, F&& f) const {
    try {
      return f();
    } catch (const CredalError& e) {
      if (e.code() == ErrorCode::InvalidCredence) throw;
      error(at, e.what());
    }
  }

 private:
  const Json& doc_;
  std::string source_;
};

using P = Json::json_pointer;

void write_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
  // keep a float-looking literal
  if (std::string_view(buf).find_first_of(".eEn") == std::string_view::npos) out += ".0";
}

void write(std::string& out, const Json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(k).dump();
        out += indent < 0 ? ":" : ": ";
        write(out, v, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        newline(depth + 1);
        write(out, j[i], indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      write_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

Json parse_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::string what = e.what();
    const auto colon = what.find("] ");
    if (colon != std::string::npos) what = what.substr(colon + 2);
    throw ParseError(source + ":" + line_col(text, e.byte), what);
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

OpinionSpace parse_space(const Json& doc, const std::string& source) {
  Reader r(doc, source);
  const P root;
  r.object(root);
  const std::string kind_name = r.string(P("/kind"));
  SpaceKind kind;
  try {
    kind = parse_space_kind(kind_name);
  } catch (const CredalError& e) {
    r.error(P("/kind"), e.what());
  }
  const std::size_t K = r.has(P("/truncation")) ? r.count(P("/truncation")) : kDefaultTruncation;
  switch (kind) {
    case SpaceKind::ExplicitFinite: {
      r.only(root, {"kind", "worlds", "propositions"});
      std::vector<WorldLabel> worlds;
      for (std::size_t i = 0; i < r.array(P("/worlds")).size(); ++i) worlds.push_back(r.integer(P("/worlds") / i));
      std::vector<std::vector<WorldLabel>> props;
      const P pp("/propositions");
      for (std::size_t k = 0; k < r.array(pp).size(); ++k) {
        std::vector<WorldLabel> members;
        for (std::size_t i = 0; i < r.array(pp / k).size(); ++i) members.push_back(r.integer(pp / k / i));
        props.push_back(std::move(members));
      }
      return r.build(pp, [&] { return OpinionSpace::explicit_finite(worlds, props); });
    }
    case SpaceKind::TailSets:
      r.only(root, {"kind", "truncation"});
      return r.build(P("/truncation"), [&] { return OpinionSpace::tail_sets(K); });
    case SpaceKind::InitialSegments:
      r.only(root, {"kind", "truncation"});
      return r.build(P("/truncation"), [&] { return OpinionSpace::initial_segments(K); });
    case SpaceKind::CountablePartition: {
      r.only(root, {"kind", "family_params", "truncation"});
      std::optional<std::size_t> cells;
      const P cp("/family_params/cells");
      if (r.has(P("/family_params"))) r.only(P("/family_params"), {"cells"});
      if (r.has(cp) && !r.get(cp).is_null()) cells = r.count(cp);
      return r.build(cp, [&] { return OpinionSpace::partition(cells, K); });
    }
  }
  r.error(P("/kind"), "unsupported kind");
}

Credence parse_credence(const Json& doc, const std::string& source) {
  Reader r(doc, source);
  const P root;
  r.object(root);
  if (!r.has(P("/rule"))) {
    r.only(root, {"values", "space"});
    return Credence::finite_exact(r.rationals(P("/values")));
  }
  r.only(root, {"rule", "params", "declared_limit", "space"});
  RuleKind kind;
  try {
    kind = parse_rule_kind(r.string(P("/rule")));
  } catch (const CredalError& e) {
    r.error(P("/rule"), e.what());
  }
  const P params("/params");
  if (r.has(params)) r.only(params, {"value", "scale", "ratio", "values", "tail"});
  CredenceRule rule;
  switch (kind) {
    case RuleKind::Zero:
      rule = CredenceRule::zero();
      break;
    case RuleKind::Constant:
      rule = CredenceRule::constant(r.rational(params / "value"));
      break;
    case RuleKind::Geometric:
      rule = CredenceRule::geometric(r.rational(params / "scale"), r.rational(params / "ratio"));
      break;
    case RuleKind::InvSqrt:
      rule = CredenceRule::inv_sqrt();
      break;
    case RuleKind::ComplementGeometric:
      rule = CredenceRule::complement_geometric(r.rational(params / "scale"), r.rational(params / "ratio"));
      break;
    case RuleKind::List:
      rule = CredenceRule::list(r.rationals(params / "values"),
                                r.has(params / "tail") ? r.rational(params / "tail") : Rational(0));
      break;
  }
  std::optional<std::optional<double>> limit;
  if (r.has(P("/declared_limit"))) {
    if (r.get(P("/declared_limit")).is_null()) {
      limit = std::optional<double>{};
    } else {
      limit = std::optional<double>{r.real(P("/declared_limit"))};
    }
  }
  return Credence::from_rule(std::move(rule), limit);
}

InaccuracyMeasure parse_measure(const Json& doc, const std::string& source) {
  Reader r(doc, source);
  const P root;
  r.object(root);
  if (r.has(P("/preset"))) {
    r.only(root, {"preset", "name"});
    const std::string preset = r.string(P("/preset"));
    if (preset == "brier") return InaccuracyMeasure::brier();
    if (preset == "walsh") return InaccuracyMeasure::walsh();
    r.error(P("/preset"), "unknown preset '" + preset + "'");
  }
  r.only(root, {"name", "generator", "weights"});
  const P g("/generator");
  r.only(g, {"kind", "knots", "slopes", "shift"});
  const std::string gk = r.string(g / "kind");
  ConvexGenerator gen = ConvexGenerator::quadratic();
  if (gk == "quadratic") {
    gen = ConvexGenerator::quadratic();
  } else if (gk == "shifted_entropy") {
    gen = ConvexGenerator::shifted_entropy();
  } else if (gk == "tabulated") {
    if (r.has(g / "knots")) {
      gen = r.build(g, [&] { return ConvexGenerator::tabulated(r.reals(g / "knots"), r.reals(g / "slopes")); });
    } else {
      gen = ConvexGenerator::default_tabulated();
    }
  } else {
    r.error(g / "kind", "unknown generator '" + gk + "'");
  }
  if (r.has(g / "shift")) {
    const auto shift = r.reals(g / "shift");
    if (shift.size() != 2) r.error(g / "shift", "expected [a, b]");
    gen = gen.with_linear_shift(shift[0], shift[1]);
  }

  Weights w = Weights::constant(1.0);
  const P wp("/weights");
  if (r.has(wp)) {
    r.only(wp, {"rule", "params"});
    const P wpp = wp / "params";
    if (r.has(wpp)) r.only(wpp, {"value", "scale", "ratio", "values", "tail"});
    const std::string rule = r.string(wp / "rule");
    if (rule == "const") {
      w = Weights::constant(r.has(wpp / "value") ? r.real(wpp / "value") : 1.0);
    } else if (rule == "geometric") {
      w = Weights::geometric(r.real(wpp / "scale"), r.real(wpp / "ratio"));
    } else if (rule == "list") {
      w = Weights::from_list(r.reals(wpp / "values"));
      if (r.has(wpp / "tail")) w.value = r.real(wpp / "tail");
    } else {
      r.error(wp / "rule", "unknown weight rule '" + rule + "'");
    }
  }
  const std::string name = r.has(P("/name")) ? r.string(P("/name")) : std::string(gk);
  return InaccuracyMeasure::with(name, gen, w);
}

std::optional<OpinionSpace> credence_space(const Json& doc, const std::string& source) {
  if (!doc.is_object() || !doc.contains("space")) return std::nullopt;
  return parse_space(doc.at("space"), source + "#/space");
}

Json space_to_json(const OpinionSpace& space) {
  Json j;
  j["kind"] = to_string(space.kind());
  if (space.kind() == SpaceKind::ExplicitFinite) {
    j["worlds"] = space.worlds();
    Json props = Json::array();
    for (std::size_t k = 0; k < *space.proposition_count(); ++k) props.push_back(space.proposition(k).members);
    j["propositions"] = props;
  } else {
    if (space.partition_cells()) j["family_params"] = {{"cells", *space.partition_cells()}};
    j["truncation"] = space.truncation_default();
  }
  if (!space.added_points().empty()) {
    Json pts = Json::array();
    for (const auto& p : space.added_points()) {
      pts.push_back({{"label", p.label}, {"sequence", p.sequence}, {"in_every_proposition", p.in_every_proposition}});
    }
    j["added_points"] = pts;
  }
  return j;
}

Json world_to_json(const WorldPoint& world, const OpinionSpace& space) {
  if (world.is_added()) {
    const auto& pts = space.added_points();
    const std::size_t i = *world.added;
    return Json(i < pts.size() ? pts[i].label : "added:" + std::to_string(i));
  }
  return Json(world.label);
}

Json number(double value, const Rational* exact, Mode mode) {
  if (mode == Mode::Rational) return Json(to_fraction_string(exact ? *exact : to_rational(value)));
  return Json(value);
}

Json number(const Rational& exact, Mode mode) { return number(exact.get_d(), &exact, mode); }

Json score_to_json(const SeriesVerdict& v) {
  switch (v.status) {
    case SeriesStatus::Converged: {
      Json j{{"value", v.value}};
      if (v.tail_bound > 0.0) j["tail_bound"] = v.tail_bound;
      return j;
    }
    case SeriesStatus::Diverges:
      return Json{{"inf", true}, {"tag", v.tag}};
    case SeriesStatus::Partial:
      return Json{{"partial", v.value}, {"K", v.terms_used}};
  }
  return Json();
}

Json score_to_json(const ExtendedReal& v) {
  if (v.is_infinite()) return Json{{"inf", true}};
  return Json{{"value", v.value()}};
}

std::string dump(const Json& doc, int indent) {
  std::string out;
  write(out, doc, indent, 0);
  return out;
}

}  // namespace credal::io
