#include "credal/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>

#include <CLI11.hpp>

#include "credal/coherence.hpp"
#include "credal/dominance.hpp"
#include "credal/error.hpp"
#include "credal/families.hpp"
#include "credal/json_io.hpp"

namespace credal::cli {

namespace {

using io::Json;

struct Inputs {
  std::string credence;
  std::string other;
  std::string space;
  std::string measure;
  std::string example;
  std::string mode = "float";
  double tolerance = -1.0;  // negative: library default
  std::size_t truncation = 0;
  std::uint64_t seed = kDefaultSeed;
  std::size_t jobs = 1;
  std::optional<std::size_t> budget;  // stability 1000, reproduce 10^4
  std::size_t tarski = 0;
  std::size_t series_terms = kDefaultSeriesTruncation;
  double series_tolerance = kDefaultSeriesTolerance;
  bool repair = false;
  std::optional<std::size_t> samples;

  Mode parsed_mode() const { return parse_mode(mode); }
  SeriesPolicy series() const { return SeriesPolicy{series_terms, series_tolerance}; }
};

/// -s wins; otherwise the credence document's inline space.
OpinionSpace load_space(const Inputs& in) {
  if (!in.space.empty()) return io::parse_space(io::read_file(in.space), in.space);
  if (!in.credence.empty()) {
    if (auto s = io::credence_space(io::read_file(in.credence), in.credence)) return *s;
  }
  throw io::ParseError("arguments", "no opinion space: pass -s or inline \"space\" in the credence document");
}

std::size_t truncation_for(const Inputs& in, const OpinionSpace& space) {
  return in.truncation ? in.truncation : space.truncation_default();
}

Json status_json(const CoherenceVerdict& v, const OpinionSpace& space, Mode mode) {
  Json j;
  j["status"] = to_string(v.status);
  j["exact"] = v.exact;
  if (v.witness) {
    const auto& w = *v.witness;
    Json atoms = Json::array();
    for (std::size_t k = 0; k < w.weights.size(); ++k) {
      const Rational* e = k < w.exact_weights.size() ? &w.exact_weights[k] : nullptr;
      atoms.push_back({{"world", io::world_to_json(w.atoms[k], space)}, {"weight", io::number(w.weights[k], e, mode)}});
    }
    j["witness"] = {{"atoms", atoms},
                    {"residual", io::number(w.residual, v.exact ? &w.exact_residual : nullptr, mode)},
                    {"residual_in_every_proposition", w.residual_in_every_proposition}};
  }
  if (v.violation) {
    const auto& pv = *v.violation;
    auto ids = [](const std::vector<std::size_t>& xs) {
      Json a = Json::array();
      for (auto x : xs) a.push_back(x == PartialMeasureViolation::kWholeSpace ? Json("W") : Json(x + 1));
      return a;
    };
    j["violation"] = {{"phis", ids(pv.phis)},
                      {"psis", ids(pv.psis)},
                      {"lhs", io::number(pv.lhs_sum, &pv.exact_lhs, mode)},
                      {"rhs", io::number(pv.rhs_sum, &pv.exact_rhs, mode)}};
  }
  if (v.separation) {
    const auto& s = *v.separation;
    Json y = Json::array();
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      y.push_back(io::number(s.y[i], i < s.exact_y.size() ? &s.exact_y[i] : nullptr, mode));
    }
    j["separation"] = {{"y", y},
                       {"threshold", io::number(s.threshold, s.exact_y.empty() ? nullptr : &s.exact_threshold, mode)}};
  }
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

/// Finite credences as a list; rule credences as their first K values plus the limit.
Json credence_json(const Credence& c, const OpinionSpace& space, std::size_t K, Mode mode) {
  const std::size_t n = space.proposition_count().value_or(K);
  Json values = Json::array();
  if (!c.is_rule()) {
    for (std::size_t i = 0; i < c.size(); ++i) values.push_back(io::number(c.at(i), &c.exact_values()[i], mode));
    return values;
  }
  const CredenceRule& rule = *c.rule();
  const std::size_t shown = std::max(n, rule.kind == RuleKind::List ? rule.values.size() : 0);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto e = rule.exact_at(i);
    values.push_back(io::number(c.at(i), e ? &*e : nullptr, mode));
  }
  Json j{{"rule", to_string(rule.kind)}, {"values", values}};
  if (const auto lim = c.exact_limit()) j["tail"] = io::number(*lim, mode);
  return j;
}

Json verdict_json(const DominanceVerdict& v, const OpinionSpace& space, Mode mode) {
  Json per = Json::array();
  for (const auto& a : v.per_atom) {
    Json j{{"atom", a.atom}, {"world", io::world_to_json(a.world, space)}};
    if (a.exact_c && a.exact_d && mode == Mode::Rational) {
      j["score_c"] = {{"value", io::number(*a.exact_c, mode)}};
      j["score_d"] = {{"value", io::number(*a.exact_d, mode)}};
    } else {
      j["score_c"] = io::score_to_json(a.score_c);
      j["score_d"] = io::score_to_json(a.score_d);
    }
    j["comparison"] = a.comparison;
    j["resolved"] = a.resolved;
    per.push_back(j);
  }
  return per;
}

Json projection_json(const ProjectionResult& pr, const OpinionSpace& space, std::size_t K, Mode mode) {
  Json j;
  if (mode == Mode::Rational && !pr.exact_pi.empty()) {
    Json pi = Json::array();
    for (const auto& v : pr.exact_pi) pi.push_back(io::number(v, mode));
    j["pi_c"] = pi;
  } else {
    j["pi_c"] = credence_json(pr.pi_c, space, K, Mode::Float);
  }
  j["gap"] = pr.exact_gap ? io::number(*pr.exact_gap, mode) : io::number(pr.gap, nullptr, Mode::Float);
  j["converged"] = pr.converged;
  j["iterations"] = pr.iterations;
  j["frank_wolfe_gap"] = pr.fw_gap;
  Json lambda = Json::array();
  for (std::size_t k = 0; k < pr.lambda.weights.size(); ++k) {
    if (pr.lambda.weights[k] == 0.0) continue;
    const Rational* e = k < pr.lambda.exact_weights.size() ? &pr.lambda.exact_weights[k] : nullptr;
    lambda.push_back({{"world", io::world_to_json(pr.lambda.atoms[k], space)},
                      {"weight", io::number(pr.lambda.weights[k], e, mode)}});
  }
  j["lambda"] = lambda;
  j["pythagorean_worst_slack"] = pr.pythagorean.exact_worst_slack
                                     ? io::number(*pr.pythagorean.exact_worst_slack, mode)
                                     : Json(pr.pythagorean.worst_slack);
  j["pythagorean_holds"] = pr.pythagorean.holds;
  return j;
}

int verb_coherence(const Inputs& in, Json& report, std::ostream& err) {
  const OpinionSpace space = load_space(in);
  const Credence c = io::parse_credence(io::read_file(in.credence), in.credence);
  CoherenceOptions co;
  co.mode = in.parsed_mode();
  if (in.tolerance >= 0) co.tolerance = in.tolerance;
  if (in.truncation) co.truncation = in.truncation;
  const CoherenceVerdict fin = check_coherence(c, space, co);
  report["coherence"] = status_json(fin, space, co.mode);
  const CoherenceVerdict cnt = check_countable_coherence(c, space, co);
  report["countable_coherence"] = status_json(cnt, space, co.mode);
  err << "coherence: " << to_string(fin.status) << ", countable: " << to_string(cnt.status) << "\n";
  if (in.tarski) {
    const auto v = check_partial_measure(c, space, in.tarski, co.mode);
    TarskiOracle oracle(space, in.tarski);
    Json t{{"tuple_length", in.tarski},
           {"inclusions", oracle.inclusion_count()},
           {"violations", v.size()},
           {"partial_measure", v.empty()}};
    report["tarski"] = t;
    err << "partial-measure oracle: " << (v.empty() ? "no violation" : std::to_string(v.size()) + " violations")
        << "\n";
  }
  return kExitOk;
}

int verb_score(const Inputs& in, Json& report, std::ostream& err) {
  const OpinionSpace space = load_space(in);
  const Credence c = io::parse_credence(io::read_file(in.credence), in.credence);
  const InaccuracyMeasure m = io::parse_measure(io::read_file(in.measure), in.measure);
  m.validate();
  c.validate();
  const Mode mode = in.parsed_mode();
  const std::size_t K = truncation_for(in, space);
  const Quotient q = build_quotient(space, K);
  const bool exact = mode == Mode::Rational && m.generator.is_pure_quadratic() && space.proposition_count() &&
                     !c.is_rule();

  std::vector<Json> rows(q.atoms.size());
  auto work = [&](std::size_t k) {
    const WorldPoint& w = q.atoms[k].representative;
    Json j{{"atom", k}, {"world", io::world_to_json(w, space)}};
    if (exact) {
      j["score"] = {{"value", io::number(score_exact(c, m, w, space), mode)}};
    } else if (space.proposition_count()) {
      j["score"] = io::score_to_json(score(c, m, w, space));
    } else {
      j["score"] = io::score_to_json(score_countable(c, m, w, space, in.series()));
    }
    rows[k] = std::move(j);
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(in.jobs, q.atoms.size()));
  if (jobs == 1) {
    for (std::size_t k = 0; k < q.atoms.size(); ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(jobs);
    for (std::size_t t = 0; t < jobs; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t k = t; k < q.atoms.size(); k += jobs) work(k);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  Json per = Json::array();
  for (auto& r : rows) per.push_back(std::move(r));
  report["measure"] = m.name;
  report["per_atom"] = per;
  err << "scored " << q.atoms.size() << " atoms\n";
  return kExitOk;
}

ProjectionOptions projection_options(const Inputs& in, const OpinionSpace& space) {
  ProjectionOptions po;
  po.mode = in.parsed_mode();
  if (in.tolerance >= 0) po.tolerance = in.tolerance;
  po.truncation = space.proposition_count() ? 0 : truncation_for(in, space);
  return po;
}

int verb_project(const Inputs& in, Json& report, std::ostream& err) {
  const OpinionSpace space = load_space(in);
  const Credence c = io::parse_credence(io::read_file(in.credence), in.credence);
  const InaccuracyMeasure m = io::parse_measure(io::read_file(in.measure), in.measure);
  const ProjectionOptions po = projection_options(in, space);
  const ProjectionResult pr = project_coherent(c, m, space, po);
  const Json pj = projection_json(pr, space, truncation_for(in, space), po.mode);
  for (const auto& [k, v] : pj.items()) report[k] = v;
  Json slack = Json::array();
  for (double s : pr.pythagorean.slack) slack.push_back(s);
  report["pythagorean_slack"] = slack;
  err << "projection gap " << pr.gap << ", pythagorean " << (pr.pythagorean.holds ? "holds" : "FAILS") << "\n";
  return kExitOk;
}

int verb_dominance(const Inputs& in, Json& report, std::ostream& err) {
  const OpinionSpace space = load_space(in);
  const Credence c = io::parse_credence(io::read_file(in.credence), in.credence);
  const InaccuracyMeasure m = io::parse_measure(io::read_file(in.measure), in.measure);
  const Mode mode = in.parsed_mode();
  const std::size_t K = truncation_for(in, space);
  if (in.repair) {
    const DominatorResult r = find_dominator(c, m, space, projection_options(in, space));
    report["verdict"] = to_string(r.verdict.relation);
    report["per_atom"] = verdict_json(r.verdict, space, mode);
    report["omniscient"] = r.omniscient;
    if (r.projection) {
      const Json pj = projection_json(*r.projection, space, K, mode);
      report["pi_c"] = pj["pi_c"];
      report["gap"] = pj["gap"];
      report["pythagorean_worst_slack"] = pj["pythagorean_worst_slack"];
    } else {
      report["dominator"] = credence_json(r.dominator, space, K, mode);
    }
    err << "dominator: " << to_string(r.verdict.relation) << "\n";
    return kExitOk;
  }
  if (in.other.empty()) {
    throw io::ParseError("arguments", "dominance needs -d <credence> or --repair");
  }
  const Credence d = io::parse_credence(io::read_file(in.other), in.other);
  CompareOptions co;
  co.mode = mode;
  co.truncation = space.proposition_count() ? 0 : K;
  co.series = in.series();
  if (in.tolerance >= 0) co.tie_tolerance = in.tolerance;
  const DominanceVerdict v = compare(c, d, m, space, co);
  report["verdict"] = to_string(v.relation);
  report["per_atom"] = verdict_json(v, space, mode);
  report["exact"] = v.exact;
  err << "d over c: " << to_string(v.relation) << "\n";
  return kExitOk;
}

int verb_compactify(const Inputs& in, Json& report, std::ostream& err) {
  const OpinionSpace space = load_space(in);
  const Compactification comp = compactify(space);
  Json pts = Json::array();
  for (std::size_t i = 0; i < comp.added_points.size(); ++i) {
    const auto& p = comp.added_points[i];
    pts.push_back({{"label", p.label}, {"sequence", p.sequence}, {"in_every_proposition", comp.star_signatures[i]}});
  }
  report["base"] = io::space_to_json(comp.base);
  report["added_points"] = pts;
  report["psi"] = "identity on proposition indices";
  const CompactnessReport before = search_compactness_witness(space);
  const CompactnessReport after = search_compactness_witness(comp.space);
  report["base_compactness"] = to_string(before.verdict);
  report["compactness"] = to_string(after.verdict);
  report["space"] = io::space_to_json(comp.space);
  err << "added " << comp.added_points.size() << " point(s); result " << to_string(after.verdict) << "\n";
  return kExitOk;
}

int verb_quotient(const Inputs& in, Json& report, std::ostream& err) {
  const OpinionSpace space = load_space(in);
  const std::size_t K = truncation_for(in, space);
  const Quotient q = build_quotient(space, K);
  Json atoms = Json::array();
  for (const auto& a : q.atoms) {
    atoms.push_back({{"id", a.id}, {"world", io::world_to_json(a.representative, space)}, {"signature", a.signature}});
  }
  report["propositions"] = q.propositions;
  report["exact"] = q.exact;
  report["atoms"] = atoms;
  const StructureFlags f = analyze_structure(space);
  report["structure"] = {{"point_finite", f.point_finite},
                         {"countably_discriminating", f.countably_discriminating},
                         {"is_partition", f.is_partition},
                         {"nested_increasing", f.nested_increasing},
                         {"nested_decreasing", f.nested_decreasing}};
  const CompactnessReport cr = search_compactness_witness(space);
  Json compact{{"verdict", to_string(cr.verdict)}, {"depth_searched", cr.depth_searched}};
  if (!cr.certificate.empty()) compact["certificate"] = cr.certificate;
  if (cr.witness) {
    compact["witness"] = {{"rule", cr.witness->rule},
                          {"prefix_witnesses", cr.witness->prefix_witnesses},
                          {"emptiness", cr.witness->emptiness_evidence}};
  }
  report["compactness"] = compact;
  err << q.atoms.size() << " atoms over " << q.propositions << " propositions\n";
  return kExitOk;
}

int verb_stability(const Inputs& in, Json& report, std::ostream& err) {
  const OpinionSpace space = load_space(in);
  const InaccuracyMeasure m =
      in.measure.empty() ? InaccuracyMeasure::brier() : io::parse_measure(io::read_file(in.measure), in.measure);
  const Mode mode = in.parsed_mode();
  const auto facts = stability_report(space, m, in.budget.value_or(1000), in.seed);
  Json out = Json::array();
  for (const auto& f : facts) {
    Json j{{"space_kind", to_string(f.space_kind)},
           {"property", to_string(f.property)},
           {"status", to_string(f.status)},
           {"source", f.source},
           {"searched", f.searched}};
    Json ws = Json::array();
    for (const auto& w : f.witnesses) {
      const std::size_t K = space.truncation_default();
      ws.push_back({{"c", credence_json(w.c, space, K, mode)},
                    {"d", credence_json(w.d, space, K, mode)},
                    {"base", to_string(w.base.relation)},
                    {"compacted", to_string(w.compacted.relation)},
                    {"reason", w.reason}});
    }
    j["witnesses"] = ws;
    out.push_back(j);
    err << to_string(f.property) << ": " << to_string(f.status) << "\n";
  }
  report["facts"] = out;
  return kExitOk;
}

int verb_reproduce(const Inputs& in, Json& report, std::ostream& err) {
  ReproduceOptions ro;
  ro.seed = in.seed;
  ro.mode = in.parsed_mode();
  if (in.truncation) ro.truncation = in.truncation;
  ro.samples = in.samples;
  if (in.budget) ro.search_budget = *in.budget;
  const ExampleReport r = reproduce_example(in.example, ro);
  Json as = Json::array();
  for (const auto& a : r.assertions) {
    as.push_back({{"name", a.name}, {"pass", a.pass}, {"details", a.details}});
    err << (a.pass ? "PASS " : "FAIL ") << a.name << "\n";
  }
  report["id"] = r.id;
  report["all_pass"] = r.all_pass();
  report["assertions"] = as;
  report["data"] = r.data;
  return r.all_pass() ? kExitOk : kExitAssertionFailed;
}

const std::vector<std::pair<std::string, std::function<int(const Inputs&, Json&, std::ostream&)>>>& table() {
  static const std::vector<std::pair<std::string, std::function<int(const Inputs&, Json&, std::ostream&)>>> t = {
      {"coherence", verb_coherence}, {"score", verb_score},         {"project", verb_project},
      {"dominance", verb_dominance}, {"compactify", verb_compactify}, {"quotient", verb_quotient},
      {"stability", verb_stability}, {"reproduce", verb_reproduce},
  };
  return t;
}

void error_report(std::ostream& out, std::string_view name, const std::string& message,
                  const std::string& location = {}) {
  Json j{{"error", name}, {"message", message}};
  if (!location.empty()) j["location"] = location;
  out << io::dump(j) << "\n";
}

}  // namespace

std::vector<std::string> verbs() {
  std::vector<std::string> out;
  for (const auto& [name, _] : table()) out.push_back(name);
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  // the verb is checked before anything else, files included
  if (args.empty() || args.front() == "-h" || args.front() == "--help") {
    err << "usage: credal <verb> [options]\nverbs:";
    for (const auto& v : verbs()) err << " " << v;
    err << "\n";
    return args.empty() ? kExitParse : kExitOk;
  }
  const std::string verb = args.front();
  const auto entry = std::find_if(table().begin(), table().end(), [&](const auto& e) { return e.first == verb; });
  if (entry == table().end()) {
    error_report(out, "parse-error", "unknown verb '" + verb + "'", "argv[1]");
    err << "unknown verb '" << verb << "'\n";
    return kExitParse;
  }

  Inputs in;
  CLI::App app("credal " + verb);
  app.add_option("-c,--credence", in.credence, "credence document");
  app.add_option("-s,--space", in.space, "opinion space document");
  app.add_option("-m,--measure", in.measure, "inaccuracy measure document");
  app.add_option("--mode", in.mode, "float or rational")->check(CLI::IsMember({"float", "rational"}));
  app.add_option("--tolerance", in.tolerance, "numeric tolerance");
  app.add_option("--truncation", in.truncation, "propositions considered on countable families");
  app.add_option("--seed", in.seed, "random seed");
  app.add_option("--series-terms", in.series_terms, "terms summed before a series is reported partial");
  app.add_option("--series-tolerance", in.series_tolerance, "tail bound accepted as converged");
  if (verb == "coherence") app.add_option("--tarski", in.tarski, "also run the partial-measure oracle up to this tuple length");
  if (verb == "score") app.add_option("--jobs", in.jobs, "worker threads for per-atom scoring");
  if (verb == "dominance") {
    app.add_option("-d,--other", in.other, "candidate dominator document");
    app.add_flag("--repair", in.repair, "construct a dominator");
  }
  if (verb == "stability" || verb == "reproduce") app.add_option("--budget", in.budget, "search budget");
  if (verb == "reproduce") {
    app.add_option("example", in.example, "example id")->required();
    app.add_option("--samples", in.samples, "number of random instances");
  }

  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    error_report(out, "parse-error", e.what(), "arguments");
    err << e.what() << "\n";
    return kExitParse;
  }
  if (const char* env = std::getenv("CREDAL_SEED")) {
    try {
      in.seed = std::stoull(env, nullptr, 0);
    } catch (const std::exception&) {
      error_report(out, "parse-error", "CREDAL_SEED is not an integer", "CREDAL_SEED");
      return kExitParse;
    }
  }
  auto need = [&](const std::string& value, const char* flag) {
    if (value.empty()) throw io::ParseError("arguments", std::string(verb) + " needs " + flag);
  };

  try {
    if (verb == "compactify" || verb == "quotient" || verb == "stability") need(in.space, "-s <space>");
    if (verb == "coherence" || verb == "score" || verb == "project" || verb == "dominance") {
      need(in.credence, "-c <credence>");
    }
    if (verb == "score" || verb == "project" || verb == "dominance") need(in.measure, "-m <measure>");

    Json report;
    report["verb"] = verb;
    report["mode"] = in.mode;
    const int code = entry->second(in, report, err);
    out << io::dump(report) << "\n";
    return code;
  } catch (const io::ParseError& e) {
    error_report(out, "parse-error", e.what(), e.location());
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const CredalError& e) {
    error_report(out, e.name(), e.what());
    err << e.name() << ": " << e.what() << "\n";
    return kExitPrecondition;
  }
}

}  // namespace credal::cli
