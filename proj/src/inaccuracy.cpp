#include "credal/inaccuracy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "credal/error.hpp"

namespace credal {

std::string to_string(const ExtendedReal& x) {
  if (x.is_infinite()) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x.value());
  return buf;
}

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::Quadratic:
      return "quadratic";
    case GeneratorKind::ShiftedEntropy:
      return "shifted_entropy";
    case GeneratorKind::Tabulated:
      return "tabulated";
  }
  return "quadratic";
}

std::string_view to_string(WeightRule rule) {
  switch (rule) {
    case WeightRule::Const:
      return "const";
    case WeightRule::Geometric:
      return "geometric";
    case WeightRule::List:
      return "list";
  }
  return "const";
}

std::string_view to_string(SeriesStatus status) {
  switch (status) {
    case SeriesStatus::Converged:
      return "converged";
    case SeriesStatus::Diverges:
      return "diverges";
    case SeriesStatus::Partial:
      return "partial";
  }
  return "partial";
}

void validate_divergence_args(double x, double y) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "divergence arguments must lie in [0,1]");
  }
}

// ---------------------------------------------------------------- generator

ConvexGenerator ConvexGenerator::quadratic() { return ConvexGenerator{}; }

ConvexGenerator ConvexGenerator::shifted_entropy() {
  ConvexGenerator g;
  g.kind_ = GeneratorKind::ShiftedEntropy;
  return g;
}

ConvexGenerator ConvexGenerator::tabulated(std::vector<double> knots, std::vector<double> slopes) {
  if (knots.size() < 2 || knots.size() != slopes.size()) {
    fail(ErrorCode::InvalidArgument, "tabulated generator needs matching knot and slope lists of length >= 2");
  }
  if (knots.front() != 0.0 || knots.back() != 1.0) {
    fail(ErrorCode::InvalidArgument, "tabulated knots must start at 0 and end at 1");
  }
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    if (!(knots[j + 1] > knots[j])) fail(ErrorCode::InvalidArgument, "tabulated knots must increase strictly");
    if (!(slopes[j + 1] > slopes[j])) {
      fail(ErrorCode::InvalidArgument, "tabulated slopes must increase strictly (strict convexity)");
    }
  }
  for (double s : slopes) {
    if (!std::isfinite(s)) fail(ErrorCode::InvalidArgument, "tabulated slopes must be finite");
  }
  ConvexGenerator g;
  g.kind_ = GeneratorKind::Tabulated;
  g.knots_ = std::move(knots);
  g.slopes_ = std::move(slopes);
  g.phi_at_knots_.assign(g.knots_.size(), 0.0);
  for (std::size_t j = 0; j + 1 < g.knots_.size(); ++j) {
    const double h = g.knots_[j + 1] - g.knots_[j];
    g.phi_at_knots_[j + 1] = g.phi_at_knots_[j] + 0.5 * h * (g.slopes_[j] + g.slopes_[j + 1]);
  }
  return g;
}

ConvexGenerator ConvexGenerator::default_tabulated() {
  return tabulated({0.0, 0.25, 0.5, 0.75, 1.0}, {0.0, 0.8, 2.0, 3.4, 5.4});
}

ConvexGenerator ConvexGenerator::with_linear_shift(double a, double b) const {
  ConvexGenerator g = *this;
  g.shift_a_ += a;
  g.shift_b_ += b;
  return g;
}

ConvexGenerator ConvexGenerator::normalized() const {
  const double d0 = derivative(0.0);
  if (!std::isfinite(d0)) fail(ErrorCode::UnsupportedMeasure, "generator derivative at 0 is infinite");
  return with_linear_shift(-d0, -phi(0.0));
}

bool ConvexGenerator::is_normalized(double tol) const {
  const double d0 = derivative(0.0);
  return std::isfinite(d0) && std::abs(phi(0.0)) <= tol && std::abs(d0) <= tol;
}

double ConvexGenerator::base_phi(double x) const {
  switch (kind_) {
    case GeneratorKind::Quadratic:
      return x * x;
    case GeneratorKind::ShiftedEntropy: {
      const double a = x > 0.0 ? x * std::log(x) : 0.0;
      const double b = x < 1.0 ? (1.0 - x) * std::log(1.0 - x) : 0.0;
      return a + b;
    }
    case GeneratorKind::Tabulated: {
      auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
      std::size_t j = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
      if (j + 1 >= knots_.size()) j = knots_.size() - 2;
      const double h = knots_[j + 1] - knots_[j];
      const double t = x - knots_[j];
      return phi_at_knots_[j] + slopes_[j] * t + (slopes_[j + 1] - slopes_[j]) * t * t / (2.0 * h);
    }
  }
  return 0.0;
}

double ConvexGenerator::base_derivative(double x) const {
  switch (kind_) {
    case GeneratorKind::Quadratic:
      return 2.0 * x;
    case GeneratorKind::ShiftedEntropy:
      if (x <= 0.0) return -std::numeric_limits<double>::infinity();
      if (x >= 1.0) return std::numeric_limits<double>::infinity();
      return std::log(x / (1.0 - x));
    case GeneratorKind::Tabulated: {
      auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
      std::size_t j = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
      if (j + 1 >= knots_.size()) j = knots_.size() - 2;
      const double h = knots_[j + 1] - knots_[j];
      return slopes_[j] + (slopes_[j + 1] - slopes_[j]) * (x - knots_[j]) / h;
    }
  }
  return 0.0;
}

double ConvexGenerator::phi(double x) const { return base_phi(x) + shift_a_ * x + shift_b_; }

double ConvexGenerator::derivative(double x) const { return base_derivative(x) + shift_a_; }

double ConvexGenerator::second_derivative(double x) const {
  switch (kind_) {
    case GeneratorKind::Quadratic:
      return 2.0;
    case GeneratorKind::ShiftedEntropy:
      if (x <= 0.0 || x >= 1.0) return std::numeric_limits<double>::infinity();
      return 1.0 / (x * (1.0 - x));
    case GeneratorKind::Tabulated: {
      auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
      std::size_t j = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
      if (j + 1 >= knots_.size()) j = knots_.size() - 2;
      return (slopes_[j + 1] - slopes_[j]) / (knots_[j + 1] - knots_[j]);
    }
  }
  return 0.0;
}

double ConvexGenerator::curvature_min() const {
  switch (kind_) {
    case GeneratorKind::Quadratic:
      return 2.0;
    case GeneratorKind::ShiftedEntropy:
      return 4.0;
    case GeneratorKind::Tabulated: {
      double lo = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j + 1 < knots_.size(); ++j) {
        lo = std::min(lo, (slopes_[j + 1] - slopes_[j]) / (knots_[j + 1] - knots_[j]));
      }
      return lo;
    }
  }
  return 0.0;
}

double ConvexGenerator::curvature_max() const {
  switch (kind_) {
    case GeneratorKind::Quadratic:
      return 2.0;
    case GeneratorKind::ShiftedEntropy:
      return std::numeric_limits<double>::infinity();
    case GeneratorKind::Tabulated: {
      double hi = 0.0;
      for (std::size_t j = 0; j + 1 < knots_.size(); ++j) {
        hi = std::max(hi, (slopes_[j + 1] - slopes_[j]) / (knots_[j + 1] - knots_[j]));
      }
      return hi;
    }
  }
  return 0.0;
}

ExtendedReal ConvexGenerator::divergence(double x, double y) const {
  validate_divergence_args(x, y);
  if (x == y) return ExtendedReal::finite(0.0);
  const bool shifted = shift_a_ != 0.0 || shift_b_ != 0.0;
  if (kind_ == GeneratorKind::Quadratic && !shifted) return ExtendedReal::finite((x - y) * (x - y));
  if (kind_ == GeneratorKind::ShiftedEntropy) {
    // Kullback-Leibler form; infinite when y sits at an endpoint x avoids
    if ((y == 0.0 && x > 0.0) || (y == 1.0 && x < 1.0)) return ExtendedReal::infinity();
    double d = 0.0;
    if (x > 0.0) d += x * std::log(x / y);
    if (x < 1.0) d += (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
    return ExtendedReal::finite(std::max(d, 0.0));
  }
  const double d = phi(x) - phi(y) - derivative(y) * (x - y);
  return ExtendedReal::finite(std::max(d, 0.0));
}

Rational ConvexGenerator::exact_divergence(const Rational& x, const Rational& y) const {
  if (kind_ != GeneratorKind::Quadratic) {
    fail(ErrorCode::UnsupportedMeasure, "exact divergence needs the quadratic generator");
  }
  Rational d = x - y;
  return d * d;
}

double ConvexGenerator::sup_divergence() const {
  const ExtendedReal a = divergence(1.0, 0.0);
  const ExtendedReal b = divergence(0.0, 1.0);
  if (a.is_infinite() || b.is_infinite()) return std::numeric_limits<double>::infinity();
  return std::max(a.value(), b.value());
}

// ------------------------------------------------------------------ weights

Weights Weights::constant(double v) {
  Weights w;
  w.value = v;
  return w;
}

Weights Weights::geometric(double scale, double ratio) {
  Weights w;
  w.rule = WeightRule::Geometric;
  w.scale = scale;
  w.ratio = ratio;
  return w;
}

Weights Weights::from_list(std::vector<double> values) {
  Weights w;
  w.rule = WeightRule::List;
  if (!values.empty()) w.value = values.back();
  w.list = std::move(values);
  return w;
}

double Weights::at(std::size_t index) const {
  switch (rule) {
    case WeightRule::Const:
      return value;
    case WeightRule::Geometric:
      return scale * std::pow(ratio, static_cast<double>(index + 1));
    case WeightRule::List:
      return index < list.size() ? list[index] : value;
  }
  return value;
}

double Weights::sup() const {
  switch (rule) {
    case WeightRule::Const:
      return value;
    case WeightRule::Geometric:
      return ratio <= 1.0 ? scale * ratio : std::numeric_limits<double>::infinity();
    case WeightRule::List: {
      double s = value;
      for (double v : list) s = std::max(s, v);
      return s;
    }
  }
  return value;
}

double Weights::inf() const {
  switch (rule) {
    case WeightRule::Const:
      return value;
    case WeightRule::Geometric:
      return ratio < 1.0 ? 0.0 : scale * ratio;
    case WeightRule::List: {
      double s = value;
      for (double v : list) s = std::min(s, v);
      return s;
    }
  }
  return value;
}

bool Weights::summable() const { return rule == WeightRule::Geometric && ratio < 1.0; }

double Weights::tail_sum(std::size_t from) const {
  if (!summable()) return std::numeric_limits<double>::infinity();
  return scale * std::pow(ratio, static_cast<double>(from + 1)) / (1.0 - ratio);
}

void Weights::validate() const {
  switch (rule) {
    case WeightRule::Const:
      if (!(value > 0.0) || !std::isfinite(value)) fail(ErrorCode::InvalidArgument, "weights must be positive");
      break;
    case WeightRule::Geometric:
      if (!(scale > 0.0) || !(ratio > 0.0)) fail(ErrorCode::InvalidArgument, "weights must be positive");
      if (ratio > 1.0) fail(ErrorCode::InvalidArgument, "geometric weights with ratio > 1 are unbounded");
      break;
    case WeightRule::List:
      if (list.empty()) fail(ErrorCode::InvalidArgument, "weight list is empty");
      for (double v : list) {
        if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::InvalidArgument, "weights must be positive");
      }
      break;
  }
}

InaccuracyMeasure InaccuracyMeasure::brier() { return with("brier", ConvexGenerator::quadratic(), Weights::constant(1.0)); }

InaccuracyMeasure InaccuracyMeasure::walsh() {
  return with("walsh", ConvexGenerator::quadratic(), Weights::geometric(1.0, 0.5));
}

InaccuracyMeasure InaccuracyMeasure::with(std::string name, ConvexGenerator g, Weights w) {
  InaccuracyMeasure m;
  m.name = std::move(name);
  m.generator = std::move(g);
  m.weights = std::move(w);
  return m;
}

void InaccuracyMeasure::validate() const { weights.validate(); }

void InaccuracyMeasure::require_countable() const {
  if (!generator.bounded_derivative()) {
    fail(ErrorCode::UnsupportedMeasure,
         std::string(to_string(generator.kind())) + " has an unbounded derivative; admitted on finite spaces only");
  }
}

// ------------------------------------------------------------------ scoring

ExtendedReal score_values(const std::vector<double>& c, const InaccuracyMeasure& m,
                          const std::vector<std::uint8_t>& signature) {
  if (c.size() != signature.size()) fail(ErrorCode::InvalidArgument, "credence and world signature lengths differ");
  ExtendedReal total = ExtendedReal::finite(0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    total = total + m.generator.divergence(signature[i] ? 1.0 : 0.0, c[i]).scaled(m.weights.at(i));
  }
  return total;
}

Rational score_values_exact(const std::vector<Rational>& c, const InaccuracyMeasure& m,
                            const std::vector<std::uint8_t>& signature) {
  if (c.size() != signature.size()) fail(ErrorCode::InvalidArgument, "credence and world signature lengths differ");
  Rational total = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    total += to_rational(m.weights.at(i)) * m.generator.exact_divergence(Rational(signature[i] ? 1 : 0), c[i]);
  }
  return total;
}

namespace {

std::size_t scored_count(const OpinionSpace& space, std::size_t truncation) {
  if (auto n = space.proposition_count()) return *n;
  return truncation > 0 ? truncation : space.truncation_default();
}

std::vector<std::uint8_t> signature_at(const OpinionSpace& space, const WorldPoint& w, std::size_t count) {
  std::vector<std::uint8_t> sig(count);
  for (std::size_t k = 0; k < count; ++k) sig[k] = space.contains(w, k) ? 1 : 0;
  return sig;
}

void check_length(const Credence& c, const OpinionSpace& space) {
  if (!c.is_rule() && space.proposition_count() && c.size() != *space.proposition_count()) {
    fail(ErrorCode::InvalidArgument, "credence has " + std::to_string(c.size()) + " values but the space has " +
                                         std::to_string(*space.proposition_count()) + " propositions");
  }
}

}  // namespace

ExtendedReal score(const Credence& c, const InaccuracyMeasure& m, const WorldPoint& world, const OpinionSpace& space,
                   std::size_t truncation) {
  m.validate();
  check_length(c, space);
  const std::size_t count = scored_count(space, truncation);
  const CredenceRule rule = c.as_rule();
  std::vector<double> values(count);
  for (std::size_t k = 0; k < count; ++k) values[k] = rule.at(k);
  return score_values(values, m, signature_at(space, world, count));
}

Rational score_exact(const Credence& c, const InaccuracyMeasure& m, const WorldPoint& world,
                     const OpinionSpace& space, std::size_t truncation) {
  m.validate();
  check_length(c, space);
  const std::size_t count = scored_count(space, truncation);
  const CredenceRule rule = c.as_rule();
  std::vector<Rational> values(count);
  for (std::size_t k = 0; k < count; ++k) {
    auto v = rule.exact_at(k);
    values[k] = v ? *v : to_rational(rule.at(k));
  }
  return score_values_exact(values, m, signature_at(space, world, count));
}

SeriesVerdict SeriesVerdict::converged(double v, double bound, std::size_t terms) {
  SeriesVerdict s;
  s.status = SeriesStatus::Converged;
  s.value = v;
  s.tail_bound = bound;
  s.terms_used = terms;
  return s;
}

SeriesVerdict SeriesVerdict::diverges(std::string tag, std::size_t terms) {
  SeriesVerdict s;
  s.status = SeriesStatus::Diverges;
  s.tag = std::move(tag);
  s.terms_used = terms;
  return s;
}

SeriesVerdict SeriesVerdict::partial(double v, std::size_t terms) {
  SeriesVerdict s;
  s.value = v;
  s.terms_used = terms;
  return s;
}

ExtendedReal SeriesVerdict::as_extended() const {
  if (status == SeriesStatus::Diverges) return ExtendedReal::infinity();
  return ExtendedReal::finite(value);
}

namespace {

constexpr std::size_t kSeriesHardCap = 20'000'000;

/// Sum_k a_k d(bit_k, c_k) where bit_k = head(k) for k < n0 and `tail_bit`
/// afterwards.
template <typename Head>
SeriesVerdict analyze_series(const Credence& c, const InaccuracyMeasure& m, Head head, std::size_t n0, bool tail_bit,
                             const SeriesPolicy& policy) {
  const CredenceRule rule = c.as_rule();
  const auto& g = m.generator;
  const auto& a = m.weights;
  const double b = tail_bit ? 1.0 : 0.0;

  std::size_t k = 0;
  double sum = 0.0;
  auto add_until = [&](std::size_t K) {
    for (; k < K; ++k) {
      const double bit = k < n0 ? (head(k) ? 1.0 : 0.0) : b;
      sum += a.at(k) * g.divergence(bit, rule.at(k)).value();
    }
  };

  if (a.summable()) {
    std::size_t K = std::max(policy.truncation, n0);
    const double sup_d = g.sup_divergence();
    add_until(K);
    double bound = sup_d * a.tail_sum(K);
    while (bound > policy.tolerance && K < kSeriesHardCap) {
      K = std::min(K * 2, kSeriesHardCap);
      add_until(K);
      bound = sup_d * a.tail_sum(K);
    }
    if (bound <= policy.tolerance) return SeriesVerdict::converged(sum, bound, K);
    return SeriesVerdict::partial(sum, K);
  }

  auto limit = c.limit(policy.truncation);
  if (!limit) {
    add_until(std::max(policy.truncation, n0));
    return SeriesVerdict::partial(sum, k);
  }
  if (!g.divergence(b, std::clamp(*limit, 0.0, 1.0)).is_infinite() && g.divergence(b, *limit).value() > 0.0) {
    // terms tend to inf_a * d(b, L) > 0
    return SeriesVerdict::diverges("term test", 0);
  }
  const TailProfile profile = rule.tail_profile(b);
  switch (profile.kind) {
    case TailClass::FiniteSupport: {
      const std::size_t K = std::max(n0, profile.support);
      add_until(K);
      return SeriesVerdict::converged(sum, 0.0, K);
    }
    case TailClass::Geometric: {
      if (profile.ratio >= 1.0) break;
      const double r2 = profile.ratio * profile.ratio;
      auto tail = [&](std::size_t K) {
        return a.sup() * 0.5 * g.curvature_max() * profile.scale * profile.scale *
               std::pow(r2, static_cast<double>(K + 1)) / (1.0 - r2);
      };
      std::size_t K = std::max(policy.truncation, n0);
      add_until(K);
      while (tail(K) > policy.tolerance && K < kSeriesHardCap) {
        K = std::min(K * 2, kSeriesHardCap);
        add_until(K);
      }
      if (tail(K) <= policy.tolerance) return SeriesVerdict::converged(sum, tail(K), K);
      return SeriesVerdict::partial(sum, K);
    }
    case TailClass::HarmonicLike:
      // a_k d(b, c_k) >= inf_a * (kappa_min / 2) / (k + 2)
      if (a.inf() > 0.0 && g.curvature_min() > 0.0) return SeriesVerdict::diverges("harmonic comparison", 0);
      break;
    case TailClass::NonVanishing:
      return SeriesVerdict::diverges("term test", 0);
    case TailClass::Unknown:
      break;
  }
  add_until(std::max(policy.truncation, n0));
  return SeriesVerdict::partial(sum, k);
}

}  // namespace

SeriesVerdict score_countable(const Credence& c, const InaccuracyMeasure& m, const WorldPoint& world,
                              const OpinionSpace& space, const SeriesPolicy& policy) {
  m.validate();
  c.validate();
  if (space.proposition_count()) {
    const ExtendedReal s = score(c, m, world, space);
    if (s.is_infinite()) return SeriesVerdict::diverges("infinite divergence term", *space.proposition_count());
    return SeriesVerdict::converged(s.value(), 0.0, *space.proposition_count());
  }
  m.require_countable();

  bool tail_bit = false;
  std::size_t n0 = 0;
  if (world.is_added()) {
    tail_bit = space.added_points().at(*world.added).in_every_proposition;
  } else {
    if (world.label < 0) fail(ErrorCode::InvalidArgument, "worlds of symbolic spaces are natural numbers");
    const auto n = static_cast<std::size_t>(world.label);
    switch (space.kind()) {
      case SpaceKind::TailSets:
        tail_bit = false;  // in p_k exactly for k < n
        n0 = n;
        break;
      case SpaceKind::InitialSegments:
        tail_bit = true;  // in p_k exactly for k >= n - 1
        n0 = n > 0 ? n - 1 : 0;
        break;
      case SpaceKind::CountablePartition:
        tail_bit = false;
        n0 = n + 1;
        break;
      case SpaceKind::ExplicitFinite:
        break;
    }
  }
  auto head = [&](std::size_t k) { return space.contains(world, k); };
  return analyze_series(c, m, head, n0, tail_bit, policy);
}

SeriesVerdict score_constant_signature(const Credence& c, const InaccuracyMeasure& m, bool bit,
                                       const SeriesPolicy& policy) {
  m.validate();
  m.require_countable();
  c.validate();
  return analyze_series(c, m, [](std::size_t) { return false; }, 0, bit, policy);
}

SeriesVerdict expected_inaccuracy(const Credence& c, const InaccuracyMeasure& m, const LambdaRepresentation& rep,
                                  const OpinionSpace& space, const SeriesPolicy& policy) {
  if (rep.weights.size() != rep.atoms.size()) fail(ErrorCode::InvalidArgument, "lambda weights and atoms differ in length");
  for (double w : rep.weights) {
    if (w < -1e-12) fail(ErrorCode::InvalidArgument, "lambda weights must be nonnegative");
  }
  if (std::abs(rep.total() - 1.0) > 1e-9) {
    fail(ErrorCode::InvalidArgument, "lambda representation is not normalized (total " + std::to_string(rep.total()) + ")");
  }

  if (space.proposition_count()) {
    double total = 0.0;
    for (std::size_t j = 0; j < rep.atoms.size(); ++j) {
      if (rep.weights[j] <= 0.0) continue;
      const ExtendedReal s = score(c, m, rep.atoms[j], space);
      if (s.is_infinite()) return SeriesVerdict::diverges("infinite score on a charged atom", 0);
      total += rep.weights[j] * s.value();
    }
    return SeriesVerdict::converged(total, 0.0, *space.proposition_count());
  }

  m.require_countable();
  const CredenceRule rule = c.as_rule();

  if (space.kind() == SpaceKind::CountablePartition) {
    // lambda_n = c_n is forced, so
    //   E = I(c, w*) + sum_n a_n c_n (d(1, c_n) - d(0, c_n))
    // with w* the point in no cell.
    const SeriesVerdict star = score_constant_signature(c, m, false, policy);
    if (star.status != SeriesStatus::Converged) return star;
    auto total_mass = rule.analytic_sum();
    if (!total_mass) fail(ErrorCode::InvalidArgument, "partition credence has no finite total");
    const auto& g = m.generator;
    double sum = 0.0;
    double listed = 0.0;
    std::size_t K = policy.truncation;
    auto bound = [&] {
      return m.weights.sup() * g.sup_divergence() * std::max(0.0, total_mass->get_d() - listed);
    };
    std::size_t k = 0;
    while (true) {
      for (; k < K; ++k) {
        const double ck = rule.at(k);
        listed += ck;
        sum += m.weights.at(k) * ck * (g.divergence(1.0, ck).value() - g.divergence(0.0, ck).value());
      }
      if (bound() <= policy.tolerance || K >= kSeriesHardCap) break;
      K = std::min(K * 2, kSeriesHardCap);
    }
    const double tail = bound() + star.tail_bound;
    if (tail <= policy.tolerance + star.tail_bound) return SeriesVerdict::converged(star.value + sum, tail, K);
    return SeriesVerdict::partial(star.value + sum, K);
  }

  // tails and initial segments: singleton atoms are scored exactly; the
  // aggregated atom beyond the truncation is bounded by the largest score
  WorldLabel aggregated = -1;
  for (const auto& w : rep.atoms) {
    if (!w.is_added()) aggregated = std::max(aggregated, w.label);
  }
  double value = 0.0;
  double slack = 0.0;
  std::size_t terms = 0;
  bool unresolved = false;
  for (std::size_t j = 0; j < rep.atoms.size(); ++j) {
    const double w = rep.weights[j];
    if (w <= 0.0) continue;
    const WorldPoint& atom = rep.atoms[j];
    if (!atom.is_added() && atom.label == aggregated) {
      if (!m.weights.summable()) {
        unresolved = true;
        continue;
      }
      slack += w * m.generator.sup_divergence() * m.weights.tail_sum(0);
      continue;
    }
    const SeriesVerdict s = score_countable(c, m, atom, space, policy);
    if (s.status == SeriesStatus::Diverges) return SeriesVerdict::diverges(s.tag, s.terms_used);
    if (s.status == SeriesStatus::Partial) unresolved = true;
    value += w * s.value;
    slack += w * s.tail_bound;
    terms = std::max(terms, s.terms_used);
  }
  if (rep.residual > 0.0) {
    const SeriesVerdict s = score_constant_signature(c, m, rep.residual_in_every_proposition, policy);
    if (s.status == SeriesStatus::Diverges) return SeriesVerdict::diverges(s.tag, s.terms_used);
    if (s.status == SeriesStatus::Partial) unresolved = true;
    value += rep.residual * s.value;
    slack += rep.residual * s.tail_bound;
  }
  if (unresolved || slack > policy.tolerance) return SeriesVerdict::partial(value, terms);
  return SeriesVerdict::converged(value, slack, terms);
}

}  // namespace credal
