#include "credal/credence.hpp"

#include <algorithm>
#include <cmath>

#include "credal/error.hpp"

namespace credal {

std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::Zero:
      return "zero";
    case RuleKind::Constant:
      return "const";
    case RuleKind::Geometric:
      return "geometric";
    case RuleKind::InvSqrt:
      return "inv_sqrt";
    case RuleKind::ComplementGeometric:
      return "complement_geometric";
    case RuleKind::List:
      return "list";
  }
  return "zero";
}

RuleKind parse_rule_kind(std::string_view name) {
  if (name == "zero") return RuleKind::Zero;
  if (name == "const") return RuleKind::Constant;
  if (name == "geometric") return RuleKind::Geometric;
  if (name == "inv_sqrt") return RuleKind::InvSqrt;
  if (name == "complement_geometric") return RuleKind::ComplementGeometric;
  if (name == "list") return RuleKind::List;
  fail(ErrorCode::InvalidArgument, "unknown credence rule '" + std::string(name) + "'");
}

namespace {

Rational rational_pow(const Rational& base, std::size_t exp) {
  mpz_class num;
  mpz_class den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), exp);
  mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), exp);
  Rational out(num, den);
  out.canonicalize();
  return out;
}

void check_unit(const Rational& v, const std::string& what) {
  if (v < 0 || v > 1) fail(ErrorCode::InvalidCredence, what + " outside [0,1]: " + std::to_string(v.get_d()));
}

void check_unit(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::InvalidCredence, what + " outside [0,1]: " + std::to_string(v));
}

}  // namespace

CredenceRule CredenceRule::zero() { return CredenceRule{}; }

CredenceRule CredenceRule::constant(Rational v) {
  CredenceRule r;
  r.kind = RuleKind::Constant;
  r.value = std::move(v);
  return r;
}

CredenceRule CredenceRule::geometric(Rational scale, Rational ratio) {
  CredenceRule r;
  r.kind = RuleKind::Geometric;
  r.scale = std::move(scale);
  r.ratio = std::move(ratio);
  return r;
}

CredenceRule CredenceRule::inv_sqrt() {
  CredenceRule r;
  r.kind = RuleKind::InvSqrt;
  return r;
}

CredenceRule CredenceRule::complement_geometric(Rational scale, Rational ratio) {
  CredenceRule r = geometric(std::move(scale), std::move(ratio));
  r.kind = RuleKind::ComplementGeometric;
  return r;
}

CredenceRule CredenceRule::list(std::vector<Rational> values, Rational tail) {
  CredenceRule r;
  r.kind = RuleKind::List;
  r.values = std::move(values);
  r.tail = std::move(tail);
  return r;
}

double CredenceRule::at(std::size_t index) const {
  const double i = static_cast<double>(index + 1);
  switch (kind) {
    case RuleKind::Zero:
      return 0.0;
    case RuleKind::Constant:
      return value.get_d();
    case RuleKind::Geometric:
      return scale.get_d() * std::pow(ratio.get_d(), i);
    case RuleKind::InvSqrt:
      return 1.0 / std::sqrt(i + 1.0);
    case RuleKind::ComplementGeometric:
      return 1.0 - scale.get_d() * std::pow(ratio.get_d(), i);
    case RuleKind::List:
      return index < values.size() ? values[index].get_d() : tail.get_d();
  }
  return 0.0;
}

std::optional<Rational> CredenceRule::exact_at(std::size_t index) const {
  switch (kind) {
    case RuleKind::Zero:
      return Rational(0);
    case RuleKind::Constant:
      return value;
    case RuleKind::Geometric:
      if (index > 4096) return std::nullopt;
      return Rational(scale * rational_pow(ratio, index + 1));
    case RuleKind::ComplementGeometric:
      if (index > 4096) return std::nullopt;
      return Rational(1 - scale * rational_pow(ratio, index + 1));
    case RuleKind::InvSqrt:
      return std::nullopt;
    case RuleKind::List:
      return index < values.size() ? values[index] : tail;
  }
  return std::nullopt;
}

Rational CredenceRule::exact_limit() const {
  switch (kind) {
    case RuleKind::Zero:
    case RuleKind::InvSqrt:
      return 0;
    case RuleKind::Constant:
      return value;
    case RuleKind::Geometric:
      return ratio == 1 ? scale : Rational(0);
    case RuleKind::ComplementGeometric:
      return ratio == 1 ? Rational(1 - scale) : Rational(1);
    case RuleKind::List:
      return tail;
  }
  return 0;
}

int CredenceRule::monotonicity() const {
  switch (kind) {
    case RuleKind::Zero:
    case RuleKind::Constant:
      return 0;
    case RuleKind::Geometric:
      if (scale == 0 || ratio == 1 || ratio == 0) {
        // ratio 0 gives 0 from id 1 on
        return 0;
      }
      return -1;
    case RuleKind::ComplementGeometric:
      if (scale == 0 || ratio == 1 || ratio == 0) return 0;
      return 1;
    case RuleKind::InvSqrt:
      return -1;
    case RuleKind::List: {
      bool up = true;
      bool down = true;
      for (std::size_t k = 0; k <= values.size(); ++k) {
        if (k == 0) continue;
        const Rational& prev = values[k - 1];
        const Rational& next = k < values.size() ? values[k] : tail;
        if (next < prev) up = false;
        if (next > prev) down = false;
      }
      if (up && down) return 0;
      if (up) return 1;
      if (down) return -1;
      return 2;
    }
  }
  return 2;
}

std::optional<Rational> CredenceRule::analytic_sum() const {
  switch (kind) {
    case RuleKind::Zero:
      return Rational(0);
    case RuleKind::Constant:
      if (value == 0) return Rational(0);
      return std::nullopt;
    case RuleKind::Geometric:
      if (scale == 0 || ratio == 0) return Rational(0);
      if (ratio >= 1) return std::nullopt;
      return Rational(scale * ratio / (1 - ratio));
    case RuleKind::ComplementGeometric:
      if (ratio == 1 && scale == 1) return Rational(0);
      return std::nullopt;
    case RuleKind::InvSqrt:
      return std::nullopt;
    case RuleKind::List: {
      if (tail != 0) return std::nullopt;
      Rational s = 0;
      for (const auto& v : values) s += v;
      return s;
    }
  }
  return std::nullopt;
}

TailProfile CredenceRule::tail_profile(double target) const {
  TailProfile p;
  if (std::abs(limit() - target) > 0.0) {
    p.kind = TailClass::NonVanishing;
    return p;
  }
  switch (kind) {
    case RuleKind::Zero:
    case RuleKind::Constant:
      p.kind = TailClass::FiniteSupport;
      p.support = 0;
      break;
    case RuleKind::Geometric:
    case RuleKind::ComplementGeometric:
      if (scale == 0 || ratio == 0) {
        p.kind = TailClass::FiniteSupport;
        p.support = 0;
      } else {
        p.kind = TailClass::Geometric;
        p.scale = std::abs(scale.get_d());
        p.ratio = ratio.get_d();
      }
      break;
    case RuleKind::InvSqrt:
      p.kind = TailClass::HarmonicLike;
      break;
    case RuleKind::List:
      p.kind = TailClass::FiniteSupport;
      p.support = values.size();
      break;
  }
  return p;
}

void CredenceRule::validate() const {
  switch (kind) {
    case RuleKind::Zero:
    case RuleKind::InvSqrt:
      return;
    case RuleKind::Constant:
      check_unit(value, "constant credence");
      return;
    case RuleKind::Geometric:
    case RuleKind::ComplementGeometric:
      // scale * ratio^i for i >= 1 lies in [0,1] for every i iff these hold
      if (ratio < 0 || ratio > 1) fail(ErrorCode::InvalidCredence, "geometric ratio outside [0,1]");
      if (scale < 0) fail(ErrorCode::InvalidCredence, "geometric scale negative");
      check_unit(Rational(scale * ratio), "first geometric term");
      return;
    case RuleKind::List:
      for (std::size_t k = 0; k < values.size(); ++k) check_unit(values[k], "credence " + std::to_string(k + 1));
      check_unit(tail, "tail credence");
      return;
  }
}

Credence Credence::finite(std::vector<double> values) {
  Credence c;
  c.exact_.reserve(values.size());
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidCredence, "non-finite credence value");
    c.exact_.push_back(to_rational(v));
  }
  c.values_ = std::move(values);
  return c;
}

Credence Credence::finite_exact(std::vector<Rational> values) {
  Credence c;
  c.values_ = to_doubles(values);
  c.exact_ = std::move(values);
  return c;
}

Credence Credence::from_rule(CredenceRule rule, std::optional<std::optional<double>> declared_limit) {
  Credence c;
  c.rule_ = std::move(rule);
  if (declared_limit) {
    if (*declared_limit) {
      c.declared_limit_ = **declared_limit;
    } else {
      c.limit_null_ = true;
    }
  }
  return c;
}

double Credence::at(std::size_t index) const {
  if (rule_) return rule_->at(index);
  if (index >= values_.size()) fail(ErrorCode::InvalidArgument, "credence index out of range");
  return values_[index];
}

Rational Credence::exact_at(std::size_t index) const {
  if (rule_) {
    if (auto v = rule_->exact_at(index)) return *v;
    return to_rational(rule_->at(index));
  }
  if (index >= exact_.size()) fail(ErrorCode::InvalidArgument, "credence index out of range");
  return exact_[index];
}

std::vector<double> Credence::prefix(std::size_t count) const {
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = at(k);
  return out;
}

std::vector<Rational> Credence::exact_prefix(std::size_t count) const {
  std::vector<Rational> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = exact_at(k);
  return out;
}

CredenceRule Credence::as_rule() const {
  if (rule_) return *rule_;
  return CredenceRule::list(exact_, 0);
}

std::optional<double> Credence::limit(std::size_t truncation) const {
  if (declared_limit_) return declared_limit_;
  const CredenceRule rule = as_rule();
  if (!limit_null_) return rule.limit();
  const std::size_t K = std::max<std::size_t>(truncation, 1);
  const double a = rule.at(K - 1);
  const double b = rule.at(2 * K - 1);
  const double c = rule.at(4 * K - 1);
  if (std::abs(a - b) <= 1e-12 && std::abs(b - c) <= 1e-12) return c;
  return std::nullopt;
}

std::optional<Rational> Credence::exact_limit() const {
  if (declared_limit_) return to_rational(*declared_limit_);
  if (limit_null_) return std::nullopt;
  return as_rule().exact_limit();
}

void Credence::validate() const {
  if (rule_) {
    rule_->validate();
    if (declared_limit_) check_unit(*declared_limit_, "declared limit");
    return;
  }
  if (values_.empty()) fail(ErrorCode::InvalidCredence, "empty credence");
  for (std::size_t k = 0; k < values_.size(); ++k) check_unit(exact_[k], "credence " + std::to_string(k + 1));
}

}  // namespace credal
