#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "credal/credence.hpp"
#include "credal/dominance.hpp"
#include "credal/inaccuracy.hpp"
#include "credal/opinion_space.hpp"

namespace credal {

inline constexpr std::uint64_t kDefaultSeed = 0xACC;
inline constexpr std::size_t kFamilyTruncation = 32;

/// Uniform doubles in [0,1) from the top 53 bits of a 64-bit Mersenne
/// twister, so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

struct Assertion {
  std::string name;
  bool pass = false;
  std::string details;
};

struct ExampleReport {
  std::string id;
  std::vector<Assertion> assertions;
  nlohmann::ordered_json data = nlohmann::ordered_json::object();

  bool all_pass() const;
  void check(std::string name, bool pass, std::string details = {});
};

struct ReproduceOptions {
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::size_t> truncation;  // per-example default when unset
  std::optional<std::size_t> samples;  // per-example default when unset
  std::size_t search_budget = 10'000;  // adversarial evaluations per credence
  Mode mode = Mode::Float;
};

/// "ex4.1", "ex4.2", "walsh", "partition_theorem".
ExampleReport reproduce_example(std::string_view id, const ReproduceOptions& options = {});
std::vector<std::string> example_ids();

struct PartitionBound {
  double C = 0.0;
  double D = 0.0;
  double bound() const { return C + D; }
};

/// Bound on I(c, w) over coherent c on a partition and every world of its
/// compactification: C = sup a * d(1, 0), D = sup a * phi'(1).
PartitionBound partition_bound(const InaccuracyMeasure& m);

enum class StabilityProperty { WStable, SStable };
enum class StabilityStatus { ProvenTrue, ProvenFalseWitness, Unknown };
std::string_view to_string(StabilityProperty p);
std::string_view to_string(StabilityStatus s);

struct StabilityWitness {
  Credence c;  // coherent on the base space
  Credence d;  // dominates c on the base space
  DominanceVerdict base;       // d over c on (W, F)
  DominanceVerdict compacted;  // d* over c* on (W*, F*)
  std::string reason;
};

struct StabilityFact {
  SpaceKind space_kind = SpaceKind::ExplicitFinite;
  StabilityProperty property = StabilityProperty::WStable;
  StabilityStatus status = StabilityStatus::Unknown;
  std::string source;
  std::vector<StabilityWitness> witnesses;
  std::size_t searched = 0;
};

std::vector<StabilityFact> stability_report(const OpinionSpace& space, const InaccuracyMeasure& m,
                                            std::size_t search_budget, std::uint64_t seed = kDefaultSeed);

}  // namespace credal
