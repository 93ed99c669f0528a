#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace credal {

inline constexpr std::size_t kDefaultTruncation = 64;
inline constexpr std::size_t kDefaultCompactnessDepth = 16;

enum class SpaceKind { ExplicitFinite, TailSets, InitialSegments, CountablePartition };

std::string_view to_string(SpaceKind kind);
SpaceKind parse_space_kind(std::string_view name);

using WorldLabel = std::int64_t;

/// A world: either a labelled world of the base space (a natural number for
/// the symbolic families) or a point introduced by compactification.
struct WorldPoint {
  WorldLabel label = 0;
  std::optional<std::size_t> added;

  static WorldPoint natural(WorldLabel n) { return WorldPoint{n, std::nullopt}; }
  static WorldPoint added_point(std::size_t index) { return WorldPoint{0, index}; }
  bool is_added() const { return added.has_value(); }

  friend bool operator==(const WorldPoint&, const WorldPoint&) = default;
};

/// Point x_s added for a divergent signed sequence s. For every supported
/// family the point has the same membership in every proposition p*.
struct AddedPoint {
  std::string label;
  std::string sequence;
  bool in_every_proposition = false;

  friend bool operator==(const AddedPoint&, const AddedPoint&) = default;
};

struct Proposition {
  std::size_t id = 0;  // dense from 1
  std::string descriptor;
  std::vector<WorldLabel> members;  // explicit spaces only
};

/// Opinion space (W, F). Propositions are addressed by a 0-based index; the
/// public id of index k is k + 1.
///
/// Symbolic families over the naturals (0 included):
///   TailSets            p_k = {n >= k+1}
///   InitialSegments     p_k = {n <= k+1}
///   CountablePartition  p_k = {k}; with m cells the last cell is {n >= m-1}
class OpinionSpace {
 public:
  static OpinionSpace explicit_finite(std::vector<WorldLabel> worlds,
                                      const std::vector<std::vector<WorldLabel>>& propositions);
  static OpinionSpace tail_sets(std::size_t truncation = kDefaultTruncation);
  static OpinionSpace initial_segments(std::size_t truncation = kDefaultTruncation);
  /// `cells == nullopt` is the infinite partition of the naturals into singletons.
  static OpinionSpace partition(std::optional<std::size_t> cells = std::nullopt,
                                std::size_t truncation = kDefaultTruncation);

  SpaceKind kind() const { return kind_; }
  bool is_symbolic() const { return kind_ != SpaceKind::ExplicitFinite; }
  std::size_t truncation_default() const { return truncation_; }

  /// Number of propositions, or nullopt for a countably infinite family.
  std::optional<std::size_t> proposition_count() const;
  std::optional<std::size_t> partition_cells() const { return cells_; }

  /// Propositions considered at truncation K (all of them when finite).
  std::size_t effective_count(std::size_t truncation) const;

  const std::vector<WorldLabel>& worlds() const { return worlds_; }
  const std::vector<AddedPoint>& added_points() const { return added_; }
  OpinionSpace with_added_point(AddedPoint point) const;

  bool contains(const WorldPoint& world, std::size_t index) const;
  Proposition proposition(std::size_t index) const;

  friend bool operator==(const OpinionSpace&, const OpinionSpace&) = default;

 private:
  OpinionSpace() = default;
  std::size_t world_position(WorldLabel label) const;

  SpaceKind kind_ = SpaceKind::ExplicitFinite;
  std::size_t truncation_ = kDefaultTruncation;
  std::optional<std::size_t> cells_;
  std::vector<WorldLabel> worlds_;
  std::vector<std::vector<bool>> membership_;  // [proposition][world position]
  std::vector<AddedPoint> added_;
};

struct WorldAtom {
  std::size_t id = 0;
  std::vector<std::uint8_t> signature;
  WorldPoint representative;
};

/// 0/1 matrix of omniscient credence values, rows = atoms, cols = propositions.
struct ValuationMatrix {
  std::size_t cols = 0;
  std::vector<std::vector<std::uint8_t>> rows;

  std::size_t row_count() const { return rows.size(); }
  std::uint8_t at(std::size_t row, std::size_t col) const { return rows[row][col]; }
};

struct Quotient {
  std::vector<WorldAtom> atoms;
  ValuationMatrix matrix;
  std::size_t propositions = 0;
  /// True when the atoms are the exact quotient of the whole space rather
  /// than a truncation-level coarsening.
  bool exact = false;
};

Quotient build_quotient(const OpinionSpace& space, std::size_t truncation);
inline Quotient build_quotient(const OpinionSpace& space) {
  return build_quotient(space, space.truncation_default());
}

struct StructureFlags {
  bool point_finite = false;
  bool countably_discriminating = false;
  bool is_partition = false;
  bool nested_increasing = false;
  bool nested_decreasing = false;
};

StructureFlags analyze_structure(const OpinionSpace& space);

enum class CompactnessVerdict { CompactCertified, NonCompactWitness, UnknownUpToDepth };
std::string_view to_string(CompactnessVerdict verdict);

/// Signed sequence p_n^{f(n)} over the enumeration of F; sign 1 means complement.
struct SignedSequence {
  std::vector<std::size_t> propositions;  // indices, up to the searched depth
  std::vector<int> signs;
  std::vector<WorldLabel> prefix_witnesses;  // a world in the first N+1 terms
  std::string rule;                          // symbolic description of the full sequence
  std::string emptiness_evidence;
};

struct CompactnessReport {
  CompactnessVerdict verdict = CompactnessVerdict::UnknownUpToDepth;
  std::optional<SignedSequence> witness;
  std::string certificate;
  std::size_t depth_searched = 0;
};

CompactnessReport search_compactness_witness(const OpinionSpace& space,
                                             std::size_t depth = kDefaultCompactnessDepth);

struct Compactification {
  OpinionSpace base;
  OpinionSpace space;  // (W*, F*)
  std::vector<AddedPoint> added_points;
  /// Membership of each added point in each p*; constant per point.
  std::vector<bool> star_signatures;

  /// Psi: index of p* for proposition index p. The construction preserves
  /// the enumeration, so this is the identity.
  std::size_t psi(std::size_t index) const { return index; }
};

Compactification compactify(const OpinionSpace& space);

/// 64-bit FNV-1a, used for reproducible added-point labels.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace credal
