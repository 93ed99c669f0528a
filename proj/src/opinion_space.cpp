#include "credal/opinion_space.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "credal/error.hpp"

namespace credal {

std::string_view to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::ExplicitFinite:
      return "explicit";
    case SpaceKind::TailSets:
      return "tails";
    case SpaceKind::InitialSegments:
      return "initial_segments";
    case SpaceKind::CountablePartition:
      return "partition";
  }
  return "explicit";
}

SpaceKind parse_space_kind(std::string_view name) {
  if (name == "explicit") return SpaceKind::ExplicitFinite;
  if (name == "tails") return SpaceKind::TailSets;
  if (name == "initial_segments") return SpaceKind::InitialSegments;
  if (name == "partition") return SpaceKind::CountablePartition;
  fail(ErrorCode::InvalidArgument, "unknown space kind '" + std::string(name) + "'");
}

std::string_view to_string(CompactnessVerdict verdict) {
  switch (verdict) {
    case CompactnessVerdict::CompactCertified:
      return "compact_certified";
    case CompactnessVerdict::NonCompactWitness:
      return "non_compact_witness";
    case CompactnessVerdict::UnknownUpToDepth:
      return "unknown_up_to_depth";
  }
  return "unknown_up_to_depth";
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

OpinionSpace OpinionSpace::explicit_finite(std::vector<WorldLabel> worlds,
                                           const std::vector<std::vector<WorldLabel>>& propositions) {
  if (worlds.empty()) fail(ErrorCode::InvalidArgument, "explicit space needs at least one world");
  if (propositions.empty()) fail(ErrorCode::InvalidArgument, "explicit space needs at least one proposition");
  std::vector<WorldLabel> sorted = worlds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    fail(ErrorCode::InvalidArgument, "duplicate world label");
  }

  OpinionSpace space;
  space.kind_ = SpaceKind::ExplicitFinite;
  space.worlds_ = std::move(worlds);
  space.membership_.reserve(propositions.size());
  for (std::size_t k = 0; k < propositions.size(); ++k) {
    std::vector<bool> row(space.worlds_.size(), false);
    for (WorldLabel member : propositions[k]) {
      auto it = std::find(space.worlds_.begin(), space.worlds_.end(), member);
      if (it == space.worlds_.end()) {
        fail(ErrorCode::InvalidArgument, "proposition " + std::to_string(k + 1) + " names unknown world " +
                                             std::to_string(member));
      }
      row[static_cast<std::size_t>(it - space.worlds_.begin())] = true;
    }
    space.membership_.push_back(std::move(row));
  }
  return space;
}

OpinionSpace OpinionSpace::tail_sets(std::size_t truncation) {
  if (truncation < 1) fail(ErrorCode::InvalidArgument, "truncation must be >= 1");
  OpinionSpace space;
  space.kind_ = SpaceKind::TailSets;
  space.truncation_ = truncation;
  return space;
}

OpinionSpace OpinionSpace::initial_segments(std::size_t truncation) {
  if (truncation < 1) fail(ErrorCode::InvalidArgument, "truncation must be >= 1");
  OpinionSpace space;
  space.kind_ = SpaceKind::InitialSegments;
  space.truncation_ = truncation;
  return space;
}

OpinionSpace OpinionSpace::partition(std::optional<std::size_t> cells, std::size_t truncation) {
  if (truncation < 1) fail(ErrorCode::InvalidArgument, "truncation must be >= 1");
  if (cells && *cells < 1) fail(ErrorCode::InvalidArgument, "a partition needs at least one cell");
  OpinionSpace space;
  space.kind_ = SpaceKind::CountablePartition;
  space.truncation_ = truncation;
  space.cells_ = cells;
  return space;
}

std::optional<std::size_t> OpinionSpace::proposition_count() const {
  if (kind_ == SpaceKind::ExplicitFinite) return membership_.size();
  if (kind_ == SpaceKind::CountablePartition) return cells_;
  return std::nullopt;
}

std::size_t OpinionSpace::effective_count(std::size_t truncation) const {
  if (auto n = proposition_count()) {
    return kind_ == SpaceKind::ExplicitFinite ? *n : std::min(*n, truncation);
  }
  return truncation;
}

OpinionSpace OpinionSpace::with_added_point(AddedPoint point) const {
  if (kind_ == SpaceKind::ExplicitFinite) {
    fail(ErrorCode::InvalidArgument, "explicit spaces are compact; no points can be added");
  }
  OpinionSpace out = *this;
  out.added_.push_back(std::move(point));
  return out;
}

std::size_t OpinionSpace::world_position(WorldLabel label) const {
  auto it = std::find(worlds_.begin(), worlds_.end(), label);
  if (it == worlds_.end()) fail(ErrorCode::InvalidArgument, "unknown world " + std::to_string(label));
  return static_cast<std::size_t>(it - worlds_.begin());
}

bool OpinionSpace::contains(const WorldPoint& world, std::size_t index) const {
  if (world.added) {
    if (*world.added >= added_.size()) fail(ErrorCode::InvalidArgument, "unknown added point");
    return added_[*world.added].in_every_proposition;
  }
  if (auto n = proposition_count(); n && index >= *n) {
    fail(ErrorCode::InvalidArgument, "proposition index out of range");
  }
  const WorldLabel w = world.label;
  if (kind_ != SpaceKind::ExplicitFinite && w < 0) {
    fail(ErrorCode::InvalidArgument, "worlds of symbolic spaces are natural numbers");
  }
  const auto k = static_cast<WorldLabel>(index);
  switch (kind_) {
    case SpaceKind::ExplicitFinite:
      return membership_[index][world_position(w)];
    case SpaceKind::TailSets:
      return w >= k + 1;
    case SpaceKind::InitialSegments:
      return w <= k + 1;
    case SpaceKind::CountablePartition:
      if (cells_ && index + 1 == *cells_) return w >= k;
      return w == k;
  }
  return false;
}

Proposition OpinionSpace::proposition(std::size_t index) const {
  if (auto n = proposition_count(); n && index >= *n) {
    fail(ErrorCode::InvalidArgument, "proposition index out of range");
  }
  Proposition p;
  p.id = index + 1;
  const std::string k1 = std::to_string(index + 1);
  switch (kind_) {
    case SpaceKind::ExplicitFinite: {
      std::string desc = "{";
      for (std::size_t j = 0; j < worlds_.size(); ++j) {
        if (!membership_[index][j]) continue;
        if (!p.members.empty()) desc += ",";
        p.members.push_back(worlds_[j]);
        desc += std::to_string(worlds_[j]);
      }
      p.descriptor = desc + "}";
      break;
    }
    case SpaceKind::TailSets:
      p.descriptor = "tail {n >= " + k1 + "}";
      break;
    case SpaceKind::InitialSegments:
      p.descriptor = "initial {n <= " + k1 + "}";
      break;
    case SpaceKind::CountablePartition:
      if (cells_ && index + 1 == *cells_) {
        p.descriptor = "cell {n >= " + std::to_string(index) + "}";
      } else {
        p.descriptor = "cell {" + std::to_string(index) + "}";
      }
      break;
  }
  return p;
}

namespace {

std::vector<std::uint8_t> signature_of(const OpinionSpace& space, const WorldPoint& w, std::size_t count) {
  std::vector<std::uint8_t> sig(count);
  for (std::size_t k = 0; k < count; ++k) sig[k] = space.contains(w, k) ? 1 : 0;
  return sig;
}

/// Least natural representative of each class at truncation K, in closed form.
std::vector<WorldLabel> symbolic_representatives(const OpinionSpace& space, std::size_t count, bool& exact) {
  std::vector<WorldLabel> reps;
  const auto K = static_cast<WorldLabel>(count);
  exact = false;
  switch (space.kind()) {
    case SpaceKind::TailSets:
      // world n has signature 1^min(n,K) 0^(K-n); worlds >= K collapse
      for (WorldLabel n = 0; n <= K; ++n) reps.push_back(n);
      break;
    case SpaceKind::InitialSegments:
      // worlds 0 and 1 lie in every p_k; worlds > K lie in none
      reps.push_back(0);
      for (WorldLabel n = 2; n <= K + 1; ++n) reps.push_back(n);
      break;
    case SpaceKind::CountablePartition: {
      for (WorldLabel n = 0; n < K; ++n) reps.push_back(n);
      const auto cells = space.partition_cells();
      if (cells && *cells == count) {
        exact = true;  // the listed cells exhaust the naturals
      } else {
        reps.push_back(K);  // outside every listed cell
      }
      break;
    }
    case SpaceKind::ExplicitFinite:
      break;
  }
  return reps;
}

}  // namespace

Quotient build_quotient(const OpinionSpace& space, std::size_t truncation) {
  if (truncation < 1) fail(ErrorCode::InvalidArgument, "truncation must be >= 1");
  Quotient q;
  const std::size_t count = space.effective_count(truncation);
  q.propositions = count;
  q.matrix.cols = count;

  std::vector<WorldPoint> reps;
  if (space.kind() == SpaceKind::ExplicitFinite) {
    q.exact = true;
    std::vector<WorldLabel> labels = space.worlds();
    std::sort(labels.begin(), labels.end());
    for (WorldLabel w : labels) reps.push_back(WorldPoint::natural(w));
  } else {
    for (WorldLabel n : symbolic_representatives(space, count, q.exact)) reps.push_back(WorldPoint::natural(n));
  }
  for (std::size_t i = 0; i < space.added_points().size(); ++i) reps.push_back(WorldPoint::added_point(i));

  // an added point differs from every natural world beyond the truncation,
  // so it never shares an atom with one
  std::set<std::pair<bool, std::vector<std::uint8_t>>> seen;
  for (const WorldPoint& w : reps) {
    auto sig = signature_of(space, w, count);
    if (!seen.emplace(w.is_added(), sig).second) continue;  // reps are ordered, so the first is the least
    WorldAtom atom;
    atom.id = q.atoms.size();
    atom.signature = sig;
    atom.representative = w;
    q.matrix.rows.push_back(std::move(sig));
    q.atoms.push_back(std::move(atom));
  }
  return q;
}

StructureFlags analyze_structure(const OpinionSpace& space) {
  StructureFlags flags;
  flags.countably_discriminating = true;  // countably many worlds in every supported kind
  bool any_added_everywhere = false;
  bool any_added = !space.added_points().empty();
  for (const auto& p : space.added_points()) any_added_everywhere |= p.in_every_proposition;

  switch (space.kind()) {
    case SpaceKind::ExplicitFinite: {
      const std::size_t n = *space.proposition_count();
      flags.point_finite = true;
      bool partition = true;
      for (WorldLabel w : space.worlds()) {
        std::size_t hits = 0;
        for (std::size_t k = 0; k < n; ++k) hits += space.contains(WorldPoint::natural(w), k) ? 1 : 0;
        partition &= hits == 1;
      }
      flags.is_partition = partition;
      bool inc = true;
      bool dec = true;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        for (WorldLabel w : space.worlds()) {
          const bool a = space.contains(WorldPoint::natural(w), k);
          const bool b = space.contains(WorldPoint::natural(w), k + 1);
          if (a && !b) inc = false;
          if (b && !a) dec = false;
        }
      }
      flags.nested_increasing = inc;
      flags.nested_decreasing = dec;
      break;
    }
    case SpaceKind::TailSets:
      // world n lies in p_k only for k < n
      flags.point_finite = !any_added_everywhere;
      flags.nested_decreasing = true;
      break;
    case SpaceKind::InitialSegments:
      flags.point_finite = false;  // world 0 lies in every p_k
      flags.nested_increasing = true;
      break;
    case SpaceKind::CountablePartition: {
      const auto cells = space.partition_cells();
      flags.point_finite = !(any_added_everywhere && !cells);
      flags.is_partition = !any_added;
      if (cells && *cells == 1) {
        flags.nested_increasing = true;
        flags.nested_decreasing = true;
      }
      break;
    }
  }
  return flags;
}

namespace {

struct FamilySequence {
  int sign;             // 0: p_n, 1: complement
  bool star_membership;  // membership of the point closing the sequence
  std::string rule;
  std::string evidence;
};

std::optional<FamilySequence> divergent_sequence(const OpinionSpace& space) {
  switch (space.kind()) {
    case SpaceKind::TailSets:
      return FamilySequence{0, true, "tails: p_n for all n",
                            "no natural number lies in every tail {n >= N}"};
    case SpaceKind::InitialSegments:
      return FamilySequence{1, false, "initial_segments: complement of p_n for all n",
                            "every natural n lies in {m <= N} once N >= n"};
    case SpaceKind::CountablePartition:
      if (space.partition_cells()) return std::nullopt;
      return FamilySequence{1, false, "partition: complement of p_n for all n",
                            "every natural n lies in cell n+1"};
    case SpaceKind::ExplicitFinite:
      return std::nullopt;
  }
  return std::nullopt;
}

/// A world of the space in p_0^{s} ∩ ... ∩ p_N^{s}, searched among 0..N+2
/// and the added points.
std::optional<WorldPoint> prefix_world(const OpinionSpace& space, std::size_t N, int sign) {
  auto in_prefix = [&](const WorldPoint& w) {
    for (std::size_t k = 0; k <= N; ++k) {
      if (space.contains(w, k) != (sign == 0)) return false;
    }
    return true;
  };
  for (WorldLabel n = 0; n <= static_cast<WorldLabel>(N) + 2; ++n) {
    if (in_prefix(WorldPoint::natural(n))) return WorldPoint::natural(n);
  }
  for (std::size_t i = 0; i < space.added_points().size(); ++i) {
    if (in_prefix(WorldPoint::added_point(i))) return WorldPoint::added_point(i);
  }
  return std::nullopt;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

CompactnessReport search_compactness_witness(const OpinionSpace& space, std::size_t depth) {
  if (depth < 1) fail(ErrorCode::InvalidArgument, "depth must be >= 1");
  CompactnessReport report;
  report.depth_searched = depth;

  auto family = divergent_sequence(space);
  if (!family) {
    report.verdict = CompactnessVerdict::CompactCertified;
    report.certificate = "finitely many propositions: every signed sequence has a finite "
                         "sub-intersection equal to the full intersection";
    return report;
  }

  // Only the constant-sign sequence of the enumeration has nonempty finite
  // prefixes and empty intersection over the naturals; a canonical added
  // point closes it.
  for (std::size_t i = 0; i < space.added_points().size(); ++i) {
    const auto& p = space.added_points()[i];
    if (p.in_every_proposition != family->star_membership) continue;
    bool closes = true;
    for (std::size_t k = 0; k < depth; ++k) {
      closes &= space.contains(WorldPoint::added_point(i), k) == (family->sign == 0);
    }
    if (closes) {
      report.verdict = CompactnessVerdict::CompactCertified;
      report.certificate = "added point " + p.label + " lies in every term of the only divergent sequence (" +
                           family->rule + ")";
      return report;
    }
  }

  SignedSequence seq;
  seq.rule = family->rule;
  seq.emptiness_evidence = family->evidence;
  for (std::size_t k = 0; k < depth; ++k) {
    auto w = prefix_world(space, k, family->sign);
    if (!w || w->is_added()) {
      report.verdict = CompactnessVerdict::UnknownUpToDepth;
      report.certificate = "prefix of length " + std::to_string(k + 1) + " has no natural witness";
      return report;
    }
    seq.propositions.push_back(k);
    seq.signs.push_back(family->sign);
    seq.prefix_witnesses.push_back(w->label);
  }
  report.verdict = CompactnessVerdict::NonCompactWitness;
  report.witness = std::move(seq);
  return report;
}

Compactification compactify(const OpinionSpace& space) {
  Compactification out{space, space, {}, {}};
  auto report = search_compactness_witness(space, kDefaultCompactnessDepth);
  if (report.verdict == CompactnessVerdict::CompactCertified) return out;
  if (report.verdict != CompactnessVerdict::NonCompactWitness) {
    fail(ErrorCode::NotImplemented, "compactification of this space is not supported");
  }
  const auto family = divergent_sequence(space);
  AddedPoint point;
  point.sequence = family->rule;
  point.in_every_proposition = family->star_membership;
  point.label = "star:" + hex64(fnv1a64(point.sequence));
  out.space = space.with_added_point(point);
  out.added_points.push_back(point);
  out.star_signatures.push_back(point.in_every_proposition);
  return out;
}

}  // namespace credal
