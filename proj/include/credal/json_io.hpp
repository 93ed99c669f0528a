#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "credal/credence.hpp"
#include "credal/inaccuracy.hpp"
#include "credal/opinion_space.hpp"
#include "credal/rational.hpp"

namespace credal::io {

using Json = nlohmann::ordered_json;

/// Malformed input. `location` is "file:line:col" for syntax errors and
/// "file#/json/pointer" for documents that parse but do not fit the schema.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string location, const std::string& what)
      : std::runtime_error(location + ": " + what), location_(std::move(location)) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

Json read_file(const std::string& path);
Json parse_text(const std::string& text, const std::string& source);

/// Space documents:
///   {"kind": "explicit", "worlds": [..], "propositions": [[..], ..]}
///   {"kind": "tails" | "initial_segments", "truncation": K}
///   {"kind": "partition", "family_params": {"cells": m}, "truncation": K}
///   (family_params optional: without it the partition is infinite)
OpinionSpace parse_space(const Json& doc, const std::string& source);

/// Credence documents:
///   {"values": [0.5, "1/3", ..]}
///   {"rule": "geometric", "params": {"scale": .., "ratio": ..}, "declared_limit": x | null}
///   {"rule": "list", "params": {"values": [..], "tail": ..}}
/// An inline "space" member is allowed and returned by credence_space().
Credence parse_credence(const Json& doc, const std::string& source);

/// Measure documents:
///   {"preset": "brier" | "walsh"}
///   {"generator": {"kind": .., "knots": [..], "slopes": [..], "shift": [a, b]},
///    "weights": {"rule": "const" | "geometric" | "list", "params": {..}}}
InaccuracyMeasure parse_measure(const Json& doc, const std::string& source);

/// The inline space of a credence document, if any.
std::optional<OpinionSpace> credence_space(const Json& doc, const std::string& source);

Json space_to_json(const OpinionSpace& space);
Json world_to_json(const WorldPoint& world, const OpinionSpace& space);

/// Number in the active mode: a double, or a "num/den" string.
Json number(double value, const Rational* exact, Mode mode);
Json number(const Rational& exact, Mode mode);

/// {"value": x} | {"inf": true} | {"partial": x, "K": terms}
Json score_to_json(const SeriesVerdict& v);
Json score_to_json(const ExtendedReal& v);

/// Serializes with doubles printed as %.17g so output is byte-stable.
std::string dump(const Json& doc, int indent = 2);

}  // namespace credal::io
