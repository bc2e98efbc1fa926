#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maxstrat/system.hpp"

namespace maxstrat {

/// Template choice as written in a model or template file.
struct TemplateSpec {
  enum class Kind { Box, Octagon, Rows };
  Kind kind = Kind::Box;
  std::vector<TemplateRow> rows;

  Template build(const TransitionSystem& ts) const;
  /// Parses `box`, `octagon` or `rows`; throws UsageError otherwise.
  static Kind parse_kind(std::string_view word);
};

struct ModelFile {
  TransitionSystem system;
  std::optional<TemplateSpec> template_spec;
};

/// Parses the model language. Throws ParseError (with line and column) on
/// syntax and sort errors.
ModelFile parse_model(std::string_view text);
TransitionSystem parse_system(std::string_view text);

/// Parses a file of `template ...` statements against the variables of `ts`.
TemplateSpec parse_template(std::string_view text, const TransitionSystem& ts);

/// Renders a system in the model language; parse_system inverts it.
std::string print_system(const TransitionSystem& ts);

}  // namespace maxstrat
