#pragma once

// Line-oriented instance and target-set files. Grammar in docs/file-formats.md.

#include <filesystem>
#include <string>

#include "cmab/environment.hpp"

namespace cmab {

Instance parse_instance(const std::string& text);
Instance load_instance(const std::filesystem::path& path);

/// Canonical text form; parse_instance(format_instance(x)) reproduces x.
std::string format_instance(const Instance& instance);

/// `arm <label>` selects an enumerated arm by label, `members i j ...` builds
/// one from base arms (in order), `permutation_closed 1` closes the set.
TargetSet parse_targets(const Instance& instance, const std::string& text);
TargetSet load_targets(const Instance& instance, const std::filesystem::path& path);
std::string format_targets(const TargetSet& targets);

}  // namespace cmab
