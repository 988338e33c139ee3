#pragma once

// Builds language oracles from parsed system specifications.

#include "symdyn/speclang.hpp"
#include "symdyn/subshifts.hpp"

namespace symdyn {

/// noninv systems become sample oracles over the quantized prefix
/// (keys eps, default 1/8, and prefix, default 4096); product blocks resolve
/// their components by name within the document.
OraclePtr make_oracle(const SpecDocument& document, const SystemSpec& spec);
OraclePtr make_oracle(const SpecDocument& document);

/// Reads and parses a spec file; throws SpecError or std::runtime_error.
SpecDocument load_spec(const std::string& path);

}  // namespace symdyn
