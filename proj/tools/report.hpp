#pragma once

// JSON views of library results.

#include <string_view>
#include <vector>

#include <json.hpp>

#include "app.hpp"
#include "smkl/diagnostics.hpp"
#include "smkl/error.hpp"
#include "smkl/oracles.hpp"
#include "smkl/trace.hpp"

namespace smkl::app {

inline constexpr int kSchemaVersion = 1;

json report_header(const RunConfig& cfg);
json trace_json(const SolverTrace& trace);
json ids_of(const KernelBank& bank, const std::vector<std::size_t>& indices);
json by_id(const KernelBank& bank, const std::vector<double>& values);
json oracle_json(const KernelBank& bank, const oracles::OracleResult& o);
json dependency_json(const diagnostics::DependencyReport& rep);
json rate_fit_json(const diagnostics::RateFit& fit);

/// Placeholder for a report field that could not be computed.
json omitted(std::string_view kind, std::string_view reason);
json omitted(const Error& e);

}  // namespace smkl::app
