#include "report.hpp"

namespace smkl::app {

json report_header(const RunConfig& cfg) {
    return {{"schema_version", kSchemaVersion}, {"command", cfg.command}, {"config", cfg.to_json()}};
}

json trace_json(const SolverTrace& trace) {
    json out = json::array();
    for (const auto& it : trace.iterations) {
        json r = {{"k", it.k},
                  {"selected", it.selected_id},
                  {"loss_before", it.loss_before},
                  {"loss_after", it.loss_after},
                  {"grad_l2", it.grad_l2_selected},
                  {"grad_h", it.grad_h_selected},
                  {"support_size", it.support_size}};
        if (it.objective) r["objective"] = *it.objective;
        out.push_back(std::move(r));
    }
    return out;
}

json ids_of(const KernelBank& bank, const std::vector<std::size_t>& indices) {
    json out = json::array();
    for (auto j : indices) out.push_back(bank.id(j));
    return out;
}

json by_id(const KernelBank& bank, const std::vector<double>& values) {
    json out = json::object();
    for (std::size_t j = 0; j < values.size(); ++j) out[bank.id(j)] = values[j];
    return out;
}

json oracle_json(const KernelBank& bank, const oracles::OracleResult& o) {
    return {{"f_star_loss", o.f_star_loss},
            {"f_hat_loss", o.f_hat_loss},
            {"epsilon_star", o.epsilon_star},
            {"best_support", ids_of(bank, o.best_support)},
            {"method", o.method == oracles::SubsetMethod::enumeration ? "enumeration" : "orthogonal"},
            {"subsets_examined", o.subsets_examined}};
}

json dependency_json(const diagnostics::DependencyReport& rep) {
    return {{"delta", rep.delta},
            {"sigma_plus_min", rep.sigma_plus_min},
            {"d", rep.d},
            {"gamma_bound_valid", rep.gamma_bound_valid},
            {"gamma_bound", rep.gamma_bound ? json(*rep.gamma_bound) : json(nullptr)}};
}

json rate_fit_json(const diagnostics::RateFit& fit) {
    return {{"rate", fit.rate},
            {"r_squared", fit.r_squared},
            {"plateau_index", fit.plateau_index},
            {"plateau_level", fit.plateau_level},
            {"slope", fit.slope},
            {"intercept", fit.intercept}};
}

json omitted(std::string_view kind, std::string_view reason) {
    return {{"omitted", {{"kind", kind}, {"reason", reason}}}};
}

json omitted(const Error& e) { return omitted(to_string(e.kind()), e.what()); }

}  // namespace smkl::app
