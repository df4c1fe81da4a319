#include "diffchain/emit.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

#include "diffchain/bitkernel.hpp"
#include "diffchain/rng.hpp"

namespace diffchain {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json RunConfig::to_json() const {
    json j;
    j["subcommand"] = subcommand;
    j["chain"] = chain;
    j["set"] = set;
    j["n"] = n;
    j["k"] = k;
    j["k_max"] = k_max;
    j["paths"] = paths;
    j["seed"] = seed;
    j["brute"] = brute;
    j["members"] = members;
    j["tol"] = tol;
    j["format"] = format;
    j["m_list"] = m_list;
    return j;
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig cfg;
    cfg.subcommand = j.at("subcommand").get<std::string>();
    cfg.chain = j.at("chain").get<std::string>();
    cfg.set = j.at("set").get<std::string>();
    cfg.n = j.at("n").get<std::uint64_t>();
    cfg.k = j.at("k").get<std::uint64_t>();
    cfg.k_max = j.at("k_max").get<std::uint64_t>();
    cfg.paths = j.at("paths").get<std::uint64_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.brute = j.at("brute").get<bool>();
    cfg.members = j.at("members").get<bool>();
    cfg.tol = j.at("tol").get<double>();
    cfg.format = j.at("format").get<std::string>();
    cfg.m_list = j.at("m_list").get<std::vector<std::uint64_t>>();
    return cfg;
}

std::vector<std::string> RunConfig::to_argv() const {
    std::vector<std::string> argv;
    argv.push_back(subcommand);
    auto add = [&](const char* flag, const std::string& value) {
        argv.emplace_back(flag);
        argv.push_back(value);
    };
    if (subcommand == "caps") {
        add("--set", set);
        if (members) {
            argv.emplace_back("--members");
        }
    } else if (subcommand == "dist") {
        add("--chain", chain);
        add("--n", std::to_string(n));
        add("--k", std::to_string(k));
        add("--k-max", std::to_string(k_max));
        if (brute) {
            argv.emplace_back("--brute");
        }
    } else if (subcommand == "converge") {
        add("--chain", chain);
        add("--set", set);
        add("--n", std::to_string(n));
        add("--k-max", std::to_string(k_max));
        add("--tol", format_double(tol));
    } else if (subcommand == "simulate") {
        add("--chain", chain);
        add("--k", std::to_string(k));
        add("--n", std::to_string(n));
        add("--paths", std::to_string(paths));
        add("--seed", std::to_string(seed));
        add("--k-max", std::to_string(k_max));
    } else if (subcommand == "density") {
        add("--set", set);
        std::string ms;
        for (std::size_t i = 0; i < m_list.size(); ++i) {
            if (i != 0) {
                ms += ',';
            }
            ms += std::to_string(m_list[i]);
        }
        add("--m-list", ms);
    }
    add("--format", format);
    return argv;
}

namespace {

void write_header(std::ostream& os, const RunConfig& cfg) {
    os << "# diffchain " << cfg.subcommand << "\n";
    os << "# config: " << cfg.to_json().dump() << "\n";
    os << "# generator: " << kGeneratorId << "\n";
}

std::string log_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : "nan";
}

json record_to_json(const DeviationRecord& rec) {
    json j;
    j["k"] = rec.k;
    j["nu_k"] = rec.nu_k;
    j["b_k"] = rec.b_k;
    j["deviation"] = rec.deviation;
    if (rec.log_abs_deviation) {
        j["log_abs_deviation"] = *rec.log_abs_deviation;
    } else {
        j["log_abs_deviation"] = nullptr;
    }
    j["underflow"] = rec.underflow;
    return j;
}

json fit_to_json(const RateFit& fit) {
    json j;
    j["insufficient"] = fit.insufficient;
    j["points_used"] = fit.points_used;
    if (!fit.insufficient) {
        j["delta_estimate"] = fit.delta_estimate;
        j["intercept"] = fit.intercept;
        j["goodness"] = fit.goodness;
    }
    return j;
}

json marginal_to_json(const MarginalResult& r) {
    json j;
    j["probability_one"] = r.probability_one;
    j["signed_deviation"] = r.signed_deviation;
    if (r.log_abs_deviation) {
        j["log_abs_deviation"] = *r.log_abs_deviation;
    } else {
        j["log_abs_deviation"] = nullptr;
    }
    j["underflow"] = r.underflow;
    return j;
}

void emit_json_document(std::ostream& os, const RunConfig& cfg, json body) {
    body["tool"] = "diffchain";
    body["config"] = cfg.to_json();
    body["generator"] = kGeneratorId;
    os << body.dump(2) << "\n";
}

} // namespace

void emit_series_csv(std::ostream& os, const RunConfig& cfg, const DeviationSeries& series) {
    write_header(os, cfg);
    os << "k,nu_k,b_k,deviation,log_abs_deviation,underflow_flag\n";
    for (const auto& rec : series.records) {
        os << rec.k << ',' << rec.nu_k << ',' << rec.b_k << ',' << format_double(rec.deviation)
           << ',' << log_cell(rec.log_abs_deviation) << ',' << (rec.underflow ? 1 : 0) << "\n";
    }
}

json series_to_json(const DeviationSeries& series) {
    json j;
    j["chain"] = series.chain.to_string();
    j["n"] = series.n;
    j["set"] = series.set_spec;
    j["records"] = json::array();
    for (const auto& rec : series.records) {
        j["records"].push_back(record_to_json(rec));
    }
    return j;
}

void emit_verdict_json(std::ostream& os, const RunConfig& cfg, const TheoremVerdict& v) {
    json body;
    body["chain_type"] = to_string(v.chain_type);
    body["verdict"] = v.verdict;
    body["flavor_warning"] = v.flavor_warning;
    body["final_abs_deviation"] = v.final_abs_deviation;
    if (v.final_log_abs_deviation) {
        body["final_log_abs_deviation"] = *v.final_log_abs_deviation;
    } else {
        body["final_log_abs_deviation"] = nullptr;
    }
    body["monotone_from_index"] = v.monotone_from_index;
    body["fit"] = fit_to_json(v.fit);
    if (v.control_min_log_abs_deviation) {
        body["control_min_log_abs_deviation"] = *v.control_min_log_abs_deviation;
    } else {
        body["control_min_log_abs_deviation"] = nullptr;
    }
    body["control_min_abs_deviation"] = v.control_min_abs_deviation;
    body["series"] = series_to_json(v.series);
    body["control"] = series_to_json(v.control);
    emit_json_document(os, cfg, std::move(body));
}

void emit_verdict_csv(std::ostream& os, const RunConfig& cfg, const TheoremVerdict& v) {
    // CSV carries the series; the verdict summary rides along as comments so
    // the column layout stays plot-friendly.
    write_header(os, cfg);
    os << "# chain_type: " << to_string(v.chain_type) << "\n";
    os << "# verdict: " << v.verdict << "\n";
    os << "# flavor_warning: " << (v.flavor_warning ? 1 : 0) << "\n";
    os << "# final_abs_deviation: " << format_double(v.final_abs_deviation) << "\n";
    os << "# monotone_from_index: " << v.monotone_from_index << "\n";
    if (!v.fit.insufficient) {
        os << "# fit_delta: " << format_double(v.fit.delta_estimate)
           << " goodness: " << format_double(v.fit.goodness) << "\n";
    } else {
        os << "# fit: insufficient\n";
    }
    os << "# control_min_abs_deviation: " << format_double(v.control_min_abs_deviation) << "\n";
    os << "k,nu_k,b_k,deviation,log_abs_deviation,underflow_flag\n";
    for (const auto& rec : v.series.records) {
        os << rec.k << ',' << rec.nu_k << ',' << rec.b_k << ',' << format_double(rec.deviation)
           << ',' << log_cell(rec.log_abs_deviation) << ',' << (rec.underflow ? 1 : 0) << "\n";
    }
}

void emit_caps_csv(std::ostream& os, const RunConfig& cfg, const IndexSetSpec& spec) {
    write_header(os, cfg);
    auto members = spec.enumerate();
    os << "metric,value\n";
    os << "count," << members.size() << "\n";
    os << "C," << capacity_C(std::span<const std::uint64_t>(members)) << "\n";
    os << "c," << capacity_c(std::span<const std::uint64_t>(members)) << "\n";
    if (cfg.members) {
        os << "k,nu_k,b_k\n";
        for (auto k : members) {
            os << k << ',' << nu_of(k) << ',' << b_of(k) << "\n";
        }
    }
    if (spec.is_family()) {
        auto report = thickness_report(spec, spec.p_hi);
        os << "# s_trend: " << report.s_trend << "\n";
        os << "p,s_p,slice_size,slice_capacity,term,partial_sum,closed_form,closed_minus_direct\n";
        for (const auto& row : report.rows) {
            const bool valid_s = row.s_p >= 0 && row.s_p <= row.p;
            std::uint64_t closed = 0;
            if (valid_s) {
                closed = report.uses_small_b
                             ? closed_form_c_bp(row.p, static_cast<int>(row.s_p))
                             : closed_form_C_Bp(row.p, static_cast<int>(row.s_p));
            }
            os << row.p << ',' << row.s_p << ',' << row.slice_size << ',' << row.slice_capacity
               << ',' << format_double(row.term) << ',' << format_double(row.partial_sum) << ','
               << closed << ','
               << (static_cast<long long>(closed) - static_cast<long long>(row.slice_capacity))
               << "\n";
        }
    }
}

void emit_caps_json(std::ostream& os, const RunConfig& cfg, const IndexSetSpec& spec) {
    auto members = spec.enumerate();
    json body;
    body["count"] = members.size();
    body["C"] = capacity_C(std::span<const std::uint64_t>(members));
    body["c"] = capacity_c(std::span<const std::uint64_t>(members));
    if (cfg.members) {
        json table = json::array();
        for (auto k : members) {
            table.push_back({{"k", k}, {"nu_k", nu_of(k)}, {"b_k", b_of(k)}});
        }
        body["members"] = std::move(table);
    }
    if (spec.is_family()) {
        auto report = thickness_report(spec, spec.p_hi);
        json rows = json::array();
        for (const auto& row : report.rows) {
            const bool valid_s = row.s_p >= 0 && row.s_p <= row.p;
            std::uint64_t closed = 0;
            if (valid_s) {
                closed = report.uses_small_b
                             ? closed_form_c_bp(row.p, static_cast<int>(row.s_p))
                             : closed_form_C_Bp(row.p, static_cast<int>(row.s_p));
            }
            rows.push_back({{"p", row.p},
                            {"s_p", row.s_p},
                            {"slice_size", row.slice_size},
                            {"slice_capacity", row.slice_capacity},
                            {"term", row.term},
                            {"partial_sum", row.partial_sum},
                            {"closed_form", closed}});
        }
        body["thickness"] = {{"s_trend", report.s_trend}, {"rows", std::move(rows)}};
    }
    emit_json_document(os, cfg, std::move(body));
}

void emit_dist_csv(std::ostream& os, const RunConfig& cfg, const MarginalResult& exact,
                   const MarginalResult* brute) {
    write_header(os, cfg);
    os << "metric,value\n";
    os << "probability_one," << format_double(exact.probability_one) << "\n";
    os << "signed_deviation," << format_double(exact.signed_deviation) << "\n";
    os << "log_abs_deviation," << log_cell(exact.log_abs_deviation) << "\n";
    os << "underflow," << (exact.underflow ? 1 : 0) << "\n";
    if (brute) {
        os << "brute_probability_one," << format_double(brute->probability_one) << "\n";
        const double diff = std::fabs(exact.probability_one - brute->probability_one);
        os << "oracle," << (diff <= 1e-12 ? "match" : "MISMATCH") << "\n";
    }
}

void emit_dist_json(std::ostream& os, const RunConfig& cfg, const MarginalResult& exact,
                    const MarginalResult* brute) {
    json body;
    body["result"] = marginal_to_json(exact);
    if (brute) {
        body["brute"] = marginal_to_json(*brute);
        const double diff = std::fabs(exact.probability_one - brute->probability_one);
        body["oracle"] = diff <= 1e-12 ? "match" : "MISMATCH";
    }
    emit_json_document(os, cfg, std::move(body));
}

void emit_mc_csv(std::ostream& os, const RunConfig& cfg, const MonteCarloReport& report) {
    write_header(os, cfg);
    os << "metric,value\n";
    os << "paths," << report.paths << "\n";
    os << "ones," << report.ones << "\n";
    os << "empirical_one_frequency," << format_double(report.empirical_one_frequency) << "\n";
    os << "exact_probability_one," << format_double(report.exact_probability_one) << "\n";
    os << "z_score," << format_double(report.z_score) << "\n";
}

void emit_mc_json(std::ostream& os, const RunConfig& cfg, const MonteCarloReport& report) {
    json body;
    body["paths"] = report.paths;
    body["ones"] = report.ones;
    body["empirical_one_frequency"] = report.empirical_one_frequency;
    body["exact_probability_one"] = report.exact_probability_one;
    body["z_score"] = report.z_score;
    emit_json_document(os, cfg, std::move(body));
}

void emit_density_csv(std::ostream& os, const RunConfig& cfg,
                      const std::vector<DensitySample>& samples) {
    write_header(os, cfg);
    os << "m,count,rho\n";
    for (const auto& s : samples) {
        os << s.m << ',' << s.count << ',' << format_double(s.rho) << "\n";
    }
}

void emit_density_json(std::ostream& os, const RunConfig& cfg,
                       const std::vector<DensitySample>& samples) {
    json body;
    json rows = json::array();
    for (const auto& s : samples) {
        rows.push_back({{"m", s.m}, {"count", s.count}, {"rho", s.rho}});
    }
    body["samples"] = std::move(rows);
    emit_json_document(os, cfg, std::move(body));
}

} // namespace diffchain
