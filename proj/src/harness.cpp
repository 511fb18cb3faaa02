#include "simrec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace simrec::harness {

using json = nlohmann::json;
using geometry::ObjectiveMode;
using geometry::ObjectiveSpec;
using measurements::EnsembleKind;

int default_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("SIMREC_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
    }
    return hw;
}

namespace {

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& w : workers) w.join();
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

std::vector<int> GridSpec::resolve_m(int n) const {
    std::vector<int> out;
    out.reserve(m_values.size());
    for (double v : m_values) {
        int m = m_fraction ? static_cast<int>(std::lround(v * n)) : static_cast<int>(std::lround(v));
        m = std::clamp(m, 1, n);
        out.push_back(m);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

ObjectiveSpec objective_from_json(const json& j) {
    ObjectiveSpec spec;
    const std::string mode = j.value("mode", "weighted");
    if (mode == "weighted" || mode == "sum")
        spec.mode = ObjectiveMode::WeightedSum;
    else if (mode == "max_ratio" || mode == "fbest" || mode == "max")
        spec.mode = ObjectiveMode::MaxRatio;
    else
        throw ConfigError("objective mode must be weighted or max_ratio");
    spec.cone = geometry::cone_kind_from_string(j.value("cone", "full"));
    if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty())
        throw ConfigError("objective needs a nonempty terms array");
    for (const auto& t : j["terms"]) {
        geometry::ObjectiveTerm term;
        term.kind = norms::norm_kind_from_string(t.at("norm").get<std::string>());
        term.weight = t.value("weight", 1.0);
        spec.terms.push_back(term);
    }
    return spec;
}

json objective_to_json(const ObjectiveDescriptor& desc) {
    json j;
    j["solver"] = desc.solver == ObjectiveDescriptor::Solver::Weighted  ? "weighted"
                  : desc.solver == ObjectiveDescriptor::Solver::Fbest   ? "fbest"
                                                                        : "nonconvex_rank1";
    j["mode"] = desc.spec.mode == ObjectiveMode::WeightedSum ? "weighted" : "max_ratio";
    j["cone"] = geometry::to_string(desc.spec.cone);
    j["terms"] = json::array();
    for (const auto& t : desc.spec.terms) {
        json jt;
        jt["norm"] = norms::to_string(t.kind);
        jt["weight"] = t.weight;
        j["terms"].push_back(jt);
    }
    if (desc.k_max > 0) j["k_max"] = desc.k_max;
    j["symmetric"] = desc.symmetric;
    return j;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        const json& gen = j.at("generator");
        const std::string type = gen.value("type", "slr");
        if (type == "slr") {
            cfg.generator.type = GeneratorSpec::Type::Slr;
            cfg.generator.k1 = gen.value("k1", gen.value("k", 8));
            cfg.generator.k2 = gen.value("k2", gen.value("k", 8));
            cfg.generator.r = gen.value("r", 1);
            cfg.generator.psd = gen.value("psd", true);
            cfg.generator.placement = gen.value("placement", "top_left") == "random"
                                          ? constructions::SlrSpec::Placement::Random
                                          : constructions::SlrSpec::Placement::TopLeft;
        } else if (type == "phase_retrieval") {
            cfg.generator.type = GeneratorSpec::Type::PhaseRetrieval;
            cfg.generator.k = gen.value("k", 4);
            cfg.generator.gaussian_values = gen.value("gaussian_values", false);
        } else {
            throw ConfigError("generator type must be slr or phase_retrieval");
        }

        if (j.contains("ensemble")) {
            const json& ens = j["ensemble"];
            cfg.ensemble = measurements::ensemble_kind_from_string(ens.value("kind", "gaussian"));
            cfg.ensemble_options.dedup = ens.value("dedup", false);
            cfg.ensemble_options.sphere = ens.value("sphere", false);
        }

        json objectives = json::array();
        if (j.contains("objectives"))
            objectives = j["objectives"];
        else if (j.contains("objective"))
            objectives.push_back(j["objective"]);
        else
            throw ConfigError("config needs objective or objectives");
        for (const auto& jo : objectives) {
            ObjectiveDescriptor desc;
            const std::string solver = jo.value("solver", "");
            desc.spec = objective_from_json(jo);
            if (solver == "nonconvex_rank1") {
                desc.solver = ObjectiveDescriptor::Solver::NonconvexRank1;
                desc.k_max = jo.value("k_max", 0);
                desc.symmetric = jo.value("symmetric", true);
            } else if (solver == "weighted" || (solver.empty() && desc.spec.mode == ObjectiveMode::WeightedSum)) {
                desc.solver = ObjectiveDescriptor::Solver::Weighted;
            } else if (solver == "fbest" || (solver.empty() && desc.spec.mode == ObjectiveMode::MaxRatio)) {
                desc.solver = ObjectiveDescriptor::Solver::Fbest;
            } else {
                throw ConfigError("objective solver must be weighted, fbest or nonconvex_rank1");
            }
            desc.name = jo.value("name", "");
            cfg.objectives.push_back(std::move(desc));
        }

        const json& grid = j.at("grid");
        cfg.grid.d_values = grid.at("d").get<std::vector<int>>();
        cfg.grid.m_values = grid.at("m").get<std::vector<double>>();
        cfg.grid.m_fraction = grid.value("m_fraction", false);
        if (cfg.grid.d_values.empty() || cfg.grid.m_values.empty()) throw ConfigError("grid must be nonempty");

        cfg.instances_per_cell = j.value("instances_per_cell", 100);
        cfg.boundary_instances = j.value("boundary_instances", 200);
        if (cfg.instances_per_cell < 1) throw ConfigError("instances_per_cell must be >= 1");
        cfg.seed = j.value("seed", 1ull);
        cfg.output_csv = j.value("output", "cells.csv");

        if (j.contains("solver")) {
            const json& s = j["solver"];
            cfg.solver.max_iters = s.value("max_iters", cfg.solver.max_iters);
            cfg.solver.admm_rho = s.value("admm_rho", cfg.solver.admm_rho);
            cfg.solver.primal_tol = s.value("primal_tol", cfg.solver.primal_tol);
            cfg.solver.dual_tol = s.value("dual_tol", cfg.solver.dual_tol);
            cfg.solver.bisection_tol = s.value("bisection_tol", cfg.solver.bisection_tol);
            cfg.solver.success_threshold = s.value("success_threshold", cfg.solver.success_threshold);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str());
}

std::string config_hash(const ExperimentConfig& config, int objective_index) {
    json j;
    j["generator_type"] = config.generator.type == GeneratorSpec::Type::Slr ? "slr" : "phase_retrieval";
    j["k1"] = config.generator.k1;
    j["k2"] = config.generator.k2;
    j["r"] = config.generator.r;
    j["psd"] = config.generator.psd;
    j["k"] = config.generator.k;
    j["ensemble"] = measurements::to_string(config.ensemble);
    j["dedup"] = config.ensemble_options.dedup;
    j["sphere"] = config.ensemble_options.sphere;
    j["objective"] = objective_to_json(config.objectives.at(objective_index));
    j["seed"] = config.seed;
    j["instances"] = config.instances_per_cell;
    j["success_threshold"] = config.solver.success_threshold;
    const std::string dump = j.dump();
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : dump) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

struct InstanceOutcome {
    bool success = false;
    bool errored = false;
    double error = 1.0;
    int iterations = 0;
};

InstanceOutcome run_instance(const ExperimentConfig& config, const ObjectiveDescriptor& desc, int d, int m,
                             int instance) {
    InstanceOutcome out;
    try {
        Rng rng(hash_combine(config.seed, {static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(m),
                                           static_cast<std::uint64_t>(instance)}));
        Mat x0;
        int k_for_oracle = config.generator.k;
        if (config.generator.type == GeneratorSpec::Type::Slr) {
            constructions::SlrSpec spec;
            spec.d1 = spec.d2 = d;
            spec.k1 = config.generator.k1;
            spec.k2 = config.generator.k2;
            spec.r = config.generator.r;
            spec.psd = config.generator.psd;
            spec.placement = config.generator.placement;
            x0 = constructions::planted_gaussian(spec, rng).x;
            k_for_oracle = std::max(config.generator.k1, config.generator.k2);
        } else {
            x0 = constructions::phase_retrieval_instance(d, config.generator.k, rng,
                                                         config.generator.gaussian_values)
                     .x0;
        }
        auto op = measurements::draw(config.ensemble, m, x0.rows(), x0.cols(), rng, config.ensemble_options);
        const std::vector<double> b = measurements::apply(op, x0);

        solvers::SolveResult result;
        switch (desc.solver) {
            case ObjectiveDescriptor::Solver::Weighted:
                result = solvers::solve_weighted(op, b, desc.spec, config.solver, &x0);
                break;
            case ObjectiveDescriptor::Solver::Fbest:
                result = solvers::solve_fbest(op, b, desc.spec.with_references(x0), config.solver, &x0);
                break;
            case ObjectiveDescriptor::Solver::NonconvexRank1: {
                const int k_max = desc.k_max > 0 ? desc.k_max : k_for_oracle;
                result = solvers::solve_nonconvex_rank1(op, b, d, k_max, desc.symmetric, config.solver, rng,
                                                        &x0);
                break;
            }
        }
        out.error = result.normalized_error;
        out.iterations = result.iterations;
        out.success = result.normalized_error >= 0.0 &&
                      result.normalized_error <= config.solver.success_threshold;
    } catch (const std::exception& e) {
        out.errored = true;
        out.error = 1.0;
        static std::mutex log_mutex;
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << "[simrec] instance error (d=" << d << ", m=" << m << ", i=" << instance
                  << "): " << e.what() << "\n";
    }
    return out;
}

}  // namespace

CellResult run_cell(const ExperimentConfig& config, int objective_index, int d, int m, int instances,
                    int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    const ObjectiveDescriptor& desc = config.objectives.at(objective_index);
    std::vector<InstanceOutcome> outcomes(instances);
    parallel_for(instances, threads > 0 ? threads : default_threads(),
                 [&](int i) { outcomes[i] = run_instance(config, desc, d, m, i); });

    CellResult cell;
    cell.config_hash = config_hash(config, objective_index);
    cell.d = d;
    cell.m = m;
    cell.trials = instances;
    std::vector<double> errors;
    errors.reserve(instances);
    double err_sum = 0.0, iter_sum = 0.0;
    for (const auto& o : outcomes) {
        if (o.errored) ++cell.solver_errors;
        if (o.success) ++cell.successes;
        errors.push_back(o.error);
        err_sum += o.error;
        iter_sum += o.iterations;
    }
    std::sort(errors.begin(), errors.end());
    cell.mean_error = err_sum / instances;
    cell.median_error = instances % 2 ? errors[instances / 2]
                                      : 0.5 * (errors[instances / 2 - 1] + errors[instances / 2]);
    cell.mean_iterations = iter_sum / instances;
    cell.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return cell;
}

void append_cells_csv(const std::string& path, const std::vector<CellResult>& cells, bool write_header) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error("append_cells_csv: cannot open " + path);
    if (write_header)
        out << "config_hash,d,m,trials,successes,mean_error,median_error,mean_iters,wall_ms\n";
    for (const auto& c : cells) {
        out << c.config_hash << ',' << c.d << ',' << c.m << ',' << c.trials << ',' << c.successes << ','
            << format_double(c.mean_error) << ',' << format_double(c.median_error) << ','
            << format_double(c.mean_iterations) << ',' << format_double(c.wall_ms) << '\n';
        out.flush();
    }
}

std::vector<CellResult> load_cells_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_cells_csv: cannot open " + path);
    std::vector<CellResult> cells;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("config_hash", 0) == 0) continue;
        }
        std::stringstream ss(line);
        std::string cell_str;
        CellResult c;
        std::getline(ss, c.config_hash, ',');
        auto next_int = [&]() {
            std::getline(ss, cell_str, ',');
            return std::stoi(cell_str);
        };
        auto next_double = [&]() {
            std::getline(ss, cell_str, ',');
            return std::stod(cell_str);
        };
        c.d = next_int();
        c.m = next_int();
        c.trials = next_int();
        c.successes = next_int();
        c.mean_error = next_double();
        c.median_error = next_double();
        c.mean_iterations = next_double();
        c.wall_ms = next_double();
        cells.push_back(std::move(c));
    }
    return cells;
}

GridRunResult run_grid(const ExperimentConfig& config, int threads) {
    if (threads <= 0) threads = default_threads();
    GridRunResult run;

    std::set<std::string> done;
    bool have_file = false;
    {
        std::ifstream probe(config.output_csv);
        have_file = probe.good();
    }
    if (have_file) {
        try {
            for (const auto& c : load_cells_csv(config.output_csv))
                done.insert(c.config_hash + ":" + std::to_string(c.d) + ":" + std::to_string(c.m));
        } catch (const std::exception&) {
            // unreadable file: start over, appending after the old content
        }
    }
    bool header_needed = !have_file;

    // config sidecar for provenance
    {
        std::ofstream sidecar(config.output_csv + ".meta.json");
        if (sidecar) {
            json meta;
            meta["seed"] = config.seed;
            meta["instances_per_cell"] = config.instances_per_cell;
            meta["boundary_instances"] = config.boundary_instances;
            meta["ensemble"] = measurements::to_string(config.ensemble);
            meta["objectives"] = json::array();
            for (std::size_t oi = 0; oi < config.objectives.size(); ++oi) {
                json jo = objective_to_json(config.objectives[oi]);
                jo["config_hash"] = config_hash(config, static_cast<int>(oi));
                jo["name"] = config.objectives[oi].name;
                meta["objectives"].push_back(jo);
            }
            sidecar << meta.dump(2) << "\n";
        }
    }

    for (std::size_t oi = 0; oi < config.objectives.size(); ++oi) {
        const std::string hash = config_hash(config, static_cast<int>(oi));
        for (int d : config.grid.d_values) {
            const int n = d * d;
            for (int m : config.grid.resolve_m(n)) {
                const std::string key = hash + ":" + std::to_string(d) + ":" + std::to_string(m);
                if (done.count(key)) {
                    ++run.cells_skipped;
                    continue;
                }
                CellResult cell =
                    run_cell(config, static_cast<int>(oi), d, m, config.instances_per_cell, threads);
                // boundary cells get extra instances
                const double rate = cell.rate();
                if (config.boundary_instances > config.instances_per_cell && rate > 0.05 && rate < 0.95) {
                    CellResult extra = run_cell(config, static_cast<int>(oi), d, m,
                                                config.boundary_instances, threads);
                    cell = extra;
                }
                if (cell.solver_errors > 0) ++run.cells_with_errors;
                append_cells_csv(config.output_csv, {cell}, header_needed);
                header_needed = false;
                run.cells.push_back(std::move(cell));
            }
        }
    }
    return run;
}

namespace {

// Pool-adjacent-violators with trial weights; enforces nondecreasing rates.
std::vector<double> isotonic_fit(const std::vector<double>& rates, const std::vector<double>& weights,
                                 bool* changed) {
    struct Pool {
        double value, weight;
        int count;
    };
    std::vector<Pool> pools;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        pools.push_back({rates[i], weights[i], 1});
        while (pools.size() >= 2 && pools[pools.size() - 2].value > pools.back().value + 1e-12) {
            Pool b = pools.back();
            pools.pop_back();
            Pool& a = pools.back();
            const double w = a.weight + b.weight;
            a.value = (a.value * a.weight + b.value * b.weight) / w;
            a.weight = w;
            a.count += b.count;
            if (changed) *changed = true;
        }
    }
    std::vector<double> fit;
    fit.reserve(rates.size());
    for (const auto& p : pools)
        for (int c = 0; c < p.count; ++c) fit.push_back(p.value);
    return fit;
}

}  // namespace

BoundaryCurve extract_boundary(const std::vector<CellResult>& cells, double level) {
    if (level <= 0.0 || level >= 1.0) throw ConfigError("boundary level must lie in (0,1)");
    BoundaryCurve curve;
    curve.level = level;

    std::set<int> d_values;
    for (const auto& c : cells) d_values.insert(c.d);
    for (int d : d_values) {
        std::vector<const CellResult*> column;
        for (const auto& c : cells)
            if (c.d == d) column.push_back(&c);
        std::sort(column.begin(), column.end(),
                  [](const CellResult* a, const CellResult* b) { return a->m < b->m; });
        std::vector<double> rates, weights;
        for (const auto* c : column) {
            rates.push_back(c->rate());
            weights.push_back(static_cast<double>(c->trials));
        }
        bool changed = false;
        const std::vector<double> fit = isotonic_fit(rates, weights, &changed);
        if (changed) curve.isotonic_applied = true;

        // need rates on both sides of the level
        const double lo = *std::min_element(fit.begin(), fit.end());
        const double hi = *std::max_element(fit.begin(), fit.end());
        if (lo > level || hi < level) {
            curve.omitted_columns.push_back(d);
            continue;
        }
        double m_star = column.front()->m;
        for (std::size_t i = 0; i < fit.size(); ++i) {
            if (fit[i] >= level) {
                if (i == 0) {
                    m_star = column[0]->m;
                } else {
                    const double r0 = fit[i - 1], r1 = fit[i];
                    const double m0 = column[i - 1]->m, m1 = column[i]->m;
                    m_star = (r1 > r0) ? m0 + (level - r0) / (r1 - r0) * (m1 - m0) : m1;
                }
                break;
            }
        }
        curve.points.emplace_back(d, m_star);
    }
    return curve;
}

ComplexityResult find_sample_complexity(const ExperimentConfig& config, int objective_index, int d,
                                        double target_rate, int threads, int m_min, int m_max) {
    const int n = d * d;
    if (m_max <= 0) m_max = n;
    m_max = std::min(m_max, n);
    m_min = std::max(1, m_min);

    ComplexityResult result;
    auto probe = [&](int m) {
        CellResult cell = run_cell(config, objective_index, d, m, config.instances_per_cell, threads);
        result.probes.push_back(cell);
        return cell.rate();
    };

    int lo = m_min, hi = m_max;
    double rate_hi = probe(hi);
    if (rate_hi < target_rate) {
        // transition above range; report the endpoint
        result.m_star = hi;
        result.rate_at_m_star = rate_hi;
        result.monotone_warning = true;
        return result;
    }
    while (hi - lo > 1 && static_cast<int>(result.probes.size()) < 14) {
        const int mid = lo + (hi - lo) / 2;
        const double rate = probe(mid);
        if (rate < target_rate)
            lo = mid;
        else
            hi = mid;
    }

    // pick the probed m whose rate is closest to the target
    double best_gap = 2.0;
    for (const auto& c : result.probes) {
        const double gap = std::fabs(c.rate() - target_rate);
        if (gap < best_gap || (gap == best_gap && c.m < result.m_star)) {
            best_gap = gap;
            result.m_star = c.m;
            result.rate_at_m_star = c.rate();
        }
    }

    // monotonicity sanity: flag violations beyond binomial noise
    std::vector<const CellResult*> ordered;
    for (const auto& c : result.probes) ordered.push_back(&c);
    std::sort(ordered.begin(), ordered.end(),
              [](const CellResult* a, const CellResult* b) { return a->m < b->m; });
    for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
        const double p1 = ordered[i]->rate(), p2 = ordered[i + 1]->rate();
        const double noise = 3.0 * std::sqrt(0.25 / ordered[i]->trials + 0.25 / ordered[i + 1]->trials);
        if (p1 > p2 + noise) result.monotone_warning = true;
    }
    return result;
}

EnsembleRow ensemble_row(EnsembleKind kind, int d1, int d2, int m, int seeds,
                         measurements::DrawOptions options, SignalStyle style, std::uint64_t seed) {
    EnsembleRow row;
    row.kind = kind;
    row.d1 = d1;
    row.d2 = d2;
    row.m = m;
    row.seeds = seeds;
    const int n = d1 * d2;
    row.bound = 2.0 * m / n;
    const double logd = std::log(static_cast<double>(d1));
    row.coherence_bound = 3.0 * logd / d1;

    Mat x0(d1, d2);
    switch (style) {
        case SignalStyle::Flat:
            for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = 1.0;
            break;
        case SignalStyle::Spiky:
            x0(0, 0) = 1.0;
            break;
        case SignalStyle::LiftedFlat: {
            for (int i = 0; i < d1; ++i)
                for (int j = 0; j < d2; ++j) x0(i, j) = 1.0;
            break;
        }
        case SignalStyle::LiftedSparse: {
            const int k = std::max(1, d1 / 8);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) x0(i, j) = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            break;
        }
    }

    int exceed = 0, coh_exceed = 0;
    double ratio_sum = 0.0;
    std::vector<double> c2_samples;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(hash_combine(seed, {static_cast<std::uint64_t>(s)}));
        auto op = measurements::draw(kind, m, d1, d2, rng, options);
        const auto st = measurements::stats(op, x0);
        ratio_sum += st.ratio;
        if (st.ratio > row.bound) ++exceed;
        if (st.coherence) {
            row.max_coherence = std::max(row.max_coherence, *st.coherence);
            if (*st.coherence > row.coherence_bound) ++coh_exceed;
            c2_samples.push_back(std::sqrt(st.ratio) * d1 / (std::sqrt(static_cast<double>(m)) * logd));
        }
    }
    row.mean_ratio = ratio_sum / seeds;
    row.exceed_fraction = static_cast<double>(exceed) / seeds;
    row.coherence_exceed_fraction = static_cast<double>(coh_exceed) / seeds;
    if (!c2_samples.empty()) {
        std::sort(c2_samples.begin(), c2_samples.end());
        row.c2_estimate = c2_samples[static_cast<std::size_t>(0.95 * (c2_samples.size() - 1))];
    }
    return row;
}

BoundReportOutput bound_report(const Mat& x0, const ObjectiveSpec& objective, std::uint64_t seed) {
    BoundReportOutput out;
    out.lower = geometry::lower_bound(x0, objective);
    std::ostringstream text;
    text.precision(6);
    const double n = static_cast<double>(x0.rows()) * x0.cols();

    text << "signal: " << x0.rows() << "x" << x0.cols() << ", objective: " << objective.label() << "\n";
    text << "term      kappa        L        n*kappa^2\n";
    for (std::size_t i = 0; i < objective.terms.size(); ++i) {
        const double k = out.lower.kappa[i];
        text << norms::to_string(objective.terms[i].kind) << "\t" << k << "\t" << out.lower.lipschitz[i]
             << "\t" << n * k * k << "\n";
    }
    text << "kappa_min = " << out.lower.kappa_min << ", Dbar(cone) = " << out.lower.dbar_cone << "\n";
    text << "m_low = " << out.lower.m_low << " (constant-free " << out.lower.m_low_constant_free << ")\n";
    text << "m_low_weighted = " << out.lower.m_low_weighted << "\n";

    if (objective.mode == ObjectiveMode::WeightedSum) {
        Rng rng(seed);
        out.upper = geometry::upper_bound(x0, objective, rng);
        out.has_upper = true;
        text << "m_up = " << out.upper.m_up << " with alphas [";
        for (std::size_t i = 0; i < out.upper.alpha.size(); ++i)
            text << (i ? ", " : "") << out.upper.alpha[i];
        text << "], distances [";
        for (std::size_t i = 0; i < out.upper.dilated_distance.size(); ++i)
            text << (i ? ", " : "") << out.upper.dilated_distance[i];
        text << "]\n";
        const double guard = std::sqrt(out.upper.m_up) + 2.0;
        text << "success at m >= " << guard * guard + 1.0 << " (t = 2 guard)\n";
    }
    out.text = text.str();
    return out;
}

}  // namespace simrec::harness
