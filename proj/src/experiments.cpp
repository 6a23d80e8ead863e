#include "sqngp/experiments.hpp"

#include "sqngp/csv.hpp"
#include "sqngp/problems/lgss.hpp"
#include "sqngp/problems/nlbench.hpp"
#include "sqngp/problems/particle_filter.hpp"
#include "sqngp/problems/toy1d.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

namespace sqngp::experiments {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr std::pair<Kind, const char*> kKindNames[] = {
    {Kind::GPDemo, "gp-demo"},
    {Kind::Run1D, "run-1d"},
    {Kind::RunLGSS, "run-lgss"},
    {Kind::RunNLToy, "run-nltoy"},
    {Kind::ArmijoCheck, "armijo-check"},
};

// ---- JSON helpers ---------------------------------------------------------

void check_keys(const ordered_json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw Error("config: '" + where + "' must be an object");
    for (const auto& item : obj.items())
        if (!allowed.count(item.key())) throw Error("config: unknown key '" + item.key() + "' in " + where);
}

template <class T>
void read(const ordered_json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_vector(const ordered_json& obj, const char* key, Vector& out) {
    if (!obj.contains(key)) return;
    const auto v = obj.at(key).get<std::vector<double>>();
    out = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void read_matrix(const ordered_json& obj, const char* key, Matrix& out) {
    if (!obj.contains(key)) return;
    const auto rows = obj.at(key).get<std::vector<std::vector<double>>>();
    if (rows.empty()) throw Error(std::string("config: matrix '") + key + "' is empty");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw Error(std::string("config: matrix '") + key + "' is ragged");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    out = m;
}

ordered_json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

ordered_json to_json(const Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const Vector row = m.row(i).transpose();
        rows.push_back(to_json(row));
    }
    return rows;
}

// ---- output helpers -------------------------------------------------------

std::ofstream open_output(const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

void write_summary(const ExperimentConfig& cfg, const ordered_json& stats) {
    if (cfg.out_dir.empty()) return;
    ordered_json doc;
    doc["experiment"] = to_string(cfg.kind);
    doc["config"] = ordered_json::parse(config_json(cfg));
    doc["stats"] = stats;
    auto out = open_output(fs::path(cfg.out_dir) / "summary.json");
    out << doc.dump(2) << '\n';
}

std::string run_label(int run) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%03d", run);
    return buf;
}

/// Runs body(i) for i in [0, count) on a small thread pool. Every index is
/// handled by exactly one worker; results go to caller-owned slots.
template <class Body>
void parallel_for(int count, int threads, Body body) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max(count, 1));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) body(i);
        });
    for (auto& t : pool) t.join();
}

RandomStream replicate_stream(const ExperimentConfig& cfg, int run) {
    return RandomStream(cfg.seed).spawn("replicate").spawn(static_cast<std::uint64_t>(run));
}

void write_trace(const ExperimentConfig& cfg, int run, const RunRecord& rec) {
    if (cfg.out_dir.empty()) return;
    auto out = open_output(fs::path(cfg.out_dir) / "traces" / (run_label(run) + ".csv"));
    write_trace_csv(out, rec);
}

std::vector<double> fhat_tail(const RunRecord& rec) {
    std::vector<double> tail;
    const std::size_t start = rec.rows.size() > 100 ? rec.rows.size() - 100 : 0;
    for (std::size_t i = start; i < rec.rows.size(); ++i) tail.push_back(rec.rows[i].fhat);
    return tail;
}

void write_replicates_csv(const ExperimentConfig& cfg, const MonteCarloResult& res) {
    if (cfg.out_dir.empty()) return;
    auto out = open_output(fs::path(cfg.out_dir) / "replicates.csv");
    CsvWriter csv(out);
    std::vector<std::string> header{"run", "status", "fallbacks", "iterations"};
    for (const auto& n : res.estimate_names) header.push_back("start_" + n);
    for (const auto& n : res.estimate_names) header.push_back("est_" + n);
    csv.row(header);
    for (const auto& r : res.replicates) {
        csv.field(static_cast<long>(r.run));
        csv.field(std::string(r.failed ? "error" : (r.status == RunStatus::Ok ? "ok" : "non_finite_gradient")));
        csv.field(static_cast<long>(r.fallbacks));
        csv.field(r.iterations);
        const auto nan = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = 0; i < res.estimate_names.size(); ++i)
            csv.field(static_cast<Eigen::Index>(i) < r.start.size() ? r.start(static_cast<Eigen::Index>(i)) : nan);
        for (std::size_t i = 0; i < res.estimate_names.size(); ++i)
            csv.field(static_cast<Eigen::Index>(i) < r.estimate.size() ? r.estimate(static_cast<Eigen::Index>(i)) : nan);
        csv.end_row();
    }
}

ordered_json stats_json(const std::map<std::string, double>& stats) {
    ordered_json out = ordered_json::object();
    for (const auto& [k, v] : stats) out[k] = std::isfinite(v) ? ordered_json(v) : ordered_json(format_double(v));
    return out;
}

/// Median over replicates of column i of the estimates; failed runs count as NaN
/// and sort last, which biases the median against them.
double median_of(const MonteCarloResult& res, Eigen::Index i, double (*transform)(double, double), double ref) {
    std::vector<double> values;
    for (const auto& r : res.replicates) {
        double v = (!r.failed && r.estimate.size() > i) ? transform(r.estimate(i), ref) : std::numeric_limits<double>::infinity();
        if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
        values.push_back(v);
    }
    return median(std::move(values));
}

double identity(double v, double) { return v; }
double abs_err(double v, double ref) { return std::abs(v - ref); }
double abs_rel_err(double v, double ref) { return std::abs(v - ref) / std::abs(ref); }

int count_failures(const MonteCarloResult& res) {
    int n = 0;
    for (const auto& r : res.replicates) n += (r.failed || r.status != RunStatus::Ok) ? 1 : 0;
    return n;
}

/// True when the median of f-hat over the second half of the tail is no
/// larger than over the first half.
bool tail_median_nonincreasing(const std::vector<double>& tail) {
    if (tail.size() < 2) return true;
    const auto mid = tail.begin() + static_cast<long>(tail.size() / 2);
    return median(std::vector<double>(mid, tail.end())) <= median(std::vector<double>(tail.begin(), mid));
}

// minimizer of the 1-D test function, by a dense scan refined with Newton steps
double toy1d_minimizer() {
    double best = 0.0;
    double fbest = std::numeric_limits<double>::infinity();
    for (double x = -10.0; x <= 10.0; x += 1e-3) {
        const double f = problems::toy1d_f(x);
        if (f < fbest) {
            fbest = f;
            best = x;
        }
    }
    for (int i = 0; i < 20; ++i) best -= problems::toy1d_grad(best) / problems::toy1d_hess(best);
    return best;
}

}  // namespace

// ---- configuration --------------------------------------------------------

Kind parse_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames)
        if (name == n) return k;
    throw Error("unknown experiment '" + std::string(name) + "'");
}

std::string to_string(Kind kind) {
    for (const auto& [k, n] : kKindNames)
        if (k == kind) return n;
    return "unknown";
}

double median(std::vector<double> values) {
    if (values.empty()) throw Error("median: no values");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ExperimentConfig default_config(Kind kind) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    auto& opt = cfg.optimizer;
    switch (kind) {
        case Kind::GPDemo:
        case Kind::ArmijoCheck:
            break;
        case Kind::Run1D:
            cfg.runs = 20;
            opt.k_max = 100;
            opt.gp.m = 1000.0;
            opt.gp.v = 0.2;
            opt.gp.h0 = 100.0;
            break;
        case Kind::RunLGSS:
            cfg.runs = 20;
            opt.k_max = 300;
            opt.gp.m = 100.0;
            opt.gp.v = 1.0;
            opt.gp.h0 = 100.0;
            opt.ls.xi = 100.0;
            opt.ls.tau = 300;
            break;
        case Kind::RunNLToy:
            cfg.runs = 10;
            cfg.particles = 50;
            opt.k_max = 300;
            opt.epsilon = 10.0;
            opt.gp.m = 100.0;
            opt.gp.v = 1.0;
            opt.gp.h0 = 30.0;
            opt.ls.c = 0.3;
            opt.ls.xi = 30.0;
            opt.ls.tau = 300;
            break;
    }
    return cfg;
}

void apply_json(ExperimentConfig& cfg, const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw Error(std::string("config: invalid JSON: ") + e.what());
    }
    try {
        check_keys(j,
                   {"experiment", "seed", "runs", "iters", "particles", "threads", "out", "optimizer", "gp_demo",
                    "toy1d", "lgss", "nltoy", "armijo"},
                   "top level");
        if (j.contains("experiment")) {
            const Kind k = parse_kind(j.at("experiment").get<std::string>());
            if (k != cfg.kind) throw Error("config: file is for '" + to_string(k) + "', not '" + to_string(cfg.kind) + "'");
        }
        read(j, "seed", cfg.seed);
        read(j, "runs", cfg.runs);
        read(j, "iters", cfg.optimizer.k_max);
        read(j, "particles", cfg.particles);
        read(j, "threads", cfg.threads);
        read(j, "out", cfg.out_dir);

        if (j.contains("optimizer")) {
            const auto& o = j.at("optimizer");
            check_keys(o, {"epsilon", "memory_p", "gp", "line_search", "grad_cov"}, "optimizer");
            auto& opt = cfg.optimizer;
            read(o, "epsilon", opt.epsilon);
            read(o, "memory_p", opt.memory_p);
            if (o.contains("grad_cov")) {
                Matrix r;
                read_matrix(o, "grad_cov", r);
                opt.grad_cov = r;
            }
            if (o.contains("gp")) {
                const auto& g = o.at("gp");
                check_keys(g, {"m", "v", "h0", "v_diag", "h0_diag", "mode", "quad_nodes"}, "optimizer.gp");
                read(g, "m", opt.gp.m);
                read(g, "v", opt.gp.v);
                read(g, "h0", opt.gp.h0);
                read_vector(g, "v_diag", opt.gp.v_diag);
                read_vector(g, "h0_diag", opt.gp.h0_diag);
                if (g.contains("mode")) opt.gp.mode = parse_mode(g.at("mode").get<std::string>());
                read(g, "quad_nodes", opt.gp.quad_nodes);
            }
            if (o.contains("line_search")) {
                const auto& l = o.at("line_search");
                check_keys(l, {"c", "rho", "xi", "tau"}, "optimizer.line_search");
                read(l, "c", opt.ls.c);
                read(l, "rho", opt.ls.rho);
                read(l, "xi", opt.ls.xi);
                read(l, "tau", opt.ls.tau);
            }
        }
        if (j.contains("gp_demo")) {
            const auto& g = j.at("gp_demo");
            auto& s = cfg.gp_demo;
            check_keys(g,
                       {"observations", "lo", "hi", "grad_noise_var", "m", "v", "mu", "grid_lo", "grid_hi", "grid_points",
                        "rmse_lo", "rmse_hi", "far_field"},
                       "gp_demo");
            read(g, "observations", s.observations);
            read(g, "lo", s.lo);
            read(g, "hi", s.hi);
            read(g, "grad_noise_var", s.grad_noise_var);
            read(g, "m", s.m);
            read(g, "v", s.v);
            read(g, "mu", s.mu);
            read(g, "grid_lo", s.grid_lo);
            read(g, "grid_hi", s.grid_hi);
            read(g, "grid_points", s.grid_points);
            read(g, "rmse_lo", s.rmse_lo);
            read(g, "rmse_hi", s.rmse_hi);
            read(g, "far_field", s.far_field);
        }
        if (j.contains("toy1d")) {
            const auto& t = j.at("toy1d");
            check_keys(t, {"x0_lo", "x0_hi", "cost_var", "grad_var"}, "toy1d");
            read(t, "x0_lo", cfg.toy1d.x0_lo);
            read(t, "x0_hi", cfg.toy1d.x0_hi);
            read(t, "cost_var", cfg.toy1d.cost_var);
            read(t, "grad_var", cfg.toy1d.grad_var);
        }
        if (j.contains("lgss")) {
            const auto& l = j.at("lgss");
            auto& s = cfg.lgss;
            check_keys(l, {"series_length", "a_max", "c_lo", "c_hi", "q_lo", "q_hi", "r_lo", "r_hi"}, "lgss");
            read(l, "series_length", s.series_length);
            read(l, "a_max", s.a_max);
            read(l, "c_lo", s.c_lo);
            read(l, "c_hi", s.c_hi);
            read(l, "q_lo", s.q_lo);
            read(l, "q_hi", s.q_hi);
            read(l, "r_lo", s.r_lo);
            read(l, "r_hi", s.r_hi);
        }
        if (j.contains("nltoy")) {
            const auto& n = j.at("nltoy");
            check_keys(n, {"series_length", "unit", "q_ref", "noise_draws"}, "nltoy");
            read(n, "series_length", cfg.nltoy.series_length);
            read_vector(n, "unit", cfg.nltoy.unit);
            read(n, "q_ref", cfg.nltoy.q_ref);
            read(n, "noise_draws", cfg.nltoy.noise_draws);
        }
        if (j.contains("armijo")) {
            const auto& a = j.at("armijo");
            auto& s = cfg.armijo;
            check_keys(a, {"a", "b", "r", "x", "bias", "cost_var", "draws", "step_factor", "se_band"}, "armijo");
            read_matrix(a, "a", s.a);
            read_matrix(a, "b", s.b);
            read_matrix(a, "r", s.r);
            read_vector(a, "x", s.x);
            read(a, "bias", s.bias);
            read(a, "cost_var", s.cost_var);
            read(a, "draws", s.draws);
            read(a, "step_factor", s.step_factor);
            read(a, "se_band", s.se_band);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    if (cfg.runs < 1) throw Error("config: runs must be >= 1");
    if (cfg.optimizer.k_max < 0) throw Error("config: iters must be >= 0");
    if (cfg.particles < 2) throw Error("config: particles must be >= 2");
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto j = ordered_json::parse(ss.str(), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("experiment"))
        throw Error("config '" + path + "' must be a JSON object with an \"experiment\" key");
    ExperimentConfig cfg = default_config(parse_kind(j.at("experiment").get<std::string>()));
    apply_json(cfg, ss.str());
    return cfg;
}

std::string config_json(const ExperimentConfig& cfg) {
    const auto& opt = cfg.optimizer;
    ordered_json j;
    j["experiment"] = to_string(cfg.kind);
    j["seed"] = cfg.seed;
    j["runs"] = cfg.runs;
    j["iters"] = opt.k_max;
    j["particles"] = cfg.particles;
    j["threads"] = cfg.threads;
    j["out"] = cfg.out_dir;
    ordered_json gp;
    gp["m"] = opt.gp.m;
    gp["v"] = opt.gp.v;
    gp["h0"] = opt.gp.h0;
    if (opt.gp.v_diag.size() > 0) gp["v_diag"] = to_json(opt.gp.v_diag);
    if (opt.gp.h0_diag.size() > 0) gp["h0_diag"] = to_json(opt.gp.h0_diag);
    gp["mode"] = to_string(opt.gp.mode);
    gp["quad_nodes"] = opt.gp.quad_nodes;
    ordered_json ls;
    ls["c"] = opt.ls.c;
    ls["rho"] = opt.ls.rho;
    ls["xi"] = opt.ls.xi;
    ls["tau"] = opt.ls.tau;
    ordered_json o;
    o["epsilon"] = opt.epsilon;
    o["memory_p"] = opt.memory_p;
    if (opt.grad_cov) o["grad_cov"] = to_json(*opt.grad_cov);
    o["gp"] = gp;
    o["line_search"] = ls;
    j["optimizer"] = o;

    switch (cfg.kind) {
        case Kind::GPDemo: {
            const auto& s = cfg.gp_demo;
            j["gp_demo"] = {{"observations", s.observations}, {"lo", s.lo},           {"hi", s.hi},
                            {"grad_noise_var", s.grad_noise_var}, {"m", s.m},         {"v", s.v},
                            {"mu", s.mu},                     {"grid_lo", s.grid_lo}, {"grid_hi", s.grid_hi},
                            {"grid_points", s.grid_points},   {"rmse_lo", s.rmse_lo}, {"rmse_hi", s.rmse_hi},
                            {"far_field", s.far_field}};
            break;
        }
        case Kind::Run1D: {
            const auto& s = cfg.toy1d;
            j["toy1d"] = {{"x0_lo", s.x0_lo}, {"x0_hi", s.x0_hi}, {"cost_var", s.cost_var}, {"grad_var", s.grad_var}};
            break;
        }
        case Kind::RunLGSS: {
            const auto& s = cfg.lgss;
            j["lgss"] = {{"series_length", s.series_length}, {"a_max", s.a_max}, {"c_lo", s.c_lo}, {"c_hi", s.c_hi},
                         {"q_lo", s.q_lo}, {"q_hi", s.q_hi}, {"r_lo", s.r_lo}, {"r_hi", s.r_hi}};
            break;
        }
        case Kind::RunNLToy: {
            const auto& s = cfg.nltoy;
            j["nltoy"] = {{"series_length", s.series_length}, {"unit", to_json(s.unit)}, {"q_ref", s.q_ref},
                          {"noise_draws", s.noise_draws}};
            break;
        }
        case Kind::ArmijoCheck: {
            const auto& s = cfg.armijo;
            j["armijo"] = {{"a", to_json(s.a)},         {"b", to_json(s.b)},          {"r", to_json(s.r)},
                           {"x", to_json(s.x)},         {"bias", s.bias},             {"cost_var", s.cost_var},
                           {"draws", s.draws},          {"step_factor", s.step_factor}, {"se_band", s.se_band}};
            break;
        }
    }
    return j.dump(2);
}

// ---- gp-demo --------------------------------------------------------------

GPDemoResult gp_demo(const ExperimentConfig& cfg) {
    const auto& s = cfg.gp_demo;
    if (s.observations < 1) throw Error("gp_demo: need at least one observation");
    if (s.grid_points < 2) throw Error("gp_demo: need at least two grid points");

    RandomStream noise = RandomStream(cfg.seed).spawn("gradient");
    const double sd = std::sqrt(s.grad_noise_var);
    GPDemoResult res;
    std::vector<double> grads;
    for (int k = 0; k <= s.observations; ++k) {
        const double x = s.lo + (s.hi - s.lo) * k / s.observations;
        res.iterates.push_back(x);
        grads.push_back(problems::toy1d_grad(x) + sd * noise.normal());
    }

    GPPrior prior = GPPrior::isotropic(1, s.m, s.v, s.mu);
    HessianGP gp(prior, Matrix::Constant(1, 1, s.grad_noise_var), s.observations - 1, cfg.optimizer.gp.mode,
                 cfg.optimizer.gp.quad_nodes);
    for (int k = 0; k < s.observations; ++k)
        gp.push_observation(ObservationPair::make(k, Vector::Constant(1, res.iterates[k]),
                                                  Vector::Constant(1, res.iterates[k + 1]),
                                                  Vector::Constant(1, grads[k + 1] - grads[k])));

    double se_post = 0.0, se_prior = 0.0;
    int in_region = 0;
    res.min_std = std::numeric_limits<double>::infinity();
    for (int i = 0; i < s.grid_points; ++i) {
        const double x = s.grid_lo + (s.grid_hi - s.grid_lo) * i / (s.grid_points - 1);
        const HessianPosterior post = gp.posterior(Vector::Constant(1, x));
        GPDemoRow row{x, problems::toy1d_hess(x), post.phi(0), std::sqrt(std::max(post.sigma(0, 0), 0.0))};
        res.min_std = std::min(res.min_std, row.post_std);
        if (x >= s.rmse_lo && x <= s.rmse_hi) {
            se_post += std::pow(row.post_mean - row.true_hess, 2);
            se_prior += std::pow(s.mu - row.true_hess, 2);
            ++in_region;
        }
        if (x <= s.far_field) res.far_field_max_dev = std::max(res.far_field_max_dev, std::abs(row.post_mean - s.mu));
        res.rows.push_back(row);
    }
    if (in_region == 0) throw Error("gp_demo: RMSE region contains no grid points");
    res.rmse_posterior = std::sqrt(se_post / in_region);
    res.rmse_prior = std::sqrt(se_prior / in_region);

    if (!cfg.out_dir.empty()) {
        auto out = open_output(fs::path(cfg.out_dir) / "gp_demo.csv");
        CsvWriter csv(out);
        csv.row({"x", "true_hess", "post_mean", "post_std"});
        for (const auto& r : res.rows) {
            csv.field(r.x);
            csv.field(r.true_hess);
            csv.field(r.post_mean);
            csv.field(r.post_std);
            csv.end_row();
        }
        auto obs = open_output(fs::path(cfg.out_dir) / "gp_demo_iterates.csv");
        CsvWriter ocsv(obs);
        ocsv.row({"k", "x", "grad"});
        for (std::size_t k = 0; k < res.iterates.size(); ++k) {
            ocsv.field(static_cast<long>(k));
            ocsv.field(res.iterates[k]);
            ocsv.field(grads[k]);
            ocsv.end_row();
        }
        write_summary(cfg, {{"rmse_posterior", res.rmse_posterior},
                            {"rmse_prior", res.rmse_prior},
                            {"rmse_ratio", res.rmse_prior / res.rmse_posterior},
                            {"far_field_max_dev", res.far_field_max_dev},
                            {"min_std", res.min_std}});
    }
    return res;
}

// ---- run-1d ---------------------------------------------------------------

MonteCarloResult run_1d(const ExperimentConfig& cfg) {
    const auto& s = cfg.toy1d;
    NoiseModel noise;
    noise.cost_var = s.cost_var;
    noise.grad_cov = Matrix::Constant(1, 1, s.grad_var);
    const AnalyticOracle oracle = problems::toy1d_oracle(noise);

    MonteCarloResult res;
    res.estimate_names = {"x"};
    res.replicates.resize(static_cast<std::size_t>(cfg.runs));
    parallel_for(cfg.runs, cfg.threads, [&](int i) {
        Replicate& rep = res.replicates[static_cast<std::size_t>(i)];
        rep.run = i;
        try {
            RandomStream rs = replicate_stream(cfg, i);
            RandomStream init = rs.spawn("init");
            rep.start = Vector::Constant(1, init.uniform(s.x0_lo, s.x0_hi));
            OptimizerConfig opt = cfg.optimizer;
            opt.seed = rs.spawn("optimizer").seed();
            const RunRecord rec = run(oracle, rep.start, opt);
            rep.estimate = rec.x_final;
            rep.status = rec.status;
            rep.message = rec.message;
            rep.fallbacks = rec.fallbacks;
            rep.iterations = static_cast<long>(rec.rows.size());
            rep.fhat_tail = fhat_tail(rec);
            write_trace(cfg, i, rec);
        } catch (const std::exception& e) {
            rep.failed = true;
            rep.message = e.what();
        }
    });

    const double xstar = toy1d_minimizer();
    res.stats["x_star"] = xstar;
    res.stats["median_x"] = median_of(res, 0, identity, 0.0);
    res.stats["median_abs_err"] = median_of(res, 0, abs_err, xstar);
    res.stats["failures"] = count_failures(res);
    write_replicates_csv(cfg, res);
    write_summary(cfg, stats_json(res.stats));
    return res;
}

// ---- run-lgss -------------------------------------------------------------

MonteCarloResult run_lgss(const ExperimentConfig& cfg) {
    const auto& s = cfg.lgss;
    const problems::LGSSModel model;
    const problems::LGSSParams truth;

    MonteCarloResult res;
    res.estimate_names = {"a", "c", "q", "r", "var_y"};
    res.replicates.resize(static_cast<std::size_t>(cfg.runs));
    auto natural = [](const problems::LGSSParams& p) {
        return (Vector(5) << p.a, p.c, p.q, p.r, p.stationary_output_var()).finished();
    };
    parallel_for(cfg.runs, cfg.threads, [&](int i) {
        Replicate& rep = res.replicates[static_cast<std::size_t>(i)];
        rep.run = i;
        try {
            RandomStream rs = replicate_stream(cfg, i);
            RandomStream data = rs.spawn("data");
            const Vector y = problems::simulate_lgss(model, truth, s.series_length, data);
            RandomStream init = rs.spawn("init");
            problems::LGSSParams p0;
            p0.a = init.uniform(-s.a_max, s.a_max);
            p0.c = init.uniform(s.c_lo, s.c_hi);
            p0.q = init.uniform(s.q_lo, s.q_hi);
            p0.r = init.uniform(s.r_lo, s.r_hi);
            rep.start = natural(p0);

            const AnalyticOracle oracle = problems::lgss_noisy_oracle(model, y);
            OptimizerConfig opt = cfg.optimizer;
            opt.seed = rs.spawn("optimizer").seed();
            const RunRecord rec = run(oracle, p0.to_theta(), opt);
            rep.estimate = natural(problems::LGSSParams::from_theta(rec.x_final));
            rep.status = rec.status;
            rep.message = rec.message;
            rep.fallbacks = rec.fallbacks;
            rep.iterations = static_cast<long>(rec.rows.size());
            rep.fhat_tail = fhat_tail(rec);
            write_trace(cfg, i, rec);
        } catch (const std::exception& e) {
            rep.failed = true;
            rep.message = e.what();
        }
    });

    const double var_true = truth.stationary_output_var();
    res.stats["var_y_true"] = var_true;
    res.stats["median_a"] = median_of(res, 0, identity, 0.0);
    res.stats["median_abs_a_err"] = median_of(res, 0, abs_err, truth.a);
    res.stats["median_var_y"] = median_of(res, 4, identity, 0.0);
    res.stats["median_var_y_rel_err"] = std::abs(res.stats["median_var_y"] - var_true) / var_true;
    res.stats["median_abs_rel_var_y_err"] = median_of(res, 4, abs_rel_err, var_true);
    res.stats["failures"] = count_failures(res);
    write_replicates_csv(cfg, res);
    write_summary(cfg, stats_json(res.stats));
    return res;
}

// ---- run-nltoy ------------------------------------------------------------

MonteCarloResult run_nltoy(const ExperimentConfig& cfg) {
    const auto& s = cfg.nltoy;
    if (s.unit.size() != 6) throw Error("run_nltoy: unit must have 6 entries");
    if (s.noise_draws < 2) throw Error("run_nltoy: noise_draws must be >= 2");
    const problems::NLBenchModel model;
    const problems::NLBenchParams truth;
    auto ssm = std::make_shared<const problems::NLBenchStateSpace>(model);

    MonteCarloResult res;
    res.estimate_names = {"a", "b", "c", "d", "q", "r"};
    res.replicates.resize(static_cast<std::size_t>(cfg.runs));
    parallel_for(cfg.runs, cfg.threads, [&](int i) {
        Replicate& rep = res.replicates[static_cast<std::size_t>(i)];
        rep.run = i;
        try {
            RandomStream rs = replicate_stream(cfg, i);
            RandomStream data = rs.spawn("data");
            const Vector y = problems::simulate_nlbench(model, truth, s.series_length, data);

            RandomStream init = rs.spawn("init");
            auto around = [&init](double v) { return init.uniform(0.5 * v, 1.5 * v); };
            problems::NLBenchParams p0;
            p0.a = around(truth.a);
            p0.b = around(truth.b);
            p0.c = around(truth.c);
            p0.d = around(truth.d);
            p0.q = around(s.q_ref);
            p0.r = around(truth.r);
            rep.start = p0.natural();

            auto pf = std::make_shared<const problems::ParticleFilterOracle>(ssm, y, cfg.particles);
            const ScaledOracle oracle(pf, s.unit);
            const Vector z0 = oracle.from_inner(p0.to_theta());

            // the filter's gradient noise is unknown; estimate it at the start
            RandomStream noise = rs.spawn("noise");
            Matrix r = estimate_gradient_noise(oracle, z0, s.noise_draws, noise);
            r += 1e-6 * std::max(r.diagonal().mean(), 1e-12) * Matrix::Identity(6, 6);

            OptimizerConfig opt = cfg.optimizer;
            opt.seed = rs.spawn("optimizer").seed();
            opt.grad_cov = r;
            RunRecord rec = run(oracle, z0, opt);
            rep.estimate = problems::NLBenchParams::from_theta(oracle.to_inner(rec.x_final)).natural();
            rep.status = rec.status;
            rep.message = rec.message;
            rep.fallbacks = rec.fallbacks;
            rep.iterations = static_cast<long>(rec.rows.size());
            rep.fhat_tail = fhat_tail(rec);
            // traces are reported in the model's unconstrained coordinates
            for (auto& row : rec.rows) row.x = oracle.to_inner(row.x);
            rec.x_final = oracle.to_inner(rec.x_final);
            write_trace(cfg, i, rec);
        } catch (const std::exception& e) {
            rep.failed = true;
            rep.message = e.what();
        }
    });

    const Vector t = truth.natural();
    for (Eigen::Index i = 0; i < 6; ++i) {
        const std::string& n = res.estimate_names[static_cast<std::size_t>(i)];
        res.stats["median_" + n] = median_of(res, i, identity, 0.0);
        res.stats["median_abs_err_" + n] = std::abs(res.stats["median_" + n] - t(i));
    }
    int monotone = 0;
    for (const auto& r : res.replicates) monotone += (!r.failed && tail_median_nonincreasing(r.fhat_tail)) ? 1 : 0;
    res.stats["tail_median_nonincreasing_runs"] = monotone;
    res.stats["failures"] = count_failures(res);
    write_replicates_csv(cfg, res);
    write_summary(cfg, stats_json(res.stats));
    return res;
}

// ---- armijo-check ---------------------------------------------------------

ArmijoReport armijo_check(const ExperimentConfig& cfg) {
    const auto& s = cfg.armijo;
    const Eigen::Index n = s.x.size();
    if (s.a.rows() != n || s.a.cols() != n || s.b.rows() != n || s.b.cols() != n || s.r.rows() != n ||
        s.r.cols() != n)
        throw Error("armijo_check: dimension mismatch");
    NoiseModel noise;
    noise.bias = s.bias;
    noise.cost_var = s.cost_var;
    noise.grad_cov = s.r;
    const AnalyticOracle oracle = quadratic_oracle(s.a, noise);
    const Vector grad = s.a * s.x;

    ArmijoReport rep;
    const ArmijoBound bound = armijo_c_bound(grad, s.b, s.r);
    rep.gamma = bound.gamma;
    rep.beta = bound.beta;
    rep.c_bar = bound.c_bar;
    rep.c_bar_noiseless = armijo_c_bound(grad, s.b, Matrix::Zero(n, n)).c_bar;
    rep.alpha = s.step_factor * s.x.norm() / (s.b * grad).norm();

    RandomStream master(cfg.seed);
    RandomStream lo = master.spawn("below");
    RandomStream hi = master.spawn("above");
    rep.below = armijo_residual(oracle, s.x, s.b, 0.9 * rep.c_bar, rep.alpha, s.draws, lo);
    rep.above = armijo_residual(oracle, s.x, s.b, 2.0 * rep.c_bar, rep.alpha, s.draws, hi);
    rep.pass_below = rep.below.mean + s.se_band * rep.below.std_error <= 0.0;
    rep.pass_above = rep.above.mean - s.se_band * rep.above.std_error > 0.0;

    if (!cfg.out_dir.empty()) {
        auto out = open_output(fs::path(cfg.out_dir) / "armijo.csv");
        CsvWriter csv(out);
        csv.row({"c_factor", "c", "alpha", "draws", "mean", "std_error", "pass"});
        const std::pair<double, const ArmijoResidual*> cases[] = {{0.9, &rep.below}, {2.0, &rep.above}};
        for (const auto& [factor, r] : cases) {
            csv.field(factor);
            csv.field(factor * rep.c_bar);
            csv.field(rep.alpha);
            csv.field(r->draws);
            csv.field(r->mean);
            csv.field(r->std_error);
            csv.field(static_cast<long>(r == &rep.below ? rep.pass_below : rep.pass_above));
            csv.end_row();
        }
        write_summary(cfg, {{"gamma", rep.gamma},
                            {"beta", rep.beta},
                            {"c_bar", rep.c_bar},
                            {"c_bar_noiseless", rep.c_bar_noiseless},
                            {"alpha", rep.alpha},
                            {"pass_below", rep.pass_below},
                            {"pass_above", rep.pass_above}});
    }
    return rep;
}

// ---- dispatch -------------------------------------------------------------

std::string run_experiment(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << std::setprecision(6);
    switch (cfg.kind) {
        case Kind::GPDemo: {
            const auto r = gp_demo(cfg);
            out << "gp-demo: rmse posterior " << r.rmse_posterior << ", prior " << r.rmse_prior << " (ratio "
                << r.rmse_prior / r.rmse_posterior << "), far-field max |mean - mu| " << r.far_field_max_dev << '\n';
            break;
        }
        case Kind::ArmijoCheck: {
            const auto r = armijo_check(cfg);
            out << "armijo-check: gamma " << r.gamma << ", beta " << r.beta << ", c_bar " << r.c_bar
                << " (noiseless " << r.c_bar_noiseless << "), alpha " << r.alpha << '\n'
                << "  c = 0.9 c_bar: mean " << r.below.mean << " +- " << r.below.std_error << " -> "
                << (r.pass_below ? "PASS" : "FAIL") << '\n'
                << "  c = 2.0 c_bar: mean " << r.above.mean << " +- " << r.above.std_error << " -> "
                << (r.pass_above ? "PASS" : "FAIL") << '\n';
            break;
        }
        case Kind::Run1D:
        case Kind::RunLGSS:
        case Kind::RunNLToy: {
            const auto r = cfg.kind == Kind::Run1D ? run_1d(cfg) : cfg.kind == Kind::RunLGSS ? run_lgss(cfg) : run_nltoy(cfg);
            out << to_string(cfg.kind) << ": " << r.replicates.size() << " replicates\n";
            for (const auto& [k, v] : r.stats) out << "  " << k << " = " << v << '\n';
            break;
        }
    }
    return out.str();
}

}  // namespace sqngp::experiments
