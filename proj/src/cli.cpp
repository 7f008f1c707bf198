#include "gradcp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gradcp/detector.hpp"
#include "gradcp/errors.hpp"
#include "gradcp/log.hpp"
#include "gradcp/montecarlo.hpp"

namespace gradcp::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Flag values as parsed. Only flags that were given on the command line are
// applied to the base configuration, so `simulate` keeps its design defaults.
struct Flags {
    std::string input;
    std::string out_dir = ".";
    std::string model = "mu1";
    std::size_t T = 500;
    std::size_t N = 200;
    char delimiter = ',';
    std::string header = "auto";

    double alpha = 0.1;
    std::string feature = "mean";
    bool reverse = false;
    bool scaled = false;
    bool pivotal = true;
    double h = 0.2;
    double hac_bandwidth = 10.0;
    std::string kernel = "bartlett";
    std::string centering = "nw";
    std::string smoother = "epanechnikov";
    std::string sigma_estimator = "residual";
    std::string precenter = "none";
    std::string method = "auto";
    std::size_t sims = 2000;
    std::size_t grid = 512;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string log_level = "warn";
};

const std::map<std::string, HacKernel> kernels{{"bartlett", HacKernel::Bartlett}, {"flattop", HacKernel::FlatTop}};
const std::map<std::string, CenteringKind> centerings{
    {"nw", CenteringKind::NadarayaWatson}, {"global", CenteringKind::GlobalMean}, {"none", CenteringKind::None}};
const std::map<std::string, SmoothingKernel> smoothers{{"epanechnikov", SmoothingKernel::Epanechnikov},
                                                       {"uniform", SmoothingKernel::Uniform}};
const std::map<std::string, SigmaEstimator> sigma_estimators{{"residual", SigmaEstimator::Residual},
                                                             {"difference", SigmaEstimator::Difference}};
const std::map<std::string, PreCentering> precenterings{
    {"none", PreCentering::None}, {"global", PreCentering::GlobalMean}, {"nw", PreCentering::NadarayaWatson}};
const std::map<std::string, SupMethod> methods{
    {"brute", SupMethod::Brute}, {"hull", SupMethod::Hull}, {"auto", SupMethod::Auto}};
const std::map<std::string, log::Level> levels{{"debug", log::Level::Debug},
                                               {"info", log::Level::Info},
                                               {"warn", log::Level::Warn},
                                               {"error", log::Level::Error},
                                               {"off", log::Level::Off}};

template <typename Map>
std::string key_of(const Map& map, typename Map::mapped_type value) {
    for (const auto& [k, v] : map)
        if (v == value) return k;
    return "?";
}

template <typename Map>
std::vector<std::string> keys(const Map& map) {
    std::vector<std::string> out;
    for (const auto& [k, v] : map) out.push_back(k);
    return out;
}

struct Registered {
    std::map<std::string, CLI::Option*> options;
    bool given(const std::string& name) const {
        auto it = options.find(name);
        return it != options.end() && it->second->count() > 0;
    }
};

void add_detector_flags(CLI::App* app, Flags& f, Registered& reg) {
    auto& o = reg.options;
    o["alpha"] = app->add_option("--alpha", f.alpha, "Level alpha in (0, 1); bounds the underestimation probability")
                     ->capture_default_str();
    o["feature"] = app->add_option("--feature", f.feature, "Feature family: mean | variance | acf:<p> | cov")
                       ->capture_default_str();
    o["reverse"] = app->add_flag("--reverse", f.reverse, "Detect in reversed time: estimate the start of a stable "
                                                         "terminal span [u, 1]");
    o["scaled"] = app->add_flag("--scaled", f.scaled, "Divide the mean statistic by an estimate of the error sd");
    o["pivotal"] = app->add_flag("--pivotal,!--no-pivotal", f.pivotal,
                                 "With --scaled: use the Brownian limit instead of an estimated covariance");
    o["h"] = app->add_option("--h", f.h,
                             "Smoothing bandwidth in rescaled time, e.g. 10 years of monthly data with "
                             "T = 1968 is h = 120/1968 = 0.061")
                 ->capture_default_str();
    o["hac-bandwidth"] =
        app->add_option("--hac-bandwidth", f.hac_bandwidth, "HAC lag window bandwidth b in observations (0: lag 0 only)")
            ->capture_default_str();
    o["kernel"] = app->add_option("--kernel", f.kernel, "HAC lag window")
                      ->check(CLI::IsMember(keys(kernels)))
                      ->capture_default_str();
    o["centering"] = app->add_option("--centering", f.centering, "Centring of features inside the HAC estimator")
                         ->check(CLI::IsMember(keys(centerings)))
                         ->capture_default_str();
    o["smoother"] = app->add_option("--smoother", f.smoother, "Nadaraya-Watson kernel")
                        ->check(CLI::IsMember(keys(smoothers)))
                        ->capture_default_str();
    o["sigma-estimator"] =
        app->add_option("--sigma-estimator", f.sigma_estimator, "Error sd estimator for --scaled")
            ->check(CLI::IsMember(keys(sigma_estimators)))
            ->capture_default_str();
    o["precenter"] = app->add_option("--precenter", f.precenter, "Centre the data before forming the statistic")
                         ->check(CLI::IsMember(keys(precenterings)))
                         ->capture_default_str();
    o["method"] = app->add_option("--method", f.method, "Supremum evaluation")
                      ->check(CLI::IsMember(keys(methods)))
                      ->capture_default_str();
    o["sims"] = app->add_option("--sims", f.sims, "Gaussian draws for the quantile curve (>= 100)")
                    ->capture_default_str();
    o["grid"] = app->add_option("--grid", f.grid, "Maximum simulation grid size m")->capture_default_str();
    o["seed"] = app->add_option("--seed", f.seed, "Master seed (overridden by GRADCP_SEED)")->capture_default_str();
    o["threads"] = app->add_option("--threads", f.threads, "Worker threads (0: all cores)")->capture_default_str();
}

void add_input_flags(CLI::App* app, Flags& f, Registered& reg, bool required) {
    auto* in = app->add_option("--input", f.input, "CSV file, one row per time point, one column per coordinate");
    if (required) in->required();
    reg.options["input"] = in;
    app->add_option("--delimiter", f.delimiter, "CSV field separator")->capture_default_str();
    app->add_option("--header", f.header, "Header row: auto | yes | no")
        ->check(CLI::IsMember({"auto", "yes", "no"}))
        ->capture_default_str();
}

DetectionConfig apply(DetectionConfig c, const Flags& f, const Registered& reg) {
    if (reg.given("alpha")) c.alpha = f.alpha;
    if (reg.given("feature")) c.feature = f.feature;
    if (reg.given("reverse")) c.direction = f.reverse ? Direction::Reverse : Direction::Forward;
    if (reg.given("scaled")) c.scaled = f.scaled;
    if (reg.given("pivotal")) c.gp.pivotal = f.pivotal;
    if (reg.given("h")) c.lrv.h = f.h;
    if (reg.given("hac-bandwidth")) c.lrv.hac.bandwidth = f.hac_bandwidth;
    if (reg.given("kernel")) c.lrv.hac.kind = kernels.at(f.kernel);
    if (reg.given("centering")) c.lrv.centering = centerings.at(f.centering);
    if (reg.given("smoother")) c.lrv.smoother = smoothers.at(f.smoother);
    if (reg.given("sigma-estimator")) c.lrv.sigma = sigma_estimators.at(f.sigma_estimator);
    if (reg.given("precenter")) c.precenter = precenterings.at(f.precenter);
    if (reg.given("method")) c.method = methods.at(f.method);
    if (reg.given("sims")) c.gp.n_draws = f.sims;
    if (reg.given("grid")) c.gp.max_grid = f.grid;
    if (reg.given("threads")) c.threads = f.threads;
    c.gp.seed = f.seed;
    c.validate();
    return c;
}

json config_json(const DetectionConfig& c) {
    return json{
        {"alpha", c.alpha},
        {"feature", c.feature},
        {"direction", to_string(c.direction)},
        {"scaled", c.scaled},
        {"pivotal", c.gp.pivotal},
        {"h", c.lrv.h},
        {"hac_kernel", key_of(kernels, c.lrv.hac.kind)},
        {"hac_bandwidth", c.lrv.hac.bandwidth},
        {"centering", key_of(centerings, c.lrv.centering)},
        {"smoother", key_of(smoothers, c.lrv.smoother)},
        {"sigma_estimator", key_of(sigma_estimators, c.lrv.sigma)},
        {"precenter", key_of(precenterings, c.precenter)},
        {"method", key_of(methods, c.method)},
        {"sims", c.gp.n_draws},
        {"grid", c.gp.max_grid},
        {"seed", c.gp.seed},
        {"threads", c.threads},
    };
}

std::string preamble(const std::string& command, const json& context) {
    return "# gradcp " + command + "\n# " + context.dump() + "\n";
}

SeriesSample load(const Flags& f) {
    CsvFormat fmt;
    fmt.delimiter = f.delimiter;
    fmt.header = f.header == "yes" ? CsvFormat::Header::Present
                 : f.header == "no" ? CsvFormat::Header::Absent
                                    : CsvFormat::Header::Auto;
    return load_series_file(f.input, fmt);
}

fs::path prepare_out_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p))
        throw std::invalid_argument("output directory '" + dir + "' cannot be created");
    return p;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write '" + path.string() + "'");
    return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int cmd_detect(const Flags& f, const Registered& reg, std::ostream& out) {
    const auto config = apply(DetectionConfig{}, f, reg);
    const auto sample = load(f);
    const auto result = detect(sample, config);
    const auto dir = prepare_out_dir(f.out_dir);

    json context{{"input", f.input}, {"seed", config.gp.seed}, {"config", config_json(config)}};
    json doc = context;
    doc["command"] = "detect";
    doc["result"] = json{
        {"u_hat", result.u_hat},
        {"u_hat_prelim", result.u_hat_prelim},
        {"tau_prelim", result.tau_prelim},
        {"tau_refined", result.tau_refined},
        {"sigma_hat", result.sigma_hat ? json(*result.sigma_hat) : json(nullptr)},
        {"feature", result.feature},
        {"feature_labels", result.surface->feature_labels},
        {"direction", to_string(result.direction)},
        {"alpha", result.alpha},
        {"T", result.length},
        {"dim", sample.dim()},
        {"grid_size", result.grid_size},
        {"sim_grid_size", result.sim_grid_size},
        {"seed", result.seed},
        {"repaired_steps", result.repaired_steps},
        {"r_profile", result.r_profile},
        {"r_profile_prelim", result.r_profile_prelim},
    };
    open_output(dir / "detection.json") << doc.dump(2) << "\n";
    auto surface_out = open_output(dir / "surface.csv");
    write_surface_csv(surface_out, *result.surface, preamble("detect", context));
    auto quantile_out = open_output(dir / "quantiles.csv");
    write_quantile_csv(quantile_out, *result.quantiles, preamble("detect", context));

    out << "u_hat = " << result.u_hat << " (preliminary " << result.u_hat_prelim << ", tau " << result.tau_refined
        << ")\n";
    return Success;
}

int cmd_surface(const Flags& f, const Registered& reg, std::ostream& out) {
    const auto config = apply(DetectionConfig{}, f, reg);
    const auto sample = load(f);
    const auto prepared = prepare_surface(sample, config);
    const auto dir = prepare_out_dir(f.out_dir);
    json context{{"input", f.input},
                 {"seed", config.gp.seed},
                 {"config", config_json(config)},
                 {"sigma_hat", prepared.sigma_hat ? json(*prepared.sigma_hat) : json(nullptr)}};
    auto csv = open_output(dir / "surface.csv");
    write_surface_csv(csv, prepared.surface, preamble("surface", context));
    out << "wrote " << (dir / "surface.csv").string() << " (" << prepared.surface.dsup.size() << " points)\n";
    return Success;
}

int cmd_quantiles(const Flags& f, const Registered& reg, std::ostream& out) {
    const auto config = apply(DetectionConfig{}, f, reg);
    std::shared_ptr<const QuantileCurve> curve;
    json context{{"seed", config.gp.seed}, {"config", config_json(config)}};
    if (!f.input.empty()) {
        curve = detect(load(f), config).quantiles;
        context["input"] = f.input;
    } else {
        if (!reg.given("T")) throw std::invalid_argument("quantiles needs --input, or --T for the pivotal curve");
        if (!(config.scaled && config.gp.pivotal))
            throw std::invalid_argument("without --input only the pivotal curve (--scaled --pivotal) is available");
        curve = std::make_shared<QuantileCurve>(pivotal_curve(f.T, config));
        context["T"] = f.T;
    }
    const auto dir = prepare_out_dir(f.out_dir);
    auto csv = open_output(dir / "quantiles.csv");
    write_quantile_csv(csv, *curve, preamble("quantiles", context));
    out << "q(1) = " << curve->q.back() << "\n";
    return Success;
}

int cmd_simulate(const Flags& f, const Registered& reg, std::ostream& out) {
    ModelSpec spec;
    spec.design = parse_design(f.model);
    spec.T = f.T;
    if (f.N < 1) throw std::invalid_argument("--N must be at least 1");
    const auto config = apply(default_config(spec.design), f, reg);
    const auto summary = run_study(spec, f.N, config, f.seed, config.threads);
    const auto dir = prepare_out_dir(f.out_dir);

    json context{{"model", design_name(spec.design)},
                 {"T", spec.T},
                 {"N", f.N},
                 {"seed", f.seed},
                 {"config", config_json(config)}};
    json doc = context;
    doc["command"] = "simulate";
    doc["model_parameters"] = json{{"phi", spec.phi},
                                   {"innovation_sd", spec.innovation_sd},
                                   {"iid_sd", spec.iid_sd},
                                   {"seasonal_amplitude", spec.seasonal_amplitude}};
    doc["summary"] = json{
        {"true_u0", summary.true_u0},
        {"replicates", summary.replicates},
        {"failures", summary.failures},
        {"median", number_or_null(summary.median)},
        {"iqr", number_or_null(summary.iqr)},
        {"underestimation_fraction", summary.underestimation_fraction},
        {"estimates", summary.estimates},
        {"prelim_estimates", summary.prelim_estimates},
        {"histogram", json{{"edges", summary.histogram.edges}, {"counts", summary.histogram.counts}}},
    };
    open_output(dir / "study.json") << doc.dump(2) << "\n";
    auto csv = open_output(dir / "histogram.csv");
    write_histogram_csv(csv, summary.histogram, preamble("simulate", context));

    out << design_name(spec.design) << ": median " << summary.median << ", IQR " << summary.iqr
        << ", underestimation " << summary.underestimation_fraction << ", failures " << summary.failures << "\n";
    return Success;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Flags f;
    CLI::App app{"Estimate gradual change points in locally stationary time series"};
    app.name(args.empty() ? "gradcp" : fs::path(args.front()).filename().string());
    app.require_subcommand(1, 1);
    // "-h" is left free so that "--h" can name the smoothing bandwidth.
    app.set_help_flag("--help", "Print this help message and exit");
    app.add_option("--log-level", f.log_level, "debug | info | warn | error | off")
        ->check(CLI::IsMember(keys(levels)))
        ->capture_default_str();
    app.add_option("--out-dir", f.out_dir, "Directory for output files")->capture_default_str();

    Registered detect_reg, surface_reg, quantile_reg, sim_reg;
    auto* detect_cmd = app.add_subcommand("detect", "Estimate u0; writes detection.json, surface.csv, quantiles.csv");
    add_input_flags(detect_cmd, f, detect_reg, true);
    add_detector_flags(detect_cmd, f, detect_reg);

    auto* surface_cmd = app.add_subcommand("surface", "Compute the time-variation profile only; writes surface.csv");
    add_input_flags(surface_cmd, f, surface_reg, true);
    add_detector_flags(surface_cmd, f, surface_reg);

    auto* quantile_cmd = app.add_subcommand("quantiles", "Simulate the threshold curve; writes quantiles.csv");
    add_input_flags(quantile_cmd, f, quantile_reg, false);
    add_detector_flags(quantile_cmd, f, quantile_reg);
    quantile_reg.options["T"] = quantile_cmd->add_option("--T", f.T, "Sample length for the pivotal curve");

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study; writes study.json, histogram.csv");
    sim_cmd->add_option("--model", f.model, "mu1|mu2|mu3|mu4|mu5|sigma1|sigma2|Sigma1|Sigma2|null|seasonal")
        ->capture_default_str();
    sim_cmd->add_option("--T", f.T, "Series length")->capture_default_str();
    sim_cmd->add_option("--N", f.N, "Replicates")->capture_default_str();
    add_detector_flags(sim_cmd, f, sim_reg);

    for (auto* sub : {detect_cmd, surface_cmd, quantile_cmd, sim_cmd}) sub->add_option("--out-dir", f.out_dir);

    std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Success : UsageError;
    }

    log::set_level(levels.at(f.log_level));
    if (const char* env = std::getenv("GRADCP_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            f.seed = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument(env);
        } catch (const std::exception&) {
            err << "error: GRADCP_SEED must be an unsigned 64-bit integer, got '" << env << "'\n";
            return UsageError;
        }
    }

    try {
        if (*detect_cmd) return cmd_detect(f, detect_reg, out);
        if (*surface_cmd) return cmd_surface(f, surface_reg, out);
        if (*quantile_cmd) return cmd_quantiles(f, quantile_reg, out);
        return cmd_simulate(f, sim_reg, out);
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return DataFailure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n" << app.help("", CLI::AppFormatMode::Normal);
        return UsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return DataFailure;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace gradcp::cli
