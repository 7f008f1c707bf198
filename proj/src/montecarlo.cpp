#include "gradcp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "gradcp/log.hpp"
#include "gradcp/parallel.hpp"
#include "gradcp/random.hpp"

namespace gradcp {

// Indicator formulas taken as written, including the open endpoints of mu2
// at 0.6 and sigma2 at 0.5.
double mu1(double u) { return u > 0.5 ? 1.0 : 0.0; }
double mu2(double u) {
    if (u > 0.5 && u < 0.6) return 10.0 * (u - 0.5);
    return u > 0.6 ? 1.0 : 0.0;
}
double mu3(double u) { return u < 0.2 ? 10.0 * u : 2.0 - 2.5 * (u - 0.2); }
double mu4(double u) { return u > 0.5 ? 2.0 * (u - 0.5) : 0.0; }
double mu5(double u) {
    if (u > 0.5 && u < 0.6) return 10.0 * (u - 0.5);
    return u >= 0.6 ? 1.0 : 0.0;
}
double sigma1(double u) { return u < 0.5 ? 1.0 : 2.0; }
double sigma2(double u) {
    if (u < 0.5) return 1.0;
    if (u > 0.5 && u < 0.6) return 1.0 + 10.0 * (u - 0.5);
    return u >= 0.6 ? 2.0 : 0.0;
}

std::array<std::array<double, 2>, 2> bivariate_factor() {
    const double c = std::sqrt(3.0) / 2.0;
    return {{{c, -0.5}, {c, 0.5}}};
}

std::vector<double> seasonal_component(std::size_t T, double amplitude) {
    std::array<double, 12> period{};
    double mean = 0.0;
    for (std::size_t k = 0; k < 12; ++k) {
        period[k] = amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(k + 1) / 12.0);
        mean += period[k] / 12.0;
    }
    for (double& v : period) v -= mean;
    std::vector<double> s(T);
    for (std::size_t t = 0; t < T; ++t) s[t] = period[t % 12];
    return s;
}

namespace {

struct DesignInfo {
    Design design;
    const char* name;
    double u0;
};

constexpr DesignInfo designs[] = {
    {Design::Mu1, "mu1", 0.5},         {Design::Mu2, "mu2", 0.5},         {Design::Mu3, "mu3", 0.0},
    {Design::Mu4, "mu4", 0.5},         {Design::Mu5, "mu5", 0.5},         {Design::Null, "null", 1.0},
    {Design::Sigma1, "sigma1", 0.5},   {Design::Sigma2, "sigma2", 0.5},   {Design::BiSigma1, "Sigma1", 0.5},
    {Design::BiSigma2, "Sigma2", 0.5}, {Design::Seasonal, "seasonal", 1.0},
};

const DesignInfo& info(Design d) {
    for (const auto& i : designs)
        if (i.design == d) return i;
    throw std::invalid_argument("unknown design");
}

constexpr std::uint64_t data_stream = 0x64617461ULL;

std::vector<double> ar1_errors(std::size_t T, double phi, double sd, std::mt19937_64& rng) {
    if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("AR coefficient must satisfy |phi| < 1");
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> eps(T);
    double previous = normal(rng) * sd / std::sqrt(1.0 - phi * phi);
    for (std::size_t t = 0; t < T; ++t) {
        previous = phi * previous + sd * normal(rng);
        eps[t] = previous;
    }
    return eps;
}

} // namespace

Design parse_design(const std::string& token) {
    for (const auto& i : designs)
        if (token == i.name) return i.design;
    throw std::invalid_argument("unknown model '" + token +
                                "' (expected mu1|mu2|mu3|mu4|mu5|sigma1|sigma2|Sigma1|Sigma2|null|seasonal)");
}

std::string design_name(Design d) { return info(d).name; }

double true_change_point(Design d) { return info(d).u0; }

DetectionConfig default_config(Design d) {
    DetectionConfig c;
    switch (d) {
        case Design::Mu1:
        case Design::Mu2:
        case Design::Mu3:
        case Design::Null:
        case Design::Seasonal:
            c.feature = "mean";
            c.scaled = true;
            break;
        case Design::Mu4:
        case Design::Mu5:
            c.feature = "mean";
            c.scaled = true;
            c.lrv.sigma = SigmaEstimator::Difference;
            break;
        case Design::Sigma1:
        case Design::Sigma2:
            c.feature = "variance";
            c.lrv.hac.bandwidth = 0.0;
            break;
        case Design::BiSigma1:
        case Design::BiSigma2:
            c.feature = "cov";
            c.lrv.hac.bandwidth = 0.0;
            break;
    }
    return c;
}

SeriesSample generate(const ModelSpec& spec) {
    if (spec.T < 2) throw std::invalid_argument("series length must be at least 2");
    const std::size_t T = spec.T;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto u = [T](std::size_t t) { return static_cast<double>(t + 1) / static_cast<double>(T); };
    SeriesOrigin origin{"model:" + design_name(spec.design), {}};

    switch (spec.design) {
        case Design::Mu1:
        case Design::Mu2:
        case Design::Mu3:
        case Design::Null:
        case Design::Seasonal: {
            auto x = ar1_errors(T, spec.phi, spec.innovation_sd, rng);
            double (*mean)(double) = spec.design == Design::Mu1   ? mu1
                                     : spec.design == Design::Mu2 ? mu2
                                     : spec.design == Design::Mu3 ? mu3
                                                                  : nullptr;
            if (mean)
                for (std::size_t t = 0; t < T; ++t) x[t] += mean(u(t));
            if (spec.design == Design::Seasonal) {
                auto s = seasonal_component(T, spec.seasonal_amplitude);
                for (std::size_t t = 0; t < T; ++t) x[t] += s[t];
            }
            return SeriesSample::univariate(std::move(x), std::move(origin));
        }
        case Design::Mu4:
        case Design::Mu5: {
            std::vector<double> x(T);
            auto mean = spec.design == Design::Mu4 ? mu4 : mu5;
            for (std::size_t t = 0; t < T; ++t) x[t] = mean(u(t)) + spec.iid_sd * normal(rng);
            return SeriesSample::univariate(std::move(x), std::move(origin));
        }
        case Design::Sigma1:
        case Design::Sigma2: {
            std::vector<double> x(T);
            auto vol = spec.design == Design::Sigma1 ? sigma1 : sigma2;
            for (std::size_t t = 0; t < T; ++t) x[t] = vol(u(t)) * normal(rng);
            return SeriesSample::univariate(std::move(x), std::move(origin));
        }
        case Design::BiSigma1:
        case Design::BiSigma2: {
            const auto A = bivariate_factor();
            auto vol = spec.design == Design::BiSigma1 ? sigma1 : sigma2;
            std::vector<double> x(2 * T);
            for (std::size_t t = 0; t < T; ++t) {
                const double e1 = normal(rng), e2 = normal(rng);
                const double s = vol(u(t));
                x[2 * t] = s * (A[0][0] * e1 + A[0][1] * e2);
                x[2 * t + 1] = s * (A[1][0] * e1 + A[1][1] * e2);
            }
            return SeriesSample(std::move(x), T, 2, std::move(origin));
        }
    }
    throw std::invalid_argument("unknown design");
}

Histogram make_histogram(const std::vector<double>& values, std::size_t bins, double lo, double hi) {
    if (bins == 0 || !(hi > lo)) throw std::invalid_argument("histogram needs bins > 0 and hi > lo");
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b)
        h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    for (double v : values) {
        if (v < lo || v > hi) continue;
        auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
        ++h.counts[std::min(b, bins - 1)];
    }
    return h;
}

double sample_quantile(std::vector<double> values, double p) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto k = static_cast<std::size_t>(std::floor(pos));
    if (k + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(k);
    return values[k] + frac * (values[k + 1] - values[k]);
}

StudySummary run_study(const ModelSpec& spec, std::size_t N, const DetectionConfig& config,
                       std::uint64_t master_seed, unsigned threads) {
    if (N < 1) throw std::invalid_argument("number of replicates must be at least 1");
    config.validate();

    DetectionConfig per_run = config;
    per_run.threads = 1;
    std::shared_ptr<const QuantileCurve> shared;
    if (config.scaled && config.gp.pivotal)
        shared = std::make_shared<QuantileCurve>(pivotal_curve(spec.T, per_run));

    struct Outcome {
        bool ok = false;
        double u_hat = 0.0;
        double u_prelim = 0.0;
    };
    std::vector<Outcome> outcomes(N);
    parallel_for(N, threads, [&](std::size_t r) {
        ModelSpec replicate = spec;
        replicate.seed = derive_seed(master_seed, data_stream, r);
        try {
            auto result = detect(generate(replicate), per_run, shared);
            outcomes[r] = {true, result.u_hat, result.u_hat_prelim};
        } catch (const std::exception& e) {
            log::warn("replicate " + std::to_string(r) + " failed: " + e.what());
        }
    });

    StudySummary s;
    s.spec = spec;
    s.replicates = N;
    s.master_seed = master_seed;
    s.config = config;
    s.true_u0 = true_change_point(spec.design);
    for (const auto& o : outcomes) {
        if (!o.ok) {
            ++s.failures;
            continue;
        }
        s.estimates.push_back(o.u_hat);
        s.prelim_estimates.push_back(o.u_prelim);
    }
    s.histogram = make_histogram(s.estimates);
    std::size_t under = 0;
    for (double v : s.estimates) under += v < s.true_u0 ? 1 : 0;
    s.underestimation_fraction =
        s.estimates.empty() ? 0.0 : static_cast<double>(under) / static_cast<double>(s.estimates.size());
    s.median = sample_quantile(s.estimates, 0.5);
    s.iqr = sample_quantile(s.estimates, 0.75) - sample_quantile(s.estimates, 0.25);
    return s;
}

void write_histogram_csv(std::ostream& out, const Histogram& h, const std::string& preamble) {
    if (!preamble.empty()) out << preamble;
    out << "bin_left,bin_right,count\n";
    char buf[128];
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu\n", h.edges[b], h.edges[b + 1], h.counts[b]);
        out << buf;
    }
}

} // namespace gradcp
