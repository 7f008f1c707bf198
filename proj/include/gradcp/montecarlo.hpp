#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gradcp/detector.hpp"
#include "gradcp/series.hpp"

namespace gradcp {

/// Simulation designs.
///   Mu1..Mu3, Null, Seasonal: X = mu(t/T) + eps, eps AR(1) with coefficient
///     phi and N(0, innovation_sd^2) innovations (Null: mu = 0).
///   Mu4, Mu5: X = mu(t/T) + eps, eps i.i.d. N(0, iid_sd^2).
///   Sigma1, Sigma2: X = sigma(t/T) eps, eps i.i.d. N(0, 1).
///   BiSigma1, BiSigma2: X = sigma(t/T) A eps, A A^T = [[1, .5], [.5, 1]].
///   Seasonal adds a zero-sum period-12 sinusoid to the Null design.
enum class Design { Mu1, Mu2, Mu3, Mu4, Mu5, Null, Sigma1, Sigma2, BiSigma1, BiSigma2, Seasonal };

struct ModelSpec {
    Design design = Design::Mu1;
    std::size_t T = 500;
    std::uint64_t seed = 1;
    double phi = 0.25;
    double innovation_sd = 0.5;
    double iid_sd = 0.2;
    double seasonal_amplitude = 1.0;
};

double mu1(double u);
double mu2(double u);
double mu3(double u);
double mu4(double u);
double mu5(double u);
double sigma1(double u);
double sigma2(double u);

/// The factor [[sqrt(3)/2, -1/2], [sqrt(3)/2, 1/2]].
std::array<std::array<double, 2>, 2> bivariate_factor();

/// a * sin(2 pi t / 12), centred over one period, for t = 1..T.
std::vector<double> seasonal_component(std::size_t T, double amplitude);

Design parse_design(const std::string& token);
std::string design_name(Design d);

/// True change point of the design (1 for designs without a change).
double true_change_point(Design d);

/// Detector settings the simulation designs are run with.
DetectionConfig default_config(Design d);

SeriesSample generate(const ModelSpec& spec);

struct Histogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
};

/// Equal-width bins over [lo, hi]; the right edge belongs to the last bin.
Histogram make_histogram(const std::vector<double>& values, std::size_t bins = 40, double lo = 0.0, double hi = 1.0);

/// Linear-interpolation quantile of a sample (p in [0, 1]).
double sample_quantile(std::vector<double> values, double p);

struct StudySummary {
    ModelSpec spec;
    std::size_t replicates = 0;
    std::uint64_t master_seed = 0;
    DetectionConfig config;
    double true_u0 = 0.0;
    std::vector<double> estimates;
    std::vector<double> prelim_estimates;
    std::size_t failures = 0;
    Histogram histogram;
    double underestimation_fraction = 0.0;
    double median = 0.0;
    double iqr = 0.0;
};

/// N generate + detect runs with per-replicate data seeds derived from
/// master_seed. The Gaussian simulation seed is config.gp.seed for every
/// replicate, so the pivotal curve is computed once. Replicates run on
/// `threads` workers; the summary does not depend on the thread count.
StudySummary run_study(const ModelSpec& spec, std::size_t N, const DetectionConfig& config,
                       std::uint64_t master_seed, unsigned threads = 1);

void write_histogram_csv(std::ostream& out, const Histogram& h, const std::string& preamble = {});

} // namespace gradcp
