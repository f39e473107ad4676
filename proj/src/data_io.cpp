#include "antforest/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "antforest/csv.hpp"
#include "antforest/rng.hpp"

namespace antforest {

void Dataset::validate() const {
    if (row_count < 2) throw std::invalid_argument("Dataset: need at least 2 rows");
    if (feature_count < 1) throw std::invalid_argument("Dataset: need at least 1 feature");
    if (features.size() != row_count * feature_count)
        throw std::invalid_argument("Dataset: feature matrix shape mismatch");
    if (targets.size() != row_count)
        throw std::invalid_argument("Dataset: target length mismatch");
    if (task == Task::kClassification) {
        if (class_count < 1) throw std::invalid_argument("Dataset: class_count must be >= 1");
        for (double t : targets) {
            const double r = std::round(t);
            if (t != r || r < 0 || r >= static_cast<double>(class_count))
                throw std::invalid_argument("Dataset: label ids must be 0..C-1");
        }
    }
}

void SiteWorld::validate() const {
    if (qualities.empty()) throw std::invalid_argument("SiteWorld: need at least 1 site");
    if (obs_noise_sd < 0) throw std::invalid_argument("SiteWorld: negative noise sd");
    std::size_t best = 0;
    for (std::size_t j = 1; j < qualities.size(); ++j)
        if (qualities[j] > qualities[best]) best = j;
    if (best != best_site) throw std::invalid_argument("SiteWorld: best_site inconsistent");
}

namespace {

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) fields.push_back(cell);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

Dataset load_dataset(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open: " + path);

    Dataset data;
    data.task = options.task;
    std::map<std::string, std::size_t> label_ids;

    std::string line;
    std::size_t line_no = 0;
    std::size_t columns = 0;
    bool skipped_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (options.has_header && !skipped_header) {
            skipped_header = true;
            continue;
        }
        const auto fields = split_line(line);
        if (fields.size() < 2)
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": need at least one feature and a target");
        if (columns == 0) {
            columns = fields.size();
            data.feature_count = columns - 1;
        } else if (fields.size() != columns) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": ragged row (expected " +
                             std::to_string(columns) + " fields, got " +
                             std::to_string(fields.size()) + ")");
        }
        for (std::size_t c = 0; c + 1 < fields.size(); ++c) {
            double v;
            if (!parse_double(fields[c], v))
                throw ParseError(path + ":" + std::to_string(line_no) +
                                 ": non-numeric feature '" + fields[c] + "'");
            data.features.push_back(v);
        }
        const std::string& target = fields.back();
        if (options.task == Task::kRegression) {
            double v;
            if (!parse_double(target, v))
                throw ParseError(path + ":" + std::to_string(line_no) +
                                 ": non-numeric target '" + target + "'");
            data.targets.push_back(v);
        } else {
            auto [it, inserted] = label_ids.try_emplace(target, label_ids.size());
            if (inserted) data.labels.push_back(target);
            data.targets.push_back(static_cast<double>(it->second));
        }
        ++data.row_count;
    }
    if (data.row_count == 0) throw ParseError(path + ": no data rows");
    data.class_count = label_ids.size();
    data.validate();
    return data;
}

void save_dataset(const Dataset& data, const std::string& path, bool header) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    if (header) {
        for (std::size_t c = 0; c < data.feature_count; ++c) out << "x" << c << ",";
        out << "target\n";
    }
    for (std::size_t r = 0; r < data.row_count; ++r) {
        for (std::size_t c = 0; c < data.feature_count; ++c)
            out << format_number(data.at(r, c)) << ',';
        if (data.task == Task::kClassification && !data.labels.empty())
            out << data.labels[static_cast<std::size_t>(data.targets[r])];
        else
            out << format_number(data.targets[r]);
        out << '\n';
    }
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
}

void SyntheticSpec::validate() const {
    switch (kind) {
        case SyntheticKind::kFriedmanRegression:
            if (n < 2 || p < 5)
                throw std::invalid_argument("friedman: need n >= 2 and p >= 5");
            if (noise < 0) throw std::invalid_argument("friedman: negative noise");
            break;
        case SyntheticKind::kLinearSeparable:
            if (n < 2 || p < 1)
                throw std::invalid_argument("linear-separable: need n >= 2 and p >= 1");
            if (noise < 0 || noise > 0.5)
                throw std::invalid_argument("linear-separable: flip prob must be in [0, 0.5]");
            break;
        case SyntheticKind::kCorrelatedGaussianUnits:
            if (n < 2 || p < 1)
                throw std::invalid_argument("correlated-units: need n >= 2 and M >= 1");
            if (rho < 0 || rho > 1)
                throw std::invalid_argument("correlated-units: rho must be in [0, 1]");
            if (sigma2 < 0) throw std::invalid_argument("correlated-units: negative sigma2");
            break;
        case SyntheticKind::kSiteWorld:
            if (site_count < 1) throw std::invalid_argument("site-world: need K >= 1");
            if (noise < 0) throw std::invalid_argument("site-world: negative noise sd");
            if (quality_gap < 0) throw std::invalid_argument("site-world: negative gap");
            break;
    }
}

Dataset generate_dataset(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng = make_rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Dataset data;
    data.row_count = spec.n;
    data.feature_count = spec.p;
    data.features.reserve(spec.n * spec.p);
    data.targets.reserve(spec.n);

    switch (spec.kind) {
        case SyntheticKind::kFriedmanRegression: {
            data.task = Task::kRegression;
            for (std::size_t i = 0; i < spec.n; ++i) {
                std::vector<double> x(spec.p);
                for (auto& v : x) v = unit(rng);
                const double y = 10.0 * std::sin(std::numbers::pi * x[0] * x[1]) +
                                 20.0 * (x[2] - 0.5) * (x[2] - 0.5) + 10.0 * x[3] +
                                 5.0 * x[4] + spec.noise * normal(rng);
                data.features.insert(data.features.end(), x.begin(), x.end());
                data.targets.push_back(y);
            }
            break;
        }
        case SyntheticKind::kLinearSeparable: {
            data.task = Task::kClassification;
            data.class_count = 2;
            std::vector<double> w(spec.p);
            double norm = 0.0;
            for (auto& v : w) {
                v = normal(rng);
                norm += v * v;
            }
            norm = std::sqrt(norm);
            for (auto& v : w) v /= norm;
            for (std::size_t i = 0; i < spec.n; ++i) {
                double dot = 0.0;
                for (std::size_t c = 0; c < spec.p; ++c) {
                    const double v = normal(rng);
                    data.features.push_back(v);
                    dot += w[c] * v;
                }
                int label = dot >= 0.0 ? 1 : 0;
                if (unit(rng) < spec.noise) label = 1 - label;
                data.targets.push_back(label);
            }
            break;
        }
        case SyntheticKind::kCorrelatedGaussianUnits: {
            // Single shared factor: x_i = sqrt(rho) z0 + sqrt(1-rho) z_i, scaled
            // to variance sigma2; pairwise correlation is exactly rho. The
            // target column keeps the shared factor.
            data.task = Task::kRegression;
            const double sd = std::sqrt(spec.sigma2);
            const double a = std::sqrt(spec.rho), b = std::sqrt(1.0 - spec.rho);
            for (std::size_t i = 0; i < spec.n; ++i) {
                const double shared = normal(rng);
                for (std::size_t c = 0; c < spec.p; ++c)
                    data.features.push_back(sd * (a * shared + b * normal(rng)));
                data.targets.push_back(shared);
            }
            break;
        }
        case SyntheticKind::kSiteWorld:
            throw std::invalid_argument("site-world spec produces a SiteWorld, not a Dataset");
    }
    data.validate();
    return data;
}

SiteWorld generate_site_world(const SyntheticSpec& spec) {
    spec.validate();
    if (spec.kind != SyntheticKind::kSiteWorld)
        throw std::invalid_argument("generate_site_world: wrong kind");
    Rng rng = make_rng(spec.seed);
    SiteWorld world;
    world.obs_noise_sd = spec.noise;
    world.qualities.resize(spec.site_count);
    for (std::size_t j = 0; j < spec.site_count; ++j)
        world.qualities[j] = spec.quality_gap * static_cast<double>(j);
    std::shuffle(world.qualities.begin(), world.qualities.end(), rng);
    world.best_site = static_cast<std::size_t>(
        std::max_element(world.qualities.begin(), world.qualities.end()) -
        world.qualities.begin());
    return world;
}

SyntheticKind parse_synthetic_kind(const std::string& name) {
    if (name == "friedman-regression") return SyntheticKind::kFriedmanRegression;
    if (name == "linear-separable") return SyntheticKind::kLinearSeparable;
    if (name == "correlated-gaussian-units") return SyntheticKind::kCorrelatedGaussianUnits;
    if (name == "site-world") return SyntheticKind::kSiteWorld;
    throw std::invalid_argument("unknown synthetic kind: " + name);
}

std::string synthetic_kind_name(SyntheticKind kind) {
    switch (kind) {
        case SyntheticKind::kFriedmanRegression: return "friedman-regression";
        case SyntheticKind::kLinearSeparable: return "linear-separable";
        case SyntheticKind::kCorrelatedGaussianUnits: return "correlated-gaussian-units";
        case SyntheticKind::kSiteWorld: return "site-world";
    }
    return "unknown";
}

}  // namespace antforest
