#include "smkl/datagen.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "smkl/error.hpp"

namespace smkl::datagen {

std::string_view to_string(Structure s) noexcept {
    switch (s) {
        case Structure::orthogonal_ranges: return "orthogonal_ranges";
        case Structure::random_rbf_bank: return "random_rbf_bank";
        case Structure::duplicate_counterexample: return "duplicate_counterexample";
    }
    return "unknown";
}

Structure parse_structure(std::string_view name) {
    for (auto s : {Structure::orthogonal_ranges, Structure::random_rbf_bank, Structure::duplicate_counterexample}) {
        if (name == to_string(s)) return s;
    }
    fail(ErrorKind::validation, "unknown structure '" + std::string(name) + "'");
}

void SyntheticSpec::validate() const {
    require(n_samples >= 2, ErrorKind::validation, "n_samples must be >= 2");
    require(n_kernels >= 1, ErrorKind::validation, "n_kernels must be >= 1");
    require(true_support_size >= 1 && true_support_size <= n_kernels, ErrorKind::validation,
            "true_support_size must lie in [1, n_kernels]");
    require(noise_std >= 0.0 && std::isfinite(noise_std), ErrorKind::validation, "noise_std must be >= 0");
    require(n_features >= 1, ErrorKind::validation, "n_features must be >= 1");
}

namespace {

using Rng = std::mt19937_64;

Vector gaussian(Rng& rng, Index n) {
    std::normal_distribution<double> g;
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = g(rng);
    return v;
}

Vector rms_normalized(Vector v) {
    const double rms = std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
    require(rms > 0.0, ErrorKind::validation, "generated target is identically zero");
    return v / rms;
}

Vector signed_labels(const Vector& target, double noise_std, Rng& rng) {
    const Vector noisy = target + noise_std * gaussian(rng, target.size());
    return noisy.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
}

std::vector<std::size_t> choose_sorted(Rng& rng, std::size_t m, std::size_t s) {
    std::vector<std::size_t> idx(m);
    for (std::size_t j = 0; j < m; ++j) idx[j] = j;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(s);
    std::sort(idx.begin(), idx.end());
    return idx;
}

void append_fourier(Matrix& x, Index& col, std::size_t k) {
    const Index n = x.rows();
    const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    for (Index t = 0; t < n; ++t) {
        x(t, col) = std::cos(w * static_cast<double>(t));
        x(t, col + 1) = std::sin(w * static_cast<double>(t));
    }
    col += 2;
}

KernelSpec linear_on(std::string id, Index begin, Index end) {
    KernelSpec s;
    s.id = std::move(id);
    s.family = KernelFamily::linear;
    s.columns = std::pair<Index, Index>{begin, end};
    return s;
}

Instance finish(Dataset data, std::vector<KernelSpec> kernels, std::vector<std::size_t> support, Vector target) {
    Instance out;
    out.bank = KernelBank::from_grams(build_grams(kernels, data.features));
    std::vector<const SpectralCache*> planted;
    for (auto j : support) planted.push_back(&out.bank.cache(j));
    const Vector r = numlin::span_residual(planted, data.labels);
    out.truth.planted_loss = r.squaredNorm() / (2.0 * static_cast<double>(r.size()));
    out.truth.support = std::move(support);
    out.truth.target = std::move(target);
    out.data = std::move(data);
    out.kernels = std::move(kernels);
    return out;
}

Instance orthogonal_ranges(const SyntheticSpec& spec, Rng& rng) {
    const std::size_t n = spec.n_samples;
    const std::size_t m = spec.n_kernels;
    const std::size_t s = spec.true_support_size;

    std::size_t period = 0;
    for (std::size_t p = 4 * s; p <= n; p += 4) {
        if (n % p == 0) {
            period = p;
            break;
        }
    }
    require(period != 0, ErrorKind::validation,
            "orthogonal_ranges: no period P with P % 4 == 0, P | N and P >= 4 * support (N = " +
                std::to_string(n) + ", support = " + std::to_string(s) + ")");

    const std::size_t base = n / period;
    std::vector<std::size_t> harmonics;
    for (std::size_t h = 1; h < period / 2; h += 2) harmonics.push_back(base * h);
    std::vector<std::size_t> others;
    for (std::size_t k = 1; 2 * k < n; ++k) {
        if (std::find(harmonics.begin(), harmonics.end(), k) == harmonics.end()) others.push_back(k);
    }
    std::shuffle(others.begin(), others.end(), rng);
    const std::size_t share = m > s ? others.size() / (m - s) : 0;
    require(m == s || share >= 1, ErrorKind::validation,
            "orthogonal_ranges: " + std::to_string(m) + " kernels exceed the " +
                std::to_string(others.size() + s) + " available frequency blocks for N = " + std::to_string(n));

    const auto planted = choose_sorted(rng, m, s);
    std::vector<std::vector<std::size_t>> freqs(m);
    std::size_t next_group = 0;
    std::size_t next_other = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if (std::binary_search(planted.begin(), planted.end(), j)) {
            // Contiguous, near-equal split of the harmonics among planted kernels.
            const std::size_t g = next_group++;
            const std::size_t lo = g * (harmonics.size() / s) + std::min(g, harmonics.size() % s);
            const std::size_t len = harmonics.size() / s + (g < harmonics.size() % s ? 1 : 0);
            freqs[j].assign(harmonics.begin() + lo, harmonics.begin() + lo + len);
        } else {
            freqs[j].assign(others.begin() + next_other, others.begin() + next_other + share);
            next_other += share;
        }
    }

    Index total = 0;
    for (const auto& f : freqs) total += 2 * static_cast<Index>(f.size());
    Dataset data;
    data.features.resize(static_cast<Index>(n), total);
    std::vector<KernelSpec> kernels;
    Index col = 0;
    for (std::size_t j = 0; j < m; ++j) {
        const Index begin = col;
        for (auto k : freqs[j]) append_fourier(data.features, col, k);
        kernels.push_back(linear_on("k" + std::to_string(j), begin, col));
    }

    const std::size_t half = period / 2;
    std::vector<double> levels(half);
    for (std::size_t i = 0; i < half; ++i) levels[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(half);
    std::shuffle(levels.begin(), levels.end(), rng);
    std::bernoulli_distribution coin(0.5);
    for (auto& v : levels) v *= coin(rng) ? 1.0 : -1.0;
    Vector target(static_cast<Index>(n));
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t phase = t % period;
        target(static_cast<Index>(t)) = phase < half ? levels[phase] : -levels[phase - half];
    }
    target = rms_normalized(target);
    data.labels = signed_labels(target, spec.noise_std, rng);
    return finish(std::move(data), std::move(kernels), planted, std::move(target));
}

Instance random_rbf_bank(const SyntheticSpec& spec, Rng& rng) {
    const auto n = static_cast<Index>(spec.n_samples);
    const auto p = static_cast<Index>(spec.n_features);
    Dataset data;
    data.features.resize(n, p);
    for (Index c = 0; c < p; ++c) data.features.col(c) = gaussian(rng, n);

    std::uniform_int_distribution<Index> width_dist(1, p);
    std::uniform_real_distribution<double> log_bw(std::log(0.3), std::log(3.0));
    std::vector<KernelSpec> kernels;
    for (std::size_t j = 0; j < spec.n_kernels; ++j) {
        const Index width = width_dist(rng);
        const Index begin = std::uniform_int_distribution<Index>(0, p - width)(rng);
        KernelSpec k;
        k.id = "k" + std::to_string(j);
        k.family = KernelFamily::rbf;
        k.bandwidth = std::exp(log_bw(rng)) * std::sqrt(static_cast<double>(width));
        k.columns = std::pair<Index, Index>{begin, begin + width};
        kernels.push_back(std::move(k));
    }
    const auto planted = choose_sorted(rng, spec.n_kernels, spec.true_support_size);
    Vector target = Vector::Zero(n);
    for (auto j : planted) target += normalize(gram(kernels[j], data.features)).entries * gaussian(rng, n);
    target = rms_normalized(target);
    data.labels = signed_labels(target, spec.noise_std, rng);
    return finish(std::move(data), std::move(kernels), planted, std::move(target));
}

Instance duplicate_counterexample(const SyntheticSpec& spec, Rng& rng) {
    const std::size_t n = spec.n_samples;
    const std::size_t m = spec.n_kernels;
    require(m >= 2, ErrorKind::validation, "duplicate_counterexample needs at least 2 kernels");
    require(n >= 6, ErrorKind::validation, "duplicate_counterexample needs at least 6 samples");
    std::uniform_int_distribution<std::size_t> freq(1, (n - 1) / 2);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

    for (int attempt = 0; attempt < 64; ++attempt) {
        const std::size_t k1 = freq(rng);
        std::size_t k2 = freq(rng);
        if (k2 == k1) continue;
        Dataset data;
        data.features.resize(static_cast<Index>(n), 4);
        Index col = 0;
        append_fourier(data.features, col, k1);
        append_fourier(data.features, col, k2);
        const double p1 = phase(rng);
        const double p2 = phase(rng);
        Vector target(static_cast<Index>(n));
        for (std::size_t t = 0; t < n; ++t) {
            const double w = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n);
            target(static_cast<Index>(t)) = std::cos(w * k1 + p1) + 0.6 * std::cos(w * k2 + p2);
        }
        target = rms_normalized(target);
        data.labels = signed_labels(target, spec.noise_std, rng);

        // Each kernel has eigenvalue N/2 on a 2-dimensional range, so
        // y^T K y = (N/2) |U^T y|^2 and the check needs only the projections.
        auto energy = [&](Index c) {
            const Vector u = data.features.middleCols(c, 2).transpose() * data.labels;
            return u.squaredNorm();
        };
        const double ratio = std::sqrt(energy(0) / energy(2));
        if (!(ratio > 1.2 && ratio < 3.5)) continue;

        std::vector<KernelSpec> kernels;
        kernels.push_back(linear_on("k1", 0, 2));
        for (std::size_t c = 1; c + 1 < m; ++c) kernels.push_back(linear_on("k1_copy" + std::to_string(c), 0, 2));
        kernels.push_back(linear_on("k2", 2, 4));
        return finish(std::move(data), std::move(kernels), {0}, std::move(target));
    }
    fail(ErrorKind::validation, "duplicate_counterexample: no label draw with 1.2 < b1/b2 < 3.5 in 64 attempts");
}

}  // namespace

Instance generate(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    switch (spec.structure) {
        case Structure::orthogonal_ranges: return orthogonal_ranges(spec, rng);
        case Structure::random_rbf_bank: return random_rbf_bank(spec, rng);
        case Structure::duplicate_counterexample: return duplicate_counterexample(spec, rng);
    }
    fail(ErrorKind::validation, "unknown structure");
}

Instance sign_basis(std::size_t n_samples, std::size_t n_kernels, std::size_t support_size, double noise_std,
                    std::uint64_t seed) {
    require(n_samples >= 2 && (n_samples & (n_samples - 1)) == 0, ErrorKind::validation,
            "sign_basis: N must be a power of two");
    require(n_kernels >= 1 && n_kernels < n_samples, ErrorKind::validation, "sign_basis: need 1 <= m < N");
    require(support_size >= 1 && support_size <= n_kernels, ErrorKind::validation,
            "sign_basis: support must lie in [1, m]");
    Rng rng(seed);
    const auto n = static_cast<Index>(n_samples);
    Dataset data;
    data.features.resize(n, static_cast<Index>(n_kernels));
    std::vector<KernelSpec> kernels;
    for (std::size_t j = 0; j < n_kernels; ++j) {
        // Column j + 1 of the Sylvester matrix; column 0 is constant.
        for (Index a = 0; a < n; ++a) {
            data.features(a, static_cast<Index>(j)) =
                (std::popcount(static_cast<std::uint64_t>(a) & (j + 1)) % 2) ? -1.0 : 1.0;
        }
        kernels.push_back(linear_on("h" + std::to_string(j + 1), static_cast<Index>(j), static_cast<Index>(j + 1)));
    }
    const auto planted = choose_sorted(rng, n_kernels, support_size);
    Vector target = Vector::Zero(n);
    for (auto j : planted) target += gaussian(rng, 1)(0) * data.features.col(static_cast<Index>(j));
    target = rms_normalized(target);
    data.labels = signed_labels(target, noise_std, rng);
    return finish(std::move(data), std::move(kernels), planted, std::move(target));
}

Format parse_format(std::string_view name) {
    if (name == "csv") return Format::csv;
    if (name == "sparse_labeled" || name == "sparse") return Format::sparse_labeled;
    fail(ErrorKind::validation, "unknown data format '" + std::string(name) + "'");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool to_double(const std::string& tok, double& out) {
    const char* first = tok.data();
    if (!tok.empty() && tok.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), out);
    return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

void check_label(double v, const std::string& where) {
    require(v == 1.0 || v == -1.0, ErrorKind::validation,
            where + ": label " + std::to_string(v) + " is not -1 or +1");
}

Dataset load_csv(const std::string& path, std::ifstream& in) {
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> line_of;
    std::size_t width = 0;
    std::size_t label_col = 0;
    bool have_shape = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_commas(line);
        std::vector<double> values(fields.size());
        bool numeric = true;
        for (std::size_t i = 0; i < fields.size(); ++i) numeric = numeric && to_double(fields[i], values[i]);
        if (!have_shape) {
            width = fields.size();
            label_col = width - 1;
            have_shape = true;
            if (!numeric) {
                // Header row.
                auto y = std::find(fields.begin(), fields.end(), "y");
                if (y != fields.end()) label_col = static_cast<std::size_t>(y - fields.begin());
                continue;
            }
        }
        require(fields.size() == width, ErrorKind::parse,
                path + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) + " fields, got " +
                    std::to_string(fields.size()));
        require(numeric, ErrorKind::parse, path + ":" + std::to_string(line_no) + ": non-numeric field");
        rows.push_back(std::move(values));
        line_of.push_back(line_no);
    }
    require(!rows.empty(), ErrorKind::parse, path + ": no data rows");
    Dataset d;
    d.features.resize(static_cast<Index>(rows.size()), static_cast<Index>(width - 1));
    d.labels.resize(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        check_label(rows[i][label_col], path + ":" + std::to_string(line_of[i]) + " (row " + std::to_string(i + 1) + ")");
        d.labels(static_cast<Index>(i)) = rows[i][label_col];
        Index c = 0;
        for (std::size_t f = 0; f < width; ++f) {
            if (f != label_col) d.features(static_cast<Index>(i), c++) = rows[i][f];
        }
    }
    return d;
}

Dataset load_sparse(const std::string& path, std::ifstream& in) {
    std::vector<std::vector<std::pair<Index, double>>> rows;
    std::vector<double> labels;
    Index width = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        const std::string where = path + ":" + std::to_string(line_no);
        double label = 0.0;
        require(to_double(tok, label), ErrorKind::parse, where + ": bad label '" + tok + "'");
        check_label(label, where + " (row " + std::to_string(labels.size() + 1) + ")");
        std::vector<std::pair<Index, double>> entries;
        while (ls >> tok) {
            const auto colon = tok.find(':');
            require(colon != std::string::npos, ErrorKind::parse, where + ": expected index:value, got '" + tok + "'");
            double idx = 0.0;
            double val = 0.0;
            require(to_double(tok.substr(0, colon), idx) && to_double(tok.substr(colon + 1), val), ErrorKind::parse,
                    where + ": bad entry '" + tok + "'");
            require(idx >= 1.0 && idx == std::floor(idx), ErrorKind::parse,
                    where + ": feature index must be a positive integer");
            entries.emplace_back(static_cast<Index>(idx), val);
            width = std::max(width, static_cast<Index>(idx));
        }
        labels.push_back(label);
        rows.push_back(std::move(entries));
    }
    require(!rows.empty(), ErrorKind::parse, path + ": no data rows");
    Dataset d;
    d.features = Matrix::Zero(static_cast<Index>(rows.size()), width);
    d.labels = Eigen::Map<const Vector>(labels.data(), static_cast<Index>(labels.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& [idx, val] : rows[i]) d.features(static_cast<Index>(i), idx - 1) = val;
    }
    return d;
}

}  // namespace

Dataset load_dataset(const std::string& path, Format format) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::io, "cannot open dataset '" + path + "'");
    return format == Format::csv ? load_csv(path, in) : load_sparse(path, in);
}

void write_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorKind::io, "cannot write '" + path + "'");
    char buf[32];
    for (Index c = 0; c < data.features.cols(); ++c) out << 'x' << (c + 1) << ',';
    out << "y\n";
    for (Index i = 0; i < data.size(); ++i) {
        for (Index c = 0; c < data.features.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", data.features(i, c));
            out << buf << ',';
        }
        out << (data.labels(i) < 0 ? "-1" : "1") << '\n';
    }
    require(static_cast<bool>(out), ErrorKind::io, "write to '" + path + "' failed");
}

Split holdout_split(Index n, double fraction, std::uint64_t seed) {
    require(fraction >= 0.0 && fraction < 1.0, ErrorKind::validation, "holdout fraction must lie in [0, 1)");
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    Rng rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_test = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    require(n_test < idx.size(), ErrorKind::validation, "holdout leaves no training samples");
    Split s;
    s.test.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    s.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    std::sort(s.test.begin(), s.test.end());
    std::sort(s.train.begin(), s.train.end());
    return s;
}

}  // namespace smkl::datagen
