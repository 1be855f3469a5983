#include "smkl/kernels.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "smkl/error.hpp"

namespace smkl {

std::string_view to_string(KernelFamily family) noexcept {
    switch (family) {
        case KernelFamily::linear: return "linear";
        case KernelFamily::polynomial: return "polynomial";
        case KernelFamily::rbf: return "rbf";
        case KernelFamily::precomputed: return "precomputed";
    }
    return "unknown";
}

void validate(const KernelSpec& spec) {
    require(!spec.id.empty(), ErrorKind::validation, "kernel spec without id");
    switch (spec.family) {
        case KernelFamily::polynomial:
            require(spec.degree >= 1, ErrorKind::validation,
                    "kernel '" + spec.id + "': polynomial degree must be >= 1");
            require(spec.offset >= 0.0 && std::isfinite(spec.offset), ErrorKind::validation,
                    "kernel '" + spec.id + "': polynomial offset must be finite and >= 0");
            break;
        case KernelFamily::rbf:
            require(spec.bandwidth > 0.0 && std::isfinite(spec.bandwidth), ErrorKind::validation,
                    "kernel '" + spec.id + "': rbf bandwidth must be > 0");
            break;
        case KernelFamily::precomputed:
            require(!spec.path.empty(), ErrorKind::validation,
                    "kernel '" + spec.id + "': precomputed kernel needs a path");
            break;
        case KernelFamily::linear: break;
    }
    if (spec.columns) {
        require(spec.columns->first >= 0 && spec.columns->first < spec.columns->second,
                ErrorKind::validation, "kernel '" + spec.id + "': empty column range");
    }
}

namespace {

// Feature rows restricted to the spec's column range, stored transposed so
// each sample is a contiguous column.
Matrix sample_columns(const KernelSpec& spec, const Matrix& features) {
    require(features.rows() >= 1, ErrorKind::validation, "feature matrix has no rows");
    require(features.allFinite(), ErrorKind::validation, "non-finite feature values");
    Index begin = 0;
    Index end = features.cols();
    if (spec.columns) {
        begin = spec.columns->first;
        end = spec.columns->second;
        require(end <= features.cols(), ErrorKind::validation,
                "kernel '" + spec.id + "': column range exceeds feature count");
    }
    return features.middleCols(begin, end - begin).transpose();
}

double evaluate(const KernelSpec& spec, const double* xa, const double* xb, Index p) {
    switch (spec.family) {
        case KernelFamily::linear: {
            double s = 0.0;
            for (Index i = 0; i < p; ++i) s += xa[i] * xb[i];
            return s;
        }
        case KernelFamily::polynomial: {
            double s = spec.offset;
            for (Index i = 0; i < p; ++i) s += xa[i] * xb[i];
            return std::pow(s, spec.degree);
        }
        case KernelFamily::rbf: {
            double s = 0.0;
            for (Index i = 0; i < p; ++i) {
                const double diff = xa[i] - xb[i];
                s += diff * diff;
            }
            return std::exp(-s / (2.0 * spec.bandwidth * spec.bandwidth));
        }
        case KernelFamily::precomputed: break;
    }
    return 0.0;
}

GramMatrix load_precomputed(const KernelSpec& spec, Index n) {
    GramMatrix g{spec.id, read_dense_matrix(spec.path)};
    require(g.entries.rows() == g.entries.cols(), ErrorKind::io,
            "precomputed kernel '" + spec.id + "' is not square");
    require(g.entries.rows() == n, ErrorKind::io,
            "precomputed kernel '" + spec.id + "' has " + std::to_string(g.entries.rows()) +
                " rows, dataset has " + std::to_string(n));
    validate_gram(g);
    return g;
}

}  // namespace

GramMatrix gram(const KernelSpec& spec, const Matrix& features) {
    validate(spec);
    if (spec.family == KernelFamily::precomputed) return load_precomputed(spec, features.rows());
    const Matrix xt = sample_columns(spec, features);
    const Index n = xt.cols();
    const Index p = xt.rows();
    Matrix k(n, n);
#pragma omp parallel for schedule(dynamic, 8)
    for (Index a = 0; a < n; ++a) {
        for (Index b = a; b < n; ++b) {
            const double v = evaluate(spec, xt.col(a).data(), xt.col(b).data(), p);
            k(a, b) = v;
            k(b, a) = v;
        }
    }
    return {spec.id, std::move(k)};
}

GramMatrix gram_serial(const KernelSpec& spec, const Matrix& features) {
    validate(spec);
    if (spec.family == KernelFamily::precomputed) return load_precomputed(spec, features.rows());
    const Matrix xt = sample_columns(spec, features);
    const Index n = xt.cols();
    const Index p = xt.rows();
    Matrix k(n, n);
    for (Index a = 0; a < n; ++a) {
        for (Index b = a; b < n; ++b) {
            const double v = evaluate(spec, xt.col(a).data(), xt.col(b).data(), p);
            k(a, b) = v;
            k(b, a) = v;
        }
    }
    return {spec.id, std::move(k)};
}

GramMatrix normalize(const GramMatrix& g) {
    validate_gram(g);
    const Index n = g.size();
    Vector scale(n);
    for (Index a = 0; a < n; ++a) {
        const double d = g.entries(a, a);
        if (d > 0.0) {
            scale(a) = 1.0 / std::sqrt(d);
            continue;
        }
        require(d == 0.0, ErrorKind::degenerate_kernel,
                "kernel '" + g.id + "': negative diagonal entry at row " + std::to_string(a));
        require(g.entries.row(a).cwiseAbs().maxCoeff() == 0.0, ErrorKind::degenerate_kernel,
                "kernel '" + g.id + "': zero diagonal with nonzero off-diagonal in row " +
                    std::to_string(a));
        scale(a) = 0.0;
    }
    GramMatrix out{g.id, scale.asDiagonal() * g.entries * scale.asDiagonal()};
    for (Index a = 0; a < n; ++a) {
        if (scale(a) > 0.0) out.entries(a, a) = 1.0;
    }
    // The diagonal product can round asymmetrically; keep exact symmetry.
    out.entries = (0.5 * (out.entries + out.entries.transpose())).eval();
    return out;
}

void validate_gram(const GramMatrix& g) {
    require(g.entries.rows() == g.entries.cols(), ErrorKind::validation,
            "kernel '" + g.id + "': Gram matrix is not square");
    require(g.entries.allFinite(), ErrorKind::validation,
            "kernel '" + g.id + "': Gram matrix has non-finite entries");
    const double asym = (g.entries - g.entries.transpose()).cwiseAbs().maxCoeff();
    require(g.entries.size() == 0 || asym <= 1e-12, ErrorKind::validation,
            "kernel '" + g.id + "': Gram matrix is not symmetric (max |K - K^T| = " +
                std::to_string(asym) + ")");
}

Matrix read_dense_matrix(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::io, "cannot open matrix file '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (char& c : line) {
            if (c == ',') c = ' ';
        }
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            require(ec == std::errc() && ptr == tok.data() + tok.size(), ErrorKind::parse,
                    path + ":" + std::to_string(line_no) + ": bad number '" + tok + "'");
            row.push_back(v);
        }
        if (row.empty()) continue;
        require(rows.empty() || row.size() == rows.front().size(), ErrorKind::parse,
                path + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(rows.empty() ? 0 : rows.front().size()) + " entries, got " +
                    std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    require(!rows.empty(), ErrorKind::io, "matrix file '" + path + "' is empty");
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

void write_dense_matrix(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorKind::io, "cannot write '" + path + "'");
    out << std::setprecision(17);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
        out << '\n';
    }
}

namespace {

double parse_real(const std::string& key, const std::string& value) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    require(ec == std::errc() && ptr == value.data() + value.size(), ErrorKind::parse,
            "kernel spec: bad value for " + key + ": '" + value + "'");
    return v;
}

KernelSpec parse_spec_line(const std::string& line) {
    std::istringstream ls(line);
    KernelSpec spec;
    std::string family;
    require(static_cast<bool>(ls >> spec.id >> family), ErrorKind::parse,
            "kernel spec: expected '<id> <family>' in '" + line + "'");
    if (family == "linear") spec.family = KernelFamily::linear;
    else if (family == "polynomial" || family == "poly") spec.family = KernelFamily::polynomial;
    else if (family == "rbf") spec.family = KernelFamily::rbf;
    else if (family == "precomputed") spec.family = KernelFamily::precomputed;
    else fail(ErrorKind::parse, "kernel spec: unknown family '" + family + "'");

    std::string kv;
    while (ls >> kv) {
        const auto eq = kv.find('=');
        require(eq != std::string::npos, ErrorKind::parse, "kernel spec: expected key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if (key == "degree") spec.degree = static_cast<int>(parse_real(key, value));
        else if (key == "offset") spec.offset = parse_real(key, value);
        else if (key == "bandwidth") spec.bandwidth = parse_real(key, value);
        else if (key == "path") spec.path = value;
        else if (key == "cols") {
            const auto colon = value.find(':');
            require(colon != std::string::npos, ErrorKind::parse, "kernel spec: cols must be 'begin:end'");
            spec.columns = std::pair<Index, Index>{
                static_cast<Index>(parse_real(key, value.substr(0, colon))),
                static_cast<Index>(parse_real(key, value.substr(colon + 1)))};
        } else {
            fail(ErrorKind::parse, "kernel spec: unknown key '" + key + "'");
        }
    }
    validate(spec);
    return spec;
}

}  // namespace

std::vector<KernelSpec> parse_kernel_specs(std::string_view text) {
    std::vector<KernelSpec> specs;
    std::unordered_set<std::string> ids;
    std::string item;
    auto flush = [&] {
        if (auto hash = item.find('#'); hash != std::string::npos) item.erase(hash);
        if (item.find_first_not_of(" \t\r") != std::string::npos) {
            specs.push_back(parse_spec_line(item));
            require(ids.insert(specs.back().id).second, ErrorKind::validation,
                    "duplicate kernel id '" + specs.back().id + "'");
        }
        item.clear();
    };
    for (char c : text) {
        if (c == '\n' || c == ';') flush();
        else item.push_back(c);
    }
    flush();
    return specs;
}

std::vector<KernelSpec> load_kernel_specs(const std::string& path_or_inline) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(path_or_inline, ec)) {
        std::ifstream in(path_or_inline);
        std::stringstream ss;
        ss << in.rdbuf();
        auto specs = parse_kernel_specs(ss.str());
        // Relative precomputed paths resolve against the spec file's directory.
        const auto dir = std::filesystem::path(path_or_inline).parent_path();
        for (auto& s : specs) {
            if (s.family == KernelFamily::precomputed && std::filesystem::path(s.path).is_relative()) {
                s.path = (dir / s.path).string();
            }
        }
        return specs;
    }
    return parse_kernel_specs(path_or_inline);
}

std::string format_kernel_spec(const KernelSpec& spec) {
    std::ostringstream out;
    out << std::setprecision(17) << spec.id << ' ' << to_string(spec.family);
    switch (spec.family) {
        case KernelFamily::polynomial: out << " degree=" << spec.degree << " offset=" << spec.offset; break;
        case KernelFamily::rbf: out << " bandwidth=" << spec.bandwidth; break;
        case KernelFamily::precomputed: out << " path=" << spec.path; break;
        case KernelFamily::linear: break;
    }
    if (spec.columns) out << " cols=" << spec.columns->first << ':' << spec.columns->second;
    return out.str();
}

std::vector<GramMatrix> build_grams(const std::vector<KernelSpec>& specs, const Matrix& features) {
    std::vector<GramMatrix> out;
    out.reserve(specs.size());
    for (const auto& s : specs) out.push_back(normalize(gram(s, features)));
    return out;
}

}  // namespace smkl
