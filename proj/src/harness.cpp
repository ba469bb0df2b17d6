#include "sfspline/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sfspline/csv.hpp"
#include "sfspline/errors.hpp"
#include "sfspline/rng.hpp"
#include "sfspline/solver.hpp"
#include "sfspline/transform.hpp"

namespace sfs {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kSigma1 = 0.3;
constexpr double kSigma2 = 0.4;

// Fixed seed of the Monte Carlo reference that defines var(eta0) per
// setting; independent of any user-supplied simulation seed.
constexpr std::uint64_t kVarianceMcSeed = 912831;
constexpr Index kVarianceMcPoints = 100000;

// Stream tags for the counter-based seed splitter.
constexpr std::uint64_t kDataStream = 11;
constexpr std::uint64_t kTestStream = 12;
constexpr std::uint64_t kSelectStream = 13;

double g1(double t) { return t; }

double g2(double t) {
    const double u = 2.0 * t - 1.0;
    return u * u;
}

double g3(double t) {
    const double s = std::sin(kTwoPi * t);
    return s / (2.0 - s);
}

double g4(double t) {
    const double s = std::sin(kTwoPi * t);
    const double c = std::cos(kTwoPi * t);
    return 0.1 * s + 0.2 * c + 0.3 * s * s + 0.4 * c * c * c + 0.5 * s * s * s;
}

double gauss_bump(double amp, double c1, double c2, double t1, double t2) {
    const double z1 = (t1 - c1) / kSigma1;
    const double z2 = (t2 - c2) / kSigma2;
    return amp / (M_PI * kSigma1 * kSigma2) * std::exp(-z1 * z1 - z2 * z2);
}

double h1(double t1, double t2) { return gauss_bump(0.75, 0.2, 0.3, t1, t2); }

double h2(double t1, double t2) { return gauss_bump(0.45, 0.7, 0.8, t1, t2); }

double h12(double t1, double t2) { return h1(t1, t2) + h2(t1, t2); }

void check_domain(const Vector& t) {
    for (Index i = 0; i < t.size(); ++i)
        if (!(t(i) >= 0.0 && t(i) <= 1.0))
            throw invalid_input("coordinate " + std::to_string(i) + " = " +
                                std::to_string(t(i)) + " is outside [0,1]");
}

// var(eta0) per setting from the fixed-seed reference sample, all four
// computed once on first use.
const std::array<double, 4>& eta_variances() {
    static const std::array<double, 4> vars = [] {
        std::array<double, 4> out{};
        for (int setting = 1; setting <= 4; ++setting) {
            const Index d = setting_dim(setting);
            Rng rng(derive_seed(kVarianceMcSeed, static_cast<std::uint64_t>(setting)));
            std::vector<double> vals(static_cast<std::size_t>(kVarianceMcPoints));
            Vector x(d);
            for (auto& v : vals) {
                for (Index j = 0; j < d; ++j) x(j) = rng.uniform();
                v = eval_setting(setting, x);
            }
            double mean = 0.0;
            for (const double v : vals) mean += v;
            mean /= static_cast<double>(vals.size());
            double ss = 0.0;
            for (const double v : vals) ss += (v - mean) * (v - mean);
            out[static_cast<std::size_t>(setting - 1)] =
                ss / static_cast<double>(vals.size());
        }
        return out;
    }();
    return vars;
}

void check_setting(int setting) {
    if (setting < 1 || setting > 4)
        throw invalid_input("setting must be 1..4, got " + std::to_string(setting));
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_field_double(const std::string& field, int line_no) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0')
        throw io_error("line " + std::to_string(line_no) +
                       ": cannot parse number '" + field + "'");
    return v;
}

long long parse_field_int(const std::string& field, int line_no) {
    const double v = parse_field_double(field, line_no);
    const long long i = static_cast<long long>(v);
    if (static_cast<double>(i) != v)
        throw io_error("line " + std::to_string(line_no) + ": '" + field +
                       "' is not an integer");
    return i;
}

const std::array<const char*, 10> kResultColumns = {
    "setting", "method",    "n",      "q_rule",  "q_eff",
    "snr",     "rep_count", "mse_mean", "mse_se", "fit_seconds_mean"};

}  // namespace

double eval_building_block(const std::string& name, const Vector& t) {
    check_domain(t);
    const auto need = [&](Index d) {
        if (t.size() != d)
            throw invalid_input("building block " + name + " takes " +
                                std::to_string(d) + " coordinate(s), got " +
                                std::to_string(t.size()));
    };
    if (name == "g1" || name == "g2" || name == "g3" || name == "g4") {
        need(1);
        if (name == "g1") return g1(t(0));
        if (name == "g2") return g2(t(0));
        if (name == "g3") return g3(t(0));
        return g4(t(0));
    }
    if (name == "h1" || name == "h2") {
        need(2);
        return name == "h1" ? h1(t(0), t(1)) : h2(t(0), t(1));
    }
    throw invalid_input("unknown building block '" + name +
                        "' (expected g1..g4, h1, h2)");
}

Index setting_dim(int setting) {
    check_setting(setting);
    constexpr std::array<Index, 4> dims = {2, 2, 4, 6};
    return dims[static_cast<std::size_t>(setting - 1)];
}

double eval_setting(int setting, const Vector& x) {
    const Index d = setting_dim(setting);
    if (x.size() != d)
        throw invalid_input("setting " + std::to_string(setting) + " needs " +
                            std::to_string(d) + " coordinates, got " +
                            std::to_string(x.size()));
    check_domain(x);
    switch (setting) {
        case 1:
            return g1(x(0) * x(1)) + g2(x(1)) + g3(x(0)) + g4(x(1)) +
                   g3(0.5 * (x(0) + x(1)));
        case 2:
            return h12(x(0), x(1));
        case 3:
            return g1(x(0)) + g2(x(1)) + g3(x(2)) + 2.0 * g1(0.5 * (x(0) + x(3))) +
                   2.0 * g2(0.5 * (x(1) + x(2))) + 2.0 * g3(0.5 * (x(0) + x(2)));
        default:
            return h12(x(0), x(1)) + h12(x(0), x(4));
    }
}

double noise_variance(int setting, double snr) {
    check_setting(setting);
    if (!(snr > 0.0)) throw invalid_input("SNR must be positive");
    return eta_variances()[static_cast<std::size_t>(setting - 1)] / snr;
}

SimData make_dataset(int setting, Index n, double snr, std::uint64_t seed) {
    const Index d = setting_dim(setting);
    if (n < 1) throw invalid_input("sample size must be at least 1");

    SimData out;
    out.sigma2 = noise_variance(setting, snr);
    out.table.x.resize(n, d);
    out.table.y.resize(n);
    out.truth.resize(n);

    Rng rng(seed);
    Vector row(d);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) row(j) = rng.uniform();
        out.table.x.row(i) = row;
        out.truth(i) = eval_setting(setting, row);
    }
    const double sigma = std::sqrt(out.sigma2);
    for (Index i = 0; i < n; ++i)
        out.table.y(i) = out.truth(i) + sigma * rng.normal();
    return out;
}

double mse(const Vector& pred, const Vector& truth) {
    if (pred.size() != truth.size())
        throw invalid_input("mse: length mismatch (" + std::to_string(pred.size()) +
                            " vs " + std::to_string(truth.size()) + ")");
    if (pred.size() == 0) throw invalid_input("mse: empty vectors");
    return (pred - truth).squaredNorm() / static_cast<double>(pred.size());
}

namespace {

// Rethrow the in-flight library error with a replicate tag prepended,
// preserving its dynamic type so callers can still branch on it.
[[noreturn]] void rethrow_tagged(const std::string& tag) {
    try {
        throw;
    } catch (const conditioning_error& e) {
        throw conditioning_error(tag + e.what(), e.smallest_pivot);
    } catch (const invalid_input& e) {
        throw invalid_input(tag + e.what());
    } catch (const capability_error& e) {
        throw capability_error(tag + e.what());
    } catch (const budget_error& e) {
        throw budget_error(tag + e.what());
    } catch (const io_error& e) {
        throw io_error(tag + e.what());
    } catch (const error& e) {
        throw error(tag + e.what());
    }
}

}  // namespace

std::vector<ResultRow> run_simulation(const SimulationConfig& cfg) {
    check_setting(cfg.setting);
    if (cfg.sizes.empty()) throw invalid_input("no sample sizes given");
    if (cfg.q_rules.empty()) throw invalid_input("no q-rules given");
    if (cfg.methods.empty()) throw invalid_input("no selection methods given");
    if (cfg.replicates < 1) throw invalid_input("replicates must be >= 1");
    if (cfg.test_size < 1) throw invalid_input("test size must be >= 1");
    if (!(cfg.snr > 0.0)) throw invalid_input("SNR must be positive");

    const Index d = setting_dim(cfg.setting);
    const KernelSpec spec = make_kernel_spec(KernelFamily::ssanova_2way, d);

    std::vector<QRule> rules;
    rules.reserve(cfg.q_rules.size());
    for (const std::string& text : cfg.q_rules) rules.push_back(parse_q_rule(text));

    std::vector<ResultRow> rows;
    for (const Index n : cfg.sizes) {
        // Per-(q_rule, method) replicate records, in configuration order.
        const std::size_t cells = rules.size() * cfg.methods.size();
        std::vector<std::vector<double>> cell_mse(cells), cell_sec(cells);
        std::vector<double> cell_qeff(cells, 0.0);

        for (Index rep = 0; rep < cfg.replicates; ++rep) {
            try {
                const std::uint64_t counter =
                    (static_cast<std::uint64_t>(n) << 32) |
                    static_cast<std::uint64_t>(rep);
                const SimData sim = make_dataset(
                    cfg.setting, n, cfg.snr,
                    derive_seed(cfg.seed, kDataStream, counter));
                const Dataset data = to_unit_cube(sim.table);
                const EcdfMap ecdf(sim.table.x);

                Rng test_rng(derive_seed(cfg.seed, kTestStream, counter));
                Matrix test_raw(cfg.test_size, d);
                Vector test_truth(cfg.test_size);
                Vector point(d);
                for (Index i = 0; i < cfg.test_size; ++i) {
                    for (Index j = 0; j < d; ++j) point(j) = test_rng.uniform();
                    test_raw.row(i) = point;
                    test_truth(i) = eval_setting(cfg.setting, point);
                }
                const Matrix test_mapped = ecdf.map_points(test_raw);

                const std::uint64_t sel_seed =
                    derive_seed(cfg.seed, kSelectStream, counter);
                std::size_t cell = 0;
                for (const QRule& rule : rules) {
                    const Index q = essential_q(rule, n);
                    for (const SelectionMethod method : cfg.methods) {
                        const BasisSelection sel =
                            select_basis(data, method, q, sel_seed);
                        const GcvResult gcv = gcv_select(data, sel, spec);
                        // Re-fit fresh at the chosen lambda: this is the timed
                        // "fit step"; the GCV sweep is excluded by design.
                        const FittedSpline fit =
                            fit_restricted(data, sel, spec, gcv.lambda);
                        const double err =
                            mse(predict(fit, test_mapped), test_truth);
                        cell_mse[cell].push_back(err);
                        cell_sec[cell].push_back(fit.diag.fit_seconds);
                        cell_qeff[cell] += static_cast<double>(sel.q_eff());
                        ++cell;
                    }
                }
            } catch (const error&) {
                rethrow_tagged("replicate " + std::to_string(rep) +
                               " (n=" + std::to_string(n) + "): ");
            }
        }

        std::size_t cell = 0;
        for (std::size_t ri = 0; ri < rules.size(); ++ri) {
            for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi, ++cell) {
                const std::vector<double>& errs = cell_mse[cell];
                const double reps = static_cast<double>(errs.size());
                double mean = 0.0;
                for (const double e : errs) mean += e;
                mean /= reps;
                double se = 0.0;
                if (errs.size() > 1) {
                    double ss = 0.0;
                    for (const double e : errs) ss += (e - mean) * (e - mean);
                    se = std::sqrt(ss / (reps - 1.0)) / std::sqrt(reps);
                }
                double sec = 0.0;
                for (const double s : cell_sec[cell]) sec += s;
                sec /= reps;

                ResultRow row;
                row.setting = cfg.setting;
                row.method = to_string(cfg.methods[mi]);
                row.n = n;
                row.q_rule = cfg.q_rules[ri];
                row.q_eff = cell_qeff[cell] / reps;
                row.snr = cfg.snr;
                row.rep_count = cfg.replicates;
                row.mse_mean = mean;
                row.mse_se = se;
                row.fit_seconds_mean = sec;
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

void write_results_csv(const std::string& path,
                       const std::vector<ResultRow>& rows) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < kResultColumns.size(); ++i)
        out << (i ? "," : "") << kResultColumns[i];
    out << '\n';
    for (const ResultRow& r : rows) {
        if (r.method.find(',') != std::string::npos ||
            r.q_rule.find(',') != std::string::npos)
            throw io_error("result fields must not contain commas");
        out << r.setting << ',' << r.method << ',' << r.n << ',' << r.q_rule
            << ',' << format_double(r.q_eff) << ',' << format_double(r.snr)
            << ',' << r.rep_count << ',' << format_double(r.mse_mean) << ','
            << format_double(r.mse_se) << ','
            << format_double(r.fit_seconds_mean) << '\n';
    }
    if (!out) throw io_error("failed while writing '" + path + "'");
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open results file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw io_error("'" + path + "' is empty");
    {
        const std::vector<std::string> header = split_fields(line);
        if (header.size() != kResultColumns.size())
            throw io_error("line 1: expected " +
                           std::to_string(kResultColumns.size()) + " columns");
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] != kResultColumns[i])
                throw io_error("line 1: column " + std::to_string(i + 1) +
                               " is '" + header[i] + "', expected '" +
                               kResultColumns[i] + "'");
    }

    std::vector<ResultRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> f = split_fields(line);
        if (f.size() != kResultColumns.size())
            throw io_error("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(kResultColumns.size()) + " fields, got " +
                           std::to_string(f.size()));
        ResultRow r;
        r.setting = static_cast<int>(parse_field_int(f[0], line_no));
        r.method = f[1];
        r.n = static_cast<Index>(parse_field_int(f[2], line_no));
        r.q_rule = f[3];
        r.q_eff = parse_field_double(f[4], line_no);
        r.snr = parse_field_double(f[5], line_no);
        r.rep_count = static_cast<Index>(parse_field_int(f[6], line_no));
        r.mse_mean = parse_field_double(f[7], line_no);
        r.mse_se = parse_field_double(f[8], line_no);
        r.fit_seconds_mean = parse_field_double(f[9], line_no);
        rows.push_back(std::move(r));
    }
    return rows;
}

Index ingest_csv_and_grid_predict(const GridPredictConfig& cfg) {
    if (!(cfg.step > 0.0)) throw invalid_input("grid step must be positive");
    const CsvTable table = read_csv(cfg.input_path);
    const RawTable raw = table_to_raw(table);
    const Index n = raw.rows();
    const Index d = raw.dims();

    const Dataset data = to_unit_cube(raw);
    const EcdfMap ecdf(raw.x);
    const KernelSpec spec = kernel_spec_from_string(cfg.kernel, d);
    // On small inputs the rule can ask for more basis rows than exist; the
    // full basis is the exact smoothing spline, so cap rather than reject.
    const Index q = std::min(essential_q(parse_q_rule(cfg.q_rule), n), n);
    const BasisSelection sel =
        select_basis(data, selection_method_from_string(cfg.method), q, cfg.seed);
    const GcvResult gcv = gcv_select(data, sel, spec);

    // Regular grid over the observed bounding box, endpoints included.
    std::vector<double> lo(static_cast<std::size_t>(d));
    std::vector<Index> counts(static_cast<std::size_t>(d));
    Index total = 1;
    for (Index j = 0; j < d; ++j) {
        lo[static_cast<std::size_t>(j)] = raw.x.col(j).minCoeff();
        const double span = raw.x.col(j).maxCoeff() - lo[static_cast<std::size_t>(j)];
        const Index cnt =
            static_cast<Index>(std::floor(span / cfg.step + 1e-9)) + 1;
        counts[static_cast<std::size_t>(j)] = cnt;
        if (total > 2000000 / cnt)
            throw budget_error(
                "grid would exceed 2,000,000 rows; increase --step");
        total *= cnt;
    }

    Matrix grid(total, d);
    std::vector<Index> digit(static_cast<std::size_t>(d), 0);
    for (Index r = 0; r < total; ++r) {
        for (Index j = 0; j < d; ++j)
            grid(r, j) = lo[static_cast<std::size_t>(j)] +
                         cfg.step * static_cast<double>(digit[static_cast<std::size_t>(j)]);
        // Odometer with the last coordinate fastest.
        for (Index j = d - 1; j >= 0; --j) {
            auto& dj = digit[static_cast<std::size_t>(j)];
            if (++dj < counts[static_cast<std::size_t>(j)]) break;
            dj = 0;
        }
    }

    const Matrix mapped = ecdf.map_points(grid);
    Vector yhat(total);
    constexpr Index kChunk = 32768;
    for (Index start = 0; start < total; start += kChunk) {
        const Index len = std::min(kChunk, total - start);
        yhat.segment(start, len) = predict(gcv.fit, mapped.middleRows(start, len));
    }

    std::vector<std::string> header;
    for (Index j = 1; j <= d; ++j) header.push_back("x" + std::to_string(j));
    header.push_back("yhat");
    Matrix out(total, d + 1);
    out.leftCols(d) = grid;
    out.col(d) = yhat;
    write_csv(cfg.output_path, header, out);
    return total;
}

}  // namespace sfs
