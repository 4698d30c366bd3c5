#include "gpoo/trace.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "gpoo/csv.hpp"

namespace gpoo {

namespace {

std::string cell(double v) { return std::isnan(v) ? std::string() : format_double(v); }

double read_cell(const std::string& s) {
    return s.empty() ? std::numeric_limits<double>::quiet_NaN() : parse_double(s);
}

}  // namespace

std::string trace_header(std::size_t dim) {
    std::string h = "step,";
    for (std::size_t j = 0; j < dim; ++j) h += "eval_x" + std::to_string(j) + ",";
    h += "f_value,delta,beta,utility,best_value,simple_regret,cum_regret,elapsed_ns";
    return h;
}

void write_trace_csv(std::ostream& os, const std::vector<RunRecord>& records, std::size_t dim) {
    os << trace_header(dim) << '\n';
    for (const auto& r : records) {
        if (static_cast<std::size_t>(r.x.size()) != dim) throw DimensionError("write_trace_csv: record dimension");
        os << r.step << ',';
        for (std::size_t j = 0; j < dim; ++j) os << format_double(r.x[static_cast<Eigen::Index>(j)]) << ',';
        os << format_double(r.f_value) << ',' << cell(r.delta) << ',' << cell(r.beta) << ',' << cell(r.utility)
           << ',' << format_double(r.best_value) << ',';
        if (r.simple_regret) os << format_double(*r.simple_regret);
        os << ',';
        if (r.cum_regret) os << format_double(*r.cum_regret);
        os << ',' << r.elapsed_ns << '\n';
    }
}

std::vector<RunRecord> read_trace_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("read_trace_csv: missing header");
    const auto header = split_csv_line(line);
    if (header.size() < 9 || header.front() != "step") throw std::invalid_argument("read_trace_csv: bad header");
    const std::size_t dim = header.size() - 9;
    if (line != trace_header(dim)) throw std::invalid_argument("read_trace_csv: unexpected header '" + line + "'");

    std::vector<RunRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto c = split_csv_line(line);
        if (c.size() != header.size()) throw std::invalid_argument("read_trace_csv: ragged row");
        RunRecord r;
        r.step = std::stoull(c[0]);
        r.x.resize(static_cast<Eigen::Index>(dim));
        for (std::size_t j = 0; j < dim; ++j) r.x[static_cast<Eigen::Index>(j)] = parse_double(c[1 + j]);
        std::size_t k = 1 + dim;
        r.f_value = parse_double(c[k++]);
        r.delta = read_cell(c[k++]);
        r.beta = read_cell(c[k++]);
        r.utility = read_cell(c[k++]);
        r.best_value = parse_double(c[k++]);
        if (!c[k].empty()) r.simple_regret = parse_double(c[k]);
        ++k;
        if (!c[k].empty()) r.cum_regret = parse_double(c[k]);
        ++k;
        r.elapsed_ns = std::stoll(c[k]);
        out.push_back(std::move(r));
    }
    return out;
}

void compute_regret(std::vector<RunRecord>& records, double f_star) {
    if (!std::isfinite(f_star)) throw std::invalid_argument("compute_regret: f* must be finite");
    double best = -std::numeric_limits<double>::infinity();
    double cum = 0.0;
    for (auto& r : records) {
        if (r.f_value > f_star + 1e-9) {
            throw DataIntegrityError("compute_regret: step " + std::to_string(r.step) + " value " +
                                     format_double(r.f_value) + " exceeds f* " + format_double(f_star));
        }
        best = std::max(best, r.f_value);
        cum += f_star - r.f_value;
        r.simple_regret = f_star - best;
        r.cum_regret = cum;
    }
}

double best_after(const std::vector<RunRecord>& records, std::size_t n) {
    if (records.empty() || n == 0) throw std::invalid_argument("best_after: empty prefix");
    n = std::min(n, records.size());
    double best = records.front().f_value;
    for (std::size_t i = 1; i < n; ++i) best = std::max(best, records[i].f_value);
    return best;
}

std::optional<double> best_at_time(const std::vector<RunRecord>& records, std::int64_t t) {
    std::optional<double> best;
    for (const auto& r : records) {
        if (r.elapsed_ns > t) break;
        best = best ? std::max(*best, r.f_value) : r.f_value;
    }
    return best;
}

}  // namespace gpoo
