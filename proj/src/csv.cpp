#include "lsv/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "lsv/errors.hpp"

namespace lsv {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

void write_rows(const std::string& path, const std::string& header,
                const std::vector<std::vector<double>>& rows) {
    auto out = open_out(path);
    out << header << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << format_double(row[i]);
        }
        out << "\n";
    }
}

} // namespace

std::vector<std::vector<double>> read_numeric_csv(const std::string& path,
                                                  const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_header)
        throw ValidationError(path + ": expected header '" + expected_header + "', got '" + line +
                              "'");
    const std::size_t n_cols = static_cast<std::size_t>(
        std::count(expected_header.begin(), expected_header.end(), ',') + 1);
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            const std::string cell = line.substr(pos, comma - pos);
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') {
                std::ostringstream os;
                os << path << ":" << line_no << ": cannot parse '" << cell << "'";
                throw ValidationError(os.str());
            }
            row.push_back(v);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (row.size() != n_cols) {
            std::ostringstream os;
            os << path << ":" << line_no << ": expected " << n_cols << " columns, got "
               << row.size();
            throw ValidationError(os.str());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ImpliedVolSurface load_surface_csv(const std::string& path, double spot, DiscountCurve curve) {
    auto rows = read_numeric_csv(path, "T,K,iv");
    if (rows.empty()) throw ValidationError(path + ": no quotes");
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
    });
    std::vector<VolSlice> slices;
    for (const auto& row : rows) {
        if (slices.empty() || row[0] != slices.back().maturity) {
            VolSlice s;
            s.maturity = row[0];
            slices.push_back(std::move(s));
        }
    }
    std::size_t si = 0;
    std::vector<std::vector<double>> ks(slices.size()), vs(slices.size());
    for (const auto& row : rows) {
        while (slices[si].maturity != row[0]) ++si;
        ks[si].push_back(row[1]);
        vs[si].push_back(row[2]);
    }
    for (std::size_t i = 0; i < slices.size(); ++i) {
        slices[i].strikes = Eigen::Map<const Eigen::ArrayXd>(ks[i].data(),
                                                             static_cast<Eigen::Index>(ks[i].size()));
        slices[i].vols = Eigen::Map<const Eigen::ArrayXd>(vs[i].data(),
                                                          static_cast<Eigen::Index>(vs[i].size()));
    }
    return ImpliedVolSurface(spot, std::move(curve), std::move(slices));
}

void write_surface_csv(const std::string& path, const ImpliedVolSurface& surface) {
    std::vector<std::vector<double>> rows;
    for (const auto& s : surface.slices())
        for (Eigen::Index j = 0; j < s.strikes.size(); ++j)
            rows.push_back({s.maturity, s.strikes[j], s.vols[j]});
    write_rows(path, "T,K,iv", rows);
}

DiscountCurve load_curve_csv(const std::string& path) {
    const auto rows = read_numeric_csv(path, "t,zcb");
    Eigen::ArrayXd t(rows.size()), z(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t[static_cast<Eigen::Index>(i)] = rows[i][0];
        z[static_cast<Eigen::Index>(i)] = rows[i][1];
    }
    return DiscountCurve(t, z);
}

void write_curve_csv(const std::string& path, const DiscountCurve& curve) {
    std::vector<std::vector<double>> rows;
    const auto& tenors = curve.tenors();
    for (Eigen::Index i = 1; i < tenors.size(); ++i)  // skip the implicit t=0 node
        rows.push_back({tenors[i], curve.zcb(tenors[i])});
    write_rows(path, "t,zcb", rows);
}

ForwardVarianceCurve load_xi_csv(const std::string& path) {
    const auto rows = read_numeric_csv(path, "t,xi0");
    ForwardVarianceCurve c;
    c.times.resize(static_cast<Eigen::Index>(rows.size()));
    c.values.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        c.times[static_cast<Eigen::Index>(i)] = rows[i][0];
        c.values[static_cast<Eigen::Index>(i)] = rows[i][1];
    }
    c.validate();
    return c;
}

LeverageSurface load_leverage_csv(const std::string& path) {
    const auto rows = read_numeric_csv(path, "t,K,lambda");
    if (rows.empty()) throw ValidationError(path + ": empty leverage surface");
    std::map<double, std::map<double, double>> by_t;
    for (const auto& row : rows) by_t[row[0]][row[1]] = row[2];
    const auto& first = by_t.begin()->second;
    Eigen::ArrayXd strikes(static_cast<Eigen::Index>(first.size()));
    {
        Eigen::Index j = 0;
        for (const auto& [k, v] : first) strikes[j++] = k;
    }
    Eigen::ArrayXd times(static_cast<Eigen::Index>(by_t.size()));
    {
        Eigen::Index i = 0;
        for (const auto& [t, m] : by_t) times[i++] = t;
    }
    LeverageSurface lev(times, strikes);
    Eigen::Index i = 0;
    for (const auto& [t, m] : by_t) {
        if (static_cast<Eigen::Index>(m.size()) != strikes.size())
            throw ValidationError(path + ": ragged leverage grid");
        Eigen::ArrayXd lam(strikes.size());
        Eigen::Index j = 0;
        for (const auto& [k, v] : m) {
            if (k != strikes[j]) throw ValidationError(path + ": inconsistent strike grid");
            lam[j++] = v;
        }
        lev.set_slice(static_cast<int>(i++), lam);
    }
    return lev;
}

void write_leverage_csv(const std::string& path, const LeverageSurface& leverage) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < leverage.n_slices(); ++i) {
        const auto& lam = leverage.slice_values(i);
        for (Eigen::Index j = 0; j < leverage.strikes().size(); ++j)
            rows.push_back({leverage.knot_times()[i], leverage.strikes()[j], lam[j]});
    }
    write_rows(path, "t,K,lambda", rows);
}

void write_reprice_csv(const std::string& path, const RepriceReport& report) {
    std::vector<std::vector<double>> rows;
    for (const auto& r : report.rows)
        rows.push_back({r.maturity, r.strike, r.target_iv, r.model_iv, r.err_bps, r.se_bps});
    write_rows(path, "T,K,target_iv,model_iv,err_bps,se_bps", rows);
}

void write_smile_csvs(const std::string& dir, const std::string& prefix,
                      const RepriceReport& report) {
    std::vector<double> mats;
    for (const auto& r : report.rows)
        if (mats.empty() || r.maturity != mats.back()) mats.push_back(r.maturity);
    for (std::size_t q = 0; q < mats.size(); ++q) {
        std::vector<std::vector<double>> rows;
        for (const auto& r : report.rows)
            if (r.maturity == mats[q]) rows.push_back({r.strike, r.target_iv, r.model_iv, r.se_bps});
        std::ostringstream os;
        os << dir << "/" << prefix << "smile_" << q << ".csv";
        write_rows(os.str(), "K,target_iv,model_iv,se_bps", rows);
    }
}

void write_variance_study_csv(const std::string& path, const VarianceStudy& study) {
    auto out = open_out(path);
    out << "K,method,variance\n";
    for (const auto& r : study.rows) {
        out << format_double(r.strike) << ",exact," << format_double(r.var_exact) << "\n";
        if (study.has_lognormal)
            out << format_double(r.strike) << ",lognormal," << format_double(r.var_lognormal)
                << "\n";
        out << format_double(r.strike) << ",kernel," << format_double(r.var_kernel) << "\n";
    }
}

void write_ess_csv(const std::string& path, const std::vector<EssRow>& rows) {
    auto out = open_out(path);
    out << "t,K,ess,method\n";
    for (const auto& r : rows)
        out << format_double(r.t) << "," << format_double(r.strike) << "," << format_double(r.ess)
            << "," << method_name(r.method) << "\n";
}

} // namespace lsv
