#include "nsasym/moments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <tuple>

#include "nsasym/field.hpp"
#include "nsasym/util.hpp"

namespace nsasym {

using nlohmann::json;

double MomentTable::initial_moment(const MultiIndex& alpha) const {
    auto it = initial.find(alpha);
    if (it == initial.end()) throw std::out_of_range("MomentTable: missing initial moment " + alpha.str());
    return it->second;
}

const SpacetimeCoeff& MomentTable::raw_coeff(int l, const MultiIndex& beta) const {
    auto it = raw.find({l, beta});
    if (it == raw.end())
        throw std::out_of_range("MomentTable: missing raw coefficient l=" + std::to_string(l) +
                                " beta=" + beta.str());
    return it->second;
}

const SpacetimeCoeff& MomentTable::renorm_coeff(int l, const MultiIndex& beta) const {
    auto it = renorm.find({l, beta});
    if (it == renorm.end())
        throw std::out_of_range("MomentTable: missing renormalized coefficient l=" + std::to_string(l) +
                                " beta=" + beta.str());
    return it->second;
}

Vec2 MomentTable::profile_c(int p, const MultiIndex& beta) const {
    auto it = profile_moment.find({p, beta});
    if (it == profile_moment.end())
        throw std::out_of_range("MomentTable: missing profile moment p=" + std::to_string(p) +
                                " beta=" + beta.str());
    return it->second;
}

bool MomentTable::has_profile_c(int p) const {
    for (const auto& [key, v] : profile_moment)
        if (key.first == p) return true;
    return false;
}

MomentSeries extract_moment_series(const Trajectory& traj, int max_order) {
    MomentSeries s;
    s.times = traj.times();
    s.run_id = traj.config_hash();
    const int n = traj.grid().dim;
    std::vector<MultiIndex> betas;
    for (int m = 0; m <= max_order; ++m)
        for (const auto& b : multi_indices_of_order(n, m)) betas.push_back(b);
    for (const auto& b : betas) s.q[b] = {};
    for (int i = 0; i < traj.size(); ++i) {
        Field inl = traj.load_inl(i);
        for (const auto& b : betas) {
            auto mv = moment_neg(inl, b);
            s.q[b].push_back({mv[0], mv[1]});
        }
    }
    return s;
}

namespace {

// Moments of the subtracted profile approximants in closed form: by exact
// scaling, int (-y)^beta I_p(tau, y) dy = c_{p,beta} tau^{(|beta|-p)/2}.
Vec2 subtrahend_moment(const std::vector<Subtrahend>& subs, const MomentTable& table,
                       const MultiIndex& beta, double s) {
    Vec2 out{0, 0};
    for (const auto& sub : subs) {
        const Vec2 c = table.profile_c(sub.p, beta);
        const double tau = sub.shifted ? 1.0 + s : s;
        const double w = std::pow(tau, 0.5 * (beta.order() - sub.p));
        out[0] += c[0] * w;
        out[1] += c[1] * w;
    }
    return out;
}

struct Exponents {
    double head;
    double tail;
};

// Head and tail powers of the renormalized integrand, read off the scaling
// counts rather than fitted.
Exponents integrand_exponents(int n, int l, const MultiIndex& beta, const std::vector<Subtrahend>& subs) {
    double head = l;
    for (const auto& sub : subs)
        if (!sub.shifted) head = std::min(head, l + 0.5 * (beta.order() - sub.p));

    double tail = l + 0.5 * beta.order() - n - 1.5;  // residual beyond all approximants
    for (int p = n + 3; p <= 2 * n + 2; ++p) {
        bool covered = false, shifted = false;
        for (const auto& sub : subs)
            if (sub.p == p) {
                covered = true;
                shifted = sub.shifted;
            }
        if (!covered)
            tail = std::max(tail, l + 0.5 * (beta.order() - p));
        else if (shifted)
            tail = std::max(tail, l + 0.5 * (beta.order() - p) - 1.0);
    }
    return {head, tail};
}

}  // namespace

std::vector<Vec2> renormalized_integrand(const MomentSeries& series, int l, const MultiIndex& beta,
                                         const std::vector<Subtrahend>& subs, const MomentTable& table) {
    auto it = series.q.find(beta);
    if (it == series.q.end()) throw std::invalid_argument("moment series lacks beta=" + beta.str());
    const auto& qv = it->second;
    std::vector<Vec2> out(series.times.size());
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double s = series.times[i];
        const double sl = ((l % 2) ? -1.0 : 1.0) * std::pow(s, l);
        const Vec2 sub = subtrahend_moment(subs, table, beta, s);
        out[i] = {sl * (qv[i][0] - sub[0]), sl * (qv[i][1] - sub[1])};
    }
    return out;
}

SpacetimeCoeff spacetime_moment(const MomentSeries& series, int l, const MultiIndex& beta,
                                const std::vector<Subtrahend>& subs, const MomentTable& table) {
    if (series.times.size() < 6) throw std::invalid_argument("spacetime_moment: too few snapshots");
    const int n = beta.dim;
    const Exponents ex = integrand_exponents(n, l, beta, subs);
    if (ex.tail >= -1.0)
        throw std::invalid_argument("spacetime_moment: non-integrable combination, tail exponent s^" +
                                    format_double(ex.tail));
    if (ex.head <= -1.0)
        throw std::invalid_argument("spacetime_moment: non-integrable head, exponent s^" +
                                    format_double(ex.head));

    const std::vector<Vec2> m = renormalized_integrand(series, l, beta, subs, table);
    const auto& ts = series.times;
    const std::size_t K = ts.size();

    SpacetimeCoeff out;
    out.tail_model = "c*s^" + format_double(ex.tail);

    for (int c = 0; c < 2; ++c) {
        // trapezoid in log s
        double T = 0;
        for (std::size_t i = 0; i + 1 < K; ++i) {
            const double dl = std::log(ts[i + 1]) - std::log(ts[i]);
            T += 0.5 * (m[i][c] * ts[i] + m[i + 1][c] * ts[i + 1]) * dl;
        }
        // coarse trapezoid (every other node) for an error estimate
        double Tc = 0;
        std::size_t prev = 0;
        for (std::size_t i = 2; i < K; i += 2) {
            const double dl = std::log(ts[i]) - std::log(ts[prev]);
            Tc += 0.5 * (m[prev][c] * ts[prev] + m[i][c] * ts[i]) * dl;
            prev = i;
        }
        if (prev + 1 < K) {
            const double dl = std::log(ts[K - 1]) - std::log(ts[prev]);
            Tc += 0.5 * (m[prev][c] * ts[prev] + m[K - 1][c] * ts[K - 1]) * dl;
        }

        // head: model m = c s^{e_head} on (0, t_0].  The amplitude must be
        // consistent across the two smallest nodes; otherwise the data
        // contradicts the model and the head is charged to the error bar.
        const double c0 = m[0][c] / std::pow(ts[0], ex.head);
        const double c1 = m[1][c] / std::pow(ts[1], ex.head);
        const double head_measure = std::pow(ts[0], ex.head + 1.0) / (ex.head + 1.0);
        double head = c0 * head_measure;
        double head_err = std::abs(c1 - c0) * head_measure;
        if (std::abs(c1 - c0) > 0.2 * std::max(std::abs(c0), std::abs(c1))) {
            head_err += std::abs(head);
            head = 0.0;
        }

        // tail: amplitude from the last node, spread over the last three
        const double c_last = m[K - 1][c] / std::pow(ts[K - 1], ex.tail);
        double cmin = c_last, cmax = c_last;
        for (std::size_t i = K - 3; i < K; ++i) {
            const double ci = m[i][c] / std::pow(ts[i], ex.tail);
            cmin = std::min(cmin, ci);
            cmax = std::max(cmax, ci);
        }
        const double tail_measure = -std::pow(ts[K - 1], ex.tail + 1.0) / (ex.tail + 1.0);
        const double tail = c_last * tail_measure;
        const double tail_err = (cmax - cmin) * tail_measure;

        out.value[c] = T + head + tail;
        out.error[c] = head_err + tail_err + std::abs(T - Tc) / 3.0;
    }
    return out;
}

double log_time_poly(int l, double z) {
    if (l < 0) throw std::invalid_argument("log_time_poly: l >= 0 required");
    double sum = 0;
    double binom = 1;  // C(l, k)
    for (int k = 1; k <= l; ++k) {
        binom = binom * (l - k + 1) / k;
        const double sgn = (k % 2) ? -1.0 : 1.0;
        sum += binom * sgn * (1.0 - std::pow(z, k)) / k;
    }
    return sum;
}

double log_time_integral(int l, double t) {
    if (t <= 0) throw std::invalid_argument("log_time_integral: t > 0 required");
    return std::log1p(t) + log_time_poly(l, 1.0 / (1.0 + t));
}

Vec2 log_coefficient(int p, int l, const MultiIndex& beta, const MomentTable& table) {
    const int n = beta.dim;
    if (2 * l + beta.order() != p - 2)
        throw std::invalid_argument("log_coefficient: requires 2l+|beta| = p-2");
    if (p < n + 3 || p > 2 * n + 2) throw std::invalid_argument("log_coefficient: p out of range");
    Vec2 c = table.profile_c(p, beta);
    const double sgn = (l % 2) ? -1.0 : 1.0;
    return {sgn * c[0], sgn * c[1]};
}

std::vector<Subtrahend> claim31_subtrahends(int n, int l, const MultiIndex& beta) {
    const int m = 2 * l + beta.order();
    if (m < 1 || m > 2 * n) throw std::invalid_argument("claim31: requires 1 <= 2l+|beta| <= 2n");
    std::vector<Subtrahend> subs;
    for (int p = n + 3; p <= m + 1; ++p) subs.push_back({p, false});
    if (m + 2 >= n + 3) subs.push_back({m + 2, true});
    return subs;
}

Claim31Result claim31_constant(const MomentSeries& series, int l, const MultiIndex& beta,
                               const MomentTable& table) {
    const int n = beta.dim;
    const int m = 2 * l + beta.order();
    const auto subs = claim31_subtrahends(n, l, beta);
    Claim31Result res;
    res.constant = spacetime_moment(series, l, beta, subs, table);
    const double sgn = (l % 2) ? -1.0 : 1.0;
    // explicit tails of the profile approximants over [t, inf)
    for (int p = std::max(m + 3, n + 3); p <= 2 * n + 2; ++p) {
        const Vec2 c = table.profile_c(p, beta);
        const double f = -sgn * 2.0 / (p - m - 2);
        res.poly.push_back({p - m - 2, {f * c[0], f * c[1]}});
    }
    // Taylor-in-time corrections of the shifted approximant
    const int q = m + 2;
    if (q >= n + 3) {
        const Vec2 c = table.profile_c(q, beta);
        const int kmax = static_cast<int>(std::floor(n - l - 0.5 * beta.order()));
        double kfac = 1;
        for (int k = 1; k <= kmax; ++k) {
            kfac *= k;
            double prod = 1;
            for (int i = 1; i <= k; ++i) prod *= -(l + i);
            const double f = sgn * prod / (kfac * k);
            res.poly.push_back({2 * k, {f * c[0], f * c[1]}});
        }
    }
    return res;
}

namespace {

json mi_json(const MultiIndex& a) {
    json arr = json::array();
    for (int d = 0; d < a.dim; ++d) arr.push_back(a.a[d]);
    return arr;
}

MultiIndex mi_from(const json& arr) {
    MultiIndex m = MultiIndex::zero(static_cast<int>(arr.size()));
    for (std::size_t d = 0; d < arr.size(); ++d) m.a[d] = arr[d].get<int>();
    return m;
}

}  // namespace

void write_coefficients(const std::string& json_path, const std::string& csv_path,
                        const MomentTable& table, const std::string& config_hash) {
    json j;
    j["format"] = "nsasym-coeffs-1";
    j["run_id"] = table.run_id;
    j["config_hash"] = config_hash;
    j["dim"] = table.dim;
    j["initial"] = json::array();
    for (const auto& [a, v] : table.initial)
        j["initial"].push_back({{"alpha", mi_json(a)}, {"value", v}});
    auto dump_st = [](const std::map<std::pair<int, MultiIndex>, SpacetimeCoeff>& m, const char* kind) {
        json arr = json::array();
        for (const auto& [key, c] : m)
            arr.push_back({{"l", key.first},
                           {"beta", mi_json(key.second)},
                           {"kind", kind},
                           {"value", {c.value[0], c.value[1]}},
                           {"error", {c.error[0], c.error[1]}},
                           {"tail_model", c.tail_model}});
        return arr;
    };
    j["spacetime"] = dump_st(table.raw, "raw_I");
    for (auto& e : dump_st(table.renorm, "renormalized")) j["spacetime"].push_back(e);
    j["profile_moments"] = json::array();
    for (const auto& [key, c] : table.profile_moment)
        j["profile_moments"].push_back(
            {{"p", key.first}, {"beta", mi_json(key.second)}, {"value", {c[0], c[1]}}});

    std::ofstream os(json_path);
    if (!os) throw std::runtime_error("cannot write " + json_path);
    os << j.dump(2) << "\n";

    if (!csv_path.empty()) {
        // mirror sorted by (l, |beta|, beta)
        std::vector<std::tuple<int, int, MultiIndex, std::string, SpacetimeCoeff>> rows;
        for (const auto& [key, c] : table.raw)
            rows.push_back({key.first, key.second.order(), key.second, "raw_I", c});
        for (const auto& [key, c] : table.renorm)
            rows.push_back({key.first, key.second.order(), key.second, "renormalized", c});
        std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
            if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
            if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
            return std::get<2>(a) < std::get<2>(b);
        });
        std::ofstream cs(csv_path);
        cs << "l,beta,kind,value1,value2,error1,error2,tail_model\n";
        for (const auto& [l, ord, beta, kind, c] : rows) {
            (void)ord;
            cs << l << "," << beta.str() << "," << kind << "," << format_double(c.value[0]) << ","
               << format_double(c.value[1]) << "," << format_double(c.error[0]) << ","
               << format_double(c.error[1]) << "," << c.tail_model << "\n";
        }
    }
}

MomentTable read_coefficients(const std::string& json_path) {
    std::ifstream is(json_path);
    if (!is) throw std::runtime_error("cannot open " + json_path);
    json j = json::parse(is);
    MomentTable t;
    t.dim = j.value("dim", 2);
    t.run_id = j.value("run_id", "");
    for (const auto& e : j["initial"]) t.initial[mi_from(e["alpha"])] = e["value"].get<double>();
    for (const auto& e : j["spacetime"]) {
        SpacetimeCoeff c;
        c.value = {e["value"][0].get<double>(), e["value"][1].get<double>()};
        c.error = {e["error"][0].get<double>(), e["error"][1].get<double>()};
        c.tail_model = e.value("tail_model", "");
        const auto key = std::make_pair(e["l"].get<int>(), mi_from(e["beta"]));
        if (e["kind"] == "raw_I")
            t.raw[key] = c;
        else
            t.renorm[key] = c;
    }
    for (const auto& e : j["profile_moments"])
        t.profile_moment[{e["p"].get<int>(), mi_from(e["beta"])}] = {e["value"][0].get<double>(),
                                                                     e["value"][1].get<double>()};
    return t;
}

}  // namespace nsasym
