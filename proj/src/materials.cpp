#include "ipmtk/materials.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ipmtk {

namespace {

// Fritsch-Carlson monotone node slopes (the Butland weighted-harmonic form).
std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> m(n);
    if (n == 1) {
        m[0] = 0;
        return m;
    }
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x[k + 1] - x[k];
        d[k] = (y[k + 1] - y[k]) / h[k];
    }
    m[0] = d[0];
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double p = d[k] * d[k - 1];
        if (p > 0.0) {
            const double a = (h[k - 1] + 2.0 * h[k]) / (3.0 * (h[k - 1] + h[k]));
            m[k] = p / (a * d[k] + (1.0 - a) * d[k - 1]);
        } else {
            m[k] = 0.0;
        }
    }
    m[n - 1] = d[n - 2];
    return m;
}

// Exact integral of the cubic Hermite segment over [x0, x1].
double hermite_integral(double h, double y0, double y1, double m0, double m1) {
    return h * (0.5 * (y0 + y1) + h * (m0 - m1) / 12.0);
}

// Hermite evaluation at local parameter t in [0, 1].
double hermite_value(double t, double h, double y0, double y1, double m0, double m1) {
    const double t2 = t * t, t3 = t2 * t;
    return y0 * (2 * t3 - 3 * t2 + 1) + h * m0 * (t3 - 2 * t2 + t) +
           y1 * (-2 * t3 + 3 * t2) + h * m1 * (t3 - t2);
}

double hermite_slope(double t, double h, double y0, double y1, double m0, double m1) {
    const double t2 = t * t;
    return (y0 * (6 * t2 - 6 * t) + h * m0 * (3 * t2 - 4 * t + 1) +
            y1 * (-6 * t2 + 6 * t) + h * m1 * (3 * t2 - 2 * t)) / h;
}

// Integral of the Hermite segment from its left end to local parameter t.
double hermite_partial_integral(double t, double h, double y0, double y1, double m0, double m1) {
    const double t2 = t * t, t3 = t2 * t, t4 = t2 * t2;
    const double i00 = 0.5 * t4 - t3 + t;                 // integral of 2t^3-3t^2+1
    const double i10 = 0.25 * t4 - (2.0 / 3.0) * t3 + 0.5 * t2;
    const double i01 = -0.5 * t4 + t3;
    const double i11 = 0.25 * t4 - t3 / 3.0;
    return h * (y0 * i00 + h * m0 * i10 + y1 * i01 + h * m1 * i11);
}

}  // namespace

BHCurve BHCurve::from_samples(std::vector<std::array<double, 2>> hb) {
    BHCurve c;
    if (hb.empty()) throw std::invalid_argument("bh_samples: empty sample list");
    if (hb.front()[0] != 0.0 || hb.front()[1] != 0.0)
        throw std::invalid_argument("bh_samples: first sample must be (0, 0)");
    c.h_.reserve(hb.size());
    c.b_.reserve(hb.size());
    for (std::size_t i = 0; i < hb.size(); ++i) {
        const double h = hb[i][0], b = hb[i][1];
        if (!std::isfinite(h) || !std::isfinite(b))
            throw std::invalid_argument("bh_samples: non-finite sample " + std::to_string(i));
        if (i > 0) {
            if (h <= c.h_.back())
                throw std::invalid_argument("bh_samples: H not strictly increasing at sample " +
                                            std::to_string(i));
            if (b <= c.b_.back())
                throw std::invalid_argument("bh_samples: B not strictly increasing at sample " +
                                            std::to_string(i));
            const double slope = (b - c.b_.back()) / (h - c.h_.back());
            if (slope < kMu0)
                throw std::invalid_argument("bh_samples: incremental slope below mu0 at sample " +
                                            std::to_string(i));
        }
        c.h_.push_back(h);
        c.b_.push_back(b);
    }
    c.m_ = monotone_slopes(c.h_, c.b_);
    c.int_.assign(c.h_.size(), 0.0);
    for (std::size_t k = 0; k + 1 < c.h_.size(); ++k) {
        const double h = c.h_[k + 1] - c.h_[k];
        c.int_[k + 1] = c.int_[k] + hermite_integral(h, c.b_[k], c.b_[k + 1], c.m_[k], c.m_[k + 1]);
    }
    return c;
}

std::size_t BHCurve::segment_of(double h) const {
    // h is inside [h_.front(), h_.back()]; binary search for the segment.
    const auto it = std::upper_bound(h_.begin(), h_.end(), h);
    std::size_t k = static_cast<std::size_t>(it - h_.begin());
    if (k == 0) return 0;
    if (k >= h_.size()) return h_.size() - 2;
    return k - 1;
}

double BHCurve::b_at(double h) const {
    if (empty()) throw std::domain_error("b_at: empty curve");
    if (h < 0 || !std::isfinite(h)) throw std::domain_error("b_at: H must be finite and >= 0");
    if (h > h_domain_max())
        throw std::domain_error("b_at: H beyond curve domain; extrapolate_overflux first");
    if (h > h_.back()) return tail_b(h);
    const std::size_t k = segment_of(h);
    const double seg = h_[k + 1] - h_[k];
    const double t = (h - h_[k]) / seg;
    if (t == 0.0) return b_[k];
    if (t == 1.0) return b_[k + 1];
    return hermite_value(t, seg, b_[k], b_[k + 1], m_[k], m_[k + 1]);
}

double BHCurve::slope_at(double h) const {
    if (empty()) throw std::domain_error("slope_at: empty curve");
    if (h < 0 || !std::isfinite(h)) throw std::domain_error("slope_at: H must be finite and >= 0");
    if (h > h_domain_max())
        throw std::domain_error("slope_at: H beyond curve domain; extrapolate_overflux first");
    if (h > h_.back()) return tail_slope(h);
    const std::size_t k = segment_of(h);
    const double seg = h_[k + 1] - h_[k];
    return hermite_slope((h - h_[k]) / seg, seg, b_[k], b_[k + 1], m_[k], m_[k + 1]);
}

double BHCurve::coenergy_density(double h) const {
    if (empty()) throw std::domain_error("coenergy_density: empty curve");
    if (h < 0 || !std::isfinite(h))
        throw std::domain_error("coenergy_density: H must be finite and >= 0");
    if (h > h_domain_max())
        throw std::domain_error("coenergy_density: H beyond curve domain; extrapolate_overflux first");
    if (h > h_.back()) return int_.back() + tail_integral(h);
    const std::size_t k = segment_of(h);
    const double seg = h_[k + 1] - h_[k];
    const double t = (h - h_[k]) / seg;
    return int_[k] + hermite_partial_integral(t, seg, b_[k], b_[k + 1], m_[k], m_[k + 1]);
}

double BHCurve::tail_b(double h) const {
    const Tail& t = *tail_;
    const double d = h - t.h_junction;
    return t.b_junction + kMu0 * d +
           t.a1 * t.tau1 * (1.0 - std::exp(-d / t.tau1)) +
           t.a2 * t.tau2 * (1.0 - std::exp(-d / t.tau2));
}

double BHCurve::tail_slope(double h) const {
    const Tail& t = *tail_;
    const double d = h - t.h_junction;
    return kMu0 + t.a1 * std::exp(-d / t.tau1) + t.a2 * std::exp(-d / t.tau2);
}

double BHCurve::tail_integral(double h) const {
    const Tail& t = *tail_;
    const double d = h - t.h_junction;
    double s = t.b_junction * d + 0.5 * kMu0 * d * d;
    s += t.a1 * t.tau1 * (d + t.tau1 * (std::exp(-d / t.tau1) - 1.0));
    s += t.a2 * t.tau2 * (d + t.tau2 * (std::exp(-d / t.tau2) - 1.0));
    return s;
}

bool BHCurve::operator==(const BHCurve& other) const {
    return h_ == other.h_ && b_ == other.b_ &&
           tail_.has_value() == other.tail_.has_value() &&
           (!tail_ || (tail_->horizon == other.tail_->horizon &&
                       tail_->a1 == other.tail_->a1 && tail_->tau1 == other.tail_->tau1 &&
                       tail_->a2 == other.tail_->a2 && tail_->tau2 == other.tail_->tau2));
}

BHCurve extrapolate_overflux(const BHCurve& curve, double h_target) {
    if (curve.size() < 2) throw std::domain_error("extrapolate_overflux: need at least 2 samples");
    if (h_target <= curve.h_domain_max()) return curve;  // no-op

    BHCurve out = curve;
    const auto& h = curve.h_;
    const auto& b = curve.b_;
    const std::size_t n = h.size();
    const double hn = h.back();

    // Decay constant of the excess slope, estimated from the secant slopes of
    // the last two segments (midpoint abscissae m1 < m2).
    double tau = hn / 3.0;
    if (n >= 3) {
        const double s1 = (b[n - 1] - b[n - 2]) / (h[n - 1] - h[n - 2]);
        const double s0 = (b[n - 2] - b[n - 3]) / (h[n - 2] - h[n - 3]);
        const double g0 = s0 - kMu0, g1 = s1 - kMu0;
        if (g0 > 0 && g1 > 0 && g0 > g1) {
            const double mid0 = 0.5 * (h[n - 2] + h[n - 3]);
            const double mid1 = 0.5 * (h[n - 1] + h[n - 2]);
            tau = (mid1 - mid0) / std::log(g0 / g1);
        }
    }
    tau = std::clamp(tau, hn / 50.0, hn);

    // Junction excess slope comes from the interpolant's end derivative, so
    // the extension is C1. Split into two simultaneous exponentials.
    const double g_end = std::max(curve.slope_at(hn) - kMu0, 0.0);
    BHCurve::Tail tail;
    tail.h_junction = hn;
    tail.b_junction = b.back();
    tail.a1 = 0.75 * g_end;
    tail.tau1 = tau;
    tail.a2 = 0.25 * g_end;
    tail.tau2 = tau / 3.0;
    tail.horizon = h_target;
    out.tail_ = tail;
    return out;
}

double core_loss_density(const SoftMagneticMaterial& mat, double b_peak_t, double f_hz) {
    if (b_peak_t < 0 || f_hz < 0)
        throw std::domain_error("core_loss_density: b_peak and f must be >= 0");
    const LossCoefficients& c = mat.loss;
    return c.k_h * f_hz * std::pow(b_peak_t, c.beta) + c.k_e * f_hz * f_hz * b_peak_t * b_peak_t;
}

namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& field, const std::string& mat_name) {
    if (!j.contains(field) || !j[field].is_number())
        throw LoadError("material '" + mat_name + "': missing or non-numeric field '" + field + "'");
    return j[field].get<double>();
}

SoftMagneticMaterial parse_material(const json& j) {
    if (!j.contains("name") || !j["name"].is_string())
        throw LoadError("material entry without a 'name' field");
    SoftMagneticMaterial m;
    m.name = j["name"].get<std::string>();

    if (!j.contains("bh_samples") || !j["bh_samples"].is_array())
        throw LoadError("material '" + m.name + "': missing or non-array field 'bh_samples'");
    std::vector<std::array<double, 2>> samples;
    for (const auto& p : j["bh_samples"]) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw LoadError("material '" + m.name + "': bh_samples entries must be [H, B] pairs");
        samples.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    try {
        m.bh = BHCurve::from_samples(std::move(samples));
    } catch (const std::invalid_argument& e) {
        throw LoadError("material '" + m.name + "': " + e.what());
    }

    m.loss.k_h = require_number(j, "k_h", m.name);
    m.loss.beta = require_number(j, "beta", m.name);
    m.loss.k_e = require_number(j, "k_e", m.name);
    if (m.loss.k_h < 0 || m.loss.k_e < 0)
        throw LoadError("material '" + m.name + "': loss coefficients must be >= 0");
    if (m.loss.beta < 1.5 || m.loss.beta > 2.5)
        throw LoadError("material '" + m.name + "': field 'beta' outside [1.5, 2.5]");

    m.young_modulus_pa = require_number(j, "E_pa", m.name);
    m.density_kg_m3 = require_number(j, "rho_kg_m3", m.name);
    m.yield_stress_pa = require_number(j, "yield_pa", m.name);
    m.lamination_thickness_m = require_number(j, "thickness_m", m.name);
    if (m.young_modulus_pa <= 0 || m.density_kg_m3 <= 0 || m.yield_stress_pa <= 0)
        throw LoadError("material '" + m.name + "': E_pa, rho_kg_m3, yield_pa must be > 0");
    if (m.lamination_thickness_m <= 0)
        throw LoadError("material '" + m.name + "': field 'thickness_m' must be > 0");

    if (!j.contains("cost_tier") || !j["cost_tier"].is_number_integer())
        throw LoadError("material '" + m.name + "': missing or non-integer field 'cost_tier'");
    m.cost_tier = j["cost_tier"].get<int>();
    if (m.cost_tier < 1 || m.cost_tier > 4)
        throw LoadError("material '" + m.name + "': field 'cost_tier' outside {1..4}");
    return m;
}

}  // namespace

MaterialDb MaterialDb::from_json_text(const std::string& text, const std::string& origin) {
    MaterialDb db;
    // An empty or whitespace-only file is a valid empty registry.
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return db;

    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw LoadError(origin + ": JSON parse error: " + e.what());
    }
    if (!j.contains("schema_version"))
        throw LoadError(origin + ": missing required field 'schema_version'");
    if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != 1)
        throw LoadError(origin + ": unknown schema_version (expected 1)");
    if (!j.contains("materials") || !j["materials"].is_array())
        throw LoadError(origin + ": missing 'materials' array");
    for (const auto& entry : j["materials"]) {
        SoftMagneticMaterial m = parse_material(entry);
        if (db.contains(m.name))
            throw LoadError(origin + ": duplicate material '" + m.name + "'");
        db.materials_.push_back(std::move(m));
    }
    return db;
}

MaterialDb MaterialDb::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open material DB: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str(), path);
}

std::string MaterialDb::to_json_text() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["materials"] = nlohmann::ordered_json::array();
    for (const auto& m : materials_) {
        nlohmann::ordered_json e;
        e["name"] = m.name;
        auto samples = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < m.bh.size(); ++i)
            samples.push_back({m.bh.h_samples()[i], m.bh.b_samples()[i]});
        e["bh_samples"] = std::move(samples);
        e["k_h"] = m.loss.k_h;
        e["beta"] = m.loss.beta;
        e["k_e"] = m.loss.k_e;
        e["E_pa"] = m.young_modulus_pa;
        e["rho_kg_m3"] = m.density_kg_m3;
        e["yield_pa"] = m.yield_stress_pa;
        e["thickness_m"] = m.lamination_thickness_m;
        e["cost_tier"] = m.cost_tier;
        j["materials"].push_back(std::move(e));
    }
    return j.dump(2) + "\n";
}

void MaterialDb::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write material DB: " + path);
    out << to_json_text();
}

bool MaterialDb::contains(const std::string& name) const {
    for (const auto& m : materials_)
        if (m.name == name) return true;
    return false;
}

const SoftMagneticMaterial& MaterialDb::get(const std::string& name) const {
    for (const auto& m : materials_)
        if (m.name == name) return m;
    throw LoadError("unknown material: " + name);
}

std::vector<std::string> MaterialDb::names() const {
    std::vector<std::string> out;
    out.reserve(materials_.size());
    for (const auto& m : materials_) out.push_back(m.name);
    return out;
}

std::string default_material_db_path() {
    if (const char* env = std::getenv("IPMTK_MATERIALS_DB"); env && *env) return env;
#ifdef IPMTK_DATA_DIR
    return std::string(IPMTK_DATA_DIR) + "/materials.json";
#else
    return "data/materials.json";
#endif
}

}  // namespace ipmtk
