#include "magsim/config.hpp"

#include "magsim/error.hpp"
#include "magsim/interferometer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <numbers>
#include <openssl/evp.h>
#include <set>
#include <sstream>

namespace magsim {

using nlohmann::json;

// ---------------------------------------------------------------------------
// TOML subset
// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool is_bare_key(std::string_view k) {
    return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
}

class TomlLineParser {
public:
    TomlLineParser(std::string_view text, int line) : s_(text), line_(line) {}

    json value() {
        skip_ws();
        if (at_end()) fail("missing value");
        const char c = s_[pos_];
        if (c == '"') return string_value();
        if (c == '\'') return literal_string();
        if (c == '[') return array_value();
        return scalar_value();
    }

    void expect_end() {
        skip_ws();
        if (!at_end()) fail(fmt::format("unexpected trailing text '{}'", s_.substr(pos_)));
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(fmt::format("line {}: {}", line_, msg), line_);
    }
    bool at_end() const { return pos_ >= s_.size(); }
    void skip_ws() {
        while (!at_end() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    json string_value() {
        ++pos_; // opening quote
        std::string out;
        while (true) {
            if (at_end()) fail("unterminated string");
            const char c = s_[pos_++];
            if (c == '"') break;
            if (c == '\\') {
                if (at_end()) fail("unterminated escape");
                const char e = s_[pos_++];
                switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail(fmt::format("unsupported escape \\{}", e));
                }
            } else {
                out += c;
            }
        }
        return out;
    }

    json literal_string() {
        const auto close = s_.find('\'', ++pos_);
        if (close == std::string_view::npos) fail("unterminated string");
        std::string out(s_.substr(pos_, close - pos_));
        pos_ = close + 1;
        return out;
    }

    json array_value() {
        ++pos_; // '['
        json arr = json::array();
        while (true) {
            skip_ws();
            if (at_end()) fail("unterminated array (arrays must fit on one line)");
            if (s_[pos_] == ']') {
                ++pos_;
                return arr;
            }
            if (s_[pos_] == '[') fail("nested arrays are not supported");
            arr.push_back(value());
            skip_ws();
            if (at_end()) fail("unterminated array");
            if (s_[pos_] == ',') {
                ++pos_;
            } else if (s_[pos_] != ']') {
                fail("expected ',' or ']' in array");
            }
        }
    }

    json scalar_value() {
        const auto start = pos_;
        while (!at_end() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != ' ' &&
               s_[pos_] != '\t')
            ++pos_;
        std::string tok(s_.substr(start, pos_ - start));
        if (tok == "true") return true;
        if (tok == "false") return false;
        if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
        if (tok == "-inf") return -std::numeric_limits<double>::infinity();
        if (tok == "nan" || tok == "+nan" || tok == "-nan") fail("nan is not an accepted value");

        tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
        std::string_view body = tok;
        if (!body.empty() && body.front() == '+') body.remove_prefix(1);
        const char* first = body.data();
        const char* last = body.data() + body.size();

        const bool integral = body.find_first_of(".eE") == std::string_view::npos;
        if (integral) {
            std::int64_t i = 0;
            if (auto [p, ec] = std::from_chars(first, last, i); ec == std::errc() && p == last)
                return i;
            std::uint64_t u = 0;
            if (auto [p, ec] = std::from_chars(first, last, u); ec == std::errc() && p == last)
                return u;
        }
        double d = 0.0;
        if (auto [p, ec] = std::from_chars(first, last, d); ec == std::errc() && p == last)
            return d;
        fail(fmt::format("cannot parse value '{}'", tok));
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int line_;
};

// Removes a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quote == '"' && c == '\\') {
            ++i;
        } else if (quote == 0 && (c == '"' || c == '\'')) {
            quote = c;
        } else if (c == quote) {
            quote = 0;
        } else if (c == '#' && quote == 0) {
            return line.substr(0, i);
        }
    }
    return line;
}

std::vector<std::string> split_dotted(std::string_view path, int line) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const auto part = trim(path.substr(start, dot == std::string_view::npos ? dot : dot - start));
        if (!is_bare_key(part))
            throw ParseError(fmt::format("line {}: invalid table name '{}'", line, path), line);
        parts.emplace_back(part);
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return parts;
}

} // namespace

json parse_toml(std::string_view text) {
    json root = json::object();
    json* table = &root;
    std::set<std::string> defined_tables;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto line = trim(strip_comment(raw));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ParseError(fmt::format("line {}: malformed table header", line_no), line_no);
            const auto name = trim(line.substr(1, line.size() - 2));
            if (!defined_tables.insert(std::string(name)).second)
                throw ParseError(fmt::format("line {}: table [{}] defined twice", line_no, name),
                                 line_no);
            table = &root;
            for (const auto& part : split_dotted(name, line_no)) {
                json& next = (*table)[part];
                if (next.is_null()) next = json::object();
                if (!next.is_object())
                    throw ParseError(fmt::format("line {}: '{}' is not a table", line_no, part),
                                     line_no);
                table = &next;
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(fmt::format("line {}: expected 'key = value'", line_no), line_no);
        const auto key = trim(line.substr(0, eq));
        if (!is_bare_key(key))
            throw ParseError(fmt::format("line {}: invalid key '{}'", line_no, key), line_no);
        if (table->contains(std::string(key)))
            throw ParseError(fmt::format("line {}: duplicate key '{}'", line_no, key), line_no);

        TomlLineParser p(line.substr(eq + 1), line_no);
        json v = p.value();
        p.expect_end();
        (*table)[std::string(key)] = std::move(v);
    }
    return root;
}

// ---------------------------------------------------------------------------
// JSON tree -> RunConfig
// ---------------------------------------------------------------------------

namespace {

// Reads keys of one table and remembers which ones were consumed, so that
// leftovers can be reported as unknown.
class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) fail(fmt::format("[{}] must be a table", name_));
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    double number(const std::string& key) {
        if (!has(key)) fail(fmt::format("missing required field {}", qualified(key)));
        return as_number(key);
    }
    double number_or(const std::string& key, double fallback) {
        return has(key) ? as_number(key) : fallback;
    }
    std::optional<double> optional_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return as_number(key);
    }
    std::uint64_t count(const std::string& key) {
        if (!has(key)) fail(fmt::format("missing required field {}", qualified(key)));
        return as_count(key);
    }
    std::uint64_t count_or(const std::string& key, std::uint64_t fallback) {
        return has(key) ? as_count(key) : fallback;
    }
    std::string string(const std::string& key) {
        if (!has(key)) fail(fmt::format("missing required field {}", qualified(key)));
        used_.insert(key);
        if (!j_.at(key).is_string()) fail(fmt::format("{} must be a string", qualified(key)));
        return j_.at(key).get<std::string>();
    }
    std::string string_or(const std::string& key, const std::string& fallback) {
        return has(key) ? string(key) : fallback;
    }
    std::vector<double> numbers(const std::string& key) {
        if (!has(key)) fail(fmt::format("missing required field {}", qualified(key)));
        return numbers_or(key, {});
    }
    std::vector<double> numbers_or(const std::string& key, std::vector<double> fallback) {
        if (!has(key)) return fallback;
        used_.insert(key);
        const json& v = j_.at(key);
        if (!v.is_array()) fail(fmt::format("{} must be an array of numbers", qualified(key)));
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) fail(fmt::format("{} must contain only numbers", qualified(key)));
            out.push_back(x.get<double>());
        }
        return out;
    }

    const json& raw() const { return j_; }
    void mark(const std::string& key) { used_.insert(key); }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!used_.count(k)) fail(fmt::format("unknown field {}", qualified(k)));
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ValidationError(msg); }
    std::string qualified(const std::string& key) const {
        return name_.empty() ? key : fmt::format("[{}].{}", name_, key);
    }

    // Runs a module validator and reports its message under this section.
    template <typename F>
    void check(F&& f) const {
        try {
            f();
        } catch (const Error& e) {
            fail(fmt::format("[{}] invariant violated: {}", name_, e.what()));
        }
    }

private:
    double as_number(const std::string& key) {
        used_.insert(key);
        const json& v = j_.at(key);
        if (!v.is_number()) fail(fmt::format("{} must be a number", qualified(key)));
        const double d = v.get<double>();
        if (std::isnan(d)) fail(fmt::format("{} is NaN", qualified(key)));
        return d;
    }
    std::uint64_t as_count(const std::string& key) {
        used_.insert(key);
        const json& v = j_.at(key);
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
            return static_cast<std::uint64_t>(v.get<std::int64_t>());
        fail(fmt::format("{} must be a non-negative integer", qualified(key)));
    }

    const json& j_;
    std::string name_;
    std::set<std::string> used_;
};

constexpr double kPi = std::numbers::pi;

SpinSection read_spin(const json& j) {
    Section s(j, "spin");
    SpinSection out;
    out.rates.gamma_e = 2.0 * kPi * s.number("gamma_e_hz_per_nt");
    out.rates.r_op = s.number("r_op");
    out.rates.r_rel = s.number("r_rel");
    out.fields.bz = s.number("bz_nt");
    out.fields.by_amp = s.number_or("by_amp_nt", 0.0);
    out.fields.by_freq = s.number_or("by_freq_hz", 0.0);
    out.fields.by_phase = s.number_or("by_phase_rad", 0.0);

    const std::string mode = s.string("q_mode");
    if (mode == "polarization") {
        out.q_mode = spin::SlowingFactorMode::polarization_dependent();
        if (s.has("q")) s.fail("[spin].q is only allowed with q_mode = \"constant\"");
    } else if (mode == "constant") {
        out.q_mode = spin::SlowingFactorMode::constant(s.number("q"));
    } else {
        s.fail(fmt::format("[spin].q_mode must be \"polarization\" or \"constant\", got \"{}\"",
                           mode));
    }

    const auto p0 = s.numbers_or("p0", {0.0, 0.0, 0.0});
    if (p0.size() != 3) s.fail("[spin].p0 must have three components");
    out.p0 = {p0[0], p0[1], p0[2]};
    out.t_end = s.number("t_end_s");
    out.dt = s.number("dt_s");
    out.transient_multiplier = s.number_or("transient_multiplier", 5.0);
    out.output_stride = s.count_or("output_stride", 1);
    s.finish();

    s.check([&] {
        out.rates.validate();
        if (!(out.rates.r_op + out.rates.r_rel > 0.0))
            throw DomainError("r_op + r_rel must be positive");
        out.fields.validate();
        out.q_mode.validate();
        if (out.p0.norm() > 1.0) throw DomainError("|p0| must not exceed 1");
        if (!(out.transient_multiplier >= 0.0))
            throw DomainError("transient_multiplier must be non-negative");
        if (out.output_stride == 0) throw DomainError("output_stride must be at least 1");
        spin::check_resolution(out.rates, out.fields, out.q_mode, out.t_end, out.dt);
        if (spin::transient_time(out.rates, out.q_mode, out.transient_multiplier) >= out.t_end)
            throw DomainError("t_end_s does not extend past the pumping transient");
    });
    return out;
}

optics::OpticalParams read_optics(const json& j) {
    Section s(j, "optics");
    optics::OpticalParams p;
    p.path_length_m = s.number("path_length_m");
    p.electron_radius_m = s.number_or("electron_radius_m", 2.8e-15);
    p.speed_of_light_m_s = s.number_or("speed_of_light_m_s", 2.998e8);
    p.oscillator_strength = s.number("oscillator_strength");
    p.atom_density_m3 = optics::OpticalParams::density_from_per_cm3(s.number("atom_density_cm3"));
    p.probe_freq_hz = s.number("probe_freq_hz");
    p.resonance_freq_hz = s.number("resonance_freq_hz");
    p.fwhm_hz = s.number("fwhm_hz");
    s.finish();
    s.check([&] { p.validate(); });
    return p;
}

MziSection read_mzi(const json& j) {
    Section s(j, "mzi");
    MziSection m;
    for (double b : s.numbers("beta_over_pi")) m.betas.push_back(b * kPi);
    m.p_min = s.number_or("p_min", mzi::kDarkPortFloor);
    s.finish();
    if (m.betas.empty()) s.fail("[mzi].beta_over_pi must not be empty");
    s.check([&] {
        for (double b : m.betas) mzi::MziConfig{b}.validate();
        if (!(m.p_min >= 0.0 && m.p_min < 1.0)) throw DomainError("p_min must lie in [0, 1)");
    });
    return m;
}

detection::DetectorConfig read_detector(const json& j, std::uint64_t seed) {
    Section s(j, "detector");
    detection::DetectorConfig d;
    d.n_photons = s.number("n_photons");
    if (s.has("i_sat")) {
        const double v = s.number("i_sat");
        if (!std::isinf(v)) d.i_sat = v;
    }
    d.seed = seed;
    s.finish();
    s.check([&] { d.validate(); });
    return d;
}

StudySection read_study(const json& j) {
    Section s(j, "study");
    StudySection st;
    st.theta = s.number("theta_rad");
    st.trials = s.count("trials");
    const bool by_beta = s.has("beta_over_pi");
    const bool by_pf = s.has("target_p_f");
    if (by_beta == by_pf) s.fail("[study] needs exactly one of beta_over_pi or target_p_f");
    if (by_beta) {
        st.beta = s.number("beta_over_pi") * kPi;
    } else {
        const double pf = s.number("target_p_f");
        if (!(pf > 0.0 && pf < 1.0)) s.fail("[study].target_p_f must lie in (0, 1)");
        const double c = (2.0 * pf - 1.0) / std::cos(st.theta);
        if (std::abs(c) > 1.0) s.fail("[study].target_p_f is not reachable at this theta");
        st.beta = std::acos(c);
    }
    s.finish();
    s.check([&] {
        if (!(st.theta > 0.0 && st.theta < 0.5 * kPi))
            throw DomainError("theta_rad must lie in (0, pi/2)");
        if (st.trials < 100) throw DomainError("trials must be at least 100");
        mzi::MziConfig{st.beta}.validate();
    });
    return st;
}

std::vector<pbs::PbsParams> read_pbs(const json& j) {
    Section s(j, "pbs");
    const auto d1 = s.numbers("delta1");
    const auto d2 = s.numbers("delta2");
    if (d1.size() != d2.size() || d1.empty())
        s.fail("[pbs].delta1 and [pbs].delta2 must be non-empty and of equal length");
    auto defaulted = [&](const std::string& key, const std::vector<double>& deltas) {
        std::vector<double> fallback;
        for (double d : deltas) fallback.push_back(1.0 - d);
        auto v = s.numbers_or(key, fallback);
        if (v.size() != deltas.size())
            s.fail(fmt::format("[pbs].{} must have one entry per delta pair", key));
        return v;
    };
    const auto t_h = defaulted("t_h", d1);
    const auto r_v = defaulted("r_v", d2);
    const double eta_t = s.number_or("eta_t", 1.0);
    const double eta_r = s.number_or("eta_r", 1.0);
    s.finish();

    std::vector<pbs::PbsParams> out;
    for (std::size_t i = 0; i < d1.size(); ++i) out.push_back({t_h[i], r_v[i], d1[i], d2[i], eta_t, eta_r});
    s.check([&] {
        for (const auto& p : out) p.validate();
    });
    return out;
}

SweepAxis read_axis(const json& j, const std::string& name) {
    static const std::set<std::string> known{"theta", "v0", "n_photons"};
    if (!known.count(name)) throw ValidationError(fmt::format("unknown sweep axis [sweep.{}]", name));
    Section s(j, "sweep." + name);
    SweepAxis a;
    a.name = name;
    a.min = s.number("min");
    a.max = s.number("max");
    a.count = s.count("count");
    const std::string scale = s.string_or("scale", "linear");
    if (scale == "linear")
        a.scale = SweepAxis::Scale::Linear;
    else if (scale == "log")
        a.scale = SweepAxis::Scale::Log;
    else
        s.fail(fmt::format("[sweep.{}].scale must be \"linear\" or \"log\"", name));
    s.finish();
    if (a.count < 2) s.fail(fmt::format("[sweep.{}].count must be at least 2", name));
    if (!(a.max > a.min)) s.fail(fmt::format("[sweep.{}] requires max > min", name));
    if (a.scale == SweepAxis::Scale::Log && !(a.min > 0.0))
        s.fail(fmt::format("[sweep.{}] log scale requires min > 0", name));
    return a;
}

} // namespace

std::vector<double> SweepAxis::values() const {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(count - 1);
        if (scale == Scale::Linear)
            v[i] = min + (max - min) * f;
        else
            v[i] = std::pow(10.0, std::log10(min) + f * (std::log10(max) - std::log10(min)));
    }
    v.front() = min;
    v.back() = max;
    return v;
}

RunConfig config_from_json(const json& doc) {
    Section top(doc, "");
    RunConfig cfg;
    cfg.seed = top.count_or("seed", 0);
    cfg.output_dir = top.string_or("output_dir", "out");

    if (top.has("spin")) {
        top.mark("spin");
        cfg.spin = read_spin(doc.at("spin"));
    }
    if (top.has("optics")) {
        top.mark("optics");
        cfg.optics = read_optics(doc.at("optics"));
    }
    if (top.has("mzi")) {
        top.mark("mzi");
        cfg.mzi = read_mzi(doc.at("mzi"));
    }
    if (top.has("detector")) {
        top.mark("detector");
        cfg.detector = read_detector(doc.at("detector"), cfg.seed);
    }
    if (top.has("study")) {
        top.mark("study");
        cfg.study = read_study(doc.at("study"));
    }
    if (top.has("pbs")) {
        top.mark("pbs");
        cfg.splitters = read_pbs(doc.at("pbs"));
    }
    if (top.has("sweep")) {
        top.mark("sweep");
        const json& sw = doc.at("sweep");
        if (!sw.is_object()) throw ValidationError("[sweep] must be a table of axes");
        for (const auto& [name, axis] : sw.items()) cfg.sweeps[name] = read_axis(axis, name);
    }
    top.finish();
    return cfg;
}

RunConfig parse_config(std::string_view text, ConfigFormat format) {
    json doc;
    if (format == ConfigFormat::Json) {
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(fmt::format("JSON: {}", e.what()), 0);
        }
    } else {
        doc = parse_toml(text);
    }
    RunConfig cfg = config_from_json(doc);
    cfg.source_text = std::string(text);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open config file {}", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto format = path.extension() == ".json" ? ConfigFormat::Json : ConfigFormat::Toml;
    try {
        return parse_config(buf.str(), format);
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()), e.line());
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::string config_hash(std::string_view text) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("internal", "SHA-256 computation failed");
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

} // namespace magsim
