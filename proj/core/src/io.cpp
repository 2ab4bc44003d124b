#include "defiers/io.hpp"

#include "defiers/errors.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace defiers {

using nlohmann::json;

namespace {

std::string trim(std::string s) {
    const char* ws = " \t\r\n";
    auto a = s.find_first_not_of(ws);
    if (a == std::string::npos) return {};
    auto b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    auto [p, ec] = std::from_chars(first, s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size() && std::isfinite(v);
}

int parse_flag(const std::string& s, long line, const char* name) {
    double v = 0.0;
    if (!parse_double(s, v) || (v != 0.0 && v != 1.0))
        throw MalformedRowError(line, std::string(name) + " must be 0 or 1, got '" + s + "'");
    return v == 1.0 ? 1 : 0;
}

json num(double x) {
    if (std::isnan(x)) return nullptr;
    return x;
}

double get_num(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

std::vector<double> get_vec(const json& j) {
    std::vector<double> v;
    for (const json& x : j) v.push_back(get_num(x));
    return v;
}

json vec(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

json region_json(const RegionCurve& rc) {
    json bp = json::array();
    for (const auto& b : rc.bp) bp.push_back(b ? json(*b) : json(nullptr));
    return {{"pi_grid", vec(rc.pi_grid)}, {"delta_lo", vec(rc.delta_lo)}, {"delta_hi", vec(rc.delta_hi)},
            {"bp", bp}, {"pdf_lo", num(rc.pdf_lo)}, {"pdf_hi", num(rc.pdf_hi)}, {"mu", num(rc.mu)},
            {"empty", rc.empty}};
}

RegionCurve region_parse(const json& j) {
    RegionCurve rc;
    rc.pi_grid = get_vec(j.at("pi_grid"));
    rc.delta_lo = get_vec(j.at("delta_lo"));
    rc.delta_hi = get_vec(j.at("delta_hi"));
    for (const json& b : j.at("bp")) rc.bp.push_back(b.is_null() ? std::nullopt : std::optional<double>(b.get<double>()));
    rc.pdf_lo = get_num(j.at("pdf_lo"));
    rc.pdf_hi = get_num(j.at("pdf_hi"));
    rc.mu = get_num(j.at("mu"));
    rc.empty = j.at("empty").get<bool>();
    return rc;
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

MicroSample read_sample(std::istream& in) {
    std::string line;
    long lineno = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        if (!trim(line).empty()) {
            header = split(trim(line));
            break;
        }
    }
    if (header.empty()) throw Error(ErrorCode::MissingColumn, "input has no header row");
    if (header.front().rfind("\xEF\xBB\xBF", 0) == 0) header.front().erase(0, 3);
    long iy = -1, id = -1, iz = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "y") iy = static_cast<long>(i);
        if (header[i] == "d") id = static_cast<long>(i);
        if (header[i] == "z") iz = static_cast<long>(i);
    }
    for (auto [idx, name] : {std::pair{iy, "y"}, std::pair{id, "d"}, std::pair{iz, "z"}})
        if (idx < 0) throw Error(ErrorCode::MissingColumn, std::string("header lacks column '") + name + "'");

    MicroSample s;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split(trim(line));
        if (cells.size() != header.size())
            throw MalformedRowError(lineno, "expected " + std::to_string(header.size()) + " fields, got " +
                                                std::to_string(cells.size()));
        double y = 0.0;
        if (!parse_double(cells[static_cast<std::size_t>(iy)], y))
            throw MalformedRowError(lineno, "y is not a finite number: '" + cells[static_cast<std::size_t>(iy)] + "'");
        int d = parse_flag(cells[static_cast<std::size_t>(id)], lineno, "d");
        int z = parse_flag(cells[static_cast<std::size_t>(iz)], lineno, "z");
        s.add(y, d, z);
    }
    if (s.n0() == 0 || s.n1() == 0) throw Error(ErrorCode::EmptyArm, "both values of z must occur");
    return s;
}

MicroSample ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open input file '" + path + "'");
    return read_sample(in);
}

std::string region_to_json(const RegionCurve& rc) { return region_json(rc).dump(); }

RegionCurve region_from_json(const std::string& text) { return region_parse(parse_text(text)); }

std::string confidence_to_json(const ConfidenceRegions& cr) {
    json est = json::array(), band = json::array();
    for (const auto& e : cr.estimate) est.push_back(vec(e));
    for (const auto& b : cr.band) band.push_back(vec(b));
    json j = {{"sr_outer", region_json(cr.sr_outer)},
              {"rr_inner", region_json(cr.rr_inner)},
              {"cv", num(cr.cv)},
              {"level", cr.level},
              {"n", cr.n},
              {"failed_replications", cr.failed_replications},
              {"components", cr.components},
              {"estimate", est},
              {"band", band}};
    return j.dump();
}

ConfidenceRegions confidence_from_json(const std::string& text) {
    json j = parse_text(text);
    ConfidenceRegions cr;
    cr.sr_outer = region_parse(j.at("sr_outer"));
    cr.rr_inner = region_parse(j.at("rr_inner"));
    cr.cv = get_num(j.at("cv"));
    cr.level = j.at("level").get<double>();
    cr.n = j.at("n").get<std::size_t>();
    cr.failed_replications = j.at("failed_replications").get<std::size_t>();
    cr.components = j.at("components").get<std::vector<std::string>>();
    for (const json& e : j.at("estimate")) cr.estimate.push_back(get_vec(e));
    for (const json& b : j.at("band")) cr.band.push_back(get_vec(b));
    return cr;
}

std::string curve_csv(const RegionCurve& rc, const ConfidenceRegions* cr) {
    std::ostringstream os;
    os.precision(17);
    auto cell = [&](const std::optional<double>& v) {
        if (v) os << *v;
    };
    os << "pi_df,delta_lo,delta_hi,bp";
    if (cr) os << ",band_delta_lo,band_delta_hi,band_bp";
    os << '\n';
    for (std::size_t i = 0; i < rc.size(); ++i) {
        os << rc.pi_grid[i] << ',' << rc.delta_lo[i] << ',' << rc.delta_hi[i] << ',';
        cell(rc.bp[i]);
        if (cr) {
            const bool has = i < cr->sr_outer.size();
            os << ',';
            if (has) os << cr->sr_outer.delta_lo[i];
            os << ',';
            if (has) os << cr->sr_outer.delta_hi[i];
            os << ',';
            if (has) cell(cr->rr_inner.bp[i]);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace defiers
