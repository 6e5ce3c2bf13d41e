#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "isac/scenario.hpp"
#include "isac/units.hpp"

namespace isac {

using nlohmann::json;

namespace {

json yaml_to_json(const YAML::Node& node) {
    switch (node.Type()) {
        case YAML::NodeType::Null:
        case YAML::NodeType::Undefined:
            return nullptr;
        case YAML::NodeType::Sequence: {
            json arr = json::array();
            for (const auto& item : node) arr.push_back(yaml_to_json(item));
            return arr;
        }
        case YAML::NodeType::Map: {
            json obj = json::object();
            for (const auto& kv : node) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
            return obj;
        }
        case YAML::NodeType::Scalar:
            break;
    }
    const std::string text = node.Scalar();
    if (node.Tag() == "!") return text;  // explicitly quoted
    if (text == "true" || text == "false") return text == "true";
    // integers first so counts stay integral, then floating point
    try {
        std::size_t used = 0;
        long long v = std::stoll(text, &used);
        if (used == text.size()) return v;
    } catch (...) {
    }
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (...) {
    }
    return text;
}

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("expected a table");
    }

    void allow(std::initializer_list<const char*> keys) const {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!ok.contains(it.key())) fail("unknown key '" + it.key() + "'");
    }

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    double number(const char* key) const {
        const auto& v = at(key);
        if (!v.is_number()) fail(std::string(key) + " must be a number");
        return v.get<double>();
    }
    double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

    std::size_t count(const char* key) const {
        const auto& v = at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            fail(std::string(key) + " must be a non-negative integer");
        return v.get<std::size_t>();
    }
    std::size_t count(const char* key, std::size_t fallback) const {
        return has(key) ? count(key) : fallback;
    }

    bool flag(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_boolean()) fail(std::string(key) + " must be true or false");
        return v.get<bool>();
    }

    std::string text(const char* key) const {
        const auto& v = at(key);
        if (!v.is_string()) fail(std::string(key) + " must be a string");
        return v.get<std::string>();
    }

    const json& at(const char* key) const {
        if (!has(key)) fail(std::string("missing key '") + key + "'");
        return j_.at(key);
    }

    Reader child(const char* key) const { return Reader(at(key), path_ + "." + key); }

    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("scenario " + path_ + ": " + msg);
    }

private:
    const json& j_;
    std::string path_;
};

std::pair<double, double> point2(const Reader& r, const char* key) {
    const auto& v = r.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        r.fail(std::string(key) + " must be [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

std::pair<std::size_t, std::size_t> pair_count(const Reader& r, const char* key,
                                                std::pair<std::size_t, std::size_t> fallback) {
    if (!r.has(key)) return fallback;
    const auto& v = r.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        r.fail(std::string(key) + " must be [delay, doppler]");
    return {v[0].get<std::size_t>(), v[1].get<std::size_t>()};
}

double rcs_field(const Reader& r) {
    if (r.has("rcs_dbsm")) return units::dbsm_to_m2(r.number("rcs_dbsm"));
    return r.number("rcs_m2");
}

void read_ofdm(const Reader& r, OfdmConfig& o) {
    r.allow({"carrier_hz", "subcarrier_spacing_hz", "subcarriers", "symbols", "cp_fraction",
             "tx_power_dbm", "tx_power_w", "tx_antennas", "rx_antennas", "noise_psd_dbm_hz",
             "noise_psd_w_hz"});
    o.carrier_hz = r.number("carrier_hz", o.carrier_hz);
    o.subcarrier_spacing_hz = r.number("subcarrier_spacing_hz", o.subcarrier_spacing_hz);
    o.subcarriers = r.count("subcarriers", o.subcarriers);
    o.symbols = r.count("symbols", o.symbols);
    o.cp_fraction = r.number("cp_fraction", o.cp_fraction);
    if (r.has("tx_power_dbm")) o.tx_power_w = units::dbm_to_watt(r.number("tx_power_dbm"));
    if (r.has("tx_power_w")) o.tx_power_w = r.number("tx_power_w");
    o.tx_antennas = r.count("tx_antennas", o.tx_antennas);
    o.rx_antennas = r.count("rx_antennas", o.rx_antennas);
    if (r.has("noise_psd_dbm_hz"))
        o.noise_psd_w_per_hz = units::dbm_to_watt(r.number("noise_psd_dbm_hz"));
    if (r.has("noise_psd_w_hz")) o.noise_psd_w_per_hz = r.number("noise_psd_w_hz");
}

void read_comm(const Reader& r, Scenario& s) {
    r.allow({"rx_position", "scatterers", "paths", "beam_angle_deg", "noise_var_w"});
    s.comm_paths.clear();
    if (r.has("rx_position")) {
        auto [rx, ry] = point2(r, "rx_position");
        s.comm_paths.push_back(CommPath::line_of_sight(rx, ry));
        if (r.has("scatterers")) {
            const auto& arr = r.at("scatterers");
            if (!arr.is_array()) r.fail("scatterers must be a list");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                Reader sc(arr[i], r.path() + ".scatterers[" + std::to_string(i) + "]");
                sc.allow({"position", "rcs_dbsm", "rcs_m2"});
                auto [sx, sy] = point2(sc, "position");
                s.comm_paths.push_back(CommPath::single_bounce(rx, ry, sx, sy, rcs_field(sc)));
            }
        }
    }
    if (r.has("paths")) {
        const auto& arr = r.at("paths");
        if (!arr.is_array()) r.fail("paths must be a list");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Reader p(arr[i], r.path() + ".paths[" + std::to_string(i) + "]");
            p.allow({"kind", "aod_deg", "delay_s", "doppler_hz", "d0_m", "d1_m", "d2_m", "rcs_dbsm",
                     "rcs_m2"});
            CommPath path;
            std::string kind = p.text("kind");
            if (kind == "los") path.kind = PathKind::Los;
            else if (kind == "nlos") path.kind = PathKind::Nlos;
            else p.fail("kind must be 'los' or 'nlos'");
            path.aod_deg = p.number("aod_deg");
            path.doppler_hz = p.number("doppler_hz", 0.0);
            if (path.kind == PathKind::Los) {
                path.d0_m = p.number("d0_m");
                path.delay_s = p.number("delay_s", path.d0_m / kSpeedOfLight);
            } else {
                path.d1_m = p.number("d1_m");
                path.d2_m = p.number("d2_m");
                path.rcs_m2 = rcs_field(p);
                path.delay_s = p.number("delay_s", (path.d1_m + path.d2_m) / kSpeedOfLight);
            }
            s.comm_paths.push_back(path);
        }
    }
    if (r.has("beam_angle_deg")) s.comm_angle_deg = r.number("beam_angle_deg");
    if (r.has("noise_var_w")) s.rate.comm_noise_var = r.number("noise_var_w");
}

void read_transmission(const Reader& r, Scenario& s) {
    r.allow({"strategy", "rho", "sensing_fraction", "sensing_symbols", "modulation_order"});
    if (r.has("modulation_order")) s.modulation_order = static_cast<int>(r.count("modulation_order"));
    std::string strategy = r.has("strategy") ? r.text("strategy") : "concurrent";
    if (strategy == "concurrent") {
        s.strategy = Concurrent{r.number("rho", 0.8)};
    } else if (strategy == "time_sharing") {
        TimeSharing ts;
        if (r.has("sensing_symbols")) {
            const auto& arr = r.at("sensing_symbols");
            if (!arr.is_array()) r.fail("sensing_symbols must be a list");
            for (const auto& v : arr) {
                if (!v.is_number_integer() || v.get<long long>() < 0)
                    r.fail("sensing_symbols entries must be non-negative integers");
                ts.sensing_symbols.push_back(v.get<std::size_t>());
            }
        } else {
            double f = r.number("sensing_fraction");
            if (!(f >= 0.0 && f <= 1.0)) r.fail("sensing_fraction out of [0,1]");
            // resolved once the beam count and symbol count are known
            ts = make_time_sharing(s.ofdm.symbols, std::max<std::size_t>(s.beams.count, 1), f);
        }
        s.strategy = std::move(ts);
    } else {
        r.fail("strategy must be 'concurrent' or 'time_sharing'");
    }
}

void read_sensing(const Reader& r, SensingSettings& se) {
    r.allow({"pfa", "guard", "training", "pad", "esprit_threshold", "max_sources", "initial_snr",
             "local_maxima_only"});
    se.pfa = r.number("pfa", se.pfa);
    std::tie(se.guard_delay, se.guard_doppler) =
        pair_count(r, "guard", {se.guard_delay, se.guard_doppler});
    std::tie(se.train_delay, se.train_doppler) =
        pair_count(r, "training", {se.train_delay, se.train_doppler});
    se.pad = r.count("pad", se.pad);
    se.esprit_threshold = r.number("esprit_threshold", se.esprit_threshold);
    se.max_sources = r.count("max_sources", se.max_sources);
    se.initial_snr = r.number("initial_snr", se.initial_snr);
    se.local_maxima_only = r.flag("local_maxima_only", se.local_maxima_only);
}

Scenario scenario_from_json(const json& j) {
    Reader root(j, "$");
    root.allow({"ofdm", "targets", "comm", "transmission", "beams", "sensing", "rate",
                "probe_target"});
    Scenario s = desk_scenario();
    if (root.has("ofdm")) read_ofdm(root.child("ofdm"), s.ofdm);
    if (root.has("beams")) {
        auto b = root.child("beams");
        b.allow({"count", "max_scan_deg"});
        s.beams.count = b.count("count", s.beams.count);
        s.beams.max_scan_deg = b.number("max_scan_deg", s.beams.max_scan_deg);
    }
    if (root.has("targets")) {
        const auto& arr = root.at("targets");
        if (!arr.is_array()) root.fail("targets must be a list");
        s.targets.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Reader t(arr[i], "$.targets[" + std::to_string(i) + "]");
            t.allow({"range_m", "velocity_mps", "angle_deg", "rcs_dbsm", "rcs_m2"});
            s.targets.push_back({t.number("range_m"), t.number("velocity_mps", 0.0),
                                 t.number("angle_deg", 0.0), rcs_field(t)});
        }
    }
    if (root.has("comm")) read_comm(root.child("comm"), s);
    if (root.has("transmission")) read_transmission(root.child("transmission"), s);
    if (root.has("sensing")) read_sensing(root.child("sensing"), s.sensing);
    if (root.has("rate")) {
        auto r = root.child("rate");
        r.allow({"samples"});
        s.rate.samples = r.count("samples", s.rate.samples);
    }
    s.probe_target = root.count("probe_target", 0);
    return s;
}

json path_to_json(const CommPath& p) {
    json j;
    j["kind"] = p.kind == PathKind::Los ? "los" : "nlos";
    j["aod_deg"] = p.aod_deg;
    j["delay_s"] = p.delay_s;
    j["doppler_hz"] = p.doppler_hz;
    if (p.kind == PathKind::Los) {
        j["d0_m"] = p.d0_m;
    } else {
        j["d1_m"] = p.d1_m;
        j["d2_m"] = p.d2_m;
        j["rcs_m2"] = p.rcs_m2;
    }
    return j;
}

json scenario_json(const Scenario& s) {
    json j;
    const auto& o = s.ofdm;
    j["ofdm"] = {{"carrier_hz", o.carrier_hz},
                 {"subcarrier_spacing_hz", o.subcarrier_spacing_hz},
                 {"subcarriers", o.subcarriers},
                 {"symbols", o.symbols},
                 {"cp_fraction", o.cp_fraction},
                 {"tx_power_w", o.tx_power_w},
                 {"tx_antennas", o.tx_antennas},
                 {"rx_antennas", o.rx_antennas},
                 {"noise_psd_w_hz", o.noise_psd_w_per_hz}};
    j["targets"] = json::array();
    for (const auto& t : s.targets)
        j["targets"].push_back({{"range_m", t.range_m},
                                {"velocity_mps", t.velocity_mps},
                                {"angle_deg", t.angle_deg},
                                {"rcs_m2", t.rcs_m2}});
    json comm;
    comm["paths"] = json::array();
    for (const auto& p : s.comm_paths) comm["paths"].push_back(path_to_json(p));
    if (s.comm_angle_deg) comm["beam_angle_deg"] = *s.comm_angle_deg;
    if (s.rate.comm_noise_var) comm["noise_var_w"] = *s.rate.comm_noise_var;
    j["comm"] = comm;
    json tx;
    tx["modulation_order"] = s.modulation_order;
    if (const auto* c = std::get_if<Concurrent>(&s.strategy)) {
        tx["strategy"] = "concurrent";
        tx["rho"] = c->rho;
    } else {
        tx["strategy"] = "time_sharing";
        tx["sensing_symbols"] = std::get<TimeSharing>(s.strategy).sensing_symbols;
    }
    j["transmission"] = tx;
    j["beams"] = {{"count", s.beams.count}, {"max_scan_deg", s.beams.max_scan_deg}};
    const auto& se = s.sensing;
    j["sensing"] = {{"pfa", se.pfa},
                    {"guard", {se.guard_delay, se.guard_doppler}},
                    {"training", {se.train_delay, se.train_doppler}},
                    {"pad", se.pad},
                    {"esprit_threshold", se.esprit_threshold},
                    {"max_sources", se.max_sources},
                    {"initial_snr", se.initial_snr},
                    {"local_maxima_only", se.local_maxima_only}};
    j["rate"] = {{"samples", s.rate.samples}};
    j["probe_target"] = s.probe_target;
    return j;
}

}  // namespace

Scenario scenario_from_text(const std::string& text, bool is_json) {
    json j;
    if (is_json) {
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("scenario JSON parse error: ") + e.what());
        }
    } else {
        try {
            j = yaml_to_json(YAML::Load(text));
        } catch (const YAML::Exception& e) {
            throw ConfigError(std::string("scenario YAML parse error: ") + e.what());
        }
    }
    return scenario_from_json(j);
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scenario file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    auto ext = path.extension().string();
    return scenario_from_text(buf.str(), ext == ".json");
}

std::string scenario_to_json(const Scenario& s) { return scenario_json(s).dump(2); }

std::string scenario_hash(const Scenario& s) {
    const std::string canon = scenario_json(s).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace isac
