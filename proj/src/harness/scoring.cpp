#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "isac/harness.hpp"

namespace isac {

ScoringGates scoring_gates(const Scenario& s) {
    const PipelineConfig p = make_pipeline_config(s);
    return {p.cluster.range_res_m, p.cluster.velocity_res_mps, p.cluster.angle_res_deg};
}

std::vector<bool> score_detections(std::span<const Detection> detections,
                                   std::span<const Target> truth, const ScoringGates& gates) {
    struct Pair {
        double dist;
        std::size_t target, det;
    };
    std::vector<Pair> pairs;
    for (std::size_t t = 0; t < truth.size(); ++t) {
        for (std::size_t d = 0; d < detections.size(); ++d) {
            const double dr = std::abs(detections[d].range_m - truth[t].range_m);
            const double dv = std::abs(detections[d].velocity_mps - truth[t].velocity_mps);
            const double da = std::abs(detections[d].angle_deg - truth[t].angle_deg);
            if (dr > gates.range_m || dv > gates.velocity_mps || da > gates.angle_deg) continue;
            const double nr = dr / gates.range_m, nv = dv / gates.velocity_mps, na = da / gates.angle_deg;
            pairs.push_back({nr * nr + nv * nv + na * na, t, d});
        }
    }
    std::ranges::sort(pairs, [](const Pair& a, const Pair& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.target != b.target) return a.target < b.target;
        return a.det < b.det;
    });
    std::vector<bool> hit(truth.size(), false), used(detections.size(), false);
    for (const auto& p : pairs) {
        if (hit[p.target] || used[p.det]) continue;
        hit[p.target] = true;
        used[p.det] = true;
    }
    return hit;
}

std::string format_number(double v, int decimals) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::fixed << std::setprecision(decimals) << v;
    return os.str();
}

namespace {

std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

void append_row(std::string& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += quote(row[i]);
    }
    out += "\r\n";
}

}  // namespace

std::string CsvTable::str() const {
    std::string out;
    append_row(out, header);
    for (const auto& r : rows) append_row(out, r);
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open output file " + path.string());
    const std::string s = str();
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace isac
